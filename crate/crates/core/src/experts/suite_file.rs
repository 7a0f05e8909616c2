//! Value-based expert suites on disk: one `expert <id> value <qid> <natural>`
//! line per listed pair. Experts are numbered in order of first appearance.

use std::fmt::Write as _;
use std::path::Path;

use indexmap::IndexMap;

use super::{ExpertId, ValueFunction};
use crate::error::{Error, Result};
use crate::model::{QuestionId, Vocabulary};

#[derive(Debug, Clone)]
pub struct SuiteFile {
    pub names: Vec<String>,
    pub functions: Vec<ValueFunction>,
}

pub fn parse_suite(text: &str, source_name: &str, vocab: &mut Vocabulary) -> Result<SuiteFile> {
    let parse_err = |line: usize, message: String| Error::Parse {
        source_name: source_name.to_owned(),
        line,
        message,
    };
    let mut pairs: IndexMap<String, Vec<(QuestionId, u64, usize)>> = IndexMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["expert", id, "value", qid, natural] => {
                let value: u64 = natural
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("`{natural}` is not a natural number")))?;
                if value == 0 {
                    return Err(parse_err(line_no, "values must be at least 1".into()));
                }
                let q = vocab.question(qid);
                pairs.entry((*id).to_owned()).or_default().push((q, value, line_no));
            }
            _ => {
                return Err(parse_err(
                    line_no,
                    format!("expected `expert <id> value <qid> <natural>`, got `{line}`"),
                ))
            }
        }
    }
    if pairs.is_empty() {
        return Err(parse_err(0, "suite lists no experts".into()));
    }

    let mut names = Vec::with_capacity(pairs.len());
    let mut functions = Vec::with_capacity(pairs.len());
    for (i, (name, listed)) in pairs.into_iter().enumerate() {
        let expert = ExpertId(i);
        let mut values = Vec::new();
        let mut owner: std::collections::HashMap<u64, usize> = Default::default();
        for (q, v, line_no) in listed {
            if q.index() >= values.len() {
                values.resize(q.index() + 1, 0);
            }
            if values[q.index()] != 0 {
                return Err(parse_err(
                    line_no,
                    format!("expert `{name}` lists `{}` twice", vocab.question_name(q)),
                ));
            }
            if let Some(prev) = owner.insert(v, line_no) {
                return Err(parse_err(
                    line_no,
                    format!("expert `{name}` reuses value {v} (first on line {prev}); values must be injective"),
                ));
            }
            values[q.index()] = v;
        }
        functions.push(ValueFunction::new(expert, values)?);
        names.push(name);
    }
    Ok(SuiteFile { names, functions })
}

pub fn read_suite(path: &Path, vocab: &mut Vocabulary) -> Result<SuiteFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_suite(&text, &path.display().to_string(), vocab)
}

pub fn format_suite(functions: &[ValueFunction], vocab: &Vocabulary) -> String {
    let mut out = String::new();
    for (e, f) in functions.iter().enumerate() {
        for (q, v) in f.pairs() {
            let _ = writeln!(out, "expert {e} value {} {v}", vocab.question_name(q));
        }
    }
    out
}
