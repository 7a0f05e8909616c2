//! Line-oriented stream files: `T <qid> <answer>` or `E <qid>`, one event per
//! line. Blank lines and lines starting with `#` are skipped.

use std::fmt::Write as _;
use std::path::Path;

use super::{Event, GroundTruth, Stream, Vocabulary};
use crate::error::{Error, Result};

/// Parses stream text, interning tokens into `vocab`.
///
/// The returned stream's `sequential` flag is the result of scanning it, and
/// a question taught with two different answers is rejected.
pub fn parse_stream(text: &str, source_name: &str, vocab: &mut Vocabulary) -> Result<Stream> {
    let parse_err = |line: usize, message: String| Error::Parse {
        source_name: source_name.to_owned(),
        line,
        message,
    };

    let mut events = Vec::new();
    let mut truth = GroundTruth::default();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let event = match tokens.as_slice() {
            ["T", qid, answer] => {
                let fact = super::Fact::new(vocab.question(qid), vocab.answer(answer));
                truth
                    .learn(fact)
                    .map_err(|_| parse_err(line_no, format!("question `{qid}` taught with a second answer `{answer}`")))?;
                Event::Teach(fact)
            }
            ["E", qid] => Event::Evaluate(vocab.question(qid)),
            _ => {
                return Err(parse_err(
                    line_no,
                    format!("expected `T <qid> <answer>` or `E <qid>`, got `{line}`"),
                ))
            }
        };
        events.push(event);
    }
    let mut stream = Stream::new(events, false);
    stream.sequential = super::validate_sequential(&stream).sequential;
    Ok(stream)
}

pub fn read_stream(path: &Path, vocab: &mut Vocabulary) -> Result<Stream> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_stream(&text, &path.display().to_string(), vocab)
}

pub fn format_stream(stream: &Stream, vocab: &Vocabulary) -> String {
    let mut out = String::new();
    for event in &stream.events {
        match *event {
            Event::Teach(fact) => {
                let _ = writeln!(
                    out,
                    "T {} {}",
                    vocab.question_name(fact.question),
                    vocab.answer_name(fact.answer)
                );
            }
            Event::Evaluate(q) => {
                let _ = writeln!(out, "E {}", vocab.question_name(q));
            }
        }
    }
    out
}

pub fn write_stream(path: &Path, stream: &Stream, vocab: &Vocabulary) -> Result<()> {
    std::fs::write(path, format_stream(stream, vocab)).map_err(|e| Error::io(path, e))
}
