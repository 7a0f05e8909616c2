use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{AnswerId, Event, Fact, QuestionId, Stream};

/// Seeded sequential stream over questions `0..universe`, where question `i`
/// has answer `i`.
///
/// Each step teaches a uniformly random question with probability
/// `teach_fraction` (always, while nothing has been taught) and otherwise
/// evaluates a uniformly random previously taught question.
pub fn random_stream(universe: usize, steps: usize, teach_fraction: f64, seed: u64) -> Result<Stream> {
    if !(0.0..=1.0).contains(&teach_fraction) {
        return Err(Error::config(format!("teach fraction must lie in [0, 1], got {teach_fraction}")));
    }
    if universe == 0 && steps > 0 {
        return Err(Error::config("random stream needs a non-empty question universe"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut taught: Vec<u32> = Vec::new();
    let mut is_taught = vec![false; universe];
    let mut events = Vec::with_capacity(steps);
    for _ in 0..steps {
        if taught.is_empty() || rng.random_bool(teach_fraction) {
            let q = rng.random_range(0..universe as u32);
            if !std::mem::replace(&mut is_taught[q as usize], true) {
                taught.push(q);
            }
            events.push(Event::Teach(Fact::new(QuestionId(q), AnswerId(q))));
        } else {
            let q = taught[rng.random_range(0..taught.len())];
            events.push(Event::Evaluate(QuestionId(q)));
        }
    }
    Ok(Stream::new(events, true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{format_stream, validate_sequential, Vocabulary};

    #[test]
    fn all_teach_has_no_evaluations() {
        let s = random_stream(5, 200, 1.0, 1).unwrap();
        assert!(s.events.iter().all(|e| matches!(e, Event::Teach(_))));
    }

    #[test]
    fn same_seed_same_bytes() {
        let vocab = Vocabulary::numbered(20);
        let a = format_stream(&random_stream(20, 500, 0.4, 9).unwrap(), &vocab);
        let b = format_stream(&random_stream(20, 500, 0.4, 9).unwrap(), &vocab);
        assert_eq!(a, b);
        let c = format_stream(&random_stream(20, 500, 0.4, 10).unwrap(), &vocab);
        assert_ne!(a, c);
    }

    #[test]
    fn empty_stream_is_allowed() {
        assert!(random_stream(0, 0, 0.5, 0).unwrap().is_empty());
        assert!(random_stream(0, 1, 0.5, 0).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn output_is_sequential(u in 1usize..30, t in 0usize..300, f in 0.0f64..=1.0, seed: u64) {
                let s = random_stream(u, t, f, seed).unwrap();
                prop_assert_eq!(s.len(), t);
                prop_assert!(s.sequential);
                prop_assert!(validate_sequential(&s).sequential);
            }
        }
    }
}
