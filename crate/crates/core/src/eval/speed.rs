use std::hint::black_box;
use std::time::{Duration, Instant};

use super::EvalError;
use crate::Tagger;

/// Time source for throughput measurement.
pub trait Clock {
    /// Time elapsed since some fixed origin.
    fn now(&mut self) -> Duration;
}

/// Wall clock backed by `Instant`.
#[derive(Debug, Clone, Copy)]
pub struct MonotonicClock {
    origin: Instant,
}

impl Default for MonotonicClock {
    fn default() -> Self {
        MonotonicClock { origin: Instant::now() }
    }
}

impl Clock for MonotonicClock {
    fn now(&mut self) -> Duration {
        self.origin.elapsed()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpeedReport {
    pub tagger_id: String,
    pub words: usize,
    pub sentences: usize,
    pub per_rep_wps: Vec<f64>,
}

impl SpeedReport {
    /// Mean of the per-repetition rates.
    pub fn mean_wps(&self) -> f64 {
        self.per_rep_wps.iter().sum::<f64>() / self.per_rep_wps.len() as f64
    }

    pub fn render(&self) -> String {
        let rates: Vec<String> = self.per_rep_wps.iter().map(|r| format!("{r:.0}")).collect();
        format!(
            "tagger: {}\nsentences: {}\nwords: {}\nrepetitions: {}\nwords/sec per repetition: {}\nSpd. (mean words/sec): {:.0}\n",
            self.tagger_id,
            self.sentences,
            self.words,
            self.per_rep_wps.len(),
            rates.join(" "),
            self.mean_wps()
        )
    }
}

/// Tag pre-tokenized sentences `reps` times on one thread. Only the tagging
/// loop sits between the two clock reads; the tagger is already loaded.
pub fn measure_speed<C: Clock>(
    tagger: &dyn Tagger,
    sentences: &[Vec<&str>],
    reps: usize,
    clock: &mut C,
) -> Result<SpeedReport, EvalError> {
    if reps < 3 {
        return Err(EvalError::TooFewRepetitions(reps));
    }
    let words: usize = sentences.iter().map(Vec::len).sum();
    if words == 0 {
        return Err(EvalError::EmptySpeedCorpus);
    }
    let mut per_rep_wps = Vec::with_capacity(reps);
    for _ in 0..reps {
        let start = clock.now();
        for s in sentences {
            black_box(tagger.tag(black_box(s)));
        }
        let elapsed = clock.now().saturating_sub(start).max(Duration::from_nanos(1));
        per_rep_wps.push(words as f64 / elapsed.as_secs_f64());
    }
    Ok(SpeedReport {
        tagger_id: tagger.name(),
        words,
        sentences: sentences.len(),
        per_rep_wps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Tag;
    use std::sync::{Arc, Mutex};

    #[derive(Default)]
    struct Log(Arc<Mutex<Vec<String>>>);

    struct FakeClock {
        log: Arc<Mutex<Vec<String>>>,
        ticks: Vec<u64>,
    }

    impl Clock for FakeClock {
        fn now(&mut self) -> Duration {
            self.log.lock().unwrap().push("clock".into());
            Duration::from_millis(self.ticks.remove(0))
        }
    }

    struct Recording {
        log: Arc<Mutex<Vec<String>>>,
        tag: Tag,
    }

    impl Tagger for Recording {
        fn tag<'s>(&'s self, words: &[&str]) -> Vec<&'s Tag> {
            self.log.lock().unwrap().push(format!("tag{}", words.len()));
            vec![&self.tag; words.len()]
        }

        fn name(&self) -> String {
            "rec".into()
        }
    }

    #[test]
    fn timing_brackets_tagging_only() {
        let log = Log::default();
        let tagger = Recording {
            log: log.0.clone(),
            tag: Tag::new("N").unwrap(),
        };
        let mut clock = FakeClock {
            log: log.0.clone(),
            ticks: vec![0, 1000, 1000, 1500, 2000, 4000],
        };
        let s = vec![vec!["a", "b", "c"], vec!["d"]];
        let r = measure_speed(&tagger, &s, 3, &mut clock).unwrap();
        let one_rep = ["clock", "tag3", "tag1", "clock"];
        let expected: Vec<&str> = one_rep.iter().cycle().take(12).copied().collect();
        assert_eq!(*log.0.lock().unwrap(), expected);
        assert_eq!(r.per_rep_wps, vec![4.0, 8.0, 2.0]);
        assert!((r.mean_wps() - 14.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        let tagger = Recording {
            log: Default::default(),
            tag: Tag::new("N").unwrap(),
        };
        let mut clock = MonotonicClock::default();
        assert!(matches!(
            measure_speed(&tagger, &[], 3, &mut clock),
            Err(EvalError::EmptySpeedCorpus)
        ));
        assert!(matches!(
            measure_speed(&tagger, &[vec!["a"]], 2, &mut clock),
            Err(EvalError::TooFewRepetitions(2))
        ));
    }
}
