use std::time::{Duration, Instant};

/// Wall-clock cap for solvers. Exceeding it yields an inconclusive result.
#[derive(Clone, Copy, Debug)]
pub struct Budget {
    deadline: Option<Instant>,
    /// Upper bound on positions a search may store.
    pub max_positions: usize,
}

pub const BUDGET_ENV: &str = "NEATGAMES_BUDGET_MS";

impl Budget {
    pub fn unlimited() -> Self {
        Budget {
            deadline: None,
            max_positions: 4_000_000,
        }
    }

    pub fn millis(ms: u64) -> Self {
        Budget {
            deadline: Some(Instant::now() + Duration::from_millis(ms)),
            ..Self::unlimited()
        }
    }

    /// Reads `NEATGAMES_BUDGET_MS`; unset or unparsable means unlimited time.
    pub fn from_env() -> Self {
        match std::env::var(BUDGET_ENV).ok().and_then(|v| v.trim().parse::<u64>().ok()) {
            Some(ms) => Self::millis(ms),
            None => Self::unlimited(),
        }
    }

    pub fn exhausted(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

impl Default for Budget {
    fn default() -> Self {
        Self::unlimited()
    }
}
