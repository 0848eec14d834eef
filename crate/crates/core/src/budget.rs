use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};

/// Caller-supplied cap on the number of elementary steps (continued
/// fraction terms, saturation tests) a long computation may take.
#[derive(Debug)]
pub struct StepBudget {
    limit: u64,
    used: AtomicU64,
}

impl StepBudget {
    pub const DEFAULT_LIMIT: u64 = 50_000_000;

    pub fn new(limit: u64) -> Self {
        Self { limit, used: AtomicU64::new(0) }
    }

    pub fn unlimited() -> Self {
        Self::new(u64::MAX)
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn used(&self) -> u64 {
        self.used.load(Ordering::Relaxed)
    }

    /// Consume `n` steps, failing once the limit is crossed.
    pub fn charge(&self, n: u64) -> Result<()> {
        let before = self.used.fetch_add(n, Ordering::Relaxed);
        if before.saturating_add(n) > self.limit {
            return Err(Error::BudgetExhausted(self.limit));
        }
        Ok(())
    }
}

impl Default for StepBudget {
    fn default() -> Self {
        Self::new(Self::DEFAULT_LIMIT)
    }
}
