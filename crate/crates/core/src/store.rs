//! Where higher layers get quadratic invariants and unit indices from.
//! The default store computes everything on demand; callers that want
//! persistence wrap it.

use crate::budget::StepBudget;
use crate::error::Result;
use crate::multiquad::MultiquadField;
use crate::quadratic::{self, QuadInvariants, QuadUnit, SquarefreeRadicand};
use crate::units;

pub trait InvariantStore: Sync {
    fn budget(&self) -> &StepBudget;

    fn quadratic(&self, rad: SquarefreeRadicand) -> Result<QuadInvariants> {
        quadratic::invariants(rad, self.budget())
    }

    fn fundamental_unit(&self, rad: SquarefreeRadicand) -> Result<QuadUnit> {
        quadratic::fundamental_unit(rad, self.budget())
    }

    fn q_index(&self, k: &MultiquadField) -> Result<u64> {
        Ok(units::unit_group(k, self)?.q_index)
    }
}

/// Computes every request from scratch.
#[derive(Debug, Default)]
pub struct DirectStore {
    budget: StepBudget,
}

impl DirectStore {
    pub fn new(budget: StepBudget) -> Self {
        Self { budget }
    }
}

impl InvariantStore for DirectStore {
    fn budget(&self) -> &StepBudget {
        &self.budget
    }
}
