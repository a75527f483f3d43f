//! Orbit, cycle, operator and tail for one `(lambda, seed)` pair.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::{iterate_orbit, settle_cycle, CycleSearch, LimitCycle, MapFamily};
use crate::operator::{
    build_tridiagonal, extract_tail_coefficients, TailCoefficients, TridiagonalOperator,
};
use crate::spectra::ResolventModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Setup {
    pub lambda: f64,
    pub seed: f64,
    pub cycle: LimitCycle,
    pub operator: TridiagonalOperator,
    pub tail: TailCoefficients,
}

impl Setup {
    /// Fails with [`Error::NoCycle`] when no cycle is found and with
    /// [`Error::Convergence`] when the chain has not settled at `depth`.
    pub fn new(
        family: &MapFamily,
        lambda: f64,
        seed: f64,
        depth: usize,
        search: &CycleSearch,
    ) -> Result<Self> {
        let cycle = settle_cycle(family, lambda, seed, search)?;
        if !cycle.converged {
            return Err(Error::NoCycle {
                lambda,
                max_period: search.max_period,
                residual: cycle.residual,
            });
        }
        let orbit = iterate_orbit(family, lambda, seed, 2 * depth)?;
        let operator = build_tridiagonal(&orbit, depth)?;
        let tail = extract_tail_coefficients(&operator, &cycle)?;
        Ok(Self {
            lambda,
            seed,
            cycle,
            operator,
            tail,
        })
    }

    /// Logistic map with default search settings.
    pub fn logistic(lambda: f64, seed: f64, depth: usize) -> Result<Self> {
        Self::new(
            &MapFamily::logistic(),
            lambda,
            seed,
            depth,
            &CycleSearch::default(),
        )
    }

    pub fn model(&self) -> ResolventModel<'_> {
        ResolventModel::new(&self.operator, &self.tail)
    }
}
