//! The symmetric tridiagonal operator built from an orbit, and its periodic tail.
//!
//! Orbit entries are interleaved into the matrix: `a_n = x_{2n}` on the
//! diagonal and `b_n = x_{2n+1}` on the off-diagonal. Once the orbit has
//! settled on a cycle of period `N`, both sequences become periodic with
//! period `p = N/2` for even `N` and `p = N` for odd `N`. Which half of the
//! cycle feeds the diagonal depends on the phase of the seed; the other
//! choice exchanges the roles of `alpha` and `beta`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::{LimitCycle, Orbit};

/// Largest allowed gap between the last tail period of the chain and the
/// cycle it is read from.
pub const SETTLE_TOLERANCE: f64 = 1e-8;

/// Recursion coefficients `a_n`, `b_n` of a Jacobi matrix.
pub trait JacobiChain {
    fn diag(&self, n: usize) -> Option<f64>;
    fn offdiag(&self, n: usize) -> Option<f64>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TridiagonalOperator {
    pub lambda: f64,
    pub seed: f64,
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl TridiagonalOperator {
    /// Operator from explicit coefficient lists of equal length.
    pub fn from_coefficients(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || diag.len() != offdiag.len() {
            return Err(Error::input(format!(
                "need equal, non-empty coefficient lists (got {} and {})",
                diag.len(),
                offdiag.len()
            )));
        }
        if diag.iter().chain(&offdiag).any(|v| !v.is_finite()) {
            return Err(Error::input("coefficients must be finite"));
        }
        Ok(Self {
            lambda: f64::NAN,
            seed: diag[0],
            diag,
            offdiag,
        })
    }

    pub fn depth(&self) -> usize {
        self.diag.len()
    }

    pub fn diag_entries(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag_entries(&self) -> &[f64] {
        &self.offdiag
    }

    /// Dense `M x M` matrix; `b_{M-1}` couples to the (absent) site `M` and
    /// does not appear.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let m = self.depth();
        let mut h = DMatrix::zeros(m, m);
        for n in 0..m {
            h[(n, n)] = self.diag[n];
            if n + 1 < m {
                h[(n, n + 1)] = self.offdiag[n];
                h[(n + 1, n)] = self.offdiag[n];
            }
        }
        assert!(h == h.transpose(), "tridiagonal operator must be symmetric");
        h
    }
}

impl JacobiChain for TridiagonalOperator {
    fn diag(&self, n: usize) -> Option<f64> {
        self.diag.get(n).copied()
    }

    fn offdiag(&self, n: usize) -> Option<f64> {
        self.offdiag.get(n).copied()
    }
}

/// `a_n = x_{2n}`, `b_n = x_{2n+1}` for `n < depth`.
pub fn build_tridiagonal(orbit: &Orbit, depth: usize) -> Result<TridiagonalOperator> {
    if depth == 0 {
        return Err(Error::input("depth must be at least 1"));
    }
    if orbit.len() < 2 * depth {
        return Err(Error::input(format!(
            "orbit of length {} cannot fill depth {depth} (needs {})",
            orbit.len(),
            2 * depth
        )));
    }
    let (diag, offdiag) = orbit.values[..2 * depth]
        .chunks_exact(2)
        .map(|pair| (pair[0], pair[1]))
        .unzip();
    Ok(TridiagonalOperator {
        lambda: orbit.lambda,
        seed: orbit.seed,
        diag,
        offdiag,
    })
}

/// Which half of an even cycle the diagonal locks onto, counted from the
/// smallest cycle element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
    /// Odd cycles (the diagonal visits every element) and synthetic tails.
    NotApplicable,
}

/// Periodic coefficients `alpha_1..alpha_p`, `beta_1..beta_p` closing the
/// continued fraction.
///
/// Relative to a chain of depth `M`, `alpha_i` continues the diagonal at
/// `a_{M-1+i}` and `beta_i` continues the off-diagonal at `b_{M-2+i}`; the
/// terminator starts with `beta_1^2` where the truncated fraction stops.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailCoefficients {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub deviation_diag: f64,
    pub deviation_offdiag: f64,
    pub parity: Parity,
}

impl TailCoefficients {
    pub fn new(alpha: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        if alpha.is_empty() || alpha.len() != beta.len() {
            return Err(Error::input(
                "alpha and beta must be non-empty and equal length",
            ));
        }
        if let Some(index) = beta.iter().position(|b| *b == 0.0) {
            return Err(Error::DegenerateChain { index });
        }
        if alpha.iter().chain(&beta).any(|v| !v.is_finite()) {
            return Err(Error::input("tail coefficients must be finite"));
        }
        Ok(Self {
            alpha,
            beta,
            deviation_diag: 0.0,
            deviation_offdiag: 0.0,
            parity: Parity::NotApplicable,
        })
    }

    pub fn period(&self) -> usize {
        self.alpha.len()
    }

    /// Periodic continuation of the diagonal at index `n` for a chain of
    /// the given depth.
    pub fn diag_at(&self, depth: usize, n: usize) -> f64 {
        let p = self.period() as i64;
        self.alpha[(n as i64 - depth as i64).rem_euclid(p) as usize]
    }

    pub fn offdiag_at(&self, depth: usize, n: usize) -> f64 {
        let p = self.period() as i64;
        self.beta[(n as i64 + 1 - depth as i64).rem_euclid(p) as usize]
    }

    /// Tail of the same cycle read with the opposite phase: the old
    /// off-diagonal becomes the diagonal and vice versa.
    pub fn exchanged(&self) -> Self {
        let p = self.period();
        let beta = (0..p).map(|i| self.alpha[(i + p - 1) % p]).collect();
        Self {
            alpha: self.beta.clone(),
            beta,
            deviation_diag: self.deviation_diag,
            deviation_offdiag: self.deviation_offdiag,
            parity: match self.parity {
                Parity::Even => Parity::Odd,
                Parity::Odd => Parity::Even,
                Parity::NotApplicable => Parity::NotApplicable,
            },
        }
    }

    /// Phase-matches the cycle against the last period of the chain and
    /// reads the tail from the cycle values. No settle check.
    pub fn from_cycle(operator: &TridiagonalOperator, cycle: &LimitCycle) -> Result<Self> {
        let n_cycle = cycle.period;
        if n_cycle == 0 || cycle.values.len() != n_cycle {
            return Err(Error::input("cycle has no values"));
        }
        let m = operator.depth();
        let p = tail_period(n_cycle);
        let d = &cycle.values;
        let at = |k: usize| d[k % n_cycle];
        let window = m.saturating_sub(p)..m;

        let phase_error = |s: usize| {
            window
                .clone()
                .map(|n| {
                    let ea = (operator.diag[n] - at(s + 2 * n)).abs();
                    let eb = (operator.offdiag[n] - at(s + 2 * n + 1)).abs();
                    ea.max(eb)
                })
                .fold(0.0, f64::max)
        };
        let shift = (0..n_cycle)
            .min_by(|&s, &t| phase_error(s).total_cmp(&phase_error(t)))
            .unwrap_or(0);

        let alpha: Vec<f64> = (1..=p).map(|i| at(shift + 2 * (m - 1 + i))).collect();
        let beta: Vec<f64> = (1..=p).map(|i| at(shift + 2 * (m + i - 2) + 1)).collect();

        let parity = if n_cycle % 2 == 1 {
            Parity::NotApplicable
        } else if (shift + n_cycle - cycle.min_index()).is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        };
        let mut tail = TailCoefficients::new(alpha, beta)?;
        tail.parity = parity;
        tail.deviation_diag = (operator.diag[m - 1] - tail.diag_at(m, m - 1)).abs();
        tail.deviation_offdiag = (operator.offdiag[m - 1] - tail.beta[0]).abs();
        Ok(tail)
    }

    /// Largest gap between the last `period` chain entries and the tail.
    pub fn settle_gap(&self, operator: &TridiagonalOperator) -> f64 {
        let m = operator.depth();
        (m.saturating_sub(self.period())..m)
            .map(|n| {
                let ea = (operator.diag[n] - self.diag_at(m, n)).abs();
                let eb = (operator.offdiag[n] - self.offdiag_at(m, n)).abs();
                ea.max(eb)
            })
            .fold(0.0, f64::max)
    }
}

/// `N/2` for even cycles, `N` for odd ones.
pub fn tail_period(cycle_period: usize) -> usize {
    if cycle_period.is_multiple_of(2) {
        cycle_period / 2
    } else {
        cycle_period
    }
}

pub fn extract_tail_coefficients(
    operator: &TridiagonalOperator,
    cycle: &LimitCycle,
) -> Result<TailCoefficients> {
    if !cycle.converged {
        return Err(Error::input(format!(
            "limit cycle at lambda = {} did not converge (residual {:e})",
            cycle.lambda, cycle.residual
        )));
    }
    let tail = TailCoefficients::from_cycle(operator, cycle)?;
    if tail.settle_gap(operator) > SETTLE_TOLERANCE {
        return Err(Error::Convergence {
            depth: operator.depth(),
            deviation_diag: tail.deviation_diag,
            deviation_offdiag: tail.deviation_offdiag,
        });
    }
    Ok(tail)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub depth: usize,
    /// `|a_{M-1} - alpha|` for the matching tail entry.
    pub deviation_diag: f64,
    /// `|b_{M-1} - beta_1|`
    pub deviation_offdiag: f64,
    /// `|a_{M-1}| - |alpha|`, the magnitude form of the same measure.
    pub magnitude_gap_diag: f64,
    pub magnitude_gap_offdiag: f64,
    pub threshold: f64,
    /// Smallest depth from which every later entry is within `threshold`
    /// of the tail.
    pub recommended_depth: Option<usize>,
}

impl ConvergenceReport {
    pub fn settled(&self) -> bool {
        self.deviation_diag < self.threshold && self.deviation_offdiag < self.threshold
    }
}

pub fn convergence_diagnostics(
    operator: &TridiagonalOperator,
    tail: &TailCoefficients,
    threshold: f64,
) -> ConvergenceReport {
    let m = operator.depth();
    let alpha = tail.diag_at(m, m - 1);
    let beta = tail.offdiag_at(m, m - 1);
    let a_last = operator.diag[m - 1];
    let b_last = operator.offdiag[m - 1];
    let within = |n: usize| {
        (operator.diag[n] - tail.diag_at(m, n)).abs() < threshold
            && (operator.offdiag[n] - tail.offdiag_at(m, n)).abs() < threshold
    };
    let mut recommended_depth = None;
    for n in (0..m).rev() {
        if within(n) {
            recommended_depth = Some(n + 1);
        } else {
            break;
        }
    }
    ConvergenceReport {
        depth: m,
        deviation_diag: (a_last - alpha).abs(),
        deviation_offdiag: (b_last - beta).abs(),
        magnitude_gap_diag: a_last.abs() - alpha.abs(),
        magnitude_gap_offdiag: b_last.abs() - beta.abs(),
        threshold,
        recommended_depth,
    }
}

/// The operator followed by its periodic tail, indefinitely.
///
/// `b_{M-1}` is taken from the tail (`beta_1`), matching the way the
/// terminated continued fraction hands off at depth `M`.
#[derive(Debug, Clone, Copy)]
pub struct ExtendedChain<'a> {
    pub operator: &'a TridiagonalOperator,
    pub tail: &'a TailCoefficients,
}

impl<'a> ExtendedChain<'a> {
    pub fn new(operator: &'a TridiagonalOperator, tail: &'a TailCoefficients) -> Self {
        Self { operator, tail }
    }

    pub fn a(&self, n: usize) -> f64 {
        let m = self.operator.depth();
        if n < m {
            self.operator.diag[n]
        } else {
            self.tail.diag_at(m, n)
        }
    }

    pub fn b(&self, n: usize) -> f64 {
        let m = self.operator.depth();
        if n + 1 < m {
            self.operator.offdiag[n]
        } else {
            self.tail.offdiag_at(m, n)
        }
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn spectral_bounds(&self) -> (f64, f64) {
        let end = self.operator.depth() + 2 * self.tail.period();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for n in 0..end {
            let left = if n == 0 { 0.0 } else { self.b(n - 1).abs() };
            let radius = left + self.b(n).abs();
            lo = lo.min(self.a(n) - radius);
            hi = hi.max(self.a(n) + radius);
        }
        (lo, hi)
    }
}

impl JacobiChain for ExtendedChain<'_> {
    fn diag(&self, n: usize) -> Option<f64> {
        Some(self.a(n))
    }

    fn offdiag(&self, n: usize) -> Option<f64> {
        Some(self.b(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{iterate_orbit, settle_cycle, CycleSearch, MapFamily};

    fn pipeline(lambda: f64, seed: f64, depth: usize) -> (TridiagonalOperator, LimitCycle) {
        let family = MapFamily::logistic();
        let orbit = iterate_orbit(&family, lambda, seed, 2 * depth + 1).unwrap();
        let op = build_tridiagonal(&orbit, depth).unwrap();
        let cycle = settle_cycle(&family, lambda, seed, &CycleSearch::default()).unwrap();
        (op, cycle)
    }

    #[test]
    fn constant_orbit_gives_constant_chain() {
        let orbit = Orbit {
            lambda: 2.5,
            seed: 0.6,
            values: vec![0.6; 7],
        };
        let op = build_tridiagonal(&orbit, 3).unwrap();
        assert_eq!(op.diag_entries(), &[0.6; 3]);
        assert_eq!(op.offdiag_entries(), &[0.6; 3]);
    }

    #[test]
    fn interleave_of_hand_orbit() {
        let orbit = iterate_orbit(&MapFamily::logistic(), 3.5, 0.3, 3).unwrap();
        let op = build_tridiagonal(&orbit, 2).unwrap();
        assert_eq!(op.diag_entries()[0], 0.3);
        assert!((op.diag_entries()[1] - 0.681_712_5).abs() < 1e-12);
        assert!((op.offdiag_entries()[0] - 0.735).abs() < 1e-15);
        assert!((op.offdiag_entries()[1] - 0.759_431_985_703_125).abs() < 1e-12);
    }

    #[test]
    fn depth_one_and_short_orbits() {
        let orbit = iterate_orbit(&MapFamily::logistic(), 3.1, 0.2, 1).unwrap();
        let op = build_tridiagonal(&orbit, 1).unwrap();
        assert_eq!(op.diag_entries(), &[orbit.values[0]]);
        assert_eq!(op.offdiag_entries(), &[orbit.values[1]]);
        assert!(matches!(build_tridiagonal(&orbit, 2), Err(Error::Input(_))));
        assert!(build_tridiagonal(&orbit, 0).is_err());
    }

    #[test]
    fn interleave_reproduces_orbit_prefix() {
        let orbit = iterate_orbit(&MapFamily::logistic(), 3.3, 0.27, 80).unwrap();
        let op = build_tridiagonal(&orbit, 40).unwrap();
        let merged: Vec<f64> = op
            .diag_entries()
            .iter()
            .zip(op.offdiag_entries())
            .flat_map(|(a, b)| [*a, *b])
            .collect();
        assert_eq!(merged, orbit.values[..80]);
    }

    #[test]
    fn dense_matrix_is_symmetric() {
        let (op, _) = pipeline(3.5, 0.3, 10);
        let h = op.to_dense();
        assert_eq!(h[(3, 4)], op.offdiag_entries()[3]);
        assert_eq!(h[(4, 3)], op.offdiag_entries()[3]);
        assert_eq!(h[(4, 4)], op.diag_entries()[4]);
    }

    #[test]
    fn logistic_entries_in_unit_interval() {
        let (op, _) = pipeline(3.835, 0.5, 100);
        assert!(op
            .diag_entries()
            .iter()
            .chain(op.offdiag_entries())
            .all(|v| *v > 0.0 && *v < 1.0));
    }

    #[test]
    fn fixed_point_tail() {
        let (op, cycle) = pipeline(2.5, 0.3, 100);
        let tail = extract_tail_coefficients(&op, &cycle).unwrap();
        assert_eq!(tail.period(), 1);
        assert!((tail.alpha[0] - 0.6).abs() < 1e-12);
        assert!((tail.beta[0] - 0.6).abs() < 1e-12);
        assert_eq!(tail.parity, Parity::NotApplicable);
    }

    #[test]
    fn period_two_tail_assignment_follows_seed_phase() {
        let (op, cycle) = pipeline(3.2, 0.4, 100);
        let tail = extract_tail_coefficients(&op, &cycle).unwrap();
        assert_eq!(tail.period(), 1);
        let mut pair = [tail.alpha[0], tail.beta[0]];
        pair.sort_by(f64::total_cmp);
        assert!((pair[0] - 0.51304).abs() < 1e-5);
        assert!((pair[1] - 0.79946).abs() < 1e-5);
        // the diagonal tail is the limit of the even-index orbit subsequence
        assert!((tail.alpha[0] - op.diag_entries()[99]).abs() < 1e-10);

        // one extra step of the map flips the phase
        let family = MapFamily::logistic();
        let shifted_seed = family.apply(3.2, 0.4);
        let (op2, cycle2) = pipeline(3.2, shifted_seed, 100);
        let tail2 = extract_tail_coefficients(&op2, &cycle2).unwrap();
        assert!((tail2.alpha[0] - tail.beta[0]).abs() < 1e-10);
        assert!((tail2.beta[0] - tail.alpha[0]).abs() < 1e-10);
    }

    #[test]
    fn period_four_tail_partitions_cycle() {
        let (op, cycle) = pipeline(3.5, 0.3, 100);
        let tail = extract_tail_coefficients(&op, &cycle).unwrap();
        assert_eq!(tail.period(), 2);
        let mut all: Vec<f64> = tail.alpha.iter().chain(&tail.beta).copied().collect();
        all.sort_by(f64::total_cmp);
        for (a, b) in all.iter().zip(cycle.sorted_values()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(tail.parity, Parity::Even);
        // alpha and beta each take alternate cycle elements
        let sorted = cycle.sorted_values();
        let mut alpha = tail.alpha.clone();
        alpha.sort_by(f64::total_cmp);
        assert!((alpha[0] - sorted[0]).abs() < 1e-12);
        assert!((alpha[1] - 0.50088).abs() < 1e-5);
    }

    #[test]
    fn odd_cycle_uses_full_period() {
        let (op, cycle) = pipeline(3.835, 0.5, 100);
        let tail = extract_tail_coefficients(&op, &cycle).unwrap();
        assert_eq!(tail.period(), 3);
        assert_eq!(tail.parity, Parity::NotApplicable);
    }

    #[test]
    fn tail_continues_the_orbit() {
        // the chain built from a longer orbit must continue as the tail predicts
        let family = MapFamily::logistic();
        let (op, cycle) = pipeline(3.55, 0.3, 100);
        let tail = extract_tail_coefficients(&op, &cycle).unwrap();
        let long =
            build_tridiagonal(&iterate_orbit(&family, 3.55, 0.3, 260).unwrap(), 130).unwrap();
        let chain = ExtendedChain::new(&op, &tail);
        for n in 100..130 {
            assert!((long.diag_entries()[n] - chain.a(n)).abs() < 1e-10);
            assert!((long.offdiag_entries()[n] - chain.b(n)).abs() < 1e-10);
        }
    }

    #[test]
    fn settle_failure_is_a_convergence_error() {
        let (op, cycle) = pipeline(3.0001, 0.3, 100);
        assert!(cycle.converged);
        match extract_tail_coefficients(&op, &cycle) {
            Err(Error::Convergence { depth, .. }) => assert_eq!(depth, 100),
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn diagnostics_constant_chain() {
        let op = TridiagonalOperator::from_coefficients(vec![0.6; 100], vec![0.6; 100]).unwrap();
        let tail = TailCoefficients::new(vec![0.6], vec![0.6]).unwrap();
        let report = convergence_diagnostics(&op, &tail, 1e-12);
        assert_eq!(report.deviation_diag, 0.0);
        assert_eq!(report.deviation_offdiag, 0.0);
        assert_eq!(report.recommended_depth, Some(1));
    }

    #[test]
    fn diagnostics_fast_and_slow_convergence() {
        let (op, cycle) = pipeline(3.5, 0.3, 100);
        let tail = extract_tail_coefficients(&op, &cycle).unwrap();
        let fast = convergence_diagnostics(&op, &tail, 1e-12);
        assert!(fast.deviation_diag < 1e-12 && fast.deviation_offdiag < 1e-12);
        assert!(fast.settled());
        assert!(fast.recommended_depth.unwrap() < 100);

        let (op, cycle) = pipeline(3.0001, 0.3, 100);
        let tail = TailCoefficients::from_cycle(&op, &cycle).unwrap();
        let slow = convergence_diagnostics(&op, &tail, 1e-12);
        assert!(slow.deviation_diag.max(slow.deviation_offdiag) > 1e-6);
        assert!(!slow.settled());
        assert_eq!(slow.recommended_depth, None);
    }

    #[test]
    fn exchanged_tail_is_an_involution_up_to_rotation() {
        let tail = TailCoefficients::new(vec![0.1, 0.2, 0.3], vec![0.4, 0.5, 0.6]).unwrap();
        let twice = tail.exchanged().exchanged();
        assert_eq!(twice.alpha, vec![0.3, 0.1, 0.2]);
        assert_eq!(twice.beta, vec![0.6, 0.4, 0.5]);
    }

    #[test]
    fn synthetic_tail_validation() {
        assert!(TailCoefficients::new(vec![], vec![]).is_err());
        assert!(TailCoefficients::new(vec![0.1], vec![0.2, 0.3]).is_err());
        assert!(matches!(
            TailCoefficients::new(vec![0.1, 0.2], vec![0.3, 0.0]),
            Err(Error::DegenerateChain { index: 1 })
        ));
    }
}
