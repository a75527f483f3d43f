//! One-parameter real maps, their orbits and limit cycles.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed real interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

pub type MapRule = fn(f64, f64) -> f64;

/// A named family `x -> f(lambda, x)` acting on a state interval.
#[derive(Debug, Clone, Copy)]
pub struct MapFamily {
    pub identifier: &'static str,
    pub state_domain: Interval,
    pub parameter_domain: Interval,
    rule: MapRule,
}

fn logistic_rule(lambda: f64, x: f64) -> f64 {
    lambda * x * (1.0 - x)
}

fn sine_rule(lambda: f64, x: f64) -> f64 {
    lambda * (std::f64::consts::PI * x).sin()
}

const FAMILIES: &[MapFamily] = &[
    MapFamily {
        identifier: "logistic",
        state_domain: Interval::new(0.0, 1.0),
        parameter_domain: Interval::new(0.0, 4.0),
        rule: logistic_rule,
    },
    MapFamily {
        identifier: "sine",
        state_domain: Interval::new(0.0, 1.0),
        parameter_domain: Interval::new(0.0, 1.0),
        rule: sine_rule,
    },
];

impl MapFamily {
    pub const fn new(
        identifier: &'static str,
        state_domain: Interval,
        parameter_domain: Interval,
        rule: MapRule,
    ) -> Self {
        Self {
            identifier,
            state_domain,
            parameter_domain,
            rule,
        }
    }

    /// `f(x) = lambda x (1 - x)` on `[0, 1]`, `0 <= lambda <= 4`.
    pub fn logistic() -> Self {
        FAMILIES[0]
    }

    pub fn lookup(identifier: &str) -> Option<Self> {
        FAMILIES
            .iter()
            .find(|family| family.identifier == identifier)
            .copied()
    }

    pub fn registered() -> impl Iterator<Item = &'static str> {
        FAMILIES.iter().map(|family| family.identifier)
    }

    /// Applies the rule without domain checks.
    #[inline]
    pub fn apply(&self, lambda: f64, x: f64) -> f64 {
        (self.rule)(lambda, x)
    }

    /// Checks on a `samples x samples` grid that the rule maps the state
    /// domain into itself for every parameter in the parameter domain.
    pub fn is_self_map(&self, samples: usize) -> bool {
        let samples = samples.max(2);
        let step = |iv: Interval, i: usize| iv.lo + iv.width() * i as f64 / (samples - 1) as f64;
        (0..samples).all(|i| {
            let lambda = step(self.parameter_domain, i);
            (0..samples).all(|j| {
                self.state_domain
                    .contains(self.apply(lambda, step(self.state_domain, j)))
            })
        })
    }

    fn check_parameter(&self, lambda: f64) -> Result<()> {
        if !self.parameter_domain.contains(lambda) {
            return Err(Error::input(format!(
                "lambda = {lambda} outside [{}, {}] for the {} map",
                self.parameter_domain.lo, self.parameter_domain.hi, self.identifier
            )));
        }
        Ok(())
    }

    fn check_state(&self, x: f64) -> Result<()> {
        if !self.state_domain.contains(x) {
            return Err(Error::input(format!(
                "x = {x} outside [{}, {}] for the {} map",
                self.state_domain.lo, self.state_domain.hi, self.identifier
            )));
        }
        Ok(())
    }
}

pub fn evaluate_map(family: &MapFamily, lambda: f64, x: f64) -> Result<f64> {
    family.check_parameter(lambda)?;
    family.check_state(x)?;
    Ok(family.apply(lambda, x))
}

/// A finite orbit `x_0 .. x_L` with `x_{n+1} = f(lambda, x_n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Orbit {
    pub lambda: f64,
    pub seed: f64,
    pub values: Vec<f64>,
}

impl Orbit {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Iterates `steps` times from `seed`, so the orbit holds `steps + 1` values.
pub fn iterate_orbit(family: &MapFamily, lambda: f64, seed: f64, steps: usize) -> Result<Orbit> {
    if steps == 0 {
        return Err(Error::input("orbit needs at least one step"));
    }
    family.check_parameter(lambda)?;
    family.check_state(seed)?;
    let mut values = Vec::with_capacity(steps + 1);
    values.push(seed);
    let mut x = seed;
    for step in 1..=steps {
        x = family.apply(lambda, x);
        if !x.is_finite() || !family.state_domain.contains(x) {
            return Err(Error::Divergence { step, value: x });
        }
        values.push(x);
    }
    Ok(Orbit {
        lambda,
        seed,
        values,
    })
}

/// The periodic set an orbit settles into, in visiting order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitCycle {
    pub lambda: f64,
    pub period: usize,
    pub values: Vec<f64>,
    /// Largest `|x_{n+N} - x_n|` over the verification window.
    pub residual: f64,
    pub converged: bool,
    /// Burn-in the cycle was read after.
    pub burn_in: usize,
}

impl LimitCycle {
    /// Cycle values sorted ascending.
    pub fn sorted_values(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v
    }

    /// Index of the smallest cycle element.
    pub fn min_index(&self) -> usize {
        self.values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0)
    }

    /// Compare as sets: same period and sorted values agree within `tol`.
    pub fn same_set(&self, other: &LimitCycle, tol: f64) -> bool {
        self.period == other.period
            && self
                .sorted_values()
                .iter()
                .zip(other.sorted_values())
                .all(|(a, b)| (a - b).abs() <= tol)
    }
}

fn window_deviation(values: &[f64], start: usize, period: usize) -> f64 {
    (start..start + 2 * period)
        .map(|n| (values[n + period] - values[n]).abs())
        .fold(0.0, f64::max)
}

/// Finds the minimal period `N <= max_period` with
/// `max |x_{n+N} - x_n| < tolerance` over three periods after `burn_in`.
///
/// Non-convergence is reported through `converged = false`, with the
/// smallest observed deviation and its period.
pub fn detect_limit_cycle(
    orbit: &Orbit,
    burn_in: usize,
    max_period: usize,
    tolerance: f64,
) -> Result<LimitCycle> {
    if max_period == 0 {
        return Err(Error::input("max_period must be positive"));
    }
    if orbit.len() < burn_in + 3 * max_period {
        return Err(Error::input(format!(
            "orbit of length {} too short for burn-in {burn_in} and max period {max_period}",
            orbit.len()
        )));
    }
    let xs = &orbit.values;
    let mut best = (f64::INFINITY, 1);
    for period in 1..=max_period {
        let deviation = window_deviation(xs, burn_in, period);
        if deviation < tolerance {
            return Ok(LimitCycle {
                lambda: orbit.lambda,
                period,
                values: cycle_average(xs, burn_in, period),
                residual: deviation,
                converged: true,
                burn_in,
            });
        }
        if deviation < best.0 {
            best = (deviation, period);
        }
    }
    let (residual, period) = best;
    Ok(LimitCycle {
        lambda: orbit.lambda,
        period,
        values: cycle_average(xs, burn_in, period),
        residual,
        converged: false,
        burn_in,
    })
}

fn cycle_average(xs: &[f64], start: usize, period: usize) -> Vec<f64> {
    (0..period)
        .map(|k| (0..3).map(|j| xs[start + k + j * period]).sum::<f64>() / 3.0)
        .collect()
}

/// Settings for cycle searches with escalating burn-in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleSearch {
    pub burn_in: usize,
    pub max_burn_in: usize,
    pub max_period: usize,
    pub tolerance: f64,
}

impl Default for CycleSearch {
    fn default() -> Self {
        Self {
            burn_in: 10_000,
            max_burn_in: 1_000_000,
            max_period: 64,
            tolerance: 1e-9,
        }
    }
}

/// Detects the cycle at `lambda` from `seed`, escalating the burn-in by ten
/// until two consecutive levels agree on a converged period.
///
/// Near a flip bifurcation the transient decays so slowly that the window
/// test for `2N` passes before the one for `N`; one confirmation level
/// removes those false doublings.
pub fn settle_cycle(
    family: &MapFamily,
    lambda: f64,
    seed: f64,
    search: &CycleSearch,
) -> Result<LimitCycle> {
    family.check_parameter(lambda)?;
    family.check_state(seed)?;
    let window = 3 * search.max_period;
    let mut x = seed;
    let mut reached = 0usize;
    let mut burn_in = search.burn_in.max(1);
    let mut previous: Option<LimitCycle> = None;
    loop {
        while reached < burn_in {
            x = family.apply(lambda, x);
            reached += 1;
            if !x.is_finite() || !family.state_domain.contains(x) {
                return Err(Error::Divergence {
                    step: reached,
                    value: x,
                });
            }
        }
        let tail = iterate_orbit(family, lambda, x, window)?;
        let mut cycle = detect_limit_cycle(&tail, 0, search.max_period, search.tolerance)?;
        cycle.burn_in = burn_in;
        if let Some(prev) = &previous {
            if cycle.converged && prev.converged && prev.period == cycle.period {
                return Ok(cycle);
            }
        }
        if burn_in >= search.max_burn_in {
            return Ok(cycle);
        }
        previous = Some(cycle);
        burn_in = (burn_in * 10).min(search.max_burn_in);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationDiagram {
    pub samples: Vec<(f64, LimitCycle)>,
    /// Midpoints of adjacent converged grid points with periods `(N, 2N)`.
    pub detected_doublings: Vec<f64>,
}

impl BifurcationDiagram {
    pub fn non_converged_fraction(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        let bad = self.samples.iter().filter(|(_, c)| !c.converged).count();
        bad as f64 / self.samples.len() as f64
    }
}

pub fn scan_bifurcation(
    family: &MapFamily,
    lambda_grid: &[f64],
    seed: f64,
    search: &CycleSearch,
) -> Result<BifurcationDiagram> {
    if lambda_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::input("lambda grid must be strictly ascending"));
    }
    if let Some(bad) = lambda_grid
        .iter()
        .find(|l| !family.parameter_domain.contains(**l))
    {
        return Err(Error::input(format!(
            "lambda = {bad} outside the parameter domain"
        )));
    }
    family.check_state(seed)?;
    let samples = lambda_grid
        .par_iter()
        .map(|&lambda| settle_cycle(family, lambda, seed, search).map(|c| (lambda, c)))
        .collect::<Result<Vec<_>>>()?;

    let converged: Vec<&(f64, LimitCycle)> = samples.iter().filter(|(_, c)| c.converged).collect();
    let detected_doublings = converged
        .windows(2)
        .filter(|w| w[1].1.period == 2 * w[0].1.period)
        .map(|w| 0.5 * (w[0].0 + w[1].0))
        .collect();
    Ok(BifurcationDiagram {
        samples,
        detected_doublings,
    })
}

/// `n` equally spaced points from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn logistic() -> MapFamily {
        MapFamily::logistic()
    }

    #[test]
    fn logistic_boundary_zeros() {
        for lambda in [0.0, 1.3, 3.5, 4.0] {
            assert_eq!(evaluate_map(&logistic(), lambda, 0.0).unwrap(), 0.0);
            assert_eq!(evaluate_map(&logistic(), lambda, 1.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn logistic_hand_value() {
        let v = evaluate_map(&logistic(), 3.5, 0.3).unwrap();
        assert!((v - 0.735).abs() < 1e-15);
    }

    #[test]
    fn domain_violations_are_input_errors() {
        assert!(matches!(
            evaluate_map(&logistic(), 3.5, 1.2),
            Err(Error::Input(_))
        ));
        assert!(matches!(
            evaluate_map(&logistic(), 4.5, 0.2),
            Err(Error::Input(_))
        ));
        assert!(iterate_orbit(&logistic(), 3.0, 0.3, 0).is_err());
    }

    #[test]
    fn registry_round_trip() {
        for id in MapFamily::registered() {
            let family = MapFamily::lookup(id).unwrap();
            assert_eq!(family.identifier, id);
            assert!(family.is_self_map(41), "{id} is not a self-map");
        }
        assert!(MapFamily::lookup("tent-ish").is_none());
    }

    #[test]
    fn fixed_point_orbit_is_constant() {
        let orbit = iterate_orbit(&logistic(), 2.5, 0.6, 5).unwrap();
        assert_eq!(orbit.len(), 6);
        for v in &orbit.values {
            assert!((v - 0.6).abs() < 1e-15);
        }
    }

    #[test]
    fn hand_iteration() {
        let orbit = iterate_orbit(&logistic(), 3.5, 0.3, 3).unwrap();
        let expected = [0.3, 0.735, 0.681_712_5, 0.759_431_985_703_125];
        for (v, e) in orbit.values.iter().zip(expected) {
            assert!((v - e).abs() < 1e-12, "{v} vs {e}");
        }
    }

    #[test]
    fn zero_parameter_collapses() {
        let orbit = iterate_orbit(&logistic(), 0.0, 0.4, 2).unwrap();
        assert_eq!(orbit.values, vec![0.4, 0.0, 0.0]);
    }

    #[test]
    fn short_orbit_rejected() {
        let orbit = iterate_orbit(&logistic(), 3.2, 0.4, 10).unwrap();
        assert!(detect_limit_cycle(&orbit, 5, 4, 1e-9).is_err());
    }

    #[test]
    fn fixed_point_cycle() {
        let cycle = settle_cycle(&logistic(), 2.5, 0.3, &CycleSearch::default()).unwrap();
        assert!(cycle.converged);
        assert_eq!(cycle.period, 1);
        assert!((cycle.values[0] - 0.6).abs() < 1e-9);
    }

    #[test]
    fn period_two_matches_quadratic_factor() {
        let lambda: f64 = 3.2;
        let disc = ((lambda - 3.0) * (lambda + 1.0)).sqrt();
        let lo = (lambda + 1.0 - disc) / (2.0 * lambda);
        let hi = (lambda + 1.0 + disc) / (2.0 * lambda);
        let cycle = settle_cycle(&logistic(), lambda, 0.4, &CycleSearch::default()).unwrap();
        assert_eq!(cycle.period, 2);
        let sorted = cycle.sorted_values();
        assert!((sorted[0] - lo).abs() < 1e-9);
        assert!((sorted[1] - hi).abs() < 1e-9);
        assert!((lo - 0.51304).abs() < 1e-5 && (hi - 0.79946).abs() < 1e-5);
    }

    #[test]
    fn period_four_at_three_point_five() {
        let cycle = settle_cycle(&logistic(), 3.5, 0.3, &CycleSearch::default()).unwrap();
        assert_eq!(cycle.period, 4);
        let expected = [0.38282, 0.50088, 0.82694, 0.87500];
        for (v, e) in cycle.sorted_values().iter().zip(expected) {
            assert!((v - e).abs() < 1e-5, "{v} vs {e}");
        }
    }

    #[test]
    fn period_three_window() {
        let cycle = settle_cycle(&logistic(), 3.835, 0.5, &CycleSearch::default()).unwrap();
        assert!(cycle.converged);
        assert_eq!(cycle.period, 3);
    }

    #[test]
    fn cycle_closes_under_the_map() {
        let family = logistic();
        let cycle = settle_cycle(&family, 3.55, 0.3, &CycleSearch::default()).unwrap();
        assert_eq!(cycle.period, 8);
        let n = cycle.period;
        for k in 0..n {
            let next = family.apply(3.55, cycle.values[k]);
            assert!((next - cycle.values[(k + 1) % n]).abs() < 1e-9);
        }
    }

    #[test]
    fn minimality_with_smaller_max_period() {
        let orbit = iterate_orbit(&logistic(), 3.5, 0.3, 20_000).unwrap();
        let full = detect_limit_cycle(&orbit, 10_000, 64, 1e-9).unwrap();
        assert_eq!(full.period, 4);
        let capped = detect_limit_cycle(&orbit, 10_000, 3, 1e-9).unwrap();
        assert!(!capped.converged);
        assert!(capped.residual > 1e-3);
    }

    #[test]
    fn chaotic_parameter_does_not_converge() {
        let cycle = settle_cycle(
            &logistic(),
            3.9,
            0.3,
            &CycleSearch {
                max_burn_in: 100_000,
                ..CycleSearch::default()
            },
        )
        .unwrap();
        assert!(!cycle.converged);
    }

    #[test]
    fn scan_below_first_branch_point() {
        let grid = linear_grid(1.0, 2.9, 96);
        let diagram = scan_bifurcation(&logistic(), &grid, 0.3, &CycleSearch::default()).unwrap();
        assert!(diagram.detected_doublings.is_empty());
        for (lambda, cycle) in &diagram.samples {
            assert!(cycle.converged);
            assert_eq!(cycle.period, 1);
            // lambda = 1 is a transcritical point where convergence is algebraic
            if *lambda > 1.05 {
                assert!((cycle.values[0] - (1.0 - 1.0 / lambda)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn scan_rejects_unsorted_grid() {
        assert!(scan_bifurcation(&logistic(), &[3.0, 2.9], 0.3, &CycleSearch::default()).is_err());
    }

    #[test]
    fn sine_map_doubles_too() {
        let family = MapFamily::lookup("sine").unwrap();
        let low = settle_cycle(&family, 0.6, 0.3, &CycleSearch::default()).unwrap();
        let high = settle_cycle(&family, 0.8, 0.3, &CycleSearch::default()).unwrap();
        assert_eq!(low.period, 1);
        assert_eq!(high.period, 2);
    }
}
