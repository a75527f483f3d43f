//! Real roots of real polynomials.
//!
//! Eigenvalues of the companion matrix give the candidates; each real one is
//! polished with Newton steps. When the companion route is ambiguous (a
//! complex pair within `1e-8` of the axis) the roots are bracketed by sign
//! changes on a fine grid instead.

use nalgebra::DMatrix;

use crate::poly::Poly;

const REAL_AXIS_EPS: f64 = 1e-12;
const AMBIGUOUS_IMAG: f64 = 1e-8;
const FALLBACK_GRID: usize = 20_000;

/// Sorted real roots of `poly`, each polished by Newton iteration.
pub fn real_roots(poly: &Poly) -> Vec<f64> {
    let n = poly.degree();
    if n == 0 {
        return Vec::new();
    }
    let lead = poly.leading();
    let monic: Vec<f64> = poly.coeffs().iter().map(|c| c / lead).collect();
    if n == 1 {
        return vec![-monic[0]];
    }

    let mut companion = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        companion[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        companion[(i, n - 1)] = -monic[i];
    }
    let eigen = companion.complex_eigenvalues();

    let mut roots = Vec::with_capacity(n);
    let mut ambiguous = false;
    for ev in eigen.iter() {
        let scale = ev.re.abs().max(1.0);
        if ev.im.abs() <= REAL_AXIS_EPS * scale {
            roots.push(ev.re);
        } else if ev.im.abs() < AMBIGUOUS_IMAG * scale {
            ambiguous = true;
        }
    }
    if ambiguous {
        return bisection_roots(poly);
    }
    let derivative = poly.derivative();
    let mut polished: Vec<f64> = roots
        .into_iter()
        .map(|r| newton_polish(poly, &derivative, r))
        .collect();
    polished.sort_by(f64::total_cmp);
    polished
}

fn newton_polish(poly: &Poly, derivative: &Poly, mut x: f64) -> f64 {
    let mut fx = poly.eval(x);
    for _ in 0..8 {
        let d = derivative.eval(x);
        if d == 0.0 || fx == 0.0 {
            break;
        }
        let candidate = x - fx / d;
        let fc = poly.eval(candidate);
        if fc.abs() >= fx.abs() {
            break;
        }
        x = candidate;
        fx = fc;
    }
    x
}

/// Cauchy bound: every root satisfies `|x| <= 1 + max |c_k / c_n|`.
pub fn cauchy_bound(poly: &Poly) -> f64 {
    let lead = poly.leading().abs();
    let c = poly.coeffs();
    1.0 + c[..c.len() - 1]
        .iter()
        .map(|v| v.abs() / lead)
        .fold(0.0, f64::max)
}

/// Roots located by sign changes on a uniform grid and refined by bisection.
/// Even-multiplicity roots without a sign change are not found.
pub fn bisection_roots(poly: &Poly) -> Vec<f64> {
    let bound = cauchy_bound(poly);
    let grid: Vec<f64> = (0..=FALLBACK_GRID)
        .map(|i| -bound + 2.0 * bound * i as f64 / FALLBACK_GRID as f64)
        .collect();
    let mut roots = Vec::new();
    let mut prev = (grid[0], poly.eval(grid[0]));
    for &x in &grid[1..] {
        let fx = poly.eval(x);
        if fx == 0.0 {
            roots.push(x);
        } else if prev.1 != 0.0 && (prev.1 < 0.0) != (fx < 0.0) {
            roots.push(bisect(|t| poly.eval(t), prev.0, x));
        }
        prev = (x, fx);
    }
    roots
}

/// Bisection on a bracket with a sign change, run to machine resolution.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let f_lo_neg = f(lo) < 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) < 0.0) == f_lo_neg {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
