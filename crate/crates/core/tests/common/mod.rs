#![allow(dead_code)]

use bandmap_core::{Setup, TailCoefficients, DEFAULT_DEPTH};
use nalgebra::DMatrix;

pub fn setup(lambda: f64, seed: f64) -> Setup {
    Setup::logistic(lambda, seed, DEFAULT_DEPTH)
        .unwrap_or_else(|e| panic!("pipeline failed at lambda={lambda}, seed={seed}: {e}"))
}

/// Band edges of a periodic chain from Bloch theory: eigenvalues of the
/// one-period matrix with periodic and antiperiodic closure.
pub fn floquet_edges(tail: &TailCoefficients) -> Vec<f64> {
    let p = tail.period();
    let mut edges = Vec::with_capacity(2 * p);
    for sign in [1.0, -1.0] {
        let mut h = DMatrix::<f64>::zeros(p, p);
        for i in 0..p {
            h[(i, i)] += tail.alpha[i];
            if i + 1 < p {
                h[(i, i + 1)] += tail.beta[i + 1];
                h[(i + 1, i)] += tail.beta[i + 1];
            }
        }
        h[(p - 1, 0)] += sign * tail.beta[0];
        h[(0, p - 1)] += sign * tail.beta[0];
        edges.extend(h.symmetric_eigenvalues().iter().copied());
    }
    edges.sort_by(f64::total_cmp);
    edges
}

pub fn report(label: &str, pass: bool, detail: impl std::fmt::Display) {
    println!("[{}] {label}: {detail}", if pass { "PASS" } else { "FAIL" });
}
