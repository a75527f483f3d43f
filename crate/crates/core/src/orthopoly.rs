//! Polynomials of the three-term recursion
//! `y d_n = a_n d_n + b_{n-1} d_{n-1} + b_n d_{n+1}`.
//!
//! First kind: `P_0 = 1`, `P_1 = (y - a_0) / b_0`.
//! Second kind: `Q_0 = 0`, `Q_1 = 1 / b_0`.
//! Both continue with `P_{n+1} = ((y - a_n) P_n - b_{n-1} P_{n-1}) / b_n`.

use std::ops::{Add, Div, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{JacobiChain, TailCoefficients, TridiagonalOperator};
use crate::poly::Poly;
use crate::quadrature::BandQuadrature;
use crate::spectra::ResolventModel;

/// Scalars the recursion can run over (`f64` on the real line, `Complex64`
/// off it).
pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self>
{
    fn real(v: f64) -> Self;
    fn magnitude(self) -> f64;
}

impl Scalar for f64 {
    fn real(v: f64) -> Self {
        v
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn real(v: f64) -> Self {
        Complex64::new(v, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    First,
    Second,
}

impl Kind {
    fn start<T: Scalar>(self, b0: f64) -> (T, T) {
        match self {
            Kind::First => (T::real(1.0), T::real(0.0)),
            Kind::Second => (T::real(0.0), T::real(1.0 / b0)),
        }
    }
}

fn coefficient<C: JacobiChain + ?Sized>(chain: &C, n: usize) -> Result<(f64, f64)> {
    match (chain.diag(n), chain.offdiag(n)) {
        (Some(a), Some(b)) if b != 0.0 => Ok((a, b)),
        (Some(_), Some(_)) => Err(Error::DegenerateChain { index: n }),
        _ => Err(Error::input(format!(
            "recursion needs a_{n}, b_{n} beyond the chain depth"
        ))),
    }
}

/// Values `K_0(y) .. K_{n_max}(y)` of either kind by forward recurrence.
pub fn evaluate<C: JacobiChain + ?Sized, T: Scalar>(
    chain: &C,
    kind: Kind,
    y: T,
    n_max: usize,
) -> Result<Vec<T>> {
    let mut out = Vec::with_capacity(n_max + 1);
    let (_, b0) = coefficient(chain, 0)?;
    let (v0, v1_second) = kind.start::<T>(b0);
    out.push(v0);
    if n_max == 0 {
        return Ok(out);
    }
    let (a0, _) = coefficient(chain, 0)?;
    let v1 = match kind {
        Kind::First => (y - T::real(a0)) / T::real(b0),
        Kind::Second => v1_second,
    };
    out.push(v1);
    for n in 1..n_max {
        let (a, b) = coefficient(chain, n)?;
        let b_prev = chain.offdiag(n - 1).unwrap_or(0.0);
        let next = ((y - T::real(a)) * out[n] - T::real(b_prev) * out[n - 1]) / T::real(b);
        out.push(next);
    }
    Ok(out)
}

pub fn evaluate_first_kind<C: JacobiChain + ?Sized, T: Scalar>(
    chain: &C,
    y: T,
    n_max: usize,
) -> Result<Vec<T>> {
    evaluate(chain, Kind::First, y, n_max)
}

pub fn evaluate_second_kind<C: JacobiChain + ?Sized, T: Scalar>(
    chain: &C,
    y: T,
    n_max: usize,
) -> Result<Vec<T>> {
    evaluate(chain, Kind::Second, y, n_max)
}

/// Coefficient lists of `K_0 .. K_{n_max}`. Coefficients grow quickly, so
/// this is capped at degree 12.
pub fn coefficients<C: JacobiChain + ?Sized>(
    chain: &C,
    kind: Kind,
    n_max: usize,
) -> Result<Vec<Poly>> {
    if n_max > 12 {
        return Err(Error::input("coefficient lists are limited to degree 12"));
    }
    let (a0, b0) = coefficient(chain, 0)?;
    let mut out = match kind {
        Kind::First => vec![Poly::constant(1.0)],
        Kind::Second => vec![Poly::constant(0.0)],
    };
    if n_max == 0 {
        return Ok(out);
    }
    out.push(match kind {
        Kind::First => Poly::shifted_identity(a0).scale(1.0 / b0),
        Kind::Second => Poly::constant(1.0 / b0),
    });
    for n in 1..n_max {
        let (a, b) = coefficient(chain, n)?;
        let b_prev = chain.offdiag(n - 1).unwrap_or(0.0);
        let next = &(&Poly::shifted_identity(a) * &out[n]) - &out[n - 1].scale(b_prev);
        out.push(next.scale(1.0 / b));
    }
    Ok(out)
}

/// View of one kind of polynomial over a chain.
#[derive(Debug, Clone, Copy)]
pub struct PolynomialSequence<'a, C: JacobiChain + ?Sized> {
    pub kind: Kind,
    pub max_degree: usize,
    pub chain: &'a C,
}

impl<'a, C: JacobiChain + ?Sized> PolynomialSequence<'a, C> {
    pub fn new(chain: &'a C, kind: Kind, max_degree: usize) -> Self {
        Self {
            kind,
            max_degree,
            chain,
        }
    }

    pub fn evaluate<T: Scalar>(&self, y: T) -> Result<Vec<T>> {
        evaluate(self.chain, self.kind, y, self.max_degree)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramMatrix {
    pub order: usize,
    pub entries: Vec<Vec<f64>>,
    pub nodes_per_band: usize,
    pub scheme: String,
    pub atoms: usize,
    /// `max |G - I|`
    pub max_deviation: f64,
    pub max_offdiag: f64,
}

/// `G_{nm} = int P_n P_m d(mu)` for `n, m <= n_max`, over the band density
/// and the point masses of the spectral measure.
pub fn gram_matrix(
    operator: &TridiagonalOperator,
    tail: &TailCoefficients,
    n_max: usize,
    quad: &BandQuadrature,
) -> Result<GramMatrix> {
    let model = ResolventModel::new(operator, tail);
    let measure = model.spectral_measure()?;
    let nodes = model.discretize(&measure, quad);
    let order = n_max + 1;
    let mut gram = DMatrix::<f64>::zeros(order, order);
    for (y, mass) in nodes {
        if mass == 0.0 {
            continue;
        }
        let p = evaluate_first_kind(operator, y, n_max)?;
        for i in 0..order {
            for j in 0..=i {
                gram[(i, j)] += mass * p[i] * p[j];
            }
        }
    }
    for i in 0..order {
        for j in 0..i {
            gram[(j, i)] = gram[(i, j)];
        }
    }
    let deviation = &gram - DMatrix::<f64>::identity(order, order);
    let max_deviation = deviation.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let max_offdiag = (0..order)
        .flat_map(|i| (0..order).filter(move |&j| j != i).map(move |j| (i, j)))
        .fold(0.0f64, |m, (i, j)| m.max(gram[(i, j)].abs()));
    Ok(GramMatrix {
        order,
        entries: (0..order)
            .map(|i| (0..order).map(|j| gram[(i, j)]).collect())
            .collect(),
        nodes_per_band: quad.nodes_per_band,
        scheme: quad.scheme().to_string(),
        atoms: measure.atoms.len(),
        max_deviation,
        max_offdiag,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioReport {
    /// `-Q_{n/2} / P_{n/2}`
    pub half: Complex64,
    /// `-Q_n / P_n`
    pub full: Complex64,
}

const RESCALE_ABOVE: f64 = 1e100;

/// `-Q_n(z) / P_n(z)`, which tends to the resolvent as `n` grows.
///
/// Both recursions are run together and rescaled by a common factor
/// whenever `|P_n|` gets large, so the ratio survives degrees where the
/// polynomials themselves overflow.
pub fn resolvent_ratio<C: JacobiChain + ?Sized>(
    chain: &C,
    z: Complex64,
    n: usize,
) -> Result<RatioReport> {
    if n == 0 {
        return Err(Error::input("ratio needs n >= 1"));
    }
    let (a0, b0) = coefficient(chain, 0)?;
    let mut p = (Complex64::new(1.0, 0.0), (z - a0) / b0);
    let mut q = (Complex64::new(0.0, 0.0), Complex64::new(1.0 / b0, 0.0));
    let ratio = |p: Complex64, q: Complex64, degree: usize| {
        if p.norm() == 0.0 {
            Err(Error::Pole {
                degree,
                re: z.re,
                im: z.im,
            })
        } else {
            Ok(-q / p)
        }
    };
    let half_at = (n / 2).max(1);
    let mut half = ratio(p.1, q.1, 1);
    for k in 1..n {
        let (a, b) = coefficient(chain, k)?;
        let b_prev = chain.offdiag(k - 1).unwrap_or(0.0);
        let next_p = ((z - a) * p.1 - b_prev * p.0) / b;
        let next_q = ((z - a) * q.1 - b_prev * q.0) / b;
        p = (p.1, next_p);
        q = (q.1, next_q);
        let size = p.1.norm().max(p.0.norm());
        if size > RESCALE_ABOVE {
            let s = 1.0 / size;
            p = (p.0 * s, p.1 * s);
            q = (q.0 * s, q.1 * s);
        }
        if k + 1 == half_at {
            half = ratio(p.1, q.1, k + 1);
        }
    }
    Ok(RatioReport {
        half: half?,
        full: ratio(p.1, q.1, n)?,
    })
}

/// One term of the Casorati sequence `b_n (P_{n+1} Q_n - P_n Q_{n+1})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WronskianTerm {
    pub value: f64,
    /// `b_n (|P_{n+1} Q_n| + |P_n Q_{n+1}|)`, the size of the two products
    /// whose difference is `value`. Rounding in `value` scales with this.
    pub magnitude: f64,
}

impl WronskianTerm {
    /// Deviation from `-1` relative to the larger of 1 and `magnitude`.
    pub fn relative_deviation(&self) -> f64 {
        (self.value + 1.0).abs() / self.magnitude.max(1.0)
    }
}

/// Casorati terms for `n = 0 .. n_max - 1`; `value` is `-1` for an exact
/// recursion.
pub fn wronskian<C: JacobiChain + ?Sized>(
    chain: &C,
    y: f64,
    n_max: usize,
) -> Result<Vec<WronskianTerm>> {
    let p: Vec<f64> = evaluate_first_kind(chain, y, n_max)?;
    let q: Vec<f64> = evaluate_second_kind(chain, y, n_max)?;
    (0..n_max)
        .map(|n| {
            let (_, b) = coefficient(chain, n)?;
            let (u, v) = (p[n + 1] * q[n], p[n] * q[n + 1]);
            Ok(WronskianTerm {
                value: b * (u - v),
                magnitude: b * (u.abs() + v.abs()),
            })
        })
        .collect()
}
