//! Resolvent, density of states and band structure of a chain with a
//! periodic tail.
//!
//! One period of the tail acts on the terminator as the linear-fractional map
//! `w -> (A w + B) / (C w + D)`, the product of the elementary steps
//! `w -> beta_i^2 / (z - alpha_i - w)`. Its fixed point `T(z)` solves
//! `C T^2 + (D - A) T - B = 0`; the discriminant `(A - D)^2 + 4 B C` is a
//! real polynomial of degree `2p` whose simple real roots are the band edges.
//! Inside a band it is negative and `T` is complex, elsewhere `T` is real.
//!
//! The root kept is the attracting fixed point of the period map. For
//! `Im z > 0` it has `Im T < 0` and decays like `beta_1^2 / z`, so the
//! resolvent `G = -1 / (z - a_0 - ... - T)` has `Im G > 0` and the density
//! `Im G / pi` is non-negative.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{ExtendedChain, TailCoefficients, TridiagonalOperator};
use crate::poly::Poly;
use crate::quadrature::BandQuadrature;
use crate::roots::{bisect, real_roots};

/// Imaginary offset used when a real argument lands on a pole of the
/// truncated fraction.
pub const REAL_AXIS_NUDGE: f64 = 1e-12;

const ROOT_TIE: f64 = 1e-9;
const ATOM_SCAN_POINTS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoebiusCoefficients {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl MoebiusCoefficients {
    pub fn determinant(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, w: Complex64) -> Complex64 {
        (self.a * w + self.b) / (self.c * w + self.d)
    }

    fn then(&self, other: &MoebiusCoefficients) -> MoebiusCoefficients {
        MoebiusCoefficients {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }
}

/// Composition of the elementary steps for `i = 1..p`, `i = 1` outermost.
pub fn compose_period(tail: &TailCoefficients, z: Complex64) -> MoebiusCoefficients {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let identity = MoebiusCoefficients {
        a: one,
        b: zero,
        c: zero,
        d: one,
    };
    tail.alpha
        .iter()
        .zip(&tail.beta)
        .fold(identity, |acc, (&alpha, &beta)| {
            acc.then(&MoebiusCoefficients {
                a: zero,
                b: Complex64::new(beta * beta, 0.0),
                c: -one,
                d: z - alpha,
            })
        })
}

/// The entries of [`compose_period`] as real polynomials in `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodPolynomials {
    pub a: Poly,
    pub b: Poly,
    pub c: Poly,
    pub d: Poly,
}

impl PeriodPolynomials {
    pub fn new(tail: &TailCoefficients) -> Self {
        let mut acc = PeriodPolynomials {
            a: Poly::constant(1.0),
            b: Poly::constant(0.0),
            c: Poly::constant(0.0),
            d: Poly::constant(1.0),
        };
        for (&alpha, &beta) in tail.alpha.iter().zip(&tail.beta) {
            let b_step = Poly::constant(beta * beta);
            let d_step = Poly::shifted_identity(alpha);
            // [[A, B], [C, D]] * [[0, beta^2], [-1, y - alpha]]
            acc = PeriodPolynomials {
                a: -&acc.b,
                b: &(&acc.a * &b_step) + &(&acc.b * &d_step),
                c: -&acc.d,
                d: &(&acc.c * &b_step) + &(&acc.d * &d_step),
            };
        }
        acc
    }

    pub fn discriminant(&self) -> Poly {
        let diff = &self.a - &self.d;
        &(&diff * &diff) + &(&self.b * &self.c).scale(4.0)
    }
}

/// `(A - D)^2 + 4 B C` as a polynomial of degree `2p`.
pub fn discriminant_polynomial(tail: &TailCoefficients) -> Poly {
    PeriodPolynomials::new(tail).discriminant()
}

/// Which fixed point of the period map to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// Attracting root; `Im T <= 0` for `Im z > 0`.
    Decaying,
    /// The other root. Only useful for checking that the positivity checks
    /// catch a wrong branch.
    Growing,
}

pub fn solve_terminator(tail: &TailCoefficients, z: Complex64) -> Result<Complex64> {
    terminator_on_branch(tail, z, Branch::Decaying)
}

pub fn terminator_on_branch(
    tail: &TailCoefficients,
    z: Complex64,
    branch: Branch,
) -> Result<Complex64> {
    let m = compose_period(tail, z);
    let branch_error = || Error::NumericalBranch { re: z.re, im: z.im };
    let scale = m.a.norm() + m.d.norm();
    let qb = m.d - m.a;
    if m.c.norm() <= 1e-14 * scale {
        if qb.norm() == 0.0 {
            return Err(branch_error());
        }
        return Ok(m.b / qb);
    }
    let disc = qb * qb + 4.0 * m.b * m.c;
    let mut s = disc.sqrt();
    if (qb.conj() * s).re < 0.0 {
        s = -s;
    }
    let q = -0.5 * (qb + s);
    let r1 = q / m.c;
    let r2 = if q.norm() > 0.0 {
        -m.b / q
    } else {
        -qb / m.c - r1
    };

    let k1 = (m.c * r1 + m.d).norm();
    let k2 = (m.c * r2 + m.d).norm();
    let (attracting, repelling) = if (k1 - k2).abs() <= ROOT_TIE * (k1 + k2) {
        if r1.im <= r2.im {
            (r1, r2)
        } else {
            (r2, r1)
        }
    } else if k1 > k2 {
        (r1, r2)
    } else {
        (r2, r1)
    };
    let chosen = match branch {
        Branch::Decaying => attracting,
        Branch::Growing => repelling,
    };
    if !chosen.re.is_finite() || !chosen.im.is_finite() {
        return Err(branch_error());
    }
    if branch == Branch::Decaying && z.im > 0.0 && chosen.im > 1e-12 * chosen.norm().max(1.0) {
        return Err(branch_error());
    }
    Ok(chosen)
}

/// Band edges `y_1 < ... < y_{2p}`; bands are `[y_{2i-1}, y_{2i}]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandStructure {
    pub edges: Vec<f64>,
}

impl BandStructure {
    pub fn bands(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.edges.chunks_exact(2).map(|e| (e[0], e[1]))
    }

    pub fn gaps(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.edges[1..].chunks_exact(2).map(|e| (e[0], e[1]))
    }

    pub fn band_count(&self) -> usize {
        self.edges.len() / 2
    }

    pub fn lower(&self) -> f64 {
        self.edges[0]
    }

    pub fn upper(&self) -> f64 {
        *self.edges.last().unwrap()
    }

    pub fn width(&self) -> f64 {
        self.upper() - self.lower()
    }

    /// Inside the closure of some band.
    pub fn in_band(&self, y: f64) -> bool {
        self.bands().any(|(lo, hi)| y >= lo && y <= hi)
    }
}

pub fn band_edges(tail: &TailCoefficients) -> Result<BandStructure> {
    let disc = discriminant_polynomial(tail);
    let expected = 2 * tail.period();
    let edges = real_roots(&disc);
    if edges.len() != expected {
        return Err(Error::SpectralDegeneracy(format!(
            "discriminant has {} real roots, expected {expected}",
            edges.len()
        )));
    }
    let span = (edges[expected - 1] - edges[0]).abs().max(1.0);
    if edges.windows(2).any(|w| w[1] - w[0] <= 1e-10 * span) {
        return Err(Error::SpectralDegeneracy(
            "discriminant has a repeated root".into(),
        ));
    }
    for (i, w) in edges.windows(2).enumerate() {
        let mid = disc.eval(0.5 * (w[0] + w[1]));
        let inside_band = i % 2 == 0;
        if (mid < 0.0) != inside_band {
            return Err(Error::SpectralDegeneracy(format!(
                "discriminant sign pattern broken between edges {} and {}",
                i + 1,
                i + 2
            )));
        }
    }
    Ok(BandStructure { edges })
}

/// An isolated eigenvalue of the half-infinite chain and its spectral weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointMass {
    pub position: f64,
    pub weight: f64,
}

/// The `(0,0)` spectral measure: band density plus point masses off the bands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralMeasure {
    pub bands: BandStructure,
    pub atoms: Vec<PointMass>,
}

impl SpectralMeasure {
    pub fn atom_mass(&self) -> f64 {
        self.atoms.iter().fold(0.0, |m, a| m + a.weight)
    }
}

/// Operator, tail and the period polynomials, precomputed for repeated
/// evaluation.
#[derive(Debug, Clone)]
pub struct ResolventModel<'a> {
    pub operator: &'a TridiagonalOperator,
    pub tail: &'a TailCoefficients,
    polys: PeriodPolynomials,
    discriminant: Poly,
    branch: Branch,
}

impl<'a> ResolventModel<'a> {
    pub fn new(operator: &'a TridiagonalOperator, tail: &'a TailCoefficients) -> Self {
        let polys = PeriodPolynomials::new(tail);
        let discriminant = polys.discriminant();
        Self {
            operator,
            tail,
            polys,
            discriminant,
            branch: Branch::Decaying,
        }
    }

    /// Same model on another terminator branch.
    pub fn with_branch(mut self, branch: Branch) -> Self {
        self.branch = branch;
        self
    }

    pub fn discriminant(&self) -> &Poly {
        &self.discriminant
    }

    pub fn terminator(&self, z: Complex64) -> Result<Complex64> {
        terminator_on_branch(self.tail, z, self.branch)
    }

    fn fraction(&self, z: Complex64, t: Complex64) -> Option<Complex64> {
        let a = self.operator.diag_entries();
        let b = self.operator.offdiag_entries();
        let m = a.len();
        let mut g = z - a[m - 1] - t;
        for n in (0..m - 1).rev() {
            if g.norm() == 0.0 {
                return None;
            }
            g = z - a[n] - b[n] * b[n] / g;
        }
        (g.norm() != 0.0).then(|| -1.0 / g)
    }

    /// `G(z)` from the depth-`M` fraction closed by the terminator.
    pub fn resolvent(&self, z: Complex64) -> Result<Complex64> {
        let t = self.terminator(z)?;
        if let Some(g) = self.fraction(z, t) {
            return Ok(g);
        }
        let nudged = z + Complex64::new(0.0, REAL_AXIS_NUDGE);
        let t = self.terminator(nudged)?;
        self.fraction(nudged, t)
            .ok_or(Error::NumericalBranch { re: z.re, im: z.im })
    }

    /// `Im G(y + i0) / pi`; exactly zero wherever the discriminant is
    /// non-negative.
    pub fn density(&self, y: f64) -> f64 {
        if self.discriminant.eval(y) >= 0.0 {
            return 0.0;
        }
        match self.resolvent(Complex64::new(y, 0.0)) {
            Ok(g) => g.im / std::f64::consts::PI,
            Err(_) => 0.0,
        }
    }

    pub fn band_edges(&self) -> Result<BandStructure> {
        band_edges(self.tail)
    }

    /// Real terminator and its derivative at a real `y` off the bands.
    fn real_terminator(&self, y: f64) -> Option<(f64, f64)> {
        let t = self.terminator(Complex64::new(y, 0.0)).ok()?.re;
        let p = &self.polys;
        let (a, c, d) = (p.a.eval(y), p.c.eval(y), p.d.eval(y));
        let (da, db, dc, dd) = (
            p.a.derivative().eval(y),
            p.b.derivative().eval(y),
            p.c.derivative().eval(y),
            p.d.derivative().eval(y),
        );
        let denom = 2.0 * c * t + d - a;
        let dt = if denom != 0.0 {
            -(dc * t * t + (dd - da) * t - db) / denom
        } else {
            0.0
        };
        Some((t, dt))
    }

    /// First pivot `g_0` of the backward recurrence at real `y` and its
    /// `y`-derivative; `G = -1 / g_0`.
    fn leading_pivot(&self, y: f64) -> Option<(f64, f64)> {
        let (t, dt) = self.real_terminator(y)?;
        let a = self.operator.diag_entries();
        let b = self.operator.offdiag_entries();
        let m = a.len();
        let mut g = y - a[m - 1] - t;
        let mut dg = 1.0 - dt;
        for n in (0..m - 1).rev() {
            let b2 = b[n] * b[n];
            let next = y - a[n] - b2 / g;
            dg = 1.0 + b2 * dg / (g * g);
            g = next;
        }
        Some((g, dg))
    }

    /// Poles of `G` on the real axis outside the bands.
    ///
    /// `g_0` increases between its own poles, so every sign change from
    /// negative to positive on a scan grid brackets a simple zero of `g_0`,
    /// i.e. a pole of `G`, with residue weight `1 / g_0'`.
    pub fn point_masses(&self, bands: &BandStructure) -> Vec<PointMass> {
        let (lo_bound, hi_bound) = ExtendedChain::new(self.operator, self.tail).spectral_bounds();
        let pad = 1e-3 * bands.width().max(1.0);
        let mut regions = Vec::new();
        if lo_bound - pad < bands.lower() {
            regions.push((lo_bound - pad, bands.lower()));
        }
        regions.extend(bands.gaps());
        if hi_bound + pad > bands.upper() {
            regions.push((bands.upper(), hi_bound + pad));
        }

        let mut atoms = Vec::new();
        for (lo, hi) in regions {
            let inset = 1e-10 * (hi - lo);
            let (lo, hi) = (lo + inset, hi - inset);
            let mut prev: Option<(f64, f64)> = None;
            for i in 0..=ATOM_SCAN_POINTS {
                let y = lo + (hi - lo) * i as f64 / ATOM_SCAN_POINTS as f64;
                let Some((g, _)) = self.leading_pivot(y) else {
                    prev = None;
                    continue;
                };
                if let Some((y_prev, g_prev)) = prev {
                    if g_prev < 0.0 && g >= 0.0 {
                        if let Some(atom) = self.refine_atom(y_prev, y) {
                            atoms.push(atom);
                        }
                    }
                }
                prev = Some((y, g));
            }
        }
        atoms
    }

    fn refine_atom(&self, lo: f64, hi: f64) -> Option<PointMass> {
        let sign = |y: f64| self.leading_pivot(y).map(|(g, _)| g).unwrap_or(f64::NAN);
        let position = bisect(sign, lo, hi);
        let (g, dg) = self.leading_pivot(position)?;
        // a pole of g_0 also flips sign, but from + to -, and is never
        // bracketed here; guard against a bracket that straddled one anyway
        let weight = 1.0 / dg;
        (weight.is_finite() && weight > 0.0 && g.abs() < 1e-6)
            .then_some(PointMass { position, weight })
    }

    pub fn spectral_measure(&self) -> Result<SpectralMeasure> {
        let bands = self.band_edges()?;
        let atoms = self.point_masses(&bands);
        Ok(SpectralMeasure { bands, atoms })
    }

    /// Quadrature nodes `(y, mass)` for the full measure: band nodes carry
    /// `w rho(y)`, atoms carry their weight.
    pub fn discretize(&self, measure: &SpectralMeasure, quad: &BandQuadrature) -> Vec<(f64, f64)> {
        let mut nodes: Vec<(f64, f64)> = measure
            .bands
            .bands()
            .flat_map(|(lo, hi)| quad.nodes(lo, hi))
            .map(|(y, w)| (y, w * self.density(y)))
            .collect();
        nodes.extend(measure.atoms.iter().map(|a| (a.position, a.weight)));
        nodes
    }

    /// `int f d(mu)` over the band density only.
    pub fn band_integral(
        &self,
        bands: &BandStructure,
        quad: &BandQuadrature,
        f: impl Fn(f64) -> f64,
    ) -> f64 {
        bands
            .bands()
            .map(|(lo, hi)| quad.integrate(lo, hi, |y| self.density(y) * f(y)))
            .sum()
    }
}

pub fn resolvent(
    operator: &TridiagonalOperator,
    tail: &TailCoefficients,
    z: Complex64,
) -> Result<Complex64> {
    ResolventModel::new(operator, tail).resolvent(z)
}

pub fn density(operator: &TridiagonalOperator, tail: &TailCoefficients, y: f64) -> f64 {
    ResolventModel::new(operator, tail).density(y)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GridSpec {
    /// `points` samples over the band union padded by 5% of its width.
    Auto {
        points: usize,
    },
    Range {
        min: f64,
        max: f64,
        points: usize,
    },
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::Auto { points: 2000 }
    }
}

impl GridSpec {
    pub fn resolve(&self, bands: &BandStructure) -> Vec<f64> {
        let (min, max, points) = match *self {
            GridSpec::Auto { points } => {
                let margin = 0.05 * bands.width();
                (bands.lower() - margin, bands.upper() + margin, points)
            }
            GridSpec::Range { min, max, points } => (min, max, points),
        };
        crate::maps::linear_grid(min, max, points)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityProfile {
    pub lambda: f64,
    pub seed: f64,
    pub depth: usize,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub measure: SpectralMeasure,
}

impl DensityProfile {
    pub fn bands(&self) -> &BandStructure {
        &self.measure.bands
    }
}

pub fn density_profile(
    operator: &TridiagonalOperator,
    tail: &TailCoefficients,
    grid: &GridSpec,
) -> Result<DensityProfile> {
    let model = ResolventModel::new(operator, tail);
    let measure = model.spectral_measure()?;
    let bands = &measure.bands;
    let shift = REAL_AXIS_NUDGE * bands.width();
    let grid = grid.resolve(bands);
    let values = grid
        .par_iter()
        .map(|&y| {
            let probe = match bands.edges.iter().position(|&e| e == y) {
                // even index: lower edge of a band, step up into it
                Some(i) if i % 2 == 0 => y + shift,
                Some(_) => y - shift,
                None => y,
            };
            model.density(probe)
        })
        .collect();
    Ok(DensityProfile {
        lambda: operator.lambda,
        seed: operator.seed,
        depth: operator.depth(),
        grid,
        values,
        measure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant_tail(alpha: f64, beta: f64) -> TailCoefficients {
        TailCoefficients::new(vec![alpha], vec![beta]).unwrap()
    }

    fn closed_form_p1(alpha: f64, beta: f64, z: Complex64) -> Complex64 {
        let w = z - alpha;
        let root = (w - 2.0 * beta).sqrt() * (w + 2.0 * beta).sqrt();
        0.5 * w - 0.5 * root
    }

    #[test]
    fn single_step_coefficients() {
        let z = Complex64::new(0.3, 0.7);
        let m = compose_period(&constant_tail(0.4, 0.5), z);
        assert_eq!(m.a, Complex64::new(0.0, 0.0));
        assert_eq!(m.b, Complex64::new(0.25, 0.0));
        assert_eq!(m.c, Complex64::new(-1.0, 0.0));
        assert_eq!(m.d, z - 0.4);
    }

    #[test]
    fn determinant_is_product_of_beta_squares() {
        let tail = TailCoefficients::new(vec![0.2, 0.7, 0.4], vec![0.5, 0.3, 0.9]).unwrap();
        let expected: f64 = tail.beta.iter().map(|b| b * b).product();
        for z in [
            Complex64::new(0.1, 0.2),
            Complex64::new(-3.0, 0.0),
            Complex64::new(2.5, -1.0),
        ] {
            let det = compose_period(&tail, z).determinant();
            assert!((det - expected).norm() <= 1e-12 * expected);
        }
    }

    #[test]
    fn terminator_matches_closed_form_p1() {
        let tail = constant_tail(0.6, 0.6);
        for z in [
            Complex64::new(0.3, 0.5),
            Complex64::new(2.5, 0.0),
            Complex64::new(-1.4, 0.0),
            Complex64::new(1.0, 1e-3),
        ] {
            let t = solve_terminator(&tail, z).unwrap();
            let expected = closed_form_p1(0.6, 0.6, z);
            assert!((t - expected).norm() < 1e-12, "{z}: {t} vs {expected}");
        }
    }

    #[test]
    fn terminator_inside_band_has_negative_imaginary_part() {
        let tail = constant_tail(0.6, 0.6);
        for y in [-0.5, 0.0, 0.6, 1.2, 1.75] {
            let t = solve_terminator(&tail, Complex64::new(y, 0.0)).unwrap();
            assert!(t.im < 0.0, "y = {y}: {t}");
        }
    }

    #[test]
    fn terminator_decays_at_large_z() {
        let tail = TailCoefficients::new(vec![0.3, 0.8], vec![0.5, 0.6]).unwrap();
        let z = Complex64::new(1e6, 0.0);
        let t = solve_terminator(&tail, z).unwrap();
        // T = beta_1^2 / z (1 + alpha_1 / z + O(z^-2))
        let leading = 0.25 / z;
        assert!((t - leading).norm() < 1e-6 * t.norm());
        let next = 0.25 / (z - 0.3);
        assert!((t - next).norm() < 1e-9 * t.norm());
    }

    #[test]
    fn terminator_fixed_point_residual() {
        let tail = TailCoefficients::new(vec![0.3, 0.8, 0.5], vec![0.5, 0.6, 0.7]).unwrap();
        for z in [
            Complex64::new(0.4, 0.2),
            Complex64::new(3.0, 0.0),
            Complex64::new(0.5, 0.0),
        ] {
            let t = solve_terminator(&tail, z).unwrap();
            let back = compose_period(&tail, z).apply(t);
            assert!((back - t).norm() <= 1e-12 * t.norm().max(1e-300));
        }
    }

    #[test]
    fn growing_branch_flips_the_sign() {
        let tail = constant_tail(0.6, 0.6);
        let z = Complex64::new(0.5, 0.1);
        let good = terminator_on_branch(&tail, z, Branch::Decaying).unwrap();
        let bad = terminator_on_branch(&tail, z, Branch::Growing).unwrap();
        assert!(good.im < 0.0 && bad.im > 0.0);
    }

    #[test]
    fn discriminant_p1() {
        let tail = constant_tail(0.6, 0.6);
        let disc = discriminant_polynomial(&tail);
        assert_eq!(disc.degree(), 2);
        assert!((disc.eval(0.6) + 1.44).abs() < 1e-15);
        let bands = band_edges(&tail).unwrap();
        assert!((bands.edges[0] + 0.6).abs() < 1e-12);
        assert!((bands.edges[1] - 1.8).abs() < 1e-12);
        assert_eq!(bands.band_count(), 1);
        assert_eq!(bands.gaps().count(), 0);
    }

    #[test]
    fn degenerate_tail_is_rejected() {
        // equal alphas and betas: the period-2 tail is really period 1 and
        // the middle gap closes to a double root
        let tail = TailCoefficients::new(vec![0.5, 0.5], vec![0.4, 0.4]).unwrap();
        assert!(matches!(
            band_edges(&tail),
            Err(Error::SpectralDegeneracy(_))
        ));
    }

    #[test]
    fn constant_chain_resolvent_is_depth_independent() {
        let tail = constant_tail(0.6, 0.6);
        let z = Complex64::new(0.9, 0.3);
        let t = solve_terminator(&tail, z).unwrap();
        let expected = -1.0 / (z - 0.6 - t);
        for depth in [1, 5, 100] {
            let op =
                TridiagonalOperator::from_coefficients(vec![0.6; depth], vec![0.6; depth]).unwrap();
            let g = resolvent(&op, &tail, z).unwrap();
            assert!((g - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn resolvent_large_z() {
        let op = TridiagonalOperator::from_coefficients(vec![0.3, 0.7, 0.4], vec![0.5, 0.6, 0.5])
            .unwrap();
        let tail = TailCoefficients::new(vec![0.4, 0.5], vec![0.5, 0.6]).unwrap();
        let z = Complex64::new(1e6, 0.0);
        let g = resolvent(&op, &tail, z).unwrap();
        assert!((g + 1.0 / z).norm() < 1e-6 * g.norm());
        assert!((g + 1.0 / (z - 0.3)).norm() < 1e-9 * g.norm());
    }

    #[test]
    fn resolvent_is_herglotz() {
        let op = TridiagonalOperator::from_coefficients(vec![0.3, 0.7, 0.4], vec![0.5, 0.6, 0.5])
            .unwrap();
        let tail = TailCoefficients::new(vec![0.4, 0.5], vec![0.5, 0.6]).unwrap();
        for re in [-2.0, -0.5, 0.3, 1.0, 2.5] {
            for im in [1e-6, 0.1, 2.0] {
                let g = resolvent(&op, &tail, Complex64::new(re, im)).unwrap();
                assert!(g.im > 0.0);
            }
        }
    }

    #[test]
    fn constant_chain_density_is_semicircle() {
        let op = TridiagonalOperator::from_coefficients(vec![0.6; 10], vec![0.6; 10]).unwrap();
        let tail = constant_tail(0.6, 0.6);
        for y in [-0.59, 0.0, 0.6, 1.3, 1.79] {
            let rho = density(&op, &tail, y);
            let x: f64 = y - 0.6;
            let expected = (4.0 * 0.36 - x * x).sqrt() / (2.0 * std::f64::consts::PI * 0.36);
            assert!(rho > 0.0);
            assert!((rho - expected).abs() < 1e-10, "{y}: {rho} vs {expected}");
        }
        assert_eq!(density(&op, &tail, -0.7), 0.0);
        assert_eq!(density(&op, &tail, 1.9), 0.0);
    }

    #[test]
    fn auto_grid_spans_padded_bands() {
        let bands = BandStructure {
            edges: vec![-1.0, 0.0, 1.0, 3.0],
        };
        let grid = GridSpec::Auto { points: 11 }.resolve(&bands);
        assert_eq!(grid.len(), 11);
        assert!((grid[0] + 1.2).abs() < 1e-15);
        assert!((grid[10] - 3.2).abs() < 1e-15);
        assert_eq!(bands.gaps().collect::<Vec<_>>(), vec![(0.0, 1.0)]);
    }

    #[test]
    fn atom_below_constant_band() {
        // a diagonal defect at site 0 pushes one state below the band
        let mut diag = vec![0.0; 40];
        diag[0] = -3.0;
        let op = TridiagonalOperator::from_coefficients(diag, vec![1.0; 40]).unwrap();
        let tail = constant_tail(0.0, 1.0);
        let model = ResolventModel::new(&op, &tail);
        let measure = model.spectral_measure().unwrap();
        assert_eq!(measure.atoms.len(), 1);
        // eigenvalue of the defect: a + 1/a with a = -3, weight 1 - 1/a^2
        let atom = measure.atoms[0];
        assert!((atom.position - (-3.0 - 1.0 / 3.0)).abs() < 1e-10);
        assert!((atom.weight - (1.0 - 1.0 / 9.0)).abs() < 1e-10);
    }
}
