//! Transfer-matrix evaluation of the oscillation amplitude `phi(x, kappa)`
//! and of the characteristic function
//! `F(kappa) = phi(1, kappa) - i * d_x phi(1, kappa) / kappa`,
//! pointwise for any string and as an exact polynomial in `kappa` for purely
//! atomic strings, plus the real power-series coefficients `phi_j(1)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::string_model::ValidatedString;

/// Amplitude and one-sided slope of `phi` at a point of the string.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector {
    pub value: Complex64,
    pub slope: Complex64,
    pub x: f64,
}

/// One element of the left-to-right propagation timeline.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Step {
    /// Point mass: the slope jumps by `-kappa^2 * mass * value`.
    Atom { mass: f64 },
    /// Massless interval: the value drifts linearly.
    Gap { len: f64 },
    /// Constant-density interval: rotation with wavenumber `kappa * sqrt(rho)`.
    Layer { len: f64, density: f64 },
}

fn timeline(string: &ValidatedString) -> Vec<Step> {
    let mut breaks: Vec<f64> = vec![string.left_end(), 1.0];
    breaks.extend(string.atoms().iter().map(|a| a.x));
    for s in string.segments() {
        breaks.push(s.left);
        breaks.push(s.right);
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let mut steps = Vec::new();
    for (k, &x) in breaks.iter().enumerate() {
        for a in string.atoms() {
            if a.x == x {
                steps.push(Step::Atom { mass: a.mass });
            }
        }
        if k + 1 < breaks.len() {
            let next = breaks[k + 1];
            let density = string
                .segments()
                .iter()
                .find(|s| s.left <= x && next <= s.right)
                .map_or(0.0, |s| s.density);
            if density > 0.0 {
                steps.push(Step::Layer {
                    len: next - x,
                    density,
                });
            } else {
                steps.push(Step::Gap { len: next - x });
            }
        }
    }
    steps
}

/// `cos z` and `sin z / z`, series-stabilized near zero.
fn cos_sinc(z: Complex64) -> (Complex64, Complex64) {
    if z.norm_sqr() < 1e-8 {
        let z2 = z * z;
        let cos = 1.0 + z2 * (-0.5 + z2 * (1.0 / 24.0 - z2 / 720.0));
        let sinc = 1.0 + z2 * (-1.0 / 6.0 + z2 * (1.0 / 120.0 - z2 / 5040.0));
        (cos, sinc)
    } else {
        (z.cos(), z.sin() / z)
    }
}

/// `d/dz (sin z / z) = (cos z - sinc z) / z`.
fn sinc_prime(z: Complex64) -> Complex64 {
    if z.norm_sqr() < 1e-8 {
        let z2 = z * z;
        z * (-1.0 / 3.0 + z2 * (1.0 / 30.0 - z2 / 840.0))
    } else {
        (z.cos() - z.sin() / z) / z
    }
}

/// Solve the initial value problem from the left end and return the state at
/// `x = 1`. Entire in `kappa`; `kappa = 0` gives `(1, 0)`.
pub fn propagate(string: &ValidatedString, kappa: Complex64) -> StateVector {
    let k2 = kappa * kappa;
    let mut value = Complex64::new(1.0, 0.0);
    let mut slope = Complex64::new(0.0, 0.0);
    for step in timeline(string) {
        match step {
            Step::Atom { mass } => slope -= k2 * mass * value,
            Step::Gap { len } => value += len * slope,
            Step::Layer { len, density } => {
                let wd = kappa * (density.sqrt() * len);
                let (cos, sinc) = cos_sinc(wd);
                let new_value = value * cos + slope * (len * sinc);
                let new_slope = -value * (k2 * density * len * sinc) + slope * cos;
                value = new_value;
                slope = new_slope;
            }
        }
    }
    StateVector {
        value,
        slope,
        x: 1.0,
    }
}

/// As [`propagate`], also carrying the kappa-derivative of the state.
fn propagate_with_derivative(
    string: &ValidatedString,
    kappa: Complex64,
) -> (Complex64, Complex64, Complex64, Complex64) {
    let k2 = kappa * kappa;
    let mut v = Complex64::new(1.0, 0.0);
    let mut s = Complex64::new(0.0, 0.0);
    let mut dv = Complex64::new(0.0, 0.0);
    let mut ds = Complex64::new(0.0, 0.0);
    for step in timeline(string) {
        match step {
            Step::Atom { mass } => {
                ds -= mass * (2.0 * kappa * v + k2 * dv);
                s -= k2 * mass * v;
            }
            Step::Gap { len } => {
                dv += len * ds;
                v += len * s;
            }
            Step::Layer { len, density } => {
                let g = density.sqrt() * len;
                let wd = kappa * g;
                let (cos, sinc) = cos_sinc(wd);
                let sp = sinc_prime(wd);
                let sin = sinc * wd;
                // v' = a v + b s,  s' = c v + a s
                let a = cos;
                let b = len * sinc;
                let c = -k2 * density * len * sinc;
                let da = -sin * g;
                let db = len * sp * g;
                let dc = -(2.0 * kappa * density * len * sinc + k2 * density * len * sp * g);
                let nv = v * a + s * b;
                let ns = v * c + s * a;
                let ndv = dv * a + v * da + ds * b + s * db;
                let nds = dv * c + v * dc + ds * a + s * da;
                v = nv;
                s = ns;
                dv = ndv;
                ds = nds;
            }
        }
    }
    (v, s, dv, ds)
}

/// The characteristic function `F(kappa)`, whose upper-half-plane zeros with
/// multiplicity are the quasi-eigenvalues.
pub fn characteristic(string: &ValidatedString, kappa: Complex64) -> Result<Complex64> {
    if kappa == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroKappa);
    }
    let state = propagate(string, kappa);
    Ok(state.value - Complex64::i() * state.slope / kappa)
}

/// `F(kappa)` and `F'(kappa)` in one propagation pass.
pub fn characteristic_with_derivative(
    string: &ValidatedString,
    kappa: Complex64,
) -> Result<(Complex64, Complex64)> {
    if kappa == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroKappa);
    }
    let (v, s, dv, ds) = propagate_with_derivative(string, kappa);
    let i = Complex64::i();
    let f = v - i * s / kappa;
    let df = dv - i * (ds * kappa - s) / (kappa * kappa);
    Ok((f, df))
}

/// Dense coefficient list of `F` as a polynomial in `kappa` (atomic strings).
/// Even-index coefficients are real, odd-index purely imaginary.
#[derive(Debug, Clone, PartialEq)]
pub struct CharPolynomial {
    pub coefficients: Vec<Complex64>,
}

impl CharPolynomial {
    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coefficients.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Value and derivative by a single Horner sweep.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in self.coefficients.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// `1 + max |c_k / c_d|`: all roots lie inside this radius.
    pub fn cauchy_bound(&self) -> f64 {
        let lead = self.coefficients.last().unwrap().norm();
        1.0 + self
            .coefficients
            .iter()
            .take(self.coefficients.len() - 1)
            .map(|c| c.norm() / lead)
            .fold(0.0, f64::max)
    }
}

fn poly_add_scaled_shift2(target: &mut Vec<Complex64>, source: &[Complex64], factor: f64) {
    if target.len() < source.len() + 2 {
        target.resize(source.len() + 2, Complex64::new(0.0, 0.0));
    }
    for (k, &c) in source.iter().enumerate() {
        target[k + 2] += factor * c;
    }
}

/// Exact coefficients of `F` by propagating polynomial-valued states.
/// Rejects strings with density segments (`F` is transcendental there).
pub fn characteristic_polynomial(string: &ValidatedString) -> Result<CharPolynomial> {
    if !string.is_atomic() {
        return Err(Error::NotAtomic);
    }
    let mut value = vec![Complex64::new(1.0, 0.0)];
    let mut slope: Vec<Complex64> = vec![];
    for step in timeline(string) {
        match step {
            Step::Atom { mass } => {
                let v = value.clone();
                poly_add_scaled_shift2(&mut slope, &v, -mass);
            }
            Step::Gap { len } => {
                if value.len() < slope.len() {
                    value.resize(slope.len(), Complex64::new(0.0, 0.0));
                }
                for (k, &c) in slope.iter().enumerate() {
                    value[k] += len * c;
                }
            }
            Step::Layer { .. } => unreachable!("atomic string"),
        }
    }
    // F = value - i * slope / kappa; the slope has no constant term.
    let mut coefficients = value;
    if !slope.is_empty() {
        debug_assert_eq!(slope[0], Complex64::new(0.0, 0.0));
        if coefficients.len() < slope.len() - 1 {
            coefficients.resize(slope.len() - 1, Complex64::new(0.0, 0.0));
        }
        for (k, &c) in slope.iter().enumerate().skip(1) {
            coefficients[k - 1] -= Complex64::i() * c;
        }
    }
    while coefficients.len() > 1 && *coefficients.last().unwrap() == Complex64::new(0.0, 0.0) {
        coefficients.pop();
    }
    Ok(CharPolynomial { coefficients })
}

// Small real-polynomial helpers (local variable, constant term first) used by
// the series recursion below.

fn poly_eval(p: &[f64], t: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

/// Antiderivative with zero constant term.
fn poly_antideriv(p: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(p.len() + 1);
    out.push(0.0);
    out.extend(p.iter().enumerate().map(|(k, &c)| c / (k + 1) as f64));
    out
}

/// Multiply by the linear factor `c0 + t`.
fn poly_mul_linear(p: &[f64], c0: f64) -> Vec<f64> {
    let mut out = vec![0.0; p.len() + 1];
    for (k, &c) in p.iter().enumerate() {
        out[k] += c0 * c;
        out[k + 1] += c;
    }
    out
}

/// Coefficients `phi_j(1)`, `j = 0..=order`, of the even power series
/// `phi(1, kappa) = sum (-1)^j phi_j(1) kappa^(2j)`, computed exactly through
/// the Volterra-type recursion `phi_j(x) = int (x - s) phi_(j-1)(s) dM(s)`.
pub fn series_coefficients(string: &ValidatedString, order: usize) -> Vec<f64> {
    let mut breaks: Vec<f64> = vec![string.left_end(), 1.0];
    breaks.extend(string.atoms().iter().map(|a| a.x));
    for s in string.segments() {
        breaks.push(s.left);
        breaks.push(s.right);
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let nb = breaks.len();

    let atom_mass: Vec<f64> = breaks
        .iter()
        .map(|&x| {
            string
                .atoms()
                .iter()
                .filter(|a| a.x == x)
                .map(|a| a.mass)
                .sum()
        })
        .collect();
    let densities: Vec<f64> = breaks
        .iter()
        .take(nb.saturating_sub(1))
        .zip(breaks.iter().skip(1))
        .map(|(&x0, &x1)| {
            string
                .segments()
                .iter()
                .find(|s| s.left <= x0 && x1 <= s.right)
                .map_or(0.0, |s| s.density)
        })
        .collect();

    // Piecewise polynomials in the local variable t = x - breaks[k].
    let mut prev_pieces: Vec<Vec<f64>> = vec![vec![1.0]; nb.saturating_sub(1)];
    let mut prev_bvals: Vec<f64> = vec![1.0; nb];
    let mut out = vec![1.0];

    for _ in 1..=order {
        let mut i0 = 0.0; // int phi_(j-1) dM up to the current point
        let mut i1 = 0.0; // int s phi_(j-1) dM up to the current point
        let mut bvals = vec![0.0; nb];
        let mut pieces: Vec<Vec<f64>> = Vec::with_capacity(nb.saturating_sub(1));
        for k in 0..nb {
            let x = breaks[k];
            bvals[k] = x * i0 - i1;
            i0 += atom_mass[k] * prev_bvals[k];
            i1 += atom_mass[k] * x * prev_bvals[k];
            if k + 1 < nb {
                let len = breaks[k + 1] - x;
                let rho = densities[k];
                if rho > 0.0 {
                    let p = poly_antideriv(&prev_pieces[k]);
                    let q = poly_antideriv(&poly_mul_linear(&prev_pieces[k], x));
                    // phi_j(x + t) = (x + t)(i0 + rho P(t)) - i1 - rho Q(t)
                    let mut inner = p.iter().map(|&c| rho * c).collect::<Vec<_>>();
                    inner[0] += i0;
                    let mut piece = poly_mul_linear(&inner, x);
                    piece[0] -= i1;
                    for (c, &qc) in piece.iter_mut().zip(q.iter()) {
                        *c -= rho * qc;
                    }
                    i0 += rho * poly_eval(&p, len);
                    i1 += rho * poly_eval(&q, len);
                    pieces.push(piece);
                } else {
                    pieces.push(vec![x * i0 - i1, i0]);
                }
            }
        }
        out.push(*bvals.last().unwrap());
        prev_pieces = pieces;
        prev_bvals = bvals;
    }
    out
}
