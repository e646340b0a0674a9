//! Identities linking the spectrum to the string data: the mass rule, the
//! statical-moment formula (long and compact forms), and the product
//! representation of the characteristic function.

use num_complex::Complex64;
use serde::Serialize;

use crate::propagator::characteristic;
use crate::roots::Spectrum;
use crate::string_model::ValidatedString;

/// Roots with `|Re kappa|` below this (relative) threshold are routed to the
/// imaginary-axis sums; the split's stability is itself under test.
pub const IMAGINARY_AXIS_TOL: f64 = 1e-9;

fn is_imaginary(kappa: Complex64) -> bool {
    kappa.re.abs() <= IMAGINARY_AXIS_TOL * kappa.norm().max(1.0)
}

/// Right-half-plane representatives and imaginary-axis roots, each repeated
/// according to multiplicity. Left-half-plane mirrors are dropped.
fn split_roots(spectrum: &Spectrum) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut right = Vec::new();
    let mut imag = Vec::new();
    for kappa in spectrum.expanded() {
        if is_imaginary(kappa) {
            imag.push(kappa);
        } else if kappa.re > 0.0 {
            right.push(kappa);
        }
    }
    (right, imag)
}

/// Defect of the mass rule `sum |Im(1/kappa_j)| = Tm - l`. For a complete
/// spectrum the absolute residual is returned; for a box-limited one the
/// signed defect (expected nonpositive).
pub fn check_mass_rule(string: &ValidatedString, spectrum: &Spectrum) -> f64 {
    let target = string.total_mass() - string.tail_length();
    let total: f64 = spectrum
        .expanded()
        .iter()
        .map(|k| k.im.abs() / k.norm_sqr())
        .sum();
    if spectrum.is_complete() {
        (total - target).abs()
    } else {
        total - target
    }
}

/// Residuals of the statical-moment formula: the long form (half-plane
/// representatives plus the `l (Tm - l/2)` term) and the compact form
/// `Stm = Tm^2/2 + (1/2) sum (Re^2 - Im^2)/|kappa|^4` over all roots.
pub fn check_moment_rule(string: &ValidatedString, spectrum: &Spectrum) -> (f64, f64) {
    let stm = string.statical_moment();
    let tm = string.total_mass();
    let l = string.tail_length();
    let (right, imag) = split_roots(spectrum);

    let single: f64 = right.iter().map(|k| 1.0 / k.norm_sqr()).sum();
    let weight = |k: &Complex64| k.im / k.norm_sqr();
    let mut pairs = 0.0;
    for j in 0..right.len() {
        for n in (j + 1)..right.len() {
            pairs += 4.0 * weight(&right[j]) * weight(&right[n]);
        }
    }
    for rj in &right {
        for ik in &imag {
            pairs += 2.0 * weight(rj) * weight(ik);
        }
    }
    for j in 0..imag.len() {
        for n in (j + 1)..imag.len() {
            pairs += weight(&imag[j]) * weight(&imag[n]);
        }
    }
    let long_form = single + pairs + l * (tm - 0.5 * l);

    let compact_sum: f64 = spectrum
        .expanded()
        .iter()
        .map(|k| (k.re * k.re - k.im * k.im) / (k.norm_sqr() * k.norm_sqr()))
        .sum();
    let compact = 0.5 * tm * tm + 0.5 * compact_sum;

    ((long_form - stm).abs(), (compact - stm).abs())
}

/// Max relative mismatch between `F` and its product representation
/// `e^(i kappa l) prod [(1 - k/kj)(1 + k/conj(kj))] prod (1 - k/kj)`
/// over the sample points.
pub fn check_product_formula(
    string: &ValidatedString,
    spectrum: &Spectrum,
    samples: &[Complex64],
) -> f64 {
    let l = string.tail_length();
    let (right, imag) = split_roots(spectrum);
    let mut worst = 0.0f64;
    for &z in samples {
        let f = match characteristic(string, z) {
            Ok(f) => f,
            Err(_) => continue, // kappa = 0 excluded by the caller's contract
        };
        let mut product = (Complex64::i() * z * l).exp();
        for k in &right {
            product *= (1.0 - z / k) * (1.0 + z / k.conj());
        }
        for k in &imag {
            product *= 1.0 - z / k;
        }
        worst = worst.max((f - product).norm() / f.norm().max(1.0));
    }
    worst
}

/// Everything the validation surface reports for one string.
#[derive(Debug, Clone, Serialize)]
pub struct SumRuleReport {
    pub mass_residual: f64,
    pub moment_residual_long: f64,
    pub moment_residual_compact: f64,
    pub product_residual: f64,
    pub complete: bool,
}

pub fn report(
    string: &ValidatedString,
    spectrum: &Spectrum,
    samples: &[Complex64],
) -> SumRuleReport {
    let (moment_residual_long, moment_residual_compact) = check_moment_rule(string, spectrum);
    SumRuleReport {
        mass_residual: check_mass_rule(string, spectrum),
        moment_residual_long,
        moment_residual_compact,
        product_residual: check_product_formula(string, spectrum, samples),
        complete: spectrum.is_complete(),
    }
}
