//! The spectrum `K(dM)`: zeros of the characteristic function in the upper
//! half-plane with multiplicities. Purely atomic strings go through the exact
//! polynomial path (simultaneous Aberth iteration plus Newton polish); strings
//! with density segments are searched inside a user box by the argument
//! principle with recursive rectangle subdivision.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::propagator::{
    characteristic, characteristic_polynomial, characteristic_with_derivative, CharPolynomial,
};
use crate::string_model::ValidatedString;

pub const DEFAULT_CLUSTER_TOL: f64 = 1e-6;

/// One quasi-eigenvalue with its algebraic multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumEntry {
    pub kappa: Complex64,
    pub multiplicity: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Polynomial,
    Contour,
}

/// Roots found, how, and how well. When `search_box` is set, completeness is
/// only claimed within that box.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub entries: Vec<SpectrumEntry>,
    pub method: Method,
    pub max_residual: f64,
    pub search_box: Option<SearchBox>,
}

impl Spectrum {
    /// True when the entries are the whole of `K(dM)`.
    pub fn is_complete(&self) -> bool {
        self.search_box.is_none()
    }

    /// Total multiplicity.
    pub fn count(&self) -> u32 {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }

    /// Roots repeated according to multiplicity.
    pub fn expanded(&self) -> Vec<Complex64> {
        let mut out = Vec::new();
        for e in &self.entries {
            out.extend(std::iter::repeat_n(e.kappa, e.multiplicity as usize));
        }
        out
    }
}

/// Closed rectangle in the open upper half-plane; `im_min > 0` keeps the
/// contour off the real axis and off `kappa = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchBox {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl SearchBox {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let b = SearchBox {
            re_min,
            re_max,
            im_min,
            im_max,
        };
        if !(re_min < re_max && 0.0 < im_min && im_min < im_max)
            || [re_min, re_max, im_min, im_max]
                .iter()
                .any(|v| !v.is_finite())
        {
            return Err(Error::InvalidBox);
        }
        Ok(b)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.re_min <= z.re && z.re <= self.re_max && self.im_min <= z.im && z.im <= self.im_max
    }

    fn diag(&self) -> f64 {
        let dr = self.re_max - self.re_min;
        let di = self.im_max - self.im_min;
        (dr * dr + di * di).sqrt()
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_min, self.im_min),
            Complex64::new(self.re_max, self.im_min),
            Complex64::new(self.re_max, self.im_max),
            Complex64::new(self.re_min, self.im_max),
        ]
    }
}

/// Heuristic enclosure for an atomic string: the Cauchy bound caps `|kappa|`,
/// the bottom edge sits at a small positive height. Roots below it are missed;
/// the polynomial path is the complete one.
pub fn default_box(string: &ValidatedString) -> Result<SearchBox> {
    let p = characteristic_polynomial(string)?;
    let r = p.cauchy_bound() + 0.5;
    SearchBox::new(-r, r, 1e-3, r)
}

/// Mirror symmetry forces any root this close to the imaginary axis to lie
/// exactly on it (its mirror image would otherwise be a separate root well
/// inside the cluster radius), so zero out the stray real part. The margin
/// covers the sqrt(epsilon)-level accuracy of polishing a double root.
fn snap_to_axis(entries: &mut [SpectrumEntry]) {
    for e in entries {
        if e.kappa.re.abs() <= 1e-7 * e.kappa.norm().max(1.0) {
            e.kappa.re = 0.0;
        }
    }
}

fn sort_entries(entries: &mut [SpectrumEntry]) {
    entries.sort_by(|a, b| {
        a.kappa
            .re
            .total_cmp(&b.kappa.re)
            .then(a.kappa.im.total_cmp(&b.kappa.im))
    });
}

// ---------------------------------------------------------------------------
// Polynomial path
// ---------------------------------------------------------------------------

/// Simultaneous (Aberth-Ehrlich) iteration for all roots of the polynomial.
fn aberth_roots(poly: &CharPolynomial) -> Result<Vec<Complex64>> {
    let degree = poly.degree();
    if degree == 0 {
        return Ok(vec![]);
    }
    let lead = *poly.coefficients.last().unwrap();
    if degree == 1 {
        return Ok(vec![-poly.coefficients[0] / lead]);
    }
    let radius = 0.7 * poly.cauchy_bound();
    let mut z: Vec<Complex64> = (0..degree)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / degree as f64 + 0.39;
            radius * Complex64::new(theta.cos(), theta.sin())
        })
        .collect();
    let escape = 4.0 * poly.cauchy_bound() + 10.0;
    for _ in 0..400 {
        let mut max_step = 0.0f64;
        for i in 0..degree {
            let (p, dp) = poly.eval_with_derivative(z[i]);
            if p == Complex64::new(0.0, 0.0) {
                continue;
            }
            let ratio = if dp == Complex64::new(0.0, 0.0) {
                Complex64::new(1e-3, 1e-3)
            } else {
                p / dp
            };
            let mut sum = Complex64::new(0.0, 0.0);
            for j in 0..degree {
                if j != i {
                    let d = z[i] - z[j];
                    if d != Complex64::new(0.0, 0.0) {
                        sum += d.inv();
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - ratio * sum;
            let step = if denom == Complex64::new(0.0, 0.0) {
                ratio
            } else {
                ratio / denom
            };
            z[i] -= step;
            max_step = max_step.max(step.norm() / z[i].norm().max(1.0));
        }
        if max_step < 1e-14 {
            break;
        }
        if z.iter().any(|zi| zi.norm() > escape) {
            return Err(Error::IterationCap);
        }
    }
    Ok(z)
}

fn cluster(mut roots: Vec<Complex64>, tol: f64) -> Vec<(Complex64, u32)> {
    let mut clusters: Vec<Vec<Complex64>> = Vec::new();
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    'outer: for r in roots {
        for c in clusters.iter_mut() {
            if c.iter().any(|&z| (z - r).norm() <= tol * z.norm().max(1.0)) {
                c.push(r);
                continue 'outer;
            }
        }
        clusters.push(vec![r]);
    }
    clusters
        .into_iter()
        .map(|c| {
            let n = c.len();
            let mean = c.into_iter().sum::<Complex64>() / n as f64;
            (mean, n as u32)
        })
        .collect()
}

/// Multiplicity-aware Newton: `z -= r p / p'` converges quadratically at an
/// r-fold zero.
fn polish_polynomial(poly: &CharPolynomial, mut z: Complex64, mult: u32) -> Result<Complex64> {
    let escape = 4.0 * poly.cauchy_bound() + 10.0;
    for _ in 0..80 {
        let (p, dp) = poly.eval_with_derivative(z);
        if p == Complex64::new(0.0, 0.0) || dp == Complex64::new(0.0, 0.0) {
            return Ok(z);
        }
        let step = mult as f64 * p / dp;
        z -= step;
        if z.norm() > escape {
            return Err(Error::SolverDiverged {
                kappa: z,
                residual: p.norm(),
            });
        }
        if step.norm() <= 1e-15 * z.norm().max(1.0) {
            break;
        }
    }
    Ok(z)
}

/// All quasi-eigenvalues of a purely atomic string, exactly: the roots of the
/// characteristic polynomial, clustered into multiplicities.
pub fn spectrum(string: &ValidatedString, cluster_tol: f64) -> Result<Spectrum> {
    let poly = characteristic_polynomial(string)?;
    let raw = aberth_roots(&poly)?;
    let mut entries = Vec::new();
    for (center, mult) in cluster(raw, cluster_tol) {
        let z = polish_polynomial(&poly, center, mult)?;
        entries.push(SpectrumEntry {
            kappa: z,
            multiplicity: mult,
        });
    }
    // polishing may pull previously distinct clusters together
    let merged = cluster(
        entries
            .iter()
            .flat_map(|e| std::iter::repeat_n(e.kappa, e.multiplicity as usize))
            .collect(),
        cluster_tol,
    );
    let mut entries: Vec<SpectrumEntry> = merged
        .into_iter()
        .map(|(kappa, multiplicity)| SpectrumEntry {
            kappa,
            multiplicity,
        })
        .collect();
    snap_to_axis(&mut entries);
    sort_entries(&mut entries);
    debug_assert_eq!(
        entries
            .iter()
            .map(|e| e.multiplicity as usize)
            .sum::<usize>(),
        poly.degree()
    );
    let max_residual = entries
        .iter()
        .map(|e| poly.eval(e.kappa).norm())
        .fold(0.0, f64::max);
    Ok(Spectrum {
        entries,
        method: Method::Polynomial,
        max_residual,
        search_box: None,
    })
}

// ---------------------------------------------------------------------------
// Contour path
// ---------------------------------------------------------------------------

const CONTOUR_GUARD: f64 = 1e-9;
const MAX_REFINE_DEPTH: u32 = 44;

fn edge_winding(
    string: &ValidatedString,
    z0: Complex64,
    f0: Complex64,
    z1: Complex64,
    f1: Complex64,
    depth: u32,
) -> Result<f64> {
    let dphase = (f1 / f0).arg();
    if dphase.abs() < std::f64::consts::FRAC_PI_2 {
        return Ok(dphase);
    }
    if depth >= MAX_REFINE_DEPTH {
        return Err(Error::ZeroNearContour {
            min_abs: f0.norm().min(f1.norm()),
        });
    }
    let zm = 0.5 * (z0 + z1);
    let fm = characteristic(string, zm)?;
    if fm.norm() < CONTOUR_GUARD {
        return Err(Error::ZeroNearContour { min_abs: fm.norm() });
    }
    Ok(edge_winding(string, z0, f0, zm, fm, depth + 1)?
        + edge_winding(string, zm, fm, z1, f1, depth + 1)?)
}

/// Number of zeros of `F` inside the box, counted with multiplicity, by the
/// winding number of `F` over the phase-unwrapped rectangle boundary.
pub fn count_zeros(string: &ValidatedString, search_box: &SearchBox) -> Result<usize> {
    const SAMPLES_PER_EDGE: usize = 24;
    let corners = search_box.corners();
    let mut total = 0.0;
    for e in 0..4 {
        let za = corners[e];
        let zb = corners[(e + 1) % 4];
        let mut prev_z = za;
        let mut prev_f = characteristic(string, za)?;
        if prev_f.norm() < CONTOUR_GUARD {
            return Err(Error::ZeroNearContour {
                min_abs: prev_f.norm(),
            });
        }
        for k in 1..=SAMPLES_PER_EDGE {
            let t = k as f64 / SAMPLES_PER_EDGE as f64;
            let z = za + t * (zb - za);
            let f = characteristic(string, z)?;
            if f.norm() < CONTOUR_GUARD {
                return Err(Error::ZeroNearContour { min_abs: f.norm() });
            }
            total += edge_winding(string, prev_z, prev_f, z, f, 0)?;
            prev_z = z;
            prev_f = f;
        }
    }
    let w = total / (2.0 * std::f64::consts::PI);
    let rounded = w.round();
    if (w - rounded).abs() > 0.25 || rounded < -0.25 {
        return Err(Error::ZeroNearContour { min_abs: 0.0 });
    }
    Ok(rounded as usize)
}

fn newton_on_characteristic(
    string: &ValidatedString,
    mut z: Complex64,
    mult: u32,
    escape: f64,
) -> Result<Complex64> {
    for _ in 0..100 {
        let (f, df) = characteristic_with_derivative(string, z)?;
        if f == Complex64::new(0.0, 0.0) {
            return Ok(z);
        }
        if df == Complex64::new(0.0, 0.0) {
            return Err(Error::SolverDiverged {
                kappa: z,
                residual: f.norm(),
            });
        }
        let step = mult as f64 * f / df;
        z -= step;
        if z.norm() > escape || z.im <= 0.0 {
            return Err(Error::SolverDiverged {
                kappa: z,
                residual: f.norm(),
            });
        }
        if step.norm() <= 1e-15 * z.norm().max(1.0) {
            break;
        }
    }
    Ok(z)
}

/// Boxes with this diagonal or less are resolved by multiplicity-aware Newton
/// from the center; closer root clusters merge into one entry.
const LOCALIZE_DIAG: f64 = 3e-4;
const SPLIT_FRACTIONS: [f64; 7] = [0.5, 0.45, 0.55, 0.4, 0.6, 0.35, 0.65];

fn subdivide(
    string: &ValidatedString,
    search_box: &SearchBox,
    count: usize,
    tol: f64,
    found: &mut Vec<SpectrumEntry>,
) -> Result<()> {
    if count == 0 {
        return Ok(());
    }
    let mult = count as u32;
    let escape = 2.0 * search_box.diag()
        + search_box.re_min.abs().max(search_box.re_max.abs())
        + search_box.im_max;

    // A lone cluster (or a tiny box) is handed to Newton directly.
    if count == 1 || search_box.diag() <= LOCALIZE_DIAG {
        let center = Complex64::new(
            0.5 * (search_box.re_min + search_box.re_max),
            0.5 * (search_box.im_min + search_box.im_max),
        );
        if let Ok(z) = newton_on_characteristic(string, center, mult, escape) {
            let slack = 0.05 * search_box.diag();
            let inflated = SearchBox {
                re_min: search_box.re_min - slack,
                re_max: search_box.re_max + slack,
                im_min: (search_box.im_min - slack).max(search_box.im_min * 0.5),
                im_max: search_box.im_max + slack,
            };
            let residual = characteristic(string, z)?.norm();
            if inflated.contains(z) && residual <= tol {
                found.push(SpectrumEntry {
                    kappa: z,
                    multiplicity: mult,
                });
                return Ok(());
            }
        }
        if search_box.diag() <= LOCALIZE_DIAG / 16.0 {
            return Err(Error::IterationCap);
        }
    }

    let split_re = search_box.re_max - search_box.re_min >= search_box.im_max - search_box.im_min;
    let mut last_err = Error::IterationCap;
    for frac in SPLIT_FRACTIONS {
        let attempt = (|| -> Result<(Vec<SpectrumEntry>, usize)> {
            let (lo, hi) = if split_re {
                let mid = search_box.re_min + frac * (search_box.re_max - search_box.re_min);
                (
                    SearchBox {
                        re_max: mid,
                        ..*search_box
                    },
                    SearchBox {
                        re_min: mid,
                        ..*search_box
                    },
                )
            } else {
                let mid = search_box.im_min + frac * (search_box.im_max - search_box.im_min);
                (
                    SearchBox {
                        im_max: mid,
                        ..*search_box
                    },
                    SearchBox {
                        im_min: mid,
                        ..*search_box
                    },
                )
            };
            let n_lo = count_zeros(string, &lo)?;
            if n_lo > count {
                return Err(Error::ZeroNearContour { min_abs: 0.0 });
            }
            let mut sub = Vec::new();
            subdivide(string, &lo, n_lo, tol, &mut sub)?;
            subdivide(string, &hi, count - n_lo, tol, &mut sub)?;
            Ok((sub, n_lo))
        })();
        match attempt {
            Ok((sub, _)) => {
                found.extend(sub);
                return Ok(());
            }
            Err(e) => last_err = e,
        }
    }
    Err(last_err)
}

/// All zeros of `F` inside the box, with multiplicities from sub-box counts
/// and Newton-refined positions; residuals are checked against `tol`.
pub fn spectrum_in_box(
    string: &ValidatedString,
    search_box: &SearchBox,
    tol: f64,
) -> Result<Spectrum> {
    let count = count_zeros(string, search_box)?;
    let mut entries = Vec::new();
    subdivide(string, search_box, count, tol, &mut entries)?;
    // merge duplicates that straddled a split line
    let merged = cluster(
        entries
            .iter()
            .flat_map(|e| std::iter::repeat_n(e.kappa, e.multiplicity as usize))
            .collect(),
        1e-9,
    );
    let mut entries: Vec<SpectrumEntry> = merged
        .into_iter()
        .map(|(kappa, multiplicity)| SpectrumEntry {
            kappa,
            multiplicity,
        })
        .collect();
    snap_to_axis(&mut entries);
    sort_entries(&mut entries);
    let mut max_residual = 0.0f64;
    for e in &entries {
        let r = characteristic(string, e.kappa)?.norm();
        if r > tol {
            return Err(Error::SolverDiverged {
                kappa: e.kappa,
                residual: r,
            });
        }
        max_residual = max_residual.max(r);
    }
    Ok(Spectrum {
        entries,
        method: Method::Contour,
        max_residual,
        search_box: Some(*search_box),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::string_model::StringSpec;

    fn atomic(atoms: &[(f64, f64)]) -> ValidatedString {
        StringSpec::atomic(atoms).validate().unwrap()
    }

    #[test]
    fn single_atom_at_right_end() {
        let sp = spectrum(&atomic(&[(1.0, 2.0)]), DEFAULT_CLUSTER_TOL).unwrap();
        assert_eq!(sp.entries.len(), 1);
        assert_eq!(sp.entries[0].multiplicity, 1);
        assert!((sp.entries[0].kappa - Complex64::new(0.0, 0.5)).norm() < 1e-12);
        assert!(sp.is_complete());
    }

    #[test]
    fn single_atom_interior_pair() {
        let sp = spectrum(&atomic(&[(0.0, 1.0)]), DEFAULT_CLUSTER_TOL).unwrap();
        let r = 3f64.sqrt() / 2.0;
        assert_eq!(sp.entries.len(), 2);
        assert!((sp.entries[0].kappa - Complex64::new(-r, 0.5)).norm() < 1e-12);
        assert!((sp.entries[1].kappa - Complex64::new(r, 0.5)).norm() < 1e-12);
    }

    #[test]
    fn double_root() {
        let sp = spectrum(&atomic(&[(0.75, 1.0)]), DEFAULT_CLUSTER_TOL).unwrap();
        assert_eq!(sp.entries.len(), 1);
        assert_eq!(sp.entries[0].multiplicity, 2);
        assert!((sp.entries[0].kappa - Complex64::new(0.0, 2.0)).norm() < 1e-6);
    }

    #[test]
    fn zero_string_has_empty_spectrum() {
        let sp = spectrum(
            &StringSpec::default().validate().unwrap(),
            DEFAULT_CLUSTER_TOL,
        )
        .unwrap();
        assert!(sp.entries.is_empty());
    }

    #[test]
    fn upper_half_plane_and_mirror_symmetry() {
        let sp = spectrum(
            &atomic(&[(-0.8, 0.6), (0.1, 1.4), (0.7, 0.3)]),
            DEFAULT_CLUSTER_TOL,
        )
        .unwrap();
        for e in &sp.entries {
            assert!(e.kappa.im > 1e-12);
            let mirror = Complex64::new(-e.kappa.re, e.kappa.im);
            let partner = sp
                .entries
                .iter()
                .find(|o| (o.kappa - mirror).norm() < 1e-9)
                .expect("mirror root present");
            assert_eq!(partner.multiplicity, e.multiplicity);
        }
    }

    #[test]
    fn winding_counts() {
        let s = atomic(&[(0.0, 1.0)]);
        let inside = SearchBox::new(-2.0, 2.0, 0.1, 2.0).unwrap();
        assert_eq!(count_zeros(&s, &inside).unwrap(), 2);
        let empty = SearchBox::new(1.0, 2.0, 1.0, 2.0).unwrap();
        assert_eq!(count_zeros(&s, &empty).unwrap(), 0);
        let s = atomic(&[(0.75, 1.0)]);
        let around_double = SearchBox::new(-1.0, 1.0, 1.5, 2.5).unwrap();
        assert_eq!(count_zeros(&s, &around_double).unwrap(), 2);
    }

    #[test]
    fn contour_matches_polynomial_path() {
        let s = atomic(&[(-0.5, 0.9), (0.3, 1.2)]);
        let poly = spectrum(&s, DEFAULT_CLUSTER_TOL).unwrap();
        let b = SearchBox::new(-5.0, 5.0, 0.05, 5.0).unwrap();
        let cont = spectrum_in_box(&s, &b, 1e-10).unwrap();
        assert_eq!(cont.count() as usize, poly.entries.len());
        for e in &cont.entries {
            assert!(poly
                .entries
                .iter()
                .any(|p| (p.kappa - e.kappa).norm() < 1e-10));
        }
        assert!(!cont.is_complete());
    }

    #[test]
    fn contour_guard_rejects_roots_on_boundary() {
        // root at sqrt(3)/2 + i/2 sits exactly on the box edge
        let s = atomic(&[(0.0, 1.0)]);
        let b = SearchBox::new(-1.0, 3f64.sqrt() / 2.0, 0.25, 1.0).unwrap();
        assert!(matches!(
            count_zeros(&s, &b),
            Err(Error::ZeroNearContour { .. })
        ));
    }

    #[test]
    fn bad_boxes_are_rejected() {
        assert!(SearchBox::new(1.0, -1.0, 0.1, 1.0).is_err());
        assert!(SearchBox::new(-1.0, 1.0, 0.0, 1.0).is_err());
        assert!(SearchBox::new(-1.0, 1.0, 0.5, 0.2).is_err());
    }
}
