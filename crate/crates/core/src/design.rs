//! The optimization side: the feasibility region `K(Ad)`, the minimal decay
//! rate `I(alpha)`, the explicit single-atom optimal strings, optimizing
//! sequences where the infimum is not attained, and the separation distance
//! from multiple quasi-eigenvalues.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::string_model::{Constraints, StringSpec};

/// Which bound of the admissible family is met with equality by an attained
/// design.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ActiveConstraint {
    Mass,
    Moment,
}

/// Where the optimal quasi-eigenvalue sits on the boundary of `K(Ad)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    ImaginaryAxis,
    MassCircle,
    MomentCircle,
    NotAttained,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::ImaginaryAxis => "imaginary_axis",
            Branch::MassCircle => "mass_circle",
            Branch::MomentCircle => "moment_circle",
            Branch::NotAttained => "not_attained",
        }
    }
}

/// Outcome of the resonance-design problem for one frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignResult {
    pub alpha: f64,
    /// Minimal achievable decay rate `I(alpha)`.
    pub decay: f64,
    /// `alpha + i I(alpha)` when attained.
    pub kappa: Option<Complex64>,
    pub attained: bool,
    /// The optimal single-atom string when attained.
    pub string: Option<StringSpec>,
    pub active_constraints: Vec<ActiveConstraint>,
    pub branch: Branch,
}

/// Quasi-eigenvalues of the single-atom string `Delta_(x0, A)`, in closed
/// form. Two entries, coincident at the double-root parameter `A = 4(1-x0)`.
pub fn single_atom_roots(x0: f64, mass: f64) -> Vec<Complex64> {
    if x0 == 1.0 {
        return vec![Complex64::new(0.0, 1.0 / mass)];
    }
    let h = 1.0 - x0;
    let beta = 0.5 / h;
    let disc = 1.0 / (mass * h) - beta * beta;
    if disc >= 0.0 {
        let r = disc.sqrt();
        vec![Complex64::new(-r, beta), Complex64::new(r, beta)]
    } else {
        let r = (-disc).sqrt();
        vec![Complex64::new(0.0, beta - r), Complex64::new(0.0, beta + r)]
    }
}

/// Near-axis classification mirrors the sum-rule split: numerically computed
/// imaginary roots carry a stray real part of roundoff size.
fn on_axis(kappa: Complex64) -> bool {
    kappa.re.abs() <= 1e-9 * kappa.norm().max(1.0)
}

/// Membership in `K(Ad) = i[1/m, inf) U (C+ \ [D_(1/m)(i/m) U D_(1/sqrt S)(0)])`.
/// Boundary circles are feasible.
// negated comparisons are deliberate: NaN must fall through to the error arm
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn feasible(kappa: Complex64, c: &Constraints) -> Result<bool> {
    if !(kappa.im > 0.0) {
        return Err(Error::ImKappaNotPositive);
    }
    // closed-set membership: boundary points computed in floating point may
    // land a few ulps inside the open disks, hence the relative slack
    const SLACK: f64 = 1.0 - 1e-12;
    if on_axis(kappa) && kappa.im >= SLACK / c.m {
        return Ok(true);
    }
    let mass_center = Complex64::new(0.0, 1.0 / c.m);
    let outside_mass = (kappa - mass_center).norm_sqr() >= SLACK / (c.m * c.m);
    let outside_moment = kappa.norm_sqr() >= SLACK / c.s;
    Ok(outside_mass && outside_moment)
}

/// `sqrt(1/S - m^2/(4 S^2))`: the frequency where the mass and moment circles
/// exchange control (defined when `S > m^2/4`).
fn branch_frequency(c: &Constraints) -> f64 {
    (1.0 / c.s - c.m * c.m / (4.0 * c.s * c.s)).max(0.0).sqrt()
}

/// `I(alpha)` by the explicit piecewise formulas, symmetric in `alpha`.
pub fn min_decay(alpha: f64, c: &Constraints) -> (f64, bool) {
    let a = alpha.abs();
    let cutoff = 1.0 / c.s.sqrt();
    if a == 0.0 {
        return (1.0 / c.m, true);
    }
    if a >= cutoff {
        return (0.0, false);
    }
    let moment = (1.0 / c.s - a * a).sqrt();
    if c.s <= c.m * c.m / 4.0 {
        return (moment, true);
    }
    if a < branch_frequency(c) {
        (
            1.0 / c.m + (1.0 / (c.m * c.m) - a * a).max(0.0).sqrt(),
            true,
        )
    } else {
        (moment, true)
    }
}

/// Independent geometric oracle: the smallest `beta` with
/// `alpha + i beta` in `K(Ad)`, read straight off the region's shape.
pub fn min_decay_geometric(alpha: f64, c: &Constraints) -> f64 {
    let a = alpha.abs();
    if a == 0.0 {
        return 1.0 / c.m;
    }
    if a >= 1.0 / c.s.sqrt() {
        return 0.0;
    }
    let beta_moment = (1.0 / c.s - a * a).max(0.0).sqrt();
    // is the moment-circle exit point already outside the open mass disk?
    let p = Complex64::new(a, beta_moment);
    let inside_mass = (p - Complex64::new(0.0, 1.0 / c.m)).norm_sqr() < 1.0 / (c.m * c.m);
    if inside_mass {
        1.0 / c.m + (1.0 / (c.m * c.m) - a * a).max(0.0).sqrt()
    } else {
        beta_moment
    }
}

/// The unique optimal string and quasi-eigenvalue for `|alpha| < 1/sqrt(S)`,
/// or the not-attained record beyond.
pub fn optimal_string(alpha: f64, c: &Constraints) -> DesignResult {
    let a = alpha.abs();
    let cutoff = 1.0 / c.s.sqrt();
    if a >= cutoff {
        return DesignResult {
            alpha,
            decay: 0.0,
            kappa: None,
            attained: false,
            string: None,
            active_constraints: vec![],
            branch: Branch::NotAttained,
        };
    }
    if a == 0.0 {
        let string = StringSpec::single_atom(1.0, c.m);
        return DesignResult {
            alpha,
            decay: 1.0 / c.m,
            kappa: Some(Complex64::new(0.0, 1.0 / c.m)),
            attained: true,
            string: Some(string),
            active_constraints: vec![ActiveConstraint::Mass],
            branch: Branch::ImaginaryAxis,
        };
    }

    let mass_branch = c.s > c.m * c.m / 4.0 && a < branch_frequency(c);
    let (x0, mass, branch) = if mass_branch {
        let x0 = 1.0 - c.m / (2.0 + 2.0 * (1.0 - a * a * c.m * c.m).max(0.0).sqrt());
        (x0, c.m, Branch::MassCircle)
    } else {
        let q = (1.0 / c.s - a * a).sqrt();
        (1.0 - 0.5 / q, 2.0 * c.s * q, Branch::MomentCircle)
    };
    let (decay, _) = min_decay(alpha, c);
    let kappa = Complex64::new(alpha, decay);
    let string = StringSpec::single_atom(x0, mass);

    let mut active = Vec::new();
    if (mass - c.m).abs() <= 1e-12 * c.m {
        active.push(ActiveConstraint::Mass);
    }
    let stm = mass * (1.0 - x0);
    if (stm - c.s).abs() <= 1e-12 * c.s {
        active.push(ActiveConstraint::Moment);
    }
    debug_assert!(!active.is_empty());
    debug_assert!(mass <= c.m * (1.0 + 1e-12) && stm <= c.s * (1.0 + 1e-12));
    debug_assert!(
        single_atom_roots(x0, mass)
            .iter()
            .any(|r| (r - kappa).norm() <= 1e-9 * kappa.norm().max(1.0)),
        "closed-form roots must reproduce the optimal quasi-eigenvalue"
    );

    DesignResult {
        alpha,
        decay,
        kappa: Some(kappa),
        attained: true,
        string: Some(string),
        active_constraints: active,
        branch,
    }
}

/// Admissible single-atom strings whose spectra are exactly `+-alpha + i beta`
/// for the requested decay rates; usable only where the infimum `I = 0` is not
/// attained.
// negated comparison is deliberate: a NaN decay rate must be rejected
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn optimizing_sequence(alpha: f64, c: &Constraints, betas: &[f64]) -> Result<Vec<StringSpec>> {
    let a = alpha.abs();
    if a < 1.0 / c.s.sqrt() {
        return Err(Error::AlphaAttained);
    }
    let mut out = Vec::with_capacity(betas.len());
    for &beta in betas {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::BetaInadmissible { beta });
        }
        let denom = a * a + beta * beta;
        let mass = 2.0 * beta / denom;
        let stm = 1.0 / denom;
        if mass > c.m || stm > c.s {
            return Err(Error::BetaInadmissible { beta });
        }
        let x0 = 1.0 - 0.5 / beta;
        debug_assert!(single_atom_roots(x0, mass)
            .iter()
            .any(|r| (r - Complex64::new(a, beta)).norm() < 1e-9 * denom.sqrt().max(1.0)));
        out.push(StringSpec::single_atom(x0, mass));
    }
    Ok(out)
}

/// Distance from a point to the ray `i [y0, inf)`.
fn distance_to_ray(p: Complex64, y0: f64) -> f64 {
    if p.im >= y0 {
        p.re.abs()
    } else {
        (p - Complex64::new(0.0, y0)).norm()
    }
}

/// Distance from the optimal quasi-eigenvalue to the superset of
/// `K^mult(Ad)` established by the multiplicity-weighted disk exclusions:
/// `i [2/m, inf) U ( C+ \ [D_(2/m)(2i/m) U D_(sqrt(2/S))(0)] )`.
/// Strictly positive for every attained design.
pub fn mult_separation(alpha: f64, c: &Constraints) -> Result<f64> {
    if alpha.abs() >= 1.0 / c.s.sqrt() {
        return Err(Error::AlphaNotAttained);
    }
    let p = optimal_string(alpha, c).kappa.expect("attained");
    let r1 = 2.0 / c.m;
    let c1 = Complex64::new(0.0, r1);
    let r2 = (2.0 / c.s).sqrt();

    let mut best = distance_to_ray(p, r1);
    let mut consider = |z: Complex64| {
        let in_mass = (z - c1).norm_sqr() < r1 * r1 * (1.0 - 1e-14);
        let in_moment = z.norm_sqr() < r2 * r2 * (1.0 - 1e-14);
        if z.im >= 0.0 && !in_mass && !in_moment {
            best = best.min((p - z).norm());
        }
    };

    // exterior-region nearest-point candidates: radial projections onto each
    // circle, the circle-circle intersections, and the real axis
    if p != c1 {
        consider(c1 + r1 * (p - c1) / (p - c1).norm());
    }
    if p != Complex64::new(0.0, 0.0) {
        consider(r2 * p / p.norm());
    }
    let im_cross = r2 * r2 / (2.0 * r1); // from |z| = r2, |z - i r1| = r1
    if r2 * r2 >= im_cross * im_cross {
        let re_cross = (r2 * r2 - im_cross * im_cross).sqrt();
        consider(Complex64::new(re_cross, im_cross));
        consider(Complex64::new(-re_cross, im_cross));
    }
    if p.re.abs() >= r2 {
        consider(Complex64::new(p.re, 0.0));
    } else {
        consider(Complex64::new(r2, 0.0));
        consider(Complex64::new(-r2, 0.0));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(m: f64, s: f64) -> Constraints {
        Constraints::new(m, s).unwrap()
    }

    #[test]
    fn feasibility_examples() {
        let con = c(2.0, 1.0);
        assert!(feasible(Complex64::new(0.0, 0.6), &con).unwrap());
        assert!(!feasible(Complex64::new(0.2, 0.3), &con).unwrap());
        assert!(feasible(Complex64::new(0.6, 0.8), &con).unwrap());
        assert!(!feasible(Complex64::new(0.0, 0.3), &con).unwrap());
        assert!(feasible(Complex64::new(0.0, 0.0), &con).is_err());
        assert!(feasible(Complex64::new(1.0, -0.5), &con).is_err());
    }

    #[test]
    fn min_decay_examples() {
        assert_eq!(min_decay(0.0, &c(2.0, 1.0)), (0.5, true));
        let (i, attained) = min_decay(0.6, &c(2.0, 1.0));
        assert_relative_eq!(i, 0.8, max_relative = 1e-15);
        assert!(attained);
        let (i, _) = min_decay(0.5, &c(1.0, 1.0));
        assert_relative_eq!(i, 1.0 + 0.75f64.sqrt(), max_relative = 1e-15);
        assert_eq!(min_decay(2.0, &c(2.0, 1.0)), (0.0, false));
        // symmetric in alpha
        assert_eq!(min_decay(-0.6, &c(2.0, 1.0)), min_decay(0.6, &c(2.0, 1.0)));
    }

    #[test]
    fn geometric_oracle_examples() {
        assert_relative_eq!(
            min_decay_geometric(0.9, &c(1.0, 1.0)),
            0.19f64.sqrt(),
            epsilon = 1e-12
        );
        assert_relative_eq!(min_decay_geometric(0.8, &c(1.0, 1.0)), 1.6, epsilon = 1e-12);
    }

    #[test]
    fn optimal_string_examples() {
        let r = optimal_string(0.0, &c(2.0, 1.0));
        assert_eq!(
            r.string.as_ref().unwrap(),
            &StringSpec::single_atom(1.0, 2.0)
        );
        assert_eq!(r.kappa.unwrap(), Complex64::new(0.0, 0.5));
        assert_eq!(r.branch, Branch::ImaginaryAxis);
        assert_eq!(r.active_constraints, vec![ActiveConstraint::Mass]);

        let r = optimal_string(0.6, &c(2.0, 1.0));
        let atom = &r.string.as_ref().unwrap().atoms[0];
        assert_relative_eq!(atom.x, 0.375, max_relative = 1e-14);
        assert_relative_eq!(atom.mass, 1.6, max_relative = 1e-14);
        assert!((r.kappa.unwrap() - Complex64::new(0.6, 0.8)).norm() < 1e-14);
        assert_eq!(r.branch, Branch::MomentCircle);
        assert_eq!(r.active_constraints, vec![ActiveConstraint::Moment]);

        let r = optimal_string(0.5, &c(1.0, 1.0));
        let atom = &r.string.as_ref().unwrap().atoms[0];
        assert_relative_eq!(atom.x, 3f64.sqrt() - 1.0, max_relative = 1e-12);
        assert_relative_eq!(atom.mass, 1.0, max_relative = 1e-15);
        assert_eq!(r.branch, Branch::MassCircle);
        assert_eq!(r.active_constraints, vec![ActiveConstraint::Mass]);

        let r = optimal_string(1.5, &c(2.0, 1.0));
        assert!(!r.attained);
        assert!(r.string.is_none() && r.kappa.is_none());
        assert_eq!(r.branch, Branch::NotAttained);
    }

    #[test]
    fn optimizing_sequence_examples() {
        let con = c(2.0, 1.0);
        let seq = optimizing_sequence(1.5, &con, &[0.1, 0.01]).unwrap();
        let a0 = &seq[0].atoms[0];
        assert_relative_eq!(a0.x, -4.0, max_relative = 1e-14);
        assert_relative_eq!(a0.mass, 0.2 / 2.26, max_relative = 1e-12);
        let a1 = &seq[1].atoms[0];
        assert_relative_eq!(a1.x, -49.0, max_relative = 1e-14);
        assert_relative_eq!(a1.mass, 0.02 / 2.2501, max_relative = 1e-12);

        // alpha exactly at the attainment edge is allowed
        assert!(optimizing_sequence(1.0, &con, &[0.1]).unwrap().len() == 1);
        // attained range is rejected, as are inadmissible betas
        assert!(matches!(
            optimizing_sequence(0.5, &con, &[0.1]),
            Err(Error::AlphaAttained)
        ));
        assert!(matches!(
            optimizing_sequence(1.5, &con, &[-1.0]),
            Err(Error::BetaInadmissible { .. })
        ));
        // huge beta blows the mass bound for small enough m
        assert!(matches!(
            optimizing_sequence(1.5, &c(1e-3, 1.0), &[1.5]),
            Err(Error::BetaInadmissible { .. })
        ));
    }

    #[test]
    fn separation_hand_geometry() {
        let d = mult_separation(0.0, &c(2.0, 1.0)).unwrap();
        assert_relative_eq!(d, 0.5, epsilon = 1e-12);
        assert!(mult_separation(1.5, &c(2.0, 1.0)).is_err());
    }

    #[test]
    fn separation_triangle_bound() {
        let con = c(2.0, 1.0);
        for alpha in [-0.9, -0.3, 0.0, 0.2, 0.45, 0.7, 0.99] {
            let d = mult_separation(alpha, &con).unwrap();
            assert!(d > 0.0);
            let p = optimal_string(alpha, &con).kappa.unwrap();
            let bound = (p - Complex64::new(0.0, 1.0)).norm() + 1.0;
            assert!(d <= bound + 1e-12);
        }
    }
}
