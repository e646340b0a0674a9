//! Regular Krein strings as finite data: point masses plus piecewise-constant
//! density segments on `(-inf, 1]`, together with the measure functionals
//! (total mass, statical moment, left end, density-1 tail) and reduction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point mass `mass` at position `x <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub x: f64,
    pub mass: f64,
}

/// A constant-density piece of the mass measure on `(left, right]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub left: f64,
    pub right: f64,
    pub density: f64,
}

/// Raw string data as read from JSON. Validate with [`StringSpec::validate`]
/// before doing anything spectral with it.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StringSpec {
    #[serde(default)]
    pub atoms: Vec<Atom>,
    #[serde(default)]
    pub segments: Vec<Segment>,
}

impl StringSpec {
    pub fn atomic(atoms: &[(f64, f64)]) -> Self {
        StringSpec {
            atoms: atoms.iter().map(|&(x, mass)| Atom { x, mass }).collect(),
            segments: Vec::new(),
        }
    }

    pub fn single_atom(x: f64, mass: f64) -> Self {
        Self::atomic(&[(x, mass)])
    }

    /// Check the invariants and normalize: atoms sorted strictly increasing,
    /// segments sorted and disjoint, zero-density segments dropped.
    pub fn validate(mut self) -> Result<ValidatedString> {
        for (index, a) in self.atoms.iter().enumerate() {
            if !a.x.is_finite() || !a.mass.is_finite() {
                return Err(Error::NonFiniteInput);
            }
            if a.mass <= 0.0 {
                return Err(Error::NonPositiveMass {
                    index,
                    mass: a.mass,
                });
            }
            if a.x > 1.0 {
                return Err(Error::PositionBeyondEnd { x: a.x });
            }
        }
        for (index, s) in self.segments.iter().enumerate() {
            if !s.left.is_finite() || !s.right.is_finite() || !s.density.is_finite() {
                return Err(Error::NonFiniteInput);
            }
            if s.density < 0.0 {
                return Err(Error::NegativeDensity {
                    index,
                    density: s.density,
                });
            }
            if s.right > 1.0 {
                return Err(Error::PositionBeyondEnd { x: s.right });
            }
            if s.left >= s.right {
                return Err(Error::EmptySegment {
                    index,
                    left: s.left,
                    right: s.right,
                });
            }
        }
        self.atoms.sort_by(|a, b| a.x.total_cmp(&b.x));
        for w in self.atoms.windows(2) {
            if w[0].x == w[1].x {
                return Err(Error::DuplicateAtom { x: w[0].x });
            }
        }
        self.segments.retain(|s| s.density > 0.0);
        self.segments.sort_by(|a, b| a.left.total_cmp(&b.left));
        for (index, w) in self.segments.windows(2).enumerate() {
            if w[0].right > w[1].left {
                return Err(Error::OverlappingSegments { index });
            }
        }
        for a in &self.atoms {
            for s in &self.segments {
                if s.left < a.x && a.x < s.right {
                    return Err(Error::AtomInsideSegment { x: a.x });
                }
            }
        }
        Ok(ValidatedString(self))
    }
}

/// A [`StringSpec`] with invariants checked; immutable after validation.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedString(StringSpec);

impl ValidatedString {
    pub fn spec(&self) -> &StringSpec {
        &self.0
    }

    pub fn into_spec(self) -> StringSpec {
        self.0
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.0.atoms
    }

    pub fn segments(&self) -> &[Segment] {
        &self.0.segments
    }

    pub fn is_atomic(&self) -> bool {
        self.0.segments.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.atoms.is_empty() && self.0.segments.is_empty()
    }

    /// Total mass of the measure.
    pub fn total_mass(&self) -> f64 {
        let atoms: f64 = self.0.atoms.iter().map(|a| a.mass).sum();
        let segs: f64 = self
            .0
            .segments
            .iter()
            .map(|s| s.density * (s.right - s.left))
            .sum();
        atoms + segs
    }

    /// Statical moment about the right end, `int (1 - x) dM`.
    pub fn statical_moment(&self) -> f64 {
        let atoms: f64 = self.0.atoms.iter().map(|a| a.mass * (1.0 - a.x)).sum();
        let segs: f64 = self
            .0
            .segments
            .iter()
            .map(|s| {
                let l = 1.0 - s.left;
                let r = 1.0 - s.right;
                s.density * 0.5 * (l * l - r * r)
            })
            .sum();
        atoms + segs
    }

    /// The left end `a1` of the mass support; 1 for the zero string.
    pub fn left_end(&self) -> f64 {
        let mut a1 = f64::INFINITY;
        if let Some(a) = self.0.atoms.first() {
            a1 = a1.min(a.x);
        }
        if let Some(s) = self.0.segments.first() {
            a1 = a1.min(s.left);
        }
        if a1.is_finite() {
            a1
        } else {
            1.0
        }
    }

    /// Length of the maximal interval `(1 - l, 1]` on which the measure is
    /// exactly Lebesgue (density 1, no atoms in the interior, none at 1).
    pub fn tail_length(&self) -> f64 {
        if self.0.atoms.iter().any(|a| a.x == 1.0) {
            return 0.0;
        }
        let mut a2 = 1.0;
        for s in self.0.segments.iter().rev() {
            if s.right != a2 || s.density != 1.0 {
                break;
            }
            a2 = s.left;
        }
        // Atoms strictly inside the chain cut it short.
        for a in &self.0.atoms {
            if a.x > a2 && a.x < 1.0 {
                a2 = a.x;
            }
        }
        1.0 - a2
    }

    /// Delete the density-1 tail and shift everything right by its length.
    /// The spectrum is unchanged.
    pub fn reduce(&self) -> ValidatedString {
        let l = self.tail_length();
        if l == 0.0 {
            return self.clone();
        }
        let a2 = 1.0 - l;
        let atoms = self
            .0
            .atoms
            .iter()
            .map(|a| Atom {
                x: a.x + l,
                mass: a.mass,
            })
            .collect();
        let segments = self
            .0
            .segments
            .iter()
            .filter(|s| s.left < a2)
            .map(|s| Segment {
                left: s.left + l,
                right: s.right.min(a2) + l,
                density: s.density,
            })
            .collect();
        StringSpec { atoms, segments }
            .validate()
            .expect("reduction preserves validity")
    }
}

/// Total-mass and statical-moment bounds `(m, S)` of the admissible family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constraints {
    pub m: f64,
    pub s: f64,
}

impl Constraints {
    pub fn new(m: f64, s: f64) -> Result<Self> {
        if !(m > 0.0 && s > 0.0) || !m.is_finite() || !s.is_finite() {
            return Err(Error::NonPositiveConstraint { m, s });
        }
        Ok(Constraints { m, s })
    }

    /// True iff the string belongs to `Ad(m, S)`.
    pub fn admits(&self, string: &ValidatedString) -> bool {
        let t = string.total_mass();
        t > 0.0 && t <= self.m && string.statical_moment() <= self.s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn valid(atoms: &[(f64, f64)], segments: &[(f64, f64, f64)]) -> ValidatedString {
        StringSpec {
            atoms: atoms.iter().map(|&(x, mass)| Atom { x, mass }).collect(),
            segments: segments
                .iter()
                .map(|&(left, right, density)| Segment {
                    left,
                    right,
                    density,
                })
                .collect(),
        }
        .validate()
        .unwrap()
    }

    #[test]
    fn zero_string_is_legal() {
        let s = StringSpec::default().validate().unwrap();
        assert!(s.is_zero());
        assert_eq!(s.left_end(), 1.0);
        assert_eq!(s.total_mass(), 0.0);
        assert_eq!(s.statical_moment(), 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            StringSpec::single_atom(0.5, -1.0).validate(),
            Err(Error::NonPositiveMass { .. })
        ));
        assert!(matches!(
            StringSpec::single_atom(1.5, 1.0).validate(),
            Err(Error::PositionBeyondEnd { .. })
        ));
        let overlapping = StringSpec {
            atoms: vec![],
            segments: vec![
                Segment {
                    left: 0.0,
                    right: 0.5,
                    density: 1.0,
                },
                Segment {
                    left: 0.4,
                    right: 0.8,
                    density: 2.0,
                },
            ],
        };
        assert!(matches!(
            overlapping.validate(),
            Err(Error::OverlappingSegments { .. })
        ));
        let inside = StringSpec {
            atoms: vec![Atom { x: 0.25, mass: 1.0 }],
            segments: vec![Segment {
                left: 0.0,
                right: 0.5,
                density: 1.0,
            }],
        };
        assert!(matches!(
            inside.validate(),
            Err(Error::AtomInsideSegment { .. })
        ));
        assert!(matches!(
            StringSpec::atomic(&[(0.3, 1.0), (0.3, 2.0)]).validate(),
            Err(Error::DuplicateAtom { .. })
        ));
    }

    #[test]
    fn measure_functionals() {
        assert_eq!(valid(&[(1.0, 2.0)], &[]).total_mass(), 2.0);
        assert_eq!(valid(&[(0.0, 1.0), (0.5, 1.0)], &[]).total_mass(), 2.0);
        let s = valid(&[(0.0, 1.0), (0.5, 1.0)], &[(0.6, 1.0, 1.0)]);
        assert!((s.total_mass() - 2.4).abs() < 1e-15);

        assert_eq!(valid(&[(1.0, 3.0)], &[]).statical_moment(), 0.0);
        assert_eq!(valid(&[(0.0, 1.0), (0.5, 1.0)], &[]).statical_moment(), 1.5);
        assert!((valid(&[(0.375, 1.6)], &[]).statical_moment() - 1.0).abs() < 1e-15);

        assert_eq!(valid(&[(0.3, 1.0)], &[]).left_end(), 0.3);
        assert_eq!(valid(&[(0.5, 1.0)], &[(0.1, 0.2, 2.0)]).left_end(), 0.1);
    }

    #[test]
    fn tail_detection() {
        assert_eq!(valid(&[(0.0, 1.0), (0.5, 1.0)], &[]).tail_length(), 0.0);
        let s = valid(&[(0.0, 1.0)], &[(0.6, 1.0, 1.0)]);
        assert_eq!(s.tail_length(), 0.4);
        assert_eq!(valid(&[], &[(0.6, 1.0, 2.0)]).tail_length(), 0.0);
        // an atom at 1 blocks the tail; one strictly inside cuts it
        assert_eq!(valid(&[(1.0, 1.0)], &[(0.6, 1.0, 1.0)]).tail_length(), 0.0);
        let cut = valid(&[(0.8, 1.0)], &[(0.6, 0.8, 1.0), (0.8, 1.0, 1.0)]).tail_length();
        assert!((cut - 0.2).abs() < 1e-15);
        // chains of density-1 segments join
        assert_eq!(
            valid(&[], &[(0.2, 0.6, 1.0), (0.6, 1.0, 1.0)]).tail_length(),
            0.8
        );
    }

    #[test]
    fn reduction() {
        let s = valid(&[(0.0, 1.0), (0.5, 1.0)], &[(0.6, 1.0, 1.0)]);
        let r = s.reduce();
        assert_eq!(r.spec(), &StringSpec::atomic(&[(0.4, 1.0), (0.9, 1.0)]));
        assert!((s.total_mass() - s.tail_length() - r.total_mass()).abs() < 1e-14);

        let whole = valid(&[], &[(0.0, 1.0, 1.0)]);
        assert!(whole.reduce().is_zero());

        let untouched = valid(&[(0.0, 1.0), (0.5, 1.0)], &[]);
        assert_eq!(untouched.reduce(), untouched);

        // an interior atom cuts the tail and the chain below it survives, shifted
        let cut = valid(&[(0.6, 1.0)], &[(0.3, 0.6, 1.0), (0.6, 1.0, 1.0)]);
        let r = cut.reduce();
        assert_eq!(r.tail_length(), 0.0);
        assert_eq!(r.atoms(), &[Atom { x: 1.0, mass: 1.0 }]);
        assert_eq!(
            r.segments(),
            &[Segment {
                left: 0.7,
                right: 1.0,
                density: 1.0
            }]
        );
    }

    #[test]
    fn reduce_is_idempotent() {
        let s = valid(&[(0.2, 0.7)], &[(0.4, 0.5, 1.0), (0.5, 1.0, 1.0)]);
        let r = s.reduce();
        assert_eq!(r.reduce(), r);
    }

    #[test]
    fn moment_ignores_mass_at_right_end() {
        let base = valid(&[(0.0, 1.0)], &[]);
        let with_end = valid(&[(0.0, 1.0), (1.0, 5.0)], &[]);
        assert_eq!(base.statical_moment(), with_end.statical_moment());
    }
}
