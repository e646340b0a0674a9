//! Quasi-normal eigenvalues (resonances) of Krein strings with a dissipative
//! right endpoint: transfer-matrix propagation of the characteristic function,
//! complete spectra for atomic strings, box-local spectra for strings with
//! density segments, spectral sum-rule validation, and the constrained
//! resonance-design problem with its explicit single-atom optima.

pub mod design;
pub mod error;
pub mod propagator;
pub mod roots;
pub mod string_model;
pub mod sumrules;

pub use design::{
    feasible, min_decay, min_decay_geometric, mult_separation, optimal_string, optimizing_sequence,
    ActiveConstraint, Branch, DesignResult,
};
pub use error::{Error, Result};
pub use propagator::{
    characteristic, characteristic_polynomial, characteristic_with_derivative, propagate,
    series_coefficients, CharPolynomial, StateVector,
};
pub use roots::{
    count_zeros, default_box, spectrum, spectrum_in_box, Method, SearchBox, Spectrum,
    SpectrumEntry, DEFAULT_CLUSTER_TOL,
};
pub use string_model::{Atom, Constraints, Segment, StringSpec, ValidatedString};
pub use sumrules::{
    check_mass_rule, check_moment_rule, check_product_formula, report, SumRuleReport,
    IMAGINARY_AXIS_TOL,
};

pub use num_complex::Complex64;
