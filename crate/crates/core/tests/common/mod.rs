#![allow(dead_code)]

use krein_strings::{Complex64, StringSpec, ValidatedString};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random purely atomic string: up to `n_max` atoms, positions in
/// `[pos_min, pos_max]` (distinct), masses in `(mass_min, mass_max]`.
pub fn random_atomic(
    r: &mut ChaCha8Rng,
    n_max: usize,
    pos_min: f64,
    pos_max: f64,
    mass_min: f64,
    mass_max: f64,
) -> ValidatedString {
    loop {
        let n = r.gen_range(1..=n_max);
        let mut atoms: Vec<(f64, f64)> = (0..n)
            .map(|_| {
                (
                    r.gen_range(pos_min..pos_max),
                    r.gen_range(mass_min..mass_max),
                )
            })
            .collect();
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        if atoms.windows(2).all(|w| w[1].0 - w[0].0 > 0.02) {
            return StringSpec::atomic(&atoms).validate().unwrap();
        }
    }
}

/// Test-side closed form for the spectrum of a single atom at `x0 < 1`,
/// independent of the library's root-finding path.
pub fn single_atom_oracle(x0: f64, mass: f64) -> Vec<Complex64> {
    if x0 == 1.0 {
        return vec![Complex64::new(0.0, 1.0 / mass)];
    }
    let h = 1.0 - x0;
    let beta = 0.5 / h;
    let disc = 1.0 / (mass * h) - beta * beta;
    if disc >= 0.0 {
        vec![
            Complex64::new(-disc.sqrt(), beta),
            Complex64::new(disc.sqrt(), beta),
        ]
    } else {
        vec![
            Complex64::new(0.0, beta - (-disc).sqrt()),
            Complex64::new(0.0, beta + (-disc).sqrt()),
        ]
    }
}

/// Greedy multiset match: every `got` root has a distinct partner in `want`
/// within `tol`, multiplicities expanded.
pub fn multisets_match(got: &[Complex64], want: &[Complex64], tol: f64) -> bool {
    if got.len() != want.len() {
        return false;
    }
    let mut used = vec![false; want.len()];
    'outer: for g in got {
        for (k, w) in want.iter().enumerate() {
            if !used[k] && (g - w).norm() <= tol {
                used[k] = true;
                continue 'outer;
            }
        }
        return false;
    }
    true
}
