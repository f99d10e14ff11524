//! Atoms `(1 - |w|)^{M - 1/p} omega_hat(w)^{-1/q} (1 - conj(w) z)^{-M}` on
//! the dyadic polar grid, and their Rademacher combinations.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{check_exponent, Error, Result};
use crate::seq::{row_len, DoubleIndexSeq};
use crate::series::PowerSeries;
use crate::weights::{block_distance, DoublingWeight};

/// Largest truncation degree an atom may need.
pub const MAX_ATOM_DEGREE: usize = 1 << 17;

/// Lower bound on the atom order: `1 + 1/p + (alpha0 + lambda)/q`.
pub fn atom_order_threshold(p: f64, q: f64, w: &DoublingWeight) -> f64 {
    let c = w.constants();
    1.0 + 1.0 / p + (c.alpha0 + c.lambda) / q
}

/// Default atom order: one above the threshold.
pub fn default_atom_order(p: f64, q: f64, w: &DoublingWeight) -> f64 {
    atom_order_threshold(p, q, w) + 1.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AtomSpec {
    pub center: Complex64,
    pub order: f64,
}

/// Centre `z_{j,l} = ((r_j + r_{j-1}) / 2) e^{2 pi i (l + 1/2) / K^{j+2}}`.
pub fn grid_center(k: u32, j: usize, l: usize) -> Complex64 {
    let dist = 0.5 * (block_distance(k, j) + block_distance(k, j - 1));
    let theta = 2.0 * PI * (l as f64 + 0.5) / row_len(k, j) as f64;
    Complex64::from_polar(1.0 - dist, theta)
}

/// `|z - w| / |1 - conj(w) z|`.
pub fn pseudo_hyperbolic(z: Complex64, w: Complex64) -> f64 {
    (z - w).norm() / (Complex64::new(1.0, 0.0) - w.conj() * z).norm()
}

/// Smallest pseudo-hyperbolic distance between two grid centres with `j <= j_max`.
pub fn min_grid_separation(k: u32, j_max: usize) -> f64 {
    let pts: Vec<Complex64> = (1..=j_max)
        .flat_map(|j| (0..row_len(k, j)).map(move |l| grid_center(k, j, l)))
        .collect();
    let mut best = f64::INFINITY;
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            best = best.min(pseudo_hyperbolic(*a, *b));
        }
    }
    best
}

/// Taylor coefficients of the atom, truncated once they fall below
/// `1e-16` of the largest one.
pub fn atom_function(spec: &AtomSpec, p: f64, q: f64, w: &DoublingWeight) -> Result<PowerSeries> {
    check_exponent("p", p, false)?;
    check_exponent("q", q, false)?;
    let threshold = atom_order_threshold(p, q, w);
    if !(spec.order > threshold) {
        return Err(Error::Invalid(format!(
            "atom order {} must exceed 1 + 1/p + (alpha0 + lambda)/q = {threshold}",
            spec.order
        )));
    }
    let rad = spec.center.norm();
    if rad >= 1.0 {
        return Err(Error::Invalid(format!("atom centre must lie in the open disc, |w| = {rad}")));
    }
    let dist = 1.0 - rad;
    let scale = dist.powf(spec.order - 1.0 / p) * w.weight().hat_at_distance(dist).powf(-1.0 / q);
    let wbar = spec.center.conj();
    let m_order = spec.order;
    let mut coeffs = vec![Complex64::new(scale, 0.0)];
    let mut c = Complex64::new(scale, 0.0);
    let mut peak = scale;
    let mut m = 0usize;
    loop {
        c *= wbar * ((m_order + m as f64) / (m as f64 + 1.0));
        m += 1;
        let a = c.norm();
        peak = peak.max(a);
        coeffs.push(c);
        let past_peak = (m_order + m as f64) * rad < m as f64 + 1.0;
        if past_peak && a < 1e-16 * peak {
            break;
        }
        if m >= MAX_ATOM_DEGREE {
            return Err(Error::Invalid(format!(
                "atom at |w| = {rad} needs more than {MAX_ATOM_DEGREE} coefficients"
            )));
        }
    }
    PowerSeries::new(coeffs)
}

/// Signs `s_{j,l}` in `{-1, +1}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignPattern {
    pub seed: u64,
    signs: Vec<Vec<f64>>,
}

impl SignPattern {
    pub fn seeded(k: u32, j_max: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let signs = (1..=j_max)
            .map(|j| {
                (0..row_len(k, j))
                    .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
                    .collect()
            })
            .collect();
        Self { seed, signs }
    }

    pub fn get(&self, j: usize, l: usize) -> f64 {
        self.signs[j - 1][l]
    }
}

/// `sum_{j,l} s_{j,l} a_{j,l} atom_{j,l}` over the grid of the weight's `K`.
pub fn rademacher_combination(
    a: &DoubleIndexSeq,
    signs: &SignPattern,
    order: f64,
    p: f64,
    q: f64,
    w: &DoublingWeight,
) -> Result<PowerSeries> {
    if a.k() != w.k() {
        return Err(Error::Invalid(format!(
            "sequence uses K = {} but the weight's grid uses K = {}",
            a.k(),
            w.k()
        )));
    }
    let mut out = PowerSeries::zero();
    for j in 1..=a.j_max() {
        for (l, &coef) in a.row(j).iter().enumerate() {
            if coef == 0.0 {
                continue;
            }
            let atom = atom_function(
                &AtomSpec {
                    center: grid_center(a.k(), j, l),
                    order,
                },
                p,
                q,
                w,
            )?;
            out.add_scaled_assign(&atom, Complex64::new(coef * signs.get(j, l), 0.0));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::RadialWeight;

    fn unweighted() -> DoublingWeight {
        DoublingWeight::certify(RadialWeight::standard(0.0)).unwrap()
    }

    #[test]
    fn atom_coefficients_follow_the_binomial_series() {
        let w = unweighted();
        let center = Complex64::new(0.3, 0.4);
        let order = default_atom_order(2.0, 2.0, &w);
        let f = atom_function(&AtomSpec { center, order }, 2.0, 2.0, &w).unwrap();
        let scale = 0.5f64.powf(order - 0.5) * 0.5f64.powf(-0.5);
        for z in [Complex64::new(0.1, -0.2), Complex64::new(-0.6, 0.3)] {
            let direct = scale * (Complex64::new(1.0, 0.0) - center.conj() * z).powf(-order);
            assert!((f.eval(z) - direct).norm() < 1e-12 * direct.norm());
        }
    }

    #[test]
    fn order_below_threshold_is_rejected() {
        let w = unweighted();
        let spec = AtomSpec {
            center: Complex64::new(0.5, 0.0),
            order: 1.0,
        };
        assert!(atom_function(&spec, 2.0, 2.0, &w).is_err());
    }

    #[test]
    fn grid_separation_is_bounded_below() {
        let mut prev = f64::INFINITY;
        let first = min_grid_separation(2, 2);
        assert!(first > 0.1);
        for j_max in 2..=6 {
            let s = min_grid_separation(2, j_max);
            assert!(s <= prev + 1e-15);
            assert!(s >= first - 1e-12, "j_max = {j_max}: {s}");
            prev = s;
        }
    }

    #[test]
    fn sign_patterns_are_reproducible() {
        let a = SignPattern::seeded(2, 3, 7);
        let b = SignPattern::seeded(2, 3, 7);
        let c = SignPattern::seeded(2, 3, 8);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn combination_of_one_atom_is_that_atom() {
        let w = unweighted();
        let order = default_atom_order(1.0, 1.0, &w);
        let a = DoubleIndexSeq::from_fn(2, 2, |j, l| if (j, l) == (2, 3) { 2.0 } else { 0.0 }).unwrap();
        let signs = SignPattern::seeded(2, 2, 1);
        let f = rademacher_combination(&a, &signs, order, 1.0, 1.0, &w).unwrap();
        let atom = atom_function(&AtomSpec { center: grid_center(2, 2, 3), order }, 1.0, 1.0, &w).unwrap();
        let z = Complex64::new(0.2, 0.1);
        assert!((f.eval(z) - atom.eval(z) * 2.0 * signs.get(2, 3)).norm() < 1e-12);
    }
}
