//! Numerical resolution shared by every computation.
//!
//! `refined()` doubles the sampling grids only. Truncation degrees, test
//! families and the block depth `j_max` are left alone, so a refined run
//! measures discretisation error and nothing else.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Resolution {
    /// Floor on the number of angular samples for a full circle.
    pub min_circle_samples: usize,
    /// Multiplier on `2 * degree + 1` (rounded up to a power of two).
    pub oversample: usize,
    /// Floor on the samples inside one arc.
    pub min_arc_samples: usize,
    /// Radial cells per octave of `1 - r`.
    pub cells_per_octave: usize,
    /// Octaves covered by the radial cells; the rest is the tail cell.
    pub octaves: usize,
    /// Gauss–Legendre points per radial cell.
    pub gl_order: usize,
    /// Radii used for the radial maximal function.
    pub radial_max_steps: usize,
    /// Grid density for the suprema defining the symbol functionals.
    pub sup_per_octave: usize,
    pub sup_octaves: usize,
}

impl Default for Resolution {
    fn default() -> Self {
        Self {
            min_circle_samples: 1024,
            oversample: 1,
            min_arc_samples: 16,
            cells_per_octave: 8,
            octaves: 16,
            gl_order: 4,
            radial_max_steps: 24,
            sup_per_octave: 4,
            sup_octaves: 16,
        }
    }
}

impl Resolution {
    pub fn refined(&self) -> Self {
        Self {
            min_circle_samples: self.min_circle_samples * 2,
            oversample: self.oversample * 2,
            min_arc_samples: self.min_arc_samples * 2,
            cells_per_octave: self.cells_per_octave * 2,
            octaves: self.octaves,
            gl_order: self.gl_order,
            radial_max_steps: self.radial_max_steps * 2,
            sup_per_octave: self.sup_per_octave * 2,
            sup_octaves: self.sup_octaves,
        }
    }

    /// Full-circle sample count for a polynomial of the given degree.
    pub fn circle_samples(&self, degree: usize) -> usize {
        let base = (2 * degree + 1).next_power_of_two() * self.oversample.max(1);
        base.max(self.min_circle_samples)
    }

    /// Samples per arc when the circle is cut into `n_arcs` arcs.
    pub fn arc_samples(&self, degree: usize, n_arcs: usize) -> usize {
        self.circle_samples(degree)
            .div_ceil(n_arcs)
            .max(self.min_arc_samples)
    }

    /// `1 - r` at the radial cell boundaries, from 1 down to `2^-octaves`.
    pub fn radial_distances(&self) -> Vec<f64> {
        dyadic_distances(self.cells_per_octave, self.octaves)
    }

    pub fn sup_distances(&self) -> Vec<f64> {
        dyadic_distances(self.sup_per_octave, self.sup_octaves)
    }
}

/// `2^{-k / per_octave}` for `k = 0..=per_octave * octaves`.
pub fn dyadic_distances(per_octave: usize, octaves: usize) -> Vec<f64> {
    (0..=per_octave * octaves)
        .map(|k| (-(k as f64) / per_octave as f64).exp2())
        .collect()
}
