//! The Hardy–Littlewood maximal operator on the line, for step functions
//! supported on `[-pi, 3 pi]`, and its action on arc-block amalgam norms.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{check_exponent, Error, Result};
use crate::means::lq_norm;

const LEFT: f64 = -PI;
const RIGHT: f64 = 3.0 * PI;

/// Nonnegative step function on a uniform partition of `[-pi, 3 pi]`, zero outside.
#[derive(Clone, Debug, PartialEq)]
pub struct StepFunction {
    values: Vec<f64>,
    prefix: Vec<f64>,
}

impl StepFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Invalid("step function needs at least one cell".into()));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Invalid("step function values must be finite and nonnegative".into()));
        }
        let h = (RIGHT - LEFT) / values.len() as f64;
        let mut prefix = Vec::with_capacity(values.len() + 1);
        prefix.push(0.0);
        for v in &values {
            prefix.push(prefix.last().unwrap() + v * h);
        }
        Ok(Self { values, prefix })
    }

    /// Samples `f` at cell midpoints.
    pub fn from_fn<F: Fn(f64) -> f64>(cells: usize, f: F) -> Result<Self> {
        let h = (RIGHT - LEFT) / cells as f64;
        Self::new((0..cells).map(|i| f(LEFT + h * (i as f64 + 0.5))).collect())
    }

    pub fn cells(&self) -> usize {
        self.values.len()
    }

    fn width(&self) -> f64 {
        (RIGHT - LEFT) / self.values.len() as f64
    }

    fn breakpoint(&self, i: usize) -> f64 {
        LEFT + self.width() * i as f64
    }

    /// Value of the cell to the right (`right = true`) or left of `x`.
    fn side_value(&self, x: f64, right: bool) -> f64 {
        let t = (x - LEFT) / self.width();
        let i = if right { t.floor() } else { t.ceil() - 1.0 };
        if i < 0.0 || i >= self.values.len() as f64 {
            0.0
        } else {
            self.values[i as usize]
        }
    }

    pub fn value_at(&self, x: f64) -> f64 {
        self.side_value(x, true)
    }

    /// `int_{-inf}^x F`.
    fn primitive(&self, x: f64) -> f64 {
        if x <= LEFT {
            return 0.0;
        }
        if x >= RIGHT {
            return *self.prefix.last().unwrap();
        }
        let t = (x - LEFT) / self.width();
        let i = (t.floor() as usize).min(self.values.len() - 1);
        self.prefix[i] + self.values[i] * (x - self.breakpoint(i))
    }

    /// `int_a^b F`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        self.primitive(b) - self.primitive(a)
    }

    /// `int_a^b F^p`, exact for the step function.
    fn power_integral(&self, a: f64, b: f64, p: f64) -> f64 {
        let h = self.width();
        let lo = a.max(LEFT);
        let hi = b.min(RIGHT);
        if hi <= lo {
            return 0.0;
        }
        let first = ((lo - LEFT) / h).floor() as usize;
        let last = (((hi - LEFT) / h).ceil() as usize).min(self.values.len());
        (first..last)
            .map(|i| {
                let c0 = self.breakpoint(i).max(lo);
                let c1 = self.breakpoint(i + 1).min(hi);
                (c1 - c0).max(0.0) * self.values[i].powf(p)
            })
            .sum()
    }
}

/// Uncentred maximal function `sup_{I ni x} |I|^{-1} int_I F`, computed exactly.
///
/// The average over `[a, b]` is a convex combination of the averages over
/// `[a, x]` and `[x, b]`, so only one-sided intervals matter, and for a step
/// function their optimal far endpoints sit on breakpoints.
pub fn maximal_function_at(f: &StepFunction, x: f64) -> f64 {
    let px = f.primitive(x);
    let mut best = f.side_value(x, true).max(f.side_value(x, false));
    for i in 0..=f.cells() {
        let b = f.breakpoint(i);
        if b == x {
            continue;
        }
        let avg = (f.primitive(b) - px) / (b - x);
        best = best.max(avg);
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AmalgamPair {
    pub input: f64,
    pub output: f64,
}

/// `l^q(L^p)` arc-block norms of `F` and of its maximal function, with
/// arcs of length `2 pi / N`.
///
/// The output is summed over arcs inside `[-9 pi, 11 pi]`; beyond that the
/// maximal function is below `4 pi |F|_1 / dist`, a negligible tail for
/// `q > 1`. The maximal function is integrated with a 32-point midpoint
/// rule per arc.
pub fn hl_maximal_amalgam(f: &StepFunction, p: f64, q: f64, n_arcs: usize) -> Result<AmalgamPair> {
    check_exponent("p", p, false)?;
    check_exponent("q", q, true)?;
    if n_arcs == 0 {
        return Err(Error::Invalid("number of arcs must be at least 1".into()));
    }
    let len = 2.0 * PI / n_arcs as f64;
    let first = (-9.0 * n_arcs as f64 / 2.0).floor() as i64;
    let last = (11.0 * n_arcs as f64 / 2.0).ceil() as i64;
    let sub = 32;
    let mut inputs = Vec::new();
    let mut outputs = Vec::new();
    for l in first..last {
        let a = len * l as f64;
        let b = a + len;
        inputs.push((f.power_integral(a, b, p) / (2.0 * PI)).powf(1.0 / p));
        let h = len / sub as f64;
        let s: f64 = (0..sub)
            .map(|k| maximal_function_at(f, a + h * (k as f64 + 0.5)).powf(p))
            .sum();
        outputs.push((s * h / (2.0 * PI)).powf(1.0 / p));
    }
    Ok(AmalgamPair {
        input: lq_norm(&inputs, q),
        output: lq_norm(&outputs, q),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Maximal function of the indicator of `[0, w]`.
    fn indicator_maximal(x: f64, w: f64) -> f64 {
        if (0.0..=w).contains(&x) {
            1.0
        } else if x > w {
            w / x
        } else {
            w / (w - x)
        }
    }

    #[test]
    fn maximal_function_of_an_indicator() {
        let n = 16;
        let w = 2.0 * PI / n as f64;
        // cell width 4 pi / 128 = w / 4
        let f = StepFunction::from_fn(128, |x| if (0.0..w).contains(&x) { 1.0 } else { 0.0 }).unwrap();
        for x in [-3.0, -0.5, 0.1, 0.3, 1.0, 2.5, 7.0, 12.0] {
            let got = maximal_function_at(&f, x);
            assert!((got - indicator_maximal(x, w)).abs() < 1e-12, "x = {x}: {got}");
        }
        let pair = hl_maximal_amalgam(&f, 2.0, 2.0, n).unwrap();
        assert!(pair.output.is_finite() && pair.output >= pair.input);
    }

    #[test]
    fn indicator_of_the_circle_dominates_pointwise() {
        let f = StepFunction::from_fn(64, |x| if (0.0..2.0 * PI).contains(&x) { 1.0 } else { 0.0 }).unwrap();
        for k in 0..200 {
            let x = -PI + 4.0 * PI * k as f64 / 200.0;
            assert!(maximal_function_at(&f, x) >= f.value_at(x) - 1e-15);
        }
        let pair = hl_maximal_amalgam(&f, 2.0, 3.0, 8).unwrap();
        assert!(pair.output >= pair.input);
    }

    #[test]
    fn rejects_negative_values() {
        assert!(StepFunction::new(vec![1.0, -1.0]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn maximal_dominates_every_interval_average(
            v in prop::collection::vec(0.0f64..5.0, 8..40),
            x in -PI..3.0 * PI,
            a in 0.0f64..2.0,
            b in 0.0f64..2.0,
        ) {
            let f = StepFunction::new(v).unwrap();
            let avg = f.integral(x - a, x + b) / (a + b).max(1e-12);
            prop_assert!(maximal_function_at(&f, x) >= avg * (1.0 - 1e-12) - 1e-12);
        }
    }
}
