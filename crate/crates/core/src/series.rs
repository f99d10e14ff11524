//! Truncated power series on the unit disc and their boundary samples.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{check_radius, Error, Result};

/// A polynomial `sum c_m z^m`, standing in for an analytic function on the disc.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerSeries {
    coeffs: Vec<Complex64>,
}

impl PowerSeries {
    /// Builds a series from its Taylor coefficients. At least one coefficient is required.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Invalid("a power series needs at least one coefficient".into()));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Invalid("power series coefficients must be finite".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn constant(c: Complex64) -> Self {
        Self { coeffs: vec![c] }
    }

    pub fn zero() -> Self {
        Self::constant(Complex64::new(0.0, 0.0))
    }

    /// `c z^n`.
    pub fn monomial(n: usize, c: Complex64) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
        coeffs[n] = c;
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Index of the last stored coefficient.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Index of the last nonzero coefficient (0 for the zero series).
    pub fn effective_degree(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|c| c.norm_sqr() > 0.0)
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm_sqr() == 0.0)
    }

    pub fn at_zero(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// Horner evaluation at a point of the closed disc.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn eval_polar(&self, r: f64, theta: f64) -> Complex64 {
        self.eval(Complex64::from_polar(r, theta))
    }

    /// Keeps the coefficients of index at most `degree`.
    pub fn truncate(&self, degree: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.truncate(degree + 1);
        Self { coeffs }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|&a| a * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = Complex64::new(0.0, 0.0);
        let coeffs = (0..n)
            .map(|m| {
                self.coeffs.get(m).copied().unwrap_or(zero)
                    + other.coeffs.get(m).copied().unwrap_or(zero)
            })
            .collect();
        Self { coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Adds `c * other` in place, growing the coefficient vector when needed.
    pub fn add_scaled_assign(&mut self, other: &Self, c: Complex64) {
        if other.coeffs.len() > self.coeffs.len() {
            self.coeffs.resize(other.coeffs.len(), Complex64::new(0.0, 0.0));
        }
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += c * b;
        }
    }

    /// `n`-th derivative.
    pub fn derivative(&self, n: usize) -> Self {
        if n == 0 {
            return self.clone();
        }
        if self.coeffs.len() <= n {
            return Self::zero();
        }
        let coeffs = (n..self.coeffs.len())
            .map(|m| {
                let falling: f64 = (0..n).map(|i| (m - i) as f64).product();
                self.coeffs[m] * falling
            })
            .collect();
        Self { coeffs }
    }

    /// The primitive vanishing at the origin.
    pub fn primitive(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Complex64::new(0.0, 0.0));
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(m, &c)| c / (m as f64 + 1.0)),
        );
        Self { coeffs }
    }

    /// Product truncated at `max_degree`.
    pub fn cauchy_product(&self, other: &Self, max_degree: usize) -> Self {
        let da = self.effective_degree();
        let db = other.effective_degree();
        let top = (da + db).min(max_degree);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); top + 1];
        for (i, &a) in self.coeffs.iter().enumerate().take(da.min(top) + 1) {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let jmax = (top - i).min(db);
            for (slot, &b) in coeffs[i..=i + jmax].iter_mut().zip(&other.coeffs[..=jmax]) {
                *slot += a * b;
            }
        }
        Self { coeffs }
    }

    /// Full product, no truncation.
    pub fn mul(&self, other: &Self) -> Self {
        self.cauchy_product(other, usize::MAX / 2)
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Samples `f(r e^{i theta_k})` with `theta_k = 2 pi (k + offset) / n`.
///
/// Coefficients are folded modulo `n` before a single inverse FFT, so the
/// samples are exact for any degree.
pub fn sample_circle(f: &PowerSeries, r: f64, n: usize, offset: f64) -> Result<Vec<Complex64>> {
    check_radius(r)?;
    if n == 0 {
        return Err(Error::Invalid("sample count must be positive".into()));
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    let mut rm = 1.0;
    let step = 2.0 * PI * offset / n as f64;
    for (m, &c) in f.coeffs.iter().enumerate() {
        if rm == 0.0 {
            break;
        }
        let twist = if offset == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::from_polar(1.0, step * m as f64)
        };
        buf[m % n] += c * rm * twist;
        rm *= r;
    }
    PLANNER.with(|p| {
        let fft = p.borrow_mut().plan_fft_inverse(n);
        fft.process(&mut buf);
    });
    Ok(buf)
}

/// Samples on the grid `theta_k = 2 pi k / n`.
pub fn evaluate_on_circle(f: &PowerSeries, r: f64, n: usize) -> Result<Vec<Complex64>> {
    sample_circle(f, r, n, 0.0)
}

/// `sum_k c_k z^{2^{k + k0}}`.
pub fn lacunary_series(k0: u32, coeffs: &[Complex64]) -> Result<PowerSeries> {
    let top = k0 as usize + coeffs.len();
    if coeffs.is_empty() || top > 40 {
        return Err(Error::Invalid(format!(
            "lacunary series needs 1..={} terms above 2^{k0}",
            40usize.saturating_sub(k0 as usize)
        )));
    }
    let degree = 1usize << (top - 1);
    let mut out = vec![Complex64::new(0.0, 0.0); degree + 1];
    for (k, &c) in coeffs.iter().enumerate() {
        out[1usize << (k + k0 as usize)] = c;
    }
    PowerSeries::new(out)
}

/// `sum_{m<=degree} (m+1)^{power-1} z^m`-style truncations of `(1-z)^{-power}` for power 1 or 2.
pub fn geometric_kernel(power: u32, degree: usize) -> Result<PowerSeries> {
    let coeff = |m: usize| match power {
        1 => Ok(1.0),
        2 => Ok(m as f64 + 1.0),
        _ => Err(Error::Invalid(format!("kernel power must be 1 or 2, got {power}"))),
    };
    let c: Result<Vec<f64>> = (0..=degree).map(coeff).collect();
    PowerSeries::from_real(&c?)
}

/// `log(1/(1-z)) = sum_{m>=1} z^m / m`, truncated.
pub fn log_kernel(degree: usize) -> PowerSeries {
    let mut c = vec![0.0; degree + 1];
    for (m, slot) in c.iter_mut().enumerate().skip(1) {
        *slot = 1.0 / m as f64;
    }
    PowerSeries::from_real(&c).expect("finite coefficients")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn one_plus_z_on_the_circle() {
        let f = PowerSeries::from_real(&[1.0, 1.0]).unwrap();
        let v = evaluate_on_circle(&f, 1.0, 4).unwrap();
        let want = [c(2.0, 0.0), c(1.0, 1.0), c(0.0, 0.0), c(1.0, -1.0)];
        for (a, b) in v.iter().zip(want) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn folding_matches_horner_for_high_degree() {
        let f = lacunary_series(3, &[c(1.0, 0.5), c(-0.3, 0.0), c(0.7, 0.2)]).unwrap();
        let n = 8;
        for offset in [0.0, 0.5] {
            let v = sample_circle(&f, 0.9, n, offset).unwrap();
            for (k, val) in v.iter().enumerate() {
                let theta = 2.0 * PI * (k as f64 + offset) / n as f64;
                assert!((val - f.eval_polar(0.9, theta)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn derivative_of_z_cubed_is_three_z_squared() {
        let f = PowerSeries::monomial(3, c(1.0, 0.0));
        let d = f.derivative(1);
        assert_eq!(d.coeffs(), &[c(0.0, 0.0), c(0.0, 0.0), c(3.0, 0.0)]);
    }

    #[test]
    fn primitive_of_one_is_z() {
        let p = PowerSeries::constant(c(1.0, 0.0)).primitive();
        assert_eq!(p.coeffs(), &[c(0.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn lacunary_example() {
        let f = lacunary_series(2, &[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let nz: Vec<usize> = f
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, v)| v.norm() > 0.0)
            .map(|(m, _)| m)
            .collect();
        assert_eq!(nz, vec![4, 8, 16]);
        assert_eq!(f.degree(), 16);
    }

    #[test]
    fn radius_outside_closed_disc_is_rejected() {
        let f = PowerSeries::monomial(1, c(1.0, 0.0));
        assert_eq!(evaluate_on_circle(&f, 1.5, 8), Err(Error::Radius(1.5)));
    }

    #[test]
    fn empty_series_is_rejected() {
        assert!(PowerSeries::new(vec![]).is_err());
    }

    #[test]
    fn truncated_product_drops_high_terms() {
        let f = PowerSeries::from_real(&[1.0, 1.0]).unwrap();
        let sq = f.cauchy_product(&f, 1);
        assert_eq!(sq.coeffs(), &[c(1.0, 0.0), c(2.0, 0.0)]);
    }

    fn series_strategy() -> impl Strategy<Value = PowerSeries> {
        prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..24)
            .prop_map(|v| PowerSeries::new(v.into_iter().map(|(a, b)| c(a, b)).collect()).unwrap())
    }

    proptest! {
        #[test]
        fn primitive_then_derivative_is_identity(f in series_strategy()) {
            let back = f.primitive().derivative(1);
            for (a, b) in back.coeffs().iter().zip(f.coeffs()) {
                prop_assert!((a - b).norm() < 1e-12);
            }
        }

        #[test]
        fn cauchy_product_commutes(f in series_strategy(), g in series_strategy()) {
            let a = f.mul(&g);
            let b = g.mul(&f);
            prop_assert_eq!(a.degree(), b.degree());
            for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
                prop_assert!((x - y).norm() < 1e-12);
            }
        }

        #[test]
        fn parseval_on_circle_samples(f in series_strategy(), r in 0.0f64..=1.0) {
            let n = 64;
            let v = evaluate_on_circle(&f, r, n).unwrap();
            let quad: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>() / n as f64;
            let exact: f64 = f.coeffs().iter().enumerate()
                .map(|(m, a)| a.norm_sqr() * r.powi(2 * m as i32)).sum();
            prop_assert!((quad - exact).abs() <= 1e-10 * exact.max(1.0));
        }

        #[test]
        fn samples_agree_with_horner(f in series_strategy(), r in 0.0f64..=1.0) {
            let n = 16;
            let v = sample_circle(&f, r, n, 0.5).unwrap();
            for (k, val) in v.iter().enumerate() {
                let theta = 2.0 * PI * (k as f64 + 0.5) / n as f64;
                prop_assert!((val - f.eval_polar(r, theta)).norm() < 1e-10);
            }
        }
    }
}
