//! Integral means, arc means, and the two Hardy–Littlewood bounds.
//!
//! All angular integrals use the normalised measure `d theta / 2 pi` and
//! the midpoint grid `theta_k = 2 pi (k + 1/2) / n`. Arc means with `N`
//! arcs sample each arc on its own midpoint subgrid; when `N` divides the
//! circle sample count the two grids coincide, so `sum_l v_l^p` equals
//! `M_p(r, f)^p` to rounding.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{check_exponent, check_radius, Error, Result};
use crate::grid::Resolution;
use crate::series::{sample_circle, PowerSeries};

/// `(mean |v|^p)^{1/p}`, scaled to avoid overflow.
pub(crate) fn power_mean(abs: &[f64], p: f64) -> f64 {
    let m = abs.iter().copied().fold(0.0, f64::max);
    if m == 0.0 {
        return 0.0;
    }
    if p == f64::INFINITY {
        return m;
    }
    let s: f64 = abs.iter().map(|&a| (a / m).powf(p)).sum();
    m * (s / abs.len() as f64).powf(1.0 / p)
}

/// `M_2(r, f)` from Parseval.
pub(crate) fn parseval_mean(f: &PowerSeries, r: f64) -> f64 {
    let r2 = r * r;
    let mut w = 1.0;
    let mut acc = 0.0;
    for c in f.coeffs() {
        if w == 0.0 {
            break;
        }
        acc += c.norm_sqr() * w;
        w *= r2;
    }
    acc.sqrt()
}

/// Sampled maximum of `|f|` on `|z| = r`, polished by golden-section search
/// around the best sample.
pub(crate) fn circle_sup(f: &PowerSeries, r: f64, n: usize) -> Result<f64> {
    if r == 0.0 || f.effective_degree() == 0 {
        return Ok(f.eval_polar(r, 0.0).norm());
    }
    let samples = sample_circle(f, r, n, 0.5)?;
    let (k, best) = samples
        .iter()
        .map(|z| z.norm())
        .enumerate()
        .fold((0, 0.0), |acc, (k, v)| if v > acc.1 { (k, v) } else { acc });
    let h = 2.0 * PI / n as f64;
    let centre = h * (k as f64 + 0.5);
    let polished = golden_max(|t| f.eval_polar(r, t).norm(), centre - h, centre + h, 60);
    Ok(best.max(polished))
}

/// Maximum of a unimodal function on `[a, b]` by golden-section search.
pub(crate) fn golden_max<F: Fn(f64) -> f64>(g: F, mut a: f64, mut b: f64, iters: usize) -> f64 {
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let mut g1 = g(x1);
    let mut g2 = g(x2);
    for _ in 0..iters {
        if g1 < g2 {
            a = x1;
            x1 = x2;
            g1 = g2;
            x2 = a + phi * (b - a);
            g2 = g(x2);
        } else {
            b = x2;
            x2 = x1;
            g2 = g1;
            x1 = b - phi * (b - a);
            g1 = g(x1);
        }
    }
    g1.max(g2)
}

/// `M_p(r, f)` at the default resolution.
pub fn integral_mean(f: &PowerSeries, r: f64, p: f64) -> Result<f64> {
    integral_mean_at(f, r, p, &Resolution::default())
}

/// `M_p(r, f)`; `p = 2` is exact via Parseval, `p = inf` is the polished maximum.
pub fn integral_mean_at(f: &PowerSeries, r: f64, p: f64, res: &Resolution) -> Result<f64> {
    check_exponent("p", p, true)?;
    check_radius(r)?;
    let n = res.circle_samples(f.effective_degree());
    if p == f64::INFINITY {
        return circle_sup(f, r, n);
    }
    if p == 2.0 {
        return Ok(parseval_mean(f, r));
    }
    if r == 0.0 {
        return Ok(f.at_zero().norm());
    }
    let abs: Vec<f64> = sample_circle(f, r, n, 0.5)?.iter().map(|z| z.norm()).collect();
    Ok(power_mean(&abs, p))
}

/// The vector `(f_[p](r))_{N,l}`, `l = 0..N`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArcMeanVector {
    pub radius: f64,
    pub p: f64,
    pub values: Vec<f64>,
}

impl ArcMeanVector {
    pub fn n_arcs(&self) -> usize {
        self.values.len()
    }

    /// `(sum_l v_l^p)^{1/p}`, i.e. `M_p` on the same nodes as the arcs.
    pub fn total_mean(&self) -> f64 {
        lq_norm(&self.values, self.p)
    }

    pub fn lq_norm(&self, q: f64) -> f64 {
        lq_norm(&self.values, q)
    }

    fn from_abs(radius: f64, p: f64, abs: &[f64], n_arcs: usize) -> Self {
        let per = abs.len() / n_arcs;
        let total = abs.len() as f64;
        let values = abs
            .chunks(per)
            .map(|arc| {
                if p == f64::INFINITY {
                    arc.iter().copied().fold(0.0, f64::max)
                } else {
                    // mean over the arc times its measure 1/N
                    power_mean(arc, p) * (arc.len() as f64 / total).powf(1.0 / p)
                }
            })
            .collect();
        Self { radius, p, values }
    }
}

/// Arc means at the default resolution.
pub fn arc_means(f: &PowerSeries, r: f64, p: f64, n_arcs: usize) -> Result<ArcMeanVector> {
    arc_means_at(f, r, p, n_arcs, &Resolution::default())
}

pub fn arc_means_at(
    f: &PowerSeries,
    r: f64,
    p: f64,
    n_arcs: usize,
    res: &Resolution,
) -> Result<ArcMeanVector> {
    check_exponent("p", p, true)?;
    check_radius(r)?;
    if n_arcs == 0 {
        return Err(Error::Invalid("number of arcs must be at least 1".into()));
    }
    let per = res.arc_samples(f.effective_degree(), n_arcs);
    let abs: Vec<f64> = sample_circle(f, r, per * n_arcs, 0.5)?
        .iter()
        .map(|z| z.norm())
        .collect();
    Ok(ArcMeanVector::from_abs(r, p, &abs, n_arcs))
}

/// `(sum |v|^q)^{1/q}`, or the maximum for `q = inf`. Scaled against overflow.
pub fn lq_norm(values: &[f64], q: f64) -> f64 {
    let m = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if m == 0.0 || q == f64::INFINITY {
        return m;
    }
    let s: f64 = values.iter().map(|v| (v.abs() / m).powf(q)).sum();
    m * s.powf(1.0 / q)
}

/// Integer part, snapping values within 1e-9 (relative) of an integer onto it.
///
/// `1 / (0.95 - 0.9)` evaluates to 19.99999999999998 in floating point.
pub fn entier(x: f64) -> usize {
    let n = x.round();
    if (x - n).abs() <= 1e-9 * x.abs().max(1.0) {
        n as usize
    } else {
        x.floor() as usize
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HlReport {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub rho: f64,
    pub n_arcs: usize,
    pub lhs: f64,
    pub rhs_classical: f64,
    pub rhs_improved: f64,
    pub constant_classical: f64,
    pub constant_improved: f64,
}

fn ratio(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a / b
    }
}

/// Compares `M_q(r, f)` with the classical and the arc-mean right-hand sides.
pub fn hl_report(f: &PowerSeries, p: f64, q: f64, r: f64, rho: f64) -> Result<HlReport> {
    hl_report_at(f, p, q, r, rho, &Resolution::default())
}

pub fn hl_report_at(
    f: &PowerSeries,
    p: f64,
    q: f64,
    r: f64,
    rho: f64,
    res: &Resolution,
) -> Result<HlReport> {
    check_exponent("p", p, false)?;
    check_exponent("q", q, true)?;
    if p >= q {
        return Err(Error::Invalid(format!("need p < q, got p = {p}, q = {q}")));
    }
    check_radius(rho)?;
    if !(0.0 <= r && r < rho) {
        return Err(Error::Invalid(format!("need 0 <= r < rho, got r = {r}, rho = {rho}")));
    }
    let n_arcs = entier(1.0 / (rho - r)).max(1);
    let lhs = integral_mean_at(f, r, q, res)?;
    let arcs = arc_means_at(f, rho, p, n_arcs, res)?;
    let scale = (rho - r).powf(1.0 / p - 1.0 / q);
    let rhs_classical = arcs.total_mean() / scale;
    let rhs_improved = arcs.lq_norm(q) / scale;
    Ok(HlReport {
        p,
        q,
        r,
        rho,
        n_arcs,
        lhs,
        rhs_classical,
        rhs_improved,
        constant_classical: ratio(lhs, rhs_classical),
        constant_improved: ratio(lhs, rhs_improved),
    })
}

/// Radii `rho (1 - 2^{-k})`, `k < steps`, followed by `rho` itself.
pub fn radial_max_radii(rho: f64, steps: usize) -> Vec<f64> {
    let mut radii: Vec<f64> = (0..steps)
        .map(|k| rho * (1.0 - (-(k as f64)).exp2()))
        .collect();
    radii.push(rho);
    radii
}

/// Arc means of the radial maximal function `sup_{r' <= rho} |f(r' e^{i theta})|`.
///
/// The supremum runs over [`radial_max_radii`], a nested grid, so adding
/// steps can only increase the result.
pub fn radial_maximal_arc_means(
    f: &PowerSeries,
    rho: f64,
    p: f64,
    n_arcs: usize,
    steps: usize,
) -> Result<ArcMeanVector> {
    radial_maximal_arc_means_at(f, rho, p, n_arcs, steps, &Resolution::default())
}

pub fn radial_maximal_arc_means_at(
    f: &PowerSeries,
    rho: f64,
    p: f64,
    n_arcs: usize,
    steps: usize,
    res: &Resolution,
) -> Result<ArcMeanVector> {
    check_exponent("p", p, true)?;
    check_radius(rho)?;
    if n_arcs == 0 || steps == 0 {
        return Err(Error::Invalid("arcs and radial steps must be positive".into()));
    }
    let per = res.arc_samples(f.effective_degree(), n_arcs);
    let total = per * n_arcs;
    let mut sup = vec![0.0f64; total];
    for r in radial_max_radii(rho, steps) {
        for (s, z) in sup.iter_mut().zip(sample_circle(f, r, total, 0.5)?) {
            *s = s.max(z.norm());
        }
    }
    Ok(ArcMeanVector::from_abs(rho, p, &sup, n_arcs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{geometric_kernel, lacunary_series};
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn one() -> PowerSeries {
        PowerSeries::constant(Complex64::new(1.0, 0.0))
    }

    fn z_pow(n: usize) -> PowerSeries {
        PowerSeries::monomial(n, Complex64::new(1.0, 0.0))
    }

    /// Direct midpoint rule with Horner evaluation, independent of the FFT path.
    fn dense_mean(f: &PowerSeries, r: f64, p: f64, n: usize) -> f64 {
        let s: f64 = (0..n)
            .map(|k| {
                let t = 2.0 * PI * (k as f64 + 0.5) / n as f64;
                f.eval_polar(r, t).norm().powf(p)
            })
            .sum();
        (s / n as f64).powf(1.0 / p)
    }

    #[test]
    fn constant_function_means() {
        for p in [0.5, 1.0, 2.0, 4.0, f64::INFINITY] {
            assert!((integral_mean(&one(), 0.7, p).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn monomial_means_are_r_to_the_n() {
        for p in [0.5, 1.0, 3.0, f64::INFINITY] {
            let m = integral_mean(&z_pow(3), 0.5, p).unwrap();
            assert!((m - 0.125).abs() < 1e-12, "p = {p}: {m}");
        }
    }

    #[test]
    fn one_plus_z_two_mean() {
        let f = PowerSeries::from_real(&[1.0, 1.0]).unwrap();
        let m = integral_mean(&f, 0.5, 2.0).unwrap();
        assert!((m - 1.25f64.sqrt()).abs() < 1e-12);
        // the sampled path agrees with Parseval
        let sampled = dense_mean(&f, 0.5, 2.0, 64);
        assert!((m - sampled).abs() < 1e-12);
    }

    #[test]
    fn p_equal_zero_is_rejected() {
        assert!(matches!(
            integral_mean(&one(), 0.5, 0.0),
            Err(Error::Exponent { name: "p", .. })
        ));
    }

    #[test]
    fn arc_means_of_one() {
        let v = arc_means(&one(), 1.0, 2.0, 4).unwrap();
        for x in &v.values {
            assert!((x - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn arc_means_of_z_to_the_n() {
        for p in [1.0, 2.0, 3.0] {
            let v = arc_means(&z_pow(5), 1.0, p, 8).unwrap();
            for x in &v.values {
                assert!((x - 8f64.powf(-1.0 / p)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_arcs_rejected() {
        assert!(arc_means(&one(), 1.0, 2.0, 0).is_err());
    }

    #[test]
    fn entier_guards_floating_error() {
        assert_eq!(entier(1.0 / (0.95 - 0.9)), 20);
        assert_eq!(entier(1.0 / (1.0 - 0.9)), 10);
        assert_eq!(entier(2.5), 2);
    }

    #[test]
    fn hl_report_for_constant_function() {
        let rep = hl_report(&one(), 1.0, 2.0, 0.5, 1.0).unwrap();
        assert_eq!(rep.n_arcs, 2);
        assert!((rep.rhs_improved - 1.0).abs() < 1e-12);
        // classical side: M_1(1, 1) / (1/2)^{1/2}
        assert!((rep.rhs_classical - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn hl_report_needs_p_below_q() {
        assert!(hl_report(&one(), 2.0, 2.0, 0.5, 1.0).is_err());
        assert!(hl_report(&one(), 1.0, 2.0, 0.9, 0.8).is_err());
    }

    #[test]
    fn hl_report_for_truncated_kernel_matches_dense_quadrature() {
        let f = geometric_kernel(1, 512).unwrap();
        let rep = hl_report(&f, 1.0, 2.0, 0.9, 0.95).unwrap();
        assert_eq!(rep.n_arcs, 20);
        // lhs: M_2 at r = 0.9 from a direct sum, rhs: arcs from a dense Horner grid
        let lhs: f64 = (0..=512).map(|m| 0.81f64.powi(m)).sum::<f64>().sqrt();
        assert!((rep.lhs - lhs).abs() < 1e-10 * lhs);
        let n = 1 << 14;
        let per = n / 16;
        let mut arcs = Vec::new();
        for l in 0..20 {
            let a = 2.0 * PI * l as f64 / 20.0;
            let h = 2.0 * PI / 20.0 / per as f64;
            let s: f64 = (0..per)
                .map(|k| f.eval_polar(0.95, a + h * (k as f64 + 0.5)).norm())
                .sum();
            arcs.push(s * h / (2.0 * PI));
        }
        let rhs = lq_norm(&arcs, 2.0) / 0.05f64.powf(0.5);
        assert!((rep.rhs_improved - rhs).abs() < 1e-6 * rhs, "{} vs {rhs}", rep.rhs_improved);
    }

    #[test]
    fn radial_maximal_of_monomial() {
        let v = radial_maximal_arc_means(&z_pow(4), 0.8, 2.0, 4, 10).unwrap();
        for x in &v.values {
            assert!((x - 0.8f64.powi(4) * 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn radial_maximal_is_monotone_in_steps() {
        let f = PowerSeries::from_real(&[1.0, -1.5, 0.0, 0.7]).unwrap();
        let mut prev = vec![0.0; 8];
        for steps in [1, 2, 4, 8, 16] {
            let v = radial_maximal_arc_means(&f, 1.0, 2.0, 8, steps).unwrap();
            for (a, b) in v.values.iter().zip(&prev) {
                assert!(*a >= *b - 1e-15);
            }
            prev = v.values;
        }
    }

    fn small_series() -> impl Strategy<Value = PowerSeries> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..40).prop_map(|v| {
            PowerSeries::new(v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn partition_consistency(
            f in small_series(),
            r in 0.0f64..=1.0,
            p in prop::sample::select(vec![0.5, 1.0, 2.0, 4.0]),
            n in prop::sample::select(vec![1usize, 2, 8, 64]),
        ) {
            let v = arc_means(&f, r, p, n).unwrap();
            let m = integral_mean(&f, r, p).unwrap();
            let lhs: f64 = v.values.iter().map(|x| x.powf(p)).sum();
            prop_assert!((lhs - m.powf(p)).abs() <= 1e-8 * m.powf(p).max(1e-300));
        }

        #[test]
        fn means_increase_with_radius(f in small_series(), a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let (r1, r2) = if a < b { (a, b) } else { (b, a) };
            for p in [0.5, 1.0, 2.0, f64::INFINITY] {
                let m1 = integral_mean(&f, r1, p).unwrap();
                let m2 = integral_mean(&f, r2, p).unwrap();
                prop_assert!(m1 <= m2 * (1.0 + 1e-9) + 1e-14);
            }
        }

        #[test]
        fn lq_norm_is_monotone_in_q(v in prop::collection::vec(0.0f64..10.0, 1..50)) {
            let mut prev = f64::INFINITY;
            for q in [0.5, 1.0, 2.0, 4.0, f64::INFINITY] {
                let n = lq_norm(&v, q);
                prop_assert!(n <= prev * (1.0 + 1e-12));
                prev = n;
            }
        }

        #[test]
        fn improved_rhs_never_exceeds_classical(
            f in small_series(),
            r in 0.0f64..0.9,
            gap in 0.01f64..0.1,
            q in prop::sample::select(vec![2.0, 4.0, f64::INFINITY]),
        ) {
            let rep = hl_report(&f, 1.0, q, r, (r + gap).min(1.0)).unwrap();
            prop_assert!(rep.rhs_improved <= rep.rhs_classical * (1.0 + 1e-12));
        }
    }

    #[test]
    fn lacunary_arc_bound_at_the_boundary() {
        let f = lacunary_series(4, &[Complex64::new(1.0, 0.0); 6]).unwrap();
        let h2 = integral_mean(&f, 1.0, 2.0).unwrap();
        for n in [2, 8, 32] {
            let v = arc_means(&f, 1.0, 2.0, n).unwrap();
            assert!(v.lq_norm(4.0) <= h2 * (1.0 + 1e-9));
        }
    }
}
