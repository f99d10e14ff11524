//! Weighted mixed norms `(int_0^1 M_p(r, f)^q omega(r) dr)^{1/q}` and the
//! exponent bookkeeping shared by the paraproduct code.
//!
//! The radial integral runs over geometric cells in `1 - r` with a
//! Gauss–Legendre rule in each. The last cell `[r_max, 1)` is integrated
//! exactly against `omega` after replacing `M_p^q` by its linear interpolant
//! between `r_max` and `1`, using the weight's zeroth and first tail
//! moments.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_exponent, Error, Result};
use crate::grid::Resolution;
use crate::means::{circle_sup, integral_mean_at};
use crate::quad;
use crate::series::{sample_circle, PowerSeries};
use crate::weights::{block_distance, DoublingWeight, RadialWeight};

/// The four exponents `(p, q)` of the source space and `(s, t)` of the target.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentProfile {
    pub p: f64,
    pub q: f64,
    pub s: f64,
    pub t: f64,
}

/// Which of `p <= s` / `q <= t` hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProfileCase {
    /// `p <= s`, `q <= t`
    A,
    /// `s < p`, `q <= t`
    B,
    /// `p <= s`, `t < q`
    C,
    /// `s < p`, `t < q`
    D,
}

impl ProfileCase {
    pub fn label(self) -> &'static str {
        match self {
            Self::A => "a",
            Self::B => "b",
            Self::C => "c",
            Self::D => "d",
        }
    }
}

/// `x / (x - 1)` for `x > 1`, infinity for `0 < x <= 1`.
pub fn conjugate(x: f64) -> Result<f64> {
    check_exponent("x", x, true)?;
    Ok(if x <= 1.0 {
        f64::INFINITY
    } else if x.is_infinite() {
        1.0
    } else {
        x / (x - 1.0)
    })
}

impl ExponentProfile {
    pub fn new(p: f64, q: f64, s: f64, t: f64) -> Result<Self> {
        let me = Self { p, q, s, t };
        me.validate()?;
        Ok(me)
    }

    pub fn validate(&self) -> Result<()> {
        check_exponent("p", self.p, false)?;
        check_exponent("q", self.q, false)?;
        check_exponent("s", self.s, false)?;
        check_exponent("t", self.t, false)
    }

    /// `1 / p~ = 1/s - 1/p`; negative in cases (a) and (c).
    pub fn inv_p_tilde(&self) -> f64 {
        1.0 / self.s - 1.0 / self.p
    }

    /// `1 / q~ = 1/t - 1/q`.
    pub fn inv_q_tilde(&self) -> f64 {
        1.0 / self.t - 1.0 / self.q
    }

    pub fn p_tilde(&self) -> f64 {
        1.0 / self.inv_p_tilde()
    }

    pub fn q_tilde(&self) -> f64 {
        1.0 / self.inv_q_tilde()
    }

    pub fn case(&self) -> ProfileCase {
        match (self.p <= self.s, self.q <= self.t) {
            (true, true) => ProfileCase::A,
            (false, true) => ProfileCase::B,
            (true, false) => ProfileCase::C,
            (false, false) => ProfileCase::D,
        }
    }

    /// `(s (p/s)', t (q/t)')`, the exponents of the pointwise multiplier norm.
    pub fn multiplier_exponents(&self) -> (f64, f64) {
        let u = self.s * conjugate(self.p / self.s).expect("validated exponents");
        let v = self.t * conjugate(self.q / self.t).expect("validated exponents");
        (u, v)
    }
}

/// Value of a weighted radial integral, with an upper bound on the part
/// coming from the final cell.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RadialIntegral {
    pub value: f64,
    pub tail_bound: f64,
    pub divergent: bool,
}

/// `(int_0^1 m(r)^q omega(r) dr)^{1/q}` for a nondecreasing `m`.
pub(crate) fn radial_lq<F>(w: &RadialWeight, q: f64, res: &Resolution, m: F) -> Result<RadialIntegral>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    check_exponent("q", q, false)?;
    let at_one = m(1.0)?;
    if at_one == 0.0 {
        return Ok(RadialIntegral {
            value: 0.0,
            tail_bound: 0.0,
            divergent: false,
        });
    }
    if !w.is_integrable() {
        return Ok(RadialIntegral {
            value: f64::INFINITY,
            tail_bound: f64::INFINITY,
            divergent: true,
        });
    }
    let (gx, gw) = quad::rule(res.gl_order);
    let cuts = res.radial_distances();
    let mut nodes = Vec::with_capacity(cuts.len() * gx.len());
    for c in cuts.windows(2) {
        let (hi, lo) = (c[0], c[1]);
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        for (xi, wi) in gx.iter().zip(gw) {
            let x = mid + half * xi;
            nodes.push((x, wi * half * w.density_at_distance(x)));
        }
    }
    let values: Vec<f64> = nodes
        .par_iter()
        .map(|&(x, _)| m(1.0 - x))
        .collect::<Result<Vec<_>>>()?;
    let body: f64 = nodes
        .iter()
        .zip(&values)
        .map(|(&(_, wt), v)| wt * v.powf(q))
        .sum();
    let x_max = *cuts.last().unwrap();
    let f0 = at_one.powf(q);
    let f1 = m(1.0 - x_max)?.powf(q);
    let m0 = w.hat_at_distance(x_max);
    let m1 = w.tail_moment(x_max);
    let tail = f0 * m0 + (f1 - f0) * m1 / x_max;
    Ok(RadialIntegral {
        value: (body + tail).powf(1.0 / q),
        tail_bound: m0 * f0.max(f1),
        divergent: false,
    })
}

/// `||f||_{A^{p,q}_omega}` at the default resolution.
pub fn apq_norm(f: &PowerSeries, p: f64, q: f64, w: &RadialWeight) -> Result<f64> {
    Ok(apq_norm_at(f, p, q, w, &Resolution::default())?.value)
}

pub fn apq_norm_at(
    f: &PowerSeries,
    p: f64,
    q: f64,
    w: &RadialWeight,
    res: &Resolution,
) -> Result<RadialIntegral> {
    check_exponent("p", p, true)?;
    check_exponent("q", q, false)?;
    w.validate()?;
    radial_lq(w, q, res, |r| integral_mean_at(f, r, p, res))
}

/// `||f||_{H^p}`. Means increase with the radius, so for `p >= 1` this is
/// the boundary mean; for `p < 1` the maximum over a radial grid ending at 1
/// is reported.
pub fn hp_norm(f: &PowerSeries, p: f64) -> Result<f64> {
    check_exponent("p", p, true)?;
    let res = Resolution::default();
    if p >= 1.0 {
        return integral_mean_at(f, 1.0, p, &res);
    }
    let mut best = integral_mean_at(f, 1.0, p, &res)?;
    for k in 0..=20 {
        best = best.max(integral_mean_at(f, 1.0 - (-(k as f64)).exp2(), p, &res)?);
    }
    Ok(best)
}

/// Derivative-side norm `(int M_p(r, f')^q (1-r)^q omega dr + |f(0)|^q)^{1/q}`.
pub fn littlewood_paley_norm(
    f: &PowerSeries,
    p: f64,
    q: f64,
    w: &DoublingWeight,
    res: &Resolution,
) -> Result<f64> {
    check_exponent("p", p, true)?;
    check_exponent("q", q, false)?;
    let d = f.derivative(1);
    let shifted = w.weight().shifted(q);
    let body = radial_lq(&shifted, q, res, |r| integral_mean_at(&d, r, p, res))?;
    Ok((body.value.powf(q) + f.at_zero().norm().powf(q)).powf(1.0 / q))
}

/// `(int_0^1 M_inf(r, g)^{q~} (1 - r)^{power q~} omega dr)^{1/q~}`.
///
/// `power` may be negative; the integral is then flagged divergent whenever
/// the shifted weight is not integrable and `g` is not identically zero.
pub fn linf_q_norm(
    g: &PowerSeries,
    power: f64,
    q_tilde: f64,
    w: &RadialWeight,
    res: &Resolution,
) -> Result<RadialIntegral> {
    check_exponent("q~", q_tilde, false)?;
    if !power.is_finite() {
        return Err(Error::Invalid(format!("power must be finite, got {power}")));
    }
    let shifted = w.shifted(power * q_tilde);
    let n = res.circle_samples(g.effective_degree());
    radial_lq(&shifted, q_tilde, res, |r| circle_sup(g, r, n))
}

/// The blocks `Q_{j,l} = {r_{j-1} <= |z| < r_j, arg z in I_{K^{j+2}, l}}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BlockGrid {
    pub k: u32,
    pub j_max: usize,
}

impl BlockGrid {
    pub fn new(k: u32, j_max: usize) -> Result<Self> {
        if k < 2 || j_max == 0 {
            return Err(Error::Invalid(format!("need K >= 2 and j_max >= 1, got K = {k}, j_max = {j_max}")));
        }
        if (k as f64).powi(j_max as i32 + 2) > 1e7 {
            return Err(Error::Invalid("block grid too fine: K^(j_max+2) exceeds 1e7 arcs".into()));
        }
        Ok(Self { k, j_max })
    }

    pub fn n_arcs(&self, j: usize) -> usize {
        (self.k as usize).pow(j as u32 + 2)
    }

    /// `(r_{j-1}, r_j)`.
    pub fn ring(&self, j: usize) -> (f64, f64) {
        (1.0 - block_distance(self.k, j - 1), 1.0 - block_distance(self.k, j))
    }

    pub fn ring_area(&self, j: usize) -> f64 {
        let (a, b) = self.ring(j);
        std::f64::consts::PI * (b * b - a * a)
    }

    pub fn block_area(&self, j: usize, _l: usize) -> f64 {
        self.ring_area(j) / self.n_arcs(j) as f64
    }
}

/// `|| sup_{Q_{j,l}} |f^(n)| K^{-j(n + 1/p)} omega_hat(r_j)^{1/q} ||_{l^{p,q}}`.
///
/// Each block is sampled on a 3x3 grid (both radial edges and the radial
/// midpoint, both angular edges and the angular midpoint), and the best
/// node is polished with a 5x5 grid on the surrounding quarter block.
pub fn block_sup_norm(
    f: &PowerSeries,
    n: usize,
    grid: &BlockGrid,
    p: f64,
    q: f64,
    w: &RadialWeight,
) -> Result<f64> {
    check_exponent("p", p, true)?;
    check_exponent("q", q, true)?;
    let d = f.derivative(n);
    let k = grid.k as f64;
    let mut rows = Vec::with_capacity(grid.j_max);
    for j in 1..=grid.j_max {
        let big_n = grid.n_arcs(j);
        let (ra, rb) = grid.ring(j);
        let radii = [ra, 0.5 * (ra + rb), rb];
        let rings: Vec<Vec<f64>> = radii
            .iter()
            .map(|&r| Ok(sample_circle(&d, r, 2 * big_n, 0.0)?.iter().map(|z| z.norm()).collect()))
            .collect::<Result<_>>()?;
        let dr = 0.5 * (rb - ra);
        let dt = std::f64::consts::PI / big_n as f64;
        let factor = k.powf(-(j as f64) * (n as f64 + 1.0 / p)) * w.hat_at_distance(block_distance(grid.k, j)).powf(1.0 / q);
        let mut row = Vec::with_capacity(big_n);
        for l in 0..big_n {
            let mut best = 0.0f64;
            let mut arg = (0, 0);
            for (ir, ring) in rings.iter().enumerate() {
                for it in 0..3 {
                    let v = ring[(2 * l + it) % (2 * big_n)];
                    if v > best {
                        best = v;
                        arg = (ir, it);
                    }
                }
            }
            let r0 = radii[arg.0];
            let t0 = dt * (2 * l + arg.1) as f64;
            for a in 0..5 {
                for b in 0..5 {
                    let r = (r0 + dr * (a as f64 / 4.0 - 0.5)).clamp(ra, rb);
                    let t = (t0 + dt * (b as f64 / 4.0 - 0.5)).clamp(2.0 * dt * l as f64, 2.0 * dt * (l + 1) as f64);
                    best = best.max(d.eval_polar(r, t).norm());
                }
            }
            row.push(best * factor);
        }
        rows.push(crate::means::lq_norm(&row, p));
    }
    Ok(crate::means::lq_norm(&rows, q))
}
