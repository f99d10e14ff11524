//! Radial weights on `[0, 1)`, their tails `omega_hat(r) = int_r^1 omega`,
//! and numerical audits of the doubling conditions.
//!
//! Everything is parametrised internally by the distance `x = 1 - r` to the
//! boundary. Working with `r` directly loses all relative precision in
//! `1 - r` once `r` is within `1e-8` of 1, and the audits need to look much
//! closer than that.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::dyadic_distances;
use crate::quad;

/// A radial weight `omega`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RadialWeight {
    /// `(1 - r)^alpha`.
    Standard { alpha: f64 },
    /// `(1 - r)^alpha log(e / (1 - r))^beta`.
    LogPower { alpha: f64, beta: f64 },
    /// `(1 - r)^power` times the linear interpolant of `(r, omega)` knots on `[0, 1]`.
    Tabulated {
        knots: Vec<[f64; 2]>,
        #[serde(default)]
        power: f64,
    },
}

/// `(b^e - a^e) / e`, or `ln(b / a)` for `e = 0`, with `0 <= a < b`.
fn power_integral(a: f64, b: f64, e: f64) -> f64 {
    if e == 0.0 {
        (b / a).ln()
    } else if a == 0.0 {
        if e > 0.0 {
            b.powf(e) / e
        } else {
            f64::INFINITY
        }
    } else {
        (b.powf(e) - a.powf(e)) / e
    }
}

/// `int_{u_a}^{u_b} e^{-c u} (1 + u)^beta du`, `u_b` possibly infinite.
fn log_power_integral(c: f64, beta: f64, u_a: f64, u_b: f64) -> f64 {
    if u_b <= u_a {
        return 0.0;
    }
    if c == 0.0 {
        let e = beta + 1.0;
        if u_b.is_infinite() {
            return if e < 0.0 {
                (1.0 + u_a).powf(e) / -e
            } else {
                f64::INFINITY
            };
        }
        return if e == 0.0 {
            ((1.0 + u_b) / (1.0 + u_a)).ln()
        } else {
            ((1.0 + u_b).powf(e) - (1.0 + u_a).powf(e)) / e
        };
    }
    if beta == 0.0 {
        let tail = if u_b.is_infinite() {
            if c > 0.0 {
                0.0
            } else {
                return f64::INFINITY;
            }
        } else {
            (-c * u_b).exp()
        };
        return ((-c * u_a).exp() - tail) / c;
    }
    if c < 0.0 && u_b.is_infinite() {
        return f64::INFINITY;
    }
    // composite Gauss-Legendre on panels that widen geometrically
    let g = |u: f64| (-c * u).exp() * (1.0 + u).powf(beta);
    let mut total = 0.0;
    let mut u = u_a;
    let cap = if c > 0.0 { 2.0 / c } else { f64::INFINITY };
    loop {
        let h = (0.5 + 0.25 * (u - u_a)).min(cap).max(0.5);
        let hi = (u + h).min(u_b);
        let piece = quad::integrate(g, u, hi, 12);
        total += piece;
        u = hi;
        if u >= u_b || (u_b.is_infinite() && piece.abs() <= 1e-17 * total.abs() && u - u_a > 8.0) {
            break;
        }
        if !total.is_finite() {
            return f64::INFINITY;
        }
    }
    total
}

impl RadialWeight {
    pub fn standard(alpha: f64) -> Self {
        Self::Standard { alpha }
    }

    /// `1 / ((1 - r) log(e / (1 - r))^2)`, whose tail is `1 / log(e / (1 - r))`.
    pub fn inverse_log() -> Self {
        Self::LogPower {
            alpha: -1.0,
            beta: -2.0,
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::Tabulated {
            knots: vec![[0.0, c], [1.0, c]],
            power: 0.0,
        }
    }

    /// Checks that the weight is a positive integrable density with
    /// `omega_hat(r) > 0` for every `r < 1`.
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Standard { alpha } => {
                if !(alpha.is_finite() && *alpha > -1.0) {
                    return Err(Error::Invalid(format!("standard weight needs alpha > -1, got {alpha}")));
                }
            }
            Self::LogPower { alpha, beta } => {
                if !alpha.is_finite() || !beta.is_finite() {
                    return Err(Error::Invalid("log-power weight parameters must be finite".into()));
                }
                if !(*alpha > -1.0 || (*alpha == -1.0 && *beta < -1.0)) {
                    return Err(Error::Invalid(format!(
                        "log-power weight is not integrable: alpha = {alpha}, beta = {beta}"
                    )));
                }
            }
            Self::Tabulated { knots, power } => {
                if knots.len() < 2 {
                    return Err(Error::Invalid("tabulated weight needs at least two knots".into()));
                }
                if knots[0][0] != 0.0 || knots[knots.len() - 1][0] != 1.0 {
                    return Err(Error::Invalid("tabulated knots must start at r = 0 and end at r = 1".into()));
                }
                if knots.windows(2).any(|w| w[1][0] <= w[0][0]) {
                    return Err(Error::Invalid("tabulated knots must be strictly increasing in r".into()));
                }
                if knots.iter().any(|k| !k[1].is_finite() || k[1] < 0.0) {
                    return Err(Error::Invalid("tabulated weight values must be finite and nonnegative".into()));
                }
                let n = knots.len();
                if knots[n - 1][1] == 0.0 && knots[n - 2][1] == 0.0 {
                    return Err(Error::Invalid("tabulated weight vanishes near r = 1".into()));
                }
                if !power.is_finite() {
                    return Err(Error::Invalid("tabulated power must be finite".into()));
                }
                if !self.is_integrable() {
                    return Err(Error::Invalid(format!("tabulated weight with power {power} is not integrable")));
                }
            }
        }
        Ok(())
    }

    /// Whether `int_0^1 omega` is finite.
    pub fn is_integrable(&self) -> bool {
        match self {
            Self::Standard { alpha } => *alpha > -1.0,
            Self::LogPower { alpha, beta } => *alpha > -1.0 || (*alpha == -1.0 && *beta < -1.0),
            Self::Tabulated { knots, power } => {
                let n = knots.len();
                if knots[n - 1][1] > 0.0 {
                    *power > -1.0
                } else {
                    *power > -2.0
                }
            }
        }
    }

    /// `(a, b)` with `omega_hat(1 - x) ~ c x^a log(e/x)^b` as `x -> 0`.
    pub fn tail_asymptotics(&self) -> (f64, f64) {
        match self {
            Self::Standard { alpha } => (alpha + 1.0, 0.0),
            Self::LogPower { alpha, beta } => {
                if *alpha == -1.0 {
                    (0.0, beta + 1.0)
                } else {
                    (alpha + 1.0, *beta)
                }
            }
            Self::Tabulated { knots, power } => {
                if knots[knots.len() - 1][1] > 0.0 {
                    (power + 1.0, 0.0)
                } else {
                    (power + 2.0, 0.0)
                }
            }
        }
    }

    /// `omega(r)`.
    pub fn density(&self, r: f64) -> f64 {
        self.density_at_distance(1.0 - r)
    }

    /// `omega(1 - x)`.
    pub fn density_at_distance(&self, x: f64) -> f64 {
        match self {
            Self::Standard { alpha } => x.powf(*alpha),
            Self::LogPower { alpha, beta } => x.powf(*alpha) * (1.0 - x.ln()).powf(*beta),
            Self::Tabulated { knots, power } => x.powf(*power) * interpolate_at_distance(knots, x),
        }
    }

    /// `int_{x_lo}^{x_hi} y^gamma omega(1 - y) dy` for `0 <= x_lo < x_hi <= 1`.
    fn power_moment(&self, gamma: f64, x_lo: f64, x_hi: f64) -> f64 {
        if x_hi <= x_lo {
            return 0.0;
        }
        match self {
            Self::Standard { alpha } => power_integral(x_lo, x_hi, alpha + gamma + 1.0),
            Self::LogPower { alpha, beta } => {
                let u_a = -x_hi.ln();
                let u_b = if x_lo == 0.0 { f64::INFINITY } else { -x_lo.ln() };
                log_power_integral(alpha + gamma + 1.0, *beta, u_a, u_b)
            }
            Self::Tabulated { knots, power } => {
                let e = power + gamma;
                let mut total = 0.0;
                // segments in distance coordinates, nearest the boundary first
                for w in knots.windows(2).rev() {
                    let (xa, xb) = (1.0 - w[1][0], 1.0 - w[0][0]);
                    let lo = xa.max(x_lo);
                    let hi = xb.min(x_hi);
                    if hi <= lo {
                        continue;
                    }
                    // value A + B x on [xa, xb]
                    let slope = (w[0][1] - w[1][1]) / (xb - xa);
                    let a = w[1][1] - slope * xa;
                    if a != 0.0 {
                        total += a * power_integral(lo, hi, e + 1.0);
                    }
                    if slope != 0.0 {
                        total += slope * power_integral(lo, hi, e + 2.0);
                    }
                }
                total
            }
        }
    }

    /// `omega_hat(1 - x) = int_0^x omega(1 - y) dy`.
    pub fn hat_at_distance(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if let Self::LogPower { alpha, beta } = self {
            if *alpha == -1.0 && *beta < -1.0 {
                // closed form: L^{beta+1} / -(beta+1), L = log(e / x)
                return (1.0 - x.ln()).powf(beta + 1.0) / -(beta + 1.0);
            }
        }
        self.power_moment(0.0, 0.0, x.min(1.0))
    }

    /// `omega_hat(r)`.
    pub fn omega_hat(&self, r: f64) -> f64 {
        self.hat_at_distance(1.0 - r)
    }

    /// `int_0^x y omega(1 - y) dy`.
    pub fn tail_moment(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        self.power_moment(1.0, 0.0, x.min(1.0))
    }

    /// Mass of `omega` on `{x_lo < 1 - r < x_hi}`; finite even for
    /// non-integrable weights.
    pub fn mass_between(&self, x_lo: f64, x_hi: f64) -> f64 {
        self.power_moment(0.0, x_lo, x_hi)
    }

    /// `omega(r) (1 - r)^beta`. Negative shifts are allowed here; they are
    /// how the divergence tests build their integrands.
    pub fn shifted(&self, beta: f64) -> Self {
        match self {
            Self::Standard { alpha } => Self::Standard { alpha: alpha + beta },
            Self::LogPower { alpha, beta: b } => Self::LogPower {
                alpha: alpha + beta,
                beta: *b,
            },
            Self::Tabulated { knots, power } => Self::Tabulated {
                knots: knots.clone(),
                power: power + beta,
            },
        }
    }
}

fn interpolate_at_distance(knots: &[[f64; 2]], x: f64) -> f64 {
    for w in knots.windows(2).rev() {
        let (xa, xb) = (1.0 - w[1][0], 1.0 - w[0][0]);
        if x <= xb {
            let t = if xb > xa { (x - xa) / (xb - xa) } else { 0.0 };
            return w[1][1] + t.clamp(0.0, 1.0) * (w[0][1] - w[1][1]);
        }
    }
    knots[0][1]
}

/// `omega_{[beta]}(r) = omega(r) (1 - r)^beta` for `beta >= 0`.
pub fn weight_shift(w: &RadialWeight, beta: f64) -> Result<RadialWeight> {
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::Invalid(format!("shift exponent must be >= 0, got {beta}")));
    }
    Ok(w.shifted(beta))
}

/// Block radii `r_j = 1 - K^{-j}`, `j = 0..=j_max`.
pub fn r_grid(k: u32, j_max: usize) -> Vec<f64> {
    (0..=j_max).map(|j| 1.0 - (k as f64).powi(-(j as i32))).collect()
}

/// `1 - r_j = K^{-j}`, the exact distances behind [`r_grid`].
pub fn block_distance(k: u32, j: usize) -> f64 {
    (k as f64).powi(-(j as i32))
}

/// Default audit grid: four points per octave of `1 - r`, down to `2^-octaves`.
pub fn audit_distances(octaves: usize) -> Vec<f64> {
    dyadic_distances(4, octaves)
}

/// `r` values for a distance grid (only for display; audits use distances).
pub fn radii_of(distances: &[f64]) -> Vec<f64> {
    distances.iter().map(|x| 1.0 - x).collect()
}

/// `max omega_hat(r) / omega_hat((1 + r) / 2)` over the grid, given as distances `1 - r`.
pub fn audit_dhat(w: &RadialWeight, distances: &[f64]) -> f64 {
    distances
        .iter()
        .map(|&x| w.hat_at_distance(x) / w.hat_at_distance(x / 2.0))
        .fold(0.0, f64::max)
}

/// `min omega_hat(r) / omega_hat(1 - (1 - r) / K)` over the grid.
pub fn audit_dcheck(w: &RadialWeight, k: u32, distances: &[f64]) -> f64 {
    distances
        .iter()
        .map(|&x| w.hat_at_distance(x) / w.hat_at_distance(x / k as f64))
        .fold(f64::INFINITY, f64::min)
}

/// Constants of the two standard growth estimates for a doubling weight.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecayConstants {
    /// `omega_hat(s) <= c_ii ((1-s)/(1-t))^alpha0 omega_hat(t)` for `s <= t`.
    pub alpha0: f64,
    pub c_ii: f64,
    /// `int_0^r ((1-r)/(1-s))^lambda omega(s) ds <= c_iii omega_hat(r)`.
    pub lambda: f64,
    pub c_iii: f64,
}

/// Local log-slopes of `omega_hat` against `1 - r` on a distance grid.
fn log_slopes(w: &RadialWeight, distances: &[f64]) -> Vec<f64> {
    distances
        .windows(2)
        .map(|d| (w.hat_at_distance(d[0]) / w.hat_at_distance(d[1])).ln() / (d[0] / d[1]).ln())
        .collect()
}

/// Best constant in the first estimate for a given exponent: `max_{x_i > x_j} h_i - h_j`
/// with `h = ln omega_hat(x) - alpha ln x`.
pub fn decay_bound_constant(w: &RadialWeight, alpha: f64, distances: &[f64]) -> f64 {
    let mut best = 0.0f64;
    let mut running = f64::NEG_INFINITY;
    let mut sorted = distances.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    for x in sorted {
        let h = w.hat_at_distance(x).ln() - alpha * x.ln();
        running = running.max(h);
        best = best.max(running - h);
    }
    best.exp()
}

/// `sup_x R_lambda(x)` with `R_lambda(x) = int_x^1 (x/y)^lambda omega(1-y) dy / omega_hat(1-x)`,
/// over dyadic distances down to `2^-octaves`.
fn decay_integral_sup(w: &RadialWeight, lambda: f64, octaves: usize) -> f64 {
    // u = ln(1/y); numerator N(U) = int_0^U e^{-lambda (U - u)} omega(1 - e^{-u}) e^{-u} du
    let steps_per_octave = 4;
    let du = std::f64::consts::LN_2 / steps_per_octave as f64;
    let h = |u: f64| w.density_at_distance((-u).exp()) * (-u).exp();
    let mut num = 0.0;
    let mut best = 0.0f64;
    for k in 0..steps_per_octave * octaves {
        let u0 = du * k as f64;
        let u1 = u0 + du;
        num = (-lambda * du).exp() * num + quad::integrate(|u| (-lambda * (u1 - u)).exp() * h(u), u0, u1, 8);
        best = best.max(num / w.hat_at_distance((-u1).exp()));
    }
    best
}

/// Depth used by the audits; certification compares it with twice as deep.
pub const AUDIT_OCTAVES: usize = 40;

/// Stability tolerance between the two audit depths.
pub const AUDIT_STABILITY: f64 = 0.05;

/// Exponents and constants of the growth estimates.
///
/// `alpha0` is the largest local log-slope over the deeper half of the grid,
/// and `c_ii` is then the best constant over every nested pair. `lambda` is
/// the smallest exponent (by bisection) for which the sup of the integral
/// ratio does not grow by more than 5% when the grid depth doubles.
pub fn decay_constants(w: &RadialWeight) -> DecayConstants {
    let grid = audit_distances(AUDIT_OCTAVES);
    let slopes = log_slopes(w, &grid);
    let alpha0 = slopes[slopes.len() / 2..].iter().copied().fold(0.0, f64::max);
    let c_ii = decay_bound_constant(w, alpha0, &grid);
    let bounded = |lambda: f64| {
        let shallow = decay_integral_sup(w, lambda, AUDIT_OCTAVES);
        let deep = decay_integral_sup(w, lambda, 2 * AUDIT_OCTAVES);
        deep.is_finite() && deep <= (1.0 + AUDIT_STABILITY) * shallow
    };
    let mut hi = alpha0 + 1.0;
    while !bounded(hi) {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if bounded(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    DecayConstants {
        alpha0,
        c_ii,
        lambda: hi,
        c_iii: decay_integral_sup(w, hi, 2 * AUDIT_OCTAVES),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RingMassCheck {
    pub c1: f64,
    pub c2: f64,
    pub pass: bool,
}

/// Two-sided comparison of `int_r^{1-(1-r)/K} omega` with the tails at both ends.
pub fn ring_mass_check(w: &RadialWeight, k: u32, distances: &[f64]) -> RingMassCheck {
    let mut c1 = f64::INFINITY;
    let mut c2 = 0.0f64;
    for &x in distances {
        let inner = w.hat_at_distance(x / k as f64);
        let band = w.mass_between(x / k as f64, x);
        c1 = c1.min(band / inner);
        c2 = c2.max(w.hat_at_distance(x) / inner);
    }
    RingMassCheck {
        c1,
        c2,
        pass: c1 > 0.0 && c2.is_finite(),
    }
}

/// Outcome of the doubling audits.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightAudit {
    pub d_hat: f64,
    pub d_hat_deep: f64,
    pub in_d_hat: bool,
    /// Smallest integer `K` certified for the reverse doubling condition.
    pub k: Option<u32>,
    pub d_check: Option<f64>,
    pub in_d_check: bool,
    pub decay: Option<DecayConstants>,
    pub ring_mass: Option<RingMassCheck>,
}

impl WeightAudit {
    pub fn in_doubling_class(&self) -> bool {
        self.in_d_hat && self.in_d_check
    }
}

/// Largest `K` tried when searching for the reverse doubling parameter.
pub const MAX_K: u32 = 64;

/// Reverse doubling constants must clear this margin above 1.
pub const DCHECK_MARGIN: f64 = 1.1;

/// Runs every audit.
///
/// The forward condition is certified when the constant changes by less
/// than 5% as the grid depth doubles. The reverse condition is certified
/// for `K` when the excess `C - 1` is positive, changes by less than 5%
/// under the same doubling, and `C > 1.1`.
pub fn audit_weight(w: &RadialWeight) -> Result<WeightAudit> {
    w.validate()?;
    let shallow = audit_distances(AUDIT_OCTAVES);
    let deep = audit_distances(2 * AUDIT_OCTAVES);
    let d_hat = audit_dhat(w, &shallow);
    let d_hat_deep = audit_dhat(w, &deep);
    let in_d_hat = d_hat_deep.is_finite() && d_hat_deep <= (1.0 + AUDIT_STABILITY) * d_hat;
    let mut k_found = None;
    for k in 2..=MAX_K {
        let c = audit_dcheck(w, k, &shallow);
        let c_deep = audit_dcheck(w, k, &deep);
        let excess = c - 1.0;
        let excess_deep = c_deep - 1.0;
        if excess_deep > 0.0 && excess <= (1.0 + AUDIT_STABILITY) * excess_deep && c_deep > DCHECK_MARGIN {
            k_found = Some((k, c_deep));
            break;
        }
    }
    let in_d_check = k_found.is_some();
    let (decay, ring_mass) = if in_d_hat && in_d_check {
        let k = k_found.unwrap().0;
        (Some(decay_constants(w)), Some(ring_mass_check(w, k, &deep)))
    } else {
        (None, None)
    };
    Ok(WeightAudit {
        d_hat,
        d_hat_deep,
        in_d_hat,
        k: k_found.map(|x| x.0),
        d_check: k_found.map(|x| x.1),
        in_d_check,
        decay,
        ring_mass,
    })
}

/// A weight that passed both doubling audits, with its parameters.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DoublingWeight {
    weight: RadialWeight,
    k: u32,
    constants: DecayConstants,
}

impl DoublingWeight {
    pub fn certify(weight: RadialWeight) -> Result<Self> {
        let audit = audit_weight(&weight)?;
        if !audit.in_d_hat {
            return Err(Error::NotDoubling(format!(
                "forward doubling constant unstable ({} -> {})",
                audit.d_hat, audit.d_hat_deep
            )));
        }
        let (Some(k), Some(constants)) = (audit.k, audit.decay) else {
            return Err(Error::NotDoubling(format!(
                "no K <= {MAX_K} certifies the reverse doubling condition"
            )));
        };
        Ok(Self { weight, k, constants })
    }

    pub fn weight(&self) -> &RadialWeight {
        &self.weight
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn constants(&self) -> &DecayConstants {
        &self.constants
    }

    pub fn omega_hat(&self, r: f64) -> f64 {
        self.weight.omega_hat(r)
    }

    /// `omega_hat(r_j)` at `r_j = 1 - K^{-j}`.
    pub fn hat_at_block(&self, j: usize) -> f64 {
        self.weight.hat_at_distance(block_distance(self.k, j))
    }
}
