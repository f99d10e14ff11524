//! The paraproducts `T_g f = int_0^z f g'`, `S_g f = int_0^z f' g`, the
//! multiplication operator `M_g f = f g`, and the quantities that control
//! their norms from `A^{p,q}_omega` to `A^{s,t}_omega`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::atoms::{default_atom_order, grid_center, rademacher_combination, AtomSpec, SignPattern};
use crate::error::{Error, Result};
use crate::grid::Resolution;
use crate::means::{circle_sup, integral_mean_at};
use crate::mixed_norm::{apq_norm_at, linf_q_norm, ExponentProfile, ProfileCase};
use crate::seq::{row_len, DoubleIndexSeq};
use crate::series::PowerSeries;
use crate::weights::{DoublingWeight, RadialWeight};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParaproductKind {
    T,
    S,
    M,
}

/// `T` is governed by `g'`; `S` and `M` share the conditions on `g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SymbolVersion {
    T,
    SM,
}

impl ParaproductKind {
    pub fn version(self) -> SymbolVersion {
        match self {
            Self::T => SymbolVersion::T,
            Self::S | Self::M => SymbolVersion::SM,
        }
    }
}

/// Applies the operator, keeping coefficients up to `max_degree`.
pub fn apply_paraproduct(kind: ParaproductKind, g: &PowerSeries, f: &PowerSeries, max_degree: usize) -> PowerSeries {
    match kind {
        ParaproductKind::T => f
            .cauchy_product(&g.derivative(1), max_degree.saturating_sub(1))
            .primitive()
            .truncate(max_degree),
        ParaproductKind::S => f
            .derivative(1)
            .cauchy_product(g, max_degree.saturating_sub(1))
            .primitive()
            .truncate(max_degree),
        ParaproductKind::M => f.cauchy_product(g, max_degree),
    }
}

/// Degree of the untruncated image.
pub fn full_degree(g: &PowerSeries, f: &PowerSeries) -> usize {
    g.effective_degree() + f.effective_degree()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RhoEstimate {
    pub value: f64,
    pub divergent: bool,
    pub case: ProfileCase,
    /// Radius attaining the supremum, in the cases defined by one.
    pub argmax_r: Option<f64>,
}

/// Whether `omega_hat(1 - x)^{1/q~} x^e -> inf` as `x -> 0`.
fn weight_factor_diverges(w: &RadialWeight, inv_q_tilde: f64, e: f64) -> bool {
    let (a, b) = w.tail_asymptotics();
    let power = a * inv_q_tilde + e;
    let log_power = b * inv_q_tilde;
    power < -1e-12 || (power.abs() <= 1e-12 && log_power > 1e-12)
}

/// `sup_r m(r) omega_hat(r)^{1/q~} (1-r)^e` on the sup grid, with a
/// golden-section polish in `log(1 - r)` around the best node.
fn weighted_sup<F>(w: &RadialWeight, inv_q_tilde: f64, e: f64, res: &Resolution, m: F) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let phi = |x: f64| -> Result<f64> {
        let mv = m(1.0 - x)?;
        if mv == 0.0 {
            return Ok(0.0);
        }
        Ok(mv * w.hat_at_distance(x).powf(inv_q_tilde) * x.powf(e))
    };
    let xs = res.sup_distances();
    let vals: Vec<f64> = xs.par_iter().map(|&x| phi(x)).collect::<Result<_>>()?;
    let (k, &best) = vals
        .iter()
        .enumerate()
        .fold((0, &0.0), |acc, (i, v)| if *v > *acc.1 { (i, v) } else { acc });
    let mut best = best;
    let mut arg = xs[k];
    if k > 0 && k + 1 < xs.len() {
        let (lo, hi) = (xs[k + 1].ln(), xs[k - 1].ln());
        let golden = 0.5 * (5f64.sqrt() - 1.0);
        let (mut a, mut b) = (lo, hi);
        for _ in 0..40 {
            let x1 = b - golden * (b - a);
            let x2 = a + golden * (b - a);
            if phi(x1.exp())? < phi(x2.exp())? {
                a = x1;
            } else {
                b = x2;
            }
        }
        let xm = (0.5 * (a + b)).exp();
        let v = phi(xm)?;
        if v > best {
            best = v;
            arg = xm;
        }
    }
    Ok((best, 1.0 - arg))
}

/// The functional `rho` whose finiteness characterises boundedness.
///
/// In cases (a) and (b) it is a supremum over `r`; when the weight factor
/// blows up at the boundary (decided from the weight's tail asymptotics)
/// and the symbol is not zero, it is reported as divergent. Cases (c) and
/// (d) are radial integrals.
pub fn rho(
    g: &PowerSeries,
    profile: &ExponentProfile,
    w: &DoublingWeight,
    version: SymbolVersion,
    res: &Resolution,
) -> Result<RhoEstimate> {
    profile.validate()?;
    let case = profile.case();
    let ipt = profile.inv_p_tilde();
    let iqt = profile.inv_q_tilde();
    let omega = w.weight();
    let (symbol, extra) = match version {
        SymbolVersion::T => (g.derivative(1), 1.0),
        SymbolVersion::SM => (g.clone(), 0.0),
    };
    let n = res.circle_samples(symbol.effective_degree());
    let out = |value: f64, divergent: bool, argmax_r: Option<f64>| RhoEstimate {
        value,
        divergent,
        case,
        argmax_r,
    };
    match case {
        ProfileCase::A | ProfileCase::B => {
            let (e, mean_p) = if case == ProfileCase::A {
                (extra + ipt, f64::INFINITY)
            } else {
                (extra, profile.p_tilde())
            };
            let m = |r: f64| {
                if mean_p.is_infinite() {
                    circle_sup(&symbol, r, n)
                } else {
                    integral_mean_at(&symbol, r, mean_p, res)
                }
            };
            if symbol.is_zero() {
                return Ok(out(0.0, false, None));
            }
            if weight_factor_diverges(omega, iqt, e) {
                return Ok(out(f64::INFINITY, true, None));
            }
            let (v, r) = weighted_sup(omega, iqt, e, res, m)?;
            Ok(out(v, false, Some(r)))
        }
        ProfileCase::C => {
            let ri = linf_q_norm(&symbol, extra + ipt, profile.q_tilde(), omega, res)?;
            Ok(out(ri.value, ri.divergent, None))
        }
        ProfileCase::D => {
            let h = match version {
                SymbolVersion::T => g.sub(&PowerSeries::constant(g.at_zero())),
                SymbolVersion::SM => g.clone(),
            };
            let ri = apq_norm_at(&h, profile.p_tilde(), profile.q_tilde(), omega, res)?;
            Ok(out(ri.value, ri.divergent, None))
        }
    }
}

/// Families of test functions for lower bounds on operator norms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum TestFamily {
    /// `z^n` for `n` in `{0, 1, 2, 3, 4, 6, 8, 12, ...}` up to `max_degree`.
    Monomials { max_degree: usize },
    /// Single grid atoms on rings `1..=j_max`, `per_ring` equally spaced per ring.
    Atoms {
        j_max: usize,
        per_ring: usize,
        #[serde(default)]
        order: Option<f64>,
    },
    /// Signed sums of all atoms on rings `1..=j_max`.
    Rademacher {
        j_max: usize,
        draws: usize,
        seed: u64,
        #[serde(default)]
        order: Option<f64>,
    },
}

/// `0, 1, 2, 3, 4, 6, 8, 12, 16, ...` up to `max`.
pub fn monomial_degrees(max: usize) -> Vec<usize> {
    let mut out = vec![0, 1, 2, 3];
    let mut b = 4;
    while b <= max {
        out.push(b);
        if b + b / 2 <= max {
            out.push(b + b / 2);
        }
        b *= 2;
    }
    out.retain(|&d| d <= max);
    out
}

struct Member {
    label: String,
    f: PowerSeries,
}

fn members(family: &TestFamily, p: f64, q: f64, w: &DoublingWeight) -> Result<Vec<Member>> {
    let one = Complex64::new(1.0, 0.0);
    let k = w.k();
    match family {
        TestFamily::Monomials { max_degree } => Ok(monomial_degrees(*max_degree)
            .into_iter()
            .map(|n| Member {
                label: format!("z^{n}"),
                f: PowerSeries::monomial(n, one),
            })
            .collect()),
        TestFamily::Atoms { j_max, per_ring, order } => {
            let order = order.unwrap_or_else(|| default_atom_order(p, q, w));
            let mut out = Vec::new();
            for j in 1..=*j_max {
                let n = row_len(k, j);
                let count = (*per_ring).clamp(1, n);
                for i in 0..count {
                    let l = i * n / count;
                    let spec = AtomSpec {
                        center: grid_center(k, j, l),
                        order,
                    };
                    out.push(Member {
                        label: format!("atom(j={j},l={l})"),
                        f: crate::atoms::atom_function(&spec, p, q, w)?,
                    });
                }
            }
            Ok(out)
        }
        TestFamily::Rademacher {
            j_max,
            draws,
            seed,
            order,
        } => {
            let order = order.unwrap_or_else(|| default_atom_order(p, q, w));
            let ones = DoubleIndexSeq::from_fn(k, *j_max, |_, _| 1.0)?;
            (0..*draws)
                .map(|d| {
                    let s = seed.wrapping_add(d as u64);
                    let signs = SignPattern::seeded(k, *j_max, s);
                    Ok(Member {
                        label: format!("rademacher(seed={s})"),
                        f: rademacher_combination(&ones, &signs, order, p, q, w)?,
                    })
                })
                .collect()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormEstimate {
    pub lower_bound: f64,
    pub best_member: String,
    pub members: usize,
}

/// `max ||X_g f||_{A^{s,t}} / ||f||_{A^{p,q}}` over the families.
pub fn operator_norm_lower_bound(
    kind: ParaproductKind,
    g: &PowerSeries,
    profile: &ExponentProfile,
    w: &DoublingWeight,
    families: &[TestFamily],
    res: &Resolution,
) -> Result<NormEstimate> {
    profile.validate()?;
    if families.is_empty() {
        return Err(Error::Invalid("at least one test family is required".into()));
    }
    let mut all = Vec::new();
    for fam in families {
        all.extend(members(fam, profile.p, profile.q, w)?);
    }
    let omega = w.weight();
    let ratios: Vec<f64> = all
        .par_iter()
        .map(|m| {
            let image = apply_paraproduct(kind, g, &m.f, full_degree(g, &m.f));
            let num = apq_norm_at(&image, profile.s, profile.t, omega, res)?.value;
            let den = apq_norm_at(&m.f, profile.p, profile.q, omega, res)?.value;
            Ok(if den > 0.0 { num / den } else { 0.0 })
        })
        .collect::<Result<_>>()?;
    let (i, &best) = ratios
        .iter()
        .enumerate()
        .fold((0, &f64::NEG_INFINITY), |acc, (i, v)| if *v > *acc.1 { (i, v) } else { acc });
    Ok(NormEstimate {
        lower_bound: best,
        best_member: all[i].label.clone(),
        members: all.len(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Degeneracy {
    /// Some nonconstant symbols give bounded operators.
    Nondegenerate,
    /// Only constant symbols give a bounded `T_g`.
    OnlyConstants,
    /// Only `g = 0` gives a bounded `S_g` or `M_g`.
    OnlyZero,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegeneracyReport {
    pub case: ProfileCase,
    pub verdict: Degeneracy,
    /// Boundedness condition on the symbol when the class is nondegenerate.
    pub condition: String,
}

/// Decides whether the boundedness class collapses, from the tail
/// asymptotics of the weight.
pub fn degeneracy_check(
    version: SymbolVersion,
    profile: &ExponentProfile,
    w: &RadialWeight,
) -> Result<DegeneracyReport> {
    profile.validate()?;
    w.validate()?;
    let case = profile.case();
    let ipt = profile.inv_p_tilde();
    let iqt = profile.inv_q_tilde();
    let extra = match version {
        SymbolVersion::T => 1.0,
        SymbolVersion::SM => 0.0,
    };
    let collapsed = match version {
        SymbolVersion::T => Degeneracy::OnlyConstants,
        SymbolVersion::SM => Degeneracy::OnlyZero,
    };
    let symbol = match version {
        SymbolVersion::T => "g'",
        SymbolVersion::SM => "g",
    };
    let (degenerate, condition) = match case {
        ProfileCase::A => (
            weight_factor_diverges(w, iqt, extra + ipt),
            format!("sup M_inf(r, {symbol}) omega_hat(r)^(1/q~) (1-r)^({extra}+1/p~) < inf"),
        ),
        ProfileCase::B => (
            weight_factor_diverges(w, iqt, extra),
            format!("sup M_p~(r, {symbol}) omega_hat(r)^(1/q~) (1-r)^{extra} < inf"),
        ),
        ProfileCase::C => (
            !w.shifted((extra + ipt) * profile.q_tilde()).is_integrable(),
            format!("int M_inf(r, {symbol})^q~ (1-r)^(({extra}+1/p~) q~) omega(r) dr < inf"),
        ),
        ProfileCase::D => (false, "g in A^{p~,q~}_omega".to_string()),
    };
    let condition = if version == SymbolVersion::SM && !degenerate {
        match case {
            ProfileCase::A if profile.p == profile.s && profile.q == profile.t => "g in H^inf".to_string(),
            ProfileCase::B if profile.q == profile.t => "g in H^p~".to_string(),
            _ => condition,
        }
    } else {
        condition
    };
    Ok(DegeneracyReport {
        case,
        verdict: if degenerate { collapsed } else { Degeneracy::Nondegenerate },
        condition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn z() -> PowerSeries {
        PowerSeries::monomial(1, c(1.0))
    }

    fn unweighted() -> DoublingWeight {
        DoublingWeight::certify(RadialWeight::standard(0.0)).unwrap()
    }

    #[test]
    fn t_with_symbol_z_on_one_is_z() {
        let one = PowerSeries::constant(c(1.0));
        let out = apply_paraproduct(ParaproductKind::T, &z(), &one, 4);
        assert_eq!(out.coeffs(), &[c(0.0), c(1.0)]);
    }

    #[test]
    fn s_with_symbol_one_on_z_squared() {
        let one = PowerSeries::constant(c(1.0));
        let f = PowerSeries::monomial(2, c(1.0));
        let out = apply_paraproduct(ParaproductKind::S, &one, &f, 4);
        assert_eq!(out.coeffs(), &[c(0.0), c(0.0), c(1.0)]);
    }

    #[test]
    fn m_with_symbol_z_on_z() {
        let out = apply_paraproduct(ParaproductKind::M, &z(), &z(), 4);
        assert_eq!(out.coeffs(), &[c(0.0), c(0.0), c(1.0)]);
    }

    #[test]
    fn rho_vanishes_for_constant_symbols() {
        let w = unweighted();
        let g = PowerSeries::constant(c(3.0));
        let res = Resolution::default();
        for (p, q, s, t) in [(2.0, 2.0, 2.0, 2.0), (4.0, 2.0, 2.0, 2.0), (2.0, 4.0, 2.0, 2.0), (4.0, 4.0, 2.0, 2.0)] {
            let pr = ExponentProfile::new(p, q, s, t).unwrap();
            let r = rho(&g, &pr, &w, SymbolVersion::T, &res).unwrap();
            assert_eq!(r.value, 0.0, "{pr:?}");
            assert!(!r.divergent);
        }
    }

    #[test]
    fn rho_for_z_in_the_diagonal_case() {
        // sup (1 - r) M_inf(r, 1) = 1, at r = 0
        let w = DoublingWeight::certify(RadialWeight::standard(1.0)).unwrap();
        let pr = ExponentProfile::new(2.0, 3.0, 2.0, 3.0).unwrap();
        let r = rho(&z(), &pr, &w, SymbolVersion::T, &Resolution::default()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rho_case_b_with_unit_derivative() {
        // p = 2, s = 1: p~ = 2; q = t so omega_hat^0; sup (1 - r) * 1 = 1
        let w = unweighted();
        let pr = ExponentProfile::new(2.0, 2.0, 1.0, 2.0).unwrap();
        assert_eq!(pr.case(), ProfileCase::B);
        let r = rho(&z(), &pr, &w, SymbolVersion::T, &Resolution::default()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn monomial_family_ratio_for_symbol_z() {
        // |T_z z^n|^2 = 1/((n+1)^2 (2n+3)), |z^n|^2 = 1/(2n+1): best at n = 0
        let w = unweighted();
        let pr = ExponentProfile::new(2.0, 2.0, 2.0, 2.0).unwrap();
        let est = operator_norm_lower_bound(
            ParaproductKind::T,
            &z(),
            &pr,
            &w,
            &[TestFamily::Monomials { max_degree: 16 }],
            &Resolution::default(),
        )
        .unwrap();
        assert!((est.lower_bound - (1.0f64 / 3.0).sqrt()).abs() < 1e-9);
        assert_eq!(est.best_member, "z^0");
        for n in [1.0f64, 4.0] {
            let want = ((2.0 * n + 1.0) / ((n + 1.0).powi(2) * (2.0 * n + 3.0))).sqrt();
            let f = PowerSeries::monomial(n as usize, c(1.0));
            let img = apply_paraproduct(ParaproductKind::T, &z(), &f, n as usize + 1);
            let got = crate::mixed_norm::apq_norm(&img, 2.0, 2.0, w.weight()).unwrap()
                / crate::mixed_norm::apq_norm(&f, 2.0, 2.0, w.weight()).unwrap();
            assert!((got - want).abs() < 1e-9);
        }
    }

    #[test]
    fn monomial_degrees_are_geometric() {
        assert_eq!(monomial_degrees(16), vec![0, 1, 2, 3, 4, 6, 8, 12, 16]);
    }

    #[test]
    fn degeneracy_examples() {
        let w0 = RadialWeight::standard(0.0);
        // diagonal case: (1 - r) -> 0, nondegenerate
        let pr = ExponentProfile::new(2.0, 2.0, 2.0, 2.0).unwrap();
        assert_eq!(degeneracy_check(SymbolVersion::T, &pr, &w0).unwrap().verdict, Degeneracy::Nondegenerate);
        let sm = degeneracy_check(SymbolVersion::SM, &pr, &w0).unwrap();
        assert_eq!(sm.verdict, Degeneracy::Nondegenerate);
        assert_eq!(sm.condition, "g in H^inf");
        // case (a) with q < t: omega_hat^{1/q~} blows up faster than (1-r)^{1+1/p~} decays
        let pr = ExponentProfile::new(1.0, 1.0, 2.0, 4.0).unwrap();
        assert_eq!(degeneracy_check(SymbolVersion::T, &pr, &w0).unwrap().verdict, Degeneracy::OnlyConstants);
        assert_eq!(degeneracy_check(SymbolVersion::SM, &pr, &w0).unwrap().verdict, Degeneracy::OnlyZero);
        // case (c): 1 + 1/p~ = -1/2, q~ = 4, int (1-r)^{-2} = inf
        let pr = ExponentProfile::new(0.5, 4.0, 2.0, 2.0).unwrap();
        assert_eq!(pr.case(), ProfileCase::C);
        assert_eq!(degeneracy_check(SymbolVersion::T, &pr, &w0).unwrap().verdict, Degeneracy::OnlyConstants);
        // case (d) never collapses
        let pr = ExponentProfile::new(4.0, 4.0, 2.0, 2.0).unwrap();
        assert_eq!(degeneracy_check(SymbolVersion::SM, &pr, &w0).unwrap().verdict, Degeneracy::Nondegenerate);
    }

    #[test]
    fn degeneracy_for_a_tabulated_weight() {
        // S/M, case (c): q~ = 4, 1/p~ = -3/2, so the exponent q~/p~ = -6
        let w = RadialWeight::Tabulated {
            knots: vec![[0.0, 1.0], [0.5, 2.0], [1.0, 0.5]],
            power: 0.0,
        };
        let pr = ExponentProfile::new(0.5, 4.0, 2.0, 2.0).unwrap();
        assert_eq!(degeneracy_check(SymbolVersion::SM, &pr, &w).unwrap().verdict, Degeneracy::OnlyZero);
    }

    fn series_strategy() -> impl Strategy<Value = PowerSeries> {
        prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..20)
            .prop_map(|v| PowerSeries::new(v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).unwrap())
    }

    proptest! {
        #[test]
        fn multiplication_splits_into_the_paraproducts(f in series_strategy(), g in series_strategy()) {
            let d = full_degree(&g, &f);
            let m = apply_paraproduct(ParaproductKind::M, &g, &f, d);
            let t = apply_paraproduct(ParaproductKind::T, &g, &f, d);
            let s = apply_paraproduct(ParaproductKind::S, &g, &f, d);
            let sum = t.add(&s).add(&PowerSeries::constant(f.at_zero() * g.at_zero()));
            for (k, a) in m.coeffs().iter().enumerate() {
                let b = sum.coeffs().get(k).copied().unwrap_or_default();
                prop_assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()));
            }
        }
    }
}
