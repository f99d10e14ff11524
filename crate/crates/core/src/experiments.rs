//! Experiment configurations and runners shared by the command line tool
//! and the acceptance suite. Runners return plain report structs; writing
//! them out is left to the caller.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::carleson::{
    carleson_continuous_lhs, carleson_discrete_lhs, carleson_measure_lhs, g_nu_discrete_seq, multiplier_norm_bruteforce,
    sg_discrete_seq, tg_discrete_seq, DiscreteSequence, MeasureSpec,
};
use crate::corpus::{CorpusSelector, FunctionSpec, NamedFunction};
use crate::error::{Error, Result};
use crate::grid::Resolution;
use crate::means::{arc_means_at, hl_report_at, lq_norm};
use crate::mixed_norm::{apq_norm_at, hp_norm, littlewood_paley_norm, ExponentProfile};
use crate::paraproducts::{
    degeneracy_check, operator_norm_lower_bound, rho, DegeneracyReport, NormEstimate, ParaproductKind, RhoEstimate,
    TestFamily,
};
use crate::seq::{lpq_norm, DoubleIndexSeq};
use crate::series::lacunary_series;
use crate::weights::{audit_weight, DoublingWeight, RadialWeight, WeightAudit};

/// Version of every report layout.
pub const SCHEMA_VERSION: u32 = 1;

/// An exponent in `(0, inf]`. Written as a number, or as the string `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Exponent(pub f64);

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Exponent;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a positive number or \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Exponent, E> {
                Ok(Exponent(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Exponent, E> {
                Ok(Exponent(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Exponent, E> {
                Ok(Exponent(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Exponent, E> {
                match v {
                    "inf" | "infinity" | "Inf" | "Infinity" => Ok(Exponent(f64::INFINITY)),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }
        d.deserialize_any(V)
    }
}

/// `(p, q, s, t)` as written in config files.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub p: f64,
    pub q: f64,
    pub s: f64,
    pub t: f64,
}

impl ProfileSpec {
    pub fn profile(&self) -> Result<ExponentProfile> {
        ExponentProfile::new(self.p, self.q, self.s, self.t)
    }
}

impl Default for ProfileSpec {
    fn default() -> Self {
        Self {
            p: 2.0,
            q: 2.0,
            s: 2.0,
            t: 2.0,
        }
    }
}

fn ratio(a: f64, b: f64) -> f64 {
    if a == 0.0 && b == 0.0 {
        0.0
    } else {
        a / b
    }
}

// ---------------------------------------------------------------- hl-check

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HlCheckConfig {
    pub corpus: CorpusSelector,
    /// `(p, q)` pairs with `p < q`.
    pub exponents: Vec<[Exponent; 2]>,
    /// `(r, rho)` pairs with `0 <= r < rho <= 1`.
    pub radii: Vec<[f64; 2]>,
    /// Relative slack allowed in `rhs_improved <= rhs_classical`.
    pub tolerance: f64,
}

impl Default for HlCheckConfig {
    fn default() -> Self {
        Self {
            corpus: CorpusSelector::default(),
            exponents: vec![
                [Exponent(1.0), Exponent(2.0)],
                [Exponent(2.0), Exponent(4.0)],
                [Exponent(0.5), Exponent(1.0)],
                [Exponent(2.0), Exponent(f64::INFINITY)],
            ],
            radii: vec![[0.0, 0.5], [0.5, 0.75], [0.9, 0.95], [0.9, 1.0]],
            tolerance: 1e-9,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HlRow {
    /// `data` or `summary`.
    pub row: &'static str,
    pub function: String,
    pub p: f64,
    pub q: f64,
    pub r: Option<f64>,
    pub rho: Option<f64>,
    pub n_arcs: Option<usize>,
    pub lhs: Option<f64>,
    pub rhs_classical: Option<f64>,
    pub rhs_improved: Option<f64>,
    pub constant_classical: f64,
    pub constant_improved: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HlCheckReport {
    pub rows: Vec<HlRow>,
    /// Largest improved constant per `(p, q)`, in config order.
    pub max_improved: Vec<(f64, f64, f64)>,
    /// Rows where the improved bound exceeds the classical one beyond tolerance.
    pub violations: usize,
    pub pass: bool,
}

pub fn run_hl_check(cfg: &HlCheckConfig, res: &Resolution) -> Result<HlCheckReport> {
    let corpus = cfg.corpus.build()?;
    for [p, q] in &cfg.exponents {
        if !(p.0 < q.0) {
            return Err(Error::Invalid(format!("hl-check needs p < q, got p = {}, q = {}", p.0, q.0)));
        }
    }
    for [r, rho] in &cfg.radii {
        if !(0.0 <= *r && r < rho && *rho <= 1.0) {
            return Err(Error::Invalid(format!("hl-check needs 0 <= r < rho <= 1, got r = {r}, rho = {rho}")));
        }
    }
    let mut rows = Vec::new();
    let mut max_improved = Vec::new();
    let mut violations = 0;
    let mut finite = true;
    for [p, q] in &cfg.exponents {
        let (p, q) = (p.0, q.0);
        let jobs: Vec<(&NamedFunction, [f64; 2])> = corpus
            .iter()
            .flat_map(|f| cfg.radii.iter().map(move |rr| (f, *rr)))
            .collect();
        let data: Vec<HlRow> = jobs
            .par_iter()
            .map(|(f, [r, rho])| {
                let h = hl_report_at(&f.series, p, q, *r, *rho, res)?;
                Ok(HlRow {
                    row: "data",
                    function: f.id.clone(),
                    p,
                    q,
                    r: Some(*r),
                    rho: Some(*rho),
                    n_arcs: Some(h.n_arcs),
                    lhs: Some(h.lhs),
                    rhs_classical: Some(h.rhs_classical),
                    rhs_improved: Some(h.rhs_improved),
                    constant_classical: h.constant_classical,
                    constant_improved: h.constant_improved,
                })
            })
            .collect::<Result<_>>()?;
        let mut c_imp: f64 = 0.0;
        let mut c_cls: f64 = 0.0;
        for row in &data {
            c_imp = c_imp.max(row.constant_improved);
            c_cls = c_cls.max(row.constant_classical);
            if row.rhs_improved.unwrap() > row.rhs_classical.unwrap() * (1.0 + cfg.tolerance) {
                violations += 1;
            }
            finite &= row.constant_improved.is_finite();
        }
        rows.extend(data);
        rows.push(HlRow {
            row: "summary",
            function: "max".into(),
            p,
            q,
            r: None,
            rho: None,
            n_arcs: None,
            lhs: None,
            rhs_classical: None,
            rhs_improved: None,
            constant_classical: c_cls,
            constant_improved: c_imp,
        });
        max_improved.push((p, q, c_imp));
    }
    Ok(HlCheckReport {
        rows,
        max_improved,
        violations,
        pass: violations == 0 && finite,
    })
}

// --------------------------------------------------------------- arc-bound

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArcBoundConfig {
    pub corpus: CorpusSelector,
    pub exponents: Vec<[Exponent; 2]>,
    pub arc_counts: Vec<usize>,
    /// Allowed relative excess of the amalgam norm over the boundary mean.
    pub tolerance: f64,
}

impl Default for ArcBoundConfig {
    fn default() -> Self {
        Self {
            corpus: CorpusSelector::default(),
            exponents: HlCheckConfig::default().exponents,
            arc_counts: vec![1, 2, 8, 64],
            tolerance: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArcBoundRow {
    pub function: String,
    pub p: f64,
    pub q: f64,
    pub n_arcs: usize,
    pub amalgam: f64,
    pub hardy_norm: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArcBoundReport {
    pub rows: Vec<ArcBoundRow>,
    pub max_ratio: f64,
    pub pass: bool,
}

/// Amalgam norm of boundary arc means against the `H^p` norm.
pub fn run_arc_bound(cfg: &ArcBoundConfig, res: &Resolution) -> Result<ArcBoundReport> {
    let corpus = cfg.corpus.build()?;
    if cfg.arc_counts.contains(&0) {
        return Err(Error::Invalid("arc counts must be positive".into()));
    }
    let mut jobs = Vec::new();
    for [p, q] in &cfg.exponents {
        if !(p.0 < q.0) {
            return Err(Error::Invalid(format!("arc-bound needs p < q, got p = {}, q = {}", p.0, q.0)));
        }
        for f in &corpus {
            for &n in &cfg.arc_counts {
                jobs.push((f, p.0, q.0, n));
            }
        }
    }
    let rows: Vec<ArcBoundRow> = jobs
        .par_iter()
        .map(|&(f, p, q, n)| {
            let amalgam = arc_means_at(&f.series, 1.0, p, n, res)?.lq_norm(q);
            let hardy = if p >= 1.0 {
                hp_norm(&f.series, p)?
            } else {
                crate::means::integral_mean_at(&f.series, 1.0, p, res)?
            };
            Ok(ArcBoundRow {
                function: f.id.clone(),
                p,
                q,
                n_arcs: n,
                amalgam,
                hardy_norm: hardy,
                ratio: ratio(amalgam, hardy),
            })
        })
        .collect::<Result<_>>()?;
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(ArcBoundReport {
        pass: max_ratio <= 1.0 + cfg.tolerance,
        rows,
        max_ratio,
    })
}

// --------------------------------------------------------------- sharpness

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SharpnessConfig {
    /// Only `p = 2` is supported.
    pub p: f64,
    pub q: Vec<Exponent>,
    /// Arc counts `N = 2^0, ..., 2^m`.
    pub m: u32,
    pub k0_max: u32,
    /// Number of unit coefficients in each lacunary candidate.
    pub terms: usize,
    /// A candidate is admissible for `N` when every squared arc mean lies
    /// within a factor `amplitude` of the average `||f||^2 / N`.
    pub amplitude: f64,
    pub slope_tolerance: f64,
}

impl Default for SharpnessConfig {
    fn default() -> Self {
        Self {
            p: 2.0,
            q: vec![Exponent(4.0), Exponent(f64::INFINITY)],
            m: 6,
            k0_max: 10,
            terms: 8,
            amplitude: 2.0,
            slope_tolerance: 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SharpnessRow {
    pub q: f64,
    pub n_arcs: usize,
    pub best_k0: Option<u32>,
    /// `||f||_{H^2} / ||arc means||_{l^q}` for the best admissible candidate.
    pub best_ratio: Option<f64>,
    pub admissible: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SharpnessSummary {
    pub q: f64,
    pub slope: f64,
    pub target: f64,
    /// Arc counts where no `k0 <= k0_max` was admissible.
    pub failure_to_achieve: Vec<usize>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SharpnessReport {
    pub rows: Vec<SharpnessRow>,
    pub summaries: Vec<SharpnessSummary>,
    pub pass: bool,
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Lacunary search for the growth of `||f||_{H^2} / ||arc means||_{l^q}` in `N`.
pub fn run_sharpness(cfg: &SharpnessConfig, res: &Resolution) -> Result<SharpnessReport> {
    if cfg.p != 2.0 {
        return Err(Error::Invalid(format!("sharpness supports p = 2 only, got p = {}", cfg.p)));
    }
    for q in &cfg.q {
        if !(q.0 > 2.0) {
            return Err(Error::Invalid(format!("sharpness needs q > 2, got q = {}", q.0)));
        }
    }
    if cfg.terms == 0 || cfg.amplitude < 1.0 || cfg.m == 0 {
        return Err(Error::Invalid("sharpness needs terms >= 1, amplitude >= 1 and m >= 1".into()));
    }
    let ones = vec![num_complex::Complex64::new(1.0, 0.0); cfg.terms];
    let norm = (cfg.terms as f64).sqrt();
    // (n, k0) -> squared arc means
    let jobs: Vec<(u32, u32)> = (0..=cfg.m).flat_map(|n| (0..=cfg.k0_max).map(move |k| (n, k))).collect();
    let arcs: Vec<Vec<f64>> = jobs
        .par_iter()
        .map(|&(n, k0)| {
            let f = lacunary_series(k0, &ones)?;
            Ok(arc_means_at(&f, 1.0, 2.0, 1 << n, res)?.values)
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for q in &cfg.q {
        let q = q.0;
        let mut points = Vec::new();
        let mut failures = Vec::new();
        for n in 0..=cfg.m {
            let big_n = 1usize << n;
            let avg = norm * norm / big_n as f64;
            let mut best: Option<(u32, f64)> = None;
            let mut admissible = 0;
            for (i, &(nn, k0)) in jobs.iter().enumerate() {
                if nn != n {
                    continue;
                }
                let v = &arcs[i];
                let ok = v.iter().all(|a| {
                    let a2 = a * a;
                    a2 <= cfg.amplitude * avg && a2 * cfg.amplitude >= avg
                });
                if !ok {
                    continue;
                }
                admissible += 1;
                let r = norm / lq_norm(v, q);
                if best.is_none_or(|b| r > b.1) {
                    best = Some((k0, r));
                }
            }
            match best {
                Some((_, r)) if n > 0 => points.push(((big_n as f64).ln(), r.ln())),
                None => failures.push(big_n),
                _ => {}
            }
            rows.push(SharpnessRow {
                q,
                n_arcs: big_n,
                best_k0: best.map(|b| b.0),
                best_ratio: best.map(|b| b.1),
                admissible,
            });
        }
        let slope = if points.len() >= 2 {
            least_squares_slope(&points)
        } else {
            f64::NAN
        };
        let target = 0.5 - 1.0 / q;
        summaries.push(SharpnessSummary {
            q,
            slope,
            target,
            pass: failures.is_empty() && (slope - target).abs() <= cfg.slope_tolerance,
            failure_to_achieve: failures,
        });
    }
    Ok(SharpnessReport {
        pass: summaries.iter().all(|s| s.pass),
        rows,
        summaries,
    })
}

// ------------------------------------------------------------ weight-audit

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WeightAuditConfig {
    pub weight: RadialWeight,
    /// When set, the run fails unless the doubling verdict matches.
    pub expect_doubling: Option<bool>,
}

impl Default for WeightAuditConfig {
    fn default() -> Self {
        Self {
            weight: RadialWeight::standard(0.0),
            expect_doubling: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightAuditReport {
    pub weight: RadialWeight,
    pub audit: WeightAudit,
    pub in_doubling_class: bool,
    pub pass: bool,
}

pub fn run_weight_audit(cfg: &WeightAuditConfig) -> Result<WeightAuditReport> {
    let audit = audit_weight(&cfg.weight)?;
    let in_class = audit.in_doubling_class();
    Ok(WeightAuditReport {
        weight: cfg.weight.clone(),
        pass: cfg.expect_doubling.is_none_or(|e| e == in_class),
        in_doubling_class: in_class,
        audit,
    })
}

// ---------------------------------------------------- littlewood-paley

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LittlewoodPaleyConfig {
    pub corpus: CorpusSelector,
    pub exponents: Vec<[f64; 2]>,
    pub weights: Vec<RadialWeight>,
    /// Largest allowed max/min of the ratio over the corpus.
    pub max_spread: f64,
}

impl Default for LittlewoodPaleyConfig {
    fn default() -> Self {
        Self {
            corpus: CorpusSelector::default(),
            exponents: vec![[2.0, 2.0], [1.0, 2.0], [2.0, 1.0]],
            weights: vec![RadialWeight::standard(0.0), RadialWeight::standard(1.0)],
            max_spread: 25.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LittlewoodPaleyRow {
    pub function: String,
    pub weight: usize,
    pub p: f64,
    pub q: f64,
    pub direct: f64,
    pub derivative_side: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LittlewoodPaleySpread {
    pub weight: usize,
    pub p: f64,
    pub q: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub spread: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LittlewoodPaleyReport {
    pub rows: Vec<LittlewoodPaleyRow>,
    pub spreads: Vec<LittlewoodPaleySpread>,
    pub pass: bool,
}

pub fn run_littlewood_paley(cfg: &LittlewoodPaleyConfig, res: &Resolution) -> Result<LittlewoodPaleyReport> {
    let corpus = cfg.corpus.build()?;
    let weights: Vec<DoublingWeight> = cfg
        .weights
        .iter()
        .cloned()
        .map(DoublingWeight::certify)
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    let mut spreads = Vec::new();
    for (wi, w) in weights.iter().enumerate() {
        for &[p, q] in &cfg.exponents {
            let data: Vec<LittlewoodPaleyRow> = corpus
                .par_iter()
                .map(|f| {
                    let direct = apq_norm_at(&f.series, p, q, w.weight(), res)?.value;
                    let lp = littlewood_paley_norm(&f.series, p, q, w, res)?;
                    Ok(LittlewoodPaleyRow {
                        function: f.id.clone(),
                        weight: wi,
                        p,
                        q,
                        direct,
                        derivative_side: lp,
                        ratio: ratio(lp, direct),
                    })
                })
                .collect::<Result<_>>()?;
            let rs: Vec<f64> = data.iter().filter(|r| r.direct > 0.0).map(|r| r.ratio).collect();
            let min_ratio = rs.iter().copied().fold(f64::INFINITY, f64::min);
            let max_ratio = rs.iter().copied().fold(0.0, f64::max);
            spreads.push(LittlewoodPaleySpread {
                weight: wi,
                p,
                q,
                min_ratio,
                max_ratio,
                spread: max_ratio / min_ratio,
            });
            rows.extend(data);
        }
    }
    Ok(LittlewoodPaleyReport {
        pass: spreads.iter().all(|s| s.spread.is_finite() && s.spread <= cfg.max_spread),
        rows,
        spreads,
    })
}

// -------------------------------------------------------------- multiplier

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MultiplierConfig {
    /// One profile per case is a good choice; instances are split evenly.
    pub profiles: Vec<ProfileSpec>,
    pub instances: usize,
    pub j_max: usize,
    pub trials: usize,
    /// Accepted range `[lo, hi]` of brute force over formula.
    pub bracket: [f64; 2],
}

impl Default for MultiplierConfig {
    fn default() -> Self {
        Self {
            profiles: vec![
                ProfileSpec { p: 1.0, q: 1.0, s: 2.0, t: 2.0 },
                ProfileSpec { p: 4.0, q: 1.0, s: 2.0, t: 2.0 },
                ProfileSpec { p: 1.0, q: 4.0, s: 2.0, t: 2.0 },
                ProfileSpec { p: 4.0, q: 4.0, s: 2.0, t: 2.0 },
            ],
            instances: 100,
            j_max: 2,
            trials: 200,
            bracket: [0.3, 3.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiplierRow {
    pub instance: usize,
    pub case: &'static str,
    pub p: f64,
    pub q: f64,
    pub s: f64,
    pub t: f64,
    pub formula: f64,
    pub bruteforce: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiplierReport {
    pub rows: Vec<MultiplierRow>,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub cases: Vec<&'static str>,
    pub pass: bool,
}

/// Brute-force multiplier norms against the mixed-norm formula on random `K = 2` sequences.
pub fn run_multiplier(cfg: &MultiplierConfig, seed: u64) -> Result<MultiplierReport> {
    if cfg.profiles.is_empty() {
        return Err(Error::Invalid("multiplier needs at least one profile".into()));
    }
    let profiles: Vec<ExponentProfile> = cfg.profiles.iter().map(|p| p.profile()).collect::<Result<_>>()?;
    let rows: Vec<MultiplierRow> = (0..cfg.instances)
        .into_par_iter()
        .map(|i| {
            let pr = profiles[i % profiles.len()];
            let inst_seed = seed.wrapping_mul(1_000_003).wrapping_add(i as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(inst_seed);
            let b = DoubleIndexSeq::from_fn(2, cfg.j_max, |_, _| Exp1.sample(&mut rng))?;
            let (u, v) = pr.multiplier_exponents();
            let formula = lpq_norm(&b, u, v);
            let brute = multiplier_norm_bruteforce(&b, &pr, cfg.trials, inst_seed ^ 0x9e37_79b9)?;
            Ok(MultiplierRow {
                instance: i,
                case: pr.case().label(),
                p: pr.p,
                q: pr.q,
                s: pr.s,
                t: pr.t,
                formula,
                bruteforce: brute,
                ratio: brute / formula,
            })
        })
        .collect::<Result<_>>()?;
    let min_ratio = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let mut cases: Vec<&'static str> = rows.iter().map(|r| r.case).collect();
    cases.sort();
    cases.dedup();
    Ok(MultiplierReport {
        pass: min_ratio >= cfg.bracket[0] && max_ratio <= cfg.bracket[1],
        rows,
        min_ratio,
        max_ratio,
        cases,
    })
}

// ------------------------------------------------------------- paraproduct

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParaproductConfig {
    pub kind: ParaproductKind,
    pub symbol: FunctionSpec,
    pub profile: ProfileSpec,
    pub weight: RadialWeight,
    /// Rings kept in the discrete sequence.
    pub j_max: usize,
    pub families: Vec<TestFamily>,
    /// Largest allowed pairwise ratio between the three quantities.
    pub bracket: f64,
}

impl Default for ParaproductConfig {
    fn default() -> Self {
        Self {
            kind: ParaproductKind::T,
            symbol: FunctionSpec::Monomial { n: 1 },
            profile: ProfileSpec::default(),
            weight: RadialWeight::standard(0.0),
            j_max: 6,
            families: vec![
                TestFamily::Monomials { max_degree: 64 },
                TestFamily::Atoms {
                    j_max: 4,
                    per_ring: 2,
                    order: None,
                },
            ],
            bracket: 50.0,
        }
    }
}

/// The three pairwise ratios; `None` when both sides vanish or one is infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PairRatios {
    pub rho_over_discrete: Option<f64>,
    pub rho_over_lower: Option<f64>,
    pub discrete_over_lower: Option<f64>,
}

impl PairRatios {
    fn new(rho: f64, disc: f64, lower: f64) -> Self {
        let r = |a: f64, b: f64| {
            if (a == 0.0 && b == 0.0) || !a.is_finite() || !b.is_finite() || b == 0.0 {
                None
            } else {
                Some(a / b)
            }
        };
        Self {
            rho_over_discrete: r(rho, disc),
            rho_over_lower: r(rho, lower),
            discrete_over_lower: r(disc, lower),
        }
    }

    pub fn all(&self) -> [Option<f64>; 3] {
        [self.rho_over_discrete, self.rho_over_lower, self.discrete_over_lower]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParaproductReport {
    pub symbol: String,
    pub case: &'static str,
    pub k: u32,
    pub rho: RhoEstimate,
    pub discrete: DiscreteSummary,
    pub lower_bound: NormEstimate,
    pub degeneracy: DegeneracyReport,
    pub ratios: PairRatios,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscreteSummary {
    pub norm: f64,
    pub exponents: (f64, f64),
    pub row_norms: Vec<f64>,
    pub tail_estimate: f64,
    pub tail_flag: bool,
}

impl From<&DiscreteSequence> for DiscreteSummary {
    fn from(d: &DiscreteSequence) -> Self {
        Self {
            norm: d.norm,
            exponents: d.exponents,
            row_norms: d.row_norms.clone(),
            tail_estimate: d.tail_estimate,
            tail_flag: d.tail_flag,
        }
    }
}

pub fn run_paraproduct(cfg: &ParaproductConfig, res: &Resolution) -> Result<ParaproductReport> {
    let profile = cfg.profile.profile()?;
    let g = NamedFunction::from_spec(cfg.symbol.clone())?;
    let w = DoublingWeight::certify(cfg.weight.clone())?;
    if cfg.j_max == 0 {
        return Err(Error::Invalid("j_max must be positive".into()));
    }
    let version = cfg.kind.version();
    let rho_est = rho(&g.series, &profile, &w, version, res)?;
    let disc = match cfg.kind {
        ParaproductKind::T => tg_discrete_seq(&g.series, &profile, &w, cfg.j_max, res)?,
        ParaproductKind::S | ParaproductKind::M => sg_discrete_seq(&g.series, &profile, &w, cfg.j_max, res)?,
    };
    let lower = operator_norm_lower_bound(cfg.kind, &g.series, &profile, &w, &cfg.families, res)?;
    let degeneracy = degeneracy_check(version, &profile, &cfg.weight)?;
    let ratios = PairRatios::new(rho_est.value, disc.norm, lower.lower_bound);
    let within = ratios
        .all()
        .iter()
        .flatten()
        .all(|r| *r <= cfg.bracket && *r >= 1.0 / cfg.bracket);
    Ok(ParaproductReport {
        symbol: g.id,
        case: profile.case().label(),
        k: w.k(),
        rho: rho_est,
        discrete: DiscreteSummary::from(&disc),
        lower_bound: lower,
        degeneracy,
        ratios,
        pass: within,
    })
}

/// Lower bounds from the atom family as the ring depth grows.
pub fn lower_bound_by_depth(
    kind: ParaproductKind,
    g: &FunctionSpec,
    profile: &ProfileSpec,
    weight: &RadialWeight,
    depths: &[usize],
    per_ring: usize,
    res: &Resolution,
) -> Result<Vec<(usize, f64)>> {
    let profile = profile.profile()?;
    let g = g.build()?;
    let w = DoublingWeight::certify(weight.clone())?;
    depths
        .iter()
        .map(|&j| {
            let fam = [TestFamily::Atoms {
                j_max: j,
                per_ring,
                order: None,
            }];
            Ok((j, operator_norm_lower_bound(kind, &g, &profile, &w, &fam, res)?.lower_bound))
        })
        .collect()
}

// ---------------------------------------------------------------- carleson

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CarlesonConfig {
    pub corpus: CorpusSelector,
    pub profile: ProfileSpec,
    /// The weight `omega` of the source space.
    pub weight: RadialWeight,
    /// Derivative order `n`.
    pub derivative: usize,
    /// Path of a measure file; when absent, `mu_r = |G|^s d theta / 2 pi` with `nu` below.
    pub measure_file: Option<String>,
    pub g: FunctionSpec,
    /// Defaults to `weight`.
    pub nu: Option<RadialWeight>,
    pub j_max: usize,
    /// Random sequences for the discrete constant (measure files only).
    pub sequences: usize,
    /// Accepted range of discrete over continuous constants.
    pub bracket: [f64; 2],
}

impl Default for CarlesonConfig {
    fn default() -> Self {
        Self {
            corpus: CorpusSelector::default(),
            profile: ProfileSpec::default(),
            weight: RadialWeight::standard(0.0),
            derivative: 0,
            measure_file: None,
            g: FunctionSpec::Constant { re: 1.0, im: 0.0 },
            nu: None,
            j_max: 5,
            sequences: 16,
            bracket: [0.02, 50.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CarlesonRow {
    /// `continuous` or `discrete`.
    pub side: &'static str,
    pub item: String,
    pub lhs: f64,
    pub norm: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CarlesonReport {
    pub rows: Vec<CarlesonRow>,
    pub continuous_constant: f64,
    pub discrete_constant: f64,
    /// `discrete_constant / continuous_constant`.
    pub ratio: f64,
    pub pass: bool,
}

/// Continuous Carleson-type constants over the corpus against their discrete counterpart.
///
/// `measure` must be supplied by the caller when `measure_file` is set.
pub fn run_carleson(
    cfg: &CarlesonConfig,
    measure: Option<&MeasureSpec>,
    seed: u64,
    res: &Resolution,
) -> Result<CarlesonReport> {
    let profile = cfg.profile.profile()?;
    let corpus = cfg.corpus.build()?;
    let w = DoublingWeight::certify(cfg.weight.clone())?;
    let (p, q, s, t) = (profile.p, profile.q, profile.s, profile.t);
    let n = cfg.derivative;
    if cfg.measure_file.is_some() && measure.is_none() {
        return Err(Error::Invalid("measure file given but no measure supplied".into()));
    }
    let mut rows: Vec<CarlesonRow> = corpus
        .par_iter()
        .map(|f| {
            let lhs = match measure {
                Some(mu) => carleson_measure_lhs(&f.series, mu, n, s, t, res)?,
                None => {
                    let nu = cfg.nu.clone().unwrap_or_else(|| cfg.weight.clone());
                    carleson_continuous_lhs(&f.series, &cfg.g.build()?, n, s, t, &nu, res)?
                }
            };
            let norm = apq_norm_at(&f.series, p, q, w.weight(), res)?.value;
            Ok(CarlesonRow {
                side: "continuous",
                item: f.id.clone(),
                lhs,
                norm,
                ratio: ratio(lhs, norm),
            })
        })
        .collect::<Result<_>>()?;
    match measure {
        None => {
            let nu = cfg.nu.clone().unwrap_or_else(|| cfg.weight.clone());
            let d = g_nu_discrete_seq(&cfg.g.build()?, n, &profile, &w, &nu, cfg.j_max, res)?;
            rows.push(CarlesonRow {
                side: "discrete",
                item: "multiplier".into(),
                lhs: d.norm,
                norm: 1.0,
                ratio: d.norm,
            });
        }
        Some(mu) => {
            let k = w.k();
            let seqs: Vec<(String, DoubleIndexSeq)> = (0..cfg.sequences)
                .map(|i| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(7919).wrapping_add(i as u64));
                    let a = DoubleIndexSeq::from_fn(k, cfg.j_max, |_, _| Exp1.sample(&mut rng))?;
                    Ok((format!("random_{i}"), a))
                })
                .chain(std::iter::once(
                    DoubleIndexSeq::from_fn(k, cfg.j_max, |_, _| 1.0).map(|a| ("ones".to_string(), a)),
                ))
                .collect::<Result<_>>()?;
            for (id, a) in seqs {
                let lhs = carleson_discrete_lhs(&a, mu, &profile, &w, n)?;
                let norm = lpq_norm(&a, p, q);
                rows.push(CarlesonRow {
                    side: "discrete",
                    item: id,
                    lhs,
                    norm,
                    ratio: ratio(lhs, norm),
                });
            }
        }
    }
    let max_of = |side: &str| {
        rows.iter()
            .filter(|r| r.side == side)
            .map(|r| r.ratio)
            .fold(0.0, f64::max)
    };
    let cc = max_of("continuous");
    let dc = max_of("discrete");
    let rr = ratio(dc, cc);
    let pass = (cc == 0.0 && dc == 0.0) || (rr >= cfg.bracket[0] && rr <= cfg.bracket[1]);
    Ok(CarlesonReport {
        rows,
        continuous_constant: cc,
        discrete_constant: dc,
        ratio: rr,
        pass,
    })
}
