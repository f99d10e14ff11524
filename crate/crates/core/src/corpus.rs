//! Named test functions and the standard 20-function corpus.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{geometric_kernel, lacunary_series, log_kernel, PowerSeries};

/// A function given by a short description, as used in config files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    Constant {
        re: f64,
        #[serde(default)]
        im: f64,
    },
    Monomial {
        n: usize,
    },
    /// Real coefficients, lowest degree first.
    Polynomial {
        coeffs: Vec<f64>,
    },
    /// `1/(1-z)^power` truncated at `degree`.
    Geometric {
        power: u32,
        degree: usize,
    },
    /// `log(1/(1-z))` truncated at `degree`.
    LogKernel {
        degree: usize,
    },
    /// `sum_k coeffs[k] z^{2^{k0+k}}`.
    Lacunary {
        k0: u32,
        coeffs: Vec<f64>,
    },
    /// Independent complex Gaussian coefficients scaled by `(degree+1)^{-1/2}`.
    Random {
        degree: usize,
        seed: u64,
    },
}

fn fmt_num(x: f64) -> String {
    format!("{x}")
}

impl FunctionSpec {
    /// Short identifier used in reports.
    pub fn id(&self) -> String {
        match self {
            Self::Constant { re, im } if *im == 0.0 => format!("const_{}", fmt_num(*re)),
            Self::Constant { re, im } => format!("const_{}{:+}i", fmt_num(*re), im),
            Self::Monomial { n } => format!("z^{n}"),
            Self::Polynomial { coeffs } => format!("poly_{}", coeffs.iter().map(|c| fmt_num(*c)).collect::<Vec<_>>().join("_")),
            Self::Geometric { power, degree } => format!("geom{power}_{degree}"),
            Self::LogKernel { degree } => format!("log_{degree}"),
            Self::Lacunary { k0, coeffs } => format!("lac_{k0}_{}", coeffs.len()),
            Self::Random { degree, seed } => format!("rand_{degree}_s{seed}"),
        }
    }

    pub fn build(&self) -> Result<PowerSeries> {
        match self {
            Self::Constant { re, im } => PowerSeries::new(vec![Complex64::new(*re, *im)]),
            Self::Monomial { n } => Ok(PowerSeries::monomial(*n, Complex64::new(1.0, 0.0))),
            Self::Polynomial { coeffs } => PowerSeries::from_real(coeffs),
            Self::Geometric { power, degree } => geometric_kernel(*power, *degree),
            Self::LogKernel { degree } => Ok(log_kernel(*degree)),
            Self::Lacunary { k0, coeffs } => {
                let c: Vec<Complex64> = coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect();
                lacunary_series(*k0, &c)
            }
            Self::Random { degree, seed } => {
                if *degree > 1 << 16 {
                    return Err(Error::Invalid(format!("random polynomial degree {degree} too large")));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let scale = 1.0 / ((degree + 1) as f64).sqrt();
                let c = (0..=*degree)
                    .map(|_| {
                        let re: f64 = StandardNormal.sample(&mut rng);
                        let im: f64 = StandardNormal.sample(&mut rng);
                        Complex64::new(re, im) * scale
                    })
                    .collect();
                PowerSeries::new(c)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NamedFunction {
    pub id: String,
    pub spec: FunctionSpec,
    pub series: PowerSeries,
}

impl NamedFunction {
    pub fn from_spec(spec: FunctionSpec) -> Result<Self> {
        Ok(Self {
            id: spec.id(),
            series: spec.build()?,
            spec,
        })
    }
}

/// Which functions an experiment runs over.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CorpusSelector {
    /// `"standard"` selects [`standard_corpus`].
    Named(String),
    List(Vec<FunctionSpec>),
}

impl Default for CorpusSelector {
    fn default() -> Self {
        Self::Named("standard".into())
    }
}

impl CorpusSelector {
    pub fn specs(&self) -> Result<Vec<FunctionSpec>> {
        match self {
            Self::Named(name) if name == "standard" => Ok(standard_corpus_specs()),
            Self::Named(name) => Err(Error::Invalid(format!("unknown corpus '{name}', expected \"standard\" or a list"))),
            Self::List(v) if v.is_empty() => Err(Error::Invalid("corpus list is empty".into())),
            Self::List(v) => Ok(v.clone()),
        }
    }

    pub fn build(&self) -> Result<Vec<NamedFunction>> {
        self.specs()?.into_iter().map(NamedFunction::from_spec).collect()
    }
}

pub fn standard_corpus_specs() -> Vec<FunctionSpec> {
    use FunctionSpec::*;
    vec![
        Constant { re: 1.0, im: 0.0 },
        Constant { re: 2.0, im: -1.0 },
        Monomial { n: 1 },
        Monomial { n: 2 },
        Monomial { n: 7 },
        Monomial { n: 16 },
        Monomial { n: 64 },
        Polynomial { coeffs: vec![1.0, 1.0] },
        Geometric { power: 1, degree: 64 },
        Geometric { power: 1, degree: 256 },
        Geometric { power: 2, degree: 64 },
        Geometric { power: 2, degree: 256 },
        Lacunary { k0: 0, coeffs: vec![1.0; 7] },
        Lacunary {
            k0: 1,
            coeffs: (1..=8).map(|k| 1.0 / k as f64).collect(),
        },
        Lacunary {
            k0: 3,
            coeffs: vec![1.0, -1.0, 1.0, -1.0, 1.0],
        },
        Random { degree: 16, seed: 1 },
        Random { degree: 32, seed: 2 },
        Random { degree: 64, seed: 3 },
        Random { degree: 128, seed: 4 },
        LogKernel { degree: 128 },
    ]
}

/// The 20 standard test functions: constants, monomials up to degree 64,
/// truncated `1/(1-z)` and `1/(1-z)^2`, lacunary series, seeded random
/// polynomials and a truncated logarithm.
pub fn standard_corpus() -> Vec<NamedFunction> {
    standard_corpus_specs()
        .into_iter()
        .map(|s| NamedFunction::from_spec(s).expect("standard corpus entries are valid"))
        .collect()
}
