mod config;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use mnlab_core::carleson::MeasureSpec;
use mnlab_core::experiments::*;

use config::{FileConfig, Resolved};

#[derive(Parser)]
#[command(name = "mnlab", version, about = "Numerical experiments on mixed-norm spaces of analytic functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone)]
enum Command {
    /// Classical and improved Hardy-Littlewood bounds over a corpus (CSV).
    HlCheck(Common),
    /// Amalgam norms of boundary arc means against H^p norms (CSV).
    ArcBound(Common),
    /// Growth of the lacunary extremal ratio in the number of arcs (CSV).
    Sharpness(Common),
    /// Doubling audits of a radial weight (JSON).
    WeightAudit(Common),
    /// Derivative-side norm against the direct mixed norm (CSV).
    LittlewoodPaley(Common),
    /// Brute-force multiplier norms against the formula (CSV).
    Multiplier(Common),
    /// Symbol functional, discrete sequence and operator lower bound (JSON).
    Paraproduct(Common),
    /// Continuous against discrete Carleson-type constants (CSV).
    Carleson(Common),
}

#[derive(clap::Args, Clone)]
struct Common {
    /// TOML config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Double every sampling grid.
    #[arg(long)]
    refine: bool,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Self::HlCheck(_) => "hl-check",
            Self::ArcBound(_) => "arc-bound",
            Self::Sharpness(_) => "sharpness",
            Self::WeightAudit(_) => "weight-audit",
            Self::LittlewoodPaley(_) => "littlewood-paley",
            Self::Multiplier(_) => "multiplier",
            Self::Paraproduct(_) => "paraproduct",
            Self::Carleson(_) => "carleson",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Self::HlCheck(c)
            | Self::ArcBound(c)
            | Self::Sharpness(c)
            | Self::WeightAudit(c)
            | Self::LittlewoodPaley(c)
            | Self::Multiplier(c)
            | Self::Paraproduct(c)
            | Self::Carleson(c) => c,
        }
    }
}

/// A failed run: exit code 2 for usage, parse and parameter errors.
struct Usage(String);

impl From<mnlab_core::Error> for Usage {
    fn from(e: mnlab_core::Error) -> Self {
        Usage(e.to_string())
    }
}

struct Output {
    path: Option<PathBuf>,
    buf: Vec<u8>,
}

impl Output {
    fn finish(self) -> Result<(), Usage> {
        match self.path {
            Some(p) => std::fs::write(&p, &self.buf).map_err(|e| Usage(format!("cannot write {}: {e}", p.display()))),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(&self.buf)
                    .and_then(|_| out.flush())
                    .map_err(|e| Usage(format!("cannot write output: {e}")))
            }
        }
    }
}

fn csv_report<R: Serialize, C: Serialize>(
    resolved: &Resolved<C>,
    rows: &[R],
    summary: Option<&dyn erased::Json>,
) -> Result<Vec<u8>, Usage> {
    let mut buf = Vec::new();
    writeln!(buf, "# schema_version: {SCHEMA_VERSION}").unwrap();
    writeln!(buf, "# config: {}", serde_json::to_string(resolved).unwrap()).unwrap();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        for r in rows {
            w.serialize(r).map_err(|e| Usage(format!("csv: {e}")))?;
        }
        w.flush().map_err(|e| Usage(format!("csv: {e}")))?;
    }
    if let Some(s) = summary {
        writeln!(buf, "# summary: {}", s.json()).unwrap();
    }
    Ok(buf)
}

mod erased {
    pub trait Json {
        fn json(&self) -> String;
    }
    impl<T: serde::Serialize> Json for T {
        fn json(&self) -> String {
            serde_json::to_string(self).unwrap()
        }
    }
}

#[derive(Serialize)]
struct JsonReport<'a, C: Serialize, R: Serialize> {
    schema_version: u32,
    config: &'a Resolved<C>,
    report: &'a R,
}

fn json_report<C: Serialize, R: Serialize>(resolved: &Resolved<C>, report: &R) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(&JsonReport {
        schema_version: SCHEMA_VERSION,
        config: resolved,
        report,
    })
    .unwrap();
    s.push('\n');
    s.into_bytes()
}

fn resolve<C: Serialize>(name: &str, file: &FileConfig, common: &Common, settings: C) -> Resolved<C> {
    let base = file.resolution.clone();
    Resolved {
        command: name.to_string(),
        seed: common.seed.or(file.seed).unwrap_or(0),
        refine: common.refine,
        resolution: if common.refine { base.refined() } else { base },
        settings,
    }
}

#[derive(Serialize)]
struct SharpnessSummaryOut<'a> {
    summaries: &'a [SharpnessSummary],
    pass: bool,
}

fn run(cmd: Command) -> Result<bool, Usage> {
    let common = cmd.common();
    let config_path = common.config.clone();
    let file = match &config_path {
        Some(p) => config::load(p).map_err(Usage)?,
        None => FileConfig::default(),
    };
    if let Some(c) = &file.command {
        if c != cmd.name() {
            return Err(Usage(format!("config is for command '{c}', not '{}'", cmd.name())));
        }
    }
    let out_path = common.out.clone().or(file.output.clone());
    let name = cmd.name();
    let (buf, pass) = match &cmd {
        Command::HlCheck(_) => {
            let r = resolve(name, &file, common, file.hl_check.clone().unwrap_or_default());
            let rep = run_hl_check(&r.settings, &r.resolution)?;
            #[derive(Serialize)]
            struct S<'a> {
                max_improved: &'a [(f64, f64, f64)],
                violations: usize,
                pass: bool,
            }
            let s = S {
                max_improved: &rep.max_improved,
                violations: rep.violations,
                pass: rep.pass,
            };
            (csv_report(&r, &rep.rows, Some(&s))?, rep.pass)
        }
        Command::ArcBound(_) => {
            let r = resolve(name, &file, common, file.arc_bound.clone().unwrap_or_default());
            let rep = run_arc_bound(&r.settings, &r.resolution)?;
            #[derive(Serialize)]
            struct S {
                max_ratio: f64,
                pass: bool,
            }
            let s = S {
                max_ratio: rep.max_ratio,
                pass: rep.pass,
            };
            (csv_report(&r, &rep.rows, Some(&s))?, rep.pass)
        }
        Command::Sharpness(_) => {
            let r = resolve(name, &file, common, file.sharpness.clone().unwrap_or_default());
            let rep = run_sharpness(&r.settings, &r.resolution)?;
            let s = SharpnessSummaryOut {
                summaries: &rep.summaries,
                pass: rep.pass,
            };
            (csv_report(&r, &rep.rows, Some(&s))?, rep.pass)
        }
        Command::WeightAudit(_) => {
            let r = resolve(name, &file, common, file.weight_audit.clone().unwrap_or_default());
            let rep = run_weight_audit(&r.settings)?;
            (json_report(&r, &rep), rep.pass)
        }
        Command::LittlewoodPaley(_) => {
            let r = resolve(name, &file, common, file.littlewood_paley.clone().unwrap_or_default());
            let rep = run_littlewood_paley(&r.settings, &r.resolution)?;
            #[derive(Serialize)]
            struct S<'a> {
                spreads: &'a [LittlewoodPaleySpread],
                pass: bool,
            }
            let s = S {
                spreads: &rep.spreads,
                pass: rep.pass,
            };
            (csv_report(&r, &rep.rows, Some(&s))?, rep.pass)
        }
        Command::Multiplier(_) => {
            let r = resolve(name, &file, common, file.multiplier.clone().unwrap_or_default());
            let rep = run_multiplier(&r.settings, r.seed)?;
            #[derive(Serialize)]
            struct S<'a> {
                min_ratio: f64,
                max_ratio: f64,
                cases: &'a [&'static str],
                pass: bool,
            }
            let s = S {
                min_ratio: rep.min_ratio,
                max_ratio: rep.max_ratio,
                cases: &rep.cases,
                pass: rep.pass,
            };
            (csv_report(&r, &rep.rows, Some(&s))?, rep.pass)
        }
        Command::Paraproduct(_) => {
            let r = resolve(name, &file, common, file.paraproduct.clone().unwrap_or_default());
            let rep = run_paraproduct(&r.settings, &r.resolution)?;
            (json_report(&r, &rep), rep.pass)
        }
        Command::Carleson(_) => {
            let r = resolve(name, &file, common, file.carleson.clone().unwrap_or_default());
            let measure = match &r.settings.measure_file {
                Some(m) => Some(load_measure(m, config_path.as_deref())?),
                None => None,
            };
            let rep = run_carleson(&r.settings, measure.as_ref(), r.seed, &r.resolution)?;
            #[derive(Serialize)]
            struct S {
                continuous_constant: f64,
                discrete_constant: f64,
                ratio: f64,
                pass: bool,
            }
            let s = S {
                continuous_constant: rep.continuous_constant,
                discrete_constant: rep.discrete_constant,
                ratio: rep.ratio,
                pass: rep.pass,
            };
            (csv_report(&r, &rep.rows, Some(&s))?, rep.pass)
        }
    };
    Output { path: out_path, buf }.finish()?;
    Ok(pass)
}

/// Measure paths are relative to the config file.
fn load_measure(path: &str, config: Option<&Path>) -> Result<MeasureSpec, Usage> {
    let p = Path::new(path);
    let full = match config.and_then(Path::parent) {
        Some(dir) if p.is_relative() => dir.join(p),
        _ => p.to_path_buf(),
    };
    let text =
        std::fs::read_to_string(&full).map_err(|e| Usage(format!("cannot read measure file {}: {e}", full.display())))?;
    MeasureSpec::from_toml(&text).map_err(|e| Usage(format!("{}: {e}", full.display())))
}

fn init_threads() -> Result<(), Usage> {
    if let Ok(v) = std::env::var("MNLAB_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| Usage(format!("MNLAB_THREADS must be a positive integer, got '{v}'")))?;
        if n == 0 {
            return Err(Usage("MNLAB_THREADS must be a positive integer, got 0".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Usage(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|_| run(cli.command));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("mnlab: acceptance check failed, see the report");
            ExitCode::from(1)
        }
        Err(Usage(msg)) => {
            eprintln!("mnlab: {msg}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use mnlab_core::Resolution;

    #[test]
    fn resolve_applies_overrides() {
        let file = FileConfig {
            seed: Some(5),
            ..Default::default()
        };
        let common = Common {
            config: None,
            refine: true,
            seed: Some(9),
            out: None,
        };
        let r = resolve("x", &file, &common, ());
        assert_eq!(r.seed, 9);
        assert_eq!(r.resolution, Resolution::default().refined());
    }
}
