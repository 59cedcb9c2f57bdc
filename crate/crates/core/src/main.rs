use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use riesz_morrey::harness::{self, emit_report, ExperimentConfig, OutputFormat};
use riesz_morrey::operators::riesz_apply;
use riesz_morrey::report::ConditionReport;
use riesz_morrey::spaces::{
    default_threshold_grid, morrey_norm_local, weak_morrey_norm_local, NormResult,
};
use riesz_morrey::{Error, Result};

#[derive(Parser)]
#[command(
    name = "riesz-morrey",
    version,
    about = "Riesz potentials on weighted local Morrey spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tail, growth and doubling conditions of the kernel.
    CheckKernel(Common),
    /// A_{p,q} class, Hölder lower bound and reverse doubling of the weight.
    CheckWeight(Common),
    /// Every condition the config has data for.
    CheckConditions(Common),
    /// Local Morrey norms of the configured functions at x0.
    Norm(Common),
    /// The potential of one function at the configured points (CSV).
    Potential {
        #[command(flatten)]
        common: Common,
        /// Function id; defaults to the first function of the config.
        #[arg(long)]
        function: Option<String>,
    },
    /// Run the experiment named by the config's `kind`.
    Experiment(Common),
}

#[derive(Args)]
struct Common {
    /// Experiment config (TOML).
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Start from a named preset instead of a file.
    #[arg(long)]
    preset: Option<String>,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Multiply the resolution of the radius grids.
    #[arg(long)]
    refine: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => OutputFormat::Json,
            Format::Csv => OutputFormat::Csv,
        }
    }
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = match (&self.config, &self.preset) {
            (Some(p), _) => ExperimentConfig::from_path(p)?,
            (None, Some(name)) => ExperimentConfig::preset(name)?,
            (None, None) => {
                return Err(Error::Config(
                    "pass --config <path> or --preset <name>".into(),
                ))
            }
        };
        if let Some(f) = self.refine {
            cfg.refine(f);
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        Ok(cfg)
    }

    fn format(&self, cfg: &ExperimentConfig) -> OutputFormat {
        self.format
            .map(Into::into)
            .or_else(|| cfg.output.as_ref().map(|o| o.format))
            .unwrap_or(OutputFormat::Json)
    }

    fn out(&self, cfg: &ExperimentConfig) -> Option<PathBuf> {
        self.out
            .clone()
            .or_else(|| cfg.output.as_ref().map(|o| PathBuf::from(&o.path)))
    }
}

fn write_out(text: &str, out: Option<PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(&path, text).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Error::Config(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn conditions_csv(reports: &[ConditionReport]) -> String {
    let mut s = String::from("id,holds,empirical_c,stable\n");
    for r in reports {
        let c = r
            .empirical_c
            .finite()
            .map_or("inf".to_string(), |v| v.to_string());
        s.push_str(&format!("{},{},{},{}\n", r.id, r.holds, c, r.stable));
    }
    s
}

fn emit_conditions(
    common: &Common,
    cfg: &ExperimentConfig,
    reports: &[ConditionReport],
) -> Result<i32> {
    let text = match common.format(cfg) {
        OutputFormat::Json => json(&reports)?,
        OutputFormat::Csv => conditions_csv(reports),
    };
    write_out(&text, common.out(cfg))?;
    Ok(if reports.iter().all(|r| r.holds) {
        0
    } else {
        1
    })
}

#[derive(Serialize)]
struct NormRow {
    function_id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    strong: Option<NormResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    weak: Option<NormResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn norms(cfg: &ExperimentConfig) -> Result<Vec<NormRow>> {
    let e = cfg.exponent_set()?;
    let w = cfg.weight.build(cfg.n)?;
    let x0 = cfg.x0_point()?;
    let phi = match (&cfg.phi1, &cfg.phi) {
        (Some(p), _) => p.build(cfg.n, e.p)?,
        (None, Some(p)) => p.build(cfg.n, 1.0)?.pow(1.0 / e.p),
        (None, None) => return Err(Error::Config("norm needs `phi1` or `phi`".into())),
    };
    Ok(cfg
        .functions
        .iter()
        .map(|spec| {
            let r = spec.build(cfg.n).and_then(|f| {
                let strong = morrey_norm_local(&f, e.p, &phi, &w, e.p, &x0, &cfg.r_grid)?;
                let lam = default_threshold_grid(&f);
                let weak = weak_morrey_norm_local(&f, e.p, &phi, &w, e.p, &x0, &cfg.r_grid, &lam)?;
                Ok((strong, weak))
            });
            match r {
                Ok((s, w)) => NormRow {
                    function_id: spec.id.clone(),
                    strong: Some(s),
                    weak: Some(w),
                    error: None,
                },
                Err(e) => NormRow {
                    function_id: spec.id.clone(),
                    strong: None,
                    weak: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect())
}

fn potential_csv(cfg: &ExperimentConfig, function: Option<&str>) -> Result<String> {
    let spec = match function {
        Some(id) => cfg.functions.iter().find(|f| f.id == id),
        None => cfg.functions.first(),
    }
    .ok_or_else(|| Error::Config("no such function in the config".into()))?;
    let f = spec.build(cfg.n)?;
    let kernel = cfg
        .kernel
        .as_ref()
        .ok_or_else(|| Error::Config("missing `kernel`".into()))?
        .build(cfg.n)?;
    let points: Vec<Vec<f64>> = if cfg.points.is_empty() {
        cfg.r_grid
            .points()
            .into_iter()
            .map(|t| {
                let mut p = vec![0.0; cfg.n];
                p[0] = t;
                p
            })
            .collect()
    } else {
        cfg.points.clone()
    };
    let mut s = String::from("x,value,est_error\n");
    for p in points {
        let x = riesz_morrey::geom::Point::new(&p)?;
        let v = riesz_apply(&f, &kernel, &x, &cfg.quadrature)?;
        let coords: Vec<String> = p.iter().map(|c| c.to_string()).collect();
        s.push_str(&format!(
            "{},{},{}\n",
            coords.join(";"),
            v.value,
            v.est_error
        ));
    }
    Ok(s)
}

fn execute(cmd: &Command) -> Result<i32> {
    match cmd {
        Command::CheckKernel(c) => {
            let cfg = c.load()?;
            emit_conditions(c, &cfg, &harness::kernel_reports(&cfg)?)
        }
        Command::CheckWeight(c) => {
            let cfg = c.load()?;
            emit_conditions(c, &cfg, &harness::weight_reports(&cfg)?)
        }
        Command::CheckConditions(c) => {
            let cfg = c.load()?;
            let (conditions, diagnostics) = harness::condition_reports(&cfg)?;
            if matches!(c.format(&cfg), OutputFormat::Csv) {
                let all: Vec<ConditionReport> =
                    conditions.iter().chain(&diagnostics).cloned().collect();
                write_out(&conditions_csv(&all), c.out(&cfg))?;
            } else {
                #[derive(Serialize)]
                struct Out<'a> {
                    conditions: &'a [ConditionReport],
                    diagnostics: &'a [ConditionReport],
                }
                write_out(
                    &json(&Out {
                        conditions: &conditions,
                        diagnostics: &diagnostics,
                    })?,
                    c.out(&cfg),
                )?;
            }
            Ok(if conditions.iter().all(|r| r.holds) {
                0
            } else {
                1
            })
        }
        Command::Norm(c) => {
            let cfg = c.load()?;
            write_out(&json(&norms(&cfg)?)?, c.out(&cfg))?;
            Ok(0)
        }
        Command::Potential { common, function } => {
            let cfg = common.load()?;
            write_out(&potential_csv(&cfg, function.as_deref())?, common.out(&cfg))?;
            Ok(0)
        }
        Command::Experiment(c) => {
            let cfg = c.load()?;
            let report = harness::run(&cfg)?;
            let format = c.format(&cfg);
            match c.out(&cfg) {
                Some(path) => emit_report(&report, format, &path)?,
                None => print!("{}", report.render(format)?),
            }
            eprintln!("verdict: {:?}", report.verdict);
            Ok(report.verdict.exit_code())
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_)
        | Error::Io { .. }
        | Error::InvalidParameter(_)
        | Error::EmptyGrid
        | Error::Unsupported(_) => 2,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let code = match execute(&cli.command) {
        Ok(c) => c as u8,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    };
    eprintln!("elapsed: {:.2}s", start.elapsed().as_secs_f64());
    ExitCode::from(code)
}
