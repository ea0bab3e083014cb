mod report;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use copula_dep::evc::{cap_function, h_map};
use copula_dep::properties::check_rect;
use copula_dep::registry::{self, Built, Family};
use copula_dep::sampler::{format_g17, sample, write_csv};
use copula_dep::{Error, GridConfig, Property, Rectangle, Spacing, Tolerances};

use crate::report::{Entry, Report};

#[derive(Parser)]
#[command(
    name = "copula-dep",
    version,
    about = "Positive dependence properties of bivariate copulas"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a family against all six properties.
    Classify(Common),
    /// Check one property, optionally on a single rectangle.
    Check {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        property: Property,
        /// Evaluate the defect on `u1,u2,v1,v2` only.
        #[arg(long, value_parser = parse_rect)]
        rect: Option<Rectangle>,
    },
    /// Construct a violating rectangle.
    Witness {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "mktp2")]
        property: Property,
    },
    /// Draw a sample by conditional inversion and write `u,v` CSV.
    Sample {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write `u,v,value` CSV of a quantity on the grid.
    GridExport {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "cdf")]
        quantity: Quantity,
    },
}

#[derive(Args)]
struct FamilyArgs {
    #[arg(long)]
    family: String,
    /// `key=value[,key=value]`
    #[arg(long, default_value = "")]
    param: String,
}

#[derive(Args)]
struct Common {
    #[command(flatten)]
    family: FamilyArgs,
    /// Points per axis.
    #[arg(long, default_value_t = 256)]
    grid: usize,
    #[arg(long, default_value_t = 0.005)]
    margin: f64,
    #[arg(long, default_value_t = 1e-9)]
    tol_strict: f64,
    #[arg(long, default_value_t = 1e-12)]
    tol_eq: f64,
    #[arg(long, value_enum, default_value = "uniform")]
    spacing: SpacingArg,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Include wall-clock time in the report.
    #[arg(long)]
    timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpacingArg {
    Uniform,
    Logit,
}

#[derive(Clone, Copy, ValueEnum)]
enum Quantity {
    Cdf,
    Kernel,
    Density,
    #[value(name = "fa", alias = "FA")]
    Fa,
}

fn parse_rect(s: &str) -> Result<Rectangle, String> {
    let xs: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("'{x}': {e}")))
        .collect::<Result<_, _>>()?;
    let [u1, u2, v1, v2] = xs[..] else {
        return Err(format!("expected u1,u2,v1,v2, got {} numbers", xs.len()));
    };
    Rectangle::new(u1, u2, v1, v2).map_err(|e| e.to_string())
}

/// Exit 2 for usage errors, 3 when a witness is not applicable.
struct Failure {
    code: u8,
    err: anyhow::Error,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParameter(_) | Error::Validation { .. } | Error::UnknownFamily(_) => 2,
            Error::NotApplicable(_) => 3,
            _ => 1,
        };
        Failure { code, err: e.into() }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(err: anyhow::Error) -> Self {
        Failure { code: 1, err }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure { code: 1, err: e.into() }
    }
}

impl FamilyArgs {
    fn build(&self) -> Result<(Built, BTreeMap<String, f64>), Failure> {
        let params = registry::parse_params(&self.param)?;
        Ok((registry::build(&self.family, &params)?, params))
    }
}

impl Common {
    fn grid(&self) -> Result<GridConfig, Failure> {
        let g = GridConfig {
            n_u: self.grid,
            n_v: self.grid,
            margin: self.margin,
            tol_eq: self.tol_eq,
            tol_strict: self.tol_strict,
            spacing: match self.spacing {
                SpacingArg::Uniform => Spacing::Uniform,
                SpacingArg::Logit => Spacing::Logit,
            },
            region: None,
        };
        g.validate()?;
        Ok(g)
    }
}

fn open_out(out: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit(report: Report, out: &Option<PathBuf>) -> Result<(), Failure> {
    eprintln!("{}: {}", report.label, report.summary().replace('\n', "; "));
    let mut w = open_out(out)?;
    serde_json::to_writer_pretty(&mut w, &report).context("serializing report")?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn report(
    command: &'static str,
    common: &Common,
    built: &Built,
    params: BTreeMap<String, f64>,
    grid: GridConfig,
) -> Report {
    Report {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command,
        family: built.name.clone(),
        label: built.copula().label(),
        params,
        grid,
        entries: Vec::new(),
        archimedean: None,
        evc: None,
        timing_ms: common.timing.then_some(0.0),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let start = Instant::now();
    let elapsed = |r: &mut Report| {
        if r.timing_ms.is_some() {
            r.timing_ms = Some(start.elapsed().as_secs_f64() * 1e3);
        }
    };
    match cli.command {
        Command::Classify(common) => {
            let (built, params) = common.family.build()?;
            let grid = common.grid()?;
            let c = registry::classify(&built, &grid)?;
            let mut r = report("classify", &common, &built, params, grid);
            r.entries = c.entries.into_iter().map(|(p, v)| Entry::new(p, v)).collect();
            r.archimedean = c.archimedean;
            r.evc = c.evc;
            elapsed(&mut r);
            emit(r, &common.out)
        }
        Command::Check { common, property, rect } => {
            let (built, params) = common.family.build()?;
            let grid = common.grid()?;
            let v = match rect {
                Some(rect) => check_rect(built.copula(), property, &rect, Tolerances::from(&grid))?,
                None => registry::check_property(&built, property, &grid)?,
            };
            let mut r = report("check", &common, &built, params, grid);
            r.entries.push(Entry::new(property, v));
            elapsed(&mut r);
            emit(r, &common.out)
        }
        Command::Witness { common, property } => {
            let (built, params) = common.family.build()?;
            let grid = common.grid()?;
            let v = registry::witness(&built, property, &grid)?;
            let mut r = report("witness", &common, &built, params, grid);
            r.entries.push(Entry::new(property, v));
            elapsed(&mut r);
            emit(r, &common.out)
        }
        Command::Sample { family, n, seed, out } => {
            let (built, _) = family.build()?;
            let batch = sample(built.copula(), n, seed)?;
            write_csv(&batch, open_out(&out)?)?;
            Ok(())
        }
        Command::GridExport { common, quantity } => {
            let (built, _) = common.family.build()?;
            let grid = common.grid()?;
            let c = built.copula();
            let value: Box<dyn Fn(f64, f64) -> f64> = match quantity {
                Quantity::Cdf => Box::new(|u, v| c.cdf(u, v)),
                Quantity::Kernel => Box::new(|u, v| c.kernel(u, v)),
                Quantity::Density => {
                    if !c.has_density() {
                        return Err(Error::InvalidParameter(format!("{} has no density", c.label())).into());
                    }
                    Box::new(|u, v| c.density(u, v).unwrap_or(f64::NAN))
                }
                Quantity::Fa => match &built.family {
                    Family::Evc(e) => Box::new(move |u, v| cap_function(&e.spec, h_map(u, v))),
                    _ => {
                        return Err(Error::InvalidParameter(format!(
                            "fa is defined for extreme value families only, not {}",
                            built.name
                        ))
                        .into())
                    }
                },
            };
            let mut w = open_out(&common.out)?;
            writeln!(w, "u,v,value")?;
            for u in grid.u_axis() {
                for v in grid.v_axis() {
                    writeln!(w, "{},{},{}", format_g17(u), format_g17(v), format_g17(value(u, v)))?;
                }
            }
            w.flush()?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = std::env::var("COPULA_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
    {
        if n > 0 {
            // ignore a pool that is already initialised
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { code, err }) => {
            eprintln!("error: {err:#}");
            ExitCode::from(code)
        }
    }
}
