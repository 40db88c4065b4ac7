mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dbr_lab_core::blaschke::Family;
use dbr_lab_core::clark::clark_atoms;
use dbr_lab_core::hardy::OuterMode;
use dbr_lab_core::scenario::{
    parse_coeffs, parse_complex, Defaults, Format, InnerSpec, RationalSpec, Registry, RunConfig,
    ScenarioConfig, ScenarioReport, SpaceSpec, SCHEMA, VERSION,
};
use dbr_lab_core::C64;
use rayon::prelude::*;
use serde_json::json;

const EXIT_FAIL: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(name = "dbr-lab", version, about = "Numerical checks for de Branges-Rovnyak spaces of finite Blaschke products")]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,

    /// Worker threads (DBR_LAB_JOBS takes precedence)
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Text => Format::Text,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run every scenario in a TOML or JSON config file
    Run {
        config: PathBuf,
        /// Include wall-clock timings in the report
        #[arg(long)]
        timings: bool,
    },
    /// Run one scenario described by flags
    Verify {
        kind: String,
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        extra: ExtraArgs,
    },
    /// Clark measures
    Clark {
        #[command(subcommand)]
        command: ClarkCommand,
    },
    /// Cyclic vectors
    Cyclic {
        #[command(subcommand)]
        command: CyclicCommand,
    },
    /// Schur-Cohn zero counting
    Cohn {
        #[command(subcommand)]
        command: CohnCommand,
    },
    /// Report files
    Report {
        #[command(subcommand)]
        command: ReportCommand,
    },
}

#[derive(Subcommand)]
enum ClarkCommand {
    /// Atoms and masses of the Clark measure of I at lambda
    Atoms {
        #[arg(long)]
        inner: String,
        /// `re,im` or a complex literal
        #[arg(long, default_value = "1,0")]
        lambda: String,
    },
}

#[derive(Subcommand)]
enum CyclicCommand {
    /// Atom criterion against the density oracle for one function
    Test {
        #[command(flatten)]
        space: SpaceArgs,
        /// `num-coeffs/den-coeffs`, lowest degree first
        #[arg(long)]
        f: String,
        #[arg(long, value_enum, default_value = "strict")]
        mode: ModeArg,
    },
}

#[derive(Subcommand)]
enum CohnCommand {
    /// Zeros in the closed unit disk
    Count {
        /// Coefficients, lowest degree first
        #[arg(long)]
        coeffs: String,
    },
}

#[derive(Subcommand)]
enum ReportCommand {
    /// Concatenate JSON line reports, renumbering scenarios in file order
    Merge {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Strict,
    Lenient,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::One => Family::One,
            FamilyArg::Two => Family::Two,
        }
    }
}

#[derive(Args)]
struct SpaceArgs {
    /// `monomial:d` or `zeros:z1;z2;...`
    #[arg(long)]
    inner: Option<String>,
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    #[arg(long)]
    n: Option<usize>,
    /// Truncation order N
    #[arg(long)]
    trunc: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ExtraArgs {
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    f: Option<String>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long)]
    coeffs: Option<String>,
    /// Second space for set-eq
    #[arg(long)]
    other_inner: Option<String>,
    #[arg(long, value_enum)]
    other_family: Option<FamilyArg>,
    #[arg(long)]
    other_n: Option<usize>,
    #[arg(long)]
    probes: Option<usize>,
    /// Tolerance override `key=value`, repeatable
    #[arg(long = "tol")]
    tolerances: Vec<String>,
}

type Fallible<T> = std::result::Result<T, String>;

fn parse_lambda(s: &str) -> Fallible<C64> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [re, im] => Ok(C64::new(
            re.trim().parse().map_err(|_| format!("bad lambda `{s}`"))?,
            im.trim().parse().map_err(|_| format!("bad lambda `{s}`"))?,
        )),
        [z] => parse_complex(z).map_err(|e| e.to_string()),
        _ => Err(format!("bad lambda `{s}`")),
    }
}

fn mode(m: ModeArg) -> OuterMode {
    match m {
        ModeArg::Strict => OuterMode::Strict,
        ModeArg::Lenient => OuterMode::Lenient,
    }
}

fn apply_space(cfg: &mut ScenarioConfig, s: &SpaceArgs) -> Fallible<()> {
    if let Some(i) = &s.inner {
        cfg.inner = Some(i.parse::<InnerSpec>().map_err(|e| e.to_string())?);
    }
    cfg.family = s.family.map(Into::into);
    cfg.n = s.n;
    cfg.trunc = s.trunc;
    cfg.seed = s.seed;
    Ok(())
}

fn apply_extra(cfg: &mut ScenarioConfig, x: &ExtraArgs) -> Fallible<()> {
    if let Some(l) = &x.lambda {
        cfg.lambda = Some(parse_lambda(l)?);
    }
    if let Some(f) = &x.f {
        cfg.f = Some(f.parse::<RationalSpec>().map_err(|e| e.to_string())?);
    }
    cfg.mode = x.mode.map(mode);
    if let Some(c) = &x.coeffs {
        cfg.coeffs = Some(parse_coeffs(c).map_err(|e| e.to_string())?);
    }
    if let Some(i) = &x.other_inner {
        cfg.other = Some(SpaceSpec {
            family: x.other_family.map(Into::into).unwrap_or(Family::One),
            inner: i.parse().map_err(|e: dbr_lab_core::Error| e.to_string())?,
            n: x.other_n.unwrap_or(0),
        });
    }
    cfg.probes = x.probes;
    for t in &x.tolerances {
        let (k, v) = t
            .split_once('=')
            .ok_or_else(|| format!("tolerance `{t}`: expected key=value"))?;
        let v: f64 = v.trim().parse().map_err(|_| format!("tolerance `{t}`: bad value"))?;
        cfg.tolerances.insert(k.trim().to_string(), v);
    }
    Ok(())
}

fn jobs(flag: Option<usize>) -> Fallible<usize> {
    match std::env::var("DBR_LAB_JOBS") {
        Ok(v) => v
            .trim()
            .parse()
            .ok()
            .filter(|&n: &usize| n > 0)
            .ok_or_else(|| format!("DBR_LAB_JOBS = `{v}` is not a positive integer")),
        Err(_) => Ok(flag.unwrap_or(0)),
    }
}

fn run_scenarios(
    registry: &Registry,
    config: &RunConfig,
    jobs: usize,
    timings: bool,
) -> Fallible<Vec<ScenarioReport>> {
    let scenarios = config.resolve(registry).map_err(|e| e.to_string())?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| e.to_string())?;
    Ok(pool.install(|| {
        scenarios
            .par_iter()
            .enumerate()
            .map(|(i, s)| registry.run_one(i, s, timings))
            .collect()
    }))
}

fn emit(reports: &[ScenarioReport], format: Format) -> ExitCode {
    print!("{}", render::render(reports, format));
    if reports.iter().all(|r| r.pass) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    }
}

fn single(cfg: ScenarioConfig) -> RunConfig {
    RunConfig { defaults: Defaults::default(), scenarios: vec![cfg] }
}

fn merge(files: &[PathBuf]) -> Fallible<Vec<ScenarioReport>> {
    let mut out = Vec::new();
    for path in files {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        for (line_no, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let mut r: ScenarioReport = serde_json::from_str(line)
                .map_err(|e| format!("{}:{}: {e}", path.display(), line_no + 1))?;
            if r.schema != SCHEMA {
                return Err(format!("{}:{}: unsupported schema {}", path.display(), line_no + 1, r.schema));
            }
            r.index = out.len();
            out.push(r);
        }
    }
    Ok(out)
}

fn clark_table(inner: &str, lambda: &str, format: Format) -> Fallible<String> {
    let spec: InnerSpec = inner.parse().map_err(|e: dbr_lab_core::Error| e.to_string())?;
    let lambda = parse_lambda(lambda)?;
    let inner = spec.build().map_err(|e| e.to_string())?;
    if (lambda.norm() - 1.0).abs() > 1e-12 {
        return Err(format!("lambda must be unimodular, |lambda| = {}", lambda.norm()));
    }
    let atoms = clark_atoms(&inner, lambda).map_err(|e| e.to_string())?;
    Ok(match format {
        Format::Json => {
            let v = json!({
                "schema": SCHEMA,
                "version": VERSION,
                "inner": spec,
                "lambda": lambda,
                "atoms": atoms.atoms(),
                "total_mass": atoms.total_mass(),
            });
            v.to_string() + "\n"
        }
        Format::Text => {
            let mut rows = vec![("point".to_string(), "mass".to_string())];
            for a in atoms.atoms() {
                rows.push((
                    serde_json::to_string(&a.point).unwrap(),
                    serde_json::to_string(&a.mass).unwrap(),
                ));
            }
            rows.push(("total".to_string(), serde_json::to_string(&atoms.total_mass()).unwrap()));
            render::table(&rows)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let registry = Registry::standard();
    let config_error = |msg: String| {
        eprintln!("error: {msg}");
        ExitCode::from(EXIT_CONFIG)
    };
    let jobs = match jobs(cli.jobs) {
        Ok(j) => j,
        Err(e) => return config_error(e),
    };
    let flag_format = cli.format.map(Format::from);

    let run = |config: RunConfig, timings: bool| -> ExitCode {
        let format = flag_format.or(config.defaults.format).unwrap_or_default();
        match run_scenarios(&registry, &config, jobs, timings) {
            Ok(reports) => emit(&reports, format),
            Err(e) => config_error(e),
        }
    };

    match cli.command {
        Command::Run { config, timings } => match RunConfig::load(&config) {
            Ok(c) => run(c, timings),
            Err(e) => config_error(e.to_string()),
        },
        Command::Verify { kind, space, extra } => {
            let mut cfg = ScenarioConfig::new(kind);
            if let Err(e) = apply_space(&mut cfg, &space).and_then(|_| apply_extra(&mut cfg, &extra)) {
                return config_error(e);
            }
            run(single(cfg), false)
        }
        Command::Clark { command: ClarkCommand::Atoms { inner, lambda } } => {
            match clark_table(&inner, &lambda, flag_format.unwrap_or_default()) {
                Ok(s) => {
                    print!("{s}");
                    ExitCode::SUCCESS
                }
                Err(e) => config_error(e),
            }
        }
        Command::Cyclic { command: CyclicCommand::Test { space, f, mode: m } } => {
            let mut cfg = ScenarioConfig::new("cyclic");
            if let Err(e) = apply_space(&mut cfg, &space) {
                return config_error(e);
            }
            match f.parse::<RationalSpec>() {
                Ok(f) => cfg.f = Some(f),
                Err(e) => return config_error(e.to_string()),
            }
            cfg.mode = Some(mode(m));
            run(single(cfg), false)
        }
        Command::Cohn { command: CohnCommand::Count { coeffs } } => {
            let mut cfg = ScenarioConfig::new("cohn");
            match parse_coeffs(&coeffs) {
                Ok(c) => cfg.coeffs = Some(c),
                Err(e) => return config_error(e.to_string()),
            }
            run(single(cfg), false)
        }
        Command::Report { command: ReportCommand::Merge { files } } => match merge(&files) {
            Ok(reports) => emit(&reports, flag_format.unwrap_or_default()),
            Err(e) => config_error(e),
        },
    }
}
