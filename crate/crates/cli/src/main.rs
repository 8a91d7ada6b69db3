//! `arbor`: evaluate automorphisms, run single checks and verification
//! suites over level quotients of self-similar groups.
//!
//! Exit codes: 0 when every check passes, 1 when any fails, 2 on usage,
//! parse or internal errors (errors win over failures).

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use arbor::filtration::Caps;
use arbor_cli::commands::{eval_command, parse_command, quotient_command, Format};
use arbor_cli::suite::{parse_expect, CheckSpec, Kind, Suite};
use arbor_cli::{load_tower, CliError, DiskCache, RunReport, Runner};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "arbor", version, about = "Level-quotient computations for self-similar groups")]
struct Cli {
    #[command(flatten)]
    opts: Options,
    #[command(subcommand)]
    command: Command,
}

/// Every option has an `ARBOR_` environment variable of the same name.
#[derive(Args)]
struct Options {
    /// Deepest tree level any computation may touch.
    #[arg(long, global = true, env = "ARBOR_MAX_LEVEL", default_value_t = 10)]
    max_level: usize,
    /// Largest number of leaves of a level quotient.
    #[arg(long, global = true, env = "ARBOR_POINT_CAP", default_value_t = 1024)]
    point_cap: usize,
    /// Largest product machine built during automaton arithmetic.
    #[arg(long, global = true, env = "ARBOR_STATE_CAP", default_value_t = arbor::wreath::DEFAULT_STATE_CAP)]
    state_cap: usize,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long, global = true, env = "ARBOR_JOBS")]
    jobs: Option<usize>,
    #[arg(long, global = true, env = "ARBOR_FORMAT", value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Directory for cached level quotients.
    #[arg(long, global = true, env = "ARBOR_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a group file and print its canonical form and content hash.
    Parse { group: PathBuf },
    /// Print the portrait of an element, or its action on one level.
    Eval {
        group: PathBuf,
        expr: String,
        /// Print the permutation induced on this level.
        #[arg(long, conflicts_with = "portrait")]
        level: Option<usize>,
        /// Portrait depth (default 1).
        #[arg(long)]
        portrait: Option<usize>,
    },
    /// Run a single check.
    Check {
        group: PathBuf,
        #[arg(value_enum)]
        kind: Kind,
        args: Vec<String>,
        /// Level (depth for scans and theorem checks).
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        expect: Option<String>,
        /// 1-based coordinates for profile checks.
        #[arg(long, value_delimiter = ',')]
        coords: Vec<usize>,
        /// Generator of L for theorem checks; repeatable.
        #[arg(long = "l")]
        l: Vec<String>,
        /// Hypothesis codes i..v for theorem checks.
        #[arg(long, value_delimiter = ',')]
        hypotheses: Vec<String>,
    },
    /// Run verification suites.
    Verify {
        #[arg(required = true)]
        suites: Vec<PathBuf>,
    },
    /// Describe a level quotient or the image of a subgroup in it.
    Quotient {
        group: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        sub: Option<String>,
        /// Print the base and strong generating set.
        #[arg(long)]
        bsgs: bool,
    },
    /// Search for the smallest level stabilizer inside a subgroup.
    Scan {
        group: PathBuf,
        subgroup: String,
        /// Deepest level scanned.
        #[arg(long)]
        n: usize,
        #[arg(long)]
        expect: Option<String>,
    },
}

fn render(report: &RunReport, format: Format) -> String {
    match format {
        Format::Text => report.to_text(),
        Format::Json => format!("{}\n", report.to_json()),
        Format::Csv => report.to_csv(),
    }
}

/// A suite of one check on `group`, as built by `check` and `scan`.
fn single(group: PathBuf, spec: CheckSpec) -> Suite {
    Suite {
        name: spec.kind.name().into(),
        group: group.display().to_string(),
        description: None,
        checks: vec![spec],
        base: PathBuf::new(),
        path: PathBuf::new(),
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let o = &cli.opts;
    if let Some(j) = o.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let caps = Caps {
        state_cap: o.state_cap,
        point_cap: o.point_cap,
        max_level: o.max_level,
    };
    let mut runner = Runner::new(caps);
    if let Some(dir) = &o.cache_dir {
        let cache = DiskCache::new(dir)
            .map_err(|e| CliError::Usage(format!("cannot use cache directory {}: {e}", dir.display())))?;
        runner = runner.with_store(Arc::new(cache));
    }
    let out = std::io::stdout();
    let mut out = out.lock();
    let mut emit = |s: String| {
        let _ = out.write_all(s.as_bytes());
    };
    let report = match cli.command {
        Command::Parse { group } => {
            emit(parse_command(&group, o.format)?);
            return Ok(0);
        }
        Command::Eval {
            group,
            expr,
            level,
            portrait,
        } => {
            let tower = load_tower(&group, caps, runner.store.clone())?;
            emit(eval_command(&tower, &expr, level, portrait, o.format)?);
            return Ok(0);
        }
        Command::Quotient { group, n, sub, bsgs } => {
            let tower = load_tower(&group, caps, runner.store.clone())?;
            emit(quotient_command(&tower, n, sub.as_deref(), bsgs, o.format)?);
            return Ok(0);
        }
        Command::Check {
            group,
            kind,
            args,
            n,
            expect,
            coords,
            l,
            hypotheses,
        } => {
            let spec = CheckSpec {
                id: "check".into(),
                kind,
                args,
                level: n,
                expect: expect.as_deref().map(parse_expect),
                coords,
                l,
                hypotheses,
                ..CheckSpec::default()
            };
            let suite = single(group, spec);
            suite.validate().map_err(CliError::Usage)?;
            runner.run(&[suite])?
        }
        Command::Scan {
            group,
            subgroup,
            n,
            expect,
        } => {
            let spec = CheckSpec {
                id: "scan".into(),
                kind: Kind::CongruenceScan,
                args: vec![subgroup],
                level: Some(n),
                expect: expect.as_deref().map(parse_expect),
                ..CheckSpec::default()
            };
            // Without an expectation a scan only reports, and passes unless
            // it errors.
            runner.run(&[single(group, spec)])?
        }
        Command::Verify { suites } => {
            let loaded = suites.iter().map(|p| Suite::load(p)).collect::<Result<Vec<_>, _>>()?;
            runner.run(&loaded)?
        }
    };
    emit(render(&report, o.format));
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
