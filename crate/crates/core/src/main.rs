use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use adamsext::charts::{build_chart_with, ChartError, Format};
use adamsext::claims::{FixtureSet, Status, Suite};
use adamsext::fixtures::Fixture;
use adamsext::modules::{parse_module, FdModule, ModuleError};
use adamsext::resolution::{ResolutionError, DEFAULT_MAX_S, DEFAULT_MAX_T};
use adamsext::store::{ResolutionStore, CACHE_ENV};

const EXIT_VIOLATION: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_CROSS_CHECK: u8 = 3;

#[derive(Parser)]
#[command(name = "adamsext", version, about = "Ext over the mod 2 Steenrod algebra and Adams E2 charts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a module file and check the Adem relations.
    Validate { path: PathBuf },
    /// Compute a minimal resolution and save it.
    Resolve {
        module: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_S)]
        max_s: u32,
        #[arg(long, default_value_t = DEFAULT_MAX_T)]
        max_t: i32,
        /// Resolution file to write; prints the Ext table only when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, env = CACHE_ENV)]
        cache_dir: Option<PathBuf>,
    },
    /// Chart Ext(M ⊗ DN, F2); N defaults to the sphere.
    Ext {
        m: PathBuf,
        n: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_MAX_S)]
        max_s: u32,
        /// Internal degree bound; the chart shows stems up to max-t minus max-s.
        #[arg(long, default_value_t = DEFAULT_MAX_T)]
        max_t: i32,
        #[arg(long, value_enum, default_value_t = FormatArg::Ascii)]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, env = CACHE_ENV)]
        cache_dir: Option<PathBuf>,
    },
    /// Run the claim suite and print a pass/fail table.
    VerifyPaper {
        #[arg(long, env = CACHE_ENV)]
        cache_dir: Option<PathBuf>,
        /// Directory with replacement fixture files (same names as fixtures/).
        #[arg(long)]
        fixtures: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Svg,
    Ascii,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Svg => Format::Svg,
            FormatArg::Ascii => Format::Ascii,
            FormatArg::Json => Format::Json,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(ChartError::OracleDisagreement { .. }) = cause.downcast_ref::<ChartError>() {
            return EXIT_CROSS_CHECK;
        }
    }
    EXIT_INPUT
}

fn run(command: Command) -> anyhow::Result<u8> {
    match command {
        Command::Validate { path } => {
            let m = read_module(&path)?;
            let violations = m.validate();
            if violations.is_empty() {
                println!("{}: ok ({} cells)", path.display(), m.dimension());
                return Ok(0);
            }
            for v in &violations {
                eprintln!("{}: {v}", path.display());
            }
            Ok(EXIT_VIOLATION)
        }
        Command::Resolve {
            module,
            max_s,
            max_t,
            out,
            cache_dir,
        } => {
            let m = read_valid_module(&module)?;
            let Some(m) = m else { return Ok(EXIT_VIOLATION) };
            let mut store = open_store(cache_dir.as_deref())?;
            let r = store.get(&m, max_s, max_t)?;
            if let Some(out) = out {
                r.save(&out)?;
            }
            for ((s, t), d) in r.ext_table().entries() {
                println!("s={s} t={t} stem={} dim={d}", t - s as i32);
            }
            Ok(0)
        }
        Command::Ext {
            m,
            n,
            max_s,
            max_t,
            format,
            out,
            cache_dir,
        } => {
            let Some(mm) = read_valid_module(&m)? else { return Ok(EXIT_VIOLATION) };
            let nn = match n {
                Some(p) => match read_valid_module(&p)? {
                    Some(n) => n,
                    None => return Ok(EXIT_VIOLATION),
                },
                None => Fixture::Sphere.module(),
            };
            let mut store = open_store(cache_dir.as_deref())?;
            let max_stem = (max_t - max_s as i32).max(0);
            let chart = build_chart_with(&mm, &nn, max_s, max_stem, &mut |module, s, t| store.get(module, s, t))?;
            let text = chart.render(format.into());
            match out {
                Some(path) => std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{text}"),
            }
            Ok(0)
        }
        Command::VerifyPaper { cache_dir, fixtures } => {
            let set = match fixtures {
                Some(dir) => FixtureSet::from_dir(&dir)?,
                None => FixtureSet::builtin(),
            };
            let mut store = open_store(cache_dir.as_deref())?;
            let results = Suite::new(&set, &mut store).run();
            for r in &results {
                println!("{r}");
            }
            let code = if results.iter().any(|r| r.status == Status::Error) {
                EXIT_CROSS_CHECK
            } else if results.iter().any(|r| r.status == Status::Fail) {
                EXIT_VIOLATION
            } else {
                0
            };
            let failed: Vec<&str> = results
                .iter()
                .filter(|r| matches!(r.status, Status::Fail | Status::Error))
                .map(|r| r.id)
                .collect();
            println!(
                "{} claims, {} not passing{}",
                results.len(),
                failed.len(),
                if failed.is_empty() { String::new() } else { format!(": {}", failed.join(", ")) }
            );
            Ok(code)
        }
    }
}

fn open_store(dir: Option<&Path>) -> Result<ResolutionStore, ResolutionError> {
    match dir {
        Some(d) => ResolutionStore::with_dir(d),
        None => Ok(ResolutionStore::in_memory()),
    }
}

fn read_module(path: &Path) -> anyhow::Result<FdModule> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_module(&text).map_err(|e: ModuleError| anyhow::anyhow!("{}: {e}", path.display()))
}

/// The module at `path`, or `None` after reporting its violations.
fn read_valid_module(path: &Path) -> anyhow::Result<Option<FdModule>> {
    let m = read_module(path)?;
    let violations = m.validate();
    if violations.is_empty() {
        return Ok(Some(m));
    }
    for v in &violations {
        eprintln!("{}: {v}", path.display());
    }
    Ok(None)
}
