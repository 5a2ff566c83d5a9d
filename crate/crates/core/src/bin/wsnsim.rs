use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use wsn_fuzzy::report::{write_compare, write_rounds, write_summary, write_surface, write_trace};
use wsn_fuzzy::rules::FuzzySystem;
use wsn_fuzzy::{compare, load_config, simulate, ProtocolKind};

#[derive(Parser)]
#[command(name = "wsnsim", version, about = "Heterogeneous WSN clustering simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one protocol and seed.
    Run {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, env = "WSNSIM_OUT", default_value = "out")]
        out: PathBuf,
        /// Also write trace.csv with per-round heads, relays and energy by category.
        #[arg(long)]
        trace: bool,
    },
    /// Run several protocols over consecutive seeds starting at the config seed.
    Compare {
        config: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "leach,edeec,fuzzy")]
        protocols: Vec<String>,
        #[arg(long, default_value_t = 20)]
        seeds: u64,
        #[arg(long, env = "WSNSIM_OUT", default_value = "out")]
        out: PathBuf,
    },
    /// Export a rule-base output surface over two inputs.
    Surface {
        config: PathBuf,
        #[arg(long, value_enum)]
        rulebase: RuleBaseArg,
        /// Pin an input, e.g. `DistBS=0`; battery values are in joules.
        #[arg(long)]
        fixed: Vec<String>,
        #[arg(long, default_value_t = 21)]
        res: usize,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleBaseArg {
    Election,
    Relay,
}

type Result<T> = std::result::Result<T, String>;

fn write_file(path: &Path, f: impl FnOnce(&mut Vec<u8>) -> csv::Result<()>) -> Result<()> {
    let mut buf = Vec::new();
    f(&mut buf).map_err(|e| format!("{}: {e}", path.display()))?;
    fs::write(path, buf).map_err(|e| format!("{}: {e}", path.display()))
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))
}

fn run(config: &Path, seed: Option<u64>, out: &Path, trace: bool) -> Result<()> {
    let mut cfg = load_config(config).map_err(|e| e.to_string())?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    let summary = simulate(&cfg).map_err(|e| e.to_string())?;
    create_dir(out)?;
    write_file(&out.join("rounds.csv"), |w| write_rounds(w, &summary))?;
    write_file(&out.join("summary.csv"), |w| write_summary(w, [&summary]))?;
    if trace {
        write_file(&out.join("trace.csv"), |w| write_trace(w, &summary))?;
    }
    Ok(())
}

fn compare_cmd(config: &Path, protocols: &[String], seeds: u64, out: &Path) -> Result<()> {
    let cfg = load_config(config).map_err(|e| e.to_string())?;
    let kinds = protocols
        .iter()
        .map(|p| p.parse::<ProtocolKind>().map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>>>()?;
    if kinds.is_empty() || seeds == 0 {
        return Err("need at least one protocol and one seed".into());
    }
    let seed_list: Vec<u64> = (0..seeds).map(|i| cfg.seed.wrapping_add(i)).collect();
    let cmp = compare(&cfg, &kinds, &seed_list).map_err(|e| e.to_string())?;
    create_dir(out)?;
    for run in cmp.runs.values() {
        let name = format!("rounds_{}_{}.csv", run.protocol, run.seed);
        write_file(&out.join(name), |w| write_rounds(w, run))?;
    }
    write_file(&out.join("summary.csv"), |w| {
        write_summary(w, kinds.iter().flat_map(|&k| seed_list.iter().map(move |&s| (k, s))).map(|key| &cmp.runs[&key]))
    })?;
    write_file(&out.join("compare.csv"), |w| write_compare(w, &cmp))
}

fn surface(config: &Path, rulebase: RuleBaseArg, fixed: &[String], res: usize, out: Option<&Path>) -> Result<()> {
    let cfg = load_config(config).map_err(|e| e.to_string())?;
    let system = FuzzySystem::new(&cfg.fuzzy, cfg.heterogeneity.energies.max()).map_err(|e| e.to_string())?;
    let rb = match rulebase {
        RuleBaseArg::Election => &system.election,
        RuleBaseArg::Relay => &system.relay,
    };
    let pins = fixed
        .iter()
        .map(|f| {
            let (name, value) = f.split_once('=').ok_or_else(|| format!("--fixed `{f}`: expected NAME=VALUE"))?;
            let index = rb
                .inputs()
                .iter()
                .position(|v| v.name().eq_ignore_ascii_case(name.trim()))
                .ok_or_else(|| format!("--fixed `{f}`: no input named `{name}`"))?;
            let value: f64 = value.trim().parse().map_err(|e| format!("--fixed `{f}`: {e}"))?;
            Ok((index, value))
        })
        .collect::<Result<Vec<_>>>()?;
    let rows = rb.surface_grid(res, &pins).map_err(|e| e.to_string())?;
    match out {
        Some(path) => write_file(path, |w| write_surface(w, &rows)),
        None => {
            let mut buf = Vec::new();
            write_surface(&mut buf, &rows).map_err(|e| e.to_string())?;
            use std::io::Write;
            std::io::stdout().write_all(&buf).map_err(|e| e.to_string())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { config, seed, out, trace } => run(config, *seed, out, *trace),
        Command::Compare {
            config,
            protocols,
            seeds,
            out,
        } => compare_cmd(config, protocols, *seeds, out),
        Command::Surface {
            config,
            rulebase,
            fixed,
            res,
            out,
        } => surface(config, *rulebase, fixed, *res, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("wsnsim: {msg}");
            ExitCode::FAILURE
        }
    }
}
