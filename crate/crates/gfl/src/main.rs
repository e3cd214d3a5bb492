use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gfl::config::KEYS;
use gfl::{Context, Example, ExperimentConfig, Output, EXIT_ERROR};

/// Finite-conditional distributions, transition energies and Gibbsianness
/// diagnostics for random fields on finite lattice windows.
///
/// Exit codes: 0 success, 1 violations or golden mismatch, 2 divergence
/// witness, 3 inconclusive, 4 error.
#[derive(Parser)]
#[command(name = "gfl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the consistency axioms of a model on seeded fixtures.
    Validate(Common),
    /// Uniform-convergence, quasilocality and witness diagnostics at one site.
    Diagnose(Common),
    /// Dump transition-energy and Hamiltonian tables of one kernel.
    Energy(Common),
    /// Rebuild a kernel from one-point kernels and compare with the direct one.
    Reconstruct(Common),
    /// Reproduce a worked example (optionally against the stored goldens).
    Reproduce(ReproduceArgs),
    /// List configuration keys with their defaults.
    Keys,
}

#[derive(Args)]
struct OutputArgs {
    /// Directory for report files.
    #[arg(long, default_value = "gfl-out")]
    out: PathBuf,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct Common {
    /// `key = value` config file, applied before the flags below.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    model: Option<String>,
    /// rational | float | auto
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    site: Option<String>,
    #[arg(long)]
    filtration: Option<String>,
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    samples: Option<String>,
    #[arg(long)]
    axioms: Option<String>,
    #[arg(long)]
    volume: Option<String>,
    #[arg(long)]
    condition: Option<String>,
    #[arg(long)]
    reference: Option<String>,
    #[arg(long)]
    order: Option<String>,
    /// Any config key, as key=value (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExampleArg {
    Example1,
    Example2,
}

#[derive(Args)]
struct ReproduceArgs {
    example: ExampleArg,
    /// Example 2 only: one tau (default 1, 2 and 3).
    #[arg(long)]
    tau: Option<u32>,
    /// Compare with the goldens instead of only writing files.
    #[arg(long)]
    check: bool,
    /// Golden directory for --check.
    #[arg(long, default_value = concat!(env!("CARGO_MANIFEST_DIR"), "/goldens"))]
    goldens: PathBuf,
    #[command(flatten)]
    output: OutputArgs,
}

impl Common {
    fn config(&self) -> gfl_core::Result<ExperimentConfig> {
        let mut c = ExperimentConfig::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| gfl_core::Error::Argument(format!("cannot read {}: {e}", path.display())))?;
            c.load_str(&text)?;
        }
        let flags = [
            ("model", &self.model),
            ("mode", &self.mode),
            ("site", &self.site),
            ("filtration", &self.filtration),
            ("family", &self.family),
            ("tol", &self.tol),
            ("seed", &self.seed),
            ("samples", &self.samples),
            ("axioms", &self.axioms),
            ("volume", &self.volume),
            ("condition", &self.condition),
            ("reference", &self.reference),
            ("order", &self.order),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                c.set(key, v)?;
            }
        }
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| gfl_core::Error::Argument(format!("--set `{kv}` is not key=value")))?;
            c.set(k.trim(), v)?;
        }
        Ok(c)
    }
}

fn run(cli: Cli) -> gfl_core::Result<(Output, Option<PathBuf>)> {
    if let Ok(cap) = std::env::var("GFL_ENUM_CAP") {
        let cap = cap
            .trim()
            .parse()
            .map_err(|_| gfl_core::Error::Argument(format!("GFL_ENUM_CAP `{cap}` is not a count")))?;
        gfl_core::lattice::set_enumeration_cap(cap);
    }
    let (command, common) = match cli.command {
        Command::Keys => {
            let mut summary = String::new();
            for (k, v, help) in KEYS {
                summary.push_str(&format!("{k:<12} {:<28} {help}\n", if v.is_empty() { "\"\"" } else { v }));
            }
            return Ok((Output { summary, ..Output::default() }, None));
        }
        Command::Reproduce(args) => {
            let ctx = Context::new(ExperimentConfig::default(), args.output.threads)?;
            let (example, taus) = match args.example {
                ExampleArg::Example1 => (Example::One, vec![]),
                ExampleArg::Example2 => (Example::Two, args.tau.map(|t| vec![t]).unwrap_or_else(|| vec![1, 2, 3])),
            };
            let goldens = args.check.then_some(args.goldens.as_path());
            let out = gfl::reproduce(&ctx, example, &taus, goldens)?;
            return Ok((out, Some(args.output.out)));
        }
        Command::Validate(c) => (gfl::validate as fn(&Context) -> _, c),
        Command::Diagnose(c) => (gfl::diagnose as fn(&Context) -> _, c),
        Command::Energy(c) => (gfl::energy as fn(&Context) -> _, c),
        Command::Reconstruct(c) => (gfl::reconstruct as fn(&Context) -> _, c),
    };
    let ctx = Context::new(common.config()?, common.output.threads)?;
    Ok((command(&ctx)?, Some(common.output.out)))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok((out, dir)) => {
            if let Some(dir) = dir {
                if let Err(e) = gfl::write_output(&out, &dir) {
                    eprintln!("error: writing {}: {e}", dir.display());
                    return ExitCode::from(EXIT_ERROR as u8);
                }
            }
            print!("{}", out.summary);
            ExitCode::from(out.exit as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
