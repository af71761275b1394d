use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use serde_json::{json, Value};

use tricycle_cli::commands::{commands, ErrorKind, RunError};
use tricycle_cli::config::{Format, RunConfig};
use tricycle_cli::report::{write_atomic, Report};

const EXIT_CONFIG: u8 = 2;
const EXIT_SOLVER: u8 = 3;
const EXIT_IO: u8 = 1;

/// Figure data for the finite-time quantum tricycle refrigerator.
#[derive(Debug, Parser)]
#[command(name = "tricycle", version, after_help = subcommand_help())]
struct Args {
    /// Subcommand name (see below).
    command: String,

    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,

    /// `csv` or `json`.
    #[arg(long)]
    format: Option<String>,

    /// Override one configuration key, e.g. `--set alpha=0.5`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

fn subcommand_help() -> String {
    let mut s = String::from("Subcommands:\n");
    for c in commands().iter() {
        s.push_str(&format!("  {:<18}{}\n", c.name(), c.about()));
    }
    s.push_str("\nThreads: TRICYCLE_THREADS (default: all cores).");
    s
}

fn load(args: &Args) -> Result<RunConfig, String> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        cfg.apply_text(&text).map_err(|e| e.to_string())?;
    }
    for pair in &args.sets {
        cfg.assign(pair).map_err(|e| e.to_string())?;
    }
    if let Some(f) = &args.format {
        cfg.format = Format::parse(f).map_err(|e| e.to_string())?;
    }
    if let Some(out) = &args.out {
        cfg.out = Some(out.to_string_lossy().into_owned());
    }
    Ok(cfg)
}

fn meta(command: &str, cfg: &RunConfig) -> Value {
    json!({
        "tool": "tricycle",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": cfg.to_json(),
        "grids": {
            "curve_tau_c": {"min": cfg.curve_tau_c_min, "max": cfg.curve_tau_c_max, "points": cfg.curve_points, "spacing": "log"},
            "scan_tau_p": {"min": cfg.scan_tau_p_min, "max": cfg.scan_tau_p_max, "points": cfg.scan_points, "spacing": "log"},
            "alpha": {"min": cfg.alpha_min, "max": cfg.alpha_max, "points": cfg.alpha_points, "spacing": "linear"},
            "sweep_tau_c": {"min": cfg.sweep_tau_c_min, "max": cfg.sweep_tau_c_max, "points": cfg.sweep_points, "spacing": "log"},
            "sweep_tau_p": {"min": cfg.sweep_tau_p_min, "max": cfg.sweep_tau_p_max, "points": cfg.sweep_points, "spacing": "log"},
            "delta_c": {"min": cfg.delta_min, "max": cfg.delta_max, "points": cfg.delta_points, "spacing": "linear"},
        },
    })
}

fn diagnostics_path(command: &str, out: Option<&Path>) -> PathBuf {
    match out {
        Some(p) => {
            let mut s = p.as_os_str().to_owned();
            s.push(".diagnostics.txt");
            PathBuf::from(s)
        }
        None => PathBuf::from(format!("tricycle-{command}.diagnostics.txt")),
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), String> {
    match path {
        Some(p) => write_atomic(p, text).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| format!("stdout: {e}"))
        }
    }
}

fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("TRICYCLE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| format!("TRICYCLE_THREADS must be a positive integer, got `{v}`"))?;
    if n == 0 {
        return Err("TRICYCLE_THREADS must be a positive integer, got `0`".into());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_CONFIG);
    }
    let registry = commands();
    let command = match registry.get(&args.command) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let cfg = match load(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let model = match cfg.validate() {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let name = command.name();
    let out = cfg.out.as_deref().map(Path::new);
    match command.run(&cfg, &model) {
        Ok(report) => {
            if !report.failures.is_empty() {
                let diag = diagnostics_path(name, out);
                if let Err(e) = emit(Some(&diag), &report.diagnostics(None)) {
                    eprintln!("warning: {e}");
                }
                eprintln!("{} grid points failed, see {}", report.failures.len(), diag.display());
            }
            match emit(out, &report.render(cfg.format, meta(name, &cfg))) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(EXIT_IO)
                }
            }
        }
        Err(RunError { kind, message, partial }) => {
            eprintln!("error: {message}");
            if kind == ErrorKind::Config {
                return ExitCode::from(EXIT_CONFIG);
            }
            let diag = diagnostics_path(name, out);
            let text = partial.map_or_else(|| Report::new(Vec::new()), |p| *p).diagnostics(Some(&message));
            match emit(Some(&diag), &text) {
                Ok(()) => eprintln!("diagnostics written to {}", diag.display()),
                Err(e) => eprintln!("warning: {e}"),
            }
            ExitCode::from(EXIT_SOLVER)
        }
    }
}
