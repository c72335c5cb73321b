use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use stratdeform::config::RunConfig;
use stratdeform_cli::{dispatch, COMMANDS, EXIT_MALFORMED, EXIT_VALIDATION};

/// JSON batch front end: reads one document, writes one document to stdout.
#[derive(Parser, Debug)]
#[command(name = "stratdeform", version)]
struct Args {
    /// psi-eval, psi-invert, discriminants, validate-system, complete-system,
    /// classify, deform, deform-projective, jacobian, transversality,
    /// general-position or suite.
    command: String,
    #[arg(long, env = "STRATDEFORM_SEED", default_value_t = 0)]
    seed: u64,
    /// Tolerance override, `name=value`; repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<String>,
    #[arg(long)]
    n_cap: Option<usize>,
    #[arg(long)]
    t_radius: Option<f64>,
    /// Worker threads (0: one per core).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Input file, or `-` for stdin.
    #[arg(long, default_value = "-")]
    input: String,
    /// Output file, or `-` for stdout.
    #[arg(long, default_value = "-")]
    output: String,
}

fn fail(code: i32, message: &str) -> ExitCode {
    eprintln!("stratdeform: {message}");
    ExitCode::from(code as u8)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let mut config = RunConfig { seed: args.seed, jobs: args.jobs, t_radius: args.t_radius, ..RunConfig::default() };
    if let Some(n) = args.n_cap {
        config.n_cap = n;
    }
    for entry in &args.tol {
        let Some((name, value)) = entry.split_once('=') else {
            return fail(EXIT_VALIDATION, &format!("--tol expects name=value, got '{entry}'"));
        };
        let value: f64 = match value.parse() {
            Ok(v) => v,
            Err(_) => return fail(EXIT_VALIDATION, &format!("--tol {name}: '{value}' is not a number")),
        };
        if let Err(e) = config.tolerances.set(name, value) {
            return fail(EXIT_VALIDATION, &e.to_string());
        }
    }
    if let Some(r) = config.t_radius {
        if !(r > 0.0 && r.is_finite()) {
            return fail(EXIT_VALIDATION, "--t-radius must be positive");
        }
    }
    if config.jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(config.jobs).build_global() {
            eprintln!("stratdeform: thread pool: {e}");
        }
    }

    let input = if args.command == "suite" || !COMMANDS.contains(&args.command.as_str()) {
        String::new()
    } else {
        let mut buf = String::new();
        let read = if args.input == "-" {
            std::io::stdin().read_to_string(&mut buf).map(|_| ())
        } else {
            std::fs::read_to_string(PathBuf::from(&args.input)).map(|s| buf = s)
        };
        if let Err(e) = read {
            return fail(EXIT_MALFORMED, &format!("cannot read input: {e}"));
        }
        buf
    };

    let response = dispatch(&args.command, &input, &config);
    if response.code != 0 {
        if let Some(msg) = response.body.get("message").and_then(|m| m.as_str()) {
            eprintln!("stratdeform: {msg}");
        }
    }
    let mut text = serde_json::to_string_pretty(&response.body).expect("JSON value serializes");
    text.push('\n');
    let written = if args.output == "-" {
        std::io::stdout().write_all(text.as_bytes())
    } else {
        std::fs::write(&args.output, text)
    };
    if let Err(e) = written {
        eprintln!("stratdeform: cannot write output: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(response.code as u8)
}
