//! `cacms` command-line driver.

use std::path::PathBuf;
use std::process::ExitCode;

use cacms_lab::{emit, exit_code, parse_scene, run, Format, Scene, Suite};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "cacms", version, about = "Verify induced complex almost contact metric structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scene's suites and emit a residual report.
    Verify {
        scene: PathBuf,
        #[arg(long, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run only these suites (repeatable); overrides the scene.
        #[arg(long = "suite")]
        suites: Vec<Suite>,
    },
    /// Like `verify`, with at least two step sizes.
    Convergence {
        scene: PathBuf,
        #[arg(long, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(path: &PathBuf) -> Result<Scene, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut scene = parse_scene(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    if let Ok(seed) = std::env::var("CACMS_SEED") {
        scene.rng_seed = seed
            .trim()
            .parse()
            .map_err(|_| format!("CACMS_SEED: `{seed}` is not an unsigned integer"))?;
    }
    Ok(scene)
}

fn execute(scene: Scene, format: Format, out: Option<PathBuf>) -> Result<i32, String> {
    let report = run(&scene).map_err(|e| e.to_string())?;
    let bytes = emit(&report, format);
    match out {
        Some(path) => std::fs::write(&path, &bytes).map_err(|e| format!("{}: {e}", path.display()))?,
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&bytes).map_err(|e| e.to_string())?;
        }
    }
    let s = &report.summary;
    eprintln!(
        "{} asserted, {} failed, {} point errors -> exit {}",
        s.asserted, s.failed, s.errors, s.exit_code
    );
    Ok(exit_code(&report))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify {
            scene,
            format,
            out,
            suites,
        } => load(&scene).and_then(|mut scene| {
            if !suites.is_empty() {
                scene.set_suites(suites);
            }
            execute(scene, format, out)
        }),
        Command::Convergence { scene, format, out } => load(&scene).and_then(|mut scene| {
            scene.ensure_convergence_study();
            execute(scene, format, out)
        }),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
