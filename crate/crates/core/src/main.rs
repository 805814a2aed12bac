use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gevrey_nls::experiments::{self, config::ExperimentConfig};

#[derive(Parser)]
#[command(name = "gevrey-nls", version, about = "Analyticity-radius experiments for defocusing NLS")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run(RunArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, value_parser = ["1", "2"])]
    dim: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long = "box-len")]
    box_len: Option<f64>,
    #[arg(long)]
    p: Option<u32>,
    #[arg(long)]
    sigma0: Option<f64>,
    #[arg(long = "T")]
    t_final: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long, value_parser = ["splitstep", "picard"])]
    method: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load(args: &RunArgs) -> gevrey_nls::Result<ExperimentConfig> {
    let text = fs::read_to_string(&args.config)?;
    let mut cfg = ExperimentConfig::parse(&text)?;
    let overrides: [(&str, Option<String>); 9] = [
        ("dim", args.dim.clone()),
        ("n", args.n.map(|v| v.to_string())),
        ("box_len", args.box_len.map(|v| format!("{v:?}"))),
        ("p", args.p.map(|v| v.to_string())),
        ("sigma0", args.sigma0.map(|v| format!("{v:?}"))),
        ("T", args.t_final.map(|v| format!("{v:?}"))),
        ("dt", args.dt.map(|v| format!("{v:?}"))),
        ("method", args.method.clone()),
        ("seed", args.seed.map(|v| v.to_string())),
    ];
    for (key, value) in overrides {
        if let Some(v) = value {
            cfg.set(0, key, &v)?;
        }
    }
    if let Some(out) = &args.out {
        cfg.out_dir = out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let Command::Run(args) = cli.command;
    let result = load(&args).and_then(|cfg| {
        log::info!("running {} into {}", cfg.experiment.as_str(), cfg.out_dir.display());
        experiments::run_and_write(&cfg)
    });
    match result {
        Ok(path) => {
            log::info!("wrote {}", path.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
