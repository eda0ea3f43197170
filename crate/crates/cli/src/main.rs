use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Parser;
use wsn_deploy::runner::{execute, parse_grid, InitSource, RunConfig, RunOutput};
use wsn_deploy::{Algorithm, Termination};

/// Place access points and fusion centers to minimize communication power.
#[derive(Debug, Parser)]
#[command(name = "wsn-deploy", version)]
struct Cli {
    /// Scenario file (TOML).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,

    /// rl, merl or lorl.
    #[arg(long, default_value = "rl", value_parser = parse_algorithm)]
    algorithm: Algorithm,

    /// Quadrature grid over the region's bounding box.
    #[arg(long, default_value = "100x100", value_parser = parse_grid_arg)]
    grid: (usize, usize),

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// `random`, or a deployment CSV with x_m and y_m columns.
    #[arg(long, default_value = "random")]
    init: String,

    /// Stop when the relative decrease of the objective drops below this.
    #[arg(long, default_value_t = 1e-4)]
    epsilon: f64,

    #[arg(long, default_value_t = 200)]
    max_iters: usize,

    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,

    /// Run seeds `seed..seed+N` in parallel, one subdirectory per seed.
    #[arg(long, value_name = "N")]
    batch_seeds: Option<u64>,
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: wsn_deploy::Error| e.to_string())
}

fn parse_grid_arg(s: &str) -> Result<(usize, usize), String> {
    parse_grid(s).map_err(|e| e.to_string())
}

fn config_for(cli: &Cli, seed: u64, out: PathBuf) -> RunConfig {
    RunConfig {
        scenario: cli.config.clone(),
        algorithm: cli.algorithm,
        grid: cli.grid,
        seed,
        init: match cli.init.as_str() {
            "random" => InitSource::Random,
            path => InitSource::File(path.into()),
        },
        epsilon: Some(cli.epsilon),
        max_iters: Some(cli.max_iters),
        out,
    }
}

fn report(config: &RunConfig, output: &RunOutput) {
    let r = &output.result;
    let state = match r.termination {
        Termination::Converged => "converged",
        Termination::MaxIterations => "hit the iteration cap",
    };
    println!(
        "seed {}: {} {} after {} iterations, D = {:.6} W (start {:.6} W) -> {}",
        config.seed,
        config.algorithm,
        state,
        r.iterations(),
        r.final_objective(),
        r.trace[0].objective,
        config.out.display()
    );
}

fn run(cli: &Cli) -> Result<()> {
    if cli.epsilon.is_nan() || cli.epsilon <= 0.0 {
        bail!("--epsilon must be > 0");
    }
    let Some(count) = cli.batch_seeds else {
        let config = config_for(cli, cli.seed, cli.out.clone());
        let output = execute(&config).with_context(|| format!("run on {}", cli.config.display()))?;
        report(&config, &output);
        return Ok(());
    };
    if count == 0 {
        bail!("--batch-seeds must be >= 1");
    }
    let configs: Vec<RunConfig> = (cli.seed..cli.seed + count)
        .map(|seed| config_for(cli, seed, cli.out.join(format!("seed-{seed}"))))
        .collect();
    let outcomes: Vec<_> = std::thread::scope(|scope| {
        let handles: Vec<_> = configs
            .iter()
            .map(|config| scope.spawn(move || execute(config)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker thread panicked"))
            .collect()
    });
    let mut failed = 0;
    for (config, outcome) in configs.iter().zip(outcomes) {
        match outcome {
            Ok(output) => report(config, &output),
            Err(e) => {
                failed += 1;
                eprintln!("seed {}: {e}", config.seed);
            }
        }
    }
    if failed > 0 {
        bail!("{failed} of {count} runs failed");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
