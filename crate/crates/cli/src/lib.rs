//! Command-line front end: self-tests, equivariance audits, training, prediction
//! and exact rotation of grid fields.

pub mod audit;
pub mod commands;
pub mod config;
pub mod convert;
pub mod error;
pub mod selftest;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use error::{exit, CliError, CliResult};

const TRAIN_HELP: &str = "\
Config file: one `key = value` per line, `#` starts a comment. Keys:
  band_limit depth channels task epochs lr seed augment samples val_samples
  batch_size noise oversample slope learnable_slope normalize data_dir output_dir
task is wind2wind | temp2wind | autoencode; augment is none | rotate.
channels is a comma list (one per stage) or a single base width doubled per stage.
data_dir holds NAME.input.so3g / NAME.target.so3g pairs; without it a synthetic
dataset is generated. Relative paths resolve against the config file.

Outputs in output_dir:
  model.so3n   checkpoint
  metrics.csv  header `epoch,train_loss,val_distance,val_distance_rotated`;
               epoch 0 is the untrained model, train_loss is the mean
               sin²-weighted squared error, val_distance is the mean sphere
               distance on the validation split and val_distance_rotated the
               same after one fixed random rotation per sample
  train.log    resolved config and the normalization scales";

const EXIT_HELP: &str = "\
Exit codes: 0 success, 2 config error, 3 io error, 4 numeric failure
(non-finite loss or failed self-test), 5 shape mismatch.";

#[derive(Debug, Parser)]
#[command(name = "so3eq", version, about = "Harmonic analysis and equivariant networks on SO(3)", after_help = EXIT_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the transform, Wigner, convolution, smoothing and equivariance checks.
    Selftest {
        #[arg(long = "bandlimit", default_value_t = 8)]
        bandlimit: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Fault injection: perturb the top-degree Δ matrix.
        #[arg(long, hide = true)]
        corrupt_delta: bool,
    },
    /// Train a UNet from a config file.
    #[command(after_help = TRAIN_HELP)]
    Train {
        #[arg(long)]
        config: PathBuf,
    },
    /// Map a grid field (.so3g or .csv) through a trained model.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Relative error between f(Bx) and B f(x) over random rotations B.
    Equivariance {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Activation grid size relative to the band limit during the audit.
        #[arg(long, default_value_t = 5.0)]
        oversample: f64,
    },
    /// Rotate a grid field by Z(alpha)Y(beta)Z(gamma), angles in radians.
    Rotate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
        #[arg(long, allow_hyphen_values = true)]
        gamma: f64,
        #[arg(long)]
        output: PathBuf,
    },
}

/// Runs one command, reporting to `out`/`err`, and returns the exit code.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::Selftest { bandlimit, seed, corrupt_delta } => {
            commands::cmd_selftest(bandlimit, seed, corrupt_delta, out).map(|_| ())
        }
        Command::Train { config } => config::RunConfig::load(&config).and_then(|cfg| {
            let o = commands::cmd_train(&cfg, out)?;
            let _ = writeln!(out, "wrote {} and {}", o.model_path.display(), o.metrics_path.display());
            Ok(())
        }),
        Command::Predict { model, input, output } => commands::cmd_predict(&model, &input, &output).map(|_| {
            let _ = writeln!(out, "wrote {}", output.display());
        }),
        Command::Equivariance { model, trials, seed, oversample } => {
            commands::cmd_equivariance(&model, trials, seed, oversample).map(|r| {
                let _ = writeln!(
                    out,
                    "trials={} mean_rel_error={:.3e} max_rel_error={:.3e} off_column_residue={:.3e} oversample={oversample}",
                    r.trials, r.mean, r.max, r.residue
                );
            })
        }
        Command::Rotate { input, alpha, beta, gamma, output } => {
            commands::cmd_rotate(&input, alpha, beta, gamma, &output).map(|_| {
                let _ = writeln!(out, "wrote {}", output.display());
            })
        }
    };
    match result {
        Ok(()) => exit::OK,
        Err(e) => {
            let _ = writeln!(err, "so3eq: {e}");
            e.exit_code()
        }
    }
}
