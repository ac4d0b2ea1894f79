//! Subcommand bodies. Each returns a [`CliError`] whose class picks the exit code.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use so3eq_core::signals::SphereField;
use so3eq_nn::data::{load_checkpoint, load_field, make_dataset, save_checkpoint, save_field, SyntheticTask};
use so3eq_nn::{train, Features, MetricsRow, Sample, UNet, METRICS_HEADER};

use crate::audit::{audit, AuditReport};
use crate::config::RunConfig;
use crate::convert::{field_order, field_plan, field_to_spectrum, load_any, order_kind, rotate_field, spectrum_to_field};
use crate::error::{CliError, CliResult};
use crate::selftest::{self, Report};

pub const MODEL_FILE: &str = "model.so3n";
pub const METRICS_FILE: &str = "metrics.csv";
pub const LOG_FILE: &str = "train.log";
pub const INPUT_SUFFIX: &str = ".input.so3g";
pub const TARGET_SUFFIX: &str = ".target.so3g";

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |e| CliError::Io(format!("{}: {e}", path.display()))
}

pub fn cmd_selftest(band_limit: usize, seed: u64, corrupt_delta: bool, out: &mut dyn Write) -> CliResult<Report> {
    let report = selftest::run(&selftest::Options {
        band_limit,
        seed,
        corrupt_delta,
    })?;
    let _ = writeln!(out, "selftest L={band_limit} seed={seed}");
    for c in &report.checks {
        let _ = writeln!(out, "{c}");
    }
    if !report.passed() {
        return Err(CliError::Numeric(format!("failing checks: {}", report.failing().join(", "))));
    }
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub rows: Vec<MetricsRow>,
    pub model_path: PathBuf,
    pub metrics_path: PathBuf,
}

fn field_features(f: &SphereField, band_limit: usize, expect_order: i32, what: &str, path: &Path) -> CliResult<Features> {
    let p = field_order(f.kind());
    if p != expect_order {
        return Err(CliError::Shape(format!(
            "{}: {what} is a {} field, the model expects order {expect_order}",
            path.display(),
            f.kind().name()
        )));
    }
    let plan = field_plan(f.n_lat(), f.n_lon(), band_limit)?;
    Ok(Features::from_spectrum(&field_to_spectrum(f, &plan)?, p)?)
}

/// Pairs `NAME.input.so3g` / `NAME.target.so3g` in name order.
fn load_pairs(dir: &Path, cfg: &RunConfig) -> CliResult<Vec<Sample>> {
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .map_err(io(dir))?
        .filter_map(|e| e.ok())
        .filter_map(|e| e.file_name().to_str().and_then(|n| n.strip_suffix(INPUT_SUFFIX)).map(str::to_owned))
        .collect();
    names.sort();
    if names.is_empty() {
        return Err(CliError::Io(format!("{}: no *{INPUT_SUFFIX} files", dir.display())));
    }
    let m = cfg.model_config();
    let mut out = Vec::with_capacity(names.len());
    for n in names {
        let ip = dir.join(format!("{n}{INPUT_SUFFIX}"));
        let tp = dir.join(format!("{n}{TARGET_SUFFIX}"));
        let input = field_features(&load_field(&ip)?, cfg.band_limit, m.p_in, "input", &ip)?;
        let target = field_features(&load_field(&tp)?, cfg.band_limit, m.q_out, "target", &tp)?;
        out.push(Sample { input, target });
    }
    Ok(out)
}

fn datasets(cfg: &RunConfig) -> CliResult<(Vec<Sample>, Vec<Sample>)> {
    let mut all = match &cfg.data_dir {
        Some(dir) => load_pairs(dir, cfg)?,
        None => {
            let task = SyntheticTask {
                noise: cfg.noise,
                ..SyntheticTask::new(cfg.task, cfg.band_limit, cfg.samples + cfg.val_samples, cfg.seed)
            };
            make_dataset(&task)?
        }
    };
    if cfg.val_samples >= all.len() {
        return Err(CliError::Config(format!(
            "val_samples = {} leaves no training data out of {}",
            cfg.val_samples,
            all.len()
        )));
    }
    let val = all.split_off(all.len() - cfg.val_samples);
    Ok((all, val))
}

/// Trains per `cfg`, streaming metrics to `output_dir/metrics.csv` and `log`.
pub fn cmd_train(cfg: &RunConfig, log: &mut dyn Write) -> CliResult<TrainOutcome> {
    cfg.prepare_paths()?;
    let model_path = cfg.output_dir.join(MODEL_FILE);
    let metrics_path = cfg.output_dir.join(METRICS_FILE);
    let log_path = cfg.output_dir.join(LOG_FILE);

    let (train_set, val_set) = datasets(cfg)?;
    let mut model = UNet::new(cfg.model_config(), cfg.seed)?;

    let mut metrics = BufWriter::new(File::create(&metrics_path).map_err(io(&metrics_path))?);
    writeln!(metrics, "{METRICS_HEADER}").map_err(io(&metrics_path))?;
    let _ = writeln!(
        log,
        "training {} at L={}: {} train / {} val pairs, {} parameters",
        cfg.task.name(),
        cfg.band_limit,
        train_set.len(),
        val_set.len(),
        model.n_params()
    );
    let _ = writeln!(log, "{METRICS_HEADER}");
    let mut write_err = None;
    let rows = train(&mut model, &train_set, &val_set, &cfg.train_config(), |row| {
        let _ = writeln!(log, "{}", row.csv());
        if write_err.is_none() {
            write_err = writeln!(metrics, "{}", row.csv()).and_then(|_| metrics.flush()).err();
        }
    })?;
    if let Some(e) = write_err {
        return Err(io(&metrics_path)(e));
    }
    drop(metrics);
    save_checkpoint(&model, &model_path)?;

    let mut side = format!(
        "# so3eq training run\n{cfg}\n# normalization: {}\n",
        if cfg.normalize {
            "per-dataset standardization, inputs and targets scaled to unit mean-square coefficient norm"
        } else {
            "none"
        }
    );
    side.push_str(&format!("in_scale = {:e}\nout_scale = {:e}\n", model.in_scale, model.out_scale));
    std::fs::write(&log_path, side).map_err(io(&log_path))?;
    Ok(TrainOutcome {
        rows,
        model_path,
        metrics_path,
    })
}

/// Maps a grid field through a checkpointed model onto the same lat/lon grid.
pub fn cmd_predict(model: &Path, input: &Path, output: &Path) -> CliResult<SphereField> {
    let net = load_checkpoint(model)?;
    let field = load_any(input)?;
    let cfg = net.config();
    if cfg.in_channels != 1 || cfg.out_channels != 1 {
        return Err(CliError::Shape(format!(
            "model maps {} to {} channels; grid files hold one",
            cfg.in_channels, cfg.out_channels
        )));
    }
    let l = net.band_limit();
    let x = field_features(&field, l, cfg.p_in, "input", input)?;
    let y = net.predict(&x)?;
    let plan = field_plan(field.n_lat(), field.n_lon(), l)?;
    let out = spectrum_to_field(&y.to_spectrum(0), order_kind(cfg.q_out)?, &plan)?;
    save_field(&out, output)?;
    Ok(out)
}

pub fn cmd_equivariance(model: &Path, trials: usize, seed: u64, oversample: f64) -> CliResult<AuditReport> {
    if !(oversample.is_finite() && oversample >= 1.0) {
        return Err(CliError::Config(format!("oversample {oversample} must be at least 1")));
    }
    let net = load_checkpoint(model)?.regrid(oversample)?;
    audit(&net, trials, seed)
}

pub fn cmd_rotate(input: &Path, alpha: f64, beta: f64, gamma: f64, output: &Path) -> CliResult<SphereField> {
    if ![alpha, beta, gamma].iter().all(|a| a.is_finite()) {
        return Err(CliError::Config("rotation angles must be finite".into()));
    }
    let out = rotate_field(&load_any(input)?, alpha, beta, gamma)?;
    save_field(&out, output)?;
    Ok(out)
}
