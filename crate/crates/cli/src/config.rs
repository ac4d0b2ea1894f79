//! `key = value` run configuration for `so3eq train`.

use std::fmt;
use std::path::{Path, PathBuf};

use so3eq_nn::data::TaskKind;
use so3eq_nn::{TrainConfig, UNetConfig};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Augment {
    None,
    Rotate,
}

/// Every key a config file may set, in the order `--help` lists them.
pub const KEYS: &[&str] = &[
    "band_limit",
    "depth",
    "channels",
    "task",
    "epochs",
    "lr",
    "seed",
    "augment",
    "samples",
    "val_samples",
    "batch_size",
    "noise",
    "oversample",
    "slope",
    "learnable_slope",
    "normalize",
    "data_dir",
    "output_dir",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub band_limit: usize,
    pub depth: usize,
    /// Channels per stage; `None` doubles from 8.
    pub channels: Option<Vec<usize>>,
    pub task: TaskKind,
    pub epochs: usize,
    pub lr: f64,
    pub seed: u64,
    pub augment: Augment,
    /// Training pairs generated for a synthetic task.
    pub samples: usize,
    /// Validation pairs, generated or taken from the end of `data_dir`.
    pub val_samples: usize,
    pub batch_size: usize,
    pub noise: f64,
    pub oversample: f64,
    pub slope: f64,
    pub learnable_slope: bool,
    pub normalize: bool,
    /// Directory of `NAME.input.so3g` / `NAME.target.so3g` pairs; replaces the
    /// synthetic generator when set.
    pub data_dir: Option<PathBuf>,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            band_limit: 8,
            depth: 3,
            channels: None,
            task: TaskKind::Autoencode,
            epochs: 30,
            lr: 1e-3,
            seed: 0,
            augment: Augment::None,
            samples: 200,
            val_samples: 40,
            batch_size: 8,
            noise: 0.0,
            oversample: 1.0,
            slope: 0.01,
            learnable_slope: true,
            normalize: true,
            data_dir: None,
            output_dir: PathBuf::from("."),
        }
    }
}

fn bad(line: usize, key: &str, value: &str, what: &str) -> CliError {
    CliError::Config(format!("line {line}: {key} = {value:?}: {what}"))
}

fn num<T: std::str::FromStr>(line: usize, key: &str, value: &str) -> CliResult<T> {
    value.parse().map_err(|_| bad(line, key, value, "not a number"))
}

fn flag(line: usize, key: &str, value: &str) -> CliResult<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(bad(line, key, value, "expected true or false")),
    }
}

impl RunConfig {
    /// Parses `key = value` lines. Blank lines and `#` comments are skipped;
    /// unknown and repeated keys are errors.
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut cfg = RunConfig::default();
        let mut seen: Vec<&str> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {line}: expected key = value, got {body:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            let Some(&known) = KEYS.iter().find(|k| **k == key) else {
                return Err(CliError::Config(format!("line {line}: unknown key {key:?}")));
            };
            if seen.contains(&known) {
                return Err(CliError::Config(format!("line {line}: {key} set twice")));
            }
            seen.push(known);
            match key {
                "band_limit" => cfg.band_limit = num(line, key, value)?,
                "depth" => cfg.depth = num(line, key, value)?,
                "channels" => {
                    let list = value
                        .split(',')
                        .map(|c| num::<usize>(line, key, c.trim()))
                        .collect::<CliResult<Vec<_>>>()?;
                    cfg.channels = Some(list);
                }
                "task" => {
                    cfg.task = TaskKind::parse(value)
                        .ok_or_else(|| bad(line, key, value, "expected wind2wind, temp2wind or autoencode"))?
                }
                "epochs" => cfg.epochs = num(line, key, value)?,
                "lr" => cfg.lr = num(line, key, value)?,
                "seed" => cfg.seed = num(line, key, value)?,
                "augment" => {
                    cfg.augment = match value {
                        "none" => Augment::None,
                        "rotate" => Augment::Rotate,
                        _ => return Err(bad(line, key, value, "expected none or rotate")),
                    }
                }
                "samples" => cfg.samples = num(line, key, value)?,
                "val_samples" => cfg.val_samples = num(line, key, value)?,
                "batch_size" => cfg.batch_size = num(line, key, value)?,
                "noise" => cfg.noise = num(line, key, value)?,
                "oversample" => cfg.oversample = num(line, key, value)?,
                "slope" => cfg.slope = num(line, key, value)?,
                "learnable_slope" => cfg.learnable_slope = flag(line, key, value)?,
                "normalize" => cfg.normalize = flag(line, key, value)?,
                "data_dir" => cfg.data_dir = Some(PathBuf::from(value)),
                "output_dir" => cfg.output_dir = PathBuf::from(value),
                _ => unreachable!("key list and match arms disagree"),
            }
        }
        cfg.check_values()?;
        Ok(cfg)
    }

    /// Reads and parses a config file; relative paths inside it resolve against
    /// the file's directory.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        if cfg.output_dir.is_relative() {
            cfg.output_dir = base.join(&cfg.output_dir);
        }
        if let Some(d) = cfg.data_dir.as_mut() {
            if d.is_relative() {
                *d = base.join(&*d);
            }
        }
        Ok(cfg)
    }

    fn check_values(&self) -> CliResult<()> {
        let fail = |m: String| Err(CliError::Config(m));
        if !(self.lr.is_finite() && self.lr >= 0.0) {
            return fail(format!("lr = {} must be finite and non-negative", self.lr));
        }
        if !(self.noise.is_finite() && self.noise >= 0.0) {
            return fail(format!("noise = {} must be finite and non-negative", self.noise));
        }
        if !(self.oversample.is_finite() && self.oversample >= 1.0) {
            return fail(format!("oversample = {} must be at least 1", self.oversample));
        }
        if self.batch_size == 0 {
            return fail("batch_size must be positive".into());
        }
        if self.data_dir.is_none() && self.samples == 0 {
            return fail("samples must be positive".into());
        }
        if let Some(c) = &self.channels {
            if c.len() != 1 && c.len() != self.depth + 1 {
                return fail(format!(
                    "channels lists {} stages, depth {} needs {} (or one base width)",
                    c.len(),
                    self.depth,
                    self.depth + 1
                ));
            }
        }
        self.model_config().validate().map_err(|e| CliError::Config(e.to_string()))
    }

    /// Fails before any work if `data_dir` is missing or `output_dir` cannot be
    /// created. Creates `output_dir`.
    pub fn prepare_paths(&self) -> CliResult<()> {
        if let Some(d) = &self.data_dir {
            if !d.is_dir() {
                return Err(CliError::Io(format!("data_dir {} is not a directory", d.display())));
            }
        }
        if self.output_dir.exists() && !self.output_dir.is_dir() {
            return Err(CliError::Io(format!("output_dir {} is not a directory", self.output_dir.display())));
        }
        std::fs::create_dir_all(&self.output_dir)
            .map_err(|e| CliError::Io(format!("output_dir {}: {e}", self.output_dir.display())))
    }

    pub fn model_config(&self) -> UNetConfig {
        let t = self.task;
        let mut m = UNetConfig::with_depth(self.band_limit, self.depth, t.input_order(), t.hidden_order(), t.output_order());
        match self.channels.as_deref() {
            Some([base]) => m.channels = (0..=self.depth).map(|s| base << s).collect(),
            Some(list) => m.channels = list.to_vec(),
            None => {}
        }
        m.slope = self.slope;
        m.learnable_slope = self.learnable_slope;
        m.oversample = self.oversample;
        m
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            epochs: self.epochs,
            lr: self.lr,
            batch_size: self.batch_size,
            seed: self.seed,
            augment: self.augment == Augment::Rotate,
            normalize: self.normalize,
        }
    }
}

impl fmt::Display for RunConfig {
    /// Canonical `key = value` form; parses back to the same config.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "band_limit = {}", self.band_limit)?;
        writeln!(f, "depth = {}", self.depth)?;
        if let Some(c) = &self.channels {
            let s: Vec<String> = c.iter().map(|v| v.to_string()).collect();
            writeln!(f, "channels = {}", s.join(","))?;
        }
        writeln!(f, "task = {}", self.task.name())?;
        writeln!(f, "epochs = {}", self.epochs)?;
        writeln!(f, "lr = {:e}", self.lr)?;
        writeln!(f, "seed = {}", self.seed)?;
        let aug = match self.augment {
            Augment::None => "none",
            Augment::Rotate => "rotate",
        };
        writeln!(f, "augment = {aug}")?;
        writeln!(f, "samples = {}", self.samples)?;
        writeln!(f, "val_samples = {}", self.val_samples)?;
        writeln!(f, "batch_size = {}", self.batch_size)?;
        writeln!(f, "noise = {:e}", self.noise)?;
        writeln!(f, "oversample = {}", self.oversample)?;
        writeln!(f, "slope = {}", self.slope)?;
        writeln!(f, "learnable_slope = {}", self.learnable_slope)?;
        writeln!(f, "normalize = {}", self.normalize)?;
        if let Some(d) = &self.data_dir {
            writeln!(f, "data_dir = {}", d.display())?;
        }
        writeln!(f, "output_dir = {}", self.output_dir.display())
    }
}
