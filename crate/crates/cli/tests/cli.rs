use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use so3eq_cli::convert::{field_plan, spectrum_to_field};
use so3eq_core::signals::{FieldKind, SphereField};
use so3eq_nn::data::{load_field, random_bandlimited, save_field, FIELD_MAGIC};

fn so3eq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_so3eq")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Band-limited field on an `n_lat × n_lon` grid.
fn field(kind: FieldKind, band_limit: usize, n_lat: usize, n_lon: usize, seed: u64) -> SphereField {
    let order = if kind == FieldKind::Scalar { 0 } else { 1 };
    let x = random_bandlimited(seed, band_limit, order, 1.0, order == 0).unwrap();
    spectrum_to_field(&x, kind, &field_plan(n_lat, n_lon, band_limit).unwrap()).unwrap()
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("run.cfg");
    std::fs::write(&path, body).unwrap();
    path
}

const SMALL: &str = "band_limit = 4\ndepth = 1\nepochs = 2\nsamples = 8\nval_samples = 2\nbatch_size = 4\n";

#[test]
fn selftest_exit_codes() {
    for l in ["0", "5"] {
        let o = so3eq(&["selftest", "--bandlimit", l, "--seed", "3"]);
        assert_eq!(code(&o), 0, "{}", stdout(&o));
        assert!(stdout(&o).contains("smoothing_oracle"));
    }
    let o = so3eq(&["selftest", "--bandlimit", "4", "--corrupt-delta"]);
    assert_eq!(code(&o), 4);
    assert!(stdout(&o).contains("orthogonality") && String::from_utf8_lossy(&o.stderr).contains("orthogonality"));
    assert_eq!(code(&so3eq(&["selftest", "--bandlimit", "33"])), 2);
    assert_eq!(code(&so3eq(&["selftest", "--bandlimit", "x"])), 2);
}

#[test]
fn help_documents_metrics_and_exit_codes() {
    let o = so3eq(&["train", "--help"]);
    assert!(stdout(&o).contains("epoch,train_loss,val_distance,val_distance_rotated"));
    assert!(stdout(&so3eq(&["--help"])).contains("5 shape mismatch"));
}

#[test]
fn train_writes_checkpoint_metrics_and_log() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!("{SMALL}task = wind2wind\noutput_dir = out\n"));
    let o = so3eq(&["train", "--config", p(&cfg)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = dir.path().join("out");
    let metrics = std::fs::read_to_string(out.join("metrics.csv")).unwrap();
    let lines: Vec<&str> = metrics.lines().collect();
    assert_eq!(lines[0], "epoch,train_loss,val_distance,val_distance_rotated");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("0,"));
    assert!(out.join("model.so3n").is_file());
    assert!(std::fs::read_to_string(out.join("train.log")).unwrap().contains("normalization"));

    // same config, same bytes
    let again = write_config(dir.path(), &format!("{SMALL}task = wind2wind\noutput_dir = again\n"));
    assert_eq!(code(&so3eq(&["train", "--config", p(&again)])), 0);
    assert_eq!(std::fs::read_to_string(dir.path().join("again/metrics.csv")).unwrap(), metrics);
    assert_eq!(
        std::fs::read(dir.path().join("again/model.so3n")).unwrap(),
        std::fs::read(out.join("model.so3n")).unwrap()
    );
}

#[test]
fn train_error_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "band_limit = 4\nflavour = mint\n");
    assert_eq!(code(&so3eq(&["train", "--config", p(&cfg)])), 2);
    assert_eq!(code(&so3eq(&["train", "--config", p(&dir.path().join("absent.cfg"))])), 3);
    let cfg = write_config(dir.path(), &format!("{SMALL}data_dir = nowhere\n"));
    assert_eq!(code(&so3eq(&["train", "--config", p(&cfg)])), 3);
    assert!(!dir.path().join("metrics.csv").exists());
    let cfg = write_config(dir.path(), &format!("{SMALL}lr = 1e300\noutput_dir = o\n"));
    assert_eq!(code(&so3eq(&["train", "--config", p(&cfg)])), 4);
}

#[test]
fn train_from_data_dir() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    std::fs::create_dir(&data).unwrap();
    for i in 0..5u64 {
        let f = field(FieldKind::Scalar, 4, 11, 10, i);
        save_field(&f, &data.join(format!("s{i}.input.so3g"))).unwrap();
        let g = field(FieldKind::Vector, 4, 11, 10, 100 + i);
        save_field(&g, &data.join(format!("s{i}.target.so3g"))).unwrap();
    }
    let cfg = write_config(dir.path(), &format!("{SMALL}task = temp2wind\ndata_dir = data\noutput_dir = out\n"));
    let o = so3eq(&["train", "--config", p(&cfg)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("3 train / 2 val"));

    // a wind2wind model wants vector inputs
    let cfg = write_config(dir.path(), &format!("{SMALL}task = wind2wind\ndata_dir = data\noutput_dir = out2\n"));
    assert_eq!(code(&so3eq(&["train", "--config", p(&cfg)])), 5);
    // grid too coarse for the band limit
    let body = SMALL.replace("band_limit = 4", "band_limit = 12");
    let cfg = write_config(dir.path(), &format!("{body}task = temp2wind\ndata_dir = data\n"));
    assert_eq!(code(&so3eq(&["train", "--config", p(&cfg)])), 5);
}

#[test]
fn predict_and_equivariance() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!("{SMALL}task = autoencode\noutput_dir = .\n"));
    assert_eq!(code(&so3eq(&["train", "--config", p(&cfg)])), 0);
    let model = dir.path().join("model.so3n");

    let input = dir.path().join("in.so3g");
    save_field(&field(FieldKind::Vector, 4, 13, 12, 7), &input).unwrap();
    let output = dir.path().join("out.so3g");
    let o = so3eq(&["predict", "--model", p(&model), "--input", p(&input), "--output", p(&output)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let y = load_field(&output).unwrap();
    assert_eq!((y.kind(), y.n_lat(), y.n_lon()), (FieldKind::Vector, 13, 12));

    let scalar = dir.path().join("t.so3g");
    save_field(&field(FieldKind::Scalar, 4, 13, 12, 8), &scalar).unwrap();
    assert_eq!(code(&so3eq(&["predict", "--model", p(&model), "--input", p(&scalar), "--output", p(&output)])), 5);
    assert_eq!(code(&so3eq(&["predict", "--model", p(&input), "--input", p(&input), "--output", p(&output)])), 3);
    let missing = dir.path().join("missing.so3g");
    assert_eq!(code(&so3eq(&["predict", "--model", p(&model), "--input", p(&missing), "--output", p(&output)])), 3);

    let o = so3eq(&["equivariance", "--model", p(&model), "--trials", "3", "--seed", "1", "--oversample", "2"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("trials=3") && text.contains("max_rel_error="));
    assert_eq!(stdout(&so3eq(&["equivariance", "--model", p(&model), "--trials", "3", "--seed", "1", "--oversample", "2"])), text);
    assert_eq!(code(&so3eq(&["equivariance", "--model", p(&model), "--oversample", "0.5"])), 2);
}

#[test]
fn rotate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.so3g");
    let f = field(FieldKind::Vector, 6, 15, 14, 9);
    save_field(&f, &input).unwrap();
    let same = dir.path().join("same.so3g");
    let o = so3eq(&["rotate", "--input", p(&input), "--alpha", "0", "--beta", "0", "--gamma", "0", "--output", p(&same)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(load_field(&same).unwrap().max_abs_diff(&f).unwrap() <= 1e-9);

    let fwd = dir.path().join("fwd.so3g");
    let back = dir.path().join("back.so3g");
    let r = |i: &Path, a: &str, b: &str, g: &str, o: &Path| {
        so3eq(&["rotate", "--input", p(i), "--alpha", a, "--beta", b, "--gamma", g, "--output", p(o)])
    };
    assert_eq!(code(&r(&input, "0.3", "1.1", "-2.0", &fwd)), 0);
    let moved = load_field(&fwd).unwrap();
    assert!(moved.max_abs_diff(&f).unwrap() > 1e-3);
    assert_eq!(code(&r(&fwd, "2.0", "-1.1", "-0.3", &back)), 0);
    assert!(load_field(&back).unwrap().max_abs_diff(&f).unwrap() <= 1e-8);

    let junk = dir.path().join("junk.so3g");
    std::fs::write(&junk, b"JUNKJUNKJUNKJUNKJUNK").unwrap();
    assert_ne!(&b"JUNK"[..], &FIELD_MAGIC[..]);
    assert_eq!(code(&r(&junk, "0", "0", "0", &back)), 3);
}
