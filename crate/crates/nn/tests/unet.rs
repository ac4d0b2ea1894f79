mod common;

use common::*;
use so3eq_nn::data::{read_checkpoint, write_checkpoint};
use so3eq_nn::train::{train, Sample, TrainConfig};
use so3eq_nn::{UNet, UNetConfig};

fn small(depth: usize, l: usize) -> UNetConfig {
    let mut c = UNetConfig::with_depth(l, depth, 1, 1, 1);
    c.channels = (0..=depth).map(|s| 2 + s).collect();
    c
}

#[test]
fn default_schedule() {
    let c = UNetConfig::default_vector();
    assert_eq!(c.bands, vec![16, 12, 8, 4]);
    assert_eq!(c.channels, vec![8, 16, 32, 64]);
    assert_eq!(c.depth(), 3);
    assert_eq!(c.layer_specs().len(), 8);
    c.validate().unwrap();
}

#[test]
fn schedules_are_validated() {
    let mut c = small(2, 8);
    c.bands = vec![8, 8, 4];
    assert!(UNet::zeros(c).is_err());
    let mut c = small(2, 8);
    c.channels.pop();
    assert!(UNet::zeros(c).is_err());
    let mut c = small(1, 8);
    c.bands = vec![8, 0];
    assert!(UNet::zeros(c).is_err());
    let mut c = small(1, 8);
    c.oversample = 0.5;
    assert!(UNet::zeros(c).is_err());
}

#[test]
fn depth_zero_is_plain_layer_composition() {
    let model = UNet::new(small(0, 6), 3).unwrap();
    let x = random_features(&mut rng(1), 6, 1, 1);
    let layers = model.layers();
    assert_eq!(layers.len(), 2);
    let composed = layers[1].forward(&layers[0].forward(&x).unwrap()).unwrap();
    assert_eq!(model.forward(&x).unwrap(), composed);
}

#[test]
fn taped_and_plain_forward_agree_bitwise() {
    let model = UNet::new(small(2, 6), 4).unwrap();
    let x = random_features(&mut rng(2), 6, 1, 1);
    let (y, _) = model.forward_taped(&x).unwrap();
    assert_eq!(y, model.forward(&x).unwrap());
}

#[test]
fn output_lives_in_the_output_order() {
    let mut c = small(2, 6);
    c.p_in = 0;
    c.q_hidden = 0;
    let model = UNet::new(c, 5).unwrap();
    let y = model.forward(&random_features(&mut rng(3), 6, 0, 1)).unwrap();
    assert_eq!(y.order(), 1);
    assert_eq!(y.to_spectrum(0).off_column_residue(1), 0.0);
    assert!(y.norm_sq() > 0.0);
}

#[test]
fn model_equivariance_improves_with_oversampling() {
    let model = UNet::new(small(2, 8), 6).unwrap();
    let fine = model.regrid(3.0).unwrap();
    assert_eq!(fine.params(), model.params());
    let mut r = rng(7);
    let x = random_features(&mut r, 8, 1, 1);
    let b = random_rotation(&mut r);
    let err = |m: &UNet| rel_err(&m.forward(&rotate(&x, &b)).unwrap(), &rotate(&m.forward(&x).unwrap(), &b));
    let (coarse, finer) = (err(&model), err(&fine));
    assert!(coarse < 5e-2 && finer < coarse / 5.0, "{coarse:e} {finer:e}");
}

#[test]
fn checkpoint_reproduces_forward_outputs() {
    let mut model = UNet::new(small(2, 6), 8).unwrap();
    model.in_scale = 0.7;
    model.out_scale = 1.9;
    let mut buf = Vec::new();
    write_checkpoint(&model, &mut buf).unwrap();
    let back = read_checkpoint(&buf[..]).unwrap();
    let x = random_features(&mut rng(9), 6, 1, 1);
    assert_eq!(back.predict(&x).unwrap(), model.predict(&x).unwrap());
}

fn toy_set(n: usize, seed: u64) -> Vec<Sample> {
    let mut r = rng(seed);
    (0..n)
        .map(|_| {
            let input = random_features(&mut r, 4, 1, 1);
            let mut target = input.clone();
            target.scale(-0.5);
            Sample { input, target }
        })
        .collect()
}

#[test]
fn zero_learning_rate_leaves_parameters_unchanged() {
    let mut model = UNet::new(small(1, 4), 10).unwrap();
    let before = model.params();
    let cfg = TrainConfig {
        epochs: 1,
        lr: 0.0,
        batch_size: 3,
        ..TrainConfig::default()
    };
    let rows = train(&mut model, &toy_set(7, 1), &toy_set(2, 2), &cfg, |_| {}).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(model.params(), before);
}

#[test]
fn training_is_deterministic_and_makes_progress() {
    let run = || {
        let mut model = UNet::new(small(1, 4), 11).unwrap();
        let cfg = TrainConfig {
            epochs: 20,
            lr: 2e-2,
            batch_size: 4,
            seed: 5,
            augment: true,
            normalize: true,
        };
        let rows = train(&mut model, &toy_set(16, 3), &toy_set(4, 4), &cfg, |_| {}).unwrap();
        (rows.iter().map(|r| r.csv()).collect::<Vec<_>>(), rows)
    };
    let (a, rows) = run();
    let (b, _) = run();
    assert_eq!(a, b);
    assert!(rows.last().unwrap().train_loss < 0.6 * rows[0].train_loss, "{a:?}");
}
