mod common;

use common::*;
use so3eq_core::signals::{EulerGrid, RotationMatrix};
use so3eq_core::so3fft::ift_direct;
use so3eq_nn::data::*;
use so3eq_nn::train::Sample;
use so3eq_nn::UNet;

#[test]
fn infinite_decay_leaves_a_constant() {
    let x = random_bandlimited(3, 4, 0, f64::INFINITY, true).unwrap();
    let s = ift_direct(&x, &EulerGrid::for_band_limit(4));
    let c = s.samples()[0];
    assert!(c.norm() > 0.0);
    assert!(s.samples().iter().all(|v| (v - c).norm() < 1e-12));
}

#[test]
fn same_seed_same_signal() {
    let a = random_bandlimited(11, 6, 1, 1.0, false).unwrap();
    let b = random_bandlimited(11, 6, 1, 1.0, false).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, random_bandlimited(12, 6, 1, 1.0, false).unwrap());
    assert_eq!(a.order(), Some(1));
    assert_eq!(a.off_column_residue(1), 0.0);
}

#[test]
fn real_scalar_signals_synthesize_to_real_values() {
    for seed in 0..5 {
        let x = random_bandlimited(seed, 7, 0, 0.5, true).unwrap();
        let s = ift_direct(&x, &EulerGrid::for_band_limit(7));
        let im = s.samples().iter().map(|v| v.im.abs()).fold(0.0, f64::max);
        let re = s.samples().iter().map(|v| v.re.abs()).fold(0.0, f64::max);
        assert!(im <= 1e-10 * re.max(1.0), "{im:e}");
    }
    assert!(random_bandlimited(0, 4, 1, 1.0, true).is_err());
}

#[test]
fn autoencode_targets_equal_inputs() {
    let task = SyntheticTask::new(TaskKind::Autoencode, 4, 5, 1);
    for s in make_dataset(&task).unwrap() {
        assert_eq!(s.input, s.target);
    }
}

#[test]
fn datasets_are_deterministic() {
    let mut task = SyntheticTask::new(TaskKind::Temp2Wind, 4, 4, 2);
    task.noise = 0.1;
    let a = make_dataset(&task).unwrap();
    assert_eq!(a, make_dataset(&task).unwrap());
    assert_eq!(a[0].input.order(), 0);
    assert_eq!(a[0].target.order(), 1);
    task.noise = 0.0;
    let clean = make_dataset(&task).unwrap();
    assert_eq!(clean[1].input, a[1].input);
    assert_ne!(clean[1].target, a[1].target);
}

#[test]
fn teachers_are_equivariant() {
    for kind in [TaskKind::Wind2Wind, TaskKind::Temp2Wind] {
        let task = SyntheticTask::new(kind, 8, 2, 3);
        let teacher = task.teacher().unwrap().unwrap();
        let mut r = rng(4);
        for s in make_dataset(&task).unwrap() {
            let b = random_rotation(&mut r);
            let lhs = teacher.forward(&rotate(&s.input, &b)).unwrap();
            let e = rel_err(&lhs, &rotate(&s.target, &b));
            assert!(e <= 1e-6, "{kind:?}: {e:e}");
        }
    }
}

fn pair() -> Sample {
    let task = SyntheticTask::new(TaskKind::Wind2Wind, 6, 1, 5);
    make_dataset(&task).unwrap().remove(0)
}

#[test]
fn identity_rotation_changes_nothing() {
    let s = pair();
    let r = s.rotated(&RotationMatrix::identity());
    assert!(rel_err(&r.input, &s.input) < 1e-12);
    assert!(rel_err(&r.target, &s.target) < 1e-12);
}

#[test]
fn augmentation_preserves_norm_and_inverts() {
    let s = pair();
    for seed in 0..4 {
        let a = augment_rotate(&s, seed);
        let n0 = s.input.to_spectrum(0).norm_sq();
        assert!((a.input.to_spectrum(0).norm_sq() - n0).abs() <= 1e-10 * n0);
        assert!((a.target.norm_sq() - s.target.norm_sq()).abs() <= 1e-10 * s.target.norm_sq());
        assert_eq!(a.input.order(), 1);
        // recover the rotation from the same seed and undo it
        let mut r = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
        let b = so3eq_nn::train::random_rotation(&mut r);
        let back = a.rotated(&b.inverse());
        assert!(rel_err(&back.input, &s.input) < 1e-10);
        assert!(rel_err(&back.target, &s.target) < 1e-10);
    }
}

#[test]
fn files_round_trip_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    let model = UNet::new(so3eq_nn::UNetConfig::with_depth(4, 1, 1, 1, 1), 1).unwrap();
    let path = dir.path().join("m.so3n");
    save_checkpoint(&model, &path).unwrap();
    let back = load_checkpoint(&path).unwrap();
    assert_eq!(back.params(), model.params());

    let f = so3eq_core::signals::SphereField::vector_from_fn(9, 10, |a, b| (a.cos() * b.sin(), b.cos())).unwrap();
    let path = dir.path().join("f.so3g");
    save_field(&f, &path).unwrap();
    assert_eq!(load_field(&path).unwrap(), f);

    let missing = dir.path().join("nope.so3g");
    assert_eq!(load_field(&missing).unwrap_err().code(), 1);
    std::fs::write(&missing, b"SO3Nxxxx").unwrap();
    assert_eq!(load_field(&missing).unwrap_err().code(), 2);
    std::fs::write(&missing, b"SO3G\x01\x00\x00\x00\x01\x02").unwrap();
    assert_eq!(load_field(&missing).unwrap_err().code(), 4);
}
