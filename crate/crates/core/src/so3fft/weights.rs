use std::f64::consts::PI;

use num_complex::Complex64;

/// `∫₀^π e^{ikβ} dβ`.
fn interval_integral(k: i64) -> Complex64 {
    if k == 0 {
        Complex64::new(PI, 0.0)
    } else if k % 2 == 0 {
        Complex64::new(0.0, 0.0)
    } else {
        Complex64::new(0.0, 2.0 / k as f64)
    }
}

/// Table of a weight sequence on `-max_k ..= max_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable {
    max_k: usize,
    values: Vec<Complex64>,
}

impl WeightTable {
    fn build(max_k: usize, f: impl Fn(i64) -> Complex64) -> Self {
        let m = max_k as i64;
        WeightTable {
            max_k,
            values: (-m..=m).map(f).collect(),
        }
    }

    pub fn max_k(&self) -> usize {
        self.max_k
    }

    /// Weight at `k`; zero outside the tabulated range.
    #[inline]
    pub fn get(&self, k: i64) -> Complex64 {
        if k.unsigned_abs() as usize > self.max_k {
            return Complex64::new(0.0, 0.0);
        }
        self.values[(k + self.max_k as i64) as usize]
    }
}

/// `w_k = (1/2π) ∫₀^π e^{ikβ} sin β dβ` for `|k| ≤ max_k`, in closed form.
pub fn beta_weights(max_k: usize) -> WeightTable {
    WeightTable::build(max_k, |k| {
        (interval_integral(k + 1) - interval_integral(k - 1)) / Complex64::new(0.0, 2.0) / (2.0 * PI)
    })
}

/// `h_k = (1/2π) ∫₀^π e^{ikβ} dβ`: `1/2` at zero, `i/(πk)` for odd `k`, zero otherwise.
///
/// These are the weights the fast transform convolves with, since it folds `sin β`
/// into the sampled integrand before the FFT.
pub fn interval_weights(max_k: usize) -> WeightTable {
    WeightTable::build(max_k, |k| interval_integral(k) / (2.0 * PI))
}

/// Interior quadrature weights `q_j` on `β_j = πj/(n−1)` with
/// `Σ_j q_j g(β_j) = ∫₀^π g(β) dβ` for every sine polynomial `g` of degree `≤ n − 2`.
/// The pole weights are zero.
pub fn dst_weights(n_beta: usize) -> Vec<f64> {
    let n = n_beta;
    let mut q = vec![0.0; n];
    if n < 3 {
        return q;
    }
    let h = PI / (n - 1) as f64;
    for (j, qj) in q.iter_mut().enumerate().take(n - 1).skip(1) {
        let b = j as f64 * h;
        let s: f64 = (1..=n - 2)
            .step_by(2)
            .map(|k| 2.0 / k as f64 * (k as f64 * b).sin())
            .sum();
        *qj = 2.0 / (n - 1) as f64 * s;
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Composite Gauss-Legendre (5 points) on `n` panels.
    fn quad(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let x = [
            0.0,
            -0.538_469_310_105_683_1,
            0.538_469_310_105_683_1,
            -0.906_179_845_938_664,
            0.906_179_845_938_664,
        ];
        let w = [
            0.568_888_888_888_888_9,
            0.478_628_670_499_366_5,
            0.478_628_670_499_366_5,
            0.236_926_885_056_189_1,
            0.236_926_885_056_189_1,
        ];
        let h = (b - a) / n as f64;
        let mut acc = 0.0;
        for p in 0..n {
            let c = a + (p as f64 + 0.5) * h;
            for (xi, wi) in x.iter().zip(&w) {
                acc += wi * f(c + 0.5 * h * xi);
            }
        }
        acc * 0.5 * h
    }

    #[test]
    fn w0_is_one_over_pi() {
        assert!((beta_weights(0).get(0) - Complex64::new(1.0 / PI, 0.0)).norm() < 1e-16);
    }

    #[test]
    fn beta_weights_match_quadrature() {
        let w = beta_weights(50);
        for k in -50i64..=50 {
            let kf = k as f64;
            let re = quad(|b| (kf * b).cos() * b.sin(), 0.0, PI, 400) / (2.0 * PI);
            let im = quad(|b| (kf * b).sin() * b.sin(), 0.0, PI, 400) / (2.0 * PI);
            assert!((w.get(k) - Complex64::new(re, im)).norm() <= 1e-12, "k = {k}");
        }
    }

    #[test]
    fn conjugate_symmetry() {
        let w = beta_weights(20);
        let h = interval_weights(20);
        for k in 0..=20 {
            assert_eq!(w.get(-k), w.get(k).conj());
            assert_eq!(h.get(-k), h.get(k).conj());
        }
    }

    #[test]
    fn sine_weights_from_interval_weights() {
        let w = beta_weights(30);
        let h = interval_weights(31);
        for k in -30..=30 {
            let via_h = (h.get(k + 1) - h.get(k - 1)) / Complex64::new(0.0, 2.0);
            assert!((via_h - w.get(k)).norm() < 1e-16);
        }
    }

    #[test]
    fn interval_weights_match_quadrature() {
        let h = interval_weights(15);
        for k in -15i64..=15 {
            let kf = k as f64;
            let re = quad(|b| (kf * b).cos(), 0.0, PI, 200) / (2.0 * PI);
            let im = quad(|b| (kf * b).sin(), 0.0, PI, 200) / (2.0 * PI);
            assert!((h.get(k) - Complex64::new(re, im)).norm() <= 1e-13);
        }
    }

    #[test]
    fn dst_weights_integrate_sines() {
        for n in [3usize, 5, 8, 13] {
            let q = dst_weights(n);
            assert_eq!(q[0], 0.0);
            assert_eq!(q[n - 1], 0.0);
            for k in 1..=n - 2 {
                let got: f64 = (0..n)
                    .map(|j| q[j] * (k as f64 * PI * j as f64 / (n - 1) as f64).sin())
                    .sum();
                let exact = if k % 2 == 1 { 2.0 / k as f64 } else { 0.0 };
                assert!((got - exact).abs() < 1e-13, "n={n} k={k}");
            }
        }
    }
}
