use num_complex::Complex64;

/// Smallest and largest slope the learnable leaky ReLU may take.
pub const SLOPE_RANGE: (f64, f64) = (1e-4, 1.0);

/// Pointwise nonlinearity applied to grid samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Activation {
    /// No nonlinearity; the layer stays in the spectral domain.
    Identity,
    /// Leaky ReLU applied separately to the real and imaginary parts.
    LeakyRelu { slope: f64, learnable: bool },
    /// `z ↦ z tanh|z|²`, which commutes with phase rotations.
    ModTanh,
}

impl Activation {
    pub fn leaky(slope: f64) -> Self {
        Activation::LeakyRelu { slope, learnable: true }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Activation::Identity => "identity",
            Activation::LeakyRelu { .. } => "leaky_relu",
            Activation::ModTanh => "mod_tanh",
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, Activation::Identity)
    }

    pub fn slope(&self) -> Option<f64> {
        match self {
            Activation::LeakyRelu { slope, .. } => Some(*slope),
            _ => None,
        }
    }

    /// Learnable scalars owned by the activation (0 or 1).
    pub fn n_params(&self) -> usize {
        match self {
            Activation::LeakyRelu { learnable: true, .. } => 1,
            _ => 0,
        }
    }

    pub fn set_slope(&mut self, value: f64) {
        if let Activation::LeakyRelu { slope, .. } = self {
            *slope = value.clamp(SLOPE_RANGE.0, SLOPE_RANGE.1);
        }
    }

    #[inline]
    pub fn apply(&self, z: Complex64) -> Complex64 {
        match *self {
            Activation::Identity => z,
            Activation::LeakyRelu { slope, .. } => Complex64::new(leaky(z.re, slope), leaky(z.im, slope)),
            Activation::ModTanh => z * (z.norm_sqr()).tanh(),
        }
    }

    pub fn apply_all(&self, z: &[Complex64]) -> Vec<Complex64> {
        z.iter().map(|v| self.apply(*v)).collect()
    }

    /// Pulls the output gradient `g` back through the activation at `z`.
    /// Returns the input gradient and the slope-gradient contribution.
    #[inline]
    pub fn backward(&self, z: Complex64, g: Complex64) -> (Complex64, f64) {
        match *self {
            Activation::Identity => (g, 0.0),
            Activation::LeakyRelu { slope, .. } => {
                let (dr, sr) = if z.re > 0.0 { (1.0, 0.0) } else { (slope, z.re) };
                let (di, si) = if z.im > 0.0 { (1.0, 0.0) } else { (slope, z.im) };
                (Complex64::new(g.re * dr, g.im * di), g.re * sr + g.im * si)
            }
            Activation::ModTanh => {
                let r2 = z.norm_sqr();
                let t = r2.tanh();
                let dt = 1.0 - t * t;
                // columns of the real Jacobian as complex numbers
                let d_re = Complex64::new(t, 0.0) + z * (2.0 * dt * z.re);
                let d_im = Complex64::new(0.0, t) + z * (2.0 * dt * z.im);
                let gc = g.conj();
                (Complex64::new((gc * d_re).re, (gc * d_im).re), 0.0)
            }
        }
    }
}

#[inline]
fn leaky(x: f64, slope: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        slope * x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn leaky_examples() {
        let a = Activation::leaky(0.01);
        assert_eq!(a.apply(c(1.0, 1.0)), c(1.0, 1.0));
        assert_eq!(a.apply(c(-1.0, -1.0)), c(-0.01, -0.01));
        assert_eq!(a.apply(c(2.0, -3.0)), c(2.0, -0.03));
    }

    #[test]
    fn leaky_is_positively_homogeneous() {
        let a = Activation::leaky(0.2);
        for z in [c(0.3, -1.2), c(-2.0, 0.5), c(-0.1, -0.7)] {
            for t in [0.5, 3.0, 17.0] {
                assert!((a.apply(z * t) - a.apply(z) * t).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn subgradient_at_zero_uses_slope() {
        let a = Activation::leaky(0.3);
        let (g, _) = a.backward(c(0.0, 0.0), c(1.0, 1.0));
        assert_eq!(g, c(0.3, 0.3));
    }

    #[test]
    fn slope_is_clamped() {
        let mut a = Activation::leaky(0.01);
        a.set_slope(-1.0);
        assert_eq!(a.slope(), Some(SLOPE_RANGE.0));
        a.set_slope(7.0);
        assert_eq!(a.slope(), Some(1.0));
    }

    #[test]
    fn mod_tanh_commutes_with_phase() {
        let z = c(0.4, -0.9);
        let w = Complex64::from_polar(1.0, 1.1);
        assert!((Activation::ModTanh.apply(z * w) - Activation::ModTanh.apply(z) * w).norm() < 1e-15);
    }

    #[test]
    fn backward_matches_finite_differences() {
        let h = 1e-6;
        for act in [Activation::leaky(0.1), Activation::ModTanh] {
            for z in [c(0.7, -0.4), c(-1.3, 0.2)] {
                let g = c(0.3, -1.1);
                let loss = |z: Complex64| (act.apply(z) * g.conj()).re;
                let fd = c(
                    (loss(z + c(h, 0.0)) - loss(z - c(h, 0.0))) / (2.0 * h),
                    (loss(z + c(0.0, h)) - loss(z - c(0.0, h))) / (2.0 * h),
                );
                let (an, _) = act.backward(z, g);
                assert!((fd - an).norm() < 1e-8, "{act:?} {z}");
            }
        }
        let z = c(-0.7, -0.4);
        let g = c(0.3, -1.1);
        let loss = |s: f64| (Activation::leaky(s).apply(z) * g.conj()).re;
        let fd = (loss(0.2 + h) - loss(0.2 - h)) / (2.0 * h);
        let (_, gs) = Activation::leaky(0.2).backward(z, g);
        assert!((fd - gs).abs() < 1e-8);
    }
}
