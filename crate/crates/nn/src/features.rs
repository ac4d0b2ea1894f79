use num_complex::Complex64;
use so3eq_core::signals::{column_of_order, SpectralSignal};

use crate::error::{NnError, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Offset of `(l, m)` in a column of order `p` (degrees `l ≥ |p|`).
#[inline]
pub fn column_index(order: i32, l: usize, m: i32) -> usize {
    let p = order.unsigned_abs() as usize;
    l * l - p * p + (m + l as i32) as usize
}

/// Length of a column of order `p` up to band limit `L`.
pub fn column_len(band_limit: usize, order: i32) -> usize {
    let p = order.unsigned_abs() as usize;
    if p > band_limit {
        0
    } else {
        (band_limit + 1).pow(2) - p * p
    }
}

/// Multi-channel signal in `X_p`, each channel stored as its single nonzero
/// coefficient column `x̂ˡₘ,₋ₚ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Features {
    band_limit: usize,
    order: i32,
    channels: Vec<Vec<Complex64>>,
}

impl Features {
    pub fn zeros(band_limit: usize, order: i32, n_channels: usize) -> Self {
        Features {
            band_limit,
            order,
            channels: vec![vec![ZERO; column_len(band_limit, order)]; n_channels],
        }
    }

    pub fn new(band_limit: usize, order: i32, channels: Vec<Vec<Complex64>>) -> Result<Self> {
        let len = column_len(band_limit, order);
        if channels.iter().any(|c| c.len() != len) {
            return Err(NnError::Shape(format!(
                "every channel of order {order} at band limit {band_limit} needs {len} coefficients"
            )));
        }
        Ok(Features {
            band_limit,
            order,
            channels,
        })
    }

    /// Packs spectral signals that are all in `X_p`; other columns are ignored.
    pub fn from_spectra(signals: &[SpectralSignal], order: i32) -> Result<Self> {
        let band_limit = signals
            .first()
            .map(|s| s.band_limit())
            .ok_or_else(|| NnError::Shape("no channels".into()))?;
        let col = column_of_order(order);
        let mut channels = Vec::with_capacity(signals.len());
        for s in signals {
            if s.band_limit() != band_limit {
                return Err(NnError::Shape("channels differ in band limit".into()));
            }
            let mut c = Vec::with_capacity(column_len(band_limit, order));
            for l in order.unsigned_abs() as usize..=band_limit {
                let li = l as i32;
                for m in -li..=li {
                    c.push(s.get(l, m, col));
                }
            }
            channels.push(c);
        }
        Ok(Features {
            band_limit,
            order,
            channels,
        })
    }

    pub fn from_spectrum(signal: &SpectralSignal, order: i32) -> Result<Self> {
        Self::from_spectra(std::slice::from_ref(signal), order)
    }

    /// Channel `c` as a full spectrum tagged with its order.
    pub fn to_spectrum(&self, c: usize) -> SpectralSignal {
        SpectralSignal::from_column(self.band_limit, self.order, |l, m| {
            self.channels[c][column_index(self.order, l, m)]
        })
    }

    pub fn band_limit(&self) -> usize {
        self.band_limit
    }

    pub fn order(&self) -> i32 {
        self.order
    }

    pub fn n_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn channel(&self, c: usize) -> &[Complex64] {
        &self.channels[c]
    }

    pub fn channel_mut(&mut self, c: usize) -> &mut [Complex64] {
        &mut self.channels[c]
    }

    pub fn channels(&self) -> &[Vec<Complex64>] {
        &self.channels
    }

    #[inline]
    pub fn get(&self, c: usize, l: usize, m: i32) -> Complex64 {
        self.channels[c][column_index(self.order, l, m)]
    }

    /// Parseval norm squared summed over channels.
    pub fn norm_sq(&self) -> f64 {
        let p = self.order.unsigned_abs() as usize;
        self.channels
            .iter()
            .map(|ch| {
                let mut acc = 0.0;
                for l in p..=self.band_limit {
                    let start = column_index(self.order, l, -(l as i32));
                    let s: f64 = ch[start..start + 2 * l + 1].iter().map(|c| c.norm_sqr()).sum();
                    acc += s / (2 * l + 1) as f64;
                }
                acc
            })
            .sum()
    }

    pub fn scale(&mut self, factor: f64) {
        for ch in &mut self.channels {
            for c in ch {
                *c *= factor;
            }
        }
    }

    pub fn add_assign(&mut self, other: &Features) -> Result<()> {
        self.check_like(other)?;
        for (a, b) in self.channels.iter_mut().zip(&other.channels) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        Ok(())
    }

    pub fn check_like(&self, other: &Features) -> Result<()> {
        if self.band_limit != other.band_limit
            || self.order != other.order
            || self.channels.len() != other.channels.len()
        {
            return Err(NnError::Shape(format!(
                "features (L={}, p={}, C={}) vs (L={}, p={}, C={})",
                self.band_limit,
                self.order,
                self.channels.len(),
                other.band_limit,
                other.order,
                other.channels.len()
            )));
        }
        Ok(())
    }

    /// Truncates every channel to band limit `l_out`.
    pub fn pool(&self, l_out: usize) -> Features {
        let len = column_len(l_out, self.order);
        Features {
            band_limit: l_out,
            order: self.order,
            channels: self.channels.iter().map(|c| c[..len].to_vec()).collect(),
        }
    }

    /// Zero-pads every channel up to band limit `l_out`.
    pub fn unpool(&self, l_out: usize) -> Features {
        let len = column_len(l_out, self.order);
        Features {
            band_limit: l_out,
            order: self.order,
            channels: self
                .channels
                .iter()
                .map(|c| {
                    let mut v = c.clone();
                    v.resize(len, ZERO);
                    v
                })
                .collect(),
        }
    }

    /// Channel-wise concatenation of features with equal band limit and order.
    pub fn concat(parts: &[&Features]) -> Result<Features> {
        let first = parts.first().ok_or_else(|| NnError::Shape("nothing to concatenate".into()))?;
        let mut channels = Vec::new();
        for p in parts {
            if p.band_limit != first.band_limit || p.order != first.order {
                return Err(NnError::Shape("concatenated features differ in band limit or order".into()));
            }
            channels.extend(p.channels.iter().cloned());
        }
        Ok(Features {
            band_limit: first.band_limit,
            order: first.order,
            channels,
        })
    }

    /// Splits off channel ranges, the inverse of [`Features::concat`].
    pub fn split(&self, sizes: &[usize]) -> Vec<Features> {
        let mut out = Vec::with_capacity(sizes.len());
        let mut start = 0;
        for &s in sizes {
            out.push(Features {
                band_limit: self.band_limit,
                order: self.order,
                channels: self.channels[start..start + s].to_vec(),
            });
            start += s;
        }
        out
    }

    /// Applies a left translation given per-degree matrices `bˡₛₘ`
    /// (see `rotation_coefficients`): `yˡₘ = Σₛ xˡₛ bˡₛₘ`.
    pub fn rotate_with(&self, coeffs: &[Vec<Complex64>]) -> Features {
        let p = self.order.unsigned_abs() as usize;
        let channels = self
            .channels
            .iter()
            .map(|x| {
                let mut y = vec![ZERO; x.len()];
                for l in p..=self.band_limit {
                    let dim = 2 * l + 1;
                    let base = column_index(self.order, l, -(l as i32));
                    let b = &coeffs[l];
                    for s in 0..dim {
                        let v = x[base + s];
                        for m in 0..dim {
                            y[base + m] += v * b[s * dim + m];
                        }
                    }
                }
                y
            })
            .collect();
        Features {
            band_limit: self.band_limit,
            order: self.order,
            channels,
        }
    }

    /// Real inner product `Re Σ a conj(b)` over raw coefficients, the pairing under
    /// which gradients are expressed.
    pub fn real_dot(&self, other: &Features) -> f64 {
        self.channels
            .iter()
            .zip(&other.channels)
            .flat_map(|(a, b)| a.iter().zip(b))
            .map(|(x, y)| (x * y.conj()).re)
            .sum()
    }
}
