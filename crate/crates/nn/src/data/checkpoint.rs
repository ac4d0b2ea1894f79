use std::io::{Read, Write};
use std::path::Path;

use crate::activation::Activation;
use crate::unet::{UNet, UNetConfig};

use super::{io_err, DataError, DataResult, Reader, FORMAT_VERSION};

pub const CHECKPOINT_MAGIC: [u8; 4] = *b"SO3N";

fn activation_tag(a: &Activation) -> u8 {
    match a {
        Activation::Identity => 0,
        Activation::LeakyRelu { .. } => 1,
        Activation::ModTanh => 2,
    }
}

/// Serializes a model.
///
/// Layout after magic and version: the schedule (`u32` stage count, bands, channels),
/// `u32` in/out channels, `i32` orders `p_in, q_hidden, q_out`, `f64` slope,
/// `u8` learnable flag, `f64` oversample, `f64` in/out scales, then one record per
/// layer (`u8` activation, `u32` in, `u32` out, `i32` p, `i32` q, `u32` band,
/// `u8` bias flag) and finally `u64` parameter count and the parameters.
pub fn write_checkpoint<W: Write>(model: &UNet, mut w: W) -> std::io::Result<()> {
    let c = model.config();
    let mut b = Vec::new();
    b.extend_from_slice(&CHECKPOINT_MAGIC);
    b.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    b.extend_from_slice(&(c.bands.len() as u32).to_le_bytes());
    for v in c.bands.iter().chain(&c.channels) {
        b.extend_from_slice(&(*v as u32).to_le_bytes());
    }
    b.extend_from_slice(&(c.in_channels as u32).to_le_bytes());
    b.extend_from_slice(&(c.out_channels as u32).to_le_bytes());
    for o in [c.p_in, c.q_hidden, c.q_out] {
        b.extend_from_slice(&o.to_le_bytes());
    }
    b.extend_from_slice(&c.slope.to_le_bytes());
    b.push(c.learnable_slope as u8);
    b.extend_from_slice(&c.oversample.to_le_bytes());
    b.extend_from_slice(&model.in_scale.to_le_bytes());
    b.extend_from_slice(&model.out_scale.to_le_bytes());
    b.extend_from_slice(&(model.layers().len() as u32).to_le_bytes());
    for layer in model.layers() {
        let s = layer.spec();
        b.push(activation_tag(&s.activation));
        b.extend_from_slice(&(s.in_channels as u32).to_le_bytes());
        b.extend_from_slice(&(s.out_channels as u32).to_le_bytes());
        b.extend_from_slice(&s.p.to_le_bytes());
        b.extend_from_slice(&s.q.to_le_bytes());
        b.extend_from_slice(&(s.band_limit as u32).to_le_bytes());
        b.push(layer.bias().is_some() as u8);
    }
    let params = model.params();
    b.extend_from_slice(&(params.len() as u64).to_le_bytes());
    for p in params {
        b.extend_from_slice(&p.to_le_bytes());
    }
    w.write_all(&b)
}

pub fn read_checkpoint<R: Read>(mut r: R) -> DataResult<UNet> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes).map_err(io_err(Path::new("<stream>")))?;
    parse(&bytes)
}

fn parse(bytes: &[u8]) -> DataResult<UNet> {
    let mut r = Reader::new(bytes);
    r.magic(CHECKPOINT_MAGIC)?;
    r.version()?;
    let stages = r.u32()? as usize;
    if stages == 0 || stages > 64 {
        return Err(DataError::Format(format!("implausible stage count {stages}")));
    }
    let bands = (0..stages).map(|_| r.u32().map(|v| v as usize)).collect::<DataResult<Vec<_>>>()?;
    let channels = (0..stages).map(|_| r.u32().map(|v| v as usize)).collect::<DataResult<Vec<_>>>()?;
    let in_channels = r.u32()? as usize;
    let out_channels = r.u32()? as usize;
    let (p_in, q_hidden, q_out) = (r.i32()?, r.i32()?, r.i32()?);
    let slope = r.f64()?;
    let learnable_slope = r.u8()? != 0;
    let oversample = r.f64()?;
    let in_scale = r.f64()?;
    let out_scale = r.f64()?;
    let config = UNetConfig {
        bands,
        channels,
        in_channels,
        out_channels,
        p_in,
        q_hidden,
        q_out,
        slope,
        learnable_slope,
        oversample,
    };
    config.validate().map_err(|e| DataError::Format(e.to_string()))?;
    let mut model = UNet::zeros(config)?;
    let n_layers = r.u32()? as usize;
    if n_layers != model.layers().len() {
        return Err(DataError::Format(format!(
            "{n_layers} layer records for a schedule with {} layers",
            model.layers().len()
        )));
    }
    for (i, layer) in model.layers().iter().enumerate() {
        let s = layer.spec();
        let rec = (r.u8()?, r.u32()? as usize, r.u32()? as usize, r.i32()?, r.i32()?, r.u32()? as usize, r.u8()? != 0);
        let want = (
            activation_tag(&s.activation),
            s.in_channels,
            s.out_channels,
            s.p,
            s.q,
            s.band_limit,
            layer.bias().is_some(),
        );
        if rec != want {
            return Err(DataError::Format(format!("layer {i} record {rec:?} disagrees with schedule {want:?}")));
        }
    }
    let n = r.u64()? as usize;
    if n != model.n_params() {
        return Err(DataError::Size(format!(
            "{n} parameters stored, topology needs {}",
            model.n_params()
        )));
    }
    let params = r.f64s(n)?;
    r.finish()?;
    model.set_params(&params)?;
    model.in_scale = in_scale;
    model.out_scale = out_scale;
    Ok(model)
}

pub fn save_checkpoint(model: &UNet, path: &Path) -> DataResult<()> {
    let f = std::fs::File::create(path).map_err(io_err(path))?;
    write_checkpoint(model, std::io::BufWriter::new(f)).map_err(io_err(path))
}

pub fn load_checkpoint(path: &Path) -> DataResult<UNet> {
    let bytes = std::fs::read(path).map_err(io_err(path))?;
    parse(&bytes)
}
