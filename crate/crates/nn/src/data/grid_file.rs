use std::io::{Read, Write};
use std::path::Path;

use so3eq_core::signals::{FieldKind, SphereField};

use super::{io_err, DataError, DataResult, Reader, FORMAT_VERSION};

pub const FIELD_MAGIC: [u8; 4] = *b"SO3G";

/// Serializes a field: magic, version, kind (0 scalar, 1 vector), `n_lat`, `n_lon`,
/// then little-endian `f64` values latitude-major with `(U, V)` interleaved.
pub fn write_field<W: Write>(field: &SphereField, mut w: W) -> std::io::Result<()> {
    let mut buf = Vec::with_capacity(17 + 8 * field.n_lat() * field.n_lon() * field.kind().components());
    buf.extend_from_slice(&FIELD_MAGIC);
    buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    buf.push(match field.kind() {
        FieldKind::Scalar => 0,
        FieldKind::Vector => 1,
    });
    buf.extend_from_slice(&(field.n_lat() as u32).to_le_bytes());
    buf.extend_from_slice(&(field.n_lon() as u32).to_le_bytes());
    for v in field.to_interleaved() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)
}

pub fn read_field<R: Read>(mut r: R) -> DataResult<SphereField> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes).map_err(io_err(Path::new("<stream>")))?;
    parse(&bytes)
}

fn parse(bytes: &[u8]) -> DataResult<SphereField> {
    let mut r = Reader::new(bytes);
    r.magic(FIELD_MAGIC)?;
    r.version()?;
    let kind = match r.u8()? {
        0 => FieldKind::Scalar,
        1 => FieldKind::Vector,
        k => return Err(DataError::Format(format!("unknown field kind {k}"))),
    };
    let n_lat = r.u32()? as usize;
    let n_lon = r.u32()? as usize;
    let n = n_lat
        .checked_mul(n_lon)
        .and_then(|v| v.checked_mul(kind.components()))
        .ok_or_else(|| DataError::Size("grid dimensions overflow".into()))?;
    let payload = r.f64s(n)?;
    r.finish()?;
    Ok(SphereField::from_interleaved(kind, n_lat, n_lon, &payload)?)
}

pub fn save_field(field: &SphereField, path: &Path) -> DataResult<()> {
    let f = std::fs::File::create(path).map_err(io_err(path))?;
    write_field(field, std::io::BufWriter::new(f)).map_err(io_err(path))
}

pub fn load_field(path: &Path) -> DataResult<SphereField> {
    let bytes = std::fs::read(path).map_err(io_err(path))?;
    parse(&bytes)
}
