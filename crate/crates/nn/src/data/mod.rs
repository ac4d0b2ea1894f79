//! Synthetic tasks, rotation augmentation and the binary file formats.

mod checkpoint;
mod csv_import;
mod grid_file;
mod synthetic;

use std::path::PathBuf;

pub use checkpoint::{load_checkpoint, read_checkpoint, save_checkpoint, write_checkpoint, CHECKPOINT_MAGIC};
pub use csv_import::{import_csv, read_csv};
pub use grid_file::{load_field, read_field, save_field, write_field, FIELD_MAGIC};
pub use synthetic::{augment_rotate, make_dataset, random_bandlimited, SyntheticTask, TaskKind, Teacher};

/// Version written into both file headers.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("bad magic: expected {expected:?}, found {found:?}")]
    Magic { expected: [u8; 4], found: [u8; 4] },
    #[error("unsupported format version {found} (this build reads {supported})")]
    Version { found: u32, supported: u32 },
    #[error("size mismatch: {0}")]
    Size(String),
    #[error("malformed content: {0}")]
    Format(String),
    #[error(transparent)]
    Core(#[from] so3eq_core::Error),
    #[error(transparent)]
    Nn(#[from] Box<crate::error::NnError>),
}

impl From<crate::error::NnError> for DataError {
    fn from(e: crate::error::NnError) -> Self {
        DataError::Nn(Box::new(e))
    }
}

/// Stable numeric tag per error kind.
impl DataError {
    pub fn code(&self) -> u8 {
        match self {
            DataError::Io { .. } => 1,
            DataError::Magic { .. } => 2,
            DataError::Version { .. } => 3,
            DataError::Size(_) => 4,
            DataError::Format(_) => 5,
            DataError::Core(_) => 6,
            DataError::Nn(_) => 7,
        }
    }
}

pub type DataResult<T> = std::result::Result<T, DataError>;

fn io_err(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> DataError + '_ {
    move |source| DataError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Little-endian cursor over a byte slice that reports truncation as a size error.
struct Reader<'a> {
    buf: &'a [u8],
    at: usize,
}

impl<'a> Reader<'a> {
    fn new(buf: &'a [u8]) -> Self {
        Reader { buf, at: 0 }
    }

    fn take(&mut self, n: usize) -> DataResult<&'a [u8]> {
        if self.buf.len() - self.at < n {
            return Err(DataError::Size(format!(
                "need {n} more bytes at offset {}, only {} left",
                self.at,
                self.buf.len() - self.at
            )));
        }
        let s = &self.buf[self.at..self.at + n];
        self.at += n;
        Ok(s)
    }

    fn magic(&mut self, expected: [u8; 4]) -> DataResult<()> {
        let found: [u8; 4] = match self.take(4) {
            Ok(b) => b.try_into().unwrap(),
            Err(_) => {
                let mut f = [0u8; 4];
                f[..self.buf.len()].copy_from_slice(self.buf);
                f
            }
        };
        if found != expected {
            return Err(DataError::Magic { expected, found });
        }
        Ok(())
    }

    fn version(&mut self) -> DataResult<()> {
        let v = self.u32()?;
        if v != FORMAT_VERSION {
            return Err(DataError::Version {
                found: v,
                supported: FORMAT_VERSION,
            });
        }
        Ok(())
    }

    fn u8(&mut self) -> DataResult<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> DataResult<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn i32(&mut self) -> DataResult<i32> {
        Ok(i32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> DataResult<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> DataResult<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64s(&mut self, n: usize) -> DataResult<Vec<f64>> {
        let bytes = self.take(n.checked_mul(8).ok_or_else(|| DataError::Size("payload length overflows".into()))?)?;
        Ok(bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
    }

    fn finish(&self) -> DataResult<()> {
        if self.at != self.buf.len() {
            return Err(DataError::Size(format!("{} trailing bytes", self.buf.len() - self.at)));
        }
        Ok(())
    }
}
