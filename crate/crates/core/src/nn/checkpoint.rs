//! Checkpoint container: magic "SGNN", version u16, a free-form metadata
//! string, then a named-tensor table. Little-endian throughout.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{NnError, Tensor};

pub const CHECKPOINT_MAGIC: [u8; 4] = *b"SGNN";
pub const CHECKPOINT_VERSION: u16 = 1;

struct CountingReader<R> {
    inner: R,
    offset: u64,
}

impl<R: Read> CountingReader<R> {
    fn new(inner: R) -> Self {
        CountingReader { inner, offset: 0 }
    }

    fn read_exact_at(&mut self, buf: &mut [u8], what: &str) -> Result<(), NnError> {
        let at = self.offset;
        self.inner.read_exact(buf).map_err(|e| NnError::Parse {
            offset: at,
            msg: format!("truncated while reading {what}: {e}"),
        })?;
        self.offset += buf.len() as u64;
        Ok(())
    }

    fn read_u16(&mut self, what: &str) -> Result<u16, NnError> {
        let mut b = [0u8; 2];
        self.read_exact_at(&mut b, what)?;
        Ok(u16::from_le_bytes(b))
    }

    fn read_u32(&mut self, what: &str) -> Result<u32, NnError> {
        let mut b = [0u8; 4];
        self.read_exact_at(&mut b, what)?;
        Ok(u32::from_le_bytes(b))
    }

    fn read_u64(&mut self, what: &str) -> Result<u64, NnError> {
        let mut b = [0u8; 8];
        self.read_exact_at(&mut b, what)?;
        Ok(u64::from_le_bytes(b))
    }
}

/// Writes a checkpoint with a metadata string and named tensors.
pub fn save_checkpoint(
    path: &Path,
    meta: &str,
    entries: &[(String, &Tensor)],
) -> Result<(), NnError> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&CHECKPOINT_MAGIC)?;
    w.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
    w.write_all(&(meta.len() as u32).to_le_bytes())?;
    w.write_all(meta.as_bytes())?;
    w.write_all(&(entries.len() as u32).to_le_bytes())?;
    for (name, tensor) in entries {
        let bytes = name.as_bytes();
        w.write_all(&(bytes.len() as u16).to_le_bytes())?;
        w.write_all(bytes)?;
        w.write_all(&[tensor.shape().len() as u8])?;
        for &d in tensor.shape() {
            w.write_all(&(d as u64).to_le_bytes())?;
        }
        for v in tensor.data() {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads back `(meta, named tensors)`; rejects bad magic, unknown versions,
/// truncation, and trailing bytes with a byte offset.
pub fn load_checkpoint(path: &Path) -> Result<(String, Vec<(String, Tensor)>), NnError> {
    let mut r = CountingReader::new(BufReader::new(File::open(path)?));
    let mut magic = [0u8; 4];
    r.read_exact_at(&mut magic, "magic")?;
    if magic != CHECKPOINT_MAGIC {
        return Err(NnError::Parse {
            offset: 0,
            msg: format!("bad magic {magic:?}, expected {CHECKPOINT_MAGIC:?}"),
        });
    }
    let version = r.read_u16("version")?;
    if version != CHECKPOINT_VERSION {
        return Err(NnError::Version {
            found: version,
            expected: CHECKPOINT_VERSION,
        });
    }
    let meta_len = r.read_u32("meta length")? as usize;
    let mut meta_bytes = vec![0u8; meta_len];
    r.read_exact_at(&mut meta_bytes, "meta")?;
    let meta = String::from_utf8(meta_bytes).map_err(|e| NnError::Parse {
        offset: 10,
        msg: format!("metadata is not UTF-8: {e}"),
    })?;

    let count = r.read_u32("entry count")? as usize;
    let mut entries = Vec::with_capacity(count);
    for i in 0..count {
        let name_len = r.read_u16("name length")? as usize;
        let mut name_bytes = vec![0u8; name_len];
        r.read_exact_at(&mut name_bytes, "name")?;
        let name = String::from_utf8(name_bytes).map_err(|e| NnError::Parse {
            offset: r.offset,
            msg: format!("entry {i} name is not UTF-8: {e}"),
        })?;
        let mut ndim = [0u8; 1];
        r.read_exact_at(&mut ndim, "rank")?;
        let mut shape = Vec::with_capacity(ndim[0] as usize);
        for _ in 0..ndim[0] {
            let d = r.read_u64("dimension")?;
            shape.push(d as usize);
        }
        let len: usize = shape.iter().product();
        // Guard against absurd sizes from corrupted headers.
        if len > (1 << 32) {
            return Err(NnError::Parse {
                offset: r.offset,
                msg: format!("entry {name} claims {len} values"),
            });
        }
        let mut data = Vec::with_capacity(len);
        let mut buf = [0u8; 8];
        for _ in 0..len {
            r.read_exact_at(&mut buf, "tensor payload")?;
            data.push(f64::from_le_bytes(buf));
        }
        entries.push((
            name,
            Tensor::from_vec(&shape, data).map_err(|e| NnError::Parse {
                offset: r.offset,
                msg: e.to_string(),
            })?,
        ));
    }
    let mut extra = [0u8; 1];
    if r.inner.read(&mut extra).map_err(NnError::Io)? != 0 {
        return Err(NnError::Parse {
            offset: r.offset,
            msg: "trailing bytes after last entry".into(),
        });
    }
    Ok((meta, entries))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.sgnn");
        let a = Tensor::from_vec(&[2, 3], vec![1.5, -2.25, 0.1, f64::MIN_POSITIVE, 1e300, -0.0])
            .unwrap();
        let b = Tensor::from_vec(&[4], vec![0.0, 1.0, -1.0, 3.94]).unwrap();
        save_checkpoint(
            &path,
            "kind=test seed=7",
            &[("layer.w".into(), &a), ("layer.b".into(), &b)],
        )
        .unwrap();
        let (meta, entries) = load_checkpoint(&path).unwrap();
        assert_eq!(meta, "kind=test seed=7");
        assert_eq!(entries.len(), 2);
        assert_eq!(entries[0].0, "layer.w");
        for (x, y) in entries[0].1.data().iter().zip(a.data()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
        assert_eq!(entries[1].1.shape(), &[4]);
    }

    #[test]
    fn truncated_file_is_parse_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.sgnn");
        let t = Tensor::from_vec(&[8], vec![1.0; 8]).unwrap();
        save_checkpoint(&path, "m", &[("w".into(), &t)]).unwrap();
        let full = std::fs::read(&path).unwrap();
        std::fs::write(&path, &full[..full.len() - 5]).unwrap();
        match load_checkpoint(&path) {
            Err(NnError::Parse { offset, .. }) => assert!(offset > 0),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn version_mismatch_is_detected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.sgnn");
        let t = Tensor::from_vec(&[1], vec![2.0]).unwrap();
        save_checkpoint(&path, "", &[("w".into(), &t)]).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[4] = 99;
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(
            load_checkpoint(&path),
            Err(NnError::Version { found: 99, .. })
        ));
    }

    #[test]
    fn bad_magic_is_parse_error_at_offset_zero() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.sgnn");
        std::fs::write(&path, b"NOPEnope").unwrap();
        assert!(matches!(
            load_checkpoint(&path),
            Err(NnError::Parse { offset: 0, .. })
        ));
    }
}
