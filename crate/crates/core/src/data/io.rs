//! SGDS binary dataset container.
//!
//! Layout (little-endian): magic "SGDS", format version u16, episode count
//! u32, then per episode: provenance u8, shape u8, stiffness f64, seed u64,
//! and 2400 f64 signal values row-major (time-major, channel-minor).

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::sim::{Episode, Provenance, Shape, EPISODE_VALUES};

use super::{DataError, Dataset};

pub const DATASET_MAGIC: [u8; 4] = *b"SGDS";
pub const DATASET_VERSION: u16 = 1;

pub fn save_dataset(ds: &Dataset, path: &Path) -> Result<(), DataError> {
    if ds.is_standardized() {
        return Err(DataError::State(
            "standardized datasets are not persisted; save raw signals and standardize on load".into(),
        ));
    }
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&DATASET_MAGIC)?;
    w.write_all(&DATASET_VERSION.to_le_bytes())?;
    w.write_all(&(ds.len() as u32).to_le_bytes())?;
    for ep in ds.episodes() {
        w.write_all(&[ep.provenance.code(), ep.shape.code()])?;
        w.write_all(&ep.stiffness_label.to_le_bytes())?;
        w.write_all(&ep.seed.to_le_bytes())?;
        for v in ep.signal() {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

struct Reader<R> {
    inner: R,
    offset: u64,
}

impl<R: Read> Reader<R> {
    fn take(&mut self, buf: &mut [u8], what: &str) -> Result<(), DataError> {
        let at = self.offset;
        self.inner.read_exact(buf).map_err(|e| DataError::Parse {
            offset: at,
            msg: format!("truncated while reading {what}: {e}"),
        })?;
        self.offset += buf.len() as u64;
        Ok(())
    }
}

pub fn load_dataset(path: &Path) -> Result<Dataset, DataError> {
    let mut r = Reader {
        inner: BufReader::new(File::open(path)?),
        offset: 0,
    };
    let mut magic = [0u8; 4];
    r.take(&mut magic, "magic")?;
    if magic != DATASET_MAGIC {
        return Err(DataError::Parse {
            offset: 0,
            msg: format!("bad magic {magic:?}, expected {DATASET_MAGIC:?}"),
        });
    }
    let mut v = [0u8; 2];
    r.take(&mut v, "version")?;
    let version = u16::from_le_bytes(v);
    if version != DATASET_VERSION {
        return Err(DataError::Version {
            found: version,
            expected: DATASET_VERSION,
        });
    }
    let mut c = [0u8; 4];
    r.take(&mut c, "episode count")?;
    let count = u32::from_le_bytes(c) as usize;

    let mut episodes = Vec::with_capacity(count);
    let mut b8 = [0u8; 8];
    for i in 0..count {
        let mut tags = [0u8; 2];
        r.take(&mut tags, "episode tags")?;
        let provenance = Provenance::from_code(tags[0]).ok_or_else(|| DataError::Parse {
            offset: r.offset - 2,
            msg: format!("episode {i}: unknown provenance code {}", tags[0]),
        })?;
        let shape = Shape::from_code(tags[1]).ok_or_else(|| DataError::Parse {
            offset: r.offset - 1,
            msg: format!("episode {i}: unknown shape code {}", tags[1]),
        })?;
        r.take(&mut b8, "stiffness")?;
        let stiffness = f64::from_le_bytes(b8);
        r.take(&mut b8, "seed")?;
        let seed = u64::from_le_bytes(b8);
        let mut signal = Vec::with_capacity(EPISODE_VALUES);
        for _ in 0..EPISODE_VALUES {
            r.take(&mut b8, "signal")?;
            signal.push(f64::from_le_bytes(b8));
        }
        let episode =
            Episode::from_parts(signal, stiffness, shape, provenance, seed).map_err(|e| {
                DataError::Parse {
                    offset: r.offset,
                    msg: format!("episode {i}: {e}"),
                }
            })?;
        episodes.push(episode);
    }
    let mut extra = [0u8; 1];
    if r.inner.read(&mut extra)? != 0 {
        return Err(DataError::Parse {
            offset: r.offset,
            msg: "trailing bytes after last episode".into(),
        });
    }
    Ok(Dataset::new(episodes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{simulate_episode, EpisodeConfig, GripperConfig, ObjectSpec};

    fn small_dataset() -> Dataset {
        let gripper = GripperConfig::default();
        let cfg = EpisodeConfig::default();
        let eps = [400.0, 900.0]
            .iter()
            .map(|&k| simulate_episode(&gripper, &ObjectSpec::reference(Shape::Ball, k), &cfg).unwrap())
            .collect();
        Dataset::new(eps)
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ds.sgds");
        let ds = small_dataset();
        save_dataset(&ds, &path).unwrap();
        let loaded = load_dataset(&path).unwrap();
        assert_eq!(loaded.len(), ds.len());
        for (a, b) in loaded.episodes().iter().zip(ds.episodes()) {
            assert_eq!(a.stiffness_label.to_bits(), b.stiffness_label.to_bits());
            assert_eq!(a.seed, b.seed);
            assert_eq!(a.shape, b.shape);
            assert_eq!(a.provenance, b.provenance);
            for (x, y) in a.signal().iter().zip(b.signal()) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
        assert_eq!(loaded.content_fingerprint(), ds.content_fingerprint());
    }

    #[test]
    fn empty_dataset_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.sgds");
        save_dataset(&Dataset::new(vec![]), &path).unwrap();
        let loaded = load_dataset(&path).unwrap();
        assert!(loaded.is_empty());
    }

    #[test]
    fn truncated_file_is_parse_error_with_offset() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ds.sgds");
        save_dataset(&small_dataset(), &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() / 2]).unwrap();
        match load_dataset(&path) {
            Err(DataError::Parse { offset, .. }) => assert!(offset > 0),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn version_mismatch_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ds.sgds");
        save_dataset(&Dataset::new(vec![]), &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[4] = 7;
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(
            load_dataset(&path),
            Err(DataError::Version { found: 7, .. })
        ));
    }

    #[test]
    fn trailing_bytes_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ds.sgds");
        save_dataset(&Dataset::new(vec![]), &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes.push(0);
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(load_dataset(&path), Err(DataError::Parse { .. })));
    }

    #[test]
    fn standardized_dataset_refuses_to_save() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ds.sgds");
        let ds = small_dataset();
        let stats = ds.compute_stats().unwrap();
        let z = ds.standardized(&stats).unwrap();
        assert!(matches!(save_dataset(&z, &path), Err(DataError::State(_))));
    }
}
