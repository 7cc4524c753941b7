//! External recording ingestion: CSV signal files (12 numeric columns, 200
//! rows per episode, header auto-detected) plus a sidecar label file mapping
//! object names to stiffness values.

use std::collections::BTreeMap;
use std::path::Path;

use crate::sim::{Episode, Provenance, Shape, EPISODE_CHANNELS, EPISODE_STEPS};

use super::{DataError, Dataset};

fn csv_err(file: &Path, row: usize, column: usize, msg: impl Into<String>) -> DataError {
    DataError::Csv {
        file: file.display().to_string(),
        row,
        column,
        msg: msg.into(),
    }
}

/// Parses `<name>,<stiffness>` lines; blank lines and `#` comments ignored.
pub fn parse_label_file(path: &Path) -> Result<BTreeMap<String, f64>, DataError> {
    let text = std::fs::read_to_string(path)?;
    let mut labels = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (name, value) = line.rsplit_once(',').ok_or_else(|| {
            csv_err(path, lineno + 1, 1, "expected '<name>,<stiffness>'")
        })?;
        let stiffness: f64 = value.trim().parse().map_err(|e| {
            csv_err(path, lineno + 1, 2, format!("bad stiffness '{}': {e}", value.trim()))
        })?;
        labels.insert(name.trim().to_string(), stiffness);
    }
    Ok(labels)
}

/// Imports one CSV file holding one or more concatenated 200 x 12 episodes,
/// all labeled `stiffness`. Episodes get `ExternalReal` provenance and, by
/// convention, the `Box` shape tag (external objects carry no shape info).
pub fn import_episode_csv(path: &Path, stiffness: f64) -> Result<Vec<Episode>, DataError> {
    let text = std::fs::read_to_string(path)?;
    let mut values: Vec<f64> = Vec::new();
    let mut data_rows = 0usize;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: Result<Vec<f64>, (usize, String)> = cells
            .iter()
            .enumerate()
            .map(|(ci, cell)| {
                cell.parse::<f64>().map_err(|e| (ci + 1, format!("non-numeric cell '{cell}': {e}")))
            })
            .collect();
        match parsed {
            Err((column, msg)) => {
                // A non-numeric first row is an optional header.
                if data_rows == 0 && values.is_empty() && lineno == 0 {
                    continue;
                }
                return Err(csv_err(path, lineno + 1, column, msg));
            }
            Ok(row) => {
                if row.len() != EPISODE_CHANNELS {
                    return Err(csv_err(
                        path,
                        lineno + 1,
                        row.len(),
                        format!("expected {EPISODE_CHANNELS} columns, got {}", row.len()),
                    ));
                }
                values.extend(row);
                data_rows += 1;
            }
        }
    }
    if data_rows == 0 || data_rows % EPISODE_STEPS != 0 {
        return Err(csv_err(
            path,
            data_rows,
            0,
            format!("row count {data_rows} is not a positive multiple of {EPISODE_STEPS}"),
        ));
    }
    let per_episode = EPISODE_STEPS * EPISODE_CHANNELS;
    values
        .chunks_exact(per_episode)
        .enumerate()
        .map(|(i, chunk)| {
            Episode::from_parts(
                chunk.to_vec(),
                stiffness,
                Shape::Box,
                Provenance::ExternalReal,
                i as u64,
            )
            .map_err(|e| csv_err(path, (i + 1) * EPISODE_STEPS, 0, e.to_string()))
        })
        .collect()
}

/// Imports every `*.csv` under `dir` (sorted by name), labeling each file by
/// its stem via the sidecar label table. Unlabeled files abort the import
/// and are listed in the error.
pub fn import_external_dataset(dir: &Path, labels_path: &Path) -> Result<Dataset, DataError> {
    let labels = parse_label_file(labels_path)?;
    let mut files: Vec<_> = std::fs::read_dir(dir)?
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(DataError::Config(format!("no .csv files under {}", dir.display())));
    }
    let unlabeled: Vec<String> = files
        .iter()
        .filter_map(|p| {
            let stem = p.file_stem()?.to_string_lossy().to_string();
            (!labels.contains_key(&stem)).then_some(stem)
        })
        .collect();
    if !unlabeled.is_empty() {
        return Err(DataError::Config(format!(
            "no stiffness label for: {}",
            unlabeled.join(", ")
        )));
    }
    let mut episodes = Vec::new();
    for file in &files {
        let stem = file.file_stem().unwrap().to_string_lossy().to_string();
        episodes.extend(import_episode_csv(file, labels[&stem])?);
    }
    Ok(Dataset::new(episodes))
}
