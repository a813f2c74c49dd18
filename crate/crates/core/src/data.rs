//! Dataset loading: LibSVM sparse text, whitespace-delimited numeric
//! matrices, and the seeded random projection used to compress wide designs.

use ndarray::{Array1, Array2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("io error reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Shape(String),
}

/// Parse LibSVM sparse format: `label idx:value ...` with 1-based indices.
/// Labels are mapped to {0, 1} (anything <= 0 becomes 0). The feature count
/// is the largest index seen.
pub fn load_libsvm(path: &Path) -> Result<(Array2<f64>, Array1<f64>), DataError> {
    let file = File::open(path).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let reader = BufReader::new(file);

    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut labels: Vec<f64> = Vec::new();
    let mut max_index = 0usize;

    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| DataError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let label: f64 = parts
            .next()
            .unwrap()
            .parse()
            .map_err(|e| DataError::Parse { line: lineno + 1, msg: format!("label: {}", e) })?;
        let mut row = Vec::new();
        for tok in parts {
            let (idx, val) = tok.split_once(':').ok_or_else(|| DataError::Parse {
                line: lineno + 1,
                msg: format!("expected index:value, got {:?}", tok),
            })?;
            let idx: usize = idx.parse().map_err(|e| DataError::Parse {
                line: lineno + 1,
                msg: format!("index: {}", e),
            })?;
            if idx == 0 {
                return Err(DataError::Parse {
                    line: lineno + 1,
                    msg: "indices are 1-based; found 0".into(),
                });
            }
            let val: f64 = val.parse().map_err(|e| DataError::Parse {
                line: lineno + 1,
                msg: format!("value: {}", e),
            })?;
            max_index = max_index.max(idx);
            row.push((idx - 1, val));
        }
        labels.push(if label > 0.0 { 1.0 } else { 0.0 });
        rows.push(row);
    }

    let mut x = Array2::<f64>::zeros((rows.len(), max_index));
    for (r, row) in rows.iter().enumerate() {
        for &(c, v) in row {
            x[[r, c]] = v;
        }
    }
    Ok((x, Array1::from(labels)))
}

/// Project columns down to k dimensions with an iid Normal(0, 1/k) matrix
/// drawn from the seed, preserving expected squared norms.
pub fn random_project(x: &Array2<f64>, k: usize, seed: u64) -> Result<Array2<f64>, DataError> {
    let d = x.ncols();
    if k == 0 || k > d {
        return Err(DataError::Shape(format!(
            "projection dimension {} out of range for {} features",
            k, d
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 1.0 / (k as f64).sqrt();
    let proj = Array2::from_shape_fn((d, k), |_| scale * rng.sample::<f64, _>(StandardNormal));
    Ok(x.dot(&proj))
}

/// Append a constant-one column (intercept feature).
pub fn append_bias_column(x: &Array2<f64>) -> Array2<f64> {
    let (n, d) = x.dim();
    let mut out = Array2::<f64>::ones((n, d + 1));
    out.slice_mut(ndarray::s![.., ..d]).assign(x);
    out
}

/// Whitespace-delimited numeric matrix, one observation per row. All rows
/// must have the same number of columns.
pub fn load_matrix(path: &Path) -> Result<Array2<f64>, DataError> {
    let file = File::open(path).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let reader = BufReader::new(file);
    let mut data: Vec<f64> = Vec::new();
    let mut ncols: Option<usize> = None;
    let mut nrows = 0usize;
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| DataError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let vals: Result<Vec<f64>, _> = line.split_whitespace().map(str::parse).collect();
        let vals = vals.map_err(|e| DataError::Parse {
            line: lineno + 1,
            msg: format!("{}", e),
        })?;
        match ncols {
            None => ncols = Some(vals.len()),
            Some(c) if c != vals.len() => {
                return Err(DataError::Parse {
                    line: lineno + 1,
                    msg: format!("expected {} columns, got {}", c, vals.len()),
                })
            }
            _ => {}
        }
        data.extend(vals);
        nrows += 1;
    }
    let ncols = ncols.ok_or_else(|| DataError::Shape("empty matrix file".into()))?;
    Array2::from_shape_vec((nrows, ncols), data)
        .map_err(|e| DataError::Shape(e.to_string()))
}
