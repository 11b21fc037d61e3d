//! Prostate dataset ingestion: delimiter-detected text with named columns,
//! a response column `lpsa`, and a `train` indicator splitting the rows.

use std::path::Path;

use hessbar::{Error, Matrix, Vector};

use crate::Failure;

/// Raw predictors and responses split by the dataset's train indicator.
pub(crate) struct Dataset {
    pub predictor_names: Vec<String>,
    pub train_x: Matrix,
    pub train_y: Vector,
    pub test_x: Matrix,
    pub test_y: Vector,
}

impl Dataset {
    pub(crate) fn predictors(&self) -> usize {
        self.predictor_names.len()
    }
}

fn parse_field(raw: &str, line: usize, column: &str) -> Result<f64, Failure> {
    raw.parse::<f64>().map_err(|e| {
        Failure::from(Error::Parse {
            line,
            message: format!("column {column}: {e} (got {raw:?})"),
        })
    })
}

fn parse_flag(raw: &str, line: usize) -> Result<bool, Failure> {
    match raw {
        "T" | "t" | "TRUE" | "true" | "1" => Ok(true),
        "F" | "f" | "FALSE" | "false" | "0" => Ok(false),
        other => Err(Failure::from(Error::Parse {
            line,
            message: format!("train flag must be T/F, got {other:?}"),
        })),
    }
}

/// Loads a prostate-style dataset. The delimiter is detected from the header
/// line (tab if present, comma otherwise); unnamed columns such as a leading
/// row index are ignored.
pub(crate) fn load_prostate(path: &Path) -> Result<Dataset, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::io(anyhow::anyhow!("{}: {e}", path.display())))?;
    let delimiter = if text.lines().next().is_some_and(|l| l.contains('\t')) {
        b'\t'
    } else {
        b','
    };

    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let headers = reader.headers()?.clone();
    let mut response_col = None;
    let mut train_col = None;
    let mut predictors: Vec<(usize, String)> = Vec::new();
    for (i, name) in headers.iter().enumerate() {
        match name {
            "" => {}
            "lpsa" => response_col = Some(i),
            "train" => train_col = Some(i),
            other => predictors.push((i, other.to_string())),
        }
    }
    let missing = |what: &str| {
        Failure::from(Error::Parse {
            line: 1,
            message: format!("missing required column {what}"),
        })
    };
    let response_col = response_col.ok_or_else(|| missing("lpsa"))?;
    let train_col = train_col.ok_or_else(|| missing("train"))?;
    if predictors.is_empty() {
        return Err(missing("at least one predictor"));
    }

    let mut train_rows: Vec<Vec<f64>> = Vec::new();
    let mut train_y = Vec::new();
    let mut test_rows: Vec<Vec<f64>> = Vec::new();
    let mut test_y = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let mut row = Vec::with_capacity(predictors.len());
        for (col, name) in &predictors {
            row.push(parse_field(&record[*col], line, name)?);
        }
        let y = parse_field(&record[response_col], line, "lpsa")?;
        if parse_flag(&record[train_col], line)? {
            train_rows.push(row);
            train_y.push(y);
        } else {
            test_rows.push(row);
            test_y.push(y);
        }
    }
    if train_rows.is_empty() || test_rows.is_empty() {
        return Err(Failure::from(Error::Parse {
            line: 0,
            message: format!(
                "need both train and test rows, got {} train / {} test",
                train_rows.len(),
                test_rows.len()
            ),
        }));
    }

    let width = predictors.len();
    let to_matrix =
        |rows: &[Vec<f64>]| Matrix::from_fn(rows.len(), width, |i, j| rows[i][j]);
    let train_x = to_matrix(&train_rows);
    let test_x = to_matrix(&test_rows);
    Ok(Dataset {
        predictor_names: predictors.into_iter().map(|(_, n)| n).collect(),
        train_x,
        train_y: Vector::from_vec(train_y),
        test_x,
        test_y: Vector::from_vec(test_y),
    })
}

/// Predictors standardized by training-split statistics, response centered
/// by the training mean.
pub(crate) struct Standardized {
    pub w_train: Matrix,
    pub y_train: Vector,
    pub w_test: Matrix,
    pub y_mean: f64,
}

pub(crate) fn standardize(ds: &Dataset) -> Result<Standardized, Failure> {
    let n_train = ds.train_x.nrows() as f64;
    let d = ds.predictors();
    let mut mean = Vector::zeros(d);
    let mut sd = Vector::zeros(d);
    for j in 0..d {
        let col = ds.train_x.column(j);
        let m = col.sum() / n_train;
        let var = col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n_train;
        if var <= 0.0 {
            return Err(Failure::check(anyhow::anyhow!(
                "predictor {} is constant on the training split",
                ds.predictor_names[j]
            )));
        }
        mean[j] = m;
        sd[j] = var.sqrt();
    }
    let scale = |x: &Matrix| Matrix::from_fn(x.nrows(), d, |i, j| (x[(i, j)] - mean[j]) / sd[j]);
    let y_mean = ds.train_y.sum() / n_train;
    Ok(Standardized {
        w_train: scale(&ds.train_x),
        y_train: ds.train_y.map(|v| v - y_mean),
        w_test: scale(&ds.test_x),
        y_mean,
    })
}
