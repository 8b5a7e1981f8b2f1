use std::io::Read;
use std::ops::Range;
use std::path::Path;

use rand::seq::SliceRandom;

use super::schema::{ColumnSchema, Kind, Role, Schema};
use crate::nn::Matrix;
use crate::rng::{stream, Stream};
use crate::{Error, Result};

/// How a sensitive attribute is grouped by the fairness metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttrKind {
    /// Integer codes `0..levels`.
    Discrete { levels: usize },
    /// Values in `[0, 1]`, grouped by quantile thresholds.
    Continuous,
}

impl AttrKind {
    pub fn is_discrete(self) -> bool {
        matches!(self, AttrKind::Discrete { .. })
    }
}

/// One sensitive attribute: its columns in `A` and its per-row code.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitiveAttr {
    pub name: String,
    pub kind: AttrKind,
    /// Columns of the encoded `A` matrix occupied by this attribute.
    pub columns: Range<usize>,
    /// Category index (discrete) or scaled value (continuous), one per row.
    pub codes: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutcomeKind {
    Binary,
    Continuous,
}

/// Per-column z-scoring of features; one-hot columns pass through.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureScaler {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub scaled: Vec<bool>,
}

impl FeatureScaler {
    /// Fit on the given rows of `raw`.
    pub fn fit(raw: &Matrix, rows: &[usize], scaled: Vec<bool>) -> Self {
        let p = raw.cols();
        let n = rows.len().max(1) as f64;
        let mut mean = vec![0.0; p];
        let mut std = vec![1.0; p];
        for c in 0..p {
            if !scaled[c] {
                mean[c] = 0.0;
                continue;
            }
            let m = rows.iter().map(|&r| raw.get(r, c)).sum::<f64>() / n;
            let v = rows.iter().map(|&r| (raw.get(r, c) - m).powi(2)).sum::<f64>() / n;
            mean[c] = m;
            std[c] = if v > 0.0 { v.sqrt() } else { 1.0 };
        }
        Self { mean, std, scaled }
    }

    pub fn transform(&self, raw: &Matrix) -> Matrix {
        let mut out = raw.clone();
        for r in 0..out.rows() {
            for (c, v) in out.row_mut(r).iter_mut().enumerate() {
                *v = (*v - self.mean[c]) / self.std[c];
            }
        }
        out
    }

    pub fn inverse(&self, standardized: &Matrix) -> Matrix {
        let mut out = standardized.clone();
        for r in 0..out.rows() {
            for (c, v) in out.row_mut(r).iter_mut().enumerate() {
                *v = *v * self.std[c] + self.mean[c];
            }
        }
        out
    }
}

/// Immutable `(X, A, Y)` table ready for training.
#[derive(Debug, Clone)]
pub struct TabularDataset {
    feature_names: Vec<String>,
    x_raw: Matrix,
    x: Matrix,
    scaler: FeatureScaler,
    a: Matrix,
    attrs: Vec<SensitiveAttr>,
    y: Vec<f64>,
    outcome_name: String,
    outcome: OutcomeKind,
}

/// A sensitive column supplied directly as codes/values.
#[derive(Debug, Clone)]
pub struct SensitiveColumn {
    pub name: String,
    pub kind: AttrKind,
    pub values: Vec<f64>,
}

impl TabularDataset {
    /// Builds a dataset from in-memory arrays.
    ///
    /// Every feature column is z-scored. Continuous sensitive values must lie
    /// in `[0, 1]`; discrete ones must be integer codes below `levels`.
    pub fn from_arrays(
        x_raw: Matrix,
        sensitive: Vec<SensitiveColumn>,
        y: Vec<f64>,
        outcome: OutcomeKind,
    ) -> Result<Self> {
        let n = x_raw.rows();
        if y.len() != n {
            return Err(Error::dim("TabularDataset outcome length", n, y.len()));
        }
        if sensitive.is_empty() {
            return Err(Error::Schema("at least one sensitive column is required".into()));
        }
        match outcome {
            OutcomeKind::Binary if y.iter().any(|&v| v != 0.0 && v != 1.0) => {
                return Err(Error::Validation("binary outcome must be 0/1".into()))
            }
            OutcomeKind::Continuous if y.iter().any(|&v| !(0.0..=1.0).contains(&v)) => {
                return Err(Error::Validation("continuous outcome must lie in [0, 1]".into()))
            }
            _ => {}
        }
        let mut a_cols: Vec<Vec<f64>> = Vec::new();
        let mut attrs = Vec::new();
        for col in sensitive {
            if col.values.len() != n {
                return Err(Error::dim("sensitive column length", n, col.values.len()));
            }
            let start = a_cols.len();
            match col.kind {
                AttrKind::Continuous => {
                    if col.values.iter().any(|v| !(0.0..=1.0).contains(v)) {
                        return Err(Error::Validation(format!(
                            "continuous sensitive column '{}' must lie in [0, 1]",
                            col.name
                        )));
                    }
                    a_cols.push(col.values.clone());
                }
                AttrKind::Discrete { levels } => {
                    if col.values.iter().any(|&v| v < 0.0 || v.fract() != 0.0 || v as usize >= levels) {
                        return Err(Error::Validation(format!(
                            "discrete sensitive column '{}' must hold codes below {levels}",
                            col.name
                        )));
                    }
                    a_cols.extend(encode_discrete(&col.values, levels));
                }
            }
            attrs.push(SensitiveAttr {
                name: col.name,
                kind: col.kind,
                columns: start..a_cols.len(),
                codes: col.values,
            });
        }
        let a = columns_to_matrix(n, &a_cols);
        let p = x_raw.cols();
        let all: Vec<usize> = (0..n).collect();
        let scaler = FeatureScaler::fit(&x_raw, &all, vec![true; p]);
        let x = scaler.transform(&x_raw);
        Ok(Self {
            feature_names: (0..p).map(|i| format!("x{i}")).collect(),
            x_raw,
            x,
            scaler,
            a,
            attrs,
            y,
            outcome_name: "y".into(),
            outcome,
        })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    /// Number of standardized feature columns.
    pub fn p(&self) -> usize {
        self.x.cols()
    }

    /// Number of encoded sensitive columns.
    pub fn l(&self) -> usize {
        self.a.cols()
    }

    pub fn x(&self) -> &Matrix {
        &self.x
    }

    pub fn x_raw(&self) -> &Matrix {
        &self.x_raw
    }

    pub fn scaler(&self) -> &FeatureScaler {
        &self.scaler
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn attrs(&self) -> &[SensitiveAttr] {
        &self.attrs
    }

    pub fn outcome(&self) -> OutcomeKind {
        self.outcome
    }

    pub fn outcome_name(&self) -> &str {
        &self.outcome_name
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// True when every sensitive attribute and the outcome are discrete.
    pub fn all_discrete(&self) -> bool {
        self.outcome == OutcomeKind::Binary && self.attrs.iter().all(|a| a.kind.is_discrete())
    }

    /// Rows `indices`, keeping the current feature standardization.
    pub fn subset(&self, indices: &[usize]) -> TabularDataset {
        TabularDataset {
            feature_names: self.feature_names.clone(),
            x_raw: self.x_raw.select_rows(indices),
            x: self.x.select_rows(indices),
            scaler: self.scaler.clone(),
            a: self.a.select_rows(indices),
            attrs: self
                .attrs
                .iter()
                .map(|at| SensitiveAttr { codes: indices.iter().map(|&i| at.codes[i]).collect(), ..at.clone() })
                .collect(),
            y: indices.iter().map(|&i| self.y[i]).collect(),
            outcome_name: self.outcome_name.clone(),
            outcome: self.outcome,
        }
    }

    /// Replaces the feature standardization.
    pub fn with_scaler(mut self, scaler: FeatureScaler) -> TabularDataset {
        self.x = scaler.transform(&self.x_raw);
        self.scaler = scaler;
        self
    }
}

fn encode_discrete(codes: &[f64], levels: usize) -> Vec<Vec<f64>> {
    if levels <= 2 {
        vec![codes.to_vec()]
    } else {
        (0..levels).map(|k| codes.iter().map(|&c| if c as usize == k { 1.0 } else { 0.0 }).collect()).collect()
    }
}

fn columns_to_matrix(n: usize, cols: &[Vec<f64>]) -> Matrix {
    let mut m = Matrix::zeros(n, cols.len());
    for (c, col) in cols.iter().enumerate() {
        for (r, &v) in col.iter().enumerate() {
            m.set(r, c, v);
        }
    }
    m
}

/// Shuffles rows with the seeded split stream and cuts at
/// `floor(train_fraction * n)`. Feature standardization is refit on the
/// training part and applied to both parts.
pub fn split_train_val(
    dataset: &TabularDataset,
    train_fraction: f64,
    seed: u64,
) -> Result<(TabularDataset, TabularDataset)> {
    let n = dataset.n();
    if n < 2 {
        return Err(Error::Size(format!("cannot split {n} rows")));
    }
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::Config(format!("train fraction must be in (0, 1), got {train_fraction}")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut stream(seed, Stream::Split));
    let n_train = ((train_fraction * n as f64).floor() as usize).clamp(1, n - 1);
    let (train_idx, val_idx) = order.split_at(n_train);
    let scaler = FeatureScaler::fit(dataset.x_raw(), train_idx, dataset.scaler.scaled.clone());
    let train = dataset.subset(train_idx).with_scaler(scaler.clone());
    let val = dataset.subset(val_idx).with_scaler(scaler);
    Ok((train, val))
}

/// Reads a CSV file under `schema`.
pub fn load_csv(path: &Path, schema: &Schema) -> Result<TabularDataset> {
    let file = std::fs::File::open(path)?;
    load_csv_reader(file, schema)
}

enum Cell {
    Number(f64),
    Code(usize),
}

fn parse_cell(raw: &str, col: &ColumnSchema, row: usize) -> Result<Cell> {
    let err = |message: String| Error::Ingest { row, column: col.name.clone(), message };
    let raw = raw.trim();
    if raw.is_empty() {
        return Err(err("missing value".into()));
    }
    if let Some(cats) = &col.categories {
        return cats
            .iter()
            .position(|c| c == raw)
            .map(Cell::Code)
            .ok_or_else(|| err(format!("unknown category {raw:?}")));
    }
    let v: f64 = raw.parse().map_err(|_| err(format!("cannot parse {raw:?} as a number")))?;
    if !v.is_finite() {
        return Err(err(format!("non-finite value {raw:?}")));
    }
    match col.kind {
        Kind::Continuous => Ok(Cell::Number(v)),
        Kind::Binary if v == 0.0 || v == 1.0 => Ok(Cell::Code(v as usize)),
        Kind::Binary => Err(err(format!("binary value must be 0 or 1, got {raw:?}"))),
        Kind::Categorical => Err(err("categorical column without declared categories".into())),
    }
}

/// Like [`load_csv`] but from any reader.
pub fn load_csv_reader<R: Read>(reader: R, schema: &Schema) -> Result<TabularDataset> {
    schema.validate()?;
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header = rdr.headers()?.clone();
    let position: Vec<usize> = schema
        .columns
        .iter()
        .map(|c| {
            header
                .iter()
                .position(|h| h.trim() == c.name)
                .ok_or_else(|| Error::Schema(format!("column '{}' not found in CSV header", c.name)))
        })
        .collect::<Result<_>>()?;

    let mut cells: Vec<Vec<Cell>> = schema.columns.iter().map(|_| Vec::new()).collect();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let row = i + 1;
        for (k, col) in schema.columns.iter().enumerate() {
            let raw = record.get(position[k]).ok_or_else(|| Error::Ingest {
                row,
                column: col.name.clone(),
                message: "row is too short".into(),
            })?;
            cells[k].push(parse_cell(raw, col, row)?);
        }
    }
    let n = cells.first().map_or(0, Vec::len);
    if n == 0 {
        return Err(Error::Size("CSV contains no data rows".into()));
    }

    let number = |c: &Cell| match *c {
        Cell::Number(v) => v,
        Cell::Code(k) => k as f64,
    };
    let levels_of = |col: &ColumnSchema| -> usize {
        match (&col.categories, col.kind) {
            (Some(cats), _) => cats.len(),
            (None, _) => 2,
        }
    };

    // Features: continuous/binary columns are z-scored, categorical are one-hot.
    let mut feature_cols: Vec<Vec<f64>> = Vec::new();
    let mut feature_names = Vec::new();
    let mut scaled = Vec::new();
    // Sensitive attributes.
    let mut sensitive = Vec::new();
    let mut y = Vec::new();
    let mut outcome = OutcomeKind::Binary;
    let mut outcome_name = String::new();

    for (k, col) in schema.columns.iter().enumerate() {
        let values: Vec<f64> = cells[k].iter().map(number).collect();
        match col.role {
            Role::Feature => match col.kind {
                Kind::Categorical => {
                    let cats = col.categories.as_ref().expect("parse_cell enforces categories");
                    for (j, cat) in cats.iter().enumerate() {
                        feature_cols.push(values.iter().map(|&v| if v as usize == j { 1.0 } else { 0.0 }).collect());
                        feature_names.push(format!("{}={}", col.name, cat));
                        scaled.push(false);
                    }
                }
                _ => {
                    feature_cols.push(values);
                    feature_names.push(col.name.clone());
                    scaled.push(true);
                }
            },
            Role::Sensitive => {
                let (kind, values) = match col.kind {
                    Kind::Continuous => (AttrKind::Continuous, min_max(&values)),
                    _ => (AttrKind::Discrete { levels: levels_of(col) }, values),
                };
                sensitive.push(SensitiveColumn { name: col.name.clone(), kind, values });
            }
            Role::Outcome => {
                outcome_name = col.name.clone();
                if col.kind == Kind::Continuous {
                    outcome = OutcomeKind::Continuous;
                    y = min_max(&values);
                } else {
                    y = values;
                }
            }
        }
    }

    let x_raw = columns_to_matrix(n, &feature_cols);
    let mut ds = TabularDataset::from_arrays(x_raw, sensitive, y, outcome)?;
    let all: Vec<usize> = (0..n).collect();
    let scaler = FeatureScaler::fit(&ds.x_raw, &all, scaled);
    ds = ds.with_scaler(scaler);
    ds.feature_names = feature_names;
    ds.outcome_name = outcome_name;
    Ok(ds)
}

fn min_max(values: &[f64]) -> Vec<f64> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi > lo {
        values.iter().map(|v| (v - lo) / (hi - lo)).collect()
    } else {
        vec![0.0; values.len()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schema() -> Schema {
        Schema::new(vec![
            ColumnSchema::new("x", Role::Feature, Kind::Continuous),
            ColumnSchema::new("a", Role::Sensitive, Kind::Binary),
            ColumnSchema::new("y", Role::Outcome, Kind::Binary),
        ])
        .unwrap()
    }

    #[test]
    fn smallest_valid_input() {
        let csv = "x,a,y\n1.5,0,1\n-0.5,1,0\n";
        let ds = load_csv_reader(csv.as_bytes(), &schema()).unwrap();
        assert_eq!((ds.n(), ds.p(), ds.l()), (2, 1, 1));
        assert_eq!(ds.y(), &[1.0, 0.0]);
        assert_eq!(ds.a().as_slice(), &[0.0, 1.0]);
        assert_eq!(ds.x().as_slice(), &[1.0, -1.0]);
    }

    #[test]
    fn categorical_sensitive_encoded_in_declared_order() {
        let schema = Schema::new(vec![
            ColumnSchema::new("x", Role::Feature, Kind::Continuous),
            ColumnSchema::new("sex", Role::Sensitive, Kind::Categorical).with_categories(["M", "F"]),
            ColumnSchema::new("y", Role::Outcome, Kind::Binary),
        ])
        .unwrap();
        let csv = "y,sex,x\n1,F,0.1\n0,M,0.2\n1,F,0.3\n";
        let ds = load_csv_reader(csv.as_bytes(), &schema).unwrap();
        assert_eq!(ds.a().as_slice(), &[1.0, 0.0, 1.0]);
        assert_eq!(ds.attrs()[0].kind, AttrKind::Discrete { levels: 2 });
    }

    #[test]
    fn multi_level_categories_are_one_hot() {
        let schema = Schema::new(vec![
            ColumnSchema::new("c", Role::Feature, Kind::Categorical).with_categories(["a", "b", "c"]),
            ColumnSchema::new("race", Role::Sensitive, Kind::Categorical).with_categories(["p", "q", "r"]),
            ColumnSchema::new("y", Role::Outcome, Kind::Binary),
        ])
        .unwrap();
        let csv = "c,race,y\nb,r,1\na,p,0\n";
        let ds = load_csv_reader(csv.as_bytes(), &schema).unwrap();
        assert_eq!(ds.x().as_slice(), &[0.0, 1.0, 0.0, 1.0, 0.0, 0.0]);
        assert_eq!(ds.a().as_slice(), &[0.0, 0.0, 1.0, 1.0, 0.0, 0.0]);
        assert_eq!(ds.attrs()[0].codes, vec![2.0, 0.0]);
        assert_eq!(ds.feature_names()[1], "c=b");
    }

    #[test]
    fn continuous_sensitive_and_outcome_min_max_scaled() {
        let schema = Schema::new(vec![
            ColumnSchema::new("x", Role::Feature, Kind::Continuous),
            ColumnSchema::new("age", Role::Sensitive, Kind::Continuous),
            ColumnSchema::new("y", Role::Outcome, Kind::Continuous),
        ])
        .unwrap();
        let csv = "x,age,y\n0,20,5\n1,40,15\n2,30,10\n";
        let ds = load_csv_reader(csv.as_bytes(), &schema).unwrap();
        assert_eq!(ds.a().as_slice(), &[0.0, 1.0, 0.5]);
        assert_eq!(ds.y(), &[0.0, 1.0, 0.5]);
        assert_eq!(ds.outcome(), OutcomeKind::Continuous);
    }

    #[test]
    fn non_numeric_cell_names_row_and_column() {
        let csv = "x,a,y\n1.0,0,1\nabc,1,0\n";
        let err = load_csv_reader(csv.as_bytes(), &schema()).unwrap_err();
        match err {
            Error::Ingest { row, column, .. } => {
                assert_eq!(row, 2);
                assert_eq!(column, "x");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_column_unknown_category_and_missing_value() {
        let err = load_csv_reader("x,y\n1,0\n".as_bytes(), &schema()).unwrap_err();
        assert!(err.to_string().contains("'a'"));
        let err = load_csv_reader("x,a,y\n1,,0\n".as_bytes(), &schema()).unwrap_err();
        assert!(err.to_string().contains("missing value"));
        let cat = Schema::new(vec![
            ColumnSchema::new("a", Role::Sensitive, Kind::Categorical).with_categories(["M", "F"]),
            ColumnSchema::new("y", Role::Outcome, Kind::Binary),
        ])
        .unwrap();
        let err = load_csv_reader("a,y\nX,0\n".as_bytes(), &cat).unwrap_err();
        assert!(err.to_string().contains("unknown category"));
    }

    #[test]
    fn split_sizes_follow_floor_rule() {
        let ds = toy(10);
        let (tr, va) = split_train_val(&ds, 0.8, 1).unwrap();
        assert_eq!((tr.n(), va.n()), (8, 2));
        let (tr, va) = split_train_val(&toy(9), 0.8, 1).unwrap();
        assert_eq!((tr.n(), va.n()), (7, 2));
        assert!(split_train_val(&toy(1), 0.8, 1).is_err());
    }

    fn toy(n: usize) -> TabularDataset {
        let x = Matrix::from_vec(n, 1, (0..n).map(|i| i as f64).collect()).unwrap();
        TabularDataset::from_arrays(
            x,
            vec![SensitiveColumn {
                name: "a".into(),
                kind: AttrKind::Discrete { levels: 2 },
                values: (0..n).map(|i| (i % 2) as f64).collect(),
            }],
            (0..n).map(|i| ((i / 2) % 2) as f64).collect(),
            OutcomeKind::Binary,
        )
        .unwrap()
    }

    #[test]
    fn split_is_deterministic_disjoint_and_exhaustive() {
        let ds = toy(25);
        let (a1, b1) = split_train_val(&ds, 0.8, 9).unwrap();
        let (a2, b2) = split_train_val(&ds, 0.8, 9).unwrap();
        assert_eq!(a1.x_raw(), a2.x_raw());
        assert_eq!(b1.x_raw(), b2.x_raw());
        let mut all: Vec<f64> = a1.x_raw().as_slice().iter().chain(b1.x_raw().as_slice()).copied().collect();
        all.sort_by(f64::total_cmp);
        assert_eq!(all, (0..25).map(|i| i as f64).collect::<Vec<_>>());
    }

    #[test]
    fn standardization_round_trip_and_train_statistics() {
        let ds = toy(20);
        let (tr, va) = split_train_val(&ds, 0.8, 3).unwrap();
        let col = tr.x().col_vec(0);
        let mean = col.iter().sum::<f64>() / col.len() as f64;
        assert!(mean.abs() < 1e-12);
        for part in [&tr, &va] {
            let back = part.scaler().inverse(part.x());
            for (b, r) in back.as_slice().iter().zip(part.x_raw().as_slice()) {
                assert!((b - r).abs() < 1e-10);
            }
        }
        assert_eq!(tr.scaler(), va.scaler());
    }
}
