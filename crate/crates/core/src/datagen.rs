//! Synthetic problem generators, CSV ingestion and export, and the random
//! splits used by the experiment protocols.
//!
//! Ground-truth labels of unlabeled objects never enter a [`Dataset`]; they
//! travel next to it and are only read by oracle fits and error evaluation.

use std::io::{Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::model::{with_intercept, Dataset};

/// Column name used for ground-truth labels in exported CSV files.
pub const TRUTH_COLUMN: &str = "true_label";
/// Attempts at drawing a split whose labeled part contains both classes.
pub const MAX_SPLIT_ATTEMPTS: u64 = 100;

/// Independent random stream `stream` of the generator seeded with `seed`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Stream index for a `(task, subtask)` pair.
pub fn stream_id(task: u64, subtask: u64) -> u64 {
    (task << 32) | (subtask & 0xffff_ffff)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyntheticKind {
    /// Two 1D Gaussian clusters at `-separation/2` and `+separation/2`.
    TwoCluster1D,
    /// Two 2D Gaussians separated along the first axis.
    TwoGaussian2D,
    /// The two-Gaussian construction in `dimension` dimensions.
    Custom { dimension: usize },
}

impl SyntheticKind {
    pub fn dimension(&self) -> usize {
        match self {
            SyntheticKind::TwoCluster1D => 1,
            SyntheticKind::TwoGaussian2D => 2,
            SyntheticKind::Custom { dimension } => *dimension,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub kind: SyntheticKind,
    pub labeled_per_class: usize,
    pub unlabeled_total: usize,
    pub class_separation: f64,
    pub noise_sd: f64,
    pub seed: u64,
    pub intercept: bool,
}

impl SyntheticSpec {
    /// 2 + 2 labeled and 396 unlabeled points from unit-variance clusters at -2 and 2.
    pub fn two_cluster_1d(seed: u64) -> Self {
        Self {
            kind: SyntheticKind::TwoCluster1D,
            labeled_per_class: 2,
            unlabeled_total: 396,
            class_separation: 4.0,
            noise_sd: 1.0,
            seed,
            intercept: true,
        }
    }

    pub fn two_gaussian_2d(seed: u64) -> Self {
        Self {
            kind: SyntheticKind::TwoGaussian2D,
            labeled_per_class: 5,
            unlabeled_total: 990,
            class_separation: 3.0,
            noise_sd: 1.0,
            seed,
            intercept: true,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.labeled_per_class == 0 {
            return Err(Error::InvalidInput(
                "labeled_per_class must be positive".into(),
            ));
        }
        if self.kind.dimension() == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        if !(self.class_separation.is_finite() && self.class_separation > 0.0) {
            return Err(Error::InvalidInput(
                "class_separation must be positive".into(),
            ));
        }
        if !(self.noise_sd.is_finite() && self.noise_sd > 0.0) {
            return Err(Error::InvalidInput("noise_sd must be positive".into()));
        }
        Ok(())
    }
}

/// A generated problem: the dataset plus the hidden classes of its
/// unlabeled objects.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticData {
    pub dataset: Dataset,
    pub unlabeled_truth: DVector<f64>,
}

impl SyntheticData {
    /// All objects with their true labels.
    pub fn into_pool(self) -> LabeledPool {
        pool_from(&self.dataset, &self.unlabeled_truth)
    }
}

fn pool_from(data: &Dataset, truth: &DVector<f64>) -> LabeledPool {
    let labels = data
        .extended_targets(truth)
        .expect("truth length matches the unlabeled block");
    LabeledPool {
        features: data.extended_features(),
        labels,
        intercept: data.has_intercept(),
    }
}

pub fn generate(spec: &SyntheticSpec) -> Result<SyntheticData> {
    spec.validate()?;
    let dim = spec.kind.dimension();
    let noise = Normal::new(0.0, spec.noise_sd).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let half = spec.class_separation / 2.0;
    let draw = |class: f64, rng: &mut ChaCha8Rng| -> Vec<f64> {
        let centre = if class == 1.0 { half } else { -half };
        (0..dim)
            .map(|j| if j == 0 { centre } else { 0.0 } + noise.sample(rng))
            .collect()
    };

    let mut labeled_rows = Vec::with_capacity(2 * spec.labeled_per_class);
    let mut labels = Vec::with_capacity(2 * spec.labeled_per_class);
    for class in [0.0, 1.0] {
        for _ in 0..spec.labeled_per_class {
            labeled_rows.push(draw(class, &mut rng));
            labels.push(class);
        }
    }

    let negatives = spec.unlabeled_total / 2;
    let mut classes: Vec<f64> = (0..spec.unlabeled_total)
        .map(|i| if i < negatives { 0.0 } else { 1.0 })
        .collect();
    classes.shuffle(&mut rng);
    let unlabeled_rows: Vec<Vec<f64>> = classes.iter().map(|&c| draw(c, &mut rng)).collect();

    let dataset = Dataset::from_rows(&labeled_rows, &labels, &unlabeled_rows, spec.intercept)?;
    Ok(SyntheticData {
        dataset,
        unlabeled_truth: DVector::from_vec(classes),
    })
}

/// Fully labeled objects, e.g. a benchmark dataset before any label removal.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPool {
    features: DMatrix<f64>,
    labels: DVector<f64>,
    intercept: bool,
}

impl LabeledPool {
    pub fn new(features: DMatrix<f64>, labels: DVector<f64>, intercept: bool) -> Result<Self> {
        crate::error::check_dim("pool labels", features.nrows(), labels.len())?;
        if labels.iter().any(|&y| y != 0.0 && y != 1.0) {
            return Err(Error::InvalidInput("pool labels must be 0 or 1".into()));
        }
        crate::model::ensure_finite("pool features", features.iter())?;
        Ok(Self {
            features,
            labels,
            intercept,
        })
    }

    pub fn features(&self) -> &DMatrix<f64> {
        &self.features
    }

    pub fn labels(&self) -> &DVector<f64> {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.ncols()
    }

    pub fn has_intercept(&self) -> bool {
        self.intercept
    }

    fn rows(&self, idx: &[usize]) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::from_fn(idx.len(), d, |i, j| self.features[(idx[i], j)])
    }

    fn labels_at(&self, idx: &[usize]) -> DVector<f64> {
        DVector::from_iterator(idx.len(), idx.iter().map(|&i| self.labels[i]))
    }

    pub fn subset(&self, idx: &[usize]) -> LabeledPool {
        LabeledPool {
            features: self.rows(idx),
            labels: self.labels_at(idx),
            intercept: self.intercept,
        }
    }
}

/// A partition of a pool into labeled, unlabeled and test objects.
#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub train: Dataset,
    /// True labels of `train`'s unlabeled block.
    pub hidden_truth: DVector<f64>,
    pub test: LabeledPool,
    pub labeled_idx: Vec<usize>,
    pub unlabeled_idx: Vec<usize>,
    pub test_idx: Vec<usize>,
}

impl Split {
    pub fn has_test(&self) -> bool {
        !self.test.is_empty()
    }

    /// FNV-1a digest of the three index lists, for checking that several
    /// methods saw the same partition.
    pub fn partition_hash(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut feed = |x: u64| {
            for b in x.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        };
        for part in [&self.labeled_idx, &self.unlabeled_idx, &self.test_idx] {
            feed(part.len() as u64);
            for &i in part {
                feed(i as u64);
            }
        }
        h
    }

    fn build(
        pool: &LabeledPool,
        labeled_idx: Vec<usize>,
        unlabeled_idx: Vec<usize>,
        test_idx: Vec<usize>,
    ) -> Result<Self> {
        let train = Dataset::assemble(
            pool.rows(&labeled_idx),
            pool.labels_at(&labeled_idx),
            pool.rows(&unlabeled_idx),
            pool.intercept,
        )?;
        Ok(Self {
            train,
            hidden_truth: pool.labels_at(&unlabeled_idx),
            test: pool.subset(&test_idx),
            labeled_idx,
            unlabeled_idx,
            test_idx,
        })
    }
}

fn floor_count(n: usize, fraction: f64) -> usize {
    (n as f64 * fraction + 1e-9).floor() as usize
}

/// Random test / unlabeled / labeled partition. Counts are
/// `floor(N * test_fraction)` test objects and
/// `floor(rest * unlabel_fraction)` unlabeled objects; the remainder keeps
/// its labels. Draws are repeated until the labeled part holds both classes.
pub fn split_for_local_optima(
    pool: &LabeledPool,
    test_fraction: f64,
    unlabel_fraction: f64,
    seed: u64,
) -> Result<Split> {
    for (name, f) in [
        ("test_fraction", test_fraction),
        ("unlabel_fraction", unlabel_fraction),
    ] {
        if !(f > 0.0 && f < 1.0) {
            return Err(Error::InvalidInput(format!(
                "{name} must lie in (0, 1), got {f}"
            )));
        }
    }
    let n = pool.len();
    let n_test = floor_count(n, test_fraction);
    let n_unlabeled = floor_count(n - n_test, unlabel_fraction);
    let n_labeled = n - n_test - n_unlabeled;
    if n_labeled == 0 {
        return Err(Error::Degenerate(format!(
            "split of {n} objects leaves no labeled objects"
        )));
    }
    for attempt in 0..MAX_SPLIT_ATTEMPTS {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng_for(seed, attempt));
        let test_idx = order[..n_test].to_vec();
        let unlabeled_idx = order[n_test..n_test + n_unlabeled].to_vec();
        let labeled_idx = order[n_test + n_unlabeled..].to_vec();
        let positives = labeled_idx
            .iter()
            .filter(|&&i| pool.labels[i] == 1.0)
            .count();
        if positives == 0 || positives == labeled_idx.len() {
            continue;
        }
        return Split::build(pool, labeled_idx, unlabeled_idx, test_idx);
    }
    Err(Error::Degenerate(format!(
        "no split with both classes labeled after {MAX_SPLIT_ATTEMPTS} attempts"
    )))
}

/// First `labeled` objects of a seeded permutation are labeled, the next
/// `unlabeled` lose their labels, the rest form the test set. The same seed
/// with growing `unlabeled` gives nested unlabeled sets and a fixed labeled set.
pub fn sample_learning_curve_split(
    pool: &LabeledPool,
    labeled: usize,
    unlabeled: usize,
    seed: u64,
) -> Result<Split> {
    if labeled <= pool.dim() {
        return Err(Error::InvalidInput(format!(
            "labeled count {labeled} must exceed the dimension {} for a well-defined supervised solution",
            pool.dim()
        )));
    }
    if labeled + unlabeled > pool.len() {
        return Err(Error::Capacity(format!(
            "{labeled} labeled + {unlabeled} unlabeled exceeds the {} available objects",
            pool.len()
        )));
    }
    let mut order: Vec<usize> = (0..pool.len()).collect();
    order.shuffle(&mut rng_for(seed, 0));
    let labeled_idx = order[..labeled].to_vec();
    let unlabeled_idx = order[labeled..labeled + unlabeled].to_vec();
    let test_idx = order[labeled + unlabeled..].to_vec();
    Split::build(pool, labeled_idx, unlabeled_idx, test_idx)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvSchema {
    /// Name of the label column; with `header = false` the last column is
    /// the label and there is no truth column.
    pub label_column: String,
    /// Optional ground-truth column, used when present in the header.
    pub truth_column: Option<String>,
    pub missing_label_token: String,
    pub delimiter: u8,
    pub header: bool,
}

impl Default for CsvSchema {
    fn default() -> Self {
        Self {
            label_column: "label".into(),
            truth_column: Some(TRUTH_COLUMN.into()),
            missing_label_token: String::new(),
            delimiter: b',',
            header: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedData {
    pub dataset: Dataset,
    /// True labels of the unlabeled rows, present when every unlabeled row
    /// carries one (empty when there are no unlabeled rows).
    pub ground_truth: Option<DVector<f64>>,
    pub feature_names: Vec<String>,
}

impl LoadedData {
    /// Every object with a known label, or `None` when some unlabeled row
    /// has no ground truth.
    pub fn into_pool(self) -> Option<LabeledPool> {
        let truth = self.ground_truth?;
        Some(pool_from(&self.dataset, &truth))
    }
}

pub fn load_csv(path: impl AsRef<Path>, schema: &CsvSchema, intercept: bool) -> Result<LoadedData> {
    let file = std::fs::File::open(path)?;
    read_csv(file, schema, intercept)
}

pub fn read_csv<R: Read>(reader: R, schema: &CsvSchema, intercept: bool) -> Result<LoadedData> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(schema.delimiter)
        .has_headers(schema.header)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut records = Vec::new();
    for rec in rdr.records() {
        records.push(rec?);
    }
    let width = if schema.header {
        rdr.headers()?.len()
    } else {
        records.first().map_or(0, |r| r.len())
    };

    let (label_col, truth_col, names) = if schema.header {
        let headers = rdr.headers()?.clone();
        let find = |name: &str| headers.iter().position(|h| h == name);
        let label_col = find(&schema.label_column).ok_or_else(|| {
            Error::Schema(format!("label column '{}' not found", schema.label_column))
        })?;
        let truth_col = schema.truth_column.as_deref().and_then(find);
        let names = headers
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != label_col && Some(*j) != truth_col)
            .map(|(_, h)| h.to_string())
            .collect();
        (label_col, truth_col, names)
    } else {
        if width == 0 {
            return Err(Error::Schema("empty file".into()));
        }
        let names = (1..width).map(|j| format!("x{j}")).collect();
        (width - 1, None, names)
    };

    let parse_label = |raw: &str, row: usize, col: usize| -> Result<Option<f64>> {
        if raw == schema.missing_label_token {
            return Ok(None);
        }
        match raw.parse::<f64>() {
            Ok(v) if v == 0.0 || v == 1.0 => Ok(Some(v)),
            _ => Err(Error::Schema(format!(
                "label '{raw}' at row {row}, column {col} is not 0, 1 or the missing token"
            ))),
        }
    };

    let mut labeled_rows = Vec::new();
    let mut labels = Vec::new();
    let mut unlabeled_rows = Vec::new();
    let mut truth = Vec::new();
    let mut truth_complete = truth_col.is_some();
    for (r, rec) in records.iter().enumerate() {
        let row = r + 1;
        if rec.len() != width {
            return Err(Error::Parse {
                row,
                column: rec.len().min(width) + 1,
                message: format!("expected {width} fields, found {}", rec.len()),
            });
        }
        let mut features = Vec::with_capacity(width);
        for (j, field) in rec.iter().enumerate() {
            if j == label_col || Some(j) == truth_col {
                continue;
            }
            let value = field.parse::<f64>().ok().filter(|v| v.is_finite());
            features.push(value.ok_or_else(|| Error::Parse {
                row,
                column: j + 1,
                message: format!("'{field}' is not a finite number"),
            })?);
        }
        match parse_label(&rec[label_col], row, label_col + 1)? {
            Some(y) => {
                labeled_rows.push(features);
                labels.push(y);
            }
            None => {
                unlabeled_rows.push(features);
                if let Some(tc) = truth_col {
                    match parse_label(&rec[tc], row, tc + 1)? {
                        Some(t) => truth.push(t),
                        None => truth_complete = false,
                    }
                }
            }
        }
    }

    // With no unlabeled rows the truth is trivially complete.
    let truth_complete = truth_complete || unlabeled_rows.is_empty();
    let d = width - 1 - usize::from(truth_col.is_some());
    let labeled = DMatrix::from_fn(labeled_rows.len(), d, |i, j| labeled_rows[i][j]);
    let unlabeled = DMatrix::from_fn(unlabeled_rows.len(), d, |i, j| unlabeled_rows[i][j]);
    let (labeled, unlabeled) = if intercept {
        (with_intercept(&labeled), with_intercept(&unlabeled))
    } else {
        (labeled, unlabeled)
    };
    let dataset = Dataset::assemble(labeled, DVector::from_vec(labels), unlabeled, intercept)?;
    Ok(LoadedData {
        dataset,
        ground_truth: truth_complete.then(|| DVector::from_vec(truth)),
        feature_names: names,
    })
}

/// Writes features (without the intercept column), `label` (empty for
/// unlabeled rows) and, when given, `true_label` for every row.
pub fn write_csv<W: Write>(writer: W, data: &Dataset, truth: Option<&DVector<f64>>) -> Result<()> {
    if let Some(t) = truth {
        crate::error::check_dim("ground truth", data.n_unlabeled(), t.len())?;
    }
    let skip = usize::from(data.has_intercept());
    let d = data.dim() - skip;
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = (1..=d).map(|j| format!("x{j}")).collect();
    header.push("label".into());
    if truth.is_some() {
        header.push(TRUTH_COLUMN.into());
    }
    w.write_record(&header)?;

    let mut emit = |row: nalgebra::RowDVector<f64>, label: String, t: Option<f64>| -> Result<()> {
        let mut fields: Vec<String> = row.iter().skip(skip).map(|v| v.to_string()).collect();
        fields.push(label);
        if truth.is_some() {
            fields.push(t.map(|v| v.to_string()).unwrap_or_default());
        }
        w.write_record(&fields)?;
        Ok(())
    };
    for i in 0..data.n_labeled() {
        let y = data.labels()[i];
        emit(
            data.labeled_features().row(i).into_owned(),
            y.to_string(),
            Some(y),
        )?;
    }
    for i in 0..data.n_unlabeled() {
        emit(
            data.unlabeled_features().row(i).into_owned(),
            String::new(),
            truth.map(|t| t[i]),
        )?;
    }
    w.flush()?;
    Ok(())
}
