//! Regularized least squares classification: data containers, the ridge
//! solve, the 1/2-threshold decision rule, and the supervised, label-based
//! and responsibility-based objectives with their analytic gradients.
//!
//! Objectives (`s_i = x_i^T w`, penalty `P(w) = lambda * sum_j p_j w_j^2`):
//!
//! ```text
//! supervised:      sum_labeled (s_i - y_i)^2 + P(w)
//! label-based:     sum_labeled (s_i - y_i)^2 + sum_unlabeled (s_i - u_i)^2 + P(w)
//! responsibility:  sum_labeled (s_i - y_i)^2 + P(w)
//!                    + sum_unlabeled q_i (s_i - m)^2 + (1 - q_i) (s_i - n)^2
//! ```

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, Error, Result};

/// Labeled design matrix with binary targets plus an unlabeled design matrix
/// sharing the same columns.
///
/// When built with an intercept the constant column is column 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    labeled: DMatrix<f64>,
    labels: DVector<f64>,
    unlabeled: DMatrix<f64>,
    intercept: bool,
}

impl Dataset {
    /// Builds a dataset from matrices that already contain every column the
    /// classifier uses.
    pub fn new(
        labeled: DMatrix<f64>,
        labels: DVector<f64>,
        unlabeled: DMatrix<f64>,
    ) -> Result<Self> {
        Self::assemble(labeled, labels, unlabeled, false)
    }

    /// Builds a dataset from raw feature rows, prepending a column of ones
    /// when `intercept` is set.
    pub fn from_rows(
        labeled_rows: &[Vec<f64>],
        labels: &[f64],
        unlabeled_rows: &[Vec<f64>],
        intercept: bool,
    ) -> Result<Self> {
        let width = labeled_rows
            .first()
            .or(unlabeled_rows.first())
            .map(Vec::len)
            .unwrap_or(0);
        let labeled = rows_to_matrix(labeled_rows, width)?;
        let unlabeled = rows_to_matrix(unlabeled_rows, width)?;
        let (labeled, unlabeled) = if intercept {
            (with_intercept(&labeled), with_intercept(&unlabeled))
        } else {
            (labeled, unlabeled)
        };
        Self::assemble(
            labeled,
            DVector::from_column_slice(labels),
            unlabeled,
            intercept,
        )
    }

    pub(crate) fn assemble(
        labeled: DMatrix<f64>,
        labels: DVector<f64>,
        unlabeled: DMatrix<f64>,
        intercept: bool,
    ) -> Result<Self> {
        if labeled.nrows() == 0 {
            return Err(Error::InvalidInput(
                "at least one labeled object is required".into(),
            ));
        }
        check_dim("labels vs labeled rows", labeled.nrows(), labels.len())?;
        check_dim(
            "unlabeled vs labeled columns",
            labeled.ncols(),
            unlabeled.ncols(),
        )?;
        ensure_finite("labeled features", labeled.iter())?;
        ensure_finite("unlabeled features", unlabeled.iter())?;
        if let Some(bad) = labels.iter().find(|&&y| y != 0.0 && y != 1.0) {
            return Err(Error::InvalidInput(format!(
                "labels must be exactly 0 or 1, found {bad}"
            )));
        }
        if intercept && labeled.ncols() == 0 {
            return Err(Error::InvalidInput("intercept flag without columns".into()));
        }
        Ok(Self {
            labeled,
            labels,
            unlabeled,
            intercept,
        })
    }

    pub fn labeled_features(&self) -> &DMatrix<f64> {
        &self.labeled
    }

    pub fn labels(&self) -> &DVector<f64> {
        &self.labels
    }

    pub fn unlabeled_features(&self) -> &DMatrix<f64> {
        &self.unlabeled
    }

    /// True when column 0 is the constant intercept feature.
    pub fn has_intercept(&self) -> bool {
        self.intercept
    }

    pub fn n_labeled(&self) -> usize {
        self.labeled.nrows()
    }

    pub fn n_unlabeled(&self) -> usize {
        self.unlabeled.nrows()
    }

    /// Number of columns, intercept included.
    pub fn dim(&self) -> usize {
        self.labeled.ncols()
    }

    /// Row concatenation of the labeled and unlabeled design matrices.
    pub fn extended_features(&self) -> DMatrix<f64> {
        let (l, u, d) = (self.n_labeled(), self.n_unlabeled(), self.dim());
        let mut out = DMatrix::zeros(l + u, d);
        out.rows_mut(0, l).copy_from(&self.labeled);
        out.rows_mut(l, u).copy_from(&self.unlabeled);
        out
    }

    /// `[y; imputed]`, the targets of the extended system.
    pub fn extended_targets(&self, imputed: &DVector<f64>) -> Result<DVector<f64>> {
        check_dim("imputed targets", self.n_unlabeled(), imputed.len())?;
        let l = self.n_labeled();
        let mut out = DVector::zeros(l + imputed.len());
        out.rows_mut(0, l).copy_from(&self.labels);
        out.rows_mut(l, imputed.len()).copy_from(imputed);
        Ok(out)
    }

    /// The same labeled block with the unlabeled block dropped.
    pub fn supervised_only(&self) -> Dataset {
        Dataset {
            labeled: self.labeled.clone(),
            labels: self.labels.clone(),
            unlabeled: DMatrix::zeros(0, self.dim()),
            intercept: self.intercept,
        }
    }

    /// Z-scores the non-intercept columns using statistics of the labeled
    /// block only.
    pub fn standardized(&self) -> (Dataset, Standardizer) {
        let scaler = Standardizer::fit(&self.labeled, self.intercept);
        let ds = Dataset {
            labeled: scaler.apply(&self.labeled),
            labels: self.labels.clone(),
            unlabeled: scaler.apply(&self.unlabeled),
            intercept: self.intercept,
        };
        (ds, scaler)
    }
}

/// Per-column affine scaling learned from a labeled design matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    means: Vec<f64>,
    scales: Vec<f64>,
}

impl Standardizer {
    fn fit(features: &DMatrix<f64>, intercept: bool) -> Self {
        let n = features.nrows() as f64;
        let mut means = Vec::with_capacity(features.ncols());
        let mut scales = Vec::with_capacity(features.ncols());
        for (j, col) in features.column_iter().enumerate() {
            if intercept && j == 0 {
                means.push(0.0);
                scales.push(1.0);
                continue;
            }
            let mean = col.sum() / n;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            let sd = var.sqrt();
            means.push(mean);
            scales.push(if sd > 0.0 { sd } else { 1.0 });
        }
        Self { means, scales }
    }

    pub fn apply(&self, features: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = features.clone();
        for (j, mut col) in out.column_iter_mut().enumerate() {
            let (m, s) = (self.means[j], self.scales[j]);
            col.apply(|v| *v = (*v - m) / s);
        }
        out
    }
}

/// Prepends a column of ones.
pub fn with_intercept(features: &DMatrix<f64>) -> DMatrix<f64> {
    features.clone().insert_column(0, 1.0)
}

fn rows_to_matrix(rows: &[Vec<f64>], width: usize) -> Result<DMatrix<f64>> {
    for row in rows {
        check_dim("feature row width", width, row.len())?;
    }
    Ok(DMatrix::from_fn(rows.len(), width, |i, j| rows[i][j]))
}

pub(crate) fn ensure_finite<'a>(
    what: &str,
    mut values: impl Iterator<Item = &'a f64>,
) -> Result<()> {
    if values.all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "{what} contain non-finite values"
        )))
    }
}

/// Linear classifier coefficients, intercept included as a coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(DVector<f64>);

impl WeightVector {
    pub fn new(coefficients: DVector<f64>) -> Result<Self> {
        ensure_finite("weights", coefficients.iter())?;
        Ok(Self(coefficients))
    }

    pub fn from_slice(coefficients: &[f64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(coefficients))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DVector::zeros(dim))
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> DVector<f64> {
        self.0
    }

    /// Largest absolute coordinate difference.
    pub fn max_abs_diff(&self, other: &WeightVector) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_norm(&self) -> f64 {
        self.0.amax()
    }
}

fn unit_interval(what: &str, values: &DVector<f64>) -> Result<()> {
    match values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        Some(bad) => Err(Error::InvalidInput(format!(
            "{what} must lie in [0, 1], found {bad}"
        ))),
        None => Ok(()),
    }
}

/// Imputed labels `u` of the unlabeled objects, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftLabels(DVector<f64>);

impl SoftLabels {
    pub fn new(values: DVector<f64>) -> Result<Self> {
        unit_interval("soft labels", &values)?;
        Ok(Self(values))
    }

    pub fn from_slice(values: &[f64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(values))
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Share `q` of each unlabeled object's loss attributed to the positive
/// class, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Responsibilities(DVector<f64>);

impl Responsibilities {
    pub fn new(values: DVector<f64>) -> Result<Self> {
        unit_interval("responsibilities", &values)?;
        Ok(Self(values))
    }

    pub fn from_slice(values: &[f64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(values))
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Every entry is exactly 0 or 1.
    pub fn is_binary(&self) -> bool {
        self.0.iter().all(|&q| q == 0.0 || q == 1.0)
    }

    /// The regression targets `q (m - n) + n` that responsibilities induce.
    pub fn targets(&self, encoding: ClassEncoding) -> DVector<f64> {
        self.0
            .map(|q| q * (encoding.positive - encoding.negative) + encoding.negative)
    }
}

/// Numerical codes of the positive (`m`) and negative (`n`) class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassEncoding {
    positive: f64,
    negative: f64,
}

impl ClassEncoding {
    pub fn new(positive: f64, negative: f64) -> Result<Self> {
        if !positive.is_finite() || !negative.is_finite() || positive == negative {
            return Err(Error::InvalidInput(format!(
                "class codes must be finite and distinct, got ({positive}, {negative})"
            )));
        }
        Ok(Self { positive, negative })
    }

    pub fn positive(&self) -> f64 {
        self.positive
    }

    pub fn negative(&self) -> f64 {
        self.negative
    }

    /// `m - n`.
    pub fn gap(&self) -> f64 {
        self.positive - self.negative
    }
}

impl Default for ClassEncoding {
    fn default() -> Self {
        Self {
            positive: 1.0,
            negative: 0.0,
        }
    }
}

/// Squared-norm penalty `lambda * ||w||^2`, optionally leaving one
/// coordinate (the intercept) unpenalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Penalty {
    pub lambda: f64,
    pub exempt: Option<usize>,
}

impl Penalty {
    pub fn new(lambda: f64) -> Self {
        Self {
            lambda,
            exempt: None,
        }
    }

    pub fn exempting(mut self, column: usize) -> Self {
        self.exempt = Some(column);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.lambda.is_finite() && self.lambda >= 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "ridge penalty must be finite and nonnegative, got {}",
                self.lambda
            )))
        }
    }

    /// Per-coordinate penalty weight: `lambda` or 0 for the exempt column.
    pub fn coefficient(&self, j: usize) -> f64 {
        if self.exempt == Some(j) {
            0.0
        } else {
            self.lambda
        }
    }

    pub fn value(&self, w: &DVector<f64>) -> f64 {
        w.iter()
            .enumerate()
            .map(|(j, v)| self.coefficient(j) * v * v)
            .sum()
    }

    pub(crate) fn gradient(&self, w: &DVector<f64>) -> DVector<f64> {
        DVector::from_fn(w.len(), |j, _| 2.0 * self.coefficient(j) * w[j])
    }
}

impl From<f64> for Penalty {
    fn from(lambda: f64) -> Self {
        Penalty::new(lambda)
    }
}

/// User-facing ridge settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RidgeConfig {
    pub lambda: f64,
    /// Append a constant-ones column.
    pub intercept: bool,
    /// Include the intercept coefficient in the penalty.
    pub penalize_intercept: bool,
    /// Z-score non-intercept columns with labeled-data statistics.
    pub standardize: bool,
}

impl Default for RidgeConfig {
    fn default() -> Self {
        Self {
            lambda: 0.0,
            intercept: true,
            penalize_intercept: true,
            standardize: false,
        }
    }
}

impl RidgeConfig {
    pub fn penalty(&self) -> Penalty {
        let p = Penalty::new(self.lambda);
        if self.intercept && !self.penalize_intercept {
            p.exempting(0)
        } else {
            p
        }
    }
}

/// Precomputed linear map `targets -> w` for a fixed design matrix.
///
/// The ridge problem is solved as least squares on the augmented system
/// `[X; sqrt(P)] w = [t; 0]` through an SVD pseudo-inverse, so a singular
/// Gram matrix at `lambda = 0` yields the minimum-norm solution.
#[derive(Debug, Clone)]
pub struct RidgeFactor {
    map: DMatrix<f64>,
}

impl RidgeFactor {
    pub fn new(features: &DMatrix<f64>, penalty: impl Into<Penalty>) -> Result<Self> {
        let penalty = penalty.into();
        penalty.validate()?;
        let (n, d) = features.shape();
        if n == 0 {
            return Err(Error::InvalidInput(
                "ridge solve needs at least one row".into(),
            ));
        }
        ensure_finite("features", features.iter())?;

        let mut augmented = DMatrix::zeros(n + d, d);
        augmented.rows_mut(0, n).copy_from(features);
        for j in 0..d {
            augmented[(n + j, j)] = penalty.coefficient(j).sqrt();
        }
        let svd = augmented
            .try_svd(true, true, f64::EPSILON, 0)
            .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
        let largest = svd.singular_values.max();
        let cutoff = largest * f64::EPSILON * (n + d) as f64;
        let pinv = svd
            .pseudo_inverse(cutoff)
            .map_err(|e| Error::Numerical(e.to_string()))?;
        Ok(Self {
            map: pinv.columns(0, n).into_owned(),
        })
    }

    /// `d x N` matrix mapping targets to weights.
    pub fn map(&self) -> &DMatrix<f64> {
        &self.map
    }

    pub fn solve(&self, targets: &DVector<f64>) -> Result<WeightVector> {
        check_dim("ridge targets", self.map.ncols(), targets.len())?;
        ensure_finite("targets", targets.iter())?;
        Ok(WeightVector(&self.map * targets))
    }
}

/// Minimizer of `||X w - t||^2 + P(w)`; minimum-norm when not unique.
pub fn ridge_solve(
    features: &DMatrix<f64>,
    targets: &DVector<f64>,
    penalty: impl Into<Penalty>,
) -> Result<WeightVector> {
    check_dim("ridge targets", features.nrows(), targets.len())?;
    ensure_finite("targets", targets.iter())?;
    RidgeFactor::new(features, penalty)?.solve(targets)
}

/// `X w`, one decision value per row.
pub fn decision_values(features: &DMatrix<f64>, w: &WeightVector) -> Result<DVector<f64>> {
    check_dim("decision values", features.ncols(), w.len())?;
    Ok(features * &w.0)
}

/// 1 where the decision value exceeds 1/2, 0 otherwise (ties go to 0).
pub fn classify(decision_values: &DVector<f64>) -> Result<DVector<f64>> {
    ensure_finite("decision values", decision_values.iter())?;
    Ok(decision_values.map(|s| if s > 0.5 { 1.0 } else { 0.0 }))
}

fn labeled_residual(data: &Dataset, w: &WeightVector) -> Result<f64> {
    let s = decision_values(&data.labeled, w)?;
    Ok((s - &data.labels).norm_squared())
}

pub fn supervised_objective(
    data: &Dataset,
    w: &WeightVector,
    penalty: impl Into<Penalty>,
) -> Result<f64> {
    Ok(labeled_residual(data, w)? + penalty.into().value(&w.0))
}

pub fn label_objective(
    data: &Dataset,
    w: &WeightVector,
    u: &SoftLabels,
    penalty: impl Into<Penalty>,
) -> Result<f64> {
    check_dim("soft labels", data.n_unlabeled(), u.len())?;
    let su = decision_values(&data.unlabeled, w)?;
    let unlabeled = (su - &u.0).norm_squared();
    Ok(supervised_objective(data, w, penalty)? + unlabeled)
}

pub fn responsibility_objective(
    data: &Dataset,
    w: &WeightVector,
    q: &Responsibilities,
    encoding: ClassEncoding,
    penalty: impl Into<Penalty>,
) -> Result<f64> {
    check_dim("responsibilities", data.n_unlabeled(), q.len())?;
    let su = decision_values(&data.unlabeled, w)?;
    let (m, n) = (encoding.positive, encoding.negative);
    let unlabeled: f64 = su
        .iter()
        .zip(q.0.iter())
        .map(|(s, q)| q * (s - m).powi(2) + (1.0 - q) * (s - n).powi(2))
        .sum();
    Ok(supervised_objective(data, w, penalty)? + unlabeled)
}

/// Gradient of the label-based objective in `u`: `-2 (X_u w - u)`.
pub fn grad_label_objective_u(
    data: &Dataset,
    w: &WeightVector,
    u: &SoftLabels,
) -> Result<DVector<f64>> {
    check_dim("soft labels", data.n_unlabeled(), u.len())?;
    let su = decision_values(&data.unlabeled, w)?;
    Ok((su - &u.0) * -2.0)
}

/// Gradient of the label-based objective in `w`: `2 X_e^T (X_e w - [y; u]) + grad P`.
pub fn grad_label_objective_w(
    data: &Dataset,
    w: &WeightVector,
    u: &SoftLabels,
    penalty: impl Into<Penalty>,
) -> Result<DVector<f64>> {
    check_dim("soft labels", data.n_unlabeled(), u.len())?;
    check_dim("weights", data.dim(), w.len())?;
    let rl = &data.labeled * &w.0 - &data.labels;
    let ru = &data.unlabeled * &w.0 - &u.0;
    let g = data.labeled.tr_mul(&rl) * 2.0 + data.unlabeled.tr_mul(&ru) * 2.0;
    Ok(g + penalty.into().gradient(&w.0))
}

/// Gradient of the responsibility-based objective in `q`:
/// `m^2 - n^2 - 2 (m - n) x_i^T w` per unlabeled object.
pub fn grad_responsibility_objective_q(
    data: &Dataset,
    w: &WeightVector,
    encoding: ClassEncoding,
) -> Result<DVector<f64>> {
    let su = decision_values(&data.unlabeled, w)?;
    let (m, n) = (encoding.positive, encoding.negative);
    Ok(su.map(|s| m * m - n * n - 2.0 * (m - n) * s))
}

/// Gradient of the responsibility-based objective in `w`:
/// `2 X_e^T X_e w - 2 X^T y - 2 X_u^T (q (m - n) + n) + grad P`.
pub fn grad_responsibility_objective_w(
    data: &Dataset,
    w: &WeightVector,
    q: &Responsibilities,
    encoding: ClassEncoding,
    penalty: impl Into<Penalty>,
) -> Result<DVector<f64>> {
    check_dim("responsibilities", data.n_unlabeled(), q.len())?;
    check_dim("weights", data.dim(), w.len())?;
    let xe = data.extended_features();
    let targets = q.targets(encoding);
    let g = xe.tr_mul(&(&xe * &w.0)) * 2.0
        - data.labeled.tr_mul(&data.labels) * 2.0
        - data.unlabeled.tr_mul(&targets) * 2.0;
    Ok(g + penalty.into().gradient(&w.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn m(rows: &[&[f64]]) -> DMatrix<f64> {
        let d = rows.first().map_or(0, |r| r.len());
        DMatrix::from_fn(rows.len(), d, |i, j| rows[i][j])
    }

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(xs)
    }

    fn w(xs: &[f64]) -> WeightVector {
        WeightVector::from_slice(xs).unwrap()
    }

    /// One labeled point at x=1 with label `y`, unlabeled points at the given x.
    fn one_dim(y: f64, unlabeled: &[f64]) -> Dataset {
        let rows: Vec<Vec<f64>> = unlabeled.iter().map(|&x| vec![x]).collect();
        Dataset::from_rows(&[vec![1.0]], &[y], &rows, false).unwrap()
    }

    #[test]
    fn ridge_identity_design() {
        let x = m(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let got = ridge_solve(&x, &v(&[1.0, 0.0]), 0.0).unwrap();
        assert_relative_eq!(got.as_vector(), &v(&[1.0, 0.0]), epsilon = 1e-14);
        let got = ridge_solve(&x, &v(&[1.0, 1.0]), 1.0).unwrap();
        assert_relative_eq!(got.as_vector(), &v(&[0.5, 0.5]), epsilon = 1e-14);
    }

    #[test]
    fn ridge_matches_hand_normal_equations() {
        // X^T X = [[3, 6], [6, 14]], X^T y = [2, 5], det 6 -> w = [-1/3, 1/2]
        let x = m(&[&[1.0, 1.0], &[1.0, 2.0], &[1.0, 3.0]]);
        let got = ridge_solve(&x, &v(&[0.0, 1.0, 1.0]), 0.0).unwrap();
        assert_relative_eq!(got.as_vector(), &v(&[-1.0 / 3.0, 0.5]), epsilon = 1e-13);
    }

    #[test]
    fn ridge_singular_gram_gives_minimum_norm() {
        // duplicated column: any w with w0 + w1 = 1 fits, minimum norm is [0.5, 0.5]
        let x = m(&[&[1.0, 1.0], &[2.0, 2.0]]);
        let got = ridge_solve(&x, &v(&[1.0, 2.0]), 0.0).unwrap();
        assert_relative_eq!(got.as_vector(), &v(&[0.5, 0.5]), epsilon = 1e-12);
        // fewer rows than columns
        let x = m(&[&[1.0, 1.0]]);
        let got = ridge_solve(&x, &v(&[1.0]), 0.0).unwrap();
        assert_relative_eq!(got.as_vector(), &v(&[0.5, 0.5]), epsilon = 1e-12);
    }

    #[test]
    fn ridge_exempt_intercept_is_unpenalized() {
        // intercept only, exempt: solution is the mean regardless of lambda
        let x = m(&[&[1.0], &[1.0], &[1.0]]);
        let got = ridge_solve(&x, &v(&[1.0, 0.0, 1.0]), Penalty::new(5.0).exempting(0)).unwrap();
        assert_relative_eq!(got.as_slice()[0], 2.0 / 3.0, epsilon = 1e-13);
    }

    #[test]
    fn ridge_rejects_bad_input() {
        let x = m(&[&[1.0, 0.0], &[0.0, 1.0]]);
        assert!(matches!(
            ridge_solve(&x, &v(&[1.0]), 0.0),
            Err(Error::Dimension { .. })
        ));
        assert!(matches!(
            ridge_solve(&x, &v(&[1.0, f64::NAN]), 0.0),
            Err(Error::InvalidInput(_))
        ));
        let bad = m(&[&[f64::INFINITY, 0.0]]);
        assert!(matches!(
            ridge_solve(&bad, &v(&[1.0]), 0.0),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            ridge_solve(&x, &v(&[1.0, 1.0]), -1.0),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn decision_values_are_inner_products() {
        let got = decision_values(&m(&[&[1.0, 0.0]]), &w(&[0.7, 3.0])).unwrap();
        assert_eq!(got, v(&[0.7]));
        let got = decision_values(&m(&[&[0.0, 0.0]]), &w(&[-4.0, 9.0])).unwrap();
        assert_eq!(got, v(&[0.0]));
        let got = decision_values(&m(&[&[1.0, 2.0], &[1.0, -1.0]]), &w(&[0.5, 0.25])).unwrap();
        assert_eq!(got, v(&[1.0, 0.25]));
        assert!(decision_values(&m(&[&[1.0, 2.0]]), &w(&[1.0])).is_err());
    }

    #[test]
    fn classify_threshold_and_tie() {
        assert_eq!(classify(&v(&[0.51])).unwrap(), v(&[1.0]));
        assert_eq!(classify(&v(&[0.5])).unwrap(), v(&[0.0]));
        assert_eq!(
            classify(&v(&[-3.0, 0.49, 2.0])).unwrap(),
            v(&[0.0, 0.0, 1.0])
        );
        assert!(classify(&v(&[f64::NAN])).is_err());
    }

    #[test]
    fn supervised_objective_examples() {
        let rows = vec![vec![1.0], vec![2.0], vec![3.0]];
        let ds = Dataset::from_rows(&rows, &[1.0, 0.0, 1.0], &[], false).unwrap();
        assert_eq!(supervised_objective(&ds, &w(&[0.0]), 7.0).unwrap(), 2.0);

        let ds = one_dim(1.0, &[]);
        assert_eq!(supervised_objective(&ds, &w(&[1.0]), 0.0).unwrap(), 0.0);
        assert_relative_eq!(supervised_objective(&ds, &w(&[0.5]), 2.0).unwrap(), 0.75);
    }

    #[test]
    fn label_objective_examples() {
        let ds = one_dim(1.0, &[]);
        let u = SoftLabels::from_slice(&[]).unwrap();
        assert_eq!(
            label_objective(&ds, &w(&[0.3]), &u, 0.4).unwrap(),
            supervised_objective(&ds, &w(&[0.3]), 0.4).unwrap()
        );

        // labeled point at x=1 with y=0.5 is impossible, so subtract the labeled term
        let ds = one_dim(1.0, &[1.0]);
        let ww = w(&[0.5]);
        let base = supervised_objective(&ds, &ww, 0.0).unwrap();
        let u = SoftLabels::from_slice(&[0.5]).unwrap();
        assert_eq!(label_objective(&ds, &ww, &u, 0.0).unwrap() - base, 0.0);
        let u = SoftLabels::from_slice(&[1.0]).unwrap();
        assert_relative_eq!(label_objective(&ds, &ww, &u, 0.0).unwrap() - base, 0.25);
    }

    #[test]
    fn responsibility_objective_examples() {
        let ds = one_dim(1.0, &[1.0]);
        let enc = ClassEncoding::default();
        let ww = w(&[0.5]);
        let base = supervised_objective(&ds, &ww, 0.0).unwrap();
        let q = Responsibilities::from_slice(&[0.5]).unwrap();
        assert_relative_eq!(
            responsibility_objective(&ds, &ww, &q, enc, 0.0).unwrap() - base,
            0.25
        );
        let ww = w(&[1.0]);
        let q = Responsibilities::from_slice(&[1.0]).unwrap();
        assert_eq!(
            responsibility_objective(&ds, &ww, &q, enc, 0.0).unwrap(),
            0.0
        );

        // vertices coincide with the label-based objective
        let ds = one_dim(0.0, &[0.3, -1.2, 2.0]);
        let ww = w(&[0.8]);
        let q = Responsibilities::from_slice(&[1.0, 0.0, 1.0]).unwrap();
        let u = SoftLabels::from_slice(&[1.0, 0.0, 1.0]).unwrap();
        assert_relative_eq!(
            responsibility_objective(&ds, &ww, &q, enc, 0.1).unwrap(),
            label_objective(&ds, &ww, &u, 0.1).unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn gradient_examples() {
        let ds = one_dim(1.0, &[1.0]);
        let u = SoftLabels::from_slice(&[0.5]).unwrap();
        assert_eq!(
            grad_label_objective_u(&ds, &w(&[0.5]), &u).unwrap(),
            v(&[0.0])
        );
        let u = SoftLabels::from_slice(&[0.0]).unwrap();
        assert_eq!(
            grad_label_objective_u(&ds, &w(&[1.0]), &u).unwrap(),
            v(&[-2.0])
        );

        let enc = ClassEncoding::default();
        assert_eq!(
            grad_responsibility_objective_q(&ds, &w(&[0.5]), enc).unwrap(),
            v(&[0.0])
        );
        assert_eq!(
            grad_responsibility_objective_q(&ds, &w(&[1.0]), enc).unwrap(),
            v(&[-1.0])
        );
    }

    #[test]
    fn dataset_validation() {
        assert!(Dataset::from_rows(&[vec![1.0]], &[0.5], &[], false).is_err());
        assert!(Dataset::from_rows(&[], &[], &[vec![1.0]], false).is_err());
        assert!(Dataset::from_rows(&[vec![1.0]], &[1.0], &[vec![1.0, 2.0]], false).is_err());
        assert!(Dataset::from_rows(&[vec![f64::NAN]], &[1.0], &[], false).is_err());
        let ds = Dataset::from_rows(&[vec![2.0]], &[1.0], &[vec![3.0]], true).unwrap();
        assert_eq!(ds.dim(), 2);
        assert_eq!(ds.labeled_features()[(0, 0)], 1.0);
        assert_eq!(ds.unlabeled_features()[(0, 1)], 3.0);
        assert_eq!(ds.extended_features().nrows(), 2);
    }

    #[test]
    fn soft_labels_and_encoding_validation() {
        assert!(SoftLabels::from_slice(&[1.1]).is_err());
        assert!(Responsibilities::from_slice(&[-0.1]).is_err());
        assert!(ClassEncoding::new(1.0, 1.0).is_err());
        let q = Responsibilities::from_slice(&[0.0, 1.0]).unwrap();
        assert!(q.is_binary());
        let enc = ClassEncoding::new(1.0, -1.0).unwrap();
        assert_eq!(q.targets(enc), v(&[-1.0, 1.0]));
    }

    #[test]
    fn standardizer_uses_labeled_statistics() {
        let ds =
            Dataset::from_rows(&[vec![1.0], vec![3.0]], &[0.0, 1.0], &[vec![5.0]], true).unwrap();
        let (z, _) = ds.standardized();
        assert_eq!(z.labeled_features().column(0).as_slice(), &[1.0, 1.0]);
        assert_eq!(z.labeled_features().column(1).as_slice(), &[-1.0, 1.0]);
        assert_eq!(z.unlabeled_features()[(0, 1)], 3.0);
    }
}
