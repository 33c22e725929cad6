//! Self-learning by block coordinate descent.
//!
//! Both solvers alternate two exact minimizations: the imputed values of
//! the unlabeled objects given `w`, then `w` given the imputed values (a
//! ridge solve on the extended system). The soft variant minimizes the
//! label-based objective (imputed labels are clamped decision values), the
//! hard variant the responsibility-based one (imputed responsibilities are
//! thresholded decision values). Each half-step is an exact block minimizer,
//! so the recorded objective never increases.

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, Error, Result};
use crate::model::{
    decision_values, ClassEncoding, Dataset, Penalty, Responsibilities, RidgeFactor, SoftLabels,
    WeightVector,
};

/// Trace records kept at full resolution before thinning kicks in.
pub const FULL_TRACE_LIMIT: usize = 10_000;
/// Once thinned, only every this-many-th iteration is kept.
pub const TRACE_THINNING: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    /// Start from the ridge solution on the labeled block.
    Supervised,
    GivenWeights(WeightVector),
    /// Start from imputed values for the unlabeled block (each in `[0, 1]`).
    GivenLabels(DVector<f64>),
}

/// Stopping rule for the soft-label solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SoftStop {
    /// Relative objective decrease below `objective_tolerance`.
    Objective,
    /// Imputed labels identical between consecutive iterations.
    Labels,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Maximum number of weight updates.
    pub max_iterations: usize,
    pub objective_tolerance: f64,
    /// The soft objective rule also requires the last weight step to be
    /// below `weight_tolerance * (1 + |w|_max)` in max-norm.
    pub weight_tolerance: f64,
    pub init: Init,
    pub soft_stop: SoftStop,
    /// Keep imputed vectors in the trace (weights are always kept).
    pub record_labels: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iterations: 1000,
            objective_tolerance: 1e-10,
            weight_tolerance: 1e-10,
            init: Init::Supervised,
            soft_stop: SoftStop::Objective,
            record_labels: true,
        }
    }
}

impl SolverConfig {
    pub fn with_init(mut self, init: Init) -> Self {
        self.init = init;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidInput(
                "max_iterations must be at least 1".into(),
            ));
        }
        if !(self.objective_tolerance >= 0.0 && self.weight_tolerance >= 0.0) {
            return Err(Error::InvalidInput("tolerances must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    LabelsStable,
    ObjectiveTolerance,
    MaxIterations,
}

impl StopReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            StopReason::LabelsStable => "labels_stable",
            StopReason::ObjectiveTolerance => "objective_tolerance",
            StopReason::MaxIterations => "max_iterations",
        }
    }
}

impl std::fmt::Display for StopReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// State after `iteration` weight updates: the weights, the imputed values
/// that minimize the objective for those weights, and the objective there.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub weights: WeightVector,
    pub imputed: Option<DVector<f64>>,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitTrace {
    pub records: Vec<IterationRecord>,
    pub converged: bool,
    pub stop_reason: StopReason,
}

impl FitTrace {
    pub fn objectives(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.objective)
    }

    /// True when every step satisfies `J[k+1] <= J[k] + rel * (1 + |J[k]|)`.
    pub fn is_monotone(&self, rel: f64) -> bool {
        self.records
            .windows(2)
            .all(|p| p[1].objective <= p[0].objective + rel * (1.0 + p[0].objective.abs()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Imputed {
    Soft(SoftLabels),
    Hard(Responsibilities),
}

impl Imputed {
    pub fn values(&self) -> &DVector<f64> {
        match self {
            Imputed::Soft(u) => u.values(),
            Imputed::Hard(q) => q.values(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub weights: WeightVector,
    pub imputed: Imputed,
    pub final_objective: f64,
    /// Number of weight updates performed.
    pub iterations: usize,
    pub trace: FitTrace,
}

/// Clamps each unlabeled decision value to `[0, 1]`.
pub fn update_soft_labels(data: &Dataset, w: &WeightVector) -> Result<SoftLabels> {
    let s = decision_values(data.unlabeled_features(), w)?;
    SoftLabels::new(clamp_unit(s))
}

/// Sets each responsibility to the vertex with negative gradient; a zero
/// gradient (decision value exactly at the class midpoint) gives 0.
pub fn update_hard_labels(
    data: &Dataset,
    w: &WeightVector,
    encoding: ClassEncoding,
) -> Result<Responsibilities> {
    let s = decision_values(data.unlabeled_features(), w)?;
    Responsibilities::new(threshold(s, encoding))
}

/// Ridge solve on the extended system with targets `[y; imputed]`.
pub fn update_weights(
    data: &Dataset,
    imputed: &DVector<f64>,
    penalty: impl Into<Penalty>,
) -> Result<WeightVector> {
    let targets = data.extended_targets(imputed)?;
    RidgeFactor::new(&data.extended_features(), penalty)?.solve(&targets)
}

/// Ridge solution on the labeled block only.
pub fn fit_supervised(data: &Dataset, penalty: impl Into<Penalty>) -> Result<WeightVector> {
    crate::model::ridge_solve(data.labeled_features(), data.labels(), penalty)
}

/// Ridge solution on the pooled data with the true labels of the unlabeled block.
pub fn fit_oracle(
    data: &Dataset,
    truth: &DVector<f64>,
    penalty: impl Into<Penalty>,
) -> Result<WeightVector> {
    if truth.iter().any(|&t| t != 0.0 && t != 1.0) {
        return Err(Error::InvalidInput(
            "ground-truth labels must be 0 or 1".into(),
        ));
    }
    update_weights(data, truth, penalty)
}

fn clamp_unit(s: DVector<f64>) -> DVector<f64> {
    s.map(|v| v.clamp(0.0, 1.0))
}

fn threshold(s: DVector<f64>, encoding: ClassEncoding) -> DVector<f64> {
    let (m, n) = (encoding.positive(), encoding.negative());
    s.map(|v| {
        if m * m - n * n - 2.0 * (m - n) * v < 0.0 {
            1.0
        } else {
            0.0
        }
    })
}

/// Cached `w(t) = P_l y + P_u t` for a fixed dataset and penalty.
struct ExtendedSystem<'a> {
    data: &'a Dataset,
    penalty: Penalty,
    labeled_part: DVector<f64>,
    unlabeled_map: DMatrix<f64>,
}

impl<'a> ExtendedSystem<'a> {
    fn new(data: &'a Dataset, penalty: Penalty) -> Result<Self> {
        let factor = RidgeFactor::new(&data.extended_features(), penalty)?;
        let (l, u) = (data.n_labeled(), data.n_unlabeled());
        let map = factor.map();
        Ok(Self {
            data,
            penalty,
            labeled_part: map.columns(0, l) * data.labels(),
            unlabeled_map: map.columns(l, u).into_owned(),
        })
    }

    fn weights(&self, unlabeled_targets: &DVector<f64>) -> WeightVector {
        WeightVector::new(&self.labeled_part + &self.unlabeled_map * unlabeled_targets)
            .expect("finite targets give finite weights")
    }

    fn labeled_part(&self, w: &WeightVector) -> f64 {
        let s = self.data.labeled_features() * w.as_vector();
        (s - self.data.labels()).norm_squared() + self.penalty.value(w.as_vector())
    }
}

/// The two ingredients distinguishing the soft and hard solvers.
trait Variant {
    fn impute(&self, s: DVector<f64>) -> DVector<f64>;
    /// Unlabeled contribution to the objective.
    fn unlabeled_loss(&self, s: &DVector<f64>, imputed: &DVector<f64>) -> f64;
    /// Regression targets induced by the imputed values.
    fn targets(&self, imputed: &DVector<f64>) -> DVector<f64>;
    fn stopped(&self, step: &Step<'_>, config: &SolverConfig) -> Option<StopReason>;
    fn wrap(&self, imputed: DVector<f64>) -> Result<Imputed>;
}

/// One weight update and the imputation that follows it.
struct Step<'a> {
    previous_objective: f64,
    objective: f64,
    previous_imputed: &'a DVector<f64>,
    imputed: &'a DVector<f64>,
    weights: &'a WeightVector,
    weight_change: f64,
}

impl Step<'_> {
    fn labels_repeat(&self) -> bool {
        self.previous_imputed == self.imputed
    }
}

struct Soft(SoftStop);

impl Variant for Soft {
    fn impute(&self, s: DVector<f64>) -> DVector<f64> {
        clamp_unit(s)
    }

    fn unlabeled_loss(&self, s: &DVector<f64>, u: &DVector<f64>) -> f64 {
        (s - u).norm_squared()
    }

    fn targets(&self, u: &DVector<f64>) -> DVector<f64> {
        u.clone()
    }

    fn stopped(&self, step: &Step<'_>, config: &SolverConfig) -> Option<StopReason> {
        match self.0 {
            SoftStop::Labels => step.labels_repeat().then_some(StopReason::LabelsStable),
            SoftStop::Objective => {
                let decrease = step.previous_objective - step.objective;
                let flat = decrease <= config.objective_tolerance * step.previous_objective.abs();
                let still =
                    step.weight_change <= config.weight_tolerance * (1.0 + step.weights.max_norm());
                (flat && still).then_some(StopReason::ObjectiveTolerance)
            }
        }
    }

    fn wrap(&self, u: DVector<f64>) -> Result<Imputed> {
        Ok(Imputed::Soft(SoftLabels::new(u)?))
    }
}

struct Hard(ClassEncoding);

impl Variant for Hard {
    fn impute(&self, s: DVector<f64>) -> DVector<f64> {
        threshold(s, self.0)
    }

    fn unlabeled_loss(&self, s: &DVector<f64>, q: &DVector<f64>) -> f64 {
        let (m, n) = (self.0.positive(), self.0.negative());
        s.iter()
            .zip(q.iter())
            .map(|(s, q)| q * (s - m).powi(2) + (1.0 - q) * (s - n).powi(2))
            .sum()
    }

    fn targets(&self, q: &DVector<f64>) -> DVector<f64> {
        let (m, n) = (self.0.positive(), self.0.negative());
        q.map(|q| q * (m - n) + n)
    }

    fn stopped(&self, step: &Step<'_>, _config: &SolverConfig) -> Option<StopReason> {
        step.labels_repeat().then_some(StopReason::LabelsStable)
    }

    fn wrap(&self, q: DVector<f64>) -> Result<Imputed> {
        Ok(Imputed::Hard(Responsibilities::new(q)?))
    }
}

struct TraceBuilder {
    records: Vec<IterationRecord>,
    record_labels: bool,
}

impl TraceBuilder {
    fn keep(&self, iteration: usize) -> bool {
        self.records.len() < FULL_TRACE_LIMIT || iteration.is_multiple_of(TRACE_THINNING)
    }

    fn push(&mut self, iteration: usize, w: &WeightVector, imputed: &DVector<f64>, objective: f64) {
        self.records.push(IterationRecord {
            iteration,
            weights: w.clone(),
            imputed: self.record_labels.then(|| imputed.clone()),
            objective,
        });
    }
}

fn run<V: Variant>(
    data: &Dataset,
    penalty: Penalty,
    config: &SolverConfig,
    variant: V,
) -> Result<FitResult> {
    config.validate()?;
    let system = ExtendedSystem::new(data, penalty)?;
    let xu = data.unlabeled_features();

    let w0 = match &config.init {
        Init::Supervised => fit_supervised(data, penalty)?,
        Init::GivenWeights(w) => {
            check_dim("initial weights", data.dim(), w.len())?;
            w.clone()
        }
        Init::GivenLabels(t) => {
            check_dim("initial labels", data.n_unlabeled(), t.len())?;
            SoftLabels::new(t.clone())?;
            system.weights(&variant.targets(t))
        }
    };

    let evaluate = |w: &WeightVector| -> (DVector<f64>, f64) {
        let s = xu * w.as_vector();
        let imputed = variant.impute(s.clone());
        let objective = system.labeled_part(w) + variant.unlabeled_loss(&s, &imputed);
        (imputed, objective)
    };

    let mut trace = TraceBuilder {
        records: Vec::new(),
        record_labels: config.record_labels,
    };
    let mut w = w0;
    let (mut imputed, mut objective) = evaluate(&w);
    trace.push(0, &w, &imputed, objective);

    let mut stop = None;
    let mut iterations = 0;
    while iterations < config.max_iterations {
        iterations += 1;
        let w_next = system.weights(&variant.targets(&imputed));
        let (imputed_next, objective_next) = evaluate(&w_next);
        let reason = variant.stopped(
            &Step {
                previous_objective: objective,
                objective: objective_next,
                previous_imputed: &imputed,
                imputed: &imputed_next,
                weights: &w_next,
                weight_change: w_next.max_abs_diff(&w),
            },
            config,
        );
        w = w_next;
        imputed = imputed_next;
        objective = objective_next;
        if reason.is_some() || trace.keep(iterations) {
            trace.push(iterations, &w, &imputed, objective);
        }
        if reason.is_some() {
            stop = reason;
            break;
        }
    }
    if stop.is_none() && trace.records.last().map(|r| r.iteration) != Some(iterations) {
        trace.push(iterations, &w, &imputed, objective);
    }

    Ok(FitResult {
        weights: w,
        imputed: variant.wrap(imputed)?,
        final_objective: objective,
        iterations,
        trace: FitTrace {
            records: trace.records,
            converged: stop.is_some(),
            stop_reason: stop.unwrap_or(StopReason::MaxIterations),
        },
    })
}

/// Soft-label self-learning: block coordinate descent on the label-based
/// objective over `w` and `u` in `[0, 1]^U`.
pub fn fit_soft(
    data: &Dataset,
    penalty: impl Into<Penalty>,
    config: &SolverConfig,
) -> Result<FitResult> {
    run(data, penalty.into(), config, Soft(config.soft_stop))
}

/// Hard-label self-learning: block coordinate descent on the
/// responsibility-based objective; stops once the labels repeat.
pub fn fit_hard(
    data: &Dataset,
    penalty: impl Into<Penalty>,
    encoding: ClassEncoding,
    config: &SolverConfig,
) -> Result<FitResult> {
    run(data, penalty.into(), config, Hard(encoding))
}
