//! Experiment protocols: basin-of-attraction study from perturbed starts,
//! the local-optima study over named datasets, and learning curves in the
//! number of unlabeled objects with supervised and oracle baselines.
//!
//! Restarts and repeats run in parallel; each task draws from its own
//! random stream derived from the base seed and the task index, and results
//! are collected in task order, so reports do not depend on thread count.

use nalgebra::DVector;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::datagen::{
    rng_for, sample_learning_curve_split, split_for_local_optima, stream_id, LabeledPool, Split,
};
use crate::error::{Error, Result};
use crate::model::{classify, decision_values, ClassEncoding, Dataset, Penalty, WeightVector};
use crate::selflearn::{
    fit_hard, fit_oracle, fit_soft, fit_supervised, FitResult, Init, SolverConfig, StopReason,
};

/// Relative max-norm distance below which two weight vectors count as the
/// same optimum.
pub const OPTIMUM_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Supervised,
    Soft,
    Hard,
    Oracle,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Supervised,
        Method::Soft,
        Method::Hard,
        Method::Oracle,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Supervised => "supervised",
            Method::Soft => "soft",
            Method::Hard => "hard",
            Method::Oracle => "oracle",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown method '{s}'")))
    }
}

/// Runs one of the self-learning solvers.
pub fn fit_self_learning(
    data: &Dataset,
    method: Method,
    penalty: Penalty,
    config: &SolverConfig,
) -> Result<FitResult> {
    match method {
        Method::Soft => fit_soft(data, penalty, config),
        Method::Hard => fit_hard(data, penalty, ClassEncoding::default(), config),
        other => Err(Error::InvalidInput(format!(
            "{other} is not a self-learning method"
        ))),
    }
}

/// Fraction of test objects whose predicted class differs from the label.
pub fn evaluate_error(w: &WeightVector, test: &LabeledPool) -> Result<f64> {
    if test.is_empty() {
        return Err(Error::Degenerate("empty test set".into()));
    }
    let predicted = classify(&decision_values(test.features(), w)?)?;
    let wrong = predicted
        .iter()
        .zip(test.labels().iter())
        .filter(|(p, y)| p != y)
        .count();
    Ok(wrong as f64 / test.len() as f64)
}

/// Supervised solution plus Gaussian noise with per-coordinate standard
/// deviation `scale * max(1, ||w_sup||_2)`.
pub fn random_init_near_supervised(
    data: &Dataset,
    penalty: Penalty,
    count: usize,
    scale: f64,
    seed: u64,
) -> Result<Vec<WeightVector>> {
    if count == 0 {
        return Err(Error::InvalidInput("count must be at least 1".into()));
    }
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::InvalidInput(format!(
            "scale must be positive, got {scale}"
        )));
    }
    let sup = fit_supervised(data, penalty)?;
    let sd = scale * sup.as_vector().norm().max(1.0);
    let noise = Normal::new(0.0, sd).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let mut rng = rng_for(seed, 0);
    (0..count)
        .map(|_| WeightVector::new(sup.as_vector().map(|c| c + noise.sample(&mut rng))))
        .collect()
}

/// Groups weight vectors into optima: two vectors are linked when their
/// max-norm distance is below `OPTIMUM_TOLERANCE * (1 + larger max-norm)`,
/// and optima are the connected components. Component ids are ordered by
/// each component's lexicographically smallest member, so both the count
/// and the ids are independent of input order.
pub fn cluster_optima(weights: &[WeightVector]) -> (usize, Vec<usize>) {
    let n = weights.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let scale = 1.0 + weights[i].max_norm().max(weights[j].max_norm());
            if weights[i].max_abs_diff(&weights[j]) < OPTIMUM_TOLERANCE * scale {
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let roots: Vec<usize> = (0..n).map(|i| root(&mut parent, i)).collect();
    let lex = |a: &WeightVector, b: &WeightVector| {
        a.as_slice()
            .iter()
            .zip(b.as_slice())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    };
    let mut reps: Vec<(usize, usize)> = Vec::new();
    for i in 0..n {
        match reps.iter_mut().find(|(r, _)| *r == roots[i]) {
            Some((_, best)) => {
                if lex(&weights[i], &weights[*best]).is_lt() {
                    *best = i;
                }
            }
            None => reps.push((roots[i], i)),
        }
    }
    reps.sort_by(|a, b| lex(&weights[a.1], &weights[b.1]));
    let ids = roots
        .iter()
        .map(|r| {
            reps.iter()
                .position(|(root, _)| root == r)
                .expect("root listed")
        })
        .collect();
    (reps.len(), ids)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub final_weights: WeightVector,
    pub final_objective: f64,
    pub test_error: Option<f64>,
    pub iterations: usize,
    pub stop_reason: StopReason,
    /// `(iteration, objective, weights)` along the descent.
    pub path: Vec<(usize, f64, WeightVector)>,
    pub monotone: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StartRecord {
    pub start_index: usize,
    /// Started at the supervised solution rather than a perturbed point.
    pub supervised: bool,
    pub initial: WeightVector,
    pub outcome: std::result::Result<RunOutcome, String>,
    /// Optimum id from [`cluster_optima`], for successful runs.
    pub optimum: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasinStudyResult {
    pub method: Method,
    /// Perturbed starts in order, then the supervised start last.
    pub records: Vec<StartRecord>,
    pub unique_optima_count: usize,
}

impl BasinStudyResult {
    pub fn supervised_start_record(&self) -> &StartRecord {
        self.records
            .last()
            .expect("supervised start is always recorded")
    }
}

fn run_from(
    data: &Dataset,
    method: Method,
    penalty: Penalty,
    config: &SolverConfig,
    start: &WeightVector,
    test: Option<&LabeledPool>,
) -> std::result::Result<RunOutcome, String> {
    let cfg = SolverConfig {
        init: Init::GivenWeights(start.clone()),
        record_labels: false,
        ..config.clone()
    };
    let fit = fit_self_learning(data, method, penalty, &cfg).map_err(|e| e.to_string())?;
    let test_error = match test {
        Some(t) if !t.is_empty() => {
            Some(evaluate_error(&fit.weights, t).map_err(|e| e.to_string())?)
        }
        _ => None,
    };
    Ok(RunOutcome {
        monotone: fit.trace.is_monotone(1e-10),
        path: fit
            .trace
            .records
            .iter()
            .map(|r| (r.iteration, r.objective, r.weights.clone()))
            .collect(),
        final_weights: fit.weights,
        final_objective: fit.final_objective,
        test_error,
        iterations: fit.iterations,
        stop_reason: fit.trace.stop_reason,
    })
}

/// Runs a self-learning solver from each start and from the supervised
/// solution, then counts distinct optima among the converged weights.
pub fn run_basin_study(
    data: &Dataset,
    penalty: Penalty,
    method: Method,
    starts: &[WeightVector],
    test: Option<&LabeledPool>,
    config: &SolverConfig,
) -> Result<BasinStudyResult> {
    if starts.is_empty() {
        return Err(Error::InvalidInput(
            "basin study needs at least one start".into(),
        ));
    }
    if !matches!(method, Method::Soft | Method::Hard) {
        return Err(Error::InvalidInput(format!("{method} has no basins")));
    }
    let sup = fit_supervised(data, penalty)?;
    let all: Vec<(WeightVector, bool)> = starts
        .iter()
        .map(|w| (w.clone(), false))
        .chain(std::iter::once((sup, true)))
        .collect();

    let mut records: Vec<StartRecord> = all
        .par_iter()
        .enumerate()
        .map(|(i, (start, supervised))| StartRecord {
            start_index: i,
            supervised: *supervised,
            initial: start.clone(),
            outcome: run_from(data, method, penalty, config, start, test),
            optimum: None,
        })
        .collect();

    let finished: Vec<(usize, WeightVector)> = records
        .iter()
        .enumerate()
        .filter_map(|(i, r)| {
            r.outcome
                .as_ref()
                .ok()
                .map(|o| (i, o.final_weights.clone()))
        })
        .collect();
    let weights: Vec<WeightVector> = finished.iter().map(|(_, w)| w.clone()).collect();
    let (count, ids) = cluster_optima(&weights);
    for ((i, _), id) in finished.iter().zip(ids) {
        records[*i].optimum = Some(id);
    }
    Ok(BasinStudyResult {
        method,
        records,
        unique_optima_count: count,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodRuns {
    /// Test error from the supervised initialization.
    pub from_supervised: Option<f64>,
    /// Test errors of the random restarts, `None` where the run failed.
    pub random_starts: Vec<Option<f64>>,
    /// Distinct optima over all successful runs of this method.
    pub unique_minima: usize,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalOptimaRecord {
    pub dataset: String,
    /// Set when the dataset could not be used; the other fields are then empty.
    pub warning: Option<String>,
    pub partition_hash: u64,
    pub supervised_error: Option<f64>,
    pub soft: Option<MethodRuns>,
    pub hard: Option<MethodRuns>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalOptimaReport {
    pub records: Vec<LocalOptimaRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalOptimaConfig {
    pub restarts: usize,
    pub penalty: Penalty,
    pub test_fraction: f64,
    pub unlabel_fraction: f64,
    /// Perturbation scale for the random initializations.
    pub init_scale: f64,
    pub seed: u64,
    pub solver: SolverConfig,
}

impl LocalOptimaConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            restarts: 50,
            penalty: Penalty::new(0.0),
            test_fraction: 0.2,
            unlabel_fraction: 0.8,
            init_scale: 1.0,
            seed,
            solver: SolverConfig::default(),
        }
    }
}

fn method_runs(
    split: &Split,
    method: Method,
    starts: &[WeightVector],
    cfg: &LocalOptimaConfig,
) -> Result<MethodRuns> {
    let study = run_basin_study(
        &split.train,
        cfg.penalty,
        method,
        starts,
        Some(&split.test),
        &cfg.solver,
    )?;
    let error_of = |r: &StartRecord| r.outcome.as_ref().ok().and_then(|o| o.test_error);
    let failures = study
        .records
        .iter()
        .filter_map(|r| r.outcome.as_ref().err().cloned())
        .collect();
    Ok(MethodRuns {
        from_supervised: error_of(study.supervised_start_record()),
        random_starts: study.records[..starts.len()].iter().map(error_of).collect(),
        unique_minima: study.unique_optima_count,
        failures,
    })
}

/// For each dataset: split off a test set, hide most remaining labels, then
/// run both self-learning methods from the supervised solution and from
/// `restarts` random initializations.
pub fn run_local_optima_study(
    datasets: &[(String, LabeledPool)],
    cfg: &LocalOptimaConfig,
) -> Result<LocalOptimaReport> {
    if cfg.restarts == 0 {
        return Err(Error::InvalidInput("restarts must be at least 1".into()));
    }
    let records = datasets
        .iter()
        .enumerate()
        .map(|(k, (name, pool))| {
            let k = k as u64;
            let skipped = |warning: String| LocalOptimaRecord {
                dataset: name.clone(),
                warning: Some(warning),
                partition_hash: 0,
                supervised_error: None,
                soft: None,
                hard: None,
            };
            let split_seed = rng_seed(cfg.seed, stream_id(k, 0));
            let split = match split_for_local_optima(
                pool,
                cfg.test_fraction,
                cfg.unlabel_fraction,
                split_seed,
            ) {
                Ok(s) => s,
                Err(e) => return Ok(skipped(e.to_string())),
            };
            let outcome = (|| -> Result<LocalOptimaRecord> {
                let starts = random_init_near_supervised(
                    &split.train,
                    cfg.penalty,
                    cfg.restarts,
                    cfg.init_scale,
                    rng_seed(cfg.seed, stream_id(k, 1)),
                )?;
                let sup = fit_supervised(&split.train, cfg.penalty)?;
                Ok(LocalOptimaRecord {
                    dataset: name.clone(),
                    warning: None,
                    partition_hash: split.partition_hash(),
                    supervised_error: Some(evaluate_error(&sup, &split.test)?),
                    soft: Some(method_runs(&split, Method::Soft, &starts, cfg)?),
                    hard: Some(method_runs(&split, Method::Hard, &starts, cfg)?),
                })
            })();
            Ok(outcome.unwrap_or_else(|e| skipped(e.to_string())))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LocalOptimaReport { records })
}

/// A fresh 64-bit seed drawn from stream `stream` of `seed`.
fn rng_seed(seed: u64, stream: u64) -> u64 {
    use rand::RngCore;
    rng_for(seed, stream).next_u64()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveCell {
    pub repeat: usize,
    pub unlabeled: usize,
    pub method: Method,
    /// `None` when the test set was empty or the fit failed.
    pub error: Option<f64>,
    pub status: String,
    pub partition_hash: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveAggregate {
    pub unlabeled: usize,
    pub method: Method,
    pub mean_error: Option<f64>,
    pub standard_error: Option<f64>,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearningCurveReport {
    pub cells: Vec<CurveCell>,
    pub aggregates: Vec<CurveAggregate>,
}

impl LearningCurveReport {
    pub fn aggregate(&self, unlabeled: usize, method: Method) -> Option<&CurveAggregate> {
        self.aggregates
            .iter()
            .find(|a| a.unlabeled == unlabeled && a.method == method)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearningCurveConfig {
    pub labeled: usize,
    pub unlabeled_values: Vec<usize>,
    pub repeats: usize,
    pub penalty: Penalty,
    pub seed: u64,
    pub solver: SolverConfig,
}

impl LearningCurveConfig {
    pub fn new(labeled: usize, seed: u64) -> Self {
        Self {
            labeled,
            unlabeled_values: default_unlabeled_values(),
            repeats: 1000,
            penalty: Penalty::new(0.0),
            seed,
            solver: SolverConfig::default(),
        }
    }
}

/// 1, 2, 4, ..., 256.
pub fn default_unlabeled_values() -> Vec<usize> {
    (0..=8).map(|k| 1usize << k).collect()
}

fn curve_cells(
    pool: &LabeledPool,
    cfg: &LearningCurveConfig,
    repeat: usize,
    unlabeled: usize,
) -> Vec<CurveCell> {
    let cell = |method, error, status: String, hash| CurveCell {
        repeat,
        unlabeled,
        method,
        error,
        status,
        partition_hash: hash,
    };
    let seed = rng_seed(cfg.seed, repeat as u64);
    let split = match sample_learning_curve_split(pool, cfg.labeled, unlabeled, seed) {
        Ok(s) => s,
        Err(e) => {
            return Method::ALL
                .iter()
                .map(|&m| cell(m, None, format!("error: {e}"), 0))
                .collect()
        }
    };
    let hash = split.partition_hash();
    let solver = SolverConfig {
        record_labels: false,
        ..cfg.solver.clone()
    };
    Method::ALL
        .iter()
        .map(|&method| {
            let fitted = match method {
                Method::Supervised => fit_supervised(&split.train, cfg.penalty),
                Method::Oracle => fit_oracle(&split.train, &split.hidden_truth, cfg.penalty),
                m => fit_self_learning(&split.train, m, cfg.penalty, &solver).map(|f| f.weights),
            };
            match fitted {
                Err(e) => cell(method, None, format!("error: {e}"), hash),
                Ok(_) if !split.has_test() => cell(method, None, "empty_test".into(), hash),
                Ok(w) => match evaluate_error(&w, &split.test) {
                    Ok(err) => cell(method, Some(err), "ok".into(), hash),
                    Err(e) => cell(method, None, format!("error: {e}"), hash),
                },
            }
        })
        .collect()
}

/// Error of supervised, soft, hard and oracle classifiers as the number of
/// unlabeled objects grows, with a fixed labeled set per repeat.
pub fn run_learning_curve(
    pool: &LabeledPool,
    cfg: &LearningCurveConfig,
) -> Result<LearningCurveReport> {
    if cfg.labeled <= pool.dim() {
        return Err(Error::InvalidInput(format!(
            "labeled count {} must exceed the dimension {}",
            cfg.labeled,
            pool.dim()
        )));
    }
    let max_u = cfg.unlabeled_values.iter().copied().max().unwrap_or(0);
    if cfg.labeled + max_u > pool.len() {
        return Err(Error::Capacity(format!(
            "{} labeled + {max_u} unlabeled exceeds the {} available objects",
            cfg.labeled,
            pool.len()
        )));
    }
    if cfg.repeats == 0 || cfg.unlabeled_values.is_empty() {
        return Err(Error::InvalidInput(
            "need at least one repeat and one U value".into(),
        ));
    }

    let cells: Vec<CurveCell> = (0..cfg.repeats)
        .into_par_iter()
        .flat_map_iter(|r| {
            cfg.unlabeled_values
                .iter()
                .flat_map(move |&u| curve_cells(pool, cfg, r, u))
                .collect::<Vec<_>>()
        })
        .collect();

    let mut aggregates = Vec::new();
    for &u in &cfg.unlabeled_values {
        for method in Method::ALL {
            let errs: Vec<f64> = cells
                .iter()
                .filter(|c| c.unlabeled == u && c.method == method)
                .filter_map(|c| c.error)
                .collect();
            let n = errs.len();
            let mean = (n > 0).then(|| errs.iter().sum::<f64>() / n as f64);
            let se = (n > 1).then(|| {
                let m = mean.expect("n > 1");
                let var = errs.iter().map(|e| (e - m).powi(2)).sum::<f64>() / (n - 1) as f64;
                (var / n as f64).sqrt()
            });
            aggregates.push(CurveAggregate {
                unlabeled: u,
                method,
                mean_error: mean,
                standard_error: se,
                count: n,
            });
        }
    }
    Ok(LearningCurveReport { cells, aggregates })
}

/// Truth labels as a vector, convenient for oracle fits outside the studies.
pub fn truth_vector(values: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{generate, SyntheticSpec};

    fn pool_with(n: usize, labels: &[f64], xs: &[f64]) -> LabeledPool {
        let f = nalgebra::DMatrix::from_fn(n, 2, |i, j| if j == 0 { 1.0 } else { xs[i] });
        LabeledPool::new(f, DVector::from_column_slice(labels), true).unwrap()
    }

    #[test]
    fn error_examples() {
        let test = pool_with(4, &[0.0, 1.0, 0.0, 1.0], &[-1.0, 1.0, -2.0, 2.0]);
        let perfect = WeightVector::from_slice(&[0.5, 1.0]).unwrap();
        assert_eq!(evaluate_error(&perfect, &test).unwrap(), 0.0);
        let zero = WeightVector::from_slice(&[0.0, 0.0]).unwrap();
        assert_eq!(evaluate_error(&zero, &test).unwrap(), 0.5);
        let flipped = WeightVector::from_slice(&[0.5, -1.0]).unwrap();
        let e = evaluate_error(&flipped, &test).unwrap();
        assert_eq!(e, 1.0 - evaluate_error(&perfect, &test).unwrap());
        let empty = test.subset(&[]);
        assert!(matches!(
            evaluate_error(&perfect, &empty),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn random_inits_are_reproducible_and_shrink() {
        let g = generate(&SyntheticSpec::two_cluster_1d(3)).unwrap();
        let p = Penalty::new(0.0);
        let a = random_init_near_supervised(&g.dataset, p, 100, 1.0, 5).unwrap();
        let b = random_init_near_supervised(&g.dataset, p, 100, 1.0, 5).unwrap();
        assert_eq!(a.len(), 100);
        assert_eq!(a, b);
        let sup = fit_supervised(&g.dataset, p).unwrap();
        let tiny = random_init_near_supervised(&g.dataset, p, 10, 1e-12, 5).unwrap();
        assert!(tiny.iter().all(|w| w.max_abs_diff(&sup) < 1e-10));
        assert!(random_init_near_supervised(&g.dataset, p, 0, 1.0, 5).is_err());
        assert!(random_init_near_supervised(&g.dataset, p, 1, 0.0, 5).is_err());
    }

    #[test]
    fn clustering_is_order_independent() {
        let w = |a: f64, b: f64| WeightVector::from_slice(&[a, b]).unwrap();
        let ws = vec![
            w(1.0, 2.0),
            w(0.0, 0.0),
            w(1.0 + 1e-6, 2.0),
            w(0.0, 1e-7),
            w(5.0, 5.0),
        ];
        let (n, ids) = cluster_optima(&ws);
        assert_eq!(n, 3);
        assert_eq!(ids, vec![1, 0, 1, 0, 2]);
        let mut rev = ws.clone();
        rev.reverse();
        let (n2, ids2) = cluster_optima(&rev);
        assert_eq!(n2, 3);
        assert_eq!(ids2, vec![2, 0, 1, 0, 1]);
        assert_eq!(cluster_optima(&[]).0, 0);
    }

    #[test]
    fn basin_from_fixed_point_stays_put() {
        let g = generate(&SyntheticSpec {
            unlabeled_total: 40,
            ..SyntheticSpec::two_cluster_1d(4)
        })
        .unwrap();
        let p = Penalty::new(0.0);
        let fit = fit_hard(
            &g.dataset,
            p,
            ClassEncoding::default(),
            &SolverConfig::default(),
        )
        .unwrap();
        let study = run_basin_study(
            &g.dataset,
            p,
            Method::Hard,
            std::slice::from_ref(&fit.weights),
            None,
            &SolverConfig::default(),
        )
        .unwrap();
        let rec = &study.records[0];
        let out = rec.outcome.as_ref().unwrap();
        assert!(out.path.len() <= 2);
        assert_eq!(out.final_weights, fit.weights);
        assert!(study.supervised_start_record().supervised);
        assert!(run_basin_study(
            &g.dataset,
            p,
            Method::Oracle,
            &[fit.weights],
            None,
            &SolverConfig::default()
        )
        .is_err());
    }

    #[test]
    fn local_optima_restart_counts() {
        let pool = generate(&SyntheticSpec {
            unlabeled_total: 60,
            ..SyntheticSpec::two_gaussian_2d(8)
        })
        .unwrap()
        .into_pool();
        let cfg = LocalOptimaConfig {
            restarts: 1,
            ..LocalOptimaConfig::new(3)
        };
        let rep = run_local_optima_study(&[("g".into(), pool)], &cfg).unwrap();
        let rec = &rep.records[0];
        assert!(rec.warning.is_none());
        assert_eq!(rec.soft.as_ref().unwrap().random_starts.len(), 1);
        assert_eq!(rec.hard.as_ref().unwrap().random_starts.len(), 1);
    }

    #[test]
    fn local_optima_skips_degenerate() {
        let pool = pool_with(3, &[0.0, 1.0, 1.0], &[0.0, 1.0, 2.0]);
        let rep =
            run_local_optima_study(&[("tiny".into(), pool)], &LocalOptimaConfig::new(1)).unwrap();
        assert!(rep.records[0].warning.is_some());
    }

    #[test]
    fn learning_curve_zero_unlabeled_cell_coincides() {
        let pool = generate(&SyntheticSpec {
            unlabeled_total: 80,
            ..SyntheticSpec::two_gaussian_2d(6)
        })
        .unwrap()
        .into_pool();
        let cfg = LearningCurveConfig {
            unlabeled_values: vec![0, 4],
            repeats: 3,
            ..LearningCurveConfig::new(10, 2)
        };
        let rep = run_learning_curve(&pool, &cfg).unwrap();
        assert_eq!(rep.cells.len(), 3 * 2 * 4);
        assert_eq!(rep.aggregates.len(), 2 * 4);
        for r in 0..3 {
            let errs: Vec<_> = rep
                .cells
                .iter()
                .filter(|c| c.repeat == r && c.unlabeled == 0)
                .map(|c| c.error)
                .collect();
            assert!(errs.windows(2).all(|p| p[0] == p[1]), "{errs:?}");
            let hashes: Vec<_> = rep
                .cells
                .iter()
                .filter(|c| c.repeat == r && c.unlabeled == 4)
                .map(|c| c.partition_hash)
                .collect();
            assert!(hashes.windows(2).all(|p| p[0] == p[1]));
        }
    }

    #[test]
    fn learning_curve_input_checks() {
        let pool = pool_with(4, &[0.0, 1.0, 0.0, 1.0], &[-1.0, 1.0, -2.0, 2.0]);
        assert!(run_learning_curve(&pool, &LearningCurveConfig::new(2, 1)).is_err());
        let cfg = LearningCurveConfig {
            unlabeled_values: vec![2],
            ..LearningCurveConfig::new(3, 1)
        };
        assert!(matches!(
            run_learning_curve(&pool, &cfg),
            Err(Error::Capacity(_))
        ));
        let cfg = LearningCurveConfig {
            unlabeled_values: vec![1],
            repeats: 2,
            ..LearningCurveConfig::new(3, 1)
        };
        let rep = run_learning_curve(&pool, &cfg).unwrap();
        assert!(rep
            .cells
            .iter()
            .all(|c| c.error.is_none() && c.status == "empty_test"));
        assert!(rep
            .aggregates
            .iter()
            .all(|a| a.mean_error.is_none() && a.count == 0));
    }
}
