//! Subcommand implementations.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use sslsq_core::datagen::{generate, load_csv, write_csv, CsvSchema, LabeledPool, LoadedData};
use sslsq_core::diagnostics::{
    brute_force_hard_minimum, build_hessian, default_psd_tolerance, find_witness, is_psd,
    min_eigenvalue, HessianKind, MAX_ENUMERATION_UNLABELED,
};
use sslsq_core::experiments::{
    evaluate_error, random_init_near_supervised, run_basin_study, run_learning_curve,
    run_local_optima_study, LearningCurveConfig, LocalOptimaConfig, Method,
};
use sslsq_core::model::{label_objective, supervised_objective};
use sslsq_core::{
    fit_hard, fit_oracle, fit_soft, fit_supervised, ClassEncoding, Dataset, Error, Penalty,
    SoftLabels, SolverConfig, SyntheticKind, SyntheticSpec, WeightVector,
};

use clap::ValueEnum;

use crate::args::*;
use crate::report::{aggregate_path, indexed, num, opt_num, Manifest, Table};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) | CliError::Core(Error::Io(_)) => 6,
            CliError::Core(e) => match e {
                Error::Parse { .. } | Error::Schema(_) | Error::Csv(_) => 3,
                Error::Capacity(_) => 4,
                Error::Numerical(_) | Error::Degenerate(_) => 5,
                Error::InvalidInput(_) | Error::Dimension { .. } => 7,
                _ => 1,
            },
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn schema(input: &InputArgs) -> CsvSchema {
    CsvSchema {
        label_column: input.label_column.clone(),
        missing_label_token: input.missing_token.clone(),
        ..CsvSchema::default()
    }
}

fn load(path: &Path, input: &InputArgs) -> CliResult<LoadedData> {
    load_csv(path, &schema(input), !input.no_intercept).map_err(|e| match e {
        Error::Io(e) => io::Error::new(e.kind(), format!("{}: {e}", path.display())).into(),
        other => other.into(),
    })
}

fn load_pool(path: &Path, input: &InputArgs) -> CliResult<LabeledPool> {
    load(path, input)?.into_pool().ok_or_else(|| {
        Error::Schema(format!(
            "{}: every row needs a label or a true_label value",
            path.display()
        ))
        .into()
    })
}

fn solver(args: &SolverArgs) -> SolverConfig {
    SolverConfig {
        max_iterations: args.max_iterations,
        objective_tolerance: args.tolerance,
        ..SolverConfig::default()
    }
}

fn record_input(m: &mut Manifest, input: &InputArgs, solver: Option<&SolverArgs>) {
    m.param("intercept", !input.no_intercept)
        .param("label_column", &input.label_column)
        .param("missing_token", &input.missing_token);
    if let Some(s) = solver {
        m.param("max_iterations", s.max_iterations)
            .param("tolerance", num(s.tolerance));
    }
}

fn weights_fields(w: &WeightVector) -> impl Iterator<Item = String> + '_ {
    w.as_slice().iter().map(|&x| num(x))
}

pub fn generate_cmd(args: &GenerateArgs) -> CliResult<()> {
    let mut spec = match args.kind {
        Kind::TwoCluster1d => SyntheticSpec::two_cluster_1d(args.seed),
        Kind::TwoGaussian2d => SyntheticSpec::two_gaussian_2d(args.seed),
        Kind::Custom => SyntheticSpec {
            kind: SyntheticKind::Custom {
                dimension: args.dimension,
            },
            ..SyntheticSpec::two_gaussian_2d(args.seed)
        },
    };
    if let Some(v) = args.labeled_per_class {
        spec.labeled_per_class = v;
    }
    if let Some(v) = args.unlabeled {
        spec.unlabeled_total = v;
    }
    if let Some(v) = args.separation {
        spec.class_separation = v;
    }
    if let Some(v) = args.noise_sd {
        spec.noise_sd = v;
    }
    let data = generate(&spec)?;
    match &args.out {
        None => {
            let stdout = io::stdout();
            write_csv(stdout.lock(), &data.dataset, Some(&data.unlabeled_truth))?;
        }
        Some(out) => {
            let mut file = BufWriter::new(File::create(out)?);
            write_csv(&mut file, &data.dataset, Some(&data.unlabeled_truth))?;
            file.flush()?;
            let mut m = Manifest::new("generate", Some(args.seed));
            m.param(
                "kind",
                args.kind.to_possible_value().expect("named").get_name(),
            )
            .param("dimension", spec.kind.dimension())
            .param("labeled_per_class", spec.labeled_per_class)
            .param("unlabeled", spec.unlabeled_total)
            .param("separation", num(spec.class_separation))
            .param("noise_sd", num(spec.noise_sd))
            .output(out);
            m.write_beside(out)?;
        }
    }
    Ok(())
}

pub fn fit_cmd(args: &FitArgs) -> CliResult<()> {
    let loaded = load(&args.data, &args.input)?;
    let data = &loaded.dataset;
    let penalty = Penalty::new(args.lambda);
    let cfg = solver(&args.solver);

    // (weights, objective, iterations, stop reason, converged, trace rows)
    type Trace = Vec<(usize, f64, WeightVector)>;
    let (w, objective, iterations, stop, converged, trace): (_, _, _, _, _, Trace) =
        match args.method {
            FitMethod::Supervised => {
                let w = fit_supervised(data, penalty)?;
                let j = supervised_objective(data, &w, penalty)?;
                (
                    w.clone(),
                    j,
                    1,
                    "closed_form".to_string(),
                    true,
                    vec![(0, j, w)],
                )
            }
            FitMethod::Oracle => {
                let truth = loaded.ground_truth.as_ref().ok_or_else(|| {
                    Error::InvalidInput(
                        "oracle needs a true_label value for every unlabeled row".into(),
                    )
                })?;
                let w = fit_oracle(data, truth, penalty)?;
                let j = label_objective(data, &w, &SoftLabels::new(truth.clone())?, penalty)?;
                (
                    w.clone(),
                    j,
                    1,
                    "closed_form".to_string(),
                    true,
                    vec![(0, j, w)],
                )
            }
            FitMethod::Soft | FitMethod::Hard => {
                let fit = if args.method == FitMethod::Soft {
                    fit_soft(data, penalty, &cfg)?
                } else {
                    fit_hard(data, penalty, ClassEncoding::default(), &cfg)?
                };
                let rows = fit
                    .trace
                    .records
                    .iter()
                    .map(|r| (r.iteration, r.objective, r.weights.clone()))
                    .collect();
                (
                    fit.weights,
                    fit.final_objective,
                    fit.iterations,
                    fit.trace.stop_reason.as_str().to_string(),
                    fit.trace.converged,
                    rows,
                )
            }
        };

    let test_error = match &args.test {
        Some(path) => Some(evaluate_error(&w, &load_pool(path, &args.input)?)?),
        None => None,
    };

    let method = format!("{:?}", args.method).to_lowercase();
    let mut out = io::stdout().lock();
    writeln!(out, "method={method}")?;
    writeln!(out, "final_objective={}", num(objective))?;
    writeln!(out, "iterations={iterations}")?;
    writeln!(out, "stop_reason={stop}")?;
    writeln!(out, "converged={converged}")?;
    for (i, x) in w.as_slice().iter().enumerate() {
        writeln!(out, "w_{i}={}", num(*x))?;
    }
    if let Some(e) = test_error {
        writeln!(out, "test_error={}", num(e))?;
    }

    if let Some(path) = &args.trace {
        let mut t = Table::create(
            path,
            ["iteration".to_string(), "objective".to_string()]
                .into_iter()
                .chain(indexed("w_", w.len())),
        )?;
        for (k, j, wk) in &trace {
            t.row(
                [k.to_string(), num(*j)]
                    .into_iter()
                    .chain(weights_fields(wk)),
            )?;
        }
        t.finish()?;
        let mut m = Manifest::new("fit", args.seed);
        m.param("method", &method).param("lambda", num(args.lambda));
        record_input(&mut m, &args.input, Some(&args.solver));
        m.input(&args.data)?;
        if let Some(p) = &args.test {
            m.input(p)?;
        }
        m.output(path).write_beside(path)?;
    }
    Ok(())
}

fn vec_field(v: &nalgebra::DVector<f64>) -> String {
    v.iter().map(|&x| num(x)).collect::<Vec<_>>().join(";")
}

pub fn diagnose_cmd(args: &DiagnoseArgs) -> CliResult<()> {
    let loaded = load(&args.data, &args.input)?;
    let data = &loaded.dataset;
    let penalty = Penalty::new(args.lambda);
    let enc = ClassEncoding::default();
    let mut lines: Vec<String> = vec![
        format!("n_labeled={}", data.n_labeled()),
        format!("n_unlabeled={}", data.n_unlabeled()),
        format!("dim={}", data.dim()),
    ];

    for kind in [HessianKind::LabelBased, HessianKind::ResponsibilityBased] {
        let key = kind.as_str();
        match build_hessian(data, kind, enc, penalty) {
            Err(e) => lines.push(format!("{key}.hessian=unavailable: {e}")),
            Ok(h) => {
                let tol = default_psd_tolerance(&h.matrix);
                let psd = is_psd(&h.matrix, tol)?;
                lines.push(format!("{key}.psd={psd}"));
                lines.push(format!(
                    "{key}.verdict={}",
                    if psd { "PSD" } else { "not PSD" }
                ));
                lines.push(format!(
                    "{key}.min_eigenvalue={}",
                    num(min_eigenvalue(&h.matrix)?)
                ));
            }
        }
        match find_witness(data, kind, enc, penalty) {
            Ok(wit) => {
                lines.push(format!(
                    "{key}.witness_value={}",
                    num(wit.quadratic_form_value)
                ));
                lines.push(format!("{key}.witness_z1={}", vec_field(&wit.z1)));
                lines.push(format!("{key}.witness_z2={}", vec_field(&wit.z2)));
            }
            Err(e) => lines.push(format!("{key}.witness=none: {e}")),
        }
    }

    if data.n_unlabeled() <= MAX_ENUMERATION_UNLABELED {
        let global = brute_force_hard_minimum(data, penalty, enc)?;
        let local = fit_hard(data, penalty, enc, &solver(&args.solver))?;
        lines.push(format!("hard.global_objective={}", num(global.objective)));
        lines.push(format!("hard.global_labels={}", vec_field(&global.labels)));
        lines.push(format!(
            "hard.local_objective={}",
            num(local.final_objective)
        ));
        lines.push(format!(
            "hard.gap={}",
            num(local.final_objective - global.objective)
        ));
    } else {
        lines.push(format!(
            "hard.global=skipped: {} unlabeled objects exceed the enumeration limit of {}",
            data.n_unlabeled(),
            MAX_ENUMERATION_UNLABELED
        ));
    }

    let text: String = lines.iter().map(|l| format!("{l}\n")).collect();
    io::stdout().lock().write_all(text.as_bytes())?;
    if let Some(out) = &args.out {
        std::fs::write(out, &text)?;
        let mut m = Manifest::new("diagnose", None);
        m.param("lambda", num(args.lambda));
        record_input(&mut m, &args.input, Some(&args.solver));
        m.input(&args.data)?.output(out).write_beside(out)?;
    }
    Ok(())
}

fn method_of(m: SelfLearningMethod) -> Method {
    match m {
        SelfLearningMethod::Soft => Method::Soft,
        SelfLearningMethod::Hard => Method::Hard,
    }
}

pub fn basin_cmd(args: &BasinArgs) -> CliResult<()> {
    let (data, truth): (Dataset, _) = match &args.data {
        Some(path) => {
            let l = load(path, &args.input)?;
            (l.dataset, l.ground_truth)
        }
        None => {
            let mut spec = SyntheticSpec::two_cluster_1d(args.seed);
            spec.intercept = !args.input.no_intercept;
            let g = generate(&spec)?;
            (g.dataset, Some(g.unlabeled_truth))
        }
    };
    let test = match (&args.test, truth) {
        (Some(path), _) => Some(load_pool(path, &args.input)?),
        (None, Some(t)) if data.n_unlabeled() > 0 => Some(LabeledPool::new(
            data.unlabeled_features().clone(),
            t,
            data.has_intercept(),
        )?),
        _ => None,
    };
    let penalty = Penalty::new(args.lambda);
    let method = method_of(args.method);
    let starts = random_init_near_supervised(&data, penalty, args.starts, args.scale, args.seed)?;
    let study = run_basin_study(
        &data,
        penalty,
        method,
        &starts,
        test.as_ref(),
        &solver(&args.solver),
    )?;
    let d = data.dim();

    let mut t = Table::create(
        &args.out,
        [
            "start_index",
            "start_kind",
            "status",
            "iterations",
            "stop_reason",
            "monotone",
            "final_objective",
            "test_error",
            "optimum_id",
        ]
        .into_iter()
        .map(String::from)
        .chain(indexed("w_init_", d))
        .chain(indexed("w_final_", d)),
    )?;
    for r in &study.records {
        let kind = if r.supervised { "supervised" } else { "random" };
        let mut fields = vec![r.start_index.to_string(), kind.to_string()];
        match &r.outcome {
            Ok(o) => fields.extend([
                "ok".to_string(),
                o.iterations.to_string(),
                o.stop_reason.as_str().to_string(),
                o.monotone.to_string(),
                num(o.final_objective),
                opt_num(o.test_error),
                r.optimum.map(|i| i.to_string()).unwrap_or_default(),
            ]),
            Err(e) => {
                fields.push(format!("error: {e}"));
                fields.extend(std::iter::repeat_n(String::new(), 6));
            }
        }
        fields.extend(weights_fields(&r.initial));
        match &r.outcome {
            Ok(o) => fields.extend(weights_fields(&o.final_weights)),
            Err(_) => fields.extend(std::iter::repeat_n(String::new(), d)),
        }
        t.row(fields)?;
    }
    t.finish()?;

    let agg_path = aggregate_path(&args.out, args.aggregate.as_deref());
    let mut a = Table::create(
        &agg_path,
        [
            "method",
            "optimum_id",
            "runs",
            "final_objective",
            "test_error",
        ]
        .into_iter()
        .map(String::from)
        .chain(indexed("w_", d)),
    )?;
    for id in 0..study.unique_optima_count {
        let members: Vec<_> = study
            .records
            .iter()
            .filter(|r| r.optimum == Some(id))
            .filter_map(|r| r.outcome.as_ref().ok())
            .collect();
        let first = members[0];
        a.row(
            [
                method.as_str().to_string(),
                id.to_string(),
                members.len().to_string(),
                num(first.final_objective),
                opt_num(first.test_error),
            ]
            .into_iter()
            .chain(weights_fields(&first.final_weights)),
        )?;
    }
    a.finish()?;

    if let Some(paths) = &args.paths {
        let mut p = Table::create(
            paths,
            ["start_index", "iteration", "objective"]
                .into_iter()
                .map(String::from)
                .chain(indexed("w_", d)),
        )?;
        for r in &study.records {
            if let Ok(o) = &r.outcome {
                for (k, j, w) in &o.path {
                    p.row(
                        [r.start_index.to_string(), k.to_string(), num(*j)]
                            .into_iter()
                            .chain(weights_fields(w)),
                    )?;
                }
            }
        }
        p.finish()?;
    }

    let mut m = Manifest::new("basin", Some(args.seed));
    m.param("method", method)
        .param("starts", args.starts)
        .param("scale", num(args.scale))
        .param("lambda", num(args.lambda))
        .param("unique_optima_count", study.unique_optima_count);
    record_input(&mut m, &args.input, Some(&args.solver));
    for p in args.data.iter().chain(args.test.iter()) {
        m.input(p)?;
    }
    m.output(&args.out).output(&agg_path);
    if let Some(p) = &args.paths {
        m.output(p);
    }
    m.write_beside(&args.out)?;
    println!("unique_optima_count={}", study.unique_optima_count);
    Ok(())
}

fn dataset_name(path: &Path) -> String {
    path.file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("dataset")
        .to_string()
}

pub fn local_optima_cmd(args: &LocalOptimaArgs) -> CliResult<()> {
    let datasets = args
        .data
        .iter()
        .map(|p| Ok((dataset_name(p), load_pool(p, &args.input)?)))
        .collect::<CliResult<Vec<_>>>()?;
    let cfg = LocalOptimaConfig {
        restarts: args.restarts,
        penalty: Penalty::new(args.lambda),
        test_fraction: args.test_fraction,
        unlabel_fraction: args.unlabel_fraction,
        init_scale: args.scale,
        seed: args.seed,
        solver: solver(&args.solver),
    };
    let report = run_local_optima_study(&datasets, &cfg)?;

    let mut t = Table::create(
        &args.out,
        [
            "dataset",
            "method",
            "start_kind",
            "start_index",
            "status",
            "test_error",
        ]
        .into_iter()
        .map(String::from),
    )?;
    let agg_path = aggregate_path(&args.out, args.aggregate.as_deref());
    let mut a = Table::create(
        &agg_path,
        [
            "dataset",
            "status",
            "partition_hash",
            "supervised_error",
            "method",
            "from_supervised_error",
            "random_mean_error",
            "random_min_error",
            "random_max_error",
            "unique_minima",
            "failed_runs",
        ]
        .into_iter()
        .map(String::from),
    )?;
    for rec in &report.records {
        if let Some(w) = &rec.warning {
            eprintln!("warning: skipping {}: {w}", rec.dataset);
            let status = format!("skipped: {w}");
            t.row([
                rec.dataset.clone(),
                String::new(),
                String::new(),
                String::new(),
                status.clone(),
                String::new(),
            ])?;
            a.row(
                [rec.dataset.clone(), status]
                    .into_iter()
                    .chain(std::iter::repeat_n(String::new(), 9)),
            )?;
            continue;
        }
        for (method, runs) in [(Method::Soft, &rec.soft), (Method::Hard, &rec.hard)] {
            let Some(runs) = runs else { continue };
            let status = |e: Option<f64>| if e.is_some() { "ok" } else { "failed" }.to_string();
            for (i, e) in runs.random_starts.iter().enumerate() {
                t.row([
                    rec.dataset.clone(),
                    method.to_string(),
                    "random".into(),
                    i.to_string(),
                    status(*e),
                    opt_num(*e),
                ])?;
            }
            t.row([
                rec.dataset.clone(),
                method.to_string(),
                "supervised".into(),
                runs.random_starts.len().to_string(),
                status(runs.from_supervised),
                opt_num(runs.from_supervised),
            ])?;
            let ok: Vec<f64> = runs.random_starts.iter().flatten().copied().collect();
            let mean = (!ok.is_empty()).then(|| ok.iter().sum::<f64>() / ok.len() as f64);
            let min = ok.iter().copied().reduce(f64::min);
            let max = ok.iter().copied().reduce(f64::max);
            a.row([
                rec.dataset.clone(),
                "ok".into(),
                format!("{:016x}", rec.partition_hash),
                opt_num(rec.supervised_error),
                method.to_string(),
                opt_num(runs.from_supervised),
                opt_num(mean),
                opt_num(min),
                opt_num(max),
                runs.unique_minima.to_string(),
                runs.failures.len().to_string(),
            ])?;
        }
    }
    t.finish()?;
    a.finish()?;

    let mut m = Manifest::new("local-optima", Some(args.seed));
    m.param("restarts", args.restarts)
        .param("lambda", num(args.lambda))
        .param("scale", num(args.scale))
        .param("test_fraction", num(args.test_fraction))
        .param("unlabel_fraction", num(args.unlabel_fraction));
    record_input(&mut m, &args.input, Some(&args.solver));
    for p in &args.data {
        m.input(p)?;
    }
    m.output(&args.out)
        .output(&agg_path)
        .write_beside(&args.out)?;
    Ok(())
}

pub fn learning_curve_cmd(args: &LearningCurveArgs) -> CliResult<()> {
    let pool = match &args.data {
        Some(path) => load_pool(path, &args.input)?,
        None => {
            let mut spec = SyntheticSpec::two_gaussian_2d(args.seed);
            spec.intercept = !args.input.no_intercept;
            generate(&spec)?.into_pool()
        }
    };
    let cfg = LearningCurveConfig {
        labeled: args.labeled,
        unlabeled_values: args.u_values.clone(),
        repeats: args.repeats,
        penalty: Penalty::new(args.lambda),
        seed: args.seed,
        solver: solver(&args.solver),
    };
    let report = run_learning_curve(&pool, &cfg)?;

    let mut t = Table::create(
        &args.out,
        [
            "repeat",
            "unlabeled",
            "method",
            "status",
            "error",
            "partition_hash",
        ]
        .into_iter()
        .map(String::from),
    )?;
    for c in &report.cells {
        t.row([
            c.repeat.to_string(),
            c.unlabeled.to_string(),
            c.method.to_string(),
            c.status.clone(),
            opt_num(c.error),
            format!("{:016x}", c.partition_hash),
        ])?;
    }
    t.finish()?;

    let agg_path = aggregate_path(&args.out, args.aggregate.as_deref());
    let mut a = Table::create(
        &agg_path,
        ["unlabeled", "method", "mean_error", "standard_error", "n"]
            .into_iter()
            .map(String::from),
    )?;
    for g in &report.aggregates {
        a.row([
            g.unlabeled.to_string(),
            g.method.to_string(),
            opt_num(g.mean_error),
            opt_num(g.standard_error),
            g.count.to_string(),
        ])?;
    }
    a.finish()?;

    let mut m = Manifest::new("learning-curve", Some(args.seed));
    m.param("labeled", args.labeled)
        .param(
            "u_values",
            args.u_values
                .iter()
                .map(|u| u.to_string())
                .collect::<Vec<_>>()
                .join(","),
        )
        .param("repeats", args.repeats)
        .param("lambda", num(args.lambda));
    record_input(&mut m, &args.input, Some(&args.solver));
    if let Some(p) = &args.data {
        m.input(p)?;
    }
    m.output(&args.out)
        .output(&agg_path)
        .write_beside(&args.out)?;
    Ok(())
}
