//! Convexity diagnostics and brute-force oracles.
//!
//! Hessians are taken jointly in `(w, imputed)`, so they are
//! `(d + U) x (d + U)`:
//!
//! ```text
//! label-based:           [ 2 X_e^T X_e + 2 Lambda   -2 X_u^T ]
//!                        [ -2 X_u                    2 I     ]
//!
//! responsibility-based:  [ 2 X_e^T X_e + 2 Lambda   -2 (m - n) X_u^T ]
//!                        [ -2 (m - n) X_u            0               ]
//! ```
//!
//! The label-based objective is a squared norm of an affine map of
//! `(w, u)`, so its Hessian is positive semi-definite:
//! `z^T H z = 2 ||X z_1||^2 + 2 ||X_u z_1 - z_2||^2 + 2 z_1^T Lambda z_1`.
//! The responsibility-based Hessian has a zero diagonal block with a
//! nonzero off-diagonal block, which makes it indefinite whenever `X_u != 0`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{
    label_objective, responsibility_objective, supervised_objective, ClassEncoding, Dataset,
    Penalty, Responsibilities, RidgeFactor, SoftLabels, WeightVector,
};
use crate::selflearn::{fit_supervised, update_weights};

/// Largest unlabeled count accepted by [`brute_force_hard_minimum`].
pub const MAX_ENUMERATION_UNLABELED: usize = 20;
/// Largest unlabeled count accepted by [`grid_soft_minimum`].
pub const MAX_GRID_UNLABELED: usize = 3;
const SYMMETRY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HessianKind {
    LabelBased,
    ResponsibilityBased,
}

impl HessianKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            HessianKind::LabelBased => "label_based",
            HessianKind::ResponsibilityBased => "responsibility_based",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HessianBlock {
    pub matrix: DMatrix<f64>,
    pub kind: HessianKind,
    /// Number of weight coordinates; the remaining rows belong to the
    /// unlabeled block.
    pub dim: usize,
}

/// Direction `[z1; z2]` along which the Hessian's quadratic form is negative.
#[derive(Debug, Clone, PartialEq)]
pub struct NonconvexityWitness {
    pub z1: DVector<f64>,
    pub z2: DVector<f64>,
    pub quadratic_form_value: f64,
}

pub fn build_hessian(
    data: &Dataset,
    kind: HessianKind,
    encoding: ClassEncoding,
    penalty: impl Into<Penalty>,
) -> Result<HessianBlock> {
    let penalty = penalty.into();
    let (d, u) = (data.dim(), data.n_unlabeled());
    if u == 0 {
        return Err(Error::Degenerate(
            "Hessian in (w, imputed) needs at least one unlabeled object".into(),
        ));
    }
    let xe = data.extended_features();
    let xu = data.unlabeled_features();

    let mut h = DMatrix::zeros(d + u, d + u);
    let mut top = xe.tr_mul(&xe) * 2.0;
    for j in 0..d {
        top[(j, j)] += 2.0 * penalty.coefficient(j);
    }
    h.view_mut((0, 0), (d, d)).copy_from(&top);

    let (cross_scale, bottom_diag) = match kind {
        HessianKind::LabelBased => (-2.0, 2.0),
        HessianKind::ResponsibilityBased => (-2.0 * encoding.gap(), 0.0),
    };
    let cross = xu * cross_scale;
    h.view_mut((d, 0), (u, d)).copy_from(&cross);
    h.view_mut((0, d), (d, u)).copy_from(&cross.transpose());
    for i in 0..u {
        h[(d + i, d + i)] = bottom_diag;
    }
    Ok(HessianBlock {
        matrix: h,
        kind,
        dim: d,
    })
}

fn check_symmetric(h: &DMatrix<f64>) -> Result<()> {
    if !h.is_square() {
        return Err(Error::InvalidInput("matrix is not square".into()));
    }
    let asym = (h - h.transpose()).amax();
    if asym > SYMMETRY_TOLERANCE {
        return Err(Error::InvalidInput(format!(
            "matrix is not symmetric (max asymmetry {asym:e})"
        )));
    }
    Ok(())
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(h: &DMatrix<f64>) -> Result<f64> {
    check_symmetric(h)?;
    if h.is_empty() {
        return Ok(0.0);
    }
    Ok(h.clone().symmetric_eigenvalues().min())
}

/// `1e-8 * ||H||_F`.
pub fn default_psd_tolerance(h: &DMatrix<f64>) -> f64 {
    1e-8 * h.norm()
}

pub fn is_psd(h: &DMatrix<f64>, tolerance: f64) -> Result<bool> {
    Ok(min_eigenvalue(h)? >= -tolerance)
}

fn quadratic_form(h: &DMatrix<f64>, z: &DVector<f64>) -> f64 {
    z.dot(&(h * z))
}

/// Finds a direction of negative curvature of the requested Hessian.
///
/// For the responsibility-based Hessian the direction is built in closed
/// form: `z1` is the unlabeled row of largest norm (so `X_u z1 != 0`) and
/// `z2 = c X_u z1` with `c` twice the value that zeroes the quadratic form.
/// Otherwise the eigenvector of the most negative eigenvalue is used.
pub fn find_witness(
    data: &Dataset,
    kind: HessianKind,
    encoding: ClassEncoding,
    penalty: impl Into<Penalty>,
) -> Result<NonconvexityWitness> {
    let penalty = penalty.into();
    let xu = data.unlabeled_features();
    if xu.iter().all(|&v| v == 0.0) {
        return Err(Error::NoWitness("unlabeled design matrix is zero".into()));
    }
    let hessian = build_hessian(data, kind, encoding, penalty)?;
    let d = hessian.dim;
    let h = &hessian.matrix;

    let (z1, z2) = match kind {
        HessianKind::ResponsibilityBased => {
            let row = (0..xu.nrows())
                .max_by(|&a, &b| xu.row(a).norm().total_cmp(&xu.row(b).norm()))
                .expect("nonzero matrix has rows");
            let z1: DVector<f64> = xu.row(row).transpose();
            let xz = xu * &z1;
            let curvature = z1.dot(&(h.view((0, 0), (d, d)) * &z1));
            // form = curvature - 4 (m - n) c ||X_u z1||^2
            let threshold = curvature / (4.0 * encoding.gap() * xz.norm_squared());
            let c = 2.0 * threshold;
            (z1, xz * c)
        }
        HessianKind::LabelBased => {
            let eig = h.clone().symmetric_eigen();
            let (idx, &lowest) = eig
                .eigenvalues
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .expect("nonempty Hessian");
            if lowest >= -default_psd_tolerance(h) {
                return Err(Error::NoWitness(format!(
                    "{} Hessian is positive semi-definite (smallest eigenvalue {lowest:e})",
                    kind.as_str()
                )));
            }
            let z = eig.eigenvectors.column(idx).into_owned();
            (
                z.rows(0, d).into_owned(),
                z.rows(d, z.len() - d).into_owned(),
            )
        }
    };

    let mut z = DVector::zeros(h.nrows());
    z.rows_mut(0, d).copy_from(&z1);
    z.rows_mut(d, z2.len()).copy_from(&z2);
    let value = quadratic_form(h, &z);
    if value < 0.0 {
        Ok(NonconvexityWitness {
            z1,
            z2,
            quadratic_form_value: value,
        })
    } else {
        Err(Error::NoWitness(format!(
            "constructed direction has nonnegative curvature {value:e}"
        )))
    }
}

/// Global minimum of the responsibility-based objective over binary labelings.
#[derive(Debug, Clone, PartialEq)]
pub struct HardMinimum {
    pub labels: DVector<f64>,
    pub weights: WeightVector,
    pub objective: f64,
}

/// Enumerates all `2^U` binary labelings, refits the weights for each and
/// returns the one with the smallest objective. Ties go to the
/// lexicographically smallest labeling.
pub fn brute_force_hard_minimum(
    data: &Dataset,
    penalty: impl Into<Penalty>,
    encoding: ClassEncoding,
) -> Result<HardMinimum> {
    let penalty = penalty.into();
    let u = data.n_unlabeled();
    if u > MAX_ENUMERATION_UNLABELED {
        return Err(Error::Capacity(format!(
            "enumeration over {u} unlabeled objects exceeds the limit of {MAX_ENUMERATION_UNLABELED}"
        )));
    }
    if u == 0 {
        let weights = fit_supervised(data, penalty)?;
        let objective = supervised_objective(data, &weights, penalty)?;
        return Ok(HardMinimum {
            labels: DVector::zeros(0),
            weights,
            objective,
        });
    }

    let factor = RidgeFactor::new(&data.extended_features(), penalty)?;
    let l = data.n_labeled();
    let map = factor.map();
    let (m, n) = (encoding.positive(), encoding.negative());
    let p_u = map.columns(l, u);
    let base: DVector<f64> = map.columns(0, l) * data.labels() + p_u * DVector::from_element(u, n);
    let steps: Vec<DVector<f64>> = (0..u).map(|i| p_u.column(i) * (m - n)).collect();
    let xu = data.unlabeled_features();

    let labeling = |index: u64| -> DVector<f64> {
        DVector::from_fn(u, |i, _| ((index >> (u - 1 - i)) & 1) as f64)
    };
    let evaluate = |index: u64| -> (f64, u64) {
        let q = labeling(index);
        let mut w = base.clone();
        for (i, step) in steps.iter().enumerate() {
            if q[i] == 1.0 {
                w += step;
            }
        }
        let w = WeightVector::new(w).expect("finite");
        let su = xu * w.as_vector();
        let unlabeled: f64 = su
            .iter()
            .zip(q.iter())
            .map(|(s, q)| q * (s - m).powi(2) + (1.0 - q) * (s - n).powi(2))
            .sum();
        let labeled = supervised_objective(data, &w, penalty).expect("dimensions agree");
        (labeled + unlabeled, index)
    };

    // (objective, index) is totally ordered, so the reduction is independent
    // of how rayon splits the range.
    let (_, best) = (0..1u64 << u).into_par_iter().map(evaluate).reduce(
        || (f64::INFINITY, u64::MAX),
        |a, b| if (b.0, b.1) < (a.0, a.1) { b } else { a },
    );

    let labels = labeling(best);
    let targets = labels.map(|q| q * (m - n) + n);
    let weights = update_weights(data, &targets, penalty)?;
    let q = Responsibilities::new(labels.clone())?;
    let objective = responsibility_objective(data, &weights, &q, encoding, penalty)?;
    Ok(HardMinimum {
        labels,
        weights,
        objective,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SoftGridMinimum {
    pub labels: DVector<f64>,
    pub weights: WeightVector,
    pub objective: f64,
}

/// Grid values `{0, step, 2 step, ..., 1}`; 1 is always included.
pub fn unit_grid(step: f64) -> Vec<f64> {
    let inv = 1.0 / step;
    let n = inv.round();
    if (inv - n).abs() < 1e-9 {
        let n = n as usize;
        (0..=n).map(|i| i as f64 / n as f64).collect()
    } else {
        let mut pts: Vec<f64> = (0..)
            .map(|i| i as f64 * step)
            .take_while(|&x| x < 1.0)
            .collect();
        pts.push(1.0);
        pts
    }
}

/// Exhaustive search of the label-based objective over a grid of soft
/// labels, refitting the weights at every grid point.
pub fn grid_soft_minimum(
    data: &Dataset,
    penalty: impl Into<Penalty>,
    step: f64,
) -> Result<SoftGridMinimum> {
    let penalty = penalty.into();
    let u = data.n_unlabeled();
    if u > MAX_GRID_UNLABELED {
        return Err(Error::Capacity(format!(
            "grid search over {u} unlabeled objects exceeds the limit of {MAX_GRID_UNLABELED}"
        )));
    }
    if !(step > 0.0 && step <= 0.5) {
        return Err(Error::InvalidInput(format!(
            "grid step must lie in (0, 0.5], got {step}"
        )));
    }
    let grid = unit_grid(step);
    let factor = RidgeFactor::new(&data.extended_features(), penalty)?;
    let total = grid.len().pow(u as u32);

    let mut best: Option<SoftGridMinimum> = None;
    for index in 0..total {
        let mut rest = index;
        let labels = DVector::from_fn(u, |_, _| {
            let v = grid[rest % grid.len()];
            rest /= grid.len();
            v
        });
        let weights = factor.solve(&data.extended_targets(&labels)?)?;
        let objective =
            label_objective(data, &weights, &SoftLabels::new(labels.clone())?, penalty)?;
        if best.as_ref().is_none_or(|b| objective < b.objective) {
            best = Some(SoftGridMinimum {
                labels,
                weights,
                objective,
            });
        }
    }
    Ok(best.expect("grid is nonempty"))
}

/// Upper bound on how far the best grid point can sit above the continuous
/// soft-label minimum.
///
/// After minimizing out `w`, the objective is a convex quadratic in `u` with
/// Hessian `2 M_uu`, where `M = I - X_e (X_e^T X_e + Lambda)^+ X_e^T`. At the
/// constrained minimum the gradient vanishes in interior coordinates and
/// boundary coordinates sit on grid points, so rounding to the nearest grid
/// point costs at most `lambda_max(M_uu) * U * (step / 2)^2`.
pub fn grid_resolution_slack(
    data: &Dataset,
    penalty: impl Into<Penalty>,
    step: f64,
) -> Result<f64> {
    let u = data.n_unlabeled();
    if u == 0 {
        return Ok(0.0);
    }
    let xe = data.extended_features();
    let factor = RidgeFactor::new(&xe, penalty)?;
    let hat = &xe * factor.map();
    let l = data.n_labeled();
    let m_uu = DMatrix::identity(u, u) - hat.view((l, l), (u, u));
    let sym = (&m_uu + m_uu.transpose()) * 0.5;
    let kappa = sym.symmetric_eigenvalues().max().max(0.0);
    Ok(kappa * u as f64 * (step / 2.0).powi(2))
}
