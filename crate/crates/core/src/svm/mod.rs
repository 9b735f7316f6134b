//! Kernel support-vector classification with per-sample box bounds.

mod kernel;
mod smo;

pub use kernel::Kernel;

use crate::data::{check_weights, ClassLabels, DataMatrix};
use crate::error::{Error, Result};
use smo::{SmoProblem, SmoSolution};

#[derive(Debug, Clone, PartialEq)]
pub struct SvcParams {
    pub c: f64,
    pub kernel: Kernel,
    /// Maximal allowed KKT violation at termination.
    pub tol: f64,
    /// Budget in passes of `n_samples` pair updates each; `None` means
    /// `10·n_samples` passes.
    pub max_passes: Option<usize>,
    pub cache_rows: usize,
}

impl Default for SvcParams {
    fn default() -> Self {
        SvcParams { c: 1.0, kernel: Kernel::Rbf { gamma: 1.0 }, tol: 1e-3, max_passes: None, cache_rows: 200 }
    }
}

impl SvcParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |name: &str, reason: &str| Error::InvalidParam { name: name.into(), reason: reason.into() };
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(bad("c", "must be positive"));
        }
        if let Some(g) = self.kernel.gamma() {
            if !(g > 0.0 && g.is_finite()) {
                return Err(bad("gamma", "must be positive"));
            }
        }
        if !(self.tol > 0.0) {
            return Err(bad("tol", "must be positive"));
        }
        Ok(())
    }
}

/// Binary SVC. Label `+1` is the positive side of the decision function.
#[derive(Debug, Clone, PartialEq)]
pub struct SvcModel {
    pub kernel: Kernel,
    /// Indices into the training set of samples with `αᵢ > 0`.
    pub support_indices: Vec<usize>,
    /// Row-major copies of the support vectors.
    support_vectors: Vec<f64>,
    /// `αᵢyᵢ` per support vector.
    pub dual_coefs: Vec<f64>,
    pub bias: f64,
    pub n_features: usize,
    /// Dual variables for every training sample.
    pub alpha: Vec<f64>,
    /// Box bound `Cᵢ` for every training sample.
    pub upper: Vec<f64>,
    pub dual_objective: f64,
    pub n_iter: usize,
}

impl SvcModel {
    pub fn support_vector(&self, k: usize) -> &[f64] {
        &self.support_vectors[k * self.n_features..(k + 1) * self.n_features]
    }

    pub fn decision_row(&self, row: &[f64]) -> f64 {
        let mut f = self.bias;
        for (k, coef) in self.dual_coefs.iter().enumerate() {
            f += coef * self.kernel.eval(self.support_vector(k), row);
        }
        f
    }

    /// Primal weights `w = Σ αⱼyⱼxⱼ`; only meaningful for the linear kernel.
    pub fn linear_weights(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.n_features];
        for (k, coef) in self.dual_coefs.iter().enumerate() {
            crate::linalg::axpy(*coef, self.support_vector(k), &mut w);
        }
        w
    }
}

/// Fits a binary SVC. `y` holds ±1 labels; `sample_weight` scales the box
/// bound of each sample (`Cᵢ = c·wᵢ`).
pub fn svc_fit(params: &SvcParams, x: &DataMatrix, y: &[f64], sample_weight: Option<&[f64]>) -> Result<SvcModel> {
    params.validate()?;
    let n = x.n_samples();
    if y.len() != n {
        return Err(Error::ShapeMismatch(format!("{} labels for {n} samples", y.len())));
    }
    if let Some(bad) = y.iter().find(|&&v| v != 1.0 && v != -1.0) {
        return Err(Error::InvalidTarget(format!("binary SVC expects ±1 labels, got {bad}")));
    }
    if let Some(w) = sample_weight {
        check_weights(w, n)?;
    }
    let upper: Vec<f64> = (0..n).map(|i| params.c * sample_weight.map_or(1.0, |w| w[i])).collect();
    let has = |s: f64| (0..n).any(|i| y[i] == s && upper[i] > 0.0);
    if !has(1.0) || !has(-1.0) {
        return Err(Error::SingleClass);
    }
    let max_iter = params.max_passes.unwrap_or(10 * n).saturating_mul(n).max(1);
    let SmoSolution { alpha, bias, iterations, dual_objective } = smo::solve(&SmoProblem {
        x,
        y,
        upper: &upper,
        kernel: params.kernel,
        tol: params.tol,
        max_iter,
        cache_rows: params.cache_rows,
    })?;

    let support_indices: Vec<usize> = (0..n).filter(|&i| alpha[i] > 0.0).collect();
    let mut support_vectors = Vec::with_capacity(support_indices.len() * x.n_features());
    for &i in &support_indices {
        support_vectors.extend_from_slice(x.row(i));
    }
    let dual_coefs = support_indices.iter().map(|&i| alpha[i] * y[i]).collect();
    Ok(SvcModel {
        kernel: params.kernel,
        support_indices,
        support_vectors,
        dual_coefs,
        bias,
        n_features: x.n_features(),
        alpha,
        upper,
        dual_objective,
        n_iter: iterations,
    })
}

/// Signed decision values `Σⱼ αⱼyⱼ K(xⱼ, x) + b`. An empty query yields an
/// empty vector.
pub fn svc_decision(model: &SvcModel, x: &[&[f64]]) -> Result<Vec<f64>> {
    x.iter()
        .map(|row| {
            if row.len() != model.n_features {
                return Err(Error::ShapeMismatch(format!(
                    "expected {} features, got {}",
                    model.n_features,
                    row.len()
                )));
            }
            Ok(model.decision_row(row))
        })
        .collect()
}

pub fn svc_decision_matrix(model: &SvcModel, x: &DataMatrix) -> Result<Vec<f64>> {
    x.check_width(model.n_features)?;
    Ok(x.rows().map(|r| model.decision_row(r)).collect())
}

/// One-vs-one ensemble over the classes present at fit time.
#[derive(Debug, Clone, PartialEq)]
pub struct OvoSvc {
    pub classes: Vec<String>,
    /// `(negative class code, positive class code, model)`, lexicographic in codes.
    pub pairs: Vec<(usize, usize, SvcModel)>,
}

/// Fits `K(K−1)/2` binary models over the present classes. For the pair
/// `(a, b)` with `a < b`, class `b` is the positive side.
pub fn multiclass_svc_fit(
    params: &SvcParams,
    x: &DataMatrix,
    y: &ClassLabels,
    sample_weight: Option<&[f64]>,
) -> Result<OvoSvc> {
    if y.len() != x.n_samples() {
        return Err(Error::ShapeMismatch(format!("{} labels for {} samples", y.len(), x.n_samples())));
    }
    if let Some(w) = sample_weight {
        check_weights(w, x.n_samples())?;
    }
    let present = y.present_codes();
    if present.len() < 2 {
        return Err(Error::SingleClass);
    }
    let mut pairs = Vec::with_capacity(present.len() * (present.len() - 1) / 2);
    for (ai, &a) in present.iter().enumerate() {
        for &b in &present[ai + 1..] {
            let rows: Vec<usize> = (0..y.len()).filter(|&i| y.codes()[i] == a || y.codes()[i] == b).collect();
            let sub_x = x.select_rows(&rows)?;
            let sub_y: Vec<f64> = rows.iter().map(|&i| if y.codes()[i] == b { 1.0 } else { -1.0 }).collect();
            let sub_w: Option<Vec<f64>> = sample_weight.map(|w| rows.iter().map(|&i| w[i]).collect());
            let mut model = svc_fit(params, &sub_x, &sub_y, sub_w.as_deref())?;
            model.support_indices.iter_mut().for_each(|s| *s = rows[*s]);
            pairs.push((a, b, model));
        }
    }
    Ok(OvoSvc { classes: y.classes().to_vec(), pairs })
}

impl OvoSvc {
    pub fn n_features(&self) -> usize {
        self.pairs[0].2.n_features
    }

    /// Class code per row.
    pub fn predict_codes(&self, x: &DataMatrix) -> Result<Vec<usize>> {
        x.check_width(self.n_features())?;
        Ok(x
            .rows()
            .map(|row| {
                let decisions: Vec<(usize, usize, f64)> =
                    self.pairs.iter().map(|(a, b, m)| (*a, *b, m.decision_row(row))).collect();
                ovo_vote(self.classes.len(), &decisions)
            })
            .collect())
    }
}

/// One-vs-one vote. A positive decision votes for the pair's second class,
/// otherwise the first. Vote ties go to the class with the larger summed
/// |decision| over the pairs it won, then to the lowest class code.
pub(crate) fn ovo_vote(n_classes: usize, decisions: &[(usize, usize, f64)]) -> usize {
    let mut votes = vec![0usize; n_classes];
    let mut confidence = vec![0.0; n_classes];
    for &(a, b, f) in decisions {
        let winner = if f > 0.0 { b } else { a };
        votes[winner] += 1;
        confidence[winner] += f.abs();
    }
    let mut best = 0;
    for c in 1..n_classes {
        if votes[c] > votes[best] || (votes[c] == votes[best] && confidence[c] > confidence[best]) {
            best = c;
        }
    }
    best
}

#[cfg(test)]
mod tests;
