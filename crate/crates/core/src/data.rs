//! Dense input containers shared by every estimator.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};

/// Dense row-major `n_samples × n_features` matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    values: Array2<f64>,
}

impl DataMatrix {
    /// Validates shape and finiteness. The array is converted to standard
    /// (row-major, contiguous) layout if necessary.
    pub fn new(values: Array2<f64>) -> Result<Self> {
        let (n, p) = values.dim();
        if n == 0 || p == 0 {
            return Err(Error::Empty(format!("matrix shape is {n}×{p}")));
        }
        // `iter` walks in logical order regardless of memory layout
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: pos / p, col: pos % p });
        }
        let values = if values.is_standard_layout() {
            values
        } else {
            values.as_standard_layout().into_owned()
        };
        Ok(DataMatrix { values })
    }

    pub fn from_shape_vec(n_samples: usize, n_features: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n_samples * n_features {
            return Err(Error::ShapeMismatch(format!(
                "{} values cannot fill a {n_samples}×{n_features} matrix",
                data.len()
            )));
        }
        let values = Array2::from_shape_vec((n_samples, n_features), data)
            .map_err(|e| Error::ShapeMismatch(e.to_string()))?;
        Self::new(values)
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let p = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(n * p);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != p {
                return Err(Error::ShapeMismatch(format!(
                    "row {i} has {} entries, expected {p}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Self::from_shape_vec(n, p, data)
    }

    pub fn n_samples(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.values.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.values.dim()
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.values.view()
    }

    pub fn into_array(self) -> Array2<f64> {
        self.values
    }

    /// Contiguous row-major storage.
    pub fn as_slice(&self) -> &[f64] {
        self.values.as_slice().expect("standard layout")
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let p = self.n_features();
        &self.as_slice()[i * p..(i + 1) * p]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.as_slice().chunks_exact(self.n_features())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[[i, j]]
    }

    /// Column-major copy (`n_features` contiguous columns).
    pub fn to_column_major(&self) -> Vec<f64> {
        let (n, p) = self.shape();
        let src = self.as_slice();
        let mut out = vec![0.0; n * p];
        for i in 0..n {
            for j in 0..p {
                out[j * n + i] = src[i * p + j];
            }
        }
        out
    }

    /// Rows at `indices`, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Self> {
        let p = self.n_features();
        let mut data = Vec::with_capacity(indices.len() * p);
        for &i in indices {
            if i >= self.n_samples() {
                return Err(Error::ShapeMismatch(format!(
                    "row index {i} out of range for {} samples",
                    self.n_samples()
                )));
            }
            data.extend_from_slice(self.row(i));
        }
        Self::from_shape_vec(indices.len(), p, data)
    }

    pub fn column_means(&self) -> Vec<f64> {
        let n = self.n_samples() as f64;
        let mut means = vec![0.0; self.n_features()];
        for row in self.rows() {
            for (m, v) in means.iter_mut().zip(row) {
                *m += v;
            }
        }
        means.iter_mut().for_each(|m| *m /= n);
        means
    }

    pub(crate) fn check_width(&self, expected: usize) -> Result<()> {
        if self.n_features() != expected {
            return Err(Error::ShapeMismatch(format!(
                "expected {expected} features, got {}",
                self.n_features()
            )));
        }
        Ok(())
    }
}

/// Class labels encoded as `0..K` with the original identifiers kept alongside.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassLabels {
    classes: Vec<String>,
    codes: Vec<usize>,
}

impl ClassLabels {
    /// Encodes arbitrary identifiers. The alphabet is sorted numerically when
    /// every identifier parses as a number, lexicographically otherwise.
    pub fn from_ids<I, S>(ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: ToString,
    {
        let raw: Vec<String> = ids.into_iter().map(|s| s.to_string()).collect();
        let mut classes: Vec<String> = raw.clone();
        classes.sort_by(|a, b| compare_ids(a, b));
        classes.dedup();
        let lookup: BTreeMap<&str, usize> =
            classes.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
        let codes = raw.iter().map(|r| lookup[r.as_str()]).collect();
        ClassLabels { classes, codes }
    }

    /// Builds labels against a fixed alphabet.
    pub fn with_alphabet(classes: Vec<String>, codes: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = codes.iter().find(|&&c| c >= classes.len()) {
            return Err(Error::InvalidTarget(format!(
                "class code {bad} outside alphabet of size {}",
                classes.len()
            )));
        }
        Ok(ClassLabels { classes, codes })
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn codes(&self) -> &[usize] {
        &self.codes
    }

    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn id(&self, i: usize) -> &str {
        &self.classes[self.codes[i]]
    }

    /// Codes that actually occur, ascending.
    pub fn present_codes(&self) -> Vec<usize> {
        let mut seen = vec![false; self.classes.len()];
        for &c in &self.codes {
            seen[c] = true;
        }
        (0..self.classes.len()).filter(|&c| seen[c]).collect()
    }

    pub fn counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.classes.len()];
        for &c in &self.codes {
            counts[c] += 1;
        }
        counts
    }
}

fn compare_ids(a: &str, b: &str) -> Ordering {
    match (a.parse::<f64>(), b.parse::<f64>()) {
        (Ok(x), Ok(y)) => x.partial_cmp(&y).unwrap_or(Ordering::Equal).then_with(|| a.cmp(b)),
        _ => a.cmp(b),
    }
}

/// Targets for supervised estimators.
#[derive(Debug, Clone, PartialEq)]
pub enum LabelVector {
    Real(Vec<f64>),
    Classes(ClassLabels),
}

impl LabelVector {
    pub fn real(values: Vec<f64>) -> Self {
        LabelVector::Real(values)
    }

    pub fn classes<I, S>(ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: ToString,
    {
        LabelVector::Classes(ClassLabels::from_ids(ids))
    }

    pub fn len(&self) -> usize {
        match self {
            LabelVector::Real(v) => v.len(),
            LabelVector::Classes(c) => c.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.len()) {
            return Err(Error::ShapeMismatch(format!(
                "label index {bad} out of range for {} labels",
                self.len()
            )));
        }
        Ok(match self {
            LabelVector::Real(v) => LabelVector::Real(indices.iter().map(|&i| v[i]).collect()),
            LabelVector::Classes(c) => LabelVector::Classes(ClassLabels {
                classes: c.classes.clone(),
                codes: indices.iter().map(|&i| c.codes[i]).collect(),
            }),
        })
    }

    /// Real-valued view; class identifiers must parse as numbers.
    pub fn to_real(&self) -> Result<Vec<f64>> {
        match self {
            LabelVector::Real(v) => {
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(Error::InvalidTarget("non-finite regression target".into()));
                }
                Ok(v.clone())
            }
            LabelVector::Classes(c) => {
                let values: Vec<f64> = c
                    .classes
                    .iter()
                    .map(|id| {
                        id.parse::<f64>().map_err(|_| {
                            Error::InvalidTarget(format!("class `{id}` is not numeric"))
                        })
                    })
                    .collect::<Result<_>>()?;
                Ok(c.codes.iter().map(|&k| values[k]).collect())
            }
        }
    }

    /// Class view; real values are treated as identifiers.
    pub fn to_classes(&self) -> ClassLabels {
        match self {
            LabelVector::Classes(c) => c.clone(),
            LabelVector::Real(v) => ClassLabels::from_ids(v.iter()),
        }
    }

    pub(crate) fn check_len(&self, n_samples: usize) -> Result<()> {
        if self.len() != n_samples {
            return Err(Error::ShapeMismatch(format!(
                "{} labels for {n_samples} samples",
                self.len()
            )));
        }
        Ok(())
    }
}

pub(crate) fn check_weights(weights: &[f64], n_samples: usize) -> Result<()> {
    if weights.len() != n_samples {
        return Err(Error::ShapeMismatch(format!(
            "{} sample weights for {n_samples} samples",
            weights.len()
        )));
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::InvalidParam {
            name: "sample_weight".into(),
            reason: "weights must be finite and nonnegative".into(),
        });
    }
    if weights.iter().all(|&w| w == 0.0) {
        return Err(Error::InvalidParam {
            name: "sample_weight".into(),
            reason: "at least one weight must be positive".into(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn rejects_non_finite_and_empty() {
        let err = DataMatrix::new(array![[1.0, f64::NAN], [0.0, 1.0]]).unwrap_err();
        assert_eq!(err, Error::NonFinite { row: 0, col: 1 });
        let err = DataMatrix::new(array![[1.0], [f64::INFINITY]]).unwrap_err();
        assert_eq!(err, Error::NonFinite { row: 1, col: 0 });
        assert!(matches!(
            DataMatrix::new(Array2::zeros((0, 3))),
            Err(Error::Empty(_))
        ));
    }

    #[test]
    fn fortran_layout_is_normalized() {
        let a = array![[1.0, 2.0], [3.0, 4.0]].reversed_axes();
        let m = DataMatrix::new(a).unwrap();
        assert_eq!(m.row(0), &[1.0, 3.0]);
        assert_eq!(m.to_column_major(), vec![1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn numeric_ids_sort_numerically() {
        let c = ClassLabels::from_ids(["10", "2", "-1", "2"]);
        assert_eq!(c.classes(), &["-1", "2", "10"]);
        assert_eq!(c.codes(), &[2, 1, 0, 1]);
        let c = ClassLabels::from_ids(["b", "a", "b"]);
        assert_eq!(c.classes(), &["a", "b"]);
        assert_eq!(c.codes(), &[1, 0, 1]);
    }

    #[test]
    fn select_keeps_alphabet() {
        let y = LabelVector::classes(["a", "b", "c"]);
        let LabelVector::Classes(sub) = y.select(&[2]).unwrap() else { unreachable!() };
        assert_eq!(sub.n_classes(), 3);
        assert_eq!(sub.present_codes(), vec![2]);
    }

    #[test]
    fn class_ids_convert_to_real() {
        let y = LabelVector::classes(["-1", "1", "1"]);
        assert_eq!(y.to_real().unwrap(), vec![-1.0, 1.0, 1.0]);
        assert!(LabelVector::classes(["x"]).to_real().is_err());
    }

    #[test]
    fn weight_validation() {
        assert!(check_weights(&[1.0, 0.0], 2).is_ok());
        assert!(matches!(check_weights(&[1.0], 2), Err(Error::ShapeMismatch(_))));
        assert!(check_weights(&[-1.0, 1.0], 2).is_err());
        assert!(check_weights(&[0.0, 0.0], 2).is_err());
    }
}
