//! k-nearest-neighbor classification.
//!
//! Queries go through a ball tree in low dimension and an exhaustive scan
//! above `dim_threshold` features. Both paths return identical neighbor
//! lists, so the choice only affects speed.

mod ball_tree;

pub use ball_tree::{ball_tree_build, brute_force_query, knn_query, BallTree, Neighbor, Node};

use std::str::FromStr;

use crate::data::{ClassLabels, DataMatrix, LabelVector};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Auto,
    BallTree,
    Brute,
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Strategy::Auto),
            "ball_tree" => Ok(Strategy::BallTree),
            "brute" => Ok(Strategy::Brute),
            other => Err(Error::InvalidParam { name: "strategy".into(), reason: format!("unknown `{other}`") }),
        }
    }
}

impl Strategy {
    /// Concrete strategy for a given width. Depends on nothing else.
    pub fn resolve(self, n_features: usize, dim_threshold: usize) -> Strategy {
        match self {
            Strategy::Auto if n_features > dim_threshold => Strategy::Brute,
            Strategy::Auto => Strategy::BallTree,
            s => s,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnnParams {
    pub k: usize,
    pub strategy: Strategy,
    pub leaf_size: usize,
    pub dim_threshold: usize,
}

impl Default for KnnParams {
    fn default() -> Self {
        KnnParams { k: 5, strategy: Strategy::Auto, leaf_size: 30, dim_threshold: 20 }
    }
}

/// Stored training set plus, for the ball-tree strategy, its index.
#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel {
    pub params: KnnParams,
    pub strategy: Strategy,
    x_train: DataMatrix,
    labels: ClassLabels,
    tree: Option<BallTree>,
}

impl KnnModel {
    pub fn fit(params: &KnnParams, x: &DataMatrix, y: &ClassLabels) -> Result<Self> {
        if params.k == 0 {
            return Err(Error::InvalidParam { name: "k".into(), reason: "must be at least 1".into() });
        }
        if y.len() != x.n_samples() {
            return Err(Error::ShapeMismatch(format!("{} labels for {} samples", y.len(), x.n_samples())));
        }
        if params.k > x.n_samples() {
            return Err(Error::KTooLarge { k: params.k, n_samples: x.n_samples() });
        }
        let strategy = params.strategy.resolve(x.n_features(), params.dim_threshold);
        let tree = match strategy {
            Strategy::BallTree => Some(ball_tree_build(x, params.leaf_size)?),
            _ => None,
        };
        Ok(KnnModel { params: params.clone(), strategy, x_train: x.clone(), labels: y.clone(), tree })
    }

    pub fn n_features(&self) -> usize {
        self.x_train.n_features()
    }

    pub fn classes(&self) -> &[String] {
        self.labels.classes()
    }

    pub fn neighbors(&self, query: &[f64]) -> Result<Vec<Neighbor>> {
        match &self.tree {
            Some(tree) => knn_query(tree, &self.x_train, query, self.params.k),
            None => brute_force_query(&self.x_train, query, self.params.k),
        }
    }

    pub fn predict_codes(&self, x: &DataMatrix) -> Result<Vec<usize>> {
        x.check_width(self.n_features())?;
        x.rows()
            .map(|q| self.neighbors(q).map(|nb| vote(&nb, &self.labels)))
            .collect()
    }
}

/// Majority vote; ties go to the smaller summed distance, then the lower code.
fn vote(neighbors: &[Neighbor], labels: &ClassLabels) -> usize {
    let mut counts = vec![0usize; labels.n_classes()];
    let mut dist = vec![0.0; labels.n_classes()];
    for nb in neighbors {
        let c = labels.codes()[nb.index];
        counts[c] += 1;
        dist[c] += nb.distance;
    }
    let mut best = usize::MAX;
    for c in 0..counts.len() {
        if counts[c] == 0 {
            continue;
        }
        if best == usize::MAX
            || counts[c] > counts[best]
            || (counts[c] == counts[best] && dist[c] < dist[best])
        {
            best = c;
        }
    }
    best
}

/// Fits and queries in one call.
pub fn knn_classify(params: &KnnParams, x_train: &DataMatrix, y_train: &ClassLabels, x_query: &DataMatrix) -> Result<LabelVector> {
    let model = KnnModel::fit(params, x_train, y_train)?;
    let codes = model.predict_codes(x_query)?;
    Ok(LabelVector::Classes(ClassLabels::with_alphabet(y_train.classes().to_vec(), codes)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(v: &LabelVector) -> Vec<String> {
        let LabelVector::Classes(c) = v else { panic!() };
        (0..c.len()).map(|i| c.id(i).to_string()).collect()
    }

    #[test]
    fn unanimous_neighbors() {
        let x = DataMatrix::from_rows(&[[0.0], [1.0], [2.0]]).unwrap();
        let y = ClassLabels::from_ids(["a", "a", "a"]);
        let q = DataMatrix::from_rows(&[[-5.0], [0.5], [100.0]]).unwrap();
        let params = KnnParams { k: 3, ..Default::default() };
        assert_eq!(ids(&knn_classify(&params, &x, &y, &q).unwrap()), vec!["a"; 3]);
    }

    #[test]
    fn k_equal_n_gives_global_majority() {
        let x = DataMatrix::from_rows(&[[0.0], [1.0], [2.0], [3.0], [4.0]]).unwrap();
        let y = ClassLabels::from_ids(["a", "b", "b", "a", "b"]);
        let q = DataMatrix::from_rows(&[[0.0], [-10.0], [10.0]]).unwrap();
        let params = KnnParams { k: 5, ..Default::default() };
        assert_eq!(ids(&knn_classify(&params, &x, &y, &q).unwrap()), vec!["b"; 3]);
    }

    #[test]
    fn vote_tie_uses_summed_distance_then_code() {
        // two "b" neighbors closer in total than two "a"
        let x = DataMatrix::from_rows(&[[-3.0], [-3.0], [1.0], [1.0]]).unwrap();
        let y = ClassLabels::from_ids(["a", "a", "b", "b"]);
        let q = DataMatrix::from_rows(&[[0.0]]).unwrap();
        let p = KnnParams { k: 4, ..Default::default() };
        assert_eq!(ids(&knn_classify(&p, &x, &y, &q).unwrap()), vec!["b"]);
        // exact symmetry falls back to the lower code
        let x = DataMatrix::from_rows(&[[-1.0], [1.0]]).unwrap();
        let y = ClassLabels::from_ids(["b", "a"]);
        let p = KnnParams { k: 2, ..Default::default() };
        assert_eq!(ids(&knn_classify(&p, &x, &y, &q).unwrap()), vec!["a"]);
    }

    #[test]
    fn auto_dispatch_depends_on_width_only() {
        assert_eq!(Strategy::Auto.resolve(20, 20), Strategy::BallTree);
        assert_eq!(Strategy::Auto.resolve(21, 20), Strategy::Brute);
        assert_eq!(Strategy::Brute.resolve(1, 20), Strategy::Brute);
        assert_eq!(Strategy::BallTree.resolve(500, 20), Strategy::BallTree);
    }

    #[test]
    fn too_large_k_rejected() {
        let x = DataMatrix::from_rows(&[[0.0], [1.0]]).unwrap();
        let y = ClassLabels::from_ids(["a", "b"]);
        let p = KnnParams { k: 3, ..Default::default() };
        assert_eq!(KnnModel::fit(&p, &x, &y).unwrap_err(), Error::KTooLarge { k: 3, n_samples: 2 });
    }
}
