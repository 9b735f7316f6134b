use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::linalg::sq_dist;

/// Relative slack on the pruning bound. Squared distances compared between
/// candidates are computed identically on every path; only the geometric
/// lower bound carries rounding, so it is loosened slightly.
const PRUNE_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub centroid: Vec<f64>,
    pub radius: f64,
    /// Range into [`BallTree::indices`] covered by this node.
    pub start: usize,
    pub end: usize,
    pub children: Option<(usize, usize)>,
}

impl Node {
    pub fn is_leaf(&self) -> bool {
        self.children.is_none()
    }
}

/// Binary ball tree over the rows of a training matrix. The matrix itself
/// is not stored; queries take it alongside the tree.
#[derive(Debug, Clone, PartialEq)]
pub struct BallTree {
    pub nodes: Vec<Node>,
    /// Permutation of `0..n_samples`; each node owns a contiguous range.
    pub indices: Vec<usize>,
    pub leaf_size: usize,
    n_samples: usize,
    n_features: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub index: usize,
    pub distance: f64,
}

/// Heap entry ordered by `(squared distance, index)`.
#[derive(Debug, Clone, Copy)]
struct Candidate {
    sq: f64,
    index: usize,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sq.total_cmp(&other.sq).then(self.index.cmp(&other.index))
    }
}

/// Builds a ball tree. Each internal node splits its points at the median
/// of the coordinate with the largest spread (lowest dimension on ties).
pub fn ball_tree_build(x: &DataMatrix, leaf_size: usize) -> Result<BallTree> {
    if leaf_size == 0 {
        return Err(Error::InvalidParam { name: "leaf_size".into(), reason: "must be at least 1".into() });
    }
    let n = x.n_samples();
    let mut tree = BallTree {
        nodes: Vec::with_capacity(2 * n / leaf_size + 1),
        indices: (0..n).collect(),
        leaf_size,
        n_samples: n,
        n_features: x.n_features(),
    };
    build_node(&mut tree, x, 0, n);
    Ok(tree)
}

fn build_node(tree: &mut BallTree, x: &DataMatrix, start: usize, end: usize) -> usize {
    let p = x.n_features();
    let members = &tree.indices[start..end];
    let mut centroid = vec![0.0; p];
    for &i in members {
        for (c, v) in centroid.iter_mut().zip(x.row(i)) {
            *c += v;
        }
    }
    let count = (end - start) as f64;
    centroid.iter_mut().for_each(|c| *c /= count);
    let radius = members
        .iter()
        .map(|&i| sq_dist(&centroid, x.row(i)))
        .fold(0.0_f64, f64::max)
        .sqrt();

    let id = tree.nodes.len();
    tree.nodes.push(Node { centroid, radius, start, end, children: None });
    if end - start <= tree.leaf_size {
        return id;
    }

    let mut best_dim = 0;
    let mut best_spread = f64::NEG_INFINITY;
    for d in 0..p {
        let (lo, hi) = members.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
            let v = x.get(i, d);
            (lo.min(v), hi.max(v))
        });
        if hi - lo > best_spread {
            best_spread = hi - lo;
            best_dim = d;
        }
    }
    let mid = start + (end - start) / 2;
    tree.indices[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
        x.get(a, best_dim).total_cmp(&x.get(b, best_dim)).then(a.cmp(&b))
    });
    let left = build_node(tree, x, start, mid);
    let right = build_node(tree, x, mid, end);
    tree.nodes[id].children = Some((left, right));
    id
}

impl BallTree {
    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn leaf_indices(&self, node: usize) -> &[usize] {
        let n = &self.nodes[node];
        &self.indices[n.start..n.end]
    }
}

/// The `k` nearest training rows to `query`, ascending by `(distance, index)`.
pub fn knn_query(tree: &BallTree, x_train: &DataMatrix, query: &[f64], k: usize) -> Result<Vec<Neighbor>> {
    if x_train.n_samples() != tree.n_samples || x_train.n_features() != tree.n_features {
        return Err(Error::ShapeMismatch("training matrix does not match the tree".into()));
    }
    check_query(query, tree.n_features, k, tree.n_samples)?;
    if k == 0 {
        return Ok(Vec::new());
    }
    let mut heap = BinaryHeap::with_capacity(k + 1);
    search(tree, x_train, query, k, 0, &mut heap);
    Ok(finish(heap))
}

fn search(
    tree: &BallTree,
    x: &DataMatrix,
    q: &[f64],
    k: usize,
    node_id: usize,
    heap: &mut BinaryHeap<Candidate>,
) {
    let node = &tree.nodes[node_id];
    if heap.len() == k {
        let to_centroid = sq_dist(q, &node.centroid).sqrt();
        let worst = heap.peek().expect("k ≥ 1").sq.sqrt();
        let slack = PRUNE_SLACK * (worst + to_centroid + node.radius);
        if to_centroid - node.radius - worst > slack {
            return;
        }
    }
    match node.children {
        None => {
            for &i in &tree.indices[node.start..node.end] {
                offer(heap, k, Candidate { sq: sq_dist(q, x.row(i)), index: i });
            }
        }
        Some((l, r)) => {
            let dl = sq_dist(q, &tree.nodes[l].centroid);
            let dr = sq_dist(q, &tree.nodes[r].centroid);
            let (first, second) = if dr < dl { (r, l) } else { (l, r) };
            search(tree, x, q, k, first, heap);
            search(tree, x, q, k, second, heap);
        }
    }
}

#[inline]
fn offer(heap: &mut BinaryHeap<Candidate>, k: usize, c: Candidate) {
    if heap.len() < k {
        heap.push(c);
    } else if c < *heap.peek().expect("k ≥ 1") {
        heap.pop();
        heap.push(c);
    }
}

fn finish(heap: BinaryHeap<Candidate>) -> Vec<Neighbor> {
    heap.into_sorted_vec()
        .into_iter()
        .map(|c| Neighbor { index: c.index, distance: c.sq.sqrt() })
        .collect()
}

fn check_query(query: &[f64], n_features: usize, k: usize, n_samples: usize) -> Result<()> {
    if query.len() != n_features {
        return Err(Error::ShapeMismatch(format!("expected {n_features} features, got {}", query.len())));
    }
    if k > n_samples {
        return Err(Error::KTooLarge { k, n_samples });
    }
    Ok(())
}

/// Exhaustive scan with the same ordering rule as [`knn_query`].
pub fn brute_force_query(x_train: &DataMatrix, query: &[f64], k: usize) -> Result<Vec<Neighbor>> {
    check_query(query, x_train.n_features(), k, x_train.n_samples())?;
    let mut heap = BinaryHeap::with_capacity(k + 1);
    if k > 0 {
        for (i, row) in x_train.rows().enumerate() {
            offer(&mut heap, k, Candidate { sq: sq_dist(query, row), index: i });
        }
    }
    Ok(finish(heap))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_input_is_single_leaf() {
        let x = DataMatrix::from_rows(&[[0.0, 1.0], [2.0, 3.0], [4.0, 5.0]]).unwrap();
        let tree = ball_tree_build(&x, 3).unwrap();
        assert_eq!(tree.nodes.len(), 1);
        assert!(tree.nodes[0].is_leaf());
        let mut idx = tree.leaf_indices(0).to_vec();
        idx.sort_unstable();
        assert_eq!(idx, vec![0, 1, 2]);
    }

    #[test]
    fn duplicates_build_and_query() {
        let x = DataMatrix::from_rows(&[[1.0, 1.0]; 5]).unwrap();
        let tree = ball_tree_build(&x, 1).unwrap();
        assert_eq!(tree.nodes.iter().filter(|n| n.is_leaf()).count(), 5);
        let got = knn_query(&tree, &x, &[1.0, 1.0], 5).unwrap();
        let idx: Vec<usize> = got.iter().map(|n| n.index).collect();
        assert_eq!(idx, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn equidistant_neighbors_lower_index_first() {
        let x = DataMatrix::from_rows(&[[2.0], [-1.0], [1.0], [5.0]]).unwrap();
        let tree = ball_tree_build(&x, 1).unwrap();
        let got = knn_query(&tree, &x, &[0.0], 2).unwrap();
        assert_eq!(got[0].index, 1);
        assert_eq!(got[1].index, 2);
        assert_eq!(got[0].distance, 1.0);
    }

    #[test]
    fn k_too_large() {
        let x = DataMatrix::from_rows(&[[0.0], [1.0]]).unwrap();
        let tree = ball_tree_build(&x, 30).unwrap();
        assert_eq!(knn_query(&tree, &x, &[0.0], 3).unwrap_err(), Error::KTooLarge { k: 3, n_samples: 2 });
        assert!(brute_force_query(&x, &[0.0], 3).is_err());
    }
}
