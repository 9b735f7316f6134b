//! Synthetic stand-in for the Madelon data set.
//!
//! Samples sit around the vertices of an `n_informative`-dimensional
//! hypercube with side `2·class_sep`. Each vertex is labelled by the side of
//! a random hyperplane through the origin it falls on, so the two classes are
//! linearly separable when `class_sep` is large and nothing is flipped.
//! Redundant features are random linear combinations of the informative ones
//! and the rest is standard Gaussian noise.

use learnkit::{DataMatrix, LabelVector};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MadelonSpec {
    pub n_samples: usize,
    pub n_features: usize,
    pub n_informative: usize,
    pub n_redundant: usize,
    pub class_sep: f64,
    pub flip_fraction: f64,
    pub seed: u64,
}

impl Default for MadelonSpec {
    fn default() -> Self {
        MadelonSpec {
            n_samples: 4400,
            n_features: 500,
            n_informative: 5,
            n_redundant: 15,
            class_sep: 2.0,
            flip_fraction: 0.01,
            seed: 0,
        }
    }
}

impl MadelonSpec {
    /// Quarter scale on both axes: 1100 × 125.
    pub fn quarter() -> Self {
        MadelonSpec { n_samples: 1100, n_features: 125, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(BenchError::BadSpec(m.to_string()));
        if self.n_samples < 2 {
            return bad("n_samples must be at least 2");
        }
        if self.n_informative == 0 {
            return bad("n_informative must be at least 1");
        }
        if self.n_informative + self.n_redundant > self.n_features {
            return bad("n_informative + n_redundant exceeds n_features");
        }
        if !(self.class_sep > 0.0 && self.class_sep.is_finite()) {
            return bad("class_sep must be positive and finite");
        }
        if !(0.0..1.0).contains(&self.flip_fraction) {
            return bad("flip_fraction must lie in [0, 1)");
        }
        Ok(())
    }

    pub fn shape(&self) -> String {
        format!("madelon {}x{}", self.n_samples, self.n_features)
    }
}

/// Generates features and `"1"`/`"-1"` labels. Identical specs give
/// bit-identical output.
pub fn make_madelon(spec: &MadelonSpec) -> Result<(DataMatrix, LabelVector)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let d = spec.n_informative;

    // no vertex lies on the hyperplane
    let mut normal: Vec<f64> = (0..d).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
    if d % 2 == 0 {
        normal[0] *= 1.5;
    }
    let mixing: Vec<Vec<f64>> = (0..spec.n_redundant)
        .map(|_| (0..d).map(|_| StandardNormal.sample(&mut rng)).collect())
        .collect();

    let p = spec.n_features;
    let mut data = Vec::with_capacity(spec.n_samples * p);
    let mut labels = Vec::with_capacity(spec.n_samples);
    for _ in 0..spec.n_samples {
        let vertex: Vec<f64> = (0..d).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
        let side: f64 = vertex.iter().zip(&normal).map(|(v, w)| v * w).sum();
        labels.push(side > 0.0);
        let informative: Vec<f64> = vertex
            .iter()
            .map(|v| spec.class_sep * v + Distribution::<f64>::sample(&StandardNormal, &mut rng))
            .collect();
        data.extend_from_slice(&informative);
        for row in &mixing {
            data.push(row.iter().zip(&informative).map(|(a, b)| a * b).sum());
        }
        for _ in d + spec.n_redundant..p {
            data.push(StandardNormal.sample(&mut rng));
        }
    }

    let n_flip = (spec.flip_fraction * spec.n_samples as f64).round() as usize;
    for i in sample(&mut rng, spec.n_samples, n_flip) {
        labels[i] = !labels[i];
    }
    let x = DataMatrix::from_shape_vec(spec.n_samples, p, data)?;
    let y = LabelVector::classes(labels.iter().map(|&positive| if positive { "1" } else { "-1" }));
    Ok((x, y))
}
