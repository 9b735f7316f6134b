use std::collections::HashMap;

use crate::data::DataMatrix;
use crate::linalg::{dot, sq_dist};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    Linear,
    Rbf { gamma: f64 },
    Polynomial { degree: u32, gamma: f64, coef0: f64 },
}

impl Kernel {
    #[inline]
    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            Kernel::Linear => dot(a, b),
            Kernel::Rbf { gamma } => (-gamma * sq_dist(a, b)).exp(),
            Kernel::Polynomial { degree, gamma, coef0 } => (gamma * dot(a, b) + coef0).powi(degree as i32),
        }
    }

    pub(crate) fn gamma(&self) -> Option<f64> {
        match *self {
            Kernel::Linear => None,
            Kernel::Rbf { gamma } | Kernel::Polynomial { gamma, .. } => Some(gamma),
        }
    }
}

/// LRU cache of kernel matrix rows over a fixed training set.
pub(crate) struct KernelCache<'a> {
    x: &'a DataMatrix,
    kernel: Kernel,
    capacity: usize,
    slots: Vec<CacheSlot>,
    lookup: HashMap<usize, usize>,
    clock: u64,
}

struct CacheSlot {
    row: usize,
    values: Vec<f64>,
    last_used: u64,
}

impl<'a> KernelCache<'a> {
    pub(crate) fn new(x: &'a DataMatrix, kernel: Kernel, capacity: usize) -> Self {
        KernelCache {
            x,
            kernel,
            capacity: capacity.max(2),
            slots: Vec::new(),
            lookup: HashMap::new(),
            clock: 0,
        }
    }

    /// Makes row `i` resident and returns its slot. The most recently
    /// touched slot is never evicted, so two consecutive calls keep both rows.
    pub(crate) fn ensure(&mut self, i: usize) -> usize {
        self.clock += 1;
        if let Some(&slot) = self.lookup.get(&i) {
            self.slots[slot].last_used = self.clock;
            return slot;
        }
        let target = self.x.row(i);
        let slot = if self.slots.len() < self.capacity {
            let values = self.x.rows().map(|r| self.kernel.eval(target, r)).collect();
            self.slots.push(CacheSlot { row: i, values, last_used: self.clock });
            self.slots.len() - 1
        } else {
            let victim = (0..self.slots.len())
                .min_by_key(|&s| self.slots[s].last_used)
                .expect("capacity ≥ 2");
            self.lookup.remove(&self.slots[victim].row);
            let kernel = self.kernel;
            let slot = &mut self.slots[victim];
            for (v, r) in slot.values.iter_mut().zip(self.x.rows()) {
                *v = kernel.eval(target, r);
            }
            slot.row = i;
            slot.last_used = self.clock;
            victim
        };
        self.lookup.insert(i, slot);
        slot
    }

    pub(crate) fn slot(&self, slot: usize) -> &[f64] {
        &self.slots[slot].values
    }

    #[cfg(test)]
    fn resident(&self) -> Vec<usize> {
        let mut r: Vec<usize> = self.lookup.keys().copied().collect();
        r.sort_unstable();
        r
    }
}
