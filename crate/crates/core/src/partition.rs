//! Hard partitions of node sets and the associated indicator algebra.

use crate::error::{Error, Result};
use crate::real::Real;
use nalgebra::DMatrix;

/// Assignment of `n` nodes to `k` disjoint, non-empty cells `0..k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    cell_of: Vec<usize>,
    k: usize,
}

impl Partition {
    /// Validates that cell indices are exactly `0..k` with every cell non-empty.
    pub fn new(cell_of: Vec<usize>) -> Result<Self> {
        if cell_of.is_empty() {
            return Err(Error::InvalidPartition("no nodes".into()));
        }
        let k = cell_of.iter().max().copied().unwrap() + 1;
        let mut sizes = vec![0usize; k];
        for &c in &cell_of {
            sizes[c] += 1;
        }
        if let Some(empty) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::InvalidPartition(format!("cell {} is empty", empty)));
        }
        Ok(Partition { cell_of, k })
    }

    /// Relabels arbitrary (hashable) labels into canonical cells ordered by
    /// first occurrence.
    pub fn from_labels<L: std::hash::Hash + Eq + Clone>(labels: &[L]) -> Result<Self> {
        let mut map = std::collections::HashMap::new();
        let mut next = 0usize;
        let cell_of = labels
            .iter()
            .map(|l| {
                *map.entry(l.clone()).or_insert_with(|| {
                    let c = next;
                    next += 1;
                    c
                })
            })
            .collect();
        Partition::new(cell_of)
    }

    pub fn singletons(n: usize) -> Self {
        Partition {
            cell_of: (0..n).collect(),
            k: n,
        }
    }

    pub fn all_in_one(n: usize) -> Self {
        Partition {
            cell_of: vec![0; n],
            k: 1,
        }
    }

    pub fn n(&self) -> usize {
        self.cell_of.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn cell_of(&self, node: usize) -> usize {
        self.cell_of[node]
    }

    pub fn assignments(&self) -> &[usize] {
        &self.cell_of
    }

    /// Node indices grouped by cell.
    pub fn cells(&self) -> Vec<Vec<usize>> {
        let mut cells = vec![Vec::new(); self.k];
        for (node, &c) in self.cell_of.iter().enumerate() {
            cells[c].push(node);
        }
        cells
    }

    pub fn cell_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.k];
        for &c in &self.cell_of {
            sizes[c] += 1;
        }
        sizes
    }

    /// n x k indicator matrix C with one 1 per row.
    pub fn indicator_matrix<T: Real>(&self) -> DMatrix<T> {
        let mut c = DMatrix::zeros(self.n(), self.k);
        for (node, &cell) in self.cell_of.iter().enumerate() {
            c[(node, cell)] = T::one();
        }
        c
    }

    /// Cell averaging operator C+ = (C'C)^{-1} C' (k x n). Row j holds
    /// 1/|cell j| on the members of cell j.
    pub fn cell_averaging<T: Real>(&self) -> DMatrix<T> {
        let sizes = self.cell_sizes();
        let mut cp = DMatrix::zeros(self.k, self.n());
        for (node, &cell) in self.cell_of.iter().enumerate() {
            cp[(cell, node)] = T::one() / T::from_count(sizes[cell]);
        }
        cp
    }

    /// Canonical relabeling: cells numbered by first node occurrence.
    pub fn canonical(&self) -> Partition {
        Partition::from_labels(&self.cell_of).unwrap()
    }

    /// True if every cell of `self` is contained in a cell of `other`.
    pub fn refines(&self, other: &Partition) -> bool {
        if self.n() != other.n() {
            return false;
        }
        let mut image: Vec<Option<usize>> = vec![None; self.k];
        for (node, &c) in self.cell_of.iter().enumerate() {
            let target = other.cell_of[node];
            match image[c] {
                None => image[c] = Some(target),
                Some(t) if t == target => {}
                Some(_) => return false,
            }
        }
        true
    }

    /// Merge two cells, renumbering canonically.
    pub fn merge_cells(&self, a: usize, b: usize) -> Partition {
        let target = a.min(b);
        let source = a.max(b);
        let labels: Vec<usize> = self
            .cell_of
            .iter()
            .map(|&c| if c == source { target } else { c })
            .collect();
        Partition::from_labels(&labels).unwrap()
    }
}
