//! Weighted, possibly signed, undirected graphs and their Laplacians.
//!
//! Nodes carry string identifiers mapped to dense indices at construction.
//! Edges are canonicalized to `i < j`; duplicates and self-loops are rejected
//! so data problems surface early. All matrices are dense.

use crate::error::{Error, Result};
use crate::real::Real;
use nalgebra::{DMatrix, DVector};

/// A single undirected edge in canonical orientation (`i < j`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge<T> {
    pub i: usize,
    pub j: usize,
    pub weight: T,
}

/// Immutable undirected graph with real (possibly negative) edge weights.
#[derive(Debug, Clone)]
pub struct Graph<T: Real = f64> {
    nodes: Vec<String>,
    edges: Vec<Edge<T>>,
    adjacency: DMatrix<T>,
    signed: bool,
    connected: bool,
}

impl<T: Real> Graph<T> {
    /// Build a graph from node names and `(i, j, weight)` triples.
    ///
    /// Edges are stored in input order with endpoints swapped into `i < j`.
    pub fn new(nodes: Vec<String>, edges: Vec<(usize, usize, T)>) -> Result<Self> {
        let n = nodes.len();
        let mut seen = std::collections::HashSet::new();
        for name in &nodes {
            if !seen.insert(name.clone()) {
                return Err(Error::DuplicateNode(name.clone()));
            }
        }

        let mut adjacency = DMatrix::zeros(n, n);
        let mut canonical = Vec::with_capacity(edges.len());
        let mut signed = false;
        let mut uf = UnionFind::new(n);
        for (a, b, w) in edges {
            if a >= n || b >= n {
                return Err(Error::UnknownNode(format!("#{}", a.max(b))));
            }
            if a == b {
                return Err(Error::SelfLoop(nodes[a].clone()));
            }
            if !w.is_finite() {
                return Err(Error::NonFiniteWeight(nodes[a].clone(), nodes[b].clone()));
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            if adjacency[(i, j)] != T::zero() {
                return Err(Error::DuplicateEdge(nodes[i].clone(), nodes[j].clone()));
            }
            adjacency[(i, j)] = w;
            adjacency[(j, i)] = w;
            if w < T::zero() {
                signed = true;
            }
            uf.union(i, j);
            canonical.push(Edge { i, j, weight: w });
        }

        let connected = n > 0 && (0..n).all(|v| uf.find(v) == uf.find(0));
        Ok(Graph {
            nodes,
            edges: canonical,
            adjacency,
            signed,
            connected,
        })
    }

    /// Build from string-named edges; nodes are indexed in first-appearance
    /// order. `extra_nodes` lets callers declare isolated nodes.
    pub fn from_named_edges(
        extra_nodes: &[String],
        edges: &[(String, String, T)],
    ) -> Result<Self> {
        let mut names: Vec<String> = Vec::new();
        let mut index = std::collections::HashMap::new();
        let mut intern = |name: &String, names: &mut Vec<String>| -> usize {
            *index.entry(name.clone()).or_insert_with(|| {
                names.push(name.clone());
                names.len() - 1
            })
        };
        for name in extra_nodes {
            intern(name, &mut names);
        }
        let mut indexed = Vec::with_capacity(edges.len());
        for (a, b, w) in edges {
            let ia = intern(a, &mut names);
            let ib = intern(b, &mut names);
            indexed.push((ia, ib, *w));
        }
        Graph::new(names, indexed)
    }

    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_names(&self) -> &[String] {
        &self.nodes
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n == name)
    }

    pub fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }

    pub fn adjacency(&self) -> &DMatrix<T> {
        &self.adjacency
    }

    pub fn is_signed(&self) -> bool {
        self.signed
    }

    pub fn is_connected(&self) -> bool {
        self.connected
    }

    /// Degree vector d = A 1 (signed row sums for signed graphs).
    pub fn degrees(&self) -> DVector<T> {
        let n = self.n();
        DVector::from_fn(n, |i, _| self.adjacency.row(i).sum())
    }

    /// Absolute degree vector d_S = |A| 1.
    pub fn abs_degrees(&self) -> DVector<T> {
        let n = self.n();
        DVector::from_fn(n, |i, _| {
            self.adjacency.row(i).iter().map(|w| w.abs()).sum()
        })
    }

    /// Total edge weight w = 1' d / 2.
    pub fn total_weight(&self) -> T {
        self.degrees().sum() / T::cast(2.0)
    }

    /// Combinatorial Laplacian L = D - A. Rejects signed graphs.
    pub fn combinatorial_laplacian(&self) -> Result<DMatrix<T>> {
        if self.signed {
            return Err(Error::SignedGraph {
                op: "combinatorial_laplacian",
            });
        }
        let d = self.degrees();
        let mut l = -self.adjacency.clone();
        for i in 0..self.n() {
            l[(i, i)] += d[i];
        }
        Ok(l)
    }

    /// Normalized Laplacian L_N = D^{-1/2} L D^{-1/2}; requires positive degrees.
    pub fn normalized_laplacian(&self) -> Result<DMatrix<T>> {
        let d = self.positive_degrees()?;
        let d_inv_sqrt = d.map(|x| T::one() / x.sqrt());
        let l = self.laplacian_unchecked();
        let n = self.n();
        let mut ln = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                ln[(i, j)] = d_inv_sqrt[i] * l[(i, j)] * d_inv_sqrt[j];
            }
        }
        // symmetrize away rounding noise so downstream eigensolves see an
        // exactly symmetric operator
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = (ln[(i, j)] + ln[(j, i)]) / T::cast(2.0);
                ln[(i, j)] = avg;
                ln[(j, i)] = avg;
            }
        }
        Ok(ln)
    }

    /// Random walk Laplacian L_RW = D^{-1} L; rows sum to zero.
    pub fn random_walk_laplacian(&self) -> Result<DMatrix<T>> {
        let d = self.positive_degrees()?;
        let l = self.laplacian_unchecked();
        let n = self.n();
        Ok(DMatrix::from_fn(n, n, |i, j| l[(i, j)] / d[i]))
    }

    /// Signed Laplacian L_S = D_S - A; reduces to L on unsigned graphs.
    pub fn signed_laplacian(&self) -> DMatrix<T> {
        let d = self.abs_degrees();
        let mut l = -self.adjacency.clone();
        for i in 0..self.n() {
            l[(i, i)] += d[i];
        }
        l
    }

    /// Node-to-edge incidence matrix B (n x m) and diagonal absolute edge
    /// weights W_abs (m x m), with B W_abs B' = L_S.
    ///
    /// Orientation: the tail of each edge is its smaller node index; the head
    /// entry is -sign(w).
    pub fn incidence_decomposition(&self) -> (DMatrix<T>, DMatrix<T>) {
        let n = self.n();
        let m = self.edges.len();
        let mut b = DMatrix::zeros(n, m);
        let mut w_abs = DMatrix::zeros(m, m);
        for (e, edge) in self.edges.iter().enumerate() {
            let sign = if edge.weight < T::zero() {
                -T::one()
            } else {
                T::one()
            };
            b[(edge.i, e)] = T::one();
            b[(edge.j, e)] = -sign;
            w_abs[(e, e)] = edge.weight.abs();
        }
        (b, w_abs)
    }

    /// Stationary distribution pi = d / 2w of the unbiased random walk.
    pub fn stationary_distribution(&self) -> Result<DVector<T>> {
        if self.signed {
            return Err(Error::SignedGraph {
                op: "stationary_distribution",
            });
        }
        if !self.connected {
            return Err(Error::Disconnected {
                op: "stationary_distribution",
            });
        }
        let d = self.degrees();
        let two_w = d.sum();
        Ok(d / two_w)
    }

    /// D - A without the signedness gate, for internal reuse.
    pub(crate) fn laplacian_unchecked(&self) -> DMatrix<T> {
        let d = self.degrees();
        let mut l = -self.adjacency.clone();
        for i in 0..self.n() {
            l[(i, i)] += d[i];
        }
        l
    }

    fn positive_degrees(&self) -> Result<DVector<T>> {
        let d = self.degrees();
        for (i, &x) in d.iter().enumerate() {
            if x <= T::zero() {
                return Err(Error::ZeroDegree(self.nodes[i].clone()));
            }
        }
        Ok(d)
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}
