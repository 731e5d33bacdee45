//! Seeded random graph generators.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::real::Real;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Planted-partition graph: blocks of the given sizes, within-block edges
/// drawn with probability `p_in` and between-block edges with `p_out`.
///
/// Unweighted, undirected, deterministic for a fixed seed. Node names are the
/// decimal indices `"0".."n-1"`; the planted block of node `v` is
/// the index of the size entry covering `v`.
pub fn planted_partition<T: Real>(
    sizes: &[usize],
    p_in: f64,
    p_out: f64,
    seed: u64,
) -> Result<Graph<T>> {
    if !(0.0..=1.0).contains(&p_in) || !(0.0..=1.0).contains(&p_out) || p_out >= p_in {
        return Err(Error::InvalidProbability { p_in, p_out });
    }
    let n: usize = sizes.iter().sum();
    let block = block_labels(sizes);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let p = if block[i] == block[j] { p_in } else { p_out };
            if rng.random::<f64>() < p {
                edges.push((i, j, T::one()));
            }
        }
    }
    let names = (0..n).map(|i| i.to_string()).collect();
    Graph::new(names, edges)
}

/// Block index per node for the given block sizes.
pub fn block_labels(sizes: &[usize]) -> Vec<usize> {
    sizes
        .iter()
        .enumerate()
        .flat_map(|(b, &s)| std::iter::repeat(b).take(s))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_for_fixed_seed() {
        let a: Graph = planted_partition(&[10, 10], 0.6, 0.1, 42).unwrap();
        let b: Graph = planted_partition(&[10, 10], 0.6, 0.1, 42).unwrap();
        assert_eq!(a.edges().len(), b.edges().len());
        for (ea, eb) in a.edges().iter().zip(b.edges()) {
            assert_eq!((ea.i, ea.j), (eb.i, eb.j));
        }
        let c: Graph = planted_partition(&[10, 10], 0.6, 0.1, 43).unwrap();
        let same = a.edges().len() == c.edges().len()
            && a.edges()
                .iter()
                .zip(c.edges())
                .all(|(x, y)| (x.i, x.j) == (y.i, y.j));
        assert!(!same, "different seeds should give different edge sets");
    }

    #[test]
    fn zero_p_out_gives_components() {
        let g: Graph = planted_partition(&[5, 5, 5], 0.9, 0.0, 7).unwrap();
        for e in g.edges() {
            assert_eq!(e.i / 5, e.j / 5);
        }
        assert!(!g.is_connected());
    }

    #[test]
    fn within_block_edge_count_within_3_sigma() {
        // sizes (20,20), p_in = 0.5: within-block pair count is 2*C(20,2) = 380
        let g: Graph = planted_partition(&[20, 20], 0.5, 0.05, 1).unwrap();
        let within = g.edges().iter().filter(|e| e.i / 20 == e.j / 20).count() as f64;
        let trials: f64 = 380.0;
        let mean = 0.5 * trials;
        let sigma = (trials * 0.5 * 0.5).sqrt();
        assert!(
            (within - mean).abs() <= 3.0 * sigma,
            "within-block count {} outside 3 sigma of {}",
            within,
            mean
        );
    }

    #[test]
    fn rejects_bad_probabilities() {
        assert!(planted_partition::<f64>(&[4, 4], 0.2, 0.5, 0).is_err());
        assert!(planted_partition::<f64>(&[4, 4], 1.5, 0.1, 0).is_err());
    }
}
