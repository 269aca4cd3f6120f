use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::graphs::Graph;
use crate::linalg::{ComplexMatrix, ComplexVector, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

pub fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> ComplexVector {
    let v = ComplexVector::from_fn(dim, |_, _| gaussian(rng));
    let n = v.norm();
    v / C64::new(n, 0.0)
}

pub fn random_unitary(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
    DMatrix::from_fn(dim, dim, |_, _| gaussian(rng)).qr().q()
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
    let a = DMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    (&a + a.adjoint()) * C64::new(0.5, 0.0)
}

pub fn random_density(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
    let a = DMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    let m = &a * a.adjoint();
    let t = m.trace();
    m / t
}

pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, density: f64) -> Graph {
    let mut g = Graph::empty(n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < density {
                g.add_edge(i, j).unwrap();
            }
        }
    }
    g
}

/// Brute-force maximum independent set size over all vertex subsets.
pub fn brute_independence(g: &Graph) -> usize {
    let n = g.n();
    let adj: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &u| m | (1 << u)))
        .collect();
    let mut best = 0;
    for mask in 0u32..(1u32 << n) {
        let size = mask.count_ones() as usize;
        if size <= best {
            continue;
        }
        if (0..n).all(|v| mask & (1 << v) == 0 || adj[v] & mask == 0) {
            best = size;
        }
    }
    best
}

/// Brute-force clique number.
pub fn brute_clique(g: &Graph) -> usize {
    let n = g.n();
    let mut best = 0;
    for mask in 0u32..(1u32 << n) {
        let members: Vec<usize> = (0..n).filter(|v| mask & (1 << v) != 0).collect();
        if members.len() > best
            && members
                .iter()
                .enumerate()
                .all(|(a, &u)| members[a + 1..].iter().all(|&v| g.has_edge(u, v)))
        {
            best = members.len();
        }
    }
    best
}

/// Every permutation of `0..n` (lexicographic).
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                go(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}
