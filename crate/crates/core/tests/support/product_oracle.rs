// Independent extendibility oracle and random orthogonal product sets.
// Shares no code with the verifier beyond the ProductSet container.

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use ctxupb::linalg::{ComplexMatrix, ComplexVector, C64};
use ctxupb::upb::ProductSet;

const NULL_TOL: f64 = 1e-8;
const OVERLAP_TOL: f64 = 1e-9;

pub fn gaussian(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

pub fn random_unitary(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
    DMatrix::from_fn(dim, dim, |_, _| gaussian(rng)).qr().q()
}

/// Orthonormal basis of the orthogonal complement of `vectors` in `C^dim`,
/// read off the SVD of the stacked conjugated rows.
pub fn null_space(vectors: &[&ComplexVector], dim: usize) -> Vec<ComplexVector> {
    if vectors.is_empty() {
        return (0..dim)
            .map(|k| ComplexVector::from_fn(dim, |i, _| C64::new(if i == k { 1.0 } else { 0.0 }, 0.0)))
            .collect();
    }
    // Pad to a square matrix so the SVD returns every right singular vector.
    let rows = vectors.len().max(dim);
    let mut a = ComplexMatrix::zeros(rows, dim);
    for (r, v) in vectors.iter().enumerate() {
        for c in 0..dim {
            a[(r, c)] = v[c].conj();
        }
    }
    let svd = a.svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let top = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    (0..dim)
        .filter(|&i| svd.singular_values[i] <= NULL_TOL * top.max(1.0))
        .map(|i| vt.row(i).adjoint())
        .collect()
}

fn overlap(ps: &ProductSet, j: usize, w: &[ComplexVector]) -> f64 {
    ps.states()[j].iter().zip(w).map(|(a, b)| a.dotc(b).norm()).product()
}

/// Tries every assignment of states to parties; for a non-saturating one,
/// draws random product states from the per-party complements and keeps the
/// first that is orthogonal to the whole set.
pub fn brute_witness(ps: &ProductSet, rng: &mut ChaCha8Rng) -> Option<Vec<ComplexVector>> {
    let n = ps.parties();
    let k = ps.k();
    let dims = ps.party_dims();
    let total = (n as u64).pow(k as u32);
    for code in 0..total {
        let mut assigned: Vec<Vec<&ComplexVector>> = vec![Vec::new(); n];
        let mut c = code;
        for j in 0..k {
            let m = (c % n as u64) as usize;
            c /= n as u64;
            assigned[m].push(&ps.states()[j][m]);
        }
        let spaces: Vec<Vec<ComplexVector>> = (0..n).map(|m| null_space(&assigned[m], dims[m])).collect();
        if spaces.iter().any(|s| s.is_empty()) {
            continue;
        }
        for _ in 0..8 {
            let w: Vec<ComplexVector> = spaces
                .iter()
                .map(|basis| {
                    let v = basis.iter().fold(ComplexVector::zeros(basis[0].len()), |acc, b| acc + b * gaussian(rng));
                    let nv = v.norm();
                    v / C64::new(nv, 0.0)
                })
                .collect();
            if (0..k).all(|j| overlap(ps, j, &w) <= OVERLAP_TOL) {
                return Some(w);
            }
        }
    }
    None
}

/// Random orthogonal product set in `d x d` with at most `max_k` states.
/// Each party draws factors from a few random orthonormal bases; two states
/// are orthogonal when some party uses the same basis with different indices.
pub fn random_orthogonal_set(rng: &mut ChaCha8Rng, d: usize, max_k: usize) -> ProductSet {
    let bases_per_party = 2 + rng.random_range(0..2);
    let bases: Vec<Vec<ComplexMatrix>> = (0..2)
        .map(|_| (0..bases_per_party).map(|_| random_unitary(rng, d)).collect())
        .collect();
    let target = rng.random_range(1..=max_k.min(d * d));
    let mut picks: Vec<[(usize, usize); 2]> = Vec::new();
    for _ in 0..400 {
        if picks.len() == target {
            break;
        }
        let cand = [
            (rng.random_range(0..bases_per_party), rng.random_range(0..d)),
            (rng.random_range(0..bases_per_party), rng.random_range(0..d)),
        ];
        let separated = |p: &[(usize, usize); 2]| (0..2).any(|m| p[m].0 == cand[m].0 && p[m].1 != cand[m].1);
        if picks.iter().all(separated) {
            picks.push(cand);
        }
    }
    let states = picks
        .iter()
        .map(|p| (0..2).map(|m| bases[m][p[m].0].column(p[m].1).into_owned()).collect())
        .collect();
    ProductSet::new(vec![d, d], states).expect("valid product set")
}

/// Applies a random local unitary on each party and shuffles the states.
pub fn scramble(ps: &ProductSet, rng: &mut ChaCha8Rng) -> ProductSet {
    let us: Vec<ComplexMatrix> = ps.party_dims().iter().map(|&d| random_unitary(rng, d)).collect();
    let mut states: Vec<Vec<ComplexVector>> = ps
        .states()
        .iter()
        .map(|s| s.iter().zip(&us).map(|(f, u)| u * f).collect())
        .collect();
    for i in (1..states.len()).rev() {
        let j = rng.random_range(0..=i);
        states.swap(i, j);
    }
    ProductSet::new(ps.party_dims().to_vec(), states).expect("valid product set")
}
