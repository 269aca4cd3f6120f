use nalgebra::DMatrix;
use rand::Rng;

use super::support::*;
use crate::contextuality::strength;
use crate::entanglement::{pure_lee_term, table1_thetas, TABLE1_STRENGTH_REF};
use crate::families::{one_param_family, quadres_local, quadres_normalization, TILES_THETA};
use crate::graphs::*;
use crate::linalg::*;
use crate::upb::*;

#[path = "../../tests/support/product_oracle.rs"]
mod product_oracle;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn colors_preserved(a: &EdgeColoredGraph, b: &EdgeColoredGraph, perm: &[usize]) -> bool {
    let n = a.n();
    (0..n).all(|i| (0..n).all(|j| i == j || a.color(i, j) == b.color(perm[i], perm[j])))
}

fn brute_colored(a: &EdgeColoredGraph, b: &EdgeColoredGraph) -> bool {
    permutations(a.n()).iter().any(|p| colors_preserved(a, b, p))
}

#[test]
fn colored_equivalence_matches_all_permutations_for_five_states() {
    let sets = [
        pyramid_upb().unwrap(),
        one_param_upb(TILES_THETA).unwrap(),
        quadres_upb(5).unwrap(),
        gencontextual_upb(5).unwrap(),
    ];
    let colored: Vec<EdgeColoredGraph> = sets.iter().map(|s| party_graphs(s, &tol()).unwrap().1).collect();
    assert_eq!(permutations(5).len(), 120);
    for a in &colored {
        for b in &colored {
            let found = colored_equivalence(a, b).unwrap();
            assert!(brute_colored(a, b), "suite members are pairwise equivalent");
            assert!(colors_preserved(a, b, &found.unwrap()));
        }
    }
}

#[test]
fn colored_equivalence_matches_brute_force_on_random_graphs() {
    let mut r = rng(71);
    for _ in 0..300 {
        let n = r.random_range(1..7);
        let make = |r: &mut rand_chacha::ChaCha8Rng| {
            let mut g = EdgeColoredGraph::new(n);
            for i in 0..n {
                for j in i + 1..n {
                    for party in 0..2 {
                        if r.random::<f64>() < 0.4 {
                            g.add_color(i, j, party).unwrap();
                        }
                    }
                }
            }
            g
        };
        let a = make(&mut r);
        // half the time compare against a relabeled copy so positives occur
        let b = if r.random::<bool>() {
            let perm = &permutations(n)[r.random_range(0..permutations(n).len())];
            let mut b = EdgeColoredGraph::new(n);
            for ((i, j), cs) in a.edges() {
                for &c in cs {
                    b.add_color(perm[i], perm[j], c).unwrap();
                }
            }
            b
        } else {
            make(&mut r)
        };
        let found = colored_equivalence(&a, &b).unwrap();
        assert_eq!(found.is_some(), brute_colored(&a, &b));
        if let Some(p) = found {
            assert!(colors_preserved(&a, &b, &p));
        }
    }
}

#[test]
fn independence_number_matches_brute_force_up_to_twenty() {
    let mut r = rng(2024);
    for n in [14usize, 16, 18, 20] {
        for density in [0.15, 0.3, 0.5] {
            let g = random_graph(&mut r, n, density);
            assert_eq!(independence_number(&g).unwrap(), brute_independence(&g), "n = {n}");
        }
    }
}

#[test]
fn paley_alpha_matches_brute_force() {
    for (q, alpha) in [(5u64, 2usize), (9, 3), (13, 3), (17, 3)] {
        let g = paley(q).unwrap();
        assert_eq!(brute_independence(&g), alpha);
        assert_eq!(independence_number(&g).unwrap(), alpha);
    }
}

/// Eigenvalues of a real symmetric 3x3 matrix by the trigonometric formula.
fn symmetric3_eigenvalues(a: [[f64; 3]; 3]) -> [f64; 3] {
    let p1 = a[0][1].powi(2) + a[0][2].powi(2) + a[1][2].powi(2);
    let q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
    let p2 = (a[0][0] - q).powi(2) + (a[1][1] - q).powi(2) + (a[2][2] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    if p == 0.0 {
        return [q; 3];
    }
    let mut b = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            b[i][j] = (a[i][j] - if i == j { q } else { 0.0 }) / p;
        }
    }
    let det = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
        + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    let phi = (det / 2.0).clamp(-1.0, 1.0).acos() / 3.0;
    let top = q + 2.0 * p * phi.cos();
    let bottom = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
    [bottom, 3.0 * q - top - bottom, top]
}

#[test]
fn table1_strength_matches_closed_form_eigenvalues() {
    for (theta, reference) in table1_thetas().into_iter().zip(TABLE1_STRENGTH_REF) {
        let f = one_param_family(theta).unwrap();
        let mut m = [[0.0; 3]; 3];
        for v in &f.vectors {
            assert!(v.iter().all(|z| z.im == 0.0));
            let n2: f64 = v.iter().map(|z| z.re * z.re).sum();
            for i in 0..3 {
                for j in 0..3 {
                    m[i][j] += v[i].re * v[j].re / n2;
                }
            }
        }
        let oracle = symmetric3_eigenvalues(m)[2];
        let got = strength(&f.vectors).unwrap().value;
        assert!((got - oracle).abs() < 1e-10, "theta {theta}: {got} vs {oracle}");
        assert!((got - reference).abs() < 1e-3, "theta {theta}: {got} vs {reference}");
    }
}

fn euler_symbol(x: u64, p: u64) -> i64 {
    let mut acc = 1u64;
    let mut base = x % p;
    let mut e = (p - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    if acc == 1 {
        1
    } else {
        -1
    }
}

#[test]
fn quadres_overlaps_follow_the_gauss_sum() {
    for p in [5u64, 13, 17, 29] {
        let sp = (p as f64).sqrt();
        let n = (1.0 + sp) / 2.0;
        assert!((quadres_normalization(p).unwrap() - n).abs() < 1e-12);
        let f = quadres_local(p).unwrap();
        let len2 = n + (p - 1) as f64 / 2.0;
        for a in 0..p {
            for b in 0..p {
                if a == b {
                    continue;
                }
                let x = (b + p - a) % p;
                // sum over residues of exp(2 pi i q x / p) is (chi(x) sqrt p - 1) / 2
                let expected = (n + (euler_symbol(x, p) as f64 * sp - 1.0) / 2.0).abs() / len2;
                let got = inner(&f.vectors[a as usize], &f.vectors[b as usize]).norm();
                assert!((got - expected).abs() < 1e-12, "p {p} ({a},{b}): {got} vs {expected}");
                assert_eq!(got < 1e-9, euler_symbol(x, p) == -1);
            }
        }
    }
}

#[test]
fn pure_lee_term_matches_schmidt_coefficients() {
    let mut r = rng(5);
    for (da, db) in [(2, 2), (2, 3), (3, 3), (3, 4)] {
        for _ in 0..20 {
            let psi = random_vector(&mut r, da * db);
            let m = DMatrix::from_fn(da, db, |i, j| psi[i * db + j]);
            let purity: f64 = m.singular_values().iter().map(|s| s.powi(4)).sum();
            assert!((pure_lee_term(&psi, (da, db)).unwrap() - (1.0 - purity)).abs() < 1e-12);
        }
    }
}

#[test]
fn partial_trace_matches_index_formula() {
    let mut r = rng(9);
    for (da, db) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
        let rho = random_density(&mut r, da * db);
        let ra = partial_trace(&rho, &[da, db], 0).unwrap();
        let rb = partial_trace(&rho, &[da, db], 1).unwrap();
        for i in 0..da {
            for k in 0..da {
                let s: C64 = (0..db).map(|j| rho[(i * db + j, k * db + j)]).sum();
                assert!((ra[(i, k)] - s).norm() < 1e-14);
            }
        }
        for j in 0..db {
            for l in 0..db {
                let s: C64 = (0..da).map(|i| rho[(i * db + j, i * db + l)]).sum();
                assert!((rb[(j, l)] - s).norm() < 1e-14);
            }
        }
    }
}

#[test]
fn partial_transpose_matches_index_formula() {
    let mut r = rng(10);
    let (da, db) = (2, 3);
    let rho = random_density(&mut r, da * db);
    let pt = partial_transpose(&rho, &[da, db], 1).unwrap();
    for i in 0..da {
        for j in 0..db {
            for k in 0..da {
                for l in 0..db {
                    assert_eq!(pt[(i * db + j, k * db + l)], rho[(i * db + l, k * db + j)]);
                }
            }
        }
    }
}

#[test]
fn exact_verifier_agrees_with_witness_oracle() {
    let mut r = rng(808);
    let mut upbs = 0;
    let mut sets: Vec<ProductSet> = (0..40)
        .map(|i| product_oracle::random_orthogonal_set(&mut r, 2 + i % 2, 6))
        .collect();
    for base in [pyramid_upb().unwrap(), one_param_upb(TILES_THETA).unwrap()] {
        let s = product_oracle::scramble(&base, &mut r);
        sets.push(s.without(r.random_range(0..5)).unwrap());
        sets.push(s);
    }
    for ps in &sets {
        let verdict = verify_upb_exact(ps, &tol()).unwrap();
        let oracle = product_oracle::brute_witness(ps, &mut r);
        assert_eq!(verdict.status == UpbStatus::Extendible, oracle.is_some(), "{ps:?}");
        if let Some(w) = &verdict.witness {
            assert!(max_overlap_with(ps, w) <= 1e-9);
        }
        upbs += verdict.is_upb() as usize;
    }
    assert!(upbs >= 2);
}
