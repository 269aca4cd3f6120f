//! Constructors for the vector families and orthogonality-graph extraction.
//!
//! Every constructor returns unit vectors; norms are checked numerically
//! before a family is handed out.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::contextuality::{strength, theta_cycle, theta_cycle_complement};
use crate::error::{Error, Result};
use crate::graphs::{is_odd_prime, isomorphism, quadratic_residues, Graph};
use crate::linalg::{c, inner, norm, real_vector, ComplexVector, Tolerances, C64};

/// Unit-norm tolerance for constructed families.
pub const UNIT_TOL: f64 = 1e-9;

/// Constructor input recorded alongside a family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Param {
    Int(i64),
    Real(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorFamily {
    pub label: String,
    pub params: BTreeMap<String, Param>,
    pub dim: usize,
    #[serde(with = "crate::io::vectors")]
    pub vectors: Vec<ComplexVector>,
    /// Set when the construction is emitted outside its validity range.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

impl VectorFamily {
    fn build(label: &str, params: &[(&str, Param)], vectors: Vec<ComplexVector>) -> Result<Self> {
        let dim = vectors.first().map(|v| v.len()).ok_or(Error::EmptyFamily)?;
        let fam = VectorFamily {
            label: label.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            dim,
            vectors,
            warning: None,
        };
        fam.validate()?;
        Ok(fam)
    }

    /// Checks shared dimension and unit norms (used for JSON input too).
    pub fn validate(&self) -> Result<()> {
        if self.vectors.is_empty() {
            return Err(Error::EmptyFamily);
        }
        for (i, v) in self.vectors.iter().enumerate() {
            if v.len() != self.dim {
                return Err(Error::DimensionMismatch(format!(
                    "vector {i} has dimension {}, family declares {}",
                    v.len(),
                    self.dim
                )));
            }
            let dev = (norm(v) - 1.0).abs();
            if dev > UNIT_TOL {
                return Err(Error::Invalid(format!("vector {i} is not unit norm (|norm - 1| = {dev:e})")));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn max_norm_deviation(&self) -> f64 {
        self.vectors.iter().map(|v| (norm(v) - 1.0).abs()).fold(0.0, f64::max)
    }
}

/// One-parameter family of five vectors in `C^3` whose orthogonality graph
/// is the pentagon `0-2-4-1-3-0` for every admissible `theta`.
pub fn one_param_family(theta: f64) -> Result<VectorFamily> {
    let (s, co) = theta.sin_cos();
    let n = (co * co + s * s * co * co).sqrt();
    let rank_tol = Tolerances::default().rank_tol;
    if s.abs() <= rank_tol {
        return Err(Error::DegenerateParameter(format!("sin(theta) = 0 at theta = {theta}")));
    }
    if n <= rank_tol {
        return Err(Error::DegenerateParameter(format!(
            "normalization N = {n:e} vanishes at theta = {theta}"
        )));
    }
    let vectors = vec![
        real_vector(&[s * s, co, -s * co]),
        real_vector(&[1.0, 0.0, 0.0]),
        real_vector(&[co, 0.0, s]),
        real_vector(&[0.0, s * co / n, co / n]),
        real_vector(&[0.0, 1.0, 0.0]),
    ];
    VectorFamily::build("one-param", &[("theta", Param::Real(theta))], vectors)
}

/// `theta` at which the one-parameter family is locally equivalent to the
/// Pyramid vectors: `arccos((sqrt 5 - 1) / 2)`.
pub fn pyramid_theta() -> f64 {
    ((5f64.sqrt() - 1.0) / 2.0).acos()
}

/// `theta` of the Tiles representative.
pub const TILES_THETA: f64 = 3.0 * PI / 4.0;

/// Standard Pyramid vectors; `psi_j` is orthogonal to `psi_{j +- 2}`.
pub fn pyramid() -> Result<VectorFamily> {
    let scale = 2.0 / (5.0 + 5f64.sqrt()).sqrt();
    let h = 0.5 * (1.0 + 5f64.sqrt()).sqrt();
    let vectors = (0..5)
        .map(|j| {
            let a = 2.0 * PI * j as f64 / 5.0;
            real_vector(&[scale * a.cos(), scale * a.sin(), scale * h])
        })
        .collect();
    VectorFamily::build("pyramid", &[], vectors)
}

/// KCBS vectors with the customary labels; consecutive indices are
/// orthogonal.
pub fn kcbs() -> Result<VectorFamily> {
    let cp5 = (PI / 5.0).cos();
    let scale = 1.0 / (1.0 + cp5).sqrt();
    let h = cp5.sqrt();
    let (c4, s4) = ((4.0 * PI / 5.0).cos(), (4.0 * PI / 5.0).sin());
    let (c2, s2) = ((2.0 * PI / 5.0).cos(), (2.0 * PI / 5.0).sin());
    let raw = [
        [1.0, 0.0, h],
        [c4, s4, h],
        [c2, -s2, h],
        [c2, s2, h],
        [c4, -s4, h],
    ];
    let vectors = raw.iter().map(|r| real_vector(&r.map(|x| x * scale))).collect();
    VectorFamily::build("kcbs", &[], vectors)
}

fn is_odd_square(p: u64) -> bool {
    let r = (p as f64).sqrt().round() as u64;
    r * r == p && p % 2 == 1
}

/// Generalized Pyramid vectors in `C^3`, `p = 2m + 1`:
/// `v_j = N_p [cos(2 pi j/p), sin(2 pi j/p), h_p]` with
/// `h_p = sqrt(-cos(2 pi t/p))`, `N_p = (1 + |cos(2 pi t/p)|)^(-1/2)`.
/// `v_j` is orthogonal to `v_k` exactly when `j - k = +-t (mod p)`.
pub fn genpyramid_local(m: u64, t: i64) -> Result<VectorFamily> {
    if m < 2 {
        return Err(Error::BadOrder(format!("GenPyramid needs m >= 2, got {m}")));
    }
    let p = 2 * m + 1;
    // pi/2 <= 2 pi t/p <= pi  <=>  p <= 4t and 2t <= p
    if t < 0 || 4 * t < p as i64 || 2 * t > p as i64 {
        return Err(Error::BadT { t, p });
    }
    let ct = (2.0 * PI * t as f64 / p as f64).cos();
    let scale = 1.0 / (1.0 + ct.abs()).sqrt();
    let h = (-ct).max(0.0).sqrt();
    let vectors = (0..p)
        .map(|j| {
            let a = 2.0 * PI * j as f64 / p as f64;
            real_vector(&[scale * a.cos(), scale * a.sin(), scale * h])
        })
        .collect();
    let mut fam = VectorFamily::build(
        "genpyramid",
        &[
            ("m", Param::Int(m as i64)),
            ("t", Param::Int(t)),
            ("p", Param::Int(p as i64)),
        ],
        vectors,
    )?;
    if !is_odd_prime(p) && !is_odd_square(p) {
        fam.warning = Some(format!("p = {p} is neither prime nor an odd perfect square"));
    }
    Ok(fam)
}

fn check_odd_order(n: u64) -> Result<()> {
    if n < 5 || n.is_multiple_of(2) {
        return Err(Error::BadOrder(format!("needs an odd n >= 5, got {n}")));
    }
    Ok(())
}

/// Generalized KCBS vectors: a Lovász-optimal orthogonal representation of
/// `C_n` in `C^3`, `u_j = [cos phi, sin phi cos a_j, sin phi sin a_j]` with
/// `a_j = j pi (n-1)/n` and `cos^2 phi = theta(C_n)/n`.
pub fn gen_kcbs(n: u64) -> Result<VectorFamily> {
    check_odd_order(n)?;
    let cos2 = theta_cycle(n)?.value / n as f64;
    let (cp, sp) = (cos2.sqrt(), (1.0 - cos2).sqrt());
    let vectors = (0..n)
        .map(|j| {
            let a = j as f64 * PI * (n - 1) as f64 / n as f64;
            real_vector(&[cp, sp * a.cos(), sp * a.sin()])
        })
        .collect();
    VectorFamily::build("genkcbs", &[("n", Param::Int(n as i64))], vectors)
}

/// Lovász-optimal orthogonal representation of the complement of `C_n` in
/// `C^(n-2)`. Coordinate 0 is `sqrt(theta/n)`; for `m = 1..(n-3)/2`
/// coordinates `2m-1, 2m` hold `T_{j,m} (cos, sin) R_{j,m}`.
pub fn loor_cycle_complement(n: u64) -> Result<VectorFamily> {
    check_odd_order(n)?;
    let nf = n as f64;
    let cpn = (PI / nf).cos();
    let theta = theta_cycle_complement(n)?.value;
    let dim = (n - 2) as usize;
    let vectors = (0..n)
        .map(|j| {
            let mut v = vec![0.0; dim];
            v[0] = (theta / nf).sqrt();
            for m in 1..=(n - 3) / 2 {
                let sign = if (j * (m + 1)) % 2 == 0 { 1.0 } else { -1.0 };
                let alt = if (m + 1) % 2 == 0 { 1.0 } else { -1.0 };
                let t = sign * (2.0 * (cpn + alt * ((m + 1) as f64 * PI / nf).cos()) / (nf * cpn)).sqrt();
                let r = (j * (m + 1)) as f64 * PI / nf;
                v[(2 * m - 1) as usize] = t * r.cos();
                v[(2 * m) as usize] = t * r.sin();
            }
            real_vector(&v)
        })
        .collect();
    VectorFamily::build("loor-complement", &[("n", Param::Int(n as i64))], vectors)
}

/// Sorted basis labels `{0} u {2q mod p : q in Q_p}` of the QuadRes vectors.
pub fn quadres_labels(p: u64) -> Result<Vec<u64>> {
    check_quadres_prime(p)?;
    let mut labels: Vec<u64> = std::iter::once(0)
        .chain(quadratic_residues(p)?.iter().map(|q| 2 * q % p))
        .collect();
    labels.sort_unstable();
    labels.dedup();
    Ok(labels)
}

fn check_quadres_prime(p: u64) -> Result<()> {
    if !is_odd_prime(p) || p % 4 != 1 {
        return Err(Error::BadPrime(p));
    }
    Ok(())
}

/// QuadRes normalization `N = max(-S, 1 + S)` with the Gauss sum
/// `S = sum_{q in Q_p} exp(2 pi i q / p)`.
pub fn quadres_normalization(p: u64) -> Result<f64> {
    check_quadres_prime(p)?;
    let s: C64 = quadratic_residues(p)?
        .iter()
        .map(|&q| C64::from_polar(1.0, 2.0 * PI * q as f64 / p as f64))
        .sum();
    Ok((-s.re).max(1.0 + s.re))
}

/// QuadRes vectors `|Q(a)>`, `a in Z_p`, in `C^d` with `d = (p+1)/2`,
/// normalized. `Q(a)` and `Q(b)` are orthogonal iff `b - a` is a
/// non-residue.
pub fn quadres_local(p: u64) -> Result<VectorFamily> {
    let labels = quadres_labels(p)?;
    let big_n = quadres_normalization(p)?;
    let residues = quadratic_residues(p)?;
    let position = |label: u64| labels.binary_search(&label).expect("label present");
    let d = labels.len();
    let vectors = (0..p)
        .map(|a| {
            let mut v = ComplexVector::zeros(d);
            v[0] = c(big_n.sqrt(), 0.0);
            for &q in &residues {
                v[position(2 * q % p)] += C64::from_polar(1.0, 2.0 * PI * (q * a % p) as f64 / p as f64);
            }
            let nv = norm(&v);
            v / c(nv, 0.0)
        })
        .collect();
    VectorFamily::build("quadres", &[("p", Param::Int(p as i64))], vectors)
}

/// Edge `{i, j}` iff `|<v_i|v_j>| <= orth_tol` after normalization.
pub fn orthogonality_graph(vectors: &[ComplexVector], tol: &Tolerances) -> Result<Graph> {
    let dim = vectors.first().map(|v| v.len()).unwrap_or(0);
    if let Some(bad) = vectors.iter().find(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch(format!(
            "vectors of dimension {dim} and {} mixed",
            bad.len()
        )));
    }
    let norms: Vec<f64> = vectors.iter().map(norm).collect();
    let mut g = Graph::empty(vectors.len());
    for i in 0..vectors.len() {
        for j in i + 1..vectors.len() {
            let overlap = inner(&vectors[i], &vectors[j]).norm() / (norms[i] * norms[j]);
            if overlap <= tol.orth_tol {
                g.add_edge(i, j)?;
            }
        }
    }
    Ok(g)
}

/// `|<v_i|v_j>|` for all pairs.
pub fn gram_moduli(vectors: &[ComplexVector]) -> Vec<Vec<f64>> {
    vectors
        .iter()
        .map(|a| vectors.iter().map(|b| inner(a, b).norm()).collect())
        .collect()
}

/// Permutation `pi` with `|<a_i|a_j>| = |<b_pi(i)|b_pi(j)>|` within `tol`
/// for all pairs, if any.
pub fn gram_moduli_equivalence(a: &[ComplexVector], b: &[ComplexVector], tol: f64) -> Option<Vec<usize>> {
    if a.len() != b.len() {
        return None;
    }
    let ga = gram_moduli(a);
    let gb = gram_moduli(b);
    let order: Vec<usize> = (0..a.len()).collect();
    crate::graphs::backtrack_map(
        &order,
        |u, v| (ga[u][u] - gb[v][v]).abs() <= tol,
        |u, v, pu, pv| (ga[u][v] - gb[pu][pv]).abs() <= tol,
    )
}

/// Tolerance on `|strength - theta|` for a LOOR certificate.
pub const LOOR_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoorReport {
    /// Orthogonality graph isomorphic to the expected graph.
    pub graph_matches: bool,
    /// Orthogonality graph equal to the expected graph with the given labels.
    pub graph_identical: bool,
    pub max_norm_deviation: f64,
    pub strength: f64,
    pub theta_gap: f64,
    pub certified: bool,
}

/// Checks that `family` realizes `expected` and that its strength reaches
/// `expected_theta`.
pub fn verify_loor(family: &VectorFamily, expected: &Graph, expected_theta: f64) -> Result<LoorReport> {
    let tol = Tolerances::default();
    let g = orthogonality_graph(&family.vectors, &tol)?;
    let graph_identical = &g == expected;
    let graph_matches = graph_identical || (g.n() == expected.n() && isomorphism(&g, expected)?.is_some());
    let s = strength(&family.vectors)?.value;
    let gap = (s - expected_theta).abs();
    Ok(LoorReport {
        graph_matches,
        graph_identical,
        max_norm_deviation: family.max_norm_deviation(),
        strength: s,
        theta_gap: gap,
        certified: graph_matches && gap <= LOOR_TOL,
    })
}

/// Builds a named family, as used by the CLI.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilySpec {
    OneParam { theta: f64 },
    Pyramid,
    Kcbs,
    TilesRep,
    GenPyramid { m: u64, t: i64 },
    GenKcbs { n: u64 },
    LoorComplement { n: u64 },
    QuadRes { p: u64 },
}

impl FamilySpec {
    pub fn build(&self) -> Result<VectorFamily> {
        match *self {
            FamilySpec::OneParam { theta } => one_param_family(theta),
            FamilySpec::Pyramid => pyramid(),
            FamilySpec::Kcbs => kcbs(),
            FamilySpec::TilesRep => {
                let mut f = one_param_family(TILES_THETA)?;
                f.label = "tiles-rep".into();
                Ok(f)
            }
            FamilySpec::GenPyramid { m, t } => genpyramid_local(m, t),
            FamilySpec::GenKcbs { n } => gen_kcbs(n),
            FamilySpec::LoorComplement { n } => loor_cycle_complement(n),
            FamilySpec::QuadRes { p } => quadres_local(p),
        }
    }
}
