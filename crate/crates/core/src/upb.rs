//! Product-state sets, unextendibility verification, bound entangled states
//! and graph equivalence of UPBs.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{
    gen_kcbs, genpyramid_local, loor_cycle_complement, one_param_family, pyramid, quadres_local, VectorFamily,
};
use crate::graphs::{colored_equivalence, quadratic_residues, EdgeColoredGraph, Graph};
use crate::linalg::{
    hermitian_eig, inner, kron_all, norm, normalized, outer, partial_transpose, trace, ComplexMatrix, ComplexVector,
    Span, Tolerances, C64,
};

/// Assignment budget of the exact verifier (`parties^k`).
pub const EXACT_BUDGET: u128 = 10_000_000;
/// Subset budget of the bound verifier (`C(k, d-1)` per party).
pub const BOUND_BUDGET: u128 = 10_000_000;
/// Largest total dimension for which a density matrix is formed.
pub const MAX_STATE_DIM: usize = 4096;

/// Ordered multi-party product states with unit-norm local factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProductSet")]
pub struct ProductSet {
    party_dims: Vec<usize>,
    #[serde(with = "crate::io::factor_lists")]
    states: Vec<Vec<ComplexVector>>,
}

#[derive(Deserialize)]
struct RawProductSet {
    party_dims: Vec<usize>,
    #[serde(with = "crate::io::factor_lists")]
    states: Vec<Vec<ComplexVector>>,
}

impl TryFrom<RawProductSet> for ProductSet {
    type Error = Error;

    fn try_from(raw: RawProductSet) -> Result<Self> {
        ProductSet::new(raw.party_dims, raw.states)
    }
}

impl ProductSet {
    /// Validates dimensions and normalizes every local factor.
    pub fn new(party_dims: Vec<usize>, states: Vec<Vec<ComplexVector>>) -> Result<Self> {
        if party_dims.is_empty() || party_dims.contains(&0) {
            return Err(Error::DimensionMismatch(format!("bad party dimensions {party_dims:?}")));
        }
        if states.is_empty() {
            return Err(Error::EmptyFamily);
        }
        let mut out = Vec::with_capacity(states.len());
        for (j, state) in states.into_iter().enumerate() {
            if state.len() != party_dims.len() {
                return Err(Error::DimensionMismatch(format!(
                    "state {j} has {} factors, expected {}",
                    state.len(),
                    party_dims.len()
                )));
            }
            let mut factors = Vec::with_capacity(state.len());
            for (m, f) in state.into_iter().enumerate() {
                if f.len() != party_dims[m] {
                    return Err(Error::DimensionMismatch(format!(
                        "state {j} party {m} has dimension {}, expected {}",
                        f.len(),
                        party_dims[m]
                    )));
                }
                let unit = normalized(&f).ok_or_else(|| Error::Invalid(format!("state {j} party {m} is zero")))?;
                factors.push(unit);
            }
            out.push(factors);
        }
        Ok(ProductSet {
            party_dims,
            states: out,
        })
    }

    pub fn party_dims(&self) -> &[usize] {
        &self.party_dims
    }

    pub fn states(&self) -> &[Vec<ComplexVector>] {
        &self.states
    }

    pub fn parties(&self) -> usize {
        self.party_dims.len()
    }

    pub fn k(&self) -> usize {
        self.states.len()
    }

    pub fn total_dim(&self) -> usize {
        self.party_dims.iter().product()
    }

    /// Full tensor-product vector of state `j`.
    pub fn state_vector(&self, j: usize) -> ComplexVector {
        kron_all(&self.states[j])
    }

    /// Party-`m` factors of all states, in state order.
    pub fn party_factors(&self, m: usize) -> Vec<ComplexVector> {
        self.states.iter().map(|s| s[m].clone()).collect()
    }

    /// The same set with state `j` dropped.
    pub fn without(&self, j: usize) -> Result<ProductSet> {
        let states: Vec<_> = self
            .states
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != j)
            .map(|(_, s)| s.clone())
            .collect();
        ProductSet::new(self.party_dims.clone(), states)
    }

    /// `|<a|b>|` of the product states `a`, `b`.
    pub fn overlap(&self, a: usize, b: usize) -> f64 {
        self.states[a]
            .iter()
            .zip(&self.states[b])
            .map(|(x, y)| inner(x, y).norm())
            .product()
    }
}

/// `|psi_j> = v_{(c_1 j) mod p} x v_{(c_2 j) mod p} x ...` for multipliers
/// `c_l`.
pub fn assemble_mapped(family: &VectorFamily, multipliers: &[u64]) -> Result<ProductSet> {
    let p = family.vectors.len();
    if p == 0 || multipliers.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let states = (0..p)
        .map(|j| {
            multipliers
                .iter()
                .map(|&c| family.vectors[((c as u128 * j as u128) % p as u128) as usize].clone())
                .collect()
        })
        .collect();
    ProductSet::new(vec![family.dim; multipliers.len()], states)
}

pub fn pyramid_upb() -> Result<ProductSet> {
    assemble_mapped(&pyramid()?, &[1, 2])
}

/// Two-party set from the one-parameter family; `3 pi / 4` gives the Tiles
/// representative.
pub fn one_param_upb(theta: f64) -> Result<ProductSet> {
    assemble_mapped(&one_param_family(theta)?, &[1, 2])
}

/// GenPyramid set on `m` parties with multipliers `1..=m`.
pub fn genpyramid_upb(m: u64, t: i64) -> Result<ProductSet> {
    let multipliers: Vec<u64> = (1..=m).collect();
    assemble_mapped(&genpyramid_local(m, t)?, &multipliers)
}

/// `gen_kcbs(n)[j] x loor_cycle_complement(n)[j]` in `C^3 x C^(n-2)`.
pub fn gencontextual_upb(n: u64) -> Result<ProductSet> {
    let a = gen_kcbs(n)?;
    let b = loor_cycle_complement(n)?;
    let states = a.vectors.into_iter().zip(b.vectors).map(|(x, y)| vec![x, y]).collect();
    ProductSet::new(vec![a.dim, b.dim], states)
}

/// Smallest quadratic non-residue mod `p`.
pub fn smallest_nonresidue(p: u64) -> Result<u64> {
    let res = quadratic_residues(p)?;
    (2..p)
        .find(|x| !res.contains(x))
        .ok_or(Error::BadPrime(p))
}

/// `|Q(i)> x |Q(i x)>` with `x` the smallest non-residue.
pub fn quadres_upb(p: u64) -> Result<ProductSet> {
    let fam = quadres_local(p)?;
    let x = smallest_nonresidue(p)?;
    let states = (0..p)
        .map(|i| vec![fam.vectors[i as usize].clone(), fam.vectors[(i * x % p) as usize].clone()])
        .collect();
    ProductSet::new(vec![fam.dim, fam.dim], states)
}

/// Per-party orthogonality graphs and the colored graph recording every
/// party that separates each pair.
pub fn party_graphs(ps: &ProductSet, tol: &Tolerances) -> Result<(Vec<Graph>, EdgeColoredGraph)> {
    let k = ps.k();
    let mut graphs = vec![Graph::empty(k); ps.parties()];
    for i in 0..k {
        for j in i + 1..k {
            for (m, g) in graphs.iter_mut().enumerate() {
                if inner(&ps.states[i][m], &ps.states[j][m]).norm() <= tol.orth_tol {
                    g.add_edge(i, j)?;
                }
            }
        }
    }
    let colored = EdgeColoredGraph::from_party_graphs(&graphs)?;
    Ok((graphs, colored))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UpbStatus {
    CompleteBasis,
    #[serde(rename = "UPB")]
    Upb,
    Extendible,
    CertifiedUnextendible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyMethod {
    Exact,
    Bound,
    /// The bound first, exact enumeration when the bound is inconclusive.
    Auto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpbVerdict {
    pub status: UpbStatus,
    /// Product state orthogonal to every member (Extendible only).
    #[serde(default, with = "crate::io::opt_factors", skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<ComplexVector>>,
    /// Party assignment that produced the witness.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assignment: Option<Vec<usize>>,
    /// Per-party largest non-spanning subset sizes (bound method).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Vec<usize>>,
    pub condition1: bool,
    pub k: usize,
    pub party_dims: Vec<usize>,
    pub colored_graph: EdgeColoredGraph,
}

impl UpbVerdict {
    /// True for `UPB` and `CertifiedUnextendible`.
    pub fn is_upb(&self) -> bool {
        matches!(self.status, UpbStatus::Upb | UpbStatus::CertifiedUnextendible)
    }
}

fn check_condition1(ps: &ProductSet, colored: &EdgeColoredGraph) -> Result<()> {
    for i in 0..ps.k() {
        for j in i + 1..ps.k() {
            if colored.color(i, j).is_none() {
                return Err(Error::NotOrthogonalSet(i, j));
            }
        }
    }
    Ok(())
}

fn checked_pow(base: u128, exp: usize, cap: u128) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
        if acc > cap {
            return None;
        }
    }
    Some(acc)
}

/// Depth-first search over assignments of states to parties. State 0 is the
/// most significant digit and party `N-1` the smallest digit value, so the
/// first hit has the lowest assignment index under that encoding. A branch
/// dies once the assigned factors of some party span its space.
fn find_assignment(ps: &ProductSet, tol: &Tolerances) -> Option<(Vec<usize>, Vec<Span>)> {
    fn go(ps: &ProductSet, i: usize, spans: &mut Vec<Span>, assign: &mut Vec<usize>) -> bool {
        if i == ps.k() {
            return true;
        }
        for m in (0..ps.parties()).rev() {
            let saved = spans[m].clone();
            spans[m].push(&ps.states[i][m]);
            if !spans[m].is_full() {
                assign.push(m);
                if go(ps, i + 1, spans, assign) {
                    return true;
                }
                assign.pop();
            }
            spans[m] = saved;
        }
        false
    }
    let mut spans: Vec<Span> = ps.party_dims.iter().map(|&d| Span::new(d, tol.rank_tol)).collect();
    let mut assign = Vec::with_capacity(ps.k());
    go(ps, 0, &mut spans, &mut assign).then_some((assign, spans))
}

fn witness_from(ps: &ProductSet, spans: &[Span], tol: &Tolerances) -> Result<Vec<ComplexVector>> {
    let witness: Vec<ComplexVector> = spans
        .iter()
        .map(|s| s.complement_vector().ok_or_else(|| Error::Invalid("assigned span is full".into())))
        .collect::<Result<_>>()?;
    for (j, state) in ps.states.iter().enumerate() {
        let overlap: f64 = state.iter().zip(&witness).map(|(a, w)| inner(a, w).norm()).product();
        if overlap > tol.orth_tol {
            return Err(Error::Invalid(format!("witness overlaps state {j} by {overlap:e}")));
        }
    }
    Ok(witness)
}

/// Decides unextendibility exactly by exhausting party assignments.
pub fn verify_upb_exact(ps: &ProductSet, tol: &Tolerances) -> Result<UpbVerdict> {
    let (_, colored) = party_graphs(ps, tol)?;
    check_condition1(ps, &colored)?;
    let mut verdict = UpbVerdict {
        status: UpbStatus::Upb,
        witness: None,
        assignment: None,
        certificate: None,
        condition1: true,
        k: ps.k(),
        party_dims: ps.party_dims.clone(),
        colored_graph: colored,
    };
    if ps.k() >= ps.total_dim() {
        verdict.status = UpbStatus::CompleteBasis;
        return Ok(verdict);
    }
    if checked_pow(ps.parties() as u128, ps.k(), EXACT_BUDGET).is_none() {
        return Err(Error::BudgetExceeded(format!(
            "{}^{} assignments exceed {EXACT_BUDGET}",
            ps.parties(),
            ps.k()
        )));
    }
    if let Some((assign, spans)) = find_assignment(ps, tol) {
        verdict.status = UpbStatus::Extendible;
        verdict.witness = Some(witness_from(ps, &spans, tol)?);
        verdict.assignment = Some(assign);
    }
    Ok(verdict)
}

fn binomial(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    (0..r).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Largest number of `vectors` (in `C^dim`) lying in a common hyperplane.
///
/// Any non-spanning subset extends, by independent members of the full set,
/// to a hyperplane spanned by `dim - 1` independent members, so enumerating
/// independent `(dim-1)`-subsets is exact. A rank-deficient input is
/// non-spanning as a whole.
pub fn max_non_spanning(vectors: &[ComplexVector], dim: usize, tol: &Tolerances) -> Result<usize> {
    let k = vectors.len();
    let mut all = Span::new(dim, tol.rank_tol);
    for v in vectors {
        all.push(v);
    }
    if !all.is_full() {
        return Ok(k);
    }
    let r = dim - 1;
    if binomial(k, r) > BOUND_BUDGET {
        return Err(Error::BudgetExceeded(format!("C({k}, {r}) hyperplanes exceed {BOUND_BUDGET}")));
    }
    let mut best = 0;
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        let mut span = Span::new(dim, tol.rank_tol);
        if idx.iter().all(|&i| span.push(&vectors[i])) {
            let count = vectors.iter().filter(|v| span.contains(v)).count();
            best = best.max(count);
        }
        // next combination
        let mut pos = r;
        while pos > 0 && idx[pos - 1] == k - r + pos - 1 {
            pos -= 1;
        }
        if pos == 0 {
            break;
        }
        idx[pos - 1] += 1;
        for q in pos..r {
            idx[q] = idx[q - 1] + 1;
        }
    }
    Ok(best)
}

/// Certifies unextendibility when `sum_m s_m < k`, where `s_m` is the largest
/// non-spanning subset of party-`m` factors.
pub fn verify_upb_bound(ps: &ProductSet, tol: &Tolerances) -> Result<UpbVerdict> {
    let (_, colored) = party_graphs(ps, tol)?;
    check_condition1(ps, &colored)?;
    if ps.k() >= ps.total_dim() {
        return Ok(UpbVerdict {
            status: UpbStatus::CompleteBasis,
            witness: None,
            assignment: None,
            certificate: None,
            condition1: true,
            k: ps.k(),
            party_dims: ps.party_dims.clone(),
            colored_graph: colored,
        });
    }
    let certificate: Vec<usize> = (0..ps.parties())
        .map(|m| max_non_spanning(&ps.party_factors(m), ps.party_dims[m], tol))
        .collect::<Result<_>>()?;
    let sum: usize = certificate.iter().sum();
    if sum >= ps.k() {
        return Err(Error::Inconclusive { sum, k: ps.k() });
    }
    Ok(UpbVerdict {
        status: UpbStatus::CertifiedUnextendible,
        witness: None,
        assignment: None,
        certificate: Some(certificate),
        condition1: true,
        k: ps.k(),
        party_dims: ps.party_dims.clone(),
        colored_graph: colored,
    })
}

pub fn verify_upb(ps: &ProductSet, tol: &Tolerances, method: VerifyMethod) -> Result<UpbVerdict> {
    match method {
        VerifyMethod::Exact => verify_upb_exact(ps, tol),
        VerifyMethod::Bound => verify_upb_bound(ps, tol),
        VerifyMethod::Auto => match verify_upb_bound(ps, tol) {
            Err(bound_err @ (Error::Inconclusive { .. } | Error::BudgetExceeded(_))) => {
                match verify_upb_exact(ps, tol) {
                    Err(Error::BudgetExceeded(_)) => Err(bound_err),
                    other => other,
                }
            }
            other => other,
        },
    }
}

/// `k = sum_m (d_m - 1) + 1`.
pub fn is_minimal(ps: &ProductSet) -> bool {
    ps.k() == ps.party_dims.iter().map(|d| d - 1).sum::<usize>() + 1
}

/// Density matrix on a multi-party space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix {
    #[serde(with = "crate::io::matrix")]
    pub matrix: ComplexMatrix,
    pub party_dims: Vec<usize>,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix, party_dims: Vec<usize>) -> Result<Self> {
        let total: usize = party_dims.iter().product();
        if !matrix.is_square() || matrix.nrows() != total {
            return Err(Error::DimensionMismatch(format!(
                "matrix {}x{} does not match party dimensions {party_dims:?}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(DensityMatrix { matrix, party_dims })
    }

    pub fn pure(psi: &ComplexVector, party_dims: Vec<usize>) -> Result<Self> {
        let unit = normalized(psi).ok_or_else(|| Error::Invalid("zero state".into()))?;
        DensityMatrix::new(outer(&unit), party_dims)
    }

    pub fn trace(&self) -> C64 {
        trace(&self.matrix)
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(hermitian_eig(&self.matrix)?.values)
    }

    /// Number of eigenvalues above `psd_tol`.
    pub fn rank(&self, tol: &Tolerances) -> Result<usize> {
        Ok(self.eigenvalues()?.iter().filter(|&&e| e > tol.psd_tol).count())
    }

    pub fn expectation(&self, psi: &ComplexVector) -> f64 {
        inner(psi, &(&self.matrix * psi)).re
    }
}

/// `(I - sum_j |psi_j><psi_j|) / (D - k)` for a set verified as a UPB.
pub fn bound_entangled_state(ps: &ProductSet, verdict: &UpbVerdict) -> Result<DensityMatrix> {
    if !verdict.is_upb() || verdict.k != ps.k() || verdict.party_dims != ps.party_dims {
        return Err(Error::NotUpb);
    }
    let d = ps.total_dim();
    if d > MAX_STATE_DIM {
        return Err(Error::TooLarge(format!("total dimension {d} exceeds {MAX_STATE_DIM}")));
    }
    let mut m: ComplexMatrix = DMatrix::identity(d, d);
    for j in 0..ps.k() {
        m -= outer(&ps.state_vector(j));
    }
    m /= C64::new((d - ps.k()) as f64, 0.0);
    DensityMatrix::new(m, ps.party_dims.clone())
}

/// Smallest eigenvalue of the partial transpose on `party`.
pub fn min_pt_eigenvalue(rho: &DensityMatrix, party: usize) -> Result<f64> {
    let pt = partial_transpose(&rho.matrix, &rho.party_dims, party)?;
    Ok(hermitian_eig(&pt)?.min())
}

/// Partial transpose on `party` has no eigenvalue below `-psd_tol`.
pub fn is_ppt(rho: &DensityMatrix, party: usize, tol: &Tolerances) -> Result<bool> {
    Ok(min_pt_eigenvalue(rho, party)? >= -tol.psd_tol)
}

/// State permutation carrying the colored orthogonality structure of `a`
/// onto that of `b`.
pub fn upb_graph_equivalent(a: &ProductSet, b: &ProductSet, tol: &Tolerances) -> Result<Option<Vec<usize>>> {
    if a.k() != b.k() {
        return Err(Error::SizeMismatch {
            left: a.k(),
            right: b.k(),
        });
    }
    let (_, ca) = party_graphs(a, tol)?;
    let (_, cb) = party_graphs(b, tol)?;
    colored_equivalence(&ca, &cb)
}

/// `|<w|psi_j>|` for a product `w`, maximized over members.
pub fn max_overlap_with(ps: &ProductSet, w: &[ComplexVector]) -> f64 {
    ps.states
        .iter()
        .map(|s| s.iter().zip(w).map(|(a, b)| inner(a, b).norm()).product::<f64>())
        .fold(0.0, f64::max)
}

/// Unit-norm check on each factor, used on deserialized input.
pub fn max_factor_norm_deviation(ps: &ProductSet) -> f64 {
    ps.states
        .iter()
        .flatten()
        .map(|v| (norm(v) - 1.0).abs())
        .fold(0.0, f64::max)
}
