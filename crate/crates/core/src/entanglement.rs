//! Linear entropy of entanglement and its convex roof, bounded from above
//! by a Jacobi-pair search over pure-state decompositions.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::contextuality::strength;
use crate::error::{Error, Result};
use crate::families::{one_param_family, pyramid_theta, TILES_THETA};
use crate::linalg::{hermitian_eig, outer, C64, ComplexMatrix, ComplexVector, Tolerances};
use crate::upb::{bound_entangled_state, one_param_upb, verify_upb_exact, DensityMatrix};

/// Reconstruction tolerance for decompositions (max-entry norm).
pub const RECONSTRUCTION_TOL: f64 = 1e-8;

/// `1 - Tr(rho^2)`.
pub fn linear_entropy(rho: &DensityMatrix) -> f64 {
    let m = &rho.matrix;
    1.0 - (m * m).trace().re
}

fn bipartite(dims: &[usize]) -> Result<(usize, usize)> {
    match dims {
        [a, b] => Ok((*a, *b)),
        _ => Err(Error::DimensionMismatch(format!("expected two parties, got {dims:?}"))),
    }
}

/// `Tr(rho_A^2)` for the (unnormalized) vector `phi` read as a `dA x dB`
/// matrix, row index on party A.
fn reduced_purity(phi: &[C64], da: usize, db: usize) -> f64 {
    let mut total = 0.0;
    for a in 0..da {
        for a2 in 0..da {
            let mut s = C64::new(0.0, 0.0);
            for b in 0..db {
                s += phi[a * db + b] * phi[a2 * db + b].conj();
            }
            total += s.norm_sqr();
        }
    }
    total
}

/// `1 - Tr[(Tr_B |psi><psi|)^2]` for unit `psi` in `C^dA x C^dB`.
pub fn pure_lee_term(psi: &ComplexVector, dims: (usize, usize)) -> Result<f64> {
    let (da, db) = dims;
    if psi.len() != da * db {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} in {da}x{db}",
            psi.len()
        )));
    }
    let n2 = psi.norm_squared();
    if n2 == 0.0 {
        return Err(Error::Invalid("zero vector".into()));
    }
    Ok(1.0 - reduced_purity(psi.as_slice(), da, db) / (n2 * n2))
}

/// Pure-state decomposition `rho = sum_i w_i |chi_i><chi_i|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub weights: Vec<f64>,
    #[serde(with = "crate::io::vectors")]
    pub states: Vec<ComplexVector>,
}

impl Decomposition {
    /// From unnormalized vectors `phi_i = sqrt(w_i) chi_i`; zero vectors are
    /// dropped.
    pub fn from_scaled(phis: &[ComplexVector]) -> Self {
        let mut weights = Vec::new();
        let mut states = Vec::new();
        for phi in phis {
            let w = phi.norm_squared();
            if w > 0.0 {
                weights.push(w);
                states.push(phi / C64::new(w.sqrt(), 0.0));
            }
        }
        Decomposition { weights, states }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn scaled(&self) -> Vec<ComplexVector> {
        self.weights
            .iter()
            .zip(&self.states)
            .map(|(w, s)| s * C64::new(w.sqrt(), 0.0))
            .collect()
    }

    pub fn reconstruct(&self, dim: usize) -> ComplexMatrix {
        let mut m = DMatrix::zeros(dim, dim);
        for (w, s) in self.weights.iter().zip(&self.states) {
            m += outer(s) * C64::new(*w, 0.0);
        }
        m
    }
}

/// `sum_i w_i pure_lee_term(chi_i)` after checking the reconstruction.
pub fn decomposition_value(rho: &DensityMatrix, d: &Decomposition) -> Result<f64> {
    let dims = bipartite(&rho.party_dims)?;
    let dim = rho.matrix.nrows();
    if let Some(s) = d.states.iter().find(|s| s.len() != dim) {
        return Err(Error::DimensionMismatch(format!("state of length {} for dimension {dim}", s.len())));
    }
    let residual = (d.reconstruct(dim) - &rho.matrix).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if residual > RECONSTRUCTION_TOL {
        return Err(Error::BadDecomposition { residual });
    }
    d.weights
        .iter()
        .zip(&d.states)
        .map(|(w, s)| Ok(w * pure_lee_term(s, dims)?))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeeOptions {
    /// Decomposition size; `None` means `rank^2`.
    pub size: Option<usize>,
    pub restarts: usize,
    pub seed: u64,
    pub sweep_tol: f64,
    pub max_sweeps: usize,
    /// Extra starting point tried before the seeded restarts.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warm_start: Option<Decomposition>,
}

pub const DEFAULT_SEED: u64 = 1;

impl Default for LeeOptions {
    fn default() -> Self {
        LeeOptions {
            size: None,
            restarts: 64,
            seed: DEFAULT_SEED,
            sweep_tol: 1e-10,
            max_sweeps: 500,
            warm_start: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeeResult {
    /// Upper bound on the linear entropy of entanglement.
    pub value: f64,
    pub best: Decomposition,
    pub size: usize,
    pub rank: usize,
    pub restarts_used: usize,
    /// Restart that produced `best` (`None` for the warm start).
    pub best_restart: Option<usize>,
    pub converged: bool,
    pub sweeps: usize,
    pub seed: u64,
}

/// Angle resolution of the pair search.
const ANGLE_TOL: f64 = 1e-8;
const GRID_BETA: usize = 8;
const GRID_ALPHA: usize = 4;
const GOLDEN_ROUNDS: usize = 2;

/// Pair objective `f(x A + y B) + f(-conj(y) A + x B)` with
/// `x = cos(beta)`, `y = sin(beta) e^{i alpha}`, and
/// `f(phi) = |phi|^2 - Tr(rho_A^2) / |phi|^2`, evaluated in O(1) from
/// `T_kl = Tr(P_k P_l)` for `P = (AA^+, AB^+, BA^+, BB^+)`.
struct PairModel {
    t: [[C64; 4]; 4],
    tr: [C64; 4],
}

impl PairModel {
    fn new(a: &[C64], b: &[C64], da: usize, db: usize) -> Self {
        let prod = |x: &[C64], y: &[C64]| -> Vec<C64> {
            let mut p = vec![C64::new(0.0, 0.0); da * da];
            for i in 0..da {
                for j in 0..da {
                    let mut s = C64::new(0.0, 0.0);
                    for k in 0..db {
                        s += x[i * db + k] * y[j * db + k].conj();
                    }
                    p[i * da + j] = s;
                }
            }
            p
        };
        let ps = [prod(a, a), prod(a, b), prod(b, a), prod(b, b)];
        let mut t = [[C64::new(0.0, 0.0); 4]; 4];
        let mut tr = [C64::new(0.0, 0.0); 4];
        for k in 0..4 {
            tr[k] = (0..da).map(|i| ps[k][i * da + i]).sum();
            for l in k..4 {
                let mut s = C64::new(0.0, 0.0);
                for i in 0..da {
                    for j in 0..da {
                        s += ps[k][i * da + j] * ps[l][j * da + i];
                    }
                }
                t[k][l] = s;
                t[l][k] = s;
            }
        }
        PairModel { t, tr }
    }

    fn term(&self, c: &[C64; 4]) -> f64 {
        let n2: f64 = (0..4).map(|k| c[k] * self.tr[k]).sum::<C64>().re;
        if n2 <= 1e-300 {
            return 0.0;
        }
        let mut pur = C64::new(0.0, 0.0);
        for k in 0..4 {
            for l in 0..4 {
                pur += c[k] * c[l] * self.t[k][l];
            }
        }
        n2 - pur.re / n2
    }

    fn value(&self, beta: f64, alpha: f64) -> f64 {
        let x = beta.cos();
        let y = C64::from_polar(beta.sin(), alpha);
        let xr = C64::new(x, 0.0);
        let xy = xr * y;
        let xyc = xr * y.conj();
        let y2 = C64::new(y.norm_sqr(), 0.0);
        let x2 = C64::new(x * x, 0.0);
        self.term(&[x2, xyc, xy, y2]) + self.term(&[y2, -xyc, -xy, x2])
    }
}

fn golden<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Best `(beta, alpha, value)` for the pair model: coarse grid, then
/// alternating golden-section refinement around the best grid point.
fn best_rotation(model: &PairModel) -> (f64, f64, f64) {
    let hb = PI / GRID_BETA as f64;
    let ha = PI / GRID_ALPHA as f64;
    let mut best = (0.0, 0.0, model.value(0.0, 0.0));
    for ib in 0..GRID_BETA {
        let beta = -PI / 2.0 + (ib as f64 + 1.0) * hb;
        for ia in 0..GRID_ALPHA {
            let alpha = ia as f64 * ha;
            let v = model.value(beta, alpha);
            if v < best.2 {
                best = (beta, alpha, v);
            }
        }
    }
    let (mut beta, mut alpha, mut val) = best;
    for _ in 0..GOLDEN_ROUNDS {
        let (b, vb) = golden(|b| model.value(b, alpha), beta - hb, beta + hb, ANGLE_TOL);
        if vb < val {
            beta = b;
            val = vb;
        }
        let (a, va) = golden(|a| model.value(beta, a), alpha - ha, alpha + ha, ANGLE_TOL);
        if va < val {
            alpha = a;
            val = va;
        }
    }
    (beta, alpha, val)
}

struct Problem {
    da: usize,
    db: usize,
    tol: f64,
    max_sweeps: usize,
}

impl Problem {
    fn term(&self, phi: &[C64]) -> f64 {
        let n2: f64 = phi.iter().map(|z| z.norm_sqr()).sum();
        if n2 <= 1e-300 {
            return 0.0;
        }
        n2 - reduced_purity(phi, self.da, self.db) / n2
    }

    fn total(&self, phis: &[Vec<C64>]) -> f64 {
        phis.iter().map(|p| self.term(p)).sum()
    }

    /// Runs Jacobi sweeps in place; returns (value, converged, sweeps).
    fn optimize(&self, phis: &mut [Vec<C64>]) -> (f64, bool, usize) {
        let l = phis.len();
        let mut current = self.total(phis);
        for sweep in 1..=self.max_sweeps {
            let before = current;
            for i in 0..l {
                for j in i + 1..l {
                    let model = PairModel::new(&phis[i], &phis[j], self.da, self.db);
                    let old = model.value(0.0, 0.0);
                    let (beta, alpha, val) = best_rotation(&model);
                    if val < old {
                        let x = C64::new(beta.cos(), 0.0);
                        let y = C64::from_polar(beta.sin(), alpha);
                        for k in 0..phis[i].len() {
                            let (a, b) = (phis[i][k], phis[j][k]);
                            phis[i][k] = x * a + y * b;
                            phis[j][k] = -y.conj() * a + x * b;
                        }
                    }
                }
            }
            current = self.total(phis);
            if before - current < self.tol {
                return (current, true, sweep);
            }
        }
        (current, false, self.max_sweeps)
    }
}

/// Random `l x r` isometry (orthonormal columns) from a complex Gaussian
/// matrix.
fn random_isometry(l: usize, r: usize, rng: &mut ChaCha20Rng) -> ComplexMatrix {
    let g = DMatrix::from_fn(l, r, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    });
    g.qr().q()
}

fn restart_rng(seed: u64, restart: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}

type Candidate = (f64, Vec<Vec<C64>>, Option<usize>, bool, usize);

/// Upper bound on `E_l(rho) = min sum_i p_i S_l(Tr_B |psi_i><psi_i|)`.
///
/// Size-`L` decompositions are isometric mixings of the scaled eigenvectors.
/// Restart 0 starts from the eigendecomposition itself (padded with zero
/// vectors); restart `r > 0` from a random isometry drawn from stream `r` of
/// the master seed. The minimum over restarts is returned, ties going to the
/// lowest index.
pub fn lee_upper_bound(rho: &DensityMatrix, opts: &LeeOptions) -> Result<LeeResult> {
    let (da, db) = bipartite(&rho.party_dims)?;
    let tol = Tolerances::default();
    let eig = hermitian_eig(&rho.matrix)?;
    let scaled: Vec<ComplexVector> = eig
        .values
        .iter()
        .zip(&eig.vectors)
        .rev()
        .filter(|(v, _)| **v > tol.psd_tol)
        .map(|(v, e)| e * C64::new(v.sqrt(), 0.0))
        .collect();
    let r = scaled.len();
    if r == 0 {
        return Err(Error::Invalid("density matrix has no positive eigenvalue".into()));
    }
    let l = opts.size.unwrap_or(r * r);
    if l < r {
        return Err(Error::BadSize { size: l, rank: r });
    }
    let dim = da * db;
    let problem = Problem {
        da,
        db,
        tol: opts.sweep_tol,
        max_sweeps: opts.max_sweeps,
    };

    // (value, vectors, restart, converged, sweeps)
    let mut best: Option<Candidate> = None;
    let mut consider = |phis: Vec<Vec<C64>>, label: Option<usize>| {
        let mut phis = phis;
        let (v, conv, sweeps) = problem.optimize(&mut phis);
        if best.as_ref().is_none_or(|b| v < b.0) {
            best = Some((v, phis, label, conv, sweeps));
        }
    };

    if let Some(warm) = &opts.warm_start {
        let mut phis: Vec<Vec<C64>> = warm.scaled().iter().map(|p| p.as_slice().to_vec()).collect();
        if phis.iter().any(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch("warm start has the wrong dimension".into()));
        }
        phis.resize(phis.len().max(l), vec![C64::new(0.0, 0.0); dim]);
        consider(phis, None);
    }
    for restart in 0..opts.restarts {
        let phis: Vec<Vec<C64>> = if restart == 0 {
            (0..l)
                .map(|i| {
                    scaled
                        .get(i)
                        .map(|s| s.as_slice().to_vec())
                        .unwrap_or_else(|| vec![C64::new(0.0, 0.0); dim])
                })
                .collect()
        } else {
            let u = random_isometry(l, r, &mut restart_rng(opts.seed, restart));
            (0..l)
                .map(|i| {
                    let mut phi = vec![C64::new(0.0, 0.0); dim];
                    for (k, s) in scaled.iter().enumerate() {
                        let coef = u[(i, k)];
                        for (p, z) in phi.iter_mut().zip(s.iter()) {
                            *p += coef * z;
                        }
                    }
                    phi
                })
                .collect()
        };
        consider(phis, Some(restart));
    }

    let Some((_, phis, best_restart, converged, sweeps)) = best else {
        return Err(Error::Invalid("no restarts requested".into()));
    };
    let vectors: Vec<ComplexVector> = phis.into_iter().map(ComplexVector::from_vec).collect();
    let decomposition = Decomposition::from_scaled(&vectors);
    let value = decomposition_value(rho, &decomposition)?.max(0.0);
    Ok(LeeResult {
        value,
        best: decomposition,
        size: l,
        rank: r,
        restarts_used: opts.restarts,
        best_restart,
        converged,
        sweeps,
        seed: opts.seed,
    })
}

/// Reference strength and LEE values per row.
pub const TABLE1_STRENGTH_REF: [f64; 5] = [2.23607, 2.2287, 2.2254, 2.1641, 2.0590];
pub const TABLE1_LEE_REF: [f64; 5] = [0.07295, 0.06519, 0.06335, 0.01278, 0.00029];
pub const TABLE1_LABELS: [&str; 5] = ["arccos((sqrt5-1)/2)", "3pi/4", "pi/3", "pi/6", "pi/12"];

pub fn table1_thetas() -> [f64; 5] {
    [pyramid_theta(), TILES_THETA, PI / 3.0, PI / 6.0, PI / 12.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub label: String,
    pub theta: f64,
    pub strength: f64,
    pub strength_ref: f64,
    pub strength_delta: f64,
    /// Upper bound from the optimizer.
    pub lee: f64,
    pub lee_ref: f64,
    pub lee_delta: f64,
    pub converged: bool,
}

/// Bound entangled state of the two-party one-parameter set at `theta`.
pub fn one_param_bound_entangled_state(theta: f64) -> Result<DensityMatrix> {
    let ps = one_param_upb(theta)?;
    let verdict = verify_upb_exact(&ps, &Tolerances::default())?;
    bound_entangled_state(&ps, &verdict)
}

pub fn table1_row(index: usize, opts: &LeeOptions) -> Result<Table1Row> {
    let theta = table1_thetas()[index];
    let s = strength(&one_param_family(theta)?.vectors)?.value;
    let rho = one_param_bound_entangled_state(theta)?;
    let lee = lee_upper_bound(&rho, opts)?;
    Ok(Table1Row {
        label: TABLE1_LABELS[index].to_string(),
        theta,
        strength: s,
        strength_ref: TABLE1_STRENGTH_REF[index],
        strength_delta: (s - TABLE1_STRENGTH_REF[index]).abs(),
        lee: lee.value,
        lee_ref: TABLE1_LEE_REF[index],
        lee_delta: (lee.value - TABLE1_LEE_REF[index]).abs(),
        converged: lee.converged,
    })
}

pub fn table1(opts: &LeeOptions) -> Result<Vec<Table1Row>> {
    (0..5).map(|i| table1_row(i, opts)).collect()
}
