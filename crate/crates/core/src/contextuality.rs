//! Contextual strength of vector families, closed-form Lovász numbers of
//! cycles, cycle complements and Paley graphs, and the quantum-contextual
//! graph test.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{complement, independence_number, is_cycle, isomorphism, paley, GaloisField, Graph};
use crate::linalg::{hermitian_eig, outer, ComplexMatrix, ComplexVector};

/// Largest value of `sum_i |<psi|v_i>|^2` over unit `psi`, with the
/// maximizing handle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrengthReport {
    pub value: f64,
    #[serde(with = "crate::io::opt_vector")]
    pub handle: Option<ComplexVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// Top eigenvalue and eigenvector of the projector sum `sum_i |v_i><v_i|`.
pub fn strength(vectors: &[ComplexVector]) -> Result<StrengthReport> {
    let Some(first) = vectors.first() else {
        return Err(Error::DimensionMismatch("strength of an empty family".into()));
    };
    let dim = first.len();
    let mut sum = ComplexMatrix::zeros(dim, dim);
    for v in vectors {
        if v.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "vectors of dimension {dim} and {} mixed",
                v.len()
            )));
        }
        sum += outer(v);
    }
    let eig = hermitian_eig(&sum)?;
    let (value, handle) = eig.max();
    Ok(StrengthReport {
        value,
        handle: Some(handle.clone()),
        label: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThetaFamily {
    Cycle,
    CycleComplement,
    Paley,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaValue {
    pub family: ThetaFamily,
    pub parameter: u64,
    pub value: f64,
}

fn check_odd_cycle(n: u64) -> Result<()> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::BadOrder(format!("closed form needs an odd n >= 3, got {n}")));
    }
    Ok(())
}

/// `theta(C_n) = n cos(pi/n) / (1 + cos(pi/n))` for odd `n`.
pub fn theta_cycle(n: u64) -> Result<ThetaValue> {
    check_odd_cycle(n)?;
    let c = (PI / n as f64).cos();
    Ok(ThetaValue {
        family: ThetaFamily::Cycle,
        parameter: n,
        value: n as f64 * c / (1.0 + c),
    })
}

/// `theta(complement C_n) = (1 + cos(pi/n)) / cos(pi/n)` for odd `n`.
pub fn theta_cycle_complement(n: u64) -> Result<ThetaValue> {
    check_odd_cycle(n)?;
    let c = (PI / n as f64).cos();
    Ok(ThetaValue {
        family: ThetaFamily::CycleComplement,
        parameter: n,
        value: (1.0 + c) / c,
    })
}

/// Paley graphs are self-complementary and vertex transitive, so
/// `theta(P_q)^2 = q`.
pub fn theta_paley(q: u64) -> Result<ThetaValue> {
    if q % 4 != 1 {
        return Err(Error::BadOrder(format!("Paley graphs need q = 1 mod 4, got {q}")));
    }
    GaloisField::new(q)?;
    Ok(ThetaValue {
        family: ThetaFamily::Paley,
        parameter: q,
        value: (q as f64).sqrt(),
    })
}

/// Closed-form Lovász number when `g` is recognized as an odd cycle, the
/// complement of one, or a supported Paley graph (up to isomorphism).
pub fn closed_form_theta(g: &Graph) -> Result<Option<ThetaValue>> {
    let n = g.n() as u64;
    if n >= 3 && n % 2 == 1 {
        if is_cycle(g) {
            return theta_cycle(n).map(Some);
        }
        if is_cycle(&complement(g)) {
            return theta_cycle_complement(n).map(Some);
        }
    }
    if n % 4 == 1 && GaloisField::new(n).is_ok() && g.is_regular(((n - 1) / 2) as usize) {
        let reference = paley(n)?;
        if isomorphism(g, &reference)?.is_some() {
            return theta_paley(n).map(Some);
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QcgVerdict {
    #[serde(rename = "QCG")]
    Qcg,
    NotQCG,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QcgReport {
    pub verdict: QcgVerdict,
    pub alpha: usize,
    /// Closed-form value, when the graph family is recognized.
    pub theta: Option<ThetaValue>,
    /// Lower bound on theta supplied by the caller.
    pub lower_bound: Option<f64>,
}

const QCG_MARGIN: f64 = 1e-9;

/// Decides `theta(G) > alpha(G)`.
///
/// `realized_strength` is the strength of some orthogonal representation of
/// `g`, hence a lower bound on `theta(G)`; it is used when no closed form
/// applies.
pub fn is_qcg(g: &Graph, realized_strength: Option<f64>) -> Result<QcgReport> {
    let alpha = independence_number(g)?;
    let theta = closed_form_theta(g)?;
    let verdict = match (theta, realized_strength) {
        (Some(t), _) if t.value > alpha as f64 + QCG_MARGIN => QcgVerdict::Qcg,
        (Some(_), _) => QcgVerdict::NotQCG,
        (None, Some(lb)) if lb > alpha as f64 + QCG_MARGIN => QcgVerdict::Qcg,
        (None, _) => QcgVerdict::Unknown,
    };
    Ok(QcgReport {
        verdict,
        alpha,
        theta,
        lower_bound: realized_strength,
    })
}

pub const TABLE2_ORDERS: [u64; 6] = [5, 9, 13, 17, 25, 29];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table2Row {
    pub q: u64,
    pub theta: f64,
    /// `theta` written exactly, e.g. `"3"` or `"sqrt(13)"`.
    pub theta_exact: String,
    pub alpha: usize,
    pub ratio: f64,
}

/// Lovász and independence numbers of the Paley graphs `P_q`,
/// `q in {5, 9, 13, 17, 25, 29}`; alpha by exact search on the constructed
/// graph.
pub fn table2() -> Result<Vec<Table2Row>> {
    TABLE2_ORDERS
        .iter()
        .map(|&q| {
            let theta = theta_paley(q)?.value;
            let alpha = independence_number(&paley(q)?)?;
            let root = (q as f64).sqrt().round() as u64;
            let theta_exact = if root * root == q {
                root.to_string()
            } else {
                format!("sqrt({q})")
            };
            Ok(Table2Row {
                q,
                theta,
                theta_exact,
                alpha,
                ratio: theta / alpha as f64,
            })
        })
        .collect()
}
