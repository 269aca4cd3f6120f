use std::collections::BTreeSet;

use super::Graph;
use crate::error::{Error, Result};

pub fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Nonzero squares modulo an odd prime.
pub fn quadratic_residues(p: u64) -> Result<BTreeSet<u64>> {
    if !is_odd_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok((1..p).map(|x| x * x % p).collect())
}

/// `GF(p)` or `GF(p^2)` for an odd prime `p`.
///
/// `GF(p^2)` is `GF(p)[x] / (x^2 - s)` with `s` the smallest non-square mod
/// `p`. Element `a + b x` has index `a + b p`, so the field elements are
/// exactly `0..q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GaloisField {
    p: u64,
    degree: u32,
    s: u64,
}

impl GaloisField {
    pub fn new(q: u64) -> Result<Self> {
        if is_odd_prime(q) {
            return Ok(GaloisField { p: q, degree: 1, s: 0 });
        }
        let root = (q as f64).sqrt().round() as u64;
        if root * root == q && is_odd_prime(root) {
            let residues = quadratic_residues(root)?;
            let s = (2..root)
                .find(|x| !residues.contains(x))
                .expect("an odd prime has non-residues");
            return Ok(GaloisField {
                p: root,
                degree: 2,
                s,
            });
        }
        Err(Error::BadOrder(format!(
            "{q} is not an odd prime or the square of one"
        )))
    }

    pub fn order(&self) -> u64 {
        self.p.pow(self.degree)
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Constant term `s` of the reduction polynomial `x^2 - s` (degree 2).
    pub fn reduction_constant(&self) -> Option<u64> {
        (self.degree == 2).then_some(self.s)
    }

    fn split(&self, e: u64) -> (u64, u64) {
        (e % self.p, e / self.p)
    }

    fn join(&self, a: u64, b: u64) -> u64 {
        a + b * self.p
    }

    pub fn add(&self, x: u64, y: u64) -> u64 {
        let (a, b) = self.split(x);
        let (c, d) = self.split(y);
        self.join((a + c) % self.p, (b + d) % self.p)
    }

    pub fn neg(&self, x: u64) -> u64 {
        let (a, b) = self.split(x);
        self.join((self.p - a) % self.p, (self.p - b) % self.p)
    }

    pub fn sub(&self, x: u64, y: u64) -> u64 {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: u64, y: u64) -> u64 {
        let p = self.p;
        let (a, b) = self.split(x);
        let (c, d) = self.split(y);
        // (a + b x)(c + d x) = (ac + s bd) + (ad + bc) x
        let re = (a * c + self.s * (b * d % p)) % p;
        let im = (a * d + b * c) % p;
        self.join(re, im)
    }

    pub fn pow(&self, x: u64, mut e: u64) -> u64 {
        let mut base = x;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Euler's criterion: a nonzero `x` is a square iff `x^((q-1)/2) = 1`.
    pub fn is_square(&self, x: u64) -> bool {
        x != 0 && self.pow(x, (self.order() - 1) / 2) == 1
    }
}

/// Paley graph on `GF(q)`: `a ~ b` iff `a - b` is a nonzero square.
pub fn paley(q: u64) -> Result<Graph> {
    if q % 4 != 1 {
        return Err(Error::BadOrder(format!("Paley graphs need q = 1 mod 4, got {q}")));
    }
    let field = GaloisField::new(q)?;
    let n = q as usize;
    let mut g = Graph::empty(n);
    for a in 0..q {
        for b in a + 1..q {
            if field.is_square(field.sub(a, b)) {
                g.add_edge(a as usize, b as usize)?;
            }
        }
    }
    Ok(g)
}
