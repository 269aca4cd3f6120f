use super::{complement, Graph};
use crate::error::{Error, Result};

/// Vertex budget of the bitset branch-and-bound.
pub const MAX_MIS_VERTICES: usize = 64;

struct Bitsets {
    adj: Vec<u64>,
}

impl Bitsets {
    fn new(g: &Graph) -> Result<Self> {
        if g.n() > MAX_MIS_VERTICES {
            return Err(Error::TooLarge(format!(
                "independence number limited to {MAX_MIS_VERTICES} vertices, got {}",
                g.n()
            )));
        }
        let mut adj = vec![0u64; g.n()];
        for (a, b) in g.edges() {
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
        Ok(Bitsets { adj })
    }

    /// Number of cliques in a greedy clique cover of `cands`; an upper bound
    /// on the independent vertices available there.
    fn clique_cover_bound(&self, mut cands: u64) -> usize {
        let mut cliques = 0;
        while cands != 0 {
            let v = cands.trailing_zeros() as usize;
            let mut common = self.adj[v] & cands;
            cands &= !(1 << v);
            while common != 0 {
                let u = common.trailing_zeros() as usize;
                common &= self.adj[u];
                cands &= !(1 << u);
            }
            cliques += 1;
        }
        cliques
    }

    fn search(&self, cands: u64, size: usize, best: &mut usize) {
        if cands == 0 {
            *best = (*best).max(size);
            return;
        }
        if size + self.clique_cover_bound(cands) <= *best {
            return;
        }
        // Branch on the vertex with most neighbours among the candidates.
        let mut pick = usize::MAX;
        let mut pick_deg = 0u32;
        let mut rest = cands;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let d = (self.adj[v] & cands).count_ones();
            if pick == usize::MAX || d > pick_deg {
                pick = v;
                pick_deg = d;
            }
        }
        if pick_deg == 0 {
            *best = (*best).max(size + cands.count_ones() as usize);
            return;
        }
        let bit = 1u64 << pick;
        self.search(cands & !bit & !self.adj[pick], size + 1, best);
        self.search(cands & !bit, size, best);
    }

    fn mis_size(&self, cands: u64) -> usize {
        let mut best = 0;
        self.search(cands, 0, &mut best);
        best
    }
}

fn all_vertices(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Exact independence number by branch-and-bound.
pub fn independence_number(g: &Graph) -> Result<usize> {
    let b = Bitsets::new(g)?;
    Ok(b.mis_size(all_vertices(g.n())))
}

/// A maximum independent set; the lexicographically smallest one.
pub fn maximum_independent_set(g: &Graph) -> Result<Vec<usize>> {
    let b = Bitsets::new(g)?;
    let mut cands = all_vertices(g.n());
    let alpha = b.mis_size(cands);
    let mut chosen = Vec::with_capacity(alpha);
    for v in 0..g.n() {
        let bit = 1u64 << v;
        if cands & bit == 0 {
            continue;
        }
        let with_v = cands & !bit & !b.adj[v];
        if chosen.len() + 1 + b.mis_size(with_v) == alpha {
            chosen.push(v);
            cands = with_v;
        } else {
            cands &= !bit;
        }
    }
    Ok(chosen)
}

pub fn clique_number(g: &Graph) -> Result<usize> {
    independence_number(&complement(g))
}
