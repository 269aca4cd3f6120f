use super::{EdgeColoredGraph, Graph};
use crate::error::{Error, Result};

/// Vertex budget for colored-graph equivalence.
pub const MAX_EQUIVALENCE_VERTICES: usize = 16;

/// Backtracking search for a bijection `pi` with `vertex_ok(v, pi(v))` and
/// `pair_ok(u, v, pi(u), pi(v))` for all mapped pairs. Vertices are placed
/// in `order`; candidates are tried in increasing index order, so the result
/// is deterministic.
pub(crate) fn backtrack<V, P>(order: &[usize], vertex_ok: V, pair_ok: P) -> Option<Vec<usize>>
where
    V: Fn(usize, usize) -> bool,
    P: Fn(usize, usize, usize, usize) -> bool,
{
    let n = order.len();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn go<V, P>(depth: usize, order: &[usize], map: &mut [usize], used: &mut [bool], vertex_ok: &V, pair_ok: &P) -> bool
    where
        V: Fn(usize, usize) -> bool,
        P: Fn(usize, usize, usize, usize) -> bool,
    {
        if depth == order.len() {
            return true;
        }
        let u = order[depth];
        for cand in 0..order.len() {
            if used[cand] || !vertex_ok(u, cand) {
                continue;
            }
            let consistent = order[..depth].iter().all(|&w| pair_ok(w, u, map[w], cand));
            if !consistent {
                continue;
            }
            map[u] = cand;
            used[cand] = true;
            if go(depth + 1, order, map, used, vertex_ok, pair_ok) {
                return true;
            }
            used[cand] = false;
            map[u] = usize::MAX;
        }
        false
    }
    go(0, order, &mut map, &mut used, &vertex_ok, &pair_ok).then_some(map)
}

/// Pairwise color codes: bit `k` set when party `k` colors the pair.
type ColorMatrix = Vec<Vec<u64>>;

fn colored_matrix(g: &EdgeColoredGraph) -> Result<ColorMatrix> {
    let n = g.n();
    let mut m = vec![vec![0u64; n]; n];
    for ((i, j), parties) in g.edges() {
        let mut code = 0u64;
        for &p in parties {
            if p >= 64 {
                return Err(Error::TooLarge(format!("party id {p} exceeds 63")));
            }
            code |= 1 << p;
        }
        m[i][j] = code;
        m[j][i] = code;
    }
    Ok(m)
}

fn plain_matrix(g: &Graph) -> ColorMatrix {
    let n = g.n();
    let mut m = vec![vec![0u64; n]; n];
    for (i, j) in g.edges() {
        m[i][j] = 1;
        m[j][i] = 1;
    }
    m
}

fn signatures(m: &ColorMatrix) -> Vec<Vec<u64>> {
    m.iter()
        .enumerate()
        .map(|(v, row)| {
            let mut s: Vec<u64> = row.iter().enumerate().filter(|&(u, _)| u != v).map(|(_, &c)| c).collect();
            s.sort_unstable();
            s
        })
        .collect()
}

/// Placement order: rarest signature first, then greedily the vertex with
/// the most colored pairs into the already placed set.
fn placement_order(m: &ColorMatrix, sig: &[Vec<u64>]) -> Vec<usize> {
    let n = m.len();
    let rarity: Vec<usize> = (0..n).map(|v| sig.iter().filter(|s| *s == &sig[v]).count()).collect();
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let next = (0..n)
            .filter(|&v| !placed[v])
            .max_by(|&a, &b| {
                let links = |v: usize| order.iter().filter(|&&w| m[v][w] != 0).count();
                links(a)
                    .cmp(&links(b))
                    .then(rarity[b].cmp(&rarity[a]))
                    .then(b.cmp(&a))
            })
            .expect("unplaced vertex exists");
        placed[next] = true;
        order.push(next);
    }
    order
}

fn search(a: &ColorMatrix, b: &ColorMatrix) -> Option<Vec<usize>> {
    let sa = signatures(a);
    let sb = signatures(b);
    let mut ka = sa.clone();
    let mut kb = sb.clone();
    ka.sort();
    kb.sort();
    if ka != kb {
        return None;
    }
    let order = placement_order(a, &sa);
    backtrack(&order, |u, v| sa[u] == sb[v], |u, v, pu, pv| a[u][v] == b[pu][pv])
}

/// Permutation `pi` with `color_a(u, v) = color_b(pi(u), pi(v))` for all
/// pairs, if one exists.
pub fn colored_equivalence(a: &EdgeColoredGraph, b: &EdgeColoredGraph) -> Result<Option<Vec<usize>>> {
    if a.n() != b.n() {
        return Err(Error::SizeMismatch {
            left: a.n(),
            right: b.n(),
        });
    }
    if a.n() > MAX_EQUIVALENCE_VERTICES {
        return Err(Error::TooLarge(format!(
            "colored equivalence limited to {MAX_EQUIVALENCE_VERTICES} vertices, got {}",
            a.n()
        )));
    }
    Ok(search(&colored_matrix(a)?, &colored_matrix(b)?))
}

/// Plain graph isomorphism by the same search, without the vertex budget.
/// Intended for the highly symmetric families handled here.
pub fn isomorphism(a: &Graph, b: &Graph) -> Result<Option<Vec<usize>>> {
    if a.n() != b.n() {
        return Err(Error::SizeMismatch {
            left: a.n(),
            right: b.n(),
        });
    }
    if a.edge_count() != b.edge_count() {
        return Ok(None);
    }
    Ok(search(&plain_matrix(a), &plain_matrix(b)))
}
