//! Ramsey-style combinatorics on colorings and structures, lower-bound
//! instance generators and substructure-lemma checkers.
//!
//! Hypergraph nodes are `0..n`. A k-subset is always handled as a strictly
//! increasing slice; colorings store one color per k-subset indexed by its
//! colex rank.

pub mod lowerbound;
pub mod similarity;
pub mod sublemma;

use std::collections::BTreeMap;

use itertools::Itertools;
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::structure::{atomic_type, AtomicType, Elem, Structure};

pub use lowerbound::{
    build_lowerbound_instance, completion_sequence, run_lowerbound_demo, LowerBoundDemo,
    LowerBoundInstance, Variant,
};
pub use similarity::{
    check_substructure_lemma_qf, find_similar_tuples, m_similar, neighborhood, similarity_type,
};
pub use sublemma::{check_substructure_lemma, Verdict};

/// Largest exponent `tower` is willing to materialize, in bits.
const TOWER_BIT_LIMIT: u64 = 1 << 24;

/// `tow_k(n)`: `n` under `k - 1` exponentiations with base 2. `None` when
/// the value would exceed 2^(2^24).
pub fn tower(k: u32, n: u64) -> Option<BigUint> {
    assert!(k >= 1, "tower height starts at 1");
    let mut v = BigUint::from(n);
    for _ in 1..k {
        let exp = u64::try_from(&v).ok().filter(|e| *e <= TOWER_BIT_LIMIT)?;
        v = BigUint::from(1u8) << exp;
    }
    Some(v)
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Colex rank of a strictly increasing subset.
pub fn subset_rank(subset: &[usize]) -> usize {
    subset
        .iter()
        .enumerate()
        .map(|(i, s)| binomial(*s, i + 1))
        .sum()
}

/// An assignment of colors to all k-subsets of `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HyperedgeColoring {
    n: usize,
    k: usize,
    colors: Vec<u32>,
}

impl HyperedgeColoring {
    pub fn uniform(n: usize, k: usize, color: u32) -> Self {
        HyperedgeColoring {
            n,
            k,
            colors: vec![color; binomial(n, k)],
        }
    }

    pub fn from_fn(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> u32) -> Self {
        let mut c = Self::uniform(n, k, 0);
        for s in (0..n).combinations(k) {
            c.colors[subset_rank(&s)] = f(&s);
        }
        c
    }

    /// The coloring whose i-th edge in colex order gets digit i of `ordinal`
    /// in base `r`.
    pub fn from_ordinal(n: usize, k: usize, r: u32, mut ordinal: u64) -> Self {
        let mut c = Self::uniform(n, k, 0);
        for slot in c.colors.iter_mut() {
            *slot = (ordinal % r as u64) as u32;
            ordinal /= r as u64;
        }
        c
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edge_count(&self) -> usize {
        self.colors.len()
    }

    pub fn color(&self, subset: &[usize]) -> u32 {
        debug_assert!(subset.len() == self.k && subset.windows(2).all(|w| w[0] < w[1]));
        self.colors[subset_rank(subset)]
    }

    pub fn set_color(&mut self, subset: &[usize], color: u32) {
        self.colors[subset_rank(subset)] = color;
    }

    pub fn palette(&self) -> Vec<u32> {
        self.colors.iter().copied().sorted().dedup().collect()
    }

    /// Edges with their colors, in lexicographic order of the edges.
    pub fn edges(&self) -> impl Iterator<Item = (Vec<usize>, u32)> + '_ {
        (0..self.n).combinations(self.k).map(|s| {
            let c = self.color(&s);
            (s, c)
        })
    }

    /// Whether all k-subsets of `nodes` (sorted) share one color.
    pub fn is_monochromatic(&self, nodes: &[usize]) -> bool {
        nodes.iter().copied().combinations(self.k).map(|s| self.color(&s)).all_equal()
    }
}

/// The 2-coloring of pairs of a 5-cycle: sides get color 0, diagonals
/// color 1. Neither class contains a triangle.
pub fn pentagon_coloring() -> HyperedgeColoring {
    HyperedgeColoring::from_fn(5, 2, |s| u32::from(!matches!(s[1] - s[0], 1 | 4)))
}

/// The lexicographically least `l`-subset of nodes all of whose k-subsets
/// share one color, by exact backtracking.
pub fn find_monochromatic_clique(c: &HyperedgeColoring, l: usize) -> Option<Vec<usize>> {
    if l > c.n {
        return None;
    }
    if l <= c.k {
        // at most one k-subset inside: trivially monochromatic
        return Some((0..l).collect());
    }
    let mut cur = Vec::with_capacity(l);
    extend_clique(c, l, &mut cur, None).then_some(cur)
}

fn extend_clique(c: &HyperedgeColoring, l: usize, cur: &mut Vec<usize>, target: Option<u32>) -> bool {
    if cur.len() == l {
        return true;
    }
    let start = cur.last().map_or(0, |x| x + 1);
    // leave room for the remaining nodes
    for next in start..=c.n - (l - cur.len()) {
        let mut t = target;
        let mut ok = true;
        if cur.len() + 1 >= c.k {
            for mut s in cur.iter().copied().combinations(c.k - 1) {
                s.push(next);
                let col = c.color(&s);
                match t {
                    None => t = Some(col),
                    Some(x) if x != col => {
                        ok = false;
                        break;
                    }
                    _ => {}
                }
            }
        }
        if ok {
            cur.push(next);
            if extend_clique(c, l, cur, t) {
                return true;
            }
            cur.pop();
        }
    }
    false
}

/// Result of sweeping all colorings of one size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepReport {
    pub colorings: u64,
    /// Colorings with a monochromatic clique of the requested size.
    pub with_clique: u64,
    /// Ordinal of the first coloring without one.
    pub first_avoiding: Option<u64>,
}

/// Number of r-colorings of the k-subsets of an n-set, if it fits in `u64`.
pub fn coloring_count(n: usize, k: usize, r: u32) -> Option<u64> {
    u64::from(r).checked_pow(u32::try_from(binomial(n, k)).ok()?)
}

/// Checks every r-coloring of `[n]^k` (enumerated by ordinal, see
/// [`HyperedgeColoring::from_ordinal`]) for a monochromatic `l`-clique.
pub fn exhaustive_sweep(n: usize, k: usize, r: u32, l: usize) -> SweepReport {
    let total = coloring_count(n, k, r).expect("sweep size fits in u64");
    let mut report = SweepReport {
        colorings: total,
        with_clique: 0,
        first_avoiding: None,
    };
    for ordinal in 0..total {
        let c = HyperedgeColoring::from_ordinal(n, k, r, ordinal);
        if find_monochromatic_clique(&c, l).is_some() {
            report.with_clique += 1;
        } else if report.first_avoiding.is_none() {
            report.first_avoiding = Some(ordinal);
        }
    }
    report
}

/// Largest number of colorings an exhaustive threshold search examines per
/// size.
pub const SWEEP_LIMIT: u64 = 1 << 22;

/// The least `n ≤ max_n` such that every r-coloring of `[n]^k` has a
/// monochromatic `l`-clique, found by exhaustive sweeps. `None` if no size
/// up to `max_n` qualifies or a sweep would exceed [`SWEEP_LIMIT`].
pub fn exhaustive_threshold(k: usize, r: u32, l: usize, max_n: usize) -> Option<usize> {
    for n in l.max(1)..=max_n {
        let total = coloring_count(n, k, r).filter(|t| *t <= SWEEP_LIMIT)?;
        let avoiding = (0..total).any(|o| {
            find_monochromatic_clique(&HyperedgeColoring::from_ordinal(n, k, r, o), l).is_none()
        });
        if !avoiding {
            return Some(n);
        }
    }
    None
}

/// The largest `l` certified by exhaustive sweeps to occur as a
/// monochromatic clique in every r-coloring of `[n]^k`.
pub fn guaranteed_clique_size(k: usize, r: u32, n: usize) -> usize {
    (1..=n)
        .take_while(|l| exhaustive_threshold(k, r, *l, n).is_some())
        .last()
        .unwrap_or(0)
}

/// Seeded local search for a 2-coloring of `[n]^k` without monochromatic
/// `l`-cliques. Each step recolors a random edge of the least monochromatic
/// clique; the coloring is restarted every 10·C(n,k) steps. Returned
/// colorings are verified exactly.
pub fn search_antiramsey_coloring(
    n: usize,
    k: usize,
    l: usize,
    seed: u64,
    budget: usize,
) -> Option<HyperedgeColoring> {
    if l <= k && l <= n {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = binomial(n, k);
    let restart = (10 * edges).max(1);
    let random = |rng: &mut ChaCha8Rng| HyperedgeColoring::from_fn(n, k, |_| rng.gen_range(0..2));
    let mut c = random(&mut rng);
    for step in 0..budget {
        if step > 0 && step % restart == 0 {
            c = random(&mut rng);
        }
        match find_monochromatic_clique(&c, l) {
            None => {
                assert!(
                    (0..n).combinations(l).all(|s| !c.is_monochromatic(&s)),
                    "search returned a coloring with a monochromatic clique"
                );
                return Some(c);
            }
            Some(clique) => {
                let inside: Vec<Vec<usize>> = clique.into_iter().combinations(k).collect();
                let e = &inside[rng.gen_range(0..inside.len())];
                let col = c.color(e);
                c.set_color(e, 1 - col);
            }
        }
    }
    None
}

/// Colors each k-subset `{e_1 ≺ ... ≺ e_k}` of positions in `order` by the
/// atomic type of `(e_1, ..., e_k)` in `s`. Color ids index the returned
/// palette, which lists the occurring types in sorted order.
pub fn color_by_type(s: &Structure, order: &[Elem], k: usize) -> (HyperedgeColoring, Vec<AtomicType>) {
    let tuples: Vec<(Vec<usize>, AtomicType)> = (0..order.len())
        .combinations(k)
        .map(|pos| {
            let t: Vec<Elem> = pos.iter().map(|p| order[*p]).collect();
            let ty = atomic_type(s, &t).expect("order lists elements of the structure");
            (pos, ty)
        })
        .collect();
    let palette: Vec<AtomicType> = tuples.iter().map(|(_, t)| t.clone()).sorted().dedup().collect();
    let index: BTreeMap<&AtomicType, u32> = palette.iter().zip(0..).collect();
    let mut c = HyperedgeColoring::uniform(order.len(), k, 0);
    for (pos, ty) in &tuples {
        c.set_color(pos, index[ty]);
    }
    (c, palette)
}

/// Whether all `≺`-ordered k-tuples over `clique` (listed in `≺` order)
/// have one atomic type in `s`.
pub fn is_ordered_tau_clique(s: &Structure, clique: &[Elem], k: usize) -> bool {
    clique
        .iter()
        .copied()
        .combinations(k)
        .map(|t| atomic_type(s, &t).expect("clique elements belong to the structure"))
        .all_equal()
}

/// The lexicographically least (by positions in `order`) subset of size `l`
/// whose ordered k-tuples share one atomic type, k being the maximal
/// relation arity of the schema (at least 1). The result is in `≺` order.
pub fn ordered_tau_clique(s: &Structure, order: &[Elem], l: usize) -> Option<Vec<Elem>> {
    ordered_tau_clique_k(s, order, s.schema().max_relation_arity().max(1), l)
}

/// [`ordered_tau_clique`] for an explicit tuple length `k`.
pub fn ordered_tau_clique_k(s: &Structure, order: &[Elem], k: usize, l: usize) -> Option<Vec<Elem>> {
    let (c, _) = color_by_type(s, order, k);
    let clique: Vec<Elem> = find_monochromatic_clique(&c, l)?
        .into_iter()
        .map(|p| order[p])
        .collect();
    assert!(is_ordered_tau_clique(s, &clique, k), "type coloring and type comparison disagree");
    Some(clique)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::Schema;

    #[test]
    fn towers() {
        assert_eq!(tower(1, 5), Some(BigUint::from(5u8)));
        assert_eq!(tower(2, 3), Some(BigUint::from(8u8)));
        assert_eq!(tower(3, 2), Some(BigUint::from(16u8)));
        assert_eq!(tower(4, 2), Some(BigUint::from(65536u32)));
        assert_eq!(tower(5, 2).map(|v| v.bits()), Some(65537));
        assert_eq!(tower(6, 2), None);
    }

    #[test]
    fn colex_ranks_are_a_bijection() {
        for (n, k) in [(6, 2), (7, 3), (5, 0), (4, 4)] {
            let mut ranks: Vec<usize> = (0..n).combinations(k).map(|s| subset_rank(&s)).collect();
            ranks.sort();
            assert_eq!(ranks, (0..binomial(n, k)).collect::<Vec<_>>());
        }
    }

    #[test]
    fn uniform_coloring_is_one_clique() {
        let c = HyperedgeColoring::uniform(4, 2, 0);
        assert_eq!(find_monochromatic_clique(&c, 4), Some(vec![0, 1, 2, 3]));
        assert_eq!(find_monochromatic_clique(&c, 5), None);
    }

    #[test]
    fn pentagon_has_no_monochromatic_triangle() {
        let c = pentagon_coloring();
        assert_eq!(find_monochromatic_clique(&c, 3), None);
        // brute force agrees
        assert!((0..5).combinations(3).all(|t| !c.is_monochromatic(&t)));
        assert_eq!(find_monochromatic_clique(&c, 2), Some(vec![0, 1]));
    }

    #[test]
    fn backtracking_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let n = rng.gen_range(3..8);
            let k = rng.gen_range(1..4);
            let l = rng.gen_range(1..6);
            let c = HyperedgeColoring::from_fn(n, k, |_| rng.gen_range(0..2));
            let brute = (0..n).combinations(l).find(|s| c.is_monochromatic(s));
            assert_eq!(find_monochromatic_clique(&c, l), brute, "n={n} k={k} l={l}");
        }
    }

    #[test]
    fn pair_threshold_for_triangles_is_six() {
        assert_eq!(exhaustive_threshold(2, 2, 3, 6), Some(6));
        assert_eq!(exhaustive_threshold(1, 2, 3, 6), Some(5));
        assert_eq!(guaranteed_clique_size(1, 2, 5), 3);
        assert_eq!(guaranteed_clique_size(2, 2, 6), 3);
    }

    #[test]
    fn antiramsey_search() {
        let c = search_antiramsey_coloring(5, 2, 3, 1, 10_000).expect("triangle-free coloring exists");
        assert_eq!(find_monochromatic_clique(&c, 3), None);
        assert_eq!(search_antiramsey_coloring(6, 2, 3, 1, 2_000), None);
        assert_eq!(search_antiramsey_coloring(7, 2, 2, 1, 100), None);
        assert!(search_antiramsey_coloring(2, 2, 3, 1, 10).is_some());
    }

    #[test]
    fn type_coloring_of_unary_structure() {
        let mut s = Structure::new(Schema::new().with_relation("U", 1), ["a", "b", "c", "d", "e"]).unwrap();
        s.insert("U", &[Elem(1)]).unwrap();
        s.insert("U", &[Elem(3)]).unwrap();
        let order: Vec<Elem> = s.elements().collect();
        let (c, palette) = color_by_type(&s, &order, 1);
        assert_eq!(palette.len(), 2);
        let in_u: Vec<bool> = (0..5).map(|i| c.color(&[i]) == c.color(&[1])).collect();
        assert_eq!(in_u, [false, true, false, true, false]);
        assert_eq!(ordered_tau_clique(&s, &order, 3), Some(vec![Elem(0), Elem(2), Elem(4)]));
        assert_eq!(ordered_tau_clique(&s, &order, 4), None);
        let empty = Structure::new(Schema::new().with_relation("U", 1), ["a", "b", "c"]).unwrap();
        let order: Vec<Elem> = empty.elements().collect();
        assert_eq!(color_by_type(&empty, &order, 2).0.palette(), vec![0]);
        assert_eq!(ordered_tau_clique(&empty, &order, 3), Some(order.clone()));
    }

    #[test]
    fn type_coloring_distinguishes_edge_patterns() {
        let g = Structure::graph(&["a", "b", "c", "d"], &[("a", "b"), ("b", "a"), ("b", "c"), ("d", "c")]).unwrap();
        let order: Vec<Elem> = g.elements().collect();
        let (c, palette) = color_by_type(&g, &order, 2);
        // patterns of ordered pairs: both directions, forward only, backward only, none
        let e = |x: &str, y: &str| g.holds("E", &[g.elem(x).unwrap(), g.elem(y).unwrap()]).unwrap();
        let mut classes: BTreeMap<(bool, bool), u32> = BTreeMap::new();
        for (pair, col) in c.edges() {
            let (x, y) = (g.label(order[pair[0]]), g.label(order[pair[1]]));
            let key = (e(x, y), e(y, x));
            assert_eq!(*classes.entry(key).or_insert(col), col);
        }
        assert_eq!(classes.len(), palette.len());
        assert_eq!(palette.len(), 4);
    }
}
