//! Blocking digraphs `D_{S,T}` and their pruning.
//!
//! Vertices `0..n` are ground elements (only the free ones `V - (S ∪ T)`
//! carry arcs); vertex `n` is the source terminal `S°` and `n + 1` the sink
//! terminal `T°`. With `k = f*(S, T)`:
//!
//! * `S° -> x` iff `f*(S, T + x) > k`
//! * `x -> T°` iff `f*(S + x, T) > k`
//! * `x -> y`  iff `f*(S + x, T + y) > k`
//!
//! Closed sets containing `S°` and avoiding `T°` are exactly the sets `S ∪ Z`
//! with `f*(S ∪ Z, V - S - Z) = k`.

use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::ground::SubsetMask;
use crate::interpolation::FStar;
use crate::mutation::{self, SeededBug};

pub use crate::digraph::{reach, Direction};

#[derive(Clone, Debug)]
pub struct BlockDigraph {
    pub s: SubsetMask,
    pub t: SubsetMask,
    /// `f*(S, T)`.
    pub base_value: i64,
    /// `V - (S ∪ T)` over the ground width.
    pub free: SubsetMask,
    pub graph: Digraph,
}

impl BlockDigraph {
    pub fn n(&self) -> usize {
        self.free.width()
    }

    pub fn src(&self) -> usize {
        self.n()
    }

    pub fn snk(&self) -> usize {
        self.n() + 1
    }

    /// Lifts a ground mask to the `n + 2` vertex space.
    pub fn lift(&self, x: &SubsetMask) -> SubsetMask {
        x.resized(self.n() + 2)
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.graph.has_arc(u, v)
    }
}

pub fn build_blocking(fs: &FStar<'_>, s: &SubsetMask, t: &SubsetMask) -> Result<BlockDigraph> {
    build_blocking_with(fs, s, t, None)
}

pub(crate) fn build_blocking_with(
    fs: &FStar<'_>,
    s: &SubsetMask,
    t: &SubsetMask,
    faults: Option<SeededBug>,
) -> Result<BlockDigraph> {
    let k = fs.value(s, t)?;
    let n = fs.n();
    let free = s.union(t).complement();
    let (src, snk) = (n, n + 1);
    let mut graph = Digraph::new(n + 2);
    let elems = free.to_vec();
    for &x in &elems {
        if fs.value(s, &t.with(x))? > k {
            graph.add_arc(src, x);
        }
        if fs.value(&s.with(x), t)? > k {
            graph.add_arc(x, snk);
        }
    }
    let flip = mutation::active(faults, SeededBug::FlipArcRule);
    for &x in &elems {
        let sx = s.with(x);
        for &y in &elems {
            if x != y && fs.value(&sx, &t.with(y))? > k {
                if flip {
                    graph.add_arc(y, x);
                } else {
                    graph.add_arc(x, y);
                }
            }
        }
    }
    Ok(BlockDigraph { s: s.clone(), t: t.clone(), base_value: k, free, graph })
}

fn check_pairwise_disjoint(sets: &[&SubsetMask]) -> Result<()> {
    for (i, a) in sets.iter().enumerate() {
        for b in &sets[i + 1..] {
            if !a.is_disjoint(b) {
                return Err(Error::contract(format!("sets {a:?} and {b:?} overlap")));
            }
        }
    }
    Ok(())
}

/// Both sides of the blocking-digraph equivalence for `(S, T, A, B)`:
/// `lhs = [f*(S ∪ A, T ∪ B) = f*(S, T)]` and
/// `rhs = [no arc from A ∪ {S°} into B ∪ {T°}]`. They should always agree.
pub fn lemma_digraph_check(
    fs: &FStar<'_>,
    s: &SubsetMask,
    t: &SubsetMask,
    a: &SubsetMask,
    b: &SubsetMask,
) -> Result<(bool, bool)> {
    check_pairwise_disjoint(&[s, t, a, b])?;
    let d = build_blocking(fs, s, t)?;
    lemma_digraph_check_on(fs, &d, a, b)
}

/// As [`lemma_digraph_check`] with a prebuilt digraph for `(d.s, d.t)`.
pub fn lemma_digraph_check_on(fs: &FStar<'_>, d: &BlockDigraph, a: &SubsetMask, b: &SubsetMask) -> Result<(bool, bool)> {
    check_pairwise_disjoint(&[&d.s, &d.t, a, b])?;
    let lhs = fs.value(&d.s.union(a), &d.t.union(b))? == d.base_value;
    let mut tails = d.lift(a);
    tails.insert(d.src());
    let mut heads = d.lift(b);
    heads.insert(d.snk());
    let rhs = tails.iter().all(|u| d.graph.out_neighbors(u).is_disjoint(&heads));
    Ok((lhs, rhs))
}

/// `D' = D - (Out(S°) ∪ In(T°))`, relabelled onto the surviving vertices.
#[derive(Clone, Debug)]
pub struct PrunedDigraph {
    /// Surviving free elements, over the ground width.
    pub kept: SubsetMask,
    /// Free elements reachable from `S°`; they must be inside `X`.
    pub forced_in: SubsetMask,
    /// Free elements that reach `T°`; they must be outside `X`.
    pub forced_out: SubsetMask,
    /// `D[kept]` on `0..|kept|`.
    pub graph: Digraph,
    /// `vertices[i]` is the ground element of pruned vertex `i`.
    pub vertices: Vec<usize>,
    /// Some element is both forced in and forced out, so no `X` between `S`
    /// and `V - T` has `f(X) = f*(S, T)`.
    pub conflict: bool,
}

impl PrunedDigraph {
    /// Maps a set of pruned vertices back to ground elements.
    pub fn to_ground(&self, x: &SubsetMask) -> SubsetMask {
        SubsetMask::from_indices(self.kept.width(), x.iter().map(|i| self.vertices[i]))
    }
}

pub fn prune(d: &BlockDigraph) -> PrunedDigraph {
    let n = d.n();
    let total = n + 2;
    let from_src = reach(&d.graph, &SubsetMask::singleton(total, d.src()), Direction::Out);
    let to_snk = reach(&d.graph, &SubsetMask::singleton(total, d.snk()), Direction::In);
    let forced_in = from_src.resized(n).intersection(&d.free);
    let forced_out = to_snk.resized(n).intersection(&d.free);
    let conflict = !forced_in.is_disjoint(&forced_out);
    let kept = d.free.difference(&forced_in).difference(&forced_out);
    let (graph, vertices) = d.graph.induced(&d.lift(&kept));
    PrunedDigraph { kept, forced_in, forced_out, graph, vertices, conflict }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interpolation::SfmBackend;
    use crate::oracles::{edge_cut_oracle, ConnectivityFn, Graph};

    fn set(f: &ConnectivityFn, text: &str) -> SubsetMask {
        f.ground().parse_subset(text).unwrap()
    }

    fn ground_arcs(d: &BlockDigraph) -> Vec<(usize, usize)> {
        d.graph.arcs().collect()
    }

    #[test]
    fn p4_blocking_digraph() {
        let f = edge_cut_oracle(&Graph::path(4));
        let fs = FStar::new(&f, SfmBackend::Exhaustive);
        let d = build_blocking(&fs, &set(&f, "a"), &set(&f, "d")).unwrap();
        assert_eq!(d.base_value, 1);
        // Only c -> b: f*({a,c},{b,d}) = η({a,c}) = 3.
        assert_eq!(ground_arcs(&d), vec![(2, 1)]);

        let p = prune(&d);
        assert!(!p.conflict);
        assert!(p.forced_in.is_empty() && p.forced_out.is_empty());
        assert_eq!(p.kept.to_vec(), vec![1, 2]);
        assert_eq!(p.vertices, vec![1, 2]);
        assert_eq!(p.graph.arcs().collect::<Vec<_>>(), vec![(1, 0)]);
    }

    #[test]
    fn empty_pair_has_no_terminal_arcs() {
        let f = edge_cut_oracle(&Graph::complete(4));
        let fs = FStar::new(&f, SfmBackend::Exhaustive);
        let d = build_blocking(&fs, &f.ground().empty_set(), &f.ground().empty_set()).unwrap();
        assert!(d.graph.out_neighbors(d.src()).is_empty());
        assert!(d.graph.in_neighbors(d.snk()).is_empty());
    }

    #[test]
    fn single_edge() {
        let f = edge_cut_oracle(&Graph::path(2));
        let fs = FStar::new(&f, SfmBackend::Exhaustive);
        let d = build_blocking(&fs, &set(&f, "a"), &set(&f, "b")).unwrap();
        assert!(d.free.is_empty());
        assert_eq!(d.graph.num_arcs(), 0);
    }

    #[test]
    fn lemma_examples() {
        let f = edge_cut_oracle(&Graph::path(4));
        let fs = FStar::new(&f, SfmBackend::Exhaustive);
        let (s, t) = (set(&f, "a"), set(&f, "d"));
        let e = f.ground().empty_set();
        assert_eq!(lemma_digraph_check(&fs, &s, &t, &e, &e).unwrap(), (true, true));
        assert_eq!(lemma_digraph_check(&fs, &s, &t, &set(&f, "c"), &set(&f, "b")).unwrap(), (false, false));
        assert_eq!(lemma_digraph_check(&fs, &s, &t, &set(&f, "b"), &set(&f, "c")).unwrap(), (true, true));
        assert!(matches!(lemma_digraph_check(&fs, &s, &t, &set(&f, "a"), &e), Err(Error::Contract(_))));
    }

    #[test]
    fn flipped_rule_breaks_lemma() {
        let f = edge_cut_oracle(&Graph::path(4));
        let fs = FStar::new(&f, SfmBackend::Exhaustive);
        let d = build_blocking_with(&fs, &set(&f, "a"), &set(&f, "d"), Some(SeededBug::FlipArcRule)).unwrap();
        let (lhs, rhs) = lemma_digraph_check_on(&fs, &d, &set(&f, "c"), &set(&f, "b")).unwrap();
        assert_ne!(lhs, rhs);
    }

    fn terminal_digraph(arcs: &[(usize, usize)]) -> BlockDigraph {
        // Two ground elements, both free; vertex 2 = S°, 3 = T°.
        BlockDigraph {
            s: SubsetMask::empty(2),
            t: SubsetMask::empty(2),
            base_value: 0,
            free: SubsetMask::full(2),
            graph: Digraph::from_arcs(4, arcs),
        }
    }

    #[test]
    fn prune_examples() {
        let p = prune(&terminal_digraph(&[(2, 0)]));
        assert_eq!(p.forced_in.to_vec(), vec![0]);
        assert_eq!(p.kept.to_vec(), vec![1]);
        assert!(!p.conflict);

        let p = prune(&terminal_digraph(&[(2, 0), (0, 3)]));
        assert!(p.conflict);
    }
}
