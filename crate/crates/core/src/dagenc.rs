//! Closed-set encodings for digraphs without large skew matchings.
//!
//! A *skew matching* of size `ℓ` is a list of arcs `(a_i, b_i)` on distinct
//! vertices with no arc `a_i -> b_j` for `i < j` and no arc `b_i -> a_j` for
//! any `i, j`. When a DAG has none of size `ℓ + 1`, every closed set is
//! captured by a *marker pair* `(M1, M2)` with `|M1 ∪ M2| <= ℓ`, and each
//! marker pair yields a pair `(X, Y) = (Out(M1), In(M1) ∪ In(M2) - M1)` such
//! that `X ∪ U` is closed for every `U` avoiding `X ∪ Y`.

use std::collections::HashSet;

use crate::digraph::{reach, Digraph, Direction};
use crate::error::{Error, Result};
use crate::ground::{combinations, SubsetMask};
use crate::mutation::{self, SeededBug};

pub use crate::digraph::is_closed;

/// Strongly connected components contracted to a DAG.
#[derive(Clone, Debug)]
pub struct Condensation {
    /// Component id of each vertex.
    pub comp_of: Vec<usize>,
    /// Arcs between distinct components. Ids are a topological order.
    pub dag: Digraph,
    pub members: Vec<SubsetMask>,
}

impl Condensation {
    pub fn num_components(&self) -> usize {
        self.members.len()
    }

    /// Union of the members of a set of components.
    pub fn expand(&self, comps: &SubsetMask) -> SubsetMask {
        let width = self.comp_of.len();
        comps.iter().fold(SubsetMask::empty(width), |acc, c| acc.union(&self.members[c]))
    }
}

/// Components are found as `Out(v) ∩ In(v)`; ids follow Kahn's algorithm,
/// always taking the ready component with the smallest member first.
pub fn condense(d: &Digraph) -> Condensation {
    let n = d.num_vertices();
    let mut raw: Vec<SubsetMask> = Vec::new();
    let mut raw_of = vec![usize::MAX; n];
    for v in 0..n {
        if raw_of[v] != usize::MAX {
            continue;
        }
        let single = SubsetMask::singleton(n, v);
        let comp = reach(d, &single, Direction::Out).intersection(&reach(d, &single, Direction::In));
        for u in comp.iter() {
            raw_of[u] = raw.len();
        }
        raw.push(comp);
    }
    // raw components are already sorted by smallest member.
    let c = raw.len();
    let mut succ = vec![SubsetMask::empty(c); c];
    for (u, v) in d.arcs() {
        if raw_of[u] != raw_of[v] {
            succ[raw_of[u]].insert(raw_of[v]);
        }
    }
    let mut indegree = vec![0usize; c];
    for s in &succ {
        for w in s.iter() {
            indegree[w] += 1;
        }
    }
    let mut order = Vec::with_capacity(c);
    let mut ready: std::collections::BTreeSet<usize> = (0..c).filter(|&i| indegree[i] == 0).collect();
    while let Some(i) = ready.pop_first() {
        order.push(i);
        for w in succ[i].iter() {
            indegree[w] -= 1;
            if indegree[w] == 0 {
                ready.insert(w);
            }
        }
    }
    let mut new_id = vec![0; c];
    for (pos, &old) in order.iter().enumerate() {
        new_id[old] = pos;
    }
    let mut dag = Digraph::new(c);
    for (old, s) in succ.iter().enumerate() {
        for w in s.iter() {
            dag.add_arc(new_id[old], new_id[w]);
        }
    }
    let mut members = vec![SubsetMask::empty(n); c];
    for (old, comp) in raw.into_iter().enumerate() {
        members[new_id[old]] = comp;
    }
    let comp_of = raw_of.iter().map(|&r| new_id[r]).collect();
    Condensation { comp_of, dag, members }
}

pub fn is_acyclic(d: &Digraph) -> bool {
    condense(d).num_components() == d.num_vertices()
}

/// Ordered list of arcs `(a_i, b_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkewMatching {
    pub pairs: Vec<(usize, usize)>,
}

impl SkewMatching {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Checks distinctness and the three arc conditions; the error names the
    /// first failure.
    pub fn validate(&self, d: &Digraph) -> std::result::Result<(), String> {
        let mut seen = HashSet::new();
        for &(a, b) in &self.pairs {
            if !seen.insert(a) || !seen.insert(b) {
                return Err(format!("vertices of {:?} are not pairwise distinct", self.pairs));
            }
        }
        for (i, &(ai, bi)) in self.pairs.iter().enumerate() {
            if !d.has_arc(ai, bi) {
                return Err(format!("pair {i}: ({ai},{bi}) is not an arc"));
            }
            for (j, &(aj, bj)) in self.pairs.iter().enumerate() {
                if i < j && d.has_arc(ai, bj) {
                    return Err(format!("forward arc ({ai},{bj}) between pairs {i} < {j}"));
                }
                if d.has_arc(bi, aj) {
                    return Err(format!("back arc ({bi},{aj}) from pair {i} to pair {j}"));
                }
            }
        }
        Ok(())
    }
}

/// Exhaustive backtracking search for a skew matching of size `size`.
pub fn find_skew_matching(d: &Digraph, size: usize) -> Option<SkewMatching> {
    let candidates: Vec<(usize, usize)> = d.arcs().filter(|&(a, b)| !d.has_arc(b, a)).collect();
    let mut chosen = Vec::with_capacity(size);
    if extend_matching(d, &candidates, size, &mut chosen) {
        Some(SkewMatching { pairs: chosen })
    } else {
        None
    }
}

fn extend_matching(d: &Digraph, candidates: &[(usize, usize)], size: usize, chosen: &mut Vec<(usize, usize)>) -> bool {
    if chosen.len() == size {
        return true;
    }
    if candidates.len() < size - chosen.len() {
        return false;
    }
    for &(a, b) in candidates {
        // Pairs placed after (a, b) must avoid its vertices and the forbidden arcs.
        let rest: Vec<(usize, usize)> = candidates
            .iter()
            .copied()
            .filter(|&(x, y)| {
                x != a && x != b && y != a && y != b && !d.has_arc(a, y) && !d.has_arc(b, x) && !d.has_arc(y, a)
            })
            .collect();
        chosen.push((a, b));
        if extend_matching(d, &rest, size, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// Size of the largest skew matching, found by increasing search.
pub fn max_skew_matching(d: &Digraph) -> usize {
    let mut size = 0;
    while find_skew_matching(d, size + 1).is_some() {
        size += 1;
    }
    size
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MarkerPair {
    pub m1: SubsetMask,
    pub m2: SubsetMask,
}

impl MarkerPair {
    pub fn size(&self) -> usize {
        self.m1.len() + self.m2.len()
    }

    /// `M1 ∪ M2 ∪ (V - (Out(M1) ∪ In(M1) ∪ In(M2)))`.
    pub fn witness_set(&self, d: &Digraph) -> SubsetMask {
        let covered = reach(d, &self.m1, Direction::Out)
            .union(&reach(d, &self.m1, Direction::In))
            .union(&reach(d, &self.m2, Direction::In));
        self.m1.union(&self.m2).union(&covered.complement())
    }
}

/// The four neighbourhood equalities selecting a marker `M ⊆ S1 ∪ S2`.
fn marker_condition(d: &Digraph, m: &SubsetMask, s1: &SubsetMask, s2: &SubsetMask, full: &Boundaries) -> bool {
    let m1 = m.intersection(s1);
    let m2 = m.intersection(s2);
    d.out_boundary(&m1) == full.out1
        && d.in_boundary(&m1) == full.in1
        && d.out_boundary(&m2).difference(&full.out1) == full.out2_rest
        && d.in_boundary(&m2).difference(&full.in1) == full.in2_rest
}

struct Boundaries {
    out1: SubsetMask,
    in1: SubsetMask,
    out2_rest: SubsetMask,
    in2_rest: SubsetMask,
}

impl Boundaries {
    fn new(d: &Digraph, s1: &SubsetMask, s2: &SubsetMask) -> Self {
        let out1 = d.out_boundary(s1);
        let in1 = d.in_boundary(s1);
        let out2_rest = d.out_boundary(s2).difference(&out1);
        let in2_rest = d.in_boundary(s2).difference(&in1);
        Boundaries { out1, in1, out2_rest, in2_rest }
    }
}

/// A deletion-minimal `M ⊆ S1 ∪ S2` preserving the four neighbourhood
/// equalities, found by trying each vertex in ascending order.
pub fn minimal_marker(d: &Digraph, s1: &SubsetMask, s2: &SubsetMask) -> Result<MarkerPair> {
    if !s1.is_disjoint(s2) {
        return Err(Error::contract("marker sides overlap"));
    }
    let full = Boundaries::new(d, s1, s2);
    let mut m = s1.union(s2);
    for v in s1.union(s2).iter() {
        let smaller = m.without(v);
        if marker_condition(d, &smaller, s1, s2, &full) {
            m = smaller;
        }
    }
    Ok(MarkerPair { m1: m.intersection(s1), m2: m.intersection(s2) })
}

/// Vertices reachable from `v` by a walk of length 1 to 3.
fn within_three(d: &Digraph, v: usize) -> SubsetMask {
    let mut frontier = d.out_neighbors(v).clone();
    let mut acc = frontier.clone();
    for _ in 1..3 {
        frontier = frontier.iter().fold(d.empty_set(), |f, u| f.union(d.out_neighbors(u)));
        acc = acc.union(&frontier);
    }
    acc
}

/// Builds a skew matching of size `|M|` from a minimal marker, splitting `M`
/// into the four parts that witness each equality and choosing the smallest
/// witness neighbour each time.
pub fn extract_skew_matching(d: &Digraph, s1: &SubsetMask, s2: &SubsetMask, marker: &MarkerPair) -> Result<SkewMatching> {
    let union = s1.union(s2);
    for u in union.iter() {
        if let Some(v) = within_three(d, u).intersection(&union.without(u)).first() {
            return Err(Error::contract(format!("directed path of length <= 3 from {u} to {v} inside S1 ∪ S2")));
        }
    }
    let m = marker.m1.union(&marker.m2);
    let full = Boundaries::new(d, s1, s2);
    let m_s1 = m.intersection(s1);
    let m_s2 = m.intersection(s2);

    let mut assigned = d.empty_set();
    let mut part = |pred: &dyn Fn(usize) -> bool| -> Vec<usize> {
        let members: Vec<usize> = m.iter().filter(|&x| !assigned.contains(x) && pred(x)).collect();
        for &x in &members {
            assigned.insert(x);
        }
        members
    };
    let part1 = part(&|x| d.out_boundary(&m_s1.without(x)) != full.out1);
    let part2 = part(&|x| d.out_boundary(&m_s2.without(x)).difference(&full.out1) != full.out2_rest);
    let part3 = part(&|x| d.in_boundary(&m_s2.without(x)).difference(&full.in1) != full.in2_rest);
    let part4 = part(&|x| d.in_boundary(&m_s1.without(x)) != full.in1);
    if assigned != m {
        return Err(Error::contract("marker is not minimal"));
    }

    let pick = |set: SubsetMask, what: &str| -> Result<usize> {
        set.first().ok_or_else(|| Error::contract(format!("no witness neighbour for {what}")))
    };
    let mut pairs = Vec::with_capacity(m.len());
    for a in part1 {
        let b = pick(full.out1.difference(&d.out_boundary(&m_s1.without(a))), "an S1 out-neighbourhood")?;
        pairs.push((a, b));
    }
    for a in part2 {
        let lost = d.out_boundary(s2).difference(&d.out_boundary(&m_s2.without(a))).difference(&full.out1);
        pairs.push((a, pick(lost, "an S2 out-neighbourhood")?));
    }
    for b in part3 {
        let lost = d.in_boundary(s2).difference(&d.in_boundary(&m_s2.without(b))).difference(&full.in1);
        pairs.push((pick(lost, "an S2 in-neighbourhood")?, b));
    }
    for b in part4 {
        let a = pick(full.in1.difference(&d.in_boundary(&m_s1.without(b))), "an S1 in-neighbourhood")?;
        pairs.push((a, b));
    }
    let matching = SkewMatching { pairs };
    matching.validate(d).map_err(Error::Contract)?;
    Ok(matching)
}

/// One certified pair `(X, Y)` and the marker that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DagEncoding {
    pub x: SubsetMask,
    pub y: SubsetMask,
    pub marker: MarkerPair,
}

pub fn closed_encodings_dag(d: &Digraph, ell: usize) -> Result<Vec<DagEncoding>> {
    closed_encodings_dag_with(d, ell, None)
}

pub(crate) fn closed_encodings_dag_with(d: &Digraph, ell: usize, faults: Option<SeededBug>) -> Result<Vec<DagEncoding>> {
    if !is_acyclic(d) {
        return Err(Error::contract("closed_encodings_dag needs an acyclic digraph"));
    }
    let n = d.num_vertices();
    let skip_independence = mutation::active(faults, SeededBug::WeakMarkerFilter);
    let out_of: Vec<SubsetMask> = (0..n).map(|v| reach(d, &SubsetMask::singleton(n, v), Direction::Out)).collect();
    let in_of: Vec<SubsetMask> = (0..n).map(|v| reach(d, &SubsetMask::singleton(n, v), Direction::In)).collect();
    let closure = |set: &SubsetMask, table: &[SubsetMask]| set.iter().fold(SubsetMask::empty(n), |acc, v| acc.union(&table[v]));

    let mut seen: HashSet<(SubsetMask, SubsetMask)> = HashSet::new();
    let mut out = Vec::new();
    for size in 0..=ell.min(n) {
        combinations(n, size, &mut |m: &[usize]| {
            for split in 0..1u32 << size {
                let m1 = SubsetMask::from_indices(n, m.iter().enumerate().filter(|(i, _)| split >> i & 1 == 1).map(|(_, &v)| v));
                let m2 = SubsetMask::from_indices(n, m.iter().enumerate().filter(|(i, _)| split >> i & 1 == 0).map(|(_, &v)| v));
                let out1 = closure(&m1, &out_of);
                if !out1.is_disjoint(&m2) {
                    continue;
                }
                let in1 = closure(&m1, &in_of);
                let in2 = closure(&m2, &in_of);
                if !skip_independence {
                    let witness = m1.union(&m2).union(&out1.union(&in1).union(&in2).complement());
                    if !d.is_independent(&witness) {
                        continue;
                    }
                }
                let x = out1;
                let y = in1.union(&in2).difference(&m1);
                // A path m -> v -> m' inside M1 puts v in both X and Y. Such
                // pairs certify nothing new: markers of closed sets never have one.
                if !x.is_disjoint(&y) {
                    continue;
                }
                if seen.insert((x.clone(), y.clone())) {
                    out.push(DagEncoding { x, y, marker: MarkerPair { m1, m2 } });
                }
            }
        });
    }
    Ok(out)
}

/// `(X, Y, P)` over the original vertices: `P` is the partition of the
/// remaining vertices into strongly connected components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedEncoding {
    pub x: SubsetMask,
    pub y: SubsetMask,
    /// Ordered by smallest member.
    pub classes: Vec<SubsetMask>,
    /// Marker expanded to original vertices.
    pub marker: MarkerPair,
}

pub fn closed_encodings(d: &Digraph, ell: usize) -> Result<Vec<ClosedEncoding>> {
    closed_encodings_with(d, ell, None)
}

pub(crate) fn closed_encodings_with(d: &Digraph, ell: usize, faults: Option<SeededBug>) -> Result<Vec<ClosedEncoding>> {
    let cond = condense(d);
    let list = closed_encodings_dag_with(&cond.dag, ell, faults)?;
    Ok(list
        .into_iter()
        .map(|enc| {
            let rest = enc.x.union(&enc.y).complement();
            let mut classes: Vec<SubsetMask> = rest.iter().map(|c| cond.members[c].clone()).collect();
            classes.sort_by_key(|c| c.first());
            ClosedEncoding {
                x: cond.expand(&enc.x),
                y: cond.expand(&enc.y),
                classes,
                marker: MarkerPair { m1: cond.expand(&enc.marker.m1), m2: cond.expand(&enc.marker.m2) },
            }
        })
        .collect())
}

/// Every union `X ∪ ⋃Q` for `Q ⊆ P`.
pub fn decode_closed(enc: &ClosedEncoding) -> Vec<SubsetMask> {
    let k = enc.classes.len();
    (0..1u64 << k)
        .map(|q| {
            (0..k).filter(|i| q >> i & 1 == 1).fold(enc.x.clone(), |acc, i| acc.union(&enc.classes[i]))
        })
        .collect()
}
