//! Connectivity functions: the concrete graph and matroid families, a
//! table-backed function for fuzzing, and an exhaustive axiom checker.
//!
//! Every [`ConnectivityFn`] memoizes its evaluations, so callers can ask how
//! many *distinct* subsets were evaluated.

mod files;
mod gf2;

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicI64, AtomicUsize, Ordering};

use dashmap::DashMap;

use crate::error::{Error, Result};
use crate::ground::{GroundSet, SubsetMask};

pub use files::{parse_function_file, parse_graph, parse_matrix, parse_table, FunctionFile};
pub use gf2::{rank_gf2, rank_of_vectors, Gf2Matrix};

/// Ground sets up to this size get a dense memo table.
const DENSE_MEMO_LIMIT: usize = 20;

/// Undirected multigraph with labelled vertices and edges.
#[derive(Clone, Debug)]
pub struct Graph {
    vertices: GroundSet,
    edges: Vec<(usize, usize)>,
    edge_labels: GroundSet,
}

impl Graph {
    /// Edges default to labels `e0, e1, ...`.
    pub fn new(vertices: GroundSet, edges: Vec<(usize, usize)>) -> Result<Self> {
        let labels = GroundSet::numbered("e", edges.len());
        Self::with_edge_labels(vertices, edges, labels)
    }

    pub fn with_edge_labels(vertices: GroundSet, edges: Vec<(usize, usize)>, edge_labels: GroundSet) -> Result<Self> {
        let n = vertices.len();
        for &(u, v) in &edges {
            if u >= n || v >= n {
                return Err(Error::input(format!("edge ({u},{v}) has an endpoint outside the {n} vertices")));
            }
            if u == v {
                return Err(Error::input(format!("self-loop at {}", vertices.name(u))));
            }
        }
        if edge_labels.len() != edges.len() {
            return Err(Error::input("edge label count does not match edge count"));
        }
        Ok(Graph { vertices, edges, edge_labels })
    }

    /// Graph on `v0..v{n-1}` from index pairs.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        Graph::new(GroundSet::numbered("v", n), edges.to_vec()).expect("valid edge list")
    }

    /// Graph whose vertices are named by single letters `a, b, c, ...`.
    pub fn lettered(n: usize, edges: &[(usize, usize)]) -> Self {
        assert!(n <= 26);
        let names = (0..n).map(|i| ((b'a' + i as u8) as char).to_string());
        Graph::new(GroundSet::new(names).unwrap(), edges.to_vec()).expect("valid edge list")
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::lettered(n, &edges)
    }

    pub fn cycle(n: usize) -> Self {
        let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        if n >= 3 {
            edges.push((n - 1, 0));
        }
        Self::lettered(n, &edges)
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push((i, j));
            }
        }
        Self::lettered(n, &edges)
    }

    pub fn vertices(&self) -> &GroundSet {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_labels(&self) -> &GroundSet {
        &self.edge_labels
    }

    /// Boolean adjacency; parallel edges collapse.
    pub fn adjacency(&self) -> Vec<SubsetMask> {
        let n = self.vertices.len();
        let mut adj = vec![SubsetMask::empty(n); n];
        for &(u, v) in &self.edges {
            adj[u].insert(v);
            adj[v].insert(u);
        }
        adj
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FunctionKind {
    EdgeCut,
    CutRank,
    VertexCut,
    Matroid,
    Table,
}

impl FunctionKind {
    pub fn tag(self) -> &'static str {
        match self {
            FunctionKind::EdgeCut => "edgecut",
            FunctionKind::CutRank => "cutrank",
            FunctionKind::VertexCut => "vertexcut",
            FunctionKind::Matroid => "matroid",
            FunctionKind::Table => "table",
        }
    }
}

enum Evaluator {
    EdgeCut { edges: Vec<(usize, usize)> },
    CutRank { adj: Vec<SubsetMask> },
    VertexCut { ends: Vec<(usize, usize)> },
    Matroid { columns: Vec<SubsetMask>, total_rank: i64 },
    Table { values: Vec<i64> },
}

impl Evaluator {
    fn eval(&self, x: &SubsetMask) -> i64 {
        match self {
            Evaluator::EdgeCut { edges } => edges.iter().filter(|&&(u, v)| x.contains(u) != x.contains(v)).count() as i64,
            Evaluator::CutRank { adj } => {
                let outside = x.complement();
                rank_of_vectors(x.iter().map(|v| adj[v].intersection(&outside))) as i64
            }
            Evaluator::VertexCut { ends } => {
                let nv = ends.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
                let mut inside = vec![false; nv];
                let mut outside = vec![false; nv];
                for (e, &(u, v)) in ends.iter().enumerate() {
                    let side = if x.contains(e) { &mut inside } else { &mut outside };
                    side[u] = true;
                    side[v] = true;
                }
                inside.iter().zip(&outside).filter(|(a, b)| **a && **b).count() as i64
            }
            Evaluator::Matroid { columns, total_rank } => {
                let r_in = rank_of_vectors(x.iter().map(|j| columns[j].clone())) as i64;
                let r_out = rank_of_vectors(x.complement().iter().map(|j| columns[j].clone())) as i64;
                r_in + r_out - total_rank
            }
            Evaluator::Table { values } => values[x.to_bits() as usize],
        }
    }
}

enum Memo {
    Dense { values: Vec<AtomicI64>, distinct: AtomicUsize },
    Sparse(DashMap<SubsetMask, i64>),
}

const UNSET: i64 = i64::MIN;

impl Memo {
    fn new(n: usize) -> Self {
        if n <= DENSE_MEMO_LIMIT {
            Memo::Dense {
                values: (0..1usize << n).map(|_| AtomicI64::new(UNSET)).collect(),
                distinct: AtomicUsize::new(0),
            }
        } else {
            Memo::Sparse(DashMap::new())
        }
    }

    fn get_or(&self, x: &SubsetMask, compute: impl FnOnce() -> i64) -> i64 {
        match self {
            Memo::Dense { values, distinct } => {
                let slot = &values[x.to_bits() as usize];
                let cached = slot.load(Ordering::Relaxed);
                if cached != UNSET {
                    return cached;
                }
                let v = compute();
                // Racing workers compute the same value; only the first store counts.
                if slot.compare_exchange(UNSET, v, Ordering::Relaxed, Ordering::Relaxed).is_ok() {
                    distinct.fetch_add(1, Ordering::Relaxed);
                }
                v
            }
            Memo::Sparse(map) => {
                if let Some(v) = map.get(x) {
                    return *v;
                }
                let v = compute();
                map.entry(x.clone()).or_insert(v);
                v
            }
        }
    }

    fn distinct(&self) -> usize {
        match self {
            Memo::Dense { distinct, .. } => distinct.load(Ordering::Relaxed),
            Memo::Sparse(map) => map.len(),
        }
    }
}

/// An integer-valued set function on a labelled ground set, with memoized
/// evaluation. Construction never validates the connectivity axioms; see
/// [`check_axioms`].
pub struct ConnectivityFn {
    ground: GroundSet,
    kind: FunctionKind,
    evaluator: Evaluator,
    memo: Memo,
}

impl fmt::Debug for ConnectivityFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConnectivityFn").field("kind", &self.kind).field("n", &self.ground.len()).finish()
    }
}

impl ConnectivityFn {
    fn from_parts(ground: GroundSet, kind: FunctionKind, evaluator: Evaluator) -> Self {
        let memo = Memo::new(ground.len());
        ConnectivityFn { ground, kind, evaluator, memo }
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn len(&self) -> usize {
        self.ground.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ground.is_empty()
    }

    pub fn kind(&self) -> FunctionKind {
        self.kind
    }

    pub fn eval(&self, x: &SubsetMask) -> i64 {
        assert_eq!(x.width(), self.ground.len(), "internal error: mask width does not match ground set");
        self.memo.get_or(x, || self.evaluator.eval(x))
    }

    /// Number of distinct subsets evaluated so far.
    pub fn distinct_evaluations(&self) -> usize {
        self.memo.distinct()
    }

    /// Fresh copy of this function with an empty memo.
    pub fn fresh(&self) -> Self {
        let evaluator = match &self.evaluator {
            Evaluator::EdgeCut { edges } => Evaluator::EdgeCut { edges: edges.clone() },
            Evaluator::CutRank { adj } => Evaluator::CutRank { adj: adj.clone() },
            Evaluator::VertexCut { ends } => Evaluator::VertexCut { ends: ends.clone() },
            Evaluator::Matroid { columns, total_rank } => {
                Evaluator::Matroid { columns: columns.clone(), total_rank: *total_rank }
            }
            Evaluator::Table { values } => Evaluator::Table { values: values.clone() },
        };
        Self::from_parts(self.ground.clone(), self.kind, evaluator)
    }
}

/// `η`: number of edges with exactly one end in `X`. Parallel edges count
/// with multiplicity.
pub fn edge_cut_oracle(g: &Graph) -> ConnectivityFn {
    ConnectivityFn::from_parts(g.vertices.clone(), FunctionKind::EdgeCut, Evaluator::EdgeCut { edges: g.edges.clone() })
}

/// `ρ`: GF(2) rank of the adjacency submatrix with rows `X` and columns `V-X`.
pub fn cut_rank_oracle(g: &Graph) -> ConnectivityFn {
    ConnectivityFn::from_parts(g.vertices.clone(), FunctionKind::CutRank, Evaluator::CutRank { adj: g.adjacency() })
}

/// `ν`: on the edge set, the number of vertices touching edges on both sides.
pub fn vertex_cut_oracle(g: &Graph) -> ConnectivityFn {
    ConnectivityFn::from_parts(g.edge_labels.clone(), FunctionKind::VertexCut, Evaluator::VertexCut { ends: g.edges.clone() })
}

/// `λ(X) = r(X) + r(E-X) - r(E)` for the binary matroid on the columns of `m`.
/// Columns are labelled `c0, c1, ...`.
pub fn matroid_connectivity_oracle(m: &Gf2Matrix) -> ConnectivityFn {
    matroid_connectivity_oracle_on(GroundSet::numbered("c", m.num_cols()), m).expect("label count matches")
}

pub fn matroid_connectivity_oracle_on(ground: GroundSet, m: &Gf2Matrix) -> Result<ConnectivityFn> {
    if ground.len() != m.num_cols() {
        return Err(Error::input("column label count does not match the matrix"));
    }
    let columns: Vec<SubsetMask> = (0..m.num_cols()).map(|j| m.column(j)).collect();
    let total_rank = m.rank() as i64;
    Ok(ConnectivityFn::from_parts(ground, FunctionKind::Matroid, Evaluator::Matroid { columns, total_rank }))
}

/// Function read verbatim from a table with one entry per subset. The axioms
/// are not checked here.
pub fn table_oracle(ground: GroundSet, table: &HashMap<SubsetMask, i64>) -> Result<ConnectivityFn> {
    let n = ground.len();
    if n >= 32 {
        return Err(Error::Resource(format!("a table over {n} elements is too large")));
    }
    let mut values = Vec::with_capacity(1 << n);
    for x in ground.all_subsets() {
        match table.get(&x) {
            Some(&v) => values.push(v),
            None => return Err(Error::input(format!("table has no entry for {{{}}}", ground.format(&x)))),
        }
    }
    Ok(table_from_values(ground, values))
}

/// Table indexed by the binary encoding of each subset (element `i` is bit `i`).
pub fn table_from_values(ground: GroundSet, values: Vec<i64>) -> ConnectivityFn {
    assert_eq!(values.len(), 1usize << ground.len(), "table must have 2^n entries");
    ConnectivityFn::from_parts(ground, FunctionKind::Table, Evaluator::Table { values })
}

/// Which of the three connectivity-function conditions failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axiom {
    /// `f(X) = f(V-X)`.
    Symmetric,
    /// `f(X) + f(Y) >= f(X ∪ Y) + f(X ∩ Y)`.
    Submodular,
    /// `f(∅) = 0`.
    EmptyIsZero,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axiom::Symmetric => "symmetry",
            Axiom::Submodular => "submodularity",
            Axiom::EmptyIsZero => "normalization",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AxiomReport {
    Pass { checked: usize },
    Violation { axiom: Axiom, x: SubsetMask, y: SubsetMask },
}

impl AxiomReport {
    pub fn is_pass(&self) -> bool {
        matches!(self, AxiomReport::Pass { .. })
    }
}

/// Exhaustive check of the three axioms, in the order: `f(∅)=0`, symmetry,
/// submodularity. Submodularity is checked in its local form
/// `f(Z+a) + f(Z+b) >= f(Z+a+b) + f(Z)`, which is equivalent and costs
/// `O(2^n n^2)` evaluations; a failure is reported as the pair `(Z+a, Z+b)`.
pub fn check_axioms(f: &ConnectivityFn) -> Result<AxiomReport> {
    let n = f.len();
    if n > DENSE_MEMO_LIMIT {
        return Err(Error::Resource(format!("axiom check over 2^{n} subsets is not supported (limit n <= {DENSE_MEMO_LIMIT})")));
    }
    let empty = f.ground().empty_set();
    if f.eval(&empty) != 0 {
        return Ok(AxiomReport::Violation { axiom: Axiom::EmptyIsZero, x: empty.clone(), y: empty });
    }
    let mut checked = 1;
    for x in f.ground().all_subsets() {
        let co = x.complement();
        checked += 1;
        if f.eval(&x) != f.eval(&co) {
            return Ok(AxiomReport::Violation { axiom: Axiom::Symmetric, x, y: co });
        }
    }
    for z in f.ground().all_subsets() {
        let fz = f.eval(&z);
        let free: Vec<usize> = z.complement().to_vec();
        for (ia, &a) in free.iter().enumerate() {
            let za = z.with(a);
            let fza = f.eval(&za);
            for &b in &free[ia + 1..] {
                let zb = z.with(b);
                checked += 1;
                if fza + f.eval(&zb) < f.eval(&za.with(b)) + fz {
                    return Ok(AxiomReport::Violation { axiom: Axiom::Submodular, x: za, y: zb });
                }
            }
        }
    }
    Ok(AxiomReport::Pass { checked })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(f: &ConnectivityFn, text: &str) -> SubsetMask {
        f.ground().parse_subset(text).unwrap()
    }

    #[test]
    fn edge_cut_examples() {
        let k3 = edge_cut_oracle(&Graph::complete(3));
        assert_eq!(k3.eval(&set(&k3, "a")), 2);
        let p4 = edge_cut_oracle(&Graph::path(4));
        assert_eq!(p4.eval(&set(&p4, "a,b")), 1);
        assert_eq!(p4.eval(&set(&p4, "")), 0);
    }

    #[test]
    fn parallel_edges() {
        let g = Graph::lettered(2, &[(0, 1), (0, 1)]);
        let eta = edge_cut_oracle(&g);
        let rho = cut_rank_oracle(&g);
        assert_eq!(eta.eval(&set(&eta, "a")), 2);
        assert_eq!(rho.eval(&set(&rho, "a")), 1);
    }

    #[test]
    fn cut_rank_examples() {
        let p3 = cut_rank_oracle(&Graph::path(3));
        assert_eq!(p3.eval(&set(&p3, "b")), 1);
        for n in 2..=6 {
            let kn = cut_rank_oracle(&Graph::complete(n));
            for x in kn.ground().all_subsets() {
                let expected = if x.is_empty() || x.len() == n { 0 } else { 1 };
                assert_eq!(kn.eval(&x), expected);
            }
        }
        // C5 with X = {a,b}: rows a=[0 0 1] (a~e), b=[1 0 0] (b~c) over columns c,d,e.
        let c5 = cut_rank_oracle(&Graph::cycle(5));
        let rows = Gf2Matrix::from_bits(&[&[0, 0, 1], &[1, 0, 0]]);
        assert_eq!(rank_gf2(&rows), 2);
        assert_eq!(c5.eval(&set(&c5, "a,b")), 2);
    }

    #[test]
    fn vertex_cut_examples() {
        let p3 = vertex_cut_oracle(&Graph::path(3));
        assert_eq!(p3.eval(&set(&p3, "e0")), 1);
        let star = vertex_cut_oracle(&Graph::lettered(4, &[(0, 1), (0, 2), (0, 3)]));
        assert_eq!(star.eval(&set(&star, "e1")), 1);
        // Triangle: edge ab on one side, bc and ca on the other. a and b both touch both sides.
        let tri = vertex_cut_oracle(&Graph::complete(3));
        assert_eq!(tri.eval(&set(&tri, "e0")), 2);
    }

    /// GF(2) incidence matrix of K4 (rows = vertices, columns = edges).
    fn k4_incidence() -> Gf2Matrix {
        let g = Graph::complete(4);
        let mut m = Gf2Matrix::zeros(4, g.edges().len());
        for (j, &(u, v)) in g.edges().iter().enumerate() {
            m.set(u, j, true);
            m.set(v, j, true);
        }
        m
    }

    #[test]
    fn matroid_examples() {
        let id = matroid_connectivity_oracle(&Gf2Matrix::identity(3));
        assert_eq!(id.eval(&set(&id, "c0")), 0);
        let row = matroid_connectivity_oracle(&Gf2Matrix::from_bits(&[&[1, 1]]));
        assert_eq!(row.eval(&set(&row, "c0")), 1);
        // Edges of K4 in order ab, ac, ad, bc, bd, cd; triangle abc = {ab, ac, bc}.
        // r(triangle) = 2, r(star at d) = 3, r(E) = 3, so λ = 2 + 3 - 3.
        let m = k4_incidence();
        let tri_rank = rank_of_vectors([0, 1, 3].map(|j| m.column(j)));
        let rest_rank = rank_of_vectors([2, 4, 5].map(|j| m.column(j)));
        assert_eq!((tri_rank, rest_rank, m.rank()), (2, 3, 3));
        let lambda = matroid_connectivity_oracle(&m);
        assert_eq!(lambda.eval(&set(&lambda, "c0,c1,c3")), 2);
    }

    #[test]
    fn table_examples() {
        let g1 = GroundSet::new(["a"]).unwrap();
        let mut t = HashMap::new();
        t.insert(g1.empty_set(), 0);
        t.insert(g1.full_set(), 0);
        assert!(table_oracle(g1, &t).is_ok());

        let g2 = GroundSet::new(["a", "b"]).unwrap();
        let mut t = HashMap::new();
        t.insert(g2.parse_subset("").unwrap(), 0);
        t.insert(g2.parse_subset("a").unwrap(), 1);
        t.insert(g2.parse_subset("b").unwrap(), 1);
        let err = table_oracle(g2.clone(), &t).unwrap_err();
        assert_eq!(err, Error::Input("table has no entry for {a,b}".into()));
        t.insert(g2.parse_subset("a,b").unwrap(), 0);
        let f = table_oracle(g2.clone(), &t).unwrap();
        assert_eq!(f.eval(&g2.parse_subset("a").unwrap()), 1);
        assert!(check_axioms(&f).unwrap().is_pass());
    }

    #[test]
    fn axiom_violations() {
        let g = GroundSet::new(["1", "2"]).unwrap();
        let f = table_from_values(g.clone(), vec![0, -1, -1, 0]);
        match check_axioms(&f).unwrap() {
            AxiomReport::Violation { axiom, x, y } => {
                assert_eq!(axiom, Axiom::Submodular);
                assert_eq!(g.format(&x), "1");
                assert_eq!(g.format(&y), "2");
            }
            other => panic!("expected a violation, got {other:?}"),
        }
        let f = table_from_values(g.clone(), vec![1, 1, 1, 1]);
        assert!(matches!(check_axioms(&f).unwrap(), AxiomReport::Violation { axiom: Axiom::EmptyIsZero, .. }));
        let f = table_from_values(g, vec![0, 1, 2, 0]);
        assert!(matches!(check_axioms(&f).unwrap(), AxiomReport::Violation { axiom: Axiom::Symmetric, .. }));
    }

    #[test]
    fn memo_counts_distinct() {
        let f = edge_cut_oracle(&Graph::path(4));
        let x = set(&f, "a");
        f.eval(&x);
        f.eval(&x);
        f.eval(&set(&f, "b"));
        assert_eq!(f.distinct_evaluations(), 2);
        assert_eq!(f.fresh().distinct_evaluations(), 0);
    }
}
