//! Brute-force oracles and property checkers. Each checker returns a
//! [`VerifyReport`]; a failing report carries a witness that replays the
//! failure.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bisection::search_representation;
use crate::blocking::{build_blocking_with, lemma_digraph_check_on, prune};
use crate::dagenc::find_skew_matching;
use crate::encoder::{encode_with, enumerate_family, EncodeOptions, Representation};
use crate::error::{Error, Result};
use crate::ground::{subsets_up_to, GroundSet, SubsetMask};
use crate::interpolation::{FStar, SfmBackend};
use crate::mutation::SeededBug;
use crate::oracles::{check_axioms, AxiomReport, ConnectivityFn};

/// Largest ground set the brute-force oracles accept.
pub const BRUTE_FORCE_LIMIT: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub name: String,
    pub passed: bool,
    pub instances: u64,
    /// Instances were sampled rather than enumerated.
    pub sampled: bool,
    pub seed: Option<u64>,
    pub witness: Option<String>,
}

impl VerifyReport {
    fn new(name: &str) -> Self {
        VerifyReport { name: name.to_string(), passed: true, instances: 0, sampled: false, seed: None, witness: None }
    }

    fn fail(&mut self, witness: String) {
        if self.passed {
            self.passed = false;
            self.witness = Some(witness);
        }
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "CHECK {} {} instances={}", self.name, status, self.instances)?;
        if self.sampled {
            write!(f, " mode=sampled")?;
        }
        if let Some(seed) = self.seed {
            write!(f, " seed={seed}")?;
        }
        if let Some(w) = &self.witness {
            write!(f, " witness={w}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub backend: SfmBackend,
    pub jobs: usize,
    /// Seed for every sampled check.
    pub seed: u64,
    /// Enumerate exhaustively when the instance count is at most this.
    pub exhaustive_limit: u64,
    /// Instances drawn when sampling.
    pub samples: u64,
    pub faults: Option<SeededBug>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            backend: SfmBackend::Exhaustive,
            jobs: 1,
            seed: 0,
            exhaustive_limit: 1_000_000,
            samples: 20_000,
            faults: None,
        }
    }
}

impl VerifyOptions {
    fn encode_options(&self) -> EncodeOptions {
        EncodeOptions { backend: self.backend.clone(), jobs: self.jobs, provenance: true, faults: self.faults }
    }
}

fn show(ground: &GroundSet, x: &SubsetMask) -> String {
    format!("{{{}}}", ground.format(x))
}

fn require_brute_force(f: &ConnectivityFn) -> Result<()> {
    if f.len() > BRUTE_FORCE_LIMIT {
        return Err(Error::Resource(format!(
            "brute force over 2^{} subsets is not supported (limit n <= {BRUTE_FORCE_LIMIT})",
            f.len()
        )));
    }
    Ok(())
}

/// `{X : f(X) = k}` by evaluating every subset.
pub fn brute_family(f: &ConnectivityFn, k: i64) -> Result<BTreeSet<SubsetMask>> {
    require_brute_force(f)?;
    Ok(f.ground().all_subsets().filter(|x| f.eval(x) == k).collect())
}

pub fn check_axioms_report(f: &ConnectivityFn) -> Result<VerifyReport> {
    let mut report = VerifyReport::new("axioms");
    match check_axioms(f)? {
        AxiomReport::Pass { checked } => report.instances = checked as u64,
        AxiomReport::Violation { axiom, x, y } => {
            report.instances = 1;
            report.fail(format!("axiom={axiom};X={};Y={}", show(f.ground(), &x), show(f.ground(), &y)));
        }
    }
    Ok(report)
}

pub fn check_encoding_exact(f: &ConnectivityFn, k: i64, opts: &VerifyOptions) -> Result<VerifyReport> {
    let rep = encode_with(f, k, &opts.encode_options())?;
    check_representation_exact(f, &rep)
}

/// Compares the decoded family of `rep` with brute force; the witness is the
/// symmetric difference.
pub fn check_representation_exact(f: &ConnectivityFn, rep: &Representation) -> Result<VerifyReport> {
    let mut report = VerifyReport::new("encoding");
    let expected = brute_family(f, rep.k)?;
    let got = enumerate_family(rep)?;
    report.instances = 1u64 << f.len();
    let diff: Vec<String> = got.symmetric_difference(&expected).map(|x| show(f.ground(), x)).collect();
    if !diff.is_empty() {
        report.fail(format!("k={};diff={}", rep.k, diff.join(";")));
    }
    Ok(report)
}

/// Every pruned blocking digraph for a pair with `f*(S, T) = k` is free of
/// skew matchings of size `2k + 1`.
pub fn check_no_large_skew(f: &ConnectivityFn, k: i64, opts: &VerifyOptions) -> Result<VerifyReport> {
    let mut report = VerifyReport::new("skew");
    if k < 0 {
        return Ok(report);
    }
    let fs = FStar::new(f, opts.backend.clone());
    let ground = f.ground();
    let small = subsets_up_to(f.len(), k as usize);
    for s in &small {
        for t in small.iter().filter(|t| t.is_disjoint(s)) {
            if fs.value(s, t)? != k {
                continue;
            }
            let pruned = prune(&build_blocking_with(&fs, s, t, opts.faults)?);
            if pruned.conflict {
                continue;
            }
            report.instances += 1;
            if let Some(m) = find_skew_matching(&pruned.graph, 2 * k as usize + 1) {
                let pairs: Vec<String> = m
                    .pairs
                    .iter()
                    .map(|&(a, b)| format!("({},{})", ground.name(pruned.vertices[a]), ground.name(pruned.vertices[b])))
                    .collect();
                report.fail(format!("S={};T={};matching={}", show(ground, s), show(ground, t), pairs.join("")));
                return Ok(report);
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coverage {
    /// Exhaustive when the instance count is within the limit, else sampled.
    Auto,
    Exhaustive,
    Sampled,
}

/// All disjoint pairs `(S, T)` over `width` elements.
fn disjoint_pairs(width: usize) -> Vec<(SubsetMask, SubsetMask)> {
    let mut out = Vec::new();
    for s in crate::ground::all_subsets(width) {
        let rest = s.complement().to_bits();
        let mut sub = 0u64;
        loop {
            out.push((s.clone(), SubsetMask::from_bits(width, sub)));
            if sub == rest {
                break;
            }
            sub = sub.wrapping_sub(rest) & rest;
        }
    }
    out
}

/// Random pairwise-disjoint sets: each element lands in one of `parts`
/// sets or in none.
fn random_parts(rng: &mut ChaCha8Rng, width: usize, parts: usize) -> Vec<SubsetMask> {
    let mut out = vec![SubsetMask::empty(width); parts];
    for v in 0..width {
        let slot = rng.gen_range(0..=parts);
        if slot < parts {
            out[slot].insert(v);
        }
    }
    out
}

fn use_sampling(coverage: Coverage, count: u128, opts: &VerifyOptions) -> bool {
    match coverage {
        Coverage::Exhaustive => false,
        Coverage::Sampled => true,
        Coverage::Auto => count > opts.exhaustive_limit as u128,
    }
}

/// `f*(S ∪ A, T ∪ B) = f*(S, T)` iff the blocking digraph of `(S, T)` has
/// no arc from `A ∪ {S°}` into `B ∪ {T°}`, over disjoint `(S, T, A, B)`.
pub fn check_lemma_digraph(f: &ConnectivityFn, coverage: Coverage, opts: &VerifyOptions) -> Result<VerifyReport> {
    let mut report = VerifyReport::new("digraph");
    let n = f.len();
    let fs = FStar::new(f, opts.backend.clone());
    let ground = f.ground();
    let record = |report: &mut VerifyReport, s: &SubsetMask, t: &SubsetMask, a: &SubsetMask, b: &SubsetMask, lr: (bool, bool)| {
        report.instances += 1;
        if lr.0 != lr.1 {
            report.fail(format!(
                "S={};T={};A={};B={};lhs={};rhs={}",
                show(ground, s),
                show(ground, t),
                show(ground, a),
                show(ground, b),
                lr.0,
                lr.1
            ));
        }
    };
    if use_sampling(coverage, 5u128.saturating_pow(n as u32), opts) {
        report.sampled = true;
        report.seed = Some(opts.seed);
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        for _ in 0..opts.samples {
            let parts = random_parts(&mut rng, n, 4);
            let d = build_blocking_with(&fs, &parts[0], &parts[1], opts.faults)?;
            let lr = lemma_digraph_check_on(&fs, &d, &parts[2], &parts[3])?;
            record(&mut report, &parts[0], &parts[1], &parts[2], &parts[3], lr);
            if !report.passed {
                break;
            }
        }
        return Ok(report);
    }
    for (s, t) in disjoint_pairs(n) {
        let d = build_blocking_with(&fs, &s, &t, opts.faults)?;
        let free = d.free.to_vec();
        for (za, zb) in disjoint_pairs(free.len()) {
            let a = SubsetMask::from_indices(n, za.iter().map(|i| free[i]));
            let b = SubsetMask::from_indices(n, zb.iter().map(|i| free[i]));
            let lr = lemma_digraph_check_on(&fs, &d, &a, &b)?;
            record(&mut report, &s, &t, &a, &b, lr);
            if !report.passed {
                return Ok(report);
            }
        }
    }
    Ok(report)
}

/// Conditions (i)-(iv) of an interpolation plus `f*(S, T) = f*(T, S)`.
/// Monotonicity is checked one element at a time, which implies it in full.
pub fn check_interpolation_axioms(f: &ConnectivityFn, coverage: Coverage, opts: &VerifyOptions) -> Result<VerifyReport> {
    let mut report = VerifyReport::new("interp");
    let n = f.len();
    let fs = FStar::new(f, opts.backend.clone());
    let ground = f.ground();
    let pair = |s: &SubsetMask, t: &SubsetMask| format!("({},{})", show(ground, s), show(ground, t));

    let empty = ground.empty_set();
    report.instances += 1;
    if fs.value(&empty, &empty)? != 0 {
        report.fail("condition=empty;f*(∅,∅)!=0".to_string());
        return Ok(report);
    }

    // Pairs for the single-pair properties, and pairs of pairs for submodularity.
    let sampled = use_sampling(coverage, 9u128.saturating_pow(n as u32), opts);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let singles: Vec<(SubsetMask, SubsetMask)> = if sampled {
        report.sampled = true;
        report.seed = Some(opts.seed);
        (0..opts.samples)
            .map(|_| {
                let p = random_parts(&mut rng, n, 2);
                (p[0].clone(), p[1].clone())
            })
            .collect()
    } else {
        disjoint_pairs(n)
    };

    for (s, t) in &singles {
        let v = fs.value(s, t)?;
        report.instances += 1;
        if s.union(t).len() == n && v != f.eval(s) {
            report.fail(format!("condition=i;pair={}", pair(s, t)));
            return Ok(report);
        }
        if fs.value(t, s)? != v {
            report.fail(format!("condition=symmetry;pair={}", pair(s, t)));
            return Ok(report);
        }
        for x in s.union(t).complement().iter() {
            if fs.value(&s.with(x), t)? < v || fs.value(s, &t.with(x))? < v {
                report.fail(format!("condition=ii;pair={};element={}", pair(s, t), ground.name(x)));
                return Ok(report);
            }
        }
    }

    let mut submodular = |a: &SubsetMask, b: &SubsetMask, c: &SubsetMask, d: &SubsetMask| -> Result<bool> {
        report.instances += 1;
        let lhs = fs.value(a, b)? + fs.value(c, d)?;
        let rhs = fs.value(&a.intersection(c), &b.union(d))? + fs.value(&a.union(c), &b.intersection(d))?;
        Ok(lhs >= rhs)
    };
    let mut witness = None;
    if sampled {
        for _ in 0..opts.samples {
            let p = random_parts(&mut rng, n, 2);
            let q = random_parts(&mut rng, n, 2);
            if !submodular(&p[0], &p[1], &q[0], &q[1])? {
                witness = Some(format!("condition=iii;pairs={}{}", pair(&p[0], &p[1]), pair(&q[0], &q[1])));
                break;
            }
        }
    } else {
        'outer: for (a, b) in &singles {
            for (c, d) in &singles {
                if !submodular(a, b, c, d)? {
                    witness = Some(format!("condition=iii;pairs={}{}", pair(a, b), pair(c, d)));
                    break 'outer;
                }
            }
        }
    }
    if let Some(w) = witness {
        report.fail(w);
    }
    Ok(report)
}

/// Compares cardinality-constrained search against brute force for every
/// `k' <= k`, window `W` and single target `t`.
pub fn check_bisection(f: &ConnectivityFn, k: i64, coverage: Coverage, opts: &VerifyOptions) -> Result<VerifyReport> {
    let mut report = VerifyReport::new("bisect");
    require_brute_force(f)?;
    let n = f.len();
    let ground = f.ground();
    let count = (1u128 << n) * (n as u128 + 1) * (k.max(0) as u128 + 1);
    let windows: Vec<SubsetMask> = if use_sampling(coverage, count, opts) {
        report.sampled = true;
        report.seed = Some(opts.seed);
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let draws = (opts.samples / (n as u64 + 1)).max(1);
        (0..draws).map(|_| SubsetMask::from_indices(n, (0..n).filter(|_| rng.gen_bool(0.5)))).collect()
    } else {
        ground.all_subsets().collect()
    };
    let encode_opts = EncodeOptions { provenance: false, ..opts.encode_options() };
    for kk in 0..=k {
        let rep = encode_with(f, kk, &encode_opts)?;
        let family = brute_family(f, kk)?;
        for w in &windows {
            let achievable: BTreeSet<usize> = family.iter().map(|a| a.intersection(w).len()).collect();
            for t in 0..=w.len() {
                report.instances += 1;
                let got = search_representation(&rep, w, &[t], opts.faults);
                let ok = match &got {
                    Some(a) => f.eval(a) == kk && a.intersection(w).len() == t,
                    None => !achievable.contains(&t),
                };
                if !ok {
                    let found = got.map_or("none".to_string(), |a| show(ground, &a));
                    report.fail(format!("k={kk};W={};t={t};found={found}", show(ground, w)));
                    return Ok(report);
                }
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Encoding,
    Skew,
    Digraph,
    Axioms,
    Interp,
    Bisect,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 7] = ["encoding", "skew", "digraph", "axioms", "interp", "bisect", "all"];
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "encoding" => Suite::Encoding,
            "skew" => Suite::Skew,
            "digraph" => Suite::Digraph,
            "axioms" => Suite::Axioms,
            "interp" => Suite::Interp,
            "bisect" => Suite::Bisect,
            "all" => Suite::All,
            _ => return Err(Error::input(format!("unknown suite {s} (expected one of {})", Suite::NAMES.join(", ")))),
        })
    }
}

pub fn run_suite(f: &ConnectivityFn, k: i64, suite: Suite, opts: &VerifyOptions) -> Result<Vec<VerifyReport>> {
    let wanted = |s: Suite| suite == s || suite == Suite::All;
    let mut reports = Vec::new();
    if wanted(Suite::Axioms) {
        reports.push(check_axioms_report(f)?);
    }
    if wanted(Suite::Interp) {
        reports.push(check_interpolation_axioms(f, Coverage::Auto, opts)?);
    }
    if wanted(Suite::Digraph) {
        reports.push(check_lemma_digraph(f, Coverage::Auto, opts)?);
    }
    if wanted(Suite::Skew) {
        reports.push(check_no_large_skew(f, k, opts)?);
    }
    if wanted(Suite::Encoding) {
        reports.push(check_encoding_exact(f, k, opts)?);
    }
    if wanted(Suite::Bisect) {
        reports.push(check_bisection(f, k, Coverage::Auto, opts)?);
    }
    Ok(reports)
}

/// Seeded random instances.
pub mod random {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use crate::digraph::Digraph;
    use crate::ground::SubsetMask;
    use crate::oracles::{Gf2Matrix, Graph};

    /// `G(n, p)`: each pair `u < v` in lexicographic order is an edge with
    /// probability `p`.
    pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Graph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) {
                    edges.push((u, v));
                }
            }
        }
        Graph::from_edges(n, &edges)
    }

    pub fn random_gf2_matrix(rows: usize, cols: usize, density: f64, seed: u64) -> Gf2Matrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows = (0..rows)
            .map(|_| SubsetMask::from_indices(cols, (0..cols).filter(|_| rng.gen_bool(density))))
            .collect();
        Gf2Matrix::from_rows(cols, rows).expect("rows have the declared width")
    }

    /// Each ordered pair `u != v` is an arc with probability `p`.
    pub fn random_digraph(n: usize, p: f64, seed: u64) -> Digraph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut d = Digraph::new(n);
        for u in 0..n {
            for v in 0..n {
                if u != v && rng.gen_bool(p) {
                    d.add_arc(u, v);
                }
            }
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{cut_rank_oracle, edge_cut_oracle, table_from_values, Graph};

    fn p4() -> ConnectivityFn {
        edge_cut_oracle(&Graph::path(4))
    }

    #[test]
    fn brute_family_examples() {
        let f = p4();
        let fam = brute_family(&f, 1).unwrap();
        let shown: Vec<String> = fam.iter().map(|x| f.ground().format(x)).collect();
        assert_eq!(shown, vec!["a", "a,b", "a,b,c", "b,c,d", "c,d", "d"]);
        assert!(brute_family(&f, 0).unwrap().contains(&f.ground().full_set()));
        assert!(brute_family(&f, -1).unwrap().is_empty());
    }

    #[test]
    fn report_rendering() {
        let mut r = VerifyReport::new("encoding");
        r.instances = 16;
        assert_eq!(r.to_string(), "CHECK encoding PASS instances=16");
        r.sampled = true;
        r.seed = Some(7);
        r.fail("k=1;diff={a}".into());
        assert_eq!(r.to_string(), "CHECK encoding FAIL instances=16 mode=sampled seed=7 witness=k=1;diff={a}");
    }

    #[test]
    fn encoding_checks() {
        let f = p4();
        let opts = VerifyOptions::default();
        assert!(check_encoding_exact(&f, 1, &opts).unwrap().passed);
        assert!(check_encoding_exact(&f, 0, &opts).unwrap().passed);

        // Removing every triple that decodes {a} is caught with {a} as witness.
        let rep = encode_with(&f, 1, &EncodeOptions::default()).unwrap();
        let a = f.ground().parse_subset("a").unwrap();
        let mut broken = rep.clone();
        broken.triples.retain(|tr| !tr.decodes(&a));
        broken.provenance = None;
        let r = check_representation_exact(&f, &broken).unwrap();
        assert!(!r.passed);
        assert!(r.witness.unwrap().contains("diff={a}"));
    }

    #[test]
    fn skew_checks() {
        let opts = VerifyOptions::default();
        assert!(check_no_large_skew(&p4(), 1, &opts).unwrap().passed);
        assert!(check_no_large_skew(&p4(), 0, &opts).unwrap().passed);
        let c5 = cut_rank_oracle(&Graph::cycle(5));
        assert!(check_no_large_skew(&c5, 2, &opts).unwrap().passed);
    }

    #[test]
    fn digraph_checks() {
        let opts = VerifyOptions::default();
        let p3 = edge_cut_oracle(&Graph::path(3));
        let r = check_lemma_digraph(&p3, Coverage::Exhaustive, &opts).unwrap();
        assert!(r.passed && !r.sampled);
        assert_eq!(r.instances, 5u64.pow(3));
        let k3 = cut_rank_oracle(&Graph::complete(3));
        assert!(check_lemma_digraph(&k3, Coverage::Exhaustive, &opts).unwrap().passed);
        let sampled = check_lemma_digraph(&p4(), Coverage::Sampled, &VerifyOptions { samples: 200, ..opts }).unwrap();
        assert!(sampled.passed && sampled.sampled);
        assert!(sampled.to_string().contains("mode=sampled seed=0"));
    }

    #[test]
    fn interpolation_checks() {
        let opts = VerifyOptions::default();
        let p3 = edge_cut_oracle(&Graph::path(3));
        assert!(check_interpolation_axioms(&p3, Coverage::Exhaustive, &opts).unwrap().passed);
        let c5 = cut_rank_oracle(&Graph::cycle(5));
        assert!(check_interpolation_axioms(&c5, Coverage::Exhaustive, &opts).unwrap().passed);
        let mnp = VerifyOptions { backend: SfmBackend::min_norm_point(), ..VerifyOptions::default() };
        assert!(check_interpolation_axioms(&c5, Coverage::Exhaustive, &mnp).unwrap().passed);
    }

    #[test]
    fn axiom_report() {
        let bad = table_from_values(GroundSet::new(["1", "2"]).unwrap(), vec![0, -1, -1, 0]);
        let r = check_axioms_report(&bad).unwrap();
        assert!(!r.passed);
        assert_eq!(r.witness.unwrap(), "axiom=submodularity;X={1};Y={2}");
    }

    #[test]
    fn seeded_bugs_are_caught() {
        let f = p4();
        for bug in SeededBug::ALL {
            let opts = VerifyOptions { faults: Some(bug), ..VerifyOptions::default() };
            let reports = run_suite(&f, 1, Suite::All, &opts).unwrap();
            assert!(reports.iter().any(|r| !r.passed), "{bug} went unnoticed");
        }
        let clean = run_suite(&f, 1, Suite::All, &VerifyOptions::default()).unwrap();
        assert_eq!(clean.len(), 6);
        assert!(clean.iter().all(|r| r.passed), "{clean:?}");
    }

    #[test]
    fn suite_names() {
        for name in Suite::NAMES {
            assert!(name.parse::<Suite>().is_ok());
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn generators_are_seeded() {
        let a = random::erdos_renyi(8, 0.5, 3);
        let b = random::erdos_renyi(8, 0.5, 3);
        assert_eq!(a.edges(), b.edges());
        assert_eq!(random::random_gf2_matrix(4, 8, 0.5, 1), random::random_gf2_matrix(4, 8, 0.5, 1));
        assert_eq!(random::random_digraph(6, 0.3, 9).arcs().count(), random::random_digraph(6, 0.3, 9).arcs().count());
    }
}
