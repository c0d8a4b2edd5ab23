//! Representation of `{X : f(X) = k}` as triples `(X_i, Y_i, P_i)`.
//!
//! A set `Z` belongs to the family iff for some triple `Z ∩ (X_i ∪ Y_i) = X_i`
//! and `Z - X_i` is a union of classes of `P_i`. Triples come from every
//! ordered pair `(S, T)` with `|S|, |T| <= k` and `f*(S, T) = k`: the pruned
//! blocking digraph of the pair has no skew matching of size `2k + 1`, so its
//! closed sets are encoded with markers of size at most `2k`.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blocking::{build_blocking_with, prune};
use crate::dagenc::closed_encodings_with;
use crate::error::{Error, Result};
use crate::ground::{subsets_up_to, GroundSet, SubsetMask};
use crate::interpolation::{FStar, SfmBackend};
use crate::mutation::SeededBug;
use crate::oracles::ConnectivityFn;

/// Default cap on the number of sets [`enumerate_family`] may produce.
pub const DEFAULT_EXPANSION_BUDGET: u128 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EncodingTriple {
    pub x: SubsetMask,
    pub y: SubsetMask,
    /// Partition of `V - (X ∪ Y)`, ordered by smallest member.
    pub p: Vec<SubsetMask>,
}

impl EncodingTriple {
    /// True when `z` is `X` plus a union of classes.
    pub fn decodes(&self, z: &SubsetMask) -> bool {
        z.intersection(&self.x.union(&self.y)) == self.x
            && self.p.iter().all(|c| c.is_subset(z) || c.is_disjoint(z))
    }

    /// All `2^|P|` decodable sets.
    pub fn decode(&self) -> Vec<SubsetMask> {
        let k = self.p.len();
        assert!(k < 64, "cannot expand 2^{k} unions");
        (0..1u64 << k)
            .map(|q| (0..k).filter(|i| q >> i & 1 == 1).fold(self.x.clone(), |acc, i| acc.union(&self.p[i])))
            .collect()
    }

    fn validate(&self) -> Result<()> {
        if !self.x.is_disjoint(&self.y) {
            return Err(Error::input("triple has overlapping X and Y"));
        }
        let mut covered = self.x.union(&self.y);
        for c in &self.p {
            if c.is_empty() {
                return Err(Error::input("triple has an empty class"));
            }
            if !c.is_disjoint(&covered) {
                return Err(Error::input("triple classes overlap X, Y or each other"));
            }
            covered = covered.union(c);
        }
        if covered != SubsetMask::full(self.x.width()) {
            return Err(Error::input("triple does not cover the ground set"));
        }
        Ok(())
    }
}

/// Where a triple came from: the pair `(S, T)` and the marker `(M1, M2)`,
/// all over the ground set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub s: SubsetMask,
    pub t: SubsetMask,
    pub m1: SubsetMask,
    pub m2: SubsetMask,
}

/// Measurements of the run that produced a representation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunInfo {
    pub pairs_examined: usize,
    pub contributing_pairs: usize,
    pub fstar_evaluations: usize,
    pub wall_time: Duration,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Representation {
    pub ground: GroundSet,
    pub k: i64,
    pub triples: Vec<EncodingTriple>,
    /// Parallel to `triples` when recorded.
    pub provenance: Option<Vec<Provenance>>,
    /// Absent for representations read back from text.
    pub run: Option<RunInfo>,
}

#[derive(Clone, Debug)]
pub struct EncodeOptions {
    pub backend: SfmBackend,
    /// Worker threads for the `(S, T)` loop; 1 runs on the calling thread.
    pub jobs: usize,
    pub provenance: bool,
    /// Injected fault for mutation testing.
    pub faults: Option<SeededBug>,
}

impl Default for EncodeOptions {
    fn default() -> Self {
        EncodeOptions { backend: SfmBackend::Exhaustive, jobs: 1, provenance: true, faults: None }
    }
}

impl EncodeOptions {
    pub fn with_backend(backend: SfmBackend) -> Self {
        EncodeOptions { backend, ..Self::default() }
    }
}

pub fn encode(f: &ConnectivityFn, k: i64, backend: SfmBackend) -> Result<Representation> {
    encode_with(f, k, &EncodeOptions::with_backend(backend))
}

type PairOutput = Vec<(EncodingTriple, Provenance)>;

pub fn encode_with(f: &ConnectivityFn, k: i64, options: &EncodeOptions) -> Result<Representation> {
    if k < 0 {
        return Err(Error::input(format!("k must be non-negative, got {k}")));
    }
    let start = Instant::now();
    let n = f.len();
    let fs = FStar::new(f, options.backend.clone());
    let small = subsets_up_to(n, k as usize);
    let pairs: Vec<(&SubsetMask, &SubsetMask)> = small
        .iter()
        .flat_map(|s| small.iter().filter(move |t| s.is_disjoint(t)).map(move |t| (s, t)))
        .collect();

    let run_pair = |&(s, t): &(&SubsetMask, &SubsetMask)| -> Result<PairOutput> { encode_pair(&fs, s, t, k, options.faults) };
    let per_pair: Vec<PairOutput> = if options.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(options.jobs)
            .build()
            .map_err(|e| Error::Resource(format!("cannot start worker pool: {e}")))?;
        pool.install(|| pairs.par_iter().map(run_pair).collect::<Result<Vec<_>>>())?
    } else {
        pairs.iter().map(run_pair).collect::<Result<Vec<_>>>()?
    };

    let mut seen = HashSet::new();
    let mut triples = Vec::new();
    let mut provenance = Vec::new();
    let mut contributing = 0;
    for out in per_pair {
        contributing += usize::from(!out.is_empty());
        for (triple, prov) in out {
            if seen.insert(triple.clone()) {
                triples.push(triple);
                provenance.push(prov);
            }
        }
    }
    let bound = size_bound(n, k as usize);
    if triples.len() as u128 > bound {
        return Err(Error::contract(format!("{} triples exceed the size bound {bound}", triples.len())));
    }
    let run = RunInfo {
        pairs_examined: pairs.len(),
        contributing_pairs: contributing,
        fstar_evaluations: fs.distinct_evaluations(),
        wall_time: start.elapsed(),
    };
    log::debug!("encoded k={k} over n={n}: {} triples from {contributing} pairs", triples.len());
    Ok(Representation {
        ground: f.ground().clone(),
        k,
        triples,
        provenance: options.provenance.then_some(provenance),
        run: Some(run),
    })
}

fn encode_pair(fs: &FStar<'_>, s: &SubsetMask, t: &SubsetMask, k: i64, faults: Option<SeededBug>) -> Result<PairOutput> {
    if fs.value(s, t)? != k {
        return Ok(Vec::new());
    }
    let d = build_blocking_with(fs, s, t, faults)?;
    let pruned = prune(&d);
    if pruned.conflict {
        return Ok(Vec::new());
    }
    let inside = s.union(&pruned.forced_in);
    let outside = t.union(&pruned.forced_out);
    let list = closed_encodings_with(&pruned.graph, 2 * k as usize, faults)?;
    Ok(list
        .into_iter()
        .map(|enc| {
            let triple = EncodingTriple {
                x: pruned.to_ground(&enc.x).union(&inside),
                y: pruned.to_ground(&enc.y).union(&outside),
                p: enc.classes.iter().map(|c| pruned.to_ground(c)).collect(),
            };
            let prov = Provenance {
                s: s.clone(),
                t: t.clone(),
                m1: pruned.to_ground(&enc.marker.m1),
                m2: pruned.to_ground(&enc.marker.m2),
            };
            (triple, prov)
        })
        .collect())
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// `[Σ_{i<=k} C(n,i)]² · Σ_{j<=2k} C(n+2,j)·2^j`, saturating at `u128::MAX`.
pub fn size_bound(n: usize, k: usize) -> u128 {
    let (n, k) = (n as u128, k as u128);
    let pairs: u128 = (0..=k).map(|i| binomial(n, i)).fold(0, u128::saturating_add);
    let markers: u128 = (0..=2 * k)
        .map(|j| binomial(n + 2, j).saturating_mul(1u128.checked_shl(j as u32).unwrap_or(u128::MAX)))
        .fold(0, u128::saturating_add);
    pairs.saturating_mul(pairs).saturating_mul(markers)
}

pub fn enumerate_family(rep: &Representation) -> Result<BTreeSet<SubsetMask>> {
    enumerate_family_within(rep, DEFAULT_EXPANSION_BUDGET)
}

/// Decodes every triple, refusing when the total expansion would exceed
/// `budget` sets.
pub fn enumerate_family_within(rep: &Representation, budget: u128) -> Result<BTreeSet<SubsetMask>> {
    let total = rep
        .triples
        .iter()
        .map(|tr| 1u128.checked_shl(tr.p.len() as u32).unwrap_or(u128::MAX))
        .fold(0u128, u128::saturating_add);
    if total > budget {
        return Err(Error::Resource(format!(
            "expanding the representation yields {total} sets, over the budget of {budget}; query single sets with member instead"
        )));
    }
    Ok(rep.triples.iter().flat_map(EncodingTriple::decode).collect())
}

pub fn member(rep: &Representation, z: &SubsetMask) -> bool {
    rep.triples.iter().any(|tr| tr.decodes(z))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodeStats {
    pub triples: usize,
    pub bound: u128,
    pub within_bound: bool,
    pub run: Option<RunInfo>,
}

pub fn stats(rep: &Representation) -> EncodeStats {
    let bound = size_bound(rep.ground.len(), rep.k.max(0) as usize);
    EncodeStats {
        triples: rep.triples.len(),
        bound,
        within_bound: rep.triples.len() as u128 <= bound,
        run: rep.run.clone(),
    }
}

impl fmt::Display for EncodeStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "triples: {}", self.triples)?;
        writeln!(f, "size bound: {}", self.bound)?;
        writeln!(f, "within bound: {}", if self.within_bound { "yes" } else { "no" })?;
        if let Some(run) = &self.run {
            writeln!(f, "pairs examined: {}", run.pairs_examined)?;
            writeln!(f, "contributing pairs: {}", run.contributing_pairs)?;
            writeln!(f, "distinct f* evaluations: {}", run.fstar_evaluations)?;
            writeln!(f, "wall time: {:.3}s", run.wall_time.as_secs_f64())?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct WireTriple {
    #[serde(rename = "X")]
    x: Vec<String>,
    #[serde(rename = "Y")]
    y: Vec<String>,
    #[serde(rename = "P")]
    p: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct WireProvenance {
    #[serde(rename = "S")]
    s: Vec<String>,
    #[serde(rename = "T")]
    t: Vec<String>,
    #[serde(rename = "M1")]
    m1: Vec<String>,
    #[serde(rename = "M2")]
    m2: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireRepresentation {
    ground: Vec<String>,
    k: i64,
    triples: Vec<WireTriple>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<Vec<WireProvenance>>,
}

impl Representation {
    /// Pretty JSON with two-space indentation and a trailing newline.
    pub fn to_json(&self) -> String {
        let names = |m: &SubsetMask| -> Vec<String> { self.ground.labels(m).into_iter().map(String::from).collect() };
        let wire = WireRepresentation {
            ground: self.ground.names().to_vec(),
            k: self.k,
            triples: self
                .triples
                .iter()
                .map(|tr| {
                    let mut classes = tr.p.clone();
                    classes.sort_by_key(|c| c.first());
                    WireTriple { x: names(&tr.x), y: names(&tr.y), p: classes.iter().map(names).collect() }
                })
                .collect(),
            provenance: self.provenance.as_ref().map(|list| {
                list.iter()
                    .map(|p| WireProvenance { s: names(&p.s), t: names(&p.t), m1: names(&p.m1), m2: names(&p.m2) })
                    .collect()
            }),
        };
        let mut text = serde_json::to_string_pretty(&wire).expect("representation serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Representation> {
        let wire: WireRepresentation =
            serde_json::from_str(text).map_err(|e| Error::input(format!("malformed representation: {e}")))?;
        let ground = GroundSet::new(wire.ground)?;
        if wire.k < 0 {
            return Err(Error::input("representation has negative k"));
        }
        let parse = |labels: &[String]| -> Result<SubsetMask> { ground.parse_subset(&labels.join(",")) };
        let triples = wire
            .triples
            .iter()
            .map(|w| {
                let mut p = w.p.iter().map(|c| parse(c)).collect::<Result<Vec<_>>>()?;
                p.sort_by_key(|c| c.first());
                let triple = EncodingTriple { x: parse(&w.x)?, y: parse(&w.y)?, p };
                triple.validate()?;
                Ok(triple)
            })
            .collect::<Result<Vec<_>>>()?;
        let provenance = match wire.provenance {
            None => None,
            Some(list) => {
                if list.len() != triples.len() {
                    return Err(Error::input("provenance list does not match the triples"));
                }
                Some(
                    list.iter()
                        .map(|p| Ok(Provenance { s: parse(&p.s)?, t: parse(&p.t)?, m1: parse(&p.m1)?, m2: parse(&p.m2)? }))
                        .collect::<Result<Vec<_>>>()?,
                )
            }
        };
        Ok(Representation { ground, k: wire.k, triples, provenance, run: None })
    }
}
