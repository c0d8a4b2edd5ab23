//! Cardinality-constrained search: a set `A` with `f(A) = k` (or `<= k`) and
//! `|A ∩ W|` in a target set, found by a subset-sum table over the classes of
//! each encoding triple.

use std::collections::BTreeSet;

use crate::encoder::{encode_with, EncodeOptions, Representation};
use crate::error::{Error, Result};
use crate::ground::SubsetMask;
use crate::interpolation::SfmBackend;
use crate::mutation::{self, SeededBug};
use crate::oracles::ConnectivityFn;

/// `cells[j][t]` is the witness `I_j(t)`: indices (0-based) of the first `j`
/// sizes whose sum with `s0` is `t`, or `None` when `t` is unreachable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DpTable {
    pub s0: usize,
    pub sizes: Vec<usize>,
    pub cells: Vec<Vec<Option<Vec<usize>>>>,
}

impl DpTable {
    pub fn last_row(&self) -> &[Option<Vec<usize>>] {
        self.cells.last().expect("table has row 0")
    }

    pub fn witness(&self, t: usize) -> Option<&[usize]> {
        self.last_row().get(t)?.as_deref()
    }

    pub fn reachable(&self) -> Vec<usize> {
        (0..self.last_row().len()).filter(|&t| self.last_row()[t].is_some()).collect()
    }
}

pub fn dp_subset_sum(s0: usize, sizes: &[usize], max_t: usize) -> DpTable {
    dp_subset_sum_with(s0, sizes, max_t, None)
}

/// Row `j` keeps `I_{j-1}(t)` when defined and otherwise extends
/// `I_{j-1}(t - s_j)` by `j`.
pub(crate) fn dp_subset_sum_with(s0: usize, sizes: &[usize], max_t: usize, faults: Option<SeededBug>) -> DpTable {
    let drop_extend = mutation::active(faults, SeededBug::DropDpExtend);
    let mut first = vec![None; max_t + 1];
    if s0 <= max_t {
        first[s0] = Some(Vec::new());
    }
    let mut cells = vec![first];
    for (j, &size) in sizes.iter().enumerate() {
        let prev = cells.last().expect("previous row");
        let row = (0..=max_t)
            .map(|t| {
                if let Some(keep) = &prev[t] {
                    return Some(keep.clone());
                }
                if drop_extend || t < size {
                    return None;
                }
                prev[t - size].as_ref().map(|w| {
                    let mut w = w.clone();
                    w.push(j);
                    w
                })
            })
            .collect();
        cells.push(row);
    }
    DpTable { s0, sizes: sizes.to_vec(), cells }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// `f(A) = k`.
    Exact,
    /// `f(A) <= k`, tried as `k' = 0, 1, .., k`.
    AtMost,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CardinalityQuery {
    pub window: SubsetMask,
    /// Sorted, within `0..=|W|`.
    pub targets: Vec<usize>,
    pub k: i64,
    pub mode: Mode,
}

impl CardinalityQuery {
    /// Targets outside `0..=|W|` are dropped with a warning.
    pub fn new(window: SubsetMask, targets: impl IntoIterator<Item = i64>, k: i64, mode: Mode) -> Result<Self> {
        if k < 0 {
            return Err(Error::input(format!("k must be non-negative, got {k}")));
        }
        let limit = window.len() as i64;
        let mut kept = BTreeSet::new();
        for t in targets {
            if (0..=limit).contains(&t) {
                kept.insert(t as usize);
            } else {
                log::warn!("target {t} is outside 0..={limit} and is ignored");
            }
        }
        Ok(CardinalityQuery { window, targets: kept.into_iter().collect(), k, mode })
    }
}

pub fn solve(f: &ConnectivityFn, q: &CardinalityQuery, backend: SfmBackend) -> Result<Option<SubsetMask>> {
    solve_with(f, q, &EncodeOptions::with_backend(backend))
}

pub fn solve_with(f: &ConnectivityFn, q: &CardinalityQuery, options: &EncodeOptions) -> Result<Option<SubsetMask>> {
    let values = match q.mode {
        Mode::Exact => q.k..=q.k,
        Mode::AtMost => 0..=q.k,
    };
    let options = EncodeOptions { provenance: false, ..options.clone() };
    for k in values {
        let rep = encode_with(f, k, &options)?;
        if let Some(a) = search_representation(&rep, &q.window, &q.targets, options.faults) {
            return Ok(Some(a));
        }
    }
    Ok(None)
}

/// First triple, then smallest target, whose table reaches the target.
pub fn search_representation(
    rep: &Representation,
    window: &SubsetMask,
    targets: &[usize],
    faults: Option<SeededBug>,
) -> Option<SubsetMask> {
    let max_t = window.len();
    for triple in &rep.triples {
        let s0 = triple.x.intersection(window).len();
        let sizes: Vec<usize> = triple.p.iter().map(|c| c.intersection(window).len()).collect();
        let table = dp_subset_sum_with(s0, &sizes, max_t, faults);
        for &t in targets {
            if let Some(w) = table.witness(t) {
                return Some(w.iter().fold(triple.x.clone(), |acc, &j| acc.union(&triple.p[j])));
            }
        }
    }
    None
}

/// A set with `|A| = ⌊n/2⌋` and `f(A) <= k`, if one exists.
pub fn minimum_bisection(f: &ConnectivityFn, k: i64, backend: SfmBackend) -> Result<Option<SubsetMask>> {
    let n = f.len();
    let q = CardinalityQuery::new(f.ground().full_set(), [(n / 2) as i64], k, Mode::AtMost)?;
    solve(f, &q, backend)
}
