//! The canonical interpolation `f*(S, T) = min { f(X) : S ⊆ X ⊆ V - T }`,
//! submodular minimization backends behind it, and small-base extraction.

mod mnp;

use std::fmt;

use dashmap::DashMap;

use crate::error::{Error, Result};
use crate::ground::{DisjointPair, SubsetMask};
use crate::oracles::ConnectivityFn;

pub use mnp::MnpConfig;

/// Largest ground set the exhaustive backend will enumerate.
pub const EXHAUSTIVE_LIMIT: usize = 26;

/// An arbitrary integer set function on `{0..width}`.
pub struct GenericSetFn<'a> {
    width: usize,
    eval: Box<dyn Fn(&SubsetMask) -> i64 + Send + Sync + 'a>,
}

impl<'a> GenericSetFn<'a> {
    pub fn new(width: usize, eval: impl Fn(&SubsetMask) -> i64 + Send + Sync + 'a) -> Self {
        GenericSetFn { width, eval: Box::new(eval) }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn eval(&self, x: &SubsetMask) -> i64 {
        debug_assert_eq!(x.width(), self.width);
        (self.eval)(x)
    }
}

impl fmt::Debug for GenericSetFn<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GenericSetFn(width={})", self.width)
    }
}

/// Which submodular minimization routine answers `f*` queries.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum SfmBackend {
    /// Enumerate every subset. Exact; ties go to the lexicographically
    /// smallest minimizer.
    #[default]
    Exhaustive,
    /// Fujishige–Wolfe minimum-norm point with integrality certification.
    MinNormPoint(MnpConfig),
}

impl SfmBackend {
    pub fn min_norm_point() -> Self {
        SfmBackend::MinNormPoint(MnpConfig::default())
    }

    pub fn tag(&self) -> &'static str {
        match self {
            SfmBackend::Exhaustive => "exhaustive",
            SfmBackend::MinNormPoint(_) => "mnp",
        }
    }
}

/// A minimizer and its value. `certified_gap` is set by the numeric backend.
#[derive(Clone, Debug, PartialEq)]
pub struct Minimum {
    pub set: SubsetMask,
    pub value: i64,
    pub certified_gap: Option<f64>,
}

/// Minimizes a submodular function. The caller guarantees submodularity.
pub fn sfm_minimize(g: &GenericSetFn<'_>, backend: &SfmBackend) -> Result<Minimum> {
    match backend {
        SfmBackend::Exhaustive => exhaustive_minimize(g),
        SfmBackend::MinNormPoint(cfg) => {
            if cfg.gap > 0.5 {
                return Err(Error::contract("min-norm-point gap threshold must be at most 1/2"));
            }
            mnp::minimize(g, cfg)
        }
    }
}

fn exhaustive_minimize(g: &GenericSetFn<'_>) -> Result<Minimum> {
    let m = g.width();
    if m > EXHAUSTIVE_LIMIT {
        return Err(Error::Resource(format!("exhaustive minimization over 2^{m} sets")));
    }
    let mut best: Option<(i64, SubsetMask)> = None;
    for bits in 0..1u64 << m {
        let x = SubsetMask::from_bits(m, bits);
        let v = g.eval(&x);
        let better = match &best {
            None => true,
            Some((bv, bx)) => v < *bv || (v == *bv && x < *bx),
        };
        if better {
            best = Some((v, x));
        }
    }
    let (value, set) = best.expect("at least the empty set is evaluated");
    Ok(Minimum { set, value, certified_gap: None })
}

/// Memoized `f*` for one connectivity function.
///
/// The cache is shared between workers; concurrent misses on the same key
/// compute the same deterministic value, and the first insert wins.
pub struct FStar<'f> {
    f: &'f ConnectivityFn,
    backend: SfmBackend,
    cache: DashMap<(SubsetMask, SubsetMask), i64>,
}

impl fmt::Debug for FStar<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FStar").field("backend", &self.backend).field("cached", &self.cache.len()).finish()
    }
}

impl<'f> FStar<'f> {
    pub fn new(f: &'f ConnectivityFn, backend: SfmBackend) -> Self {
        FStar { f, backend, cache: DashMap::new() }
    }

    pub fn function(&self) -> &'f ConnectivityFn {
        self.f
    }

    pub fn backend(&self) -> &SfmBackend {
        &self.backend
    }

    pub fn n(&self) -> usize {
        self.f.len()
    }

    /// Number of distinct pairs evaluated so far.
    pub fn distinct_evaluations(&self) -> usize {
        self.cache.len()
    }

    pub fn value(&self, s: &SubsetMask, t: &SubsetMask) -> Result<i64> {
        if !s.is_disjoint(t) {
            return Err(Error::contract(format!("f* called on overlapping pair {s:?} / {t:?}")));
        }
        let key = (s.clone(), t.clone());
        if let Some(v) = self.cache.get(&key) {
            return Ok(*v);
        }
        let v = self.compute(s, t)?;
        self.cache.entry(key).or_insert(v);
        Ok(v)
    }

    pub fn pair_value(&self, pair: &DisjointPair) -> Result<i64> {
        self.value(&pair.s, &pair.t)
    }

    fn compute(&self, s: &SubsetMask, t: &SubsetMask) -> Result<i64> {
        let n = self.n();
        let free = s.union(t).complement();
        match self.backend {
            SfmBackend::Exhaustive if n <= 64 => {
                if free.len() > EXHAUSTIVE_LIMIT {
                    return Err(Error::Resource(format!("exhaustive f* over 2^{} sets", free.len())));
                }
                // Submasks of `free` in increasing order.
                let free_bits = free.to_bits();
                let s_bits = s.to_bits();
                let mut sub = 0u64;
                let mut best = i64::MAX;
                loop {
                    best = best.min(self.f.eval(&SubsetMask::from_bits(n, s_bits | sub)));
                    if sub == free_bits {
                        break;
                    }
                    sub = (sub.wrapping_sub(free_bits)) & free_bits;
                }
                Ok(best)
            }
            _ => {
                let g = self.restriction(s, &free);
                Ok(sfm_minimize(&g, &self.backend)?.value)
            }
        }
    }

    /// `Z ↦ f(S ∪ Z)` on the free elements, indexed in ground order.
    fn restriction<'a>(&'a self, s: &SubsetMask, free: &SubsetMask) -> GenericSetFn<'a> {
        let index: Vec<usize> = free.to_vec();
        let s = s.clone();
        GenericSetFn::new(index.len(), move |z: &SubsetMask| {
            let mut x = s.clone();
            for i in z.iter() {
                x.insert(index[i]);
            }
            self.f.eval(&x)
        })
    }
}

/// `f*(S, T)`; overlapping arguments are a contract violation.
pub fn fstar(fs: &FStar<'_>, s: &SubsetMask, t: &SubsetMask) -> Result<i64> {
    fs.value(s, t)
}

/// Deletion greedy for a monotone submodular `r` with `r(∅) = 0`: scan the
/// elements in order and drop each one whose removal keeps `r` unchanged.
/// The result `A` has `r(A) = r(ground)`, and `|A| <= r(ground)` holds by
/// submodularity. Uses exactly `width + 1` evaluations.
pub fn shrink_support(r: &GenericSetFn<'_>) -> Result<SubsetMask> {
    let mut kept = SubsetMask::full(r.width());
    let mut value = r.eval(&kept);
    for v in 0..r.width() {
        let smaller = kept.without(v);
        let rv = r.eval(&smaller);
        if rv > value {
            return Err(Error::contract(format!(
                "set function is not monotone: removing element {v} raised the value from {value} to {rv}"
            )));
        }
        if rv == value {
            kept = smaller;
            value = rv;
        }
    }
    Ok(kept)
}

/// Finds `A ⊆ X`, `B ⊆ V - X` with `|A|, |B| <= k` and `f*(A, B) = k`, given
/// `f(X) = k`.
pub fn find_base(fs: &FStar<'_>, x: &SubsetMask, k: i64) -> Result<DisjointPair> {
    let f = fs.function();
    let fx = f.eval(x);
    if fx != k {
        return Err(Error::contract(format!("find_base requires f(X) = {k}, but f(X) = {fx}")));
    }
    let outside = x.complement();
    let n = f.len();

    let inside_idx = x.to_vec();
    let failure = std::sync::Mutex::new(None);
    let a = {
        let r = GenericSetFn::new(inside_idx.len(), |z: &SubsetMask| {
            let s = SubsetMask::from_indices(n, z.iter().map(|i| inside_idx[i]));
            fs.value(&s, &outside).unwrap_or_else(|e| {
                failure.lock().unwrap().get_or_insert(e);
                0
            })
        });
        let local = shrink_support(&r)?;
        SubsetMask::from_indices(n, local.iter().map(|i| inside_idx[i]))
    };
    if let Some(e) = failure.lock().unwrap().take() {
        return Err(e);
    }

    let outside_idx = outside.to_vec();
    let b = {
        let r = GenericSetFn::new(outside_idx.len(), |z: &SubsetMask| {
            let t = SubsetMask::from_indices(n, z.iter().map(|i| outside_idx[i]));
            fs.value(&a, &t).unwrap_or_else(|e| {
                failure.lock().unwrap().get_or_insert(e);
                0
            })
        });
        let local = shrink_support(&r)?;
        SubsetMask::from_indices(n, local.iter().map(|i| outside_idx[i]))
    };
    if let Some(e) = failure.lock().unwrap().take() {
        return Err(e);
    }
    DisjointPair::new(a, b)
}
