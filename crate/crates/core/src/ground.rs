//! Ground sets and subset masks.
//!
//! A [`SubsetMask`] is a fixed-width bit vector backed by machine words. Masks
//! are plain values; every operation on two masks requires equal widths.
//! Exhaustive verification elsewhere in the crate is only practical for
//! ground sets of at most 20 elements, but the mask type itself has no limit.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use smallvec::SmallVec;

use crate::error::{Error, Result};

const WORD: usize = 64;

/// Subset of `{0, .., width-1}` stored as a bit vector.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SubsetMask {
    width: usize,
    words: SmallVec<[u64; 1]>,
}

fn word_count(width: usize) -> usize {
    width.div_ceil(WORD)
}

impl SubsetMask {
    pub fn empty(width: usize) -> Self {
        SubsetMask {
            width,
            words: SmallVec::from_elem(0, word_count(width)),
        }
    }

    pub fn full(width: usize) -> Self {
        let mut m = Self::empty(width);
        for (i, w) in m.words.iter_mut().enumerate() {
            let lo = i * WORD;
            let hi = (lo + WORD).min(width);
            *w = if hi - lo == WORD { u64::MAX } else { (1u64 << (hi - lo)) - 1 };
        }
        m
    }

    pub fn singleton(width: usize, i: usize) -> Self {
        let mut m = Self::empty(width);
        m.insert(i);
        m
    }

    pub fn from_indices(width: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut m = Self::empty(width);
        for i in indices {
            m.insert(i);
        }
        m
    }

    /// Builds a mask from the low `width` bits of `bits` (bit `i` is element `i`).
    pub fn from_bits(width: usize, bits: u64) -> Self {
        assert!(width <= WORD || bits >> WORD.min(63) == 0);
        let mut m = Self::empty(width);
        if width > 0 {
            let keep = if width >= WORD { u64::MAX } else { (1u64 << width) - 1 };
            m.words[0] = bits & keep;
        }
        m
    }

    /// Low 64 bits of the mask. Only meaningful when `width <= 64`.
    pub fn to_bits(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn contains(&self, i: usize) -> bool {
        assert!(i < self.width, "element {i} outside width {}", self.width);
        self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.width, "element {i} outside width {}", self.width);
        self.words[i / WORD] |= 1 << (i % WORD);
    }

    pub fn remove(&mut self, i: usize) {
        assert!(i < self.width, "element {i} outside width {}", self.width);
        self.words[i / WORD] &= !(1 << (i % WORD));
    }

    pub fn with(&self, i: usize) -> Self {
        let mut m = self.clone();
        m.insert(i);
        m
    }

    pub fn without(&self, i: usize) -> Self {
        let mut m = self.clone();
        m.remove(i);
        m
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    fn check_width(&self, other: &Self) {
        assert_eq!(
            self.width, other.width,
            "internal error: subset width mismatch ({} vs {})",
            self.width, other.width
        );
    }

    fn zip(&self, other: &Self, op: impl Fn(u64, u64) -> u64) -> Self {
        self.check_width(other);
        SubsetMask {
            width: self.width,
            words: self.words.iter().zip(&other.words).map(|(&a, &b)| op(a, b)).collect(),
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a & !b)
    }

    pub fn symmetric_difference(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a ^ b)
    }

    pub fn complement(&self) -> Self {
        Self::full(self.width).difference(self)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.check_width(other);
        self.words.iter().zip(&other.words).all(|(&a, &b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.check_width(other);
        self.words.iter().zip(&other.words).all(|(&a, &b)| a & b == 0)
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    /// Elements in ascending index order.
    pub fn iter(&self) -> Iter<'_> {
        Iter { mask: self, word: 0, cur: self.words.first().copied().unwrap_or(0) }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Re-expresses this mask in a different width, keeping elements `< width`.
    pub fn resized(&self, width: usize) -> Self {
        SubsetMask::from_indices(width, self.iter().filter(|&i| i < width))
    }
}

pub struct Iter<'a> {
    mask: &'a SubsetMask,
    word: usize,
    cur: u64,
}

impl Iterator for Iter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.cur != 0 {
                let bit = self.cur.trailing_zeros() as usize;
                self.cur &= self.cur - 1;
                return Some(self.word * WORD + bit);
            }
            self.word += 1;
            if self.word >= self.mask.words.len() {
                return None;
            }
            self.cur = self.mask.words[self.word];
        }
    }
}

/// Masks order by comparing their ascending element lists lexicographically,
/// so `{} < {0} < {0,1} < {0,2} < {1}`.
impl Ord for SubsetMask {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.width.cmp(&other.width) {
            Ordering::Equal => {}
            o => return o,
        }
        let diff = self.symmetric_difference(other);
        let Some(i) = diff.first() else {
            return Ordering::Equal;
        };
        // Both lists agree below i; whoever holds i is smaller unless the
        // other list simply ends there.
        let self_holds = self.contains(i);
        let other_side = if self_holds { other } else { self };
        let holder_smaller = other_side.iter().any(|j| j > i);
        if self_holds == holder_smaller {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }
}

impl PartialOrd for SubsetMask {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Pair of disjoint subsets, an element of `3^V`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DisjointPair {
    pub s: SubsetMask,
    pub t: SubsetMask,
}

impl DisjointPair {
    pub fn new(s: SubsetMask, t: SubsetMask) -> Result<Self> {
        if !s.is_disjoint(&t) {
            return Err(Error::contract(format!("pair is not disjoint: {s:?} / {t:?}")));
        }
        Ok(DisjointPair { s, t })
    }
}

/// Ordered list of distinct element labels. Element `i` is `names[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundSet {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl GroundSet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::input("empty element label"));
            }
            if name.contains(',') || name.chars().any(char::is_whitespace) {
                return Err(Error::input(format!("element label {name:?} contains a separator")));
            }
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::input(format!("duplicate element {name}")));
            }
        }
        Ok(GroundSet { names, index })
    }

    /// Ground set labelled `prefix0, prefix1, ...`.
    pub fn numbered(prefix: &str, n: usize) -> Self {
        GroundSet::new((0..n).map(|i| format!("{prefix}{i}"))).expect("generated labels are distinct")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn empty_set(&self) -> SubsetMask {
        SubsetMask::empty(self.len())
    }

    pub fn full_set(&self) -> SubsetMask {
        SubsetMask::full(self.len())
    }

    /// Parses a comma-separated label list. Empty text is the empty set.
    pub fn parse_subset(&self, text: &str) -> Result<SubsetMask> {
        let mut mask = self.empty_set();
        let text = text.trim();
        if text.is_empty() {
            return Ok(mask);
        }
        for label in text.split(',').map(str::trim) {
            let i = self
                .index_of(label)
                .ok_or_else(|| Error::input(format!("unknown element {label}")))?;
            if mask.contains(i) {
                return Err(Error::input(format!("duplicate element {label}")));
            }
            mask.insert(i);
        }
        Ok(mask)
    }

    /// Canonical rendering: labels in ground order, comma-separated, no spaces.
    pub fn format(&self, mask: &SubsetMask) -> String {
        self.labels(mask).join(",")
    }

    pub fn labels<'a>(&'a self, mask: &SubsetMask) -> Vec<&'a str> {
        assert_eq!(mask.width(), self.len(), "internal error: mask width does not match ground set");
        mask.iter().map(|i| self.names[i].as_str()).collect()
    }

    /// All `2^n` subsets in binary-counter order (element 0 is the low bit).
    pub fn all_subsets(&self) -> impl Iterator<Item = SubsetMask> + '_ {
        all_subsets(self.len())
    }
}

/// All `2^width` subsets of `{0..width}` in binary-counter order.
pub fn all_subsets(width: usize) -> impl Iterator<Item = SubsetMask> {
    assert!(width < 64, "cannot enumerate 2^{width} subsets");
    (0..1u64 << width).map(move |bits| SubsetMask::from_bits(width, bits))
}

/// All subsets of `{0..width}` with at most `max_size` elements, ordered by
/// size and then lexicographically.
pub fn subsets_up_to(width: usize, max_size: usize) -> Vec<SubsetMask> {
    let mut out = Vec::new();
    for size in 0..=max_size.min(width) {
        combinations(width, size, &mut |c| out.push(SubsetMask::from_indices(width, c.iter().copied())));
    }
    out
}

/// Calls `visit` with every `size`-subset of `{0..n}` as a sorted slice, in
/// lexicographic order.
pub fn combinations(n: usize, size: usize, visit: &mut dyn FnMut(&[usize])) {
    fn rec(start: usize, n: usize, size: usize, acc: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if acc.len() == size {
            visit(acc);
            return;
        }
        let need = size - acc.len();
        for i in start..=n.saturating_sub(need) {
            if n - i < need {
                break;
            }
            acc.push(i);
            rec(i + 1, n, size, acc, visit);
            acc.pop();
        }
    }
    if size > n {
        return;
    }
    rec(0, n, size, &mut Vec::with_capacity(size), visit);
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn abc() -> GroundSet {
        GroundSet::new(["a", "b", "c"]).unwrap()
    }

    #[test]
    fn parse_examples() {
        let g = abc();
        assert_eq!(g.parse_subset("a,c").unwrap().to_vec(), vec![0, 2]);
        assert!(g.parse_subset("").unwrap().is_empty());
        let ab = GroundSet::new(["a", "b"]).unwrap();
        assert_eq!(ab.parse_subset("z").unwrap_err(), Error::Input("unknown element z".into()));
        assert!(matches!(g.parse_subset("a,a"), Err(Error::Input(_))));
    }

    #[test]
    fn set_op_examples() {
        let g = abc();
        let x = g.parse_subset("a,b").unwrap();
        let y = g.parse_subset("b,c").unwrap();
        assert_eq!(g.format(&x.symmetric_difference(&y)), "a,c");
        assert_eq!(g.format(&g.empty_set().complement()), "a,b,c");
        assert_eq!(g.parse_subset("a,c").unwrap().len(), 2);
    }

    #[test]
    fn ground_rejects_bad_labels() {
        assert!(GroundSet::new(["a", "a"]).is_err());
        assert!(GroundSet::new(["a", ""]).is_err());
    }

    #[test]
    #[should_panic(expected = "width mismatch")]
    fn width_mismatch_panics() {
        let _ = SubsetMask::empty(3).union(&SubsetMask::empty(4));
    }

    #[test]
    fn wide_masks() {
        let m = SubsetMask::from_indices(130, [0, 64, 129]);
        assert_eq!(m.to_vec(), vec![0, 64, 129]);
        assert_eq!(m.complement().len(), 127);
        assert_eq!(SubsetMask::full(128).len(), 128);
    }

    #[test]
    fn lexicographic_order() {
        let w = 3;
        let mut all: Vec<_> = all_subsets(w).collect();
        all.sort();
        let lists: Vec<Vec<usize>> = all.iter().map(|m| m.to_vec()).collect();
        let mut expected = lists.clone();
        expected.sort();
        assert_eq!(lists, expected);
        assert_eq!(lists[0], Vec::<usize>::new());
        assert_eq!(lists[1], vec![0]);
        assert_eq!(lists[2], vec![0, 1]);
    }

    #[test]
    fn combination_order() {
        let subs = subsets_up_to(4, 2);
        assert_eq!(subs.len(), 1 + 4 + 6);
        assert_eq!(subs[5].to_vec(), vec![0, 1]);
        assert_eq!(subs[10].to_vec(), vec![2, 3]);
    }

    proptest! {
        #[test]
        fn inclusion_exclusion(a in any::<u32>(), b in any::<u32>(), w in 1usize..=32) {
            let x = SubsetMask::from_bits(w, a as u64);
            let y = SubsetMask::from_bits(w, b as u64);
            prop_assert_eq!(x.union(&y).len() + x.intersection(&y).len(), x.len() + y.len());
            prop_assert_eq!(x.complement().complement(), x.clone());
            prop_assert!(x.intersection(&x.complement()).is_empty());
        }

        #[test]
        fn format_parse_round_trip(bits in 0u64..(1 << 6)) {
            let g = GroundSet::new(["p", "q", "r", "s", "t", "u"]).unwrap();
            let m = SubsetMask::from_bits(6, bits);
            let text = g.format(&m);
            prop_assert_eq!(g.parse_subset(&text).unwrap(), m.clone());
            // Parsing in scrambled order still renders canonically.
            let mut labels = g.labels(&m);
            labels.reverse();
            prop_assert_eq!(g.format(&g.parse_subset(&labels.join(",")).unwrap()), text);
        }

        #[test]
        fn order_matches_index_lists(a in 0u64..256, b in 0u64..256) {
            let x = SubsetMask::from_bits(8, a);
            let y = SubsetMask::from_bits(8, b);
            prop_assert_eq!(x.cmp(&y), x.to_vec().cmp(&y.to_vec()));
        }
    }
}
