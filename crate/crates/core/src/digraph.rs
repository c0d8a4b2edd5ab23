//! Small dense digraphs with bitset adjacency.

use crate::ground::SubsetMask;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Everything reachable from the set.
    Out,
    /// Everything that reaches the set.
    In,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    out: Vec<SubsetMask>,
    inc: Vec<SubsetMask>,
}

impl Digraph {
    pub fn new(n: usize) -> Self {
        Digraph { out: vec![SubsetMask::empty(n); n], inc: vec![SubsetMask::empty(n); n] }
    }

    pub fn from_arcs(n: usize, arcs: &[(usize, usize)]) -> Self {
        let mut d = Digraph::new(n);
        for &(u, v) in arcs {
            d.add_arc(u, v);
        }
        d
    }

    pub fn num_vertices(&self) -> usize {
        self.out.len()
    }

    pub fn all_vertices(&self) -> SubsetMask {
        SubsetMask::full(self.num_vertices())
    }

    pub fn empty_set(&self) -> SubsetMask {
        SubsetMask::empty(self.num_vertices())
    }

    /// Adds `u -> v`. Loops are ignored.
    pub fn add_arc(&mut self, u: usize, v: usize) {
        if u != v {
            self.out[u].insert(v);
            self.inc[v].insert(u);
        }
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.out[u].contains(v)
    }

    pub fn out_neighbors(&self, v: usize) -> &SubsetMask {
        &self.out[v]
    }

    pub fn in_neighbors(&self, v: usize) -> &SubsetMask {
        &self.inc[v]
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out.iter().enumerate().flat_map(|(u, outs)| outs.iter().map(move |v| (u, v)))
    }

    pub fn num_arcs(&self) -> usize {
        self.out.iter().map(SubsetMask::len).sum()
    }

    /// `N⁺(X)`: out-neighbours of `X` outside `X`.
    pub fn out_boundary(&self, x: &SubsetMask) -> SubsetMask {
        let mut acc = self.empty_set();
        for v in x.iter() {
            acc = acc.union(&self.out[v]);
        }
        acc.difference(x)
    }

    /// `N⁻(X)`: in-neighbours of `X` outside `X`.
    pub fn in_boundary(&self, x: &SubsetMask) -> SubsetMask {
        let mut acc = self.empty_set();
        for v in x.iter() {
            acc = acc.union(&self.inc[v]);
        }
        acc.difference(x)
    }

    /// `D[X]` relabelled onto `0..|X|`, with the map back to original indices.
    pub fn induced(&self, x: &SubsetMask) -> (Digraph, Vec<usize>) {
        let vertices = x.to_vec();
        let mut position = vec![usize::MAX; self.num_vertices()];
        for (i, &v) in vertices.iter().enumerate() {
            position[v] = i;
        }
        let mut d = Digraph::new(vertices.len());
        for (i, &v) in vertices.iter().enumerate() {
            for w in self.out[v].intersection(x).iter() {
                d.add_arc(i, position[w]);
            }
        }
        (d, vertices)
    }

    /// True if no arc joins two vertices of `x`.
    pub fn is_independent(&self, x: &SubsetMask) -> bool {
        x.iter().all(|v| self.out[v].is_disjoint(x))
    }
}

/// Reachability closure of `x` (including `x` itself) along or against arcs.
pub fn reach(d: &Digraph, x: &SubsetMask, direction: Direction) -> SubsetMask {
    let adj = match direction {
        Direction::Out => &d.out,
        Direction::In => &d.inc,
    };
    let mut seen = x.clone();
    let mut stack: Vec<usize> = x.to_vec();
    while let Some(v) = stack.pop() {
        for w in adj[v].iter() {
            if !seen.contains(w) {
                seen.insert(w);
                stack.push(w);
            }
        }
    }
    seen
}

/// True iff no arc leaves `x`.
pub fn is_closed(d: &Digraph, x: &SubsetMask) -> bool {
    x.iter().all(|v| d.out[v].is_subset(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reach_examples() {
        let d = Digraph::new(1);
        assert_eq!(reach(&d, &SubsetMask::singleton(1, 0), Direction::Out).to_vec(), vec![0]);
        let chain = Digraph::from_arcs(3, &[(0, 1), (1, 2)]);
        assert_eq!(reach(&chain, &SubsetMask::singleton(3, 0), Direction::Out).to_vec(), vec![0, 1, 2]);
        assert_eq!(reach(&chain, &SubsetMask::singleton(3, 1), Direction::In).to_vec(), vec![0, 1]);
    }

    #[test]
    fn closed_examples() {
        let d = Digraph::from_arcs(2, &[(0, 1)]);
        assert!(is_closed(&d, &d.all_vertices()));
        assert!(!is_closed(&d, &SubsetMask::singleton(2, 0)));
        assert!(is_closed(&d, &SubsetMask::singleton(2, 1)));
    }

    #[test]
    fn boundaries_and_induced() {
        let d = Digraph::from_arcs(4, &[(0, 1), (1, 2), (3, 1), (2, 0)]);
        let x = SubsetMask::from_indices(4, [0, 1]);
        assert_eq!(d.out_boundary(&x).to_vec(), vec![2]);
        assert_eq!(d.in_boundary(&x).to_vec(), vec![2, 3]);
        let (sub, map) = d.induced(&SubsetMask::from_indices(4, [1, 2, 3]));
        assert_eq!(map, vec![1, 2, 3]);
        assert_eq!(sub.arcs().collect::<Vec<_>>(), vec![(0, 1), (2, 0)]);
        assert!(d.is_independent(&SubsetMask::from_indices(4, [0, 3])));
        assert!(!d.is_independent(&x));
    }
}
