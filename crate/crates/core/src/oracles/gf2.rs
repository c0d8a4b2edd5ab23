//! Dense bit matrices over GF(2).

use crate::error::{Error, Result};
use crate::ground::SubsetMask;

/// An `r x c` matrix over GF(2), one bit vector per row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gf2Matrix {
    cols: usize,
    rows: Vec<SubsetMask>,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Gf2Matrix { cols, rows: vec![SubsetMask::empty(cols); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(cols: usize, rows: Vec<SubsetMask>) -> Result<Self> {
        if let Some(r) = rows.iter().position(|r| r.width() != cols) {
            return Err(Error::input(format!("row {r} has width {} but the matrix has {cols} columns", rows[r].width())));
        }
        Ok(Gf2Matrix { cols, rows })
    }

    /// Builds a matrix from rows of `0`/`1` values.
    pub fn from_bits(rows: &[&[u8]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged matrix");
            for (j, &b) in row.iter().enumerate() {
                m.set(i, j, b != 0);
            }
        }
        m
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].contains(j)
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        if value {
            self.rows[i].insert(j);
        } else {
            self.rows[i].remove(j);
        }
    }

    pub fn rows(&self) -> &[SubsetMask] {
        &self.rows
    }

    /// Column `j` as a bit vector of width `num_rows`.
    pub fn column(&self, j: usize) -> SubsetMask {
        SubsetMask::from_indices(self.rows.len(), (0..self.rows.len()).filter(|&i| self.get(i, j)))
    }

    pub fn rank(&self) -> usize {
        rank_of_vectors(self.rows.iter().cloned())
    }
}

/// GF(2) rank of a matrix; zero for empty matrices.
pub fn rank_gf2(m: &Gf2Matrix) -> usize {
    m.rank()
}

/// Rank of the span of a family of equal-width bit vectors.
///
/// Keeps a reduced basis keyed by lowest set bit; each basis vector is free of
/// the pivots of all vectors inserted before it.
pub fn rank_of_vectors(vectors: impl IntoIterator<Item = SubsetMask>) -> usize {
    let mut basis: Vec<(usize, SubsetMask)> = Vec::new();
    for mut v in vectors {
        for (pivot, b) in &basis {
            if v.contains(*pivot) {
                v = v.symmetric_difference(b);
            }
        }
        if let Some(p) = v.first() {
            basis.push((p, v));
        }
    }
    basis.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Textbook elimination on a `Vec<Vec<bool>>`, used as an independent check.
    fn naive_rank(rows: &[Vec<bool>]) -> usize {
        let mut m = rows.to_vec();
        let cols = m.first().map_or(0, Vec::len);
        let mut rank = 0;
        for c in 0..cols {
            let Some(p) = (rank..m.len()).find(|&r| m[r][c]) else { continue };
            m.swap(rank, p);
            for r in 0..m.len() {
                if r != rank && m[r][c] {
                    for cc in 0..cols {
                        m[r][cc] ^= m[rank][cc];
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank_gf2(&Gf2Matrix::identity(3)), 3);
        let ones: Vec<&[u8]> = vec![&[1, 1, 1, 1, 1]; 4];
        assert_eq!(rank_gf2(&Gf2Matrix::from_bits(&ones)), 1);
        let m = Gf2Matrix::from_bits(&[&[1, 0, 1], &[0, 1, 1], &[1, 1, 0]]);
        assert_eq!(rank_gf2(&m), 2);
        assert_eq!(rank_gf2(&Gf2Matrix::zeros(0, 0)), 0);
        assert_eq!(rank_gf2(&Gf2Matrix::zeros(3, 0)), 0);
    }

    #[test]
    fn agrees_with_naive_elimination() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let r = rng.gen_range(0..7);
            let c = rng.gen_range(0..9);
            let rows: Vec<Vec<bool>> = (0..r).map(|_| (0..c).map(|_| rng.gen_bool(0.5)).collect()).collect();
            let mut m = Gf2Matrix::zeros(r, c);
            for (i, row) in rows.iter().enumerate() {
                for (j, &b) in row.iter().enumerate() {
                    m.set(i, j, b);
                }
            }
            assert_eq!(m.rank(), naive_rank(&rows));
            // Row rank equals column rank.
            assert_eq!(rank_of_vectors((0..c).map(|j| m.column(j))), m.rank());
        }
    }
}
