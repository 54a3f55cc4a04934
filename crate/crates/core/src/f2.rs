//! Bit-packed linear algebra over the two-element field.
//!
//! Every dimension computation in the crate (Selmer ranks, unit subgroups,
//! kernel containments) reduces to rank/kernel/solve on matrices whose
//! dimensions never exceed a few dozen, so one u64 word per row block is
//! plenty.

/// A dense matrix over GF(2). Rows are bit-packed into u64 words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<u64>>,
}

fn words(cols: usize) -> usize {
    cols.div_ceil(64)
}

impl BitMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        BitMatrix {
            rows,
            cols,
            data: vec![vec![0; words(cols)]; rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Build from explicit row slices of booleans.
    pub fn from_rows(rows: &[Vec<bool>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        let mut m = BitMatrix::zero(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &b) in row.iter().enumerate() {
                m.set(i, j, b);
            }
        }
        m
    }

    /// Build from column vectors of the given height. Unlike `from_rows`,
    /// this keeps the column count right even when the height is zero.
    pub fn from_columns(cols: &[Vec<bool>], rows: usize) -> Self {
        let mut m = BitMatrix::zero(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows, "ragged columns");
            for (i, &b) in col.iter().enumerate() {
                m.set(i, j, b);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        (self.data[i][j / 64] >> (j % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        if v {
            self.data[i][j / 64] |= 1 << (j % 64);
        } else {
            self.data[i][j / 64] &= !(1 << (j % 64));
        }
    }

    pub fn row(&self, i: usize) -> Vec<bool> {
        (0..self.cols).map(|j| self.get(i, j)).collect()
    }

    /// Append a row given as booleans.
    pub fn push_row(&mut self, row: &[bool]) {
        assert_eq!(row.len(), self.cols);
        let mut w = vec![0u64; words(self.cols)];
        for (j, &b) in row.iter().enumerate() {
            if b {
                w[j / 64] |= 1 << (j % 64);
            }
        }
        self.data.push(w);
        self.rows += 1;
    }

    /// Stack `self` on top of `other` (same column count).
    pub fn stack(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.cols);
        let mut m = self.clone();
        for i in 0..other.rows {
            m.data.push(other.data[i].clone());
        }
        m.rows += other.rows;
        m
    }

    fn xor_rows(&mut self, dst: usize, src: usize) {
        let (a, b) = if dst < src {
            let (lo, hi) = self.data.split_at_mut(src);
            (&mut lo[dst], &hi[0])
        } else {
            let (lo, hi) = self.data.split_at_mut(dst);
            (&mut hi[0], &lo[src])
        };
        for (x, y) in a.iter_mut().zip(b.iter()) {
            *x ^= *y;
        }
    }

    /// Row echelon form in place; returns the pivot columns in order.
    fn echelonize(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let mut pivot = None;
            for i in r..self.rows {
                if self.get(i, c) {
                    pivot = Some(i);
                    break;
                }
            }
            let Some(p) = pivot else { continue };
            self.data.swap(r, p);
            for i in 0..self.rows {
                if i != r && self.get(i, c) {
                    self.xor_rows(i, r);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// Rank over GF(2).
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.echelonize().len()
    }

    /// Basis of the right null space {v : M v = 0}, one vector per free
    /// column, in increasing free-column order.
    pub fn kernel_basis(&self) -> Vec<Vec<bool>> {
        let mut m = self.clone();
        let pivots = m.echelonize();
        let pivot_of_col: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = Some(r);
            }
            v
        };
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_of_col[free].is_some() {
                continue;
            }
            let mut v = vec![false; self.cols];
            v[free] = true;
            for (r, &pc) in pivots.iter().enumerate() {
                if m.get(r, free) {
                    v[pc] = true;
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Some solution x of M x = v, or None if the system is inconsistent.
    /// The solution is the one with zeros in all free columns.
    pub fn solve(&self, v: &[bool]) -> Option<Vec<bool>> {
        assert_eq!(v.len(), self.rows, "rhs length must equal row count");
        let mut aug = BitMatrix::zero(self.rows, self.cols + 1);
        for (i, &rhs) in v.iter().enumerate() {
            for j in 0..self.cols {
                if self.get(i, j) {
                    aug.set(i, j, true);
                }
            }
            aug.set(i, self.cols, rhs);
        }
        let pivots = aug.echelonize();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![false; self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug.get(r, self.cols);
        }
        Some(x)
    }

    /// M v over GF(2).
    pub fn apply(&self, v: &[bool]) -> Vec<bool> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = false;
                for (j, &b) in v.iter().enumerate() {
                    acc ^= b && self.get(i, j);
                }
                acc
            })
            .collect()
    }

    /// True iff ker(self) is contained in ker(other), both matrices having
    /// the same column count.
    pub fn kernel_contained_in(&self, other: &BitMatrix) -> bool {
        self.kernel_basis()
            .iter()
            .all(|v| other.apply(v).iter().all(|&b| !b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rank_basics() {
        assert_eq!(BitMatrix::identity(2).rank(), 2);
        assert_eq!(BitMatrix::zero(3, 3).rank(), 0);
        let m = BitMatrix::from_rows(&[vec![true, true], vec![true, true]]);
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn kernel_basics() {
        let m = BitMatrix::from_rows(&[vec![true, true]]);
        assert_eq!(m.kernel_basis(), vec![vec![true, true]]);

        assert!(BitMatrix::identity(2).kernel_basis().is_empty());

        let m = BitMatrix::from_rows(&[vec![true, true, false], vec![false, true, true]]);
        assert_eq!(m.kernel_basis(), vec![vec![true, true, true]]);
    }

    #[test]
    fn solve_basics() {
        let id = BitMatrix::identity(2);
        assert_eq!(id.solve(&[true, false]), Some(vec![true, false]));

        // any valid solution of x1 + x2 = 1 is acceptable
        let m = BitMatrix::from_rows(&[vec![true, true]]);
        let x = m.solve(&[true]).unwrap();
        assert_eq!(m.apply(&x), vec![true]);

        let m = BitMatrix::from_rows(&[vec![false, false]]);
        assert_eq!(m.solve(&[true]), None);
    }

    #[test]
    fn kernel_vectors_annihilate() {
        let m = BitMatrix::from_rows(&[
            vec![true, false, true, true],
            vec![false, true, true, false],
            vec![true, true, false, true],
        ]);
        for v in m.kernel_basis() {
            assert!(m.apply(&v).iter().all(|&b| !b));
        }
    }

    proptest! {
        #[test]
        fn rank_plus_nullity_is_cols(bits in proptest::collection::vec(any::<bool>(), 1..=72), cols in 1usize..=8) {
            let rows = bits.len() / cols;
            prop_assume!(rows > 0);
            let rowvecs: Vec<Vec<bool>> = (0..rows).map(|i| bits[i*cols..(i+1)*cols].to_vec()).collect();
            let m = BitMatrix::from_rows(&rowvecs);
            prop_assert_eq!(m.rank() + m.kernel_basis().len(), cols);
        }

        #[test]
        fn solve_is_consistent_with_apply(bits in proptest::collection::vec(any::<bool>(), 36), x in proptest::collection::vec(any::<bool>(), 6)) {
            let rowvecs: Vec<Vec<bool>> = (0..6).map(|i| bits[i*6..(i+1)*6].to_vec()).collect();
            let m = BitMatrix::from_rows(&rowvecs);
            let v = m.apply(&x);
            let sol = m.solve(&v).expect("constructed system must be solvable");
            prop_assert_eq!(m.apply(&sol), v);
        }
    }
}
