//! Dense bit-packed linear algebra over F₂.
//!
//! Rows are stored in 64-bit limbs. Rank and kernel use Gauss–Jordan with
//! lowest-index pivoting so that bases are reproducible across runs.

use crate::{Error, Result};

/// Fixed-length bit vector over F₂.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct F2Vector {
    len: usize,
    limbs: Vec<u64>,
}

impl F2Vector {
    pub fn zeros(len: usize) -> F2Vector {
        F2Vector {
            len,
            limbs: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_bits(bits: &[u8]) -> F2Vector {
        let mut v = F2Vector::zeros(bits.len());
        for (i, b) in bits.iter().enumerate() {
            if *b != 0 {
                v.set(i, true);
            }
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len);
        (self.limbs[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, b: bool) {
        assert!(i < self.len);
        if b {
            self.limbs[i / 64] |= 1u64 << (i % 64);
        } else {
            self.limbs[i / 64] &= !(1u64 << (i % 64));
        }
    }

    pub fn xor_assign(&mut self, other: &F2Vector) {
        assert_eq!(self.len, other.len);
        for (a, b) in self.limbs.iter_mut().zip(&other.limbs) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.iter().all(|&l| l == 0)
    }

    pub fn weight(&self) -> usize {
        self.limbs.iter().map(|l| l.count_ones() as usize).sum()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    /// Concatenation (self followed by other).
    pub fn concat(&self, other: &F2Vector) -> F2Vector {
        let mut v = F2Vector::zeros(self.len + other.len);
        for i in self.iter_ones() {
            v.set(i, true);
        }
        for i in other.iter_ones() {
            v.set(self.len + i, true);
        }
        v
    }

    /// The sub-vector [lo, hi).
    pub fn slice(&self, lo: usize, hi: usize) -> F2Vector {
        assert!(lo <= hi && hi <= self.len);
        let mut v = F2Vector::zeros(hi - lo);
        for i in lo..hi {
            if self.get(i) {
                v.set(i - lo, true);
            }
        }
        v
    }

    pub fn bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i) as u8).collect()
    }
}

impl std::fmt::Debug for F2Vector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", self.get(i) as u8)?;
        }
        Ok(())
    }
}

/// Dense F₂ matrix, rows bit-packed.
#[derive(Clone, PartialEq, Eq)]
pub struct F2Matrix {
    rows: usize,
    cols: usize,
    data: Vec<F2Vector>,
}

impl F2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> F2Matrix {
        F2Matrix {
            rows,
            cols,
            data: vec![F2Vector::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> F2Matrix {
        let mut m = F2Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> F2Matrix {
        let cols = rows.first().map(|r| r.len()).unwrap_or(0);
        assert!(rows.iter().all(|r| r.len() == cols));
        F2Matrix {
            rows: rows.len(),
            cols,
            data: rows.iter().map(|r| F2Vector::from_bits(r)).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, b: bool) {
        self.data[r].set(c, b);
    }

    pub fn row(&self, r: usize) -> &F2Vector {
        &self.data[r]
    }

    pub fn transpose(&self) -> F2Matrix {
        let mut t = F2Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in self.data[r].iter_ones() {
                t.set(c, r, true);
            }
        }
        t
    }

    pub fn add(&self, other: &F2Matrix) -> Result<F2Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "{}x{} + {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut m = self.clone();
        for r in 0..self.rows {
            m.data[r].xor_assign(&other.data[r]);
        }
        Ok(m)
    }

    pub fn mul_vec(&self, v: &F2Vector) -> Result<F2Vector> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "matrix cols {} vs vector len {}",
                self.cols,
                v.len()
            )));
        }
        let mut out = F2Vector::zeros(self.rows);
        for r in 0..self.rows {
            let mut parity = 0u64;
            for (a, b) in self.data[r].limbs.iter().zip(&v.limbs) {
                parity ^= a & b;
            }
            out.set(r, parity.count_ones() % 2 == 1);
        }
        Ok(out)
    }

    /// Side-by-side concatenation.
    pub fn hstack(&self, other: &F2Matrix) -> Result<F2Matrix> {
        if self.rows != other.rows {
            return Err(Error::Dimension("hstack row mismatch".into()));
        }
        let mut m = F2Matrix::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            m.data[r] = self.data[r].concat(&other.data[r]);
        }
        Ok(m)
    }

    /// Stacked concatenation.
    pub fn vstack(&self, other: &F2Matrix) -> Result<F2Matrix> {
        if self.cols != other.cols {
            return Err(Error::Dimension("vstack col mismatch".into()));
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(F2Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    /// Assembles a 2×2 block grid [[tl, tr], [bl, br]].
    pub fn concat_blocks(
        tl: &F2Matrix,
        tr: &F2Matrix,
        bl: &F2Matrix,
        br: &F2Matrix,
    ) -> Result<F2Matrix> {
        let top = tl.hstack(tr)?;
        let bottom = bl.hstack(br)?;
        top.vstack(&bottom)
    }

    /// Row-echelon rank.
    pub fn rank(&self) -> usize {
        let mut rows = self.data.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            let mut pivot = None;
            for (i, row) in rows.iter().enumerate().skip(rank) {
                if row.get(col) {
                    pivot = Some(i);
                    break;
                }
            }
            let Some(p) = pivot else { continue };
            rows.swap(rank, p);
            let pivot_row = rows[rank].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != rank && row.get(col) {
                    row.xor_assign(&pivot_row);
                }
            }
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        rank
    }

    /// Deterministic basis of the right kernel {v : Mv = 0}.
    pub fn kernel_basis(&self) -> Vec<F2Vector> {
        let mut rows = self.data.clone();
        let mut pivot_cols = Vec::new();
        let mut rank = 0;
        for col in 0..self.cols {
            let mut pivot = None;
            for (i, row) in rows.iter().enumerate().skip(rank) {
                if row.get(col) {
                    pivot = Some(i);
                    break;
                }
            }
            let Some(p) = pivot else { continue };
            rows.swap(rank, p);
            let pivot_row = rows[rank].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != rank && row.get(col) {
                    row.xor_assign(&pivot_row);
                }
            }
            pivot_cols.push(col);
            rank += 1;
        }
        let pivot_set: std::collections::HashSet<usize> = pivot_cols.iter().copied().collect();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = F2Vector::zeros(self.cols);
            v.set(free, true);
            for (r, &pc) in pivot_cols.iter().enumerate() {
                if rows[r].get(free) {
                    v.set(pc, true);
                }
            }
            basis.push(v);
        }
        basis
    }
}

impl std::fmt::Debug for F2Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for r in 0..self.rows {
            writeln!(f, "{:?}", self.data[r])?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Naive reference implementation on Vec<Vec<bool>>.
    fn naive_rank(m: &[Vec<u8>]) -> usize {
        let mut m: Vec<Vec<u8>> = m.to_vec();
        let rows = m.len();
        let cols = if rows == 0 { 0 } else { m[0].len() };
        let mut rank = 0;
        for c in 0..cols {
            if let Some(p) = (rank..rows).find(|&r| m[r][c] == 1) {
                m.swap(rank, p);
                for r in 0..rows {
                    if r != rank && m[r][c] == 1 {
                        for k in 0..cols {
                            m[r][k] ^= m[rank][k];
                        }
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    #[test]
    fn rank_examples() {
        assert_eq!(F2Matrix::zeros(3, 3).rank(), 0);
        assert_eq!(F2Matrix::identity(4).rank(), 4);
        assert_eq!(F2Matrix::from_rows(&[vec![1, 1], vec![1, 1]]).rank(), 1);
    }

    #[test]
    fn kernel_examples() {
        assert!(F2Matrix::identity(2).kernel_basis().is_empty());
        assert_eq!(F2Matrix::zeros(1, 2).kernel_basis().len(), 2);
        let k = F2Matrix::from_rows(&[vec![1, 1], vec![0, 0]]).kernel_basis();
        assert_eq!(k.len(), 1);
        assert_eq!(k[0].bits(), vec![1, 1]);
    }

    #[test]
    fn block_assembly() {
        let a = F2Matrix::from_rows(&[vec![1]]);
        let b = F2Matrix::from_rows(&[vec![0]]);
        let m = F2Matrix::concat_blocks(&a, &b, &b, &a).unwrap();
        assert_eq!(m.rows(), 2);
        assert_eq!(m.cols(), 2);
        assert_eq!(m, F2Matrix::identity(2));

        let i = F2Matrix::identity(2);
        let z = F2Matrix::zeros(2, 2);
        let d = F2Matrix::concat_blocks(&i, &z, &z, &i).unwrap();
        assert_eq!(d, F2Matrix::identity(4));

        let a = F2Matrix::from_rows(&[vec![1, 0], vec![1, 1]]);
        let d = F2Matrix::concat_blocks(&a, &z, &z, &a).unwrap();
        assert_eq!(d.rows(), 4);
        assert_eq!(d.rank(), 4);

        assert!(F2Matrix::concat_blocks(&a, &F2Matrix::zeros(1, 1), &z, &a).is_err());
    }

    proptest! {
        #[test]
        fn rank_nullity_and_kernel(rows in 0usize..8, cols in 0usize..8, seed in any::<u64>()) {
            let mut s = seed;
            let mut next = || { s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407); (s >> 33) & 1 };
            let grid: Vec<Vec<u8>> = (0..rows).map(|_| (0..cols).map(|_| next() as u8).collect()).collect();
            let m = F2Matrix::from_rows(&grid);
            let rank = m.rank();
            prop_assert_eq!(rank, naive_rank(&grid));
            let kernel = m.kernel_basis();
            prop_assert_eq!(rank + kernel.len(), m.cols());
            for v in &kernel {
                prop_assert!(m.mul_vec(v).unwrap().is_zero());
            }
            prop_assert_eq!(m.transpose().rank(), rank);
        }
    }
}
