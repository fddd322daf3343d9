//! Dense matrices over GF(2).
//!
//! Vectors are row vectors and a label map acts as `x = u F`. Entry `(r, c)`
//! is stored in bit `c % 64` of word `c / 64` of row `r`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "BitMatrix needs at least one row and column");
        let words = cols.div_ceil(64);
        Self { rows, cols, words, data: vec![0; rows * words] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from rows of 0/1 values.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map(|row| row.as_ref().len()).unwrap_or(0);
        if r == 0 || c == 0 {
            return Err(Error::Dimension("empty matrix".into()));
        }
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != c {
                return Err(Error::Dimension(format!("row {i} has {} entries, expected {c}", row.len())));
            }
            for (j, &b) in row.iter().enumerate() {
                match b {
                    0 => {}
                    1 => m.set(i, j, true),
                    _ => return Err(Error::Parse(format!("entry ({i},{j}) is {b}, not a bit"))),
                }
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        (self.data[r * self.words + c / 64] >> (c % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let w = &mut self.data[r * self.words + c / 64];
        if v {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.words..(r + 1) * self.words]
    }

    fn xor_row_into(&mut self, src: usize, dst: usize) {
        for w in 0..self.words {
            let v = self.data[src * self.words + w];
            self.data[dst * self.words + w] ^= v;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for w in 0..self.words {
                self.data.swap(a * self.words + w, b * self.words + w);
            }
        }
    }

    /// Row `r` as a vector of bits.
    pub fn row(&self, r: usize) -> Vec<u8> {
        (0..self.cols).map(|c| self.get(r, c) as u8).collect()
    }

    /// Row `r` packed into a `u64` with column `c` at bit `c`; needs `cols <= 64`.
    pub fn row_mask(&self, r: usize) -> u64 {
        assert!(self.cols <= 64, "row_mask needs at most 64 columns");
        self.data[r * self.words]
    }

    pub fn row_weight(&self, r: usize) -> usize {
        self.row_words(r).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    t.set(c, r, true);
                }
            }
        }
        t
    }

    /// Matrix product over GF(2).
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!("{}x{} times {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                if self.get(r, k) {
                    for w in 0..out.words {
                        out.data[r * out.words + w] ^= other.data[k * other.words + w];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Row-vector product `x = u M`, i.e. `x_j = XOR_i u_i M[i][j]`.
    pub fn mul_vec(&self, u: &[u8]) -> Result<Vec<u8>> {
        if u.len() != self.rows {
            return Err(Error::Dimension(format!("vector of length {} against {} rows", u.len(), self.rows)));
        }
        let mut acc = vec![0u64; self.words];
        for (i, &bit) in u.iter().enumerate() {
            if bit & 1 == 1 {
                for (a, w) in acc.iter_mut().zip(self.row_words(i)) {
                    *a ^= w;
                }
            }
        }
        Ok((0..self.cols).map(|c| ((acc[c / 64] >> (c % 64)) & 1) as u8).collect())
    }

    /// Packed variant of [`mul_vec`](Self::mul_vec): bit `i` of `u` is `u_i`,
    /// bit `j` of the result is `x_j`. Needs `rows, cols <= 64`.
    pub fn mul_mask(&self, mut u: u64) -> u64 {
        assert!(self.rows <= 64 && self.cols <= 64);
        let mut acc = 0;
        while u != 0 {
            let i = u.trailing_zeros() as usize;
            acc ^= self.data[i * self.words];
            u &= u - 1;
        }
        acc
    }

    /// Kronecker product; row index of the result is `r1 * other.rows + r2`,
    /// so the left factor is the most significant digit.
    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for r1 in 0..self.rows {
            for c1 in 0..self.cols {
                if !self.get(r1, c1) {
                    continue;
                }
                for r2 in 0..other.rows {
                    for c2 in 0..other.cols {
                        if other.get(r2, c2) {
                            out.set(r1 * other.rows + r2, c1 * other.cols + c2, true);
                        }
                    }
                }
            }
        }
        out
    }

    /// `A^{(x)k}`, the k-fold Kronecker power.
    pub fn kron_power(&self, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Range("Kronecker power needs k >= 1".into()));
        }
        if !self.is_square() {
            return Err(Error::Dimension("Kronecker power of a non-square matrix".into()));
        }
        let mut out = self.clone();
        for _ in 1..k {
            out = out.kron(self);
        }
        Ok(out)
    }

    /// Reduces a copy to row echelon form and returns it with the pivot columns.
    fn echelon(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| m.get(i, c)) else { continue };
            m.swap_rows(r, p);
            for i in 0..m.rows {
                if i != r && m.get(i, c) {
                    m.xor_row_into(r, i);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.echelon().1.len()
    }

    /// Gauss–Jordan inverse over GF(2); pivots are chosen as the first
    /// nonzero entry at or below the diagonal.
    pub fn invert(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension(format!("cannot invert a {}x{} matrix", self.rows, self.cols)));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| a.get(i, c)) else {
                return Err(Error::Singular { rank: self.rank(), n });
            };
            a.swap_rows(c, p);
            inv.swap_rows(c, p);
            for i in 0..n {
                if i != c && a.get(i, c) {
                    a.xor_row_into(c, i);
                    inv.xor_row_into(c, i);
                }
            }
        }
        Ok(inv)
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// The `n x n` label map `[[I_{n-k}, 0], [P, I_k]]` for a systematic
    /// generator `[P I_k]`, where `P` is `k x (n-k)`.
    pub fn from_generator(p: &Self) -> Self {
        let k = p.rows;
        let m = p.cols;
        let n = k + m;
        let mut f = Self::identity(n);
        for r in 0..k {
            for c in 0..m {
                if p.get(r, c) {
                    f.set(m + r, c, true);
                }
            }
        }
        f
    }

    /// The first `n - k` columns of `F`; for a map built by
    /// [`from_generator`](Self::from_generator) this is the transposed
    /// parity-check matrix `H^T` of the code.
    pub fn parity_columns(&self, k: usize) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension("parity columns need a square map".into()));
        }
        let n = self.rows;
        if k == 0 || k >= n {
            return Err(Error::Range(format!("k = {k} outside 1..{n}")));
        }
        let m = n - k;
        let mut h = Self::zeros(n, m);
        for r in 0..n {
            for c in 0..m {
                if self.get(r, c) {
                    h.set(r, c, true);
                }
            }
        }
        Ok(h)
    }

    /// A basis (as rows) of `{w : M w^T = 0}`. Returns `None` when the kernel
    /// is trivial, since a matrix cannot have zero rows.
    pub fn row_space_dual(&self) -> Option<Self> {
        let (ech, pivots) = self.echelon();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        if free.is_empty() {
            return None;
        }
        let mut basis = Self::zeros(free.len(), self.cols);
        for (b, &f) in free.iter().enumerate() {
            basis.set(b, f, true);
            for (r, &p) in pivots.iter().enumerate() {
                if ech.get(r, f) {
                    basis.set(b, p, true);
                }
            }
        }
        Some(basis)
    }

    /// Submatrix of the given rows, in order.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Dimension("no rows selected".into()));
        }
        let mut out = Self::zeros(rows.len(), self.cols);
        for (i, &r) in rows.iter().enumerate() {
            if r >= self.rows {
                return Err(Error::Range(format!("row {r} of {}", self.rows)));
            }
            out.data[i * self.words..(i + 1) * self.words].copy_from_slice(self.row_words(r));
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            for c in 0..self.cols {
                f.write_str(if self.get(r, c) { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Parses the generator text format: a header line `k n-k` followed by `k`
/// lines of `n-k` characters `0`/`1`. Whitespace inside rows is ignored.
impl FromStr for BitMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty generator file".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad header token {t:?}"))))
            .collect::<Result<_>>()?;
        let [k, m] = dims[..] else {
            return Err(Error::Parse(format!("header must be \"k n-k\", got {header:?}")));
        };
        if k == 0 || m == 0 {
            return Err(Error::Parse("generator dimensions must be positive".into()));
        }
        let mut rows = Vec::with_capacity(k);
        for (i, line) in lines.enumerate() {
            let row: Vec<u8> = line
                .chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| match c {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    _ => Err(Error::Parse(format!("line {}: unexpected character {c:?}", i + 2))),
                })
                .collect::<Result<_>>()?;
            if row.len() != m {
                return Err(Error::Parse(format!("line {}: {} columns, expected {m}", i + 2, row.len())));
            }
            rows.push(row);
        }
        if rows.len() != k {
            return Err(Error::Parse(format!("{} rows, expected {k}", rows.len())));
        }
        Self::from_rows(&rows)
    }
}

/// The 11 x 12 parity part of the systematic generator of the dual Golay code.
pub const GOLAY_DUAL_P: &str = include_str!("../data/golay_dual_p.txt");

/// The 2 x 2 kernel `[[1, 0], [1, 1]]`, i.e. `(u1, u2) -> (u1 ^ u2, u2)`.
pub fn basic_kernel() -> BitMatrix {
    BitMatrix::from_rows(&[[1, 0], [1, 1]]).expect("static kernel")
}
