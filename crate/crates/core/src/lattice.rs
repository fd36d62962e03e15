//! Integer matrices, Smith normal form and linear systems over ℤ and ℤ/2.
//!
//! [`solve_integer_system`] first eliminates with unit pivots on the sparse
//! matrix (row operations only, so the solution set is unchanged), then hands
//! the residual block to a dense Smith normal form. Every returned solution is
//! checked against `Ax = b` before it leaves this module.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Row-major sparse integer matrix; each row is sorted by column and holds no zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseIntMatrix {
    nrows: usize,
    ncols: usize,
    rows: Vec<Vec<(usize, i64)>>,
}

impl SparseIntMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SparseIntMatrix { nrows, ncols, rows: vec![Vec::new(); nrows] }
    }

    /// Duplicate positions are summed; zero sums are dropped.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, i64)>,
    ) -> Self {
        let mut rows: Vec<Vec<(usize, i64)>> = vec![Vec::new(); nrows];
        for (r, c, v) in triplets {
            assert!(r < nrows && c < ncols, "triplet ({r}, {c}) outside {nrows}x{ncols}");
            rows[r].push((c, v));
        }
        for row in &mut rows {
            row.sort_unstable_by_key(|e| e.0);
            let mut merged: Vec<(usize, i64)> = Vec::with_capacity(row.len());
            for &(c, v) in row.iter() {
                match merged.last_mut() {
                    Some(last) if last.0 == c => last.1 += v,
                    _ => merged.push((c, v)),
                }
            }
            merged.retain(|e| e.1 != 0);
            *row = merged;
        }
        SparseIntMatrix { nrows, ncols, rows }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, r: usize) -> &[(usize, i64)] {
        &self.rows[r]
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.rows[r]
            .binary_search_by_key(&c, |e| e.0)
            .map(|i| self.rows[r][i].1)
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(Vec::is_empty)
    }

    pub fn transpose(&self) -> SparseIntMatrix {
        SparseIntMatrix::from_triplets(
            self.ncols,
            self.nrows,
            self.rows
                .iter()
                .enumerate()
                .flat_map(|(r, row)| row.iter().map(move |&(c, v)| (c, r, v))),
        )
    }

    pub fn matmul(&self, other: &SparseIntMatrix) -> SparseIntMatrix {
        assert_eq!(self.ncols, other.nrows, "inner dimensions differ");
        let mut triplets = Vec::new();
        for (r, row) in self.rows.iter().enumerate() {
            for &(k, a) in row {
                for &(c, b) in &other.rows[k] {
                    triplets.push((r, c, a * b));
                }
            }
        }
        SparseIntMatrix::from_triplets(self.nrows, other.ncols, triplets)
    }

    pub fn mul_vec(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(x.len(), self.ncols);
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(c, v)| &x[c] * v).sum())
            .collect()
    }

    pub fn mul_vec_i64(&self, x: &[i64]) -> Vec<i64> {
        assert_eq!(x.len(), self.ncols);
        self.rows.iter().map(|row| row.iter().map(|&(c, v)| x[c] * v).sum()).collect()
    }

    pub fn to_dense(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.nrows, self.ncols);
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                m.data[r][c] = BigInt::from(v);
            }
        }
        m
    }

    /// Debug dump, one `row col value` line per nonzero entry.
    pub fn to_coo_text(&self) -> String {
        let mut s = String::new();
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                let _ = writeln!(s, "{r} {c} {v}");
            }
        }
        s
    }
}

/// Dense matrix of arbitrary-precision integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<Vec<BigInt>>,
}

impl IntMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        IntMatrix { nrows, ncols, data: vec![vec![BigInt::zero(); ncols]; nrows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i][i] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self> {
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::dims("ragged matrix rows"));
        }
        Ok(IntMatrix {
            nrows: rows.len(),
            ncols,
            data: rows.into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect(),
        })
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r][c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.data[r][c] = v;
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.ncols, other.nrows, "inner dimensions differ");
        let mut out = IntMatrix::zeros(self.nrows, other.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = &self.data[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.ncols {
                    let b = &other.data[k][j];
                    if !b.is_zero() {
                        out.data[i][j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(x.len(), self.ncols);
        self.data.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.nrows, self.ncols, "determinant of a non-square matrix");
        let n = self.nrows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.data.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                    a[i][j] = v;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        self.data.swap(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for row in &mut self.data {
            row.swap(i, j);
        }
    }

    /// `row_i -= q * row_k`
    fn row_submul(&mut self, i: usize, k: usize, q: &BigInt) {
        let (src, dst) = if i < k {
            let (a, b) = self.data.split_at_mut(k);
            (&b[0], &mut a[i])
        } else {
            let (a, b) = self.data.split_at_mut(i);
            (&a[k], &mut b[0])
        };
        for (d, s) in dst.iter_mut().zip(src) {
            if !s.is_zero() {
                *d -= q * s;
            }
        }
    }

    /// `col_j -= q * col_k`
    fn col_submul(&mut self, j: usize, k: usize, q: &BigInt) {
        for row in &mut self.data {
            if !row[k].is_zero() {
                let t = q * &row[k];
                row[j] -= t;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for v in &mut self.data[i] {
            *v = -&*v;
        }
    }
}

/// `U · A · V = S` with `U`, `V` unimodular and `S` diagonal with
/// `d1 | d2 | …`, all `>= 0`, nonzero entries first.
#[derive(Clone, Debug)]
pub struct SnfDecomposition {
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub s: IntMatrix,
}

impl SnfDecomposition {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.nrows.min(self.s.ncols)).map(|i| self.s.data[i][i].clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().take_while(|d| !d.is_zero()).count()
    }
}

/// Quotient rounded to nearest, so the remainder satisfies `|r| <= |p| / 2`.
fn round_div(a: &BigInt, p: &BigInt) -> BigInt {
    let (q, r) = a.div_mod_floor(p);
    if (&r + &r).abs() > p.abs() {
        if p.is_positive() { q + 1 } else { q - 1 }
    } else {
        q
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> SnfDecomposition {
    let (m, n) = (a.nrows, a.ncols);
    let mut s = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);
    for t in 0..m.min(n) {
        // smallest nonzero entry of the trailing block becomes the pivot
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                let x = &s.data[i][j];
                if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < s.data[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        s.swap_rows(t, pi);
        u.swap_rows(t, pi);
        s.swap_cols(t, pj);
        v.swap_cols(t, pj);
        loop {
            if s.data[t][t].is_negative() {
                s.negate_row(t);
                u.negate_row(t);
            }
            let mut clean = true;
            for i in t + 1..m {
                if !s.data[i][t].is_zero() {
                    let q = round_div(&s.data[i][t], &s.data[t][t]);
                    s.row_submul(i, t, &q);
                    u.row_submul(i, t, &q);
                    clean &= s.data[i][t].is_zero();
                }
            }
            for j in t + 1..n {
                if !s.data[t][j].is_zero() {
                    let q = round_div(&s.data[t][j], &s.data[t][t]);
                    s.col_submul(j, t, &q);
                    v.col_submul(j, t, &q);
                    clean &= s.data[t][j].is_zero();
                }
            }
            if !clean {
                // a remainder smaller than the pivot survived: move it into place
                let mut bi = (t, t);
                for i in t + 1..m {
                    if !s.data[i][t].is_zero() && s.data[i][t].abs() < s.data[bi.0][bi.1].abs() {
                        bi = (i, t);
                    }
                }
                for j in t + 1..n {
                    if !s.data[t][j].is_zero() && s.data[t][j].abs() < s.data[bi.0][bi.1].abs() {
                        bi = (t, j);
                    }
                }
                if bi.0 != t {
                    s.swap_rows(t, bi.0);
                    u.swap_rows(t, bi.0);
                }
                if bi.1 != t {
                    s.swap_cols(t, bi.1);
                    v.swap_cols(t, bi.1);
                }
                continue;
            }
            // divisibility of the trailing block by the pivot
            let p = s.data[t][t].clone();
            let offender = (t + 1..m).find(|&i| (t + 1..n).any(|j| !s.data[i][j].is_multiple_of(&p)));
            match offender {
                Some(i) => {
                    let minus_one = BigInt::from(-1);
                    s.row_submul(t, i, &minus_one);
                    u.row_submul(t, i, &minus_one);
                }
                None => break,
            }
        }
    }
    SnfDecomposition { u, v, s }
}

/// Why `Ax = b` has no integer solution: after `U A V = S`, the entry
/// `(U b)_index` is not divisible by `divisor = s_index` (`divisor = 0` marks a
/// zero row of `S` with nonzero right-hand side).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnsolvableCertificate {
    pub index: usize,
    pub divisor: BigInt,
    pub residue: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IntegerSolution {
    Solved(Vec<BigInt>),
    Unsolvable(UnsolvableCertificate),
}

impl IntegerSolution {
    pub fn is_solvable(&self) -> bool {
        matches!(self, IntegerSolution::Solved(_))
    }
}

/// Solves `A x = b` over ℤ with the dense Smith normal form alone.
pub fn solve_integer_system_dense(a: &IntMatrix, b: &[BigInt]) -> Result<IntegerSolution> {
    if a.nrows != b.len() {
        return Err(Error::dims(format!("{} rows but right-hand side of length {}", a.nrows, b.len())));
    }
    let snf = smith_normal_form(a);
    let y = snf.u.mul_vec(b);
    let mut z = vec![BigInt::zero(); a.ncols];
    for (i, yi) in y.iter().enumerate() {
        let d = if i < a.ncols { snf.s.data[i][i].clone() } else { BigInt::zero() };
        if d.is_zero() {
            if !yi.is_zero() {
                return Ok(IntegerSolution::Unsolvable(UnsolvableCertificate {
                    index: i,
                    divisor: d,
                    residue: yi.clone(),
                }));
            }
        } else {
            let (q, r) = yi.div_mod_floor(&d);
            if !r.is_zero() {
                return Ok(IntegerSolution::Unsolvable(UnsolvableCertificate {
                    index: i,
                    divisor: d,
                    residue: r,
                }));
            }
            z[i] = q;
        }
    }
    let x = snf.v.mul_vec(&z);
    assert_eq!(a.mul_vec(&x), b, "Smith normal form solution fails A x = b");
    Ok(IntegerSolution::Solved(x))
}

/// Knobs for [`solve_integer_system_with`].
#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    /// Largest residual column count handed to the dense normal form.
    pub dense_column_limit: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { dense_column_limit: 2000 }
    }
}

pub fn solve_integer_system(a: &SparseIntMatrix, b: &[BigInt]) -> Result<IntegerSolution> {
    solve_integer_system_with(a, b, SolveOptions::default())
}

struct Pivot {
    row: Vec<(usize, i64)>,
    col: usize,
    value: i64,
    rhs: BigInt,
}

/// `dst -= factor * src`, both sorted sparse rows. `None` on overflow.
fn axpy_row(dst: &[(usize, i64)], src: &[(usize, i64)], factor: i64) -> Option<Vec<(usize, i64)>> {
    let mut out = Vec::with_capacity(dst.len() + src.len());
    let (mut i, mut j) = (0, 0);
    while i < dst.len() || j < src.len() {
        if j == src.len() || (i < dst.len() && dst[i].0 < src[j].0) {
            out.push(dst[i]);
            i += 1;
        } else {
            let sub = src[j].1.checked_mul(factor)?;
            if i < dst.len() && dst[i].0 == src[j].0 {
                let v = dst[i].1.checked_sub(sub)?;
                if v != 0 {
                    out.push((dst[i].0, v));
                }
                i += 1;
            } else {
                out.push((src[j].0, sub.checked_neg()?));
            }
            j += 1;
        }
    }
    Some(out)
}

pub fn solve_integer_system_with(
    a: &SparseIntMatrix,
    b: &[BigInt],
    opts: SolveOptions,
) -> Result<IntegerSolution> {
    if a.nrows != b.len() {
        return Err(Error::dims(format!("{} rows but right-hand side of length {}", a.nrows, b.len())));
    }
    let mut rows: Vec<Option<Vec<(usize, i64)>>> = a.rows.iter().cloned().map(Some).collect();
    let mut rhs: Vec<BigInt> = b.to_vec();
    let mut col_rows: Vec<std::collections::BTreeSet<usize>> = vec![Default::default(); a.ncols];
    for (r, row) in a.rows.iter().enumerate() {
        for &(c, _) in row {
            col_rows[c].insert(r);
        }
    }
    let mut pivots: Vec<Pivot> = Vec::new();
    'elim: loop {
        // unit pivot of least Markowitz cost
        let mut best: Option<(usize, usize, usize)> = None;
        for (r, row) in rows.iter().enumerate() {
            let Some(row) = row else { continue };
            for &(c, v) in row {
                if v.abs() == 1 {
                    let cost = (row.len() - 1) * (col_rows[c].len() - 1);
                    if best.is_none_or(|b| cost < b.2) {
                        best = Some((r, c, cost));
                    }
                }
            }
            if best.is_some_and(|b| b.2 == 0) {
                break;
            }
        }
        let Some((pr, pc, _)) = best else { break };
        let prow = rows[pr].take().expect("active pivot row");
        let pval = prow.iter().find(|e| e.0 == pc).expect("pivot entry").1;
        let targets: Vec<usize> = col_rows[pc].iter().copied().filter(|&r| r != pr).collect();
        for r in targets {
            let row = rows[r].as_ref().expect("active row");
            let a_rc = row.iter().find(|e| e.0 == pc).expect("column entry").1;
            let factor = a_rc * pval;
            let Some(updated) = axpy_row(row, &prow, factor) else {
                rows[pr] = Some(prow);
                break 'elim;
            };
            for &(c, _) in row {
                col_rows[c].remove(&r);
            }
            for &(c, _) in &updated {
                col_rows[c].insert(r);
            }
            rhs[r] = &rhs[r] - &rhs[pr] * factor;
            rows[r] = Some(updated);
        }
        for &(c, _) in &prow {
            col_rows[c].remove(&pr);
        }
        pivots.push(Pivot { row: prow, col: pc, value: pval, rhs: rhs[pr].clone() });
    }

    // residual block
    let active: Vec<usize> = (0..a.nrows).filter(|&r| rows[r].is_some()).collect();
    let mut res_cols: Vec<usize> = active
        .iter()
        .flat_map(|&r| rows[r].as_ref().unwrap().iter().map(|e| e.0))
        .collect();
    res_cols.sort_unstable();
    res_cols.dedup();
    if res_cols.len() > opts.dense_column_limit {
        return Err(Error::Budget(format!(
            "residual integer block has {} columns (limit {})",
            res_cols.len(),
            opts.dense_column_limit
        )));
    }
    let mut x = vec![BigInt::zero(); a.ncols];
    let nonzero_active: Vec<usize> =
        active.iter().copied().filter(|&r| !rows[r].as_ref().unwrap().is_empty()).collect();
    for &r in &active {
        if rows[r].as_ref().unwrap().is_empty() && !rhs[r].is_zero() {
            return Ok(IntegerSolution::Unsolvable(UnsolvableCertificate {
                index: r,
                divisor: BigInt::zero(),
                residue: rhs[r].clone(),
            }));
        }
    }
    if !nonzero_active.is_empty() {
        let mut dense = IntMatrix::zeros(nonzero_active.len(), res_cols.len());
        for (i, &r) in nonzero_active.iter().enumerate() {
            for &(c, v) in rows[r].as_ref().unwrap() {
                let j = res_cols.binary_search(&c).expect("residual column");
                dense.data[i][j] = BigInt::from(v);
            }
        }
        let y: Vec<BigInt> = nonzero_active.iter().map(|&r| rhs[r].clone()).collect();
        match solve_integer_system_dense(&dense, &y)? {
            IntegerSolution::Solved(z) => {
                for (j, &c) in res_cols.iter().enumerate() {
                    x[c] = z[j].clone();
                }
            }
            unsolvable => return Ok(unsolvable),
        }
    }
    for p in pivots.iter().rev() {
        let mut acc = p.rhs.clone();
        for &(c, v) in &p.row {
            if c != p.col {
                acc -= &x[c] * v;
            }
        }
        // pivot value is ±1
        x[p.col] = acc * p.value;
    }
    assert_eq!(a.mul_vec(&x), b, "integer solver produced a vector failing A x = b");
    Ok(IntegerSolution::Solved(x))
}

/// Dense matrix over ℤ/2, rows packed into 64-bit words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mod2Matrix {
    nrows: usize,
    ncols: usize,
    words: usize,
    data: Vec<u64>,
}

impl Mod2Matrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        let words = ncols.div_ceil(64).max(1);
        Mod2Matrix { nrows, ncols, words, data: vec![0; nrows * words] }
    }

    pub fn from_sparse(a: &SparseIntMatrix) -> Self {
        let mut m = Self::zeros(a.nrows, a.ncols);
        for (r, row) in a.rows.iter().enumerate() {
            for &(c, v) in row {
                if v % 2 != 0 {
                    m.set(r, c, true);
                }
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r * self.words + c / 64] >> (c % 64) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        let w = &mut self.data[r * self.words + c / 64];
        if v {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    fn xor_rows(&mut self, dst: usize, src: usize) {
        let w = self.words;
        for k in 0..w {
            let s = self.data[src * w + k];
            self.data[dst * w + k] ^= s;
        }
    }

    /// Row echelon form in place, returning pivot columns by row.
    fn eliminate(&mut self, rhs: &mut [bool]) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.ncols {
            if r == self.nrows {
                break;
            }
            let Some(p) = (r..self.nrows).find(|&i| self.get(i, c)) else { continue };
            if p != r {
                for k in 0..self.words {
                    self.data.swap(p * self.words + k, r * self.words + k);
                }
                rhs.swap(p, r);
            }
            for i in 0..self.nrows {
                if i != r && self.get(i, c) {
                    self.xor_rows(i, r);
                    rhs[i] ^= rhs[r];
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut dummy = vec![false; self.nrows];
        m.eliminate(&mut dummy).len()
    }
}

pub fn solve_mod2_system(a: &Mod2Matrix, b: &[bool]) -> Result<Option<Vec<bool>>> {
    if a.nrows != b.len() {
        return Err(Error::dims(format!("{} rows but right-hand side of length {}", a.nrows, b.len())));
    }
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    let pivots = m.eliminate(&mut rhs);
    if rhs[pivots.len()..].iter().any(|&v| v) {
        return Ok(None);
    }
    let mut x = vec![false; a.ncols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = rhs[r];
    }
    Ok(Some(x))
}
