//! Complex sparse matrices in compressed-row form.
//!
//! Entries with `|v| <= DROP_TOLERANCE` are never stored. The text exchange
//! format is a header line `dim nnz` followed by one `row col re im` line per
//! entry, rows ascending, columns ascending within a row.

use std::io::{BufRead, Write};

use faer::Mat;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Magnitude at or below which an entry is treated as an exact zero.
pub const DROP_TOLERANCE: f64 = 1e-14;

/// Entry-wise tolerance of the Hermiticity flag.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// Triplet accumulator; duplicates are summed on [`SparseBuilder::build`].
#[derive(Clone, Debug)]
pub struct SparseBuilder {
    dim: usize,
    triplets: Vec<(usize, usize, C64)>,
}

impl SparseBuilder {
    pub fn new(dim: usize) -> Self {
        SparseBuilder {
            dim,
            triplets: Vec::new(),
        }
    }

    pub fn with_capacity(dim: usize, capacity: usize) -> Self {
        SparseBuilder {
            dim,
            triplets: Vec::with_capacity(capacity),
        }
    }

    pub fn push(&mut self, row: usize, col: usize, value: C64) {
        assert!(
            row < self.dim && col < self.dim,
            "entry ({row}, {col}) outside dim {}",
            self.dim
        );
        self.triplets.push((row, col, value));
    }

    pub fn push_real(&mut self, row: usize, col: usize, value: f64) {
        self.push(row, col, C64::new(value, 0.0));
    }

    pub fn build(mut self) -> SparseOperator {
        self.triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; self.dim + 1];
        let mut cols = Vec::with_capacity(self.triplets.len());
        let mut vals: Vec<C64> = Vec::with_capacity(self.triplets.len());

        let mut iter = self.triplets.into_iter().peekable();
        while let Some((r, c, mut v)) = iter.next() {
            while let Some(&(r2, c2, v2)) = iter.peek() {
                if r2 == r && c2 == c {
                    v += v2;
                    iter.next();
                } else {
                    break;
                }
            }
            if v.norm() > DROP_TOLERANCE {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
            }
        }
        for r in 0..self.dim {
            row_ptr[r + 1] += row_ptr[r];
        }
        let mut op = SparseOperator {
            dim: self.dim,
            row_ptr,
            cols,
            vals,
            hermitian: false,
        };
        op.hermitian = op.check_hermitian();
        op
    }
}

/// Square complex sparse matrix with coalesced entries.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
    hermitian: bool,
}

impl SparseOperator {
    pub fn zero(dim: usize) -> Self {
        SparseBuilder::new(dim).build()
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_diagonal(&vec![C64::new(1.0, 0.0); dim])
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let mut b = SparseBuilder::with_capacity(diag.len(), diag.len());
        for (i, &v) in diag.iter().enumerate() {
            b.push(i, i, v);
        }
        b.build()
    }

    pub fn from_triplets(
        dim: usize,
        triplets: impl IntoIterator<Item = (usize, usize, C64)>,
    ) -> Self {
        let mut b = SparseBuilder::new(dim);
        for (r, c, v) in triplets {
            b.push(r, c, v);
        }
        b.build()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// True when every stored entry has a vanishing imaginary part.
    pub fn is_real(&self) -> bool {
        self.vals.iter().all(|v| v.im == 0.0)
    }

    /// Columns and values of `row`.
    pub fn row(&self, row: usize) -> (&[usize], &[C64]) {
        let (a, b) = (self.row_ptr[row], self.row_ptr[row + 1]);
        (&self.cols[a..b], &self.vals[a..b])
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            let (cols, vals) = self.row(r);
            cols.iter().zip(vals).map(move |(&c, &v)| (r, c, v))
        })
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        let (cols, vals) = self.row(row);
        match cols.binary_search(&col) {
            Ok(k) => vals[k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    fn check_hermitian(&self) -> bool {
        self.entries()
            .all(|(r, c, v)| (v - self.get(c, r).conj()).norm() <= HERMITIAN_TOLERANCE)
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.dim);
        (0..self.dim)
            .map(|r| {
                let (cols, vals) = self.row(r);
                cols.iter().zip(vals).map(|(&c, &v)| v * x[c]).sum()
            })
            .collect()
    }

    /// Product with a real vector using the real parts of the entries.
    pub fn matvec_real(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim);
        (0..self.dim)
            .map(|r| {
                let (cols, vals) = self.row(r);
                cols.iter().zip(vals).map(|(&c, v)| v.re * x[c]).sum()
            })
            .collect()
    }

    /// Row vector product `x^T A` using the real parts of the entries.
    pub fn vecmat_real(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim);
        let mut out = vec![0.0; self.dim];
        for (r, c, v) in self.entries() {
            out[c] += x[r] * v.re;
        }
        out
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.dim, self.entries().map(|(r, c, v)| (c, r, v)))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.dim, self.entries().map(|(r, c, v)| (c, r, v.conj())))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_triplets(self.dim, self.entries().map(|(r, c, v)| (r, c, v * s)))
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, other: &Self, s: C64) -> Self {
        assert_eq!(self.dim, other.dim);
        Self::from_triplets(
            self.dim,
            self.entries()
                .chain(other.entries().map(|(r, c, v)| (r, c, v * s))),
        )
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut b = SparseBuilder::new(self.dim);
        let mut acc = vec![C64::new(0.0, 0.0); self.dim];
        let mut touched: Vec<usize> = Vec::new();
        let mut mark = vec![false; self.dim];
        for r in 0..self.dim {
            let (cols, vals) = self.row(r);
            for (&k, &a) in cols.iter().zip(vals) {
                let (cols2, vals2) = other.row(k);
                for (&c, &bv) in cols2.iter().zip(vals2) {
                    if !mark[c] {
                        mark[c] = true;
                        touched.push(c);
                    }
                    acc[c] += a * bv;
                }
            }
            for &c in &touched {
                b.push(r, c, acc[c]);
                acc[c] = C64::new(0.0, 0.0);
                mark[c] = false;
            }
            touched.clear();
        }
        b.build()
    }

    /// `[self, other]` = `self·other − other·self`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.matmul(other)
            .add_scaled(&other.matmul(self), C64::new(-1.0, 0.0))
    }

    /// Relabel indices: entry `(r, c)` moves to `(perm[r], perm[c])`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.dim);
        Self::from_triplets(
            self.dim,
            self.entries().map(|(r, c, v)| (perm[r], perm[c], v)),
        )
    }

    /// Similarity `D^{-1} A D` for the diagonal `D = diag(exp(log_d))`.
    pub fn diagonal_similarity(&self, log_d: &[f64]) -> Self {
        assert_eq!(log_d.len(), self.dim);
        Self::from_triplets(
            self.dim,
            self.entries()
                .map(|(r, c, v)| (r, c, v * (log_d[c] - log_d[r]).exp())),
        )
    }

    pub fn column_sums(&self) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        for (_, c, v) in self.entries() {
            out[c] += v;
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Entry-wise max-norm of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.add_scaled(other, C64::new(-1.0, 0.0)).max_abs()
    }

    pub fn to_dense(&self) -> Mat<C64> {
        let mut m = Mat::<C64>::zeros(self.dim, self.dim);
        for (r, c, v) in self.entries() {
            m[(r, c)] = v;
        }
        m
    }

    /// Dense real copy, or `None` if any entry is complex.
    pub fn to_dense_real(&self) -> Option<Mat<f64>> {
        if !self.is_real() {
            return None;
        }
        let mut m = Mat::<f64>::zeros(self.dim, self.dim);
        for (r, c, v) in self.entries() {
            m[(r, c)] = v.re;
        }
        Some(m)
    }

    /// Short description used in error reports.
    pub fn fingerprint(&self) -> String {
        let sum: C64 = self.vals.iter().sum();
        let fro = self.vals.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        format!(
            "dim={} nnz={} sum={:.6e}{:+.6e}i fro={:.6e}",
            self.dim,
            self.nnz(),
            sum.re,
            sum.im,
            fro
        )
    }

    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{} {}", self.dim, self.nnz())?;
        for (r, c, v) in self.entries() {
            writeln!(w, "{} {} {:.16e} {:.16e}", r, c, v.re, v.im)?;
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::invalid("empty operator file"))??;
        let mut it = header.split_whitespace();
        let parse_usize = |s: Option<&str>, what: &str| -> Result<usize> {
            s.ok_or_else(|| Error::invalid(format!("missing {what}")))?
                .parse::<usize>()
                .map_err(|e| Error::invalid(format!("bad {what}: {e}")))
        };
        let dim = parse_usize(it.next(), "dim")?;
        let nnz = parse_usize(it.next(), "nnz")?;
        let mut b = SparseBuilder::with_capacity(dim, nnz);
        for (k, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 4 {
                return Err(Error::invalid(format!(
                    "entry line {}: expected 4 fields",
                    k + 2
                )));
            }
            let row = parse_usize(Some(f[0]), "row")?;
            let col = parse_usize(Some(f[1]), "col")?;
            if row >= dim || col >= dim {
                return Err(Error::invalid(format!(
                    "entry line {}: index out of range",
                    k + 2
                )));
            }
            let re: f64 = f[2]
                .parse()
                .map_err(|e| Error::invalid(format!("bad re: {e}")))?;
            let im: f64 = f[3]
                .parse()
                .map_err(|e| Error::invalid(format!("bad im: {e}")))?;
            b.push(row, col, C64::new(re, im));
        }
        let op = b.build();
        if op.nnz() != nnz {
            return Err(Error::invalid(format!(
                "header announces {nnz} entries, found {}",
                op.nnz()
            )));
        }
        Ok(op)
    }
}
