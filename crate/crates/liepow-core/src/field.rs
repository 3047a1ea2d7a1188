//! Exact linear algebra over prime fields F_p, p an odd prime.
//!
//! All vectors are row vectors and matrices act on the right: the image of
//! `v` under `m` is `v * m`.  Every algorithm here is exact; there is no
//! floating point anywhere in this crate.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("modulus {0} is not an odd prime >= 3")]
    NotOddPrime(u64),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("field mismatch: F_{0} vs F_{1}")]
    FieldMismatch(u64, u64),
    #[error("matrix is singular")]
    Singular,
}

/// The field F_p.  `p` is checked to be an odd prime at construction; all
/// residues handled by this type are already reduced into `[0, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimeField {
    p: u64,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        // Odd primes only: characteristic 2 breaks the bracket calculus and
        // the invariant-form classification downstream.
        if p < 3 || p % 2 == 0 || !is_prime(p) || p >= (1 << 31) {
            return Err(FieldError::NotOddPrime(p));
        }
        Ok(PrimeField { p })
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        // p < 2^31 so the product fits in u64.
        (a * b) % self.p
    }

    /// Reduce an arbitrary signed integer into `[0, p)`.
    #[inline]
    pub fn reduce(&self, a: i128) -> u64 {
        let p = self.p as i128;
        (((a % p) + p) % p) as u64
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `a` must be nonzero.
    pub fn inv(&self, a: u64) -> u64 {
        assert!(a % self.p != 0, "inverse of zero in F_{}", self.p);
        self.pow(a, self.p - 2)
    }
}

/// Dense row-major matrix over F_p.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl FMatrix {
    pub fn zero(field: PrimeField, rows: usize, cols: usize) -> Self {
        FMatrix { field, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = FMatrix::zero(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Build from rows of residues; entries are reduced mod p.
    pub fn from_rows(field: PrimeField, rows: &[Vec<u64>]) -> Result<Self, FieldError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        if rows.iter().any(|v| v.len() != c) {
            return Err(FieldError::Shape("ragged rows".into()));
        }
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            for &x in row {
                data.push(x % field.p());
            }
        }
        Ok(FMatrix { field, rows: r, cols: c, data })
    }

    pub fn from_fn(field: PrimeField, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> u64) -> Self {
        let mut m = FMatrix::zero(field, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j) % field.p());
            }
        }
        m
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v % self.field.p();
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vec(&self, i: usize) -> Vec<u64> {
        self.row(i).to_vec()
    }

    pub fn check_same_field(&self, other: &FMatrix) -> Result<(), FieldError> {
        if self.field != other.field {
            return Err(FieldError::FieldMismatch(self.field.p(), other.field.p()));
        }
        Ok(())
    }

    pub fn add(&self, other: &FMatrix) -> Result<FMatrix, FieldError> {
        self.check_same_field(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(FieldError::Shape(format!(
                "add {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = self.clone();
        for (a, &b) in out.data.iter_mut().zip(&other.data) {
            *a = self.field.add(*a, b);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &FMatrix) -> Result<FMatrix, FieldError> {
        self.check_same_field(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(FieldError::Shape("sub shapes differ".into()));
        }
        let mut out = self.clone();
        for (a, &b) in out.data.iter_mut().zip(&other.data) {
            *a = self.field.sub(*a, b);
        }
        Ok(out)
    }

    pub fn scalar_mul(&self, c: u64) -> FMatrix {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a = self.field.mul(*a, c);
        }
        out
    }

    pub fn mul(&self, other: &FMatrix) -> Result<FMatrix, FieldError> {
        self.check_same_field(other)?;
        if self.cols != other.rows {
            return Err(FieldError::Shape(format!(
                "mul {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = self.field;
        let p = f.p() as u128;
        let mut out = FMatrix::zero(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                let a = a as u128;
                for j in 0..other.cols {
                    let cur = out.get(i, j) as u128;
                    out.data[i * out.cols + j] = ((cur + a * other.get(k, j) as u128) % p) as u64;
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix: `v * self`.
    pub fn apply_row(&self, v: &[u64]) -> Result<Vec<u64>, FieldError> {
        if v.len() != self.rows {
            return Err(FieldError::Shape(format!(
                "vector length {} vs {} rows",
                v.len(),
                self.rows
            )));
        }
        let f = self.field;
        let p = f.p() as u128;
        let mut out = vec![0u128; self.cols];
        for (i, &a) in v.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let a = a as u128;
            for j in 0..self.cols {
                out[j] = (out[j] + a * self.get(i, j) as u128) % p;
            }
        }
        Ok(out.into_iter().map(|x| x as u64).collect())
    }

    pub fn transpose(&self) -> FMatrix {
        let mut out = FMatrix::zero(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// Kronecker product; acts on the tensor product of the row spaces with
    /// index (i, j) -> i * other_dim + j.
    pub fn kronecker(&self, other: &FMatrix) -> Result<FMatrix, FieldError> {
        self.check_same_field(other)?;
        let f = self.field;
        let mut out = FMatrix::zero(f, self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a == 0 {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        let b = other.get(k, l);
                        if b != 0 {
                            out.set(i * other.rows + k, j * other.cols + l, f.mul(a, b));
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Reduced row echelon form together with the pivot column list.
    /// The RREF of a matrix is unique, which makes it the canonical
    /// representation used by `Subspace`.
    pub fn rref(&self) -> (FMatrix, Vec<usize>) {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0usize;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            // Find a pivot in column c at or below row r.
            let mut pr = None;
            for i in r..m.rows {
                if m.get(i, c) != 0 {
                    pr = Some(i);
                    break;
                }
            }
            let Some(pr) = pr else { continue };
            if pr != r {
                for j in 0..m.cols {
                    let (a, b) = (m.get(r, j), m.get(pr, j));
                    m.set(r, j, b);
                    m.set(pr, j, a);
                }
            }
            let inv = f.inv(m.get(r, c));
            for j in 0..m.cols {
                m.set(r, j, f.mul(m.get(r, j), inv));
            }
            for i in 0..m.rows {
                if i != r && m.get(i, c) != 0 {
                    let factor = m.get(i, c);
                    for j in 0..m.cols {
                        let x = f.sub(m.get(i, j), f.mul(factor, m.get(r, j)));
                        m.set(i, j, x);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis (as matrix rows) of `{ v : v * self = 0 }`; dimension is
    /// `rows(self) - rank(self)`.
    pub fn kernel(&self) -> FMatrix {
        let t = self.transpose();
        // Solve t * x^T = 0 columnwise, i.e. the classical column null space
        // of t, whose coordinates live in F^{rows(self)}.
        let (r, pivots) = t.rref();
        let n = self.rows;
        let mut is_pivot = vec![false; n];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let free: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
        let f = self.field;
        let mut out = FMatrix::zero(f, free.len(), n);
        for (k, &fc) in free.iter().enumerate() {
            out.set(k, fc, 1);
            for (ri, &pc) in pivots.iter().enumerate() {
                out.set(k, pc, f.neg(r.get(ri, fc)));
            }
        }
        // Canonical order: echelonize the kernel basis itself.
        out.rref().0.prune_zero_rows()
    }

    fn prune_zero_rows(&self) -> FMatrix {
        let keep: Vec<usize> = (0..self.rows)
            .filter(|&i| self.row(i).iter().any(|&x| x != 0))
            .collect();
        let mut out = FMatrix::zero(self.field, keep.len(), self.cols);
        for (k, &i) in keep.iter().enumerate() {
            for j in 0..self.cols {
                out.set(k, j, self.get(i, j));
            }
        }
        out
    }

    /// Gaussian-elimination determinant (square matrices).
    pub fn det(&self) -> Result<u64, FieldError> {
        if self.rows != self.cols {
            return Err(FieldError::Shape("det of non-square".into()));
        }
        let f = self.field;
        let mut m = self.clone();
        let n = self.rows;
        let mut det = 1u64;
        for c in 0..n {
            let mut pr = None;
            for i in c..n {
                if m.get(i, c) != 0 {
                    pr = Some(i);
                    break;
                }
            }
            let Some(pr) = pr else { return Ok(0) };
            if pr != c {
                det = f.neg(det);
                for j in 0..n {
                    let (a, b) = (m.get(c, j), m.get(pr, j));
                    m.set(c, j, b);
                    m.set(pr, j, a);
                }
            }
            let piv = m.get(c, c);
            det = f.mul(det, piv);
            let inv = f.inv(piv);
            for i in c + 1..n {
                let factor = f.mul(m.get(i, c), inv);
                if factor != 0 {
                    for j in c..n {
                        let x = f.sub(m.get(i, j), f.mul(factor, m.get(c, j)));
                        m.set(i, j, x);
                    }
                }
            }
        }
        Ok(det)
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && matches!(self.det(), Ok(d) if d != 0)
    }

    pub fn inverse(&self) -> Result<FMatrix, FieldError> {
        if self.rows != self.cols {
            return Err(FieldError::Shape("inverse of non-square".into()));
        }
        let n = self.rows;
        let f = self.field;
        // Row reduce [self | I].
        let mut aug = FMatrix::zero(f, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, 1);
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(FieldError::Singular);
        }
        let mut out = FMatrix::zero(f, n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, r.get(i, n + j));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, mut e: u64) -> Result<FMatrix, FieldError> {
        if self.rows != self.cols {
            return Err(FieldError::Shape("pow of non-square".into()));
        }
        let mut acc = FMatrix::identity(self.field, self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            base = base.mul(&base)?;
            e >>= 1;
        }
        Ok(acc)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }
}

/// One solution of `x * a = b` together with a kernel basis for the
/// homogeneous system.
#[derive(Debug, Clone)]
pub struct LinearSolution {
    pub particular: Vec<u64>,
    pub kernel: FMatrix,
}

/// Solve `x * a = b` for a row vector `x` of length `rows(a)`.
pub fn solve_linear(a: &FMatrix, b: &[u64]) -> Result<Option<LinearSolution>, FieldError> {
    if b.len() != a.cols() {
        return Err(FieldError::Shape(format!(
            "target length {} vs {} columns",
            b.len(),
            a.cols()
        )));
    }
    let f = a.field();
    // x * a = b  <=>  a^T x^T = b^T: reduce [a^T | b^T].
    let t = a.transpose();
    let mut aug = FMatrix::zero(f, t.rows(), t.cols() + 1);
    for i in 0..t.rows() {
        for j in 0..t.cols() {
            aug.set(i, j, t.get(i, j));
        }
        aug.set(i, t.cols(), b[i] % f.p());
    }
    let (r, pivots) = aug.rref();
    if pivots.contains(&t.cols()) {
        return Ok(None); // inconsistent system
    }
    let mut x = vec![0u64; a.rows()];
    for (ri, &pc) in pivots.iter().enumerate() {
        x[pc] = r.get(ri, t.cols());
    }
    Ok(Some(LinearSolution { particular: x, kernel: a.kernel() }))
}
