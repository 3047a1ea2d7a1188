//! Canonical subspaces of F_p^n.
//!
//! A `Subspace` always stores the reduced row echelon basis of its row
//! space with zero rows pruned, so two equal subspaces are bit-identical
//! and can be compared with `==` directly.

use crate::field::{FMatrix, FieldError, PrimeField};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subspace {
    field: PrimeField,
    ambient: usize,
    basis: FMatrix,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(field: PrimeField, ambient: usize) -> Self {
        Subspace { field, ambient, basis: FMatrix::zero(field, 0, ambient), pivots: Vec::new() }
    }

    pub fn full(field: PrimeField, ambient: usize) -> Self {
        Subspace::from_matrix(&FMatrix::identity(field, ambient))
    }

    /// Span of the rows of `m`.
    pub fn from_matrix(m: &FMatrix) -> Self {
        let (r, pivots) = m.rref();
        let mut rows = Vec::new();
        for i in 0..pivots.len() {
            rows.push(r.row_vec(i));
        }
        let basis = FMatrix::from_rows(m.field(), &rows)
            .unwrap_or_else(|_| FMatrix::zero(m.field(), 0, m.cols()));
        Subspace { field: m.field(), ambient: m.cols(), basis, pivots }
    }

    pub fn from_rows(field: PrimeField, ambient: usize, rows: &[Vec<u64>]) -> Result<Self, FieldError> {
        if rows.is_empty() {
            return Ok(Subspace::zero(field, ambient));
        }
        if rows.iter().any(|r| r.len() != ambient) {
            return Err(FieldError::Shape("row length differs from ambient dimension".into()));
        }
        Ok(Subspace::from_matrix(&FMatrix::from_rows(field, rows)?))
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn ambient(&self) -> usize {
        self.ambient
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    #[inline]
    pub fn basis(&self) -> &FMatrix {
        &self.basis
    }

    #[inline]
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    fn check_compatible(&self, other: &Subspace) -> Result<(), FieldError> {
        if self.field != other.field {
            return Err(FieldError::FieldMismatch(self.field.p(), other.field.p()));
        }
        if self.ambient != other.ambient {
            return Err(FieldError::Shape(format!(
                "ambient {} vs {}",
                self.ambient, other.ambient
            )));
        }
        Ok(())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, FieldError> {
        self.check_compatible(other)?;
        let mut rows = Vec::with_capacity(self.dim() + other.dim());
        for i in 0..self.dim() {
            rows.push(self.basis.row_vec(i));
        }
        for i in 0..other.dim() {
            rows.push(other.basis.row_vec(i));
        }
        Subspace::from_rows(self.field, self.ambient, &rows)
    }

    /// Zassenhaus intersection: row reduce [A|A; B|0] and read the right
    /// half of the rows whose left half vanished.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace, FieldError> {
        self.check_compatible(other)?;
        let n = self.ambient;
        let f = self.field;
        let total = self.dim() + other.dim();
        if total == 0 {
            return Ok(Subspace::zero(f, n));
        }
        let mut block = FMatrix::zero(f, total, 2 * n);
        for i in 0..self.dim() {
            for j in 0..n {
                let v = self.basis.get(i, j);
                block.set(i, j, v);
                block.set(i, n + j, v);
            }
        }
        for i in 0..other.dim() {
            for j in 0..n {
                block.set(self.dim() + i, j, other.basis.get(i, j));
            }
        }
        let (r, pivots) = block.rref();
        let mut rows = Vec::new();
        for i in 0..pivots.len() {
            if pivots[i] >= n {
                rows.push(r.row(i)[n..].to_vec());
            }
        }
        Subspace::from_rows(f, n, &rows)
    }

    pub fn contains_vec(&self, v: &[u64]) -> bool {
        self.coset_reduce(v).iter().all(|&x| x == 0)
    }

    pub fn contains(&self, other: &Subspace) -> bool {
        (0..other.dim()).all(|i| self.contains_vec(other.basis.row(i)))
    }

    /// Canonical coset representative of `v + self`: the result is zero on
    /// every pivot column of the basis, and `v - coset_reduce(v)` lies in
    /// the subspace.
    pub fn coset_reduce(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.ambient, "coset_reduce ambient mismatch");
        let f = self.field;
        let mut out: Vec<u64> = v.iter().map(|&x| x % f.p()).collect();
        for (ri, &pc) in self.pivots.iter().enumerate() {
            let c = out[pc];
            if c != 0 {
                for j in 0..self.ambient {
                    out[j] = f.sub(out[j], f.mul(c, self.basis.get(ri, j)));
                }
            }
        }
        out
    }

    /// Image of the subspace under `v -> v * m`.
    pub fn apply(&self, m: &FMatrix) -> Result<Subspace, FieldError> {
        let mut rows = Vec::with_capacity(self.dim());
        for i in 0..self.dim() {
            rows.push(m.apply_row(self.basis.row(i))?);
        }
        Subspace::from_rows(self.field, m.cols(), &rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn random_space(rng: &mut impl Rng, p: u64, ambient: usize, rows: usize) -> Subspace {
        let fp = f(p);
        let rows: Vec<Vec<u64>> = (0..rows)
            .map(|_| (0..ambient).map(|_| rng.gen_range(0..p)).collect())
            .collect();
        Subspace::from_rows(fp, ambient, &rows).unwrap()
    }

    #[test]
    fn canonical_representation() {
        let fp = f(5);
        // Two different spanning sets of the same plane in F_5^3.
        let a = Subspace::from_rows(fp, 3, &[vec![1, 2, 3], vec![0, 1, 4]]).unwrap();
        let b = Subspace::from_rows(fp, 3, &[vec![2, 4, 6], vec![1, 3, 2], vec![1, 2, 3]]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.dim(), 2);
    }

    #[test]
    fn sum_and_intersection_dims() {
        // dim(A) + dim(B) = dim(A+B) + dim(A∩B) on random pairs; the
        // oracle dimensions come from ranks of stacked matrices computed
        // directly, not from the subspace ops under test.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xA5A5);
        for _ in 0..50 {
            let p = [3u64, 5, 7][rng.gen_range(0..3)];
            let n = rng.gen_range(1..=6);
            let ra = rng.gen_range(0..=n);
            let rb = rng.gen_range(0..=n);
            let a = random_space(&mut rng, p, n, ra);
            let b = random_space(&mut rng, p, n, rb);
            let sum = a.sum(&b).unwrap();
            let inter = a.intersect(&b).unwrap();
            // Independent rank computation for the sum.
            let mut stacked: Vec<Vec<u64>> = Vec::new();
            for i in 0..a.dim() {
                stacked.push(a.basis().row_vec(i));
            }
            for i in 0..b.dim() {
                stacked.push(b.basis().row_vec(i));
            }
            let sum_rank = if stacked.is_empty() {
                0
            } else {
                FMatrix::from_rows(f(p), &stacked).unwrap().rank()
            };
            assert_eq!(sum.dim(), sum_rank);
            assert_eq!(a.dim() + b.dim(), sum.dim() + inter.dim());
            assert!(a.contains(&inter) && b.contains(&inter));
            assert!(sum.contains(&a) && sum.contains(&b));
        }
    }

    #[test]
    fn coset_reduce_properties() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xC0_5E7);
        for _ in 0..50 {
            let p = [3u64, 5, 7][rng.gen_range(0..3)];
            let n = rng.gen_range(1..=6);
            let rs = rng.gen_range(0..=n);
            let s = random_space(&mut rng, p, n, rs);
            let v: Vec<u64> = (0..n).map(|_| rng.gen_range(0..p)).collect();
            let r = s.coset_reduce(&v);
            // Zero on pivot columns.
            for &c in s.pivots() {
                assert_eq!(r[c], 0);
            }
            // v - r lies in s.
            let fp = f(p);
            let diff: Vec<u64> = v.iter().zip(&r).map(|(&a, &b)| fp.sub(a, b)).collect();
            assert!(s.contains_vec(&diff));
            // Same coset -> same representative.
            if s.dim() > 0 {
                let w0 = s.basis().row_vec(0);
                let shifted: Vec<u64> = v.iter().zip(&w0).map(|(&a, &b)| fp.add(a, b)).collect();
                assert_eq!(s.coset_reduce(&shifted), r);
            }
        }
    }

    #[test]
    fn zero_and_full() {
        let fp = f(3);
        let z = Subspace::zero(fp, 4);
        let full = Subspace::full(fp, 4);
        assert!(z.is_zero() && full.is_full());
        assert!(full.contains(&z));
        assert_eq!(z.sum(&full).unwrap(), full);
        assert_eq!(z.intersect(&full).unwrap(), z);
        assert_eq!(full.coset_reduce(&[1, 2, 0, 1]), vec![0, 0, 0, 0]);
    }
}
