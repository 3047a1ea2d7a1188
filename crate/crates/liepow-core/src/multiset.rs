//! Weight multisets of modules and the tensor calculus on them.
//!
//! The multiset of a module determines the multisets of its exterior
//! powers, tensor products, Frobenius twists, and of the Lie power
//! L^3 V = (Lambda^2 V tensor V) minus Lambda^3 V; quotients subtract.
//! These identities drive the whole composition-factor pipeline, so every
//! operation here is exact multiset bookkeeping over weight vectors.

use crate::roots::{RootError, RootSystem, Weight};
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MultisetError {
    #[error("root system mismatch: {0} vs {1}")]
    SystemMismatch(String, String),
    #[error("not a sub-multiset: weight ({weight}) occurs {have} time(s) but {need} are required")]
    NotSubMultiset { weight: String, have: u64, need: u64 },
    #[error("exterior power degree must be 2 or 3, got {0}")]
    BadDegree(u32),
    #[error("exterior power degree {0} exceeds multiset size {1}")]
    DegreeTooLarge(u32, u64),
    #[error(transparent)]
    Root(#[from] RootError),
    #[error("multiplicity oracle: {0}")]
    Oracle(String),
}

/// Source of dominant-weight multiplicity data for irreducible modules.
/// The characteristic-zero implementation is the multiplicity recursion in
/// [`crate::roots`]; the modular implementation lives in [`crate::factors`]
/// and reads a decomposition table.
pub trait MultiplicitySource {
    fn dominant_multiplicities(
        &self,
        rs: &Arc<RootSystem>,
        lambda: &Weight,
    ) -> Result<BTreeMap<Weight, u64>, MultisetError>;

    fn describe(&self) -> String;
}

/// Characteristic-zero multiplicities; self-checks its totals against the
/// Weyl dimension formula on every query.
pub struct CharZeroSource;

impl MultiplicitySource for CharZeroSource {
    fn dominant_multiplicities(
        &self,
        rs: &Arc<RootSystem>,
        lambda: &Weight,
    ) -> Result<BTreeMap<Weight, u64>, MultisetError> {
        let m = rs.freudenthal(lambda)?;
        let mut total: u128 = 0;
        for (w, &mult) in m.iter() {
            total += rs.orbit_size(w)? as u128 * mult as u128;
        }
        let dim = rs.weyl_dim(lambda)?;
        if num::BigInt::from(total) != dim {
            return Err(MultisetError::Oracle(format!(
                "multiplicity total {} disagrees with dimension {} for highest weight {}",
                total, dim, lambda
            )));
        }
        Ok(m.as_ref().clone())
    }

    fn describe(&self) -> String {
        "characteristic zero".to_string()
    }
}

/// A finite multiset of weights attached to one root system.
#[derive(Clone)]
pub struct WeightMultiset {
    rs: Arc<RootSystem>,
    counts: HashMap<Weight, u64>,
}

impl std::fmt::Debug for WeightMultiset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "WeightMultiset({} distinct, {} total)", self.counts.len(), self.total())
    }
}

impl WeightMultiset {
    pub fn empty(rs: Arc<RootSystem>) -> Self {
        WeightMultiset { rs, counts: HashMap::new() }
    }

    pub fn from_counts(rs: Arc<RootSystem>, counts: HashMap<Weight, u64>) -> Self {
        let mut c = counts;
        c.retain(|_, v| *v > 0);
        WeightMultiset { rs, counts: c }
    }

    /// Weight multiset of the irreducible module with highest weight
    /// `lambda`, per the supplied multiplicity source.
    pub fn from_irreducible(
        rs: &Arc<RootSystem>,
        lambda: &Weight,
        oracle: &dyn MultiplicitySource,
    ) -> Result<Self, MultisetError> {
        rs.check_rank(lambda)?;
        if !lambda.is_dominant() {
            return Err(MultisetError::Root(RootError::NotDominant(lambda.to_string())));
        }
        let dom = oracle.dominant_multiplicities(rs, lambda)?;
        let mut counts = HashMap::new();
        for (mu, mult) in dom {
            for w in rs.weyl_orbit(&mu)?.iter() {
                *counts.entry(w.clone()).or_insert(0) += mult;
            }
        }
        Ok(WeightMultiset { rs: rs.clone(), counts })
    }

    pub fn system(&self) -> &Arc<RootSystem> {
        &self.rs
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn count(&self, w: &Weight) -> u64 {
        self.counts.get(w).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Entries sorted by weight; the canonical iteration order.
    pub fn entries_sorted(&self) -> Vec<(Weight, u64)> {
        let mut v: Vec<(Weight, u64)> = self.counts.iter().map(|(w, &c)| (w.clone(), c)).collect();
        v.sort();
        v
    }

    pub fn dominant_entries(&self) -> Vec<(Weight, u64)> {
        let mut v: Vec<(Weight, u64)> = self
            .counts
            .iter()
            .filter(|(w, _)| w.is_dominant())
            .map(|(w, &c)| (w.clone(), c))
            .collect();
        v.sort();
        v
    }

    fn check_same_system(&self, other: &WeightMultiset) -> Result<(), MultisetError> {
        if self.rs.label() != other.rs.label() || self.rs.rank() != other.rs.rank() {
            return Err(MultisetError::SystemMismatch(
                format!("{}{}", self.rs.label(), self.rs.rank()),
                format!("{}{}", other.rs.label(), other.rs.rank()),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &WeightMultiset) -> Result<WeightMultiset, MultisetError> {
        self.check_same_system(other)?;
        let mut counts = self.counts.clone();
        for (w, &c) in &other.counts {
            *counts.entry(w.clone()).or_insert(0) += c;
        }
        Ok(WeightMultiset { rs: self.rs.clone(), counts })
    }

    pub fn add_scaled(&self, other: &WeightMultiset, k: u64) -> Result<WeightMultiset, MultisetError> {
        self.check_same_system(other)?;
        let mut counts = self.counts.clone();
        for (w, &c) in &other.counts {
            *counts.entry(w.clone()).or_insert(0) += c * k;
        }
        Ok(WeightMultiset { rs: self.rs.clone(), counts })
    }

    /// Multiset difference; fails naming the first offending weight (in
    /// sorted order) if `other` is not contained in `self`.  A failure
    /// here is diagnostic: it means a wrong decomposition table row or a
    /// wrong peel choice upstream.
    pub fn subtract(&self, other: &WeightMultiset) -> Result<WeightMultiset, MultisetError> {
        self.check_same_system(other)?;
        let mut counts = self.counts.clone();
        for (w, need) in other.entries_sorted() {
            let have = counts.get(&w).copied().unwrap_or(0);
            if have < need {
                return Err(MultisetError::NotSubMultiset { weight: w.coords_string(), have, need });
            }
            if have == need {
                counts.remove(&w);
            } else {
                counts.insert(w, have - need);
            }
        }
        Ok(WeightMultiset { rs: self.rs.clone(), counts })
    }

    pub fn tensor(&self, other: &WeightMultiset) -> Result<WeightMultiset, MultisetError> {
        self.check_same_system(other)?;
        let mut counts = HashMap::new();
        for (a, &ca) in &self.counts {
            for (b, &cb) in &other.counts {
                *counts.entry(a.add(b)).or_insert(0) += ca * cb;
            }
        }
        Ok(WeightMultiset { rs: self.rs.clone(), counts })
    }

    fn expand_sorted(&self) -> Vec<&Weight> {
        let mut list = Vec::with_capacity(self.total() as usize);
        let mut keys: Vec<&Weight> = self.counts.keys().collect();
        keys.sort();
        for w in keys {
            for _ in 0..self.counts[w] {
                list.push(w);
            }
        }
        list
    }

    fn tuple_sums(&self, n: u32) -> HashMap<Weight, u64> {
        // Sums over strictly increasing index tuples of the expanded list;
        // this is the multiset of the n-th exterior power.
        let list = self.expand_sorted();
        let mut counts: HashMap<Weight, u64> = HashMap::new();
        match n {
            2 => {
                for i in 0..list.len() {
                    for j in i + 1..list.len() {
                        *counts.entry(list[i].add(list[j])).or_insert(0) += 1;
                    }
                }
            }
            3 => {
                for i in 0..list.len() {
                    for j in i + 1..list.len() {
                        let ij = list[i].add(list[j]);
                        for item in list.iter().skip(j + 1) {
                            *counts.entry(ij.add(item)).or_insert(0) += 1;
                        }
                    }
                }
            }
            _ => unreachable!("degree checked by callers"),
        }
        counts
    }

    /// Exterior power multiset, degree 2 or 3.
    pub fn exterior_power(&self, n: u32) -> Result<WeightMultiset, MultisetError> {
        if !(n == 2 || n == 3) {
            return Err(MultisetError::BadDegree(n));
        }
        if (n as u64) > self.total() {
            return Err(MultisetError::DegreeTooLarge(n, self.total()));
        }
        Ok(WeightMultiset { rs: self.rs.clone(), counts: self.tuple_sums(n) })
    }

    /// Multiset of the Frobenius twist: every weight scaled by p^n.
    pub fn frobenius_twist(&self, p: u64, n: u32) -> WeightMultiset {
        let factor = (p as i64).pow(n);
        let mut counts = HashMap::new();
        for (w, &c) in &self.counts {
            *counts.entry(w.scale(factor)).or_insert(0) += c;
        }
        WeightMultiset { rs: self.rs.clone(), counts }
    }

    /// Multiset of the third Lie power
    /// L^3 V = (Lambda^2 V tensor V) - Lambda^3 V, of size (d^3 - d)/3.
    pub fn lie3(&self) -> Result<WeightMultiset, MultisetError> {
        let ext2 = WeightMultiset { rs: self.rs.clone(), counts: self.tuple_sums(2) };
        let ext3 = WeightMultiset { rs: self.rs.clone(), counts: self.tuple_sums(3) };
        ext2.tensor(self)?.subtract(&ext3)
    }
}
