//! Composition factors of weight multisets by repeated peeling of the
//! dominance-maximal highest weight.
//!
//! The algorithm: find a dominant weight in the multiset that nothing
//! else dominates, record the irreducible with that highest weight,
//! subtract its full weight multiset, repeat until empty.  Multiplicity
//! data for the irreducibles comes from a pluggable oracle: exact
//! characteristic-zero recursion, or a table of Weyl-module
//! decompositions at a fixed prime.

use crate::multiset::{CharZeroSource, MultiplicitySource, MultisetError, WeightMultiset};
use crate::roots::{build_root_system, RootError, RootSystem, TypeLabel, Weight};
use num::ToPrimitive;
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FactorError {
    #[error(transparent)]
    Root(#[from] RootError),
    #[error(transparent)]
    Multiset(#[from] MultisetError),
    #[error("decomposition table line {line}: {detail}")]
    Parse { line: usize, detail: String },
    #[error("no decomposition row for {label}{rank} at p = {p} with highest weight ({lambda})")]
    MissingRow { label: TypeLabel, rank: usize, p: u64, lambda: String },
    #[error("decomposition table inconsistent: {0}")]
    Inconsistent(String),
    #[error("peel stuck: {remaining} weights left but none dominant")]
    NoDominantWeight { remaining: u64 },
    #[error("peel chose ({chosen}) but ({above}) strictly dominates it")]
    NotMaximal { chosen: String, above: String },
    #[error("peel reconstruction mismatch after removing factor ({chosen})")]
    Reconstruction { chosen: String },
}

fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

type GroupKey = (TypeLabel, usize, u64);

/// Weyl-module decompositions at specific primes, keyed by root system
/// and prime.  Each row lists the composition factors of V(lambda),
/// always including lambda itself once; all other factors are strictly
/// dominance-smaller, which grounds the recursion that recovers the
/// weight multiset of each irreducible.
pub struct ModularData {
    rows: HashMap<GroupKey, HashMap<Weight, Vec<(Weight, u64)>>>,
    /// Dimensions of the irreducibles, validated at load time.
    dims: HashMap<GroupKey, HashMap<Weight, u64>>,
}

fn parse_weight(text: &str, rank: usize, line: usize) -> Result<Weight, FactorError> {
    let coords: Result<Vec<i64>, _> = text.split(',').map(|c| c.trim().parse::<i64>()).collect();
    let coords = coords.map_err(|e| FactorError::Parse {
        line,
        detail: format!("bad weight '{}': {}", text.trim(), e),
    })?;
    if coords.len() != rank {
        return Err(FactorError::Parse {
            line,
            detail: format!("weight '{}' has {} coordinates, rank is {}", text.trim(), coords.len(), rank),
        });
    }
    Ok(Weight(coords))
}

impl ModularData {
    pub fn empty() -> Self {
        ModularData { rows: HashMap::new(), dims: HashMap::new() }
    }

    /// Parses the decomposition text format: one row per line,
    /// `TYPE RANK p : c1,..,cl -> c1,..,cl * mult ; ...`, with `#`
    /// starting a comment and `* 1` optional.  Validates every row and
    /// the dimension bookkeeping of every group before returning.
    pub fn parse(text: &str) -> Result<Self, FactorError> {
        let mut rows: HashMap<GroupKey, HashMap<Weight, Vec<(Weight, u64)>>> = HashMap::new();
        let mut systems: HashMap<(TypeLabel, usize), Arc<RootSystem>> = HashMap::new();

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (head, tail) = content.split_once(':').ok_or_else(|| FactorError::Parse {
                line,
                detail: "expected 'TYPE RANK p : ...'".to_string(),
            })?;
            let head_parts: Vec<&str> = head.split_whitespace().collect();
            if head_parts.len() != 3 {
                return Err(FactorError::Parse {
                    line,
                    detail: format!("header '{}' is not 'TYPE RANK p'", head.trim()),
                });
            }
            let label = head_parts[0]
                .chars()
                .next()
                .and_then(TypeLabel::from_char)
                .filter(|_| head_parts[0].len() == 1)
                .ok_or_else(|| FactorError::Parse {
                    line,
                    detail: format!("unknown type '{}'", head_parts[0]),
                })?;
            let rank: usize = head_parts[1].parse().map_err(|_| FactorError::Parse {
                line,
                detail: format!("bad rank '{}'", head_parts[1]),
            })?;
            let p: u64 = head_parts[2].parse().map_err(|_| FactorError::Parse {
                line,
                detail: format!("bad prime '{}'", head_parts[2]),
            })?;
            if !is_odd_prime(p) {
                return Err(FactorError::Parse {
                    line,
                    detail: format!("{} is not an odd prime", p),
                });
            }
            let rs = match systems.get(&(label, rank)) {
                Some(rs) => rs.clone(),
                None => {
                    let rs = Arc::new(build_root_system(label, rank)?);
                    systems.insert((label, rank), rs.clone());
                    rs
                }
            };

            let (lhs_text, rhs_text) = tail.split_once("->").ok_or_else(|| FactorError::Parse {
                line,
                detail: "expected '->' between the module and its factors".to_string(),
            })?;
            let lambda = parse_weight(lhs_text, rank, line)?;
            if !lambda.is_dominant() {
                return Err(FactorError::Parse {
                    line,
                    detail: format!("({}) is not dominant", lambda.coords_string()),
                });
            }

            let mut factors: Vec<(Weight, u64)> = Vec::new();
            for piece in rhs_text.split(';') {
                let piece = piece.trim();
                if piece.is_empty() {
                    return Err(FactorError::Parse { line, detail: "empty factor entry".to_string() });
                }
                let (wtext, mult) = match piece.split_once('*') {
                    Some((w, m)) => {
                        let mult: u64 = m.trim().parse().map_err(|_| FactorError::Parse {
                            line,
                            detail: format!("bad multiplicity '{}'", m.trim()),
                        })?;
                        (w, mult)
                    }
                    None => (piece, 1),
                };
                if mult == 0 {
                    return Err(FactorError::Parse { line, detail: "multiplicity 0".to_string() });
                }
                let mu = parse_weight(wtext, rank, line)?;
                if !mu.is_dominant() {
                    return Err(FactorError::Parse {
                        line,
                        detail: format!("factor ({}) is not dominant", mu.coords_string()),
                    });
                }
                if factors.iter().any(|(w, _)| *w == mu) {
                    return Err(FactorError::Parse {
                        line,
                        detail: format!("factor ({}) listed twice", mu.coords_string()),
                    });
                }
                factors.push((mu, mult));
            }

            match factors.iter().find(|(w, _)| *w == lambda) {
                Some((_, 1)) => {}
                Some((_, m)) => {
                    return Err(FactorError::Parse {
                        line,
                        detail: format!("({}) must appear with multiplicity 1, got {}", lambda.coords_string(), m),
                    });
                }
                None => {
                    return Err(FactorError::Parse {
                        line,
                        detail: format!("factors must include ({}) itself", lambda.coords_string()),
                    });
                }
            }
            for (mu, _) in &factors {
                if *mu != lambda && !rs.dominance_lt(mu, &lambda)? {
                    return Err(FactorError::Parse {
                        line,
                        detail: format!(
                            "factor ({}) is not strictly below ({}) in the dominance order",
                            mu.coords_string(),
                            lambda.coords_string()
                        ),
                    });
                }
            }

            let group = rows.entry((label, rank, p)).or_default();
            if group.insert(lambda.clone(), factors).is_some() {
                return Err(FactorError::Parse {
                    line,
                    detail: format!("duplicate row for ({})", lambda.coords_string()),
                });
            }
        }

        // Dimension bookkeeping per group: dim L(lambda) recursively,
        // every referenced factor must itself have a row, and each
        // irreducible dimension must be positive.
        let mut dims: HashMap<GroupKey, HashMap<Weight, u64>> = HashMap::new();
        for (key, group) in &rows {
            let rs = systems.get(&(key.0, key.1)).expect("system cached during parse");
            let mut group_dims: HashMap<Weight, u64> = HashMap::new();
            let lambdas: Vec<Weight> = group.keys().cloned().collect();
            for lambda in &lambdas {
                Self::dim_of(rs, group, key, lambda, &mut group_dims)?;
            }
            dims.insert(*key, group_dims);
        }

        Ok(ModularData { rows, dims })
    }

    fn dim_of(
        rs: &Arc<RootSystem>,
        group: &HashMap<Weight, Vec<(Weight, u64)>>,
        key: &GroupKey,
        lambda: &Weight,
        out: &mut HashMap<Weight, u64>,
    ) -> Result<u64, FactorError> {
        if let Some(&d) = out.get(lambda) {
            return Ok(d);
        }
        let row = group.get(lambda).ok_or_else(|| FactorError::MissingRow {
            label: key.0,
            rank: key.1,
            p: key.2,
            lambda: lambda.coords_string(),
        })?;
        let weyl: u64 = rs
            .weyl_dim(lambda)?
            .to_u64()
            .ok_or_else(|| FactorError::Inconsistent(format!("dimension of ({}) overflows", lambda.coords_string())))?;
        let mut dim = weyl as i128;
        for (mu, mult) in row {
            if mu == lambda {
                continue;
            }
            // Strict dominance descent makes this recursion well-founded.
            let sub = Self::dim_of(rs, group, key, mu, out)? as i128;
            dim -= *mult as i128 * sub;
        }
        if dim < 1 {
            return Err(FactorError::Inconsistent(format!(
                "row for ({}) at p = {} gives a factor of dimension {}",
                lambda.coords_string(),
                key.2,
                dim
            )));
        }
        let dim = dim as u64;
        out.insert(lambda.clone(), dim);
        Ok(dim)
    }

    pub fn row(&self, label: TypeLabel, rank: usize, p: u64, lambda: &Weight) -> Option<&[(Weight, u64)]> {
        self.rows.get(&(label, rank, p)).and_then(|g| g.get(lambda)).map(|v| v.as_slice())
    }

    pub fn has_group(&self, label: TypeLabel, rank: usize, p: u64) -> bool {
        self.rows.contains_key(&(label, rank, p))
    }

    /// Dimension of the irreducible with the given highest weight at p,
    /// if a row for it was loaded.
    pub fn dim(&self, label: TypeLabel, rank: usize, p: u64, lambda: &Weight) -> Option<u64> {
        self.dims.get(&(label, rank, p)).and_then(|g| g.get(lambda)).copied()
    }

    /// Primes with at least one row for the given root system.
    pub fn primes_for(&self, label: TypeLabel, rank: usize) -> Vec<u64> {
        let mut ps: Vec<u64> = self
            .rows
            .keys()
            .filter(|(l, r, _)| *l == label && *r == rank)
            .map(|(_, _, p)| *p)
            .collect();
        ps.sort_unstable();
        ps
    }
}

/// Multiplicity oracle: characteristic zero, or a fixed prime backed by
/// Weyl-module decomposition rows.
pub enum MultiplicityOracle {
    CharZero,
    Modular {
        p: u64,
        data: Arc<ModularData>,
        cache: Mutex<HashMap<(TypeLabel, usize, Weight), Arc<BTreeMap<Weight, u64>>>>,
    },
}

impl MultiplicityOracle {
    pub fn char_zero() -> Self {
        MultiplicityOracle::CharZero
    }

    pub fn modular(data: Arc<ModularData>, p: u64) -> Result<Self, FactorError> {
        if !is_odd_prime(p) {
            return Err(FactorError::Inconsistent(format!("{} is not an odd prime", p)));
        }
        Ok(MultiplicityOracle::Modular { p, data, cache: Mutex::new(HashMap::new()) })
    }

    pub fn describe(&self) -> String {
        match self {
            MultiplicityOracle::CharZero => "characteristic 0".to_string(),
            MultiplicityOracle::Modular { p, .. } => format!("characteristic {}", p),
        }
    }

    pub fn prime(&self) -> Option<u64> {
        match self {
            MultiplicityOracle::CharZero => None,
            MultiplicityOracle::Modular { p, .. } => Some(*p),
        }
    }

    /// Dominant multiplicity map of the irreducible L(lambda) in the
    /// oracle's characteristic.  In modular mode this is the Weyl-module
    /// map minus the co-factors' maps, recursively.
    fn dominant_map(&self, rs: &Arc<RootSystem>, lambda: &Weight) -> Result<Arc<BTreeMap<Weight, u64>>, FactorError> {
        match self {
            MultiplicityOracle::CharZero => Ok(rs.freudenthal(lambda)?),
            MultiplicityOracle::Modular { p, data, cache } => {
                let key = (rs.label(), rs.rank(), lambda.clone());
                if let Some(hit) = cache.lock().unwrap().get(&key) {
                    return Ok(hit.clone());
                }
                let row = data
                    .row(rs.label(), rs.rank(), *p, lambda)
                    .ok_or_else(|| FactorError::MissingRow {
                        label: rs.label(),
                        rank: rs.rank(),
                        p: *p,
                        lambda: lambda.coords_string(),
                    })?
                    .to_vec();
                let mut acc: BTreeMap<Weight, i128> = rs
                    .freudenthal(lambda)?
                    .iter()
                    .map(|(w, &m)| (w.clone(), m as i128))
                    .collect();
                for (mu, mult) in &row {
                    if mu == lambda {
                        continue;
                    }
                    let sub = self.dominant_map(rs, mu)?;
                    for (w, &m) in sub.iter() {
                        *acc.entry(w.clone()).or_insert(0) -= *mult as i128 * m as i128;
                    }
                }
                let mut out: BTreeMap<Weight, u64> = BTreeMap::new();
                for (w, m) in acc {
                    if m < 0 {
                        return Err(FactorError::Inconsistent(format!(
                            "row for ({}) at p = {} drives the multiplicity of ({}) to {}",
                            lambda.coords_string(),
                            p,
                            w.coords_string(),
                            m
                        )));
                    }
                    if m > 0 {
                        out.insert(w, m as u64);
                    }
                }
                if out.get(lambda) != Some(&1) {
                    return Err(FactorError::Inconsistent(format!(
                        "highest weight ({}) lost its multiplicity-1 entry at p = {}",
                        lambda.coords_string(),
                        p
                    )));
                }
                // Cross-check against the dimension validated at load.
                let mut total: u128 = 0;
                for (w, &m) in out.iter() {
                    total += rs.orbit_size(w)? as u128 * m as u128;
                }
                let expected = data.dim(rs.label(), rs.rank(), *p, lambda).unwrap_or(0) as u128;
                if total != expected {
                    return Err(FactorError::Inconsistent(format!(
                        "multiset of ({}) at p = {} has size {}, dimension bookkeeping says {}",
                        lambda.coords_string(),
                        p,
                        total,
                        expected
                    )));
                }
                let arc = Arc::new(out);
                cache.lock().unwrap().insert(key, arc.clone());
                Ok(arc)
            }
        }
    }
}

impl MultiplicitySource for MultiplicityOracle {
    fn dominant_multiplicities(
        &self,
        rs: &Arc<RootSystem>,
        lambda: &Weight,
    ) -> Result<BTreeMap<Weight, u64>, MultisetError> {
        match self {
            MultiplicityOracle::CharZero => CharZeroSource.dominant_multiplicities(rs, lambda),
            MultiplicityOracle::Modular { .. } => self
                .dominant_map(rs, lambda)
                .map(|m| m.as_ref().clone())
                .map_err(|e| MultisetError::Oracle(e.to_string())),
        }
    }

    fn describe(&self) -> String {
        MultiplicityOracle::describe(self)
    }
}

/// Weight multiset of one irreducible in the oracle's characteristic.
pub fn irreducible_multiset(
    rs: &Arc<RootSystem>,
    lambda: &Weight,
    oracle: &MultiplicityOracle,
) -> Result<WeightMultiset, FactorError> {
    Ok(WeightMultiset::from_irreducible(rs, lambda, oracle)?)
}

/// Which of the two lexicographic extremes to pick when several dominant
/// weights are simultaneously maximal.  Any maximal choice is valid, so
/// results must not depend on this; tests exercise both.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TieBreak {
    LexHigh,
    LexLow,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorEntry {
    pub highest_weight: Weight,
    pub dim: u64,
    pub multiplicity: u64,
}

/// The outcome of a complete peel: factors by descending highest weight
/// (descending height, then descending lexicographic among equals).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompositionFactors {
    pub entries: Vec<FactorEntry>,
    pub multiplicity_free: bool,
}

impl CompositionFactors {
    pub fn total_dim(&self) -> u64 {
        self.entries.iter().map(|e| e.dim * e.multiplicity).sum()
    }

    /// Compact rendering like `(0,1) x1 dim 14; (1,0) x1 dim 7`.
    pub fn summary(&self) -> String {
        self.entries
            .iter()
            .map(|e| format!("({}) x{} dim {}", e.highest_weight.coords_string(), e.multiplicity, e.dim))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

pub fn peel(target: &WeightMultiset, oracle: &MultiplicityOracle) -> Result<CompositionFactors, FactorError> {
    peel_with(target, oracle, TieBreak::LexHigh)
}

pub fn peel_with(
    target: &WeightMultiset,
    oracle: &MultiplicityOracle,
    tie: TieBreak,
) -> Result<CompositionFactors, FactorError> {
    let rs = target.system().clone();
    let mut diff = target.clone();
    let mut recorded: Vec<(Weight, WeightMultiset)> = Vec::new();

    while !diff.is_empty() {
        let dominant = diff.dominant_entries();
        if dominant.is_empty() {
            return Err(FactorError::NoDominantWeight { remaining: diff.total() });
        }
        let mut maximal: Vec<&Weight> = Vec::new();
        'cand: for (w, _) in &dominant {
            for (other, _) in &dominant {
                if other != w && rs.dominance_lt(w, other)? {
                    continue 'cand;
                }
            }
            maximal.push(w);
        }
        let chosen = match tie {
            TieBreak::LexHigh => maximal.iter().max(),
            TieBreak::LexLow => maximal.iter().min(),
        }
        .expect("dominant set nonempty")
        .to_owned()
        .clone();

        // The chosen weight must be maximal in the whole multiset, not
        // just among the dominant ones; a violation means the input is
        // not a difference of full modules.
        for (w, _) in diff.entries_sorted() {
            if rs.dominance_lt(&chosen, &w)? {
                return Err(FactorError::NotMaximal {
                    chosen: chosen.coords_string(),
                    above: w.coords_string(),
                });
            }
        }

        let factor = irreducible_multiset(&rs, &chosen, oracle)?;
        diff = diff.subtract(&factor)?;
        recorded.push((chosen.clone(), factor));

        // Reconstruction invariant, recomputed from scratch: recorded
        // factors plus the remaining difference restore the target.
        let mut rebuilt = diff.clone();
        for (_, m) in &recorded {
            rebuilt = rebuilt.add(m)?;
        }
        if rebuilt.entries_sorted() != target.entries_sorted() {
            return Err(FactorError::Reconstruction { chosen: chosen.coords_string() });
        }
    }

    // Merge repeats, then order by descending highest weight.
    let mut merged: BTreeMap<Weight, (u64, u64)> = BTreeMap::new();
    for (w, m) in recorded {
        let dim = m.total();
        let e = merged.entry(w).or_insert((dim, 0));
        e.1 += 1;
    }
    let mut entries: Vec<FactorEntry> = merged
        .into_iter()
        .map(|(w, (dim, mult))| FactorEntry { highest_weight: w, dim, multiplicity: mult })
        .collect();
    let height = |w: &Weight| -> crate::rational::Rat {
        rs.root_coords(w).into_iter().sum()
    };
    entries.sort_by(|a, b| {
        height(&b.highest_weight)
            .cmp(&height(&a.highest_weight))
            .then_with(|| b.highest_weight.cmp(&a.highest_weight))
    });
    let multiplicity_free = entries.iter().all(|e| e.multiplicity == 1);
    Ok(CompositionFactors { entries, multiplicity_free })
}

/// The two Lie powers whose factor tables the pipeline reproduces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PowerKind {
    ExteriorSquare,
    LieCube,
}

impl PowerKind {
    pub fn apply(&self, v: &WeightMultiset) -> Result<WeightMultiset, MultisetError> {
        match self {
            PowerKind::ExteriorSquare => v.exterior_power(2),
            PowerKind::LieCube => v.lie3(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PowerKind::ExteriorSquare => "exterior square",
            PowerKind::LieCube => "third Lie power",
        }
    }
}

/// Prime regime of one table row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    Generic,
    Prime(u64),
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::Generic => write!(f, "generic p"),
            Regime::Prime(p) => write!(f, "p = {}", p),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteRow {
    pub regime: Regime,
    pub module_dim: u64,
    pub target_dim: u64,
    pub factors: CompositionFactors,
}

/// One table row: build the module's multiset in the regime's
/// characteristic, take the power, peel.
pub fn table_row(
    rs: &Arc<RootSystem>,
    lambda: &Weight,
    power: PowerKind,
    regime: Regime,
    data: Option<&Arc<ModularData>>,
) -> Result<SuiteRow, FactorError> {
    let oracle = match regime {
        Regime::Generic => MultiplicityOracle::char_zero(),
        Regime::Prime(p) => {
            let data = data.ok_or_else(|| {
                FactorError::Inconsistent(format!("p = {} requested but no decomposition data supplied", p))
            })?;
            MultiplicityOracle::modular(data.clone(), p)?
        }
    };
    let v = irreducible_multiset(rs, lambda, &oracle)?;
    let target = power.apply(&v)?;
    let factors = peel(&target, &oracle)?;
    Ok(SuiteRow { regime, module_dim: v.total(), target_dim: target.total(), factors })
}

/// All rows of one table, one per regime.
pub fn table_suite(
    rs: &Arc<RootSystem>,
    lambda: &Weight,
    power: PowerKind,
    regimes: &[Regime],
    data: Option<&Arc<ModularData>>,
) -> Result<Vec<SuiteRow>, FactorError> {
    regimes.iter().map(|&r| table_row(rs, lambda, power, r, data)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn system(label: TypeLabel, rank: usize) -> Arc<RootSystem> {
        Arc::new(build_root_system(label, rank).unwrap())
    }

    fn entry(coords: &[i64], dim: u64, mult: u64) -> FactorEntry {
        FactorEntry { highest_weight: Weight(coords.to_vec()), dim, multiplicity: mult }
    }

    const G2_P3: &str = "\n# two rows\nG 2 3 : 0,1 -> 0,1 ; 1,0\nG 2 3 : 1,0 -> 1,0\nG 2 3 : 0,0 -> 0,0\n";

    #[test]
    fn modular_parse_and_dims() {
        let data = ModularData::parse(G2_P3).unwrap();
        assert!(data.has_group(TypeLabel::G, 2, 3));
        assert_eq!(data.dim(TypeLabel::G, 2, 3, &Weight(vec![0, 1])), Some(7));
        assert_eq!(data.dim(TypeLabel::G, 2, 3, &Weight(vec![1, 0])), Some(7));
        assert_eq!(data.primes_for(TypeLabel::G, 2), vec![3]);
    }

    #[test]
    fn modular_parse_rejects_bad_rows() {
        // Factor above the module's highest weight.
        assert!(ModularData::parse("G 2 3 : 1,0 -> 1,0 ; 0,1\n").is_err());
        // Missing the module itself.
        assert!(ModularData::parse("G 2 3 : 0,1 -> 1,0\n").is_err());
        // Referenced factor without a row of its own.
        assert!(ModularData::parse("G 2 3 : 0,1 -> 0,1 ; 1,0\n").is_err());
        // Even characteristic.
        assert!(ModularData::parse("G 2 2 : 1,0 -> 1,0\n").is_err());
        // Dimension overdraw: claimed factors exceed the Weyl module.
        assert!(ModularData::parse("G 2 3 : 0,1 -> 0,1 ; 1,0 * 2\nG 2 3 : 1,0 -> 1,0\n").is_err());
    }

    #[test]
    fn modular_irreducible_multisets() {
        let g2 = system(TypeLabel::G, 2);
        let data = Arc::new(ModularData::parse(G2_P3).unwrap());
        let oracle = MultiplicityOracle::modular(data, 3).unwrap();
        let adj = irreducible_multiset(&g2, &Weight(vec![0, 1]), &oracle).unwrap();
        assert_eq!(adj.total(), 7);
        // The 14-dimensional module loses exactly the short-root orbit
        // and the zero weight keeps multiplicity 1.
        assert_eq!(adj.count(&Weight(vec![0, 0])), 1);
        assert_eq!(adj.count(&Weight(vec![1, 0])), 0);
        let nat = irreducible_multiset(&g2, &Weight(vec![1, 0]), &oracle).unwrap();
        assert_eq!(nat.total(), 7);
    }

    #[test]
    fn peel_single_irreducible() {
        let g2 = system(TypeLabel::G, 2);
        let oracle = MultiplicityOracle::char_zero();
        let adj = irreducible_multiset(&g2, &Weight(vec![0, 1]), &oracle).unwrap();
        let out = peel(&adj, &oracle).unwrap();
        assert_eq!(out.entries, vec![entry(&[0, 1], 14, 1)]);
        assert!(out.multiplicity_free);
    }

    #[test]
    fn peel_g2_exterior_square_generic() {
        let g2 = system(TypeLabel::G, 2);
        let oracle = MultiplicityOracle::char_zero();
        let v = irreducible_multiset(&g2, &Weight(vec![1, 0]), &oracle).unwrap();
        let out = peel(&v.exterior_power(2).unwrap(), &oracle).unwrap();
        assert_eq!(out.entries, vec![entry(&[0, 1], 14, 1), entry(&[1, 0], 7, 1)]);
        assert!(out.multiplicity_free);
        assert_eq!(out.total_dim(), 21);
    }

    #[test]
    fn peel_g2_exterior_square_char3() {
        let g2 = system(TypeLabel::G, 2);
        let data = Arc::new(ModularData::parse(G2_P3).unwrap());
        let oracle = MultiplicityOracle::modular(data, 3).unwrap();
        let v = irreducible_multiset(&g2, &Weight(vec![1, 0]), &oracle).unwrap();
        let out = peel(&v.exterior_power(2).unwrap(), &oracle).unwrap();
        assert_eq!(out.entries, vec![entry(&[0, 1], 7, 1), entry(&[1, 0], 7, 2)]);
        assert!(!out.multiplicity_free);
    }

    #[test]
    fn peel_e6_exterior_square_irreducible() {
        let e6 = system(TypeLabel::E, 6);
        let oracle = MultiplicityOracle::char_zero();
        let v = irreducible_multiset(&e6, &Weight(vec![1, 0, 0, 0, 0, 0]), &oracle).unwrap();
        let out = peel(&v.exterior_power(2).unwrap(), &oracle).unwrap();
        assert_eq!(out.entries, vec![entry(&[0, 0, 1, 0, 0, 0], 351, 1)]);
    }

    #[test]
    fn peel_f4_exterior_square_generic() {
        let f4 = system(TypeLabel::F, 4);
        let oracle = MultiplicityOracle::char_zero();
        let v = irreducible_multiset(&f4, &Weight(vec![0, 0, 0, 1]), &oracle).unwrap();
        let out = peel(&v.exterior_power(2).unwrap(), &oracle).unwrap();
        assert_eq!(out.entries, vec![entry(&[0, 0, 1, 0], 273, 1), entry(&[1, 0, 0, 0], 52, 1)]);
    }

    #[test]
    fn tie_break_direction_is_irrelevant() {
        let g2 = system(TypeLabel::G, 2);
        let oracle = MultiplicityOracle::char_zero();
        let v = irreducible_multiset(&g2, &Weight(vec![1, 0]), &oracle).unwrap();
        let t = v.exterior_power(2).unwrap();
        let hi = peel_with(&t, &oracle, TieBreak::LexHigh).unwrap();
        let lo = peel_with(&t, &oracle, TieBreak::LexLow).unwrap();
        assert_eq!(hi, lo);
    }

    #[test]
    fn table_row_reports_regimes() {
        let g2 = system(TypeLabel::G, 2);
        let data = Arc::new(ModularData::parse(G2_P3).unwrap());
        let rows = table_suite(
            &g2,
            &Weight(vec![1, 0]),
            PowerKind::ExteriorSquare,
            &[Regime::Prime(3), Regime::Generic],
            Some(&data),
        )
        .unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].module_dim, 7);
        assert_eq!(rows[0].target_dim, 21);
        assert!(!rows[0].factors.multiplicity_free);
        assert!(rows[1].factors.multiplicity_free);
    }

    #[test]
    fn bundled_decomposition_data_validates() {
        let text = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/modular.txt"));
        let data = ModularData::parse(text).unwrap();
        let dim = |l: TypeLabel, r: usize, p: u64, c: &[i64]| data.dim(l, r, p, &Weight(c.to_vec())).unwrap();
        assert_eq!(dim(TypeLabel::G, 2, 3, &[0, 1]), 7);
        assert_eq!(dim(TypeLabel::F, 4, 3, &[0, 1, 0, 0]), 1222);
        assert_eq!(dim(TypeLabel::F, 4, 3, &[0, 0, 1, 0]), 196);
        assert_eq!(dim(TypeLabel::F, 4, 3, &[0, 0, 0, 1]), 25);
        assert_eq!(dim(TypeLabel::E, 6, 3, &[1, 0, 1, 0, 0, 0]), 2404);
        assert_eq!(dim(TypeLabel::E, 6, 3, &[0, 0, 0, 1, 0, 0]), 2771);
        assert_eq!(dim(TypeLabel::E, 6, 3, &[1, 0, 0, 0, 0, 1]), 572);
        assert_eq!(dim(TypeLabel::E, 6, 3, &[0, 1, 0, 0, 0, 0]), 77);
        assert_eq!(dim(TypeLabel::E, 6, 5, &[1, 0, 1, 0, 0, 0]), 5746);
        assert_eq!(dim(TypeLabel::E, 7, 3, &[0, 0, 0, 0, 0, 1, 1]), 24264);
        assert_eq!(dim(TypeLabel::E, 7, 3, &[0, 0, 0, 0, 1, 0, 0]), 25896);
        assert_eq!(dim(TypeLabel::E, 7, 3, &[0, 1, 0, 0, 0, 0, 0]), 856);
        assert_eq!(dim(TypeLabel::E, 7, 7, &[1, 0, 0, 0, 0, 0, 1]), 5568);
        assert_eq!(dim(TypeLabel::E, 7, 7, &[0, 0, 0, 0, 0, 1, 0]), 1538);
        assert_eq!(dim(TypeLabel::E, 7, 11, &[0, 0, 0, 0, 0, 1, 1]), 44592);
        assert_eq!(dim(TypeLabel::E, 7, 19, &[1, 0, 0, 0, 0, 0, 1]), 6424);
        assert_eq!(dim(TypeLabel::E, 8, 3, &[0, 0, 0, 0, 0, 0, 1, 0]), 30132);
        assert_eq!(dim(TypeLabel::E, 8, 5, &[0, 0, 0, 0, 0, 0, 1, 0]), 30132);
        let mut c28 = vec![0i64; 28];
        c28[0] = 1;
        c28[1] = 1;
        assert_eq!(data.dim(TypeLabel::C, 28, 19, &Weight(c28)).unwrap(), 58408);
    }

    #[test]
    fn missing_row_is_loud() {
        let g2 = system(TypeLabel::G, 2);
        let data = Arc::new(ModularData::parse("G 2 3 : 0,0 -> 0,0\n").unwrap());
        let oracle = MultiplicityOracle::modular(data, 3).unwrap();
        let got = irreducible_multiset(&g2, &Weight(vec![1, 0]), &oracle);
        assert!(matches!(got, Err(FactorError::Multiset(_))));
    }

    #[test]
    fn peel_rejects_mangled_input() {
        // Deleting one weight from a genuine exterior square leaves a
        // multiset that is not a sum of modules; the peel must notice.
        let g2 = system(TypeLabel::G, 2);
        let oracle = MultiplicityOracle::char_zero();
        let v = irreducible_multiset(&g2, &Weight(vec![1, 0]), &oracle).unwrap();
        let t = v.exterior_power(2).unwrap();
        let mut counts: HashMap<Weight, u64> =
            t.entries_sorted().into_iter().collect();
        counts.remove(&Weight(vec![0, 1]));
        let mangled = WeightMultiset::from_counts(g2.clone(), counts);
        assert_eq!(mangled.total(), 20);
        assert!(peel(&mangled, &oracle).is_err());
    }
}
