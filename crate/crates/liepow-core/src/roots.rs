//! Root systems of types A-G and their weight combinatorics.
//!
//! Weights are stored in fundamental-weight coordinates: `Weight(c)` means
//! sum c_i * omega_i.  The Cartan matrix convention is
//! A_ij = <alpha_i, alpha_j^vee>, so the i-th simple root written in
//! fundamental-weight coordinates is the i-th row of A.  Node numbering
//! follows the standard Bourbaki labelling.  All public indices are
//! 0-based; the textual forms "l1", "l2", ... used by parsers and reports
//! are 1-based.

use crate::rational::{rat, Rat, RatMatrix};
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Mutex;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RootError {
    #[error("unsupported root system {0}{1}")]
    UnsupportedType(char, usize),
    #[error("weight rank {got} does not match root system rank {rank}")]
    RankMismatch { got: usize, rank: usize },
    #[error("simple root index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("weight {0} is not dominant")]
    NotDominant(String),
}

/// Lie type label A..G.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TypeLabel {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl TypeLabel {
    pub fn from_char(c: char) -> Option<TypeLabel> {
        match c.to_ascii_uppercase() {
            'A' => Some(TypeLabel::A),
            'B' => Some(TypeLabel::B),
            'C' => Some(TypeLabel::C),
            'D' => Some(TypeLabel::D),
            'E' => Some(TypeLabel::E),
            'F' => Some(TypeLabel::F),
            'G' => Some(TypeLabel::G),
            _ => None,
        }
    }

    pub fn as_char(&self) -> char {
        match self {
            TypeLabel::A => 'A',
            TypeLabel::B => 'B',
            TypeLabel::C => 'C',
            TypeLabel::D => 'D',
            TypeLabel::E => 'E',
            TypeLabel::F => 'F',
            TypeLabel::G => 'G',
        }
    }
}

impl fmt::Display for TypeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// A weight in fundamental-weight coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Weight(pub Vec<i64>);

impl Weight {
    pub fn zero(rank: usize) -> Weight {
        Weight(vec![0; rank])
    }

    /// omega_{i+1} in 1-based naming: `fundamental(rank, 0)` is l1.
    pub fn fundamental(rank: usize, i: usize) -> Weight {
        let mut c = vec![0; rank];
        c[i] = 1;
        Weight(c)
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn is_dominant(&self) -> bool {
        self.0.iter().all(|&c| c >= 0)
    }

    pub fn add(&self, other: &Weight) -> Weight {
        Weight(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Weight) -> Weight {
        Weight(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: i64) -> Weight {
        Weight(self.0.iter().map(|c| c * k).collect())
    }

    /// Comma-separated coordinate form, e.g. "1,0".
    pub fn coords_string(&self) -> String {
        self.0.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
    }

    /// Short human form: "0", "l2", "l1+l7", "3*l1", "l1+2*l3".
    pub fn pretty(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (i, &c) in self.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let base = format!("l{}", i + 1);
            if c == 1 {
                parts.push(base);
            } else {
                parts.push(format!("{}*{}", c, base));
            }
        }
        parts.join("+")
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.coords_string())
    }
}

fn cartan_matrix(label: TypeLabel, rank: usize) -> Result<Vec<Vec<i64>>, RootError> {
    let err = || RootError::UnsupportedType(label.as_char(), rank);
    let mut a = vec![vec![0i64; rank]; rank];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = 2;
    }
    let link = |a: &mut Vec<Vec<i64>>, i: usize, j: usize, ij: i64, ji: i64| {
        a[i][j] = ij;
        a[j][i] = ji;
    };
    match label {
        TypeLabel::A => {
            if rank < 1 {
                return Err(err());
            }
            for i in 0..rank.saturating_sub(1) {
                link(&mut a, i, i + 1, -1, -1);
            }
        }
        TypeLabel::B => {
            // alpha_rank short; <alpha_{l-1}, alpha_l^vee> = -2.
            if rank < 2 {
                return Err(err());
            }
            for i in 0..rank - 2 {
                link(&mut a, i, i + 1, -1, -1);
            }
            link(&mut a, rank - 2, rank - 1, -2, -1);
        }
        TypeLabel::C => {
            // alpha_rank long; <alpha_{l-1}, alpha_l^vee> = -1.
            if rank < 2 {
                return Err(err());
            }
            for i in 0..rank - 2 {
                link(&mut a, i, i + 1, -1, -1);
            }
            link(&mut a, rank - 2, rank - 1, -1, -2);
        }
        TypeLabel::D => {
            if rank < 3 {
                return Err(err());
            }
            for i in 0..rank - 3 {
                link(&mut a, i, i + 1, -1, -1);
            }
            link(&mut a, rank - 3, rank - 2, -1, -1);
            link(&mut a, rank - 3, rank - 1, -1, -1);
        }
        TypeLabel::E => {
            // Bourbaki: chain 1-3-4-5-6(-7)(-8), node 2 attached to node 4.
            if !(6..=8).contains(&rank) {
                return Err(err());
            }
            let chain: Vec<usize> = std::iter::once(0).chain(2..rank).collect();
            for w in chain.windows(2) {
                link(&mut a, w[0], w[1], -1, -1);
            }
            link(&mut a, 1, 3, -1, -1);
        }
        TypeLabel::F => {
            if rank != 4 {
                return Err(err());
            }
            link(&mut a, 0, 1, -1, -1);
            link(&mut a, 1, 2, -2, -1);
            link(&mut a, 2, 3, -1, -1);
        }
        TypeLabel::G => {
            // alpha_1 short, alpha_2 long.
            if rank != 2 {
                return Err(err());
            }
            link(&mut a, 0, 1, -1, -3);
        }
    }
    Ok(a)
}

/// Root lengths d_i = (alpha_i, alpha_i)/2 normalised so short roots get 1,
/// recovered from the symmetrisability of the Cartan matrix.
fn length_vector(a: &[Vec<i64>]) -> Vec<i64> {
    let rank = a.len();
    let mut d = vec![Rat::zero(); rank];
    d[0] = Rat::one();
    let mut seen = vec![false; rank];
    seen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for j in 0..rank {
            if i != j && a[i][j] != 0 && !seen[j] {
                // d_j / d_i = A_ji / A_ij.
                d[j] = &d[i] * rat(a[j][i]) / rat(a[i][j]);
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    assert!(seen.iter().all(|&s| s), "Dynkin diagram must be connected");
    let min = d.iter().min().unwrap().clone();
    d.iter()
        .map(|x| {
            let r = x / &min;
            assert!(r.is_integer(), "non-integral length ratio");
            r.to_integer().to_i64().unwrap()
        })
        .collect()
}

/// An irreducible root system with everything precomputed that the weight
/// algorithms need; caches Weyl orbits and dominant multiplicity maps.
pub struct RootSystem {
    label: TypeLabel,
    rank: usize,
    cartan: Vec<Vec<i64>>,
    /// Inverse Cartan matrix; root coordinates of w are w * cartan_inv.
    cartan_inv: RatMatrix,
    /// cartan_inv times a positive integer, for sign tests without rationals.
    scaled_inv: Vec<Vec<i64>>,
    /// d_i = (alpha_i, alpha_i)/2 with short roots normalised to 1.
    d: Vec<i64>,
    /// Positive roots in simple-root coordinates, by increasing height.
    positive_roots: Vec<Vec<i64>>,
    /// The same roots in fundamental-weight coordinates.
    positive_roots_fw: Vec<Weight>,
    rho: Weight,
    orbit_cache: Mutex<HashMap<Weight, std::sync::Arc<Vec<Weight>>>>,
    freudenthal_cache: Mutex<HashMap<Weight, std::sync::Arc<BTreeMap<Weight, u64>>>>,
}

impl fmt::Debug for RootSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RootSystem({}{})", self.label, self.rank)
    }
}

pub fn build_root_system(label: TypeLabel, rank: usize) -> Result<RootSystem, RootError> {
    let cartan = cartan_matrix(label, rank)?;
    let d = length_vector(&cartan);
    let cartan_inv = RatMatrix::from_int_rows(&cartan)
        .inverse()
        .expect("Cartan matrices are invertible");
    let denom_lcm = (0..rank)
        .flat_map(|i| (0..rank).map(move |j| (i, j)))
        .fold(num::BigInt::from(1), |acc, (i, j)| {
            num::integer::lcm(acc, cartan_inv.get(i, j).denom().clone())
        });
    let scaled_inv: Vec<Vec<i64>> = (0..rank)
        .map(|i| {
            (0..rank)
                .map(|j| {
                    let x = cartan_inv.get(i, j) * crate::rational::Rat::from(denom_lcm.clone());
                    assert!(x.is_integer());
                    use num::ToPrimitive;
                    x.to_integer().to_i64().expect("scaled inverse entry fits i64")
                })
                .collect()
        })
        .collect();

    // Positive-root closure by height.  For a root r and simple root
    // alpha_i, r + alpha_i is a root iff p > <r, alpha_i^vee> - ... more
    // precisely the string r - p*alpha_i ... r + q*alpha_i satisfies
    // p - q = <r, alpha_i^vee>, so q = p - pairing and we extend iff q >= 1.
    let mut set: HashSet<Vec<i64>> = HashSet::new();
    let mut frontier: Vec<Vec<i64>> = Vec::new();
    for i in 0..rank {
        let mut e = vec![0i64; rank];
        e[i] = 1;
        set.insert(e.clone());
        frontier.push(e);
    }
    let mut all = frontier.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for r in &frontier {
            for i in 0..rank {
                let pairing: i64 = (0..rank).map(|j| r[j] * cartan[j][i]).sum();
                let mut p = 0i64;
                let mut down = r.clone();
                loop {
                    down[i] -= 1;
                    if down.iter().all(|&x| x == 0) || !set.contains(&down) {
                        break;
                    }
                    p += 1;
                }
                if p - pairing >= 1 {
                    let mut up = r.clone();
                    up[i] += 1;
                    if set.insert(up.clone()) {
                        next.push(up.clone());
                        all.push(up);
                    }
                }
            }
        }
        frontier = next;
    }
    all.sort_by_key(|r| (r.iter().sum::<i64>(), r.clone()));

    let positive_roots_fw = all
        .iter()
        .map(|n| {
            Weight(
                (0..rank)
                    .map(|j| (0..rank).map(|i| n[i] * cartan[i][j]).sum())
                    .collect(),
            )
        })
        .collect();

    Ok(RootSystem {
        label,
        rank,
        cartan,
        cartan_inv,
        scaled_inv,
        d,
        positive_roots: all,
        positive_roots_fw,
        rho: Weight(vec![1; rank]),
        orbit_cache: Mutex::new(HashMap::new()),
        freudenthal_cache: Mutex::new(HashMap::new()),
    })
}

impl RootSystem {
    pub fn label(&self) -> TypeLabel {
        self.label
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn cartan(&self) -> &Vec<Vec<i64>> {
        &self.cartan
    }

    pub fn rho(&self) -> &Weight {
        &self.rho
    }

    pub fn num_positive_roots(&self) -> usize {
        self.positive_roots.len()
    }

    pub fn positive_roots(&self) -> &[Vec<i64>] {
        &self.positive_roots
    }

    pub fn positive_roots_fw(&self) -> &[Weight] {
        &self.positive_roots_fw
    }

    pub fn check_rank(&self, w: &Weight) -> Result<(), RootError> {
        if w.rank() != self.rank {
            return Err(RootError::RankMismatch { got: w.rank(), rank: self.rank });
        }
        Ok(())
    }

    /// s_i(w) = w - <w, alpha_i^vee> alpha_i; in coordinates
    /// c'_j = c_j - c_i * A_ij.
    pub fn simple_reflection(&self, i: usize, w: &Weight) -> Result<Weight, RootError> {
        self.check_rank(w)?;
        if i >= self.rank {
            return Err(RootError::IndexOutOfRange(i));
        }
        let ci = w.0[i];
        let mut out = w.0.clone();
        for j in 0..self.rank {
            out[j] -= ci * self.cartan[i][j];
        }
        Ok(Weight(out))
    }

    /// The dominant representative of the Weyl orbit of `w`.
    pub fn dominant_rep(&self, w: &Weight) -> Weight {
        let mut cur = w.clone();
        loop {
            match cur.0.iter().position(|&c| c < 0) {
                None => return cur,
                Some(i) => {
                    let ci = cur.0[i];
                    for j in 0..self.rank {
                        cur.0[j] -= ci * self.cartan[i][j];
                    }
                }
            }
        }
    }

    /// Full Weyl orbit, sorted; exactly one member is dominant.
    pub fn weyl_orbit(&self, w: &Weight) -> Result<std::sync::Arc<Vec<Weight>>, RootError> {
        self.check_rank(w)?;
        let key = self.dominant_rep(w);
        if let Some(hit) = self.orbit_cache.lock().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let mut seen: HashSet<Weight> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(key.clone());
        queue.push_back(key.clone());
        while let Some(cur) = queue.pop_front() {
            for i in 0..self.rank {
                if cur.0[i] != 0 {
                    let next = self.simple_reflection(i, &cur)?;
                    if seen.insert(next.clone()) {
                        queue.push_back(next);
                    }
                }
            }
        }
        let mut orbit: Vec<Weight> = seen.into_iter().collect();
        orbit.sort();
        let arc = std::sync::Arc::new(orbit);
        self.orbit_cache.lock().unwrap().insert(key, arc.clone());
        Ok(arc)
    }

    pub fn orbit_size(&self, w: &Weight) -> Result<u64, RootError> {
        Ok(self.weyl_orbit(w)?.len() as u64)
    }

    /// Root coordinates of a weight: the x with w = sum x_i alpha_i.
    pub fn root_coords(&self, w: &Weight) -> Vec<Rat> {
        let v: Vec<Rat> = w.0.iter().map(|&c| rat(c)).collect();
        self.cartan_inv.apply_row(&v)
    }

    /// mu <= lambda in the dominance order: lambda - mu is a nonnegative
    /// rational combination of simple roots.  (For weights in the same
    /// coset of the root lattice the coefficients are integers; rational
    /// nonnegative coefficients are accepted deliberately so the order is
    /// defined on the whole weight lattice.)
    pub fn dominance_leq(&self, mu: &Weight, lambda: &Weight) -> Result<bool, RootError> {
        self.check_rank(mu)?;
        self.check_rank(lambda)?;
        // Sign test against the positively scaled inverse Cartan matrix;
        // avoids rational arithmetic on a hot path.
        for j in 0..self.rank {
            let coeff: i128 = (0..self.rank)
                .map(|i| (lambda.0[i] - mu.0[i]) as i128 * self.scaled_inv[i][j] as i128)
                .sum();
            if coeff < 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn dominance_lt(&self, mu: &Weight, lambda: &Weight) -> Result<bool, RootError> {
        Ok(mu != lambda && self.dominance_leq(mu, lambda)?)
    }

    /// Integer pairing (w, alpha) in the normalisation where short roots
    /// have squared length 2; alpha is the root with index `root_idx`.
    fn pair_with_root(&self, w: &Weight, root_idx: usize) -> i64 {
        let n = &self.positive_roots[root_idx];
        (0..self.rank).map(|j| n[j] * w.0[j] * self.d[j]).sum()
    }

    /// Symmetric bilinear form on the weight lattice, short roots of
    /// squared length 2; Gram entries are (omega_i, omega_j) = (A^-1)_ij d_j.
    pub fn form(&self, v: &Weight, w: &Weight) -> Rat {
        let x = self.root_coords(w);
        let mut acc = Rat::zero();
        for j in 0..self.rank {
            if v.0[j] != 0 && !x[j].is_zero() {
                acc += rat(v.0[j] * self.d[j]) * &x[j];
            }
        }
        acc
    }

    /// Weyl dimension formula, evaluated exactly.
    pub fn weyl_dim(&self, lambda: &Weight) -> Result<BigInt, RootError> {
        self.check_rank(lambda)?;
        if !lambda.is_dominant() {
            return Err(RootError::NotDominant(lambda.to_string()));
        }
        let lam_rho = lambda.add(&self.rho);
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        for idx in 0..self.positive_roots.len() {
            num *= BigInt::from(self.pair_with_root(&lam_rho, idx));
            den *= BigInt::from(self.pair_with_root(&self.rho, idx));
        }
        let q = BigRational::new(num, den);
        assert!(q.is_integer(), "Weyl dimension must be an integer");
        Ok(q.to_integer())
    }

    /// All dominant weights mu <= lambda in lambda + root lattice,
    /// including lambda itself.  Walks covers of the dominance order on
    /// dominant weights, each of which is a positive-root subtraction.
    pub fn dominant_below(&self, lambda: &Weight) -> Result<Vec<Weight>, RootError> {
        self.check_rank(lambda)?;
        if !lambda.is_dominant() {
            return Err(RootError::NotDominant(lambda.to_string()));
        }
        let mut seen: HashSet<Weight> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(lambda.clone());
        queue.push_back(lambda.clone());
        while let Some(cur) = queue.pop_front() {
            for alpha in &self.positive_roots_fw {
                let down = cur.sub(alpha);
                if down.is_dominant() && seen.insert(down.clone()) {
                    queue.push_back(down);
                }
            }
        }
        let mut out: Vec<Weight> = seen.into_iter().collect();
        out.sort_by_key(|w| (self.depth(lambda, w), w.clone()));
        Ok(out)
    }

    /// Height of lambda - mu in root coordinates (a nonnegative integer
    /// for dominant mu <= lambda).
    fn depth(&self, lambda: &Weight, mu: &Weight) -> i64 {
        let x = self.root_coords(&lambda.sub(mu));
        let mut total = Rat::zero();
        for c in &x {
            total += c;
        }
        assert!(total.is_integer(), "depth must be integral inside one coset");
        total.to_integer().to_i64().unwrap()
    }

    /// Dominant weight multiplicities of the irreducible/Weyl module of
    /// highest weight lambda in characteristic zero, by the multiplicity
    /// recursion: walking down from lambda,
    ///   (|lambda+rho|^2 - |mu+rho|^2) m_mu =
    ///       2 sum_{alpha>0} sum_{k>=1} m_{mu+k alpha} (mu+k alpha, alpha).
    pub fn freudenthal(&self, lambda: &Weight) -> Result<std::sync::Arc<BTreeMap<Weight, u64>>, RootError> {
        self.check_rank(lambda)?;
        if !lambda.is_dominant() {
            return Err(RootError::NotDominant(lambda.to_string()));
        }
        if let Some(hit) = self.freudenthal_cache.lock().unwrap().get(lambda) {
            return Ok(hit.clone());
        }
        let table = self.dominant_below(lambda)?; // sorted by increasing depth
        let lam_rho = lambda.add(&self.rho);
        let top_norm = self.form(&lam_rho, &lam_rho);
        let mut mult: HashMap<Weight, i128> = HashMap::new();
        mult.insert(lambda.clone(), 1);
        for mu in table.iter().skip(1) {
            let mut num: i128 = 0;
            for (ridx, alpha_fw) in self.positive_roots_fw.iter().enumerate() {
                let mut cur = mu.clone();
                loop {
                    cur = cur.add(alpha_fw);
                    let rep = self.dominant_rep(&cur);
                    let Some(&m) = mult.get(&rep) else { break };
                    num += m * self.pair_with_root(&cur, ridx) as i128;
                }
            }
            let mu_rho = mu.add(&self.rho);
            let den = &top_norm - self.form(&mu_rho, &mu_rho);
            assert!(!den.is_zero(), "degenerate denominator in multiplicity recursion");
            let val = BigRational::from_integer(BigInt::from(2) * BigInt::from(num)) / den;
            assert!(val.is_integer(), "non-integral weight multiplicity");
            let v = val.to_integer();
            assert!(v.is_positive(), "non-positive weight multiplicity");
            mult.insert(mu.clone(), v.to_i128().unwrap());
        }
        let out: BTreeMap<Weight, u64> = table
            .into_iter()
            .map(|w| {
                let m = mult[&w];
                (w, u64::try_from(m).expect("multiplicity fits in u64"))
            })
            .collect();
        let arc = std::sync::Arc::new(out);
        self.freudenthal_cache
            .lock()
            .unwrap()
            .insert(lambda.clone(), arc.clone());
        Ok(arc)
    }

    /// Seed the per-system caches from previously serialised entries.
    pub fn seed_freudenthal(&self, lambda: Weight, table: BTreeMap<Weight, u64>) {
        self.freudenthal_cache
            .lock()
            .unwrap()
            .insert(lambda, std::sync::Arc::new(table));
    }

    pub fn cached_freudenthal_keys(&self) -> Vec<Weight> {
        self.freudenthal_cache.lock().unwrap().keys().cloned().collect()
    }

    /// Seed the orbit cache; `dominant` must be the dominant member of
    /// the supplied orbit, which is the key the lookup uses.
    pub fn seed_orbit(&self, dominant: Weight, orbit: Vec<Weight>) {
        self.orbit_cache
            .lock()
            .unwrap()
            .insert(dominant, std::sync::Arc::new(orbit));
    }

    pub fn cached_orbit_keys(&self) -> Vec<Weight> {
        self.orbit_cache.lock().unwrap().keys().cloned().collect()
    }
}
