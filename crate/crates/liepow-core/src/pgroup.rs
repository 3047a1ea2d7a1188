//! Exact arithmetic in the finite p-groups built on a vector space V and
//! its Lie powers: the class-2 group on V x L2V, the class-3 group on
//! V x L2V x L3V, the exponent-p-square central extension E* modelled on
//! (Z/p^2)^d x L2V, and central quotients of all three.  Structure data
//! (order, rank, exponent, classes, derived and Frattini sizes) is read
//! off the graded coordinates, with the generating spans computed from
//! actual commutator words rather than formulas.

use crate::field::{FMatrix, FieldError, PrimeField};
use crate::g2gen::g2_generators;
use crate::matmod::{
    exterior_square, exterior_square_matrix, is_isomorphic, quotient_action, socle_and_lattice,
    wedge_pairs, LiePowerBasis, MatModule, ModuleError, ProbeConfig, QuotientMap,
};
use crate::subspace::Subspace;
use num::BigUint;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PGroupError {
    #[error("{0}")]
    BadParams(String),
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("matrix does not stabilize the quotiented subspace")]
    NotStabilized,
    #[error("element does not belong to this group: {0}")]
    BadElement(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PGroupKind {
    Gamma2,
    Gamma3,
    EStar,
}

/// A group element in graded coordinates.  `a` holds residues mod p for
/// the two bracket groups and residues mod p^2 for E*; `b` is the L2
/// part, `c` the L3 part (empty except in the class-3 group).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PElement {
    pub a: Vec<u64>,
    pub b: Vec<u64>,
    pub c: Vec<u64>,
}

/// Sampling parameters for the probabilistic verification pieces.
#[derive(Clone, Copy, Debug)]
pub struct SampleConfig {
    pub seed: u64,
    pub triples: usize,
    pub pairs: usize,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig { seed: 0xba5e, triples: 1000, pairs: 100 }
    }
}

/// One of the graded p-groups, possibly divided by a central subspace X.
/// X lives in L2 coordinates for the class-2 kind, in L3 coordinates for
/// the class-3 kind, and in the Frattini coordinates F_p^d + L2 for E*.
pub struct PGroup {
    kind: PGroupKind,
    d: usize,
    field: PrimeField,
    pairs: Vec<(usize, usize)>,
    basis: Option<Arc<LiePowerBasis>>,
    x: Subspace,
}

impl std::fmt::Debug for PGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "PGroup({:?}, d = {}, p = {}, dim X = {})",
            self.kind,
            self.d,
            self.field.p(),
            self.x.dim()
        )
    }
}

fn check_odd_prime(p: u64) -> Result<PrimeField, PGroupError> {
    if p < 3 || p % 2 == 0 {
        return Err(PGroupError::BadParams(format!("odd prime required, got {p}")));
    }
    PrimeField::new(p).map_err(PGroupError::Field)
}

impl PGroup {
    /// The class-2 group on V x L2V, divided by U <= L2V when given.
    pub fn gamma2(p: u64, d: usize, u: Option<Subspace>) -> Result<PGroup, PGroupError> {
        let field = check_odd_prime(p)?;
        if d == 0 {
            return Err(PGroupError::BadParams("dimension must be positive".to_string()));
        }
        let n2 = d * (d - 1) / 2;
        let x = match u {
            Some(s) => {
                if s.ambient() != n2 || s.field().p() != p {
                    return Err(PGroupError::BadParams("U must live in L2 coordinates".to_string()));
                }
                s
            }
            None => Subspace::zero(field, n2),
        };
        Ok(PGroup { kind: PGroupKind::Gamma2, d, field, pairs: wedge_pairs(d), basis: None, x })
    }

    /// The class-3 group on V x L2V x L3V (p > 3), divided by W <= L3V.
    pub fn gamma3(p: u64, d: usize, w: Option<Subspace>) -> Result<PGroup, PGroupError> {
        let field = check_odd_prime(p)?;
        if p == 3 {
            return Err(PGroupError::BadParams("the class-3 group needs p > 3".to_string()));
        }
        if d == 0 {
            return Err(PGroupError::BadParams("dimension must be positive".to_string()));
        }
        let basis = LiePowerBasis::new(field, d)?;
        let n3 = basis.l3_dim();
        let x = match w {
            Some(s) => {
                if s.ambient() != n3 || s.field().p() != p {
                    return Err(PGroupError::BadParams("W must live in L3 coordinates".to_string()));
                }
                s
            }
            None => Subspace::zero(field, n3),
        };
        Ok(PGroup {
            kind: PGroupKind::Gamma3,
            d,
            field,
            pairs: wedge_pairs(d),
            basis: Some(Arc::new(basis)),
            x,
        })
    }

    /// The exponent-p^2 central extension on (Z/p^2)^d x L2V, divided by
    /// X inside its Frattini coordinates F_p^d + L2.
    pub fn estar(p: u64, d: usize, x: Option<Subspace>) -> Result<PGroup, PGroupError> {
        let field = check_odd_prime(p)?;
        if d == 0 {
            return Err(PGroupError::BadParams("dimension must be positive".to_string()));
        }
        let n2 = d * (d - 1) / 2;
        let x = match x {
            Some(s) => {
                if s.ambient() != d + n2 || s.field().p() != p {
                    return Err(PGroupError::BadParams(
                        "X must live in the Frattini coordinates of length d + C(d,2)".to_string(),
                    ));
                }
                s
            }
            None => Subspace::zero(field, d + n2),
        };
        Ok(PGroup { kind: PGroupKind::EStar, d, field, pairs: wedge_pairs(d), basis: None, x })
    }

    pub fn kind(&self) -> PGroupKind {
        self.kind
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn p(&self) -> u64 {
        self.field.p()
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn quotient_space(&self) -> &Subspace {
        &self.x
    }

    fn n2(&self) -> usize {
        self.pairs.len()
    }

    fn n3(&self) -> usize {
        self.basis.as_ref().map_or(0, |b| b.l3_dim())
    }

    fn p2(&self) -> u64 {
        self.field.p() * self.field.p()
    }

    /// [u, v] in L2 coordinates, for u, v reduced mod p.
    fn wedge_bracket(&self, u: &[u64], v: &[u64]) -> Vec<u64> {
        let f = self.field;
        self.pairs
            .iter()
            .map(|&(i, j)| f.sub(f.mul(u[i], v[j]), f.mul(u[j], v[i])))
            .collect()
    }

    fn vec_add(&self, u: &[u64], v: &[u64]) -> Vec<u64> {
        u.iter().zip(v).map(|(&x, &y)| self.field.add(x, y)).collect()
    }

    fn vec_sub(&self, u: &[u64], v: &[u64]) -> Vec<u64> {
        u.iter().zip(v).map(|(&x, &y)| self.field.sub(x, y)).collect()
    }

    fn vec_neg(&self, u: &[u64]) -> Vec<u64> {
        u.iter().map(|&x| self.field.neg(x)).collect()
    }

    fn vec_scale(&self, k: u64, u: &[u64]) -> Vec<u64> {
        u.iter().map(|&x| self.field.mul(k, x)).collect()
    }

    /// Canonically reduce the X-coset of an element.
    fn reduce(&self, mut e: PElement) -> PElement {
        if self.x.is_zero() {
            return e;
        }
        match self.kind {
            PGroupKind::Gamma2 => {
                e.b = self.x.coset_reduce(&e.b);
            }
            PGroupKind::Gamma3 => {
                e.c = self.x.coset_reduce(&e.c);
            }
            PGroupKind::EStar => {
                let p = self.field.p();
                let mut phi: Vec<u64> = e.a.iter().map(|&m| m / p).collect();
                phi.extend_from_slice(&e.b);
                let reduced = self.x.coset_reduce(&phi);
                for (i, m) in e.a.iter_mut().enumerate() {
                    *m = (*m % p) + p * reduced[i];
                }
                e.b = reduced[self.d..].to_vec();
            }
        }
        e
    }

    pub fn identity(&self) -> PElement {
        PElement { a: vec![0; self.d], b: vec![0; self.n2()], c: vec![0; self.n3()] }
    }

    /// Validates coordinate lengths and ranges, then reduces.
    pub fn element(&self, a: &[u64], b: &[u64], c: &[u64]) -> Result<PElement, PGroupError> {
        if a.len() != self.d || b.len() != self.n2() || c.len() != self.n3() {
            return Err(PGroupError::BadElement(format!(
                "coordinate lengths ({}, {}, {}) do not match ({}, {}, {})",
                a.len(),
                b.len(),
                c.len(),
                self.d,
                self.n2(),
                self.n3()
            )));
        }
        let a_bound = if self.kind == PGroupKind::EStar { self.p2() } else { self.field.p() };
        if a.iter().any(|&x| x >= a_bound) {
            return Err(PGroupError::BadElement(format!("first coordinate not below {a_bound}")));
        }
        if b.iter().chain(c.iter()).any(|&x| x >= self.field.p()) {
            return Err(PGroupError::BadElement("central coordinate not below p".to_string()));
        }
        Ok(self.reduce(PElement { a: a.to_vec(), b: b.to_vec(), c: c.to_vec() }))
    }

    /// The i-th coordinate-vector generator: e_i in the V part.
    pub fn generator(&self, i: usize) -> PElement {
        let mut a = vec![0; self.d];
        a[i] = 1;
        PElement { a, b: vec![0; self.n2()], c: vec![0; self.n3()] }
    }

    pub fn multiply(&self, x: &PElement, y: &PElement) -> PElement {
        let f = self.field;
        match self.kind {
            PGroupKind::Gamma2 => {
                let a = self.vec_add(&x.a, &y.a);
                let mut b = self.vec_add(&x.b, &y.b);
                b = self.vec_add(&b, &self.wedge_bracket(&x.a, &y.a));
                self.reduce(PElement { a, b, c: vec![] })
            }
            PGroupKind::Gamma3 => {
                let basis = self.basis.as_ref().expect("class-3 group carries a Lie basis");
                let a = self.vec_add(&x.a, &y.a);
                let bracket_af = self.wedge_bracket(&x.a, &y.a);
                let b = self.vec_add(&self.vec_add(&x.b, &y.b), &bracket_af);
                // c + h + 3([b,f] - [g,a]) + [a, f, f - a]
                let bf = basis.bracket_l2_v(&x.b, &y.a).expect("validated lengths");
                let ga = basis.bracket_l2_v(&y.b, &x.a).expect("validated lengths");
                let f_minus_a = self.vec_sub(&y.a, &x.a);
                let affa = basis.bracket_l2_v(&bracket_af, &f_minus_a).expect("validated lengths");
                let mut c = self.vec_add(&x.c, &y.c);
                c = self.vec_add(&c, &self.vec_scale(f.reduce(3), &self.vec_sub(&bf, &ga)));
                c = self.vec_add(&c, &affa);
                self.reduce(PElement { a, b, c })
            }
            PGroupKind::EStar => {
                let p = f.p();
                let p2 = self.p2();
                let a: Vec<u64> = x.a.iter().zip(&y.a).map(|(&m, &n)| (m + n) % p2).collect();
                let mbar: Vec<u64> = x.a.iter().map(|&m| m % p).collect();
                let nbar: Vec<u64> = y.a.iter().map(|&m| m % p).collect();
                let b = self.vec_add(&self.vec_add(&x.b, &y.b), &self.wedge_bracket(&mbar, &nbar));
                self.reduce(PElement { a, b, c: vec![] })
            }
        }
    }

    /// Inverse = negate every coordinate (exact in all three laws).
    pub fn inverse(&self, x: &PElement) -> PElement {
        match self.kind {
            PGroupKind::EStar => {
                let p2 = self.p2();
                let a = x.a.iter().map(|&m| (p2 - m) % p2).collect();
                self.reduce(PElement { a, b: self.vec_neg(&x.b), c: vec![] })
            }
            _ => self.reduce(PElement {
                a: self.vec_neg(&x.a),
                b: self.vec_neg(&x.b),
                c: self.vec_neg(&x.c),
            }),
        }
    }

    /// k-th power by repeated squaring on the honest group law.
    pub fn power(&self, x: &PElement, k: u64) -> PElement {
        let mut acc = self.identity();
        let mut base = x.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.multiply(&acc, &base);
            }
            base = self.multiply(&base, &base);
            k >>= 1;
        }
        acc
    }

    /// x^{-1} y^{-1} x y.
    pub fn commutator2(&self, x: &PElement, y: &PElement) -> PElement {
        let xi = self.inverse(x);
        let yi = self.inverse(y);
        self.multiply(&self.multiply(&xi, &yi), &self.multiply(x, y))
    }

    /// [[x, y], z] as a group word.
    pub fn commutator3(&self, x: &PElement, y: &PElement, z: &PElement) -> PElement {
        let c = self.commutator2(x, y);
        self.commutator2(&c, z)
    }

    pub fn is_identity(&self, x: &PElement) -> bool {
        *x == self.identity()
    }

    pub fn element_order(&self, x: &PElement) -> u64 {
        let mut acc = x.clone();
        let mut k = 1;
        while !self.is_identity(&acc) {
            acc = self.multiply(&acc, x);
            k += 1;
            assert!(k <= self.p2(), "element order exceeds the group exponent bound");
        }
        k
    }

    pub fn random_element(&self, rng: &mut ChaCha8Rng) -> PElement {
        let a_bound = if self.kind == PGroupKind::EStar { self.p2() } else { self.field.p() };
        let a: Vec<u64> = (0..self.d).map(|_| rng.gen_range(0..a_bound)).collect();
        let b: Vec<u64> = (0..self.n2()).map(|_| rng.gen_range(0..self.field.p())).collect();
        let c: Vec<u64> = (0..self.n3()).map(|_| rng.gen_range(0..self.field.p())).collect();
        self.reduce(PElement { a, b, c })
    }

    /// Rows spanning the derived subgroup inside the central
    /// coordinates, together with the p-th powers of the generators in
    /// Frattini coordinates; both as reduced representatives.
    fn derived_rows(&self) -> Vec<Vec<u64>> {
        let mut rows = Vec::new();
        for i in 0..self.d {
            for j in i + 1..self.d {
                let c = self.commutator2(&self.generator(i), &self.generator(j));
                rows.push(self.central_coords(&c));
            }
        }
        if self.kind == PGroupKind::Gamma3 {
            for i in 0..self.d {
                for j in i + 1..self.d {
                    for k in 0..self.d {
                        let c =
                            self.commutator3(&self.generator(i), &self.generator(j), &self.generator(k));
                        rows.push(self.central_coords(&c));
                    }
                }
            }
        }
        rows
    }

    /// The element's coordinates in the central ambient that X lives in,
    /// assuming the V part (mod p for E*) vanishes.
    fn central_coords(&self, e: &PElement) -> Vec<u64> {
        match self.kind {
            PGroupKind::Gamma2 => e.b.clone(),
            PGroupKind::Gamma3 => {
                let mut v = e.b.clone();
                v.extend_from_slice(&e.c);
                v
            }
            PGroupKind::EStar => {
                let p = self.field.p();
                assert!(e.a.iter().all(|&m| m % p == 0), "element is not central-graded");
                let mut v: Vec<u64> = e.a.iter().map(|&m| m / p).collect();
                v.extend_from_slice(&e.b);
                v
            }
        }
    }

    /// Dimension over F_p of the span of `rows` in the quotient by X,
    /// where X is embedded into the (possibly larger) row ambient at the
    /// trailing coordinates.
    fn quotient_span_dim(&self, rows: &[Vec<u64>], ambient: usize) -> usize {
        let span = if rows.is_empty() {
            Subspace::zero(self.field, ambient)
        } else {
            Subspace::from_rows(self.field, ambient, rows).expect("consistent row lengths")
        };
        let x_embedded = if self.x.ambient() == ambient {
            self.x.clone()
        } else {
            let off = ambient - self.x.ambient();
            let rows: Vec<Vec<u64>> = (0..self.x.dim())
                .map(|i| {
                    let mut v = vec![0; ambient];
                    v[off..].copy_from_slice(self.x.basis().row(i));
                    v
                })
                .collect();
            if rows.is_empty() {
                Subspace::zero(self.field, ambient)
            } else {
                Subspace::from_rows(self.field, ambient, &rows).expect("consistent row lengths")
            }
        };
        span.sum(&x_embedded).expect("same ambient").dim() - x_embedded.dim()
    }

    pub fn structure_report(&self) -> StructureReport {
        let d = self.d;
        let n2 = self.n2();
        let n3 = self.n3();
        let p = self.field.p();
        let dim_x = self.x.dim();

        let order_exponent = match self.kind {
            PGroupKind::Gamma2 => d + n2 - dim_x,
            PGroupKind::Gamma3 => d + n2 + n3 - dim_x,
            PGroupKind::EStar => 2 * d + n2 - dim_x,
        };

        let derived = self.derived_rows();
        let (derived_ambient, gamma3_dim) = match self.kind {
            PGroupKind::Gamma2 => (n2, 0),
            PGroupKind::Gamma3 => {
                let mut g3_rows = Vec::new();
                for row in &derived {
                    if row[..n2].iter().all(|&x| x == 0) {
                        g3_rows.push(row[n2..].to_vec());
                    }
                }
                (n2 + n3, self.quotient_span_dim(&g3_rows, n3))
            }
            PGroupKind::EStar => (d + n2, 0),
        };
        let derived_dim = self.quotient_span_dim(&derived, derived_ambient);

        // Frattini = derived together with p-th powers; the powers only
        // contribute for E*, where generator^p lands at p*e_i.
        let frattini_dim = match self.kind {
            PGroupKind::EStar => {
                let mut rows = derived.clone();
                for i in 0..d {
                    let pow = self.power(&self.generator(i), p);
                    rows.push(self.central_coords(&pow));
                }
                self.quotient_span_dim(&rows, d + n2)
            }
            _ => derived_dim,
        };

        let exponent = match self.kind {
            PGroupKind::EStar => {
                // Exponent p exactly when every generator's p-th power
                // dies in the quotient.
                let all_die = (0..d).all(|i| {
                    let pow = self.power(&self.generator(i), p);
                    self.is_identity(&pow)
                });
                if all_die {
                    p
                } else {
                    p * p
                }
            }
            _ => p,
        };

        let nilpotency_class = if gamma3_dim > 0 {
            3
        } else if derived_dim > 0 {
            2
        } else {
            1
        };
        let exponent_p_class = match self.kind {
            PGroupKind::Gamma3 => {
                if gamma3_dim > 0 {
                    3
                } else if frattini_dim > 0 {
                    2
                } else {
                    1
                }
            }
            _ => {
                if frattini_dim > 0 {
                    2
                } else {
                    1
                }
            }
        };

        StructureReport {
            p,
            order_exponent,
            order: BigUint::from(p).pow(order_exponent as u32),
            rank: order_exponent - frattini_dim,
            exponent,
            nilpotency_class,
            exponent_p_class,
            derived_dim,
            gamma3_dim,
            frattini_dim,
        }
    }

    /// The matrices a change of basis g of V induces on each graded
    /// coordinate block; errors unless g stabilizes X.
    pub fn induce(&self, g: &FMatrix) -> Result<InducedMaps, PGroupError> {
        if g.rows() != self.d || g.cols() != self.d || !g.is_invertible() {
            return Err(PGroupError::BadParams("need an invertible d x d matrix".to_string()));
        }
        if self.kind == PGroupKind::EStar {
            return Err(PGroupError::BadParams(
                "the extension group only carries the Frattini-coordinate action".to_string(),
            ));
        }
        let wedge = exterior_square_matrix(g);
        let cube = match self.kind {
            PGroupKind::Gamma3 => Some(
                self.basis
                    .as_ref()
                    .expect("class-3 group carries a Lie basis")
                    .induced_l3_action(g)?,
            ),
            _ => None,
        };
        let action_on_x = match self.kind {
            PGroupKind::Gamma2 => &wedge,
            PGroupKind::Gamma3 => cube.as_ref().expect("just built"),
            PGroupKind::EStar => unreachable!(),
        };
        if !self.x.is_zero() {
            for i in 0..self.x.dim() {
                let image = action_on_x.apply_row(self.x.basis().row(i))?;
                if !self.x.contains_vec(&image) {
                    return Err(PGroupError::NotStabilized);
                }
            }
        }
        Ok(InducedMaps { natural: g.clone(), wedge, cube })
    }

    /// Coordinate transport along previously induced maps.
    pub fn apply_maps(&self, maps: &InducedMaps, x: &PElement) -> Result<PElement, PGroupError> {
        if self.kind == PGroupKind::EStar {
            return Err(PGroupError::BadParams(
                "the extension group only carries the Frattini-coordinate action".to_string(),
            ));
        }
        let a = maps.natural.apply_row(&x.a)?;
        let b = maps.wedge.apply_row(&x.b)?;
        let c = match &maps.cube {
            Some(m) => m.apply_row(&x.c)?,
            None => vec![],
        };
        Ok(self.reduce(PElement { a, b, c }))
    }

    /// Whether the Frattini-coordinate action of g (natural on the first
    /// block, exterior-square on the second) stabilizes X; this is the
    /// membership test for the stabilizer conditions of the E* quotients.
    pub fn stabilizes_phi(&self, g: &FMatrix) -> Result<bool, PGroupError> {
        if self.kind != PGroupKind::EStar {
            return Err(PGroupError::BadParams("Frattini action belongs to the extension group".to_string()));
        }
        if g.rows() != self.d || !g.is_invertible() {
            return Err(PGroupError::BadParams("need an invertible d x d matrix".to_string()));
        }
        let wedge = exterior_square_matrix(g);
        for i in 0..self.x.dim() {
            let row = self.x.basis().row(i);
            let mut image = g.apply_row(&row[..self.d])?;
            image.extend(wedge.apply_row(&row[self.d..])?);
            if !self.x.contains_vec(&image) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Samples (xy)^g = x^g y^g; a false is a disproof, a true is only
    /// evidence, which is all the spot-check needs.
    pub fn is_automorphism_sample(
        &self,
        g: &FMatrix,
        trials: usize,
        seed: u64,
    ) -> Result<bool, PGroupError> {
        let maps = self.induce(g)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..trials {
            let x = self.random_element(&mut rng);
            let y = self.random_element(&mut rng);
            let lhs = self.apply_maps(&maps, &self.multiply(&x, &y))?;
            let rhs = self.multiply(&self.apply_maps(&maps, &x)?, &self.apply_maps(&maps, &y)?);
            if lhs != rhs {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Induced matrices on the graded blocks of a bracket group.
pub struct InducedMaps {
    pub natural: FMatrix,
    pub wedge: FMatrix,
    pub cube: Option<FMatrix>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureReport {
    pub p: u64,
    pub order_exponent: usize,
    pub order: BigUint,
    pub rank: usize,
    pub exponent: u64,
    pub nilpotency_class: usize,
    pub exponent_p_class: usize,
    pub derived_dim: usize,
    pub gamma3_dim: usize,
    pub frattini_dim: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OptimalVariant {
    Normalizer,
    GroupItself,
}

/// An optimal group built from the G2 module data: the quotient group,
/// the module acted on, and the distinguished subspace X (a submodule of
/// the exterior square for the normalizer variant; the graph of the
/// epimorphism L2V -> V inside the Frattini coordinates for the other).
pub struct OptimalG2 {
    pub group: PGroup,
    pub module: MatModule,
    pub x: Subspace,
    pub variant: OptimalVariant,
}

/// The unique 14-dimensional submodule of the exterior square of the G2
/// minimal module.
fn g2_fourteen(module: &MatModule, cfg: &ProbeConfig) -> Result<(MatModule, Subspace), PGroupError> {
    let wedge = exterior_square(module);
    let lattice = socle_and_lattice(&wedge, cfg)?;
    let mut found = lattice.nodes.into_iter().filter(|n| n.dim == 14);
    let node = found
        .next()
        .ok_or_else(|| PGroupError::BadParams("no 14-dimensional submodule in the exterior square".to_string()))?;
    if found.next().is_some() {
        return Err(PGroupError::BadParams("14-dimensional submodule is not unique".to_string()));
    }
    Ok((wedge, node.space))
}

/// Builds the two optimal groups for G2(p): the quotient of the class-2
/// group by the 14-dimensional submodule X (exponent p), or the quotient
/// of E* by the graph of the epimorphism theta: L2V -> V through the
/// largest maximal submodule (exponent p^2).
pub fn build_optimal_g2(
    p: u64,
    variant: OptimalVariant,
    cfg: &ProbeConfig,
) -> Result<OptimalG2, PGroupError> {
    match variant {
        OptimalVariant::Normalizer => {
            if p < 3 || p % 2 == 0 {
                return Err(PGroupError::BadParams("odd prime required".to_string()));
            }
        }
        OptimalVariant::GroupItself => {
            if p < 5 || p % 2 == 0 {
                return Err(PGroupError::BadParams("the self variant needs p >= 5".to_string()));
            }
        }
    }
    let module = g2_generators(p)?;
    let (wedge, x14) = g2_fourteen(&module, cfg)?;

    let (group, x) = match variant {
        OptimalVariant::Normalizer => {
            let group = PGroup::gamma2(p, 7, Some(x14.clone()))?;
            (group, x14)
        }
        OptimalVariant::GroupItself => {
            let head = quotient_action(&wedge, &x14)?;
            let iso = is_isomorphic(&head, &module, cfg)?
                .ok_or_else(|| PGroupError::BadParams("head of the exterior square is not the module".to_string()))?;
            let qmap = QuotientMap::new(x14);
            let field = module.field();
            let n2 = wedge.dim();
            // Graph rows (theta(u) | u) over the L2 basis.
            let mut rows = Vec::with_capacity(n2);
            for k in 0..n2 {
                let mut u = vec![0u64; n2];
                u[k] = 1;
                let theta = iso.apply_row(&qmap.project(&u))?;
                let mut row = theta;
                row.extend_from_slice(&u);
                rows.push(row);
            }
            let m = Subspace::from_rows(field, 7 + n2, &rows).expect("consistent rows");
            if m.dim() != n2 {
                return Err(PGroupError::BadParams("graph subspace has the wrong dimension".to_string()));
            }
            // The graph meets the V block trivially and the L2 block in
            // the kernel of theta, which is proper; both are what makes
            // the quotient non-abelian of exponent p^2.
            let v_block: Vec<Vec<u64>> = (0..7)
                .map(|i| {
                    let mut v = vec![0u64; 7 + n2];
                    v[i] = 1;
                    v
                })
                .collect();
            let v_block = Subspace::from_rows(field, 7 + n2, &v_block).expect("consistent rows");
            if m.intersect(&v_block)?.dim() != 0 {
                return Err(PGroupError::BadParams("graph meets the V block".to_string()));
            }
            let group = PGroup::estar(p, 7, Some(m.clone()))?;
            (group, m)
        }
    };

    // The table row the construction must land on.
    let report = group.structure_report();
    let expected_exponent = match variant {
        OptimalVariant::Normalizer => p,
        OptimalVariant::GroupItself => p * p,
    };
    if report.order_exponent != 14
        || report.rank != 7
        || report.nilpotency_class != 2
        || report.exponent_p_class != 2
        || report.exponent != expected_exponent
    {
        return Err(PGroupError::BadParams(format!(
            "optimal group has unexpected structure: {report:?}"
        )));
    }
    Ok(OptimalG2 { group, module, x, variant })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(d: usize, i: usize) -> Vec<u64> {
        let mut v = vec![0; d];
        v[i] = 1;
        v
    }

    #[test]
    fn class2_law_and_powers() {
        let g = PGroup::gamma2(5, 3, None).unwrap();
        let x = g.element(&unit(3, 0), &[0, 0, 0], &[]).unwrap();
        let y = g.element(&unit(3, 1), &[0, 0, 0], &[]).unwrap();
        let xy = g.multiply(&x, &y);
        // (e1, 0)(e2, 0) = (e1 + e2, [e1, e2]); pair (0,1) is the first
        // wedge coordinate.
        assert_eq!(xy.a, vec![1, 1, 0]);
        assert_eq!(xy.b, vec![1, 0, 0]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let x = g.random_element(&mut rng);
            assert!(g.is_identity(&g.multiply(&x, &g.inverse(&x))));
            // Closed form x^k = (ka, kb).
            let x3 = g.power(&x, 3);
            assert_eq!(x3.a, g.vec_scale(3, &x.a));
            assert_eq!(x3.b, g.vec_scale(3, &x.b));
            assert!(g.is_identity(&g.power(&x, 5)));
        }
    }

    #[test]
    fn class3_law_associativity_and_exponent() {
        for p in [5u64, 7] {
            let g = PGroup::gamma3(p, 3, None).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(2);
            for _ in 0..300 {
                let x = g.random_element(&mut rng);
                let y = g.random_element(&mut rng);
                let z = g.random_element(&mut rng);
                let left = g.multiply(&g.multiply(&x, &y), &z);
                let right = g.multiply(&x, &g.multiply(&y, &z));
                assert_eq!(left, right);
                assert!(g.is_identity(&g.multiply(&x, &g.inverse(&x))));
                assert!(g.is_identity(&g.power(&x, p)));
            }
            // Basis elements too.
            for i in 0..3 {
                assert!(g.is_identity(&g.power(&g.generator(i), p)));
            }
        }
    }

    #[test]
    fn commutators_match_the_closed_forms() {
        let g2 = PGroup::gamma2(7, 4, None).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let x = g2.generator(i);
                let y = g2.generator(j);
                let c = g2.commutator2(&x, &y);
                assert!(c.a.iter().all(|&v| v == 0));
                let expect = g2.vec_scale(2, &g2.wedge_bracket(&x.a, &y.a));
                assert_eq!(c.b, expect);
            }
        }
        // (e1, 0) commutes with (e1, b): same V part, central rest.
        let x = g2.element(&unit(4, 0), &[0; 6], &[]).unwrap();
        let y = g2.element(&unit(4, 0), &[3, 1, 0, 0, 2, 0], &[]).unwrap();
        assert!(g2.is_identity(&g2.commutator2(&x, &y)));

        let g3 = PGroup::gamma3(5, 3, None).unwrap();
        let basis = LiePowerBasis::new(g3.field(), 3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let c = g3.commutator3(&g3.generator(i), &g3.generator(j), &g3.generator(k));
                    assert!(c.a.iter().all(|&v| v == 0));
                    assert!(c.b.iter().all(|&v| v == 0));
                    let triple = basis
                        .bracket_vvv(&unit(3, i), &unit(3, j), &unit(3, k))
                        .unwrap();
                    assert_eq!(c.c, g3.vec_scale(g3.field().reduce(12), &triple));
                }
            }
        }
        // Jacobi: the three cyclic triple commutators multiply to the identity.
        let (x, y, z) = (g3.generator(0), g3.generator(1), g3.generator(2));
        let j = g3.multiply(
            &g3.multiply(&g3.commutator3(&x, &y, &z), &g3.commutator3(&y, &z, &x)),
            &g3.commutator3(&z, &x, &y),
        );
        assert!(g3.is_identity(&j));
    }

    #[test]
    fn estar_generator_order_is_p_squared() {
        // d = 1, p = 3: cube of a generator is (3, .), ninth power dies.
        let g = PGroup::estar(3, 1, None).unwrap();
        let x = g.generator(0);
        let x3 = g.power(&x, 3);
        assert!(!g.is_identity(&x3));
        assert_eq!(x3.a, vec![3]);
        assert!(g.is_identity(&g.power(&x, 9)));
        assert_eq!(g.element_order(&x), 9);
    }

    #[test]
    fn ambient_structure_reports() {
        // Class-2 on d = 7: order p^28, class 2, exponent p.
        let g = PGroup::gamma2(5, 7, None).unwrap();
        let r = g.structure_report();
        assert_eq!(r.order_exponent, 28);
        assert_eq!(r.rank, 7);
        assert_eq!(r.exponent, 5);
        assert_eq!(r.nilpotency_class, 2);
        assert_eq!(r.exponent_p_class, 2);
        assert_eq!(r.derived_dim, 21);
        assert_eq!(r.frattini_dim, 21);

        // Class-3 on d = 3: order 5^14, class 3.
        let g = PGroup::gamma3(5, 3, None).unwrap();
        let r = g.structure_report();
        assert_eq!(r.order_exponent, 14);
        assert_eq!(r.rank, 3);
        assert_eq!(r.nilpotency_class, 3);
        assert_eq!(r.exponent_p_class, 3);
        assert_eq!(r.derived_dim, 3 + 8);
        assert_eq!(r.gamma3_dim, 8);
        assert_eq!(r.exponent, 5);

        // E* on d = 3: order p^9, rank 3, both classes 2.
        let g = PGroup::estar(5, 3, None).unwrap();
        let r = g.structure_report();
        assert_eq!(r.order_exponent, 9);
        assert_eq!(r.rank, 3);
        assert_eq!(r.exponent, 25);
        assert_eq!(r.nilpotency_class, 2);
        assert_eq!(r.exponent_p_class, 2);
        assert_eq!(r.derived_dim, 3);
        assert_eq!(r.frattini_dim, 6);
    }

    #[test]
    fn estar_frattini_decomposition() {
        let g = PGroup::estar(5, 3, None).unwrap();
        let field = g.field();
        // p-th powers of generators span the first block.
        let mut power_rows = Vec::new();
        for i in 0..3 {
            let x = g.power(&g.generator(i), 5);
            power_rows.push(g.central_coords(&x));
        }
        let powers = Subspace::from_rows(field, 6, &power_rows).unwrap();
        assert_eq!(powers.dim(), 3);
        // Commutators span the second block.
        let mut comm_rows = Vec::new();
        for i in 0..3 {
            for j in i + 1..3 {
                comm_rows.push(g.central_coords(&g.commutator2(&g.generator(i), &g.generator(j))));
            }
        }
        let derived = Subspace::from_rows(field, 6, &comm_rows).unwrap();
        assert_eq!(derived.dim(), 3);
        assert_eq!(powers.intersect(&derived).unwrap().dim(), 0);
        assert_eq!(powers.sum(&derived).unwrap().dim(), 6);
    }

    #[test]
    fn quotient_reports_and_exponent_boundary() {
        let field = PrimeField::new(5).unwrap();
        // Q_W with a 3-dimensional W: order 5^(3+3+8-3) = 5^11, class 3.
        let w = Subspace::from_rows(
            field,
            8,
            &[unit(8, 0), unit(8, 3), unit(8, 5)],
        )
        .unwrap();
        let g = PGroup::gamma3(5, 3, Some(w)).unwrap();
        let r = g.structure_report();
        assert_eq!(r.order_exponent, 11);
        assert_eq!(r.nilpotency_class, 3);
        assert_eq!(r.gamma3_dim, 5);

        // E*/X: exponent p exactly when X contains the image of the
        // p-th-power block.
        let with_powers = Subspace::from_rows(field, 6, &[unit(6, 0), unit(6, 1), unit(6, 2)]).unwrap();
        let g = PGroup::estar(5, 3, Some(with_powers)).unwrap();
        assert_eq!(g.structure_report().exponent, 5);
        let without = Subspace::from_rows(field, 6, &[unit(6, 3), unit(6, 4)]).unwrap();
        let g = PGroup::estar(5, 3, Some(without)).unwrap();
        let r = g.structure_report();
        assert_eq!(r.exponent, 25);
        // Abelian exactly when X contains the derived block.
        assert_eq!(r.nilpotency_class, 2);
        let with_derived =
            Subspace::from_rows(field, 6, &[unit(6, 3), unit(6, 4), unit(6, 5)]).unwrap();
        let g = PGroup::estar(5, 3, Some(with_derived)).unwrap();
        assert_eq!(g.structure_report().nilpotency_class, 1);
    }

    #[test]
    fn scalar_change_of_basis_is_an_automorphism() {
        let g = PGroup::gamma2(7, 4, None).unwrap();
        let field = g.field();
        let mu = FMatrix::identity(field, 4).scalar_mul(3);
        assert!(g.is_automorphism_sample(&mu, 50, 9).unwrap());
        // (a, b) goes to (mu a, mu^2 b).
        let maps = g.induce(&mu).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = g.random_element(&mut rng);
        let y = g.apply_maps(&maps, &x).unwrap();
        assert_eq!(y.a, g.vec_scale(3, &x.a));
        assert_eq!(y.b, g.vec_scale(field.mul(3, 3), &x.b));

        let g3 = PGroup::gamma3(5, 3, None).unwrap();
        let mu = FMatrix::identity(g3.field(), 3).scalar_mul(2);
        assert!(g3.is_automorphism_sample(&mu, 50, 10).unwrap());
    }

    #[test]
    fn optimal_g2_both_variants_at_p5() {
        let cfg = ProbeConfig::default();
        let norm = build_optimal_g2(5, OptimalVariant::Normalizer, &cfg).unwrap();
        let r = norm.group.structure_report();
        assert_eq!((r.order_exponent, r.rank, r.exponent, r.nilpotency_class), (14, 7, 5, 2));
        // The acting generators stabilize X and induce automorphisms.
        for gen in norm.module.gens() {
            assert!(norm.group.is_automorphism_sample(gen, 10, 11).unwrap());
        }

        let own = build_optimal_g2(5, OptimalVariant::GroupItself, &cfg).unwrap();
        let r = own.group.structure_report();
        assert_eq!((r.order_exponent, r.rank, r.exponent, r.nilpotency_class), (14, 7, 25, 2));
        // G2 generators stabilize the graph; nontrivial scalars do not.
        for gen in own.module.gens() {
            assert!(own.group.stabilizes_phi(gen).unwrap());
        }
        for mu in 2..5u64 {
            let scalar = FMatrix::identity(own.module.field(), 7).scalar_mul(mu);
            assert!(!own.group.stabilizes_phi(&scalar).unwrap());
        }
    }

    #[test]
    fn quotient_action_requires_stabilizing_x() {
        let field = PrimeField::new(5).unwrap();
        let u = Subspace::from_rows(field, 3, &[vec![1, 0, 0]]).unwrap();
        let g = PGroup::gamma2(5, 3, Some(u)).unwrap();
        // The wedge coordinate (0,1) mixes into others under this shear,
        // so the quotient action must refuse it.
        let shear = FMatrix::from_rows(field, &[vec![1, 0, 0], vec![0, 1, 1], vec![0, 0, 1]]).unwrap();
        assert!(matches!(g.induce(&shear), Err(PGroupError::NotStabilized)));
        let diag = FMatrix::from_rows(field, &[vec![2, 0, 0], vec![0, 3, 0], vec![0, 0, 1]]).unwrap();
        assert!(g.induce(&diag).is_ok());
    }
}
