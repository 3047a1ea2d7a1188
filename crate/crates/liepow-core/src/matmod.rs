//! Concrete matrix modules over prime fields: exterior squares, tensor
//! products, the third Lie power as an explicit quotient, and enough
//! MeatAxe machinery to split modules, identify factors, build the
//! submodule lattices of the multiplicity-free and uniserial cases, and
//! find invariant bilinear forms.
//!
//! Row-vector convention throughout: a module element is a row vector v
//! and a generator g acts as v * g.

use crate::field::{FMatrix, FieldError, PrimeField};
use crate::subspace::Subspace;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModuleError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("generator {index} is singular")]
    SingularGenerator { index: usize },
    #[error("generator file line {line}: {detail}")]
    Parse { line: usize, detail: String },
    #[error("{0}")]
    Shape(String),
    #[error("irreducibility test inconclusive after {retries} random probes")]
    Inconclusive { retries: u32 },
    #[error("submodule lattice unsupported: {0}")]
    UnsupportedShape(String),
}

/// Seeded parameters for the probabilistic pieces (random algebra
/// elements in the irreducibility test, isomorphism searches).
#[derive(Clone, Copy, Debug)]
pub struct ProbeConfig {
    pub seed: u64,
    pub retries: u32,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig { seed: 0x5eed, retries: 20 }
    }
}

/// A module given by the matrices of its generators.
#[derive(Clone)]
pub struct MatModule {
    field: PrimeField,
    dim: usize,
    gens: Vec<FMatrix>,
    label: String,
}

impl std::fmt::Debug for MatModule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "MatModule({}, dim {}, {} gens, F{})", self.label, self.dim, self.gens.len(), self.field.p())
    }
}

impl MatModule {
    pub fn new(field: PrimeField, dim: usize, gens: Vec<FMatrix>, label: &str) -> Result<Self, ModuleError> {
        for (index, g) in gens.iter().enumerate() {
            if g.rows() != dim || g.cols() != dim {
                return Err(ModuleError::Shape(format!(
                    "generator {} is {}x{}, expected {}x{}",
                    index,
                    g.rows(),
                    g.cols(),
                    dim,
                    dim
                )));
            }
            if g.field().p() != field.p() {
                return Err(ModuleError::Shape("generator field mismatch".to_string()));
            }
            if !g.is_invertible() {
                return Err(ModuleError::SingularGenerator { index });
            }
        }
        Ok(MatModule { field, dim, gens, label: label.to_string() })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gens(&self) -> &[FMatrix] {
        &self.gens
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// The module on the same space with every generator transposed.
    /// Spinning in it detects the submodules whose annihilators are
    /// submodules of the original; the irreducibility test needs this.
    pub fn transpose_module(&self) -> MatModule {
        MatModule {
            field: self.field,
            dim: self.dim,
            gens: self.gens.iter().map(|g| g.transpose()).collect(),
            label: format!("{}^T", self.label),
        }
    }
}

/// Parses the generator file format: first line `d p ngens`, then ngens
/// blocks of d lines with d residues each.  Blank lines and `#` comments
/// are skipped.
pub fn parse_generators(text: &str, label: &str) -> Result<MatModule, ModuleError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (line, header) = lines.next().ok_or(ModuleError::Parse { line: 1, detail: "empty file".to_string() })?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 3 {
        return Err(ModuleError::Parse { line, detail: "header is not 'd p ngens'".to_string() });
    }
    let d: usize = parts[0].parse().map_err(|_| ModuleError::Parse { line, detail: "bad dimension".to_string() })?;
    let p: u64 = parts[1].parse().map_err(|_| ModuleError::Parse { line, detail: "bad prime".to_string() })?;
    let ngens: usize = parts[2].parse().map_err(|_| ModuleError::Parse { line, detail: "bad generator count".to_string() })?;
    let field = PrimeField::new(p).map_err(|e| ModuleError::Parse { line, detail: e.to_string() })?;
    if d == 0 || ngens == 0 {
        return Err(ModuleError::Parse { line, detail: "dimension and generator count must be positive".to_string() });
    }

    let mut gens = Vec::with_capacity(ngens);
    for _ in 0..ngens {
        let mut rows = Vec::with_capacity(d);
        for _ in 0..d {
            let (line, text) = lines
                .next()
                .ok_or(ModuleError::Parse { line: 0, detail: "unexpected end of file".to_string() })?;
            let row: Result<Vec<u64>, _> = text.split_whitespace().map(|t| t.parse::<u64>()).collect();
            let row = row.map_err(|e| ModuleError::Parse { line, detail: format!("bad entry: {}", e) })?;
            if row.len() != d {
                return Err(ModuleError::Parse {
                    line,
                    detail: format!("row has {} entries, expected {}", row.len(), d),
                });
            }
            rows.push(row.into_iter().map(|x| x % p).collect());
        }
        gens.push(FMatrix::from_rows(field, &rows)?);
    }
    if let Some((line, _)) = lines.next() {
        return Err(ModuleError::Parse { line, detail: "trailing content after last generator".to_string() });
    }
    MatModule::new(field, d, gens, label)
}

pub fn load_generators(path: &std::path::Path) -> Result<MatModule, ModuleError> {
    let text = std::fs::read_to_string(path).map_err(|e| ModuleError::Parse {
        line: 0,
        detail: format!("cannot read {}: {}", path.display(), e),
    })?;
    let label = path.file_stem().and_then(|s| s.to_str()).unwrap_or("module");
    parse_generators(&text, label)
}

/// Ascending-lexicographic pairs (i, j) with i < j; index order of the
/// wedge basis e_i ^ e_j.
pub fn wedge_pairs(d: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(d * (d - 1) / 2);
    for i in 0..d {
        for j in i + 1..d {
            pairs.push((i, j));
        }
    }
    pairs
}

/// Matrix of the induced action on the exterior square:
/// (e_i ^ e_j) * g = sum over k < l of (g_ik g_jl - g_il g_jk) e_k ^ e_l.
pub fn exterior_square_matrix(g: &FMatrix) -> FMatrix {
    let d = g.rows();
    let f = g.field();
    let pairs = wedge_pairs(d);
    FMatrix::from_fn(f, pairs.len(), pairs.len(), |a, b| {
        let (i, j) = pairs[a];
        let (k, l) = pairs[b];
        f.sub(f.mul(g.get(i, k), g.get(j, l)), f.mul(g.get(i, l), g.get(j, k)))
    })
}

pub fn exterior_square(m: &MatModule) -> MatModule {
    let gens = m.gens.iter().map(exterior_square_matrix).collect();
    MatModule {
        field: m.field,
        dim: m.dim * (m.dim - 1) / 2,
        gens,
        label: format!("wedge2({})", m.label),
    }
}

/// Tensor product module; basis ordered ((i), (j)) ascending, matching
/// the Kronecker product of the generator matrices.
pub fn tensor_module(m: &MatModule, n: &MatModule) -> Result<MatModule, ModuleError> {
    if m.field.p() != n.field.p() {
        return Err(ModuleError::Shape("tensor factors over different fields".to_string()));
    }
    if m.gens.len() != n.gens.len() {
        return Err(ModuleError::Shape("tensor factors with different generator lists".to_string()));
    }
    let gens: Result<Vec<FMatrix>, FieldError> =
        m.gens.iter().zip(&n.gens).map(|(a, b)| a.kronecker(b)).collect();
    Ok(MatModule {
        field: m.field,
        dim: m.dim * n.dim,
        gens: gens?,
        label: format!("({})x({})", m.label, n.label),
    })
}

/// The alternating cube inside wedge2 tensor natural, spanned by
/// (e_i^e_j)@e_k + (e_j^e_k)@e_i - (e_i^e_k)@e_j over i < j < k.
pub fn a3_submodule(field: PrimeField, d: usize) -> Subspace {
    let pairs = wedge_pairs(d);
    let pair_index = |i: usize, j: usize| pairs.iter().position(|&(a, b)| (a, b) == (i, j)).unwrap();
    let ambient = pairs.len() * d;
    let mut rows = Vec::new();
    for i in 0..d {
        for j in i + 1..d {
            for k in j + 1..d {
                let mut v = vec![0u64; ambient];
                v[pair_index(i, j) * d + k] = 1;
                v[pair_index(j, k) * d + i] = 1;
                v[pair_index(i, k) * d + j] = field.neg(1);
                rows.push(v);
            }
        }
    }
    Subspace::from_rows(field, ambient, &rows).expect("consistent row lengths")
}

/// A quotient space presented by the subspace quotiented out and the
/// coordinates that survive: images of the standard basis vectors at the
/// non-pivot columns form a basis of the quotient.
#[derive(Clone, Debug)]
pub struct QuotientMap {
    sub: Subspace,
    nonpivot: Vec<usize>,
}

impl QuotientMap {
    pub fn new(sub: Subspace) -> Self {
        let pivots: Vec<usize> = sub.pivots().to_vec();
        let nonpivot = (0..sub.ambient()).filter(|c| !pivots.contains(c)).collect();
        QuotientMap { sub, nonpivot }
    }

    pub fn dim(&self) -> usize {
        self.nonpivot.len()
    }

    pub fn sub(&self) -> &Subspace {
        &self.sub
    }

    /// Ambient coordinates whose basis-vector classes form the quotient basis.
    pub fn nonpivot_columns(&self) -> &[usize] {
        &self.nonpivot
    }

    /// Quotient coordinates of an ambient vector.
    pub fn project(&self, v: &[u64]) -> Vec<u64> {
        let reduced = self.sub.coset_reduce(v);
        self.nonpivot.iter().map(|&c| reduced[c]).collect()
    }

    /// The ambient representative of quotient basis vector `i`.
    pub fn lift_basis(&self, i: usize) -> Vec<u64> {
        let mut v = vec![0u64; self.sub.ambient()];
        v[self.nonpivot[i]] = 1;
        v
    }

    /// Matrix of the action a generator induces on the quotient.
    /// pre: the generator stabilizes the subspace.
    pub fn induced(&self, g: &FMatrix) -> Result<FMatrix, ModuleError> {
        let field = g.field();
        let mut rows = Vec::with_capacity(self.dim());
        for i in 0..self.dim() {
            let image = g.apply_row(&self.lift_basis(i))?;
            rows.push(self.project(&image));
        }
        Ok(FMatrix::from_rows(field, &rows)?)
    }
}

/// The third Lie power realized as the quotient of wedge2 tensor V by
/// the alternating cube.
pub struct Lie3Module {
    pub module: MatModule,
    pub quotient: QuotientMap,
}

pub fn lie3_module(m: &MatModule) -> Result<Lie3Module, ModuleError> {
    if m.field.p() <= 3 {
        return Err(ModuleError::Shape(format!(
            "third Lie power as a wedge quotient needs p > 3, have p = {}",
            m.field.p()
        )));
    }
    let d = m.dim;
    let big = tensor_module(&exterior_square(m), m)?;
    let a3 = a3_submodule(m.field, d);
    // The cube must be invariant under every generator; this is exact,
    // not sampled.
    for (idx, g) in big.gens.iter().enumerate() {
        let moved = a3.apply(g)?;
        if !(a3.contains(&moved) && moved.dim() == a3.dim()) {
            return Err(ModuleError::Shape(format!(
                "alternating cube not invariant under generator {}",
                idx
            )));
        }
    }
    let quotient = QuotientMap::new(a3);
    let expected = (d * d * d - d) / 3;
    if quotient.dim() != expected {
        return Err(ModuleError::Shape(format!(
            "Lie power dimension {} != {}",
            quotient.dim(),
            expected
        )));
    }
    let gens: Result<Vec<FMatrix>, ModuleError> = big.gens.iter().map(|g| quotient.induced(g)).collect();
    let module = MatModule {
        field: m.field,
        dim: expected,
        gens: gens?,
        label: format!("lie3({})", m.label),
    };
    Ok(Lie3Module { module, quotient })
}

/// Coordinate machinery for the second and third Lie powers of the
/// natural module.  Degree 2 uses the wedge basis, with e_i ^ e_j
/// standing for the bracket [e_i, e_j].  Degree 3 is realized as the
/// span of the vectors [[e_i, e_j], e_k] inside the triple tensor
/// power, echelonized, with precomputed coordinates for every spanning
/// bracket so that arbitrary degree-3 brackets evaluate directly.
pub struct LiePowerBasis {
    field: PrimeField,
    d: usize,
    pairs: Vec<(usize, usize)>,
    l3_space: Subspace,
    /// Coordinates of [[e_i,e_j],e_k] for i < j, indexed by pair*d + k.
    t3_coords: Vec<Vec<u64>>,
}

/// [[e_i,e_j],e_k] expanded in the e_a (x) e_b (x) e_c basis:
/// ijk - jik - kij + kji, with coincidences accumulated.
fn triple_bracket_tensor(field: PrimeField, d: usize, i: usize, j: usize, k: usize) -> Vec<u64> {
    let idx = |a: usize, b: usize, c: usize| (a * d + b) * d + c;
    let mut v = vec![0u64; d * d * d];
    let m1 = field.neg(1);
    for (pos, sign) in [
        (idx(i, j, k), 1),
        (idx(j, i, k), m1),
        (idx(k, i, j), m1),
        (idx(k, j, i), 1),
    ] {
        v[pos] = field.add(v[pos], sign);
    }
    v
}

impl LiePowerBasis {
    pub fn new(field: PrimeField, d: usize) -> Result<Self, ModuleError> {
        let pairs = wedge_pairs(d);
        let n3 = d * d * d;
        let mut spanning = Vec::with_capacity(pairs.len() * d);
        for &(i, j) in &pairs {
            for k in 0..d {
                spanning.push(triple_bracket_tensor(field, d, i, j, k));
            }
        }
        let l3_space = if spanning.is_empty() {
            Subspace::zero(field, n3)
        } else {
            Subspace::from_rows(field, n3, &spanning)?
        };
        let expected = (d * d * d - d) / 3;
        if l3_space.dim() != expected {
            return Err(ModuleError::Shape(format!(
                "degree-3 bracket span has rank {}, expected {}",
                l3_space.dim(),
                expected
            )));
        }
        let mut basis = LiePowerBasis { field, d, pairs, l3_space, t3_coords: Vec::new() };
        // Every spanning bracket must express in the echelon basis; the
        // coordinates double as the bracket-evaluation table.
        let mut coords = Vec::with_capacity(spanning.len());
        for t in &spanning {
            coords.push(basis.l3_coords(t)?);
        }
        basis.t3_coords = coords;
        Ok(basis)
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn l2_dim(&self) -> usize {
        self.pairs.len()
    }

    pub fn l3_dim(&self) -> usize {
        self.l3_space.dim()
    }

    pub fn l3_space(&self) -> &Subspace {
        &self.l3_space
    }

    /// Index of (i, j), i < j, in the wedge basis.
    pub fn pair_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.d);
        i * self.d - i * (i + 1) / 2 + (j - i - 1)
    }

    /// Coordinates of a triple-tensor vector in the degree-3 basis.
    /// Errors when the vector is outside the bracket span.
    pub fn l3_coords(&self, t: &[u64]) -> Result<Vec<u64>, ModuleError> {
        if t.len() != self.d * self.d * self.d {
            return Err(ModuleError::Shape("triple-tensor vector of wrong length".to_string()));
        }
        let f = self.field;
        let coords: Vec<u64> = self.l3_space.pivots().iter().map(|&c| t[c]).collect();
        let b = self.l3_space.basis();
        let mut acc = vec![0u64; t.len()];
        for (m, &c) in coords.iter().enumerate() {
            if c != 0 {
                for (x, &r) in acc.iter_mut().zip(b.row(m)) {
                    *x = f.add(*x, f.mul(c, r));
                }
            }
        }
        if acc != t {
            return Err(ModuleError::Shape("vector outside the degree-3 bracket space".to_string()));
        }
        Ok(coords)
    }

    /// [u, v] in wedge coordinates.
    pub fn bracket_vv(&self, u: &[u64], v: &[u64]) -> Result<Vec<u64>, ModuleError> {
        if u.len() != self.d || v.len() != self.d {
            return Err(ModuleError::Shape("bracket operand of wrong length".to_string()));
        }
        let f = self.field;
        Ok(self
            .pairs
            .iter()
            .map(|&(i, j)| f.sub(f.mul(u[i], v[j]), f.mul(u[j], v[i])))
            .collect())
    }

    /// [xi, w] for xi in wedge coordinates, result in degree-3 coordinates.
    pub fn bracket_l2_v(&self, xi: &[u64], w: &[u64]) -> Result<Vec<u64>, ModuleError> {
        if xi.len() != self.pairs.len() || w.len() != self.d {
            return Err(ModuleError::Shape("bracket operand of wrong length".to_string()));
        }
        let f = self.field;
        let mut out = vec![0u64; self.l3_dim()];
        for (a, &c) in xi.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (k, &wk) in w.iter().enumerate() {
                let s = f.mul(c, wk);
                if s == 0 {
                    continue;
                }
                for (x, &t) in out.iter_mut().zip(&self.t3_coords[a * self.d + k]) {
                    *x = f.add(*x, f.mul(s, t));
                }
            }
        }
        Ok(out)
    }

    /// [[u, v], w] in degree-3 coordinates.
    pub fn bracket_vvv(&self, u: &[u64], v: &[u64], w: &[u64]) -> Result<Vec<u64>, ModuleError> {
        let uv = self.bracket_vv(u, v)?;
        self.bracket_l2_v(&uv, w)
    }

    /// Matrix of the action g (x) g (x) g induces on the degree-3 basis.
    pub fn induced_l3_action(&self, g: &FMatrix) -> Result<FMatrix, ModuleError> {
        if g.rows() != self.d || g.cols() != self.d {
            return Err(ModuleError::Shape("matrix dimension mismatch".to_string()));
        }
        let ggg = g.kronecker(g)?.kronecker(g)?;
        let mut rows = Vec::with_capacity(self.l3_dim());
        for m in 0..self.l3_dim() {
            let image = ggg.apply_row(self.l3_space.basis().row(m))?;
            rows.push(self.l3_coords(&image)?);
        }
        Ok(FMatrix::from_rows(self.field, &rows)?)
    }
}

/// The change of realization from the wedge-quotient Lie cube to the
/// triple-tensor one: the class of (e_i ^ e_j) (x) e_k maps to
/// [[e_i, e_j], e_k].  Checked invertible and intertwining on every
/// generator before being returned.
pub fn lie3_realization_map(m: &MatModule) -> Result<FMatrix, ModuleError> {
    let l3 = lie3_module(m)?;
    let basis = LiePowerBasis::new(m.field, m.dim)?;
    let rows: Vec<Vec<u64>> = l3
        .quotient
        .nonpivot_columns()
        .iter()
        .map(|&c| basis.t3_coords[c].clone())
        .collect();
    let phi = FMatrix::from_rows(m.field, &rows)?;
    if !phi.is_invertible() {
        return Err(ModuleError::Shape("realization map is singular".to_string()));
    }
    for (q_g, g) in l3.module.gens.iter().zip(&m.gens) {
        let t_g = basis.induced_l3_action(g)?;
        if q_g.mul(&phi)? != phi.mul(&t_g)? {
            return Err(ModuleError::Shape("realization map fails to intertwine".to_string()));
        }
    }
    Ok(phi)
}

/// Incremental row-echelon accumulator for spinning.
struct Echelon {
    field: PrimeField,
    n: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl Echelon {
    fn new(field: PrimeField, n: usize) -> Self {
        Echelon { field, n, rows: Vec::new(), pivots: Vec::new() }
    }

    fn reduce(&self, v: &[u64]) -> Vec<u64> {
        let f = self.field;
        let mut v = v.to_vec();
        for (row, &piv) in self.rows.iter().zip(&self.pivots) {
            if v[piv] != 0 {
                let c = v[piv];
                for (x, &r) in v.iter_mut().zip(row.iter()) {
                    *x = f.sub(*x, f.mul(c, r));
                }
            }
        }
        v
    }

    /// Returns true if the vector enlarged the span.
    fn insert(&mut self, v: &[u64]) -> bool {
        let f = self.field;
        let mut v = self.reduce(v);
        let Some(piv) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = f.inv(v[piv]);
        for x in v.iter_mut() {
            *x = f.mul(*x, inv);
        }
        self.rows.push(v);
        self.pivots.push(piv);
        true
    }

    fn dim(&self) -> usize {
        self.rows.len()
    }

    fn into_subspace(self) -> Subspace {
        Subspace::from_rows(self.field, self.n, &self.rows).expect("echelon rows consistent")
    }
}

/// Smallest generator-invariant subspace containing the seeds.
pub fn spin(m: &MatModule, seeds: &[Vec<u64>]) -> Result<Subspace, ModuleError> {
    let mut ech = Echelon::new(m.field, m.dim);
    let mut queue: Vec<Vec<u64>> = Vec::new();
    for s in seeds {
        if s.len() != m.dim {
            return Err(ModuleError::Shape(format!("seed length {} != dimension {}", s.len(), m.dim)));
        }
        if ech.insert(s) {
            queue.push(s.clone());
        }
    }
    while let Some(v) = queue.pop() {
        if ech.dim() == m.dim {
            break;
        }
        for g in &m.gens {
            let w = g.apply_row(&v)?;
            if ech.insert(&w) {
                queue.push(w);
            }
        }
    }
    Ok(ech.into_subspace())
}

#[derive(Debug)]
pub enum Irreducibility {
    Irreducible,
    /// A proper nonzero submodule.
    Reducible(Subspace),
}

fn random_algebra_element(m: &MatModule, rng: &mut ChaCha8Rng) -> Result<FMatrix, ModuleError> {
    // Random combination of short words in the generators.
    let p = m.field.p();
    let mut acc = FMatrix::zero(m.field, m.dim, m.dim);
    let words = 2 + m.gens.len();
    for _ in 0..words {
        let mut w = FMatrix::identity(m.field, m.dim);
        let len = rng.gen_range(1..=3);
        for _ in 0..len {
            let g = &m.gens[rng.gen_range(0..m.gens.len())];
            w = w.mul(g)?;
        }
        let c = rng.gen_range(1..p);
        acc = acc.add(&w.scalar_mul(c))?;
    }
    Ok(acc)
}

fn kernel_rows(theta: &FMatrix) -> Vec<Vec<u64>> {
    let k = theta.kernel();
    (0..k.rows()).map(|i| k.row_vec(i)).collect()
}

/// Irreducibility by the singular-element criterion: for a singular
/// algebra element theta, the module is irreducible exactly when every
/// kernel basis vector spins to the whole space and one kernel vector of
/// the transposed element spins to the whole space in the transposed
/// module.  Either failure hands back an explicit proper submodule.
pub fn is_irreducible(m: &MatModule, cfg: &ProbeConfig) -> Result<Irreducibility, ModuleError> {
    if m.dim == 1 {
        return Ok(Irreducibility::Irreducible);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let p = m.field.p();
    for _ in 0..cfg.retries {
        let base = random_algebra_element(m, &mut rng)?;
        // Shift by scalars until the element goes singular; the char
        // polynomial usually has a root in the prime field.
        let mut found: Option<FMatrix> = None;
        for mu in 0..p {
            let theta = base.sub(&FMatrix::identity(m.field, m.dim).scalar_mul(mu))?;
            if theta.is_zero() {
                continue;
            }
            if !theta.is_invertible() {
                found = Some(theta);
                break;
            }
        }
        let Some(theta) = found else { continue };

        for v in kernel_rows(&theta) {
            let s = spin(m, &[v])?;
            if !s.is_full() {
                return Ok(Irreducibility::Reducible(s));
            }
        }
        let tm = m.transpose_module();
        let tker = kernel_rows(&theta.transpose());
        let w = tker.first().expect("transpose of singular matrix is singular");
        let ts = spin(&tm, &[w.clone()])?;
        if ts.is_full() {
            return Ok(Irreducibility::Irreducible);
        }
        // The annihilator of a transpose-module submodule is a
        // submodule: vectors killed by every basis functional.
        let ann = ts.basis().transpose().kernel();
        let sub = Subspace::from_matrix(&ann);
        if sub.is_zero() || sub.is_full() {
            return Err(ModuleError::Shape("annihilator degenerated".to_string()));
        }
        return Ok(Irreducibility::Reducible(sub));
    }
    Err(ModuleError::Inconclusive { retries: cfg.retries })
}

/// Basis of the space of module maps m -> n (matrices T with
/// g_m * T = T * g_n for every generator pair).
pub fn hom_space(m: &MatModule, n: &MatModule) -> Result<Vec<FMatrix>, ModuleError> {
    if m.field.p() != n.field.p() {
        return Err(ModuleError::Shape("hom over different fields".to_string()));
    }
    if m.gens.len() != n.gens.len() {
        return Err(ModuleError::Shape("hom between modules with different generator lists".to_string()));
    }
    let f = m.field;
    let (a, b) = (m.dim, n.dim);
    let unknowns = a * b;
    let eqs = m.gens.len() * a * b;
    // Unknown vector x = vec(T), row convention: x * constraint = 0.
    let mut cons = FMatrix::zero(f, unknowns, eqs);
    for (gi, (gm, gn)) in m.gens.iter().zip(&n.gens).enumerate() {
        for i in 0..a {
            for col in 0..b {
                let eq = gi * a * b + i * b + col;
                // (g_m T)_{i,col} = sum_r (g_m)_{i,r} T_{r,col}
                for r in 0..a {
                    let cur = cons.get(r * b + col, eq);
                    cons.set(r * b + col, eq, f.add(cur, gm.get(i, r)));
                }
                // -(T g_n)_{i,col} = -sum_c T_{i,c} (g_n)_{c,col}
                for c in 0..b {
                    let cur = cons.get(i * b + c, eq);
                    cons.set(i * b + c, eq, f.sub(cur, gn.get(c, col)));
                }
            }
        }
    }
    let ker = cons.kernel();
    let mut basis = Vec::with_capacity(ker.rows());
    for r in 0..ker.rows() {
        let x = ker.row(r);
        basis.push(FMatrix::from_fn(f, a, b, |i, j| x[i * b + j]));
    }
    Ok(basis)
}

/// Looks for an invertible element of hom(m, n): basis elements first,
/// then seeded random combinations.
pub fn is_isomorphic(m: &MatModule, n: &MatModule, cfg: &ProbeConfig) -> Result<Option<FMatrix>, ModuleError> {
    if m.dim != n.dim {
        return Ok(None);
    }
    let homs = hom_space(m, n)?;
    if homs.is_empty() {
        return Ok(None);
    }
    for t in &homs {
        if t.is_invertible() {
            return Ok(Some(t.clone()));
        }
    }
    let p = m.field.p();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x150);
    for _ in 0..200 {
        let mut t = FMatrix::zero(m.field, m.dim, n.dim);
        for h in &homs {
            t = t.add(&h.scalar_mul(rng.gen_range(0..p)))?;
        }
        if t.is_invertible() {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

/// Action restricted to an invariant subspace, in its echelon basis.
/// RREF basis rows have unit pivots and zeros above, so in-span
/// coordinates can be read off the pivot columns.
pub fn submodule_action(m: &MatModule, s: &Subspace) -> Result<MatModule, ModuleError> {
    let pivots = s.pivots();
    let mut gens = Vec::with_capacity(m.gens.len());
    for g in &m.gens {
        let mut rows = Vec::with_capacity(s.dim());
        for i in 0..s.dim() {
            let image = g.apply_row(s.basis().row(i))?;
            let coords: Vec<u64> = pivots.iter().map(|&c| image[c]).collect();
            // Confirm the image is in the subspace, not merely projected.
            if !s.contains_vec(&image) {
                return Err(ModuleError::Shape("subspace is not invariant".to_string()));
            }
            rows.push(coords);
        }
        gens.push(FMatrix::from_rows(m.field, &rows)?);
    }
    MatModule::new(m.field, s.dim(), gens, &format!("{}|sub{}", m.label, s.dim()))
}

/// Action induced on the quotient by an invariant subspace.
pub fn quotient_action(m: &MatModule, s: &Subspace) -> Result<MatModule, ModuleError> {
    let q = QuotientMap::new(s.clone());
    let gens: Result<Vec<FMatrix>, ModuleError> = m.gens.iter().map(|g| q.induced(g)).collect();
    MatModule::new(m.field, q.dim(), gens?, &format!("{}/sub{}", m.label, s.dim()))
}

/// One isomorphism class of composition factors.
pub struct MatFactor {
    pub dim: usize,
    pub multiplicity: usize,
    pub rep: MatModule,
}

/// Composition factors by recursive splitting; factors of equal
/// dimension are merged into classes by isomorphism testing.
pub fn composition_factors_matrix(m: &MatModule, cfg: &ProbeConfig) -> Result<Vec<MatFactor>, ModuleError> {
    fn split(m: &MatModule, cfg: &ProbeConfig, out: &mut Vec<MatModule>) -> Result<(), ModuleError> {
        if m.dim == 0 {
            return Ok(());
        }
        match is_irreducible(m, cfg)? {
            Irreducibility::Irreducible => {
                out.push(m.clone());
                Ok(())
            }
            Irreducibility::Reducible(s) => {
                split(&submodule_action(m, &s)?, cfg, out)?;
                split(&quotient_action(m, &s)?, cfg, out)
            }
        }
    }
    let mut irr = Vec::new();
    split(m, cfg, &mut irr)?;
    let mut classes: Vec<MatFactor> = Vec::new();
    'next: for f in irr {
        for c in classes.iter_mut() {
            if c.dim == f.dim && is_isomorphic(&c.rep, &f, cfg)?.is_some() {
                c.multiplicity += 1;
                continue 'next;
            }
        }
        classes.push(MatFactor { dim: f.dim, multiplicity: 1, rep: f });
    }
    classes.sort_by(|a, b| b.dim.cmp(&a.dim));
    Ok(classes)
}

/// Sum of the images of all module maps rep -> m: the isotypic part of
/// the socle for that class.
fn socle_component(rep: &MatModule, m: &MatModule) -> Result<Subspace, ModuleError> {
    let mut acc = Subspace::zero(m.field, m.dim);
    for t in hom_space(rep, m)? {
        let rows: Vec<Vec<u64>> = (0..t.rows()).map(|i| t.row_vec(i)).collect();
        let img = Subspace::from_rows(m.field, m.dim, &rows)?;
        acc = acc.sum(&img)?;
    }
    Ok(acc)
}

fn socle(m: &MatModule, classes: &[MatFactor]) -> Result<Subspace, ModuleError> {
    let mut acc = Subspace::zero(m.field, m.dim);
    for c in classes {
        acc = acc.sum(&socle_component(&c.rep, m)?)?;
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LatticeShape {
    MultiplicityFree,
    Uniserial,
}

pub struct LatticeNode {
    pub dim: usize,
    pub space: Subspace,
}

/// Submodule lattice for the two shapes the factor tables produce:
/// semisimple with pairwise distinct factors (all sums of socle
/// components) or uniserial (a single chain).
pub struct SubmoduleLattice {
    pub shape: LatticeShape,
    pub nodes: Vec<LatticeNode>,
    /// Covering containments between node indices (sub, super).
    pub edges: Vec<(usize, usize)>,
}

pub fn socle_and_lattice(m: &MatModule, cfg: &ProbeConfig) -> Result<SubmoduleLattice, ModuleError> {
    let classes = composition_factors_matrix(m, cfg)?;
    let multiplicity_free = classes.iter().all(|c| c.multiplicity == 1);

    if multiplicity_free {
        let mut comps = Vec::new();
        for c in &classes {
            let comp = socle_component(&c.rep, m)?;
            if comp.dim() != c.dim {
                return Err(ModuleError::UnsupportedShape(format!(
                    "factor of dimension {} contributes a socle part of dimension {}; module is not semisimple",
                    c.dim,
                    comp.dim()
                )));
            }
            comps.push(comp);
        }
        let total: usize = comps.iter().map(|s| s.dim()).sum();
        if total != m.dim {
            return Err(ModuleError::UnsupportedShape(
                "distinct factors but socle is proper; module is neither semisimple nor uniserial".to_string(),
            ));
        }
        // All subset sums, ordered by popcount then index; edges connect
        // subsets differing in one component.
        let k = comps.len();
        let mut subsets: Vec<u32> = (0..(1u32 << k)).collect();
        subsets.sort_by_key(|s| (s.count_ones(), *s));
        let mut nodes = Vec::with_capacity(subsets.len());
        for &sset in &subsets {
            let mut space = Subspace::zero(m.field, m.dim);
            for (i, comp) in comps.iter().enumerate() {
                if sset & (1 << i) != 0 {
                    space = space.sum(comp)?;
                }
            }
            nodes.push(LatticeNode { dim: space.dim(), space });
        }
        let pos: std::collections::HashMap<u32, usize> =
            subsets.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let mut edges = Vec::new();
        for &sset in &subsets {
            for i in 0..k {
                if sset & (1 << i) == 0 {
                    edges.push((pos[&sset], pos[&(sset | (1 << i))]));
                }
            }
        }
        return Ok(SubmoduleLattice { shape: LatticeShape::MultiplicityFree, nodes, edges });
    }

    // Uniserial check: the socle of each successive quotient must be
    // irreducible; track the chain by pulling socles back.
    let mut chain: Vec<Subspace> = vec![Subspace::zero(m.field, m.dim)];
    loop {
        let current = chain.last().unwrap();
        if current.is_full() {
            break;
        }
        let quot_map = QuotientMap::new(current.clone());
        let quot = quotient_action(m, current)?;
        let qclasses = composition_factors_matrix(&quot, cfg)?;
        let soc = socle(&quot, &qclasses)?;
        if soc.is_zero() {
            return Err(ModuleError::UnsupportedShape("socle vanished before the chain closed".to_string()));
        }
        let irreducible_layer = qclasses
            .iter()
            .map(|c| c.dim * c.multiplicity)
            .sum::<usize>()
            > 0
            && {
                let sub = submodule_action(&quot, &soc)?;
                matches!(is_irreducible(&sub, cfg)?, Irreducibility::Irreducible)
            };
        if !irreducible_layer {
            return Err(ModuleError::UnsupportedShape(
                "a socle layer is not irreducible; module is neither multiplicity free nor uniserial".to_string(),
            ));
        }
        // Pull the socle back to the ambient space.
        let mut rows: Vec<Vec<u64>> = Vec::new();
        for i in 0..current.dim() {
            rows.push(current.basis().row_vec(i));
        }
        for i in 0..soc.dim() {
            // A quotient vector lifts through the surviving coordinates.
            let mut lift = vec![0u64; m.dim];
            for (j, &coord) in soc.basis().row(i).iter().enumerate() {
                let rep = quot_map.lift_basis(j);
                for (x, &r) in lift.iter_mut().zip(rep.iter()) {
                    *x = m.field.add(*x, m.field.mul(coord, r));
                }
            }
            rows.push(lift);
        }
        let next = Subspace::from_rows(m.field, m.dim, &rows)?;
        if next.dim() <= current.dim() {
            return Err(ModuleError::UnsupportedShape("socle chain stalled".to_string()));
        }
        chain.push(next);
    }
    let nodes: Vec<LatticeNode> = chain.into_iter().map(|s| LatticeNode { dim: s.dim(), space: s }).collect();
    let edges: Vec<(usize, usize)> = (1..nodes.len()).map(|i| (i - 1, i)).collect();
    Ok(SubmoduleLattice { shape: LatticeShape::Uniserial, nodes, edges })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormKind {
    Symmetric,
    Alternating,
    Mixed,
}

pub struct InvariantForm {
    pub matrix: FMatrix,
    pub kind: FormKind,
    pub nondegenerate: bool,
}

/// Basis of the space of invariant bilinear forms: matrices B with
/// g B g^T = B for every generator, classified by symmetry type.
pub fn invariant_forms(m: &MatModule) -> Result<Vec<InvariantForm>, ModuleError> {
    // B is an invariant form exactly when B viewed as a map to the dual
    // module intertwines: g B = B (g^{-1})^T, i.e. hom(m, dual m).
    let f = m.field;
    let dual_gens: Result<Vec<FMatrix>, FieldError> =
        m.gens.iter().map(|g| Ok(g.inverse()?.transpose())).collect();
    let dual = MatModule {
        field: f,
        dim: m.dim,
        gens: dual_gens?,
        label: format!("dual({})", m.label),
    };
    let basis = hom_space(m, &dual)?;
    let mut out = Vec::with_capacity(basis.len());
    for b in basis {
        let bt = b.transpose();
        let kind = if b == bt {
            FormKind::Symmetric
        } else if bt.scalar_mul(f.neg(1)) == b && (0..m.dim).all(|i| b.get(i, i) == 0) {
            FormKind::Alternating
        } else {
            FormKind::Mixed
        };
        let nondegenerate = b.is_invertible();
        out.push(InvariantForm { matrix: b, kind, nondegenerate });
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InducedAction {
    Natural,
    ExteriorSquare,
    LieCube,
}

/// Matrix of the action a single invertible matrix induces on V, on
/// wedge2 V, or on the Lie cube quotient.
pub fn induced_matrix(g: &FMatrix, action: InducedAction) -> Result<FMatrix, ModuleError> {
    match action {
        InducedAction::Natural => Ok(g.clone()),
        InducedAction::ExteriorSquare => Ok(exterior_square_matrix(g)),
        InducedAction::LieCube => {
            let f = g.field();
            let d = g.rows();
            let big = exterior_square_matrix(g).kronecker(g)?;
            let a3 = a3_submodule(f, d);
            let moved = a3.apply(&big)?;
            if !(a3.contains(&moved) && moved.dim() == a3.dim()) {
                return Err(ModuleError::Shape("matrix does not preserve the alternating cube".to_string()));
            }
            QuotientMap::new(a3).induced(&big)
        }
    }
}

/// Whether g's induced action maps the subspace into itself.
pub fn stabilizes(g: &FMatrix, s: &Subspace, action: InducedAction) -> Result<bool, ModuleError> {
    let ind = induced_matrix(g, action)?;
    if ind.rows() != s.ambient() {
        return Err(ModuleError::Shape(format!(
            "induced action has dimension {}, subspace ambient is {}",
            ind.rows(),
            s.ambient()
        )));
    }
    for i in 0..s.dim() {
        let image = ind.apply_row(s.basis().row(i))?;
        if !s.contains_vec(&image) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn mat(p: u64, rows: &[&[u64]]) -> FMatrix {
        let rows: Vec<Vec<u64>> = rows.iter().map(|r| r.to_vec()).collect();
        FMatrix::from_rows(f(p), &rows).unwrap()
    }

    /// Cyclic shift plus a diagonal with distinct eigenvalues: acts
    /// irreducibly on F_5^3 and its endomorphisms are scalars.
    fn irreducible3() -> MatModule {
        let s = mat(5, &[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]]);
        let d = mat(5, &[&[1, 0, 0], &[0, 2, 0], &[0, 0, 4]]);
        MatModule::new(f(5), 3, vec![s, d], "irr3").unwrap()
    }

    fn block_diag(a: &MatModule, b: &MatModule) -> MatModule {
        let n = a.dim() + b.dim();
        let gens: Vec<FMatrix> = a
            .gens()
            .iter()
            .zip(b.gens())
            .map(|(ga, gb)| {
                FMatrix::from_fn(a.field(), n, n, |i, j| {
                    if i < a.dim() && j < a.dim() {
                        ga.get(i, j)
                    } else if i >= a.dim() && j >= a.dim() {
                        gb.get(i - a.dim(), j - a.dim())
                    } else {
                        0
                    }
                })
            })
            .collect();
        MatModule::new(a.field(), n, gens, "blockdiag").unwrap()
    }

    #[test]
    fn generator_parsing() {
        let good = "2 5 2\n1 1\n0 1\n0 1\n4 0\n";
        let m = parse_generators(good, "t").unwrap();
        assert_eq!(m.dim(), 2);
        assert_eq!(m.gens().len(), 2);
        let singular = "2 5 1\n1 1\n2 2\n";
        assert!(matches!(parse_generators(singular, "t"), Err(ModuleError::SingularGenerator { index: 0 })));
        let short = "2 5 1\n1 1\n";
        assert!(matches!(parse_generators(short, "t"), Err(ModuleError::Parse { .. })));
    }

    #[test]
    fn exterior_square_basics() {
        let id = FMatrix::identity(f(7), 4);
        assert_eq!(exterior_square_matrix(&id), FMatrix::identity(f(7), 6));
        let scalar = id.scalar_mul(3);
        assert_eq!(exterior_square_matrix(&scalar), FMatrix::identity(f(7), 6).scalar_mul(2));
    }

    #[test]
    fn exterior_square_determinant_and_functoriality() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let field = f(7);
        for _ in 0..10 {
            let g = loop {
                let cand = FMatrix::from_fn(field, 4, 4, |_, _| rng.gen_range(0..7));
                if cand.is_invertible() {
                    break cand;
                }
            };
            let h = loop {
                let cand = FMatrix::from_fn(field, 4, 4, |_, _| rng.gen_range(0..7));
                if cand.is_invertible() {
                    break cand;
                }
            };
            // det of the induced map is det(g)^(d-1) with d = 4.
            let dg = g.det().unwrap();
            let wedge = exterior_square_matrix(&g);
            assert_eq!(wedge.det().unwrap(), field.pow(dg, 3));
            let gh = g.mul(&h).unwrap();
            assert_eq!(
                exterior_square_matrix(&gh),
                exterior_square_matrix(&g).mul(&exterior_square_matrix(&h)).unwrap()
            );
        }
    }

    #[test]
    fn alternating_cube_dimensions() {
        assert_eq!(a3_submodule(f(5), 4).dim(), 4);
        assert_eq!(a3_submodule(f(5), 7).dim(), 35);
    }

    #[test]
    fn lie3_dimension_and_invariance() {
        let m = irreducible3();
        let l3 = lie3_module(&m).unwrap();
        assert_eq!(l3.module.dim(), 8);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let field = f(5);
        for _ in 0..5 {
            let g = loop {
                let cand = FMatrix::from_fn(field, 4, 4, |_, _| rng.gen_range(0..5));
                if cand.is_invertible() {
                    break cand;
                }
            };
            let single = MatModule::new(field, 4, vec![g], "rand4").unwrap();
            let l3 = lie3_module(&single).unwrap();
            assert_eq!(l3.module.dim(), 20);
        }
    }

    #[test]
    fn spin_behaviour() {
        let m = irreducible3();
        assert!(spin(&m, &[vec![0, 0, 0]]).unwrap().is_zero());
        assert!(spin(&m, &[vec![1, 0, 0]]).unwrap().is_full());
        let two = block_diag(&irreducible3(), &irreducible3());
        let s = spin(&two, &[vec![1, 0, 0, 0, 0, 0]]).unwrap();
        assert_eq!(s.dim(), 3);
    }

    #[test]
    fn irreducibility_and_witnesses() {
        let cfg = ProbeConfig::default();
        let m = irreducible3();
        assert!(matches!(is_irreducible(&m, &cfg).unwrap(), Irreducibility::Irreducible));
        let two = block_diag(&irreducible3(), &irreducible3());
        match is_irreducible(&two, &cfg).unwrap() {
            Irreducibility::Reducible(s) => {
                assert!(s.dim() > 0 && s.dim() < 6);
                // The witness really is invariant.
                assert!(submodule_action(&two, &s).is_ok());
            }
            other => panic!("expected a witness, got {other:?}"),
        }
    }

    #[test]
    fn hom_space_schur() {
        let m = irreducible3();
        let homs = hom_space(&m, &m).unwrap();
        assert_eq!(homs.len(), 1);
        let two = block_diag(&irreducible3(), &irreducible3());
        assert_eq!(hom_space(&m, &two).unwrap().len(), 2);
        assert!(is_isomorphic(&m, &m, &ProbeConfig::default()).unwrap().is_some());
    }

    #[test]
    fn composition_factors_merge_classes() {
        let cfg = ProbeConfig::default();
        let two = block_diag(&irreducible3(), &irreducible3());
        let classes = composition_factors_matrix(&two, &cfg).unwrap();
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].dim, 3);
        assert_eq!(classes[0].multiplicity, 2);
        // Jordan block: three trivial factors.
        let j = mat(5, &[&[1, 1, 0], &[0, 1, 1], &[0, 0, 1]]);
        let jm = MatModule::new(f(5), 3, vec![j], "jordan").unwrap();
        let classes = composition_factors_matrix(&jm, &cfg).unwrap();
        assert_eq!(classes.len(), 1);
        assert_eq!((classes[0].dim, classes[0].multiplicity), (1, 3));
    }

    #[test]
    fn lattice_of_direct_sum_is_diamond() {
        let cfg = ProbeConfig::default();
        // Two non-isomorphic irreducibles: twist the second by replacing
        // the diagonal so the modules cannot intertwine.
        let s = mat(5, &[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]]);
        let d2 = mat(5, &[&[2, 0, 0], &[0, 4, 0], &[0, 0, 3]]);
        let other = MatModule::new(f(5), 3, vec![s, d2], "irr3b").unwrap();
        assert!(is_isomorphic(&irreducible3(), &other, &cfg).unwrap().is_none());
        let sum = block_diag(&irreducible3(), &other);
        let lat = socle_and_lattice(&sum, &cfg).unwrap();
        assert_eq!(lat.shape, LatticeShape::MultiplicityFree);
        let mut dims: Vec<usize> = lat.nodes.iter().map(|n| n.dim).collect();
        dims.sort_unstable();
        assert_eq!(dims, vec![0, 3, 3, 6]);
        assert_eq!(lat.edges.len(), 4);
    }

    #[test]
    fn lattice_of_jordan_block_is_chain() {
        let cfg = ProbeConfig::default();
        let j = mat(5, &[&[1, 1, 0], &[0, 1, 1], &[0, 0, 1]]);
        let jm = MatModule::new(f(5), 3, vec![j], "jordan").unwrap();
        let lat = socle_and_lattice(&jm, &cfg).unwrap();
        assert_eq!(lat.shape, LatticeShape::Uniserial);
        let dims: Vec<usize> = lat.nodes.iter().map(|n| n.dim).collect();
        assert_eq!(dims, vec![0, 1, 2, 3]);
    }

    #[test]
    fn invariant_forms_of_rotation() {
        // The order-4 rotation preserves the identity form.
        let r = mat(5, &[&[0, 1], &[4, 0]]);
        let m = MatModule::new(f(5), 2, vec![r], "rot").unwrap();
        let forms = invariant_forms(&m).unwrap();
        assert!(forms
            .iter()
            .any(|form| form.kind == FormKind::Symmetric && form.nondegenerate));
    }

    #[test]
    fn scalars_stabilize_everything() {
        let field = f(5);
        let scalar = FMatrix::identity(field, 4).scalar_mul(3);
        let s2 = Subspace::from_rows(field, 6, &[vec![1, 2, 0, 0, 3, 0]]).unwrap();
        assert!(stabilizes(&scalar, &s2, InducedAction::ExteriorSquare).unwrap());
        let s3 = Subspace::from_rows(field, 20, &[{
            let mut v = vec![0u64; 20];
            v[7] = 1;
            v[13] = 4;
            v
        }])
        .unwrap();
        assert!(stabilizes(&scalar, &s3, InducedAction::LieCube).unwrap());
    }

    #[test]
    fn lie_power_basis_sizes() {
        let b3 = LiePowerBasis::new(f(5), 3).unwrap();
        assert_eq!((b3.l2_dim(), b3.l3_dim()), (3, 8));
        let b7 = LiePowerBasis::new(f(7), 7).unwrap();
        assert_eq!((b7.l2_dim(), b7.l3_dim()), (21, 112));
        for (a, &(i, j)) in b7.pairs().iter().enumerate() {
            assert_eq!(b7.pair_index(i, j), a);
        }
    }

    #[test]
    fn degree3_rank_matches_brute_force_for_small_d() {
        // Span of every ordered triple bracket, echelonized from scratch.
        for d in 2..=4 {
            let field = f(7);
            let mut rows = Vec::new();
            for i in 0..d {
                for j in 0..d {
                    for k in 0..d {
                        rows.push(triple_bracket_tensor(field, d, i, j, k));
                    }
                }
            }
            let s = Subspace::from_rows(field, d * d * d, &rows).unwrap();
            assert_eq!(s.dim(), (d * d * d - d) / 3);
            assert_eq!(LiePowerBasis::new(field, d).unwrap().l3_dim(), s.dim());
        }
    }

    #[test]
    fn bracket_identities() {
        let b = LiePowerBasis::new(f(7), 4).unwrap();
        let field = f(7);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut rand_vec = || -> Vec<u64> { (0..4).map(|_| rng.gen_range(0..7)).collect() };
        for _ in 0..20 {
            let (u, v, w) = (rand_vec(), rand_vec(), rand_vec());
            // Antisymmetry in degree 2.
            let uv = b.bracket_vv(&u, &v).unwrap();
            let vu = b.bracket_vv(&v, &u).unwrap();
            let neg: Vec<u64> = vu.iter().map(|&x| field.neg(x)).collect();
            assert_eq!(uv, neg);
            assert!(b.bracket_vv(&u, &u).unwrap().iter().all(|&x| x == 0));
            // Jacobi in degree 3.
            let a = b.bracket_vvv(&u, &v, &w).unwrap();
            let c = b.bracket_vvv(&v, &w, &u).unwrap();
            let e = b.bracket_vvv(&w, &u, &v).unwrap();
            for i in 0..b.l3_dim() {
                assert_eq!(field.add(field.add(a[i], c[i]), e[i]), 0);
            }
        }
    }

    #[test]
    fn realizations_of_lie_cube_agree() {
        let phi = lie3_realization_map(&irreducible3()).unwrap();
        assert_eq!(phi.rows(), 8);
        let field = f(7);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let g = loop {
            let cand = FMatrix::from_fn(field, 4, 4, |_, _| rng.gen_range(0..7));
            if cand.is_invertible() {
                break cand;
            }
        };
        let m = MatModule::new(field, 4, vec![g], "rand4").unwrap();
        assert_eq!(lie3_realization_map(&m).unwrap().rows(), 20);
    }

    #[test]
    fn quotient_and_sub_dimensions_add_up() {
        let two = block_diag(&irreducible3(), &irreducible3());
        let s = spin(&two, &[vec![1, 0, 0, 0, 0, 0]]).unwrap();
        let sub = submodule_action(&two, &s).unwrap();
        let quot = quotient_action(&two, &s).unwrap();
        assert_eq!(sub.dim() + quot.dim(), two.dim());
    }
}
