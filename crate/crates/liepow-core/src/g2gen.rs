//! Deterministic construction of generators for G2 in its 7-dimensional
//! module, for any odd prime.
//!
//! The route is elementary and fully checked at every step: build the
//! split octonions as Zorn vector matrices over the integers, compute the
//! derivation algebra as an exact rational kernel (it comes out
//! 14-dimensional), split it into root spaces under two commuting
//! diagonal derivations, pick a simple system by the G2 chain condition,
//! scale the four simple root elements to primitive integer matrices on
//! the trace-zero 7-space, and exponentiate them mod p.  The exponentials
//! are unipotent, so every generator has determinant 1, and the group
//! they generate is the full group of Lie type because the simple and
//! negative-simple root subgroups already generate it.
//!
//! All arithmetic before reduction is exact over Q; the only denominator
//! the exponentials introduce is 2, so every odd prime reduces cleanly.

use crate::field::{FMatrix, PrimeField};
use crate::matmod::{
    composition_factors_matrix, exterior_square, invariant_forms, is_irreducible, is_isomorphic,
    quotient_action, socle_and_lattice, FormKind, Irreducibility, LatticeShape, MatModule,
    ModuleError, ProbeConfig,
};
use crate::rational::{rat, solve_row, Rat, RatMatrix};
use num::integer::{gcd, lcm};
use num::{BigInt, One, Signed, ToPrimitive, Zero};
use std::fmt::Write as _;
use std::sync::OnceLock;

/// Octonion basis order: u1, u2, e1, e2, e3, f1, f2, f3, where u1/u2 are
/// the diagonal idempotents of the Zorn matrix and e/f fill the two
/// vector slots.
const OCT_DIM: usize = 8;

/// Zorn vector-matrix product of (a1,v1;w1,b1) and (a2,v2;w2,b2):
/// scalar parts a1*a2 + v1.w2 and b1*b2 + w1.v2, vector parts
/// a1*v2 + b2*v1 - w1 x w2 and a2*w1 + b1*w2 + v1 x v2.
fn oct_mul(x: &[i64; 8], y: &[i64; 8]) -> [i64; 8] {
    let cross = |u: &[i64], v: &[i64]| {
        [
            u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0],
        ]
    };
    let dot = |u: &[i64], v: &[i64]| u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    let (a1, b1, v1, w1) = (x[0], x[1], &x[2..5], &x[5..8]);
    let (a2, b2, v2, w2) = (y[0], y[1], &y[2..5], &y[5..8]);
    let cv = cross(w1, w2);
    let cw = cross(v1, v2);
    let mut out = [0i64; 8];
    out[0] = a1 * a2 + dot(v1, w2);
    out[1] = b1 * b2 + dot(w1, v2);
    for i in 0..3 {
        out[2 + i] = a1 * v2[i] + b2 * v1[i] - cv[i];
        out[5 + i] = a2 * w1[i] + b1 * w2[i] + cw[i];
    }
    out
}

/// The quadratic norm ab - v.w; multiplicative, which the tests check.
#[cfg(test)]
fn oct_norm(x: &[i64; 8]) -> i64 {
    x[0] * x[1] - (x[2] * x[5] + x[3] * x[6] + x[4] * x[7])
}

fn basis_vec(i: usize) -> [i64; 8] {
    let mut v = [0i64; 8];
    v[i] = 1;
    v
}

/// C[a][b] = coordinates of basis_a * basis_b.
fn structure_constants() -> Vec<Vec<[i64; 8]>> {
    (0..OCT_DIM)
        .map(|a| (0..OCT_DIM).map(|b| oct_mul(&basis_vec(a), &basis_vec(b))).collect())
        .collect()
}

/// Derivations of the octonions: all D with D(xy) = D(x)y + xD(y),
/// encoded as row matrices (row a = coordinates of D(basis_a)) and
/// returned as the kernel rows of the Leibniz system, one 64-vector per
/// derivation.
fn derivation_space() -> RatMatrix {
    let c = structure_constants();
    let n = OCT_DIM;
    let mut m = vec![vec![0i64; n * n * n]; n * n];
    for a in 0..n {
        for b in 0..n {
            for t in 0..n {
                let q = (a * n + b) * n + t;
                for s in 0..n {
                    m[s * n + t][q] += c[a][b][s];
                    m[a * n + s][q] -= c[s][b][t];
                    m[b * n + s][q] -= c[a][s][t];
                }
            }
        }
    }
    RatMatrix::from_int_rows(&m).kernel()
}

fn mat8_from_flat(v: &[Rat]) -> RatMatrix {
    RatMatrix::from_rows(
        (0..OCT_DIM).map(|a| v[a * OCT_DIM..(a + 1) * OCT_DIM].to_vec()).collect(),
    )
}

/// The trace-zero basis e1,e2,e3, u1-u2, f1,f2,f3 expressed in octonion
/// coordinates, preceded by the identity u1+u2.
fn seven_basis() -> RatMatrix {
    RatMatrix::from_int_rows(&[
        vec![1, 1, 0, 0, 0, 0, 0, 0],
        vec![0, 0, 1, 0, 0, 0, 0, 0],
        vec![0, 0, 0, 1, 0, 0, 0, 0],
        vec![0, 0, 0, 0, 1, 0, 0, 0],
        vec![1, -1, 0, 0, 0, 0, 0, 0],
        vec![0, 0, 0, 0, 0, 1, 0, 0],
        vec![0, 0, 0, 0, 0, 0, 1, 0],
        vec![0, 0, 0, 0, 0, 0, 0, 1],
    ])
}

/// Restriction of an 8x8 derivation to the trace-zero 7-space.
/// Derivations kill the identity and preserve the complement; both
/// facts are asserted, not assumed.
fn restrict_to_seven(d8: &RatMatrix, p: &RatMatrix, pinv: &RatMatrix) -> RatMatrix {
    let mut rows = Vec::with_capacity(7);
    let ident = p.row(0).to_vec();
    assert!(
        d8.apply_row(&ident).iter().all(|x| x.is_zero()),
        "derivation does not kill the identity"
    );
    for i in 1..8 {
        let image = d8.apply_row(p.row(i));
        let coords = pinv.apply_row(&image);
        assert!(coords[0].is_zero(), "derivation leaves the trace-zero space");
        rows.push(coords[1..8].to_vec());
    }
    RatMatrix::from_rows(rows)
}

/// Diagonal derivation e_i -> c_i e_i, f_i -> -c_i f_i with c summing to
/// zero, as an 8x8 matrix.
fn torus_derivation(c: [i64; 3]) -> RatMatrix {
    assert_eq!(c.iter().sum::<i64>(), 0);
    let mut rows = vec![vec![0i64; 8]; 8];
    for i in 0..3 {
        rows[2 + i][2 + i] = c[i];
        rows[5 + i][5 + i] = -c[i];
    }
    RatMatrix::from_int_rows(&rows)
}

fn is_derivation(d: &RatMatrix) -> bool {
    let c = structure_constants();
    let mult = |x: &[Rat], y: &[Rat]| {
        let mut out = vec![Rat::zero(); OCT_DIM];
        for a in 0..OCT_DIM {
            if x[a].is_zero() {
                continue;
            }
            for b in 0..OCT_DIM {
                if y[b].is_zero() {
                    continue;
                }
                let coeff = &x[a] * &y[b];
                for t in 0..OCT_DIM {
                    if c[a][b][t] != 0 {
                        out[t] = &out[t] + &coeff * rat(c[a][b][t]);
                    }
                }
            }
        }
        out
    };
    for a in 0..OCT_DIM {
        for b in 0..OCT_DIM {
            let xa: Vec<Rat> = basis_vec(a).iter().map(|&x| rat(x)).collect();
            let xb: Vec<Rat> = basis_vec(b).iter().map(|&x| rat(x)).collect();
            let lhs = d.apply_row(&mult(&xa, &xb));
            let da = d.apply_row(&xa);
            let db = d.apply_row(&xb);
            let rhs: Vec<Rat> = mult(&da, &xb)
                .iter()
                .zip(mult(&xa, &db))
                .map(|(u, v)| u + v)
                .collect();
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}

fn flatten7(m: &RatMatrix) -> Vec<Rat> {
    let mut v = Vec::with_capacity(49);
    for i in 0..7 {
        v.extend_from_slice(m.row(i));
    }
    v
}

fn commutator(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let ab = a.mul(b);
    let ba = b.mul(a);
    let mut out = RatMatrix::zero(a.rows(), a.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            out.set(i, j, ab.get(i, j) - ba.get(i, j));
        }
    }
    out
}

/// Scale a rational matrix to a primitive integer one: clear
/// denominators, divide by the content, make the first nonzero entry
/// positive.
fn primitive_integer(m: &RatMatrix) -> Vec<Vec<i64>> {
    let mut den = BigInt::one();
    for i in 0..m.rows() {
        for x in m.row(i) {
            den = lcm(den, x.denom().clone());
        }
    }
    let mut nums: Vec<Vec<BigInt>> = Vec::with_capacity(m.rows());
    let mut content = BigInt::zero();
    for i in 0..m.rows() {
        let row: Vec<BigInt> = m
            .row(i)
            .iter()
            .map(|x| (x * Rat::from_integer(den.clone())).to_integer())
            .collect();
        for x in &row {
            content = gcd(content, x.abs());
        }
        nums.push(row);
    }
    assert!(!content.is_zero(), "zero root vector");
    let mut sign = BigInt::one();
    'outer: for row in &nums {
        for x in row {
            if !x.is_zero() {
                if x.is_negative() {
                    sign = -sign;
                }
                break 'outer;
            }
        }
    }
    let scale = content * sign;
    nums.iter()
        .map(|row| {
            row.iter()
                .map(|x| (x / &scale).to_i64().expect("root matrix entry fits i64"))
                .collect()
        })
        .collect()
}

/// The derived generator data: four primitive integer nilpotents on the
/// 7-space and the Gram matrix of the invariant symmetric form.
pub struct G2Derivation {
    pub short_pos: Vec<Vec<i64>>,
    pub short_neg: Vec<Vec<i64>>,
    pub long_pos: Vec<Vec<i64>>,
    pub long_neg: Vec<Vec<i64>>,
    pub form: Vec<Vec<i64>>,
}

fn derive_g2() -> G2Derivation {
    let der = derivation_space();
    assert_eq!(der.rows(), 14, "octonion derivation algebra has dimension 14");

    let p = seven_basis();
    let pinv = p.inverse().expect("basis change invertible");
    let basis7: Vec<RatMatrix> = (0..14)
        .map(|k| restrict_to_seven(&mat8_from_flat(der.row(k)), &p, &pinv))
        .collect();
    let der49 = RatMatrix::from_rows(basis7.iter().map(flatten7).collect());
    assert_eq!(der49.rank(), 14, "restriction to the 7-space is faithful");

    let t1 = torus_derivation([1, -1, 0]);
    let t2 = torus_derivation([0, 1, -1]);
    assert!(is_derivation(&t1) && is_derivation(&t2), "torus elements satisfy Leibniz");
    let h1 = restrict_to_seven(&t1, &p, &pinv);
    let h2 = restrict_to_seven(&t2, &p, &pinv);

    // ad-matrices of the two torus elements on the derivation algebra.
    let ad = |h: &RatMatrix| {
        let rows: Vec<Vec<Rat>> = basis7
            .iter()
            .map(|b| {
                solve_row(&der49, &flatten7(&commutator(h, b)))
                    .expect("bracket stays inside the derivation algebra")
            })
            .collect();
        RatMatrix::from_rows(rows)
    };
    let a1 = ad(&h1);
    let a2 = ad(&h2);

    // Simultaneous integer eigenspaces; the twelve one-dimensional ones
    // are the root spaces.
    let eigenspace = |m: i64, n: i64| {
        let mut stacked = RatMatrix::zero(14, 28);
        for i in 0..14 {
            for j in 0..14 {
                let mut x = a1.get(i, j).clone();
                let mut y = a2.get(i, j).clone();
                if i == j {
                    x -= rat(m);
                    y -= rat(n);
                }
                stacked.set(i, j, x);
                stacked.set(i, 14 + j, y);
            }
        }
        stacked.kernel()
    };
    assert_eq!(eigenspace(0, 0).rows(), 2, "torus centralizer is the Cartan");
    let mut roots: Vec<((i64, i64), Vec<Rat>)> = Vec::new();
    for m in -3i64..=3 {
        for n in -3i64..=3 {
            if (m, n) == (0, 0) {
                continue;
            }
            let ker = eigenspace(m, n);
            if ker.rows() == 1 {
                roots.push(((m, n), ker.row(0).to_vec()));
            } else {
                assert_eq!(ker.rows(), 0, "root space of dimension > 1");
            }
        }
    }
    assert_eq!(roots.len(), 12, "twelve roots");
    let root_set: std::collections::BTreeSet<(i64, i64)> = roots.iter().map(|r| r.0).collect();

    // A base (s, l) is recognized by the chain s, l, s+l, 2s+l, 3s+l,
    // 3s+2l exhausting the positive roots; the chain forces s short.
    let mut base: Option<((i64, i64), (i64, i64))> = None;
    'search: for &s in &root_set {
        for &l in &root_set {
            if s == l {
                continue;
            }
            let chain = [
                s,
                l,
                (s.0 + l.0, s.1 + l.1),
                (2 * s.0 + l.0, 2 * s.1 + l.1),
                (3 * s.0 + l.0, 3 * s.1 + l.1),
                (3 * s.0 + 2 * l.0, 3 * s.1 + 2 * l.1),
            ];
            if !chain.iter().all(|c| root_set.contains(c)) {
                continue;
            }
            let full: std::collections::BTreeSet<(i64, i64)> = chain
                .iter()
                .flat_map(|&(x, y)| [(x, y), (-x, -y)])
                .collect();
            if full == root_set {
                base = Some((s, l));
                break 'search;
            }
        }
    }
    let (s, l) = base.expect("G2 chain base exists");

    let root_matrix = |key: (i64, i64)| {
        let coeffs = &roots.iter().find(|r| r.0 == key).expect("root present").1;
        let mut m = RatMatrix::zero(7, 7);
        for (k, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for i in 0..7 {
                for j in 0..7 {
                    let v = m.get(i, j) + c * basis7[k].get(i, j);
                    m.set(i, j, v);
                }
            }
        }
        primitive_integer(&m)
    };

    let short_pos = root_matrix(s);
    let short_neg = root_matrix((-s.0, -s.1));
    let long_pos = root_matrix(l);
    let long_neg = root_matrix((-l.0, -l.1));

    // Nilpotency degrees on the 7-space: cube for short roots, square
    // for long ones.
    let check_nilpotent = |m: &Vec<Vec<i64>>, square_zero: bool| {
        let rm = RatMatrix::from_int_rows(m);
        let m2 = rm.mul(&rm);
        if square_zero {
            assert!(m2.is_zero(), "long root element must square to zero");
        } else {
            assert!(!m2.is_zero(), "short root element must not square to zero");
            assert!(m2.mul(&rm).is_zero(), "short root element must cube to zero");
        }
    };
    check_nilpotent(&short_pos, false);
    check_nilpotent(&short_neg, false);
    check_nilpotent(&long_pos, true);
    check_nilpotent(&long_neg, true);

    // Polarized octonion norm on the trace-zero basis.
    let form = vec![
        vec![0, 0, 0, 0, -1, 0, 0],
        vec![0, 0, 0, 0, 0, -1, 0],
        vec![0, 0, 0, 0, 0, 0, -1],
        vec![0, 0, 0, -2, 0, 0, 0],
        vec![-1, 0, 0, 0, 0, 0, 0],
        vec![0, -1, 0, 0, 0, 0, 0],
        vec![0, 0, -1, 0, 0, 0, 0],
    ];

    G2Derivation { short_pos, short_neg, long_pos, long_neg, form }
}

static G2_DATA: OnceLock<G2Derivation> = OnceLock::new();

/// The derived integral G2 data, computed once per process.
pub fn g2_data() -> &'static G2Derivation {
    G2_DATA.get_or_init(derive_g2)
}

fn reduce_rat(x: &Rat, field: PrimeField) -> u64 {
    let p = BigInt::from(field.p());
    let num = ((x.numer() % &p) + &p) % &p;
    let den = ((x.denom() % &p) + &p) % &p;
    let den = den.to_u64().expect("residue fits");
    assert!(den != 0, "denominator divisible by the prime");
    field.mul(num.to_u64().expect("residue fits"), field.inv(den))
}

/// exp of an integer nilpotent with cube zero, reduced mod p: the only
/// denominator is 2.
fn exp_mod_p(m: &[Vec<i64>], field: PrimeField) -> FMatrix {
    let rm = RatMatrix::from_int_rows(m);
    let m2 = rm.mul(&rm);
    assert!(m2.mul(&rm).is_zero(), "exponent input must cube to zero");
    let half = Rat::new(BigInt::one(), BigInt::from(2));
    let n = rm.rows();
    let rows: Vec<Vec<u64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut x = rm.get(i, j) + m2.get(i, j) * &half;
                    if i == j {
                        x += rat(1);
                    }
                    reduce_rat(&x, field)
                })
                .collect()
        })
        .collect();
    FMatrix::from_rows(field, &rows).expect("consistent shape")
}

/// Generators of G2(p) on the 7-dimensional module: exponentials of the
/// two simple root elements and their negatives.
pub fn g2_generators(p: u64) -> Result<MatModule, ModuleError> {
    if p < 3 || p % 2 == 0 {
        return Err(ModuleError::Shape(format!("odd prime required, got {p}")));
    }
    let field = PrimeField::new(p).map_err(|e| ModuleError::Shape(e.to_string()))?;
    let data = g2_data();
    let gens = vec![
        exp_mod_p(&data.short_pos, field),
        exp_mod_p(&data.short_neg, field),
        exp_mod_p(&data.long_pos, field),
        exp_mod_p(&data.long_neg, field),
    ];
    MatModule::new(field, 7, gens, &format!("g2_p{p}"))
}

/// Text of the generator file for G2(p), in the standard format.
pub fn g2_generator_file(p: u64) -> Result<String, ModuleError> {
    let m = g2_generators(p)?;
    let mut out = String::new();
    let _ = writeln!(out, "# G2 acting on its 7-dimensional module, p = {p}");
    let _ = writeln!(out, "# exponentials of simple root elements from the split-octonion derivation algebra");
    let _ = writeln!(out, "7 {p} 4");
    for g in m.gens() {
        let _ = writeln!(out);
        for i in 0..7 {
            let row: Vec<String> = g.row(i).iter().map(|x| x.to_string()).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
    }
    Ok(out)
}

/// The acceptance battery for a claimed G2 minimal module: determinant
/// one, a single symmetric non-degenerate invariant form, irreducible
/// natural module, and the exterior square splitting into the known
/// factor pattern for the prime, with the quotient by the largest
/// maximal submodule isomorphic to the natural module.
pub fn validate_g2(m: &MatModule, cfg: &ProbeConfig) -> Result<(), ModuleError> {
    let fail = |msg: &str| Err(ModuleError::Shape(format!("generator validation: {msg}")));
    if m.dim() != 7 {
        return fail("dimension is not 7");
    }
    let p = m.field().p();
    if p < 3 || p % 2 == 0 {
        return fail("characteristic must be odd");
    }
    for g in m.gens() {
        if g.det().map_err(ModuleError::Field)? != 1 {
            return fail("generator with determinant != 1");
        }
    }
    let forms = invariant_forms(m)?;
    if forms.len() != 1 {
        return fail("invariant bilinear forms not 1-dimensional");
    }
    if forms[0].kind != FormKind::Symmetric || !forms[0].nondegenerate {
        return fail("invariant form not symmetric non-degenerate");
    }
    if !matches!(is_irreducible(m, cfg)?, Irreducibility::Irreducible) {
        return fail("natural module reducible");
    }

    let wedge = exterior_square(m);
    let classes = composition_factors_matrix(&wedge, cfg)?;
    let mut dims: Vec<(usize, usize)> = classes.iter().map(|c| (c.dim, c.multiplicity)).collect();
    dims.sort_unstable();
    if p == 3 {
        if dims != vec![(7, 1), (7, 2)] {
            return fail("exterior-square factors at p = 3 are not 7 + 7x2");
        }
        let doubled = classes.iter().find(|c| c.multiplicity == 2).unwrap();
        let single = classes.iter().find(|c| c.multiplicity == 1).unwrap();
        if is_isomorphic(m, &doubled.rep, cfg)?.is_none() {
            return fail("repeated 7-dimensional factor is not the natural module");
        }
        if is_isomorphic(m, &single.rep, cfg)?.is_some() {
            return fail("the two 7-dimensional factor classes coincide");
        }
    } else {
        if dims != vec![(7, 1), (14, 1)] {
            return fail("exterior-square factors are not 14 + 7");
        }
        let seven = classes.iter().find(|c| c.dim == 7).unwrap();
        if is_isomorphic(m, &seven.rep, cfg)?.is_none() {
            return fail("7-dimensional factor is not the natural module");
        }
    }

    let lattice = socle_and_lattice(&wedge, cfg)?;
    let mut node_dims: Vec<usize> = lattice.nodes.iter().map(|n| n.dim).collect();
    node_dims.sort_unstable();
    if node_dims != vec![0, 7, 14, 21] {
        return fail("submodule lattice nodes are not 0, 7, 14, 21");
    }
    let expected_shape = if p == 3 { LatticeShape::Uniserial } else { LatticeShape::MultiplicityFree };
    if lattice.shape != expected_shape {
        return fail("submodule lattice has the wrong shape for the prime");
    }

    let maximal = lattice
        .nodes
        .iter()
        .find(|n| n.dim == 14)
        .expect("dimension check above");
    let head = quotient_action(&wedge, &maximal.space)?;
    if is_isomorphic(&head, m, cfg)?.is_none() {
        return fail("quotient by the largest maximal submodule is not the natural module");
    }
    Ok(())
}
