//! Command-line front end: weight-level factor tables, matrix-module
//! structure reports, and p-group builds, all emitted as deterministic
//! reports with the run configuration in the header.

use liepow_cli::{cache, report};

use cache::DiskCache;
use clap::{Parser, Subcommand, ValueEnum};
use liepow_core::{
    build_root_system, build_optimal_g2, composition_factors_matrix, exterior_square,
    invariant_forms, load_generators, socle_and_lattice, table_row, FMatrix, FormKind,
    LatticeShape, LiePowerBasis, ModularData, OptimalG2, OptimalVariant, PGroup, PGroupKind,
    PowerKind, PrimeField, ProbeConfig, Regime, RootSystem, Subspace, TypeLabel, Weight,
};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use report::{Body, CheckRow, FactorRow, FormRow, LatticeReport, MatFactorRow, Report, RunConfig};
use std::path::{Path, PathBuf};
use std::sync::Arc;

const BUNDLED_MODULAR: &str = include_str!("../../../data/modular.txt");

#[derive(Parser)]
#[command(
    name = "liepow",
    version,
    about = "Composition factors of Lie powers, matrix-module structure, and p-group builds"
)]
struct Cli {
    /// Seed for every sampled verification.
    #[arg(long, global = true, default_value_t = 0x5eed)]
    seed: u64,
    /// Retry bound for randomized structure probes.
    #[arg(long, global = true, default_value_t = 20)]
    retries: u32,
    /// Directory for the on-disk multiplicity and orbit cache.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Report rendering.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Power {
    A2,
    L3,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Task {
    Factors,
    Lattice,
    Forms,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Build {
    Gamma2,
    Gamma3,
    Estar,
    OptimalG2Normalizer,
    OptimalG2Self,
}

#[derive(Subcommand)]
enum Command {
    /// Composition factors of a Lie power of an irreducible module.
    Factors {
        /// Root-system type letter (A, B, C, D, E, F, G).
        #[arg(long = "type")]
        type_letter: char,
        #[arg(long)]
        rank: usize,
        /// Highest weight: coordinates like 1,0 or shorthand like l2, l1+l6, 3l1.
        #[arg(long)]
        weight: String,
        /// Either "generic" or "p=N".
        #[arg(long, default_value = "generic")]
        prime_mode: String,
        /// a2 = exterior square, l3 = third Lie power.
        #[arg(long, value_enum)]
        power: Power,
        /// Weyl-module decomposition rows; the bundled table by default.
        #[arg(long)]
        modular_data: Option<PathBuf>,
    },
    /// Structure of a matrix module given by a generator file.
    Module {
        #[arg(long)]
        gens: PathBuf,
        #[arg(long, value_enum)]
        task: Task,
    },
    /// Build a graded p-group and report its structure.
    Pgroup {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        p: u64,
        #[arg(long, value_enum)]
        build: Build,
        /// Central subspace to divide by: header `ambient p nrows`, then rows.
        #[arg(long)]
        subspace: Option<PathBuf>,
    },
}

struct AppError {
    msg: String,
    code: i32,
}

fn usage(msg: impl std::fmt::Display) -> AppError {
    AppError { msg: msg.to_string(), code: 2 }
}

fn check_failed(msg: impl std::fmt::Display) -> AppError {
    AppError { msg: msg.to_string(), code: 1 }
}

fn main() {
    match run() {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {}", e.msg);
            std::process::exit(e.code);
        }
    }
}

fn run() -> Result<i32, AppError> {
    let cli = Cli::parse();
    let config = RunConfig {
        seed: cli.seed,
        retries: cli.retries,
        cache_dir: cli.cache_dir.as_ref().map(|p| p.display().to_string()),
        format: match cli.format {
            Format::Text => "text".to_string(),
            Format::Structured => "structured".to_string(),
        },
    };

    let body = match &cli.command {
        Command::Factors { type_letter, rank, weight, prime_mode, power, modular_data } => {
            cmd_factors(&config, *type_letter, *rank, weight, prime_mode, *power, modular_data.as_deref())?
        }
        Command::Module { gens, task } => cmd_module(&config, gens, *task)?,
        Command::Pgroup { d, p, build, subspace } => {
            cmd_pgroup(&config, *d, *p, *build, subspace.as_deref())?
        }
    };

    let rep = Report { config, body };
    match cli.format {
        Format::Text => print!("{}", report::render_text(&rep)),
        Format::Structured => print!("{}", report::emit(&rep)),
    }
    Ok(if rep.all_pass() { 0 } else { 1 })
}

fn is_odd_prime(p: u64) -> bool {
    p >= 3 && p % 2 == 1 && (3..).step_by(2).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// Accepts `1,0,...` coordinates, `l2` / `l1+l6` / `3l1` shorthand (the
/// letter may also be a lambda), and `0` for the zero weight.
fn parse_weight(rank: usize, s: &str) -> Result<Weight, AppError> {
    let t = s.trim().replace('\u{3bb}', "l");
    if t == "0" {
        return Ok(Weight(vec![0; rank]));
    }
    if t.contains('l') {
        let mut coords = vec![0i64; rank];
        for term in t.split('+') {
            let term = term.trim();
            let pos = term.find('l').ok_or_else(|| usage(format!("bad weight term `{term}`")))?;
            let coef: i64 = if pos == 0 {
                1
            } else {
                term[..pos]
                    .trim()
                    .parse()
                    .map_err(|_| usage(format!("bad coefficient in weight term `{term}`")))?
            };
            let idx: usize = term[pos + 1..]
                .trim()
                .parse()
                .map_err(|_| usage(format!("bad index in weight term `{term}`")))?;
            if idx == 0 || idx > rank {
                return Err(usage(format!("weight index {idx} outside 1..{rank}")));
            }
            coords[idx - 1] += coef;
        }
        Ok(Weight(coords))
    } else {
        let coords: Result<Vec<i64>, _> = t.split(',').map(|x| x.trim().parse()).collect();
        let coords = coords.map_err(|_| usage(format!("bad weight coordinates `{s}`")))?;
        if coords.len() != rank {
            return Err(usage(format!("expected {rank} coordinates, got {}", coords.len())));
        }
        Ok(Weight(coords))
    }
}

fn weight_name(coords: &[i64]) -> String {
    if coords.iter().all(|&c| c == 0) {
        return "0".to_string();
    }
    if coords.iter().any(|&c| c < 0) {
        let parts: Vec<String> = coords.iter().map(|c| c.to_string()).collect();
        return parts.join(",");
    }
    let mut parts = Vec::new();
    for (i, &c) in coords.iter().enumerate() {
        match c {
            0 => {}
            1 => parts.push(format!("l{}", i + 1)),
            k => parts.push(format!("{}l{}", k, i + 1)),
        }
    }
    parts.join("+")
}

fn parse_prime_mode(s: &str) -> Result<Regime, AppError> {
    if s == "generic" {
        return Ok(Regime::Generic);
    }
    if let Some(rest) = s.strip_prefix("p=") {
        let p: u64 = rest.trim().parse().map_err(|_| usage(format!("bad prime in `{s}`")))?;
        if !is_odd_prime(p) {
            return Err(usage(format!("{p} is not an odd prime")));
        }
        return Ok(Regime::Prime(p));
    }
    Err(usage(format!("prime mode must be `generic` or `p=N`, got `{s}`")))
}

fn cmd_factors(
    config: &RunConfig,
    type_letter: char,
    rank: usize,
    weight: &str,
    prime_mode: &str,
    power: Power,
    modular_data: Option<&Path>,
) -> Result<Body, AppError> {
    let label = TypeLabel::from_char(type_letter)
        .ok_or_else(|| usage(format!("unknown root-system type `{type_letter}`")))?;
    let rs: Arc<RootSystem> =
        Arc::new(build_root_system(label, rank).map_err(usage)?);
    let lambda = parse_weight(rank, weight)?;
    let regime = parse_prime_mode(prime_mode)?;
    let power = match power {
        Power::A2 => PowerKind::ExteriorSquare,
        Power::L3 => PowerKind::LieCube,
    };

    let data_text = match modular_data {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?,
        None => BUNDLED_MODULAR.to_string(),
    };
    let data = Arc::new(ModularData::parse(&data_text).map_err(usage)?);
    if let Regime::Prime(p) = regime {
        if !data.has_group(label, rank, p) {
            let primes = data.primes_for(label, rank);
            let listed: Vec<String> = primes.iter().map(|q| q.to_string()).collect();
            return Err(usage(format!(
                "no modular rows for {}{} at p = {}; shipped rows cover p in [{}]; \
                 primes without special rows behave generically, use --prime-mode generic",
                label.as_char(),
                rank,
                p,
                listed.join(", ")
            )));
        }
    }

    let disk = match &config.cache_dir {
        Some(dir) => Some(DiskCache::new(Path::new(dir)).map_err(usage)?),
        None => None,
    };
    if let Some(c) = &disk {
        c.load_into(&rs, label, rank);
    }
    let row = table_row(&rs, &lambda, power, regime, Some(&data)).map_err(check_failed)?;
    if let Some(c) = &disk {
        c.store_from(&rs, label, rank);
    }

    let rows: Vec<FactorRow> = row
        .factors
        .entries
        .iter()
        .map(|e| FactorRow {
            coords: e.highest_weight.0.clone(),
            name: weight_name(&e.highest_weight.0),
            dim: e.dim,
            multiplicity: e.multiplicity,
        })
        .collect();
    Ok(Body::Factors {
        system: format!("{}{}", label.as_char(), rank),
        module: weight_name(&lambda.0),
        module_dim: row.module_dim,
        power: power.name().to_string(),
        regime: row.regime.to_string(),
        target_dim: row.target_dim,
        rows,
        multiplicity_free: row.factors.multiplicity_free,
    })
}

fn cmd_module(config: &RunConfig, gens: &Path, task: Task) -> Result<Body, AppError> {
    let m = load_generators(gens).map_err(usage)?;
    let probe = ProbeConfig { seed: config.seed, retries: config.retries };
    let mut factors = Vec::new();
    let mut lattice = None;
    let mut forms = Vec::new();
    let task_name = match task {
        Task::Factors => {
            let wedge = exterior_square(&m);
            let fs = composition_factors_matrix(&wedge, &probe).map_err(check_failed)?;
            factors =
                fs.iter().map(|f| MatFactorRow { dim: f.dim, multiplicity: f.multiplicity }).collect();
            "factors"
        }
        Task::Lattice => {
            let wedge = exterior_square(&m);
            let lat = socle_and_lattice(&wedge, &probe).map_err(check_failed)?;
            lattice = Some(LatticeReport {
                shape: match lat.shape {
                    LatticeShape::MultiplicityFree => "multiplicity-free".to_string(),
                    LatticeShape::Uniserial => "uniserial".to_string(),
                },
                node_dims: lat.nodes.iter().map(|n| n.dim).collect(),
                edges: lat.edges.clone(),
            });
            "lattice"
        }
        Task::Forms => {
            let fs = invariant_forms(&m).map_err(check_failed)?;
            forms = fs
                .iter()
                .map(|f| FormRow {
                    kind: match f.kind {
                        FormKind::Symmetric => "symmetric".to_string(),
                        FormKind::Alternating => "alternating".to_string(),
                        FormKind::Mixed => "mixed".to_string(),
                    },
                    nondegenerate: f.nondegenerate,
                })
                .collect();
            "forms"
        }
    };
    Ok(Body::Module {
        label: m.label().to_string(),
        dim: m.dim(),
        p: m.field().p(),
        task: task_name.to_string(),
        factors,
        lattice,
        forms,
    })
}

/// Subspace file: comments with `#`, a header `ambient p nrows`, then
/// nrows rows of ambient residues.
fn parse_subspace(text: &str, expect_p: u64) -> Result<Subspace, AppError> {
    let mut lines = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty());
    let header = lines.next().ok_or_else(|| usage("empty subspace file"))?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 3 {
        return Err(usage("subspace header must be `ambient p nrows`"));
    }
    let ambient: usize = parts[0].parse().map_err(|_| usage("bad ambient dimension"))?;
    let p: u64 = parts[1].parse().map_err(|_| usage("bad prime"))?;
    let nrows: usize = parts[2].parse().map_err(|_| usage("bad row count"))?;
    if p != expect_p {
        return Err(usage(format!("subspace file is over p = {p}, group over p = {expect_p}")));
    }
    let field = PrimeField::new(p).map_err(usage)?;
    let mut rows = Vec::with_capacity(nrows);
    for _ in 0..nrows {
        let line = lines.next().ok_or_else(|| usage("subspace file ends early"))?;
        let row: Result<Vec<u64>, _> = line.split_whitespace().map(|t| t.parse()).collect();
        let row = row.map_err(|_| usage("bad subspace entry"))?;
        if row.len() != ambient {
            return Err(usage(format!("subspace row has {} entries, expected {ambient}", row.len())));
        }
        rows.push(row.iter().map(|&x| field.reduce(x as i128)).collect());
    }
    if lines.next().is_some() {
        return Err(usage("trailing content after subspace rows"));
    }
    Subspace::from_rows(field, ambient, &rows).map_err(usage)
}

fn cmd_pgroup(
    config: &RunConfig,
    d: usize,
    p: u64,
    build: Build,
    subspace: Option<&Path>,
) -> Result<Body, AppError> {
    let sub = match subspace {
        Some(path) => {
            if matches!(build, Build::OptimalG2Normalizer | Build::OptimalG2Self) {
                return Err(usage("--subspace only applies to the plain builds"));
            }
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            Some(parse_subspace(&text, p)?)
        }
        None => None,
    };

    enum Built {
        Plain(PGroup),
        Optimal(OptimalG2),
    }

    let probe = ProbeConfig { seed: config.seed, retries: config.retries };
    let (built, build_name) = match build {
        Build::Gamma2 => (Built::Plain(PGroup::gamma2(p, d, sub).map_err(usage)?), "gamma2"),
        Build::Gamma3 => (Built::Plain(PGroup::gamma3(p, d, sub).map_err(usage)?), "gamma3"),
        Build::Estar => (Built::Plain(PGroup::estar(p, d, sub).map_err(usage)?), "estar"),
        Build::OptimalG2Normalizer | Build::OptimalG2Self => {
            if d != 7 {
                return Err(usage("the optimal builds act on the 7-dimensional module; use --d 7"));
            }
            let variant = match build {
                Build::OptimalG2Normalizer => OptimalVariant::Normalizer,
                _ => OptimalVariant::GroupItself,
            };
            let name = match variant {
                OptimalVariant::Normalizer => "optimal-g2-normalizer",
                OptimalVariant::GroupItself => "optimal-g2-self",
            };
            (Built::Optimal(build_optimal_g2(p, variant, &probe).map_err(check_failed)?), name)
        }
    };
    let (group, optimal) = match &built {
        Built::Plain(g) => (g, None),
        Built::Optimal(o) => (&o.group, Some(o)),
    };

    let sr = group.structure_report();
    let checks = pgroup_battery(group, optimal, config.seed);
    Ok(Body::PGroup {
        build: build_name.to_string(),
        d: group.d(),
        p,
        order: sr.order.to_string(),
        order_exponent: sr.order_exponent,
        rank: sr.rank,
        exponent: sr.exponent,
        nilpotency_class: sr.nilpotency_class,
        exponent_p_class: sr.exponent_p_class,
        derived_dim: sr.derived_dim,
        gamma3_dim: sr.gamma3_dim,
        frattini_dim: sr.frattini_dim,
        checks,
    })
}

fn unit_row(ambient: usize, i: usize) -> Vec<u64> {
    let mut v = vec![0; ambient];
    v[i] = 1;
    v
}

fn pgroup_battery(g: &PGroup, optimal: Option<&OptimalG2>, seed: u64) -> Vec<CheckRow> {
    let mut checks = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = g.d();
    let p = g.p();
    let field = g.field();
    let n2 = d * (d - 1) / 2;
    let dim_x = g.quotient_space().dim();
    let sr = g.structure_report();

    let mut pass = true;
    for _ in 0..50 {
        let x = g.random_element(&mut rng);
        if !g.is_identity(&g.multiply(&x, &g.inverse(&x))) {
            pass = false;
        }
    }
    checks.push(CheckRow { name: "inverse law (50 samples)".to_string(), pass });

    let mut pass = true;
    for _ in 0..200 {
        let x = g.random_element(&mut rng);
        let y = g.random_element(&mut rng);
        let z = g.random_element(&mut rng);
        if g.multiply(&g.multiply(&x, &y), &z) != g.multiply(&x, &g.multiply(&y, &z)) {
            pass = false;
        }
    }
    checks.push(CheckRow { name: "associativity (200 triples)".to_string(), pass });

    let mut pass = true;
    match g.kind() {
        PGroupKind::EStar => {
            let mut max_order = 1;
            for i in 0..d {
                let o = g.element_order(&g.generator(i));
                max_order = max_order.max(o);
                if sr.exponent % o != 0 {
                    pass = false;
                }
            }
            for _ in 0..20 {
                let x = g.random_element(&mut rng);
                let o = g.element_order(&x);
                max_order = max_order.max(o);
                if sr.exponent % o != 0 {
                    pass = false;
                }
            }
            if max_order != sr.exponent {
                pass = false;
            }
        }
        _ => {
            for i in 0..d {
                if !g.is_identity(&g.power(&g.generator(i), p)) {
                    pass = false;
                }
            }
            for _ in 0..50 {
                let x = g.random_element(&mut rng);
                if !g.is_identity(&g.power(&x, p)) {
                    pass = false;
                }
            }
            if sr.exponent != p {
                pass = false;
            }
        }
    }
    checks.push(CheckRow { name: "exponent law".to_string(), pass });

    match g.kind() {
        PGroupKind::Gamma3 => {
            // [[x, y], z] = (0, 0, 12 [a1, a2, a3]) on all basis triples.
            let basis = LiePowerBasis::new(field, d).expect("p > 3 for the class-3 group");
            let mut pass = true;
            for i in 0..d {
                for j in 0..d {
                    for k in 0..d {
                        let c = g.commutator3(&g.generator(i), &g.generator(j), &g.generator(k));
                        let triple = basis
                            .bracket_vvv(&unit_row(d, i), &unit_row(d, j), &unit_row(d, k))
                            .expect("basis vectors");
                        let scaled: Vec<u64> =
                            triple.iter().map(|&t| field.mul(field.reduce(12), t)).collect();
                        let expect = g
                            .element(&vec![0; d], &vec![0; n2], &scaled)
                            .expect("valid coordinates");
                        if c != expect {
                            pass = false;
                        }
                    }
                }
            }
            checks.push(CheckRow {
                name: "triple commutator closed form (all basis triples)".to_string(),
                pass,
            });
        }
        _ => {
            // [x, y] = (0, 2 [a, f]) on all basis pairs.
            let mut pass = true;
            for i in 0..d {
                for j in 0..d {
                    let c = g.commutator2(&g.generator(i), &g.generator(j));
                    let mut b = vec![0u64; n2];
                    if i != j {
                        let pairs = liepow_core::wedge_pairs(d);
                        let (lo, hi) = (i.min(j), i.max(j));
                        let idx = pairs.iter().position(|&pr| pr == (lo, hi)).expect("pair");
                        b[idx] = if i < j { field.reduce(2) } else { field.neg(field.reduce(2)) };
                    }
                    let expect = g
                        .element(&vec![0; d], &b, &[])
                        .expect("valid coordinates");
                    if c != expect {
                        pass = false;
                    }
                }
            }
            checks.push(CheckRow {
                name: "commutator closed form (all basis pairs)".to_string(),
                pass,
            });
        }
    }

    // Dimension identities, from block arithmetic independent of the
    // commutator spans the report used.
    let (derived_expect, gamma3_expect, frattini_expect) = match g.kind() {
        PGroupKind::Gamma2 => (n2 - dim_x, 0, n2 - dim_x),
        PGroupKind::Gamma3 => {
            let n3 = (d * d * d - d) / 3;
            (n2 + n3 - dim_x, n3 - dim_x, n2 + n3 - dim_x)
        }
        PGroupKind::EStar => {
            let ambient = d + n2;
            let l2_rows: Vec<Vec<u64>> = (d..ambient).map(|i| unit_row(ambient, i)).collect();
            let l2_block = Subspace::from_rows(field, ambient, &l2_rows).expect("unit rows");
            let x = g.quotient_space();
            let derived = l2_block.sum(x).expect("same ambient").dim() - dim_x;
            (derived, 0, ambient - dim_x)
        }
    };
    checks.push(CheckRow {
        name: "derived dimension identity".to_string(),
        pass: sr.derived_dim == derived_expect,
    });
    checks.push(CheckRow {
        name: "gamma3 dimension identity".to_string(),
        pass: sr.gamma3_dim == gamma3_expect,
    });
    checks.push(CheckRow {
        name: "Frattini dimension identity".to_string(),
        pass: sr.frattini_dim == frattini_expect,
    });
    checks.push(CheckRow { name: "rank equals d".to_string(), pass: sr.rank == d });

    if let Some(opt) = optimal {
        match opt.variant {
            OptimalVariant::Normalizer => {
                let mut pass = true;
                for (i, gen) in opt.module.gens().iter().enumerate() {
                    match g.is_automorphism_sample(gen, 10, seed ^ (i as u64 + 1)) {
                        Ok(true) => {}
                        _ => pass = false,
                    }
                }
                checks.push(CheckRow {
                    name: "module generators induce automorphisms (sampled)".to_string(),
                    pass,
                });
            }
            OptimalVariant::GroupItself => {
                let mut pass = true;
                for gen in opt.module.gens() {
                    if !matches!(g.stabilizes_phi(gen), Ok(true)) {
                        pass = false;
                    }
                }
                checks.push(CheckRow {
                    name: "module generators stabilize the graph".to_string(),
                    pass,
                });
                let mut pass = true;
                for mu in 2..p {
                    let scalar = FMatrix::identity(field, 7).scalar_mul(mu);
                    if !matches!(g.stabilizes_phi(&scalar), Ok(false)) {
                        pass = false;
                    }
                }
                checks.push(CheckRow {
                    name: "no nontrivial scalar stabilizes the graph".to_string(),
                    pass,
                });
            }
        }
    }

    checks
}
