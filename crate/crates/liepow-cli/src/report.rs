//! Report model shared by every subcommand: a header echoing the run
//! configuration, a command-specific body, and two renderings.  The text
//! form is deterministic byte-for-byte for a fixed configuration; the
//! structured form round-trips through serde_json unchanged.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub retries: u32,
    pub cache_dir: Option<String>,
    pub format: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRow {
    pub name: String,
    pub pass: bool,
}

/// One composition factor of a weight-level table row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorRow {
    pub coords: Vec<i64>,
    pub name: String,
    pub dim: u64,
    pub multiplicity: u64,
}

/// One iso-class of factors of a matrix module.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatFactorRow {
    pub dim: usize,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeReport {
    pub shape: String,
    pub node_dims: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormRow {
    pub kind: String,
    pub nondegenerate: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Body {
    Factors {
        system: String,
        module: String,
        module_dim: u64,
        power: String,
        regime: String,
        target_dim: u64,
        rows: Vec<FactorRow>,
        multiplicity_free: bool,
    },
    Module {
        label: String,
        dim: usize,
        p: u64,
        task: String,
        factors: Vec<MatFactorRow>,
        lattice: Option<LatticeReport>,
        forms: Vec<FormRow>,
    },
    PGroup {
        build: String,
        d: usize,
        p: u64,
        order: String,
        order_exponent: usize,
        rank: usize,
        exponent: u64,
        nilpotency_class: usize,
        exponent_p_class: usize,
        derived_dim: usize,
        gamma3_dim: usize,
        frattini_dim: usize,
        checks: Vec<CheckRow>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub config: RunConfig,
    pub body: Body,
}

impl Report {
    /// False when any recorded check failed.
    pub fn all_pass(&self) -> bool {
        match &self.body {
            Body::PGroup { checks, .. } => checks.iter().all(|c| c.pass),
            _ => true,
        }
    }
}

/// Structured emission; `parse` inverts it exactly.
pub fn emit(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn parse(text: &str) -> Result<Report, serde_json::Error> {
    serde_json::from_str(text)
}

pub fn render_text(report: &Report) -> String {
    let mut out = String::new();
    let cfg = &report.config;
    out.push_str("liepow report\n");
    out.push_str(&format!("seed = {}\n", cfg.seed));
    out.push_str(&format!("retries = {}\n", cfg.retries));
    match &cfg.cache_dir {
        Some(d) => out.push_str(&format!("cache-dir = {}\n", d)),
        None => out.push_str("cache-dir = (none)\n"),
    }
    out.push_str(&format!("format = {}\n\n", cfg.format));

    match &report.body {
        Body::Factors { system, module, module_dim, power, regime, target_dim, rows, multiplicity_free } => {
            out.push_str(&format!("factors: system {system}, module {module} (dim {module_dim})\n"));
            out.push_str(&format!("power: {power}\n"));
            out.push_str(&format!("regime: {regime}\n"));
            out.push_str(&format!("target dimension: {target_dim}\n"));
            for r in rows {
                let coords: Vec<String> = r.coords.iter().map(|c| c.to_string()).collect();
                out.push_str(&format!(
                    "  factor {:<10} ({})  dim {}  x{}\n",
                    r.name,
                    coords.join(","),
                    r.dim,
                    r.multiplicity
                ));
            }
            out.push_str(&format!(
                "multiplicity free: {}\n",
                if *multiplicity_free { "yes" } else { "no" }
            ));
        }
        Body::Module { label, dim, p, task, factors, lattice, forms } => {
            out.push_str(&format!("module: {label} (dim {dim}, p = {p}), task {task}\n"));
            if !factors.is_empty() {
                out.push_str("exterior square composition factors:\n");
                for f in factors {
                    out.push_str(&format!("  dim {}  x{}\n", f.dim, f.multiplicity));
                }
            }
            if let Some(l) = lattice {
                out.push_str(&format!("exterior square submodule lattice ({}):\n", l.shape));
                let dims: Vec<String> = l.node_dims.iter().map(|d| d.to_string()).collect();
                out.push_str(&format!("  node dims: {}\n", dims.join(", ")));
                for (a, b) in &l.edges {
                    out.push_str(&format!("  {} < {}\n", l.node_dims[*a], l.node_dims[*b]));
                }
            }
            if !forms.is_empty() {
                out.push_str("invariant forms of the module:\n");
                for f in forms {
                    out.push_str(&format!(
                        "  {}, {}\n",
                        f.kind,
                        if f.nondegenerate { "non-degenerate" } else { "degenerate" }
                    ));
                }
                out.push_str(&format!("form space dimension: {}\n", forms.len()));
            } else if task == "forms" {
                out.push_str("invariant forms of the module: none\n");
            }
        }
        Body::PGroup {
            build,
            d,
            p,
            order,
            order_exponent,
            rank,
            exponent,
            nilpotency_class,
            exponent_p_class,
            derived_dim,
            gamma3_dim,
            frattini_dim,
            checks,
        } => {
            out.push_str(&format!("pgroup: build {build}, d = {d}, p = {p}\n"));
            out.push_str(&format!("order = {p}^{order_exponent} = {order}\n"));
            out.push_str(&format!("rank = {rank}\n"));
            out.push_str(&format!("exponent = {exponent}\n"));
            out.push_str(&format!("nilpotency class = {nilpotency_class}\n"));
            out.push_str(&format!("exponent-p class = {exponent_p_class}\n"));
            out.push_str(&format!("derived dim = {derived_dim}\n"));
            out.push_str(&format!("gamma3 dim = {gamma3_dim}\n"));
            out.push_str(&format!("Frattini dim = {frattini_dim}\n"));
            for c in checks {
                out.push_str(&format!("check {}: {}\n", c.name, if c.pass { "pass" } else { "FAIL" }));
            }
        }
    }

    if report.all_pass() {
        out.push_str("\nall checks passed\n");
    } else {
        out.push_str("\nCHECK FAILURES PRESENT\n");
    }
    out
}
