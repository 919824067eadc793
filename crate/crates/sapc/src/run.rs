//! Batch pipelines behind the subcommands.

use std::str::FromStr;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sapc_core::localsheaf::{
    descent_check, excision_square_check, subdivision_guide, DescentMode, LocalError, LocalSystem, OpenCertificate,
    SlantContext,
};
use sapc_core::open::FamilyError;
use sapc_core::sapc::{
    manifold_slant_context, product_sapc, sap_pair_from_manifold_window, SapcError, SymmetricComplex,
};
use sapc_core::{open_star_family, star_union_family, Open, OpenFamily, OrientedManifoldComplex, SimplicialComplex};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::io::{load, Document, InputError};
use crate::report::{Certificate, FormSummary, Group, SapcResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Signature,
    Duality,
    Excision,
    Descent,
    Product,
    Suite,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Signature => "signature",
            Command::Duality => "duality",
            Command::Excision => "excision",
            Command::Descent => "descent",
            Command::Product => "product",
            Command::Suite => "suite",
        }
    }
}

/// Which lattice of opens local questions are asked over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilyChoice {
    /// All unions of open vertex stars.
    Stars,
    /// Lattice generated by the open stars of vertices and edges.
    StarsAndEdges,
    /// Lattice generated by the open stars of the given simplices.
    Custom(Vec<Vec<u32>>),
}

impl FromStr for FamilyChoice {
    type Err = String;

    /// `stars`, `stars-and-edges`, or `custom:0;1;0,1` (simplices separated by `;`).
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "stars" => Ok(FamilyChoice::Stars),
            "stars-and-edges" => Ok(FamilyChoice::StarsAndEdges),
            _ => {
                let Some(rest) = s.strip_prefix("custom:") else {
                    return Err(format!("unknown family `{s}` (expected stars, stars-and-edges or custom:SEEDS)"));
                };
                let mut seeds = Vec::new();
                for part in rest.split(';').filter(|p| !p.trim().is_empty()) {
                    let mut simplex = part
                        .split(',')
                        .map(|v| v.trim().parse::<u32>().map_err(|_| format!("bad vertex `{v}` in `{part}`")))
                        .collect::<Result<Vec<_>, _>>()?;
                    simplex.sort_unstable();
                    seeds.push(simplex);
                }
                if seeds.is_empty() {
                    return Err("custom family needs at least one seed simplex".into());
                }
                Ok(FamilyChoice::Custom(seeds))
            }
        }
    }
}

impl FamilyChoice {
    pub fn label(&self) -> String {
        match self {
            FamilyChoice::Stars => "stars".into(),
            FamilyChoice::StarsAndEdges => "stars-and-edges".into(),
            FamilyChoice::Custom(seeds) => {
                let parts: Vec<String> =
                    seeds.iter().map(|s| s.iter().map(u32::to_string).collect::<Vec<_>>().join(",")).collect();
                format!("custom:{}", parts.join(";"))
            }
        }
    }

    pub fn build(&self, x: &SimplicialComplex, cap: usize) -> Result<Arc<OpenFamily>, FamilyError> {
        let family = match self {
            FamilyChoice::Stars => star_union_family(x, cap)?,
            FamilyChoice::StarsAndEdges => {
                let seeds: Vec<Vec<u32>> = x.simplices(0).iter().chain(x.simplices(1)).cloned().collect();
                open_star_family(x, &seeds, cap)?
            }
            FamilyChoice::Custom(seeds) => open_star_family(x, seeds, cap)?,
        };
        Ok(Arc::new(family))
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub inputs: Vec<String>,
    pub family: FamilyChoice,
    pub window: usize,
    pub poset_cap: usize,
    /// Worker threads; 0 uses every available core.
    pub jobs: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: Command::Suite,
            inputs: Vec::new(),
            family: FamilyChoice::Stars,
            window: 2,
            poset_cap: 20000,
            jobs: 0,
        }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error("{0}")]
    Usage(String),
    #[error("{context}: {message}")]
    Computation { context: String, message: String },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Input(_) | RunError::Usage(_) => 2,
            RunError::Computation { .. } => 1,
        }
    }

    fn compute(context: &str, e: impl std::fmt::Display) -> Self {
        RunError::Computation { context: context.into(), message: e.to_string() }
    }
}

/// A finished run: the JSON report, a text summary, and whether every verdict held.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Value,
    pub summary: String,
    pub success: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.success {
            0
        } else {
            1
        }
    }
}

pub fn run(config: &RunConfig) -> Result<Outcome, RunError> {
    if config.window < 1 {
        return Err(RunError::Usage("--window must be at least 1".into()));
    }
    if config.poset_cap < 1 {
        return Err(RunError::Usage("--poset-cap must be at least 1".into()));
    }
    let arity_ok = match config.command {
        Command::Suite => config.inputs.is_empty(),
        Command::Product => config.inputs.len() == 2,
        _ => !config.inputs.is_empty(),
    };
    if !arity_ok {
        return Err(RunError::Usage(match config.command {
            Command::Suite => "suite takes no inputs".into(),
            Command::Product => "product takes exactly two inputs".into(),
            c => format!("{} needs at least one input", c.name()),
        }));
    }
    if config.command == Command::Suite {
        return Ok(crate::suite::run_suite(config));
    }
    let docs = config.inputs.iter().map(|i| load(i)).collect::<Result<Vec<_>, _>>()?;
    with_pool(config.jobs, || match config.command {
        Command::Signature => collect(config, &docs, signature_entry),
        Command::Duality => collect(config, &docs, duality_entry),
        Command::Excision => collect(config, &docs, excision_entry),
        Command::Descent => collect(config, &docs, descent_entry),
        Command::Product => product_entry(config, &docs[0], &docs[1]),
        Command::Suite => unreachable!(),
    })
}

/// Runs `f` on a pool of `jobs` threads (all cores for 0).
pub fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

type Entry = fn(&RunConfig, &Document) -> Result<(Value, Vec<String>, bool), RunError>;

fn collect(config: &RunConfig, docs: &[Document], entry: Entry) -> Result<Outcome, RunError> {
    let mut results = Vec::new();
    let mut summary = Vec::new();
    let mut success = true;
    for d in docs {
        let (v, lines, ok) = entry(config, d)?;
        results.push(v);
        summary.extend(lines);
        success &= ok;
    }
    let report = json!({
        "command": config.command.name(),
        "config": config_json(config),
        "results": results,
        "overall": success,
    });
    Ok(Outcome { report, summary: summary.join("\n"), success })
}

pub fn config_json(config: &RunConfig) -> Value {
    json!({
        "family": config.family.label(),
        "window": config.window,
        "poset_cap": config.poset_cap,
    })
}

fn merge(base: impl serde::Serialize, extra: Value) -> Value {
    let mut v = serde_json::to_value(base).expect("plain data serializes");
    if let (Value::Object(m), Value::Object(e)) = (&mut v, extra) {
        m.extend(e);
    }
    v
}

fn signature_entry(config: &RunConfig, doc: &Document) -> Result<(Value, Vec<String>, bool), RunError> {
    let m = doc.manifold()?;
    let ctx = doc.name.as_str();
    let err = |e: SapcError| RunError::compute(ctx, e);
    if !m.has_boundary() {
        let sc = SymmetricComplex::from_manifold_window(&m, config.window).map_err(err)?;
        let cert = sc.global_certificate().map_err(err)?;
        let sig = sc.signature().map_err(err)?;
        let result = SapcResult {
            name: doc.name.clone(),
            dimension: m.dim(),
            nondegenerate: cert.overall,
            signature: sig.signature,
            certificate: (&cert).into(),
        };
        let line = format!(
            "{}: dimension {}, signature {}{}, {}",
            doc.name,
            m.dim(),
            sig.signature,
            if sig.applicable {
                format!(" (middle rank {})", sig.rank)
            } else {
                " (dimension not divisible by 4)".into()
            },
            if cert.overall { "nondegenerate" } else { "DEGENERATE" }
        );
        Ok((merge(result, json!({ "form": FormSummary::from(&sig) })), vec![line], cert.overall))
    } else {
        let pair = sap_pair_from_manifold_window(&m, config.window).map_err(err)?;
        let cert = pair.relative_certificate().map_err(err)?;
        let sig = pair.signature().map_err(err)?;
        let boundary = pair.boundary();
        let bsig = boundary.signature().map_err(err)?;
        let bnd = boundary.is_nondegenerate().map_err(err)?;
        let ok = cert.overall && bnd && bsig.signature == 0;
        let result = SapcResult {
            name: doc.name.clone(),
            dimension: m.dim(),
            nondegenerate: cert.overall,
            signature: sig.signature,
            certificate: (&cert).into(),
        };
        let extra = json!({
            "form": FormSummary::from(&sig),
            "boundary": {
                "dimension": boundary.n,
                "nondegenerate": bnd,
                "signature": bsig.signature,
            },
        });
        let line = format!(
            "{}: pair of dimension {}, relative signature {}, boundary signature {}, {}",
            doc.name,
            m.dim(),
            sig.signature,
            bsig.signature,
            if ok { "nondegenerate" } else { "FAILED" }
        );
        Ok((merge(result, extra), vec![line], ok))
    }
}

/// Per-open slant certificates, in family order, computed on the current pool.
pub fn certify_opens(ctx: &SlantContext) -> Result<Vec<OpenCertificate>, LocalError> {
    let family = ctx.system().family().clone();
    family.opens().par_iter().enumerate().map(|(i, o)| ctx.certify(o, family.label(i))).collect()
}

fn duality_entry(config: &RunConfig, doc: &Document) -> Result<(Value, Vec<String>, bool), RunError> {
    let m = doc.manifold()?;
    if m.has_boundary() {
        return Err(RunError::compute(&doc.name, "local duality needs a closed manifold"));
    }
    let family = config.family.build(m.base(), config.poset_cap).map_err(|e| RunError::compute(&doc.name, e))?;
    let ctx = manifold_slant_context(&m, family.clone()).map_err(|e| RunError::compute(&doc.name, e))?;
    let certs = certify_opens(&ctx).map_err(|e| RunError::compute(&doc.name, e))?;
    let failed = certs.iter().filter(|c| !c.overall).count();
    let ok = failed == 0;
    let value = json!({
        "name": doc.name,
        "dimension": m.dim(),
        "family": config.family.label(),
        "opens": family.len(),
        "overall": ok,
        "certificates": certs.iter().map(Certificate::from).collect::<Vec<_>>(),
    });
    let line = format!(
        "{}: {} of {} opens certified{}",
        doc.name,
        certs.len() - failed,
        certs.len(),
        if ok { "" } else { " (FAILED)" }
    );
    Ok((value, vec![line], ok))
}

/// Two standard splittings `X = U ∪ V`: the open star of the last vertex
/// against the complement of its closure, and the stars of the two halves
/// of the vertex set.
pub fn splittings(sys: &LocalSystem, x: &SimplicialComplex) -> Vec<(String, Open, Open)> {
    let space = sys.space();
    let nv = x.count(0);
    let last = nv - 1;
    let last_cell = x.global_id(&[last as u32]).expect("vertex");
    let mut out = vec![(
        format!("star of vertex {last} and its complement"),
        space.total().difference(&space.down_closure([last_cell])),
        space.up_closure([last_cell]),
    )];
    if nv >= 2 {
        let half = nv.div_ceil(2);
        let ids = |r: std::ops::Range<usize>| -> Vec<usize> {
            r.map(|v| x.global_id(&[v as u32]).expect("vertex")).collect()
        };
        out.push((
            format!("stars of vertices 0..{half} and {half}..{nv}"),
            space.up_closure(ids(0..half)),
            space.up_closure(ids(half..nv)),
        ));
    }
    out
}

/// Excision verdicts for each splitting, on the subdivision guide over the star lattice.
pub fn excision_report(x: &SimplicialComplex, cap: usize) -> Result<(Value, bool), RunError> {
    let family = FamilyChoice::Stars.build(x, cap).map_err(|e| RunError::compute("excision", e))?;
    let (sys, _) = subdivision_guide(x, family).map_err(|e| RunError::compute("excision", e))?;
    let mut rows = Vec::new();
    let mut ok = true;
    for (label, u, v) in splittings(&sys, x) {
        let r = excision_square_check(&sys, &u, &v).map_err(|e| RunError::compute("excision", e))?;
        let pass = r.mayer_vietoris_exact && r.homotopy_pushout && r.relative_quasi_iso;
        ok &= pass;
        rows.push(json!({
            "splitting": label,
            "mayer_vietoris_exact": r.mayer_vietoris_exact,
            "homotopy_pushout": r.homotopy_pushout,
            "relative_quasi_iso": r.relative_quasi_iso,
            "degrees": r.degrees.iter().map(|d| json!({
                "j": d.j,
                "betti": [d.betti_intersection, d.betti_u, d.betti_v, d.betti_union],
                "ranks": d.ranks.map(|(a, b, c)| vec![a, b, c]),
                "exact": d.exact,
            })).collect::<Vec<_>>(),
        }));
    }
    Ok((Value::Array(rows), ok))
}

fn excision_entry(config: &RunConfig, doc: &Document) -> Result<(Value, Vec<String>, bool), RunError> {
    let x = doc.complex()?;
    let (rows, ok) = excision_report(&x, config.poset_cap)?;
    let value = json!({ "name": doc.name, "splittings": rows, "overall": ok });
    Ok((value, vec![format!("{}: excision {}", doc.name, if ok { "holds" } else { "FAILED" })], ok))
}

/// Closure of `gens` under union (descent) or intersection (codescent).
pub fn close_under(gens: &[Open], mode: DescentMode) -> Vec<Open> {
    let mut out: Vec<Open> = Vec::new();
    for g in gens {
        if !out.contains(g) {
            out.push(g.clone());
        }
    }
    let mut i = 0;
    while i < out.len() {
        for j in 0..i {
            let c = match mode {
                DescentMode::Descent => out[i].union(&out[j]),
                DescentMode::Codescent => out[i].intersection(&out[j]),
            };
            if !out.contains(&c) {
                out.push(c);
            }
        }
        i += 1;
    }
    out
}

/// `count` random covers: two or three unions of vertex stars, each closed
/// up under unions and under intersections, and both comparisons checked.
pub fn random_descent(
    x: &SimplicialComplex,
    count: usize,
    seed: u64,
    cap: usize,
) -> Result<(Vec<Value>, bool), RunError> {
    let family = FamilyChoice::Stars.build(x, cap).map_err(|e| RunError::compute("descent", e))?;
    let (sys, _) = subdivision_guide(x, family).map_err(|e| RunError::compute("descent", e))?;
    let space = sys.space().clone();
    let nv = x.count(0);
    let vertex_ids: Vec<usize> = (0..nv).map(|v| x.global_id(&[v as u32]).expect("vertex")).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut ok = true;
    for _ in 0..count {
        let k = rng.gen_range(2..=3usize);
        let mut gens = Vec::with_capacity(k);
        let mut names = Vec::with_capacity(k);
        for _ in 0..k {
            let size = rng.gen_range(1..=nv.div_ceil(2));
            let mut vs: Vec<usize> = (0..nv).collect();
            vs.shuffle(&mut rng);
            vs.truncate(size);
            vs.sort_unstable();
            gens.push(space.up_closure(vs.iter().map(|&v| vertex_ids[v])));
            names.push(vs);
        }
        let mut verdicts = Map::new();
        for mode in [DescentMode::Descent, DescentMode::Codescent] {
            let w = close_under(&gens, mode);
            let r = descent_check(&sys, &w, mode).map_err(|e| RunError::compute("descent", e))?;
            ok &= r.quasi_iso;
            verdicts.insert(
                match mode {
                    DescentMode::Descent => "descent".into(),
                    DescentMode::Codescent => "codescent".into(),
                },
                json!({
                    "members": w.len(),
                    "quasi_iso": r.quasi_iso,
                    "value_homology": r.value_homology.iter().map(Group::from).collect::<Vec<_>>(),
                }),
            );
        }
        out.push(json!({ "star_unions": names, "checks": verdicts }));
    }
    Ok((out, ok))
}

/// Seed derived from a name, so covers are reproducible per input.
pub fn name_seed(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

fn descent_entry(config: &RunConfig, doc: &Document) -> Result<(Value, Vec<String>, bool), RunError> {
    let x = doc.complex()?;
    let (covers, ok) = random_descent(&x, 4, name_seed(&doc.name), config.poset_cap)?;
    let n = covers.len();
    let value = json!({ "name": doc.name, "covers": covers, "overall": ok });
    let line =
        format!("{}: {} random covers, descent and codescent {}", doc.name, n, if ok { "hold" } else { "FAILED" });
    Ok((value, vec![line], ok))
}

fn closed(doc: &Document, window: usize) -> Result<(OrientedManifoldComplex, SymmetricComplex), RunError> {
    let m = doc.manifold()?;
    let sc = SymmetricComplex::from_manifold_window(&m, window).map_err(|e| RunError::compute(&doc.name, e))?;
    Ok((m, sc))
}

fn product_entry(config: &RunConfig, a: &Document, b: &Document) -> Result<Outcome, RunError> {
    let (_, x) = closed(a, config.window)?;
    let (_, y) = closed(b, config.window)?;
    let ctx = format!("{} x {}", a.name, b.name);
    let err = |e: SapcError| RunError::compute(&ctx, e);
    let p = product_sapc(&x, &y, true).map_err(err)?;
    let cert = p.certificate().expect("certified product").per_open[0].clone();
    let sig = p.signature().map_err(err)?;
    let (sx, sy) = (x.signature().map_err(err)?, y.signature().map_err(err)?);
    let multiplicative = sig.signature == sx.signature * sy.signature;
    let ok = cert.overall && multiplicative;
    let result = SapcResult {
        name: p.name.clone(),
        dimension: p.n,
        nondegenerate: cert.overall,
        signature: sig.signature,
        certificate: (&cert).into(),
    };
    let value = merge(
        result,
        json!({
            "form": FormSummary::from(&sig),
            "factor_signatures": [sx.signature, sy.signature],
            "multiplicative": multiplicative,
        }),
    );
    let mut line = format!("{}: dimension {}, signature {}", p.name, p.n, sig.signature);
    if sig.applicable {
        line.push_str(&format!(", middle rank {}", sig.rank));
    }
    if sig.hyperbolic.is_some() {
        line.push_str(", middle form hyperbolic");
    }
    line.push_str(if ok { ", nondegenerate" } else { ", FAILED" });
    let report = json!({
        "command": "product",
        "config": config_json(config),
        "results": [value],
        "overall": ok,
    });
    Ok(Outcome { report, summary: line, success: ok })
}
