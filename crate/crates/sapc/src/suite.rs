//! The acceptance battery. Criteria 1 to 9 are computed here; criterion 10
//! (two suite runs agree byte for byte outside `metadata`) is checked by
//! comparing reports.

use std::sync::Arc;
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sapc_core::chain::{induced_map, is_iso_matrix, HomologyBasis};
use sapc_core::equivariant::{norm_map, verify_steenrod, InvolutiveComplex};
use sapc_core::localsheaf::{box_economy, subdivision_guide, BasisSet, ClosedChoice};
use sapc_core::sapc::{
    congruence_signature, lagrangian_pair, manifold_slant_context, product_pair, product_sapc,
    sap_pair_from_manifold_window, SymmetricComplex, SymmetricPair,
};
use sapc_core::{
    homology, mapping_cone, open_star_family, ChainComplex, ChainMap, OrientedManifoldComplex, SimplicialComplex,
};
use serde_json::{json, Map, Value};

use crate::io::load;
use crate::report::Group;
use crate::run::{
    certify_opens, config_json, excision_report, name_seed, random_descent, with_pool, FamilyChoice, Outcome, RunConfig,
};

pub const TITLES: [&str; 10] = [
    "homology of the corpus",
    "signature battery",
    "local duality over the vertex-star lattice",
    "cup-i relations and the box involution",
    "descent and codescent on random covers",
    "excision",
    "bordism: boundaries and products",
    "suspension and collapse",
    "norm map",
    "determinism of suite reports",
];

/// Outcome of one criterion.
#[derive(Clone, Debug)]
pub struct CriterionOutcome {
    pub id: usize,
    pub pass: bool,
    pub details: Value,
    pub elapsed: Duration,
}

type Verdict = Result<(bool, Value), String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Runs criterion `id` (1 to 9).
pub fn criterion(id: usize, config: &RunConfig) -> CriterionOutcome {
    let start = Instant::now();
    let verdict = match id {
        1 => homology_corpus(),
        2 => signature_battery(config),
        3 => local_duality(config),
        4 => equivariance(config),
        5 => descent(config),
        6 => excision(config),
        7 => bordism(config),
        8 => suspension_and_collapse(config),
        9 => norm(),
        _ => Err(format!("criterion {id} is not computed by the suite")),
    };
    let (pass, details) = verdict.unwrap_or_else(|e| (false, json!({ "error": e })));
    CriterionOutcome { id, pass, details, elapsed: start.elapsed() }
}

/// Every criterion the suite computes, in order, with the report around them.
pub fn run_suite(config: &RunConfig) -> Outcome {
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let clock = Instant::now();
    let (outcomes, threads) = with_pool(config.jobs, || {
        ((1..=9).map(|k| criterion(k, config)).collect::<Vec<_>>(), rayon::current_num_threads())
    });
    let success = outcomes.iter().all(|c| c.pass);
    let mut timings = Map::new();
    for c in &outcomes {
        timings.insert(c.id.to_string(), json!(c.elapsed.as_secs_f64()));
    }
    let report = json!({
        "metadata": {
            "tool": "sapc",
            "version": env!("CARGO_PKG_VERSION"),
            "started_unix_seconds": started,
            "elapsed_seconds": clock.elapsed().as_secs_f64(),
            "threads": threads,
            "criterion_seconds": timings,
        },
        "command": "suite",
        "config": config_json(config),
        "criteria": outcomes.iter().map(|c| json!({
            "id": c.id,
            "title": TITLES[c.id - 1],
            "pass": c.pass,
            "details": c.details,
        })).collect::<Vec<_>>(),
        "overall": success,
    });
    let summary = outcomes
        .iter()
        .map(|c| {
            format!(
                "criterion {:>2} {} {} ({:.1} s)",
                c.id,
                if c.pass { "PASS" } else { "FAIL" },
                TITLES[c.id - 1],
                c.elapsed.as_secs_f64()
            )
        })
        .collect::<Vec<_>>()
        .join("\n");
    Outcome { report, summary, success }
}

/// The report with its `metadata` block removed, serialized.
pub fn without_metadata(report: &Value) -> String {
    let mut v = report.clone();
    if let Value::Object(m) = &mut v {
        m.remove("metadata");
    }
    serde_json::to_string_pretty(&v).expect("plain data serializes")
}

fn group(betti: usize, torsion: &[u64]) -> Group {
    Group { betti, torsion: torsion.iter().map(|&t| json!(t)).collect() }
}

fn homology_corpus() -> Verdict {
    let expected: [(&str, Vec<Group>); 4] = [
        ("s2", vec![group(1, &[]), group(0, &[]), group(1, &[])]),
        ("s4", vec![group(1, &[]), group(0, &[]), group(0, &[]), group(0, &[]), group(1, &[])]),
        ("t2_7", vec![group(1, &[]), group(2, &[]), group(1, &[])]),
        ("rp2_6", vec![group(1, &[]), group(0, &[2]), group(0, &[])]),
    ];
    let mut rows = Vec::new();
    let mut ok = true;
    for (name, want) in expected {
        let start = Instant::now();
        let x = load(name).map_err(err)?.complex().map_err(err)?;
        let got: Vec<Group> = x.chain_complex().homology_all().iter().map(Group::from).collect();
        let fast = start.elapsed() < Duration::from_secs(1);
        let matches = got == want;
        ok &= matches && fast;
        rows.push(json!({ "name": name, "homology": got, "matches": matches, "under_one_second": fast }));
    }
    Ok((ok, Value::Array(rows)))
}

fn closed_complex(name: &str, window: usize) -> Result<(OrientedManifoldComplex, SymmetricComplex), String> {
    let m = load(name).map_err(err)?.manifold().map_err(err)?;
    let sc = SymmetricComplex::from_manifold_window(&m, window).map_err(err)?;
    Ok((m, sc))
}

fn signature_battery(config: &RunConfig) -> Verdict {
    let limit = Duration::from_secs(30);
    let mut rows = Vec::new();
    let mut ok = true;
    let mut record =
        |label: &str, expected: i64, sc: &SymmetricComplex, start: Instant, hyperbolic: bool| -> Result<(), String> {
            let r = sc.signature().map_err(err)?;
            let nondegenerate = match sc.certificate() {
                Some(c) => c.overall,
                None => sc.global_certificate().map_err(err)?.overall,
            };
            let fast = start.elapsed() < limit;
            let hyp = !hyperbolic || (r.rank == 2 && r.hyperbolic.is_some());
            let pass = r.signature == expected && nondegenerate && fast && hyp;
            ok &= pass;
            rows.push(json!({
                "name": label,
                "signature": r.signature,
                "expected": expected,
                "middle_rank": r.rank,
                "hyperbolic": r.hyperbolic.is_some(),
                "nondegenerate": nondegenerate,
                "under_thirty_seconds": fast,
                "pass": pass,
            }));
            Ok(())
        };
    let start = Instant::now();
    let (_, s4) = closed_complex("s4", config.window)?;
    record("S4", 0, &s4, start, false)?;
    let start = Instant::now();
    let (m, cp2) = closed_complex("cp2_9", config.window)?;
    record("CP2_9", 1, &cp2, start, false)?;
    let start = Instant::now();
    let rev = SymmetricComplex::from_manifold_window(&m.reversed(), config.window).map_err(err)?;
    record("CP2_9 reversed", -1, &rev, start, false)?;
    let start = Instant::now();
    let (_, s2) = closed_complex("s2", config.window)?;
    let s2s2 = product_sapc(&s2, &s2, true).map_err(err)?;
    record("S2 x S2", 0, &s2s2, start, true)?;
    Ok((ok, Value::Array(rows)))
}

fn local_duality(config: &RunConfig) -> Verdict {
    let mut rows = Vec::new();
    let mut ok = true;
    for name in ["s2", "t2_7", "cp2_9"] {
        let start = Instant::now();
        let m = load(name).map_err(err)?.manifold().map_err(err)?;
        let family = FamilyChoice::Stars.build(m.base(), config.poset_cap).map_err(err)?;
        let ctx = manifold_slant_context(&m, family.clone()).map_err(err)?;
        let certs = certify_opens(&ctx).map_err(err)?;
        let certified = certs.iter().filter(|c| c.overall && c.exact && c.degrees.iter().all(|d| d.iso)).count();
        let mut row = json!({ "name": name, "opens": family.len(), "certified": certified });
        let mut pass = certified == family.len();
        if name == "cp2_9" {
            let fast = start.elapsed() < Duration::from_secs(120);
            row["under_two_minutes"] = json!(fast);
            pass &= fast;
        }
        row["pass"] = json!(pass);
        ok &= pass;
        rows.push(row);
    }
    Ok((ok, Value::Array(rows)))
}

fn interval_complex() -> SimplicialComplex {
    SimplicialComplex::from_maximal(2, &[vec![0, 1]]).expect("an edge")
}

fn equivariance(config: &RunConfig) -> Verdict {
    let mut steenrod = Vec::new();
    let mut ok = true;
    for name in ["s2", "s4", "t2_7", "rp2_6", "cp2_9", "d4"] {
        let x = Arc::new(load(name).map_err(err)?.complex().map_err(err)?);
        let (pass, row) = match verify_steenrod(&x, 3) {
            Ok(count) => (true, json!({ "name": name, "checked": count, "pass": true })),
            Err((k, i, s)) => (false, json!({ "name": name, "failed_at": { "k": k, "i": i, "s": s }, "pass": false })),
        };
        ok &= pass;
        steenrod.push(row);
    }
    let s2 = load("s2").map_err(err)?.complex().map_err(err)?;
    let edge = interval_complex();
    let windows: Vec<(&str, SimplicialComplex, Vec<Vec<u32>>, ClosedChoice, i32)> = vec![
        ("interval, closed simplices", edge.clone(), vec![vec![0], vec![1]], ClosedChoice::ClosedSimplices, 1),
        ("S2, stars of 0 and 1, vertices", s2.clone(), vec![vec![0], vec![1]], ClosedChoice::Vertices, 2),
        ("S2, stars of 0, 1 and 01, vertices", s2, vec![vec![0], vec![1], vec![0, 1]], ClosedChoice::Vertices, 2),
    ];
    let mut boxes = Vec::new();
    for (label, x, seeds, choice, n) in windows {
        let family = Arc::new(open_star_family(&x, &seeds, config.poset_cap).map_err(err)?);
        let (c, _) = subdivision_guide(&x, family).map_err(err)?;
        let b = box_economy(&c, &c, n, config.window as i32, &choice, config.poset_cap).map_err(err)?;
        let tau = b.involution().ok_or("box economy of C with itself carries τ")?.map_err(err)?;
        let square = tau.compose(&tau).map_err(err)?;
        let identity = square == ChainMap::identity(tau.source().clone());
        ok &= identity;
        boxes.push(json!({
            "window": label,
            "degrees": [n - config.window as i32, n + config.window as i32],
            "triples": b.triples.len(),
            "generators": b.complex().total_rank(),
            "tau_squared_is_identity": identity,
        }));
    }
    Ok((ok, json!({ "steenrod": steenrod, "box_involution": boxes })))
}

fn descent(config: &RunConfig) -> Verdict {
    let mut rows = Vec::new();
    let mut ok = true;
    let mut covers = 0;
    for name in ["s2", "s4", "t2_7", "rp2_6", "d4"] {
        let x = load(name).map_err(err)?.complex().map_err(err)?;
        let (c, pass) = random_descent(&x, 4, name_seed(name), config.poset_cap).map_err(err)?;
        covers += c.len();
        ok &= pass;
        rows.push(json!({ "name": name, "covers": c, "pass": pass }));
    }
    ok &= covers >= 20;
    Ok((ok, json!({ "covers": covers, "inputs": rows })))
}

fn excision(config: &RunConfig) -> Verdict {
    let mut rows = Vec::new();
    let mut ok = true;
    for name in ["s2", "t2_7"] {
        let x = load(name).map_err(err)?.complex().map_err(err)?;
        let (r, pass) = excision_report(&x, config.poset_cap).map_err(err)?;
        ok &= pass;
        rows.push(json!({ "name": name, "splittings": r, "pass": pass }));
    }
    Ok((ok, Value::Array(rows)))
}

fn interval_pair(window: usize) -> Result<SymmetricPair, String> {
    let m = OrientedManifoldComplex::from_top_simplices("I", 2, &[vec![0, 1]], None, true).map_err(err)?;
    sap_pair_from_manifold_window(&m, window).map_err(err)
}

/// Unimodular matrix from random elementary column operations.
pub fn random_unimodular(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<i64>> {
    let mut p: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
    for _ in 0..3 * n {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i != j {
            let k = rng.gen_range(-2..=2);
            for row in p.iter_mut() {
                row[i] += k * row[j];
            }
        }
    }
    p
}

fn bordism(config: &RunConfig) -> Verdict {
    let mut pairs = Vec::new();
    let mut ok = true;
    let mut check_pair = |label: String, p: &SymmetricPair| -> Result<(), String> {
        let b = p.boundary().signature().map_err(err)?;
        let nondegenerate = p.boundary().is_nondegenerate().map_err(err)?;
        let relative = p.relative_certificate().map_err(err)?.overall;
        let pass = b.signature == 0 && nondegenerate && relative;
        ok &= pass;
        pairs.push(json!({
            "pair": label,
            "boundary_dimension": p.boundary().n,
            "boundary_signature": b.signature,
            "boundary_middle_rank": b.rank,
            "boundary_nondegenerate": nondegenerate,
            "relative_duality": relative,
            "pass": pass,
        }));
        Ok(())
    };
    let d4 = load("d4").map_err(err)?.manifold().map_err(err)?;
    check_pair("D4".into(), &sap_pair_from_manifold_window(&d4, config.window).map_err(err)?)?;
    let interval = interval_pair(config.window)?;
    let (_, s4) = closed_complex("s4", config.window)?;
    let (_, cp2) = closed_complex("cp2_9", config.window)?;
    check_pair("I x S4".into(), &product_pair(&interval, &s4).map_err(err)?)?;
    check_pair("I x CP2_9".into(), &product_pair(&interval, &cp2).map_err(err)?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for t in 0..10 {
        let r = 1 + t % 3;
        let basis = random_unimodular(&mut rng, 2 * r);
        check_pair(format!("lagrangian #{t} (rank {})", 2 * r), &lagrangian_pair(&basis).map_err(err)?)?;
    }

    let cp2_rev = cp2.reversed();
    let closed: [(&str, &SymmetricComplex); 3] = [("S4", &s4), ("CP2_9", &cp2), ("-CP2_9", &cp2_rev)];
    let mut products = Vec::new();
    for (na, a) in closed {
        for (nb, b) in closed {
            let sa = a.signature().map_err(err)?.signature;
            let sb = b.signature().map_err(err)?.signature;
            let sab = product_sapc(a, b, false).map_err(err)?.signature().map_err(err)?.signature;
            let pass = sab == sa * sb;
            ok &= pass;
            products.push(
                json!({ "product": format!("{na} x {nb}"), "signature": sab, "factors": [sa, sb], "pass": pass }),
            );
        }
    }
    Ok((ok, json!({ "pairs": pairs, "products": products })))
}

fn suspension_and_collapse(config: &RunConfig) -> Verdict {
    let mut ok = true;
    let interval = interval_pair(config.window)?;
    let (_, s4) = closed_complex("s4", config.window)?;
    let (m_cp2, cp2) = closed_complex("cp2_9", config.window)?;
    let cp2_rev = cp2.reversed();
    let mut suspension = Vec::new();
    for (label, x) in [("S4", &s4), ("CP2_9", &cp2), ("-CP2_9", &cp2_rev)] {
        let sig = x.signature().map_err(err)?.signature;
        let cyl = product_pair(&interval, x).map_err(err)?;
        let mid = (x.n / 2) as i32;
        let form = cyl.relative_pairing(mid + 1).map_err(err)?;
        let shifted = congruence_signature(&form).map_err(err)?;
        let pass = shifted == sig;
        ok &= pass;
        suspension.push(json!({ "name": label, "signature": sig, "suspended_signature": shifted, "pass": pass }));
    }

    let mut collapse = Vec::new();
    let m_s4 = load("s4").map_err(err)?.manifold().map_err(err)?;
    for (label, m, expected) in [("CP2_9", &m_cp2, 1i64), ("S4", &m_s4, 0)] {
        let y = without_vertex_star(m, 0)?;
        let pair = sap_pair_from_manifold_window(&y, config.window).map_err(err)?;
        let sig = pair.signature().map_err(err)?.signature;
        let relative = pair.relative_certificate().map_err(err)?.overall;
        let pass = sig == expected && relative;
        ok &= pass;
        collapse.push(json!({
            "collapse": format!("{label} onto the complement of the open star of vertex 0"),
            "signature": sig,
            "expected": expected,
            "relative_duality": relative,
            "pass": pass,
        }));
    }
    let hemi = hemisphere_collapse()?;
    ok &= hemi["pass"].as_bool().unwrap_or(false);
    collapse.push(hemi);
    Ok((ok, json!({ "suspension": suspension, "collapse": collapse })))
}

/// The closed complement of the open star of `v`, oriented by restriction.
fn without_vertex_star(m: &OrientedManifoldComplex, v: u32) -> Result<OrientedManifoldComplex, String> {
    let x = m.base();
    let n = m.dim();
    let mut tops = Vec::new();
    let mut signs = Vec::new();
    for (s, &e) in x.simplices(n).iter().zip(m.signs()) {
        if !s.contains(&v) {
            tops.push(s.iter().map(|&a| a as i64).collect::<Vec<_>>());
            signs.push(e as i64);
        }
    }
    OrientedManifoldComplex::from_top_simplices(
        &format!("{} - St({v})", m.name()),
        x.vertex_count(),
        &tops,
        Some(&signs),
        true,
    )
    .map_err(err)
}

/// `S² → D²/∂D²` for the closed star `D²` of vertex 3: the quotients agree,
/// `H₂` maps isomorphically, and the fundamental classes correspond.
fn hemisphere_collapse() -> Result<Value, String> {
    let s2 = load("s2").map_err(err)?.manifold().map_err(err)?;
    let x = s2.base().clone();
    let disk = |keep: &dyn Fn(&[u32]) -> bool| -> (Vec<Vec<i64>>, Vec<i64>) {
        x.simplices(2)
            .iter()
            .zip(s2.signs())
            .filter(|(s, _)| keep(s))
            .map(|(s, &e)| (s.iter().map(|&v| v as i64).collect::<Vec<_>>(), e as i64))
            .unzip()
    };
    let (tops, signs) = disk(&|s| s.contains(&3));
    let y = OrientedManifoldComplex::from_top_simplices("D2", 4, &tops, Some(&signs), true).map_err(err)?;
    let cx = Arc::new(x.chain_complex());
    let cy = Arc::new(y.base().chain_complex());
    let rest_x = BasisSet::from_fn(&cx, |n, i| x.simplices(n as usize)[i].contains(&3));
    let rest_y = BasisSet::from_fn(&cy, |n, i| y.base().simplices(n as usize)[i].contains(&3));
    let qx = Arc::new(rest_x.complex(&cx).map_err(err)?);
    let qy = Arc::new(rest_y.complex(&cy).map_err(err)?);
    let same_quotient = qx == qy;
    let proj = BasisSet::full(&cx).transfer(&rest_x, cx.clone(), qx.clone()).map_err(err)?;
    let hx = HomologyBasis::compute(&cx, 2);
    let hq = HomologyBasis::compute(&qx, 2);
    let iso = is_iso_matrix(&induced_map(&proj, 2, &hx, &hq), &hx.group, &hq.group);
    let dense = |c: &ChainComplex, chain: Vec<(u32, i64)>| -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); c.rank(2)];
        for (i, a) in chain {
            v[i as usize] += a;
        }
        v
    };
    let pushed = proj.apply_big(2, &dense(&cx, s2.fundamental_cycle()));
    let omega_y = dense(&cy, y.fundamental_cycle());
    let classes_match = pushed == rest_y.in_degree(2).iter().map(|&i| omega_y[i].clone()).collect::<Vec<_>>();
    let relative = sap_pair_from_manifold_window(&y, 2).map_err(err)?.relative_certificate().map_err(err)?.overall;
    let pass = same_quotient && iso && classes_match && relative;
    Ok(json!({
        "collapse": "S2 onto the closed star of vertex 3 modulo its boundary",
        "same_quotient": same_quotient,
        "h2_isomorphism": iso,
        "fundamental_classes_match": classes_match,
        "relative_duality": relative,
        "pass": pass,
    }))
}

fn is_power_of_two(t: &BigInt) -> bool {
    t.is_positive() && (t & (t - BigInt::one())).is_zero()
}

fn norm() -> Verdict {
    let s2 = load("s2").map_err(err)?.complex().map_err(err)?;
    let d = InvolutiveComplex::tensor_square(&s2.chain_complex()).map_err(err)?;
    let (lo, hi) = (-3, 7);
    let f = norm_map(&d, lo, hi).map_err(err)?;
    let cone = mapping_cone(&f).map_err(err)?;
    let mut degrees = Vec::new();
    let mut ok = true;
    for k in 0..=4 {
        let h = homology(&cone, k);
        let pass = h.betti == 0 && h.torsion.iter().all(is_power_of_two);
        ok &= pass;
        degrees.push(json!({ "degree": k, "cone_homology": Group::from(&h), "invertible_after_inverting_two": pass }));
    }
    let z = InvolutiveComplex::trivial(Arc::new(ChainComplex::concentrated(0, 1)));
    let g = norm_map(&z, -1, 1).map_err(err)?;
    let src = HomologyBasis::compute(g.source(), 0);
    let dst = HomologyBasis::compute(g.target(), 0);
    let m = induced_map(&g, 0, &src, &dst);
    let two = m.rows() == 1 && m.cols() == 1 && m[(0, 0)].abs() == BigInt::from(2);
    ok &= two;
    Ok((
        ok,
        json!({
            "tensor_square_of_S2": { "window": [lo, hi], "degrees": degrees },
            "trivial_module_multiplication_by_two": two,
        }),
    ))
}
