//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line.
//!
//! Run with `cargo test -p lipext-cli --test acceptance -- --nocapture`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use lipext_cli::{verify, Target, VerifyParams};
use lipext_core::constructions::{ball_sequence_lambda20, place_dyadic, shrinking_ball_sequence, L1Family};
use lipext_core::extension::{
    cone_partition_operator, cone_retract, glue_pair, grid_points, lattice_net_constants, mcshane_operator,
    nearest_point_retraction, net_ball_operator, retraction_operator, GridBox, NetBall,
};
use lipext_core::free_space::{extension_constant_lp, kr_norm, kr_norm_dual, operator_norm_from_extension, EconstOptions};
use lipext_core::lipfn::mcshane_extend;
use lipext_core::metric::l1_dist;
use lipext_core::{
    lip_norm, validate_metric, FiniteMetricSpace, L1PointSet, LipFunction, McShaneMode, Molecule, OperatorKind, Subset,
};

const GRID_TOL: f64 = 1e-9;
const CONE_TOL: f64 = 1e-9;
const GLUE_TOL: f64 = 1e-9;
const NET_TOL: f64 = 1e-9;
const KR_DUALITY_TOL: f64 = 1e-7;
const KR_ISOMETRY_TOL: f64 = 1e-9;
const E_LOWER_TOL: f64 = 1e-9;
const E_UPPER_TOL: f64 = 1e-9;
const E_MONOTONE_TOL: f64 = 1e-7;
const MCSHANE_TOL: f64 = 1e-12;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn params(seed: u64) -> VerifyParams {
    VerifyParams { seed, tol: 1e-9, ..Default::default() }
}

fn row(report: &lipext_cli::RunReport, name: &str) -> f64 {
    report.results.iter().find(|r| r.name == name).unwrap_or_else(|| panic!("row {name}")).computed
}

fn random_graph_metric(rng: &mut ChaCha8Rng, n: usize) -> FiniteMetricSpace {
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let w = rng.gen_range(1.0..3.0);
            d[i][j] = w;
            d[j][i] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    validate_metric(&d).unwrap()
}

fn grid_interpolation() -> Check {
    let mut worst = 0.0f64;
    for n in 1..=3 {
        for side in 1..=4 {
            let p = VerifyParams { n: Some(n), box_size: Some(side), trials: Some(200), ..params(n as u64 * 10 + side as u64) };
            let r = verify::run(Target::GridInterp, &p).map_err(|e| e.to_string())?;
            let exact = row(&r, "exact_norm");
            worst = worst.max((exact - 1.0).abs());
            ensure((exact - 1.0).abs() <= GRID_TOL, || format!("n={n} side={side}: exact norm {exact}"))?;
            ensure(row(&r, "empirical_norm") <= 1.0 + GRID_TOL, || format!("n={n} side={side}: empirical above 1"))?;
        }
    }
    Ok(format!("max |norm - 1| = {worst:.2e}"))
}

/// Random partition of `0..n` into non-empty blocks of any size.
fn partition(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<usize>> {
    let mut coords: Vec<usize> = (0..n).collect();
    coords.shuffle(rng);
    let mut blocks = Vec::new();
    let mut i = 0;
    while i < n {
        let len = rng.gen_range(1..=n - i);
        blocks.push(coords[i..i + len].to_vec());
        i += len;
    }
    blocks
}

fn cone_retraction() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for t in 0..10_000 {
        let n = 1 + t % 5;
        let blocks = partition(&mut rng, n);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let y: Vec<f64> = match t % 3 {
            0 => (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect(),
            1 => x.iter().map(|a| a + rng.gen_range(-0.05..0.05)).collect(),
            // Pairs straddling a cone boundary: flip one coordinate of x.
            _ => {
                let mut y = x.clone();
                let k = rng.gen_range(0..n);
                y[k] = -y[k] * rng.gen_range(0.5..1.5);
                y
            }
        };
        let d = l1_dist(&x, &y);
        if d == 0.0 {
            continue;
        }
        for b in &blocks {
            worst = worst.max(l1_dist(&cone_retract(b, &x), &cone_retract(b, &y)) / d);
        }
    }
    ensure(worst <= 2.0 + CONE_TOL, || format!("retraction ratio {worst}"))?;

    let mut worst_op = 0.0f64;
    for n in 1..=5 {
        let blocks = partition(&mut rng, n);
        if blocks.iter().any(|b| b.len() > 3) {
            continue;
        }
        let samples: Vec<Vec<f64>> = (0..6).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let op = cone_partition_operator(n, &blocks, 1, &samples).map_err(|e| e.to_string())?;
        let norm = operator_norm_from_extension(&op.operator).map_err(|e| e.to_string())?.value;
        worst_op = worst_op.max(norm);
        ensure(norm <= 2.0 + CONE_TOL, || format!("n={n} {blocks:?}: operator norm {norm}"))?;
    }
    for seed in 0..5 {
        let p = VerifyParams { n: Some(1 + seed as usize), ..params(seed) };
        let r = verify::run(Target::Cone, &p).map_err(|e| e.to_string())?;
        ensure(r.pass, || format!("verify cone seed {seed} failed"))?;
        worst_op = worst_op.max(row(&r, "operator_exact_norm"));
    }
    Ok(format!("max pair ratio {worst:.6}, max operator norm {worst_op:.6}"))
}

fn glue_family_constant() -> Check {
    let mut families = 0;
    let mut worst = f64::INFINITY;
    for seed in 0..24u64 {
        let n = 1 + (seed % 5) as usize;
        let p = VerifyParams { n: Some(n), trials: Some(50), ..params(seed) };
        let r = verify::run(Target::GlueFamily, &p).map_err(|e| e.to_string())?;
        let sep = &r.details.as_ref().unwrap()["separation"];
        let (lambda, d) = (sep["lambda"].as_f64().unwrap(), sep["D"].as_f64().unwrap());
        let c = 1.0;
        let k_prime = 2.0 * c + 2.0 * lambda * (1.0 + d + c * d);
        let k = k_prime + 2.0 * lambda * ((k_prime + 1.0) * d + 1.0);
        let bound_28 = 28.0 * c * d.max(1.0).powi(2) * lambda * lambda;
        let exact = row(&r, "exact_norm");
        ensure(exact <= k + GLUE_TOL, || format!("seed {seed}: norm {exact} above K = {k}"))?;
        ensure(exact <= bound_28 + GLUE_TOL, || format!("seed {seed}: norm {exact} above {bound_28}"))?;
        worst = worst.min(k - exact);
        families += 1;
    }
    Ok(format!("{families} families, least slack {worst:.4}"))
}

fn net_ball_constant() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut report = Vec::new();
    for n in 1..=2usize {
        let w = 10;
        let net: Vec<Vec<f64>> = grid_points(&GridBox::cube(n, -w, w).unwrap())
            .into_iter()
            .map(|p| p.into_iter().map(|v| v as f64).collect())
            .collect();
        // Density by a quarter-step scan of the window, separation by all pairs.
        let fine = grid_points(&GridBox::cube(n, -4 * w, 4 * w).unwrap());
        let eps = fine
            .iter()
            .map(|p| {
                let q: Vec<f64> = p.iter().map(|&v| v as f64 / 4.0).collect();
                net.iter().map(|l| l1_dist(l, &q)).fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max);
        let mut delta = f64::INFINITY;
        for (i, a) in net.iter().enumerate() {
            for b in &net[i + 1..] {
                delta = delta.min(l1_dist(a, b));
            }
        }
        let constants = lattice_net_constants(n, w).unwrap();
        ensure(constants.eps == eps && constants.delta == delta, || format!("constants {constants:?}"))?;
        let bound = 2.0 + 4.0 * eps / delta;
        let mut worst = 0.0f64;
        for _ in 0..4 {
            let center: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let radius = rng.gen_range(0.6..5.0);
            let ball = NetBall::new(net.clone(), center, radius).map_err(|e| e.to_string())?;
            let image: Vec<usize> = (0..net.len()).map(|i| ball.retract(i)).collect();
            for i in 0..net.len() {
                for j in (i + 1)..net.len() {
                    let r = l1_dist(&net[image[i]], &net[image[j]]) / l1_dist(&net[i], &net[j]);
                    worst = worst.max(r);
                }
            }
            let op = net_ball_operator(&ball, constants).map_err(|e| e.to_string())?;
            ensure(op.claimed_bound() == bound, || "claimed bound".into())?;
        }
        ensure(worst <= bound + NET_TOL, || format!("n={n}: ratio {worst} above {bound}"))?;
        report.push(format!("n={n}: eps={eps} delta={delta} ratio={worst}"));
    }
    Ok(report.join("; "))
}

/// `max (|x| + |y|) / |x - y|` over cross pairs, anchor at the origin, clamped at 1.
fn scan_lambda(family: &L1Family) -> f64 {
    let origin = vec![0.0; family.dim()];
    let sets: Vec<Vec<&[f64]>> = (0..family.sets.len()).map(|i| family.set_coords(i)).collect();
    let mut lambda = 1.0f64;
    for i in 0..sets.len() {
        for j in (i + 1)..sets.len() {
            for x in &sets[i] {
                for y in &sets[j] {
                    lambda = lambda.max((l1_dist(x, &origin) + l1_dist(y, &origin)) / l1_dist(x, y));
                }
            }
        }
    }
    lambda
}

fn separation_constants_of_constructions() -> Check {
    let boxes = |diams: &[i64]| -> Vec<Vec<Vec<i64>>> {
        diams
            .iter()
            .map(|&d| {
                let a = d / 2;
                let mut pts = Vec::new();
                for i in 0..=a {
                    for j in 0..=(d - a) {
                        pts.push(vec![i + 3, j - 7]);
                    }
                }
                pts
            })
            .collect()
    };
    let mut out = Vec::new();
    for diams in [vec![1, 5, 17], vec![0, 0], vec![17, 1, 5, 3]] {
        let sets = boxes(&diams);
        let seeds: Vec<usize> = sets.iter().map(|s| s.len() / 2).collect();
        let placed = place_dyadic(&sets, &seeds).map_err(|e| e.to_string())?;
        let lambda = scan_lambda(&placed.family);
        ensure((lambda - placed.report.lambda).abs() <= 1e-12, || "dyadic lambda scan disagrees".into())?;
        ensure(lambda <= 32.0, || format!("dyadic lambda {lambda}"))?;
        out.push(format!("dyadic{diams:?} {lambda:.3}"));
    }
    for dim in 1..=2 {
        let seq = ball_sequence_lambda20(dim, 3, None).map_err(|e| e.to_string())?;
        let lambda = scan_lambda(&seq.family);
        ensure((lambda - seq.report.lambda).abs() <= 1e-12, || "ball lambda scan disagrees".into())?;
        ensure(lambda <= 20.0, || format!("ball lambda {lambda}"))?;
        out.push(format!("balls20 dim {dim} {lambda:.3}"));
    }
    for count in 2..=3 {
        let dims: Vec<usize> = (1..=count).map(|k| k.min(2)).collect();
        let seq = shrinking_ball_sequence(&dims, count, None).map_err(|e| e.to_string())?;
        let lambda = scan_lambda(&seq.family);
        ensure((lambda - seq.report.lambda).abs() <= 1e-12, || "shrinking lambda scan disagrees".into())?;
        ensure(lambda <= 24.0, || format!("shrinking lambda {lambda}"))?;
        out.push(format!("balls24 count {count} {lambda:.3}"));
    }
    Ok(out.join(", "))
}

fn kr_duality() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_gap = 0.0f64;
    let mut worst_iso = 0.0f64;
    for _ in 0..100 {
        let m = Arc::new(random_graph_metric(&mut rng, 8));
        let mut w: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mass: f64 = w.iter().sum();
        w[7] -= mass;
        let mu = Molecule::new(m.clone(), w.iter().copied().enumerate().collect()).map_err(|e| e.to_string())?;
        let primal = kr_norm(&mu).map_err(|e| e.to_string())?;
        let dual = kr_norm_dual(&mu, true).map_err(|e| e.to_string())?;
        worst_gap = worst_gap.max((primal - dual).abs());
        ensure((primal - dual).abs() <= KR_DUALITY_TOL, || format!("flow {primal} vs LP {dual}"))?;
        for x in 0..8 {
            for y in (x + 1)..8 {
                let d = kr_norm(&Molecule::dirac_difference(m.clone(), x, y).unwrap()).unwrap();
                worst_iso = worst_iso.max((d - m.d(x, y)).abs());
            }
        }
    }
    ensure(worst_iso <= KR_ISOMETRY_TOL, || format!("isometry gap {worst_iso}"))?;
    Ok(format!("duality gap {worst_gap:.2e}, isometry gap {worst_iso:.2e}"))
}

fn extension_constant_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut lowest = f64::INFINITY;
    for case in 0..50 {
        let n = rng.gen_range(3..=6);
        let m = Arc::new(random_graph_metric(&mut rng, n));
        let k = rng.gen_range(1..=4.min(n - 1));
        let mut others: Vec<usize> = (1..n).collect();
        others.shuffle(&mut rng);
        let mut s_idx = vec![0];
        s_idx.extend(&others[..k - 1]);
        let s = Subset::new(n, s_idx.clone()).unwrap();
        let e = extension_constant_lp(&m, &s, &EconstOptions::default()).map_err(|e| e.to_string())?.value;
        lowest = lowest.min(e);
        ensure(e >= 1.0 - E_LOWER_TOL, || format!("case {case}: e = {e}"))?;

        let mut ops = vec![mcshane_operator(m.clone(), s.clone(), None).unwrap()];
        let r = nearest_point_retraction(&m, &s).unwrap();
        ops.push(retraction_operator(m.clone(), s.clone(), r, OperatorKind::Composed, Value::Null).unwrap());
        if k >= 2 {
            let (a, b) = (Subset::singleton(s_idx[0]), Subset::new(n, s_idx[1..].to_vec()).unwrap());
            let e1 = mcshane_operator(m.clone(), a.clone(), None).unwrap();
            let e2 = mcshane_operator(m.clone(), b.clone(), None).unwrap();
            let radius = m.set_distance(a.indices(), b.indices());
            ops.push(glue_pair(&e1, &e2, radius).unwrap());
        }
        for op in &ops {
            let norm = operator_norm_from_extension(op).map_err(|e| e.to_string())?.value;
            ensure(e <= norm + E_UPPER_TOL, || format!("case {case}: e = {e} above {:?} norm {norm}", op.kind()))?;
        }

        // S within S' within M: restrict to S' and compare.
        let extra: Vec<usize> = others[k - 1..].iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        let mut s_prime = s_idx.clone();
        s_prime.extend(extra);
        s_prime.sort_unstable();
        let sub = m.restrict(&s_prime).unwrap().with_base_point(0).unwrap();
        let local: Vec<usize> = s_idx.iter().map(|x| s_prime.iter().position(|y| y == x).unwrap()).collect();
        let local = Subset::new(s_prime.len(), local).unwrap();
        let e_sub = extension_constant_lp(&sub, &local, &EconstOptions::default()).map_err(|e| e.to_string())?.value;
        ensure(e_sub <= e + E_MONOTONE_TOL, || format!("case {case}: e(S,S') = {e_sub} > e(S,M) = {e}"))?;
    }
    Ok(format!("50 spaces, least e {lowest:.6}"))
}

fn mcshane_exactness() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for case in 0..500 {
        let n = rng.gen_range(2..=10);
        let coords: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64 * 1.5 + rng.gen_range(0.0..1.0), rng.gen_range(-3.0..3.0)]).collect();
        let m = Arc::new(L1PointSet::new(2, coords, 0).unwrap().to_space().unwrap());
        let k = rng.gen_range(1..=n);
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut rng);
        let dom = Subset::new(n, idx[..k].to_vec()).unwrap();
        let values: Vec<f64> = (0..k).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let f = LipFunction::new(m.clone(), dom.clone(), values).unwrap();
        let all: Vec<usize> = (0..n).collect();
        for mode in [McShaneMode::Inf, McShaneMode::Sup, McShaneMode::Midpoint] {
            let g = mcshane_extend(&f, &all, mode).map_err(|e| e.to_string())?;
            let back = g.restrict(&dom).unwrap();
            ensure(
                back.values().iter().zip(f.values()).all(|(a, b)| a.to_bits() == b.to_bits()),
                || format!("case {case}: restriction is not bitwise identical"),
            )?;
            let gap = (lip_norm(&g).value - lip_norm(&f).value).abs();
            worst = worst.max(gap);
            ensure(gap <= MCSHANE_TOL, || format!("case {case} {mode:?}: Lipschitz gap {gap}"))?;
        }
    }
    Ok(format!("500 instances, max Lipschitz gap {worst:.2e}"))
}

fn run_cli(dir: &std::path::Path, args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_lipext")).args(args).current_dir(dir).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn determinism() -> Check {
    let runs: &[&[&str]] = &[
        &["verify", "grid-interp", "--n", "2", "--box", "3", "--trials", "200", "--seed", "11"],
        &["verify", "cone", "--n", "3", "--trials", "500", "--seed", "12"],
        &["verify", "glue-family", "--seed", "13"],
        &["verify", "net-ball", "--n", "1", "--seed", "14"],
        &["verify", "balls-24", "--n", "3"],
    ];
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for args in runs {
        let (ca, oa) = run_cli(a.path(), args);
        let (cb, ob) = run_cli(b.path(), args);
        ensure(ca == 0 && cb == 0, || format!("{args:?} exited {ca}/{cb}"))?;
        ensure(oa == ob, || format!("{args:?}: reports differ"))?;
    }
    for fmt in ["json", "csv"] {
        let (_, ra) = run_cli(a.path(), &["report", "--format", fmt]);
        let (_, rb) = run_cli(b.path(), &["report", "--format", fmt]);
        ensure(ra == rb && !ra.is_empty(), || format!("{fmt} exports differ"))?;
    }
    Ok(format!("{} commands byte-identical across two runs", runs.len()))
}

#[test]
fn acceptance() {
    let criteria: Vec<(&str, Duration, fn() -> Check)> = vec![
        ("grid interpolation preserves the norm", Duration::from_secs(30), grid_interpolation),
        ("cone retraction is 2-Lipschitz", Duration::from_secs(10), cone_retraction),
        ("glue-family constant", Duration::from_secs(60), glue_family_constant),
        ("net-ball retraction constant", Duration::from_secs(20), net_ball_constant),
        ("separation constants of the constructions", Duration::from_secs(20), separation_constants_of_constructions),
        ("KR duality", Duration::from_secs(30), kr_duality),
        ("extension-constant oracle", Duration::from_secs(120), extension_constant_oracle),
        ("McShane exactness", Duration::from_secs(10), mcshane_exactness),
        ("determinism", Duration::from_secs(60), determinism),
    ];
    let mut failures = Vec::new();
    for (i, (name, limit, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let result = result.and_then(|msg| {
            if elapsed <= limit {
                Ok(msg)
            } else {
                Err(format!("took {elapsed:.1?}, limit {limit:?}"))
            }
        });
        match &result {
            Ok(msg) => println!("criterion {}: PASS {name} ({elapsed:.2?}): {msg}", i + 1),
            Err(msg) => {
                println!("criterion {}: FAIL {name} ({elapsed:.2?}): {msg}", i + 1);
                failures.push(i + 1);
            }
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
