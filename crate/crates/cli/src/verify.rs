//! `verify` targets: build a construction from seeded random data, then
//! compare its claimed constants with exact and sampled values.

use std::sync::Arc;

use clap::ValueEnum;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use lipext_core::constructions::{ball_sequence_lambda20, place_dyadic, shrinking_ball_sequence, L1Family};
use lipext_core::extension::{
    certify_norm, cone_partition_operator, cone_retract, glue_family, glue_pair, grid_extension_operator, grid_points,
    lattice_net_constants, mcshane_operator, net_ball_operator, CertifyOptions, CertifyReport, Corpus, GlueFamilyInput,
    GridBox, GridFunction, NetBall,
};
use lipext_core::extension::hypercube_interpolate;
use lipext_core::io::FamilyFile;
use lipext_core::metric::{l1_dist, max_points};
use lipext_core::{separation_constants, Error, ExtensionOperator, FiniteMetricSpace, L1PointSet, Subset};

use crate::report::{inputs, Row, RunReport};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    GluePair,
    GlueFamily,
    GridInterp,
    Cone,
    NetBall,
    PlaceDyadic,
    #[value(name = "balls-20")]
    #[serde(rename = "balls-20")]
    Balls20,
    #[value(name = "balls-24")]
    #[serde(rename = "balls-24")]
    Balls24,
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::GluePair => "glue-pair",
            Target::GlueFamily => "glue-family",
            Target::GridInterp => "grid-interp",
            Target::Cone => "cone",
            Target::NetBall => "net-ball",
            Target::PlaceDyadic => "place-dyadic",
            Target::Balls20 => "balls-20",
            Target::Balls24 => "balls-24",
        }
    }
}

/// Parameters of a verification run; unset values take per-target defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerifyParams {
    pub n: Option<usize>,
    pub box_size: Option<i64>,
    pub dim: Option<usize>,
    pub trials: Option<usize>,
    pub seed: u64,
    pub tol: f64,
}

struct Outcome {
    inputs: Vec<(&'static str, Value)>,
    rows: Vec<Row>,
    details: Value,
}

fn ctx(what: &str) -> impl FnOnce(Error) -> CliError + '_ {
    move |source| CliError::Core { context: what.to_string(), source }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn certify(op: &ExtensionOperator, trials: usize, seed: u64, exact: bool) -> Result<CertifyReport, CliError> {
    let options = CertifyOptions { trials, seed, corpus: Corpus::Uniform, exact };
    certify_norm(op, &options).map_err(ctx("certifying the operator norm"))
}

fn norm_rows(rows: &mut Vec<Row>, prefix: &str, claimed: f64, cert: &CertifyReport, tol: f64) {
    if let Some(exact) = cert.exact {
        rows.push(Row::upper(format!("{prefix}exact_norm"), claimed, exact, tol));
    }
    rows.push(Row::upper(format!("{prefix}empirical_norm"), claimed, cert.empirical, tol));
}

pub fn run(target: Target, p: &VerifyParams) -> Result<RunReport, CliError> {
    if !(p.tol >= 0.0 && p.tol.is_finite()) {
        return Err(usage(format!("--tol must be a non-negative number, got {}", p.tol)));
    }
    if p.trials == Some(0) {
        return Err(usage("--trials must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let out = match target {
        Target::GluePair => glue_pair_run(p, &mut rng)?,
        Target::GlueFamily => glue_family_run(p, &mut rng)?,
        Target::GridInterp => grid_interp_run(p, &mut rng)?,
        Target::Cone => cone_run(p, &mut rng)?,
        Target::NetBall => net_ball_run(p, &mut rng)?,
        Target::PlaceDyadic => place_dyadic_run(p, &mut rng)?,
        Target::Balls20 => balls20_run(p)?,
        Target::Balls24 => balls24_run(p)?,
    };
    let mut pairs = vec![
        ("target", json!(target.name())),
        ("seed", json!(p.seed)),
        ("tol", json!(p.tol)),
        ("rng", json!("chacha8")),
    ];
    pairs.extend(out.inputs);
    let mut report = RunReport::new(format!("verify {}", target.name()), inputs(pairs), out.rows);
    report.details = Some(out.details);
    Ok(report)
}

fn grid_interp_run(p: &VerifyParams, rng: &mut ChaCha8Rng) -> Result<Outcome, CliError> {
    let n = p.n.unwrap_or(2);
    let side = p.box_size.unwrap_or(3);
    let trials = p.trials.unwrap_or(200);
    if !(1..=3).contains(&n) {
        return Err(usage(format!("grid-interp needs 1 <= n <= 3, got {n}")));
    }
    if side < 1 {
        return Err(usage(format!("--box must be at least 1, got {side}")));
    }
    let bx = GridBox::cube(n, 0, side).map_err(ctx("grid box"))?;
    let num_samples = 12;
    let samples: Vec<Vec<f64>> = (0..num_samples)
        .map(|_| (0..n).map(|_| rng.gen_range(0.0..=side as f64)).collect())
        .collect();
    let op = grid_extension_operator(&bx, &samples).map_err(ctx("grid interpolation operator"))?;
    let cert = certify(&op.operator, trials, p.seed, true)?;

    // Multilinear interpolation reproduces affine functions.
    let coef: Vec<f64> = (0..=n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let affine = |x: &[f64]| coef[n] + x.iter().zip(&coef).map(|(a, c)| a * c).sum::<f64>();
    let f = GridFunction::from_fn(bx.clone(), |v| affine(&v.iter().map(|&a| a as f64).collect::<Vec<_>>()));
    let mut affine_err = 0.0f64;
    for q in &samples {
        let v = hypercube_interpolate(&f, q).map_err(ctx("interpolating"))?;
        affine_err = affine_err.max((v - affine(q)).abs());
    }

    let rows = vec![
        Row::equality("exact_norm", 1.0, cert.exact.expect("exact norm requested"), p.tol),
        Row::upper("empirical_norm", 1.0, cert.empirical, p.tol),
        Row::equality("affine_reproduction_error", 0.0, affine_err, p.tol),
    ];
    Ok(Outcome {
        inputs: vec![("n", json!(n)), ("box", json!(side)), ("trials", json!(trials)), ("samples", json!(num_samples))],
        rows,
        details: json!({ "grid_points": bx.num_points(), "ambient_size": cert.ambient_size, "worst_trial": cert.worst_trial }),
    })
}

fn random_point(rng: &mut ChaCha8Rng, dim: usize, r: f64) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(-r..=r)).collect()
}

/// Shuffled coordinates cut into blocks of one or two.
fn random_partition(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<usize>> {
    let mut coords: Vec<usize> = (0..n).collect();
    coords.shuffle(rng);
    let mut blocks = Vec::new();
    let mut i = 0;
    while i < n {
        let len = rng.gen_range(1..=2).min(n - i);
        let mut b = coords[i..i + len].to_vec();
        b.sort_unstable();
        blocks.push(b);
        i += len;
    }
    blocks.sort();
    blocks
}

fn cone_run(p: &VerifyParams, rng: &mut ChaCha8Rng) -> Result<Outcome, CliError> {
    let n = p.n.unwrap_or(3);
    let trials = p.trials.unwrap_or(500);
    let half_width = p.box_size.unwrap_or(2);
    if !(1..=5).contains(&n) {
        return Err(usage(format!("cone needs 1 <= n <= 5, got {n}")));
    }
    if half_width < 1 {
        return Err(usage(format!("--box must be at least 1, got {half_width}")));
    }
    let partition = random_partition(rng, n);
    let mut worst = vec![0.0f64; partition.len()];
    for t in 0..trials {
        let x = random_point(rng, n, 4.0);
        // Every other pair is a short step, to probe the cone boundaries locally.
        let y: Vec<f64> = if t % 2 == 0 {
            random_point(rng, n, 4.0)
        } else {
            x.iter().map(|&a| a + rng.gen_range(-0.1..=0.1)).collect()
        };
        let d = l1_dist(&x, &y);
        if d == 0.0 {
            continue;
        }
        for (b, block) in partition.iter().enumerate() {
            let ratio = l1_dist(&cone_retract(block, &x), &cone_retract(block, &y)) / d;
            worst[b] = worst[b].max(ratio);
        }
    }
    let mut rows: Vec<Row> = partition
        .iter()
        .zip(&worst)
        .map(|(block, &w)| Row::upper(format!("retraction_lipschitz{block:?}"), 2.0, w, p.tol))
        .collect();

    let samples: Vec<Vec<f64>> = (0..8).map(|_| random_point(rng, n, half_width as f64)).collect();
    let op = cone_partition_operator(n, &partition, half_width, &samples).map_err(ctx("cone partition operator"))?;
    let cert = certify(&op.operator, trials.min(200), p.seed, true)?;
    norm_rows(&mut rows, "operator_", 2.0, &cert, p.tol);
    Ok(Outcome {
        inputs: vec![("n", json!(n)), ("box", json!(half_width)), ("trials", json!(trials))],
        rows,
        details: json!({ "partition": partition, "source_size": cert.source_size, "ambient_size": cert.ambient_size }),
    })
}

fn net_ball_run(p: &VerifyParams, rng: &mut ChaCha8Rng) -> Result<Outcome, CliError> {
    let n = p.n.unwrap_or(2);
    let w = p.box_size.unwrap_or(10);
    let trials = p.trials.unwrap_or(200);
    if n == 0 || w < 2 {
        return Err(usage("net-ball needs n >= 1 and --box >= 2"));
    }
    let bx = GridBox::cube(n, -w, w).map_err(ctx("net window"))?;
    let cap = max_points();
    if bx.num_points() > cap {
        return Err(CliError::Core {
            context: "net window".into(),
            source: Error::TooLarge { what: "net window", size: bx.num_points(), cap },
        });
    }
    let net: Vec<Vec<f64>> = grid_points(&bx).into_iter().map(|v| v.into_iter().map(|a| a as f64).collect()).collect();
    let center = random_point(rng, n, 1.0);
    let radius = rng.gen_range(2.0..=(w as f64 / 2.0).max(2.0));
    let constants = lattice_net_constants(n, w).map_err(ctx("net constants"))?;
    let ball = NetBall::new(net, center.clone(), radius).map_err(ctx("net ball"))?;
    let (ratio, witness) = ball.max_ratio();
    let bound = constants.retraction_bound();
    let mut rows = vec![Row::upper("retraction_ratio", bound, ratio, p.tol)];
    let op = net_ball_operator(&ball, constants).map_err(ctx("net ball operator"))?;
    let cert = certify(&op, trials, p.seed, op.ambient().len() <= 128)?;
    norm_rows(&mut rows, "operator_", bound, &cert, p.tol);
    Ok(Outcome {
        inputs: vec![("n", json!(n)), ("box", json!(w)), ("trials", json!(trials))],
        rows,
        details: json!({
            "center": center,
            "radius": radius,
            "eps": constants.eps,
            "delta": constants.delta,
            "inside": ball.inside().len(),
            "witness": witness,
        }),
    })
}

fn l1_space(coords: Vec<Vec<f64>>, dim: usize) -> Result<Arc<FiniteMetricSpace>, CliError> {
    let set = L1PointSet::new(dim, coords, 0).map_err(ctx("point set"))?;
    Ok(Arc::new(set.to_space().map_err(ctx("point set"))?))
}

fn glue_pair_run(p: &VerifyParams, rng: &mut ChaCha8Rng) -> Result<Outcome, CliError> {
    let k = p.n.unwrap_or(3);
    let trials = p.trials.unwrap_or(200);
    if !(1..=6).contains(&k) {
        return Err(usage(format!("glue-pair needs 1 <= n <= 6 points per set, got {k}")));
    }
    let gap = p.box_size.unwrap_or(10) as f64;
    if gap < 4.0 {
        return Err(usage("--box (the gap between the sets) must be at least 4"));
    }
    let mut coords = Vec::new();
    for _ in 0..k {
        coords.push(vec![rng.gen_range(0.0..3.0), rng.gen_range(0.0..3.0)]);
    }
    for _ in 0..k {
        coords.push(vec![gap + rng.gen_range(0.0..3.0), rng.gen_range(0.0..3.0)]);
    }
    for _ in 0..10 {
        coords.push(vec![rng.gen_range(-2.0..gap + 5.0), rng.gen_range(-2.0..5.0)]);
    }
    let m = l1_space(coords, 2)?;
    let s1 = Subset::new(m.len(), (0..k).collect()).map_err(ctx("first set"))?;
    let s2 = Subset::new(m.len(), (k..2 * k).collect()).map_err(ctx("second set"))?;
    let e1 = mcshane_operator(m.clone(), s1.clone(), None).map_err(ctx("first extender"))?;
    let e2 = mcshane_operator(m.clone(), s2.clone(), None).map_err(ctx("second extender"))?;
    let r = m.set_distance(s1.indices(), s2.indices());
    let glued = glue_pair(&e1, &e2, r).map_err(ctx("gluing"))?;
    let cert = certify(&glued, trials, p.seed, true)?;
    let mut rows = Vec::new();
    norm_rows(&mut rows, "", glued.claimed_bound(), &cert, p.tol);
    Ok(Outcome {
        inputs: vec![("n", json!(k)), ("box", json!(gap)), ("trials", json!(trials))],
        rows,
        details: json!({ "radius": r, "operator": glued.descriptor(), "ambient_size": m.len() }),
    })
}

fn glue_family_run(p: &VerifyParams, rng: &mut ChaCha8Rng) -> Result<Outcome, CliError> {
    let count = p.n.unwrap_or(4);
    let trials = p.trials.unwrap_or(200);
    if count > 8 {
        return Err(usage(format!("glue-family supports at most 8 sets, got {count}")));
    }
    // Anchor at the origin; set i sits on the l1 sphere of radius about 4^(i+1).
    let mut coords = vec![vec![0.0, 0.0]];
    let mut sets: Vec<Vec<usize>> = Vec::new();
    let mut centres = Vec::new();
    for i in 0..count {
        let radius = 4f64.powi(i as i32 + 1) * rng.gen_range(1.0..2.0);
        let t: f64 = rng.gen_range(0.0..1.0);
        let (sx, sy) = (if rng.gen_bool(0.5) { 1.0 } else { -1.0 }, if rng.gen_bool(0.5) { 1.0 } else { -1.0 });
        let c = vec![sx * radius * t, sy * radius * (1.0 - t)];
        let mut set = vec![coords.len()];
        coords.push(c.clone());
        if rng.gen_bool(0.5) {
            let off = radius / 4.0;
            set.push(coords.len());
            coords.push(vec![c[0] + rng.gen_range(-off..off), c[1] + rng.gen_range(-off..off)]);
        }
        sets.push(set);
        centres.push((c, radius));
    }
    // Points near each set, where the cut-offs are active, plus a few far away.
    for (c, radius) in &centres {
        for _ in 0..3 {
            let s = radius / 3.0;
            coords.push(vec![c[0] + rng.gen_range(-s..s), c[1] + rng.gen_range(-s..s)]);
        }
    }
    for _ in 0..3 {
        coords.push(random_point(rng, 2, 4f64.powi(count as i32 + 1)));
    }
    let m = l1_space(coords, 2)?;
    let family: Vec<Subset> =
        sets.iter().map(|s| Subset::new(m.len(), s.clone())).collect::<Result<_, _>>().map_err(ctx("family"))?;
    let report = separation_constants(&m, &family, 0).map_err(ctx("separation constants"))?;
    let extenders: Vec<ExtensionOperator> = family
        .iter()
        .map(|s| mcshane_operator(m.clone(), s.clone(), None))
        .collect::<Result<_, _>>()
        .map_err(ctx("extenders"))?;
    let c = 1.0;
    let input = GlueFamilyInput { family, extenders, anchor: 0, c, report: report.clone(), anchor_points: None };
    let op = glue_family(input).map_err(ctx("glue-family"))?;
    let cert = certify(&op, trials, p.seed, true)?;
    let bound_28 = 28.0 * c * report.d_const.max(1.0).powi(2) * report.lambda.powi(2);
    let exact = cert.exact.expect("exact norm requested");
    let mut rows = Vec::new();
    norm_rows(&mut rows, "", op.claimed_bound(), &cert, p.tol);
    rows.push(Row::upper("exact_norm_vs_28CD2lambda2", bound_28, exact, p.tol));
    Ok(Outcome {
        inputs: vec![("n", json!(count)), ("trials", json!(trials))],
        rows,
        details: json!({ "C": c, "separation": report, "ambient_size": m.len(), "operator": op.descriptor() }),
    })
}

fn random_box(rng: &mut ChaCha8Rng, diameter: i64) -> Vec<Vec<i64>> {
    let a = rng.gen_range(0..=diameter);
    let b = diameter - a;
    let (x0, y0) = (rng.gen_range(-50..=50), rng.gen_range(-50..=50));
    let mut pts = Vec::new();
    for i in 0..=a {
        for j in 0..=b {
            pts.push(vec![x0 + i, y0 + j]);
        }
    }
    pts
}

fn family_details(family: &L1Family, report: &lipext_core::SeparationReport, extra: Value) -> Value {
    json!({ "family": FamilyFile::new(family, report), "construction": extra })
}

fn place_dyadic_run(p: &VerifyParams, rng: &mut ChaCha8Rng) -> Result<Outcome, CliError> {
    let count = p.n.unwrap_or(3);
    let max_diam = p.box_size.unwrap_or(17);
    if count == 0 {
        return Err(CliError::Core { context: "place-dyadic".into(), source: Error::EmptyFamily });
    }
    if count > 6 || !(0..=32).contains(&max_diam) {
        return Err(usage("place-dyadic supports n <= 6 and 0 <= --box <= 32"));
    }
    let sets: Vec<Vec<Vec<i64>>> = (0..count)
        .map(|_| {
            let diam = rng.gen_range(0..=max_diam);
            random_box(rng, diam)
        })
        .collect();
    let seeds: Vec<usize> = sets.iter().map(|s| rng.gen_range(0..s.len())).collect();
    let placed = place_dyadic(&sets, &seeds).map_err(ctx("place-dyadic"))?;
    let rows = vec![
        Row::upper("lambda", 32.0, placed.report.lambda, p.tol),
        Row::upper("D", 1.0, placed.report.d_const, p.tol),
    ];
    Ok(Outcome {
        inputs: vec![("n", json!(count)), ("box", json!(max_diam))],
        rows,
        details: family_details(&placed.family, &placed.report, json!({ "k": placed.k_seq, "anchors": placed.anchors })),
    })
}

fn balls20_run(p: &VerifyParams) -> Result<Outcome, CliError> {
    let count = p.n.unwrap_or(3);
    let dim = p.dim.unwrap_or(2);
    let seq = ball_sequence_lambda20(dim, count, p.box_size).map_err(ctx("balls-20"))?;
    let rows = vec![
        Row::upper("lambda", 20.0, seq.report.lambda, p.tol),
        Row::upper("D", 1.0, seq.report.d_const, p.tol),
    ];
    Ok(Outcome {
        inputs: vec![("n", json!(count)), ("dim", json!(dim)), ("box", json!(seq.window))],
        rows,
        details: family_details(&seq.family, &seq.report, json!({ "centers": seq.centers, "radii": seq.radii })),
    })
}

fn balls24_run(p: &VerifyParams) -> Result<Outcome, CliError> {
    let count = p.n.unwrap_or(2);
    let dim = p.dim.unwrap_or(2);
    if dim == 0 {
        return Err(usage("--dim must be positive"));
    }
    let dims: Vec<usize> = (1..=count).map(|k| k.min(dim)).collect();
    let mesh = p.box_size.map(|m| u32::try_from(m).map_err(|_| usage("--box is the mesh exponent"))).transpose()?;
    let seq = shrinking_ball_sequence(&dims, count, mesh).map_err(ctx("balls-24"))?;
    let mut rows = vec![
        Row::upper("lambda", 24.0, seq.report.lambda, p.tol),
        Row::equality("D", 2.0, seq.report.d_const, p.tol),
    ];
    for (i, (g, &big_n)) in seq.report.per_set.iter().zip(&seq.exponents).enumerate() {
        let diam = (-(big_n as f64)).exp2();
        rows.push(Row::equality(format!("diam[{i}]"), diam, g.diam, p.tol));
        rows.push(Row::equality(format!("dist_to_anchor[{i}]"), diam / 2.0, g.dist_to_anchor, p.tol));
    }
    Ok(Outcome {
        inputs: vec![("n", json!(count)), ("dim", json!(dim)), ("box", json!(seq.mesh_exponent))],
        rows,
        details: family_details(
            &seq.family,
            &seq.report,
            json!({ "N": seq.exponents, "dims": seq.dims, "centers": seq.centers, "radii": seq.radii }),
        ),
    })
}
