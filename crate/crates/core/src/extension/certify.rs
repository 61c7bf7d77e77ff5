use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extension::operator::{ExtensionOperator, OperatorKind};
use crate::free_space::operator_norm_from_extension;
use crate::lipfn::{lip_const, mcshane_value, McShaneMode};
use crate::metric::leq_tol;

/// Random functions on the source of an operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Corpus {
    /// Independent values uniform in `[-1, 1]`.
    Uniform,
    /// Uniform values at `anchors` random source points, McShane-midpoint extended to the rest.
    Smoothed { anchors: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifyOptions {
    pub trials: usize,
    pub seed: u64,
    pub corpus: Corpus,
    /// Also compute the exact operator norm.
    pub exact: bool,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions { trials: 100, seed: 0, corpus: Corpus::Uniform, exact: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifyReport {
    pub kind: OperatorKind,
    pub source_size: usize,
    pub ambient_size: usize,
    pub claimed: f64,
    pub empirical: f64,
    pub exact: Option<f64>,
    /// `claimed - max(empirical, exact)`.
    pub margin: f64,
    pub bound_ok: bool,
    /// Source values of the function attaining `empirical`.
    pub worst_f: Vec<f64>,
    pub worst_trial: Option<usize>,
    /// Trials skipped because the sampled function was constant.
    pub skipped: usize,
    pub corpus: Corpus,
    pub seed: u64,
    pub trials: usize,
}

/// Draws one function on the source of `op`; the value at the pin is zero.
pub fn random_function(op: &ExtensionOperator, rng: &mut impl Rng, corpus: Corpus) -> Vec<f64> {
    let src = op.source().indices();
    let mut vals: Vec<f64> = match corpus {
        Corpus::Uniform => src.iter().map(|_| rng.gen_range(-1.0..=1.0)).collect(),
        Corpus::Smoothed { anchors } => {
            let k = anchors.clamp(1, src.len());
            let mut picked: Vec<usize> = Vec::with_capacity(k);
            while picked.len() < k {
                let s = src[rng.gen_range(0..src.len())];
                if !picked.contains(&s) {
                    picked.push(s);
                }
            }
            let vals: Vec<f64> = picked.iter().map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let l = lip_const(op.ambient(), &picked, &vals).value;
            src.iter()
                .map(|&x| mcshane_value(op.ambient(), &picked, &vals, l, x, McShaneMode::Midpoint))
                .collect()
        }
    };
    if let Some(p) = op.source().position(op.pin()) {
        let v0 = vals[p];
        for v in vals.iter_mut() {
            *v -= v0;
        }
        vals[p] = 0.0;
    }
    vals
}

/// `Lip(Ef) / Lip(f)` where `Lip(f)` is taken on the source plus the pin.
pub(crate) fn extension_ratio(op: &ExtensionOperator, vals: &[f64]) -> Result<Option<f64>> {
    let m = op.ambient();
    let dom = op.normalized_domain();
    let dom_vals: Vec<f64> = dom
        .iter()
        .map(|x| op.source().position(x).map_or(0.0, |k| vals[k]))
        .collect();
    let lf = lip_const(m, dom.indices(), &dom_vals).value;
    if lf == 0.0 {
        return Ok(None);
    }
    let out = op.apply_values(vals)?;
    let all: Vec<usize> = (0..m.len()).collect();
    Ok(Some(lip_const(m, &all, &out).value / lf))
}

/// Empirical norm over a seeded random corpus, with the exact norm when requested.
pub fn certify_norm(op: &ExtensionOperator, options: &CertifyOptions) -> Result<CertifyReport> {
    if options.trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let corpus: Vec<Vec<f64>> = (0..options.trials)
        .map(|_| random_function(op, &mut rng, options.corpus))
        .collect();
    let ratios: Vec<Option<f64>> = corpus
        .par_iter()
        .map(|f| extension_ratio(op, f))
        .collect::<Result<_>>()?;

    let mut empirical = 0.0f64;
    let mut worst_trial = None;
    let mut skipped = 0;
    for (t, r) in ratios.iter().enumerate() {
        match r {
            None => skipped += 1,
            Some(r) if worst_trial.is_none() || *r > empirical => {
                empirical = *r;
                worst_trial = Some(t);
            }
            Some(_) => {}
        }
    }
    let exact = if options.exact { Some(operator_norm_from_extension(op)?.value) } else { None };
    let claimed = op.claimed_bound();
    let top = exact.map_or(empirical, |e| e.max(empirical));
    Ok(CertifyReport {
        kind: op.kind(),
        source_size: op.source().len(),
        ambient_size: op.ambient().len(),
        claimed,
        empirical,
        exact,
        margin: claimed - top,
        bound_ok: leq_tol(top, claimed),
        worst_f: worst_trial.map(|t| corpus[t].clone()).unwrap_or_default(),
        worst_trial,
        skipped,
        corpus: options.corpus,
        seed: options.seed,
        trials: options.trials,
    })
}
