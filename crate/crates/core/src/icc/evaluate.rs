use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::codebook::IccCodebook;
use super::eve::EveModel;
use super::session::{run_session, FailureMode, SessionOutcome};
use crate::channels::TwoDmbcSetup;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvaluationConfig {
    pub sessions: usize,
    /// Target `delta` of the three checks.
    pub delta: f64,
    /// Compute the exact-posterior leakage.
    pub leakage: bool,
    pub parallel: bool,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        EvaluationConfig { sessions: 1000, delta: 0.1, leakage: true, parallel: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FailureCounts {
    pub ok: usize,
    pub bob_null: usize,
    pub alice_null: usize,
    pub decode_mismatch: usize,
}

impl FailureCounts {
    fn add(&mut self, m: FailureMode) {
        match m {
            FailureMode::Ok => self.ok += 1,
            FailureMode::BobNull => self.bob_null += 1,
            FailureMode::AliceNull => self.alice_null += 1,
            FailureMode::DecodeMismatch => self.decode_mismatch += 1,
        }
    }

    pub fn errors(&self) -> usize {
        self.bob_null + self.alice_null + self.decode_mismatch
    }
}

/// Outcome of each check against `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaCheck {
    /// `H(S) / N > R_sk - delta`
    pub uniformity: bool,
    /// `Pr(S_hat != S) < delta`
    pub reliability: bool,
    /// `H(S | View_E) / H(S) > 1 - delta`; `None` without a leakage estimate.
    pub secrecy: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub sessions: usize,
    pub failures: FailureCounts,
    /// Fraction of sessions without an agreed key; aborts count as errors.
    pub p_error: f64,
    /// 95% Wilson interval.
    pub p_error_ci: (f64, f64),
    pub p_error_se: f64,
    /// Miller–Madow corrected plug-in entropy of Bob's key, clamped to `[0, kappa]`.
    pub key_entropy: f64,
    pub key_entropy_plugin: f64,
    /// Entropy of the exact key law, when the posterior model is available.
    pub key_entropy_exact: Option<f64>,
    pub kappa: u32,
    pub total_length: usize,
    /// `key_entropy / N`.
    pub rate: f64,
    pub target_rate: f64,
    /// `H(S) - mean H(S | z_f, z_b)` in bits.
    pub leakage: Option<f64>,
    pub leakage_se: Option<f64>,
    /// `leakage / H(S)`, zero for a constant key.
    pub leakage_ratio: Option<f64>,
    pub delta: f64,
    pub delta_check: DeltaCheck,
}

/// Entropy in bits of a distribution given by counts.
fn plugin_entropy(counts: &[usize]) -> f64 {
    let m: usize = counts.iter().sum();
    if m == 0 {
        return 0.0;
    }
    let m = m as f64;
    let h: f64 = counts.iter().filter(|&&c| c > 0).map(|&c| c as f64 / m).map(|p| -p * p.log2()).sum();
    h.abs()
}

fn entropy_bits(p: &[f64]) -> f64 {
    let h: f64 = p.iter().filter(|&&q| q > 0.0).map(|&q| -q * q.log2()).sum();
    // a point mass sums to -0.0
    h.abs()
}

/// 95% Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959963984540054;
    let (n, p) = (n as f64, k as f64 / n as f64);
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    let lo = if k == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if k as f64 == n { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// Runs `cfg.sessions` independent sessions and estimates the three
/// security quantities. Per-session seeds are drawn from `rng` up front, so
/// the result does not depend on scheduling.
pub fn evaluate<R: Rng + ?Sized>(
    setup: &TwoDmbcSetup,
    cb: &IccCodebook,
    cfg: &EvaluationConfig,
    rng: &mut R,
) -> Result<EvaluationReport> {
    evaluate_sessions(setup, cb, cfg, rng).map(|(r, _)| r)
}

/// [`evaluate`], also returning the sessions in the order they were seeded.
pub fn evaluate_sessions<R: Rng + ?Sized>(
    setup: &TwoDmbcSetup,
    cb: &IccCodebook,
    cfg: &EvaluationConfig,
    rng: &mut R,
) -> Result<(EvaluationReport, Vec<SessionOutcome>)> {
    if cfg.sessions == 0 {
        return Err(Error::InvalidArgument("at least one session is required".into()));
    }
    let seeds: Vec<u64> = (0..cfg.sessions).map(|_| rng.random()).collect();
    let eve = if cfg.leakage {
        match EveModel::new(setup, cb) {
            Ok(m) => Some(m),
            Err(Error::GuardExceeded(_)) | Err(Error::Infeasible(_)) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let one = |seed: &u64| -> Result<(SessionOutcome, Option<f64>)> {
        let o = run_session(setup, cb, &mut ChaCha8Rng::seed_from_u64(*seed))?;
        let h = match (&eve, o.s) {
            (Some(m), Some(_)) => Some(entropy_bits(&m.posterior(&o.views.eve_zf, &o.views.eve_zb)?)),
            _ => None,
        };
        Ok((o, h))
    };
    let results: Vec<(SessionOutcome, Option<f64>)> = if cfg.parallel {
        seeds.par_iter().map(one).collect::<Result<_>>()?
    } else {
        seeds.iter().map(one).collect::<Result<_>>()?
    };

    let plan = cb.plan();
    let kappa = plan.kappa;
    let mut failures = FailureCounts::default();
    let mut key_counts = vec![0usize; 1 << kappa];
    let mut post_h = Vec::new();
    for (o, h) in &results {
        failures.add(o.failure_mode);
        if let Some(s) = o.s {
            key_counts[s as usize] += 1;
        }
        if let Some(h) = h {
            post_h.push(*h);
        }
    }
    let n = cfg.sessions;
    let errors = if kappa == 0 { 0 } else { failures.errors() };
    let p_error = errors as f64 / n as f64;
    let p_error_se = (p_error * (1.0 - p_error) / n as f64).sqrt();
    let observed: usize = key_counts.iter().sum();
    let plugin = plugin_entropy(&key_counts);
    let support = key_counts.iter().filter(|&&c| c > 0).count();
    let mm = if observed > 0 {
        plugin + (support.saturating_sub(1)) as f64 / (2.0 * observed as f64 * std::f64::consts::LN_2)
    } else {
        0.0
    };
    let key_entropy = mm.clamp(0.0, kappa as f64);

    let key_entropy_exact = eve.as_ref().map(|m| entropy_bits(m.prior()));
    let (leakage, leakage_se) = match (&key_entropy_exact, post_h.is_empty()) {
        (Some(h), false) => {
            let k = post_h.len() as f64;
            let mean = post_h.iter().sum::<f64>() / k;
            let var = post_h.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0).max(1.0);
            (Some(h - mean), Some((var / k).sqrt()))
        }
        (Some(_), true) => (Some(0.0), Some(0.0)),
        _ => (None, None),
    };
    let leakage_ratio = match (leakage, key_entropy_exact) {
        (Some(l), Some(h)) if h > 1e-12 => Some(l / h),
        (Some(_), Some(_)) => Some(0.0),
        _ => None,
    };
    let total_length = plan.total();
    let rate = key_entropy / total_length as f64;
    let report = EvaluationReport {
        sessions: n,
        failures,
        p_error,
        p_error_ci: wilson_interval(errors, n),
        p_error_se,
        key_entropy,
        key_entropy_plugin: plugin,
        key_entropy_exact,
        kappa,
        total_length,
        rate,
        target_rate: plan.r_sk,
        leakage,
        leakage_se,
        leakage_ratio,
        delta: cfg.delta,
        delta_check: DeltaCheck {
            uniformity: rate > plan.r_sk - cfg.delta,
            reliability: p_error < cfg.delta,
            secrecy: leakage_ratio.map(|r| r < cfg.delta),
        },
    };
    Ok((report, results.into_iter().map(|(o, _)| o).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::PlanLengths;
    use crate::channels::make_bsc_pair;
    use crate::icc::plan::BlockPlan;
    use crate::probability::Pmf;

    fn setup(p: f64, q: f64) -> TwoDmbcSetup {
        TwoDmbcSetup::new(make_bsc_pair(p, q).unwrap(), make_bsc_pair(p, q).unwrap())
    }

    fn special(s: &TwoDmbcSetup, n_f: usize, n_b: usize, kappa: Option<u32>) -> IccCodebook {
        let u = Pmf::uniform(2).unwrap();
        let (mut plan, _) = BlockPlan::special(s, &u, &u, PlanLengths::Fixed { n_f, n_b }, 0.05, None).unwrap();
        if let Some(k) = kappa {
            plan = plan.with_kappa(k).unwrap();
        }
        IccCodebook::build_special(s, &u, &u, &plan, &mut ChaCha8Rng::seed_from_u64(1)).unwrap()
    }

    #[test]
    fn wilson_reference_values() {
        // closed form at k = 0: (0, z^2 / (n + z^2))
        let z2 = 1.959963984540054f64.powi(2);
        let (lo, hi) = wilson_interval(0, 100);
        assert_eq!(lo, 0.0);
        assert!((hi - z2 / (100.0 + z2)).abs() < 1e-12);
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo + hi - 1.0).abs() < 1e-12);
        assert!((lo - 0.40383).abs() < 1e-4);
    }

    #[test]
    fn noiseless_legit_has_no_errors() {
        let s = setup(0.0, 0.5);
        let cb = special(&s, 6, 6, None);
        let cfg = EvaluationConfig { sessions: 300, ..Default::default() };
        let r = evaluate(&s, &cb, &cfg, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        assert_eq!(r.p_error, 0.0);
        assert_eq!(r.failures.ok, 300);
        assert!(r.leakage.unwrap().abs() < 1e-9);
        assert!(r.key_entropy <= r.kappa as f64);
    }

    #[test]
    fn constant_key_reports_zeros() {
        let s = setup(0.1, 0.3);
        let cb = special(&s, 4, 8, Some(0));
        let cfg = EvaluationConfig { sessions: 50, ..Default::default() };
        let r = evaluate(&s, &cb, &cfg, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(r.key_entropy, 0.0);
        assert_eq!(r.p_error, 0.0);
        assert_eq!(r.leakage, Some(0.0));
    }

    #[test]
    fn seeded_evaluation_is_reproducible_and_schedule_free() {
        let s = setup(0.1, 0.3);
        let cb = special(&s, 4, 8, Some(3));
        let mut cfg = EvaluationConfig { sessions: 64, ..Default::default() };
        let a = evaluate(&s, &cb, &cfg, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        let b = evaluate(&s, &cb, &cfg, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        cfg.parallel = false;
        let c = evaluate(&s, &cb, &cfg, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert!(evaluate(&s, &cb, &EvaluationConfig { sessions: 0, ..cfg }, &mut ChaCha8Rng::seed_from_u64(4)).is_err());
    }

    #[test]
    fn miller_madow_correction() {
        assert!((plugin_entropy(&[5, 5]) - 1.0).abs() < 1e-12);
        assert_eq!(plugin_entropy(&[0, 0]), 0.0);
        assert_eq!(plugin_entropy(&[7]), 0.0);
    }
}
