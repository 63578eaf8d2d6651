//! The four commands, each producing report records.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;
use skec_core::bounds::{
    general_bounds, lower_bound_sd, upper_bound, BoundReport, DirectionAux, GeneralBounds, PlanLengths, SearchConfig,
    TwoWayBound, UpperBound,
};
use skec_core::icc::{evaluate_sessions, EvaluationConfig};
use skec_core::{make_bsc_pair, BlockPlan, IccCodebook, Pmf, TwoDmbcSetup};

use crate::config::{Initiator, RunConfig, SdMode, Variant};
use crate::output::Record;
use crate::CliError;

/// Slack of the lower-versus-upper comparison.
pub const ORDER_TOLERANCE: f64 = 1e-6;
/// Slack of the ICC-versus-lower comparison.
pub const ICC_TOLERANCE: f64 = 1e-9;

/// Records of one command; `sessions` holds optional per-session rows.
#[derive(Debug, Clone, Default)]
pub struct Output {
    pub records: Vec<Record>,
    pub sessions: Option<Vec<Record>>,
}

fn json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

fn require_setup(cfg: &RunConfig) -> Result<&TwoDmbcSetup, CliError> {
    cfg.setup.as_ref().ok_or_else(|| CliError::Config("missing [channels] section".into()))
}

/// All bounds of one setup.
#[derive(Debug, Clone)]
pub struct BoundSet {
    pub general: GeneralBounds,
    pub sd: Option<TwoWayBound>,
    pub upper: UpperBound,
}

impl BoundSet {
    pub fn compute(setup: &TwoDmbcSetup, search: &SearchConfig, sd: SdMode) -> Result<BoundSet, CliError> {
        let general = general_bounds(setup, search)?;
        let sd = match sd {
            SdMode::Skip => None,
            SdMode::Auto if !setup.is_sd() => None,
            _ => Some(lower_bound_sd(setup, search)?),
        };
        Ok(BoundSet { general, sd, upper: upper_bound(setup, search) })
    }

    /// Lower bound at most the upper bound, ICC rate at most the lower bound.
    pub fn ordering_pass(&self) -> bool {
        let (lower, icc, upper) = (self.general.lower.value, self.general.icc.value, self.upper.value);
        lower <= upper + ORDER_TOLERANCE
            && icc <= lower + ICC_TOLERANCE
            && self.sd.as_ref().is_none_or(|s| s.value <= upper + ORDER_TOLERANCE)
    }
}

fn bound_record(name: &str, direction: &str, r: &BoundReport, ordering: bool) -> Record {
    Record::new()
        .with("bound", name)
        .with("direction", direction)
        .with("value", r.value)
        .with("objective", r.objective)
        .with("ratio", r.ratio)
        .with("constraint_slack", r.constraint_slack)
        .with("r1", r.rates.r1)
        .with("r2", r.rates.r2)
        .with("c1", r.rates.c1)
        .with("c2", r.rates.c2)
        .with("feasible", r.feasible)
        .with("secrecy_potential", r.secrecy_potential())
        .with("restarts", r.method.restarts)
        .with("iterations", r.method.iterations)
        .with("argmax", r.argmax.as_ref().map(json))
        .with("diagnostic", r.diagnostic.clone())
        .with("ordering_pass", ordering)
}

fn summary_record(name: &str, direction: Option<&str>, value: f64, argmax: Option<Value>, ordering: bool) -> Record {
    let none = None::<f64>;
    Record::new()
        .with("bound", name)
        .with("direction", direction)
        .with("value", value)
        .with("objective", value)
        .with("ratio", none)
        .with("constraint_slack", none)
        .with("r1", none)
        .with("r2", none)
        .with("c1", none)
        .with("c2", none)
        .with("feasible", true)
        .with("secrecy_potential", None::<bool>)
        .with("restarts", None::<usize>)
        .with("iterations", None::<usize>)
        .with("argmax", argmax)
        .with("diagnostic", None::<String>)
        .with("ordering_pass", ordering)
}

/// One record per bound and direction, plus the upper bound and the
/// i.i.d.-input capacity when the setup qualifies.
pub fn bounds(cfg: &RunConfig) -> Result<Output, CliError> {
    let setup = require_setup(cfg)?;
    let set = BoundSet::compute(setup, &cfg.search, cfg.sd)?;
    let ok = set.ordering_pass();
    let mut records = vec![
        bound_record("lower_general", "a", &set.general.lower.a, ok),
        bound_record("lower_general", "b", &set.general.lower.b, ok),
        bound_record("icc", "a", &set.general.icc.a, ok),
        bound_record("icc", "b", &set.general.icc.b, ok),
    ];
    if let Some(sd) = &set.sd {
        records.push(bound_record("lower_sd", "a", &sd.a, ok));
        records.push(bound_record("lower_sd", "b", &sd.b, ok));
    }
    let u = &set.upper;
    let upper_arg = serde_json::json!({ "p_xf": u.p_xf, "p_xb": u.p_xb, "forward": u.forward, "backward": u.backward });
    records.push(summary_record("upper", None, u.value, Some(upper_arg), ok));
    if let Some(sd) = &set.sd {
        let dir = if sd.a.value >= sd.b.value { "a" } else { "b" };
        records.push(summary_record("capacity_sd_iid", Some(dir), sd.value, None, ok));
    }
    Ok(Output { records, sessions: None })
}

/// One row per grid point, legit crossover major.
pub fn sweep(cfg: &RunConfig) -> Result<Output, CliError> {
    let grid = cfg.sweep.as_ref().ok_or_else(|| CliError::Config("missing [sweep] section".into()))?;
    let mut records = Vec::new();
    for (legit, eve) in grid.points() {
        let pair = make_bsc_pair(legit, eve)?;
        let setup = TwoDmbcSetup::new(pair.clone(), pair);
        let set = BoundSet::compute(&setup, &cfg.search, cfg.sd)?;
        let g = &set.general;
        let sd = set.sd.as_ref();
        records.push(
            Record::new()
                .with("legit", legit)
                .with("eve", eve)
                .with("lower_general", g.lower.value)
                .with("lower_general_a", g.lower.a.value)
                .with("lower_general_b", g.lower.b.value)
                .with("icc", g.icc.value)
                .with("icc_a", g.icc.a.value)
                .with("icc_b", g.icc.b.value)
                .with("lower_sd", sd.map(|s| s.value))
                .with("lower_sd_a", sd.map(|s| s.a.value))
                .with("lower_sd_b", sd.map(|s| s.b.value))
                .with("capacity_sd_iid", sd.map(|s| s.value))
                .with("upper", set.upper.value)
                .with("ordering_pass", set.ordering_pass()),
        );
    }
    Ok(Output { records, sessions: None })
}

/// Degradedness of each channel and the overall verdict.
pub fn validate(cfg: &RunConfig) -> Result<Output, CliError> {
    let setup = require_setup(cfg)?;
    let (f, b) = setup.sd_reports();
    let mut records = Vec::new();
    for (name, r) in [("forward", &f), ("backward", &b)] {
        records.push(
            Record::new()
                .with("record", "direction")
                .with("direction", name)
                .with("independent_components", Some(r.independent_components))
                .with("order", json(&r.order).as_str().map(str::to_string))
                .with("is_sd", r.is_sd())
                .with("witness", r.witness.as_ref().map(json)),
        );
    }
    records.push(
        Record::new()
            .with("record", "verdict")
            .with("direction", "setup")
            .with("independent_components", Some(f.independent_components && b.independent_components))
            .with("order", None::<String>)
            .with("is_sd", f.is_sd() && b.is_sd())
            .with("witness", None::<Value>),
    );
    Ok(Output { records, sessions: None })
}

/// Builds the codebook, runs the sessions and reports the three checks.
pub fn simulate(cfg: &RunConfig) -> Result<Output, CliError> {
    let setup = require_setup(cfg)?;
    let sim = cfg.simulate.as_ref().ok_or_else(|| CliError::Config("missing [simulate] section".into()))?;
    let setup = match sim.initiator {
        Initiator::A => setup.clone(),
        Initiator::B => setup.reversed(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (plan, cb) = match sim.variant {
        Variant::Special => {
            let p_xf = match &sim.p_xf {
                Some(p) => p.clone(),
                None => Pmf::uniform(setup.forward.input().size())?,
            };
            let p_xb = match &sim.p_xb {
                Some(p) => p.clone(),
                None => Pmf::uniform(setup.backward.input().size())?,
            };
            let (plan, _) = BlockPlan::special(&setup, &p_xf, &p_xb, sim.lengths, sim.alpha, sim.epsilon)?;
            let plan = match sim.kappa {
                Some(k) => plan.with_kappa(k)?,
                None => plan,
            };
            let cb = IccCodebook::build_special(&setup, &p_xf, &p_xb, &plan, &mut rng)?;
            (plan, cb)
        }
        Variant::General => {
            let aux = match &sim.aux {
                Some(a) => a.clone(),
                None => DirectionAux::special_uniform(&setup)?,
            };
            let PlanLengths::Fixed { n_f, n_b } = sim.lengths else {
                return Err(CliError::Config("the general variant needs explicit `n_f` and `n_b`".into()));
            };
            let plan = BlockPlan::general(&setup, &aux, n_f, n_b, sim.alpha, sim.epsilon)?;
            let plan = match sim.kappa {
                Some(k) => plan.with_kappa(k)?,
                None => plan,
            };
            let cb = IccCodebook::build(&setup, &aux, &plan, &mut rng)?;
            (plan, cb)
        }
    };
    let ecfg = EvaluationConfig { sessions: sim.sessions, delta: sim.delta, leakage: sim.leakage, parallel: true };
    let (r, outcomes) = evaluate_sessions(&setup, &cb, &ecfg, &mut rng)?;
    let variant = match sim.variant {
        Variant::Special => "special",
        Variant::General => "general",
    };
    let initiator = match sim.initiator {
        Initiator::A => "a",
        Initiator::B => "b",
    };
    let report = Record::new()
        .with("variant", variant)
        .with("initiator", initiator)
        .with("n_f", plan.n_f)
        .with("n_b", plan.n_b)
        .with("n_b1", plan.n_b1)
        .with("n_b2", plan.n_b2)
        .with("alpha", plan.alpha)
        .with("epsilon", plan.epsilon)
        .with("eta", plan.eta)
        .with("kappa", plan.kappa)
        .with("gamma", plan.gamma)
        .with("target_rate", r.target_rate)
        .with("sessions", r.sessions)
        .with("ok", r.failures.ok)
        .with("bob_null", r.failures.bob_null)
        .with("alice_null", r.failures.alice_null)
        .with("decode_mismatch", r.failures.decode_mismatch)
        .with("p_error", r.p_error)
        .with("p_error_ci_low", r.p_error_ci.0)
        .with("p_error_ci_high", r.p_error_ci.1)
        .with("p_error_se", r.p_error_se)
        .with("key_entropy", r.key_entropy)
        .with("key_entropy_plugin", r.key_entropy_plugin)
        .with("key_entropy_exact", r.key_entropy_exact)
        .with("total_length", r.total_length)
        .with("rate", r.rate)
        .with("leakage", r.leakage)
        .with("leakage_se", r.leakage_se)
        .with("leakage_ratio", r.leakage_ratio)
        .with("delta", r.delta)
        .with("uniformity_pass", r.delta_check.uniformity)
        .with("reliability_pass", r.delta_check.reliability)
        .with("secrecy_pass", r.delta_check.secrecy);
    let sessions = sim.per_session.then(|| {
        outcomes
            .iter()
            .enumerate()
            .map(|(i, o)| {
                Record::new()
                    .with("session", i)
                    .with("failure_mode", json(&o.failure_mode).as_str().map(str::to_string))
                    .with("s", o.s)
                    .with("s_hat", o.s_hat)
                    .with("f", o.f)
                    .with("b", o.b)
                    .with("views", json(&o.views))
            })
            .collect()
    });
    Ok(Output { records: vec![report], sessions })
}
