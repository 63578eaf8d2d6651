//! Secret-key rate expressions for the two-way setup and their numerical
//! maximization: general lower bound, ICC rate, the simplified bound for
//! stochastically degraded setups, and the upper bound.

mod aux;
mod eval;
mod planner;
mod search;

use serde::{Deserialize, Serialize};

pub use aux::{AuxSizes, AuxiliarySystem, DirectionAux};
pub use eval::{best_ratio, tight_ratio, DirectionRates, RatioChoice, CONSTRAINT_SLACK, TAU_MIN};
pub use planner::{ratio_planner, PlanInformations, PlanLengths, RatioPlan};
pub use search::SearchConfig;

use crate::channels::TwoDmbcSetup;
use crate::error::Result;
use crate::probability::{conditional_mutual_information, mutual_information_sets, Pmf};
use eval::{secrecy_upper_term, ChannelTables};
use search::{DirectionProblem, Family, LocalOptimum, Objective};

/// The four secrecy-rate components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateComponents {
    pub r_a_s1: f64,
    pub r_a_s2: f64,
    pub r_b_s1: f64,
    pub r_b_s2: f64,
}

/// Optimizer bookkeeping attached to a bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MethodInfo {
    pub restarts: usize,
    /// Total coordinate sweeps over all restarts.
    pub iterations: usize,
    pub tolerance: f64,
}

/// Best point found for one direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    /// Reported rate, never negative.
    pub value: f64,
    /// Objective at the argmax before flooring at zero.
    pub objective: f64,
    /// `n_f / (n_f + n_b)` at the argmax.
    pub ratio: f64,
    /// `n_b I(W1;Y_b) - n_f I(V;Y_f|X_f)`, per channel use, at the argmax
    /// (orientation of the direction).
    pub constraint_slack: f64,
    pub rates: DirectionRates,
    /// Auxiliary laws at the optimum, in the direction's own orientation.
    pub argmax: Option<DirectionAux>,
    pub feasible: bool,
    pub diagnostic: Option<String>,
    pub method: MethodInfo,
}

impl BoundReport {
    /// The second-round component is nonnegative at the optimum.
    pub fn secrecy_potential(&self) -> bool {
        self.rates.r2 >= 0.0
    }
}

/// Per-direction reports and their maximum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoWayBound {
    pub a: BoundReport,
    pub b: BoundReport,
    pub value: f64,
}

impl TwoWayBound {
    fn new(a: BoundReport, b: BoundReport) -> Self {
        let value = a.value.max(b.value);
        TwoWayBound { a, b, value }
    }
}

/// Lower bound and ICC rate computed from one candidate pool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralBounds {
    pub lower: TwoWayBound,
    pub icc: TwoWayBound,
}

/// Upper bound with the maximizing input laws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpperBound {
    pub value: f64,
    /// `max I(X_f;Y_f|Z_f)`
    pub forward: f64,
    /// `max I(X_b;Y_b|Z_b)`
    pub backward: f64,
    pub p_xf: Vec<f64>,
    pub p_xb: Vec<f64>,
    pub method: MethodInfo,
}

/// Evaluates the four components by building the Markov-composed joints.
pub fn rate_components(setup: &TwoDmbcSetup, aux: &AuxiliarySystem) -> Result<RateComponents> {
    aux.check(setup)?;
    let (r_a_s1, r_a_s2) = components_generic(setup, &aux.a)?;
    let (r_b_s1, r_b_s2) = components_generic(&setup.reversed(), &aux.b)?;
    Ok(RateComponents { r_a_s1, r_a_s2, r_b_s1, r_b_s2 })
}

fn components_generic(setup: &TwoDmbcSetup, aux: &DirectionAux) -> Result<(f64, f64)> {
    // (X, Y, Z, V) and (W1, W2, X, Y, Z)
    let f = aux.forward_joint(&setup.forward)?;
    let b = aux.backward_joint(&setup.backward)?;
    let r1 = mutual_information_sets(&f, &[3], &[0], &[])? - mutual_information_sets(&f, &[3], &[2], &[])?;
    let r2 = conditional_mutual_information(&b, 0, 3, 1)? - conditional_mutual_information(&b, 0, 4, 1)?;
    Ok((r1, r2))
}

/// `(r1, r2, c1, c2)` for one direction by the Markov-composed joints.
pub fn direction_rates(setup: &TwoDmbcSetup, aux: &DirectionAux) -> Result<DirectionRates> {
    aux.check(setup)?;
    let (r1, r2) = components_generic(setup, aux)?;
    let f = aux.forward_joint(&setup.forward)?;
    let b = aux.backward_joint(&setup.backward)?;
    Ok(DirectionRates {
        r1,
        r2,
        c1: conditional_mutual_information(&f, 3, 1, 0)?,
        c2: mutual_information_sets(&b, &[0], &[3], &[])?,
    })
}

/// `I(V;X_f|Z_f)` evaluated directly.
pub fn sd_first_term(setup: &TwoDmbcSetup, aux: &DirectionAux) -> Result<f64> {
    aux.check(setup)?;
    conditional_mutual_information(&aux.forward_joint(&setup.forward)?, 3, 0, 2)
}

/// Objective of one direction at a fixed auxiliary system, at its best ratio.
pub fn plug_in(setup: &TwoDmbcSetup, aux: &DirectionAux, clamp: bool) -> Result<(DirectionRates, RatioChoice)> {
    let rates = direction_rates(setup, aux)?;
    Ok((rates, best_ratio(rates, clamp)))
}

fn report(
    problem: &DirectionProblem,
    pool: &[LocalOptimum],
    objective: Objective,
    flip: bool,
    cfg: &SearchConfig,
) -> Result<BoundReport> {
    let method = MethodInfo {
        restarts: cfg.restarts.max(1),
        iterations: pool.iter().map(|p| p.sweeps).sum(),
        tolerance: cfg.tolerance,
    };
    let best = pool
        .iter()
        .map(|p| (p, problem.choice(&p.rows, objective)))
        .filter(|(_, (_, c))| c.feasible)
        .fold(None::<(&LocalOptimum, (DirectionRates, RatioChoice))>, |acc, cur| match acc {
            Some(a) if a.1 .1.value >= cur.1 .1.value => Some(a),
            _ => Some(cur),
        });
    let Some((opt, (rates, choice))) = best else {
        return Ok(BoundReport {
            value: 0.0,
            objective: 0.0,
            ratio: 0.0,
            constraint_slack: 0.0,
            rates: DirectionRates::default(),
            argmax: None,
            feasible: false,
            diagnostic: Some("no probed auxiliary system admits a ratio satisfying the rate constraint".into()),
            method,
        });
    };
    Ok(BoundReport {
        value: choice.value.max(0.0),
        objective: choice.value,
        ratio: if flip { 1.0 - choice.tau } else { choice.tau },
        constraint_slack: choice.slack,
        rates,
        argmax: Some(problem.to_aux(&opt.rows)?),
        feasible: true,
        diagnostic: None,
        method,
    })
}

fn caps(setup: &TwoDmbcSetup, cfg: &SearchConfig) -> AuxSizes {
    cfg.sizes.unwrap_or_else(|| AuxSizes::caps(setup))
}

fn general_direction(setup: &TwoDmbcSetup, cfg: &SearchConfig, flip: bool) -> Result<(BoundReport, BoundReport)> {
    let problem = DirectionProblem::new(setup, Family::Full(caps(setup, cfg)));
    let pool = problem.run(&[Objective::General { clamp: true }, Objective::General { clamp: false }], cfg);
    Ok((
        report(&problem, &pool, Objective::General { clamp: true }, flip, cfg)?,
        report(&problem, &pool, Objective::General { clamp: false }, flip, cfg)?,
    ))
}

/// Lower bound and ICC rate from a shared pool of local optima, so that the
/// ICC rate never exceeds the lower bound and the two coincide whenever the
/// lower bound's optimum has a nonnegative second-round component.
pub fn general_bounds(setup: &TwoDmbcSetup, cfg: &SearchConfig) -> Result<GeneralBounds> {
    let (la, ia) = general_direction(setup, cfg, false)?;
    let (lb, ib) = general_direction(&setup.reversed(), cfg, true)?;
    Ok(GeneralBounds { lower: TwoWayBound::new(la, lb), icc: TwoWayBound::new(ia, ib) })
}

/// `max{L_A, L_B}`.
pub fn lower_bound_general(setup: &TwoDmbcSetup, cfg: &SearchConfig) -> Result<TwoWayBound> {
    Ok(general_bounds(setup, cfg)?.lower)
}

/// `max{R^ICC_A, R^ICC_B}`.
pub fn icc_rate(setup: &TwoDmbcSetup, cfg: &SearchConfig) -> Result<TwoWayBound> {
    Ok(general_bounds(setup, cfg)?.icc)
}

fn restricted(setup: &TwoDmbcSetup, cfg: &SearchConfig, objective: Objective) -> Result<TwoWayBound> {
    let mut out = Vec::with_capacity(2);
    for (s, flip) in [(setup.clone(), false), (setup.reversed(), true)] {
        let v = caps(&s, cfg).v;
        let problem = DirectionProblem::new(&s, Family::Restricted { v });
        let pool = problem.run(&[objective], cfg);
        out.push(report(&problem, &pool, objective, flip, cfg)?);
    }
    let b = out.pop().expect("two directions");
    let a = out.pop().expect("two directions");
    Ok(TwoWayBound::new(a, b))
}

/// The general lower bound with `W2` constant and `W1 = X_b`.
pub fn lower_bound_general_restricted(setup: &TwoDmbcSetup, cfg: &SearchConfig) -> Result<TwoWayBound> {
    restricted(setup, cfg, Objective::General { clamp: true })
}

/// `max{L'_A, L'_B}`; refuses setups that are not stochastically degraded
/// with independent components.
pub fn lower_bound_sd(setup: &TwoDmbcSetup, cfg: &SearchConfig) -> Result<TwoWayBound> {
    setup.require_sd()?;
    restricted(setup, cfg, Objective::Sd)
}

/// Secret-key capacity when one party sends i.i.d. symbols; equal to the
/// sd lower bound.
pub fn capacity_sd_iid(setup: &TwoDmbcSetup, cfg: &SearchConfig) -> Result<f64> {
    Ok(lower_bound_sd(setup, cfg)?.value)
}

/// `max over input laws of max{I(X_f;Y_f|Z_f), I(X_b;Y_b|Z_b)}`.
pub fn upper_bound(setup: &TwoDmbcSetup, cfg: &SearchConfig) -> UpperBound {
    let fwd = ChannelTables::new(&setup.forward);
    let bwd = ChannelTables::new(&setup.backward);
    let (vf, pf, sf) = search::maximize_input(fwd.nx, &|p| secrecy_upper_term(&fwd, p), cfg);
    let (vb, pb, sb) = search::maximize_input(bwd.nx, &|p| secrecy_upper_term(&bwd, p), cfg);
    let (vf, vb) = (vf.max(0.0), vb.max(0.0));
    UpperBound {
        value: vf.max(vb),
        forward: vf,
        backward: vb,
        p_xf: pf,
        p_xb: pb,
        method: MethodInfo { restarts: cfg.restarts.max(1), iterations: sf + sb, tolerance: cfg.tolerance },
    }
}

/// `I(X;Y|Z)` of a channel at a given input law.
pub fn conditional_secrecy_term(ch: &crate::channels::Dmbc, px: &Pmf) -> Result<f64> {
    conditional_mutual_information(&ch.joint(px)?, 0, 1, 2)
}
