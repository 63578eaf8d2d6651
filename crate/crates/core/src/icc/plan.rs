use serde::{Deserialize, Serialize};

use crate::bounds::{direction_rates, ratio_planner, DirectionAux, PlanInformations, PlanLengths, RatioPlan};
use crate::channels::TwoDmbcSetup;
use crate::error::{Error, Result};
use crate::probability::{mutual_information_sets, Pmf};
use crate::typicality::enumerate_typical;

/// Default `alpha`.
pub const DEFAULT_ALPHA: f64 = 0.05;

/// Which construction a plan belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanKind {
    /// `V = Y_f`, `W2` constant, `W1 = X_b`, full typical sets as books.
    Special,
    /// Arbitrary auxiliary laws with sampled books.
    General,
}

/// Integer lengths and bit counts of one protocol instance. In the special
/// case `n_b1`/`n_b2` hold `n_{b,i}`/`n_{b,p}` and the second-level splits
/// are trivial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockPlan {
    pub kind: PlanKind,
    pub n_f: usize,
    pub n_b: usize,
    pub n_b1: usize,
    pub n_b2: usize,
    pub alpha: f64,
    pub beta: f64,
    pub epsilon: f64,
    pub eta_f: u32,
    pub eta_b: u32,
    pub eta_f1: u32,
    pub eta_f2: u32,
    pub eta_b1: u32,
    pub eta_b2: u32,
    pub eta_1: u32,
    pub eta_2: u32,
    pub eta: u32,
    pub kappa: u32,
    pub gamma: u32,
    /// Real-valued target rate the key length is derived from.
    pub r_sk: f64,
}

impl BlockPlan {
    pub fn total(&self) -> usize {
        self.n_f + self.n_b
    }

    /// `min(n_f alpha, n_b beta) / (6 N)` with `beta = n_f alpha / n_b`.
    pub fn default_epsilon(n_f: usize, n_b: usize, alpha: f64) -> f64 {
        let beta = n_f as f64 * alpha / n_b as f64;
        (n_f as f64 * alpha).min(n_b as f64 * beta) / (6.0 * (n_f + n_b) as f64)
    }

    /// Special-case plan from the integer ratio planner.
    pub fn special(
        setup: &TwoDmbcSetup,
        p_xf: &Pmf,
        p_xb: &Pmf,
        lengths: PlanLengths,
        alpha: f64,
        epsilon: Option<f64>,
    ) -> Result<(BlockPlan, RatioPlan)> {
        let info = PlanInformations::from_setup(setup, p_xf, p_xb)?;
        let ratio = ratio_planner(info, alpha, lengths)?;
        let RatioPlan { n_f, n_b, n_bi, n_bp } = ratio;
        let n = (n_f + n_b) as f64;
        let epsilon = epsilon.unwrap_or_else(|| BlockPlan::default_epsilon(n_f, n_b, alpha));
        if !(5.0 * n * epsilon < n_f as f64 * alpha) {
            return Err(Error::InvalidArgument(format!(
                "epsilon = {epsilon} violates 5 N epsilon < n_f alpha ({} >= {})",
                5.0 * n * epsilon,
                n_f as f64 * alpha
            )));
        }
        let p_yf = setup.forward.legit_channel().push_forward(p_xf)?;
        let eta_f = book_bits(&p_yf, n_f, epsilon)?;
        let eta_b = book_bits(p_xb, n_bi, epsilon)?;
        let aux = DirectionAux::special(setup, p_xf.clone(), p_xb.clone())?;
        let rates = direction_rates(setup, &aux)?;
        let r_sk = (n_f as f64 * rates.r1 + n_b as f64 * rates.r2) / n;
        let eta = eta_f + eta_b;
        let kappa = key_bits(r_sk, n, eta);
        let plan = BlockPlan {
            kind: PlanKind::Special,
            n_f,
            n_b,
            n_b1: n_bi,
            n_b2: n_bp,
            alpha,
            beta: n_f as f64 * alpha / n_b as f64,
            epsilon,
            eta_f,
            eta_b,
            eta_f1: eta_f,
            eta_f2: 0,
            eta_b1: eta_b,
            eta_b2: 0,
            eta_1: eta,
            eta_2: 0,
            eta,
            kappa,
            gamma: eta - kappa,
            r_sk,
        };
        plan.check_guard()?;
        Ok((plan, ratio))
    }

    /// General plan for fixed lengths and auxiliary laws.
    pub fn general(
        setup: &TwoDmbcSetup,
        aux: &DirectionAux,
        n_f: usize,
        n_b: usize,
        alpha: f64,
        epsilon: Option<f64>,
    ) -> Result<BlockPlan> {
        if n_f == 0 || n_b == 0 {
            return Err(Error::InvalidArgument("block lengths must be positive".into()));
        }
        if !(alpha > 0.0) {
            return Err(Error::InvalidArgument(format!("alpha must be positive, got {alpha}")));
        }
        let rates = direction_rates(setup, aux)?;
        let f = aux.forward_joint(&setup.forward)?;
        let b = aux.backward_joint(&setup.backward)?;
        // (X, Y, Z, V) and (W1, W2, X, Y, Z)
        let i_vy = mutual_information_sets(&f, &[3], &[1], &[])?;
        let i_w1y = rates.c2;
        let i_w2y = mutual_information_sets(&b, &[1], &[3], &[])?;
        if !(i_w1y > 0.0) {
            return Err(Error::Infeasible("I(W1;Y_b) = 0 leaves no room for parity".into()));
        }
        let need = n_f as f64 * (rates.c1 + 3.0 * alpha);
        let n_b2 = ((need / i_w1y) - 1e-9).ceil().max(0.0) as usize;
        if n_b2 > n_b {
            return Err(Error::Infeasible(format!(
                "n_b2 = ceil(n_f (I(V;Y_f|X_f) + 3 alpha) / I(W1;Y_b)) = {n_b2} exceeds n_b = {n_b} \
                 (I(V;Y_f|X_f) = {:.6}, I(W1;Y_b) = {:.6})",
                rates.c1, i_w1y
            )));
        }
        let n_b1 = n_b - n_b2;
        let beta = n_f as f64 * alpha / n_b as f64;
        let n = (n_f + n_b) as f64;
        let epsilon = epsilon.unwrap_or_else(|| BlockPlan::default_epsilon(n_f, n_b, alpha));
        if !(3.0 * n * epsilon < n_b as f64 * beta) {
            return Err(Error::InvalidArgument(format!(
                "epsilon = {epsilon} violates 3 N epsilon < n_b beta ({} >= {})",
                3.0 * n * epsilon,
                n_b as f64 * beta
            )));
        }
        let bits = |x: f64| (x + 1e-9).floor().max(0.0) as u32;
        let eta_f = bits(n_f as f64 * (i_vy + alpha));
        let eta_f2 = bits(n_b2 as f64 * i_w2y).min(eta_f);
        let eta_b = bits(n_b1 as f64 * (i_w1y - beta));
        let eta_b2 = bits(n_b1 as f64 * i_w2y).min(eta_b);
        let (eta_f1, eta_b1) = (eta_f - eta_f2, eta_b - eta_b2);
        let eta = eta_f + eta_b;
        let r_sk = (n_f as f64 * rates.r1 + n_b as f64 * rates.r2) / n;
        let kappa = key_bits(r_sk, n, eta);
        let plan = BlockPlan {
            kind: PlanKind::General,
            n_f,
            n_b,
            n_b1,
            n_b2,
            alpha,
            beta,
            epsilon,
            eta_f,
            eta_b,
            eta_f1,
            eta_f2,
            eta_b1,
            eta_b2,
            eta_1: eta_f1 + eta_b1,
            eta_2: eta_f2 + eta_b2,
            eta,
            kappa,
            gamma: eta - kappa,
            r_sk,
        };
        plan.check_guard()?;
        Ok(plan)
    }

    /// Replaces the key length, keeping `gamma = eta - kappa`.
    pub fn with_kappa(mut self, kappa: u32) -> Result<Self> {
        if kappa > self.eta {
            return Err(Error::InvalidArgument(format!("kappa = {kappa} exceeds eta = {}", self.eta)));
        }
        self.kappa = kappa;
        self.gamma = self.eta - kappa;
        Ok(self)
    }

    fn check_guard(&self) -> Result<()> {
        let limit = crate::guard_bits();
        if self.eta > limit {
            return Err(Error::GuardExceeded(format!("eta = {} exceeds 2^{limit} candidates", self.eta)));
        }
        Ok(())
    }
}

/// `floor(N R_sk)`, floored at zero and capped at `eta` so `gamma >= 0`.
fn key_bits(r_sk: f64, n: f64, eta: u32) -> u32 {
    let k = (n * r_sk + 1e-9).floor();
    if k <= 0.0 {
        0
    } else {
        (k as u32).min(eta)
    }
}

/// `floor(log2 |typical set|)`; a zero-length block has one (empty) word.
fn book_bits(p: &Pmf, n: usize, epsilon: f64) -> Result<u32> {
    if n == 0 {
        return Ok(0);
    }
    let count = enumerate_typical(p, n, epsilon)?.len();
    if count == 0 {
        return Err(Error::Infeasible(format!("no {n}-sequence is {epsilon}-typical")));
    }
    Ok(usize::BITS - 1 - count.leading_zeros())
}
