//! Integer block lengths for the special-case protocol.

use serde::{Deserialize, Serialize};

use crate::channels::TwoDmbcSetup;
use crate::error::{Error, Result};
use crate::probability::{conditional_entropy, entropy, mutual_information, Pmf};

/// Setup-level information quantities the plan depends on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanInformations {
    /// `H(Y_f | X_f)`
    pub h_yf_given_xf: f64,
    /// `I(X_b; Y_b)`
    pub i_xb_yb: f64,
    /// `H(X_b)`
    pub h_xb: f64,
}

impl PlanInformations {
    pub fn from_setup(setup: &TwoDmbcSetup, p_xf: &Pmf, p_xb: &Pmf) -> Result<Self> {
        let f = setup.forward.joint(p_xf)?;
        let b = setup.backward.joint(p_xb)?;
        Ok(PlanInformations {
            h_yf_given_xf: conditional_entropy(&f, &[1], &[0])?,
            i_xb_yb: mutual_information(&b, (0, 1))?,
            h_xb: entropy(p_xb),
        })
    }
}

/// How the two lengths are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanLengths {
    /// Total `N`; `n_f` is the largest value meeting the length constraint.
    Tight { total: usize },
    Fixed { n_f: usize, n_b: usize },
}

/// Integer lengths `n_b = n_{b,i} + n_{b,p}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatioPlan {
    pub n_f: usize,
    pub n_b: usize,
    pub n_bi: usize,
    pub n_bp: usize,
}

fn satisfies(info: &PlanInformations, alpha: f64, n_f: usize, n_b: usize) -> bool {
    n_f as f64 * (info.h_yf_given_xf + alpha) <= n_b as f64 * info.i_xb_yb + 1e-12
}

/// Integer block plan: `n_f (H(Y_f|X_f) + alpha) <= n_b I(X_b;Y_b)`, and
/// `n_{b,i} = floor((n_b I(X_b;Y_b) - n_f (H(Y_f|X_f) + alpha)) / H(X_b))`.
pub fn ratio_planner(info: PlanInformations, alpha: f64, lengths: PlanLengths) -> Result<RatioPlan> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidArgument(format!("alpha must be positive, got {alpha}")));
    }
    let (n_f, n_b) = match lengths {
        PlanLengths::Fixed { n_f, n_b } => {
            if n_f == 0 || n_b == 0 {
                return Err(Error::InvalidArgument("block lengths must be positive".into()));
            }
            if !satisfies(&info, alpha, n_f, n_b) {
                return Err(Error::Infeasible(infeasible_message(&info, alpha, n_f, n_b)));
            }
            (n_f, n_b)
        }
        PlanLengths::Tight { total } => {
            let n_f = (1..total).rev().find(|&n_f| satisfies(&info, alpha, n_f, total - n_f)).ok_or_else(|| {
                Error::Infeasible(format!(
                    "no split of N = {total} satisfies n_f (H(Y_f|X_f) + alpha) <= n_b I(X_b;Y_b) \
                     with H(Y_f|X_f) = {:.6}, I(X_b;Y_b) = {:.6}, alpha = {alpha}",
                    info.h_yf_given_xf, info.i_xb_yb
                ))
            })?;
            (n_f, total - n_f)
        }
    };
    let spare = n_b as f64 * info.i_xb_yb - n_f as f64 * (info.h_yf_given_xf + alpha);
    let n_bi = if spare <= 0.0 {
        0
    } else if info.h_xb <= 0.0 {
        return Err(Error::InvalidArgument("H(X_b) must be positive to carry information".into()));
    } else {
        // guard against 4.9999999 style truncation
        (((spare / info.h_xb) + 1e-9).floor() as usize).min(n_b)
    };
    Ok(RatioPlan { n_f, n_b, n_bi, n_bp: n_b - n_bi })
}

fn infeasible_message(info: &PlanInformations, alpha: f64, n_f: usize, n_b: usize) -> String {
    format!(
        "n_f (H(Y_f|X_f) + alpha) = {:.6} exceeds n_b I(X_b;Y_b) = {:.6} (n_f = {n_f}, n_b = {n_b})",
        n_f as f64 * (info.h_yf_given_xf + alpha),
        n_b as f64 * info.i_xb_yb
    )
}
