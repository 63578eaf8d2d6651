use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channels::{Dmbc, TwoDmbcSetup};
use crate::error::{Error, Result};
use crate::probability::{compose_markov, ConditionalPmf, Factor, JointPmf, Pmf};

/// Auxiliary laws for one direction of the two-round protocol.
///
/// Field names follow the direction in which the initiator sends first on
/// the channel called `forward` here; for the reverse direction the same
/// structure is read against [`TwoDmbcSetup::reversed`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionAux {
    /// Initiator's round-one input law.
    pub p_xf: Pmf,
    /// Responder's quantizer `V` of its round-one observation.
    pub p_v_given_yf: ConditionalPmf,
    pub p_w1: Pmf,
    pub p_w2_given_w1: ConditionalPmf,
    /// Round-two channel input generated from `W1`.
    pub p_xb_given_w1: ConditionalPmf,
}

/// Auxiliary systems for both directions; `b` is interpreted on the reversed
/// setup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuxiliarySystem {
    pub a: DirectionAux,
    pub b: DirectionAux,
}

/// Alphabet sizes of the auxiliary variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuxSizes {
    pub v: usize,
    pub w1: usize,
    pub w2: usize,
}

impl AuxSizes {
    /// Default caps `|V| <= |Y|+2`, `|W1| <= |X|+2`, `|W2| <= |W1|`.
    pub fn caps(setup: &TwoDmbcSetup) -> Self {
        let w1 = setup.backward.input().size() + 2;
        AuxSizes { v: setup.forward.legit_output().size() + 2, w1, w2: w1 }
    }
}

impl DirectionAux {
    /// `V = Y_f`, `W2` constant, `W1 = X_b`: the special-case substitution.
    pub fn special(setup: &TwoDmbcSetup, p_xf: Pmf, p_xb: Pmf) -> Result<Self> {
        let ny = setup.forward.legit_output().size();
        let nx = setup.backward.input().size();
        let aux = DirectionAux {
            p_xf,
            p_v_given_yf: ConditionalPmf::identity(ny)?,
            p_w2_given_w1: ConditionalPmf::constant(nx, &Pmf::point_mass(1, 0)?)?,
            p_xb_given_w1: ConditionalPmf::identity(nx)?,
            p_w1: p_xb,
        };
        aux.check(setup)?;
        Ok(aux)
    }

    /// The special case with uniform inputs.
    pub fn special_uniform(setup: &TwoDmbcSetup) -> Result<Self> {
        DirectionAux::special(
            setup,
            Pmf::uniform(setup.forward.input().size())?,
            Pmf::uniform(setup.backward.input().size())?,
        )
    }

    /// Checks alphabet compatibility with the setup.
    pub fn check(&self, setup: &TwoDmbcSetup) -> Result<()> {
        let mismatch = |what: &str, got: usize, want: usize| {
            Err(Error::AlphabetMismatch(format!("{what}: got {got}, expected {want}")))
        };
        let nw1 = self.p_w1.size();
        if self.p_xf.size() != setup.forward.input().size() {
            return mismatch("p_xf size", self.p_xf.size(), setup.forward.input().size());
        }
        if self.p_v_given_yf.input().size() != setup.forward.legit_output().size() {
            return mismatch(
                "p_v_given_yf input",
                self.p_v_given_yf.input().size(),
                setup.forward.legit_output().size(),
            );
        }
        if self.p_w2_given_w1.input().size() != nw1 {
            return mismatch("p_w2_given_w1 input", self.p_w2_given_w1.input().size(), nw1);
        }
        if self.p_xb_given_w1.input().size() != nw1 {
            return mismatch("p_xb_given_w1 input", self.p_xb_given_w1.input().size(), nw1);
        }
        if self.p_xb_given_w1.output().size() != setup.backward.input().size() {
            return mismatch(
                "p_xb_given_w1 output",
                self.p_xb_given_w1.output().size(),
                setup.backward.input().size(),
            );
        }
        Ok(())
    }

    /// Induced round-two input law `P_{X_b}`.
    pub fn p_xb(&self) -> Pmf {
        self.p_xb_given_w1.push_forward(&self.p_w1).expect("checked sizes")
    }

    pub fn sizes(&self) -> AuxSizes {
        AuxSizes {
            v: self.p_v_given_yf.output().size(),
            w1: self.p_w1.size(),
            w2: self.p_w2_given_w1.output().size(),
        }
    }

    /// Joint law of `(X_f, Y_f, Z_f, V)`.
    pub fn forward_joint(&self, ch: &Dmbc) -> Result<JointPmf> {
        compose_markov(&[
            Factor::root(self.p_xf.clone()),
            Factor::split_channel(
                &[0],
                ch.law().clone(),
                vec![ch.legit_output().clone(), ch.eve_output().clone()],
            ),
            Factor::channel(&[1], self.p_v_given_yf.clone()),
        ])
    }

    /// Joint law of `(W1, W2, X_b, Y_b, Z_b)`.
    pub fn backward_joint(&self, ch: &Dmbc) -> Result<JointPmf> {
        compose_markov(&[
            Factor::root(self.p_w1.clone()),
            Factor::channel(&[0], self.p_w2_given_w1.clone()),
            Factor::channel(&[0], self.p_xb_given_w1.clone()),
            Factor::split_channel(
                &[2],
                ch.law().clone(),
                vec![ch.legit_output().clone(), ch.eve_output().clone()],
            ),
        ])
    }

    /// Random laws of the given sizes (flat Dirichlet rows).
    pub fn random<R: Rng + ?Sized>(setup: &TwoDmbcSetup, sizes: AuxSizes, rng: &mut R) -> Result<Self> {
        let ny = setup.forward.legit_output().size();
        let nx = setup.backward.input().size();
        let aux = DirectionAux {
            p_xf: Pmf::from_probs(random_row(setup.forward.input().size(), rng))?,
            p_v_given_yf: ConditionalPmf::from_rows((0..ny).map(|_| random_row(sizes.v, rng)).collect())?,
            p_w1: Pmf::from_probs(random_row(sizes.w1, rng))?,
            p_w2_given_w1: ConditionalPmf::from_rows((0..sizes.w1).map(|_| random_row(sizes.w2, rng)).collect())?,
            p_xb_given_w1: ConditionalPmf::from_rows((0..sizes.w1).map(|_| random_row(nx, rng)).collect())?,
        };
        Ok(aux)
    }
}

impl AuxiliarySystem {
    pub fn check(&self, setup: &TwoDmbcSetup) -> Result<()> {
        self.a.check(setup)?;
        self.b.check(&setup.reversed())
    }

    pub fn special_uniform(setup: &TwoDmbcSetup) -> Result<Self> {
        Ok(AuxiliarySystem {
            a: DirectionAux::special_uniform(setup)?,
            b: DirectionAux::special_uniform(&setup.reversed())?,
        })
    }
}

/// A flat-Dirichlet point of the simplex.
pub(crate) fn random_row<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<f64> {
    let mut row: Vec<f64> = (0..k).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = row.iter().sum();
    row.iter_mut().for_each(|v| *v /= s);
    row
}
