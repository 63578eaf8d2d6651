use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::codebook::IccCodebook;
use super::plan::PlanKind;
use crate::channels::{draw_symbol, sample_block, transmit, TwoDmbcSetup};
use crate::error::Result;
use crate::probability::Symbol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureMode {
    Ok,
    BobNull,
    AliceNull,
    DecodeMismatch,
}

/// Alice's, Bob's and Eve's observations.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Views {
    pub alice_xf: Vec<Symbol>,
    pub alice_yb: Vec<Symbol>,
    pub bob_yf: Vec<Symbol>,
    pub bob_xb: Vec<Symbol>,
    pub eve_zf: Vec<Symbol>,
    pub eve_zb: Vec<Symbol>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionOutcome {
    /// Bob's key.
    pub s: Option<u32>,
    /// Alice's key.
    pub s_hat: Option<u32>,
    /// Bob's indices.
    pub f: Option<usize>,
    pub b: Option<usize>,
    pub views: Views,
    pub failure_mode: FailureMode,
}

const ALICE: u64 = 1;
const BOB: u64 = 2;
const FORWARD: u64 = 3;
const BACKWARD: u64 = 4;
const DMC: u64 = 5;

/// Independent generators for the parties and channels, all derived from one
/// draw of the caller's generator.
struct Streams {
    alice: ChaCha8Rng,
    bob: ChaCha8Rng,
    forward: ChaCha8Rng,
    backward: ChaCha8Rng,
    dmc: ChaCha8Rng,
}

impl Streams {
    fn new<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let seed: u64 = rng.random();
        let stream = |k| {
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            r.set_stream(k);
            r
        };
        Streams { alice: stream(ALICE), bob: stream(BOB), forward: stream(FORWARD), backward: stream(BACKWARD), dmc: stream(DMC) }
    }
}

fn bob_draw(cb: &IccCodebook, st: &mut Streams) -> usize {
    st.bob.random_range(0..cb.w1_book().len())
}

/// Runs the special-case protocol: Bob's head is his own reception, his tail
/// a uniformly chosen typical `X_b` sequence, and the backward input is the
/// systematic codeword itself.
pub fn run_session_special<R: Rng + ?Sized>(
    setup: &TwoDmbcSetup,
    cb: &IccCodebook,
    rng: &mut R,
) -> Result<SessionOutcome> {
    let mut st = Streams::new(rng);
    let plan = cb.plan();
    let x_f: Vec<Symbol> = (0..plan.n_f).map(|_| draw_symbol(cb.aux().p_xf.probs(), &mut st.alice)).collect();
    let (y_f, z_f) = sample_block(&setup.forward, &x_f, &mut st.forward)?;
    let mut views = Views { alice_xf: x_f, bob_yf: y_f, eve_zf: z_f, ..Views::default() };
    let Some(f) = cb.v_book().position_sorted(&views.bob_yf) else {
        return Ok(bob_null(views));
    };
    let b = bob_draw(cb, &mut st);
    let x_b = cb.encode_index(f, b)?.tail;
    backward_round(setup, cb, &mut st, &mut views, f, b, x_b)
}

/// Runs the general protocol: Bob quantizes `Y_f` to a `V` book entry,
/// appends a uniform `W1` head, encodes through the parity books and passes
/// the result through the `W1 -> X_b` channel.
pub fn run_session_general<R: Rng + ?Sized>(
    setup: &TwoDmbcSetup,
    cb: &IccCodebook,
    rng: &mut R,
) -> Result<SessionOutcome> {
    let mut st = Streams::new(rng);
    let plan = cb.plan();
    let x_f: Vec<Symbol> = (0..plan.n_f).map(|_| draw_symbol(cb.aux().p_xf.probs(), &mut st.alice)).collect();
    let (y_f, z_f) = sample_block(&setup.forward, &x_f, &mut st.forward)?;
    let mut views = Views { alice_xf: x_f, bob_yf: y_f, eve_zf: z_f, ..Views::default() };
    let Some(f) = cb.quantize(&views.bob_yf) else {
        return Ok(bob_null(views));
    };
    let b = bob_draw(cb, &mut st);
    let w1 = cb.encode_index(f, b)?.tail;
    let x_b = transmit(&cb.aux().p_xb_given_w1, &w1, &mut st.dmc);
    backward_round(setup, cb, &mut st, &mut views, f, b, x_b)
}

/// Dispatches on the plan's construction.
pub fn run_session<R: Rng + ?Sized>(setup: &TwoDmbcSetup, cb: &IccCodebook, rng: &mut R) -> Result<SessionOutcome> {
    match cb.plan().kind {
        PlanKind::Special => run_session_special(setup, cb, rng),
        PlanKind::General => run_session_general(setup, cb, rng),
    }
}

fn bob_null(views: Views) -> SessionOutcome {
    SessionOutcome { s: None, s_hat: None, f: None, b: None, views, failure_mode: FailureMode::BobNull }
}

fn backward_round(
    setup: &TwoDmbcSetup,
    cb: &IccCodebook,
    st: &mut Streams,
    views: &mut Views,
    f: usize,
    b: usize,
    x_b: Vec<Symbol>,
) -> Result<SessionOutcome> {
    let (y_b, z_b) = sample_block(&setup.backward, &x_b, &mut st.backward)?;
    views.bob_xb = x_b;
    views.alice_yb = y_b;
    views.eve_zb = z_b;
    let s = cb.derive_key(f, b)?;
    let s_hat = match cb.decode(&views.alice_xf, &views.alice_yb) {
        Some((fh, bh)) => Some(cb.derive_key(fh, bh)?),
        None => None,
    };
    let failure_mode = match s_hat {
        None => FailureMode::AliceNull,
        Some(k) if k == s => FailureMode::Ok,
        Some(_) => FailureMode::DecodeMismatch,
    };
    Ok(SessionOutcome { s: Some(s), s_hat, f: Some(f), b: Some(b), views: std::mem::take(views), failure_mode })
}
