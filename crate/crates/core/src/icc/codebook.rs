use rand::seq::{index, SliceRandom};
use rand::Rng;

use super::code::TypicalSetCode;
use super::plan::{BlockPlan, PlanKind};
use crate::bounds::DirectionAux;
use crate::channels::{draw_symbol, TwoDmbcSetup};
use crate::error::{Error, Result};
use crate::probability::{ConditionalPmf, Pmf, Symbol};
use crate::typicality::{
    enumerate_typical, sample_from_typical_set, BipartiteWord, BookMode, JointTypicalityTest, TypicalBook,
};

/// Balanced assignment of the `2^eta` index pairs to `2^kappa` keys, each
/// key receiving exactly `2^gamma` pairs. Pairs are flattened as
/// `(f << eta_b) | b`; keys are 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyPartition {
    eta_f: u32,
    eta_b: u32,
    kappa: u32,
    cell: Vec<u32>,
}

impl KeyPartition {
    /// Shuffle-and-chunk: a uniform permutation of the pairs cut into
    /// consecutive runs of `2^gamma`.
    pub fn random<R: Rng + ?Sized>(eta_f: u32, eta_b: u32, kappa: u32, rng: &mut R) -> Result<Self> {
        let mut perm = KeyPartition::pairs(eta_f, eta_b, kappa)?;
        perm.shuffle(rng);
        Ok(KeyPartition::from_order(eta_f, eta_b, kappa, &perm))
    }

    /// Keys are the top `kappa` bits of the flattened pair index.
    pub fn contiguous(eta_f: u32, eta_b: u32, kappa: u32) -> Result<Self> {
        let perm = KeyPartition::pairs(eta_f, eta_b, kappa)?;
        Ok(KeyPartition::from_order(eta_f, eta_b, kappa, &perm))
    }

    fn pairs(eta_f: u32, eta_b: u32, kappa: u32) -> Result<Vec<u32>> {
        let eta = eta_f + eta_b;
        if kappa > eta {
            return Err(Error::InvalidArgument(format!("kappa = {kappa} exceeds eta = {eta}")));
        }
        if eta > 31 {
            return Err(Error::GuardExceeded(format!("eta = {eta} bits of index pairs")));
        }
        Ok((0..1u32 << eta).collect())
    }

    fn from_order(eta_f: u32, eta_b: u32, kappa: u32, order: &[u32]) -> Self {
        let gamma = eta_f + eta_b - kappa;
        let mut cell = vec![0u32; order.len()];
        for (k, &pair) in order.iter().enumerate() {
            cell[pair as usize] = (k >> gamma) as u32;
        }
        KeyPartition { eta_f, eta_b, kappa, cell }
    }

    pub fn kappa(&self) -> u32 {
        self.kappa
    }

    pub fn gamma(&self) -> u32 {
        self.eta_f + self.eta_b - self.kappa
    }

    pub fn num_keys(&self) -> usize {
        1 << self.kappa
    }

    pub fn key(&self, f: usize, b: usize) -> Result<u32> {
        if f >> self.eta_f != 0 {
            return Err(Error::IndexOutOfRange { index: f, count: 1 << self.eta_f });
        }
        if b >> self.eta_b != 0 {
            return Err(Error::IndexOutOfRange { index: b, count: 1 << self.eta_b });
        }
        Ok(self.cell[(f << self.eta_b) | b])
    }

    /// Key of a flattened pair index.
    pub fn key_of_pair(&self, pair: usize) -> u32 {
        self.cell[pair]
    }

    /// All pairs `(f, b)` mapped to key `s`.
    pub fn preimage(&self, s: u32) -> Vec<(usize, usize)> {
        let mask = (1usize << self.eta_b) - 1;
        self.cell
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == s)
            .map(|(p, _)| (p >> self.eta_b, p & mask))
            .collect()
    }
}

/// All books, index maps and the key partition of one protocol instance.
/// The systematic code's head book is the `V` book and its tail book the
/// `W1` information book; its parity table holds the `P1` words.
#[derive(Debug, Clone)]
pub struct IccCodebook {
    plan: BlockPlan,
    aux: DirectionAux,
    code: TypicalSetCode,
    /// `2^eta_2` words of `n_b2` symbols, indexed `(f2 << eta_b2) | b2`.
    p2: Vec<Symbol>,
    partition: KeyPartition,
    quantizer: JointTypicalityTest,
    eve_test: JointTypicalityTest,
}

struct Laws {
    code: JointTypicalityTest,
    quantizer: JointTypicalityTest,
    eve: JointTypicalityTest,
    p_v: Pmf,
}

fn laws(setup: &TwoDmbcSetup, aux: &DirectionAux, eps: f64) -> Result<Laws> {
    // (X, Y, Z, V) and (W1, W2, X, Y, Z)
    let f = aux.forward_joint(&setup.forward)?;
    let b = aux.backward_joint(&setup.backward)?;
    let v_y = f.marginalize(&[3, 1])?;
    Ok(Laws {
        code: JointTypicalityTest::new(&f.marginalize(&[3, 0])?, &b.marginalize(&[0, 3])?, eps)?,
        quantizer: JointTypicalityTest::new(&v_y, &v_y, eps)?,
        eve: JointTypicalityTest::new(&f.marginalize(&[3, 2])?, &b.marginalize(&[0, 4])?, eps)?,
        p_v: f.marginalize(&[3])?.to_pmf()?,
    })
}

/// `2^bits` distinct typical sequences, kept in lexicographic order.
fn sorted_subset<R: Rng + ?Sized>(all: &TypicalBook, bits: u32, rng: &mut R) -> Result<TypicalBook> {
    let want = 1usize << bits;
    if want > all.len() {
        return Err(Error::Infeasible(format!("{want} sequences requested from a typical set of {}", all.len())));
    }
    if want == all.len() {
        return Ok(all.clone());
    }
    let mut picks = index::sample(rng, all.len(), want).into_vec();
    picks.sort_unstable();
    let seqs: Vec<Vec<Symbol>> = picks.iter().map(|&i| all.get(i).to_vec()).collect();
    TypicalBook::from_sequences(all.seq_len(), &seqs)
}

fn check_plan(plan: &BlockPlan, kind: PlanKind) -> Result<()> {
    if plan.kind != kind {
        return Err(Error::InvalidArgument(format!("plan is {:?}, expected {kind:?}", plan.kind)));
    }
    if plan.eta > crate::guard_bits() {
        return Err(Error::GuardExceeded(format!("eta = {} exceeds 2^{}", plan.eta, crate::guard_bits())));
    }
    Ok(())
}

impl IccCodebook {
    /// Books for the special case: every typical `Y_f` sequence (or a
    /// `2^eta_f` subset) as heads, typical `X_b` sequences as tails and
    /// i.i.d. `P_{X_b}` parities.
    pub fn build_special<R: Rng + ?Sized>(
        setup: &TwoDmbcSetup,
        p_xf: &Pmf,
        p_xb: &Pmf,
        plan: &BlockPlan,
        rng: &mut R,
    ) -> Result<Self> {
        check_plan(plan, PlanKind::Special)?;
        let aux = DirectionAux::special(setup, p_xf.clone(), p_xb.clone())?;
        let l = laws(setup, &aux, plan.epsilon)?;
        let heads = sorted_subset(&enumerate_typical(&l.p_v, plan.n_f, plan.epsilon)?, plan.eta_f, rng)?;
        let tails = sorted_subset(&enumerate_typical(p_xb, plan.n_b1, plan.epsilon)?, plan.eta_b, rng)?;
        let code = TypicalSetCode::random(heads, tails, plan.n_b2, p_xb, l.code, rng)?;
        let partition = KeyPartition::random(plan.eta_f, plan.eta_b, plan.kappa, rng)?;
        Ok(IccCodebook {
            plan: *plan,
            aux,
            code,
            p2: vec![0; plan.n_b2],
            partition,
            quantizer: l.quantizer,
            eve_test: l.eve,
        })
    }

    /// Books for arbitrary auxiliary laws: `V` book with replacement,
    /// distinct `W1` book, `P2` i.i.d. `P_{W2}` and `P1` drawn symbolwise
    /// from `P_{W1|W2}` given the selected `P2` word.
    pub fn build<R: Rng + ?Sized>(
        setup: &TwoDmbcSetup,
        aux: &DirectionAux,
        plan: &BlockPlan,
        rng: &mut R,
    ) -> Result<Self> {
        check_plan(plan, PlanKind::General)?;
        aux.check(setup)?;
        let l = laws(setup, aux, plan.epsilon)?;
        let v_all = enumerate_typical(&l.p_v, plan.n_f, plan.epsilon)?;
        let heads = sample_from_typical_set(&v_all, 1 << plan.eta_f, BookMode::WithReplacement, rng)?;
        let w1_all = enumerate_typical(&aux.p_w1, plan.n_b1, plan.epsilon)?;
        let tails = sample_from_typical_set(&w1_all, 1 << plan.eta_b, BookMode::Distinct, rng)?;

        let p_w2 = aux.p_w2_given_w1.push_forward(&aux.p_w1)?;
        let w1_given_w2 = bayes(&aux.p_w1, &aux.p_w2_given_w1, &p_w2)?;
        let p2: Vec<Symbol> = (0..(1usize << plan.eta_2) * plan.n_b2).map(|_| draw_symbol(p_w2.probs(), rng)).collect();
        let mut parity = Vec::with_capacity((1usize << plan.eta) * plan.n_b2);
        for f in 0..1usize << plan.eta_f {
            for b in 0..1usize << plan.eta_b {
                let k = p2_index(plan, f, b) * plan.n_b2;
                for &w2 in &p2[k..k + plan.n_b2] {
                    parity.push(draw_symbol(w1_given_w2.row(w2 as usize), rng));
                }
            }
        }
        let code = TypicalSetCode::new(heads, tails, plan.n_b2, parity, l.code)?;
        let partition = KeyPartition::random(plan.eta_f, plan.eta_b, plan.kappa, rng)?;
        Ok(IccCodebook {
            plan: *plan,
            aux: aux.clone(),
            code,
            p2,
            partition,
            quantizer: l.quantizer,
            eve_test: l.eve,
        })
    }

    pub fn plan(&self) -> &BlockPlan {
        &self.plan
    }

    pub fn aux(&self) -> &DirectionAux {
        &self.aux
    }

    pub fn code(&self) -> &TypicalSetCode {
        &self.code
    }

    pub fn partition(&self) -> &KeyPartition {
        &self.partition
    }

    pub fn v_book(&self) -> &TypicalBook {
        self.code.heads()
    }

    pub fn w1_book(&self) -> &TypicalBook {
        self.code.tails()
    }

    pub(crate) fn eve_test(&self) -> &JointTypicalityTest {
        &self.eve_test
    }

    /// `f -> (f2, f1)`.
    pub fn f_ind(&self, f: usize) -> (usize, usize) {
        (f >> self.plan.eta_f1, f & ((1 << self.plan.eta_f1) - 1))
    }

    /// `b -> (b2, b1)`.
    pub fn b_ind(&self, b: usize) -> (usize, usize) {
        (b >> self.plan.eta_b1, b & ((1 << self.plan.eta_b1) - 1))
    }

    /// `P2` word selected by `(f2, b2)`.
    pub fn p2_word(&self, f2: usize, b2: usize) -> &[Symbol] {
        let k = ((f2 << self.plan.eta_b2) | b2) * self.plan.n_b2;
        &self.p2[k..k + self.plan.n_b2]
    }

    /// `P1` word for `(f2, b2, f1, b1)`.
    pub fn p1_word(&self, f2: usize, b2: usize, f1: usize, b1: usize) -> &[Symbol] {
        let f = (f2 << self.plan.eta_f1) | f1;
        let b = (b2 << self.plan.eta_b1) | b1;
        self.code.parity(f, b)
    }

    /// `W1^{n_b}` for a pair of indices.
    pub fn encode_index(&self, f: usize, b: usize) -> Result<BipartiteWord> {
        self.code.encode_index(f, b)
    }

    /// `(v, w1 head) -> (v, w1 head ‖ parity)`.
    pub fn encode(&self, v: &[Symbol], w1_head: &[Symbol]) -> Result<BipartiteWord> {
        let f = self
            .v_book()
            .position(v)
            .ok_or_else(|| Error::InvalidArgument("sequence is not in the V book".into()))?;
        let b = self
            .w1_book()
            .position(w1_head)
            .ok_or_else(|| Error::InvalidArgument("sequence is not in the W1 book".into()))?;
        self.encode_index(f, b)
    }

    /// Alice's decoder.
    pub fn decode(&self, x_f: &[Symbol], y_b: &[Symbol]) -> Option<(usize, usize)> {
        self.code.decode_index(x_f, y_b)
    }

    /// `g(f, b)`.
    pub fn derive_key(&self, f: usize, b: usize) -> Result<u32> {
        self.partition.key(f, b)
    }

    /// Bob's quantizer: the first `V` book entry jointly typical with `y_f`.
    pub fn quantize(&self, y_f: &[Symbol]) -> Option<usize> {
        if y_f.len() != self.plan.n_f {
            return None;
        }
        self.v_book()
            .iter()
            .position(|v| self.quantizer.accepts(self.quantizer.head_sums(v, y_f), self.plan.n_f, 0))
    }
}

fn p2_index(plan: &BlockPlan, f: usize, b: usize) -> usize {
    ((f >> plan.eta_f1) << plan.eta_b2) | (b >> plan.eta_b1)
}

/// `P_{W1|W2}` from `P_{W1}` and `P_{W2|W1}`; rows of unreachable `w2`
/// fall back to `P_{W1}`.
fn bayes(p_w1: &Pmf, w2_given_w1: &ConditionalPmf, p_w2: &Pmf) -> Result<ConditionalPmf> {
    let rows = (0..p_w2.size())
        .map(|w2| {
            let pw2 = p_w2.prob(w2);
            if pw2 <= 0.0 {
                return p_w1.probs().to_vec();
            }
            (0..p_w1.size()).map(|w1| p_w1.prob(w1) * w2_given_w1.prob(w1, w2) / pw2).collect()
        })
        .collect::<Vec<Vec<f64>>>();
    ConditionalPmf::from_rows(rows)
}

/// Joint law of `(W1, W2)` used by the parity books, for tests.
#[cfg(test)]
pub(crate) fn w1_w2_joint(aux: &DirectionAux) -> crate::probability::JointPmf {
    crate::probability::JointPmf::from_channel(&aux.p_w1, &aux.p_w2_given_w1).unwrap()
}
