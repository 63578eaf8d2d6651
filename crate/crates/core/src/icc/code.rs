use rand::Rng;

use crate::channels::draw_symbol;
use crate::error::{Error, Result};
use crate::probability::{Pmf, Symbol};
use super::packed::PackedWords;
use crate::typicality::{BipartiteWord, JointTypicalityTest, SurprisalSums, TypicalBook};

/// A systematic code over bipartite information words: the encoder keeps
/// the information part and appends a parity sequence; the decoder maps the
/// initiator's own sequence and the received sequence back to an information
/// word, or `None`.
pub trait SystematicCode {
    /// `(n_f, n_bi, n_bp)`.
    fn lengths(&self) -> (usize, usize, usize);

    /// Appends the parity sequence to `head ‖ tail`.
    fn encode(&self, head: &[Symbol], tail: &[Symbol]) -> Result<BipartiteWord>;

    /// Recovers `(head, tail)` from `x_f` and the backward reception.
    fn decode(&self, x_f: &[Symbol], y_b: &[Symbol]) -> Option<(Vec<Symbol>, Vec<Symbol>)>;
}

/// A code whose information words range over two books and whose parity
/// sequences are read from a table indexed by the book positions. Decoding
/// is an exhaustive bipartite joint-typicality search.
#[derive(Debug, Clone)]
pub struct TypicalSetCode {
    n_bp: usize,
    heads: TypicalBook,
    tails: TypicalBook,
    /// `(f * tails.len() + b) * n_bp ..`
    parity: Vec<Symbol>,
    test: JointTypicalityTest,
    /// Candidate-marginal surprisal of every codeword, same indexing as pairs.
    candidate: Vec<f64>,
    packed_heads: PackedWords,
    packed_tails: PackedWords,
    packed_parity: PackedWords,
}

impl TypicalSetCode {
    /// `parity` holds one `n_bp` word per pair, head-major.
    pub fn new(
        heads: TypicalBook,
        tails: TypicalBook,
        n_bp: usize,
        parity: Vec<Symbol>,
        test: JointTypicalityTest,
    ) -> Result<Self> {
        let pairs = heads.len() * tails.len();
        if pairs == 0 {
            return Err(Error::InvalidArgument("code books must be nonempty".into()));
        }
        if parity.len() != pairs * n_bp {
            return Err(Error::InvalidArgument(format!(
                "parity table has {} symbols, expected {pairs} x {n_bp}",
                parity.len()
            )));
        }
        let tail_s: Vec<f64> = tails.iter().map(|t| test.candidate_surprisal(&[], t)).collect();
        let mut candidate = Vec::with_capacity(pairs);
        for h in heads.iter() {
            let hs = test.candidate_surprisal(h, &[]);
            for ts in &tail_s {
                let k = candidate.len() * n_bp;
                candidate.push(hs + ts + test.candidate_surprisal(&[], &parity[k..k + n_bp]));
            }
        }
        let letters = |d: &[Symbol]| d.iter().map(|&x| x as usize + 1).max().unwrap_or(2);
        let k = letters(&heads.to_vecs().concat()).max(letters(&tails.to_vecs().concat())).max(letters(&parity));
        let packed_heads = PackedWords::new(&heads.to_vecs().concat(), heads.seq_len(), k);
        let packed_tails = PackedWords::new(&tails.to_vecs().concat(), tails.seq_len(), k);
        let packed_parity = PackedWords::new(&parity, n_bp, k);
        Ok(TypicalSetCode {
            n_bp,
            heads,
            tails,
            parity,
            test,
            candidate,
            packed_heads,
            packed_tails,
            packed_parity,
        })
    }

    /// Parity symbols drawn i.i.d. from `p`.
    pub fn random<R: Rng + ?Sized>(
        heads: TypicalBook,
        tails: TypicalBook,
        n_bp: usize,
        p: &Pmf,
        test: JointTypicalityTest,
        rng: &mut R,
    ) -> Result<Self> {
        let len = heads.len() * tails.len() * n_bp;
        let parity = (0..len).map(|_| draw_symbol(p.probs(), rng)).collect();
        TypicalSetCode::new(heads, tails, n_bp, parity, test)
    }

    /// Deterministic repetition parity: symbol `j` repeats symbol
    /// `j mod n_bi` of the tail, or of the head when the tail is empty.
    pub fn repetition(heads: TypicalBook, tails: TypicalBook, n_bp: usize, test: JointTypicalityTest) -> Result<Self> {
        let mut parity = Vec::with_capacity(heads.len() * tails.len() * n_bp);
        for h in heads.iter() {
            for t in tails.iter() {
                let src = if t.is_empty() { h } else { t };
                if src.is_empty() && n_bp > 0 {
                    return Err(Error::InvalidArgument("repetition parity needs a nonempty information word".into()));
                }
                parity.extend((0..n_bp).map(|j| src[j % src.len()]));
            }
        }
        TypicalSetCode::new(heads, tails, n_bp, parity, test)
    }

    pub fn heads(&self) -> &TypicalBook {
        &self.heads
    }

    pub fn tails(&self) -> &TypicalBook {
        &self.tails
    }

    pub fn test(&self) -> &JointTypicalityTest {
        &self.test
    }

    /// Packed head, tail and parity words for table-driven scoring.
    pub(crate) fn packed(&self) -> (&PackedWords, &PackedWords, &PackedWords) {
        (&self.packed_heads, &self.packed_tails, &self.packed_parity)
    }

    pub fn n_bp(&self) -> usize {
        self.n_bp
    }

    pub fn parity(&self, f: usize, b: usize) -> &[Symbol] {
        let k = (f * self.tails.len() + b) * self.n_bp;
        &self.parity[k..k + self.n_bp]
    }

    /// Encoding by book positions.
    pub fn encode_index(&self, f: usize, b: usize) -> Result<BipartiteWord> {
        self.check_index(f, b)?;
        let mut tail = self.tails.get(b).to_vec();
        tail.extend_from_slice(self.parity(f, b));
        Ok(BipartiteWord::new(self.heads.get(f).to_vec(), tail))
    }

    fn check_index(&self, f: usize, b: usize) -> Result<()> {
        if f >= self.heads.len() {
            return Err(Error::IndexOutOfRange { index: f, count: self.heads.len() });
        }
        if b >= self.tails.len() {
            return Err(Error::IndexOutOfRange { index: b, count: self.tails.len() });
        }
        Ok(())
    }

    /// Exhaustive scan over all book pairs; the unique passing pair, if any.
    pub fn decode_index(&self, x_f: &[Symbol], y_b: &[Symbol]) -> Option<(usize, usize)> {
        let (n_f, n_bi, n_bp) = self.lengths();
        if x_f.len() != n_f || y_b.len() != n_bi + n_bp {
            return None;
        }
        let d = n_bi + n_bp;
        let (y_info, y_par) = y_b.split_at(n_bi);
        let [wj, wf, ws] = self.test.windows(n_f, d);
        // windows only prune; the final decision is always `accepts`
        let margin = 1e-9 * (1.0 + wj.1.abs() + wf.1.abs() + ws.1.abs());
        let inside = |v: f64, w: (f64, f64)| v > w.0 - margin && v < w.1 + margin;
        let second = self.test.received_surprisal(x_f, y_b);
        if !second.is_finite() || !inside(second, ws) {
            return None;
        }
        let test = &self.test;
        let (nh, nt) = (self.heads.len(), self.tails.len());
        let head = self.packed_heads.scores(nh, |i, u| test.head_pair(u, x_f[i]));
        let info = self.packed_tails.scores(nt, |i, t| test.tail_pair(t, y_info[i]));
        let par = self.packed_parity.scores(nh * nt, |i, t| test.tail_pair(t, y_par[i]));
        let mut found = None;
        for (f, hj) in head.iter().enumerate() {
            if !hj.is_finite() {
                continue;
            }
            for (b, ij) in info.iter().enumerate() {
                let k = f * nt + b;
                let joint = hj + ij + par[k];
                if !joint.is_finite() || !inside(joint, wj) || !inside(self.candidate[k], wf) {
                    continue;
                }
                if test.accepts(SurprisalSums { joint, first: self.candidate[k], second }, n_f, d) {
                    if found.is_some() {
                        return None;
                    }
                    found = Some((f, b));
                }
            }
        }
        found
    }
}

impl SystematicCode for TypicalSetCode {
    fn lengths(&self) -> (usize, usize, usize) {
        (self.heads.seq_len(), self.tails.seq_len(), self.n_bp)
    }

    fn encode(&self, head: &[Symbol], tail: &[Symbol]) -> Result<BipartiteWord> {
        let f = self
            .heads
            .position(head)
            .ok_or_else(|| Error::InvalidArgument("head word is not in the head book".into()))?;
        let b = self
            .tails
            .position(tail)
            .ok_or_else(|| Error::InvalidArgument("tail word is not in the tail book".into()))?;
        self.encode_index(f, b)
    }

    fn decode(&self, x_f: &[Symbol], y_b: &[Symbol]) -> Option<(Vec<Symbol>, Vec<Symbol>)> {
        self.decode_index(x_f, y_b)
            .map(|(f, b)| (self.heads.get(f).to_vec(), self.tails.get(b).to_vec()))
    }
}
