//! Entropy-typical and bipartite (jointly) typical sequences, plus exact
//! enumeration of small typical sets.
//!
//! All membership tests use the strict bound `< epsilon`; a sequence that
//! contains a zero-probability symbol is never typical.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::probability::{entropy, JointPmf, Pmf, Symbol, ZERO_CUTOFF};

/// `-log2 P(seq)` under the i.i.d. law `p`, or `None` when a symbol has zero
/// probability or lies outside the alphabet.
pub fn sequence_surprisal(seq: &[Symbol], p: &Pmf) -> Option<f64> {
    let mut s = 0.0;
    for &x in seq {
        let q = *p.probs().get(x as usize)?;
        if q < ZERO_CUTOFF {
            return None;
        }
        s -= q.log2();
    }
    Some(s)
}

/// Classical entropy typicality `|-(1/n) log2 P(seq) - H(P)| < epsilon`.
pub fn is_typical(seq: &[Symbol], p: &Pmf, epsilon: f64) -> bool {
    if seq.is_empty() {
        return false;
    }
    match sequence_surprisal(seq, p) {
        Some(s) => (s / seq.len() as f64 - entropy(p)).abs() < epsilon,
        None => false,
    }
}

/// A sequence made of a head over one alphabet and a tail over another.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BipartiteWord {
    pub head: Vec<Symbol>,
    pub tail: Vec<Symbol>,
}

impl BipartiteWord {
    pub fn new(head: Vec<Symbol>, tail: Vec<Symbol>) -> Self {
        BipartiteWord { head, tail }
    }

    pub fn len(&self) -> usize {
        self.head.len() + self.tail.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Tolerance and segment lengths of a bipartite typicality test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TypicalityParams {
    pub epsilon: f64,
    pub n: usize,
    pub d: usize,
}

impl TypicalityParams {
    pub fn new(epsilon: f64, n: usize, d: usize) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
        }
        if n + d == 0 {
            return Err(Error::InvalidArgument("bipartite word must be nonempty".into()));
        }
        Ok(TypicalityParams { epsilon, n, d })
    }

    pub fn total(&self) -> usize {
        self.n + self.d
    }
}

/// Bipartite typicality: the averaged surprisal of the concatenation is
/// within `epsilon` of `(n H(U) + d H(T)) / N`.
pub fn is_bipartite_typical(w: &BipartiteWord, laws: (&Pmf, &Pmf), epsilon: f64) -> bool {
    let total = w.len();
    if total == 0 {
        return false;
    }
    let (Some(sh), Some(st)) = (sequence_surprisal(&w.head, laws.0), sequence_surprisal(&w.tail, laws.1))
    else {
        return false;
    };
    let target = w.head.len() as f64 * entropy(laws.0) + w.tail.len() as f64 * entropy(laws.1);
    ((sh + st - target) / total as f64).abs() < epsilon
}

/// Precomputed `-log2` tables and entropies for a pair of two-variable
/// joint laws, so that the joint typicality test costs one table lookup
/// per symbol.
#[derive(Debug, Clone)]
pub struct JointTypicalityTest {
    epsilon: f64,
    head: PairTable,
    tail: PairTable,
}

#[derive(Debug, Clone)]
struct PairTable {
    width: usize,
    joint: Vec<f64>,
    first: Vec<f64>,
    second: Vec<f64>,
    h_joint: f64,
    h_first: f64,
    h_second: f64,
}

fn neg_log(p: f64) -> f64 {
    if p < ZERO_CUTOFF {
        f64::INFINITY
    } else {
        -p.log2()
    }
}

impl PairTable {
    fn new(j: &JointPmf) -> Result<Self> {
        if j.num_vars() != 2 {
            return Err(Error::InvalidArgument("joint typicality needs two-variable laws".into()));
        }
        let a = j.marginalize(&[0])?.to_pmf()?;
        let b = j.marginalize(&[1])?.to_pmf()?;
        Ok(PairTable {
            width: b.size(),
            joint: j.probs().iter().map(|&p| neg_log(p)).collect(),
            first: a.probs().iter().map(|&p| neg_log(p)).collect(),
            second: b.probs().iter().map(|&p| neg_log(p)).collect(),
            h_joint: j.entropy_of(&[0, 1])?,
            h_first: entropy(&a),
            h_second: entropy(&b),
        })
    }

    fn pair(&self, u: Symbol, v: Symbol) -> f64 {
        let (u, v) = (u as usize, v as usize);
        if u >= self.first.len() || v >= self.width {
            return f64::INFINITY;
        }
        self.joint[u * self.width + v]
    }

    fn first(&self, u: Symbol) -> f64 {
        self.first.get(u as usize).copied().unwrap_or(f64::INFINITY)
    }

    fn second(&self, v: Symbol) -> f64 {
        self.second.get(v as usize).copied().unwrap_or(f64::INFINITY)
    }
}

/// Running surprisal sums for one candidate pair of bipartite words.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SurprisalSums {
    pub joint: f64,
    pub first: f64,
    pub second: f64,
}

impl std::ops::Add for SurprisalSums {
    type Output = SurprisalSums;
    fn add(self, o: SurprisalSums) -> SurprisalSums {
        SurprisalSums { joint: self.joint + o.joint, first: self.first + o.first, second: self.second + o.second }
    }
}

impl JointTypicalityTest {
    pub fn new(head_law: &JointPmf, tail_law: &JointPmf, epsilon: f64) -> Result<Self> {
        Ok(JointTypicalityTest { epsilon, head: PairTable::new(head_law)?, tail: PairTable::new(tail_law)? })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Surprisal sums of a head segment pair.
    pub fn head_sums(&self, u: &[Symbol], v: &[Symbol]) -> SurprisalSums {
        sums(&self.head, u, v)
    }

    /// Surprisal sums of a tail segment pair.
    pub fn tail_sums(&self, t: &[Symbol], s: &[Symbol]) -> SurprisalSums {
        sums(&self.tail, t, s)
    }

    /// `-log2 P(u, v)` of one head symbol pair.
    pub fn head_pair(&self, u: Symbol, v: Symbol) -> f64 {
        self.head.pair(u, v)
    }

    /// `-log2 P(t, s)` of one tail symbol pair.
    pub fn tail_pair(&self, t: Symbol, s: Symbol) -> f64 {
        self.tail.pair(t, s)
    }

    /// Surprisal of a candidate word under the first marginals of both laws.
    pub fn candidate_surprisal(&self, head: &[Symbol], tail: &[Symbol]) -> f64 {
        head.iter().map(|&a| self.head.first(a)).sum::<f64>() + tail.iter().map(|&a| self.tail.first(a)).sum::<f64>()
    }

    /// Surprisal of a received word under the second marginals of both laws.
    pub fn received_surprisal(&self, head: &[Symbol], tail: &[Symbol]) -> f64 {
        head.iter().map(|&a| self.head.second(a)).sum::<f64>() + tail.iter().map(|&a| self.tail.second(a)).sum::<f64>()
    }

    /// Joint surprisal of a head segment pair.
    pub fn head_joint(&self, u: &[Symbol], v: &[Symbol]) -> f64 {
        u.iter().zip(v).map(|(&a, &b)| self.head.pair(a, b)).sum()
    }

    /// Joint surprisal of a tail segment pair.
    pub fn tail_joint(&self, t: &[Symbol], s: &[Symbol]) -> f64 {
        t.iter().zip(s).map(|(&a, &b)| self.tail.pair(a, b)).sum()
    }

    /// Acceptance window `(lo, hi)` for each of the three sums
    /// `(joint, first, second)` at lengths `(n, d)`; a sum passes iff it
    /// lies strictly inside its window.
    pub fn windows(&self, n: usize, d: usize) -> [(f64, f64); 3] {
        let slack = (n + d) as f64 * self.epsilon;
        let (nf, df) = (n as f64, d as f64);
        let w = |h_head: f64, h_tail: f64| {
            let c = nf * h_head + df * h_tail;
            (c - slack, c + slack)
        };
        [
            w(self.head.h_joint, self.tail.h_joint),
            w(self.head.h_first, self.tail.h_first),
            w(self.head.h_second, self.tail.h_second),
        ]
    }

    /// Smallest and largest joint surprisal a single tail symbol pair can add.
    pub fn tail_joint_range(&self) -> (f64, f64) {
        let finite = self.tail.joint.iter().copied().filter(|v| v.is_finite());
        let lo = finite.clone().fold(f64::INFINITY, f64::min);
        let hi = finite.fold(0.0, f64::max);
        (lo.min(hi), hi)
    }

    /// Applies the three conditions to completed sums for lengths `(n, d)`.
    pub fn accepts(&self, s: SurprisalSums, n: usize, d: usize) -> bool {
        let total = (n + d) as f64;
        if total == 0.0 {
            return false;
        }
        let (nf, df) = (n as f64, d as f64);
        let within = |sum: f64, h_head: f64, h_tail: f64| {
            sum.is_finite() && ((sum - nf * h_head - df * h_tail) / total).abs() < self.epsilon
        };
        within(s.first, self.head.h_first, self.tail.h_first)
            && within(s.second, self.head.h_second, self.tail.h_second)
            && within(s.joint, self.head.h_joint, self.tail.h_joint)
    }

    /// Full test on a word pair.
    pub fn check(&self, x: &BipartiteWord, y: &BipartiteWord) -> Result<bool> {
        if x.head.len() != y.head.len() || x.tail.len() != y.tail.len() {
            return Err(Error::InvalidArgument(format!(
                "segment lengths differ: ({}, {}) vs ({}, {})",
                x.head.len(),
                x.tail.len(),
                y.head.len(),
                y.tail.len()
            )));
        }
        let s = self.head_sums(&x.head, &y.head) + self.tail_sums(&x.tail, &y.tail);
        Ok(self.accepts(s, x.head.len(), x.tail.len()))
    }

    /// Joint surprisal gap `|-(1/N) log P - (n H + d H)/N|`, for diagnostics.
    pub fn joint_gap(&self, s: SurprisalSums, n: usize, d: usize) -> f64 {
        let total = (n + d) as f64;
        ((s.joint - n as f64 * self.head.h_joint - d as f64 * self.tail.h_joint) / total).abs()
    }
}

fn sums(t: &PairTable, u: &[Symbol], v: &[Symbol]) -> SurprisalSums {
    let mut s = SurprisalSums::default();
    for (&a, &b) in u.iter().zip(v) {
        s.joint += t.pair(a, b);
        s.first += t.first(a);
        s.second += t.second(b);
    }
    s
}

/// Bipartite joint typicality of `(x, y)` with respect to the head law
/// `P_{U,U'}` and tail law `P_{T,T'}`: both words are bipartite typical for
/// their marginals and the joint surprisal is within `epsilon`.
pub fn is_bipartite_jointly_typical(
    pair: (&BipartiteWord, &BipartiteWord),
    laws: (&JointPmf, &JointPmf),
    epsilon: f64,
) -> Result<bool> {
    JointTypicalityTest::new(laws.0, laws.1, epsilon)?.check(pair.0, pair.1)
}

/// Fixed-length sequences stored contiguously.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypicalBook {
    n: usize,
    data: Vec<Symbol>,
    count: usize,
}

impl TypicalBook {
    pub fn from_sequences(n: usize, seqs: &[Vec<Symbol>]) -> Result<Self> {
        let mut data = Vec::with_capacity(n * seqs.len());
        for s in seqs {
            if s.len() != n {
                return Err(Error::InvalidArgument(format!("sequence of length {} in a book of length {n}", s.len())));
            }
            data.extend_from_slice(s);
        }
        Ok(TypicalBook { n, data, count: seqs.len() })
    }

    /// Sequence length.
    pub fn seq_len(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn get(&self, i: usize) -> &[Symbol] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[Symbol]> + '_ {
        (0..self.count).map(move |i| self.get(i))
    }

    pub fn to_vecs(&self) -> Vec<Vec<Symbol>> {
        self.iter().map(<[Symbol]>::to_vec).collect()
    }

    /// Index of `seq` in a lexicographically sorted book.
    pub fn position_sorted(&self, seq: &[Symbol]) -> Option<usize> {
        let (mut lo, mut hi) = (0, self.count);
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.get(mid).cmp(seq) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    /// First index holding `seq`, by linear scan.
    pub fn position(&self, seq: &[Symbol]) -> Option<usize> {
        self.iter().position(|s| s == seq)
    }

    fn select(&self, picks: impl IntoIterator<Item = usize>) -> TypicalBook {
        let mut data = Vec::new();
        let mut count = 0;
        for i in picks {
            data.extend_from_slice(self.get(i));
            count += 1;
        }
        TypicalBook { n: self.n, data, count }
    }
}

/// Checks `|alphabet|^n` against the enumeration guard.
fn check_space(alphabet: usize, n: usize) -> Result<()> {
    let bits = n as f64 * (alphabet as f64).log2();
    let limit = crate::guard_bits();
    if bits > limit as f64 + 1e-9 {
        return Err(Error::GuardExceeded(format!(
            "enumerating {alphabet}^{n} sequences exceeds 2^{limit}"
        )));
    }
    Ok(())
}

/// Every `epsilon`-typical `n`-sequence for `p`, in lexicographic order.
/// For `n = 0` the book holds the single empty word.
pub fn enumerate_typical(p: &Pmf, n: usize, epsilon: f64) -> Result<TypicalBook> {
    let k = p.size();
    check_space(k, n)?;
    let weights: Vec<f64> = p.probs().iter().map(|&q| neg_log(q)).collect();
    let h = entropy(p);
    let mut data = Vec::new();
    let mut count = 0;
    if n == 0 {
        // the empty word is the only sequence of length zero
        return Ok(TypicalBook { n, data, count: 1 });
    }
    let mut seq = vec![0 as Symbol; n];
    let mut counts = vec![0usize; k];
    counts[0] = n;
    loop {
        let s: f64 = counts.iter().zip(&weights).filter(|(c, _)| **c > 0).map(|(c, w)| *c as f64 * w).sum();
        if s.is_finite() && (s / n as f64 - h).abs() < epsilon {
            data.extend_from_slice(&seq);
            count += 1;
        }
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(TypicalBook { n, data, count });
            }
            i -= 1;
            counts[seq[i] as usize] -= 1;
            if (seq[i] as usize) + 1 < k {
                seq[i] += 1;
                counts[seq[i] as usize] += 1;
                break;
            }
            seq[i] = 0;
            counts[0] += 1;
        }
    }
}

/// How a book is drawn from the typical set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BookMode {
    /// Independent uniform draws; repeats allowed.
    WithReplacement,
    /// A uniformly random subset of distinct sequences.
    Distinct,
}

/// Draws `count` typical sequences from the typical set of `p`.
pub fn sample_typical_book<R: Rng + ?Sized>(
    p: &Pmf,
    n: usize,
    epsilon: f64,
    count: usize,
    mode: BookMode,
    rng: &mut R,
) -> Result<TypicalBook> {
    let all = enumerate_typical(p, n, epsilon)?;
    sample_from_typical_set(&all, count, mode, rng)
}

/// Like [`sample_typical_book`] with the typical set already enumerated.
pub fn sample_from_typical_set<R: Rng + ?Sized>(
    all: &TypicalBook,
    count: usize,
    mode: BookMode,
    rng: &mut R,
) -> Result<TypicalBook> {
    if count == 0 {
        return Ok(all.select(std::iter::empty()));
    }
    if all.is_empty() {
        return Err(Error::Infeasible("typical set is empty".into()));
    }
    match mode {
        BookMode::WithReplacement => {
            let picks: Vec<usize> = (0..count).map(|_| rng.random_range(0..all.len())).collect();
            Ok(all.select(picks))
        }
        BookMode::Distinct => {
            if count > all.len() {
                return Err(Error::Infeasible(format!(
                    "{count} distinct sequences requested from a typical set of {}",
                    all.len()
                )));
            }
            Ok(all.select(index::sample(rng, all.len(), count).into_iter()))
        }
    }
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// Exact probability mass of the typical set, summed over type classes.
pub fn typical_set_mass(p: &Pmf, n: usize, epsilon: f64) -> f64 {
    let k = p.size();
    let h = entropy(p);
    let ln_n = ln_factorial(n);
    let ln_fact: Vec<f64> = (0..=n).map(ln_factorial).collect();
    let mut total = 0.0;
    let mut counts = vec![0usize; k];
    // enumerate compositions of n into k parts
    fn walk(
        i: usize,
        left: usize,
        counts: &mut Vec<usize>,
        f: &mut dyn FnMut(&[usize]),
    ) {
        if i + 1 == counts.len() {
            counts[i] = left;
            f(counts);
            return;
        }
        for c in 0..=left {
            counts[i] = c;
            walk(i + 1, left - c, counts, f);
        }
    }
    walk(0, n, &mut counts, &mut |c| {
        let mut surprisal = 0.0;
        let mut ln_p = ln_n;
        for (a, &m) in c.iter().enumerate() {
            if m == 0 {
                continue;
            }
            let q = p.prob(a);
            if q < ZERO_CUTOFF {
                return;
            }
            surprisal -= m as f64 * q.log2();
            ln_p += m as f64 * q.ln() - ln_fact[m];
        }
        if (surprisal / n as f64 - h).abs() < epsilon {
            total += ln_p.exp();
        }
    });
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probability::{compose_markov, ConditionalPmf, Factor};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn all_sequences(k: usize, n: usize) -> Vec<Vec<Symbol>> {
        (0..k.pow(n as u32))
            .map(|mut i| {
                let mut s = vec![0; n];
                for j in (0..n).rev() {
                    s[j] = (i % k) as Symbol;
                    i /= k;
                }
                s
            })
            .collect()
    }

    fn brute_surprisal(seq: &[Symbol], p: &Pmf) -> f64 {
        -seq.iter().map(|&x| p.prob(x as usize)).product::<f64>().log2()
    }

    #[test]
    fn typical_examples() {
        let point = Pmf::point_mass(2, 1).unwrap();
        for eps in [1e-9, 0.1, 1.0] {
            assert!(is_typical(&[1, 1, 1, 1], &point, eps));
            assert!(!is_typical(&[1, 0, 1, 1], &point, eps));
        }
        let uniform = Pmf::uniform(2).unwrap();
        for s in all_sequences(2, 6) {
            assert!(is_typical(&s, &uniform, 1e-9));
        }
        let b = Pmf::bernoulli(0.3).unwrap();
        let h = entropy(&b);
        for s in all_sequences(2, 10) {
            let ones = s.iter().filter(|&&x| x == 1).count();
            let brute = (brute_surprisal(&s, &b) / 10.0 - h).abs() < 0.1;
            assert_eq!(is_typical(&s, &b, 0.1), brute);
            assert_eq!(brute, ones == 3, "{ones} ones");
        }
    }

    #[test]
    fn bipartite_typical_examples() {
        let u = Pmf::uniform(2).unwrap();
        for s in all_sequences(2, 5) {
            let w = BipartiteWord::new(s[..2].to_vec(), s[2..].to_vec());
            assert!(is_bipartite_typical(&w, (&u, &u), 1e-9));
        }
        let b = Pmf::bernoulli(0.3).unwrap();
        for s in all_sequences(2, 8) {
            let w = BipartiteWord::new(s.clone(), vec![]);
            assert_eq!(is_bipartite_typical(&w, (&b, &u), 0.1), is_typical(&s, &b, 0.1));
        }
        let head = Pmf::bernoulli(0.25).unwrap();
        let target = (4.0 * entropy(&head) + 4.0) / 8.0;
        let mut accepted = 0;
        for s in all_sequences(2, 8) {
            let w = BipartiteWord::new(s[..4].to_vec(), s[4..].to_vec());
            let brute = brute_surprisal(&s[..4], &head) + brute_surprisal(&s[4..], &u);
            let expected = (brute / 8.0 - target).abs() < 0.15;
            assert_eq!(is_bipartite_typical(&w, (&head, &u), 0.15), expected);
            accepted += expected as usize;
        }
        assert!(accepted > 0 && accepted < 256);
    }

    fn correlated(p: f64) -> JointPmf {
        compose_markov(&[Factor::root(Pmf::uniform(2).unwrap()), Factor::channel(&[0], ConditionalPmf::bsc(p).unwrap())])
            .unwrap()
    }

    #[test]
    fn jointly_typical_identity_law() {
        let id = correlated(0.0);
        let w = BipartiteWord::new(vec![0, 1, 1], vec![1, 0]);
        assert!(is_bipartite_jointly_typical((&w, &w), (&id, &id), 1e-9).unwrap());
        let other = BipartiteWord::new(vec![0, 1, 0], vec![1, 0]);
        assert!(!is_bipartite_jointly_typical((&w, &other), (&id, &id), 0.5).unwrap());
    }

    #[test]
    fn jointly_typical_independent_law() {
        // product of a skewed and a uniform marginal
        let skew = Pmf::bernoulli(0.2).unwrap();
        let law = compose_markov(&[Factor::root(skew.clone()), Factor::root(Pmf::uniform(2).unwrap())]).unwrap();
        let eps = 0.3;
        let h = entropy(&skew);
        for s in all_sequences(2, 6) {
            let x = BipartiteWord::new(s[..3].to_vec(), s[3..].to_vec());
            let y = BipartiteWord::new(vec![1, 0, 1], vec![0, 1, 1]);
            let gap = brute_surprisal(&s, &skew) / 6.0 - h;
            let marginal_ok = gap.abs() < eps;
            let joint = is_bipartite_jointly_typical((&x, &y), (&law, &law), eps).unwrap();
            // the uniform side contributes no gap, so joint == marginal
            assert_eq!(joint, marginal_ok);
        }
    }

    #[test]
    fn jointly_typical_matches_direct_evaluation() {
        let law = correlated(0.1);
        let eps = 0.2;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pxy = |a: Symbol, b: Symbol| law.prob(&[a as usize, b as usize]);
        let hj = law.entropy_of(&[0, 1]).unwrap();
        let mut seen = [0usize; 2];
        for _ in 0..2000 {
            let x: Vec<Symbol> = (0..12).map(|_| rng.random_range(0..2)).collect();
            let y: Vec<Symbol> = x.iter().map(|&b| if rng.random_bool(0.15) { 1 - b } else { b }).collect();
            let wx = BipartiteWord::new(x[..6].to_vec(), x[6..].to_vec());
            let wy = BipartiteWord::new(y[..6].to_vec(), y[6..].to_vec());
            let joint: f64 = x.iter().zip(&y).map(|(&a, &b)| -pxy(a, b).log2()).sum();
            // uniform marginals are always typical
            let expected = (joint / 12.0 - hj).abs() < eps;
            let got = is_bipartite_jointly_typical((&wx, &wy), (&law, &law), eps).unwrap();
            assert_eq!(got, expected);
            seen[got as usize] += 1;
        }
        assert!(seen[0] > 0 && seen[1] > 0);
        let short = BipartiteWord::new(vec![0; 5], vec![0; 6]);
        let full = BipartiteWord::new(vec![0; 6], vec![0; 6]);
        assert!(is_bipartite_jointly_typical((&short, &full), (&law, &law), eps).is_err());
    }

    #[test]
    fn joint_implies_marginal() {
        let law = correlated(0.3);
        let skew = compose_markov(&[
            Factor::root(Pmf::bernoulli(0.3).unwrap()),
            Factor::channel(&[0], ConditionalPmf::bsc(0.2).unwrap()),
        ])
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let pu = skew.marginalize(&[0]).unwrap().to_pmf().unwrap();
        let pv = skew.marginalize(&[1]).unwrap().to_pmf().unwrap();
        let half = Pmf::uniform(2).unwrap();
        for _ in 0..3000 {
            let g = |rng: &mut ChaCha8Rng, n| (0..n).map(|_| rng.random_range(0..2)).collect::<Vec<Symbol>>();
            let x = BipartiteWord::new(g(&mut rng, 5), g(&mut rng, 4));
            let y = BipartiteWord::new(g(&mut rng, 5), g(&mut rng, 4));
            if is_bipartite_jointly_typical((&x, &y), (&skew, &law), 0.25).unwrap() {
                assert!(is_bipartite_typical(&x, (&pu, &half), 0.25));
                assert!(is_bipartite_typical(&y, (&pv, &half), 0.25));
            }
        }
    }

    #[test]
    fn enumeration_examples() {
        let point = Pmf::point_mass(3, 2).unwrap();
        let book = enumerate_typical(&point, 5, 0.01).unwrap();
        assert_eq!(book.to_vecs(), vec![vec![2; 5]]);
        let book = enumerate_typical(&Pmf::uniform(2).unwrap(), 7, 0.01).unwrap();
        assert_eq!(book.len(), 128);
        assert_eq!(book.to_vecs(), all_sequences(2, 7));

        // binomial-coefficient count of the qualifying compositions
        let b = Pmf::bernoulli(0.3).unwrap();
        let h = entropy(&b);
        let expected: usize = (0..=12usize)
            .filter(|&k| {
                let s = -(k as f64) * 0.3f64.log2() - (12 - k) as f64 * 0.7f64.log2();
                (s / 12.0 - h).abs() < 0.1
            })
            .map(|k| (0..k).fold(1usize, |acc, i| acc * (12 - i) / (i + 1)))
            .sum();
        assert_eq!(enumerate_typical(&b, 12, 0.1).unwrap().len(), expected);
    }

    #[test]
    fn enumeration_is_complete_and_sorted() {
        let p = Pmf::from_probs(vec![0.5, 0.3, 0.2]).unwrap();
        for n in 1..=7 {
            let book = enumerate_typical(&p, n, 0.15).unwrap().to_vecs();
            let brute: Vec<Vec<Symbol>> =
                all_sequences(3, n).into_iter().filter(|s| is_typical(s, &p, 0.15)).collect();
            assert_eq!(book, brute);
        }
    }

    #[test]
    fn enumeration_guard() {
        let p = Pmf::uniform(4).unwrap();
        assert!(matches!(enumerate_typical(&p, 13, 0.1), Err(Error::GuardExceeded(_))));
    }

    #[test]
    fn book_sampling() {
        let p = Pmf::uniform(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let one = sample_typical_book(&p, 5, 0.1, 1, BookMode::WithReplacement, &mut rng).unwrap();
        assert_eq!(one.len(), 1);
        assert!(is_typical(one.get(0), &p, 0.1));

        let all = enumerate_typical(&p, 5, 0.1).unwrap();
        let perm = sample_typical_book(&p, 5, 0.1, 32, BookMode::Distinct, &mut rng).unwrap();
        let mut sorted = perm.to_vecs();
        sorted.sort();
        assert_eq!(sorted, all.to_vecs());
        assert!(sample_typical_book(&p, 5, 0.1, 33, BookMode::Distinct, &mut rng).is_err());

        let a = sample_typical_book(&p, 6, 0.1, 10, BookMode::WithReplacement, &mut ChaCha8Rng::seed_from_u64(8)).unwrap();
        let b = sample_typical_book(&p, 6, 0.1, 10, BookMode::WithReplacement, &mut ChaCha8Rng::seed_from_u64(8)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sorted_lookup() {
        let book = enumerate_typical(&Pmf::uniform(3).unwrap(), 4, 0.1).unwrap();
        for (i, s) in book.iter().enumerate() {
            assert_eq!(book.position_sorted(s), Some(i));
        }
        assert_eq!(book.position_sorted(&[3, 0, 0, 0]), None);
    }

    #[test]
    fn typical_mass_matches_enumeration() {
        let b = Pmf::bernoulli(0.3).unwrap();
        let book = enumerate_typical(&b, 12, 0.1).unwrap();
        let direct: f64 = book.iter().map(|s| 2f64.powf(-brute_surprisal(s, &b))).sum();
        assert!((typical_set_mass(&b, 12, 0.1) - direct).abs() < 1e-12);
    }
}
