//! Exact finite-alphabet distributions and information measures.
//!
//! Every quantity is computed in bits from dense probability tables. Joint
//! laws are stored row-major with the last variable varying fastest, which
//! keeps marginalization and Markov composition simple index arithmetic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A symbol of a finite alphabet. Alphabets never exceed [`MAX_ALPHABET`]
/// symbols, so a byte is always enough.
pub type Symbol = u8;

/// Largest alphabet accepted by [`Alphabet::new`].
pub const MAX_ALPHABET: usize = 16;

/// Largest number of cells a [`JointPmf`] may hold.
pub const MAX_JOINT_CELLS: usize = 1 << 20;

/// Mass drift accepted as-is at construction.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Mass drift that is silently renormalized; anything larger is rejected.
pub const RENORMALIZE_LIMIT: f64 = 1e-9;

/// Probabilities below this are exact zeros as far as logarithms go.
pub const ZERO_CUTOFF: f64 = 1e-15;

/// Size (and optional symbol names) of a finite alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl Alphabet {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 || size > MAX_ALPHABET {
            return Err(Error::InvalidArgument(format!(
                "alphabet size must be in 1..={MAX_ALPHABET}, got {size}"
            )));
        }
        Ok(Alphabet { size, labels: None })
    }

    pub fn with_labels<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let mut alphabet = Alphabet::new(labels.len())?;
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::InvalidArgument(format!("duplicate symbol label {l:?}")));
            }
        }
        alphabet.labels = Some(labels);
        Ok(alphabet)
    }

    pub fn binary() -> Self {
        Alphabet { size: 2, labels: None }
    }

    /// The alphabet of pairs `(a, b)`, indexed `a * |b| + b`. Product
    /// alphabets may exceed [`MAX_ALPHABET`].
    pub fn product(a: &Alphabet, b: &Alphabet) -> Self {
        Alphabet { size: a.size * b.size, labels: None }
    }

    pub(crate) fn unchecked(size: usize) -> Self {
        Alphabet { size, labels: None }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }
}

fn normalized(mut probs: Vec<f64>) -> Result<Vec<f64>> {
    if probs.is_empty() {
        return Err(Error::InvalidDistribution("empty probability vector".into()));
    }
    if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(Error::InvalidDistribution(format!("entry {p} is not a probability")));
    }
    let total: f64 = probs.iter().sum();
    let drift = (total - 1.0).abs();
    if drift > RENORMALIZE_LIMIT {
        return Err(Error::InvalidDistribution(format!("mass {total} differs from 1")));
    }
    if drift > NORMALIZATION_TOLERANCE {
        probs.iter_mut().for_each(|p| *p /= total);
    }
    Ok(probs)
}

/// `-p log2 p` with the convention `0 log 0 = 0`.
#[inline]
pub fn surprisal_term(p: f64) -> f64 {
    if p < ZERO_CUTOFF {
        0.0
    } else {
        -p * p.log2()
    }
}

/// Binary entropy function in bits.
pub fn binary_entropy(p: f64) -> f64 {
    surprisal_term(p) + surprisal_term(1.0 - p)
}

/// A probability mass function on one alphabet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pmf {
    alphabet: Alphabet,
    probs: Vec<f64>,
}

impl Pmf {
    pub fn new(alphabet: Alphabet, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != alphabet.size() {
            return Err(Error::AlphabetMismatch(format!(
                "{} probabilities for an alphabet of size {}",
                probs.len(),
                alphabet.size()
            )));
        }
        Ok(Pmf { alphabet, probs: normalized(probs)? })
    }

    /// A pmf over an unlabeled alphabet of `probs.len()` symbols.
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        let alphabet = Alphabet::new(probs.len())?;
        Pmf::new(alphabet, probs)
    }

    pub fn uniform(size: usize) -> Result<Self> {
        Pmf::from_probs(vec![1.0 / size.max(1) as f64; size])
    }

    pub fn point_mass(size: usize, symbol: usize) -> Result<Self> {
        if symbol >= size {
            return Err(Error::SymbolOutOfRange { symbol, size });
        }
        let mut probs = vec![0.0; size];
        probs[symbol] = 1.0;
        Pmf::from_probs(probs)
    }

    /// Law of a binary variable that equals 1 with probability `p`.
    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidDistribution(format!("bernoulli parameter {p}")));
        }
        Pmf::from_probs(vec![1.0 - p, p])
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn size(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, symbol: usize) -> f64 {
        self.probs[symbol]
    }
}

/// A channel: one pmf over `output` for every symbol of `input`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalPmf {
    input: Alphabet,
    output: Alphabet,
    rows: Vec<Pmf>,
}

impl ConditionalPmf {
    pub fn new(input: Alphabet, output: Alphabet, rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.len() != input.size() {
            return Err(Error::AlphabetMismatch(format!(
                "{} rows for an input alphabet of size {}",
                rows.len(),
                input.size()
            )));
        }
        let rows = rows
            .into_iter()
            .enumerate()
            .map(|(x, r)| {
                if r.len() != output.size() {
                    return Err(Error::AlphabetMismatch(format!(
                        "row {x} has {} entries, output alphabet has {}",
                        r.len(),
                        output.size()
                    )));
                }
                Ok(Pmf { alphabet: output.clone(), probs: normalized(r)? })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ConditionalPmf { input, output, rows })
    }

    /// A channel between unlabeled alphabets sized by the row table.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let input = Alphabet::new(rows.len())?;
        let width = rows.first().map_or(0, Vec::len);
        let output = Alphabet::new(width)?;
        ConditionalPmf::new(input, output, rows)
    }

    /// Like [`ConditionalPmf::new`] but with a product-sized output alphabet.
    pub(crate) fn with_output(input: Alphabet, output: Alphabet, rows: Vec<Vec<f64>>) -> Result<Self> {
        ConditionalPmf::new(input, output, rows)
    }

    pub fn identity(size: usize) -> Result<Self> {
        ConditionalPmf::from_rows(
            (0..size)
                .map(|x| (0..size).map(|y| if x == y { 1.0 } else { 0.0 }).collect())
                .collect(),
        )
    }

    /// Binary symmetric channel with crossover probability `p`.
    pub fn bsc(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidDistribution(format!("crossover {p}")));
        }
        ConditionalPmf::from_rows(vec![vec![1.0 - p, p], vec![p, 1.0 - p]])
    }

    /// Binary erasure channel; output symbol 2 is the erasure.
    pub fn bec(erasure: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&erasure) {
            return Err(Error::InvalidDistribution(format!("erasure probability {erasure}")));
        }
        ConditionalPmf::from_rows(vec![
            vec![1.0 - erasure, 0.0, erasure],
            vec![0.0, 1.0 - erasure, erasure],
        ])
    }

    /// Every input maps to the same output law.
    pub fn constant(input_size: usize, output: &Pmf) -> Result<Self> {
        ConditionalPmf::new(
            Alphabet::new(input_size)?,
            output.alphabet().clone(),
            vec![output.probs().to_vec(); input_size],
        )
    }

    pub fn input(&self) -> &Alphabet {
        &self.input
    }

    pub fn output(&self) -> &Alphabet {
        &self.output
    }

    pub fn rows(&self) -> &[Pmf] {
        &self.rows
    }

    pub fn row(&self, x: usize) -> &[f64] {
        self.rows[x].probs()
    }

    pub fn prob(&self, x: usize, y: usize) -> f64 {
        self.rows[x].probs[y]
    }

    /// Channel cascade `self` then `next`.
    pub fn then(&self, next: &ConditionalPmf) -> Result<ConditionalPmf> {
        if self.output.size() != next.input.size() {
            return Err(Error::AlphabetMismatch(format!(
                "cascade of output size {} into input size {}",
                self.output.size(),
                next.input.size()
            )));
        }
        let rows = self
            .rows
            .iter()
            .map(|r| {
                (0..next.output.size())
                    .map(|z| r.probs.iter().enumerate().map(|(y, p)| p * next.prob(y, z)).sum())
                    .collect()
            })
            .collect();
        ConditionalPmf::new(self.input.clone(), next.output.clone(), rows)
    }

    /// Output law when the input is distributed as `input`.
    pub fn push_forward(&self, input: &Pmf) -> Result<Pmf> {
        if input.size() != self.input.size() {
            return Err(Error::AlphabetMismatch("input law does not match channel input".into()));
        }
        let mut out = vec![0.0; self.output.size()];
        for (x, px) in input.probs().iter().enumerate() {
            for (o, q) in out.iter_mut().zip(self.row(x)) {
                *o += px * q;
            }
        }
        Pmf::new(self.output.clone(), out)
    }
}

/// A joint law over 1–8 finite variables, stored densely.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointPmf {
    alphabets: Vec<Alphabet>,
    probs: Vec<f64>,
}

fn cell_count(alphabets: &[Alphabet]) -> Result<usize> {
    alphabets.iter().try_fold(1usize, |acc, a| {
        acc.checked_mul(a.size())
            .filter(|n| *n <= MAX_JOINT_CELLS)
            .ok_or_else(|| Error::GuardExceeded(format!("joint law exceeds {MAX_JOINT_CELLS} cells")))
    })
}

fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1; shape.len()];
    for i in (0..shape.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * shape[i + 1];
    }
    s
}

impl JointPmf {
    pub fn new(alphabets: Vec<Alphabet>, probs: Vec<f64>) -> Result<Self> {
        if alphabets.is_empty() || alphabets.len() > 8 {
            return Err(Error::InvalidArgument(format!(
                "joint laws hold 1 to 8 variables, got {}",
                alphabets.len()
            )));
        }
        let cells = cell_count(&alphabets)?;
        if probs.len() != cells {
            return Err(Error::AlphabetMismatch(format!(
                "{} cells supplied for a tensor of {cells}",
                probs.len()
            )));
        }
        Ok(JointPmf { alphabets, probs: normalized(probs)? })
    }

    pub fn from_pmf(p: &Pmf) -> Self {
        JointPmf { alphabets: vec![p.alphabet().clone()], probs: p.probs().to_vec() }
    }

    /// Joint law of `(X, Y)` with `X ~ input` and `Y | X ~ channel`.
    pub fn from_channel(input: &Pmf, channel: &ConditionalPmf) -> Result<Self> {
        compose_markov(&[Factor::root(input.clone()), Factor::channel(&[0], channel.clone())])
    }

    pub fn num_vars(&self) -> usize {
        self.alphabets.len()
    }

    pub fn alphabets(&self) -> &[Alphabet] {
        &self.alphabets
    }

    pub fn shape(&self) -> Vec<usize> {
        self.alphabets.iter().map(Alphabet::size).collect()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, index: &[usize]) -> f64 {
        let shape = self.shape();
        let flat = index
            .iter()
            .zip(strides(&shape))
            .map(|(i, s)| i * s)
            .sum::<usize>();
        self.probs[flat]
    }

    fn check_index(&self, index: usize) -> Result<()> {
        if index >= self.num_vars() {
            Err(Error::IndexOutOfRange { index, count: self.num_vars() })
        } else {
            Ok(())
        }
    }

    /// Sums out every variable not in `keep`; kept variables appear in the
    /// order given.
    pub fn marginalize(&self, keep: &[usize]) -> Result<JointPmf> {
        if keep.is_empty() {
            return Err(Error::InvalidArgument("marginalization must keep at least one variable".into()));
        }
        for (i, &k) in keep.iter().enumerate() {
            self.check_index(k)?;
            if keep[..i].contains(&k) {
                return Err(Error::InvalidArgument(format!("variable {k} kept twice")));
            }
        }
        let probs = self.marginal_table(keep);
        Ok(JointPmf {
            alphabets: keep.iter().map(|&k| self.alphabets[k].clone()).collect(),
            probs,
        })
    }

    /// Marginal table over `keep` (indices already validated, may be empty).
    fn marginal_table(&self, keep: &[usize]) -> Vec<f64> {
        let shape = self.shape();
        let out_shape: Vec<usize> = keep.iter().map(|&k| shape[k]).collect();
        let out_strides = strides(&out_shape);
        // stride contributed by each source variable to the output index
        let mut contrib = vec![0usize; shape.len()];
        for (pos, &k) in keep.iter().enumerate() {
            contrib[k] = out_strides[pos];
        }
        let mut out = vec![0.0; out_shape.iter().product()];
        let mut digits = vec![0usize; shape.len()];
        let mut target = 0usize;
        for &p in &self.probs {
            out[target] += p;
            // odometer increment, last variable fastest
            for v in (0..shape.len()).rev() {
                digits[v] += 1;
                target += contrib[v];
                if digits[v] < shape[v] {
                    break;
                }
                target -= contrib[v] * shape[v];
                digits[v] = 0;
            }
        }
        out
    }

    /// Entropy of the sub-vector `vars` (zero for the empty set).
    pub fn entropy_of(&self, vars: &[usize]) -> Result<f64> {
        if vars.is_empty() {
            return Ok(0.0);
        }
        for &v in vars {
            self.check_index(v)?;
        }
        let mut sorted = vars.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        Ok(self.marginal_table(&sorted).into_iter().map(surprisal_term).sum())
    }

    /// The single-variable law, if this joint has exactly one variable.
    pub fn to_pmf(&self) -> Result<Pmf> {
        if self.num_vars() != 1 {
            return Err(Error::InvalidArgument("law has more than one variable".into()));
        }
        Pmf::new(self.alphabets[0].clone(), self.probs.clone())
    }
}

/// Shannon entropy in bits.
pub fn entropy(p: &Pmf) -> f64 {
    p.probs().iter().copied().map(surprisal_term).sum()
}

/// `I(A;B)` between two variables of a joint law.
pub fn mutual_information(j: &JointPmf, vars: (usize, usize)) -> Result<f64> {
    let (a, b) = vars;
    if a == b {
        j.check_index(a)?;
        return Err(Error::InvalidArgument("mutual information needs two distinct variables".into()));
    }
    mutual_information_sets(j, &[a], &[b], &[])
}

/// `I(A;B|C)` between three distinct variables.
pub fn conditional_mutual_information(j: &JointPmf, a: usize, b: usize, c: usize) -> Result<f64> {
    if a == b || a == c || b == c {
        return Err(Error::InvalidArgument("conditional mutual information needs three distinct variables".into()));
    }
    mutual_information_sets(j, &[a], &[b], &[c])
}

/// `I(A;B|C)` for disjoint variable groups; `given` may be empty.
pub fn mutual_information_sets(j: &JointPmf, a: &[usize], b: &[usize], given: &[usize]) -> Result<f64> {
    let join = |x: &[usize], y: &[usize]| -> Vec<usize> { x.iter().chain(y).copied().collect() };
    let ac = join(a, given);
    let bc = join(b, given);
    let abc = join(&ac, b);
    Ok(j.entropy_of(&ac)? + j.entropy_of(&bc)? - j.entropy_of(&abc)? - j.entropy_of(given)?)
}

/// `H(A|C)` for variable groups.
pub fn conditional_entropy(j: &JointPmf, a: &[usize], given: &[usize]) -> Result<f64> {
    let all: Vec<usize> = a.iter().chain(given).copied().collect();
    Ok(j.entropy_of(&all)? - j.entropy_of(given)?)
}

/// One factor of a Markov factorization: a law over one or more new
/// variables given already-introduced parent variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    parents: Vec<usize>,
    law: ConditionalPmf,
    outputs: Vec<Alphabet>,
}

impl Factor {
    /// A source variable with no parents.
    pub fn root(p: Pmf) -> Self {
        let output = p.alphabet().clone();
        let law = ConditionalPmf {
            input: Alphabet::unchecked(1),
            output: output.clone(),
            rows: vec![p],
        };
        Factor { parents: Vec::new(), law, outputs: vec![output] }
    }

    /// One new variable drawn from `law` given the parent variables; the
    /// channel input enumerates parent tuples row-major.
    pub fn channel(parents: &[usize], law: ConditionalPmf) -> Self {
        let output = law.output().clone();
        Factor { parents: parents.to_vec(), law, outputs: vec![output] }
    }

    /// Several new variables drawn jointly; `law`'s output enumerates the
    /// tuples of `outputs` row-major.
    pub fn split_channel(parents: &[usize], law: ConditionalPmf, outputs: Vec<Alphabet>) -> Self {
        Factor { parents: parents.to_vec(), law, outputs }
    }
}

/// Joint law equal to the product of the factors. Factor `k`'s new
/// variables are numbered after all earlier factors' variables, and its
/// parents must already exist.
pub fn compose_markov(factors: &[Factor]) -> Result<JointPmf> {
    let mut alphabets: Vec<Alphabet> = Vec::new();
    // (first new variable index, number of new variables)
    let mut spans = Vec::with_capacity(factors.len());
    for (k, f) in factors.iter().enumerate() {
        for &p in &f.parents {
            if p >= alphabets.len() {
                return Err(Error::CyclicWiring { factor: k, parent: p });
            }
        }
        let parent_cells: usize = f.parents.iter().map(|&p| alphabets[p].size()).product();
        if parent_cells != f.law.input().size() {
            return Err(Error::AlphabetMismatch(format!(
                "factor {k}: parents span {parent_cells} tuples, law input has {}",
                f.law.input().size()
            )));
        }
        let out_cells: usize = f.outputs.iter().map(Alphabet::size).product();
        if f.outputs.is_empty() || out_cells != f.law.output().size() {
            return Err(Error::AlphabetMismatch(format!(
                "factor {k}: outputs span {out_cells} tuples, law output has {}",
                f.law.output().size()
            )));
        }
        spans.push((alphabets.len(), f.outputs.len()));
        alphabets.extend(f.outputs.iter().cloned());
    }
    let cells = cell_count(&alphabets)?;
    if alphabets.is_empty() || alphabets.len() > 8 {
        return Err(Error::InvalidArgument(format!(
            "joint laws hold 1 to 8 variables, got {}",
            alphabets.len()
        )));
    }
    let shape: Vec<usize> = alphabets.iter().map(Alphabet::size).collect();
    let mut probs = vec![0.0; cells];
    let mut digits = vec![0usize; shape.len()];
    for cell in probs.iter_mut() {
        let mut p = 1.0;
        for (f, &(first, count)) in factors.iter().zip(&spans) {
            let x = f.parents.iter().fold(0, |acc, &v| acc * shape[v] + digits[v]);
            let y = (first..first + count).fold(0, |acc, v| acc * shape[v] + digits[v]);
            p *= f.law.prob(x, y);
            if p == 0.0 {
                break;
            }
        }
        *cell = p;
        for v in (0..shape.len()).rev() {
            digits[v] += 1;
            if digits[v] < shape[v] {
                break;
            }
            digits[v] = 0;
        }
    }
    JointPmf::new(alphabets, probs)
}


#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    fn bsc_joint(p: f64) -> JointPmf {
        JointPmf::from_channel(&Pmf::uniform(2).unwrap(), &ConditionalPmf::bsc(p).unwrap()).unwrap()
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&Pmf::uniform(2).unwrap()), 1.0);
        assert_eq!(entropy(&Pmf::point_mass(3, 1).unwrap()), 0.0);
        let h = -0.11 * 0.11f64.log2() - 0.89 * 0.89f64.log2();
        close(entropy(&Pmf::bernoulli(0.11).unwrap()), h, 1e-15);
        // the commonly quoted rounding, 0.49993, is off in the fifth digit
        close(h, 0.499916, 1e-6);
        close(h, 0.49993, 5e-5);
    }

    #[test]
    fn pmf_construction_rules() {
        assert!(Pmf::from_probs(vec![0.5, 0.5 + 1e-10]).is_ok());
        let p = Pmf::from_probs(vec![0.5, 0.5 + 1e-10]).unwrap();
        close(p.probs().iter().sum(), 1.0, 1e-15);
        assert!(Pmf::from_probs(vec![0.5, 0.6]).is_err());
        assert!(Pmf::from_probs(vec![1.5, -0.5]).is_err());
        assert!(Alphabet::new(0).is_err());
        assert!(Alphabet::new(17).is_err());
        assert!(Alphabet::with_labels(["a", "a"]).is_err());
        assert_eq!(Alphabet::with_labels(["a", "b"]).unwrap().size(), 2);
    }

    #[test]
    fn mutual_information_examples() {
        close(mutual_information(&bsc_joint(0.0), (0, 1)).unwrap(), 1.0, 1e-12);
        close(mutual_information(&bsc_joint(0.5), (0, 1)).unwrap(), 0.0, 1e-12);
        let i = mutual_information(&bsc_joint(0.11), (1, 0)).unwrap();
        close(i, 1.0 - binary_entropy(0.11), 1e-12);
        close(i, 0.500084, 1e-6);
        assert!(matches!(
            mutual_information(&bsc_joint(0.1), (0, 2)),
            Err(Error::IndexOutOfRange { index: 2, count: 2 })
        ));
    }

    fn bsc_pair_joint(p: f64, q: f64) -> JointPmf {
        compose_markov(&[
            Factor::root(Pmf::uniform(2).unwrap()),
            Factor::channel(&[0], ConditionalPmf::bsc(p).unwrap()),
            Factor::channel(&[0], ConditionalPmf::bsc(q).unwrap()),
        ])
        .unwrap()
    }

    #[test]
    fn conditional_mutual_information_examples() {
        // Z = Y
        let j = compose_markov(&[
            Factor::root(Pmf::uniform(2).unwrap()),
            Factor::channel(&[0], ConditionalPmf::bsc(0.2).unwrap()),
            Factor::channel(&[1], ConditionalPmf::identity(2).unwrap()),
        ])
        .unwrap();
        close(conditional_mutual_information(&j, 0, 1, 2).unwrap(), 0.0, 1e-12);

        let j = bsc_pair_joint(0.1, 0.3);
        let cmi = conditional_mutual_information(&j, 0, 1, 2).unwrap();
        close(cmi, oracle::cmi(&j, &[0], &[1], &[2]), 1e-12);
        close(cmi, binary_entropy(0.34) - binary_entropy(0.1), 1e-12);
        close(cmi, 0.4559, 1e-4);

        // C independent of (A, B)
        let j = compose_markov(&[
            Factor::root(Pmf::uniform(2).unwrap()),
            Factor::channel(&[0], ConditionalPmf::bsc(0.2).unwrap()),
            Factor::root(Pmf::from_probs(vec![0.3, 0.7]).unwrap()),
        ])
        .unwrap();
        close(
            conditional_mutual_information(&j, 0, 1, 2).unwrap(),
            mutual_information(&j, (0, 1)).unwrap(),
            1e-12,
        );
        assert!(conditional_mutual_information(&j, 0, 0, 2).is_err());
        assert!(conditional_mutual_information(&j, 0, 1, 3).is_err());
    }

    #[test]
    fn compose_identity_is_diagonal() {
        let px = Pmf::from_probs(vec![0.2, 0.3, 0.5]).unwrap();
        let j = JointPmf::from_channel(&px, &ConditionalPmf::identity(3).unwrap()).unwrap();
        for x in 0..3 {
            for y in 0..3 {
                let expected = if x == y { px.prob(x) } else { 0.0 };
                assert_eq!(j.prob(&[x, y]), expected);
            }
        }
    }

    #[test]
    fn compose_doubly_stochastic_chain_has_uniform_marginals() {
        let ds = ConditionalPmf::from_rows(vec![
            vec![0.5, 0.3, 0.2],
            vec![0.2, 0.5, 0.3],
            vec![0.3, 0.2, 0.5],
        ])
        .unwrap();
        let j = compose_markov(&[
            Factor::root(Pmf::uniform(3).unwrap()),
            Factor::channel(&[0], ds.clone()),
            Factor::channel(&[1], ds),
        ])
        .unwrap();
        for v in 0..3 {
            for p in j.marginalize(&[v]).unwrap().probs() {
                close(*p, 1.0 / 3.0, 1e-12);
            }
        }
    }

    #[test]
    fn compose_five_variable_chain_matches_loop_product() {
        // W1 -> W2, W1 -> Xb -> (Yb, Zb)
        let pw1 = Pmf::from_probs(vec![0.35, 0.65]).unwrap();
        let w2 = ConditionalPmf::bsc(0.2).unwrap();
        let xb = ConditionalPmf::bsc(0.1).unwrap();
        let (py, pz) = (0.05, 0.25);
        let yz = ConditionalPmf::with_output(
            Alphabet::binary(),
            Alphabet::product(&Alphabet::binary(), &Alphabet::binary()),
            (0..2)
                .map(|x| {
                    let mut r = Vec::new();
                    for y in 0..2 {
                        for z in 0..2 {
                            let a = if y == x { 1.0 - py } else { py };
                            let b = if z == x { 1.0 - pz } else { pz };
                            r.push(a * b);
                        }
                    }
                    r
                })
                .collect(),
        )
        .unwrap();
        let j = compose_markov(&[
            Factor::root(pw1.clone()),
            Factor::channel(&[0], w2.clone()),
            Factor::channel(&[0], xb.clone()),
            Factor::split_channel(&[2], yz, vec![Alphabet::binary(), Alphabet::binary()]),
        ])
        .unwrap();
        assert_eq!(j.num_vars(), 5);
        let flip = |p: f64, a: usize, b: usize| if a == b { 1.0 - p } else { p };
        for a in 0..2 {
            for b in 0..2 {
                for x in 0..2 {
                    for y in 0..2 {
                        for z in 0..2 {
                            let expected = pw1.prob(a)
                                * w2.prob(a, b)
                                * xb.prob(a, x)
                                * flip(py, x, y)
                                * flip(pz, x, z);
                            close(j.prob(&[a, b, x, y, z]), expected, 1e-15);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn compose_rejects_bad_wiring() {
        let err = compose_markov(&[
            Factor::root(Pmf::uniform(2).unwrap()),
            Factor::channel(&[1], ConditionalPmf::bsc(0.1).unwrap()),
        ])
        .unwrap_err();
        assert!(matches!(err, Error::CyclicWiring { factor: 1, parent: 1 }));
        let err = compose_markov(&[
            Factor::root(Pmf::uniform(3).unwrap()),
            Factor::channel(&[0], ConditionalPmf::bsc(0.1).unwrap()),
        ])
        .unwrap_err();
        assert!(matches!(err, Error::AlphabetMismatch(_)));
    }

    #[test]
    fn marginalize_examples() {
        let pa = Pmf::from_probs(vec![0.25, 0.75]).unwrap();
        let pb = Pmf::from_probs(vec![0.1, 0.2, 0.7]).unwrap();
        let j = compose_markov(&[Factor::root(pa.clone()), Factor::root(pb)]).unwrap();
        let m = j.marginalize(&[0]).unwrap();
        for (x, y) in m.probs().iter().zip(pa.probs()) {
            close(*x, *y, 1e-15);
        }
        assert_eq!(j.marginalize(&[0, 1]).unwrap(), j);
        assert!(j.marginalize(&[]).is_err());

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let j = oracle::random_joint(&mut rng, &[2, 3, 2]);
        let m = j.marginalize(&[0, 2]).unwrap();
        for a in 0..2 {
            for c in 0..2 {
                let brute: f64 = (0..3).map(|b| j.prob(&[a, b, c])).sum();
                close(m.prob(&[a, c]), brute, 1e-15);
            }
        }
        // order of kept variables is respected
        let swapped = j.marginalize(&[2, 0]).unwrap();
        close(swapped.prob(&[1, 0]), m.prob(&[0, 1]), 1e-15);
    }

    fn arb_joint(max_vars: usize) -> impl Strategy<Value = JointPmf> {
        (prop::collection::vec(1usize..=4, 2..=max_vars), any::<u64>()).prop_map(|(shape, seed)| {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            oracle::random_joint(&mut rng, &shape)
        })
    }

    fn arb_channel(n_in: usize, n_out: usize) -> impl Strategy<Value = ConditionalPmf> {
        prop::collection::vec(prop::collection::vec(0.01f64..1.0, n_out), n_in).prop_map(|rows| {
            let rows = rows
                .into_iter()
                .map(|r| {
                    let s: f64 = r.iter().sum();
                    r.into_iter().map(|x| x / s).collect()
                })
                .collect();
            ConditionalPmf::from_rows(rows).unwrap()
        })
    }

    proptest! {
        #[test]
        fn entropy_is_bounded(probs in prop::collection::vec(0.0f64..1.0, 1..=16)) {
            let s: f64 = probs.iter().sum();
            prop_assume!(s > 1e-6);
            let p = Pmf::from_probs(probs.iter().map(|x| x / s).collect()).unwrap();
            let h = entropy(&p);
            prop_assert!(h >= 0.0);
            prop_assert!(h <= (p.size() as f64).log2() + 1e-12);
        }

        #[test]
        fn chain_rule(j in arb_joint(4)) {
            let h_ab = j.entropy_of(&[0, 1]).unwrap();
            let h_a = j.entropy_of(&[0]).unwrap();
            let h_b_given_a = conditional_entropy(&j, &[1], &[0]).unwrap();
            prop_assert!((h_ab - (h_a + h_b_given_a)).abs() < 1e-10);
        }

        #[test]
        fn measures_match_brute_force(j in arb_joint(4)) {
            let n = j.num_vars();
            let (a, b) = (0, n - 1);
            let mi = mutual_information(&j, (a, b)).unwrap();
            prop_assert!((mi - oracle::cmi(&j, &[a], &[b], &[])).abs() < 1e-9);
            prop_assert!((mi - mutual_information(&j, (b, a)).unwrap()).abs() < 1e-12);
            if n >= 3 {
                let cmi = conditional_mutual_information(&j, 0, 1, 2).unwrap();
                prop_assert!((cmi - oracle::cmi(&j, &[0], &[1], &[2])).abs() < 1e-9);
                prop_assert!(cmi > -1e-10);
            }
            prop_assert!((j.entropy_of(&[0, 1]).unwrap() - oracle::entropy(&j, &[0, 1])).abs() < 1e-9);
        }

        #[test]
        fn data_processing(px in arb_channel(1, 3), xy in arb_channel(3, 3), yv in arb_channel(3, 4)) {
            let px = px.rows()[0].clone();
            let j = compose_markov(&[
                Factor::root(px),
                Factor::channel(&[0], xy),
                Factor::channel(&[1], yv),
            ]).unwrap();
            let ivx = mutual_information(&j, (2, 0)).unwrap();
            let iyx = mutual_information(&j, (1, 0)).unwrap();
            prop_assert!(ivx <= iyx + 1e-10);
        }

        #[test]
        fn degrading_eve_never_helps(
            py in arb_channel(1, 2),
            yv in arb_channel(2, 3),
            yz in arb_channel(2, 2),
            zz in arb_channel(2, 3),
        ) {
            // V <- Y -> Z -> Z'
            let j = compose_markov(&[
                Factor::root(py.rows()[0].clone()),
                Factor::channel(&[0], yv),
                Factor::channel(&[0], yz),
                Factor::channel(&[2], zz),
            ]).unwrap();
            let ivz = mutual_information(&j, (1, 2)).unwrap();
            let ivz2 = mutual_information(&j, (1, 3)).unwrap();
            prop_assert!(ivz2 <= ivz + 1e-10);
        }
    }
}
