//! Discrete memoryless broadcast channels: construction, classification and
//! sampling.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp;
use crate::probability::{Alphabet, ConditionalPmf, Factor, JointPmf, Pmf, Symbol};

/// Per-cell tolerance of the factorization test.
pub const INDEPENDENCE_TOLERANCE: f64 = 1e-10;

/// Per-cell tolerance a degrading witness must meet.
pub const WITNESS_TOLERANCE: f64 = 1e-9;

/// A broadcast channel `X -> (Y, Z)` with `Y` the legitimate output and `Z`
/// the eavesdropper's. The law's output index is `y * |Z| + z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dmbc {
    input: Alphabet,
    legit_output: Alphabet,
    eve_output: Alphabet,
    law: ConditionalPmf,
}

impl Dmbc {
    pub fn new(law: ConditionalPmf, legit_output: Alphabet, eve_output: Alphabet) -> Result<Self> {
        if law.output().size() != legit_output.size() * eve_output.size() {
            return Err(Error::AlphabetMismatch(format!(
                "law has {} outputs, expected {} x {}",
                law.output().size(),
                legit_output.size(),
                eve_output.size()
            )));
        }
        Ok(Dmbc { input: law.input().clone(), legit_output, eve_output, law })
    }

    /// Broadcast channel whose two outputs are conditionally independent
    /// given the input.
    pub fn from_components(legit: &ConditionalPmf, eve: &ConditionalPmf) -> Result<Self> {
        if legit.input().size() != eve.input().size() {
            return Err(Error::AlphabetMismatch("component channels have different inputs".into()));
        }
        let (ny, nz) = (legit.output().size(), eve.output().size());
        let rows = (0..legit.input().size())
            .map(|x| {
                (0..ny * nz)
                    .map(|c| legit.prob(x, c / nz) * eve.prob(x, c % nz))
                    .collect()
            })
            .collect();
        let law = ConditionalPmf::with_output(
            legit.input().clone(),
            Alphabet::product(legit.output(), eve.output()),
            rows,
        )?;
        Dmbc::new(law, legit.output().clone(), eve.output().clone())
    }

    pub fn input(&self) -> &Alphabet {
        &self.input
    }

    pub fn legit_output(&self) -> &Alphabet {
        &self.legit_output
    }

    pub fn eve_output(&self) -> &Alphabet {
        &self.eve_output
    }

    pub fn law(&self) -> &ConditionalPmf {
        &self.law
    }

    /// `P(y, z | x)`.
    pub fn prob(&self, x: usize, y: usize, z: usize) -> f64 {
        self.law.prob(x, y * self.eve_output.size() + z)
    }

    /// `P_{Y|X}`.
    pub fn legit_channel(&self) -> ConditionalPmf {
        self.marginal_channel(true)
    }

    /// `P_{Z|X}`.
    pub fn eve_channel(&self) -> ConditionalPmf {
        self.marginal_channel(false)
    }

    fn marginal_channel(&self, legit: bool) -> ConditionalPmf {
        let (ny, nz) = (self.legit_output.size(), self.eve_output.size());
        let rows = (0..self.input.size())
            .map(|x| {
                if legit {
                    (0..ny).map(|y| (0..nz).map(|z| self.prob(x, y, z)).sum()).collect()
                } else {
                    (0..nz).map(|z| (0..ny).map(|y| self.prob(x, y, z)).sum()).collect()
                }
            })
            .collect();
        let out = if legit { &self.legit_output } else { &self.eve_output };
        ConditionalPmf::with_output(self.input.clone(), out.clone(), rows)
            .expect("marginal of a valid channel is valid")
    }

    /// Joint law of `(X, Y, Z)` for input law `px`.
    pub fn joint(&self, px: &Pmf) -> Result<JointPmf> {
        crate::probability::compose_markov(&[
            Factor::root(px.clone()),
            Factor::split_channel(
                &[0],
                self.law.clone(),
                vec![self.legit_output.clone(), self.eve_output.clone()],
            ),
        ])
    }
}

/// Independent forward (Alice to Bob) and backward (Bob to Alice)
/// broadcast channels, both overheard by Eve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoDmbcSetup {
    pub forward: Dmbc,
    pub backward: Dmbc,
}

impl TwoDmbcSetup {
    pub fn new(forward: Dmbc, backward: Dmbc) -> Self {
        TwoDmbcSetup { forward, backward }
    }

    /// The same setup seen from Bob as initiator.
    pub fn reversed(&self) -> Self {
        TwoDmbcSetup { forward: self.backward.clone(), backward: self.forward.clone() }
    }

    /// Both channels factor into independent components and are each
    /// stochastically degraded in one direction or the other.
    pub fn sd_reports(&self) -> (DegradednessReport, DegradednessReport) {
        (degradedness_check(&self.forward), degradedness_check(&self.backward))
    }

    pub fn is_sd(&self) -> bool {
        let (f, b) = self.sd_reports();
        f.is_sd() && b.is_sd()
    }

    /// Error unless the setup is an sd-2DMBC.
    pub fn require_sd(&self) -> Result<()> {
        let (f, b) = self.sd_reports();
        for (name, r) in [("forward", f), ("backward", b)] {
            if !r.independent_components {
                return Err(Error::NotStochasticallyDegraded(format!(
                    "{name} channel outputs are not conditionally independent"
                )));
            }
            if r.order == DegradationOrder::Incomparable {
                return Err(Error::NotStochasticallyDegraded(format!(
                    "{name} channel is not stochastically degraded in either direction"
                )));
            }
        }
        Ok(())
    }
}

/// Binary broadcast channel with independent crossovers to Bob and Eve.
pub fn make_bsc_pair(p_legit: f64, p_eve: f64) -> Result<Dmbc> {
    for p in [p_legit, p_eve] {
        if !(0.0..=1.0).contains(&p) || p.is_nan() {
            return Err(Error::InvalidDistribution(format!("crossover {p} is not a probability")));
        }
        if p > 0.5 {
            return Err(Error::InvalidArgument(format!(
                "crossover {p} above 0.5; relabel the output symbols instead"
            )));
        }
    }
    Dmbc::from_components(&ConditionalPmf::bsc(p_legit)?, &ConditionalPmf::bsc(p_eve)?)
}

/// Whether `P_{YZ|X} = P_{Y|X} P_{Z|X}` cell by cell.
pub fn is_independent_components(d: &Dmbc) -> bool {
    let (py, pz) = (d.legit_channel(), d.eve_channel());
    (0..d.input.size()).all(|x| {
        (0..d.legit_output.size()).all(|y| {
            (0..d.eve_output.size())
                .all(|z| (d.prob(x, y, z) - py.prob(x, y) * pz.prob(x, z)).abs() <= INDEPENDENCE_TOLERANCE)
        })
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegradationOrder {
    /// Eve's marginal is a degraded version of Bob's.
    FavorLegit,
    /// Bob's marginal is a degraded version of Eve's.
    FavorEve,
    Incomparable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegradationReport {
    pub independent_components: bool,
    pub order: DegradationOrder,
    /// Channel from the stronger output to the weaker one.
    pub witness: Option<ConditionalPmf>,
}

pub type DegradednessReport = DegradationReport;

impl DegradationReport {
    pub fn is_sd(&self) -> bool {
        self.independent_components && self.order != DegradationOrder::Incomparable
    }
}

/// Stochastic channel `M` with `weaker = stronger . M`, if one exists.
pub fn degrading_witness(stronger: &ConditionalPmf, weaker: &ConditionalPmf) -> Option<ConditionalPmf> {
    let nx = stronger.input().size();
    if weaker.input().size() != nx {
        return None;
    }
    let (ns, nw) = (stronger.output().size(), weaker.output().size());
    // unknowns m[s][w], flattened s * nw + w
    let mut a = Vec::with_capacity(nx * nw + ns);
    let mut b = Vec::with_capacity(nx * nw + ns);
    for x in 0..nx {
        for w in 0..nw {
            let mut row = vec![0.0; ns * nw];
            for s in 0..ns {
                row[s * nw + w] = stronger.prob(x, s);
            }
            a.push(row);
            b.push(weaker.prob(x, w));
        }
    }
    for s in 0..ns {
        let mut row = vec![0.0; ns * nw];
        row[s * nw..(s + 1) * nw].iter_mut().for_each(|v| *v = 1.0);
        a.push(row);
        b.push(1.0);
    }
    let m = lp::feasible_point(&a, &b, 1e-10)?;
    let rows: Vec<Vec<f64>> = m
        .chunks(nw)
        .map(|r| {
            let s: f64 = r.iter().sum();
            r.iter().map(|v| v / s).collect()
        })
        .collect();
    let witness = ConditionalPmf::with_output(stronger.output().clone(), weaker.output().clone(), rows).ok()?;
    let composed = stronger.then(&witness).ok()?;
    let ok = (0..nx).all(|x| {
        (0..nw).all(|w| (composed.prob(x, w) - weaker.prob(x, w)).abs() <= WITNESS_TOLERANCE)
    });
    ok.then_some(witness)
}

/// Classifies a broadcast channel by stochastic degradedness. When both
/// directions are feasible the channel is reported as favoring Bob.
pub fn degradedness_check(d: &Dmbc) -> DegradationReport {
    let (py, pz) = (d.legit_channel(), d.eve_channel());
    let independent_components = is_independent_components(d);
    let (order, witness) = if let Some(m) = degrading_witness(&py, &pz) {
        (DegradationOrder::FavorLegit, Some(m))
    } else if let Some(m) = degrading_witness(&pz, &py) {
        (DegradationOrder::FavorEve, Some(m))
    } else {
        (DegradationOrder::Incomparable, None)
    };
    DegradationReport { independent_components, order, witness }
}

fn draw<R: Rng + ?Sized>(row: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in row.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // rounding left u above the final partial sum; take the last supported symbol
    row.iter().rposition(|p| *p > 0.0).unwrap_or(row.len() - 1)
}

/// Draws one symbol from `row`.
pub fn draw_symbol<R: Rng + ?Sized>(row: &[f64], rng: &mut R) -> Symbol {
    draw(row, rng) as Symbol
}

/// One use of the channel.
pub fn sample<R: Rng + ?Sized>(d: &Dmbc, x: Symbol, rng: &mut R) -> Result<(Symbol, Symbol)> {
    let x = x as usize;
    if x >= d.input.size() {
        return Err(Error::SymbolOutOfRange { symbol: x, size: d.input.size() });
    }
    let c = draw(d.law.row(x), rng);
    let nz = d.eve_output.size();
    Ok(((c / nz) as Symbol, (c % nz) as Symbol))
}

/// Memoryless transmission of a whole block.
pub fn sample_block<R: Rng + ?Sized>(
    d: &Dmbc,
    xs: &[Symbol],
    rng: &mut R,
) -> Result<(Vec<Symbol>, Vec<Symbol>)> {
    let mut ys = Vec::with_capacity(xs.len());
    let mut zs = Vec::with_capacity(xs.len());
    for &x in xs {
        let (y, z) = sample(d, x, rng)?;
        ys.push(y);
        zs.push(z);
    }
    Ok((ys, zs))
}

/// Passes a block through a single-output channel.
pub fn transmit<R: Rng + ?Sized>(ch: &ConditionalPmf, xs: &[Symbol], rng: &mut R) -> Vec<Symbol> {
    xs.iter().map(|&x| draw_symbol(ch.row(x as usize), rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn correlated_channel() -> Dmbc {
        // Y noisy copy of X, Z = Y: a physically degraded channel whose
        // outputs are correlated beyond the product of their marginals.
        let p = 0.2;
        let rows = vec![vec![1.0 - p, 0.0, 0.0, p], vec![p, 0.0, 0.0, 1.0 - p]];
        let law = ConditionalPmf::with_output(
            Alphabet::binary(),
            Alphabet::product(&Alphabet::binary(), &Alphabet::binary()),
            rows,
        )
        .unwrap();
        Dmbc::new(law, Alphabet::binary(), Alphabet::binary()).unwrap()
    }

    #[test]
    fn bsc_pair_construction() {
        let d = make_bsc_pair(0.0, 0.0).unwrap();
        for x in 0..2 {
            assert_eq!(d.prob(x, x, x), 1.0);
        }
        let d = make_bsc_pair(0.1, 0.3).unwrap();
        assert!((d.legit_channel().prob(0, 1) - 0.1).abs() < 1e-15);
        assert!((d.eve_channel().prob(1, 0) - 0.3).abs() < 1e-15);
        assert!(is_independent_components(&d));
        assert!(make_bsc_pair(1.2, 0.1).is_err());
        assert!(make_bsc_pair(0.1, -0.1).is_err());
        assert!(make_bsc_pair(0.7, 0.1).is_err());
    }

    #[test]
    fn independence_classification() {
        assert!(!is_independent_components(&correlated_channel()));
        assert!(is_independent_components(&make_bsc_pair(0.0, 0.0).unwrap()));
    }

    #[test]
    fn bsc_degradedness_witness() {
        let r = degradedness_check(&make_bsc_pair(0.1, 0.3).unwrap());
        assert_eq!(r.order, DegradationOrder::FavorLegit);
        let m = r.witness.unwrap();
        // p_eve = p(1 - q) + (1 - p) q  =>  q = (0.3 - 0.1) / (1 - 0.2)
        assert!((m.prob(0, 1) - 0.25).abs() < 1e-9);
        assert!((m.prob(1, 0) - 0.25).abs() < 1e-9);

        let r = degradedness_check(&make_bsc_pair(0.3, 0.1).unwrap());
        assert_eq!(r.order, DegradationOrder::FavorEve);
        assert!((r.witness.unwrap().prob(0, 1) - 0.25).abs() < 1e-9);

        let r = degradedness_check(&make_bsc_pair(0.2, 0.2).unwrap());
        assert_eq!(r.order, DegradationOrder::FavorLegit);
    }

    fn bec_vs_bsc() -> Dmbc {
        Dmbc::from_components(&ConditionalPmf::bec(0.5).unwrap(), &ConditionalPmf::bsc(0.11).unwrap()).unwrap()
    }

    /// Smallest worst-cell residual of `weaker = stronger . M` over a grid of
    /// stochastic matrices with the given step.
    fn grid_residual(stronger: &ConditionalPmf, weaker: &ConditionalPmf, step: f64) -> f64 {
        let ns = stronger.output().size();
        let nw = weaker.output().size();
        let k = (1.0 / step).round() as usize;
        // all points of the (nw-1)-simplex on the grid
        let mut simplex = Vec::new();
        let mut stack = vec![(Vec::new(), k)];
        while let Some((prefix, left)) = stack.pop() {
            if prefix.len() == nw - 1 {
                let mut p: Vec<f64> = prefix.iter().map(|&c: &usize| c as f64 / k as f64).collect();
                p.push(left as f64 / k as f64);
                simplex.push(p);
                continue;
            }
            for c in 0..=left {
                let mut next = prefix.clone();
                next.push(c);
                stack.push((next, left - c));
            }
        }
        let mut best = f64::INFINITY;
        let mut idx = vec![0usize; ns];
        loop {
            let mut worst: f64 = 0.0;
            for x in 0..stronger.input().size() {
                for w in 0..nw {
                    let v: f64 = (0..ns).map(|s| stronger.prob(x, s) * simplex[idx[s]][w]).sum();
                    worst = worst.max((v - weaker.prob(x, w)).abs());
                }
            }
            best = best.min(worst);
            let mut i = 0;
            loop {
                if i == ns {
                    return best;
                }
                idx[i] += 1;
                if idx[i] < simplex.len() {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn erasure_versus_symmetric_is_incomparable() {
        let d = bec_vs_bsc();
        let r = degradedness_check(&d);
        assert_eq!(r.order, DegradationOrder::Incomparable);
        assert!(r.witness.is_none());
        assert!(r.independent_components);
        // Independent check: no grid matrix comes near either direction.
        // Residuals are 1-Lipschitz per entry step, so a minimum well above
        // the grid step rules out feasibility.
        let (py, pz) = (d.legit_channel(), d.eve_channel());
        assert!(grid_residual(&py, &pz, 0.01) > 0.05);
        assert!(grid_residual(&pz, &py, 0.02) > 0.05);
    }

    #[test]
    fn witness_reproduces_weaker_marginal() {
        for (p, q) in [(0.0, 0.2), (0.05, 0.5), (0.2, 0.45), (0.4, 0.1)] {
            let d = make_bsc_pair(p, q).unwrap();
            let r = degradedness_check(&d);
            let m = r.witness.clone().unwrap();
            let (strong, weak) = match r.order {
                DegradationOrder::FavorLegit => (d.legit_channel(), d.eve_channel()),
                _ => (d.eve_channel(), d.legit_channel()),
            };
            let c = strong.then(&m).unwrap();
            for x in 0..2 {
                for w in 0..2 {
                    assert!((c.prob(x, w) - weak.prob(x, w)).abs() <= 1e-9);
                }
            }
            assert_eq!(r.order == DegradationOrder::FavorLegit, p <= q);
        }
    }

    #[test]
    fn sampling_contracts() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let d = make_bsc_pair(0.0, 0.0).unwrap();
        for x in [0, 1, 1, 0] {
            assert_eq!(sample(&d, x, &mut rng).unwrap(), (x, x));
        }
        assert!(matches!(sample(&d, 2, &mut rng), Err(Error::SymbolOutOfRange { .. })));
        let (ys, zs) = sample_block(&d, &[], &mut rng).unwrap();
        assert!(ys.is_empty() && zs.is_empty());
        let (ys, zs) = sample_block(&d, &[1; 50], &mut rng).unwrap();
        assert_eq!(ys, vec![1; 50]);
        assert_eq!(zs, vec![1; 50]);

        let d = make_bsc_pair(0.1, 0.3).unwrap();
        let xs = vec![0u8; 64];
        let a = sample_block(&d, &xs, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = sample_block(&d, &xs, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sampling_frequencies() {
        let n = 100_000usize;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let d = make_bsc_pair(0.1, 0.5).unwrap();
        let xs: Vec<Symbol> = (0..n).map(|i| (i % 2) as Symbol).collect();
        let (ys, zs) = sample_block(&d, &xs, &mut rng).unwrap();
        let sigma = |p: f64| (p * (1.0 - p) / n as f64).sqrt();
        let eve_hits = xs.iter().zip(&zs).filter(|(x, z)| x == z).count() as f64 / n as f64;
        assert!((eve_hits - 0.5).abs() < 3.0 * sigma(0.5));
        let bob_err = xs.iter().zip(&ys).filter(|(x, y)| x != y).count() as f64 / n as f64;
        assert!((bob_err - 0.1).abs() < 3.0 * sigma(0.1));
    }

    #[test]
    fn sampling_passes_chi_square() {
        // 3-input channel with a 2 x 3 output product
        let legit = ConditionalPmf::from_rows(vec![
            vec![0.7, 0.3],
            vec![0.2, 0.8],
            vec![0.5, 0.5],
        ])
        .unwrap();
        let eve = ConditionalPmf::from_rows(vec![
            vec![0.6, 0.3, 0.1],
            vec![0.1, 0.1, 0.8],
            vec![0.3, 0.3, 0.4],
        ])
        .unwrap();
        let d = Dmbc::from_components(&legit, &eve).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 100_000;
        for x in 0..3u8 {
            let mut counts = [0usize; 6];
            for _ in 0..n {
                let (y, z) = sample(&d, x, &mut rng).unwrap();
                counts[y as usize * 3 + z as usize] += 1;
            }
            let chi2: f64 = counts
                .iter()
                .enumerate()
                .map(|(c, &k)| {
                    let e = n as f64 * d.law().prob(x as usize, c);
                    (k as f64 - e).powi(2) / e
                })
                .sum();
            // 5 degrees of freedom, 0.01 upper critical value
            assert!(chi2 < 15.086, "chi2 = {chi2} for x = {x}");
        }
    }

    #[test]
    fn setup_sd_classification() {
        let s = TwoDmbcSetup::new(make_bsc_pair(0.1, 0.3).unwrap(), make_bsc_pair(0.3, 0.1).unwrap());
        assert!(s.is_sd());
        assert!(s.require_sd().is_ok());
        let s = TwoDmbcSetup::new(correlated_channel(), make_bsc_pair(0.1, 0.3).unwrap());
        assert!(matches!(s.require_sd(), Err(Error::NotStochasticallyDegraded(_))));
        let s = TwoDmbcSetup::new(make_bsc_pair(0.1, 0.3).unwrap(), bec_vs_bsc());
        assert!(!s.is_sd());
    }
}
