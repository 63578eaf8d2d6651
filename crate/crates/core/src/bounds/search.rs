//! Multi-start coordinate ascent over products of probability simplices.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::aux::{random_row, AuxSizes, DirectionAux};
use super::eval::{
    backward_terms, best_ratio, forward_terms, input_terms, ChannelTables, DirectionRates, RatioChoice,
};
use crate::channels::TwoDmbcSetup;
use crate::error::Result;
use crate::probability::{ConditionalPmf, Pmf};

/// Optimizer settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub restarts: usize,
    /// Stop once a full sweep gains less than this.
    pub tolerance: f64,
    pub max_sweeps: usize,
    pub seed: u64,
    /// Override of the auxiliary alphabet caps.
    pub sizes: Option<AuxSizes>,
    /// Run restarts on the rayon pool.
    pub parallel: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { restarts: 32, tolerance: 1e-7, max_sweeps: 400, seed: 0, sizes: None, parallel: true }
    }
}

const GOLDEN_STEPS: usize = 28;
const INVPHI: f64 = 0.618_033_988_749_894_8;

/// Improves `rows` by pairwise mass transfers with golden-section line
/// searches until a sweep gains less than `tol`. Returns the final value and
/// the number of sweeps.
pub(crate) fn ascend(
    rows: &mut [Vec<f64>],
    frozen: &[bool],
    f: &dyn Fn(&[Vec<f64>]) -> f64,
    tol: f64,
    max_sweeps: usize,
) -> (f64, usize) {
    let mut value = f(rows);
    let mut sweeps = 0;
    while sweeps < max_sweeps {
        sweeps += 1;
        let start = value;
        for r in 0..rows.len() {
            if frozen[r] {
                continue;
            }
            let k = rows[r].len();
            for i in 0..k {
                for j in 0..k {
                    if i == j || rows[r][i] <= 0.0 {
                        continue;
                    }
                    value = line_search(rows, r, i, j, value, f);
                }
            }
        }
        if value - start < tol {
            break;
        }
    }
    (value, sweeps)
}

/// Moves up to all of `rows[r][i]` onto `rows[r][j]`, keeping the best point.
fn line_search(
    rows: &mut [Vec<f64>],
    r: usize,
    i: usize,
    j: usize,
    current: f64,
    f: &dyn Fn(&[Vec<f64>]) -> f64,
) -> f64 {
    let (base_i, base_j) = (rows[r][i], rows[r][j]);
    let eval = |t: f64, rows: &mut [Vec<f64>]| {
        rows[r][i] = base_i - t;
        rows[r][j] = base_j + t;
        f(rows)
    };
    let m = base_i;
    let (mut best_t, mut best) = (0.0, current);
    let full = eval(m, rows);
    if full > best {
        best = full;
        best_t = m;
    }
    let (mut a, mut b) = (0.0, m);
    let mut c = b - INVPHI * (b - a);
    let mut d = a + INVPHI * (b - a);
    let mut fc = eval(c, rows);
    let mut fd = eval(d, rows);
    for _ in 0..GOLDEN_STEPS {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INVPHI * (b - a);
            fc = eval(c, rows);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INVPHI * (b - a);
            fd = eval(d, rows);
        }
    }
    for (t, v) in [(c, fc), (d, fd)] {
        if v > best {
            best = v;
            best_t = t;
        }
    }
    rows[r][i] = if best_t == m { 0.0 } else { base_i - best_t };
    rows[r][j] = base_j + best_t;
    best
}

/// Which objective a direction search maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Objective {
    /// `[R2]_+` (lower bound) or raw `R2` (ICC rate).
    General { clamp: bool },
    /// First term `I(V;X|Z)`, second `[I(X;Y) - I(X;Z)]_+`.
    Sd,
}

/// The auxiliary family searched.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Family {
    Full(AuxSizes),
    /// `W2` constant and `W1 = X_b`.
    Restricted { v: usize },
}

/// Row layout of one direction's search state.
#[derive(Debug, Clone)]
pub(crate) struct Layout {
    ny: usize,
    nw1: usize,
    restricted: bool,
}

impl Layout {
    fn px(&self) -> usize {
        0
    }
    fn q(&self) -> std::ops::Range<usize> {
        1..1 + self.ny
    }
    fn pw1(&self) -> usize {
        1 + self.ny
    }
    fn pw2(&self) -> std::ops::Range<usize> {
        2 + self.ny..2 + self.ny + self.nw1
    }
    fn pxw1(&self) -> std::ops::Range<usize> {
        let s = 2 + self.ny + self.nw1;
        s..s + self.nw1
    }
    fn len(&self) -> usize {
        2 + self.ny + 2 * self.nw1
    }
    fn frozen(&self) -> Vec<bool> {
        let mut v = vec![false; self.len()];
        if self.restricted {
            for r in self.pw2().chain(self.pxw1()) {
                v[r] = true;
            }
        }
        v
    }
}

/// Precomputed channel tables for one orientation of the setup.
pub(crate) struct DirectionProblem {
    fwd: ChannelTables,
    bwd: ChannelTables,
    layout: Layout,
    sizes: AuxSizes,
}

/// Outcome of one local ascent.
#[derive(Debug, Clone)]
pub(crate) struct LocalOptimum {
    pub rows: Vec<Vec<f64>>,
    pub sweeps: usize,
}

impl DirectionProblem {
    pub fn new(setup: &TwoDmbcSetup, family: Family) -> Self {
        let fwd = ChannelTables::new(&setup.forward);
        let bwd = ChannelTables::new(&setup.backward);
        let (sizes, restricted) = match family {
            Family::Full(s) => (s, false),
            Family::Restricted { v } => (AuxSizes { v, w1: bwd.nx, w2: 1 }, true),
        };
        let layout = Layout { ny: fwd.ny, nw1: sizes.w1, restricted };
        DirectionProblem { fwd, bwd, layout, sizes }
    }

    /// Rates at a state.
    pub fn rates(&self, rows: &[Vec<f64>], objective: Objective) -> DirectionRates {
        let l = &self.layout;
        let sd = objective == Objective::Sd;
        let (r1, c1, r1_sd) = forward_terms(&self.fwd, &rows[l.px()], &rows[l.q()], sd);
        if sd {
            // W1 = X_b, so the row of W1 is the input law
            let (r2, c2) = input_terms(&self.bwd, &rows[l.pw1()]);
            DirectionRates { r1: r1_sd, r2, c1, c2 }
        } else {
            let (r2, c2) = backward_terms(&self.bwd, &rows[l.pw1()], &rows[l.pw2()], &rows[l.pxw1()]);
            DirectionRates { r1, r2, c1, c2 }
        }
    }

    pub fn choice(&self, rows: &[Vec<f64>], objective: Objective) -> (DirectionRates, RatioChoice) {
        let rates = self.rates(rows, objective);
        let clamp = !matches!(objective, Objective::General { clamp: false });
        (rates, best_ratio(rates, clamp))
    }

    fn score(&self, rows: &[Vec<f64>], objective: Objective) -> f64 {
        let (rates, c) = self.choice(rows, objective);
        if c.feasible {
            c.value
        } else {
            // any feasible point outranks this; larger budgets are closer
            -1e3 + rates.c2
        }
    }

    /// Deterministic starting points followed by random ones.
    fn start(&self, k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
        let l = &self.layout;
        let (nxf, nv, nw1, nw2, nxb) = (self.fwd.nx, self.sizes.v, self.sizes.w1, self.sizes.w2, self.bwd.nx);
        let unit = |n: usize, i: usize| -> Vec<f64> { (0..n).map(|j| (j == i) as u8 as f64).collect() };
        let uniform = |n: usize| vec![1.0 / n as f64; n];
        let mut rows = vec![Vec::new(); l.len()];
        for x in l.pxw1() {
            let w = x - l.pxw1().start;
            rows[x] = if w < nxb { unit(nxb, w) } else { uniform(nxb) };
        }
        for r in l.pw2() {
            rows[r] = unit(nw2, 0);
        }
        rows[l.pw1()] = (0..nw1).map(|w| if w < nxb { 1.0 / nxb as f64 } else { 0.0 }).collect();
        rows[l.px()] = uniform(nxf);
        let embed = |y: usize| if y < nv { unit(nv, y) } else { uniform(nv) };
        match k {
            // V = Y, W2 constant, W1 = X_b
            0 => {
                for y in l.q() {
                    rows[y] = embed(y - 1);
                }
            }
            // V constant
            1 => {
                for y in l.q() {
                    rows[y] = unit(nv, 0);
                }
            }
            // V = Y and W2 = W1: the backward channel carries public data
            2 if !l.restricted => {
                for y in l.q() {
                    rows[y] = embed(y - 1);
                }
                for r in l.pw2() {
                    let w = r - l.pw2().start;
                    rows[r] = unit(nw2, w.min(nw2 - 1));
                }
            }
            _ => {
                rows[l.px()] = random_row(nxf, rng);
                for y in l.q() {
                    rows[y] = random_row(nv, rng);
                }
                rows[l.pw1()] = random_row(nw1, rng);
                if !l.restricted {
                    for r in l.pw2() {
                        rows[r] = random_row(nw2, rng);
                    }
                    for r in l.pxw1() {
                        rows[r] = random_row(nxb, rng);
                    }
                }
            }
        }
        rows
    }

    /// Runs restart `k` once per objective, from a shared start.
    pub fn restart(&self, k: usize, objectives: &[Objective], cfg: &SearchConfig) -> Vec<LocalOptimum> {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(k as u64);
        let start = self.start(k, &mut rng);
        let frozen = self.layout.frozen();
        objectives
            .iter()
            .map(|&o| {
                let mut rows = start.clone();
                let f = |r: &[Vec<f64>]| self.score(r, o);
                let (_, sweeps) = ascend(&mut rows, &frozen, &f, cfg.tolerance, cfg.max_sweeps);
                LocalOptimum { rows, sweeps }
            })
            .collect()
    }

    /// All local optima, restart-major.
    pub fn run(&self, objectives: &[Objective], cfg: &SearchConfig) -> Vec<LocalOptimum> {
        let restarts = cfg.restarts.max(1);
        let per: Vec<Vec<LocalOptimum>> = if cfg.parallel {
            (0..restarts).into_par_iter().map(|k| self.restart(k, objectives, cfg)).collect()
        } else {
            (0..restarts).map(|k| self.restart(k, objectives, cfg)).collect()
        };
        per.into_iter().flatten().collect()
    }

    pub fn to_aux(&self, rows: &[Vec<f64>]) -> Result<DirectionAux> {
        let l = &self.layout;
        let norm = |r: &Vec<f64>| {
            let s: f64 = r.iter().sum();
            r.iter().map(|v| v / s).collect::<Vec<f64>>()
        };
        Ok(DirectionAux {
            p_xf: Pmf::from_probs(norm(&rows[l.px()]))?,
            p_v_given_yf: ConditionalPmf::from_rows(rows[l.q()].iter().map(norm).collect())?,
            p_w1: Pmf::from_probs(norm(&rows[l.pw1()]))?,
            p_w2_given_w1: ConditionalPmf::from_rows(rows[l.pw2()].iter().map(norm).collect())?,
            p_xb_given_w1: ConditionalPmf::from_rows(rows[l.pxw1()].iter().map(norm).collect())?,
        })
    }
}

/// Maximizes a concave-or-not function of one input law by multistart
/// ascent. Returns the best value and its argument.
pub(crate) fn maximize_input(
    n: usize,
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
    cfg: &SearchConfig,
) -> (f64, Vec<f64>, usize) {
    let run = |k: usize| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(k as u64);
        let mut rows = vec![if k == 0 { vec![1.0 / n as f64; n] } else { random_row(n, &mut rng) }];
        let g = |r: &[Vec<f64>]| f(&r[0]);
        let (v, sweeps) = ascend(&mut rows, &[false], &g, cfg.tolerance, cfg.max_sweeps);
        (v, rows.pop().expect("one row"), sweeps)
    };
    let restarts = cfg.restarts.max(1);
    let all: Vec<(f64, Vec<f64>, usize)> = if cfg.parallel {
        (0..restarts).into_par_iter().map(run).collect()
    } else {
        (0..restarts).map(run).collect()
    };
    let sweeps = all.iter().map(|r| r.2).sum();
    let (v, arg, _) = all.into_iter().fold((f64::NEG_INFINITY, Vec::new(), 0), |best, cur| {
        if cur.0 > best.0 {
            cur
        } else {
            best
        }
    });
    (v, arg, sweeps)
}
