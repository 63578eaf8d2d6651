use super::codebook::IccCodebook;
use super::plan::PlanKind;
use crate::channels::TwoDmbcSetup;
use crate::error::{Error, Result};
use crate::probability::{binary_entropy, Symbol};

const NO_CELL: u32 = u32::MAX;

/// Exact Bayes model of Eve's knowledge for one codebook: prior of the
/// index pair given that Bob did not abort, and per-symbol likelihood tables
/// of both of her observations.
#[derive(Debug, Clone)]
pub struct EveModel<'a> {
    cb: &'a IccCodebook,
    ny: usize,
    nzf: usize,
    /// `log2 P(Y_f = y, Z_f = z)` at `y * nzf + z`.
    log_yz: Vec<f64>,
    nzb: usize,
    /// `log2 P(Z_b = z | W1 = w)` at `w * nzb + z`.
    log_zw: Vec<f64>,
    /// Quantizer output for every `y_f` sequence (general books only).
    qmap: Option<Vec<u32>>,
    prior_f: Vec<f64>,
    prior_s: Vec<f64>,
}

fn log2_or_neg_inf(p: f64) -> f64 {
    if p > 0.0 {
        p.log2()
    } else {
        f64::NEG_INFINITY
    }
}

/// Lexicographic successor over `k` symbols; false after the last sequence.
fn next_seq(seq: &mut [Symbol], k: usize) -> bool {
    for i in (0..seq.len()).rev() {
        if (seq[i] as usize) + 1 < k {
            seq[i] += 1;
            return true;
        }
        seq[i] = 0;
    }
    false
}

impl<'a> EveModel<'a> {
    pub fn new(setup: &TwoDmbcSetup, cb: &'a IccCodebook) -> Result<Self> {
        let plan = cb.plan();
        let limit = crate::guard_bits();
        if plan.eta > limit {
            return Err(Error::GuardExceeded(format!("eta = {} exceeds 2^{limit}", plan.eta)));
        }
        let aux = cb.aux();
        let fwd = &setup.forward;
        let (ny, nzf) = (fwd.legit_output().size(), fwd.eve_output().size());
        let mut log_yz = vec![0.0; ny * nzf];
        for y in 0..ny {
            for z in 0..nzf {
                let p: f64 = (0..fwd.input().size()).map(|x| aux.p_xf.prob(x) * fwd.prob(x, y, z)).sum();
                log_yz[y * nzf + z] = log2_or_neg_inf(p);
            }
        }
        let eve_b = setup.backward.eve_channel();
        let nzb = setup.backward.eve_output().size();
        let nw = aux.p_w1.size();
        let mut log_zw = vec![0.0; nw * nzb];
        for w in 0..nw {
            for z in 0..nzb {
                let p: f64 =
                    (0..setup.backward.input().size()).map(|x| aux.p_xb_given_w1.prob(w, x) * eve_b.prob(x, z)).sum();
                log_zw[w * nzb + z] = log2_or_neg_inf(p);
            }
        }
        let p_y = fwd.legit_channel().push_forward(&aux.p_xf)?;
        let nf = cb.v_book().len();
        let (qmap, mut prior_f) = match plan.kind {
            PlanKind::Special => {
                let prior = cb
                    .v_book()
                    .iter()
                    .map(|y| y.iter().map(|&s| p_y.prob(s as usize)).product())
                    .collect::<Vec<f64>>();
                (None, prior)
            }
            PlanKind::General => {
                let bits = plan.n_f as f64 * (ny as f64).log2();
                if bits > limit as f64 + 1e-9 {
                    return Err(Error::GuardExceeded(format!("{ny}^{} forward receptions exceed 2^{limit}", plan.n_f)));
                }
                let mut map = Vec::with_capacity(ny.pow(plan.n_f as u32));
                let mut prior = vec![0.0; nf];
                let mut y = vec![0 as Symbol; plan.n_f];
                loop {
                    let q = cb.quantize(&y);
                    map.push(q.map_or(NO_CELL, |f| f as u32));
                    if let Some(f) = q {
                        prior[f] += y.iter().map(|&s| p_y.prob(s as usize)).product::<f64>();
                    }
                    if !next_seq(&mut y, ny) {
                        break;
                    }
                }
                (Some(map), prior)
            }
        };
        let total: f64 = prior_f.iter().sum();
        if !(total > 0.0) {
            return Err(Error::Infeasible("Bob aborts with probability one".into()));
        }
        prior_f.iter_mut().for_each(|p| *p /= total);
        let nb = cb.w1_book().len();
        let mut prior_s = vec![0.0; cb.partition().num_keys()];
        for (f, pf) in prior_f.iter().enumerate() {
            for b in 0..nb {
                prior_s[cb.derive_key(f, b)? as usize] += pf / nb as f64;
            }
        }
        Ok(EveModel { cb, ny, nzf, log_yz, nzb, log_zw, qmap, prior_f, prior_s })
    }

    /// `P(F = f)` given that Bob did not abort.
    pub fn prior_f(&self) -> &[f64] {
        &self.prior_f
    }

    /// Exact law of the key.
    pub fn prior(&self) -> &[f64] {
        &self.prior_s
    }

    /// `log2 P(F = f, Z_f = z_f)` up to a constant shared by all `f`.
    fn forward_weights(&self, z_f: &[Symbol]) -> Vec<f64> {
        let plan = self.cb.plan();
        let seq_weight = |y: &[Symbol]| -> f64 {
            y.iter().zip(z_f).map(|(&a, &z)| self.log_yz[a as usize * self.nzf + z as usize]).sum()
        };
        match &self.qmap {
            None => {
                let heads = self.cb.code().packed().0;
                heads.scores(self.cb.v_book().len(), |i, y| self.log_yz[y as usize * self.nzf + z_f[i] as usize])
            }
            Some(map) => {
                let logs: Vec<(u32, f64)> = {
                    let mut out = Vec::with_capacity(map.len());
                    let mut y = vec![0 as Symbol; plan.n_f];
                    for &cell in map {
                        if cell != NO_CELL {
                            out.push((cell, seq_weight(&y)));
                        }
                        next_seq(&mut y, self.ny);
                    }
                    out
                };
                let top = logs.iter().map(|l| l.1).fold(f64::NEG_INFINITY, f64::max);
                let mut acc = vec![0.0; self.cb.v_book().len()];
                if top.is_finite() {
                    for (cell, l) in logs {
                        acc[cell as usize] += (l - top).exp2();
                    }
                }
                acc.into_iter().map(log2_or_neg_inf).collect()
            }
        }
    }

    /// `P(S = s | z_f, z_b)` for every key.
    pub fn posterior(&self, z_f: &[Symbol], z_b: &[Symbol]) -> Result<Vec<f64>> {
        let plan = self.cb.plan();
        if z_f.len() != plan.n_f || z_b.len() != plan.n_b {
            return Err(Error::InvalidArgument(format!(
                "observation lengths ({}, {}) do not match the plan ({}, {})",
                z_f.len(),
                z_b.len(),
                plan.n_f,
                plan.n_b
            )));
        }
        let (z_info, z_par) = z_b.split_at(plan.n_b1);
        let fw = self.forward_weights(z_f);
        let (_, tails, parities) = self.cb.code().packed();
        let score = |z: &[Symbol]| {
            let z = z.to_vec();
            move |i: usize, w: Symbol| self.log_zw[w as usize * self.nzb + z[i] as usize]
        };
        let info = tails.scores(self.cb.w1_book().len(), score(z_info));
        let nb = info.len();
        let par = parities.scores(fw.len() * nb, score(z_par));
        let mut logw = vec![f64::NEG_INFINITY; fw.len() * nb];
        let mut top = f64::NEG_INFINITY;
        for (f, &a) in fw.iter().enumerate() {
            if a == f64::NEG_INFINITY {
                continue;
            }
            for (b, &i) in info.iter().enumerate() {
                let l = a + i;
                if l == f64::NEG_INFINITY {
                    continue;
                }
                let l = l + par[f * nb + b];
                logw[f * nb + b] = l;
                top = top.max(l);
            }
        }
        if top == f64::NEG_INFINITY {
            return Err(Error::InvalidArgument("observation has zero probability under the model".into()));
        }
        let mut post = vec![0.0; self.prior_s.len()];
        let g = self.cb.partition();
        // pairs are flattened as f * nb + b, the partition's own indexing
        for (pair, &l) in logw.iter().enumerate() {
            if l > f64::NEG_INFINITY {
                post[g.key_of_pair(pair) as usize] += (l - top).exp2();
            }
        }
        let z: f64 = post.iter().sum();
        post.iter_mut().for_each(|p| *p /= z);
        Ok(post)
    }
}

/// Eve's check decoder: given the key `s` and the second-level indices
/// `(f2, b2)`, the unique pair in that sub-book whose codeword is bipartite
/// jointly typical with `(z_f, z_b)` for `(P_{V,Z_f}, P_{W1,Z_b})`.
pub fn check_decode(
    cb: &IccCodebook,
    s: u32,
    f2: usize,
    b2: usize,
    z_f: &[Symbol],
    z_b: &[Symbol],
) -> Result<Option<(usize, usize)>> {
    let plan = cb.plan();
    if z_f.len() != plan.n_f || z_b.len() != plan.n_b {
        return Err(Error::InvalidArgument("observation lengths do not match the plan".into()));
    }
    if s as usize >= cb.partition().num_keys() {
        return Err(Error::IndexOutOfRange { index: s as usize, count: cb.partition().num_keys() });
    }
    let test = cb.eve_test();
    let mut found = None;
    for (f, b) in cb.partition().preimage(s) {
        if cb.f_ind(f).0 != f2 || cb.b_ind(b).0 != b2 {
            continue;
        }
        let w = cb.encode_index(f, b)?;
        let sums = test.head_sums(&w.head, z_f) + test.tail_sums(&w.tail, z_b);
        if test.accepts(sums, plan.n_f, plan.n_b) {
            if found.is_some() {
                return Ok(None);
            }
            found = Some((f, b));
        }
    }
    Ok(found)
}

/// Fano's inequality `H(X|Y) <= h(p_e) + p_e log2(m - 1)` for an `m`-ary
/// estimate with error probability `p_e`.
pub fn fano_bound(p_e: f64, m: usize) -> f64 {
    let p = p_e.clamp(0.0, 1.0);
    let extra = if m > 1 { p * ((m - 1) as f64).log2() } else { 0.0 };
    binary_entropy(p) + extra
}
