//! Closed-form evaluation of the rate terms from flat probability tables.

use serde::{Deserialize, Serialize};

use crate::channels::Dmbc;
use crate::probability::surprisal_term;

/// Margin by which the rate constraint must hold.
pub const CONSTRAINT_SLACK: f64 = 1e-9;

/// Smallest ratio reported when the objective favors a vanishing share.
pub const TAU_MIN: f64 = 1e-6;

/// The four quantities one direction's objective is built from.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DirectionRates {
    /// First-round secrecy component.
    pub r1: f64,
    /// Second-round secrecy component (unclamped).
    pub r2: f64,
    /// First-round cost `I(V;Y|X)`.
    pub c1: f64,
    /// Second-round budget `I(W1;Y_b)`.
    pub c2: f64,
}

/// The best ratio for fixed rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioChoice {
    pub feasible: bool,
    /// `tau * r1 + (1 - tau) * r2'`, with `r2'` clamped or not.
    pub value: f64,
    /// Initiator's share of channel uses.
    pub tau: f64,
    /// `(1 - tau) c2 - tau c1`.
    pub slack: f64,
}

/// Maximizes the linear objective in `tau` over the feasible interval
/// `tau c1 <= (1 - tau) c2 - CONSTRAINT_SLACK`; the optimum sits at one of
/// its ends.
pub fn best_ratio(rates: DirectionRates, clamp: bool) -> RatioChoice {
    let DirectionRates { r1, r2, c1, c2 } = rates;
    let r2 = if clamp { r2.max(0.0) } else { r2 };
    if !(c2 > CONSTRAINT_SLACK) {
        return RatioChoice { feasible: false, value: 0.0, tau: 0.0, slack: c2 };
    }
    let c1 = c1.max(0.0);
    let hi = ((c2 - CONSTRAINT_SLACK) / (c1 + c2)).min(1.0 - TAU_MIN);
    let lo = TAU_MIN.min(hi);
    let at = |tau: f64| tau * r1 + (1.0 - tau) * r2;
    let tau = if at(hi) >= at(lo) { hi } else { lo };
    RatioChoice { feasible: true, value: at(tau), tau, slack: (1.0 - tau) * c2 - tau * c1 }
}

/// Value at the largest feasible ratio (the constraint-tight plan).
pub fn tight_ratio(rates: DirectionRates, clamp: bool) -> RatioChoice {
    let DirectionRates { r1, r2, c1, c2 } = rates;
    let r2 = if clamp { r2.max(0.0) } else { r2 };
    if !(c2 > CONSTRAINT_SLACK) {
        return RatioChoice { feasible: false, value: 0.0, tau: 0.0, slack: c2 };
    }
    let c1 = c1.max(0.0);
    let tau = ((c2 - CONSTRAINT_SLACK) / (c1 + c2)).min(1.0 - TAU_MIN);
    RatioChoice { feasible: true, value: tau * r1 + (1.0 - tau) * r2, tau, slack: (1.0 - tau) * c2 - tau * c1 }
}

fn h(table: &[f64]) -> f64 {
    table.iter().map(|&p| surprisal_term(p)).sum()
}

/// Dense copy of a broadcast channel's law.
#[derive(Debug, Clone)]
pub(crate) struct ChannelTables {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    /// `w[x][y * nz + z]`
    pub w: Vec<Vec<f64>>,
}

impl ChannelTables {
    pub fn new(d: &Dmbc) -> Self {
        ChannelTables {
            nx: d.input().size(),
            ny: d.legit_output().size(),
            nz: d.eve_output().size(),
            w: d.law().rows().iter().map(|r| r.probs().to_vec()).collect(),
        }
    }

    fn wy(&self, x: usize, y: usize) -> f64 {
        (0..self.nz).map(|z| self.w[x][y * self.nz + z]).sum()
    }

    fn wz(&self, x: usize, z: usize) -> f64 {
        (0..self.ny).map(|y| self.w[x][y * self.nz + z]).sum()
    }
}

/// Forward-side terms for input law `px` and quantizer rows `q[y][v]`.
/// Returns `(I(V;X) - I(V;Z), I(V;Y|X), I(V;X|Z))`; the last is computed
/// only when `with_sd` is set (NaN otherwise).
pub(crate) fn forward_terms(ch: &ChannelTables, px: &[f64], q: &[Vec<f64>], with_sd: bool) -> (f64, f64, f64) {
    let (nx, ny, nz) = (ch.nx, ch.ny, ch.nz);
    let nv = q.first().map_or(0, Vec::len);
    let mut pxv = vec![0.0; nx * nv];
    let mut pyz = vec![0.0; ny * nz];
    let mut pxzv = if with_sd { vec![0.0; nx * nz * nv] } else { Vec::new() };
    let mut pxz = if with_sd { vec![0.0; nx * nz] } else { Vec::new() };
    for x in 0..nx {
        for y in 0..ny {
            let mut pxy = 0.0;
            for z in 0..nz {
                let p = px[x] * ch.w[x][y * nz + z];
                pxy += p;
                pyz[y * nz + z] += p;
                if with_sd && p > 0.0 {
                    pxz[x * nz + z] += p;
                    for v in 0..nv {
                        pxzv[(x * nz + z) * nv + v] += p * q[y][v];
                    }
                }
            }
            if pxy > 0.0 {
                for v in 0..nv {
                    pxv[x * nv + v] += pxy * q[y][v];
                }
            }
        }
    }
    let mut py = vec![0.0; ny];
    let mut pz = vec![0.0; nz];
    let mut pzv = vec![0.0; nz * nv];
    let mut pyv = vec![0.0; ny * nv];
    for y in 0..ny {
        for z in 0..nz {
            let p = pyz[y * nz + z];
            py[y] += p;
            pz[z] += p;
            if p > 0.0 {
                for v in 0..nv {
                    pzv[z * nv + v] += p * q[y][v];
                }
            }
        }
        for v in 0..nv {
            pyv[y * nv + v] = py[y] * q[y][v];
        }
    }
    let hx = h(px);
    let h_v_given_x = h(&pxv) - hx;
    let h_v_given_z = h(&pzv) - h(&pz);
    let h_v_given_y = h(&pyv) - h(&py);
    let sd = if with_sd { h_v_given_z - (h(&pxzv) - h(&pxz)) } else { f64::NAN };
    (h_v_given_z - h_v_given_x, h_v_given_x - h_v_given_y, sd)
}

/// Backward-side terms `(I(W1;Y|W2) - I(W1;Z|W2), I(W1;Y))`.
pub(crate) fn backward_terms(
    ch: &ChannelTables,
    pw1: &[f64],
    pw2: &[Vec<f64>],
    px_w1: &[Vec<f64>],
) -> (f64, f64) {
    let (nx, ny, nz) = (ch.nx, ch.ny, ch.nz);
    let nw1 = pw1.len();
    let nw2 = pw2.first().map_or(0, Vec::len);
    let mut w1y = vec![0.0; nw1 * ny];
    let mut w1z = vec![0.0; nw1 * nz];
    for w in 0..nw1 {
        for x in 0..nx {
            let p = pw1[w] * px_w1[w][x];
            if p == 0.0 {
                continue;
            }
            for y in 0..ny {
                w1y[w * ny + y] += p * ch.wy(x, y);
            }
            for z in 0..nz {
                w1z[w * nz + z] += p * ch.wz(x, z);
            }
        }
    }
    let mut w2y = vec![0.0; nw2 * ny];
    let mut w2z = vec![0.0; nw2 * nz];
    let mut pw2m = vec![0.0; nw2];
    let mut py = vec![0.0; ny];
    for w in 0..nw1 {
        for y in 0..ny {
            py[y] += w1y[w * ny + y];
        }
        for u in 0..nw2 {
            let t = pw2[w][u];
            if t == 0.0 {
                continue;
            }
            pw2m[u] += pw1[w] * t;
            for y in 0..ny {
                w2y[u * ny + y] += t * w1y[w * ny + y];
            }
            for z in 0..nz {
                w2z[u * nz + z] += t * w1z[w * nz + z];
            }
        }
    }
    let hw1 = h(pw1);
    let hw2 = h(&pw2m);
    let h_y_w1 = h(&w1y) - hw1;
    let h_z_w1 = h(&w1z) - hw1;
    let h_y_w2 = h(&w2y) - hw2;
    let h_z_w2 = h(&w2z) - hw2;
    ((h_y_w2 - h_y_w1) - (h_z_w2 - h_z_w1), h(&py) - h_y_w1)
}

/// `(I(X;Y) - I(X;Z), I(X;Y))` for input law `px`.
pub(crate) fn input_terms(ch: &ChannelTables, px: &[f64]) -> (f64, f64) {
    let ident: Vec<Vec<f64>> = (0..ch.nx).map(|x| (0..ch.nx).map(|k| (k == x) as u8 as f64).collect()).collect();
    backward_terms(ch, px, &vec![vec![1.0]; ch.nx], &ident)
}

/// `I(X;Y|Z)` for input law `px`.
pub(crate) fn secrecy_upper_term(ch: &ChannelTables, px: &[f64]) -> f64 {
    let (nx, ny, nz) = (ch.nx, ch.ny, ch.nz);
    let mut pxz = vec![0.0; nx * nz];
    let mut pyz = vec![0.0; ny * nz];
    let mut pxyz = vec![0.0; nx * ny * nz];
    let mut pz = vec![0.0; nz];
    for x in 0..nx {
        for y in 0..ny {
            for z in 0..nz {
                let p = px[x] * ch.w[x][y * nz + z];
                pxyz[(x * ny + y) * nz + z] = p;
                pxz[x * nz + z] += p;
                pyz[y * nz + z] += p;
                pz[z] += p;
            }
        }
    }
    // H(X|Z) - H(X|Y,Z)
    (h(&pxz) - h(&pz)) - (h(&pxyz) - h(&pyz))
}
