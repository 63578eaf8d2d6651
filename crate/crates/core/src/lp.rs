//! Dense phase-one simplex for small linear feasibility problems.

/// Finds `x >= 0` with `a x = b`, or `None` when the system is infeasible
/// (phase-one optimum above `tol`). Bland's rule keeps it cycle-free.
pub(crate) fn feasible_point(a: &[Vec<f64>], b: &[f64], tol: f64) -> Option<Vec<f64>> {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let width = n + m + 1;
    // tableau rows: constraints with artificial slack columns, rhs last
    let mut t: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .enumerate()
        .map(|(i, (row, &rhs))| {
            let sign = if rhs < 0.0 { -1.0 } else { 1.0 };
            let mut r = Vec::with_capacity(width);
            r.extend(row.iter().map(|v| v * sign));
            r.extend((0..m).map(|j| if j == i { 1.0 } else { 0.0 }));
            r.push(rhs * sign);
            r
        })
        .collect();
    let mut basis: Vec<usize> = (n..n + m).collect();
    // reduced costs of the phase-one objective (sum of artificials)
    let mut cost = vec![0.0; width];
    for r in &t {
        for (c, v) in cost.iter_mut().zip(r) {
            *c -= v;
        }
    }
    for c in cost.iter_mut().skip(n).take(m) {
        *c = 0.0;
    }
    const EPS: f64 = 1e-12;
    for _ in 0..10_000 {
        let Some(enter) = (0..n + m).find(|&j| cost[j] < -EPS) else { break };
        let mut leave = None;
        let mut best = f64::INFINITY;
        for (i, r) in t.iter().enumerate() {
            if r[enter] > EPS {
                let ratio = r[width - 1] / r[enter];
                if ratio < best - EPS || (ratio < best + EPS && leave.is_some_and(|l: usize| basis[i] < basis[l])) {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        // phase one is bounded below, so an entering column always has a pivot
        let leave = leave?;
        let pivot = t[leave][enter];
        t[leave].iter_mut().for_each(|v| *v /= pivot);
        let pivot_row = t[leave].clone();
        for (i, r) in t.iter_mut().enumerate() {
            if i != leave && r[enter].abs() > 0.0 {
                let f = r[enter];
                r.iter_mut().zip(&pivot_row).for_each(|(v, p)| *v -= f * p);
            }
        }
        let f = cost[enter];
        cost.iter_mut().zip(&pivot_row).for_each(|(c, p)| *c -= f * p);
        basis[leave] = enter;
    }
    let infeasibility: f64 = t
        .iter()
        .zip(&basis)
        .filter(|(_, &j)| j >= n)
        .map(|(r, _)| r[width - 1])
        .sum();
    if infeasibility > tol {
        return None;
    }
    let mut x = vec![0.0; n];
    for (r, &j) in t.iter().zip(&basis) {
        if j < n {
            x[j] = r[width - 1].max(0.0);
        }
    }
    Some(x)
}
