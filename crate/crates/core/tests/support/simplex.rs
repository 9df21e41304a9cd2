//! Textbook two-phase dense tableau simplex with Bland's rule, used as an
//! oracle against the production LP path.

use gridshutoff::milp::{MilpProblem, Relation, Sense};

const EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Optimal { objective: f64, x: Vec<f64> },
    Infeasible,
    Unbounded,
}

/// `max c x  s.t.  rows, lo <= x <= hi` in the problem's own sense, with an
/// optional bound override per variable.
pub fn solve(p: &MilpProblem, overrides: &[(usize, f64, f64)]) -> Outcome {
    let n = p.num_vars();
    let mut lo: Vec<f64> = p.variables().iter().map(|v| v.lower).collect();
    let mut hi: Vec<f64> = p.variables().iter().map(|v| v.upper).collect();
    for &(j, l, h) in overrides {
        lo[j] = l;
        hi[j] = h;
    }
    if (0..n).any(|j| lo[j] > hi[j]) {
        return Outcome::Infeasible;
    }
    let sign = if p.sense() == Sense::Maximize { 1.0 } else { -1.0 };

    // x_j = shift_j + sum_k m_jk u_k with u >= 0.
    let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut shift = vec![0.0; n];
    let mut nu = 0;
    let mut extra_rows: Vec<(Vec<(usize, f64)>, f64)> = Vec::new();
    for j in 0..n {
        if lo[j].is_finite() {
            shift[j] = lo[j];
            cols[j].push((nu, 1.0));
            if hi[j].is_finite() {
                extra_rows.push((vec![(nu, 1.0)], hi[j] - lo[j]));
            }
            nu += 1;
        } else if hi[j].is_finite() {
            shift[j] = hi[j];
            cols[j].push((nu, -1.0));
            nu += 1;
        } else {
            cols[j].push((nu, 1.0));
            cols[j].push((nu + 1, -1.0));
            nu += 2;
        }
    }

    // Rows in u-space: (coeffs, relation, rhs).
    let mut rows: Vec<(Vec<f64>, Relation, f64)> = Vec::new();
    for c in p.constraints() {
        let mut a = vec![0.0; nu];
        let mut rhs = c.rhs;
        for (v, coef) in &c.terms {
            rhs -= coef * shift[v.0];
            for (k, m) in &cols[v.0] {
                a[*k] += coef * m;
            }
        }
        rows.push((a, c.relation, rhs));
    }
    for (terms, rhs) in extra_rows {
        let mut a = vec![0.0; nu];
        for (k, m) in terms {
            a[k] = m;
        }
        rows.push((a, Relation::Le, rhs));
    }
    let mut cost = vec![0.0; nu];
    for j in 0..n {
        let cj = sign * p.objective()[j];
        for (k, m) in &cols[j] {
            cost[*k] += cj * m;
        }
    }

    let u = match tableau_max(&cost, rows) {
        Tab::Optimal(u) => u,
        Tab::Infeasible => return Outcome::Infeasible,
        Tab::Unbounded => return Outcome::Unbounded,
    };
    let x: Vec<f64> = (0..n)
        .map(|j| shift[j] + cols[j].iter().map(|(k, m)| m * u[*k]).sum::<f64>())
        .collect();
    let objective = p.offset() + p.objective().iter().zip(&x).map(|(c, v)| c * v).sum::<f64>();
    Outcome::Optimal { objective, x }
}

enum Tab {
    Optimal(Vec<f64>),
    Infeasible,
    Unbounded,
}

/// max cost.u, u >= 0, rows.
fn tableau_max(cost: &[f64], rows: Vec<(Vec<f64>, Relation, f64)>) -> Tab {
    let nu = cost.len();
    let m = rows.len();
    let n_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    // Columns: u | slacks | artificials | rhs
    let n_art = m;
    let width = nu + n_slack + n_art + 1;
    let mut t = vec![vec![0.0; width]; m];
    let mut basis = vec![0usize; m];
    let mut s = 0;
    for (i, (a, rel, rhs)) in rows.into_iter().enumerate() {
        let flip = if rhs < 0.0 { -1.0 } else { 1.0 };
        for k in 0..nu {
            t[i][k] = flip * a[k];
        }
        match rel {
            Relation::Le => {
                t[i][nu + s] = flip;
                s += 1;
            }
            Relation::Ge => {
                t[i][nu + s] = -flip;
                s += 1;
            }
            Relation::Eq => {}
        }
        t[i][nu + n_slack + i] = 1.0;
        t[i][width - 1] = flip * rhs;
        basis[i] = nu + n_slack + i;
    }
    let art0 = nu + n_slack;

    // Phase 1: maximize -sum(artificials).
    let mut obj1 = vec![0.0; width];
    for k in art0..art0 + n_art {
        obj1[k] = -1.0;
    }
    if !run(&mut t, &mut basis, &obj1, width - 1) {
        return Tab::Unbounded;
    }
    let infeas: f64 = (0..m).filter(|&i| basis[i] >= art0).map(|i| t[i][width - 1]).sum();
    if infeas > 1e-7 {
        return Tab::Infeasible;
    }
    // Drive zero-level artificials out of the basis or drop redundant rows.
    let mut i = 0;
    while i < t.len() {
        if basis[i] >= art0 {
            if let Some(k) = (0..art0).find(|&k| t[i][k].abs() > EPS) {
                pivot(&mut t, &mut basis, i, k);
                i += 1;
            } else {
                t.remove(i);
                basis.remove(i);
            }
        } else {
            i += 1;
        }
    }
    // Phase 2 over real columns only: forbid artificials from entering.
    let mut obj2 = vec![0.0; width];
    obj2[..nu].copy_from_slice(cost);
    if !run(&mut t, &mut basis, &obj2, art0) {
        return Tab::Unbounded;
    }
    let mut u = vec![0.0; nu];
    for (i, &b) in basis.iter().enumerate() {
        if b < nu {
            u[b] = t[i][width - 1];
        }
    }
    Tab::Optimal(u)
}

/// Maximizes `obj` with Bland's rule over entering columns `< limit`.
/// Returns false when unbounded.
fn run(t: &mut [Vec<f64>], basis: &mut [usize], obj: &[f64], limit: usize) -> bool {
    let width = obj.len();
    // reduced costs d = obj - obj_B T, kept current through pivots
    let mut d = obj.to_vec();
    for (i, &b) in basis.iter().enumerate() {
        if obj[b] != 0.0 {
            for k in 0..width {
                d[k] -= obj[b] * t[i][k];
            }
        }
    }
    loop {
        let Some(k) = (0..limit).find(|&k| d[k] > EPS && !basis.contains(&k)) else {
            return true;
        };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..t.len() {
            if t[i][k] > EPS {
                let ratio = t[i][width - 1] / t[i][k];
                let better = match leave {
                    None => true,
                    Some((r, best)) => ratio < best - EPS || (ratio <= best + EPS && basis[i] < basis[r]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((r, _)) = leave else { return false };
        pivot(t, basis, r, k);
        let f = d[k];
        for (x, y) in d.iter_mut().zip(&t[r]) {
            *x -= f * y;
        }
    }
}

fn pivot(t: &mut [Vec<f64>], basis: &mut [usize], r: usize, k: usize) {
    let p = t[r][k];
    for v in t[r].iter_mut() {
        *v /= p;
    }
    let row = t[r].clone();
    for (i, line) in t.iter_mut().enumerate() {
        if i != r {
            let f = line[k];
            if f != 0.0 {
                for (x, y) in line.iter_mut().zip(&row) {
                    *x -= f * y;
                }
            }
        }
    }
    basis[r] = k;
}
