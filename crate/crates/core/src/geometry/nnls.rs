//! Lawson-Hanson non-negative least squares and the least-distance program
//! built on it.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// `argmin_{u >= 0} |E u - f|` by the Lawson-Hanson active-set method.
pub fn nnls(e: &DMatrix<f64>, f: &DVector<f64>) -> Result<DVector<f64>> {
    let (p, m) = e.shape();
    if f.len() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            got: f.len(),
        });
    }
    let scale = e.amax().max(f.amax()).max(1.0);
    let tol = 1e-13 * scale * scale * (p.max(m) as f64);
    let mut u = DVector::<f64>::zeros(m);
    let mut passive = vec![false; m];
    let max_outer = 3 * m + 10;
    for _ in 0..max_outer {
        let w = e.transpose() * (f - e * &u);
        let pick = (0..m)
            .filter(|&j| !passive[j] && w[j] > tol)
            .max_by(|&a, &b| w[a].total_cmp(&w[b]));
        let Some(j) = pick else {
            return Ok(u);
        };
        passive[j] = true;
        loop {
            let idx: Vec<usize> = (0..m).filter(|&i| passive[i]).collect();
            let z = solve_passive(e, f, &idx)?;
            if z.iter().all(|&v| v > 0.0) {
                for (k, &i) in idx.iter().enumerate() {
                    u[i] = z[k];
                }
                break;
            }
            let mut alpha = f64::INFINITY;
            for (k, &i) in idx.iter().enumerate() {
                if z[k] <= 0.0 {
                    alpha = alpha.min(u[i] / (u[i] - z[k]));
                }
            }
            for (k, &i) in idx.iter().enumerate() {
                u[i] += alpha * (z[k] - u[i]);
                if u[i] <= tol {
                    u[i] = 0.0;
                    passive[i] = false;
                }
            }
            if idx.iter().all(|&i| !passive[i]) {
                break;
            }
        }
    }
    Err(Error::Infeasible("NNLS iteration limit reached".into()))
}

fn solve_passive(e: &DMatrix<f64>, f: &DVector<f64>, idx: &[usize]) -> Result<DVector<f64>> {
    let sub = e.select_columns(idx);
    sub.svd(true, true)
        .solve(f, 1e-14)
        .map_err(|m| Error::Infeasible(m.to_string()))
}

/// Least-distance program `min |x|^2 s.t. G x >= h` via NNLS on the dual.
/// Returns `None` when the constraints are infeasible.
///
/// The NNLS support identifies the active constraints; the answer is then
/// re-solved as the minimum-norm solution of `G_A x = h_A`, which is far
/// better conditioned than reading it off the dual residual.
pub fn ldp(g: &DMatrix<f64>, h: &DVector<f64>) -> Result<Option<DVector<f64>>> {
    let (m, d) = g.shape();
    let mut e = DMatrix::<f64>::zeros(d + 1, m);
    e.view_mut((0, 0), (d, m)).copy_from(&g.transpose());
    e.row_mut(d).copy_from(&h.transpose());
    let mut f = DVector::<f64>::zeros(d + 1);
    f[d] = 1.0;
    let u = nnls(&e, &f)?;
    let r = &e * &u - &f;
    if r.norm() <= 1e-13 || r[d] == 0.0 {
        return Ok(None);
    }
    let raw = r.rows(0, d) / -r[d];
    let active: Vec<usize> = (0..m).filter(|&i| u[i] > 0.0).collect();
    let violation = |x: &DVector<f64>| (h - g * x).max().max(0.0);
    let tol = 1e-12 * h.amax().max(1.0);
    Ok(Some(match refine(g, h, active) {
        Some(x) if violation(&x) <= tol.max(violation(&raw)) => x,
        _ => raw,
    }))
}

fn min_norm_solution(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let eps = 1e-13 * a.amax();
    a.clone().svd(true, true).solve(b, eps).ok()
}

// Primal active-set iteration: the minimum-norm solution of the active
// equalities, adding the most violated constraint or dropping the most
// negative multiplier until KKT holds.
fn refine(g: &DMatrix<f64>, h: &DVector<f64>, mut active: Vec<usize>) -> Option<DVector<f64>> {
    let m = g.nrows();
    let feas_tol = 1e-13 * h.amax().max(1.0);
    for _ in 0..(2 * m + 10) {
        if active.is_empty() {
            let worst = (0..m).max_by(|&a, &b| h[a].total_cmp(&h[b]))?;
            if h[worst] <= 0.0 {
                return Some(DVector::zeros(g.ncols()));
            }
            active.push(worst);
        }
        let ga = g.select_rows(&active);
        let ha = DVector::from_iterator(active.len(), active.iter().map(|&i| h[i]));
        let x = min_norm_solution(&ga, &ha)?;
        let lambda = min_norm_solution(&ga.transpose(), &x)?;
        let (neg_k, neg) = lambda
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(k, &v)| (k, v))?;
        if neg < -1e-12 * lambda.amax() {
            active.remove(neg_k);
            continue;
        }
        let slack = h - g * &x;
        let (worst, excess) = slack
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, &v)| (i, v))?;
        if excess > feas_tol && !active.contains(&worst) {
            active.push(worst);
            continue;
        }
        return Some(x);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nnls_matches_unconstrained_when_positive() {
        let e = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let f = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let u = nnls(&e, &f).unwrap();
        assert!((u[0] - 1.0).abs() < 1e-12 && (u[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn nnls_clamps_negative_coordinates() {
        let e = DMatrix::<f64>::identity(2, 2);
        let f = DVector::from_vec(vec![-1.0, 2.0]);
        let u = nnls(&e, &f).unwrap();
        assert_eq!(u[0], 0.0);
        assert!((u[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn ldp_half_space() {
        let g = DMatrix::from_row_slice(1, 2, &[0.0, 2.0]);
        let h = DVector::from_vec(vec![4.0]);
        let x = ldp(&g, &h).unwrap().unwrap();
        assert!(x[0].abs() < 1e-12 && (x[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn ldp_detects_infeasible() {
        let g = DMatrix::from_row_slice(2, 1, &[1.0, -1.0]);
        let h = DVector::from_vec(vec![1.0, 1.0]);
        assert!(ldp(&g, &h).unwrap().is_none());
    }
}
