//! Reference implementations used as oracles. Nothing here calls into
//! `qdyn_core`; they are written from the operator's definition alone.

#![allow(dead_code, clippy::needless_range_loop)]

/// `x'_k = (θ_k x_k / 2)(x_k + 2 Σ_{i≠k} x_i)`, term by term.
pub fn h_ref(theta: &[f64], x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|k| {
            let others: f64 = (0..n).filter(|&i| i != k).map(|i| x[i]).sum();
            theta[k] * x[k] / 2.0 * (x[k] + 2.0 * others)
        })
        .collect()
}

/// Jacobian of [`h_ref`] by differentiating each term by hand.
pub fn jac_ref(theta: &[f64], x: &[f64]) -> Vec<Vec<f64>> {
    let n = x.len();
    let total: f64 = x.iter().sum();
    (0..n)
        .map(|k| {
            (0..n)
                .map(|j| if j == k { theta[k] * total } else { theta[k] * x[k] })
                .collect()
        })
        .collect()
}

/// Central finite-difference Jacobian of `f`.
pub fn fd_jacobian(f: impl Fn(&[f64]) -> Vec<f64>, x: &[f64], h: f64) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[j] += h;
        xm[j] -= h;
        let (fp, fm) = (f(&xp), f(&xm));
        cols.push((0..n).map(|i| (fp[i] - fm[i]) / (2.0 * h)).collect::<Vec<f64>>());
    }
    (0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect()
}

/// Gaussian elimination with partial pivoting; `None` when singular.
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-300 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Determinant by elimination with partial pivoting.
pub fn det_ref(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(c, p);
            det = -det;
        }
        det *= a[c][c];
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
        }
    }
    det
}

/// Fixed point on `support` by solving `x_k + 2Σ_{i∈S,i≠k} x_i = 2/θ_k`
/// for `k ∈ S` directly.
pub fn fixed_point_by_elimination(theta: &[f64], support: &[usize]) -> Vec<f64> {
    let m = support.len();
    let a = (0..m)
        .map(|r| (0..m).map(|c| if r == c { 1.0 } else { 2.0 }).collect())
        .collect();
    let b = support.iter().map(|&k| 2.0 / theta[k]).collect();
    let sol = solve_dense(a, b).expect("coefficient matrix is nonsingular");
    let mut x = vec![0.0; theta.len()];
    for (i, &k) in support.iter().enumerate() {
        x[k] = sol[i];
    }
    x
}

pub fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Newton on `H(x) − x = 0` from every node of a uniform grid over
/// `[lo, hi]ⁿ`. Returns the distinct roots found (merged within `merge`).
pub fn newton_grid_roots(theta: &[f64], lo: f64, hi: f64, per_axis: usize, merge: f64) -> Vec<Vec<f64>> {
    let n = theta.len();
    let mut roots: Vec<Vec<f64>> = Vec::new();
    let total = per_axis.pow(n as u32);
    for idx in 0..total {
        let mut x: Vec<f64> = (0..n)
            .map(|k| {
                let i = (idx / per_axis.pow(k as u32)) % per_axis;
                lo + (hi - lo) * i as f64 / (per_axis - 1) as f64
            })
            .collect();
        let mut converged = false;
        for _ in 0..100 {
            let f: Vec<f64> = h_ref(theta, &x).iter().zip(&x).map(|(h, v)| h - v).collect();
            if norm_inf(&f) <= 1e-12 * norm_inf(&x).max(1.0) {
                converged = true;
                break;
            }
            let mut j = jac_ref(theta, &x);
            for (k, row) in j.iter_mut().enumerate() {
                row[k] -= 1.0;
            }
            let Some(step) = solve_dense(j, f.iter().map(|v| -v).collect()) else {
                break;
            };
            for (xi, s) in x.iter_mut().zip(&step) {
                *xi += s;
            }
            if !x.iter().all(|v| v.is_finite()) || norm_inf(&x) > 1e6 {
                break;
            }
        }
        if converged && !roots.iter().any(|r| max_diff(r, &x) <= merge) {
            roots.push(x);
        }
    }
    roots
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// `2Σx − x_k ≤ 2/θ_k` for every k (decay region), or `≥` (escape region).
pub fn in_general_region(theta: &[f64], x: &[f64], decay: bool) -> bool {
    let total: f64 = x.iter().sum();
    theta.iter().zip(x).all(|(t, xk)| {
        let g = 2.0 * total - xk;
        let bound = 2.0 / t;
        if decay {
            g <= bound * (1.0 + 1e-14)
        } else {
            g >= bound * (1.0 - 1e-14)
        }
    })
}

/// Roots of `λ² + bλ + c` by the quadratic formula, as `(re, im)` pairs.
pub fn quadratic_roots(b: f64, c: f64) -> [(f64, f64); 2] {
    let d = b * b - 4.0 * c;
    if d >= 0.0 {
        let s = d.sqrt();
        [((-b + s) / 2.0, 0.0), ((-b - s) / 2.0, 0.0)]
    } else {
        let s = (-d).sqrt();
        [(-b / 2.0, s / 2.0), (-b / 2.0, -s / 2.0)]
    }
}

/// The fitted quintic for the planar boundary at θ = (0.4, 0.6).
pub fn fitted_quintic(x: f64) -> f64 {
    -0.0046 * x.powi(5) + 0.069 * x.powi(4) - 0.3987 * x.powi(3) + 1.222 * x.powi(2) - 2.5674 * x + 3.3333
}
