//! Shared oracles for the integration suites.

use pcrlb_core::numkit::Matrix;

/// Covariance-form Kalman filter for a linear-Gaussian model observed
/// through a single output: returns the filtered covariances P_{t|t} for
/// t = 1..=horizon. Deliberately avoids the information-form recursion and
/// the SPD inversion kernel under test; the innovation variance is scalar
/// and inverted directly.
#[allow(dead_code)]
pub fn kalman_covariances(
    a: &Matrix,
    c: &Matrix,
    q: &Matrix,
    r: &Matrix,
    p0: &Matrix,
    horizon: usize,
) -> Vec<Matrix> {
    assert_eq!(c.rows(), 1, "oracle assumes a scalar measurement");
    let n = a.dim();
    let mut p = p0.clone();
    let mut out = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        // predict
        let p_pred = a.matmul(&p).matmul(&a.transpose()).add(q);
        // innovation variance and gain
        let s = c.matmul(&p_pred).matmul(&c.transpose())[(0, 0)] + r[(0, 0)];
        let pct = p_pred.matmul(&c.transpose());
        let mut k = Matrix::zeros(n, 1);
        for i in 0..n {
            k[(i, 0)] = pct[(i, 0)] / s;
        }
        // update
        let ikc = Matrix::identity(n).sub(&k.matmul(c));
        p = ikc.matmul(&p_pred);
        out.push(p.clone());
        p = p.symmetrized();
    }
    out
}

/// Worst absolute gap between the product form of the joint smoothing
/// density and the brute-force path enumeration, on a 3-point discrete
/// chain over 3 steps. Validates the decomposition itself, independent of
/// any particle machinery.
#[allow(dead_code)]
pub fn joint_decomposition_max_gap() -> f64 {
    let k = 3usize;
    let prior = [0.5, 0.3, 0.2];
    let trans = [[0.6, 0.3, 0.1], [0.2, 0.5, 0.3], [0.1, 0.2, 0.7]];
    let lik: [[f64; 3]; 3] = [[0.8, 0.1, 0.1], [0.2, 0.3, 0.5], [0.4, 0.4, 0.2]];

    // brute force over all paths x_0..x_3, marginalized onto (x_2, x_3)
    let mut joint = [[0.0f64; 3]; 3];
    let mut total = 0.0;
    for x0 in 0..k {
        for x1 in 0..k {
            for x2 in 0..k {
                for x3 in 0..k {
                    let w = prior[x0]
                        * trans[x0][x1]
                        * lik[0][x1]
                        * trans[x1][x2]
                        * lik[1][x2]
                        * trans[x2][x3]
                        * lik[2][x3];
                    joint[x2][x3] += w;
                    total += w;
                }
            }
        }
    }
    for row in &mut joint {
        for v in row.iter_mut() {
            *v /= total;
        }
    }

    // forward filtering for p(x_t | y_{1:t})
    let mut filt = prior;
    let mut filters = Vec::new();
    for t in 0..3 {
        let mut pred = [0.0f64; 3];
        for a in 0..k {
            for b in 0..k {
                pred[b] += trans[a][b] * filt[a];
            }
        }
        let mut upd = [0.0f64; 3];
        let mut norm = 0.0;
        for (b, p) in pred.iter().enumerate() {
            upd[b] = p * lik[t][b];
            norm += upd[b];
        }
        for v in &mut upd {
            *v /= norm;
        }
        filters.push((filt, upd));
        filt = upd;
    }

    // product form at the final pair (x_2, x_3)
    let (filt_t, filt_t1) = (&filters[2].0, &filters[2].1);
    let mut worst = 0.0f64;
    for b in 0..k {
        let denom: f64 = (0..k).map(|a| trans[a][b] * filt_t[a]).sum();
        for a in 0..k {
            let product = trans[a][b] * filt_t[a] * filt_t1[b] / denom;
            worst = worst.max((product - joint[a][b]).abs());
        }
    }
    worst
}

/// Largest elementwise difference relative to |b|, with entries far below
/// the matrix scale compared at the matrix scale instead.
#[allow(dead_code)]
pub fn max_rel_diff(a: &Matrix, b: &Matrix) -> f64 {
    let scale = b.max_abs().max(1e-300);
    let mut worst = 0.0f64;
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let denom = b[(i, j)].abs().max(scale * 1e-6);
            worst = worst.max((a[(i, j)] - b[(i, j)]).abs() / denom);
        }
    }
    worst
}
