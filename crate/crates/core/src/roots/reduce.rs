//! LLL reduction of a positive definite Gram matrix. Floating point only
//! decides which exact integer row operations to apply, so the returned
//! transform is always unimodular and the reduced Gram matrix is exact.

fn gso(g: &[Vec<i128>], upto: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut mu = vec![vec![0.0; upto + 1]; upto + 1];
    let mut b = vec![0.0; upto + 1];
    for i in 0..=upto {
        for j in 0..i {
            let mut s = g[i][j] as f64;
            for l in 0..j {
                s -= mu[j][l] * mu[i][l] * b[l];
            }
            mu[i][j] = s / b[j];
        }
        let mut s = g[i][i] as f64;
        for l in 0..i {
            s -= mu[i][l] * mu[i][l] * b[l];
        }
        b[i] = s;
    }
    (mu, b)
}

/// Row op `b_k ← b_k − q·b_j` applied to the Gram matrix and the transform.
fn reduce_row(g: &mut [Vec<i128>], t: &mut [Vec<i128>], k: usize, j: usize, q: i128) -> Option<()> {
    let n = g.len();
    for l in 0..n {
        g[k][l] = g[k][l].checked_sub(q.checked_mul(g[j][l])?)?;
    }
    for l in 0..n {
        g[l][k] = g[l][k].checked_sub(q.checked_mul(g[l][j])?)?;
    }
    for l in 0..t[k].len() {
        t[k][l] = t[k][l].checked_sub(q.checked_mul(t[j][l])?)?;
    }
    Some(())
}

fn swap(g: &mut [Vec<i128>], t: &mut [Vec<i128>], a: usize, b: usize) {
    g.swap(a, b);
    for row in g.iter_mut() {
        row.swap(a, b);
    }
    t.swap(a, b);
}

/// Returns `(T, T·G·Tᵀ)` with `T` unimodular, or `None` on overflow.
pub(crate) fn lll(g: &[Vec<i128>]) -> Option<(Vec<Vec<i128>>, Vec<Vec<i128>>)> {
    let n = g.len();
    let mut g: Vec<Vec<i128>> = g.to_vec();
    let mut t: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect();
    if n < 2 {
        return Some((t, g));
    }
    let mut k = 1;
    let mut budget = 200_000usize;
    while k < n && budget > 0 {
        budget -= 1;
        let (mut mu, _) = gso(&g, k);
        for j in (0..k).rev() {
            let q = mu[k][j].round();
            if q != 0.0 && q.is_finite() {
                let qi = q as i128;
                reduce_row(&mut g, &mut t, k, j, qi)?;
                for l in 0..j {
                    mu[k][l] -= q * mu[j][l];
                }
                mu[k][j] -= q;
            }
        }
        let (mu, b) = gso(&g, k);
        if b[k] < (0.99 - mu[k][k - 1] * mu[k][k - 1]) * b[k - 1] {
            swap(&mut g, &mut t, k, k - 1);
            k = (k - 1).max(1);
        } else {
            k += 1;
        }
    }
    Some((t, g))
}
