//! Minimal deterministic Nelder-Mead simplex minimizer. Objectives may
//! return `f64::INFINITY` to mark infeasible points.

/// Minimizes `f` from `x0` with per-coordinate initial simplex scales.
/// Returns the best value and point found.
pub fn minimize<F>(mut f: F, x0: &[f64], scales: &[f64], max_iter: usize) -> (f64, Vec<f64>)
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += scales[i];
        simplex.push(p);
    }
    let mut vals: Vec<f64> = simplex.iter_mut().map(|p| f(p)).collect();

    for _ in 0..max_iter {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&i, &j| vals[i].partial_cmp(&vals[j]).unwrap_or(std::cmp::Ordering::Equal));
        let simplex2: Vec<Vec<f64>> = order.iter().map(|&i| simplex[i].clone()).collect();
        let vals2: Vec<f64> = order.iter().map(|&i| vals[i]).collect();
        simplex = simplex2;
        vals = vals2;

        if vals[0].is_finite()
            && vals[n].is_finite()
            && (vals[n] - vals[0]).abs() <= 1e-15 * (1.0 + vals[0].abs())
        {
            break;
        }

        let mut centroid = vec![0.0; n];
        for p in simplex.iter().take(n) {
            for (c, x) in centroid.iter_mut().zip(p) {
                *c += x / n as f64;
            }
        }
        let at = |alpha: f64, worst: &[f64]| -> Vec<f64> {
            centroid
                .iter()
                .zip(worst)
                .map(|(c, w)| c + alpha * (c - w))
                .collect()
        };

        let reflected = at(1.0, &simplex[n]);
        let fr = f(&reflected);
        if fr < vals[0] {
            let expanded = at(2.0, &simplex[n]);
            let fe = f(&expanded);
            if fe < fr {
                simplex[n] = expanded;
                vals[n] = fe;
            } else {
                simplex[n] = reflected;
                vals[n] = fr;
            }
        } else if fr < vals[n - 1] {
            simplex[n] = reflected;
            vals[n] = fr;
        } else {
            let contracted = at(-0.5, &simplex[n]);
            let fc = f(&contracted);
            if fc < vals[n] {
                simplex[n] = contracted;
                vals[n] = fc;
            } else {
                for i in 1..=n {
                    let base = simplex[0].clone();
                    for (x, b) in simplex[i].iter_mut().zip(&base) {
                        *x = b + 0.5 * (*x - b);
                    }
                    vals[i] = f(&simplex[i]);
                }
            }
        }
    }

    let mut best = 0;
    for i in 1..=n {
        if vals[i] < vals[best] {
            best = i;
        }
    }
    (vals[best], simplex[best].clone())
}
