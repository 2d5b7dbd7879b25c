//! Derivative-free simplex minimizer for the sum-of-squares objectives.

pub(crate) struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub converged: bool,
}

/// Nelder-Mead with the standard reflect/expand/contract/shrink coefficients.
/// Stops when the spread of objective values across the simplex falls below
/// `rel_tol` relative to the best value, or after `max_iter` iterations.
/// Non-finite objective values are treated as +inf so the simplex backs away
/// from them.
pub(crate) fn nelder_mead<F>(
    f: &mut F,
    x0: &[f64],
    step: f64,
    max_iter: usize,
    rel_tol: f64,
) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = x0.len();
    assert!(dim > 0, "objective must have at least one parameter");

    let eval = |x: &[f64], f: &mut F| {
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let v0 = eval(x0, f);
    simplex.push((x0.to_vec(), v0));
    for i in 0..dim {
        let mut x = x0.to_vec();
        x[i] += step;
        let v = eval(&x, f);
        simplex.push((x, v));
    }

    for _ in 0..max_iter {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        let best = simplex[0].1;
        let worst = simplex[dim].1;
        if worst - best <= rel_tol * (best.abs() + rel_tol) {
            let (x, value) = simplex.swap_remove(0);
            return Minimum {
                x,
                value,
                converged: true,
            };
        }

        let mut centroid = vec![0.0; dim];
        for (x, _) in &simplex[..dim] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi;
            }
        }
        for c in &mut centroid {
            *c /= dim as f64;
        }

        let worst_x = simplex[dim].0.clone();
        let reflect: Vec<f64> = centroid
            .iter()
            .zip(&worst_x)
            .map(|(c, w)| c + (c - w))
            .collect();
        let fr = eval(&reflect, f);

        if fr < simplex[0].1 {
            let expand: Vec<f64> = centroid
                .iter()
                .zip(&worst_x)
                .map(|(c, w)| c + 2.0 * (c - w))
                .collect();
            let fe = eval(&expand, f);
            simplex[dim] = if fe < fr { (expand, fe) } else { (reflect, fr) };
        } else if fr < simplex[dim - 1].1 {
            simplex[dim] = (reflect, fr);
        } else {
            let (contract, threshold): (Vec<f64>, f64) = if fr < simplex[dim].1 {
                let outside = centroid
                    .iter()
                    .zip(&reflect)
                    .map(|(c, r)| c + 0.5 * (r - c))
                    .collect();
                (outside, fr)
            } else {
                let inside = centroid
                    .iter()
                    .zip(&worst_x)
                    .map(|(c, w)| c - 0.5 * (c - w))
                    .collect();
                (inside, simplex[dim].1)
            };
            let fc = eval(&contract, f);
            if fc <= threshold {
                simplex[dim] = (contract, fc);
            } else {
                // shrink everything toward the best vertex
                let best_x = simplex[0].0.clone();
                for (x, v) in &mut simplex[1..] {
                    for (xi, bi) in x.iter_mut().zip(&best_x) {
                        *xi = bi + 0.5 * (*xi - bi);
                    }
                    *v = eval(x, f);
                }
            }
        }
    }

    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    let (x, value) = simplex.swap_remove(0);
    Minimum {
        x,
        value,
        converged: false,
    }
}
