//! Small dense linear algebra used by the estimators. Matrices are flat
//! row-major slices with explicit dimensions; sizes here are tiny (at most a
//! few dozen columns), so simple algorithms are adequate.

/// Least-squares solution of an overdetermined system via Householder QR.
#[derive(Debug, Clone)]
pub(crate) struct Lstsq {
    pub coef: Vec<f64>,
    /// Upper-triangular R factor, p-by-p row-major (entries below the
    /// diagonal are zero).
    pub r: Vec<f64>,
    /// Residual sum of squares of the fit.
    pub rss: f64,
}

impl Lstsq {
    /// Ratio of the largest to the smallest |R| diagonal entry. A crude but
    /// effective estimate of the design matrix condition number.
    pub fn condition(&self) -> f64 {
        let p = self.coef.len();
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for k in 0..p {
            let d = self.r[k * p + k].abs();
            lo = lo.min(d);
            hi = hi.max(d);
        }
        if lo == 0.0 {
            f64::INFINITY
        } else {
            hi / lo
        }
    }

    /// Diagonal of (XᵀX)⁻¹, computed from R. Multiply by the residual
    /// variance to get squared standard errors.
    pub fn unscaled_coef_variances(&self) -> Vec<f64> {
        let p = self.coef.len();
        // (XᵀX)⁻¹ = R⁻¹R⁻ᵀ, so the (j,j) entry is ‖R⁻ᵀeⱼ‖², obtained by
        // forward substitution on the lower-triangular Rᵀ.
        let mut vars = vec![0.0; p];
        for j in 0..p {
            let mut w = vec![0.0; p];
            for i in 0..p {
                let mut s = if i == j { 1.0 } else { 0.0 };
                for k in 0..i {
                    s -= self.r[k * p + i] * w[k];
                }
                w[i] = s / self.r[i * p + i];
            }
            vars[j] = w.iter().map(|v| v * v).sum();
        }
        vars
    }
}

/// Solves min ‖Xb − y‖² for an n-by-p row-major `x` with n ≥ p.
/// Returns `None` when a QR pivot underflows to zero (exactly collinear
/// columns); near-singularity is left to the caller via [`Lstsq::condition`].
pub(crate) fn lstsq(x: &[f64], n: usize, p: usize, y: &[f64]) -> Option<Lstsq> {
    assert_eq!(x.len(), n * p, "design matrix shape mismatch");
    assert_eq!(y.len(), n, "response length mismatch");
    assert!(n >= p, "system is underdetermined");

    let mut a = x.to_vec();
    let mut b = y.to_vec();

    for k in 0..p {
        let mut norm = 0.0;
        for i in k..n {
            norm += a[i * p + k] * a[i * p + k];
        }
        let norm = norm.sqrt();
        if norm == 0.0 {
            return None;
        }
        let alpha = if a[k * p + k] > 0.0 { -norm } else { norm };
        // Householder vector lives in column k below the diagonal.
        a[k * p + k] -= alpha;
        let mut vtv = 0.0;
        for i in k..n {
            vtv += a[i * p + k] * a[i * p + k];
        }
        if vtv > 0.0 {
            for j in (k + 1)..p {
                let mut dot = 0.0;
                for i in k..n {
                    dot += a[i * p + k] * a[i * p + j];
                }
                let f = 2.0 * dot / vtv;
                for i in k..n {
                    a[i * p + j] -= f * a[i * p + k];
                }
            }
            let mut dot = 0.0;
            for i in k..n {
                dot += a[i * p + k] * b[i];
            }
            let f = 2.0 * dot / vtv;
            for i in k..n {
                b[i] -= f * a[i * p + k];
            }
        }
        a[k * p + k] = alpha;
    }

    let mut r = vec![0.0; p * p];
    for i in 0..p {
        for j in i..p {
            r[i * p + j] = a[i * p + j];
        }
    }

    let mut coef = vec![0.0; p];
    for i in (0..p).rev() {
        let mut s = b[i];
        for j in (i + 1)..p {
            s -= r[i * p + j] * coef[j];
        }
        if r[i * p + i] == 0.0 {
            return None;
        }
        coef[i] = s / r[i * p + i];
    }

    let rss = b[p..n].iter().map(|v| v * v).sum();
    Some(Lstsq { coef, r, rss })
}

/// Eigen decomposition of a symmetric n-by-n matrix by cyclic Jacobi
/// rotations. Returns (eigenvalue, eigenvector) pairs sorted by descending
/// eigenvalue.
pub(crate) fn sym_eigen(matrix: &[f64], n: usize) -> Vec<(f64, Vec<f64>)> {
    assert_eq!(matrix.len(), n * n, "matrix shape mismatch");
    let mut a = matrix.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[i * n + j] * a[i * n + j];
            }
        }
        if off < 1e-24 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut pairs: Vec<(f64, Vec<f64>)> = (0..n)
        .map(|j| {
            let val = a[j * n + j];
            let vec: Vec<f64> = (0..n).map(|i| v[i * n + j]).collect();
            (val, vec)
        })
        .collect();
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    pairs
}
