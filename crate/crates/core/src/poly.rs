//! Polynomial root moduli for lag-polynomial diagnostics. A fitted AR or MA
//! polynomial is stationary/invertible exactly when every root lies outside
//! the unit circle, so the minimum root modulus is the quantity of interest.

#[derive(Debug, Clone, Copy)]
struct Cx {
    re: f64,
    im: f64,
}

impl Cx {
    fn norm(self) -> f64 {
        self.re.hypot(self.im)
    }

    fn mul(self, o: Cx) -> Cx {
        Cx {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }

    fn sub(self, o: Cx) -> Cx {
        Cx {
            re: self.re - o.re,
            im: self.im - o.im,
        }
    }

    fn div(self, o: Cx) -> Cx {
        let d = o.re * o.re + o.im * o.im;
        Cx {
            re: (self.re * o.re + self.im * o.im) / d,
            im: (self.im * o.re - self.re * o.im) / d,
        }
    }
}

/// All complex roots of `c[0] + c[1]·z + … + c[n]·zⁿ` by Durand-Kerner
/// iteration, returned as (re, im) pairs. Trailing zero coefficients are
/// stripped; a constant polynomial has no roots.
pub fn roots(coeffs: &[f64]) -> Vec<(f64, f64)> {
    let mut c: Vec<f64> = coeffs.to_vec();
    while c.last() == Some(&0.0) {
        c.pop();
    }
    let deg = c.len().saturating_sub(1);
    if deg == 0 {
        return Vec::new();
    }
    let lead = c[deg];
    let monic: Vec<f64> = c.iter().map(|v| v / lead).collect();

    let eval = |z: Cx| -> Cx {
        let mut acc = Cx { re: 0.0, im: 0.0 };
        for &coef in monic.iter().rev() {
            acc = acc.mul(z);
            acc.re += coef;
        }
        acc
    };

    // Standard starting points: powers of a complex number that is not a
    // root of unity.
    let seed = Cx { re: 0.4, im: 0.9 };
    let mut z: Vec<Cx> = Vec::with_capacity(deg);
    let mut cur = Cx { re: 1.0, im: 0.0 };
    for _ in 0..deg {
        cur = cur.mul(seed);
        z.push(cur);
    }

    for _ in 0..200 {
        let mut max_step = 0.0f64;
        for i in 0..deg {
            let mut denom = Cx { re: 1.0, im: 0.0 };
            for j in 0..deg {
                if i != j {
                    denom = denom.mul(z[i].sub(z[j]));
                }
            }
            let step = eval(z[i]).div(denom);
            z[i] = z[i].sub(step);
            max_step = max_step.max(step.norm());
        }
        if max_step < 1e-13 {
            break;
        }
    }

    z.into_iter().map(|r| (r.re, r.im)).collect()
}

/// Moduli of the roots of the AR polynomial `1 − φ₁z − … − φₚzᵖ`, sorted
/// ascending. The process is stationary when all exceed 1.
pub fn ar_root_moduli(phi: &[f64]) -> Vec<f64> {
    let mut coeffs = vec![1.0];
    coeffs.extend(phi.iter().map(|p| -p));
    let mut m: Vec<f64> = roots(&coeffs).iter().map(|(re, im)| re.hypot(*im)).collect();
    m.sort_by(|a, b| a.partial_cmp(b).unwrap());
    m
}

/// Moduli of the roots of the MA polynomial `1 + θ₁z + … + θ_qz^q`, sorted
/// ascending. The process is invertible when all exceed 1.
pub fn ma_root_moduli(theta: &[f64]) -> Vec<f64> {
    let mut coeffs = vec![1.0];
    coeffs.extend_from_slice(theta);
    let mut m: Vec<f64> = roots(&coeffs).iter().map(|(re, im)| re.hypot(*im)).collect();
    m.sort_by(|a, b| a.partial_cmp(b).unwrap());
    m
}
