//! Normal distribution helpers and a few special functions.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use statrs::function::erf;

use crate::quadrature::{gauss_rule, QuadratureRule};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard normal density.
pub fn norm_pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal cdf.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Standard normal quantile, polished with one Halley step.
pub fn norm_quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let mut x = -SQRT_2 * erf::erfc_inv(2.0 * p);
    // Halley steps on the tail the residual is computed in
    for _ in 0..2 {
        let pdf = norm_pdf(x);
        if pdf <= 0.0 || !x.is_finite() {
            return x;
        }
        let e = if x <= 0.0 {
            norm_cdf(x) - p
        } else {
            (1.0 - p) - norm_cdf(-x)
        };
        let e = if x <= 0.0 { e } else { -e };
        let u = e / pdf;
        x -= u / (1.0 + 0.5 * x * u);
    }
    x
}

/// `P(X ≤ h, Y ≤ k)` for a standard bivariate normal pair with correlation `r`.
///
/// Drezner-Wesolowsky/Genz method: Gauss-Legendre integration of Plackett's
/// identity for `|r| < 0.925`, and of an asymptotic expansion around the
/// perfectly correlated case otherwise. Absolute error is near `1e-15`.
pub fn bvn_cdf(h: f64, k: f64, r: f64) -> f64 {
    if h == f64::NEG_INFINITY || k == f64::NEG_INFINITY {
        return 0.0;
    }
    if h == f64::INFINITY {
        return norm_cdf(k);
    }
    if k == f64::INFINITY {
        return norm_cdf(h);
    }
    if r >= 1.0 {
        return norm_cdf(h.min(k));
    }
    if r <= -1.0 {
        return (norm_cdf(h) - norm_cdf(-k)).max(0.0);
    }
    bvn_upper(-h, -k, r)
}

/// Genz's `BVND`: `P(X > dh, Y > dk)`.
fn bvn_upper(dh: f64, dk: f64, r: f64) -> f64 {
    let half = if r.abs() < 0.3 {
        3
    } else if r.abs() < 0.75 {
        6
    } else {
        10
    };
    // negative half of the (2·half)-point rule on [-1, 1]
    let rule = gauss_rule(2 * half);
    let pts: Vec<(f64, f64)> = rule
        .iter()
        .take(half)
        .map(|(t, w)| (2.0 * t - 1.0, 2.0 * w))
        .collect();

    let h = dh;
    let mut k = dk;
    let mut hk = h * k;
    let mut bvn = 0.0;
    if r.abs() < 0.925 {
        let hs = (h * h + k * k) / 2.0;
        let asr = r.asin();
        for &(x, w) in &pts {
            for sign in [-1.0, 1.0] {
                let sn = (asr * (sign * x + 1.0) / 2.0).sin();
                bvn += w * ((sn * hk - hs) / (1.0 - sn * sn)).exp();
            }
        }
        return bvn * asr / (4.0 * PI) + norm_cdf(-h) * norm_cdf(-k);
    }
    if r < 0.0 {
        k = -k;
        hk = -hk;
    }
    if r.abs() < 1.0 {
        let a_s = (1.0 - r) * (1.0 + r);
        let mut a = a_s.sqrt();
        let bs = (h - k) * (h - k);
        let c = (4.0 - hk) / 8.0;
        let d = (12.0 - hk) / 16.0;
        bvn = a
            * (-(bs / a_s + hk) / 2.0).exp()
            * (1.0 - c * (bs - a_s) * (1.0 - d * bs / 5.0) / 3.0 + c * d * a_s * a_s / 5.0);
        if hk > -160.0 {
            let b = bs.sqrt();
            bvn -= (-hk / 2.0).exp()
                * (2.0 * PI).sqrt()
                * norm_cdf(-b / a)
                * b
                * (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
        }
        a /= 2.0;
        for &(x, w) in &pts {
            for sign in [-1.0, 1.0] {
                let xs = (a * (sign * x + 1.0)).powi(2);
                let rs = (1.0 - xs).sqrt();
                let asr = -(bs / xs + hk) / 2.0;
                if asr > -100.0 {
                    bvn += a
                        * w
                        * asr.exp()
                        * ((-hk * xs / (2.0 * (1.0 + rs).powi(2))).exp() / rs
                            - (1.0 + c * xs * (1.0 + d * xs)));
                }
            }
        }
        bvn = -bvn / (2.0 * PI);
    }
    if r > 0.0 {
        bvn + norm_cdf(-h.max(k))
    } else {
        bvn = -bvn;
        if k > h {
            if h < 0.0 {
                bvn += norm_cdf(k) - norm_cdf(h);
            } else {
                bvn += norm_cdf(-h) - norm_cdf(-k);
            }
        }
        bvn
    }
}

/// First Debye function `D₁(x) = (1/x)∫₀ˣ t/(eᵗ − 1) dt`, for `x ≥ 0`.
pub fn debye1(x: f64) -> f64 {
    1.0 - debye1_complement(x)
}

/// `1 − D₁(x) = (1/x)∫₀ˣ (1 − t/(eᵗ − 1)) dt`, computed without cancellation
/// for small `x`.
pub fn debye1_complement(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    // Bernoulli series t/(eᵗ − 1) = 1 − t/2 + t²/12 − t⁴/720 + t⁶/30240 − t⁸/1209600
    if x.abs() < 0.1 {
        let x2 = x * x;
        return x / 4.0 - x2 / 36.0 + x2 * x2 / 3600.0 - x2 * x2 * x2 / 211_680.0
            + x2 * x2 * x2 * x2 / 10_886_400.0;
    }
    let rule = debye_rule();
    let integrand = |t: f64| {
        if t < 0.1 {
            let t2 = t * t;
            t / 2.0 - t2 / 12.0 + t2 * t2 / 720.0 - t2 * t2 * t2 / 30240.0
                + t2 * t2 * t2 * t2 / 1_209_600.0
        } else {
            1.0 - t / t.exp_m1()
        }
    };
    // panels of width <= 5 keep the rule spectrally accurate; beyond 60 the
    // integrand equals 1 to double precision
    let upper = x.min(60.0);
    let panels = (upper / 5.0).ceil().max(1.0) as usize;
    let width = upper / panels as f64;
    let mut integral = 0.0;
    for p in 0..panels {
        let a = p as f64 * width;
        integral += rule.integrate_on(a, a + width, integrand);
    }
    integral += x - upper;
    integral / x
}

fn debye_rule() -> &'static QuadratureRule {
    use std::sync::OnceLock;
    static RULE: OnceLock<QuadratureRule> = OnceLock::new();
    RULE.get_or_init(|| gauss_rule(32))
}
