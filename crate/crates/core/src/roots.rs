use crate::error::{CopulaError, Result};

/// Solves `f(x) = target` for nondecreasing `f` on `[lo, hi]`.
///
/// Illinois-modified regula falsi, with a bisection step every third
/// iteration so the bracket always shrinks. Returns once the bracket is
/// narrower than `tol`.
pub(crate) fn solve_increasing<F>(f: F, target: f64, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    const SLACK: f64 = 1e-12;
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a) - target;
    let mut fb = f(b) - target;
    if fa > SLACK || fb < -SLACK || fa.is_nan() || fb.is_nan() {
        return Err(CopulaError::RootNotBracketed { lo, hi });
    }
    if fa >= 0.0 {
        return Ok(a);
    }
    if fb <= 0.0 {
        return Ok(b);
    }
    let mut last_side = 0i8;
    for iter in 0..400 {
        let mut c = if iter % 3 == 2 {
            0.5 * (a + b)
        } else {
            (a * fb - b * fa) / (fb - fa)
        };
        if !(c > a && c < b) {
            c = 0.5 * (a + b);
        }
        let fc = f(c) - target;
        if fc == 0.0 {
            return Ok(c);
        }
        if fc < 0.0 {
            a = c;
            fa = fc;
            if last_side == -1 {
                fb *= 0.5;
            }
            last_side = -1;
        } else {
            b = c;
            fb = fc;
            if last_side == 1 {
                fa *= 0.5;
            }
            last_side = 1;
        }
        if b - a <= tol {
            break;
        }
    }
    Ok(0.5 * (a + b))
}
