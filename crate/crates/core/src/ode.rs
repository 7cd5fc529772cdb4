//! Dormand-Prince 5(4) for `Y' = Y F(s)` with `Y` a 2x2 complex matrix.

use crate::algebra::{re, Mat2};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth minus fourth order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Clone, Copy, Debug)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OdeFailure {
    /// Step size fell below the floor at parameter `s`.
    Underflow { s: f64, h: f64 },
    NonFinite { s: f64 },
    TooManySteps(usize),
}

fn lin(y: &Mat2, terms: &[(f64, &Mat2)], h: f64) -> Mat2 {
    let mut acc = Mat2::zero();
    for (w, k) in terms {
        if *w != 0.0 {
            acc += k.scale(re(*w));
        }
    }
    *y + acc.scale(re(h))
}

fn err_norm(err: &Mat2, y0: &Mat2, y1: &Mat2, tol: f64) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..4 {
        let sc = tol * (1.0 + y0.entries()[i].norm().max(y1.entries()[i].norm()));
        worst = worst.max(err.entries()[i].norm() / sc);
    }
    worst
}

/// Integrate `Y' = Y F(s)` over `s in [0, len]` from `y0`.
///
/// `tol` is the per-step mixed absolute/relative error target.
pub fn integrate_right<F>(f: F, y0: Mat2, len: f64, tol: f64, max_steps: usize) -> Result<(Mat2, StepStats), OdeFailure>
where
    F: Fn(f64) -> Mat2,
{
    let mut s = 0.0;
    let mut y = y0;
    let mut h = (len * 0.02).min(0.05 * len.max(1e-3)).max(len * 1e-6);
    let h_min = len * 1e-13;
    let mut stats = StepStats { accepted: 0, rejected: 0 };
    let mut k1 = y * f(s);
    while s < len {
        if stats.accepted + stats.rejected >= max_steps {
            return Err(OdeFailure::TooManySteps(max_steps));
        }
        let last = s + h >= len;
        if last {
            h = len - s;
        }
        let k2 = lin(&y, &[(A21, &k1)], h) * f(s + C2 * h);
        let k3 = lin(&y, &[(A31, &k1), (A32, &k2)], h) * f(s + C3 * h);
        let k4 = lin(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h) * f(s + C4 * h);
        let k5 = lin(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h) * f(s + C5 * h);
        let k6 = lin(&y, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], h) * f(s + h);
        let y_new = lin(&y, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], h);
        let k7 = y_new * f(s + h);
        let err = lin(&Mat2::zero(), &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)], h);
        if !y_new.is_finite() || !err.is_finite() {
            return Err(OdeFailure::NonFinite { s });
        }
        let e = err_norm(&err, &y, &y_new, tol);
        if e <= 1.0 {
            s = if last { len } else { s + h };
            y = y_new;
            k1 = k7;
            stats.accepted += 1;
            let grow = if e == 0.0 { 5.0 } else { (0.9 * e.powf(-0.2)).clamp(0.2, 5.0) };
            h *= grow;
        } else {
            stats.rejected += 1;
            h *= (0.9 * e.powf(-0.2)).clamp(0.1, 0.9);
            if h < h_min {
                return Err(OdeFailure::Underflow { s, h });
            }
        }
    }
    Ok((y, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{c, mat2_exp, C64};

    #[test]
    fn constant_generator_matches_exponential() {
        let a = Mat2::new(c(0.1, 0.3), c(-0.2, 0.5), c(0.7, 0.0), c(-0.1, -0.3));
        let (y, stats) = integrate_right(|_| a, Mat2::identity(), 2.0, 1e-12, 100_000).unwrap();
        let exact = mat2_exp(&a.scale(C64::new(2.0, 0.0)));
        assert!(y.dist(&exact) < 1e-10, "{}", y.dist(&exact));
        assert!(stats.accepted > 0);
    }

    #[test]
    fn time_dependent_scalar() {
        // Y' = Y * diag(t, -t), Y(1) = diag(e^{1/2}, e^{-1/2})
        let (y, _) = integrate_right(
            |t| Mat2::diag(re(t), re(-t)),
            Mat2::identity(),
            1.0,
            1e-12,
            100_000,
        )
        .unwrap();
        assert!((y.a - re(0.5f64.exp())).norm() < 1e-11);
        assert!((y.d - re((-0.5f64).exp())).norm() < 1e-11);
    }

    #[test]
    fn blow_up_is_reported() {
        let r = integrate_right(|t| Mat2::diag(re(1.0 / (1.0 - t).powi(2)), re(0.0)), Mat2::identity(), 2.0, 1e-10, 100_000);
        assert!(r.is_err());
    }
}
