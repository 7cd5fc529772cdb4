//! Closed-form data of the Lawson family: shape constants, the central
//! potential, its first and second deformation derivatives, and the
//! expansions of theta, W and V in `s = 1/(2g+2)`.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, DVector};

use crate::algebra::{c, re, ScalarLoop, C64, I};
use crate::error::{HolonomyError, LawsonError};
use crate::fuchsian::LawsonAnsatz;
use crate::holonomy::{arc_ratio_integral, hol_lawson_lev, lawson_willmore, volume_from_log_hol, SymData, VolumeAnchor};
use crate::quadrature::{integrate_arc, QuadOptions};

pub const CENTRAL_THETA: f64 = FRAC_PI_2;

/// Monomial basis of the derivative tables: `lambda^-1 .. lambda^3`.
const BASIS_MIN: i32 = -1;
type Table = [[C64; 5]; 3];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShapeConstants {
    pub mu: f64,
    pub nu: f64,
}

pub fn shape_constants(phi: f64) -> ShapeConstants {
    let (s, c) = phi.sin_cos();
    ShapeConstants {
        mu: c * c * c.ln() + s * s * s.ln(),
        nu: (2.0 * phi).sin() * phi.tan().ln(),
    }
}

pub fn genus_to_s(genus: u32) -> f64 {
    1.0 / (2.0 * genus as f64 + 2.0)
}

fn check_phi(phi: f64) -> Result<(), LawsonError> {
    if phi > 0.0 && phi < FRAC_PI_2 {
        Ok(())
    } else {
        Err(LawsonError::AngleOutOfRange(phi))
    }
}

fn table_loops(t: &Table) -> [ScalarLoop; 3] {
    [0, 1, 2].map(|j| ScalarLoop::new(BASIS_MIN, t[j].to_vec()))
}

fn central_table(phi: f64) -> Table {
    let z = C64::default();
    let (s, co) = phi.sin_cos();
    [
        [c(0.0, 0.5), z, c(0.0, -0.5), z, z],
        [re(-s / 2.0), z, re(-s / 2.0), z, z],
        [re(-co / 2.0), z, re(-co / 2.0), z, z],
    ]
}

fn xdot_table(phi: f64) -> Table {
    let z = C64::default();
    let (s, co) = phi.sin_cos();
    let (s2, c2) = (2.0 * phi).sin_cos();
    let (ls, lc, lt) = (s.ln(), co.ln(), phi.tan().ln());
    [
        [z, c(0.0, s2 * lt), z, c(0.0, s2 * lt), z],
        [z, re(-2.0 * s * s2 * ls - 2.0 * co * c2 * lc), z, re(-2.0 * co * lc), z],
        [z, re(-2.0 * s * c2 * ls + 2.0 * co * s2 * lc), z, re(2.0 * s * ls), z],
    ]
}

fn xddot_table(phi: f64, kddot: f64) -> Table {
    let z = C64::default();
    let (s, co) = phi.sin_cos();
    let c2 = (2.0 * phi).cos();
    let (ls, lc, lt) = (s.ln(), co.ln(), phi.tan().ln());
    let a = co * co * lc;
    let b = s * s * ls;
    let f = 4.0 * s * lc;
    let g = 4.0 * co * ls;
    let k = kddot;
    [
        [
            c(0.0, -0.25 * k),
            z,
            c(0.0, 8.0 * lt * (a * (4.0 * c2 - 1.0) + b * (4.0 * c2 + 1.0)) + 0.25 * k),
            z,
            c(0.0, 8.0 * lt * (a - b)),
        ],
        [
            re(0.25 * s * k),
            z,
            re(f * (6.0 * co * co * lc + ls * (-3.0 * c2 - 1.0)) + 0.25 * s * k),
            z,
            re(f * (-2.0 * co * co * lc + ls * (c2 + 3.0))),
        ],
        [
            re(0.25 * co * k),
            z,
            re(g * (6.0 * s * s * ls + lc * (3.0 * c2 - 1.0)) + 0.25 * co * k),
            z,
            re(g * (-2.0 * s * s * ls + lc * (3.0 - c2))),
        ],
    ]
}

/// Central loops `x^0` at `t = 0`; the accompanying angle is [`CENTRAL_THETA`].
pub fn central_x(phi: f64) -> [ScalarLoop; 3] {
    table_loops(&central_table(phi))
}

pub fn central_ansatz(phi: f64, s: f64) -> LawsonAnsatz {
    LawsonAnsatz { phi, x: central_x(phi), s }
}

/// First deformation derivatives `x'` (degrees 0 and 2).
pub fn xdot(phi: f64) -> [ScalarLoop; 3] {
    table_loops(&xdot_table(phi))
}

/// Second deformation derivatives, including the `kddot` terms which are
/// `-kddot/2` times the central loops.
pub fn xddot(phi: f64, kddot: f64) -> [ScalarLoop; 3] {
    table_loops(&xddot_table(phi, kddot))
}

fn second_order_quadric(phi: f64, kddot: f64) -> ScalarLoop {
    let x0 = central_x(phi);
    let x1 = xdot(phi);
    let x2 = xddot(phi, kddot);
    (0..3).fold(ScalarLoop::zero(), |acc, j| &(&acc + &(&x0[j] * &x2[j])) + &(&x1[j] * &x1[j]))
}

/// The value of `kddot` for which `sum_i (x0_i xdd_i + xd_i^2)` vanishes.
///
/// With `kddot = 0` that sum is a constant `q0`, and the `kddot` terms add
/// `-kddot/2` (because `x0 . x0 = 1`), so the answer is `2 q0`. The constancy
/// in lambda is checked at eight circle samples.
pub fn resolve_kddot(phi: f64) -> Result<f64, LawsonError> {
    let q = second_order_quadric(phi, 0.0);
    let samples: Vec<C64> = (0..8)
        .map(|m| q.eval(C64::from_polar(1.0, PI / 6.0 + 2.0 * PI * m as f64 / 8.0)))
        .collect::<Result<_, _>>()?;
    let q0 = samples[0];
    let spread = samples.iter().map(|v| (v - q0).norm()).fold(q0.im.abs(), f64::max);
    if spread > 1e-10 {
        return Err(LawsonError::KddotLambdaDependence { spread });
    }
    Ok(2.0 * q0.re)
}

#[derive(Clone, Debug)]
pub struct LawsonFamily {
    pub phi: f64,
    pub genus: Option<u32>,
    pub s: f64,
    pub shape: ShapeConstants,
    pub kddot: f64,
    pub x0: [ScalarLoop; 3],
    pub xd: [ScalarLoop; 3],
    pub xdd: [ScalarLoop; 3],
    /// Coefficients of `theta(t) = th0 + th1 t + th2 t^2 / 2`.
    pub theta_series: [f64; 3],
}

impl LawsonFamily {
    /// Family with the constraint-determined `kddot`.
    pub fn new(phi: f64) -> Result<Self, LawsonError> {
        check_phi(phi)?;
        let k = resolve_kddot(phi)?;
        Self::with_kddot(phi, k)
    }

    pub fn with_kddot(phi: f64, kddot: f64) -> Result<Self, LawsonError> {
        check_phi(phi)?;
        let shape = shape_constants(phi);
        Ok(LawsonFamily {
            phi,
            genus: None,
            s: 0.0,
            shape,
            kddot,
            x0: central_x(phi),
            xd: xdot(phi),
            xdd: xddot(phi, kddot),
            theta_series: [CENTRAL_THETA, 2.0 * shape.nu, 0.0],
        })
    }

    pub fn for_genus(phi: f64, genus: u32) -> Result<Self, LawsonError> {
        if genus < 2 {
            return Err(LawsonError::Genus(genus));
        }
        let mut fam = Self::new(phi)?;
        fam.genus = Some(genus);
        fam.s = genus_to_s(genus);
        Ok(fam)
    }

    pub fn theta(&self, t: f64) -> f64 {
        let [a, b, cc] = self.theta_series;
        a + b * t + 0.5 * cc * t * t
    }

    /// Truncated Taylor data `x0 + t xd + t^2/2 xdd`, with `s = t`.
    pub fn taylor_x(&self, t: f64, order: u32) -> Result<LawsonAnsatz, LawsonError> {
        if order > 2 {
            return Err(LawsonError::Order(order));
        }
        let x = [0, 1, 2].map(|j| {
            let mut l = self.x0[j].clone();
            if order >= 1 {
                l = &l + &self.xd[j].scale(re(t));
            }
            if order >= 2 {
                l = &l + &self.xdd[j].scale(re(0.5 * t * t));
            }
            l
        });
        Ok(LawsonAnsatz { phi: self.phi, x, s: t })
    }

    /// Second-order data with the Sym-point structure imposed exactly, and its angle.
    pub fn pinned_taylor(&self, t: f64) -> Result<(LawsonAnsatz, f64), LawsonError> {
        let theta = self.theta(t);
        let an = self.taylor_x(t, 2)?;
        Ok((pin_sym_points(&an, theta)?, theta))
    }

    /// Log-holonomy of the pinned second-order data by the endpoint-value formula.
    pub fn log_hol(&self, t: f64, quad_tol: f64) -> Result<C64, HolonomyError> {
        let (an, theta) = self.pinned_taylor(t).map_err(|e| HolonomyError::SymData(e.to_string()))?;
        Ok(hol_lawson_lev(&an, theta, quad_tol)?.log_hol)
    }
}

fn solve_complex(rows: Vec<Vec<C64>>, rhs: Vec<C64>) -> Result<Vec<C64>, LawsonError> {
    let n = rhs.len();
    let a = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    let b = DVector::from_vec(rhs);
    let sol = a.lu().solve(&b).ok_or(crate::error::AlgebraError::Singular)?;
    Ok(sol.iter().copied().collect())
}

/// Add polynomial corrections so that `x = (-1,0,0)` at `e^{-i theta}`,
/// `x = (1,0,0)` at `e^{i theta}`, and `x1' = 0` at both points.
///
/// For second-order data these corrections are `O(t^3)`. Without them the
/// double zero of `1 - x1` at the Sym point splits into two simple zeros
/// a distance `O(t^{3/2})` apart, which spoils derivatives in `t`.
pub fn pin_sym_points(an: &LawsonAnsatz, theta: f64) -> Result<LawsonAnsatz, LawsonError> {
    let l1 = C64::from_polar(1.0, -theta);
    let l2 = C64::from_polar(1.0, theta);
    let [x1, x2, x3] = &an.x;
    let d1 = x1.deriv();
    let one = re(1.0);
    let z = C64::default();
    let row_val = |l: C64, n: usize| (0..n).map(|k| l.powi(k as i32)).collect::<Vec<_>>();
    let row_der = |l: C64, n: usize| {
        (0..n).map(|k| if k == 0 { z } else { l.powi(k as i32 - 1) * k as f64 }).collect::<Vec<_>>()
    };
    let cubic = solve_complex(
        vec![row_val(l1, 4), row_der(l1, 4), row_val(l2, 4), row_der(l2, 4)],
        vec![-one - x1.eval(l1)?, -d1.eval(l1)?, one - x1.eval(l2)?, -d1.eval(l2)?],
    )?;
    let linear = |x: &ScalarLoop| -> Result<ScalarLoop, LawsonError> {
        let ab = solve_complex(vec![row_val(l1, 2), row_val(l2, 2)], vec![-x.eval(l1)?, -x.eval(l2)?])?;
        Ok(x + &ScalarLoop::new(0, ab))
    };
    Ok(LawsonAnsatz {
        phi: an.phi,
        x: [x1 + &ScalarLoop::new(0, cubic), linear(x2)?, linear(x3)?],
        s: an.s,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesInvariants {
    pub theta: f64,
    pub willmore: f64,
}

/// `theta = pi/2 + 2 nu s` and `W = 8 pi + 16 pi mu s`, both up to `O(s^3)`.
pub fn series_invariants(phi: f64, s: f64) -> SeriesInvariants {
    let sc = shape_constants(phi);
    SeriesInvariants { theta: CENTRAL_THETA + 2.0 * sc.nu * s, willmore: 8.0 * PI + 16.0 * PI * sc.mu * s }
}

/// `2 pi^2 - 4 pi phi + 16 pi nu s + 16 pi mu nu s^2` with `s = 1/(2g+2)`.
pub fn volume_expansion(phi: f64, genus: u32) -> Result<f64, LawsonError> {
    check_phi(phi)?;
    if genus < 2 {
        return Err(LawsonError::Genus(genus));
    }
    Ok(volume_series(phi, genus_to_s(genus)))
}

pub fn volume_series(phi: f64, s: f64) -> f64 {
    let ShapeConstants { mu, nu } = shape_constants(phi);
    2.0 * PI * PI - 4.0 * PI * phi + 16.0 * PI * nu * s + 16.0 * PI * mu * nu * s * s
}

/// `dt g` at `t = 0`: the first-order change of the integrand
/// `(x2 x3' - x3 x2') / (1 - x1)`. At `lambda = i`, where `1 - x1` has a
/// double zero, the common factor is divided out first.
pub fn dgdt_loop_value(phi: f64, lambda: C64) -> Result<C64, LawsonError> {
    let x0 = central_x(phi);
    let xd = xdot(phi);
    let num = &cross_derivative(&xd[1], &x0[2], &x0[1], &xd[2]) - &cross_derivative(&xd[2], &x0[1], &x0[2], &xd[1]);
    let den = &ScalarLoop::constant(re(1.0)) - &x0[0];
    let k = den.zero_order(lambda, 1e-12, 4);
    if k == 0 {
        return Ok(num.eval(lambda)? / den.eval(lambda)?);
    }
    let (n, _) = num.deflate(lambda, k);
    let (d, _) = den.deflate(lambda, k);
    Ok(n.eval(lambda)? / d.eval(lambda)?)
}

/// `a b' + c d'` as a loop.
fn cross_derivative(a: &ScalarLoop, b: &ScalarLoop, cc: &ScalarLoop, d: &ScalarLoop) -> ScalarLoop {
    &(a * &b.deriv()) + &(cc * &d.deriv())
}

/// `u v' - v u'`.
pub fn wronskian(u: &ScalarLoop, v: &ScalarLoop) -> ScalarLoop {
    &(u * &v.deriv()) - &(v * &u.deriv())
}

/// Closed form of `dt g`: `2 i lambda^-1 (lambda + i)^2 mu`.
pub fn dgdt_closed_form(phi: f64, lambda: C64) -> C64 {
    2.0 * I / lambda * (lambda + I) * (lambda + I) * shape_constants(phi).mu
}

/// Closed form of `dt^2 g`: `-16 (lambda + i) mu nu`.
pub fn d2gdt2_closed_form(phi: f64, lambda: C64) -> C64 {
    let sc = shape_constants(phi);
    -16.0 * (lambda + I) * sc.mu * sc.nu
}

/// `dt^2 g` at `t = 0` from the tables as `numerator / denominator` loops.
/// The central numerator vanishes identically, so only the numerator's
/// derivatives and one cross term with `dt (1 - x1)` survive.
pub fn d2gdt2_loops(phi: f64, kddot: f64) -> (ScalarLoop, ScalarLoop) {
    let x0 = central_x(phi);
    let xd = xdot(phi);
    let xdd = xddot(phi, kddot);
    let n1 = &wronskian(&xd[1], &x0[2]) + &wronskian(&x0[1], &xd[2]);
    let n2 = &(&wronskian(&xdd[1], &x0[2]) + &wronskian(&x0[1], &xdd[2])) + &wronskian(&xd[1], &xd[2]).scale(re(2.0));
    let d0 = &ScalarLoop::constant(re(1.0)) - &x0[0];
    let d1 = -&xd[0];
    let num = &(&n2 * &d0) - &(&(&n1 * &d1) * &ScalarLoop::constant(re(2.0)));
    (num, &d0 * &d0)
}

/// `dt^2 g` at `t = 0` evaluated term by term, which keeps one factor of
/// `1 - x1` out of the cancellation near `lambda = i`.
pub fn d2gdt2_value(phi: f64, kddot: f64, lambda: C64) -> Result<C64, LawsonError> {
    let x0 = central_x(phi);
    let xd = xdot(phi);
    let xdd = xddot(phi, kddot);
    let n1 = &wronskian(&xd[1], &x0[2]) + &wronskian(&x0[1], &xd[2]);
    let n2 = &(&wronskian(&xdd[1], &x0[2]) + &wronskian(&x0[1], &xdd[2])) + &wronskian(&xd[1], &xd[2]).scale(re(2.0));
    let d0 = re(1.0) - x0[0].eval(lambda)?;
    let d1 = -xd[0].eval(lambda)?;
    Ok(n2.eval(lambda)? / d0 - 2.0 * n1.eval(lambda)? * d1 / (d0 * d0))
}

/// Central five-point estimates of the first and second derivative.
pub fn five_point<F, E>(f: F, h: f64) -> Result<(C64, C64), E>
where
    F: Fn(f64) -> Result<C64, E>,
{
    let v: Vec<C64> = [-2.0, -1.0, 0.0, 1.0, 2.0].iter().map(|k| f(k * h)).collect::<Result<_, _>>()?;
    let d1 = (8.0 * (v[3] - v[1]) - (v[4] - v[0])) / (12.0 * h);
    let d2 = (-v[4] + 16.0 * v[3] - 30.0 * v[2] + 16.0 * v[1] - v[0]) / (12.0 * h * h);
    Ok((d1, d2))
}

/// Shift `z` by a multiple of `2 pi i` so it lies closest to `reference`.
pub fn align_branch(z: C64, reference: C64) -> C64 {
    let k = ((reference.im - z.im) / (2.0 * PI)).round();
    z + c(0.0, 2.0 * PI * k)
}

#[derive(Clone, Copy, Debug)]
pub struct HolonomyDerivatives {
    pub d1: C64,
    pub d2: C64,
}

/// Finite-difference `t`-derivatives of the log-holonomy at `t = 0`.
pub fn log_hol_derivatives(fam: &LawsonFamily, h: f64, quad_tol: f64) -> Result<HolonomyDerivatives, HolonomyError> {
    let reference = fam.log_hol(0.0, quad_tol)?;
    let (d1, d2) = five_point(|t| Ok::<_, HolonomyError>(align_branch(fam.log_hol(t, quad_tol)?, reference)), h)?;
    Ok(HolonomyDerivatives { d1, d2 })
}

#[derive(Clone, Copy, Debug)]
pub struct VolumeDerivatives {
    pub v0: f64,
    pub v1: f64,
    pub v2: f64,
}

/// Volume at parameter `t` assembled from the pipeline: LEV holonomy on
/// pinned Taylor data, W from the residue formula, theta from its series.
pub fn pipeline_volume(fam: &LawsonFamily, t: f64, quad_tol: f64) -> Result<f64, HolonomyError> {
    let (an, theta) = fam.pinned_taylor(t).map_err(|e| HolonomyError::SymData(e.to_string()))?;
    let log_hol = hol_lawson_lev(&an, theta, quad_tol)?.log_hol;
    let w = lawson_willmore(&an)?;
    let anchor = VolumeAnchor::Near(2.0 * PI * PI - 4.0 * PI * fam.phi);
    Ok(volume_from_log_hol(log_hol, theta, w, anchor)?.volume)
}

pub fn volume_derivatives(fam: &LawsonFamily, h: f64, quad_tol: f64) -> Result<VolumeDerivatives, HolonomyError> {
    let v0 = pipeline_volume(fam, 0.0, quad_tol)?;
    let (d1, d2) = five_point(|t| pipeline_volume(fam, t, quad_tol).map(re), h)?;
    Ok(VolumeDerivatives { v0, v1: d1.re, v2: d2.re })
}

#[derive(Clone, Debug)]
pub struct FirstOrderReport {
    /// Largest deviation of `dt g` from `2 i lambda^-1 (lambda+i)^2 mu` over the samples.
    pub dgdt_deviation: f64,
    /// Largest deviation of the first-order Wronskian identity over the samples.
    pub wronskian_deviation: f64,
    pub dgdt_integral: C64,
    pub dgdt_integral_expected: C64,
    pub dlog_hol: C64,
    pub dlog_hol_expected: C64,
    pub dvolume: f64,
    pub dvolume_expected: f64,
}

pub fn circle_samples(n: usize, offset: f64) -> Vec<C64> {
    (0..n).map(|m| C64::from_polar(1.0, offset + 2.0 * PI * m as f64 / n as f64)).collect()
}

/// Check the first-order chain at `t = 0`.
pub fn first_order_identities(phi: f64) -> Result<FirstOrderReport, HolonomyError> {
    let fam = LawsonFamily::new(phi).map_err(|e| HolonomyError::SymData(e.to_string()))?;
    let mu = fam.shape.mu;
    let nu = fam.shape.nu;
    let mut dgdt_deviation = 0.0f64;
    let mut wronskian_deviation = 0.0f64;
    let lhs = &wronskian(&fam.xd[1], &fam.x0[2]) + &wronskian(&fam.x0[1], &fam.xd[2]);
    for lam in circle_samples(16, 0.05) {
        let v = dgdt_loop_value(phi, lam).map_err(|e| HolonomyError::SymData(e.to_string()))?;
        dgdt_deviation = dgdt_deviation.max((v - dgdt_closed_form(phi, lam)).norm());
        let w = lhs.eval(lam)?;
        let expected = -(lam * lam + 1.0) * (lam * lam + 1.0) / (lam * lam) * mu;
        wronskian_deviation = wronskian_deviation.max((w - expected).norm());
    }
    let opts = QuadOptions::new(1e-13);
    let dgdt_integral = integrate_arc(|l| dgdt_closed_form(phi, l), -FRAC_PI_2, FRAC_PI_2, opts)?.value;
    let d = log_hol_derivatives(&fam, 1e-3, 1e-13)?;
    let vd = volume_derivatives(&fam, 1e-3, 1e-13)?;
    Ok(FirstOrderReport {
        dgdt_deviation,
        wronskian_deviation,
        dgdt_integral,
        dgdt_integral_expected: c(2.0 * PI, -8.0) * mu,
        dlog_hol: d.d1,
        dlog_hol_expected: c(0.0, 8.0 * PI * mu),
        dvolume: vd.v1,
        dvolume_expected: 16.0 * PI * nu,
    })
}

/// Deviations of the second-order simplification identities from their
/// closed forms, and the analytically assembled second derivative.
#[derive(Clone, Debug)]
pub struct SecondOrderReport {
    /// `(name, largest deviation)` for each identity; pointwise ones are
    /// checked at sixteen circle samples, the others at `lambda = i`.
    pub identities: Vec<(&'static str, f64)>,
    /// `int dt^2 g` along the arc from `-i` to `i`, and `32 mu nu`.
    pub d2g_integral: C64,
    pub d2g_integral_expected: C64,
    /// `4 d^2 f + 4 i (int dt^2 g + endpoint terms)`, and `64 i mu nu`.
    pub d2_log_hol: C64,
    pub d2_log_hol_expected: C64,
}

impl SecondOrderReport {
    pub fn worst(&self) -> f64 {
        self.identities.iter().map(|(_, d)| *d).fold(0.0, f64::max)
    }
}

pub fn second_order_identities(phi: f64, kddot: f64) -> Result<SecondOrderReport, HolonomyError> {
    let lerr = |e: LawsonError| HolonomyError::SymData(e.to_string());
    check_phi(phi).map_err(lerr)?;
    let ShapeConstants { mu, nu } = shape_constants(phi);
    let (sp, cp) = phi.sin_cos();
    let (s2, c2) = (2.0 * phi).sin_cos();
    let x0 = central_x(phi);
    let xd = xdot(phi);
    let xdd = xddot(phi, kddot);
    let d = |l: &ScalarLoop| l.deriv();
    let ev = |l: &ScalarLoop, z: C64| l.eval(z);
    let mut ids: Vec<(&'static str, f64)> = Vec::new();

    // values at lambda = i
    let (x2p, x3p) = (ev(&d(&x0[1]), I)?, ev(&d(&x0[2]), I)?);
    let (x2pp, x3pp) = (ev(&d(&d(&x0[1])), I)?, ev(&d(&d(&x0[2])), I)?);
    let (a2, a3) = (ev(&d(&xd[1]), I)?, ev(&d(&xd[2]), I)?);
    let (b2, b3) = (ev(&d(&d(&xd[1])), I)?, ev(&d(&d(&xd[2])), I)?);
    let (e2, e3) = (ev(&d(&xdd[1]), I)?, ev(&d(&xdd[2]), I)?);
    ids.push(("-cos xdd2' + sin xdd3' = 24 mu nu", (-cp * e2 + sp * e3 - 24.0 * mu * nu).norm()));
    ids.push(("-cos xd2'' + sin xd3'' = 4 mu", (-cp * b2 + sp * b3 - 4.0 * mu).norm()));
    ids.push((
        "sin2 (xd3'^2 - xd2'^2) - 2 cos2 xd2' xd3' = -16 mu nu",
        (s2 * (a3 * a3 - a2 * a2) - 2.0 * c2 * a2 * a3 + 16.0 * mu * nu).norm(),
    ));
    ids.push(("-cos xd2' + sin xd3' = 4i mu", (-cp * a2 + sp * a3 - c(0.0, 4.0 * mu)).norm()));
    let (m, p) = (x2p - I * x3p, x2p + I * x3p);
    let (dm, dp) = (a2 - I * a3, a2 + I * a3);
    let ft = dm / m - dp / p;
    ids.push(("df/dt = -8 mu", (ft + 8.0 * mu).norm()));
    let ftt = (e2 - I * e3) / m - (dm / m).powi(2) - (e2 + I * e3) / p + (dp / p).powi(2);
    let (mm, pp) = (x2pp - I * x3pp, x2pp + I * x3pp);
    let flt = (b2 - I * b3) / m - dm * mm / (m * m) - (b2 + I * b3) / p + dp * pp / (p * p);
    let theta_dot = 2.0 * nu;
    let d2f = ftt - 2.0 * flt * theta_dot;
    ids.push(("d^2 f / dt^2 = -48 i mu nu", (d2f - c(0.0, -48.0 * mu * nu)).norm()));

    // pointwise identities
    let w = |u: &ScalarLoop, v: &ScalarLoop| -> ScalarLoop { &(u * &d(v)) - &(v * &d(u)) };
    let e = &(&xdd[1] * &d(&x0[2])) - &(&xdd[2] * &d(&x0[1]));
    let f = &(&x0[1] * &d(&xdd[2])) - &(&x0[2] * &d(&xdd[1]));
    let g = w(&xd[1], &xd[2]);
    let full = &(&e + &f) + &g.scale(re(2.0));
    let first = &(&(&xd[1] * &d(&x0[2])) + &(&x0[1] * &d(&xd[2]))) - &(&(&xd[2] * &d(&x0[1])) + &(&x0[2] * &d(&xd[1])));
    let mut dev = [0.0f64; 6];
    for z in circle_samples(16, 0.05) {
        let mn = re(mu * nu);
        let l2 = z * z;
        let checks = [
            ev(&e, z)? + 2.0 * (l2 - 1.0) * (l2 - 3.0) / z * mn,
            ev(&f, z)? - 6.0 * (l2 * l2 - 1.0) / z * mn,
            ev(&g, z)? + 8.0 * z * mn,
            ev(&full, z)? - 4.0 * (l2 + 1.0) * (l2 - 3.0) / z * mn,
            ev(&first, z)? * ev(&xd[0], z)? + I * (l2 + 1.0).powi(3) / l2 * mn,
            d2gdt2_value(phi, kddot, z).map_err(lerr)? - d2gdt2_closed_form(phi, z),
        ];
        for (k, v) in checks.iter().enumerate() {
            dev[k] = dev[k].max(v.norm());
        }
    }
    ids.push(("xdd2 x3' - xdd3 x2' = -2 (l^2-1)(l^2-3)/l mu nu", dev[0]));
    ids.push(("x2 xdd3' - x3 xdd2' = 6 (l^4-1)/l mu nu", dev[1]));
    ids.push(("xd2 xd3' - xd3 xd2' = -8 l mu nu", dev[2]));
    ids.push(("second-order numerator = 4 (l^2+1)(l^2-3)/l mu nu", dev[3]));
    ids.push(("first-order numerator times xd1 = -i (l^2+1)^3/l^2 mu nu", dev[4]));
    ids.push(("dt^2 g = -16 (l + i) mu nu", dev[5]));

    let (num, den) = d2gdt2_loops(phi, kddot);
    let d2g_integral = arc_ratio_integral(&num, &den, &SymData::symmetric(FRAC_PI_2)?, 1e-13)?;
    // lambda2 = e^{i theta}, lambda1 = e^{-i theta}: both move by -theta_dot at t = 0
    let endpoint = 2.0 * dgdt_loop_value(phi, I).map_err(lerr)? * (-theta_dot)
        - 2.0 * dgdt_loop_value(phi, -I).map_err(lerr)? * (-theta_dot);
    Ok(SecondOrderReport {
        identities: ids,
        d2g_integral,
        d2g_integral_expected: re(32.0 * mu * nu),
        d2_log_hol: 4.0 * d2f + 4.0 * I * (d2g_integral + endpoint),
        d2_log_hol_expected: c(0.0, 64.0 * mu * nu),
    })
}
