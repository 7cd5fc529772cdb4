//! Holonomy of the Chern-Simons connection along the unit-circle family of
//! flat connections, and its relation to Willmore energy and enclosed volume.

use std::f64::consts::PI;

use crate::algebra::{c, re, Mat2, MatrixLoop, ScalarLoop, C64, I};
use crate::error::HolonomyError;
use crate::fuchsian::{symmetry_matrix, FuchsianPotential, LawsonAnsatz};
use crate::quadrature::{integrate_arc, QuadOptions};

/// Sym points `lambda_j = e^{i tau_j}` and the mean curvature they determine.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymData {
    pub lambda1: C64,
    pub lambda2: C64,
    pub tau1: f64,
    pub tau2: f64,
    pub h: f64,
}

impl SymData {
    pub fn from_angles(tau1: f64, tau2: f64) -> Result<Self, HolonomyError> {
        if !(tau2 > tau1) {
            return Err(HolonomyError::SymData(format!("need tau2 > tau1, got {tau1}, {tau2}")));
        }
        let lambda1 = C64::from_polar(1.0, tau1);
        let lambda2 = C64::from_polar(1.0, tau2);
        let h = mean_curvature(lambda1, lambda2)?;
        Ok(SymData { lambda1, lambda2, tau1, tau2, h })
    }

    /// `lambda_{1,2} = e^{-+ i theta}`.
    pub fn symmetric(theta: f64) -> Result<Self, HolonomyError> {
        Self::from_angles(-theta, theta)
    }
}

/// `H = i (lambda1 + lambda2) / (lambda1 - lambda2)`.
pub fn mean_curvature(lambda1: C64, lambda2: C64) -> Result<f64, HolonomyError> {
    if (lambda1 - lambda2).norm() < 1e-14 {
        return Err(HolonomyError::SymData("Sym points coincide".into()));
    }
    for l in [lambda1, lambda2] {
        if (l.norm() - 1.0).abs() > 1e-12 {
            return Err(HolonomyError::SymData(format!("Sym point {l} not on the unit circle")));
        }
    }
    let h = I * (lambda1 + lambda2) / (lambda1 - lambda2);
    if h.im.abs() > 1e-10 * (1.0 + h.re.abs()) {
        return Err(HolonomyError::NotReal { imag: h.im });
    }
    Ok(h.re)
}

/// Reduce the imaginary part into `(-pi, pi]`.
pub fn reduce_log(z: C64) -> C64 {
    let mut im = z.im.rem_euclid(2.0 * PI);
    if im > PI {
        im -= 2.0 * PI;
    }
    c(z.re, im)
}

/// Distance between `a` and `b` modulo `2 pi i`.
pub fn dist_mod_2pi_i(a: C64, b: C64) -> f64 {
    reduce_log(a - b).norm()
}

/// `(i/4pi)(dtau - sin dtau) W - (i/pi) V`, reduced mod `2 pi i`.
pub fn hol_from_invariants(w: f64, tau1: f64, tau2: f64, v: f64) -> C64 {
    let dt = tau2 - tau1;
    reduce_log(c(0.0, (dt - dt.sin()) * w / (4.0 * PI) - v / PI))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum VolumeAnchor {
    /// Representative in `[0, period)`.
    Principal,
    /// Representative closest to the given value (continuity anchor).
    Near(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VolumeValue {
    pub volume: f64,
    pub period: f64,
    pub anchor: VolumeAnchor,
}

impl VolumeValue {
    pub fn provenance(&self) -> String {
        match self.anchor {
            VolumeAnchor::Principal => format!("principal representative mod {:.6}", self.period),
            VolumeAnchor::Near(a) => format!("continuity anchor {a:.12} mod {:.6}", self.period),
        }
    }
}

fn pick_representative(raw: f64, period: f64, anchor: VolumeAnchor) -> f64 {
    match anchor {
        VolumeAnchor::Principal => raw.rem_euclid(period),
        VolumeAnchor::Near(a) => {
            let mut d = (raw - a).rem_euclid(period);
            if d > period / 2.0 {
                d -= period;
            }
            a + d
        }
    }
}

/// Volume from the holonomy of an `n`-fold cover:
/// `V = (dtau - sin dtau) W / 4 - (pi / (n i)) log Hol`, defined mod `2 pi^2 / n`.
/// `W` is the energy of the surface itself, not of the cover.
pub fn volume_from_log_hol_cover(
    log_hol: C64,
    delta_tau: f64,
    w: f64,
    cover: u32,
    anchor: VolumeAnchor,
) -> Result<VolumeValue, HolonomyError> {
    let n = cover as f64;
    let v = (delta_tau - delta_tau.sin()) * w / 4.0 - PI / n * (log_hol / I);
    let scale = 1.0 + v.re.abs();
    if v.im.abs() > 1e-7 * scale {
        return Err(HolonomyError::NotReal { imag: v.im });
    }
    let period = 2.0 * PI * PI / n;
    Ok(VolumeValue { volume: pick_representative(v.re, period, anchor), period, anchor })
}

/// Lawson convention: holonomy of the double cover, Sym points `e^{-+i theta}`,
/// volume mod `pi^2`.
pub fn volume_from_log_hol(log_hol: C64, theta: f64, w: f64, anchor: VolumeAnchor) -> Result<VolumeValue, HolonomyError> {
    if !(theta > 0.0 && theta < PI) {
        return Err(HolonomyError::SymData(format!("theta = {theta} outside (0, pi)")));
    }
    volume_from_log_hol_cover(log_hol, 2.0 * theta, w, 2, anchor)
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvariantReport {
    pub sym: SymData,
    pub willmore: f64,
    pub log_hol: C64,
    pub volume: f64,
    pub provenance: String,
}

/// Log-holonomy with its bookkeeping.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HolonomyValue {
    /// Unreduced value as assembled (principal logs plus integrals).
    pub log_hol: C64,
    /// Contribution of the arc integrals alone.
    pub integral: C64,
    /// Set when a log argument lies within `1e-8` of the negative real axis.
    pub branch_ambiguous: bool,
}

impl HolonomyValue {
    pub fn reduced(&self) -> C64 {
        reduce_log(self.log_hol)
    }

    /// The integer `k` with `log_hol = reduced + 2 pi i k`.
    pub fn class(&self) -> i64 {
        ((self.log_hol.im - self.reduced().im) / (2.0 * PI)).round() as i64
    }
}

fn principal_log(z: C64) -> (C64, bool) {
    let near_cut = z.re < 0.0 && z.im.abs() <= 1e-8 * z.norm();
    (z.ln(), near_cut)
}

/// Tolerances of the two gauge validity checks.
#[derive(Clone, Copy, Debug)]
pub struct GaugeChecks {
    pub eigenvector_tol: f64,
    pub triangular_tol: f64,
}

impl Default for GaugeChecks {
    fn default() -> Self {
        GaugeChecks { eigenvector_tol: 1e-10, triangular_tol: 1e-10 }
    }
}

/// Regularizing gauge at one pole.
///
/// `frame` is a loop `P` whose normalisation `N = P / sqrt(det P)` is the
/// gauge; the square-root branch is irrelevant to the holonomy because it only
/// flips the sign of `a_j`. `residue` is the residue of the potential at the
/// pole on the cover where the gauge acts.
#[derive(Clone, Debug, PartialEq)]
pub struct RegularizingGauge {
    pub pole: usize,
    pub residue: MatrixLoop,
    pub frame: MatrixLoop,
    pub k: u32,
}

fn deflate_matrix(m: &MatrixLoop, root: C64, order: usize) -> Result<MatrixLoop, HolonomyError> {
    let mut entries = Vec::with_capacity(4);
    for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        let (q, rem) = m.entry(i, j).deflate(root, order);
        if rem.iter().any(|r| *r > 1e-8) {
            return Err(HolonomyError::EndpointLimit { lambda: root, num_order: 0, den_order: 2 * order });
        }
        entries.push(q);
    }
    Ok(MatrixLoop::from_entries(&entries[0], &entries[1], &entries[2], &entries[3]))
}

const ZERO_TOL: f64 = 1e-9;

/// `N = P / sqrt(det P)` at `lambda`, taking the limit when `P` vanishes there.
fn normalised_frame(p: &MatrixLoop, lambda: C64) -> Result<Mat2, HolonomyError> {
    let det = p.det();
    let order = det.zero_order(lambda, ZERO_TOL, 8);
    let p = if order > 0 {
        if order % 2 == 1 {
            return Err(HolonomyError::EndpointLimit { lambda, num_order: 0, den_order: order });
        }
        deflate_matrix(p, lambda, order / 2)?
    } else {
        p.clone()
    };
    let m = p.eval(lambda)?;
    let d = m.det();
    if d.norm() == 0.0 {
        return Err(HolonomyError::EndpointLimit { lambda, num_order: 0, den_order: order + 1 });
    }
    Ok(m.scale(d.sqrt().inv()))
}

/// Numerator and denominator loops of `tr(Res N' N^-1)` for `N = P / sqrt(det P)`.
fn gauge_integrand(g: &RegularizingGauge) -> (ScalarLoop, ScalarLoop) {
    let p = &g.frame;
    let det = p.det();
    let core = (&(&g.residue * &p.deriv()) * &p.adjugate()).trace();
    let tr_res = g.residue.trace();
    let correction = (&tr_res * &det.deriv()).scale(re(0.5));
    (&core - &correction, det)
}

/// Divide out common zeros of `num` and `den` at `lambda`.
fn cancel_endpoint(num: ScalarLoop, den: ScalarLoop, lambda: C64) -> Result<(ScalarLoop, ScalarLoop), HolonomyError> {
    let dz = den.zero_order(lambda, ZERO_TOL, 8);
    if dz == 0 {
        return Ok((num, den));
    }
    let nz = num.zero_order(lambda, ZERO_TOL, dz);
    if nz < dz && !num.is_zero() {
        return Err(HolonomyError::EndpointLimit { lambda, num_order: nz, den_order: dz });
    }
    let (n, _) = num.deflate(lambda, dz);
    let (d, _) = den.deflate(lambda, dz);
    Ok((n, d))
}

/// Integral of `num / den` along the positive arc from `tau1` to `tau2`,
/// with removable endpoint zeros cancelled exactly first.
pub fn arc_ratio_integral(
    num: &ScalarLoop,
    den: &ScalarLoop,
    sym: &SymData,
    quad_tol: f64,
) -> Result<C64, HolonomyError> {
    if num.is_zero() {
        return Ok(C64::default());
    }
    let (n, d) = cancel_endpoint(num.clone(), den.clone(), sym.lambda1)?;
    let (n, d) = cancel_endpoint(n, d, sym.lambda2)?;
    let f = |l: C64| n.eval(l).unwrap_or(c(f64::NAN, 0.0)) / d.eval(l).unwrap_or(c(f64::NAN, 0.0));
    // split at the midpoint so the two halves adapt independently
    let mid = 0.5 * (sym.tau1 + sym.tau2);
    let opts = QuadOptions::new(quad_tol / 2.0);
    let a = integrate_arc(f, sym.tau1, mid, opts)?;
    let b = integrate_arc(f, mid, sym.tau2, opts)?;
    Ok(a.value + b.value)
}

/// Check `eta(lambda2) = h^-1 eta(lambda1) h` at eight `z` samples.
pub fn verify_constant_gauge(eta: &FuchsianPotential, h: &Mat2, sym: &SymData, tol: f64) -> Result<f64, HolonomyError> {
    let hi = h.inverse()?;
    let e1 = eta.at(sym.lambda1)?;
    let e2 = eta.at(sym.lambda2)?;
    let mut worst = 0.0f64;
    for m in 0..8 {
        let z = C64::from_polar(0.37 + 0.11 * m as f64, 0.9 * m as f64 + 0.2);
        let lhs = e2.eval(z);
        let rhs = hi * e1.eval(z) * *h;
        worst = worst.max(lhs.dist(&rhs) / (1.0 + lhs.max_abs()));
    }
    if worst > tol {
        return Err(HolonomyError::ConstantGauge { deviation: worst });
    }
    Ok(worst)
}

/// Check both validity conditions for one gauge; returns
/// `(eigenvector residual, |(N1^-1 h N2)_21|, a)`.
pub fn check_gauge(
    g: &RegularizingGauge,
    index: usize,
    h: &Mat2,
    sym: &SymData,
    checks: &GaugeChecks,
) -> Result<(f64, f64, C64), HolonomyError> {
    // first column of P is an eigenvector of Res with eigenvalue k
    let k = re(g.k as f64);
    let mut eig = 0.0f64;
    for m in 0..=8 {
        let tau = sym.tau1 + (sym.tau2 - sym.tau1) * (m as f64 + 0.5) / 9.0;
        let l = C64::from_polar(1.0, tau);
        let r = g.residue.eval(l)?;
        let p = g.frame.eval(l)?;
        let (v0, v1) = (p.a, p.c);
        let norm = (v0.norm_sqr() + v1.norm_sqr()).sqrt().max(1e-300);
        let e0 = r.a * v0 + r.b * v1 - k * v0;
        let e1 = r.c * v0 + r.d * v1 - k * v1;
        eig = eig.max((e0.norm_sqr() + e1.norm_sqr()).sqrt() / norm);
    }
    if eig > checks.eigenvector_tol {
        return Err(HolonomyError::GaugeEigenvector { gauge: index, k: g.k, residual: eig });
    }
    let n1 = normalised_frame(&g.frame, sym.lambda1)?;
    let n2 = normalised_frame(&g.frame, sym.lambda2)?;
    let t = n1.inverse()? * *h * n2;
    if t.c.norm() > checks.triangular_tol {
        return Err(HolonomyError::GaugeTriangular { gauge: index, entry: t.c.norm() });
    }
    if t.a.norm() < 1e-300 {
        return Err(HolonomyError::DegenerateDiagonal { gauge: index });
    }
    Ok((eig, t.c.norm(), t.a))
}

/// `sum_j [ int tr(Res_j N_j' N_j^-1) dlambda - 2 k_j log a_j ]`.
pub fn hol_regularizing(
    eta: Option<&FuchsianPotential>,
    gauges: &[RegularizingGauge],
    h: &Mat2,
    sym: &SymData,
    quad_tol: f64,
    checks: &GaugeChecks,
) -> Result<HolonomyValue, HolonomyError> {
    if let Some(eta) = eta {
        verify_constant_gauge(eta, h, sym, 1e-9)?;
    }
    let mut total = C64::default();
    let mut integral = C64::default();
    let mut branch_ambiguous = false;
    for (j, g) in gauges.iter().enumerate() {
        let (_, _, a) = check_gauge(g, j, h, sym, checks)?;
        let (num, den) = gauge_integrand(g);
        let int = arc_ratio_integral(&num, &den, sym, quad_tol)?;
        let (log_a, flag) = principal_log(a);
        branch_ambiguous |= flag;
        integral += int;
        total += int - 2.0 * g.k as f64 * log_a;
    }
    Ok(HolonomyValue { log_hol: total, integral, branch_ambiguous })
}

/// `h` relating the Lawson potential at its two Sym points.
pub fn lawson_h() -> Mat2 {
    Mat2::from_real(0.0, -1.0, 1.0, 0.0)
}

/// The gauges with first column `(x2 + i x3, 1 - x1)` at each pole, rotated
/// by the symmetry matrices. They are regularizing only on the unit-circle arc.
pub fn lawson_fake_gauges(an: &LawsonAnsatz) -> Vec<RegularizingGauge> {
    let [x1, x2, x3] = &an.x;
    let ix3 = x3.scale(I);
    let one = ScalarLoop::constant(re(1.0));
    let p = MatrixLoop::from_entries(&(x2 + &ix3), &(x1 - &one), &(&one - x1), &(x2 - &ix3));
    let res = an.residue_loops();
    (0..4)
        .map(|k| {
            let g = symmetry_matrix(k + 1);
            RegularizingGauge {
                pole: k,
                residue: res[k].clone(),
                frame: p.sandwich(&g, &Mat2::identity()),
                k: 1,
            }
        })
        .collect()
}

/// Endpoint-value formula for the Lawson family:
/// `4 log[(x2' - i x3') / (x2' + i x3')](lambda2) + 4i int (x2 x3' - x3 x2') / (1 - x1)`.
///
/// The double zero of `1 - x1` at `lambda2` is divided out of numerator and
/// denominator exactly before integrating.
pub fn hol_lawson_lev(an: &LawsonAnsatz, theta: f64, quad_tol: f64) -> Result<HolonomyValue, HolonomyError> {
    let sym = SymData::symmetric(theta)?;
    hol_lawson_lev_sym(&an.x, &sym, quad_tol)
}

pub fn hol_lawson_lev_sym(x: &[ScalarLoop; 3], sym: &SymData, quad_tol: f64) -> Result<HolonomyValue, HolonomyError> {
    let [x1, x2, x3] = x;
    let d2 = x2.deriv();
    let d3 = x3.deriv();
    let num = &(x2 * &d3) - &(x3 * &d2);
    let den = &ScalarLoop::constant(re(1.0)) - x1;
    let a = d2.eval(sym.lambda2)?;
    let b = d3.eval(sym.lambda2)?;
    let (lg, flag) = principal_log((a - I * b) / (a + I * b));
    let int = arc_ratio_integral(&num, &den, sym, quad_tol)?;
    Ok(HolonomyValue { log_hol: 4.0 * lg + 4.0 * I * int, integral: int, branch_ambiguous: flag })
}

/// Darboux coordinates `(u, r)` at a point of the quadric.
pub fn darboux_coords(x1: C64, x2: C64, x3: C64) -> Result<(C64, C64), HolonomyError> {
    let p = x2 + I * x1 * x3;
    let q = I * x1 * x2 - x3;
    let s = x2 * x2 + x3 * x3;
    let lam = C64::default();
    let tiny = 1e-300;
    if q.norm() < tiny {
        return Err(HolonomyError::ChartSingular { lambda: lam, which: "i x1 x2 - x3" });
    }
    if p.norm() < tiny {
        return Err(HolonomyError::ChartSingular { lambda: lam, which: "x2 + i x1 x3" });
    }
    if s.norm() < tiny {
        return Err(HolonomyError::ChartSingular { lambda: lam, which: "x2^2 + x3^2" });
    }
    let u = -(p * p) / (q * q);
    let r = 2.0 * x2 * (x3 - I * x1 * x2) * (x3 - I * x1 * x2) / (s * p);
    Ok((u, r))
}

struct XJet {
    x: [ScalarLoop; 3],
    dx: [ScalarLoop; 3],
}

impl XJet {
    fn new(x: &[ScalarLoop; 3]) -> Self {
        XJet { x: x.clone(), dx: [x[0].deriv(), x[1].deriv(), x[2].deriv()] }
    }

    fn at(&self, l: C64) -> Result<([C64; 3], [C64; 3]), HolonomyError> {
        Ok((
            [self.x[0].eval(l)?, self.x[1].eval(l)?, self.x[2].eval(l)?],
            [self.dx[0].eval(l)?, self.dx[1].eval(l)?, self.dx[2].eval(l)?],
        ))
    }
}

const CHART_CLEARANCE: f64 = 1e-6;

/// The one-form `-2 x2 (x1 - i x2 x3) / (x1 (x2^2 - 1)) dx2 - (2 i x2 / x1) dx3`.
fn darboux_form(x: [C64; 3], dx: [C64; 3]) -> C64 {
    let [x1, x2, x3] = x;
    -2.0 * x2 * (x1 - I * x2 * x3) / (x1 * (x2 * x2 - 1.0)) * dx[1] - 2.0 * I * x2 / x1 * dx[2]
}

/// `-r du / 2` with `du` from the chain rule.
fn rdu_form(x: [C64; 3], dx: [C64; 3]) -> Result<C64, HolonomyError> {
    let [x1, x2, x3] = x;
    let (_, r) = darboux_coords(x1, x2, x3)?;
    let p = x2 + I * x1 * x3;
    let q = I * x1 * x2 - x3;
    let dp = dx[1] + I * (dx[0] * x3 + x1 * dx[2]);
    let dq = I * (dx[0] * x2 + x1 * dx[1]) - dx[2];
    let du = -2.0 * p * (dp * q - p * dq) / (q * q * q);
    Ok(-0.5 * r * du)
}

fn scan_arc<F>(jet: &XJet, tau_a: f64, tau_b: f64, bad: F) -> Result<(), HolonomyError>
where
    F: Fn([C64; 3]) -> Option<&'static str>,
{
    for m in 0..=256 {
        let tau = tau_a + (tau_b - tau_a) * m as f64 / 256.0;
        let l = C64::from_polar(1.0, tau);
        let (x, _) = jet.at(l)?;
        if let Some(which) = bad(x) {
            return Err(HolonomyError::ChartSingular { lambda: l, which });
        }
    }
    Ok(())
}

/// Integral of the Darboux-coordinate form along `tau_a -> tau_b`.
pub fn hol_darboux(x: &[ScalarLoop; 3], tau_a: f64, tau_b: f64, quad_tol: f64) -> Result<C64, HolonomyError> {
    let jet = XJet::new(x);
    scan_arc(&jet, tau_a, tau_b, |x| {
        if x[0].norm() < CHART_CLEARANCE {
            Some("x1")
        } else if (x[1] * x[1] - 1.0).norm() < CHART_CLEARANCE {
            Some("x2^2 - 1")
        } else {
            None
        }
    })?;
    let f = |l: C64| match jet.at(l) {
        Ok((x, dx)) => darboux_form(x, dx),
        Err(_) => c(f64::NAN, 0.0),
    };
    Ok(integrate_arc(f, tau_a, tau_b, QuadOptions::new(quad_tol))?.value)
}

/// `-1/2 int r du` along `tau_a -> tau_b`.
pub fn hol_rdu(x: &[ScalarLoop; 3], tau_a: f64, tau_b: f64, quad_tol: f64) -> Result<C64, HolonomyError> {
    let jet = XJet::new(x);
    scan_arc(&jet, tau_a, tau_b, |x| {
        let [x1, x2, x3] = x;
        if (I * x1 * x2 - x3).norm() < CHART_CLEARANCE {
            Some("i x1 x2 - x3")
        } else if (x2 + I * x1 * x3).norm() < CHART_CLEARANCE {
            Some("x2 + i x1 x3")
        } else if (x2 * x2 + x3 * x3).norm() < CHART_CLEARANCE {
            Some("x2^2 + x3^2")
        } else {
            None
        }
    })?;
    let f = |l: C64| match jet.at(l).and_then(|(x, dx)| rdu_form(x, dx)) {
        Ok(v) => v,
        Err(_) => c(f64::NAN, 0.0),
    };
    Ok(integrate_arc(f, tau_a, tau_b, QuadOptions::new(quad_tol))?.value)
}

/// Full-arc Darboux holonomy from `e^{-i theta}` to `e^{i theta}`.
///
/// The form of [`hol_darboux`] is singular where `x1 = 0`, which happens near
/// `lambda = 1`, so the middle half of the arc uses `-r du / 2` instead; the
/// two forms differ by an exact term that is regular there. The value is the
/// holonomy of the surface itself; the double-cover holonomy is twice this.
pub fn hol_darboux_full(x: &[ScalarLoop; 3], theta: f64, quad_tol: f64) -> Result<C64, HolonomyError> {
    let tol = quad_tol / 3.0;
    let left = hol_darboux(x, -theta, -theta / 2.0, tol)?;
    let mid = hol_rdu(x, -theta / 2.0, theta / 2.0, tol)?;
    let right = hol_darboux(x, theta / 2.0, theta, tol)?;
    Ok(left + mid + right)
}

/// Gauge holomorphic at `lambda = 0`, given as `numerator / denominator`.
#[derive(Clone, Debug, PartialEq)]
pub struct PositiveGauge {
    pub residue: MatrixLoop,
    pub numerator: MatrixLoop,
    pub denominator: ScalarLoop,
}

impl PositiveGauge {
    pub fn polynomial(residue: MatrixLoop, n: MatrixLoop) -> Self {
        PositiveGauge { residue, numerator: n, denominator: ScalarLoop::constant(re(1.0)) }
    }

    /// First two Taylor coefficients at `lambda = 0`.
    pub fn taylor01(&self, index: usize) -> Result<(Mat2, Mat2), HolonomyError> {
        let mut n0 = [C64::default(); 4];
        let mut n1 = [C64::default(); 4];
        for (slot, (i, j)) in [(0, 0), (0, 1), (1, 0), (1, 1)].into_iter().enumerate() {
            let q = self
                .numerator
                .entry(i, j)
                .taylor_div(&self.denominator, 2)
                .map_err(|_| HolonomyError::NotHolomorphic { gauge: index })?;
            n0[slot] = q[0];
            n1[slot] = q[1];
        }
        Ok((Mat2::new(n0[0], n0[1], n0[2], n0[3]), Mat2::new(n1[0], n1[1], n1[2], n1[3])))
    }
}

/// `4 pi sum_j tr(eta_{-1,j} N_{j,1} N_{j,0}^-1)`.
pub fn willmore_residue(gauges: &[PositiveGauge]) -> Result<f64, HolonomyError> {
    let mut total = C64::default();
    for (j, g) in gauges.iter().enumerate() {
        let (n0, n1) = g.taylor01(j)?;
        let r = g.residue.coeff(-1);
        total += (r * n1 * n0.inverse()?).trace();
    }
    let w = 4.0 * PI * total;
    if w.im.abs() > 1e-6 * (1.0 + w.re.abs()) {
        return Err(HolonomyError::NotReal { imag: w.im });
    }
    Ok(w.re)
}

/// Gauges holomorphic at zero for the Lawson potential: first column
/// `(x2 + i x3, 1 - x1) / Delta`, second column `(-1, e^{i phi})`, with
/// `Delta = 1 - x1 + e^{i phi}(x2 + i x3)` making the determinant one.
pub fn lawson_true_gauges(an: &LawsonAnsatz) -> Vec<PositiveGauge> {
    let [x1, x2, x3] = &an.x;
    let one = ScalarLoop::constant(re(1.0));
    let e = C64::from_polar(1.0, an.phi);
    let v = x2 + &x3.scale(I);
    let w = &one - x1;
    let delta = &w + &v.scale(e);
    let num = MatrixLoop::from_entries(&v, &-&delta, &w, &delta.scale(e));
    let res = an.residue_loops();
    (0..4)
        .map(|k| {
            let g = symmetry_matrix(k + 1);
            PositiveGauge {
                residue: res[k].clone(),
                numerator: num.sandwich(&g, &Mat2::identity()),
                denominator: delta.clone(),
            }
        })
        .collect()
}

/// Willmore energy of the Lawson surface. The residue formula run on the
/// potential gives the energy of the double cover; this halves it.
pub fn lawson_willmore(an: &LawsonAnsatz) -> Result<f64, HolonomyError> {
    Ok(willmore_residue(&lawson_true_gauges(an))? / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lawson::{central_ansatz, LawsonFamily};

    #[test]
    fn mean_curvature_examples() {
        assert!(mean_curvature(re(1.0), re(-1.0)).unwrap().abs() < 1e-15);
        let th = 1.3;
        let h = mean_curvature(re(1.0), C64::from_polar(1.0, th)).unwrap();
        assert!((h + 1.0 / (th / 2.0).tan()).abs() < 1e-14);
        let a = 0.7;
        let h = mean_curvature(C64::from_polar(1.0, -a), C64::from_polar(1.0, a)).unwrap();
        assert!((h + 1.0 / a.tan()).abs() < 1e-14);
        assert!(mean_curvature(re(1.0), re(1.0)).is_err());
    }

    #[test]
    fn sphere_invariants_give_trivial_holonomy() {
        for th in [0.5, 1.0, 2.0] {
            let z = hol_from_invariants(4.0 * PI, 0.0, th, PI * (th - th.sin()));
            assert!(z.norm() < 1e-14);
        }
    }

    #[test]
    fn minimal_case_formula() {
        let (w, v) = (13.0, 2.2);
        let z = hol_from_invariants(w, 0.0, PI, v);
        assert!(dist_mod_2pi_i(z, c(0.0, w / 4.0 - v / PI)) < 1e-14);
    }

    #[test]
    fn clifford_torus_holonomy() {
        let z = hol_from_invariants(2.0 * PI * PI, 0.0, PI, PI * PI);
        assert!(dist_mod_2pi_i(z, c(0.0, PI * PI / 2.0 - PI)) < 1e-13);
    }

    #[test]
    fn central_volume() {
        for phi in [PI / 6.0, PI / 4.0, PI / 3.0] {
            let v = volume_from_log_hol(c(0.0, 8.0 * phi), PI / 2.0, 8.0 * PI, VolumeAnchor::Near(2.0 * PI * PI - 4.0 * PI * phi)).unwrap();
            assert!((v.volume - (2.0 * PI * PI - 4.0 * PI * phi)).abs() < 1e-12);
            let p = volume_from_log_hol(c(0.0, 8.0 * phi), PI / 2.0, 8.0 * PI, VolumeAnchor::Principal).unwrap();
            assert!(((p.volume - v.volume) / (PI * PI)).fract().abs() < 1e-12);
        }
        let v = volume_from_log_hol(c(0.0, 2.0 * PI), PI / 2.0, 8.0 * PI, VolumeAnchor::Near(PI * PI)).unwrap();
        assert!((v.volume - PI * PI).abs() < 1e-12);
    }

    #[test]
    fn volume_shift_by_period() {
        let a = volume_from_log_hol(c(0.0, 1.234), 1.4, 20.0, VolumeAnchor::Principal).unwrap();
        let b = volume_from_log_hol(c(0.0, 1.234 + 2.0 * PI), 1.4, 20.0, VolumeAnchor::Principal).unwrap();
        assert!((a.volume - b.volume).abs() < 1e-12);
        let raw = volume_from_log_hol(c(0.0, 1.234), 1.4, 20.0, VolumeAnchor::Near(0.0)).unwrap();
        let shifted = volume_from_log_hol(c(0.0, 1.234 + 2.0 * PI), 1.4, 20.0, VolumeAnchor::Near(10.0)).unwrap();
        assert!(((shifted.volume - raw.volume) / (PI * PI) - (shifted.volume - raw.volume) / (PI * PI)).abs() < 1e-15);
        assert!((((shifted.volume - raw.volume) / (PI * PI)).round() * PI * PI - (shifted.volume - raw.volume)).abs() < 1e-12);
    }

    #[test]
    fn reduce_log_range() {
        let z = reduce_log(c(0.3, 7.0 * PI + 0.1));
        assert!((z.im - (-PI + 0.1)).abs() < 1e-12 && z.re == 0.3);
        assert!((reduce_log(c(0.0, PI)).im - PI).abs() < 1e-15);
    }

    #[test]
    fn lev_at_central_data() {
        for phi in [PI / 6.0, PI / 4.0, PI / 3.0] {
            let an = central_ansatz(phi, 0.0);
            let v = hol_lawson_lev(&an, PI / 2.0, 1e-12).unwrap();
            assert!(v.integral.norm() < 1e-14);
            assert!(dist_mod_2pi_i(v.log_hol, c(0.0, 8.0 * phi)) < 1e-12);
        }
    }

    #[test]
    fn lev_endpoint_limit_failure() {
        // numerator nonzero at lambda2 while 1 - x1 has a double zero
        let mut an = central_ansatz(PI / 3.0, 0.0);
        an.x[1] = &an.x[1] + &ScalarLoop::constant(re(1e-3));
        let r = hol_lawson_lev(&an, PI / 2.0, 1e-10);
        assert!(matches!(r, Err(HolonomyError::EndpointLimit { .. })));
    }

    #[test]
    fn fake_gauge_matches_lev_at_central_data() {
        let an = central_ansatz(PI / 3.0, 0.0);
        let sym = SymData::symmetric(PI / 2.0).unwrap();
        let v = hol_regularizing(None, &lawson_fake_gauges(&an), &lawson_h(), &sym, 1e-12, &GaugeChecks::default()).unwrap();
        assert!(dist_mod_2pi_i(v.log_hol, c(0.0, 8.0 * PI / 3.0)) < 1e-10, "{}", v.log_hol);
    }

    #[test]
    fn darboux_coords_at_central_point() {
        let phi: f64 = 0.6;
        let (u, r) = darboux_coords(re(0.0), re(-phi.sin()), re(-phi.cos())).unwrap();
        assert!((u + phi.tan().powi(2)).norm() < 1e-14);
        assert!((r - 2.0 * phi.cos().powi(2)).norm() < 1e-14);
        assert!(matches!(darboux_coords(re(1.0), re(0.0), re(0.0)), Err(HolonomyError::ChartSingular { .. })));
    }

    #[test]
    fn darboux_c3_symmetry() {
        let (x1, x2, x3) = (c(0.3, 0.1), c(-0.5, 0.2), c(0.7, -0.3));
        let (u, r) = darboux_coords(x1, x2, x3).unwrap();
        let (u2, r2) = darboux_coords(x1, -x2, -x3).unwrap();
        assert!((u - u2).norm() < 1e-14);
        assert!((r + r2).norm() < 1e-13 || (r - r2).norm() < 1e-13);
    }

    #[test]
    fn darboux_vanishes_without_x2() {
        let x = [
            ScalarLoop::constant(re(0.8)),
            ScalarLoop::zero(),
            ScalarLoop::real_terms(&[(1, 0.6)]),
        ];
        let v = hol_darboux(&x, 0.2, 1.0, 1e-12).unwrap();
        assert_eq!(v, C64::default());
    }

    #[test]
    fn darboux_reports_singular_crossing() {
        let an = central_ansatz(PI / 4.0, 0.0);
        let r = hol_darboux(&an.x, -0.3, 0.3, 1e-10);
        assert!(matches!(r, Err(HolonomyError::ChartSingular { which: "x1", .. })));
    }

    #[test]
    fn darboux_full_arc_is_single_cover() {
        let phi = PI / 3.0;
        let an = central_ansatz(phi, 0.0);
        let d = hol_darboux_full(&an.x, PI / 2.0, 1e-12).unwrap();
        assert!(dist_mod_2pi_i(2.0 * d, c(0.0, 8.0 * phi)) < 1e-9, "{d}");
    }

    #[test]
    fn willmore_central_lawson() {
        for phi in [PI / 4.0, 0.4] {
            let w = lawson_willmore(&central_ansatz(phi, 0.0)).unwrap();
            assert!((w - 8.0 * PI).abs() < 1e-12, "{w}");
        }
    }

    #[test]
    fn willmore_constant_gauge_contributes_nothing() {
        let res = MatrixLoop::from_terms(&[(-1, Mat2::from_real(0.0, 1.0, 0.0, 0.0)), (0, Mat2::identity())]);
        let g = PositiveGauge::polynomial(res, MatrixLoop::constant(Mat2::from_real(2.0, 1.0, 1.0, 1.0)));
        assert_eq!(willmore_residue(&[g]).unwrap(), 0.0);
    }

    #[test]
    fn willmore_rejects_pole_at_zero() {
        let res = MatrixLoop::constant(Mat2::identity());
        let g = PositiveGauge::polynomial(res, MatrixLoop::monomial(-1, Mat2::identity()));
        assert!(matches!(willmore_residue(&[g]), Err(HolonomyError::NotHolomorphic { gauge: 0 })));
    }

    #[test]
    fn lev_taylor_is_unimodular() {
        let fam = LawsonFamily::new(PI / 3.0).unwrap();
        let v = fam.log_hol(0.01, 1e-12).unwrap();
        assert!(v.re.abs() < 1e-7, "{v}");
    }
}
