//! Gauss-Newton collocation for the Lawson Monodromy Problem at finite `s`.
//!
//! Unknowns are the coefficients of `x1, x2, x3` in degrees `0..=D` (real and
//! imaginary parts) together with `theta` and the potential scale `t`. The
//! `lambda^-1` coefficients stay at their initial values, so the residues
//! `t A_k` have eigenvalues `+-s` exactly when `t^2 (x . x) = s^2`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::algebra::{c, ScalarLoop, C64};
use crate::error::SolverError;
use crate::holonomy::{hol_lawson_lev, lawson_willmore, volume_from_log_hol, VolumeAnchor};
use crate::fuchsian::{build_lawson_potential, quadric_residual, FuchsianPotential, LawsonAnsatz};
use crate::lawson::{circle_samples, pin_sym_points, volume_series, LawsonFamily};
use crate::monodromy::{monodromy_diagnostics, monodromy_rep, MonodromyDiagnostics};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    /// Highest `lambda` power kept in `x1, x2, x3`.
    pub degree: usize,
    /// Collocation points on the unit circle.
    pub samples: usize,
    pub tol: f64,
    pub max_iter: usize,
    /// Smallest step fraction tried before giving up on a direction.
    pub damping: f64,
    pub ode_tol: f64,
    pub fd_step: f64,
    /// Angular offset of the collocation points.
    pub sample_offset: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            degree: 3,
            samples: 8,
            tol: 1e-10,
            max_iter: 15,
            damping: 1.0 / 64.0,
            ode_tol: 1e-12,
            fd_step: 1e-6,
            sample_offset: 0.1,
        }
    }
}

impl SolverConfig {
    pub fn unknowns(&self) -> usize {
        6 * (self.degree + 1) + 2
    }

    pub fn residuals(&self) -> usize {
        5 * self.samples + 32
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if self.degree < 1 {
            return Err(SolverError::Config(format!("degree must be at least 1, got {}", self.degree)));
        }
        if self.samples == 0 {
            return Err(SolverError::Config("sample count must be positive".into()));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(SolverError::Config(format!("damping must lie in (0, 1], got {}", self.damping)));
        }
        for (name, v) in [("tol", self.tol), ("ode_tol", self.ode_tol), ("fd_step", self.fd_step)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(SolverError::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.residuals() < self.unknowns() {
            return Err(SolverError::Underdetermined { residuals: self.residuals(), unknowns: self.unknowns() });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolvedFamily {
    /// Solved `x`, with `ansatz.s` holding the potential scale `t`.
    pub ansatz: LawsonAnsatz,
    pub theta: f64,
    pub s: f64,
    pub residual_norm: f64,
    pub iterations: usize,
    /// Residual norm before the first and after every iteration.
    pub history: Vec<f64>,
    /// Numerical rank of the last Jacobian.
    pub rank: usize,
}

impl SolvedFamily {
    pub fn phi(&self) -> f64 {
        self.ansatz.phi
    }

    /// Unsolved starting point for [`solve`].
    pub fn initial(ansatz: LawsonAnsatz, theta: f64, s: f64) -> Self {
        SolvedFamily { ansatz, theta, s, residual_norm: f64::NAN, iterations: 0, history: Vec::new(), rank: 0 }
    }

    pub fn t(&self) -> f64 {
        self.ansatz.s
    }

    /// `x t / s`, which satisfies `x . x = 1` and takes the values `(+-1, 0, 0)`
    /// at the Sym points; this is the normalisation the holonomy and Willmore
    /// formulas expect.
    pub fn unit_ansatz(&self) -> LawsonAnsatz {
        let k = c(self.t() / self.s, 0.0);
        let x = [0, 1, 2].map(|j| self.ansatz.x[j].scale(k));
        LawsonAnsatz { x, ..self.ansatz.clone() }
    }

    /// [`unit_ansatz`](Self::unit_ansatz) with the Sym-point values and the
    /// double zero of `1 - x1` imposed exactly, and the size of that
    /// correction. A truncated solve leaves these conditions violated at the
    /// level of its residual, which splits the double zero.
    pub fn holonomy_ansatz(&self) -> Result<(LawsonAnsatz, f64), SolverError> {
        let unit = self.unit_ansatz();
        let pinned = pin_sym_points(&unit, self.theta).map_err(lawson_err)?;
        let shift = (0..3).map(|j| (&pinned.x[j] - &unit.x[j]).max_coeff_magnitude()).fold(0.0, f64::max);
        Ok((pinned, shift))
    }

    /// Willmore energy, LEV log-holonomy and volume of the solved surface.
    pub fn invariants(&self, quad_tol: f64) -> Result<SolvedInvariants, SolverError> {
        let (an, pin_shift) = self.holonomy_ansatz()?;
        let willmore = lawson_willmore(&an)?;
        let log_hol = hol_lawson_lev(&an, self.theta, quad_tol)?.log_hol;
        let anchor = VolumeAnchor::Near(volume_series(self.phi(), self.s));
        let volume = volume_from_log_hol(log_hol, self.theta, willmore, anchor)?.volume;
        Ok(SolvedInvariants { willmore, log_hol, volume, pin_shift })
    }

    /// `t sum A_k dz/(z - p_k)`.
    pub fn potential(&self) -> Result<FuchsianPotential, SolverError> {
        Ok(build_lawson_potential(&self.ansatz)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolvedInvariants {
    pub willmore: f64,
    pub log_hol: C64,
    pub volume: f64,
    /// Largest coefficient change made by the Sym-point pinning.
    pub pin_shift: f64,
}

fn pack(an: &LawsonAnsatz, theta: f64, degree: usize) -> Vec<f64> {
    let mut v = Vec::with_capacity(6 * (degree + 1) + 2);
    for x in &an.x {
        for k in 0..=degree {
            let z = x.coeff(k as i32);
            v.push(z.re);
            v.push(z.im);
        }
    }
    v.push(theta);
    v.push(an.s);
    v
}

fn unpack(frozen: &[C64; 3], v: &[f64], phi: f64, degree: usize) -> (LawsonAnsatz, f64) {
    let x = [0, 1, 2].map(|j| {
        let mut coeffs = Vec::with_capacity(degree + 2);
        coeffs.push(frozen[j]);
        let base = 2 * j * (degree + 1);
        for k in 0..=degree {
            coeffs.push(c(v[base + 2 * k], v[base + 2 * k + 1]));
        }
        ScalarLoop::new(-1, coeffs)
    });
    let n = v.len();
    (LawsonAnsatz { phi, x, s: v[n - 1] }, v[n - 2])
}

fn sym_points(theta: f64) -> [C64; 2] {
    [C64::from_polar(1.0, -theta), C64::from_polar(1.0, theta)]
}

/// Defect `x . x - (s/t)^2` of the eigenvalue normalisation, `t = ansatz.s`.
pub fn normalised_quadric(ansatz: &LawsonAnsatz, s: f64, lambda: C64) -> Result<C64, SolverError> {
    let r = s / ansatz.s;
    Ok(quadric_residual(ansatz, lambda)? + 1.0 - r * r)
}

/// Collocation residuals for the potential `t sum A_k dz/(z - p_k)` with
/// `t = ansatz.s`: per circle sample the defect of `x . x = (s/t)^2` (re, im)
/// and `Im tr(M1 M2), Im tr(M2 M3), Im tr(M1 M3)`; then the off-diagonal
/// entries of `M1 .. M4` at `e^{-i theta}` and `e^{i theta}` (re, im).
///
/// With `t = s` the first block is the plain quadric residual.
pub fn residual_vector(ansatz: &LawsonAnsatz, theta: f64, s: f64, config: &SolverConfig) -> Result<Vec<f64>, SolverError> {
    let an = ansatz;
    let eta = build_lawson_potential(an)?;
    let mut lambdas = circle_samples(config.samples, config.sample_offset);
    lambdas.extend(sym_points(theta));
    let blocks = lambdas
        .par_iter()
        .enumerate()
        .map(|(i, &lam)| -> Result<Vec<f64>, SolverError> {
            let rep = monodromy_rep(&eta, lam, config.ode_tol)?;
            let m = &rep.matrices;
            if i < config.samples {
                let q = normalised_quadric(an, s, lam)?;
                Ok(vec![q.re, q.im, (m[0] * m[1]).trace().im, (m[1] * m[2]).trace().im, (m[0] * m[2]).trace().im])
            } else {
                Ok(m.iter().flat_map(|mk| [mk.b.re, mk.b.im, mk.c.re, mk.c.im]).collect())
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(blocks.concat())
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

struct Problem<'a> {
    frozen: [C64; 3],
    phi: f64,
    s: f64,
    config: &'a SolverConfig,
}

impl Problem<'_> {
    fn residual(&self, v: &[f64]) -> Result<Vec<f64>, SolverError> {
        let (an, theta) = unpack(&self.frozen, v, self.phi, self.config.degree);
        residual_vector(&an, theta, self.s, self.config)
    }

    fn jacobian(&self, v: &[f64], rows: usize) -> Result<DMatrix<f64>, SolverError> {
        let h = self.config.fd_step;
        let cols = (0..v.len())
            .into_par_iter()
            .map(|j| -> Result<Vec<f64>, SolverError> {
                let mut vp = v.to_vec();
                let mut vm = v.to_vec();
                vp[j] += h;
                vm[j] -= h;
                let rp = self.residual(&vp)?;
                let rm = self.residual(&vm)?;
                Ok(rp.iter().zip(&rm).map(|(a, b)| (a - b) / (2.0 * h)).collect())
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(DMatrix::from_fn(rows, v.len(), |i, j| cols[j][i]))
    }
}

/// Relative singular value cutoff of the pseudo-inverse.
const RCOND: f64 = 1e-11;

/// Gauss-Newton step `-J^+ r` and the numerical rank of `J`.
fn gauss_newton_step(j: DMatrix<f64>, r: &[f64]) -> (DVector<f64>, usize) {
    let svd = j.svd(true, true);
    let smax = svd.singular_values.max();
    let cut = RCOND * smax;
    let rank = svd.singular_values.iter().filter(|&&x| x > cut).count();
    let rhs = DVector::from_iterator(r.len(), r.iter().map(|x| -x));
    let step = svd.solve(&rhs, cut).unwrap_or_else(|_| DVector::zeros(j_cols(&svd)));
    (step, rank)
}

fn j_cols(svd: &nalgebra::linalg::SVD<f64, nalgebra::Dyn, nalgebra::Dyn>) -> usize {
    svd.v_t.as_ref().map(|m| m.ncols()).unwrap_or(0)
}

fn lawson_err(e: crate::error::LawsonError) -> SolverError {
    SolverError::Config(e.to_string())
}

/// Second-order Taylor prediction at eigenvalue parameter `s`, returned in
/// the solver's normalisation together with its angle.
///
/// The Taylor data `X(t)` satisfy `X . X = 1` with `lambda^-1` coefficients
/// `k(t)` times the residue target. Dividing by `k` restores the target, and
/// the potential scale is the `t` with `t / k(t) = s`.
pub fn taylor_prediction(phi: f64, s: f64, pinned: bool) -> Result<(LawsonAnsatz, f64), SolverError> {
    let fam = LawsonFamily::new(phi).map_err(lawson_err)?;
    let target = LawsonAnsatz::residue_target(phi)[0];
    let k = |t: f64| -> Result<f64, SolverError> {
        Ok((fam.taylor_x(t, 2).map_err(lawson_err)?.x[0].coeff(-1) / target).re)
    };
    let mut t = s;
    for _ in 0..50 {
        let next = s * k(t)?;
        let done = (next - t).abs() <= 1e-16 * s;
        t = next;
        if done {
            break;
        }
    }
    let (an, theta) = if pinned {
        fam.pinned_taylor(t).map_err(lawson_err)?
    } else {
        (fam.taylor_x(t, 2).map_err(lawson_err)?, fam.theta(t))
    };
    let inv = 1.0 / k(t)?;
    let x = [0, 1, 2].map(|j| an.x[j].scale(c(inv, 0.0)));
    Ok((LawsonAnsatz { phi, x, s: t }, theta))
}

/// Default starting point of [`solve`].
pub fn taylor_init(phi: f64, s: f64) -> Result<(LawsonAnsatz, f64), SolverError> {
    taylor_prediction(phi, s, true)
}

/// Solve for `(x, theta)` at fixed `s`.
///
/// Fails with [`SolverError::NonConvergence`] if the residual is still above
/// the tolerance after `max_iter` steps.
pub fn solve(phi: f64, s: f64, config: &SolverConfig, init: Option<&SolvedFamily>) -> Result<SolvedFamily, SolverError> {
    config.validate()?;
    if !(s > 0.0 && s < 0.25) {
        return Err(SolverError::Config(format!("s = {s} outside (0, 1/4)")));
    }
    let (an0, theta0) = match init {
        Some(f) => (f.ansatz.clone(), f.theta),
        None => taylor_init(phi, s)?,
    };
    if (an0.phi - phi).abs() > 1e-15 {
        return Err(SolverError::Config(format!("initial family has phi = {}, expected {phi}", an0.phi)));
    }
    an0.residue_orbit(1e-12)?;
    let frozen = [0, 1, 2].map(|j| an0.x[j].coeff(-1));
    let problem = Problem { frozen, phi, s, config };
    let mut v = pack(&an0, theta0, config.degree);
    let mut r = problem.residual(&v)?;
    let mut rn = norm(&r);
    let mut history = vec![rn];
    let mut rank = config.unknowns();
    let mut iterations = 0;
    while rn >= config.tol && iterations < config.max_iter {
        iterations += 1;
        let jac = problem.jacobian(&v, r.len())?;
        let (step, rk) = gauss_newton_step(jac, &r);
        rank = rk;
        let mut alpha = 1.0;
        let mut accepted = false;
        while alpha >= config.damping {
            let trial: Vec<f64> = v.iter().zip(step.iter()).map(|(a, d)| a + alpha * d).collect();
            if let Ok(rt) = problem.residual(&trial) {
                let nt = norm(&rt);
                if nt < rn {
                    v = trial;
                    r = rt;
                    rn = nt;
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        history.push(rn);
        if !accepted {
            break;
        }
    }
    if rn >= config.tol {
        if rank < config.unknowns() {
            return Err(SolverError::RankDeficient { rank, unknowns: config.unknowns() });
        }
        return Err(SolverError::NonConvergence { iterations, residual: rn, history });
    }
    let (ansatz, theta) = unpack(&frozen, &v, phi, config.degree);
    Ok(SolvedFamily { ansatz, theta, s, residual_norm: rn, iterations, history, rank })
}

/// Largest coefficient distance between the solved `x` and the unpinned
/// second-order Taylor prediction at the same `s`.
pub fn taylor_distance(fam: &SolvedFamily) -> Result<f64, SolverError> {
    let (pred, _) = taylor_prediction(fam.phi(), fam.s, false)?;
    let mut worst = 0.0f64;
    for j in 0..3 {
        let d = &fam.ansatz.x[j] - &pred.x[j];
        worst = worst.max(d.max_coeff_magnitude());
    }
    Ok(worst)
}

/// Worst monodromy diagnostics of a solved family at circle samples not used
/// for collocation, together with its Sym-point off-diagonal defect.
#[derive(Clone, Debug, PartialEq)]
pub struct HeldOutReport {
    pub samples: usize,
    pub quadric: f64,
    pub im_trace: f64,
    pub trace_defect: f64,
    pub sym_off_diagonal: f64,
    pub product_defect: f64,
}

impl HeldOutReport {
    pub fn worst(&self) -> f64 {
        self.quadric.max(self.im_trace).max(self.sym_off_diagonal)
    }
}

pub fn held_out_check(fam: &SolvedFamily, samples: usize, ode_tol: f64) -> Result<HeldOutReport, SolverError> {
    let an = &fam.ansatz;
    let eta = fam.potential()?;
    let mut lambdas = circle_samples(samples, PI / samples as f64 + 0.0371);
    lambdas.extend(sym_points(fam.theta));
    let diags: Vec<(C64, MonodromyDiagnostics)> = lambdas
        .par_iter()
        .map(|&l| Ok((l, monodromy_diagnostics(&monodromy_rep(&eta, l, ode_tol)?, fam.s))))
        .collect::<Result<Vec<_>, SolverError>>()?;
    let mut rep = HeldOutReport { samples, quadric: 0.0, im_trace: 0.0, trace_defect: 0.0, sym_off_diagonal: 0.0, product_defect: 0.0 };
    for (i, (l, d)) in diags.iter().enumerate() {
        rep.product_defect = rep.product_defect.max(d.product_defect);
        if i < samples {
            rep.quadric = rep.quadric.max(normalised_quadric(an, fam.s, *l)?.norm());
            rep.im_trace = rep.im_trace.max(d.im_tr12.abs()).max(d.im_tr23.abs()).max(d.im_tr13.abs());
            rep.trace_defect = d.trace_defect.iter().fold(rep.trace_defect, |a, &b| a.max(b));
        } else {
            rep.sym_off_diagonal = d.off_diagonal.iter().fold(rep.sym_off_diagonal, |a, &b| a.max(b));
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lawson::central_ansatz;
    use std::f64::consts::FRAC_PI_2;

    fn small() -> SolverConfig {
        SolverConfig { degree: 5, samples: 12, ..Default::default() }
    }

    #[test]
    fn pack_roundtrip() {
        let (an, theta) = taylor_init(1.0, 0.01).unwrap();
        let frozen = [0, 1, 2].map(|j| an.x[j].coeff(-1));
        let v = pack(&an, theta, 3);
        assert_eq!(v.len(), SolverConfig::default().unknowns());
        let (back, th) = unpack(&frozen, &v, an.phi, 3);
        assert_eq!(th, theta);
        assert_eq!(back, an);
    }

    #[test]
    fn config_checks() {
        let cfg = SolverConfig { degree: 10, samples: 2, ..Default::default() };
        assert!(matches!(cfg.validate(), Err(SolverError::Underdetermined { .. })));
        let cfg = SolverConfig { damping: 0.0, ..Default::default() };
        assert!(matches!(cfg.validate(), Err(SolverError::Config(_))));
        assert!(SolverConfig::default().validate().is_ok());
    }

    #[test]
    fn central_data_solve_the_limit_problem() {
        let s = 1e-4;
        let an = central_ansatz(PI / 4.0, s);
        let r = residual_vector(&an, FRAC_PI_2, s, &SolverConfig::default()).unwrap();
        assert!(norm(&r) < 1e-8, "{}", norm(&r));
        let s = 1e-7;
        let an = central_ansatz(PI / 4.0, s);
        let init = SolvedFamily::initial(an.clone(), FRAC_PI_2, s);
        let f = solve(PI / 4.0, s, &SolverConfig::default(), Some(&init)).unwrap();
        assert_eq!(f.iterations, 0);
        assert_eq!(f.ansatz, an);
        assert_eq!(f.theta, FRAC_PI_2);
    }

    #[test]
    fn quadric_violation_is_visible() {
        let s = 1e-3;
        let an = central_ansatz(0.5, s);
        let eps = 1e-5;
        let x = [0, 1, 2].map(|j| an.x[j].scale(c(1.0 + eps, 0.0)));
        // keep the residue exact by moving the excess into t
        let bad = LawsonAnsatz { phi: an.phi, x, s };
        let r = residual_vector(&bad, FRAC_PI_2, s, &SolverConfig::default());
        assert!(r.is_err());
        let mut y = an.x.clone();
        y[2] = &y[2] + &ScalarLoop::constant(c(eps, 0.0));
        let bad = LawsonAnsatz { phi: an.phi, x: y, s };
        let r = residual_vector(&bad, FRAC_PI_2, s, &SolverConfig::default()).unwrap();
        assert!(norm(&r) >= eps);
    }

    #[test]
    fn taylor_residual_is_cubic() {
        let phi = PI / 3.0;
        let cfg = small();
        let res = |s: f64| {
            let (an, th) = taylor_prediction(phi, s, true).unwrap();
            norm(&residual_vector(&an, th, s, &cfg).unwrap())
        };
        let ratio = res(0.01) / res(0.005);
        assert!((6.0..10.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn predicted_scale_inverts_normalisation() {
        let phi = PI / 3.0;
        let s = 0.01;
        let (an, _) = taylor_prediction(phi, s, false).unwrap();
        assert_eq!(an.residue_orbit(1e-14).unwrap(), 0);
        let fam = LawsonFamily::new(phi).unwrap();
        let k = 1.0 - 0.25 * fam.kddot * an.s * an.s;
        assert!((an.s / k - s).abs() < 1e-15);
    }

    #[test]
    fn solves_small_s() {
        let f = solve(PI / 3.0, 0.005, &small(), None).unwrap();
        assert!(f.residual_norm < 1e-10);
        assert_eq!(f.rank, small().unknowns());
        let held = held_out_check(&f, 7, 1e-12).unwrap();
        assert!(held.worst() < 1e-9, "{held:?}");
    }
}
