//! Closed-form oracles: CMC spheres and homogeneous tori.

use std::f64::consts::PI;

use crate::algebra::{c, re, Mat2, MatrixLoop, C64, I};
use crate::error::ClosedFormError;
use crate::fuchsian::{FuchsianPotential, Pole};
use crate::holonomy::{
    hol_from_invariants, hol_regularizing, volume_from_log_hol_cover, willmore_residue, GaugeChecks, HolonomyValue,
    InvariantReport, PositiveGauge, RegularizingGauge, SymData, VolumeAnchor,
};
use crate::quadrature::{integrate, integrate_arc, QuadOptions};

/// `[[0, lambda^-1], [lambda, 0]]`.
fn sphere_residue() -> MatrixLoop {
    MatrixLoop::from_terms(&[(-1, Mat2::from_real(0.0, 1.0, 0.0, 0.0)), (1, Mat2::from_real(0.0, 0.0, 1.0, 0.0))])
}

/// `[[1, 0], [sign lambda, 1]]`.
fn lower_frame(sign: f64) -> MatrixLoop {
    MatrixLoop::from_terms(&[(0, Mat2::identity()), (1, Mat2::from_real(0.0, 0.0, sign, 0.0))])
}

/// `[[0, lambda^-1], [lambda, 0]] dz / z`, which builds double covers of
/// round spheres branched over `0` and `infinity`.
pub fn sphere_potential() -> FuchsianPotential {
    FuchsianPotential::new(vec![Pole { point: C64::default(), residue: sphere_residue() }], 1.0)
        .expect("single pole")
}

/// Regularizing gauges at `0` and at `infinity` (coordinate `w = 1/z`, where
/// the residue is `-Res_0`).
pub fn sphere_gauges() -> Vec<RegularizingGauge> {
    let res = sphere_residue();
    vec![
        RegularizingGauge { pole: 0, residue: res.clone(), frame: lower_frame(1.0), k: 1 },
        RegularizingGauge { pole: 1, residue: -&res, frame: lower_frame(-1.0), k: 1 },
    ]
}

/// `diag(e^{i beta}, e^{-i beta})` with `2 beta = tau2 - tau1`, so that
/// `eta(lambda2) = h^-1 eta(lambda1) h`.
pub fn sphere_h(sym: &SymData) -> Mat2 {
    let b = 0.5 * (sym.tau2 - sym.tau1);
    Mat2::diag(C64::from_polar(1.0, b), C64::from_polar(1.0, -b))
}

pub fn sphere_log_hol(sym: &SymData, quad_tol: f64) -> Result<HolonomyValue, ClosedFormError> {
    let eta = sphere_potential();
    Ok(hol_regularizing(Some(&eta), &sphere_gauges(), &sphere_h(sym), sym, quad_tol, &GaugeChecks::default())?)
}

/// Residue formula on the sphere potential with the gauges `[[1,0],[+-lambda,1]]`.
/// This is the energy of the double cover.
pub fn sphere_willmore_residue() -> Result<f64, ClosedFormError> {
    let res = sphere_residue();
    let gauges = [PositiveGauge::polynomial(res.clone(), lower_frame(1.0)), PositiveGauge::polynomial(-&res, lower_frame(-1.0))];
    Ok(willmore_residue(&gauges)?)
}

/// Invariants of the round sphere with Sym points `e^{i tau1}`, `e^{i tau2}`,
/// holonomy and volume taken through the regularizing-gauge pipeline.
pub fn sphere_case_angles(tau1: f64, tau2: f64, quad_tol: f64) -> Result<InvariantReport, ClosedFormError> {
    let dt = tau2 - tau1;
    if !(dt > 0.0 && dt < 2.0 * PI) {
        return Err(ClosedFormError::SphereAngle(dt));
    }
    let sym = SymData::from_angles(tau1, tau2)?;
    let hol = sphere_log_hol(&sym, quad_tol)?;
    let w = 4.0 * PI;
    let vol = volume_from_log_hol_cover(hol.reduced(), dt, w, 1, VolumeAnchor::Principal)?;
    Ok(InvariantReport {
        sym,
        willmore: w,
        log_hol: hol.reduced(),
        volume: vol.volume,
        provenance: format!("sphere potential, regularizing gauges at 0 and infinity; {}", vol.provenance()),
    })
}

/// Sphere with Sym points `e^{-+i alpha}`.
pub fn sphere_case(alpha: f64) -> Result<InvariantReport, ClosedFormError> {
    if !(alpha > 0.0 && alpha < PI) {
        return Err(ClosedFormError::SphereAngle(alpha));
    }
    sphere_case_angles(-alpha, alpha, 1e-13)
}

/// Volume of the spherical cap ball `4 pi int_0^{theta/2} sin^2 r dr` by quadrature.
pub fn cap_volume(theta: f64, quad_tol: f64) -> Result<f64, ClosedFormError> {
    let r = integrate(|r| re(r.sin().powi(2)), 0.0, theta / 2.0, QuadOptions::new(quad_tol))?;
    Ok(4.0 * PI * r.value.re)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorusCase {
    pub r: f64,
    pub s: f64,
}

impl TorusCase {
    pub fn new(r: f64, s: f64) -> Result<Self, ClosedFormError> {
        if !(r > 0.0 && s > 0.0) || (r * r + s * s - 1.0).abs() > 1e-14 {
            return Err(ClosedFormError::Torus { r, s });
        }
        Ok(TorusCase { r, s })
    }

    pub fn clifford() -> Self {
        let a = std::f64::consts::FRAC_1_SQRT_2;
        TorusCase { r: a, s: a }
    }

    /// `arg(r + i s)`, in `(0, pi/2)`.
    pub fn psi(&self) -> f64 {
        self.s.atan2(self.r)
    }

    /// `(r + i s)^2 / (r - i s)^2`.
    pub fn lambda2(&self) -> C64 {
        let z = c(self.r, self.s);
        (z * z) / (z.conj() * z.conj())
    }

    /// Lift of `arg lambda2` to `(0, 2 pi)`.
    pub fn tau2(&self) -> f64 {
        4.0 * self.psi()
    }

    pub fn mean_curvature(&self) -> f64 {
        (1.0 - 2.0 * self.s * self.s) / (2.0 * self.r * self.s)
    }

    pub fn willmore(&self) -> f64 {
        PI * PI / (self.r * self.s)
    }

    pub fn volume(&self) -> f64 {
        2.0 * PI * PI * self.s * self.s
    }

    /// `(pi / 4rs) log lambda2 - i pi`, with `log lambda2 = i tau2`.
    pub fn log_hol(&self) -> C64 {
        PI / (4.0 * self.r * self.s) * c(0.0, self.tau2()) - c(0.0, PI)
    }
}

/// `W = 2i int tr(Phi ^ Phi*)` by quadrature over the fundamental domain,
/// with `Phi` and `Phi*` the `(1,0)` and `(0,1)` parts of the connection.
pub fn torus_willmore_integral(t: TorusCase, quad_tol: f64) -> Result<f64, ClosedFormError> {
    let k = PI / (4.0 * t.r * t.s);
    let p = c(t.r, t.s);
    let density = |x: f64, y: f64| -> C64 {
        let e = C64::from_polar(1.0, 2.0 * PI * (x / t.r + y / t.s));
        let phi = Mat2::new(re(-1.0), I / e, I * e, re(1.0)).scale(k * p);
        let phis = Mat2::new(re(-1.0), -I / e, -I * e, re(1.0)).scale(k * p.conj());
        // dz ^ dzbar = -2i dx ^ dy
        2.0 * I * (phi * phis).trace() * c(0.0, -2.0)
    };
    let opts = QuadOptions::new(quad_tol);
    let inner = |x: f64| -> C64 {
        integrate(|y| density(x, y), 0.0, t.s, opts).map(|r| r.value).unwrap_or(c(f64::NAN, 0.0))
    };
    let w = integrate(inner, 0.0, t.r, opts)?.value;
    Ok(w.re)
}

/// Closed-form invariants of the homogeneous torus, Sym points `1` and `lambda2`.
pub fn torus_case(t: TorusCase) -> Result<InvariantReport, ClosedFormError> {
    let tau2 = t.tau2();
    let sym = SymData { lambda1: re(1.0), lambda2: t.lambda2(), tau1: 0.0, tau2, h: t.mean_curvature() };
    Ok(InvariantReport {
        sym,
        willmore: t.willmore(),
        log_hol: t.log_hol(),
        volume: t.volume(),
        provenance: "closed form".into(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorusRoundTrip {
    /// `|hol_from_invariants(W, 0, tau2, V) - log Hol|` mod `2 pi i`.
    pub hol_defect: f64,
    /// Volume recovered from `log Hol` and `W`.
    pub volume: f64,
    /// `|sin tau2 - 4rs(r^2 - s^2)|`.
    pub sine_defect: f64,
}

pub fn torus_round_trip(t: TorusCase) -> Result<TorusRoundTrip, ClosedFormError> {
    let tau2 = t.tau2();
    let from_inv = hol_from_invariants(t.willmore(), 0.0, tau2, t.volume());
    let hol_defect = crate::holonomy::dist_mod_2pi_i(from_inv, t.log_hol());
    let v = volume_from_log_hol_cover(t.log_hol(), tau2, t.willmore(), 1, VolumeAnchor::Principal)?;
    let sine_defect = (tau2.sin() - 4.0 * t.r * t.s * (t.r * t.r - t.s * t.s)).abs();
    Ok(TorusRoundTrip { hol_defect, volume: v.volume, sine_defect })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorusTransport {
    /// Area of the fundamental domain by quadrature, and `rs`.
    pub area: f64,
    pub area_expected: f64,
    /// Largest deviation of `tr(A ^ A')` assembled from the connection
    /// coefficients from `2 pi^2 i / (r^2 s^2 xi) dx ^ dy`, over arc samples.
    pub trace_form_deviation: f64,
    /// `log X(xi2)` by quadrature over the torus and the `xi`-arc.
    pub log_x: C64,
    /// `(pi / 4rs) log lambda2`.
    pub log_x_expected: C64,
    /// The cocycle value taken as closed form.
    pub theta_factor: C64,
    /// `log X(xi2) + log Theta`, comparable with the torus holonomy.
    pub log_hol: C64,
}

/// Diagonal coefficients `(a, b)` of `D^xi = d + diag(a,-a) dz + diag(b,-b) dzbar`,
/// and their `xi`-derivatives.
fn torus_connection(t: &TorusCase, xi: C64) -> [C64; 4] {
    let k = PI / (2.0 * t.r * t.s);
    let p = c(t.r, t.s);
    let a = k * p / xi;
    let b = -k * xi * p.conj();
    let da = -k * p / (xi * xi);
    let db = -k * p.conj();
    [a, b, da, db]
}

/// Parallel transport `X(xi2) = exp(-(i/4pi) int int tr(A ^ A') dxi)` by quadrature.
pub fn torus_transport_check(t: TorusCase, quad_tol: f64) -> Result<TorusTransport, ClosedFormError> {
    let opts = QuadOptions::new(quad_tol);
    // the integrand is constant over the rectangle; integrate it anyway
    let inner = |_x: f64| -> C64 {
        integrate(|_y| re(1.0), 0.0, t.s, opts).map(|r| r.value).unwrap_or(c(f64::NAN, 0.0))
    };
    let area = integrate(inner, 0.0, t.r, opts)?.value.re;
    let form = |xi: C64| -> C64 {
        let [a, b, da, db] = torus_connection(&t, xi);
        // tr of diag-valued wedge, dz ^ dzbar = -2i dx ^ dy
        2.0 * (a * db - b * da) * c(0.0, -2.0)
    };
    let psi = t.psi();
    let mut dev = 0.0f64;
    for m in 0..9 {
        let xi = C64::from_polar(1.0, 2.0 * psi * m as f64 / 8.0);
        let exact = c(0.0, 2.0 * PI * PI) / (t.r * t.r * t.s * t.s * xi);
        dev = dev.max((form(xi) - exact).norm());
    }
    let arc = integrate_arc(|xi| form(xi) * area, 0.0, 2.0 * psi, opts)?.value;
    let log_x = -I / (4.0 * PI) * arc;
    let log_x_expected = PI / (4.0 * t.r * t.s) * c(0.0, t.tau2());
    let theta_factor = re(-1.0);
    Ok(TorusTransport {
        area,
        area_expected: t.r * t.s,
        trace_form_deviation: dev,
        log_x,
        log_x_expected,
        theta_factor,
        log_hol: log_x + c(0.0, PI),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holonomy::dist_mod_2pi_i;

    #[test]
    fn sphere_holonomy_trivial() {
        for alpha in [0.3, 1.0, 2.5] {
            let rep = sphere_case(alpha).unwrap();
            assert!(rep.log_hol.norm() < 1e-9, "{}", rep.log_hol);
            assert!((rep.sym.h + 1.0 / alpha.tan()).abs() < 1e-12);
            assert!((rep.volume - PI * (2.0 * alpha - (2.0 * alpha).sin())).abs() < 1e-9);
        }
    }

    #[test]
    fn sphere_mean_curvature_sign() {
        for th in [0.5, 1.0, 2.0] {
            let rep = sphere_case_angles(0.0, th, 1e-13).unwrap();
            assert!(rep.log_hol.norm() < 1e-9);
            assert!((rep.volume - PI * (th - th.sin())).abs() < 1e-9);
            assert!((cap_volume(th, 1e-14).unwrap() - PI * (th - th.sin())).abs() < 1e-12);
        }
    }

    #[test]
    fn sphere_gauge_data() {
        let sym = SymData::symmetric(0.8).unwrap();
        let h = sphere_h(&sym);
        for (j, g) in sphere_gauges().iter().enumerate() {
            let (eig, tri, a) = crate::holonomy::check_gauge(g, j, &h, &sym, &GaugeChecks::default()).unwrap();
            assert!(eig < 1e-15 && tri < 1e-15);
            assert!((a - C64::from_polar(1.0, 0.8)).norm() < 1e-15);
        }
    }

    #[test]
    fn sphere_willmore_double_cover() {
        assert!((sphere_willmore_residue().unwrap() - 8.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn clifford_torus() {
        let t = TorusCase::clifford();
        let rep = torus_case(t).unwrap();
        assert!(rep.sym.h.abs() < 1e-15);
        assert!((rep.willmore - 2.0 * PI * PI).abs() < 1e-13);
        assert!((t.lambda2() + 1.0).norm() < 1e-15);
        assert!((rep.volume - PI * PI).abs() < 1e-13);
        assert!((torus_willmore_integral(t, 1e-13).unwrap() - rep.willmore).abs() < 1e-10);
    }

    #[test]
    fn torus_round_trip_general() {
        for (r, s) in [(0.8, 0.6), (0.6, 0.8), (0.28, 0.96)] {
            let t = TorusCase::new(r, s).unwrap();
            let rt = torus_round_trip(t).unwrap();
            assert!(rt.hol_defect < 1e-12);
            assert!(rt.sine_defect < 1e-14);
            assert!((rt.volume - 2.0 * PI * PI * s * s).abs() < 1e-10);
        }
        assert!(TorusCase::new(0.8, 0.7).is_err());
    }

    #[test]
    fn torus_transport() {
        let t = TorusCase::clifford();
        let tr = torus_transport_check(t, 1e-13).unwrap();
        assert!((tr.area - 0.5).abs() < 1e-14);
        assert!(tr.trace_form_deviation < 1e-12);
        assert!((tr.log_x - c(0.0, PI * PI / 2.0)).norm() < 1e-11);
        assert_eq!(tr.theta_factor, re(-1.0));
        let t = TorusCase::new(0.8, 0.6).unwrap();
        let tr = torus_transport_check(t, 1e-13).unwrap();
        assert!((tr.log_x - tr.log_x_expected).norm() < 1e-11);
        assert!(dist_mod_2pi_i(tr.log_hol, t.log_hol()) < 1e-11);
    }
}
