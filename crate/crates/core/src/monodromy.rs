//! Parallel transport of `dPhi = Phi eta` along paths in the punctured plane
//! and monodromy around each puncture.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::algebra::{re, Mat2, C64, I};
use crate::error::MonodromyError;
use crate::fuchsian::{FrozenPotential, FuchsianPotential};
use crate::ode::{integrate_right, OdeFailure};

pub const DEFAULT_ODE_TOL: f64 = 1e-10;
const MAX_STEPS: usize = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Segment {
    Line { from: C64, to: C64 },
    /// Circle arc `center + radius e^{i(start + sweep u)}`, `u in [0,1]`.
    Arc { center: C64, radius: f64, start: f64, sweep: f64 },
}

impl Segment {
    pub fn point(&self, u: f64) -> C64 {
        match *self {
            Segment::Line { from, to } => from + (to - from) * u,
            Segment::Arc { center, radius, start, sweep } => center + C64::from_polar(radius, start + sweep * u),
        }
    }

    /// `dz/du`.
    pub fn tangent(&self, u: f64) -> C64 {
        match *self {
            Segment::Line { from, to } => to - from,
            Segment::Arc { radius, start, sweep, .. } => I * sweep * C64::from_polar(radius, start + sweep * u),
        }
    }

    pub fn length(&self) -> f64 {
        match *self {
            Segment::Line { from, to } => (to - from).norm(),
            Segment::Arc { radius, sweep, .. } => radius * sweep.abs(),
        }
    }

    pub fn start(&self) -> C64 {
        self.point(0.0)
    }

    pub fn end(&self) -> C64 {
        self.point(1.0)
    }

    pub fn distance_to(&self, p: C64) -> f64 {
        match *self {
            Segment::Line { from, to } => {
                let d = to - from;
                let len2 = d.norm_sqr();
                let u = if len2 == 0.0 { 0.0 } else { (((p - from) * d.conj()).re / len2).clamp(0.0, 1.0) };
                (from + d * u - p).norm()
            }
            Segment::Arc { center, radius, start, sweep } => {
                let v = p - center;
                let on_arc = if v.norm() == 0.0 || sweep.abs() >= 2.0 * PI {
                    true
                } else {
                    let rel = (v.arg() - start) * sweep.signum();
                    rel.rem_euclid(2.0 * PI) <= sweep.abs()
                };
                let ends = (self.start() - p).norm().min((self.end() - p).norm());
                if on_arc {
                    (v.norm() - radius).abs().min(ends)
                } else {
                    ends
                }
            }
        }
    }
}

/// Piecewise path with a declared clearance from the punctures.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanePath {
    pub segments: Vec<Segment>,
    pub clearance: f64,
}

impl PlanePath {
    pub fn new(segments: Vec<Segment>, clearance: f64) -> Self {
        PlanePath { segments, clearance }
    }

    pub fn start(&self) -> C64 {
        self.segments.first().map(|s| s.start()).unwrap_or_default()
    }

    pub fn end(&self) -> C64 {
        self.segments.last().map(|s| s.end()).unwrap_or_default()
    }

    pub fn length(&self) -> f64 {
        self.segments.iter().map(|s| s.length()).sum()
    }

    /// Distance to the nearest of `points`, with its index.
    pub fn min_distance(&self, points: &[C64]) -> (f64, usize) {
        let mut best = (f64::INFINITY, 0);
        for (k, p) in points.iter().enumerate() {
            for s in &self.segments {
                let d = s.distance_to(*p);
                if d < best.0 {
                    best = (d, k);
                }
            }
        }
        best
    }

    pub fn validate(&self, points: &[C64]) -> Result<(), MonodromyError> {
        let (d, k) = self.min_distance(points);
        if !(self.clearance > 0.0) || d < self.clearance {
            return Err(MonodromyError::Clearance { puncture: k, distance: d, clearance: self.clearance });
        }
        Ok(())
    }
}

fn transport_frozen(eta: &FrozenPotential, path: &PlanePath, tol: f64) -> Result<Mat2, MonodromyError> {
    let mut y = Mat2::identity();
    for seg in &path.segments {
        let len = seg.length();
        if len == 0.0 {
            continue;
        }
        let f = |u: f64| eta.eval(seg.point(u)).scale(seg.tangent(u));
        let (y1, _) = integrate_right(f, y, 1.0, tol, MAX_STEPS).map_err(|e| match e {
            OdeFailure::Underflow { s, h } => MonodromyError::StepUnderflow { z: seg.point(s), h: h * len },
            OdeFailure::NonFinite { s } => MonodromyError::NonFinite { z: seg.point(s) },
            OdeFailure::TooManySteps(n) => MonodromyError::TooManySteps(n),
        })?;
        y = y1;
    }
    Ok(y)
}

/// `Phi(end)` for the solution of `dPhi = Phi eta` with `Phi(start) = Id`.
pub fn transport(eta: &FuchsianPotential, path: &PlanePath, lambda: C64, tol: f64) -> Result<Mat2, MonodromyError> {
    path.validate(&eta.punctures())?;
    transport_frozen(&eta.at(lambda)?, path, tol)
}

/// Loop from `base` around `points[k]`: straight connector, a positively
/// oriented circle of radius half the distance to the nearest other point or
/// the base, and the connector back.
pub fn loop_path(points: &[C64], base: C64, k: usize, radius_factor: f64) -> Result<PlanePath, MonodromyError> {
    let p = *points.get(k).ok_or(MonodromyError::BadIndex(k))?;
    let mut dmin = (base - p).norm();
    for (j, q) in points.iter().enumerate() {
        if j != k {
            dmin = dmin.min((q - p).norm());
        }
    }
    let rho = 0.5 * dmin * radius_factor;
    let dir = (base - p) / (base - p).norm();
    let q = p + dir * rho;
    let path = PlanePath::new(
        vec![
            Segment::Line { from: base, to: q },
            Segment::Arc { center: p, radius: rho, start: dir.arg(), sweep: 2.0 * PI },
            Segment::Line { from: q, to: base },
        ],
        0.5 * rho,
    );
    path.validate(points)?;
    Ok(path)
}

pub fn monodromy_around(eta: &FuchsianPotential, k: usize, lambda: C64, tol: f64) -> Result<Mat2, MonodromyError> {
    let path = loop_path(&eta.punctures(), C64::default(), k, 1.0)?;
    transport_frozen(&eta.at(lambda)?, &path, tol)
}

/// How loop monodromies compose. Transport starts at `Id` and reads the end
/// value, so the loop "first a, then b" has monodromy `M_a M_b`. With the
/// punctures in counterclockwise order around the base, `M_1 M_2 ... M_n`
/// is the monodromy of a large circle, hence `Id` when there is no pole at
/// infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convention {
    TraversalOrder,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonodromyRep {
    pub base: C64,
    pub lambda: C64,
    pub matrices: Vec<Mat2>,
    /// Puncture indices sorted counterclockwise around the base.
    pub order: Vec<usize>,
    pub convention: Convention,
    pub tol: f64,
}

impl MonodromyRep {
    pub fn ordered_product(&self) -> Mat2 {
        self.order.iter().fold(Mat2::identity(), |acc, &k| acc * self.matrices[k])
    }
}

/// Monodromies around every puncture at one `lambda`, base point `z = 0`.
pub fn monodromy_rep(eta: &FuchsianPotential, lambda: C64, tol: f64) -> Result<MonodromyRep, MonodromyError> {
    let frozen = eta.at(lambda)?;
    let points = eta.punctures();
    let base = C64::default();
    let matrices = (0..points.len())
        .map(|k| {
            let path = loop_path(&points, base, k, 1.0)?;
            transport_frozen(&frozen, &path, tol)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        let ta = (points[a] - base).arg().rem_euclid(2.0 * PI);
        let tb = (points[b] - base).arg().rem_euclid(2.0 * PI);
        ta.total_cmp(&tb)
    });
    Ok(MonodromyRep { base, lambda, matrices, order, convention: Convention::TraversalOrder, tol })
}

/// Monodromy representations at several `lambda` in parallel.
pub fn monodromy_reps(eta: &FuchsianPotential, lambdas: &[C64], tol: f64) -> Result<Vec<MonodromyRep>, MonodromyError> {
    lambdas.par_iter().map(|l| monodromy_rep(eta, *l, tol)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonodromyDiagnostics {
    pub det_defect: Vec<f64>,
    pub trace_defect: Vec<f64>,
    pub im_tr12: f64,
    pub im_tr23: f64,
    pub im_tr13: f64,
    pub off_diagonal: Vec<f64>,
    pub product_defect: f64,
    /// Names the proxy used for unitarizability.
    pub unitarity_test: &'static str,
}

pub const UNITARITY_PROXY: &str = "trace reality Im tr(Mj Mk) = 0 (surrogate, not a proof of unitarizability)";

pub fn monodromy_diagnostics(rep: &MonodromyRep, s: f64) -> MonodromyDiagnostics {
    let m = &rep.matrices;
    let target = re(2.0 * (2.0 * PI * s).cos());
    let im_tr = |a: usize, b: usize| if m.len() > a.max(b) { (m[a] * m[b]).trace().im } else { 0.0 };
    MonodromyDiagnostics {
        det_defect: m.iter().map(|x| (x.det() - 1.0).norm()).collect(),
        trace_defect: m.iter().map(|x| (x.trace() - target).norm()).collect(),
        im_tr12: im_tr(0, 1),
        im_tr23: im_tr(1, 2),
        im_tr13: im_tr(0, 2),
        off_diagonal: m.iter().map(|x| x.off_diagonal_norm()).collect(),
        product_defect: rep.ordered_product().dist(&Mat2::identity()),
        unitarity_test: UNITARITY_PROXY,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{c, mat2_exp, MatrixLoop};
    use crate::fuchsian::{build_lawson_potential, Pole};
    use crate::lawson::central_ansatz;

    fn single_pole(res: Mat2) -> FuchsianPotential {
        FuchsianPotential::new(vec![Pole { point: C64::default(), residue: MatrixLoop::constant(res) }], 1.0).unwrap()
    }

    fn unit_circle() -> PlanePath {
        PlanePath::new(vec![Segment::Arc { center: C64::default(), radius: 1.0, start: 0.0, sweep: 2.0 * PI }], 0.5)
    }

    #[test]
    fn abelian_oracle() {
        let a = c(0.23, -0.05);
        let eta = single_pole(Mat2::diag(a, -a));
        let m = transport(&eta, &unit_circle(), re(1.0), 1e-12).unwrap();
        let exact = Mat2::diag((2.0 * PI * I * a).exp(), (-2.0 * PI * I * a).exp());
        assert!(m.dist(&exact) < 1e-10);
    }

    #[test]
    fn nilpotent_oracle() {
        let eta = single_pole(Mat2::from_real(0.0, 1.0, 0.0, 0.0));
        let m = transport(&eta, &unit_circle(), re(1.0), 1e-12).unwrap();
        assert!(m.dist(&Mat2::new(re(1.0), 2.0 * PI * I, re(0.0), re(1.0))) < 1e-10);
    }

    #[test]
    fn sphere_potential_trivial_monodromy() {
        let res = MatrixLoop::from_terms(&[(-1, Mat2::from_real(0.0, 1.0, 0.0, 0.0)), (1, Mat2::from_real(0.0, 0.0, 1.0, 0.0))]);
        let eta = FuchsianPotential::new(vec![Pole { point: C64::default(), residue: res }], 1.0).unwrap();
        let lam = C64::from_polar(1.0, 0.4);
        let m = transport(&eta, &unit_circle(), lam, 1e-12).unwrap();
        let oracle = mat2_exp(&eta.residue(0).eval(lam).unwrap().scale(2.0 * PI * I));
        assert!(oracle.dist(&Mat2::identity()) < 1e-12);
        assert!(m.dist(&Mat2::identity()) < 1e-9);
    }

    #[test]
    fn clearance_violation() {
        let eta = single_pole(Mat2::identity());
        let bad = PlanePath::new(vec![Segment::Line { from: re(-1.0), to: re(1.0) }], 0.1);
        assert!(matches!(transport(&eta, &bad, re(1.0), 1e-10), Err(MonodromyError::Clearance { .. })));
    }

    #[test]
    fn lawson_central_diagonal_at_i() {
        let an = central_ansatz(PI / 4.0, 0.05);
        let eta = build_lawson_potential(&an).unwrap();
        let rep = monodromy_rep(&eta, I, 1e-11).unwrap();
        let d = monodromy_diagnostics(&rep, 0.05);
        for k in 0..4 {
            assert!(d.off_diagonal[k] < 1e-9, "{:?}", d.off_diagonal);
            assert!(d.det_defect[k] < 1e-9);
        }
        assert!(d.product_defect < 1e-8, "{}", d.product_defect);
    }

    #[test]
    fn lawson_local_eigenvalues() {
        let s = 0.02;
        let an = central_ansatz(0.6, s);
        let eta = build_lawson_potential(&an).unwrap();
        for tau in [0.3, 1.9, 4.0] {
            let m = monodromy_around(&eta, 0, C64::from_polar(1.0, tau), 1e-12).unwrap();
            assert!((m.trace() - 2.0 * (2.0 * PI * s).cos()).norm() < 1e-8);
        }
    }

    #[test]
    fn homotopy_invariance_radius() {
        let an = central_ansatz(PI / 3.0, 0.05);
        let eta = build_lawson_potential(&an).unwrap();
        let lam = C64::from_polar(1.0, 0.8);
        let frozen = eta.at(lam).unwrap();
        let pts = eta.punctures();
        for k in 0..4 {
            let a = transport_frozen(&frozen, &loop_path(&pts, C64::default(), k, 1.0).unwrap(), 1e-12).unwrap();
            let b = transport_frozen(&frozen, &loop_path(&pts, C64::default(), k, 0.5).unwrap(), 1e-12).unwrap();
            assert!(a.dist(&b) < 1e-8);
        }
    }
}
