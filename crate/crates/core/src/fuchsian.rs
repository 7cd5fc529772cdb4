//! Fuchsian potentials `eta = s * sum_k A_k(lambda) dz / (z - p_k)` on the
//! punctured sphere, and the symmetric Lawson ansatz.

use std::f64::consts::FRAC_PI_2;

use crate::algebra::{c, re, MatrixLoop, Mat2, ScalarLoop, C64, I};
use crate::error::FuchsianError;

/// A simple pole of the potential.
#[derive(Clone, Debug, PartialEq)]
pub struct Pole {
    pub point: C64,
    pub residue: MatrixLoop,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FuchsianPotential {
    poles: Vec<Pole>,
    scale: f64,
}

impl FuchsianPotential {
    pub fn new(poles: Vec<Pole>, scale: f64) -> Result<Self, FuchsianError> {
        for i in 0..poles.len() {
            for j in i + 1..poles.len() {
                if (poles[i].point - poles[j].point).norm() < 1e-14 {
                    return Err(FuchsianError::CoincidentPunctures(i, j));
                }
            }
        }
        Ok(FuchsianPotential { poles, scale })
    }

    pub fn poles(&self) -> &[Pole] {
        &self.poles
    }

    pub fn punctures(&self) -> Vec<C64> {
        self.poles.iter().map(|p| p.point).collect()
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Unscaled residue loop `A_k`.
    pub fn residue(&self, k: usize) -> &MatrixLoop {
        &self.poles[k].residue
    }

    /// Sum of the unscaled residue loops; zero iff there is no pole at infinity.
    pub fn residue_sum(&self) -> MatrixLoop {
        self.poles.iter().fold(MatrixLoop::zero(), |acc, p| &acc + &p.residue)
    }

    /// Freeze the spectral parameter.
    pub fn at(&self, lambda: C64) -> Result<FrozenPotential, FuchsianError> {
        let mut residues = Vec::with_capacity(self.poles.len());
        for p in &self.poles {
            residues.push(p.residue.eval(lambda)?.scale(re(self.scale)));
        }
        Ok(FrozenPotential { points: self.punctures(), residues })
    }

    /// Coefficient of `dz` at `(z, lambda)`.
    pub fn eval(&self, z: C64, lambda: C64) -> Result<Mat2, FuchsianError> {
        if self.poles.iter().any(|p| p.point == z) {
            return Err(FuchsianError::Pole { z });
        }
        Ok(self.at(lambda)?.eval(z))
    }

    /// The potential with every residue conjugated by `g`.
    pub fn conjugated(&self, g: &Mat2) -> Result<Self, FuchsianError> {
        let gi = g.inverse()?;
        let poles = self
            .poles
            .iter()
            .map(|p| Pole { point: p.point, residue: p.residue.sandwich(g, &gi) })
            .collect();
        FuchsianPotential::new(poles, self.scale)
    }
}

/// A potential at fixed `lambda`, with scaled residues.
#[derive(Clone, Debug)]
pub struct FrozenPotential {
    pub points: Vec<C64>,
    pub residues: Vec<Mat2>,
}

impl FrozenPotential {
    #[inline]
    pub fn eval(&self, z: C64) -> Mat2 {
        let mut acc = Mat2::zero();
        for (p, r) in self.points.iter().zip(&self.residues) {
            acc += r.scale((z - *p).inv());
        }
        acc
    }
}

/// `x = (x1, x2, x3)` as scalar loops, with the angle `phi` fixing the punctures.
#[derive(Clone, Debug, PartialEq)]
pub struct LawsonAnsatz {
    pub phi: f64,
    pub x: [ScalarLoop; 3],
    pub s: f64,
}

/// Sign patterns of `x` under conjugation by `C_1 .. C_4`.
pub const ORBIT_SIGNS: [[f64; 3]; 4] = [[1.0, 1.0, 1.0], [-1.0, -1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0]];

pub fn symmetry_matrix(m: usize) -> Mat2 {
    let z = C64::default();
    let one = re(1.0);
    match m {
        1 => Mat2::identity(),
        2 => Mat2::new(z, -one, one, z),
        3 => Mat2::diag(I, -I),
        4 => Mat2::new(z, I, I, z),
        _ => panic!("symmetry index {m} not in 1..=4"),
    }
}

pub fn lawson_punctures(phi: f64) -> [C64; 4] {
    let e = C64::from_polar(1.0, phi);
    [e, -e.conj(), -e, e.conj()]
}

impl LawsonAnsatz {
    pub fn new(phi: f64, x: [ScalarLoop; 3], s: f64) -> Result<Self, FuchsianError> {
        if !(phi > 0.0 && phi < FRAC_PI_2) {
            return Err(FuchsianError::AngleOutOfRange(phi));
        }
        Ok(LawsonAnsatz { phi, x, s })
    }

    /// Required `lambda^-1` coefficients of `(x1, x2, x3)`.
    pub fn residue_target(phi: f64) -> [C64; 3] {
        [c(0.0, 0.5), re(-0.5 * phi.sin()), re(-0.5 * phi.cos())]
    }

    /// Index into [`ORBIT_SIGNS`] of the residue pattern, if the constraint
    /// holds to `tol` for some orbit member.
    pub fn residue_orbit(&self, tol: f64) -> Result<usize, FuchsianError> {
        let target = Self::residue_target(self.phi);
        let mut best = (0, 0, f64::INFINITY);
        for (m, signs) in ORBIT_SIGNS.iter().enumerate() {
            let mut worst = (0, 0.0f64);
            for j in 0..3 {
                let dev = (self.x[j].coeff(-1) - target[j] * signs[j]).norm();
                if dev > worst.1 {
                    worst = (j + 1, dev);
                }
            }
            if worst.1 < best.2 {
                best = (m, worst.0, worst.1);
            }
        }
        let lowest_ok = self.x.iter().all(|l| l.is_zero() || l.min_degree() >= -1);
        if best.2 <= tol && lowest_ok {
            Ok(best.0)
        } else {
            Err(FuchsianError::ResidueConstraint { component: best.1.max(1), deviation: best.2 })
        }
    }

    pub fn eval_x(&self, lambda: C64) -> Result<[C64; 3], FuchsianError> {
        Ok([self.x[0].eval(lambda)?, self.x[1].eval(lambda)?, self.x[2].eval(lambda)?])
    }

    /// The ansatz conjugated by `C_m`, i.e. `x` with the orbit sign pattern applied.
    pub fn conjugated(&self, m: usize) -> LawsonAnsatz {
        let signs = ORBIT_SIGNS[m - 1];
        let x = [0, 1, 2].map(|j| self.x[j].scale(re(signs[j])));
        LawsonAnsatz { phi: self.phi, x, s: self.s }
    }

    /// Residue loops `A_1 .. A_4`.
    pub fn residue_loops(&self) -> [MatrixLoop; 4] {
        let [x1, x2, x3] = &self.x;
        let ix3 = x3.scale(I);
        let p = x2 + &ix3;
        let m = x2 - &ix3;
        let a1 = MatrixLoop::from_entries(x1, &p, &m, &-x1);
        let a2 = MatrixLoop::from_entries(&-x1, &-&m, &-&p, x1);
        let a3 = MatrixLoop::from_entries(x1, &-&p, &-&m, &-x1);
        let a4 = MatrixLoop::from_entries(&-x1, &m, &p, x1);
        [a1, a2, a3, a4]
    }
}

/// Quadric defect `x1^2 + x2^2 + x3^2 - 1`.
pub fn quadric_residual(ansatz: &LawsonAnsatz, lambda: C64) -> Result<C64, FuchsianError> {
    let x = ansatz.eval_x(lambda)?;
    Ok(x[0] * x[0] + x[1] * x[1] + x[2] * x[2] - 1.0)
}

fn lawson_potential(ansatz: &LawsonAnsatz, scale: f64) -> Result<FuchsianPotential, FuchsianError> {
    ansatz.residue_orbit(1e-12)?;
    let points = lawson_punctures(ansatz.phi);
    let poles = ansatz
        .residue_loops()
        .into_iter()
        .zip(points)
        .map(|(residue, point)| Pole { point, residue })
        .collect();
    FuchsianPotential::new(poles, scale)
}

/// Rescaled Lawson potential `s * sum A_k dz/(z - p_k)`.
pub fn build_lawson_potential(ansatz: &LawsonAnsatz) -> Result<FuchsianPotential, FuchsianError> {
    lawson_potential(ansatz, ansatz.s)
}

/// The raw form `t * sum A_k dz/(z - p_k)`, where the residues are not
/// normalised to determinant -1.
pub fn build_lawson_potential_raw(ansatz: &LawsonAnsatz, t: f64) -> Result<FuchsianPotential, FuchsianError> {
    lawson_potential(ansatz, t)
}

/// The four conjugates `C_m eta C_m^-1`, `m = 1..4`.
pub fn symmetry_orbit(ansatz: &LawsonAnsatz) -> Result<Vec<FuchsianPotential>, FuchsianError> {
    let eta = build_lawson_potential(ansatz)?;
    (1..=4).map(|m| eta.conjugated(&symmetry_matrix(m))).collect()
}

pub fn eval_potential(eta: &FuchsianPotential, z: C64, lambda: C64) -> Result<Mat2, FuchsianError> {
    eta.eval(z, lambda)
}
