//! Complex 2x2 matrices and Laurent polynomial loops in the spectral parameter.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::AlgebraError;

pub type C64 = Complex64;

pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// A 2x2 complex matrix `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Mat2 {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl Mat2 {
    pub const fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn from_real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2::new(re(a), re(b), re(c), re(d))
    }

    pub fn identity() -> Self {
        Mat2::from_real(1.0, 0.0, 0.0, 1.0)
    }

    pub fn zero() -> Self {
        Mat2::default()
    }

    pub fn diag(x: C64, y: C64) -> Self {
        Mat2::new(x, C64::default(), C64::default(), y)
    }

    pub fn det(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> C64 {
        self.a + self.d
    }

    /// Classical adjugate, `adj(A) A = det(A) Id`.
    pub fn adjugate(&self) -> Self {
        Mat2::new(self.d, -self.b, -self.c, self.a)
    }

    pub fn inverse(&self) -> Result<Self, AlgebraError> {
        let det = self.det();
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        if det.norm() <= 1e-300 || det.norm() / (scale * scale) < 1e-15 {
            return Err(AlgebraError::Singular);
        }
        Ok(self.adjugate().scale(det.inv()))
    }

    pub fn scale(&self, k: C64) -> Self {
        Mat2::new(self.a * k, self.b * k, self.c * k, self.d * k)
    }

    pub fn transpose(&self) -> Self {
        Mat2::new(self.a, self.c, self.b, self.d)
    }

    pub fn conj_transpose(&self) -> Self {
        Mat2::new(self.a.conj(), self.c.conj(), self.b.conj(), self.d.conj())
    }

    /// `g * self * g^{-1}`.
    pub fn conjugate_by(&self, g: &Mat2) -> Result<Self, AlgebraError> {
        Ok(*g * *self * g.inverse()?)
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        match (i, j) {
            (0, 0) => self.a,
            (0, 1) => self.b,
            (1, 0) => self.c,
            (1, 1) => self.d,
            _ => panic!("Mat2 index ({i}, {j}) out of range"),
        }
    }

    pub fn entries(&self) -> [C64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn max_abs(&self) -> f64 {
        self.entries().iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn frobenius(&self) -> f64 {
        self.entries().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn off_diagonal_norm(&self) -> f64 {
        (self.b.norm_sqr() + self.c.norm_sqr()).sqrt()
    }

    pub fn dist(&self, other: &Mat2) -> f64 {
        (*self - *other).max_abs()
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// True when `|det - 1| <= tol`.
    pub fn is_sl2(&self, tol: f64) -> bool {
        (self.det() - 1.0).norm() <= tol
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }
}

impl AddAssign for Mat2 {
    fn add_assign(&mut self, o: Mat2) {
        *self = *self + o;
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        Mat2::new(-self.a, -self.b, -self.c, -self.d)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

impl Mul<C64> for Mat2 {
    type Output = Mat2;
    fn mul(self, k: C64) -> Mat2 {
        self.scale(k)
    }
}

impl Mul<Mat2> for C64 {
    type Output = Mat2;
    fn mul(self, m: Mat2) -> Mat2 {
        m.scale(self)
    }
}

/// Matrix exponential.
///
/// Splits `A = (tr A / 2) Id + A0` with `A0` traceless, so `A0^2 = mu Id` with
/// `mu = -det A0`, and uses `cosh(sqrt mu) Id + sinh(sqrt mu)/sqrt(mu) A0`.
pub fn mat2_exp(a: &Mat2) -> Mat2 {
    let half_tr = a.trace() * 0.5;
    let a0 = *a - Mat2::diag(half_tr, half_tr);
    let mu = -a0.det();
    let (ch, sh_over) = if mu.norm() < 1e-8 {
        // Taylor tails of cosh(x) and sinh(x)/x in x^2 = mu
        (
            1.0 + mu / 2.0 + mu * mu / 24.0 + mu * mu * mu / 720.0,
            1.0 + mu / 6.0 + mu * mu / 120.0 + mu * mu * mu / 5040.0,
        )
    } else {
        let r = mu.sqrt();
        (r.cosh(), r.sinh() / r)
    };
    let scalar = half_tr.exp();
    (Mat2::diag(ch, ch) + a0.scale(sh_over)).scale(scalar)
}

/// Both roots of `x^2 - tr(A) x + det(A)`.
pub fn eig2(a: &Mat2) -> (C64, C64) {
    quadratic_roots(a.trace(), a.det())
}

/// Roots of `x^2 - sum x + prod`, computed without cancellation.
pub fn quadratic_roots(sum: C64, prod: C64) -> (C64, C64) {
    let half = sum * 0.5;
    let mut disc = (half * half - prod).sqrt();
    if (half.conj() * disc).re < 0.0 {
        disc = -disc;
    }
    let r1 = half + disc;
    if r1.norm() == 0.0 {
        return (r1, C64::default());
    }
    let r2 = prod / r1;
    (r1, r2)
}

/// Coefficient ring of a [`LaurentLoop`].
pub trait Coeff: Copy + Add<Output = Self> + Sub<Output = Self> + Neg<Output = Self> {
    fn zero() -> Self;
    fn is_exact_zero(&self) -> bool;
    fn scale(&self, k: C64) -> Self;
    fn magnitude(&self) -> f64;
}

impl Coeff for C64 {
    fn zero() -> Self {
        C64::default()
    }
    fn is_exact_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn scale(&self, k: C64) -> Self {
        *self * k
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl Coeff for Mat2 {
    fn zero() -> Self {
        Mat2::zero()
    }
    fn is_exact_zero(&self) -> bool {
        self.entries().iter().all(|z| z.is_exact_zero())
    }
    fn scale(&self, k: C64) -> Self {
        Mat2::scale(self, k)
    }
    fn magnitude(&self) -> f64 {
        self.max_abs()
    }
}

/// Finite Laurent series `sum_{k=d_min}^{d_max} c_k lambda^k`.
///
/// Degree bounds are kept tight: the stored first and last coefficients are
/// nonzero unless the loop is zero, in which case `coeffs` is empty.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentLoop<T> {
    min_degree: i32,
    coeffs: Vec<T>,
}

pub type ScalarLoop = LaurentLoop<C64>;
pub type MatrixLoop = LaurentLoop<Mat2>;

impl<T: Coeff> LaurentLoop<T> {
    pub fn new(min_degree: i32, coeffs: Vec<T>) -> Self {
        let mut lo = 0;
        while lo < coeffs.len() && coeffs[lo].is_exact_zero() {
            lo += 1;
        }
        if lo == coeffs.len() {
            return Self::zero();
        }
        let mut hi = coeffs.len();
        while coeffs[hi - 1].is_exact_zero() {
            hi -= 1;
        }
        LaurentLoop { min_degree: min_degree + lo as i32, coeffs: coeffs[lo..hi].to_vec() }
    }

    pub fn zero() -> Self {
        LaurentLoop { min_degree: 0, coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Self::new(0, vec![c])
    }

    pub fn monomial(degree: i32, c: T) -> Self {
        Self::new(degree, vec![c])
    }

    /// Build from `(degree, coefficient)` pairs; repeated degrees accumulate.
    pub fn from_terms(terms: &[(i32, T)]) -> Self {
        if terms.is_empty() {
            return Self::zero();
        }
        let lo = terms.iter().map(|t| t.0).min().unwrap();
        let hi = terms.iter().map(|t| t.0).max().unwrap();
        let mut coeffs = vec![T::zero(); (hi - lo + 1) as usize];
        for &(k, v) in terms {
            let slot = &mut coeffs[(k - lo) as usize];
            *slot = *slot + v;
        }
        Self::new(lo, coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest degree with a nonzero coefficient (0 for the zero loop).
    pub fn min_degree(&self) -> i32 {
        self.min_degree
    }

    /// Highest degree with a nonzero coefficient (-1 below `min_degree` for the zero loop).
    pub fn max_degree(&self) -> i32 {
        self.min_degree + self.coeffs.len() as i32 - 1
    }

    pub fn coeff(&self, k: i32) -> T {
        let idx = k - self.min_degree;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            T::zero()
        } else {
            self.coeffs[idx as usize]
        }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// `(degree, coefficient)` pairs over the stored range.
    pub fn terms(&self) -> impl Iterator<Item = (i32, T)> + '_ {
        self.coeffs.iter().enumerate().map(move |(i, c)| (self.min_degree + i as i32, *c))
    }

    pub fn eval(&self, lambda: C64) -> Result<T, AlgebraError> {
        if self.is_zero() {
            return Ok(T::zero());
        }
        if lambda.norm() == 0.0 {
            if self.min_degree < 0 {
                return Err(AlgebraError::PoleAtZero { min_degree: self.min_degree });
            }
            return Ok(self.coeff(0));
        }
        // Horner in lambda over the stored block, then shift by lambda^min_degree
        let mut acc = T::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.scale(lambda) + *c;
        }
        Ok(acc.scale(lambda.powi(self.min_degree)))
    }

    pub fn deriv(&self) -> Self {
        let terms: Vec<(i32, T)> = self
            .terms()
            .filter(|(k, _)| *k != 0)
            .map(|(k, c)| (k - 1, c.scale(C64::new(k as f64, 0.0))))
            .collect();
        Self::from_terms(&terms)
    }

    pub fn scale(&self, k: C64) -> Self {
        Self::new(self.min_degree, self.coeffs.iter().map(|c| c.scale(k)).collect())
    }

    /// Multiply by `lambda^shift`.
    pub fn shift(&self, shift: i32) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        LaurentLoop { min_degree: self.min_degree + shift, coeffs: self.coeffs.clone() }
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(T) -> U) -> LaurentLoop<U> {
        LaurentLoop::new(self.min_degree, self.coeffs.iter().map(|c| f(*c)).collect())
    }

    pub fn max_coeff_magnitude(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.magnitude()))
    }

    /// Drop coefficients with magnitude at most `tol` and re-tighten the bounds.
    pub fn chop(&self, tol: f64) -> Self {
        Self::new(
            self.min_degree,
            self.coeffs.iter().map(|c| if c.magnitude() <= tol { T::zero() } else { *c }).collect(),
        )
    }
}

impl<T: Coeff> Add for &LaurentLoop<T> {
    type Output = LaurentLoop<T>;
    fn add(self, o: &LaurentLoop<T>) -> LaurentLoop<T> {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let lo = self.min_degree.min(o.min_degree);
        let hi = self.max_degree().max(o.max_degree());
        let coeffs = (lo..=hi).map(|k| self.coeff(k) + o.coeff(k)).collect();
        LaurentLoop::new(lo, coeffs)
    }
}

impl<T: Coeff> Sub for &LaurentLoop<T> {
    type Output = LaurentLoop<T>;
    fn sub(self, o: &LaurentLoop<T>) -> LaurentLoop<T> {
        self + &(-o)
    }
}

impl<T: Coeff> Neg for &LaurentLoop<T> {
    type Output = LaurentLoop<T>;
    fn neg(self) -> LaurentLoop<T> {
        LaurentLoop { min_degree: self.min_degree, coeffs: self.coeffs.iter().map(|c| -*c).collect() }
    }
}

impl<T: Coeff> Add for LaurentLoop<T> {
    type Output = LaurentLoop<T>;
    fn add(self, o: LaurentLoop<T>) -> LaurentLoop<T> {
        &self + &o
    }
}

impl<T: Coeff> Sub for LaurentLoop<T> {
    type Output = LaurentLoop<T>;
    fn sub(self, o: LaurentLoop<T>) -> LaurentLoop<T> {
        &self - &o
    }
}

impl<T: Coeff> Neg for LaurentLoop<T> {
    type Output = LaurentLoop<T>;
    fn neg(self) -> LaurentLoop<T> {
        -&self
    }
}

fn cauchy<A, B, O>(x: &LaurentLoop<A>, y: &LaurentLoop<B>) -> LaurentLoop<O>
where
    A: Coeff + Mul<B, Output = O>,
    B: Coeff,
    O: Coeff,
{
    if x.is_zero() || y.is_zero() {
        return LaurentLoop::zero();
    }
    let mut out = vec![O::zero(); x.coeffs.len() + y.coeffs.len() - 1];
    for (i, a) in x.coeffs.iter().enumerate() {
        for (j, b) in y.coeffs.iter().enumerate() {
            out[i + j] = out[i + j] + *a * *b;
        }
    }
    LaurentLoop::new(x.min_degree + y.min_degree, out)
}

impl Mul for &ScalarLoop {
    type Output = ScalarLoop;
    fn mul(self, o: &ScalarLoop) -> ScalarLoop {
        cauchy(self, o)
    }
}

impl Mul for &MatrixLoop {
    type Output = MatrixLoop;
    fn mul(self, o: &MatrixLoop) -> MatrixLoop {
        cauchy(self, o)
    }
}

impl Mul<&MatrixLoop> for &ScalarLoop {
    type Output = MatrixLoop;
    fn mul(self, o: &MatrixLoop) -> MatrixLoop {
        cauchy(self, o)
    }
}

impl Mul for ScalarLoop {
    type Output = ScalarLoop;
    fn mul(self, o: ScalarLoop) -> ScalarLoop {
        &self * &o
    }
}

impl Mul for MatrixLoop {
    type Output = MatrixLoop;
    fn mul(self, o: MatrixLoop) -> MatrixLoop {
        &self * &o
    }
}

/// Evaluate a loop. Thin wrapper over [`LaurentLoop::eval`].
pub fn loop_eval<T: Coeff>(l: &LaurentLoop<T>, lambda: C64) -> Result<T, AlgebraError> {
    l.eval(lambda)
}

pub fn loop_deriv<T: Coeff>(l: &LaurentLoop<T>) -> LaurentLoop<T> {
    l.deriv()
}

pub fn loop_mul(x: &MatrixLoop, y: &MatrixLoop) -> MatrixLoop {
    x * y
}

impl MatrixLoop {
    pub fn from_entries(a: &ScalarLoop, b: &ScalarLoop, cc: &ScalarLoop, d: &ScalarLoop) -> Self {
        let all = [a, b, cc, d];
        let nonzero: Vec<&&ScalarLoop> = all.iter().filter(|l| !l.is_zero()).collect();
        if nonzero.is_empty() {
            return MatrixLoop::zero();
        }
        let lo = nonzero.iter().map(|l| l.min_degree()).min().unwrap();
        let hi = nonzero.iter().map(|l| l.max_degree()).max().unwrap();
        let coeffs = (lo..=hi)
            .map(|k| Mat2::new(a.coeff(k), b.coeff(k), cc.coeff(k), d.coeff(k)))
            .collect();
        MatrixLoop::new(lo, coeffs)
    }

    pub fn entry(&self, i: usize, j: usize) -> ScalarLoop {
        self.map(|m| m.entry(i, j))
    }

    pub fn det(&self) -> ScalarLoop {
        &self.entry(0, 0) * &self.entry(1, 1) - &self.entry(0, 1) * &self.entry(1, 0)
    }

    pub fn trace(&self) -> ScalarLoop {
        &self.entry(0, 0) + &self.entry(1, 1)
    }

    pub fn adjugate(&self) -> Self {
        self.map(|m| m.adjugate())
    }

    /// Left and right multiplication by constant matrices, `g * self * h`.
    pub fn sandwich(&self, g: &Mat2, h: &Mat2) -> Self {
        self.map(|m| *g * m * *h)
    }

    pub fn is_traceless(&self) -> bool {
        self.coeffs.iter().all(|m| m.trace().is_exact_zero())
    }
}

impl ScalarLoop {
    /// Scalar loop from real-coefficient `(degree, value)` pairs.
    pub fn real_terms(terms: &[(i32, f64)]) -> Self {
        let t: Vec<(i32, C64)> = terms.iter().map(|&(k, v)| (k, re(v))).collect();
        Self::from_terms(&t)
    }

    /// Taylor coefficients at `lambda = 0` of `self / den`, orders `0..n`.
    ///
    /// Requires the quotient to be holomorphic at zero, i.e. the order of
    /// vanishing of `self` at zero is at least that of `den`.
    pub fn taylor_div(&self, den: &ScalarLoop, n: usize) -> Result<Vec<C64>, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(vec![C64::default(); n]);
        }
        let shift = den.min_degree();
        if self.min_degree() < shift {
            return Err(AlgebraError::NotHolomorphicAtZero {
                numerator_order: self.min_degree(),
                denominator_order: shift,
            });
        }
        // both normalised to power series starting at the denominator's order
        let num: Vec<C64> = (0..n as i32).map(|k| self.coeff(k + shift)).collect();
        let d: Vec<C64> = (0..n as i32).map(|k| den.coeff(k + shift)).collect();
        let d0 = d[0];
        let mut q = vec![C64::default(); n];
        for k in 0..n {
            let mut acc = num[k];
            for j in 1..=k {
                acc -= d[j] * q[k - j];
            }
            q[k] = acc / d0;
        }
        Ok(q)
    }

    /// Exact division by `(lambda - root)^m`.
    ///
    /// Returns the quotient together with the `m` remainders produced by
    /// synthetic division, normalised by the coefficient scale of `self`.
    /// For a true root of multiplicity at least `m` the remainders are round-off.
    pub fn deflate(&self, root: C64, m: usize) -> (ScalarLoop, Vec<f64>) {
        let mut cur = self.clone();
        let scale = self.max_coeff_magnitude().max(f64::MIN_POSITIVE);
        let mut rems = Vec::with_capacity(m);
        for _ in 0..m {
            if cur.is_zero() {
                rems.push(0.0);
                continue;
            }
            // polynomial part p(lambda) = lambda^{-d_min} cur(lambda), highest degree first
            let coeffs = cur.coeffs();
            let n = coeffs.len();
            let mut q = vec![C64::default(); n.saturating_sub(1)];
            let mut acc = C64::default();
            for i in (0..n).rev() {
                acc = acc * root + coeffs[i];
                if i > 0 {
                    q[i - 1] = acc;
                }
            }
            rems.push(acc.norm() / scale);
            cur = ScalarLoop::new(cur.min_degree(), q);
        }
        (cur, rems)
    }

    /// Multiplicity of `root` as a zero, judged by successive deflation
    /// remainders below `tol` (relative), capped at `max`.
    pub fn zero_order(&self, root: C64, tol: f64, max: usize) -> usize {
        let mut cur = self.clone();
        let scale = self.max_coeff_magnitude().max(f64::MIN_POSITIVE);
        let mut order = 0;
        while order < max {
            let (q, rem) = cur.deflate(root, 1);
            let rel = rem[0] * cur.max_coeff_magnitude().max(f64::MIN_POSITIVE) / scale;
            if rel > tol {
                break;
            }
            cur = q;
            order += 1;
        }
        order
    }

    /// Complex conjugate of the loop restricted to the unit circle,
    /// i.e. the loop `lambda -> conj(self(1/conj(lambda)))`.
    pub fn circle_conj(&self) -> ScalarLoop {
        let terms: Vec<(i32, C64)> = self.terms().map(|(k, c)| (-k, c.conj())).collect();
        ScalarLoop::from_terms(&terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn exp_of_zero_is_identity() {
        assert_eq!(mat2_exp(&Mat2::zero()), Mat2::identity());
    }

    #[test]
    fn exp_diagonal() {
        let a = c(0.3, -0.1);
        let m = Mat2::diag(a, -a).scale(2.0 * PI * I);
        let e = mat2_exp(&m);
        assert!(close(e.a, (2.0 * PI * I * a).exp(), 1e-13));
        assert!(close(e.d, (-2.0 * PI * I * a).exp(), 1e-13));
        assert!(e.off_diagonal_norm() < 1e-14);
    }

    #[test]
    fn exp_swap_matrix_full_turn() {
        let m = Mat2::from_real(0.0, 1.0, 1.0, 0.0).scale(2.0 * PI * I);
        assert!(mat2_exp(&m).dist(&Mat2::identity()) < 1e-13);
    }

    #[test]
    fn exp_nilpotent_uses_series_branch() {
        let m = Mat2::from_real(0.0, 3.0, 0.0, 0.0);
        let e = mat2_exp(&m);
        assert!(e.dist(&Mat2::from_real(1.0, 3.0, 0.0, 1.0)) < 1e-15);
    }

    #[test]
    fn exp_with_trace() {
        let m = Mat2::from_real(1.0, 0.0, 0.0, 2.0);
        let e = mat2_exp(&m);
        assert!(close(e.a, re(1f64.exp()), 1e-13));
        assert!(close(e.d, re(2f64.exp()), 1e-12));
    }

    #[test]
    fn eig2_examples() {
        let (x, y) = eig2(&Mat2::diag(re(2.0), re(0.5)));
        let mut v = [x.re, y.re];
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((v[0] - 0.5).abs() < 1e-15 && (v[1] - 2.0).abs() < 1e-15);

        let s = 0.037;
        let a = Mat2::from_real(0.0, s * s, 1.0, 0.0);
        let (x, y) = eig2(&a);
        assert!(close(x * y, re(-s * s), 1e-15));
        assert!(close(x + y, re(0.0), 1e-15));
        assert!((x.norm() - s).abs() < 1e-15);

        let (x, y) = eig2(&Mat2::from_real(0.0, 1.0, 0.0, 0.0));
        assert_eq!((x, y), (C64::default(), C64::default()));
    }

    #[test]
    fn eval_matrix_monomials() {
        let e12 = Mat2::from_real(0.0, 1.0, 0.0, 0.0);
        let e21 = Mat2::from_real(0.0, 0.0, 1.0, 0.0);
        let l = MatrixLoop::from_terms(&[(-1, e12), (1, e21)]);
        assert_eq!(l.eval(re(1.0)).unwrap(), Mat2::from_real(0.0, 1.0, 1.0, 0.0));
        assert!(matches!(l.eval(re(0.0)), Err(AlgebraError::PoleAtZero { .. })));
    }

    #[test]
    fn central_loops_at_i() {
        let x1 = ScalarLoop::from_terms(&[(-1, c(0.0, 0.5)), (1, c(0.0, -0.5))]);
        assert!(close(x1.eval(I).unwrap(), re(1.0), 1e-15));
        let sp = (PI / 5.0).sin();
        let x2 = ScalarLoop::real_terms(&[(-1, -sp / 2.0), (1, -sp / 2.0)]);
        assert!(close(x2.eval(I).unwrap(), re(0.0), 1e-15));
        assert!(close(x1.deriv().eval(I).unwrap(), re(0.0), 1e-15));
        // d/dlambda of -(sin phi/2)(1/lambda + lambda) at i is -sin phi
        assert!(close(x2.deriv().eval(I).unwrap(), re(-sp), 1e-15));
    }

    #[test]
    fn tight_bounds_and_zero() {
        let l = ScalarLoop::new(-3, vec![re(0.0), re(1.0), re(0.0), re(2.0), re(0.0)]);
        assert_eq!(l.min_degree(), -2);
        assert_eq!(l.max_degree(), 0);
        assert!(ScalarLoop::new(2, vec![re(0.0); 3]).is_zero());
        assert!(ScalarLoop::constant(re(4.0)).deriv().is_zero());
        let p = &l * &ScalarLoop::zero();
        assert!(p.is_zero());
    }

    #[test]
    fn inverse_monomials_multiply_to_identity() {
        let a = MatrixLoop::monomial(-1, Mat2::identity());
        let b = MatrixLoop::monomial(1, Mat2::identity());
        assert_eq!(&a * &b, MatrixLoop::constant(Mat2::identity()));
    }

    #[test]
    fn taylor_div_geometric() {
        // 1 / (1 - lambda) = 1 + lambda + lambda^2 + ...
        let one = ScalarLoop::constant(re(1.0));
        let den = ScalarLoop::real_terms(&[(0, 1.0), (1, -1.0)]);
        let q = one.taylor_div(&den, 5).unwrap();
        for z in q {
            assert!(close(z, re(1.0), 1e-15));
        }
        // lambda^-1 / lambda^-1 shift handling
        let num = ScalarLoop::real_terms(&[(-1, 2.0), (0, 1.0)]);
        let den = ScalarLoop::real_terms(&[(-1, 1.0)]);
        let q = num.taylor_div(&den, 3).unwrap();
        assert!(close(q[0], re(2.0), 1e-15) && close(q[1], re(1.0), 1e-15));
        let bad = ScalarLoop::real_terms(&[(-2, 1.0)]);
        assert!(bad.taylor_div(&den, 2).is_err());
    }

    #[test]
    fn deflate_double_root() {
        let root = c(0.3, 0.8);
        let lin = ScalarLoop::from_terms(&[(0, -root), (1, re(1.0))]);
        let extra = ScalarLoop::from_terms(&[(-1, c(0.2, 0.1)), (0, re(1.5)), (2, c(0.0, 1.0))]);
        let p = &(&lin * &lin) * &extra;
        let (q, rems) = p.deflate(root, 2);
        assert!(rems.iter().all(|r| *r < 1e-14));
        for (k, v) in extra.terms() {
            assert!(close(q.coeff(k), v, 1e-13));
        }
        assert_eq!(p.zero_order(root, 1e-12, 4), 2);
    }

    #[test]
    fn circle_conj_matches_pointwise() {
        let l = ScalarLoop::from_terms(&[(-1, c(0.2, 0.7)), (2, c(-1.0, 0.3))]);
        let lam = C64::from_polar(1.0, 0.77);
        assert!(close(l.circle_conj().eval(lam).unwrap(), l.eval(lam).unwrap().conj(), 1e-14));
    }
}
