use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("loop with minimum degree {min_degree} has a pole at lambda = 0")]
    PoleAtZero { min_degree: i32 },
    #[error("matrix is singular")]
    Singular,
    #[error("division by the zero loop")]
    DivisionByZero,
    #[error("quotient not holomorphic at lambda = 0 (numerator order {numerator_order}, denominator order {denominator_order})")]
    NotHolomorphicAtZero { numerator_order: i32, denominator_order: i32 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FuchsianError {
    #[error("residue constraint at lambda = 0 violated: component x{component} off by {deviation:e}")]
    ResidueConstraint { component: usize, deviation: f64 },
    #[error("punctures {0} and {1} coincide")]
    CoincidentPunctures(usize, usize),
    #[error("z = {z} is a pole of the potential")]
    Pole { z: Complex64 },
    #[error("angle phi = {0} outside (0, pi/2)")]
    AngleOutOfRange(f64),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("adaptive quadrature did not converge: error estimate {estimate:e} after {panels} panels")]
    NonConvergence { estimate: f64, panels: usize },
    #[error("integrand not finite at t = {t}")]
    NonFinite { t: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MonodromyError {
    #[error("step size underflow near z = {z} (h = {h:e})")]
    StepUnderflow { z: Complex64, h: f64 },
    #[error("non-finite transport value near z = {z}")]
    NonFinite { z: Complex64 },
    #[error("path passes within {distance:e} of puncture {puncture} (clearance {clearance:e})")]
    Clearance { puncture: usize, distance: f64, clearance: f64 },
    #[error("puncture index {0} out of range")]
    BadIndex(usize),
    #[error("too many integration steps on a segment ({0})")]
    TooManySteps(usize),
    #[error(transparent)]
    Fuchsian(#[from] FuchsianError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HolonomyError {
    #[error("invalid Sym data: {0}")]
    SymData(String),
    #[error("expected a real value, imaginary part {imag:e}")]
    NotReal { imag: f64 },
    #[error("gauge {gauge}: first column is not an eigenvector with eigenvalue {k} (residual {residual:e})")]
    GaugeEigenvector { gauge: usize, k: u32, residual: f64 },
    #[error("gauge {gauge}: N(l1)^-1 h N(l2) is not upper triangular (|entry 21| = {entry:e})")]
    GaugeTriangular { gauge: usize, entry: f64 },
    #[error("gauge {gauge}: a_j = 0")]
    DegenerateDiagonal { gauge: usize },
    #[error("constant gauge h does not map eta(l1) to eta(l2): deviation {deviation:e}")]
    ConstantGauge { deviation: f64 },
    #[error("endpoint limit at lambda = {lambda}: denominator vanishes to order {den_order}, numerator only to order {num_order}")]
    EndpointLimit { lambda: Complex64, num_order: usize, den_order: usize },
    #[error("chart singularity at lambda = {lambda}: {which} vanishes")]
    ChartSingular { lambda: Complex64, which: &'static str },
    #[error("gauge {gauge} not holomorphic at lambda = 0")]
    NotHolomorphic { gauge: usize },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Fuchsian(#[from] FuchsianError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LawsonError {
    #[error("second-order quadric constraint is lambda-dependent (spread {spread:e}); derivative tables inconsistent")]
    KddotLambdaDependence { spread: f64 },
    #[error("genus must be at least 2, got {0}")]
    Genus(u32),
    #[error("angle phi = {0} outside (0, pi/2)")]
    AngleOutOfRange(f64),
    #[error("Taylor order {0} not available (max 2)")]
    Order(u32),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("no convergence after {iterations} iterations, residual {residual:e}")]
    NonConvergence { iterations: usize, residual: f64, history: Vec<f64> },
    #[error("Jacobian rank deficient: rank {rank} of {unknowns} unknowns")]
    RankDeficient { rank: usize, unknowns: usize },
    #[error("{residuals} residuals for {unknowns} unknowns; increase the sample count")]
    Underdetermined { residuals: usize, unknowns: usize },
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Monodromy(#[from] MonodromyError),
    #[error(transparent)]
    Fuchsian(#[from] FuchsianError),
    #[error(transparent)]
    Holonomy(#[from] HolonomyError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClosedFormError {
    #[error("torus parameters r = {r}, s = {s} must be positive with r^2 + s^2 = 1")]
    Torus { r: f64, s: f64 },
    #[error("sphere angle {0} outside (0, pi)")]
    SphereAngle(f64),
    #[error(transparent)]
    Holonomy(#[from] HolonomyError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}
