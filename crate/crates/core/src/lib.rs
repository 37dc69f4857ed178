//! Asymmetric generalized translation on `[-1, 1]`, the first-order modulus of
//! smoothness it induces, weighted best polynomial approximation, and an
//! experiment harness for the converse Jackson inequality.
//!
//! Modules, bottom-up:
//!
//! - [`orthopoly`]: Jacobi polynomials normalized by `P_n(1) = 1`, Gauss rules,
//!   Fourier-Jacobi coefficients.
//! - [`weighted_space`]: the spaces `L_{p,alpha}`, their norms and parameter gate.
//! - [`translation`]: the operator `T_y`, its kernel and the multiplier `R_n(y)`.
//! - [`approx`]: best approximation `E_n(f)` by polynomials of degree `<= n-1`.
//! - [`modulus`]: the modulus of smoothness `omega(f, delta)`.
//! - [`harness`]: property checks and experiments.

pub mod approx;
pub mod error;
pub mod harness;
pub mod modulus;
pub mod numeric;
pub mod orthopoly;
pub mod translation;
pub mod weighted_space;

pub use approx::{best_approx, best_approx_sequence, ApproxConfig, BestApproxResult, Solver};
pub use error::{Error, Result};
pub use harness::{
    class_fit, converse_table, dyadic_bound, dyadic_level, verify_lemma1, ClassFit, ConverseTable,
    DyadicDecomposition, Lemma1Config, Lemma1Report, TestFunction,
};
pub use modulus::{modulus_curve, modulus_omega, ModulusConfig, ModulusReport};
pub use orthopoly::{
    fourier_jacobi_coeff, gauss_chebyshev, gauss_legendre, jacobi_eval, CoefficientSequence,
    JacobiBasis, QuadratureKind, QuadratureRule,
};
pub use translation::{
    calibrate_multiplier, fit_multiplier, kernel_eval, multiplier_eval, translate, translate_trig,
    CalibrationReport, Multiplier, MultiplierCandidate, SecondTermScale, Translator,
};
pub use weighted_space::{validate_params, weighted_norm, SampledFunction, Verdict, WeightedSpace};
