//! The asymmetric generalized translation operator.
//!
//! Algebraic form, for `y = cos t` and `z = cos phi`:
//!
//! ```text
//! T_y f(x) = 1/(pi (1-x^2)) int_{-1}^{1} K(x,y,z) f(R) dz / sqrt(1-z^2)
//! R        = x y - z sqrt(1-x^2) sqrt(1-y^2)
//! K        = 1 - R^2 - 2(1-y^2)(1-z^2) + 4(1-x^2)(1-y^2)(1-z^2)^2
//! ```
//!
//! The `z` integral is evaluated with an `M`-point Gauss-Chebyshev rule, which
//! is exact when `f` is a polynomial of degree `<= 2M - 5`. The trigonometric
//! form uses the same nodes as a midpoint rule in `phi`.
//!
//! Jacobi polynomials `P_n^(2,2)` are eigenfunctions: `T_y P_n = R_n(y) P_n`.
//! The multiplier is `R_n(y) = A_n(y) + 3/2 (1-y^2) s_n B_n(y)` where the
//! families `A`, `B` and the scale `s_n` are selected by
//! [`calibrate_multiplier`] against the empirical eigenvalue
//! [`fit_multiplier`].

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orthopoly::{
    chebyshev_node, coeffs_from_samples, default_coeff_quadrature, gauss_legendre,
    CoefficientSequence, JacobiBasis, DOMAIN_SLACK,
};
use crate::weighted_space::SampledFunction;

/// Width of the excluded band `[1 - EDGE_EPS, 1]` (and its mirror) where the
/// `1/(1-x^2)` prefactor is not evaluated.
pub const EDGE_EPS: f64 = 1e-6;
/// Quadrature size for functions not known to be polynomials.
pub const BLACK_BOX_QUAD_SIZE: usize = 128;
/// Agreement required between a candidate closed form and the fitted multiplier.
pub const CALIBRATION_TOL: f64 = 1e-8;

const PERSISTED_CALIBRATION: &str = include_str!("../data/multiplier_calibration.json");

/// `max(16, ceil((deg + 5) / 2))` for polynomials, [`BLACK_BOX_QUAD_SIZE`] otherwise.
pub fn default_quad_size(f: &SampledFunction) -> usize {
    match f.degree() {
        Some(d) => exact_quad_size(d).max(16),
        None => BLACK_BOX_QUAD_SIZE,
    }
}

/// Smallest Gauss-Chebyshev size exact for a degree-`deg` polynomial.
pub fn exact_quad_size(deg: usize) -> usize {
    (deg + 5).div_ceil(2)
}

/// `1 - x^2`.
#[inline]
pub fn weight_factor(x: f64) -> f64 {
    1.0 - x * x
}

#[inline]
fn kernel_unchecked(x: f64, y: f64, z: f64) -> (f64, f64) {
    let sx = weight_factor(x);
    let sy = weight_factor(y);
    let sz = weight_factor(z);
    let r = x * y - z * sx.max(0.0).sqrt() * sy.max(0.0).sqrt();
    let k = 1.0 - r * r - 2.0 * sy * sz + 4.0 * sx * sy * sz * sz;
    (k, r)
}

pub fn kernel_eval(x: f64, y: f64, z: f64) -> Result<f64> {
    for v in [x, y, z] {
        if v.is_nan() || v.abs() > 1.0 + DOMAIN_SLACK {
            return Err(Error::Domain {
                value: v,
                domain: "[-1, 1]^3",
            });
        }
    }
    Ok(kernel_unchecked(x.clamp(-1.0, 1.0), y.clamp(-1.0, 1.0), z.clamp(-1.0, 1.0)).0)
}

/// The operator with its Gauss-Chebyshev nodes precomputed.
#[derive(Debug, Clone)]
pub struct Translator {
    m: usize,
    cos_phi: Vec<f64>,
    sin_phi: Vec<f64>,
    prefactor_scale: f64,
}

impl Translator {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::QuadratureSize { min: 1, got: 0 });
        }
        let cos_phi = (1..=m).map(|j| chebyshev_node(j, m)).collect();
        let sin_phi = (1..=m)
            .map(|j| ((2 * j - 1) as f64 * PI / (2 * m) as f64).sin())
            .collect();
        Ok(Self {
            m,
            cos_phi,
            sin_phi,
            prefactor_scale: 1.0,
        })
    }

    /// Multiplies the `1/(pi(1-x^2))` prefactor by `scale`. Diagnostic only:
    /// any value other than 1 breaks the operator on purpose.
    pub fn with_prefactor_fault(mut self, scale: f64) -> Self {
        self.prefactor_scale = scale;
        self
    }

    pub fn quad_size(&self) -> usize {
        self.m
    }

    fn check_x(x: f64) -> Result<()> {
        if x.is_nan() || x.abs() > 1.0 - EDGE_EPS {
            return Err(Error::Edge { x, eps: EDGE_EPS });
        }
        Ok(())
    }

    /// `T_y f(x)`.
    pub fn apply(&self, f: &SampledFunction, y: f64, x: f64) -> Result<f64> {
        Self::check_x(x)?;
        if y.is_nan() || y.abs() > 1.0 + DOMAIN_SLACK {
            return Err(Error::Domain {
                value: y,
                domain: "[-1, 1]",
            });
        }
        let y = y.clamp(-1.0, 1.0);
        let mut acc = 0.0;
        for &z in &self.cos_phi {
            let (k, r) = kernel_unchecked(x, y, z);
            acc += k * f.eval(r);
        }
        Ok(self.finish(acc, x))
    }

    /// `hat T_t f(x)`, the same operator parametrized by the angle `t`.
    pub fn apply_trig(&self, f: &SampledFunction, t: f64, x: f64) -> Result<f64> {
        Self::check_x(x)?;
        if !t.is_finite() {
            return Err(Error::Domain {
                value: t,
                domain: "finite angles",
            });
        }
        let (sin_t, cos_t) = t.sin_cos();
        let sx = weight_factor(x);
        let root_sx = sx.sqrt();
        let sin2_t = sin_t * sin_t;
        let mut acc = 0.0;
        for (&c, &s) in self.cos_phi.iter().zip(&self.sin_phi) {
            let r = x * cos_t - root_sx * sin_t * c;
            let s2 = s * s;
            let k = 1.0 - r * r - 2.0 * sin2_t * s2 + 4.0 * sx * sin2_t * s2 * s2;
            acc += k * f.eval(r);
        }
        Ok(self.finish(acc, x))
    }

    #[inline]
    fn finish(&self, acc: f64, x: f64) -> f64 {
        // weights are pi/M; the pi cancels against the prefactor
        self.prefactor_scale * acc / (self.m as f64 * weight_factor(x))
    }

    /// `T_y f` sampled on `nodes`.
    pub fn apply_on(&self, f: &SampledFunction, y: f64, nodes: &[f64]) -> Result<Vec<f64>> {
        nodes.iter().map(|&x| self.apply(f, y, x)).collect()
    }
}

/// `T_y f(x)` with an `m`-point Gauss-Chebyshev rule.
pub fn translate(f: &SampledFunction, y: f64, x: f64, m: usize) -> Result<f64> {
    Translator::new(m)?.apply(f, y, x)
}

/// `hat T_t f(x) = T_{cos t} f(x)` evaluated in the angle variables.
pub fn translate_trig(f: &SampledFunction, t: f64, x: f64, m: usize) -> Result<f64> {
    Translator::new(m)?.apply_trig(f, t, x)
}

/// Scale `s_n` applied to the second family in the multiplier closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SecondTermScale {
    /// `s_n = 1`: both families normalized to one at `y = 1`.
    Unit,
    /// `s_n = -n(n+7)/12`.
    DegreeQuadratic,
}

impl SecondTermScale {
    pub fn factor(&self, n: usize) -> f64 {
        match self {
            SecondTermScale::Unit => 1.0,
            SecondTermScale::DegreeQuadratic => {
                let n = n as f64;
                -n * (n + 7.0) / 12.0
            }
        }
    }
}

impl fmt::Display for SecondTermScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SecondTermScale::Unit => f.write_str("1"),
            SecondTermScale::DegreeQuadratic => f.write_str("-n(n+7)/12"),
        }
    }
}

/// One hypothesis `R_n(y) = A_n(y) + 3/2 (1-y^2) s_n B_n(y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiplierCandidate {
    pub first: JacobiBasis,
    pub second: JacobiBasis,
    pub scale: SecondTermScale,
}

impl MultiplierCandidate {
    pub fn new(first: (f64, f64), second: (f64, f64), scale: SecondTermScale) -> Result<Self> {
        Ok(Self {
            first: JacobiBasis::new(first.0, first.1)?,
            second: JacobiBasis::new(second.0, second.1)?,
            scale,
        })
    }

    pub fn eval(&self, n: usize, y: f64) -> Result<f64> {
        let a = self.first.eval(n, y)?;
        let b = self.second.eval(n, y)?;
        let y = y.clamp(-1.0, 1.0);
        Ok(a + 1.5 * weight_factor(y) * self.scale.factor(n) * b)
    }

    /// First-term indices `(1,1)`, `(2,2)`, `(3,1)` with a `(2,2)` second
    /// term, each under both scale laws.
    pub fn default_set() -> Vec<Self> {
        let mut out = Vec::new();
        for scale in [SecondTermScale::Unit, SecondTermScale::DegreeQuadratic] {
            for first in [(1.0, 1.0), (2.0, 2.0), (3.0, 1.0)] {
                out.push(Self::new(first, (2.0, 2.0), scale).expect("valid indices"));
            }
        }
        out
    }
}

impl fmt::Display for MultiplierCandidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "P^({},{})(y) + 3/2 (1-y^2) [{}] P^({},{})(y)",
            self.first.alpha_idx,
            self.first.beta_idx,
            self.scale,
            self.second.alpha_idx,
            self.second.beta_idx
        )
    }
}

/// Closed form of `R_n(y)`, usable once validated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Multiplier {
    pub first_term_basis: JacobiBasis,
    pub second_term_basis: JacobiBasis,
    pub scale: SecondTermScale,
    pub validated: bool,
}

impl Multiplier {
    fn from_candidate(c: &MultiplierCandidate, validated: bool) -> Self {
        Self {
            first_term_basis: c.first,
            second_term_basis: c.second,
            scale: c.scale,
            validated,
        }
    }

    pub fn candidate(&self) -> MultiplierCandidate {
        MultiplierCandidate {
            first: self.first_term_basis,
            second: self.second_term_basis,
            scale: self.scale,
        }
    }

    /// The candidate selected by the calibration table shipped in
    /// `data/multiplier_calibration.json`.
    pub fn shipped() -> Result<Self> {
        let report = CalibrationReport::persisted()?;
        Ok(report.multiplier)
    }
}

pub fn multiplier_eval(mult: &Multiplier, n: usize, y: f64) -> Result<f64> {
    if !mult.validated {
        return Err(Error::UnvalidatedMultiplier);
    }
    mult.candidate().eval(n, y)
}

/// Fourier-Jacobi coefficients `a_0..=a_{k_max}` of `T_y f`, using an exact
/// translation rule when `f` is a polynomial and an `m_coeff`-point
/// Gauss-Legendre rule for the coefficients.
pub fn translated_coeffs(
    translator: &Translator,
    f: &SampledFunction,
    y: f64,
    k_max: usize,
    m_coeff: usize,
) -> Result<CoefficientSequence> {
    let rule = gauss_legendre(m_coeff)?;
    let samples = translator.apply_on(f, y, &rule.nodes)?;
    coeffs_from_samples(&rule, &samples, k_max)
}

/// Empirical eigenvalue `a_n(T_y P_n) / a_n(P_n)` for `P_n = P_n^(2,2)`.
pub fn fit_multiplier(n: usize, y: f64, m: usize) -> Result<f64> {
    let pn = SampledFunction::jacobi(JacobiBasis::ultraspherical_2_2(), n);
    let translator = Translator::new(default_quad_size(&pn))?;
    let rule = gauss_legendre(m)?;
    let plain = coeffs_from_samples(&rule, &pn.samples(rule.grid_key(), &rule.nodes), n)?;
    let diag = plain.values[n];
    if diag.abs() < 1e-14 {
        return Err(Error::DivisionGuard { n, value: diag });
    }
    let translated = coeffs_from_samples(&rule, &translator.apply_on(&pn, y, &rule.nodes)?, n)?;
    Ok(translated.values[n] / diag)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateResidual {
    pub candidate: MultiplierCandidate,
    /// `max |closed form - fit|` over the calibration table.
    pub max_residual: f64,
    pub matches: bool,
}

/// Result of [`calibrate_multiplier`]; serializes to the persisted JSON table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub n_max: usize,
    pub y_grid: Vec<f64>,
    pub tolerance: f64,
    pub candidates: Vec<CandidateResidual>,
    /// Index into `candidates` of the unique match, if there is one.
    pub selected: Option<usize>,
    pub multiplier: Multiplier,
}

impl CalibrationReport {
    pub fn persisted() -> Result<Self> {
        Ok(serde_json::from_str(PERSISTED_CALIBRATION)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// `count` equispaced points on `[-1, 1]`.
pub fn uniform_y_grid(count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![1.0],
        _ => (0..count)
            .map(|j| -1.0 + 2.0 * j as f64 / (count - 1) as f64)
            .collect(),
    }
}

/// Compares every candidate closed form against [`fit_multiplier`] on all
/// `n <= n_max`, `y` in `y_grid`. Exactly one match yields a validated
/// multiplier; otherwise the report carries the residuals and the first
/// candidate, unvalidated.
pub fn calibrate_multiplier(
    candidates: &[MultiplierCandidate],
    n_max: usize,
    y_grid: &[f64],
) -> Result<CalibrationReport> {
    if candidates.is_empty() {
        return Err(Error::InvalidParameter("candidate list is empty".into()));
    }
    let m = default_coeff_quadrature(n_max);
    let mut fit = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let row: Result<Vec<f64>> = y_grid.iter().map(|&y| fit_multiplier(n, y, m)).collect();
        fit.push(row?);
    }
    let mut rows = Vec::with_capacity(candidates.len());
    for c in candidates {
        let mut worst = 0.0f64;
        for (n, fit_row) in fit.iter().enumerate() {
            for (&y, &want) in y_grid.iter().zip(fit_row) {
                worst = worst.max((c.eval(n, y)? - want).abs());
            }
        }
        rows.push(CandidateResidual {
            candidate: *c,
            max_residual: worst,
            matches: worst <= CALIBRATION_TOL,
        });
    }
    let matching: Vec<usize> = rows
        .iter()
        .enumerate()
        .filter(|(_, r)| r.matches)
        .map(|(i, _)| i)
        .collect();
    let selected = (matching.len() == 1).then(|| matching[0]);
    let multiplier = match selected {
        Some(i) => Multiplier::from_candidate(&candidates[i], true),
        None => Multiplier::from_candidate(&candidates[0], false),
    };
    Ok(CalibrationReport {
        n_max,
        y_grid: y_grid.to_vec(),
        tolerance: CALIBRATION_TOL,
        candidates: rows,
        selected,
        multiplier,
    })
}

/// Default calibration: [`MultiplierCandidate::default_set`], `n <= 8`,
/// 17 equispaced values of `y`.
pub fn calibrate_default() -> Result<CalibrationReport> {
    calibrate_multiplier(&MultiplierCandidate::default_set(), 8, &uniform_y_grid(17))
}
