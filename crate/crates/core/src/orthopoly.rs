//! Jacobi polynomials normalized to one at `x = 1`, Gauss quadrature rules
//! and Fourier-Jacobi coefficients against the weight `(1 - x^2)^2`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::pairwise_sum;
use crate::weighted_space::{GridKey, GridKind, SampledFunction};

/// Slack allowed when checking `|x| <= 1`.
pub const DOMAIN_SLACK: f64 = 1e-12;

const NEWTON_MAX_ITER: usize = 100;
const NEWTON_TOL: f64 = 1e-14;

/// Jacobi family `P_n^(a,b)` orthogonal for `(1-x)^a (1+x)^b`, scaled so that
/// `P_n(1) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobiBasis {
    /// Exponent on `(1 - x)`.
    pub alpha_idx: f64,
    /// Exponent on `(1 + x)`.
    pub beta_idx: f64,
}

impl JacobiBasis {
    pub fn new(alpha_idx: f64, beta_idx: f64) -> Result<Self> {
        if !(alpha_idx > -1.0 && beta_idx > -1.0) {
            return Err(Error::InvalidParameter(format!(
                "Jacobi exponents must exceed -1, got ({alpha_idx}, {beta_idx})"
            )));
        }
        Ok(Self {
            alpha_idx,
            beta_idx,
        })
    }

    /// The `(2, 2)` system used for the Fourier-Jacobi coefficients.
    pub fn ultraspherical_2_2() -> Self {
        Self {
            alpha_idx: 2.0,
            beta_idx: 2.0,
        }
    }

    /// Classical value at the endpoint, `binom(n + a, n)`, as a running product.
    pub fn endpoint_value(&self, n: usize) -> f64 {
        (1..=n).fold(1.0, |acc, k| acc * (self.alpha_idx + k as f64) / k as f64)
    }

    pub fn eval(&self, n: usize, x: f64) -> Result<f64> {
        check_unit_interval(x)?;
        Ok(self.eval_unchecked(n, x))
    }

    /// Normalized values for degrees `0..=n_max` at one point.
    pub fn eval_all(&self, n_max: usize, x: f64) -> Result<Vec<f64>> {
        check_unit_interval(x)?;
        let classical = self.classical_all(n_max, x);
        let mut scale = 1.0;
        Ok(classical
            .into_iter()
            .enumerate()
            .map(|(n, v)| {
                if n > 0 {
                    scale *= (self.alpha_idx + n as f64) / n as f64;
                }
                if x == 1.0 {
                    1.0
                } else {
                    v / scale
                }
            })
            .collect())
    }

    pub(crate) fn eval_unchecked(&self, n: usize, x: f64) -> f64 {
        if n == 0 || x == 1.0 {
            return 1.0;
        }
        let classical = self.classical_all(n, x);
        classical[n] / self.endpoint_value(n)
    }

    /// Classically normalized `P_0..=P_n` by the three-term recurrence.
    fn classical_all(&self, n_max: usize, x: f64) -> Vec<f64> {
        let (a, b) = (self.alpha_idx, self.beta_idx);
        let mut out = Vec::with_capacity(n_max + 1);
        out.push(1.0);
        if n_max == 0 {
            return out;
        }
        out.push((a + 1.0) + (a + b + 2.0) * (x - 1.0) / 2.0);
        for n in 2..=n_max {
            let nf = n as f64;
            let s = 2.0 * nf + a + b;
            let c0 = 2.0 * nf * (nf + a + b) * (s - 2.0);
            let c1 = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b);
            let c2 = 2.0 * (nf + a - 1.0) * (nf + b - 1.0) * s;
            let next = (c1 * out[n - 1] - c2 * out[n - 2]) / c0;
            out.push(next);
        }
        out
    }
}

pub fn jacobi_eval(basis: &JacobiBasis, n: usize, x: f64) -> Result<f64> {
    basis.eval(n, x)
}

fn check_unit_interval(x: f64) -> Result<()> {
    if x.is_nan() || x.abs() > 1.0 + DOMAIN_SLACK {
        return Err(Error::Domain {
            value: x,
            domain: "[-1, 1]",
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureKind {
    /// Integrates `g(z) dz / sqrt(1 - z^2)`.
    ChebyshevFirstKind,
    /// Integrates `g(x) dx`.
    Legendre,
    /// Gauss-Legendre on equal panels of `[-1, 1]`.
    CompositeLegendre { panels: usize },
}

/// Nodes sorted ascending in `(-1, 1)` with positive weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub kind: QuadratureKind,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        let terms: Vec<f64> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * g(x))
            .collect();
        pairwise_sum(&terms)
    }

    pub fn grid_key(&self) -> GridKey {
        let kind = match self.kind {
            QuadratureKind::ChebyshevFirstKind => GridKind::ChebyshevGauss,
            QuadratureKind::Legendre => GridKind::Legendre,
            QuadratureKind::CompositeLegendre { panels } => GridKind::CompositeLegendre { panels },
        };
        GridKey {
            kind,
            size: self.len(),
        }
    }
}

/// Gauss-Chebyshev rule of the first kind: `z_j = cos((2j-1)pi/(2M))`, all
/// weights `pi/M`.
pub fn gauss_chebyshev(m: usize) -> Result<QuadratureRule> {
    if m == 0 {
        return Err(Error::QuadratureSize { min: 1, got: 0 });
    }
    let nodes: Vec<f64> = (1..=m).rev().map(|j| chebyshev_node(j, m)).collect();
    Ok(QuadratureRule {
        kind: QuadratureKind::ChebyshevFirstKind,
        nodes,
        weights: vec![PI / m as f64; m],
    })
}

/// `cos((2j-1)pi/(2M))`, snapped to an exact zero at the middle node.
pub(crate) fn chebyshev_node(j: usize, m: usize) -> f64 {
    if 2 * j - 1 == m {
        0.0
    } else {
        ((2 * j - 1) as f64 * PI / (2 * m) as f64).cos()
    }
}

/// Gauss-Legendre rule by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(m: usize) -> Result<QuadratureRule> {
    if m == 0 {
        return Err(Error::QuadratureSize { min: 1, got: 0 });
    }
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let half = m.div_ceil(2);
    for i in 0..half {
        // Root i counted from the right end.
        let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut converged = false;
        let mut dp = 0.0;
        for _ in 0..NEWTON_MAX_ITER {
            let (p, d) = legendre_with_derivative(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= NEWTON_TOL {
                converged = true;
                dp = legendre_with_derivative(m, x).1;
                break;
            }
        }
        if !converged {
            return Err(Error::Convergence {
                index: i,
                size: m,
                iterations: NEWTON_MAX_ITER,
            });
        }
        if m % 2 == 1 && i == half - 1 {
            x = 0.0;
            dp = legendre_with_derivative(m, 0.0).1;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[m - 1 - i] = x;
        weights[m - 1 - i] = w;
        nodes[i] = -x;
        weights[i] = w;
    }
    Ok(QuadratureRule {
        kind: QuadratureKind::Legendre,
        nodes,
        weights,
    })
}

/// Gauss-Legendre with `per_panel` nodes on each of `panels` equal subintervals.
///
/// Breakpoints sit at `-1 + 2k/panels`, so integrands whose kinks fall on
/// those points keep full polynomial accuracy panel by panel.
pub fn composite_gauss_legendre(panels: usize, per_panel: usize) -> Result<QuadratureRule> {
    if panels == 0 {
        return Err(Error::QuadratureSize { min: 1, got: 0 });
    }
    let base = gauss_legendre(per_panel)?;
    let h = 2.0 / panels as f64;
    let mut nodes = Vec::with_capacity(panels * per_panel);
    let mut weights = Vec::with_capacity(panels * per_panel);
    for k in 0..panels {
        let a = -1.0 + h * k as f64;
        let mid = a + 0.5 * h;
        for (&t, &w) in base.nodes.iter().zip(&base.weights) {
            nodes.push(mid + 0.5 * h * t);
            weights.push(0.5 * h * w);
        }
    }
    Ok(QuadratureRule {
        kind: QuadratureKind::CompositeLegendre { panels },
        nodes,
        weights,
    })
}

/// Chebyshev-Lobatto points `-cos(j pi / (size-1))`, ascending, endpoints
/// included. Grids with `size = 2^k + 1` are nested.
pub fn chebyshev_lobatto_grid(size: usize) -> Vec<f64> {
    match size {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => {
            let last = size - 1;
            (0..size)
                .map(|j| {
                    if 2 * j == last {
                        0.0
                    } else {
                        -(j as f64 * PI / last as f64).cos()
                    }
                })
                .collect()
        }
    }
}

fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if m == 0 { 1.0 } else { p1 };
    let prev = if m == 0 { 0.0 } else { p0 };
    let d = m as f64 * (x * p - prev) / (x * x - 1.0);
    (p, d)
}

/// Fourier-Jacobi coefficients `a_0..=a_K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSequence {
    pub values: Vec<f64>,
}

impl CoefficientSequence {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((k, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite {
                x: k as f64,
                value: *v,
            });
        }
        Ok(Self { values })
    }

    pub fn get(&self, k: usize) -> Option<f64> {
        self.values.get(k).copied()
    }
}

/// Default Gauss-Legendre size for coefficients up to degree `n_max`.
pub fn default_coeff_quadrature(n_max: usize) -> usize {
    2 * (n_max + 8)
}

/// `a_n(f) = int f(x) P_n^(2,2)(x) (1-x^2)^2 dx`, without dividing by `||P_n||^2`.
pub fn fourier_jacobi_coeff(f: &SampledFunction, n: usize, m: usize) -> Result<f64> {
    Ok(fourier_jacobi_coeffs(f, n, m)?.values[n])
}

/// All coefficients `a_0(f), ..., a_{k_max}(f)` with one `m`-point rule.
pub fn fourier_jacobi_coeffs(
    f: &SampledFunction,
    k_max: usize,
    m: usize,
) -> Result<CoefficientSequence> {
    let rule = gauss_legendre(m)?;
    let samples = f.samples(rule.grid_key(), &rule.nodes);
    coeffs_from_samples(&rule, &samples, k_max)
}

pub(crate) fn coeffs_from_samples(
    rule: &QuadratureRule,
    samples: &[f64],
    k_max: usize,
) -> Result<CoefficientSequence> {
    let basis = JacobiBasis::ultraspherical_2_2();
    let mut terms = vec![Vec::with_capacity(rule.len()); k_max + 1];
    for ((&x, &w), &fx) in rule.nodes.iter().zip(&rule.weights).zip(samples) {
        if !fx.is_finite() {
            return Err(Error::NonFinite { x, value: fx });
        }
        let s = 1.0 - x * x;
        let base = w * fx * s * s;
        let p = basis.eval_all(k_max, x)?;
        for (k, pk) in p.iter().enumerate() {
            terms[k].push(base * pk);
        }
    }
    CoefficientSequence::new(terms.iter().map(|t| pairwise_sum(t)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    use num::{BigInt, BigRational, One, ToPrimitive, Zero};

    /// Explicit sum `sum_s binom(n+a, n-s) binom(n+b, s) ((x-1)/2)^s ((x+1)/2)^(n-s)`
    /// in exact rational arithmetic, for integer `a`, `b` and `x = num/den`.
    fn jacobi_exact(n: usize, a: i64, b: i64, num: i64, den: i64) -> f64 {
        let r = |p: i64, q: i64| BigRational::new(BigInt::from(p), BigInt::from(q));
        let binom = |top: i64, k: usize| -> BigRational {
            (1..=k as i64).fold(BigRational::one(), |acc, i| acc * r(top - k as i64 + i, i))
        };
        let x = r(num, den);
        let two = r(2, 1);
        let lo = (x.clone() - BigRational::one()) / two.clone();
        let hi = (x + BigRational::one()) / two;
        let n_i = n as i64;
        let mut total = BigRational::zero();
        for s in 0..=n {
            let mut term = binom(n_i + a, n - s) * binom(n_i + b, s);
            for _ in 0..s {
                term *= lo.clone();
            }
            for _ in 0..n - s {
                term *= hi.clone();
            }
            total += term;
        }
        (total / binom(n_i + a, n)).to_f64().unwrap()
    }

    /// Closed forms for the half-integer families, normalized to 1 at x = 1.
    fn jacobi_trig(n: usize, a: f64, b: f64, x: f64) -> f64 {
        let theta = x.acos();
        let nf = n as f64;
        match (a, b) {
            (-0.5, -0.5) => (nf * theta).cos(),
            (0.5, -0.5) if theta == 0.0 => 1.0,
            (0.5, -0.5) => ((nf + 0.5) * theta).sin() / ((2.0 * nf + 1.0) * (theta / 2.0).sin()),
            _ => unreachable!(),
        }
    }

    #[test]
    fn jacobi_examples() {
        let b = JacobiBasis::new(2.0, 2.0).unwrap();
        assert_eq!(b.eval(0, 0.3).unwrap(), 1.0);
        assert_eq!(b.eval(5, 1.0).unwrap(), 1.0);
        assert!(b.eval(1, 0.0).unwrap().abs() < 1e-15);
        assert_eq!(jacobi_exact(1, 2, 2, 0, 1), 0.0);
    }

    #[test]
    fn jacobi_domain_errors() {
        let b = JacobiBasis::ultraspherical_2_2();
        assert!(matches!(b.eval(3, 1.1), Err(Error::Domain { .. })));
        assert!(b.eval(3, 1.0 + 1e-13).is_ok());
        assert!(JacobiBasis::new(-1.0, 0.0).is_err());
    }

    #[test]
    fn recurrence_matches_exact_sum() {
        for &(a, b) in &[(2, 2), (1, 1), (3, 1)] {
            let basis = JacobiBasis::new(a as f64, b as f64).unwrap();
            for n in 0..=30 {
                for i in 0..=40 {
                    let x = -1.0 + i as f64 / 20.0;
                    let got = basis.eval(n, x).unwrap();
                    let want = jacobi_exact(n, a, b, i - 20, 20);
                    assert!(
                        (got - want).abs() <= 1e-12,
                        "({a},{b}) n={n} x={x}: {got} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn recurrence_matches_trigonometric_forms() {
        for &(a, b) in &[(-0.5, -0.5), (0.5, -0.5)] {
            let basis = JacobiBasis::new(a, b).unwrap();
            for n in 0..=30 {
                for i in 0..=40 {
                    let x = (-1.0 + i as f64 / 20.0f64).clamp(-1.0, 1.0);
                    let got = basis.eval(n, x).unwrap();
                    let want = jacobi_trig(n, a, b, x);
                    assert!(
                        (got - want).abs() <= 1e-12,
                        "({a},{b}) n={n} x={x}: {got} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn endpoint_normalization_is_exact() {
        let basis = JacobiBasis::ultraspherical_2_2();
        for n in 0..=30 {
            assert_eq!(basis.eval(n, 1.0).unwrap(), 1.0);
        }
        assert!(basis.eval_all(30, 1.0).unwrap().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn chebyshev_rule_examples() {
        let r1 = gauss_chebyshev(1).unwrap();
        assert_eq!(r1.nodes, vec![0.0]);
        assert!((r1.weights[0] - PI).abs() < 1e-15);
        let r2 = gauss_chebyshev(2).unwrap();
        assert!((r2.integrate(|z| z * z) - PI / 2.0).abs() < 1e-14);
        let r8 = gauss_chebyshev(8).unwrap();
        assert!((r8.integrate(|_| 1.0) - PI).abs() < 1e-14);
        assert!(gauss_chebyshev(0).is_err());
    }

    #[test]
    fn legendre_rule_examples() {
        let r1 = gauss_legendre(1).unwrap();
        assert_eq!(r1.nodes, vec![0.0]);
        assert!((r1.weights[0] - 2.0).abs() < 1e-15);
        let r3 = gauss_legendre(3).unwrap();
        assert!((r3.integrate(|x| x.powi(4)) - 0.4).abs() < 1e-14);
        let r10 = gauss_legendre(10).unwrap();
        assert!((r10.integrate(|x| (1.0 - x * x).powi(2)) - 16.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn rules_are_sorted_and_interior() {
        for m in [1, 2, 3, 7, 64, 1025] {
            for rule in [gauss_chebyshev(m).unwrap(), gauss_legendre(m).unwrap()] {
                assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
                assert!(rule.nodes.iter().all(|x| x.abs() < 1.0));
                assert!(rule.weights.iter().all(|w| *w > 0.0));
            }
        }
    }

    #[test]
    fn composite_rule_integrates_kinked_abs_exactly() {
        let rule = composite_gauss_legendre(16, 8).unwrap();
        assert_eq!(rule.len(), 128);
        assert!((rule.integrate(f64::abs) - 1.0).abs() < 1e-14);
        assert!((rule.integrate(|x| (x - 0.25).abs()) - 1.0625).abs() < 1e-14);
    }

    #[test]
    fn lobatto_grids_nest() {
        let coarse = chebyshev_lobatto_grid(17);
        let fine = chebyshev_lobatto_grid(33);
        for (j, x) in coarse.iter().enumerate() {
            assert_eq!(*x, fine[2 * j]);
        }
        assert_eq!(coarse[0], -1.0);
        assert_eq!(coarse[16], 1.0);
        assert_eq!(coarse[8], 0.0);
    }

    #[test]
    fn coefficient_examples() {
        let one = SampledFunction::constant(1.0);
        let m = default_coeff_quadrature(5);
        assert!((fourier_jacobi_coeff(&one, 0, m).unwrap() - 16.0 / 15.0).abs() < 1e-14);

        let p3 = SampledFunction::jacobi(JacobiBasis::ultraspherical_2_2(), 3);
        assert!(fourier_jacobi_coeff(&p3, 5, m).unwrap().abs() < 1e-12);

        // Brute-force oracle: composite midpoint rule on a fine grid.
        let p2 = SampledFunction::jacobi(JacobiBasis::ultraspherical_2_2(), 2);
        let basis = JacobiBasis::ultraspherical_2_2();
        let cells = 200_000;
        let h = 2.0 / cells as f64;
        let brute: f64 = (0..cells)
            .map(|i| {
                let x = -1.0 + (i as f64 + 0.5) * h;
                let p = basis.eval(2, x).unwrap();
                p * p * (1.0 - x * x).powi(2) * h
            })
            .sum();
        let got = fourier_jacobi_coeff(&p2, 2, m).unwrap();
        assert!(got > 0.0);
        assert!((got - brute).abs() < 1e-9, "{got} vs {brute}");
    }
}
