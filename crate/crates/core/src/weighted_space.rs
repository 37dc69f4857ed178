//! Weighted spaces `L_{p,alpha}` with norm `|| f(x) (1-x^2)^alpha ||_p`, the
//! admissible parameter region, and sampled functions on `[-1, 1]`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{chebyshev_eval, pairwise_sum};
use crate::orthopoly::{chebyshev_lobatto_grid, gauss_legendre, JacobiBasis};

/// Default node count of the Gauss-Legendre rule behind finite-`p` norms.
pub const DEFAULT_NORM_RESOLUTION: usize = 256;
/// Default Chebyshev-Lobatto grid size behind the `p = inf` norm.
pub const DEFAULT_SUP_RESOLUTION: usize = 4097;
/// Smallest resolution accepted by [`weighted_norm`].
pub const MIN_NORM_RESOLUTION: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GridKind {
    Legendre,
    CompositeLegendre {
        panels: usize,
    },
    ChebyshevGauss,
    ChebyshevLobatto,
    /// Caller-defined grid, distinguished by a tag.
    Custom(u64),
}

/// Identifies a sampling grid in a [`SampledFunction`] cache.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridKey {
    pub kind: GridKind,
    pub size: usize,
}

type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A function on `[-1, 1]` with cached samples on named grids.
///
/// `degree` is set when the function is known to be a polynomial; the
/// translation operator then picks a quadrature size that is exact for it.
pub struct SampledFunction {
    evaluator: Evaluator,
    degree: Option<usize>,
    label: String,
    cache: Mutex<HashMap<GridKey, Arc<Vec<f64>>>>,
}

impl Clone for SampledFunction {
    fn clone(&self) -> Self {
        Self {
            evaluator: Arc::clone(&self.evaluator),
            degree: self.degree,
            label: self.label.clone(),
            cache: Mutex::new(HashMap::new()),
        }
    }
}

impl fmt::Debug for SampledFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SampledFunction")
            .field("label", &self.label)
            .field("degree", &self.degree)
            .finish()
    }
}

impl SampledFunction {
    pub fn new<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            evaluator: Arc::new(f),
            degree: None,
            label: label.into(),
            cache: Mutex::new(HashMap::new()),
        }
    }

    /// Marks the function as a polynomial of at most this degree.
    pub fn with_degree(mut self, degree: usize) -> Self {
        self.degree = Some(degree);
        self
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("{c}"), move |_| c).with_degree(0)
    }

    /// `sum_k coeffs[k] x^k`.
    pub fn monomial(coeffs: Vec<f64>) -> Self {
        let degree = coeffs.len().saturating_sub(1);
        let label = format!("poly{coeffs:?}");
        Self::new(label, move |x| {
            coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
        })
        .with_degree(degree)
    }

    /// `sum_k coeffs[k] T_k(x)`.
    pub fn chebyshev(coeffs: Vec<f64>) -> Self {
        let degree = coeffs.len().saturating_sub(1);
        Self::new("chebyshev series", move |x| chebyshev_eval(&coeffs, x)).with_degree(degree)
    }

    /// The single normalized Jacobi polynomial `P_n` of `basis`.
    pub fn jacobi(basis: JacobiBasis, n: usize) -> Self {
        Self::new(
            format!("P_{n}^({},{})", basis.alpha_idx, basis.beta_idx),
            move |x| basis.eval_unchecked(n, x.clamp(-1.0, 1.0)),
        )
        .with_degree(n)
    }

    /// `sum_k coeffs[k] P_k` in the normalized Jacobi system of `basis`.
    pub fn jacobi_series(basis: JacobiBasis, coeffs: Vec<f64>) -> Self {
        let degree = coeffs.len().saturating_sub(1);
        Self::new("jacobi series", move |x| {
            if coeffs.is_empty() {
                return 0.0;
            }
            let p = basis
                .eval_all(coeffs.len() - 1, x.clamp(-1.0, 1.0))
                .expect("clamped argument is in range");
            coeffs.iter().zip(&p).map(|(c, p)| c * p).sum()
        })
        .with_degree(degree)
    }

    /// `a f + b g`.
    pub fn linear_combination(a: f64, f: &SampledFunction, b: f64, g: &SampledFunction) -> Self {
        let (ef, eg) = (Arc::clone(&f.evaluator), Arc::clone(&g.evaluator));
        let degree = match (f.degree, g.degree) {
            (Some(df), Some(dg)) => Some(df.max(dg)),
            _ => None,
        };
        let mut out = Self::new(format!("{a}*({}) + {b}*({})", f.label, g.label), move |x| {
            a * ef(x) + b * eg(x)
        });
        out.degree = degree;
        out
    }

    pub fn scaled(&self, c: f64) -> Self {
        let e = Arc::clone(&self.evaluator);
        let mut out = Self::new(format!("{c}*({})", self.label), move |x| c * e(x));
        out.degree = self.degree;
        out
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.evaluator)(x)
    }

    pub fn degree(&self) -> Option<usize> {
        self.degree
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Values on `nodes`, cached under `key`. The caller guarantees that a key
    /// always refers to the same node set.
    pub fn samples(&self, key: GridKey, nodes: &[f64]) -> Arc<Vec<f64>> {
        if let Some(v) = self.cache.lock().expect("cache lock").get(&key) {
            return Arc::clone(v);
        }
        let values: Arc<Vec<f64>> = Arc::new(nodes.iter().map(|&x| self.eval(x)).collect());
        self.cache
            .lock()
            .expect("cache lock")
            .insert(key, Arc::clone(&values));
        values
    }
}

/// The pair `(p, alpha)` behind `||f|| = ||f(x)(1-x^2)^alpha||_p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedSpace {
    /// Integrability exponent in `[1, inf]`; `f64::INFINITY` for the sup norm.
    pub p: f64,
    pub alpha: f64,
}

impl WeightedSpace {
    pub fn new(p: f64, alpha: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidParameter(format!("p must be >= 1, got {p}")));
        }
        if !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "alpha must be finite, got {alpha}"
            )));
        }
        Ok(Self { p, alpha })
    }

    pub fn is_sup(&self) -> bool {
        self.p.is_infinite()
    }

    /// `(1 - x^2)^alpha`.
    pub fn weight(&self, x: f64) -> f64 {
        (1.0 - x * x).max(0.0).powf(self.alpha)
    }

    pub fn validate(&self, lambda: Option<f64>) -> Verdict {
        validate_params(self, lambda)
    }
}

impl fmt::Display for WeightedSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_sup() {
            write!(f, "p=inf, alpha={}", self.alpha)
        } else {
            write!(f, "p={}, alpha={}", self.p, self.alpha)
        }
    }
}

/// One inequality of the admissible `(p, alpha, lambda)` region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Clause {
    AlphaAboveHalf,
    AlphaAtMostOne,
    AlphaAboveLowerBound,
    AlphaBelowUpperBound,
    AlphaAtLeastOne,
    AlphaBelowThreeHalves,
    LambdaPositive,
    LambdaBelowTwo,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Clause::AlphaAboveHalf => "α > 1/2",
            Clause::AlphaAtMostOne => "α ≤ 1",
            Clause::AlphaAboveLowerBound => "α > 1 − 1/(2p)",
            Clause::AlphaBelowUpperBound => "α < 3/2 − 1/(2p)",
            Clause::AlphaAtLeastOne => "α ≥ 1",
            Clause::AlphaBelowThreeHalves => "α < 3/2",
            Clause::LambdaPositive => "λ > 0",
            Clause::LambdaBelowTwo => "λ < 2",
        };
        f.write_str(s)
    }
}

/// Outcome of [`validate_params`]; empty `violated` means valid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub violated: Vec<Clause>,
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        self.violated.is_empty()
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return f.write_str("valid");
        }
        let clauses: Vec<String> = self.violated.iter().map(|c| c.to_string()).collect();
        write!(f, "invalid: violates {}", clauses.join(", "))
    }
}

/// Checks `(p, alpha)` against the admissible region and, when given,
/// `0 < lambda < 2`. All inequalities are taken exactly as stated, strict
/// ones included.
pub fn validate_params(space: &WeightedSpace, lambda: Option<f64>) -> Verdict {
    let (p, a) = (space.p, space.alpha);
    let mut violated = Vec::new();
    let mut require = |ok: bool, clause| {
        if !ok {
            violated.push(clause);
        }
    };
    if p == 1.0 {
        require(a > 0.5, Clause::AlphaAboveHalf);
        require(a <= 1.0, Clause::AlphaAtMostOne);
    } else if p.is_infinite() {
        require(a >= 1.0, Clause::AlphaAtLeastOne);
        require(a < 1.5, Clause::AlphaBelowThreeHalves);
    } else {
        let shift = 1.0 / (2.0 * p);
        require(a > 1.0 - shift, Clause::AlphaAboveLowerBound);
        require(a < 1.5 - shift, Clause::AlphaBelowUpperBound);
    }
    if let Some(l) = lambda {
        require(l > 0.0, Clause::LambdaPositive);
        require(l < 2.0, Clause::LambdaBelowTwo);
    }
    Verdict { violated }
}

/// Sample points, integration weights and `(1-x^2)^alpha` for one discrete norm.
#[derive(Debug, Clone)]
pub struct NormGrid {
    pub key: GridKey,
    pub space: WeightedSpace,
    pub nodes: Vec<f64>,
    /// Integration weights; `None` for the sup norm.
    pub quad_weights: Option<Vec<f64>>,
    pub space_weights: Vec<f64>,
}

impl NormGrid {
    /// Gauss-Legendre of `resolution` nodes for finite `p`, a
    /// Chebyshev-Lobatto grid of `resolution` points for `p = inf`.
    pub fn new(space: &WeightedSpace, resolution: usize) -> Result<Self> {
        if resolution < MIN_NORM_RESOLUTION {
            return Err(Error::QuadratureSize {
                min: MIN_NORM_RESOLUTION,
                got: resolution,
            });
        }
        let (key, nodes, quad_weights) = if space.is_sup() {
            let key = GridKey {
                kind: GridKind::ChebyshevLobatto,
                size: resolution,
            };
            (key, chebyshev_lobatto_grid(resolution), None)
        } else {
            let rule = gauss_legendre(resolution)?;
            (rule.grid_key(), rule.nodes, Some(rule.weights))
        };
        let space_weights = nodes.iter().map(|&x| space.weight(x)).collect();
        Ok(Self {
            key,
            space: *space,
            nodes,
            quad_weights,
            space_weights,
        })
    }

    pub fn default_for(space: &WeightedSpace) -> Result<Self> {
        let res = if space.is_sup() {
            DEFAULT_SUP_RESOLUTION
        } else {
            DEFAULT_NORM_RESOLUTION
        };
        Self::new(space, res)
    }

    /// Drops nodes closer than `eps` to either endpoint.
    pub fn interior(mut self, eps: f64) -> Self {
        let keep: Vec<bool> = self.nodes.iter().map(|x| 1.0 - x.abs() >= eps).collect();
        let filter = |v: &mut Vec<f64>| {
            let mut it = keep.iter();
            v.retain(|_| *it.next().unwrap());
        };
        filter(&mut self.nodes);
        filter(&mut self.space_weights);
        if let Some(w) = self.quad_weights.as_mut() {
            filter(w);
        }
        self.key.kind = GridKind::Custom(eps.to_bits() ^ self.key.size as u64);
        self
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Discrete weighted norm of values sampled on `self.nodes`.
    pub fn norm_of(&self, values: &[f64]) -> Result<f64> {
        debug_assert_eq!(values.len(), self.nodes.len());
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite {
                x: self.nodes[i],
                value: *v,
            });
        }
        let p = self.space.p;
        match &self.quad_weights {
            None => Ok(values
                .iter()
                .zip(&self.space_weights)
                .map(|(v, w)| (v * w).abs())
                .fold(0.0, f64::max)),
            Some(qw) => {
                let terms: Vec<f64> = values
                    .iter()
                    .zip(&self.space_weights)
                    .zip(qw)
                    .map(|((v, w), q)| q * (v * w).abs().powf(p))
                    .collect();
                Ok(pairwise_sum(&terms).powf(1.0 / p))
            }
        }
    }
}

/// `||f(x)(1-x^2)^alpha||_p` on the default-style grid of `resolution` points.
pub fn weighted_norm(f: &SampledFunction, space: &WeightedSpace, resolution: usize) -> Result<f64> {
    let grid = NormGrid::new(space, resolution)?;
    let values = f.samples(grid.key, &grid.nodes);
    grid.norm_of(&values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(p: f64, alpha: f64) -> WeightedSpace {
        WeightedSpace::new(p, alpha).unwrap()
    }

    #[test]
    fn validate_examples() {
        assert!(validate_params(&space(1.0, 0.75), None).is_valid());
        let v = validate_params(&space(1.0, 0.4), None);
        assert_eq!(v.violated, vec![Clause::AlphaAboveHalf]);
        assert_eq!(v.violated[0].to_string(), "α > 1/2");
        let v = validate_params(&space(2.0, 0.75), Some(2.0));
        assert!(!v.is_valid());
        assert!(v.violated.contains(&Clause::LambdaBelowTwo));
        assert!(validate_params(&space(2.0, 1.0), Some(1.5)).is_valid());
        assert!(!validate_params(&space(2.0, 1.0), Some(0.0)).is_valid());
    }

    #[test]
    fn rejects_bad_exponent() {
        assert!(WeightedSpace::new(0.5, 1.0).is_err());
        assert!(WeightedSpace::new(f64::NAN, 1.0).is_err());
        assert!(WeightedSpace::new(f64::INFINITY, 1.0).is_ok());
    }

    #[test]
    fn norm_examples() {
        let s = space(2.0, 1.0);
        let zero = SampledFunction::constant(0.0);
        assert_eq!(weighted_norm(&zero, &s, 256).unwrap(), 0.0);
        assert_eq!(
            weighted_norm(&zero, &space(f64::INFINITY, 1.0), 4097).unwrap(),
            0.0
        );
        let one = SampledFunction::constant(1.0);
        assert!((weighted_norm(&one, &s, 256).unwrap() - (16.0f64 / 15.0).sqrt()).abs() < 1e-13);
        let x = SampledFunction::monomial(vec![0.0, 1.0]);
        assert!((weighted_norm(&x, &s, 256).unwrap() - (16.0f64 / 105.0).sqrt()).abs() < 1e-13);
    }

    #[test]
    fn sup_norm_of_weight() {
        // max (1-x^2) |x| is 2/(3 sqrt 3) at x = 1/sqrt 3
        let x = SampledFunction::monomial(vec![0.0, 1.0]);
        let v = weighted_norm(&x, &space(f64::INFINITY, 1.0), 4097).unwrap();
        assert!((v - 2.0 / (3.0 * 3f64.sqrt())).abs() < 1e-6);
    }

    #[test]
    fn norm_errors() {
        let s = space(2.0, 1.0);
        assert!(matches!(
            weighted_norm(&SampledFunction::constant(1.0), &s, 8),
            Err(Error::QuadratureSize { .. })
        ));
        let bad = SampledFunction::new("bad", |x| if x > 0.5 { f64::NAN } else { 0.0 });
        match weighted_norm(&bad, &s, 64) {
            Err(Error::NonFinite { x, .. }) => assert!(x > 0.5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn homogeneity() {
        let f = SampledFunction::new("mix", |x: f64| x.abs() + 0.3 * x * x - 0.1);
        for s in [
            space(1.0, 0.75),
            space(2.0, 1.0),
            space(3.0, 1.0),
            space(f64::INFINITY, 1.2),
        ] {
            let base = weighted_norm(&f, &s, 256).unwrap();
            for c in [-2.0, 0.5, 10.0] {
                let scaled = weighted_norm(&f.scaled(c), &s, 256).unwrap();
                assert!((scaled - c.abs() * base).abs() <= 1e-12 * c.abs() * base);
            }
        }
    }

    #[test]
    fn sup_norm_monotone_under_refinement() {
        let f = SampledFunction::new("wiggle", |x: f64| (7.3 * x).sin() + x.abs());
        let s = space(f64::INFINITY, 1.0);
        let mut prev = 0.0;
        for k in 4..=13 {
            let v = weighted_norm(&f, &s, (1 << k) + 1).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn interior_filter_drops_edge_points() {
        let g = NormGrid::new(&space(f64::INFINITY, 1.0), 4097)
            .unwrap()
            .interior(1e-6);
        assert!(g.nodes.iter().all(|x| 1.0 - x.abs() >= 1e-6));
        assert!(g.len() < 4097 && g.len() > 4000);
        assert_eq!(g.nodes.len(), g.space_weights.len());
    }

    #[test]
    fn sample_cache_is_reused() {
        let f = SampledFunction::monomial(vec![1.0, 2.0]);
        let key = GridKey {
            kind: GridKind::Custom(7),
            size: 2,
        };
        let a = f.samples(key, &[0.0, 1.0]);
        let b = f.samples(key, &[0.0, 1.0]);
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(*a, vec![1.0, 3.0]);
    }
}
