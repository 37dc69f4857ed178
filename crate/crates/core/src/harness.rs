//! Experiment driver: operator property checks, the converse inequality
//! `omega(f, 1/n) <= C/n^2 sum_{nu=1}^n nu E_nu(f)`, its dyadic proof
//! mechanics, and exponent fits for the class-coincidence statement.

use std::fmt;
use std::io::Write;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::approx::{
    best_approx_sequence_with, ApproxConfig, BestApproxResult, Discretization, MONOTONE_SLACK,
    ZERO_ERROR,
};
use crate::error::{Error, Result};
use crate::modulus::{modulus_omega, ModulusConfig};
use crate::numeric::linear_fit;
use crate::orthopoly::{
    chebyshev_node, default_coeff_quadrature, fourier_jacobi_coeffs, JacobiBasis,
};
use crate::translation::{
    exact_quad_size, multiplier_eval, translated_coeffs, uniform_y_grid, Multiplier, Translator,
};
use crate::weighted_space::{SampledFunction, WeightedSpace};

/// Built-in test functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestFunction {
    One,
    X,
    XSquared,
    /// Chebyshev series with coefficients uniform in `[-1, 1]`.
    RandomPoly {
        degree: usize,
        seed: u64,
    },
    Abs,
    /// `sign(x) |x|^(3/2)`.
    SignPow,
    /// `|x - 1/4|`.
    AbsShift,
    /// `sum_k c_k x^k`.
    Monomial(Vec<f64>),
}

impl TestFunction {
    /// Names: `one`, `x`, `x2`, `abs`, `signpow`, `abs-shift`, `randpoly<d>`,
    /// or comma-separated monomial coefficients `c0,c1,...`.
    pub fn parse(spec: &str, seed: u64) -> Result<Self> {
        let s = spec.trim();
        Ok(match s {
            "one" | "1" => TestFunction::One,
            "x" => TestFunction::X,
            "x2" | "x^2" => TestFunction::XSquared,
            "abs" | "|x|" => TestFunction::Abs,
            "signpow" => TestFunction::SignPow,
            "abs-shift" => TestFunction::AbsShift,
            _ => {
                if let Some(d) = s.strip_prefix("randpoly") {
                    let degree = d.parse().map_err(|_| {
                        Error::InvalidParameter(format!("bad random polynomial degree in {s:?}"))
                    })?;
                    TestFunction::RandomPoly { degree, seed }
                } else {
                    let coeffs: std::result::Result<Vec<f64>, _> =
                        s.split(',').map(|c| c.trim().parse::<f64>()).collect();
                    match coeffs {
                        Ok(c) if !c.is_empty() => TestFunction::Monomial(c),
                        _ => {
                            return Err(Error::InvalidParameter(format!("unknown function {s:?}")))
                        }
                    }
                }
            }
        })
    }

    pub fn name(&self) -> String {
        match self {
            TestFunction::One => "one".into(),
            TestFunction::X => "x".into(),
            TestFunction::XSquared => "x2".into(),
            TestFunction::RandomPoly { degree, seed } => format!("randpoly{degree}@{seed}"),
            TestFunction::Abs => "abs".into(),
            TestFunction::SignPow => "signpow".into(),
            TestFunction::AbsShift => "abs-shift".into(),
            TestFunction::Monomial(c) => c
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(","),
        }
    }

    pub fn build(&self) -> SampledFunction {
        let f = match self {
            TestFunction::One => SampledFunction::constant(1.0),
            TestFunction::X => SampledFunction::monomial(vec![0.0, 1.0]),
            TestFunction::XSquared => SampledFunction::monomial(vec![0.0, 0.0, 1.0]),
            TestFunction::RandomPoly { degree, seed } => random_polynomial(*degree, *seed),
            TestFunction::Abs => SampledFunction::new("abs", f64::abs),
            TestFunction::SignPow => {
                SampledFunction::new("signpow", |x: f64| x.signum() * x.abs().powf(1.5))
            }
            TestFunction::AbsShift => SampledFunction::new("abs-shift", |x: f64| (x - 0.25).abs()),
            TestFunction::Monomial(c) => SampledFunction::monomial(c.clone()),
        };
        f.with_label(self.name())
    }

    /// The non-smooth functions used by the converse-inequality experiments.
    pub fn acceptance_set() -> Vec<TestFunction> {
        vec![
            TestFunction::Abs,
            TestFunction::SignPow,
            TestFunction::AbsShift,
        ]
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Chebyshev series of the given degree with seeded uniform `[-1, 1]` coefficients.
pub fn random_polynomial(degree: usize, seed: u64) -> SampledFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<f64> = (0..=degree).map(|_| rng.random_range(-1.0..=1.0)).collect();
    SampledFunction::chebyshev(coeffs).with_label(format!("randpoly{degree}@{seed}"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma1Tolerances {
    pub linearity: f64,
    pub identity: f64,
    pub rank_one: f64,
    pub constant: f64,
    pub multiplier: f64,
}

impl Default for Lemma1Tolerances {
    fn default() -> Self {
        Self {
            linearity: 1e-12,
            identity: 1e-10,
            rank_one: 1e-8,
            constant: 1e-12,
            multiplier: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma1Config {
    /// Highest polynomial degree exercised; at most 20.
    pub n_max: usize,
    /// Interior Chebyshev-Gauss points in `x`.
    pub x_grid: usize,
    /// Equispaced points in `y` on `[-1, 1]`.
    pub y_grid: usize,
    /// Side of the square grid for the rank-one test.
    pub rank_grid: usize,
    pub rank_n_max: usize,
    pub multiplier_degree: usize,
    pub seed: u64,
    pub tolerances: Lemma1Tolerances,
    /// Multiplies the operator prefactor. Diagnostic fault injection; 1 is correct.
    pub prefactor_scale: f64,
}

impl Default for Lemma1Config {
    fn default() -> Self {
        Self {
            n_max: 20,
            x_grid: 17,
            y_grid: 9,
            rank_grid: 24,
            rank_n_max: 12,
            multiplier_degree: 10,
            seed: 7,
            tolerances: Lemma1Tolerances::default(),
            prefactor_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyCheck {
    pub property: u8,
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl PropertyCheck {
    fn new(property: u8, name: &str, max_residual: f64, tolerance: f64) -> Self {
        Self {
            property,
            name: name.into(),
            max_residual,
            tolerance,
            passed: max_residual <= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma1Report {
    pub checks: Vec<PropertyCheck>,
}

impl Lemma1Report {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, property: u8) -> Option<&PropertyCheck> {
        self.checks.iter().find(|c| c.property == property)
    }
}

fn interior_grid(size: usize) -> Vec<f64> {
    (1..=size).rev().map(|j| chebyshev_node(j, size)).collect()
}

fn translator_for(degree: usize, scale: f64) -> Result<Translator> {
    Ok(Translator::new(exact_quad_size(degree).max(16))?.with_prefactor_fault(scale))
}

/// Runs the five operator properties: linearity, `T_1 = I`, the Jacobi
/// eigen-relation (as a rank-one factorization), `T_y 1 = 1`, and the
/// coefficient multiplier identity `a_k(T_y f) = R_k(y) a_k(f)`.
pub fn verify_lemma1(config: &Lemma1Config, multiplier: &Multiplier) -> Result<Lemma1Report> {
    if config.n_max > 20 {
        return Err(Error::InvalidParameter(format!(
            "n_max must be <= 20, got {}",
            config.n_max
        )));
    }
    let tol = config.tolerances;
    let scale = config.prefactor_scale;
    let xs = interior_grid(config.x_grid);
    let ys = uniform_y_grid(config.y_grid);
    let basis = JacobiBasis::ultraspherical_2_2();
    let mut checks = Vec::with_capacity(5);

    // 1. linearity
    {
        let f = random_polynomial(config.n_max, config.seed);
        let g = random_polynomial(config.n_max, config.seed.wrapping_add(1));
        let (a, b) = (0.7, -1.3);
        let combo = SampledFunction::linear_combination(a, &f, b, &g);
        let t = translator_for(config.n_max, scale)?;
        let mut worst = 0.0f64;
        for &y in &ys {
            for &x in &xs {
                let lhs = t.apply(&combo, y, x)?;
                let rhs = a * t.apply(&f, y, x)? + b * t.apply(&g, y, x)?;
                worst = worst.max((lhs - rhs).abs());
            }
        }
        checks.push(PropertyCheck::new(1, "linearity", worst, tol.linearity));
    }

    // 2. T_1 f = f
    {
        let mut worst = 0.0f64;
        let mut functions: Vec<SampledFunction> = (0..=config.n_max)
            .map(|d| SampledFunction::jacobi(basis, d))
            .collect();
        functions.push(random_polynomial(config.n_max, config.seed.wrapping_add(3)));
        for f in &functions {
            let t = translator_for(f.degree().unwrap_or(config.n_max), scale)?;
            for &x in &xs {
                worst = worst.max((t.apply(f, 1.0, x)? - f.eval(x)).abs());
            }
        }
        checks.push(PropertyCheck::new(
            2,
            "identity at y = 1",
            worst,
            tol.identity,
        ));
    }

    // 3. T_y P_n = P_n(x) R_n(y), checked as a rank-one factorization
    {
        let grid = interior_grid(config.rank_grid);
        let worst = (0..=config.n_max.min(config.rank_n_max))
            .into_par_iter()
            .map(|n| rank_one_residual(n, &grid, scale))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0f64, f64::max);
        checks.push(PropertyCheck::new(
            3,
            "Jacobi eigenfunctions",
            worst,
            tol.rank_one,
        ));
    }

    // 4. T_y 1 = 1
    {
        let one = SampledFunction::constant(1.0);
        let t = translator_for(0, scale)?;
        let mut worst = 0.0f64;
        for &y in &ys {
            for &x in &xs {
                worst = worst.max((t.apply(&one, y, x)? - 1.0).abs());
            }
        }
        checks.push(PropertyCheck::new(
            4,
            "constants preserved",
            worst,
            tol.constant,
        ));
    }

    // 5. a_k(T_y f) = R_k(y) a_k(f)
    {
        let degree = config.multiplier_degree.min(config.n_max);
        let f = random_polynomial(degree, config.seed.wrapping_add(2));
        let m = default_coeff_quadrature(degree);
        let plain = fourier_jacobi_coeffs(&f, degree, m)?;
        let t = translator_for(degree, scale)?;
        let worst = if multiplier.validated {
            let mut worst = 0.0f64;
            for &y in &ys {
                let translated = translated_coeffs(&t, &f, y, degree, m)?;
                for k in 0..=degree {
                    let want = multiplier_eval(multiplier, k, y)? * plain.values[k];
                    worst = worst.max((translated.values[k] - want).abs());
                }
            }
            worst
        } else {
            f64::INFINITY
        };
        checks.push(PropertyCheck::new(
            5,
            "coefficient multiplier",
            worst,
            tol.multiplier,
        ));
    }

    Ok(Lemma1Report { checks })
}

/// `max(sigma_2 / sigma_1, profile deviation)` for `A[i][j] = T_{y_j} P_n(x_i)`.
fn rank_one_residual(n: usize, grid: &[f64], scale: f64) -> Result<f64> {
    let basis = JacobiBasis::ultraspherical_2_2();
    let pn = SampledFunction::jacobi(basis, n);
    let t = translator_for(n, scale)?;
    let size = grid.len();
    let mut a = DMatrix::<f64>::zeros(size, size);
    for (j, &y) in grid.iter().enumerate() {
        for (i, &x) in grid.iter().enumerate() {
            a[(i, j)] = t.apply(&pn, y, x)?;
        }
    }
    let svd = a.svd(true, false);
    let sv = &svd.singular_values;
    let (lead, _) = sv
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    let s1 = sv[lead];
    if s1 == 0.0 {
        return Ok(f64::INFINITY);
    }
    let s2 = sv
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != lead)
        .map(|(_, v)| *v)
        .fold(0.0f64, f64::max);
    let u = svd.u.as_ref().expect("requested U").column(lead);
    let profile: Vec<f64> = grid.iter().map(|&x| pn.eval(x)).collect();
    let norm = profile.iter().map(|v| v * v).sum::<f64>().sqrt();
    let dev = |sign: f64| -> f64 {
        profile
            .iter()
            .zip(u.iter())
            .map(|(p, u)| (p / norm - sign * u).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    Ok((s2 / s1).max(dev(1.0).min(dev(-1.0))))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConverseConfig {
    pub modulus: ModulusConfig,
    pub approx: ApproxConfig,
    /// Largest admissible `max(ratio) / median(ratio)`.
    pub ratio_bound: f64,
}

impl Default for ConverseConfig {
    fn default() -> Self {
        Self {
            modulus: ModulusConfig::default(),
            approx: ApproxConfig::default(),
            ratio_bound: 10.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConverseTableRow {
    pub n: usize,
    pub omega: f64,
    pub rhs_sum: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConverseTable {
    pub function: String,
    pub space: WeightedSpace,
    pub rows: Vec<ConverseTableRow>,
    pub max_over_median: f64,
    /// Ratios strictly increasing over the last three rows.
    pub tail_growth: bool,
    /// Every best approximation behind the sums was healthy.
    pub solver_healthy: bool,
    pub bounded: bool,
}

/// Below this a sum of best approximations is treated as zero.
const DEGENERATE_SUM: f64 = 1e-12;
/// Below this a modulus value is treated as zero.
const DEGENERATE_OMEGA: f64 = 1e-10;

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k == 0 {
        return 0.0;
    }
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// `omega(f, 1/n)`, `sum nu E_nu` and their ratio for each `n`.
pub fn converse_table(
    f: &SampledFunction,
    n_list: &[usize],
    space: &WeightedSpace,
    config: &ConverseConfig,
) -> Result<ConverseTable> {
    if n_list.is_empty() || n_list.contains(&0) {
        return Err(Error::InvalidParameter(
            "n list must be non-empty and positive".into(),
        ));
    }
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "n list must be strictly ascending".into(),
        ));
    }
    let n_top = *n_list.last().unwrap();
    let seq = best_approx_sequence_with(f, n_top, space, &config.approx)?;
    let solver_healthy = seq.iter().all(|r| r.healthy());
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let omega = modulus_omega(f, 1.0 / n as f64, space, &config.modulus)
            .map_err(|e| e.context(format!("omega(f, 1/{n})")))?
            .value;
        let rhs_sum: f64 = seq[..n].iter().map(|r| r.n as f64 * r.value).sum();
        let ratio = if rhs_sum <= DEGENERATE_SUM {
            if omega <= DEGENERATE_OMEGA {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            omega * (n * n) as f64 / rhs_sum
        };
        rows.push(ConverseTableRow {
            n,
            omega,
            rhs_sum,
            ratio,
        });
    }
    let ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    let max = ratios.iter().copied().fold(0.0f64, f64::max);
    let med = median(&ratios);
    let max_over_median = if max == 0.0 {
        0.0
    } else if med == 0.0 {
        f64::INFINITY
    } else {
        max / med
    };
    let tail_growth = ratios.len() >= 3 && {
        let t = &ratios[ratios.len() - 3..];
        t[0] < t[1] && t[1] < t[2]
    };
    Ok(ConverseTable {
        function: f.label().to_string(),
        space: *space,
        rows,
        max_over_median,
        tail_growth,
        solver_healthy,
        bounded: max_over_median <= config.ratio_bound && !tail_growth,
    })
}

/// Writes `n,omega,rhs_sum,ratio` rows.
pub fn write_converse_csv<W: Write>(rows: &[ConverseTableRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// The largest `N` with `n/2 < 2^N <= n + 1`.
///
/// When `n + 1` is a power of two the interval holds two powers of two; the
/// larger one is taken.
pub fn dyadic_level(n: usize) -> u32 {
    assert!(n >= 1, "dyadic level needs n >= 1");
    usize::BITS - 1 - (n + 1).leading_zeros()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepCheck {
    /// `k` for the triangle step, `mu` for the block step.
    pub index: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub budget: f64,
    pub holds: bool,
}

impl StepCheck {
    fn new(index: usize, lhs: f64, rhs: f64, budget: f64) -> Self {
        Self {
            index,
            lhs,
            rhs,
            budget,
            holds: lhs <= rhs + budget,
        }
    }
}

/// The successive bounds of the proof chain, each already divided where the
/// chain divides by `n^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockSums {
    /// `E_{2^N}`.
    pub tail: f64,
    /// `n^-2 sum_{mu=1}^N 4^mu ||Q_mu||`.
    pub blocks: f64,
    /// `n^-2 sum_{mu=1}^N 4^mu (E_{2^mu} + E_{2^(mu-1)})`.
    pub triangle: f64,
    /// `n^-2 sum_{mu=0}^{N-1} 4^(mu+1) E_{2^mu}`.
    pub shifted: f64,
    /// `n^-2 sum_{mu=0}^{N} 4^(mu+1) E_{2^mu}`.
    pub dyadic_total: f64,
    /// `n^-2 (4 E_1 + sum_{mu=1}^N sum_{nu=2^(mu-1)}^{2^mu - 1} nu E_nu)`.
    pub regrouped: f64,
    /// `n^-2 sum_{nu=1}^n nu E_nu`.
    pub full: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyadicDecomposition {
    pub n: usize,
    #[serde(rename = "N")]
    pub level: u32,
    /// `||Q_k||` for `k = 0..=N`, with `Q_0 = P_1`.
    pub block_norms: Vec<f64>,
    /// `E_{2^k}` for `k = 0..=N`.
    pub dyadic_errors: Vec<f64>,
    /// `||Q_k|| <= E_{2^k} + E_{2^(k-1)}` for `k = 1..=N`.
    pub triangle_steps: Vec<StepCheck>,
    /// `4^(mu-1) E_{2^mu} <= sum_{nu=2^(mu-1)}^{2^mu - 1} nu E_nu` for `mu = 1..=N`.
    pub block_steps: Vec<StepCheck>,
    pub block_sums: BlockSums,
    /// `E_1, ..., E_{max(n, 2^N)}`.
    pub errors: Vec<f64>,
}

impl DyadicDecomposition {
    pub fn all_hold(&self) -> bool {
        self.triangle_steps.iter().all(|s| s.holds) && self.block_steps.iter().all(|s| s.holds)
    }
}

/// Dyadic blocks `Q_k = P_{2^k} - P_{2^(k-1)}` of near-best polynomials and the
/// two combinatorial steps of the converse proof.
pub fn dyadic_bound(
    f: &SampledFunction,
    n: usize,
    space: &WeightedSpace,
    config: &ApproxConfig,
) -> Result<DyadicDecomposition> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n must be >= 2, got {n}")));
    }
    let level = dyadic_level(n);
    let top = n.max(1 << level);
    let seq = best_approx_sequence_with(f, top, space, config)?;
    let disc = Discretization::new(space, config)?;
    Ok(decompose(n, level, &seq, &disc))
}

fn decompose(
    n: usize,
    level: u32,
    seq: &[BestApproxResult],
    disc: &Discretization,
) -> DyadicDecomposition {
    let e = |nu: usize| seq[nu - 1].value;
    let gap = |nu: usize| seq[nu - 1].residual_norm_gap;
    let big_n = level as usize;
    let pow = |k: usize| 1usize << k;

    let mut block_norms = Vec::with_capacity(big_n + 1);
    block_norms.push(disc.poly_norm(&seq[0].coefficients));
    for k in 1..=big_n {
        let hi = &seq[pow(k) - 1].coefficients;
        let lo = &seq[pow(k - 1) - 1].coefficients;
        let diff: Vec<f64> = (0..hi.len())
            .map(|i| hi[i] - lo.get(i).copied().unwrap_or(0.0))
            .collect();
        block_norms.push(disc.poly_norm(&diff));
    }
    let dyadic_errors: Vec<f64> = (0..=big_n).map(|k| e(pow(k))).collect();

    let triangle_steps = (1..=big_n)
        .map(|k| {
            let rhs = e(pow(k)) + e(pow(k - 1));
            let budget = 2.0 * gap(pow(k)).max(gap(pow(k - 1))) + 1e-12 * (1.0 + rhs);
            StepCheck::new(k, block_norms[k], rhs, budget)
        })
        .collect();

    let block_steps = (1..=big_n)
        .map(|mu| {
            let block = pow(mu - 1)..pow(mu);
            let rhs: f64 = block.clone().map(|nu| nu as f64 * e(nu)).sum();
            let slack: f64 = block.map(|nu| nu as f64 * (MONOTONE_SLACK + gap(nu))).sum();
            let lhs = pow(2 * (mu - 1)) as f64 * e(pow(mu));
            let budget = slack + pow(2 * (mu - 1)) as f64 * gap(pow(mu));
            StepCheck::new(mu, lhs, rhs, budget)
        })
        .collect();

    let inv_n2 = 1.0 / (n * n) as f64;
    let four = |k: usize| 4f64.powi(k as i32);
    let block_sums = BlockSums {
        tail: e(pow(big_n)),
        blocks: inv_n2
            * (1..=big_n)
                .map(|mu| four(mu) * block_norms[mu])
                .sum::<f64>(),
        triangle: inv_n2
            * (1..=big_n)
                .map(|mu| four(mu) * (e(pow(mu)) + e(pow(mu - 1))))
                .sum::<f64>(),
        shifted: inv_n2 * (0..big_n).map(|mu| four(mu + 1) * e(pow(mu))).sum::<f64>(),
        dyadic_total: inv_n2 * (0..=big_n).map(|mu| four(mu + 1) * e(pow(mu))).sum::<f64>(),
        regrouped: inv_n2
            * (4.0 * e(1)
                + (1..=big_n)
                    .flat_map(|mu| pow(mu - 1)..pow(mu))
                    .map(|nu| nu as f64 * e(nu))
                    .sum::<f64>()),
        full: inv_n2 * (1..=n).map(|nu| nu as f64 * e(nu)).sum::<f64>(),
    };

    DyadicDecomposition {
        n,
        level,
        block_norms,
        dyadic_errors,
        triangle_steps,
        block_steps,
        block_sums,
        errors: seq.iter().map(|r| r.value).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassFitConfig {
    /// Smallest `n` included in both fits.
    pub n_min: usize,
    pub modulus: ModulusConfig,
    pub approx: ApproxConfig,
    /// Largest admissible `|approx exponent - modulus exponent|`.
    pub max_difference: f64,
}

impl Default for ClassFitConfig {
    fn default() -> Self {
        Self {
            n_min: 4,
            modulus: ModulusConfig::default(),
            approx: ApproxConfig::default(),
            max_difference: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassFit {
    pub function: String,
    pub space: WeightedSpace,
    pub n_values: Vec<usize>,
    pub approx_errors: Vec<f64>,
    pub modulus_values: Vec<f64>,
    /// `-slope` of `log E_n` against `log n`.
    pub approx_exponent: Option<f64>,
    /// Slope of `log omega(f, 1/n)` against `log(1/n)`.
    pub modulus_exponent: Option<f64>,
    pub difference: Option<f64>,
    /// Why no fit was possible, if so.
    pub degenerate: Option<String>,
}

impl ClassFit {
    pub fn agrees(&self, max_difference: f64) -> bool {
        self.difference.is_some_and(|d| d.abs() <= max_difference)
    }
}

/// Fits power laws `E_n ~ n^-a` and `omega(f, delta) ~ delta^b` over
/// `n = n_min..=n_max`, `delta = 1/n`.
pub fn class_fit(
    f: &SampledFunction,
    space: &WeightedSpace,
    n_max: usize,
    config: &ClassFitConfig,
) -> Result<ClassFit> {
    if n_max < config.n_min + 1 || config.n_min == 0 {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= n_min < n_max, got n_min = {}, n_max = {n_max}",
            config.n_min
        )));
    }
    let n_values: Vec<usize> = (config.n_min..=n_max).collect();
    let seq = best_approx_sequence_with(f, n_max, space, &config.approx)?;
    let approx_errors: Vec<f64> = n_values.iter().map(|&n| seq[n - 1].value).collect();
    let mut out = ClassFit {
        function: f.label().to_string(),
        space: *space,
        n_values: n_values.clone(),
        approx_errors: approx_errors.clone(),
        modulus_values: Vec::new(),
        approx_exponent: None,
        modulus_exponent: None,
        difference: None,
        degenerate: None,
    };
    if let Some(i) = approx_errors.iter().position(|&e| e <= ZERO_ERROR) {
        out.degenerate = Some(format!("E_{} vanishes (polynomial input)", n_values[i]));
        return Ok(out);
    }
    let modulus_values = n_values
        .par_iter()
        .map(|&n| modulus_omega(f, 1.0 / n as f64, space, &config.modulus).map(|r| r.value))
        .collect::<Result<Vec<f64>>>()?;
    out.modulus_values = modulus_values.clone();
    if let Some(i) = modulus_values.iter().position(|&w| w <= DEGENERATE_OMEGA) {
        out.degenerate = Some(format!("omega(f, 1/{}) vanishes", n_values[i]));
        return Ok(out);
    }
    let log_n: Vec<f64> = n_values.iter().map(|&n| (n as f64).ln()).collect();
    let log_e: Vec<f64> = approx_errors.iter().map(|e| e.ln()).collect();
    let log_delta: Vec<f64> = log_n.iter().map(|l| -l).collect();
    let log_w: Vec<f64> = modulus_values.iter().map(|w| w.ln()).collect();
    let a = linear_fit(&log_n, &log_e).map(|(s, _)| -s);
    let b = linear_fit(&log_delta, &log_w).map(|(s, _)| s);
    out.approx_exponent = a;
    out.modulus_exponent = b;
    out.difference = a.zip(b).map(|(a, b)| a - b);
    Ok(out)
}
