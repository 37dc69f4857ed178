//! The first-order modulus of smoothness
//! `omega(f, delta) = sup_{|t| <= delta} || hat T_t f - f ||`.
//!
//! The supremum is a maximum over a uniform, odd-sized grid on
//! `[-delta, delta]`. Both signs of `t` are scanned. Every report records the
//! grid parameters it was computed with.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::translation::{default_quad_size, Translator, EDGE_EPS};
use crate::weighted_space::{
    validate_params, NormGrid, SampledFunction, WeightedSpace, DEFAULT_NORM_RESOLUTION,
    DEFAULT_SUP_RESOLUTION,
};

/// Slack allowed when checking that a curve is non-decreasing in `delta`.
pub const CURVE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusConfig {
    /// Odd, at least 3.
    pub t_grid: usize,
    /// Gauss-Chebyshev size; `None` picks an exact size for polynomials and
    /// 128 otherwise.
    pub quad_size: Option<usize>,
    /// `None` means 256 Gauss-Legendre nodes (finite `p`) or a 4097-point
    /// Chebyshev-Lobatto grid (`p = inf`).
    pub norm_resolution: Option<usize>,
}

impl Default for ModulusConfig {
    fn default() -> Self {
        Self {
            t_grid: 33,
            quad_size: None,
            norm_resolution: None,
        }
    }
}

impl ModulusConfig {
    fn resolution(&self, space: &WeightedSpace) -> usize {
        self.norm_resolution.unwrap_or(if space.is_sup() {
            DEFAULT_SUP_RESOLUTION
        } else {
            DEFAULT_NORM_RESOLUTION
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusReport {
    pub delta: f64,
    pub value: f64,
    pub argmax_t: f64,
    pub t_grid_size: usize,
    pub norm_resolution: usize,
    pub quad_size: usize,
    /// The scan record: `t` values and `||hat T_t f - f||` at each.
    pub t_values: Vec<f64>,
    pub norms: Vec<f64>,
    /// Cleared by [`modulus_curve`] when this value drops below its predecessor.
    pub monotone: bool,
}

pub fn modulus_omega(
    f: &SampledFunction,
    delta: f64,
    space: &WeightedSpace,
    config: &ModulusConfig,
) -> Result<ModulusReport> {
    if !delta.is_finite() || delta < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "delta must be >= 0, got {delta}"
        )));
    }
    if config.t_grid < 3 || config.t_grid.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "t-grid size must be odd and >= 3, got {}",
            config.t_grid
        )));
    }
    let verdict = validate_params(space, None);
    if !verdict.is_valid() {
        return Err(Error::InvalidParameter(format!("{space}: {verdict}")));
    }
    let resolution = config.resolution(space);
    let quad_size = config.quad_size.unwrap_or_else(|| default_quad_size(f));
    let half = (config.t_grid - 1) / 2;
    let t_values: Vec<f64> = (0..config.t_grid)
        .map(|k| delta * (k as f64 - half as f64) / half as f64)
        .collect();

    if delta == 0.0 {
        // hat T_0 is the identity.
        return Ok(ModulusReport {
            delta,
            value: 0.0,
            argmax_t: 0.0,
            t_grid_size: config.t_grid,
            norm_resolution: resolution,
            quad_size,
            norms: vec![0.0; t_values.len()],
            t_values,
            monotone: true,
        });
    }

    let grid = NormGrid::new(space, resolution)?.interior(EDGE_EPS);
    let base = f.samples(grid.key, &grid.nodes);
    let translator = Translator::new(quad_size)?;
    let norms: Vec<f64> = t_values
        .par_iter()
        .map(|&t| {
            let diff: Vec<f64> = grid
                .nodes
                .iter()
                .zip(base.iter())
                .map(|(&x, &fx)| Ok(translator.apply_trig(f, t, x)? - fx))
                .collect::<Result<_>>()?;
            grid.norm_of(&diff)
        })
        .collect::<Result<_>>()?;

    let mut best = 0;
    for (k, v) in norms.iter().enumerate() {
        if *v > norms[best] {
            best = k;
        }
    }
    Ok(ModulusReport {
        delta,
        value: norms[best],
        argmax_t: t_values[best],
        t_grid_size: config.t_grid,
        norm_resolution: resolution,
        quad_size,
        t_values,
        norms,
        monotone: true,
    })
}

/// Reports for ascending positive `deltas`; entries whose value drops below
/// the previous one by more than [`CURVE_SLACK`] get `monotone = false`.
pub fn modulus_curve(
    f: &SampledFunction,
    deltas: &[f64],
    space: &WeightedSpace,
    config: &ModulusConfig,
) -> Result<Vec<ModulusReport>> {
    if deltas.iter().any(|d| d.is_nan() || *d <= 0.0) {
        return Err(Error::InvalidParameter("deltas must be positive".into()));
    }
    if deltas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter(
            "deltas must be strictly ascending".into(),
        ));
    }
    let mut reports = deltas
        .iter()
        .map(|&d| modulus_omega(f, d, space, config))
        .collect::<Result<Vec<_>>>()?;
    for i in 1..reports.len() {
        if reports[i].value < reports[i - 1].value - CURVE_SLACK {
            reports[i].monotone = false;
        }
    }
    Ok(reports)
}

/// Writes `delta,omega,argmax_t` rows.
pub fn write_curve_csv<W: Write>(reports: &[ModulusReport], out: W) -> Result<()> {
    #[derive(Serialize)]
    struct Row {
        delta: f64,
        omega: f64,
        argmax_t: f64,
    }
    let mut w = csv::Writer::from_writer(out);
    for r in reports {
        w.serialize(Row {
            delta: r.delta,
            omega: r.value,
            argmax_t: r.argmax_t,
        })?;
    }
    w.flush()?;
    Ok(())
}
