//! `asymod`: experiment driver.
//!
//! Exit codes: 0 when every checked property holds, 1 when one fails, 2 on a
//! usage error (bad flags or inadmissible parameters).

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use asymod_core::approx::{best_approx_sequence_with, write_sequence_csv, ApproxConfig};
use asymod_core::harness::{
    class_fit, converse_table, dyadic_bound, verify_lemma1, write_converse_csv, ClassFitConfig,
    ConverseConfig, Lemma1Config, TestFunction,
};
use asymod_core::modulus::{modulus_curve, write_curve_csv, ModulusConfig};
use asymod_core::translation::{
    calibrate_multiplier, uniform_y_grid, Multiplier, MultiplierCandidate,
};
use asymod_core::{validate_params, Error, WeightedSpace};

#[derive(Parser)]
#[command(
    name = "asymod",
    version,
    about = "Generalized translation, modulus of smoothness and weighted best approximation experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the five operator properties.
    VerifyLemma1 {
        #[command(flatten)]
        common: Common,
        /// Multiply the operator prefactor (fault injection).
        #[arg(long, default_value_t = 1.0)]
        fault_scale: f64,
    },
    /// Ratios omega(f, 1/n) n^2 / sum nu E_nu.
    ConverseTable {
        #[command(flatten)]
        common: Common,
        /// Comma-separated ascending n values; default is powers of two up to --n-max.
        #[arg(long, value_delimiter = ',')]
        n_list: Option<Vec<usize>>,
    },
    /// Dyadic block decomposition and the proof's inequality steps.
    Dyadic {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Power-law fits of E_n and omega(f, 1/n).
    ClassFit {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 4)]
        n_min: usize,
    },
    /// Select the closed form of R_n(y) against quadrature fits.
    CalibrateMultiplier {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 17)]
        y_points: usize,
    },
    /// The sequence E_1, ..., E_{n-max}.
    BestApprox {
        #[command(flatten)]
        common: Common,
    },
    /// omega(f, delta) over a list of delta values.
    Modulus {
        #[command(flatten)]
        common: Common,
        /// Comma-separated ascending positive deltas; default 1/n-max, ..., 1/2, 1.
        #[arg(long, value_delimiter = ',')]
        deltas: Option<Vec<f64>>,
    },
}

#[derive(Args)]
struct Common {
    /// Exponent p >= 1, or `inf`.
    #[arg(long, default_value = "2", value_parser = parse_p)]
    p: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// one, x, x2, abs, signpow, abs-shift, randpoly<d>, or monomial coefficients c0,c1,...
    #[arg(long, default_value = "abs")]
    function: String,
    #[arg(long)]
    n_max: Option<usize>,
    /// Odd number of t values scanned by the modulus.
    #[arg(long, default_value_t = 33)]
    t_grid: usize,
    /// Gauss-Chebyshev size of the operator; default depends on the function.
    #[arg(long)]
    quad_size: Option<usize>,
    /// Directory for output files; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn parse_p(s: &str) -> Result<f64, String> {
    match s.trim() {
        "inf" | "infinity" | "Inf" | "∞" => Ok(f64::INFINITY),
        v => v.parse::<f64>().map_err(|e| e.to_string()),
    }
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::Domain { .. } | Error::QuadratureSize { .. } => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type Outcome = Result<bool, Failure>;

impl Common {
    fn space(&self) -> Result<WeightedSpace, Failure> {
        let space = WeightedSpace::new(self.p, self.alpha)?;
        let verdict = validate_params(&space, None);
        if !verdict.is_valid() {
            return Err(Failure::Usage(format!("{space}: {verdict}")));
        }
        Ok(space)
    }

    fn function(&self) -> Result<TestFunction, Failure> {
        Ok(TestFunction::parse(&self.function, self.seed)?)
    }

    fn modulus(&self) -> ModulusConfig {
        ModulusConfig {
            t_grid: self.t_grid,
            quad_size: self.quad_size,
            norm_resolution: None,
        }
    }

    /// Writes `name.csv` or `name.json` under `--out`, or to stdout.
    fn emit<T: Serialize>(
        &self,
        name: &str,
        value: &T,
        csv_body: impl FnOnce(&mut dyn Write) -> asymod_core::Result<()>,
    ) -> Result<(), Failure> {
        let mut sink: Box<dyn Write> = match &self.out {
            Some(dir) => {
                fs::create_dir_all(dir)?;
                let ext = if self.format == Format::Csv {
                    "csv"
                } else {
                    "json"
                };
                let path = dir.join(format!("{name}.{ext}"));
                eprintln!("writing {}", path.display());
                Box::new(io::BufWriter::new(fs::File::create(path)?))
            }
            None => Box::new(io::stdout().lock()),
        };
        match self.format {
            Format::Json => {
                let text = serde_json::to_string_pretty(value)
                    .map_err(|e| Failure::Runtime(e.to_string()))?;
                writeln!(sink, "{text}")?;
            }
            Format::Csv => csv_body(&mut sink)?,
        }
        sink.flush()?;
        Ok(())
    }
}

fn write_rows<T: Serialize>(
    rows: impl IntoIterator<Item = T>,
    out: &mut dyn Write,
) -> asymod_core::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn pass_fail(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::VerifyLemma1 {
            common,
            fault_scale,
        } => {
            let config = Lemma1Config {
                n_max: common.n_max.unwrap_or(20),
                seed: common.seed,
                prefactor_scale: fault_scale,
                ..Lemma1Config::default()
            };
            let multiplier = Multiplier::shipped()?;
            let report = verify_lemma1(&config, &multiplier)?;
            for c in &report.checks {
                eprintln!(
                    "property {} {}: {} (max residual {:.3e}, tolerance {:.0e})",
                    c.property,
                    c.name,
                    pass_fail(c.passed),
                    c.max_residual,
                    c.tolerance
                );
            }
            common.emit("lemma1", &report, |out| write_rows(&report.checks, out))?;
            Ok(report.all_passed())
        }
        Command::ConverseTable { common, n_list } => {
            let space = common.space()?;
            let f = common.function()?.build();
            let n_list = n_list.unwrap_or_else(|| {
                let top = common.n_max.unwrap_or(64);
                (2..)
                    .map(|k| 1usize << k)
                    .take_while(|&n| n <= top)
                    .collect()
            });
            let config = ConverseConfig {
                modulus: common.modulus(),
                ..ConverseConfig::default()
            };
            let table = converse_table(&f, &n_list, &space, &config)?;
            eprintln!(
                "{} in {space}: max/median {:.3}, tail growth {}, solver healthy {}: {}",
                table.function,
                table.max_over_median,
                table.tail_growth,
                table.solver_healthy,
                pass_fail(table.bounded)
            );
            common.emit("converse_table", &table, |out| {
                write_converse_csv(&table.rows, out)
            })?;
            Ok(table.bounded)
        }
        Command::Dyadic { common, n } => {
            let space = common.space()?;
            let f = common.function()?.build();
            let n = n.or(common.n_max).unwrap_or(64);
            let d = dyadic_bound(&f, n, &space, &ApproxConfig::default())?;
            #[derive(Serialize)]
            struct Row {
                k: usize,
                block_norm: f64,
                #[serde(rename = "E_2k")]
                dyadic_error: f64,
                triangle_holds: Option<bool>,
                block_holds: Option<bool>,
            }
            let rows = (0..=d.level as usize).map(|k| Row {
                k,
                block_norm: d.block_norms[k],
                dyadic_error: d.dyadic_errors[k],
                triangle_holds: k.checked_sub(1).map(|i| d.triangle_steps[i].holds),
                block_holds: k.checked_sub(1).map(|i| d.block_steps[i].holds),
            });
            eprintln!(
                "n = {n}, N = {}: steps {}",
                d.level,
                pass_fail(d.all_hold())
            );
            common.emit("dyadic", &d, |out| write_rows(rows, out))?;
            Ok(d.all_hold())
        }
        Command::ClassFit { common, n_min } => {
            let space = common.space()?;
            let f = common.function()?.build();
            let config = ClassFitConfig {
                n_min,
                modulus: common.modulus(),
                ..ClassFitConfig::default()
            };
            let fit = class_fit(&f, &space, common.n_max.unwrap_or(64), &config)?;
            let ok = match (&fit.degenerate, fit.difference) {
                (Some(why), _) => {
                    eprintln!("degenerate fit: {why}");
                    true
                }
                (None, Some(d)) => {
                    let ok = d.abs() <= config.max_difference;
                    eprintln!(
                        "approximation exponent {:.4}, modulus exponent {:.4}, difference {d:.4}: {}",
                        fit.approx_exponent.unwrap_or(f64::NAN),
                        fit.modulus_exponent.unwrap_or(f64::NAN),
                        pass_fail(ok)
                    );
                    ok
                }
                (None, None) => false,
            };
            #[derive(Serialize)]
            struct Row {
                n: usize,
                #[serde(rename = "E_n")]
                error: f64,
                omega: Option<f64>,
            }
            let rows = fit.n_values.iter().enumerate().map(|(i, &n)| Row {
                n,
                error: fit.approx_errors[i],
                omega: fit.modulus_values.get(i).copied(),
            });
            common.emit("class_fit", &fit, |out| write_rows(rows, out))?;
            Ok(ok)
        }
        Command::CalibrateMultiplier { common, y_points } => {
            if y_points < 2 {
                return Err(Failure::Usage("--y-points must be >= 2".into()));
            }
            let report = calibrate_multiplier(
                &MultiplierCandidate::default_set(),
                common.n_max.unwrap_or(8),
                &uniform_y_grid(y_points),
            )?;
            for c in &report.candidates {
                eprintln!(
                    "{}: max residual {:.3e}{}",
                    c.candidate,
                    c.max_residual,
                    if c.matches { " (match)" } else { "" }
                );
            }
            let ok = report.selected.is_some();
            eprintln!("unique validated candidate: {}", pass_fail(ok));
            #[derive(Serialize)]
            struct Row {
                candidate: String,
                max_residual: f64,
                matches: bool,
            }
            let rows = report.candidates.iter().map(|c| Row {
                candidate: c.candidate.to_string(),
                max_residual: c.max_residual,
                matches: c.matches,
            });
            common.emit("multiplier_calibration", &report, |out| {
                write_rows(rows, out)
            })?;
            Ok(ok)
        }
        Command::BestApprox { common } => {
            let space = common.space()?;
            let f = common.function()?.build();
            let seq = best_approx_sequence_with(
                &f,
                common.n_max.unwrap_or(16),
                &space,
                &ApproxConfig::default(),
            )?;
            let ok = seq.iter().all(|r| r.healthy());
            eprintln!(
                "{} entries in {space}, all healthy: {}",
                seq.len(),
                pass_fail(ok)
            );
            common.emit("best_approx", &seq, |out| write_sequence_csv(&seq, out))?;
            Ok(ok)
        }
        Command::Modulus { common, deltas } => {
            let space = common.space()?;
            let f = common.function()?.build();
            let deltas = deltas.unwrap_or_else(|| {
                let top = common.n_max.unwrap_or(64);
                (1..=top).rev().map(|n| 1.0 / n as f64).collect()
            });
            let curve = modulus_curve(&f, &deltas, &space, &common.modulus())?;
            let ok = curve.iter().all(|r| r.monotone);
            eprintln!("{} deltas, non-decreasing: {}", curve.len(), pass_fail(ok));
            common.emit("modulus", &curve, |out| write_curve_csv(&curve, out))?;
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
