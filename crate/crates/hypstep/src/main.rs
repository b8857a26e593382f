//! Command-line interface: deterministic CSV/JSON exports of scattering
//! amplitudes, the anti-bound pole ladder, wavefunctions, SUSY partner
//! tables, Wigner and classical time delays, and the self-check suite.
//!
//! Exit codes: 0 success, 1 configuration error, 2 numerical failure,
//! 3 verification failure.

use std::fmt::Write as _;
use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;

use hypstep::delay::{self, AmplitudeKind};
use hypstep::model::{self, PotentialParams};
use hypstep::scattering;
use hypstep::susy::SusyChain;
use hypstep::verify;

#[derive(Parser)]
#[command(name = "hypstep", version, about = "Exact scattering for the hyperbolic step potential")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct PotentialArgs {
    /// barrier height V0 (> 0)
    #[arg(long)]
    v0: f64,
    /// barrier width alpha (> 0)
    #[arg(long)]
    alpha: f64,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// output path; stdout when omitted
    #[arg(long)]
    out: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Reflection/transmission amplitudes and coefficients over a k-grid
    Scatter {
        #[command(flatten)]
        potential: PotentialArgs,
        #[arg(long)]
        kmin: f64,
        #[arg(long)]
        kmax: f64,
        #[arg(long)]
        points: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Anti-bound pole ladder with the admissibility flag
    Poles {
        #[command(flatten)]
        potential: PotentialArgs,
        #[arg(long)]
        nmax: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Scattering wavefunction at fixed k (unit incidence) or an anti-bound state
    Wavefunction {
        #[command(flatten)]
        potential: PotentialArgs,
        /// real incident momentum (scattering solution with unit incidence)
        #[arg(long, conflicts_with = "antibound")]
        k: Option<f64>,
        /// anti-bound index n (normalized to 1 at x = 0)
        #[arg(long)]
        antibound: Option<u32>,
        #[arg(long)]
        xmin: f64,
        #[arg(long)]
        xmax: f64,
        #[arg(long)]
        points: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Partner potential and normalized bound states of the order-n chain
    Susy {
        #[command(flatten)]
        potential: PotentialArgs,
        #[arg(long)]
        order: u32,
        #[arg(long)]
        xmin: f64,
        #[arg(long)]
        xmax: f64,
        #[arg(long)]
        points: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Wigner time delays (reflection and transmission) per chain order
    Delay {
        #[command(flatten)]
        potential: PotentialArgs,
        #[arg(long)]
        kmin: f64,
        #[arg(long)]
        kmax: f64,
        #[arg(long)]
        points: usize,
        /// highest chain order to report (columns for orders 0..=order)
        #[arg(long, default_value_t = 2)]
        order: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Classical reflection/transmission delays over an energy grid
    Classical {
        #[command(flatten)]
        potential: PotentialArgs,
        #[arg(long)]
        emin: f64,
        #[arg(long)]
        emax: f64,
        #[arg(long)]
        points: usize,
        /// asymptotic start distance d (defaults to 30 alpha)
        #[arg(long)]
        distance: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the full invariant suite; nonzero exit on any failure
    Verify,
}

enum CliError {
    Config(String),
    Numerical(String),
    VerifyFailed,
}

impl From<hypstep::Error> for CliError {
    fn from(e: hypstep::Error) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Numerical(format!("io error: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // help/version requests are not configuration errors
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::VerifyFailed) => ExitCode::from(3),
    }
}

fn params_of(a: &PotentialArgs) -> Result<PotentialParams, CliError> {
    PotentialParams::new(a.v0, a.alpha).map_err(|e| CliError::Config(e.to_string()))
}

fn grid(min: f64, max: f64, points: usize, what: &str) -> Result<Vec<f64>, CliError> {
    if !(min < max) || points < 2 {
        return Err(CliError::Config(format!(
            "{what} grid requires min < max and points >= 2 (got [{min}, {max}] x {points})"
        )));
    }
    Ok((0..points)
        .map(|i| min + (max - min) * i as f64 / (points - 1) as f64)
        .collect())
}

/// Full round-trip precision: 17 significant digits.
fn fmt(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.16e}")
    }
}

struct Table {
    header: String,
    columns: Vec<&'static str>,
    rows: Vec<Vec<f64>>,
}

fn emit(table: &Table, output: &OutputArgs) -> Result<(), CliError> {
    let text = match output.format {
        Format::Csv => {
            let mut s = String::new();
            let _ = writeln!(s, "# {} columns: {}", table.header, table.columns.join(","));
            for row in &table.rows {
                let line: Vec<String> = row.iter().map(|&x| fmt(x)).collect();
                let _ = writeln!(s, "{}", line.join(","));
            }
            s
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = table
                .rows
                .iter()
                .map(|row| {
                    serde_json::Value::Array(
                        row.iter()
                            .map(|&x| {
                                serde_json::Number::from_f64(x)
                                    .map(serde_json::Value::Number)
                                    .unwrap_or(serde_json::Value::Null)
                            })
                            .collect(),
                    )
                })
                .collect();
            let doc = serde_json::json!({
                "config": table.header,
                "columns": table.columns,
                "rows": rows,
            });
            let mut s = serde_json::to_string_pretty(&doc).expect("json");
            s.push('\n');
            s
        }
    };
    match &output.out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Scatter { potential, kmin, kmax, points, output } => {
            let p = params_of(&potential)?;
            if kmin <= 0.0 {
                return Err(CliError::Config("kmin must be > 0".into()));
            }
            let ks: Vec<f64> = grid(kmin, kmax, points, "k")?
                .into_iter()
                .filter(|k| (k - p.threshold()).abs() >= 1e-9)
                .collect();
            let rows: Result<Vec<Vec<f64>>, hypstep::Error> = ks
                .par_iter()
                .map(|&k| {
                    let rec = scattering::amplitudes(k, &p)?;
                    Ok(vec![
                        k,
                        rec.reflection,
                        rec.transmission,
                        rec.r.re,
                        rec.r.im,
                        rec.t.re,
                        rec.t.im,
                        rec.delta_r,
                        rec.delta_t,
                        if rec.evanescent { 1.0 } else { 0.0 },
                    ])
                })
                .collect();
            emit(
                &Table {
                    header: format!(
                        "hypstep scatter v0={} alpha={} kmin={} kmax={} points={}",
                        p.v0(), p.alpha(), kmin, kmax, points
                    ),
                    columns: vec![
                        "k", "R", "T", "re_r", "im_r", "re_t", "im_t", "delta_r", "delta_t",
                        "evanescent",
                    ],
                    rows: rows?,
                },
                &output,
            )
        }
        Command::Poles { potential, nmax, output } => {
            let p = params_of(&potential)?;
            if nmax == 0 {
                return Err(CliError::Config("nmax must be >= 1".into()));
            }
            let mut rows = Vec::new();
            for n in 1..=nmax {
                let cert = scattering::pole_admissibility_check(n, &p);
                let (k, kprime) = scattering::pole_momenta(n, &p);
                rows.push(vec![
                    n as f64,
                    k.im,
                    kprime.im,
                    (k * k).re,
                    if cert.admissible { 1.0 } else { 0.0 },
                ]);
            }
            emit(
                &Table {
                    header: format!(
                        "hypstep poles v0={} alpha={} nmax={}",
                        p.v0(), p.alpha(), nmax
                    ),
                    columns: vec!["n", "im_k", "im_kprime", "energy", "admissible"],
                    rows,
                },
                &output,
            )
        }
        Command::Wavefunction { potential, k, antibound, xmin, xmax, points, output } => {
            let p = params_of(&potential)?;
            let xs = grid(xmin, xmax, points, "x")?;
            let (label, rows) = match (k, antibound) {
                (Some(k), None) => {
                    if k <= 0.0 {
                        return Err(CliError::Config("k must be > 0".into()));
                    }
                    let rec = scattering::amplitudes(k, &p)?;
                    let kc = Complex64::new(k, 0.0);
                    let zero = Complex64::new(0.0, 0.0);
                    let rows: Result<Vec<Vec<f64>>, hypstep::Error> = xs
                        .par_iter()
                        .map(|&x| {
                            let psi = model::wavefunction(x, kc, rec.t, zero, &p)?;
                            Ok(vec![x, psi.re, psi.im])
                        })
                        .collect();
                    (format!("k={k}"), rows?)
                }
                (None, Some(n)) => {
                    let rows: Result<Vec<Vec<f64>>, hypstep::Error> = xs
                        .par_iter()
                        .map(|&x| {
                            let psi = model::antibound_wavefunction(n, x, &p)?;
                            Ok(vec![x, psi.re, psi.im])
                        })
                        .collect();
                    (format!("antibound={n}"), rows?)
                }
                _ => {
                    return Err(CliError::Config(
                        "exactly one of --k or --antibound is required".into(),
                    ))
                }
            };
            emit(
                &Table {
                    header: format!(
                        "hypstep wavefunction v0={} alpha={} {} xmin={} xmax={} points={}",
                        p.v0(), p.alpha(), label, xmin, xmax, points
                    ),
                    columns: vec!["x", "re_psi", "im_psi"],
                    rows,
                },
                &output,
            )
        }
        Command::Susy { potential, order, xmin, xmax, points, output } => {
            let p = params_of(&potential)?;
            let chain = SusyChain::new(order, &p)?;
            let xs = grid(xmin, xmax, points, "x")?;
            let mut columns = vec!["x", "v", "v_partner"];
            let names: Vec<String> = (1..=order).map(|s| format!("psi_{s}")).collect();
            let leaked: Vec<&'static str> =
                names.into_iter().map(|s| &*Box::leak(s.into_boxed_str())).collect();
            columns.extend(leaked);
            let rows: Vec<Vec<f64>> = xs
                .iter()
                .map(|&x| {
                    let mut row = vec![x, model::potential(x, &p), chain.partner_potential(x)];
                    for s in 1..=order {
                        row.push(chain.bound_state_value(s, x));
                    }
                    row
                })
                .collect();
            let energies: Vec<String> = chain
                .bound_states()
                .iter()
                .map(|b| format!("E({})={}", b.index, fmt(b.energy)))
                .collect();
            emit(
                &Table {
                    header: format!(
                        "hypstep susy v0={} alpha={} order={} noded_seed={} {} xmin={} xmax={} points={}",
                        p.v0(), p.alpha(), order, chain.has_noded_seed(), energies.join(" "),
                        xmin, xmax, points
                    ),
                    columns,
                    rows,
                },
                &output,
            )
        }
        Command::Delay { potential, kmin, kmax, points, order, output } => {
            let p = params_of(&potential)?;
            if kmin <= 0.0 {
                return Err(CliError::Config("kmin must be > 0".into()));
            }
            let ks: Vec<f64> = grid(kmin, kmax, points, "k")?
                .into_iter()
                .filter(|k| (k - p.threshold()).abs() >= 1e-9)
                .collect();
            let mut columns: Vec<&'static str> = vec!["k", "in_threshold_window"];
            for o in 0..=order {
                for kind in ["tau_r", "tau_t"] {
                    columns.push(Box::leak(format!("{kind}_{o}").into_boxed_str()));
                }
            }
            let rows: Result<Vec<Vec<f64>>, hypstep::Error> = ks
                .par_iter()
                .map(|&k| {
                    let flagged = delay::in_threshold_window(k, &p);
                    let mut row = vec![k, if flagged { 1.0 } else { 0.0 }];
                    for o in 0..=order {
                        if flagged {
                            row.push(f64::NAN);
                            row.push(f64::NAN);
                            continue;
                        }
                        row.push(delay::wigner_delay_analytic(AmplitudeKind::Reflection, o, k, &p)?);
                        if k > p.threshold() {
                            row.push(delay::wigner_delay_analytic(
                                AmplitudeKind::Transmission,
                                o,
                                k,
                                &p,
                            )?);
                        } else {
                            row.push(f64::NAN);
                        }
                    }
                    Ok(row)
                })
                .collect();
            emit(
                &Table {
                    header: format!(
                        "hypstep delay v0={} alpha={} kmin={} kmax={} points={} order={}",
                        p.v0(), p.alpha(), kmin, kmax, points, order
                    ),
                    columns,
                    rows: rows?,
                },
                &output,
            )
        }
        Command::Classical { potential, emin, emax, points, distance, output } => {
            let p = params_of(&potential)?;
            let d = distance.unwrap_or(30.0 * p.alpha());
            if emin <= 0.0 {
                return Err(CliError::Config("emin must be > 0".into()));
            }
            let es: Vec<f64> = grid(emin, emax, points, "E")?
                .into_iter()
                .filter(|e| (e - p.v0()).abs() >= 1e-9)
                .collect();
            let rows: Result<Vec<Vec<f64>>, hypstep::Error> = es
                .par_iter()
                .map(|&e| {
                    let res = delay::classical_delays(e, d, &p)?;
                    Ok(vec![
                        e,
                        res.tau,
                        if res.kind == AmplitudeKind::Reflection { 0.0 } else { 1.0 },
                        if res.converged { 1.0 } else { 0.0 },
                    ])
                })
                .collect();
            emit(
                &Table {
                    header: format!(
                        "hypstep classical v0={} alpha={} emin={} emax={} points={} distance={}",
                        p.v0(), p.alpha(), emin, emax, points, d
                    ),
                    columns: vec!["E", "tau_c", "transmission", "converged"],
                    rows: rows?,
                },
                &output,
            )
        }
        Command::Verify => {
            let checks = verify::run_all();
            let mut failed = 0usize;
            for c in &checks {
                let status = if c.passed() { "pass" } else { "FAIL" };
                println!(
                    "[{status}] {:<70} defect {:>12.3e}  tolerance {:>9.1e}",
                    c.name, c.defect, c.tolerance
                );
                if !c.passed() {
                    failed += 1;
                }
            }
            println!("{} checks, {} failed", checks.len(), failed);
            if failed > 0 {
                return Err(CliError::VerifyFailed);
            }
            Ok(())
        }
    }
}
