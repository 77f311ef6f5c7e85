//! `optomech` — steady-state mechanical entanglement of a doubly resonant
//! optomechanical cavity with an intracavity NDOPA and a squeezed reservoir.
//!
//! Subcommands: compute, sweep, figure, optimize, stability, validate,
//! dump-matrices, dump-covariance. Parameter files are TOML or JSON (see
//! `config`). CSV outputs carry a `#` provenance prologue; all writes are
//! atomic (temp file + rename). `OPTOMECH_OUT_DIR` sets the default output
//! directory for relative paths.
//!
//! Exit codes: 0 success, 1 unstable-point refusal in `--strict` mode (or
//! runtime failure), 2 invalid configuration or arguments.

mod config;

use clap::{Parser, Subcommand};
use serde_json::json;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::result::Result;

use optomech::sweep::{CsvMeta, SweepBase};
use optomech::*;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("unstable operating point: {0}")]
    Unstable(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Unstable(_) | CliError::Runtime(_) => 1,
        }
    }
}

impl From<optomech::Error> for CliError {
    fn from(e: optomech::Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::InvalidAxis(_) => CliError::Config(e.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "optomech",
    version,
    about = "Steady-state entanglement of two nanomechanical resonators coupled through a doubly resonant cavity with an intracavity NDOPA and a two-mode squeezed vacuum reservoir"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate one parameter point end to end (operating point, effective
    /// model, stability, covariance by all applicable routes, negativity).
    Compute {
        /// Parameter file (TOML or JSON).
        #[arg(long)]
        params: PathBuf,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Fail (exit 1) when the point is dynamically unstable.
        #[arg(long)]
        strict: bool,
    },
    /// Grid sweep over one or two parameters; emits CSV plus a JSON summary.
    Sweep {
        /// Parameter file with the base point.
        #[arg(long, required_unless_present = "preset")]
        params: Option<PathBuf>,
        /// Axis spec `name:min:max:count[:log]`, repeatable (max 2).
        #[arg(long = "axis")]
        axes: Vec<String>,
        /// Figure preset (fig2..fig7) instead of params/axes.
        #[arg(long, conflicts_with_all = ["params", "axes"])]
        preset: Option<String>,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
        /// Worker threads for grid evaluation.
        #[arg(long)]
        jobs: Option<usize>,
        /// Recorded in the provenance prologue.
        #[arg(long)]
        seed: Option<u64>,
        /// Comma-separated subset of value columns (axes always kept).
        #[arg(long)]
        columns: Option<String>,
    },
    /// Reproduce a reference figure: CSV plus signature-check summary.
    Figure {
        /// fig2..fig7
        id: String,
        /// Output directory for <id>.csv and <id>.summary.json.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Maximize the negativity over box-bounded free parameters.
    Optimize {
        #[arg(long)]
        params: PathBuf,
        /// Free parameter `name:lo:hi`, repeatable.
        #[arg(long = "free", required = true)]
        free: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        multistarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Simplex-diameter termination tolerance (box-normalized).
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
        #[arg(long, default_value_t = 400)]
        max_iters: usize,
        /// Unstable-point policy: reject | penalty.
        #[arg(long, default_value = "penalty")]
        unstable: String,
        /// Include the full evaluation trace in the JSON output.
        #[arg(long)]
        trace: bool,
    },
    /// Routh–Hurwitz stability report for one parameter point.
    Stability {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate the adiabatic elimination against the full four-mode model.
    Validate {
        #[arg(long, default_value_t = 0.02)]
        g_over_kappa: f64,
        #[arg(long, default_value_t = 0.26)]
        lambda_over_kappa: f64,
        #[arg(long, default_value_t = 1.0)]
        squeezing_r: f64,
        #[arg(long, default_value_t = 0.5)]
        occupancy: f64,
        /// Relative tolerance on covariance and negativity deviations.
        #[arg(long, default_value_t = 0.02)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dump drift and diffusion matrices as labeled JSON.
    DumpMatrices {
        #[arg(long)]
        params: PathBuf,
        /// Dump the 8x8 pre-elimination matrices instead of the 4x4.
        #[arg(long)]
        full: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dump the steady-state covariance matrix.
    DumpCovariance {
        #[arg(long)]
        params: PathBuf,
        /// generic | cramer | closed-form
        #[arg(long, default_value = "generic")]
        method: String,
        /// json | csv
        #[arg(long, default_value = "json")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

/// Resolve relative output paths against OPTOMECH_OUT_DIR when set.
fn out_path(p: &Path) -> PathBuf {
    if p.is_relative() {
        if let Ok(dir) = std::env::var("OPTOMECH_OUT_DIR") {
            return PathBuf::from(dir).join(p);
        }
    }
    p.to_path_buf()
}

/// Atomic write: temp file in the target directory, then rename. Partial
/// outputs are never left behind.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let path = out_path(path);
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(d) = dir {
        std::fs::create_dir_all(d)
            .map_err(|e| CliError::Runtime(format!("{}: {e}", d.display())))?;
    }
    let mut tmp = tempfile::NamedTempFile::new_in(dir.unwrap_or(Path::new(".")))
        .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    tmp.write_all(bytes)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    tmp.persist(&path)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    Ok(())
}

fn emit(out: Option<&PathBuf>, value: &serde_json::Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("json serialization");
    match out {
        Some(p) => {
            write_atomic(p, text.as_bytes())?;
            println!("wrote {}", out_path(p).display());
            Ok(())
        }
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn version() -> &'static str {
    env!("CARGO_PKG_VERSION")
}

fn parse_axis(spec: &str) -> Result<AxisSpec, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 4 && parts.len() != 5 {
        return Err(CliError::Config(format!(
            "axis '{spec}' must be name:min:max:count[:log]"
        )));
    }
    let param = SweepParam::parse(parts[0]).map_err(|e| CliError::Config(e.to_string()))?;
    let num = |s: &str| -> Result<f64, CliError> {
        s.parse()
            .map_err(|_| CliError::Config(format!("axis '{spec}': bad number '{s}'")))
    };
    let count: usize = parts[3]
        .parse()
        .map_err(|_| CliError::Config(format!("axis '{spec}': bad count '{}'", parts[3])))?;
    let log = match parts.get(4) {
        None => false,
        Some(&"log") => true,
        Some(&"linear") => false,
        Some(other) => {
            return Err(CliError::Config(format!(
                "axis '{spec}': unknown scale '{other}'"
            )))
        }
    };
    Ok(AxisSpec {
        param,
        min: num(parts[1])?,
        max: num(parts[2])?,
        count,
        log,
    })
}

fn parse_free(spec: &str) -> Result<BoundedParam, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Config(format!("free '{spec}' must be name:lo:hi")));
    }
    let param = SweepParam::parse(parts[0]).map_err(|e| CliError::Config(e.to_string()))?;
    let num = |s: &str| -> Result<f64, CliError> {
        s.parse()
            .map_err(|_| CliError::Config(format!("free '{spec}': bad number '{s}'")))
    };
    Ok(BoundedParam {
        param,
        lo: num(parts[1])?,
        hi: num(parts[2])?,
    })
}

fn effective_json(m: &EffectiveModel) -> serde_json::Value {
    json!({
        "upsilon": m.upsilon,
        "optical_damping": m.optical_damping,
        "kcal": m.kcal,
        "chi_abs": m.chi.norm(),
        "chi_arg": m.chi.arg(),
        "beyond_threshold": m.beyond_threshold,
    })
}

fn cmd_compute(params: &Path, out: Option<&PathBuf>, strict: bool) -> Result<(), CliError> {
    let base = config::load(params)?;
    let mp = base.resolve()?;
    let model = EffectiveModel::new(&mp)?;
    let stability = routh_hurwitz(&model);

    let mut report = json!({
        "artifact_version": version(),
        "params": &base,
        "model_params": &mp,
        "effective_model": effective_json(&model),
        "stability": &stability,
        "covariance_lyapunov": null,
        "covariance_cramer": null,
        "covariance_closed_form": null,
        "entanglement": null,
    });
    if let SweepBase::Physical(p) = &base {
        report["operating_point"] = serde_json::to_value(derive_operating_point(p)?).unwrap();
    }

    if !stability.stable {
        if strict {
            return Err(CliError::Unstable(format!(
                "stability margin {} <= 0 (strict mode)",
                stability.margin
            )));
        }
        eprintln!(
            "unstable point (margin {:.3e}); E_N masked",
            stability.margin
        );
        return emit(out, &report);
    }

    let f = model.diffusion()?;
    let generic = solve_lyapunov_generic(&model.drift(), &f)?;
    let cramer = solve_covariance_cramer(&model, &f)?;
    report["covariance_lyapunov"] = serde_json::to_value(generic.to_labeled()).unwrap();
    report["covariance_cramer"] = serde_json::to_value(cramer.to_labeled()).unwrap();
    if let Ok(closed) = symmetric_closed_form(&model, &f) {
        report["covariance_closed_form"] = serde_json::to_value(closed.to_labeled()).unwrap();
    }
    let ent = log_negativity(&generic)?;
    report["entanglement"] = json!({
        "invariants": ent.invariants,
        "v_s": ent.v_s,
        "e_n": ent.e_n,
        "e_n_db": to_decibels(ent.e_n),
        "entangled": ent.entangled,
    });
    emit(out, &report)
}

fn summary_path(csv: &Path) -> PathBuf {
    csv.with_extension("summary.json")
}

fn cmd_sweep(
    params: Option<&PathBuf>,
    axes: &[String],
    preset: Option<&str>,
    out: &Path,
    jobs: Option<usize>,
    seed: Option<u64>,
    columns: Option<&str>,
) -> Result<(), CliError> {
    let (table, base, preset_name) = match preset {
        Some(name) => {
            let id = FigureId::parse(name).map_err(|e| CliError::Config(e.to_string()))?;
            let rep = reproduce_figure(id, jobs)?;
            (rep.table, rep.base, Some(id.name().to_string()))
        }
        None => {
            if axes.is_empty() || axes.len() > 2 {
                return Err(CliError::Config(format!(
                    "need 1 or 2 --axis specs, got {}",
                    axes.len()
                )));
            }
            let base = config::load(params.expect("clap enforces params"))?;
            let spec = SweepSpec {
                base: base.clone(),
                axes: axes.iter().map(|a| parse_axis(a)).collect::<Result<_, _>>()?,
                columns: columns.map(|c| c.split(',').map(|s| s.trim().to_string()).collect()),
            };
            (run_sweep(&spec, jobs)?, base, None)
        }
    };

    let mut meta = CsvMeta::new(&base);
    meta.preset = preset_name;
    meta.seed = seed;
    let mut csv = Vec::new();
    table
        .write_csv(&mut csv, &meta)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    write_atomic(out, &csv)?;

    let summary = json!({
        "artifact_version": version(),
        "params": &base,
        "preset": meta.preset,
        "seed": meta.seed,
        "summary": table.summary(),
    });
    write_atomic(
        &summary_path(out),
        serde_json::to_string_pretty(&summary).unwrap().as_bytes(),
    )?;

    if table.empty_stable_region {
        eprintln!("warning: no stable point on the grid; all E_N cells masked");
    }
    println!(
        "wrote {} ({} rows, {} stable) + {}",
        out_path(out).display(),
        table.rows.len(),
        table.rows.iter().filter(|r| r.stable).count(),
        out_path(&summary_path(out)).display()
    );
    Ok(())
}

fn cmd_figure(id: &str, out_dir: &Path, jobs: Option<usize>) -> Result<(), CliError> {
    let id = FigureId::parse(id).map_err(|e| CliError::Config(e.to_string()))?;
    let rep = reproduce_figure(id, jobs)?;

    let mut meta = CsvMeta::new(&rep.base);
    meta.preset = Some(id.name().to_string());
    let mut csv = Vec::new();
    rep.table
        .write_csv(&mut csv, &meta)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    let csv_path = out_dir.join(format!("{}.csv", id.name()));
    write_atomic(&csv_path, &csv)?;

    let mut summary = rep.checks_json();
    summary["artifact_version"] = json!(version());
    summary["params"] = serde_json::to_value(&rep.base).unwrap();
    let sum_path = out_dir.join(format!("{}.summary.json", id.name()));
    write_atomic(&sum_path, serde_json::to_string_pretty(&summary).unwrap().as_bytes())?;

    // signature failures are reported, not fatal
    for c in &rep.checks {
        println!(
            "[{}] {}: {}",
            if c.passed { "pass" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    println!(
        "wrote {} ({} rows) + {}",
        out_path(&csv_path).display(),
        rep.table.rows.len(),
        out_path(&sum_path).display()
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_optimize(
    params: &Path,
    free: &[String],
    out: Option<&PathBuf>,
    multistarts: usize,
    seed: u64,
    tol: f64,
    max_iters: usize,
    unstable: &str,
    with_trace: bool,
) -> Result<(), CliError> {
    let base = config::load(params)?;
    let unstable = match unstable {
        "reject" => UnstableHandling::Reject,
        "penalty" => UnstableHandling::Penalty,
        other => {
            return Err(CliError::Config(format!(
                "unstable policy must be reject|penalty, got '{other}'"
            )))
        }
    };
    let mut spec = OptimizeSpec::new(
        base.clone(),
        free.iter().map(|f| parse_free(f)).collect::<Result<_, _>>()?,
    );
    spec.multistarts = multistarts;
    spec.seed = seed;
    spec.tol = tol;
    spec.max_iters = max_iters;
    spec.unstable = unstable;

    let res = maximize_negativity(&spec)?;
    let mut report = json!({
        "artifact_version": version(),
        "params": &base,
        "spec": {
            "free": &spec.free,
            "multistarts": spec.multistarts,
            "seed": spec.seed,
            "tol": spec.tol,
            "max_iters": spec.max_iters,
            "unstable": spec.unstable,
        },
        "best_point": res.best_point.iter().map(|(p, v)| json!({"param": p, "value": v})).collect::<Vec<_>>(),
        "best_e_n": res.best_e_n,
        "best_e_n_db": to_decibels(res.best_e_n),
        "evaluations": res.evaluations,
        "iterations": res.iterations,
        "converged": res.converged,
        "best_history": res.best_history,
    });
    if with_trace {
        report["trace"] = serde_json::to_value(&res.trace).unwrap();
    }
    println!(
        "E_N* = {:.6} at {}",
        res.best_e_n,
        res.best_point
            .iter()
            .map(|(p, v)| format!("{p} = {v:.6}"))
            .collect::<Vec<_>>()
            .join(", ")
    );
    emit(out, &report)
}

fn cmd_stability(params: &Path, out: Option<&PathBuf>) -> Result<(), CliError> {
    let base = config::load(params)?;
    let model = EffectiveModel::new(&base.resolve()?)?;
    let mut rh = routh_hurwitz(&model);
    let eig = eigenvalue_stability(&model.drift())?;
    rh.eigenvalue_real_parts = eig.eigenvalue_real_parts;
    let report = json!({
        "artifact_version": version(),
        "params": &base,
        "effective_model": effective_json(&model),
        "stability": &rh,
        "eigenvalue_verdict_agrees": eig.stable == rh.stable,
    });
    emit(out, &report)
}

fn cmd_validate(
    g_over_kappa: f64,
    lambda_over_kappa: f64,
    squeezing_r: f64,
    occupancy: f64,
    tol: f64,
    out: Option<&PathBuf>,
) -> Result<(), CliError> {
    let mut base = ReducedParams::baseline();
    base.drive = Drive::CouplingRatio(g_over_kappa);
    base.lambda_over_kappa = lambda_over_kappa;
    base.squeezing_r = squeezing_r;
    base.occupancy = [occupancy, occupancy];
    let mp = ModelParams::from_reduced(&base)?;
    let rep = validate_elimination(&mp, tol)?;
    let report = json!({
        "artifact_version": version(),
        "params": SweepBase::Reduced(base),
        "report": &rep,
        "pass": rep.within_tolerance,
    });
    println!(
        "elimination deviation {:.3e} (covariance), {:.3e} (E_N) at tol {tol}: {}",
        rep.max_cov_deviation,
        rep.e_n_deviation,
        if rep.within_tolerance { "pass" } else { "FAIL" }
    );
    emit(out, &report)
}

fn cmd_dump_matrices(params: &Path, full: bool, out: Option<&PathBuf>) -> Result<(), CliError> {
    let base = config::load(params)?;
    let mp = base.resolve()?;
    let report = if full {
        let m = build_full_model(&mp)?;
        json!({
            "artifact_version": version(),
            "params": &base,
            "ordering_note": "cavity quadratures first, then mechanical",
            "drift": m.drift_labeled(),
            "diffusion": m.diffusion_labeled(),
        })
    } else {
        let m = EffectiveModel::new(&mp)?;
        json!({
            "artifact_version": version(),
            "params": &base,
            "effective_model": effective_json(&m),
            "drift": linalg::LabeledMatrix::from_matrix4(&m.drift(), &linalg::MECH_ORDERING),
            "diffusion": linalg::LabeledMatrix::from_matrix4(&m.diffusion()?, &linalg::MECH_ORDERING),
        })
    };
    emit(out, &report)
}

fn cmd_dump_covariance(
    params: &Path,
    method: &str,
    format: &str,
    out: Option<&PathBuf>,
) -> Result<(), CliError> {
    let base = config::load(params)?;
    let model = EffectiveModel::new(&base.resolve()?)?;
    let f = model.diffusion()?;
    let cov = match method {
        "generic" => solve_lyapunov_generic(&model.drift(), &f)?,
        "cramer" => solve_covariance_cramer(&model, &f)?,
        "closed-form" => symmetric_closed_form(&model, &f)?,
        other => {
            return Err(CliError::Config(format!(
                "method must be generic|cramer|closed-form, got '{other}'"
            )))
        }
    };
    match format {
        "json" => {
            let report = json!({
                "artifact_version": version(),
                "params": &base,
                "method": cov.method,
                "covariance": cov.to_labeled(),
            });
            emit(out, &report)
        }
        "csv" => {
            let labeled = cov.to_labeled();
            let mut text = format!("# artifact_version={}\n", version());
            text.push_str(&format!(
                "# params={}\n",
                serde_json::to_string(&base).unwrap()
            ));
            text.push_str(&format!("quadrature,{}\n", labeled.ordering.join(",")));
            for (label, row) in labeled.ordering.iter().zip(&labeled.rows) {
                let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
                text.push_str(&format!("{label},{}\n", cells.join(",")));
            }
            match out {
                Some(p) => {
                    write_atomic(p, text.as_bytes())?;
                    println!("wrote {}", out_path(p).display());
                }
                None => print!("{text}"),
            }
            Ok(())
        }
        other => Err(CliError::Config(format!(
            "format must be json|csv, got '{other}'"
        ))),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Compute { params, out, strict } => cmd_compute(&params, out.as_ref(), strict),
        Cmd::Sweep {
            params,
            axes,
            preset,
            out,
            jobs,
            seed,
            columns,
        } => cmd_sweep(
            params.as_ref(),
            &axes,
            preset.as_deref(),
            &out,
            jobs,
            seed,
            columns.as_deref(),
        ),
        Cmd::Figure { id, out_dir, jobs } => cmd_figure(&id, &out_dir, jobs),
        Cmd::Optimize {
            params,
            free,
            out,
            multistarts,
            seed,
            tol,
            max_iters,
            unstable,
            trace,
        } => cmd_optimize(
            &params,
            &free,
            out.as_ref(),
            multistarts,
            seed,
            tol,
            max_iters,
            &unstable,
            trace,
        ),
        Cmd::Stability { params, out } => cmd_stability(&params, out.as_ref()),
        Cmd::Validate {
            g_over_kappa,
            lambda_over_kappa,
            squeezing_r,
            occupancy,
            tol,
            out,
        } => cmd_validate(
            g_over_kappa,
            lambda_over_kappa,
            squeezing_r,
            occupancy,
            tol,
            out.as_ref(),
        ),
        Cmd::DumpMatrices { params, full, out } => cmd_dump_matrices(&params, full, out.as_ref()),
        Cmd::DumpCovariance {
            params,
            method,
            format,
            out,
        } => cmd_dump_covariance(&params, &method, &format, out.as_ref()),
    }
}
