use chrono::{SecondsFormat, Utc};
use lindblad_core::bench::{self, BenchRow, CSV_HEADER};
use lindblad_core::expm::propagator;
use lindblad_core::linalg::interchange::format_matrix;
use lindblad_core::model_file::ModelSpec;
use lindblad_core::random::{random_hermitian, random_model, rng};
use lindblad_core::roofline::{
    characterize, classify, place, ridge_point, CacheLevel, MachineProfile,
};
use lindblad_core::{
    build_lindbladian, check_state, evolve, grape_chain, Error, MatrixAoS, TransmonParams,
};
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{Cli, Command, Dump, Format};
use crate::output::{CliError, CliResult, Csv, Report, EXIT_OK, EXIT_PARTIAL, EXIT_VALIDATION};

const ROOFLINE_HEADER: &str = "d,d2,flops,bytes,ai,placement,ridge_dram,bound";
const GRAPE_HEADER: &str = "d,segments,build_ms,chain_ms,points_per_s";
const VERIFY_HEADER: &str =
    "variant,steps,dt,trace_error,hermiticity_error,min_diagonal,tol,passed";

/// Collapse operators in the synthetic model used when `grape` runs at a
/// dimension without a model file.
const SYNTHETIC_OPS: usize = 2;

pub fn run(cli: &Cli) -> CliResult<Report> {
    let ctx = Context::new(cli)?;
    match &cli.command {
        Command::Roofline { dims } => roofline(&ctx, dims),
        Command::Bench {
            dims,
            variants,
            reps,
            warmup,
        } => bench(&ctx, dims, variants, *reps, *warmup),
        Command::Grape {
            dim,
            segments,
            steps_per_segment,
            dt,
            model,
            variant,
        } => {
            let spec = match (model, dim) {
                (Some(path), _) => Some(ModelSpec::from_file(path)?),
                (None, None | Some(3)) => Some(ModelSpec::transmon(TransmonParams::default())?),
                (None, Some(_)) => None,
            };
            if let (Some(spec), Some(d)) = (&spec, dim) {
                if spec.model.dim() != *d {
                    return Err(CliError::Input(format!(
                        "--dim {d} does not match the model dimension {}",
                        spec.model.dim()
                    )));
                }
            }
            grape(
                &ctx,
                spec,
                dim.unwrap_or(3),
                *segments,
                *steps_per_segment,
                *dt,
                *variant,
            )
        }
        Command::Verify {
            model,
            steps,
            dt,
            variant,
            tol,
        } => verify(
            &ctx,
            &load_model(model.as_deref())?,
            *steps,
            *dt,
            *variant,
            *tol,
        ),
        Command::Dump { model, what, dt } => dump(&ctx, &load_model(model.as_deref())?, *what, *dt),
    }
}

struct Context {
    format: Format,
    seed: u64,
    machine: MachineProfile,
    command: &'static str,
    generated: String,
}

impl Context {
    fn new(cli: &Cli) -> CliResult<Self> {
        let machine = match &cli.common.machine_profile {
            Some(path) => MachineProfile::from_file(path)?,
            None => MachineProfile::bundled(),
        };
        let command = match cli.command {
            Command::Roofline { .. } => "roofline",
            Command::Bench { .. } => "bench",
            Command::Grape { .. } => "grape",
            Command::Verify { .. } => "verify",
            Command::Dump { .. } => "dump",
        };
        Ok(Self {
            format: cli.common.format,
            seed: cli.common.seed,
            machine,
            command,
            generated: Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true),
        })
    }

    fn csv(&self, columns: &str) -> Csv {
        Csv::new(
            &format!(
                "lindblad-bench {} generated={} machine_profile={} build_profile={} seed={}",
                self.command,
                self.generated,
                self.machine.name,
                lindblad_core::build_profile(),
                self.seed
            ),
            columns,
        )
    }

    fn json(&self, body: Value, code: u8) -> Report {
        let mut doc = json!({
            "command": self.command,
            "generated": self.generated,
            "machine_profile": self.machine.name,
            "build_profile": lindblad_core::build_profile(),
            "seed": self.seed,
        });
        if let (Value::Object(doc), Value::Object(body)) = (&mut doc, body) {
            doc.extend(body);
        }
        Report::json(&doc, code)
    }
}

fn load_model(path: Option<&std::path::Path>) -> CliResult<ModelSpec> {
    Ok(match path {
        Some(p) => ModelSpec::from_file(p)?,
        None => ModelSpec::transmon(TransmonParams::default())?,
    })
}

fn check_dims(dims: &[usize]) -> CliResult<()> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(CliError::Input(
            "--dims needs one or more positive dimensions".into(),
        ));
    }
    Ok(())
}

/// `0.01 / ‖ℒ‖₁`, or 0.01 for a zero generator.
fn default_dt(l: &MatrixAoS) -> f64 {
    let norm = l.one_norm();
    if norm > 0.0 {
        0.01 / norm
    } else {
        0.01
    }
}

fn check_dt(dt: f64) -> CliResult<f64> {
    if dt.is_finite() && dt >= 0.0 {
        Ok(dt)
    } else {
        Err(CliError::Input(format!(
            "--dt must be finite and non-negative, got {dt}"
        )))
    }
}

#[derive(Serialize)]
struct RooflineRow {
    d: usize,
    d2: usize,
    flops: u64,
    bytes: u64,
    ai: f64,
    placement: CacheLevel,
    ridge_dram: f64,
    bound: lindblad_core::roofline::Bound,
}

fn roofline(ctx: &Context, dims: &[usize]) -> CliResult<Report> {
    check_dims(dims)?;
    let ridge_dram = ridge_point(&ctx.machine, CacheLevel::Dram);
    let rows: Vec<RooflineRow> = dims
        .iter()
        .map(|&d| {
            let k = place(&characterize(d), &ctx.machine);
            let class = classify(&k, &ctx.machine);
            RooflineRow {
                d,
                d2: d * d,
                flops: k.flops,
                bytes: k.bytes,
                ai: k.ai,
                placement: class.level,
                ridge_dram,
                bound: class.bound,
            }
        })
        .collect();

    Ok(match ctx.format {
        Format::Json => ctx.json(json!({ "rows": rows }), EXIT_OK),
        Format::Csv => {
            let mut csv = ctx.csv(ROOFLINE_HEADER);
            for r in &rows {
                csv.row(format!(
                    "{},{},{},{},{:.4},{},{:?},{}",
                    r.d, r.d2, r.flops, r.bytes, r.ai, r.placement, r.ridge_dram, r.bound
                ));
            }
            csv.finish(EXIT_OK)
        }
    })
}

fn bench(
    ctx: &Context,
    dims: &[usize],
    variants: &[lindblad_core::KernelVariant],
    reps: usize,
    warmup: usize,
) -> CliResult<Report> {
    check_dims(dims)?;
    if reps == 0 {
        return Err(CliError::Input("--reps must be at least 1".into()));
    }
    let cells = bench::run_matrix(dims, variants, reps, warmup, ctx.seed);
    let code = if cells.iter().any(|c| c.outcome.is_err()) {
        EXIT_PARTIAL
    } else {
        EXIT_OK
    };

    Ok(match ctx.format {
        Format::Json => {
            let mut rows: Vec<BenchRow> = Vec::new();
            let mut failed = Vec::new();
            for cell in &cells {
                match &cell.outcome {
                    Ok(r) => rows.push(r.row()),
                    Err(e) => {
                        failed.push(json!({ "dim": cell.dim, "variant": cell.variant, "error": e }))
                    }
                }
            }
            ctx.json(json!({ "rows": rows, "failed": failed }), code)
        }
        Format::Csv => {
            let mut csv = ctx.csv(CSV_HEADER);
            for cell in &cells {
                match &cell.outcome {
                    Ok(r) => csv.row(r.row().csv_line()),
                    Err(e) => csv.comment(format!(
                        "failed: dim={} variant={} error={e}",
                        cell.dim, cell.variant
                    )),
                }
            }
            csv.finish(code)
        }
    })
}

fn grape(
    ctx: &Context,
    spec: Option<ModelSpec>,
    dim: usize,
    segments: usize,
    steps_per_segment: usize,
    dt: Option<f64>,
    variant: lindblad_core::KernelVariant,
) -> CliResult<Report> {
    if dim == 0 || segments == 0 {
        return Err(CliError::Input(
            "--dim and --segments must be positive".into(),
        ));
    }
    let mut r = rng(ctx.seed);
    let spec = match spec {
        Some(s) => s,
        None => {
            let model = random_model(&mut r, dim, SYNTHETIC_OPS);
            let control = random_hermitian(&mut r, dim).scale(0.5.into());
            ModelSpec {
                model,
                control: Some(control),
                initial: None,
            }
        }
    };
    let amplitudes: Vec<f64> = (0..segments).map(|_| r.random_range(-1.0..=1.0)).collect();
    let dt = check_dt(dt.unwrap_or_else(|| default_dt(build_lindbladian(&spec.model).matrix())))?;

    let (_, t) = grape_chain(
        &spec.model,
        &spec.control_or_zero(),
        &amplitudes,
        steps_per_segment,
        dt,
        &spec.initial_state(),
        variant,
    )?;
    let d = spec.model.dim();

    Ok(match ctx.format {
        Format::Json => ctx.json(
            json!({ "rows": [{
                "d": d,
                "segments": t.segments,
                "build_ms": t.build_ms,
                "chain_ms": t.chain_ms,
                "points_per_s": t.points_per_s,
            }], "steps_per_segment": steps_per_segment, "dt": dt }),
            EXIT_OK,
        ),
        Format::Csv => {
            let mut csv = ctx.csv(GRAPE_HEADER);
            csv.row(format!(
                "{d},{},{:?},{:?},{:?}",
                t.segments, t.build_ms, t.chain_ms, t.points_per_s
            ));
            csv.finish(EXIT_OK)
        }
    })
}

fn verify(
    ctx: &Context,
    spec: &ModelSpec,
    steps: usize,
    dt: Option<f64>,
    variant: lindblad_core::KernelVariant,
    tol: f64,
) -> CliResult<Report> {
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(CliError::Input(format!(
            "--tol must be finite and non-negative, got {tol}"
        )));
    }
    let l = build_lindbladian(&spec.model);
    let dt = check_dt(dt.unwrap_or_else(|| default_dt(l.matrix())))?;
    let rho0 = spec.initial_state();

    let report = if steps == 0 {
        check_state(&rho0, tol)?
    } else {
        let p = propagator(&l, dt)?;
        match evolve(&p, &rho0, steps, variant) {
            Ok(rho) => check_state(&rho, tol)?,
            // The initial state itself is unphysical: report it as the failure.
            Err(Error::InvalidState(_)) => check_state(&rho0, tol)?,
            Err(e) => return Err(e.into()),
        }
    };
    let code = if report.passed {
        EXIT_OK
    } else {
        EXIT_VALIDATION
    };

    Ok(match ctx.format {
        Format::Json => ctx.json(
            json!({
                "variant": variant,
                "steps": steps,
                "dt": dt,
                "trace_error": report.trace_error,
                "hermiticity_error": report.hermiticity_error,
                "min_diagonal": report.min_diagonal,
                "tol": report.tol,
                "passed": report.passed,
            }),
            code,
        ),
        Format::Csv => {
            let mut csv = ctx.csv(VERIFY_HEADER);
            csv.row(format!(
                "{variant},{steps},{dt:?},{:?},{:?},{:?},{:?},{}",
                report.trace_error,
                report.hermiticity_error,
                report.min_diagonal,
                report.tol,
                report.passed
            ));
            csv.finish(code)
        }
    })
}

fn dump(ctx: &Context, spec: &ModelSpec, what: Dump, dt: Option<f64>) -> CliResult<Report> {
    let l = build_lindbladian(&spec.model);
    let (name, m, dt) = match what {
        Dump::Lindbladian => ("lindbladian", l.into_matrix(), None),
        Dump::Propagator => {
            let dt = check_dt(dt.unwrap_or_else(|| default_dt(l.matrix())))?;
            let p = propagator(&l, dt)?;
            ("propagator", p.matrix_aos().clone(), Some(dt))
        }
    };

    Ok(match ctx.format {
        Format::Json => {
            let data: Vec<[f64; 2]> = m.as_slice().iter().map(|z| [z.re, z.im]).collect();
            ctx.json(
                json!({ "what": name, "dt": dt, "rows": m.rows(), "cols": m.cols(), "data": data }),
                EXIT_OK,
            )
        }
        Format::Csv => Report {
            text: format_matrix(&m),
            code: EXIT_OK,
        },
    })
}
