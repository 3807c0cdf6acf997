use std::path::{Path, PathBuf};
use std::time::Instant;

use hypertuple_core::algebra::{
    close_algebra, commutant, compute_characters, find_cyclic_vector, CharacterTable, IDEMPOTENT_TOL,
};
use hypertuple_core::construct::{
    build_tuple, f4_triple, gallery, min_tuple_size, GalleryEntry, GalleryParams, CYCLIC_ATTEMPTS, F4_DEFAULT,
    GALLERY_NAMES,
};
use hypertuple_core::expmap::{alg_exp, alg_log, ker_exp_generators, sign_group, LogCut};
use hypertuple_core::numkit::{Field, Matrix, Tolerance, C64};
use hypertuple_core::orbit::{
    coverage, enumerate_orbit, halfplane_check, real_coordinates, verify_non_cyclic_commutant, BoxRegion,
    CoverageReport, OrbitBudget,
};
use hypertuple_core::semigroup::{independent_reals, kronecker_approx, Scheme};
use hypertuple_core::{CommutativeAlgebra, TupleSpec};
use serde_json::{json, Value};

use crate::config::{Command, ExpOp, ExperimentConfig, GalleryAction, OrbitArgs};
use crate::input::{load_matrix, load_tuple, load_vector, parse_floats, parse_region};
use crate::report::{normalize_label, CliResult, Checked, Diagnostic, RunReport, Stage, REPORT_SCHEMA_VERSION};

/// Relative bound on `‖exp(log a) − a‖` and on sign generators squaring to I.
const ROUNDTRIP_TOL: f64 = 1e-7;
/// Bound on `‖exp(k) − I‖` for kernel generators.
const KERNEL_TOL: f64 = 1e-6;
/// Relative bound on the half-plane closed form.
const CLOSED_FORM_TOL: f64 = 1e-8;
/// Relative residual for membership in an algebra.
const MEMBERSHIP_TOL: f64 = 1e-8;
const NON_CYCLIC_SAMPLES: usize = 200;
const HALFPLANE_DEGREE: u32 = 60;

struct Outcome {
    result: Value,
    verdict: Option<String>,
}

fn to_value<T: serde::Serialize>(v: &T) -> CliResult<Value> {
    serde_json::to_value(v).map_err(|e| Diagnostic::new(Stage::Output, "Serialize", e.to_string()))
}

fn label<T: serde::Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(Value::String(s)) => s,
        Ok(other) => other.to_string(),
        Err(_) => String::new(),
    }
}

fn algebra_of(t: &TupleSpec, tol: &Tolerance) -> CliResult<CommutativeAlgebra> {
    close_algebra(t.field, t.n, &t.operators, tol).map_err(|e| Diagnostic::core(Stage::Algebra, e))
}

fn characters(alg: &CommutativeAlgebra, tol: &Tolerance, seed: u64) -> CliResult<CharacterTable> {
    compute_characters(alg, tol, seed).map_err(|e| Diagnostic::core(Stage::Characters, e))
}

fn counts_json(table: &CharacterTable) -> Value {
    match table.field {
        Field::Complex => json!({ "kappa": table.kappa }),
        Field::Real => json!({ "kappa0": table.kappa0, "kappa1": table.kappa1 }),
    }
}

/// Size of the tuple the construction yields for a cyclic algebra.
fn predicted_size(table: &CharacterTable, n: usize) -> usize {
    match table.field {
        Field::Complex => 2 * n - table.kappa + 1,
        Field::Real => n - table.kappa0.unwrap_or(0) + 1,
    }
}

fn cyclic_vector(alg: &CommutativeAlgebra, seed: u64) -> Option<Vec<C64>> {
    if alg.dim() != alg.n() {
        return None;
    }
    find_cyclic_vector(alg, CYCLIC_ATTEMPTS, seed)
}

fn max_relative_commutator(ops: &[Matrix]) -> f64 {
    let mut worst = 0.0f64;
    for (i, a) in ops.iter().enumerate() {
        for b in &ops[i + 1..] {
            let scale = (a.max_abs() * b.max_abs()).max(1.0);
            worst = worst.max(a.commutator(b).max_abs() / scale);
        }
    }
    worst
}

/// Runs one experiment. Output files named in the config are written here;
/// printing is left to the caller.
pub fn run(config: &ExperimentConfig) -> CliResult<RunReport> {
    let start = Instant::now();
    config
        .tolerance
        .validate()
        .map_err(|e| Diagnostic::core(Stage::Config, e))?;
    let out = dispatch(config)?;
    let expectation_met = config.expect.as_ref().map(|want| match &out.verdict {
        Some(got) => normalize_label(want) == normalize_label(got),
        None => false,
    });
    let report = RunReport {
        schema_version: REPORT_SCHEMA_VERSION,
        config: config.clone(),
        result: out.result,
        verdict: out.verdict,
        expectation_met,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    };
    if let Some(path) = &config.json_out {
        write_json(path, &report)?;
    }
    Ok(report)
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Diagnostic::new(Stage::Output, "Serialize", e.to_string()))?;
    std::fs::write(path, text + "\n").map_err(|e| {
        let mut d = Diagnostic::new(Stage::Output, "Io", e.to_string());
        d.file = Some(path.display().to_string());
        d
    })
}

fn dispatch(config: &ExperimentConfig) -> CliResult<Outcome> {
    let tol = &config.tolerance;
    let seed = config.seed;
    match &config.command {
        Command::Analyze { tuple } => analyze(tuple, tol, seed),
        Command::Construct {
            field,
            dim,
            algebra,
            scheme,
        } => construct(*field, *dim, algebra.as_deref(), *scheme, tol, seed),
        Command::MinSize { field, dim } => {
            let size = min_tuple_size(*field, *dim).map_err(|e| Diagnostic::core(Stage::Config, e))?;
            Ok(Outcome {
                result: json!({ "field": field, "n": dim, "min_tuple_size": size }),
                verdict: Some(size.to_string()),
            })
        }
        Command::Gallery { action } => match action {
            GalleryAction::List => gallery_list(tol),
            GalleryAction::Show { name, field, dim, m } => gallery_show(name, *field, *dim, *m, tol, seed),
        },
        Command::Orbit { tuple, orbit, csv } => {
            let t = load_tuple(tuple)?;
            let x = start_vector(orbit, &t, None)?;
            let csv = csv.as_ref().or(config.csv_out.as_ref());
            let (region, report) = coverage_run(&t, &x, orbit, csv.map(PathBuf::as_path))?;
            Ok(Outcome {
                verdict: Some(label(&report.verdict)),
                result: json!({
                    "tuple_len": t.len(),
                    "x": x,
                    "box": region,
                    "coverage": report,
                }),
            })
        }
        Command::Verify { tuple, drop, orbit } => verify(tuple, *drop, orbit, config),
        Command::Kronecker {
            alpha,
            target,
            eps,
            m0_max,
        } => kronecker(alpha, target, *eps, *m0_max),
        Command::Expmap { alg, op, element, cut } => expmap(alg, *op, element.as_deref(), *cut, tol, seed),
        Command::PaperSuite => paper_suite(tol, seed),
    }
}

fn analyze(path: &Path, tol: &Tolerance, seed: u64) -> CliResult<Outcome> {
    let t = load_tuple(path)?;
    let alg = algebra_of(&t, tol)?;
    let table = characters(&alg, tol, seed)?;
    let comm = commutant(&alg).map_err(|e| Diagnostic::core(Stage::Algebra, e))?;
    let cv = cyclic_vector(&alg, seed);
    let mut result = json!({
        "field": t.field,
        "n": t.n,
        "tuple_len": t.len(),
        "dim": alg.dim(),
        "cyclic": cv.is_some(),
        "cyclic_vector": cv,
        "characters": table.characters,
        "idempotent_residual": Checked::at_most(table.idempotent_residual, IDEMPOTENT_TOL),
        "commutant_dim": comm.len(),
        "predicted_size": cv.as_ref().map(|_| predicted_size(&table, t.n)),
    });
    merge(&mut result, counts_json(&table));
    Ok(Outcome {
        verdict: Some(if cv.is_some() { "cyclic" } else { "non-cyclic" }.into()),
        result,
    })
}

fn merge(into: &mut Value, from: Value) {
    if let (Value::Object(a), Value::Object(b)) = (into, from) {
        a.extend(b);
    }
}

/// Gallery name and parameters placing an algebra on 𝕂^dim.
fn construct_target(field: Field, dim: usize, algebra: Option<&str>) -> CliResult<(&'static str, GalleryParams)> {
    let bad = |msg: String| Diagnostic::new(Stage::Config, "InvalidInput", msg);
    if dim == 0 {
        return Err(bad("dim must be positive".into()));
    }
    let name = match algebra {
        Some(a) => GALLERY_NAMES
            .iter()
            .copied()
            .find(|g| *g == a)
            .ok_or_else(|| Diagnostic::new(Stage::Config, "UnknownGallery", format!("unknown gallery entry `{a}`")))?,
        None => match field {
            Field::Complex => "diag",
            Field::Real if dim == 1 => "diag",
            Field::Real if dim % 2 == 0 => "rotation_sum",
            Field::Real => "rotation_sum_odd",
        },
    };
    let mut params = GalleryParams {
        field: Some(field),
        ..Default::default()
    };
    match name {
        "diag" | "jordan2_diag" => params.n = Some(dim),
        "rotation_sum" if dim % 2 == 0 => params.m = Some(dim / 2),
        "rotation_sum_odd" if dim % 2 == 1 && dim >= 3 => params.m = Some(dim / 2),
        "rotation_sum" | "rotation_sum_odd" => return Err(bad(format!("{name} has no member on dimension {dim}"))),
        _ => {}
    }
    Ok((name, params))
}

fn gallery_entry(name: &str, params: GalleryParams, tol: &Tolerance) -> CliResult<GalleryEntry> {
    gallery(name, params, tol).map_err(|e| Diagnostic::core(Stage::Algebra, e))
}

fn construct(
    field: Field,
    dim: usize,
    algebra: Option<&str>,
    scheme: Scheme,
    tol: &Tolerance,
    seed: u64,
) -> CliResult<Outcome> {
    let (name, params) = construct_target(field, dim, algebra)?;
    let entry = gallery_entry(name, params, tol)?;
    let alg = &entry.algebra;
    if alg.n() != dim || alg.field() != field {
        return Err(Diagnostic::new(
            Stage::Config,
            "InvalidInput",
            format!("{name} lives on {}^{}, not {}^{dim}", alg.field().symbol(), alg.n(), field.symbol()),
        ));
    }
    let table = characters(alg, tol, seed)?;
    let mut tuple = build_tuple(alg, &table, scheme, seed).map_err(|e| Diagnostic::core(Stage::Construct, e))?;
    tuple.provenance.algebra_id = name.into();
    Ok(Outcome {
        verdict: Some(tuple.len().to_string()),
        result: to_value(&tuple)?,
    })
}

fn gallery_list(tol: &Tolerance) -> CliResult<Outcome> {
    let mut entries = Vec::new();
    for name in GALLERY_NAMES {
        let e = gallery_entry(name, GalleryParams::default(), tol)?;
        entries.push(json!({
            "name": name,
            "field": e.algebra.field(),
            "n": e.algebra.n(),
            "expected": e.expected,
        }));
    }
    Ok(Outcome {
        result: json!({ "entries": entries }),
        verdict: None,
    })
}

fn gallery_show(
    name: &str,
    field: Option<Field>,
    dim: Option<usize>,
    m: Option<usize>,
    tol: &Tolerance,
    seed: u64,
) -> CliResult<Outcome> {
    let e = gallery_entry(name, GalleryParams { n: dim, m, field }, tol)?;
    let table = characters(&e.algebra, tol, seed)?;
    let matches = match table.field {
        Field::Complex => e.expected.kappa == Some(table.kappa),
        Field::Real => (e.expected.kappa0, e.expected.kappa1) == (table.kappa0, table.kappa1),
    };
    let cyclic = cyclic_vector(&e.algebra, seed).is_some();
    let mut result = json!({
        "name": name,
        "field": e.algebra.field(),
        "n": e.algebra.n(),
        "dim": e.algebra.dim(),
        "cyclic": cyclic,
        "expected": e.expected,
        "idempotent_residual": Checked::at_most(table.idempotent_residual, IDEMPOTENT_TOL),
        "matches_expected": matches,
        "predicted_size": cyclic.then(|| predicted_size(&table, e.algebra.n())),
    });
    merge(&mut result, counts_json(&table));
    Ok(Outcome {
        result,
        verdict: Some(if matches { "match" } else { "mismatch" }.into()),
    })
}

fn start_vector(args: &OrbitArgs, t: &TupleSpec, fallback: Option<Vec<C64>>) -> CliResult<Vec<C64>> {
    let x = match (&args.x, &t.cyclic_vector, fallback) {
        (Some(p), _, _) => load_vector(p)?,
        (None, Some(v), _) => v.clone(),
        (None, None, Some(v)) => v,
        (None, None, None) => {
            return Err(Diagnostic::new(
                Stage::Config,
                "InvalidInput",
                "no --x given and the tuple carries no cyclic_vector",
            ))
        }
    };
    if x.len() != t.n {
        return Err(Diagnostic::new(
            Stage::Input,
            "DimensionMismatch",
            format!("start vector has {} entries, tuple acts on dimension {}", x.len(), t.n),
        ));
    }
    Ok(x)
}

fn checkpoints(args: &OrbitArgs) -> CliResult<Vec<u32>> {
    let bad = |msg: String| Diagnostic::new(Stage::Config, "InvalidInput", msg);
    match &args.checkpoints {
        Some(s) => s
            .split(',')
            .map(|p| p.trim().parse::<u32>().map_err(|e| bad(format!("checkpoints: `{p}`: {e}"))))
            .collect(),
        None => {
            let mut out: Vec<u32> = (0..4).rev().map(|i| args.max_degree >> i).filter(|&d| d > 0).collect();
            out.dedup();
            if out.is_empty() {
                out.push(0);
            }
            Ok(out)
        }
    }
}

fn coverage_run(
    t: &TupleSpec,
    x: &[C64],
    args: &OrbitArgs,
    csv_path: Option<&Path>,
) -> CliResult<(BoxRegion, CoverageReport)> {
    let orbit_err = |e| Diagnostic::core(Stage::Orbit, e);
    let region = parse_region(&args.region, t.field, t.n)?;
    let budget = OrbitBudget {
        max_degree: args.max_degree,
        max_points: args.max_points.unwrap_or(u64::MAX),
    };
    let marks = checkpoints(args)?;
    let points = enumerate_orbit(t, x, budget).map_err(orbit_err)?;
    let io_err = |e: csv::Error| Diagnostic::new(Stage::Output, "Io", e.to_string());
    let mut writer = match csv_path {
        Some(p) => {
            let mut w = csv::Writer::from_path(p).map_err(io_err)?;
            let axes = real_coordinates(t.field, x).len();
            let header: Vec<String> = (1..=t.len())
                .map(|j| format!("k{j}"))
                .chain((1..=axes).map(|j| format!("coord{j}")))
                .collect();
            w.write_record(&header).map_err(io_err)?;
            Some(w)
        }
        None => None,
    };
    let mut write_err = None;
    let report = {
        let field = t.field;
        let rows = points.inspect(|p| {
            if let (Some(w), None) = (writer.as_mut(), write_err.as_ref()) {
                let row: Vec<String> = p
                    .q
                    .iter()
                    .map(u32::to_string)
                    .chain(real_coordinates(field, &p.point).iter().map(f64::to_string))
                    .collect();
                if let Err(e) = w.write_record(&row) {
                    write_err = Some(e);
                }
            }
        });
        coverage(rows, &region, args.grid, &marks).map_err(orbit_err)?
    };
    if let Some(e) = write_err {
        return Err(io_err(e));
    }
    if let Some(mut w) = writer {
        w.flush()
            .map_err(|e| Diagnostic::new(Stage::Output, "Io", e.to_string()))?;
    }
    Ok((region, report))
}

fn verify(path: &Path, drop: Option<usize>, args: &OrbitArgs, config: &ExperimentConfig) -> CliResult<Outcome> {
    let tol = &config.tolerance;
    let mut t = load_tuple(path)?;
    if let Some(i) = drop {
        t = t.without(i).map_err(|e| Diagnostic::core(Stage::Input, e))?;
    }
    let commuting = Checked::at_most(max_relative_commutator(&t.operators), tol.eq_tol);
    t.validate(tol).map_err(|e| Diagnostic::core(Stage::Algebra, e))?;
    let alg = algebra_of(&t, tol)?;
    let table = characters(&alg, tol, config.seed)?;
    let cv = cyclic_vector(&alg, config.seed);
    let minimum = min_tuple_size(t.field, t.n).map_err(|e| Diagnostic::core(Stage::Config, e))?;
    let x = start_vector(args, &t, cv.clone())?;
    let csv = config.csv_out.as_deref();
    let (region, report) = coverage_run(&t, &x, args, csv)?;
    let mut characters = json!({
        "idempotent_residual": Checked::at_most(table.idempotent_residual, IDEMPOTENT_TOL),
    });
    merge(&mut characters, counts_json(&table));
    Ok(Outcome {
        verdict: Some(label(&report.verdict)),
        result: json!({
            "dropped": drop,
            "commuting": commuting,
            "algebra": { "n": t.n, "dim": alg.dim(), "cyclic": cv.is_some() },
            "characters": characters,
            "size": {
                "tuple_len": t.len(),
                "predicted_size": cv.as_ref().map(|_| predicted_size(&table, t.n)),
                "min_tuple_size": minimum,
                "below_minimum": t.len() < minimum,
            },
            "x": x,
            "box": region,
            "coverage": report,
        }),
    })
}

fn parse_alpha(text: &str) -> CliResult<hypertuple_core::IndependentReals> {
    let bad = |msg: String| Diagnostic::new(Stage::Config, "InvalidInput", msg);
    let (scheme, rest) = text
        .split_once(':')
        .ok_or_else(|| bad(format!("alpha `{text}`: expected <scheme>:<d> or user:<values>")))?;
    let scheme: Scheme = scheme.parse().map_err(|e| Diagnostic::core(Stage::Config, e))?;
    let alpha = match scheme {
        Scheme::User => {
            let v = parse_floats(rest, "alpha")?;
            independent_reals(v.len(), scheme, Some(&v))
        }
        _ => {
            let d: usize = rest.trim().parse().map_err(|e| bad(format!("alpha dimension `{rest}`: {e}")))?;
            independent_reals(d, scheme, None)
        }
    };
    alpha.map_err(|e| Diagnostic::core(Stage::Config, e))
}

fn kronecker(alpha: &str, target: &str, eps: f64, m0_max: u64) -> CliResult<Outcome> {
    let alpha = parse_alpha(alpha)?;
    let x = parse_floats(target, "target")?;
    let out = kronecker_approx(&alpha, &x, eps, m0_max).map_err(|e| Diagnostic::core(Stage::Kronecker, e))?;
    let s = out.solution();
    Ok(Outcome {
        verdict: Some(if out.found() { "found" } else { "not-found" }.into()),
        result: json!({
            "alpha": alpha,
            "target": x,
            "eps": eps,
            "m0_max": m0_max,
            "m0": s.m0,
            "m": s.m,
            "error": s.error,
            "found": out.found(),
        }),
    })
}

fn expmap(
    path: &Path,
    op: ExpOp,
    element: Option<&Path>,
    cut: Option<f64>,
    tol: &Tolerance,
    seed: u64,
) -> CliResult<Outcome> {
    let err = |e| Diagnostic::core(Stage::Expmap, e);
    let t = load_tuple(path)?;
    let alg = algebra_of(&t, tol)?;
    let table = characters(&alg, tol, seed)?;
    let id = Matrix::identity(alg.field(), alg.n());
    let element = || -> CliResult<Matrix> {
        let p = element.ok_or_else(|| Diagnostic::new(Stage::Config, "InvalidInput", "--element is required"))?;
        let a = load_matrix(p)?;
        alg.coordinates_checked(&a, MEMBERSHIP_TOL).map_err(err)?;
        Ok(a)
    };
    let result = match op {
        ExpOp::Exp => json!({ "op": "exp", "matrix": alg_exp(&element()?).map_err(err)? }),
        ExpOp::Log => {
            let a = element()?;
            let cut = cut.map_or(LogCut::Auto, LogCut::Ray);
            let b = alg_log(&alg, &table, &a, cut).map_err(err)?;
            let back = alg_exp(&b).map_err(err)?;
            let residual = (&back - &a).max_abs() / a.max_abs().max(1.0);
            json!({
                "op": "log",
                "cut": cut,
                "matrix": b,
                "roundtrip_residual": Checked::at_most(residual, ROUNDTRIP_TOL),
            })
        }
        ExpOp::Ker => {
            let gens = ker_exp_generators(&alg, &table).map_err(err)?;
            let mut worst = 0.0f64;
            for g in &gens {
                worst = worst.max((&alg_exp(g).map_err(err)? - &id).max_abs());
            }
            json!({
                "op": "ker",
                "generators": gens,
                "exp_residual": Checked::at_most(worst, KERNEL_TOL),
            })
        }
        ExpOp::Signs => {
            let g = sign_group(&alg, &table).map_err(err)?;
            let worst = g
                .generators
                .iter()
                .map(|s| (&(s * s) - &id).max_abs())
                .fold(0.0, f64::max);
            json!({
                "op": "signs",
                "generators": g.generators,
                "square_residual": Checked::at_most(worst, ROUNDTRIP_TOL),
            })
        }
    };
    Ok(Outcome { result, verdict: None })
}

fn az_case(field: Field, want: usize, tol: &Tolerance, seed: u64) -> CliResult<(Value, bool)> {
    let e = gallery_entry("az", GalleryParams { field: Some(field), ..Default::default() }, tol)?;
    let table = characters(&e.algebra, tol, seed)?;
    let tuple = build_tuple(&e.algebra, &table, Scheme::SqrtPrimes, seed)
        .map_err(|e| Diagnostic::core(Stage::Construct, e))?;
    let alg = algebra_of(&tuple, tol)?;
    let comm = commutant(&alg).map_err(|e| Diagnostic::core(Stage::Algebra, e))?;
    let equal = comm.len() == alg.dim() && comm.iter().all(|c| alg.contains(c, MEMBERSHIP_TOL));
    let non_cyclic = verify_non_cyclic_commutant(&alg, NON_CYCLIC_SAMPLES, seed)
        .map_err(|e| Diagnostic::core(Stage::Algebra, e))?;
    let ok = tuple.len() == want && equal && non_cyclic.all_non_cyclic;
    Ok((
        json!({
            "field": field,
            "tuple_len": tuple.len(),
            "expected_len": want,
            "algebra_dim": alg.dim(),
            "commutant_dim": comm.len(),
            "commutant_equals_algebra": equal,
            "membership_tolerance": MEMBERSHIP_TOL,
            "non_cyclic": non_cyclic,
            "ok": ok,
        }),
        ok,
    ))
}

fn paper_suite(tol: &Tolerance, seed: u64) -> CliResult<Outcome> {
    let (az_c, ok_c) = az_case(Field::Complex, 6, tol, seed)?;
    let (az_r, ok_r) = az_case(Field::Real, 4, tol, seed)?;

    let f4 = f4_triple(F4_DEFAULT, Scheme::SqrtPrimes, tol).map_err(|e| Diagnostic::core(Stage::Construct, e))?;
    let half = halfplane_check(&f4, [0.0, 1.0], OrbitBudget::degree(HALFPLANE_DEGREE))
        .map_err(|e| Diagnostic::core(Stage::Orbit, e))?;
    let closed = Checked::at_most(half.max_closed_form_deviation, CLOSED_FORM_TOL);
    let ok_f4 = half.confined && closed.ok;

    let mut sizes = Vec::new();
    for n in 1..=5 {
        for field in [Field::Complex, Field::Real] {
            let s = min_tuple_size(field, n).map_err(|e| Diagnostic::core(Stage::Config, e))?;
            sizes.push(json!({ "field": field, "n": n, "min_tuple_size": s }));
        }
    }
    let pass = ok_c && ok_r && ok_f4;
    Ok(Outcome {
        verdict: Some(if pass { "pass" } else { "fail" }.into()),
        result: json!({
            "az_complex": az_c,
            "az_real": az_r,
            "halfplane": {
                "params": F4_DEFAULT,
                "x": [0.0, 1.0],
                "max_degree": HALFPLANE_DEGREE,
                "report": half,
                "closed_form": closed,
                "ok": ok_f4,
            },
            "min_sizes": sizes,
        }),
    })
}
