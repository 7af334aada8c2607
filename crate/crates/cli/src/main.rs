mod args;
mod output;
mod quantities;

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;

use clap::Parser;
use lpcurv::body_file::BodyFile;
use lpcurv::generators::{default_suite, BodySpec, Family};
use lpcurv::sphere::{make_grid, Resolution, SphereGrid};
use lpcurv::stability::{all_pass, run_suite, SuiteConfig};
use lpcurv::GeometryError;
use serde_json::{json, Value};

use args::{Cli, Command, EvalArgs, FamilyArgs, FamilyName, GenArgs, SweepArgs, VerifyArgs};
use quantities::{check_exponents, parse_all};

/// Largest accepted multiple of the default grid size.
const MAX_REFINEMENT: usize = 4;

enum Failure {
    /// Bad arguments or an invalid body (exit 2).
    Usage(String),
    /// Reading or writing failed (exit 3).
    Io(String),
    /// A mandatory check failed (exit 1).
    Checks(usize),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Checks(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Io(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "error: {m}"),
            Failure::Io(m) => write!(f, "I/O error: {m}"),
            Failure::Checks(count) => write!(f, "{count} mandatory check(s) failed"),
        }
    }
}

impl From<GeometryError> for Failure {
    fn from(e: GeometryError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Eval(a) => eval(a),
        Command::Verify(a) => verify(a),
        Command::Sweep(a) => sweep(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code())
        }
    }
}

fn checked_resolution(dim: usize, size: Option<usize>) -> Result<Option<usize>, Failure> {
    if let Some(size) = size {
        let default = Resolution::default_for(dim)?.size();
        if size > MAX_REFINEMENT * default {
            return Err(Failure::Usage(format!(
                "resolution {size} exceeds {MAX_REFINEMENT} times the default {default}"
            )));
        }
    }
    Ok(size)
}

fn grid_for(dim: usize, size: Option<usize>) -> Result<Option<Arc<SphereGrid>>, Failure> {
    match checked_resolution(dim, size)? {
        Some(size) => Ok(Some(make_grid(Resolution::from_size(dim, size)?)?)),
        None => Ok(None),
    }
}

fn family_spec(a: &FamilyArgs) -> Result<BodySpec, Failure> {
    let n = a.n;
    let missing = |what: &str| Failure::Usage(format!("family {:?} needs --{what}", a.family));
    let family = match a.family {
        FamilyName::Ball => Family::Ball { radius: a.r },
        FamilyName::Ellipsoid => {
            let matrix = if !a.matrix.is_empty() {
                if a.matrix.len() != n * n {
                    return Err(Failure::Usage(format!("--matrix needs {} entries", n * n)));
                }
                a.matrix.clone()
            } else if !a.axes.is_empty() {
                if a.axes.len() != n {
                    return Err(Failure::Usage(format!("--axes needs {n} entries")));
                }
                let mut m = vec![0.0; n * n];
                for (i, v) in a.axes.iter().enumerate() {
                    m[i * n + i] = *v;
                }
                m
            } else {
                return Err(missing("axes"));
            };
            Family::Ellipsoid { matrix }
        }
        FamilyName::Harmonic => Family::Harmonic {
            eps: a.eps.ok_or_else(|| missing("eps"))?,
            degree: a.degree.ok_or_else(|| missing("degree"))?,
            order: a.order,
        },
        FamilyName::CapCut => {
            Family::CapCut { cap_height: a.cap_height.ok_or_else(|| missing("cap-height"))?, smoothing: a.smoothing }
        }
        FamilyName::Random => Family::Random { seed: a.seed, decay: a.decay },
    };
    Ok(BodySpec::new(n, family))
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn gen(a: GenArgs) -> Outcome {
    let resolution = checked_resolution(a.family.n, a.resolution.resolution)?;
    let spec = family_spec(&a.family)?.with_resolution(resolution);
    let body = spec.build()?;
    let mut metadata = BTreeMap::new();
    metadata.insert("label".to_string(), json!(spec.label()));
    metadata.insert("spec".to_string(), serde_json::to_value(&spec).expect("specs serialize"));
    metadata.insert("resolution".to_string(), json!(body.grid().resolution().size()));
    let file = BodyFile::from_body(&body, metadata)?;
    let mut out = output::sink(a.output.as_deref())?;
    writeln!(out, "{}", file.to_json())?;
    out.flush()?;
    Ok(())
}

fn eval(a: EvalArgs) -> Outcome {
    let quantities = parse_all(&a.quantities).map_err(Failure::Usage)?;
    let file = BodyFile::from_json(&read_text(&a.body)?)?;
    let n = file.dimension;
    check_exponents(&quantities, &a.p, n).map_err(Failure::Usage)?;
    let stored = file.metadata.get("resolution").and_then(Value::as_u64).map(|v| v as usize);
    let grid = grid_for(n, a.resolution.resolution.or(stored))?;
    let body = file.body(grid)?;
    let mut record = serde_json::Map::new();
    record.insert("dimension".into(), json!(n));
    record.insert("resolution".into(), json!(body.grid().resolution().size()));
    for q in quantities {
        let names = q.columns(&a.p, n);
        let values = q.evaluate(&body, &a.p)?;
        for (name, v) in names.into_iter().zip(values) {
            record.insert(name, json!(v));
        }
    }
    output::write_json(output::sink(a.output.as_deref())?, &Value::Object(record))?;
    Ok(())
}

fn suite_specs(a: &VerifyArgs) -> Result<Vec<BodySpec>, Failure> {
    let specs = match a.suite.as_str() {
        "default" => a.n.iter().flat_map(|&n| default_suite(n)).collect(),
        "empty" => Vec::new(),
        path => serde_json::from_str::<Vec<BodySpec>>(&read_text(Path::new(path))?)
            .map_err(|e| Failure::Usage(format!("suite file {path}: {e}")))?,
    };
    specs
        .into_iter()
        .map(|s| {
            let resolution = checked_resolution(s.dimension, s.resolution.or(a.resolution.resolution))?;
            Ok(s.with_resolution(resolution))
        })
        .collect()
}

fn verify(a: VerifyArgs) -> Outcome {
    for &n in &a.n {
        if n != 2 && n != 3 {
            return Err(GeometryError::UnsupportedDimension(n).into());
        }
    }
    let specs = suite_specs(&a)?;
    let min_dim = specs.iter().map(|s| s.dimension).min().unwrap_or(2);
    check_exponents(&[], &a.p, min_dim).map_err(Failure::Usage)?;
    if let Some(t) = a.tolerance {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Failure::Usage(format!("tolerance {t} must be a finite non-negative number")));
        }
    }
    let config = SuiteConfig {
        p_grid: if a.p.is_empty() { None } else { Some(a.p.clone()) },
        sln_maps: a.sln_maps,
        sln_seed: a.seed,
        asymmetry: !a.no_asymmetry,
        tolerance: a.tolerance,
        threads: a.threads,
        ..SuiteConfig::default()
    };
    let rows = run_suite(&specs, &config);
    output::write_report_csv(output::sink(a.csv.as_deref())?, &rows)?;
    let failures = rows.iter().filter(|r| !r.is_trend() && !r.pass).count();
    if let Some(path) = &a.json {
        let summary = json!({
            "rows": rows.len(),
            "failures": failures,
            "all_pass": all_pass(&rows),
            "reports": rows,
        });
        output::write_json(output::sink(Some(path))?, &summary)?;
    }
    eprintln!("{} rows, {failures} failure(s)", rows.len());
    if failures > 0 {
        return Err(Failure::Checks(failures));
    }
    Ok(())
}

fn sweep_values(a: &SweepArgs) -> Result<Vec<f64>, Failure> {
    let mut values = a.values.clone();
    if let Some(range) = &a.range {
        let parts: Vec<&str> = range.split(':').collect();
        let bad = || Failure::Usage(format!("--range must be start:stop:count, got `{range}`"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let start: f64 = parts[0].parse().map_err(|_| bad())?;
        let stop: f64 = parts[1].parse().map_err(|_| bad())?;
        let count: usize = parts[2].parse().map_err(|_| bad())?;
        values.extend((0..count).map(|i| {
            if count == 1 {
                start
            } else {
                start + (stop - start) * i as f64 / (count - 1) as f64
            }
        }));
    }
    Ok(values)
}

/// `base` with the field `param` set to `value`.
fn with_param(base: &Value, param: &str, value: f64) -> Result<BodySpec, String> {
    let mut spec = base.clone();
    let object = spec.as_object_mut().expect("specs serialize to objects");
    let integral = matches!(param, "seed" | "degree" | "order");
    let v = if integral {
        if value.fract() != 0.0 {
            return Err(format!("{param} must be an integer, got {value}"));
        }
        json!(value as i64)
    } else {
        json!(value)
    };
    object.insert(param.to_string(), v);
    serde_json::from_value(spec).map_err(|e| e.to_string())
}

fn sweep(a: SweepArgs) -> Outcome {
    let quantities = parse_all(&a.quantities).map_err(Failure::Usage)?;
    let n = a.family.n;
    check_exponents(&quantities, &a.p, n).map_err(Failure::Usage)?;
    let values = sweep_values(&a)?;
    let resolution = checked_resolution(n, a.resolution.resolution)?;
    let base = family_spec_with_defaults(&a.family)?;
    let base = serde_json::to_value(base.with_resolution(resolution)).expect("specs serialize");
    if a.param == "family" || a.param == "dimension" || base.get(&a.param).is_none() {
        return Err(Failure::Usage(format!("`{}` is not a numeric parameter of this family", a.param)));
    }

    let mut header = vec![a.param.clone()];
    for q in &quantities {
        header.extend(q.columns(&a.p, n));
    }
    header.push("error".into());
    let mut w = csv::Writer::from_writer(output::sink(a.output.as_deref())?);
    w.write_record(&header)?;
    for value in values {
        let mut row = vec![output::number(value)];
        let result = with_param(&base, &a.param, value).map_err(GeometryError::InvalidParameter).and_then(|spec| {
            let body = spec.build()?;
            let mut cells = Vec::new();
            for q in &quantities {
                cells.extend(q.evaluate(&body, &a.p)?.into_iter().map(output::number));
            }
            Ok(cells)
        });
        match result {
            Ok(cells) => {
                row.extend(cells);
                row.push(String::new());
            }
            Err(e) => {
                row.extend(std::iter::repeat_n(String::new(), header.len() - 2));
                row.push(e.to_string());
            }
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// The family spec, with placeholders for fields the sweep may supply.
fn family_spec_with_defaults(a: &FamilyArgs) -> Result<BodySpec, Failure> {
    let mut filled = a.clone();
    filled.eps.get_or_insert(0.0);
    filled.degree.get_or_insert(2);
    filled.cap_height.get_or_insert(0.1);
    if filled.axes.is_empty() && filled.matrix.is_empty() {
        filled.axes = vec![1.0; a.n];
    }
    family_spec(&filled)
}
