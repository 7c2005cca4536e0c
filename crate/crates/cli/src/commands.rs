use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::{json, Value};

use wedge3::canonform::{canonicalize, qubit_canonicalize, qubit_witness, CanonOptions, Precision};
use wedge3::exterior::{
    random_haar_unitary, random_qubit_state, random_state, sov_inverse, W6Point,
};
use wedge3::gme::{gme, mu_general, MuOptions};
use wedge3::invariants::{
    fermion_invariants, identity_report_from, identity_suite, lu_equivalent, quasi_real,
    qubit_invariants, slocc_type,
};
use wedge3::io::{parse_state, StateInput, StateJson};
use wedge3::rdm::spectrum_pairing_check;
use wedge3::region::{in_delta, on_boundary, orbit_case, sample_delta, sample_delta_with_margin};
use wedge3::Error;

use crate::args::{Command, Common, Format, Kind, Named, RegionAction, Suite};

#[derive(Debug)]
pub enum CliError {
    Domain(Error),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(Error::Parse { .. }) | CliError::Io(_) => 2,
            CliError::Domain(_) => 1,
        }
    }

    pub fn payload(&self) -> Value {
        match self {
            CliError::Domain(e) => json!({"error": e.name(), "message": e.to_string()}),
            CliError::Io(m) => json!({"error": "Io", "message": m}),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

type Out = Result<Output, CliError>;

pub enum Output {
    Json(Value),
    Csv(String),
}

/// Exit status 1 without an error payload: a verification that ran but did not pass.
pub struct Verdict {
    pub output: Output,
    pub passed: bool,
}

pub struct Config {
    pub seed: u64,
    pub precision: Precision,
    pub tol: Option<f64>,
    pub format: Format,
    pub starts: usize,
    pub jobs: usize,
}

impl Config {
    pub fn from_common(c: &Common) -> Result<Config, CliError> {
        let precision = parse_precision(&c.precision)?;
        if let Some(t) = c.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Parse {
                    detail: format!("tolerance must be positive, got {t}"),
                }
                .into());
            }
        }
        if c.starts == 0 || c.jobs == 0 {
            return Err(Error::Parse {
                detail: "--starts and --jobs must be at least 1".into(),
            }
            .into());
        }
        Ok(Config {
            seed: c.seed,
            precision,
            tol: c.tol,
            format: c.format,
            starts: c.starts,
            jobs: c.jobs,
        })
    }

    fn mu_options(&self) -> MuOptions {
        MuOptions {
            starts: self.starts,
            seed: self.seed,
            ..MuOptions::default()
        }
    }

    fn canon_options(&self) -> CanonOptions {
        let base = CanonOptions::default();
        CanonOptions {
            precision: self.precision,
            tol: self.tol.unwrap_or(base.tol),
            mu: self.mu_options(),
            ..base
        }
    }

    fn pool(&self) -> rayon::ThreadPool {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs)
            .build()
            .expect("thread pool")
    }
}

fn parse_precision(s: &str) -> Result<Precision, CliError> {
    let bad = || {
        CliError::Domain(Error::Parse {
            detail: format!("unknown precision '{s}'"),
        })
    };
    match s {
        "binary64" => Ok(Precision::Binary64),
        "extended" => Ok(Precision::Extended { digits: 64 }),
        _ => {
            let digits: u32 = s
                .strip_prefix("extended:")
                .ok_or_else(bad)?
                .parse()
                .map_err(|_| bad())?;
            if digits < 30 {
                return Err(Error::Parse {
                    detail: format!("extended precision needs at least 30 digits, got {digits}"),
                }
                .into());
            }
            Ok(Precision::Extended { digits })
        }
    }
}

fn read_state(path: &Path) -> Result<StateInput, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(parse_state(&text)?)
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

/// Runs `f` on every input in order, in parallel when --jobs > 1. One input gives a bare object.
fn batch<F>(cfg: &Config, inputs: &[PathBuf], f: F) -> Out
where
    F: Fn(&StateInput) -> Result<Value, CliError> + Sync,
{
    let states = inputs
        .iter()
        .map(|p| read_state(p))
        .collect::<Result<Vec<_>, _>>()?;
    let results: Vec<Result<Value, CliError>> =
        cfg.pool().install(|| states.par_iter().map(&f).collect());
    let mut values = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(Output::Json(if values.len() == 1 {
        values.remove(0)
    } else {
        Value::Array(values)
    }))
}

fn named_state(n: Named) -> StateJson {
    let r2 = 0.5f64.sqrt();
    let r3 = (1.0f64 / 3.0).sqrt();
    let p = match n {
        Named::Separable => W6Point::new(0.0, 0.0, 0.0, 1.0, 0.0, 0.0),
        Named::Biseparable => W6Point::new(r2, 0.0, 0.0, r2, 0.0, 0.0),
        Named::W => W6Point::new(r3, r3, r3, 0.0, 0.0, 0.0),
        Named::Ghz => W6Point::new(0.0, 0.0, 0.0, r2, r2, 0.0),
    };
    StateJson::from_w6(&p)
}

fn gen(cfg: &Config, kind: Kind, named: Option<Named>, input: Option<&Path>, count: usize) -> Out {
    let item = |k: u64| -> Result<StateJson, CliError> {
        let seed = cfg.seed.wrapping_add(k);
        if let Some(n) = named {
            return Ok(named_state(n));
        }
        if let Some(path) = input {
            let psi = read_state(path)?.fermion();
            let u = random_haar_unitary::<f64>(seed);
            return Ok(StateJson::from_fermion(&u.apply(&psi)));
        }
        Ok(match kind {
            Kind::Fermion20 => StateJson::from_fermion(&random_state(seed)),
            Kind::Qubit8 => StateJson::from_qubit(&random_qubit_state(seed)),
            Kind::W6 => StateJson::from_w6(&sample_delta(1, seed)[0]),
        })
    };
    let mut states = (0..count.max(1) as u64)
        .map(item)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Output::Json(if states.len() == 1 {
        to_value(&states.remove(0))
    } else {
        to_value(&states)
    }))
}

fn invariants_of(s: &StateInput) -> Result<Value, CliError> {
    let psi = s.fermion();
    if psi.is_zero() {
        return Err(Error::ZeroState.into());
    }
    let inv = fermion_invariants(&psi);
    let mut out = json!({
        "M": inv.m,
        "F": [inv.f.re, inv.f.im],
        "J": [inv.j.re, inv.j.im],
        "residuals": identity_report_from(&inv),
    });
    if let Some(q) = s.qubit() {
        let qi = qubit_invariants(&q);
        out["Q"] = to_value(&qi.q);
        out["hyperdeterminant"] = json!([qi.hdet.re, qi.hdet.im]);
    }
    Ok(out)
}

fn canonical_of(
    cfg: &Config,
    s: &StateInput,
    qubit: bool,
    witness: bool,
) -> Result<Value, CliError> {
    let opts = cfg.canon_options();
    if qubit || witness {
        let phi = match s.qubit() {
            Some(q) => q,
            None => sov_inverse(&s.fermion(), 1e-10)?,
        };
        let c = qubit_canonicalize(&phi, &opts)?;
        let mut out = json!({
            "point": c.point,
            "permutation": c.permutation,
            "case": c.delta.case,
            "residuals": c.delta.residuals,
            "d_source": c.delta.d_source,
            "mu": c.delta.mu,
            "delta_point": c.delta.point,
            "escalated": c.delta.escalated,
        });
        if witness {
            out["witness"] = to_value(&qubit_witness(&phi, &opts)?);
        }
        return Ok(out);
    }
    let r = canonicalize(&s.fermion(), &opts)?;
    let mut out = to_value(&r);
    out["witness"] = Value::Null;
    Ok(out)
}

fn classify_of(cfg: &Config, s: &StateInput) -> Result<Value, CliError> {
    let psi = s.fermion();
    let t = slocc_type(&psi)?;
    let tol = cfg.tol.unwrap_or(1e-10);
    Ok(json!({"type": t.label(), "quasi_real": quasi_real(&psi.normalized()?, tol)}))
}

fn gme_of(cfg: &Config, s: &StateInput) -> Result<Value, CliError> {
    let r = gme(&s.fermion(), &cfg.mu_options())?;
    Ok(json!({"mu": r.mu, "gme": r.gme, "maximizer": r.maximizer, "converged": r.converged}))
}

fn equiv(cfg: &Config, a: &Path, b: &Path) -> Out {
    let (pa, pb) = (read_state(a)?.fermion(), read_state(b)?.fermion());
    let tol = cfg.tol.unwrap_or(1e-8);
    let diff = if pa.is_zero() || pb.is_zero() {
        None
    } else {
        let ma = fermion_invariants(&pa.normalized()?).m;
        let mb = fermion_invariants(&pb.normalized()?).m;
        Some((0..7).map(|k| (ma[k] - mb[k]).abs()).fold(0.0, f64::max))
    };
    Ok(Output::Json(
        json!({"equivalent": lu_equivalent(&pa, &pb, tol), "max_invariant_difference": diff}),
    ))
}

fn region_check(cfg: &Config, path: &Path) -> Out {
    let p = match read_state(path)? {
        StateInput::W6(p) => p,
        _ => {
            return Err(Error::Parse {
                detail: "region check expects a w6 point".into(),
            }
            .into())
        }
    };
    let tol = cfg.tol.unwrap_or(1e-9);
    let v = in_delta(&p, tol)?;
    let mut out = json!({
        "in_delta": v.in_region,
        "violated": v.violated,
        "margins": v.margins,
    });
    if v.in_region {
        out["on_boundary"] = json!(on_boundary(&p, tol)?);
        out["case"] = to_value(&orbit_case(&p, tol)?);
    }
    Ok(Output::Json(out))
}

fn region_sample(cfg: &Config, count: usize) -> Out {
    let tol = cfg.tol.unwrap_or(1e-9);
    let pts = sample_delta(count, cfg.seed);
    let rows = pts
        .iter()
        .map(|p| {
            let interior = !on_boundary(p, tol)?;
            let case = orbit_case(p, tol)?;
            Ok((p.clone(), interior, case))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    if cfg.format == Format::Csv {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(["a", "b", "c", "d", "x", "y", "interior_flag", "case_tag"])
            .map_err(io)?;
        for (p, interior, case) in &rows {
            let mut rec: Vec<String> = p.as_array().iter().map(|v| v.to_string()).collect();
            rec.push(u8::from(*interior).to_string());
            rec.push(case.tag().to_string());
            w.write_record(&rec).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        return Ok(Output::Csv(String::from_utf8(bytes).expect("utf8")));
    }
    let list: Vec<Value> = rows
        .iter()
        .map(|(p, i, c)| json!({"point": p, "interior_flag": i, "case_tag": c.tag()}))
        .collect();
    Ok(Output::Json(Value::Array(list)))
}

fn qubit_map(path: &Path) -> Out {
    let out = match read_state(path)? {
        StateInput::Fermion(psi) => StateJson::from_qubit(&sov_inverse(&psi, 1e-10)?),
        other => StateJson::from_fermion(&other.fermion()),
    };
    Ok(Output::Json(to_value(&out)))
}

fn item_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_mul(1_000_003).wrapping_add(i as u64)
}

fn max_of(vals: &[f64]) -> f64 {
    vals.iter().copied().fold(0.0, f64::max)
}

fn verify_suite(cfg: &Config, suite: Suite, count: usize) -> Result<Value, CliError> {
    let ids: Vec<usize> = (0..count).collect();
    let pool = cfg.pool();
    let (value, tol, passed) = match suite {
        Suite::Identities => {
            let tol = cfg.tol.unwrap_or(1e-8);
            let r: Vec<f64> = pool.install(|| {
                ids.par_iter()
                    .map(|&i| {
                        identity_suite(&random_state(item_seed(cfg.seed, i)).normalized().unwrap())
                            .max()
                    })
                    .collect()
            });
            let m = max_of(&r);
            (m, tol, m < tol)
        }
        Suite::Canonical => {
            let tol = cfg.tol.unwrap_or(1e-6);
            let pts = sample_delta_with_margin(count, cfg.seed, 1e-3);
            let opts = cfg.canon_options();
            let r: Vec<Result<f64, Error>> = pool.install(|| {
                pts.par_iter()
                    .enumerate()
                    .map(|(i, p)| {
                        let u = random_haar_unitary::<f64>(item_seed(cfg.seed, i));
                        let c = canonicalize(&u.apply(&p.to_state()), &opts)?;
                        Ok(c.point.max_abs_diff(p))
                    })
                    .collect()
            });
            let r = r.into_iter().collect::<Result<Vec<_>, _>>()?;
            let m = max_of(&r);
            (m, tol, m < tol)
        }
        Suite::Gme => {
            let tol = cfg.tol.unwrap_or(1e-6);
            let mo = cfg.mu_options();
            let r: Vec<Result<f64, Error>> = pool.install(|| {
                ids.par_iter()
                    .map(|&i| Ok(mu_general(&random_state(item_seed(cfg.seed, i)), &mo)?.mu))
                    .collect()
            });
            let r = r.into_iter().collect::<Result<Vec<_>, _>>()?;
            let min = r.iter().copied().fold(f64::INFINITY, f64::min);
            let deficit = (2.0 / 3.0 - min).max(0.0);
            (deficit, tol, deficit < tol)
        }
        Suite::Spectrum => {
            let tol = cfg.tol.unwrap_or(1e-10);
            let r: Vec<f64> = pool.install(|| {
                ids.par_iter()
                    .map(|&i| spectrum_pairing_check(&random_state(item_seed(cfg.seed, i))))
                    .collect()
            });
            let m = max_of(&r);
            (m, tol, m < tol)
        }
        Suite::Qubit => {
            let tol = cfg.tol.unwrap_or(1e-8);
            let opts = cfg.canon_options();
            let r: Vec<Result<f64, Error>> = pool.install(|| {
                ids.par_iter()
                    .map(|&i| {
                        Ok(
                            qubit_witness(&random_qubit_state(item_seed(cfg.seed, i)), &opts)?
                                .residual,
                        )
                    })
                    .collect()
            });
            let r = r.into_iter().collect::<Result<Vec<_>, _>>()?;
            let m = max_of(&r);
            (m, tol, m < tol)
        }
        Suite::All => unreachable!("expanded by the caller"),
    };
    Ok(
        json!({"suite": format!("{suite:?}").to_lowercase(), "count": count, "seed": cfg.seed, "max_residual": value, "tolerance": tol, "passed": passed}),
    )
}

fn verify(cfg: &Config, suite: Suite, count: usize) -> Result<Verdict, CliError> {
    let suites = match suite {
        Suite::All => vec![
            Suite::Identities,
            Suite::Canonical,
            Suite::Gme,
            Suite::Spectrum,
            Suite::Qubit,
        ],
        s => vec![s],
    };
    let reports = suites
        .into_iter()
        .map(|s| verify_suite(cfg, s, count))
        .collect::<Result<Vec<_>, _>>()?;
    let passed = reports.iter().all(|r| r["passed"] == json!(true));
    Ok(Verdict {
        output: Output::Json(json!({"passed": passed, "reports": reports})),
        passed,
    })
}

pub fn run(command: &Command, cfg: &Config) -> Result<Verdict, CliError> {
    let ok = |o: Out| {
        o.map(|output| Verdict {
            output,
            passed: true,
        })
    };
    match command {
        Command::Gen {
            kind,
            named,
            input,
            count,
        } => ok(gen(cfg, *kind, *named, input.as_deref(), *count)),
        Command::Invariants { input } => ok(batch(cfg, input, invariants_of)),
        Command::Canonicalize {
            input,
            qubit,
            witness,
        } => ok(batch(cfg, input, |s| {
            canonical_of(cfg, s, *qubit, *witness)
        })),
        Command::Equiv { a, b } => ok(equiv(cfg, a, b)),
        Command::Classify { input } => ok(batch(cfg, input, |s| classify_of(cfg, s))),
        Command::Gme { input } => ok(batch(cfg, input, |s| gme_of(cfg, s))),
        Command::Region {
            action: RegionAction::Check { input },
        } => ok(region_check(cfg, input)),
        Command::Region {
            action: RegionAction::Sample { count },
        } => ok(region_sample(cfg, *count)),
        Command::QubitMap { input } => ok(qubit_map(input)),
        Command::Verify { suite, count } => verify(cfg, *suite, *count),
    }
}

/// Dotted key paths with scalar values, one per line.
pub fn flatten_text(v: &Value) -> String {
    fn walk(prefix: &str, v: &Value, out: &mut Vec<String>) {
        match v {
            Value::Object(m) => {
                for (k, x) in m {
                    let p = if prefix.is_empty() {
                        k.clone()
                    } else {
                        format!("{prefix}.{k}")
                    };
                    walk(&p, x, out);
                }
            }
            Value::Array(a) => {
                for (i, x) in a.iter().enumerate() {
                    walk(&format!("{prefix}[{i}]"), x, out);
                }
            }
            _ => out.push(format!("{prefix} = {v}")),
        }
    }
    let mut out = Vec::new();
    walk("", v, &mut out);
    out.join("\n")
}

pub fn render(output: &Output, format: Format) -> String {
    match (output, format) {
        (Output::Csv(s), _) => s.trim_end().to_string(),
        (Output::Json(v), Format::Text) => flatten_text(v),
        (Output::Json(v), _) => serde_json::to_string_pretty(v).expect("json"),
    }
}
