use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use cr_core::catalog::{self, CheckOptions};
use cr_core::cmw::{
    cmw_tensor, cone_definiteness, harmonic_decompose, hyperquadric_obstruction, prepare_at_point, CmwError,
    ConeConfig, ObstructionConfig, Quartic22Tensor, TensorJson,
};
use cr_core::hermpoly::json::{coordinate_from_value, holo_to_json, point_from_value, rational_to_string};
use cr_core::hermpoly::rational::parse_rational;
use cr_core::levi::{levi_signature, pseudoconvexity_scan, to_c64_point, LeviError, SamplerConfig};
use cr_core::segremap::{segre_polynomial, verify_map_sends, MapCheckMode, MapVerdict, PolyMap, SegreError};

use crate::args::{CatalogAction, Command, ConeArgs, Format};
use crate::report::{
    emit, envelope, failed, load_surface, parse_point, point_strings, read_text, to_pretty, usage, CliError, CliResult,
    VERSION,
};

/// Exit status of a command that ran to completion.
pub enum Status {
    Pass,
    CheckFailed,
}

fn levi_err(e: LeviError) -> CliError {
    match e {
        LeviError::NotOnSurface(_) | LeviError::InvalidInput(_) => usage(e),
        other => failed(other),
    }
}

fn cmw_err(e: CmwError) -> CliError {
    match e {
        CmwError::NotOnSurface(_) | CmwError::InvalidInput(_) => usage(e),
        CmwError::Levi(l) => levi_err(l),
        other => failed(other),
    }
}

fn segre_err(e: SegreError) -> CliError {
    match e {
        SegreError::Dimension(_) => usage(e),
        SegreError::Levi(l) => levi_err(l),
        other => failed(other),
    }
}

pub fn run(cmd: Command) -> CliResult<Status> {
    match cmd {
        Command::Levi { at, tol } => {
            let m = load_surface(&at.surface)?;
            let p = parse_point(&at.point, m.n_ambient())?;
            let pc = to_c64_point(&p);
            let residual = m.eval(&pc).abs() / m.abs_term_sum(&pc).max(1.0);
            if residual > tol {
                return Err(usage(format!("point is not on the surface: |rho(p)| relative to its terms is {residual:e}")));
            }
            let r = levi_signature(&m, &pc, tol).map_err(levi_err)?;
            emit(&to_pretty(&envelope("levi", None, json!({ "tol": tol }), &r)?)?, None)?;
            Ok(Status::Pass)
        }
        Command::Scan { surface, samples, seed, region, tol, out } => scan(&surface, samples, seed, region.as_deref(), tol, out),
        Command::Segre { surface, base } => {
            let m = load_surface(&surface)?;
            let w = parse_point(&base, m.n_ambient())?;
            let s = segre_polynomial(&m, &w).map_err(segre_err)?;
            let report = json!({
                "surface": m.name(),
                "base": point_strings(&s.base),
                "polynomial": holo_to_json(&s.poly),
                "display": s.poly.to_string(),
            });
            emit(&to_pretty(&envelope("segre", None, json!({}), report)?)?, None)?;
            Ok(Status::Pass)
        }
        Command::MapCheck { surface, target, map, exact: _, numeric, samples, seed, tol } => {
            let m = load_surface(&surface)?;
            let mt = load_surface(&target)?;
            let text = read_text(&map)?;
            let f = PolyMap::from_json_str(&text).map_err(|e| usage(format!("{}: {e}", map.display())))?;
            let mode = if numeric {
                let sampler = SamplerConfig::radial(vec![Complex64::new(0.0, 0.0); m.n_ambient()]);
                MapCheckMode::Numeric { sampler, samples, seed, tol }
            } else {
                MapCheckMode::Exact
            };
            let verdict = verify_map_sends(&f, &m, &mt, &mode).map_err(segre_err)?;
            let report = verdict_json(&verdict, m.name(), mt.name());
            let (seed_echo, tolerances) = if numeric { (Some(seed), json!({ "tol": tol })) } else { (None, json!({})) };
            emit(&to_pretty(&envelope("map-check", seed_echo, tolerances, report)?)?, None)?;
            Ok(if verdict.is_yes() { Status::Pass } else { Status::CheckFailed })
        }
        Command::Cmw { at, out } => cmw(&at.surface, &at.point, out),
        Command::ConeCheck { tensor, cone } => {
            let text = read_text(&tensor)?;
            let j: TensorJson = serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", tensor.display())))?;
            let t = Quartic22Tensor::from_json(&j).map_err(|e| usage(format!("{}: {e}", tensor.display())))?;
            let cfg = cone_config(&cone);
            let v = cone_definiteness(&t, &cfg);
            let tolerances = json!({ "rel_tol": cfg.rel_tol, "samples": cfg.samples, "refine": cfg.refine });
            emit(&to_pretty(&envelope("cone-check", Some(cfg.seed), tolerances, &v)?)?, None)?;
            Ok(Status::Pass)
        }
        Command::Obstruction { at, cone, format, out } => {
            let m = load_surface(&at.surface)?;
            let p = parse_point(&at.point, m.n_ambient())?;
            let cfg = ObstructionConfig { cone: cone_config(&cone) };
            let r = hyperquadric_obstruction(&m, &p, &cfg).map_err(cmw_err)?;
            let tolerances = json!({ "rel_tol": cfg.cone.rel_tol, "samples": cfg.cone.samples, "refine": cfg.cone.refine });
            let env = to_pretty(&envelope("obstruction", Some(cfg.cone.seed), tolerances, &r)?)?;
            if let Some(path) = &out {
                emit(&env, Some(path))?;
            }
            match format {
                Format::Json => emit(&env, None)?,
                Format::Text => {
                    let text = format!(
                        "cr {VERSION} obstruction (seed {}, rel_tol {:e}, {} cone samples)\n\
                         surface: {}\npoint: [{}]\nCR dimension n = {}, ell = {}{}\n\
                         cone test: {:?} (max {:.6e}, min {:.6e})\ncriterion: {}\noutcome: {:?}\n{}\n",
                        cfg.cone.seed,
                        cfg.cone.rel_tol,
                        r.verdict.samples_used,
                        r.surface,
                        r.point.join(", "),
                        r.n,
                        r.ell,
                        if r.orientation_flipped { " (orientation flipped)" } else { "" },
                        r.verdict.classification,
                        r.verdict.max_value,
                        r.verdict.min_value,
                        r.criterion,
                        r.outcome,
                        r.explanation
                    );
                    emit(&text, None)?;
                }
            }
            Ok(Status::Pass)
        }
        Command::Catalog { action } => catalog_cmd(action),
        Command::Check { id, params, seed, tol, format, eps_sweep, sweep_samples } => {
            check(&id, &params, seed, tol, format, eps_sweep.as_deref(), sweep_samples)
        }
    }
}

fn cone_config(a: &ConeArgs) -> ConeConfig {
    ConeConfig { samples: a.samples, refine: a.refine, seed: a.seed, rel_tol: a.rel_tol, ..ConeConfig::default() }
}

fn verdict_json(v: &MapVerdict, source: &str, target: &str) -> Value {
    let mut out = json!({ "source": source, "target": target, "verdict": v.label() });
    match v {
        MapVerdict::ExactYes { cofactor } => out["cofactor"] = json!(cofactor.to_string()),
        MapVerdict::ExactNo { reason } => out["reason"] = json!(reason),
        MapVerdict::NumericYes { max_residual, samples } => {
            out["max_residual"] = json!(max_residual);
            out["samples"] = json!(samples);
        }
        MapVerdict::NumericNo { max_residual, samples, worst_point } => {
            out["max_residual"] = json!(max_residual);
            out["samples"] = json!(samples);
            out["worst_point"] = json!(worst_point);
        }
    }
    out
}

fn region_config(text: Option<&str>, n: usize) -> CliResult<SamplerConfig> {
    let zero = vec![Complex64::new(0.0, 0.0); n];
    let Some(text) = text else { return Ok(SamplerConfig::radial(zero)) };
    let v: Value = serde_json::from_str(text).map_err(|e| usage(format!("region: {e}")))?;
    let obj = v.as_object().ok_or_else(|| usage("region must be a JSON object"))?;
    if let Some(k) = obj.keys().find(|k| !["center", "radius", "direction", "max_abs"].contains(&k.as_str())) {
        return Err(usage(format!("region: unknown key '{k}'")));
    }
    let vector = |v: &Value, what: &str| -> CliResult<Vec<Complex64>> {
        let p = point_from_value(v).map_err(|e| usage(format!("region {what}: {e}")))?;
        if p.len() != n {
            return Err(usage(format!("region {what} has {} coordinates, expected {n}", p.len())));
        }
        Ok(to_c64_point(&p))
    };
    let center = match obj.get("center") {
        Some(c) => vector(c, "center")?,
        None => zero,
    };
    let radius = match obj.get("radius") {
        Some(r) => r.as_f64().filter(|r| *r >= 0.0).ok_or_else(|| usage("region radius must be a nonnegative number"))?,
        None => 0.0,
    };
    let mut cfg = match obj.get("direction") {
        None => SamplerConfig::radial(center),
        Some(Value::String(s)) if s == "radial" => SamplerConfig::radial(center),
        Some(d) => SamplerConfig::fixed(center, radius, vector(d, "direction")?),
    };
    if let Some(b) = obj.get("max_abs") {
        let items = b.as_array().filter(|a| a.len() == n).ok_or_else(|| usage(format!("region max_abs must be an array of {n} entries")))?;
        let bounds = items
            .iter()
            .map(|x| match x {
                Value::Null => Ok(None),
                other => coordinate_from_value(other)
                    .ok()
                    .filter(|c| c.is_real())
                    .map(|c| Some(c.to_c64().re))
                    .ok_or_else(|| usage("region max_abs entries must be numbers or null")),
            })
            .collect::<CliResult<Vec<_>>>()?;
        cfg = cfg.with_max_abs(bounds);
    }
    Ok(cfg)
}

fn format_vec(v: &[f64]) -> String {
    format!("[{}]", v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(";"))
}

fn scan(surface: &Path, samples: usize, seed: u64, region: Option<&str>, tol: f64, out: Option<PathBuf>) -> CliResult<Status> {
    let m = load_surface(surface)?;
    let cfg = region_config(region, m.n_ambient())?;
    let report = pseudoconvexity_scan(&m, &cfg, samples, seed, tol).map_err(levi_err)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["point", "eigenvalues", "signature", "verdict"]).map_err(failed)?;
    for s in &report.samples {
        let point = format!(
            "[{}]",
            s.report.point.iter().map(|[re, im]| format!("{re:e}{im:+e}i")).collect::<Vec<_>>().join(";")
        );
        let sig = &s.report.signature;
        w.write_record([
            point,
            format_vec(&s.report.eigenvalues),
            format!("({},{},{})", sig.n_plus, sig.n_minus, sig.n_zero),
            format!("{:?}", s.report.verdict),
        ])
        .map_err(failed)?;
    }
    let csv_bytes = w.into_inner().map_err(failed)?;
    let csv_text = String::from_utf8(csv_bytes).map_err(failed)?;
    #[derive(Serialize)]
    struct Summary<'a> {
        surface: &'a str,
        samples: usize,
        min_eigenvalue: f64,
        mixed: usize,
        near_degenerate: usize,
        pseudoconvexity_violations: usize,
        csv: Option<String>,
    }
    let summary = Summary {
        surface: m.name(),
        samples: report.samples.len(),
        min_eigenvalue: report.min_eigenvalue,
        mixed: report.mixed.len(),
        near_degenerate: report.near_degenerate.len(),
        pseudoconvexity_violations: report.pseudoconvexity_violations.len(),
        csv: out.as_ref().map(|p| p.display().to_string()),
    };
    let env = to_pretty(&envelope("scan", Some(seed), json!({ "tol": tol }), summary)?)?;
    match &out {
        Some(path) => {
            emit(&csv_text, Some(path))?;
            emit(&env, None)?;
        }
        None => {
            emit(&csv_text, None)?;
            eprint!("{env}");
        }
    }
    Ok(Status::Pass)
}

/// Tensor file: the tensor JSON plus provenance fields, readable by `cone-check`.
#[derive(Serialize)]
struct TensorFile<'a> {
    tool: &'a str,
    version: &'a str,
    surface: &'a str,
    point: Vec<String>,
    #[serde(flatten)]
    tensor: TensorJson,
}

fn cmw(surface: &Path, point: &str, out: Option<PathBuf>) -> CliResult<Status> {
    let m = load_surface(surface)?;
    let p = parse_point(point, m.n_ambient())?;
    let prepared = prepare_at_point(&m, &p).map_err(cmw_err)?;
    let replay = prepared.replay(&m).map_err(cmw_err)?;
    let h = harmonic_decompose(&prepared.quartic22, prepared.ell).map_err(cmw_err)?;
    let t = cmw_tensor(&prepared).map_err(cmw_err)?;
    let tensor_json = t.to_json();
    if let Some(path) = &out {
        let file = TensorFile { tool: "cr", version: VERSION, surface: m.name(), point: point_strings(&p), tensor: tensor_json.clone() };
        emit(&serde_json::to_string_pretty(&file).map_err(failed)? , Some(path))?;
    }
    let report = json!({
        "surface": m.name(),
        "point": point_strings(&p),
        "n": prepared.n,
        "ell": prepared.ell,
        "orientation": prepared.orientation,
        "levi_diagonal": prepared.levi_diagonal.iter().map(rational_to_string).collect::<Vec<_>>(),
        "normalization_residual": prepared.normalization_residual,
        "passes": prepared.passes,
        "quartic22": prepared.quartic22.to_string(),
        "dropped_31_13": prepared.dropped.to_string(),
        "removed_21": prepared.removed_21.to_string(),
        "harmonic": h,
        "tensor_is_zero": t.is_zero(),
        "tensor": tensor_json,
        "replay": replay,
        "tensor_file": out.as_ref().map(|p| p.display().to_string()),
    });
    emit(&to_pretty(&envelope("cmw", None, json!({}), report)?)?, None)?;
    Ok(Status::Pass)
}

fn catalog_cmd(action: CatalogAction) -> CliResult<Status> {
    match action {
        CatalogAction::List { format } => {
            let entries = catalog::list();
            let text = match format {
                Format::Json => to_pretty(&serde_json::to_value(&entries).map_err(failed)?)?,
                Format::Text => entries
                    .iter()
                    .map(|e| {
                        let d = e.defaults.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(",");
                        format!("{:<18} {:<24} {}\n", e.id, d, e.description)
                    })
                    .collect(),
            };
            emit(&text, None)?;
            Ok(Status::Pass)
        }
        CatalogAction::Make { id, params, out } => {
            let entry = make_entry(&id, &params)?;
            emit(&(entry.surface_json() + "\n"), out.as_ref())?;
            if out.is_some() {
                let info = json!({
                    "id": entry.id,
                    "display": entry.display,
                    "params": entry.params_display(),
                    "metadata": entry.metadata,
                    "base_point": entry.base_point.as_ref().map(|p| point_strings(p)),
                });
                emit(&to_pretty(&envelope("catalog make", None, json!({}), info)?)?, None)?;
            }
            Ok(Status::Pass)
        }
    }
}

fn make_entry(id: &str, params: &str) -> CliResult<catalog::CatalogEntry> {
    let p = catalog::parse_params(params).map_err(usage)?;
    catalog::make(id, &p).map_err(usage)
}

fn check(id: &str, params: &str, seed: u64, tol: f64, format: Format, eps_sweep: Option<&str>, sweep_samples: usize) -> CliResult<Status> {
    let entry = make_entry(id, params)?;
    let report = catalog::run_expected_checks(&entry, &CheckOptions { seed, tol });
    let sweep = match eps_sweep {
        None => None,
        Some(list) => {
            if entry.id != "m-eps" {
                return Err(usage("--eps-sweep applies to m-eps only"));
            }
            let eps = list.split(',').map(|s| parse_rational(s.trim())).collect::<Result<Vec<_>, _>>().map_err(usage)?;
            let as_usize = |k: &str| entry.params[k].to_integer().try_into().map_err(usage);
            let (n, ell): (usize, usize) = (as_usize("n")?, as_usize("ell")?);
            Some(catalog::m_eps_signature_sweep(n, ell, &eps, sweep_samples, seed, tol).map_err(failed)?)
        }
    };
    match format {
        Format::Json => {
            let mut v = envelope("check", Some(seed), json!({ "tol": tol }), &report)?;
            if let Some(s) = &sweep {
                v["eps_sweep"] = serde_json::to_value(s).map_err(failed)?;
            }
            emit(&to_pretty(&v)?, None)?;
        }
        Format::Text => {
            let params: BTreeMap<_, _> = report.params.clone();
            let mut text = format!(
                "cr {VERSION} check {} (seed {seed}, tol {tol:e}) params {}\n",
                report.entry,
                params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(",")
            );
            for r in &report.results {
                text += &format!("{} {}: {}\n  expected: {}\n", if r.passed { "PASS" } else { "FAIL" }, r.name, r.observed, r.expected);
            }
            if let Some(rows) = &sweep {
                text += "eps sweep (empirical; not a bound on the threshold):\n";
                for r in rows {
                    text += &format!("  eps={} matching {}/{} constant={}\n", r.eps, r.matching, r.samples, r.constant);
                }
            }
            text += &format!("{}\n", if report.all_passed { "all checks passed" } else { "some checks failed" });
            emit(&text, None)?;
        }
    }
    Ok(if report.all_passed { Status::Pass } else { Status::CheckFailed })
}
