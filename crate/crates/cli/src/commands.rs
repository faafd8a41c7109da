use std::path::Path;
use std::sync::Arc;

use nonrev::chain::stationary_residual;
use nonrev::fokker_planck::{dual_drift, example_force_split, exl_check, GridModel};
use nonrev::gillespie::{empirical_measures, entropy_rate_estimate, simulate as run_path};
use nonrev::io::{chain_from_json, density_from_json, edge_field_file, edge_field_from_json, grid_model_from_json, ChainFile};
use nonrev::variational::{
    decompose as split_lagrangian, donsker_varadhan, edge_lagrangian, hamiltonian_from_generator,
    hamiltonian_from_psi, min_hamiltonian, pairing_coefficient, DynHamiltonian, Hamiltonian, ProbeConfig,
};
use nonrev::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load_chain(path: &Path) -> CliResult<ChainSpec<f64>> {
    Ok(chain_from_json(&read(path)?)?)
}

fn resolve_density(spec: &ChainSpec<f64>, which: &str) -> CliResult<Density<f64>> {
    let rho = match which {
        "stationary" => nonrev::stationary(spec)?,
        "uniform" => Density::uniform(spec.n_states()),
        path => density_from_json(&read(Path::new(path))?)?,
    };
    rho.ensure_len(spec.n_states())?;
    Ok(rho)
}

fn to_value<S: Serialize>(s: &S) -> Value {
    serde_json::to_value(s).expect("report types serialise")
}

fn field(f: &EdgeField<f64>) -> Value {
    to_value(&edge_field_file(f))
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn validate(chain: &Path) -> CliResult<Value> {
    let spec = load_chain(chain)?;
    Ok(to_value(&nonrev::validate(&spec)))
}

pub fn stationary(chain: &Path, tol: Option<f64>) -> CliResult<Value> {
    let tol = tol.unwrap_or(1e-12);
    let spec = load_chain(chain)?;
    let pi = nonrev::stationary(&spec)?;
    let residual = stationary_residual(&spec, &pi);
    Ok(json!({
        "pi": pi.values(),
        "residual": residual,
        "tol": tol,
        "passed": residual <= tol,
    }))
}

pub fn forces(chain: &Path, rho: &str, tol: Option<f64>) -> CliResult<Value> {
    let tol = tol.unwrap_or(1e-10);
    let spec = load_chain(chain)?;
    let rho = resolve_density(&spec, rho)?;
    let (mob, f) = mobility_force(&spec, &rho)?;
    let j = flux(&mob, &f)?;
    let (p, ps, jf) = (psi(&mob, &j)?, psi_star(&mob, &f)?, pairing(&j, &f)?);
    let fy = (p + ps - jf).abs();
    Ok(json!({
        "rho": rho.values(),
        "mobility": field(&EdgeField::new(Arc::clone(mob.edges()), mob.values().to_vec())?),
        "force": field(&f),
        "flux": field(&j),
        "psi": p,
        "psi_star": ps,
        "pairing": jf,
        "e": entropy_production(&j, &f)?,
        "fenchel_young_defect": fy,
        "tol": tol,
        "passed": fy <= tol,
    }))
}

/// Parse one `--iso` selector and build the force it names.
fn iso_force(
    spec: &ChainSpec<f64>,
    rho: &Density<f64>,
    mob: &Mobility<f64>,
    f: &EdgeField<f64>,
    which: &str,
) -> CliResult<EdgeField<f64>> {
    let bad = || CliError::Usage(format!("unrecognised --iso value {which:?}"));
    let (name, args) = which.split_once(':').unwrap_or((which, ""));
    let selector = match name {
        "force" => return Ok(f.clone()),
        "negated" => return Ok(f.map(|v| -v)),
        "dual" => IsoSelector::Dual { spec, rho },
        "flip" => IsoSelector::SignFlip(
            args.split(',')
                .filter(|s| !s.is_empty())
                .map(|s| s.trim().parse().map_err(|_| bad()))
                .collect::<CliResult<_>>()?,
        ),
        "two-edge" => {
            let parts: Vec<&str> = args.split(',').map(str::trim).collect();
            let [a, b, d] = parts[..] else { return Err(bad()) };
            IsoSelector::TwoEdge {
                first: a.parse().map_err(|_| bad())?,
                second: b.parse().map_err(|_| bad())?,
                delta: d.parse().map_err(|_| bad())?,
            }
        }
        _ => return Err(bad()),
    };
    Ok(iso_force_family(mob, f, &selector)?)
}

fn split_json(s: &EntropySplit<f64>, tol: f64) -> Value {
    let mut v = to_value(s);
    v["tol"] = json!(tol);
    v["passed"] = json!(s.defect <= tol && s.term1 >= -1e-12 && s.term2 >= -1e-12);
    v
}

pub fn entropy_split(chain: &Path, rho: &str, iso: &str, tol: Option<f64>) -> CliResult<Value> {
    let tol = tol.unwrap_or(1e-9);
    let spec = load_chain(chain)?;
    let rho = resolve_density(&spec, rho)?;
    let (mob, f) = mobility_force(&spec, &rho)?;
    let iso_f = iso_force(&spec, &rho, &mob, &f, iso)?;
    let s = entropy_decomposition(&spec, &rho, &iso_f)?;
    let mut v = split_json(&s, tol);
    v["iso"] = json!(iso);
    v["iso_force"] = field(&iso_f);
    Ok(v)
}

pub fn iso_family(chain: &Path, rho: &str, iso: &[String], tol: Option<f64>) -> CliResult<Value> {
    let tol = tol.unwrap_or(1e-9);
    let spec = load_chain(chain)?;
    let rho = resolve_density(&spec, rho)?;
    let (mob, f) = mobility_force(&spec, &rho)?;
    let defaults = ["force".to_string(), "negated".to_string(), "dual".to_string()];
    let names = if iso.is_empty() { &defaults[..] } else { iso };
    let target = psi_star(&mob, &f)?;
    let members = names
        .iter()
        .map(|name| {
            let g = iso_force(&spec, &rho, &mob, &f, name)?;
            let s = entropy_decomposition(&spec, &rho, &g)?;
            Ok(json!({
                "iso": name,
                "force": field(&g),
                "psi_star": psi_star(&mob, &g)?,
                "split": split_json(&s, tol),
            }))
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(json!({ "psi_star": target, "members": members, "tol": tol }))
}

pub fn adjoint(chain: &Path, rho: &str, mu: &str, tol: Option<f64>) -> CliResult<Value> {
    let tol = tol.unwrap_or(1e-12);
    let spec = load_chain(chain)?;
    let rho = resolve_density(&spec, rho)?;
    let mu = resolve_density(&spec, mu)?;
    let adj = adjoint_chain(&spec)?;
    let pi = nonrev::stationary(&spec)?;
    let pi_adj = nonrev::stationary(&adj)?;
    let rep = representation(&spec, &mu)?;
    let (mob, f) = mobility_force(&spec, &rho)?;
    let fs = EdgeField::new(Arc::clone(f.edges()), dual_force(&spec, &rho)?.into_values())?;
    let dissipation_defect = (psi_star(&mob, &f)? - psi_star(&mob, &fs)?).abs();
    let back = adjoint_chain(&adj)?;
    let involution_defect = back.generator().matrix().max_abs_diff(spec.generator().matrix());
    let pi_defect = pi.values().iter().zip(pi_adj.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let scale = spec.generator().matrix().max_abs().max(1.0);
    Ok(json!({
        "adjoint": to_value(&ChainFile::from_spec(&adj)),
        "pi": pi.values(),
        "dual_force": field(&fs),
        "representation_defect": rep.defect,
        "involution_defect": involution_defect,
        "stationary_defect": pi_defect,
        "dissipation_defect": dissipation_defect,
        "tol": tol,
        "passed": rep.defect <= tol * scale && involution_defect <= tol * scale && pi_defect <= tol
            && dissipation_defect <= 100.0 * tol * (1.0 + psi_star(&mob, &f)?),
    }))
}

pub fn hamiltonian(
    chain: &Path,
    rho: &str,
    xi: Option<&Path>,
    flux_file: Option<&Path>,
    tol: Option<f64>,
) -> CliResult<Value> {
    let tol = tol.unwrap_or(1e-10);
    let spec = load_chain(chain)?;
    let rho = resolve_density(&spec, rho)?;
    let n = spec.n_states();
    let xi: Vec<f64> = match xi {
        Some(p) => serde_json::from_str(&read(p)?).map_err(|e| Error::InvalidSpec(e.to_string()))?,
        None => vec![0.0; n],
    };
    if xi.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: xi.len() }.into());
    }
    let he = hamiltonian_from_psi(&spec, &rho)?;
    let hs = hamiltonian_from_generator(&spec, &rho)?;
    let dxi = EdgeField::gradient_of(Arc::clone(he.edges()), &xi)?;
    let (vs, ve) = (hs.eval(&xi), he.eval(dxi.values()));
    let contraction = (vs - ve).abs();
    let j0 = EdgeField::new(Arc::clone(he.edges()), he.grad(&vec![0.0; he.dim()]))?;
    let current_defect = max_abs(
        &j0.values()
            .iter()
            .zip(net_current_values(&spec, &rho, he.edges()))
            .map(|(a, b)| a - b)
            .collect::<Vec<_>>(),
    );
    let m = min_hamiltonian(&hs)?;
    let mut report = json!({
        "xi": xi,
        "state_value": vs,
        "edge_value": ve,
        "contraction_defect": contraction,
        "value_at_zero": hs.eval(&vec![0.0; n]),
        "flux_at_zero": field(&j0),
        "current_defect": current_defect,
        "minimum": to_value(&m),
        "lagrangian_at_zero_flux": -m.value,
        "tol": tol,
        "passed": contraction <= tol * (1.0 + vs.abs()) && current_defect <= tol && m.residual <= 1e-9,
    });
    if let Some(p) = flux_file {
        let j = edge_field_from_json(&read(p)?, he.edges())?;
        report["lagrangian"] = to_value(&edge_lagrangian(&spec, &rho, &j)?);
    }
    Ok(report)
}

fn net_current_values(spec: &ChainSpec<f64>, rho: &Density<f64>, edges: &EdgeSet) -> Vec<f64> {
    edges
        .pairs()
        .iter()
        .map(|&(x, y)| rho[x] * spec.rate(x, y) - rho[y] * spec.rate(y, x))
        .collect()
}

pub fn dv_rate(chain: &Path, rho: &str, tol: Option<f64>) -> CliResult<Value> {
    let tol = tol.unwrap_or(1e-8);
    let spec = load_chain(chain)?;
    let rho = resolve_density(&spec, rho)?;
    let r = donsker_varadhan(&spec, &rho)?;
    let mut v = to_value(&r);
    v["rho"] = json!(rho.values());
    v["tol"] = json!(tol);
    v["passed"] = json!(r.defect <= tol && r.residual <= 1e-9);
    Ok(v)
}

pub fn decompose(
    chain: &Path,
    rho: &str,
    flux_file: Option<&Path>,
    part: &[usize],
    tol: Option<f64>,
) -> CliResult<Value> {
    let tol = tol.unwrap_or(1e-8);
    let spec = load_chain(chain)?;
    let rho = resolve_density(&spec, rho)?;
    let he = hamiltonian_from_psi(&spec, &rho)?;
    let m = he.dim();
    let j = match flux_file {
        Some(p) => edge_field_from_json(&read(p)?, he.edges())?,
        None => EdgeField::zeros(Arc::clone(he.edges())),
    };
    let first: Vec<usize> = if part.is_empty() { (0..m.div_ceil(2)).collect() } else { part.to_vec() };
    if let Some(&bad) = first.iter().find(|&&i| i >= m) {
        return Err(CliError::Usage(format!("edge position {bad} out of range (chain has {m} edges)")));
    }
    let second: Vec<usize> = (0..m).filter(|i| !first.contains(i)).collect();
    let h1: DynHamiltonian<f64> = Arc::new(he.restricted(&first)?);
    let h2: DynHamiltonian<f64> = Arc::new(he.restricted(&second)?);
    let mut r = split_lagrangian(h1, h2, j.values(), &ProbeConfig::default())?;
    r.measured_pairing_coefficient = pairing_coefficient(&spec, &rho, &j, r.lagrangian)?;
    let parts_ok = r.parts.iter().all(|p| p.value >= -1e-10);
    let mut v = to_value(&r);
    v["edges"] = json!(he.edges().pairs());
    v["first_part"] = json!(first);
    v["second_part"] = json!(second);
    v["tol"] = json!(tol);
    v["passed"] = json!(r.sum_defect <= tol && parts_ok && r.residual <= 1e-9);
    Ok(v)
}

pub fn fp_demo(
    model: Option<&Path>,
    cells: usize,
    drift: f64,
    diffusion: f64,
    rho: &str,
    tol: Option<f64>,
) -> CliResult<Value> {
    let tol = tol.unwrap_or(1e-8);
    let model = match model {
        Some(p) => grid_model_from_json(&read(p)?)?,
        None => GridModel::constant(cells, drift, diffusion)?,
    };
    let n = model.n_cells;
    let rho = match rho {
        "bump" => model.density_from_fn(|x| {
            let t = 2.0 * std::f64::consts::PI * x;
            (0.8 * (t - 1.9).cos() + 0.4 * (2.0 * t).sin()).exp()
        })?,
        "uniform" => Density::uniform(n),
        "stationary" => nonrev::stationary(&nonrev::fokker_planck::discretize(&model)?.spec)?,
        path => density_from_json(&read(Path::new(path))?)?,
    };
    rho.ensure_len(n)?;
    let split = example_force_split(&model, &rho)?;
    let dual = dual_drift(&model)?;
    let exl = exl_check(&model, &rho)?;
    Ok(json!({
        "n_cells": n,
        "force_split": to_value(&split),
        "dual_drift": to_value(&dual),
        "lagrangian_routes": to_value(&exl),
        "tol": tol,
        "passed": exl.defect_i_ii <= tol && split.recombination_defect <= tol && exl.residual <= 1e-9,
    }))
}

pub fn simulate(
    chain: &Path,
    time: f64,
    x0: usize,
    seed: u64,
    replicas: usize,
    trajectory: Option<&Path>,
) -> CliResult<Value> {
    if replicas == 0 {
        return Err(CliError::Usage("--replicas must be at least 1".into()));
    }
    let spec = load_chain(chain)?;
    let runs: Vec<nonrev::Result<_>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..replicas as u64)
            .map(|k| {
                let spec = &spec;
                s.spawn(move || {
                    let tr = run_path(spec, x0, time, seed.wrapping_add(k))?;
                    let em = empirical_measures(&tr, spec)?;
                    let est = entropy_rate_estimate(&tr, spec);
                    Ok((tr, em, est))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("replica thread panicked")).collect()
    });
    let mut reports = Vec::with_capacity(replicas);
    let mut e_sum = 0.0;
    let mut e_count = 0usize;
    for (k, run) in runs.into_iter().enumerate() {
        let (tr, em, est) = run?;
        if k == 0 {
            if let Some(p) = trajectory {
                let body = json!({ "times": tr.times, "states": tr.states });
                std::fs::write(p, crate::json::render(&body, false)).map_err(|source| CliError::Io {
                    path: p.display().to_string(),
                    source,
                })?;
            }
        }
        let mut r = json!({
            "seed": tr.seed,
            "jumps": tr.jumps(),
            "rho": em.rho.values(),
            "flux": field(&em.flux),
        });
        match est {
            Ok(est) => {
                e_sum += est.e_estimate;
                e_count += 1;
                r["entropy"] = to_value(&est);
            }
            Err(e) => r["entropy"] = json!({ "error": { "kind": e.kind(), "message": e.to_string() } }),
        }
        reports.push(r);
    }
    // analytic value at stationarity, when it is finite
    let analytic = nonrev::stationary(&spec)
        .and_then(|pi| {
            let (mob, f) = mobility_force(&spec, &pi)?;
            entropy_production(&flux(&mob, &f)?, &f)
        })
        .ok();
    Ok(json!({
        "time": time,
        "x0": x0,
        "seed": seed,
        "replicas": reports,
        "mean_e_estimate": if e_count > 0 { json!(e_sum / e_count as f64) } else { Value::Null },
        "analytic_e": analytic,
    }))
}
