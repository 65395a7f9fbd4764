use nahm_core::collar_geometry::check_pe;
use nahm_core::dynamics::energy::EnergyConfig;
use nahm_core::dynamics::{chern_simons, energy_report, evolve, StepControl};
use nahm_core::frame_algebra::{max_abs, Mat3};
use nahm_core::nahm_expansion::{self, expand, log_cap, self_duality_residual, BoundaryData, ConnectionExpansion};
use nahm_core::presets::Preset;
use serde_json::{json, Map, Value};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::report::{alpha_key, mat_json, Report};

const DEFAULT_ORDER: usize = 6;

fn expansion(cfg: &RunConfig, order: usize) -> Result<ConnectionExpansion, CliError> {
    let g = &cfg.geometry;
    let data = BoundaryData::new(g.frame.clone(), g.metric.clone(), cfg.sigma, order)?;
    Ok(expand(&data)?)
}

fn header(r: &mut Report, cfg: &RunConfig) {
    r.line(format!("geometry: {}", cfg.geometry.label));
    r.set("geometry", json!(cfg.geometry.label));
}

pub fn expand_cmd(cfg: &RunConfig) -> Result<Report, CliError> {
    let order = cfg.order.unwrap_or(DEFAULT_ORDER);
    let g = &cfg.geometry;
    let data = BoundaryData::new(g.frame.clone(), g.metric.clone(), cfg.sigma, order)?;
    let e = expand(&data)?;
    let residual = self_duality_residual(&data, &e)?.max_norm_through(order as i32 - 1);

    let mut r = Report::new("expand");
    header(&mut r, cfg);
    r.line(format!("order: {order}"));
    r.set("order", json!(order));
    r.set("sigma", mat_json(&cfg.sigma));
    let mut coeffs = Map::new();
    let mut put = |r: &mut Report, k: i64, l: u32, m: &Mat3| {
        r.matrix(&alpha_key(k, l), m);
        coeffs.insert(alpha_key(k, l), mat_json(m));
    };
    put(&mut r, -1, 0, &e.alpha_minus1);
    put(&mut r, 0, 0, &e.alpha0);
    for k in 1..=order {
        for l in 0..=log_cap(k) {
            put(&mut r, k as i64, l, &e.get(k, l));
        }
    }
    r.set("coefficients", Value::Object(coeffs));
    r.set("obstruction", mat_json(&e.obstruction()));
    r.set("residual", json!(residual));
    r.line(format!("self-duality residual through x^{}: {residual:.3e}", order - 1));
    Ok(r)
}

pub fn obstruction_cmd(cfg: &RunConfig) -> Result<Report, CliError> {
    let o = nahm_expansion::obstruction(&cfg.geometry.frame, &cfg.geometry.metric)?;
    let mut r = Report::new("obstruction");
    header(&mut r, cfg);
    r.matrix("recursive", &o.recursive);
    r.matrix("weyl", &o.weyl);
    r.line(format!("max difference: {:.3e}", o.max_diff));
    r.set("recursive", mat_json(&o.recursive));
    r.set("weyl", mat_json(&o.weyl));
    r.set("maxDiff", json!(o.max_diff));
    Ok(r)
}

pub fn check_pe_cmd(cfg: &RunConfig) -> Result<Report, CliError> {
    let order = cfg.order.unwrap_or(3);
    let checks = check_pe(&cfg.geometry.frame, &cfg.geometry.metric, order)?;
    let mut r = Report::new("check-pe");
    header(&mut r, cfg);
    let names = ["h1 = 0", "h2 = -P", "tr h3 = 0"];
    for (name, ok) in names.iter().zip(&checks) {
        r.line(format!("{name:<10} {ok}"));
    }
    r.set("order", json!(order));
    r.set("checks", json!(checks));
    Ok(r)
}

pub fn evolve_cmd(cfg: &RunConfig) -> Result<Report, CliError> {
    let order = cfg.order.unwrap_or(DEFAULT_ORDER);
    let x_from = cfg.numeric.x_from.unwrap_or(0.05);
    let x_to = cfg.numeric.x_to.unwrap_or(0.2);
    if !(x_from > 0.0 && x_to > 0.0) {
        return Err(CliError::Validation("x-range must be positive".into()));
    }
    let e = expansion(cfg, order)?;
    let control = StepControl::with_tol(cfg.numeric.tol.unwrap_or(1e-12));
    let g = &cfg.geometry;
    let traj = evolve(&g.frame, g.metric.clone(), e.evaluate(x_from), x_from, x_to, &control)?;
    let residual = traj.self_duality_residual()?.iter().fold(0.0_f64, |a, p| a.max(p.1));

    let mut r = Report::new("evolve");
    header(&mut r, cfg);
    r.line(format!("order: {order}, x from {x_from} to {x_to}, {} steps", traj.grid().len() - 1));
    r.line(format!("{:>14} {:>14} {:>14}", "x", "max|a|", "max|a - exp|"));
    let n = traj.grid().len();
    let stride = (n / 40).max(1);
    let mut rows = Vec::new();
    for i in (0..n).filter(|i| i % stride == 0 || *i == n - 1) {
        let x = traj.grid()[i];
        let a = traj.values()[i];
        let gap = max_abs(&(a - e.evaluate(x)));
        r.line(format!("{x:>14.6e} {:>14.6e} {gap:>14.6e}", max_abs(&a)));
        rows.push(json!({"x": x, "a": mat_json(&a), "deviation": gap}));
    }
    r.line(format!("self-duality residual along the trajectory: {residual:.3e}"));
    r.set("order", json!(order));
    r.set("sigma", mat_json(&cfg.sigma));
    r.set("xFrom", json!(x_from));
    r.set("xTo", json!(x_to));
    r.set("steps", json!(n - 1));
    r.set("maxLocalError", json!(traj.max_local_error()));
    r.set("maxSelfDualityResidual", json!(residual));
    r.set("trajectory", Value::Array(rows));
    Ok(r)
}

pub fn energy_cmd(cfg: &RunConfig) -> Result<Report, CliError> {
    let mut ec = EnergyConfig {
        sigma: cfg.sigma,
        ..EnergyConfig::default()
    };
    if let Some(order) = cfg.order {
        ec.order = order;
    }
    if let Some(t) = &cfg.numeric.t_grid {
        ec.t_grid = t.clone();
    }
    if let Some(t) = cfg.numeric.t_max {
        ec.t_max = t;
    }
    if let Some(t) = cfg.numeric.tol {
        ec.tol = t;
    }
    let rep = energy_report(&cfg.geometry.frame, &cfg.geometry.metric, &ec)?;
    let mut r = Report::new("energy");
    header(&mut r, cfg);
    r.line(format!("order: {}, t_max: {}", ec.order, ec.t_max));
    let mut laurent = Map::new();
    for (p, c) in &rep.laurent {
        r.line(format!("c[{p:>2}] = {c:>22.15e}"));
        laurent.insert(p.to_string(), json!(c));
    }
    r.line(format!("fit residual: {:.3e}", rep.fit_residual));
    r.line(format!("CS(alpha0): {:.15}", rep.cs_value));
    r.line(format!("Stokes residual: {:.3e}", rep.stokes_residual));
    r.set("order", json!(ec.order));
    r.set("laurent", Value::Object(laurent));
    r.set("fitResidual", json!(rep.fit_residual));
    r.set("csValue", json!(rep.cs_value));
    r.set("stokesResidual", json!(rep.stokes_residual));
    Ok(r)
}

pub fn cs_cmd(cfg: &RunConfig) -> Result<Report, CliError> {
    let g = &cfg.geometry;
    let a0 = nahm_expansion::alpha0(&g.frame, &g.metric)?;
    let cs = chern_simons(&a0, &g.frame);
    let theta = chern_simons(&Mat3::identity(), &g.frame);
    let mut r = Report::new("cs");
    header(&mut r, cfg);
    r.matrix("alpha[0][0]", &a0);
    r.line(format!("CS(alpha0): {cs:.15}"));
    r.line(format!("CS(theta):  {theta:.15}"));
    r.set("csValue", json!(cs));
    r.set("csTheta", json!(theta));
    Ok(r)
}

pub fn presets_cmd() -> Report {
    let mut r = Report::new("presets");
    let descriptions = [
        "flat torus, product collar H = I",
        "unit round sphere, hyperbolic ball H = (1 - x^2/4)^2 I",
        "flat torus, H = I + h2 x^2 (needs --h2)",
        "Berger sphere diag(lambda^2, 1, 1), H = I - P x^2",
    ];
    let mut list = Vec::new();
    for (name, d) in Preset::NAMES.iter().zip(descriptions) {
        r.line(format!("{name:<16} {d}"));
        list.push(json!({"name": name, "description": d}));
    }
    r.set("presets", Value::Array(list));
    r
}
