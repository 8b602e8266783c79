//! The `profile`, `phi` and `ff` subcommands.

use boundary_ising_core::boundary::{self, Branch, SeedMethod};
use boundary_ising_core::correlators::sigma_free;
use boundary_ising_core::formfactor::ff_magnetization;
use boundary_ising_core::painleve::{eval_phi, solve_phi};
use boundary_ising_core::specfun::sigma0_with_glaisher;

use crate::config::{GridKind, Settings};
use crate::output::{GridSpec, RunManifest, SeedInfo, Table};
use crate::CliError;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Magnetization profile on the requested grid.
pub fn profile(settings: &Settings) -> Result<(Table, RunManifest), CliError> {
    let cfg = settings.solver_config()?;
    let branch = settings.branch;
    let lambda = match (settings.lambda, branch) {
        (Some(l), _) => l,
        (None, Branch::HighTFixed) => f64::INFINITY,
        (None, _) => return Err(usage("profile needs --lambda")),
    };
    let upper = match branch {
        Branch::HighTFixed => cfg.r_max,
        _ => cfg.seed_point(),
    };
    if settings.t_max > upper {
        return Err(usage(format!("--t-max {} exceeds the largest available t = {upper}", settings.t_max)));
    }
    if branch == Branch::Metastable && !(lambda > 0.0 && lambda < 1.0) {
        return Err(usage("the metastable branch needs 0 < --lambda < 1"));
    }
    let ts = match settings.grid {
        GridKind::Log => boundary::log_grid(settings.t_min, settings.t_max, settings.points),
        GridKind::Linear => boundary::linear_grid(settings.t_min, settings.t_max, settings.points),
    };

    let table = solve_phi(cfg)?;
    let s0 = cfg.sigma0();
    let mass = settings.mass.unwrap_or(1.0);
    let scale = sigma0_with_glaisher(mass, cfg.glaisher)?;

    let mut manifest = RunManifest::new("profile", settings)?;
    manifest.grid = Some(GridSpec {
        kind: settings.grid.to_string(),
        t_min: settings.t_min,
        t_max: settings.t_max,
        points: settings.points,
    });

    let (u, ratio) = match branch {
        Branch::HighTFixed => {
            let mut u = Vec::with_capacity(ts.len());
            let mut ratio = Vec::with_capacity(ts.len());
            for &t in &ts {
                let v = boundary::sigma_fixed_high_t(&table, t)?;
                u.push(v / sigma_free(&table, t)?);
                ratio.push(v / s0);
            }
            (u, ratio)
        }
        _ => {
            let sol = if branch == Branch::Metastable {
                boundary::solve_metastable(&table, lambda)?
            } else {
                boundary::solve_u(&table, lambda)?
            };
            let order = match sol.seed.method {
                SeedMethod::FormFactor { order } => Some(order),
                SeedMethod::MetastableAsymptotic => None,
            };
            manifest.seed = Some(SeedInfo { t0: sol.seed.t0, method: sol.seed.method.describe().to_string(), order });
            let p = sol.profile(&table, &ts)?;
            (p.u, p.sigma_ratio)
        }
    };

    let mut columns = vec!["t", "u", "sigma_ratio", "sigma_abs"];
    if settings.mass.is_some() {
        columns.push("y");
    }
    let mut out = Table::new(columns);
    for (i, &t) in ts.iter().enumerate() {
        let mut row = vec![t, u[i], ratio[i], ratio[i] * scale];
        if settings.mass.is_some() {
            row.push(t / (2.0 * mass));
        }
        out.push(row);
    }
    Ok((out, manifest))
}

/// The transcendent at its knots, or at a single radius.
pub fn phi(settings: &Settings) -> Result<(Table, RunManifest), CliError> {
    let cfg = settings.solver_config()?;
    if let Some(r) = settings.r {
        if !(r >= cfg.t_min && r <= cfg.r_max) {
            return Err(usage(format!("--r must lie in [{}, {}]", cfg.t_min, cfg.r_max)));
        }
    }
    let table = solve_phi(cfg)?;
    let mut out = Table::new(vec!["r", "phi", "dphi"]);
    match settings.r {
        Some(r) => {
            let (phi, dphi, _) = eval_phi(&table, r)?;
            out.push(vec![r, phi, dphi]);
        }
        None => {
            for ((&r, &phi), &dphi) in table.knots().iter().zip(table.values()).zip(table.derivs()) {
                out.push(vec![r, phi, dphi]);
            }
        }
    }
    Ok((out, RunManifest::new("phi", settings)?))
}

const TERM_NAMES: [&str; 4] = ["f_1", "f_2", "f_3", "f_4"];

/// Form-factor terms, value and truncation bound at one point. The flag in
/// the returned bool is the convergence warning.
pub fn ff(settings: &Settings) -> Result<(Table, RunManifest, bool), CliError> {
    let t = settings.t.ok_or_else(|| usage("ff needs --t"))?;
    let lambda = settings.lambda.ok_or_else(|| usage("ff needs --lambda"))?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(usage("--t must be positive"));
    }
    let est = ff_magnetization(t, lambda, settings.kmax, settings.nodes)?;
    let mut columns = vec!["t", "lambda", "order", "nodes", "value", "trunc_bound", "warning"];
    columns.extend_from_slice(&TERM_NAMES[..est.order]);
    let mut row = vec![
        t,
        lambda,
        est.order as f64,
        est.nodes as f64,
        est.value,
        est.trunc_bound,
        if est.warning { 1.0 } else { 0.0 },
    ];
    row.extend_from_slice(&est.terms);
    let mut out = Table::new(columns);
    out.push(row);
    Ok((out, RunManifest::new("ff", settings)?, est.warning))
}
