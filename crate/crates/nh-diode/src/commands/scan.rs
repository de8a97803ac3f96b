use anyhow::Result;
use nh_diode_core::{
    build_triangle_center, closed_form_amplitudes, diode_point, m22_criterion, ra_eigenfunction_check,
    scan_zero_flux_singularities, transfer_matrix, ScanGrid, TriangleParams,
};
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::config::ScanConfig;
use crate::output::{Cell, Report, Status, Table};

pub fn run(c: &ScanConfig) -> Result<Report> {
    if c.diode_check {
        return diode_check(c);
    }
    let grid = ScanGrid {
        gamma_steps: c.gamma_steps,
        k_steps: c.k_steps,
    };
    let hits = scan_zero_flux_singularities((c.gamma_min, c.gamma_max), (c.k_min, c.k_max), grid);
    let mut table = Table::new(&[
        "gamma",
        "k",
        "omega_residual",
        "sinkc_residual",
        "cos_k",
        "sin_k",
        "ratio_deviation",
        "plane_wave_residual",
    ]);
    let mut details = Vec::new();
    for h in &hits {
        let ra = ra_eigenfunction_check(h.gamma, h.k)?;
        table.push(vec![
            h.gamma.into(),
            h.k.into(),
            h.omega_residual.into(),
            h.sinkc_residual.into(),
            h.k.cos().into(),
            h.k.sin().into(),
            ra.final_deviation().into(),
            ra.plane_wave_residual.into(),
        ]);
        details.push(json!({
            "gamma": h.gamma,
            "k": h.k,
            "omega_residual": h.omega_residual,
            "sinkc_residual": h.sinkc_residual,
            "ratio_deviation_at_1e-6": ra.final_deviation(),
            "ratios_converge": ra.ratios_converge,
            "plane_wave_residual": ra.plane_wave_residual,
            "velocity_left": ra.velocity_left,
            "velocity_right": ra.velocity_right,
            "inward": ra.inward,
        }));
    }
    let mut summary = Map::new();
    summary.insert("hits".into(), json!(hits.len()));
    summary.insert("gamma_star_closed_form".into(), json!((2.0 - 2f64.sqrt()).acos()));
    summary.insert("details".into(), Value::Array(details));
    Ok(Report {
        command: "singularity-scan",
        config: serde_json::to_value(c)?,
        tables: vec![table],
        summary,
        status: if hits.is_empty() { Status::NoHits } else { Status::Ok },
    })
}

/// Transfer matrix at `(k, φ) = (γ, π − γ)`.
fn diode_check(c: &ScanConfig) -> Result<Report> {
    let d = diode_point(c.gamma)?;
    let p = TriangleParams::new(1.0, c.gamma, d.phic)?;
    let m = transfer_matrix(&closed_form_amplitudes(d.kc, &p)?)?;
    let target = Complex64::cis((4.0 * c.gamma - std::f64::consts::PI) / 3.0);
    let mut table = Table::new(&["entry", "re", "im", "abs"]);
    for (name, z) in [("m11", m.m11), ("m12", m.m12), ("m21", m.m21), ("m22", m.m22)] {
        table.push(vec![Cell::from(name), z.re.into(), z.im.into(), z.norm().into()]);
    }
    let deviation = m
        .m11
        .norm()
        .max(m.m12.norm())
        .max(m.m21.norm())
        .max((m.m22 - target).norm());
    let mut summary = Map::new();
    summary.insert("kc".into(), json!(d.kc));
    summary.insert("phic".into(), json!(d.phic));
    summary.insert("m22_abs".into(), json!(m.m22.norm()));
    summary.insert("m22_target".into(), json!([target.re, target.im]));
    summary.insert("deviation_from_diag".into(), json!(deviation));
    summary.insert(
        "m22_criterion_solver".into(),
        json!(m22_criterion(&build_triangle_center(&p), d.kc)?),
    );
    Ok(Report {
        command: "singularity-scan",
        config: serde_json::to_value(c)?,
        tables: vec![table],
        summary,
        status: Status::Ok,
    })
}
