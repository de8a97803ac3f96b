use anyhow::Result;
use nh_diode_core::dynamics::{DirectionalRun, PacketTrajectory};
use nh_diode_core::{absorber_experiment, directional_experiment, ExperimentSetup, Side, TriangleParams};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::config::{EvolveConfig, Incidence, LeadSide};
use crate::output::{Report, Status, Table};

fn side(s: LeadSide) -> Side {
    match s {
        LeadSide::Left => Side::Left,
        LeadSide::Right => Side::Right,
    }
}

fn side_name(s: Side) -> &'static str {
    match s {
        Side::Left => "left",
        Side::Right => "right",
    }
}

pub fn trajectory_table(t: &PacketTrajectory, label: &str) -> Table {
    let mut table = Table::new(&["time", "norm_left", "norm_center", "norm_right", "norm_total"]).labelled(label);
    for (time, n) in t.times.iter().zip(&t.region_norms) {
        table.push(vec![
            (*time).into(),
            n.left.into(),
            n.center.into(),
            n.right.into(),
            n.total().into(),
        ]);
    }
    table
}

fn integrator(t: &PacketTrajectory) -> Value {
    json!({
        "step": t.step,
        "first_step_error": t.first_step_error,
        "max_norm_increase": t.max_norm_increase,
        "edge_norm": t.edge_norm,
        "samples": t.times.len(),
    })
}

fn run_summary(r: &DirectionalRun) -> Value {
    json!({
        "incidence": side_name(r.incidence),
        "transmitted": r.fractions.transmitted,
        "reflected": r.fractions.reflected,
        "absorbed": r.fractions.absorbed,
        "center": r.fractions.center,
        "predicted_transmission": r.predicted_transmission,
        "predicted_reflection": r.predicted_reflection,
        "point_transmission": r.point_transmission,
        "agreement": r.agreement(),
        "integrator": integrator(&r.trajectory),
    })
}

pub fn run(c: &EvolveConfig) -> Result<Report> {
    let p = TriangleParams::new(c.j, c.gamma, c.phi)?;
    let setup = ExperimentSetup {
        sites: c.sites,
        distance: c.distance,
        tol: c.tol,
        samples: c.samples,
        duration: c.duration,
    };
    let mut summary = Map::new();
    summary.insert("duration".into(), json!(setup.duration_for(c.sigma, c.k0, c.j)));
    let tables = if let Some(cut) = c.cut {
        let r = absorber_experiment(&p, side(cut), c.sigma, c.k0, &setup)?;
        summary.insert(
            "absorber".into(),
            json!({
                "cut": side_name(r.cut),
                "reflected": r.reflected,
                "absorbed": r.absorbed,
                "predicted_reflection": r.predicted_reflection,
                "agreement": r.reflected / r.predicted_reflection,
                "integrator": integrator(&r.trajectory),
            }),
        );
        vec![trajectory_table(&r.trajectory, "")]
    } else {
        let sides: Vec<Side> = match c.incidence {
            Incidence::Left => vec![Side::Left],
            Incidence::Right => vec![Side::Right],
            Incidence::Both => vec![Side::Left, Side::Right],
        };
        let runs: Vec<DirectionalRun> = sides
            .par_iter()
            .map(|&s| directional_experiment(&p, s, c.sigma, c.k0, &setup))
            .collect::<Result<_, _>>()?;
        summary.insert("runs".into(), Value::Array(runs.iter().map(run_summary).collect()));
        if runs.len() == 2 {
            summary.insert(
                "transmission_contrast".into(),
                json!(runs[1].fractions.transmitted - runs[0].fractions.transmitted),
            );
        }
        let single = runs.len() == 1;
        runs.iter()
            .map(|r| trajectory_table(&r.trajectory, if single { "" } else { side_name(r.incidence) }))
            .collect()
    };
    Ok(Report {
        command: "evolve",
        config: serde_json::to_value(c)?,
        tables,
        summary,
        status: Status::Ok,
    })
}
