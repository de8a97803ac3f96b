use std::f64::consts::{PI, TAU};

use anyhow::Result;
use nh_diode_core::analytic::{flux_divergences, Amplitude, LimitPath};
use nh_diode_core::{bethe_amplitudes, limit_path_probe, Error};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::config::Fig3Config;
use crate::output::{Cell, Report, Status, Table};

fn amplitude_name(a: Amplitude) -> &'static str {
    match a {
        Amplitude::Reflection => "r_bar",
        Amplitude::TransmissionLeft => "t_left_bar",
        Amplitude::TransmissionRight => "t_right_bar",
    }
}

fn complex(z: num_complex::Complex64) -> Value {
    json!([z.re, z.im])
}

/// Adjoint amplitudes (`γ → −γ`) versus flux at fixed `k`. Rows sit at the
/// interior nodes `2πi/n`; poles are reported with the node interval that
/// contains them.
pub fn run(c: &Fig3Config) -> Result<Report> {
    let n = c.phi_steps;
    let phis: Vec<f64> = (1..n).map(|i| TAU * i as f64 / n as f64).collect();
    let results: Vec<_> = phis
        .par_iter()
        .map(|&phi| bethe_amplitudes(c.k, phi, -c.gamma))
        .collect();
    let poles = flux_divergences(c.k, -c.gamma, &phis);

    let mut cols = vec![
        "phi",
        "re_tLbar",
        "im_tLbar",
        "abs_tLbar",
        "re_tRbar",
        "im_tRbar",
        "abs_tRbar",
        "re_rbar",
        "im_rbar",
        "abs_rbar",
        "pole_cell",
    ];
    if c.allow_singular {
        cols.push("singular");
    }
    let mut table = Table::new(&cols);
    let mut singular = Vec::new();
    for (i, (&phi, r)) in phis.iter().zip(results).enumerate() {
        let mut row: Vec<Cell> = vec![phi.into()];
        let in_pole_cell = poles.iter().any(|p| p.cell == i || p.cell + 1 == i);
        match r {
            Ok(a) => {
                for z in [a.t_left, a.t_right, a.r_left] {
                    row.extend([z.re.into(), z.im.into(), z.norm().into()]);
                }
                row.push(in_pole_cell.into());
                if c.allow_singular {
                    row.push(false.into());
                }
            }
            Err(e @ Error::SingularDenominator { .. }) => {
                if !c.allow_singular {
                    return Err(e.into());
                }
                singular.push(phi);
                row.extend(std::iter::repeat_n(Cell::Num(f64::NAN), 9));
                row.push(in_pole_cell.into());
                row.push(true.into());
            }
            Err(e) => return Err(e.into()),
        }
        table.push(row);
    }

    let divergences: Vec<Value> = poles
        .iter()
        .map(|p| {
            json!({
                "amplitude": amplitude_name(p.amplitude),
                "phi": p.phi,
                "cell": [phis[p.cell], phis[p.cell + 1]],
                "omega_abs": p.omega_abs,
            })
        })
        .collect();
    let mut summary = Map::new();
    summary.insert("rows".into(), json!(phis.len()));
    summary.insert("divergences".into(), Value::Array(divergences));
    summary.insert("singular_phi".into(), json!(singular));
    if c.gamma > 0.0 && c.gamma < PI && (c.k - c.gamma).abs() < 1e-12 {
        let mut paths = Vec::new();
        for path in LimitPath::ALL {
            let probe = limit_path_probe(c.gamma, path, 6)?;
            let a = probe.closest().amplitudes;
            paths.push(json!({
                "path": format!("{path:?}"),
                "offset": probe.closest().offset,
                "r_bar": complex(a.r_left),
                "t_left_bar": complex(a.t_left),
                "t_right_bar": complex(a.t_right),
                "t_left_bar_diverges": probe.divergence,
            }));
        }
        summary.insert("limit_paths".into(), Value::Array(paths));
    }
    Ok(Report {
        command: "fig3",
        config: serde_json::to_value(c)?,
        tables: vec![table],
        summary,
        status: Status::Ok,
    })
}
