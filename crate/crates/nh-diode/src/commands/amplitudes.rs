use std::f64::consts::PI;

use anyhow::Result;
use nh_diode_core::{build_triangle_center, closed_form_amplitudes, solve_amplitudes, Error, TriangleParams};
use rayon::prelude::*;
use serde_json::{json, Map};

use crate::config::{usage, AmplitudesConfig};
use crate::output::{Cell, Report, Status, Table};

/// Inclusive grid with exact endpoints.
pub fn k_grid(min: f64, max: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![min];
    }
    let h = (max - min) / (steps - 1) as f64;
    (0..steps)
        .map(|i| if i + 1 == steps { max } else { min + i as f64 * h })
        .collect()
}

pub fn run(c: &AmplitudesConfig) -> Result<Report> {
    if !(c.k_min > 0.0 && c.k_max < PI) {
        return Err(usage("amplitudes needs 0 < k_min <= k_max < pi"));
    }
    let p = TriangleParams::new(c.j, c.gamma, c.phi)?;
    let center = build_triangle_center(&p);
    let ks = k_grid(c.k_min, c.k_max, c.k_steps);
    let results: Vec<_> = ks
        .par_iter()
        .map(|&k| {
            let a = closed_form_amplitudes(k, &p)?;
            let dev = if c.check {
                Some(solve_amplitudes(&center, k)?.max_deviation(&a))
            } else {
                None
            };
            Ok::<_, Error>((a, dev))
        })
        .collect();

    let mut cols = vec![
        "k", "re_rL", "im_rL", "abs_rL", "re_rR", "im_rR", "abs_rR", "re_tL", "im_tL", "abs_tL", "re_tR", "im_tR",
        "abs_tR",
    ];
    if c.check {
        cols.push("solver_deviation");
    }
    if c.allow_singular {
        cols.push("singular");
    }
    let mut table = Table::new(&cols);
    let mut singular = Vec::new();
    let mut max_dev: f64 = 0.0;
    let mut max_flux_defect: f64 = 0.0;
    let mut best_contrast = (f64::NEG_INFINITY, 0.0);
    for (&k, r) in ks.iter().zip(results) {
        let mut row: Vec<Cell> = vec![k.into()];
        match r {
            Ok((a, dev)) => {
                for z in [a.r_left, a.r_right, a.t_left, a.t_right] {
                    row.extend([z.re.into(), z.im.into(), z.norm().into()]);
                }
                if let Some(d) = dev {
                    max_dev = max_dev.max(d);
                    row.push(d.into());
                }
                let defect = (a.t_left.norm_sqr() + a.r_left.norm_sqr() - 1.0)
                    .abs()
                    .max((a.t_right.norm_sqr() + a.r_right.norm_sqr() - 1.0).abs());
                max_flux_defect = max_flux_defect.max(defect);
                if a.diode_contrast() > best_contrast.0 {
                    best_contrast = (a.diode_contrast(), k);
                }
                if c.allow_singular {
                    row.push(false.into());
                }
            }
            Err(e @ (Error::SingularDenominator { .. } | Error::SingularSystem { .. })) => {
                if !c.allow_singular {
                    return Err(e.into());
                }
                singular.push(k);
                row.extend(std::iter::repeat_n(Cell::Num(f64::NAN), 12));
                if c.check {
                    row.push(f64::NAN.into());
                }
                row.push(true.into());
            }
            Err(e) => return Err(e.into()),
        }
        table.push(row);
    }

    let mut summary = Map::new();
    summary.insert("rows".into(), json!(ks.len()));
    summary.insert("singular_k".into(), json!(singular));
    if c.check {
        summary.insert("max_solver_deviation".into(), json!(max_dev));
    }
    summary.insert("max_probability_defect".into(), json!(max_flux_defect));
    summary.insert(
        "max_diode_contrast".into(),
        json!({"value": best_contrast.0, "k": best_contrast.1}),
    );
    Ok(Report {
        command: "amplitudes",
        config: serde_json::to_value(c)?,
        tables: vec![table],
        summary,
        status: Status::Ok,
    })
}
