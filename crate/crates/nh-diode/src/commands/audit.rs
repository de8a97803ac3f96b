use std::f64::consts::PI;

use anyhow::Result;
use nh_diode_core::symmetry::{audit_identities_with, default_mirror, IdentityLedger};
use nh_diode_core::{audit_identities, build_pt_dimer, build_triangle_center, CenterGraph, TriangleParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Map};

use crate::config::{AuditConfig, CenterKind};
use crate::output::{Cell, Report, Status, Table};

const PT_GAIN: f64 = 0.3;

/// Worst residual per identity over several ledgers, in ledger order.
#[derive(Debug, Clone)]
pub struct Worst {
    pub name: &'static str,
    pub applicable: bool,
    pub value: f64,
}

pub fn combine(ledgers: &[IdentityLedger]) -> Vec<Worst> {
    let mut out: Vec<Worst> = ledgers[0]
        .entries()
        .iter()
        .map(|(name, _)| Worst {
            name,
            applicable: false,
            value: 0.0,
        })
        .collect();
    for l in ledgers {
        for (w, (_, r)) in out.iter_mut().zip(l.entries()) {
            if r.applicable {
                w.applicable = true;
                w.value = w.value.max(r.value);
            }
        }
    }
    out
}

fn random_centers(c: &AuditConfig) -> Vec<CenterGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    (0..c.centers)
        .map(|_| {
            let n = rng.gen_range(1..=c.max_center_sites);
            CenterGraph::random(&mut rng, n, c.j)
        })
        .collect()
}

pub fn run(c: &AuditConfig) -> Result<Report> {
    let ks: Vec<f64> = (1..=c.k_points)
        .map(|i| PI * i as f64 / (c.k_points + 1) as f64)
        .collect();
    let mut summary = Map::new();
    let ledgers: Vec<IdentityLedger> = match c.center {
        CenterKind::Random => {
            let centers = random_centers(c);
            centers
                .par_iter()
                .map(|center| {
                    let mut mirror: Vec<usize> = (0..center.len()).collect();
                    mirror.swap(center.port_left(), center.port_right());
                    audit_identities_with(center, &mirror, &ks)
                })
                .collect::<Result<_, _>>()?
        }
        CenterKind::Triangle | CenterKind::PtDimer => {
            let center = match c.center {
                CenterKind::Triangle => build_triangle_center(&TriangleParams::new(c.j, c.gamma, c.phi)?),
                _ => build_pt_dimer(c.j, PT_GAIN * c.j),
            };
            let ledger = audit_identities(&center, &ks)?;
            let s = &ledger.symmetries;
            summary.insert(
                "symmetries".into(),
                json!({
                    "mirror": default_mirror(&center),
                    "P": s.has_parity(),
                    "T": s.has_t(),
                    "PT": s.has_pt(),
                    "PF": s.has_pf(),
                    "hermitian": s.is_hermitian(),
                }),
            );
            vec![ledger]
        }
    };
    let worst = combine(&ledgers);
    let mut table = Table::new(&["identity", "applicable", "residual", "threshold", "pass"]);
    let mut breaches = Vec::new();
    for w in &worst {
        let pass = !w.applicable || w.value <= c.threshold;
        if !pass {
            breaches.push(w.name);
        }
        table.push(vec![
            Cell::from(w.name),
            w.applicable.into(),
            w.value.into(),
            c.threshold.into(),
            pass.into(),
        ]);
    }
    let evaluated: usize = ledgers.iter().map(|l| l.evaluated.len()).sum();
    let skipped: usize = ledgers.iter().map(|l| l.skipped_singular.len()).sum();
    summary.insert("centers".into(), json!(ledgers.len()));
    summary.insert("momenta_evaluated".into(), json!(evaluated));
    summary.insert("momenta_skipped_singular".into(), json!(skipped));
    summary.insert(
        "worst".into(),
        json!(worst
            .iter()
            .map(|w| (
                w.name.to_string(),
                json!({"applicable": w.applicable, "residual": w.value})
            ))
            .collect::<Map<_, _>>()),
    );
    summary.insert("breaches".into(), json!(breaches));
    Ok(Report {
        command: "audit",
        config: serde_json::to_value(c)?,
        tables: vec![table],
        summary,
        status: if breaches.is_empty() {
            Status::Ok
        } else {
            Status::IdentityBreach
        },
    })
}
