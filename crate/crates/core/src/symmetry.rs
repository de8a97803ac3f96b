//! Symmetry classification of scattering centers and audits of the
//! amplitude identities they imply.
//!
//! `T` is complex conjugation in the site basis, `P` a site permutation that
//! exchanges the ports, and `F` reverses the flux (hopping phases
//! conjugated, see [`CenterGraph::flux_flipped`]).
//!
//! Pairing convention for identities that involve `−k`: the amplitudes at
//! `−k` are the solutions of the same matching problem with the ansatz
//! `k → −k`, i.e. `ψ_L^{−k}(j) = e^{−ikj} + r_L^{−k} e^{ikj}` on the left.
//! With that convention, for any center,
//!
//! ```text
//! t_L^{−k} t_R^{k} + r_L^{−k} r_L^{k} = 1
//! t_L^{−k} r_R^{k} + r_L^{−k} t_L^{k} = 0
//! ```
//!
//! and likewise with `L ↔ R` or `k → −k`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::analytic::ScatteringAmplitudes;
use crate::error::{Error, Result};
use crate::lattice::CenterGraph;
use crate::linalg::CMatrix;
use crate::solver::solve_amplitudes;

/// A symmetry holds when its matrix defect is at or below this (times `J`).
pub const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryCheck {
    pub holds: bool,
    /// Max element defect of the transformed Hamiltonian.
    pub residual: f64,
}

impl SymmetryCheck {
    fn new(residual: f64, scale: f64) -> Self {
        SymmetryCheck {
            holds: residual <= SYMMETRY_TOL * scale,
            residual,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryReport {
    /// Site permutation used for `P`; `None` when none is known.
    pub mirror: Option<Vec<usize>>,
    pub parity: Option<SymmetryCheck>,
    pub time_reversal: SymmetryCheck,
    pub parity_time: Option<SymmetryCheck>,
    pub parity_flux: Option<SymmetryCheck>,
    pub hermitian: SymmetryCheck,
}

impl SymmetryReport {
    pub fn has_parity(&self) -> bool {
        self.parity.is_some_and(|c| c.holds)
    }

    pub fn has_pt(&self) -> bool {
        self.parity_time.is_some_and(|c| c.holds)
    }

    pub fn has_pf(&self) -> bool {
        self.parity_flux.is_some_and(|c| c.holds)
    }

    pub fn has_t(&self) -> bool {
        self.time_reversal.holds
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian.holds
    }
}

/// Port transposition, used as the mirror for centers with at most three
/// sites (the triangle: `-1 ↔ 1`, `0` fixed).
pub fn default_mirror(center: &CenterGraph) -> Option<Vec<usize>> {
    if center.len() > 3 {
        return None;
    }
    let mut m: Vec<usize> = (0..center.len()).collect();
    m.swap(center.port_left(), center.port_right());
    Some(m)
}

fn validate_mirror(center: &CenterGraph, mirror: &[usize]) -> Result<()> {
    let n = center.len();
    if mirror.len() != n {
        return Err(Error::InvalidMirror);
    }
    let mut seen = alloc::vec![false; n];
    for &m in mirror {
        if m >= n || seen[m] {
            return Err(Error::InvalidMirror);
        }
        seen[m] = true;
    }
    if mirror[center.port_left()] != center.port_right() || mirror[center.port_right()] != center.port_left() {
        return Err(Error::InvalidMirror);
    }
    Ok(())
}

fn permuted(h: &CMatrix, m: &[usize]) -> CMatrix {
    CMatrix::from_fn(h.rows(), h.cols(), |i, j| h[(m[i], m[j])])
}

fn classify_inner(center: &CenterGraph, mirror: Option<Vec<usize>>) -> SymmetryReport {
    let scale = center.lead_hopping();
    let h = center.hamiltonian();
    let hc = h.conj();
    let flipped = center.flux_flipped().hamiltonian();
    let time_reversal = SymmetryCheck::new(hc.max_abs_diff(&h), scale);
    let hermitian = SymmetryCheck::new(center.hermiticity_defect(), scale);
    let (parity, parity_time, parity_flux) = match &mirror {
        Some(m) => (
            Some(SymmetryCheck::new(permuted(&h, m).max_abs_diff(&h), scale)),
            Some(SymmetryCheck::new(permuted(&hc, m).max_abs_diff(&h), scale)),
            Some(SymmetryCheck::new(permuted(&h, m).max_abs_diff(&flipped), scale)),
        ),
        None => (None, None, None),
    };
    SymmetryReport {
        mirror,
        parity,
        time_reversal,
        parity_time,
        parity_flux,
        hermitian,
    }
}

/// Classifies under `P`, `T`, `PT`, `PF` (and Hermiticity) with the
/// automatic mirror; centers with more than three sites need
/// [`classify_symmetries_with`].
pub fn classify_symmetries(center: &CenterGraph) -> Result<SymmetryReport> {
    let mirror = default_mirror(center).ok_or(Error::NoMirror)?;
    Ok(classify_inner(center, Some(mirror)))
}

pub fn classify_symmetries_with(center: &CenterGraph, mirror: &[usize]) -> Result<SymmetryReport> {
    validate_mirror(center, mirror)?;
    Ok(classify_inner(center, Some(mirror.to_vec())))
}

/// Worst residual of one identity; `applicable` says whether the
/// classification implies it should vanish.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityResidual {
    pub applicable: bool,
    pub value: f64,
}

impl IdentityResidual {
    fn new(applicable: bool) -> Self {
        IdentityResidual { applicable, value: 0.0 }
    }

    fn record(&mut self, value: f64) {
        if self.applicable {
            self.value = self.value.max(value);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityLedger {
    pub rt1: IdentityResidual,
    pub rt2: IdentityResidual,
    pub crt1: IdentityResidual,
    pub crt2: IdentityResidual,
    pub continuity: IdentityResidual,
    pub herm_symmetry: IdentityResidual,
    pub pt_modulus: IdentityResidual,
    pub pf_flip: IdentityResidual,
    pub parity: IdentityResidual,
    pub symmetries: SymmetryReport,
    /// Momenta where every solve succeeded.
    pub evaluated: Vec<f64>,
    /// Momenta skipped because a matching system was singular.
    pub skipped_singular: Vec<f64>,
}

impl IdentityLedger {
    /// `(name, residual)` pairs in a fixed order.
    pub fn entries(&self) -> [(&'static str, IdentityResidual); 9] {
        [
            ("rt1", self.rt1),
            ("rt2", self.rt2),
            ("crt1", self.crt1),
            ("crt2", self.crt2),
            ("continuity", self.continuity),
            ("herm_symmetry", self.herm_symmetry),
            ("pt_modulus", self.pt_modulus),
            ("pf_flip", self.pf_flip),
            ("parity", self.parity),
        ]
    }
}

fn reciprocity_residuals(plus: &ScatteringAmplitudes, minus: &ScatteringAmplitudes) -> (f64, f64) {
    let one = Complex64::new(1.0, 0.0);
    let rt1 = |p: &ScatteringAmplitudes, m: &ScatteringAmplitudes| {
        let a = (m.t_left * p.t_right + m.r_left * p.r_left - one).norm();
        let b = (m.t_right * p.t_left + m.r_right * p.r_right - one).norm();
        a.max(b)
    };
    let rt2 = |p: &ScatteringAmplitudes, m: &ScatteringAmplitudes| {
        let a = (m.t_left * p.r_right + m.r_left * p.t_left).norm();
        let b = (m.t_right * p.r_left + m.r_right * p.t_right).norm();
        a.max(b)
    };
    (
        rt1(plus, minus).max(rt1(minus, plus)),
        rt2(plus, minus).max(rt2(minus, plus)),
    )
}

/// Solves at `±k` for every `k` in the grid and records the worst residual
/// of each identity. Singular momenta are skipped and listed.
pub fn audit_identities(center: &CenterGraph, k_grid: &[f64]) -> Result<IdentityLedger> {
    audit_with_report(center, k_grid, classify_inner(center, default_mirror(center)))
}

pub fn audit_identities_with(center: &CenterGraph, mirror: &[usize], k_grid: &[f64]) -> Result<IdentityLedger> {
    audit_with_report(center, k_grid, classify_symmetries_with(center, mirror)?)
}

fn audit_with_report(center: &CenterGraph, k_grid: &[f64], report: SymmetryReport) -> Result<IdentityLedger> {
    if k_grid.iter().any(|&k| !(k > 0.0 && k < PI)) {
        return Err(Error::InvalidParameter("audit momenta must lie in (0, pi)"));
    }
    let one = Complex64::new(1.0, 0.0);
    let flipped = center.flux_flipped();
    let mut ledger = IdentityLedger {
        rt1: IdentityResidual::new(true),
        rt2: IdentityResidual::new(true),
        crt1: IdentityResidual::new(report.has_t()),
        crt2: IdentityResidual::new(report.has_t()),
        continuity: IdentityResidual::new(report.is_hermitian()),
        herm_symmetry: IdentityResidual::new(report.is_hermitian()),
        pt_modulus: IdentityResidual::new(report.has_pt()),
        pf_flip: IdentityResidual::new(report.has_pf()),
        parity: IdentityResidual::new(report.has_parity()),
        symmetries: report,
        evaluated: Vec::new(),
        skipped_singular: Vec::new(),
    };
    for &k in k_grid {
        let solved = solve_amplitudes(center, k).and_then(|p| {
            let m = solve_amplitudes(center, -k)?;
            let f = if ledger.pf_flip.applicable {
                Some(solve_amplitudes(&flipped, k)?)
            } else {
                None
            };
            Ok((p, m, f))
        });
        let (p, m, f) = match solved {
            Ok(v) => v,
            Err(Error::SingularSystem { .. }) => {
                ledger.skipped_singular.push(k);
                continue;
            }
            Err(e) => return Err(e),
        };
        let (rt1, rt2) = reciprocity_residuals(&p, &m);
        ledger.rt1.record(rt1);
        ledger.rt2.record(rt2);

        let crt1 = (p.t_left.conj() * p.t_right + p.r_left.conj() * p.r_left - one)
            .norm()
            .max((p.t_right.conj() * p.t_left + p.r_right.conj() * p.r_right - one).norm());
        let crt2 = (p.t_left.conj() * p.r_right + p.r_left.conj() * p.t_left)
            .norm()
            .max((p.t_right.conj() * p.r_left + p.r_right.conj() * p.t_right).norm());
        ledger.crt1.record(crt1);
        ledger.crt2.record(crt2);

        let continuity = (p.t_left.norm_sqr() + p.r_left.norm_sqr() - 1.0)
            .abs()
            .max((p.t_right.norm_sqr() + p.r_right.norm_sqr() - 1.0).abs());
        ledger.continuity.record(continuity);

        let mut herm = (p.t_left.norm() - p.t_right.norm())
            .abs()
            .max((p.r_left.norm() - p.r_right.norm()).abs());
        if ledger.symmetries.has_t() {
            herm = herm.max((p.t_left - p.t_right).norm());
        }
        ledger.herm_symmetry.record(herm);

        ledger.pt_modulus.record((p.t_left.norm() - p.t_right.norm()).abs());

        if let Some(f) = f {
            let flip = (p.t_left - f.t_right)
                .norm()
                .max((p.r_left - f.r_right).norm())
                .max((p.t_right - f.t_left).norm())
                .max((p.r_right - f.r_left).norm());
            ledger.pf_flip.record(flip);
        }

        ledger
            .parity
            .record((p.t_left - p.t_right).norm().max((p.r_left - p.r_right).norm()));
        ledger.evaluated.push(k);
    }
    Ok(ledger)
}

/// Signed diode contrast `|t_R|² − |t_L|²`.
pub fn asymmetry_metric(center: &CenterGraph, k: f64) -> Result<f64> {
    Ok(solve_amplitudes(center, k)?.diode_contrast())
}
