//! Transfer matrix, the `M₂₂` spectral-singularity criterion and the
//! zero-flux singularities of the triangle.
//!
//! At `φ = 0`, `Ω(k, 0, γ) = 0` is two real conditions:
//!
//! ```text
//! Re: sin k sin γ + cos k + 1 = 0
//! Im: cos k = (cos γ − 1) / 2
//! ```
//!
//! Together they force `(c + 1)(c² − 4c + 2) = 0` with `c = cos γ`, so on
//! `γ ∈ (0, π)` the only singular phase is `γ* = arccos(2 − √2)`. The
//! single condition `sin k_c = −(cos γ + 1)/(2 sin γ)` is necessary but not
//! sufficient; scans report its residual as a diagnostic only.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::analytic::{bethe_amplitudes, omega, omega_partials, ScatteringAmplitudes};
use crate::error::{Error, Result};
use crate::lattice::{build_triangle_center_raw, dispersion, group_velocity};
use crate::solver::{solve_two_lead, Side};

/// `|t_R|` at or below this leaves the transfer matrix undefined.
pub const ZERO_TRANSMISSION: f64 = 1e-14;

/// Refined zeros must satisfy `|Ω| ≤` this.
pub const SCAN_TOL: f64 = 1e-12;

/// Roots with `|sin k|` or `|sin γ|` below this are discarded: `Ω(±π, 0, γ)`
/// vanishes identically on the band edge (no current), and `γ → 0, π` is the
/// `cos γ = −1` branch at the closure of the open phase interval. Newton
/// creeps towards those lines slowly, so the margin is loose.
pub const BAND_EDGE_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub m11: Complex64,
    pub m12: Complex64,
    pub m21: Complex64,
    pub m22: Complex64,
    pub k: f64,
}

impl TransferMatrix {
    pub fn det(&self) -> Complex64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }
}

/// Maps right-lead coefficients to left-lead ones; `det = t_L / t_R`.
pub fn transfer_matrix(a: &ScatteringAmplitudes) -> Result<TransferMatrix> {
    let t_abs = a.t_right.norm();
    if !(t_abs > ZERO_TRANSMISSION) {
        return Err(Error::ZeroTransmission { t_abs });
    }
    let tr = a.t_right;
    let rr = a.r_right;
    Ok(TransferMatrix {
        m11: (a.t_left * tr - rr * rr) / tr,
        m12: rr / tr,
        m21: -rr / tr,
        m22: tr.inv(),
        k: a.k,
    })
}

/// `|M₂₂| = |1/t_R|` from a right-incidence solve of the generic solver.
///
/// A vanishing value flags a spectral singularity under zero flux. With flux
/// the criterion is not necessary: at the diode point the adjoint is singular
/// while `|M₂₂| = 1`.
pub fn m22_criterion(center: &crate::lattice::CenterGraph, k: f64) -> Result<f64> {
    let sol = solve_two_lead(center, k, Side::Right)?;
    let t = sol.transmission.unwrap_or_default();
    Ok(if t.norm() == 0.0 { f64::INFINITY } else { t.inv().norm() })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularityHit {
    pub gamma: f64,
    pub k: f64,
    pub omega_residual: f64,
    pub sinkc_residual: f64,
}

/// `|sin k + (cos γ + 1)/(2 sin γ)|`.
pub fn sinkc_residual(gamma: f64, k: f64) -> f64 {
    (k.sin() + (gamma.cos() + 1.0) / (2.0 * gamma.sin())).abs()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanGrid {
    pub gamma_steps: usize,
    pub k_steps: usize,
}

impl Default for ScanGrid {
    fn default() -> Self {
        ScanGrid {
            gamma_steps: 120,
            k_steps: 120,
        }
    }
}

fn cell_centers(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (i as f64 + 0.5) * (hi - lo) / n as f64).collect()
}

/// Damped Newton (Gauss-Newton when `γ` is held fixed) on `(Re Ω, Im Ω)`.
fn refine_root(mut k: f64, mut gamma: f64, fixed_gamma: bool) -> (f64, f64) {
    let mut om = omega(k, 0.0, gamma);
    for _ in 0..100 {
        if om.norm() <= 1e-3 * SCAN_TOL {
            break;
        }
        let (dk, _, dg) = omega_partials(k, 0.0, gamma);
        let (step_k, step_g) = if fixed_gamma {
            let den = dk.norm_sqr();
            if den == 0.0 {
                break;
            }
            (-(dk.conj() * om).re / den, 0.0)
        } else {
            // [Re dk  Re dg; Im dk  Im dg] [δk; δγ] = −[Re Ω; Im Ω]
            let det = dk.re * dg.im - dg.re * dk.im;
            if det == 0.0 {
                break;
            }
            (
                (-om.re * dg.im + om.im * dg.re) / det,
                (-dk.re * om.im + dk.im * om.re) / det,
            )
        };
        let mut lambda = 1.0;
        let mut accepted = false;
        while lambda > 1e-6 {
            let (nk, ng) = (k + lambda * step_k, gamma + lambda * step_g);
            let nom = omega(nk, 0.0, ng);
            if nom.norm() < om.norm() {
                k = nk;
                gamma = ng;
                om = nom;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (k, gamma)
}

/// Zeros of `Ω(k, 0, γ)` inside `gamma_range × k_range`.
///
/// `|Ω|` is sampled on cell centres; every local minimum seeds a damped
/// Newton refinement. Refined points are kept when `|Ω| ≤ SCAN_TOL`, they lie
/// inside the ranges and off the band edge. A degenerate `gamma_range`
/// (`lo == hi`) scans `k` alone at that phase. Hits are ordered by `γ`.
#[allow(clippy::needless_range_loop)]
pub fn scan_zero_flux_singularities(
    gamma_range: (f64, f64),
    k_range: (f64, f64),
    grid: ScanGrid,
) -> Vec<SingularityHit> {
    let fixed_gamma = gamma_range.0 == gamma_range.1;
    let gammas = if fixed_gamma {
        alloc::vec![gamma_range.0]
    } else {
        cell_centers(gamma_range.0, gamma_range.1, grid.gamma_steps.max(1))
    };
    let ks = cell_centers(k_range.0, k_range.1, grid.k_steps.max(1));
    let (ng, nk) = (gammas.len(), ks.len());
    let vals: Vec<f64> = gammas
        .iter()
        .flat_map(|&g| ks.iter().map(move |&k| omega(k, 0.0, g).norm()))
        .collect();
    let at = |i: usize, j: usize| vals[i * nk + j];

    let mut hits: Vec<SingularityHit> = Vec::new();
    for i in 0..ng {
        for j in 0..nk {
            let v = at(i, j);
            let mut is_min = true;
            for di in -1i64..=1 {
                for dj in -1i64..=1 {
                    let (ii, jj) = (i as i64 + di, j as i64 + dj);
                    if (di, dj) == (0, 0) || ii < 0 || jj < 0 || ii >= ng as i64 || jj >= nk as i64 {
                        continue;
                    }
                    if at(ii as usize, jj as usize) < v {
                        is_min = false;
                    }
                }
            }
            if !is_min {
                continue;
            }
            let (k, gamma) = refine_root(ks[j], gammas[i], fixed_gamma);
            let omega_residual = omega(k, 0.0, gamma).norm();
            let inside = |x: f64, (lo, hi): (f64, f64)| x >= lo.min(hi) && x <= hi.max(lo);
            if !(omega_residual <= SCAN_TOL)
                || !inside(gamma, gamma_range)
                || !inside(k, k_range)
                || k.sin().abs() < BAND_EDGE_TOL
                || gamma.sin().abs() < BAND_EDGE_TOL
            {
                continue;
            }
            if hits
                .iter()
                .any(|h| (h.k - k).abs() < 1e-8 && (h.gamma - gamma).abs() < 1e-8)
            {
                continue;
            }
            hits.push(SingularityHit {
                gamma,
                k,
                omega_residual,
                sinkc_residual: sinkc_residual(gamma, k),
            });
        }
    }
    hits.sort_by(|a, b| a.gamma.total_cmp(&b.gamma).then(a.k.total_cmp(&b.k)));
    hits
}

/// Default scan domain: `γ ∈ (0, π)`, `k ∈ (−π, 0)`.
pub fn scan_default() -> Vec<SingularityHit> {
    scan_zero_flux_singularities((0.0, PI), (-PI, 0.0), ScanGrid::default())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioSample {
    pub offset: f64,
    /// Worst `|r/t − 1|` over both sides of `k_c` and both incidences.
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RaReport {
    pub gamma: f64,
    pub kc: f64,
    pub omega_abs: f64,
    /// Offsets `10⁻², …, 10⁻⁶`.
    pub ratios: Vec<RatioSample>,
    pub ratios_converge: bool,
    /// Center-equation residual of the two-sided incoming plane wave.
    pub plane_wave_residual: f64,
    /// Group velocity of the left-lead wave `e^{−ik_c j}`.
    pub velocity_left: f64,
    /// Group velocity of the right-lead wave `e^{ik_c j}`.
    pub velocity_right: f64,
    pub inward: bool,
}

impl RaReport {
    pub fn final_deviation(&self) -> f64 {
        self.ratios.last().map_or(f64::INFINITY, |s| s.deviation)
    }
}

/// Checks the reflectionless-absorption state at a zero-flux singularity:
/// `r/t → 1` on approach, the incoming plane wave solves the center
/// equations, and the current flows into the center from both sides.
pub fn ra_eigenfunction_check(gamma_star: f64, kc: f64) -> Result<RaReport> {
    let omega_abs = omega(kc, 0.0, gamma_star).norm();
    if !(omega_abs <= 1e-6) {
        return Err(Error::NotSingular { omega_abs });
    }
    let one = Complex64::new(1.0, 0.0);
    let mut ratios = Vec::new();
    for e in 2..=6 {
        let offset = 10f64.powi(-e);
        let mut deviation: f64 = 0.0;
        for k in [kc - offset, kc + offset] {
            let a = bethe_amplitudes(k, 0.0, gamma_star)?;
            deviation = deviation
                .max((a.r_left / a.t_left - one).norm())
                .max((a.r_right / a.t_right - one).norm());
        }
        ratios.push(RatioSample { offset, deviation });
    }
    let ratios_converge = ratios.windows(2).all(|w| w[1].deviation < w[0].deviation);

    let j = 1.0;
    let center = build_triangle_center_raw(j, gamma_star, 0.0);
    let h = center.hamiltonian();
    let e = dispersion(kc, j);
    // sites −1, 0, 1 ↔ rows 0, 1, 2
    let wave = |site: f64| {
        if site < 0.0 {
            Complex64::cis(-kc * site)
        } else {
            Complex64::cis(kc * site)
        }
    };
    let mut psi = [wave(-1.0), Complex64::new(0.0, 0.0), wave(1.0)];
    psi[1] = (h[(1, 0)] * psi[0] + h[(1, 2)] * psi[2]) / (e - h[(1, 1)]);
    let lead = Complex64::new(-j, 0.0);
    let outer = [lead * wave(-2.0), Complex64::new(0.0, 0.0), lead * wave(2.0)];
    let mut plane_wave_residual: f64 = 0.0;
    for row in 0..3 {
        let hpsi: Complex64 = (0..3).map(|c| h[(row, c)] * psi[c]).sum::<Complex64>() + outer[row];
        plane_wave_residual = plane_wave_residual.max((hpsi - e * psi[row]).norm());
    }
    let velocity_left = group_velocity(-kc, j);
    let velocity_right = group_velocity(kc, j);
    Ok(RaReport {
        gamma: gamma_star,
        kc,
        omega_abs,
        ratios,
        ratios_converge,
        plane_wave_residual,
        velocity_left,
        velocity_right,
        inward: velocity_left > 0.0 && velocity_right < 0.0,
    })
}
