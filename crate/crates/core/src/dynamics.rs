//! Wave-packet propagation on truncated chains.
//!
//! `i dψ/dt = Hψ` (ħ = 1, time in units of 1/J) is integrated with a
//! truncated Taylor series of `exp(−iHh)` applied through a sparse copy of
//! the chain matrix. The series is summed until the last term drops below
//! `10⁻³ · tol`, and the step is fixed after a step-halving check on the
//! first step, so the local error per step stays below `tol`.
//!
//! Norm accounting follows the chain partition: left lead `j ≤ −2`, center,
//! right lead `j ≥ 2`. Probability lost at the lossy center is the absorbed
//! fraction `1 − ‖ψ(T)‖²`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::analytic::closed_form_amplitudes;
use crate::error::{Error, Result};
use crate::lattice::{build_finite_chain, build_triangle_center, group_velocity, FiniteChain, Region, TriangleParams};
use crate::solver::{solve_semi_infinite, Side};

/// Default local error bound per step.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Minimum number of stored samples.
pub const MIN_SAMPLES: usize = 50;

/// Sites at each hard-wall end that must stay empty.
pub const EDGE_SITES: usize = 10;

/// Largest tolerated probability on the edge sites.
pub const EDGE_NORM_LIMIT: f64 = 1e-8;

/// Packet clearance from chain ends and center, in units of `σ`.
pub const CLEARANCE_SIGMAS: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Moving towards `+j` (incident from the left).
    Rightward,
    /// Moving towards `−j` (incident from the right).
    Leftward,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Rightward => 1.0,
            Direction::Leftward => -1.0,
        }
    }

    /// The lead the packet comes from.
    pub fn incidence(self) -> Side {
        match self {
            Direction::Rightward => Side::Left,
            Direction::Leftward => Side::Right,
        }
    }

    pub fn from_incidence(side: Side) -> Self {
        match side {
            Side::Left => Direction::Rightward,
            Side::Right => Direction::Leftward,
        }
    }
}

/// Gaussian packet `∝ exp(−(j−j₀)²/(4σ²)) exp(i k₀ s j)`, `s = ±1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketSpec {
    pub center_site: i64,
    pub sigma: f64,
    pub k0: f64,
    pub direction: Direction,
}

impl PacketSpec {
    /// A packet `distance` sites away from the center, heading towards it.
    pub fn incident(side: Side, distance: i64, sigma: f64, k0: f64) -> Self {
        let center_site = match side {
            Side::Left => -distance,
            Side::Right => distance,
        };
        PacketSpec {
            center_site,
            sigma,
            k0,
            direction: Direction::from_incidence(side),
        }
    }
}

/// Normalized initial state on `chain`. Center sites without a coordinate
/// start empty.
pub fn make_packet(chain: &FiniteChain, spec: &PacketSpec) -> Result<Vec<Complex64>> {
    if !(spec.sigma.is_finite() && spec.sigma > 0.0) {
        return Err(Error::InvalidParameter("packet width must be positive"));
    }
    if !(spec.k0 > 0.0 && spec.k0 < PI) {
        return Err(Error::InvalidParameter("carrier momentum must lie in (0, pi)"));
    }
    let row = chain.row_of(spec.center_site).ok_or(Error::PacketTooWide)?;
    let c = chain.center();
    let (near, far) = match chain.region(row) {
        Region::LeftLead => (
            c.left_port_coordinate() - spec.center_site,
            chain.coordinate(0).expect("lead row") - spec.center_site,
        ),
        Region::RightLead => (
            spec.center_site - c.right_port_coordinate(),
            spec.center_site - chain.coordinate(chain.dim() - 1).expect("lead row"),
        ),
        Region::Center => return Err(Error::PacketTooWide),
    };
    let clearance = CLEARANCE_SIGMAS * spec.sigma;
    if (near as f64) < clearance || (far.abs() as f64) < clearance {
        return Err(Error::PacketTooWide);
    }
    let s = spec.direction.sign();
    let mut psi: Vec<Complex64> = (0..chain.dim())
        .map(|r| match chain.coordinate(r) {
            Some(j) => {
                let x = (j - spec.center_site) as f64;
                Complex64::from_polar((-x * x / (4.0 * spec.sigma * spec.sigma)).exp(), spec.k0 * s * j as f64)
            }
            None => Complex64::new(0.0, 0.0),
        })
        .collect();
    let norm = norm_sqr(&psi).sqrt();
    psi.iter_mut().for_each(|z| *z /= norm);
    Ok(psi)
}

fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// `Σ_j |ψ_j|² j / Σ_j |ψ_j|²` over rows with a coordinate.
pub fn mean_coordinate(chain: &FiniteChain, psi: &[Complex64]) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for (r, z) in psi.iter().enumerate() {
        if let Some(j) = chain.coordinate(r) {
            num += z.norm_sqr() * j as f64;
            den += z.norm_sqr();
        }
    }
    num / den
}

/// Compressed sparse rows.
#[derive(Debug, Clone)]
struct Csr {
    ptr: Vec<usize>,
    idx: Vec<usize>,
    val: Vec<Complex64>,
}

impl Csr {
    fn from_chain(chain: &FiniteChain) -> Self {
        let m = chain.matrix();
        let mut ptr = vec![0];
        let mut idx = Vec::new();
        let mut val = Vec::new();
        for i in 0..m.rows() {
            for (j, z) in m.row(i).iter().enumerate() {
                if *z != Complex64::new(0.0, 0.0) {
                    idx.push(j);
                    val.push(*z);
                }
            }
            ptr.push(idx.len());
        }
        Csr { ptr, idx, val }
    }

    fn apply(&self, x: &[Complex64], out: &mut [Complex64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for p in self.ptr[i]..self.ptr[i + 1] {
                acc += self.val[p] * x[self.idx[p]];
            }
            *o = acc;
        }
    }

    /// Maximum absolute row sum.
    fn norm_inf(&self) -> f64 {
        (0..self.ptr.len() - 1)
            .map(|i| {
                self.val[self.ptr[i]..self.ptr[i + 1]]
                    .iter()
                    .map(|z| z.norm())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }
}

const MAX_TERMS: usize = 60;

/// One Taylor step `ψ ← exp(−iHh) ψ`; `None` if the series did not settle.
fn taylor_step(h: &Csr, psi: &[Complex64], dt: f64, tol: f64, scratch: &mut [Complex64]) -> Option<Vec<Complex64>> {
    let mut term = psi.to_vec();
    let mut out = psi.to_vec();
    let scale = norm_sqr(psi).sqrt().max(f64::MIN_POSITIVE);
    let minus_i_dt = Complex64::new(0.0, -dt);
    for n in 1..=MAX_TERMS {
        h.apply(&term, scratch);
        let f = minus_i_dt / n as f64;
        for (t, s) in term.iter_mut().zip(scratch.iter()) {
            *t = f * s;
        }
        out.iter_mut().zip(&term).for_each(|(o, t)| *o += t);
        if norm_sqr(&term).sqrt() <= 1e-3 * tol * scale {
            return Some(out);
        }
    }
    None
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionNorms {
    pub left: f64,
    pub center: f64,
    pub right: f64,
}

impl RegionNorms {
    pub fn total(&self) -> f64 {
        self.left + self.center + self.right
    }
}

/// Final-time bookkeeping relative to the incidence side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fractions {
    pub reflected: f64,
    pub transmitted: f64,
    pub absorbed: f64,
    /// Probability still on the center sites.
    pub center: f64,
}

#[derive(Debug, Clone)]
pub struct PacketTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<Complex64>>,
    pub region_norms: Vec<RegionNorms>,
    /// Step used after the halving check.
    pub step: f64,
    /// `‖ψ_h − ψ_{h/2,h/2}‖_∞` on the first step.
    pub first_step_error: f64,
    /// Largest norm increase between consecutive steps.
    pub max_norm_increase: f64,
    /// Largest edge-site probability over the samples.
    pub edge_norm: f64,
}

impl PacketTrajectory {
    pub fn final_norms(&self) -> RegionNorms {
        *self.region_norms.last().expect("trajectory has samples")
    }

    pub fn fractions(&self, incidence: Side) -> Fractions {
        let n = self.final_norms();
        let (reflected, transmitted) = match incidence {
            Side::Left => (n.left, n.right),
            Side::Right => (n.right, n.left),
        };
        Fractions {
            reflected,
            transmitted,
            absorbed: 1.0 - n.total(),
            center: n.center,
        }
    }

    pub fn totals(&self) -> Vec<f64> {
        self.region_norms.iter().map(RegionNorms::total).collect()
    }
}

pub fn region_norms(chain: &FiniteChain, psi: &[Complex64]) -> RegionNorms {
    let mut n = RegionNorms {
        left: 0.0,
        center: 0.0,
        right: 0.0,
    };
    for (r, z) in psi.iter().enumerate() {
        match chain.region(r) {
            Region::LeftLead => n.left += z.norm_sqr(),
            Region::Center => n.center += z.norm_sqr(),
            Region::RightLead => n.right += z.norm_sqr(),
        }
    }
    n
}

fn edge_norm(chain: &FiniteChain, psi: &[Complex64]) -> f64 {
    let left: f64 = psi[..chain.n_left().min(EDGE_SITES)].iter().map(|z| z.norm_sqr()).sum();
    let right_len = chain.n_right().min(EDGE_SITES);
    let right: f64 = psi[psi.len() - right_len..].iter().map(|z| z.norm_sqr()).sum();
    left + right
}

/// Evolves for `duration` with [`MIN_SAMPLES`] samples.
pub fn evolve(chain: &FiniteChain, state: &[Complex64], duration: f64, tol: f64) -> Result<PacketTrajectory> {
    evolve_sampled(chain, state, duration, tol, MIN_SAMPLES)
}

/// Evolves and stores `samples + 1` states at evenly spaced instants
/// (including `t = 0`). Fails with [`Error::BoundaryContact`] if probability
/// reaches the outer [`EDGE_SITES`] of an attached lead.
pub fn evolve_sampled(
    chain: &FiniteChain,
    state: &[Complex64],
    duration: f64,
    tol: f64,
    samples: usize,
) -> Result<PacketTrajectory> {
    if state.len() != chain.dim() {
        return Err(Error::InvalidParameter("state length must match the chain"));
    }
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::InvalidParameter("duration must be positive"));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidParameter("tolerance must be positive"));
    }
    let samples = samples.max(MIN_SAMPLES);
    let h = Csr::from_chain(chain);
    let interval = duration / samples as f64;
    // ‖H‖h ≤ 1 keeps the series short and well conditioned.
    let h_max = 1.0 / h.norm_inf().max(1e-12);
    let mut substeps = (interval / h_max).ceil().max(1.0) as usize;
    let mut scratch = vec![Complex64::new(0.0, 0.0); chain.dim()];

    let first_step_error = loop {
        let dt = interval / substeps as f64;
        let full = taylor_step(&h, state, dt, tol, &mut scratch);
        let half = taylor_step(&h, state, dt / 2.0, tol, &mut scratch)
            .and_then(|mid| taylor_step(&h, &mid, dt / 2.0, tol, &mut scratch));
        match (full, half) {
            (Some(a), Some(b)) if max_diff(&a, &b) <= tol => break max_diff(&a, &b),
            _ if substeps > 1 << 20 => return Err(Error::Integrator("step-halving check failed")),
            _ => substeps *= 2,
        }
    };
    let dt = interval / substeps as f64;

    let mut psi = state.to_vec();
    let mut times = vec![0.0];
    let mut states = vec![psi.clone()];
    let mut norms = vec![region_norms(chain, &psi)];
    let mut edge = edge_norm(chain, &psi);
    let mut max_norm_increase: f64 = 0.0;
    let mut norm = norm_sqr(&psi);
    for s in 1..=samples {
        for _ in 0..substeps {
            psi = taylor_step(&h, &psi, dt, tol, &mut scratch)
                .ok_or(Error::Integrator("Taylor series did not converge"))?;
            let next = norm_sqr(&psi);
            max_norm_increase = max_norm_increase.max(next - norm);
            norm = next;
        }
        times.push(s as f64 * interval);
        norms.push(region_norms(chain, &psi));
        edge = edge.max(edge_norm(chain, &psi));
        states.push(psi.clone());
    }
    if !(edge < EDGE_NORM_LIMIT) {
        return Err(Error::BoundaryContact { edge_norm: edge });
    }
    Ok(PacketTrajectory {
        times,
        states,
        region_norms: norms,
        step: dt,
        first_step_error,
        max_norm_increase,
        edge_norm: edge,
    })
}

/// Normalized momentum distribution of the initial packet along its heading,
/// `w(k) ∝ |Σ_j ψ₀(j) e^{−i s k j}|²`, on the Simpson nodes `ks`.
fn momentum_weights(chain: &FiniteChain, psi: &[Complex64], direction: Direction, ks: &[f64]) -> Vec<f64> {
    let s = direction.sign();
    let sites: Vec<(f64, Complex64)> = psi
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm_sqr() > 1e-30)
        .filter_map(|(r, z)| chain.coordinate(r).map(|j| (j as f64, *z)))
        .collect();
    ks.iter()
        .map(|&k| {
            sites
                .iter()
                .map(|&(j, z)| z * Complex64::cis(-s * k * j))
                .sum::<Complex64>()
                .norm_sqr()
        })
        .collect()
}

const AVERAGE_INTERVALS: usize = 4000;
const AVERAGE_EDGE: f64 = 1e-6;

/// Packet average `∫ f(k) w(k) dk / ∫ w(k) dk` over `(0, π)` by Simpson's rule.
pub fn packet_average<F>(chain: &FiniteChain, psi: &[Complex64], direction: Direction, mut f: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let n = AVERAGE_INTERVALS;
    let (a, b) = (AVERAGE_EDGE, PI - AVERAGE_EDGE);
    let hk = (b - a) / n as f64;
    let ks: Vec<f64> = (0..=n).map(|i| a + i as f64 * hk).collect();
    let w = momentum_weights(chain, psi, direction, &ks);
    let (mut num, mut den) = (0.0, 0.0);
    for (i, (&k, &wi)) in ks.iter().zip(&w).enumerate() {
        let c = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        den += c * wi;
        if wi * c > 0.0 {
            num += c * wi * f(k)?;
        }
    }
    Ok(num / den)
}

/// Chain geometry and integrator settings shared by the experiments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentSetup {
    /// Total number of sites including the center.
    pub sites: usize,
    /// Distance `|j₀|` of the initial packet from the origin.
    pub distance: i64,
    pub tol: f64,
    pub samples: usize,
    /// Propagation time; `None` picks `(|j₀| + 6σ)/|v(k₀)|`.
    pub duration: Option<f64>,
}

impl Default for ExperimentSetup {
    fn default() -> Self {
        ExperimentSetup {
            sites: 600,
            distance: 150,
            tol: DEFAULT_TOL,
            samples: MIN_SAMPLES,
            duration: None,
        }
    }
}

impl ExperimentSetup {
    pub fn duration_for(&self, sigma: f64, k0: f64, j: f64) -> f64 {
        self.duration
            .unwrap_or_else(|| (self.distance as f64 + 6.0 * sigma) / group_velocity(k0, j).abs())
    }

    /// Lead lengths `(n_left, n_right)` for a three-site center.
    pub fn split(&self) -> Result<(usize, usize)> {
        if self.sites < 4 {
            return Err(Error::InvalidParameter("chain too short"));
        }
        let leads = self.sites - 3;
        Ok((leads / 2, leads - leads / 2))
    }
}

/// One directional run with its steady-state prediction.
#[derive(Debug, Clone)]
pub struct DirectionalRun {
    pub incidence: Side,
    pub packet: PacketSpec,
    pub trajectory: PacketTrajectory,
    pub fractions: Fractions,
    pub predicted_transmission: f64,
    pub predicted_reflection: f64,
    /// `|t(k₀)|²` of the closed form.
    pub point_transmission: f64,
}

impl DirectionalRun {
    /// Measured over predicted transmitted fraction.
    pub fn agreement(&self) -> f64 {
        self.fractions.transmitted / self.predicted_transmission
    }
}

#[derive(Debug, Clone)]
pub struct DiodeReport {
    pub params: TriangleParams,
    pub duration: f64,
    pub left: DirectionalRun,
    pub right: DirectionalRun,
}

fn run_direction(
    chain: &FiniteChain,
    p: &TriangleParams,
    packet: PacketSpec,
    duration: f64,
    setup: &ExperimentSetup,
) -> Result<DirectionalRun> {
    let psi0 = make_packet(chain, &packet)?;
    let trajectory = evolve_sampled(chain, &psi0, duration, setup.tol, setup.samples)?;
    let incidence = packet.direction.incidence();
    let pick = |k: f64| -> Result<(f64, f64)> {
        let a = closed_form_amplitudes(k, p)?;
        Ok(match incidence {
            Side::Left => (a.t_left.norm_sqr(), a.r_left.norm_sqr()),
            Side::Right => (a.t_right.norm_sqr(), a.r_right.norm_sqr()),
        })
    };
    let predicted_transmission = packet_average(chain, &psi0, packet.direction, |k| Ok(pick(k)?.0))?;
    let predicted_reflection = packet_average(chain, &psi0, packet.direction, |k| Ok(pick(k)?.1))?;
    Ok(DirectionalRun {
        incidence,
        packet,
        fractions: trajectory.fractions(incidence),
        trajectory,
        predicted_transmission,
        predicted_reflection,
        point_transmission: pick(packet.k0)?.0,
    })
}

/// One packet from `incidence` on the two-lead chain of `setup`.
pub fn directional_experiment(
    p: &TriangleParams,
    incidence: Side,
    sigma: f64,
    k0: f64,
    setup: &ExperimentSetup,
) -> Result<DirectionalRun> {
    let (nl, nr) = setup.split()?;
    let chain = build_finite_chain(&build_triangle_center(p), nl, nr)?;
    let duration = setup.duration_for(sigma, k0, p.j());
    run_direction(
        &chain,
        p,
        PacketSpec::incident(incidence, setup.distance, sigma, k0),
        duration,
        setup,
    )
}

/// Left- and right-incident packets on the same two-lead chain. `sigma` and
/// `k0` are shared; each packet starts `setup.distance` sites out.
pub fn diode_experiment(p: &TriangleParams, sigma: f64, k0: f64, setup: &ExperimentSetup) -> Result<DiodeReport> {
    Ok(DiodeReport {
        params: *p,
        duration: setup.duration_for(sigma, k0, p.j()),
        left: directional_experiment(p, Side::Left, sigma, k0, setup)?,
        right: directional_experiment(p, Side::Right, sigma, k0, setup)?,
    })
}

#[derive(Debug, Clone)]
pub struct AbsorberReport {
    pub params: TriangleParams,
    pub cut: Side,
    pub packet: PacketSpec,
    pub duration: f64,
    pub trajectory: PacketTrajectory,
    pub reflected: f64,
    pub absorbed: f64,
    /// Packet average of `|r_semi(k)|²`.
    pub predicted_reflection: f64,
}

/// A packet from the surviving lead hits the center with the `cut` lead
/// removed.
pub fn absorber_experiment(
    p: &TriangleParams,
    cut: Side,
    sigma: f64,
    k0: f64,
    setup: &ExperimentSetup,
) -> Result<AbsorberReport> {
    let (nl, nr) = setup.split()?;
    let (nl, nr) = match cut {
        Side::Left => (0, nr),
        Side::Right => (nl, 0),
    };
    let center = build_triangle_center(p);
    let chain = build_finite_chain(&center, nl, nr)?;
    let surviving = cut.opposite();
    let packet = PacketSpec::incident(surviving, setup.distance, sigma, k0);
    let psi0 = make_packet(&chain, &packet)?;
    let duration = setup.duration_for(sigma, k0, p.j());
    let trajectory = evolve_sampled(&chain, &psi0, duration, setup.tol, setup.samples)?;
    let f = trajectory.fractions(surviving);
    let predicted_reflection = packet_average(&chain, &psi0, packet.direction, |k| {
        Ok(solve_semi_infinite(&center, k, surviving)?.reflection.norm_sqr())
    })?;
    Ok(AbsorberReport {
        params: *p,
        cut,
        packet,
        duration,
        reflected: f.reflected,
        absorbed: f.absorbed,
        predicted_reflection,
        trajectory,
    })
}
