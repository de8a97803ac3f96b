//! Scattering states of an arbitrary center by direct solution of the
//! matching equations.
//!
//! Leads are never truncated. On the left lead `ψ(j) = a e^{ikj} + c e^{−ikj}`
//! and on the right lead `ψ(j) = a e^{−ikj} + c e^{ikj}`, where `a = 1` on
//! the incidence side and `0` elsewhere and `c` is unknown. The unknowns
//! are `c` for each attached lead plus every center amplitude; the equations
//! are the eigenvalue equation at each center site plus one constraint per
//! lead tying the port amplitude to the lead wave at the port coordinate.
//! The incident wave has unit amplitude with phase referenced at `j = 0`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::analytic::ScatteringAmplitudes;
use crate::error::{Error, Result};
use crate::lattice::{dispersion, is_propagating, CenterGraph};
use crate::linalg::{solve_checked, CMatrix};

/// Condition estimate above which the matching system counts as singular.
pub const MAX_CONDITION: f64 = 1e12;

/// Accepted solutions satisfy `residual <= RESIDUAL_TOL · J · max(1, max|ψ|)`.
pub const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    TwoLead,
    /// Right lead removed; only left incidence is possible.
    SemiInfiniteLeft,
    /// Left lead removed; only right incidence is possible.
    SemiInfiniteRight,
}

impl Geometry {
    fn has_lead(self, side: Side) -> bool {
        !matches!(
            (self, side),
            (Geometry::SemiInfiniteLeft, Side::Right) | (Geometry::SemiInfiniteRight, Side::Left)
        )
    }

    /// Semi-infinite geometry keeping the lead on `surviving`.
    pub fn semi_infinite(surviving: Side) -> Geometry {
        match surviving {
            Side::Left => Geometry::SemiInfiniteLeft,
            Side::Right => Geometry::SemiInfiniteRight,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterConfig {
    pub center: CenterGraph,
    pub geometry: Geometry,
    pub incidence: Side,
}

impl ScatterConfig {
    pub fn new(center: CenterGraph, geometry: Geometry, incidence: Side) -> Result<Self> {
        if !geometry.has_lead(incidence) {
            return Err(Error::InvalidParameter("incidence side has no lead in this geometry"));
        }
        Ok(ScatterConfig {
            center,
            geometry,
            incidence,
        })
    }
}

/// One scattering state.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatterSolution {
    pub k: f64,
    pub geometry: Geometry,
    pub incidence: Side,
    pub reflection: Complex64,
    /// Absent for semi-infinite geometries.
    pub transmission: Option<Complex64>,
    /// Amplitude on every center site.
    pub interior: Vec<Complex64>,
    pub residual: f64,
}

impl ScatterSolution {
    /// Outgoing-wave coefficient `c` on `side`, if that lead is attached.
    fn lead_coefficient(&self, side: Side) -> Option<Complex64> {
        if !self.geometry.has_lead(side) {
            None
        } else if side == self.incidence {
            Some(self.reflection)
        } else {
            self.transmission
        }
    }

    fn incoming(&self, side: Side) -> f64 {
        if side == self.incidence {
            1.0
        } else {
            0.0
        }
    }
}

/// Lead wave at paper coordinate `j`: `a e^{±ikj} + c e^{∓ikj}`.
fn lead_wave(side: Side, k: f64, incoming: f64, outgoing: Complex64, j: i64) -> Complex64 {
    let phase = Complex64::cis(k * j as f64);
    match side {
        Side::Left => incoming * phase + outgoing * phase.conj(),
        Side::Right => incoming * phase.conj() + outgoing * phase,
    }
}

/// `(coordinate of the port, coordinate of the first lead site)` on `side`.
fn port_coordinates(center: &CenterGraph, side: Side) -> (i64, i64) {
    match side {
        Side::Left => {
            let p = center.left_port_coordinate();
            (p, p - 1)
        }
        Side::Right => {
            let p = center.right_port_coordinate();
            (p, p + 1)
        }
    }
}

fn port_index(center: &CenterGraph, side: Side) -> usize {
    match side {
        Side::Left => center.port_left(),
        Side::Right => center.port_right(),
    }
}

fn solve_geometry(center: &CenterGraph, k: f64, geometry: Geometry, incidence: Side) -> Result<ScatterSolution> {
    if !is_propagating(k) {
        return Err(Error::NotPropagating { k });
    }
    if !geometry.has_lead(incidence) {
        return Err(Error::InvalidParameter("incidence side has no lead in this geometry"));
    }
    let n = center.len();
    let jl = center.lead_hopping();
    let energy = dispersion(k, jl);
    let leads: Vec<Side> = [Side::Left, Side::Right]
        .into_iter()
        .filter(|&s| geometry.has_lead(s))
        .collect();
    let dim = n + leads.len();
    let mut a = CMatrix::zeros(dim, dim);
    let mut b = vec![Complex64::new(0.0, 0.0); dim];
    let h = center.hamiltonian();

    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = h[(i, j)];
        }
        a[(i, i)] -= energy;
    }
    for (li, &side) in leads.iter().enumerate() {
        let col = n + li;
        let incoming = if side == incidence { 1.0 } else { 0.0 };
        let port = port_index(center, side);
        let (jp, jn) = port_coordinates(center, side);
        // −J ψ(first lead site) in the port equation
        let known = lead_wave(side, k, incoming, Complex64::new(0.0, 0.0), jn);
        let unit = lead_wave(side, k, 0.0, Complex64::new(1.0, 0.0), jn);
        a[(port, col)] += -jl * unit;
        b[port] -= -jl * known;
        // ψ(port) = lead wave at the port coordinate
        let row = n + li;
        let known = lead_wave(side, k, incoming, Complex64::new(0.0, 0.0), jp);
        let unit = lead_wave(side, k, 0.0, Complex64::new(1.0, 0.0), jp);
        a[(row, port)] = Complex64::new(jl, 0.0);
        a[(row, col)] = -jl * unit;
        b[row] = jl * known;
    }

    let x = solve_checked(&a, &b, MAX_CONDITION)?;
    let coefficient = |side: Side| leads.iter().position(|&s| s == side).map(|li| x[n + li]);
    let reflection = coefficient(incidence).expect("incidence lead attached");
    let transmission = coefficient(incidence.opposite());
    let mut sol = ScatterSolution {
        k,
        geometry,
        incidence,
        reflection,
        transmission,
        interior: x[..n].to_vec(),
        residual: 0.0,
    };
    sol.residual = check_residual(&sol, center, k);
    let scale = x.iter().map(|z| z.norm()).fold(1.0, f64::max);
    if !(sol.residual <= RESIDUAL_TOL * jl * scale) {
        let lu = crate::linalg::Lu::new(&a)?;
        return Err(Error::SingularSystem {
            condition: crate::linalg::condition_1(&a, &lu),
        });
    }
    Ok(sol)
}

/// Two-lead scattering state for incidence from `incidence`.
pub fn solve_two_lead(center: &CenterGraph, k: f64, incidence: Side) -> Result<ScatterSolution> {
    solve_geometry(center, k, Geometry::TwoLead, incidence)
}

/// One-lead scattering state: the lead on `side` survives, the other is cut.
/// The cut port keeps its bonds inside the center.
pub fn solve_semi_infinite(center: &CenterGraph, k: f64, side: Side) -> Result<ScatterSolution> {
    solve_geometry(center, k, Geometry::semi_infinite(side), side)
}

pub fn solve(config: &ScatterConfig, k: f64) -> Result<ScatterSolution> {
    solve_geometry(&config.center, k, config.geometry, config.incidence)
}

/// All four two-lead amplitudes at `k` (two solves).
pub fn solve_amplitudes(center: &CenterGraph, k: f64) -> Result<ScatteringAmplitudes> {
    let left = solve_two_lead(center, k, Side::Left)?;
    let right = solve_two_lead(center, k, Side::Right)?;
    Ok(ScatteringAmplitudes {
        k,
        r_left: left.reflection,
        r_right: right.reflection,
        t_left: left.transmission.expect("two-lead"),
        t_right: right.transmission.expect("two-lead"),
    })
}

/// Largest defect of the eigenvalue equation over the center sites and the
/// two innermost sites of each attached lead.
pub fn check_residual(sol: &ScatterSolution, center: &CenterGraph, k: f64) -> f64 {
    let jl = center.lead_hopping();
    let energy = dispersion(k, jl);
    let h = center.hamiltonian();
    let n = center.len();
    let mut lhs: Vec<Complex64> = (0..n)
        .map(|i| (0..n).map(|j| h[(i, j)] * sol.interior[j]).sum::<Complex64>() - energy * sol.interior[i])
        .collect();
    let mut worst: f64 = 0.0;
    for side in [Side::Left, Side::Right] {
        let Some(c) = sol.lead_coefficient(side) else {
            continue;
        };
        let a = sol.incoming(side);
        let port = port_index(center, side);
        let (_, first) = port_coordinates(center, side);
        let step: i64 = if side == Side::Left { -1 } else { 1 };
        let psi = |j: i64| lead_wave(side, k, a, c, j);
        lhs[port] += -jl * psi(first);
        // innermost lead site couples back to the actual port amplitude
        let d1 = -jl * (psi(first + step) + sol.interior[port]) - energy * psi(first);
        let d2 = -jl * (psi(first + 2 * step) + psi(first)) - energy * psi(first + step);
        worst = worst.max(d1.norm()).max(d2.norm());
    }
    lhs.iter().map(|z| z.norm()).fold(worst, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::closed_form_amplitudes;
    use crate::lattice::{build_triangle_center, TriangleParams};
    use core::f64::consts::PI;

    fn single_site(v: Complex64) -> CenterGraph {
        CenterGraph::new(CMatrix::zeros(1, 1), vec![v], 0, 0, 1.0).unwrap()
    }

    #[test]
    fn diode_point_left_incidence() {
        let p = TriangleParams::new(1.0, 2.0 * PI / 3.0, PI / 3.0).unwrap();
        let c = build_triangle_center(&p);
        let s = solve_two_lead(&c, 2.0 * PI / 3.0, Side::Left).unwrap();
        assert!(s.reflection.norm() < 1e-14);
        assert!(s.transmission.unwrap().norm() < 1e-14);
        assert!(s.residual <= 1e-12);
    }

    #[test]
    fn single_site_hand_elimination() {
        // ψ(0) = t = 1 + r;  −2J cos k · t = −J(e^{−ik} + r e^{ik} + t e^{ik}) + V t
        // ⇒ t = 2iJ sin k / (2iJ sin k − V)
        let v = Complex64::new(-1.0, 0.0);
        let k = PI / 2.0;
        let expect = Complex64::new(0.0, 2.0) / (Complex64::new(0.0, 2.0) - v);
        let s = solve_two_lead(&single_site(v), k, Side::Left).unwrap();
        assert!((s.transmission.unwrap() - expect).norm() < 1e-14);
        assert!((1.0 + s.reflection - s.transmission.unwrap()).norm() < 1e-14);
        let lossy = Complex64::new(0.3, -0.7);
        let expect = Complex64::new(0.0, 2.0 * 1.1f64.sin()) / (Complex64::new(0.0, 2.0 * 1.1f64.sin()) - lossy);
        let s = solve_two_lead(&single_site(lossy), 1.1, Side::Right).unwrap();
        assert!((s.transmission.unwrap() - expect).norm() < 1e-14);
    }

    #[test]
    fn matches_closed_form() {
        let p = TriangleParams::new(1.0, 2.0, 0.7).unwrap();
        let c = build_triangle_center(&p);
        let num = solve_amplitudes(&c, 1.0).unwrap();
        let exact = closed_form_amplitudes(1.0, &p).unwrap();
        assert!(num.max_deviation(&exact) < 1e-12);
    }

    #[test]
    fn semi_infinite_reflectionless_at_diode() {
        for gamma in [PI / 6.0, PI / 3.0, 2.0 * PI / 3.0] {
            let c = build_triangle_center(&TriangleParams::new(1.0, gamma, PI - gamma).unwrap());
            let s = solve_semi_infinite(&c, gamma, Side::Left).unwrap();
            assert!(s.reflection.norm() <= 1e-10, "gamma {gamma}: {}", s.reflection.norm());
            assert!(s.transmission.is_none());
            let c = build_triangle_center(&TriangleParams::new(1.0, gamma, -(PI - gamma)).unwrap());
            let s = solve_semi_infinite(&c, gamma, Side::Right).unwrap();
            assert!(s.reflection.norm() <= 1e-10);
        }
    }

    #[test]
    fn semi_infinite_hermitian_total_reflection() {
        let c = build_triangle_center(&TriangleParams::new(1.0, 0.0, 0.8).unwrap());
        for k in [0.2, 1.3, 2.9] {
            for side in [Side::Left, Side::Right] {
                let s = solve_semi_infinite(&c, k, side).unwrap();
                assert!((s.reflection.norm() - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn residual_detects_perturbation() {
        let c = build_triangle_center(&TriangleParams::new(1.0, 2.0, 0.7).unwrap());
        let mut s = solve_two_lead(&c, 1.0, Side::Left).unwrap();
        assert!(check_residual(&s, &c, 1.0) <= 1e-10);
        s.reflection += 1e-3;
        assert!(check_residual(&s, &c, 1.0) >= 1e-4);
    }

    #[test]
    fn rejects_bad_inputs() {
        let c = build_triangle_center(&TriangleParams::new(1.0, 2.0, 0.7).unwrap());
        assert!(matches!(
            solve_two_lead(&c, 0.0, Side::Left),
            Err(Error::NotPropagating { .. })
        ));
        assert!(matches!(
            solve_two_lead(&c, PI, Side::Left),
            Err(Error::NotPropagating { .. })
        ));
        assert!(ScatterConfig::new(c.clone(), Geometry::SemiInfiniteLeft, Side::Right).is_err());
        let cfg = ScatterConfig::new(c, Geometry::SemiInfiniteRight, Side::Right).unwrap();
        assert!(solve(&cfg, 1.0).is_ok());
    }

    #[test]
    fn singular_point_of_adjoint() {
        // H† of the diode has a spectral singularity at (k, φ) = (γ, π − γ)
        let gamma = PI / 6.0;
        let c = crate::lattice::dagger_center(&build_triangle_center(
            &TriangleParams::new(1.0, gamma, PI - gamma).unwrap(),
        ));
        assert!(matches!(
            solve_two_lead(&c, gamma, Side::Left),
            Err(Error::SingularSystem { .. })
        ));
    }
}
