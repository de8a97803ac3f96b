//! Model parameters, scattering-center graphs and truncated chains.
//!
//! Paper-style site coordinates: with distinct ports the left port sits at
//! `j = -1` and the right port at `j = +1`, leads occupy `j <= -2` and
//! `j >= 2`. With coincident ports the single attachment site is `j = 0` and
//! the leads start at `j = -1` and `j = +1`.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// Default cap on the dimension of a truncated chain.
pub const DEFAULT_DIMENSION_CAP: usize = 5000;

/// Lead dispersion `E(k) = -2 J cos k`.
pub fn dispersion(k: f64, j: f64) -> f64 {
    -2.0 * j * k.cos()
}

/// Group velocity `dE/dk = 2 J sin k`; the sign carries the direction.
pub fn group_velocity(k: f64, j: f64) -> f64 {
    2.0 * j * k.sin()
}

/// `true` when `0 < |k| < π`, i.e. the lead wave carries current.
pub fn is_propagating(k: f64) -> bool {
    k.is_finite() && k != 0.0 && k.abs() < PI
}

/// Parameters of the flux-threaded triangle: hopping `J`, potential phase
/// `γ` (`V = -J e^{iγ}`) and Aharonov-Bohm flux `φ`, stored mod 2π.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleParams {
    j: f64,
    gamma: f64,
    phi: f64,
}

impl TriangleParams {
    pub fn new(j: f64, gamma: f64, phi: f64) -> Result<Self> {
        if !(j.is_finite() && j > 0.0) {
            return Err(Error::InvalidParameter("J must be positive and finite"));
        }
        if !gamma.is_finite() || !phi.is_finite() {
            return Err(Error::InvalidParameter("gamma and phi must be finite"));
        }
        let mut phi = phi % TAU;
        if phi < 0.0 {
            phi += TAU;
        }
        if phi >= TAU {
            phi = 0.0;
        }
        Ok(TriangleParams { j, gamma, phi })
    }

    pub fn j(&self) -> f64 {
        self.j
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Flux reduced to `[0, 2π)`.
    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// On-site potential `V = -J e^{iγ}` of the middle site.
    pub fn potential(&self) -> Complex64 {
        -self.j * Complex64::cis(self.gamma)
    }

    /// `Im V <= 0`, i.e. the middle site absorbs.
    pub fn is_lossy(&self) -> bool {
        self.gamma.sin() >= 0.0
    }

    pub fn with_phi(&self, phi: f64) -> Result<Self> {
        Self::new(self.j, self.gamma, phi)
    }

    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        Self::new(self.j, gamma, self.phi)
    }
}

/// A finite scattering center: `hopping[(i, j)]` multiplies `a_i† a_j`,
/// on-site energies live on the diagonal of the Hamiltonian only.
#[derive(Debug, Clone, PartialEq)]
pub struct CenterGraph {
    hopping: CMatrix,
    onsite: Vec<Complex64>,
    port_left: usize,
    port_right: usize,
    lead_hopping: f64,
}

impl CenterGraph {
    pub fn new(
        hopping: CMatrix,
        onsite: Vec<Complex64>,
        port_left: usize,
        port_right: usize,
        lead_hopping: f64,
    ) -> Result<Self> {
        let n = onsite.len();
        if n == 0 {
            return Err(Error::InvalidCenter("center needs at least one site"));
        }
        if hopping.rows() != n || hopping.cols() != n {
            return Err(Error::InvalidCenter("hopping must be n x n"));
        }
        if (0..n).any(|i| hopping[(i, i)] != Complex64::new(0.0, 0.0)) {
            return Err(Error::InvalidCenter("hopping diagonal must be zero"));
        }
        if port_left >= n || port_right >= n {
            return Err(Error::InvalidCenter("port index out of range"));
        }
        if !(lead_hopping.is_finite() && lead_hopping > 0.0) {
            return Err(Error::InvalidCenter("lead hopping must be positive"));
        }
        Ok(CenterGraph {
            hopping,
            onsite,
            port_left,
            port_right,
            lead_hopping,
        })
    }

    /// Random dense non-Hermitian center with `n` sites and distinct ports
    /// (for `n >= 2`). Entries are uniform in `[-1, 1] + i[-1, 1]`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize, lead_hopping: f64) -> Self {
        assert!(n >= 1);
        let draw = |rng: &mut R| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let mut hopping = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    hopping[(i, j)] = draw(rng);
                }
            }
        }
        let onsite = (0..n).map(|_| draw(rng)).collect();
        let port_left = rng.gen_range(0..n);
        let port_right = if n == 1 {
            0
        } else {
            (port_left + rng.gen_range(1..n)) % n
        };
        CenterGraph::new(hopping, onsite, port_left, port_right, lead_hopping)
            .expect("random center is structurally valid")
    }

    pub fn len(&self) -> usize {
        self.onsite.len()
    }

    pub fn is_empty(&self) -> bool {
        self.onsite.is_empty()
    }

    pub fn hopping(&self) -> &CMatrix {
        &self.hopping
    }

    pub fn onsite(&self) -> &[Complex64] {
        &self.onsite
    }

    pub fn port_left(&self) -> usize {
        self.port_left
    }

    pub fn port_right(&self) -> usize {
        self.port_right
    }

    pub fn ports_coincide(&self) -> bool {
        self.port_left == self.port_right
    }

    pub fn lead_hopping(&self) -> f64 {
        self.lead_hopping
    }

    /// Center Hamiltonian: hopping plus on-site terms on the diagonal.
    pub fn hamiltonian(&self) -> CMatrix {
        let mut h = self.hopping.clone();
        for (i, v) in self.onsite.iter().enumerate() {
            h[(i, i)] = *v;
        }
        h
    }

    /// Paper coordinate of the left port (`-1`, or `0` for a shared port).
    pub fn left_port_coordinate(&self) -> i64 {
        if self.ports_coincide() {
            0
        } else {
            -1
        }
    }

    pub fn right_port_coordinate(&self) -> i64 {
        -self.left_port_coordinate()
    }

    /// Max element of `|H - H†|` over the center block.
    pub fn hermiticity_defect(&self) -> f64 {
        let h = self.hamiltonian();
        h.max_abs_diff(&h.conj_transpose())
    }

    /// Flux reversal: hopping phases conjugated, on-site terms untouched.
    /// On the triangle this maps `H(φ)` to `H(-φ)`.
    pub fn flux_flipped(&self) -> CenterGraph {
        CenterGraph {
            hopping: self.hopping.conj(),
            ..self.clone()
        }
    }
}

/// The three-site ring: sites `(-1, 0, 1)` at indices `(0, 1, 2)`, bonds
/// `-J e^{iφ/3}` on `0←-1`, `1←0`, `-1←1`, their conjugates on the reverse
/// bonds, `V = -J e^{iγ}` on site 0, leads on sites `-1` and `1`.
pub fn build_triangle_center(p: &TriangleParams) -> CenterGraph {
    triangle_with_bond_phase(p.j(), p.gamma(), p.phi() / 3.0)
}

/// Triangle built from an unreduced flux, so that `φ` and `-φ` give exactly
/// conjugate bond phases.
pub fn build_triangle_center_raw(j: f64, gamma: f64, phi: f64) -> CenterGraph {
    triangle_with_bond_phase(j, gamma, phi / 3.0)
}

fn triangle_with_bond_phase(j: f64, gamma: f64, bond_phase: f64) -> CenterGraph {
    let bond = -j * Complex64::cis(bond_phase);
    let mut hopping = CMatrix::zeros(3, 3);
    for (to, from) in [(1, 0), (2, 1), (0, 2)] {
        hopping[(to, from)] = bond;
        hopping[(from, to)] = bond.conj();
    }
    let zero = Complex64::new(0.0, 0.0);
    let onsite = alloc::vec![zero, -j * Complex64::cis(gamma), zero];
    CenterGraph::new(hopping, onsite, 0, 2, j).expect("triangle is structurally valid")
}

/// Center of the adjoint Hamiltonian `H†`.
pub fn dagger_center(c: &CenterGraph) -> CenterGraph {
    CenterGraph {
        hopping: c.hopping.conj_transpose(),
        onsite: c.onsite.iter().map(|v| v.conj()).collect(),
        ..c.clone()
    }
}

/// Two sites joined by a real bond `−J`, on-site `+i·gain` and `−i·gain`,
/// ports on sites 0 and 1. Parity-time symmetric, neither P nor T.
pub fn build_pt_dimer(j: f64, gain: f64) -> CenterGraph {
    let mut h = CMatrix::zeros(2, 2);
    h[(0, 1)] = Complex64::new(-j, 0.0);
    h[(1, 0)] = Complex64::new(-j, 0.0);
    CenterGraph::new(
        h,
        alloc::vec![Complex64::new(0.0, gain), Complex64::new(0.0, -gain)],
        0,
        1,
        j,
    )
    .expect("dimer is structurally valid")
}

/// Which part of the chain a matrix row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    LeftLead,
    Center,
    RightLead,
}

/// A center with leads truncated to `n_left` and `n_right` sites and hard
/// walls at both outer ends. Rows are ordered left to right: outermost left
/// lead site first, then the center block, then the right lead.
#[derive(Debug, Clone)]
pub struct FiniteChain {
    n_left: usize,
    n_right: usize,
    center: CenterGraph,
    matrix: CMatrix,
}

impl FiniteChain {
    pub fn n_left(&self) -> usize {
        self.n_left
    }

    pub fn n_right(&self) -> usize {
        self.n_right
    }

    pub fn center(&self) -> &CenterGraph {
        &self.center
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn center_rows(&self) -> core::ops::Range<usize> {
        self.n_left..self.n_left + self.center.len()
    }

    pub fn region(&self, row: usize) -> Region {
        if row < self.n_left {
            Region::LeftLead
        } else if row < self.n_left + self.center.len() {
            Region::Center
        } else {
            Region::RightLead
        }
    }

    /// Paper coordinate of a row. Interior (non-port) center sites have one
    /// only when the center has a single interior site between distinct
    /// ports (the triangle), which then sits at `j = 0`.
    pub fn coordinate(&self, row: usize) -> Option<i64> {
        let c = &self.center;
        let left_edge = c.left_port_coordinate() - 1;
        let right_edge = c.right_port_coordinate() + 1;
        match self.region(row) {
            Region::LeftLead => Some(left_edge - (self.n_left - 1 - row) as i64),
            Region::RightLead => Some(right_edge + (row - self.n_left - c.len()) as i64),
            Region::Center => {
                let site = row - self.n_left;
                if site == c.port_left() {
                    Some(c.left_port_coordinate())
                } else if site == c.port_right() {
                    Some(c.right_port_coordinate())
                } else if c.len() == 3 && !c.ports_coincide() {
                    Some(0)
                } else {
                    None
                }
            }
        }
    }

    /// Row holding paper coordinate `j`, if that site exists on this chain.
    pub fn row_of(&self, j: i64) -> Option<usize> {
        let c = &self.center;
        let left_edge = c.left_port_coordinate() - 1;
        let right_edge = c.right_port_coordinate() + 1;
        if j <= left_edge {
            let depth = (left_edge - j) as usize;
            (depth < self.n_left).then(|| self.n_left - 1 - depth)
        } else if j >= right_edge {
            let depth = (j - right_edge) as usize;
            (depth < self.n_right).then(|| self.n_left + c.len() + depth)
        } else if j == c.left_port_coordinate() {
            Some(self.n_left + c.port_left())
        } else if j == c.right_port_coordinate() {
            Some(self.n_left + c.port_right())
        } else if c.len() == 3 && !c.ports_coincide() {
            (0..3)
                .find(|&s| s != c.port_left() && s != c.port_right())
                .map(|s| self.n_left + s)
        } else {
            None
        }
    }
}

/// Truncated chain with the default dimension cap.
pub fn build_finite_chain(c: &CenterGraph, n_left: usize, n_right: usize) -> Result<FiniteChain> {
    build_finite_chain_capped(c, n_left, n_right, DEFAULT_DIMENSION_CAP)
}

pub fn build_finite_chain_capped(c: &CenterGraph, n_left: usize, n_right: usize, cap: usize) -> Result<FiniteChain> {
    let n = c.len();
    let dim = n_left + n + n_right;
    if dim > cap {
        return Err(Error::DimensionCap { dim, cap });
    }
    let lead = Complex64::new(-c.lead_hopping(), 0.0);
    let mut h = CMatrix::zeros(dim, dim);
    for i in 1..n_left {
        h[(i - 1, i)] = lead;
        h[(i, i - 1)] = lead;
    }
    let hc = c.hamiltonian();
    for i in 0..n {
        for j in 0..n {
            h[(n_left + i, n_left + j)] = hc[(i, j)];
        }
    }
    if n_left > 0 {
        let port = n_left + c.port_left();
        h[(n_left - 1, port)] = lead;
        h[(port, n_left - 1)] = lead;
    }
    let first_right = n_left + n;
    if n_right > 0 {
        let port = n_left + c.port_right();
        h[(first_right, port)] = lead;
        h[(port, first_right)] = lead;
    }
    for i in first_right + 1..dim {
        h[(i - 1, i)] = lead;
        h[(i, i - 1)] = lead;
    }
    Ok(FiniteChain {
        n_left,
        n_right,
        center: c.clone(),
        matrix: h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const FRAC_2PI_3: f64 = 2.0 * PI / 3.0;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn dispersion_values() {
        assert!(dispersion(PI / 2.0, 1.0).abs() < 1e-15);
        assert!((dispersion(FRAC_2PI_3, 1.0) - 1.0).abs() < 1e-15);
        assert_eq!(group_velocity(PI / 2.0, 1.0), 2.0);
        assert_eq!(group_velocity(-PI / 2.0, 1.0), -2.0);
        // zero-flux singularity momentum: inward flow from both sides
        assert!(group_velocity(-1.779, 1.0) < 0.0);
        assert!(group_velocity(1.779, 1.0) > 0.0);
    }

    #[test]
    fn phi_is_reduced() {
        let p = TriangleParams::new(1.0, 0.3, -PI / 3.0).unwrap();
        assert!((p.phi() - 5.0 * PI / 3.0).abs() < 1e-15);
        let q = TriangleParams::new(1.0, 0.3, 7.0 * PI).unwrap();
        assert!((q.phi() - PI).abs() < 1e-12);
        assert!(TriangleParams::new(0.0, 0.3, 0.0).is_err());
        assert!(TriangleParams::new(1.0, f64::NAN, 0.0).is_err());
        assert!(TriangleParams::new(1.0, 0.5, 1.0).unwrap().is_lossy());
        assert!(!TriangleParams::new(1.0, -0.5, 1.0).unwrap().is_lossy());
    }

    #[test]
    fn triangle_at_diode_parameters() {
        let p = TriangleParams::new(1.0, FRAC_2PI_3, PI / 3.0).unwrap();
        let c = build_triangle_center(&p);
        let bond = -Complex64::cis(PI / 9.0);
        assert!(close(c.hopping()[(1, 0)], bond, 1e-15));
        assert!(close(c.hopping()[(2, 1)], bond, 1e-15));
        assert!(close(c.hopping()[(0, 2)], bond, 1e-15));
        assert!(close(c.hopping()[(0, 1)], bond.conj(), 1e-15));
        assert!(close(c.onsite()[1], -Complex64::cis(FRAC_2PI_3), 1e-15));
        assert_eq!((c.port_left(), c.port_right()), (0, 2));
        assert_eq!(c.lead_hopping(), 1.0);
    }

    #[test]
    fn triangle_hermitian_limit() {
        let c = build_triangle_center(&TriangleParams::new(1.0, 0.0, 0.0).unwrap());
        let h = c.hamiltonian();
        assert_eq!(c.hermiticity_defect(), 0.0);
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!(close(h[(i, j)], Complex64::new(-1.0, 0.0), 0.0));
                }
            }
        }
        assert!(close(h[(1, 1)], Complex64::new(-1.0, 0.0), 0.0));
    }

    #[test]
    fn dagger_flips_potential_and_is_involution() {
        let gamma = 1.1;
        let c = build_triangle_center(&TriangleParams::new(1.0, gamma, 0.7).unwrap());
        let d = dagger_center(&c);
        assert!(close(d.onsite()[1], -Complex64::cis(-gamma), 1e-15));
        // the hopping set is Hermitian already, so it is unchanged
        assert!(d.hopping().max_abs_diff(c.hopping()) < 1e-15);
        assert_eq!(dagger_center(&d), c);
        let herm = build_triangle_center(&TriangleParams::new(1.0, 0.0, 0.4).unwrap());
        assert_eq!(dagger_center(&herm), herm);
    }

    #[test]
    fn finite_chain_shapes() {
        let c = build_triangle_center(&TriangleParams::new(1.0, FRAC_2PI_3, PI / 3.0).unwrap());
        let bare = build_finite_chain(&c, 0, 0).unwrap();
        assert_eq!(bare.matrix(), &c.hamiltonian());

        let herm = build_triangle_center(&TriangleParams::new(1.0, 0.0, 0.0).unwrap());
        let chain = build_finite_chain(&herm, 100, 100).unwrap();
        assert_eq!(chain.dim(), 203);
        assert_eq!(chain.matrix().max_abs_diff(&chain.matrix().conj_transpose()), 0.0);

        let chain = build_finite_chain(&c, 200, 200).unwrap();
        let non_real: alloc::vec::Vec<_> = (0..chain.dim())
            .map(|i| chain.matrix()[(i, i)])
            .filter(|z| z.im != 0.0)
            .collect();
        assert_eq!(non_real.len(), 1);
        assert!(close(non_real[0], -Complex64::cis(FRAC_2PI_3), 1e-15));
        assert_eq!(chain.row_of(0), Some(201));
        assert_eq!(chain.row_of(-2), Some(199));
        assert_eq!(chain.row_of(2), Some(203));
        assert_eq!(chain.row_of(-201), Some(0));
        assert_eq!(chain.row_of(-202), None);
        for row in 0..chain.dim() {
            assert_eq!(chain.row_of(chain.coordinate(row).unwrap()), Some(row));
        }
        // lead-port coupling
        assert_eq!(chain.matrix()[(199, 200)], Complex64::new(-1.0, 0.0));
        assert_eq!(chain.matrix()[(202, 203)], Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn dimension_cap_rejects() {
        let c = build_triangle_center(&TriangleParams::new(1.0, 0.0, 0.0).unwrap());
        assert_eq!(
            build_finite_chain(&c, 3000, 3000).unwrap_err(),
            Error::DimensionCap { dim: 6003, cap: 5000 }
        );
        assert!(build_finite_chain_capped(&c, 3000, 3000, 7000).is_ok());
    }

    #[test]
    fn coincident_port_coordinates() {
        let c = CenterGraph::new(CMatrix::zeros(1, 1), alloc::vec![Complex64::new(-1.0, 0.0)], 0, 0, 1.0).unwrap();
        let chain = build_finite_chain(&c, 5, 4).unwrap();
        assert_eq!(chain.coordinate(5), Some(0));
        assert_eq!(chain.coordinate(4), Some(-1));
        assert_eq!(chain.coordinate(6), Some(1));
        assert_eq!(chain.row_of(-5), Some(0));
        assert_eq!(chain.row_of(4), Some(9));
    }

    #[test]
    fn invalid_centers() {
        let mut h = CMatrix::zeros(2, 2);
        h[(0, 0)] = Complex64::new(1.0, 0.0);
        let on = alloc::vec![Complex64::new(0.0, 0.0); 2];
        assert!(CenterGraph::new(h, on.clone(), 0, 1, 1.0).is_err());
        assert!(CenterGraph::new(CMatrix::zeros(2, 2), on.clone(), 0, 2, 1.0).is_err());
        assert!(CenterGraph::new(CMatrix::zeros(2, 2), on, 0, 1, 0.0).is_err());
    }
}
