//! Closed-form scattering amplitudes of the flux-threaded triangle.
//!
//! With `Ω(k, φ, γ) = e^{ik}[i sin k (2cos k − e^{iγ}) + e^{ik} cos φ + 1]`:
//!
//! ```text
//! r_L = r_R = −(cos φ + cos k) / Ω
//! t_L       = i e^{−iφ/3} sin k (e^{iφ} + 2cos k − e^{iγ}) / Ω
//! t_R       = t_L(φ → −φ)
//! ```
//!
//! The amplitudes of `H†` follow from `γ → −γ`. The perfect diode sits at
//! `k = γ, φ = π − γ`, where `r_L = r_R = t_L = 0` and
//! `t_R = e^{iπ/3} e^{−i4γ/3}`; the same point is a spectral singularity of
//! `H†`.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::lattice::TriangleParams;

/// `|Ω|` at or below this reports [`Error::SingularDenominator`].
pub const SINGULAR_THRESHOLD: f64 = 1e-12;

/// `|t̄_L|` above this (and growing) marks a divergent approach path.
pub const DIVERGENCE_THRESHOLD: f64 = 1e3;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Reflection and transmission amplitudes at one momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringAmplitudes {
    pub k: f64,
    pub r_left: Complex64,
    pub r_right: Complex64,
    pub t_left: Complex64,
    pub t_right: Complex64,
}

impl ScatteringAmplitudes {
    /// Largest distance between corresponding amplitudes.
    pub fn max_deviation(&self, other: &ScatteringAmplitudes) -> f64 {
        [
            self.r_left - other.r_left,
            self.r_right - other.r_right,
            self.t_left - other.t_left,
            self.t_right - other.t_right,
        ]
        .iter()
        .map(|d| d.norm())
        .fold(0.0, f64::max)
    }

    /// `|t_R|² − |t_L|²`.
    pub fn diode_contrast(&self) -> f64 {
        self.t_right.norm_sqr() - self.t_left.norm_sqr()
    }
}

pub fn omega(k: f64, phi: f64, gamma: f64) -> Complex64 {
    let eik = Complex64::cis(k);
    eik * (I * k.sin() * (2.0 * k.cos() - Complex64::cis(gamma)) + eik * phi.cos() + 1.0)
}

/// Partial derivatives `(∂Ω/∂k, ∂Ω/∂φ, ∂Ω/∂γ)`.
pub fn omega_partials(k: f64, phi: f64, gamma: f64) -> (Complex64, Complex64, Complex64) {
    let eik = Complex64::cis(k);
    let eig = Complex64::cis(gamma);
    let (s, c) = (k.sin(), k.cos());
    let bracket = I * s * (2.0 * c - eig) + eik * phi.cos() + 1.0;
    let bracket_dk = I * c * (2.0 * c - eig) - I * 2.0 * s * s + I * eik * phi.cos();
    let d_k = I * eik * bracket + eik * bracket_dk;
    let d_phi = -eik * eik * phi.sin();
    let d_gamma = eik * s * eig;
    (d_k, d_phi, d_gamma)
}

fn t_left_numerator(k: f64, phi: f64, gamma: f64) -> Complex64 {
    I * Complex64::cis(-phi / 3.0) * k.sin() * (Complex64::cis(phi) + 2.0 * k.cos() - Complex64::cis(gamma))
}

fn reflection_numerator(k: f64, phi: f64) -> Complex64 {
    Complex64::new(-(phi.cos() + k.cos()), 0.0)
}

/// Closed form at an unreduced flux `phi`, so `t_L(φ) = t_R(−φ)` holds
/// exactly as evaluated. Valid for any real `k`; the Bethe-ansatz state
/// only carries current for `0 < |k| < π`.
pub fn bethe_amplitudes(k: f64, phi: f64, gamma: f64) -> Result<ScatteringAmplitudes> {
    let om = omega(k, phi, gamma);
    let omega_abs = om.norm();
    if !(omega_abs > SINGULAR_THRESHOLD) {
        return Err(Error::SingularDenominator { k, omega_abs });
    }
    let r = reflection_numerator(k, phi) / om;
    Ok(ScatteringAmplitudes {
        k,
        r_left: r,
        r_right: r,
        t_left: t_left_numerator(k, phi, gamma) / om,
        t_right: t_left_numerator(k, -phi, gamma) / om,
    })
}

/// Amplitudes of `H` for the triangle.
pub fn closed_form_amplitudes(k: f64, p: &TriangleParams) -> Result<ScatteringAmplitudes> {
    bethe_amplitudes(k, p.phi(), p.gamma())
}

/// Amplitudes of `H†` (the barred amplitudes): the closed form at `−γ`.
pub fn conjugate_amplitudes(k: f64, p: &TriangleParams) -> Result<ScatteringAmplitudes> {
    bethe_amplitudes(k, p.phi(), -p.gamma())
}

/// The perfect-diode operating point for a given potential phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiodePoint {
    pub kc: f64,
    pub phic: f64,
    pub t_right_target: Complex64,
}

pub fn diode_point(gamma: f64) -> Result<DiodePoint> {
    if !(gamma > 0.0 && gamma < PI) {
        return Err(Error::InvalidParameter("diode point needs gamma in (0, pi)"));
    }
    Ok(DiodePoint {
        kc: gamma,
        phic: PI - gamma,
        t_right_target: Complex64::cis(PI / 3.0) * Complex64::cis(-4.0 * gamma / 3.0),
    })
}

/// The four ways of approaching `(k, φ) = (γ, π − γ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitPath {
    /// `φ = π − k`, `k → γ⁺`.
    MomentumFromAbove,
    /// `φ = π − k`, `k → γ⁻`.
    MomentumFromBelow,
    /// `k = γ`, `φ → (π − γ)⁺`.
    FluxFromAbove,
    /// `k = γ`, `φ → (π − γ)⁻`.
    FluxFromBelow,
}

impl LimitPath {
    pub const ALL: [LimitPath; 4] = [
        LimitPath::MomentumFromAbove,
        LimitPath::MomentumFromBelow,
        LimitPath::FluxFromAbove,
        LimitPath::FluxFromBelow,
    ];

    fn sign(self) -> f64 {
        match self {
            LimitPath::MomentumFromAbove | LimitPath::FluxFromAbove => 1.0,
            LimitPath::MomentumFromBelow | LimitPath::FluxFromBelow => -1.0,
        }
    }

    /// `(k, φ)` at a given offset from the singular point.
    pub fn point(self, gamma: f64, offset: f64) -> (f64, f64) {
        let d = self.sign() * offset;
        match self {
            LimitPath::MomentumFromAbove | LimitPath::MomentumFromBelow => {
                let k = gamma + d;
                (k, PI - k)
            }
            LimitPath::FluxFromAbove | LimitPath::FluxFromBelow => (gamma, PI - gamma + d),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitSample {
    pub offset: f64,
    /// The approach parameter (`k` or `φ`).
    pub parameter: f64,
    pub amplitudes: ScatteringAmplitudes,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitProbeReport {
    pub path: LimitPath,
    pub gamma: f64,
    pub samples: Vec<LimitSample>,
    /// `|t̄_L|` exceeded [`DIVERGENCE_THRESHOLD`] and kept growing.
    pub divergence: bool,
    /// Signs of `Re t̄_L` and `Im t̄_L` at the closest sample.
    pub real_sign: f64,
    pub imag_sign: f64,
}

impl LimitProbeReport {
    pub fn closest(&self) -> &LimitSample {
        self.samples.last().expect("probe has samples")
    }

    pub fn sample_at(&self, offset: f64) -> Option<&LimitSample> {
        self.samples.iter().find(|s| (s.offset / offset - 1.0).abs() < 1e-9)
    }
}

/// Evaluates the `H†` amplitudes along a geometric approach `10⁻¹ … 10⁻ⁿ`
/// to the singular point; the endpoint itself is never evaluated.
pub fn limit_path_probe(gamma: f64, path: LimitPath, steps: usize) -> Result<LimitProbeReport> {
    if steps < 3 {
        return Err(Error::InvalidParameter("limit probe needs at least 3 steps"));
    }
    if !(gamma > 0.0 && gamma < PI) {
        return Err(Error::InvalidParameter("limit probe needs gamma in (0, pi)"));
    }
    let mut samples = Vec::with_capacity(steps);
    let mut offset = 1.0;
    for _ in 0..steps {
        offset *= 0.1;
        let (k, phi) = path.point(gamma, offset);
        let amplitudes = bethe_amplitudes(k, phi, -gamma)?;
        let parameter = match path {
            LimitPath::MomentumFromAbove | LimitPath::MomentumFromBelow => k,
            _ => phi,
        };
        samples.push(LimitSample {
            offset,
            parameter,
            amplitudes,
        });
    }
    let first = samples[0].amplitudes.t_left.norm();
    let last = samples[steps - 1].amplitudes.t_left;
    Ok(LimitProbeReport {
        path,
        gamma,
        divergence: last.norm() > DIVERGENCE_THRESHOLD && last.norm() > 100.0 * first,
        real_sign: last.re.signum(),
        imag_sign: last.im.signum(),
        samples,
    })
}

/// Which amplitude diverges at a pole of `Ω`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Amplitude {
    Reflection,
    TransmissionLeft,
    TransmissionRight,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxDivergence {
    pub amplitude: Amplitude,
    /// Refined pole location in `[0, 2π)`.
    pub phi: f64,
    /// Index `i` of the grid cell `[φ_i, φ_{i+1}]` containing the pole.
    pub cell: usize,
    pub omega_abs: f64,
}

/// Poles of the `(k, φ, γ)` closed form along `φ` at fixed `k` and `γ`.
///
/// `grid` is an increasing list of flux values. Local minima of `|Ω|` on the
/// grid are refined; a refined zero of `Ω` is reported for every amplitude
/// whose numerator does not vanish there (removable points are dropped).
/// Pass `−γ` to scan the `H†` amplitudes.
pub fn flux_divergences(k: f64, gamma: f64, grid: &[f64]) -> Vec<FluxDivergence> {
    let mut out = Vec::new();
    if grid.len() < 2 {
        return out;
    }
    let mag = |phi: f64| omega(k, phi, gamma).norm();
    let vals: Vec<f64> = grid.iter().map(|&p| mag(p)).collect();
    let n = grid.len();
    let mut roots: Vec<f64> = Vec::new();
    for i in 0..n {
        let left_ok = i == 0 || vals[i] <= vals[i - 1];
        let right_ok = i + 1 == n || vals[i] <= vals[i + 1];
        if !(left_ok && right_ok) {
            continue;
        }
        let lo = grid[i.saturating_sub(1)];
        let hi = grid[(i + 1).min(n - 1)];
        let phi = refine_flux_minimum(k, gamma, lo, hi);
        let om = mag(phi);
        let scale = omega_partials(k, phi, gamma).1.norm().max(1.0);
        if om <= 1e-10 * scale && !roots.iter().any(|r| (r - phi).abs() < 1e-9) {
            roots.push(phi);
        }
    }
    for phi in roots {
        let Some(cell) = (0..n - 1).find(|&i| grid[i] <= phi && phi <= grid[i + 1]) else {
            continue;
        };
        let omega_abs = mag(phi);
        let numerators = [
            (Amplitude::Reflection, reflection_numerator(k, phi)),
            (Amplitude::TransmissionLeft, t_left_numerator(k, phi, gamma)),
            (Amplitude::TransmissionRight, t_left_numerator(k, -phi, gamma)),
        ];
        for (amplitude, num) in numerators {
            if num.norm() > 1e-6 {
                out.push(FluxDivergence {
                    amplitude,
                    phi: if phi < 0.0 { phi + TAU } else { phi % TAU },
                    cell,
                    omega_abs,
                });
            }
        }
    }
    out
}

/// Minimizes `|Ω(φ)|²` on `[lo, hi]`: golden section, then Newton on the
/// stationarity condition `Re(Ω* ∂Ω/∂φ) = 0`.
fn refine_flux_minimum(k: f64, gamma: f64, lo: f64, hi: f64) -> f64 {
    let f = |phi: f64| omega(k, phi, gamma).norm_sqr();
    let inv_phi = (5.0.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    for _ in 0..80 {
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - inv_phi * (b - a);
        d = a + inv_phi * (b - a);
    }
    let mut phi = 0.5 * (a + b);
    let e2ik = Complex64::cis(2.0 * k);
    for _ in 0..20 {
        let om = omega(k, phi, gamma);
        let d1 = -e2ik * phi.sin();
        let d2 = -e2ik * phi.cos();
        let g = (om.conj() * d1).re;
        let dg = d1.norm_sqr() + (om.conj() * d2).re;
        if dg <= 0.0 {
            break;
        }
        let next = phi - g / dg;
        if !(next >= lo && next <= hi) {
            break;
        }
        if (next - phi).abs() < 1e-16 {
            phi = next;
            break;
        }
        phi = next;
    }
    phi
}

#[cfg(test)]
mod tests {
    use super::*;

    const G23: f64 = 2.0 * PI / 3.0;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn omega_examples() {
        // Ω(γ, π−γ, γ) = 2 e^{iγ} sin²γ
        let om = omega(G23, PI / 3.0, G23);
        assert!(close(om, Complex64::new(-0.75, 1.299038105676658), 1e-14));
        assert!(close(om, 1.5 * Complex64::cis(G23), 1e-14));
        for phi in [0.0, 0.4, 2.0, 5.5] {
            for gamma in [0.0, 1.0, -2.0] {
                assert!(close(
                    omega(PI, phi, gamma),
                    Complex64::new(phi.cos() - 1.0, 0.0),
                    1e-14
                ));
            }
        }
        for gamma in [0.3, 1.2, 2.9] {
            let expect = 2.0 * Complex64::cis(gamma) * gamma.sin().powi(2);
            assert!(close(omega(gamma, PI - gamma, gamma), expect, 1e-14));
        }
    }

    #[test]
    fn omega_partials_match_finite_differences() {
        let (k, phi, gamma) = (1.1, 0.7, 2.3);
        let h = 1e-6;
        let (dk, dphi, dgamma) = omega_partials(k, phi, gamma);
        let fd_k = (omega(k + h, phi, gamma) - omega(k - h, phi, gamma)) / (2.0 * h);
        let fd_phi = (omega(k, phi + h, gamma) - omega(k, phi - h, gamma)) / (2.0 * h);
        let fd_gamma = (omega(k, phi, gamma + h) - omega(k, phi, gamma - h)) / (2.0 * h);
        assert!(close(dk, fd_k, 1e-8));
        assert!(close(dphi, fd_phi, 1e-8));
        assert!(close(dgamma, fd_gamma, 1e-8));
    }

    #[test]
    fn diode_amplitudes() {
        let p = TriangleParams::new(1.0, G23, PI / 3.0).unwrap();
        let a = closed_form_amplitudes(G23, &p).unwrap();
        assert!(a.r_left.norm() < 1e-15 && a.r_right.norm() < 1e-15);
        assert!(a.t_left.norm() < 1e-15);
        assert!(close(a.t_right, Complex64::cis(-5.0 * PI / 9.0), 1e-15));
        assert_eq!(a.r_left, a.r_right);
    }

    #[test]
    fn reflectionless_when_k_is_pi_minus_phi() {
        for phi in [0.2, 1.0, 2.5] {
            for gamma in [0.3, 1.7, -0.4] {
                let a = bethe_amplitudes(PI - phi, phi, gamma).unwrap();
                assert!(a.r_left.norm() < 1e-14);
            }
        }
    }

    #[test]
    fn diode_point_values() {
        let d = diode_point(G23).unwrap();
        assert!((d.kc - G23).abs() < 1e-15 && (d.phic - PI / 3.0).abs() < 1e-15);
        assert!(close(d.t_right_target, Complex64::cis(-5.0 * PI / 9.0), 1e-15));
        let d = diode_point(PI / 6.0).unwrap();
        assert!((d.phic - 5.0 * PI / 6.0).abs() < 1e-15);
        let d = diode_point(PI / 2.0).unwrap();
        assert!(close(d.t_right_target, Complex64::cis(-PI / 3.0), 1e-15));
        let p = TriangleParams::new(1.0, PI / 2.0, d.phic).unwrap();
        let a = closed_form_amplitudes(d.kc, &p).unwrap();
        assert!(close(a.t_right, d.t_right_target, 1e-12));
        assert!(a.t_left.norm() < 1e-12 && a.r_left.norm() < 1e-12);
        assert!(diode_point(0.0).is_err() && diode_point(PI).is_err());
    }

    #[test]
    fn conjugate_is_singular_at_diode_point() {
        let gamma = PI / 6.0;
        let err = bethe_amplitudes(gamma, PI - gamma, -gamma).unwrap_err();
        assert!(matches!(err, Error::SingularDenominator { .. }));
        let p = TriangleParams::new(1.0, 0.0, 1.3).unwrap();
        for k in [0.3, 1.4, 2.8] {
            assert_eq!(
                conjugate_amplitudes(k, &p).unwrap(),
                closed_form_amplitudes(k, &p).unwrap()
            );
        }
    }

    #[test]
    fn conjugate_near_singularity_along_path_one() {
        let gamma = PI / 6.0;
        let k = gamma + 1e-6;
        let a = bethe_amplitudes(k, PI - k, -gamma).unwrap();
        assert!(a.r_left.norm() < 1e-4 && a.r_right.norm() < 1e-4);
        assert!(a.t_left.norm() > 1e4);
    }

    #[test]
    fn limit_probe_momentum_paths() {
        let gamma = PI / 6.0;
        let target = Complex64::cis(PI / 3.0) * Complex64::cis(-2.0 * PI / 9.0);
        let up = limit_path_probe(gamma, LimitPath::MomentumFromAbove, 8).unwrap();
        let down = limit_path_probe(gamma, LimitPath::MomentumFromBelow, 8).unwrap();
        for rep in [&up, &down] {
            assert!(rep.divergence);
            assert_eq!(rep.samples.len(), 8);
            let s = rep.sample_at(1e-6).unwrap();
            assert!(s.amplitudes.r_left.norm() < 1e-8);
            assert!(close(s.amplitudes.t_right, target, 1e-4));
        }
        // t̄_L → ∓∞ ± i∞ on the ± paths
        assert_eq!((up.real_sign, up.imag_sign), (-1.0, 1.0));
        assert_eq!((down.real_sign, down.imag_sign), (1.0, -1.0));
        // samples strictly monotone in the approach parameter
        assert!(up.samples.windows(2).all(|w| w[1].parameter < w[0].parameter));
        assert!(down.samples.windows(2).all(|w| w[1].parameter > w[0].parameter));
    }

    #[test]
    fn limit_probe_half_pi() {
        for path in LimitPath::ALL {
            let rep = limit_path_probe(PI / 2.0, path, 8).unwrap();
            assert!(rep.closest().amplitudes.t_left.norm() > 1e6, "{path:?}");
            assert!(close(rep.closest().amplitudes.t_right, Complex64::cis(-PI / 3.0), 1e-6));
        }
        assert!(limit_path_probe(PI / 2.0, LimitPath::FluxFromAbove, 2).is_err());
    }

    #[test]
    fn flux_scan_poles() {
        let grid: Vec<f64> = (0..=720).map(|i| TAU * i as f64 / 720.0).collect();
        let gamma = PI / 6.0;
        let poles = flux_divergences(gamma, -gamma, &grid);
        let tl: Vec<_> = poles
            .iter()
            .filter(|d| d.amplitude == Amplitude::TransmissionLeft)
            .collect();
        let tr: Vec<_> = poles
            .iter()
            .filter(|d| d.amplitude == Amplitude::TransmissionRight)
            .collect();
        assert_eq!(tl.len(), 1);
        assert_eq!(tr.len(), 1);
        assert!((tl[0].phi - 5.0 * PI / 6.0).abs() < 1e-7);
        assert!((tr[0].phi - 7.0 * PI / 6.0).abs() < 1e-7);

        let g3 = PI / 3.0;
        let mut locs: Vec<f64> = flux_divergences(g3, -g3, &grid).iter().map(|d| d.phi).collect();
        locs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        locs.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        assert_eq!(locs.len(), 2);
        assert!((locs[0] - 2.0 * PI / 3.0).abs() < 1e-7 && (locs[1] - 4.0 * PI / 3.0).abs() < 1e-7);

        assert!(flux_divergences(PI / 6.0, 0.0, &grid).is_empty());
    }
}
