use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A model or configuration value is out of its domain.
    InvalidParameter(&'static str),
    /// A center graph violates one of its structural invariants.
    InvalidCenter(&'static str),
    /// The closed-form denominator vanished: no scattering state exists here.
    SingularDenominator { k: f64, omega_abs: f64 },
    /// The matching system is numerically rank deficient.
    SingularSystem { condition: f64 },
    /// The momentum does not describe a propagating lead wave.
    NotPropagating { k: f64 },
    /// Truncated chain exceeds the configured dimension cap.
    DimensionCap { dim: usize, cap: usize },
    /// No port-exchanging mirror permutation is known for this center.
    NoMirror,
    /// A supplied mirror map is not a port-exchanging involution.
    InvalidMirror,
    /// |tR| too small for the transfer matrix to exist.
    ZeroTransmission { t_abs: f64 },
    /// The requested point is not a spectral singularity.
    NotSingular { omega_abs: f64 },
    /// The packet does not fit on the chain with the required clearance.
    PacketTooWide,
    /// Probability reached the hard-wall ends of the truncated chain.
    BoundaryContact { edge_norm: f64 },
    /// The propagator failed its step-halving check or did not converge.
    Integrator(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::InvalidCenter(what) => write!(f, "invalid center: {what}"),
            Error::SingularDenominator { k, omega_abs } => write!(
                f,
                "singular denominator at k = {k}: |Omega| = {omega_abs:e} (no scattering state)"
            ),
            Error::SingularSystem { condition } => {
                write!(f, "matching system is singular (condition estimate {condition:e})")
            }
            Error::NotPropagating { k } => write!(f, "k = {k} is not a propagating momentum"),
            Error::DimensionCap { dim, cap } => {
                write!(f, "chain dimension {dim} exceeds the cap {cap}")
            }
            Error::NoMirror => write!(f, "no mirror permutation available; supply one"),
            Error::InvalidMirror => write!(f, "mirror map must be a permutation exchanging the ports"),
            Error::ZeroTransmission { t_abs } => {
                write!(f, "transfer matrix undefined: |tR| = {t_abs:e}")
            }
            Error::NotSingular { omega_abs } => {
                write!(f, "not a spectral singularity: |Omega| = {omega_abs:e}")
            }
            Error::PacketTooWide => write!(f, "packet violates the 4 sigma clearance"),
            Error::BoundaryContact { edge_norm } => {
                write!(f, "wave packet reached the chain ends (outer-site norm {edge_norm:e})")
            }
            Error::Integrator(what) => write!(f, "propagator failure: {what}"),
        }
    }
}

impl core::error::Error for Error {}
