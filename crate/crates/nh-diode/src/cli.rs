//! Command-line surface. Every flag is optional; unset flags fall back to
//! the `--config` file, then to the subcommand defaults.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::angle::parse_angle;
use crate::config::*;

#[derive(Debug, Parser)]
#[command(
    name = "nh-diode",
    version,
    about = "Flux-controlled non-Hermitian scattering diode laboratory"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form amplitudes over a momentum grid.
    Amplitudes(AmplitudesArgs),
    /// Adjoint transmission amplitudes versus flux, with their poles.
    Fig3(Fig3Args),
    /// Zero-flux spectral singularities, or the transfer matrix at a diode point.
    SingularityScan(ScanArgs),
    /// Randomized and symmetry-specific amplitude identity audit.
    Audit(AuditArgs),
    /// Wave-packet runs through the diode or the absorber.
    Evolve(EvolveArgs),
}

#[derive(Debug, Args, Default)]
pub struct CommonArgs {
    /// JSON config file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Data file (stdout when absent).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// JSON summary file (stderr when absent).
    #[arg(long)]
    pub summary: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Worker threads (NH_DIODE_THREADS takes precedence).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Add a generation timestamp to output headers.
    #[arg(long)]
    pub stamp: bool,
}

impl CommonArgs {
    pub fn file(&self) -> anyhow::Result<FileConfig> {
        match &self.config {
            Some(p) => FileConfig::load(p),
            None => Ok(FileConfig::default()),
        }
    }

    pub fn resolve(&self, f: &FileConfig) -> anyhow::Result<OutputOptions> {
        let threads = self.threads.or(f.threads);
        if threads == Some(0) {
            return Err(usage("threads must be positive"));
        }
        Ok(OutputOptions {
            format: self.format.or(f.format).unwrap_or_default(),
            output: self.output.clone().or_else(|| f.output.clone()),
            summary: self.summary.clone().or_else(|| f.summary.clone()),
            stamp: self.stamp,
            threads: resolve_threads(threads)?,
        })
    }
}

fn pick_angle(flag: Option<f64>, file: Option<crate::angle::Angle>, default: f64) -> f64 {
    flag.or(file.map(|a| a.0)).unwrap_or(default)
}

fn positive(name: &str, x: f64) -> anyhow::Result<f64> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(usage(format!("{name} must be positive and finite")))
    }
}

fn finite(name: &str, x: f64) -> anyhow::Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(usage(format!("{name} must be finite")))
    }
}

#[derive(Debug, Args, Default)]
pub struct AmplitudesArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Lead and ring hopping J.
    #[arg(long)]
    pub j: Option<f64>,
    /// Phase of the on-site potential -J e^{i gamma}; accepts forms like 2pi/3.
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    /// Total flux through the ring.
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    /// Lower end of the momentum range.
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    pub k_min: Option<f64>,
    /// Upper end of the momentum range.
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    pub k_max: Option<f64>,
    /// Grid points, both ends included.
    #[arg(long)]
    pub k_steps: Option<usize>,
    /// Compare against the generic solver.
    #[arg(long)]
    pub check: bool,
    /// Mark rows at singular momenta instead of failing.
    #[arg(long)]
    pub allow_singular: bool,
}

impl AmplitudesArgs {
    pub fn resolve(&self, f: &FileConfig) -> anyhow::Result<AmplitudesConfig> {
        let d = AmplitudesConfig::default();
        let c = AmplitudesConfig {
            j: positive("j", self.j.or(f.j).unwrap_or(d.j))?,
            gamma: finite("gamma", pick_angle(self.gamma, f.gamma, d.gamma))?,
            phi: finite("phi", pick_angle(self.phi, f.phi, d.phi))?,
            k_min: pick_angle(self.k_min, f.k_min, d.k_min),
            k_max: pick_angle(self.k_max, f.k_max, d.k_max),
            k_steps: self.k_steps.or(f.k_steps).unwrap_or(d.k_steps),
            check: self.check || f.check.unwrap_or(false),
            allow_singular: self.allow_singular || f.allow_singular.unwrap_or(false),
        };
        if !(c.k_min.is_finite() && c.k_max.is_finite() && c.k_min <= c.k_max) {
            return Err(usage("k range must satisfy k_min <= k_max"));
        }
        if c.k_steps == 0 || (c.k_steps == 1 && c.k_min != c.k_max) {
            return Err(usage("k_steps must be at least 2 for a nonempty range"));
        }
        Ok(c)
    }
}

#[derive(Debug, Args, Default)]
pub struct Fig3Args {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Lead and ring hopping J.
    #[arg(long)]
    pub j: Option<f64>,
    /// Phase of the on-site potential -J e^{i gamma}; accepts forms like 2pi/3.
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    /// Fixed momentum.
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    pub k: Option<f64>,
    /// Flux intervals over (0, 2pi); rows sit at the interior nodes.
    #[arg(long)]
    pub phi_steps: Option<usize>,
    /// Mark rows on a pole instead of failing.
    #[arg(long)]
    pub allow_singular: bool,
}

impl Fig3Args {
    pub fn resolve(&self, f: &FileConfig) -> anyhow::Result<Fig3Config> {
        let d = Fig3Config::default();
        let c = Fig3Config {
            j: positive("j", self.j.or(f.j).unwrap_or(d.j))?,
            gamma: finite("gamma", pick_angle(self.gamma, f.gamma, d.gamma))?,
            k: finite("k", pick_angle(self.k, f.k, d.k))?,
            phi_steps: self.phi_steps.or(f.phi_steps).unwrap_or(d.phi_steps),
            allow_singular: self.allow_singular || f.allow_singular.unwrap_or(false),
        };
        if c.phi_steps < 3 {
            return Err(usage("phi_steps must be at least 3"));
        }
        Ok(c)
    }
}

#[derive(Debug, Args, Default)]
pub struct ScanArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Lower end of the potential-phase range.
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    pub gamma_min: Option<f64>,
    /// Upper end of the potential-phase range.
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    pub gamma_max: Option<f64>,
    /// Lower end of the momentum range.
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    pub k_min: Option<f64>,
    /// Upper end of the momentum range.
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    pub k_max: Option<f64>,
    /// Grid cells along the potential phase.
    #[arg(long)]
    pub gamma_steps: Option<usize>,
    /// Grid cells along the momentum.
    #[arg(long)]
    pub k_steps: Option<usize>,
    /// Print the transfer matrix at the diode point of --gamma.
    #[arg(long)]
    pub diode_check: bool,
    /// Phase of the on-site potential -J e^{i gamma}; accepts forms like 2pi/3.
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
}

impl ScanArgs {
    pub fn resolve(&self, f: &FileConfig) -> anyhow::Result<ScanConfig> {
        let d = ScanConfig::default();
        let c = ScanConfig {
            gamma_min: pick_angle(self.gamma_min, f.gamma_min, d.gamma_min),
            gamma_max: pick_angle(self.gamma_max, f.gamma_max, d.gamma_max),
            k_min: pick_angle(self.k_min, f.scan_k_min, d.k_min),
            k_max: pick_angle(self.k_max, f.scan_k_max, d.k_max),
            gamma_steps: self.gamma_steps.or(f.gamma_steps).unwrap_or(d.gamma_steps),
            k_steps: self.k_steps.or(f.scan_k_steps).unwrap_or(d.k_steps),
            diode_check: self.diode_check,
            gamma: finite("gamma", pick_angle(self.gamma, f.gamma, d.gamma))?,
        };
        let ok = |a: f64, b: f64| a.is_finite() && b.is_finite() && a <= b;
        if !ok(c.gamma_min, c.gamma_max) || !ok(c.k_min, c.k_max) {
            return Err(usage("scan ranges must be finite with min <= max"));
        }
        if c.gamma_steps == 0 || c.k_steps == 0 {
            return Err(usage("scan grids need at least one cell"));
        }
        Ok(c)
    }
}

#[derive(Debug, Args, Default)]
pub struct AuditArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum)]
    pub center: Option<CenterKind>,
    /// Seed for the random centers.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of random centers.
    #[arg(long)]
    pub centers: Option<usize>,
    /// Random centers have 1..=max sites.
    #[arg(long)]
    pub max_center_sites: Option<usize>,
    /// Momenta per center, evenly spaced in (0, pi). Default: 10 for
    /// random centers, 20 otherwise.
    #[arg(long)]
    pub k_points: Option<usize>,
    /// Largest tolerated applicable residual.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Lead and ring hopping J.
    #[arg(long)]
    pub j: Option<f64>,
    /// Phase of the on-site potential -J e^{i gamma}; accepts forms like 2pi/3.
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    /// Total flux through the ring.
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    pub phi: Option<f64>,
}

impl AuditArgs {
    pub fn resolve(&self, f: &FileConfig) -> anyhow::Result<AuditConfig> {
        let d = AuditConfig::default();
        let center = self.center.or(f.center).unwrap_or(d.center);
        let default_points = if center == CenterKind::Random { d.k_points } else { 20 };
        let c = AuditConfig {
            center,
            seed: self.seed.or(f.seed).unwrap_or(d.seed),
            centers: self.centers.or(f.centers).unwrap_or(d.centers),
            max_center_sites: self
                .max_center_sites
                .or(f.max_center_sites)
                .unwrap_or(d.max_center_sites),
            k_points: self.k_points.or(f.k_points).unwrap_or(default_points),
            threshold: positive("threshold", self.threshold.or(f.threshold).unwrap_or(d.threshold))?,
            j: positive("j", self.j.or(f.j).unwrap_or(d.j))?,
            gamma: finite("gamma", pick_angle(self.gamma, f.gamma, d.gamma))?,
            phi: finite("phi", pick_angle(self.phi, f.phi, d.phi))?,
        };
        if c.k_points == 0 || c.centers == 0 || c.max_center_sites == 0 {
            return Err(usage("k_points, centers and max_center_sites must be positive"));
        }
        Ok(c)
    }
}

#[derive(Debug, Args, Default)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Lead and ring hopping J.
    #[arg(long)]
    pub j: Option<f64>,
    /// Phase of the on-site potential -J e^{i gamma}; accepts forms like 2pi/3.
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    /// Total flux through the ring.
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    /// Carrier momentum in (0, pi).
    #[arg(long, value_parser = parse_angle)]
    pub k0: Option<f64>,
    /// Packet width in sites.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Total chain sites including the center.
    #[arg(long)]
    pub sites: Option<usize>,
    /// Initial distance of the packet from the center.
    #[arg(long)]
    pub distance: Option<i64>,
    /// Local error bound per step.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Stored samples (at least 50).
    #[arg(long)]
    pub samples: Option<usize>,
    /// Propagation time; default (distance + 6 sigma) / |v(k0)|.
    #[arg(long)]
    pub duration: Option<f64>,
    /// Remove one lead (reflectionless-absorber setup).
    #[arg(long, value_enum)]
    pub cut: Option<LeadSide>,
    /// Incidence side(s) for the two-lead setup.
    #[arg(long, value_enum)]
    pub incidence: Option<Incidence>,
}

impl EvolveArgs {
    pub fn resolve(&self, f: &FileConfig) -> anyhow::Result<EvolveConfig> {
        let d = EvolveConfig::default();
        let c = EvolveConfig {
            j: positive("j", self.j.or(f.j).unwrap_or(d.j))?,
            gamma: finite("gamma", pick_angle(self.gamma, f.gamma, d.gamma))?,
            phi: finite("phi", pick_angle(self.phi, f.phi, d.phi))?,
            k0: pick_angle(self.k0, f.k0, d.k0),
            sigma: positive("sigma", self.sigma.or(f.sigma).unwrap_or(d.sigma))?,
            sites: self.sites.or(f.sites).unwrap_or(d.sites),
            distance: self.distance.or(f.distance).unwrap_or(d.distance),
            tol: positive("tol", self.tol.or(f.tol).unwrap_or(d.tol))?,
            samples: self.samples.or(f.samples).unwrap_or(d.samples),
            duration: match self.duration.or(f.duration) {
                Some(t) => Some(positive("duration", t)?),
                None => None,
            },
            cut: self.cut.or(f.cut),
            incidence: self.incidence.or(f.incidence).unwrap_or(d.incidence),
        };
        if !(c.k0 > 0.0 && c.k0 < std::f64::consts::PI) {
            return Err(usage("k0 must lie in (0, pi)"));
        }
        if c.distance <= 0 {
            return Err(usage("distance must be positive"));
        }
        Ok(c)
    }
}
