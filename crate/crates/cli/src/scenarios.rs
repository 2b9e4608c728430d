//! The scenario registry: every named experiment preset lives behind the
//! [`Scenario`] trait, registered by name and selected at runtime.  Plane
//! wave, packet, and dispersion presets run the standard driver; band-sweep
//! and eigenfunction presets override execution with their own measurement
//! loops.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::LazyLock;

use qlga::{assemble_global_u, eigendecompose_unitary, LatticeSpec, LocalRule, PotentialProfile,
    RuleParams};

use crate::config::{
    ExperimentConfig, InitialKind, OutputKind, PotentialKind, SweepSpec,
};
use crate::error::CliError;
use crate::output::{Cell, RunSink, Table};
use crate::runner::{decompose, eigenpairs_table, run_standard, Experiment};

/// One selectable experiment.  `base_config` supplies the preset values
/// (before file/flag overrides); `execute` runs the merged config.
pub trait Scenario: Send + Sync {
    fn name(&self) -> &'static str;
    fn summary(&self) -> String;
    fn base_config(&self) -> ExperimentConfig;
    fn execute(&self, config: &ExperimentConfig, sink: &mut RunSink) -> Result<(), CliError> {
        run_standard(config, sink)
    }
}

fn base(name: &str, sites: usize, theta: f64, rho: f64) -> ExperimentConfig {
    let mut config = ExperimentConfig::default_custom();
    config.scenario = name.to_string();
    config.sites = sites;
    config.theta = theta;
    config.rho = rho;
    config
}

/// Fully config-driven run with no preset of its own.
struct Custom;

impl Scenario for Custom {
    fn name(&self) -> &'static str {
        "custom"
    }
    fn summary(&self) -> String {
        "config-driven run; every field comes from the file/flags".into()
    }
    fn base_config(&self) -> ExperimentConfig {
        ExperimentConfig::default_custom()
    }
}

struct PlaneWavePreset {
    name: &'static str,
    sites: usize,
    theta: f64,
    rho: f64,
    n: usize,
    steps: usize,
    summary: &'static str,
}

impl Scenario for PlaneWavePreset {
    fn name(&self) -> &'static str {
        self.name
    }
    fn summary(&self) -> String {
        format!("{} ({} steps)", self.summary, self.steps)
    }
    fn base_config(&self) -> ExperimentConfig {
        let mut config = base(self.name, self.sites, self.theta, self.rho);
        config.initial = InitialKind::PlaneWave {
            n: self.n,
            epsilon: 1,
        };
        config.steps = self.steps;
        config.outputs = vec![OutputKind::Trajectory, OutputKind::Spectrum];
        config
    }
}

struct DispersionPreset {
    name: &'static str,
    theta: f64,
    rho: f64,
    summary: &'static str,
}

impl Scenario for DispersionPreset {
    fn name(&self) -> &'static str {
        self.name
    }
    fn summary(&self) -> String {
        self.summary.into()
    }
    fn base_config(&self) -> ExperimentConfig {
        let mut config = base(self.name, 32, self.theta, self.rho);
        config.outputs = vec![OutputKind::Dispersion];
        config
    }
}

struct PacketPreset {
    name: &'static str,
    sites: usize,
    theta: f64,
    rho: f64,
    k0: f64,
    x0: usize,
    s: usize,
    depth: Option<f64>,
    steps: usize,
    summary: &'static str,
}

impl Scenario for PacketPreset {
    fn name(&self) -> &'static str {
        self.name
    }
    fn summary(&self) -> String {
        format!("{} ({} steps)", self.summary, self.steps)
    }
    fn base_config(&self) -> ExperimentConfig {
        let mut config = base(self.name, self.sites, self.theta, self.rho);
        config.initial = InitialKind::Packet {
            k0: self.k0,
            x0: self.x0,
            s: self.s,
        };
        config.potential = match self.depth {
            Some(depth) => PotentialKind::SquareWell { depth },
            None => PotentialKind::None,
        };
        config.steps = self.steps;
        config.outputs = vec![
            OutputKind::Trajectory,
            OutputKind::Density,
            OutputKind::Spectrum,
        ];
        config
    }
}

/// Eigenvalues of the evolution operator over a grid of well depths;
/// emits `bands` rows `(phi, j, omega)`.
struct BandSweepPreset {
    name: &'static str,
    sites: usize,
    theta: f64,
    rho: f64,
    samples: usize,
    summary: &'static str,
}

impl Scenario for BandSweepPreset {
    fn name(&self) -> &'static str {
        self.name
    }
    fn summary(&self) -> String {
        format!("{} ({}-point depth grid)", self.summary, self.samples)
    }
    fn base_config(&self) -> ExperimentConfig {
        let mut config = base(self.name, self.sites, self.theta, self.rho);
        config.outputs = vec![];
        config.sweep = Some(SweepSpec {
            samples: self.samples,
            phi_max: PI,
        });
        config
    }
    fn execute(&self, config: &ExperimentConfig, sink: &mut RunSink) -> Result<(), CliError> {
        config.validate()?;
        let sweep = config
            .sweep
            .ok_or_else(|| CliError::config("band sweep needs a sweep grid"))?;
        let table = band_sweep_table(config, sweep)?;
        sink.write_table(&table)
    }
}

/// Shared by the sweep scenarios and the acceptance suite: one eigensolve
/// per grid depth, rows `(phi, j, omega)` in grid-then-index order.
pub fn band_sweep_table(config: &ExperimentConfig, sweep: SweepSpec) -> Result<Table, CliError> {
    let lattice = LatticeSpec::new(config.sites)?;
    let params = RuleParams::new(config.theta, config.rho);
    let rule = LocalRule::new(&params);
    let mut table = Table::new("bands", &["phi", "j", "omega"]);
    for m in 0..sweep.samples {
        let phi = sweep.phi_max * m as f64 / (sweep.samples - 1) as f64;
        let potential = PotentialProfile::square_well(lattice, phi);
        let u = assemble_global_u(&rule, &potential, lattice)?;
        let spectral = eigendecompose_unitary(&u)?;
        for (j, omega) in spectral.omegas.iter().enumerate() {
            table.push(vec![Cell::from(phi), Cell::from(j), Cell::from(*omega)]);
        }
    }
    Ok(table)
}

/// Which eigenfunctions of a well system to report.
enum ModePick {
    SmallestPositive(usize),
    NearestTo(f64),
}

/// Eigenfunctions of the square-well operator; emits the selected
/// `eigenpairs` rows plus their site densities.
struct EigenfunctionPreset {
    name: &'static str,
    sites: usize,
    theta: f64,
    rho: f64,
    depth: f64,
    pick: ModePick,
    summary: &'static str,
}

impl Scenario for EigenfunctionPreset {
    fn name(&self) -> &'static str {
        self.name
    }
    fn summary(&self) -> String {
        self.summary.into()
    }
    fn base_config(&self) -> ExperimentConfig {
        let mut config = base(self.name, self.sites, self.theta, self.rho);
        config.potential = PotentialKind::SquareWell { depth: self.depth };
        config.outputs = vec![OutputKind::Eigenpairs];
        config
    }
    fn execute(&self, config: &ExperimentConfig, sink: &mut RunSink) -> Result<(), CliError> {
        let experiment = Experiment::build(config)?;
        let spectral = decompose(&experiment)?;
        let selected: Vec<usize> = match self.pick {
            ModePick::SmallestPositive(count) => spectral
                .positive_omegas()
                .map(|(j, _)| j)
                .take(count)
                .collect(),
            ModePick::NearestTo(target) => {
                let j = spectral
                    .omegas
                    .iter()
                    .enumerate()
                    .min_by(|a, b| {
                        (a.1 - target)
                            .abs()
                            .partial_cmp(&(b.1 - target).abs())
                            .unwrap()
                    })
                    .map(|(j, _)| j)
                    .ok_or_else(|| CliError::config("empty spectrum"))?;
                vec![j]
            }
        };
        sink.write_table(&eigenpairs_table(&spectral, Some(&selected)))?;
        let mut densities = Table::new("eigenfunctions", &["j", "omega", "x", "prob"]);
        for &j in &selected {
            for (x, p) in spectral.site_densities(j).iter().enumerate() {
                densities.push(vec![
                    Cell::from(j),
                    Cell::from(spectral.omegas[j]),
                    Cell::from(x),
                    Cell::from(*p),
                ]);
            }
        }
        sink.write_table(&densities)
    }
}

static REGISTRY: LazyLock<BTreeMap<&'static str, Box<dyn Scenario>>> = LazyLock::new(|| {
    let theta = PI / 3.0;
    let rho = PI / 4.0;
    let massless = PI / 6.0;
    let entries: Vec<Box<dyn Scenario>> = vec![
        Box::new(Custom),
        Box::new(PlaneWavePreset {
            name: "fig1",
            sites: 32,
            theta,
            rho,
            n: 1,
            steps: 32,
            summary: "n=1 right-moving plane wave, N=32, theta=pi/3 rho=pi/4",
        }),
        Box::new(PlaneWavePreset {
            name: "fig2",
            sites: 32,
            theta,
            rho,
            n: 2,
            steps: 32,
            summary: "n=2 right-moving plane wave, N=32, theta=pi/3 rho=pi/4",
        }),
        Box::new(DispersionPreset {
            name: "fig3",
            theta,
            rho,
            summary: "dispersion relation for theta=pi/3 rho=pi/4",
        }),
        Box::new(DispersionPreset {
            name: "fig4",
            theta: massless,
            rho: massless,
            summary: "dispersion relation in the massless case theta=rho=pi/6",
        }),
        Box::new(PacketPreset {
            name: "fig5",
            sites: 64,
            theta,
            rho,
            k0: PI / 4.0,
            x0: 31,
            s: 32,
            depth: None,
            steps: 49,
            summary: "k0=pi/4 packet of width 32 on N=64",
        }),
        Box::new(PacketPreset {
            name: "fig6",
            sites: 64,
            theta,
            rho,
            k0: PI / 4.0,
            x0: 31,
            s: 8,
            depth: None,
            steps: 49,
            summary: "k0=pi/4 packet of width 8 on N=64",
        }),
        Box::new(PacketPreset {
            name: "fig7",
            sites: 64,
            theta,
            rho,
            k0: PI / 32.0,
            x0: 31,
            s: 32,
            depth: None,
            steps: 49,
            summary: "k0=pi/32 packet of width 32 on N=64",
        }),
        Box::new(PacketPreset {
            name: "fig8",
            sites: 64,
            theta: massless,
            rho: massless,
            k0: PI / 32.0,
            x0: 31,
            s: 32,
            depth: None,
            steps: 49,
            summary: "massless k0=pi/32 packet of width 32 on N=64",
        }),
        Box::new(BandSweepPreset {
            name: "fig9",
            sites: 8,
            theta,
            rho,
            samples: 65,
            summary: "well-depth eigenvalue sweep, N=8, theta=pi/3 rho=pi/4",
        }),
        Box::new(BandSweepPreset {
            name: "fig10",
            sites: 32,
            theta,
            rho,
            samples: 65,
            summary: "well-depth eigenvalue sweep, N=32, theta=pi/3 rho=pi/4",
        }),
        Box::new(BandSweepPreset {
            name: "fig11",
            sites: 32,
            theta: massless,
            rho: massless,
            samples: 65,
            summary: "well-depth eigenvalue sweep, N=32, massless theta=rho=pi/6",
        }),
        Box::new(EigenfunctionPreset {
            name: "fig12",
            sites: 256,
            theta,
            rho,
            depth: PI / 24.0,
            pick: ModePick::SmallestPositive(3),
            summary: "three lowest positive-frequency eigenfunctions, N=256 well of depth pi/24",
        }),
        Box::new(EigenfunctionPreset {
            name: "fig13",
            sites: 256,
            theta,
            rho,
            depth: PI / 24.0,
            pick: ModePick::NearestTo(0.3985),
            summary: "unconfined eigenfunction near omega=0.3985, N=256 well of depth pi/24",
        }),
        Box::new(PacketPreset {
            name: "fig14",
            sites: 64,
            theta,
            rho,
            k0: PI / 4.0,
            x0: 31,
            s: 32,
            depth: Some(PI / 6.0),
            steps: 49,
            summary: "k0=pi/4 packet scattering off a square well of depth pi/6",
        }),
        Box::new(PacketPreset {
            name: "fig15",
            sites: 64,
            theta,
            rho,
            k0: PI / 4.0,
            x0: 31,
            s: 32,
            depth: Some(PI / 4.0),
            steps: 49,
            summary: "k0=pi/4 packet scattering off a square well of depth pi/4",
        }),
        Box::new(PacketPreset {
            name: "fig16",
            sites: 64,
            theta,
            rho,
            k0: PI / 4.0,
            x0: 31,
            s: 32,
            depth: Some(PI / 3.0),
            steps: 49,
            summary: "k0=pi/4 packet scattering off a square well of depth pi/3",
        }),
    ];
    entries.into_iter().map(|s| (s.name(), s)).collect()
});

/// All registered scenarios, keyed by name.
pub fn registry() -> &'static BTreeMap<&'static str, Box<dyn Scenario>> {
    &REGISTRY
}
