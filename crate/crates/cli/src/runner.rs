//! The generic experiment driver: build the automaton described by a
//! config, evolve it, and emit the requested tables.

use std::f64::consts::PI;

use qlga::{
    assemble_global_u, dispersion_omega, eigendecompose_unitary, evolve, fourier_amplitudes,
    plane_wave, track_packet, wave_packet, Branch, LatticeSpec, LocalRule, PlaneWaveIndex,
    PotentialProfile, Region, RuleParams, SpectralResult, StateVector, Velocity, WavePacketSpec,
};

use crate::config::{ExperimentConfig, InitialKind, OutputKind, PotentialKind};
use crate::error::CliError;
use crate::output::{Cell, RunSink, Table};

pub struct Experiment {
    pub lattice: LatticeSpec,
    pub params: RuleParams,
    pub rule: LocalRule,
    pub potential: PotentialProfile,
}

impl Experiment {
    pub fn build(config: &ExperimentConfig) -> Result<Self, CliError> {
        config.validate()?;
        let lattice = LatticeSpec::new(config.sites)?;
        let params = RuleParams::new(config.theta, config.rho);
        let rule = LocalRule::new(&params);
        let potential = match config.potential {
            PotentialKind::None => PotentialProfile::flat(lattice),
            PotentialKind::SquareWell { depth } => PotentialProfile::square_well(lattice, depth),
        };
        Ok(Experiment {
            lattice,
            params,
            rule,
            potential,
        })
    }

    pub fn initial_state(&self, config: &ExperimentConfig) -> Result<StateVector, CliError> {
        Ok(match config.initial {
            InitialKind::PlaneWave { n, epsilon } => plane_wave(
                PlaneWaveIndex::new(n, branch_of(epsilon)),
                &self.params,
                self.lattice,
            )?,
            InitialKind::Packet { k0, x0, s } => {
                let spec = WavePacketSpec::new(k0, x0, s);
                wave_packet(&spec, &self.params, self.lattice)?
            }
            InitialKind::Basis { x, alpha } => {
                let velocity = if alpha == 1 {
                    Velocity::Right
                } else {
                    Velocity::Left
                };
                StateVector::basis(self.lattice, x, velocity)?
            }
        })
    }
}

fn branch_of(epsilon: i8) -> Branch {
    if epsilon == 1 {
        Branch::Plus
    } else {
        Branch::Minus
    }
}

/// Execute a config with the standard output set.  Scenario presets with
/// specialized measurements override this.
pub fn run_standard(config: &ExperimentConfig, sink: &mut RunSink) -> Result<(), CliError> {
    let experiment = Experiment::build(config)?;
    let initial = experiment.initial_state(config)?;

    let needs_trajectory = config
        .outputs
        .iter()
        .any(|k| matches!(k, OutputKind::Trajectory | OutputKind::Density));
    let trajectory = if needs_trajectory {
        evolve(
            &initial,
            &experiment.rule,
            &experiment.potential,
            config.steps,
        )?
    } else {
        vec![initial.clone()]
    };

    for kind in &config.outputs {
        match kind {
            OutputKind::Trajectory => sink.write_table(&trajectory_table(&trajectory))?,
            OutputKind::Density => sink.write_table(&density_table(&trajectory))?,
            OutputKind::Spectrum => {
                sink.write_table(&spectrum_table(&initial, &experiment.params))?
            }
            OutputKind::Dispersion => sink.write_table(&dispersion_table(
                &experiment.params,
                config.dispersion_resolution,
            ))?,
            OutputKind::Eigenpairs => {
                let spectral = decompose(&experiment)?;
                sink.write_table(&eigenpairs_table(&spectral, None))?;
            }
        }
    }

    // Square-well runs get peak/region tracking alongside the trajectory.
    if needs_trajectory && config.steps > 0 {
        if let PotentialKind::SquareWell { .. } = config.potential {
            sink.write_table(&diagnostics_table(&trajectory, config.sites)?)?;
        }
    }
    Ok(())
}

pub fn decompose(experiment: &Experiment) -> Result<SpectralResult, CliError> {
    let u = assemble_global_u(&experiment.rule, &experiment.potential, experiment.lattice)?;
    Ok(eigendecompose_unitary(&u)?)
}

pub fn trajectory_table(trajectory: &[StateVector]) -> Table {
    let mut table = Table::new(
        "trajectory",
        &["t", "x", "re_minus", "im_minus", "re_plus", "im_plus", "prob"],
    );
    for (t, state) in trajectory.iter().enumerate() {
        for (x, amp) in state.amps().iter().enumerate() {
            table.push(vec![
                Cell::from(t),
                Cell::from(x),
                Cell::from(amp.minus.re),
                Cell::from(amp.minus.im),
                Cell::from(amp.plus.re),
                Cell::from(amp.plus.im),
                Cell::from(amp.norm_sqr()),
            ]);
        }
    }
    table
}

pub fn density_table(trajectory: &[StateVector]) -> Table {
    let mut table = Table::new("density", &["t", "x", "prob"]);
    for (t, state) in trajectory.iter().enumerate() {
        for (x, p) in state.probability_density().iter().enumerate() {
            table.push(vec![Cell::from(t), Cell::from(x), Cell::from(*p)]);
        }
    }
    table
}

pub fn spectrum_table(state: &StateVector, params: &RuleParams) -> Table {
    let spectrum = fourier_amplitudes(state, params);
    let mut table = Table::new("spectrum", &["n", "epsilon", "re_amp", "im_amp", "prob"]);
    for n in 0..spectrum.sites() {
        for branch in Branch::ALL {
            let amp = spectrum.amp(n, branch);
            table.push(vec![
                Cell::from(n),
                Cell::from(branch.sign() as i64),
                Cell::from(amp.re),
                Cell::from(amp.im),
                Cell::from(amp.norm_sqr()),
            ]);
        }
    }
    table
}

/// `(k, +omega, -omega)` over `resolution` samples of `(-pi, pi]`.
pub fn dispersion_table(params: &RuleParams, resolution: usize) -> Table {
    let mut table = Table::new("dispersion", &["k", "omega_plus", "omega_minus"]);
    for i in 0..resolution {
        let k = -PI + 2.0 * PI * (i + 1) as f64 / resolution as f64;
        let omega = dispersion_omega(k, params);
        table.push(vec![Cell::from(k), Cell::from(omega), Cell::from(-omega)]);
    }
    table
}

/// Wide eigenpair rows `(j, omega, re_0, im_0, ..., re_{2N-1}, im_{2N-1})`.
/// `select` restricts to the given (already-sorted) indices.
pub fn eigenpairs_table(spectral: &SpectralResult, select: Option<&[usize]>) -> Table {
    let dim = spectral.dim();
    let mut headers: Vec<String> = vec!["j".into(), "omega".into()];
    for c in 0..dim {
        headers.push(format!("re_{c}"));
        headers.push(format!("im_{c}"));
    }
    let header_refs: Vec<&str> = headers.iter().map(String::as_str).collect();
    let mut table = Table::new("eigenpairs", &header_refs);
    let indices: Vec<usize> = match select {
        Some(sel) => sel.to_vec(),
        None => (0..dim).collect(),
    };
    for j in indices {
        let mut row = Vec::with_capacity(2 + 2 * dim);
        row.push(Cell::from(j));
        row.push(Cell::from(spectral.omegas[j]));
        for v in &spectral.vectors[j] {
            row.push(Cell::from(v.re));
            row.push(Cell::from(v.im));
        }
        table.push(row);
    }
    table
}

fn diagnostics_table(trajectory: &[StateVector], sites: usize) -> Result<Table, CliError> {
    let inside = Region::new(sites / 4, 3 * sites / 4);
    let outside = Region::new(3 * sites / 4, sites / 4);
    let diag = track_packet(trajectory, &[inside, outside])?;
    let mut table = Table::new("diagnostics", &["t", "peak", "prob_well", "prob_outside"]);
    for t in 0..trajectory.len() {
        table.push(vec![
            Cell::from(t),
            Cell::from(diag.peak_positions[t]),
            Cell::from(diag.region_probabilities[0][t]),
            Cell::from(diag.region_probabilities[1][t]),
        ]);
    }
    Ok(table)
}
