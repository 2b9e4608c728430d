//! Semi-classical wave packets: plane waves windowed by binomial
//! coefficients, their closed-form momentum spectra, and trajectory
//! diagnostics (peak tracking, measured group velocity, per-region
//! probability).

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::lattice::{LatticeSpec, RuleParams, Spinor, StateVector};
use crate::spectral::{branch_spinor, fourier_amplitudes, Branch, FourierSpectrum};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PacketError {
    #[error("packet width must be even, got {0}")]
    OddWidth(usize),
    #[error("packet width {width} exceeds lattice of {sites} sites")]
    WidthExceedsLattice { width: usize, sites: usize },
    #[error("packet center {center} out of range for {sites} sites")]
    CenterOutOfRange { center: usize, sites: usize },
    #[error("cannot track an empty trajectory")]
    EmptyTrajectory,
}

/// Recipe for a binomial wave packet: carrier wave number `k0 = 2 pi n0/N`,
/// center site `x0`, even width parameter `s` (support spans `s + 1` sites),
/// and carrier branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavePacketSpec {
    pub k0: f64,
    pub x0: usize,
    pub s: usize,
    pub branch: Branch,
}

impl WavePacketSpec {
    pub fn new(k0: f64, x0: usize, s: usize) -> Self {
        Self {
            k0,
            x0,
            s,
            branch: Branch::Plus,
        }
    }

    fn validate(&self, lattice: LatticeSpec) -> Result<(), PacketError> {
        if self.s % 2 != 0 {
            return Err(PacketError::OddWidth(self.s));
        }
        if self.s > lattice.sites() {
            return Err(PacketError::WidthExceedsLattice {
                width: self.s,
                sites: lattice.sites(),
            });
        }
        if self.x0 >= lattice.sites() {
            return Err(PacketError::CenterOutOfRange {
                center: self.x0,
                sites: lattice.sites(),
            });
        }
        Ok(())
    }
}

/// Which route produced a momentum spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentumRoute {
    /// Evaluated from the binomial-window closed form.
    ClosedForm,
    /// Support covers the whole ring; fell back to the numeric transform.
    NumericFallback,
}

/// A half-open site interval `[start, end)`, wrapping around the ring when
/// `start >= end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Region {
    pub start: usize,
    pub end: usize,
}

impl Region {
    pub fn new(start: usize, end: usize) -> Self {
        Self { start, end }
    }

    pub fn contains(&self, x: usize) -> bool {
        if self.start < self.end {
            self.start <= x && x < self.end
        } else {
            x >= self.start || x < self.end
        }
    }
}

/// Measurements along a packet trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct PacketDiagnostics {
    /// Per-step most-probable site, unwrapped across the periodic seam.
    pub peak_positions: Vec<i64>,
    /// Net unwrapped peak displacement divided by the number of steps.
    pub measured_group_velocity: f64,
    /// `region_probabilities[r][t]` is the probability inside region `r`
    /// at step `t`.
    pub region_probabilities: Vec<Vec<f64>>,
}

/// Binomial weights `C(s, j) / C(s, s/2)` for `j = 0..=s`, built by the
/// outward ratio recurrence so no intermediate overflows for any `s`.
fn binomial_weights(s: usize) -> Vec<f64> {
    let mut w = vec![0.0; s + 1];
    let mid = s / 2;
    w[mid] = 1.0;
    for j in (1..=mid).rev() {
        // C(s, j-1) = C(s, j) * j / (s - j + 1)
        w[j - 1] = w[j] * j as f64 / (s - j + 1) as f64;
    }
    for j in mid + 1..=s {
        w[j] = w[s - j];
    }
    w
}

/// The binomial wave packet: carrier plane wave windowed by `C(s, j)` on
/// the support `[x0 - s/2, x0 + s/2]` (mod `N`), normalized to unit norm.
/// Wrapping supports accumulate additively.
pub fn wave_packet(
    spec: &WavePacketSpec,
    params: &RuleParams,
    lattice: LatticeSpec,
) -> Result<StateVector, PacketError> {
    spec.validate(lattice)?;
    let chi = branch_spinor(spec.k0, spec.branch, params);
    let weights = binomial_weights(spec.s);
    let mut amps = vec![Spinor::default(); lattice.sites()];
    let half = (spec.s / 2) as i64;
    for (j, &w) in weights.iter().enumerate() {
        let x = spec.x0 as i64 - half + j as i64;
        let site = lattice.wrap(x);
        // e^{i k0 x} at the unwrapped coordinate; identical on the ring for
        // lattice wave numbers.
        amps[site] = amps[site] + chi * C64::from_polar(w, spec.k0 * x as f64);
    }
    // The center site always carries weight 1, so the raw norm is nonzero.
    Ok(StateVector::normalized(lattice, amps).expect("packet amplitudes finite and nonzero"))
}

/// Momentum amplitudes of the packet, from the closed form
/// `amp(k, eps) ~ chi(k,eps)^dagger chi(k0) e^{i(k0-k)x0} cos^s((k0-k)/2)`,
/// normalized like [`wave_packet`] followed by the numeric transform.
///
/// When the support covers the whole ring (`s = N`) the window sum no
/// longer telescopes and the numeric transform is used instead; the
/// returned route records which path was taken.
pub fn packet_momentum_amplitudes(
    spec: &WavePacketSpec,
    params: &RuleParams,
    lattice: LatticeSpec,
) -> Result<(FourierSpectrum, MomentumRoute), PacketError> {
    spec.validate(lattice)?;
    let n_sites = lattice.sites();
    if spec.s >= n_sites {
        let packet = wave_packet(spec, params, lattice)?;
        return Ok((
            fourier_amplitudes(&packet, params),
            MomentumRoute::NumericFallback,
        ));
    }
    let chi0 = branch_spinor(spec.k0, spec.branch, params);
    let mut amps = Vec::with_capacity(n_sites);
    let mut total = 0.0;
    for n in 0..n_sites {
        let k = 2.0 * PI * n as f64 / n_sites as f64;
        let delta = spec.k0 - k;
        let window = (delta / 2.0).cos().powi(spec.s as i32);
        let carrier = C64::from_polar(window, delta * spec.x0 as f64);
        let mut pair = [C64::ZERO; 2];
        for branch in Branch::ALL {
            let chi = branch_spinor(k, branch, params);
            let overlap = chi.minus.conj() * chi0.minus + chi.plus.conj() * chi0.plus;
            let amp = overlap * carrier;
            total += amp.norm_sqr();
            pair[branch.index()] = amp;
        }
        amps.push(pair);
    }
    let scale = C64::new(1.0 / total.sqrt(), 0.0);
    for pair in amps.iter_mut() {
        pair[0] *= scale;
        pair[1] *= scale;
    }
    Ok((
        FourierSpectrum::from_amps(n_sites, amps),
        MomentumRoute::ClosedForm,
    ))
}

/// Track the probability peak along a trajectory and integrate the density
/// over the given regions.
///
/// The per-step argmax breaks plateaus toward the smallest site index, and
/// consecutive peaks are unwrapped with the shortest step around the ring.
pub fn track_packet(
    trajectory: &[StateVector],
    regions: &[Region],
) -> Result<PacketDiagnostics, PacketError> {
    if trajectory.is_empty() {
        return Err(PacketError::EmptyTrajectory);
    }
    let n = trajectory[0].lattice().sites() as i64;
    let mut peaks = Vec::with_capacity(trajectory.len());
    let mut region_probabilities = vec![Vec::with_capacity(trajectory.len()); regions.len()];
    let mut prev_site = 0i64;
    let mut unwrapped = 0i64;
    for (t, state) in trajectory.iter().enumerate() {
        let density = state.probability_density();
        let argmax = density
            .iter()
            .enumerate()
            .fold((0usize, f64::NEG_INFINITY), |(bi, bv), (i, &v)| {
                if v > bv {
                    (i, v)
                } else {
                    (bi, bv)
                }
            })
            .0 as i64;
        if t == 0 {
            unwrapped = argmax;
        } else {
            let mut delta = (argmax - prev_site).rem_euclid(n);
            if delta > n / 2 {
                delta -= n;
            }
            unwrapped += delta;
        }
        prev_site = argmax;
        peaks.push(unwrapped);
        for (r, region) in regions.iter().enumerate() {
            let p = density
                .iter()
                .enumerate()
                .filter(|(x, _)| region.contains(*x))
                .map(|(_, &v)| v)
                .sum();
            region_probabilities[r].push(p);
        }
    }
    let steps = trajectory.len() - 1;
    let measured_group_velocity = if steps == 0 {
        0.0
    } else {
        (peaks[steps] - peaks[0]) as f64 / steps as f64
    };
    Ok(PacketDiagnostics {
        peak_positions: peaks,
        measured_group_velocity,
        region_probabilities,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{evolve, LocalRule, PotentialProfile};
    use crate::spectral::dispersion_omega;

    const THETA: f64 = PI / 3.0;
    const RHO: f64 = PI / 4.0;

    fn params() -> RuleParams {
        RuleParams::new(THETA, RHO)
    }

    #[test]
    fn zero_width_packet_is_single_site() {
        let lattice = LatticeSpec::new(16).unwrap();
        let spec = WavePacketSpec::new(PI / 4.0, 5, 0);
        let packet = wave_packet(&spec, &params(), lattice).unwrap();
        let density = packet.probability_density();
        assert!((density[5] - 1.0).abs() < 1e-14);
        assert!((packet.norm() - 1.0).abs() < 1e-14);
        let chi = branch_spinor(PI / 4.0, Branch::Plus, &params());
        // Same spinor up to the carrier phase at x = 5.
        let phase = C64::from_polar(1.0, PI / 4.0 * 5.0);
        assert!((packet.amp(5).minus - chi.minus * phase).norm() < 1e-14);
        assert!((packet.amp(5).plus - chi.plus * phase).norm() < 1e-14);
    }

    #[test]
    fn central_probability_matches_binomial_identity() {
        // For a non-wrapping support, p[x0] = C(s, s/2)^2 / C(2s, s).
        // Oracle: exact integer binomials summed directly.
        let s = 32usize;
        let lattice = LatticeSpec::new(64).unwrap();
        let spec = WavePacketSpec::new(PI / 4.0, 31, s);
        let packet = wave_packet(&spec, &params(), lattice).unwrap();

        let binom = |n: usize, k: usize| -> u128 {
            let mut acc: u128 = 1;
            for i in 0..k {
                acc = acc * (n - i) as u128 / (i + 1) as u128;
            }
            acc
        };
        let center = binom(s, s / 2);
        let sum_sq: u128 = (0..=s).map(|j| binom(s, j) * binom(s, j)).sum();
        assert_eq!(sum_sq, binom(2 * s, s), "Vandermonde identity");
        let expected = (center * center) as f64 / sum_sq as f64;

        let density = packet.probability_density();
        assert!((density[31] - expected).abs() <= 1e-12);
    }

    #[test]
    fn packet_peak_travels_as_in_the_reference_run() {
        // k0 = pi/4, s = 32 on 64 sites: peak moves 31 -> 54 in 49 steps.
        let lattice = LatticeSpec::new(64).unwrap();
        let p = params();
        let spec = WavePacketSpec::new(PI / 4.0, 31, 32);
        let packet = wave_packet(&spec, &p, lattice).unwrap();
        let rule = LocalRule::new(&p);
        let flat = PotentialProfile::flat(lattice);
        let trajectory = evolve(&packet, &rule, &flat, 49).unwrap();
        let diag = track_packet(&trajectory, &[]).unwrap();
        assert_eq!(diag.peak_positions[0], 31);
        let displacement = diag.peak_positions[49] - diag.peak_positions[0];
        assert!(
            (22..=24).contains(&displacement),
            "displacement {displacement}"
        );
    }

    #[test]
    fn momentum_peak_sits_at_carrier() {
        let lattice = LatticeSpec::new(64).unwrap();
        let spec = WavePacketSpec::new(PI / 4.0, 31, 32);
        let (spectrum, route) = packet_momentum_amplitudes(&spec, &params(), lattice).unwrap();
        assert_eq!(route, MomentumRoute::ClosedForm);
        let carrier_n = 8; // pi/4 = 2 pi 8 / 64
        let peak = spectrum.amp(carrier_n, Branch::Plus).norm();
        for n in 0..64 {
            for branch in Branch::ALL {
                assert!(spectrum.amp(n, branch).norm() <= peak + 1e-12);
            }
        }
        assert!(peak > 0.35);
    }

    #[test]
    fn closed_form_matches_numeric_transform() {
        let lattice = LatticeSpec::new(64).unwrap();
        let p = params();
        for (k0, s) in [(PI / 4.0, 32), (PI / 4.0, 8), (PI / 32.0, 32)] {
            let spec = WavePacketSpec::new(k0, 31, s);
            let (closed, route) = packet_momentum_amplitudes(&spec, &p, lattice).unwrap();
            assert_eq!(route, MomentumRoute::ClosedForm);
            let packet = wave_packet(&spec, &p, lattice).unwrap();
            let numeric = fourier_amplitudes(&packet, &p);
            for n in 0..64 {
                for branch in Branch::ALL {
                    let diff = (closed.amp(n, branch) - numeric.amp(n, branch)).norm();
                    assert!(diff <= 1e-10, "k0={k0} s={s} n={n} {branch:?}: {diff}");
                }
            }
        }
    }

    #[test]
    fn narrower_packet_has_wider_momentum_peak() {
        let lattice = LatticeSpec::new(64).unwrap();
        let p = params();
        let width = |s: usize| -> f64 {
            let spec = WavePacketSpec::new(PI / 4.0, 31, s);
            let (spectrum, _) = packet_momentum_amplitudes(&spec, &p, lattice).unwrap();
            // Circular second moment of |amp|^2 about the carrier.
            let mut m2 = 0.0;
            for n in 0..64 {
                let k = 2.0 * PI * n as f64 / 64.0;
                let mut d = (k - PI / 4.0).rem_euclid(2.0 * PI);
                if d > PI {
                    d -= 2.0 * PI;
                }
                for branch in Branch::ALL {
                    m2 += spectrum.amp(n, branch).norm_sqr() * d * d;
                }
            }
            m2
        };
        assert!(width(8) > width(32));
    }

    #[test]
    fn whole_ring_support_falls_back_to_numeric() {
        let lattice = LatticeSpec::new(16).unwrap();
        let spec = WavePacketSpec::new(PI / 4.0, 8, 16);
        let (spectrum, route) = packet_momentum_amplitudes(&spec, &params(), lattice).unwrap();
        assert_eq!(route, MomentumRoute::NumericFallback);
        assert!((spectrum.total_probability() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn stationary_state_has_zero_velocity() {
        // The n = 0 mode at theta = rho is a fixed point of the evolution;
        // its flat density plateaus to site 0 at every step.
        let lattice = LatticeSpec::new(32).unwrap();
        let p = RuleParams::new(PI / 6.0, PI / 6.0);
        let wave =
            crate::spectral::plane_wave(crate::spectral::PlaneWaveIndex::new(0, Branch::Plus), &p, lattice)
                .unwrap();
        let rule = LocalRule::new(&p);
        let flat = PotentialProfile::flat(lattice);
        let trajectory = evolve(&wave, &rule, &flat, 20).unwrap();
        let diag = track_packet(&trajectory, &[]).unwrap();
        assert_eq!(diag.measured_group_velocity, 0.0);
        assert!(diag.peak_positions.iter().all(|&p| p == 0));
    }

    #[test]
    fn carrier_frequency_of_reference_packet() {
        // The k0 = pi/4 carrier sits at omega0 = arccos((1 + sqrt 6)/4),
        // just above pi/6.
        let omega0 = dispersion_omega(PI / 4.0, &params());
        let expected = ((1.0 + 6.0_f64.sqrt()) / 4.0).acos();
        assert!((omega0 - expected).abs() <= 1e-12);
        assert!(omega0 > PI / 6.0);
    }

    #[test]
    fn region_probabilities_partition_the_norm() {
        let lattice = LatticeSpec::new(64).unwrap();
        let p = params();
        let spec = WavePacketSpec::new(PI / 4.0, 31, 32);
        let packet = wave_packet(&spec, &p, lattice).unwrap();
        let rule = LocalRule::new(&p);
        let well = PotentialProfile::square_well(lattice, PI / 6.0);
        let trajectory = evolve(&packet, &rule, &well, 10).unwrap();
        let inside = Region::new(16, 48);
        let outside = Region::new(48, 16);
        let diag = track_packet(&trajectory, &[inside, outside]).unwrap();
        for t in 0..=10 {
            let a = diag.region_probabilities[0][t];
            let b = diag.region_probabilities[1][t];
            assert!((0.0..=1.0 + 1e-12).contains(&a));
            assert!((0.0..=1.0 + 1e-12).contains(&b));
            assert!((a + b - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn plateau_breaks_to_smallest_site() {
        let lattice = LatticeSpec::new(8).unwrap();
        // Symmetric two-site state: argmax must pick the smaller index.
        let mut amps = vec![Spinor::default(); 8];
        amps[2].plus = C64::ONE;
        amps[5].plus = C64::ONE;
        let state = StateVector::normalized(lattice, amps).unwrap();
        let diag = track_packet(&[state], &[]).unwrap();
        assert_eq!(diag.peak_positions[0], 2);
    }

    #[test]
    fn spec_validation() {
        let lattice = LatticeSpec::new(16).unwrap();
        let p = params();
        assert!(matches!(
            wave_packet(&WavePacketSpec::new(0.0, 0, 3), &p, lattice),
            Err(PacketError::OddWidth(3))
        ));
        assert!(matches!(
            wave_packet(&WavePacketSpec::new(0.0, 0, 18), &p, lattice),
            Err(PacketError::WidthExceedsLattice { .. })
        ));
        assert!(matches!(
            wave_packet(&WavePacketSpec::new(0.0, 16, 2), &p, lattice),
            Err(PacketError::CenterOutOfRange { .. })
        ));
        assert!(matches!(
            track_packet(&[], &[]),
            Err(PacketError::EmptyTrajectory)
        ));
    }
}
