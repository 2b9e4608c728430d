//! Closed-form plane-wave theory: the transfer matrix `D(k)`, the exact
//! dispersion relation and its derived quantities, plane-wave eigenstates,
//! and the transform to the conserved `(k, branch)` basis.
//!
//! A homogeneous rule commutes with translation, so its eigenstates are
//! plane waves `psi(x) = chi e^{ikx}` with `k = 2 pi n / N`.  The spinor
//! `chi` is an eigenvector of the 2x2 unitary
//! `D(k) = e^{-ik} w- + w0 + e^{ik} w+`, whose eigenvalues `e^{-i eps w}`
//! give the two frequency branches of
//! `cos w = cos k cos theta cos rho + sin theta sin rho`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::lattice::{LatticeSpec, LocalRule, Mat2, RuleParams, Spinor, StateVector};

/// Below this value of `sin(omega)` the two branches of `D(k)` are treated
/// as degenerate and canonical spinors are returned.
const DEGENERATE_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("wave index {n} out of range for lattice of {sites} sites")]
    IndexOutOfRange { n: usize, sites: usize },
    #[error("group velocity is singular at the band edge k = {k}")]
    BandEdge { k: f64 },
    #[error("spectrum built for {expected} sites, lattice has {got}")]
    SiteMismatch { expected: usize, got: usize },
}

/// Frequency-branch label; `Plus` is the branch with eigenvalue
/// `e^{-i omega_k}` (right-moving for `cos theta cos rho > 0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub const ALL: [Branch; 2] = [Branch::Plus, Branch::Minus];

    #[inline]
    pub fn sign(&self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    #[inline]
    pub(crate) fn index(&self) -> usize {
        match self {
            Branch::Plus => 0,
            Branch::Minus => 1,
        }
    }
}

/// A plane-wave label: wave number `k = 2 pi n / N` plus branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlaneWaveIndex {
    pub n: usize,
    pub branch: Branch,
}

impl PlaneWaveIndex {
    pub fn new(n: usize, branch: Branch) -> Self {
        Self { n, branch }
    }

    pub fn wave_number(&self, lattice: LatticeSpec) -> f64 {
        2.0 * PI * self.n as f64 / lattice.sites() as f64
    }
}

/// One point of the dispersion relation, principal branch `omega in [0, pi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionPoint {
    pub k: f64,
    pub omega: f64,
}

impl DispersionPoint {
    pub fn at(k: f64, params: &RuleParams) -> Self {
        Self {
            k,
            omega: dispersion_omega(k, params),
        }
    }

    /// Defect of the dispersion identity at this point.
    pub fn residual(&self, params: &RuleParams) -> f64 {
        let rhs = self.k.cos() * params.theta.cos() * params.rho.cos()
            + params.theta.sin() * params.rho.sin();
        (self.omega.cos() - rhs).abs()
    }
}

/// Quadratic expansion of the squared dispersion around `k = 0`:
/// `omega^2 ~= quadratic_coeff k^2 + mass_term`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassExpansion {
    pub quadratic_coeff: f64,
    pub mass_term: f64,
}

/// The 2x2 transfer matrix `D(k) = e^{-ik} w- + w0 + e^{ik} w+`; unitary
/// for any valid rule.
pub fn transfer_matrix(k: f64, rule: &LocalRule) -> Mat2 {
    let backward = C64::from_polar(1.0, -k);
    let forward = C64::from_polar(1.0, k);
    rule.w_minus.scale(backward) + rule.w_zero + rule.w_plus.scale(forward)
}

/// Principal frequency `omega in [0, pi]` solving
/// `cos omega = cos k cos theta cos rho + sin theta sin rho`; the two
/// physical frequencies are `+-omega`.
pub fn dispersion_omega(k: f64, params: &RuleParams) -> f64 {
    let rhs = k.cos() * params.theta.cos() * params.rho.cos()
        + params.theta.sin() * params.rho.sin();
    debug_assert!(rhs.abs() <= 1.0 + 1e-12);
    rhs.clamp(-1.0, 1.0).acos()
}

/// Slope of the dispersion relation,
/// `d omega / d k = cos theta cos rho sin k / sin omega`.
///
/// At `k = 0` in the massless case (`theta = rho`) both numerator and
/// denominator vanish; the analytic limit `sqrt(cos theta cos rho)` is
/// returned.  Any other band-edge point (`sin omega = 0`) is reported as
/// [`SpectralError::BandEdge`].
pub fn group_velocity(k: f64, params: &RuleParams) -> Result<f64, SpectralError> {
    let quad = params.theta.cos() * params.rho.cos();
    let omega = dispersion_omega(k, params);
    let sin_omega = omega.sin();
    if sin_omega > DEGENERATE_TOL {
        return Ok(quad * k.sin() / sin_omega);
    }
    let massless = (params.theta - params.rho).cos() >= 1.0 - 1e-12;
    if massless && k.sin().abs() <= DEGENERATE_TOL && k.cos() > 0.0 {
        return Ok(quad.max(0.0).sqrt());
    }
    Err(SpectralError::BandEdge { k })
}

/// Coefficients of the small-`k` expansion
/// `omega^2 = k^2 cos theta cos rho + 2 (1 - cos(theta - rho))`.
/// The constant term vanishes exactly when `theta = rho` (massless case).
pub fn continuum_mass_term(params: &RuleParams) -> MassExpansion {
    MassExpansion {
        quadratic_coeff: params.theta.cos() * params.rho.cos(),
        mass_term: 2.0 * (1.0 - (params.theta - params.rho).cos()),
    }
}

/// Unit-norm eigenspinor of `D(k)` for the eigenvalue `e^{-i eps omega_k}`,
/// gauged so its first component of modulus above 1e-9 is real positive.
///
/// When the two branches collide (`omega_k` at 0 or pi, where `D(k)` is a
/// scalar), the deterministic choice is the right-mover `(0, 1)` for
/// `Plus` and the left-mover `(1, 0)` for `Minus`.
pub fn branch_spinor(k: f64, branch: Branch, params: &RuleParams) -> Spinor {
    let omega = dispersion_omega(k, params);
    let sin_omega = omega.sin();
    if sin_omega <= DEGENERATE_TOL {
        return match branch {
            Branch::Plus => Spinor::new(C64::ZERO, C64::ONE),
            Branch::Minus => Spinor::new(C64::ONE, C64::ZERO),
        };
    }
    let lambda = C64::new(omega.cos(), -branch.sign() * sin_omega);
    let d = transfer_matrix(k, &LocalRule::new(params));
    // Rows of (D - lambda I) annihilate the eigenvector; take whichever
    // candidate is better conditioned.
    let from_top = Spinor::new(d.e[0][1], lambda - d.e[0][0]);
    let from_bottom = Spinor::new(lambda - d.e[1][1], d.e[1][0]);
    let raw = if from_top.norm_sqr() >= from_bottom.norm_sqr() {
        from_top
    } else {
        from_bottom
    };
    let scale = C64::new(1.0 / raw.norm_sqr().sqrt(), 0.0);
    let unit = raw * scale;
    let lead = if unit.minus.norm() > 1e-9 {
        unit.minus
    } else {
        unit.plus
    };
    unit * (lead.conj() / lead.norm())
}

/// The unit-norm plane wave `sum_x chi e^{ikx} |x> / sqrt(N)`; an exact
/// eigenstate of the homogeneous evolution with eigenvalue
/// `e^{-i eps omega_k}`.
pub fn plane_wave(
    index: PlaneWaveIndex,
    params: &RuleParams,
    lattice: LatticeSpec,
) -> Result<StateVector, SpectralError> {
    let n_sites = lattice.sites();
    if index.n >= n_sites {
        return Err(SpectralError::IndexOutOfRange {
            n: index.n,
            sites: n_sites,
        });
    }
    let k = index.wave_number(lattice);
    let chi = branch_spinor(k, index.branch, params);
    let scale = 1.0 / (n_sites as f64).sqrt();
    let amps = (0..n_sites)
        .map(|x| chi * C64::from_polar(scale, k * x as f64))
        .collect();
    Ok(StateVector::from_raw(lattice, amps))
}

/// Amplitudes of a state in the conserved plane-wave basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSpectrum {
    sites: usize,
    amps: Vec<[C64; 2]>,
}

impl FourierSpectrum {
    pub(crate) fn from_amps(sites: usize, amps: Vec<[C64; 2]>) -> Self {
        debug_assert_eq!(amps.len(), sites);
        Self { sites, amps }
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    /// Amplitude of the `(n, branch)` mode.
    pub fn amp(&self, n: usize, branch: Branch) -> C64 {
        self.amps[n][branch.index()]
    }

    /// `sum |amp|^2`; equals 1 for unit-norm inputs (Parseval).
    pub fn total_probability(&self) -> f64 {
        self.amps
            .iter()
            .flatten()
            .map(|a| a.norm_sqr())
            .sum()
    }

    /// Probability split by sign of the mode group velocity:
    /// `(left, right, stationary)`.  A mode moves with `eps * sin k`
    /// for `cos theta cos rho > 0`; `sin k = 0` modes are stationary.
    pub fn directional_probabilities(&self) -> (f64, f64, f64) {
        let (mut left, mut right, mut still) = (0.0, 0.0, 0.0);
        for (n, pair) in self.amps.iter().enumerate() {
            let sin_k = (2.0 * PI * n as f64 / self.sites as f64).sin();
            for branch in Branch::ALL {
                let p = pair[branch.index()].norm_sqr();
                let direction = branch.sign() * sin_k;
                if direction.abs() < 1e-12 {
                    still += p;
                } else if direction > 0.0 {
                    right += p;
                } else {
                    left += p;
                }
            }
        }
        (left, right, still)
    }

    /// Rebuild the position-space state `sum_{k,eps} amp |k,eps>`.
    pub fn reconstruct(
        &self,
        params: &RuleParams,
        lattice: LatticeSpec,
    ) -> Result<StateVector, SpectralError> {
        let n_sites = lattice.sites();
        if n_sites != self.sites {
            return Err(SpectralError::SiteMismatch {
                expected: self.sites,
                got: n_sites,
            });
        }
        let scale = 1.0 / (n_sites as f64).sqrt();
        let mut amps = vec![Spinor::default(); n_sites];
        for n in 0..n_sites {
            let k = 2.0 * PI * n as f64 / n_sites as f64;
            for branch in Branch::ALL {
                let coeff = self.amp(n, branch);
                if coeff == C64::ZERO {
                    continue;
                }
                let chi = branch_spinor(k, branch, params);
                for (x, amp) in amps.iter_mut().enumerate() {
                    *amp = *amp + chi * (coeff * C64::from_polar(scale, k * x as f64));
                }
            }
        }
        Ok(StateVector::from_raw(lattice, amps))
    }
}

/// Project a state onto the plane-wave basis:
/// `amp(n, eps) = chi^dagger . sum_x psi(x) e^{-ikx} / sqrt(N)`.
///
/// For unit-norm input the squared amplitudes sum to 1 and are conserved by
/// the homogeneous evolution.
pub fn fourier_amplitudes(state: &StateVector, params: &RuleParams) -> FourierSpectrum {
    let n_sites = state.lattice().sites();
    let scale = 1.0 / (n_sites as f64).sqrt();
    let mut amps = Vec::with_capacity(n_sites);
    for n in 0..n_sites {
        let k = 2.0 * PI * n as f64 / n_sites as f64;
        let mut fourier = Spinor::default();
        for x in 0..n_sites {
            fourier = fourier + state.amp(x) * C64::from_polar(scale, -k * x as f64);
        }
        let mut pair = [C64::ZERO; 2];
        for branch in Branch::ALL {
            let chi = branch_spinor(k, branch, params);
            pair[branch.index()] =
                chi.minus.conj() * fourier.minus + chi.plus.conj() * fourier.plus;
        }
        amps.push(pair);
    }
    FourierSpectrum::from_amps(n_sites, amps)
}

/// The closed-form eigenfrequency multiset `{+-omega_k : k = 2 pi n / N}`
/// of the homogeneous evolution operator, mapped to `(-pi, pi]` and sorted
/// ascending (`2N` values).
pub fn homogeneous_spectrum(params: &RuleParams, lattice: LatticeSpec) -> Vec<f64> {
    let n_sites = lattice.sites();
    let mut omegas = Vec::with_capacity(2 * n_sites);
    for n in 0..n_sites {
        let k = 2.0 * PI * n as f64 / n_sites as f64;
        let omega = dispersion_omega(k, params);
        omegas.push(omega);
        // -pi is folded onto +pi so the branch cut stays single-valued.
        omegas.push(if omega >= PI { PI } else { -omega });
    }
    omegas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    omegas
}
