//! Domain types and the exact unitary time step: rule construction from
//! `(theta, rho)`, site-dependent phase potentials, advection-scattering
//! evolution, norms and probabilities.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64 as C64;
use thiserror::Error;

/// Errors from state and potential construction or evolution.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatticeError {
    #[error("lattice needs at least 2 sites, got {0}")]
    TooSmall(usize),
    #[error("length mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("entries must be finite")]
    NonFinite,
    #[error("cannot normalize a state with zero norm")]
    ZeroNorm,
    #[error("site {site} out of range for lattice of {sites} sites")]
    SiteOutOfRange { site: usize, sites: usize },
}

/// A periodic one-dimensional lattice of `N >= 2` sites, indexed mod `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeSpec {
    sites: usize,
}

impl LatticeSpec {
    pub fn new(sites: usize) -> Result<Self, LatticeError> {
        if sites < 2 {
            return Err(LatticeError::TooSmall(sites));
        }
        Ok(Self { sites })
    }

    #[inline]
    pub fn sites(&self) -> usize {
        self.sites
    }

    /// Reduce a possibly-negative index to the fundamental domain `0..N`.
    #[inline]
    pub fn wrap(&self, x: i64) -> usize {
        let n = self.sites as i64;
        x.rem_euclid(n) as usize
    }
}

/// Velocity label of a position-basis state: which way the amplitude moves
/// during advection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Velocity {
    Left,
    Right,
}

/// The two rule angles, in radians.  Any finite reals are valid; the
/// canonical reporting range is `[-pi, pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuleParams {
    pub theta: f64,
    pub rho: f64,
}

impl RuleParams {
    pub fn new(theta: f64, rho: f64) -> Self {
        Self { theta, rho }
    }
}

/// A 2x2 complex matrix in row-major layout, acting on [`Spinor`]s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub e: [[C64; 2]; 2],
}

impl Mat2 {
    pub const fn new(e: [[C64; 2]; 2]) -> Self {
        Self { e }
    }

    pub fn zero() -> Self {
        Self::new([[C64::ZERO; 2]; 2])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        m.e[0][0] = C64::ONE;
        m.e[1][1] = C64::ONE;
        m
    }

    pub fn adjoint(&self) -> Self {
        Self::new([
            [self.e[0][0].conj(), self.e[1][0].conj()],
            [self.e[0][1].conj(), self.e[1][1].conj()],
        ])
    }

    pub fn mul(&self, rhs: &Mat2) -> Self {
        let mut out = Self::zero();
        for i in 0..2 {
            for j in 0..2 {
                out.e[i][j] = self.e[i][0] * rhs.e[0][j] + self.e[i][1] * rhs.e[1][j];
            }
        }
        out
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut out = *self;
        for row in out.e.iter_mut() {
            for v in row.iter_mut() {
                *v *= c;
            }
        }
        out
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.e
            .iter()
            .flatten()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, s: Spinor) -> Spinor {
        Spinor {
            minus: self.e[0][0] * s.minus + self.e[0][1] * s.plus,
            plus: self.e[1][0] * s.minus + self.e[1][1] * s.plus,
        }
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let mut out = self;
        for i in 0..2 {
            for j in 0..2 {
                out.e[i][j] += rhs.e[i][j];
            }
        }
        out
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        let mut out = self;
        for i in 0..2 {
            for j in 0..2 {
                out.e[i][j] -= rhs.e[i][j];
            }
        }
        out
    }
}

/// The three local scattering matrices.  `w_minus` feeds amplitude arriving
/// from site `x-1`, `w_zero` the amplitude staying at `x`, `w_plus` the
/// amplitude arriving from `x+1`.
///
/// A valid rule satisfies the unitarity triplet
/// `w-.w-^ + w0.w0^ + w+.w+^ = I`, `w0.w-^ + w+.w0^ = 0`, `w+.w-^ = 0`
/// (and the Hermitian conjugates), which makes the global evolution unitary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalRule {
    pub w_minus: Mat2,
    pub w_zero: Mat2,
    pub w_plus: Mat2,
}

impl LocalRule {
    /// Build the two-parameter rule.
    ///
    /// With `c = cos(theta)`, `s = sin(theta)`:
    ///
    /// ```text
    /// w- = cos(rho) [ 0  i s ]        w+ = cos(rho) [  c  0 ]
    ///               [ 0    c ]                      [ i s 0 ]
    ///
    /// w0 = sin(rho) [   s  -i c ]
    ///               [ -i c    s ]
    /// ```
    ///
    /// The result satisfies the unitarity triplet exactly up to rounding.
    /// `rho = 0` reduces to the pure advection-scattering rule with `w0 = 0`.
    pub fn new(params: &RuleParams) -> Self {
        let (st, ct) = params.theta.sin_cos();
        let (sr, cr) = params.rho.sin_cos();
        let re = |x: f64| C64::new(x, 0.0);
        let im = |x: f64| C64::new(0.0, x);
        LocalRule {
            w_minus: Mat2::new([[re(0.0), im(cr * st)], [re(0.0), re(cr * ct)]]),
            w_zero: Mat2::new([[re(sr * st), im(-sr * ct)], [im(-sr * ct), re(sr * st)]]),
            w_plus: Mat2::new([[re(cr * ct), re(0.0)], [im(cr * st), re(0.0)]]),
        }
    }

    /// Max-norm residual over the three unitarity identities and their
    /// Hermitian conjugates.  Zero (to rounding) for rules built by
    /// [`LocalRule::new`]; order one when a matrix is tampered with.
    pub fn unitarity_residual(&self) -> f64 {
        let (wm, w0, wp) = (&self.w_minus, &self.w_zero, &self.w_plus);
        let complete = wm.mul(&wm.adjoint()) + w0.mul(&w0.adjoint()) + wp.mul(&wp.adjoint())
            - Mat2::identity();
        let shift_one = w0.mul(&wm.adjoint()) + wp.mul(&w0.adjoint());
        let shift_two = wp.mul(&wm.adjoint());
        [
            complete,
            complete.adjoint(),
            shift_one,
            shift_one.adjoint(),
            shift_two,
            shift_two.adjoint(),
        ]
        .iter()
        .map(Mat2::max_abs)
        .fold(0.0, f64::max)
    }
}

/// Per-site phases `phi(x)`; site `x` multiplies its scattered amplitude by
/// `exp(-i phi(x))`, which preserves unitarity exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialProfile {
    phi: Vec<f64>,
}

impl PotentialProfile {
    pub fn new(lattice: LatticeSpec, phi: Vec<f64>) -> Result<Self, LatticeError> {
        if phi.len() != lattice.sites() {
            return Err(LatticeError::DimensionMismatch {
                expected: lattice.sites(),
                got: phi.len(),
            });
        }
        if !phi.iter().all(|p| p.is_finite()) {
            return Err(LatticeError::NonFinite);
        }
        Ok(Self { phi })
    }

    /// The zero potential (homogeneous automaton).
    pub fn flat(lattice: LatticeSpec) -> Self {
        Self {
            phi: vec![0.0; lattice.sites()],
        }
    }

    /// Square well of the given depth on `floor(N/4) <= x < floor(3N/4)`,
    /// zero elsewhere.
    pub fn square_well(lattice: LatticeSpec, depth: f64) -> Self {
        let n = lattice.sites();
        let (lo, hi) = (n / 4, 3 * n / 4);
        let phi = (0..n)
            .map(|x| if lo <= x && x < hi { depth } else { 0.0 })
            .collect();
        Self { phi }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    #[inline]
    pub fn phi(&self, x: usize) -> f64 {
        self.phi[x]
    }

    /// The multiplier `exp(-i phi(x))`.
    #[inline]
    pub fn phase(&self, x: usize) -> C64 {
        C64::from_polar(1.0, -self.phi[x])
    }

    pub fn values(&self) -> &[f64] {
        &self.phi
    }
}

/// Two-component amplitude at one site; `minus` is the left mover, `plus`
/// the right mover.  The component order matches the rule matrices, so the
/// `theta = rho = 0` rule advects a pure `plus` state one site rightward.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Spinor {
    pub minus: C64,
    pub plus: C64,
}

impl Spinor {
    pub fn new(minus: C64, plus: C64) -> Self {
        Self { minus, plus }
    }

    #[inline]
    pub fn norm_sqr(&self) -> f64 {
        self.minus.norm_sqr() + self.plus.norm_sqr()
    }

    pub fn is_finite(&self) -> bool {
        self.minus.is_finite() && self.plus.is_finite()
    }
}

impl Add for Spinor {
    type Output = Spinor;
    fn add(self, rhs: Spinor) -> Spinor {
        Spinor::new(self.minus + rhs.minus, self.plus + rhs.plus)
    }
}

impl Mul<C64> for Spinor {
    type Output = Spinor;
    fn mul(self, rhs: C64) -> Spinor {
        Spinor::new(self.minus * rhs, self.plus * rhs)
    }
}

/// The full automaton state: one [`Spinor`] per site, unit global norm.
///
/// Public constructors normalize; the evolution never renormalizes, so norm
/// preservation is a tested guarantee of the rule rather than an enforced
/// side effect.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    lattice: LatticeSpec,
    amps: Vec<Spinor>,
}

impl StateVector {
    /// Build a unit-norm state from raw amplitudes, rescaling as needed.
    pub fn normalized(lattice: LatticeSpec, amps: Vec<Spinor>) -> Result<Self, LatticeError> {
        if amps.len() != lattice.sites() {
            return Err(LatticeError::DimensionMismatch {
                expected: lattice.sites(),
                got: amps.len(),
            });
        }
        if !amps.iter().all(Spinor::is_finite) {
            return Err(LatticeError::NonFinite);
        }
        let norm_sqr: f64 = amps.iter().map(Spinor::norm_sqr).sum();
        if norm_sqr <= 0.0 {
            return Err(LatticeError::ZeroNorm);
        }
        let scale = C64::new(1.0 / norm_sqr.sqrt(), 0.0);
        let amps = amps.into_iter().map(|a| a * scale).collect();
        Ok(Self { lattice, amps })
    }

    /// The classical basis state: the particle at `site` with the given
    /// velocity label.
    pub fn basis(
        lattice: LatticeSpec,
        site: usize,
        velocity: Velocity,
    ) -> Result<Self, LatticeError> {
        if site >= lattice.sites() {
            return Err(LatticeError::SiteOutOfRange {
                site,
                sites: lattice.sites(),
            });
        }
        let mut amps = vec![Spinor::default(); lattice.sites()];
        match velocity {
            Velocity::Left => amps[site].minus = C64::ONE,
            Velocity::Right => amps[site].plus = C64::ONE,
        }
        Ok(Self { lattice, amps })
    }

    /// Internal constructor for amplitudes that are already correctly
    /// normalized (evolution output, analytic eigenstates).
    pub(crate) fn from_raw(lattice: LatticeSpec, amps: Vec<Spinor>) -> Self {
        debug_assert_eq!(amps.len(), lattice.sites());
        Self { lattice, amps }
    }

    #[inline]
    pub fn lattice(&self) -> LatticeSpec {
        self.lattice
    }

    #[inline]
    pub fn amp(&self, x: usize) -> Spinor {
        self.amps[x]
    }

    pub fn amps(&self) -> &[Spinor] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps
            .iter()
            .map(Spinor::norm_sqr)
            .sum::<f64>()
            .sqrt()
    }

    /// Per-site probability `|psi_-(x)|^2 + |psi_+(x)|^2`; sums to the
    /// squared norm.
    pub fn probability_density(&self) -> Vec<f64> {
        self.amps.iter().map(Spinor::norm_sqr).collect()
    }

    /// The shifted state `psi'(x) = psi(x + delta mod N)`.
    pub fn translated(&self, delta: i64) -> StateVector {
        let n = self.lattice.sites();
        let amps = (0..n)
            .map(|x| self.amps[self.lattice.wrap(x as i64 + delta)])
            .collect();
        StateVector::from_raw(self.lattice, amps)
    }

    /// Inner product `<self|other>`.
    pub fn dot(&self, other: &StateVector) -> C64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.minus.conj() * b.minus + a.plus.conj() * b.plus)
            .sum()
    }

    /// Euclidean distance to another state.
    pub fn distance(&self, other: &StateVector) -> f64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| (a.minus - b.minus).norm_sqr() + (a.plus - b.plus).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// One time step: scatter each site's neighborhood through the rule, then
/// apply the destination-site phase,
/// `psi'(x) = exp(-i phi(x)) [w- psi(x-1) + w0 psi(x) + w+ psi(x+1)]`
/// with periodic indexing.  Norm-preserving for rules satisfying the
/// unitarity triplet.
pub fn step(
    state: &StateVector,
    rule: &LocalRule,
    potential: &PotentialProfile,
) -> Result<StateVector, LatticeError> {
    let n = state.lattice().sites();
    if potential.len() != n {
        return Err(LatticeError::DimensionMismatch {
            expected: n,
            got: potential.len(),
        });
    }
    debug_assert!(
        rule.unitarity_residual() <= 1e-10,
        "rule violates unitarity"
    );
    let amps = (0..n)
        .map(|x| {
            let prev = state.amp(if x == 0 { n - 1 } else { x - 1 });
            let here = state.amp(x);
            let next = state.amp(if x + 1 == n { 0 } else { x + 1 });
            let scattered =
                rule.w_minus.apply(prev) + rule.w_zero.apply(here) + rule.w_plus.apply(next);
            scattered * potential.phase(x)
        })
        .collect();
    Ok(StateVector::from_raw(state.lattice(), amps))
}

/// Iterate [`step`] `steps` times, returning the full trajectory including
/// the initial state (`steps + 1` entries).
pub fn evolve(
    state: &StateVector,
    rule: &LocalRule,
    potential: &PotentialProfile,
    steps: usize,
) -> Result<Vec<StateVector>, LatticeError> {
    let mut trajectory = Vec::with_capacity(steps + 1);
    trajectory.push(state.clone());
    for _ in 0..steps {
        let next = step(trajectory.last().unwrap(), rule, potential)?;
        trajectory.push(next);
    }
    Ok(trajectory)
}
