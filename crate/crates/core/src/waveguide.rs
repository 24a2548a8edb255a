//! Light propagation on a ring of evanescently coupled waveguides.
//!
//! The ring Hamiltonian `H = γ(V + V†)` is a circulant, so the DFT
//! diagonalizes it with mode constants `ω_j = 2γ cos(2πj/sites)`. Four
//! routes compute the same evolution `E(z) = exp(-izH) E(0)`:
//!
//! * `spectral`: exact exponential through the known diagonalization;
//! * `bessel`: the two-sided series `sum_n i^n J_n(-2γz) V^n`, truncated;
//! * `folded`: the same series folded onto the ring's `sites` residue
//!   classes, giving exactly `sites` coefficients;
//! * `ode`: fixed-step Runge-Kutta on the literal coupled-mode equations,
//!   deliberately ignorant of the operator algebra.
//!
//! The first three are analytic and must agree to rounding; the integrator
//! is the independent referee. A fidelity scan over z locates self-imaging
//! points, which exist only when the mode constants are commensurate.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::bessel;
use crate::error::{Error, Result};
use crate::linalg::{conjugate_by_unitary, FieldState, Operator};
use crate::phase::{dft, lsg_shift_operator, HilbertDim};

/// Ring of `sites` identical guides with nearest-neighbor coupling `gamma`.
///
/// Two sites are allowed: there the single neighbor is reached both ways
/// around the ring, so the coupling doubles and `H = 2γ·swap`. One site
/// would couple a guide to itself, which the model does not describe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingLattice {
    sites: usize,
    gamma: f64,
}

impl RingLattice {
    pub fn new(sites: usize, gamma: f64) -> Result<Self> {
        if sites < 2 {
            return Err(Error::TooFewSites { sites });
        }
        if !gamma.is_finite() || gamma <= 0.0 {
            return Err(Error::InvalidCoupling { gamma });
        }
        Ok(RingLattice { sites, gamma })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    fn hilbert(&self) -> HilbertDim {
        HilbertDim::from_dim(self.sites).expect("sites >= 2")
    }

    /// Mode constants ω_j = 2γ cos(2πj/sites), the circulant spectrum of H.
    fn mode_constants(&self) -> Vec<f64> {
        let m = self.sites as f64;
        (0..self.sites)
            .map(|j| 2.0 * self.gamma * (2.0 * PI * j as f64 / m).cos())
            .collect()
    }
}

/// How a trace or a single propagation step is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Spectral,
    Bessel,
    Folded,
    Ode,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spectral" => Ok(Method::Spectral),
            "bessel" => Ok(Method::Bessel),
            "folded" => Ok(Method::Folded),
            "ode" => Ok(Method::Ode),
            other => Err(Error::UnknownMethod(other.to_string())),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Method::Spectral => "spectral",
            Method::Bessel => "bessel",
            Method::Folded => "folded",
            Method::Ode => "ode",
        };
        f.write_str(name)
    }
}

/// Uniform sampling plan: `samples` points from 0 to `z_max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationPlan {
    z_max: f64,
    samples: usize,
    method: Method,
}

impl PropagationPlan {
    pub fn new(z_max: f64, samples: usize, method: Method) -> Result<Self> {
        if !z_max.is_finite() || z_max < 0.0 {
            return Err(Error::InvalidDistance { z_max });
        }
        if samples < 2 {
            return Err(Error::TooFewSamples { samples });
        }
        Ok(PropagationPlan {
            z_max,
            samples,
            method,
        })
    }

    pub fn z_max(&self) -> f64 {
        self.z_max
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn method(&self) -> Method {
        self.method
    }

    /// Closed uniform grid; the last point is exactly `z_max`. For
    /// `z_max = 0` every sample sits at zero and every trace row repeats
    /// the input pattern.
    pub fn z_grid(&self) -> Vec<f64> {
        let n = self.samples;
        (0..n)
            .map(|i| self.z_max * i as f64 / (n - 1) as f64)
            .collect()
    }
}

/// Sampled propagation record: one row per grid point.
#[derive(Debug, Clone)]
pub struct IntensityTrace {
    z_values: Vec<f64>,
    intensities: Vec<Vec<f64>>,
    amplitudes: Option<Vec<Vec<Complex64>>>,
}

impl IntensityTrace {
    fn from_amplitude_rows(z_values: Vec<f64>, rows: Vec<Vec<Complex64>>) -> Self {
        let intensities = rows
            .iter()
            .map(|row| row.iter().map(|a| a.norm_sqr()).collect())
            .collect();
        IntensityTrace {
            z_values,
            intensities,
            amplitudes: Some(rows),
        }
    }

    pub fn z_values(&self) -> &[f64] {
        &self.z_values
    }

    pub fn intensities(&self) -> &[Vec<f64>] {
        &self.intensities
    }

    pub fn amplitudes(&self) -> Option<&[Vec<Complex64>]> {
        self.amplitudes.as_deref()
    }

    pub fn samples(&self) -> usize {
        self.z_values.len()
    }

    pub fn sites(&self) -> usize {
        self.intensities.first().map_or(0, Vec::len)
    }

    /// Total power of each row; constant along the trace up to the
    /// producing method's accuracy.
    pub fn row_powers(&self) -> Vec<f64> {
        self.intensities
            .iter()
            .map(|row| row.iter().sum())
            .collect()
    }
}

/// The ring-folded series coefficients G_0..G_{sites-1}: the two-sided
/// series `sum_n i^n J_n(-2γz) V^n` collapsed onto the residue classes of
/// n mod sites, so that `sum_r G_r V^r` is the full propagator.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldedCoefficients {
    g: Vec<Complex64>,
}

impl FoldedCoefficients {
    pub fn coefficients(&self) -> &[Complex64] {
        &self.g
    }

    pub fn len(&self) -> usize {
        self.g.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g.is_empty()
    }

    /// `sum_r G_r V^r e0`, applying the cyclic shift literally.
    pub fn apply(&self, e0: &FieldState) -> Result<FieldState> {
        if e0.dim() != self.g.len() {
            return Err(Error::DimensionMismatch {
                left: self.g.len(),
                right: e0.dim(),
            });
        }
        let mut acc: Vec<Complex64> = e0.amplitudes().iter().map(|a| a * self.g[0]).collect();
        let mut power = e0.amplitudes().to_vec();
        for coeff in &self.g[1..] {
            power = shift_fwd(&power);
            for (dst, src) in acc.iter_mut().zip(&power) {
                *dst += coeff * src;
            }
        }
        Ok(FieldState::new(acc))
    }
}

/// A self-imaging point: the fidelity peak position and its height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Revival {
    pub z: f64,
    pub fidelity: f64,
}

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn i_pow(n: i64) -> Complex64 {
    match n.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Action of the cyclic shift: (V v)[n] = v[(n+1) mod m].
fn shift_fwd(v: &[Complex64]) -> Vec<Complex64> {
    let m = v.len();
    (0..m).map(|n| v[(n + 1) % m]).collect()
}

/// Action of its adjoint: (V† v)[n] = v[(n-1) mod m].
fn shift_back(v: &[Complex64]) -> Vec<Complex64> {
    let m = v.len();
    (0..m).map(|n| v[(n + m - 1) % m]).collect()
}

/// H = γ(V + V†), assembled literally from the shift and its adjoint.
/// Real symmetric, hence exactly Hermitian. For two sites the two terms
/// land on the same entries and the coupling doubles.
pub fn hamiltonian(lat: &RingLattice) -> Operator {
    let v = lsg_shift_operator(lat.hilbert());
    let sum = v.add(&v.adjoint()).expect("same dimension");
    sum.scaled(Complex64::new(lat.gamma(), 0.0))
}

/// exp(-izH) through the circulant diagonalization: unitary for every z,
/// the identity at z = 0, and a semigroup in z.
pub fn propagator_spectral(lat: &RingLattice, z: f64) -> Operator {
    assert!(z.is_finite(), "propagation distance must be finite");
    let phases: Vec<Complex64> = lat
        .mode_constants()
        .iter()
        .map(|w| Complex64::cis(-z * w))
        .collect();
    conjugate_by_unitary(&dft(lat.hilbert()), &phases).expect("matched dimensions")
}

/// Truncated two-sided series `sum_{|n| <= trunc} i^n J_n(-2γz) V^n e0`,
/// with `V^{-n} = (V†)^n` and successive powers applied literally. Matches
/// the spectral route once `trunc >= ceil(2γz) + 40`, where the neglected
/// Bessel tail is below rounding.
pub fn propagate_bessel(
    lat: &RingLattice,
    z: f64,
    e0: &FieldState,
    trunc: usize,
) -> Result<FieldState> {
    assert!(z.is_finite(), "propagation distance must be finite");
    if e0.dim() != lat.sites() {
        return Err(Error::DimensionMismatch {
            left: lat.sites(),
            right: e0.dim(),
        });
    }
    let x = -2.0 * lat.gamma() * z;
    let js = bessel::bessel_j_sequence(trunc, x)?;
    let mut acc: Vec<Complex64> = e0.amplitudes().iter().map(|a| a * js[0]).collect();
    let mut fwd = e0.amplitudes().to_vec();
    let mut bwd = fwd.clone();
    for (n, &jn) in js.iter().enumerate().skip(1) {
        fwd = shift_fwd(&fwd);
        bwd = shift_back(&bwd);
        let plus = i_pow(n as i64) * jn;
        // J_{-n}(x) = (-1)^n J_n(x)
        let parity = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
        let minus = i_pow(-(n as i64)) * (parity * jn);
        for (a, (f, b)) in acc.iter_mut().zip(fwd.iter().zip(&bwd)) {
            *a += plus * f + minus * b;
        }
    }
    Ok(FieldState::new(acc))
}

/// Folds both branches of the series onto residue classes mod `sites`:
/// positive orders fall into class `n mod sites` directly, negative orders
/// through `V^{-n} = V^{sites - (n mod sites)}`. Each class sum is extended
/// past the Bessel turning point until its terms drop below 1e-16, so the
/// result carries the full series, not a capped piece of it.
pub fn folded_coefficients(lat: &RingLattice, z: f64) -> FoldedCoefficients {
    assert!(z.is_finite(), "propagation distance must be finite");
    let m = lat.sites();
    let x = -2.0 * lat.gamma() * z;
    let ax = x.abs();
    let cap = ax.ceil() as usize + 60 + m;
    let js = bessel::bessel_j_sequence(cap, x)
        .expect("argument is finite and the order cap is moderate");

    let mut g = vec![czero(); m];
    for (r, slot) in g.iter_mut().enumerate() {
        // orders n = r, r+m, r+2m, ...
        let mut n = r;
        while n <= cap {
            let term = js[n];
            *slot += i_pow(n as i64) * term;
            if n as f64 > ax && term.abs() < 1e-16 {
                break;
            }
            n += m;
        }
        // orders n = r-m, r-2m, ...: |n| runs m-r, 2m-r, ...
        let mut a = m - r;
        while a <= cap {
            let term = js[a];
            let parity = if a.is_multiple_of(2) { 1.0 } else { -1.0 };
            *slot += i_pow(-(a as i64)) * (parity * term);
            if a as f64 > ax && term.abs() < 1e-16 {
                break;
            }
            a += m;
        }
    }
    FoldedCoefficients { g }
}

fn derivative(gamma: f64, amps: &[Complex64], out: &mut [Complex64]) {
    let m = amps.len();
    let minus_i_gamma = Complex64::new(0.0, -gamma);
    for n in 0..m {
        let left = amps[(n + m - 1) % m];
        let right = amps[(n + 1) % m];
        out[n] = minus_i_gamma * (left + right);
    }
}

struct Rk4Buffers {
    k1: Vec<Complex64>,
    k2: Vec<Complex64>,
    k3: Vec<Complex64>,
    k4: Vec<Complex64>,
    tmp: Vec<Complex64>,
}

impl Rk4Buffers {
    fn new(m: usize) -> Self {
        let zeros = vec![czero(); m];
        Rk4Buffers {
            k1: zeros.clone(),
            k2: zeros.clone(),
            k3: zeros.clone(),
            k4: zeros.clone(),
            tmp: zeros,
        }
    }
}

// Index loops here run in lockstep over five same-length buffers; nested
// zips would obscure the classic four-stage update.
#[allow(clippy::needless_range_loop)]
fn rk4_step(gamma: f64, y: &mut [Complex64], h: f64, b: &mut Rk4Buffers) {
    derivative(gamma, y, &mut b.k1);
    for i in 0..y.len() {
        b.tmp[i] = y[i] + b.k1[i] * (0.5 * h);
    }
    derivative(gamma, &b.tmp, &mut b.k2);
    for i in 0..y.len() {
        b.tmp[i] = y[i] + b.k2[i] * (0.5 * h);
    }
    derivative(gamma, &b.tmp, &mut b.k3);
    for i in 0..y.len() {
        b.tmp[i] = y[i] + b.k3[i] * h;
    }
    derivative(gamma, &b.tmp, &mut b.k4);
    let sixth = h / 6.0;
    for i in 0..y.len() {
        y[i] += (b.k1[i] + (b.k2[i] + b.k3[i]) * 2.0 + b.k4[i]) * sixth;
    }
}

/// Fixed-step Runge-Kutta integration of the literal coupled-mode system
/// `dE_n/dz = -iγ(E_{n-1} + E_{n+1})` with ring closure through the index
/// arithmetic, never through the operator algebra. This is the referee the
/// analytic routes are checked against. The grid must be non-decreasing
/// and start at 0; the step is capped at 0.01/γ for accuracy, not
/// stability (the scheme is stable well beyond it).
pub fn propagate_ode(
    lat: &RingLattice,
    z_grid: &[f64],
    e0: &FieldState,
    step: f64,
) -> Result<IntensityTrace> {
    if e0.dim() != lat.sites() {
        return Err(Error::DimensionMismatch {
            left: lat.sites(),
            right: e0.dim(),
        });
    }
    if !step.is_finite() || step <= 0.0 {
        return Err(Error::InvalidStep { step });
    }
    let max_step = 0.01 / lat.gamma();
    if step > max_step {
        return Err(Error::StepTooLarge {
            step,
            max: max_step,
        });
    }
    let grid_ok = !z_grid.is_empty()
        && z_grid[0] == 0.0
        && z_grid.iter().all(|z| z.is_finite())
        && z_grid.windows(2).all(|w| w[0] <= w[1]);
    if !grid_ok {
        return Err(Error::InvalidGrid);
    }

    let gamma = lat.gamma();
    let mut y = e0.amplitudes().to_vec();
    let mut buffers = Rk4Buffers::new(y.len());
    let mut rows = Vec::with_capacity(z_grid.len());
    let mut z_now = 0.0;
    for &target in z_grid {
        let span = target - z_now;
        if span > 0.0 {
            let n_steps = (span / step).ceil().max(1.0) as usize;
            let h = span / n_steps as f64;
            for _ in 0..n_steps {
                rk4_step(gamma, &mut y, h, &mut buffers);
            }
        }
        z_now = target;
        rows.push(y.clone());
    }
    Ok(IntensityTrace::from_amplitude_rows(z_grid.to_vec(), rows))
}

/// Per-sample engine for the three analytic methods. The spectral variant
/// carries the DFT and the phase-basis coefficients of the input so each
/// row costs one matrix-vector product; rows are independent, which is what
/// makes parallel sampling safe and order-insensitive.
enum AnalyticEngine<'a> {
    Spectral {
        basis: Operator,
        coeffs: Vec<Complex64>,
        omegas: Vec<f64>,
    },
    Bessel {
        lat: &'a RingLattice,
        e0: &'a FieldState,
    },
    Folded {
        lat: &'a RingLattice,
        e0: &'a FieldState,
    },
}

impl AnalyticEngine<'_> {
    fn row(&self, z: f64) -> Vec<Complex64> {
        match self {
            AnalyticEngine::Spectral {
                basis,
                coeffs,
                omegas,
            } => {
                let dim = basis.dim();
                let rotated: Vec<Complex64> = coeffs
                    .iter()
                    .zip(omegas)
                    .map(|(c, w)| c * Complex64::cis(-z * w))
                    .collect();
                (0..dim)
                    .map(|n| (0..dim).map(|j| basis.entry(n, j) * rotated[j]).sum())
                    .collect()
            }
            AnalyticEngine::Bessel { lat, e0 } => {
                let trunc = (2.0 * lat.gamma() * z).abs().ceil() as usize + 40;
                propagate_bessel(lat, z, e0, trunc)
                    .expect("dimensions were validated by the dispatcher")
                    .amplitudes()
                    .to_vec()
            }
            AnalyticEngine::Folded { lat, e0 } => folded_coefficients(lat, z)
                .apply(e0)
                .expect("dimensions were validated by the dispatcher")
                .amplitudes()
                .to_vec(),
        }
    }
}

fn spectral_engine<'a>(lat: &'a RingLattice, e0: &'a FieldState) -> AnalyticEngine<'a> {
    let basis = dft(lat.hilbert());
    let coeffs = basis
        .adjoint()
        .apply(e0)
        .expect("dimensions were validated by the dispatcher")
        .amplitudes()
        .to_vec();
    AnalyticEngine::Spectral {
        basis,
        coeffs,
        omegas: lat.mode_constants(),
    }
}

fn trace_impl(
    lat: &RingLattice,
    e0: &FieldState,
    plan: &PropagationPlan,
    parallel: bool,
) -> Result<IntensityTrace> {
    if e0.dim() != lat.sites() {
        return Err(Error::DimensionMismatch {
            left: lat.sites(),
            right: e0.dim(),
        });
    }
    let grid = plan.z_grid();
    if plan.method() == Method::Ode {
        // Sequential by nature: each step continues from the previous state.
        return propagate_ode(lat, &grid, e0, 0.001 / lat.gamma());
    }
    let engine = match plan.method() {
        Method::Spectral => spectral_engine(lat, e0),
        Method::Bessel => AnalyticEngine::Bessel { lat, e0 },
        Method::Folded => AnalyticEngine::Folded { lat, e0 },
        Method::Ode => unreachable!("handled above"),
    };

    let rows: Vec<Vec<Complex64>> = if parallel {
        let workers = std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
            .min(grid.len())
            .max(1);
        let chunk = grid.len().div_ceil(workers);
        let mut rows: Vec<Vec<Complex64>> = vec![Vec::new(); grid.len()];
        std::thread::scope(|scope| {
            for (row_chunk, z_chunk) in rows.chunks_mut(chunk).zip(grid.chunks(chunk)) {
                let engine = &engine;
                scope.spawn(move || {
                    for (slot, &z) in row_chunk.iter_mut().zip(z_chunk) {
                        *slot = engine.row(z);
                    }
                });
            }
        });
        rows
    } else {
        grid.iter().map(|&z| engine.row(z)).collect()
    };

    Ok(IntensityTrace::from_amplitude_rows(grid, rows))
}

/// Samples the plan's grid with its method and records both intensities and
/// amplitudes. Rows are computed independently (analytic methods) or by
/// continuing the integrator (ode), always in grid order.
pub fn intensity_trace(
    lat: &RingLattice,
    e0: &FieldState,
    plan: &PropagationPlan,
) -> Result<IntensityTrace> {
    trace_impl(lat, e0, plan, false)
}

/// Same contract as [`intensity_trace`], with analytic rows computed on
/// multiple threads. Each row is produced by the identical per-sample code,
/// so the output is bit-for-bit the same as the sequential version; the ode
/// method stays sequential.
pub fn intensity_trace_parallel(
    lat: &RingLattice,
    e0: &FieldState,
    plan: &PropagationPlan,
) -> Result<IntensityTrace> {
    trace_impl(lat, e0, plan, true)
}

/// Golden-section refinement of a bracketed maximum of `f`.
fn golden_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, width: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > width {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    (mid, f(mid))
}

/// Scans fidelity `F(z) = |<e0|E(z)>|² / (‖e0‖² ‖E(z)‖²)` over (0, z_max]
/// and returns every interior local maximum refined to better than 1e-6 in
/// z whose height exceeds `1 - tol`. The fidelity is evaluated through the
/// mode spectrum, which costs O(sites) per point and is exact, so the scan
/// is cheap regardless of the plan method used elsewhere. z = 0 is the
/// trivial self-overlap and is never reported; a peak sitting exactly at
/// z_max is not bracketed and is likewise not reported.
pub fn revival_search(
    lat: &RingLattice,
    e0: &FieldState,
    z_max: f64,
    tol: f64,
) -> Result<Vec<Revival>> {
    if e0.dim() != lat.sites() {
        return Err(Error::DimensionMismatch {
            left: lat.sites(),
            right: e0.dim(),
        });
    }
    if !z_max.is_finite() || z_max <= 0.0 {
        return Err(Error::InvalidDistance { z_max });
    }
    if !tol.is_finite() || tol <= 0.0 || tol >= 1.0 {
        return Err(Error::InvalidTolerance);
    }
    if e0.total_power() == 0.0 {
        return Err(Error::ZeroField);
    }

    let omegas = lat.mode_constants();
    let weights: Vec<f64> = dft(lat.hilbert())
        .adjoint()
        .apply(e0)?
        .amplitudes()
        .iter()
        .map(|c| c.norm_sqr())
        .collect();
    let weight_sum: f64 = weights.iter().sum();
    let fidelity = |z: f64| -> f64 {
        let overlap: Complex64 = weights
            .iter()
            .zip(&omegas)
            .map(|(w, om)| Complex64::cis(-om * z) * *w)
            .sum();
        overlap.norm_sqr() / (weight_sum * weight_sum)
    };

    // Fidelity beats at most at frequency 4γ (the spectral diameter), so
    // π/(40γ) spacing puts ~20 samples on the fastest half-period.
    let preferred = PI / (40.0 * lat.gamma());
    let n = ((z_max / preferred).ceil() as usize).max(1024);
    let dz = z_max / n as f64;
    let values: Vec<f64> = (0..=n).map(|i| fidelity(dz * i as f64)).collect();

    let mut found: Vec<Revival> = Vec::new();
    for i in 1..n {
        if values[i] >= values[i - 1] && values[i] >= values[i + 1] {
            let (z, f) = golden_max(&fidelity, dz * (i - 1) as f64, dz * (i + 1) as f64, 1e-8);
            if z <= 0.5 * dz || f <= 1.0 - tol {
                continue;
            }
            match found.last_mut() {
                Some(last) if (z - last.z).abs() < 1e-5 => {
                    if f > last.fidelity {
                        *last = Revival { z, fidelity: f };
                    }
                }
                _ => found.push(Revival { z, fidelity: f }),
            }
        }
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zr(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn six_site() -> RingLattice {
        RingLattice::new(6, 1.0).unwrap()
    }

    fn e0(sites: usize) -> FieldState {
        FieldState::basis(sites, 0).unwrap()
    }

    #[test]
    fn lattice_validation() {
        assert_eq!(
            RingLattice::new(1, 1.0).unwrap_err(),
            Error::TooFewSites { sites: 1 }
        );
        assert!(matches!(
            RingLattice::new(4, 0.0).unwrap_err(),
            Error::InvalidCoupling { .. }
        ));
        assert!(matches!(
            RingLattice::new(4, f64::NAN).unwrap_err(),
            Error::InvalidCoupling { .. }
        ));
        assert!(RingLattice::new(2, 0.5).is_ok());
    }

    #[test]
    fn three_site_hamiltonian_is_all_neighbors() {
        let h = hamiltonian(&RingLattice::new(3, 1.0).unwrap());
        for r in 0..3 {
            for c in 0..3 {
                let want = if r == c { 0.0 } else { 1.0 };
                assert_eq!(h.entry(r, c), zr(want));
            }
        }
        assert_eq!(h.hermiticity_defect(), 0.0);
    }

    #[test]
    fn two_site_hamiltonian_doubles_the_coupling() {
        let h = hamiltonian(&RingLattice::new(2, 0.7).unwrap());
        assert_eq!(h.entry(0, 0), zr(0.0));
        assert_eq!(h.entry(0, 1), zr(1.4));
        assert_eq!(h.entry(1, 0), zr(1.4));
    }

    #[test]
    fn six_site_mode_constants_are_the_expected_multiset() {
        let mut got = six_site().mode_constants();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let want = [-2.0, -1.0, -1.0, 1.0, 1.0, 2.0];
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < 1e-14);
        }
    }

    #[test]
    fn hamiltonian_eigenrelation_on_dft_columns() {
        let lat = six_site();
        let h = hamiltonian(&lat);
        let f = dft(lat.hilbert());
        let omegas = lat.mode_constants();
        for (j, om) in omegas.iter().enumerate() {
            let col = FieldState::new((0..6).map(|n| f.entry(n, j)).collect());
            let applied = h.apply(&col).unwrap();
            let scaled = col.scaled(zr(*om));
            assert!(applied.max_abs_diff(&scaled).unwrap() < 1e-14);
        }
    }

    #[test]
    fn propagator_at_zero_is_the_identity() {
        let u = propagator_spectral(&six_site(), 0.0);
        assert!(u.max_abs_diff(&Operator::identity(6)).unwrap() < 1e-15);
    }

    #[test]
    fn propagator_is_unitary_and_a_semigroup() {
        let lat = RingLattice::new(5, 0.8).unwrap();
        let u = propagator_spectral(&lat, 1.3);
        assert!(u.unitarity_defect() < 1e-13);

        let a = propagator_spectral(&lat, 0.7);
        let b = propagator_spectral(&lat, 1.9);
        let ab = a.mat_mul(&b).unwrap();
        let direct = propagator_spectral(&lat, 2.6);
        assert!(ab.max_abs_diff(&direct).unwrap() < 1e-13);

        let inv = propagator_spectral(&lat, -1.3);
        let round = u.mat_mul(&inv).unwrap();
        assert!(round.max_abs_diff(&Operator::identity(5)).unwrap() < 1e-13);
    }

    #[test]
    fn six_site_ring_revives_at_two_pi() {
        let u = propagator_spectral(&six_site(), 2.0 * PI);
        assert!(u.max_abs_diff(&Operator::identity(6)).unwrap() < 1e-10);
    }

    #[test]
    fn two_site_intensity_follows_the_cosine_law() {
        let lat = RingLattice::new(2, 1.0).unwrap();
        for &z in &[0.1, 0.45, 1.2, 3.0] {
            let out = propagator_spectral(&lat, z).apply(&e0(2)).unwrap();
            let want = (2.0 * z).cos().powi(2);
            assert!((out.intensities()[0] - want).abs() < 1e-13);
        }
    }

    #[test]
    fn bessel_series_at_zero_distance_is_the_input() {
        let lat = six_site();
        let input = FieldState::new(vec![
            Complex64::new(0.3, -0.1),
            zr(0.0),
            Complex64::new(0.0, 0.9),
            zr(0.2),
            zr(0.0),
            zr(0.1),
        ]);
        let out = propagate_bessel(&lat, 0.0, &input, 25).unwrap();
        assert!(out.max_abs_diff(&input).unwrap() < 1e-16);
    }

    #[test]
    fn six_site_intensities_at_pi_match_the_exact_pattern() {
        let lat = six_site();
        let z = PI;
        let trunc = (2.0 * z).ceil() as usize + 40;
        let out = propagate_bessel(&lat, z, &e0(6), trunc).unwrap();
        let want = [1.0 / 9.0, 0.0, 4.0 / 9.0, 0.0, 4.0 / 9.0, 0.0];
        for (got, want) in out.intensities().iter().zip(want) {
            assert!((got - want).abs() < 1e-10);
        }
    }

    #[test]
    fn bessel_truncation_tail_is_negligible() {
        let lat = six_site();
        let coarse = propagate_bessel(&lat, 1.0, &e0(6), 30).unwrap();
        let fine = propagate_bessel(&lat, 1.0, &e0(6), 60).unwrap();
        assert!(coarse.max_abs_diff(&fine).unwrap() < 1e-12);
    }

    #[test]
    fn bessel_route_matches_the_spectral_route() {
        let lat = RingLattice::new(5, 1.0).unwrap();
        let z = 2.3;
        let spectral = propagator_spectral(&lat, z).apply(&e0(5)).unwrap();
        let series = propagate_bessel(&lat, z, &e0(5), 50).unwrap();
        assert!(series.max_abs_diff(&spectral).unwrap() < 1e-12);
    }

    #[test]
    fn folded_coefficients_at_zero_distance() {
        let g = folded_coefficients(&six_site(), 0.0);
        assert!((g.coefficients()[0] - zr(1.0)).norm() < 1e-16);
        for c in &g.coefficients()[1..] {
            assert!(c.norm() < 1e-16);
        }
    }

    #[test]
    fn folded_coefficients_conserve_power() {
        let g = folded_coefficients(&six_site(), PI);
        let total: f64 = g.coefficients().iter().map(|c| c.norm_sqr()).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn folded_route_matches_the_bessel_route() {
        let lat = RingLattice::new(5, 1.0).unwrap();
        let z = 2.3;
        let folded = folded_coefficients(&lat, z).apply(&e0(5)).unwrap();
        let series = propagate_bessel(&lat, z, &e0(5), 50).unwrap();
        assert!(folded.max_abs_diff(&series).unwrap() < 1e-12);
    }

    #[test]
    fn integrator_on_a_single_point_grid_returns_the_input() {
        let lat = six_site();
        let trace = propagate_ode(&lat, &[0.0], &e0(6), 0.005).unwrap();
        assert_eq!(trace.samples(), 1);
        assert_eq!(trace.intensities()[0][0], 1.0);
    }

    #[test]
    fn integrator_sees_the_two_pi_revival() {
        let lat = six_site();
        let trace = propagate_ode(&lat, &[0.0, 2.0 * PI], &e0(6), 0.001).unwrap();
        let last = trace.intensities().last().unwrap();
        assert!((last[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn integrator_matches_the_spectral_route() {
        let lat = RingLattice::new(4, 0.5).unwrap();
        let trace = propagate_ode(&lat, &[0.0, 1.0], &e0(4), 0.001).unwrap();
        let exact = propagator_spectral(&lat, 1.0).apply(&e0(4)).unwrap();
        let row = trace.amplitudes().unwrap().last().unwrap();
        let got = FieldState::new(row.clone());
        assert!(got.max_abs_diff(&exact).unwrap() < 1e-6);
    }

    #[test]
    fn integrator_validates_step_and_grid() {
        let lat = six_site();
        assert!(matches!(
            propagate_ode(&lat, &[0.0, 1.0], &e0(6), 0.5).unwrap_err(),
            Error::StepTooLarge { .. }
        ));
        assert!(matches!(
            propagate_ode(&lat, &[0.0, 1.0], &e0(6), -0.001).unwrap_err(),
            Error::InvalidStep { .. }
        ));
        assert_eq!(
            propagate_ode(&lat, &[0.5, 1.0], &e0(6), 0.001).unwrap_err(),
            Error::InvalidGrid
        );
        assert_eq!(
            propagate_ode(&lat, &[0.0, 1.0, 0.5], &e0(6), 0.001).unwrap_err(),
            Error::InvalidGrid
        );
    }

    #[test]
    fn zero_distance_plan_repeats_the_input_pattern() {
        let lat = six_site();
        let plan = PropagationPlan::new(0.0, 2, Method::Spectral).unwrap();
        let trace = intensity_trace(&lat, &e0(6), &plan).unwrap();
        assert_eq!(trace.samples(), 2);
        for row in trace.intensities() {
            assert!((row[0] - 1.0).abs() < 1e-15);
            assert!(row[1..].iter().all(|v| *v < 1e-15));
        }
    }

    #[test]
    fn trace_hits_the_revival_and_the_pi_plateau() {
        let lat = six_site();
        let plan = PropagationPlan::new(2.0 * PI, 3, Method::Spectral).unwrap();
        let trace = intensity_trace(&lat, &e0(6), &plan).unwrap();
        // grid is (0, π, 2π)
        let pi_row = &trace.intensities()[1];
        assert!((pi_row[0] - 1.0 / 9.0).abs() < 1e-10);
        let last = &trace.intensities()[2];
        assert!(last[0] > 1.0 - 1e-9);
    }

    #[test]
    fn traces_conserve_power_per_method() {
        let lat = six_site();
        for method in [
            Method::Spectral,
            Method::Bessel,
            Method::Folded,
            Method::Ode,
        ] {
            let plan = PropagationPlan::new(4.0 * PI, 41, method).unwrap();
            let trace = intensity_trace(&lat, &e0(6), &plan).unwrap();
            let bound = if method == Method::Ode { 1e-8 } else { 1e-12 };
            for p in trace.row_powers() {
                assert!(
                    (p - 1.0).abs() < bound,
                    "{method}: drift {}",
                    (p - 1.0).abs()
                );
            }
        }
    }

    #[test]
    fn parallel_trace_is_bitwise_identical() {
        let lat = RingLattice::new(7, 1.3).unwrap();
        let input = FieldState::basis(7, 2).unwrap();
        for method in [Method::Spectral, Method::Bessel, Method::Folded] {
            let plan = PropagationPlan::new(9.0, 57, method).unwrap();
            let seq = intensity_trace(&lat, &input, &plan).unwrap();
            let par = intensity_trace_parallel(&lat, &input, &plan).unwrap();
            assert_eq!(seq.amplitudes().unwrap(), par.amplitudes().unwrap());
        }
    }

    #[test]
    fn plan_validation() {
        assert!(matches!(
            PropagationPlan::new(-1.0, 10, Method::Spectral).unwrap_err(),
            Error::InvalidDistance { .. }
        ));
        assert_eq!(
            PropagationPlan::new(1.0, 1, Method::Spectral).unwrap_err(),
            Error::TooFewSamples { samples: 1 }
        );
        assert_eq!("folded".parse::<Method>().unwrap(), Method::Folded);
        assert!(matches!(
            "eigen".parse::<Method>().unwrap_err(),
            Error::UnknownMethod(_)
        ));
    }

    #[test]
    fn six_site_revival_is_found_at_two_pi() {
        let lat = six_site();
        let found = revival_search(&lat, &e0(6), 7.0, 1e-9).unwrap();
        assert_eq!(found.len(), 1);
        assert!((found[0].z - 2.0 * PI).abs() < 1e-6);
        assert!(found[0].fidelity > 1.0 - 1e-10);
    }

    #[test]
    fn two_site_revival_is_found_at_half_pi() {
        let lat = RingLattice::new(2, 1.0).unwrap();
        let found = revival_search(&lat, &e0(2), 2.0, 1e-9).unwrap();
        assert!(!found.is_empty());
        assert!((found[0].z - PI / 2.0).abs() < 1e-6);
    }

    #[test]
    fn five_site_ring_never_revives_below_twenty() {
        let lat = RingLattice::new(5, 1.0).unwrap();
        let found = revival_search(&lat, &e0(5), 20.0, 1e-9).unwrap();
        assert!(found.is_empty());
    }

    #[test]
    fn revival_search_validates_input() {
        let lat = six_site();
        assert!(matches!(
            revival_search(&lat, &e0(6), 0.0, 1e-9).unwrap_err(),
            Error::InvalidDistance { .. }
        ));
        assert_eq!(
            revival_search(&lat, &e0(6), 5.0, 1.5).unwrap_err(),
            Error::InvalidTolerance
        );
        let zero = FieldState::new(vec![czero(); 6]);
        assert_eq!(
            revival_search(&lat, &zero, 5.0, 1e-9).unwrap_err(),
            Error::ZeroField
        );
    }
}
