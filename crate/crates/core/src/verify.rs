//! Runtime verification: re-derives every invariant the crate promises and
//! reports measured residuals against their bounds.
//!
//! Each check records the worst residual observed across its whole sweep,
//! so a report is useful even when everything passes: it shows the actual
//! margins. Checks never bail out early; a failing bound is recorded and
//! the suite keeps going.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bessel::{bessel_j, bessel_j_sequence};
use crate::error::{Error, Result};
use crate::linalg::{conjugate_by_unitary, FieldState, Operator, ToleranceProfile};
use crate::phase::{
    dft, dft_number_conjugation, geometric_moment_sum, geometric_moment_sum_brute,
    lsg_shift_operator, pb_phase_operator, phase_state, spectral_diagonal, theta_m, HilbertDim,
};
use crate::waveguide::{
    folded_coefficients, intensity_trace, propagate_bessel, propagate_ode, propagator_spectral,
    revival_search, IntensityTrace, Method, PropagationPlan, RingLattice,
};

const TAU: f64 = 2.0 * PI;

/// One verified statement: the worst residual seen and the bound it must
/// stay under. A zero bound means the property must hold exactly.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: String,
    pub worst: f64,
    pub bound: f64,
    pub passed: bool,
    pub detail: Vec<String>,
}

impl CheckReport {
    fn new(name: &str, worst: f64, bound: f64) -> Self {
        let passed = if bound == 0.0 {
            worst <= 0.0
        } else {
            worst < bound
        };
        CheckReport {
            name: name.to_string(),
            worst,
            bound,
            passed,
            detail: Vec::new(),
        }
    }

    fn with_detail(mut self, detail: Vec<String>) -> Self {
        self.detail = detail;
        self
    }
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: &'static str,
    pub checks: Vec<CheckReport>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub suites: Vec<SuiteReport>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteReport::passed)
    }

    pub fn check_count(&self) -> usize {
        self.suites.iter().map(|s| s.checks.len()).sum()
    }
}

/// Runs the full suite on dimensions up to `max_dim` (at least 2). The seed
/// fixes the randomized cross-method configurations, so identical calls
/// produce identical reports.
pub fn run_all(max_dim: usize, seed: u64, tol: &ToleranceProfile) -> Result<VerificationReport> {
    if max_dim < 2 {
        return Err(Error::InvalidMaxDim { max_dim });
    }
    tol.validate()?;
    Ok(VerificationReport {
        suites: vec![
            linear_algebra_suite(max_dim, tol),
            phase_operator_suite(max_dim, tol),
            printed_prefactor_suite(max_dim),
            bessel_suite(),
            waveguide_suite(max_dim, seed, tol),
            self_imaging_suite(),
        ],
    })
}

fn dims(max_dim: usize) -> impl Iterator<Item = HilbertDim> {
    (1..=max_dim).map(|d| HilbertDim::from_dim(d).expect("d >= 1"))
}

fn linear_algebra_suite(max_dim: usize, tol: &ToleranceProfile) -> SuiteReport {
    let mut unitarity_dft = 0.0_f64;
    let mut unitarity_shift = 0.0_f64;
    let mut ring_period = 0.0_f64;
    let mut associativity = 0.0_f64;
    let mut ones_conjugation = 0.0_f64;

    for h in dims(max_dim) {
        let f = dft(h);
        let v = lsg_shift_operator(h);
        unitarity_dft = unitarity_dft.max(f.unitarity_defect());
        unitarity_shift = unitarity_shift.max(v.unitarity_defect());

        let dim = h.dim();
        let mut p = Operator::identity(dim);
        for _ in 0..dim {
            p = p.mat_mul(&v).expect("same dimension");
        }
        ring_period = ring_period.max(
            p.max_abs_diff(&Operator::identity(dim))
                .expect("same dimension"),
        );

        // (F D) V vs F (D V) costs no rounding (diagonal and permutation
        // factors multiply entry-wise), so also exercise triples whose
        // inner sums genuinely accumulate: (F V) F† and (F F†) F.
        let d = Operator::diagonal(&spectral_diagonal(h));
        let fa = f.adjoint();
        let triples = [(&f, &d, &v), (&f, &v, &fa), (&f, &fa, &f)];
        for (a, b, c) in triples {
            let left = a.mat_mul(b).unwrap().mat_mul(c).unwrap();
            let right = a.mat_mul(&b.mat_mul(c).unwrap()).unwrap();
            associativity = associativity.max(left.max_abs_diff(&right).unwrap());
        }

        let ones = vec![Complex64::new(1.0, 0.0); dim];
        let conj = conjugate_by_unitary(&f, &ones).unwrap();
        ones_conjugation =
            ones_conjugation.max(conj.max_abs_diff(&Operator::identity(dim)).unwrap());
    }

    SuiteReport {
        name: "linear-algebra",
        checks: vec![
            CheckReport::new("DFT is unitary", unitarity_dft, tol.eq_tol),
            CheckReport::new("cyclic shift is unitary", unitarity_shift, tol.eq_tol),
            CheckReport::new("shift to the power dim is the identity", ring_period, 1e-13),
            CheckReport::new(
                "matrix product is associative on the crate's operators",
                associativity,
                8.0 * f64::EPSILON,
            ),
            CheckReport::new(
                "conjugating an all-ones diagonal gives the identity",
                ones_conjugation,
                tol.eq_tol,
            ),
        ],
    }
}

fn phase_operator_suite(max_dim: usize, tol: &ToleranceProfile) -> SuiteReport {
    let mut route_agreement = 0.0_f64;
    let mut hermiticity = 0.0_f64;
    let mut shift_eigen = 0.0_f64;
    let mut phase_eigen = 0.0_f64;
    let mut brute_agreement = 0.0_f64;
    let mut closed_entries = 0.0_f64;
    let mut moment_rel = 0.0_f64;
    let mut exp_identity = 0.0_f64;
    let mut log_identity = 0.0_f64;
    let mut log_anti_hermitian = 0.0_f64;
    let mut log_eigen = 0.0_f64;

    for h in dims(max_dim) {
        let dim = h.dim();
        let dimf = dim as f64;
        let pair = pb_phase_operator(h);
        route_agreement =
            route_agreement.max(pair.spectral.max_abs_diff(&pair.closed_form).unwrap());
        hermiticity = hermiticity
            .max(pair.spectral.hermiticity_defect())
            .max(pair.closed_form.hermiticity_defect())
            .max(pair.paper_literal.hermiticity_defect());

        let v = lsg_shift_operator(h);
        let log_v = crate::phase::log_shift_operator(h);
        for m in 0..dim {
            let theta = theta_m(h, m).unwrap();
            let state = phase_state(h, theta);
            let shifted = v.apply(&state).unwrap();
            let rotated = state.scaled(Complex64::cis(theta.radians()));
            shift_eigen = shift_eigen.max(shifted.max_abs_diff(&rotated).unwrap());

            let phased = pair.spectral.apply(&state).unwrap();
            let scaled = state.scaled(Complex64::new(theta.radians(), 0.0));
            phase_eigen = phase_eigen.max(phased.max_abs_diff(&scaled).unwrap());

            let logged = log_v.apply(&state).unwrap();
            let log_scaled = state.scaled(Complex64::new(0.0, theta.radians()));
            log_eigen = log_eigen.max(logged.max_abs_diff(&log_scaled).unwrap());
        }

        let conjugated = dft_number_conjugation(h);
        let brute = Operator::from_fn(dim, |n, k| {
            geometric_moment_sum_brute(h, n as i64 - k as i64) / dimf
        });
        brute_agreement = brute_agreement.max(conjugated.max_abs_diff(&brute).unwrap());

        let closed = Operator::from_fn(dim, |n, k| {
            if n == k {
                Complex64::new(h.max_number() as f64 / 2.0, 0.0)
            } else {
                1.0 / (Complex64::cis(TAU * (n as f64 - k as f64) / dimf) - 1.0)
            }
        });
        closed_entries = closed_entries.max(conjugated.max_abs_diff(&closed).unwrap());

        for d in 1..dim as i64 {
            for signed in [d, -d] {
                let closed_sum = geometric_moment_sum(h, signed).unwrap();
                let brute_sum = geometric_moment_sum_brute(h, signed);
                let rel = (closed_sum - brute_sum).norm() / brute_sum.norm().max(f64::MIN_POSITIVE);
                moment_rel = moment_rel.max(rel);
            }
        }

        let exp_phases: Vec<Complex64> = (0..dim)
            .map(|n| Complex64::cis(TAU * n as f64 / dimf))
            .collect();
        let exp_of_phase = conjugate_by_unitary(&dft(h), &exp_phases).unwrap();
        exp_identity = exp_identity.max(exp_of_phase.max_abs_diff(&v).unwrap());

        let scaled_conjugation = conjugated.scaled(Complex64::new(0.0, TAU / dimf));
        log_identity = log_identity.max(log_v.max_abs_diff(&scaled_conjugation).unwrap());
        let neg_adjoint = log_v.adjoint().scaled(Complex64::new(-1.0, 0.0));
        log_anti_hermitian = log_anti_hermitian.max(log_v.max_abs_diff(&neg_adjoint).unwrap());
    }

    SuiteReport {
        name: "phase-operators",
        checks: vec![
            CheckReport::new(
                "spectral and closed-form phase operators agree",
                route_agreement,
                tol.eq_tol,
            ),
            CheckReport::new(
                "all phase-operator forms are Hermitian",
                hermiticity,
                tol.eq_tol,
            ),
            CheckReport::new(
                "shift eigenrelation on every phase state",
                shift_eigen,
                tol.spectral_tol,
            ),
            CheckReport::new(
                "phase-operator eigenrelation on every phase state",
                phase_eigen,
                tol.spectral_tol,
            ),
            CheckReport::new(
                "conjugated number operator matches the literal moment sums",
                brute_agreement,
                tol.eq_tol,
            ),
            CheckReport::new(
                "conjugated number operator matches its closed-form entries",
                closed_entries,
                tol.eq_tol,
            ),
            CheckReport::new(
                "moment-sum closed form vs literal sum (relative)",
                moment_rel,
                1e-10,
            ),
            CheckReport::new(
                "exponential of the phase operator is the shift",
                exp_identity,
                tol.eq_tol,
            ),
            CheckReport::new(
                "log of the shift equals the scaled conjugated number operator",
                log_identity,
                tol.eq_tol,
            ),
            CheckReport::new(
                "log of the shift is anti-Hermitian",
                log_anti_hermitian,
                tol.eq_tol,
            ),
            CheckReport::new(
                "log eigenrelation on every phase state",
                log_eigen,
                tol.spectral_tol,
            ),
        ],
    }
}

/// The widely printed closed form of the phase operator carries an
/// off-diagonal prefactor that is too large by exactly the dimension. This
/// suite measures that ratio instead of assuming it.
fn printed_prefactor_suite(max_dim: usize) -> SuiteReport {
    let mut worst_rel = 0.0_f64;
    let mut detail = Vec::new();
    for h in dims(max_dim) {
        let dim = h.dim();
        if dim < 2 {
            continue;
        }
        let pair = pb_phase_operator(h);
        let mut ratio_at_01 = 0.0;
        for n in 0..dim {
            for k in 0..dim {
                if n == k {
                    continue;
                }
                let ratio = pair.paper_literal.entry(n, k) / pair.closed_form.entry(n, k);
                let rel = (ratio - dim as f64).norm() / dim as f64;
                worst_rel = worst_rel.max(rel);
                if n == 0 && k == 1 {
                    ratio_at_01 = ratio.re;
                }
            }
        }
        if matches!(dim, 2 | 3 | 8) {
            detail.push(format!(
                "dim {dim}: measured off-diagonal ratio {ratio_at_01:.15} (expected {dim})"
            ));
        }
    }
    SuiteReport {
        name: "printed-prefactor",
        checks: vec![CheckReport::new(
            "uncorrected off-diagonal exceeds the corrected one by the dimension",
            worst_rel,
            1e-10,
        )
        .with_detail(detail)],
    }
}

fn bessel_suite() -> SuiteReport {
    let mut sum_rule = 0.0_f64;
    for &x in &[0.5_f64, 1.0, 2.0, 5.0, 10.0, 20.0, 35.0, 50.0] {
        let js = bessel_j_sequence(x.ceil() as usize + 40, x).unwrap();
        let total = js[0] * js[0] + 2.0 * js[1..].iter().map(|j| j * j).sum::<f64>();
        sum_rule = sum_rule.max((total - 1.0).abs());
    }

    let mut recurrence = 0.0_f64;
    for &x in &[0.1, 1.0, 10.0, 50.0] {
        let js = bessel_j_sequence(102, x).unwrap();
        for n in 1..=100_usize {
            let lhs = js[n - 1] + js[n + 1];
            let rhs = 2.0 * n as f64 / x * js[n];
            let scale = js[n - 1]
                .abs()
                .max(js[n + 1].abs())
                .max(rhs.abs())
                .max(f64::MIN_POSITIVE);
            recurrence = recurrence.max(((lhs - rhs) / scale).abs());
        }
    }

    let mut parity = 0.0_f64;
    for &x in &[0.4, 3.3, 17.0] {
        for n in 0..10_i64 {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let base = bessel_j(n, x).unwrap();
            parity = parity
                .max((bessel_j(-n, x).unwrap() - sign * base).abs())
                .max((bessel_j(n, -x).unwrap() - sign * base).abs());
        }
    }

    let series_30 = {
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..=30 {
            term *= -0.25 / ((k * k) as f64);
            sum += term;
        }
        sum
    };
    let j0_dev = (bessel_j(0, 1.0).unwrap() - series_30).abs();

    SuiteReport {
        name: "bessel",
        checks: vec![
            CheckReport::new("normalization sum rule (x up to 50)", sum_rule, 1e-12),
            CheckReport::new("three-term recurrence (relative)", recurrence, 1e-11),
            CheckReport::new("parity identities are exact sign flips", parity, 0.0),
            CheckReport::new("J0(1) vs the 30-term series oracle", j0_dev, 1e-13),
        ],
    }
}

fn random_unit_field(rng: &mut ChaCha8Rng, dim: usize) -> FieldState {
    loop {
        let amps: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-3 {
            let inv = Complex64::new(1.0 / norm, 0.0);
            return FieldState::new(amps.iter().map(|a| a * inv).collect());
        }
    }
}

fn worst_row_drift(trace: &IntensityTrace, target: f64) -> f64 {
    trace
        .row_powers()
        .iter()
        .map(|p| (p - target).abs())
        .fold(0.0, f64::max)
}

fn max_amp_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn waveguide_suite(max_dim: usize, seed: u64, tol: &ToleranceProfile) -> SuiteReport {
    let six = RingLattice::new(6, 1.0).unwrap();
    let excite = FieldState::basis(6, 0).unwrap();

    let mut analytic_drift = 0.0_f64;
    for method in [Method::Spectral, Method::Bessel, Method::Folded] {
        let plan = PropagationPlan::new(4.0 * PI, 101, method).unwrap();
        let trace = intensity_trace(&six, &excite, &plan).unwrap();
        analytic_drift = analytic_drift.max(worst_row_drift(&trace, 1.0));
    }
    let ode_plan = PropagationPlan::new(4.0 * PI, 101, Method::Ode).unwrap();
    let ode_trace = intensity_trace(&six, &excite, &ode_plan).unwrap();
    let ode_drift = worst_row_drift(&ode_trace, 1.0);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut analytic_mutual = 0.0_f64;
    let mut vs_integrator = 0.0_f64;
    for _ in 0..10 {
        let sites = rng.random_range(2..=max_dim.clamp(2, 16));
        let gamma = rng.random_range(0.2..2.0);
        let z = rng.random_range(0.0..4.0 * PI);
        let lat = RingLattice::new(sites, gamma).unwrap();
        let field = random_unit_field(&mut rng, sites);

        let spectral = propagator_spectral(&lat, z).apply(&field).unwrap();
        let trunc = (2.0 * gamma * z).abs().ceil() as usize + 40;
        let series = propagate_bessel(&lat, z, &field, trunc).unwrap();
        let folded = folded_coefficients(&lat, z).apply(&field).unwrap();
        analytic_mutual = analytic_mutual
            .max(spectral.max_abs_diff(&series).unwrap())
            .max(spectral.max_abs_diff(&folded).unwrap())
            .max(series.max_abs_diff(&folded).unwrap());

        let ode = propagate_ode(&lat, &[0.0, z], &field, 0.002 / gamma).unwrap();
        let last = ode.amplitudes().unwrap().last().unwrap().clone();
        vs_integrator = vs_integrator.max(max_amp_diff(&last, spectral.amplitudes()));
    }

    let mut semigroup = 0.0_f64;
    let mut inverse = 0.0_f64;
    for _ in 0..5 {
        let sites = rng.random_range(2..=max_dim.clamp(2, 16));
        let gamma = rng.random_range(0.2..2.0);
        let lat = RingLattice::new(sites, gamma).unwrap();
        let a = rng.random_range(0.0..5.0);
        let b = rng.random_range(0.0..5.0);
        let ua = propagator_spectral(&lat, a);
        let ub = propagator_spectral(&lat, b);
        let uab = propagator_spectral(&lat, a + b);
        semigroup = semigroup.max(ua.mat_mul(&ub).unwrap().max_abs_diff(&uab).unwrap());
        let round = ua.mat_mul(&propagator_spectral(&lat, -a)).unwrap();
        inverse = inverse.max(round.max_abs_diff(&Operator::identity(sites)).unwrap());
    }

    SuiteReport {
        name: "waveguide",
        checks: vec![
            CheckReport::new(
                "power conservation along analytic traces",
                analytic_drift,
                1e-12,
            ),
            CheckReport::new(
                "power conservation along the integrator trace",
                ode_drift,
                1e-8,
            ),
            CheckReport::new(
                "spectral, series, and folded routes agree (10 random rings)",
                analytic_mutual,
                1e-10,
            ),
            CheckReport::new(
                "the integrator agrees with the analytic routes",
                vs_integrator,
                tol.ode_tol,
            ),
            CheckReport::new("propagators compose as a semigroup", semigroup, tol.eq_tol),
            CheckReport::new(
                "propagating forward then backward is the identity",
                inverse,
                tol.eq_tol,
            ),
        ],
    }
}

fn self_imaging_suite() -> SuiteReport {
    let six = RingLattice::new(6, 1.0).unwrap();
    let e6 = FieldState::basis(6, 0).unwrap();
    let revivals_six = revival_search(&six, &e6, 7.0, 1e-9).unwrap();
    let (six_pos_err, six_height_gap) = match revivals_six.as_slice() {
        [r] => ((r.z - TAU).abs(), 1.0 - r.fidelity),
        _ => (f64::INFINITY, f64::INFINITY),
    };

    let two = RingLattice::new(2, 1.0).unwrap();
    let e2 = FieldState::basis(2, 0).unwrap();
    let revivals_two = revival_search(&two, &e2, 2.0, 1e-9).unwrap();
    let two_pos_err = revivals_two
        .first()
        .map_or(f64::INFINITY, |r| (r.z - PI / 2.0).abs());

    let five = RingLattice::new(5, 1.0).unwrap();
    let e5 = FieldState::basis(5, 0).unwrap();
    let spurious = revival_search(&five, &e5, 20.0, 1e-9).unwrap().len() as f64;

    let z = PI;
    let out = propagator_spectral(&six, z).apply(&e6).unwrap();
    let want = [1.0 / 9.0, 0.0, 4.0 / 9.0, 0.0, 4.0 / 9.0, 0.0];
    let plateau = out
        .intensities()
        .iter()
        .zip(want)
        .map(|(got, want)| (got - want).abs())
        .fold(0.0, f64::max);

    SuiteReport {
        name: "self-imaging",
        checks: vec![
            CheckReport::new("six-site ring: revival sits at 2*pi", six_pos_err, 1e-6),
            CheckReport::new(
                "six-site ring: revival fidelity reaches 1",
                six_height_gap,
                1e-10,
            ),
            CheckReport::new(
                "two-site ring: first revival sits at pi/2",
                two_pos_err,
                1e-6,
            ),
            CheckReport::new("five-site ring: no revival below z = 20", spurious, 0.0),
            CheckReport::new(
                "six-site intensities at the halfway plateau",
                plateau,
                1e-10,
            ),
        ],
    }
}
