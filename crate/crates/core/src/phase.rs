//! Discrete phase operators on a truncated mode space.
//!
//! Everything here lives on a `dim`-dimensional space spanned by the number
//! states `|0> .. |s>` with `dim = s + 1`. The discrete Fourier transform
//! maps that basis onto the phase-state basis, and because the cyclic shift
//! is a circulant matrix, the DFT diagonalizes it analytically. Every
//! spectral construction below (exponentials, logarithms, the phase operator
//! itself) goes through that known diagonalization; nothing in this crate
//! searches for eigenvectors numerically.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{conjugate_by_unitary, FieldState, Operator};

const TAU: f64 = 2.0 * PI;

/// Size of the truncated mode space, stored as the highest number-state
/// index `s`; the space dimension is `s + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HilbertDim {
    max_number: usize,
}

impl HilbertDim {
    /// From the highest number-state index kept in the truncation.
    pub fn from_max_number(max_number: usize) -> Self {
        assert!(
            max_number < usize::MAX,
            "truncation index too large to form a dimension"
        );
        HilbertDim { max_number }
    }

    /// From the space dimension itself; must be at least 1.
    pub fn from_dim(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(HilbertDim {
            max_number: dim - 1,
        })
    }

    pub fn max_number(self) -> usize {
        self.max_number
    }

    pub fn dim(self) -> usize {
        self.max_number + 1
    }
}

/// Angle in radians, canonically wrapped into [0, 2π).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseAngle {
    radians: f64,
}

impl PhaseAngle {
    pub fn new(radians: f64) -> Self {
        assert!(radians.is_finite(), "phase angle must be finite");
        let mut wrapped = radians.rem_euclid(TAU);
        // rem_euclid can round up to the modulus itself for tiny negatives.
        if wrapped >= TAU {
            wrapped = 0.0;
        }
        PhaseAngle { radians: wrapped }
    }

    pub fn radians(self) -> f64 {
        self.radians
    }
}

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// diag(0, 1, ..., s): photon-number diagonal in the number basis.
pub fn number_operator(h: HilbertDim) -> Operator {
    Operator::from_fn(h.dim(), |r, c| {
        if r == c {
            Complex64::new(r as f64, 0.0)
        } else {
            czero()
        }
    })
}

/// Unitary DFT matrix with entries `λ_j^n / sqrt(dim)` where
/// `λ_j = exp(i 2π j / dim)`. Column `j` is the phase state at angle
/// `θ_j = 2π j / dim`.
pub fn dft(h: HilbertDim) -> Operator {
    let dim = h.dim();
    let norm = 1.0 / (dim as f64).sqrt();
    Operator::from_fn(dim, |n, j| {
        let angle = TAU * ((n * j) as f64) / (dim as f64);
        Complex64::cis(angle) * norm
    })
}

/// Grid angle `θ_m = 2πm / dim` for `0 <= m <= s`.
pub fn theta_m(h: HilbertDim, m: usize) -> Result<PhaseAngle> {
    if m > h.max_number() {
        return Err(Error::IndexOutOfRange {
            index: m,
            max: h.max_number(),
        });
    }
    Ok(PhaseAngle::new(TAU * (m as f64) / (h.dim() as f64)))
}

/// Unit-norm state with amplitudes `exp(i n θ) / sqrt(dim)`, `n = 0..s`.
pub fn phase_state(h: HilbertDim, theta: PhaseAngle) -> FieldState {
    let dim = h.dim();
    let norm = 1.0 / (dim as f64).sqrt();
    FieldState::new(
        (0..dim)
            .map(|n| Complex64::cis(theta.radians() * n as f64) * norm)
            .collect(),
    )
}

/// Eigenvalues `λ_j = exp(i 2π j / dim)` of the cyclic shift, `j = 0..s`.
pub fn spectral_diagonal(h: HilbertDim) -> Vec<Complex64> {
    let dim = h.dim();
    (0..dim)
        .map(|j| Complex64::cis(TAU * (j as f64) / (dim as f64)))
        .collect()
}

/// Cyclic shift: ones on the superdiagonal plus the wrap-around corner
/// entry at (s, 0). Unitary permutation; its (dim)-th power is the identity
/// exactly because the entries are 0/1.
pub fn lsg_shift_operator(h: HilbertDim) -> Operator {
    let dim = h.dim();
    Operator::from_fn(dim, |r, c| {
        if (r + 1) % dim == c {
            Complex64::new(1.0, 0.0)
        } else {
            czero()
        }
    })
}

/// `F · N · F†` by literal matrix multiplication. This deliberately does not
/// reuse the spectral-conjugation helper: it serves as an independent route
/// when the two are compared.
pub fn dft_number_conjugation(h: HilbertDim) -> Operator {
    let f = dft(h);
    let n = number_operator(h);
    f.mat_mul(&n)
        .and_then(|fn_| fn_.mat_mul(&f.adjoint()))
        .expect("square factors of equal dimension")
}

/// Closed form of `sum_{m=0}^{s} m · exp(i 2π d m / dim)` for an index
/// offset `d` that is not a multiple of `dim`:
///
/// `-i · dim / (2 sin(π d / dim)) · exp(i π d (2s+1) / dim)`
///
/// At `d ≡ 0 (mod dim)` the denominator vanishes and the sum degenerates to
/// `s(s+1)/2`; that case is rejected here and handled by callers as the
/// diagonal term.
pub fn geometric_moment_sum(h: HilbertDim, d: i64) -> Result<Complex64> {
    let dim = h.dim();
    if d.rem_euclid(dim as i64) == 0 {
        return Err(Error::SingularOffset { offset: d, dim });
    }
    let s = h.max_number() as f64;
    let dimf = dim as f64;
    let df = d as f64;
    let prefactor = Complex64::new(0.0, -dimf / (2.0 * (PI * df / dimf).sin()));
    Ok(prefactor * Complex64::cis(PI * df * (2.0 * s + 1.0) / dimf))
}

/// Literal term-by-term evaluation of the same sum; the oracle that
/// `geometric_moment_sum` is checked against.
pub fn geometric_moment_sum_brute(h: HilbertDim, d: i64) -> Complex64 {
    let dim = h.dim() as f64;
    (0..h.dim())
        .map(|m| Complex64::cis(TAU * (d as f64) * (m as f64) / dim) * (m as f64))
        .sum()
}

/// The phase operator built along two independent routes, plus the commonly
/// printed closed form retained verbatim.
///
/// `spectral` conjugates the angle diagonal `θ_n = 2πn/dim` by the DFT, so
/// its eigenpairs are exact by construction. `closed_form` is the analytic
/// entry formula: `πs/dim` on the diagonal and
/// `(2π/dim) / (exp(i 2π (n-k)/dim) - 1)` off it. The two agree entry-wise
/// at rounding level.
///
/// `paper_literal` keeps the off-diagonal prefactor `2π` that the closed
/// form is usually printed with; that prefactor is too large by exactly a
/// factor of `dim`, and keeping the uncorrected matrix lets callers measure
/// the defect instead of taking it on faith.
#[derive(Debug, Clone)]
pub struct PhaseOperatorPair {
    pub spectral: Operator,
    pub closed_form: Operator,
    pub paper_literal: Operator,
}

/// Phase operator with the phase reference fixed at zero. See
/// [`PhaseOperatorPair`] for what the three variants mean.
pub fn pb_phase_operator(h: HilbertDim) -> PhaseOperatorPair {
    let dim = h.dim();
    let dimf = dim as f64;
    let angles: Vec<Complex64> = (0..dim)
        .map(|n| Complex64::new(TAU * (n as f64) / dimf, 0.0))
        .collect();
    let spectral =
        conjugate_by_unitary(&dft(h), &angles).expect("DFT dimension matches its diagonal");

    let diag = PI * (h.max_number() as f64) / dimf;
    let off = |n: usize, k: usize, prefactor: f64| {
        let delta = Complex64::cis(TAU * (n as f64 - k as f64) / dimf) - 1.0;
        prefactor / delta
    };
    let closed_form = Operator::from_fn(dim, |n, k| {
        if n == k {
            Complex64::new(diag, 0.0)
        } else {
            off(n, k, TAU / dimf)
        }
    });
    let paper_literal = Operator::from_fn(dim, |n, k| {
        if n == k {
            Complex64::new(diag, 0.0)
        } else {
            off(n, k, TAU)
        }
    });

    PhaseOperatorPair {
        spectral,
        closed_form,
        paper_literal,
    }
}

/// `f(V) = F · f(D) · F†`: applies a scalar map to the known shift spectrum
/// and conjugates back. Errors if `f` produces a non-finite value at some
/// eigenvalue, naming its index.
pub fn operator_function(h: HilbertDim, f: impl Fn(Complex64) -> Complex64) -> Result<Operator> {
    let mapped: Vec<Complex64> = spectral_diagonal(h).into_iter().map(f).collect();
    for (index, v) in mapped.iter().enumerate() {
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::NonFiniteEigenvalueMap { index });
        }
    }
    conjugate_by_unitary(&dft(h), &mapped)
}

/// Matrix logarithm of the cyclic shift on the branch with arguments in
/// [0, 2π), so that `ln λ_j = i 2πj/dim` exactly. The principal branch
/// would flip the sign for `j > dim/2` and break the identity
/// `ln V = i (2π/dim) F N F†`; this branch keeps it. Anti-Hermitian.
pub fn log_shift_operator(h: HilbertDim) -> Operator {
    operator_function(h, |lam| {
        let mut angle = lam.arg();
        if angle < 0.0 {
            angle += TAU;
        }
        Complex64::new(0.0, angle)
    })
    .expect("log of unit-modulus spectrum is finite")
}
