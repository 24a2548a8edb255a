use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense square matrix over `Complex64`, row-major storage.
///
/// Every constructor rejects non-finite entries, so an `Operator` that exists
/// is guaranteed to hold only finite numbers. Dimensions here are small
/// (truncated mode spaces, typically below a few hundred), so the plain
/// O(d^3) multiply is deliberate: it keeps every arithmetic step auditable.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    entries: Vec<Complex64>,
}

impl Operator {
    /// Builds a `dim x dim` matrix from an entry function (row, col).
    ///
    /// Panics if `dim == 0` or if the function produces a non-finite entry;
    /// both indicate a caller bug, not a runtime condition.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        assert!(dim > 0, "operator dimension must be positive");
        let mut entries = Vec::with_capacity(dim * dim);
        for row in 0..dim {
            for col in 0..dim {
                let v = f(row, col);
                assert!(
                    v.re.is_finite() && v.im.is_finite(),
                    "non-finite operator entry at ({row}, {col})"
                );
                entries.push(v);
            }
        }
        Operator { dim, entries }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |r, c| {
            if r == c {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn diagonal(values: &[Complex64]) -> Self {
        Self::from_fn(values.len(), |r, c| {
            if r == c {
                values[r]
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn mat_mul(&self, rhs: &Operator) -> Result<Operator> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: rhs.dim,
            });
        }
        let d = self.dim;
        let mut entries = vec![Complex64::new(0.0, 0.0); d * d];
        for r in 0..d {
            for k in 0..d {
                let a = self.entries[r * d + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..d {
                    entries[r * d + c] += a * rhs.entries[k * d + c];
                }
            }
        }
        Ok(Operator { dim: d, entries })
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Operator {
        Operator::from_fn(self.dim, |r, c| self.entry(c, r).conj())
    }

    pub fn apply(&self, v: &FieldState) -> Result<FieldState> {
        if self.dim != v.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: v.dim(),
            });
        }
        let d = self.dim;
        let amps = (0..d)
            .map(|r| {
                (0..d)
                    .map(|c| self.entries[r * d + c] * v.amplitudes[c])
                    .sum()
            })
            .collect();
        Ok(FieldState::new(amps))
    }

    /// Largest entry-wise absolute difference, the metric used by every
    /// agreement check in this crate.
    pub fn max_abs_diff(&self, other: &Operator) -> Result<f64> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Operator {
            dim: self.dim,
            entries,
        })
    }

    pub fn scaled(&self, k: Complex64) -> Operator {
        Operator::from_fn(self.dim, |r, c| k * self.entry(r, c))
    }

    /// max |A A† - I|; zero for an exactly unitary matrix.
    pub fn unitarity_defect(&self) -> f64 {
        let prod = self.mat_mul(&self.adjoint()).expect("same dimension");
        prod.max_abs_diff(&Operator::identity(self.dim))
            .expect("same dimension")
    }

    /// max |A - A†|; zero for an exactly Hermitian matrix.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint()).expect("same dimension")
    }
}

/// U diag(d) U† without forming the diagonal factor as a full matrix.
///
/// This is the only route from a spectrum back to an operator in this crate;
/// combined with the analytically known eigenvectors it replaces any general
/// eigensolver.
pub fn conjugate_by_unitary(u: &Operator, diag: &[Complex64]) -> Result<Operator> {
    if u.dim() != diag.len() {
        return Err(Error::DimensionMismatch {
            left: u.dim(),
            right: diag.len(),
        });
    }
    for v in diag {
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::NonFinite {
                context: "diagonal passed to conjugate_by_unitary",
            });
        }
    }
    let d = u.dim();
    let mut entries = Vec::with_capacity(d * d);
    for r in 0..d {
        for c in 0..d {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, lambda) in diag.iter().enumerate() {
                acc += u.entry(r, j) * lambda * u.entry(c, j).conj();
            }
            entries.push(acc);
        }
    }
    Ok(Operator { dim: d, entries })
}

/// Complex field amplitudes over the mode (or site) basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    amplitudes: Vec<Complex64>,
}

impl FieldState {
    /// Panics on empty or non-finite input; amplitudes always come from
    /// internal arithmetic, so a bad value is a bug upstream.
    pub fn new(amplitudes: Vec<Complex64>) -> Self {
        assert!(
            !amplitudes.is_empty(),
            "field state must have at least one mode"
        );
        assert!(
            amplitudes
                .iter()
                .all(|a| a.re.is_finite() && a.im.is_finite()),
            "non-finite field amplitude"
        );
        FieldState { amplitudes }
    }

    /// Unit excitation of a single mode.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::IndexOutOfRange {
                index,
                max: dim.saturating_sub(1),
            });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(FieldState { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.total_power().sqrt()
    }

    /// Sum of mode intensities; conserved by every unitary propagation route.
    pub fn total_power(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn intensities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// <self|other>, conjugate-linear in `self`.
    pub fn inner(&self, other: &FieldState) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn scaled(&self, k: Complex64) -> FieldState {
        FieldState::new(self.amplitudes.iter().map(|a| k * a).collect())
    }

    pub fn add(&self, other: &FieldState) -> Result<FieldState> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(FieldState::new(
            self.amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(a, b)| a + b)
                .collect(),
        ))
    }

    pub fn max_abs_diff(&self, other: &FieldState) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

/// Named tolerances used across the crate. Each bound has a distinct origin:
///
/// * `eq_tol`: entry-wise agreement of two analytic routes to the same
///   operator; pure rounding noise, so it sits near machine precision.
/// * `spectral_tol`: eigen-relation residuals, which accumulate one
///   matrix-vector product of rounding.
/// * `ode_tol`: Runge-Kutta truncation error against analytic propagation.
/// * `revival_tol`: how far a fidelity peak may sit below 1 and still count
///   as a self-imaging point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceProfile {
    pub eq_tol: f64,
    pub spectral_tol: f64,
    pub ode_tol: f64,
    pub revival_tol: f64,
}

impl Default for ToleranceProfile {
    fn default() -> Self {
        ToleranceProfile {
            eq_tol: 1e-12,
            spectral_tol: 1e-10,
            ode_tol: 1e-6,
            revival_tol: 1e-9,
        }
    }
}

impl ToleranceProfile {
    /// All four bounds must be finite and in (0, 1).
    pub fn validate(&self) -> Result<()> {
        let ok = [
            self.eq_tol,
            self.spectral_tol,
            self.ode_tol,
            self.revival_tol,
        ]
        .iter()
        .all(|t| t.is_finite() && *t > 0.0 && *t < 1.0);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidTolerance)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn zr(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    /// 3-mode cyclic shift: ones on the superdiagonal plus a corner entry.
    fn cyclic3() -> Operator {
        Operator::from_fn(3, |r, c| if (r + 1) % 3 == c { zr(1.0) } else { zr(0.0) })
    }

    fn hadamard2() -> Operator {
        let s = 1.0 / 2.0_f64.sqrt();
        Operator::from_fn(2, |r, c| if r == 1 && c == 1 { zr(-s) } else { zr(s) })
    }

    #[test]
    fn identity_is_neutral_for_mat_mul() {
        let a = Operator::from_fn(3, |r, c| z((r * 3 + c) as f64, (r as f64) - (c as f64)));
        let i = Operator::identity(3);
        assert_eq!(i.mat_mul(&a).unwrap(), a);
        assert_eq!(a.mat_mul(&i).unwrap(), a);
    }

    #[test]
    fn cyclic_shift_is_unitary_exactly() {
        let v = cyclic3();
        let prod = v.mat_mul(&v.adjoint()).unwrap();
        assert_eq!(prod, Operator::identity(3));
        assert_eq!(v.unitarity_defect(), 0.0);
    }

    #[test]
    fn two_mode_swap_squares_to_identity() {
        let v = Operator::from_fn(2, |r, c| if r != c { zr(1.0) } else { zr(0.0) });
        assert_eq!(v.mat_mul(&v).unwrap(), Operator::identity(2));
    }

    #[test]
    fn adjoint_is_an_involution() {
        let a = Operator::from_fn(4, |r, c| z(r as f64 + 0.5, c as f64 - 1.5));
        assert_eq!(a.adjoint().adjoint(), a);
    }

    #[test]
    fn adjoint_conjugates_and_transposes() {
        let a = Operator::from_fn(2, |r, c| z(r as f64, c as f64 + 1.0));
        let ad = a.adjoint();
        assert_eq!(ad.entry(0, 1), z(1.0, -1.0));
        assert_eq!(ad.entry(1, 0), z(0.0, -2.0));
    }

    #[test]
    fn apply_shifts_basis_state_down() {
        let v = cyclic3();
        let e1 = FieldState::basis(3, 1).unwrap();
        let out = v.apply(&e1).unwrap();
        assert_eq!(out, FieldState::basis(3, 0).unwrap());
    }

    #[test]
    fn mat_mul_rejects_mismatched_dims() {
        let a = Operator::identity(2);
        let b = Operator::identity(3);
        assert_eq!(
            a.mat_mul(&b).unwrap_err(),
            Error::DimensionMismatch { left: 2, right: 3 }
        );
    }

    #[test]
    fn max_abs_diff_picks_the_worst_entry() {
        let a = Operator::identity(2);
        let bump = Operator::from_fn(2, |r, c| {
            if r == 1 && c == 0 {
                z(3e-3, 4e-3)
            } else {
                zr(0.0)
            }
        });
        let d = a.add(&bump).unwrap();
        let diff = a.max_abs_diff(&d).unwrap();
        assert!((diff - 5e-3).abs() < 1e-18);
    }

    #[test]
    fn conjugation_by_identity_reproduces_the_diagonal() {
        let diag = [z(1.0, 0.0), z(0.0, 2.0), z(-3.0, 0.5)];
        let out = conjugate_by_unitary(&Operator::identity(3), &diag).unwrap();
        assert_eq!(out, Operator::diagonal(&diag));
    }

    #[test]
    fn conjugation_by_hadamard_matches_hand_computation() {
        // H diag(0,1) H = (1/2) [[1,-1],[-1,1]]
        let out = conjugate_by_unitary(&hadamard2(), &[zr(0.0), zr(1.0)]).unwrap();
        let want = Operator::from_fn(2, |r, c| if r == c { zr(0.5) } else { zr(-0.5) });
        assert!(out.max_abs_diff(&want).unwrap() < 1e-15);
    }

    #[test]
    fn conjugation_rejects_non_finite_diagonal() {
        let bad = [zr(1.0), z(f64::NAN, 0.0)];
        let err = conjugate_by_unitary(&Operator::identity(2), &bad).unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }));
    }

    #[test]
    fn basis_state_has_unit_power() {
        let e = FieldState::basis(5, 3).unwrap();
        assert_eq!(e.total_power(), 1.0);
        assert_eq!(e.intensities()[3], 1.0);
        assert!(FieldState::basis(5, 5).is_err());
    }

    #[test]
    fn inner_product_is_conjugate_linear_on_the_left() {
        let a = FieldState::new(vec![z(0.0, 1.0), zr(0.0)]);
        let b = FieldState::new(vec![zr(1.0), zr(0.0)]);
        assert_eq!(a.inner(&b).unwrap(), z(0.0, -1.0));
    }

    #[test]
    fn default_tolerances_are_valid() {
        let tol = ToleranceProfile::default();
        assert!(tol.validate().is_ok());
        assert_eq!(tol.eq_tol, 1e-12);
        assert_eq!(tol.spectral_tol, 1e-10);
        assert_eq!(tol.ode_tol, 1e-6);
        assert_eq!(tol.revival_tol, 1e-9);
    }

    #[test]
    fn tolerance_validation_rejects_out_of_range_values() {
        let zero = ToleranceProfile {
            ode_tol: 0.0,
            ..Default::default()
        };
        assert_eq!(zero.validate().unwrap_err(), Error::InvalidTolerance);
        let one = ToleranceProfile {
            ode_tol: 1.0,
            ..Default::default()
        };
        assert_eq!(one.validate().unwrap_err(), Error::InvalidTolerance);
    }
}
