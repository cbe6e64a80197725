//! Elements of the 2x2 matrix algebra written as `w0·1 + w·σ`, and states
//! written as Bloch vectors.

use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dense::{pauli_basis, CMatrix};
use crate::error::{Error, Result};
use crate::tolerance::DEFAULT;
use crate::vec3::{self, C3, C3_ZERO, R3};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `x = w0·1 + w1·σ1 + w2·σ2 + w3·σ3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliElement {
    pub w0: Complex64,
    pub w: C3,
}

impl PauliElement {
    pub const fn new(w0: Complex64, w: C3) -> Self {
        Self { w0, w }
    }

    /// A self-adjoint element from real coefficients.
    pub fn real(w0: f64, w: R3) -> Self {
        Self::new(Complex64::new(w0, 0.0), vec3::from_real(&w))
    }

    pub fn identity() -> Self {
        Self::real(1.0, [0.0; 3])
    }

    pub fn zero() -> Self {
        Self::new(Complex64::new(0.0, 0.0), C3_ZERO)
    }

    /// σ_k for `k` in 1..=3.
    pub fn sigma(k: usize) -> Self {
        assert!((1..=3).contains(&k), "Pauli index {k} out of range");
        let mut w = [0.0; 3];
        w[k - 1] = 1.0;
        Self::real(0.0, w)
    }

    /// The vector part only: `w·σ`.
    pub fn from_vector(w: C3) -> Self {
        Self::new(Complex64::new(0.0, 0.0), w)
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.w0.conj(), vec3::conj(&self.w))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.w0 * s, vec3::scale(&self.w, s))
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(self.w0 - other.w0, vec3::sub(&self.w, &other.w))
    }

    /// Largest imaginary part among the coefficients.
    pub fn self_adjoint_deviation(&self) -> f64 {
        self.w0.im.abs().max(vec3::max_imag(&self.w))
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.self_adjoint_deviation() <= DEFAULT.hermitian
    }

    /// Smallest eigenvalue `w0 - ||w||` of a self-adjoint element.
    pub fn min_eigenvalue(&self) -> f64 {
        self.w0.re - vec3::norm(&self.w)
    }

    pub fn to_dense(&self) -> CMatrix {
        pauli_to_dense(self)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let d = self.sub(other);
        d.w.iter().map(|z| z.norm()).fold(d.w0.norm(), f64::max)
    }
}

impl Mul for PauliElement {
    type Output = PauliElement;
    fn mul(self, rhs: PauliElement) -> PauliElement {
        pauli_mul(&self, &rhs)
    }
}

pub fn pauli_to_dense(x: &PauliElement) -> CMatrix {
    let mut m = pauli_basis(0).scale(x.w0);
    for k in 0..3 {
        m = &m + &pauli_basis(k + 1).scale(x.w[k]);
    }
    m
}

/// Inverse of [`pauli_to_dense`]: `w0 = Tr(M)/2`, `w_k = Tr(M σ_k)/2`.
pub fn dense_to_pauli(m: &CMatrix) -> PauliElement {
    assert_eq!(m.dim(), 2, "expected a 2x2 matrix");
    let half = Complex64::new(0.5, 0.0);
    let w0 = m.trace() * half;
    let w = [1, 2, 3].map(|k| (m * &pauli_basis(k)).trace() * half);
    PauliElement::new(w0, w)
}

/// Product in the Pauli basis, from `σ_m σ_l = δ_ml·1 + i ε_mlk σ_k`.
pub fn pauli_mul(x: &PauliElement, y: &PauliElement) -> PauliElement {
    let dot = x.w[0] * y.w[0] + x.w[1] * y.w[1] + x.w[2] * y.w[2];
    let cross = vec3::cross(&x.w, &y.w);
    let w0 = x.w0 * y.w0 + dot;
    let w = [0, 1, 2].map(|k| x.w0 * y.w[k] + y.w0 * x.w[k] + I * cross[k]);
    PauliElement::new(w0, w)
}

/// Normalized trace `Tr(x)/2`.
pub fn tau(x: &PauliElement) -> Complex64 {
    x.w0
}

/// `φ_f(x) = w0 + <w, f>`.
pub fn eval_state(f: &StateVec, x: &PauliElement) -> Complex64 {
    x.w0 + vec3::inner(&x.w, &vec3::from_real(&f.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositivityVerdict {
    pub positive: bool,
    /// `w0 - ||w||`; negative means the element has a negative eigenvalue.
    pub margin: f64,
}

/// `x >= 0` iff `x` is self-adjoint and `||w|| <= w0`.
pub fn is_positive_element(x: &PauliElement) -> PositivityVerdict {
    let margin = x.min_eigenvalue();
    PositivityVerdict {
        positive: x.is_self_adjoint() && margin >= -DEFAULT.positivity,
        margin,
    }
}

/// A state identified with its Bloch vector `f`, `||f|| <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateVec(R3);

impl StateVec {
    pub fn new(f: R3) -> Result<Self> {
        let norm = vec3::real_norm(&f);
        if !(norm <= 1.0 + DEFAULT.positivity) {
            return Err(Error::OutsideBall { norm });
        }
        Ok(Self(f))
    }

    /// Projects onto the closed unit ball; never fails.
    pub fn clamped(f: R3) -> Self {
        let norm = vec3::real_norm(&f);
        if norm > 1.0 {
            Self([f[0] / norm, f[1] / norm, f[2] / norm])
        } else {
            Self(f)
        }
    }

    pub fn e1() -> Self {
        Self([1.0, 0.0, 0.0])
    }

    pub fn origin() -> Self {
        Self([0.0; 3])
    }

    pub fn get(&self) -> R3 {
        self.0
    }

    pub fn norm(&self) -> f64 {
        vec3::real_norm(&self.0)
    }

    /// `max_i |f_i|`.
    pub fn gamma(&self) -> f64 {
        self.0.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

impl From<StateVec> for R3 {
    fn from(s: StateVec) -> R3 {
        s.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_element(rng: &mut ChaCha8Rng) -> PauliElement {
        let mut z = || c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        PauliElement::new(z(), [z(), z(), z()])
    }

    #[test]
    fn identity_embeds_as_identity() {
        assert_eq!(PauliElement::identity().to_dense(), CMatrix::identity(2));
    }

    #[test]
    fn sigma1_embeds_as_swap() {
        let m = PauliElement::sigma(1).to_dense();
        assert_eq!(m, CMatrix::from_real_rows([[0.0, 1.0], [1.0, 0.0]]));
    }

    #[test]
    fn projector_from_halves() {
        let x = PauliElement::real(0.5, [0.0, 0.0, 0.5]);
        assert_eq!(x.to_dense(), CMatrix::from_real_rows([[1.0, 0.0], [0.0, 0.0]]));
        let back = dense_to_pauli(&CMatrix::from_real_rows([[1.0, 0.0], [0.0, 0.0]]));
        assert!(back.max_abs_diff(&x) < 1e-15);
        assert!(dense_to_pauli(&CMatrix::identity(2)).max_abs_diff(&PauliElement::identity()) < 1e-15);
    }

    #[test]
    fn dense_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..500 {
            let m = CMatrix::from_fn(2, |_, _| c(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)));
            assert!(pauli_to_dense(&dense_to_pauli(&m)).max_abs_diff(&m) < 1e-14);
        }
    }

    #[test]
    fn sigma1_sigma2_is_i_sigma3() {
        let p = PauliElement::sigma(1) * PauliElement::sigma(2);
        let expected = PauliElement::new(c(0.0, 0.0), [c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)]);
        assert!(p.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn a_sigma_times_conj_a_sigma() {
        // Dense oracle: (σ1 + iσ2)(σ1 - iσ2) = [[4,0],[0,0]].
        let a = [c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)];
        let x = PauliElement::from_vector(a);
        let y = PauliElement::from_vector(vec3::conj(&a));
        let p = x * y;
        let expected = PauliElement::new(c(2.0, 0.0), [c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]);
        assert!(p.max_abs_diff(&expected) < 1e-15);
        let dense = &x.to_dense() * &y.to_dense();
        assert!(dense.max_abs_diff(&CMatrix::from_real_rows([[4.0, 0.0], [0.0, 0.0]])) < 1e-13);
    }

    #[test]
    fn product_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let x = random_element(&mut rng);
            let y = random_element(&mut rng);
            let lhs = pauli_to_dense(&(x * y));
            let rhs = &x.to_dense() * &y.to_dense();
            assert!(lhs.max_abs_diff(&rhs) < 1e-13);
        }
    }

    #[test]
    fn state_evaluation() {
        let f = StateVec::new([0.6, 0.0, 0.8]).unwrap();
        assert!((eval_state(&f, &PauliElement::identity()) - c(1.0, 0.0)).norm() < 1e-15);
        let x = PauliElement::real(0.5, [0.5, 0.0, 0.0]);
        assert!((eval_state(&f, &x) - c(0.8, 0.0)).norm() < 1e-15);
        let e1 = StateVec::e1();
        assert_eq!(eval_state(&e1, &PauliElement::sigma(1)), c(1.0, 0.0));
    }

    #[test]
    fn tau_is_half_trace() {
        assert_eq!(tau(&PauliElement::identity()), c(1.0, 0.0));
        for k in 1..=3 {
            assert_eq!(tau(&PauliElement::sigma(k)), c(0.0, 0.0));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let x = random_element(&mut rng);
            assert!((tau(&x) - x.to_dense().trace() * 0.5).norm() < 1e-15);
        }
    }

    #[test]
    fn positivity_boundaries() {
        let v = is_positive_element(&PauliElement::real(1.0, [0.0, 0.0, 1.0]));
        assert!(v.positive);
        assert_eq!(v.margin, 0.0);
        assert!(!is_positive_element(&PauliElement::real(0.5, [0.6, 0.0, 0.0])).positive);
        let id = is_positive_element(&PauliElement::identity());
        assert!(id.positive && id.margin == 1.0);
        let not_sa = PauliElement::new(c(2.0, 0.1), C3_ZERO);
        assert!(!is_positive_element(&not_sa).positive);
    }

    #[test]
    fn state_outside_ball_rejected() {
        assert!(matches!(StateVec::new([1.0, 0.1, 0.0]), Err(Error::OutsideBall { .. })));
        assert!(StateVec::new([1.0 + 1e-13, 0.0, 0.0]).is_ok());
        assert_eq!(StateVec::new([0.2, -0.7, 0.1]).unwrap().gamma(), 0.7);
    }
}
