//! Haar-state quadratic operators `Δ: M₂ → M₂ ⊗ M₂` stored as the 27 real
//! coefficients `b[m][l][k]`, with
//!
//! ```text
//! Δ(w0·1 + w·σ) = w0·1⊗1 + Σ_{m,l} (Σ_k b[m][l][k]·w_k) σ_m ⊗ σ_l
//! ```
//!
//! Indices are 0-based in code and 1-based in files and reports.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dense::{eigh, min_eigenvalue, pauli_basis, CMatrix, DenseHermitian};
use crate::error::{Error, Result};
use crate::pauli::{is_positive_element, PauliElement, StateVec};
use crate::sampling::{self, fibonacci_sphere, Stream};
use crate::tolerance::{ScanConfig, DEFAULT};
use crate::vec3::{self, C3, C3_ZERO, C_ZERO, R3};

pub type Coefficients = [[[f64; 3]; 3]; 3];

/// The 27 structure coefficients `b_{ml,k}` of a Haar-form operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QqoTensor {
    b: Coefficients,
}

impl Default for QqoTensor {
    fn default() -> Self {
        Self::zero()
    }
}

impl QqoTensor {
    /// The trivial operator `Δ(x) = w0·1⊗1`.
    pub fn zero() -> Self {
        Self {
            b: [[[0.0; 3]; 3]; 3],
        }
    }

    pub fn new(b: Coefficients) -> Result<Self> {
        if b.iter().flatten().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "tensor coefficients must be finite".into(),
            ));
        }
        Ok(Self { b })
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut b = [[[0.0; 3]; 3]; 3];
        for (m, plane) in b.iter_mut().enumerate() {
            for (l, row) in plane.iter_mut().enumerate() {
                for (k, v) in row.iter_mut().enumerate() {
                    *v = f(m, l, k);
                }
            }
        }
        Self { b }
    }

    /// Single nonzero coefficient, 0-based indices.
    pub fn single(m: usize, l: usize, k: usize, value: f64) -> Self {
        let mut t = Self::zero();
        t.b[m][l][k] = value;
        t
    }

    #[inline]
    pub fn get(&self, m: usize, l: usize, k: usize) -> f64 {
        self.b[m][l][k]
    }

    pub fn set(&mut self, m: usize, l: usize, k: usize, value: f64) {
        self.b[m][l][k] = value;
    }

    pub fn coefficients(&self) -> &Coefficients {
        &self.b
    }

    /// The vector `b_ml = (b_{ml,1}, b_{ml,2}, b_{ml,3})`.
    pub fn b_vec(&self, m: usize, l: usize) -> R3 {
        self.b[m][l]
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::from_fn(|m, l, k| self.b[m][l][k] * s)
    }

    pub fn sum_of_squares(&self) -> f64 {
        self.b.iter().flatten().flatten().map(|v| v * v).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.b.iter().flatten().flatten().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

/// Element of `M₂ ⊗ M₂` in the basis `{1, σ} ⊗ {1, σ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TensorSquareElement {
    /// Coefficient of `1 ⊗ 1`.
    pub c00: Complex64,
    /// Coefficients of `σ_m ⊗ 1`.
    pub c10: C3,
    /// Coefficients of `1 ⊗ σ_l`.
    pub c01: C3,
    /// Coefficients of `σ_m ⊗ σ_l`.
    pub c: [[Complex64; 3]; 3],
}

impl TensorSquareElement {
    pub fn zero() -> Self {
        Self {
            c00: C_ZERO,
            c10: C3_ZERO,
            c01: C3_ZERO,
            c: [[C_ZERO; 3]; 3],
        }
    }

    pub fn identity() -> Self {
        Self {
            c00: Complex64::new(1.0, 0.0),
            ..Self::zero()
        }
    }

    /// Coefficient of `s_a ⊗ s_b` where `s_0 = 1` and `s_k = σ_k`.
    pub fn coefficient(&self, a: usize, b: usize) -> Complex64 {
        match (a, b) {
            (0, 0) => self.c00,
            (m, 0) => self.c10[m - 1],
            (0, l) => self.c01[l - 1],
            (m, l) => self.c[m - 1][l - 1],
        }
    }

    fn coefficient_mut(&mut self, a: usize, b: usize) -> &mut Complex64 {
        match (a, b) {
            (0, 0) => &mut self.c00,
            (m, 0) => &mut self.c10[m - 1],
            (0, l) => &mut self.c01[l - 1],
            (m, l) => &mut self.c[m - 1][l - 1],
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for a in 0..4 {
            for b in 0..4 {
                *out.coefficient_mut(a, b) = self.coefficient(a, b) - other.coefficient(a, b);
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0f64;
        for a in 0..4 {
            for b in 0..4 {
                worst = worst.max((self.coefficient(a, b) - other.coefficient(a, b)).norm());
            }
        }
        worst
    }

    /// Self-adjoint iff every coefficient is real.
    pub fn self_adjoint_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in 0..4 {
            for b in 0..4 {
                worst = worst.max(self.coefficient(a, b).im.abs());
            }
        }
        worst
    }

    pub fn to_dense(&self) -> CMatrix {
        tensor_square_to_dense(self)
    }

    /// Inverse of the Kronecker embedding: `coef_ab = Tr(M (s_a ⊗ s_b)) / 4`.
    pub fn from_dense(m: &CMatrix) -> Self {
        assert_eq!(m.dim(), 4, "expected a 4x4 matrix");
        let mut out = Self::zero();
        for a in 0..4 {
            for b in 0..4 {
                let basis = pauli_basis(a).kron(&pauli_basis(b));
                *out.coefficient_mut(a, b) = (m * &basis).trace() * 0.25;
            }
        }
        out
    }
}

pub fn tensor_square_to_dense(e: &TensorSquareElement) -> CMatrix {
    let mut out = CMatrix::zeros(4);
    for a in 0..4 {
        for b in 0..4 {
            let coef = e.coefficient(a, b);
            if coef != C_ZERO {
                out = &out + &pauli_basis(a).kron(&pauli_basis(b)).scale(coef);
            }
        }
    }
    out
}

/// `Δ(x)` for a Haar-form operator.
pub fn apply_delta(t: &QqoTensor, x: &PauliElement) -> TensorSquareElement {
    let mut out = TensorSquareElement::zero();
    out.c00 = x.w0;
    for m in 0..3 {
        for l in 0..3 {
            out.c[m][l] = (0..3)
                .map(|k| x.w[k] * t.get(m, l, k))
                .sum::<Complex64>();
        }
    }
    out
}

/// Dense 4x4 matrix of `Δ(x)`.
pub fn delta_dense(t: &QqoTensor, x: &PauliElement) -> CMatrix {
    tensor_square_to_dense(&apply_delta(t, x))
}

/// `β(f)_{ij} = Σ_k b_{ki,j} f_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BMatrix(pub [[f64; 3]; 3]);

impl BMatrix {
    pub fn apply(&self, w: &C3) -> C3 {
        std::array::from_fn(|i| (0..3).map(|j| w[j] * self.0[i][j]).sum())
    }

    pub fn row(&self, i: usize) -> R3 {
        self.0[i]
    }

    pub fn transpose_apply_real(&self, f: &R3) -> R3 {
        std::array::from_fn(|j| (0..3).map(|i| self.0[i][j] * f[i]).sum())
    }
}

pub fn b_matrix(t: &QqoTensor, f: &StateVec) -> BMatrix {
    b_matrix_raw(t, &f.get())
}

pub(crate) fn b_matrix_raw(t: &QqoTensor, f: &R3) -> BMatrix {
    let mut beta = [[0.0; 3]; 3];
    for (i, row) in beta.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = (0..3).map(|k| t.get(k, i, j) * f[k]).sum();
        }
    }
    BMatrix(beta)
}

/// Largest singular value and its right/left singular vectors of a real 3x3 matrix.
fn top_singular(a: &[[f64; 3]; 3]) -> (f64, R3, R3) {
    let ata = CMatrix::from_fn(3, |i, j| {
        Complex64::new((0..3).map(|r| a[r][i] * a[r][j]).sum(), 0.0)
    });
    let e = eigh(&DenseHermitian::with_tolerance(ata, f64::INFINITY).expect("symmetric by construction"));
    let v: R3 = std::array::from_fn(|r| e.vectors[(r, 2)].re);
    let v = vec3::real_normalize(&v).unwrap_or([1.0, 0.0, 0.0]);
    let av: R3 = std::array::from_fn(|r| (0..3).map(|c| a[r][c] * v[c]).sum());
    let sigma = vec3::real_norm(&av);
    let u = vec3::real_normalize(&av).unwrap_or([1.0, 0.0, 0.0]);
    (sigma, v, u)
}

/// Euclidean operator norm, `sqrt(λ_max(BᵀB))`.
pub fn spectral_norm3(b: &BMatrix) -> f64 {
    let ata = CMatrix::from_fn(3, |i, j| {
        Complex64::new((0..3).map(|r| b.0[r][i] * b.0[r][j]).sum(), 0.0)
    });
    let ev = crate::dense::eig_hermitian(
        &DenseHermitian::with_tolerance(ata, f64::INFINITY).expect("symmetric by construction"),
    );
    ev[2].max(0.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TripleNorm {
    /// Certified lower bound on `sup_{f ∈ S} ||B(f)||`.
    pub estimate: f64,
    pub argmax: R3,
    /// Best value on the coarse grid before refinement.
    pub grid_estimate: f64,
    /// `estimate - grid_estimate`; a heuristic for how far the grid was from the optimum.
    pub gap_estimate: f64,
}

impl TripleNorm {
    pub fn at_most_one(&self) -> bool {
        self.estimate <= 1.0 + DEFAULT.triple_norm
    }
}

const REFINE_SEEDS: usize = 8;

/// Lower bound on `|||B||| = sup_{f ∈ S} ||B(f)||`.
///
/// `B` is linear in `f`, so the supremum sits on the unit sphere. The grid is
/// scanned first; the best seeds are then refined by alternating between the
/// top singular pair `(u, v)` of `B(f)` and `f ∝ (uᵀ B_k v)_k`, which never
/// decreases `||B(f)||`.
pub fn triple_norm(t: &QqoTensor, grid_n: usize, refine_steps: usize) -> TripleNorm {
    assert!(grid_n >= 1, "grid_n must be positive");
    let grid = fibonacci_sphere(grid_n);
    let norms: Vec<f64> = crate::par::map(&grid, |f| spectral_norm3(&b_matrix_raw(t, f)));

    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]).then(a.cmp(&b)));
    let grid_best = order[0];
    let grid_estimate = norms[grid_best];

    let mut best = (grid_estimate, grid[grid_best]);
    for &seed in order.iter().take(REFINE_SEEDS) {
        let (value, f) = refine_triple_norm(t, grid[seed], refine_steps);
        if value > best.0 {
            best = (value, f);
        }
    }
    TripleNorm {
        estimate: best.0,
        argmax: best.1,
        grid_estimate,
        gap_estimate: best.0 - grid_estimate,
    }
}

fn refine_triple_norm(t: &QqoTensor, start: R3, steps: usize) -> (f64, R3) {
    let mut f = start;
    let mut value = spectral_norm3(&b_matrix_raw(t, &f));
    for _ in 0..steps {
        let (_, v, u) = top_singular(&b_matrix_raw(t, &f).0);
        let g: R3 = std::array::from_fn(|k| {
            let mut s = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    s += u[i] * t.get(k, i, j) * v[j];
                }
            }
            s
        });
        let Some(next) = vec3::real_normalize(&g) else { break };
        let next_value = spectral_norm3(&b_matrix_raw(t, &next));
        if next_value <= value {
            break;
        }
        f = next;
        value = next_value;
    }
    (value, f)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DStar1Check {
    pub holds: bool,
    /// Largest sampled value of `Σ_k |Σ_{ij} b_{ij,k} f_i p_j|²`.
    pub worst: f64,
    /// `1 - worst`.
    pub margin: f64,
    pub witness_f: R3,
    pub witness_p: R3,
}

/// `Σ_k |Σ_{ij} b_{ij,k} f_i p_j|²`.
pub fn dstar1_value(t: &QqoTensor, f: &R3, p: &R3) -> f64 {
    (0..3)
        .map(|k| {
            let mut s = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    s += t.get(i, j, k) * f[i] * p[j];
                }
            }
            s * s
        })
        .sum()
}

/// Sampled check of the product-state positivity bound
/// `Σ_k |Σ_{ij} b_{ij,k} f_i p_j|² <= 1` for all `f, p ∈ S`.
///
/// Scans every pair of sphere-grid points plus `pair_samples` random interior
/// pairs, then sharpens the worst pair by alternating maximization over `f`
/// and `p`.
pub fn check_dstar1(t: &QqoTensor, cfg: &ScanConfig) -> DStar1Check {
    assert!(cfg.pair_samples >= 1, "sample_count must be positive");
    let grid = fibonacci_sphere(cfg.sphere_points);

    // For fixed f, the form is p ↦ ||M_f p||² with M_f[k][j] = Σ_i b_{ij,k} f_i.
    let per_f: Vec<(f64, usize)> = crate::par::map(&grid, |f| {
        let mf = form_matrix_in_p(t, f);
        let mut best = (f64::NEG_INFINITY, 0usize);
        for (pi, p) in grid.iter().enumerate() {
            let v = apply_sq(&mf, p);
            if v > best.0 {
                best = (v, pi);
            }
        }
        best
    });
    let mut worst = (f64::NEG_INFINITY, [0.0; 3], [0.0; 3]);
    for (fi, &(v, pi)) in per_f.iter().enumerate() {
        if v > worst.0 {
            worst = (v, grid[fi], grid[pi]);
        }
    }

    let mut rng = sampling::rng(cfg.seed, Stream::DStar1Pairs);
    for _ in 0..cfg.pair_samples {
        let f = sampling::random_ball_point(&mut rng);
        let p = sampling::random_ball_point(&mut rng);
        let v = dstar1_value(t, &f, &p);
        if v > worst.0 {
            worst = (v, f, p);
        }
    }

    let (mut value, mut f, mut p) = worst;
    for _ in 0..cfg.refine_steps {
        let Some(nf) = top_right_vector(&form_matrix_in_f(t, &p)) else { break };
        let Some(np) = top_right_vector(&form_matrix_in_p(t, &nf)) else { break };
        let nv = dstar1_value(t, &nf, &np);
        if nv <= value {
            break;
        }
        (value, f, p) = (nv, nf, np);
    }

    DStar1Check {
        holds: value <= 1.0 + DEFAULT.dstar1,
        worst: value,
        margin: 1.0 - value,
        witness_f: f,
        witness_p: p,
    }
}

fn form_matrix_in_p(t: &QqoTensor, f: &R3) -> [[f64; 3]; 3] {
    std::array::from_fn(|k| std::array::from_fn(|j| (0..3).map(|i| t.get(i, j, k) * f[i]).sum()))
}

fn form_matrix_in_f(t: &QqoTensor, p: &R3) -> [[f64; 3]; 3] {
    std::array::from_fn(|k| std::array::from_fn(|i| (0..3).map(|j| t.get(i, j, k) * p[j]).sum()))
}

fn apply_sq(m: &[[f64; 3]; 3], p: &R3) -> f64 {
    m.iter()
        .map(|row| {
            let s = row[0] * p[0] + row[1] * p[1] + row[2] * p[2];
            s * s
        })
        .sum()
}

fn top_right_vector(m: &[[f64; 3]; 3]) -> Option<R3> {
    let (sigma, v, _) = top_singular(m);
    (sigma > 0.0).then_some(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DStar3Check {
    pub holds: bool,
    /// `Σ_{ijk} b_{ij,k}²`.
    pub value: f64,
}

/// Sum-of-squares sufficient condition for the product-state bound.
pub fn check_dstar3(t: &QqoTensor) -> DStar3Check {
    let value = t.sum_of_squares();
    DStar3Check {
        holds: value <= 1.0 + DEFAULT.dstar3,
        value,
    }
}

/// Max deviation of `(τ⊗id)Δ(x)` and `(id⊗τ)Δ(x)` from `τ(x)·1`.
///
/// Tracing out a factor kills every `σ` on that side, so the left marginal is
/// `c00·1 + c01·σ` and the right marginal is `c00·1 + c10·σ`.
pub fn haar_check(t: &QqoTensor, x: &PauliElement) -> f64 {
    let d = apply_delta(t, x);
    let scalar = (d.c00 - x.w0).norm();
    let left = d.c01.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let right = d.c10.iter().map(|z| z.norm()).fold(0.0, f64::max);
    scalar.max(left).max(right)
}

/// Smallest eigenvalue of `Δ(x)` for a positive `x`.
pub fn positivity_oracle(t: &QqoTensor, x: &PauliElement) -> Result<f64> {
    let verdict = is_positive_element(x);
    if !verdict.positive {
        return Err(Error::NotPositive {
            margin: verdict.margin,
        });
    }
    let m = DenseHermitian::with_tolerance(delta_dense(t, x), 1e-10)?;
    Ok(min_eigenvalue(&m))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositivitySearch {
    /// Most negative `λ_min(Δ(1 + w·σ))` over the sphere grid.
    pub min_eigenvalue: f64,
    pub witness_w: R3,
}

/// Scans the extreme positive elements `1 + w·σ`, `||w|| = 1`.
pub fn positivity_search(t: &QqoTensor, grid_n: usize) -> PositivitySearch {
    let grid = fibonacci_sphere(grid_n);
    let values = crate::par::map(&grid, |w| {
        positivity_oracle(t, &PauliElement::real(1.0, *w)).expect("1 + w·σ with |w| = 1 is positive")
    });
    let (idx, &min) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(&b.0)))
        .expect("non-empty grid");
    PositivitySearch {
        min_eigenvalue: min,
        witness_w: grid[idx],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlipSymmetry {
    pub symmetric: bool,
    /// `max |b_{ml,k} - b_{lm,k}|`.
    pub max_asymmetry: f64,
}

/// `UΔ = Δ` for the flip `U(x⊗y) = y⊗x`, i.e. `b_{ml,k} = b_{lm,k}`.
pub fn check_flip_symmetry(t: &QqoTensor) -> FlipSymmetry {
    let mut worst = 0.0f64;
    for m in 0..3 {
        for l in 0..3 {
            for k in 0..3 {
                worst = worst.max((t.get(m, l, k) - t.get(l, m, k)).abs());
            }
        }
    }
    FlipSymmetry {
        symmetric: worst == 0.0,
        max_asymmetry: worst,
    }
}

/// Max elementwise deviation between `(Δ⊗id)∘Δ(σ_i)` and `(id⊗Δ)∘Δ(σ_i)` as 8x8 matrices.
pub fn check_coassociativity(t: &QqoTensor) -> f64 {
    let delta_sigma: Vec<CMatrix> = (1..=3)
        .map(|m| delta_dense(t, &PauliElement::sigma(m)))
        .collect();
    let mut worst = 0.0f64;
    for i in 0..3 {
        let mut left = CMatrix::zeros(8);
        let mut right = CMatrix::zeros(8);
        for m in 0..3 {
            for l in 0..3 {
                let b = t.get(m, l, i);
                if b == 0.0 {
                    continue;
                }
                let s = Complex64::new(b, 0.0);
                left = &left + &delta_sigma[m].kron(&pauli_basis(l + 1)).scale(s);
                right = &right + &pauli_basis(m + 1).kron(&delta_sigma[l]).scale(s);
            }
        }
        worst = worst.max(left.max_abs_diff(&right));
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// The three-parameter example with a = b = 1/√3, c = 0.
    fn flagship() -> QqoTensor {
        abc(1.0 / 3f64.sqrt(), 1.0 / 3f64.sqrt(), 0.0)
    }

    fn abc(a: f64, b: f64, cc: f64) -> QqoTensor {
        let mut t = QqoTensor::single(0, 0, 0, 1.0);
        t.set(1, 1, 1, a);
        t.set(2, 2, 1, b);
        t.set(2, 2, 2, cc);
        t
    }

    fn random_tensor(rng: &mut ChaCha8Rng) -> QqoTensor {
        QqoTensor::from_fn(|_, _, _| rng.random_range(-1.0..1.0))
    }

    fn random_element(rng: &mut ChaCha8Rng) -> PauliElement {
        let mut z = || c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        PauliElement::new(z(), [z(), z(), z()])
    }

    fn small_cfg() -> ScanConfig {
        ScanConfig {
            sphere_points: 400,
            pair_samples: 512,
            ..ScanConfig::default()
        }
    }

    #[test]
    fn delta_of_identity_is_identity() {
        let d = apply_delta(&flagship(), &PauliElement::identity());
        assert_eq!(d, TensorSquareElement::identity());
    }

    #[test]
    fn delta_of_sigma2_on_abc_family() {
        let (a, b) = (0.3, -0.7);
        let d = apply_delta(&abc(a, b, 0.4), &PauliElement::sigma(2));
        for m in 0..3 {
            for l in 0..3 {
                let expected = match (m, l) {
                    (1, 1) => a,
                    (2, 2) => b,
                    _ => 0.0,
                };
                assert_eq!(d.c[m][l], c(expected, 0.0), "entry ({m},{l})");
            }
        }
    }

    #[test]
    fn delta_preserves_self_adjointness() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let t = random_tensor(&mut rng);
            let w0 = rng.random_range(-1.0..1.0);
            let x = PauliElement::real(w0, std::array::from_fn(|_| rng.random_range(-1.0..1.0)));
            assert!(delta_dense(&t, &x).hermitian_deviation() < 1e-14);
        }
    }

    #[test]
    fn kronecker_embedding() {
        assert_eq!(TensorSquareElement::identity().to_dense(), CMatrix::identity(4));
        let mut e = TensorSquareElement::zero();
        e.c[2][2] = c(1.0, 0.0);
        assert_eq!(e.to_dense(), CMatrix::diag(&[1.0, -1.0, -1.0, 1.0]));
    }

    #[test]
    fn tensor_square_round_trip_and_hermiticity() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..100 {
            let mut e = TensorSquareElement::zero();
            let real = rng.random_bool(0.5);
            for a in 0..4 {
                for b in 0..4 {
                    let im = if real { 0.0 } else { rng.random_range(-1.0..1.0) };
                    *e.coefficient_mut(a, b) = c(rng.random_range(-1.0..1.0), im);
                }
            }
            let dense = e.to_dense();
            assert!(TensorSquareElement::from_dense(&dense).max_abs_diff(&e) < 1e-13);
            assert_eq!(dense.hermitian_deviation() < 1e-14, real);
        }
    }

    #[test]
    fn b_matrix_examples() {
        let f = StateVec::e1();
        assert_eq!(b_matrix(&QqoTensor::zero(), &f).0, [[0.0; 3]; 3]);
        assert_eq!(
            b_matrix(&flagship(), &f).0,
            [[1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]
        );
        let (a, b, cc) = (0.3, -0.6, 0.5);
        let f = StateVec::new([0.2, -0.4, 0.7]).unwrap();
        let beta = b_matrix(&abc(a, b, cc), &f).0;
        let [f1, f2, f3] = f.get();
        let expected = [[f1, 0.0, 0.0], [0.0, a * f2, 0.0], [0.0, b * f3, cc * f3]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((beta[i][j] - expected[i][j]).abs() < 1e-15);
            }
        }
    }

    /// Conditional expectation `E_φ(M) = Tr₁[(ρ_f ⊗ 1) M]` with `ρ_f = (1 + f·σ)/2`.
    fn conditional_expectation(f: &R3, m: &CMatrix) -> CMatrix {
        let rho = PauliElement::real(0.5, [f[0] / 2.0, f[1] / 2.0, f[2] / 2.0]).to_dense();
        CMatrix::from_fn(2, |r, s| {
            let mut acc = c(0.0, 0.0);
            for a in 0..2 {
                for b in 0..2 {
                    acc += rho[(b, a)] * m[(2 * a + r, 2 * b + s)];
                }
            }
            acc
        })
    }

    #[test]
    fn b_matrix_is_conditional_expectation_compression() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..200 {
            let t = random_tensor(&mut rng);
            let f = StateVec::clamped(std::array::from_fn(|_| rng.random_range(-1.0..1.0)));
            let x = random_element(&mut rng);
            let ce = crate::pauli::dense_to_pauli(&conditional_expectation(&f.get(), &delta_dense(&t, &x)));
            let bw = b_matrix(&t, &f).apply(&x.w);
            assert!((ce.w0 - x.w0).norm() < 1e-13);
            for k in 0..3 {
                assert!((ce.w[k] - bw[k]).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn b_matrix_is_linear_in_f() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let t = random_tensor(&mut rng);
        let f: R3 = [0.1, 0.2, -0.3];
        let g: R3 = [-0.4, 0.0, 0.5];
        let (alpha, gamma) = (0.7, -1.3);
        let combo: R3 = std::array::from_fn(|i| alpha * f[i] + gamma * g[i]);
        let lhs = b_matrix_raw(&t, &combo).0;
        let (bf, bg) = (b_matrix_raw(&t, &f).0, b_matrix_raw(&t, &g).0);
        for i in 0..3 {
            for j in 0..3 {
                assert!((lhs[i][j] - alpha * bf[i][j] - gamma * bg[i][j]).abs() < 1e-13);
            }
        }
    }

    fn power_iteration_norm(b: &[[f64; 3]; 3]) -> f64 {
        let mut v = [1.0, 0.7, 0.3];
        for _ in 0..2000 {
            let bv: R3 = std::array::from_fn(|r| (0..3).map(|c| b[r][c] * v[c]).sum());
            let btbv: R3 = std::array::from_fn(|c| (0..3).map(|r| b[r][c] * bv[r]).sum());
            match vec3::real_normalize(&btbv) {
                Some(n) => v = n,
                None => return 0.0,
            }
        }
        let bv: R3 = std::array::from_fn(|r| (0..3).map(|c| b[r][c] * v[c]).sum());
        vec3::real_norm(&bv)
    }

    #[test]
    fn spectral_norm_examples() {
        assert_eq!(spectral_norm3(&BMatrix([[0.0; 3]; 3])), 0.0);
        let e11 = BMatrix([[1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]);
        assert!((spectral_norm3(&e11) - 1.0).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..200 {
            let b: [[f64; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| rng.random_range(-1.0..1.0)));
            assert!((spectral_norm3(&BMatrix(b)) - power_iteration_norm(&b)).abs() < 1e-10);
        }
    }

    #[test]
    fn triple_norm_examples() {
        assert_eq!(triple_norm(&QqoTensor::zero(), 100, 20).estimate, 0.0);
        let tn = triple_norm(&flagship(), 2562, 50);
        assert!((tn.estimate - 1.0).abs() < 1e-6, "{tn:?}");
        assert!(tn.argmax[0].abs() > 0.999);
        let single = QqoTensor::single(0, 0, 0, -1.7);
        assert!((triple_norm(&single, 2562, 50).estimate - 1.7).abs() < 1e-9);
    }

    #[test]
    fn triple_norm_refinement_never_lowers_grid_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for _ in 0..20 {
            let t = random_tensor(&mut rng);
            let tn = triple_norm(&t, 200, 30);
            assert!(tn.estimate >= tn.grid_estimate);
            assert!((spectral_norm3(&b_matrix_raw(&t, &tn.argmax)) - tn.estimate).abs() < 1e-12);
        }
    }

    #[test]
    fn dstar1_examples() {
        let cfg = small_cfg();
        let z = check_dstar1(&QqoTensor::zero(), &cfg);
        assert!(z.holds && z.worst == 0.0);

        let f = check_dstar1(&flagship(), &cfg);
        assert!(f.holds, "{f:?}");
        assert!((f.worst - 1.0).abs() < 1e-9);
        assert!(f.witness_f[0].abs() > 0.999 && f.witness_p[0].abs() > 0.999);

        let big = check_dstar1(&QqoTensor::single(0, 0, 0, 1.5), &cfg);
        assert!(!big.holds);
        assert!((big.worst - 2.25).abs() < 1e-9);
        assert!(big.witness_f[0].abs() > 0.999 && big.witness_p[0].abs() > 0.999);
        assert!((dstar1_value(&QqoTensor::single(0, 0, 0, 1.5), &[1.0, 0.0, 0.0], &[1.0, 0.0, 0.0]) - 2.25).abs() < 1e-15);
    }

    #[test]
    fn dstar3_examples() {
        assert_eq!(check_dstar3(&QqoTensor::zero()), DStar3Check { holds: true, value: 0.0 });
        let f = check_dstar3(&flagship());
        assert!(!f.holds && (f.value - 5.0 / 3.0).abs() < 1e-15);
        let sixth = check_dstar3(&QqoTensor::from_fn(|_, _, _| 1.0 / 6.0));
        assert!(sixth.holds && (sixth.value - 0.75).abs() < 1e-15);
    }

    #[test]
    fn haar_state_structure() {
        assert_eq!(haar_check(&flagship(), &PauliElement::identity()), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let t = random_tensor(&mut rng);
            for k in 1..=3 {
                assert_eq!(haar_check(&t, &PauliElement::sigma(k)), 0.0);
            }
            assert!(haar_check(&t, &random_element(&mut rng)) <= 1e-13);
        }
    }

    #[test]
    fn positivity_oracle_examples() {
        assert!((positivity_oracle(&flagship(), &PauliElement::identity()).unwrap() - 1.0).abs() < 1e-14);
        let x = PauliElement::real(1.0, [0.3, -0.5, 0.1]);
        assert!((positivity_oracle(&QqoTensor::zero(), &x).unwrap() - 1.0).abs() < 1e-14);
        let edge = PauliElement::real(1.0, [1.0, 0.0, 0.0]);
        assert!(positivity_oracle(&flagship(), &edge).unwrap().abs() < 1e-14);
        assert!(matches!(
            positivity_oracle(&flagship(), &PauliElement::sigma(1)),
            Err(Error::NotPositive { .. })
        ));
    }

    #[test]
    fn positivity_search_finds_violation_for_large_tensor() {
        let t = QqoTensor::single(0, 0, 0, 1.5);
        let s = positivity_search(&t, 400);
        assert!(s.min_eigenvalue < -0.4, "{s:?}");
    }

    #[test]
    fn flip_symmetry_examples() {
        assert!(check_flip_symmetry(&QqoTensor::zero()).symmetric);
        assert!(check_flip_symmetry(&flagship()).symmetric);
        let t = QqoTensor::single(0, 1, 0, 1.0);
        let fs = check_flip_symmetry(&t);
        assert!(!fs.symmetric && fs.max_asymmetry == 1.0);
    }

    #[test]
    fn coassociativity_examples() {
        assert_eq!(check_coassociativity(&QqoTensor::zero()), 0.0);
        assert_eq!(check_coassociativity(&QqoTensor::single(0, 0, 0, 1.0)), 0.0);
        assert!(check_coassociativity(&QqoTensor::single(0, 1, 0, 1.0)) > 0.5);
    }

    #[test]
    fn non_finite_coefficients_rejected() {
        let mut b = [[[0.0; 3]; 3]; 3];
        b[1][2][0] = f64::NAN;
        assert!(QqoTensor::new(b).is_err());
    }
}
