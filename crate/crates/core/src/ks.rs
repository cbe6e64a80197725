//! Kadison-Schwarz certificates for Haar-form operators.
//!
//! For `x = w0 + w·σ` the difference `D(x) = Δ(x*x) - Δ(x)*Δ(x)` does not
//! depend on `w0`. Compressing it with the conditional expectation `E_f`
//! attached to the state `f` gives `E_f(D) = A·1 + i·u·σ`, and positivity of
//! that 2x2 matrix yields the two necessary conditions `A >= 0` (ks11) and
//! `A >= ||u||` (ks2). The dense oracle checks `D(x) >= 0` directly.

use std::fmt;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;

use crate::dense::{min_eigenvalue, CMatrix, DenseHermitian};
use crate::error::{Error, Result};
use crate::operator::{delta_dense, QqoTensor, TensorSquareElement};
use crate::pauli::{dense_to_pauli, PauliElement, StateVec};
use crate::sampling::{self, fibonacci_sphere, Stream};
use crate::tolerance::{ScanConfig, DEFAULT};
use crate::vec3::{self, C3, C3_ZERO, C_ZERO, R3};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// The cyclic pair `(π(m), π(m+1))`, 0-based.
#[inline]
pub fn pi_pair(m: usize) -> (usize, usize) {
    ((m + 1) % 3, (m + 2) % 3)
}

/// Derived quantities of a pair `(f, w)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsQuantities {
    /// `x_m = (x_{m1}, x_{m2}, x_{m3})` with `x_{ml} = <b_ml, w>`.
    pub x: [C3; 3],
    /// `α_ml = <x_m, x_l> - <x_l, x_m>`.
    pub alpha: [[Complex64; 3]; 3],
    /// `γ_ml = [x_m, conj(x_l)] + [conj(x_m), x_l]`.
    pub gamma: [[C3; 3]; 3],
    /// `q_i = Σ_j β(f)_{ij} conj([w, w̄]_j)`.
    pub q: C3,
    /// `h_l = <b_{1l}, [w, w̄]>`.
    pub h: C3,
}

fn x_vectors(t: &QqoTensor, w: &C3) -> [C3; 3] {
    let wc = vec3::conj(w);
    std::array::from_fn(|m| {
        std::array::from_fn(|l| (0..3).map(|k| wc[k] * t.get(m, l, k)).sum())
    })
}

/// `<b_ml, v>` contracted against the first index with weights `f`.
fn contract_b(t: &QqoTensor, f: &R3, v: &C3) -> C3 {
    let vc = vec3::conj(v);
    std::array::from_fn(|i| {
        let mut s = C_ZERO;
        for m in 0..3 {
            if f[m] == 0.0 {
                continue;
            }
            for j in 0..3 {
                s += vc[j] * (t.get(m, i, j) * f[m]);
            }
        }
        s
    })
}

pub fn ks_quantities(t: &QqoTensor, f: &StateVec, w: &C3) -> KsQuantities {
    let x = x_vectors(t, w);
    let xc: [C3; 3] = std::array::from_fn(|m| vec3::conj(&x[m]));
    let alpha = std::array::from_fn(|m| {
        std::array::from_fn(|l| vec3::inner(&x[m], &x[l]) - vec3::inner(&x[l], &x[m]))
    });
    let gamma = std::array::from_fn(|m| {
        std::array::from_fn(|l| vec3::add(&vec3::cross(&x[m], &xc[l]), &vec3::cross(&xc[m], &x[l])))
    });
    let k = vec3::cross(w, &vec3::conj(w));
    KsQuantities {
        x,
        alpha,
        gamma,
        q: contract_b(t, &f.get(), &k),
        h: contract_b(t, &[1.0, 0.0, 0.0], &k),
    }
}

/// `E_f(D) = A·1 + i·u·σ` in closed form; `A` and `u` before any reality check.
fn scalar_and_vector(w: &C3, q: &KsQuantities, f: &R3, first: &C3) -> (Complex64, C3) {
    let mut a = Complex64::new(vec3::norm_sqr(w), 0.0);
    let mut u = *first;
    for m in 0..3 {
        a -= vec3::norm_sqr(&q.x[m]);
        u = vec3::sub(&u, &vec3::cross(&q.x[m], &vec3::conj(&q.x[m])));
        if f[m] != 0.0 {
            let (p, r) = pi_pair(m);
            a -= I * f[m] * q.alpha[p][r];
            u = vec3::sub(&u, &vec3::scale(&q.gamma[p][r], I * f[m]));
        }
    }
    (a, u)
}

fn residue_scale(t: &QqoTensor, w: &C3) -> f64 {
    1.0 + vec3::norm_sqr(w) * (1.0 + t.sum_of_squares())
}

fn real_scalar(a: Complex64, scale: f64, quantity: &'static str) -> Result<f64> {
    if a.im.abs() > DEFAULT.imaginary_residue * scale {
        return Err(Error::ConventionFault {
            quantity,
            residue: a.im.abs(),
        });
    }
    Ok(a.re)
}

fn imaginary_vector(u: &C3, scale: f64, quantity: &'static str) -> Result<f64> {
    let residue = vec3::max_real(u);
    if residue > DEFAULT.imaginary_residue * scale {
        return Err(Error::ConventionFault { quantity, residue });
    }
    Ok(vec3::norm(u))
}

/// `||w||² - i Σ_m f_m α_{π(m)π(m+1)} - Σ_m ||x_m||²`; KS requires `>= 0`.
pub fn ks11_margin(t: &QqoTensor, f: &StateVec, w: &C3) -> Result<f64> {
    let q = ks_quantities(t, f, w);
    let (a, _) = scalar_and_vector(w, &q, &f.get(), &q.q);
    real_scalar(a, residue_scale(t, w), "ks11 scalar")
}

/// ks11 minus `||q - i Σ_m f_m γ_{π(m)π(m+1)} - Σ_m [x_m, x̄_m]||`; KS requires `>= 0`.
pub fn ks2_margin(t: &QqoTensor, f: &StateVec, w: &C3) -> Result<f64> {
    let q = ks_quantities(t, f, w);
    let (a, u) = scalar_and_vector(w, &q, &f.get(), &q.q);
    let scale = residue_scale(t, w);
    Ok(real_scalar(a, scale, "ks11 scalar")? - imaginary_vector(&u, scale, "ks2 vector")?)
}

/// Both margins at the pure state `f = e1`, built from `h(w)` instead of `q(f, w)`.
pub fn ksf_margins(t: &QqoTensor, w: &C3) -> Result<(f64, f64)> {
    let q = ks_quantities(t, &StateVec::e1(), w);
    let (a, u) = scalar_and_vector(w, &q, &[1.0, 0.0, 0.0], &q.h);
    let scale = residue_scale(t, w);
    let a = real_scalar(a, scale, "ksf1 scalar")?;
    Ok((a, a - imaginary_vector(&u, scale, "ksf2 vector")?))
}

/// `E_f(Δ(x*x) - Δ(x)*Δ(x))` from the closed form `A·1 + i·u·σ`.
pub fn ef_difference(t: &QqoTensor, f: &StateVec, x: &PauliElement) -> PauliElement {
    let q = ks_quantities(t, f, &x.w);
    let (a, u) = scalar_and_vector(&x.w, &q, &f.get(), &q.q);
    PauliElement::new(a, vec3::scale(&u, I))
}

/// Pauli-basis expansion of `Δ(x*x)`.
pub fn delta_of_square(t: &QqoTensor, x: &PauliElement) -> TensorSquareElement {
    let (w0, w) = (x.w0, &x.w);
    let q = ks_quantities(t, &StateVec::origin(), w);
    let k = vec3::cross(w, &vec3::conj(w));
    let mut out = TensorSquareElement::zero();
    out.c00 = Complex64::new(w0.norm_sqr() + vec3::norm_sqr(w), 0.0);
    for m in 0..3 {
        for l in 0..3 {
            let bk: Complex64 = (0..3).map(|j| k[j].conj() * t.get(m, l, j)).sum();
            let xml = q.x[m][l];
            out.c[m][l] = w0 * xml + w0.conj() * xml.conj() + I * bk;
        }
    }
    out
}

/// Pauli-basis expansion of `Δ(x)*Δ(x)`.
pub fn delta_star_delta(t: &QqoTensor, x: &PauliElement) -> TensorSquareElement {
    let w0 = x.w0;
    let q = ks_quantities(t, &StateVec::origin(), &x.w);
    let mut out = TensorSquareElement::zero();
    out.c00 = Complex64::new(w0.norm_sqr(), 0.0);
    for m in 0..3 {
        out.c00 += vec3::norm_sqr(&q.x[m]);
        out.c01 = vec3::add(&out.c01, &vec3::scale(&vec3::cross(&q.x[m], &vec3::conj(&q.x[m])), I));
        let (p, r) = pi_pair(m);
        out.c10[m] = I * q.alpha[p][r];
        for l in 0..3 {
            let xml = q.x[m][l];
            out.c[m][l] = w0 * xml + w0.conj() * xml.conj() - q.gamma[p][r][l];
        }
    }
    out
}

/// Dense `Δ(x*x) - Δ(x)*Δ(x)`.
pub fn ks_difference_dense(t: &QqoTensor, x: &PauliElement) -> CMatrix {
    let square = crate::pauli::pauli_mul(&x.adjoint(), x);
    let dx = delta_dense(t, x);
    &delta_dense(t, &square) - &(&dx.adjoint() * &dx)
}

/// Smallest eigenvalue of `Δ(x*x) - Δ(x)*Δ(x)`; KS iff `>= 0` for every `x`.
pub fn ks_oracle(t: &QqoTensor, x: &PauliElement) -> f64 {
    let m = DenseHermitian::with_tolerance(ks_difference_dense(t, x), f64::INFINITY)
        .expect("infinite tolerance accepts any matrix");
    min_eigenvalue(&m)
}

/// `E_f(M)` for a dense 4x4 `M`: `Tr₁[(ρ_f ⊗ 1) M]` with `ρ_f = (1 + f·σ)/2`.
pub fn conditional_expectation_dense(f: &StateVec, m: &CMatrix) -> CMatrix {
    let f = f.get();
    let rho = PauliElement::real(0.5, [f[0] / 2.0, f[1] / 2.0, f[2] / 2.0]).to_dense();
    CMatrix::from_fn(2, |r, s| {
        let mut acc = C_ZERO;
        for a in 0..2 {
            for b in 0..2 {
                acc += rho[(b, a)] * m[(2 * a + r, 2 * b + s)];
            }
        }
        acc
    })
}

/// Same quantity as [`ef_difference`], computed through the dense oracle matrix.
pub fn ef_difference_dense(t: &QqoTensor, f: &StateVec, x: &PauliElement) -> PauliElement {
    dense_to_pauli(&conditional_expectation_dense(f, &ks_difference_dense(t, x)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    Ks11,
    Ks2,
    Oracle,
}

impl Channel {
    pub fn as_str(self) -> &'static str {
        match self {
            Channel::Ks11 => "ks11",
            Channel::Ks2 => "ks2",
            Channel::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Worst point found for one channel. `w0` is only meaningful for the oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsWitness {
    pub f: R3,
    pub w: C3,
    pub w0: Complex64,
    pub channel: Channel,
    pub margin: f64,
}

impl KsWitness {
    pub fn is_violation(&self) -> bool {
        self.margin < -DEFAULT.ks_violation
    }

    pub fn element(&self) -> PauliElement {
        PauliElement::new(self.w0, self.w)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsReport {
    pub ks11: KsWitness,
    pub ks2: KsWitness,
    pub oracle: KsWitness,
}

impl KsReport {
    pub fn violation_found(&self) -> bool {
        self.channels().iter().any(|w| w.is_violation())
    }

    pub fn channels(&self) -> [KsWitness; 3] {
        [self.ks11, self.ks2, self.oracle]
    }

    /// Lowest margin across channels; earlier channels win ties.
    pub fn worst(&self) -> KsWitness {
        self.channels()
            .into_iter()
            .reduce(|a, b| if b.margin < a.margin { b } else { a })
            .expect("three channels")
    }

    pub fn verdict(&self) -> &'static str {
        if self.violation_found() {
            "violation found"
        } else {
            "no violation found"
        }
    }
}

/// The `w`-only part of the closed form: `A(f) = a0 + a·f`, `u(f) = u0 + Σ f_m u_m`.
struct AffineForm {
    a0: Complex64,
    a: [Complex64; 3],
    u0: C3,
    u: [C3; 3],
    scale: f64,
}

impl AffineForm {
    fn new(t: &QqoTensor, w: &C3) -> Self {
        let q = ks_quantities(t, &StateVec::origin(), w);
        let k = vec3::cross(w, &vec3::conj(w));
        let mut a0 = Complex64::new(vec3::norm_sqr(w), 0.0);
        let mut u0 = C3_ZERO;
        for x in &q.x {
            a0 -= vec3::norm_sqr(x);
            u0 = vec3::sub(&u0, &vec3::cross(x, &vec3::conj(x)));
        }
        let a = std::array::from_fn(|m| {
            let (p, r) = pi_pair(m);
            -I * q.alpha[p][r]
        });
        let u = std::array::from_fn(|m| {
            let (p, r) = pi_pair(m);
            let mut e = [0.0; 3];
            e[m] = 1.0;
            vec3::sub(&contract_b(t, &e, &k), &vec3::scale(&q.gamma[p][r], I))
        });
        Self {
            a0,
            a,
            u0,
            u,
            scale: residue_scale(t, w),
        }
    }

    fn margins(&self, f: &R3) -> Result<(f64, f64)> {
        let mut a = self.a0;
        let mut u = self.u0;
        for m in 0..3 {
            a += self.a[m] * f[m];
            u = vec3::add(&u, &vec3::scale(&self.u[m], Complex64::new(f[m], 0.0)));
        }
        let a = real_scalar(a, self.scale, "ks11 scalar")?;
        Ok((a, a - imaginary_vector(&u, self.scale, "ks2 vector")?))
    }
}

/// Sampled search for KS violations.
///
/// The ks11/ks2 margins are evaluated on every pair of a sphere-grid state
/// and a seeded unit-norm complex `w`; the dense oracle on seeded random
/// elements. The worst point of each channel is then sharpened by coordinate
/// descent with step halving.
pub fn ks_scan(t: &QqoTensor, cfg: &ScanConfig) -> Result<KsReport> {
    assert!(cfg.pair_samples >= 1, "sample_count must be positive");
    let grid = fibonacci_sphere(cfg.sphere_points);
    let mut rng = sampling::rng(cfg.seed, Stream::KsPairs);
    let ws: Vec<C3> = (0..cfg.pair_samples).map(|_| sampling::random_unit_c3(&mut rng)).collect();

    // Per w: (ks11 min, f index), (ks2 min, f index).
    let per_w: Vec<Result<[(f64, usize); 2]>> = crate::par::map(&ws, |w| {
        let form = AffineForm::new(t, w);
        let mut best = [(f64::INFINITY, 0usize); 2];
        for (fi, f) in grid.iter().enumerate() {
            let (m11, m2) = form.margins(f)?;
            if m11 < best[0].0 {
                best[0] = (m11, fi);
            }
            if m2 < best[1].0 {
                best[1] = (m2, fi);
            }
        }
        Ok(best)
    });

    let mut worst = [(f64::INFINITY, 0usize, 0usize); 2];
    for (wi, r) in per_w.into_iter().enumerate() {
        let r = r?;
        for c in 0..2 {
            if r[c].0 < worst[c].0 {
                worst[c] = (r[c].0, r[c].1, wi);
            }
        }
    }

    let ks11 = refine_pair(t, Channel::Ks11, grid[worst[0].1], ws[worst[0].2], worst[0].0, cfg.refine_steps)?;
    let ks2 = refine_pair(t, Channel::Ks2, grid[worst[1].1], ws[worst[1].2], worst[1].0, cfg.refine_steps)?;
    let oracle = oracle_search(t, cfg);
    Ok(KsReport { ks11, ks2, oracle })
}

fn pair_margin(t: &QqoTensor, channel: Channel, f: &R3, w: &C3) -> Result<f64> {
    let f = StateVec::clamped(*f);
    match channel {
        Channel::Ks11 => ks11_margin(t, &f, w),
        _ => ks2_margin(t, &f, w),
    }
}

/// Packs `(f, w)` into 9 reals and back, projecting `f` onto the ball and `w` onto the unit sphere.
fn unpack_pair(p: &[f64; 9]) -> Option<(R3, C3)> {
    let mut f = [p[0], p[1], p[2]];
    let n = vec3::real_norm(&f);
    if n > 1.0 {
        f = [f[0] / n, f[1] / n, f[2] / n];
    }
    let w: C3 = std::array::from_fn(|k| Complex64::new(p[3 + 2 * k], p[4 + 2 * k]));
    let nw = vec3::norm(&w);
    (nw > 0.0).then(|| (f, vec3::scale(&w, Complex64::new(1.0 / nw, 0.0))))
}

fn pack_pair(f: &R3, w: &C3) -> [f64; 9] {
    [f[0], f[1], f[2], w[0].re, w[0].im, w[1].re, w[1].im, w[2].re, w[2].im]
}

fn refine_pair(
    t: &QqoTensor,
    channel: Channel,
    f: R3,
    w: C3,
    margin: f64,
    steps: usize,
) -> Result<KsWitness> {
    let mut best = (margin, f, w);
    let mut err = None;
    coordinate_descent(pack_pair(&f, &w), margin, steps, |p| {
        let (f, w) = unpack_pair(p)?;
        match pair_margin(t, channel, &f, &w) {
            Ok(v) => {
                if v < best.0 {
                    best = (v, f, w);
                }
                Some(v)
            }
            Err(e) => {
                err.get_or_insert(e);
                None
            }
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(KsWitness {
        f: best.1,
        w: best.2,
        w0: C_ZERO,
        channel,
        margin: best.0,
    })
}

/// Minimizes `objective` by trying `±step` along each coordinate; the step
/// halves after a sweep with no improvement.
fn coordinate_descent<const N: usize>(
    mut point: [f64; N],
    mut value: f64,
    sweeps: usize,
    mut objective: impl FnMut(&[f64; N]) -> Option<f64>,
) -> [f64; N] {
    let mut step = 0.1;
    for _ in 0..sweeps {
        let mut improved = false;
        for i in 0..N {
            for dir in [1.0, -1.0] {
                let mut trial = point;
                trial[i] += dir * step;
                if let Some(v) = objective(&trial) {
                    if v < value {
                        value = v;
                        point = trial;
                        improved = true;
                        break;
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    point
}

fn oracle_search(t: &QqoTensor, cfg: &ScanConfig) -> KsWitness {
    let mut rng: ChaCha8Rng = sampling::rng(cfg.seed, Stream::KsOracle);
    let xs: Vec<PauliElement> = (0..cfg.oracle_samples.max(1))
        .map(|_| sampling::random_element_unit_vector(&mut rng))
        .collect();
    let values = crate::par::map(&xs, |x| ks_oracle(t, x));
    let (idx, &start) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(&b.0)))
        .expect("non-empty sample");

    let x0 = xs[idx];
    let unpack = |p: &[f64; 8]| -> Option<PauliElement> {
        let w: C3 = std::array::from_fn(|k| Complex64::new(p[2 + 2 * k], p[3 + 2 * k]));
        let n = vec3::norm(&w);
        (n > 0.0).then(|| {
            PauliElement::new(Complex64::new(p[0], p[1]), vec3::scale(&w, Complex64::new(1.0 / n, 0.0)))
        })
    };
    let packed = [
        x0.w0.re, x0.w0.im, x0.w[0].re, x0.w[0].im, x0.w[1].re, x0.w[1].im, x0.w[2].re, x0.w[2].im,
    ];
    let mut best = (start, x0);
    coordinate_descent(packed, start, cfg.refine_steps, |p| {
        let x = unpack(p)?;
        let v = ks_oracle(t, &x);
        if v < best.0 {
            best = (v, x);
        }
        Some(v)
    });
    KsWitness {
        f: [0.0; 3],
        w: best.1.w,
        w0: best.1.w0,
        channel: Channel::Oracle,
        margin: best.0,
    }
}
