//! Three-component real and complex vectors.
//!
//! The scalar product is `<u, v> = Σ u_k conj(v_k)` everywhere, and the
//! bracket `[u, v]` on 3-vectors is the cross product.

use num_complex::Complex64;

pub type R3 = [f64; 3];
pub type C3 = [Complex64; 3];

pub const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const C3_ZERO: C3 = [C_ZERO; 3];

pub fn inner(u: &C3, v: &C3) -> Complex64 {
    u[0] * v[0].conj() + u[1] * v[1].conj() + u[2] * v[2].conj()
}

pub fn cross(u: &C3, v: &C3) -> C3 {
    [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ]
}

pub fn conj(u: &C3) -> C3 {
    [u[0].conj(), u[1].conj(), u[2].conj()]
}

pub fn add(u: &C3, v: &C3) -> C3 {
    [u[0] + v[0], u[1] + v[1], u[2] + v[2]]
}

pub fn sub(u: &C3, v: &C3) -> C3 {
    [u[0] - v[0], u[1] - v[1], u[2] - v[2]]
}

pub fn scale(u: &C3, s: Complex64) -> C3 {
    [u[0] * s, u[1] * s, u[2] * s]
}

pub fn norm_sqr(u: &C3) -> f64 {
    u.iter().map(|z| z.norm_sqr()).sum()
}

pub fn norm(u: &C3) -> f64 {
    norm_sqr(u).sqrt()
}

pub fn from_real(u: &R3) -> C3 {
    [
        Complex64::new(u[0], 0.0),
        Complex64::new(u[1], 0.0),
        Complex64::new(u[2], 0.0),
    ]
}

pub fn real_norm(u: &R3) -> f64 {
    (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt()
}

pub fn real_dist(u: &R3, v: &R3) -> f64 {
    real_norm(&[u[0] - v[0], u[1] - v[1], u[2] - v[2]])
}

pub fn real_normalize(u: &R3) -> Option<R3> {
    let n = real_norm(u);
    (n > 0.0 && n.is_finite()).then(|| [u[0] / n, u[1] / n, u[2] / n])
}

/// Largest imaginary part in absolute value; zero for real vectors.
pub fn max_imag(u: &C3) -> f64 {
    u.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
}

pub fn max_real(u: &C3) -> f64 {
    u.iter().map(|z| z.re.abs()).fold(0.0, f64::max)
}
