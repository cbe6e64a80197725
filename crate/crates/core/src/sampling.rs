//! Deterministic sample sets: Fibonacci sphere grids, a spherical ball grid,
//! and seeded pseudo-random points. Every random stream is derived from one
//! explicit seed plus a fixed purpose tag.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::pauli::PauliElement;
use crate::vec3::{self, C3, R3};

/// Purpose tags keep the streams for different scans independent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    DStar1Pairs = 1,
    KsPairs = 2,
    KsOracle = 3,
    TensorDraws = 4,
    States = 5,
}

pub fn rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream as u64);
    r
}

/// `n` nearly uniform points on the unit sphere (golden-angle spiral).
pub fn fibonacci_sphere(n: usize) -> Vec<R3> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

/// Spherical grid of the closed unit ball with `n` radii, `n` polar angles
/// and `n` azimuths, polar axis along e1. Radii and polar angles include
/// both endpoints, so `0`, `±e1` appear exactly.
pub fn ball_grid(n: usize) -> Vec<R3> {
    if n <= 1 {
        return vec![[0.0; 3]];
    }
    let mut out = vec![[0.0; 3]];
    let last = n - 1;
    for i in 1..n {
        let r = i as f64 / last as f64;
        out.push([r, 0.0, 0.0]);
        for j in 1..last {
            let theta = PI * j as f64 / last as f64;
            let (s, c) = theta.sin_cos();
            for k in 0..n {
                let phi = 2.0 * PI * k as f64 / n as f64;
                out.push([r * c, r * s * phi.cos(), r * s * phi.sin()]);
            }
        }
        out.push([-r, 0.0, 0.0]);
    }
    out
}

pub fn random_sphere_point(rng: &mut ChaCha8Rng) -> R3 {
    loop {
        let v: R3 = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        if let Some(u) = vec3::real_normalize(&v) {
            return u;
        }
    }
}

/// Uniform point in the closed unit ball.
pub fn random_ball_point(rng: &mut ChaCha8Rng) -> R3 {
    let u = random_sphere_point(rng);
    let r = rng.random::<f64>().cbrt();
    [u[0] * r, u[1] * r, u[2] * r]
}

/// Complex Gaussian 3-vector normalized to unit length.
pub fn random_unit_c3(rng: &mut ChaCha8Rng) -> C3 {
    loop {
        let v: C3 = std::array::from_fn(|_| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let n = vec3::norm(&v);
        if n > 0.0 {
            return vec3::scale(&v, Complex64::new(1.0 / n, 0.0));
        }
    }
}

/// Element `w0 + w·σ` with complex Gaussian `w0` and unit-norm `w`.
pub fn random_element_unit_vector(rng: &mut ChaCha8Rng) -> PauliElement {
    let w0 = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
    PauliElement::new(w0, random_unit_c3(rng))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fibonacci_points_are_unit() {
        for p in fibonacci_sphere(2562) {
            assert!((vec3::real_norm(&p) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn ball_grid_contains_axis_points() {
        let g = ball_grid(20);
        assert!(g.contains(&[0.0, 0.0, 0.0]));
        assert!(g.contains(&[1.0, 0.0, 0.0]));
        assert!(g.contains(&[-1.0, 0.0, 0.0]));
        assert!(g.iter().all(|p| vec3::real_norm(p) <= 1.0 + 1e-15));
        // 1 + 19 radii * (2 axis points + 18 polar * 20 azimuth)
        assert_eq!(g.len(), 1 + 19 * (2 + 18 * 20));
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: f64 = rng(5, Stream::KsPairs).random();
        let b: f64 = rng(5, Stream::KsPairs).random();
        let c: f64 = rng(5, Stream::KsOracle).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
