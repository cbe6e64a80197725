//! The quadratic map `V(f)_k = Σ_{ij} b_{ij,k} f_i f_j` on the Bloch ball,
//! its majorant `Ṽ`, and the contraction and stability certificates.

use serde::{Deserialize, Serialize};

use crate::operator::{b_matrix_raw, QqoTensor};
use crate::pauli::StateVec;
use crate::sampling::ball_grid;
use crate::tolerance::DEFAULT;
use crate::vec3::{self, R3};

pub const DEFAULT_HORIZON: usize = 200;
pub const DEFAULT_TILDE_HORIZON: usize = 64;
pub const DEFAULT_ZERO_TOL: f64 = 1e-9;
pub const DEFAULT_FIXED_POINT_TOL: f64 = 1e-10;
const BB33_MAX: usize = 64;
const DAMPING: f64 = 0.5;
const DAMPED_STEPS: usize = 500;

pub fn apply_v(t: &QqoTensor, f: &R3) -> R3 {
    std::array::from_fn(|k| {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += t.get(i, j, k) * f[i] * f[j];
            }
        }
        s
    })
}

/// `Ṽ(p)_k = Σ_{ij} |b_{ij,k}| p_i p_j`.
pub fn apply_v_tilde(t: &QqoTensor, p: &R3) -> R3 {
    std::array::from_fn(|k| {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += t.get(i, j, k).abs() * p[i] * p[j];
            }
        }
        s
    })
}

/// `V(f) = B(f)ᵀ f`.
pub fn apply_v_via_b(t: &QqoTensor, f: &R3) -> R3 {
    b_matrix_raw(t, f).transpose_apply_real(f)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityCertificates {
    /// Per-component Lipschitz constants.
    pub alpha_k: R3,
    /// `Σ_k α_k²`.
    pub alpha: f64,
    /// `δ_k = Σ_{ij} |b_{ij,k}|`; also the starting vector `d` of the majorant orbit.
    pub delta: R3,
    /// `α < 1`.
    pub alfa_contraction: bool,
    /// `δ_k <= 1` for every `k`.
    pub bb2: bool,
    /// Least `n0 <= 64` with `Ṽ^{n0}(d)_k < 1` for all `k`.
    pub bb33_n0: Option<usize>,
    pub bb_main: bool,
}

impl StabilityCertificates {
    pub fn d(&self) -> R3 {
        self.delta
    }

    /// Strongest certificate that holds, or "unclassified".
    pub fn label(&self) -> &'static str {
        if self.alfa_contraction {
            "contraction"
        } else if self.bb_main {
            "bb_main"
        } else if self.bb33_n0.is_some() {
            "bb33"
        } else {
            "unclassified"
        }
    }
}

pub fn certificates(t: &QqoTensor) -> StabilityCertificates {
    let alpha_k: R3 = std::array::from_fn(|k| {
        let col = |j: usize| (0..3).map(|i| t.get(i, j, k).abs()).sum::<f64>();
        let row = |i: usize| (0..3).map(|j| t.get(i, j, k).abs()).sum::<f64>();
        (0..3).map(|j| col(j).powi(2)).sum::<f64>().sqrt()
            + (0..3).map(|i| row(i).powi(2)).sum::<f64>().sqrt()
    });
    let alpha = alpha_k.iter().map(|a| a * a).sum::<f64>();
    let delta: R3 = std::array::from_fn(|k| {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += t.get(i, j, k).abs();
            }
        }
        s
    });
    let bb2 = delta.iter().all(|&d| d <= 1.0);

    let mut bb33_n0 = None;
    let mut p = delta;
    for n in 1..=BB33_MAX {
        p = apply_v_tilde(t, &p);
        if !p.iter().all(|v| v.is_finite()) {
            break;
        }
        if p.iter().all(|&v| v < 1.0) {
            bb33_n0 = Some(n);
            break;
        }
    }

    let couples = |k0: usize| {
        (0..3).all(|k| (0..3).any(|i0| t.get(i0, k0, k).abs() + t.get(k0, i0, k).abs() != 0.0))
    };
    let bb_main = bb2 && (0..3).any(|k0| delta[k0] < 1.0 && couples(k0));

    StabilityCertificates {
        alpha_k,
        alpha,
        delta,
        alfa_contraction: alpha < 1.0,
        bb2,
        bb33_n0,
        bb_main,
    }
}

/// Upper bound `γ_f^{2ⁿ}·Ṽ^{n-1}(d)` on `|Vⁿ(f)_k|`, evaluated in log space so
/// that an underflowing power never multiplies an overflowing orbit.
pub fn majorant(t: &QqoTensor, f: &R3, n: usize) -> R3 {
    assert!(n >= 1, "majorant needs n >= 1");
    let gamma = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut p = certificates(t).delta;
    for _ in 1..n {
        p = apply_v_tilde(t, &p);
    }
    std::array::from_fn(|k| {
        if p[k] == 0.0 || gamma == 0.0 {
            return 0.0;
        }
        let log = 2f64.powi(n as i32) * gamma.ln() + p[k].ln();
        log.exp()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "point", rename_all = "snake_case")]
pub enum Terminal {
    ConvergedToZero,
    FixedPoint(R3),
    MaxSteps,
    LeftBall,
}

impl Terminal {
    pub fn name(&self) -> &'static str {
        match self {
            Terminal::ConvergedToZero => "converged_to_zero",
            Terminal::FixedPoint(_) => "fixed_point",
            Terminal::MaxSteps => "max_steps",
            Terminal::LeftBall => "left_ball",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    /// `f0, V(f0), V²(f0), …`
    pub points: Vec<R3>,
    pub terminal: Terminal,
}

impl Trajectory {
    pub fn last(&self) -> R3 {
        *self.points.last().expect("trajectory starts at f0")
    }
}

/// Iterates `V` from `f0` for at most `max_steps` applications.
pub fn iterate(t: &QqoTensor, f0: &StateVec, max_steps: usize, tol: f64) -> Trajectory {
    assert!(max_steps >= 1, "max_steps must be positive");
    assert!(tol > 0.0, "tol must be positive");
    let mut f = f0.get();
    let mut points = vec![f];
    for step in 0..=max_steps {
        let norm = vec3::real_norm(&f);
        if norm > 1.0 + DEFAULT.ball_escape || !norm.is_finite() {
            return Trajectory { points, terminal: Terminal::LeftBall };
        }
        if norm <= tol {
            return Trajectory { points, terminal: Terminal::ConvergedToZero };
        }
        let next = apply_v(t, &f);
        if vec3::real_dist(&next, &f) <= tol {
            return Trajectory { points, terminal: Terminal::FixedPoint(f) };
        }
        if step == max_steps {
            break;
        }
        points.push(next);
        f = next;
    }
    Trajectory { points, terminal: Terminal::MaxSteps }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TildeProbe {
    pub bounded_up_to_horizon: bool,
    /// Largest component seen along `d, Ṽ(d), …`.
    pub sup_seen: f64,
    pub converged_to_zero: bool,
}

pub fn tilde_orbit_probe(t: &QqoTensor, horizon: usize) -> TildeProbe {
    assert!(horizon >= 1, "horizon must be positive");
    let max = |p: &R3| p.iter().fold(0.0f64, |m, &v| m.max(v));
    let mut p = certificates(t).delta;
    let mut sup_seen = max(&p);
    for step in 0..=horizon {
        if sup_seen > DEFAULT.tilde_escape || !sup_seen.is_finite() {
            return TildeProbe { bounded_up_to_horizon: false, sup_seen, converged_to_zero: false };
        }
        if p.iter().all(|&v| v < DEFAULT.tilde_zero) {
            return TildeProbe { bounded_up_to_horizon: true, sup_seen, converged_to_zero: true };
        }
        if step < horizon {
            p = apply_v_tilde(t, &p);
            sup_seen = sup_seen.max(max(&p));
        }
    }
    TildeProbe { bounded_up_to_horizon: true, sup_seen, converged_to_zero: false }
}

/// `±e_k`, the origin, and the spherical ball grid with `n` subdivisions.
pub fn default_seeds(n: usize) -> Vec<StateVec> {
    let mut seeds = vec![StateVec::origin()];
    for k in 0..3 {
        for s in [1.0, -1.0] {
            let mut e = [0.0; 3];
            e[k] = s;
            seeds.push(StateVec::clamped(e));
        }
    }
    seeds.extend(ball_grid(n).into_iter().map(StateVec::clamped));
    seeds
}

/// Damped iteration `f ← (1-θ)f + θV(f)` from every seed; converged points
/// are merged when closer than the dedup distance, keeping seed order.
pub fn find_fixed_points(t: &QqoTensor, seeds: &[StateVec], tol: f64) -> Vec<R3> {
    let candidates: Vec<Option<R3>> = crate::par::map(seeds, |seed| {
        let mut f = seed.get();
        for _ in 0..DAMPED_STEPS {
            let v = apply_v(t, &f);
            f = std::array::from_fn(|k| (1.0 - DAMPING) * f[k] + DAMPING * v[k]);
            if !(vec3::real_norm(&f) <= 1.0 + DEFAULT.ball_escape) {
                return None;
            }
        }
        (vec3::real_dist(&apply_v(t, &f), &f) <= tol).then_some(f)
    });
    let mut out: Vec<R3> = Vec::new();
    for p in candidates.into_iter().flatten() {
        if out.iter().all(|q| vec3::real_dist(q, &p) > DEFAULT.fixed_point_dedup) {
            out.push(p);
        }
    }
    out
}
