//! Every numeric threshold used by a verdict lives here.
//!
//! Verdicts always report a signed margin next to the boolean, so a caller
//! can see how close a case sits to the boundary regardless of these values.

/// Tolerances used by the certificate and dynamics routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Hermiticity / self-adjointness slack.
    pub hermitian: f64,
    /// Slack on `||w|| <= w0` for positive elements and on `||f|| <= 1` for states.
    pub positivity: f64,
    /// Off-diagonal Frobenius mass at which Jacobi sweeps stop (scaled by `max(1, ||M||_F)`).
    pub jacobi_off: f64,
    /// Hard cap on Jacobi sweeps.
    pub jacobi_max_sweeps: usize,
    /// Slack on the bilinear-form bound (value <= 1).
    pub dstar1: f64,
    /// Slack on the sum-of-squares bound.
    pub dstar3: f64,
    /// Slack on the sampled sup-norm bound.
    pub triple_norm: f64,
    /// Allowed imaginary residue of quantities that must be real.
    pub imaginary_residue: f64,
    /// Margin below which a Kadison-Schwarz witness counts as a violation.
    pub ks_violation: f64,
    /// Slack on the family inequalities that are stated with `<=`.
    pub family: f64,
    /// Slack on the equalities that select the dynamics cases.
    pub case_equality: f64,
    /// `iterate` declares the orbit has left the ball past `1 + ball_escape`.
    pub ball_escape: f64,
    /// Component size at which the majorant orbit is declared unbounded.
    pub tilde_escape: f64,
    /// Component size below which the majorant orbit is declared converged.
    pub tilde_zero: f64,
    /// Distance at which two fixed points are merged.
    pub fixed_point_dedup: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian: 1e-12,
            positivity: 1e-12,
            jacobi_off: 1e-13,
            jacobi_max_sweeps: 100,
            dstar1: 1e-9,
            dstar3: 1e-12,
            triple_norm: 1e-6,
            imaginary_residue: 1e-12,
            ks_violation: 1e-8,
            family: 1e-12,
            case_equality: 1e-12,
            ball_escape: 1e-9,
            tilde_escape: 1e6,
            tilde_zero: 1e-12,
            fixed_point_dedup: 1e-6,
        }
    }
}

pub const DEFAULT: Tolerances = Tolerances {
    hermitian: 1e-12,
    positivity: 1e-12,
    jacobi_off: 1e-13,
    jacobi_max_sweeps: 100,
    dstar1: 1e-9,
    dstar3: 1e-12,
    triple_norm: 1e-6,
    imaginary_residue: 1e-12,
    ks_violation: 1e-8,
    family: 1e-12,
    case_equality: 1e-12,
    ball_escape: 1e-9,
    tilde_escape: 1e6,
    tilde_zero: 1e-12,
    fixed_point_dedup: 1e-6,
};

/// Horizons and sample sizes shared by the scanners.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanConfig {
    pub seed: u64,
    /// Points in the Fibonacci sphere grid.
    pub sphere_points: usize,
    /// Seeded random (f, w) or (f, p) pairs.
    pub pair_samples: usize,
    /// Seeded random elements fed to the dense Kadison-Schwarz oracle.
    pub oracle_samples: usize,
    /// Local refinement steps after the coarse scan.
    pub refine_steps: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            sphere_points: 2562,
            pair_samples: 4096,
            oracle_samples: 2048,
            refine_steps: 50,
        }
    }
}

impl ScanConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn const_default_matches_default_impl() {
        assert_eq!(DEFAULT, Tolerances::default());
    }
}
