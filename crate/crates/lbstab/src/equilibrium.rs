//! The isothermal linearized-Euler target system.
//!
//! A scheme is consistent with the linearized Euler equations when its
//! equilibrium reproduces prescribed zeroth, first, and second moments. The
//! conserved variables used throughout are the density fluctuation ρ' and
//! the momentum fluctuation j = ρ₀u' + u₀ρ' — keeping j (rather than u')
//! conserved makes moment conservation of the collision exact. This module
//! provides the map from conserved variables onto the six equilibrium
//! second moments and the conversions between (ρ', j) and (ρ', u').

use crate::error::{Error, Result};
use crate::lattice::MomentMatrix;
use crate::linalg::Mat;
use serde::{Deserialize, Serialize};

/// Number of conserved moments: density plus three momentum components.
pub const GAMMA: usize = 4;
/// Number of consistency (second) moments: xx, xy, xz, yy, yz, zz.
pub const BETA: usize = 6;

/// The background flow the Euler equations are linearized around.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BackgroundState {
    /// Background density ρ₀ (mass units, positive).
    pub rho0: f64,
    /// Background velocity u₀ (lattice units).
    pub u0: [f64; 3],
    /// Squared speed of sound (lattice units²); 1/3 for this construction.
    pub cs2: f64,
}

impl BackgroundState {
    pub fn new(rho0: f64, u0: [f64; 3], cs2: f64) -> Result<Self> {
        if !(rho0 > 0.0) {
            return Err(Error::Config(format!(
                "background density must be positive, got {rho0}"
            )));
        }
        if !(cs2 > 0.0) {
            return Err(Error::Config(format!(
                "squared speed of sound must be positive, got {cs2}"
            )));
        }
        Ok(Self { rho0, u0, cs2 })
    }

    /// Background with the standard lattice speed of sound c_s² = 1/3.
    pub fn with_standard_cs2(rho0: f64, u0: [f64; 3]) -> Result<Self> {
        Self::new(rho0, u0, 1.0 / 3.0)
    }
}

/// Linear maps from the conserved moments onto higher equilibrium moments.
#[derive(Clone, Debug, PartialEq)]
pub struct EquilibriumMap {
    /// β×γ map onto the six second moments, rows ordered (xx, xy, xz, yy,
    /// yz, zz), columns ordered (ρ', j₁, j₂, j₃).
    pub e21: Mat,
    /// Optional (n−β−γ)×γ map onto tail moments; populated only by the
    /// fully relative construction.
    pub e31: Option<Mat>,
}

/// Row of the second-moment map for index pair (α, β), in conserved
/// variables: Π^eq_{αβ} = u₀_α j_β + u₀_β j_α + (c_s² δ_{αβ} − u₀_α u₀_β) ρ'.
fn second_moment_row(bg: &BackgroundState, alpha: usize, beta: usize) -> Vec<f64> {
    let u0 = bg.u0;
    let delta = if alpha == beta { 1.0 } else { 0.0 };
    let mut row = vec![0.0; GAMMA];
    row[0] = bg.cs2 * delta - u0[alpha] * u0[beta];
    row[1 + beta] += u0[alpha];
    row[1 + alpha] += u0[beta];
    row
}

/// Equilibrium second-moment map for the linearized Euler equations.
///
/// Derivation: the prescribed second moment in primitive variables is
/// Π^eq_{αβ} = ρ₀(u₀_α u'_β + u₀_β u'_α) + u₀_α u₀_β ρ' + c_s² ρ' δ_{αβ};
/// substituting u' = (j − u₀ρ')/ρ₀ gives the conserved-variable form used
/// in `second_moment_row`. The unit tests re-verify this against the
/// primitive-variable route numerically.
pub fn lee_equilibrium_map(bg: &BackgroundState) -> EquilibriumMap {
    const PAIRS: [(usize, usize); BETA] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];
    let rows = PAIRS
        .iter()
        .map(|&(a, b)| second_moment_row(bg, a, b))
        .collect();
    EquilibriumMap {
        e21: Mat::from_rows(rows),
        e31: None,
    }
}

/// Extracts the conserved moments (ρ', j) of a density vector using the
/// conserved rows of the moment matrix.
pub fn conserved_moments(densities: &[f64], m: &MomentMatrix) -> Result<(f64, [f64; 3])> {
    if densities.len() != m.n() {
        return Err(Error::Input(format!(
            "density vector has {} components, moment matrix expects {}",
            densities.len(),
            m.n()
        )));
    }
    if m.gamma() != GAMMA {
        return Err(Error::Input(format!(
            "moment matrix has {} conserved rows, expected {GAMMA}",
            m.gamma()
        )));
    }
    let dot = |row: &[f64]| -> f64 { row.iter().zip(densities).map(|(&c, &f)| c * f).sum() };
    Ok((
        dot(m.row(0)),
        [dot(m.row(1)), dot(m.row(2)), dot(m.row(3))],
    ))
}

/// Converts conserved moments to primitive fields: u' = (j − u₀ρ')/ρ₀.
pub fn macro_fields(rho_prime: f64, j: [f64; 3], bg: &BackgroundState) -> (f64, [f64; 3]) {
    let u_prime = [
        (j[0] - bg.u0[0] * rho_prime) / bg.rho0,
        (j[1] - bg.u0[1] * rho_prime) / bg.rho0,
        (j[2] - bg.u0[2] * rho_prime) / bg.rho0,
    ];
    (rho_prime, u_prime)
}

/// Composes the conserved momentum from primitive fields: j = ρ₀u' + u₀ρ'.
pub fn momentum_from_velocity(rho_prime: f64, u_prime: [f64; 3], bg: &BackgroundState) -> [f64; 3] {
    [
        bg.rho0 * u_prime[0] + bg.u0[0] * rho_prime,
        bg.rho0 * u_prime[1] + bg.u0[1] * rho_prime,
        bg.rho0 * u_prime[2] + bg.u0[2] * rho_prime,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::build_m1_d3q33;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn sample_bg() -> BackgroundState {
        let s = 0.1 / 3f64.sqrt();
        BackgroundState::with_standard_cs2(0.7, [s, s, s]).unwrap()
    }

    /// The prescribed second moment evaluated directly in primitive
    /// variables — the independent route the conserved-variable map must
    /// reproduce.
    fn primitive_second_moment(
        bg: &BackgroundState,
        rho_prime: f64,
        u_prime: [f64; 3],
        alpha: usize,
        beta: usize,
    ) -> f64 {
        let u0 = bg.u0;
        let delta = if alpha == beta { 1.0 } else { 0.0 };
        bg.rho0 * (u0[alpha] * u_prime[beta] + u0[beta] * u_prime[alpha])
            + u0[alpha] * u0[beta] * rho_prime
            + bg.cs2 * rho_prime * delta
    }

    #[test]
    fn invalid_background_is_rejected() {
        assert!(BackgroundState::new(0.0, [0.0; 3], 1.0 / 3.0).is_err());
        assert!(BackgroundState::new(-1.0, [0.0; 3], 1.0 / 3.0).is_err());
        assert!(BackgroundState::new(1.0, [0.0; 3], 0.0).is_err());
        assert!(BackgroundState::new(1.0, [0.0; 3], f64::NAN).is_err());
    }

    #[test]
    fn zero_background_velocity_gives_isotropic_pressure() {
        let bg = BackgroundState::with_standard_cs2(1.0, [0.0; 3]).unwrap();
        let map = lee_equilibrium_map(&bg).e21;
        // Diagonal rows (xx, yy, zz) carry c_s² in the ρ' column; every
        // other entry vanishes.
        for (r, diag) in [(0, true), (1, false), (2, false), (3, true), (4, false), (5, true)] {
            for c in 0..GAMMA {
                let expected = if diag && c == 0 { bg.cs2 } else { 0.0 };
                assert_eq!(map[(r, c)], expected, "row {r} col {c}");
            }
        }
    }

    #[test]
    fn conserved_map_matches_primitive_route_on_random_states() {
        // Substitute j = ρ₀u' + u₀ρ' and compare the conserved-variable map
        // against the primitive-variable expression term by term.
        let bg = sample_bg();
        let map = lee_equilibrium_map(&bg).e21;
        let pairs = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..50 {
            let rho_prime: f64 = rng.random_range(-1.0..1.0);
            let u_prime = [
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            ];
            let j = momentum_from_velocity(rho_prime, u_prime, &bg);
            let m = [rho_prime, j[0], j[1], j[2]];
            for (row, &(a, b)) in pairs.iter().enumerate() {
                let via_map: f64 = (0..GAMMA).map(|c| map[(row, c)] * m[c]).sum();
                let direct = primitive_second_moment(&bg, rho_prime, u_prime, a, b);
                assert!(
                    (via_map - direct).abs() < 1e-14,
                    "pair ({a},{b}): {via_map} vs {direct}"
                );
            }
        }
    }

    #[test]
    fn conserved_map_matches_linear_solve_oracle() {
        // Independent construction of the map: evaluate the primitive-route
        // second moments on four random conserved basis vectors and solve
        // the 4×4 linear systems with an external solver.
        let bg = sample_bg();
        let map = lee_equilibrium_map(&bg).e21;
        let pairs = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let basis = nalgebra::DMatrix::<f64>::from_fn(GAMMA, GAMMA, |_, _| {
            rng.random_range(-1.0..1.0)
        });
        // Right-hand sides: one row per moment pair, one column per basis
        // vector, evaluated through (ρ', u').
        let mut rhs = nalgebra::DMatrix::<f64>::zeros(BETA, GAMMA);
        for col in 0..GAMMA {
            let m: Vec<f64> = (0..GAMMA).map(|r| basis[(r, col)]).collect();
            let (rho_prime, u_prime) = macro_fields(m[0], [m[1], m[2], m[3]], &bg);
            for (row, &(a, b)) in pairs.iter().enumerate() {
                rhs[(row, col)] = primitive_second_moment(&bg, rho_prime, u_prime, a, b);
            }
        }
        // Solve X·basis = rhs for X, i.e. basisᵀ·Xᵀ = rhsᵀ.
        let solved = basis
            .transpose()
            .lu()
            .solve(&rhs.transpose())
            .expect("random basis is invertible")
            .transpose();
        for r in 0..BETA {
            for c in 0..GAMMA {
                assert!(
                    (map[(r, c)] - solved[(r, c)]).abs() < 1e-14,
                    "entry ({r},{c}): {} vs {}",
                    map[(r, c)],
                    solved[(r, c)]
                );
            }
        }
    }

    #[test]
    fn second_moment_rows_are_symmetric_in_the_index_pair() {
        let bg = sample_bg();
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(second_moment_row(&bg, a, b), second_moment_row(&bg, b, a));
            }
        }
    }

    #[test]
    fn equilibrium_map_is_linear() {
        let bg = sample_bg();
        let map = lee_equilibrium_map(&bg).e21;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let apply = |m: &[f64; 4]| -> Vec<f64> {
            (0..BETA)
                .map(|r| (0..GAMMA).map(|c| map[(r, c)] * m[c]).sum())
                .collect()
        };
        for _ in 0..20 {
            let m1: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
            let m2: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
            let (a, b): (f64, f64) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let combo: [f64; 4] = std::array::from_fn(|i| a * m1[i] + b * m2[i]);
            let lhs = apply(&combo);
            let (r1, r2) = (apply(&m1), apply(&m2));
            for i in 0..BETA {
                assert!((lhs[i] - (a * r1[i] + b * r2[i])).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn conserved_moments_of_point_masses() {
        let m = build_m1_d3q33();
        let zero = vec![0.0; 33];
        assert_eq!(conserved_moments(&zero, &m).unwrap(), (0.0, [0.0; 3]));

        // Unit mass on the rest velocity.
        let mut f = vec![0.0; 33];
        f[0] = 1.0;
        assert_eq!(conserved_moments(&f, &m).unwrap(), (1.0, [0.0; 3]));

        // Unit mass on the speed-two velocity (2,0,0) at index 28.
        let mut f = vec![0.0; 33];
        f[28] = 1.0;
        assert_eq!(conserved_moments(&f, &m).unwrap(), (1.0, [2.0, 0.0, 0.0]));
    }

    #[test]
    fn conserved_moments_rejects_wrong_length() {
        let m = build_m1_d3q33();
        assert!(conserved_moments(&[1.0; 20], &m).is_err());
    }

    #[test]
    fn macro_fields_inverts_momentum_composition() {
        let bg = sample_bg();
        // At j = u₀ρ' the velocity fluctuation vanishes.
        let j = [bg.u0[0] * 0.3, bg.u0[1] * 0.3, bg.u0[2] * 0.3];
        let (_, u_prime) = macro_fields(0.3, j, &bg);
        for c in u_prime {
            assert!(c.abs() < 1e-16);
        }
        // At ρ' = 0 the velocity is j/ρ₀ (exactly, for dyadic values).
        let half = BackgroundState::with_standard_cs2(0.5, bg.u0).unwrap();
        let (_, u_prime) = macro_fields(0.0, [0.125, -0.5, 0.25], &half);
        assert_eq!(u_prime, [0.25, -1.0, 0.5]);

        // Round-trip through composition and inversion.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let rho_prime: f64 = rng.random_range(-1.0..1.0);
            let u_prime: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
            let j = momentum_from_velocity(rho_prime, u_prime, &bg);
            let (r2, u2) = macro_fields(rho_prime, j, &bg);
            assert_eq!(r2, rho_prime);
            for i in 0..3 {
                assert!((u2[i] - u_prime[i]).abs() < 1e-15);
            }
        }
    }
}
