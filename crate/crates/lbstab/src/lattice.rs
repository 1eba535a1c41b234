//! Discrete velocity sets and raw moment matrices.
//!
//! The 33-velocity set and its raw moment matrix are the fixed foundation of
//! the whole construction: every golden asset, operator file, and simulation
//! snapshot is keyed to the velocity ordering defined here. The ordering is
//! frozen — changing it invalidates all stored artifacts.

use crate::error::{Error, Result};
use crate::exact;
use crate::linalg::Mat;

/// A discrete lattice velocity: displacement per time step, in lattice units.
pub type Velocity = [i64; 3];

/// The 33-velocity set in its frozen canonical order: the rest velocity,
/// the six unit axis velocities, twelve face diagonals, eight corners, and
/// six speed-two axis velocities.
pub const D3Q33_VELOCITIES: [Velocity; 33] = [
    [0, 0, 0],
    [-1, 0, 0],
    [1, 0, 0],
    [0, -1, 0],
    [0, 1, 0],
    [0, 0, -1],
    [0, 0, 1],
    [-1, -1, 0],
    [-1, 1, 0],
    [1, -1, 0],
    [1, 1, 0],
    [-1, 0, -1],
    [-1, 0, 1],
    [1, 0, -1],
    [1, 0, 1],
    [0, -1, -1],
    [0, -1, 1],
    [0, 1, -1],
    [0, 1, 1],
    [-1, -1, -1],
    [-1, -1, 1],
    [-1, 1, -1],
    [-1, 1, 1],
    [1, -1, -1],
    [1, -1, 1],
    [1, 1, -1],
    [1, 1, 1],
    [-2, 0, 0],
    [2, 0, 0],
    [0, -2, 0],
    [0, 2, 0],
    [0, 0, -2],
    [0, 0, 2],
];

/// Monomial exponents (k₁,k₂,k₃) defining each row of the canonical 33×33
/// raw moment matrix: density, momentum, the six second moments, then all
/// unique raw moments of total degree three through six supported by the
/// velocity set. The golden CSV asset is authoritative; this list documents
/// which monomial generates each row.
pub const D3Q33_MOMENT_EXPONENTS: [[u32; 3]; 33] = [
    [0, 0, 0],
    [1, 0, 0],
    [0, 1, 0],
    [0, 0, 1],
    [2, 0, 0],
    [1, 1, 0],
    [1, 0, 1],
    [0, 2, 0],
    [0, 1, 1],
    [0, 0, 2],
    [3, 0, 0],
    [0, 3, 0],
    [0, 0, 3],
    [2, 1, 0],
    [2, 0, 1],
    [1, 2, 0],
    [0, 2, 1],
    [1, 0, 2],
    [0, 1, 2],
    [1, 1, 1],
    [4, 0, 0],
    [0, 4, 0],
    [0, 0, 4],
    [2, 2, 0],
    [2, 0, 2],
    [0, 2, 2],
    [2, 1, 1],
    [1, 2, 1],
    [1, 1, 2],
    [2, 2, 1],
    [2, 1, 2],
    [1, 2, 2],
    [2, 2, 2],
];

/// Index subsets of the canonical 33-velocity ordering (0-based) defining
/// the smaller symmetric sets. Each subset keeps the canonical order.
const SUBSET_D3Q7: std::ops::Range<usize> = 0..7; // rest + axis
const SUBSET_D3Q19: std::ops::Range<usize> = 0..19; // rest + axis + face diagonals
const SUBSET_D3Q27: std::ops::Range<usize> = 0..27; // all speed ≤ √3

/// An ordered set of discrete velocities with validated symmetry.
#[derive(Clone, Debug, PartialEq)]
pub struct VelocitySet {
    name: String,
    velocities: Vec<Velocity>,
}

impl VelocitySet {
    fn new(name: &str, velocities: Vec<Velocity>) -> Result<Self> {
        let vs = Self {
            name: name.to_string(),
            velocities,
        };
        vs.validate()?;
        Ok(vs)
    }

    fn validate(&self) -> Result<()> {
        for (i, c) in self.velocities.iter().enumerate() {
            if self.velocities[i + 1..].contains(c) {
                return Err(Error::Construction(format!(
                    "velocity set {}: duplicate velocity {c:?}",
                    self.name
                )));
            }
            let neg = [-c[0], -c[1], -c[2]];
            if !self.velocities.contains(&neg) {
                return Err(Error::Construction(format!(
                    "velocity set {}: {c:?} present but {neg:?} missing",
                    self.name
                )));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.velocities.len()
    }

    pub fn velocities(&self) -> &[Velocity] {
        &self.velocities
    }

    /// Index of the velocity opposite to velocity `i`.
    pub fn opposite_index(&self, i: usize) -> usize {
        let c = self.velocities[i];
        let neg = [-c[0], -c[1], -c[2]];
        self.velocities
            .iter()
            .position(|&v| v == neg)
            .expect("validated sets are symmetric")
    }
}

/// Builds one of the named velocity sets. The smaller sets are the symmetric
/// subsets of the 27-velocity cube, in canonical order.
pub fn build_velocity_set(name: &str) -> Result<VelocitySet> {
    let indices: Vec<usize> = match name {
        "D3Q7" => SUBSET_D3Q7.collect(),
        "D3Q13" => std::iter::once(0).chain(7..19).collect(), // rest + face diagonals
        "D3Q15" => (0..7).chain(19..27).collect(),            // rest + axis + corners
        "D3Q19" => SUBSET_D3Q19.collect(),
        "D3Q21" => std::iter::once(0).chain(7..27).collect(), // rest + diagonals + corners
        "D3Q27" => SUBSET_D3Q27.collect(),
        "D3Q33" => (0..33).collect(),
        other => {
            return Err(Error::Config(format!(
                "unknown velocity set {other:?}; expected one of \
                 D3Q7, D3Q13, D3Q15, D3Q19, D3Q21, D3Q27, D3Q33"
            )))
        }
    };
    let velocities = indices.iter().map(|&i| D3Q33_VELOCITIES[i]).collect();
    VelocitySet::new(name, velocities)
}

/// Role of a moment-matrix row in the collision construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowRole {
    /// Density and momentum rows; preserved exactly by collisions.
    Conserved,
    /// Second-moment rows whose equilibria are prescribed by the target
    /// equations.
    Consistency,
    /// Remaining rows; free to be reshaped by orthogonalization.
    Tail,
}

/// A regular n×n moment matrix with row-role annotations.
///
/// Raw moment matrices carry exact integer entries alongside the working
/// floating-point matrix, so rank and kernel computations can run exactly;
/// derived matrices (relative, orthogonalized) are floating-point only.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentMatrix {
    entries: Mat,
    int_entries: Option<Vec<Vec<i64>>>,
    row_roles: Vec<RowRole>,
    gamma: usize,
    beta: usize,
}

impl MomentMatrix {
    fn check_shape(n: usize, rows: usize, gamma: usize, beta: usize) -> Result<()> {
        if gamma + beta > n {
            return Err(Error::Construction(format!(
                "role counts exceed matrix size: gamma {gamma} + beta {beta} > n {n}"
            )));
        }
        if rows != n {
            return Err(Error::Construction(format!(
                "moment matrix must be square, got {rows}×{n}"
            )));
        }
        Ok(())
    }

    fn roles(n: usize, gamma: usize, beta: usize) -> Vec<RowRole> {
        let mut row_roles = vec![RowRole::Tail; n];
        row_roles[..gamma].fill(RowRole::Conserved);
        row_roles[gamma..gamma + beta].fill(RowRole::Consistency);
        row_roles
    }

    /// Assembles a moment matrix from exact integer rows: the first `gamma`
    /// rows are conserved, the next `beta` consistency, the rest tail.
    pub fn from_integer_rows(rows: Vec<Vec<i64>>, gamma: usize, beta: usize) -> Result<Self> {
        let n = rows.len();
        Self::check_shape(n, rows.first().map_or(n, |r| r.len()), gamma, beta)?;
        let entries = Mat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| v as f64).collect())
                .collect(),
        );
        Ok(Self {
            entries,
            int_entries: Some(rows),
            row_roles: Self::roles(n, gamma, beta),
            gamma,
            beta,
        })
    }

    /// Assembles a moment matrix from a real matrix (no exact backing).
    pub fn from_real(entries: Mat, gamma: usize, beta: usize) -> Result<Self> {
        let n = entries.rows();
        Self::check_shape(n, entries.cols(), gamma, beta)?;
        Ok(Self {
            entries,
            int_entries: None,
            row_roles: Self::roles(n, gamma, beta),
            gamma,
            beta,
        })
    }

    pub fn n(&self) -> usize {
        self.entries.rows()
    }

    pub fn gamma(&self) -> usize {
        self.gamma
    }

    pub fn beta(&self) -> usize {
        self.beta
    }

    /// Number of tail rows, n − γ − β.
    pub fn tail_len(&self) -> usize {
        self.n() - self.gamma - self.beta
    }

    pub fn row_roles(&self) -> &[RowRole] {
        &self.row_roles
    }

    /// The working floating-point matrix.
    pub fn entries(&self) -> &Mat {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.entries.row(i)
    }

    /// Exact integer entries, present only for raw moment matrices.
    pub fn entries_i64(&self) -> Option<&[Vec<i64>]> {
        self.int_entries.as_deref()
    }

    /// Floating-point copy used by operator assembly.
    pub fn to_mat(&self) -> Mat {
        self.entries.clone()
    }
}

fn int_pow(base: i64, exp: u32) -> i64 {
    // 0⁰ = 1 by the raw-moment convention; i64::pow already does this.
    base.pow(exp)
}

fn raw_moment_row_i64(vs: &VelocitySet, exponents: [u32; 3]) -> Vec<i64> {
    vs.velocities()
        .iter()
        .map(|c| {
            int_pow(c[0], exponents[0]) * int_pow(c[1], exponents[1]) * int_pow(c[2], exponents[2])
        })
        .collect()
}

/// The raw moment row for monomial c₁^k₁ c₂^k₂ c₃^k₃: component i is the
/// monomial evaluated at velocity i (with 0⁰ = 1).
pub fn raw_moment_row(vs: &VelocitySet, exponents: [u32; 3]) -> Vec<f64> {
    raw_moment_row_i64(vs, exponents)
        .into_iter()
        .map(|v| v as f64)
        .collect()
}

/// Builds the canonical 33×33 raw moment matrix: row i is the raw moment of
/// `D3Q33_MOMENT_EXPONENTS[i]` over `D3Q33_VELOCITIES`. Four conserved rows
/// (density + momentum), six consistency rows (second moments), 23 tail rows.
pub fn build_m1_d3q33() -> MomentMatrix {
    let vs = build_velocity_set("D3Q33").expect("built-in name");
    let rows = D3Q33_MOMENT_EXPONENTS
        .iter()
        .map(|&e| raw_moment_row_i64(&vs, e))
        .collect();
    MomentMatrix::from_integer_rows(rows, 4, 6).expect("33 = 4 + 6 + 23")
}

/// Builds a raw moment matrix for any of the named velocity sets: the ten
/// canonical low-order rows (density, momentum, second moments) followed by
/// a tail of higher-order raw moments chosen greedily, in a fixed documented
/// order, to reach full rank. Rank decisions use exact integer elimination.
///
/// Velocities of the sub-33 sets have components in {−1,0,1}, where c³ = c,
/// so exponents per axis never need to exceed two; the candidate tail
/// monomials are the exponent triples in {0,1,2}³ of total degree ≥ 3,
/// ordered by total degree and then lexicographically descending.
pub fn build_m1(vs: &VelocitySet) -> Result<MomentMatrix> {
    if vs.name() == "D3Q33" {
        return Ok(build_m1_d3q33());
    }
    let n = vs.n();
    let canonical: [[u32; 3]; 10] = [
        [0, 0, 0],
        [1, 0, 0],
        [0, 1, 0],
        [0, 0, 1],
        [2, 0, 0],
        [1, 1, 0],
        [1, 0, 1],
        [0, 2, 0],
        [0, 1, 1],
        [0, 0, 2],
    ];
    if n < canonical.len() {
        return Err(Error::Construction(format!(
            "velocity set {} has {} velocities; at least 10 are required for \
             four conserved and six second-moment rows",
            vs.name(),
            n
        )));
    }
    let mut rows: Vec<Vec<i64>> = canonical
        .iter()
        .map(|&e| raw_moment_row_i64(vs, e))
        .collect();
    let (rank, _) = exact::int_rank_det(&rows);
    if rank != rows.len() {
        return Err(Error::Construction(format!(
            "velocity set {}: the ten low-order moment rows are linearly \
             dependent (rank {rank}); no regular moment matrix with the \
             required role structure exists",
            vs.name()
        )));
    }

    let mut candidates: Vec<[u32; 3]> = Vec::new();
    for k1 in 0..=2u32 {
        for k2 in 0..=2u32 {
            for k3 in 0..=2u32 {
                if k1 + k2 + k3 >= 3 {
                    candidates.push([k1, k2, k3]);
                }
            }
        }
    }
    candidates.sort_by_key(|&[k1, k2, k3]| {
        (
            k1 + k2 + k3,
            std::cmp::Reverse(k1),
            std::cmp::Reverse(k2),
            std::cmp::Reverse(k3),
        )
    });

    for e in candidates {
        if rows.len() == n {
            break;
        }
        let candidate = raw_moment_row_i64(vs, e);
        rows.push(candidate);
        let (rank, _) = exact::int_rank_det(&rows);
        if rank != rows.len() {
            rows.pop();
        }
    }
    if rows.len() != n {
        return Err(Error::Construction(format!(
            "velocity set {}: raw moments span only {} of {} dimensions",
            vs.name(),
            rows.len(),
            n
        )));
    }
    MomentMatrix::from_integer_rows(rows, 4, 6)
}

/// Checks regularity (full numerical rank) and reports a pivot-ratio
/// condition estimate. The golden-matrix tests additionally confirm rank by
/// exact integer elimination; this check is the fast floating-point gate
/// used during operator assembly.
pub fn regularity_check(m: &MomentMatrix) -> (bool, f64) {
    let (rank, cond) = m.to_mat().rank_and_cond();
    (rank == m.n(), cond)
}
