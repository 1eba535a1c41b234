//! Construction and certification of provably stable collision operators.
//!
//! The pipeline turns a raw moment matrix and a background state into a
//! collision operator with a machine-checkable stability certificate:
//!
//! 1. [`build_relative_m3`] shifts the consistency rows by their equilibrium
//!    maps, so the corresponding relative moments vanish at equilibrium.
//! 2. [`constraint_matrix`] encodes the requirement that conserved rows be
//!    orthogonal to consistency rows under a weighted inner product with
//!    unknown positive weights λ: the weights must satisfy A·λ = 0.
//! 3. [`kernel_basis`] + [`solve_weights_lp`] search the kernel of A for a
//!    strictly positive weight vector (componentwise ≥ 1, minimal sum).
//! 4. [`gram_schmidt_tail`] re-orthogonalizes the tail rows against the
//!    conserved-row span under the λ-weighted inner product, leaving the
//!    first γ+β rows untouched.
//! 5. [`assemble_collision`] builds the relaxation operator; with the
//!    orthogonality in place its generator J satisfies JΛ = ΛJᵀ with
//!    Λ = diag(λ), and I + τJ is a rank-γ projection — the two residuals
//!    reported in the [`StabilityCertificate`].
//!
//! For τ ≥ 1/2 the two relaxation rates {0, 1/τ} lie in [0, 2], which makes
//! the weighted L² energy Σ fᵀΛ⁻¹f non-increasing under collisions — the
//! property the simulator's energy monitor checks at run time.
//!
//! Floating point is the primary arithmetic; the [`exact_route`] submodule
//! re-derives the kernel dimension in exact field arithmetic for
//! verification, covering both rational background velocities and the
//! `(p/q)/√3` family.

mod lp;

use crate::equilibrium::{lee_equilibrium_map, BackgroundState, EquilibriumMap};
use crate::error::{Error, Result};
use crate::lattice::MomentMatrix;
use crate::linalg::Mat;
use crate::tolerances;

/// Positive diagonal weights plus the residuals proving they work.
#[derive(Clone, Debug)]
pub struct StabilityCertificate {
    /// Diagonal of Λ, strictly positive.
    pub lambda: Vec<f64>,
    /// max |JΛ − ΛJᵀ|.
    pub symmetrization_residual: f64,
    /// max |H² − H| with H = I + τJ.
    pub idempotency_residual: f64,
    /// The two relaxation rates of the operator: 0 on conserved moments,
    /// 1/τ on everything else.
    pub relaxation_rates: [f64; 2],
    pub tau: f64,
}

impl StabilityCertificate {
    /// True when the certificate proves stability (not merely the
    /// symmetrization structure): residuals within `tol`, positive weights,
    /// and both relaxation rates inside [0, 2] (equivalently τ ≥ 1/2).
    pub fn certifies_stability(&self, tol: f64) -> bool {
        self.symmetrization_residual <= tol
            && self.idempotency_residual <= tol
            && self.lambda.iter().all(|&l| l > 0.0)
            && self.tau >= 0.5
    }
}

/// A BGK-type collision operator in reduced (equilibrium-projection) form.
#[derive(Clone, Debug)]
pub struct CollisionOperator {
    /// n×γ matrix R mapping conserved moments to equilibrium densities:
    /// f^eq = R·(ρ', j). Equals the first γ columns of the inverse of the
    /// modified moment matrix.
    pub reduced_equilibrium: Mat,
    /// The modified moment matrix M̃ the operator was assembled from.
    pub moment_matrix: MomentMatrix,
    pub tau: f64,
    /// Optional dense generator J = (R·C − I)/τ with C the conserved rows;
    /// used by verification and the reference simulator path.
    pub full_matrix: Option<Mat>,
}

impl CollisionOperator {
    pub fn n(&self) -> usize {
        self.moment_matrix.n()
    }

    pub fn gamma(&self) -> usize {
        self.moment_matrix.gamma()
    }

    /// Collision frequency ω = 1/τ.
    pub fn omega(&self) -> f64 {
        1.0 / self.tau
    }

    /// The γ×n conserved rows C of the moment matrix.
    pub fn conserved_rows(&self) -> Mat {
        self.moment_matrix.entries().leading_rows(self.gamma())
    }

    /// In-place collision in reduced form:
    /// f ← f + ω(R·(C·f) − f) = (1−ω)f + ω·R·m.
    pub fn apply_reduced_in_place(&self, f: &mut [f64]) {
        let n = self.n();
        let gamma = self.gamma();
        assert_eq!(f.len(), n, "density vector length mismatch");
        let omega = self.omega();
        let mut m = [0.0f64; 8];
        assert!(gamma <= 8);
        for (c, slot) in m.iter_mut().enumerate().take(gamma) {
            *slot = self
                .moment_matrix
                .row(c)
                .iter()
                .zip(f.iter())
                .map(|(&a, &b)| a * b)
                .sum();
        }
        let r = &self.reduced_equilibrium;
        for (q, fq) in f.iter_mut().enumerate() {
            let eq: f64 = (0..gamma).map(|c| r[(q, c)] * m[c]).sum();
            *fq = (1.0 - omega) * *fq + omega * eq;
        }
    }

    /// Collision through the dense generator: f + J·f. Verification path.
    pub fn apply_dense(&self, f: &[f64]) -> Result<Vec<f64>> {
        let j = self
            .full_matrix
            .as_ref()
            .ok_or_else(|| Error::Input("dense generator not materialized".into()))?;
        let jf = j.matvec(f);
        Ok(f.iter().zip(jf).map(|(&a, b)| a + b).collect())
    }
}

fn check_e21_shape(m1: &MomentMatrix, eq: &EquilibriumMap) -> Result<()> {
    if eq.e21.rows() != m1.beta() || eq.e21.cols() != m1.gamma() {
        return Err(Error::Input(format!(
            "equilibrium map is {}×{}, moment matrix expects {}×{}",
            eq.e21.rows(),
            eq.e21.cols(),
            m1.beta(),
            m1.gamma()
        )));
    }
    Ok(())
}

/// Shifts each consistency row by the equilibrium combination of conserved
/// rows: r_i ← r_i − Σ_c E₂₁[i,c]·r_c. Conserved and tail rows are copied
/// unchanged. The shifted rows measure the deviation of the second moments
/// from their equilibrium values, so they vanish on equilibrium densities.
pub fn build_relative_m3(m1: &MomentMatrix, eq: &EquilibriumMap) -> Result<MomentMatrix> {
    check_e21_shape(m1, eq)?;
    let (gamma, beta, n) = (m1.gamma(), m1.beta(), m1.n());
    let mut out = m1.to_mat();
    let conserved: Vec<Vec<f64>> = (0..gamma).map(|c| m1.row(c).to_vec()).collect();
    for i in 0..beta {
        let row = out.row_mut(gamma + i);
        for c in 0..gamma {
            let w = eq.e21[(i, c)];
            if w == 0.0 {
                continue;
            }
            for k in 0..n {
                row[k] -= w * conserved[c][k];
            }
        }
    }
    MomentMatrix::from_real(out, gamma, beta)
}

/// Shifts consistency *and* tail rows by their equilibrium maps, so every
/// non-conserved relative moment vanishes at equilibrium. Requires the tail
/// map E₃₁.
pub fn build_fully_relative_m2(m1: &MomentMatrix, eq: &EquilibriumMap) -> Result<MomentMatrix> {
    check_e21_shape(m1, eq)?;
    let e31 = eq
        .e31
        .as_ref()
        .ok_or_else(|| Error::Input("fully relative construction requires the tail map".into()))?;
    let (gamma, beta, n) = (m1.gamma(), m1.beta(), m1.n());
    let tail = m1.tail_len();
    if e31.rows() != tail || e31.cols() != gamma {
        return Err(Error::Input(format!(
            "tail map is {}×{}, moment matrix expects {}×{}",
            e31.rows(),
            e31.cols(),
            tail,
            gamma
        )));
    }
    let mut out = build_relative_m3(m1, eq)?.to_mat();
    let conserved: Vec<Vec<f64>> = (0..gamma).map(|c| m1.row(c).to_vec()).collect();
    for i in 0..tail {
        let row = out.row_mut(gamma + beta + i);
        for c in 0..gamma {
            let w = e31[(i, c)];
            if w == 0.0 {
                continue;
            }
            for k in 0..n {
                row[k] -= w * conserved[c][k];
            }
        }
    }
    MomentMatrix::from_real(out, gamma, beta)
}

/// The weight-constraint matrix A: one row per (conserved, consistency) row
/// pair, laid out pair-major — row i·β + j has component k equal to
/// r_i[k]·r_{γ+j}[k]. A vector λ with A·λ = 0 makes every conserved row
/// orthogonal to every consistency row under ⟨u,v⟩_Λ = Σ_k λ_k u_k v_k.
pub fn constraint_matrix(m3: &MomentMatrix) -> Mat {
    let (gamma, beta, n) = (m3.gamma(), m3.beta(), m3.n());
    let mut a = Mat::zeros(gamma * beta, n);
    for i in 0..gamma {
        for j in 0..beta {
            let row = a.row_mut(i * beta + j);
            let ri = m3.row(i);
            let rj = m3.row(gamma + j);
            for k in 0..n {
                row[k] = ri[k] * rj[k];
            }
        }
    }
    a
}

/// Null-space basis of a real matrix by Gauss-Jordan elimination with
/// partial pivoting; pivots below `RANK_PIVOT_REL` times the largest entry
/// count as zero. Returns an n×d matrix whose columns span the kernel; each
/// column v satisfies ‖A·v‖_∞ well below the documented 1e−10·‖v‖_∞ bound
/// for the moderately conditioned constraint matrices this pipeline builds.
pub fn kernel_basis(a: &Mat) -> Mat {
    let (rows, cols) = (a.rows(), a.cols());
    let mut r = a.clone();
    let tol = tolerances::RANK_PIVOT_REL * r.max_abs();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut pr = 0usize;
    for col in 0..cols {
        if pr == rows {
            break;
        }
        let (best_row, best_abs) = (pr..rows)
            .map(|i| (i, r[(i, col)].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .expect("non-empty row range");
        if best_abs <= tol {
            continue;
        }
        if best_row != pr {
            for c in 0..cols {
                let tmp = r[(pr, c)];
                r[(pr, c)] = r[(best_row, c)];
                r[(best_row, c)] = tmp;
            }
        }
        let piv = r[(pr, col)];
        for c in 0..cols {
            r[(pr, c)] /= piv;
        }
        for i in 0..rows {
            if i == pr {
                continue;
            }
            let f = r[(i, col)];
            if f == 0.0 {
                continue;
            }
            for c in 0..cols {
                r[(i, c)] -= f * r[(pr, c)];
            }
            r[(i, col)] = 0.0;
        }
        pivots.push((pr, col));
        pr += 1;
    }

    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let free_cols: Vec<usize> = (0..cols).filter(|c| !pivot_cols.contains(c)).collect();
    let mut basis = Mat::zeros(cols, free_cols.len());
    for (d, &free) in free_cols.iter().enumerate() {
        basis[(free, d)] = 1.0;
        for &(row, pc) in &pivots {
            basis[(pc, d)] = -r[(row, free)];
        }
    }
    basis
}

/// Searches the kernel (spanned by `basis` columns) for positive weights:
/// minimize Σ_i λ_i subject to λ = basis·α with λ_i ≥ 1 componentwise.
///
/// Formulated over nonnegative variables (α split into positive and
/// negative parts, one surplus variable per component) and solved with the
/// deterministic two-phase simplex. `Error::Infeasible` means no kernel
/// element lies in the positive orthant — the construction admits no
/// stability structure for this background.
pub fn solve_weights_lp(basis: &Mat) -> Result<Vec<f64>> {
    let n = basis.rows();
    let d = basis.cols();
    if d == 0 {
        return Err(Error::Infeasible);
    }
    // Columns: α⁺ (d), α⁻ (d), surplus s (n); rows: basis·α − s = 1.
    let k = 2 * d + n;
    let mut constraints = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = vec![0.0; k];
        for j in 0..d {
            row[j] = basis[(i, j)];
            row[d + j] = -basis[(i, j)];
        }
        row[2 * d + i] = -1.0;
        constraints.push(row);
    }
    let mut cost = vec![0.0; k];
    for j in 0..d {
        let colsum: f64 = (0..n).map(|i| basis[(i, j)]).sum();
        cost[j] = colsum;
        cost[d + j] = -colsum;
    }
    let lp = lp::StandardLp {
        constraints,
        rhs: vec![1.0; n],
        cost,
    };
    let x = match lp::solve(&lp)? {
        lp::LpOutcome::Optimal(x) => x,
        lp::LpOutcome::Infeasible => return Err(Error::Infeasible),
    };
    let alpha: Vec<f64> = (0..d).map(|j| x[j] - x[d + j]).collect();
    let lambda = basis.matvec(&alpha);
    for (i, &l) in lambda.iter().enumerate() {
        if l < 1.0 - tolerances::LP_BOUND_SLACK {
            return Err(Error::Construction(format!(
                "weight solver returned an infeasible point: λ[{i}] = {l}"
            )));
        }
    }
    Ok(lambda)
}

/// Weighted inner product ⟨u,v⟩_Λ = Σ_k λ_k u_k v_k.
fn weighted_dot(u: &[f64], v: &[f64], lambda: &[f64]) -> f64 {
    u.iter()
        .zip(v)
        .zip(lambda)
        .map(|((&a, &b), &l)| l * a * b)
        .sum()
}

/// Truncated weighted Gram-Schmidt: builds a Λ-orthogonal (unnormalized)
/// basis {o_j} of the conserved-row span by classical Gram-Schmidt with one
/// re-orthogonalization pass, then projects every tail row against all o_j.
/// Rows 1..γ+β pass through bit-identical; only tail rows change.
///
/// Precondition (checked by the certificate, not here): A·λ = 0, so the
/// consistency rows are already Λ-orthogonal to the conserved span.
pub fn gram_schmidt_tail(m3: &MomentMatrix, lambda: &[f64]) -> Result<MomentMatrix> {
    let (gamma, beta, n) = (m3.gamma(), m3.beta(), m3.n());
    if lambda.len() != n {
        return Err(Error::Input(format!(
            "weight vector has {} components, expected {n}",
            lambda.len()
        )));
    }
    if lambda.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::Input("weights must be strictly positive".into()));
    }

    // Λ-orthogonal basis of the conserved-row span (classical Gram-Schmidt,
    // two passes for numerical orthogonality).
    let mut ortho: Vec<Vec<f64>> = Vec::with_capacity(gamma);
    let mut norms2: Vec<f64> = Vec::with_capacity(gamma);
    for j in 0..gamma {
        let mut o = m3.row(j).to_vec();
        for _pass in 0..2 {
            for (k, ok) in ortho.iter().enumerate() {
                let c = weighted_dot(&o, ok, lambda) / norms2[k];
                for (ov, &bv) in o.iter_mut().zip(ok) {
                    *ov -= c * bv;
                }
            }
        }
        let n2 = weighted_dot(&o, &o, lambda);
        let original2 = weighted_dot(m3.row(j), m3.row(j), lambda);
        if n2 <= tolerances::GS_DEGENERACY_REL * tolerances::GS_DEGENERACY_REL * original2 {
            return Err(Error::Construction(format!(
                "conserved rows are degenerate under the weighted inner \
                 product: basis vector {j} collapsed"
            )));
        }
        ortho.push(o);
        norms2.push(n2);
    }

    let mut out = m3.to_mat();
    for i in gamma + beta..n {
        let row = out.row_mut(i);
        for _pass in 0..2 {
            for (k, ok) in ortho.iter().enumerate() {
                let c = weighted_dot(row, ok, lambda) / norms2[k];
                for (rv, &bv) in row.iter_mut().zip(ok) {
                    *rv -= c * bv;
                }
            }
        }
    }
    MomentMatrix::from_real(out, gamma, beta)
}

/// Assembles the collision operator from the modified moment matrix:
/// equilibrium projection H = R·C (R the first γ columns of M̃⁻¹, C the
/// conserved rows), generator J = (H − I)/τ, collision f ↦ f + J·f.
pub fn assemble_collision(mtilde: &MomentMatrix, tau: f64) -> Result<CollisionOperator> {
    if !(tau > 0.0) {
        return Err(Error::Config(format!(
            "relaxation time must be positive, got {tau}"
        )));
    }
    let gamma = mtilde.gamma();
    let inverse = mtilde.entries().invert().map_err(|_| {
        Error::Construction("modified moment matrix is singular".into())
    })?;
    let reduced = inverse.leading_columns(gamma);
    let conserved = mtilde.entries().leading_rows(gamma);
    let h = reduced.matmul(&conserved);
    let n = mtilde.n();
    let mut j = h;
    for i in 0..n {
        j[(i, i)] -= 1.0;
    }
    let j = j.scale(1.0 / tau);
    Ok(CollisionOperator {
        reduced_equilibrium: reduced,
        moment_matrix: mtilde.clone(),
        tau,
        full_matrix: Some(j),
    })
}

/// max |JΛ − ΛJᵀ| — zero when Λ symmetrizes the generator, the algebraic
/// core of the stability argument.
pub fn verify_prestability(op: &CollisionOperator, lambda: &[f64]) -> Result<f64> {
    let j = op
        .full_matrix
        .as_ref()
        .ok_or_else(|| Error::Input("dense generator not materialized".into()))?;
    let n = j.rows();
    if lambda.len() != n {
        return Err(Error::Input(format!(
            "weight vector has {} components, expected {n}",
            lambda.len()
        )));
    }
    let mut worst = 0.0f64;
    for r in 0..n {
        for c in 0..n {
            let v = j[(r, c)] * lambda[c] - lambda[r] * j[(c, r)];
            worst = worst.max(v.abs());
        }
    }
    Ok(worst)
}

/// max |H² − H| with H = I + τJ — zero when the equilibrium projection is
/// exactly idempotent, pinning the spectrum of J to {−1/τ, 0}.
pub fn verify_projection(op: &CollisionOperator) -> Result<f64> {
    let j = op
        .full_matrix
        .as_ref()
        .ok_or_else(|| Error::Input("dense generator not materialized".into()))?;
    let n = j.rows();
    let mut h = j.scale(op.tau);
    for i in 0..n {
        h[(i, i)] += 1.0;
    }
    let h2 = h.matmul(&h);
    Ok(crate::linalg::max_abs_diff(&h2, &h))
}

/// Full pipeline: equilibrium map → relative matrix → weight search →
/// orthogonalization → assembly → residual verification. Fails with
/// `Error::Infeasible` when no positive weights exist, and with a
/// construction error if the assembled operator misses the certification
/// tolerance (which would indicate a defect, not a property of the input).
pub fn certify_operator(
    m1: &MomentMatrix,
    bg: &BackgroundState,
    tau: f64,
) -> Result<(CollisionOperator, StabilityCertificate)> {
    if !(tau > 0.0) {
        return Err(Error::Config(format!(
            "relaxation time must be positive, got {tau}"
        )));
    }
    let eq = lee_equilibrium_map(bg);
    let m3 = build_relative_m3(m1, &eq)?;
    let a = constraint_matrix(&m3);
    let basis = kernel_basis(&a);
    let lambda = solve_weights_lp(&basis)?;

    // The weights must satisfy the kernel condition they were derived from.
    let resid = a
        .matvec(&lambda)
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = lambda.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if resid > tolerances::LP_FEASIBILITY * scale {
        return Err(Error::Construction(format!(
            "weights violate the kernel condition: residual {resid:.3e}"
        )));
    }

    let mtilde = gram_schmidt_tail(&m3, &lambda)?;
    let op = assemble_collision(&mtilde, tau)?;
    let symmetrization_residual = verify_prestability(&op, &lambda)?;
    let idempotency_residual = verify_projection(&op)?;
    if symmetrization_residual > tolerances::CERTIFICATION_RESIDUAL
        || idempotency_residual > tolerances::CERTIFICATION_RESIDUAL
    {
        return Err(Error::Construction(format!(
            "assembled operator failed certification: symmetrization \
             {symmetrization_residual:.3e}, idempotency {idempotency_residual:.3e}"
        )));
    }
    let certificate = StabilityCertificate {
        lambda,
        symmetrization_residual,
        idempotency_residual,
        relaxation_rates: [0.0, 1.0 / tau],
        tau,
    };
    Ok((op, certificate))
}

/// Feasibility probe: runs the pipeline up to the weight search.
/// `Ok(false)` is the scientific result "no stability structure here".
pub fn background_feasible(m1: &MomentMatrix, bg: &BackgroundState) -> Result<bool> {
    let eq = lee_equilibrium_map(bg);
    let m3 = build_relative_m3(m1, &eq)?;
    let a = constraint_matrix(&m3);
    let basis = kernel_basis(&a);
    match solve_weights_lp(&basis) {
        Ok(_) => Ok(true),
        Err(Error::Infeasible) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Exact-arithmetic verification route.
///
/// Background velocities of the form (p/q)/√3 (and plain rationals, the
/// b = 0 case) give constraint matrices with entries in Q(√3); the kernel
/// dimension is re-derived there by exact elimination, independent of all
/// floating-point tolerance choices.
pub mod exact_route {
    use super::*;
    use crate::exact::{ratio, sqrt3_rank, Sqrt3Ext};
    use num::{BigRational, Zero};

    /// Exact background velocity of a named preset.
    pub fn preset_u0_exact(name: &str) -> Result<[Sqrt3Ext; 3]> {
        let fr = crate::config::preset_u0_fractions(name)?;
        // (p/q)/√3 = (p/(3q))·√3.
        Ok(std::array::from_fn(|i| {
            Sqrt3Ext::from_sqrt3_multiple(fr[i].0, 3 * fr[i].1)
        }))
    }

    /// Exact second-moment equilibrium map, rows (xx,xy,xz,yy,yz,zz),
    /// columns (ρ', j₁, j₂, j₃).
    fn e21_exact(u0: &[Sqrt3Ext; 3], cs2: &BigRational) -> Vec<Vec<Sqrt3Ext>> {
        const PAIRS: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];
        let mut rows = Vec::with_capacity(6);
        for &(a, b) in &PAIRS {
            let mut row = vec![Sqrt3Ext::zero(); 4];
            let diag = if a == b {
                Sqrt3Ext::new(cs2.clone(), BigRational::zero())
            } else {
                Sqrt3Ext::zero()
            };
            row[0] = diag.sub(&u0[a].mul(&u0[b]));
            row[1 + b] = row[1 + b].add(&u0[a]);
            row[1 + a] = row[1 + a].add(&u0[b]);
            rows.push(row);
        }
        rows
    }

    /// The weight-constraint matrix with exact entries, mirroring
    /// [`constraint_matrix`] applied to the relative moment matrix.
    pub fn constraint_matrix_exact(
        m1: &MomentMatrix,
        u0: &[Sqrt3Ext; 3],
        cs2: &BigRational,
    ) -> Result<Vec<Vec<Sqrt3Ext>>> {
        let ints = m1.entries_i64().ok_or_else(|| {
            Error::Input("exact route requires a raw moment matrix with integer entries".into())
        })?;
        let (gamma, beta, n) = (m1.gamma(), m1.beta(), m1.n());
        if gamma != 4 || beta != 6 {
            return Err(Error::Input(
                "exact route expects 4 conserved and 6 consistency rows".into(),
            ));
        }
        let e21 = e21_exact(u0, cs2);
        // Shifted consistency rows, exactly.
        let mut rel: Vec<Vec<Sqrt3Ext>> = Vec::with_capacity(beta);
        for i in 0..beta {
            let mut row: Vec<Sqrt3Ext> = ints[gamma + i]
                .iter()
                .map(|&v| Sqrt3Ext::from_ratio(v, 1))
                .collect();
            for c in 0..gamma {
                if e21[i][c].is_zero() {
                    continue;
                }
                for k in 0..n {
                    let shift = e21[i][c].mul(&Sqrt3Ext::from_ratio(ints[c][k], 1));
                    row[k] = row[k].sub(&shift);
                }
            }
            rel.push(row);
        }
        let mut a = Vec::with_capacity(gamma * beta);
        for i in 0..gamma {
            for rel_row in &rel {
                let row: Vec<Sqrt3Ext> = (0..n)
                    .map(|k| Sqrt3Ext::from_ratio(ints[i][k], 1).mul(&rel_row[k]))
                    .collect();
                a.push(row);
            }
        }
        Ok(a)
    }

    /// Exact kernel dimension n − rank(A) over Q(√3).
    pub fn kernel_dimension_exact(
        m1: &MomentMatrix,
        u0: &[Sqrt3Ext; 3],
        cs2: &BigRational,
    ) -> Result<usize> {
        let a = constraint_matrix_exact(m1, u0, cs2)?;
        Ok(m1.n() - sqrt3_rank(&a))
    }

    /// Standard exact speed of sound c_s² = 1/3.
    pub fn standard_cs2() -> BigRational {
        ratio(1, 3)
    }

    /// Exact weight vector certified by [`exact_weight_feasibility`].
    pub struct ExactWeights {
        /// Diagonal weights, each ≥ 1, annihilated by the constraint matrix.
        pub lambda: Vec<Sqrt3Ext>,
    }

    /// Decide — in exact arithmetic, with no tolerances anywhere — whether
    /// positive diagonal weights exist for the given background velocity.
    ///
    /// The weight system is `{λ : Aλ = 0, λ_k ≥ 1}`. Substituting
    /// `λ = 1 + μ` with `μ ≥ 0` turns it into the standard-form feasibility
    /// problem `{μ ≥ 0 : Aμ = −A·1}`, which a phase-1 simplex over `Q(√3)`
    /// decides exactly. A `Ok(None)` is therefore a proof of infeasibility,
    /// and a returned weight vector satisfies its constraints identically.
    pub fn exact_weight_feasibility(
        m1: &MomentMatrix,
        u0: &[Sqrt3Ext; 3],
        cs2: &BigRational,
    ) -> Result<Option<ExactWeights>> {
        let a = constraint_matrix_exact(m1, u0, cs2)?;
        let rhs: Vec<Sqrt3Ext> = a
            .iter()
            .map(|row| {
                row.iter()
                    .fold(Sqrt3Ext::zero(), |acc, v| acc.add(v))
                    .neg()
            })
            .collect();
        let out = crate::exact::exact_phase1(&a, &rhs);
        let Some(mu) = out.witness else {
            return Ok(None);
        };
        let one = Sqrt3Ext::from_ratio(1, 1);
        let lambda: Vec<Sqrt3Ext> = mu.iter().map(|m| m.add(&one)).collect();
        // Re-verify the certificate independently of the simplex: Aλ = 0 and
        // λ ≥ 1, both checked exactly.
        for row in &a {
            let mut dot = Sqrt3Ext::zero();
            for (c, l) in row.iter().zip(&lambda) {
                dot = dot.add(&c.mul(l));
            }
            if !dot.is_zero() {
                return Err(Error::Construction(
                    "exact simplex returned a witness outside the kernel".into(),
                ));
            }
        }
        for l in &lambda {
            if l.sub(&one).is_negative() {
                return Err(Error::Construction(
                    "exact simplex returned a weight below its lower bound".into(),
                ));
            }
        }
        Ok(Some(ExactWeights { lambda }))
    }
}
