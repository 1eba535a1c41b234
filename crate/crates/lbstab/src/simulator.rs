//! Stream–collide evolution on a periodic lattice.
//!
//! The update per step is collide-then-stream:
//!
//! ```text
//! f_i(t+Δt, x + Δt·c_i) = f_i(t, x) + (1/τ)·(f_i^eq(t, x) − f_i(t, x))
//! ```
//!
//! on the periodic domain [0,1)³ with Δx = Δt = 1/grid_n and node
//! coordinates x = i/grid_n. Collision is node-local in reduced form
//! (project onto conserved moments, map back through the equilibrium
//! matrix); streaming is a periodic shift of each velocity slice.
//!
//! Storage is structure-of-arrays: one contiguous 3D slab per velocity,
//! x fastest. Streaming never copies the field: each slice carries an
//! accumulated logical shift, and readers resolve indices modulo the grid.
//! This keeps memory at one field buffer, which is what makes the largest
//! reference grids fit in RAM.
//!
//! Concurrency contract: collision is node-local and streaming writes
//! disjoint targets, so a step is data-parallel over nodes; this
//! implementation is sequential (deterministic, and the hot loops are
//! memory-bound on one core). Monitors are only computed between steps.

use crate::equilibrium::{macro_fields, momentum_from_velocity, BackgroundState};
use crate::error::{Error, Result};
use crate::lattice::VelocitySet;
use crate::stability::CollisionOperator;
use crate::tolerances;

/// Run parameters for the periodic cubic lattice.
///
/// `tau` is stored both here and inside the operator; `validate` enforces
/// that they agree so a config cannot silently run a different relaxation
/// time than the one certified.
pub struct SimConfig<'a> {
    /// Nodes per dimension; ≥ 5 so the speed-2 shifts cannot wrap onto
    /// themselves ambiguously.
    pub grid_n: usize,
    pub tau: f64,
    pub background: BackgroundState,
    pub steps: usize,
    pub operator: &'a CollisionOperator,
    pub velocities: &'a VelocitySet,
}

impl SimConfig<'_> {
    pub fn validate(&self) -> Result<()> {
        if self.grid_n < 5 {
            return Err(Error::Config(format!(
                "grid_n = {} is below the minimum of 5",
                self.grid_n
            )));
        }
        if self.velocities.n() != self.operator.n() {
            return Err(Error::Config(format!(
                "velocity set has {} entries but the operator acts on {}",
                self.velocities.n(),
                self.operator.n()
            )));
        }
        let tau_ref = self.operator.tau;
        if (self.tau - tau_ref).abs() > tolerances::TAU_MATCH_REL * tau_ref.abs() {
            return Err(Error::Config(format!(
                "config tau = {} does not match operator tau = {}",
                self.tau, tau_ref
            )));
        }
        Ok(())
    }

    fn dims(&self) -> [usize; 3] {
        [self.grid_n; 3]
    }
}

/// Particle densities on a periodic lattice, one slab per velocity.
///
/// The slab for velocity `i` stores values in `[z][y][x]` order with x
/// fastest. `offsets[i]` is the accumulated streaming shift of that slab:
/// the density at logical node `(x,y,z)` lives at physical index
/// `wrap(x − offset_x), …`. Fresh fields have zero offsets.
#[derive(Clone, Debug)]
pub struct LatticeField {
    dims: [usize; 3],
    slabs: Vec<Vec<f64>>,
    offsets: Vec<[i64; 3]>,
}

fn wrap(i: i64, n: usize) -> usize {
    (i.rem_euclid(n as i64)) as usize
}

impl LatticeField {
    /// An all-zero field. `dims` are (nx, ny, nz); each must be ≥ 5 or
    /// exactly 1 (a trivial axis, used by the pseudo-1D reduction where the
    /// field is constant along that axis and every shift acts as the
    /// identity — exactly the quotient dynamics of the constant field).
    pub fn zeros(dims: [usize; 3], n_velocities: usize) -> Result<Self> {
        for &d in &dims {
            if d != 1 && d < 5 {
                return Err(Error::Config(format!(
                    "lattice extent {d} is invalid: must be 1 or at least 5"
                )));
            }
        }
        let nodes = dims[0] * dims[1] * dims[2];
        Ok(Self {
            dims,
            slabs: vec![vec![0.0; nodes]; n_velocities],
            offsets: vec![[0; 3]; n_velocities],
        })
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn n_velocities(&self) -> usize {
        self.slabs.len()
    }

    pub fn nodes(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    /// Density of velocity `i` at logical node (x, y, z).
    pub fn get(&self, i: usize, x: usize, y: usize, z: usize) -> f64 {
        let [nx, ny, nz] = self.dims;
        let o = self.offsets[i];
        let px = wrap(x as i64 - o[0], nx);
        let py = wrap(y as i64 - o[1], ny);
        let pz = wrap(z as i64 - o[2], nz);
        self.slabs[i][(pz * ny + py) * nx + px]
    }

    /// All densities at logical node (x, y, z), in velocity order.
    pub fn node(&self, x: usize, y: usize, z: usize) -> Vec<f64> {
        (0..self.n_velocities())
            .map(|i| self.get(i, x, y, z))
            .collect()
    }

    /// Overwrite the density of velocity `i` at logical node (x, y, z).
    pub fn set(&mut self, i: usize, x: usize, y: usize, z: usize, value: f64) {
        let [nx, ny, nz] = self.dims;
        let o = self.offsets[i];
        let px = wrap(x as i64 - o[0], nx);
        let py = wrap(y as i64 - o[1], ny);
        let pz = wrap(z as i64 - o[2], nz);
        self.slabs[i][(pz * ny + py) * nx + px] = value;
    }

    /// Sum of one velocity slab (offset-independent), Kahan-compensated.
    fn slab_sum(&self, i: usize) -> f64 {
        kahan_sum(self.slabs[i].iter().copied())
    }

    /// Sum of squares of one velocity slab, Kahan-compensated.
    fn slab_sum_sq(&self, i: usize) -> f64 {
        kahan_sum(self.slabs[i].iter().map(|&v| v * v))
    }

    /// True when every stored value is finite.
    pub fn all_finite(&self) -> bool {
        self.slabs
            .iter()
            .all(|s| s.iter().all(|v| v.is_finite()))
    }
}

fn kahan_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let y = v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Time series recorded by [`run`]: index 0 is the initial state, so each
/// series has `steps + 1` entries.
#[derive(Clone, Debug, Default)]
pub struct Monitors {
    /// Weighted energy Σ_x Σ_i f_i(x)²/λ_i.
    pub energy: Vec<f64>,
    /// Global Σ_x ρ'(x).
    pub rho_sum: Vec<f64>,
    /// Global Σ_x j(x).
    pub j_sum: Vec<[f64; 3]>,
}

/// Samples macroscopic fields at node centers and builds the equilibrium
/// field f = R·(ρ', j) with j = ρ₀u' + u₀ρ'.
pub fn init_equilibrium_field(
    cfg: &SimConfig,
    rho_prime: impl Fn([f64; 3]) -> f64,
    u_prime: impl Fn([f64; 3]) -> [f64; 3],
) -> Result<LatticeField> {
    cfg.validate()?;
    init_equilibrium_dims(
        cfg.dims(),
        cfg.operator,
        &cfg.background,
        rho_prime,
        u_prime,
    )
}

/// Equilibrium initialization on explicit (possibly non-cubic) dims; the
/// cubic public path is [`init_equilibrium_field`]. Node coordinates along
/// a trivial axis (extent 1) are 0.
pub fn init_equilibrium_dims(
    dims: [usize; 3],
    operator: &CollisionOperator,
    background: &BackgroundState,
    rho_prime: impl Fn([f64; 3]) -> f64,
    u_prime: impl Fn([f64; 3]) -> [f64; 3],
) -> Result<LatticeField> {
    let n = operator.n();
    let mut field = LatticeField::zeros(dims, n)?;
    let [nx, ny, nz] = dims;
    let r = &operator.reduced_equilibrium;
    let gamma = operator.gamma();
    for z in 0..nz {
        for y in 0..ny {
            for x in 0..nx {
                let pos = [
                    x as f64 / nx as f64,
                    y as f64 / ny as f64,
                    z as f64 / nz as f64,
                ];
                let rp = rho_prime(pos);
                let up = u_prime(pos);
                let j = momentum_from_velocity(rp, up, background);
                let m = [rp, j[0], j[1], j[2]];
                let idx = (z * ny + y) * nx + x;
                for i in 0..n {
                    let mut v = 0.0;
                    for c in 0..gamma {
                        v += r[(i, c)] * m[c];
                    }
                    field.slabs[i][idx] = v;
                }
            }
        }
    }
    Ok(field)
}

/// One collide-then-stream step on explicit dims. This is the workhorse
/// behind [`step`]; it exists separately so the pseudo-1D reduction can
/// drive non-cubic fields.
pub fn step_field(
    field: &mut LatticeField,
    operator: &CollisionOperator,
    velocities: &VelocitySet,
) -> Result<()> {
    let n = operator.n();
    if field.n_velocities() != n || velocities.n() != n {
        return Err(Error::Input(
            "field, operator, and velocity set disagree on the velocity count".into(),
        ));
    }
    let [nx, ny, nz] = field.dims;
    let gamma = operator.gamma();
    let omega = operator.omega();
    // Flat copies of the conserved rows C (γ×n) and equilibrium map R (n×γ)
    // for tight inner loops.
    let cons = operator.conserved_rows();
    let r = &operator.reduced_equilibrium;
    let mut c_flat = vec![0.0f64; gamma * n];
    let mut r_flat = vec![0.0f64; n * gamma];
    for c in 0..gamma {
        for i in 0..n {
            c_flat[c * n + i] = cons[(c, i)];
            r_flat[i * gamma + c] = r[(i, c)];
        }
    }

    // Scratch: gathered densities (n × nx), conserved moments (γ × nx).
    let mut gathered = vec![0.0f64; n * nx];
    let mut moments = vec![0.0f64; gamma * nx];

    for z in 0..nz {
        for y in 0..ny {
            // Gather the logical row (·, y, z) of every slab.
            for i in 0..n {
                let o = field.offsets[i];
                let pz = wrap(z as i64 - o[2], nz);
                let py = wrap(y as i64 - o[1], ny);
                let base = (pz * ny + py) * nx;
                let split = wrap(0i64 - o[0], nx);
                let row = &field.slabs[i][base..base + nx];
                let g = &mut gathered[i * nx..(i + 1) * nx];
                g[..nx - split].copy_from_slice(&row[split..]);
                g[nx - split..].copy_from_slice(&row[..split]);
            }
            // Conserved moments m = C·f, vectorized over x.
            moments.fill(0.0);
            for c in 0..gamma {
                let m_row = &mut moments[c * nx..(c + 1) * nx];
                for i in 0..n {
                    let coef = c_flat[c * n + i];
                    if coef == 0.0 {
                        continue;
                    }
                    let g = &gathered[i * nx..(i + 1) * nx];
                    for x in 0..nx {
                        m_row[x] += coef * g[x];
                    }
                }
            }
            // Relax toward equilibrium: f ← (1−ω)f + ω·R·m.
            for i in 0..n {
                let g = &mut gathered[i * nx..(i + 1) * nx];
                let rrow = &r_flat[i * gamma..(i + 1) * gamma];
                for (x, gx) in g.iter_mut().enumerate() {
                    let mut eq = 0.0;
                    for c in 0..gamma {
                        eq += rrow[c] * moments[c * nx + x];
                    }
                    *gx = (1.0 - omega) * *gx + omega * eq;
                }
            }
            // Scatter back to the same logical row.
            for i in 0..n {
                let o = field.offsets[i];
                let pz = wrap(z as i64 - o[2], nz);
                let py = wrap(y as i64 - o[1], ny);
                let base = (pz * ny + py) * nx;
                let split = wrap(0i64 - o[0], nx);
                let row = &mut field.slabs[i][base..base + nx];
                let g = &gathered[i * nx..(i + 1) * nx];
                row[split..].copy_from_slice(&g[..nx - split]);
                row[..split].copy_from_slice(&g[nx - split..]);
            }
        }
    }

    // Streaming: advance each slab's logical shift by its velocity. No data
    // moves; readers resolve the offset.
    stream(field, velocities);
    Ok(())
}

/// Advance the streaming shift of every slab by its velocity: the pure
/// transport f_i(t+Δt, x + c_i) = f_i(t, x) with periodic wrap. Exposed
/// separately so transport can be tested as a permutation, independent of
/// collision.
pub fn stream(field: &mut LatticeField, velocities: &VelocitySet) {
    for (i, c) in velocities.velocities().iter().enumerate() {
        let o = &mut field.offsets[i];
        o[0] += c[0] as i64;
        o[1] += c[1] as i64;
        o[2] += c[2] as i64;
    }
}

/// One collide-then-stream step under a validated config.
pub fn step(cfg: &SimConfig, mut field: LatticeField) -> Result<LatticeField> {
    cfg.validate()?;
    if field.dims != cfg.dims() {
        return Err(Error::Input(format!(
            "field dims {:?} do not match config grid {:?}",
            field.dims,
            cfg.dims()
        )));
    }
    step_field(&mut field, cfg.operator, cfg.velocities)?;
    Ok(field)
}

/// Weighted energy Σ_x Σ_i f_i(x)²/λ_i — the discrete ‖·‖²_P norm whose
/// non-increase certifies stability. Offsets cancel because the sum runs
/// over every stored value.
pub fn weighted_energy(field: &LatticeField, lambda: &[f64]) -> Result<f64> {
    if lambda.len() != field.n_velocities() {
        return Err(Error::Input(format!(
            "{} weights for {} velocities",
            lambda.len(),
            field.n_velocities()
        )));
    }
    if let Some((i, &l)) = lambda.iter().enumerate().find(|&(_, &l)| l <= 0.0) {
        return Err(Error::Input(format!("weight λ[{i}] = {l} is not positive")));
    }
    let per_slab: Vec<f64> = (0..field.n_velocities())
        .map(|i| field.slab_sum_sq(i) / lambda[i])
        .collect();
    Ok(kahan_sum(per_slab.into_iter()))
}

/// Global conserved sums (Σρ', Σj) computed from slab totals: the moment
/// rows are constants per velocity, so the node sum factorizes.
pub fn conserved_sums(field: &LatticeField, operator: &CollisionOperator) -> (f64, [f64; 3]) {
    let cons = operator.conserved_rows();
    let totals: Vec<f64> = (0..field.n_velocities())
        .map(|i| field.slab_sum(i))
        .collect();
    let mut out = [0.0f64; 4];
    for (c, slot) in out.iter_mut().enumerate() {
        *slot = kahan_sum(
            totals
                .iter()
                .enumerate()
                .map(|(i, &t)| cons[(c, i)] * t),
        );
    }
    (out[0], [out[1], out[2], out[3]])
}

/// Evolve `cfg.steps` steps, recording monitors before the first step and
/// after every step (`steps + 1` entries per series). A non-finite value
/// aborts with a diagnostic naming the step.
pub fn run(
    cfg: &SimConfig,
    field: LatticeField,
    lambda: &[f64],
) -> Result<(LatticeField, Monitors)> {
    cfg.validate()?;
    run_field(field, cfg.operator, cfg.velocities, cfg.steps, lambda)
}

/// [`run`] on explicit dims; the workhorse behind the cubic public path.
pub fn run_field(
    mut field: LatticeField,
    operator: &CollisionOperator,
    velocities: &VelocitySet,
    steps: usize,
    lambda: &[f64],
) -> Result<(LatticeField, Monitors)> {
    let mut monitors = Monitors::default();
    let record = |field: &LatticeField, monitors: &mut Monitors| -> Result<()> {
        let e = weighted_energy(field, lambda)?;
        let (rho, j) = conserved_sums(field, operator);
        monitors.energy.push(e);
        monitors.rho_sum.push(rho);
        monitors.j_sum.push(j);
        Ok(())
    };
    record(&field, &mut monitors)?;
    for s in 0..steps {
        step_field(&mut field, operator, velocities)?;
        record(&field, &mut monitors)?;
        let e = *monitors.energy.last().unwrap();
        if !e.is_finite() {
            return Err(Error::Aborted(format!(
                "non-finite energy after step {} of {steps}",
                s + 1
            )));
        }
    }
    Ok((field, monitors))
}

/// Macroscopic fields (ρ', u') at every node, x fastest: the view exported
/// to snapshots and consumed by error norms.
pub fn macroscopic_fields(
    field: &LatticeField,
    operator: &CollisionOperator,
    background: &BackgroundState,
) -> (Vec<f64>, Vec<[f64; 3]>) {
    let [nx, ny, nz] = field.dims;
    let cons = operator.conserved_rows();
    let n = field.n_velocities();
    let mut rho = Vec::with_capacity(field.nodes());
    let mut u = Vec::with_capacity(field.nodes());
    let mut node = vec![0.0f64; n];
    for z in 0..nz {
        for y in 0..ny {
            for x in 0..nx {
                for (i, slot) in node.iter_mut().enumerate() {
                    *slot = field.get(i, x, y, z);
                }
                let mut m = [0.0f64; 4];
                for (c, slot) in m.iter_mut().enumerate() {
                    *slot = (0..n).map(|i| cons[(c, i)] * node[i]).sum();
                }
                let (rp, up) = macro_fields(m[0], [m[1], m[2], m[3]], background);
                rho.push(rp);
                u.push(up);
            }
        }
    }
    (rho, u)
}

/// Reference implementations used as oracles in tests: a dense-matrix
/// collision (apply I + τ⁻¹(E−I) per node through the stored full matrix)
/// followed by an explicit gather-based periodic permutation. Slow and
/// allocation-heavy by design — it shares no code path with [`step_field`].
pub mod reference {
    use super::*;

    /// Densities in `[node][velocity]` layout, node index (z·ny + y)·nx + x.
    pub fn to_dense(field: &LatticeField) -> Vec<Vec<f64>> {
        let [nx, ny, nz] = field.dims();
        let mut out = Vec::with_capacity(field.nodes());
        for z in 0..nz {
            for y in 0..ny {
                for x in 0..nx {
                    out.push(field.node(x, y, z));
                }
            }
        }
        out
    }

    /// One collide-then-stream step on the dense layout.
    pub fn step_dense(
        dense: &[Vec<f64>],
        dims: [usize; 3],
        operator: &CollisionOperator,
        velocities: &VelocitySet,
    ) -> Result<Vec<Vec<f64>>> {
        let [nx, ny, nz] = dims;
        let n = operator.n();
        // Collide via the dense generator.
        let mut collided = Vec::with_capacity(dense.len());
        for node in dense {
            collided.push(operator.apply_dense(node)?);
        }
        // Stream: the value leaving node p with velocity c arrives at p + c.
        let mut out = vec![vec![0.0f64; n]; dense.len()];
        for z in 0..nz {
            for y in 0..ny {
                for x in 0..nx {
                    let src = (z * ny + y) * nx + x;
                    for (i, c) in velocities.velocities().iter().enumerate() {
                        let tx = wrap(x as i64 + c[0] as i64, nx);
                        let ty = wrap(y as i64 + c[1] as i64, ny);
                        let tz = wrap(z as i64 + c[2] as i64, nz);
                        let dst = (tz * ny + ty) * nx + tx;
                        out[dst][i] = collided[src][i];
                    }
                }
            }
        }
        Ok(out)
    }
}
