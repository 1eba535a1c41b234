//! Reference solutions, error norms, convergence studies, and the
//! stability-domain scanner.
//!
//! The pseudo-1D oracle is spectral and closed-form: initial data made of
//! finitely many Fourier modes in x evolves mode-by-mode under the
//! linearized Euler flux. In conserved variables q = (ρ', j) the x-flux
//! Jacobian has eigenstructure
//!
//! * acoustic pair (1, u₀ₓ ± c_s, u₀y, u₀z) with speeds u₀ₓ ± c_s,
//! * two advected shear modes (0, 0, 1, 0), (0, 0, 0, 1) with speed u₀ₓ,
//!
//! so each mode k is decomposed into four characteristic amplitudes,
//! phase-shifted by e^(−2πik·speed·t), and recombined. No time stepping,
//! no matrix exponentials — the oracle shares nothing with the simulator.
//!
//! Convergence studies exploit an exact symmetry for the pseudo-1D cases:
//! fields constant in y and z evolve bitwise-identically on the cubic grid
//! and on the (N,1,1) quotient (verified in the simulator tests), so the
//! studies run the quotient and compare x-profiles.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::equilibrium::BackgroundState;
use crate::error::{Error, Result};
use crate::lattice::{build_m1, build_velocity_set, VelocitySet};
use crate::simulator::{init_equilibrium_dims, macroscopic_fields, run_field, LatticeField};
use crate::stability::{background_feasible, certify_operator, CollisionOperator};

/// A real trigonometric polynomial Σ_k ĉ_k e^(2πikx) on [0,1), stored by
/// wavenumber. Real inputs keep the coefficients Hermitian (ĉ_{−k} = ĉ_k*),
/// which `eval` relies on.
#[derive(Clone, Debug, Default)]
pub struct TrigPoly {
    coeffs: BTreeMap<i32, Complex64>,
}

impl TrigPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(value: f64) -> Self {
        let mut p = Self::default();
        if value != 0.0 {
            p.coeffs.insert(0, Complex64::new(value, 0.0));
        }
        p
    }

    /// amplitude·cos(2πkx) = (a/2)e^(2πikx) + (a/2)e^(−2πikx).
    pub fn cosine(k: i32, amplitude: f64) -> Self {
        let mut p = Self::default();
        let half = Complex64::new(amplitude / 2.0, 0.0);
        *p.coeffs.entry(k).or_insert(Complex64::ZERO) += half;
        *p.coeffs.entry(-k).or_insert(Complex64::ZERO) += half;
        p
    }

    /// amplitude·sin(2πkx) = (−ia/2)e^(2πikx) + (ia/2)e^(−2πikx).
    pub fn sine(k: i32, amplitude: f64) -> Self {
        let mut p = Self::default();
        *p.coeffs.entry(k).or_insert(Complex64::ZERO) += Complex64::new(0.0, -amplitude / 2.0);
        *p.coeffs.entry(-k).or_insert(Complex64::ZERO) += Complex64::new(0.0, amplitude / 2.0);
        p
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&k, &c) in &other.coeffs {
            *out.coeffs.entry(k).or_insert(Complex64::ZERO) += c;
        }
        out
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c *= s;
        }
        out
    }

    /// Pointwise product — a convolution of coefficients.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::default();
        for (&ka, &ca) in &self.coeffs {
            for (&kb, &cb) in &other.coeffs {
                *out.coeffs.entry(ka + kb).or_insert(Complex64::ZERO) += ca * cb;
            }
        }
        out
    }

    pub fn coefficient(&self, k: i32) -> Complex64 {
        self.coeffs.get(&k).copied().unwrap_or(Complex64::ZERO)
    }

    pub fn max_wavenumber(&self) -> i32 {
        self.coeffs
            .keys()
            .map(|k| k.abs())
            .max()
            .unwrap_or(0)
    }

    /// Value at x. The imaginary parts cancel for Hermitian coefficients;
    /// only the real part is returned.
    pub fn eval(&self, x: f64) -> f64 {
        let mut sum = Complex64::ZERO;
        for (&k, &c) in &self.coeffs {
            let phase = 2.0 * std::f64::consts::PI * k as f64 * x;
            sum += c * Complex64::from_polar(1.0, phase);
        }
        sum.re
    }

    /// Advection by `speed` for time `t`: ĉ_k ← ĉ_k·e^(−2πik·speed·t).
    pub fn phase_shifted(&self, speed: f64, t: f64) -> Self {
        let mut out = self.clone();
        for (&k, c) in out.coeffs.iter_mut() {
            let theta = -2.0 * std::f64::consts::PI * k as f64 * speed * t;
            *c *= Complex64::from_polar(1.0, theta);
        }
        out
    }
}

/// One of the three benchmark initial-condition sets. Cases 1 and 2 depend
/// on the first coordinate only and carry closed-form Fourier profiles;
/// case 3 is fully 3D (nine Gaussian pulses) and is measured against a
/// high-resolution run instead.
#[derive(Clone, Debug)]
pub struct TestCase {
    pub id: u8,
    /// Background density ρ₀ the case is defined with.
    pub rho0: f64,
}

/// The nine Gaussian pulse centers of test case 3: the domain center plus
/// the eight points with coordinates 7/20 or 13/20.
fn gauss_centers() -> Vec<[f64; 3]> {
    let mut centers = vec![[0.5, 0.5, 0.5]];
    for &cx in &[0.35, 0.65] {
        for &cy in &[0.35, 0.65] {
            for &cz in &[0.35, 0.65] {
                centers.push([cx, cy, cz]);
            }
        }
    }
    centers
}

pub fn test_case(id: u8) -> Result<TestCase> {
    match id {
        1 => Ok(TestCase { id, rho0: 0.4 }),
        2 => Ok(TestCase { id, rho0: 0.2 }),
        3 => Ok(TestCase { id, rho0: 0.2 }),
        _ => Err(Error::Config(format!("unknown test case {id}"))),
    }
}

impl TestCase {
    pub fn is_pseudo1d(&self) -> bool {
        self.id != 3
    }

    /// Initial density perturbation at a point.
    pub fn rho_prime(&self, p: [f64; 3]) -> f64 {
        use std::f64::consts::PI;
        let x = p[0];
        match self.id {
            1 => (4.0 * PI * x).cos(),
            2 => {
                0.7 * (2.0 * PI * x).sin()
                    * (4.0 * PI * x).sin()
                    * (4.0 * PI * x).cos()
                    * (8.0 * PI * x).cos()
            }
            _ => gauss_centers()
                .iter()
                .map(|c| {
                    let d2 = (p[0] - c[0]).powi(2)
                        + (p[1] - c[1]).powi(2)
                        + (p[2] - c[2]).powi(2);
                    (-100.0 * d2).exp()
                })
                .sum(),
        }
    }

    /// Initial velocity perturbation at a point. The scalar profile of the
    /// pseudo-1D cases is assigned to the first component (u'₂ = u'₃ = 0).
    pub fn u_prime(&self, p: [f64; 3]) -> [f64; 3] {
        use std::f64::consts::PI;
        let x = p[0];
        match self.id {
            1 => [5.0 / 3f64.sqrt() * (2.0 * PI * x).cos(), 0.0, 0.0],
            2 => [
                5.0 / (2.0 * 3f64.sqrt()) * (8.0 * PI * x).sin() * (2.0 * PI * x).cos(),
                0.0,
                0.0,
            ],
            _ => [0.0; 3],
        }
    }

    /// Closed-form Fourier profiles (ρ', u'₁) for the pseudo-1D cases;
    /// case 3 is not band-limited and is rejected.
    pub fn fourier_profiles(&self) -> Result<(TrigPoly, TrigPoly)> {
        match self.id {
            1 => Ok((
                TrigPoly::cosine(2, 1.0),
                TrigPoly::cosine(1, 5.0 / 3f64.sqrt()),
            )),
            2 => {
                let rho = TrigPoly::sine(1, 1.0)
                    .mul(&TrigPoly::sine(2, 1.0))
                    .mul(&TrigPoly::cosine(2, 1.0))
                    .mul(&TrigPoly::cosine(4, 1.0))
                    .scaled(0.7);
                let u = TrigPoly::sine(4, 1.0)
                    .mul(&TrigPoly::cosine(1, 1.0))
                    .scaled(5.0 / (2.0 * 3f64.sqrt()));
                Ok((rho, u))
            }
            _ => Err(Error::Config(
                "test case 3 is not band-limited; no spectral reference exists".into(),
            )),
        }
    }

    /// Final-time convention for convergence studies. One domain period for
    /// the pseudo-1D cases; a quarter period for case 3 so that step counts
    /// t·N stay integral on power-of-two grids.
    pub fn default_final_time(&self) -> f64 {
        if self.id == 3 {
            0.25
        } else {
            1.0
        }
    }
}

/// Evolve conserved-variable Fourier profiles (ρ̂, ĵ₁, ĵ₂, ĵ₃) by time t
/// under the x-directional linearized Euler dynamics.
pub fn evolve_conserved(q: &[TrigPoly; 4], bg: &BackgroundState, t: f64) -> [TrigPoly; 4] {
    let cs = bg.cs2.sqrt();
    let [u1, u2, u3] = bg.u0;
    let mut keys: Vec<i32> = Vec::new();
    for poly in q {
        for &k in poly.coeffs.keys() {
            if !keys.contains(&k) {
                keys.push(k);
            }
        }
    }
    keys.sort_unstable();
    let mut out = [
        TrigPoly::zero(),
        TrigPoly::zero(),
        TrigPoly::zero(),
        TrigPoly::zero(),
    ];
    for &k in &keys {
        let rho = q[0].coefficient(k);
        let j1 = q[1].coefficient(k);
        let j2 = q[2].coefficient(k);
        let j3 = q[3].coefficient(k);
        // Characteristic amplitudes.
        let half = Complex64::new(0.5, 0.0);
        let slope = (j1 - u1 * rho) / cs;
        let a = (rho + slope) * half; // speed u₁ + c_s
        let b = (rho - slope) * half; // speed u₁ − c_s
        let c = j2 - u2 * rho; // speed u₁
        let d = j3 - u3 * rho; // speed u₁
        let theta = -2.0 * std::f64::consts::PI * k as f64 * t;
        let pa = a * Complex64::from_polar(1.0, theta * (u1 + cs));
        let pb = b * Complex64::from_polar(1.0, theta * (u1 - cs));
        let pc = c * Complex64::from_polar(1.0, theta * u1);
        let pd = d * Complex64::from_polar(1.0, theta * u1);
        // Recombine.
        let rho_t = pa + pb;
        let j1_t = u1 * rho_t + cs * (pa - pb);
        let j2_t = u2 * rho_t + pc;
        let j3_t = u3 * rho_t + pd;
        for (poly, value) in out.iter_mut().zip([rho_t, j1_t, j2_t, j3_t]) {
            if value != Complex64::ZERO {
                poly.coeffs.insert(k, value);
            }
        }
    }
    out
}

/// Conserved-variable profiles of a test case's initial data.
pub fn initial_conserved(tc: &TestCase, bg: &BackgroundState) -> Result<[TrigPoly; 4]> {
    if (bg.rho0 - tc.rho0).abs() > 1e-12 {
        return Err(Error::Config(format!(
            "background rho0 = {} does not match the test case's rho0 = {}",
            bg.rho0, tc.rho0
        )));
    }
    let (rho, u) = tc.fourier_profiles()?;
    let [u1, u2, u3] = bg.u0;
    // j = ρ₀u' + u₀ρ'; the scalar profile is the first velocity component.
    let j1 = u.scaled(bg.rho0).add(&rho.scaled(u1));
    let j2 = rho.scaled(u2);
    let j3 = rho.scaled(u3);
    Ok([rho, j1, j2, j3])
}

/// Spectral reference for the pseudo-1D cases: macroscopic x-profiles
/// (ρ', u') of length `grid_n`, sampled at nodes x = i/grid_n after exact
/// evolution to time `t`.
pub fn exact_pseudo1d(
    tc: &TestCase,
    bg: &BackgroundState,
    t: f64,
    grid_n: usize,
) -> Result<(Vec<f64>, Vec<[f64; 3]>)> {
    let q0 = initial_conserved(tc, bg)?;
    let qt = evolve_conserved(&q0, bg, t);
    let [u1, u2, u3] = bg.u0;
    let mut rho = Vec::with_capacity(grid_n);
    let mut u = Vec::with_capacity(grid_n);
    for i in 0..grid_n {
        let x = i as f64 / grid_n as f64;
        let r = qt[0].eval(x);
        let j = [qt[1].eval(x), qt[2].eval(x), qt[3].eval(x)];
        rho.push(r);
        u.push([
            (j[0] - u1 * r) / bg.rho0,
            (j[1] - u2 * r) / bg.rho0,
            (j[2] - u3 * r) / bg.rho0,
        ]);
    }
    Ok((rho, u))
}

/// Discrete L∞ distance between two macroscopic fields: the maximum over
/// nodes and over the four components (ρ', u'₁, u'₂, u'₃).
pub fn linf_error(
    rho_a: &[f64],
    u_a: &[[f64; 3]],
    rho_b: &[f64],
    u_b: &[[f64; 3]],
) -> Result<f64> {
    if rho_a.len() != rho_b.len() || u_a.len() != u_b.len() || rho_a.len() != u_a.len() {
        return Err(Error::Input(format!(
            "field size mismatch: {} vs {} nodes",
            rho_a.len(),
            rho_b.len()
        )));
    }
    let mut worst = 0.0f64;
    for i in 0..rho_a.len() {
        worst = worst.max((rho_a[i] - rho_b[i]).abs());
        for c in 0..3 {
            worst = worst.max((u_a[i][c] - u_b[i][c]).abs());
        }
    }
    Ok(worst)
}

/// Observed convergence order between grid-doubled errors.
pub fn observed_order(error_coarse: f64, error_fine: f64) -> f64 {
    (error_coarse / error_fine).log2()
}

/// One grid level of a convergence study.
#[derive(Clone, Debug)]
pub struct ConvergenceRow {
    pub grid_n: usize,
    pub error: f64,
    /// Order w.r.t. the previous (coarser) row; none for the first row.
    pub order: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    pub background: BackgroundState,
    pub final_time: f64,
}

fn build_operator(
    bg: &BackgroundState,
    tau: f64,
) -> Result<(CollisionOperator, Vec<f64>, VelocitySet)> {
    let vs = build_velocity_set("D3Q33")?;
    let m1 = build_m1(&vs)?;
    let (op, cert) = certify_operator(&m1, bg, tau)?;
    Ok((op, cert.lambda, vs))
}

fn integral_steps(t_final: f64, grid_n: usize) -> Result<usize> {
    let steps_f = t_final * grid_n as f64;
    let steps = steps_f.round();
    if (steps_f - steps).abs() > 1e-9 * (grid_n as f64).max(1.0) || steps < 0.0 {
        return Err(Error::Config(format!(
            "final time {t_final} on grid {grid_n} needs {steps_f} steps; \
             the step count must be an integer"
        )));
    }
    Ok(steps as usize)
}

/// Simulate a test case on the cubic grid and return macroscopic fields.
pub fn simulate_macros(
    tc: &TestCase,
    bg: &BackgroundState,
    grid_n: usize,
    t_final: f64,
    tau: f64,
) -> Result<(Vec<f64>, Vec<[f64; 3]>)> {
    let steps = integral_steps(t_final, grid_n)?;
    let (op, lambda, vs) = build_operator(bg, tau)?;
    let field = init_equilibrium_dims(
        [grid_n; 3],
        &op,
        bg,
        |p| tc.rho_prime(p),
        |p| tc.u_prime(p),
    )?;
    let (field, _) = run_field(field, &op, &vs, steps, &lambda)?;
    Ok(macroscopic_fields(&field, &op, bg))
}

/// Simulate a pseudo-1D case on the (N,1,1) quotient and return x-profiles.
fn simulate_profile(
    tc: &TestCase,
    bg: &BackgroundState,
    op: &CollisionOperator,
    lambda: &[f64],
    vs: &VelocitySet,
    grid_n: usize,
    steps: usize,
) -> Result<(Vec<f64>, Vec<[f64; 3]>)> {
    let field = init_equilibrium_dims(
        [grid_n, 1, 1],
        op,
        bg,
        |p| tc.rho_prime(p),
        |p| tc.u_prime(p),
    )?;
    let (field, _) = run_field(field, op, vs, steps, lambda)?;
    Ok(macroscopic_fields(&field, op, bg))
}

/// Convergence study for the pseudo-1D cases against the spectral
/// reference. Each grid runs with Δt = 1/grid_n for `t_final·grid_n` steps
/// at τ = 1/2. Errors are discrete L∞ over nodes and components; orders
/// are log₂ ratios between successive (doubling) grids.
pub fn convergence_study(
    tc: &TestCase,
    bg: &BackgroundState,
    grids: &[usize],
    t_final: f64,
) -> Result<ConvergenceReport> {
    if !tc.is_pseudo1d() {
        return Err(Error::Config(
            "this study needs a spectral reference; use self_convergence_study for case 3".into(),
        ));
    }
    if grids.is_empty() {
        return Err(Error::Config("empty grid list".into()));
    }
    let (op, lambda, vs) = build_operator(bg, 0.5)?;
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(grids.len());
    for &n in grids {
        let steps = integral_steps(t_final, n)?;
        let (rho_sim, u_sim) = simulate_profile(tc, bg, &op, &lambda, &vs, n, steps)?;
        let (rho_ref, u_ref) = exact_pseudo1d(tc, bg, t_final, n)?;
        let error = linf_error(&rho_sim, &u_sim, &rho_ref, &u_ref)?;
        let order = rows.last().map(|prev: &ConvergenceRow| {
            observed_order(prev.error, error)
        });
        rows.push(ConvergenceRow {
            grid_n: n,
            error,
            order,
        });
    }
    Ok(ConvergenceReport {
        rows,
        background: *bg,
        final_time: t_final,
    })
}

/// Node-coincident restriction of macroscopic fields from a `from_n` cubic
/// grid to a coarser `to_n` grid (`from_n` divisible by `to_n`).
pub fn downsample_macros(
    rho: &[f64],
    u: &[[f64; 3]],
    from_n: usize,
    to_n: usize,
) -> Result<(Vec<f64>, Vec<[f64; 3]>)> {
    if from_n % to_n != 0 {
        return Err(Error::Input(format!(
            "cannot restrict grid {from_n} to non-divisor {to_n}"
        )));
    }
    if rho.len() != from_n * from_n * from_n || u.len() != rho.len() {
        return Err(Error::Input("field size does not match its grid".into()));
    }
    let stride = from_n / to_n;
    let mut rho_out = Vec::with_capacity(to_n * to_n * to_n);
    let mut u_out = Vec::with_capacity(to_n * to_n * to_n);
    for z in 0..to_n {
        for y in 0..to_n {
            for x in 0..to_n {
                let idx = ((z * stride) * from_n + y * stride) * from_n + x * stride;
                rho_out.push(rho[idx]);
                u_out.push(u[idx]);
            }
        }
    }
    Ok((rho_out, u_out))
}

/// High-resolution cubic reference run for the self-convergence study.
/// `grid_cap` is the memory guard: the largest reference grid the caller
/// is willing to allocate (one field buffer of grid³·33 doubles).
pub fn highres_reference(
    tc: &TestCase,
    bg: &BackgroundState,
    grid_n_ref: usize,
    t_final: f64,
    grid_cap: usize,
) -> Result<(Vec<f64>, Vec<[f64; 3]>)> {
    if grid_n_ref > grid_cap {
        return Err(Error::Config(format!(
            "reference grid {grid_n_ref} exceeds the configured cap {grid_cap}"
        )));
    }
    simulate_macros(tc, bg, grid_n_ref, t_final, 0.5)
}

/// Self-convergence study against a high-resolution reference run,
/// restricted node-coincidently to each study grid. The reference grid
/// must be at least 4× the finest study grid and divisible by every grid.
pub fn self_convergence_study(
    tc: &TestCase,
    bg: &BackgroundState,
    grids: &[usize],
    grid_n_ref: usize,
    t_final: f64,
    grid_cap: usize,
) -> Result<ConvergenceReport> {
    if grids.is_empty() {
        return Err(Error::Config("empty grid list".into()));
    }
    let finest = *grids.iter().max().unwrap();
    if grid_n_ref < 4 * finest {
        return Err(Error::Config(format!(
            "reference grid {grid_n_ref} must be at least 4× the finest study grid {finest}"
        )));
    }
    let (rho_ref, u_ref) = highres_reference(tc, bg, grid_n_ref, t_final, grid_cap)?;
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(grids.len());
    for &n in grids {
        let (rho_sim, u_sim) = simulate_macros(tc, bg, n, t_final, 0.5)?;
        let (rho_r, u_r) = downsample_macros(&rho_ref, &u_ref, grid_n_ref, n)?;
        let error = linf_error(&rho_sim, &u_sim, &rho_r, &u_r)?;
        let order = rows.last().map(|prev: &ConvergenceRow| {
            observed_order(prev.error, error)
        });
        rows.push(ConvergenceRow {
            grid_n: n,
            error,
            order,
        });
    }
    Ok(ConvergenceReport {
        rows,
        background: *bg,
        final_time: t_final,
    })
}

/// Feasibility map over a (u₀₂, u₀₃) grid at fixed u₀₁.
#[derive(Clone, Debug)]
pub struct DomainMap {
    pub u01: f64,
    pub u02: Vec<f64>,
    pub u03: Vec<f64>,
    /// Row-major: `feasible[i2 * u03.len() + i3]`.
    pub feasible: Vec<bool>,
}

impl DomainMap {
    pub fn at(&self, i2: usize, i3: usize) -> bool {
        self.feasible[i2 * self.u03.len() + i3]
    }
}

/// Uniform scan axis with `count` points covering [lo, hi].
pub fn scan_axis(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2, "a scan axis needs at least two points");
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

/// Run the weight linear program at every grid point and record which
/// backgrounds admit positive weights. Cells are independent; they are
/// evaluated in parallel and assembled in deterministic row-major order.
pub fn scan_stability_domain(
    velocities: &VelocitySet,
    u01: f64,
    u02: &[f64],
    u03: &[f64],
) -> Result<DomainMap> {
    if u02.len() < 2 || u03.len() < 2 {
        return Err(Error::Config("scan grid must be at least 2×2".into()));
    }
    let m1 = build_m1(velocities)?;
    let cells: Vec<(usize, usize)> = (0..u02.len())
        .flat_map(|i2| (0..u03.len()).map(move |i3| (i2, i3)))
        .collect();
    let feasible: Vec<bool> = cells
        .par_iter()
        .map(|&(i2, i3)| {
            let bg = BackgroundState::with_standard_cs2(1.0, [u01, u02[i2], u03[i3]])
                .expect("scan backgrounds are valid");
            background_feasible(&m1, &bg).unwrap_or(false)
        })
        .collect();
    Ok(DomainMap {
        u01,
        u02: u02.to_vec(),
        u03: u03.to_vec(),
        feasible,
    })
}

/// Convenience wrapper used by tests and callers that only need a field to
/// inspect: a fresh lattice field initialized with a test case's data.
pub fn init_test_case_field(
    tc: &TestCase,
    bg: &BackgroundState,
    op: &CollisionOperator,
    grid_n: usize,
) -> Result<LatticeField> {
    init_equilibrium_dims([grid_n; 3], op, bg, |p| tc.rho_prime(p), |p| tc.u_prime(p))
}
