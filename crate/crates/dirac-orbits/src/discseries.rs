//! SL(2,ℝ) discrete series: truncated ladder models, the sign-flipped Dirac
//! family on the elliptic cone, and a smeared check of the Rossman formula.
//!
//! Basis of sl(2,ℝ): e₀ = k/√2 (compact), e₁ = p₁/√2, e₂ = p₂/√2 with
//! k = [[0,1],[−1,0]], p₁ = diag(1,−1), p₂ = [[0,1],[1,0]]. The trace form is
//! B = diag(−1,1,1). Covectors are written in the dual basis, so
//! B*(μ,μ) = −μ₀² + μ₁² + μ₂² and the elliptic cone is B* < 0.
//!
//! The model H_N has basis v_0..v_{N−1} with K-weights m_j = −Λ−2j, i.e.
//! R(e₀)v_j = i m_j/√2 · v_j. Operators on H⊗S are assembled at size N and
//! every spectral claim is made on the compression to the first W = N − margin
//! K-types.

use nalgebra::{DMatrix, Matrix2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::chern::LIOUVILLE_C;
use crate::clifford::{build_spin_module, flipped_metric, invariant_dual_form, SpinModule};
use crate::linalg::{c, comm, eigvals, herm_eigen, identity, kron, max_abs, window, CMat, C64, I};
use crate::repbuild::LieAlgebra;
use crate::rootsys::GroupLabel;
use crate::{Error, Result};

pub const DEFAULT_MARGIN: usize = 4;
/// Absolute threshold on |eigenvalue of D²| for kernel detection.
pub const KERNEL_TOL: f64 = 1e-8;
/// Largest tolerated tail mass of the boosted lowest vector outside the window.
pub const TRUNCATION_LIMIT: f64 = 1e-10;
/// Relative |B*(μ,μ)|/|μ|² below which μ is treated as null.
pub const NULL_TOL: f64 = 1e-12;
/// Relative band above NULL_TOL where the cone class is reported as ambiguous.
pub const AMBIGUOUS_BAND: f64 = 1e-8;
pub const MIN_WIDTH: f64 = 0.2;
pub const DEFAULT_CUTOFF: f64 = 4.0;

const B_DIAG: [f64; 3] = [-1.0, 1.0, 1.0];
const SQRT2: f64 = std::f64::consts::SQRT_2;
const PI: f64 = std::f64::consts::PI;

// ---------------------------------------------------------------------------
// the algebra

pub fn sl2r_basis() -> [Matrix2<f64>; 3] {
    let s = 1.0 / SQRT2;
    [
        Matrix2::new(0.0, 1.0, -1.0, 0.0) * s,
        Matrix2::new(1.0, 0.0, 0.0, -1.0) * s,
        Matrix2::new(0.0, 1.0, 1.0, 0.0) * s,
    ]
}

/// Coordinates of X ∈ sl(2,ℝ) in the basis e_a.
pub fn sl2r_coords(x: &Matrix2<f64>) -> [f64; 3] {
    let e = sl2r_basis();
    [0, 1, 2].map(|a| B_DIAG[a] * (x * e[a]).trace())
}

pub fn sl2r_algebra() -> LieAlgebra {
    let e = sl2r_basis();
    let mut structure = vec![0.0; 27];
    for a in 0..3 {
        for b in 0..3 {
            let br = sl2r_coords(&(e[a] * e[b] - e[b] * e[a]));
            for cc in 0..3 {
                // entries are 0 or ±√2; snap the round-off
                let v = br[cc];
                structure[(a * 3 + b) * 3 + cc] = if v.abs() < 1e-14 { 0.0 } else { v.signum() * SQRT2 };
            }
        }
    }
    LieAlgebra {
        label: GroupLabel::Sl2R,
        dim: 3,
        rank: 1,
        structure,
        form: DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&B_DIAG)),
        compact: vec![0],
        noncompact: vec![1, 2],
        cartan: vec![0],
        root_pairs: vec![(1, 2)],
    }
}

/// B*(μ,μ) = −μ₀² + μ₁² + μ₂².
pub fn killing_norm2(mu: &[f64]) -> f64 {
    -mu[0] * mu[0] + mu[1] * mu[1] + mu[2] * mu[2]
}

fn euclid2(mu: &[f64]) -> f64 {
    mu.iter().map(|x| x * x).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConeClass {
    Zero,
    Elliptic,
    Nilpotent,
    Hyperbolic,
    Ambiguous,
}

pub fn classify(mu: &[f64]) -> ConeClass {
    let e = euclid2(mu);
    if e == 0.0 {
        return ConeClass::Zero;
    }
    let q = killing_norm2(mu) / e;
    if q.abs() <= NULL_TOL {
        ConeClass::Nilpotent
    } else if q.abs() <= AMBIGUOUS_BAND {
        ConeClass::Ambiguous
    } else if q < 0.0 {
        ConeClass::Elliptic
    } else {
        ConeClass::Hyperbolic
    }
}

/// Deterministic samples of the elliptic cone: (nappe, radius, boost, angle) with a
/// fifth of the points boosted far toward the null cone.
pub fn elliptic_sample(alg: &LieAlgebra, count: usize, seed: u64) -> Result<Vec<[f64; 3]>> {
    if alg.label != GroupLabel::Sl2R {
        return Err(Error::Domain(format!("elliptic sampler needs sl2R, got {}", alg.label.name())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|k| {
            let r: f64 = rng.random_range(0.1..3.0);
            let b: f64 = if k % 5 == 4 { rng.random_range(3.0..5.0) } else { rng.random_range(0.0..2.0) };
            let phi: f64 = rng.random_range(0.0..2.0 * PI);
            let nappe = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            [nappe * r * b.cosh(), r * b.sinh() * phi.cos(), r * b.sinh() * phi.sin()]
        })
        .collect())
}

/// Killing-null samples r(±1, cos φ, sin φ) with r ∈ [0.5, 8].
pub fn null_sample(count: usize, seed: u64) -> Vec<[f64; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let r: f64 = rng.random_range(0.5..8.0);
            let phi: f64 = rng.random_range(0.0..2.0 * PI);
            let nappe = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            [nappe * r, r * phi.cos(), r * phi.sin()]
        })
        .collect()
}

// ---------------------------------------------------------------------------
// adapted frames

/// Frame f_a = Ad_g e_a with g = exp(b(cos θ p₁ + sin θ p₂)/2), chosen so that
/// f₀ is the future unit vector along μ_*. Then μ = m·f⁰.
#[derive(Clone, Debug, Serialize)]
pub struct AdaptedFrame {
    pub boost: f64,
    pub angle: f64,
    /// f[a] = coordinates of f_a in the basis e.
    pub f: [[f64; 3]; 3],
    pub m: f64,
}

pub fn frame_from(boost: f64, angle: f64) -> [[f64; 3]; 3] {
    let n = Matrix2::new(1.0, 0.0, 0.0, -1.0) * angle.cos() + Matrix2::new(0.0, 1.0, 1.0, 0.0) * angle.sin();
    let (ch, sh) = ((boost / 2.0).cosh(), (boost / 2.0).sinh());
    let g = Matrix2::identity() * ch + n * sh;
    let gi = Matrix2::identity() * ch - n * sh;
    let e = sl2r_basis();
    [0, 1, 2].map(|a| sl2r_coords(&(g * e[a] * gi)))
}

pub fn adapted_frame(mu: &[f64]) -> Result<AdaptedFrame> {
    if classify(mu) != ConeClass::Elliptic {
        return Err(Error::Domain(format!("adapted frame needs an elliptic covector, got {:?}", classify(mu))));
    }
    let r = (-killing_norm2(mu)).sqrt();
    let star = [-mu[0], mu[1], mu[2]];
    let s = star[0].signum();
    let t = star.map(|x| s * x / r);
    let boost = t[0].max(1.0).acosh();
    let angle = (-t[1]).atan2(t[2]);
    let f = frame_from(boost, angle);
    let m = mu[0] * f[0][0] + mu[1] * f[0][1] + mu[2] * f[0][2];
    Ok(AdaptedFrame { boost, angle, f, m })
}

// ---------------------------------------------------------------------------
// the truncated model

#[derive(Clone, Debug)]
pub struct DSModel {
    pub lambda: u32,
    pub n: usize,
    pub margin: usize,
    pub weights: Vec<i64>,
    /// R(e_a) on H_N.
    pub generators: Vec<CMat>,
    /// Weight-raising root vector; kills v₀.
    pub e_plus: CMat,
    pub e_minus: CMat,
    pub algebra: LieAlgebra,
    /// Clifford module on the sign-flipped metric.
    pub flipped: SpinModule,
    /// Clifford module on the invariant (Killing-type) form.
    pub killing: SpinModule,
}

/// Spectral summary of a compressed D².
#[derive(Clone, Debug, Serialize)]
pub struct WindowSpectrum {
    pub min_abs: f64,
    pub max_re: f64,
    pub ker_dim: usize,
    pub window: usize,
    pub window_error: f64,
}

impl DSModel {
    pub fn build(lambda: u32, n: usize) -> Result<Self> {
        if lambda < 2 {
            return Err(Error::Domain(format!("Λ must be ≥ 2, got {lambda}")));
        }
        if n < 8 {
            return Err(Error::Config(format!("truncation N must be ≥ 8, got {n}")));
        }
        let l = lambda as f64;
        let weights: Vec<i64> = (0..n).map(|j| -(lambda as i64) - 2 * j as i64).collect();
        let mut em = CMat::zeros(n, n);
        for j in 0..n - 1 {
            em[(j + 1, j)] = c(2.0 * ((j as f64 + 1.0) * (l + j as f64)).sqrt(), 0.0);
        }
        let ep = -em.transpose();
        let r0 = CMat::from_diagonal(&nalgebra::DVector::from_iterator(n, weights.iter().map(|&m| c(0.0, m as f64 / SQRT2))));
        let r1 = (&ep + &em) * c(1.0 / (2.0 * SQRT2), 0.0);
        let r2 = (&ep - &em) * (c(1.0 / (2.0 * SQRT2), 0.0) / I);
        let algebra = sl2r_algebra();
        let flipped = build_spin_module(&flipped_metric(&algebra), &algebra)?;
        let killing = build_spin_module(&invariant_dual_form(&algebra), &algebra)?;
        Ok(DSModel {
            lambda,
            n,
            margin: DEFAULT_MARGIN,
            weights,
            generators: vec![r0, r1, r2],
            e_plus: ep,
            e_minus: em,
            algebra,
            flipped,
            killing,
        })
    }

    pub fn with_margin(mut self, margin: usize) -> Result<Self> {
        if margin == 0 || margin + 2 > self.n {
            return Err(Error::Truncation(format!("margin {margin} does not fit N = {}", self.n)));
        }
        self.margin = margin;
        Ok(self)
    }

    /// Number of K-types on which claims are made.
    pub fn window(&self) -> usize {
        self.n - self.margin
    }

    pub fn orbit_radius(&self) -> f64 {
        (self.lambda as f64 - 1.0) / SQRT2
    }

    /// −(Λ+ρ̃) as a covector.
    pub fn orbit_point(&self) -> [f64; 3] {
        [-self.orbit_radius(), 0.0, 0.0]
    }

    /// |Λ+ρ̃|² in the flipped metric.
    pub fn lambda_rho_sq(&self) -> f64 {
        self.orbit_radius().powi(2)
    }

    pub fn action(&self, x: &[f64]) -> CMat {
        lin(&self.generators, x, self.n)
    }

    pub fn casimir_scalar(&self) -> f64 {
        let l = self.lambda as f64;
        l * (l - 2.0) / 2.0
    }

    /// Σ B^{ab} R_a R_b.
    pub fn casimir(&self) -> CMat {
        let g = &self.generators;
        -(&g[0] * &g[0]) + &g[1] * &g[1] + &g[2] * &g[2]
    }

    pub fn casimir_residual(&self) -> f64 {
        let w = self.window();
        max_abs(&(window(&self.casimir(), w) - identity(w) * c(self.casimir_scalar(), 0.0)))
    }

    pub fn commutator_residual(&self) -> f64 {
        let w = self.window();
        let mut worst: f64 = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                let f: Vec<f64> = (0..3).map(|cc| self.algebra.f(a, b, cc)).collect();
                let r = comm(&self.generators[a], &self.generators[b]) - self.action(&f);
                worst = worst.max(max_abs(&window(&r, w)));
            }
        }
        worst
    }

    pub fn skew_residual(&self) -> f64 {
        let w = self.window();
        self.generators.iter().map(|g| crate::linalg::skew_residual(&window(g, w))).fold(0.0, f64::max)
    }

    /// ‖E₊ v₀‖: the raising root vector kills the lowest K-type.
    pub fn lowest_annihilation(&self) -> f64 {
        self.e_plus.column(0).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    fn lift(&self, m: &CMat) -> CMat {
        kron(m, &identity(2))
    }

    fn spin(&self, m: &CMat) -> CMat {
        kron(&identity(self.n), m)
    }

    /// Dirac operator in the frame f with the given gammas and 𝔨-coefficient m.
    fn framed(&self, gammas: &[CMat], f: &[[f64; 3]; 3], m: f64, mu_p: [f64; 2]) -> CMat {
        let mut d = CMat::zeros(2 * self.n, 2 * self.n);
        for p in 1..3 {
            d += self.lift(&self.action(&f[p])) * self.spin(&gammas[p]);
        }
        let a0 = self.lift(&self.action(&f[0])) + self.spin(&self.flipped.sigma[0]) - identity(2 * self.n) * (I * m);
        d += a0 * self.spin(&gammas[0]);
        for p in 1..3 {
            if mu_p[p - 1] != 0.0 {
                d -= self.spin(&gammas[p]) * (I * mu_p[p - 1]);
            }
        }
        d
    }

    fn base_frame() -> [[f64; 3]; 3] {
        [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
    }

    /// Flipped Dirac operator with fixed 𝔨: Σ_p R_p⊗γ₀^p + (R₀+σ₀)γ₀⁰ − iγ₀(μ).
    pub fn flipped_dirac(&self, mu: &[f64]) -> CMat {
        self.framed(&self.flipped.gammas, &Self::base_frame(), mu[0], [mu[1], mu[2]])
    }

    /// The same expression with the invariant-form gammas: the cubic Dirac family.
    pub fn killing_dirac(&self, mu: &[f64]) -> CMat {
        self.framed(&self.killing.gammas, &Self::base_frame(), mu[0], [mu[1], mu[2]])
    }

    /// Flipped D₀ with μ entering through the invariant-form gammas, −iγ(μ).
    pub fn nilpotent_dirac(&self, mu: &[f64]) -> CMat {
        self.flipped_dirac(&[0.0; 3]) - self.spin(&self.killing.gamma(mu)) * I
    }

    /// Squared norm of the boosted lowest vector π(g)v₀ outside the window.
    pub fn window_error(&self, boost: f64) -> f64 {
        if boost == 0.0 {
            return 0.0;
        }
        let l = self.lambda as f64;
        let th = (boost / 2.0).tanh();
        let lc = -2.0 * l * (boost / 2.0).cosh().ln();
        let mut s = 0.0;
        // C(Λ+j−1, j) tanh^{2j} cosh^{−2Λ}, summed from j = W until negligible
        let mut j = self.window();
        loop {
            let ln_binom = ln_gamma(l + j as f64) - ln_gamma(j as f64 + 1.0) - ln_gamma(l);
            let term = (ln_binom + 2.0 * j as f64 * th.ln() + lc).exp();
            s += term;
            if term < 1e-30 * s.max(1e-300) || j > self.window() + 100_000 {
                break;
            }
            j += 1;
        }
        s
    }

    /// Flipped Dirac operator at an elliptic μ in the frame adapted to μ.
    pub fn ds_dirac_at(&self, mu: &[f64]) -> Result<DsOperator> {
        let frame = adapted_frame(mu)?;
        let err = self.window_error(frame.boost);
        if err > TRUNCATION_LIMIT {
            return Err(Error::Truncation(format!(
                "boost {:.3} leaves tail mass {err:.2e} outside a window of {} K-types",
                frame.boost,
                self.window()
            )));
        }
        let matrix = self.framed(&self.flipped.gammas, &frame.f, frame.m, [0.0, 0.0]);
        Ok(DsOperator { matrix, frame, window_error: err })
    }

    /// Compression of D² to the window.
    pub fn compressed_square(&self, d: &CMat) -> CMat {
        window(&(d * d), 2 * self.window())
    }

    /// Spectrum of the compressed D² for a skew-adjoint D.
    pub fn window_spectrum(&self, d: &CMat, window_error: f64) -> WindowSpectrum {
        let (ev, _) = herm_eigen(&self.compressed_square(d));
        let min_abs = ev.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
        let ker = ev.iter().filter(|v| v.abs() <= KERNEL_TOL + window_error).count();
        WindowSpectrum {
            min_abs,
            max_re: ev.last().copied().unwrap_or(0.0),
            ker_dim: ker,
            window: self.window(),
            window_error,
        }
    }

    /// Eigenvalues of the compressed D² for a general D.
    pub fn window_eigs(&self, d: &CMat) -> Vec<C64> {
        eigvals(&self.compressed_square(d))
    }

    /// Window spectrum of the adapted flipped operator at elliptic μ.
    pub fn ds_spectrum(&self, mu: &[f64]) -> Result<WindowSpectrum> {
        let op = self.ds_dirac_at(mu)?;
        Ok(self.window_spectrum(&op.matrix, op.window_error))
    }

    /// (τ, eigenvector) pairs of A₀ = R₀ + σ₀ on the window, A₀ = iτ/√2.
    fn k_type_basis(&self) -> (Vec<f64>, CMat) {
        let w2 = 2 * self.window();
        let a0 = self.lift(&self.generators[0]) + self.spin(&self.flipped.sigma[0]);
        let h = window(&a0, w2) * (-I * SQRT2);
        herm_eigen(&h)
    }
}

#[derive(Clone, Debug)]
pub struct DsOperator {
    pub matrix: CMat,
    pub frame: AdaptedFrame,
    pub window_error: f64,
}

fn lin(ms: &[CMat], x: &[f64], n: usize) -> CMat {
    let mut out = CMat::zeros(n, n);
    for (m, &v) in ms.iter().zip(x) {
        if v != 0.0 {
            out += m * c(v, 0.0);
        }
    }
    out
}

fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

// ---------------------------------------------------------------------------
// closed-form spectra

/// K-types of H⊗S: τ = m_j ± 1, i.e. −(Λ−1) once and −(Λ−1)−2k twice for k ≥ 1.
pub fn k_type_value_flipped(lambda: u32, tau: f64, m: f64) -> f64 {
    let a = lambda as f64 - 1.0;
    (a * a - tau * tau) / 2.0 - (tau - SQRT2 * m).powi(2) / 2.0
}

pub fn k_type_value_killing(lambda: u32, tau: f64, m: f64) -> f64 {
    let a = lambda as f64 - 1.0;
    (a * a - tau * tau) / 2.0 + (tau - SQRT2 * m).powi(2) / 2.0
}

/// min_τ |D_μ²| for the flipped operator at μ = m·f⁰, over the infinite ladder.
pub fn flipped_gap_formula(lambda: u32, m: f64) -> f64 {
    let a = lambda as f64 - 1.0;
    (0..10_000)
        .map(|k| k_type_value_flipped(lambda, -a - 2.0 * k as f64, m).abs())
        .fold(f64::INFINITY, f64::min)
}

// ---------------------------------------------------------------------------
// kernel and gap scan on the elliptic cone

#[derive(Clone, Debug, Serialize)]
pub struct KernelGapRow {
    pub mu: [f64; 3],
    pub radius_ratio: f64,
    pub boost: f64,
    pub min_abs: f64,
    pub formula_gap: f64,
    pub ker_dim: usize,
    pub window_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelGapReport {
    pub lambda: u32,
    pub n: usize,
    pub window: usize,
    pub orbit_ker_dim: usize,
    pub orbit_boosted_ker_dims: Vec<usize>,
    pub off_orbit_points: usize,
    pub off_orbit_kernel_points: usize,
    pub gap_lower_bound: f64,
    pub max_formula_deviation: f64,
    pub rows: Vec<KernelGapRow>,
}

/// 200 off-orbit elliptic points: signed radius ratio × boost × angle.
/// A negative ratio puts the point on the opposite nappe.
pub fn kernel_gap_grid(model: &DSModel) -> Vec<(f64, f64, [f64; 3])> {
    let ratios: [f64; 10] = [-1.0, 0.2, 0.4, 0.6, 0.8, 0.9, 1.1, 1.25, 1.5, 2.0];
    let boosts: [f64; 5] = [0.0, 0.5, 1.0, 1.5, 2.0];
    let angles: [f64; 4] = [0.3, 1.9, 3.4, 5.0];
    let r0 = model.orbit_radius();
    let mut out = Vec::new();
    for &q in &ratios {
        for &b in &boosts {
            for &th in &angles {
                let r = r0 * q.abs();
                let nappe = if q < 0.0 { 1.0 } else { -1.0 };
                out.push((q, b, [nappe * r * b.cosh(), r * b.sinh() * th.cos(), r * b.sinh() * th.sin()]));
            }
        }
    }
    out
}

pub fn kernel_gap_scan(model: &DSModel) -> Result<KernelGapReport> {
    let orbit = model.ds_spectrum(&model.orbit_point())?;
    let r0 = model.orbit_radius();
    let boosted: Vec<usize> = [0.5, 1.0, 1.5]
        .iter()
        .map(|&b: &f64| model.ds_spectrum(&[-r0 * b.cosh(), r0 * b.sinh() * 0.6, r0 * b.sinh() * 0.8]).map(|s| s.ker_dim))
        .collect::<Result<_>>()?;
    let grid = kernel_gap_grid(model);
    let rows: Vec<KernelGapRow> = grid
        .par_iter()
        .map(|&(q, b, mu)| {
            let op = model.ds_dirac_at(&mu)?;
            let sp = model.window_spectrum(&op.matrix, op.window_error);
            Ok(KernelGapRow {
                mu,
                radius_ratio: q,
                boost: b,
                min_abs: sp.min_abs,
                formula_gap: flipped_gap_formula(model.lambda, op.frame.m),
                ker_dim: sp.ker_dim,
                window_error: sp.window_error,
            })
        })
        .collect::<Result<_>>()?;
    let gap = rows.iter().map(|r| r.min_abs).fold(f64::INFINITY, f64::min);
    let dev = rows.iter().map(|r| (r.min_abs - r.formula_gap).abs() / r.formula_gap).fold(0.0, f64::max);
    Ok(KernelGapReport {
        lambda: model.lambda,
        n: model.n,
        window: model.window(),
        orbit_ker_dim: orbit.ker_dim,
        orbit_boosted_ker_dims: boosted,
        off_orbit_points: rows.len(),
        off_orbit_kernel_points: rows.iter().filter(|r| r.ker_dim > 0).count(),
        gap_lower_bound: gap,
        max_formula_deviation: dev,
        rows,
    })
}

// ---------------------------------------------------------------------------
// metric-flip regression

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepMetric {
    Killing,
    Flipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub metric: SweepMetric,
    pub lambda: u32,
    pub samples: usize,
    /// Scalings s with a kernel at μ = s·(−(Λ+ρ̃)).
    pub kernel_scalings: Vec<f64>,
    pub off_orbit_kernel: Vec<f64>,
    pub orbit_kernel: bool,
}

/// Sweep μ = s·orbit_point over `s_values`, detecting kernels both as grid zeros
/// and as inertia changes of the compressed D², the latter located by bisection.
pub fn metric_flip_sweep(model: &DSModel, metric: SweepMetric, s_values: &[f64]) -> SweepReport {
    let p = model.orbit_point();
    let eigs_at = |s: f64| -> Vec<C64> {
        let mu = [s * p[0], s * p[1], s * p[2]];
        let d = match metric {
            SweepMetric::Killing => model.killing_dirac(&mu),
            SweepMetric::Flipped => model.flipped_dirac(&mu),
        };
        model.window_eigs(&d)
    };
    let inertia = |ev: &[C64]| ev.iter().filter(|z| z.re > 0.0).count();
    let min_abs = |ev: &[C64]| ev.iter().fold(f64::INFINITY, |m, z| m.min(z.norm()));
    let evs: Vec<Vec<C64>> = s_values.par_iter().map(|&s| eigs_at(s)).collect();
    let mut found: Vec<f64> = Vec::new();
    for (k, ev) in evs.iter().enumerate() {
        if min_abs(ev) <= KERNEL_TOL {
            found.push(s_values[k]);
        }
    }
    for k in 0..s_values.len().saturating_sub(1) {
        let (i0, i1) = (inertia(&evs[k]), inertia(&evs[k + 1]));
        if i0 == i1 || min_abs(&evs[k]) <= KERNEL_TOL || min_abs(&evs[k + 1]) <= KERNEL_TOL {
            continue;
        }
        let (mut a, mut b) = (s_values[k], s_values[k + 1]);
        for _ in 0..60 {
            let mid = 0.5 * (a + b);
            if inertia(&eigs_at(mid)) == i0 {
                a = mid;
            } else {
                b = mid;
            }
        }
        let root = 0.5 * (a + b);
        if min_abs(&eigs_at(root)) <= 1e-6 {
            found.push(root);
        }
    }
    found.sort_by(f64::total_cmp);
    let off: Vec<f64> = found.iter().copied().filter(|s| (s - 1.0).abs() > 1e-6).collect();
    SweepReport {
        metric,
        lambda: model.lambda,
        samples: s_values.len(),
        orbit_kernel: found.iter().any(|s| (s - 1.0).abs() <= 1e-6),
        kernel_scalings: found,
        off_orbit_kernel: off,
    }
}

// ---------------------------------------------------------------------------
// K-types and case analysis

#[derive(Clone, Debug, Serialize)]
pub struct KTypeRow {
    pub tau: i64,
    pub multiplicity: usize,
    /// |Λ+ρ̃|² − |τ+ρ_c|²
    pub bound: f64,
    /// (n, c) with τ = −(Λ−1) − 2(n + c), n ≥ 0, c ∈ {0, 1}.
    pub knapp: Option<(u32, u32)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct KTypeReport {
    pub lambda: u32,
    pub rows: Vec<KTypeRow>,
    pub integrality_residual: f64,
    pub bound_holds: bool,
    pub equality_only_at_lowest: bool,
    pub knapp_solved: bool,
    /// Max deviation of the τ-blocks of D_μ² from |Λ+ρ̃|² − |τ|² + (D_μ²)_c.
    pub restriction_residual: f64,
}

pub fn knapp_expansion(lambda: u32, tau: i64) -> Option<(u32, u32)> {
    let d = -(lambda as i64 - 1) - tau;
    if d < 0 || d % 2 != 0 {
        return None;
    }
    Some(((d / 2) as u32, 0))
}

pub fn ktype_bound_check(model: &DSModel) -> KTypeReport {
    let (taus, vecs) = model.k_type_basis();
    let mut integ: f64 = 0.0;
    let mut counts: std::collections::BTreeMap<i64, usize> = std::collections::BTreeMap::new();
    for t in &taus {
        integ = integ.max((t - t.round()).abs());
        *counts.entry(t.round() as i64).or_default() += 1;
    }
    let lr = model.lambda_rho_sq();
    let lowest = -(model.lambda as i64 - 1);
    let rows: Vec<KTypeRow> = counts
        .iter()
        .rev()
        .map(|(&tau, &mult)| KTypeRow {
            tau,
            multiplicity: mult,
            bound: lr - (tau * tau) as f64 / 2.0,
            knapp: knapp_expansion(model.lambda, tau),
        })
        .collect();
    let bound_holds = rows.iter().all(|r| r.bound <= 1e-12);
    let equality_only_at_lowest = rows.iter().all(|r| (r.bound.abs() <= 1e-12) == (r.tau == lowest));
    // blockwise restriction formula at a few μ = (μ₀,0,0)
    let mut res: f64 = 0.0;
    for mu0 in [0.0, -model.orbit_radius(), 0.37, -1.3] {
        let d = model.flipped_dirac(&[mu0, 0.0, 0.0]);
        let d2 = model.compressed_square(&d);
        let block = vecs.adjoint() * d2 * &vecs;
        let want = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
            taus.len(),
            taus.iter().map(|&t| {
                let t = t.round();
                c(lr - t * t / 2.0 - (t / SQRT2 - mu0).powi(2), 0.0)
            }),
        ));
        res = res.max(max_abs(&(block - want)));
    }
    KTypeReport {
        lambda: model.lambda,
        knapp_solved: rows.iter().all(|r| r.knapp.is_some()),
        rows,
        integrality_residual: integ,
        bound_holds,
        equality_only_at_lowest,
        restriction_residual: res,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectralCase {
    Zero,
    Elliptic,
    Nilpotent,
    Mixed,
    Ambiguous,
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseReport {
    pub mu: [f64; 3],
    pub case: SpectralCase,
    pub min_abs_spec: Option<f64>,
    pub case_bound: Option<f64>,
    pub window_error: f64,
    pub certified: bool,
    /// μ = 0 only: ‖D₀² − (Λ−1)²/2‖ for the invariant-form operator.
    pub killing_scalar_residual: Option<f64>,
    /// μ = 0 only: top of spec D₀² for the flipped operator (−|Λ+ρ̃|²).
    pub flipped_top: Option<f64>,
}

pub fn spectral_case_analysis(model: &DSModel, mu: &[f64]) -> Result<CaseReport> {
    let m3 = [mu[0], mu[1], mu[2]];
    let lr = model.lambda_rho_sq();
    match classify(mu) {
        ConeClass::Hyperbolic => Err(Error::Domain("hyperbolic covector lies outside the elliptic cone".into())),
        ConeClass::Ambiguous => Ok(CaseReport {
            mu: m3,
            case: SpectralCase::Ambiguous,
            min_abs_spec: None,
            case_bound: None,
            window_error: 0.0,
            certified: false,
            killing_scalar_residual: None,
            flipped_top: None,
        }),
        ConeClass::Zero => {
            let w2 = 2 * model.window();
            let kd = model.compressed_square(&model.killing_dirac(mu));
            let kres = max_abs(&(kd - identity(w2) * c(lr, 0.0)));
            let sp = model.window_spectrum(&model.flipped_dirac(mu), 0.0);
            Ok(CaseReport {
                mu: m3,
                case: SpectralCase::Zero,
                min_abs_spec: Some(sp.min_abs),
                case_bound: Some(lr),
                window_error: 0.0,
                certified: kres <= 1e-10 && (sp.max_re + lr).abs() <= 1e-10,
                killing_scalar_residual: Some(kres),
                flipped_top: Some(sp.max_re),
            })
        }
        ConeClass::Nilpotent => {
            // |μ|² = 0 only for the invariant form, so μ couples through γ(μ), not γ₀(μ)
            let d = model.nilpotent_dirac(mu);
            let full = min_abs_eig(&window(&(&d * &d), 2 * model.window()));
            let inner = min_abs_eig(&window(&(&d * &d), 2 * (model.window() - (model.margin / 2).max(1))));
            let err = (full - inner).abs() + 1e-12 * (1.0 + euclid2(mu));
            Ok(CaseReport {
                mu: m3,
                case: SpectralCase::Nilpotent,
                min_abs_spec: Some(full),
                case_bound: Some(lr),
                window_error: err,
                certified: full >= lr - err,
                killing_scalar_residual: None,
                flipped_top: None,
            })
        }
        ConeClass::Elliptic => {
            let op = model.ds_dirac_at(mu)?;
            let sp = model.window_spectrum(&op.matrix, op.window_error);
            let bound = flipped_gap_formula(model.lambda, op.frame.m);
            Ok(CaseReport {
                mu: m3,
                case: SpectralCase::Elliptic,
                min_abs_spec: Some(sp.min_abs),
                case_bound: Some(bound),
                window_error: op.window_error,
                certified: sp.min_abs >= bound - op.window_error - 1e-9 * (1.0 + bound),
                killing_scalar_residual: None,
                flipped_top: None,
            })
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MixedSweep {
    pub elliptic_part: [f64; 3],
    pub nilpotent_part: [f64; 3],
    pub elliptic_gap: f64,
    pub deltas: Vec<f64>,
    pub gaps: Vec<f64>,
    pub all_positive: bool,
    pub converges_to_elliptic: bool,
}

/// μ = μ_e + δ·n for a nilpotent n; small δ stays inside the elliptic cone.
pub fn mixed_sweep(model: &DSModel, mu_e: &[f64], n: &[f64], deltas: &[f64]) -> Result<MixedSweep> {
    if classify(n) != ConeClass::Nilpotent {
        return Err(Error::Domain("mixed sweep needs a nilpotent direction".into()));
    }
    let base = model.ds_spectrum(mu_e)?.min_abs;
    let mut gaps = Vec::new();
    for &d in deltas {
        let mu: Vec<f64> = (0..3).map(|a| mu_e[a] + d * n[a]).collect();
        let r = spectral_case_analysis(model, &mu)?;
        gaps.push(r.min_abs_spec.unwrap_or(f64::NAN));
    }
    let all_positive = gaps.iter().all(|g| *g > KERNEL_TOL);
    // the smallest δ should be closest to the pure elliptic value
    let mut order: Vec<usize> = (0..deltas.len()).collect();
    order.sort_by(|&a, &b| deltas[a].abs().total_cmp(&deltas[b].abs()));
    let dist: Vec<f64> = order.iter().map(|&k| (gaps[k] - base).abs()).collect();
    // monotone, and at least first order in δ between the two smallest steps
    let first_order = match order.as_slice() {
        [a, b, ..] => dist[0] <= 2.0 * dist[1] * (deltas[*a] / deltas[*b]).abs() + 1e-9,
        _ => false,
    };
    let converges = dist.windows(2).all(|w| w[0] <= w[1] + 1e-12) && first_order;
    Ok(MixedSweep {
        elliptic_part: [mu_e[0], mu_e[1], mu_e[2]],
        nilpotent_part: [n[0], n[1], n[2]],
        elliptic_gap: base,
        deltas: deltas.to_vec(),
        gaps,
        all_positive,
        converges_to_elliptic: converges,
    })
}

// ---------------------------------------------------------------------------
// boundary behaviour

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryRow {
    pub xi: [f64; 3],
    pub class: ConeClass,
    /// e^{−|ν+ξ|₀²} with ν = −(Λ+ρ̃), in the flipped metric.
    pub gaussian_factor: f64,
    /// e^{−min|spec D_ξ²|} for the flipped operator.
    pub spectral_factor: f64,
    /// ‖γ(ξ)²‖ with the invariant-form gammas.
    pub killing_gamma_square: f64,
    /// ‖γ₀(ξ)²‖ with the flipped gammas.
    pub flipped_gamma_square: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryReport {
    pub rows: Vec<BoundaryRow>,
    pub control: BoundaryRow,
    /// Along each ray, both factors decrease with the radius.
    pub decreasing: bool,
    pub killing_null_squares_vanish: bool,
    pub flipped_squares_nonzero: bool,
}

fn boundary_row(model: &DSModel, xi: [f64; 3]) -> BoundaryRow {
    let nu = model.orbit_point();
    let g2: f64 = (0..3).map(|a| (nu[a] + xi[a]).powi(2)).sum();
    let sp = model.window_spectrum(&model.flipped_dirac(&xi), 0.0);
    let gk = model.killing.gamma(&xi);
    let gf = model.flipped.gamma(&xi);
    BoundaryRow {
        xi,
        class: classify(&xi),
        gaussian_factor: (-g2).exp(),
        spectral_factor: (-sp.min_abs).exp(),
        killing_gamma_square: max_abs(&(&gk * &gk)),
        flipped_gamma_square: max_abs(&(&gf * &gf)),
    }
}

/// Evaluate boundary integrand factors along null rays at the given radii.
pub fn boundary_decay_check(model: &DSModel, directions: &[[f64; 3]], radii: &[f64]) -> BoundaryReport {
    let mut rows = Vec::new();
    let mut decreasing = true;
    for d in directions {
        let nrm = (d[1] * d[1] + d[2] * d[2]).sqrt();
        let unit = d.map(|x| x / nrm);
        let ray: Vec<BoundaryRow> = radii.iter().map(|&r| boundary_row(model, unit.map(|x| x * r))).collect();
        for w in ray.windows(2) {
            decreasing &= w[1].gaussian_factor < w[0].gaussian_factor && w[1].spectral_factor < w[0].spectral_factor;
        }
        rows.extend(ray);
    }
    let r = model.orbit_radius();
    let control = boundary_row(model, [-2.0 * r, 0.3 * r, 0.2 * r]);
    BoundaryReport {
        killing_null_squares_vanish: rows.iter().all(|r| r.killing_gamma_square <= 1e-12 * (1.0 + euclid2(&r.xi))),
        flipped_squares_nonzero: rows.iter().all(|r| r.flipped_gamma_square > 1e-6),
        rows,
        control,
        decreasing,
    }
}

// ---------------------------------------------------------------------------
// smeared Rossman check

/// φ(X) = (c₀ + c₂|X|²)e^{−|X|²/(2s²)} for |X| < U, zero outside.
#[derive(Clone, Debug, Serialize)]
pub struct SmearedTest {
    pub width: f64,
    pub cutoff: f64,
    pub poly: [f64; 2],
    pub normalized: bool,
}

impl SmearedTest {
    pub fn gaussian(width: f64) -> Self {
        SmearedTest { width, cutoff: DEFAULT_CUTOFF, poly: [1.0, 0.0], normalized: true }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width >= MIN_WIDTH) {
            return Err(Error::Config(format!(
                "width {} is below the guard {MIN_WIDTH}: the character is a distribution and δ-like limits are not supported",
                self.width
            )));
        }
        if !(self.cutoff > 0.0 && self.cutoff < SQRT2 * PI) {
            return Err(Error::Domain(format!("cutoff {} must lie in (0, √2π) where exp is invertible", self.cutoff)));
        }
        Ok(())
    }

    fn profile(&self, r2: f64) -> f64 {
        (self.poly[0] + self.poly[1] * r2) * (-r2 / (2.0 * self.width * self.width)).exp()
    }

    fn radial_mass(&self, a: f64, b: f64) -> f64 {
        crate::linalg::gauss_legendre(200, a, b).iter().map(|&(r, w)| w * 4.0 * PI * r * r * self.profile(r * r)).sum()
    }

    /// Multiplier making ∫φ = 1 when `normalized`.
    pub fn scale(&self) -> f64 {
        if self.normalized {
            1.0 / self.radial_mass(0.0, self.cutoff)
        } else {
            1.0
        }
    }

    /// Untruncated mass beyond the cutoff, relative to the kept mass.
    pub fn tail_bound(&self) -> f64 {
        let far = self.cutoff + 40.0 * self.width;
        (self.radial_mass(self.cutoff, far) / self.radial_mass(0.0, self.cutoff)).abs()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let r2 = euclid2(x);
        if r2 >= self.cutoff * self.cutoff {
            0.0
        } else {
            self.scale() * self.profile(r2)
        }
    }
}

/// Â(X) = (κ/2)/sinh(κ/2) with κ² = 2B(X,X), for X = (x⁰, ρ, 0).
pub fn a_hat_sl2(x0: f64, rho: f64) -> f64 {
    let k2 = 2.0 * (-x0 * x0 + rho * rho);
    if k2.abs() < 1e-300 {
        return 1.0;
    }
    if k2 > 0.0 {
        let z = k2.sqrt() / 2.0;
        z / z.sinh()
    } else {
        let z = (-k2).sqrt() / 2.0;
        z / z.sin()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LhsValue {
    pub value: [f64; 2],
    pub terms: usize,
    pub tail_estimate: f64,
    pub nodes: [usize; 2],
}

fn min_abs_eig(m: &CMat) -> f64 {
    eigvals(m).iter().fold(f64::INFINITY, |a, z| a.min(z.norm()))
}

/// Number of ladder terms whose smeared contribution exceeds e^{−30}.
fn ladder_terms(lambda: u32, width: f64) -> (usize, f64) {
    let mut j = 0;
    loop {
        let m = lambda as f64 + 2.0 * j as f64;
        if width * width * m * m / 4.0 > 30.0 {
            let tail: f64 = (j..j + 200)
                .map(|k| {
                    let m = lambda as f64 + 2.0 * k as f64;
                    (-width * width * m * m / 4.0).exp()
                })
                .sum();
            return (j, tail);
        }
        j += 1;
    }
}

fn oscillation_nodes(freq: f64, length: f64) -> usize {
    (0.5 * freq * length).ceil() as usize + 40
}

/// Tr π(φ) on the truncated model: Σ_{j<J} ∫ φ(X) ⟨v_j, e^{R(X)} v_j⟩ dX.
pub fn rossman_lhs(model: &DSModel, phi: &SmearedTest) -> Result<LhsValue> {
    phi.validate()?;
    let (terms, tail) = ladder_terms(model.lambda, phi.width);
    if terms > model.window() {
        return Err(Error::Convergence(format!(
            "width {} needs {terms} K-types, window holds {}",
            phi.width,
            model.window()
        )));
    }
    let u = phi.cutoff;
    let mmax = model.lambda as f64 + 2.0 * terms as f64;
    let nr = oscillation_nodes(mmax / SQRT2, u);
    let npsi = oscillation_nodes(mmax * u / SQRT2, PI);
    let rs = crate::linalg::gauss_legendre(nr, 0.0, u);
    let ps = crate::linalg::gauss_legendre(npsi, 0.0, PI);
    let n = model.n;
    // By K-invariance only X = (x⁰, ρ, 0) is needed. i·R(X) is gauge-equivalent
    // to the real tridiagonal H with diagonal −x⁰m_j/√2 and off-diagonal ρ|R₁|.
    let diag: Vec<f64> = (0..n).map(|j| (I * model.generators[0][(j, j)]).re).collect();
    let off: Vec<f64> = (0..n - 1).map(|j| model.generators[1][(j + 1, j)].norm()).collect();
    let scale = phi.scale();
    let nodes: Vec<(f64, f64, f64)> = rs
        .iter()
        .flat_map(|&(r, wr)| ps.iter().map(move |&(p, wp)| (r, p, wr * wp)))
        .collect();
    let contrib: Vec<C64> = nodes
        .par_iter()
        .map(|&(r, p, w)| {
            let (x0, rho) = (r * p.cos(), r * p.sin());
            let f = scale * phi.profile(r * r);
            let h = DMatrix::from_fn(n, n, |a, b| {
                if a == b {
                    x0 * diag[a]
                } else if a + 1 == b {
                    rho * off[a]
                } else if b + 1 == a {
                    rho * off[b]
                } else {
                    0.0
                }
            });
            let eig = nalgebra::SymmetricEigen::new(h);
            let phases: Vec<C64> = eig.eigenvalues.iter().map(|&l| (-I * l).exp()).collect();
            let mut tr = c(0.0, 0.0);
            for j in 0..terms {
                for k in 0..n {
                    let v = eig.eigenvectors[(j, k)];
                    tr += phases[k] * (v * v);
                }
            }
            tr * (f * 2.0 * PI * rho * r * w)
        })
        .collect();
    let total = contrib.iter().fold(c(0.0, 0.0), |a, b| a + b);
    Ok(LhsValue { value: [total.re, total.im], terms, tail_estimate: tail, nodes: [nr, npsi] })
}

#[derive(Clone, Debug, Serialize)]
pub struct RhsValue {
    pub value: [f64; 2],
    pub radial_cutoff: f64,
    pub u_max: f64,
    pub nodes: [usize; 3],
}

/// Default hyperboloid cutoff: Euclidean |ν| where the Gaussian transform is e^{−32}.
pub fn default_radial_cutoff(phi: &SmearedTest, model: &DSModel) -> f64 {
    (8.0 / phi.width).max(2.0 * model.orbit_radius())
}

/// ∫_{O} dβ(ν) ∫ dX e^{i⟨ν,X⟩} φ(X) Â(X) over the sheet through −(Λ+ρ̃),
/// cut at Euclidean |ν| ≤ R.
pub fn rossman_rhs(model: &DSModel, phi: &SmearedTest, radial_cutoff: f64) -> Result<RhsValue> {
    phi.validate()?;
    let r = model.orbit_radius();
    if radial_cutoff <= r {
        return Err(Error::Config(format!("radial cutoff {radial_cutoff} must exceed the orbit radius {r}")));
    }
    // r²cosh 2u = R² on the sheet ν(u) = (−r cosh u, r sinh u, 0)
    let u_max = 0.5 * ((radial_cutoff / r).powi(2)).acosh();
    let u = phi.cutoff;
    let nx = oscillation_nodes(radial_cutoff, 2.0 * u);
    let npsi = oscillation_nodes(radial_cutoff * u, PI);
    let nu_nodes = 120;
    let rs = crate::linalg::gauss_legendre(nx, 0.0, u);
    let ps = crate::linalg::gauss_legendre(npsi, 0.0, PI);
    let scale = phi.scale();
    // X-nodes with the K-averaged measure 2πρ·R dR dψ and F = φÂ folded in
    let xs: Vec<(f64, f64, f64)> = rs
        .iter()
        .flat_map(|&(rr, wr)| {
            ps.iter().map(move |&(p, wp)| {
                let (x0, rho) = (rr * p.cos(), rr * p.sin());
                let f = scale * phi.profile(rr * rr) * a_hat_sl2(x0, rho);
                (x0, rho, f * 2.0 * PI * rho * rr * wr * wp)
            })
        })
        .collect();
    let us = crate::linalg::gauss_legendre(nu_nodes, 0.0, u_max);
    let vals: Vec<f64> = us
        .par_iter()
        .map(|&(uu, wu)| {
            let (n0, np) = (-r * uu.cosh(), r * uu.sinh());
            // F is even, so the transform is real: cos(ν₀x⁰)·J₀(|ν⊥|ρ)
            let psi: f64 = xs.iter().map(|&(x0, rho, w)| w * (n0 * x0).cos() * libm::j0(np * rho)).sum();
            wu * uu.sinh() * psi
        })
        .collect();
    let total = 2.0 * PI * LIOUVILLE_C * r * vals.iter().sum::<f64>();
    Ok(RhsValue { value: [total, 0.0], radial_cutoff, u_max, nodes: [nx, npsi, nu_nodes] })
}

/// ∫ φ Θ dX from the closed-form character on the elliptic and hyperbolic sets.
pub fn character_oracle(lambda: u32, phi: &SmearedTest) -> Result<f64> {
    phi.validate()?;
    let a = SQRT2;
    let l1 = lambda as f64 - 1.0;
    let u = phi.cutoff;
    let scale = phi.scale();
    let seg = crate::linalg::gauss_legendre(16, 0.0, 1.0);
    let inner = crate::linalg::gauss_legendre(48, 0.0, 1.0);
    let mut total = 0.0;
    for k in 0..30 {
        for &(s, ws) in &seg {
            let eta = k as f64 + s;
            let tmax = u / (a * (2.0 * eta).cosh().sqrt());
            for &(q, wq) in &inner {
                let th = q * tmax;
                let w = ws * wq * tmax;
                let r2 = 2.0 * th * th * (2.0 * eta).cosh();
                let f = scale * phi.profile(r2);
                // elliptic: θ and −θ combined, Θ(θ)+Θ(−θ) = −sin((Λ−1)θ)/sin θ
                let ell = -(l1 * th).sin() / th.sin() * th * th * eta.sinh();
                // hyperbolic: η over ℝ, Θ = e^{−(Λ−1)t}/(2 sinh t)
                let hyp = 2.0 * (-l1 * th).exp() / (2.0 * th.sinh()) * th * th * eta.cosh();
                total += w * f * 2.0 * PI * a.powi(3) * (ell + hyp);
            }
        }
    }
    Ok(total)
}

#[derive(Clone, Debug, Serialize)]
pub struct RossmanReport {
    pub lambda: u32,
    pub width: f64,
    pub n: usize,
    pub lhs: LhsValue,
    pub lhs_doubled_n: LhsValue,
    pub rhs: RhsValue,
    pub rhs_doubled_r: RhsValue,
    pub oracle: f64,
    pub phi_tail_bound: f64,
    pub n_doubling_rel: f64,
    pub r_doubling_rel: f64,
    pub oracle_rel: f64,
    pub rel_error: f64,
    pub combined_error: f64,
    pub n_converged: bool,
    pub r_converged: bool,
    pub tolerance: f64,
    pub pass: bool,
}

pub const ROSSMAN_TOL: f64 = 5e-3;
pub const DOUBLING_TOL: f64 = 1e-4;

pub fn rossman_check(lambda: u32, n: usize, phi: &SmearedTest) -> Result<RossmanReport> {
    phi.validate()?;
    let m1 = DSModel::build(lambda, n)?;
    let m2 = DSModel::build(lambda, 2 * n)?;
    let lhs = rossman_lhs(&m1, phi)?;
    let lhs2 = rossman_lhs(&m2, phi)?;
    let r0 = default_radial_cutoff(phi, &m1);
    let rhs = rossman_rhs(&m1, phi, r0)?;
    let rhs2 = rossman_rhs(&m1, phi, 2.0 * r0)?;
    let oracle = character_oracle(lambda, phi)?;
    let (l, rr) = (lhs2.value[0], rhs2.value[0]);
    let denom = rr.abs().max(1e-300);
    let n_rel = (lhs.value[0] - l).abs() / l.abs().max(1e-300);
    let r_rel = (rhs.value[0] - rr).abs() / denom;
    let rel = (l - rr).abs() / denom;
    let combined = rel + n_rel + r_rel + phi.tail_bound();
    let n_ok = n_rel <= DOUBLING_TOL;
    let r_ok = r_rel <= DOUBLING_TOL;
    Ok(RossmanReport {
        lambda,
        width: phi.width,
        n,
        lhs,
        lhs_doubled_n: lhs2,
        rhs,
        rhs_doubled_r: rhs2,
        oracle,
        phi_tail_bound: phi.tail_bound(),
        n_doubling_rel: n_rel,
        r_doubling_rel: r_rel,
        oracle_rel: (l - oracle).abs() / oracle.abs().max(1e-300),
        rel_error: rel,
        combined_error: combined,
        n_converged: n_ok,
        r_converged: r_ok,
        tolerance: ROSSMAN_TOL,
        pass: n_ok && r_ok && combined <= ROSSMAN_TOL,
    })
}
