//! Equivariant Chern character of the super-connection √t D₀ + i√ε γ(ξ) − ι(X).
//!
//! Forms on 𝔤* are stored with matrix coefficients indexed by subsets of
//! {dξ_1..dξ_n}. The dξ's anticommute among themselves and commute with the
//! matrices. Exponentials of (0-form + 1-form) are computed exactly in form
//! degree via the Dyson expansion, whose simplex integrals reduce to divided
//! differences of exp on the eigenvalues of the 0-form.

use std::collections::BTreeMap;
use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::dirac::DiracFamily;
use crate::linalg::{c, eigen_decomp, eigvals, expm, identity, kron, max_abs, CMat, C64, I};
use crate::repbuild::{CompactAlgebra, LieAlgebra};
use crate::rootsys::{a_hat_kernel, RootDatum, Weight};
use crate::{Error, Result};

/// Liouville constant c in dμ = c·dA/r on spheres in su(2)*, fixed at λ = 0, X = 0.
pub const LIOUVILLE_C: f64 = 0.112_539_539_519_638_26; // 1/(2√2π)

/// Condition number of the eigenvector matrix beyond which the block-exponential path is used.
pub const COND_FALLBACK: f64 = 1e8;

/// Node contributions whose a-priori bound falls below this are skipped.
const NODE_BOUND: f64 = 1e-17;

// ---------------------------------------------------------------------------
// graded forms

/// Element of Ω(𝔤*)⊗End: subset bitmask → matrix coefficient.
#[derive(Clone, Debug)]
pub struct GradedForm {
    pub n: usize,
    pub dim: usize,
    pub coeffs: BTreeMap<u32, CMat>,
}

/// Sign of dξ_I ∧ dξ_J relative to dξ_{I∪J}; zero if they overlap.
pub fn shuffle_sign(i: u32, j: u32) -> f64 {
    if i & j != 0 {
        return 0.0;
    }
    let mut inv = 0;
    let mut bits = j;
    while bits != 0 {
        let b = bits.trailing_zeros();
        inv += (i >> (b + 1)).count_ones();
        bits &= bits - 1;
    }
    if inv % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

impl GradedForm {
    pub fn zero(n: usize, dim: usize) -> Self {
        GradedForm { n, dim, coeffs: BTreeMap::new() }
    }

    pub fn scalar(n: usize, m: CMat) -> Self {
        let dim = m.nrows();
        let mut coeffs = BTreeMap::new();
        coeffs.insert(0, m);
        GradedForm { n, dim, coeffs }
    }

    pub fn one_form(n: usize, j: usize, m: CMat) -> Self {
        let dim = m.nrows();
        let mut coeffs = BTreeMap::new();
        coeffs.insert(1 << j, m);
        GradedForm { n, dim, coeffs }
    }

    pub fn get(&self, mask: u32) -> CMat {
        self.coeffs.get(&mask).cloned().unwrap_or_else(|| CMat::zeros(self.dim, self.dim))
    }

    pub fn top(&self) -> CMat {
        self.get((1u32 << self.n) - 1)
    }

    pub fn add(&self, other: &GradedForm) -> GradedForm {
        let mut out = self.clone();
        for (k, v) in &other.coeffs {
            let e = out.coeffs.entry(*k).or_insert_with(|| CMat::zeros(self.dim, self.dim));
            *e += v;
        }
        out
    }

    pub fn wedge(&self, other: &GradedForm) -> GradedForm {
        let mut out = GradedForm::zero(self.n, self.dim);
        for (i, a) in &self.coeffs {
            for (j, b) in &other.coeffs {
                let s = shuffle_sign(*i, *j);
                if s == 0.0 {
                    continue;
                }
                let e = out.coeffs.entry(i | j).or_insert_with(|| CMat::zeros(self.dim, self.dim));
                *e += a * b * c(s, 0.0);
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &GradedForm) -> f64 {
        let mut keys: Vec<u32> = self.coeffs.keys().chain(other.coeffs.keys()).copied().collect();
        keys.dedup();
        keys.iter().map(|&k| max_abs(&(self.get(k) - other.get(k)))).fold(0.0, f64::max)
    }
}

// ---------------------------------------------------------------------------
// curvature and its exponential

/// Curvature M₀ + Σ_j N_j dξ_j at a point ξ.
#[derive(Clone, Debug)]
pub struct CurvaturePoint {
    pub zero_form: CMat,
    pub one_form: Vec<CMat>,
}

/// M₀ = tD₀² + 2i√(tε)T(ξ) − ε|ξ|² + R(X) + σ(X); N_j = i√ε γ^j.
pub fn curvature(fam: &DiracFamily, eps: f64, t: f64, x: &[f64], xi: &[f64]) -> CurvaturePoint {
    let d = fam.total_dim;
    let mut m = &fam.d0 * &fam.d0 * c(t, 0.0);
    m += fam.t_of(xi) * c(0.0, 2.0 * (t * eps).sqrt());
    m -= identity(d) * c(eps * fam.form.eval(xi, xi), 0.0);
    m += fam.moment(x);
    let one_form = fam.g.iter().map(|g| g * (I * eps.sqrt())).collect();
    CurvaturePoint { zero_form: m, one_form }
}

/// Divided difference exp[z₀,…,z_k].
pub fn exp_divided_difference(z: &[C64]) -> C64 {
    let k = z.len() - 1;
    if k == 0 {
        return z[0].exp();
    }
    let mut spread: f64 = 0.0;
    let (mut p, mut q) = (0, 1);
    for a in 0..z.len() {
        for b in (a + 1)..z.len() {
            let d = (z[a] - z[b]).norm();
            if d > spread {
                spread = d;
                p = a;
                q = b;
            }
        }
    }
    if spread <= 1.0 {
        // Taylor about the mean: e^c Σ_j h_j(w)/(j+k)!, h_j complete homogeneous
        let mean = z.iter().sum::<C64>() / (z.len() as f64);
        let w: Vec<C64> = z.iter().map(|v| v - mean).collect();
        const J: usize = 30;
        let mut h = [c(0.0, 0.0); J];
        h[0] = c(1.0, 0.0);
        for wi in &w {
            for j in 1..J {
                let prev = h[j - 1];
                h[j] += wi * prev;
            }
        }
        let mut fact = 1.0;
        for i in 2..=k {
            fact *= i as f64;
        }
        let mut s = c(0.0, 0.0);
        for (j, hj) in h.iter().enumerate() {
            if j > 0 {
                fact *= (j + k) as f64;
            }
            s += hj / fact;
        }
        return mean.exp() * s;
    }
    let without = |r: usize| -> Vec<C64> { z.iter().enumerate().filter(|(i, _)| *i != r).map(|(_, v)| *v).collect() };
    (exp_divided_difference(&without(p)) - exp_divided_difference(&without(q))) / (z[q] - z[p])
}

fn permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out.into_iter()
        .map(|p| {
            let mut inv = 0;
            for a in 0..n {
                for b in (a + 1)..n {
                    if p[a] > p[b] {
                        inv += 1;
                    }
                }
            }
            (p, if inv % 2 == 0 { 1.0 } else { -1.0 })
        })
        .collect()
}

/// ∫_{Δ_k} e^{s₀M}N₁e^{s₁M}⋯N_k e^{s_kM} in the eigenbasis of M (with Ñ = P⁻¹NP).
fn chain_eigen(vals: &[C64], nt: &[&CMat]) -> CMat {
    let m = vals.len();
    let k = nt.len();
    let mut out = CMat::zeros(m, m);
    let mut idx = vec![0usize; k + 1];
    let total = m.pow((k + 1) as u32);
    for code in 0..total {
        let mut cc = code;
        for slot in idx.iter_mut() {
            *slot = cc % m;
            cc /= m;
        }
        let mut prod = c(1.0, 0.0);
        for j in 0..k {
            prod *= nt[j][(idx[j], idx[j + 1])];
            if prod == c(0.0, 0.0) {
                break;
            }
        }
        if prod == c(0.0, 0.0) {
            continue;
        }
        let zs: Vec<C64> = idx.iter().map(|&i| vals[i]).collect();
        out[(idx[0], idx[k])] += prod * exp_divided_difference(&zs);
    }
    out
}

/// Same integral via the block upper-triangular exponential.
fn chain_block(m0: &CMat, ns: &[&CMat]) -> CMat {
    let m = m0.nrows();
    let k = ns.len();
    let mut big = CMat::zeros((k + 1) * m, (k + 1) * m);
    for b in 0..=k {
        big.view_mut((b * m, b * m), (m, m)).copy_from(m0);
    }
    for b in 0..k {
        big.view_mut((b * m, (b + 1) * m), (m, m)).copy_from(ns[b]);
    }
    expm(&big).view((0, k * m), (m, m)).into_owned()
}

#[derive(Clone, Debug, Serialize)]
pub struct FormExpInfo {
    pub cond: f64,
    pub fallback: bool,
}

/// exp(M₀ + Σ N_j dξ_j) as a graded form, exact in form degree.
pub fn form_exp(cp: &CurvaturePoint) -> (GradedForm, FormExpInfo) {
    let n = cp.one_form.len();
    let dim = cp.zero_form.nrows();
    let dec = eigen_decomp(&cp.zero_form);
    let (fallback, cond) = match &dec {
        Some(d) => (d.cond > COND_FALLBACK, d.cond),
        None => (true, f64::INFINITY),
    };
    let nt: Vec<CMat> = match (&dec, fallback) {
        (Some(d), false) => cp.one_form.iter().map(|x| &d.p_inv * x * &d.p).collect(),
        _ => vec![],
    };
    let mut out = GradedForm::zero(n, dim);
    for mask in 0u32..(1 << n) {
        let members: Vec<usize> = (0..n).filter(|j| mask >> j & 1 == 1).collect();
        let mut acc = CMat::zeros(dim, dim);
        for (perm, sgn) in permutations(members.len()) {
            let ordered: Vec<usize> = perm.iter().map(|&p| members[p]).collect();
            let chain = if fallback {
                let ns: Vec<&CMat> = ordered.iter().map(|&j| &cp.one_form[j]).collect();
                chain_block(&cp.zero_form, &ns)
            } else {
                let d = dec.as_ref().unwrap();
                let ns: Vec<&CMat> = ordered.iter().map(|&j| &nt[j]).collect();
                &d.p * chain_eigen(&d.values, &ns) * &d.p_inv
            };
            acc += chain * c(sgn, 0.0);
        }
        out.coeffs.insert(mask, acc);
    }
    (out, FormExpInfo { cond, fallback })
}

/// Supertrace of the top-degree coefficient over V⊗S.
pub fn supertrace_top(fam: &DiracFamily, gf: &GradedForm) -> C64 {
    let gr = kron(&identity(fam.dim_v), &fam.spin.grading);
    (gr * gf.top()).trace()
}

/// Top-degree supertrace of exp(M₀ + Σ N_j dξ_j), without assembling lower degrees.
struct TopEvaluator {
    perms: Vec<(Vec<usize>, f64)>,
    grading: CMat,
}

impl TopEvaluator {
    fn new(fam: &DiracFamily) -> Self {
        TopEvaluator { perms: permutations(fam.n()), grading: kron(&identity(fam.dim_v), &fam.spin.grading) }
    }

    fn eval(&self, m0: &CMat, ns: &[CMat]) -> (C64, bool) {
        let n = ns.len();
        let m = m0.nrows();
        let dec = eigen_decomp(m0).filter(|d| d.cond <= COND_FALLBACK);
        let Some(d) = dec else {
            let mut acc = c(0.0, 0.0);
            for (perm, sgn) in &self.perms {
                let ord: Vec<&CMat> = perm.iter().map(|&j| &ns[j]).collect();
                acc += (&self.grading * chain_block(m0, &ord)).trace() * *sgn;
            }
            return (acc, true);
        };
        let nt: Vec<CMat> = ns.iter().map(|x| &d.p_inv * x * &d.p).collect();
        let gt = &d.p_inv * &self.grading * &d.p;
        // str(P C P⁻¹) = Σ G̃[i_n,i₀] C[i₀,i_n]; divided differences cached by multiset
        let mut cache: HashMap<Vec<usize>, C64> = HashMap::new();
        let mut idx = vec![0usize; n + 1];
        let mut acc = c(0.0, 0.0);
        for code in 0..m.pow((n + 1) as u32) {
            let mut cc = code;
            for slot in idx.iter_mut() {
                *slot = cc % m;
                cc /= m;
            }
            let g = gt[(idx[n], idx[0])];
            if g == c(0.0, 0.0) {
                continue;
            }
            let mut anti = c(0.0, 0.0);
            for (perm, sgn) in &self.perms {
                let mut p = c(*sgn, 0.0);
                for j in 0..n {
                    p *= nt[perm[j]][(idx[j], idx[j + 1])];
                }
                anti += p;
            }
            if anti == c(0.0, 0.0) {
                continue;
            }
            let mut key = idx.clone();
            key.sort_unstable();
            let dd = *cache.entry(key).or_insert_with(|| {
                let zs: Vec<C64> = idx.iter().map(|&i| d.values[i]).collect();
                exp_divided_difference(&zs)
            });
            acc += g * anti * dd;
        }
        (acc, false)
    }
}

// ---------------------------------------------------------------------------
// integration over 𝔤*

#[derive(Clone, Debug, Serialize)]
pub struct ChernOptions {
    pub nodes: usize,
    /// Relative error-estimate threshold for the convergence flag.
    pub tol: f64,
}

impl Default for ChernOptions {
    fn default() -> Self {
        ChernOptions { nodes: 40, tol: 1e-7 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ChernResult {
    pub eps: f64,
    pub t: f64,
    pub value: [f64; 2],
    pub coarse: [f64; 2],
    pub error_estimate: f64,
    pub nodes: usize,
    pub fallback_nodes: usize,
    pub converged: bool,
}

impl ChernResult {
    pub fn re(&self) -> f64 {
        self.value[0]
    }
}

/// str(i^n γ¹⋯γⁿ) on S: the top supertrace at M₀ = 0 with unit ε, per spin-module copy.
pub fn berezin_normalization(fam: &DiracFamily) -> C64 {
    let ev = TopEvaluator {
        perms: permutations(fam.n()),
        grading: fam.spin.grading.clone(),
    };
    let ns: Vec<CMat> = fam.spin.gammas.iter().map(|g| g * I).collect();
    ev.eval(&CMat::zeros(fam.spin.dim_s, fam.spin.dim_s), &ns).0
}

fn chern_at_nodes(fam: &DiracFamily, eps: f64, t: f64, x: &[f64], nodes: usize) -> (C64, usize) {
    let n = fam.n();
    let pts = crate::linalg::gauss_hermite(nodes);
    let ev = TopEvaluator::new(fam);
    let d2 = &fam.d0 * &fam.d0;
    let base = &d2 * c(t, 0.0) + fam.moment(x);
    // T_a with raised index, so T(ξ) = Σ_a ξ_a Ta[a]
    let ta: Vec<CMat> = (0..n)
        .map(|a| {
            let mut e = vec![0.0; n];
            e[a] = 1.0;
            fam.t_of(&e)
        })
        .collect();
    let ns: Vec<CMat> = fam.g.iter().map(|g| g * (I * eps.sqrt())).collect();
    // a-priori bound: log-norm of M₀ is at most t·max spec D₀² + 2√(tε)|ξ|·‖T‖
    let d2_top = crate::linalg::herm_eigvals(&((&d2 + d2.adjoint()) * c(0.5, 0.0))).last().copied().unwrap_or(0.0);
    // ‖T(ξ)‖ ≤ |ξ|·‖Σ_a T_a†T_a‖^{1/2}
    let gram = ta.iter().fold(CMat::zeros(fam.total_dim, fam.total_dim), |acc, m| acc + m.adjoint() * m);
    let t_norm = crate::linalg::herm_eigvals(&gram).last().copied().unwrap_or(0.0).max(0.0).sqrt();
    let n_norm = ns.iter().map(crate::linalg::fro).fold(0.0, f64::max);
    let lead = (fam.total_dim as f64) * n_norm.powi(n as i32) * crate::linalg::fro(&fam.moment(x)).exp();
    let total = nodes.pow(n as u32);
    let contrib: Vec<(C64, bool)> = (0..total)
        .into_par_iter()
        .map(|code| {
            let mut cc = code;
            let mut u = vec![0.0; n];
            let mut w = 1.0;
            for ua in u.iter_mut() {
                let (p, wt) = pts[cc % nodes];
                cc /= nodes;
                *ua = p;
                w *= wt;
            }
            let xi: Vec<f64> = u.iter().map(|v| v / eps.sqrt()).collect();
            let xi_norm = fam.form.eval(&xi, &xi).sqrt();
            let bound = w * lead * (t * d2_top + 2.0 * (t * eps).sqrt() * xi_norm * t_norm).exp();
            if bound < NODE_BOUND {
                return (c(0.0, 0.0), false);
            }
            let mut m0 = base.clone();
            let s = 2.0 * (t * eps).sqrt();
            for a in 0..n {
                if xi[a] != 0.0 {
                    m0 += &ta[a] * c(0.0, s * xi[a]);
                }
            }
            let (v, fb) = ev.eval(&m0, &ns);
            (v * w, fb)
        })
        .collect();
    // ordered reduction for bit-stable sums
    let mut acc = c(0.0, 0.0);
    let mut fallbacks = 0;
    for (v, fb) in contrib {
        acc += v;
        fallbacks += fb as usize;
    }
    // the Gaussian e^{−ε|ξ|²} is the Hermite weight; dξ = du/ε^{n/2}
    (acc / eps.powf(n as f64 / 2.0), fallbacks)
}

/// ∫_{𝔤*} str(e^{A²}) normalized by π^{n/2}·str(i^n γ¹⋯γⁿ).
pub fn chern_integral(fam: &DiracFamily, eps: f64, t: f64, x: &[f64], opts: &ChernOptions) -> Result<ChernResult> {
    if eps <= 0.0 || t < 0.0 {
        return Err(Error::Domain("chern integral needs ε > 0 and t ≥ 0".into()));
    }
    if fam.n() > 3 {
        return Err(Error::Config(format!("tensor quadrature supports n ≤ 3, got n = {}", fam.n())));
    }
    let norm = berezin_normalization(fam) * std::f64::consts::PI.powf(fam.n() as f64 / 2.0);
    let (coarse, f1) = chern_at_nodes(fam, eps, t, x, opts.nodes);
    let (fine, f2) = chern_at_nodes(fam, eps, t, x, 2 * opts.nodes);
    let coarse = coarse / norm;
    let fine = fine / norm;
    let err = (fine - coarse).norm();
    Ok(ChernResult {
        eps,
        t,
        value: [fine.re, fine.im],
        coarse: [coarse.re, coarse.im],
        error_estimate: err,
        nodes: opts.nodes,
        fallback_nodes: f1 + f2,
        converged: err <= opts.tol * fine.norm().max(1.0),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PathReport {
    pub path: Vec<(f64, f64)>,
    pub values: Vec<ChernResult>,
    pub max_rel_deviation: f64,
    pub pass: bool,
}

/// Interpolate a polyline in the (ε, t)-plane with `per_segment` steps per edge.
pub fn refine_path(vertices: &[(f64, f64)], per_segment: usize) -> Vec<(f64, f64)> {
    let mut out = vec![vertices[0]];
    for w in vertices.windows(2) {
        for k in 1..=per_segment {
            let s = k as f64 / per_segment as f64;
            out.push((w[0].0 + s * (w[1].0 - w[0].0), w[0].1 + s * (w[1].1 - w[0].1)));
        }
    }
    out
}

pub fn deformation_path_scan(
    fam: &DiracFamily,
    path: &[(f64, f64)],
    x: &[f64],
    opts: &ChernOptions,
    tol: f64,
) -> Result<PathReport> {
    if path.first() != Some(&(1.0, 0.0)) {
        return Err(Error::Config("deformation path must start at (ε,t) = (1,0)".into()));
    }
    let mut values = Vec::new();
    for &(e, t) in path {
        let r = chern_integral(fam, e, t, x, opts)?;
        if !r.converged {
            return Err(Error::Convergence(format!("quadrature at (ε,t)=({e},{t}) error {:e}", r.error_estimate)));
        }
        values.push(r);
    }
    let mut dev: f64 = 0.0;
    for a in &values {
        for b in &values {
            let d = ((a.value[0] - b.value[0]).powi(2) + (a.value[1] - b.value[1]).powi(2)).sqrt();
            dev = dev.max(d / a.value[0].abs().max(1e-300));
        }
    }
    Ok(PathReport { path: path.to_vec(), values, max_rel_deviation: dev, pass: dev <= tol })
}

// ---------------------------------------------------------------------------
// oracles

/// Â(X) = Π_{α>0} q(i⟨α,x⟩) from the eigenvalues of ad X, valid for any X in a compact algebra.
pub fn a_hat_algebra(alg: &LieAlgebra, x: &[f64]) -> Result<f64> {
    let n = alg.dim;
    let ad = CMat::from_fn(n, n, |cc, b| c((0..n).map(|a| x[a] * alg.f(a, b, cc)).sum(), 0.0));
    let mut ev = eigvals(&ad);
    ev.sort_by(|a, b| b.im.total_cmp(&a.im));
    let npos = (n - alg.rank) / 2;
    let mut p = c(1.0, 0.0);
    for z in ev.iter().take(npos) {
        p *= a_hat_kernel(c(0.0, z.im))?;
    }
    Ok(p.re)
}

/// Tr_V e^{R(X)} for an arbitrary X.
pub fn trace_exp_full(generators: &[CMat], x: &[f64]) -> C64 {
    let d = generators[0].nrows();
    let mut m = CMat::zeros(d, d);
    for (g, &v) in generators.iter().zip(x) {
        m += g * c(v, 0.0);
    }
    expm(&m).trace()
}

/// ∫_{S_r} e^{i⟨ξ,X⟩} c·dA/r over the sphere of radius r in ℝ³.
pub fn orbital_sphere(radius: f64, x: &[f64], c_liouville: f64, nodes: usize) -> C64 {
    let gl = crate::linalg::gauss_legendre(nodes, -1.0, 1.0);
    let nphi = 2 * nodes;
    let mut acc = c(0.0, 0.0);
    for &(z, w) in &gl {
        let s = (1.0 - z * z).max(0.0).sqrt();
        let mut ring = c(0.0, 0.0);
        for k in 0..nphi {
            let phi = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / nphi as f64;
            let p = [s * phi.cos(), s * phi.sin(), z];
            let dot = radius * (p[0] * x[0] + p[1] * x[1] + p[2] * x[2]);
            ring += (I * dot).exp();
        }
        acc += ring * (w * 2.0 * std::f64::consts::PI / nphi as f64);
    }
    acc * (radius * radius * c_liouville / radius)
}

/// Fix the Liouville constant so that the λ = 0 orbit has volume Tr_{V_0}(1) = 1.
pub fn calibrate_liouville(datum: &RootDatum, nodes: usize) -> f64 {
    let r = crate::rootsys::to_f64(&datum.norm2(&datum.rho())).sqrt();
    1.0 / orbital_sphere(r, &[0.0, 0.0, 0.0], 1.0, nodes).re
}

/// Harish-Chandra closed form Σ_w sgn(w) e^{i⟨wν,x⟩} / Π_{α>0} i⟨α,x⟩ for the orbit through ν.
pub fn orbital_weyl(datum: &RootDatum, nu: &Weight, x_frame: &[f64]) -> Result<C64> {
    let dom = datum.weyl_orbit(nu).into_iter().find(|w| datum.dynkin_labels(w).iter().all(|l| *l >= num_rational::Ratio::from_integer(0))).unwrap();
    let pair = |w: &Weight| -> f64 { datum.frame_coords(w).iter().zip(x_frame).map(|(a, b)| a * b).sum() };
    let mut den = c(1.0, 0.0);
    for a in &datum.positive_roots {
        let p = pair(a);
        if p.abs() < 1e-12 {
            return Err(Error::Domain("x is singular for the closed form".into()));
        }
        den *= I * p;
    }
    let mut num = c(0.0, 0.0);
    for k in 0..datum.weyl_order() {
        num += (I * pair(&datum.apply(k, &dom))).exp() * datum.weyl_signs[k] as f64;
    }
    Ok(num / den)
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitalIntegral {
    pub sphere: Option<[f64; 2]>,
    pub weyl: Option<[f64; 2]>,
    pub value: [f64; 2],
}

/// Orbital integral over O_ν with both evaluators where available.
pub fn orbital_integral(alg: &CompactAlgebra, nu: &Weight, x: &[f64], nodes: usize) -> Result<OrbitalIntegral> {
    let d = &alg.datum;
    let r = crate::rootsys::to_f64(&d.norm2(nu)).sqrt();
    let n = alg.dim();
    let sphere = if n == 3 { Some(orbital_sphere(r, x, LIOUVILLE_C, nodes)) } else { None };
    // closed form needs x in the Cartan; in rank one any X is conjugate to |X|·t
    let x_frame: Option<Vec<f64>> = if n == 3 {
        Some(vec![(x.iter().map(|v| v * v).sum::<f64>()).sqrt()])
    } else if x.iter().enumerate().all(|(a, v)| alg.algebra.cartan.contains(&a) || *v == 0.0) {
        Some(alg.algebra.cartan.iter().map(|&a| x[a]).collect())
    } else {
        None
    };
    let weyl = x_frame.and_then(|xf| orbital_weyl(d, nu, &xf).ok());
    let value = weyl.or(sphere).ok_or_else(|| Error::Domain("no evaluator applies to this X".into()))?;
    let pack = |z: C64| [z.re, z.im];
    Ok(OrbitalIntegral { sphere: sphere.map(pack), weyl: weyl.map(pack), value: pack(value) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirac::CompactDirac;
    use crate::rootsys::GroupLabel;

    #[test]
    fn divided_differences() {
        let a = c(0.3, 0.2);
        assert!((exp_divided_difference(&[a, a]) - a.exp()).norm() < 1e-14);
        let b = c(2.5, -1.0);
        let want = (b.exp() - a.exp()) / (b - a);
        assert!((exp_divided_difference(&[a, b]) - want).norm() < 1e-13);
        let z = [c(0.1, 0.0), c(0.2, 0.1), c(-0.3, 0.05)];
        let direct = ((z[2].exp() - z[1].exp()) / (z[2] - z[1]) - (z[1].exp() - z[0].exp()) / (z[1] - z[0])) / (z[2] - z[0]);
        assert!((exp_divided_difference(&z) - direct).norm() < 1e-12);
        // confluent triple: e^a/2
        assert!((exp_divided_difference(&[a, a, a]) - a.exp() / 2.0).norm() < 1e-14);
    }

    #[test]
    fn wedge_is_associative_and_graded() {
        let s = |v: f64| CMat::identity(1, 1) * c(v, 0.0);
        let a = GradedForm::one_form(3, 0, s(1.0)).add(&GradedForm::scalar(3, s(2.0)));
        let b = GradedForm::one_form(3, 1, s(3.0)).add(&GradedForm::one_form(3, 2, s(-1.0)));
        let cc = GradedForm::one_form(3, 2, s(0.5)).add(&GradedForm::one_form(3, 0, s(4.0)));
        let l = a.wedge(&b).wedge(&cc);
        let r = a.wedge(&b.wedge(&cc));
        assert!(l.max_abs_diff(&r) < 1e-14);
        let x = GradedForm::one_form(3, 0, s(1.0));
        let y = GradedForm::one_form(3, 1, s(1.0));
        assert!(x.wedge(&y).add(&y.wedge(&x)).max_abs_diff(&GradedForm::zero(3, 1)) < 1e-15);
    }

    #[test]
    fn form_exp_small_cases() {
        let a = c(0.4, -0.2);
        let b = c(1.5, 0.3);
        let cp = CurvaturePoint { zero_form: CMat::identity(1, 1) * a, one_form: vec![CMat::identity(1, 1) * b] };
        let (gf, info) = form_exp(&cp);
        assert!(!info.fallback);
        assert!((gf.get(1)[(0, 0)] - a.exp() * b).norm() < 1e-14);
        assert!((gf.get(0)[(0, 0)] - a.exp()).norm() < 1e-14);
    }

    #[test]
    fn curvature_trivial_cases() {
        let alg = CompactAlgebra::new(GroupLabel::A1).unwrap();
        let cd = CompactDirac::new(alg, &Weight::zero(1)).unwrap();
        let cp = curvature(&cd.family, 1.0, 0.0, &[0.0; 3], &[0.0; 3]);
        assert!(max_abs(&cp.zero_form) == 0.0);
        let cp = curvature(&cd.family, 1.0, 0.0, &[0.0; 3], &[0.3, -0.2, 0.5]);
        assert!(max_abs(&(cp.zero_form + identity(2) * c(0.38, 0.0))) < 1e-15);
    }

    #[test]
    fn a_hat_algebra_matches_cartan() {
        let alg = CompactAlgebra::new(GroupLabel::A2).unwrap();
        let mut x = vec![0.0; 8];
        x[0] = 0.4;
        x[1] = -0.9;
        let a = a_hat_algebra(&alg.algebra, &x).unwrap();
        let b = alg.datum.a_hat(&[0.4, -0.9]).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn liouville_calibration() {
        let d = crate::rootsys::build_root_datum(GroupLabel::A1);
        let cl = calibrate_liouville(&d, 32);
        assert!((cl - LIOUVILLE_C).abs() < 1e-14);
        assert!((LIOUVILLE_C - 1.0 / (2.0 * 2f64.sqrt() * std::f64::consts::PI)).abs() < 1e-16);
    }

    #[test]
    fn chern_a1_fundamental_matches_index_value() {
        let alg = CompactAlgebra::new(GroupLabel::A1).unwrap();
        let w = alg.datum.fundamental(0);
        let cd = CompactDirac::new(alg, &w).unwrap();
        let x = [0.4, 0.2, -0.1];
        let r = chern_integral(&cd.family, 1.0, 0.0, &x, &ChernOptions::default()).unwrap();
        assert!(r.converged, "{r:?}");
        assert!((r.value[0] - 1.862_910_770_846_94).abs() < 1e-7, "{r:?}");
    }
}
