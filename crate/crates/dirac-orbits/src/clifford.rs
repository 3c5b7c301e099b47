//! Complex Clifford algebras on 𝔤*, their spin modules and the spin lift σ of 𝔤.
//!
//! Gammas satisfy γ(ξ)γ(η) + γ(η)γ(ξ) = 2⟨ξ,η⟩. They are realized as linear
//! combinations of Jordan–Wigner Euclidean generators Γ_k, so modules built on
//! different forms over the same dimension share one underlying space.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::linalg::{acomm, c, comm, herm_eigen, identity, kron, max_abs, CMat, C64, I};
use crate::repbuild::LieAlgebra;
use crate::{Error, Result};

const SIGNATURE_TOL: f64 = 1e-10;

/// Symmetric bilinear form on 𝔤* in the dual of the algebra basis.
#[derive(Clone, Debug, Serialize)]
pub struct BilinearForm {
    pub matrix: Vec<Vec<f64>>,
    pub signature: (usize, usize),
}

impl BilinearForm {
    pub fn new(m: &DMatrix<f64>) -> Result<Self> {
        let n = m.nrows();
        if m.ncols() != n {
            return Err(Error::Dimension { expected: n, got: m.ncols() });
        }
        for i in 0..n {
            for j in 0..n {
                if m[(i, j)] != m[(j, i)] {
                    return Err(Error::Domain("bilinear form is not symmetric".into()));
                }
            }
        }
        let ev = SymmetricEigen::new(m.clone()).eigenvalues;
        let p = ev.iter().filter(|&&x| x > SIGNATURE_TOL).count();
        let q = ev.iter().filter(|&&x| x < -SIGNATURE_TOL).count();
        Ok(BilinearForm { matrix: (0..n).map(|i| (0..n).map(|j| m[(i, j)]).collect()).collect(), signature: (p, q) })
    }

    pub fn euclidean(n: usize) -> Self {
        Self::new(&DMatrix::identity(n, n)).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| self.matrix[i][j])
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.signature.0 + self.signature.1 == self.dim()
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut s = 0.0;
        for (i, row) in self.matrix.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                s += x[i] * v * y[j];
            }
        }
        s
    }

    /// ξ ↦ ξ_*: raise a covector to a vector in 𝔤 (the form is on 𝔤*).
    pub fn raise(&self, xi: &[f64]) -> Vec<f64> {
        self.matrix.iter().map(|row| row.iter().zip(xi).map(|(a, b)| a * b).sum()).collect()
    }

    /// Y ↦ Y^*: lower a vector of 𝔤 with the inverse form.
    pub fn lower(&self, y: &[f64]) -> Vec<f64> {
        let inv = self.to_matrix().try_inverse().expect("nondegenerate form");
        (0..self.dim()).map(|i| (0..self.dim()).map(|j| inv[(i, j)] * y[j]).sum()).collect()
    }
}

/// Sign-flipped metric: the invariant form with the sign reversed on 𝔨.
///
/// For a compact algebra the stored invariant form is already positive and is returned as is.
pub fn flipped_metric(alg: &LieAlgebra) -> BilinearForm {
    let mut m = alg.form.clone().try_inverse().expect("invariant form is nondegenerate");
    if !alg.noncompact.is_empty() {
        for &k in &alg.compact {
            for j in 0..alg.dim {
                m[(k, j)] = -m[(k, j)];
                if j != k {
                    m[(j, k)] = -m[(j, k)];
                }
            }
        }
    }
    BilinearForm::new(&m).unwrap()
}

/// The invariant form of the algebra, transported to 𝔤*.
pub fn invariant_dual_form(alg: &LieAlgebra) -> BilinearForm {
    let m = alg.form.clone().try_inverse().expect("invariant form is nondegenerate");
    BilinearForm::new(&m.map(|x| if x.abs() < 1e-15 { 0.0 } else { x })).unwrap()
}

fn pauli() -> [CMat; 4] {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    [
        CMat::from_row_slice(2, 2, &[o, z, z, o]),
        CMat::from_row_slice(2, 2, &[z, o, o, z]),
        CMat::from_row_slice(2, 2, &[z, -I, I, z]),
        CMat::from_row_slice(2, 2, &[o, z, z, -o]),
    ]
}

/// Euclidean generators Γ_0..Γ_{n-1} on (ℂ²)^{⊗⌊n/2⌋}.
pub fn jordan_wigner(n: usize) -> Vec<CMat> {
    let m = n / 2;
    let [id, sx, sy, sz] = pauli();
    let chain = |k: usize, mid: &CMat| -> CMat {
        let mut out = identity(1);
        for j in 0..m {
            let f = if j < k {
                &sz
            } else if j == k {
                mid
            } else {
                &id
            };
            out = kron(&out, f);
        }
        out
    };
    let mut g = Vec::with_capacity(n);
    for k in 0..m {
        g.push(chain(k, &sx));
        g.push(chain(k, &sy));
    }
    if n % 2 == 1 {
        // the extra generator is σz^{⊗m}
        let mut last = identity(1);
        for _ in 0..m {
            last = kron(&last, &sz);
        }
        g.push(last);
    }
    g
}

/// Gammas for a form on 𝔤*, built from the shared Euclidean generators.
fn gammas_for(form: &BilinearForm, euclid: &[CMat]) -> Result<Vec<CMat>> {
    if !form.is_nondegenerate() {
        return Err(Error::Domain("degenerate bilinear form".into()));
    }
    let n = form.dim();
    let m = form.to_matrix();
    let scale = |d: f64| -> C64 {
        if d > 0.0 {
            c(d.sqrt(), 0.0)
        } else {
            c(0.0, (-d).sqrt())
        }
    };
    let diagonal = (0..n).all(|i| (0..n).all(|j| i == j || m[(i, j)] == 0.0));
    if diagonal {
        return Ok((0..n).map(|a| &euclid[a] * scale(m[(a, a)])).collect());
    }
    let eig = SymmetricEigen::new(m);
    Ok((0..n)
        .map(|a| {
            let mut g = CMat::zeros(euclid[0].nrows(), euclid[0].ncols());
            for k in 0..n {
                g += &euclid[k] * (scale(eig.eigenvalues[k]) * eig.eigenvectors[(a, k)]);
            }
            g
        })
        .collect())
}

/// Irreducible Clifford module with the spin lift of the algebra.
#[derive(Clone, Debug)]
pub struct SpinModule {
    pub n: usize,
    pub dim_s: usize,
    pub form: BilinearForm,
    /// γ(e^a) for the dual basis.
    pub gammas: Vec<CMat>,
    /// Grading for even n; the identity for odd n (see `graded`).
    pub grading: CMat,
    pub graded: bool,
    /// σ_a, the spin lift of the basis element e_a.
    pub sigma: Vec<CMat>,
}

/// i^{n(n-1)/2} γ¹⋯γⁿ on Euclidean generators; ±1-valued.
fn chirality(euclid: &[CMat]) -> CMat {
    let n = euclid.len();
    let mut p = identity(euclid[0].nrows());
    for g in euclid {
        p *= g;
    }
    let ph = I.powu(((n * (n.saturating_sub(1))) / 2) as u32);
    p * ph
}

pub fn build_spin_module(form: &BilinearForm, alg: &LieAlgebra) -> Result<SpinModule> {
    let n = form.dim();
    if n != alg.dim {
        return Err(Error::Dimension { expected: alg.dim, got: n });
    }
    let mut euclid = jordan_wigner(n);
    let dim_s = euclid[0].nrows();
    let chi = chirality(&euclid);
    if n % 2 == 1 && (chi[(0, 0)] - c(1.0, 0.0)).norm() > 1e-12 {
        let last = euclid.last_mut().unwrap();
        *last = -last.clone();
    }
    let gammas = gammas_for(form, &euclid)?;
    let inv = invariant_dual_form(alg);
    let inv_gammas = gammas_for(&inv, &euclid)?;
    let mut sigma = Vec::with_capacity(n);
    for a in 0..n {
        let mut s = CMat::zeros(dim_s, dim_s);
        for b in 0..n {
            for cc in 0..n {
                let f = alg.f_lowered(a, b, cc);
                if f != 0.0 {
                    s += &inv_gammas[b] * &inv_gammas[cc] * c(-0.25 * f, 0.0);
                }
            }
        }
        sigma.push(s);
    }
    let (grading, graded) = if n % 2 == 0 {
        let chi = chirality(&euclid);
        (chi.map(|z| c(z.re.round(), 0.0)), true)
    } else {
        (identity(dim_s), false)
    };
    Ok(SpinModule { n, dim_s, form: form.clone(), gammas, grading, graded, sigma })
}

impl SpinModule {
    /// γ(ξ) for a covector ξ.
    pub fn gamma(&self, xi: &[f64]) -> CMat {
        let mut g = CMat::zeros(self.dim_s, self.dim_s);
        for (a, &x) in xi.iter().enumerate() {
            if x != 0.0 {
                g += &self.gammas[a] * c(x, 0.0);
            }
        }
        g
    }

    /// σ(X) for X = Σ x^a e_a.
    pub fn sigma_of(&self, x: &[f64]) -> CMat {
        let mut s = CMat::zeros(self.dim_s, self.dim_s);
        for (a, &v) in x.iter().enumerate() {
            if v != 0.0 {
                s += &self.sigma[a] * c(v, 0.0);
            }
        }
        s
    }

    /// Supertrace; the plain trace on an ungraded (odd n) module.
    pub fn supertrace(&self, m: &CMat) -> C64 {
        (&self.grading * m).trace()
    }

    /// Graded module for odd n: γ⊗σx, σ⊗1 with grading 1⊗σz. Even-n modules are returned unchanged.
    pub fn doubled(&self) -> SpinModule {
        if self.graded {
            return self.clone();
        }
        let [id, sx, _, sz] = pauli();
        SpinModule {
            n: self.n,
            dim_s: 2 * self.dim_s,
            form: self.form.clone(),
            gammas: self.gammas.iter().map(|g| kron(g, &sx)).collect(),
            grading: kron(&identity(self.dim_s), &sz),
            graded: true,
            sigma: self.sigma.iter().map(|s| kron(s, &id)).collect(),
        }
    }

    pub fn clifford_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..self.n {
            for b in 0..self.n {
                let want = identity(self.dim_s) * c(2.0 * self.form.matrix[a][b], 0.0);
                worst = worst.max(max_abs(&(acomm(&self.gammas[a], &self.gammas[b]) - want)));
            }
        }
        worst
    }

    /// Max of ‖{grading, γ_a}‖ and ‖[grading, σ_a]‖; only meaningful for graded modules.
    pub fn grading_residual(&self) -> f64 {
        let a = self.gammas.iter().map(|g| max_abs(&acomm(&self.grading, g))).fold(0.0, f64::max);
        let b = self.sigma.iter().map(|s| max_abs(&comm(&self.grading, s))).fold(0.0, f64::max);
        a.max(b)
    }

    /// Max over a, d of ‖[σ_a, γ(e^d)] − γ(ad*_{e_a} e^d)‖.
    pub fn equivariance_residual(&self, alg: &LieAlgebra) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for d in 0..n {
                // (ad*_a e^d)_e = −f_{ae}^d
                let co: Vec<f64> = (0..n).map(|e| -alg.f(a, e, d)).collect();
                let r = comm(&self.sigma[a], &self.gammas[d]) - self.gamma(&co);
                worst = worst.max(max_abs(&r));
            }
        }
        worst
    }

    pub fn sigma_bracket_residual(&self, alg: &LieAlgebra) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                let f: Vec<f64> = (0..n).map(|cc| alg.f(a, b, cc)).collect();
                worst = worst.max(max_abs(&(comm(&self.sigma[a], &self.sigma[b]) - self.sigma_of(&f))));
            }
        }
        worst
    }

    /// str(γ¹⋯γⁿ), the Berezin-type element.
    pub fn berezin(&self) -> C64 {
        let mut p = identity(self.dim_s);
        for g in &self.gammas {
            p *= g;
        }
        self.supertrace(&p)
    }
}

/// Joint σ-eigenline of prescribed Cartan weight, with its root-annihilation residual.
#[derive(Clone, Debug)]
pub struct SpinLine {
    /// Orthonormal columns spanning the line(s).
    pub basis: CMat,
    pub weight_residual: f64,
    pub annihilation_residual: f64,
}

/// Weight space of S for the given Cartan frame coordinates (σ(t_k) = i·y_k),
/// checked against annihilation by the root gammas γ(u^α) ± iγ(v^α).
pub fn lowest_spin_line(sm: &SpinModule, alg: &LieAlgebra, y: &[f64]) -> Result<SpinLine> {
    if alg.cartan.len() != y.len() || alg.root_pairs.iter().any(|&(u, v)| u >= sm.n || v >= sm.n) {
        return Err(Error::Config("basis ordering is not root-adapted".into()));
    }
    let d = sm.dim_s;
    let mut h = CMat::zeros(d, d);
    for (k, &t) in alg.cartan.iter().enumerate() {
        let a = &sm.sigma[t] - identity(d) * (I * y[k]);
        h += a.adjoint() * &a;
    }
    let (vals, vecs) = herm_eigen(&h);
    let keep: Vec<usize> = (0..d).filter(|&k| vals[k] < 1e-10).collect();
    if keep.is_empty() {
        return Err(Error::Domain("no spin vector of the requested weight".into()));
    }
    let mut basis = CMat::zeros(d, keep.len());
    for (j, &k) in keep.iter().enumerate() {
        basis.set_column(j, &vecs.column(k));
    }
    let mut weight_residual: f64 = 0.0;
    for (k, &t) in alg.cartan.iter().enumerate() {
        let r = &sm.sigma[t] * &basis - &basis * (I * y[k]);
        weight_residual = weight_residual.max(max_abs(&r));
    }
    // each root contributes whichever of the two null combinations kills the line
    let mut annihilation_residual: f64 = 0.0;
    for &(u, v) in &alg.root_pairs {
        let plus = (&sm.gammas[u] + &sm.gammas[v] * I) * &basis;
        let minus = (&sm.gammas[u] - &sm.gammas[v] * I) * &basis;
        annihilation_residual = annihilation_residual.max(max_abs(&plus).min(max_abs(&minus)));
    }
    Ok(SpinLine { basis, weight_residual, annihilation_residual })
}

#[derive(Serialize)]
pub struct GammaBundle {
    pub n: usize,
    pub dim_s: usize,
    pub gammas: Vec<Vec<[f64; 2]>>,
}

impl GammaBundle {
    pub fn new(sm: &SpinModule) -> Self {
        let flat = |m: &CMat| {
            let mut v = Vec::new();
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    v.push([m[(i, j)].re, m[(i, j)].im]);
                }
            }
            v
        };
        GammaBundle { n: sm.n, dim_s: sm.dim_s, gammas: sm.gammas.iter().map(flat).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repbuild::CompactAlgebra;
    use crate::rootsys::GroupLabel;

    #[test]
    fn jordan_wigner_relations() {
        for n in 1..=8 {
            let g = jordan_wigner(n);
            assert_eq!(g.len(), n);
            assert_eq!(g[0].nrows(), 1 << (n / 2));
            for a in 0..n {
                for b in 0..n {
                    let want = if a == b { 2.0 } else { 0.0 };
                    let r = acomm(&g[a], &g[b]) - identity(g[0].nrows()) * c(want, 0.0);
                    assert!(max_abs(&r) < 1e-14);
                }
            }
        }
    }

    #[test]
    fn su2_spin_module() {
        let alg = CompactAlgebra::new(GroupLabel::A1).unwrap();
        let sm = build_spin_module(&BilinearForm::euclidean(3), &alg.algebra).unwrap();
        assert_eq!(sm.dim_s, 2);
        assert!(sm.clifford_residual() < 1e-12);
        assert!(sm.equivariance_residual(&alg.algebra) < 1e-12);
        assert!(sm.sigma_bracket_residual(&alg.algebra) < 1e-12);
        // σ(t) has weights ±ρ, frame coordinate ±1/√2
        let mut ev: Vec<f64> = crate::linalg::eigvals(&sm.sigma[0]).iter().map(|z| z.im).collect();
        ev.sort_by(f64::total_cmp);
        assert!((ev[0] + 0.5f64.sqrt()).abs() < 1e-12 && (ev[1] - 0.5f64.sqrt()).abs() < 1e-12);
        let line = lowest_spin_line(&sm, &alg.algebra, &[-(0.5f64.sqrt())]).unwrap();
        assert_eq!(line.basis.ncols(), 1);
        assert!(line.annihilation_residual < 1e-12);
    }

    #[test]
    fn doubled_module_is_graded() {
        let alg = CompactAlgebra::new(GroupLabel::A1).unwrap();
        let sm = build_spin_module(&BilinearForm::euclidean(3), &alg.algebra).unwrap().doubled();
        assert!(sm.graded);
        assert!(sm.grading_residual() < 1e-14);
        assert!(sm.clifford_residual() < 1e-12);
    }

    #[test]
    fn even_rank_modules() {
        for l in [GroupLabel::A1xA1, GroupLabel::A2, GroupLabel::B2] {
            let alg = CompactAlgebra::new(l).unwrap();
            let n = alg.dim();
            let sm = build_spin_module(&BilinearForm::euclidean(n), &alg.algebra).unwrap();
            assert_eq!(sm.dim_s, 1 << (n / 2));
            assert!(sm.clifford_residual() < 1e-12);
            assert!(sm.grading_residual() < 1e-12, "{l}");
            assert!(sm.equivariance_residual(&alg.algebra) < 1e-10, "{l}");
            assert!(sm.sigma_bracket_residual(&alg.algebra) < 1e-10, "{l}");
            assert!(sm.supertrace(&identity(sm.dim_s)).norm() < 1e-12);
            let rho = alg.datum.frame_coords(&alg.datum.rho().scale(crate::rootsys::Q::from_integer(-1)));
            let line = lowest_spin_line(&sm, &alg.algebra, &rho).unwrap();
            // multiplicity of the extremal weight is 2^{⌊n/2⌋ − |Δ⁺|}
            assert_eq!(line.basis.ncols(), sm.dim_s >> alg.datum.positive_roots.len(), "{l}");
            assert!(line.annihilation_residual < 1e-12, "{l}");
        }
    }
}
