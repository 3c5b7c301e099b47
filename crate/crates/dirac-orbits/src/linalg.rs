//! Small dense complex linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};

pub type C64 = num_complex::Complex64;
pub type CMat = DMatrix<C64>;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(n: usize) -> CMat {
    CMat::zeros(n, n)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn comm(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn acomm(a: &CMat, b: &CMat) -> CMat {
    a * b + b * a
}

/// Frobenius norm; an upper bound for the operator norm.
pub fn fro(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(a: &CMat) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

pub fn real_to_complex(a: &DMatrix<f64>) -> CMat {
    a.map(|x| c(x, 0.0))
}

pub fn scale(a: &CMat, s: C64) -> CMat {
    a * s
}

/// Top-left `w × w` block.
pub fn window(a: &CMat, w: usize) -> CMat {
    a.view((0, 0), (w, w)).into_owned()
}

pub fn skew_residual(a: &CMat) -> f64 {
    max_abs(&(a + a.adjoint()))
}

pub fn herm_residual(a: &CMat) -> f64 {
    max_abs(&(a - a.adjoint()))
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
pub fn herm_eigen(h: &CMat) -> (Vec<f64>, CMat) {
    let n = h.nrows();
    if n == 0 {
        return (vec![], CMat::zeros(0, 0));
    }
    let sym = (h + h.adjoint()) * c(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vecs = CMat::zeros(n, n);
    for (j, &k) in order.iter().enumerate() {
        vecs.set_column(j, &eig.eigenvectors.column(k));
    }
    (vals, vecs)
}

pub fn herm_eigvals(h: &CMat) -> Vec<f64> {
    herm_eigen(h).0
}

pub fn real_sym_eigvals(h: &DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(h.clone()).eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

/// Eigenvalues of a general complex matrix via the complex Schur form.
pub fn eigvals(m: &CMat) -> Vec<C64> {
    if m.nrows() == 0 {
        return vec![];
    }
    let schur = Schur::new(m.clone());
    let (_, t) = schur.unpack();
    (0..t.nrows()).map(|k| t[(k, k)]).collect()
}

/// Diagonalization `m = P diag(λ) P⁻¹` with the condition number of `P`.
pub struct EigenDecomp {
    pub values: Vec<C64>,
    pub p: CMat,
    pub p_inv: CMat,
    pub cond: f64,
}

pub fn eigen_decomp(m: &CMat) -> Option<EigenDecomp> {
    let n = m.nrows();
    let scale_m = max_abs(m).max(1e-300);
    let (q, t) = Schur::new(m.clone()).unpack();
    let values: Vec<C64> = (0..n).map(|k| t[(k, k)]).collect();
    let mut y = CMat::zeros(n, n);
    for k in 0..n {
        y[(k, k)] = c(1.0, 0.0);
        for j in (0..k).rev() {
            let mut s = c(0.0, 0.0);
            for l in (j + 1)..=k {
                s += t[(j, l)] * y[(l, k)];
            }
            let mut den = t[(j, j)] - values[k];
            if den.norm() < 1e-14 * scale_m {
                den = c(1e-14 * scale_m, 0.0);
            }
            y[(j, k)] = -s / den;
        }
        let nrm = y.column(k).norm();
        y.column_mut(k).scale_mut(1.0 / nrm);
    }
    let p = &q * &y;
    let p_inv = p.clone().try_inverse()?;
    let cond = fro(&p) * fro(&p_inv);
    if !cond.is_finite() {
        return None;
    }
    Some(EigenDecomp { values, p, p_inv, cond })
}

pub fn expm(m: &CMat) -> CMat {
    m.clone().exp()
}

pub fn trace(m: &CMat) -> C64 {
    m.trace()
}

pub fn cvec(v: &[C64]) -> DVector<C64> {
    DVector::from_column_slice(v)
}

/// Gauss–Hermite nodes and weights for the weight e^{−x²}.
///
/// Eigenvalue-based weights lose relative accuracy at the outer nodes, so the
/// nodes are Newton-polished and the weights recomputed from the Christoffel
/// sum 1/Σ_k p_k(x)² over orthonormal Hermite polynomials.
pub fn gauss_hermite(n: usize) -> Vec<(f64, f64)> {
    let nz = std::num::NonZeroUsize::new(n).expect("at least one node");
    let orth = |x: f64| -> (f64, f64, f64) {
        // (p_n(x), p_n'(x), Σ_{k<n} p_k(x)²)
        let mut p0 = 0.0;
        let mut p1 = std::f64::consts::PI.powf(-0.25);
        let mut sum = 0.0;
        for k in 0..n {
            sum += p1 * p1;
            let p2 = x * (2.0 / (k as f64 + 1.0)).sqrt() * p1 - (k as f64 / (k as f64 + 1.0)).sqrt() * p0;
            p0 = p1;
            p1 = p2;
        }
        (p1, (2.0 * n as f64).sqrt() * p0, sum)
    };
    gauss_quad::GaussHermite::new(nz)
        .as_node_weight_pairs()
        .iter()
        .map(|&(x0, _)| {
            let mut x = x0;
            for _ in 0..3 {
                let (p, dp, _) = orth(x);
                x -= p / dp;
            }
            (x, 1.0 / orth(x).2)
        })
        .collect()
}

/// Gauss–Legendre nodes and weights mapped to [a, b].
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let n = std::num::NonZeroUsize::new(n).expect("at least one node");
    let h = 0.5 * (b - a);
    gauss_quad::GaussLegendre::new(n)
        .as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| (a + h * (x + 1.0), w * h))
        .collect()
}

#[cfg(test)]
mod quadrature_tests {
    use super::*;

    #[test]
    fn hermite_moments_and_tail_weights() {
        let pts = gauss_hermite(80);
        let m0: f64 = pts.iter().map(|p| p.1).sum();
        let m2: f64 = pts.iter().map(|p| p.1 * p.0 * p.0).sum();
        assert!((m0 - std::f64::consts::PI.sqrt()).abs() < 1e-13);
        assert!((m2 - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-13);
        // outer weight tracks e^{−x²} in relative terms
        let (x, w) = pts.iter().copied().fold((0.0, 0.0), |a, p| if p.0 > a.0 { p } else { a });
        assert!(w > 0.0 && (w.ln() + x * x).abs() < 10.0);
    }
}
