//! Kostant's cubic Dirac operator and the family D_μ on V⊗S.
//!
//! Convention: D_μ = Σ_a (R_a + σ_a/3)⊗γ^a − i·1⊗γ(μ). With anti-Hermitian R, σ
//! and Hermitian γ this is skew-adjoint, so i·D_μ is Hermitian, D_μ² ≤ 0 and
//! D₀² = −(⟨λ,λ+2ρ⟩ + |ρ|²) on V_λ⊗S.

use rayon::prelude::*;
use serde::Serialize;

use crate::clifford::{build_spin_module, lowest_spin_line, BilinearForm, SpinModule};
use crate::linalg::{c, comm, acomm, herm_eigen, identity, kron, max_abs, CMat, I};
use crate::repbuild::{CompactAlgebra, Irrep, LieAlgebra};
use crate::rootsys::{Weight, Q};
use crate::{Error, Result};

pub const DEFAULT_KERNEL_REL_TOL: f64 = 1e-7;

/// The Dirac family over a fixed representation and spin module.
#[derive(Clone, Debug)]
pub struct DiracFamily {
    pub alg: LieAlgebra,
    pub spin: SpinModule,
    pub form: BilinearForm,
    pub dim_v: usize,
    pub total_dim: usize,
    /// R_a ⊗ 1
    pub r: Vec<CMat>,
    /// 1 ⊗ σ_a
    pub s: Vec<CMat>,
    /// 1 ⊗ γ^a
    pub g: Vec<CMat>,
    pub d0: CMat,
    pub kernel_rel_tol: f64,
}

impl DiracFamily {
    pub fn new(generators: &[CMat], spin: SpinModule, alg: &LieAlgebra) -> Result<Self> {
        if generators.len() != alg.dim || spin.n != alg.dim {
            return Err(Error::Dimension { expected: alg.dim, got: generators.len().min(spin.n) });
        }
        let dim_v = generators[0].nrows();
        let iv = identity(dim_v);
        let is = identity(spin.dim_s);
        let r: Vec<CMat> = generators.iter().map(|m| kron(m, &is)).collect();
        let s: Vec<CMat> = spin.sigma.iter().map(|m| kron(&iv, m)).collect();
        let g: Vec<CMat> = spin.gammas.iter().map(|m| kron(&iv, m)).collect();
        let total = dim_v * spin.dim_s;
        let mut d0 = CMat::zeros(total, total);
        for a in 0..alg.dim {
            d0 += (&r[a] + &s[a] * c(1.0 / 3.0, 0.0)) * &g[a];
        }
        Ok(DiracFamily {
            alg: alg.clone(),
            form: spin.form.clone(),
            spin,
            dim_v,
            total_dim: total,
            r,
            s,
            g,
            d0,
            kernel_rel_tol: DEFAULT_KERNEL_REL_TOL,
        })
    }

    /// Family on V_λ⊗S for a compact algebra with the positive invariant form.
    pub fn compact(alg: &CompactAlgebra, irrep: &Irrep) -> Result<Self> {
        let form = BilinearForm::euclidean(alg.dim());
        let spin = build_spin_module(&form, &alg.algebra)?;
        Self::new(&irrep.generators, spin, &alg.algebra)
    }

    pub fn n(&self) -> usize {
        self.alg.dim
    }

    pub fn cubic_dirac(&self) -> &CMat {
        &self.d0
    }

    pub fn gamma(&self, xi: &[f64]) -> CMat {
        lin(&self.g, xi, self.total_dim)
    }

    /// T(μ) = μ_*^a (R_a + σ_a).
    pub fn t_of(&self, mu: &[f64]) -> CMat {
        let up = self.form.raise(mu);
        let mut m = lin(&self.r, &up, self.total_dim);
        m += lin(&self.s, &up, self.total_dim);
        m
    }

    /// R(X) + σ(X) on V⊗S.
    pub fn moment(&self, x: &[f64]) -> CMat {
        lin(&self.r, x, self.total_dim) + lin(&self.s, x, self.total_dim)
    }

    pub fn dirac_at(&self, mu: &[f64]) -> CMat {
        &self.d0 - self.gamma(mu) * I
    }

    /// D₀² − 2iT(μ) − |μ|².
    pub fn dsquared_closed_form(&self, mu: &[f64]) -> CMat {
        let d2 = &self.d0 * &self.d0;
        d2 - self.t_of(mu) * c(0.0, 2.0) - identity(self.total_dim) * c(self.form.eval(mu, mu), 0.0)
    }

    /// π(Y) = Y^a(R_a + σ_a − iμ_a).
    pub fn pi(&self, y: &[f64], mu: &[f64]) -> CMat {
        let scalar: f64 = y.iter().zip(mu).map(|(a, b)| a * b).sum();
        self.moment(y) - identity(self.total_dim) * (I * scalar)
    }

    pub fn check_commutators(&self, mu: &[f64], xi: &[f64]) -> CommutatorReport {
        let d = self.dirac_at(mu);
        let gx = self.gamma(xi);
        let xs = self.form.raise(xi);
        let anti = max_abs(&(acomm(&d, &gx) - self.pi(&xs, mu) * c(2.0, 0.0)));
        // [D_μ, π(Y)] = −iγ([μ_*, Y]^*)
        let mus = self.form.raise(mu);
        let br = self.alg.bracket(&mus, &xs);
        let rhs = self.gamma(&self.form.lower(&br)) * (-I);
        let pi_res = max_abs(&(comm(&d, &self.pi(&xs, mu)) - rhs));
        let d2 = &self.d0 * &self.d0;
        let central = max_abs(&comm(&d2, &self.pi(&xs, &vec![0.0; self.n()]))).max(max_abs(&comm(&d2, &gx)));
        CommutatorReport { anticommutator: anti, pi_commutator: pi_res, d0_square_central: central }
    }

    /// Eigenvalues (ascending) of the Hermitian i·D_μ.
    pub fn spectrum(&self, mu: &[f64]) -> Vec<f64> {
        herm_eigen(&(self.dirac_at(mu) * I)).0
    }

    /// min |spec D_μ²| and the kernel dimension at μ.
    pub fn gap_and_kernel(&self, mu: &[f64]) -> (f64, usize) {
        gap_and_kernel_from(&self.spectrum(mu), self.kernel_rel_tol)
    }

    pub fn kernel_locus_scan(&self, ray: &[f64], radii: &[f64]) -> Vec<ScanRow> {
        let nrm = self.form.eval(ray, ray).sqrt();
        let unit: Vec<f64> = ray.iter().map(|x| x / nrm).collect();
        radii
            .par_iter()
            .map(|&r| {
                let mu: Vec<f64> = unit.iter().map(|x| x * r).collect();
                let (gap, ker) = self.gap_and_kernel(&mu);
                ScanRow { radius: r, mu, min_abs_spec: gap, ker_dim: ker }
            })
            .collect()
    }

    /// F_μ = D_μ(1 − D_μ²)^{−1/2}, after certifying D_μ² ≤ 0.
    pub fn fredholm_normalize(&self, mu: &[f64]) -> Result<CMat> {
        let d = self.dirac_at(mu);
        let d2 = &d * &d;
        let herm = (&d2 + d2.adjoint()) * c(0.5, 0.0);
        let top = *herm_eigen(&herm).0.last().unwrap();
        let scale = max_abs(&d2).max(1.0);
        if top > 1e-10 * scale {
            return Err(Error::SpectralConvention(format!("D_μ² has positive eigenvalue {top:e}")));
        }
        let (vals, vecs) = herm_eigen(&(d * I));
        let n = vals.len();
        let mut diag = CMat::zeros(n, n);
        for (k, &e) in vals.iter().enumerate() {
            diag[(k, k)] = c(e / (1.0 + e * e).sqrt(), 0.0);
        }
        Ok(&vecs * diag * vecs.adjoint() * (-I))
    }
}

/// D_μ² = −(iD_μ)², so its spectrum is {−e²}.
pub fn gap_and_kernel_from(ev_id: &[f64], rel_tol: f64) -> (f64, usize) {
    let sq: Vec<f64> = ev_id.iter().map(|e| e * e).collect();
    let top = sq.iter().cloned().fold(0.0, f64::max).max(1.0);
    let gap = sq.iter().cloned().fold(f64::INFINITY, f64::min);
    (gap, sq.iter().filter(|&&s| s <= rel_tol * top).count())
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

#[derive(Clone, Debug, Serialize)]
pub struct CommutatorReport {
    pub anticommutator: f64,
    pub pi_commutator: f64,
    pub d0_square_central: f64,
}

impl CommutatorReport {
    pub fn max(&self) -> f64 {
        self.anticommutator.max(self.pi_commutator).max(self.d0_square_central)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanRow {
    pub radius: f64,
    pub mu: Vec<f64>,
    pub min_abs_spec: f64,
    pub ker_dim: usize,
}

/// Compact-group helpers tied to a highest weight λ.
pub struct CompactDirac {
    pub alg: CompactAlgebra,
    pub irrep: Irrep,
    pub family: DiracFamily,
}

impl CompactDirac {
    pub fn new(alg: CompactAlgebra, lambda: &Weight) -> Result<Self> {
        let irrep = alg.irrep(lambda)?;
        let family = DiracFamily::compact(&alg, &irrep)?;
        Ok(CompactDirac { alg, irrep, family })
    }

    pub fn lambda(&self) -> &Weight {
        &self.irrep.highest_weight
    }

    /// |λ+ρ|² = ⟨λ,λ+2ρ⟩ + |ρ|².
    pub fn lambda_rho_sq(&self) -> f64 {
        let d = &self.alg.datum;
        num_traits::ToPrimitive::to_f64(&d.norm2(&(self.lambda() + &d.rho()))).unwrap()
    }

    pub fn scalar_square_residual(&self) -> f64 {
        let d2 = &self.family.d0 * &self.family.d0;
        max_abs(&(d2 + identity(self.family.total_dim) * c(self.lambda_rho_sq(), 0.0)))
    }

    /// Weight of the lowest line: w₀λ − ρ.
    pub fn lowest_line_weight(&self) -> Weight {
        let d = &self.alg.datum;
        &d.apply(d.longest_element(), self.lambda()) - &d.rho()
    }

    /// Covector of μ on the orbit through the lowest line (the kernel point).
    pub fn orbit_point(&self) -> Vec<f64> {
        self.alg.weight_covector(&self.lowest_line_weight())
    }

    /// The vector v_{w₀λ} ⊗ s_{−ρ} in V⊗S.
    pub fn lowest_line(&self) -> Result<nalgebra::DVector<crate::C64>> {
        let d = &self.alg.datum;
        let y = d.frame_coords(&d.rho().scale(Q::from_integer(-1)));
        let line = lowest_spin_line(&self.family.spin, &self.alg.algebra, &y)?;
        let k = self.irrep.lowest_weight_index(d);
        let mut ev = nalgebra::DVector::zeros(self.irrep.dim);
        ev[k] = c(1.0, 0.0);
        Ok(ev.kronecker(&line.basis.column(0).into_owned()))
    }

    /// Residual of D_μ² v = −|μ − ν_low|² v on the lowest line.
    pub fn restriction_residual(&self, mu: &[f64]) -> Result<f64> {
        let v = self.lowest_line()?;
        let d = self.family.dirac_at(mu);
        let nu = self.orbit_point();
        let dist: f64 = mu.iter().zip(&nu).map(|(a, b)| (a - b) * (a - b)).sum();
        let w = &d * (&d * &v) + &v * c(dist, 0.0);
        Ok(w.iter().map(|z| z.norm()).fold(0.0, f64::max))
    }

    /// Kernel dimension at every Weyl conjugate of the kernel point.
    pub fn orbit_kernel_dims(&self) -> Vec<usize> {
        let d = &self.alg.datum;
        let nu = self.lowest_line_weight();
        d.weyl_orbit(&nu).iter().map(|w| self.family.gap_and_kernel(&self.alg.weight_covector(w)).1).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::GroupLabel;

    fn a1(l: i64) -> CompactDirac {
        let alg = CompactAlgebra::new(GroupLabel::A1).unwrap();
        let lam = alg.datum.from_dynkin(&[l]).unwrap();
        CompactDirac::new(alg, &lam).unwrap()
    }

    #[test]
    fn scalar_squares() {
        let f0 = a1(0);
        assert!((f0.lambda_rho_sq() - 0.5).abs() < 1e-15);
        assert!(f0.scalar_square_residual() < 1e-12);
        let f1 = a1(1);
        assert!((f1.lambda_rho_sq() - 2.0).abs() < 1e-15);
        assert!(f1.scalar_square_residual() < 1e-12);
    }

    #[test]
    fn oddness_on_doubled_module() {
        let f = a1(1);
        let ds = f.family.spin.doubled();
        let fam = DiracFamily::new(&f.irrep.generators, ds, &f.alg.algebra).unwrap();
        let gr = kron(&identity(fam.dim_v), &fam.spin.grading);
        assert!(max_abs(&acomm(&gr, &fam.d0)) < 1e-12);
        assert!(crate::linalg::skew_residual(&fam.d0) < 1e-12);
    }

    #[test]
    fn kernel_at_orbit_point() {
        let f = a1(1);
        let nu = f.orbit_point();
        assert!((nu[0] + 2f64.sqrt()).abs() < 1e-14);
        assert_eq!(f.family.gap_and_kernel(&nu).1, 1);
        let far: Vec<f64> = nu.iter().map(|x| 2.0 * x).collect();
        let (gap, ker) = f.family.gap_and_kernel(&far);
        assert_eq!(ker, 0);
        assert!((gap - 2.0).abs() < 1e-10);
        assert!(f.restriction_residual(&[0.3, -0.1, 0.7]).is_ok());
        assert!(f.restriction_residual(&[-0.4, 0.0, 0.0]).unwrap() < 1e-10);
        assert!(f.orbit_kernel_dims().iter().all(|&k| k == 1));
    }

    #[test]
    fn closed_form_and_commutators() {
        let f = a1(1);
        let mu = [0.3, -0.8, 0.45];
        let d = f.family.dirac_at(&mu);
        assert!(max_abs(&(&d * &d - f.family.dsquared_closed_form(&mu))) < 1e-12);
        let rep = f.family.check_commutators(&mu, &[0.2, 0.9, -0.4]);
        assert!(rep.max() < 1e-12, "{rep:?}");
        assert_eq!(f.family.check_commutators(&mu, &[0.0; 3]).anticommutator, 0.0);
    }

    #[test]
    fn fredholm_spectrum_map() {
        let f = a1(1);
        let mu = [-1.0, 0.2, 0.1];
        let fm = f.family.fredholm_normalize(&mu).unwrap();
        let d = f.family.dirac_at(&mu);
        let herm = |m: CMat| (&m + m.adjoint()) * c(0.5, 0.0);
        // s ↦ s/(1−s) is increasing on s ≤ 0, so sorted orders agree
        let want: Vec<f64> = herm_eigen(&herm(&d * &d)).0.iter().map(|s| s / (1.0 - s)).collect();
        let got = herm_eigen(&herm(&fm * &fm)).0;
        for (a, b) in want.iter().zip(&got) {
            assert!((a - b).abs() < 1e-10);
        }
        let on = f.family.fredholm_normalize(&f.orbit_point()).unwrap();
        let ev = herm_eigen(&(on * I)).0;
        assert_eq!(ev.iter().filter(|e| e.abs() < 1e-7).count(), 1);
    }
}
