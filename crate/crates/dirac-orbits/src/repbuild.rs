//! Explicit matrix models of irreducible representations.
//!
//! A model is built by lowering from the highest-weight vector and
//! orthonormalizing each weight space under the contravariant (Shapovalov)
//! form. In that basis the raising operators are transposes of the lowering
//! ones and all Chevalley matrices are real.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::linalg::{c, comm, expm, max_abs, real_to_complex, CMat, C64, I};
use crate::rootsys::{build_root_datum, GroupLabel, RootDatum, Weight, Q};
use crate::{Error, Result};

pub const DEFAULT_DIM_CAP: u64 = 200;

/// Freudenthal multiplicities of all weights of V_λ.
pub fn freudenthal(lambda: &Weight, datum: &RootDatum) -> Result<BTreeMap<Weight, u64>> {
    datum.check_dim(lambda)?;
    if !datum.is_dominant_integral(lambda) {
        return Err(Error::Domain(format!("weight {:?} is not dominant integral", lambda.to_strings())));
    }
    let rho = datum.rho();
    let lr2 = datum.norm2(&(lambda + &rho));
    let mut mult: BTreeMap<Weight, u64> = BTreeMap::new();
    mult.insert(lambda.clone(), 1);
    let mut layer = vec![lambda.clone()];
    while !layer.is_empty() {
        let mut next: Vec<Weight> = Vec::new();
        for mu in &layer {
            for a in &datum.simple_roots {
                let nu = mu - a;
                if !mult.contains_key(&nu) && !next.contains(&nu) {
                    next.push(nu);
                }
            }
        }
        next.sort();
        let mut kept = Vec::new();
        for nu in next {
            let den = lr2 - datum.norm2(&(&nu + &rho));
            if den.is_zero() {
                continue;
            }
            let mut num = Q::zero();
            for a in &datum.positive_roots {
                let mut k = 1;
                loop {
                    let shifted = &nu + &a.scale(Q::from_integer(k));
                    // root strings through the weights are unbroken
                    match mult.get(&shifted) {
                        Some(&m) => num += Q::from_integer(m as i64) * datum.inner(&shifted, a).unwrap(),
                        None => break,
                    }
                    k += 1;
                }
            }
            let m = Q::from_integer(2) * num / den;
            if m.is_positive() {
                assert!(m.is_integer(), "non-integral multiplicity");
                mult.insert(nu.clone(), m.to_integer() as u64);
                kept.push(nu);
            }
        }
        layer = kept;
    }
    Ok(mult)
}

/// Real Chevalley matrices of a highest-weight model.
#[derive(Clone, Debug)]
pub struct ChevalleyModel {
    pub weights: Vec<Weight>,
    pub h: Vec<DMatrix<f64>>,
    pub e: Vec<DMatrix<f64>>,
    pub f: Vec<DMatrix<f64>>,
}

pub fn build_chevalley(lambda: &Weight, datum: &RootDatum, cap: u64) -> Result<ChevalleyModel> {
    let dim = datum.weyl_dim(lambda)?;
    if dim > cap {
        return Err(Error::Config(format!("dimension {dim} exceeds cap {cap}")));
    }
    let mults = freudenthal(lambda, datum)?;
    let dim = dim as usize;
    let r = datum.rank;
    let mut weights: Vec<Weight> = vec![lambda.clone()];
    let mut by_weight: BTreeMap<Weight, Vec<usize>> = BTreeMap::new();
    by_weight.insert(lambda.clone(), vec![0]);
    let mut f = vec![DMatrix::<f64>::zeros(dim, dim); r];

    // weights in order of depth below λ, lexicographic within a depth
    let depth = |w: &Weight| -> Q { (lambda - w).coords.iter().sum() };
    let mut order: Vec<&Weight> = mults.keys().filter(|w| *w != lambda).collect();
    order.sort_by(|a, b| depth(a).cmp(&depth(b)).then_with(|| b.cmp(a)));

    for nu in order {
        let mut cands: Vec<(usize, usize)> = Vec::new();
        for i in 0..r {
            let up = nu + &datum.simple_roots[i];
            if let Some(idx) = by_weight.get(&up) {
                cands.extend(idx.iter().map(|&b| (i, b)));
            }
        }
        let nc = cands.len();
        let mut g = DMatrix::<f64>::zeros(nc, nc);
        for (p, &(i, b)) in cands.iter().enumerate() {
            for (s, &(j, bp)) in cands.iter().enumerate() {
                // ⟨F_i b, F_j b'⟩ = (F_j E_i)[b,b'] + δ_ij ⟨ν+α_i, α_i^∨⟩ δ_bb'
                let top = &(nu + &datum.simple_roots[i]) + &datum.simple_roots[j];
                let mut v = 0.0;
                if let Some(cs) = by_weight.get(&top) {
                    for &cc in cs {
                        v += f[j][(b, cc)] * f[i][(bp, cc)];
                    }
                }
                if i == j && b == bp {
                    v += datum.coroot_pairing(&(nu + &datum.simple_roots[i]), i).to_f64().unwrap();
                }
                g[(p, s)] = v;
            }
        }
        let mut accepted: Vec<nalgebra::DVector<f64>> = Vec::new();
        for k in 0..nc {
            let mut v = nalgebra::DVector::<f64>::zeros(nc);
            v[k] = 1.0;
            for _ in 0..2 {
                for cm in &accepted {
                    let proj = (cm.transpose() * &g * &v)[(0, 0)];
                    v -= cm * proj;
                }
            }
            let n2 = (v.transpose() * &g * &v)[(0, 0)];
            if n2 > 1e-10 * g[(k, k)].abs().max(1.0) {
                accepted.push(v / n2.sqrt());
            }
        }
        let expected = mults[nu] as usize;
        if accepted.len() != expected {
            return Err(Error::Singular(format!(
                "weight space {:?}: Gram rank {} but multiplicity {}",
                nu.to_strings(),
                accepted.len(),
                expected
            )));
        }
        let mut idx = Vec::new();
        for cm in &accepted {
            let new = weights.len();
            weights.push(nu.clone());
            idx.push(new);
            let gc = &g * cm;
            for (p, &(i, b)) in cands.iter().enumerate() {
                f[i][(new, b)] = gc[p];
            }
        }
        by_weight.insert(nu.clone(), idx);
    }
    let e = f.iter().map(|m| m.transpose()).collect();
    let h = (0..r)
        .map(|i| {
            DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                dim,
                weights.iter().map(|w| datum.coroot_pairing(w, i).to_f64().unwrap()),
            ))
        })
        .collect();
    Ok(ChevalleyModel { weights, h, e, f })
}

/// Abstract generators from which basis elements are assembled.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gen {
    H(usize),
    E(usize),
    F(usize),
}

/// A real Lie algebra with an explicit basis, structure constants and invariant form.
#[derive(Clone, Debug)]
pub struct LieAlgebra {
    pub label: GroupLabel,
    pub dim: usize,
    pub rank: usize,
    /// f_{ab}^c stored at `a*n*n + b*n + c`.
    pub structure: Vec<f64>,
    /// Invariant form on 𝔤 in the chosen basis.
    pub form: DMatrix<f64>,
    /// Indices of basis elements spanning the compact subalgebra 𝔨.
    pub compact: Vec<usize>,
    pub noncompact: Vec<usize>,
    /// Indices spanning the Cartan subalgebra, in frame order.
    pub cartan: Vec<usize>,
    /// (u_α, v_α) basis indices for each positive root.
    pub root_pairs: Vec<(usize, usize)>,
}

impl LieAlgebra {
    pub fn f(&self, a: usize, b: usize, c: usize) -> f64 {
        self.structure[(a * self.dim + b) * self.dim + c]
    }

    pub fn bracket(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let mut out = vec![0.0; n];
        for a in 0..n {
            if x[a] == 0.0 {
                continue;
            }
            for b in 0..n {
                if y[b] == 0.0 {
                    continue;
                }
                for (cc, o) in out.iter_mut().enumerate() {
                    *o += x[a] * y[b] * self.f(a, b, cc);
                }
            }
        }
        out
    }

    /// ⟨[e_a, e_b], e_c⟩ under the invariant form.
    pub fn f_lowered(&self, a: usize, b: usize, c: usize) -> f64 {
        (0..self.dim).map(|d| self.f(a, b, d) * self.form[(d, c)]).sum()
    }
}

/// Compact real form of a complex semisimple algebra, realized on a faithful module.
#[derive(Clone, Debug)]
pub struct CompactAlgebra {
    pub datum: RootDatum,
    pub algebra: LieAlgebra,
    /// e_α = [e_i, e_β] recipe: (simple index, positive-root index of β) for non-simple α.
    root_words: Vec<Option<(usize, usize)>>,
    /// Basis elements as combinations of abstract generators.
    words: Vec<Vec<(Gen, C64)>>,
    pub frame: DMatrix<f64>,
}

fn defining_weight(label: GroupLabel) -> Vec<i64> {
    match label {
        GroupLabel::A1 | GroupLabel::Sl2R => vec![1],
        GroupLabel::A1xA1 => vec![1, 1],
        GroupLabel::A2 => vec![1, 0],
        GroupLabel::B2 => vec![0, 1],
    }
}

impl CompactAlgebra {
    pub fn new(label: GroupLabel) -> Result<Self> {
        let datum = build_root_datum(label);
        let r = datum.rank;
        let pos = datum.positive_roots.clone();
        let mut root_words = Vec::new();
        for a in &pos {
            if let Some(i) = datum.simple_roots.iter().position(|s| s == a) {
                let _ = i;
                root_words.push(None);
                continue;
            }
            let mut found = None;
            for i in 0..r {
                let beta = a - &datum.simple_roots[i];
                if let Some(k) = pos.iter().position(|p| *p == beta) {
                    found = Some((i, k));
                    break;
                }
            }
            root_words.push(Some(found.expect("positive root decomposes")));
        }
        let frame = datum.cartan_frame();
        let mut words: Vec<Vec<(Gen, C64)>> = Vec::new();
        for k in 0..r {
            words.push((0..r).map(|i| (Gen::H(i), c(0.0, frame[(k, i)]))).collect());
        }
        let n = r + 2 * pos.len();
        let mut root_pairs = Vec::new();
        for k in 0..pos.len() {
            // normalization fixed below on the defining module
            words.push(vec![(Gen::E(k), c(1.0, 0.0)), (Gen::F(k), c(-1.0, 0.0))]);
            words.push(vec![(Gen::E(k), I), (Gen::F(k), I)]);
            root_pairs.push((r + 2 * k, r + 2 * k + 1));
        }
        let mut alg = CompactAlgebra {
            datum: datum.clone(),
            algebra: LieAlgebra {
                label,
                dim: n,
                rank: r,
                structure: vec![],
                form: DMatrix::identity(n, n),
                compact: (0..n).collect(),
                noncompact: vec![],
                cartan: (0..r).collect(),
                root_pairs,
            },
            root_words,
            words,
            frame,
        };
        let lam = datum.from_dynkin(&defining_weight(label))?;
        let model = build_chevalley(&lam, &datum, DEFAULT_DIM_CAP)?;
        let mats = alg.basis_matrices(&model);
        // positive form (X,Y) = −c·tr(XY), c = 2/tr(h_long²)
        let long = (0..r).find(|&i| datum.form[i][i] == Q::from_integer(2)).unwrap();
        let cnorm = 2.0 / model.h[long].map(|x| x * x).trace();
        let tform = |x: &CMat, y: &CMat| -> C64 { -(x * y).trace() * cnorm };
        for k in 0..pos.len() {
            let u = &mats[r + 2 * k];
            let nrm = tform(u, u).re.sqrt();
            for w in [r + 2 * k, r + 2 * k + 1] {
                for t in alg.words[w].iter_mut() {
                    t.1 /= nrm;
                }
            }
        }
        let mats = alg.basis_matrices(&model);
        let mut gram = DMatrix::<f64>::zeros(n, n);
        for a in 0..n {
            for b in 0..n {
                let v = tform(&mats[a], &mats[b]);
                debug_assert!(v.im.abs() < 1e-12);
                gram[(a, b)] = v.re;
            }
        }
        if (gram.clone() - DMatrix::identity(n, n)).abs().max() > 1e-10 {
            return Err(Error::Singular("compact basis is not orthonormal".into()));
        }
        let mut structure = vec![0.0; n * n * n];
        for a in 0..n {
            for b in 0..n {
                let br = comm(&mats[a], &mats[b]);
                for cc in 0..n {
                    let v = tform(&mats[cc], &br);
                    structure[(a * n + b) * n + cc] = if v.re.abs() < 1e-14 { 0.0 } else { v.re };
                }
            }
        }
        alg.algebra.structure = structure;
        Ok(alg)
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim
    }

    pub fn rank(&self) -> usize {
        self.algebra.rank
    }

    fn root_vector(&self, model: &ChevalleyModel, k: usize, cache: &mut Vec<Option<DMatrix<f64>>>) -> DMatrix<f64> {
        if let Some(m) = &cache[k] {
            return m.clone();
        }
        let m = match self.root_words[k] {
            None => {
                let i = self.datum.simple_roots.iter().position(|s| *s == self.datum.positive_roots[k]).unwrap();
                model.e[i].clone()
            }
            Some((i, b)) => {
                let eb = self.root_vector(model, b, cache);
                &model.e[i] * &eb - &eb * &model.e[i]
            }
        };
        cache[k] = Some(m.clone());
        m
    }

    fn basis_matrices(&self, model: &ChevalleyModel) -> Vec<CMat> {
        let d = model.weights.len();
        let mut cache = vec![None; self.datum.positive_roots.len()];
        let roots: Vec<DMatrix<f64>> =
            (0..self.datum.positive_roots.len()).map(|k| self.root_vector(model, k, &mut cache)).collect();
        self.words
            .iter()
            .map(|w| {
                let mut m = CMat::zeros(d, d);
                for &(g, coef) in w {
                    let gm = match g {
                        Gen::H(i) => &model.h[i],
                        Gen::E(k) => &roots[k],
                        Gen::F(k) => &roots[k].transpose(),
                    };
                    m += real_to_complex(gm) * coef;
                }
                m
            })
            .collect()
    }

    pub fn irrep(&self, lambda: &Weight) -> Result<Irrep> {
        self.irrep_capped(lambda, DEFAULT_DIM_CAP)
    }

    pub fn irrep_capped(&self, lambda: &Weight, cap: u64) -> Result<Irrep> {
        let model = build_chevalley(lambda, &self.datum, cap)?;
        let generators = self.basis_matrices(&model);
        let multiplicities = freudenthal(lambda, &self.datum)?;
        Ok(Irrep {
            highest_weight: lambda.clone(),
            dim: model.weights.len(),
            weights: model.weights.clone(),
            multiplicities,
            generators,
            chevalley: model,
        })
    }

    /// Embed a weight of 𝔱* as a covector on 𝔤 (zero on the root directions).
    pub fn weight_covector(&self, w: &Weight) -> Vec<f64> {
        let mut v = vec![0.0; self.dim()];
        for (k, y) in self.datum.frame_coords(w).into_iter().enumerate() {
            v[self.algebra.cartan[k]] = y;
        }
        v
    }
}

/// Matrix model of V_λ with anti-Hermitian generators R_a in an orthonormal weight basis.
#[derive(Clone, Debug)]
pub struct Irrep {
    pub highest_weight: Weight,
    pub dim: usize,
    /// Weight of each basis vector.
    pub weights: Vec<Weight>,
    pub multiplicities: BTreeMap<Weight, u64>,
    pub generators: Vec<CMat>,
    pub chevalley: ChevalleyModel,
}

pub fn build_irrep(lambda: &Weight, datum: &RootDatum) -> Result<Irrep> {
    CompactAlgebra::new(datum.label)?.irrep(lambda)
}

impl Irrep {
    /// R(X) for X = Σ x^a e_a.
    pub fn action(&self, x: &[f64]) -> CMat {
        let mut m = CMat::zeros(self.dim, self.dim);
        for (a, &xa) in x.iter().enumerate() {
            if xa != 0.0 {
                m += &self.generators[a] * c(xa, 0.0);
            }
        }
        m
    }

    /// Tr exp(R(X)) for X in orthonormal Cartan coordinates.
    pub fn trace_exp(&self, x: &[f64]) -> C64 {
        let mut full = vec![0.0; self.generators.len()];
        full[..x.len()].copy_from_slice(x);
        expm(&self.action(&full)).trace()
    }

    /// Index of the basis vector spanning the lowest-weight line w₀λ.
    pub fn lowest_weight_index(&self, datum: &RootDatum) -> usize {
        let low = datum.apply(datum.longest_element(), &self.highest_weight);
        self.weights.iter().position(|w| *w == low).unwrap()
    }

    pub fn casimir(&self) -> CMat {
        self.generators.iter().fold(CMat::zeros(self.dim, self.dim), |acc, r| acc + r * r)
    }

    pub fn commutator_residual(&self, alg: &LieAlgebra) -> f64 {
        let n = alg.dim;
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                let lhs = comm(&self.generators[a], &self.generators[b]);
                let mut rhs = CMat::zeros(self.dim, self.dim);
                for cc in 0..n {
                    let f = alg.f(a, b, cc);
                    if f != 0.0 {
                        rhs += &self.generators[cc] * c(f, 0.0);
                    }
                }
                worst = worst.max(max_abs(&(lhs - rhs)));
            }
        }
        worst
    }

    /// Weight-space dimensions read off from the Cartan eigenvalues, binned at 1e-8.
    pub fn binned_weight_dims(&self, datum: &RootDatum) -> BTreeMap<Vec<i64>, usize> {
        let r = datum.rank;
        let frame = datum.cartan_frame();
        let mut out = BTreeMap::new();
        for v in 0..self.dim {
            // R(t_k) = i·y_k on a weight vector; recover Dynkin labels from y = M·m
            let y: Vec<f64> = (0..r).map(|k| (self.generators[k][(v, v)] / I).re).collect();
            let labels = frame.clone().try_inverse().unwrap() * nalgebra::DVector::from_vec(y);
            let key: Vec<i64> = labels.iter().map(|x| (x * 1e8).round() as i64).collect();
            *out.entry(key).or_insert(0) += 1;
        }
        out
    }
}

#[derive(Serialize)]
pub struct IrrepJson {
    pub group: String,
    pub highest_weight: Vec<String>,
    pub dim: usize,
    pub weights: Vec<Vec<String>>,
    /// Generator matrices, row-major, entries as [re, im].
    pub generators: Vec<Vec<[f64; 2]>>,
}

impl IrrepJson {
    pub fn new(label: GroupLabel, ir: &Irrep) -> Self {
        IrrepJson {
            group: label.name().into(),
            highest_weight: ir.highest_weight.to_strings(),
            dim: ir.dim,
            weights: ir.weights.iter().map(|w| w.to_strings()).collect(),
            generators: ir
                .generators
                .iter()
                .map(|m| {
                    let mut v = Vec::with_capacity(ir.dim * ir.dim);
                    for i in 0..ir.dim {
                        for j in 0..ir.dim {
                            v.push([m[(i, j)].re, m[(i, j)].im]);
                        }
                    }
                    v
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::skew_residual;

    #[test]
    fn freudenthal_examples() {
        let a1 = build_root_datum(GroupLabel::A1);
        let m = freudenthal(&a1.fundamental(0), &a1).unwrap();
        assert_eq!(m.len(), 2);
        assert!(m.values().all(|&x| x == 1));
        let a2 = build_root_datum(GroupLabel::A2);
        let adj = a2.from_dynkin(&[1, 1]).unwrap();
        let m = freudenthal(&adj, &a2).unwrap();
        assert_eq!(m[&Weight::zero(2)], 2);
        assert_eq!(m[&adj], 1);
        assert_eq!(m.values().sum::<u64>(), 8);
        let b2 = build_root_datum(GroupLabel::B2);
        for l in [[1, 0], [0, 1], [1, 1], [0, 2], [2, 1]] {
            let lam = b2.from_dynkin(&l).unwrap();
            let m = freudenthal(&lam, &b2).unwrap();
            assert_eq!(m.values().sum::<u64>(), b2.weyl_dim(&lam).unwrap(), "{l:?}");
        }
    }

    #[test]
    fn chevalley_relations() {
        for (l, lab) in [(GroupLabel::A2, vec![1, 1]), (GroupLabel::B2, vec![1, 1]), (GroupLabel::A1xA1, vec![2, 1])] {
            let d = build_root_datum(l);
            let m = build_chevalley(&d.from_dynkin(&lab).unwrap(), &d, 200).unwrap();
            for i in 0..d.rank {
                for j in 0..d.rank {
                    let ef = &m.e[i] * &m.f[j] - &m.f[j] * &m.e[i];
                    let want = if i == j { m.h[i].clone() } else { DMatrix::zeros(ef.nrows(), ef.ncols()) };
                    assert!((ef - want).abs().max() < 1e-12, "{l} [e{i},f{j}]");
                }
            }
        }
    }

    #[test]
    fn spin_half_model() {
        let alg = CompactAlgebra::new(GroupLabel::A1).unwrap();
        let ir = alg.irrep(&alg.datum.fundamental(0)).unwrap();
        assert_eq!(ir.dim, 2);
        // R(t) = i·diag(±1/√2): weights ±ω have frame coordinate ±1/√2
        let h = &ir.generators[0];
        assert!((h[(0, 0)] - c(0.0, 0.5f64.sqrt())).norm() < 1e-14);
        assert!((h[(1, 1)] - c(0.0, -(0.5f64.sqrt()))).norm() < 1e-14);
        assert!(ir.commutator_residual(&alg.algebra) < 1e-12);
        let trivial = alg.irrep(&Weight::zero(1)).unwrap();
        assert!(trivial.generators.iter().all(|g| g.nrows() == 1 && g[(0, 0)].norm() == 0.0));
    }

    #[test]
    fn irrep_invariants() {
        for (l, labels) in [
            (GroupLabel::A1, vec![3]),
            (GroupLabel::A1xA1, vec![1, 2]),
            (GroupLabel::A2, vec![1, 0]),
            (GroupLabel::A2, vec![2, 1]),
            (GroupLabel::B2, vec![1, 1]),
        ] {
            let alg = CompactAlgebra::new(l).unwrap();
            let lam = alg.datum.from_dynkin(&labels).unwrap();
            let ir = alg.irrep(&lam).unwrap();
            assert_eq!(ir.dim as u64, alg.datum.weyl_dim(&lam).unwrap());
            assert!(ir.commutator_residual(&alg.algebra) < 1e-12, "{l} {labels:?}");
            for g in &ir.generators {
                assert!(skew_residual(g) < 1e-12);
            }
            let rho = alg.datum.rho();
            let cas = alg.datum.inner(&lam, &(&lam + &rho.scale(Q::from_integer(2)))).unwrap().to_f64().unwrap();
            let resid = ir.casimir() + CMat::identity(ir.dim, ir.dim) * c(cas, 0.0);
            assert!(max_abs(&resid) < 1e-10, "{l} {labels:?}");
        }
    }

    #[test]
    fn trace_exp_matches_character() {
        let alg = CompactAlgebra::new(GroupLabel::A2).unwrap();
        let lam = alg.datum.from_dynkin(&[1, 1]).unwrap();
        let ir = alg.irrep(&lam).unwrap();
        for x in [[0.3, -0.2], [1.0, 0.7], [0.0, 0.0]] {
            let a = ir.trace_exp(&x);
            let b = alg.datum.weyl_character(&lam, &x).unwrap();
            assert!((a - b).norm() < 1e-10 * b.norm().max(1.0));
        }
    }

    #[test]
    fn dimension_cap() {
        let alg = CompactAlgebra::new(GroupLabel::A2).unwrap();
        assert!(alg.irrep_capped(&alg.datum.from_dynkin(&[5, 5]).unwrap(), 200).is_err());
    }
}
