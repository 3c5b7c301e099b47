//! Root systems, Weyl groups and weight-lattice arithmetic over the rationals.
//!
//! Weights are stored in simple-root coordinates. The inner product is the basic
//! form with long roots of squared length 2.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use nalgebra::DMatrix;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::linalg::{c, C64};
use crate::{Error, Result};

pub type Q = Ratio<i64>;
pub type QMat = Vec<Vec<Q>>;

fn q(n: i64) -> Q {
    Q::from_integer(n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum GroupLabel {
    A1,
    A1xA1,
    A2,
    B2,
    Sl2R,
}

impl GroupLabel {
    pub fn name(self) -> &'static str {
        match self {
            GroupLabel::A1 => "A1",
            GroupLabel::A1xA1 => "A1xA1",
            GroupLabel::A2 => "A2",
            GroupLabel::B2 => "B2",
            GroupLabel::Sl2R => "sl2R",
        }
    }

    pub fn is_compact(self) -> bool {
        self != GroupLabel::Sl2R
    }
}

impl fmt::Display for GroupLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GroupLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['×', '*'], "x").as_str() {
            "a1" | "su2" => Ok(GroupLabel::A1),
            "a1xa1" | "a1a1" => Ok(GroupLabel::A1xA1),
            "a2" | "su3" => Ok(GroupLabel::A2),
            "b2" | "so5" => Ok(GroupLabel::B2),
            "sl2r" => Ok(GroupLabel::Sl2R),
            _ => Err(Error::Config(format!("unsupported group label '{s}'"))),
        }
    }
}

/// A weight in simple-root coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight {
    pub coords: Vec<Q>,
}

impl Weight {
    pub fn new(coords: Vec<Q>) -> Self {
        Weight { coords }
    }

    pub fn zero(rank: usize) -> Self {
        Weight { coords: vec![Q::zero(); rank] }
    }

    pub fn unit(rank: usize, i: usize) -> Self {
        let mut w = Weight::zero(rank);
        w.coords[i] = Q::one();
        w
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|x| x.is_zero())
    }

    pub fn scale(&self, s: Q) -> Weight {
        Weight { coords: self.coords.iter().map(|x| x * s).collect() }
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coords.iter().map(|x| x.to_string()).collect()
    }
}

impl Add for &Weight {
    type Output = Weight;
    fn add(self, o: &Weight) -> Weight {
        Weight { coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &Weight {
    type Output = Weight;
    fn sub(self, o: &Weight) -> Weight {
        Weight { coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &Weight {
    type Output = Weight;
    fn neg(self) -> Weight {
        Weight { coords: self.coords.iter().map(|a| -a).collect() }
    }
}

impl Mul<&Weight> for Q {
    type Output = Weight;
    fn mul(self, w: &Weight) -> Weight {
        w.scale(self)
    }
}

fn mat_vec(m: &QMat, v: &[Q]) -> Vec<Q> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

fn mat_mul(a: &QMat, b: &QMat) -> QMat {
    let n = a.len();
    let k = b.len();
    let m = b[0].len();
    (0..n)
        .map(|i| (0..m).map(|j| (0..k).map(|l| a[i][l] * b[l][j]).sum()).collect())
        .collect()
}

fn qmat_det(m: &QMat) -> Q {
    let n = m.len();
    let mut a = m.clone();
    let mut det = Q::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Q::zero();
        };
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        det *= a[col][col];
        for r in (col + 1)..n {
            let f = a[r][col] / a[col][col];
            for cc in col..n {
                let v = a[col][cc];
                a[r][cc] -= f * v;
            }
        }
    }
    det
}

fn qmat_inverse(m: &QMat) -> Option<QMat> {
    let n = m.len();
    let mut a: QMat = m.clone();
    let mut inv: QMat = (0..n).map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect()).collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(p, col);
        inv.swap(p, col);
        let d = a[col][col];
        for cc in 0..n {
            a[col][cc] /= d;
            inv[col][cc] /= d;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col];
                for cc in 0..n {
                    let (x, y) = (a[col][cc], inv[col][cc]);
                    a[r][cc] -= f * x;
                    inv[r][cc] -= f * y;
                }
            }
        }
    }
    Some(inv)
}

/// Root system with its Weyl group, fully enumerated.
#[derive(Clone, Debug)]
pub struct RootDatum {
    pub label: GroupLabel,
    pub rank: usize,
    pub simple_roots: Vec<Weight>,
    pub cartan_matrix: Vec<Vec<i64>>,
    pub positive_roots: Vec<Weight>,
    /// Matrices acting on simple-root coordinates (column vectors).
    pub weyl_elements: Vec<QMat>,
    pub weyl_signs: Vec<i32>,
    pub weyl_lengths: Vec<usize>,
    /// Gram matrix ⟨αᵢ, αⱼ⟩.
    pub form: QMat,
}

pub fn build_root_datum(label: GroupLabel) -> RootDatum {
    let form: Vec<Vec<i64>> = match label {
        GroupLabel::A1 | GroupLabel::Sl2R => vec![vec![2]],
        GroupLabel::A1xA1 => vec![vec![2, 0], vec![0, 2]],
        GroupLabel::A2 => vec![vec![2, -1], vec![-1, 2]],
        // α₁ long, α₂ short
        GroupLabel::B2 => vec![vec![2, -1], vec![-1, 1]],
    };
    let form: QMat = form.into_iter().map(|r| r.into_iter().map(q).collect()).collect();
    let rank = form.len();
    let cartan_matrix: Vec<Vec<i64>> = (0..rank)
        .map(|i| {
            (0..rank)
                .map(|j| {
                    let v = q(2) * form[i][j] / form[j][j];
                    assert!(v.is_integer());
                    v.to_integer()
                })
                .collect()
        })
        .collect();
    let simple_roots: Vec<Weight> = (0..rank).map(|i| Weight::unit(rank, i)).collect();

    // s_i(α_j) = α_j − A_ji α_i
    let reflections: Vec<QMat> = (0..rank)
        .map(|i| {
            let mut m: QMat = vec![vec![Q::zero(); rank]; rank];
            for j in 0..rank {
                m[j][j] = Q::one();
                m[i][j] -= q(cartan_matrix[j][i]);
            }
            m
        })
        .collect();

    let id: QMat = (0..rank).map(|i| (0..rank).map(|j| if i == j { Q::one() } else { Q::zero() }).collect()).collect();
    let mut weyl_elements = vec![id.clone()];
    let mut weyl_lengths = vec![0usize];
    let mut seen: BTreeMap<QMat, usize> = BTreeMap::new();
    seen.insert(id, 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(k) = queue.pop_front() {
        for s in &reflections {
            let w = mat_mul(s, &weyl_elements[k]);
            if !seen.contains_key(&w) {
                seen.insert(w.clone(), weyl_elements.len());
                weyl_elements.push(w);
                weyl_lengths.push(weyl_lengths[k] + 1);
                queue.push_back(weyl_elements.len() - 1);
            }
        }
    }
    let weyl_signs = weyl_elements.iter().map(|w| if qmat_det(w) > Q::zero() { 1 } else { -1 }).collect();

    let mut roots: Vec<Weight> = Vec::new();
    for w in &weyl_elements {
        for a in &simple_roots {
            let r = Weight::new(mat_vec(w, &a.coords));
            if !roots.contains(&r) {
                roots.push(r);
            }
        }
    }
    let mut positive_roots: Vec<Weight> =
        roots.into_iter().filter(|r| r.coords.iter().all(|x| !x.is_negative())).collect();
    positive_roots.sort_by(|a, b| {
        let ha: Q = a.coords.iter().sum();
        let hb: Q = b.coords.iter().sum();
        ha.cmp(&hb).then_with(|| b.coords.cmp(&a.coords))
    });

    RootDatum {
        label,
        rank,
        simple_roots,
        cartan_matrix,
        positive_roots,
        weyl_elements,
        weyl_signs,
        weyl_lengths,
        form,
    }
}

impl RootDatum {
    pub fn weyl_order(&self) -> usize {
        self.weyl_elements.len()
    }

    pub fn check_dim(&self, w: &Weight) -> Result<()> {
        if w.dim() != self.rank {
            return Err(Error::Dimension { expected: self.rank, got: w.dim() });
        }
        Ok(())
    }

    pub fn inner(&self, a: &Weight, b: &Weight) -> Result<Q> {
        self.check_dim(a)?;
        self.check_dim(b)?;
        Ok(self.inner_unchecked(a, b))
    }

    fn inner_unchecked(&self, a: &Weight, b: &Weight) -> Q {
        let mut s = Q::zero();
        for i in 0..self.rank {
            for j in 0..self.rank {
                s += a.coords[i] * self.form[i][j] * b.coords[j];
            }
        }
        s
    }

    pub fn norm2(&self, a: &Weight) -> Q {
        self.inner_unchecked(a, a)
    }

    /// ⟨λ, α_i^∨⟩ = 2⟨λ,α_i⟩/⟨α_i,α_i⟩.
    pub fn coroot_pairing(&self, w: &Weight, i: usize) -> Q {
        let a = &self.simple_roots[i];
        q(2) * self.inner_unchecked(w, a) / self.form[i][i]
    }

    pub fn dynkin_labels(&self, w: &Weight) -> Vec<Q> {
        (0..self.rank).map(|i| self.coroot_pairing(w, i)).collect()
    }

    /// Weight with the given Dynkin labels, c = A^{-T} m.
    pub fn from_dynkin(&self, labels: &[i64]) -> Result<Weight> {
        if labels.len() != self.rank {
            return Err(Error::Dimension { expected: self.rank, got: labels.len() });
        }
        let at: QMat = (0..self.rank).map(|i| (0..self.rank).map(|j| q(self.cartan_matrix[j][i])).collect()).collect();
        let inv = qmat_inverse(&at).expect("Cartan matrix is invertible");
        let m: Vec<Q> = labels.iter().map(|&x| q(x)).collect();
        Ok(Weight::new(mat_vec(&inv, &m)))
    }

    pub fn fundamental(&self, i: usize) -> Weight {
        let mut labels = vec![0; self.rank];
        labels[i] = 1;
        self.from_dynkin(&labels).unwrap()
    }

    pub fn rho(&self) -> Weight {
        let mut s = Weight::zero(self.rank);
        for r in &self.positive_roots {
            s = &s + r;
        }
        s.scale(Q::new(1, 2))
    }

    pub fn is_dominant_integral(&self, w: &Weight) -> bool {
        self.dynkin_labels(w).iter().all(|m| m.is_integer() && !m.is_negative())
    }

    pub fn apply(&self, k: usize, w: &Weight) -> Weight {
        Weight::new(mat_vec(&self.weyl_elements[k], &w.coords))
    }

    pub fn longest_element(&self) -> usize {
        (0..self.weyl_order()).max_by_key(|&k| self.weyl_lengths[k]).unwrap()
    }

    pub fn weyl_orbit(&self, w: &Weight) -> Vec<Weight> {
        let mut out: Vec<Weight> = Vec::new();
        for k in 0..self.weyl_order() {
            let v = self.apply(k, w);
            if !out.contains(&v) {
                out.push(v);
            }
        }
        out
    }

    /// Complete set of roots (positive and negative).
    pub fn all_roots(&self) -> Vec<Weight> {
        let mut v = self.positive_roots.clone();
        v.extend(self.positive_roots.iter().map(|r| -r));
        v
    }

    /// Rows: coefficients of the orthonormal Cartan frame εₖ in terms of the simple coroots.
    /// Obtained by Gram–Schmidt on α₁^∨, …, α_r^∨ under the basic form.
    pub fn cartan_frame(&self) -> DMatrix<f64> {
        let r = self.rank;
        // Gram matrix of coroots ⟨α_i^∨, α_j^∨⟩ = 4⟨α_i,α_j⟩/(|α_i|²|α_j|²)
        let g = DMatrix::from_fn(r, r, |i, j| {
            (q(4) * self.form[i][j] / (self.form[i][i] * self.form[j][j])).to_f64().unwrap()
        });
        let mut m = DMatrix::<f64>::zeros(r, r);
        for k in 0..r {
            let mut v = DMatrix::<f64>::zeros(1, r);
            v[(0, k)] = 1.0;
            for l in 0..k {
                let proj = (&v * &g * m.row(l).transpose())[(0, 0)];
                v -= m.row(l) * proj;
            }
            let nrm = (&v * &g * v.transpose())[(0, 0)].sqrt();
            m.set_row(k, &(v / nrm).row(0));
        }
        m
    }

    /// Orthonormal-frame coordinates yₖ = ⟨w, εₖ⟩ of a weight.
    pub fn frame_coords(&self, w: &Weight) -> Vec<f64> {
        let m = self.cartan_frame();
        let pair: Vec<f64> = (0..self.rank).map(|i| self.coroot_pairing(w, i).to_f64().unwrap()).collect();
        (0..self.rank).map(|k| (0..self.rank).map(|i| m[(k, i)] * pair[i]).sum()).collect()
    }

    fn pairing_f64(&self, w: &Weight, x: &[f64]) -> f64 {
        self.frame_coords(w).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn a_hat(&self, x: &[f64]) -> Result<f64> {
        self.check_cartan(x)?;
        let zs: Vec<C64> = self.positive_roots.iter().map(|a| c(0.0, self.pairing_f64(a, x))).collect();
        let v = a_hat_pairings(&zs)?;
        Ok(v.re)
    }

    fn check_cartan(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.rank {
            return Err(Error::Dimension { expected: self.rank, got: x.len() });
        }
        Ok(())
    }

    /// Π_{α>0} ⟨λ+ρ,α⟩/⟨ρ,α⟩.
    pub fn weyl_dim(&self, lambda: &Weight) -> Result<u64> {
        self.check_dim(lambda)?;
        if !self.is_dominant_integral(lambda) {
            return Err(Error::Domain(format!("weight {:?} is not dominant integral", lambda.to_strings())));
        }
        let rho = self.rho();
        let lr = lambda + &rho;
        let mut p = Q::one();
        for a in &self.positive_roots {
            p *= self.inner_unchecked(&lr, a) / self.inner_unchecked(&rho, a);
        }
        assert!(p.is_integer() && p.is_positive());
        Ok(p.to_integer() as u64)
    }

    /// Weyl character Tr_{V_λ}(e^X) for X in orthonormal Cartan coordinates.
    pub fn weyl_character(&self, lambda: &Weight, x: &[f64]) -> Result<C64> {
        self.check_cartan(x)?;
        self.weyl_dim(lambda)?;
        let rho = self.rho();
        let lr = lambda + &rho;
        let alt = |w: &Weight| -> C64 {
            (0..self.weyl_order())
                .map(|k| {
                    let phase = self.pairing_f64(&self.apply(k, w), x);
                    C64::from_polar(self.weyl_signs[k] as f64, phase)
                })
                .sum()
        };
        let den = alt(&rho);
        let reg: f64 = self.positive_roots.iter().map(|a| self.pairing_f64(a, x).abs()).fold(f64::INFINITY, f64::min);
        if reg > 1e-4 && den.norm() > 1e-8 {
            return Ok(alt(&lr) / den);
        }
        let mults = crate::repbuild::freudenthal(lambda, self)?;
        Ok(mults.iter().map(|(mu, &m)| C64::from_polar(m as f64, self.pairing_f64(mu, x))).sum())
    }
}

/// q(z) = (z/2)/sinh(z/2), the Â kernel on a complexified root pairing.
pub fn a_hat_kernel(z: C64) -> Result<C64> {
    if z.norm() < 1e-8 {
        return Ok(c(1.0, 0.0) - z * z / 24.0);
    }
    // poles at z = 2πik, k ≠ 0
    let k = (z.im / (2.0 * std::f64::consts::PI)).round();
    if k != 0.0 && (z - c(0.0, 2.0 * std::f64::consts::PI * k)).norm() < 1e-10 {
        return Err(Error::Domain(format!("Â kernel singular at z = {z}")));
    }
    let h = z / 2.0;
    Ok(h / h.sinh())
}

/// Π q(z_α) over the supplied complexified pairings z_α.
pub fn a_hat_pairings(zs: &[C64]) -> Result<C64> {
    zs.iter().try_fold(c(1.0, 0.0), |acc, &z| Ok(acc * a_hat_kernel(z)?))
}

pub fn to_f64(q: &Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

/// Compact/noncompact split of the positive roots for a real form.
#[derive(Clone, Debug)]
pub struct RealFormDatum {
    pub base: RootDatum,
    pub compact_positive: Vec<Weight>,
    pub noncompact_positive: Vec<Weight>,
    pub rho_c: Weight,
    pub rho_n: Weight,
    pub rho_tilde: Weight,
}

impl RealFormDatum {
    pub fn new(base: RootDatum) -> Self {
        let (compact_positive, noncompact_positive) = if base.label == GroupLabel::Sl2R {
            (vec![], base.positive_roots.clone())
        } else {
            (base.positive_roots.clone(), vec![])
        };
        let half_sum = |v: &[Weight]| {
            v.iter().fold(Weight::zero(base.rank), |s, r| &s + r).scale(Q::new(1, 2))
        };
        let rho_c = half_sum(&compact_positive);
        let rho_n = half_sum(&noncompact_positive);
        let rho_tilde = &rho_c - &rho_n;
        RealFormDatum { base, compact_positive, noncompact_positive, rho_c, rho_n, rho_tilde }
    }
}

#[derive(Serialize)]
pub struct RootDatumJson {
    pub label: String,
    pub rank: usize,
    pub simple_roots: Vec<Vec<String>>,
    pub form: Vec<Vec<String>>,
    pub cartan_matrix: Vec<Vec<i64>>,
    pub positive_roots: Vec<Vec<String>>,
    pub weyl_order: usize,
    pub rho: Vec<String>,
}

impl From<&RootDatum> for RootDatumJson {
    fn from(d: &RootDatum) -> Self {
        RootDatumJson {
            label: d.label.name().to_string(),
            rank: d.rank,
            simple_roots: d.simple_roots.iter().map(|w| w.to_strings()).collect(),
            form: d.form.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect(),
            cartan_matrix: d.cartan_matrix.clone(),
            positive_roots: d.positive_roots.iter().map(|w| w.to_strings()).collect(),
            weyl_order: d.weyl_order(),
            rho: d.rho().to_strings(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders() {
        for (l, np, w) in [
            (GroupLabel::A1, 1, 2),
            (GroupLabel::A1xA1, 2, 4),
            (GroupLabel::A2, 3, 6),
            (GroupLabel::B2, 4, 8),
        ] {
            let d = build_root_datum(l);
            assert_eq!(d.positive_roots.len(), np, "{l}");
            assert_eq!(d.weyl_order(), w, "{l}");
        }
    }

    #[test]
    fn rho_norms() {
        let a1 = build_root_datum(GroupLabel::A1);
        assert_eq!(a1.inner(&a1.simple_roots[0], &a1.simple_roots[0]).unwrap(), q(2));
        assert_eq!(a1.norm2(&a1.rho()), Q::new(1, 2));
        let a2 = build_root_datum(GroupLabel::A2);
        assert_eq!(a2.norm2(&a2.rho()), q(2));
    }

    #[test]
    fn weyl_dims() {
        let a1 = build_root_datum(GroupLabel::A1);
        assert_eq!(a1.weyl_dim(&a1.fundamental(0)).unwrap(), 2);
        assert_eq!(a1.weyl_dim(&Weight::zero(1)).unwrap(), 1);
        let a2 = build_root_datum(GroupLabel::A2);
        assert_eq!(a2.weyl_dim(&a2.from_dynkin(&[1, 1]).unwrap()).unwrap(), 8);
        let b2 = build_root_datum(GroupLabel::B2);
        assert_eq!(b2.weyl_dim(&b2.from_dynkin(&[1, 0]).unwrap()).unwrap(), 5);
        assert_eq!(b2.weyl_dim(&b2.from_dynkin(&[0, 1]).unwrap()).unwrap(), 4);
        assert!(a1.weyl_dim(&a1.from_dynkin(&[-1]).unwrap()).is_err());
    }

    #[test]
    fn a_hat_small_real_pairing() {
        for t in [1e-3, 1e-2, 0.05] {
            let v = a_hat_pairings(&[c(t, 0.0)]).unwrap();
            assert!((v.re - (1.0 - t * t / 24.0)).abs() < t.powi(4) / 500.0 + 1e-15);
        }
        let a2 = build_root_datum(GroupLabel::A2);
        assert_eq!(a2.a_hat(&[0.0, 0.0]).unwrap(), 1.0);
        assert!(a_hat_kernel(c(0.0, 2.0 * std::f64::consts::PI)).is_err());
    }

    #[test]
    fn a1_characters() {
        let a1 = build_root_datum(GroupLabel::A1);
        // frame coordinate of α is √2, so θ = √2 x
        for x in [0.3, 1.1, -0.7] {
            let th = 2f64.sqrt() * x;
            let w = a1.weyl_character(&a1.fundamental(0), &[x]).unwrap();
            assert!((w - c(2.0 * (th / 2.0).cos(), 0.0)).norm() < 1e-12);
            let w2 = a1.weyl_character(&a1.from_dynkin(&[2]).unwrap(), &[x]).unwrap();
            assert!((w2 - c(1.0 + 2.0 * th.cos(), 0.0)).norm() < 1e-12);
        }
        let a2 = build_root_datum(GroupLabel::A2);
        let l = a2.from_dynkin(&[1, 1]).unwrap();
        assert!((a2.weyl_character(&l, &[0.0, 0.0]).unwrap() - c(8.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn frame_is_orthonormal() {
        for l in [GroupLabel::A1xA1, GroupLabel::A2, GroupLabel::B2] {
            let d = build_root_datum(l);
            for a in d.all_roots() {
                for b in d.all_roots() {
                    let ya = d.frame_coords(&a);
                    let yb = d.frame_coords(&b);
                    let e: f64 = ya.iter().zip(&yb).map(|(x, y)| x * y).sum();
                    assert!((e - d.inner(&a, &b).unwrap().to_f64().unwrap()).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn sl2r_real_form() {
        let rf = RealFormDatum::new(build_root_datum(GroupLabel::Sl2R));
        assert!(rf.compact_positive.is_empty());
        assert_eq!(rf.noncompact_positive.len(), 1);
        assert_eq!(rf.rho_tilde, &rf.rho_c - &rf.rho_n);
        assert_eq!(rf.rho_tilde.coords[0], Q::new(-1, 2));
    }
}
