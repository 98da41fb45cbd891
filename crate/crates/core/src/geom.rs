//! Indefinite inner-product spaces of Lie sphere geometry.
//!
//! Everything lives in R^{4,2} with the ordered basis `(p, q, y0, y1, y2, y3)`,
//! Gram matrix `diag(-1, +1, -1, +1, +1, +1)`. `p` is the point sphere complex,
//! `q` completes an orthonormal basis of R^{1,1}, and `(y0, .., y3)` span the
//! Minkowski block R^{3,1} = {q+, q-}^⊥ with `q± = p ± q`.
//!
//! A [`SigVec`] carries its signature tag. R^{3,1} and R^{1,1} vectors are
//! stored compactly and must be embedded explicitly before they meet an
//! R^{4,2} vector.

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use nalgebra::{Matrix2, Matrix6, Vector6};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative least-squares residual above which four points are not on one line.
pub const COLLINEARITY_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Signature {
    /// Lie sphere space, basis `(p, q, y0, y1, y2, y3)`.
    R42,
    /// Minkowski space, basis `(y0, y1, y2, y3)`.
    R31,
    /// The plane `span{p, q}`.
    R11,
}

const W42: [f64; 6] = [-1.0, 1.0, -1.0, 1.0, 1.0, 1.0];
const W31: [f64; 4] = [-1.0, 1.0, 1.0, 1.0];
const W11: [f64; 2] = [-1.0, 1.0];

impl Signature {
    pub const fn dim(self) -> usize {
        match self {
            Signature::R42 => 6,
            Signature::R31 => 4,
            Signature::R11 => 2,
        }
    }

    pub fn weights(self) -> &'static [f64] {
        match self {
            Signature::R42 => &W42,
            Signature::R31 => &W31,
            Signature::R11 => &W11,
        }
    }
}

/// A vector in one of R^{4,2}, R^{3,1}, R^{1,1}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SigVec {
    sig: Signature,
    c: [f64; 6],
}

impl SigVec {
    pub const fn zero(sig: Signature) -> Self {
        SigVec { sig, c: [0.0; 6] }
    }

    pub const fn r42(c: [f64; 6]) -> Self {
        SigVec { sig: Signature::R42, c }
    }

    pub const fn r31(y: [f64; 4]) -> Self {
        SigVec {
            sig: Signature::R31,
            c: [y[0], y[1], y[2], y[3], 0.0, 0.0],
        }
    }

    pub const fn r11(pq: [f64; 2]) -> Self {
        SigVec {
            sig: Signature::R11,
            c: [pq[0], pq[1], 0.0, 0.0, 0.0, 0.0],
        }
    }

    /// Builds a vector from a coordinate slice whose length fixes the signature.
    pub fn from_slice(sig: Signature, coords: &[f64]) -> Result<Self> {
        if coords.len() != sig.dim() {
            return Err(Error::InvalidDomain(format!(
                "{:?} expects {} coordinates, got {}",
                sig,
                sig.dim(),
                coords.len()
            )));
        }
        let mut c = [0.0; 6];
        c[..coords.len()].copy_from_slice(coords);
        Ok(SigVec { sig, c })
    }

    /// Point sphere complex `p`, `|p|² = -1`.
    pub const fn p() -> Self {
        Self::r42([1.0, 0.0, 0.0, 0.0, 0.0, 0.0])
    }

    pub const fn q() -> Self {
        Self::r42([0.0, 1.0, 0.0, 0.0, 0.0, 0.0])
    }

    /// Minkowski basis vector `y_k` of R^{3,1}.
    pub fn y(k: usize) -> Self {
        assert!(k < 4, "R^{{3,1}} basis index out of range");
        let mut c = [0.0; 4];
        c[k] = 1.0;
        Self::r31(c)
    }

    pub fn signature(&self) -> Signature {
        self.sig
    }

    pub fn coords(&self) -> &[f64] {
        &self.c[..self.sig.dim()]
    }

    /// Zero-pads R^{3,1} and R^{1,1} vectors into R^{4,2}.
    pub fn embed(&self) -> SigVec {
        match self.sig {
            Signature::R42 => *self,
            Signature::R31 => {
                Self::r42([0.0, 0.0, self.c[0], self.c[1], self.c[2], self.c[3]])
            }
            Signature::R11 => Self::r42([self.c[0], self.c[1], 0.0, 0.0, 0.0, 0.0]),
        }
    }

    /// Orthogonal projection of an R^{4,2} vector onto the R^{3,1} block.
    pub fn project_r31(&self) -> SigVec {
        match self.sig {
            Signature::R42 => Self::r31([self.c[2], self.c[3], self.c[4], self.c[5]]),
            Signature::R31 => *self,
            Signature::R11 => Self::zero(Signature::R31),
        }
    }

    /// Orthogonal projection of an R^{4,2} vector onto `span{p, q}`.
    pub fn project_r11(&self) -> SigVec {
        match self.sig {
            Signature::R42 | Signature::R11 => Self::r11([self.c[0], self.c[1]]),
            Signature::R31 => Self::zero(Signature::R11),
        }
    }

    /// Signature-weighted inner product.
    ///
    /// Panics on mismatched tags; use [`inner`] for the checked version.
    #[inline]
    pub fn dot(&self, other: &SigVec) -> f64 {
        assert_eq!(self.sig, other.sig, "inner product of mismatched signatures");
        self.sig
            .weights()
            .iter()
            .zip(self.c.iter().zip(other.c.iter()))
            .map(|(w, (x, y))| w * x * y)
            .sum()
    }

    #[inline]
    pub fn norm2(&self) -> f64 {
        self.dot(self)
    }

    /// Euclidean norm of the coordinate vector.
    #[inline]
    pub fn euclid_norm(&self) -> f64 {
        self.c.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    #[inline]
    pub fn euclid_dot(&self, other: &SigVec) -> f64 {
        self.c.iter().zip(other.c.iter()).map(|(x, y)| x * y).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|x| x.is_finite())
    }

    pub fn to_vector6(&self) -> Vector6<f64> {
        let e = self.embed();
        Vector6::from_column_slice(&e.c)
    }

    pub fn from_vector6(v: &Vector6<f64>) -> Self {
        Self::r42([v[0], v[1], v[2], v[3], v[4], v[5]])
    }
}

impl Add for SigVec {
    type Output = SigVec;
    #[inline]
    fn add(mut self, rhs: SigVec) -> SigVec {
        self += rhs;
        self
    }
}

impl AddAssign for SigVec {
    #[inline]
    fn add_assign(&mut self, rhs: SigVec) {
        debug_assert_eq!(self.sig, rhs.sig);
        for (a, b) in self.c.iter_mut().zip(rhs.c.iter()) {
            *a += b;
        }
    }
}

impl Sub for SigVec {
    type Output = SigVec;
    #[inline]
    fn sub(mut self, rhs: SigVec) -> SigVec {
        self -= rhs;
        self
    }
}

impl SubAssign for SigVec {
    #[inline]
    fn sub_assign(&mut self, rhs: SigVec) {
        debug_assert_eq!(self.sig, rhs.sig);
        for (a, b) in self.c.iter_mut().zip(rhs.c.iter()) {
            *a -= b;
        }
    }
}

impl Neg for SigVec {
    type Output = SigVec;
    #[inline]
    fn neg(mut self) -> SigVec {
        for a in self.c.iter_mut() {
            *a = -*a;
        }
        self
    }
}

impl Mul<f64> for SigVec {
    type Output = SigVec;
    #[inline]
    fn mul(mut self, k: f64) -> SigVec {
        for a in self.c.iter_mut() {
            *a *= k;
        }
        self
    }
}

impl Mul<SigVec> for f64 {
    type Output = SigVec;
    #[inline]
    fn mul(self, v: SigVec) -> SigVec {
        v * self
    }
}

/// Checked inner product.
pub fn inner(x: &SigVec, y: &SigVec) -> Result<f64> {
    if x.sig != y.sig {
        return Err(Error::SignatureMismatch {
            left: x.sig,
            right: y.sig,
        });
    }
    Ok(x.dot(y))
}

/// Gram matrix of R^{4,2}.
pub fn eta() -> Matrix6<f64> {
    Matrix6::from_diagonal(&Vector6::from_column_slice(&W42))
}

/// The fixed splitting R^{4,2} = R^{1,1} ⊕ R^{3,1} together with the two null
/// vectors `q± = p ± q` (the infinity sphere with its two orientations).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmbientSplit {
    pub p: SigVec,
    pub q: SigVec,
    pub qplus: SigVec,
    pub qminus: SigVec,
}

impl AmbientSplit {
    pub fn standard() -> Self {
        let p = SigVec::p();
        let q = SigVec::q();
        AmbientSplit {
            p,
            q,
            qplus: p + q,
            qminus: p - q,
        }
    }

    /// Maximum violation of `|p|²=-1, |q|²=1, (p,q)=0, |q±|²=0, (q+,q-)=-2`.
    pub fn invariant_residual(&self) -> f64 {
        [
            self.p.norm2() + 1.0,
            self.q.norm2() - 1.0,
            self.p.dot(&self.q),
            self.qplus.norm2(),
            self.qminus.norm2(),
            self.qplus.dot(&self.qminus) + 2.0,
        ]
        .iter()
        .fold(0.0_f64, |m, x| m.max(x.abs()))
    }
}

impl Default for AmbientSplit {
    fn default() -> Self {
        Self::standard()
    }
}

/// A contact element: null 2-plane `span{s1, s2}` in R^{4,2}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContactElement {
    pub s1: SigVec,
    pub s2: SigVec,
}

impl ContactElement {
    /// Largest of `|s1|², |s2|², (s1, s2)` in absolute value.
    pub fn null_residual(&self) -> f64 {
        self.s1
            .norm2()
            .abs()
            .max(self.s2.norm2().abs())
            .max(self.s1.dot(&self.s2).abs())
    }
}

/// The skew endomorphism `a ∧ b : z ↦ (a, z) b − (b, z) a`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SkewEndo {
    pub a: SigVec,
    pub b: SigVec,
}

impl SkewEndo {
    pub fn new(a: SigVec, b: SigVec) -> Self {
        SkewEndo { a, b }
    }

    #[inline]
    pub fn apply(&self, z: &SigVec) -> SigVec {
        self.b * self.a.dot(z) - self.a * self.b.dot(z)
    }

    /// Matrix of the endomorphism on R^{4,2} coordinates: `b aᵀη − a bᵀη`.
    pub fn matrix(&self) -> Matrix6<f64> {
        let a = self.a.to_vector6();
        let b = self.b.to_vector6();
        let e = eta();
        b * (e * a).transpose() - a * (e * b).transpose()
    }
}

/// `(a ∧ b) z`, checked for a common signature.
pub fn wedge_apply(e: &SkewEndo, z: &SigVec) -> Result<SigVec> {
    for v in [&e.a, &e.b] {
        if v.sig != z.sig {
            return Err(Error::SignatureMismatch {
                left: v.sig,
                right: z.sig,
            });
        }
    }
    Ok(e.apply(z))
}

/// Matrix of `a ∧ b` on R^{4,2}.
#[inline]
pub fn wedge_matrix(a: &SigVec, b: &SigVec) -> Matrix6<f64> {
    SkewEndo::new(a.embed(), b.embed()).matrix()
}

/// Applies a 6×6 matrix to an R^{4,2} vector.
#[inline]
pub fn apply(m: &Matrix6<f64>, v: &SigVec) -> SigVec {
    SigVec::from_vector6(&(m * v.to_vector6()))
}

/// `max |MᵀηM − η|`: how far `m` is from O(4,2).
pub fn orthogonality_defect(m: &Matrix6<f64>) -> f64 {
    let e = eta();
    (m.transpose() * e * m - e).amax()
}

/// Skewness defect of an endomorphism: `max |Mᵀη + ηM|`.
pub fn skewness_defect(m: &Matrix6<f64>) -> f64 {
    let e = eta();
    (m.transpose() * e + e * m).amax()
}

/// Coordinates of `z` in `span{a, b}` by Euclidean least squares, with the
/// residual relative to `|z|`.
fn line_coords(a: &SigVec, b: &SigVec, z: &SigVec) -> Result<(f64, f64, f64)> {
    let zn = z.euclid_norm();
    if zn == 0.0 {
        return Err(Error::DegenerateConfiguration("zero vector is not a projective point"));
    }
    let g = Matrix2::new(a.euclid_dot(a), a.euclid_dot(b), a.euclid_dot(b), b.euclid_dot(b));
    let rhs = nalgebra::Vector2::new(a.euclid_dot(z), b.euclid_dot(z));
    let sol = g
        .try_inverse()
        .map(|gi| gi * rhs)
        .ok_or(Error::DegenerateConfiguration("first two points coincide"))?;
    let fit = *a * sol[0] + *b * sol[1];
    let residual = (*z - fit).euclid_norm() / zn;
    Ok((sol[0], sol[1], residual))
}

/// Cross ratio of four points on a projective line.
///
/// Writes `c = αa + βb`, `d = γa + δb` and returns `(β/α)(γ/δ)`, the cross
/// ratio in the affine chart sending `a` to ∞ and `b` to 0. The pair `{c, d}`
/// separates `{a, b}` harmonically iff the result is −1.
pub fn cross_ratio(a: &SigVec, b: &SigVec, c: &SigVec, d: &SigVec) -> Result<f64> {
    let sig = a.sig;
    for v in [b, c, d] {
        if v.sig != sig {
            return Err(Error::SignatureMismatch {
                left: sig,
                right: v.sig,
            });
        }
    }
    let (na, nb) = (a.euclid_norm(), b.euclid_norm());
    if na == 0.0 || nb == 0.0 {
        return Err(Error::DegenerateConfiguration("zero vector is not a projective point"));
    }
    // Gram determinant relative to the norms: sin² of the angle between a and b.
    let cos = a.euclid_dot(b) / (na * nb);
    if 1.0 - cos * cos < 1e-12 {
        return Err(Error::DegenerateConfiguration("first two points coincide"));
    }
    let (alpha, beta, rc) = line_coords(a, b, c)?;
    let (gamma, delta, rd) = line_coords(a, b, d)?;
    let residual = rc.max(rd);
    if residual > COLLINEARITY_TOL {
        return Err(Error::NotCollinear { residual });
    }
    let (nc, nd) = (c.euclid_norm(), d.euclid_norm());
    let eps = 1e-12;
    if (alpha * na).abs() < eps * nc || (delta * nb).abs() < eps * nd {
        return Err(Error::DegenerateConfiguration(
            "third point coincides with the second or fourth with the first",
        ));
    }
    Ok((beta / alpha) * (gamma / delta))
}

/// Cross ratio of the curvature spheres against `s±` expressed through the
/// principal curvatures: `(κ1−1)/(κ1+1) · (κ2+1)/(κ2−1)`.
pub fn curvature_cross_ratio(kappa1: f64, kappa2: f64) -> f64 {
    (kappa1 - 1.0) / (kappa1 + 1.0) * (kappa2 + 1.0) / (kappa2 - 1.0)
}

/// `(s, q)`; zero means oriented contact of the two spheres.
pub fn check_contact(s: &SigVec, q: &SigVec) -> f64 {
    s.embed().dot(&q.embed())
}

/// Sine of the largest principal angle between `span{a0, a1}` and
/// `span{b0, b1}`, measured in the Euclidean structure of the coordinates.
pub fn max_principal_angle_sin(a: [&SigVec; 2], b: [&SigVec; 2]) -> Result<f64> {
    let qa = orthonormal_pair(a)?;
    let qb = orthonormal_pair(b)?;
    // Residual of projecting qa onto span(qb); its largest singular value is sin θ_max.
    let res: Vec<Vector6<f64>> = qa
        .iter()
        .map(|x| x - qb[0] * qb[0].dot(x) - qb[1] * qb[1].dot(x))
        .collect();
    let m = Matrix2::new(
        res[0].dot(&res[0]),
        res[0].dot(&res[1]),
        res[1].dot(&res[0]),
        res[1].dot(&res[1]),
    );
    let tr = m.trace();
    let det = m.determinant();
    let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
    Ok((tr / 2.0 + disc).max(0.0).sqrt())
}

fn orthonormal_pair(v: [&SigVec; 2]) -> Result<[Vector6<f64>; 2]> {
    let x = v[0].to_vector6();
    let y = v[1].to_vector6();
    let nx = x.norm();
    if nx == 0.0 {
        return Err(Error::DegenerateConfiguration("plane spanned by a zero vector"));
    }
    let x = x / nx;
    let y = y - x * x.dot(&y);
    let ny = y.norm();
    if ny < 1e-14 * v[1].euclid_norm().max(1.0) {
        return Err(Error::DegenerateConfiguration("plane generators are parallel"));
    }
    Ok([x, y / ny])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn vec6() -> impl Strategy<Value = SigVec> {
        proptest::array::uniform6(-3.0..3.0f64).prop_map(SigVec::r42)
    }

    #[test]
    fn basis_products() {
        let s = AmbientSplit::standard();
        assert_eq!(inner(&s.p, &s.p).unwrap(), -1.0);
        assert_eq!(inner(&s.qplus, &s.qminus).unwrap(), -2.0);
        assert_eq!(inner(&SigVec::y(1), &SigVec::y(2)).unwrap(), 0.0);
        assert_eq!(s.invariant_residual(), 0.0);
    }

    #[test]
    fn r31_block_is_orthogonal_to_q_pm() {
        let s = AmbientSplit::standard();
        for k in 0..4 {
            let y = SigVec::y(k).embed();
            assert_eq!(y.dot(&s.qplus), 0.0);
            assert_eq!(y.dot(&s.qminus), 0.0);
        }
        assert_eq!(SigVec::y(0).norm2(), -1.0);
        assert_eq!(SigVec::y(0).embed().norm2(), -1.0);
    }

    #[test]
    fn mismatched_signatures_are_rejected() {
        let err = inner(&SigVec::p(), &SigVec::y(0)).unwrap_err();
        assert!(matches!(err, Error::SignatureMismatch { .. }));
        let e = SkewEndo::new(SigVec::p(), SigVec::q());
        assert!(wedge_apply(&e, &SigVec::y(1)).is_err());
    }

    #[test]
    fn wedge_examples() {
        let p = SigVec::p();
        let q = SigVec::q();
        let e = SkewEndo::new(p, q);
        assert_eq!(wedge_apply(&e, &p).unwrap(), -q);
        let aa = SkewEndo::new(q, q);
        assert_eq!(wedge_apply(&aa, &SigVec::r42([1.0, 2.0, 3.0, 4.0, 5.0, 6.0])).unwrap(),
            SigVec::zero(Signature::R42));
        let z = SigVec::y(2).embed();
        assert_eq!(wedge_apply(&e, &z).unwrap(), SigVec::zero(Signature::R42));
    }

    #[test]
    fn wedge_matrix_matches_action() {
        let a = SigVec::r42([0.3, -1.0, 2.0, 0.5, 0.1, -0.7]);
        let b = SigVec::r42([1.1, 0.4, -0.2, 0.9, -1.3, 0.6]);
        let z = SigVec::r42([-0.5, 0.8, 0.2, -1.0, 0.3, 1.7]);
        let e = SkewEndo::new(a, b);
        let via_m = apply(&e.matrix(), &z);
        let direct = e.apply(&z);
        for (x, y) in via_m.coords().iter().zip(direct.coords()) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-14);
        }
        assert!(skewness_defect(&e.matrix()) < 1e-14);
    }

    #[test]
    fn cross_ratio_examples() {
        let s1 = SigVec::r42([1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        let s2 = SigVec::r42([0.0, 1.0, 1.0, 0.0, 0.0, 0.0]);
        let cr = cross_ratio(&(s1 + s2), &(s1 - s2), &s1, &s2).unwrap();
        assert_abs_diff_eq!(cr, -1.0, epsilon = 1e-14);
        let c = s1 * 0.3 + s2 * 2.0;
        assert_abs_diff_eq!(cross_ratio(&s1, &s2, &c, &c).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn curvature_cross_ratio_of_flat_pair() {
        let k1 = 1.0_f64.tanh();
        let k2 = 1.0 / 1.0_f64.tanh();
        assert_abs_diff_eq!(curvature_cross_ratio(k1, k2), -1.0, epsilon = 1e-12);
    }

    #[test]
    fn curvature_spheres_from_kappas_realise_the_cross_ratio() {
        // s_i = -(1+κ_i) S+ - (1-κ_i) S-, S± = s±/(s±, q∓).
        let split = AmbientSplit::standard();
        let sp = SigVec::r42([1.0, 1.0, 0.2, 0.9, -0.3, 0.4]);
        let sm = SigVec::r42([1.0, -1.0, 0.7, -0.1, 0.5, 0.2]);
        let big_sp = sp * (1.0 / sp.dot(&split.qminus));
        let big_sm = sm * (1.0 / sm.dot(&split.qplus));
        let (k1, k2) = (0.4_f64, 2.7_f64);
        let s1 = big_sp * -(1.0 + k1) - big_sm * (1.0 - k1);
        let s2 = big_sp * -(1.0 + k2) - big_sm * (1.0 - k2);
        let cr = cross_ratio(&sp, &sm, &s1, &s2).unwrap();
        assert_abs_diff_eq!(cr, curvature_cross_ratio(k1, k2), epsilon = 1e-12);
    }

    #[test]
    fn cross_ratio_errors() {
        let a = SigVec::r42([1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let b = SigVec::r42([0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        let off = SigVec::r42([0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(cross_ratio(&a, &b, &off, &(a + b)), Err(Error::NotCollinear { .. })));
        assert!(matches!(
            cross_ratio(&a, &(a * 2.0), &(a + b), &(a - b)),
            Err(Error::DegenerateConfiguration(_))
        ));
        assert!(matches!(
            cross_ratio(&a, &b, &b, &(a - b)),
            Err(Error::DegenerateConfiguration(_))
        ));
    }

    #[test]
    fn contact_examples() {
        let s = AmbientSplit::standard();
        assert_eq!(check_contact(&s.qplus, &s.qplus), 0.0);
        let phi = 0.7_f64;
        let f = SigVec::y(0).embed();
        let t = SigVec::y(3).embed();
        let s1 = (s.p + t) * phi.cosh() + (s.q + f) * phi.sinh();
        let s2 = (s.p + t) * phi.sinh() + (s.q + f) * phi.cosh();
        assert_abs_diff_eq!(check_contact(&s1, &s.qplus), -(-phi).exp(), epsilon = 1e-14);
        assert_abs_diff_eq!(check_contact(&(s1 + s2), &s.qplus), 0.0, epsilon = 1e-14);
        let ce = ContactElement { s1, s2 };
        assert!(ce.null_residual() < 1e-14);
    }

    #[test]
    fn principal_angle_of_equal_and_orthogonal_planes() {
        let e = |k: usize| {
            let mut c = [0.0; 6];
            c[k] = 1.0;
            SigVec::r42(c)
        };
        let s = max_principal_angle_sin([&e(0), &e(1)], [&(e(0) + e(1)), &(e(0) - e(1))]).unwrap();
        assert!(s < 1e-15);
        let s = max_principal_angle_sin([&e(0), &e(1)], [&e(0), &e(2)]).unwrap();
        assert_abs_diff_eq!(s, 1.0, epsilon = 1e-15);
    }

    proptest! {
        #[test]
        fn inner_is_symmetric_and_bilinear(x in vec6(), y in vec6(), z in vec6(), a in -2.0..2.0f64) {
            prop_assert!((x.dot(&y) - y.dot(&x)).abs() < 1e-12);
            let lhs = (x * a + z).dot(&y);
            let rhs = a * x.dot(&y) + z.dot(&y);
            prop_assert!((lhs - rhs).abs() < 1e-11);
        }

        #[test]
        fn wedge_is_skew(a in vec6(), b in vec6(), x in vec6(), y in vec6()) {
            let e = SkewEndo::new(a, b);
            let s = e.apply(&x).dot(&y) + x.dot(&e.apply(&y));
            prop_assert!(s.abs() < 1e-10);
        }

        #[test]
        fn cross_ratio_is_projective(
            a in vec6(), b in vec6(),
            cc in (0.2..2.0f64, 0.2..2.0f64), dd in (0.2..2.0f64, -2.0..-0.2f64),
            scales in proptest::array::uniform4(0.1..5.0f64),
        ) {
            let cosab = a.euclid_dot(&b) / (a.euclid_norm() * b.euclid_norm());
            prop_assume!(1.0 - cosab * cosab > 1e-3);
            let c = a * cc.0 + b * cc.1;
            let d = a * dd.0 + b * dd.1;
            let base = cross_ratio(&a, &b, &c, &d).unwrap();
            let scaled = cross_ratio(&(a * scales[0]), &(b * scales[1]), &(c * scales[2]), &(d * -scales[3])).unwrap();
            prop_assert!((base - scaled).abs() < 1e-8 * base.abs().max(1.0));
            let swapped = cross_ratio(&a, &b, &d, &c).unwrap();
            prop_assert!((base * swapped - 1.0).abs() < 1e-8);
        }
    }
}
