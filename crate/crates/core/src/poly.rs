//! Quaternionic polynomials with right coefficients, `f(q) = sum q^n a_n`,
//! real polynomials, and rational functions over real denominators.
//!
//! All arithmetic here is exact in the coefficient field; instantiate with
//! `BigRational` for exact results.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SliceError};
use crate::quaternion::{Quaternion, Scalar};

/// Real-coefficient polynomial, ascending order. The zero polynomial has no
/// coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de> + Scalar"))]
pub struct RealPoly<T: Scalar = f64> {
    coeffs: Vec<T>,
}

impl<T: Scalar> RealPoly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        RealPoly { coeffs }
    }

    pub fn constant(c: T) -> Self {
        RealPoly::new(vec![c])
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// `(q - x)^2 + y2 = q^2 - 2x q + x^2 + y2`.
    pub fn sphere(x: T, y2: T) -> Self {
        let two = T::one() + T::one();
        RealPoly::new(vec![x.clone() * x.clone() + y2, -(two * x), T::one()])
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return RealPoly::new(vec![]);
        }
        let mut c = vec![T::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] = c[i + j].clone() + a.clone() * b.clone();
            }
        }
        RealPoly::new(c)
    }

    pub fn pow(&self, n: usize) -> Self {
        let mut r = RealPoly::constant(T::one());
        for _ in 0..n {
            r = r.mul(self);
        }
        r
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let get = |v: &Vec<T>, i: usize| v.get(i).cloned().unwrap_or_else(T::zero);
        RealPoly::new((0..n).map(|i| get(&self.coeffs, i) + get(&o.coeffs, i)).collect())
    }

    pub fn scale(&self, s: &T) -> Self {
        RealPoly::new(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    pub fn derivative(&self) -> Self {
        RealPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(n, c)| c.clone() * T::from_i64(n as i64))
                .collect(),
        )
    }

    /// Euclidean division `self = d * q + r`.
    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self)> {
        let dd = d.degree().ok_or(SliceError::ZeroDivision)?;
        let lead = d.coeffs[dd].clone();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Ok((RealPoly::new(vec![]), self.clone()));
        }
        let mut q = vec![T::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = r[k + dd].clone() / lead.clone();
            for (i, dc) in d.coeffs.iter().enumerate() {
                r[k + i] = r[k + i].clone() - c.clone() * dc.clone();
            }
            q[k] = c;
        }
        r.truncate(dd);
        Ok((RealPoly::new(q), RealPoly::new(r)))
    }

    pub fn eval_quat(&self, q: &Quaternion<T>) -> Quaternion<T> {
        let mut acc = Quaternion::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * q.clone() + Quaternion::from_real(c.clone());
        }
        acc
    }

    /// Spherical data `(value, derivative)` on the sphere `x + y S`, `y2 = y^2`.
    pub fn spherical_at(&self, x: &T, y2: &T) -> (T, T) {
        let (_, r) = self.div_rem(&RealPoly::sphere(x.clone(), y2.clone())).expect("monic");
        let a = r.coeffs.first().cloned().unwrap_or_else(T::zero);
        let b = r.coeffs.get(1).cloned().unwrap_or_else(T::zero);
        (a + x.clone() * b.clone(), b)
    }

    pub fn to_f64(&self) -> RealPoly<f64> {
        RealPoly::new(self.coeffs.iter().map(|c| c.to_f64()).collect())
    }

    pub fn monic(&self) -> Self {
        match self.coeffs.last() {
            Some(l) => {
                let inv = T::one() / l.clone();
                self.scale(&inv)
            }
            None => self.clone(),
        }
    }

    /// Monic greatest common divisor (meaningful in exact arithmetic).
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero");
            a = b;
            b = r;
        }
        a.monic()
    }
}

impl RealPoly<f64> {
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    /// Largest absolute coefficient.
    pub fn scale_norm(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

/// Quaternionic polynomial with right coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct QPoly<T: Scalar = f64> {
    coeffs: Vec<Quaternion<T>>,
}

impl<T: Scalar> QPoly<T> {
    pub fn new(mut coeffs: Vec<Quaternion<T>>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn zero() -> Self {
        QPoly { coeffs: vec![] }
    }

    pub fn constant(c: Quaternion<T>) -> Self {
        QPoly::new(vec![c])
    }

    /// The identity function `q`.
    pub fn identity() -> Self {
        QPoly::new(vec![Quaternion::zero(), Quaternion::one()])
    }

    /// `q - p`.
    pub fn linear(p: &Quaternion<T>) -> Self {
        QPoly::new(vec![-p.clone(), Quaternion::one()])
    }

    pub fn from_real(r: &RealPoly<T>) -> Self {
        QPoly::new(r.coeffs().iter().map(|c| Quaternion::from_real(c.clone())).collect())
    }

    pub fn coeffs(&self) -> &[Quaternion<T>] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Horner evaluation of `sum q^n a_n`.
    pub fn eval(&self, q: &Quaternion<T>) -> Quaternion<T> {
        let mut acc = Quaternion::zero();
        for c in self.coeffs.iter().rev() {
            acc = q.clone() * acc + c.clone();
        }
        acc
    }

    /// Regular (star) product: convolution of coefficients.
    pub fn star(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return QPoly::zero();
        }
        let mut c = vec![Quaternion::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] = c[i + j].clone() + a.clone() * b.clone();
            }
        }
        QPoly::new(c)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let get = |v: &Vec<Quaternion<T>>, i: usize| v.get(i).cloned().unwrap_or_else(Quaternion::zero);
        QPoly::new((0..n).map(|i| get(&self.coeffs, i) + get(&o.coeffs, i)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        QPoly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }

    /// `f * c` for a constant `c`: coefficients `a_n c`.
    pub fn mul_right(&self, c: &Quaternion<T>) -> Self {
        QPoly::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    /// `c * f` for a constant `c`: coefficients `c a_n`.
    pub fn mul_left(&self, c: &Quaternion<T>) -> Self {
        QPoly::new(self.coeffs.iter().map(|a| c.clone() * a.clone()).collect())
    }

    pub fn mul_real(&self, r: &RealPoly<T>) -> Self {
        self.star(&QPoly::from_real(r))
    }

    /// Regular conjugate: conjugated coefficients.
    pub fn conj(&self) -> Self {
        QPoly::new(self.coeffs.iter().map(|c| c.conj()).collect())
    }

    /// Symmetrization `f * f^c`, which has real coefficients.
    pub fn sym(&self) -> RealPoly<T> {
        RealPoly::new(self.star(&self.conj()).coeffs.iter().map(|c| c.re()).collect())
    }

    /// Cullen derivative `a1 + q 2 a2 + ...`.
    pub fn cullen(&self) -> Self {
        QPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(n, c)| c.scale(&T::from_i64(n as i64)))
                .collect(),
        )
    }

    /// Division by a real polynomial: `self = d * q + r` with `deg r < deg d`.
    pub fn div_rem_real(&self, d: &RealPoly<T>) -> Result<(Self, Self)> {
        let dd = d.degree().ok_or(SliceError::ZeroDivision)?;
        let lead = d.coeffs()[dd].clone();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Ok((QPoly::zero(), self.clone()));
        }
        let mut q = vec![Quaternion::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = r[k + dd].scale(&(T::one() / lead.clone()));
            for (i, dc) in d.coeffs().iter().enumerate() {
                r[k + i] = r[k + i].clone() - c.scale(dc);
            }
            q[k] = c;
        }
        r.truncate(dd);
        Ok((QPoly::new(q), QPoly::new(r)))
    }

    /// `self = (q - p) * g + rem`, returning `(g, rem)`.
    pub fn left_div_linear(&self, p: &Quaternion<T>) -> (Self, Quaternion<T>) {
        let n = self.coeffs.len();
        if n == 0 {
            return (QPoly::zero(), Quaternion::zero());
        }
        let mut g = vec![Quaternion::zero(); n - 1];
        let mut carry = Quaternion::zero();
        for k in (1..n).rev() {
            carry = self.coeffs[k].clone() + p.clone() * carry;
            g[k - 1] = carry.clone();
        }
        let rem = self.coeffs[0].clone() + p.clone() * carry;
        (QPoly::new(g), rem)
    }

    /// `self = g * (q - p) + rem`, returning `(g, rem)`.
    pub fn right_div_linear(&self, p: &Quaternion<T>) -> (Self, Quaternion<T>) {
        let n = self.coeffs.len();
        if n == 0 {
            return (QPoly::zero(), Quaternion::zero());
        }
        let mut g = vec![Quaternion::zero(); n - 1];
        let mut carry = Quaternion::zero();
        for k in (1..n).rev() {
            carry = self.coeffs[k].clone() + carry * p.clone();
            g[k - 1] = carry.clone();
        }
        let rem = self.coeffs[0].clone() + carry * p.clone();
        (QPoly::new(g), rem)
    }

    /// Spherical value and derivative on `x + y S` with `y2 = y^2`, from the
    /// remainder `alpha + q beta` of division by `(q - x)^2 + y^2`.
    pub fn spherical_at(&self, x: &T, y2: &T) -> (Quaternion<T>, Quaternion<T>) {
        let (_, r) = self.div_rem_real(&RealPoly::sphere(x.clone(), y2.clone())).expect("monic");
        let a = r.coeffs.first().cloned().unwrap_or_else(Quaternion::zero);
        let b = r.coeffs.get(1).cloned().unwrap_or_else(Quaternion::zero);
        (a + b.scale(x), b)
    }

    pub fn to_f64(&self) -> QPoly<f64> {
        QPoly::new(self.coeffs.iter().map(|c| c.to_f64()).collect())
    }

    pub fn from_f64(p: &QPoly<f64>) -> Self {
        QPoly::new(p.coeffs.iter().map(Quaternion::from_f64).collect())
    }

    /// `(q - p)^{*n}` expanded as `sum C(n,k) q^k (-p)^(n-k)`.
    pub fn linear_power(p: &Quaternion<T>, n: usize) -> Self {
        let mut r = QPoly::constant(Quaternion::one());
        let l = QPoly::linear(p);
        for _ in 0..n {
            r = r.star(&l);
        }
        r
    }
}

impl QPoly<f64> {
    /// Largest coefficient norm, at least 1e-300.
    pub fn scale_norm(&self) -> f64 {
        self.coeffs.iter().fold(1e-300, |m, c| m.max(c.norm()))
    }

    /// Drops trailing coefficients below `tol * scale`.
    pub fn trimmed(&self, tol: f64) -> Self {
        let s = self.scale_norm();
        let mut c = self.coeffs.clone();
        while c.last().map_or(false, |a| a.norm() <= tol * s) {
            c.pop();
        }
        QPoly::new(c)
    }
}

/// Polynomial JSON: `{"coeffs": [[w,x,y,z], ...]}` in ascending order.
#[derive(Serialize, Deserialize)]
struct PolyJson {
    coeffs: Vec<Quaternion>,
}

impl Serialize for QPoly<f64> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        PolyJson { coeffs: self.coeffs.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for QPoly<f64> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        Ok(QPoly::new(PolyJson::deserialize(d)?.coeffs))
    }
}

/// `den^{-1} num` with a real-coefficient denominator.
#[derive(Clone, Debug, PartialEq)]
pub struct QRational<T: Scalar = f64> {
    pub num: QPoly<T>,
    pub den: RealPoly<T>,
}

impl<T: Scalar> QRational<T> {
    pub fn new(num: QPoly<T>, den: RealPoly<T>) -> Result<Self> {
        if den.is_zero() {
            return Err(SliceError::ZeroDivision);
        }
        Ok(QRational { num, den })
    }

    pub fn from_poly(p: QPoly<T>) -> Self {
        QRational { num: p, den: RealPoly::constant(T::one()) }
    }

    pub fn eval(&self, q: &Quaternion<T>) -> Result<Quaternion<T>> {
        let d = self.den.eval_quat(q).inv()?;
        Ok(d * self.num.eval(q))
    }

    pub fn star(&self, o: &Self) -> Self {
        QRational { num: self.num.star(&o.num), den: self.den.mul(&o.den) }
    }

    pub fn conj(&self) -> Self {
        QRational { num: self.num.conj(), den: self.den.clone() }
    }

    /// `f^s = n^s / d^2`.
    pub fn sym(&self) -> QRational<T> {
        QRational {
            num: QPoly::from_real(&self.num.sym()),
            den: self.den.mul(&self.den),
        }
    }

    /// `f^{-*} = d n^c / n^s`.
    pub fn reciprocal(&self) -> Result<Self> {
        let s = self.num.sym();
        if s.is_zero() {
            return Err(SliceError::ZeroDivisorOnDomain);
        }
        Ok(QRational { num: self.num.conj().mul_real(&self.den), den: s })
    }

    /// Spherical data on `x + y S`.
    pub fn spherical_at(&self, x: &T, y2: &T) -> Result<(Quaternion<T>, Quaternion<T>)> {
        let (nv, nd) = self.num.spherical_at(x, y2);
        let (dv, dd) = self.den.spherical_at(x, y2);
        let det = dv.clone() * dv.clone() + y2.clone() * dd.clone() * dd.clone();
        if det.is_zero() {
            return Err(SliceError::ZeroDivision);
        }
        let (rv, rd) = (dv / det.clone(), -dd / det);
        // Product of the real-data reciprocal with the numerator data.
        let v = nv.scale(&rv) - nd.scale(&(y2.clone() * rd.clone()));
        let d = nd.scale(&rv) + nv.scale(&rd);
        Ok((v, d))
    }

    pub fn to_f64(&self) -> QRational<f64> {
        QRational { num: self.num.to_f64(), den: self.den.to_f64() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = Quaternion;

    #[test]
    fn star_product_non_commutative() {
        let a = QPoly::linear(&Q::I);
        let b = QPoly::linear(&Q::J);
        let f = a.star(&b);
        // q^2 - q(i + j) + k
        assert_eq!(f.coeffs(), &[Q::K, -(Q::I + Q::J), Q::ONE]);
        assert_eq!(f.eval(&Q::J), Q::K * 2.0);
        assert_eq!(f.eval(&Q::I), Q::ZERO);
    }

    #[test]
    fn conjugate_and_symmetrization_of_binomial() {
        let p = Q::new(1.0, 0.0, 2.0, 0.0);
        let l = QPoly::linear(&p);
        assert_eq!(l.conj(), QPoly::linear(&p.conj()));
        assert_eq!(l.sym(), RealPoly::new(vec![5.0, -2.0, 1.0]));
    }

    #[test]
    fn linear_divisions_round_trip() {
        let f = QPoly::new(vec![Q::new(1., 2., 0., -1.), Q::new(0., 1., 1., 0.), Q::new(2., 0., 0., 1.), Q::ONE]);
        let p = Q::new(0.5, -1.0, 0.25, 2.0);
        let (g, r) = f.left_div_linear(&p);
        let back = QPoly::linear(&p).star(&g).add(&QPoly::constant(r));
        for (a, b) in back.coeffs().iter().zip(f.coeffs()) {
            assert!(a.approx_eq(b, 1e-12));
        }
        let (g, r) = f.right_div_linear(&p);
        let back = g.star(&QPoly::linear(&p)).add(&QPoly::constant(r));
        for (a, b) in back.coeffs().iter().zip(f.coeffs()) {
            assert!(a.approx_eq(b, 1e-12));
        }
    }

    #[test]
    fn spherical_data_of_square() {
        let f = QPoly::new(vec![Q::ZERO, Q::ZERO, Q::ONE]);
        let (v, d) = f.spherical_at(&0.0, &1.0);
        assert_eq!((v, d), (Q::real(-1.0), Q::ZERO));
        let (v, d) = f.spherical_at(&2.0, &9.0);
        assert_eq!((v, d), (Q::real(4.0 - 9.0), Q::real(4.0)));
    }

    #[test]
    fn exact_rational_reciprocal() {
        let p = QPoly::<BigRational>::linear(&Quaternion::from_f64(&Q::new(1.0, 0.0, 2.0, 0.0)));
        let f = QRational::from_poly(p);
        let r = f.reciprocal().unwrap();
        let prod = f.star(&r);
        let (qq, rem) = prod.num.div_rem_real(&prod.den).unwrap();
        assert!(rem.is_zero());
        assert_eq!(qq, QPoly::constant(Quaternion::one()));
    }

    #[test]
    fn poly_json_round_trip() {
        let f = QPoly::new(vec![Q::real(-1.0), Q::ZERO, Q::ONE]);
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"coeffs":[[-1.0,0.0,0.0,0.0],[0.0,0.0,0.0,0.0],[1.0,0.0,0.0,0.0]]}"#);
        assert_eq!(serde_json::from_str::<QPoly>(&s).unwrap(), f);
    }
}
