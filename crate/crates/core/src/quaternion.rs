//! Real quaternions, imaginary units and slice coordinates.
//!
//! `Quaternion<T>` is generic so that the polynomial layer can run in exact
//! rational arithmetic; everything analytic works with `Quaternion<f64>`.

use core::fmt;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Result, SliceError};

/// Coefficient field for quaternions: `f64` or exact rationals.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn to_f64(&self) -> f64;
    /// Exact conversion; every finite double is a dyadic rational.
    fn from_f64(v: f64) -> Self;
    fn from_i64(v: i64) -> Self;
}

impl Scalar for f64 {
    fn to_f64(&self) -> f64 {
        *self
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
}

impl Scalar for BigRational {
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn from_f64(v: f64) -> Self {
        BigRational::from_float(v).expect("finite double")
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
}

/// `w + x i + y j + z k`.
#[derive(Clone, Copy, PartialEq, Default)]
pub struct Quaternion<T = f64> {
    pub w: T,
    pub x: T,
    pub y: T,
    pub z: T,
}

pub type RationalQuaternion = Quaternion<BigRational>;

impl<T: Scalar> Quaternion<T> {
    pub fn new(w: T, x: T, y: T, z: T) -> Self {
        Quaternion { w, x, y, z }
    }

    pub fn from_real(w: T) -> Self {
        Quaternion { w, x: T::zero(), y: T::zero(), z: T::zero() }
    }

    pub fn zero() -> Self {
        Self::from_real(T::zero())
    }

    pub fn one() -> Self {
        Self::from_real(T::one())
    }

    pub fn i() -> Self {
        Quaternion::new(T::zero(), T::one(), T::zero(), T::zero())
    }

    pub fn j() -> Self {
        Quaternion::new(T::zero(), T::zero(), T::one(), T::zero())
    }

    pub fn k() -> Self {
        Quaternion::new(T::zero(), T::zero(), T::zero(), T::one())
    }

    pub fn conj(&self) -> Self {
        Quaternion::new(self.w.clone(), -self.x.clone(), -self.y.clone(), -self.z.clone())
    }

    pub fn norm_sqr(&self) -> T {
        self.w.clone() * self.w.clone()
            + self.x.clone() * self.x.clone()
            + self.y.clone() * self.y.clone()
            + self.z.clone() * self.z.clone()
    }

    pub fn scale(&self, s: &T) -> Self {
        Quaternion::new(
            self.w.clone() * s.clone(),
            self.x.clone() * s.clone(),
            self.y.clone() * s.clone(),
            self.z.clone() * s.clone(),
        )
    }

    pub fn re(&self) -> T {
        self.w.clone()
    }

    pub fn im(&self) -> Self {
        Quaternion::new(T::zero(), self.x.clone(), self.y.clone(), self.z.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.w.is_zero() && self.x.is_zero() && self.y.is_zero() && self.z.is_zero()
    }

    /// Euclidean inner product in R^4.
    pub fn dot(&self, o: &Self) -> T {
        self.w.clone() * o.w.clone()
            + self.x.clone() * o.x.clone()
            + self.y.clone() * o.y.clone()
            + self.z.clone() * o.z.clone()
    }

    /// `conj(q) / |q|^2`, or `None` for the zero quaternion.
    pub fn try_inv(&self) -> Option<Self> {
        let n = self.norm_sqr();
        if n.is_zero() {
            return None;
        }
        let c = self.conj();
        Some(Quaternion::new(c.w / n.clone(), c.x / n.clone(), c.y / n.clone(), c.z / n))
    }

    pub fn inv(&self) -> Result<Self> {
        self.try_inv().ok_or(SliceError::ZeroDivision)
    }

    pub fn to_f64(&self) -> Quaternion<f64> {
        Quaternion::new(self.w.to_f64(), self.x.to_f64(), self.y.to_f64(), self.z.to_f64())
    }

    pub fn from_f64(q: &Quaternion<f64>) -> Self {
        Quaternion::new(T::from_f64(q.w), T::from_f64(q.x), T::from_f64(q.y), T::from_f64(q.z))
    }
}

impl Quaternion<f64> {
    pub const ZERO: Quaternion = Quaternion { w: 0.0, x: 0.0, y: 0.0, z: 0.0 };
    pub const ONE: Quaternion = Quaternion { w: 1.0, x: 0.0, y: 0.0, z: 0.0 };
    pub const I: Quaternion = Quaternion { w: 0.0, x: 1.0, y: 0.0, z: 0.0 };
    pub const J: Quaternion = Quaternion { w: 0.0, x: 0.0, y: 1.0, z: 0.0 };
    pub const K: Quaternion = Quaternion { w: 0.0, x: 0.0, y: 0.0, z: 1.0 };

    pub const fn real(w: f64) -> Self {
        Quaternion { w, x: 0.0, y: 0.0, z: 0.0 }
    }

    pub fn norm(&self) -> f64 {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// `|im q|`.
    pub fn im_norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn dist(&self, o: &Self) -> f64 {
        (*self - *o).norm()
    }

    pub fn is_finite(&self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Vector cross product of the imaginary parts.
    pub fn cross(&self, o: &Self) -> Self {
        Quaternion::new(
            0.0,
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    /// True when `p` and `q` lie in a common slice `L_I`.
    pub fn coplanar(&self, o: &Self, tol: f64) -> bool {
        let a = self.im();
        let b = o.im();
        let na = a.norm();
        let nb = b.norm();
        if na <= tol || nb <= tol {
            return true;
        }
        a.cross(&b).norm() <= tol * na * nb
    }

    pub fn approx_eq(&self, o: &Self, tol: f64) -> bool {
        self.dist(o) <= tol
    }
}

impl<T: Scalar> Add for Quaternion<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Quaternion::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Scalar> Sub for Quaternion<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Quaternion::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Scalar> Neg for Quaternion<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Quaternion::new(-self.w, -self.x, -self.y, -self.z)
    }
}

// Hamilton product.
impl<T: Scalar> Mul for Quaternion<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (a1, b1, c1, d1) = (self.w, self.x, self.y, self.z);
        let (a2, b2, c2, d2) = (o.w, o.x, o.y, o.z);
        Quaternion::new(
            a1.clone() * a2.clone() - b1.clone() * b2.clone() - c1.clone() * c2.clone() - d1.clone() * d2.clone(),
            a1.clone() * b2.clone() + b1.clone() * a2.clone() + c1.clone() * d2.clone() - d1.clone() * c2.clone(),
            a1.clone() * c2.clone() - b1.clone() * d2.clone() + c1.clone() * a2.clone() + d1.clone() * b2.clone(),
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )
    }
}

impl<T: Scalar> AddAssign for Quaternion<T> {
    fn add_assign(&mut self, o: Self) {
        *self = self.clone() + o;
    }
}

impl<T: Scalar> SubAssign for Quaternion<T> {
    fn sub_assign(&mut self, o: Self) {
        *self = self.clone() - o;
    }
}

impl<T: Scalar> MulAssign for Quaternion<T> {
    fn mul_assign(&mut self, o: Self) {
        *self = self.clone() * o;
    }
}

impl Mul<f64> for Quaternion<f64> {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Quaternion::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Quaternion<f64>> for f64 {
    type Output = Quaternion<f64>;
    fn mul(self, q: Quaternion<f64>) -> Quaternion<f64> {
        q * self
    }
}

impl Div<f64> for Quaternion<f64> {
    type Output = Self;
    fn div(self, s: f64) -> Self {
        Quaternion::new(self.w / s, self.x / s, self.y / s, self.z / s)
    }
}

impl Add<f64> for Quaternion<f64> {
    type Output = Self;
    fn add(self, s: f64) -> Self {
        Quaternion::new(self.w + s, self.x, self.y, self.z)
    }
}

impl Sub<f64> for Quaternion<f64> {
    type Output = Self;
    fn sub(self, s: f64) -> Self {
        Quaternion::new(self.w - s, self.x, self.y, self.z)
    }
}

impl<T: Scalar> fmt::Debug for Quaternion<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}, {:?}, {:?}, {:?}]", self.w, self.x, self.y, self.z)
    }
}

impl fmt::Display for Quaternion<f64> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}i{:+}j{:+}k", self.w, self.x, self.y, self.z)
    }
}

impl Serialize for Quaternion<f64> {
    fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        [self.w, self.x, self.y, self.z].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Quaternion<f64> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let [w, x, y, z] = <[f64; 4]>::deserialize(d)?;
        Ok(Quaternion { w, x, y, z })
    }
}

/// A unit quaternion with zero real part, i.e. a square root of -1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Quaternion", into = "Quaternion")]
pub struct ImaginaryUnit(Quaternion);

impl TryFrom<Quaternion> for ImaginaryUnit {
    type Error = SliceError;
    fn try_from(q: Quaternion) -> Result<Self> {
        ImaginaryUnit::new(q)
    }
}

impl From<ImaginaryUnit> for Quaternion {
    fn from(u: ImaginaryUnit) -> Quaternion {
        u.0
    }
}

impl ImaginaryUnit {
    pub const I: ImaginaryUnit = ImaginaryUnit(Quaternion::I);
    pub const J: ImaginaryUnit = ImaginaryUnit(Quaternion::J);
    pub const K: ImaginaryUnit = ImaginaryUnit(Quaternion::K);

    /// Accepts an (almost) unit imaginary quaternion and renormalizes it.
    pub fn new(q: Quaternion) -> Result<Self> {
        let n = q.im_norm();
        if q.w.abs() > 1e-9 || (n - 1.0).abs() > 1e-9 {
            return Err(SliceError::NotImaginaryUnit);
        }
        Ok(ImaginaryUnit(q.im() / n))
    }

    /// Normalizes any nonzero vector `(x, y, z)`.
    pub fn from_vector(x: f64, y: f64, z: f64) -> Result<Self> {
        let n = (x * x + y * y + z * z).sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(SliceError::NotImaginaryUnit);
        }
        Ok(ImaginaryUnit(Quaternion::new(0.0, x / n, y / n, z / n)))
    }

    /// Unit direction of `im q`, if nonzero.
    pub fn of(q: &Quaternion) -> Option<Self> {
        let n = q.im_norm();
        if n > 0.0 {
            Some(ImaginaryUnit(q.im() / n))
        } else {
            None
        }
    }

    pub fn q(&self) -> Quaternion {
        self.0
    }

    pub fn neg(&self) -> Self {
        ImaginaryUnit(-self.0)
    }

    /// A deterministic unit orthogonal to `self`.
    pub fn orthogonal(&self) -> Self {
        let v = self.0;
        let (ax, ay, az) = (v.x.abs(), v.y.abs(), v.z.abs());
        let e = if ax <= ay && ax <= az {
            Quaternion::I
        } else if ay <= az {
            Quaternion::J
        } else {
            Quaternion::K
        };
        let c = v.cross(&e);
        ImaginaryUnit(c / c.norm())
    }

    /// `re + im * I`.
    pub fn embed(&self, z: Complex64) -> Quaternion {
        Quaternion::real(z.re) + self.0 * z.im
    }

    /// Coordinates of the orthogonal projection of `q` onto `L_I`.
    pub fn project(&self, q: &Quaternion) -> Complex64 {
        Complex64::new(q.w, q.im().dot(&self.0))
    }

    /// Geodesic angle between two units.
    pub fn angle(&self, o: &ImaginaryUnit) -> f64 {
        self.0.dot(&o.0).clamp(-1.0, 1.0).acos()
    }

    pub fn dist(&self, o: &ImaginaryUnit) -> f64 {
        self.0.dist(&o.0)
    }
}

/// Components of `q` in the basis `1, I, J, IJ` with `J` orthogonal to `I`.
/// Returns the `L_I` parts `(F, G)` with `q = F + G J`.
pub fn split_left(q: &Quaternion, i: &ImaginaryUnit, j: &ImaginaryUnit) -> (Complex64, Complex64) {
    let ij = i.q() * j.q();
    let v = q.im();
    (
        Complex64::new(q.w, v.dot(&i.q())),
        Complex64::new(v.dot(&j.q()), v.dot(&ij)),
    )
}

/// Parts `(H, K)` with `q = H + J K`, both in `L_I`.
pub fn split_right(q: &Quaternion, i: &ImaginaryUnit, j: &ImaginaryUnit) -> (Complex64, Complex64) {
    let ij = i.q() * j.q();
    let v = q.im();
    (
        Complex64::new(q.w, v.dot(&i.q())),
        Complex64::new(v.dot(&j.q()), -v.dot(&ij)),
    )
}

/// `q = x + y I` with `y >= 0`; `unit` is `None` on the real axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceCoords {
    pub x: f64,
    pub y: f64,
    pub unit: Option<ImaginaryUnit>,
}

impl SliceCoords {
    pub fn recompose(&self) -> Quaternion {
        match self.unit {
            Some(u) => Quaternion::real(self.x) + u.q() * self.y,
            None => Quaternion::real(self.x),
        }
    }

    /// The unit, or `fallback` on the real axis.
    pub fn unit_or(&self, fallback: ImaginaryUnit) -> ImaginaryUnit {
        self.unit.unwrap_or(fallback)
    }
}

pub fn slice_decompose(q: &Quaternion) -> SliceCoords {
    let y = q.im_norm();
    SliceCoords { x: q.w, y, unit: ImaginaryUnit::of(q) }
}

/// Whether `p` and `q` lie on the same sphere `x + y S`.
pub fn same_sphere(p: &Quaternion, q: &Quaternion, tol: f64) -> bool {
    (p.w - q.w).abs() <= tol && (p.im_norm() - q.im_norm()).abs() <= tol
}

/// `x + y I` for a unit `I`.
pub fn at(x: f64, y: f64, u: &ImaginaryUnit) -> Quaternion {
    Quaternion::real(x) + u.q() * y
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(w: f64, x: f64, y: f64, z: f64) -> Quaternion {
        Quaternion::new(w, x, y, z)
    }

    #[test]
    fn hamilton_product_reference() {
        assert_eq!(q(1., 2., 3., 4.) * q(5., 6., 7., 8.), q(-60., 12., 30., 24.));
        assert_eq!(Quaternion::I * Quaternion::J, Quaternion::K);
        assert_eq!(Quaternion::J * Quaternion::I, -Quaternion::K);
        assert_eq!(Quaternion::K * Quaternion::K, Quaternion::real(-1.0));
    }

    #[test]
    fn inverse_reference() {
        let inv = q(1., 1., 1., 1.).inv().unwrap();
        assert!(inv.approx_eq(&(q(1., -1., -1., -1.) / 4.0), 1e-15));
        assert_eq!(Quaternion::ZERO.inv(), Err(SliceError::ZeroDivision));
    }

    #[test]
    fn slice_coordinates() {
        let c = slice_decompose(&q(3., 0., 4., 0.));
        assert_eq!((c.x, c.y), (3.0, 4.0));
        assert_eq!(c.unit.unwrap().q(), Quaternion::J);
        let r = slice_decompose(&Quaternion::real(-2.0));
        assert!(r.unit.is_none());
        assert_eq!(r.recompose(), Quaternion::real(-2.0));
    }

    #[test]
    fn sphere_membership() {
        assert!(same_sphere(&Quaternion::I, &Quaternion::J, 1e-12));
        assert!(!same_sphere(&Quaternion::I, &q(0., 2., 0., 0.), 1e-12));
    }

    #[test]
    fn json_is_four_array() {
        let s = serde_json::to_string(&q(1., 2., 3., 4.)).unwrap();
        assert_eq!(s, "[1.0,2.0,3.0,4.0]");
        let back: Quaternion = serde_json::from_str(&s).unwrap();
        assert_eq!(back, q(1., 2., 3., 4.));
        assert!(serde_json::from_str::<ImaginaryUnit>("[0,2,0,0]").is_err());
    }

    #[test]
    fn splits_rebuild() {
        let i = ImaginaryUnit::from_vector(1., 2., -1.).unwrap();
        let j = i.orthogonal();
        let x = q(0.3, -1.2, 0.7, 2.5);
        let (f, g) = split_left(&x, &i, &j);
        assert!((i.embed(f) + i.embed(g) * j.q()).approx_eq(&x, 1e-14));
        let (h, k) = split_right(&x, &i, &j);
        assert!((i.embed(h) + j.q() * i.embed(k)).approx_eq(&x, 1e-14));
    }

    #[test]
    fn rational_arithmetic_is_exact() {
        let a = RationalQuaternion::from_f64(&q(0.5, 0.25, -1.0, 3.0));
        let b = a.inv().unwrap();
        assert_eq!(a.clone() * b, RationalQuaternion::one());
    }
}
