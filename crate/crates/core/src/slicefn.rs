//! Slice regular functions: evaluation, spherical value and derivative,
//! Cullen derivative, the extension formula and the real differential.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domains::{CapId, DomainSpec, Membership, Region, SphereCaps};
use crate::error::{Result, SliceError};
use crate::poly::{QPoly, QRational, RealPoly};
use crate::quaternion::{at, slice_decompose, ImaginaryUnit, Quaternion};
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backing {
    Polynomial,
    Rational,
    Series,
    ClosedForm,
    Composite,
    Sampled,
}

/// Spherical value and derivative at one point: `f(q) = value + im(q) deriv`.
/// On the real axis `deriv` carries the Cullen derivative when cheap, else 0;
/// only `value` is meaningful there.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sph {
    pub value: Quaternion,
    pub deriv: Quaternion,
}

impl Sph {
    pub fn new(value: Quaternion, deriv: Quaternion) -> Self {
        Sph { value, deriv }
    }

    /// Value of the rebuilt function at `q` on the same sphere.
    pub fn at(&self, q: &Quaternion) -> Quaternion {
        self.value + q.im() * self.deriv
    }

    /// `(f*g)°` and `(f*g)'` from the factors' data, `y2 = |im q|^2`.
    pub fn star(&self, g: &Sph, y2: f64) -> Sph {
        Sph {
            value: self.value * g.value - self.deriv * g.deriv * y2,
            deriv: self.value * g.deriv + self.deriv * g.value,
        }
    }

    pub fn conj(&self) -> Sph {
        Sph { value: self.value.conj(), deriv: self.deriv.conj() }
    }

    pub fn add(&self, g: &Sph) -> Sph {
        Sph { value: self.value + g.value, deriv: self.deriv + g.deriv }
    }

    pub fn sub(&self, g: &Sph) -> Sph {
        Sph { value: self.value - g.value, deriv: self.deriv - g.deriv }
    }

    pub fn scale_norm(&self) -> f64 {
        self.value.norm().max(self.deriv.norm())
    }
}

/// Behaviour shared by all slice function representations.
pub trait SliceFn: Send + Sync {
    fn domain(&self) -> &DomainSpec;
    fn backing(&self) -> Backing;
    /// Spherical data at `q`; the caller has checked domain membership.
    fn sph(&self, q: &Quaternion) -> Result<Sph>;
    fn eval(&self, q: &Quaternion) -> Result<Quaternion> {
        Ok(self.sph(q)?.at(q))
    }
    /// Exact Cullen derivative when available.
    fn cullen(&self, _q: &Quaternion) -> Option<Result<Quaternion>> {
        None
    }
    /// Exact rational form when the backing is algebraic.
    fn rational(&self) -> Option<QRational> {
        None
    }
    fn label(&self) -> String;
}

/// Immutable, cheaply clonable handle to a slice function.
#[derive(Clone)]
pub struct SliceFunction(Arc<dyn SliceFn>);

impl fmt::Debug for SliceFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SliceFunction({})", self.0.label())
    }
}

impl SliceFunction {
    pub fn new<F: SliceFn + 'static>(f: F) -> Self {
        SliceFunction(Arc::new(f))
    }

    pub fn poly(p: QPoly) -> Self {
        SliceFunction::new(PolyFn { p, dom: DomainSpec::whole() })
    }

    /// Polynomial restricted to a subdomain.
    pub fn poly_on(p: QPoly, dom: DomainSpec) -> Self {
        SliceFunction::new(PolyFn { p, dom })
    }

    pub fn rational(r: QRational) -> Self {
        let dom = DomainSpec::new(RationalDomain { den: r.den.clone() });
        SliceFunction::new(RationalFn { r, dom })
    }

    /// A function known only through its values; spherical data come from
    /// the two-unit formula on a nearby unit in the same cap.
    pub fn sampled<F>(dom: DomainSpec, label: &str, f: F) -> Self
    where
        F: Fn(&Quaternion) -> Result<Quaternion> + Send + Sync + 'static,
    {
        SliceFunction::new(EvalFn { f: Box::new(f), dom, name: label.to_string() })
    }

    pub fn domain(&self) -> &DomainSpec {
        self.0.domain()
    }

    pub fn backing(&self) -> Backing {
        self.0.backing()
    }

    pub fn label(&self) -> String {
        self.0.label()
    }

    pub fn eval(&self, q: &Quaternion) -> Result<Quaternion> {
        self.0.domain().check(q)?;
        self.0.eval(q)
    }

    pub fn sph(&self, q: &Quaternion) -> Result<Sph> {
        self.0.domain().check(q)?;
        self.0.sph(q)
    }

    pub fn as_rational(&self) -> Option<QRational> {
        self.0.rational()
    }

    pub fn as_poly(&self) -> Option<QPoly> {
        let r = self.0.rational()?;
        if r.den.degree() == Some(0) {
            let c = r.den.coeffs()[0];
            Some(QPoly::new(r.num.coeffs().iter().map(|a| *a / c).collect()))
        } else {
            None
        }
    }

    pub(crate) fn inner_cullen(&self, q: &Quaternion) -> Option<Result<Quaternion>> {
        self.0.cullen(q)
    }
}

impl From<QPoly> for SliceFunction {
    fn from(p: QPoly) -> Self {
        SliceFunction::poly(p)
    }
}

struct PolyFn {
    p: QPoly,
    dom: DomainSpec,
}

impl SliceFn for PolyFn {
    fn domain(&self) -> &DomainSpec {
        &self.dom
    }
    fn backing(&self) -> Backing {
        Backing::Polynomial
    }
    fn sph(&self, q: &Quaternion) -> Result<Sph> {
        let c = slice_decompose(q);
        if c.unit.is_none() {
            return Ok(Sph::new(self.p.eval(q), self.p.cullen().eval(q)));
        }
        let (v, d) = self.p.spherical_at(&c.x, &(c.y * c.y));
        Ok(Sph::new(v, d))
    }
    fn eval(&self, q: &Quaternion) -> Result<Quaternion> {
        Ok(self.p.eval(q))
    }
    fn cullen(&self, q: &Quaternion) -> Option<Result<Quaternion>> {
        Some(Ok(self.p.cullen().eval(q)))
    }
    fn rational(&self) -> Option<QRational> {
        Some(QRational::from_poly(self.p.clone()))
    }
    fn label(&self) -> String {
        format!("poly(deg {:?})", self.p.degree())
    }
}

/// H minus the zero set of a real polynomial, with a relative collar.
struct RationalDomain {
    den: RealPoly,
}

impl Region for RationalDomain {
    fn classify(&self, q: &Quaternion) -> Membership {
        if !q.is_finite() {
            return Membership::Outside;
        }
        let v = self.den.eval_quat(q).norm();
        let scale = self.den.scale_norm() * (1.0 + q.norm()).powi(self.den.degree().unwrap_or(0) as i32);
        if v <= 1e-13 * scale {
            Membership::Boundary
        } else {
            Membership::Inside
        }
    }
    fn label(&self) -> String {
        "H minus zeros of a real polynomial".into()
    }
    fn symmetric(&self) -> bool {
        true
    }
}

struct RationalFn {
    r: QRational,
    dom: DomainSpec,
}

impl SliceFn for RationalFn {
    fn domain(&self) -> &DomainSpec {
        &self.dom
    }
    fn backing(&self) -> Backing {
        Backing::Rational
    }
    fn sph(&self, q: &Quaternion) -> Result<Sph> {
        let c = slice_decompose(q);
        if c.unit.is_none() {
            return Ok(Sph::new(self.r.eval(q)?, Quaternion::ZERO));
        }
        let (v, d) = self.r.spherical_at(&c.x, &(c.y * c.y))?;
        Ok(Sph::new(v, d))
    }
    fn eval(&self, q: &Quaternion) -> Result<Quaternion> {
        self.r.eval(q)
    }
    fn rational(&self) -> Option<QRational> {
        Some(self.r.clone())
    }
    fn label(&self) -> String {
        format!("rational(num deg {:?}, den deg {:?})", self.r.num.degree(), self.r.den.degree())
    }
}

type Evaluator = Box<dyn Fn(&Quaternion) -> Result<Quaternion> + Send + Sync>;

struct EvalFn {
    f: Evaluator,
    dom: DomainSpec,
    name: String,
}

impl SliceFn for EvalFn {
    fn domain(&self) -> &DomainSpec {
        &self.dom
    }
    fn backing(&self) -> Backing {
        Backing::Sampled
    }
    fn sph(&self, q: &Quaternion) -> Result<Sph> {
        local_two_point(&|p| (self.f)(p), &self.dom, q)
    }
    fn eval(&self, q: &Quaternion) -> Result<Quaternion> {
        (self.f)(q)
    }
    fn label(&self) -> String {
        self.name.clone()
    }
}

/// Thm 2.15 data from values at `x + yJ` and `x + yK`.
pub fn two_unit_formula(fj: Quaternion, fk: Quaternion, j: &ImaginaryUnit, k: &ImaginaryUnit, y: f64) -> Result<Sph> {
    let d = (j.q() - k.q()).inv().map_err(|_| SliceError::UnitsEqual)?;
    let b = d * (j.q() * fj - k.q() * fk);
    let c = d * (fj - fk);
    Ok(Sph::new(b, c / y))
}

/// Spherical data at `q` from a second unit close to `q`'s own, chosen on a
/// short great-circle arc that stays inside the domain.
pub fn local_two_point(f: &dyn Fn(&Quaternion) -> Result<Quaternion>, dom: &DomainSpec, q: &Quaternion) -> Result<Sph> {
    let c = slice_decompose(q);
    let Some(j) = c.unit else {
        return Ok(Sph::new(f(q)?, Quaternion::ZERO));
    };
    let k = if dom.symmetric() {
        j.neg()
    } else {
        nearby_unit(dom, c.x, c.y, &j).ok_or_else(|| SliceError::CapTooSmall(q.to_string()))?
    };
    two_unit_formula(f(q)?, f(&at(c.x, c.y, &k))?, &j, &k, c.y)
}

/// A unit on a great circle through `j` whose connecting arc stays in the domain.
pub(crate) fn nearby_unit(dom: &DomainSpec, x: f64, y: f64, j: &ImaginaryUnit) -> Option<ImaginaryUnit> {
    let e = j.orthogonal();
    let mut theta: f64 = 0.6;
    while theta > 1e-3 {
        let ok = (0..=8).all(|s| {
            let pt = |s: usize| {
                let a = theta * s as f64 / 8.0;
                Quaternion::real(x) + (j.q() * a.cos() + e.q() * a.sin()) * y
            };
            s == 0 || (dom.contains(&pt(s)) && !dom.edge_blocked(&pt(s - 1), &pt(s)))
        });
        if ok {
            let u = j.q() * theta.cos() + e.q() * theta.sin();
            return ImaginaryUnit::new(u).ok();
        }
        // Try the opposite direction before shrinking.
        let ok = (0..=8).all(|s| {
            let pt = |s: usize| {
                let a = -theta * s as f64 / 8.0;
                Quaternion::real(x) + (j.q() * a.cos() + e.q() * a.sin()) * y
            };
            s == 0 || (dom.contains(&pt(s)) && !dom.edge_blocked(&pt(s - 1), &pt(s)))
        });
        if ok {
            let u = j.q() * theta.cos() - e.q() * theta.sin();
            return ImaginaryUnit::new(u).ok();
        }
        theta *= 0.5;
    }
    None
}

/// Spherical value and derivative on the cap of `p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphericalData {
    pub value: Quaternion,
    pub derivative: Quaternion,
    pub cap: CapId,
}

impl SphericalData {
    pub fn reconstruct(&self, q: &Quaternion) -> Quaternion {
        self.value + q.im() * self.derivative
    }
}

pub fn spherical_data(f: &SliceFunction, p: &Quaternion) -> Result<SphericalData> {
    spherical_data_with(f, p, tol::CAP_STEP_DEG)
}

/// Spherical data at `p` from the two grid units of `p`'s cap that are
/// farthest apart.
pub fn spherical_data_with(f: &SliceFunction, p: &Quaternion, step_deg: f64) -> Result<SphericalData> {
    f.domain().check(p)?;
    let c = slice_decompose(p);
    let u = c.unit.ok_or(SliceError::OnRealAxis)?;
    let caps = SphereCaps::compute(f.domain(), c.x, c.y, step_deg);
    let idx = caps.cap_of(&u).ok_or_else(|| SliceError::CapTooSmall(p.to_string()))?;
    let (j, k) = caps.far_pair(idx, &u).ok_or_else(|| SliceError::CapTooSmall(p.to_string()))?;
    let s = two_unit_formula(f.eval(&at(c.x, c.y, &j))?, f.eval(&at(c.x, c.y, &k))?, &j, &k, c.y)?;
    Ok(SphericalData { value: s.value, derivative: s.deriv, cap: caps.cap_id(idx, u) })
}

/// `f'_c(q)`: exact for algebraic backings, otherwise a fourth-order central
/// difference along the real direction of `q`'s slice with Richardson steps.
pub fn cullen_derivative(f: &SliceFunction, q: &Quaternion) -> Result<Quaternion> {
    f.domain().check(q)?;
    if let Some(r) = f.inner_cullen(q) {
        return r;
    }
    let dom = f.domain();
    let mut h = 1e-2 * q.norm().max(1.0);
    while !(1..=2).all(|s| dom.contains(&(*q + h * s as f64)) && dom.contains(&(*q - h * s as f64))) {
        h *= 0.5;
        if h < 1e-10 {
            return Err(SliceError::OnBoundary(q.to_string()));
        }
    }
    let d4 = |h: f64| -> Result<Quaternion> {
        let a = f.eval(&(*q + h))? - f.eval(&(*q - h))?;
        let b = f.eval(&(*q + 2.0 * h))? - f.eval(&(*q - 2.0 * h))?;
        Ok((a * 8.0 - b) / (12.0 * h))
    };
    let mut prev = d4(h)?;
    let mut best = prev;
    let mut best_gap = f64::INFINITY;
    for _ in 0..6 {
        let half = d4(h * 0.5)?;
        let rich = (half * 16.0 - prev) / 15.0;
        let gap = rich.dist(&best);
        if gap < best_gap {
            best_gap = gap;
            best = rich;
        } else {
            break;
        }
        prev = half;
        h *= 0.5;
    }
    Ok(best)
}

/// Holomorphic data on one slice, as a function of `z = x + i y` meaning `x + y J`.
pub type SliceData = Arc<dyn Fn(Complex64) -> Result<Quaternion> + Send + Sync>;

struct Extended {
    r: SliceData,
    s: SliceData,
    j: ImaginaryUnit,
    k: ImaginaryUnit,
    dom: DomainSpec,
}

impl SliceFn for Extended {
    fn domain(&self) -> &DomainSpec {
        &self.dom
    }
    fn backing(&self) -> Backing {
        Backing::ClosedForm
    }
    fn sph(&self, q: &Quaternion) -> Result<Sph> {
        let c = slice_decompose(q);
        let z = Complex64::new(c.x, c.y);
        let rv = (self.r)(z)?;
        if c.unit.is_none() {
            return Ok(Sph::new(rv, Quaternion::ZERO));
        }
        two_unit_formula(rv, (self.s)(z)?, &self.j, &self.k, c.y)
    }
    fn label(&self) -> String {
        "extension from two slices".into()
    }
}

/// The extension formula: `f(x+yI) = (J-K)^{-1}[J r - K s] + I (J-K)^{-1}[r - s]`
/// with `r` read at `x + yJ` and `s` at `x + yK`.
pub fn extend_from_slices(r: SliceData, s: SliceData, j: ImaginaryUnit, k: ImaginaryUnit, dom: DomainSpec) -> Result<SliceFunction> {
    if j.dist(&k) < 1e-12 {
        return Err(SliceError::UnitsEqual);
    }
    let (a, b, _) = dom.slice_box();
    let mut worst: f64 = 0.0;
    for n in 0..=64 {
        let x = a + (b - a) * n as f64 / 64.0;
        if !dom.contains(&Quaternion::real(x)) {
            continue;
        }
        let z = Complex64::new(x, 0.0);
        let (rv, sv) = (r(z)?, s(z)?);
        worst = worst.max(rv.dist(&sv) / rv.norm().max(1.0));
    }
    if worst > tol::REAL_TRACE {
        return Err(SliceError::RealTraceMismatch(worst));
    }
    Ok(SliceFunction::new(Extended { r, s, j, k, dom }))
}

/// `df_p(v)`: `v f'_c(p)` on the real axis, else `v_par f'_c(p) + v_perp f'_s(p)`.
pub fn differential(f: &SliceFunction, p: &Quaternion, v: &Quaternion) -> Result<Quaternion> {
    let fc = cullen_derivative(f, p)?;
    let c = slice_decompose(p);
    let Some(u) = c.unit else {
        return Ok(*v * fc);
    };
    let fs = f.sph(p)?.deriv;
    let par = u.embed(u.project(v));
    let perp = *v - par;
    Ok(par * fc + perp * fs)
}

/// Whether `df_p` is singular.
pub fn is_differential_singular(f: &SliceFunction, p: &Quaternion) -> Result<bool> {
    let fc = cullen_derivative(f, p)?;
    let scale = f.eval(p)?.norm().max(1.0);
    let c = slice_decompose(p);
    let Some(u) = c.unit else {
        return Ok(fc.norm() <= tol::DIFFERENTIAL_SINGULAR * scale);
    };
    let fs = f.sph(p)?.deriv;
    let w = fc * fs.conj();
    let along = u.project(&w).norm();
    // Relative test with a floor for the case where both derivatives vanish.
    let bound = tol::DIFFERENTIAL_SINGULAR * fc.norm() * fs.norm() + 1e-15 * scale * scale;
    Ok(along <= bound)
}

/// Slicewise Cauchy-Riemann residual `|(d/dx + I d/dy) f|` at `q` by central differences.
pub fn cr_residual(f: &SliceFunction, q: &Quaternion, h: f64) -> Result<f64> {
    let c = slice_decompose(q);
    let u = c.unit.ok_or(SliceError::OnRealAxis)?;
    let dx = (f.eval(&(*q + h))? - f.eval(&(*q - h))?) / (2.0 * h);
    let dy = (f.eval(&(*q + u.q() * h))? - f.eval(&(*q - u.q() * h))?) / (2.0 * h);
    Ok((dx + u.q() * dy).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::Restricted;

    type Q = Quaternion;

    fn square() -> SliceFunction {
        SliceFunction::poly(QPoly::new(vec![Q::ZERO, Q::ZERO, Q::ONE]))
    }

    #[test]
    fn eval_examples() {
        assert_eq!(square().eval(&Q::I).unwrap(), Q::real(-1.0));
        let p = Q::new(1.0, 2.0, -1.0, 0.5);
        let l = SliceFunction::poly(QPoly::linear(&p));
        assert_eq!(l.eval(&p).unwrap(), Q::ZERO);
    }

    #[test]
    fn binomial_spherical_data() {
        let p0 = Q::new(0.5, 1.0, 0.0, -2.0);
        let f = SliceFunction::poly(QPoly::linear(&p0));
        let q = Q::new(1.5, 0.0, 2.0, 0.0);
        let s = spherical_data_with(&f, &q, 5.0).unwrap();
        assert!(s.value.approx_eq(&(Q::real(1.5) - p0), 1e-13));
        assert!(s.derivative.approx_eq(&Q::ONE, 1e-13));
        assert!(s.reconstruct(&q).approx_eq(&f.eval(&q).unwrap(), 1e-13));
    }

    #[test]
    fn real_axis_has_no_spherical_derivative() {
        assert_eq!(spherical_data(&square(), &Q::real(1.0)), Err(SliceError::OnRealAxis));
    }

    #[test]
    fn cullen_exact_and_numeric_agree() {
        let q = Q::new(1.0, 1.0, 0.0, 0.0);
        assert_eq!(cullen_derivative(&square(), &q).unwrap(), Q::new(2.0, 2.0, 0.0, 0.0));
        let sampled = SliceFunction::sampled(DomainSpec::whole(), "q^2", |q| Ok(*q * *q));
        let d = cullen_derivative(&sampled, &q).unwrap();
        assert!(d.approx_eq(&Q::new(2.0, 2.0, 0.0, 0.0), 1e-9));
        let c = SliceFunction::poly(QPoly::constant(Q::new(1.0, 2.0, 3.0, 4.0)));
        assert_eq!(cullen_derivative(&c, &q).unwrap(), Q::ZERO);
    }

    #[test]
    fn extension_of_square_is_square() {
        let j = ImaginaryUnit::from_vector(1.0, 1.0, 0.0).unwrap();
        let k = ImaginaryUnit::K;
        let r: SliceData = Arc::new(move |z: Complex64| {
            let q = j.embed(z);
            Ok(q * q)
        });
        let s: SliceData = Arc::new(move |z: Complex64| {
            let q = k.embed(z);
            Ok(q * q)
        });
        let f = extend_from_slices(r, s, j, k, DomainSpec::whole()).unwrap();
        for q in [Q::new(0.3, -1.0, 0.4, 2.0), Q::new(-2.0, 0.0, 0.0, 0.1), Q::real(0.7)] {
            assert!(f.eval(&q).unwrap().approx_eq(&(q * q), 1e-12));
        }
        let bad: SliceData = Arc::new(|z: Complex64| Ok(Q::real(z.re + 1.0)));
        let good: SliceData = Arc::new(|z: Complex64| Ok(Q::real(z.re)));
        let e = extend_from_slices(good, bad, ImaginaryUnit::I, ImaginaryUnit::J, DomainSpec::whole());
        assert!(matches!(e, Err(SliceError::RealTraceMismatch(_))));
    }

    #[test]
    fn differential_examples() {
        assert_eq!(differential(&square(), &Q::ZERO, &Q::J).unwrap(), Q::ZERO);
        assert!(differential(&square(), &Q::I, &Q::J).unwrap().norm() < 1e-15);
        let t = SliceFunction::poly(QPoly::linear(&Q::new(1.0, 2.0, 3.0, 4.0)));
        let v = Q::new(0.2, -0.4, 1.0, 3.0);
        assert!(differential(&t, &Q::new(0.0, 1.0, 1.0, 0.0), &v).unwrap().approx_eq(&v, 1e-14));
        assert!(is_differential_singular(&square(), &Q::ZERO).unwrap());
        assert!(!is_differential_singular(&t, &Q::J).unwrap());
        let ii = QPoly::linear(&Q::I).star(&QPoly::linear(&Q::I));
        assert!(is_differential_singular(&SliceFunction::poly(ii), &Q::I).unwrap());
    }

    #[test]
    fn sampled_function_on_split_sphere() {
        let r = Restricted {
            base: DomainSpec::whole(),
            keep: |q: &Quaternion| q.x > -0.3,
            name: "x > -0.3".into(),
        };
        let f = SliceFunction::sampled(DomainSpec::new(r), "q^2 + q", |q| Ok(*q * *q + *q));
        let q = Q::new(0.2, 0.6, 0.8, 0.0);
        let s = f.sph(&q).unwrap();
        assert!(s.value.approx_eq(&Q::real(0.04 - 1.0 + 0.2), 1e-12));
        assert!(s.deriv.approx_eq(&Q::real(1.4), 1e-12));
    }

    #[test]
    fn cauchy_riemann_residual_small() {
        let q = Q::new(0.3, 0.1, -0.5, 0.7);
        assert!(cr_residual(&square(), &q, 1e-5).unwrap() < 1e-6);
    }
}
