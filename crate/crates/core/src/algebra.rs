//! The regular product, conjugate, symmetrization, reciprocal and quotient.
//!
//! Polynomials and rational functions are handled exactly in their
//! coefficients. Everything else is combined pointwise from spherical data,
//! never from conjugate point pairs, since `x - yI` may sit in another cap.

use crate::domains::DomainSpec;
use crate::error::{Result, SliceError};
use crate::poly::{QPoly, QRational};
use crate::quaternion::{slice_decompose, Quaternion};
use crate::slicefn::{Backing, SliceFn, SliceFunction, Sph};

/// `Phi(a, b) = (|a|^2 conj(a) + conj(b) a conj(b)) / ((|a|^2 - |b|^2)^2 + (2 re(a conj b))^2)`.
pub fn phi(a: &Quaternion, b: &Quaternion) -> Result<Quaternion> {
    let (na, nb) = (a.norm_sqr(), b.norm_sqr());
    let r = 2.0 * (*a * b.conj()).w;
    let den = (na - nb) * (na - nb) + r * r;
    if den <= 1e-28 * (na + nb) * (na + nb) || den == 0.0 {
        return Err(SliceError::DegeneratePair);
    }
    Ok((a.conj() * na + b.conj() * *a * b.conj()) / den)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Op {
    Product,
    Sum,
    Difference,
    Conjugate,
    Symmetrization,
    Reciprocal,
}

struct Composite {
    op: Op,
    args: Vec<SliceFunction>,
    dom: DomainSpec,
}

/// Spherical data of `f^{-*}` from that of `f` at `q`.
pub fn reciprocal_data(f: &Sph, q: &Quaternion) -> Result<Sph> {
    let y = q.im_norm();
    if y == 0.0 {
        return Ok(Sph::new(f.value.inv().map_err(|_| SliceError::SymmetrizationZero)?, Quaternion::ZERO));
    }
    let b = f.deriv * y;
    let v = phi(&f.value, &b).map_err(|_| SliceError::SymmetrizationZero)?;
    let w = phi(&b, &f.value).map_err(|_| SliceError::SymmetrizationZero)?;
    Ok(Sph::new(v, -w / y))
}

impl SliceFn for Composite {
    fn domain(&self) -> &DomainSpec {
        &self.dom
    }
    fn backing(&self) -> Backing {
        Backing::Composite
    }
    fn sph(&self, q: &Quaternion) -> Result<Sph> {
        let y2 = q.im().norm_sqr();
        let a = self.args[0].sph(q)?;
        Ok(match self.op {
            Op::Product => a.star(&self.args[1].sph(q)?, y2),
            Op::Sum => a.add(&self.args[1].sph(q)?),
            Op::Difference => a.sub(&self.args[1].sph(q)?),
            Op::Conjugate => a.conj(),
            Op::Symmetrization => a.star(&a.conj(), y2),
            Op::Reciprocal => reciprocal_data(&a, q)?,
        })
    }
    fn eval(&self, q: &Quaternion) -> Result<Quaternion> {
        if q.im_norm() == 0.0 {
            // On the real axis everything commutes.
            let a = self.args[0].eval(q)?;
            return Ok(match self.op {
                Op::Product => a * self.args[1].eval(q)?,
                Op::Sum => a + self.args[1].eval(q)?,
                Op::Difference => a - self.args[1].eval(q)?,
                Op::Conjugate => a.conj(),
                Op::Symmetrization => Quaternion::real(a.norm_sqr()),
                Op::Reciprocal => a.inv().map_err(|_| SliceError::SymmetrizationZero)?,
            });
        }
        Ok(self.sph(q)?.at(q))
    }
    fn label(&self) -> String {
        let names: Vec<String> = self.args.iter().map(|a| a.label()).collect();
        format!("{:?}({})", self.op, names.join(", "))
    }
}

fn composite(op: Op, args: Vec<SliceFunction>) -> SliceFunction {
    let mut dom = args[0].domain().clone();
    for a in &args[1..] {
        dom = dom.and(a.domain());
    }
    SliceFunction::new(Composite { op, args, dom })
}

fn exact_pair(f: &SliceFunction, g: &SliceFunction) -> Option<(QRational, QRational)> {
    Some((f.as_rational()?, g.as_rational()?))
}

fn from_rational(r: QRational) -> SliceFunction {
    if r.den.degree() == Some(0) {
        let c = r.den.coeffs()[0];
        SliceFunction::poly(QPoly::new(r.num.coeffs().iter().map(|a| *a / c).collect()))
    } else {
        SliceFunction::rational(r)
    }
}

/// `f * g`.
pub fn star_product(f: &SliceFunction, g: &SliceFunction) -> Result<SliceFunction> {
    if let Some((a, b)) = exact_pair(f, g) {
        return Ok(from_rational(a.star(&b)));
    }
    Ok(composite(Op::Product, vec![f.clone(), g.clone()]))
}

pub fn add(f: &SliceFunction, g: &SliceFunction) -> Result<SliceFunction> {
    if let (Some(a), Some(b)) = (f.as_poly(), g.as_poly()) {
        return Ok(SliceFunction::poly(a.add(&b)));
    }
    Ok(composite(Op::Sum, vec![f.clone(), g.clone()]))
}

pub fn sub(f: &SliceFunction, g: &SliceFunction) -> Result<SliceFunction> {
    if let (Some(a), Some(b)) = (f.as_poly(), g.as_poly()) {
        return Ok(SliceFunction::poly(a.sub(&b)));
    }
    Ok(composite(Op::Difference, vec![f.clone(), g.clone()]))
}

/// `f^c`.
pub fn conjugate(f: &SliceFunction) -> SliceFunction {
    if let Some(r) = f.as_rational() {
        return from_rational(r.conj());
    }
    composite(Op::Conjugate, vec![f.clone()])
}

/// `f^s = f * f^c`.
pub fn symmetrize(f: &SliceFunction) -> SliceFunction {
    if let Some(r) = f.as_rational() {
        return from_rational(r.sym());
    }
    composite(Op::Symmetrization, vec![f.clone()])
}

/// `f^{-*}`, defined off the zero set of `f^s`.
pub fn reciprocal(f: &SliceFunction) -> Result<SliceFunction> {
    if let Some(r) = f.as_rational() {
        if r.num.is_zero() {
            return Err(SliceError::IdenticallyZero);
        }
        return Ok(SliceFunction::rational(r.reciprocal()?));
    }
    Ok(composite(Op::Reciprocal, vec![f.clone()]))
}

/// `f^{-*} * g`.
pub fn quotient(f: &SliceFunction, g: &SliceFunction) -> Result<SliceFunction> {
    star_product(&reciprocal(f)?, g)
}

/// `(f*g)(p)` as `f(p) g~(f(p)^{-1} p f(p))`, with `g~` rebuilt from the
/// spherical data of `g` at `p`.
pub fn product_point(f: &SliceFunction, g: &SliceFunction, p: &Quaternion) -> Result<Quaternion> {
    let fp = f.eval(p)?;
    let gs = g.sph(p)?;
    if fp.is_zero() {
        return Ok(Quaternion::ZERO);
    }
    let t = fp.inv()? * *p * fp;
    Ok(fp * gs.at(&t))
}

/// `(f^{-*}*g)(p)` as `f~(T)^{-1} g~(T)` with `T = f^c(p)^{-1} p f^c(p)`.
pub fn quotient_point(f: &SliceFunction, g: &SliceFunction, p: &Quaternion) -> Result<Quaternion> {
    let fs = f.sph(p)?;
    let gs = g.sph(p)?;
    let fc = fs.conj().at(p);
    let fci = fc.inv().map_err(|_| SliceError::SymmetrizationZero)?;
    let t = fci * *p * fc;
    let ft = fs.at(&t).inv().map_err(|_| SliceError::SymmetrizationZero)?;
    Ok(ft * gs.at(&t))
}

/// Spherical data of `f^s` on the sphere through `q` (real-valued pair).
pub fn sym_data(f: &SliceFunction, q: &Quaternion) -> Result<Sph> {
    let s = f.sph(q)?;
    let c = slice_decompose(q);
    Ok(s.star(&s.conj(), c.y * c.y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::RealPoly;

    type Q = Quaternion;

    fn poly(c: &[Q]) -> SliceFunction {
        SliceFunction::poly(QPoly::new(c.to_vec()))
    }

    #[test]
    fn phi_examples() {
        assert!(phi(&Q::real(2.0), &Q::real(1.0)).unwrap().approx_eq(&Q::real(0.4), 1e-15));
        let a = Q::new(1.0, 2.0, -1.0, 0.5);
        assert!(phi(&a, &Q::ZERO).unwrap().approx_eq(&a.inv().unwrap(), 1e-15));
        assert_eq!(phi(&Q::I, &Q::ONE), Err(SliceError::DegeneratePair));
    }

    #[test]
    fn binomial_reciprocal_is_rational() {
        let p = Q::new(1.0, 0.0, 2.0, 0.0);
        let b = SliceFunction::poly(QPoly::linear(&p));
        let r = reciprocal(&b).unwrap().as_rational().unwrap();
        assert_eq!(r.den, RealPoly::new(vec![5.0, -2.0, 1.0]));
        assert_eq!(r.num, QPoly::linear(&p.conj()));
    }

    #[test]
    fn pointwise_matches_exact() {
        let f = poly(&[Q::new(1.0, 0.5, 0.0, -1.0), Q::new(0.0, 1.0, 2.0, 0.0), Q::ONE]);
        let g = poly(&[Q::new(0.2, 0.0, 1.0, 0.0), Q::new(-1.0, 0.0, 0.0, 3.0)]);
        let fs = SliceFunction::sampled(DomainSpec::whole(), "f", {
            let f = f.clone();
            move |q| f.eval(q)
        });
        let exact = star_product(&f, &g).unwrap();
        let point = star_product(&fs, &g).unwrap();
        let recip = reciprocal(&fs).unwrap();
        for q in [Q::new(0.3, 0.2, -1.0, 0.4), Q::new(-1.0, 0.0, 0.0, 2.0), Q::real(0.5)] {
            let e = exact.eval(&q).unwrap();
            assert!(point.eval(&q).unwrap().approx_eq(&e, 1e-12));
            assert!(product_point(&f, &g, &q).unwrap().approx_eq(&e, 1e-12));
            let one = star_product(&fs, &recip).unwrap().eval(&q).unwrap();
            assert!(one.approx_eq(&Q::ONE, 1e-12));
            let qp = quotient_point(&f, &g, &q).unwrap();
            assert!(qp.approx_eq(&quotient(&f, &g).unwrap().eval(&q).unwrap(), 1e-12));
        }
    }

    #[test]
    fn conjugate_and_symmetrization_laws() {
        let f = poly(&[Q::new(1.0, 0.5, 0.0, -1.0), Q::new(0.0, 1.0, 2.0, 0.0), Q::ONE]);
        let cc = conjugate(&conjugate(&f));
        assert_eq!(cc.as_poly(), f.as_poly());
        let s = symmetrize(&f).as_poly().unwrap();
        assert!(s.coeffs().iter().all(|c| c.im_norm() == 0.0));
        let q = Q::new(0.1, 0.7, -0.2, 0.3);
        let a = star_product(&f, &conjugate(&f)).unwrap().eval(&q).unwrap();
        let b = star_product(&conjugate(&f), &f).unwrap().eval(&q).unwrap();
        assert!(a.approx_eq(&b, 1e-12));
    }

    #[test]
    fn slice_preserving_factor_multiplies_pointwise() {
        let f = poly(&[Q::real(1.0), Q::real(-2.0), Q::real(0.5)]);
        let g = poly(&[Q::new(0.0, 1.0, 1.0, 0.0), Q::K]);
        let q = Q::new(0.4, 0.0, 1.0, 1.0);
        let fg = star_product(&f, &g).unwrap().eval(&q).unwrap();
        assert!(fg.approx_eq(&(f.eval(&q).unwrap() * g.eval(&q).unwrap()), 1e-13));
        let c = poly(&[Q::new(0.5, 1.0, 0.0, -1.0)]);
        let gc = star_product(&g, &c).unwrap().eval(&q).unwrap();
        assert!(gc.approx_eq(&(g.eval(&q).unwrap() * Q::new(0.5, 1.0, 0.0, -1.0)), 1e-13));
    }
}
