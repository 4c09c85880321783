//! Property-based invariants of the quaternion algebra, the regular product
//! and the polynomial zero finder.

use proptest::prelude::*;
use slicereg::algebra::{product_point, reciprocal, star_product};
use slicereg::integral::{slicewise_cauchy, Contour};
use slicereg::poly::QPoly;
use slicereg::quaternion::{at, slice_decompose, ImaginaryUnit, Quaternion};
use slicereg::slicefn::SliceFunction;
use slicereg::zeros::poly_zeros;

fn quat(r: f64) -> impl Strategy<Value = Quaternion> {
    (-r..r, -r..r, -r..r, -r..r).prop_map(|(w, x, y, z)| Quaternion::new(w, x, y, z))
}

fn unit() -> impl Strategy<Value = ImaginaryUnit> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_filter("nonzero", |(x, y, z)| x * x + y * y + z * z > 1e-2)
        .prop_map(|(x, y, z)| ImaginaryUnit::from_vector(x, y, z).unwrap())
}

fn poly(max_deg: usize) -> impl Strategy<Value = QPoly> {
    prop::collection::vec(quat(1.0), 1..=max_deg + 1).prop_map(|mut c| {
        // keep the leading coefficient away from zero
        let last = c.last_mut().unwrap();
        *last = *last + Quaternion::real(2.0);
        QPoly::new(c)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_is_multiplicative(p in quat(3.0), q in quat(3.0)) {
        prop_assert!(((p * q).norm() - p.norm() * q.norm()).abs() <= 1e-12 * (1.0 + p.norm() * q.norm()));
    }

    #[test]
    fn conjugation_reverses_products(p in quat(3.0), q in quat(3.0)) {
        prop_assert!((p * q).conj().approx_eq(&(q.conj() * p.conj()), 1e-12));
    }

    #[test]
    fn inverse_of_product(p in quat(3.0), q in quat(3.0)) {
        prop_assume!(p.norm() > 1e-2 && q.norm() > 1e-2);
        let lhs = (p * q).inv().unwrap();
        let rhs = q.inv().unwrap() * p.inv().unwrap();
        prop_assert!(lhs.dist(&rhs) <= 1e-9 * lhs.norm().max(1.0));
    }

    #[test]
    fn slice_coordinates_recompose(q in quat(5.0)) {
        prop_assert!(slice_decompose(&q).recompose().approx_eq(&q, 1e-12));
    }

    #[test]
    fn quaternion_json_round_trip(q in quat(10.0)) {
        let back: Quaternion = serde_json::from_str(&serde_json::to_string(&q).unwrap()).unwrap();
        prop_assert_eq!(back, q);
    }

    /// The representation formula: data at one point of a sphere give `f`
    /// on the whole sphere.
    #[test]
    fn sphere_data_reconstruct_values(p in poly(4), x in -1.0..1.0f64, y in 0.1..1.5f64, j in unit(), k in unit()) {
        let f = SliceFunction::poly(p);
        let s = f.sph(&at(x, y, &j)).unwrap();
        let q = at(x, y, &k);
        let v = f.eval(&q).unwrap();
        prop_assert!(s.at(&q).dist(&v) <= 1e-10 * v.norm().max(1.0));
    }

    #[test]
    fn star_product_pointwise_formula(a in poly(3), b in poly(3), q in quat(1.2)) {
        let (f, g) = (SliceFunction::poly(a.clone()), SliceFunction::poly(b.clone()));
        let fg = SliceFunction::poly(a.star(&b));
        let direct = fg.eval(&q).unwrap();
        prop_assert!(product_point(&f, &g, &q).map(|v| v.dist(&direct) <= 1e-8 * direct.norm().max(1.0)).unwrap_or(true));
        prop_assert!(star_product(&f, &g).unwrap().eval(&q).unwrap().dist(&direct) <= 1e-9 * direct.norm().max(1.0));
    }

    #[test]
    fn symmetrization_is_multiplicative(a in poly(3), b in poly(3)) {
        let lhs = a.star(&b).sym();
        let rhs = a.sym().mul(&b.sym());
        let scale = rhs.coeffs().iter().fold(1.0f64, |m, c| m.max(c.abs()));
        prop_assert_eq!(lhs.coeffs().len(), rhs.coeffs().len());
        for (l, r) in lhs.coeffs().iter().zip(rhs.coeffs()) {
            prop_assert!((l - r).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn reciprocal_inverts(p in poly(3), q in quat(1.0)) {
        let f = SliceFunction::poly(p);
        let r = reciprocal(&f).unwrap();
        if let Ok(v) = product_point(&f, &r, &q) {
            prop_assert!(v.dist(&Quaternion::ONE) <= 1e-6, "f * f^-* = {v}");
        }
    }

    /// Every reported isolated zero is a zero, and the count matches the
    /// degree once spheres are counted twice.
    #[test]
    fn polynomial_zeros_vanish(roots in prop::collection::vec(quat(1.5), 1..4)) {
        let mut p = QPoly::new(vec![Quaternion::ONE]);
        for r in &roots {
            p = p.star(&QPoly::new(vec![-*r, Quaternion::ONE]));
        }
        let rep = poly_zeros(&p).unwrap();
        let scale = p.coeffs().iter().fold(1.0f64, |m, c| m.max(c.norm()));
        for z in &rep.isolated {
            prop_assert!(p.eval(&z.point).norm() <= 1e-6 * scale, "residual at {}", z.point);
        }
        let total: usize = rep.isolated.iter().map(|z| z.isolated).sum::<usize>()
            + rep.spherical.iter().map(|s| s.multiplicity).sum::<usize>()
            + rep.spherical.iter().map(|s| s.chain.len()).sum::<usize>();
        prop_assert_eq!(total, roots.len());
    }

    #[test]
    fn slicewise_cauchy_reproduces_polynomials(p in poly(5), j in unit(), re in -0.6..0.6f64, im in -0.6..0.6f64) {
        let f = SliceFunction::poly(p);
        let c = Contour::circle(j, num_complex::Complex64::new(0.0, 0.0), 1.0, 8);
        let z = num_complex::Complex64::new(re, im);
        let v = slicewise_cauchy(&f, &c, z).unwrap();
        let direct = f.eval(&j.embed(z)).unwrap();
        prop_assert!(v.dist(&direct) <= 1e-11 * direct.norm().max(1.0));
    }
}
