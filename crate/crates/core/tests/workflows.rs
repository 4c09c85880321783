//! End-to-end flows through the public API.

use slicereg::algebra::{product_point, star_product};
use slicereg::domains::{cap_component, DomainSpec};
use slicereg::douren::{self, CapZeros, DourenConfig};
use slicereg::integral::{local_cauchy, SymmetricSet};
use slicereg::poly::{QPoly, QRational, RealPoly};
use slicereg::quaternion::{at, ImaginaryUnit, Quaternion};
use slicereg::series::{eval_laurent, eval_spherical, laurent_coeffs, spherical_coeffs};
use slicereg::slicefn::SliceFunction;
use slicereg::zeros::{factor_out_point, multiplicities};

fn q(w: f64, x: f64, y: f64, z: f64) -> Quaternion {
    Quaternion::new(w, x, y, z)
}

#[test]
fn spherical_series_reproduces_a_polynomial_restricted_to_a_ball() {
    let p = QPoly::new(vec![q(1.0, 0.0, 2.0, 0.0), q(0.0, 1.0, 0.0, -1.0), Quaternion::ONE, q(0.5, 0.0, 0.0, 0.0)]);
    let f = SliceFunction::poly_on(p, DomainSpec::ball(q(0.0, 0.0, 0.0, 0.0), 3.0));
    let s = spherical_coeffs(&f, 0.2, 0.7, None, 0, 4).unwrap();
    for pt in [q(0.2, 0.7, 0.0, 0.0), q(0.3, 0.1, 0.5, 0.2), q(0.0, 0.0, 0.0, 0.9)] {
        let v = f.eval(&pt).unwrap();
        assert!(eval_spherical(&s, &pt).unwrap().dist(&v) < 1e-10 * v.norm().max(1.0));
    }
}

#[test]
fn laurent_series_of_a_rational_function() {
    // (q^2 + 1)^{-1} (q + j) has a pole sphere S.
    let r = QRational::new(QPoly::new(vec![Quaternion::J, Quaternion::ONE]), RealPoly::new(vec![1.0, 0.0, 1.0])).unwrap();
    let f = SliceFunction::rational(r);
    let p = q(0.0, 0.0, 0.0, 1.0);
    let s = laurent_coeffs(&f, &p, (-2, 24)).unwrap();
    let probe = q(0.0, 0.0, 0.0, 1.3);
    let v = f.eval(&probe).unwrap();
    assert!(eval_laurent(&s, &probe).unwrap().dist(&v) < 1e-8 * v.norm());
}

#[test]
fn factor_then_multiply_back() {
    let a = QPoly::new(vec![-Quaternion::I, Quaternion::ONE]);
    let b = QPoly::new(vec![q(1.0, 0.0, -1.0, 0.5), Quaternion::ONE]);
    let f = SliceFunction::poly(a.star(&b));
    let p = Quaternion::I;
    let cap = cap_component(f.domain(), &p, 2.0).unwrap();
    let g = factor_out_point(&f, &p, &cap).unwrap();
    let lin = SliceFunction::poly(a);
    for t in [q(0.3, 0.2, -0.1, 0.4), q(-1.0, 0.0, 0.5, 0.0)] {
        let back = product_point(&lin, &g, &t).unwrap();
        assert!(back.dist(&f.eval(&t).unwrap()) < 1e-9);
    }
    let mu = multiplicities(&f, &p, &cap).unwrap();
    assert_eq!((mu.classical, mu.isolated), (1, 1));
}

#[test]
fn local_cauchy_with_product_data() {
    let a = SliceFunction::poly(QPoly::new(vec![Quaternion::K, Quaternion::ONE]));
    let b = SliceFunction::poly(QPoly::new(vec![Quaternion::ONE, Quaternion::J]));
    let f = star_product(&a, &b).unwrap();
    let set = SymmetricSet::Ball { center: 0.5, radius: 1.0 };
    let probe = q(0.6, 0.2, 0.3, 0.1);
    let v = local_cauchy(&f, &set, ImaginaryUnit::K, &probe, None, 16).unwrap();
    assert!(v.dist(&f.eval(&probe).unwrap()) < 1e-12);
}

#[test]
fn douren_counterexample_report() {
    let cfg = DourenConfig::default();
    let fx = douren::fixtures(&cfg, None).unwrap();
    // f takes the two closed-form cap values on either side of the cut.
    for (rep, plus) in [(cfg.unit, true), (cfg.unit.neg(), false)] {
        let closed = douren::cap_closed_form(&cfg, plus).unwrap();
        let s = fx.f.sph(&at(-1.0, 2.0, &rep)).unwrap();
        assert!(s.value.dist(&closed.value) < 1e-9);
    }
    // l vanishes on all of C+ but only at one point of C-.
    let (_, plus) = douren::cap_zeros(&fx.ell, -1.0, 2.0, &cfg.unit).unwrap();
    let (_, minus) = douren::cap_zeros(&fx.ell, -1.0, 2.0, &cfg.unit.neg()).unwrap();
    assert_eq!(plus, CapZeros::WholeCap);
    assert!(matches!(minus, CapZeros::Point { point } if point.approx_eq(&fx.p_bar, 1e-9)));
}
