//! Laurent and spherical series: coefficient extraction, evaluation and
//! singularity classification.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::reciprocal_data;
use crate::domains::{sigma_tau_omega, CapId, CassiniRegion, DomainSpec, SphereCaps};
use crate::error::{Result, SliceError};
use crate::poly::{QPoly, RealPoly};
use crate::quaternion::{at, slice_decompose, ImaginaryUnit, Quaternion};
use crate::slicefn::{SliceFunction, Sph};
use crate::tol;

/// `sum_n (q - p)^{*n} a_n` over a finite window of `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaurentSeries {
    pub center: Quaternion,
    /// Slice the coefficients were computed on.
    pub unit: ImaginaryUnit,
    pub window: (i64, i64),
    pub coeffs: Vec<Quaternion>,
    pub r1: f64,
    /// `None` when no positive-index decay was seen (entire in the window).
    pub r2: Option<f64>,
    pub contour_radius: f64,
}

impl LaurentSeries {
    pub fn coeff(&self, n: i64) -> Quaternion {
        if n < self.window.0 || n > self.window.1 {
            return Quaternion::ZERO;
        }
        self.coeffs[(n - self.window.0) as usize]
    }
}

/// `sum_n [(q-x0)^2+y0^2]^n (a_{2n} + q a_{2n+1})`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphericalSeries {
    pub x0: f64,
    pub y0: f64,
    /// Lowest pair index `n`; `coeffs[0]` is `a_{2 n_min}`.
    pub n_min: i64,
    pub coeffs: Vec<Quaternion>,
    /// `None` when the expansion holds on the whole sphere.
    pub cap: Option<CapId>,
    pub cassini: CassiniRegion,
}

impl SphericalSeries {
    /// `a_k`, zero outside the stored range.
    pub fn coeff(&self, k: i64) -> Quaternion {
        let i = k - 2 * self.n_min;
        if i < 0 || i as usize >= self.coeffs.len() {
            Quaternion::ZERO
        } else {
            self.coeffs[i as usize]
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SingularityKind {
    Removable,
    Pole { order: usize },
    Essential,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularityReport {
    pub point: Quaternion,
    pub kind: SingularityKind,
    /// `2m` for the largest point order `m` over the cap; the cap carries a
    /// spherical pole of strength `-2m`.
    pub spherical_order: usize,
    /// `n` in `f = [(q-x)^2+y^2]^{-n} (q-p)^{*(n-m)} * g`.
    pub isolated: usize,
    pub cap: CapId,
    /// Order (or `None` for essential) at each probed cap point.
    pub probe_orders: Vec<(Quaternion, Option<usize>)>,
}

// ---------------------------------------------------------------------------
// Laurent coefficients on a slice

fn circle_inside(dom: &DomainSpec, c: Complex64, r: f64, u: &ImaginaryUnit) -> bool {
    let pts: Vec<Quaternion> = (0..64)
        .map(|k| u.embed(c + Complex64::from_polar(r, 2.0 * PI * (k as f64 + 0.5) / 64.0)))
        .collect();
    pts.iter().all(|q| dom.contains(q)) && (0..64).all(|k| !dom.edge_blocked(&pts[k], &pts[(k + 1) % 64]))
}

/// First run `[a, b]` of radii whose circles around `c` lie in the domain,
/// and whether it starts at the smallest radius tried.
fn annulus(dom: &DomainSpec, c: Complex64, u: &ImaginaryUnit, rmax: f64) -> Option<(f64, f64, bool)> {
    let rmin = 1e-4 * (1.0 + c.norm());
    let steps = 200;
    let g = (rmax / rmin).powf(1.0 / steps as f64);
    let mut run: Option<(f64, f64, bool)> = None;
    for k in 0..=steps {
        let r = rmin * g.powi(k);
        if circle_inside(dom, c, r, u) {
            run = Some(match run {
                None => (r, r, k == 0),
                Some((a, _, s)) => (a, r, s),
            });
        } else if run.is_some() {
            break;
        }
    }
    run
}

fn trapezoid_coeffs(
    f: &SliceFunction,
    c: Complex64,
    u: &ImaginaryUnit,
    rho: f64,
    window: (i64, i64),
    nodes: usize,
) -> Result<(Vec<Quaternion>, f64)> {
    let vals: Vec<Result<Quaternion>> = (0..nodes)
        .into_par_iter()
        .map(|k| {
            let t = 2.0 * PI * k as f64 / nodes as f64;
            f.eval(&u.embed(c + Complex64::from_polar(rho, t)))
        })
        .collect();
    let vals: Vec<Quaternion> = vals.into_iter().collect::<Result<_>>()?;
    let maxf = vals.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let coeffs = (window.0..=window.1)
        .into_par_iter()
        .map(|n| {
            let mut acc = Quaternion::ZERO;
            for (k, v) in vals.iter().enumerate() {
                let t = 2.0 * PI * k as f64 / nodes as f64;
                let w = Complex64::from_polar(rho.powi(-n as i32), -(n as f64) * t);
                acc += u.embed(w) * *v;
            }
            acc / nodes as f64
        })
        .collect();
    Ok((coeffs, maxf))
}

/// Deepest negative index whose term size on the contour exceeds the floor.
fn deepest_negative(coeffs: &[Quaternion], window: (i64, i64), rho: f64, maxf: f64) -> i64 {
    let floor = tol::LAURENT_FLOOR * maxf.max(1e-300);
    (window.0..0)
        .find(|&n| coeffs[(n - window.0) as usize].norm() * rho.powi(n as i32) > floor)
        .map_or(0, |n| -n)
}

/// Laurent coefficients of the slice restriction at `p` by trapezoidal
/// quadrature on a circle in `p`'s slice.
pub fn laurent_coeffs(f: &SliceFunction, p: &Quaternion, window: (i64, i64)) -> Result<LaurentSeries> {
    laurent_coeffs_with(f, p, window, None)
}

pub fn laurent_coeffs_with(
    f: &SliceFunction,
    p: &Quaternion,
    window: (i64, i64),
    radius: Option<f64>,
) -> Result<LaurentSeries> {
    if window.0 > window.1 {
        return Err(SliceError::InvalidInput("empty window".into()));
    }
    let sc = slice_decompose(p);
    let u = sc.unit_or(ImaginaryUnit::I);
    let c = Complex64::new(sc.x, sc.y);
    let (xmin, xmax, ymax) = f.domain().slice_box();
    let rmax = ((xmax - xmin).abs() + 2.0 * ymax).min(1e6);
    let (a, b, from_zero) = annulus(f.domain(), c, &u, rmax).ok_or(SliceError::NoAnnulus)?;
    let rho = radius.unwrap_or(if from_zero { (0.5 * b).min(1.0) } else { (a * b).sqrt() });
    let (coeffs, maxf) = trapezoid_coeffs(f, c, &u, rho, window, tol::LAURENT_NODES)?;
    let floor = tol::LAURENT_FLOOR * maxf.max(1e-300);
    // Root-test estimates over the upper half of each side of the window.
    let mut inner: f64 = 0.0;
    let mut outer: f64 = 0.0;
    for n in window.0..=window.1 {
        let a = coeffs[(n - window.0) as usize].norm();
        if a * rho.powi(n as i32) <= floor {
            continue;
        }
        if n < 0 && -n * 2 > -window.0 {
            inner = inner.max(a.powf(1.0 / -n as f64));
        }
        if n > 0 && n * 2 > window.1 {
            outer = outer.max(a.powf(1.0 / n as f64));
        }
    }
    Ok(LaurentSeries {
        center: *p,
        unit: u,
        window,
        coeffs,
        r1: inner,
        r2: if outer > 0.0 { Some(1.0 / outer) } else { None },
        contour_radius: rho,
    })
}

/// Spherical data of `(q - p)^{*n}` on the sphere of `q`, all `n` in the window.
fn power_data(p: &Quaternion, q: &Quaternion, window: (i64, i64)) -> Result<Vec<Sph>> {
    let y2 = q.im().norm_sqr();
    let one = Sph::new(Quaternion::real(q.w) - *p, Quaternion::ONE);
    let mut out = vec![];
    if window.0 < 0 {
        let inv = reciprocal_data(&one, q).map_err(|_| SliceError::OutsideConvergenceRegion)?;
        let mut neg = vec![];
        let mut s = inv;
        for _ in 0..-window.0 {
            neg.push(s);
            s = s.star(&inv, y2);
        }
        for n in window.0..0.min(window.1 + 1) {
            out.push(neg[(-n - 1) as usize]);
        }
    }
    let mut s = Sph::new(Quaternion::ONE, Quaternion::ZERO);
    for n in 0..=window.1 {
        if n >= window.0 {
            out.push(s);
        }
        s = s.star(&one, y2);
    }
    Ok(out)
}

/// Sum of a series of terms with a geometric tail estimate.
fn sum_with_tail(terms: &[Quaternion], ratio: f64) -> Result<Quaternion> {
    let sum = terms.iter().fold(Quaternion::ZERO, |a, t| a + *t);
    let scale = terms.iter().fold(0.0f64, |m, t| m.max(t.norm())).max(1e-300);
    if let Some(last) = terms.last() {
        if ratio >= 1.0 && last.norm() > 1e-12 * scale {
            return Err(SliceError::MaxTermsExceeded);
        }
        if ratio < 1.0 && last.norm() * ratio / (1.0 - ratio) > 1e-12 * scale {
            return Err(SliceError::MaxTermsExceeded);
        }
    }
    Ok(sum)
}

/// Value of a Laurent series at `q`.
pub fn eval_laurent(s: &LaurentSeries, q: &Quaternion) -> Result<Quaternion> {
    let (sigma, tau, _) = sigma_tau_omega(q, &s.center);
    let has_negative = (s.window.0..0).any(|n| !s.coeff(n).is_zero());
    if has_negative && tau <= s.r1 {
        return Err(SliceError::OutsideConvergenceRegion);
    }
    if let Some(r2) = s.r2 {
        if sigma >= r2 {
            return Err(SliceError::OutsideConvergenceRegion);
        }
    }
    let data = power_data(&s.center, q, s.window)?;
    let mut pos = vec![];
    let mut neg = vec![];
    for (i, n) in (s.window.0..=s.window.1).enumerate() {
        let t = data[i].at(q) * s.coeffs[i];
        if n < 0 {
            neg.push(t);
        } else {
            pos.push(t);
        }
    }
    neg.reverse();
    let r_out = s.r2.map_or(0.0, |r2| sigma / r2);
    let r_in = if tau > 0.0 { s.r1 / tau } else { 0.0 };
    Ok(sum_with_tail(&pos, r_out)? + sum_with_tail(&neg, r_in)?)
}

/// Value of a spherical series at `q`.
pub fn eval_spherical(s: &SphericalSeries, q: &Quaternion) -> Result<Quaternion> {
    if !s.cassini.contains(q) {
        return Err(SliceError::OutsideConvergenceRegion);
    }
    let d = *q - s.x0;
    let sq = d * d + s.y0 * s.y0;
    let level = sq.norm();
    let pairs = s.coeffs.len().div_ceil(2);
    let mut pos = vec![];
    let mut neg = vec![];
    for i in 0..pairs {
        let n = s.n_min + i as i64;
        let a = s.coeff(2 * n);
        let b = s.coeff(2 * n + 1);
        let pw = if n >= 0 { qpow(&sq, n as u32) } else { qpow(&sq.inv()?, (-n) as u32) };
        let t = pw * (a + *q * b);
        if n < 0 {
            neg.push(t);
        } else {
            pos.push(t);
        }
    }
    neg.reverse();
    let r2 = s.cassini.r2 * s.cassini.r2;
    let r_out = if r2.is_finite() && r2 < f64::MAX { level / r2 } else { 0.0 };
    let r_in = s.cassini.r1.map_or(0.0, |r1| r1 * r1 / level);
    Ok(sum_with_tail(&pos, r_out)? + sum_with_tail(&neg, r_in)?)
}

fn qpow(q: &Quaternion, n: u32) -> Quaternion {
    let mut r = Quaternion::ONE;
    for _ in 0..n {
        r = r * *q;
    }
    r
}

// ---------------------------------------------------------------------------
// Spherical coefficients

fn exact_spherical(num: &QPoly, shift: i64, x0: f64, y0: f64, n_min: i64, depth: usize) -> Vec<Quaternion> {
    let sphere = RealPoly::sphere(x0, y0 * y0);
    let mut h = num.clone();
    // coefficient pairs for n = shift, shift+1, ...
    let mut pairs = vec![];
    while !h.is_zero() {
        let (q, r) = h.div_rem_real(&sphere).expect("monic");
        pairs.push((r.coeffs().first().copied().unwrap_or(Quaternion::ZERO), r.coeffs().get(1).copied().unwrap_or(Quaternion::ZERO)));
        h = q;
    }
    let mut out = vec![];
    for i in 0..depth {
        let n = n_min + i as i64;
        let (a, b) = if n >= shift && ((n - shift) as usize) < pairs.len() {
            pairs[(n - shift) as usize]
        } else {
            (Quaternion::ZERO, Quaternion::ZERO)
        };
        out.push(a);
        out.push(b);
    }
    out
}

/// Spherical coefficients `a_{2n}, a_{2n+1}` for `n` in `n_min..n_min+depth`
/// around the sphere `x0 + y0 S`, valid near the given cap.
pub fn spherical_coeffs(
    f: &SliceFunction,
    x0: f64,
    y0: f64,
    cap: Option<&CapId>,
    n_min: i64,
    depth: usize,
) -> Result<SphericalSeries> {
    if !(y0 > 0.0) {
        return Err(SliceError::InvalidInput("spherical series need y0 > 0".into()));
    }
    if let Some(r) = f.as_rational() {
        // den = c [(q-x0)^2+y0^2]^N exactly: expand the numerator.
        let sphere = RealPoly::sphere(x0, y0 * y0);
        let mut den = r.den.clone();
        let mut shift = 0i64;
        loop {
            let (q, rem) = den.div_rem(&sphere)?;
            if den.degree().unwrap_or(0) < 2 || rem.coeffs().iter().any(|c| c.abs() > 1e-14 * den.scale_norm()) {
                break;
            }
            den = q;
            shift -= 1;
        }
        if den.degree() == Some(0) {
            let c = den.coeffs()[0];
            let num = QPoly::new(r.num.coeffs().iter().map(|a| *a / c).collect());
            let coeffs = exact_spherical(&num, shift, x0, y0, n_min, depth);
            let r1 = if shift < 0 { Some(0.0) } else { None };
            return Ok(SphericalSeries {
                x0,
                y0,
                n_min,
                coeffs,
                cap: None,
                cassini: CassiniRegion { x0, y0, r1, r2: f64::MAX.sqrt() },
            });
        }
    }
    contour_spherical(f, x0, y0, cap, n_min, depth)
}

fn contour_spherical(
    f: &SliceFunction,
    x0: f64,
    y0: f64,
    cap: Option<&CapId>,
    n_min: i64,
    depth: usize,
) -> Result<SphericalSeries> {
    let dom = f.domain();
    let u = match cap {
        Some(c) => c.representative,
        None => ImaginaryUnit::I,
    };
    let w = Complex64::new(x0, y0);
    let (a, b, from_zero) = annulus(dom, w, &u, 0.95 * y0).ok_or(SliceError::CapNotResolvable)?;
    let rho = if from_zero { 0.8 * b } else { (a * b).sqrt() };
    let nodes = 512;
    // Upper circle values and the reflected lower circle from spherical data.
    let samples: Vec<Result<(Quaternion, Complex64, Quaternion, Complex64)>> = (0..nodes)
        .into_par_iter()
        .map(|k| {
            let t = 2.0 * PI * k as f64 / nodes as f64;
            let e = Complex64::from_polar(rho, t);
            let zu = w + e;
            let zl = w.conj() + e;
            let up = u.embed(zu);
            let fu = f.eval(&up)?;
            // The lower point's sphere meets the cap side at conj(zl).
            let s = f.sph(&u.embed(zl.conj()))?;
            let fl = s.at(&u.embed(zl));
            Ok((fu, zu, fl, zl))
        })
        .collect();
    let samples: Vec<_> = samples.into_iter().collect::<Result<_>>()?;
    let sfun = |z: Complex64| (z - x0) * (z - x0) + y0 * y0;
    let mut coeffs = vec![];
    for i in 0..depth {
        let n = n_min + i as i64;
        let mut a_odd = Quaternion::ZERO;
        let mut a_even = Quaternion::ZERO;
        for (k, (fu, zu, fl, zl)) in samples.iter().enumerate() {
            let t = 2.0 * PI * k as f64 / nodes as f64;
            let dz = Complex64::from_polar(rho, t); // d zeta / (I d theta)
            for (fv, z) in [(fu, zu), (fl, zl)] {
                let kern = sfun(*z).powi(-(n as i32) - 1) * dz;
                a_odd += u.embed(kern) * *fv;
                a_even += u.embed(kern * (*z - 2.0 * x0)) * *fv;
            }
        }
        coeffs.push(a_even / nodes as f64);
        coeffs.push(a_odd / nodes as f64);
    }
    let r2 = (rho * (2.0 * y0 - rho)).sqrt();
    let r1 = if from_zero { None } else { Some((a * (2.0 * y0 + a)).sqrt().min(r2)) };
    let cap_id = match cap {
        Some(c) => Some(*c),
        None if dom.symmetric() => None,
        None => {
            let caps = SphereCaps::compute(dom, x0, y0, 2.0);
            caps.cap_of(&u).map(|i| caps.cap_id(i, u))
        }
    };
    Ok(SphericalSeries { x0, y0, n_min, coeffs, cap: cap_id, cassini: CassiniRegion { x0, y0, r1, r2 } })
}

// ---------------------------------------------------------------------------
// Singularities

const CLASSIFY_WINDOW: i64 = 48;

/// Pole order at `p`, or `None` when the coefficients look essential: the
/// deepest significant index grows by at least 8 when the radius shrinks
/// fourfold, or the window saturates.
pub fn point_order(f: &SliceFunction, p: &Quaternion) -> Result<Option<usize>> {
    let window = (-CLASSIFY_WINDOW, 4);
    let s1 = laurent_coeffs(f, p, window).map_err(|e| match e {
        SliceError::NoAnnulus => SliceError::NotIsolatedSingularity,
        e => e,
    })?;
    let rho = s1.contour_radius;
    let max1 = contour_max(f, p, &s1.unit, rho)?;
    let d1 = deepest_negative(&s1.coeffs, window, rho, max1);
    let s2 = laurent_coeffs_with(f, p, window, Some(rho / 4.0))?;
    let max2 = contour_max(f, p, &s2.unit, rho / 4.0)?;
    let d2 = deepest_negative(&s2.coeffs, window, rho / 4.0, max2);
    let saturated = d1.max(d2) >= CLASSIFY_WINDOW - tol::ESSENTIAL_RUN as i64;
    if d2 >= d1 + tol::ESSENTIAL_RUN as i64 || saturated {
        return Ok(None);
    }
    Ok(Some(d1.max(d2) as usize))
}

fn contour_max(f: &SliceFunction, p: &Quaternion, u: &ImaginaryUnit, rho: f64) -> Result<f64> {
    let sc = slice_decompose(p);
    let c = Complex64::new(sc.x, sc.y);
    let mut m = 0.0f64;
    for k in 0..256 {
        let z = c + Complex64::from_polar(rho, 2.0 * PI * k as f64 / 256.0);
        m = m.max(f.eval(&u.embed(z))?.norm());
    }
    Ok(m)
}

/// Classifies the singularity of `f` at `p`. The cap is a component of the
/// sphere of `p` inside `region` (typically the domain before the singular
/// set was removed); its points are probed for their orders.
pub fn classify_singularity(f: &SliceFunction, p: &Quaternion, region: &DomainSpec, probes: usize) -> Result<SingularityReport> {
    let sc = slice_decompose(p);
    let u = sc.unit_or(ImaginaryUnit::I);
    let cap = if sc.unit.is_some() {
        let caps = SphereCaps::compute(region, sc.x, sc.y, 2.0);
        let idx = caps.cap_of(&u).ok_or_else(|| SliceError::NoCapInfo(p.to_string()))?;
        let mut units = caps.sample(idx, probes);
        units.retain(|v| v.dist(&u) > 1e-6);
        (caps.cap_id(idx, u), units)
    } else {
        (CapId { x: sc.x, y: 0.0, index: 0, representative: u }, vec![])
    };
    let own = point_order(f, p)?;
    let mut probe_orders = vec![(*p, own)];
    let others: Vec<Result<(Quaternion, Option<usize>)>> = cap
        .1
        .par_iter()
        .map(|v| {
            let q = at(sc.x, sc.y, v);
            Ok((q, point_order(f, &q)?))
        })
        .collect();
    for o in others {
        probe_orders.push(o?);
    }
    let essential = probe_orders.iter().any(|(_, o)| o.is_none());
    let max = probe_orders.iter().filter_map(|(_, o)| *o).max().unwrap_or(0);
    let kind = match own {
        None => SingularityKind::Essential,
        Some(0) if max == 0 && !essential => SingularityKind::Removable,
        Some(m) => SingularityKind::Pole { order: m },
    };
    Ok(SingularityReport {
        point: *p,
        kind,
        spherical_order: 2 * max,
        isolated: max,
        cap: cap.0,
        probe_orders,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::QRational;

    type Q = Quaternion;

    #[test]
    fn laurent_of_reciprocal_binomial() {
        let p = Q::new(0.5, 0.0, 1.0, 0.0);
        let r = QRational::from_poly(QPoly::linear(&p)).reciprocal().unwrap();
        let f = SliceFunction::rational(r);
        let s = laurent_coeffs(&f, &p, (-6, 6)).unwrap();
        for n in -6..=6 {
            let want = if n == -1 { Q::ONE } else { Q::ZERO };
            assert!(s.coeff(n).approx_eq(&want, 1e-10), "n = {n}: {}", s.coeff(n));
        }
    }

    #[test]
    fn laurent_of_square_and_geometric_eval() {
        let f = SliceFunction::poly(QPoly::new(vec![Q::ZERO, Q::ZERO, Q::ONE]));
        let s = laurent_coeffs(&f, &Q::ZERO, (-3, 5)).unwrap();
        for n in -3..=5 {
            let want = if n == 2 { Q::ONE } else { Q::ZERO };
            assert!(s.coeff(n).approx_eq(&want, 1e-12));
        }
        let geo = LaurentSeries {
            center: Q::ZERO,
            unit: ImaginaryUnit::I,
            window: (0, 80),
            coeffs: vec![Q::ONE; 81],
            r1: 0.0,
            r2: Some(1.0),
            contour_radius: 0.5,
        };
        assert!(eval_laurent(&geo, &Q::real(0.5)).unwrap().approx_eq(&Q::real(2.0), 1e-15));
        let mut pole = geo.clone();
        pole.window = (-1, 0);
        pole.coeffs = vec![Q::ONE, Q::ZERO];
        pole.center = Q::I;
        assert_eq!(eval_laurent(&pole, &Q::J), Err(SliceError::OutsideConvergenceRegion));
    }

    #[test]
    fn spherical_examples() {
        let sq = SliceFunction::poly(QPoly::new(vec![Q::ZERO, Q::ZERO, Q::ONE]));
        let s = spherical_coeffs(&sq, 0.0, 1.0, None, 0, 4).unwrap();
        let want = [Q::real(-1.0), Q::ZERO, Q::ONE, Q::ZERO];
        for (k, w) in want.iter().enumerate() {
            assert!(s.coeff(k as i64).approx_eq(w, 1e-15));
        }
        let v = eval_spherical(&s, &(Q::I * 0.5)).unwrap();
        assert!(v.approx_eq(&Q::real(-0.25), 1e-15));

        let p = Q::new(1.0, 0.0, 2.0, 0.0);
        let lin = SliceFunction::poly(QPoly::linear(&p));
        let s = spherical_coeffs(&lin, 1.0, 2.0, None, 0, 2).unwrap();
        assert!(s.coeff(0).approx_eq(&-p, 1e-15) && s.coeff(1).approx_eq(&Q::ONE, 1e-15));

        let inv = SliceFunction::rational(QRational::new(QPoly::constant(Q::ONE), RealPoly::sphere(0.5, 4.0)).unwrap());
        let s = spherical_coeffs(&inv, 0.5, 2.0, None, -1, 3).unwrap();
        assert!(s.coeff(-2).approx_eq(&Q::ONE, 1e-15));
        assert!(s.coeff(0).is_zero() && s.coeff(-1).is_zero());
    }

    #[test]
    fn contour_coefficients_match_exact() {
        let f = QPoly::new(vec![Q::new(1.0, 0.5, 0.0, -1.0), Q::new(0.0, 1.0, 2.0, 0.0), Q::ONE, Q::J]);
        let g = f.clone();
        let fs = SliceFunction::sampled(DomainSpec::whole(), "f", move |q| Ok(g.eval(q)));
        let exact = spherical_coeffs(&SliceFunction::poly(f), 0.3, 0.8, None, 0, 4).unwrap();
        let num = spherical_coeffs(&fs, 0.3, 0.8, None, 0, 4).unwrap();
        for k in 0..8 {
            assert!(num.coeff(k).approx_eq(&exact.coeff(k), 1e-10), "k = {k}");
        }
        let q = Q::new(0.35, 0.0, 0.7, 0.2);
        assert!(eval_spherical(&num, &q).unwrap().approx_eq(&fs.eval(&q).unwrap(), 1e-9));
    }

    #[test]
    fn pole_and_essential_classification() {
        let p = Q::new(0.0, 0.0, 1.0, 0.0);
        let r = QRational::from_poly(QPoly::linear_power(&p, 2)).reciprocal().unwrap();
        let f = SliceFunction::rational(r);
        assert_eq!(point_order(&f, &p).unwrap(), Some(2));
        // exp(1/(q - 1)) on the real slice structure is slice preserving.
        let e = SliceFunction::sampled(
            DomainSpec::new(crate::domains::Restricted {
                base: DomainSpec::whole(),
                keep: |q: &Q| q.dist(&Q::ONE) > 1e-9,
                name: "H minus 1".into(),
            }),
            "exp(1/(q-1))",
            |q| {
                let c = slice_decompose(q);
                let u = c.unit_or(ImaginaryUnit::I);
                let z = (Complex64::new(c.x, c.y) - 1.0).inv().exp();
                Ok(u.embed(z))
            },
        );
        assert_eq!(point_order(&e, &Q::ONE).unwrap(), None);
    }
}
