//! Cauchy-type integral formulas: slicewise, local (boundary data from a
//! reference slice) and volume, on top of a noncommutative line integral.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SliceError};
use crate::quaternion::{at, slice_decompose, split_left, split_right, ImaginaryUnit, Quaternion};
use crate::slicefn::SliceFunction;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

const GL_ORDER: usize = 16;

fn gl16() -> &'static (Vec<f64>, Vec<f64>) {
    static C: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    C.get_or_init(|| gauss_legendre(GL_ORDER))
}

/// One piece of a contour in a slice, in complex coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Piece {
    /// Full circle, counterclockwise when `positive`.
    Circle { center: (f64, f64), radius: f64, positive: bool },
    /// Arc `center + radius e^{it}` for `t` from `t0` to `t1`.
    Arc { center: (f64, f64), radius: f64, t0: f64, t1: f64 },
}

impl Piece {
    fn point(&self, s: f64) -> (Complex64, Complex64) {
        let (c, r, t0, t1) = match *self {
            Piece::Circle { center, radius, positive } => {
                let (a, b) = if positive { (0.0, 2.0 * PI) } else { (2.0 * PI, 0.0) };
                (center, radius, a, b)
            }
            Piece::Arc { center, radius, t0, t1 } => (center, radius, t0, t1),
        };
        let t = t0 + (t1 - t0) * s;
        let e = Complex64::from_polar(r, t);
        (Complex64::new(c.0, c.1) + e, Complex64::i() * e * (t1 - t0))
    }

    fn ends(&self) -> (Complex64, Complex64) {
        (self.point(0.0).0, self.point(1.0).0)
    }
}

/// Piecewise smooth closed contour in the slice `L_I`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    pub unit: ImaginaryUnit,
    pub pieces: Vec<Piece>,
    /// Gauss-Legendre panels per piece (16 nodes each).
    pub panels: usize,
}

impl Contour {
    pub fn circle(unit: ImaginaryUnit, center: Complex64, radius: f64, panels: usize) -> Self {
        Contour { unit, pieces: vec![Piece::Circle { center: (center.re, center.im), radius, positive: true }], panels }
    }

    pub fn node_count(&self) -> usize {
        self.pieces.len() * self.panels * GL_ORDER
    }

    /// Arcs must chain into closed loops.
    pub fn check_closed(&self) -> Result<()> {
        let arcs: Vec<_> = self.pieces.iter().filter(|p| matches!(p, Piece::Arc { .. })).collect();
        if arcs.is_empty() {
            return Ok(());
        }
        let mut start = arcs[0].ends().0;
        for (k, a) in arcs.iter().enumerate() {
            let (_, e) = a.ends();
            let next = arcs.get(k + 1).map(|b| b.ends().0);
            match next {
                Some(n) if (e - n).norm() <= 1e-12 => {}
                Some(n) if (e - start).norm() <= 1e-12 => start = n,
                None if (e - start).norm() <= 1e-12 => {}
                _ => return Err(SliceError::OpenContour),
            }
        }
        Ok(())
    }

    /// `(s_k, w_k ds/dt)` for every quadrature node.
    pub fn nodes(&self) -> Vec<(Complex64, Complex64)> {
        let (x, w) = gl16();
        let mut out = Vec::with_capacity(self.node_count());
        for piece in &self.pieces {
            for p in 0..self.panels {
                let (a, b) = (p as f64 / self.panels as f64, (p + 1) as f64 / self.panels as f64);
                for (xi, wi) in x.iter().zip(w) {
                    let s = 0.5 * (a + b) + 0.5 * (b - a) * xi;
                    let (z, dz) = piece.point(s);
                    out.push((z, dz * (0.5 * (b - a) * wi)));
                }
            }
        }
        out
    }

    /// Winding number about `z` (rounded).
    pub fn winding(&self, z: Complex64) -> i64 {
        let s: Complex64 = self.nodes().iter().map(|(s, ds)| ds / (s - z)).sum();
        (s.im / (2.0 * PI)).round() as i64
    }
}

/// `sum` in a fixed pairwise order for reproducibility.
fn pairwise_sum(v: &[Quaternion]) -> Quaternion {
    if v.len() <= 8 {
        return v.iter().fold(Quaternion::ZERO, |a, b| a + *b);
    }
    let (l, r) = v.split_at(v.len() / 2);
    pairwise_sum(l) + pairwise_sum(r)
}

/// `int_gamma g(s) ds f(s)` through the split `f = F + G J`, `g = H + J K`
/// into four complex line integrals in `L_I`.
pub fn nc_line_integral(
    g: &(dyn Fn(Complex64) -> Result<Quaternion> + Sync),
    contour: &Contour,
    f: &(dyn Fn(Complex64) -> Result<Quaternion> + Sync),
) -> Result<Quaternion> {
    contour.check_closed()?;
    let i = contour.unit;
    let j = i.orthogonal();
    let terms: Vec<Result<[Complex64; 4]>> = contour
        .nodes()
        .par_iter()
        .map(|(s, ds)| {
            let (ff, gg) = split_left(&f(*s)?, &i, &j);
            let (h, k) = split_right(&g(*s)?, &i, &j);
            Ok([h * ds * ff, h * ds * gg, k * ds * ff, k * ds * gg])
        })
        .collect();
    let mut acc = [Complex64::new(0.0, 0.0); 4];
    for t in terms {
        let t = t?;
        for (a, b) in acc.iter_mut().zip(t) {
            *a += b;
        }
    }
    let jq = j.q();
    Ok(i.embed(acc[0]) + i.embed(acc[1]) * jq + jq * i.embed(acc[2]) + jq * i.embed(acc[3]) * jq)
}

/// `f(z) = (2 pi I)^{-1} int ds / (s - z) f(s)` on one slice.
pub fn slicewise_cauchy(f: &SliceFunction, contour: &Contour, z: Complex64) -> Result<Quaternion> {
    if contour.winding(z) != 1 {
        return Err(SliceError::ProbeOutside);
    }
    let u = contour.unit;
    let g = move |s: Complex64| Ok(u.embed(1.0 / (2.0 * PI * Complex64::i() * (s - z))));
    let ff = |s: Complex64| f.eval(&u.embed(s));
    nc_line_integral(&g, contour, &ff)
}

/// `(s - q)^{-*} = (|s|^2 - q 2 re(s) + q^2)^{-1} (conj(s) - q)`.
pub fn cauchy_kernel(s: &Quaternion, q: &Quaternion) -> Result<Quaternion> {
    let d = *q * *q - *q * (2.0 * s.w) + s.norm_sqr();
    Ok(d.inv()? * (s.conj() - *q))
}

/// Symmetric open sets with circular slice sections.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SymmetricSet {
    /// Ball centred on the real axis.
    Ball { center: f64, radius: f64 },
    /// `{x + yJ : (x - xc)^2 + (|y| - yc)^2 < r^2}` with `r < yc`.
    Torus { xc: f64, yc: f64, r: f64 },
}

impl SymmetricSet {
    pub fn contains(&self, q: &Quaternion) -> bool {
        let c = slice_decompose(q);
        match *self {
            SymmetricSet::Ball { center, radius } => (c.x - center).hypot(c.y) < radius,
            SymmetricSet::Torus { xc, yc, r } => (c.x - xc).hypot(c.y - yc) < r,
        }
    }

    /// `dU_I` with every loop counterclockwise.
    pub fn contour(&self, unit: ImaginaryUnit, panels: usize) -> Contour {
        let pieces = match *self {
            SymmetricSet::Ball { center, radius } => {
                vec![Piece::Circle { center: (center, 0.0), radius, positive: true }]
            }
            SymmetricSet::Torus { xc, yc, r } => vec![
                Piece::Circle { center: (xc, yc), radius: r, positive: true },
                Piece::Circle { center: (xc, -yc), radius: r, positive: true },
            ],
        };
        Contour { unit, pieces, panels }
    }

    /// Points of `U_J^+` (and of `U` on the real axis) used as probes.
    fn sample_upper(&self, j: &ImaginaryUnit, n: usize) -> Vec<Quaternion> {
        let mut out = vec![];
        for a in 0..n {
            for b in 0..n {
                let (u, v) = ((a as f64 + 0.5) / n as f64, (b as f64 + 0.5) / n as f64);
                let q = match *self {
                    SymmetricSet::Ball { center, radius } => {
                        let r = radius * u.sqrt() * 0.999;
                        let t = PI * v;
                        at(center + r * t.cos(), r * t.sin(), j)
                    }
                    SymmetricSet::Torus { xc, yc, r } => {
                        let rr = r * u.sqrt() * 0.999;
                        let t = 2.0 * PI * v;
                        at(xc + rr * t.cos(), yc + rr * t.sin(), j)
                    }
                };
                out.push(q);
            }
        }
        out
    }
}

/// Boundary data `f~`: `f` itself, or the extension from the reference slice
/// `J0`, `f~(x+yJ) = f°_s(x+yJ0) + yJ f'_s(x+yJ0)`.
fn boundary_value(f: &SliceFunction, j0: Option<&ImaginaryUnit>, s: &Quaternion) -> Result<Quaternion> {
    let Some(j0) = j0 else { return f.eval(s) };
    let c = slice_decompose(s);
    if c.unit.is_none() {
        return f.eval(s);
    }
    let d = f.sph(&at(c.x, c.y, j0))?;
    Ok(d.at(s))
}

/// Largest `eps = 2^-k` (from 2 down) such that on rings `|J - J0| = eps`
/// and `eps/2` the extension from `J0` agrees with `f` on `U_J^+`.
pub fn validated_eps(f: &SliceFunction, u: &SymmetricSet, j0: &ImaginaryUnit) -> f64 {
    let e1 = j0.orthogonal();
    let e2 = ImaginaryUnit::new(j0.q().cross(&e1.q())).unwrap();
    let ring = |eps: f64| -> Vec<ImaginaryUnit> {
        // chordal distance eps <-> angle 2 asin(eps/2)
        let a = 2.0 * (eps / 2.0).min(1.0).asin();
        (0..8)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / 8.0;
                let v = j0.q() * a.cos() + (e1.q() * t.cos() + e2.q() * t.sin()) * a.sin();
                ImaginaryUnit::new(v).unwrap()
            })
            .collect()
    };
    let ok = |eps: f64| {
        ring(eps).iter().all(|j| {
            u.sample_upper(j, 4).iter().all(|q| {
                if !f.domain().contains(q) {
                    return false;
                }
                match (f.eval(q), boundary_value(f, Some(j0), q)) {
                    (Ok(a), Ok(b)) => a.dist(&b) <= 1e-8 * a.norm().max(1.0),
                    _ => false,
                }
            })
        })
    };
    let mut eps = 2.0;
    while eps > 1e-6 {
        if ok(eps) && ok(eps / 2.0) {
            return eps;
        }
        eps *= 0.5;
    }
    0.0
}

/// Local Cauchy formula on the slice `unit`: with `j0 = None` the boundary
/// data is `f` itself; with `j0 = Some((J0, eps))` it is the extension from
/// `J0` and `q` must lie in the validated cone.
pub fn local_cauchy(
    f: &SliceFunction,
    set: &SymmetricSet,
    unit: ImaginaryUnit,
    q: &Quaternion,
    j0: Option<(ImaginaryUnit, f64)>,
    panels: usize,
) -> Result<Quaternion> {
    if !set.contains(q) {
        return Err(SliceError::ProbeOutside);
    }
    if let Some((j, eps)) = j0 {
        let c = slice_decompose(q);
        if let Some(qu) = c.unit {
            if qu.dist(&j) >= eps {
                return Err(SliceError::ProbeOutsideValidated);
            }
        }
    }
    let contour = set.contour(unit, panels);
    let iu = unit;
    let g = move |s: Complex64| -> Result<Quaternion> {
        let k = cauchy_kernel(&iu.embed(s), q)?;
        Ok(k * iu.embed(Complex64::new(0.0, -1.0 / (2.0 * PI))))
    };
    let jr = j0.map(|(j, _)| j);
    let ff = move |s: Complex64| boundary_value(f, jr.as_ref(), &iu.embed(s));
    nc_line_integral(&g, &contour, &ff)
}

/// Volume Cauchy formula over the boundary 3-sphere of a ball centred on
/// the real axis: `phi_nodes` Gauss nodes along the half circle times a
/// Gauss-product grid (`theta_nodes` x `2 theta_nodes`) on the unit sphere.
pub fn volume_cauchy(
    f: &SliceFunction,
    center: f64,
    radius: f64,
    q: &Quaternion,
    j0: Option<ImaginaryUnit>,
    phi_nodes: usize,
    theta_nodes: usize,
) -> Result<Quaternion> {
    if q.dist(&Quaternion::real(center)) >= radius {
        return Err(SliceError::ProbeOutside);
    }
    let (px, pw) = gauss_legendre(phi_nodes);
    let (tx, tw) = gauss_legendre(theta_nodes);
    let naz = 2 * theta_nodes;
    let mut units = vec![];
    for (ct, wt) in tx.iter().zip(&tw) {
        let st = (1.0 - ct * ct).sqrt();
        for a in 0..naz {
            let ph = 2.0 * PI * (a as f64 + 0.5) / naz as f64;
            let v = Quaternion::new(0.0, st * ph.cos(), st * ph.sin(), *ct);
            units.push((ImaginaryUnit::new(v).unwrap(), wt * 2.0 * PI / naz as f64));
        }
    }
    let rows: Vec<Result<Quaternion>> = px
        .par_iter()
        .zip(pw.par_iter())
        .map(|(xi, wi)| {
            let phi = 0.5 * PI * (xi + 1.0);
            let wphi = 0.5 * PI * wi;
            let (x, y) = (center + radius * phi.cos(), radius * phi.sin());
            let sq = (*q - x) * (*q - x) + y * y;
            let sinv = sq.inv()?;
            let mut terms = Vec::with_capacity(units.len());
            for (u, wa) in &units {
                let w = at(x, y, u);
                let n = Quaternion::real(phi.cos()) + u.q() * phi.sin();
                let kern = sinv * (Quaternion::real(x) - u.q() * y - *q);
                let fv = boundary_value(f, j0.as_ref(), &w)?;
                // (2 pi y)^{-2} y^2 from the surface element cancels.
                terms.push(kern * n * fv * (wa * wphi * radius / (4.0 * PI * PI)));
            }
            Ok(pairwise_sum(&terms))
        })
        .collect();
    let rows: Vec<Quaternion> = rows.into_iter().collect::<Result<_>>()?;
    Ok(pairwise_sum(&rows))
}

/// One probe of a Cauchy reproduction table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CauchyProbe {
    pub probe: Quaternion,
    pub value: Quaternion,
    pub direct: Quaternion,
    pub residual: f64,
}

impl CauchyProbe {
    pub fn new(probe: Quaternion, value: Quaternion, direct: Quaternion) -> Self {
        let residual = value.dist(&direct) / direct.norm().max(1.0);
        CauchyProbe { probe, value, direct, residual }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::DomainSpec;
    use crate::poly::QPoly;

    type Q = Quaternion;

    fn square() -> SliceFunction {
        SliceFunction::poly(QPoly::new(vec![Q::ZERO, Q::ZERO, Q::ONE]))
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(16);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
        assert!((s - 2.0 / 31.0).abs() < 1e-14);
    }

    #[test]
    fn residue_and_linearity() {
        let c = Contour::circle(ImaginaryUnit::I, Complex64::new(0.2, 0.1), 1.0, 8);
        let z = Complex64::new(0.3, 0.0);
        let r = nc_line_integral(&|_| Ok(Q::ONE), &c, &|s| Ok(ImaginaryUnit::I.embed(1.0 / (s - z)))).unwrap();
        assert!(r.approx_eq(&(Q::I * (2.0 * PI)), 1e-13));
        // Direct quaternion products agree with the four-term split.
        let g = |s: Complex64| Ok(Q::new(s.re, 1.0, s.im, -0.5));
        let f = |s: Complex64| Ok(Q::new(1.0, s.im * s.re, 2.0, s.re));
        let split = nc_line_integral(&g, &c, &f).unwrap();
        let direct = c
            .nodes()
            .iter()
            .fold(Q::ZERO, |a, (s, ds)| a + g(*s).unwrap() * ImaginaryUnit::I.embed(*ds) * f(*s).unwrap());
        assert!(split.approx_eq(&direct, 1e-13));
    }

    #[test]
    fn slicewise_examples() {
        let c = Contour::circle(ImaginaryUnit::I, Complex64::new(0.0, 0.0), 1.0, 8);
        let v = slicewise_cauchy(&square(), &c, Complex64::new(0.3, 0.4)).unwrap();
        assert!(v.approx_eq(&Q::new(-0.07, 0.24, 0.0, 0.0), 1e-13));
        assert_eq!(slicewise_cauchy(&square(), &c, Complex64::new(2.0, 0.0)), Err(SliceError::ProbeOutside));
    }

    #[test]
    fn local_cauchy_off_slice() {
        let set = SymmetricSet::Ball { center: 0.0, radius: 1.0 };
        let v = local_cauchy(&square(), &set, ImaginaryUnit::I, &(Q::J * 0.5), None, 8).unwrap();
        assert!(v.approx_eq(&Q::real(-0.25), 1e-12));
        let q = Q::new(0.1, 0.3, -0.2, 0.4);
        let f = SliceFunction::poly(QPoly::new(vec![Q::new(1.0, 2.0, 0.0, -1.0), Q::J, Q::K, Q::ONE]));
        for u in [ImaginaryUnit::I, ImaginaryUnit::K, ImaginaryUnit::from_vector(1.0, 1.0, 1.0).unwrap()] {
            let v = local_cauchy(&f, &set, u, &q, None, 8).unwrap();
            assert!(v.approx_eq(&f.eval(&q).unwrap(), 1e-12));
        }
    }

    #[test]
    fn extension_data_from_reference_slice() {
        let f = SliceFunction::poly_on(
            QPoly::new(vec![Q::ONE, Q::J, Q::K]),
            DomainSpec::whole(),
        );
        let set = SymmetricSet::Torus { xc: 0.5, yc: 2.0, r: 1.0 };
        let eps = validated_eps(&f, &set, &ImaginaryUnit::J);
        assert_eq!(eps, 2.0);
        let q = at(0.6, 2.1, &ImaginaryUnit::from_vector(0.1, 1.0, 0.0).unwrap());
        let v = local_cauchy(&f, &set, ImaginaryUnit::I, &q, Some((ImaginaryUnit::J, eps)), 8).unwrap();
        assert!(v.approx_eq(&f.eval(&q).unwrap(), 1e-11));
    }

    #[test]
    fn volume_examples() {
        let one = SliceFunction::poly(QPoly::constant(Q::ONE));
        let v = volume_cauchy(&one, 0.0, 1.0, &Q::ZERO, None, 64, 12).unwrap();
        assert!(v.approx_eq(&Q::ONE, 1e-10), "{v}");
        let id = SliceFunction::poly(QPoly::identity());
        let q = Q::I * 0.2;
        assert!(volume_cauchy(&id, 0.0, 1.0, &q, None, 64, 12).unwrap().approx_eq(&q, 1e-9));
        let q = Q::new(0.1, 0.0, 0.0, 0.2);
        let v = volume_cauchy(&square(), 0.0, 1.0, &q, None, 64, 12).unwrap();
        assert!(v.approx_eq(&(q * q), 1e-9));
    }
}
