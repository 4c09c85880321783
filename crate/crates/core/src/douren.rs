//! A slice regular function on a slice domain that admits no regular
//! extension to the symmetric completion, and the fixtures derived from it.
//!
//! Complex coordinates `w = x + yi` stand for `x + yI` in the base slice.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra;
use crate::domains::{cap_component, CapId, DomainSpec, Membership, Region, SphereCaps};
use crate::error::{Result, SliceError};
use crate::poly::QPoly;
use crate::quaternion::{at, slice_decompose, ImaginaryUnit, Quaternion};
use crate::slicefn::{spherical_data_with, Backing, SliceFn, SliceFunction, Sph};
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DourenConfig {
    pub unit: ImaginaryUnit,
    /// Clearance from the cuts below which points are refused.
    pub tol: f64,
}

impl Default for DourenConfig {
    fn default() -> Self {
        DourenConfig { unit: ImaginaryUnit::I, tol: 1e-9 }
    }
}

impl DourenConfig {
    pub fn new(unit: ImaginaryUnit) -> Self {
        DourenConfig { unit, ..Default::default() }
    }

    /// `T(J) = min(|J - I|, 1)`.
    pub fn t_of(&self, j: &ImaginaryUnit) -> f64 {
        j.dist(&self.unit).min(1.0)
    }
}

fn check_t(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(SliceError::ParamOutOfRange)
    }
}

/// `-1 + 2J + (1-t) e^{2 pi J s} + t e^{-2 pi J s}`.
pub fn arc_point(t: f64, j: &ImaginaryUnit, s: f64) -> Result<Quaternion> {
    check_t(t)?;
    if !(0.0..=0.5).contains(&s) {
        return Err(SliceError::ParamOutOfRange);
    }
    let c = cut_arc(t, 2.0 * PI * s);
    Ok(j.embed(c + Complex64::new(0.0, 2.0)))
}

/// The arc shifted down by `2i`: `-1 + cos th + i (1 - 2t) sin th`.
fn cut_arc(t: f64, th: f64) -> Complex64 {
    Complex64::new(-1.0 + th.cos(), (1.0 - 2.0 * t) * th.sin())
}

const ARC_SAMPLES: usize = 512;

/// Distance from `z` to `(-inf, -2]` union the shifted arc.
pub fn cut_distance(t: f64, z: Complex64) -> f64 {
    let line = if z.re <= -2.0 { z.im.abs() } else { (z - Complex64::new(-2.0, 0.0)).norm() };
    let d = |th: f64| (cut_arc(t, th) - z).norm();
    const N: usize = 64;
    let h = PI / N as f64;
    let k = (0..=N).min_by(|a, b| d(*a as f64 * h).total_cmp(&d(*b as f64 * h))).unwrap();
    // golden section on the bracketing samples
    let (mut a, mut b) = (((k as f64) - 1.0).max(0.0) * h, ((k as f64) + 1.0).min(N as f64) * h);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..45 {
        let (c1, c2) = (b - g * (b - a), a + g * (b - a));
        if d(c1) < d(c2) {
            b = c2;
        } else {
            a = c1;
        }
    }
    line.min(d(0.5 * (a + b)))
}

/// The `t` whose shifted arc passes through `z`, if any.
fn arc_parameter_through(z: Complex64) -> Option<f64> {
    let h2 = 1.0 - (z.re + 1.0).powi(2);
    if h2 <= 0.0 {
        return None;
    }
    let t = 0.5 * (1.0 - z.im / h2.sqrt());
    (0.0..=1.0).contains(&t).then_some(t)
}

fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

/// Whether the segment `[a, b]` meets the cut.
fn segment_hits_cut(t: f64, a: Complex64, b: Complex64) -> bool {
    if (a.im <= 0.0) != (b.im <= 0.0) || a.im == 0.0 || b.im == 0.0 {
        let lam = if a.im == b.im { 0.0 } else { a.im / (a.im - b.im) };
        if a.re + lam * (b.re - a.re) <= -2.0 {
            return true;
        }
    }
    let (vlo, vhi) = if t <= 0.5 { (0.0, 1.0 - 2.0 * t) } else { (1.0 - 2.0 * t, 0.0) };
    if a.re.max(b.re) < -2.0 || a.re.min(b.re) > 0.0 || a.im.max(b.im) < vlo || a.im.min(b.im) > vhi {
        return false;
    }
    let dir = b - a;
    let len2 = dir.norm_sqr();
    let g = |th: f64| cross(dir, cut_arc(t, th) - a);
    let on_segment = |th: f64| {
        let lam = ((cut_arc(t, th) - a) * dir.conj()).re / len2;
        (0.0..=1.0).contains(&lam)
    };
    let h = PI / ARC_SAMPLES as f64;
    let mut prev = g(0.0);
    for k in 1..=ARC_SAMPLES {
        let (lo0, hi0) = ((k - 1) as f64 * h, k as f64 * h);
        let cur = g(hi0);
        if prev == 0.0 && on_segment(lo0) {
            return true;
        }
        if (prev < 0.0) != (cur < 0.0) {
            let (mut lo, mut hi) = (lo0, hi0);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if (g(mid) < 0.0) == (prev < 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            if on_segment(0.5 * (lo + hi)) {
                return true;
            }
        }
        prev = cur;
    }
    false
}

/// `arg_t(z)`: argument on the plane cut along `(-inf, -2]` and the shifted
/// arc, normalized to 0 on the positive reals. Traced along a polyline on
/// the circle `|zeta| = |z|` from `|z|`, taking the route that avoids the cut.
pub fn arg_branch(t: f64, z: Complex64, tol: f64) -> Result<f64> {
    check_t(t)?;
    if cut_distance(t, z) <= tol {
        return Err(SliceError::OnCut);
    }
    let r = z.norm();
    let th = z.arg();
    let ccw = if th >= 0.0 { th } else { th + 2.0 * PI };
    let cw = ccw - 2.0 * PI;
    for legs in [64usize, 256, 1024] {
        for total in [ccw, cw] {
            let n = legs.max((total.abs() / (PI / 64.0)).ceil() as usize);
            let pts: Vec<Complex64> = (0..=n)
                .map(|k| if k == n { z } else { Complex64::from_polar(r, total * k as f64 / n as f64) })
                .collect();
            if pts.windows(2).any(|w| segment_hits_cut(t, w[0], w[1])) {
                continue;
            }
            return Ok(pts.windows(2).map(|w| (w[1] / w[0]).arg()).sum());
        }
    }
    Err(SliceError::OnCut)
}

/// `phi_t(w) = ln|w - 2i| + i arg_t(w - 2i)`.
pub fn phi(t: f64, w: Complex64, tol: f64) -> Result<Complex64> {
    let z = w - Complex64::new(0.0, 2.0);
    Ok(Complex64::new(z.norm().ln(), arg_branch(t, z, tol)?))
}

/// Spherical data of `ext(phi_t)` at `x + yJ` (any `J`), in `L_I`.
fn ext_data(cfg: &DourenConfig, t: f64, x: f64, y: f64) -> Result<Sph> {
    let i = cfg.unit;
    if y == 0.0 {
        let v = phi(t, Complex64::new(x, 0.0), cfg.tol)?;
        return Ok(Sph::new(i.embed(v), i.embed(1.0 / Complex64::new(x, -2.0))));
    }
    let a = phi(t, Complex64::new(x, y), cfg.tol)?;
    let b = phi(t, Complex64::new(x, -y), cfg.tol)?;
    let c = Complex64::new(0.0, -0.5) * (a - b);
    Ok(Sph::new(i.embed(0.5 * (a + b)), i.embed(c / y)))
}

/// The domain `Omega`: `H` minus `h_J` and the arc `a_J` in each `L_J^+`.
#[derive(Clone, Copy, Debug)]
pub struct Omega(pub DourenConfig);

impl Region for Omega {
    fn classify(&self, q: &Quaternion) -> Membership {
        if !q.is_finite() {
            return Membership::Outside;
        }
        let c = slice_decompose(q);
        let Some(j) = c.unit else { return Membership::Inside };
        let t = self.0.t_of(&j);
        if cut_distance(t, Complex64::new(c.x, c.y - 2.0)) <= self.0.tol {
            Membership::Boundary
        } else {
            Membership::Inside
        }
    }
    fn label(&self) -> String {
        "douren-omega".into()
    }
    fn edge_blocked(&self, a: &Quaternion, b: &Quaternion) -> bool {
        let (ca, cb) = (slice_decompose(a), slice_decompose(b));
        let (Some(ja), Some(jb)) = (ca.unit, cb.unit) else { return false };
        let (za, zb) = (Complex64::new(ca.x, ca.y - 2.0), Complex64::new(cb.x, cb.y - 2.0));
        if ja.dist(&jb) < 1e-12 {
            // same half slice: the segment against that slice's cut
            return segment_hits_cut(self.0.t_of(&ja), za, zb);
        }
        if (za - zb).norm() > 1e-12 {
            return false;
        }
        // same point of the sphere in two slices: the cut passes through it
        // for exactly one value of T
        let Some(ts) = arc_parameter_through(za) else { return false };
        (self.0.t_of(&ja) - ts) * (self.0.t_of(&jb) - ts) < 0.0
    }
    fn slice_box(&self) -> (f64, f64, f64) {
        (-4.0, 2.0, 4.0)
    }
}

/// The symmetric domain of `f_t`: the cuts of `phi_t` and their conjugates
/// rotated to every slice.
#[derive(Clone, Copy, Debug)]
pub struct PhiTilde {
    pub cfg: DourenConfig,
    pub t: f64,
}

impl Region for PhiTilde {
    fn classify(&self, q: &Quaternion) -> Membership {
        if !q.is_finite() {
            return Membership::Outside;
        }
        let c = slice_decompose(q);
        if cut_distance(self.t, Complex64::new(c.x, c.y - 2.0)) <= self.cfg.tol {
            Membership::Boundary
        } else {
            Membership::Inside
        }
    }
    fn label(&self) -> String {
        format!("douren-phi-{}", self.t)
    }
    fn symmetric(&self) -> bool {
        true
    }
    fn slice_box(&self) -> (f64, f64, f64) {
        (-4.0, 2.0, 4.0)
    }
}

/// `f` on `Omega` (`t = None`) or `f_t` on its symmetric domain.
struct DourenFn {
    cfg: DourenConfig,
    t: Option<f64>,
    dom: DomainSpec,
}

impl SliceFn for DourenFn {
    fn domain(&self) -> &DomainSpec {
        &self.dom
    }
    fn backing(&self) -> Backing {
        Backing::ClosedForm
    }
    fn sph(&self, q: &Quaternion) -> Result<Sph> {
        let c = slice_decompose(q);
        let t = match (self.t, c.unit) {
            (Some(t), _) => t,
            (None, Some(j)) => self.cfg.t_of(&j),
            (None, None) => 0.0,
        };
        ext_data(&self.cfg, t, c.x, c.y)
    }
    fn label(&self) -> String {
        match self.t {
            Some(t) => format!("douren-f_{t}"),
            None => "douren-f".into(),
        }
    }
}

/// The function `f` as a slice function on `Omega`.
pub fn douren_f(cfg: DourenConfig) -> SliceFunction {
    SliceFunction::new(DourenFn { cfg, t: None, dom: DomainSpec::new(Omega(cfg)) })
}

/// `f_t = ext(phi_t)` on its symmetric domain.
pub fn douren_ft(cfg: DourenConfig, t: f64) -> Result<SliceFunction> {
    check_t(t)?;
    Ok(SliceFunction::new(DourenFn { cfg, t: Some(t), dom: DomainSpec::new(PhiTilde { cfg, t }) }))
}

/// Direct evaluation of `f`, refusing points near the cuts.
pub fn f_douren(cfg: &DourenConfig, q: &Quaternion) -> Result<Quaternion> {
    if Omega(*cfg).classify(q) != Membership::Inside {
        return Err(SliceError::OnCut);
    }
    let c = slice_decompose(q);
    let t = c.unit.map_or(0.0, |j| cfg.t_of(&j));
    Ok(ext_data(cfg, t, c.x, c.y)?.at(q))
}

/// `f(q) - v` where `v = f°_s(p) + im(-1 + 2J) f'_s(p)`.
pub fn g_for(cfg: &DourenConfig, f: &SliceFunction, j: &ImaginaryUnit) -> Result<SliceFunction> {
    let p = at(-1.0, 2.0, &cfg.unit);
    let v = f.sph(&p)?.at(&at(-1.0, 2.0, j));
    algebra::sub(f, &SliceFunction::poly(QPoly::constant(v)))
}

/// `I0` at angular distance `2 pi / 5` from `I`.
pub fn default_i0(cfg: &DourenConfig) -> ImaginaryUnit {
    let a = 2.0 * PI / 5.0;
    ImaginaryUnit::new(cfg.unit.q() * a.cos() + cfg.unit.orthogonal().q() * a.sin()).unwrap()
}

/// All derived functions and distinguished points.
#[derive(Clone, Debug)]
pub struct Fixtures {
    pub f: SliceFunction,
    /// `f_1 - f_0`.
    pub d: SliceFunction,
    /// `f - f(p)`.
    pub g: SliceFunction,
    /// `(q - conj p) * g`.
    pub ell: SliceFunction,
    /// `g * (q - p1)`.
    pub m: SliceFunction,
    /// `(q - p)^{-*} * g`.
    pub h: SliceFunction,
    pub p: Quaternion,
    pub p_bar: Quaternion,
    pub i0: ImaginaryUnit,
    pub i1: ImaginaryUnit,
    pub p0: Quaternion,
    pub p1: Quaternion,
    pub c_plus: CapId,
    pub c_minus: CapId,
}

pub fn fixtures(cfg: &DourenConfig, i0: Option<ImaginaryUnit>) -> Result<Fixtures> {
    let i = cfg.unit;
    let i0 = i0.unwrap_or_else(|| default_i0(cfg));
    if i0.dist(&i) <= 0.5 || i0.dist(&i.neg()) <= 1e-9 {
        return Err(SliceError::BadUnitChoice);
    }
    let f = douren_f(*cfg);
    let d = algebra::sub(&douren_ft(*cfg, 1.0)?, &douren_ft(*cfg, 0.0)?)?;
    let g = g_for(cfg, &f, &i)?;
    let p = at(-1.0, 2.0, &i);
    let p_bar = p.conj();
    let lin = |a: Quaternion| SliceFunction::poly(QPoly::linear(&a));
    let ell = algebra::star_product(&lin(p_bar), &g)?;
    let p0 = at(-1.0, 2.0, &i0);
    let g0 = g.eval(&p0)?;
    let p1 = g0.inv()? * p0 * g0;
    let i1 = slice_decompose(&p1).unit.ok_or(SliceError::BadUnitChoice)?;
    let m = algebra::star_product(&g, &lin(p1))?;
    let h = algebra::quotient(&lin(p), &g)?;
    let c_plus = cap_component(f.domain(), &p, tol::CAP_STEP_DEG)?;
    let c_minus = cap_component(f.domain(), &p_bar, tol::CAP_STEP_DEG)?;
    Ok(Fixtures { f, d, g, ell, m, h, p, p_bar, i0, i1, p0, p1, c_plus, c_minus })
}

/// `phi_0(conj p) = ln sqrt 17 + I arg_0(-1 - 4I)`, embedded.
pub fn phi0_pbar(cfg: &DourenConfig) -> Result<Quaternion> {
    Ok(cfg.unit.embed(phi(0.0, Complex64::new(-1.0, -2.0), cfg.tol)?))
}

/// Closed-form cap data `(value, derivative)` on `C+` (`plus`) or `C-`.
pub fn cap_closed_form(cfg: &DourenConfig, plus: bool) -> Result<Sph> {
    let ph = phi0_pbar(cfg)?;
    let i = cfg.unit.q();
    let sgn = if plus { -1.0 } else { 1.0 };
    Ok(Sph::new((ph + i * (sgn * PI)) * 0.5, (i * ph + Quaternion::real(sgn * PI)) * 0.25))
}

/// Jump of the `I`-component of `f` across the arc `a_I` at parameter `s`,
/// probing at distance `delta` on both sides.
pub fn jump_witness(cfg: &DourenConfig, s: f64, delta: f64) -> Result<f64> {
    let c = cut_arc(0.0, 2.0 * PI * s) + Complex64::new(0.0, 2.0);
    // outward normal of the circle |w + 1 - 2i| = 1
    let n = (c - Complex64::new(-1.0, 2.0)) / (c - Complex64::new(-1.0, 2.0)).norm();
    let diff = |d: f64| -> Result<f64> {
        let outside = f_douren(cfg, &cfg.unit.embed(c + n * d))?;
        let inside = f_douren(cfg, &cfg.unit.embed(c - n * d))?;
        Ok(cfg.unit.project(&(outside - inside)).im)
    };
    // Richardson step removes the smooth O(delta) part
    Ok(2.0 * diff(0.5 * delta)? - diff(delta)?)
}

/// One row of the cap table: computed spherical data against the closed form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapRow {
    pub cap: String,
    pub unit: ImaginaryUnit,
    pub value: Quaternion,
    pub derivative: Quaternion,
    pub closed_value: Quaternion,
    pub closed_derivative: Quaternion,
    pub deviation: f64,
}

/// Spherical data of `f` at `n` units of each cap of `-1 + 2S`, from the
/// two-unit formula on the cap grid.
pub fn cap_table(cfg: &DourenConfig, n: usize) -> Result<Vec<CapRow>> {
    let f = douren_f(*cfg);
    let caps = SphereCaps::compute(f.domain(), -1.0, 2.0, 2.0);
    let mut rows = vec![];
    for (name, rep, plus) in [("C+", cfg.unit, true), ("C-", cfg.unit.neg(), false)] {
        let closed = cap_closed_form(cfg, plus)?;
        let idx = caps.cap_of(&rep).ok_or_else(|| SliceError::NoCapInfo(name.into()))?;
        for j in caps.sample(idx, n) {
            let d = spherical_data_with(&f, &at(-1.0, 2.0, &j), 2.0)?;
            rows.push(CapRow {
                cap: name.into(),
                unit: j,
                value: d.value,
                derivative: d.derivative,
                closed_value: closed.value,
                closed_derivative: closed.deriv,
                deviation: d.value.dist(&closed.value).max(d.derivative.dist(&closed.deriv)),
            });
        }
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JumpRow {
    pub s: f64,
    pub delta: f64,
    pub jump: f64,
    pub deviation: f64,
}

pub fn jump_table(cfg: &DourenConfig, delta: f64) -> Result<Vec<JumpRow>> {
    [0.05, 0.1, 0.2, 0.25, 0.3, 0.4, 0.45]
        .iter()
        .map(|&s| {
            let jump = jump_witness(cfg, s, delta)?;
            Ok(JumpRow { s, delta, jump, deviation: (jump.abs() - 2.0 * PI).abs() })
        })
        .collect()
}

/// Zero set of a function inside one cap, read off its spherical data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CapZeros {
    Empty,
    Point { point: Quaternion },
    WholeCap,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroRow {
    pub fixture: String,
    pub cap: String,
    pub value: Quaternion,
    pub derivative: Quaternion,
    pub zeros: CapZeros,
}

/// `Z(f)` inside the cap of `rep` on `x + yS`: the whole cap when the
/// spherical data vanish, else the single `x + yK` with `b + yK c = 0` if
/// that `K` is a unit of the same cap.
pub fn cap_zeros(f: &SliceFunction, x: f64, y: f64, rep: &ImaginaryUnit) -> Result<(Sph, CapZeros)> {
    let s = f.sph(&at(x, y, rep))?;
    let scale = s.scale_norm().max(1.0);
    if s.value.norm() <= tol::CAP_ZERO * scale && y * s.deriv.norm() <= tol::CAP_ZERO * scale {
        return Ok((s, CapZeros::WholeCap));
    }
    let Some(di) = s.deriv.try_inv() else { return Ok((s, CapZeros::Empty)) };
    let k = -(s.value * di) * (1.0 / y);
    if k.w.abs() > 1e-8 || (k.norm() - 1.0).abs() > 1e-8 {
        return Ok((s, CapZeros::Empty));
    }
    let k = ImaginaryUnit::new(k.im())?;
    let caps = SphereCaps::compute(f.domain(), x, y, 2.0);
    let same = caps.cap_of(&k).is_some() && caps.cap_of(&k) == caps.cap_of(rep);
    Ok((s, if same { CapZeros::Point { point: at(x, y, &k) } } else { CapZeros::Empty }))
}

/// Zero sets of `g`, `l` and `m` on both caps of `-1 + 2S`.
pub fn fixture_zero_report(fx: &Fixtures) -> Result<Vec<ZeroRow>> {
    let i = fx.c_plus.representative;
    let mut rows = vec![];
    for (name, f) in [("g", &fx.g), ("l", &fx.ell), ("m", &fx.m)] {
        for (cap, rep) in [("C+", i), ("C-", i.neg())] {
            let (s, zeros) = cap_zeros(f, -1.0, 2.0, &rep)?;
            rows.push(ZeroRow { fixture: name.into(), cap: cap.into(), value: s.value, derivative: s.deriv, zeros });
        }
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub x: f64,
    pub y: f64,
    /// `None` on the cuts.
    pub value: Option<Quaternion>,
}

/// `f` on an `nx` by `ny` lattice of the slice `L_unit` over `[x0, x1] x [y0, y1]`.
pub fn slice_field(f: &SliceFunction, unit: &ImaginaryUnit, bounds: [f64; 4], nx: usize, ny: usize) -> Vec<FieldSample> {
    let [x0, x1, y0, y1] = bounds;
    let step = |a: f64, b: f64, n: usize, k: usize| if n <= 1 { a } else { a + (b - a) * k as f64 / (n - 1) as f64 };
    let mut out = Vec::with_capacity(nx * ny);
    for b in 0..ny {
        for a in 0..nx {
            let (x, y) = (step(x0, x1, nx, a), step(y0, y1, ny, b));
            out.push(FieldSample { x, y, value: f.eval(&unit.embed(Complex64::new(x, y))).ok() });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeros::{divides_near, multiplicities, vanishes_on_cap};

    type Q = Quaternion;

    /// Independent closed form for `arg_t`.
    fn arg_closed(t: f64, z: Complex64) -> f64 {
        let a = z.im.atan2(z.re);
        let k = (1.0 - 2.0 * t).abs();
        let inside = z.re > -2.0 && z.re < 0.0 && (z.re + 1.0).powi(2) + (z.im / k).powi(2) < 1.0;
        if t < 0.5 && z.im > 0.0 && inside {
            a - 2.0 * PI
        } else if t > 0.5 && z.im < 0.0 && inside {
            a + 2.0 * PI
        } else if z.im == 0.0 && z.re < 0.0 {
            if t < 0.5 { -PI } else { PI }
        } else {
            a
        }
    }

    #[test]
    fn arc_points() {
        let j = ImaginaryUnit::J;
        assert!(arc_point(0.3, &j, 0.0).unwrap().approx_eq(&(Q::J * 2.0), 1e-15));
        assert!(arc_point(0.3, &j, 0.5).unwrap().approx_eq(&Q::new(-2.0, 0.0, 2.0, 0.0), 1e-15));
        assert!(arc_point(0.5, &j, 0.25).unwrap().approx_eq(&Q::new(-1.0, 0.0, 2.0, 0.0), 1e-15));
        assert_eq!(arc_point(1.5, &j, 0.1), Err(SliceError::ParamOutOfRange));
    }

    #[test]
    fn tracing_matches_closed_form() {
        assert_eq!(arg_branch(0.0, Complex64::new(3.0, 0.0), 1e-9).unwrap(), 0.0);
        assert!((arg_branch(0.0, Complex64::new(-1.0, 0.0), 1e-9).unwrap() + PI).abs() < 1e-12);
        let v = arg_branch(0.0, Complex64::new(-1.0, -4.0), 1e-9).unwrap();
        assert!((v - (-4f64).atan2(-1.0)).abs() < 1e-12 && (v + 1.8158).abs() < 1e-4);
        let mut rng = 12345u64;
        let mut next = || {
            rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (rng >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..400 {
            let t = next();
            let z = Complex64::new(-4.0 + 6.0 * next(), -3.0 + 5.0 * next());
            if cut_distance(t, z) < 1e-3 {
                continue;
            }
            let a = arg_branch(t, z, 1e-9).unwrap();
            assert!((a - arg_closed(t, z)).abs() < 1e-12, "t={t} z={z}");
        }
        assert_eq!(arg_branch(0.0, Complex64::new(-1.0, 1.0), 1e-9), Err(SliceError::OnCut));
    }

    #[test]
    fn phi_difference_on_c_t() {
        let cfg = DourenConfig::default();
        let x = 2.5;
        assert!((phi(0.7, Complex64::new(x, 2.0), cfg.tol).unwrap() - Complex64::new(x.ln(), 0.0)).norm() < 1e-12);
        // interior of C_t (upper half disk) and outside
        let w = Complex64::new(-1.0, 2.4);
        let d = phi(0.8, w, cfg.tol).unwrap() - phi(0.0, w, cfg.tol).unwrap();
        assert!((d - Complex64::new(0.0, 2.0 * PI)).norm() < 1e-12);
        let w = Complex64::new(1.0, 0.5);
        assert!((phi(0.8, w, cfg.tol).unwrap() - phi(0.0, w, cfg.tol).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn values_and_cap_data() {
        let cfg = DourenConfig::default();
        let f = douren_f(cfg);
        assert!(f.eval(&at(-1.0, 2.0, &cfg.unit)).unwrap().approx_eq(&(Q::I * -PI), 1e-12));
        assert!(f.eval(&Q::new(1.5, 2.0, 0.0, 0.0)).unwrap().approx_eq(&Q::real(1.5f64.ln()), 1e-12));
        let plus = cap_closed_form(&cfg, true).unwrap();
        let minus = cap_closed_form(&cfg, false).unwrap();
        for j in [ImaginaryUnit::I, ImaginaryUnit::from_vector(1.0, 0.3, 0.0).unwrap()] {
            let s = f.sph(&at(-1.0, 2.0, &j)).unwrap();
            assert!(s.value.approx_eq(&plus.value, 1e-12) && s.deriv.approx_eq(&plus.deriv, 1e-12));
        }
        for j in [ImaginaryUnit::I.neg(), ImaginaryUnit::K, ImaginaryUnit::from_vector(0.2, 1.0, 0.5).unwrap()] {
            let s = f.sph(&at(-1.0, 2.0, &j)).unwrap();
            assert!(s.value.approx_eq(&minus.value, 1e-12) && s.deriv.approx_eq(&minus.deriv, 1e-12));
        }
        assert!((minus.value - plus.value).approx_eq(&(Q::I * PI), 1e-12));
        assert!((jump_witness(&cfg, 0.25, 1e-5).unwrap().abs() - 2.0 * PI).abs() < 1e-6);
        assert_eq!(f_douren(&cfg, &Q::new(-1.0, 3.0, 0.0, 0.0)), Err(SliceError::OnCut));
    }

    #[test]
    fn difference_is_zero_divisor() {
        let cfg = DourenConfig::default();
        let fx = fixtures(&cfg, None).unwrap();
        let sym = algebra::symmetrize(&fx.d);
        for j in [ImaginaryUnit::J, ImaginaryUnit::from_vector(0.3, -0.2, 1.0).unwrap()] {
            let q = at(-0.8, 1.7, &j);
            assert!(fx.d.eval(&q).unwrap().approx_eq(&((Q::I + j.q()) * PI), 1e-11));
            assert!(sym.eval(&q).unwrap().norm() < 1e-10);
        }
    }

    #[test]
    fn caps_and_factorization() {
        let cfg = DourenConfig::default();
        let fx = fixtures(&cfg, None).unwrap();
        assert_ne!(fx.c_plus.index, fx.c_minus.index);
        assert!(fx.i1.dist(&cfg.unit) > 0.1 && fx.i1.dist(&cfg.unit.neg()) > 0.1);
        assert!(divides_near(&fx.g, &fx.p, &fx.c_plus).unwrap());
        assert!(!divides_near(&fx.g, &fx.p, &fx.c_minus).unwrap());
        let g3 = g_for(&cfg, &fx.f, &cfg.unit.neg()).unwrap();
        assert!(divides_near(&g3, &fx.p_bar, &fx.c_plus).unwrap());
        assert!(divides_near(&g3, &fx.p_bar, &fx.c_minus).unwrap());
        assert!(vanishes_on_cap(&fx.ell, &fx.c_plus).unwrap());
        assert!(!vanishes_on_cap(&fx.ell, &fx.c_minus).unwrap());
        assert!(fx.m.eval(&fx.p).unwrap().norm() < 1e-10);
        assert!(fx.m.eval(&fx.p0).unwrap().norm() < 1e-10);
        let s = fx.g.sph(&fx.p0).unwrap();
        assert!((s.value.norm() - 2.0 * s.deriv.norm()).abs() > 1e-3);
        let rows = fixture_zero_report(&fx).unwrap();
        let z = |f: &str, c: &str| rows.iter().find(|r| r.fixture == f && r.cap == c).unwrap().zeros.clone();
        assert!(matches!(z("g", "C+"), CapZeros::Point { point } if point.approx_eq(&fx.p, 1e-9)));
        assert_eq!(z("g", "C-"), CapZeros::Empty);
        assert_eq!(z("l", "C+"), CapZeros::WholeCap);
        assert!(matches!(z("l", "C-"), CapZeros::Point { point } if point.approx_eq(&fx.p_bar, 1e-9)));
        assert!(matches!(z("m", "C-"), CapZeros::Point { point } if point.approx_eq(&fx.p0, 1e-9)));
        let mu = multiplicities(&fx.g, &fx.p, &fx.c_plus).unwrap();
        assert_eq!(mu.classical, 1);
    }
}
