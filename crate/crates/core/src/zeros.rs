//! Zero sets, cap-relative divisibility, factorization into spherical and
//! linear factors, and multiplicities.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra;
use crate::domains::{CapId, DomainSpec, Restricted, SphereCaps};
use crate::error::{Result, SliceError};
use crate::poly::{QPoly, RealPoly};
use crate::quaternion::{at, same_sphere, slice_decompose, ImaginaryUnit, Quaternion, Scalar};
use crate::slicefn::{local_two_point, Backing, SliceFn, SliceFunction, Sph};
use crate::tol;

/// Grid step (degrees) used when probing caps.
const PROBE_STEP_DEG: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Exact,
    Polished,
    Scanned,
}

/// Where a zero lives.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CapRef {
    RealAxis,
    WholeSphere,
    Cap { cap: CapId },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsolatedZero {
    pub point: Quaternion,
    pub cap: CapRef,
    pub classical: usize,
    pub isolated: usize,
    /// Linear factors `p_1, .., p_n` of the normal form on this sphere.
    pub chain: Vec<Quaternion>,
    pub provenance: Provenance,
    /// Spherical derivative within 10x of the cap-zero threshold.
    pub marginal: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphericalZero {
    pub x: f64,
    pub y: f64,
    pub cap: CapRef,
    /// Spherical multiplicity `2m`.
    pub multiplicity: usize,
    /// Linear factors left after removing the spherical ones.
    pub chain: Vec<Quaternion>,
    pub provenance: Provenance,
    pub marginal: bool,
}

/// `q - p` divides near the cap although `f(p) != 0` there.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GhostDivisor {
    pub point: Quaternion,
    pub cap: CapRef,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ZeroReport {
    pub isolated: Vec<IsolatedZero>,
    pub spherical: Vec<SphericalZero>,
    pub ghosts: Vec<GhostDivisor>,
}

/// `(classical m_f^C(p), spherical 2m, isolated n)` plus the linear chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Multiplicities {
    pub classical: usize,
    pub spherical: usize,
    pub isolated: usize,
    pub chain: Vec<Quaternion>,
}

// ---------------------------------------------------------------------------
// Real-coefficient roots

fn balance(a: &mut DMatrix<f64>) {
    const RADIX: f64 = 2.0;
    let n = a.nrows();
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let (mut c, mut r) = (0.0, 0.0);
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX * RADIX;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= RADIX * RADIX;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                for j in 0..n {
                    a[(i, j)] /= f;
                    a[(j, i)] *= f;
                }
            }
        }
    }
}

/// All complex roots of a real polynomial, from the balanced companion
/// matrix, each given two guarded Newton steps.
pub fn complex_roots(p: &RealPoly) -> Vec<Complex64> {
    let c = p.coeffs();
    let Some(n) = p.degree() else { return vec![] };
    if n == 0 {
        return vec![];
    }
    let lead = c[n];
    let mut a = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        a[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        a[(i, n - 1)] = -c[i] / lead;
    }
    balance(&mut a);
    let d = p.derivative();
    let eig: Vec<Complex64> = match nalgebra::Schur::try_new(a, f64::EPSILON, 20_000) {
        Some(sch) => sch.complex_eigenvalues().iter().copied().collect(),
        None => aberth(p),
    };
    eig.into_iter()
        .map(|mut z| {
            for _ in 0..2 {
                let (v, dv) = (p.eval_complex(z), d.eval_complex(z));
                if dv.norm() == 0.0 {
                    break;
                }
                let w = z - v / dv;
                if p.eval_complex(w).norm() < v.norm() {
                    z = w;
                } else {
                    break;
                }
            }
            z
        })
        .collect()
}

/// Aberth iteration, used when the Schur iteration does not settle.
fn aberth(p: &RealPoly) -> Vec<Complex64> {
    let n = p.degree().unwrap_or(0);
    let d = p.derivative();
    let c = p.coeffs();
    let r = (0..n).map(|k| (c[k] / c[n]).abs().powf(1.0 / (n - k) as f64)).fold(0.0, f64::max).max(1e-3);
    let mut z: Vec<Complex64> =
        (0..n).map(|k| Complex64::from_polar(r, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64)).collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let ratio = p.eval_complex(z[i]) / d.eval_complex(z[i]);
            if !ratio.is_finite() {
                continue;
            }
            let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let w = ratio / (1.0 - ratio * s);
            if w.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm() / (1.0 + z[i].norm()));
            }
        }
        if moved < 1e-16 {
            break;
        }
    }
    z
}

fn cluster_radius(k: usize) -> f64 {
    tol::ROOT_CLUSTER.max(10.0 * f64::EPSILON.powf(1.0 / k as f64))
}

/// Groups roots into multiple-root clusters: `k` roots of a `k`-fold root
/// scatter by about `eps^(1/k)`, so single-linkage components at that radius
/// are taken from the largest `k` down.
fn cluster(roots: &[Complex64]) -> Vec<(Complex64, usize)> {
    let mut pool: Vec<Complex64> = roots.to_vec();
    let mut out = vec![];
    for k in (2..=roots.len()).rev() {
        let mut comp = vec![usize::MAX; pool.len()];
        let mut next = 0;
        for s in 0..pool.len() {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = next;
            let mut stack = vec![s];
            while let Some(i) = stack.pop() {
                for j in 0..pool.len() {
                    let rad = cluster_radius(k) * (1.0 + pool[i].norm().max(pool[j].norm()));
                    if comp[j] == usize::MAX && (pool[i] - pool[j]).norm() <= rad {
                        comp[j] = next;
                        stack.push(j);
                    }
                }
            }
            next += 1;
        }
        let mut keep = vec![true; pool.len()];
        for c in 0..next {
            let members: Vec<usize> = (0..pool.len()).filter(|&i| comp[i] == c).collect();
            if members.len() >= k {
                let sum: Complex64 = members.iter().map(|&i| pool[i]).sum();
                out.push((sum / members.len() as f64, members.len()));
                members.iter().for_each(|&i| keep[i] = false);
            }
        }
        pool = pool.into_iter().zip(keep).filter(|(_, k)| *k).map(|(z, _)| z).collect();
    }
    out.extend(pool.into_iter().map(|z| (z, 1)));
    out
}

/// Newton on `p^(k-1)`, where a `k`-fold root of `p` is simple.
fn polish_multiple(p: &RealPoly, z: Complex64, k: usize, real: bool) -> Complex64 {
    let mut d = p.clone();
    for _ in 1..k {
        d = d.derivative();
    }
    let dd = d.derivative();
    let mut z = if real { Complex64::new(z.re, 0.0) } else { z };
    for _ in 0..8 {
        let (v, dv) = (d.eval_complex(z), dd.eval_complex(z));
        if dv.norm() == 0.0 || v.norm() == 0.0 {
            break;
        }
        let w = z - v / dv;
        let w = if real { Complex64::new(w.re, 0.0) } else { w };
        if d.eval_complex(w).norm() < v.norm() {
            z = w;
        } else {
            break;
        }
    }
    z
}

/// Sphere roots of a real polynomial: `(x, y, multiplicity)` with `y >= 0`.
pub fn sphere_roots(s: &RealPoly) -> Vec<(f64, f64, usize)> {
    let mut out = vec![];
    for (c, k) in cluster(&complex_roots(s)) {
        let real = c.im.abs() <= cluster_radius(k) * (1.0 + c.norm());
        if !real && c.im < 0.0 {
            continue;
        }
        let z = polish_multiple(s, c, k, real);
        out.push((z.re, if real { 0.0 } else { z.im.abs() }, k));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    out
}

// ---------------------------------------------------------------------------
// Normal form on one sphere

/// `f = [(q-x)^2+y^2]^m (q-p_1)*...*(q-p_n)*rest` on one sphere.
#[derive(Clone, Debug)]
pub struct SphereForm<T: Scalar> {
    pub m: usize,
    pub chain: Vec<Quaternion<T>>,
    pub rest: QPoly<T>,
    /// Smallest spherical derivative norm seen when deciding a cap zero.
    pub first_deriv: f64,
}

/// Peels spherical factors first, then linear ones, spending `budget`
/// (the multiplicity of the sphere in `f^s`): two per sphere, one per point.
pub fn sphere_normal_form<T: Scalar>(
    f: &QPoly<T>,
    x: &T,
    y2: &T,
    budget: usize,
    small: &dyn Fn(&Quaternion<T>) -> bool,
    fix: &dyn Fn(Quaternion<T>) -> Quaternion<T>,
) -> SphereForm<T> {
    let sphere = RealPoly::sphere(x.clone(), y2.clone());
    let mut h = f.clone();
    let mut left = budget;
    let mut m = 0;
    let mut chain = vec![];
    let mut first_deriv = f64::INFINITY;
    while left >= 2 {
        let (a, b) = h.spherical_at(x, y2);
        if m == 0 {
            first_deriv = b.to_f64().norm();
        }
        if !(small(&a) && small(&b)) {
            break;
        }
        h = h.div_rem_real(&sphere).expect("monic").0;
        m += 1;
        left -= 2;
    }
    while left >= 1 {
        let (a, b) = h.spherical_at(x, y2);
        if m == 0 && chain.is_empty() {
            first_deriv = b.to_f64().norm();
        }
        let Some(bi) = b.try_inv() else { break };
        let p = fix(Quaternion::from_real(x.clone()) + (-(a * bi)).im());
        h = h.left_div_linear(&p).0;
        chain.push(p);
        left -= 1;
    }
    SphereForm { m, chain, rest: h, first_deriv }
}

/// How many times `q - p` divides `f` on the left.
pub fn classical_count<T: Scalar>(f: &QPoly<T>, p: &Quaternion<T>, small: &dyn Fn(&Quaternion<T>) -> bool) -> usize {
    let mut h = f.clone();
    let mut n = 0;
    while h.degree().map_or(false, |d| d >= 1) {
        let (g, r) = h.left_div_linear(p);
        if !small(&r) {
            break;
        }
        h = g;
        n += 1;
    }
    n
}

/// Size of `f` near radius `r`: `sum |a_k| r^k`, at least the largest coefficient.
fn value_scale(f: &QPoly, r: f64) -> f64 {
    let r = r.max(1.0);
    f.coeffs().iter().enumerate().map(|(k, c)| c.norm() * r.powi(k as i32)).sum::<f64>().max(1e-300)
}

fn unit_of(p: &Quaternion) -> ImaginaryUnit {
    slice_decompose(p).unit_or(ImaginaryUnit::I)
}

fn poly_cap(p: &Quaternion) -> CapRef {
    let c = slice_decompose(p);
    match c.unit {
        None => CapRef::RealAxis,
        Some(u) => CapRef::Cap { cap: CapId { x: c.x, y: c.y, index: 0, representative: u } },
    }
}

fn fix_radius(y: f64) -> impl Fn(Quaternion) -> Quaternion {
    move |p: Quaternion| {
        let n = p.im_norm();
        if n == 0.0 {
            p
        } else {
            Quaternion::real(p.w) + p.im() * (y / n)
        }
    }
}

/// Zeros of a quaternionic polynomial on H.
pub fn poly_zeros(f: &QPoly) -> Result<ZeroReport> {
    let f = f.trimmed(0.0);
    if f.is_zero() {
        return Err(SliceError::ZeroPolynomial);
    }
    let mut rep = ZeroReport::default();
    for (x, y, k) in sphere_roots(&f.sym()) {
        let scale = value_scale(&f, (x * x + y * y).sqrt());
        let thresh = tol::CAP_ZERO * scale;
        let loose = 1e-6 * scale;
        if y == 0.0 {
            let p = Quaternion::real(x);
            let n = (k + 1) / 2;
            let classical = classical_count(&f, &p, &|r| r.norm() <= loose).max(1).min(n);
            rep.isolated.push(IsolatedZero {
                point: p,
                cap: CapRef::RealAxis,
                classical,
                isolated: n,
                chain: vec![p; n],
                provenance: Provenance::Polished,
                marginal: false,
            });
            continue;
        }
        let nf = sphere_normal_form(&f, &x, &(y * y), k, &|q| q.norm() <= thresh, &fix_radius(y));
        let marginal = nf.first_deriv > thresh / tol::MARGINAL_FACTOR && nf.first_deriv <= thresh * tol::MARGINAL_FACTOR;
        if nf.m > 0 {
            rep.spherical.push(SphericalZero {
                x,
                y,
                cap: CapRef::WholeSphere,
                multiplicity: 2 * nf.m,
                chain: nf.chain,
                provenance: Provenance::Polished,
                marginal,
            });
        } else if let Some(&p) = nf.chain.first() {
            rep.isolated.push(IsolatedZero {
                point: p,
                cap: poly_cap(&p),
                classical: classical_count(&f, &p, &|r| r.norm() <= loose).max(1),
                isolated: nf.chain.len(),
                chain: nf.chain,
                provenance: Provenance::Polished,
                marginal,
            });
        }
    }
    Ok(rep)
}

/// Continued-fraction rational within `tol` of `v`.
pub fn rationalize(v: f64, tol: f64) -> BigRational {
    use num_bigint::BigInt;
    let (mut h0, mut h1) = (BigInt::from(0), BigInt::from(1));
    let (mut k0, mut k1) = (BigInt::from(1), BigInt::from(0));
    let mut r = v;
    for _ in 0..40 {
        let a = r.floor();
        let ai = BigInt::from(a as i64);
        let h2 = &ai * &h1 + &h0;
        let k2 = &ai * &k1 + &k0;
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
        let q = BigRational::new(h1.clone(), k1.clone());
        if (Scalar::to_f64(&q) - v).abs() <= tol {
            return q;
        }
        let frac = r - a;
        if frac == 0.0 {
            break;
        }
        r = 1.0 / frac;
    }
    BigRational::new(h1, k1)
}

/// One sphere (or real point) of an exact zero report.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactSphere {
    pub x: BigRational,
    pub y2: BigRational,
    /// Multiplicity of the sphere (or of `q - x`) in `f^s`.
    pub sym_multiplicity: usize,
    pub m: usize,
    pub chain: Vec<Quaternion<BigRational>>,
    pub classical: usize,
}

fn exact_multiplicity(s: &RealPoly<BigRational>, d: &RealPoly<BigRational>) -> usize {
    let mut h = s.clone();
    let mut k = 0;
    loop {
        let (q, r) = h.div_rem(d).expect("nonzero");
        if !r.is_zero() || h.is_zero() {
            return k;
        }
        h = q;
        k += 1;
    }
}

/// Exact zeros of a rational-coefficient polynomial. Spheres whose
/// `(x, y^2)` are rational are resolved exactly; the rest fall back to the
/// floating-point report.
pub fn poly_zeros_exact(f: &QPoly<BigRational>) -> Result<(ZeroReport, Vec<ExactSphere>)> {
    if f.is_zero() {
        return Err(SliceError::ZeroPolynomial);
    }
    let s = f.sym();
    let g = s.gcd(&s.derivative());
    let sq = s.div_rem(&g)?.0;
    let mut rep = ZeroReport::default();
    let mut exact = vec![];
    let fallback = poly_zeros(&f.to_f64())?;
    let is0 = |q: &Quaternion<BigRational>| q.is_zero();
    for (x, y, _) in sphere_roots(&sq.to_f64()) {
        let xr = rationalize(x, 1e-9 * (1.0 + x.abs()));
        let y2r = if y == 0.0 { BigRational::zero() } else { rationalize(y * y, 1e-9 * (1.0 + y * y)) };
        let one = BigRational::from_i64(1);
        let div = if y == 0.0 {
            RealPoly::new(vec![-xr.clone(), one])
        } else {
            RealPoly::sphere(xr.clone(), y2r.clone())
        };
        let k = exact_multiplicity(&s, &div);
        if k == 0 || (y != 0.0 && !y2r.is_positive()) {
            // Irrational sphere: keep the floating-point entries near it.
            let near = |p: &Quaternion| {
                let c = slice_decompose(p);
                (c.x - x).abs() + (c.y - y).abs() < 1e-6 * (1.0 + x.abs() + y)
            };
            rep.isolated.extend(fallback.isolated.iter().filter(|z| near(&z.point)).cloned());
            rep.spherical.extend(
                fallback.spherical.iter().filter(|z| near(&at(z.x, z.y, &ImaginaryUnit::I))).cloned(),
            );
            continue;
        }
        if y == 0.0 {
            let p = Quaternion::from_real(xr.clone());
            let n = classical_count(f, &p, &is0);
            let pf = p.to_f64();
            rep.isolated.push(IsolatedZero {
                point: pf,
                cap: CapRef::RealAxis,
                classical: n,
                isolated: n,
                chain: vec![pf; n],
                provenance: Provenance::Exact,
                marginal: false,
            });
            exact.push(ExactSphere { x: xr, y2: y2r, sym_multiplicity: k, m: 0, chain: vec![p; n], classical: n });
            continue;
        }
        let nf = sphere_normal_form(f, &xr, &y2r, k, &is0, &|p| p);
        let classical = nf.chain.first().map_or(0, |p| classical_count(f, p, &is0));
        let chain_f: Vec<Quaternion> = nf.chain.iter().map(|p| p.to_f64()).collect();
        let yf = Scalar::to_f64(&y2r).sqrt();
        if nf.m > 0 {
            rep.spherical.push(SphericalZero {
                x: Scalar::to_f64(&xr),
                y: yf,
                cap: CapRef::WholeSphere,
                multiplicity: 2 * nf.m,
                chain: chain_f,
                provenance: Provenance::Exact,
                marginal: false,
            });
        } else if let Some(&p) = chain_f.first() {
            rep.isolated.push(IsolatedZero {
                point: p,
                cap: poly_cap(&p),
                classical,
                isolated: chain_f.len(),
                chain: chain_f,
                provenance: Provenance::Exact,
                marginal: false,
            });
        }
        exact.push(ExactSphere { x: xr, y2: y2r, sym_multiplicity: k, m: nf.m, chain: nf.chain, classical });
    }
    Ok((rep, exact))
}

// ---------------------------------------------------------------------------
// Cap-relative tools for general slice functions

fn cap_units(dom: &DomainSpec, cap: &CapId, n: usize) -> Result<Vec<ImaginaryUnit>> {
    let caps = SphereCaps::compute(dom, cap.x, cap.y, PROBE_STEP_DEG);
    let idx = caps.cap_of(&cap.representative).ok_or_else(|| SliceError::NoCapInfo(cap.point().to_string()))?;
    let mut u = caps.sample(idx, n);
    if !u.contains(&cap.representative) {
        u.push(cap.representative);
    }
    Ok(u)
}

fn check_on_sphere(p: &Quaternion, cap: &CapId) -> Result<()> {
    if same_sphere(p, &cap.point(), 1e-9 * (1.0 + p.norm())) {
        Ok(())
    } else {
        Err(SliceError::CapMismatch)
    }
}

/// Whether `q - pt` divides `f` near the cap: `f°_s = -im(pt) f'_s` at probes.
pub fn divides_near(f: &SliceFunction, pt: &Quaternion, cap: &CapId) -> Result<bool> {
    check_on_sphere(pt, cap)?;
    for u in cap_units(f.domain(), cap, tol::DIVIDES_PROBES + 4)? {
        let s = f.sph(&at(cap.x, cap.y, &u))?;
        let scale = s.value.norm().max(cap.y * s.deriv.norm());
        let r = (s.value + pt.im() * s.deriv).norm();
        if r > tol::DIVIDES_NEAR * scale + 1e-14 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether `f` vanishes on the whole cap (probe check).
pub fn vanishes_on_cap(f: &SliceFunction, cap: &CapId) -> Result<bool> {
    let mut vals = vec![];
    for u in cap_units(f.domain(), cap, tol::DIVIDES_PROBES + 4)? {
        vals.push(f.sph(&at(cap.x, cap.y, &u))?);
    }
    let scale = vals.iter().map(|s| s.value.norm() + cap.y * s.deriv.norm()).fold(0.0, f64::max);
    let _ = scale;
    Ok(vals.iter().all(|s| s.value.norm() <= tol::CAP_ZERO && cap.y * s.deriv.norm() <= tol::CAP_ZERO))
}

/// A function given by a formula off one sphere and filled on the sphere by
/// the mean over a small slice circle (the singularity there is removable).
struct Filled {
    inner: SliceFunction,
    x0: f64,
    y0: f64,
    r: f64,
    dom: DomainSpec,
    name: String,
}

impl Filled {
    fn fill(&self, q: &Quaternion) -> Result<Quaternion> {
        let c = slice_decompose(q);
        let u = c.unit_or(ImaginaryUnit::I);
        let z = Complex64::new(c.x, c.y);
        let n = 64;
        let mut r = self.r;
        loop {
            let pts: Vec<Quaternion> = (0..n)
                .map(|k| {
                    let w = z + Complex64::from_polar(r, 2.0 * std::f64::consts::PI * k as f64 / n as f64);
                    u.embed(w)
                })
                .collect();
            if pts.iter().all(|p| self.inner.domain().contains(p)) {
                let mut acc = Quaternion::ZERO;
                for p in &pts {
                    acc += self.inner.eval(p)?;
                }
                return Ok(acc / n as f64);
            }
            r *= 0.5;
            if r < 1e-6 {
                return Err(SliceError::OnBoundary(q.to_string()));
            }
        }
    }
}

impl SliceFn for Filled {
    fn domain(&self) -> &DomainSpec {
        &self.dom
    }
    fn backing(&self) -> Backing {
        Backing::Composite
    }
    fn eval(&self, q: &Quaternion) -> Result<Quaternion> {
        let c = slice_decompose(q);
        if (c.x - self.x0).hypot(c.y - self.y0) < 0.5 * self.r {
            self.fill(q)
        } else {
            self.inner.eval(q)
        }
    }
    fn sph(&self, q: &Quaternion) -> Result<Sph> {
        local_two_point(&|p| self.eval(p), &self.dom, q)
    }
    fn label(&self) -> String {
        self.name.clone()
    }
}

/// `f`'s domain with the sphere `x0 + y0 S` kept only on the given cap.
fn keep_cap(dom: &DomainSpec, cap: &CapId, r: f64) -> DomainSpec {
    let caps = SphereCaps::compute(dom, cap.x, cap.y, PROBE_STEP_DEG);
    let idx = caps.cap_of(&cap.representative);
    let (x0, y0) = (cap.x, cap.y);
    DomainSpec::new(Restricted {
        base: dom.clone(),
        keep: move |q: &Quaternion| {
            let c = slice_decompose(q);
            if (c.x - x0).hypot(c.y - y0) >= 0.5 * r {
                return true;
            }
            match c.unit {
                Some(u) if y0 > 0.0 => idx.is_some() && caps.cap_of(&u) == idx,
                _ => true,
            }
        },
        name: format!("cap {} of {} + {} S", cap.index, x0, y0),
    })
}

fn fill_radius(y0: f64) -> f64 {
    if y0 > 0.0 {
        (0.25 * y0).min(0.05)
    } else {
        0.05
    }
}

/// `g` with `f = (q - p) * g` near the cap.
pub fn factor_out_point(f: &SliceFunction, p: &Quaternion, cap: &CapId) -> Result<SliceFunction> {
    let c = slice_decompose(p);
    if let Some(r) = f.as_rational() {
        let (g, rem) = r.num.left_div_linear(p);
        let scale = value_scale(&r.num, p.norm());
        if rem.norm() > tol::DIVIDES_NEAR * scale {
            return Err(SliceError::NotADivisor);
        }
        let out = crate::poly::QRational::new(g, r.den)?;
        return Ok(if out.den.degree() == Some(0) {
            SliceFunction::poly(QPoly::new(out.num.coeffs().iter().map(|a| *a / out.den.coeffs()[0]).collect()))
        } else {
            SliceFunction::rational(out)
        });
    }
    let ok = if c.unit.is_none() {
        let v = f.eval(p)?;
        v.norm() <= tol::CAP_ZERO
    } else {
        divides_near(f, p, cap)?
    };
    if !ok {
        return Err(SliceError::NotADivisor);
    }
    let inner = algebra::quotient(&SliceFunction::poly(QPoly::linear(p)), f)?;
    let r = fill_radius(c.y);
    let dom = if c.unit.is_none() { f.domain().clone() } else { keep_cap(f.domain(), cap, r) };
    Ok(SliceFunction::new(Filled { inner, x0: c.x, y0: c.y, r, dom, name: format!("(q - {p})^-* * {}", f.label()) }))
}

/// `h` with `f = [(q - x0)^2 + y0^2] h` near the cap.
pub fn factor_out_sphere(f: &SliceFunction, x0: f64, y0: f64, cap: &CapId) -> Result<SliceFunction> {
    if (cap.x - x0).abs() > 1e-12 * (1.0 + x0.abs()) || (cap.y - y0).abs() > 1e-12 * (1.0 + y0) {
        return Err(SliceError::CapMismatch);
    }
    let sphere = RealPoly::sphere(x0, y0 * y0);
    if let Some(r) = f.as_rational() {
        let (g, rem) = r.num.div_rem_real(&sphere)?;
        let scale = value_scale(&r.num, (x0 * x0 + y0 * y0).sqrt());
        if rem.coeffs().iter().any(|a| a.norm() > tol::CAP_ZERO * scale) {
            return Err(SliceError::NotVanishingOnCap);
        }
        let out = crate::poly::QRational::new(g, r.den)?;
        return Ok(if out.den.degree() == Some(0) {
            SliceFunction::poly(QPoly::new(out.num.coeffs().iter().map(|a| *a / out.den.coeffs()[0]).collect()))
        } else {
            SliceFunction::rational(out)
        });
    }
    if !vanishes_on_cap(f, cap)? {
        return Err(SliceError::NotVanishingOnCap);
    }
    let g = f.clone();
    let inner = SliceFunction::sampled(f.domain().clone(), "sphere quotient", move |q| {
        Ok(sphere.eval_quat(q).inv()? * g.eval(q)?)
    });
    let r = fill_radius(y0);
    let dom = keep_cap(f.domain(), cap, r);
    Ok(SliceFunction::new(Filled {
        inner,
        x0,
        y0,
        r,
        dom,
        name: format!("[(q - {x0})^2 + {}]^-1 {}", y0 * y0, f.label()),
    }))
}

/// The point `x + im` on the cap's sphere solving `f°_s = -im f'_s`.
fn dividing_point(s: &Sph, x: f64, y: f64) -> Option<Quaternion> {
    let bi = s.deriv.try_inv()?;
    let im = (-(s.value * bi)).im();
    let n = im.norm();
    if n == 0.0 {
        return None;
    }
    Some(Quaternion::real(x) + im * (y / n))
}

/// Classical, spherical and isolated multiplicities of `f` at `p` relative to the cap.
pub fn multiplicities(f: &SliceFunction, p: &Quaternion, cap: &CapId) -> Result<Multiplicities> {
    let c = slice_decompose(p);
    if let Some(poly) = f.as_poly() {
        if poly.is_zero() {
            return Err(SliceError::IdenticallyZero);
        }
        let scale = value_scale(&poly, p.norm());
        let loose = 1e-6 * scale;
        let roots = sphere_roots(&poly.sym());
        let k = roots
            .iter()
            .find(|(x, y, _)| (x - c.x).abs() + (y - c.y).abs() <= 1e-6 * (1.0 + p.norm()))
            .map_or(0, |r| r.2);
        let classical = classical_count(&poly, p, &|r| r.norm() <= loose);
        if c.unit.is_none() {
            let n = (k + 1) / 2;
            return Ok(Multiplicities { classical, spherical: 0, isolated: n, chain: vec![*p; n] });
        }
        let thresh = tol::CAP_ZERO * scale;
        let nf = sphere_normal_form(&poly, &c.x, &(c.y * c.y), k, &|q| q.norm() <= thresh, &fix_radius(c.y));
        return Ok(Multiplicities { classical, spherical: 2 * nf.m, isolated: nf.chain.len(), chain: nf.chain });
    }
    check_on_sphere(p, cap)?;
    const DEPTH: usize = 3;
    let mut h = f.clone();
    let mut m = 0;
    while vanishes_on_cap(&h, cap)? {
        if m == DEPTH {
            return Err(SliceError::IdenticallyZero);
        }
        h = factor_out_sphere(&h, cap.x, cap.y, cap)?;
        m += 1;
    }
    let mut chain = vec![];
    let mut g = h.clone();
    while chain.len() < DEPTH {
        let s = algebra::sym_data(&g, &cap.point())?;
        if s.value.norm() + cap.y * s.deriv.norm() > tol::CAP_ZERO {
            break;
        }
        let gs = g.sph(&cap.point())?;
        let Some(pt) = dividing_point(&gs, cap.x, cap.y) else { break };
        g = factor_out_point(&g, &pt, cap)?;
        chain.push(pt);
    }
    let mut classical = 0;
    let mut g = f.clone();
    while classical < DEPTH && divides_near(&g, p, cap)? {
        g = factor_out_point(&g, p, cap)?;
        classical += 1;
    }
    Ok(Multiplicities { classical, spherical: 2 * m, isolated: chain.len(), chain })
}

// ---------------------------------------------------------------------------
// Numeric scan

/// `f^s` on the slice `L_J` as a complex function.
fn sym_on_slice(f: &SliceFunction, u: &ImaginaryUnit, z: Complex64) -> Option<Complex64> {
    let q = u.embed(z);
    if !f.domain().contains(&q) {
        return None;
    }
    let s = algebra::sym_data(f, &q).ok()?.at(&q);
    Some(u.project(&s))
}

fn newton_slice(f: &SliceFunction, u: &ImaginaryUnit, mut z: Complex64) -> Option<(Complex64, f64)> {
    let mut v = sym_on_slice(f, u, z)?;
    for _ in 0..40 {
        let h = 1e-6 * (1.0 + z.norm());
        let d = (sym_on_slice(f, u, z + h)? - sym_on_slice(f, u, z - h)?) / (2.0 * h);
        if d.norm() == 0.0 {
            break;
        }
        let mut step = v / d;
        let mut accepted = false;
        for _ in 0..20 {
            let w = z - step;
            if let Some(vw) = sym_on_slice(f, u, w) {
                if vw.norm() < v.norm() {
                    z = w;
                    v = vw;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted || step.norm() < 1e-15 * (1.0 + z.norm()) {
            break;
        }
    }
    Some((z, v.norm()))
}

/// Lattice scan of `|f^s|` on slices through a coarse set of units, Newton
/// polish, and classification of each sphere hit by cap.
pub fn zero_scan(f: &SliceFunction, resolution: usize) -> ZeroReport {
    let (xmin, xmax, ymax) = f.domain().slice_box();
    let n = resolution.max(8);
    let units: Vec<ImaginaryUnit> = crate::domains::sphere_grid(1);
    let hits: Vec<(f64, f64, ImaginaryUnit)> = units
        .par_iter()
        .flat_map_iter(|u| {
            let mut vals = vec![vec![f64::INFINITY; n + 1]; n + 1];
            for a in 0..=n {
                for b in 0..=n {
                    let z = Complex64::new(xmin + (xmax - xmin) * a as f64 / n as f64, ymax * b as f64 / n as f64);
                    if let Some(v) = sym_on_slice(f, u, z) {
                        vals[a][b] = v.norm();
                    }
                }
            }
            let mut out = vec![];
            for a in 0..=n {
                for b in 0..=n {
                    let v = vals[a][b];
                    if !v.is_finite() {
                        continue;
                    }
                    let mut min = true;
                    for da in -1i64..=1 {
                        for db in -1i64..=1 {
                            let (aa, bb) = (a as i64 + da, b as i64 + db);
                            if (da, db) == (0, 0) || aa < 0 || bb < 0 || aa > n as i64 || bb > n as i64 {
                                continue;
                            }
                            if vals[aa as usize][bb as usize] < v {
                                min = false;
                            }
                        }
                    }
                    if !min {
                        continue;
                    }
                    let z0 = Complex64::new(xmin + (xmax - xmin) * a as f64 / n as f64, ymax * b as f64 / n as f64);
                    if let Some((z, r)) = newton_slice(f, u, z0) {
                        let q = u.embed(z);
                        let scale = f.eval(&q).map(|v| v.norm_sqr()).unwrap_or(0.0).max(1.0);
                        if r <= 1e-9 * scale {
                            out.push((z.re, z.im, *u));
                        }
                    }
                }
            }
            out
        })
        .collect();

    let mut rep = ZeroReport::default();
    let mut seen: Vec<(f64, f64, usize)> = vec![];
    for (x, y, u) in hits {
        let (y, u) = if y < 0.0 { (-y, u.neg()) } else { (y, u) };
        if y <= 1e-7 * (1.0 + x.abs()) {
            let p = Quaternion::real(x);
            if rep.isolated.iter().any(|z| z.point.dist(&p) < 1e-6) {
                continue;
            }
            rep.isolated.push(IsolatedZero {
                point: p,
                cap: CapRef::RealAxis,
                classical: 1,
                isolated: 1,
                chain: vec![p],
                provenance: Provenance::Scanned,
                marginal: false,
            });
            continue;
        }
        let caps = SphereCaps::compute(f.domain(), x, y, PROBE_STEP_DEG);
        let Some(idx) = caps.cap_of(&u) else { continue };
        if seen.iter().any(|&(a, b, i)| (a - x).abs() + (b - y).abs() < 1e-6 && i == idx) {
            continue;
        }
        seen.push((x, y, idx));
        let cap = caps.cap_id(idx, u);
        let Ok(s) = f.sph(&cap.point()) else { continue };
        let scale = s.value.norm().max(y * s.deriv.norm()).max(1e-300);
        let thresh = tol::CAP_ZERO * scale.max(1.0);
        if y * s.deriv.norm() <= thresh && s.value.norm() <= thresh {
            rep.spherical.push(SphericalZero {
                x,
                y,
                cap: CapRef::Cap { cap },
                multiplicity: 2,
                chain: vec![],
                provenance: Provenance::Scanned,
                marginal: false,
            });
            continue;
        }
        let Some(p) = dividing_point(&s, x, y) else { continue };
        let on_cap = f.domain().contains(&p) && caps.cap_of(&unit_of(&p)) == Some(idx);
        let marginal = {
            let d = y * s.deriv.norm();
            d > thresh / tol::MARGINAL_FACTOR && d <= thresh * tol::MARGINAL_FACTOR
        };
        if on_cap {
            rep.isolated.push(IsolatedZero {
                point: p,
                cap: CapRef::Cap { cap: caps.cap_id(idx, unit_of(&p)) },
                classical: 1,
                isolated: 1,
                chain: vec![p],
                provenance: Provenance::Scanned,
                marginal,
            });
        } else {
            rep.ghosts.push(GhostDivisor { point: p, cap: CapRef::Cap { cap } });
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    type Q = Quaternion;

    #[test]
    fn famous_example_has_one_zero() {
        let f = QPoly::linear(&Q::I).star(&QPoly::linear(&Q::J));
        let rep = poly_zeros(&f).unwrap();
        assert_eq!(rep.isolated.len(), 1);
        assert!(rep.spherical.is_empty());
        let z = &rep.isolated[0];
        assert!(z.point.approx_eq(&Q::I, 1e-12));
        assert!(f.eval(&z.point).norm() <= 1e-12);
        assert!(f.eval(&Q::J).approx_eq(&(Q::K * 2.0), 1e-15));
    }

    #[test]
    fn sphere_and_real_zeros() {
        let f = QPoly::new(vec![Q::ONE, Q::ZERO, Q::ONE]);
        let rep = poly_zeros(&f).unwrap();
        assert_eq!(rep.spherical.len(), 1);
        assert_eq!(rep.spherical[0].multiplicity, 2);
        assert!((rep.spherical[0].y - 1.0).abs() < 1e-12);

        let g = QPoly::linear_power(&Q::ONE, 2);
        let rep = poly_zeros(&g).unwrap();
        assert_eq!(rep.isolated.len(), 1);
        assert_eq!(rep.isolated[0].classical, 2);
        assert!((rep.isolated[0].point.w - 1.0).abs() < 1e-10);
    }

    #[test]
    fn multiplicity_examples() {
        let f = SliceFunction::poly(QPoly::linear_power(&Q::ONE, 3));
        let cap = crate::domains::cap_component(&DomainSpec::whole(), &Q::ONE, 5.0).unwrap();
        let m = multiplicities(&f, &Q::ONE, &cap).unwrap();
        assert_eq!((m.classical, m.spherical, m.isolated), (3, 0, 3));

        let s = QPoly::new(vec![Q::ONE, Q::ZERO, Q::ONE]);
        let g = s.star(&s).star(&QPoly::linear(&Q::I));
        let cap = crate::domains::cap_component(&DomainSpec::whole(), &Q::I, 5.0).unwrap();
        let m = multiplicities(&SliceFunction::poly(g), &Q::I, &cap).unwrap();
        assert_eq!((m.classical, m.spherical, m.isolated), (3, 4, 1));
    }

    #[test]
    fn exact_normal_form() {
        type R = BigRational;
        let r = |a: i64, b: i64| R::new(a.into(), b.into());
        let p1 = Quaternion::<R>::new(r(1, 2), r(1, 1), r(-2, 3), r(0, 1));
        // p2 on the same sphere, not conjugate to p1.
        let p2 = Quaternion::<R>::new(r(1, 2), r(0, 1), r(2, 3), r(1, 1));
        let sphere = RealPoly::sphere(r(1, 2), p1.im().norm_sqr());
        let f = QPoly::from_real(&sphere).star(&QPoly::linear(&p1)).star(&QPoly::linear(&p2));
        let f = f.star(&QPoly::new(vec![Quaternion::new(r(3, 1), r(0, 1), r(1, 1), r(0, 1)), Quaternion::one()]));
        let (_, ex) = poly_zeros_exact(&f).unwrap();
        let s = ex.iter().find(|e| e.x == r(1, 2)).unwrap();
        assert_eq!(s.m, 1);
        assert_eq!(s.chain, vec![p1, p2]);
    }

    #[test]
    fn factor_out_point_divides() {
        let f = QPoly::linear(&Q::I).star(&QPoly::linear(&Q::J));
        let cap = crate::domains::cap_component(&DomainSpec::whole(), &Q::I, 5.0).unwrap();
        let g = factor_out_point(&SliceFunction::poly(f), &Q::I, &cap).unwrap();
        assert!(g.as_poly().unwrap().sub(&QPoly::linear(&Q::J)).scale_norm() < 1e-14);
    }

    #[test]
    fn sampled_factor_out_sphere_fills() {
        let f = QPoly::new(vec![-Q::ONE, Q::ONE, -Q::ONE, Q::ONE]); // (q^2+1)(q-1)
        let ff = f.clone();
        let fs = SliceFunction::sampled(DomainSpec::whole(), "f", move |q| Ok(ff.eval(q)));
        let cap = crate::domains::cap_component(&DomainSpec::whole(), &Q::J, 5.0).unwrap();
        let h = factor_out_sphere(&fs, 0.0, 1.0, &cap).unwrap();
        for q in [Q::J, Q::new(0.01, 0.0, 1.0, 0.0), Q::new(2.0, 0.5, 0.0, 0.0)] {
            assert!(h.eval(&q).unwrap().approx_eq(&(q - 1.0), 1e-10));
        }
        assert!(divides_near(&fs, &Q::J, &cap).unwrap());
        let g = factor_out_point(&fs, &Q::J, &cap).unwrap();
        let q = Q::new(0.3, 0.2, 0.1, -0.5);
        let want = QPoly::linear(&-Q::J).star(&QPoly::linear(&Q::ONE)).eval(&q);
        assert!(g.eval(&q).unwrap().approx_eq(&want, 1e-10));
    }

    #[test]
    fn scan_finds_polynomial_zeros() {
        let f = QPoly::linear(&Q::I).star(&QPoly::linear(&Q::J));
        let rep = zero_scan(&SliceFunction::poly_on(f, DomainSpec::ball(Q::ZERO, 3.0)), 24);
        assert_eq!(rep.isolated.len(), 1, "{rep:?}");
        assert!(rep.isolated[0].point.approx_eq(&Q::I, 1e-8));
    }
}
