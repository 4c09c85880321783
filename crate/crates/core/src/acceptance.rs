//! The acceptance battery: one check per criterion, each returning a
//! pass/fail line with the measured figure.

use std::f64::consts::PI;
use std::time::Instant;

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra;
use crate::domains::SphereCaps;
use crate::douren::{self, DourenConfig, Fixtures};
use crate::error::Result;
use crate::integral::{local_cauchy, slicewise_cauchy, Contour, SymmetricSet};
use crate::poly::{QPoly, QRational, RealPoly};
use crate::quaternion::{at, ImaginaryUnit, Quaternion, Scalar};
use crate::series::{classify_singularity, eval_spherical, laurent_coeffs, spherical_coeffs, SingularityKind};
use crate::slicefn::{differential, is_differential_singular, spherical_data_with, two_unit_formula, SliceFunction, Sph};
use crate::zeros::{divides_near, poly_zeros, poly_zeros_exact};

type Q = Quaternion;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

pub const NAMES: [&str; 12] = [
    "representation formula independence",
    "reciprocal identity",
    "famous zero collapse",
    "cauchy reproduction",
    "douren cap data",
    "non-extendability jump",
    "ghost zeros",
    "zero divisor",
    "series round trips",
    "multiplicity normal form",
    "singularity classification",
    "min modulus and open mapping",
];

pub fn run_all(seed: u64) -> Vec<CriterionResult> {
    (1..=12).map(|id| run(id, seed)).collect()
}

/// Runs criterion `id` (1-based); errors count as failures.
pub fn run(id: u8, seed: u64) -> CriterionResult {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(id as u64));
    let out = match id {
        1 => c1_representation(&mut rng),
        2 => c2_reciprocal(&mut rng),
        3 => c3_famous(&mut rng),
        4 => c4_cauchy(&mut rng),
        5 => c5_caps(),
        6 => c6_jump(),
        7 => c7_ghosts(),
        8 => c8_zero_divisor(&mut rng),
        9 => c9_series(&mut rng),
        10 => c10_normal_form(&mut rng),
        11 => c11_singular(),
        12 => c12_modulus(&mut rng),
        _ => Ok((false, "unknown criterion".into())),
    };
    let (passed, detail) = out.unwrap_or_else(|e| (false, format!("error: {e}")));
    CriterionResult {
        id,
        name: NAMES.get(id as usize - 1).unwrap_or(&"?").to_string(),
        passed,
        detail,
        seconds: t0.elapsed().as_secs_f64(),
    }
}

pub fn format_line(r: &CriterionResult) -> String {
    format!(
        "[{}] {:>2} {} ({:.1}s): {}",
        if r.passed { "PASS" } else { "FAIL" },
        r.id,
        r.name,
        r.seconds,
        r.detail
    )
}

fn rand_quat(rng: &mut ChaCha8Rng) -> Q {
    Q::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn rand_unit(rng: &mut ChaCha8Rng) -> ImaginaryUnit {
    loop {
        let v = Q::new(0.0, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return ImaginaryUnit::from_vector(v.x, v.y, v.z).unwrap();
        }
    }
}

fn rand_poly(rng: &mut ChaCha8Rng, deg: usize) -> QPoly {
    let mut c: Vec<Q> = (0..=deg).map(|_| rand_quat(rng)).collect();
    if c[deg].norm() < 0.3 {
        c[deg] = Q::ONE;
    }
    QPoly::new(c)
}

fn rand_in_ball(rng: &mut ChaCha8Rng, c: &Q, r: f64) -> Q {
    loop {
        let v = rand_quat(rng);
        if v.norm() < 1.0 {
            return *c + v * r;
        }
    }
}

fn c1_representation(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let deg = rng.gen_range(0..=8);
        let f = SliceFunction::poly(rand_poly(rng, deg));
        for _ in 0..20 {
            let (x, y) = (rng.gen_range(-1.5..1.5), rng.gen_range(0.1..1.5));
            let mut data: Vec<Sph> = vec![];
            while data.len() < 5 {
                let (j, k) = (rand_unit(rng), rand_unit(rng));
                if j.dist(&k) < 0.2 {
                    continue;
                }
                let s = two_unit_formula(f.eval(&at(x, y, &j))?, f.eval(&at(x, y, &k))?, &j, &k, y)?;
                data.push(s);
            }
            let scale = data.iter().map(|s| s.value.norm().max(y * s.deriv.norm())).fold(1e-300, f64::max);
            for a in &data {
                for b in &data {
                    let dev = a.value.dist(&b.value).max(y * a.deriv.dist(&b.deriv));
                    worst = worst.max(dev / scale);
                }
            }
        }
    }
    Ok((worst <= 1e-10, format!("max relative (b, c) deviation {worst:.2e} (bound 1e-10)")))
}

fn c2_reciprocal(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    let mut probes = 0;
    for _ in 0..50 {
        let deg = rng.gen_range(1..=5);
        let p = rand_poly(rng, deg);
        let sym = p.sym();
        let f = SliceFunction::poly(p.clone());
        let inv = algebra::reciprocal(&f)?;
        let scale = p.scale_norm().powi(2);
        let mut kept = 0;
        while kept < 1000 {
            let q = rand_in_ball(rng, &Q::ZERO, 1.5);
            if sym.eval_quat(&q).norm() < 1e-3 * scale {
                continue;
            }
            kept += 1;
            let a = algebra::product_point(&f, &inv, &q)?;
            let b = algebra::product_point(&inv, &f, &q)?;
            worst = worst.max(a.dist(&Q::ONE)).max(b.dist(&Q::ONE));
        }
        probes += kept;
    }
    Ok((worst <= 1e-9, format!("{probes} probes, max |f*f^-* - 1| {worst:.2e} (bound 1e-9)")))
}

fn c3_famous(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let p = QPoly::linear(&Q::I).star(&QPoly::linear(&Q::J));
    let rep = poly_zeros(&p)?;
    let one = rep.isolated.len() == 1 && rep.spherical.is_empty();
    let at_i = one && rep.isolated[0].point.approx_eq(&Q::I, 1e-12);
    let fi = p.eval(&Q::I).norm();
    // Oracle: dense sampling of the unit sphere, away from i.
    let mut min = f64::INFINITY;
    let mut n = 0;
    while n < 10_000 {
        let u = rand_unit(rng);
        if u.dist(&ImaginaryUnit::I) < 0.05 {
            continue;
        }
        n += 1;
        min = min.min(p.eval(&u.q()).norm());
    }
    let ok = one && at_i && fi <= 1e-12 && min > 1e-2;
    Ok((ok, format!("isolated zeros {}, at i {at_i}, |f(i)| {fi:.1e}, min |f| off i {min:.3}", rep.isolated.len())))
}

fn c4_cauchy(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    const PANELS: usize = 16;
    let mut worst = 0.0f64;
    for k in 0..100 {
        let deg = rng.gen_range(0..=8);
        let f = SliceFunction::poly(rand_poly(rng, deg));
        let u = rand_unit(rng);
        let (value, direct) = if k % 2 == 0 {
            let c = Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
            let r = rng.gen_range(0.5..1.5);
            let contour = Contour::circle(u, c, r, PANELS);
            let z = c + Complex64::from_polar(0.8 * r * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..2.0 * PI));
            (slicewise_cauchy(&f, &contour, z)?, f.eval(&u.embed(z))?)
        } else {
            let c = rng.gen_range(-0.5..0.5);
            let r = rng.gen_range(0.5..1.5);
            let q = rand_in_ball(rng, &Q::real(c), 0.8 * r);
            let set = SymmetricSet::Ball { center: c, radius: r };
            (local_cauchy(&f, &set, u, &q, None, PANELS)?, f.eval(&q)?)
        };
        worst = worst.max(value.dist(&direct) / direct.norm().max(1.0));
    }
    let nodes = PANELS * 16;
    Ok((worst <= 1e-8, format!("100 probes, {nodes} nodes, max relative residual {worst:.2e} (bound 1e-8)")))
}

fn cap_units(f: &SliceFunction, x: f64, y: f64, rep: &ImaginaryUnit, n: usize) -> Vec<ImaginaryUnit> {
    let caps = SphereCaps::compute(f.domain(), x, y, 2.0);
    caps.cap_of(rep).map_or(vec![], |i| caps.sample(i, n))
}

fn c5_caps() -> Result<(bool, String)> {
    let cfg = DourenConfig::default();
    let f = douren::douren_f(cfg);
    let mut worst = 0.0f64;
    for plus in [true, false] {
        let want = douren::cap_closed_form(&cfg, plus)?;
        let rep = if plus { cfg.unit } else { cfg.unit.neg() };
        for j in cap_units(&f, -1.0, 2.0, &rep, 12) {
            let d = spherical_data_with(&f, &at(-1.0, 2.0, &j), 2.0)?;
            worst = worst.max(d.value.dist(&want.value)).max(d.derivative.dist(&want.deriv));
        }
    }
    Ok((worst <= 1e-9, format!("max deviation from closed forms {worst:.2e} (bound 1e-9)")))
}

fn c6_jump() -> Result<(bool, String)> {
    let cfg = DourenConfig::default();
    let mut worst = 0.0f64;
    for s in [0.05, 0.1, 0.2, 0.25, 0.3, 0.4, 0.45] {
        let j = douren::jump_witness(&cfg, s, 1e-5)?;
        worst = worst.max((j.abs() - 2.0 * PI).abs());
    }
    Ok((worst <= 1e-6, format!("max ||jump| - 2 pi| {worst:.2e} at distance 1e-5 (bound 1e-6)")))
}

/// The unit `K` with `b + yK c = 0`, when `c` is invertible and it is a unit.
fn cap_zero_unit(s: &Sph, y: f64) -> Option<ImaginaryUnit> {
    let k = -(s.value * s.deriv.try_inv()?) * (1.0 / y);
    if k.w.abs() > 1e-8 || (k.norm() - 1.0).abs() > 1e-8 {
        return None;
    }
    ImaginaryUnit::new(k.im()).ok()
}

fn c7_ghosts() -> Result<(bool, String)> {
    let cfg = DourenConfig::default();
    let fx: Fixtures = douren::fixtures(&cfg, None)?;
    let plus = cap_units(&fx.f, -1.0, 2.0, &cfg.unit, 100);
    let i = cfg.unit;
    // (a) case 2: ghost divisor
    let pt = fx.p0;
    let g2 = douren::g_for(&cfg, &fx.f, &fx.i0)?;
    let a = divides_near(&g2, &pt, &fx.c_plus)? && g2.eval(&pt)?.norm() > 1e-6;
    // (b) ell vanishes on C+, one zero on C-
    let ell_max = plus.iter().map(|j| fx.ell.eval(&at(-1.0, 2.0, j)).map(|v| v.norm())).collect::<Result<Vec<_>>>()?;
    let ell_max = ell_max.into_iter().fold(0.0, f64::max);
    let ell_minus = cap_zero_unit(&fx.ell.sph(&fx.p_bar)?, 2.0);
    let b = ell_max <= 1e-9 && ell_minus.is_some_and(|k| k.dist(&i.neg()) < 1e-8);
    // (c) m: p in C+, p0 in C-
    let m_plus = cap_zero_unit(&fx.m.sph(&fx.p)?, 2.0);
    let m_minus = cap_zero_unit(&fx.m.sph(&fx.p0)?, 2.0);
    let c = m_plus.is_some_and(|k| k.dist(&i) < 1e-8) && m_minus.is_some_and(|k| k.dist(&fx.i0) < 1e-8);
    // (d) g2^s vanishes on C+ although g2 has no zero there
    let s2 = algebra::symmetrize(&g2);
    let sym_max = plus.iter().map(|j| s2.eval(&at(-1.0, 2.0, j)).map(|v| v.norm())).collect::<Result<Vec<_>>>()?;
    let sym_max = sym_max.into_iter().fold(0.0, f64::max);
    let z_plus = cap_zero_unit(&g2.sph(&fx.p)?, 2.0);
    let d = sym_max <= 1e-9 && z_plus.map_or(true, |k| k.dist(&i) > 0.5);
    Ok((
        a && b && c && d,
        format!("(a) {a} (b) {b} max|l| on C+ {ell_max:.1e} (c) {c} (d) {d} max|g^s| on C+ {sym_max:.1e}"),
    ))
}

fn c8_zero_divisor(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let cfg = DourenConfig::default();
    let d = algebra::sub(&douren::douren_ft(cfg, 1.0)?, &douren::douren_ft(cfg, 0.0)?)?;
    let s = algebra::symmetrize(&d);
    let (mut dev, mut sym, mut max) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..1000 {
        let j = rand_unit(rng);
        let (r, t) = (0.999 * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..2.0 * PI));
        let q = at(-1.0 + r * t.cos(), 2.0 + r * t.sin(), &j);
        let v = d.eval(&q)?;
        dev = dev.max(v.dist(&((cfg.unit.q() + j.q()) * PI)));
        sym = sym.max(s.eval(&q)?.norm());
        max = max.max(v.norm());
    }
    let ok = dev <= 1e-10 && sym <= 1e-10 && max >= 1.0;
    Ok((ok, format!("max |D - pi(I+J)| {dev:.1e}, max |D^s| {sym:.1e}, max |D| {max:.2}")))
}

fn c9_series(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let deg = rng.gen_range(0..=12);
        let f = SliceFunction::poly(rand_poly(rng, deg));
        let (x0, y0) = (rng.gen_range(-1.0..1.0), rng.gen_range(0.3..1.5));
        let s = spherical_coeffs(&f, x0, y0, None, 0, 8)?;
        for _ in 0..50 {
            let u = rand_unit(rng);
            let q = rand_in_ball(rng, &at(x0, y0, &u), 0.5 * y0);
            let want = f.eval(&q)?;
            worst = worst.max(eval_spherical(&s, &q)?.dist(&want) / want.norm().max(1.0));
        }
    }
    let mut lworst = 0.0f64;
    for _ in 0..5 {
        let p = rand_quat(rng);
        let r = QRational::from_poly(QPoly::linear(&p)).reciprocal()?;
        let l = laurent_coeffs(&SliceFunction::rational(r), &p, (-6, 6))?;
        for n in -6..=6 {
            let want = if n == -1 { Q::ONE } else { Q::ZERO };
            lworst = lworst.max(l.coeff(n).dist(&want));
        }
    }
    let ok = worst <= 1e-9 && lworst <= 1e-10;
    Ok((ok, format!("spherical residual {worst:.1e} (bound 1e-9), laurent deviation {lworst:.1e} (bound 1e-10)")))
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

const PYTHAGOREAN: [(i64, i64, i64, i64); 8] =
    [(1, 2, 2, 3), (2, 3, 6, 7), (1, 4, 8, 9), (2, 6, 9, 11), (4, 4, 7, 9), (0, 3, 4, 5), (2, 10, 11, 15), (1, 12, 12, 17)];

fn rational_unit(rng: &mut ChaCha8Rng) -> [BigRational; 3] {
    let (a, b, c, d) = PYTHAGOREAN[rng.gen_range(0..PYTHAGOREAN.len())];
    let mut v = [a, b, c];
    v.shuffle(rng);
    v.map(|t| rat(if rng.gen_bool(0.5) { t } else { -t }, d))
}

fn c10_normal_form(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let xs = [(-1, 1), (0, 1), (1, 2), (3, 2), (-2, 3)];
    let ys = [(1, 1), (1, 2), (2, 1), (3, 2)];
    let mut good = 0;
    let mut first_bad = String::new();
    for case in 0..50 {
        let (xn, xd) = xs[rng.gen_range(0..xs.len())];
        let (yn, yd) = ys[rng.gen_range(0..ys.len())];
        let (x, y) = (rat(xn, xd), rat(yn, yd));
        let y2 = y.clone() * y.clone();
        let m = rng.gen_range(0..=2);
        let n = rng.gen_range(if m == 0 { 1 } else { 0 }..=3);
        let mut chain: Vec<Quaternion<BigRational>> = vec![];
        while chain.len() < n {
            let u = rational_unit(rng);
            let p = Quaternion::new(x.clone(), y.clone() * u[0].clone(), y.clone() * u[1].clone(), y.clone() * u[2].clone());
            if chain.last().is_some_and(|l| *l == p.conj()) {
                continue;
            }
            chain.push(p);
        }
        // g: small integer coefficients, no zeros on the sphere
        let g = loop {
            let deg = rng.gen_range(0..=2);
            let c: Vec<Quaternion<BigRational>> = (0..=deg)
                .map(|_| {
                    let mut r = || rat(rng.gen_range(-3..=3), 1);
                    Quaternion::new(r(), r(), r(), r())
                })
                .collect();
            let g = QPoly::new(c);
            if g.is_zero() {
                continue;
            }
            let gs = g.sym().to_f64();
            let z = Complex64::new(x.to_f64(), y.to_f64());
            if gs.eval_complex(z).norm() > 1e-6 {
                break g;
            }
        };
        let sphere = QPoly::from_real(&RealPoly::sphere(x.clone(), y2.clone()).pow(m));
        let mut f = sphere;
        for p in &chain {
            f = f.star(&QPoly::linear(p));
        }
        let f = f.star(&g);
        let (_, exact) = poly_zeros_exact(&f)?;
        let hit = exact.iter().find(|e| e.x == x && e.y2 == y2);
        match hit {
            Some(e) if e.m == m && e.chain == chain => good += 1,
            other => {
                if first_bad.is_empty() {
                    first_bad = format!(
                        "; case {case}: want m={m} n={n}, got {:?}",
                        other.map(|e| (e.m, e.chain.len()))
                    );
                }
            }
        }
    }
    Ok((good == 50, format!("{good}/50 exact matches{first_bad}")))
}

fn c11_singular() -> Result<(bool, String)> {
    let cfg = DourenConfig::default();
    let fx = douren::fixtures(&cfg, None)?;
    let region = fx.f.domain().clone();
    let i = cfg.unit;
    let e = i.orthogonal();
    let unit = |a: f64| ImaginaryUnit::new(i.q() * a.cos() + e.q() * a.sin()).unwrap();
    // C+ : |J - I| < 1/2, i.e. angle below 2 asin(1/4)
    let plus = [0.0, 0.2, 0.4];
    let minus = [1.0, 1.6, 2.4];
    let mut removable = 0;
    for a in plus {
        let r = classify_singularity(&fx.h, &at(-1.0, 2.0, &unit(a)), &region, 6)?;
        if r.kind == SingularityKind::Removable {
            removable += 1;
        }
    }
    let rb = classify_singularity(&fx.h, &fx.p_bar, &region, 6)?;
    let bar_ok = rb.kind == SingularityKind::Pole { order: 0 };
    let mut ord_ge1 = 0;
    for a in minus {
        let r = classify_singularity(&fx.h, &at(-1.0, 2.0, &unit(a)), &region, 6)?;
        if matches!(r.kind, SingularityKind::Pole { order } if order >= 1) {
            ord_ge1 += 1;
        }
    }
    let ok = removable == plus.len() && bar_ok && ord_ge1 == minus.len();
    Ok((
        ok,
        format!("C+ removable {removable}/{}, conj p {:?}, C- ord >= 1 {ord_ge1}/{}", plus.len(), rb.kind, minus.len()),
    ))
}

fn jacobian(f: &SliceFunction, q: &Q) -> Result<Matrix4<f64>> {
    let mut m = Matrix4::zeros();
    for (c, v) in [Q::ONE, Q::I, Q::J, Q::K].iter().enumerate() {
        let d = differential(f, q, v)?;
        m.set_column(c, &Vector4::new(d.w, d.x, d.y, d.z));
    }
    Ok(m)
}

fn vec4(q: &Q) -> Vector4<f64> {
    Vector4::new(q.w, q.x, q.y, q.z)
}

/// Levenberg-Marquardt descent on `|f - w|^2` from `q`.
fn descend(f: &SliceFunction, mut q: Q, w: &Q, iters: usize) -> Result<Q> {
    let mut lambda = 1e-3;
    let mut r = f.eval(&q)? - *w;
    for _ in 0..iters {
        if r.norm() < 1e-15 {
            break;
        }
        let jm = jacobian(f, &q)?;
        let jt = jm.transpose();
        let a = jt * jm + Matrix4::identity() * lambda;
        let Some(step) = a.lu().solve(&(jt * vec4(&r))) else { break };
        let cand = q - Q::new(step[0], step[1], step[2], step[3]);
        let rc = f.eval(&cand)? - *w;
        if rc.norm() < r.norm() {
            q = cand;
            r = rc;
            lambda = (lambda * 0.3).max(1e-15);
        } else {
            lambda *= 10.0;
            if lambda > 1e12 {
                break;
            }
        }
    }
    Ok(q)
}

/// `min |f(q) - f(p)|` over `|q - p| = r`: best samples refined by
/// projected descent on the sphere.
fn boundary_min(f: &SliceFunction, p: &Q, r: f64, dirs: &[Q]) -> Result<f64> {
    let fp = f.eval(p)?;
    let g = |v: &Q| -> Result<f64> { Ok(f.eval(&(*p + *v * (r / v.norm())))?.dist(&fp)) };
    let mut scored: Vec<(f64, Q)> = dirs.iter().map(|v| Ok((g(v)?, *v * (1.0 / v.norm())))).collect::<Result<_>>()?;
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = f64::INFINITY;
    for (mut val, mut v) in scored.into_iter().take(5) {
        let mut step = 0.1;
        for _ in 0..300 {
            let h = 1e-7;
            let grad = [Q::ONE, Q::I, Q::J, Q::K]
                .iter()
                .map(|e| Ok((g(&(v + *e * h))? - g(&(v - *e * h))?) / (2.0 * h)))
                .collect::<Result<Vec<f64>>>()?;
            let gq = Q::new(grad[0], grad[1], grad[2], grad[3]);
            // tangential part
            let gt = gq - v * (gq.w * v.w + gq.x * v.x + gq.y * v.y + gq.z * v.z);
            if gt.norm() < 1e-14 {
                break;
            }
            let cand = v - gt * (step / gt.norm());
            let cand = cand * (1.0 / cand.norm());
            let cv = g(&cand)?;
            if cv < val {
                (v, val) = (cand, cv);
                step *= 1.5;
            } else {
                step *= 0.5;
                if step < 1e-10 {
                    break;
                }
            }
        }
        best = best.min(val);
    }
    Ok(best)
}

/// Follows the local inverse of `f` along the segment from `f(p)` to `w`.
fn continuation(f: &SliceFunction, mut q: Q, fp: &Q, w: &Q, steps: usize) -> Result<Q> {
    for k in 1..=steps {
        let target = *fp + (*w - *fp) * (k as f64 / steps as f64);
        for _ in 0..30 {
            let r = f.eval(&q)? - target;
            if r.norm() <= 1e-15 * target.norm().max(1.0) {
                break;
            }
            let Some(d) = jacobian(f, &q)?.lu().solve(&vec4(&r)) else { return Ok(q) };
            q = q - Q::new(d[0], d[1], d[2], d[3]);
        }
    }
    Ok(q)
}

fn c12_modulus(rng: &mut ChaCha8Rng) -> Result<(bool, String)> {
    let fixtures: Vec<SliceFunction> = (0..20)
        .map(|_| {
            let deg = rng.gen_range(1..=5);
            SliceFunction::poly(rand_poly(rng, deg))
        })
        .collect();
    // Minimum modulus: lattice local minima of |f|, refined.
    const N: usize = 11;
    const H: f64 = 3.0 / (N - 1) as f64;
    let coord = |i: usize| -1.5 + H * i as f64;
    let mut minima = 0;
    let mut worst = 0.0f64;
    for f in &fixtures {
        let mut vals = vec![0.0; N * N * N * N];
        let idx = |a: usize, b: usize, c: usize, d: usize| ((a * N + b) * N + c) * N + d;
        for a in 0..N {
            for b in 0..N {
                for c in 0..N {
                    for d in 0..N {
                        vals[idx(a, b, c, d)] = f.eval(&Q::new(coord(a), coord(b), coord(c), coord(d)))?.norm();
                    }
                }
            }
        }
        for a in 1..N - 1 {
            for b in 1..N - 1 {
                for c in 1..N - 1 {
                    for d in 1..N - 1 {
                        let v = vals[idx(a, b, c, d)];
                        let nb = [
                            idx(a - 1, b, c, d),
                            idx(a + 1, b, c, d),
                            idx(a, b - 1, c, d),
                            idx(a, b + 1, c, d),
                            idx(a, b, c - 1, d),
                            idx(a, b, c + 1, d),
                            idx(a, b, c, d - 1),
                            idx(a, b, c, d + 1),
                        ];
                        if nb.iter().any(|&k| vals[k] <= v) {
                            continue;
                        }
                        let q0 = Q::new(coord(a), coord(b), coord(c), coord(d));
                        let q = descend(f, q0, &Q::ZERO, 200)?;
                        if [q.w, q.x, q.y, q.z].iter().all(|t| t.abs() < 1.5 - H) {
                            minima += 1;
                            worst = worst.max(f.eval(&q)?.norm());
                        }
                    }
                }
            }
        }
    }
    // Open mapping: preimages of points in the ball around f(p).
    let mut centers = 0;
    let mut covered = 0;
    let r = 1e-2;
    while centers < 50 {
        let f = &fixtures[rng.gen_range(0..fixtures.len())];
        let p = rand_in_ball(rng, &Q::ZERO, 1.2);
        if is_differential_singular(f, &p)? {
            continue;
        }
        let jm = jacobian(f, &p)?;
        let sv = jm.singular_values();
        if sv.min() < 1e-3 * sv.max() {
            continue;
        }
        centers += 1;
        let fp = f.eval(&p)?;
        // boundary sample: random directions plus the weakest directions of df
        let mut dirs: Vec<Q> = (0..400).map(|_| rand_quat(rng)).filter(|v| v.norm() > 1e-3).collect();
        let svd = jm.svd(false, true);
        let vt = svd.v_t.unwrap();
        for k in 0..4 {
            let row = vt.row(k);
            let v = Q::new(row[0], row[1], row[2], row[3]);
            dirs.push(v);
            dirs.push(-v);
        }
        let rho = boundary_min(f, &p, r, &dirs)?;
        let mut all = true;
        for _ in 0..10 {
            let v = rand_quat(rng);
            let w = fp + v * (0.9 * rho / v.norm().max(1e-9));
            let q = continuation(f, p, &fp, &w, 32)?;
            all &= q.dist(&p) < r && f.eval(&q)?.dist(&w) <= 1e-12 * w.norm().max(1.0);
        }
        if all {
            covered += 1;
        }
    }
    let ok = worst <= 1e-8 && covered == centers;
    Ok((
        ok,
        format!("{minima} refined interior minima, max |f| {worst:.1e} (bound 1e-8); image balls covered {covered}/{centers}"),
    ))
}
