//! Domains in H, Cassini regions, tubes around slice paths and cap
//! components of spheres `x + y S`.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::{Arc, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SliceError};
use crate::quaternion::{at, slice_decompose, ImaginaryUnit, Quaternion};
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    Inside,
    Outside,
    /// Inside the closure but within the boundary collar.
    Boundary,
}

/// A subset of H described by a membership predicate.
pub trait Region: Send + Sync {
    fn classify(&self, q: &Quaternion) -> Membership;
    fn label(&self) -> String;
    /// Invariant under rotations `x + y I -> x + y J`.
    fn symmetric(&self) -> bool {
        false
    }
    /// `(x_min, x_max, y_max)` enclosing the region's slice projection.
    fn slice_box(&self) -> (f64, f64, f64) {
        (-4.0, 4.0, 4.0)
    }
    /// Whether a zero-width cut separates two nearby interior points.
    fn edge_blocked(&self, _a: &Quaternion, _b: &Quaternion) -> bool {
        false
    }
}

/// Shared handle to a domain.
#[derive(Clone)]
pub struct DomainSpec(Arc<dyn Region>);

impl fmt::Debug for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DomainSpec({})", self.0.label())
    }
}

impl DomainSpec {
    pub fn new<R: Region + 'static>(r: R) -> Self {
        DomainSpec(Arc::new(r))
    }

    pub fn whole() -> Self {
        DomainSpec::new(Whole)
    }

    pub fn ball(center: Quaternion, radius: f64) -> Self {
        DomainSpec::new(Ball { center, radius })
    }

    pub fn cassini(c: CassiniRegion) -> Self {
        DomainSpec::new(c)
    }

    pub fn classify(&self, q: &Quaternion) -> Membership {
        self.0.classify(q)
    }

    pub fn contains(&self, q: &Quaternion) -> bool {
        self.0.classify(q) == Membership::Inside
    }

    /// `Ok` for interior points, otherwise the matching error.
    pub fn check(&self, q: &Quaternion) -> Result<()> {
        match self.0.classify(q) {
            Membership::Inside => Ok(()),
            Membership::Boundary => Err(SliceError::OnBoundary(q.to_string())),
            Membership::Outside => Err(SliceError::NotInDomain(q.to_string())),
        }
    }

    pub fn symmetric(&self) -> bool {
        self.0.symmetric()
    }

    pub fn label(&self) -> String {
        self.0.label()
    }

    pub fn slice_box(&self) -> (f64, f64, f64) {
        self.0.slice_box()
    }

    pub fn edge_blocked(&self, a: &Quaternion, b: &Quaternion) -> bool {
        self.0.edge_blocked(a, b)
    }

    /// Whether the region meets the real axis (sampled over its slice box).
    pub fn meets_real_axis(&self) -> bool {
        let (a, b, _) = self.slice_box();
        (0..=2000).any(|k| self.contains(&Quaternion::real(a + (b - a) * k as f64 / 2000.0)))
    }
}

/// All of H.
#[derive(Clone, Copy, Debug)]
pub struct Whole;

impl Region for Whole {
    fn classify(&self, q: &Quaternion) -> Membership {
        if q.is_finite() {
            Membership::Inside
        } else {
            Membership::Outside
        }
    }
    fn label(&self) -> String {
        "H".into()
    }
    fn symmetric(&self) -> bool {
        true
    }
}

/// Open Euclidean ball in R^4.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Ball {
    pub center: Quaternion,
    pub radius: f64,
}

impl Region for Ball {
    fn classify(&self, q: &Quaternion) -> Membership {
        let d = q.dist(&self.center);
        if d < self.radius - tol::BOUNDARY_COLLAR {
            Membership::Inside
        } else if d <= self.radius + tol::BOUNDARY_COLLAR {
            Membership::Boundary
        } else {
            Membership::Outside
        }
    }
    fn label(&self) -> String {
        format!("ball({}, {})", self.center, self.radius)
    }
    fn symmetric(&self) -> bool {
        self.center.im_norm() == 0.0
    }
    fn slice_box(&self) -> (f64, f64, f64) {
        let c = slice_decompose(&self.center);
        (c.x - self.radius, c.x + self.radius, c.y + self.radius)
    }
}

/// `U(x0 + y0 S, r1, r2) = { q : r1^2 < |(q - x0)^2 + y0^2| < r2^2 }`.
/// With `r1 = None` the inner constraint is dropped and the region is the
/// Cassini ball `U(x0 + y0 S, r2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CassiniRegion {
    pub x0: f64,
    pub y0: f64,
    pub r1: Option<f64>,
    pub r2: f64,
}

impl CassiniRegion {
    pub fn ball(x0: f64, y0: f64, r: f64) -> Self {
        CassiniRegion { x0, y0, r1: None, r2: r }
    }

    pub fn shell(x0: f64, y0: f64, r1: f64, r2: f64) -> Self {
        CassiniRegion { x0, y0, r1: Some(r1), r2 }
    }

    /// `|(q - x0)^2 + y0^2|`.
    pub fn level(&self, q: &Quaternion) -> f64 {
        let d = *q - self.x0;
        (d * d + self.y0 * self.y0).norm()
    }

    pub fn contains(&self, q: &Quaternion) -> bool {
        let v = self.level(q);
        self.r1.map_or(true, |r1| r1 * r1 < v) && v < self.r2 * self.r2
    }

    /// Whether the region appears to lie inside `dom`, judged on a slice
    /// lattice over a few slices.
    pub fn sampled_inside(&self, dom: &DomainSpec, units: &[ImaginaryUnit], n: usize) -> bool {
        let reach = self.x0.abs() + self.y0 + self.r2 + 1.0;
        for u in units {
            for a in 0..n {
                for b in 0..n {
                    let x = self.x0 - reach + 2.0 * reach * (a as f64 + 0.5) / n as f64;
                    let y = reach * (b as f64 + 0.5) / n as f64;
                    let q = at(x, y, u);
                    if self.contains(&q) && !dom.contains(&q) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

impl Region for CassiniRegion {
    fn classify(&self, q: &Quaternion) -> Membership {
        let v = self.level(q);
        let c = tol::BOUNDARY_COLLAR;
        let r2 = self.r2 * self.r2;
        let near_outer = (v - r2).abs() <= c;
        let near_inner = self.r1.map_or(false, |r1| (v - r1 * r1).abs() <= c);
        if near_outer || near_inner {
            Membership::Boundary
        } else if self.contains(q) {
            Membership::Inside
        } else {
            Membership::Outside
        }
    }
    fn label(&self) -> String {
        match self.r1 {
            Some(r1) => format!("cassini({}, {}, {}, {})", self.x0, self.y0, r1, self.r2),
            None => format!("cassini({}, {}, {})", self.x0, self.y0, self.r2),
        }
    }
    fn symmetric(&self) -> bool {
        true
    }
    fn slice_box(&self) -> (f64, f64, f64) {
        let reach = (self.y0 * self.y0 + self.r2 * self.r2).sqrt();
        (self.x0 - reach, self.x0 + reach, reach)
    }
}

/// Tube around a path in one slice: the union of `B(p, |im p| / |im q0| * eps)`
/// over non-real path points `p` and `B(p, eps)` over real ones, where `q0`
/// maximizes `|im|`. Consecutive samples are joined by straight segments.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GammaTube {
    pub samples: Vec<Quaternion>,
    pub eps: f64,
    y0: f64,
}

pub fn gamma_tube(samples: Vec<Quaternion>, eps: f64) -> Result<GammaTube> {
    if samples.is_empty() || !(eps > 0.0) {
        return Err(SliceError::InvalidInput("tube needs samples and eps > 0".into()));
    }
    for w in samples.windows(2) {
        if !w[0].coplanar(&w[1], 1e-9) {
            return Err(SliceError::InvalidInput("tube samples must share one slice".into()));
        }
    }
    let y0 = samples.iter().map(|p| p.im_norm()).fold(0.0, f64::max);
    Ok(GammaTube { samples, eps, y0 })
}

impl GammaTube {
    fn radius(&self, p: &Quaternion) -> f64 {
        let y = p.im_norm();
        if y == 0.0 || self.y0 == 0.0 {
            self.eps
        } else {
            self.eps * y / self.y0
        }
    }

    /// `min over path points of |q - p| - r(p)`; negative inside.
    pub fn margin(&self, q: &Quaternion) -> f64 {
        let mut best = f64::INFINITY;
        for p in &self.samples {
            best = best.min(q.dist(p) - self.radius(p));
        }
        for w in self.samples.windows(2) {
            for (a, b) in split_at_real(w[0], w[1]) {
                if a.im_norm() == 0.0 {
                    best = best.min(q.dist(&a) - self.eps);
                }
                // Interior points of a piece are non-real, so the radius is linear.
                let ra = self.eps * a.im_norm() / self.y0.max(f64::MIN_POSITIVE);
                let rb = self.eps * b.im_norm() / self.y0.max(f64::MIN_POSITIVE);
                let g = |s: f64| q.dist(&(a + (b - a) * s)) - (ra + (rb - ra) * s);
                let (mut lo, mut hi) = (0.0, 1.0);
                for _ in 0..90 {
                    let m1 = lo + (hi - lo) / 3.0;
                    let m2 = hi - (hi - lo) / 3.0;
                    if g(m1) < g(m2) {
                        hi = m2;
                    } else {
                        lo = m1;
                    }
                }
                best = best.min(g(0.5 * (lo + hi)));
            }
        }
        best
    }
}

/// Splits the segment `[a, b]` where it crosses the real axis.
fn split_at_real(a: Quaternion, b: Quaternion) -> Vec<(Quaternion, Quaternion)> {
    let u = ImaginaryUnit::of(&a).or_else(|| ImaginaryUnit::of(&b));
    let Some(u) = u else { return vec![(a, b)] };
    let ya = a.im().dot(&u.q());
    let yb = b.im().dot(&u.q());
    if ya * yb < 0.0 {
        let s = ya / (ya - yb);
        let m = a + (b - a) * s;
        let m = Quaternion::real(m.w);
        vec![(a, m), (m, b)]
    } else {
        vec![(a, b)]
    }
}

impl Region for GammaTube {
    fn classify(&self, q: &Quaternion) -> Membership {
        let m = self.margin(q);
        if m < -tol::BOUNDARY_COLLAR {
            Membership::Inside
        } else if m <= tol::BOUNDARY_COLLAR {
            Membership::Boundary
        } else {
            Membership::Outside
        }
    }
    fn label(&self) -> String {
        format!("tube({} samples, eps {})", self.samples.len(), self.eps)
    }
    fn slice_box(&self) -> (f64, f64, f64) {
        let xs = self.samples.iter().map(|p| p.w);
        let lo = xs.clone().fold(f64::INFINITY, f64::min) - self.eps;
        let hi = xs.fold(f64::NEG_INFINITY, f64::max) + self.eps;
        (lo, hi, self.y0 + self.eps)
    }
}

/// Region cut out of another by a predicate on points (kept where `keep` holds).
pub struct Restricted<F: Fn(&Quaternion) -> bool + Send + Sync> {
    pub base: DomainSpec,
    pub keep: F,
    pub name: String,
}

impl<F: Fn(&Quaternion) -> bool + Send + Sync> Region for Restricted<F> {
    fn edge_blocked(&self, a: &Quaternion, b: &Quaternion) -> bool {
        self.base.edge_blocked(a, b)
    }
    fn classify(&self, q: &Quaternion) -> Membership {
        match self.base.classify(q) {
            Membership::Inside if (self.keep)(q) => Membership::Inside,
            Membership::Inside => Membership::Outside,
            m => m,
        }
    }
    fn label(&self) -> String {
        format!("{} restricted to {}", self.base.label(), self.name)
    }
    fn slice_box(&self) -> (f64, f64, f64) {
        self.base.slice_box()
    }
}

/// Intersection of several domains.
pub struct Intersection(pub Vec<DomainSpec>);

impl Region for Intersection {
    fn edge_blocked(&self, a: &Quaternion, b: &Quaternion) -> bool {
        self.0.iter().any(|d| d.edge_blocked(a, b))
    }
    fn classify(&self, q: &Quaternion) -> Membership {
        let mut out = Membership::Inside;
        for d in &self.0 {
            match d.classify(q) {
                Membership::Outside => return Membership::Outside,
                Membership::Boundary => out = Membership::Boundary,
                Membership::Inside => {}
            }
        }
        out
    }
    fn label(&self) -> String {
        self.0.iter().map(|d| d.label()).collect::<Vec<_>>().join(" & ")
    }
    fn symmetric(&self) -> bool {
        self.0.iter().all(|d| d.symmetric())
    }
    fn slice_box(&self) -> (f64, f64, f64) {
        self.0.iter().map(|d| d.slice_box()).fold(
            (f64::NEG_INFINITY, f64::INFINITY, f64::INFINITY),
            |(a, b, c), (x, y, z)| (a.max(x), b.min(y), c.min(z)),
        )
    }
}

impl DomainSpec {
    /// Intersection, skipping whole-space operands.
    pub fn and(&self, o: &DomainSpec) -> DomainSpec {
        if o.label() == "H" || Arc::ptr_eq(&self.0, &o.0) {
            return self.clone();
        }
        if self.label() == "H" {
            return o.clone();
        }
        DomainSpec::new(Intersection(vec![self.clone(), o.clone()]))
    }
}

/// `(sigma, tau, omega)` distances between `q` and `p`.
pub fn sigma_tau_omega(q: &Quaternion, p: &Quaternion) -> (f64, f64, f64) {
    let dre = q.w - p.w;
    let (yq, yp) = (q.im_norm(), p.im_norm());
    let omega = (dre * dre + (yq + yp) * (yq + yp)).sqrt();
    if q.coplanar(p, tol::REAL_TRACE) {
        let d = q.dist(p);
        (d, d, omega)
    } else {
        (omega, (dre * dre + (yq - yp) * (yq - yp)).sqrt(), omega)
    }
}

/// Identifies one connected component of `(x + y S) ∩ Ω`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CapId {
    pub x: f64,
    pub y: f64,
    /// Component index, ordered by the lowest grid vertex they contain.
    pub index: usize,
    /// A unit inside the component.
    pub representative: ImaginaryUnit,
}

impl CapId {
    pub fn point(&self) -> Quaternion {
        at(self.x, self.y, &self.representative)
    }
}

struct Icosphere {
    verts: Vec<Quaternion>,
    adj: Vec<Vec<u32>>,
    edge: f64,
}

static ICOSPHERES: [OnceLock<Icosphere>; 9] = [
    OnceLock::new(),
    OnceLock::new(),
    OnceLock::new(),
    OnceLock::new(),
    OnceLock::new(),
    OnceLock::new(),
    OnceLock::new(),
    OnceLock::new(),
    OnceLock::new(),
];

fn icosphere(level: usize) -> &'static Icosphere {
    ICOSPHERES[level.min(8)].get_or_init(|| build_icosphere(level.min(8)))
}

fn build_icosphere(level: usize) -> Icosphere {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let raw = [
        (-1.0, t, 0.0), (1.0, t, 0.0), (-1.0, -t, 0.0), (1.0, -t, 0.0),
        (0.0, -1.0, t), (0.0, 1.0, t), (0.0, -1.0, -t), (0.0, 1.0, -t),
        (t, 0.0, -1.0), (t, 0.0, 1.0), (-t, 0.0, -1.0), (-t, 0.0, 1.0),
    ];
    let mut verts: Vec<Quaternion> = raw
        .iter()
        .map(|&(a, b, c)| ImaginaryUnit::from_vector(a, b, c).unwrap().q())
        .collect();
    let mut faces: Vec<[u32; 3]> = vec![
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ];
    for _ in 0..level {
        let mut mid: HashMap<(u32, u32), u32> = HashMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        let mut midpoint = |a: u32, b: u32, verts: &mut Vec<Quaternion>| -> u32 {
            let key = (a.min(b), a.max(b));
            *mid.entry(key).or_insert_with(|| {
                let m = verts[a as usize] + verts[b as usize];
                verts.push(m / m.norm());
                (verts.len() - 1) as u32
            })
        };
        for f in &faces {
            let ab = midpoint(f[0], f[1], &mut verts);
            let bc = midpoint(f[1], f[2], &mut verts);
            let ca = midpoint(f[2], f[0], &mut verts);
            next.push([f[0], ab, ca]);
            next.push([f[1], bc, ab]);
            next.push([f[2], ca, bc]);
            next.push([ab, bc, ca]);
        }
        faces = next;
    }
    let mut adj = vec![Vec::new(); verts.len()];
    for f in &faces {
        for (a, b) in [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])] {
            adj[a as usize].push(b);
            adj[b as usize].push(a);
        }
    }
    for l in adj.iter_mut() {
        l.sort_unstable();
        l.dedup();
    }
    let edge = faces
        .iter()
        .map(|f| verts[f[0] as usize].dist(&verts[f[1] as usize]))
        .fold(0.0, f64::max);
    Icosphere { verts, adj, edge }
}

/// Icosphere level whose edges subtend at most `step_deg`.
pub fn level_for_step(step_deg: f64) -> usize {
    let mut level = 0;
    let mut edge = 63.435;
    while edge > step_deg && level < 8 {
        edge /= 2.0;
        level += 1;
    }
    level
}

/// Vertices of the icosphere at `level` as imaginary units.
pub fn sphere_grid(level: usize) -> Vec<ImaginaryUnit> {
    icosphere(level.min(8)).verts.iter().map(|v| ImaginaryUnit::new(*v).unwrap()).collect()
}

/// Labelled components of one sphere `x + y S` inside a domain.
pub struct SphereCaps {
    pub x: f64,
    pub y: f64,
    grid: &'static Icosphere,
    /// Component per vertex; `u32::MAX` for vertices outside the domain.
    labels: Vec<u32>,
    pub count: usize,
}

impl SphereCaps {
    pub fn compute(dom: &DomainSpec, x: f64, y: f64, step_deg: f64) -> Self {
        let grid = icosphere(level_for_step(step_deg));
        let n = grid.verts.len();
        let mut labels = vec![u32::MAX; n];
        let whole = dom.symmetric() && dom.contains(&at(x, y, &ImaginaryUnit::I));
        if whole {
            labels.iter_mut().for_each(|l| *l = 0);
            return SphereCaps { x, y, grid, labels, count: 1 };
        }
        let inside: Vec<bool> = grid
            .verts
            .par_iter()
            .map(|v| dom.contains(&(Quaternion::real(x) + *v * y)))
            .collect();
        let pt = |v: usize| Quaternion::real(x) + grid.verts[v] * y;
        let mut count = 0u32;
        let mut queue = VecDeque::new();
        for s in 0..n {
            if !inside[s] || labels[s] != u32::MAX {
                continue;
            }
            labels[s] = count;
            queue.push_back(s);
            while let Some(v) = queue.pop_front() {
                for &w in &grid.adj[v] {
                    let w = w as usize;
                    if inside[w] && labels[w] == u32::MAX && !dom.edge_blocked(&pt(v), &pt(w)) {
                        labels[w] = count;
                        queue.push_back(w);
                    }
                }
            }
            count += 1;
        }
        SphereCaps { x, y, grid, labels, count: count as usize }
    }

    fn unit(&self, v: usize) -> ImaginaryUnit {
        ImaginaryUnit::new(self.grid.verts[v]).unwrap()
    }

    /// Component containing the unit `u`: the component of the nearest inside
    /// vertex within three grid edges.
    pub fn cap_of(&self, u: &ImaginaryUnit) -> Option<usize> {
        let mut best: Option<(f64, usize)> = None;
        for (v, p) in self.grid.verts.iter().enumerate() {
            if self.labels[v] == u32::MAX {
                continue;
            }
            let d = p.dist(&u.q());
            if d <= 3.0 * self.grid.edge && best.map_or(true, |(bd, _)| d < bd) {
                best = Some((d, v));
            }
        }
        best.map(|(_, v)| self.labels[v] as usize)
    }

    pub fn members(&self, cap: usize) -> Vec<ImaginaryUnit> {
        (0..self.labels.len())
            .filter(|&v| self.labels[v] == cap as u32)
            .map(|v| self.unit(v))
            .collect()
    }

    /// Up to `n` members spread over the component.
    pub fn sample(&self, cap: usize, n: usize) -> Vec<ImaginaryUnit> {
        let m = self.members(cap);
        if m.len() <= n {
            return m;
        }
        (0..n).map(|k| m[k * m.len() / n]).collect()
    }

    /// Two members far apart, found by a double farthest-point sweep from `seed`.
    pub fn far_pair(&self, cap: usize, seed: &ImaginaryUnit) -> Option<(ImaginaryUnit, ImaginaryUnit)> {
        let m = self.members(cap);
        if m.len() < 2 {
            return None;
        }
        let far = |from: &ImaginaryUnit| {
            *m.iter()
                .max_by(|a, b| a.dist(from).total_cmp(&b.dist(from)))
                .unwrap()
        };
        let k = far(seed);
        let j = far(&k);
        if j.dist(&k) < 1e-12 {
            return None;
        }
        Some((j, k))
    }

    pub fn cap_id(&self, cap: usize, representative: ImaginaryUnit) -> CapId {
        CapId { x: self.x, y: self.y, index: cap, representative }
    }
}

/// The cap component of `(x + y S) ∩ Ω` that contains `p`.
pub fn cap_component(dom: &DomainSpec, p: &Quaternion, step_deg: f64) -> Result<CapId> {
    dom.check(p)?;
    let c = slice_decompose(p);
    let Some(u) = c.unit else {
        return Ok(CapId { x: c.x, y: 0.0, index: 0, representative: ImaginaryUnit::I });
    };
    let caps = SphereCaps::compute(dom, c.x, c.y, step_deg);
    let idx = caps.cap_of(&u).ok_or_else(|| SliceError::NoCapInfo(p.to_string()))?;
    Ok(caps.cap_id(idx, u))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_tau_omega_reference() {
        let (s, t, o) = sigma_tau_omega(&Quaternion::I, &Quaternion::J);
        assert!((s - 2.0).abs() < 1e-15 && t.abs() < 1e-15 && (o - 2.0).abs() < 1e-15);
        let p = Quaternion::new(1.0, 0.0, 2.0, 0.0);
        let q = Quaternion::new(0.0, 2.0, 0.0, 0.0);
        let (s, _, o) = sigma_tau_omega(&q, &p);
        assert!((o - 17f64.sqrt()).abs() < 1e-14 && (s - o).abs() < 1e-15);
        let (s, t, _) = sigma_tau_omega(&(Quaternion::I * 3.0), &(Quaternion::I + 1.0));
        let d = (Quaternion::I * 3.0).dist(&(Quaternion::I + 1.0));
        assert!((s - d).abs() < 1e-15 && (t - d).abs() < 1e-15);
    }

    #[test]
    fn cassini_membership_is_strict() {
        let shell = CassiniRegion::shell(0.0, 1.0, 0.5, 2.0);
        assert!(!shell.contains(&Quaternion::I));
        let ball = CassiniRegion::ball(0.0, 1.0, 1.0);
        assert!(!ball.contains(&Quaternion::ZERO));
        assert!(ball.contains(&Quaternion::J));
    }

    #[test]
    fn tube_presets() {
        let t = gamma_tube(vec![Quaternion::real(0.3)], 0.5).unwrap();
        assert!(t.classify(&Quaternion::real(0.7)) == Membership::Inside);
        assert!(t.classify(&Quaternion::real(0.9)) == Membership::Outside);
        let t = gamma_tube(vec![Quaternion::I * 2.0], 1.0).unwrap();
        let d = DomainSpec::new(t);
        assert!(d.contains(&(Quaternion::I * 2.5)));
        assert!(!d.meets_real_axis());
        let seg = gamma_tube(vec![Quaternion::ZERO, Quaternion::I], 0.5).unwrap();
        // Balls along the segment have radius y / 2.
        let q = Quaternion::I * 0.6 + 0.29;
        assert!(seg.classify(&q) == Membership::Inside);
        let q = Quaternion::I * 0.6 + 0.45;
        assert!(seg.classify(&q) == Membership::Outside);
    }

    #[test]
    fn symmetric_sphere_is_one_cap() {
        let caps = SphereCaps::compute(&DomainSpec::whole(), 0.0, 1.0, 10.0);
        assert_eq!(caps.count, 1);
        let (j, k) = caps.far_pair(0, &ImaginaryUnit::I).unwrap();
        assert!(j.dist(&k) > 1.99);
    }

    #[test]
    fn split_sphere_has_two_caps() {
        // Ball around 2i misses the equator of the unit sphere.
        let dom = DomainSpec::ball(Quaternion::I, 0.5);
        let caps = SphereCaps::compute(&dom, 0.0, 1.0, 2.0);
        assert_eq!(caps.count, 1);
        let r = Restricted {
            base: DomainSpec::whole(),
            keep: |q: &Quaternion| q.x.abs() > 0.2,
            name: "|x| > 0.2".into(),
        };
        let caps = SphereCaps::compute(&DomainSpec::new(r), 0.0, 1.0, 2.0);
        assert_eq!(caps.count, 2);
        assert_ne!(caps.cap_of(&ImaginaryUnit::I), caps.cap_of(&ImaginaryUnit::I.neg()));
    }
}
