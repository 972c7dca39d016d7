//! Polyline string links in the cylinder `C = D² × [0,1]`, grid-sampled maps
//! `Iⁿ → Conf(C, n)`, the bending of `C` into a solid torus, and Gauss
//! linking numbers of closed polyline links.
//!
//! A point of `C` is stored as `[x, y, t]`. Every strand of a
//! [`GeomStringLink`] is sampled at the same strictly increasing times, and
//! the `t` coordinate of a strand at parameter `s` is `s` itself.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::braid::{BraidLetter, BraidWord};
use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::stringlink::StringLink;
use crate::Sign;

pub type Point3 = [f64; 3];

/// Bending radius of the solid torus.
pub const DEFAULT_RADIUS: f64 = 2.0;
/// Height of the vertical collars at the top and bottom of every strand.
pub const VERTICAL_COLLAR: f64 = 0.05;
pub const DEFAULT_RESOLUTION: usize = 8;
/// Largest number of grid points a sampled map may have.
pub const GRID_CAP: usize = 1_000_000;
pub const MAX_SAMPLED_STRANDS: usize = 6;
/// Tolerance for the endpoint, periodicity and basepoint comparisons.
pub const CONDITION_TOL: f64 = 1e-12;
/// Below this inter-component distance a Gauss linking sum is flagged.
pub const ILL_CONDITIONED_DISTANCE: f64 = 1e-4;
/// Sample times of [`realize`] are multiples of `1 / DYADIC_SCALE`.
pub const DYADIC_SCALE: f64 = (1u64 << 32) as f64;

/// Orientation of the over-strand in a positive crossing: for `σ_k` the
/// strand entering from the left passes at `y = LIFT_SIGN · h`. Chosen so
/// that the closure of `σ_1²` has linking number `+1`.
const LIFT_SIGN: f64 = 1.0;

/// Marked points on the horizontal diameter, `x_i = −1 + 2i/(n+1)`.
pub fn basepoints(n: usize) -> Vec<[f64; 2]> {
    (1..=n)
        .map(|i| [-1.0 + 2.0 * i as f64 / (n as f64 + 1.0), 0.0])
        .collect()
}

fn sub(a: Point3, b: Point3) -> Point3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: Point3, b: Point3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: Point3, b: Point3) -> Point3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm(a: Point3) -> f64 {
    dot(a, a).sqrt()
}

fn dist(a: Point3, b: Point3) -> f64 {
    norm(sub(a, b))
}

fn lerp2(a: [f64; 2], b: [f64; 2], s: f64) -> [f64; 2] {
    [a[0] + (b[0] - a[0]) * s, a[1] + (b[1] - a[1]) * s]
}

/// Minimum over `s ∈ [0,1]` of `|d0 + (d1 − d0) s|`.
fn min_norm_on_segment(d0: [f64; 2], d1: [f64; 2]) -> f64 {
    let e = [d1[0] - d0[0], d1[1] - d0[1]];
    let ee = e[0] * e[0] + e[1] * e[1];
    let s = if ee > 0.0 {
        (-(d0[0] * e[0] + d0[1] * e[1]) / ee).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let p = lerp2(d0, d1, s);
    (p[0] * p[0] + p[1] * p[1]).sqrt()
}

/// A string link made of polylines with shared sample times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeomStringLink {
    basepoints: Vec<[f64; 2]>,
    times: Vec<f64>,
    /// `strands[i][k]` is the disk position of strand `i` at `times[k]`.
    strands: Vec<Vec<[f64; 2]>>,
}

/// Knobs for [`realize`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealizeParams {
    /// Samples per crossing slab.
    pub samples_per_letter: usize,
    /// Height of the crossing arcs as a fraction of the basepoint spacing.
    pub lift: f64,
    /// Required minimum distance between strands at equal heights.
    pub min_separation: f64,
    /// Also sample at every `j / r`, so that grids of this resolution hit
    /// polyline vertices exactly.
    pub align_resolution: Option<usize>,
}

impl Default for RealizeParams {
    fn default() -> Self {
        RealizeParams {
            samples_per_letter: 8,
            lift: 0.3,
            min_separation: 1e-3,
            align_resolution: Some(DEFAULT_RESOLUTION),
        }
    }
}

impl GeomStringLink {
    /// Validates the endpoint and support conditions and disjointness.
    pub fn new(
        basepoints: Vec<[f64; 2]>,
        times: Vec<f64>,
        strands: Vec<Vec<[f64; 2]>>,
    ) -> Result<Self> {
        let g = GeomStringLink {
            basepoints,
            times,
            strands,
        };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidGeometry(m.to_string()));
        let n = self.basepoints.len();
        if n == 0 || self.strands.len() != n {
            return bad("strand count does not match basepoints");
        }
        if self.times.len() < 2 || self.times[0] != 0.0 || *self.times.last().unwrap() != 1.0 {
            return bad("sample times must run from 0 to 1");
        }
        if self.times.windows(2).any(|w| w[0] >= w[1]) {
            return bad("sample times must be strictly increasing");
        }
        let last = self.times.len() - 1;
        for (i, s) in self.strands.iter().enumerate() {
            if s.len() != self.times.len() {
                return bad("strand sample count differs from the time grid");
            }
            let a = self.basepoints[i];
            let off = |p: [f64; 2]| {
                (p[0] - a[0]).abs() > CONDITION_TOL || (p[1] - a[1]).abs() > CONDITION_TOL
            };
            if off(s[0]) || off(s[last]) {
                return bad("strand does not start and end at its basepoint");
            }
            if s.iter().any(|p| p[0] * p[0] + p[1] * p[1] >= 1.0) {
                return bad("strand leaves the open cylinder");
            }
        }
        if self.min_separation() <= 0.0 {
            return bad("strands intersect");
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.basepoints.len()
    }

    pub fn basepoints(&self) -> &[[f64; 2]] {
        &self.basepoints
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Disk positions of strand `i` (0-based) at the shared times.
    pub fn strand(&self, i: usize) -> &[[f64; 2]] {
        &self.strands[i]
    }

    /// Vertices of strand `i` (0-based) as `[x, y, t]`.
    pub fn vertices(&self, i: usize) -> Vec<Point3> {
        self.strands[i]
            .iter()
            .zip(&self.times)
            .map(|(p, &t)| [p[0], p[1], t])
            .collect()
    }

    /// Position of strand `i` (0-based) at parameter `t ∈ [0,1]`; exact at
    /// sample times.
    pub fn position(&self, i: usize, t: f64) -> Point3 {
        let s = &self.strands[i];
        let idx = self.times.partition_point(|&x| x <= t);
        if idx > 0 && self.times[idx - 1] == t {
            let p = s[idx - 1];
            return [p[0], p[1], t];
        }
        let k = idx.clamp(1, self.times.len() - 1) - 1;
        let (t0, t1) = (self.times[k], self.times[k + 1]);
        let p = lerp2(s[k], s[k + 1], (t - t0) / (t1 - t0));
        [p[0], p[1], t]
    }

    /// Minimum distance between two strands at equal heights, taken over
    /// the whole piecewise-linear motion.
    pub fn min_separation(&self) -> f64 {
        let n = self.n();
        let mut best = f64::INFINITY;
        for k in 0..self.times.len() - 1 {
            for a in 0..n {
                for b in a + 1..n {
                    let d = |q: usize| {
                        [
                            self.strands[a][q][0] - self.strands[b][q][0],
                            self.strands[a][q][1] - self.strands[b][q][1],
                        ]
                    };
                    best = best.min(min_norm_on_segment(d(k), d(k + 1)));
                }
            }
        }
        best
    }

    /// Drops samples at which every strand sits still in the disk, keeping
    /// the endpoints. Geometry is unchanged.
    pub fn simplified(&self) -> GeomStringLink {
        let m = self.times.len();
        let keep: Vec<usize> = (0..m)
            .filter(|&k| {
                k == 0
                    || k == m - 1
                    || !self
                        .strands
                        .iter()
                        .all(|s| s[k - 1] == s[k] && s[k] == s[k + 1])
            })
            .collect();
        GeomStringLink {
            basepoints: self.basepoints.clone(),
            times: keep.iter().map(|&k| self.times[k]).collect(),
            strands: self
                .strands
                .iter()
                .map(|s| keep.iter().map(|&k| s[k]).collect())
                .collect(),
        }
    }

    /// Adds samples at the given times (interpolated, so the geometry is
    /// unchanged).
    pub fn with_samples(&self, extra: &[f64]) -> GeomStringLink {
        let mut times = self.times.clone();
        for &t in extra {
            if (0.0..=1.0).contains(&t) && !times.contains(&t) {
                times.push(t);
            }
        }
        times.sort_by(f64::total_cmp);
        let strands = (0..self.n())
            .map(|i| {
                times
                    .iter()
                    .map(|&t| {
                        let p = self.position(i, t);
                        [p[0], p[1]]
                    })
                    .collect()
            })
            .collect();
        GeomStringLink {
            basepoints: self.basepoints.clone(),
            times,
            strands,
        }
    }

    /// Reads a braid word off the projection to the `(x, t)` plane: each
    /// change in the `x` order of two strands is a crossing, signed by which
    /// strand is in front (`y`).
    pub fn read_braid(&self) -> Result<BraidWord> {
        let n = self.n();
        let m = self.times.len();
        let degenerate =
            |msg: &str| Error::InvalidGeometry(format!("projection is degenerate: {msg}"));
        // (time, left strand, right strand, y_left − y_right)
        let mut events: Vec<(f64, usize, usize, f64)> = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                let dx = |k: usize| self.strands[a][k][0] - self.strands[b][k][0];
                let dy = |k: usize| self.strands[a][k][1] - self.strands[b][k][1];
                if dx(0) == 0.0 {
                    return Err(degenerate("basepoints share an x coordinate"));
                }
                let mut last = 0usize;
                for q in 1..m {
                    let d = dx(q);
                    if d == 0.0 {
                        continue;
                    }
                    if d.signum() != dx(last).signum() {
                        let (time, y) = if q == last + 1 {
                            let s = dx(last) / (dx(last) - d);
                            let t = self.times[last] + (self.times[q] - self.times[last]) * s;
                            (t, dy(last) + (dy(q) - dy(last)) * s)
                        } else {
                            (self.times[last + 1], dy(last + 1))
                        };
                        let (left, right, y) = if dx(last) < 0.0 {
                            (a, b, y)
                        } else {
                            (b, a, -y)
                        };
                        events.push((time, left, right, y));
                    }
                    last = q;
                }
            }
        }
        events.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| self.strands[a][0][0].total_cmp(&self.strands[b][0][0]));
        let mut letters = Vec::with_capacity(events.len());
        for (_, left, right, y) in events {
            let p = order.iter().position(|&s| s == left).unwrap();
            if order.get(p + 1) != Some(&right) {
                return Err(degenerate("crossing between non-adjacent strands"));
            }
            if y == 0.0 {
                return Err(degenerate("strands meet in the projection"));
            }
            let sign = if y * LIFT_SIGN > 0.0 {
                Sign::Pos
            } else {
                Sign::Neg
            };
            letters.push(BraidLetter::new(p + 1, sign));
            order.swap(p, p + 1);
        }
        BraidWord::new(n, letters)
    }
}

/// Builds the standard geometric braid for `σ`: strands rest at their
/// basepoints, and each letter `σ_k^±` occupies one slab in which the
/// strands at positions `k`, `k+1` trade places along half-ellipses passing
/// in front of / behind each other.
pub fn realize(sigma: &StringLink, params: &RealizeParams) -> Result<GeomStringLink> {
    let word = sigma.rep();
    let n = word.strands();
    let a = basepoints(n);
    let s = params.samples_per_letter;
    if s < 2 {
        return Err(Error::Refinement {
            found: 0.0,
            required: params.min_separation,
        });
    }
    let spacing = 2.0 / (n as f64 + 1.0);
    let h = params.lift * spacing;
    let letters = word.letters();
    let slab = (1.0 - 2.0 * VERTICAL_COLLAR) / letters.len().max(1) as f64;

    let mut times = vec![0.0, VERTICAL_COLLAR];
    let mut strands: Vec<Vec<[f64; 2]>> = a.iter().map(|&p| vec![p, p]).collect();
    // holder[p] = strand currently at position p (0-based)
    let mut holder: Vec<usize> = (0..n).collect();
    for (j, l) in letters.iter().enumerate() {
        let t0 = VERTICAL_COLLAR + slab * j as f64;
        let (lp, rp) = (l.pos - 1, l.pos);
        let (left, right) = (holder[lp], holder[rp]);
        let y_amp = LIFT_SIGN * l.sign.value() as f64 * h;
        for q in 1..=s {
            let u = q as f64 / s as f64;
            times.push(if q == s {
                VERTICAL_COLLAR + slab * (j + 1) as f64
            } else {
                t0 + slab * u
            });
            let bump = (PI * u).sin() * y_amp;
            for (idx, st) in strands.iter_mut().enumerate() {
                let prev = *st.last().unwrap();
                let next = if idx == left {
                    [a[lp][0] + (a[rp][0] - a[lp][0]) * u, bump]
                } else if idx == right {
                    [a[rp][0] + (a[lp][0] - a[rp][0]) * u, -bump]
                } else {
                    prev
                };
                st.push(next);
            }
        }
        // Snap the end of the slab exactly onto the basepoints.
        strands[left].last_mut().unwrap().clone_from(&a[rp]);
        strands[right].last_mut().unwrap().clone_from(&a[lp]);
        holder.swap(lp, rp);
    }
    if letters.is_empty() {
        times.push(1.0 - VERTICAL_COLLAR);
        strands
            .iter_mut()
            .for_each(|st| st.push(*st.last().unwrap()));
    } else {
        *times.last_mut().unwrap() = 1.0 - VERTICAL_COLLAR;
    }
    times.push(1.0);
    strands
        .iter_mut()
        .for_each(|st| st.push(*st.last().unwrap()));
    // Dyadic times stay exact under rescaling by dyadic intervals.
    for t in &mut times {
        *t = (*t * DYADIC_SCALE).round() / DYADIC_SCALE;
    }

    let mut g = GeomStringLink {
        basepoints: a,
        times,
        strands,
    };
    if let Some(r) = params.align_resolution.filter(|&r| r > 0) {
        let ticks: Vec<f64> = (0..=r).map(|j| j as f64 / r as f64).collect();
        g = g.with_samples(&ticks);
    }
    let sep = g.min_separation();
    if sep < params.min_separation {
        return Err(Error::Refinement {
            found: sep,
            required: params.min_separation,
        });
    }
    g.validate()?;
    Ok(g)
}

/// A map `Iⁿ → Conf(C, n)` sampled on the uniform grid with `resolution + 1`
/// points per axis. Axis 0 varies fastest in the flat layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMap {
    n: usize,
    resolution: usize,
    basepoints: Vec<[f64; 2]>,
    /// `values[flat * n + i]` is configuration point `i` at grid point `flat`.
    values: Vec<Point3>,
}

/// Grid coordinate `j / r`.
pub fn grid_time(j: usize, r: usize) -> f64 {
    j as f64 / r as f64
}

fn check_grid(n: usize, r: usize) -> Result<usize> {
    if r == 0 {
        return Err(Error::InvalidGeometry("resolution must be positive".into()));
    }
    if n > MAX_SAMPLED_STRANDS {
        return Err(Error::GridTooLarge {
            points: usize::MAX,
            cap: GRID_CAP,
        });
    }
    let points = (r + 1)
        .checked_pow(n as u32)
        .filter(|&p| p <= GRID_CAP)
        .ok_or(Error::GridTooLarge {
            points: (r + 1).saturating_pow(n as u32),
            cap: GRID_CAP,
        })?;
    Ok(points)
}

fn distinct_configuration(points: &[Point3]) -> bool {
    points
        .iter()
        .enumerate()
        .all(|(a, p)| points[a + 1..].iter().all(|q| dist(*p, *q) > CONDITION_TOL))
}

impl GridMap {
    /// Samples `f` at every grid point.
    pub fn from_fn<F>(
        n: usize,
        resolution: usize,
        basepoints: Vec<[f64; 2]>,
        exec: Execution,
        f: F,
    ) -> Result<GridMap>
    where
        F: Fn(&[f64]) -> Result<Vec<Point3>> + Sync + Send,
    {
        let points = check_grid(n, resolution)?;
        let rows = par::try_map_range(points, exec, |flat| {
            let coords = grid_coords(flat, n, resolution);
            let t: Vec<f64> = coords.iter().map(|&j| grid_time(j, resolution)).collect();
            let v = f(&t)?;
            if !distinct_configuration(&v) {
                return Err(Error::DegenerateConfiguration { grid: coords });
            }
            Ok(v)
        })?;
        Ok(GridMap {
            n,
            resolution,
            basepoints,
            values: rows.into_iter().flatten().collect(),
        })
    }

    /// Builds a grid map from raw values without checks.
    pub fn from_values(
        n: usize,
        resolution: usize,
        basepoints: Vec<[f64; 2]>,
        values: Vec<Point3>,
    ) -> Result<GridMap> {
        let points = check_grid(n, resolution)?;
        if values.len() != points * n || basepoints.len() != n {
            return Err(Error::InvalidGeometry("grid value count mismatch".into()));
        }
        Ok(GridMap {
            n,
            resolution,
            basepoints,
            values,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn basepoints(&self) -> &[[f64; 2]] {
        &self.basepoints
    }

    pub fn num_points(&self) -> usize {
        self.values.len() / self.n
    }

    /// Configuration at a flat grid index.
    pub fn config(&self, flat: usize) -> &[Point3] {
        &self.values[flat * self.n..(flat + 1) * self.n]
    }

    pub fn config_mut(&mut self, flat: usize) -> &mut [Point3] {
        &mut self.values[flat * self.n..(flat + 1) * self.n]
    }

    pub fn coords(&self, flat: usize) -> Vec<usize> {
        grid_coords(flat, self.n, self.resolution)
    }

    pub fn flat_index(&self, coords: &[usize]) -> usize {
        coords
            .iter()
            .rev()
            .fold(0, |acc, &c| acc * (self.resolution + 1) + c)
    }

    /// Multilinear interpolation, one axis at a time.
    pub fn interpolate(&self, t: &[f64]) -> Vec<Point3> {
        let r = self.resolution;
        let mut lo = Vec::with_capacity(self.n);
        let mut frac = Vec::with_capacity(self.n);
        for &ti in t {
            let mut u = ti.clamp(0.0, 1.0) * r as f64;
            if (u - u.round()).abs() < 1e-12 {
                u = u.round();
            }
            let j = (u.floor() as usize).min(r.saturating_sub(1));
            lo.push(j);
            frac.push(u - j as f64);
        }
        // Collapse axes from the last to the first.
        let mut corners: Vec<Vec<Point3>> = (0..1usize << self.n)
            .map(|mask| {
                let coords: Vec<usize> = (0..self.n)
                    .map(|a| (lo[a] + ((mask >> a) & 1)).min(r))
                    .collect();
                self.config(self.flat_index(&coords)).to_vec()
            })
            .collect();
        for axis in (0..self.n).rev() {
            let half = corners.len() / 2;
            let s = frac[axis];
            let (low, high) = corners.split_at(half);
            corners = low
                .iter()
                .zip(high)
                .map(|(p, q)| {
                    if s == 0.0 {
                        return p.clone();
                    }
                    p.iter()
                        .zip(q)
                        .map(|(a, b)| {
                            [
                                a[0] + (b[0] - a[0]) * s,
                                a[1] + (b[1] - a[1]) * s,
                                a[2] + (b[2] - a[2]) * s,
                            ]
                        })
                        .collect()
                })
                .collect();
        }
        corners.pop().unwrap()
    }
}

pub fn grid_coords(mut flat: usize, n: usize, r: usize) -> Vec<usize> {
    (0..n)
        .map(|_| {
            let c = flat % (r + 1);
            flat /= r + 1;
            c
        })
        .collect()
}

/// Samples `f(t_1..t_n) = (σ_1(t_1), …, σ_n(t_n))` on the grid.
pub fn kappa_sample(g: &GeomStringLink, r: usize, exec: Execution) -> Result<GridMap> {
    let n = g.n();
    check_grid(n, r)?;
    let columns: Vec<Vec<Point3>> = (0..n)
        .map(|i| (0..=r).map(|j| g.position(i, grid_time(j, r))).collect())
        .collect();
    let points = check_grid(n, r)?;
    let rows = par::try_map_range(points, exec, |flat| {
        let coords = grid_coords(flat, n, r);
        let v: Vec<Point3> = coords
            .iter()
            .enumerate()
            .map(|(i, &j)| columns[i][j])
            .collect();
        if !distinct_configuration(&v) {
            return Err(Error::DegenerateConfiguration { grid: coords });
        }
        Ok(v)
    })?;
    Ok(GridMap {
        n,
        resolution: r,
        basepoints: g.basepoints.clone(),
        values: rows.into_iter().flatten().collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    Endpoints,
    Support,
    Periodicity,
}

/// Which conditions [`verify_conditions`] checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Conditions {
    pub endpoints: bool,
    pub support: bool,
    pub periodicity: bool,
}

impl Conditions {
    pub const ALL: Conditions = Conditions {
        endpoints: true,
        support: true,
        periodicity: true,
    };
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub condition: Condition,
    /// Grid coordinates, one per axis.
    pub grid: Vec<usize>,
    /// Offending configuration point (1-based).
    pub component: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub points_checked: usize,
    pub violations: Vec<Violation>,
}

impl ConditionReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, c: Condition) -> usize {
        self.violations.iter().filter(|v| v.condition == c).count()
    }
}

fn close(a: Point3, b: Point3) -> bool {
    (0..3).all(|k| (a[k] - b[k]).abs() <= CONDITION_TOL)
}

/// Checks the endpoint, support and periodicity conditions at grid points.
pub fn verify_conditions(f: &GridMap, which: Conditions, exec: Execution) -> ConditionReport {
    let n = f.n;
    let r = f.resolution;
    let per_point = par::map_range(f.num_points(), exec, |flat| {
        let coords = f.coords(flat);
        let cfg = f.config(flat);
        let mut out = Vec::new();
        let mut flag = |condition, component: usize| {
            out.push(Violation {
                condition,
                grid: coords.clone(),
                component: component + 1,
            })
        };
        if which.endpoints {
            for i in 0..n {
                let a = f.basepoints[i];
                if coords[i] == 0 && !close(cfg[i], [a[0], a[1], 0.0]) {
                    flag(Condition::Endpoints, i);
                }
                if coords[i] == r && !close(cfg[i], [a[0], a[1], 1.0]) {
                    flag(Condition::Endpoints, i);
                }
            }
        }
        if which.support && coords.iter().all(|&c| c > 0 && c < r) {
            for (i, p) in cfg.iter().enumerate() {
                let inside = p[0] * p[0] + p[1] * p[1] < 1.0 && p[2] > 0.0 && p[2] < 1.0;
                let apart = cfg
                    .iter()
                    .enumerate()
                    .all(|(k, q)| k == i || dist(*p, *q) > CONDITION_TOL);
                if !inside || !apart {
                    flag(Condition::Support, i);
                }
            }
        }
        if which.periodicity {
            for i in 0..n {
                if coords[i] != 0 {
                    continue;
                }
                let mut opposite = coords.clone();
                opposite[i] = r;
                let other = f.config(f.flat_index(&opposite));
                for k in (0..n).filter(|&k| k != i) {
                    if !close(cfg[k], other[k]) {
                        flag(Condition::Periodicity, k);
                    }
                }
            }
        }
        out
    });
    ConditionReport {
        points_checked: f.num_points(),
        violations: per_point.into_iter().flatten().collect(),
    }
}

/// The bending `(x, y, t) ↦ ((R + x) cos 2πt, (R + x) sin 2πt, y)`, with `t`
/// taken mod 1 so that the two end disks are identified exactly.
pub fn bend(p: Point3, radius: f64) -> Point3 {
    let t = p[2] - p[2].floor();
    let angle = 2.0 * PI * t;
    let rho = radius + p[0];
    [rho * angle.cos(), rho * angle.sin(), p[1]]
}

fn check_radius(radius: f64) -> Result<()> {
    if radius > 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidTorus(radius))
    }
}

/// A closed polyline with vertex parameters in `[0, 1)`; the closing edge
/// from the last vertex back to the first is implicit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedCurve {
    pub params: Vec<f64>,
    pub points: Vec<Point3>,
}

impl ClosedCurve {
    /// Point at parameter `t` (mod 1); exact at vertex parameters.
    pub fn position(&self, t: f64) -> Point3 {
        let t = t - t.floor();
        let m = self.params.len();
        let idx = self.params.partition_point(|&x| x <= t);
        let k = idx.max(1) - 1;
        if self.params[k] == t {
            return self.points[k];
        }
        let (t0, t1, q) = if k + 1 < m {
            (self.params[k], self.params[k + 1], self.points[k + 1])
        } else {
            (self.params[k], 1.0, self.points[0])
        };
        let s = (t - t0) / (t1 - t0);
        let p = self.points[k];
        [
            p[0] + (q[0] - p[0]) * s,
            p[1] + (q[1] - p[1]) * s,
            p[2] + (q[2] - p[2]) * s,
        ]
    }

    /// Edges as `(start, end)` pairs, including the closing edge.
    pub fn segments(&self) -> Vec<(Point3, Point3)> {
        let m = self.points.len();
        (0..m)
            .map(|k| (self.points[k], self.points[(k + 1) % m]))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedLink {
    pub components: Vec<ClosedCurve>,
}

impl ClosedLink {
    pub fn n(&self) -> usize {
        self.components.len()
    }

    /// Minimum distance between components `i` and `j` (0-based).
    pub fn min_distance(&self, i: usize, j: usize) -> f64 {
        let si = self.components[i].segments();
        let sj = self.components[j].segments();
        si.iter()
            .flat_map(|a| sj.iter().map(move |b| segment_distance(*a, *b)))
            .fold(f64::INFINITY, f64::min)
    }

    /// Minimum distance over all pairs of components.
    pub fn min_pairwise_distance(&self) -> f64 {
        let n = self.n();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| self.min_distance(i, j))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Closest distance between segments `p0p1` and `q0q1`.
fn segment_distance((p0, p1): (Point3, Point3), (q0, q1): (Point3, Point3)) -> f64 {
    let d1 = sub(p1, p0);
    let d2 = sub(q1, q0);
    let r = sub(p0, q0);
    let a = dot(d1, d1);
    let e = dot(d2, d2);
    let f = dot(d2, r);
    let (s, t);
    if a <= f64::EPSILON && e <= f64::EPSILON {
        return norm(r);
    }
    if a <= f64::EPSILON {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = dot(d1, r);
        if e <= f64::EPSILON {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = dot(d1, d2);
            let denom = a * e - b * b;
            let mut s0 = if denom > 0.0 {
                ((b * f - c * e) / denom).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let mut t0 = (b * s0 + f) / e;
            if t0 < 0.0 {
                t0 = 0.0;
                s0 = (-c / a).clamp(0.0, 1.0);
            } else if t0 > 1.0 {
                t0 = 1.0;
                s0 = ((b - c) / a).clamp(0.0, 1.0);
            }
            s = s0;
            t = t0;
        }
    }
    let cp = [p0[0] + d1[0] * s, p0[1] + d1[1] * s, p0[2] + d1[2] * s];
    let cq = [q0[0] + d2[0] * t, q0[1] + d2[1] * t, q0[2] + d2[2] * t];
    dist(cp, cq)
}

/// Bends every strand into a closed curve in the solid torus of core radius
/// `radius`. A strand with `m + 1` samples becomes a closed polyline with `m`
/// vertices, its two ends being identified.
pub fn closure_b(g: &GeomStringLink, radius: f64) -> Result<ClosedLink> {
    check_radius(radius)?;
    let m = g.times.len() - 1;
    let components = (0..g.n())
        .map(|i| ClosedCurve {
            params: g.times[..m].to_vec(),
            points: g.vertices(i)[..m]
                .iter()
                .map(|&p| bend(p, radius))
                .collect(),
        })
        .collect();
    Ok(ClosedLink { components })
}

/// A map `Tⁿ → Conf(ℝ³, n)` sampled on the same grid layout as [`GridMap`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusMap {
    n: usize,
    resolution: usize,
    values: Vec<Point3>,
}

impl TorusMap {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn config(&self, flat: usize) -> &[Point3] {
        &self.values[flat * self.n..(flat + 1) * self.n]
    }

    pub fn num_points(&self) -> usize {
        self.values.len() / self.n
    }

    /// Largest discrepancy between opposite faces `t_i = 0` and `t_i = 1`,
    /// over all components and axes.
    pub fn face_mismatch(&self) -> f64 {
        let (n, r) = (self.n, self.resolution);
        let mut worst: f64 = 0.0;
        for flat in 0..self.num_points() {
            let coords = grid_coords(flat, n, r);
            for i in 0..n {
                if coords[i] != 0 {
                    continue;
                }
                let mut opposite = coords.clone();
                opposite[i] = r;
                let other_flat = opposite.iter().rev().fold(0, |acc, &c| acc * (r + 1) + c);
                for (p, q) in self.config(flat).iter().zip(self.config(other_flat)) {
                    worst = worst.max(dist(*p, *q));
                }
            }
        }
        worst
    }
}

/// Applies the bending pointwise to a sampled map. Requires the endpoint,
/// support and periodicity conditions.
pub fn torus_map(f: &GridMap, radius: f64, exec: Execution) -> Result<TorusMap> {
    check_radius(radius)?;
    let report = verify_conditions(f, Conditions::ALL, exec);
    if !report.passes() {
        return Err(Error::QuotientUndefined {
            violations: report.violations.len(),
        });
    }
    let values = par::map_range(f.values.len(), exec, |k| bend(f.values[k], radius));
    Ok(TorusMap {
        n: f.n,
        resolution: f.resolution,
        values,
    })
}

/// Samples `(c_1(t_1), …, c_n(t_n))` for a closed link on the torus grid.
pub fn closed_kappa_sample(link: &ClosedLink, r: usize, exec: Execution) -> Result<TorusMap> {
    let n = link.n();
    let points = check_grid(n, r)?;
    let columns: Vec<Vec<Point3>> = link
        .components
        .iter()
        .map(|c| (0..=r).map(|j| c.position(grid_time(j, r))).collect())
        .collect();
    let rows = par::map_range(points, exec, |flat| {
        grid_coords(flat, n, r)
            .iter()
            .enumerate()
            .map(|(i, &j)| columns[i][j])
            .collect::<Vec<_>>()
    });
    Ok(TorusMap {
        n,
        resolution: r,
        values: rows.into_iter().flatten().collect(),
    })
}

/// Outcome of comparing `b̂ ∘ κ̌` with `κ ∘ b` on a realized string link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquareReport {
    /// Grid points whose every coordinate is a polyline vertex time.
    pub compared: usize,
    pub skipped: usize,
    pub max_deviation: f64,
}

/// Evaluates both routes around the square independently and compares them
/// at the grid points shared with the polyline vertices.
pub fn commuting_square(
    g: &GeomStringLink,
    r: usize,
    radius: f64,
    exec: Execution,
) -> Result<SquareReport> {
    let left = torus_map(&kappa_sample(g, r, exec)?, radius, exec)?;
    let right = closed_kappa_sample(&closure_b(g, radius)?, r, exec)?;
    let shared: Vec<bool> = (0..=r)
        .map(|j| g.times.contains(&grid_time(j, r)))
        .collect();
    let n = g.n();
    let per_point = par::map_range(left.num_points(), exec, |flat| {
        let coords = grid_coords(flat, n, r);
        if !coords.iter().all(|&j| shared[j]) {
            return None;
        }
        Some(
            left.config(flat)
                .iter()
                .zip(right.config(flat))
                .map(|(p, q)| dist(*p, *q))
                .fold(0.0, f64::max),
        )
    });
    let compared = per_point.iter().flatten().count();
    Ok(SquareReport {
        compared,
        skipped: per_point.len() - compared,
        max_deviation: per_point.into_iter().flatten().fold(0.0, f64::max),
    })
}

/// Gauss linking number of two components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussLinking {
    pub value: f64,
    pub rounded: i64,
    pub min_distance: f64,
    /// Components come closer than [`ILL_CONDITIONED_DISTANCE`].
    pub ill_conditioned: bool,
}

/// Exact linking contribution of two straight segments: the solid angle
/// they subtend in the Gauss map, divided by `4π`.
pub fn segment_pair_linking(a0: Point3, a1: Point3, b0: Point3, b1: Point3) -> f64 {
    let r13 = sub(b0, a0);
    let r14 = sub(b1, a0);
    let r23 = sub(b0, a1);
    let r24 = sub(b1, a1);
    let unit = |v: Point3| {
        let l = norm(v);
        (l > 1e-300).then(|| [v[0] / l, v[1] / l, v[2] / l])
    };
    let faces = [
        unit(cross(r13, r14)),
        unit(cross(r14, r24)),
        unit(cross(r24, r23)),
        unit(cross(r23, r13)),
    ];
    let [Some(n1), Some(n2), Some(n3), Some(n4)] = faces else {
        return 0.0;
    };
    let asin = |x: f64| x.clamp(-1.0, 1.0).asin();
    let omega = asin(dot(n1, n2)) + asin(dot(n2, n3)) + asin(dot(n3, n4)) + asin(dot(n4, n1));
    let orient = dot(cross(sub(b1, b0), sub(a1, a0)), r13);
    if orient == 0.0 {
        return 0.0;
    }
    omega.copysign(orient) / (4.0 * PI)
}

/// Linking number of components `i` and `j` (1-based) of a closed link.
pub fn gauss_linking(
    link: &ClosedLink,
    i: usize,
    j: usize,
    exec: Execution,
) -> Result<GaussLinking> {
    let n = link.n();
    for idx in [i, j] {
        if idx == 0 || idx > n {
            return Err(Error::IndexOutOfRange { index: idx, max: n });
        }
    }
    if i == j {
        return Err(Error::InvalidMultiIndex {
            indices: vec![i, j],
        });
    }
    let si = link.components[i - 1].segments();
    let sj = link.components[j - 1].segments();
    let m = sj.len();
    let value = par::sum_range(si.len() * m, exec, |k| {
        let (a, b) = (si[k / m], sj[k % m]);
        segment_pair_linking(a.0, a.1, b.0, b.1)
    });
    let min_distance = link.min_distance(i - 1, j - 1);
    Ok(GaussLinking {
        value,
        rounded: value.round() as i64,
        min_distance,
        ill_conditioned: min_distance < ILL_CONDITIONED_DISTANCE,
    })
}

/// Serializable geometry, mirroring the line-oriented export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryExport {
    pub schema_version: u32,
    pub kind: GeometryKind,
    pub n: usize,
    pub strands: Vec<StrandExport>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometryKind {
    /// Points are `(x, y, t)` in the cylinder.
    StringLink,
    /// Points are `(x, y, z)` in space, with an implicit closing edge.
    ClosedLink,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrandExport {
    pub index: usize,
    pub points: Vec<Point3>,
}

pub const GEOMETRY_SCHEMA_VERSION: u32 = 1;

impl GeometryExport {
    pub fn from_string_link(g: &GeomStringLink) -> Self {
        GeometryExport {
            schema_version: GEOMETRY_SCHEMA_VERSION,
            kind: GeometryKind::StringLink,
            n: g.n(),
            strands: (0..g.n())
                .map(|i| StrandExport {
                    index: i + 1,
                    points: g.vertices(i),
                })
                .collect(),
        }
    }

    pub fn from_closed_link(link: &ClosedLink) -> Self {
        GeometryExport {
            schema_version: GEOMETRY_SCHEMA_VERSION,
            kind: GeometryKind::ClosedLink,
            n: link.n(),
            strands: link
                .components
                .iter()
                .enumerate()
                .map(|(i, c)| StrandExport {
                    index: i + 1,
                    points: c.points.clone(),
                })
                .collect(),
        }
    }

    /// Line-oriented form: a `string_link n=<n>` or `closed_link n=<n>`
    /// header, then for each strand a `strand <index>` line followed by one
    /// whitespace-separated triple per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let head = match self.kind {
            GeometryKind::StringLink => "string_link",
            GeometryKind::ClosedLink => "closed_link",
        };
        out.push_str(&format!("{head} n={}\n", self.n));
        for s in &self.strands {
            out.push_str(&format!("strand {}\n", s.index));
            for p in &s.points {
                out.push_str(&format!("{} {} {}\n", p[0], p[1], p[2]));
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |line: usize, msg: &str| Error::Syntax {
            position: line,
            message: msg.to_string(),
        };
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, head) = lines.next().ok_or_else(|| bad(0, "empty export"))?;
        let mut parts = head.split_whitespace();
        let kind = match parts.next() {
            Some("string_link") => GeometryKind::StringLink,
            Some("closed_link") => GeometryKind::ClosedLink,
            _ => return Err(bad(0, "unknown geometry kind")),
        };
        let n: usize = parts
            .next()
            .and_then(|p| p.strip_prefix("n="))
            .and_then(|p| p.parse().ok())
            .ok_or_else(|| bad(0, "expected n=<int>"))?;
        let mut strands: Vec<StrandExport> = Vec::new();
        for (ln, line) in lines {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields[0] == "strand" {
                let index = fields
                    .get(1)
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| bad(ln, "expected strand index"))?;
                strands.push(StrandExport {
                    index,
                    points: Vec::new(),
                });
                continue;
            }
            let vals: Vec<f64> = fields
                .iter()
                .map(|v| v.parse().map_err(|_| bad(ln, "expected a number")))
                .collect::<Result<_>>()?;
            if vals.len() != 3 {
                return Err(bad(ln, "expected three coordinates"));
            }
            strands
                .last_mut()
                .ok_or_else(|| bad(ln, "point before any strand header"))?
                .points
                .push([vals[0], vals[1], vals[2]]);
        }
        if strands.len() != n {
            return Err(bad(0, "strand count does not match header"));
        }
        Ok(GeometryExport {
            schema_version: GEOMETRY_SCHEMA_VERSION,
            kind,
            n,
            strands,
        })
    }

    /// Rebuilds a string link from an export of kind `string_link`.
    pub fn to_string_link(&self) -> Result<GeomStringLink> {
        if self.kind != GeometryKind::StringLink || self.strands.is_empty() {
            return Err(Error::InvalidGeometry("not a string link export".into()));
        }
        let times: Vec<f64> = self.strands[0].points.iter().map(|p| p[2]).collect();
        let mut strands = Vec::with_capacity(self.n);
        for s in &self.strands {
            if s.points.iter().map(|p| p[2]).ne(times.iter().copied()) {
                return Err(Error::InvalidGeometry(
                    "strands do not share sample times".into(),
                ));
            }
            strands.push(s.points.iter().map(|p| [p[0], p[1]]).collect::<Vec<_>>());
        }
        let basepoints = strands.iter().map(|s| s[0]).collect();
        GeomStringLink::new(basepoints, times, strands)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sl(text: &str) -> StringLink {
        text.parse().unwrap()
    }

    fn circle(center: Point3, u: Point3, v: Point3, radius: f64, m: usize) -> ClosedCurve {
        let points = (0..m)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / m as f64;
                let (c, s) = (a.cos() * radius, a.sin() * radius);
                [
                    center[0] + c * u[0] + s * v[0],
                    center[1] + c * u[1] + s * v[1],
                    center[2] + c * u[2] + s * v[2],
                ]
            })
            .collect();
        ClosedCurve {
            params: (0..m).map(|k| k as f64 / m as f64).collect(),
            points,
        }
    }

    /// Midpoint-rule Gauss double integral, independent of the solid-angle
    /// formula.
    fn gauss_quadrature(a: &ClosedCurve, b: &ClosedCurve, sub: usize) -> f64 {
        let pts = |c: &ClosedCurve| -> Vec<(Point3, Point3)> {
            c.segments()
                .into_iter()
                .flat_map(|(p, q)| {
                    (0..sub).map(move |k| {
                        let s = (k as f64 + 0.5) / sub as f64;
                        let d = [
                            (q[0] - p[0]) / sub as f64,
                            (q[1] - p[1]) / sub as f64,
                            (q[2] - p[2]) / sub as f64,
                        ];
                        (
                            [
                                p[0] + (q[0] - p[0]) * s,
                                p[1] + (q[1] - p[1]) * s,
                                p[2] + (q[2] - p[2]) * s,
                            ],
                            d,
                        )
                    })
                })
                .collect()
        };
        let (pa, pb) = (pts(a), pts(b));
        let mut total = 0.0;
        for (x, dx) in &pa {
            for (y, dy) in &pb {
                let r = sub3(*x, *y);
                let l = norm(r);
                total += dot(r, cross(*dx, *dy)) / (l * l * l);
            }
        }
        total / (4.0 * PI)
    }

    fn sub3(a: Point3, b: Point3) -> Point3 {
        sub(a, b)
    }

    #[test]
    fn basepoint_layout() {
        let a = basepoints(3);
        assert_eq!(a, vec![[-0.5, 0.0], [0.0, 0.0], [0.5, 0.0]]);
    }

    #[test]
    fn hopf_link_solid_angle_matches_quadrature() {
        let c1 = circle([0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], 1.0, 64);
        let c2 = circle([1.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0], 1.0, 64);
        let link = ClosedLink {
            components: vec![c1.clone(), c2.clone()],
        };
        let exact = gauss_linking(&link, 1, 2, Execution::Sequential).unwrap();
        let oracle = gauss_quadrature(&c1, &c2, 8);
        assert!(
            (exact.value - oracle).abs() < 0.02,
            "{} vs {oracle}",
            exact.value
        );
        assert_eq!(exact.rounded.abs(), 1);
        assert!((exact.value - exact.rounded as f64).abs() < 1e-9);
        let swapped = gauss_linking(&link, 2, 1, Execution::Sequential).unwrap();
        assert!((swapped.value - exact.value).abs() < 1e-9);
    }

    #[test]
    fn separated_circles_unlinked() {
        let c1 = circle([0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], 1.0, 40);
        let c2 = circle([5.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], 1.0, 40);
        let link = ClosedLink {
            components: vec![c1, c2],
        };
        let lk = gauss_linking(&link, 1, 2, Execution::Parallel).unwrap();
        assert!(lk.value.abs() < 1e-9);
        assert_eq!(lk.rounded, 0);
        assert!(!lk.ill_conditioned);
        assert!(gauss_linking(&link, 1, 1, Execution::Sequential).is_err());
        assert!(gauss_linking(&link, 1, 3, Execution::Sequential).is_err());
    }

    #[test]
    fn realize_identity() {
        let g = realize(&StringLink::identity(2).unwrap(), &RealizeParams::default()).unwrap();
        let a = basepoints(2);
        for (i, ai) in a.iter().enumerate() {
            assert!(g.strand(i).iter().all(|p| p == ai));
        }
        assert_eq!(g.read_braid().unwrap(), BraidWord::identity(2).unwrap());
    }

    #[test]
    fn realize_reads_back_the_word() {
        for text in [
            "n=2: s1 s1",
            "n=3: A1,3 A2,3^-1 s1 s1",
            "n=4: A1,4^-1 A2,3 s3 s3",
        ] {
            let s = sl(text);
            let g = realize(&s, &RealizeParams::default()).unwrap();
            assert_eq!(&g.read_braid().unwrap(), s.rep());
            let odd = RealizeParams {
                samples_per_letter: 5,
                align_resolution: None,
                ..RealizeParams::default()
            };
            assert_eq!(&realize(&s, &odd).unwrap().read_braid().unwrap(), s.rep());
        }
    }

    #[test]
    fn realize_coarse_is_refinement_error() {
        let p = RealizeParams {
            samples_per_letter: 1,
            ..RealizeParams::default()
        };
        assert!(matches!(
            realize(&sl("n=2: s1 s1"), &p),
            Err(Error::Refinement { .. })
        ));
        let p = RealizeParams {
            min_separation: 10.0,
            ..RealizeParams::default()
        };
        assert!(matches!(
            realize(&sl("n=2: s1 s1"), &p),
            Err(Error::Refinement { .. })
        ));
    }

    #[test]
    fn closure_of_a12_links_once() {
        let g = realize(&sl("n=2: s1 s1"), &RealizeParams::default()).unwrap();
        let link = closure_b(&g, DEFAULT_RADIUS).unwrap();
        assert_eq!(link.components[0].points.len(), g.times().len() - 1);
        let lk = gauss_linking(&link, 1, 2, Execution::Deterministic).unwrap();
        assert_eq!(lk.rounded, 1);
        assert!((lk.value - 1.0).abs() < 0.05);
        let inv = sl("n=2: s1 s1").inverse().power(2);
        let g = realize(&inv, &RealizeParams::default()).unwrap();
        let lk = gauss_linking(&closure_b(&g, 2.0).unwrap(), 1, 2, Execution::Sequential).unwrap();
        assert_eq!(lk.rounded, -2);
    }

    #[test]
    fn closure_of_identity_is_planar_circles() {
        let g = realize(&StringLink::identity(2).unwrap(), &RealizeParams::default()).unwrap();
        let link = closure_b(&g, 2.0).unwrap();
        let a = basepoints(2);
        for (c, ai) in link.components.iter().zip(&a) {
            for p in &c.points {
                let rho = (p[0] * p[0] + p[1] * p[1]).sqrt();
                assert!((rho - (2.0 + ai[0])).abs() < 1e-12);
                assert_eq!(p[2], ai[1]);
            }
        }
        assert!(link.min_pairwise_distance() > 0.0);
        assert!(matches!(closure_b(&g, 1.0), Err(Error::InvalidTorus(_))));
    }

    #[test]
    fn kappa_sample_identity_and_corner() {
        let g = realize(&StringLink::identity(2).unwrap(), &RealizeParams::default()).unwrap();
        let f = kappa_sample(&g, 4, Execution::Sequential).unwrap();
        let a = basepoints(2);
        for flat in 0..f.num_points() {
            let c = f.coords(flat);
            let cfg = f.config(flat);
            for i in 0..2 {
                assert_eq!(cfg[i], [a[i][0], a[i][1], grid_time(c[i], 4)]);
            }
        }
        let report = verify_conditions(&f, Conditions::ALL, Execution::Sequential);
        assert!(report.passes());
        assert_eq!(report.points_checked, 25);
    }

    #[test]
    fn kappa_sample_product_structure() {
        let g = realize(&sl("n=3: A1,3 A2,3"), &RealizeParams::default()).unwrap();
        let f = kappa_sample(&g, 5, Execution::Parallel).unwrap();
        for flat in 0..f.num_points() {
            let c = f.coords(flat);
            for i in 0..3 {
                let mut base = vec![0; 3];
                base[i] = c[i];
                assert_eq!(f.config(flat)[i], f.config(f.flat_index(&base))[i]);
            }
        }
        let corner = f.config(0);
        for (i, p) in corner.iter().enumerate() {
            assert_eq!(*p, [g.basepoints()[i][0], 0.0, 0.0]);
        }
    }

    #[test]
    fn perturbed_corner_is_reported() {
        let g = realize(&sl("n=2: s1 s1"), &RealizeParams::default()).unwrap();
        let mut f = kappa_sample(&g, 4, Execution::Sequential).unwrap();
        f.config_mut(0)[0][0] += 0.01;
        let report = verify_conditions(&f, Conditions::ALL, Execution::Sequential);
        assert!(!report.passes());
        assert!(report
            .violations
            .iter()
            .any(|v| v.condition == Condition::Endpoints
                && v.grid == vec![0, 0]
                && v.component == 1));
        assert!(matches!(
            torus_map(&f, 2.0, Execution::Sequential),
            Err(Error::QuotientUndefined { .. })
        ));
    }

    #[test]
    fn grid_cap_enforced() {
        let g = realize(&StringLink::identity(6).unwrap(), &RealizeParams::default()).unwrap();
        assert!(matches!(
            kappa_sample(&g, 10, Execution::Sequential),
            Err(Error::GridTooLarge { .. })
        ));
    }

    #[test]
    fn torus_faces_agree_exactly() {
        let g = realize(&sl("n=3: A1,2 A2,3^-1"), &RealizeParams::default()).unwrap();
        let f = kappa_sample(&g, 4, Execution::Sequential).unwrap();
        let t = torus_map(&f, 2.0, Execution::Sequential).unwrap();
        assert_eq!(t.face_mismatch(), 0.0);
    }

    #[test]
    fn commuting_square_on_realized_braid() {
        let g = realize(&sl("n=3: A1,3 A2,3 s1 s1"), &RealizeParams::default()).unwrap();
        let rep = commuting_square(&g, 8, 2.0, Execution::Parallel).unwrap();
        assert_eq!(rep.compared, 729);
        assert!(rep.max_deviation <= 1e-12);
    }

    #[test]
    fn interpolation_hits_grid_values() {
        let g = realize(&sl("n=2: s1 s1"), &RealizeParams::default()).unwrap();
        let f = kappa_sample(&g, 8, Execution::Sequential).unwrap();
        for flat in [0, 7, 40, 80] {
            let t: Vec<f64> = f.coords(flat).iter().map(|&j| grid_time(j, 8)).collect();
            assert_eq!(f.interpolate(&t), f.config(flat));
        }
        let mid = f.interpolate(&[1.0 / 16.0, 0.5]);
        let lo = f.config(f.flat_index(&[0, 4]))[0];
        let hi = f.config(f.flat_index(&[1, 4]))[0];
        assert!((mid[0][2] - 0.5 * (lo[2] + hi[2])).abs() < 1e-15);
    }

    #[test]
    fn export_text_round_trip() {
        let g = realize(&sl("n=3: A1,3"), &RealizeParams::default()).unwrap();
        let e = GeometryExport::from_string_link(&g);
        let back = GeometryExport::from_text(&e.to_text()).unwrap();
        assert_eq!(back, e);
        assert_eq!(back.to_string_link().unwrap(), g);
        let closed = GeometryExport::from_closed_link(&closure_b(&g, 2.0).unwrap());
        assert_eq!(
            GeometryExport::from_text(&closed.to_text()).unwrap(),
            closed
        );
        assert!(GeometryExport::from_text("string_link n=2\nstrand 1\n0 0\n").is_err());
    }

    #[test]
    fn simplified_drops_only_static_samples() {
        let id = realize(&StringLink::identity(3).unwrap(), &RealizeParams::default()).unwrap();
        assert_eq!(id.simplified().times(), &[0.0, 1.0]);
        let g = realize(&sl("n=2: s1 s1"), &RealizeParams::default()).unwrap();
        let s = g.simplified();
        for t in [0.0, 0.1, 0.33, 0.5, 0.77, 1.0] {
            for i in 0..2 {
                let (p, q) = (g.position(i, t), s.position(i, t));
                assert!(dist(p, q) < 1e-12);
            }
        }
    }
}
