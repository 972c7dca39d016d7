//! The little-intervals operad and its actions on geometric string links and
//! on maps `Iⁿ → Conf(C, n)`.
//!
//! Interval text format: `k=<int>: [lo,hi] [lo,hi] ...`, where each endpoint
//! is a decimal literal or a fraction `p/q`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{GeomStringLink, GridMap, Point3, CONDITION_TOL};
use crate::par::Execution;

/// A subinterval `[lo, hi]` of `[0, 1]`, also read as the affine map
/// `t ↦ lo + (hi − lo) t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo < 0.0 || hi > 1.0 {
            return Err(Error::InvalidIntervals(format!(
                "[{lo},{hi}] is not inside [0,1]"
            )));
        }
        if lo >= hi {
            return Err(Error::InvalidIntervals(format!(
                "[{lo},{hi}] is degenerate"
            )));
        }
        Ok(Interval { lo, hi })
    }

    pub fn unit() -> Self {
        Interval { lo: 0.0, hi: 1.0 }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    /// The affine map; exact at `t = 0` and `t = 1`.
    pub fn apply(&self, t: f64) -> f64 {
        if t == 0.0 {
            self.lo
        } else if t == 1.0 {
            self.hi
        } else {
            self.lo + (self.hi - self.lo) * t
        }
    }

    /// Inverse of [`Interval::apply`] on all of ℝ; exact at the endpoints.
    pub fn inverse(&self, x: f64) -> f64 {
        if x == self.lo {
            0.0
        } else if x == self.hi {
            1.0
        } else {
            (x - self.lo) / (self.hi - self.lo)
        }
    }

    /// `self ∘ inner` as an interval.
    pub fn compose(&self, inner: &Interval) -> Interval {
        Interval {
            lo: self.apply(inner.lo),
            hi: self.apply(inner.hi),
        }
    }
}

/// An element of `L(k)`: `k` subintervals with disjoint interiors.
#[derive(Debug, Clone, PartialEq)]
pub struct Intervals(Vec<Interval>);

impl Intervals {
    pub fn new(items: Vec<Interval>) -> Result<Self> {
        let mut sorted = items.clone();
        sorted.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        if let Some(w) = sorted.windows(2).find(|w| w[0].hi > w[1].lo) {
            return Err(Error::InvalidIntervals(format!(
                "[{},{}] and [{},{}] overlap",
                w[0].lo, w[0].hi, w[1].lo, w[1].hi
            )));
        }
        Ok(Intervals(items))
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            pairs
                .iter()
                .map(|&(lo, hi)| Interval::new(lo, hi))
                .collect::<Result<_>>()?,
        )
    }

    pub fn identity() -> Self {
        Intervals(vec![Interval::unit()])
    }

    /// `[0, ½], [½, 1]`: the lower and upper halves.
    pub fn halves() -> Self {
        Intervals(vec![
            Interval { lo: 0.0, hi: 0.5 },
            Interval { lo: 0.5, hi: 1.0 },
        ])
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    pub fn items(&self) -> &[Interval] {
        &self.0
    }

    /// Reorders the intervals by `perm` (`new[a] = old[perm[a]]`).
    pub fn permuted(&self, perm: &[usize]) -> Intervals {
        Intervals(perm.iter().map(|&p| self.0[p]).collect())
    }
}

/// Operad composition: substitutes `inners[m]` into the `m`-th outer interval.
pub fn compose_intervals(outer: &Intervals, inners: &[Intervals]) -> Result<Intervals> {
    if outer.k() != inners.len() {
        return Err(Error::InvalidIntervals(format!(
            "{} outer intervals but {} inner families",
            outer.k(),
            inners.len()
        )));
    }
    Intervals::new(
        outer
            .0
            .iter()
            .zip(inners)
            .flat_map(|(o, fam)| fam.0.iter().map(move |i| o.compose(i)))
            .collect(),
    )
}

/// Parses a decimal literal or a fraction `p/q`.
fn parse_number(s: &str) -> Option<f64> {
    match s.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().ok()?;
            let q: f64 = q.trim().parse().ok()?;
            (q != 0.0).then(|| p / q)
        }
        None => s.trim().parse().ok(),
    }
}

impl FromStr for Intervals {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let syntax = |position: usize, message: &str| Error::Syntax {
            position,
            message: message.to_string(),
        };
        let start = text.len() - text.trim_start().len();
        let rest = &text[start..];
        let body_at = rest
            .find(':')
            .ok_or_else(|| syntax(start, "expected header 'k=<int>:'"))?;
        let k: usize = rest[..body_at]
            .strip_prefix("k=")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| syntax(start, "expected header 'k=<int>:'"))?;
        let mut items = Vec::new();
        let mut pos = start + body_at + 1;
        loop {
            let tail = &text[pos..];
            let trimmed = tail.trim_start();
            if trimmed.is_empty() {
                break;
            }
            let open = pos + tail.len() - trimmed.len();
            if !trimmed.starts_with('[') {
                return Err(syntax(open, "expected '['"));
            }
            let close = trimmed
                .find(']')
                .ok_or_else(|| syntax(open, "missing ']'"))?;
            let inner = &trimmed[1..close];
            let (lo, hi) = inner
                .split_once(',')
                .ok_or_else(|| syntax(open, "expected 'lo,hi'"))?;
            let lo = parse_number(lo).ok_or_else(|| syntax(open, "bad lower endpoint"))?;
            let hi = parse_number(hi).ok_or_else(|| syntax(open, "bad upper endpoint"))?;
            items.push(Interval::new(lo, hi)?);
            pos = open + close + 1;
        }
        if items.len() != k {
            return Err(syntax(
                start,
                &format!("header declares {k} intervals, found {}", items.len()),
            ));
        }
        Intervals::new(items)
    }
}

impl fmt::Display for Intervals {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k={}:", self.0.len())?;
        for i in &self.0 {
            write!(f, " [{},{}]", i.lo, i.hi)?;
        }
        Ok(())
    }
}

/// Action on string links: on `[lo_j, hi_j]` strand `i` is the rescaled
/// strand `i` of link `j`; elsewhere it rests at its basepoint. Built
/// directly on polyline vertices.
pub fn act_on_links(ivs: &Intervals, links: &[GeomStringLink]) -> Result<GeomStringLink> {
    if ivs.k() != links.len() {
        return Err(Error::InvalidIntervals(format!(
            "{} intervals but {} string links",
            ivs.k(),
            links.len()
        )));
    }
    let base: Vec<[f64; 2]> = match links.first() {
        Some(g) => g.basepoints().to_vec(),
        None => {
            return Err(Error::InvalidIntervals(
                "no operands; basepoints unknown".into(),
            ))
        }
    };
    if links.iter().any(|g| g.basepoints() != base.as_slice()) {
        return Err(Error::BasepointMismatch);
    }
    let n = base.len();
    let mut order: Vec<usize> = (0..ivs.k()).collect();
    order.sort_by(|&a, &b| ivs.0[a].lo.total_cmp(&ivs.0[b].lo));

    let mut times = vec![0.0];
    let mut strands: Vec<Vec<[f64; 2]>> = base.iter().map(|&a| vec![a]).collect();
    let mut push = |t: f64, row: &dyn Fn(usize) -> [f64; 2], times: &mut Vec<f64>| {
        if *times.last().unwrap() == t {
            return;
        }
        times.push(t);
        for (i, s) in strands.iter_mut().enumerate() {
            s.push(row(i));
        }
    };
    for j in order {
        let iv = ivs.0[j];
        let g = &links[j];
        push(iv.lo, &|i| base[i], &mut times);
        for (k, &t) in g.times().iter().enumerate() {
            push(iv.apply(t), &|i| g.strand(i)[k], &mut times);
        }
    }
    push(1.0, &|i| base[i], &mut times);
    debug_assert!(strands.iter().all(|s| s.len() == times.len()));
    let _ = n;
    GeomStringLink::new(base, times, strands)
}

/// An evaluable map `Iⁿ → Conf(C, n)`.
pub trait ConfigMap: Send + Sync {
    fn n(&self) -> usize;

    fn basepoints(&self) -> &[[f64; 2]];

    /// Value at `t ∈ Iⁿ`.
    fn eval(&self, t: &[f64]) -> Result<Vec<Point3>>;

    /// Samples the map on the uniform grid of resolution `r`.
    fn sample(&self, r: usize, exec: Execution) -> Result<GridMap> {
        GridMap::from_fn(self.n(), r, self.basepoints().to_vec(), exec, |t| {
            self.eval(t)
        })
    }
}

/// `Conf(σ, n)` restricted to the cube: `(t_1..t_n) ↦ (σ_1(t_1), …, σ_n(t_n))`.
#[derive(Debug, Clone)]
pub struct KappaMap(pub GeomStringLink);

impl ConfigMap for KappaMap {
    fn n(&self) -> usize {
        self.0.n()
    }

    fn basepoints(&self) -> &[[f64; 2]] {
        self.0.basepoints()
    }

    fn eval(&self, t: &[f64]) -> Result<Vec<Point3>> {
        Ok(t.iter()
            .enumerate()
            .map(|(i, &ti)| self.0.position(i, ti.clamp(0.0, 1.0)))
            .collect())
    }
}

/// Grid maps evaluate by multilinear interpolation.
impl ConfigMap for GridMap {
    fn n(&self) -> usize {
        GridMap::n(self)
    }

    fn basepoints(&self) -> &[[f64; 2]] {
        GridMap::basepoints(self)
    }

    fn eval(&self, t: &[f64]) -> Result<Vec<Point3>> {
        Ok(self.interpolate(t))
    }
}

/// `(L_1..L_k) · (f^1..f^k)`, evaluated lazily.
///
/// Stage `j` rescales the height of every configuration point by `L_j⁻¹`;
/// points whose height lands in `[0, 1]` are replaced by the matching
/// component of `f^j` (evaluated at the rescaled heights, clamped to `I`),
/// rescaled back by `L_j`. Points outside are left alone. Stages run in the
/// given order.
#[derive(Clone)]
pub struct IntervalAction {
    intervals: Intervals,
    maps: Vec<Arc<dyn ConfigMap>>,
    basepoints: Vec<[f64; 2]>,
}

pub fn act_on_maps(ivs: &Intervals, maps: Vec<Arc<dyn ConfigMap>>) -> Result<IntervalAction> {
    if ivs.k() != maps.len() {
        return Err(Error::InvalidIntervals(format!(
            "{} intervals but {} maps",
            ivs.k(),
            maps.len()
        )));
    }
    let basepoints = maps
        .first()
        .map(|m| m.basepoints().to_vec())
        .ok_or_else(|| Error::InvalidIntervals("no operands; basepoints unknown".into()))?;
    if maps.iter().any(|m| m.basepoints() != basepoints.as_slice()) {
        return Err(Error::BasepointMismatch);
    }
    Ok(IntervalAction {
        intervals: ivs.clone(),
        maps,
        basepoints,
    })
}

impl ConfigMap for IntervalAction {
    fn n(&self) -> usize {
        self.basepoints.len()
    }

    fn basepoints(&self) -> &[[f64; 2]] {
        &self.basepoints
    }

    fn eval(&self, t: &[f64]) -> Result<Vec<Point3>> {
        let a = &self.basepoints;
        let mut x: Vec<Point3> = t
            .iter()
            .zip(a)
            .map(|(&ti, ai)| [ai[0], ai[1], ti])
            .collect();
        for (stage, (iv, f)) in self.intervals.0.iter().zip(&self.maps).enumerate() {
            let mut s: Vec<f64> = x.iter().map(|p| iv.inverse(p[2])).collect();
            for (i, si) in s.iter_mut().enumerate() {
                for edge in [0.0, 1.0] {
                    if (*si - edge).abs() <= CONDITION_TOL {
                        *si = edge;
                        let p = x[i];
                        if (p[0] - a[i][0]).abs() > CONDITION_TOL
                            || (p[1] - a[i][1]).abs() > CONDITION_TOL
                        {
                            return Err(Error::IllFormedInput {
                                stage: stage + 1,
                                component: i + 1,
                            });
                        }
                    }
                }
            }
            let active: Vec<usize> = (0..s.len())
                .filter(|&i| (0.0..=1.0).contains(&s[i]))
                .collect();
            if active.is_empty() {
                continue;
            }
            let clamped: Vec<f64> = s.iter().map(|v| v.clamp(0.0, 1.0)).collect();
            let y = f.eval(&clamped)?;
            for i in active {
                x[i] = [y[i][0], y[i][1], iv.apply(y[i][2])];
            }
        }
        Ok(x)
    }
}

/// The product of two maps by halving every axis: on the subcube addressed
/// by `z ∈ {l, u}ⁿ`, component `i` is `l ∘ f_i ∘ z⁻¹` when `t_i ≤ ½` and
/// `u ∘ g_i ∘ z⁻¹` otherwise.
#[derive(Clone)]
pub struct MapProduct {
    pub f: Arc<dyn ConfigMap>,
    pub g: Arc<dyn ConfigMap>,
}

impl ConfigMap for MapProduct {
    fn n(&self) -> usize {
        self.f.n()
    }

    fn basepoints(&self) -> &[[f64; 2]] {
        self.f.basepoints()
    }

    fn eval(&self, t: &[f64]) -> Result<Vec<Point3>> {
        let lower = |v: f64| v <= 0.5;
        let rescaled: Vec<f64> = t
            .iter()
            .map(|&v| if lower(v) { 2.0 * v } else { 2.0 * v - 1.0 })
            .collect();
        let fv = self.f.eval(&rescaled)?;
        let gv = self.g.eval(&rescaled)?;
        Ok(t.iter()
            .enumerate()
            .map(|(i, &v)| {
                if lower(v) {
                    [fv[i][0], fv[i][1], 0.5 * fv[i][2]]
                } else {
                    [gv[i][0], gv[i][1], 0.5 * gv[i][2] + 0.5]
                }
            })
            .collect())
    }
}
