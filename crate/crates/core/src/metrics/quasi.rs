//! Quasi-hyperbolic distance: length in the conformal metric `|dx| / d(x, boundary)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::connector::{ConnectorGraph, LinkCost};
use super::dijkstra::dijkstra;
use super::lattice::NullLattice;
use super::{DistanceEstimate, EstimateKind, Mesh, Witness};
use crate::domains::DomainOracle;
use crate::error::{Error, Result};
use crate::minkowski::Event;

/// Grid parameters of the quasi-hyperbolic solver.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuasiGrid {
    /// Cells along the longest side of the endpoint box.
    pub k: usize,
    /// Padding of the region of interest as a fraction of the longest side.
    pub pad: f64,
    /// Largest admissible node count; the grid is coarsened to fit.
    pub node_budget: usize,
    /// Relax the grid path as a free polyline afterwards.
    pub smooth: bool,
    /// Vertex count of the relaxed polyline.
    pub resample: usize,
}

impl Default for QuasiGrid {
    fn default() -> Self {
        QuasiGrid {
            k: 64,
            pad: 0.5,
            node_budget: 250_000,
            smooth: true,
            resample: 64,
        }
    }
}

impl QuasiGrid {
    pub fn fingerprint(&self, h: f64) -> String {
        format!("h={h:.3e};pad={};smooth={};resample={}", self.pad, self.smooth, self.resample)
    }
}

// 8-point Gauss-Legendre rule on [0, 1]
const GL_X: [f64; 8] = [
    0.019_855_071_751_231_856,
    0.101_666_761_293_186_63,
    0.237_233_795_041_835_5,
    0.408_282_678_752_175_1,
    0.591_717_321_247_824_9,
    0.762_766_204_958_164_5,
    0.898_333_238_706_813_4,
    0.980_144_928_248_768_1,
];
const GL_W: [f64; 8] = [
    0.050_614_268_145_188_13,
    0.111_190_517_226_687_24,
    0.156_853_322_938_943_64,
    0.181_341_891_689_180_99,
    0.181_341_891_689_180_99,
    0.156_853_322_938_943_64,
    0.111_190_517_226_687_24,
    0.050_614_268_145_188_13,
];

/// `int_0^1 |b - a| / d(a + s (b - a)) ds`, infinite if the segment touches the boundary.
pub(crate) fn segment_length<D: DomainOracle + ?Sized>(omega: &D, a: &[f64], b: &[f64]) -> f64 {
    let len = a.iter().zip(b).map(|(p, q)| (q - p) * (q - p)).sum::<f64>().sqrt();
    if len == 0.0 {
        return 0.0;
    }
    let mut z = Event(a.into());
    let mut acc = 0.0;
    for (x, w) in GL_X.iter().zip(GL_W) {
        for i in 0..a.len() {
            z.0[i] = a[i] + x * (b[i] - a[i]);
        }
        if !omega.contains(&z) {
            return f64::INFINITY;
        }
        let d = omega.distance_to_boundary(&z);
        if d <= 0.0 {
            return f64::INFINITY;
        }
        acc += w / d;
    }
    len * acc
}

fn polyline_length<D: DomainOracle + ?Sized>(omega: &D, pts: &[Vec<f64>]) -> f64 {
    pts.windows(2).map(|w| segment_length(omega, &w[0], &w[1])).sum()
}

/// Points at equal Euclidean arc length along a polyline.
fn resample(pts: &[Vec<f64>], count: usize) -> Vec<Vec<f64>> {
    let mut cum = vec![0.0];
    for w in pts.windows(2) {
        let l = w[0].iter().zip(&w[1]).map(|(a, b)| (b - a) * (b - a)).sum::<f64>().sqrt();
        cum.push(cum.last().unwrap() + l);
    }
    let total = *cum.last().unwrap();
    if total == 0.0 || count < 2 {
        return pts.to_vec();
    }
    let mut out = Vec::with_capacity(count);
    let mut seg = 0usize;
    for i in 0..count {
        let s = total * i as f64 / (count - 1) as f64;
        while seg + 2 < cum.len() && cum[seg + 1] < s {
            seg += 1;
        }
        let span = cum[seg + 1] - cum[seg];
        let f = if span > 0.0 { ((s - cum[seg]) / span).clamp(0.0, 1.0) } else { 0.0 };
        out.push(pts[seg].iter().zip(&pts[seg + 1]).map(|(a, b)| a + f * (b - a)).collect());
    }
    *out.last_mut().unwrap() = pts.last().unwrap().clone();
    out
}

/// Coordinate descent on the interior vertices with a shrinking step.
fn relax<D: DomainOracle + ?Sized>(omega: &D, pts: &mut [Vec<f64>], h: f64) {
    let m = pts.len();
    if m < 3 {
        return;
    }
    let dim = pts[0].len();
    let mut step = h;
    while step > h * 1e-3 {
        let mut sweeps = 0;
        loop {
            let mut improved = false;
            for i in 1..m - 1 {
                let local = |p: &[f64], pts: &[Vec<f64>]| segment_length(omega, &pts[i - 1], p) + segment_length(omega, p, &pts[i + 1]);
                let mut cur = local(&pts[i], pts);
                for c in 0..dim {
                    for s in [step, -step] {
                        let mut p = pts[i].clone();
                        p[c] += s;
                        let v = local(&p, pts);
                        if v < cur - 1e-15 * cur {
                            cur = v;
                            pts[i] = p;
                            improved = true;
                        }
                    }
                }
            }
            sweeps += 1;
            if !improved || sweeps > 200 {
                break;
            }
        }
        step *= 0.5;
    }
}

fn check_pair<D: DomainOracle + ?Sized>(omega: &D, x: &Event, y: &Event) -> Result<()> {
    for p in [x, y] {
        if p.dim() != omega.dim() {
            return Err(Error::DimensionMismatch {
                expected: omega.dim(),
                found: p.dim(),
            });
        }
        if !omega.contains(p) {
            return Err(Error::OutsideDomain);
        }
    }
    Ok(())
}

/// Upper estimate of the quasi-hyperbolic distance.
///
/// Dijkstra on a regular grid with the full `3^(n+1) - 1` stencil, followed
/// by relaxation of the resampled path.
pub fn quasi_hyperbolic_distance<D: DomainOracle + ?Sized>(
    omega: &D,
    x: &Event,
    y: &Event,
    grid: &QuasiGrid,
) -> Result<DistanceEstimate> {
    check_pair(omega, x, y)?;
    if x == y {
        return Ok(DistanceEstimate {
            value: 0.0,
            kind: EstimateKind::Upper,
            mesh: grid.fingerprint(0.0),
            witness: Some(Witness::Polyline(vec![x.clone()])),
        });
    }
    let dim = x.dim() + 1;
    let longest = (0..dim).map(|i| (y[i] - x[i]).abs()).fold(0.0, f64::max);
    let pad = grid.pad * longest;
    let mut lo = vec![0.0; dim];
    let mut hi = vec![0.0; dim];
    for i in 0..dim {
        let mut e = vec![0.0; dim];
        e[i] = 1.0;
        let (inf, sup) = omega.support(&e);
        lo[i] = (x[i].min(y[i]) - pad).max(inf);
        hi[i] = (x[i].max(y[i]) + pad).min(sup);
    }
    let mut h = longest / grid.k.max(1) as f64;
    // coarsen until the grid fits the budget
    let counts_for = |h: f64, lo: &[f64], hi: &[f64]| -> Vec<usize> {
        (0..dim)
            .map(|i| ((x[i] - lo[i]) / h).floor() as usize + ((hi[i] - x[i]) / h).floor() as usize + 1)
            .collect()
    };
    let mut counts = counts_for(h, &lo, &hi);
    while counts.iter().product::<usize>() > grid.node_budget {
        h *= 1.25;
        counts = counts_for(h, &lo, &hi);
    }
    // align the grid so that x is a node
    let origin: Vec<f64> = (0..dim).map(|i| x[i] - ((x[i] - lo[i]) / h).floor() * h).collect();
    let total: usize = counts.iter().product();
    let strides: Vec<usize> = (0..dim).map(|i| counts[i + 1..].iter().product()).collect();
    let point = |k: usize| -> Vec<f64> { (0..dim).map(|i| origin[i] + ((k / strides[i]) % counts[i]) as f64 * h).collect() };
    let inv_d: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|k| {
            let p = Event(point(k).into());
            if omega.contains(&p) {
                let d = omega.distance_to_boundary(&p);
                if d > 0.0 {
                    return 1.0 / d;
                }
            }
            f64::INFINITY
        })
        .collect();
    let offsets: Vec<Vec<i64>> = (0..3usize.pow(dim as u32))
        .map(|mut k| {
            (0..dim)
                .map(|_| {
                    let d = (k % 3) as i64 - 1;
                    k /= 3;
                    d
                })
                .collect::<Vec<i64>>()
        })
        .filter(|o| o.iter().find(|&&d| d != 0).is_some_and(|&d| d > 0))
        .collect();
    let mut edges: Vec<(u32, u32, f64)> = Vec::new();
    for k in 0..total {
        if !inv_d[k].is_finite() {
            continue;
        }
        let c: Vec<i64> = (0..dim).map(|i| ((k / strides[i]) % counts[i]) as i64).collect();
        'offs: for o in &offsets {
            let mut k2 = 0usize;
            let mut len2 = 0.0;
            for i in 0..dim {
                let v = c[i] + o[i];
                if v < 0 || v >= counts[i] as i64 {
                    continue 'offs;
                }
                k2 += v as usize * strides[i];
                len2 += (o[i] * o[i]) as f64;
            }
            if inv_d[k2].is_finite() {
                edges.push((k as u32, k2 as u32, h * len2.sqrt() * 0.5 * (inv_d[k] + inv_d[k2])));
            }
        }
    }
    // y joins the nodes of its surrounding cells
    let yid = total;
    let base: Vec<i64> = (0..dim).map(|i| ((y[i] - origin[i]) / h).floor() as i64).collect();
    for mut k in 0..4usize.pow(dim as u32) {
        let mut k2 = 0usize;
        let mut ok = true;
        for i in 0..dim {
            let v = base[i] + (k % 4) as i64 - 1;
            k /= 4;
            if v < 0 || v >= counts[i] as i64 {
                ok = false;
                break;
            }
            k2 += v as usize * strides[i];
        }
        if ok && inv_d[k2].is_finite() {
            let w = segment_length(omega, &y.0, &point(k2));
            if w.is_finite() {
                edges.push((yid as u32, k2 as u32, w));
            }
        }
    }
    let g = super::dijkstra::Graph::from_edges(total + 1, &edges);
    let xid: usize = (0..dim).map(|i| ((x[i] - origin[i]) / h).round() as usize * strides[i]).sum();
    let sp = dijkstra(&g, xid, &[yid]);
    let path = sp.path_to(yid).ok_or(Error::Disconnected)?;
    let mut pts: Vec<Vec<f64>> = path
        .iter()
        .map(|&k| if k == yid { y.0.to_vec() } else { point(k) })
        .collect();
    pts[0] = x.0.to_vec();
    let mut value = polyline_length(omega, &pts);
    if grid.smooth && pts.len() >= 2 {
        let mut fine = resample(&pts, grid.resample.max(pts.len().min(4 * grid.resample)));
        let start = polyline_length(omega, &fine);
        relax(omega, &mut fine, h);
        let relaxed = polyline_length(omega, &fine);
        if relaxed.min(start) < value {
            value = relaxed.min(start);
            pts = fine;
        }
    }
    Ok(DistanceEstimate {
        value,
        kind: EstimateKind::Upper,
        mesh: grid.fingerprint(h),
        witness: Some(Witness::Polyline(pts.into_iter().map(|p| Event(p.into())).collect())),
    })
}

struct QuasiCost<'a, D: DomainOracle + ?Sized>(&'a D);

impl<D: DomainOracle + ?Sized> LinkCost for QuasiCost<'_, D> {
    fn link(&self, p: &Event, v: &[f64]) -> Option<(f64, bool)> {
        let q: Vec<f64> = p.0.iter().zip(v).map(|(a, b)| a + b).collect();
        let w = segment_length(self.0, &p.0, &q);
        w.is_finite().then_some((w, false))
    }
}

/// Quasi-hyperbolic length of the shortest piecewise lightlike path on the
/// chain graph of `mesh`.
pub fn quasi_hyperbolic_lightlike<D: DomainOracle + ?Sized>(
    omega: &D,
    x: &Event,
    y: &Event,
    mesh: &Mesh,
) -> Result<DistanceEstimate> {
    check_pair(omega, x, y)?;
    if x == y {
        return Ok(DistanceEstimate {
            value: 0.0,
            kind: EstimateKind::Upper,
            mesh: mesh.fingerprint(),
            witness: None,
        });
    }
    let (value, vertices) = if omega.dim() == 1 {
        let lat = NullLattice::build_banded(omega, x, y, mesh)?;
        let nodes = lat.nodes();
        let g = lat.weighted_graph(|a, b| {
            let w = segment_length(omega, &nodes[a].0, &nodes[b].0);
            w.is_finite().then_some(w)
        })?;
        let (s, t) = (lat.source_index(), lat.target_index());
        let sp = dijkstra(&g, s, &[t]);
        let path = sp.path_to(t).ok_or(Error::Disconnected)?;
        (sp.dist[t], path.into_iter().map(|k| nodes[k].clone()).collect())
    } else {
        let cost = QuasiCost(omega);
        let g = ConnectorGraph::build_with(omega, &[x.clone(), y.clone()], mesh, true, &cost)?;
        let (vertices, _, total) = g.expand(0, 1, &cost)?;
        (total, vertices)
    };
    Ok(DistanceEstimate {
        value,
        kind: EstimateKind::Upper,
        mesh: mesh.fingerprint(),
        witness: Some(Witness::Polyline(vertices)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::SpecialDomain;
    use std::f64::consts::E;

    fn e(c: &[f64]) -> Event {
        Event::from_slice(c)
    }

    fn half() -> SpecialDomain {
        SpecialDomain::HalfSpaceFuture {
            point: e(&[0.0, 0.0]),
            normal: None,
        }
    }

    #[test]
    fn vertical_segment_in_the_half_plane() {
        let d = quasi_hyperbolic_distance(&half(), &e(&[1.0, 0.0]), &e(&[E, 0.0]), &QuasiGrid::default()).unwrap();
        assert!((d.value - 1.0).abs() < 0.02, "{}", d.value);
        assert!(d.value >= 1.0 - 1e-9);
    }

    #[test]
    fn horizontal_pair_matches_the_hyperbolic_plane() {
        let dd: f64 = 2.0;
        let exact = (1.0 + dd * dd / 2.0).acosh();
        let d = quasi_hyperbolic_distance(&half(), &e(&[1.0, 0.0]), &e(&[1.0, dd]), &QuasiGrid::default()).unwrap();
        assert!((d.value - exact).abs() < 0.02 * exact, "{} vs {exact}", d.value);
    }

    #[test]
    fn lightlike_paths_are_longer_but_within_root_two() {
        let (x, y) = (e(&[1.0, 0.0]), e(&[1.0, 1.0]));
        let full = quasi_hyperbolic_distance(&half(), &x, &y, &QuasiGrid::default()).unwrap().value;
        let light = quasi_hyperbolic_lightlike(&half(), &x, &y, &Mesh::default()).unwrap().value;
        assert!(light >= full - 1e-6 && light <= 2f64.sqrt() * full * 1.05, "{light} {full}");
    }
}
