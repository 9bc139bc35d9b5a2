//! The lightlike lattice of a pair of events in dimension 1+1.

use rayon::prelude::*;

use super::dijkstra::{dijkstra, Graph};
use super::edge::segment_cost_raw;
use super::{LightlikeChain, Mesh};
use crate::domains::{exit_pair, DomainOracle};
use crate::error::{Error, Result};
use crate::minkowski::Event;

/// Nodes `x + s u + r w` with `u = (1, 1)`, `w = (1, -1)` for `s, r` drawn from
/// two sorted coordinate lists. Each list holds `k` uniform steps from `x` to
/// `y`, `mesh.margin` extra steps on either side, and geometrically graded
/// points around both endpoints down to a fraction of their clearance, so
/// pairs close to the boundary stay connected.
pub struct NullLattice<'a, D: DomainOracle + ?Sized> {
    omega: &'a D,
    origin: Event,
    us: Vec<f64>,
    ws: Vec<f64>,
    source: (usize, usize),
    target: (usize, usize),
    inside: Vec<bool>,
}

/// Sorted coordinates along one null axis and the indices of `0` and `end`.
fn axis(end: f64, other: f64, mesh: &Mesh, fine: f64, band: bool) -> (Vec<f64>, usize, usize) {
    let (k, margin) = (mesh.k.max(1), mesh.margin);
    let h = if end != 0.0 { end.abs() / k as f64 } else { other.abs() / k as f64 };
    let sign = if end < 0.0 { -1.0 } else { 1.0 };
    let steps = if end != 0.0 { k } else { 0 };
    let mut v: Vec<f64> = (-(margin as i64)..=(steps + margin) as i64)
        .map(|i| if i as usize == steps && end != 0.0 { end } else { sign * i as f64 * h })
        .collect();
    // a short axis in a banded lattice also spans the long extent at the long spacing
    let long = end.abs().max(other.abs()) / k as f64;
    if band && long > h * (1.0 + 1e-9) {
        let half = (k / 2 + margin) as i64;
        v.extend((-half..=half).map(|j| 0.5 * end + j as f64 * long));
    }
    if fine < h {
        let levels = ((h / fine).log2().ceil() as i32 + 2).clamp(1, 48);
        let g = mesh.grading.max(1) as i32;
        for c in [0.0, end] {
            for m in 1..=levels * g {
                let d = h * 0.5f64.powf(m as f64 / g as f64);
                v.push(c - d);
                v.push(c + d);
            }
        }
    }
    v.sort_by(f64::total_cmp);
    v.dedup();
    let find = |x: f64| v.iter().position(|&c| c == x).unwrap();
    let (s, t) = (find(0.0), find(end));
    (v, s, t)
}

impl<'a, D: DomainOracle + ?Sized> NullLattice<'a, D> {
    pub fn build(omega: &'a D, x: &Event, y: &Event, mesh: &Mesh) -> Result<Self> {
        Self::build_inner(omega, x, y, mesh, false)
    }

    /// Like [`NullLattice::build`], with the short axis widened to a band as
    /// wide as the long one. The band is not boost covariant, so it suits
    /// weights that are not boost invariant to begin with.
    pub fn build_banded(omega: &'a D, x: &Event, y: &Event, mesh: &Mesh) -> Result<Self> {
        Self::build_inner(omega, x, y, mesh, true)
    }

    fn build_inner(omega: &'a D, x: &Event, y: &Event, mesh: &Mesh, band: bool) -> Result<Self> {
        if omega.dim() != 1 {
            return Err(Error::NotApplicable("the null lattice lives in dimension 1+1".into()));
        }
        let dt = y.t() - x.t();
        let dp = y[1] - x[1];
        // y - x = alpha u + beta w
        let alpha = 0.5 * (dt + dp);
        let beta = 0.5 * (dt - dp);
        if alpha == 0.0 && beta == 0.0 {
            return Err(Error::NotApplicable("x and y coincide".into()));
        }
        // grading floor per null direction: a quarter of the nearest exit along it
        let fine = |dir: [f64; 2]| {
            [x, y]
                .iter()
                .flat_map(|p| {
                    let (a, b) = exit_pair(omega, p, &dir);
                    [a, b]
                })
                .flatten()
                .fold(f64::INFINITY, f64::min)
                * 0.25
        };
        let (us, si, ti) = axis(alpha, beta, mesh, fine([1.0, 1.0]), band);
        let (ws, sj, tj) = axis(beta, alpha, mesh, fine([1.0, -1.0]), band);
        let nodes = us.len() * ws.len();
        if nodes > mesh.node_budget {
            return Err(Error::MeshTooLarge {
                nodes,
                budget: mesh.node_budget,
            });
        }
        let mut lat = NullLattice {
            omega,
            origin: x.clone(),
            us,
            ws,
            source: (si, sj),
            target: (ti, tj),
            inside: Vec::new(),
        };
        lat.inside = (0..nodes).into_par_iter().map(|k| omega.contains(&lat.node_at(k))).collect();
        Ok(lat)
    }

    fn width(&self) -> usize {
        self.ws.len()
    }

    pub fn node_count(&self) -> usize {
        self.inside.len()
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.width() + j
    }

    pub(crate) fn coords(&self, k: usize) -> (usize, usize) {
        (k / self.width(), k % self.width())
    }

    pub fn node(&self, i: usize, j: usize) -> Event {
        let (s, r) = (self.us[i], self.ws[j]);
        Event::new(self.origin.t() + s + r, &[self.origin[1] + s - r])
    }

    pub fn source_index(&self) -> usize {
        self.index(self.source.0, self.source.1)
    }

    pub fn target_index(&self) -> usize {
        self.index(self.target.0, self.target.1)
    }

    pub fn is_inside(&self, k: usize) -> bool {
        self.inside[k]
    }

    /// Node events in index order.
    pub fn nodes(&self) -> Vec<Event> {
        (0..self.node_count()).map(|k| self.node_at(k)).collect()
    }

    /// Lattice neighbours `(k, k')` along `+u` and `+w`, both inside.
    fn lattice_edges(&self) -> Vec<(usize, usize, [f64; 2])> {
        let mut out = Vec::new();
        for k in 0..self.node_count() {
            if !self.inside[k] {
                continue;
            }
            let (i, j) = self.coords(k);
            if i + 1 < self.us.len() {
                let k2 = self.index(i + 1, j);
                let d = self.us[i + 1] - self.us[i];
                if self.inside[k2] {
                    out.push((k, k2, [d, d]));
                }
            }
            if j + 1 < self.ws.len() {
                let k2 = self.index(i, j + 1);
                let d = self.ws[j + 1] - self.ws[j];
                if self.inside[k2] {
                    out.push((k, k2, [d, -d]));
                }
            }
        }
        out
    }

    /// Graph weighted by the Markowitz segment cost, costed from the lower-index end.
    pub fn markowitz_graph(&self) -> Result<Graph> {
        let raw = self.lattice_edges();
        let costed: Vec<Option<(u32, u32, f64, bool)>> = raw
            .par_iter()
            .map(|&(a, b, step)| {
                let p = self.node_at(a);
                segment_cost_raw(self.omega, &p, &step).map(|c| (a as u32, b as u32, c.cost, c.complete_line))
            })
            .collect();
        if costed.iter().flatten().any(|e| e.3) {
            return Err(Error::Degenerate);
        }
        let edges: Vec<(u32, u32, f64)> = costed.into_iter().flatten().map(|(a, b, w, _)| (a, b, w)).collect();
        Ok(Graph::from_edges(self.node_count(), &edges))
    }

    /// Graph with caller-supplied weights on lattice edges (future-directed pairs).
    pub fn weighted_graph(&self, weight: impl Fn(usize, usize) -> Option<f64> + Sync) -> Result<Graph> {
        let raw = self.lattice_edges();
        let edges: Result<Vec<Option<(u32, u32, f64)>>> = raw
            .par_iter()
            .map(|&(a, b, step)| {
                // the step vectors are future pointing whenever their time part is positive
                let (past, fut) = if step[0] >= 0.0 { (a, b) } else { (b, a) };
                Ok(weight(past, fut).map(|w| (a as u32, b as u32, w)))
            })
            .collect();
        let edges: Vec<(u32, u32, f64)> = edges?.into_iter().flatten().collect();
        Ok(Graph::from_edges(self.node_count(), &edges))
    }

    /// Shortest chain from `x` to `y` in the Markowitz-weighted lattice.
    pub fn shortest_chain(&self) -> Result<LightlikeChain> {
        let g = self.markowitz_graph()?;
        let (s, t) = (self.source_index(), self.target_index());
        if !self.inside[s] || !self.inside[t] {
            return Err(Error::OutsideDomain);
        }
        let sp = dijkstra(&g, s, &[t]);
        let path = sp.path_to(t).ok_or(Error::Disconnected)?;
        Ok(self.chain_from_path(&path, &sp.dist))
    }

    /// Merges collinear runs of a lattice path into lightlike links.
    pub(crate) fn chain_from_path(&self, path: &[usize], dist: &[f64]) -> LightlikeChain {
        let mut vertices = vec![self.node_at(path[0])];
        let mut costs = Vec::new();
        let mut run_start = 0usize;
        for w in 1..path.len() {
            let dir = |a: usize, b: usize| {
                let (i0, j0) = self.coords(path[a]);
                let (i1, j1) = self.coords(path[b]);
                (i1 as i64 - i0 as i64, j1 as i64 - j0 as i64)
            };
            let last = w + 1 == path.len();
            if last || dir(w - 1, w) != dir(w, w + 1) {
                vertices.push(self.node_at(path[w]));
                costs.push(dist[path[w]] - dist[path[run_start]]);
                run_start = w;
            }
        }
        let total = dist[*path.last().unwrap()];
        LightlikeChain { vertices, costs, total }
    }

    pub(crate) fn node_at(&self, k: usize) -> Event {
        let (i, j) = self.coords(k);
        self.node(i, j)
    }
}
