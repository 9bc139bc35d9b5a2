//! Chain graphs in dimension n >= 2.
//!
//! Nodes are the points of a regular grid over the region of interest plus
//! the query terminals. Two nodes are joined by the cheapest two-link
//! lightlike chain `p -> z -> q` through a corner `z = p + a (1, m)` with `m`
//! drawn from a fixed set of unit directions (plus the two directions in the
//! plane of `q - p` and the time axis), or directly when `q - p` is lightlike.

use rayon::prelude::*;

use super::dijkstra::{dijkstra, Graph};
use super::edge::segment_cost_raw;
use super::{LightlikeChain, Mesh};
use crate::domains::DomainOracle;
use crate::error::{Error, Result};
use crate::minkowski::{classify_raw, CausalKind, Event};
use crate::sampling::rng;

/// How a link between two events is priced.
pub(crate) trait LinkCost: Sync {
    /// Cost of the lightlike link `p -> q`, `None` when inadmissible; the flag
    /// marks a link whose line lies entirely in the domain.
    fn link(&self, p: &Event, q: &[f64]) -> Option<(f64, bool)>;

    /// Cost of a direct causal (non-lightlike) link, if the model allows one.
    fn causal_link(&self, _p: &Event, _q: &Event) -> Option<f64> {
        None
    }
}

/// Markowitz cost of lightlike segments.
pub(crate) struct MarkowitzCost<'a, D: DomainOracle + ?Sized>(pub &'a D);

impl<D: DomainOracle + ?Sized> LinkCost for MarkowitzCost<'_, D> {
    fn link(&self, p: &Event, v: &[f64]) -> Option<(f64, bool)> {
        segment_cost_raw(self.0, p, v).map(|c| (c.cost, c.complete_line))
    }
}

/// Nested unit directions in `R^n`: prefixes of one fixed sequence, so a
/// larger count always contains a smaller one.
pub(crate) fn nested_directions(n: usize, count: usize) -> Vec<Vec<f64>> {
    use rand::Rng;
    if n == 1 {
        return vec![vec![1.0], vec![-1.0]];
    }
    if n == 2 {
        // dyadic angles: the first 2^j entries are evenly spaced
        let count = count.max(2).next_power_of_two();
        let mut out = Vec::with_capacity(count);
        let mut level = 1usize;
        out.push(vec![1.0, 0.0]);
        while out.len() < count {
            for i in 0..level {
                let a = std::f64::consts::PI * (2 * i + 1) as f64 / level as f64;
                out.push(vec![a.cos(), a.sin()]);
            }
            level *= 2;
        }
        return out;
    }
    let mut r = rng(0xd1ec7 ^ n as u64);
    (0..count.max(2 * n))
        .map(|i| {
            if i < 2 * n {
                let mut v = vec![0.0; n];
                v[i / 2] = if i % 2 == 0 { 1.0 } else { -1.0 };
                return v;
            }
            let v: Vec<f64> = (0..n).map(|_| r.sample::<f64, _>(rand_distr::StandardNormal)).collect();
            let s = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            v.into_iter().map(|c| c / s).collect()
        })
        .collect()
}

/// Best two-link (or direct) connection from `p` to `q` and its corner.
pub(crate) fn connect<D: DomainOracle + ?Sized, C: LinkCost>(
    omega: &D,
    cost: &C,
    dirs: &[Vec<f64>],
    p: &Event,
    q: &Event,
) -> Option<(f64, Option<Event>, bool)> {
    let delta: Vec<f64> = q.0.iter().zip(&p.0).map(|(a, b)| a - b).collect();
    let link = |from: &Event, v: &[f64]| {
        if v.iter().all(|c| *c == 0.0) {
            Some((0.0, false))
        } else {
            cost.link(from, v)
        }
    };
    let class = classify_raw(&delta, 0.0);
    if class.kind == CausalKind::Lightlike {
        return link(p, &delta).map(|(c, deg)| (c, None, deg));
    }
    let mut best: Option<(f64, Option<Event>, bool)> = None;
    if class.kind == CausalKind::Timelike {
        if let Some(c) = cost.causal_link(p, q) {
            best = Some((c, None, false));
        }
    }
    let dt = delta[0];
    let dp = &delta[1..];
    let l2: f64 = dp.iter().map(|c| c * c).sum();
    let l = l2.sqrt();
    let planar: Vec<Vec<f64>> = if l > 0.0 {
        let e: Vec<f64> = dp.iter().map(|c| c / l).collect();
        let neg: Vec<f64> = e.iter().map(|c| -c).collect();
        vec![e, neg]
    } else {
        Vec::new()
    };
    let mut z = p.clone();
    let mut v1 = vec![0.0; delta.len()];
    let mut v2 = vec![0.0; delta.len()];
    for m in planar.iter().chain(dirs) {
        let denom = dt - dp.iter().zip(m).map(|(a, b)| a * b).sum::<f64>();
        if denom.abs() < 1e-14 * (dt.abs() + l) {
            continue;
        }
        let a = (dt * dt - l2) / (2.0 * denom);
        if a == 0.0 {
            continue;
        }
        v1[0] = a;
        for (k, mk) in m.iter().enumerate() {
            v1[k + 1] = a * mk;
        }
        for k in 0..delta.len() {
            z.0[k] = p.0[k] + v1[k];
            v2[k] = delta[k] - v1[k];
        }
        if !omega.contains(&z) {
            continue;
        }
        let Some((c1, d1)) = link(p, &v1) else { continue };
        if best.as_ref().is_some_and(|b| c1 >= b.0) {
            continue;
        }
        let Some((c2, d2)) = link(&z, &v2) else { continue };
        let total = c1 + c2;
        if best.as_ref().map_or(true, |b| total < b.0) {
            best = Some((total, Some(z.clone()), d1 || d2));
        }
    }
    best
}

/// A frozen chain graph over a grid and a set of terminals.
pub struct ConnectorGraph<'a, D: DomainOracle + ?Sized> {
    omega: &'a D,
    /// Terminals first, then the grid nodes inside the domain.
    nodes: Vec<Event>,
    terminals: usize,
    graph: Graph,
    dirs: Vec<Vec<f64>>,
    spacing: f64,
}

impl<'a, D: DomainOracle + ?Sized> ConnectorGraph<'a, D> {
    /// Builds the Markowitz-weighted graph. With `pair_edges` every pair of
    /// terminals is also joined directly.
    pub fn build(omega: &'a D, terminals: &[Event], mesh: &Mesh, pair_edges: bool) -> Result<Self> {
        Self::build_with(omega, terminals, mesh, pair_edges, &MarkowitzCost(omega))
    }

    pub(crate) fn build_with<C: LinkCost>(
        omega: &'a D,
        terminals: &[Event],
        mesh: &Mesh,
        pair_edges: bool,
        cost: &C,
    ) -> Result<Self> {
        let dim = omega.dim() + 1;
        if terminals.is_empty() {
            return Err(Error::DegenerateSample("no terminals".into()));
        }
        for t in terminals {
            if t.dim() != omega.dim() {
                return Err(Error::DimensionMismatch {
                    expected: omega.dim(),
                    found: t.dim(),
                });
            }
            if !omega.contains(t) {
                return Err(Error::OutsideDomain);
            }
        }
        let mut lo = terminals[0].0.to_vec();
        let mut hi = lo.clone();
        for t in terminals {
            for i in 0..dim {
                lo[i] = lo[i].min(t[i]);
                hi[i] = hi[i].max(t[i]);
            }
        }
        let mut longest = (0..dim).map(|i| hi[i] - lo[i]).fold(0.0, f64::max);
        if longest == 0.0 {
            longest = omega.scale();
        }
        let h = longest / mesh.k.max(1) as f64;
        let pad = (mesh.margin as f64 + 1.0) * h;
        let mut counts = vec![0usize; dim];
        for i in 0..dim {
            let mut e = vec![0.0; dim];
            e[i] = 1.0;
            let (inf, sup) = omega.support(&e);
            lo[i] = (lo[i] - pad).max(inf);
            hi[i] = (hi[i] + pad).min(sup);
            counts[i] = ((hi[i] - lo[i]) / h).floor() as usize + 1;
        }
        let total = counts.iter().try_fold(1usize, |acc, &c| acc.checked_mul(c)).unwrap_or(usize::MAX);
        if total > mesh.node_budget {
            return Err(Error::MeshTooLarge {
                nodes: total,
                budget: mesh.node_budget,
            });
        }
        let grid_point = |mut k: usize| -> Event {
            let mut c = vec![0.0; dim];
            for i in (0..dim).rev() {
                c[i] = lo[i] + (k % counts[i]) as f64 * h;
                k /= counts[i];
            }
            Event::from_slice(&c)
        };
        let inside: Vec<bool> = (0..total).into_par_iter().map(|k| omega.contains(&grid_point(k))).collect();
        let mut id = vec![u32::MAX; total];
        let mut nodes: Vec<Event> = terminals.to_vec();
        for k in 0..total {
            if inside[k] {
                id[k] = nodes.len() as u32;
                nodes.push(grid_point(k));
            }
        }
        let strides: Vec<usize> = (0..dim)
            .map(|i| counts[i + 1..].iter().product::<usize>())
            .collect();
        let unflatten = |mut k: usize| -> Vec<i64> {
            let mut c = vec![0i64; dim];
            for i in (0..dim).rev() {
                c[i] = (k % counts[i]) as i64;
                k /= counts[i];
            }
            c
        };
        let flatten = |c: &[i64]| -> Option<usize> {
            let mut k = 0usize;
            for i in 0..dim {
                if c[i] < 0 || c[i] >= counts[i] as i64 {
                    return None;
                }
                k += c[i] as usize * strides[i];
            }
            Some(k)
        };
        // half of the Chebyshev-1 stencil: offsets whose first nonzero entry is positive
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
        let dirs = nested_directions(omega.dim(), mesh.d);

        let mut candidates: Vec<(u32, u32)> = Vec::new();
        for k in 0..total {
            if !inside[k] {
                continue;
            }
            let c = unflatten(k);
            for o in &offsets {
                let nb: Vec<i64> = c.iter().zip(o).map(|(a, b)| a + b).collect();
                if let Some(k2) = flatten(&nb) {
                    if inside[k2] {
                        candidates.push((id[k], id[k2]));
                    }
                }
            }
        }
        for (ti, t) in terminals.iter().enumerate() {
            let base: Vec<i64> = (0..dim).map(|i| ((t[i] - lo[i]) / h).floor() as i64).collect();
            for mut k in 0..4usize.pow(dim as u32) {
                let mut c = base.clone();
                for ci in c.iter_mut() {
                    *ci += (k % 4) as i64 - 1;
                    k /= 4;
                }
                if let Some(k2) = flatten(&c) {
                    if inside[k2] {
                        candidates.push((ti as u32, id[k2]));
                    }
                }
            }
            if pair_edges {
                for tj in ti + 1..terminals.len() {
                    candidates.push((ti as u32, tj as u32));
                }
            }
        }
        let costed: Vec<Option<(u32, u32, f64, bool)>> = candidates
            .par_iter()
            .map(|&(a, b)| {
                connect(omega, cost, &dirs, &nodes[a as usize], &nodes[b as usize]).map(|(c, _, deg)| (a, b, c, deg))
            })
            .collect();
        if costed.iter().flatten().any(|e| e.3) {
            return Err(Error::Degenerate);
        }
        let edges: Vec<(u32, u32, f64)> = costed.into_iter().flatten().map(|(a, b, c, _)| (a, b, c)).collect();
        let graph = Graph::from_edges(nodes.len(), &edges);
        Ok(ConnectorGraph {
            omega,
            nodes,
            terminals: terminals.len(),
            graph,
            dirs,
            spacing: h,
        })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Shortest-path costs from terminal `s` to every terminal.
    pub fn distances_from(&self, s: usize) -> Vec<f64> {
        let targets: Vec<usize> = (0..self.terminals).collect();
        let sp = dijkstra(&self.graph, s, &targets);
        sp.dist[..self.terminals].to_vec()
    }

    /// Symmetrized matrix of terminal-to-terminal costs.
    pub fn distance_matrix(&self) -> Vec<Vec<f64>> {
        let rows: Vec<Vec<f64>> = (0..self.terminals).into_par_iter().map(|s| self.distances_from(s)).collect();
        let n = self.terminals;
        let mut out = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let v = rows[i][j].min(rows[j][i]);
                out[i][j] = v;
                out[j][i] = v;
            }
        }
        out
    }

    /// The shortest chain between two terminals with every corner expanded.
    pub fn shortest_chain(&self, s: usize, t: usize) -> Result<LightlikeChain> {
        let (vertices, costs, total) = self.expand(s, t, &MarkowitzCost(self.omega))?;
        Ok(LightlikeChain { vertices, costs, total })
    }

    /// Shortest path between two terminals as vertices and per-link costs
    /// under the model the graph was built with.
    pub(crate) fn expand<C: LinkCost>(&self, s: usize, t: usize, cost: &C) -> Result<(Vec<Event>, Vec<f64>, f64)> {
        let sp = dijkstra(&self.graph, s, &[t]);
        let path = sp.path_to(t).ok_or(Error::Disconnected)?;
        let mut vertices = vec![self.nodes[s].clone()];
        let mut costs = Vec::new();
        for w in path.windows(2) {
            let (from, to) = (&self.nodes[w[0]], &self.nodes[w[1]]);
            let (a, b) = (w[0].min(w[1]), w[0].max(w[1]));
            let (c, corner, _) =
                connect(self.omega, cost, &self.dirs, &self.nodes[a], &self.nodes[b]).ok_or(Error::Disconnected)?;
            match corner {
                None => costs.push(c),
                Some(z) => {
                    let v: Vec<f64> = z.0.iter().zip(&from.0).map(|(p, q)| p - q).collect();
                    let c1 = cost.link(from, &v).map_or(f64::NAN, |l| l.0);
                    vertices.push(z);
                    costs.push(c1);
                    costs.push(c - c1);
                }
            }
            vertices.push(to.clone());
        }
        Ok((vertices, costs, sp.dist[t]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::SpecialDomain;

    #[test]
    fn nested_directions_are_nested() {
        for n in [2, 3] {
            let a = nested_directions(n, 8);
            let b = nested_directions(n, 16);
            assert_eq!(&b[..a.len()], &a[..]);
        }
    }

    #[test]
    fn causal_pair_in_a_cone_is_exact() {
        let cone = SpecialDomain::ConeFuture {
            apex: Event::new(0.0, &[0.0, 0.0]),
        };
        let x = Event::new(1.0, &[0.1, 0.0]);
        let y = Event::new(2.5, &[0.3, -0.4]);
        let g = ConnectorGraph::build(&cone, &[x.clone(), y.clone()], &Mesh::default().with_k(6), true).unwrap();
        let d = g.distances_from(0)[1];
        let exact = 2.0
            * (crate::minkowski::time_separation(&Event::new(0.0, &[0.0, 0.0]), &y).unwrap()
                / crate::minkowski::time_separation(&Event::new(0.0, &[0.0, 0.0]), &x).unwrap())
            .ln();
        assert!((d - exact).abs() < 1e-9, "{d} vs {exact}");
        let chain = g.shortest_chain(0, 1).unwrap();
        assert!((chain.costs.iter().sum::<f64>() - chain.total).abs() < 1e-9);
    }
}
