//! Shortest paths on a frozen weighted graph.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use ordered_float::OrderedFloat;

/// Undirected graph in compressed adjacency form.
#[derive(Clone, Debug, Default)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    weights: Vec<f64>,
}

impl Graph {
    /// Builds the graph from undirected edges `(a, b, w)`.
    pub fn from_edges(nodes: usize, edges: &[(u32, u32, f64)]) -> Self {
        let mut degree = vec![0usize; nodes + 1];
        for &(a, b, _) in edges {
            degree[a as usize] += 1;
            degree[b as usize] += 1;
        }
        let mut offsets = vec![0usize; nodes + 1];
        for i in 0..nodes {
            offsets[i + 1] = offsets[i] + degree[i];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0u32; offsets[nodes]];
        let mut weights = vec![0.0; offsets[nodes]];
        for &(a, b, w) in edges {
            for (s, t) in [(a, b), (b, a)] {
                let k = fill[s as usize];
                targets[k] = t;
                weights[k] = w;
                fill[s as usize] += 1;
            }
        }
        Graph {
            offsets,
            targets,
            weights,
        }
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len().saturating_sub(1)
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.offsets[v]..self.offsets[v + 1];
        self.targets[r.clone()]
            .iter()
            .zip(&self.weights[r])
            .map(|(t, w)| (*t as usize, *w))
    }
}

/// Single-source shortest-path tree.
#[derive(Clone, Debug)]
pub struct ShortestPaths {
    pub dist: Vec<f64>,
    pub hops: Vec<u32>,
    pub pred: Vec<u32>,
}

const NONE: u32 = u32::MAX;

impl ShortestPaths {
    /// Node sequence from the source to `target`, if reachable.
    pub fn path_to(&self, target: usize) -> Option<Vec<usize>> {
        if !self.dist[target].is_finite() {
            return None;
        }
        let mut out = vec![target];
        let mut v = target;
        while self.pred[v] != NONE {
            v = self.pred[v] as usize;
            out.push(v);
        }
        out.reverse();
        Some(out)
    }
}

/// Dijkstra from `source`, ordering ties by `(cost, hops, node id)`.
///
/// Stops early once every node in `targets` is settled (all nodes when empty).
pub fn dijkstra(g: &Graph, source: usize, targets: &[usize]) -> ShortestPaths {
    let n = g.node_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut hops = vec![u32::MAX; n];
    let mut pred = vec![NONE; n];
    let mut done = vec![false; n];
    let mut wanted: Vec<bool> = vec![false; n];
    let mut remaining = targets.len();
    for &t in targets {
        if wanted[t] {
            remaining -= 1;
        }
        wanted[t] = true;
    }
    dist[source] = 0.0;
    hops[source] = 0;
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((OrderedFloat(0.0), 0u32, source as u32)));
    while let Some(Reverse((OrderedFloat(d), h, v))) = heap.pop() {
        let v = v as usize;
        if done[v] || d > dist[v] || (d == dist[v] && h > hops[v]) {
            continue;
        }
        done[v] = true;
        if wanted[v] {
            remaining -= 1;
            if remaining == 0 {
                break;
            }
        }
        for (u, w) in g.neighbors(v) {
            if done[u] {
                continue;
            }
            let nd = d + w;
            let nh = h + 1;
            let better = nd < dist[u] || (nd == dist[u] && (nh < hops[u] || (nh == hops[u] && (v as u32) < pred[u])));
            if better {
                dist[u] = nd;
                hops[u] = nh;
                pred[u] = v as u32;
                heap.push(Reverse((OrderedFloat(nd), nh, u as u32)));
            }
        }
    }
    ShortestPaths { dist, hops, pred }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_graph() {
        let g = Graph::from_edges(4, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 2.5), (2, 3, 1.0)]);
        let sp = dijkstra(&g, 0, &[]);
        assert_eq!(sp.dist, vec![0.0, 1.0, 2.0, 3.0]);
        assert_eq!(sp.path_to(3).unwrap(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn ties_prefer_fewer_hops() {
        let g = Graph::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 2.0)]);
        let sp = dijkstra(&g, 0, &[2]);
        assert_eq!(sp.path_to(2).unwrap(), vec![0, 2]);
    }

    #[test]
    fn unreachable_is_infinite() {
        let g = Graph::from_edges(3, &[(0, 1, 1.0)]);
        let sp = dijkstra(&g, 0, &[]);
        assert!(sp.dist[2].is_infinite());
        assert!(sp.path_to(2).is_none());
    }
}
