use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use super::grid::SpatialGrid;
use super::target::TargetSet;
use super::union_find::UnionFind;
use crate::error::{Error, Result};
use crate::math::{dist_sq, norm};
use crate::pointproc::Configuration;

/// Closed balls `B_ri(xi)` and `B_rj(xj)` intersect (tangency counts).
#[inline]
pub fn grains_touch(xi: &[f64], ri: f64, xj: &[f64], rj: f64) -> bool {
    let s = ri + rj;
    dist_sq(xi, xj) <= s * s
}

/// Undirected graph in compressed sparse row form; neighbor lists are sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Adjacency {
    offsets: Vec<u32>,
    neighbors: Vec<u32>,
}

impl Adjacency {
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Self {
        let mut offsets = alloc::vec![0u32; n + 1];
        for &(a, b) in edges {
            offsets[a as usize + 1] += 1;
            offsets[b as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut neighbors = alloc::vec![0u32; 2 * edges.len()];
        for &(a, b) in edges {
            neighbors[fill[a as usize] as usize] = b;
            fill[a as usize] += 1;
            neighbors[fill[b as usize] as usize] = a;
            fill[b as usize] += 1;
        }
        for i in 0..n {
            neighbors[offsets[i] as usize..offsets[i + 1] as usize].sort_unstable();
        }
        Self { offsets, neighbors }
    }

    /// All-pairs construction, `O(N^2)`.
    pub fn brute_force(dim: usize, coords: &[f64], radii: &[f64]) -> Self {
        let n = radii.len();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let (xi, xj) = (
                    &coords[i * dim..(i + 1) * dim],
                    &coords[j * dim..(j + 1) * dim],
                );
                if grains_touch(xi, radii[i], xj, radii[j]) {
                    edges.push((i as u32, j as u32));
                }
            }
        }
        Self::from_edges(n, &edges)
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.neighbors[self.offsets[v] as usize..self.offsets[v + 1] as usize]
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    /// Edges `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.len()).flat_map(move |i| {
            self.neighbors(i)
                .iter()
                .map(|&j| j as usize)
                .filter(move |&j| j > i)
                .map(move |j| (i, j))
        })
    }

    pub fn components(&self) -> UnionFind {
        let mut uf = UnionFind::new(self.len());
        for (i, j) in self.edges() {
            uf.union(i, j);
        }
        uf
    }
}

/// Grid-indexed intersection graph of the given grains. `max_radius` bounds
/// every radius; the grid cell width is `2 * max_radius` so that intersecting
/// grains sit in the same or adjacent cells.
pub fn build_adjacency(dim: usize, coords: &[f64], radii: &[f64], max_radius: f64) -> Adjacency {
    let n = radii.len();
    if n == 0 {
        return Adjacency::from_edges(0, &[]);
    }
    let reach = 2.0 * max_radius;
    let grid = SpatialGrid::new(dim, coords, reach.max(f64::MIN_POSITIVE));
    let mut edges = Vec::new();
    for i in 0..n {
        let xi = &coords[i * dim..(i + 1) * dim];
        let ri = radii[i];
        grid.for_each_candidate(xi, ri + max_radius, |j| {
            if j > i && grains_touch(xi, ri, &coords[j * dim..(j + 1) * dim], radii[j]) {
                edges.push((i as u32, j as u32));
            }
        });
    }
    Adjacency::from_edges(n, &edges)
}

/// Breadth-first search from `sources`; true when a vertex flagged in
/// `sinks` is reached.
pub(crate) fn joined(adj: &Adjacency, sources: &[u32], sinks: &[bool]) -> bool {
    let mut seen = alloc::vec![false; adj.len()];
    let mut queue: Vec<u32> = Vec::with_capacity(sources.len());
    for &s in sources {
        if !seen[s as usize] {
            seen[s as usize] = true;
            queue.push(s);
        }
    }
    let mut head = 0;
    while head < queue.len() {
        let v = queue[head] as usize;
        head += 1;
        if sinks[v] {
            return true;
        }
        for &w in adj.neighbors(v) {
            if !seen[w as usize] {
                seen[w as usize] = true;
                queue.push(w);
            }
        }
    }
    false
}

/// Intersection graph of the grains meeting `B_n`, with the TARGET and
/// OUTSIDE terminals kept as link lists.
#[derive(Debug, Clone)]
pub struct IntersectionGraph {
    grains: Vec<usize>,
    adjacency: Adjacency,
    target_links: Vec<u32>,
    outside: Vec<bool>,
    box_radius: f64,
}

impl IntersectionGraph {
    pub fn n_grains(&self) -> usize {
        self.grains.len()
    }

    /// Configuration index of graph vertex `v`.
    pub fn grain_index(&self, v: usize) -> usize {
        self.grains[v]
    }

    pub fn adjacency(&self) -> &Adjacency {
        &self.adjacency
    }

    /// Vertices whose grain intersects `L`.
    pub fn target_links(&self) -> &[u32] {
        &self.target_links
    }

    /// Whether vertex `v`'s grain is not contained in `B_n`.
    pub fn is_outside_linked(&self, v: usize) -> bool {
        self.outside[v]
    }

    pub fn outside_links(&self) -> impl Iterator<Item = usize> + '_ {
        self.outside
            .iter()
            .enumerate()
            .filter(|(_, &o)| o)
            .map(|(i, _)| i)
    }

    pub fn box_radius(&self) -> f64 {
        self.box_radius
    }

    pub fn connects(&self) -> bool {
        joined(&self.adjacency, &self.target_links, &self.outside)
    }

    /// Debug edge list: one `i j` line per grain pair (configuration
    /// indices), `T i` for TARGET links and `i O` for OUTSIDE links.
    pub fn edge_list(&self) -> String {
        let mut s = String::new();
        for (i, j) in self.adjacency.edges() {
            let _ = writeln!(s, "{} {}", self.grains[i], self.grains[j]);
        }
        for &v in &self.target_links {
            let _ = writeln!(s, "T {}", self.grains[v as usize]);
        }
        for v in self.outside_links() {
            let _ = writeln!(s, "{} O", self.grains[v]);
        }
        s
    }
}

/// Builds the intersection graph for the event `J_L^n`.
///
/// Only grains meeting the closed ball `B_n` are vertices. A grain links to
/// TARGET when `dist(x, L) <= r` and to OUTSIDE when `|x| + r > n`. Fails with
/// [`Error::TargetTooLarge`] unless `L ⊂ B_(n - 2b)`, where `b` is the
/// configuration's margin.
pub fn build_graph(c: &Configuration, target: &TargetSet, n: f64) -> Result<IntersectionGraph> {
    target.validate(c.dim())?;
    let b = c.margin();
    let extent = target.max_norm();
    let limit = n - 2.0 * b;
    if !(extent <= limit) {
        return Err(Error::TargetTooLarge { extent, limit });
    }
    let dim = c.dim();
    let mut grains = Vec::new();
    let mut coords = Vec::new();
    let mut radii = Vec::new();
    let mut target_links = Vec::new();
    let mut outside = Vec::new();
    for (i, (x, r)) in c.iter().enumerate() {
        let nx = norm(x);
        if nx - r > n {
            continue;
        }
        let v = grains.len() as u32;
        grains.push(i);
        coords.extend_from_slice(x);
        radii.push(r);
        if target.distance(x) <= r {
            target_links.push(v);
        }
        outside.push(nx + r > n);
    }
    let adjacency = build_adjacency(dim, &coords, &radii, b);
    Ok(IntersectionGraph {
        grains,
        adjacency,
        target_links,
        outside,
        box_radius: n,
    })
}

/// The event `J_L^n`: TARGET and OUTSIDE are joined through grains.
pub fn connects_j(g: &IntersectionGraph) -> bool {
    g.connects()
}

/// Connected-component labels `0..count` of an adjacency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterIndex {
    labels: Vec<u32>,
    count: usize,
}

impl ClusterIndex {
    pub fn new(adj: &Adjacency) -> Self {
        let mut uf = adj.components();
        let mut remap = alloc::vec![u32::MAX; adj.len()];
        let mut labels = Vec::with_capacity(adj.len());
        let mut count = 0;
        for v in 0..adj.len() {
            let root = uf.find(v);
            if remap[root] == u32::MAX {
                remap[root] = count as u32;
                count += 1;
            }
            labels.push(remap[root]);
        }
        Self { labels, count }
    }

    pub fn label(&self, v: usize) -> usize {
        self.labels[v] as usize
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn count(&self) -> usize {
        self.count
    }
}

/// Full intersection graph of every grain in `c`.
pub(crate) fn configuration_adjacency(c: &Configuration) -> Adjacency {
    let coords: Vec<f64> = c.iter().flat_map(|(x, _)| x.iter().copied()).collect();
    build_adjacency(c.dim(), &coords, c.radii(), c.margin())
}

/// Indices of all grains whose cluster meets `L` (the grains of `Z_L(φ)`),
/// in increasing order.
pub fn cluster_of_target(c: &Configuration, target: &TargetSet) -> Vec<usize> {
    let adj = configuration_adjacency(c);
    let clusters = ClusterIndex::new(&adj);
    let mut hit = alloc::vec![false; clusters.count()];
    for (i, (x, r)) in c.iter().enumerate() {
        if target.distance(x) <= r {
            hit[clusters.label(i)] = true;
        }
    }
    (0..c.len()).filter(|&i| hit[clusters.label(i)]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointproc::Window;
    use alloc::vec;

    fn config(points: &[([f64; 2], f64)], a: f64) -> Configuration {
        Configuration::from_points(
            Window::cube(2, a).unwrap(),
            1.0,
            points.iter().map(|(x, r)| (&x[..], *r)),
        )
        .unwrap()
    }

    #[test]
    fn tangency_rule() {
        assert!(grains_touch(&[0.0, 0.0], 1.0, &[1.5, 0.0], 1.0));
        assert!(grains_touch(&[0.0, 0.0], 1.0, &[2.0, 0.0], 1.0));
        assert!(!grains_touch(&[0.0, 0.0], 1.0, &[2.5, 0.0], 1.0));
    }

    #[test]
    fn chain_reaches_outside() {
        let c = config(
            &[([0.5, 0.0], 1.0), ([2.0, 0.0], 1.0), ([3.5, 0.0], 1.0)],
            5.0,
        );
        let g = build_graph(&c, &TargetSet::origin(2), 4.0).unwrap();
        assert!(connects_j(&g));
        assert_eq!(g.outside_links().collect::<Vec<_>>(), vec![2]);
    }

    #[test]
    fn empty_configuration_does_not_connect() {
        let c = config(&[], 5.0);
        let g = build_graph(&c, &TargetSet::origin(2), 4.0).unwrap();
        assert!(!connects_j(&g));
    }

    #[test]
    fn outside_link_is_strict() {
        // |x| + r = n exactly
        let c = config(&[([3.0, 0.0], 1.0)], 5.0);
        let g = build_graph(&c, &TargetSet::origin(2), 4.0).unwrap();
        assert!(!g.is_outside_linked(0));
        let g = build_graph(&c, &TargetSet::origin(2), 3.999).unwrap();
        assert!(g.is_outside_linked(0));
    }

    #[test]
    fn grains_beyond_the_box_are_dropped() {
        let c = config(&[([0.0, 0.0], 1.0), ([4.5, 0.0], 0.25)], 5.0);
        let g = build_graph(&c, &TargetSet::origin(2), 4.0).unwrap();
        assert_eq!(g.n_grains(), 1);
    }

    #[test]
    fn target_must_fit() {
        let c = config(&[], 5.0);
        let err = build_graph(&c, &TargetSet::centered_ball(2, 2.5), 4.0);
        assert!(matches!(err, Err(Error::TargetTooLarge { .. })));
        assert!(build_graph(&c, &TargetSet::centered_ball(2, 2.0), 4.0).is_ok());
    }

    #[test]
    fn edge_list_format() {
        let c = config(
            &[([0.5, 0.0], 1.0), ([2.0, 0.0], 1.0), ([3.5, 0.0], 1.0)],
            5.0,
        );
        let g = build_graph(&c, &TargetSet::origin(2), 4.0).unwrap();
        assert_eq!(g.edge_list(), "0 1\n1 2\nT 0\n2 O\n");
    }

    #[test]
    fn cluster_of_target_examples() {
        let far = config(&[([3.0, 3.0], 1.0)], 5.0);
        assert!(cluster_of_target(&far, &TargetSet::origin(2)).is_empty());
        let chain = config(
            &[
                ([0.5, 0.0], 1.0),
                ([3.0, 3.0], 0.5),
                ([2.0, 0.0], 1.0),
                ([3.5, 0.0], 1.0),
            ],
            5.0,
        );
        assert_eq!(
            cluster_of_target(&chain, &TargetSet::origin(2)),
            vec![0, 2, 3]
        );
    }

    #[test]
    fn cluster_labels_partition() {
        let c = config(
            &[([0.0, 0.0], 1.0), ([1.0, 0.0], 1.0), ([4.0, 4.0], 1.0)],
            5.0,
        );
        let idx = ClusterIndex::new(&configuration_adjacency(&c));
        assert_eq!(idx.count(), 2);
        assert_eq!(idx.label(0), idx.label(1));
        assert_ne!(idx.label(0), idx.label(2));
    }
}
