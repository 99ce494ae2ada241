use alloc::vec::Vec;

use super::graph::{Adjacency, IntersectionGraph};

/// Pivotality of grains for `J_L^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PivotalReport {
    /// Whether `J_L^n` occurs.
    pub connected: bool,
    /// Configuration indices of the pivotal grains, ordered from TARGET to
    /// OUTSIDE. Every TARGET-OUTSIDE path visits them in this order.
    pub pivotal: Vec<usize>,
    pub last_pivotal: Option<usize>,
    /// Connected with no pivotal grain, i.e. two vertex-disjoint
    /// TARGET-OUTSIDE paths exist.
    pub two_disjoint_paths: bool,
}

const UNSET: u32 = u32::MAX;

/// Biconnected components (as vertex lists) of the component of `root`,
/// together with the DFS discovery times.
fn blocks_from(adj: &Adjacency, root: usize) -> (Vec<Vec<u32>>, Vec<u32>) {
    let n = adj.len();
    let mut disc = alloc::vec![UNSET; n];
    let mut low = alloc::vec![0u32; n];
    let mut timer = 0u32;
    let mut vstack: Vec<u32> = Vec::new();
    // (vertex, parent, next neighbor position)
    let mut frames: Vec<(u32, u32, u32)> = Vec::new();
    let mut blocks = Vec::new();

    disc[root] = timer;
    low[root] = timer;
    timer += 1;
    vstack.push(root as u32);
    frames.push((root as u32, UNSET, 0));

    while let Some(frame) = frames.last_mut() {
        let (v, parent, pos) = *frame;
        let nbrs = adj.neighbors(v as usize);
        if (pos as usize) < nbrs.len() {
            frame.2 += 1;
            let w = nbrs[pos as usize];
            if w == parent {
                continue;
            }
            if disc[w as usize] == UNSET {
                disc[w as usize] = timer;
                low[w as usize] = timer;
                timer += 1;
                vstack.push(w);
                frames.push((w, v, 0));
            } else {
                low[v as usize] = low[v as usize].min(disc[w as usize]);
            }
        } else {
            frames.pop();
            if let Some(&(u, _, _)) = frames.last() {
                low[u as usize] = low[u as usize].min(low[v as usize]);
                if low[v as usize] >= disc[u as usize] {
                    let mut block = Vec::new();
                    while let Some(x) = vstack.pop() {
                        block.push(x);
                        if x == v {
                            break;
                        }
                    }
                    block.push(u);
                    blocks.push(block);
                }
            }
        }
    }
    (blocks, disc)
}

/// Pivotal grains via the block-cut tree.
///
/// The graph is augmented with TARGET and OUTSIDE as ordinary vertices. A
/// grain is pivotal exactly when it is a cut vertex lying on the unique
/// TARGET-OUTSIDE path of the block-cut tree; the order along that path is the
/// order in which every TARGET-OUTSIDE path meets the pivotal grains.
pub fn pivotal_report(g: &IntersectionGraph) -> PivotalReport {
    let n = g.n_grains();
    let target = n;
    let outside = n + 1;
    let mut edges: Vec<(u32, u32)> = g
        .adjacency()
        .edges()
        .map(|(i, j)| (i as u32, j as u32))
        .collect();
    edges.extend(g.target_links().iter().map(|&v| (target as u32, v)));
    edges.extend(g.outside_links().map(|v| (v as u32, outside as u32)));
    let adj = Adjacency::from_edges(n + 2, &edges);

    let (blocks, disc) = blocks_from(&adj, target);
    if disc[outside] == UNSET {
        return PivotalReport {
            connected: false,
            pivotal: Vec::new(),
            last_pivotal: None,
            two_disjoint_paths: false,
        };
    }

    // Block-cut tree: block nodes 0..B, vertex node for v at B + v (only for
    // cut vertices and the two terminals).
    let nb = blocks.len();
    let mut membership = alloc::vec![0u32; n + 2];
    for block in &blocks {
        for &v in block {
            membership[v as usize] += 1;
        }
    }
    let is_node = |v: usize| membership[v] >= 2 || v == target || v == outside;
    let mut tree: Vec<Vec<u32>> = alloc::vec![Vec::new(); nb + n + 2];
    for (k, block) in blocks.iter().enumerate() {
        for &v in block {
            if is_node(v as usize) {
                tree[k].push((nb + v as usize) as u32);
                tree[nb + v as usize].push(k as u32);
            }
        }
    }
    let start = nb + target;
    let goal = nb + outside;
    let mut prev = alloc::vec![UNSET; tree.len()];
    prev[start] = start as u32;
    let mut queue = alloc::vec![start as u32];
    let mut head = 0;
    while head < queue.len() {
        let u = queue[head] as usize;
        head += 1;
        if u == goal {
            break;
        }
        for &w in &tree[u] {
            if prev[w as usize] == UNSET {
                prev[w as usize] = u as u32;
                queue.push(w);
            }
        }
    }
    let mut path = Vec::new();
    let mut cur = prev[goal] as usize;
    while cur != start {
        if cur >= nb {
            path.push(g.grain_index(cur - nb));
        }
        cur = prev[cur] as usize;
    }
    path.reverse();
    let last_pivotal = path.last().copied();
    PivotalReport {
        connected: true,
        two_disjoint_paths: path.is_empty(),
        pivotal: path,
        last_pivotal,
    }
}
