//! Quadratic reference implementations used to validate the pipeline.
//!
//! Everything here is recomputed directly from raw follow-edge pairs and an
//! activation order, with exhaustive algorithms (pairwise scans, all-simple-
//! paths enumeration, plain BFS). Nothing is shared with the compressed
//! graph, DAG, or metrics code paths, so agreement between the two is
//! meaningful. Intended for tests on small instances (~12 nodes).

/// A story recomputed the slow way from `(follower, followee)` pairs and the
/// users' activation order.
#[derive(Debug, Clone)]
pub struct RefStory {
    pub n: usize,
    /// Activation edges as (earlier position, later position).
    pub edges: Vec<(usize, usize)>,
    /// Positions with no in-edge, ascending.
    pub seeds: Vec<usize>,
    pub cascades: Vec<RefCascade>,
}

#[derive(Debug, Clone)]
pub struct RefCascade {
    pub seed: usize,
    pub members: Vec<usize>,
    pub edge_count: usize,
    pub size: usize,
    pub max_diameter: usize,
    pub min_diameter: usize,
    pub spread: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefGlobals {
    pub largest_cascade_size: usize,
    pub global_max_diameter: usize,
    pub global_min_diameter: usize,
    pub global_spread: usize,
    pub community_value: usize,
    pub normalized_community_value: f64,
}

impl RefStory {
    pub fn build(follows: &[(u32, u32)], order: &[u32]) -> Self {
        let n = order.len();
        // edge i -> j iff order[j] follows order[i], by scanning the pair list
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let follower = order[j];
                let followee = order[i];
                if follows.iter().any(|&(a, b)| a == follower && b == followee) {
                    edges.push((i, j));
                }
            }
        }
        let seeds: Vec<usize> = (0..n)
            .filter(|&p| !edges.iter().any(|&(_, dst)| dst == p))
            .collect();
        let cascades = seeds
            .iter()
            .map(|&seed| RefCascade::build(&edges, n, seed))
            .collect();
        Self {
            n,
            edges,
            seeds,
            cascades,
        }
    }

    pub fn globals(&self) -> RefGlobals {
        let largest_cascade_size = self.cascades.iter().map(|c| c.size).max().unwrap_or(0);
        let global_max_diameter = self
            .cascades
            .iter()
            .map(|c| c.max_diameter)
            .max()
            .unwrap_or(0);
        let global_spread = self.cascades.iter().map(|c| c.spread).max().unwrap_or(0);
        // farthest any node sits from its nearest seed
        let global_min_diameter = (0..self.n)
            .map(|p| {
                self.seeds
                    .iter()
                    .filter_map(|&s| shortest_path_len(&self.edges, s, p))
                    .min()
                    .expect("every node is reachable from some seed")
            })
            .max()
            .unwrap_or(0);
        let community_value = self.edges.len();
        let normalized_community_value = if self.n == 0 {
            0.0
        } else {
            community_value as f64 / self.n as f64
        };
        RefGlobals {
            largest_cascade_size,
            global_max_diameter,
            global_min_diameter,
            global_spread,
            community_value,
            normalized_community_value,
        }
    }
}

impl RefCascade {
    pub fn build(edges: &[(usize, usize)], n: usize, seed: usize) -> Self {
        // reachability by fixpoint iteration
        let mut reach = vec![false; n];
        reach[seed] = true;
        loop {
            let mut changed = false;
            for &(src, dst) in edges {
                if reach[src] && !reach[dst] {
                    reach[dst] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let members: Vec<usize> = (0..n).filter(|&p| reach[p]).collect();
        let induced: Vec<(usize, usize)> = edges
            .iter()
            .copied()
            .filter(|&(src, dst)| reach[src] && reach[dst])
            .collect();
        let max_diameter = longest_simple_path(&induced, &members);
        let min_diameter = members
            .iter()
            .filter_map(|&p| shortest_path_len(&induced, seed, p))
            .max()
            .unwrap_or(0);
        let spread = members
            .iter()
            .map(|&p| induced.iter().filter(|&&(src, _)| src == p).count())
            .max()
            .unwrap_or(0);
        Self {
            seed,
            size: members.len(),
            edge_count: induced.len(),
            members,
            max_diameter,
            min_diameter,
            spread,
        }
    }
}

/// Longest chain length in edges, by enumerating every simple path starting
/// from every node.
pub fn longest_simple_path(edges: &[(usize, usize)], nodes: &[usize]) -> usize {
    fn dfs(edges: &[(usize, usize)], at: usize, len: usize, best: &mut usize) {
        *best = (*best).max(len);
        for &(src, dst) in edges {
            if src == at {
                dfs(edges, dst, len + 1, best);
            }
        }
    }
    let mut best = 0;
    for &start in nodes {
        dfs(edges, start, 0, &mut best);
    }
    best
}

/// BFS shortest path length from `from` to `to`, if reachable.
pub fn shortest_path_len(edges: &[(usize, usize)], from: usize, to: usize) -> Option<usize> {
    let mut dist = std::collections::HashMap::new();
    dist.insert(from, 0usize);
    let mut queue = std::collections::VecDeque::from([from]);
    while let Some(p) = queue.pop_front() {
        let d = dist[&p];
        if p == to {
            return Some(d);
        }
        for &(src, dst) in edges {
            if src == p && !dist.contains_key(&dst) {
                dist.insert(dst, d + 1);
                queue.push_back(dst);
            }
        }
    }
    dist.get(&to).copied()
}

/// Length of the longest simple path from `root` to every node (None when
/// unreachable), by exhaustive path enumeration.
pub fn longest_paths_from(edges: &[(usize, usize)], n: usize, root: usize) -> Vec<Option<usize>> {
    fn dfs(edges: &[(usize, usize)], at: usize, len: usize, best: &mut [Option<usize>]) {
        if best[at].is_none_or(|b| len > b) {
            best[at] = Some(len);
        }
        for &(src, dst) in edges {
            if src == at {
                dfs(edges, dst, len + 1, best);
            }
        }
    }
    let mut best = vec![None; n];
    dfs(edges, root, 0, &mut best);
    best
}

/// BFS distances from `root`.
pub fn shortest_paths_from(edges: &[(usize, usize)], n: usize, root: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; n];
    dist[root] = Some(0usize);
    let mut queue = std::collections::VecDeque::from([root]);
    while let Some(p) = queue.pop_front() {
        for &(src, dst) in edges {
            if src == p && dist[dst].is_none() {
                dist[dst] = Some(dist[p].unwrap() + 1);
                queue.push_back(dst);
            }
        }
    }
    dist
}
