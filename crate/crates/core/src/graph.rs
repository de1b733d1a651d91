//! Immutable directed follower graph with compressed adjacency in both
//! directions.
//!
//! An edge `u -> v` means "u follows v": u watches v's activity, so
//! information flows from v to u. `followers(v)` and `followees(u)` are
//! exact transposes of each other.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::dist::Histogram;
use crate::ids::Interner;

/// Dense node index assigned at load time.
pub type UserId = u32;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: expected two whitespace-separated ids, found \"{content}\"")]
    MalformedLine { line: u64, content: String },
}

/// Counts reported after loading, serialized as the graph summary JSON.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GraphSummary {
    pub nodes: u64,
    pub edges: u64,
    pub dropped_self_loops: u64,
    pub collapsed_duplicates: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Followers per user (fan count).
    In,
    /// Followees per user.
    Out,
}

/// Immutable follower graph over interned user ids.
#[derive(Debug, Clone)]
pub struct FollowerGraph {
    ids: Interner,
    // out = followees of u (who u watches), in = followers of v (who watches v)
    out_offsets: Vec<usize>,
    out_targets: Vec<UserId>,
    in_offsets: Vec<usize>,
    in_targets: Vec<UserId>,
    dropped_self_loops: u64,
    collapsed_duplicates: u64,
}

impl FollowerGraph {
    /// Loads an edge-list file: UTF-8 text, one `follower followee` pair per
    /// line, `#` lines ignored. Duplicate edges collapse, self-loops drop;
    /// both are counted in the summary.
    pub fn from_edge_list_path<P: AsRef<Path>>(path: P) -> Result<Self, GraphError> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|source| GraphError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_edge_list_reader(BufReader::new(file))
    }

    pub fn from_edge_list_reader<R: BufRead>(reader: R) -> Result<Self, GraphError> {
        let mut ids = Interner::new();
        let mut edges: Vec<(UserId, UserId)> = Vec::new();
        let mut dropped_self_loops = 0u64;
        for (i, line) in reader.lines().enumerate() {
            let lineno = i as u64 + 1;
            let line = line.map_err(|source| GraphError::Io {
                path: format!("<line {lineno}>"),
                source,
            })?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut tokens = trimmed.split_whitespace();
            let (follower, followee) = match (tokens.next(), tokens.next(), tokens.next()) {
                (Some(a), Some(b), None) => (a, b),
                _ => {
                    return Err(GraphError::MalformedLine {
                        line: lineno,
                        content: trimmed.to_owned(),
                    })
                }
            };
            if follower == followee {
                dropped_self_loops += 1;
                continue;
            }
            let u = ids.intern(follower);
            let v = ids.intern(followee);
            edges.push((u, v));
        }
        Ok(Self::from_parts(ids, edges, dropped_self_loops))
    }

    /// Builds a graph over nodes labeled `"0"..n-1`, used by the simulator.
    /// Edges must be self-loop free.
    pub fn from_numbered_nodes(n: u32, edges: Vec<(UserId, UserId)>) -> Self {
        let mut ids = Interner::new();
        for i in 0..n {
            ids.intern(&i.to_string());
        }
        debug_assert!(edges.iter().all(|&(u, v)| u != v && u < n && v < n));
        Self::from_parts(ids, edges, 0)
    }

    fn from_parts(ids: Interner, mut edges: Vec<(UserId, UserId)>, dropped_self_loops: u64) -> Self {
        let n = ids.len();
        edges.sort_unstable();
        let before = edges.len();
        edges.dedup();
        let collapsed_duplicates = (before - edges.len()) as u64;

        let mut out_offsets = vec![0usize; n + 1];
        let mut in_offsets = vec![0usize; n + 1];
        for &(u, v) in &edges {
            out_offsets[u as usize + 1] += 1;
            in_offsets[v as usize + 1] += 1;
        }
        for i in 0..n {
            out_offsets[i + 1] += out_offsets[i];
            in_offsets[i + 1] += in_offsets[i];
        }
        // edges are sorted by (u, v): out lists fill in order and stay sorted
        let mut out_targets = vec![0 as UserId; edges.len()];
        let mut in_targets = vec![0 as UserId; edges.len()];
        let mut out_cursor = out_offsets.clone();
        let mut in_cursor = in_offsets.clone();
        for &(u, v) in &edges {
            out_targets[out_cursor[u as usize]] = v;
            out_cursor[u as usize] += 1;
            in_targets[in_cursor[v as usize]] = u;
            in_cursor[v as usize] += 1;
        }

        Self {
            ids,
            out_offsets,
            out_targets,
            in_offsets,
            in_targets,
            dropped_self_loops,
            collapsed_duplicates,
        }
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.out_targets.len()
    }

    /// Dense id of `label`, or `None` for users absent from the graph.
    pub fn node_id(&self, label: &str) -> Option<UserId> {
        self.ids.get(label)
    }

    pub fn contains(&self, label: &str) -> bool {
        self.ids.get(label).is_some()
    }

    pub fn label(&self, u: UserId) -> &str {
        self.ids.label(u)
    }

    /// Users following `v` (they watch v's activity). Empty for ids outside
    /// the graph, so log-only users behave as isolated nodes.
    pub fn followers(&self, v: UserId) -> &[UserId] {
        let v = v as usize;
        if v >= self.node_count() {
            return &[];
        }
        &self.in_targets[self.in_offsets[v]..self.in_offsets[v + 1]]
    }

    /// Users that `u` follows (whose activity u watches).
    pub fn followees(&self, u: UserId) -> &[UserId] {
        let u = u as usize;
        if u >= self.node_count() {
            return &[];
        }
        &self.out_targets[self.out_offsets[u]..self.out_offsets[u + 1]]
    }

    pub fn nodes(&self) -> impl Iterator<Item = UserId> {
        0..self.node_count() as UserId
    }

    /// Histogram of degree -> node count; counts sum to the node count.
    pub fn degree_distribution(&self, direction: Direction) -> Histogram {
        let mut h = Histogram::new();
        for u in self.nodes() {
            let deg = match direction {
                Direction::In => self.followers(u).len(),
                Direction::Out => self.followees(u).len(),
            };
            h.add(deg as u64);
        }
        h
    }

    pub fn summary(&self) -> GraphSummary {
        GraphSummary {
            nodes: self.node_count() as u64,
            edges: self.edge_count() as u64,
            dropped_self_loops: self.dropped_self_loops,
            collapsed_duplicates: self.collapsed_duplicates,
        }
    }

    /// Writes the graph back out in the edge-list format; a reload yields an
    /// identical edge set.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> io::Result<()> {
        for u in self.nodes() {
            for &v in self.followees(u) {
                writeln!(w, "{}\t{}", self.label(u), self.label(v))?;
            }
        }
        Ok(())
    }
}
