//! Activation DAGs, cascade extraction, and observed-tree sampling.
//!
//! For one story, the activation DAG has a node per activated user, indexed
//! by position in the validated activation order. An edge `v -> u` exists
//! exactly when u follows v in the follower graph and v activated strictly
//! earlier (ties resolved by the validated order), so the DAG is acyclic by
//! construction and its topological order is the activation order itself.

use std::collections::HashMap;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::events::{ActivationLog, ActivationSequence};
use crate::graph::{FollowerGraph, UserId};

/// Node of an [`ActivationDag`]: position in the story's activation order.
pub type Pos = u32;

#[derive(Debug, Error)]
pub enum CascadeError {
    #[error("story {story}: submitter position {pos} out of range ({len} activations)")]
    SubmitterOutOfRange { story: String, pos: u32, len: usize },
}

/// Per-story DAG of activation edges.
#[derive(Debug, Clone)]
pub struct ActivationDag {
    story: String,
    labels: Vec<String>,
    times: Vec<u64>,
    in_offsets: Vec<u32>,
    in_sources: Vec<Pos>,
    out_offsets: Vec<u32>,
    out_targets: Vec<Pos>,
    seeds: Vec<Pos>,
}

/// Builds DAGs for many stories of one log against one graph, reusing the
/// log-to-graph id bridge.
pub struct DagBuilder<'a> {
    graph: &'a FollowerGraph,
    log: &'a ActivationLog,
    to_graph: Vec<Option<UserId>>,
}

impl<'a> DagBuilder<'a> {
    pub fn new(graph: &'a FollowerGraph, log: &'a ActivationLog) -> Self {
        let to_graph = (0..log.user_count() as u32)
            .map(|u| graph.node_id(log.user_label(u)))
            .collect();
        Self {
            graph,
            log,
            to_graph,
        }
    }

    pub fn build(&self, seq: &ActivationSequence) -> ActivationDag {
        let n = seq.len();
        let mut labels = Vec::with_capacity(n);
        let mut times = Vec::with_capacity(n);
        // (src, dst) generated in dst-major order
        let mut edges: Vec<(Pos, Pos)> = Vec::new();
        let mut pos_of: HashMap<UserId, Pos> = HashMap::with_capacity(n);

        for (k, &(log_user, time)) in seq.entries().iter().enumerate() {
            let k = k as Pos;
            labels.push(self.log.user_label(log_user).to_owned());
            times.push(time);
            if let Some(gid) = self.to_graph[log_user as usize] {
                let start = edges.len();
                for &followee in self.graph.followees(gid) {
                    if let Some(&src) = pos_of.get(&followee) {
                        edges.push((src, k));
                    }
                }
                edges[start..].sort_unstable();
                pos_of.insert(gid, k);
            }
        }
        ActivationDag::from_edges(seq.story_id().to_owned(), labels, times, edges)
    }
}

impl ActivationDag {
    /// One-shot construction; prefer [`DagBuilder`] for whole corpora.
    pub fn build(graph: &FollowerGraph, log: &ActivationLog, seq: &ActivationSequence) -> Self {
        DagBuilder::new(graph, log).build(seq)
    }

    /// `edges` must connect earlier positions to strictly later ones and be
    /// grouped by destination in ascending order.
    fn from_edges(story: String, labels: Vec<String>, times: Vec<u64>, edges: Vec<(Pos, Pos)>) -> Self {
        let n = labels.len();
        debug_assert!(edges.iter().all(|&(v, u)| v < u && (u as usize) < n));

        let mut in_offsets = vec![0u32; n + 1];
        let mut out_offsets = vec![0u32; n + 1];
        for &(src, dst) in &edges {
            in_offsets[dst as usize + 1] += 1;
            out_offsets[src as usize + 1] += 1;
        }
        for i in 0..n {
            in_offsets[i + 1] += in_offsets[i];
            out_offsets[i + 1] += out_offsets[i];
        }
        let mut in_sources = vec![0 as Pos; edges.len()];
        let mut out_targets = vec![0 as Pos; edges.len()];
        let mut in_cursor: Vec<u32> = in_offsets.clone();
        let mut out_cursor: Vec<u32> = out_offsets.clone();
        for &(src, dst) in &edges {
            in_sources[in_cursor[dst as usize] as usize] = src;
            in_cursor[dst as usize] += 1;
            out_targets[out_cursor[src as usize] as usize] = dst;
            out_cursor[src as usize] += 1;
        }
        let seeds = (0..n as Pos)
            .filter(|&p| in_offsets[p as usize] == in_offsets[p as usize + 1])
            .collect();

        Self {
            story,
            labels,
            times,
            in_offsets,
            in_sources,
            out_offsets,
            out_targets,
            seeds,
        }
    }

    pub fn story_id(&self) -> &str {
        &self.story
    }

    /// Number of activated users.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, p: Pos) -> &str {
        &self.labels[p as usize]
    }

    pub fn time(&self, p: Pos) -> u64 {
        self.times[p as usize]
    }

    /// Earlier-activated followees of `p` (its possible activators).
    pub fn in_edges(&self, p: Pos) -> &[Pos] {
        &self.in_sources[self.in_offsets[p as usize] as usize..self.in_offsets[p as usize + 1] as usize]
    }

    /// Later-activated followers of `p`.
    pub fn out_edges(&self, p: Pos) -> &[Pos] {
        &self.out_targets[self.out_offsets[p as usize] as usize..self.out_offsets[p as usize + 1] as usize]
    }

    pub fn in_degree(&self, p: Pos) -> usize {
        self.in_edges(p).len()
    }

    pub fn out_degree(&self, p: Pos) -> usize {
        self.out_edges(p).len()
    }

    /// Total activation edges; equals the sum of in-degrees.
    pub fn edge_count(&self) -> usize {
        self.in_sources.len()
    }

    /// Nodes with zero in-edges, in temporal order.
    pub fn seeds(&self) -> &[Pos] {
        &self.seeds
    }

    pub fn positions(&self) -> impl Iterator<Item = Pos> {
        0..self.len() as Pos
    }

    /// One cascade per seed, in seed temporal order. Memberships may overlap
    /// when cascades collide; their union is the full activated set.
    pub fn extract_cascades(&self) -> Vec<Cascade> {
        self.seeds
            .iter()
            .map(|&s| self.reachable_from(s))
            .collect()
    }

    /// The cascade rooted at the submitter. The boolean is true when the
    /// submitter is a seed (always, unless a submitter override named a
    /// later voter); a non-seed submitter yields its reachable set, flagged.
    pub fn principal_cascade(&self, submitter: Pos) -> Result<(Cascade, bool), CascadeError> {
        if submitter as usize >= self.len() {
            return Err(CascadeError::SubmitterOutOfRange {
                story: self.story.clone(),
                pos: submitter,
                len: self.len(),
            });
        }
        let cascade = self.reachable_from(submitter);
        let is_seed = self.in_degree(submitter) == 0;
        Ok((cascade, is_seed))
    }

    fn reachable_from(&self, root: Pos) -> Cascade {
        let mut visited = vec![false; self.len()];
        let mut stack = vec![root];
        visited[root as usize] = true;
        let mut members = Vec::new();
        while let Some(p) = stack.pop() {
            members.push(p);
            for &q in self.out_edges(p) {
                if !visited[q as usize] {
                    visited[q as usize] = true;
                    stack.push(q);
                }
            }
        }
        members.sort_unstable();
        // every out-edge of a member lands on a member, so the induced edge
        // set is exactly the members' out-edges
        let edge_count = members.iter().map(|&p| self.out_degree(p)).sum();
        Cascade {
            seed: root,
            members,
            edge_count,
        }
    }

    /// Keeps one uniformly chosen in-edge per non-seed node, producing the
    /// forest an outside observer would reconstruct from single attributions.
    pub fn sample_observed_tree<R: Rng + ?Sized>(&self, rng: &mut R) -> ObservedTree {
        let parent = self
            .positions()
            .map(|p| {
                let sources = self.in_edges(p);
                match sources.len() {
                    0 => None,
                    1 => Some(sources[0]),
                    m => Some(sources[rng.random_range(0..m)]),
                }
            })
            .collect();
        ObservedTree { parent }
    }

    /// JSON export: `{story_id, nodes, edges, seeds}` with nodes in temporal
    /// order and edges as `[source, target]` label pairs.
    pub fn to_json(&self) -> DagJson<'_> {
        let edges = self
            .positions()
            .flat_map(|dst| {
                self.in_edges(dst)
                    .iter()
                    .map(move |&src| [self.label(src), self.label(dst)])
            })
            .collect();
        DagJson {
            story_id: &self.story,
            nodes: self.labels.iter().map(String::as_str).collect(),
            edges,
            seeds: self.seeds.iter().map(|&s| self.label(s)).collect(),
        }
    }
}

/// Serializable view of an [`ActivationDag`].
#[derive(Debug, Serialize)]
pub struct DagJson<'a> {
    pub story_id: &'a str,
    pub nodes: Vec<&'a str>,
    pub edges: Vec<[&'a str; 2]>,
    pub seeds: Vec<&'a str>,
}

/// One seed plus everything reachable from it via activation edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cascade {
    pub seed: Pos,
    /// Sorted member positions, including the seed.
    pub members: Vec<Pos>,
    /// Activation edges induced on the members.
    pub edge_count: usize,
}

impl Cascade {
    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, p: Pos) -> bool {
        self.members.binary_search(&p).is_ok()
    }
}

/// Forest from [`ActivationDag::sample_observed_tree`]: one parent per
/// non-seed node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservedTree {
    /// `parent[p]` is `None` exactly for seeds.
    pub parent: Vec<Option<Pos>>,
}

impl ObservedTree {
    /// Edge-distance of every node from its tree root.
    pub fn depths(&self) -> Vec<u32> {
        let mut depths = vec![0u32; self.parent.len()];
        for p in 0..self.parent.len() {
            if let Some(q) = self.parent[p] {
                depths[p] = depths[q as usize] + 1; // parents precede children
            }
        }
        depths
    }

    /// Tree root (seed) each node hangs from.
    pub fn roots(&self) -> Vec<Pos> {
        let mut roots = vec![0 as Pos; self.parent.len()];
        for p in 0..self.parent.len() {
            roots[p] = match self.parent[p] {
                Some(q) => roots[q as usize],
                None => p as Pos,
            };
        }
        roots
    }

    /// Deepest node depth, or 0 for an empty forest.
    pub fn depth(&self) -> u32 {
        self.depths().into_iter().max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    /// 7 users; X -> Y below means X follows Y; activation order 1..7.
    pub(crate) const FIXTURE_EDGES: &str = "3 1\n4 1\n4 2\n5 2\n6 1\n6 3\n7 1\n";
    pub(crate) const FIXTURE_LOG: &str = "story_id,user_id,timestamp\n\
        s1,1,1\ns1,2,2\ns1,3,3\ns1,4,4\ns1,5,5\ns1,6,6\ns1,7,7\n";

    pub(crate) fn fixture_dag() -> ActivationDag {
        let g = FollowerGraph::from_edge_list_reader(FIXTURE_EDGES.as_bytes()).unwrap();
        let log = ActivationLog::from_csv_reader(FIXTURE_LOG.as_bytes()).unwrap();
        ActivationDag::build(&g, &log, log.get("s1").unwrap())
    }

    fn edge_labels(d: &ActivationDag) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for p in d.positions() {
            for &src in d.in_edges(p) {
                out.push((d.label(src).to_owned(), d.label(p).to_owned()));
            }
        }
        out.sort();
        out
    }

    #[test]
    fn fixture_activation_edges() {
        let d = fixture_dag();
        let expect: Vec<(String, String)> = [
            ("1", "3"),
            ("1", "4"),
            ("2", "4"),
            ("2", "5"),
            ("1", "6"),
            ("3", "6"),
            ("1", "7"),
        ]
        .iter()
        .map(|&(a, b)| (a.to_owned(), b.to_owned()))
        .collect();
        let mut expect = expect;
        expect.sort();
        assert_eq!(edge_labels(&d), expect);
        assert_eq!(d.edge_count(), 7);
    }

    #[test]
    fn fixture_seeds_in_temporal_order() {
        let d = fixture_dag();
        let seeds: Vec<&str> = d.seeds().iter().map(|&s| d.label(s)).collect();
        assert_eq!(seeds, ["1", "2"]);
    }

    #[test]
    fn fixture_cascades_overlap_on_user_4() {
        let d = fixture_dag();
        let cascades = d.extract_cascades();
        assert_eq!(cascades.len(), 2);
        let members = |c: &Cascade| -> Vec<String> {
            c.members.iter().map(|&p| d.label(p).to_owned()).collect()
        };
        assert_eq!(members(&cascades[0]), ["1", "3", "4", "6", "7"]);
        assert_eq!(members(&cascades[1]), ["2", "4", "5"]);
        assert_eq!(cascades[0].edge_count, 5);
        assert_eq!(cascades[1].edge_count, 2);
        // user 4 is position 3
        assert!(cascades[0].contains(3));
        assert!(cascades[1].contains(3));
    }

    #[test]
    fn fixture_principal_cascade() {
        let d = fixture_dag();
        let (principal, is_seed) = d.principal_cascade(0).unwrap();
        assert!(is_seed);
        let members: Vec<&str> = principal.members.iter().map(|&p| d.label(p)).collect();
        assert_eq!(members, ["1", "3", "4", "6", "7"]);
        assert_eq!(principal.size(), 5);
    }

    #[test]
    fn single_voter_story() {
        let g = FollowerGraph::from_edge_list_reader("a b\n".as_bytes()).unwrap();
        let log =
            ActivationLog::from_csv_reader("story_id,user_id,timestamp\ns1,z,1\n".as_bytes())
                .unwrap();
        let d = ActivationDag::build(&g, &log, log.get("s1").unwrap());
        assert_eq!(d.len(), 1);
        assert_eq!(d.edge_count(), 0);
        assert_eq!(d.seeds(), &[0]);
        let (c, is_seed) = d.principal_cascade(0).unwrap();
        assert!(is_seed);
        assert_eq!(c.size(), 1);
        assert_eq!(c.edge_count, 0);
    }

    #[test]
    fn chain_has_single_seed() {
        // b follows a, c follows b; order a, b, c
        let g = FollowerGraph::from_edge_list_reader("b a\nc b\n".as_bytes()).unwrap();
        let log = ActivationLog::from_csv_reader(
            "story_id,user_id,timestamp\ns1,a,1\ns1,b,2\ns1,c,3\n".as_bytes(),
        )
        .unwrap();
        let d = ActivationDag::build(&g, &log, log.get("s1").unwrap());
        let seeds: Vec<&str> = d.seeds().iter().map(|&s| d.label(s)).collect();
        assert_eq!(seeds, ["a"]);
    }

    #[test]
    fn all_isolated_voters_become_unit_cascades() {
        let g = FollowerGraph::from_edge_list_reader("".as_bytes()).unwrap();
        let log = ActivationLog::from_csv_reader(
            "story_id,user_id,timestamp\ns1,a,1\ns1,b,2\ns1,c,3\n".as_bytes(),
        )
        .unwrap();
        let d = ActivationDag::build(&g, &log, log.get("s1").unwrap());
        let cascades = d.extract_cascades();
        assert_eq!(cascades.len(), 3);
        assert!(cascades.iter().all(|c| c.size() == 1));
    }

    #[test]
    fn sampled_tree_forced_choice_depth() {
        let d = fixture_dag();
        // positions: user k is position k-1; node 6 (pos 5) has in-edges
        // {1,3}, node 4 (pos 3) has {1,2}
        let mut found = false;
        for seed in 0..200u64 {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let tree = d.sample_observed_tree(&mut rng);
            if tree.parent[5] == Some(2) && tree.parent[3] == Some(1) {
                let depths = tree.depths();
                // chain 1 -> 3 -> 6
                assert_eq!(depths[5], 2);
                assert_eq!(tree.roots()[5], 0);
                found = true;
                break;
            }
        }
        assert!(found, "no seed produced the forced parent choice");
    }

    #[test]
    fn sampled_tree_is_identity_when_in_edges_unique() {
        let g = FollowerGraph::from_edge_list_reader("b a\nc b\n".as_bytes()).unwrap();
        let log = ActivationLog::from_csv_reader(
            "story_id,user_id,timestamp\ns1,a,1\ns1,b,2\ns1,c,3\n".as_bytes(),
        )
        .unwrap();
        let d = ActivationDag::build(&g, &log, log.get("s1").unwrap());
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let tree = d.sample_observed_tree(&mut rng);
        assert_eq!(tree.parent, vec![None, Some(0), Some(1)]);
        assert_eq!(tree.depth(), 2);
    }

    #[test]
    fn sampled_parent_choice_is_uniform() {
        let d = fixture_dag();
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        let trials = 10_000;
        let mut picked_one = 0u32;
        for _ in 0..trials {
            let tree = d.sample_observed_tree(&mut rng);
            if tree.parent[3] == Some(0) {
                picked_one += 1; // node 4 kept edge from user 1
            }
        }
        let freq = f64::from(picked_one) / f64::from(trials);
        assert!((freq - 0.5).abs() < 0.02, "freq = {freq}");
    }

    #[test]
    fn sampling_is_deterministic_given_seed() {
        let d = fixture_dag();
        let t1 = d.sample_observed_tree(&mut ChaCha12Rng::seed_from_u64(9));
        let t2 = d.sample_observed_tree(&mut ChaCha12Rng::seed_from_u64(9));
        assert_eq!(t1, t2);
    }

    #[test]
    fn dag_json_shape() {
        let d = fixture_dag();
        let json = serde_json::to_value(d.to_json()).unwrap();
        assert_eq!(json["story_id"], "s1");
        assert_eq!(json["nodes"].as_array().unwrap().len(), 7);
        assert_eq!(json["edges"].as_array().unwrap().len(), 7);
        assert_eq!(json["seeds"], serde_json::json!(["1", "2"]));
    }
}
