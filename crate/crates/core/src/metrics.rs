//! Macroscopic cascade properties: per-cascade, per-story, and corpus-level.

use serde::Serialize;

use crate::cascade::{ActivationDag, Cascade, Pos};
use crate::dist::{CcdfTable, Histogram};

/// Structural measurements of a single cascade. Diameters are measured in
/// edges, so a seed-only cascade has both diameters 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CascadeMetrics {
    /// Number of members, including the seed.
    pub size: u32,
    /// Length of the longest chain anywhere within the cascade's edges.
    pub max_diameter: u32,
    /// Seed eccentricity: longest of the shortest paths from the seed.
    pub min_diameter: u32,
    /// Maximal branching: most followers any one member activated.
    pub spread: u32,
}

/// Computes [`CascadeMetrics`] for one cascade of `dag`.
///
/// Relies on two structural facts: member positions are already in
/// topological order, and every out-edge of a member lands on a member.
pub fn cascade_metrics(dag: &ActivationDag, cascade: &Cascade) -> CascadeMetrics {
    let n = dag.len();
    let mut longest = vec![0u32; n];
    let mut max_diameter = 0u32;
    let mut spread = 0u32;
    for &p in &cascade.members {
        spread = spread.max(dag.out_degree(p) as u32);
        for &q in dag.out_edges(p) {
            longest[q as usize] = longest[q as usize].max(longest[p as usize] + 1);
        }
        max_diameter = max_diameter.max(longest[p as usize]);
    }

    const UNSEEN: u32 = u32::MAX;
    let mut dist = vec![UNSEEN; n];
    dist[cascade.seed as usize] = 0;
    let mut queue = std::collections::VecDeque::from([cascade.seed]);
    let mut min_diameter = 0u32;
    while let Some(p) = queue.pop_front() {
        min_diameter = min_diameter.max(dist[p as usize]);
        for &q in dag.out_edges(p) {
            if dist[q as usize] == UNSEEN {
                dist[q as usize] = dist[p as usize] + 1;
                queue.push_back(q);
            }
        }
    }

    CascadeMetrics {
        size: cascade.size() as u32,
        max_diameter,
        min_diameter,
        spread,
    }
}

/// One cascade's record inside a story report.
#[derive(Debug, Clone, Serialize)]
pub struct CascadeRecord {
    pub seed: String,
    #[serde(flatten)]
    pub metrics: CascadeMetrics,
    /// Activation edges induced on this cascade's members.
    pub edges: usize,
}

/// All macroscopic properties of one story's contagion process.
#[derive(Debug, Clone, Serialize)]
pub struct StoryMetrics {
    pub story_id: String,
    /// Total activated users.
    pub activated: u32,
    pub seed_count: u32,
    pub cascades: Vec<CascadeRecord>,
    pub largest_cascade_size: u32,
    pub global_max_diameter: u32,
    /// Largest of the shortest distances from any activated node to its
    /// nearest seed.
    pub global_min_diameter: u32,
    pub global_spread: u32,
    /// Total activation edges: how many earlier voters each participant
    /// follows, summed over participants.
    pub community_value: u64,
    pub normalized_community_value: f64,
    pub principal: CascadeMetrics,
    /// False only when a submitter override rooted the principal cascade at
    /// a non-seed voter.
    pub principal_is_seed: bool,
}

/// Computes story-level metrics from the DAG, its extracted cascades, and
/// the submitter position. `cascades` must be `dag.extract_cascades()`.
pub fn story_metrics(
    dag: &ActivationDag,
    cascades: &[Cascade],
    submitter: Pos,
) -> Result<StoryMetrics, crate::cascade::CascadeError> {
    let (principal_cascade, principal_is_seed) = dag.principal_cascade(submitter)?;
    let principal = cascade_metrics(dag, &principal_cascade);

    let mut records = Vec::with_capacity(cascades.len());
    let mut largest_cascade_size = 0u32;
    let mut global_max_diameter = 0u32;
    let mut global_spread = 0u32;
    for cascade in cascades {
        let metrics = cascade_metrics(dag, cascade);
        largest_cascade_size = largest_cascade_size.max(metrics.size);
        global_max_diameter = global_max_diameter.max(metrics.max_diameter);
        global_spread = global_spread.max(metrics.spread);
        records.push(CascadeRecord {
            seed: dag.label(cascade.seed).to_owned(),
            metrics,
            edges: cascade.edge_count,
        });
    }

    // multi-source BFS from all seeds: distance to the nearest seed
    const UNSEEN: u32 = u32::MAX;
    let mut dist = vec![UNSEEN; dag.len()];
    let mut queue = std::collections::VecDeque::new();
    for &s in dag.seeds() {
        dist[s as usize] = 0;
        queue.push_back(s);
    }
    let mut global_min_diameter = 0u32;
    while let Some(p) = queue.pop_front() {
        global_min_diameter = global_min_diameter.max(dist[p as usize]);
        for &q in dag.out_edges(p) {
            if dist[q as usize] == UNSEEN {
                dist[q as usize] = dist[p as usize] + 1;
                queue.push_back(q);
            }
        }
    }

    let activated = dag.len() as u32;
    let community_value = dag.edge_count() as u64;
    let normalized_community_value = if activated == 0 {
        0.0
    } else {
        community_value as f64 / f64::from(activated)
    };

    Ok(StoryMetrics {
        story_id: dag.story_id().to_owned(),
        activated,
        seed_count: dag.seeds().len() as u32,
        cascades: records,
        largest_cascade_size,
        global_max_diameter,
        global_min_diameter,
        global_spread,
        community_value,
        normalized_community_value,
        principal,
        principal_is_seed,
    })
}

/// Corpus-level distributions of every reported metric, ready to export as
/// `value,count,ccdf` tables.
#[derive(Debug, Clone, Default)]
pub struct CorpusDistributions {
    /// Sizes of every cascade of every story, pooled.
    pub global_cascade_size: Histogram,
    pub largest_cascade_size: Histogram,
    pub global_max_diameter: Histogram,
    pub global_min_diameter: Histogram,
    pub global_spread: Histogram,
    pub principal_size: Histogram,
    pub principal_max_diameter: Histogram,
    pub principal_min_diameter: Histogram,
    pub principal_spread: Histogram,
    pub community_value: Histogram,
    normalized_community_value: Vec<f64>,
}

impl CorpusDistributions {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_story(&mut self, m: &StoryMetrics) {
        for c in &m.cascades {
            self.global_cascade_size.add(u64::from(c.metrics.size));
        }
        self.largest_cascade_size
            .add(u64::from(m.largest_cascade_size));
        self.global_max_diameter
            .add(u64::from(m.global_max_diameter));
        self.global_min_diameter
            .add(u64::from(m.global_min_diameter));
        self.global_spread.add(u64::from(m.global_spread));
        self.principal_size.add(u64::from(m.principal.size));
        self.principal_max_diameter
            .add(u64::from(m.principal.max_diameter));
        self.principal_min_diameter
            .add(u64::from(m.principal.min_diameter));
        self.principal_spread.add(u64::from(m.principal.spread));
        self.community_value.add(m.community_value);
        self.normalized_community_value
            .push(m.normalized_community_value);
    }

    /// (metric name, table) pairs; names double as output file stems.
    pub fn tables(&self) -> Vec<(&'static str, CcdfTable)> {
        vec![
            ("global_cascade_size", self.global_cascade_size.ccdf()),
            ("largest_cascade_size", self.largest_cascade_size.ccdf()),
            ("global_max_diameter", self.global_max_diameter.ccdf()),
            ("global_min_diameter", self.global_min_diameter.ccdf()),
            ("global_spread", self.global_spread.ccdf()),
            ("principal_size", self.principal_size.ccdf()),
            ("principal_max_diameter", self.principal_max_diameter.ccdf()),
            ("principal_min_diameter", self.principal_min_diameter.ccdf()),
            ("principal_spread", self.principal_spread.ccdf()),
            ("community_value", self.community_value.ccdf()),
            (
                "normalized_community_value",
                CcdfTable::from_samples(&self.normalized_community_value),
            ),
        ]
    }
}
