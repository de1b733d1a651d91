//! Ingestion and validation of per-story activation logs (votes/retweets).
//!
//! Input is a CSV with header `story_id,user_id,timestamp` plus an optional
//! `is_submitter` column. Per story, rows are sorted by time (ties keep file
//! order), duplicate users keep their earliest activation, and the submitter
//! defaults to the first validated event unless overridden.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, Read};
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::dist::Histogram;
use crate::graph::FollowerGraph;
use crate::ids::Interner;

/// Dense index into an [`ActivationLog`]'s user table. Independent of the
/// follower graph's id space; the cascade builder bridges the two.
pub type LogUserId = u32;

#[derive(Debug, Error)]
pub enum LogError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("expected header story_id,user_id,timestamp[,is_submitter], found \"{found}\"")]
    Header { found: String },
    #[error("line {line}: {message}")]
    MalformedRow { line: u64, message: String },
    #[error("line {line}: story {story} already has submitter override \"{existing}\"")]
    ConflictingSubmitter {
        line: u64,
        story: String,
        existing: String,
    },
}

/// One story's validated activation history.
#[derive(Debug, Clone)]
pub struct ActivationSequence {
    story: String,
    /// (user, time) in validated order: increasing time, ties by first
    /// appearance in the file.
    entries: Vec<(LogUserId, u64)>,
    submitter_pos: u32,
    submitter_overridden: bool,
}

impl ActivationSequence {
    pub fn story_id(&self) -> &str {
        &self.story
    }

    pub fn entries(&self) -> &[(LogUserId, u64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Position of the submitter in the validated order (0 unless an
    /// `is_submitter` override named a later voter).
    pub fn submitter_pos(&self) -> u32 {
        self.submitter_pos
    }

    pub fn submitter(&self) -> LogUserId {
        self.entries[self.submitter_pos as usize].0
    }

    pub fn submitter_overridden(&self) -> bool {
        self.submitter_overridden
    }
}

/// Validation report emitted as JSON next to analysis outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub stories: u64,
    pub events: u64,
    pub duplicates_dropped: u64,
    pub unknown_users: u64,
    pub timestamp_ties: u64,
}

/// All validated sequences of one log file, with a shared user table.
#[derive(Debug, Clone)]
pub struct ActivationLog {
    users: Interner,
    stories: Vec<ActivationSequence>,
    duplicates_dropped: u64,
    timestamp_ties: u64,
}

impl ActivationLog {
    pub fn from_csv_path<P: AsRef<Path>>(path: P) -> Result<Self, LogError> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|source| LogError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_csv_reader(file)
    }

    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self, LogError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(reader);

        let headers = rdr.headers()?.clone();
        let cols: Vec<&str> = headers.iter().collect();
        let has_submitter_col = match cols.as_slice() {
            ["story_id", "user_id", "timestamp"] => false,
            ["story_id", "user_id", "timestamp", "is_submitter"] => true,
            // a zero-byte file is a legal empty log
            [] | [""] => false,
            _ => {
                return Err(LogError::Header {
                    found: cols.join(","),
                })
            }
        };

        let mut users = Interner::new();
        // story -> rows in file order: (user, time, submitter flag)
        let mut raw: Vec<(String, Vec<(LogUserId, u64, bool)>)> = Vec::new();
        let mut story_index: HashMap<String, usize> = HashMap::new();
        let mut overrides: HashMap<usize, LogUserId> = HashMap::new();

        for record in rdr.records() {
            let record = record?;
            let line = record.position().map_or(0, |p| p.line());
            if record.iter().all(|f| f.is_empty()) {
                continue;
            }
            let expected = if has_submitter_col { 4 } else { 3 };
            if record.len() != expected {
                return Err(LogError::MalformedRow {
                    line,
                    message: format!("expected {expected} fields, found {}", record.len()),
                });
            }
            let story = &record[0];
            let user = &record[1];
            if story.is_empty() || user.is_empty() {
                return Err(LogError::MalformedRow {
                    line,
                    message: "empty story_id or user_id".to_owned(),
                });
            }
            let time: u64 = record[2].parse().map_err(|e| LogError::MalformedRow {
                line,
                message: format!("bad timestamp \"{}\": {e}", &record[2]),
            })?;
            let flagged = if has_submitter_col {
                match &record[3] {
                    "0" | "" => false,
                    "1" => true,
                    other => {
                        return Err(LogError::MalformedRow {
                            line,
                            message: format!("is_submitter must be 0 or 1, found \"{other}\""),
                        })
                    }
                }
            } else {
                false
            };

            let uid = users.intern(user);
            let sidx = match story_index.get(story) {
                Some(&i) => i,
                None => {
                    let i = raw.len();
                    story_index.insert(story.to_owned(), i);
                    raw.push((story.to_owned(), Vec::new()));
                    i
                }
            };
            if flagged {
                match overrides.get(&sidx) {
                    Some(&existing) if existing != uid => {
                        return Err(LogError::ConflictingSubmitter {
                            line,
                            story: story.to_owned(),
                            existing: users.label(existing).to_owned(),
                        });
                    }
                    _ => {
                        overrides.insert(sidx, uid);
                    }
                }
            }
            raw.get_mut(sidx).unwrap().1.push((uid, time, flagged));
        }

        let mut duplicates_dropped = 0u64;
        let mut timestamp_ties = 0u64;
        let mut stories: Vec<ActivationSequence> = Vec::with_capacity(raw.len());
        for (sidx, (story, rows)) in raw.into_iter().enumerate() {
            let file_order: Vec<(LogUserId, u64)> = rows.iter().map(|&(u, t, _)| (u, t)).collect();
            let (entries, dups, ties) = validate_entries(file_order);
            duplicates_dropped += dups;
            timestamp_ties += ties;

            let (submitter_pos, submitter_overridden) = match overrides.get(&sidx) {
                Some(&uid) => {
                    let pos = entries
                        .iter()
                        .position(|&(u, _)| u == uid)
                        .expect("override user has at least one validated entry");
                    (pos as u32, pos != 0)
                }
                None => (0, false),
            };
            stories.push(ActivationSequence {
                story,
                entries,
                submitter_pos,
                submitter_overridden,
            });
        }
        stories.sort_by(|a, b| a.story.cmp(&b.story));

        Ok(Self {
            users,
            stories,
            duplicates_dropped,
            timestamp_ties,
        })
    }

    /// Validated sequences in story-id order.
    pub fn stories(&self) -> &[ActivationSequence] {
        &self.stories
    }

    pub fn get(&self, story_id: &str) -> Option<&ActivationSequence> {
        self.stories
            .binary_search_by(|s| s.story.as_str().cmp(story_id))
            .ok()
            .map(|i| &self.stories[i])
    }

    pub fn story_count(&self) -> usize {
        self.stories.len()
    }

    /// Total validated events across stories.
    pub fn event_count(&self) -> u64 {
        self.stories.iter().map(|s| s.len() as u64).sum()
    }

    pub fn user_count(&self) -> usize {
        self.users.len()
    }

    pub fn user_label(&self, u: LogUserId) -> &str {
        self.users.label(u)
    }

    pub fn duplicates_dropped(&self) -> u64 {
        self.duplicates_dropped
    }

    pub fn timestamp_ties(&self) -> u64 {
        self.timestamp_ties
    }

    /// Histogram of activations-per-user -> user count over validated events.
    pub fn activity_distribution(&self) -> Histogram {
        let mut per_user = vec![0u64; self.users.len()];
        for s in &self.stories {
            for &(u, _) in &s.entries {
                per_user[u as usize] += 1;
            }
        }
        let mut h = Histogram::new();
        for &c in &per_user {
            if c > 0 {
                h.add(c);
            }
        }
        h
    }

    /// Counts for the validation report; `graph` supplies the unknown-user
    /// count (log users absent from the follower graph).
    pub fn validation_report(&self, graph: Option<&FollowerGraph>) -> ValidationReport {
        let unknown_users = match graph {
            Some(g) => self
                .users
                .labels()
                .filter(|label| !g.contains(label))
                .count() as u64,
            None => 0,
        };
        ValidationReport {
            stories: self.story_count() as u64,
            events: self.event_count(),
            duplicates_dropped: self.duplicates_dropped,
            unknown_users,
            timestamp_ties: self.timestamp_ties,
        }
    }
}

/// Sorts by time keeping file order on ties, then drops repeat users keeping
/// their earliest entry. Returns (validated, duplicates dropped, tie count).
fn validate_entries(entries: Vec<(LogUserId, u64)>) -> (Vec<(LogUserId, u64)>, u64, u64) {
    let mut sorted = entries;
    sorted.sort_by_key(|&(_, t)| t); // stable: ties keep file order
    let mut seen: HashMap<LogUserId, ()> = HashMap::with_capacity(sorted.len());
    let mut validated: Vec<(LogUserId, u64)> = Vec::with_capacity(sorted.len());
    let mut dups = 0u64;
    for (u, t) in sorted {
        if seen.insert(u, ()).is_some() {
            dups += 1;
        } else {
            validated.push((u, t));
        }
    }
    let ties = validated.windows(2).filter(|w| w[0].1 == w[1].1).count() as u64;
    (validated, dups, ties)
}
