//! Interning of opaque user/story labels to dense integer indices.

use std::collections::HashMap;

/// Bidirectional map between string labels and dense `u32` indices.
///
/// Indices are assigned in first-seen order and are stable for the lifetime
/// of the interner.
#[derive(Debug, Clone, Default)]
pub struct Interner {
    labels: Vec<String>,
    index: HashMap<String, u32>,
}

impl Interner {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the index for `label`, inserting it if unseen.
    pub fn intern(&mut self, label: &str) -> u32 {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = u32::try_from(self.labels.len()).expect("more than u32::MAX distinct labels");
        self.labels.push(label.to_owned());
        self.index.insert(label.to_owned(), id);
        id
    }

    /// Index of `label` if it has been interned.
    pub fn get(&self, label: &str) -> Option<u32> {
        self.index.get(label).copied()
    }

    /// Label stored at `id`. Panics if `id` was never assigned.
    pub fn label(&self, id: u32) -> &str {
        &self.labels[id as usize]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// All labels in index order.
    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.labels.iter().map(String::as_str)
    }
}
