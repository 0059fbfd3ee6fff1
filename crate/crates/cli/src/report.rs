//! Reports: ordered `key = value` sections plus replayable artifacts.

use serde::{Deserialize, Serialize};

use crate::artifact::Artifact;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section {
    pub title: String,
    pub entries: Vec<(String, String)>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub sections: Vec<Section>,
    pub artifacts: Vec<Artifact>,
    /// Some verdict was left undecided at the configured bounds.
    #[serde(default)]
    pub unknown: bool,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Self {
            sections: vec![Section {
                title: title.into(),
                entries: Vec::new(),
            }],
            ..Self::default()
        }
    }

    /// Adds an entry to the last section.
    pub fn put(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        if self.sections.is_empty() {
            self.sections.push(Section::default());
        }
        let s = self.sections.last_mut().expect("nonempty");
        s.entries.push((key.into(), value.to_string()));
        self
    }

    pub fn flag(&mut self, key: impl Into<String>, value: bool) -> &mut Self {
        self.put(key, if value { "yes" } else { "no" })
    }

    pub fn artifact(&mut self, a: Artifact) -> &mut Self {
        self.artifacts.push(a);
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.sections
            .iter()
            .flat_map(|s| &s.entries)
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Appends the sections and artifacts of `other`.
    pub fn absorb(&mut self, other: Report) {
        self.sections.extend(other.sections);
        self.artifacts.extend(other.artifacts);
        self.unknown |= other.unknown;
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        let titled = self.sections.len() > 1;
        for (i, s) in self.sections.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            if titled && !s.title.is_empty() {
                out.push_str(&format!("[{}]\n", s.title));
            }
            for (k, v) in &s.entries {
                out.push_str(&format!("{k} = {v}\n"));
            }
        }
        out
    }

    pub fn json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}
