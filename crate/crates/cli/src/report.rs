//! Deterministic run reports: ordered `key=value` records plus optional
//! free-text blocks for the human format.

use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Human,
    Records,
}

#[derive(Debug, Default)]
pub struct RunReport {
    records: Vec<(String, String)>,
    blocks: Vec<String>,
    hasher: Sha256,
}

impl RunReport {
    pub fn new(command: &str, seed: u64) -> Self {
        let mut r = RunReport::default();
        r.hasher.update(command.as_bytes());
        r.put("tool", format!("agsp {}", env!("CARGO_PKG_VERSION")));
        r.put("command", command);
        r.put("seed", seed);
        r
    }

    /// Folds an input file into the digest.
    pub fn input(&mut self, content: &str) {
        self.hasher.update((content.len() as u64).to_le_bytes());
        self.hasher.update(content.as_bytes());
    }

    pub fn put(&mut self, key: impl Into<String>, value: impl ToString) {
        self.records.push((key.into(), value.to_string()));
    }

    pub fn extend(&mut self, records: impl IntoIterator<Item = (String, String)>) {
        self.records.extend(records);
    }

    /// Text shown only in the human format.
    pub fn block(&mut self, text: impl Into<String>) {
        self.blocks.push(text.into());
    }

    pub fn render(&self, format: Format) -> String {
        let digest: String = self
            .hasher
            .clone()
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect();
        let mut out = String::new();
        let (head, rest) = self.records.split_at(3.min(self.records.len()));
        let lines = head
            .iter()
            .cloned()
            .chain(std::iter::once(("inputs".to_string(), digest)))
            .chain(rest.iter().cloned());
        match format {
            Format::Records => {
                for (k, v) in lines {
                    out += &format!("{k}={v}\n");
                }
            }
            Format::Human => {
                for (k, v) in lines {
                    out += &format!("{k}: {v}\n");
                }
                for b in &self.blocks {
                    out.push('\n');
                    out += b;
                    if !b.ends_with('\n') {
                        out.push('\n');
                    }
                }
            }
        }
        out
    }
}
