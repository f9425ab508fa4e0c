//! Line-oriented `[section]` / `key = value` documents.
//!
//! `#` and `;` start comments. Keys are case-sensitive. Every consumer reads
//! its keys through a [`SectionReader`] and calls `finish`, which rejects any
//! key nobody asked for.

use std::collections::HashSet;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub name: String,
    pub line: usize,
    pub entries: Vec<Entry>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Document {
    pub sections: Vec<Section>,
}

impl Document {
    pub fn parse(text: &str) -> Result<Document> {
        let mut doc = Document::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = strip_comment(raw).trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| Error::Config {
                    line,
                    message: format!("malformed section header `{content}`"),
                })?;
                let name = name.trim();
                if name.is_empty() {
                    return Err(Error::Config {
                        line,
                        message: "empty section name".into(),
                    });
                }
                if doc.sections.iter().any(|s| s.name == name) {
                    return Err(Error::Config {
                        line,
                        message: format!("duplicate section [{name}]"),
                    });
                }
                doc.sections.push(Section {
                    name: name.to_string(),
                    line,
                    entries: Vec::new(),
                });
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::Config {
                line,
                message: format!("expected `key = value`, found `{content}`"),
            })?;
            let key = key.trim();
            if key.is_empty() {
                return Err(Error::Config {
                    line,
                    message: "missing key".into(),
                });
            }
            let section = doc.sections.last_mut().ok_or_else(|| Error::Config {
                line,
                message: format!("key `{key}` appears before any [section]"),
            })?;
            if section.entries.iter().any(|e| e.key == key) {
                return Err(Error::Config {
                    line,
                    message: format!("duplicate key `{key}` in [{}]", section.name),
                });
            }
            section.entries.push(Entry {
                key: key.to_string(),
                value: value.trim().to_string(),
                line,
            });
        }
        Ok(doc)
    }

    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find(['#', ';']) {
        Some(pos) => &line[..pos],
        None => line,
    }
}

/// Tracks which keys of a section have been consumed.
pub struct SectionReader<'a> {
    section: &'a Section,
    used: HashSet<&'a str>,
}

impl<'a> SectionReader<'a> {
    pub fn new(section: &'a Section) -> Self {
        SectionReader {
            section,
            used: HashSet::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.section.name
    }

    pub fn line(&self) -> usize {
        self.section.line
    }

    fn entry(&mut self, key: &str) -> Option<&'a Entry> {
        let entry = self.section.entries.iter().find(|e| e.key == key)?;
        self.used.insert(entry.key.as_str());
        Some(entry)
    }

    pub fn has(&self, key: &str) -> bool {
        self.section.entries.iter().any(|e| e.key == key)
    }

    /// Raw string value and its line.
    pub fn string(&mut self, key: &str) -> Option<(&'a str, usize)> {
        self.entry(key).map(|e| (e.value.as_str(), e.line))
    }

    pub fn f64(&mut self, key: &str) -> Result<Option<f64>> {
        match self.entry(key) {
            None => Ok(None),
            Some(e) => parse_f64(&e.value)
                .map(Some)
                .ok_or_else(|| mismatch(e, "a finite real")),
        }
    }

    /// Overwrites `slot` when the key is present.
    pub fn f64_into(&mut self, key: &str, slot: &mut f64) -> Result<()> {
        if let Some(v) = self.f64(key)? {
            *slot = v;
        }
        Ok(())
    }

    pub fn u64(&mut self, key: &str) -> Result<Option<u64>> {
        match self.entry(key) {
            None => Ok(None),
            Some(e) => e
                .value
                .parse()
                .map(Some)
                .map_err(|_| mismatch(e, "a non-negative integer")),
        }
    }

    pub fn bool(&mut self, key: &str) -> Result<Option<bool>> {
        match self.entry(key) {
            None => Ok(None),
            Some(e) => match e.value.as_str() {
                "true" | "yes" | "on" | "1" => Ok(Some(true)),
                "false" | "no" | "off" | "0" => Ok(Some(false)),
                _ => Err(mismatch(e, "a boolean")),
            },
        }
    }

    /// Comma-separated list of reals.
    pub fn f64_list(&mut self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.entry(key) {
            None => Ok(None),
            Some(e) => e
                .value
                .split(',')
                .map(|part| parse_f64(part.trim()).ok_or_else(|| mismatch(e, "a list of reals")))
                .collect::<Result<Vec<_>>>()
                .map(Some),
        }
    }

    /// Line of `key`, or the section header when absent.
    pub fn line_of(&self, key: &str) -> usize {
        self.section
            .entries
            .iter()
            .find(|e| e.key == key)
            .map(|e| e.line)
            .unwrap_or(self.section.line)
    }

    /// Fails on the first key that was never read.
    pub fn finish(self) -> Result<()> {
        for e in &self.section.entries {
            if !self.used.contains(e.key.as_str()) {
                return Err(Error::Config {
                    line: e.line,
                    message: format!("unknown key `{}` in [{}]", e.key, self.section.name),
                });
            }
        }
        Ok(())
    }
}

fn parse_f64(text: &str) -> Option<f64> {
    text.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn mismatch(entry: &Entry, expected: &str) -> Error {
    Error::Config {
        line: entry.line,
        message: format!("`{}` must be {expected}, found `{}`", entry.key, entry.value),
    }
}
