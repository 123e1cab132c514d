//! AMSBIB structured bibliographic markup.
//!
//! A reference is a sequence of LaTeX-style field commands:
//!
//! ```text
//! \by A.~N.~Kolmogorov \paper On tables of random numbers
//! \jour Sankhya Ser.~A \yr 1963 \vol 25 \pages 369--376
//! ```
//!
//! Recognized fields are `\by`, `\paper`, `\book`, `\jour`, `\yr`, `\vol`,
//! `\issue`, `\pages`, `\extra` and the link commands `\crossref`,
//! `\mathnet`, `\mathscinet`, `\zmath`, `\adsnasa`, `\isi` and
//! `\elink{label}{url}`. A value runs from its command to the next field
//! command (or the end of input); braces may delimit it explicitly. Any other
//! top-level control word opens an unknown field which is kept verbatim.
//!
//! All functions here are pure.

mod lexer;
mod parser;
mod render;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use lexer::{tokenize, Token, TokenKind};
pub use parser::{normalize_pages, parse_bytes, parse_reference, parse_str, ParseOutcome, ParseWarning};
pub use render::{link_url, render, Format};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AmsbibError {
    #[error("unbalanced braces at byte {position}")]
    UnbalancedBraces { position: usize },
    #[error("reference contains no recognized field")]
    EmptyReference,
    #[error("input is not valid UTF-8 (byte {position})")]
    InvalidUtf8 { position: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    #[default]
    JournalBibliography,
    PersonalList,
    ManualEntry,
}

/// One reference as stored: AMSBIB source plus where it came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawReference {
    pub source: String,
    #[serde(default)]
    pub origin: Origin,
}

impl RawReference {
    pub fn new(source: impl Into<String>, origin: Origin) -> Result<Self, AmsbibError> {
        let source = source.into();
        if source.trim().is_empty() {
            return Err(AmsbibError::EmptyReference);
        }
        tokenize(&source)?;
        Ok(Self { source, origin })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceKind {
    Paper,
    Book,
    #[default]
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct PersonName {
    pub family: String,
    /// Given names or initials, space separated (`"A. N."`).
    #[serde(default)]
    pub given: String,
    /// Alternative transliteration, stored as written.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
}

impl PersonName {
    pub fn new(family: impl Into<String>, given: impl Into<String>) -> Self {
        Self {
            family: family.into(),
            given: given.into(),
            variant: None,
        }
    }

    /// Initial letters of the given names, e.g. `"A. N."` and `"Andrei Nikolaevich"` both give `"AN"`.
    pub fn initials(&self) -> String {
        self.given
            .split(|c: char| c.is_whitespace() || c == '.' || c == '-' || c == '~')
            .filter_map(|part| part.chars().next())
            .flat_map(char::to_uppercase)
            .collect()
    }
}

impl fmt::Display for PersonName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.given.is_empty() {
            f.write_str(&self.family)
        } else {
            write!(f, "{} {}", self.given, self.family)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PageRange {
    pub first: u32,
    pub last: u32,
}

impl PageRange {
    pub fn new(first: u32, last: u32) -> Option<Self> {
        (first >= 1 && first <= last).then_some(Self { first, last })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Pages {
    Range(PageRange),
    Text(String),
}

impl Pages {
    pub fn first_page(&self) -> Option<u32> {
        match self {
            Pages::Range(r) => Some(r.first),
            Pages::Text(_) => None,
        }
    }
}

impl fmt::Display for Pages {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pages::Range(r) if r.first == r.last => write!(f, "{}", r.first),
            Pages::Range(r) => write!(f, "{}--{}", r.first, r.last),
            Pages::Text(t) => f.write_str(t),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkKind {
    Doi,
    Mathnet,
    Mathscinet,
    Zmath,
    Adsnasa,
    Isi,
    Elink,
}

impl LinkKind {
    pub const ALL: [LinkKind; 7] = [
        LinkKind::Doi,
        LinkKind::Mathnet,
        LinkKind::Mathscinet,
        LinkKind::Zmath,
        LinkKind::Adsnasa,
        LinkKind::Isi,
        LinkKind::Elink,
    ];

    /// The AMSBIB command carrying this link.
    pub fn command(self) -> &'static str {
        match self {
            LinkKind::Doi => "crossref",
            LinkKind::Mathnet => "mathnet",
            LinkKind::Mathscinet => "mathscinet",
            LinkKind::Zmath => "zmath",
            LinkKind::Adsnasa => "adsnasa",
            LinkKind::Isi => "isi",
            LinkKind::Elink => "elink",
        }
    }

    pub fn from_command(cmd: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.command() == cmd)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LinkKind::Doi => "doi",
            LinkKind::Mathnet => "mathnet",
            LinkKind::Mathscinet => "mathscinet",
            LinkKind::Zmath => "zmath",
            LinkKind::Adsnasa => "adsnasa",
            LinkKind::Isi => "isi",
            LinkKind::Elink => "elink",
        }
    }
}

/// An unrecognized top-level command and its value, exactly as written.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UnknownField {
    pub command: String,
    pub raw: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ParsedReference {
    pub kind: ReferenceKind,
    #[serde(default)]
    pub authors: Vec<PersonName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub journal: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub year: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub volume: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub issue: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pages: Option<Pages>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub extra: String,
    #[serde(default)]
    pub links: BTreeMap<LinkKind, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elink_label: Option<String>,
    #[serde(default)]
    pub unknown_fields: Vec<UnknownField>,
}

pub const MIN_YEAR: i32 = 1600;
pub const MAX_YEAR: i32 = 2100;
