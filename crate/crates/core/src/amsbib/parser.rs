use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::lexer::{tokenize, Token, TokenKind};
use super::{
    AmsbibError, LinkKind, PageRange, Pages, ParsedReference, PersonName, RawReference,
    ReferenceKind, UnknownField, MAX_YEAR, MIN_YEAR,
};

/// Formatting commands that stay inside a field value instead of opening an
/// unknown field.
const INLINE_COMMANDS: &[&str] = &[
    "emph", "textit", "textbf", "textsc", "textrm", "texttt", "textsl", "textup", "textsf",
    "mbox", "hbox", "it", "bf", "rm", "sc", "sl", "tt", "em", "sf", "ss", "ae", "AE", "oe", "OE",
    "aa", "AA", "o", "O", "l", "L", "i", "j", "u", "v", "H", "c", "d", "b", "t", "k", "r",
    "LaTeX", "TeX", "AmS", "dots", "ldots", "cdots", "dash", "ndash", "mdash", "nobreakspace",
    "quad", "qquad", "allowbreak", "break", "newline", "relax", "url", "No", "S", "P", "copyright",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "warning", rename_all = "snake_case")]
pub enum ParseWarning {
    /// A field appeared more than once; the occurrence at `offset` replaced the earlier one.
    DuplicateField { command: String, offset: usize },
    /// Text before the first field command was dropped.
    IgnoredLeadingText { offset: usize },
    /// `\yr` value that is not a year in range; kept as an unknown field.
    InvalidYear { value: String, offset: usize },
    /// A recognized command with an empty value; the field stays absent.
    EmptyValue { command: String, offset: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseOutcome {
    pub reference: ParsedReference,
    pub warnings: Vec<ParseWarning>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    By,
    Title(ReferenceKind),
    Jour,
    Yr,
    Vol,
    Issue,
    Pages,
    Extra,
    Link(LinkKind),
}

impl Field {
    fn from_command(cmd: &str) -> Option<Self> {
        Some(match cmd {
            "by" => Field::By,
            "paper" => Field::Title(ReferenceKind::Paper),
            "book" => Field::Title(ReferenceKind::Book),
            "jour" => Field::Jour,
            "yr" => Field::Yr,
            "vol" => Field::Vol,
            "issue" => Field::Issue,
            "pages" => Field::Pages,
            "extra" => Field::Extra,
            other => Field::Link(LinkKind::from_command(other)?),
        })
    }

    /// Slot used for duplicate detection: `\paper` and `\book` share one.
    fn slot(self) -> usize {
        match self {
            Field::By => 0,
            Field::Title(_) => 1,
            Field::Jour => 2,
            Field::Yr => 3,
            Field::Vol => 4,
            Field::Issue => 5,
            Field::Pages => 6,
            Field::Extra => 7,
            Field::Link(k) => 8 + k as usize,
        }
    }

    fn tilde_is_space(self) -> bool {
        matches!(self, Field::By | Field::Jour)
    }
}

struct Segment {
    command: String,
    offset: usize,
    body: Range<usize>,
}

pub fn parse_str(source: &str) -> Result<ParseOutcome, AmsbibError> {
    let tokens = tokenize(source)?;
    let (leading, segments) = segment(&tokens);
    let mut warnings = Vec::new();
    if let Some(offset) = leading {
        warnings.push(ParseWarning::IgnoredLeadingText { offset });
    }

    let mut reference = ParsedReference::default();
    let mut seen = [false; 16];
    for seg in &segments {
        let Some(field) = Field::from_command(&seg.command) else {
            let raw = assemble(source, &tokens[seg.body.clone()], false);
            reference.unknown_fields.push(UnknownField {
                command: seg.command.clone(),
                raw: without_dangling_escape(raw.trim()).to_string(),
            });
            continue;
        };
        let assembled = assemble(source, &tokens[seg.body.clone()], field.tilde_is_space());
        let value = without_dangling_escape(&collapse(strip_group(assembled.trim()))).to_string();
        if value.is_empty() {
            warnings.push(ParseWarning::EmptyValue {
                command: seg.command.clone(),
                offset: seg.offset,
            });
            continue;
        }
        if field == Field::Yr {
            match value.parse::<i32>() {
                Ok(y) if (MIN_YEAR..=MAX_YEAR).contains(&y) => {}
                _ => {
                    warnings.push(ParseWarning::InvalidYear {
                        value: value.clone(),
                        offset: seg.offset,
                    });
                    // Keep the source form: the value may hold commands
                    // that only its braces keep out of the field list.
                    reference.unknown_fields.push(UnknownField {
                        command: "yr".into(),
                        raw: without_dangling_escape(assembled.trim()).to_string(),
                    });
                    continue;
                }
            }
        }
        if field == Field::By && split_authors(&value).is_empty() {
            warnings.push(ParseWarning::EmptyValue {
                command: seg.command.clone(),
                offset: seg.offset,
            });
            continue;
        }
        let slot = field.slot();
        if seen[slot] {
            warnings.push(ParseWarning::DuplicateField {
                command: seg.command.clone(),
                offset: seg.offset,
            });
        }
        seen[slot] = true;
        apply(&mut reference, field, value, assembled.trim());
    }

    let populated = reference.title.is_some()
        || !reference.authors.is_empty()
        || reference.journal.is_some()
        || reference.year.is_some()
        || reference.volume.is_some()
        || reference.issue.is_some()
        || reference.pages.is_some()
        || !reference.extra.is_empty()
        || !reference.links.is_empty();
    if !populated {
        return Err(AmsbibError::EmptyReference);
    }
    Ok(ParseOutcome {
        reference,
        warnings,
    })
}

pub fn parse_reference(raw: &RawReference) -> Result<ParseOutcome, AmsbibError> {
    if raw.source.trim().is_empty() {
        return Err(AmsbibError::EmptyReference);
    }
    parse_str(&raw.source)
}

/// Entry point for untrusted input of unknown encoding.
pub fn parse_bytes(bytes: &[u8]) -> Result<ParseOutcome, AmsbibError> {
    let source = std::str::from_utf8(bytes).map_err(|e| AmsbibError::InvalidUtf8 {
        position: e.valid_up_to(),
    })?;
    if source.trim().is_empty() {
        return Err(AmsbibError::EmptyReference);
    }
    parse_str(source)
}

fn apply(reference: &mut ParsedReference, field: Field, value: String, braced_raw: &str) {
    match field {
        Field::By => reference.authors = split_authors(&value),
        Field::Title(kind) => {
            reference.kind = kind;
            reference.title = Some(value);
        }
        Field::Jour => reference.journal = Some(value),
        Field::Yr => reference.year = value.parse().ok(),
        Field::Vol => reference.volume = Some(value),
        Field::Issue => reference.issue = Some(value),
        Field::Pages => reference.pages = Some(normalize_pages(&value)),
        Field::Extra => reference.extra = value,
        Field::Link(LinkKind::Elink) => {
            let groups = top_level_groups(braced_raw);
            match groups.as_slice() {
                [label, url] => {
                    let label = collapse(label);
                    reference.elink_label = (!label.is_empty()).then_some(label);
                    reference.links.insert(LinkKind::Elink, collapse(url));
                }
                _ => {
                    reference.elink_label = None;
                    reference.links.insert(LinkKind::Elink, value);
                }
            }
        }
        Field::Link(kind) => {
            reference.links.insert(kind, value);
        }
    }
}

/// Groups tokens into field segments. Returns the offset of any ignored
/// leading content and the segments in input order.
fn segment(tokens: &[Token]) -> (Option<usize>, Vec<Segment>) {
    let mut segments: Vec<Segment> = Vec::new();
    let mut leading = None;
    let mut depth = 0usize;
    let mut math = false;
    let mut math_stack: Vec<bool> = Vec::new();

    for (i, tok) in tokens.iter().enumerate() {
        let mut starts_field = false;
        match tok.kind {
            TokenKind::GroupOpen => {
                math_stack.push(math);
                depth += 1;
            }
            TokenKind::GroupClose => {
                depth = depth.saturating_sub(1);
                math = math_stack.pop().unwrap_or(false);
            }
            TokenKind::Text => {
                if tok.value.matches('$').count() % 2 == 1 {
                    math = !math;
                }
            }
            TokenKind::Command => {
                starts_field = depth == 0
                    && !math
                    && is_word(&tok.value)
                    && !INLINE_COMMANDS.contains(&tok.value.as_str());
            }
            TokenKind::Comment => {}
        }
        if starts_field {
            if let Some(last) = segments.last_mut() {
                last.body.end = i;
            }
            segments.push(Segment {
                command: tok.value.clone(),
                offset: tok.byte_offset,
                body: i + 1..tokens.len(),
            });
        } else if segments.is_empty()
            && leading.is_none()
            && tok.kind != TokenKind::Comment
            && !(tok.kind == TokenKind::Text && tok.value.trim().is_empty())
        {
            leading = Some(tok.byte_offset);
        }
    }
    (leading, segments)
}

fn is_word(name: &str) -> bool {
    !name.is_empty() && name.bytes().all(|b| b.is_ascii_alphabetic())
}

fn assemble(source: &str, tokens: &[Token], tilde_is_space: bool) -> String {
    let mut out = String::new();
    for tok in tokens {
        match tok.kind {
            TokenKind::Comment => {}
            // A backslash at the very end of the input escapes nothing.
            TokenKind::Command if tok.value.is_empty() => {}
            TokenKind::Text if tilde_is_space => out.push_str(&tok.value.replace('~', " ")),
            _ => out.push_str(tok.lexeme(source)),
        }
    }
    out
}

/// Trimming can leave a control space (`\ ` at the end of a value) as a
/// lone backslash, which would escape the closing brace when rendered.
fn without_dangling_escape(mut s: &str) -> &str {
    while s.bytes().rev().take_while(|&b| b == b'\\').count() % 2 == 1 {
        s = s[..s.len() - 1].trim_end();
    }
    s
}

fn collapse(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Byte index of the brace closing the group opened at `open`, honoring escapes.
fn matching_close(s: &str, open: usize) -> Option<usize> {
    let bytes = s.as_bytes();
    let mut depth = 0usize;
    let mut i = open;
    while i < bytes.len() {
        match bytes[i] {
            b'\\' => {
                i += 1;
                if i < bytes.len() && !bytes[i].is_ascii_alphabetic() {
                    i += s[i..].chars().next().map_or(1, char::len_utf8);
                }
                continue;
            }
            b'{' => depth += 1,
            b'}' => {
                depth -= 1;
                if depth == 0 {
                    return Some(i);
                }
            }
            _ => {}
        }
        i += 1;
    }
    None
}

/// Removes one pair of braces if they enclose the whole value.
pub(crate) fn strip_group(s: &str) -> &str {
    if s.starts_with('{') && matching_close(s, 0) == Some(s.len() - 1) {
        &s[1..s.len() - 1]
    } else {
        s
    }
}

/// Splits `{a} {b}` into its group bodies; any text outside groups yields an empty list.
fn top_level_groups(s: &str) -> Vec<&str> {
    let mut groups = Vec::new();
    let mut rest = s.trim_start();
    let mut offset = s.len() - rest.len();
    while !rest.is_empty() {
        if !rest.starts_with('{') {
            return Vec::new();
        }
        let Some(close) = matching_close(s, offset) else {
            return Vec::new();
        };
        groups.push(&s[offset + 1..close]);
        let after = &s[close + 1..];
        rest = after.trim_start();
        offset = s.len() - rest.len();
    }
    groups
}

/// Splits `s` on `sep` at brace depth zero and outside math.
fn split_top_level(s: &str, sep: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut math = false;
    let mut start = 0;
    let mut escaped = false;
    for (i, c) in s.char_indices() {
        if escaped {
            escaped = false;
            continue;
        }
        match c {
            '\\' => escaped = true,
            '{' => depth += 1,
            '}' => depth -= 1,
            '$' => math = !math,
            c if c == sep && depth == 0 && !math => {
                parts.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

fn split_authors(value: &str) -> Vec<PersonName> {
    split_top_level(value, ',')
        .into_iter()
        .filter_map(|part| parse_name(without_dangling_escape(part.trim())))
        .collect()
}

fn looks_like_initial(token: &str) -> bool {
    token.ends_with('.') && token.chars().count() <= 4 && token.chars().next().is_some_and(char::is_uppercase)
}

fn parse_name(part: &str) -> Option<PersonName> {
    if part.is_empty() {
        return None;
    }
    let (name_part, variant) = match (part.ends_with(']'), part.rfind('[')) {
        (true, Some(open)) if split_top_level(&part[..open], ',').len() == 1 => {
            let v = without_dangling_escape(&collapse(&part[open + 1..part.len() - 1])).to_string();
            (without_dangling_escape(part[..open].trim()), (!v.is_empty()).then_some(v))
        }
        _ => (part, None),
    };
    let words: Vec<&str> = split_top_level(name_part, ' ')
        .into_iter()
        .filter(|w| !w.is_empty())
        .collect();
    let (family, given): (&str, Vec<&str>) = match words.as_slice() {
        [] => return None,
        [only] => (only, Vec::new()),
        [first, .., last] if looks_like_initial(last) && !looks_like_initial(first) => {
            (first, words[1..].to_vec())
        }
        [.., last] => (last, words[..words.len() - 1].to_vec()),
    };
    let family = without_dangling_escape(strip_group(family).trim());
    if family.is_empty() {
        return None;
    }
    Some(PersonName {
        family: collapse(family),
        given: given.join(" "),
        variant,
    })
}

/// `"a--b"`/`"a-b"` with `1 <= a <= b` and `"a"` become page ranges; any
/// other text is returned as is.
pub fn normalize_pages(raw: &str) -> Pages {
    let trimmed = raw.trim();
    let number = |s: &str| -> Option<u32> {
        let s = s.trim();
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        s.parse().ok()
    };
    let range = if let Some((a, b)) = trimmed.split_once("--") {
        number(a).zip(number(b))
    } else if let Some((a, b)) = trimmed.split_once('-') {
        number(a).zip(number(b))
    } else {
        number(trimmed).map(|a| (a, a))
    };
    match range.and_then(|(a, b)| PageRange::new(a, b)) {
        Some(r) => Pages::Range(r),
        None => Pages::Text(raw.to_string()),
    }
}
