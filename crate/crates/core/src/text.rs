//! Text normalization shared by search and reference matching.

use std::collections::BTreeSet;

use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

/// Lowercases and removes diacritics (`"Vallée"` → `"vallee"`, `"й"` → `"и"`).
pub fn fold(s: &str) -> String {
    s.nfd()
        .filter(|c| !is_combining_mark(*c))
        .flat_map(char::to_lowercase)
        .collect()
}

/// Accent commands written with a letter name (`\H o`, `\v s`).
const ACCENTS: [&str; 9] = ["H", "c", "v", "u", "d", "b", "t", "r", "k"];

/// Drops inline math, control words and braces; control symbols are removed
/// but the letters they accent are kept (`int\'egrale` → `integrale`).
pub fn strip_latex(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars().peekable();
    let mut math = false;
    while let Some(c) = chars.next() {
        match c {
            '\\' => {
                if chars.peek().is_some_and(|n| n.is_ascii_alphabetic()) {
                    let mut name = String::new();
                    while let Some(n) = chars.next_if(|n| n.is_ascii_alphabetic()) {
                        name.push(n);
                    }
                    if ACCENTS.contains(&name.as_str()) {
                        while chars.next_if(|n| *n == ' ').is_some() {}
                    } else {
                        out.push(' ');
                    }
                } else if let Some(sym) = chars.next() {
                    if math {
                        continue;
                    }
                    match sym {
                        '$' | '%' | '&' | '#' | '_' => out.push(sym),
                        ',' | ';' | '!' | ' ' | '\\' => out.push(' '),
                        _ => {}
                    }
                }
            }
            '$' => {
                math = !math;
                out.push(' ');
            }
            '{' | '}' => {}
            '~' => out.push(' '),
            _ if math => {}
            _ => out.push(c),
        }
    }
    out
}

/// Lowercase, LaTeX-free, diacritic-folded, punctuation-free, single-spaced.
pub fn normalize_title(s: &str) -> String {
    fold(&strip_latex(s))
        .chars()
        .map(|c| if c.is_alphanumeric() { c } else { ' ' })
        .collect::<String>()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

/// Search terms of a text field.
pub fn terms(s: &str) -> Vec<String> {
    normalize_title(s)
        .split_whitespace()
        .map(str::to_string)
        .collect()
}

/// Journal names compare case-insensitively with `~` as a space.
pub fn normalize_journal(s: &str) -> String {
    s.replace('~', " ")
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

/// Word-padded character trigrams (`"  w"`, `" wo"`, `"wor"`, `"ord"`, `"rd "`).
pub fn trigrams(normalized: &str) -> BTreeSet<String> {
    let mut set = BTreeSet::new();
    for word in normalized.split_whitespace() {
        let padded: Vec<char> = "  ".chars().chain(word.chars()).chain(" ".chars()).collect();
        for w in padded.windows(3) {
            set.insert(w.iter().collect());
        }
    }
    set
}

/// Jaccard similarity of trigram sets; 0 when both are empty.
pub fn trigram_jaccard(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

pub fn title_similarity(a: &str, b: &str) -> f64 {
    trigram_jaccard(&trigrams(&normalize_title(a)), &trigrams(&normalize_title(b)))
}
