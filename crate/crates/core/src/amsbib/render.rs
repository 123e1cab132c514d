use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{LinkKind, Pages, ParsedReference, PersonName, ReferenceKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Amsbib,
    Html,
    Xml,
    Plain,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "amsbib" => Ok(Format::Amsbib),
            "html" => Ok(Format::Html),
            "xml" => Ok(Format::Xml),
            "plain" => Ok(Format::Plain),
            other => Err(format!("unknown format `{other}`")),
        }
    }
}

/// Hyperlink target for a stored identifier. Values that already are
/// absolute URLs are used as they are.
pub fn link_url(kind: LinkKind, id: &str) -> String {
    if id.starts_with("http://") || id.starts_with("https://") {
        return id.to_string();
    }
    match kind {
        LinkKind::Doi => format!("https://doi.org/{id}"),
        LinkKind::Mathnet => format!("http://mi.mathnet.ru/{id}"),
        LinkKind::Mathscinet => format!("https://mathscinet.ams.org/mathscinet-getitem?mr={id}"),
        LinkKind::Zmath => format!("https://zbmath.org/?q=an:{id}"),
        LinkKind::Adsnasa => format!("https://adsabs.harvard.edu/abs/{id}"),
        LinkKind::Isi => format!("https://www.webofscience.com/wos/woscc/full-record/WOS:{id}"),
        LinkKind::Elink => id.to_string(),
    }
}

pub fn render(reference: &ParsedReference, format: Format) -> String {
    match format {
        Format::Amsbib => render_amsbib(reference),
        Format::Html => render_html(reference),
        Format::Xml => render_xml(reference),
        Format::Plain => render_plain(reference),
    }
}

fn needs_braces(value: &str) -> bool {
    value.is_empty() || value.contains(['\\', '{', '}', '%', '$'])
}

fn braced_if_needed(value: &str) -> String {
    if needs_braces(value) {
        format!("{{{value}}}")
    } else {
        value.to_string()
    }
}

fn looks_like_initial(token: &str) -> bool {
    token.ends_with('.') && token.chars().count() <= 4 && token.chars().next().is_some_and(char::is_uppercase)
}

fn amsbib_name(name: &PersonName) -> String {
    let family = if name.family.contains(|c: char| c.is_whitespace() || matches!(c, ',' | '[' | ']'))
        || looks_like_initial(&name.family)
    {
        format!("{{{}}}", name.family)
    } else {
        name.family.clone()
    };
    let mut out: Vec<&str> = name.given.split_whitespace().collect();
    out.push(&family);
    let mut s = tie(&out);
    if let Some(v) = &name.variant {
        let _ = write!(s, " [{}]", tie(&v.split_whitespace().collect::<Vec<_>>()));
    }
    s
}

/// Joins words with ties, except after a lone escape, where `\~` would
/// read as an escaped tilde.
fn tie(words: &[&str]) -> String {
    let mut s = String::new();
    for (k, w) in words.iter().enumerate() {
        if k > 0 {
            let escapes = s.bytes().rev().take_while(|&b| b == b'\\').count();
            s.push(if escapes % 2 == 1 { ' ' } else { '~' });
        }
        s.push_str(w);
    }
    s
}

fn render_amsbib(r: &ParsedReference) -> String {
    let mut parts: Vec<String> = Vec::new();
    if !r.authors.is_empty() {
        let names = r.authors.iter().map(amsbib_name).collect::<Vec<_>>().join(", ");
        parts.push(format!("\\by {}", braced_if_needed(&names)));
    }
    if let Some(title) = &r.title {
        let cmd = if r.kind == ReferenceKind::Book { "book" } else { "paper" };
        parts.push(format!("\\{cmd} {}", braced_if_needed(title)));
    }
    if let Some(j) = &r.journal {
        parts.push(format!("\\jour {}", braced_if_needed(j)));
    }
    if let Some(y) = r.year {
        parts.push(format!("\\yr {y}"));
    }
    if let Some(v) = &r.volume {
        parts.push(format!("\\vol {}", braced_if_needed(v)));
    }
    if let Some(i) = &r.issue {
        parts.push(format!("\\issue {}", braced_if_needed(i)));
    }
    if let Some(p) = &r.pages {
        parts.push(format!("\\pages {}", braced_if_needed(&p.to_string())));
    }
    if !r.extra.is_empty() {
        parts.push(format!("\\extra {}", braced_if_needed(&r.extra)));
    }
    for (kind, id) in &r.links {
        match (kind, &r.elink_label) {
            (LinkKind::Elink, Some(label)) => parts.push(format!("\\elink{{{label}}}{{{id}}}")),
            _ => parts.push(format!("\\{}{{{id}}}", kind.command())),
        }
    }
    for u in &r.unknown_fields {
        if u.raw.is_empty() {
            parts.push(format!("\\{}", u.command));
        } else {
            parts.push(format!("\\{} {}", u.command, u.raw));
        }
    }
    parts.join(" ")
}

fn unescaped_tildes_to_spaces(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut escaped = false;
    for c in s.chars() {
        if c == '~' && !escaped {
            out.push(' ');
        } else {
            out.push(c);
        }
        escaped = c == '\\' && !escaped;
    }
    out
}

fn plain_pages(p: &Pages) -> String {
    match p {
        Pages::Range(r) if r.first == r.last => r.first.to_string(),
        Pages::Range(r) => format!("{}\u{2013}{}", r.first, r.last),
        Pages::Text(t) => t.clone(),
    }
}

/// Ordered human-readable pieces shared by the plain and HTML renderers.
fn pieces(r: &ParsedReference) -> Vec<(&'static str, String)> {
    let mut out = Vec::new();
    if !r.authors.is_empty() {
        let names = r.authors.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(", ");
        out.push(("authors", names));
    }
    if let Some(t) = &r.title {
        out.push(("title", unescaped_tildes_to_spaces(t)));
    }
    if let Some(j) = &r.journal {
        out.push(("journal", j.clone()));
    }
    let volume = match (&r.volume, &r.issue) {
        (Some(v), Some(i)) => Some(format!("{v}:{i}")),
        (Some(v), None) => Some(v.clone()),
        (None, Some(i)) => Some(format!("no. {i}")),
        (None, None) => None,
    };
    match (volume, r.year) {
        (Some(v), Some(y)) => out.push(("volume", format!("{v} ({y})"))),
        (Some(v), None) => out.push(("volume", v)),
        (None, Some(y)) => out.push(("year", y.to_string())),
        (None, None) => {}
    }
    if let Some(p) = &r.pages {
        out.push(("pages", plain_pages(p)));
    }
    if !r.extra.is_empty() {
        out.push(("extra", r.extra.clone()));
    }
    out
}

fn render_plain(r: &ParsedReference) -> String {
    let mut line = pieces(r)
        .into_iter()
        .map(|(_, text)| text)
        .collect::<Vec<_>>()
        .join(", ");
    line.push('.');
    line.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn escape_markup(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn link_label(kind: LinkKind, r: &ParsedReference) -> String {
    match kind {
        LinkKind::Doi => "DOI".into(),
        LinkKind::Mathnet => "Math-Net".into(),
        LinkKind::Mathscinet => "MathSciNet".into(),
        LinkKind::Zmath => "zbMATH".into(),
        LinkKind::Adsnasa => "ADS".into(),
        LinkKind::Isi => "Web of Science".into(),
        LinkKind::Elink => r.elink_label.clone().unwrap_or_else(|| "link".into()),
    }
}

fn render_html(r: &ParsedReference) -> String {
    let kind = match r.kind {
        ReferenceKind::Paper => "paper",
        ReferenceKind::Book => "book",
        ReferenceKind::Other => "other",
    };
    let mut out = format!("<span class=\"amsbib-reference\" data-kind=\"{kind}\">");
    let body = pieces(r)
        .into_iter()
        .map(|(class, text)| format!("<span class=\"{class}\">{}</span>", escape_markup(&text)))
        .collect::<Vec<_>>()
        .join(", ");
    out.push_str(&body);
    out.push('.');
    for (kind, id) in &r.links {
        let _ = write!(
            out,
            " <a class=\"link link-{}\" href=\"{}\">{}</a>",
            kind.as_str(),
            escape_markup(&link_url(*kind, id)),
            escape_markup(&link_label(*kind, r))
        );
    }
    out.push_str("</span>");
    out
}

fn render_xml(r: &ParsedReference) -> String {
    let kind = match r.kind {
        ReferenceKind::Paper => "paper",
        ReferenceKind::Book => "book",
        ReferenceKind::Other => "other",
    };
    let mut out = format!("<reference kind=\"{kind}\">");
    if !r.authors.is_empty() {
        out.push_str("<authors>");
        for a in &r.authors {
            let _ = write!(
                out,
                "<author><family>{}</family><given>{}</given>",
                escape_markup(&a.family),
                escape_markup(&a.given)
            );
            if let Some(v) = &a.variant {
                let _ = write!(out, "<variant>{}</variant>", escape_markup(v));
            }
            out.push_str("</author>");
        }
        out.push_str("</authors>");
    }
    let mut element = |name: &str, value: &Option<String>| {
        if let Some(v) = value {
            let _ = write!(out, "<{name}>{}</{name}>", escape_markup(v));
        }
    };
    element("title", &r.title);
    element("journal", &r.journal);
    element("year", &r.year.map(|y| y.to_string()));
    element("volume", &r.volume);
    element("issue", &r.issue);
    match &r.pages {
        Some(Pages::Range(p)) => {
            let _ = write!(out, "<pages first=\"{}\" last=\"{}\"/>", p.first, p.last);
        }
        Some(Pages::Text(t)) => {
            let _ = write!(out, "<pages>{}</pages>", escape_markup(t));
        }
        None => {}
    }
    if !r.extra.is_empty() {
        let _ = write!(out, "<extra>{}</extra>", escape_markup(&r.extra));
    }
    if !r.links.is_empty() {
        out.push_str("<links>");
        for (kind, id) in &r.links {
            let _ = write!(
                out,
                "<link kind=\"{}\" href=\"{}\">{}</link>",
                kind.as_str(),
                escape_markup(&link_url(*kind, id)),
                escape_markup(id)
            );
        }
        out.push_str("</links>");
    }
    for u in &r.unknown_fields {
        let _ = write!(
            out,
            "<unknown command=\"{}\">{}</unknown>",
            escape_markup(&u.command),
            escape_markup(&u.raw)
        );
    }
    out.push_str("</reference>");
    out
}
