use serde::{Deserialize, Serialize};

use super::AmsbibError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenKind {
    /// `\word` or a control symbol such as `\,` or `\{`.
    Command,
    GroupOpen,
    GroupClose,
    Text,
    /// `%` up to (not including) the end of line, outside groups.
    Comment,
}

/// One lexeme of AMSBIB source.
///
/// `value` is the semantic payload (the command name without the backslash,
/// the text itself, the comment body). The exact source slice is recovered
/// through [`Token::lexeme`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub kind: TokenKind,
    pub value: String,
    pub byte_offset: usize,
    pub len: usize,
}

impl Token {
    pub fn lexeme<'a>(&self, source: &'a str) -> &'a str {
        &source[self.byte_offset..self.byte_offset + self.len]
    }

    pub fn is_command(&self, name: &str) -> bool {
        self.kind == TokenKind::Command && self.value == name
    }
}

/// Splits `source` into a lossless token stream.
///
/// A control word absorbs the whitespace that separates it from an opening
/// brace, so `\paper {x}` yields `command, group_open, text, group_close`
/// while `\yr 1963` keeps the space in the following text token.
pub fn tokenize(source: &str) -> Result<Vec<Token>, AmsbibError> {
    check_balance(source)?;

    let bytes = source.as_bytes();
    let mut tokens = Vec::new();
    let mut depth = 0usize;
    let mut text_start: Option<usize> = None;
    let mut i = 0;

    let flush = |tokens: &mut Vec<Token>, start: &mut Option<usize>, end: usize| {
        if let Some(s) = start.take() {
            if end > s {
                tokens.push(Token {
                    kind: TokenKind::Text,
                    value: source[s..end].to_string(),
                    byte_offset: s,
                    len: end - s,
                });
            }
        }
    };

    while i < bytes.len() {
        match bytes[i] {
            b'\\' => {
                flush(&mut tokens, &mut text_start, i);
                let start = i;
                i += 1;
                let name_start = i;
                while i < bytes.len() && bytes[i].is_ascii_alphabetic() {
                    i += 1;
                }
                let name = if i > name_start {
                    let name = &source[name_start..i];
                    let mut j = i;
                    while j < bytes.len() && (bytes[j] == b' ' || bytes[j] == b'\t' || bytes[j] == b'\n' || bytes[j] == b'\r') {
                        j += 1;
                    }
                    if j > i && j < bytes.len() && bytes[j] == b'{' {
                        i = j;
                    }
                    name
                } else if i < bytes.len() {
                    // control symbol: one (possibly multi-byte) character
                    let ch_len = source[i..].chars().next().map_or(1, char::len_utf8);
                    i += ch_len;
                    &source[name_start..i]
                } else {
                    ""
                };
                tokens.push(Token {
                    kind: TokenKind::Command,
                    value: name.to_string(),
                    byte_offset: start,
                    len: i - start,
                });
            }
            b'{' => {
                flush(&mut tokens, &mut text_start, i);
                depth += 1;
                tokens.push(Token {
                    kind: TokenKind::GroupOpen,
                    value: "{".into(),
                    byte_offset: i,
                    len: 1,
                });
                i += 1;
            }
            b'}' => {
                flush(&mut tokens, &mut text_start, i);
                depth = depth.saturating_sub(1);
                tokens.push(Token {
                    kind: TokenKind::GroupClose,
                    value: "}".into(),
                    byte_offset: i,
                    len: 1,
                });
                i += 1;
            }
            b'%' if depth == 0 => {
                flush(&mut tokens, &mut text_start, i);
                let start = i;
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
                tokens.push(Token {
                    kind: TokenKind::Comment,
                    value: source[start + 1..i].to_string(),
                    byte_offset: start,
                    len: i - start,
                });
            }
            _ => {
                if text_start.is_none() {
                    text_start = Some(i);
                }
                i += 1;
            }
        }
    }
    flush(&mut tokens, &mut text_start, bytes.len());
    Ok(tokens)
}

/// Verifies brace balance with the same escape and comment rules as the lexer.
fn check_balance(source: &str) -> Result<(), AmsbibError> {
    let bytes = source.as_bytes();
    let mut open: Vec<usize> = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'\\' => {
                i += 1;
                if i < bytes.len() && !bytes[i].is_ascii_alphabetic() {
                    // skip the escaped character whole so `\{` never counts
                    i += source[i..].chars().next().map_or(1, char::len_utf8);
                    continue;
                }
            }
            b'{' => {
                open.push(i);
                i += 1;
            }
            b'}' => {
                if open.pop().is_none() {
                    return Err(AmsbibError::UnbalancedBraces { position: i });
                }
                i += 1;
            }
            b'%' if open.is_empty() => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            _ => i += 1,
        }
    }
    match open.first() {
        Some(&position) => Err(AmsbibError::UnbalancedBraces { position }),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape(src: &str) -> Vec<(TokenKind, String)> {
        tokenize(src)
            .unwrap()
            .into_iter()
            .map(|t| (t.kind, t.value))
            .collect()
    }

    #[test]
    fn empty_input() {
        assert!(tokenize("").unwrap().is_empty());
    }

    #[test]
    fn command_then_text() {
        assert_eq!(
            shape("\\yr 1963"),
            vec![
                (TokenKind::Command, "yr".into()),
                (TokenKind::Text, " 1963".into())
            ]
        );
    }

    #[test]
    fn nested_groups() {
        use TokenKind::*;
        assert_eq!(
            shape("\\paper {On {$L^2$} spaces}"),
            vec![
                (Command, "paper".into()),
                (GroupOpen, "{".into()),
                (Text, "On ".into()),
                (GroupOpen, "{".into()),
                (Text, "$L^2$".into()),
                (GroupClose, "}".into()),
                (Text, " spaces".into()),
                (GroupClose, "}".into()),
            ]
        );
    }

    #[test]
    fn comments_only_outside_groups() {
        let toks = tokenize("\\yr 1963 % note\n{50% off}").unwrap();
        assert_eq!(toks[2].kind, TokenKind::Comment);
        assert_eq!(toks[2].value, " note");
        assert!(toks
            .iter()
            .any(|t| t.kind == TokenKind::Text && t.value == "50% off"));
    }

    #[test]
    fn escaped_braces_are_symbols() {
        let toks = tokenize("a \\{ b").unwrap();
        assert_eq!(toks[1].kind, TokenKind::Command);
        assert_eq!(toks[1].value, "{");
    }

    #[test]
    fn unbalanced_reports_first_unmatched() {
        assert_eq!(
            tokenize("ab}{").unwrap_err(),
            AmsbibError::UnbalancedBraces { position: 2 }
        );
        assert_eq!(
            tokenize("{a{b}").unwrap_err(),
            AmsbibError::UnbalancedBraces { position: 0 }
        );
        assert!(tokenize("% {\n").is_ok());
    }

    #[test]
    fn trailing_backslash() {
        let toks = tokenize("x\\").unwrap();
        assert_eq!(toks.last().unwrap().value, "");
        assert_eq!(toks.last().unwrap().len, 1);
    }
}
