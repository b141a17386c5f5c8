use crate::span::SourceSpan;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Name(String),
    /// A name immediately followed by `:`, e.g. `SubClassOf:`. Holds the name.
    Keyword(String),
    LParen,
    RParen,
    Comma,
    Invalid(char),
    Eof,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Name(n) => format!("'{n}'"),
            Tok::Keyword(k) => format!("'{k}:'"),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::Invalid(c) => format!("{c:?}"),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn is_name_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_name_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '-'
}

/// Splits a document into tokens. Never fails: stray characters become
/// `Tok::Invalid` so the parser can report them in context. The last token is
/// always `Tok::Eof`.
pub(crate) fn lex(text: &str) -> Vec<Token> {
    let chars: Vec<char> = text.strip_prefix('\u{feff}').unwrap_or(text).chars().collect();
    let mut tokens = Vec::new();
    let (mut line, mut column) = (1usize, 1usize);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = SourceSpan::new(line, column, 1);
        match c {
            '\n' => {
                line += 1;
                column = 1;
                i += 1;
            }
            '\r' | ' ' | '\t' => {
                column += 1;
                i += 1;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                    column += 1;
                }
            }
            '(' | ')' | ',' => {
                let tok = match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    _ => Tok::Comma,
                };
                tokens.push(Token { tok, span: start });
                column += 1;
                i += 1;
            }
            c if is_name_start(c) => {
                let begin = i;
                while i < chars.len() && is_name_continue(chars[i]) {
                    i += 1;
                }
                let name: String = chars[begin..i].iter().collect();
                let mut length = i - begin;
                let tok = if chars.get(i) == Some(&':') {
                    i += 1;
                    length += 1;
                    Tok::Keyword(name)
                } else {
                    Tok::Name(name)
                };
                tokens.push(Token {
                    tok,
                    span: SourceSpan::new(line, column, length),
                });
                column += length;
            }
            other => {
                tokens.push(Token {
                    tok: Tok::Invalid(other),
                    span: start,
                });
                column += 1;
                i += 1;
            }
        }
    }
    tokens.push(Token {
        tok: Tok::Eof,
        span: SourceSpan::new(line, column, 0),
    });
    tokens
}
