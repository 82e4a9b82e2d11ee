//! Minimal s-expression reader used by the domain and problem parsers.
//!
//! Tokens are lower-cased as they are read; `;` starts a comment that runs to
//! the end of the line. Every node remembers where it started so that parse
//! errors can point at a line and column.

use super::PddlError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SExpr {
    Atom(String, Pos),
    List(Vec<SExpr>, Pos),
}

impl SExpr {
    pub fn pos(&self) -> Pos {
        match self {
            SExpr::Atom(_, p) | SExpr::List(_, p) => *p,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            SExpr::Atom(s, _) => Some(s),
            SExpr::List(..) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List(items, _) => Some(items),
            SExpr::Atom(..) => None,
        }
    }

    /// Head symbol of a list, e.g. `and` in `(and ...)`.
    pub fn head(&self) -> Option<&str> {
        self.as_list().and_then(|l| l.first()).and_then(SExpr::as_atom)
    }

    pub fn expect_list(&self, what: &str) -> Result<&[SExpr], PddlError> {
        self.as_list()
            .ok_or_else(|| syntax(self.pos(), format!("expected {what}, found atom")))
    }

    pub fn expect_atom(&self, what: &str) -> Result<&str, PddlError> {
        self.as_atom()
            .ok_or_else(|| syntax(self.pos(), format!("expected {what}, found list")))
    }
}

pub(crate) fn syntax(pos: Pos, message: impl Into<String>) -> PddlError {
    PddlError::Syntax {
        line: pos.line,
        col: pos.col,
        message: message.into(),
    }
}

/// Parse exactly one top-level s-expression from `text`.
pub fn parse_one(text: &str) -> Result<SExpr, PddlError> {
    let mut reader = Reader::new(text);
    reader.skip_trivia();
    let Some(_) = reader.peek() else {
        return Err(syntax(reader.pos(), "empty input"));
    };
    let expr = reader.read()?;
    reader.skip_trivia();
    if reader.peek().is_some() {
        return Err(syntax(reader.pos(), "trailing input after top-level expression"));
    }
    Ok(expr)
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            chars: text.chars().peekable(),
            line: 1,
            col: 1,
        }
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            col: self.col,
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<SExpr, PddlError> {
        self.skip_trivia();
        let start = self.pos();
        match self.peek() {
            None => Err(syntax(start, "unexpected end of input")),
            Some(')') => Err(syntax(start, "unbalanced ')'")),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.peek() {
                        None => return Err(syntax(start, "unclosed '('")),
                        Some(')') => {
                            self.bump();
                            return Ok(SExpr::List(items, start));
                        }
                        Some(_) => items.push(self.read()?),
                    }
                }
            }
            Some(_) => {
                let mut tok = String::new();
                while let Some(c) = self.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    tok.extend(c.to_lowercase());
                    self.bump();
                }
                Ok(SExpr::Atom(tok, start))
            }
        }
    }
}
