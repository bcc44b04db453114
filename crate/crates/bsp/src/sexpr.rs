//! Minimal s-expression reader shared by the problem and formula parsers.
//! Tracks line/column for error reporting; `;` starts a comment to
//! end-of-line.

use crate::{Error, Result};

#[derive(Debug, Clone)]
pub(crate) enum Sexpr {
    Atom { text: String, line: u32, col: u32 },
    List { items: Vec<Sexpr>, line: u32, col: u32 },
}

impl Sexpr {
    pub(crate) fn pos(&self) -> (u32, u32) {
        match self {
            Sexpr::Atom { line, col, .. } | Sexpr::List { line, col, .. } => (*line, *col),
        }
    }

    pub(crate) fn atom(&self) -> Option<&str> {
        match self {
            Sexpr::Atom { text, .. } => Some(text),
            Sexpr::List { .. } => None,
        }
    }

    pub(crate) fn list(&self) -> Option<&[Sexpr]> {
        match self {
            Sexpr::List { items, .. } => Some(items),
            Sexpr::Atom { .. } => None,
        }
    }

    /// Head atom of a list, lowercased (connectives and keywords are
    /// case-insensitive).
    pub(crate) fn head(&self) -> Option<String> {
        self.list()
            .and_then(|items| items.first())
            .and_then(|h| h.atom())
            .map(|s| s.to_ascii_lowercase())
    }
}

pub(crate) fn err_at(node: &Sexpr, msg: impl Into<String>) -> Error {
    let (line, col) = node.pos();
    Error::Syntax { line, col, msg: msg.into() }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: u32,
    col: u32,
}

#[derive(Debug)]
enum Token {
    Open(u32, u32),
    Close(u32, u32),
    Atom(String, u32, u32),
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0, line: 1, col: 1 }
    }

    fn bump(&mut self) -> u8 {
        let c = self.src[self.pos];
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        c
    }

    fn next_token(&mut self) -> Result<Option<Token>> {
        loop {
            if self.pos >= self.src.len() {
                return Ok(None);
            }
            let c = self.src[self.pos];
            match c {
                b' ' | b'\t' | b'\r' | b'\n' => {
                    self.bump();
                }
                b';' => {
                    while self.pos < self.src.len() && self.src[self.pos] != b'\n' {
                        self.bump();
                    }
                }
                b'(' => {
                    let (l, co) = (self.line, self.col);
                    self.bump();
                    return Ok(Some(Token::Open(l, co)));
                }
                b')' => {
                    let (l, co) = (self.line, self.col);
                    self.bump();
                    return Ok(Some(Token::Close(l, co)));
                }
                _ => {
                    let (l, co) = (self.line, self.col);
                    let start = self.pos;
                    while self.pos < self.src.len()
                        && !matches!(self.src[self.pos], b' ' | b'\t' | b'\r' | b'\n' | b'(' | b')' | b';')
                    {
                        self.bump();
                    }
                    let text = std::str::from_utf8(&self.src[start..self.pos])
                        .map_err(|_| Error::Syntax {
                            line: l,
                            col: co,
                            msg: "invalid utf-8 in atom".into(),
                        })?
                        .to_string();
                    return Ok(Some(Token::Atom(text, l, co)));
                }
            }
        }
    }
}

/// Parse every top-level form in `src`.
pub(crate) fn parse_all(src: &str) -> Result<Vec<Sexpr>> {
    let mut lex = Lexer::new(src);
    let mut stack: Vec<(Vec<Sexpr>, u32, u32)> = Vec::new();
    let mut top: Vec<Sexpr> = Vec::new();
    while let Some(tok) = lex.next_token()? {
        match tok {
            Token::Open(l, c) => stack.push((Vec::new(), l, c)),
            Token::Close(l, c) => {
                let (items, ol, oc) = stack.pop().ok_or(Error::Syntax {
                    line: l,
                    col: c,
                    msg: "unmatched `)`".into(),
                })?;
                let node = Sexpr::List { items, line: ol, col: oc };
                match stack.last_mut() {
                    Some((parent, _, _)) => parent.push(node),
                    None => top.push(node),
                }
            }
            Token::Atom(text, l, c) => {
                let node = Sexpr::Atom { text, line: l, col: c };
                match stack.last_mut() {
                    Some((parent, _, _)) => parent.push(node),
                    None => top.push(node),
                }
            }
        }
    }
    if let Some((_, l, c)) = stack.pop() {
        return Err(Error::Syntax { line: l, col: c, msg: "unclosed `(`".into() });
    }
    Ok(top)
}

/// Parse exactly one form; trailing forms are an error.
pub(crate) fn parse_one(src: &str) -> Result<Sexpr> {
    let mut all = parse_all(src)?;
    match all.len() {
        0 => Err(Error::Syntax { line: 1, col: 1, msg: "empty input".into() }),
        1 => Ok(all.remove(0)),
        _ => Err(err_at(&all[1], "unexpected trailing form")),
    }
}
