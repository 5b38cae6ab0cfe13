use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Num(u64),
    BoxOp,
    DiaOp,
    Bang,
    Amp,
    Bar,
    Arrow,
    DArrow,
    Iff,
    LParen,
    RParen,
    LBrack,
    RBrack,
    LBrace,
    RBrace,
    Comma,
    Slash,
    Eof,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub pos: usize,
}

pub fn lex(text: &str) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let rest = &text[i..];
        let (tok, len) = if rest.starts_with("<->") {
            (Tok::Iff, 3)
        } else if rest.starts_with("<>") {
            (Tok::DiaOp, 2)
        } else if rest.starts_with("[]") {
            (Tok::BoxOp, 2)
        } else if rest.starts_with("->") {
            (Tok::Arrow, 2)
        } else if rest.starts_with("=>") {
            (Tok::DArrow, 2)
        } else {
            match c {
                b'!' => (Tok::Bang, 1),
                b'&' => (Tok::Amp, 1),
                b'|' => (Tok::Bar, 1),
                b'(' => (Tok::LParen, 1),
                b')' => (Tok::RParen, 1),
                b'[' => (Tok::LBrack, 1),
                b']' => (Tok::RBrack, 1),
                b'{' => (Tok::LBrace, 1),
                b'}' => (Tok::RBrace, 1),
                b',' => (Tok::Comma, 1),
                b'/' => (Tok::Slash, 1),
                b'0'..=b'9' => {
                    let len = rest.bytes().take_while(u8::is_ascii_digit).count();
                    let n = rest[..len].parse::<u64>().map_err(|_| Error::Syntax {
                        pos: start,
                        msg: "number too large".into(),
                    })?;
                    (Tok::Num(n), len)
                }
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    let len = rest
                        .bytes()
                        .take_while(|b| b.is_ascii_alphanumeric() || *b == b'_')
                        .count();
                    (Tok::Ident(rest[..len].to_string()), len)
                }
                _ => {
                    let ch = rest.chars().next().unwrap_or('?');
                    return Err(Error::Syntax { pos: start, msg: format!("unexpected character `{ch}`") });
                }
            }
        };
        out.push(Token { tok, pos: start });
        i += len;
    }
    out.push(Token { tok: Tok::Eof, pos: text.len() });
    Ok(out)
}

/// Cursor over a token stream.
pub struct Cursor {
    toks: Vec<Token>,
    at: usize,
}

impl Cursor {
    pub fn new(toks: Vec<Token>) -> Self {
        Cursor { toks, at: 0 }
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    pub fn pos(&self) -> usize {
        self.toks[self.at].pos
    }

    pub fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].tok.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    pub fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, t: &Tok, what: &str) -> Result<()> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    pub fn error(&self, msg: String) -> Error {
        Error::Syntax { pos: self.pos(), msg }
    }
}

/// `p17` style atom names.
pub fn indexed_atom(name: &str) -> Option<u32> {
    let digits = name.strip_prefix('p')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

pub const RESERVED: &[&str] = &["box", "dia", "geq", "L", "E", "cond", "true", "false"];
