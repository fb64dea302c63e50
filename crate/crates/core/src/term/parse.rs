use super::{Clause, Identity, Signature, Term};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Word(String),
    Punct(String),
    LParen,
    RParen,
    Comma,
    Eq,
    Arrow,
    Bar,
}

struct Lexer<'a> {
    sig: &'a Signature,
    toks: Vec<(usize, Tok)>,
}

impl<'a> Lexer<'a> {
    fn run(sig: &'a Signature, src: &str) -> Result<Vec<(usize, Tok)>> {
        let mut lx = Lexer {
            sig,
            toks: Vec::new(),
        };
        lx.scan(src)?;
        Ok(lx.toks)
    }

    fn scan(&mut self, src: &str) -> Result<()> {
        let mut punct: Vec<&str> = self
            .sig
            .ops
            .iter()
            .flat_map(|o| o.infix.iter().chain(o.glyph.iter()))
            .map(String::as_str)
            .filter(|g| !g.chars().all(|c| c.is_ascii_alphanumeric() || c == '_'))
            .collect();
        punct.extend(["=>", "=", "|", ","]);
        punct.sort_by_key(|g| std::cmp::Reverse(g.len()));

        let bytes = src.as_bytes();
        let mut i = 0;
        while i < src.len() {
            let c = src[i..].chars().next().unwrap();
            if c.is_whitespace() {
                i += c.len_utf8();
                continue;
            }
            if c == '(' {
                self.toks.push((i, Tok::LParen));
                i += 1;
                continue;
            }
            if c == ')' {
                self.toks.push((i, Tok::RParen));
                i += 1;
                continue;
            }
            if c.is_ascii_alphanumeric() || c == '_' {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'\'')
                {
                    i += 1;
                }
                self.toks
                    .push((start, Tok::Word(src[start..i].to_string())));
                continue;
            }
            let Some(g) = punct.iter().find(|g| src[i..].starts_with(**g)) else {
                return Err(Error::Parse {
                    pos: i,
                    msg: format!("unexpected character `{c}`"),
                });
            };
            let tok = match *g {
                "=>" => Tok::Arrow,
                "=" => Tok::Eq,
                "|" => Tok::Bar,
                "," => Tok::Comma,
                other => Tok::Punct(other.to_string()),
            };
            self.toks.push((i, tok));
            i += g.len();
        }
        Ok(())
    }
}

struct Parser<'a> {
    sig: &'a Signature,
    toks: Vec<(usize, Tok)>,
    pos: usize,
    len: usize,
}

impl<'a> Parser<'a> {
    fn new(sig: &'a Signature, src: &str) -> Result<Self> {
        Ok(Parser {
            sig,
            toks: Lexer::run(sig, src)?,
            pos: 0,
            len: src.len(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|(c, _)| *c).unwrap_or(self.len)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.col(),
            msg: msg.into(),
        })
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn term(&mut self) -> Result<Term> {
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let lhs = self.term()?;
                let glyph = match self.next() {
                    Some(Tok::Punct(g)) => g,
                    Some(Tok::Word(g)) => g,
                    _ => {
                        self.pos -= 1;
                        return self.err("expected infix operator");
                    }
                };
                let Some(op) = self
                    .sig
                    .ops
                    .iter()
                    .position(|o| o.infix.as_deref() == Some(glyph.as_str()))
                else {
                    self.pos -= 1;
                    return self.err(format!("`{glyph}` is not an infix operator"));
                };
                let rhs = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Term::App(op, vec![lhs, rhs]))
            }
            Some(Tok::Punct(g)) => {
                if let Some(op) = self
                    .sig
                    .ops
                    .iter()
                    .position(|o| o.glyph.as_deref() == Some(g.as_str()))
                {
                    self.pos += 1;
                    Ok(Term::constant(op))
                } else {
                    self.err(format!("unexpected `{g}`"))
                }
            }
            Some(Tok::Word(w)) => {
                self.pos += 1;
                if let Some(op) = self
                    .sig
                    .ops
                    .iter()
                    .position(|o| o.glyph.as_deref() == Some(w.as_str()))
                {
                    return Ok(Term::constant(op));
                }
                if let Some(op) = self.sig.lookup(&w) {
                    let arity = self.sig.arity(op);
                    let mut args = Vec::new();
                    if self.peek() == Some(&Tok::LParen) {
                        self.pos += 1;
                        args.push(self.term()?);
                        while self.peek() == Some(&Tok::Comma) {
                            self.pos += 1;
                            args.push(self.term()?);
                        }
                        self.expect(Tok::RParen, "`)` or `,`")?;
                    }
                    if args.len() != arity {
                        return Err(Error::Arity {
                            symbol: w,
                            expected: arity,
                            got: args.len(),
                        });
                    }
                    return Ok(Term::App(op, args));
                }
                if !super::is_ident(&w) {
                    self.pos -= 1;
                    return self.err(format!("`{w}` is not a variable or constant"));
                }
                if self.peek() == Some(&Tok::LParen) {
                    self.pos -= 1;
                    return Err(Error::UnknownSymbol(w));
                }
                Ok(Term::Var(w))
            }
            Some(_) => self.err("expected a term"),
            None => self.err("unexpected end of input"),
        }
    }

    fn identity(&mut self) -> Result<Identity> {
        let lhs = self.term()?;
        self.expect(Tok::Eq, "`=`")?;
        let rhs = self.term()?;
        Ok(Identity::new(lhs, rhs))
    }

    fn finish(&self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            self.err("trailing input")
        }
    }
}

pub fn parse_term(sig: &Signature, src: &str) -> Result<Term> {
    let mut p = Parser::new(sig, src)?;
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

pub fn parse_identity(sig: &Signature, src: &str) -> Result<Identity> {
    let mut p = Parser::new(sig, src)?;
    let id = p.identity()?;
    p.finish()?;
    Ok(id)
}

/// Comma-separated identities; the empty string is the empty set.
pub fn parse_identities(sig: &Signature, src: &str) -> Result<Vec<Identity>> {
    let mut p = Parser::new(sig, src)?;
    let mut out = Vec::new();
    if p.at_end() {
        return Ok(out);
    }
    out.push(p.identity()?);
    while p.peek() == Some(&Tok::Comma) {
        p.pos += 1;
        out.push(p.identity()?);
    }
    p.finish()?;
    Ok(out)
}

pub fn parse_clause(sig: &Signature, src: &str) -> Result<Clause> {
    let mut p = Parser::new(sig, src)?;
    let mut premises = Vec::new();
    if p.peek() != Some(&Tok::Arrow) {
        premises.push(p.identity()?);
        while p.peek() == Some(&Tok::Comma) {
            p.pos += 1;
            premises.push(p.identity()?);
        }
    }
    p.expect(Tok::Arrow, "`=>`")?;
    let mut conclusions = Vec::new();
    if !p.at_end() {
        conclusions.push(p.identity()?);
        while p.peek() == Some(&Tok::Bar) {
            p.pos += 1;
            conclusions.push(p.identity()?);
        }
    }
    p.finish()?;
    Ok(Clause::new(premises, conclusions))
}
