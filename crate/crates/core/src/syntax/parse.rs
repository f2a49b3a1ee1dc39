//! Recursive-descent parser for the formula grammar.
//!
//! ```text
//! formula := quant | imp
//! quant   := ("forall" | "exists") ident+ "." formula
//! imp     := or ("->" formula)?
//! or      := and ("|" and)*
//! and     := unary ("&" unary)*
//! unary   := "~" unary | quant | atom
//! atom    := "true" | "false" | ident ("(" term ("," term)* ")")? | "(" formula ")"
//! ```
//!
//! Quantifiers extend as far right as possible. `~A` is read as `A -> false`.
//! The usual Unicode connectives are accepted as alternatives.

use super::store::{Formula, Store, Sym, Term, RESERVED_PREFIX};
use super::SyntaxError;

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Accept `_`-prefixed identifiers (system-generated names such as the
    /// fixed constant). Off for user input.
    pub allow_reserved: bool,
}

pub fn parse_formula(
    store: &mut Store,
    text: &str,
    declared_vars: &[&str],
) -> Result<Formula, SyntaxError> {
    parse_formula_with(store, text, declared_vars, ParseOptions::default())
}

pub fn parse_formula_with(
    store: &mut Store,
    text: &str,
    declared_vars: &[&str],
    options: ParseOptions,
) -> Result<Formula, SyntaxError> {
    let tokens = lex(text, options)?;
    let declared = declared_vars.iter().map(|v| store.sym(v)).collect();
    let mut p = Parser {
        store,
        tokens,
        pos: 0,
        bound: Vec::new(),
        declared,
    };
    let f = p.formula()?;
    match p.peek() {
        Tok::Eof => Ok(f),
        _ => Err(p.error("unexpected input after formula")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Tok<'a> {
    Ident(&'a str),
    Forall,
    Exists,
    True,
    False,
    LParen,
    RParen,
    Comma,
    Dot,
    And,
    Or,
    Arrow,
    Not,
    Eof,
}

#[derive(Debug, Clone, Copy)]
struct Spanned<'a> {
    tok: Tok<'a>,
    line: usize,
    column: usize,
}

fn lex(text: &str, options: ParseOptions) -> Result<Vec<Spanned<'_>>, SyntaxError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let (mut line, mut column) = (1usize, 1usize);
    let mut k = 0;
    while k < chars.len() {
        let (i, c) = chars[k];
        let at = |tok| Spanned { tok, line, column };
        if c == '\n' {
            k += 1;
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            k += 1;
            column += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == RESERVED_PREFIX {
            let mut n = 1;
            while let Some(&(_, d)) = chars.get(k + n) {
                if d.is_ascii_alphanumeric() || d == '_' || d == '\'' {
                    n += 1;
                } else {
                    break;
                }
            }
            let end = chars.get(k + n).map_or(text.len(), |&(j, _)| j);
            let word = &text[i..end];
            if word.starts_with(RESERVED_PREFIX) && !options.allow_reserved {
                return Err(SyntaxError::Reserved {
                    name: word.to_owned(),
                    line,
                    column,
                });
            }
            let tok = match word {
                "forall" => Tok::Forall,
                "exists" => Tok::Exists,
                "true" => Tok::True,
                "false" => Tok::False,
                _ => Tok::Ident(word),
            };
            out.push(at(tok));
            k += n;
            column += n;
            continue;
        }
        let mut n = 1;
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            '&' | '∧' => Tok::And,
            '|' | '∨' => Tok::Or,
            '~' | '¬' => Tok::Not,
            '→' => Tok::Arrow,
            '∀' => Tok::Forall,
            '∃' => Tok::Exists,
            '⊤' => Tok::True,
            '⊥' => Tok::False,
            '-' if matches!(chars.get(k + 1), Some(&(_, '>'))) => {
                n = 2;
                Tok::Arrow
            }
            _ => {
                return Err(SyntaxError::Parse {
                    line,
                    column,
                    message: format!("unexpected character `{c}`"),
                })
            }
        };
        out.push(at(tok));
        k += n;
        column += n;
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

struct Parser<'a, 't> {
    store: &'a mut Store,
    tokens: Vec<Spanned<'t>>,
    pos: usize,
    bound: Vec<Sym>,
    declared: Vec<Sym>,
}

impl<'t> Parser<'_, 't> {
    fn peek(&self) -> &Tok<'t> {
        &self.tokens[self.pos].tok
    }

    fn bump(&mut self) -> Tok<'t> {
        let t = self.tokens[self.pos].tok;
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: &str) -> SyntaxError {
        let s = &self.tokens[self.pos];
        let found = match &s.tok {
            Tok::Eof => "end of input".to_owned(),
            Tok::Ident(name) => format!("`{name}`"),
            other => format!("{other:?}"),
        };
        SyntaxError::Parse {
            line: s.line,
            column: s.column,
            message: format!("{message} (found {found})"),
        }
    }

    fn expect(&mut self, tok: Tok<'t>, what: &str) -> Result<(), SyntaxError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&format!("expected {what}")))
        }
    }

    fn formula(&mut self) -> Result<Formula, SyntaxError> {
        match self.peek() {
            Tok::Forall | Tok::Exists => self.quant(),
            _ => self.imp(),
        }
    }

    fn quant(&mut self) -> Result<Formula, SyntaxError> {
        let universal = self.bump() == Tok::Forall;
        let mut vars = Vec::new();
        while let Tok::Ident(name) = self.peek() {
            let name = *name;
            self.bump();
            vars.push(self.store.sym(name));
        }
        if vars.is_empty() {
            return Err(self.error("expected a variable after quantifier"));
        }
        self.expect(Tok::Dot, "`.` after quantified variables")?;
        let depth = self.bound.len();
        self.bound.extend(vars.iter().copied());
        let body = self.formula();
        self.bound.truncate(depth);
        let mut f = body?;
        for &x in vars.iter().rev() {
            f = if universal {
                self.store.forall(x, f)
            } else {
                self.store.exists(x, f)
            };
        }
        Ok(f)
    }

    fn imp(&mut self) -> Result<Formula, SyntaxError> {
        let l = self.or()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let r = self.formula()?;
            return Ok(self.store.imp(l, r));
        }
        Ok(l)
    }

    fn or(&mut self) -> Result<Formula, SyntaxError> {
        let mut l = self.and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let r = self.and()?;
            l = self.store.or(l, r);
        }
        Ok(l)
    }

    fn and(&mut self) -> Result<Formula, SyntaxError> {
        let mut l = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            let r = self.unary()?;
            l = self.store.and(l, r);
        }
        Ok(l)
    }

    fn unary(&mut self) -> Result<Formula, SyntaxError> {
        match self.peek() {
            Tok::Not => {
                self.bump();
                let a = self.unary()?;
                Ok(self.store.not(a))
            }
            Tok::Forall | Tok::Exists => self.quant(),
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, SyntaxError> {
        match *self.peek() {
            Tok::True => {
                self.bump();
                Ok(self.store.top())
            }
            Tok::False => {
                self.bump();
                Ok(self.store.bot())
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Ident(name) => {
                self.bump();
                let rel = self.store.sym(name);
                let mut args = Vec::new();
                if *self.peek() == Tok::LParen {
                    self.bump();
                    loop {
                        args.push(self.term()?);
                        match self.bump() {
                            Tok::Comma => continue,
                            Tok::RParen => break,
                            _ => {
                                self.pos -= 1;
                                return Err(self.error("expected `,` or `)` in argument list"));
                            }
                        }
                    }
                }
                self.store.atom(rel, args)
            }
            _ => Err(self.error("expected a formula")),
        }
    }

    fn term(&mut self) -> Result<Term, SyntaxError> {
        match *self.peek() {
            Tok::Ident(name) => {
                self.bump();
                let s = self.store.sym(name);
                if self.bound.contains(&s) || self.declared.contains(&s) {
                    Ok(Term::Var(s))
                } else {
                    Ok(Term::Const(s))
                }
            }
            _ => Err(self.error("expected a term")),
        }
    }
}
