//! Recursive-descent parser for the formula surface syntax.
//!
//! ```text
//! formula := disj ("implies" formula)?
//! disj    := conj ("or" conj)*
//! conj    := unary ("and" unary)*
//! unary   := "not" unary | "(" formula ")" | atom
//! atom    := term cmp term | term ("≡" | "=mod=") INT "(" "mod" INT ")"
//! cmp     := "<" | "<=" | "=" | ">=" | ">" | "!="
//! term    := ["-"] summand (("+" | "-") summand)*
//! summand := INT "*" "x" | "x" "*" INT | INT "x" | "x" | INT
//! ```
//!
//! `∧ ∨ ¬ → ≤ ≥ ≠` are accepted as synonyms of the ASCII keywords.

use crate::error::{Error, Result};

use super::ast::{Formula, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(i64),
    X,
    Star,
    Plus,
    Minus,
    LParen,
    RParen,
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
    Ne,
    Cong,
    Mod,
    And,
    Or,
    Not,
    Implies,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(n) => format!("integer {n}"),
        Tok::X => "`x`".into(),
        other => format!("{other:?}"),
    }
}

fn lex(input: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<char> = input.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |position: usize, message: String| Error::Syntax { position, message };
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let text: String = chars[i..j].iter().collect();
            let n = text
                .parse::<i64>()
                .map_err(|_| err(start, format!("integer `{text}` out of range")))?;
            out.push((start, Tok::Int(n)));
            i = j;
            continue;
        }
        if c.is_ascii_alphabetic() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_alphanumeric() {
                j += 1;
            }
            let word: String = chars[i..j].iter().collect();
            let tok = match word.as_str() {
                "x" => Tok::X,
                "mod" => Tok::Mod,
                "and" => Tok::And,
                "or" => Tok::Or,
                "not" => Tok::Not,
                "implies" => Tok::Implies,
                _ => return Err(err(start, format!("unknown word `{word}`"))),
            };
            out.push((start, tok));
            i = j;
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 5)].iter().collect();
        let (tok, len) = if rest.starts_with("=mod=") {
            (Tok::Cong, 5)
        } else if rest.starts_with("<=") {
            (Tok::Le, 2)
        } else if rest.starts_with(">=") {
            (Tok::Ge, 2)
        } else if rest.starts_with("!=") {
            (Tok::Ne, 2)
        } else if rest.starts_with("->") {
            (Tok::Implies, 2)
        } else {
            let tok = match c {
                '*' | '·' => Tok::Star,
                '+' => Tok::Plus,
                '-' | '−' => Tok::Minus,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '<' => Tok::Lt,
                '≤' => Tok::Le,
                '=' => Tok::Eq,
                '≥' => Tok::Ge,
                '>' => Tok::Gt,
                '≠' => Tok::Ne,
                '≡' => Tok::Cong,
                '∧' => Tok::And,
                '∨' => Tok::Or,
                '¬' => Tok::Not,
                '→' => Tok::Implies,
                _ => return Err(err(start, format!("unexpected character `{c}`"))),
            };
            (tok, 1)
        };
        out.push((start, tok));
        i += len;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            position: self.offset(),
            message: message.into(),
        })
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            match self.peek() {
                Some(t) => self.error(format!("expected {}, found {}", describe(tok), describe(t))),
                None => self.error(format!("expected {}, found end of input", describe(tok))),
            }
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        let lhs = self.disj()?;
        if self.eat(&Tok::Implies) {
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disj(&mut self) -> Result<Formula> {
        let mut f = self.conj()?;
        while self.eat(&Tok::Or) {
            f = Formula::or(f, self.conj()?);
        }
        Ok(f)
    }

    fn conj(&mut self) -> Result<Formula> {
        let mut f = self.unary()?;
        while self.eat(&Tok::And) {
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula> {
        if self.eat(&Tok::Not) {
            return Ok(Formula::not(self.unary()?));
        }
        if self.eat(&Tok::LParen) {
            let f = self.formula()?;
            self.expect(&Tok::RParen)?;
            return Ok(f);
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula> {
        let lhs = self.term()?;
        let op = match self.peek() {
            Some(t) => t.clone(),
            None => return self.error("expected a comparison, found end of input"),
        };
        self.pos += 1;
        let f = match op {
            Tok::Cong => {
                let residue = self.signed_int()?;
                self.expect(&Tok::LParen)?;
                self.expect(&Tok::Mod)?;
                let at = self.offset();
                let modulus = self.signed_int()?;
                if modulus <= 0 {
                    return Err(Error::Syntax {
                        position: at,
                        message: format!("modulus must be positive, found {modulus}"),
                    });
                }
                self.expect(&Tok::RParen)?;
                Formula::congruent(lhs, modulus as u64, residue)
            }
            Tok::Lt => Formula::less(lhs, self.term()?),
            Tok::Le => Formula::not(Formula::less(self.term()?, lhs)),
            Tok::Eq => Formula::equal(lhs, self.term()?),
            Tok::Ge => Formula::not(Formula::less(lhs, self.term()?)),
            Tok::Gt => Formula::less(self.term()?, lhs),
            Tok::Ne => Formula::not(Formula::equal(lhs, self.term()?)),
            other => {
                self.pos -= 1;
                return self.error(format!("expected a comparison, found {}", describe(&other)));
            }
        };
        Ok(f)
    }

    fn signed_int(&mut self) -> Result<i64> {
        let negative = self.eat(&Tok::Minus);
        match self.peek() {
            Some(Tok::Int(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(if negative { -n } else { n })
            }
            _ => self.error("expected an integer"),
        }
    }

    fn term(&mut self) -> Result<Term> {
        let overflow = |p: &Parser| p.error::<Term>("integer overflow in term");
        let negate_first = self.eat(&Tok::Minus);
        let mut acc = self.summand()?;
        if negate_first {
            acc = match (acc.coeff.checked_neg(), acc.constant.checked_neg()) {
                (Some(c), Some(k)) => Term::new(c, k),
                _ => return overflow(self),
            };
        }
        loop {
            let sign = if self.eat(&Tok::Plus) {
                1
            } else if self.eat(&Tok::Minus) {
                -1
            } else {
                return Ok(acc);
            };
            let s = self.summand()?;
            let c = s.coeff.checked_mul(sign).and_then(|c| acc.coeff.checked_add(c));
            let k = s
                .constant
                .checked_mul(sign)
                .and_then(|k| acc.constant.checked_add(k));
            acc = match (c, k) {
                (Some(c), Some(k)) => Term::new(c, k),
                _ => return overflow(self),
            };
        }
    }

    fn summand(&mut self) -> Result<Term> {
        match self.peek() {
            Some(Tok::X) => {
                self.pos += 1;
                if self.eat(&Tok::Star) {
                    match self.peek() {
                        Some(Tok::Int(n)) => {
                            let n = *n;
                            self.pos += 1;
                            Ok(Term::new(n, 0))
                        }
                        _ => self.error("expected an integer after `x *`"),
                    }
                } else {
                    Ok(Term::X)
                }
            }
            Some(Tok::Int(n)) => {
                let n = *n;
                self.pos += 1;
                if self.eat(&Tok::Star) {
                    self.expect(&Tok::X)?;
                    Ok(Term::new(n, 0))
                } else if self.eat(&Tok::X) {
                    Ok(Term::new(n, 0))
                } else {
                    Ok(Term::constant(n))
                }
            }
            Some(t) => {
                let t = describe(t);
                self.error(format!("expected a term, found {t}"))
            }
            None => self.error("expected a term, found end of input"),
        }
    }
}

/// Parses a quantifier-free formula in `x`.
pub fn parse(input: &str) -> Result<Formula> {
    let toks = lex(input)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: input.chars().count(),
    };
    let f = p.formula()?;
    if let Some(t) = p.peek() {
        let t = describe(t);
        return p.error(format!("unexpected {t} after formula"));
    }
    Ok(f)
}
