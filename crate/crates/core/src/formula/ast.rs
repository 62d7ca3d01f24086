use std::fmt;

use serde::{Deserialize, Serialize};

/// The linear term `coeff·x + constant`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Term {
    pub coeff: i64,
    pub constant: i64,
}

impl Term {
    pub const X: Term = Term {
        coeff: 1,
        constant: 0,
    };

    pub fn new(coeff: i64, constant: i64) -> Self {
        Term { coeff, constant }
    }

    pub fn constant(k: i64) -> Self {
        Term {
            coeff: 0,
            constant: k,
        }
    }

    pub fn eval(&self, x: i128) -> i128 {
        self.coeff as i128 * x + self.constant as i128
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Term { coeff, constant } = *self;
        match coeff {
            0 => return write!(f, "{constant}"),
            1 => write!(f, "x")?,
            c if c < 0 => write!(f, "0 - {}*x", c.unsigned_abs())?,
            c => write!(f, "{c}*x")?,
        }
        match constant {
            0 => Ok(()),
            k if k < 0 => write!(f, " - {}", k.unsigned_abs()),
            k => write!(f, " + {k}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "atom", rename_all = "snake_case")]
pub enum Atom {
    Less { lhs: Term, rhs: Term },
    Equal { lhs: Term, rhs: Term },
    /// `term ≡ residue (mod modulus)` with `modulus ≥ 1`, `residue < modulus`.
    Congruent {
        term: Term,
        modulus: u64,
        residue: u64,
    },
}

/// Quantifier-free formula in the single free variable `x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "op", content = "args", rename_all = "snake_case")]
pub enum Formula {
    Atom(Atom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn less(lhs: Term, rhs: Term) -> Self {
        Formula::Atom(Atom::Less { lhs, rhs })
    }

    pub fn equal(lhs: Term, rhs: Term) -> Self {
        Formula::Atom(Atom::Equal { lhs, rhs })
    }

    /// Reduces the residue; `modulus` must be positive.
    pub fn congruent(term: Term, modulus: u64, residue: i64) -> Self {
        assert!(modulus > 0, "modulus must be positive");
        Formula::Atom(Atom::Congruent {
            term,
            modulus,
            residue: residue.rem_euclid(modulus as i64) as u64,
        })
    }

    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    /// Truth value at a single point.
    pub fn holds_at(&self, x: u64) -> bool {
        let x = x as i128;
        match self {
            Formula::Atom(Atom::Less { lhs, rhs }) => lhs.eval(x) < rhs.eval(x),
            Formula::Atom(Atom::Equal { lhs, rhs }) => lhs.eval(x) == rhs.eval(x),
            Formula::Atom(Atom::Congruent {
                term,
                modulus,
                residue,
            }) => term.eval(x).rem_euclid(*modulus as i128) == *residue as i128,
            Formula::Not(f) => !f.holds_at(x as u64),
            Formula::And(a, b) => a.holds_at(x as u64) && b.holds_at(x as u64),
            Formula::Or(a, b) => a.holds_at(x as u64) || b.holds_at(x as u64),
            Formula::Implies(a, b) => !a.holds_at(x as u64) || b.holds_at(x as u64),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Implies(..) => 0,
            Formula::Or(..) => 1,
            Formula::And(..) => 2,
            Formula::Not(_) | Formula::Atom(_) => 3,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let wrap = self.precedence() < min;
        if wrap {
            write!(f, "(")?;
        }
        match self {
            Formula::Atom(a) => write!(f, "{a}")?,
            Formula::Not(inner) => match inner.as_ref() {
                Formula::Atom(Atom::Less { lhs, rhs }) => write!(f, "{lhs} >= {rhs}")?,
                other => {
                    write!(f, "not ")?;
                    other.fmt_at(f, 3)?;
                }
            },
            Formula::And(a, b) => {
                a.fmt_at(f, 2)?;
                write!(f, " and ")?;
                b.fmt_at(f, 3)?;
            }
            Formula::Or(a, b) => {
                // conjunctions inside a disjunction are parenthesized for readability
                let level = |g: &Formula, min: u8| if matches!(g, Formula::And(..)) { 3 } else { min };
                a.fmt_at(f, level(a, 1))?;
                write!(f, " or ")?;
                b.fmt_at(f, level(b, 2))?;
            }
            Formula::Implies(a, b) => {
                a.fmt_at(f, 1)?;
                write!(f, " implies ")?;
                b.fmt_at(f, 0)?;
            }
        }
        if wrap {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Less { lhs, rhs } => write!(f, "{lhs} < {rhs}"),
            Atom::Equal { lhs, rhs } => write!(f, "{lhs} = {rhs}"),
            Atom::Congruent {
                term,
                modulus,
                residue,
            } => write!(f, "{term} ≡ {residue} (mod {modulus})"),
        }
    }
}

/// Prints in the concrete syntax accepted by [`parse`](super::parse).
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}
