//! One-variable quantifier-free Presburger formulas: parsing, evaluation to
//! an [`UpSet`], and synthesis of the normal form "finitely many points plus
//! cosets of `dℕ` above a threshold".

mod ast;
mod parser;

pub use ast::{Atom, Formula, Term};
pub use parser::parse;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::set::{BoolOp, UpSet, MAX_REPR};

fn bounded(value: i128) -> Result<u64> {
    if value > MAX_REPR as i128 {
        Err(Error::Capacity(format!("bound {value} exceeds {MAX_REPR}")))
    } else {
        Ok(value.max(0) as u64)
    }
}

/// `{x ∈ ℕ : c·x + k < 0}`.
fn solve_less(c: i128, k: i128) -> Result<UpSet> {
    Ok(match c.signum() {
        0 if k < 0 => UpSet::full(),
        0 => UpSet::empty(),
        1 => UpSet::below(bounded(Integer::div_ceil(&-k, &c))?)?,
        _ => UpSet::at_least(bounded(Integer::div_floor(&k, &-c) + 1)?)?,
    })
}

/// `{x ∈ ℕ : c·x + k = 0}`.
fn solve_equal(c: i128, k: i128) -> Result<UpSet> {
    if c == 0 {
        return Ok(if k == 0 { UpSet::full() } else { UpSet::empty() });
    }
    if (-k) % c != 0 || (-k) / c < 0 {
        return Ok(UpSet::empty());
    }
    UpSet::finite(&[bounded((-k) / c)?])
}

/// `{x ∈ ℕ : c·x + k ≡ r (mod m)}`, reduced to a single coset of
/// `(m / gcd(c, m))ℕ` or the empty set.
fn solve_congruence(c: i128, k: i128, m: i128, r: i128) -> Result<UpSet> {
    let c = c.rem_euclid(m);
    let t = (r - k).rem_euclid(m);
    let g = c.gcd(&m);
    if t % g != 0 {
        return Ok(UpSet::empty());
    }
    let modulus = m / g;
    let unit = c / g;
    // unit is invertible mod `modulus`
    let inverse = unit.extended_gcd(&modulus).x.rem_euclid(modulus);
    let residue = ((t / g) * inverse).rem_euclid(modulus);
    UpSet::coset(bounded(modulus)?, residue as u64)
}

fn eval_atom(atom: &Atom) -> Result<UpSet> {
    match atom {
        Atom::Less { lhs, rhs } => solve_less(
            lhs.coeff as i128 - rhs.coeff as i128,
            lhs.constant as i128 - rhs.constant as i128,
        ),
        Atom::Equal { lhs, rhs } => solve_equal(
            lhs.coeff as i128 - rhs.coeff as i128,
            lhs.constant as i128 - rhs.constant as i128,
        ),
        Atom::Congruent {
            term,
            modulus,
            residue,
        } => solve_congruence(
            term.coeff as i128,
            term.constant as i128,
            *modulus as i128,
            *residue as i128,
        ),
    }
}

/// The set of naturals satisfying `f`. Unsatisfiable atoms give the empty
/// set; the only failure is a representation beyond [`MAX_REPR`].
pub fn eval(f: &Formula) -> Result<UpSet> {
    match f {
        Formula::Atom(a) => eval_atom(a),
        Formula::Not(g) => Ok(eval(g)?.complement()),
        Formula::And(a, b) => eval(a)?.combine(&eval(b)?, BoolOp::Intersect),
        Formula::Or(a, b) => eval(a)?.combine(&eval(b)?, BoolOp::Union),
        Formula::Implies(a, b) => eval(a)?.complement().combine(&eval(b)?, BoolOp::Union),
    }
}

/// Normal form of `s`: one equality per exceptional point, then one
/// `x ≥ N ∧ x ≡ r (mod d)` clause per residue (the bound is dropped when
/// `N = 0`). The empty set becomes `x < 0`.
pub fn synthesize(s: &UpSet) -> Formula {
    let s = s.canonicalize();
    let threshold = s.threshold() as i64;
    let period = s.period();
    let points = s
        .exceptional()
        .into_iter()
        .map(|e| Formula::equal(Term::X, Term::constant(e as i64)));
    let cosets = s.residues().into_iter().map(|r| {
        let congruence = Formula::congruent(Term::X, period, r as i64);
        if threshold == 0 {
            congruence
        } else {
            Formula::and(
                Formula::not(Formula::less(Term::X, Term::constant(threshold))),
                congruence,
            )
        }
    });
    points
        .chain(cosets)
        .reduce(Formula::or)
        .unwrap_or_else(|| Formula::less(Term::X, Term::constant(0)))
}
