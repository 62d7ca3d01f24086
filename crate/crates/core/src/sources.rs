//! Set inputs: builtin sequences, files, formulas and literals.
//!
//! A source is written `kind:body`:
//!
//! ```text
//! builtin:primes?B=10000
//! builtin:union(coset(3,1), squares(400))
//! file:members.txt
//! formula:x ≡ 2 (mod 5)
//! up:up(N=5; E=1,2,3; d=7; R=5)
//! ```
//!
//! Builtins take their parameters either as a query string (`name?k=v&k=v`)
//! or as a call (`name(v, k=v)`); only the call form nests.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::formula;
use crate::set::{BoolOp, PrefixSet, SetHandle, UpSet, MAX_REPR};

pub const BUILTINS: &[&str] = &[
    "coset",
    "finite",
    "primes",
    "squares",
    "powers",
    "fibonacci",
    "union",
    "intersect",
    "difference",
    "complement",
    "shift",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FileFormat {
    /// `#horizon B` header followed by one member per line.
    Members,
    /// A single line of `0`/`1` characters.
    Bits,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Builtin {
    pub name: String,
    pub positional: Vec<String>,
    pub named: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SourceSpec {
    Builtin(Builtin),
    /// `format` is detected from the contents when absent.
    File(PathBuf, Option<FileFormat>),
    Formula(String),
    UpLiteral(String),
}

impl FromStr for SourceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, body) = s
            .split_once(':')
            .ok_or_else(|| Error::Malformed(format!("source `{s}` lacks a `kind:` prefix")))?;
        match kind.trim() {
            "builtin" => Ok(SourceSpec::Builtin(parse_builtin(body.trim())?)),
            "file" => {
                let (path, format) = match body.rsplit_once("?format=") {
                    Some((p, "members")) => (p, Some(FileFormat::Members)),
                    Some((p, "bits")) => (p, Some(FileFormat::Bits)),
                    Some((_, other)) => {
                        return Err(Error::Malformed(format!("unknown file format `{other}`")))
                    }
                    None => (body, None),
                };
                Ok(SourceSpec::File(PathBuf::from(path.trim()), format))
            }
            "formula" => Ok(SourceSpec::Formula(body.to_string())),
            "up" => Ok(SourceSpec::UpLiteral(body.trim().to_string())),
            other => Err(Error::Malformed(format!("unknown source kind `{other}`"))),
        }
    }
}

impl fmt::Display for SourceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceSpec::Builtin(b) => write!(f, "builtin:{b}"),
            SourceSpec::File(p, _) => write!(f, "file:{}", p.display()),
            SourceSpec::Formula(t) => write!(f, "formula:{t}"),
            SourceSpec::UpLiteral(t) => write!(f, "up:{t}"),
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let args: Vec<String> = self
            .positional
            .iter()
            .cloned()
            .chain(self.named.iter().map(|(k, v)| format!("{k}={v}")))
            .collect();
        write!(f, "{}({})", self.name, args.join(", "))
    }
}

/// Splits at top-level occurrences of `sep`, ignoring separators nested in
/// parentheses.
fn split_top(s: &str, sep: char) -> Result<Vec<&str>> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth = depth
                    .checked_sub(1)
                    .ok_or_else(|| Error::Malformed(format!("unbalanced `)` in `{s}`")))?
            }
            c if c == sep && depth == 0 => {
                parts.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(Error::Malformed(format!("unbalanced `(` in `{s}`")));
    }
    parts.push(&s[start..]);
    Ok(parts)
}

fn add_arg(b: &mut Builtin, arg: &str) -> Result<()> {
    let arg = arg.trim();
    if arg.is_empty() {
        return Ok(());
    }
    // `k=v` only when the `=` is outside any nested call
    let eq = split_top(arg, '=')?;
    if eq.len() > 1 && !eq[0].contains('(') {
        let (k, v) = arg.split_once('=').expect("checked above");
        if b.named.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
            return Err(Error::Malformed(format!("parameter `{}` given twice", k.trim())));
        }
    } else {
        b.positional.push(arg.to_string());
    }
    Ok(())
}

fn parse_builtin(body: &str) -> Result<Builtin> {
    let name_end = body
        .find(|c: char| c == '?' || c == '(')
        .unwrap_or(body.len());
    let mut b = Builtin {
        name: body[..name_end].trim().to_string(),
        positional: Vec::new(),
        named: BTreeMap::new(),
    };
    if !BUILTINS.contains(&b.name.as_str()) {
        return Err(Error::UnknownBuiltin(b.name));
    }
    let rest = &body[name_end..];
    if let Some(query) = rest.strip_prefix('?') {
        for pair in split_top(query, '&')? {
            add_arg(&mut b, pair)?;
        }
    } else if let Some(inner) = rest.strip_prefix('(') {
        let inner = inner
            .trim_end()
            .strip_suffix(')')
            .ok_or_else(|| Error::Malformed(format!("missing `)` in `{body}`")))?;
        for arg in split_top(inner, ',')? {
            add_arg(&mut b, arg)?;
        }
    } else if !rest.trim().is_empty() {
        return Err(Error::Malformed(format!("unexpected `{rest}` after builtin name")));
    }
    Ok(b)
}

impl Builtin {
    fn raw(&self, key: &str, index: usize) -> Option<&str> {
        self.named
            .get(key)
            .map(String::as_str)
            .or_else(|| self.positional.get(index).map(String::as_str))
    }

    fn required(&self, key: &str, index: usize) -> Result<&str> {
        self.raw(key, index)
            .ok_or_else(|| Error::Malformed(format!("builtin `{}` needs `{key}`", self.name)))
    }

    fn number<T: FromStr>(&self, key: &str, index: usize) -> Result<T> {
        let raw = self.required(key, index)?;
        raw.trim()
            .parse()
            .map_err(|_| Error::Malformed(format!("`{key}` of `{}` is not a number: `{raw}`", self.name)))
    }

    fn horizon(&self, index: usize) -> Result<u64> {
        let b: u64 = self.number("B", index)?;
        if b > MAX_REPR {
            return Err(Error::Capacity(format!("horizon {b} exceeds {MAX_REPR}")));
        }
        Ok(b)
    }

    fn operand(&self, key: &str, index: usize) -> Result<SetHandle> {
        resolve_operand(self.required(key, index)?)
    }
}

/// Nested operands: a full source spec, an `up(...)` literal, or a bare
/// builtin call.
fn resolve_operand(text: &str) -> Result<SetHandle> {
    let text = text.trim();
    if text.starts_with("up(") {
        return Ok(text.parse::<UpSet>()?.into());
    }
    match text.split_once(':') {
        Some((kind, _)) if ["builtin", "file", "formula", "up"].contains(&kind) => {
            resolve(&text.parse()?)
        }
        _ => resolve_builtin(&parse_builtin(text)?),
    }
}

fn sieve(bound: u64) -> Vec<bool> {
    let n = bound as usize;
    let mut flags = vec![true; n + 1];
    flags[0] = false;
    if n >= 1 {
        flags[1] = false;
    }
    let mut p = 2;
    while p * p <= n {
        if flags[p] {
            for q in (p * p..=n).step_by(p) {
                flags[q] = false;
            }
        }
        p += 1;
    }
    flags
}

fn resolve_builtin(b: &Builtin) -> Result<SetHandle> {
    match b.name.as_str() {
        "coset" => Ok(UpSet::coset(b.number("d", 0)?, b.number("r", 1)?)?.into()),
        "finite" => {
            let items: Vec<&str> = match b.named.get("list") {
                Some(list) => list.split(',').collect(),
                None => b.positional.iter().map(String::as_str).collect(),
            };
            let points = items
                .iter()
                .map(|s| s.trim())
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<u64>()
                        .map_err(|_| Error::Malformed(format!("`{s}` is not a natural")))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(UpSet::finite(&points)?.into())
        }
        "primes" => Ok(PrefixSet::from_flags(sieve(b.horizon(0)?))?.into()),
        "squares" => {
            let bound = b.horizon(0)?;
            let members = (0u64..).map(|k| k * k).take_while(|&s| s <= bound);
            Ok(PrefixSet::from_members(bound, members)?.into())
        }
        "powers" => {
            let k: u64 = b.number("k", 0)?;
            if k < 2 {
                return Err(Error::Malformed("`powers` needs k ≥ 2".into()));
            }
            let bound = b.horizon(1)?;
            let members = std::iter::successors(Some(1u64), |&p| p.checked_mul(k))
                .take_while(|&p| p <= bound);
            Ok(PrefixSet::from_members(bound, members)?.into())
        }
        "fibonacci" => {
            let bound = b.horizon(0)?;
            let members = std::iter::successors(Some((0u64, 1u64)), |&(a, c)| Some((c, a + c)))
                .map(|(a, _)| a)
                .take_while(|&a| a <= bound);
            Ok(PrefixSet::from_members(bound, members)?.into())
        }
        "union" | "intersect" | "difference" => {
            let op = match b.name.as_str() {
                "union" => BoolOp::Union,
                "intersect" => BoolOp::Intersect,
                _ => BoolOp::Difference,
            };
            b.operand("a", 0)?.combine(&b.operand("b", 1)?, op)
        }
        "complement" => b.operand("a", 0)?.complement(),
        "shift" => b.operand("a", 0)?.shift(b.number("t", 1)?),
        other => Err(Error::UnknownBuiltin(other.to_string())),
    }
}

/// Reads a prefix file. Blank lines and `#` comments are ignored apart from
/// the `#horizon B` header.
pub fn load_file(path: &Path, format: Option<FileFormat>) -> Result<PrefixSet> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_prefix(&text, format)
}

pub fn parse_prefix(text: &str, format: Option<FileFormat>) -> Result<PrefixSet> {
    let mut horizon = None;
    let mut lines = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(value) = comment.trim().strip_prefix("horizon") {
                let b: u64 = value.trim().parse().map_err(|_| {
                    Error::Malformed(format!("line {}: bad horizon `{}`", no + 1, value.trim()))
                })?;
                if horizon.replace(b).is_some() {
                    return Err(Error::Malformed("duplicate #horizon header".into()));
                }
            }
        } else if !line.is_empty() {
            lines.push((no + 1, line));
        }
    }
    let format = format.unwrap_or(match (horizon, lines.as_slice()) {
        (Some(_), _) => FileFormat::Members,
        (None, [(_, only)]) if only.chars().all(|c| c == '0' || c == '1') => FileFormat::Bits,
        _ => FileFormat::Members,
    });
    match format {
        FileFormat::Bits => {
            let [(_, bits)] = lines.as_slice() else {
                return Err(Error::Malformed(
                    "a characteristic vector is a single line of 0/1".into(),
                ));
            };
            let flags = bits
                .chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    other => Err(Error::Malformed(format!("unexpected `{other}` in bit string"))),
                })
                .collect::<Result<Vec<_>>>()?;
            if let Some(b) = horizon {
                if b + 1 != flags.len() as u64 {
                    return Err(Error::Malformed(format!(
                        "#horizon {b} but {} bits",
                        flags.len()
                    )));
                }
            }
            PrefixSet::from_flags(flags)
        }
        FileFormat::Members => {
            let horizon = horizon
                .ok_or_else(|| Error::Malformed("member list without #horizon header".into()))?;
            let members = lines
                .iter()
                .map(|&(no, l)| {
                    l.parse::<u64>()
                        .map_err(|_| Error::Malformed(format!("line {no}: `{l}` is not a natural")))
                })
                .collect::<Result<Vec<_>>>()?;
            if let Some(&x) = members.iter().find(|&&x| x > horizon) {
                return Err(Error::Malformed(format!("member {x} beyond horizon {horizon}")));
            }
            PrefixSet::from_members(horizon, members)
        }
    }
}

pub fn resolve(spec: &SourceSpec) -> Result<SetHandle> {
    match spec {
        SourceSpec::Builtin(b) => resolve_builtin(b),
        SourceSpec::File(path, format) => Ok(load_file(path, *format)?.into()),
        SourceSpec::Formula(text) => Ok(formula::eval(&formula::parse(text)?)?.into()),
        SourceSpec::UpLiteral(text) => Ok(text.parse::<UpSet>()?.into()),
    }
}

/// Parses and resolves in one step.
pub fn resolve_str(spec: &str) -> Result<SetHandle> {
    resolve(&spec.parse()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_examples() {
        let coset = resolve_str("builtin:coset?d=3&r=1").unwrap();
        assert_eq!(coset.as_periodic().unwrap(), &UpSet::coset(3, 1).unwrap());
        let primes = resolve_str("builtin:primes?B=100").unwrap();
        assert_eq!(primes.to_prefix(100).unwrap().members().len(), 25);
        let evens = resolve_str("formula:x ≡ 0 (mod 2)").unwrap();
        assert_eq!(evens.as_periodic().unwrap(), &UpSet::coset(2, 0).unwrap());
        let lit = resolve_str("up:up(N=5;E=1,2,3;d=7;R=5)").unwrap();
        assert!(lit.contains(12).unwrap() && !lit.contains(4).unwrap());
    }

    #[test]
    fn call_form_and_composites() {
        let a = resolve_str("builtin:coset(3, 1)").unwrap();
        assert_eq!(a.as_periodic().unwrap(), &UpSet::coset(3, 1).unwrap());
        let u = resolve_str("builtin:union(coset(3,1), squares(100))").unwrap();
        assert_eq!(u.horizon(), Some(100));
        assert!(u.contains(4).unwrap() && u.contains(9).unwrap() && !u.contains(6).unwrap());
        let s = resolve_str("builtin:shift(up(d=5; R=2), t=2)").unwrap();
        assert_eq!(s.as_periodic().unwrap(), &UpSet::coset(5, 0).unwrap());
        let c = resolve_str("builtin:complement(finite(0,1,2))").unwrap();
        assert_eq!(c.as_periodic().unwrap(), &UpSet::at_least(3).unwrap());
        let f = resolve_str("builtin:finite?list=4,1,9").unwrap();
        assert_eq!(f.as_periodic().unwrap(), &UpSet::finite(&[1, 4, 9]).unwrap());
        let d = resolve_str("builtin:difference(a=formula:x < 10, b=coset(2,0))").unwrap();
        assert_eq!(d.as_periodic().unwrap(), &UpSet::finite(&[1, 3, 5, 7, 9]).unwrap());
    }

    #[test]
    fn sequences() {
        let members = |s: &str| resolve_str(s).unwrap().to_prefix(100).unwrap().members();
        assert_eq!(members("builtin:powers?k=3&B=100"), vec![1, 3, 9, 27, 81]);
        assert_eq!(
            members("builtin:fibonacci?B=100"),
            vec![0, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89]
        );
        assert_eq!(members("builtin:squares?B=100").len(), 11);
    }

    #[test]
    fn errors() {
        assert_eq!(
            resolve_str("builtin:cubes?B=10").unwrap_err(),
            Error::UnknownBuiltin("cubes".into())
        );
        assert!(matches!(resolve_str("builtin:primes"), Err(Error::Malformed(_))));
        assert!(matches!(resolve_str("formula:x <"), Err(Error::Syntax { .. })));
        assert!(matches!(resolve_str("nothing"), Err(Error::Malformed(_))));
        assert!(matches!(resolve_str("builtin:union(coset(2,0)"), Err(Error::Malformed(_))));
    }

    #[test]
    fn file_formats() {
        let p = parse_prefix("#horizon 10\n1\n4\n\n9\n", None).unwrap();
        assert_eq!((p.horizon(), p.members()), (10, vec![1, 4, 9]));
        let p = parse_prefix("# squares\n0110\n", None).unwrap();
        assert_eq!((p.horizon(), p.members()), (3, vec![1, 2]));
        assert!(parse_prefix("1\n4\n", None).is_err());
        assert!(parse_prefix("#horizon 3\n7\n", None).is_err());
        assert!(parse_prefix("#horizon 5\n0110\n", Some(FileFormat::Bits)).is_err());
    }
}
