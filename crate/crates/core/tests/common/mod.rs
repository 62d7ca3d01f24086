//! Brute-force oracles written directly from the definitions. Nothing here
//! calls into the window engine or the inference code.

#![allow(dead_code)]

use presmin::UpSet;
use rand::Rng;

/// Membership from raw parts, without any canonicalization.
pub fn raw_member(threshold: u64, exceptional: &[u64], period: u64, residues: &[u64], x: u64) -> bool {
    if x < threshold {
        exceptional.contains(&x)
    } else {
        residues.contains(&(x % period))
    }
}

/// Characteristic vector of `s` on `[0, len)`.
pub fn bits_of(s: &UpSet, len: u64) -> Vec<bool> {
    (0..len).map(|x| s.contains(x)).collect()
}

/// A random set built from random parts and then canonicalized, so the
/// canonical threshold and period are at most the drawn ones.
pub fn random_upset(rng: &mut impl Rng, max_threshold: u64, max_period: u64) -> UpSet {
    let threshold = rng.gen_range(0..=max_threshold);
    let period = rng.gen_range(1..=max_period);
    let density = rng.gen_range(0.1..0.9);
    let e: Vec<u64> = (0..threshold).filter(|_| rng.gen_bool(density)).collect();
    let r: Vec<u64> = (0..period).filter(|_| rng.gen_bool(density)).collect();
    UpSet::new(threshold, &e, period, &r).unwrap()
}

pub fn random_bits(rng: &mut impl Rng, len: usize) -> Vec<bool> {
    let density = rng.gen_range(0.05..0.95);
    (0..len).map(|_| rng.gen_bool(density)).collect()
}

/// `X[a,b] = X[a+g, b+g]`, checked point by point.
pub fn pointwise_match(bits: &[bool], a: usize, b: usize, g: usize) -> bool {
    (a..=b).all(|x| bits[x] == bits[x + g])
}

/// Least `a ≤ a_max` with `X[a,a+n] = X[a+g,a+g+n]`, staying inside `bits`.
pub fn brute_atilde(bits: &[bool], n: usize, g: usize, a_max: usize) -> Option<usize> {
    (0..=a_max)
        .take_while(|&a| a + g + n < bits.len())
        .find(|&a| pointwise_match(bits, a, a + n, g))
}

pub fn brute_dtilde(bits: &[bool], n: usize, g_max: usize, a_max: usize) -> Option<usize> {
    (1..=g_max).find(|&g| brute_atilde(bits, n, g, a_max).is_some())
}

/// Literal twisted minimizer: least `d` with `ã(n,d)` defined such that
/// every `d' > d` with `ã(n,d')` defined has `ã(n,d) ≤ ã(n,d')` or
/// `ã(n,d') + d' > ã(n,d) + n`. Returns `(D, A)`.
pub fn brute_twisted(bits: &[bool], n: usize, g_max: usize, a_max: usize) -> Option<(usize, usize)> {
    let table: Vec<Option<usize>> = (0..=g_max)
        .map(|g| if g == 0 { None } else { brute_atilde(bits, n, g, a_max) })
        .collect();
    (1..=g_max).find_map(|d| {
        let a = table[d]?;
        let ok = (d + 1..=g_max).all(|d2| match table[d2] {
            None => true,
            Some(a2) => a <= a2 || a2 + d2 > a + n,
        });
        ok.then_some((d, a))
    })
}

/// `max{h ≥ x+n : X[x,h−n] = X[x+n,h]}` on the finite vector; `None` when
/// even `h = x+n` fails. `Err(h)` when the match runs to the end of `bits`.
pub fn brute_m(bits: &[bool], x: usize, n: usize) -> Option<Result<usize, usize>> {
    let last = bits.len() - 1;
    if bits[x] != bits[x + n] {
        return None;
    }
    let mut h = x + n;
    while h < last {
        if bits[h + 1 - n] != bits[h + 1] {
            return Some(Ok(h));
        }
        h += 1;
    }
    Some(Err(last))
}

pub fn sieve(bound: usize) -> Vec<usize> {
    (2..=bound)
        .filter(|&p| (2..).take_while(|q| q * q <= p).all(|q| p % q != 0))
        .collect()
}

/// `3ℕ ∩ [0, 50]` followed by the even numbers from 51 on.
pub fn mixed_parity_example() -> UpSet {
    let thirds: Vec<u64> = (0..=50).filter(|x| x % 3 == 0).collect();
    UpSet::new(51, &thirds, 2, &[0]).unwrap()
}

pub fn mixed_parity_example_member(x: u64) -> bool {
    if x <= 50 {
        x % 3 == 0
    } else {
        x % 2 == 0
    }
}
