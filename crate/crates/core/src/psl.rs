//! The finite quotients PSL₂(𝔽_p) of PSL₂ℤ.

use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::fmt;

use crate::error::{arg, Error, Result};
use crate::word::{Letter, ReducedWord};

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn check_prime(p: u32) -> Result<()> {
    if is_prime(p as u64) {
        Ok(())
    } else {
        Err(arg(format!("{p} is not prime")))
    }
}

/// `p(p² − 1)/2` for odd p, and 6 for p = 2.
pub fn psl_order(p: u32) -> u128 {
    let p = p as u128;
    if p == 2 {
        6
    } else {
        p * (p * p - 1) / 2
    }
}

/// A 2×2 determinant-one matrix mod p, stored with its sign-normalized
/// representative: the first nonzero entry (row-major) lies in 1..=(p−1)/2.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PslElement {
    p: u32,
    entries: [u32; 4],
}

impl PslElement {
    /// Builds an element from integer entries, reducing mod p and normalizing
    /// the sign. Fails if p is not prime or the determinant is not 1 mod p.
    pub fn new(p: u32, entries: [i64; 4]) -> Result<Self> {
        check_prime(p)?;
        let m = entries.map(|e| e.rem_euclid(p as i64) as u32);
        let det = (m[0] as u64 * m[3] as u64 + (p - 1) as u64 * ((m[1] as u64 * m[2] as u64) % p as u64)) % p as u64;
        if det != 1 {
            return Err(arg(format!("determinant of {entries:?} is {det} mod {p}, not 1")));
        }
        Ok(Self::normalized(p, m))
    }

    fn normalized(p: u32, mut m: [u32; 4]) -> Self {
        if p > 2 {
            let first = m.iter().copied().find(|&e| e != 0).unwrap_or(0);
            if first > (p - 1) / 2 {
                for e in &mut m {
                    *e = (p - *e) % p;
                }
            }
        }
        Self { p, entries: m }
    }

    pub fn identity(p: u32) -> Result<Self> {
        Self::new(p, [1, 0, 0, 1])
    }

    /// Image of a generator letter: a = (0 −1; 1 0), b = (0 −1; 1 1).
    pub fn generator(p: u32, l: Letter) -> Result<Self> {
        match l {
            Letter::A => Self::new(p, [0, -1, 1, 0]),
            Letter::B => Self::new(p, [0, -1, 1, 1]),
            Letter::B2 => Self::new(p, [-1, -1, 1, 0]),
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn entries(&self) -> [u32; 4] {
        self.entries
    }

    pub fn mul(&self, other: &PslElement) -> PslElement {
        assert_eq!(self.p, other.p, "mixing moduli");
        let p = self.p as u64;
        let [a, b, c, d] = self.entries.map(u64::from);
        let [e, f, g, h] = other.entries.map(u64::from);
        let m = [
            (a * e + b * g) % p,
            (a * f + b * h) % p,
            (c * e + d * g) % p,
            (c * f + d * h) % p,
        ];
        Self::normalized(self.p, m.map(|x| x as u32))
    }
}

impl fmt::Debug for PslElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.entries;
        write!(f, "[{a} {b}; {c} {d}] mod {}", self.p)
    }
}

/// Image of a word under the reduction map PSL₂ℤ → PSL₂(𝔽_p).
pub fn psl_image(w: &ReducedWord, p: u32) -> Result<PslElement> {
    let gens = Letter::ALL.map(|l| PslElement::generator(p, l));
    let mut acc = PslElement::identity(p)?;
    for &l in w.letters() {
        let g = gens[l as usize].as_ref().map_err(Clone::clone)?;
        acc = acc.mul(g);
    }
    Ok(acc)
}

/// The whole group, enumerated breadth-first from the identity by right
/// multiplication with a, b and b².
#[derive(Clone, Debug)]
pub struct PslGroup {
    pub p: u32,
    pub elements: Vec<PslElement>,
    index: HashMap<PslElement, usize>,
}

impl PslGroup {
    pub fn enumerate(p: u32, budget: usize) -> Result<Self> {
        check_prime(p)?;
        let needed = psl_order(p);
        if needed > budget as u128 {
            return Err(Error::Resource {
                what: format!("PSL2(F_{p})"),
                needed,
                budget,
            });
        }
        let gens = Letter::ALL.map(|l| PslElement::generator(p, l).expect("generators are valid"));
        let id = PslElement::identity(p)?;
        let mut elements = vec![id];
        let mut index = HashMap::from([(id, 0)]);
        let mut head = 0;
        while head < elements.len() {
            let x = elements[head];
            head += 1;
            for g in &gens {
                let y = x.mul(g);
                if let Entry::Vacant(e) = index.entry(y) {
                    e.insert(elements.len());
                    elements.push(y);
                }
            }
        }
        if elements.len() as u128 != needed {
            return Err(Error::Invariant(format!(
                "generated {} elements of PSL2(F_{p}), expected {needed}",
                elements.len()
            )));
        }
        Ok(Self { p, elements, index })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, x: &PslElement) -> Option<usize> {
        self.index.get(x).copied()
    }
}

pub fn enumerate_psl(p: u32, budget: usize) -> Result<Vec<PslElement>> {
    PslGroup::enumerate(p, budget).map(|g| g.elements)
}

/// Genus `(p−5)(p−3)(p+2)/24` of the surface tiled by the Cayley graph of
/// PSL₂(𝔽_p), for odd primes p.
pub fn genus(p: u32) -> Result<u64> {
    check_prime(p)?;
    if p == 2 {
        return Err(arg("genus formula needs an odd prime"));
    }
    let (p5, p3, p2) = (p as i64 - 5, p as i64 - 3, p as i64 + 2);
    let num = p5 * p3 * p2;
    assert!(num % 24 == 0, "genus numerator {num} not divisible by 24 for p = {p}");
    Ok((num / 24) as u64)
}
