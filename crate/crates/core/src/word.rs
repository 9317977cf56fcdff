//! Reduced words in the free product C₂∗C₃ = ⟨a, b | a² = b³ = 1⟩.
//!
//! Words serialize over the ASCII alphabet `{a, b, c}` where `c` stands for
//! b², so `"abc"` is a·b·b² and the identity is the empty string.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{arg, Error, Result};

/// A generator letter: a, b or b².
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    A,
    B,
    B2,
}

impl Letter {
    pub const ALL: [Letter; 3] = [Letter::A, Letter::B, Letter::B2];

    pub fn inverse(self) -> Letter {
        match self {
            Letter::A => Letter::A,
            Letter::B => Letter::B2,
            Letter::B2 => Letter::B,
        }
    }

    fn is_b(self) -> bool {
        matches!(self, Letter::B | Letter::B2)
    }

    /// b-exponent in Z/3, zero for `A`.
    fn b_power(self) -> u8 {
        match self {
            Letter::A => 0,
            Letter::B => 1,
            Letter::B2 => 2,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::B => 'b',
            Letter::B2 => 'c',
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'a' => Some(Letter::A),
            'b' => Some(Letter::B),
            'c' => Some(Letter::B2),
            _ => None,
        }
    }
}

/// A group element in normal form: letters alternate between `A` and the
/// b-powers, so the word length is the Cayley-graph distance to e.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReducedWord {
    letters: Vec<Letter>,
}

impl ReducedWord {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn letter(l: Letter) -> Self {
        Self { letters: vec![l] }
    }

    /// Builds a word from letters, reducing as it goes.
    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut w = Self::identity();
        for l in letters {
            w.push(l);
        }
        w
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_identity()
    }

    pub fn first(&self) -> Option<Letter> {
        self.letters.first().copied()
    }

    /// Right-multiplies by one letter, reducing at the seam.
    pub fn push(&mut self, l: Letter) {
        match self.letters.last().copied() {
            Some(Letter::A) if l == Letter::A => {
                self.letters.pop();
            }
            Some(last) if last.is_b() && l.is_b() => {
                self.letters.pop();
                match (last.b_power() + l.b_power()) % 3 {
                    0 => {}
                    1 => self.letters.push(Letter::B),
                    _ => self.letters.push(Letter::B2),
                }
            }
            _ => self.letters.push(l),
        }
    }

    pub fn times(&self, l: Letter) -> Self {
        let mut w = self.clone();
        w.push(l);
        w
    }

    pub fn multiply(&self, other: &ReducedWord) -> ReducedWord {
        let mut w = self.clone();
        for &l in &other.letters {
            w.push(l);
        }
        w
    }

    pub fn inverse(&self) -> ReducedWord {
        ReducedWord {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// The signed projection to ℤ: `0` for e, `+|w|` when the word starts
    /// with a b-power and `−|w|` when it starts with `a`.
    pub fn pi_project(&self) -> i64 {
        let len = self.letters.len() as i64;
        match self.first() {
            None => 0,
            Some(Letter::A) => -len,
            Some(_) => len,
        }
    }

    /// The automorphism b ↦ b², a ↦ a. It fixes exactly e and a and is the
    /// first of the reflections whose iterated quotients give the line.
    pub fn swap_b(&self) -> ReducedWord {
        ReducedWord {
            letters: self
                .letters
                .iter()
                .map(|&l| if l == Letter::A { l } else { l.inverse() })
                .collect(),
        }
    }

    fn is_reduced(letters: &[Letter]) -> bool {
        letters
            .windows(2)
            .all(|p| !(p[0] == Letter::A && p[1] == Letter::A) && !(p[0].is_b() && p[1].is_b()))
    }
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for ReducedWord {
    type Err = Error;

    /// Parses a word that is already in normal form; unreduced input is
    /// rejected rather than silently reduced.
    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|c| Letter::from_char(c).ok_or_else(|| arg(format!("bad letter {c:?} in word {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        if !Self::is_reduced(&letters) {
            return Err(arg(format!("word {s:?} is not reduced")));
        }
        Ok(Self { letters })
    }
}

/// `|π⁻¹(n)|`: `2^⌈n/2⌉` for n ≥ 0 and `2^⌊|n|/2⌋` for n < 0.
///
/// Panics when the count does not fit in a `u128` (|n| > 254).
pub fn fiber_size(n: i64) -> u128 {
    let exp = if n >= 0 { (n + 1) / 2 } else { (-n) / 2 };
    assert!(exp < 128, "fiber size 2^{exp} overflows u128");
    1u128 << exp
}

/// Number of reduced words of length exactly `n`.
pub fn sphere_size(n: u32) -> u128 {
    if n == 0 {
        1
    } else {
        (1u128 << n.div_ceil(2)) + (1u128 << (n / 2))
    }
}

pub fn ball_size(radius: u32) -> u128 {
    (0..=radius).map(sphere_size).sum()
}

/// The ball of reduced words of length ≤ `radius`, listed breadth-first
/// together with the index of each word's neighbours.
#[derive(Clone, Debug)]
pub struct WordBall {
    pub radius: u32,
    pub words: Vec<ReducedWord>,
    index: HashMap<ReducedWord, usize>,
}

impl WordBall {
    pub fn new(radius: u32, budget: usize) -> Result<Self> {
        let needed = ball_size(radius);
        if needed > budget as u128 {
            return Err(Error::Resource {
                what: format!("word ball of radius {radius}"),
                needed,
                budget,
            });
        }
        let mut words = vec![ReducedWord::identity()];
        let mut index = HashMap::from([(ReducedWord::identity(), 0)]);
        let mut head = 0;
        while head < words.len() {
            let w = words[head].clone();
            head += 1;
            if w.len() as u32 == radius {
                continue;
            }
            for l in Letter::ALL {
                let next = w.times(l);
                if !index.contains_key(&next) {
                    index.insert(next.clone(), words.len());
                    words.push(next);
                }
            }
        }
        debug_assert_eq!(words.len() as u128, needed);
        Ok(Self { radius, words, index })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn index_of(&self, w: &ReducedWord) -> Option<usize> {
        self.index.get(w).copied()
    }
}

/// All reduced words of length ≤ `radius`, breadth-first.
pub fn ball(radius: u32, budget: usize) -> Result<Vec<ReducedWord>> {
    WordBall::new(radius, budget).map(|b| b.words)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> ReducedWord {
        s.parse().unwrap()
    }

    #[test]
    fn multiply_examples() {
        assert_eq!(w("a").multiply(&w("a")), ReducedWord::identity());
        assert_eq!(w("b").multiply(&w("b")), w("c"));
        assert_eq!(w("ab").multiply(&w("ca")), ReducedWord::identity());
        assert_eq!(w("c").multiply(&w("c")), w("b"));
        assert_eq!(w("bab").multiply(&w("ab")), w("babab"));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(ReducedWord::identity().inverse(), ReducedWord::identity());
        assert_eq!(w("b").inverse(), w("c"));
        assert_eq!(w("ab").inverse(), w("ca"));
        assert!(w("ab").multiply(&w("ab").inverse()).is_identity());
    }

    #[test]
    fn pi_project_examples() {
        assert_eq!(ReducedWord::identity().pi_project(), 0);
        assert_eq!(w("bac").pi_project(), 3);
        assert_eq!(w("ab").pi_project(), -2);
    }

    #[test]
    fn ball_examples() {
        assert_eq!(ball(0, 100).unwrap(), vec![ReducedWord::identity()]);
        let b1 = ball(1, 100).unwrap();
        assert_eq!(b1, vec![w(""), w("a"), w("b"), w("c")]);
        assert_eq!(ball(3, 100).unwrap().len(), 14);
        assert!(matches!(ball(20, 100), Err(Error::Resource { .. })));
    }

    #[test]
    fn sphere_sizes_match_enumeration() {
        let b = ball(12, 10_000).unwrap();
        for n in 0..=12u32 {
            let count = b.iter().filter(|x| x.len() as u32 == n).count() as u128;
            assert_eq!(count, sphere_size(n), "sphere {n}");
        }
    }

    #[test]
    fn fiber_size_examples() {
        assert_eq!(fiber_size(0), 1);
        assert_eq!(fiber_size(3), 4);
        assert_eq!(fiber_size(-3), 2);
        assert_eq!(fiber_size(-1), 1);
        assert_eq!(fiber_size(-2), 2);
    }

    #[test]
    fn fiber_size_matches_enumeration() {
        let b = ball(12, 10_000).unwrap();
        for n in -12i64..=12 {
            let count = b.iter().filter(|x| x.pi_project() == n).count() as u128;
            assert_eq!(count, fiber_size(n), "fiber {n}");
        }
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!("aa".parse::<ReducedWord>().is_err());
        assert!("bc".parse::<ReducedWord>().is_err());
        assert!("axb".parse::<ReducedWord>().is_err());
        assert_eq!(w("abacab").to_string(), "abacab");
        assert!("abcab".parse::<ReducedWord>().is_err());
    }

    #[test]
    fn swap_b_fixes_only_e_and_a() {
        let b = ball(6, 10_000).unwrap();
        let fixed: Vec<_> = b.iter().filter(|x| x.swap_b() == **x).collect();
        assert_eq!(fixed, vec![&w(""), &w("a")]);
    }
}
