//! Finite-rank free groups: reduced words and homomorphisms given by
//! generator images.

mod conjugacy;
mod nielsen;

pub use conjugacy::{conjugacy_normal_form, tuples_conjugate, NormalForm};
pub use nielsen::{nielsen_generators, random_automorphism, NielsenReduction};

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

/// A freely reduced word in `F_rank`. Letter `k` stands for `x_k`, `-k` for
/// its inverse.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Word {
    rank: usize,
    letters: Vec<i32>,
}

impl Word {
    pub fn identity(rank: usize) -> Word {
        Word { rank, letters: Vec::new() }
    }

    /// The generator `x_k`, with `k` counted from 1.
    pub fn generator(rank: usize, k: usize) -> Word {
        assert!(k >= 1 && k <= rank, "generator x{k} outside F_{rank}");
        Word { rank, letters: vec![k as i32] }
    }

    pub fn reduce(rank: usize, letters: &[i32]) -> Result<Word> {
        for &l in letters {
            if l == 0 || l.unsigned_abs() as usize > rank {
                return Err(Error::BadLetter { letter: l, rank });
            }
        }
        Ok(Word { rank, letters: free_reduce(letters.iter().copied()) })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    /// Product `self * other`. Both words must live in the same group.
    pub fn mul(&self, other: &Word) -> Word {
        assert_eq!(self.rank, other.rank, "multiplying words of different rank");
        Word { rank: self.rank, letters: free_reduce(self.letters.iter().chain(&other.letters).copied()) }
    }

    pub fn inverse(&self) -> Word {
        Word { rank: self.rank, letters: self.letters.iter().rev().map(|&l| -l).collect() }
    }

    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity(self.rank);
        for _ in 0..n.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// `c * self * c^-1`.
    pub fn conjugate_by(&self, c: &Word) -> Word {
        c.mul(self).mul(&c.inverse())
    }

    /// The same letters read in a group of another rank.
    pub fn with_rank(&self, rank: usize) -> Result<Word> {
        Word::reduce(rank, &self.letters)
    }

    /// Writes `self = c * core * c^-1` with `core` cyclically reduced.
    pub fn cyclic_decomposition(&self) -> (Word, Word) {
        let l = &self.letters;
        let mut k = 0;
        while l.len() >= 2 * (k + 1) && l[k] == -l[l.len() - 1 - k] {
            k += 1;
        }
        let c = Word { rank: self.rank, letters: l[..k].to_vec() };
        let core = Word { rank: self.rank, letters: l[k..l.len() - k].to_vec() };
        (c, core)
    }

    /// Shortlex comparison with the letter order `x1 < x1^-1 < x2 < ...`.
    pub fn shortlex_cmp(&self, other: &Word) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| {
            let a = self.letters.iter().map(|&l| letter_key(l));
            let b = other.letters.iter().map(|&l| letter_key(l));
            a.cmp(b)
        })
    }

    /// Parses `x1*x2^-1*x1`; `1` is the identity.
    pub fn parse(rank: usize, text: &str) -> Result<Word> {
        let text = text.trim();
        if text == "1" {
            return Ok(Word::identity(rank));
        }
        let mut letters = Vec::new();
        let mut offset = 0;
        for token in text.split('*') {
            let bad = || Error::Malformed(format!("bad word token `{token}` at byte {offset} of `{text}`"));
            let body = token.strip_prefix('x').ok_or_else(bad)?;
            let (index, inverse) = match body.strip_suffix("^-1") {
                Some(i) => (i, true),
                None => (body, false),
            };
            if index.is_empty() || !index.bytes().all(|b| b.is_ascii_digit()) || index.starts_with('0') {
                return Err(bad());
            }
            let k: i32 = index.parse().map_err(|_| bad())?;
            letters.push(if inverse { -k } else { k });
            offset += token.len() + 1;
        }
        let w = Word::reduce(rank, &letters)?;
        if w.letters != letters {
            return Err(Error::Malformed(format!("word `{text}` is not freely reduced")));
        }
        Ok(w)
    }
}

fn letter_key(l: i32) -> u32 {
    2 * l.unsigned_abs() - u32::from(l > 0)
}

fn free_reduce(letters: impl Iterator<Item = i32>) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::new();
    for l in letters {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        for (k, &l) in self.letters.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            if l > 0 {
                write!(f, "x{l}")?;
            } else {
                write!(f, "x{}^-1", -l)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A homomorphism `F_domain_rank -> F_codomain_rank`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GroupMap {
    domain_rank: usize,
    codomain_rank: usize,
    images: Vec<Word>,
}

impl GroupMap {
    pub fn new(domain_rank: usize, codomain_rank: usize, images: Vec<Word>) -> Result<GroupMap> {
        if images.len() != domain_rank {
            return Err(Error::LengthMismatch(domain_rank, images.len()));
        }
        for w in &images {
            if w.rank != codomain_rank {
                return Err(Error::RankMismatch { expected: codomain_rank, found: w.rank });
            }
        }
        Ok(GroupMap { domain_rank, codomain_rank, images })
    }

    /// An endomorphism of `F_rank` from its generator images.
    pub fn from_images(rank: usize, images: Vec<Word>) -> Result<GroupMap> {
        GroupMap::new(rank, rank, images)
    }

    /// Endomorphism from raw letter lists, reducing each.
    pub fn from_letters(rank: usize, images: &[&[i32]]) -> Result<GroupMap> {
        let words = images.iter().map(|l| Word::reduce(rank, l)).collect::<Result<Vec<_>>>()?;
        GroupMap::from_images(rank, words)
    }

    pub fn identity(rank: usize) -> GroupMap {
        GroupMap { domain_rank: rank, codomain_rank: rank, images: (1..=rank).map(|k| Word::generator(rank, k)).collect() }
    }

    pub fn domain_rank(&self) -> usize {
        self.domain_rank
    }

    pub fn codomain_rank(&self) -> usize {
        self.codomain_rank
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn image(&self, k: usize) -> &Word {
        &self.images[k - 1]
    }

    pub fn apply(&self, w: &Word) -> Result<Word> {
        if w.rank != self.domain_rank {
            return Err(Error::RankMismatch { expected: self.domain_rank, found: w.rank });
        }
        let mut letters = Vec::new();
        for &l in &w.letters {
            let img = &self.images[l.unsigned_abs() as usize - 1];
            if l > 0 {
                letters.extend_from_slice(&img.letters);
            } else {
                letters.extend(img.letters.iter().rev().map(|&x| -x));
            }
        }
        Ok(Word { rank: self.codomain_rank, letters: free_reduce(letters.into_iter()) })
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &GroupMap) -> Result<GroupMap> {
        if first.codomain_rank != self.domain_rank {
            return Err(Error::RankMismatch { expected: self.domain_rank, found: first.codomain_rank });
        }
        let images = first.images.iter().map(|w| self.apply(w)).collect::<Result<Vec<_>>>()?;
        Ok(GroupMap { domain_rank: first.domain_rank, codomain_rank: self.codomain_rank, images })
    }

    pub fn is_identity(&self) -> bool {
        *self == GroupMap::identity(self.domain_rank)
    }

    pub fn is_automorphism(&self) -> Result<bool> {
        self.check_square()?;
        Ok(NielsenReduction::run(&self.images)?.is_basis())
    }

    pub fn invert(&self) -> Result<GroupMap> {
        self.check_square()?;
        NielsenReduction::run(&self.images)?.inverse().ok_or(Error::NotAnAutomorphism)
    }

    /// Conjugation `x -> w x w^-1`.
    pub fn inner(w: &Word) -> GroupMap {
        let rank = w.rank;
        GroupMap { domain_rank: rank, codomain_rank: rank, images: (1..=rank).map(|k| Word::generator(rank, k).conjugate_by(w)).collect() }
    }

    fn check_square(&self) -> Result<()> {
        if self.domain_rank != self.codomain_rank {
            return Err(Error::RankMismatch { expected: self.domain_rank, found: self.codomain_rank });
        }
        Ok(())
    }
}

impl fmt::Display for GroupMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, w) in self.images.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{w}")?;
        }
        f.write_str(")")
    }
}

/// Serialized form of a word list: word literals plus the ambient rank.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordsDoc {
    pub rank: usize,
    pub words: Vec<String>,
}

impl WordsDoc {
    pub fn from_words(rank: usize, words: &[Word]) -> WordsDoc {
        WordsDoc { rank, words: words.iter().map(|w| w.to_string()).collect() }
    }

    pub fn to_words(&self) -> Result<Vec<Word>> {
        self.words.iter().map(|s| Word::parse(self.rank, s)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(rank: usize, l: &[i32]) -> Word {
        Word::reduce(rank, l).unwrap()
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(w(2, &[1, -1, 2]).letters(), &[2]);
        assert!(w(2, &[]).is_identity());
        assert!(w(2, &[1, 2, -2, -1]).is_identity());
        assert_eq!(Word::reduce(2, &[3]).unwrap_err(), Error::BadLetter { letter: 3, rank: 2 });
        assert!(Word::reduce(2, &[0]).is_err());
    }

    #[test]
    fn apply_examples() {
        let m = GroupMap::from_letters(2, &[&[1, 2], &[2]]).unwrap();
        assert_eq!(m.apply(&w(2, &[1, -2])).unwrap(), w(2, &[1]));
        let swap = GroupMap::from_letters(2, &[&[2], &[1]]).unwrap();
        assert_eq!(swap.apply(&w(2, &[1, 2])).unwrap(), w(2, &[2, 1]));
        let id = GroupMap::identity(3);
        assert_eq!(id.apply(&w(3, &[3, -1, 2])).unwrap(), w(3, &[3, -1, 2]));
        assert!(matches!(m.apply(&w(3, &[1])), Err(Error::RankMismatch { .. })));
    }

    #[test]
    fn parse_print_round_trip() {
        for s in ["1", "x1", "x1*x2^-1*x1", "x3^-1*x2^-1", "x10*x2"] {
            assert_eq!(Word::parse(10, s).unwrap().to_string(), s);
        }
        assert!(Word::parse(2, "x1**x2").is_err());
        assert!(Word::parse(2, "x1*x1^-1").is_err());
        assert!(Word::parse(2, "x01").is_err());
        assert!(matches!(Word::parse(2, "x3"), Err(Error::BadLetter { .. })));
    }

    #[test]
    fn cyclic_decomposition_recovers_word() {
        let u = w(2, &[1, 2, 1, 2, -1]);
        let (c, core) = u.cyclic_decomposition();
        assert_eq!(c.letters(), &[1]);
        assert_eq!(core.letters(), &[2, 1, 2]);
        assert_eq!(core.conjugate_by(&c), u);
    }

    #[test]
    fn automorphism_examples() {
        let swap = GroupMap::from_letters(2, &[&[2], &[1]]).unwrap();
        assert!(swap.is_automorphism().unwrap());
        assert_eq!(swap.invert().unwrap(), swap);
        let not = GroupMap::from_letters(2, &[&[1], &[1]]).unwrap();
        assert!(!not.is_automorphism().unwrap());
        assert_eq!(not.invert().unwrap_err(), Error::NotAnAutomorphism);
        let t = GroupMap::from_letters(2, &[&[1, 2], &[2]]).unwrap();
        assert!(t.is_automorphism().unwrap());
        assert_eq!(t.invert().unwrap(), GroupMap::from_letters(2, &[&[1, -2], &[2]]).unwrap());
        let wide = GroupMap::new(2, 3, vec![w(3, &[1]), w(3, &[2])]).unwrap();
        assert!(matches!(wide.is_automorphism(), Err(Error::RankMismatch { .. })));
    }

    #[test]
    fn squares_and_commutators_are_not_bases() {
        let m = GroupMap::from_letters(2, &[&[1, 1], &[2]]).unwrap();
        assert!(!m.is_automorphism().unwrap());
        let m = GroupMap::from_letters(2, &[&[1, 2, -1, -2], &[2]]).unwrap();
        assert!(!m.is_automorphism().unwrap());
    }
}
