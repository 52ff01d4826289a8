//! Free-group words: parsing, reduction, exponent vectors.
//!
//! Two text syntaxes.  Single-letter: `x`, `y`, `z` are generators 1, 2,
//! 3 and `a..w` continue as 4..26; uppercase is the inverse (`xyX` =
//! x y x^-1).  Numbered: `x3` / `X3` for generator 3 and its inverse,
//! usable for any rank.  A word text uses one syntax or the other,
//! never both.
//!
//! Words are always stored freely reduced; construction reduces.

use crate::{Error, Modulus, Result};
use std::fmt;

/// One letter of a word: a generator (1-based) or its inverse.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Letter {
    gen: u32,
    positive: bool,
}

impl Letter {
    pub fn new(gen: u32, positive: bool) -> Self {
        debug_assert!(gen >= 1);
        Letter { gen, positive }
    }

    /// 1-based generator index.
    pub fn gen(self) -> u32 {
        self.gen
    }

    pub fn is_positive(self) -> bool {
        self.positive
    }

    /// +1 or -1.
    pub fn sign(self) -> i64 {
        if self.positive {
            1
        } else {
            -1
        }
    }

    pub fn inverse(self) -> Self {
        Letter {
            gen: self.gen,
            positive: !self.positive,
        }
    }
}

/// A freely reduced word in `F_r` together with its ambient rank `r`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Word {
    letters: Vec<Letter>,
    rank: u32,
}

impl Word {
    /// The empty word (identity) in `F_rank`.
    pub fn empty(rank: u32) -> Result<Self> {
        if rank == 0 {
            return Err(Error::ZeroRank);
        }
        Ok(Word {
            letters: Vec::new(),
            rank,
        })
    }

    /// Build from raw letters, validating indices and freely reducing.
    pub fn from_letters(letters: impl IntoIterator<Item = Letter>, rank: u32) -> Result<Self> {
        if rank == 0 {
            return Err(Error::ZeroRank);
        }
        let mut reduced: Vec<Letter> = Vec::new();
        for l in letters {
            if l.gen() == 0 || l.gen() > rank {
                return Err(Error::GeneratorOutOfRange {
                    index: l.gen(),
                    rank,
                });
            }
            push_reduced(&mut reduced, l);
        }
        Ok(Word {
            letters: reduced,
            rank,
        })
    }

    /// Parse either syntax.  With `rank: None` the ambient rank defaults to
    /// the largest generator index that occurs (1 for the empty word).
    pub fn parse(text: &str, rank: Option<u32>) -> Result<Self> {
        let letters = if text.chars().any(|c| c.is_ascii_digit()) {
            parse_numbered(text)?
        } else {
            parse_single_letter(text)?
        };
        let max_gen = letters.iter().map(|l| l.gen()).max().unwrap_or(0);
        let rank = match rank {
            Some(r) => {
                if r == 0 {
                    return Err(Error::ZeroRank);
                }
                if max_gen > r {
                    return Err(Error::GeneratorOutOfRange {
                        index: max_gen,
                        rank: r,
                    });
                }
                r
            }
            None => max_gen.max(1),
        };
        Word::from_letters(letters, rank)
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn ambient_rank(&self) -> u32 {
        self.rank
    }

    /// Same letters reinterpreted in a larger ambient rank.
    pub fn with_rank(&self, rank: u32) -> Result<Self> {
        Word::from_letters(self.letters.iter().copied(), rank)
    }

    pub fn inverse(&self) -> Self {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
            rank: self.rank,
        }
    }

    /// Free product followed by reduction.
    pub fn concat(&self, other: &Word) -> Result<Self> {
        let rank = self.rank.max(other.rank);
        Word::from_letters(
            self.letters.iter().chain(other.letters.iter()).copied(),
            rank,
        )
    }

    /// `u * self * u^-1`.
    pub fn conjugate_by(&self, u: &Word) -> Result<Self> {
        u.concat(self)?.concat(&u.inverse())
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(&a), Some(&z)) => self.len() < 2 || a != z.inverse(),
            _ => true,
        }
    }

    /// Split off the conjugating prefix: returns `(w', u)` with `w'`
    /// cyclically reduced and `self = u w' u^-1` exactly.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let mut core = self.letters.clone();
        let mut conj = Vec::new();
        while core.len() >= 2 && core[0] == core[core.len() - 1].inverse() {
            conj.push(core[0]);
            core.pop();
            core.remove(0);
        }
        (
            Word {
                letters: core,
                rank: self.rank,
            },
            Word {
                letters: conj,
                rank: self.rank,
            },
        )
    }

    /// Image under abelianization: signed letter count per generator,
    /// indexed 0..rank.
    pub fn exponent_vector(&self) -> Vec<i64> {
        let mut v = vec![0i64; self.rank as usize];
        for l in &self.letters {
            v[(l.gen() - 1) as usize] += l.sign();
        }
        v
    }

    /// Membership of the word's image in `K_m(F_r)`: every exponent is
    /// killed by the modulus (no condition for m = 1, zero for m = inf).
    pub fn ambient_km_member(&self, m: Modulus) -> bool {
        self.exponent_vector().iter().all(|&c| m.annihilates(c))
    }

    /// Largest generator index that occurs (0 for the empty word).
    pub fn max_generator(&self) -> u32 {
        self.letters.iter().map(|l| l.gen()).max().unwrap_or(0)
    }
}

impl fmt::Display for Word {
    /// Canonical serialization: single-letter form when the ambient rank
    /// allows it, numbered form otherwise.  `parse` round-trips either.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rank <= 26 {
            for l in &self.letters {
                let ch = index_letter(l.gen());
                let ch = if l.is_positive() {
                    ch
                } else {
                    ch.to_ascii_uppercase()
                };
                write!(f, "{ch}")?;
            }
        } else {
            for l in &self.letters {
                let x = if l.is_positive() { 'x' } else { 'X' };
                write!(f, "{}{}", x, l.gen())?;
            }
        }
        Ok(())
    }
}

fn push_reduced(out: &mut Vec<Letter>, l: Letter) {
    if out.last() == Some(&l.inverse()) {
        out.pop();
    } else {
        out.push(l);
    }
}

/// Generator index of a lowercase letter: x, y, z are 1, 2, 3; a..w
/// continue as 4..26.
fn letter_index(lower: char) -> u32 {
    match lower {
        'x'..='z' => lower as u32 - 'x' as u32 + 1,
        _ => lower as u32 - 'a' as u32 + 4,
    }
}

fn index_letter(gen: u32) -> char {
    debug_assert!((1..=26).contains(&gen));
    if gen <= 3 {
        (b'x' + (gen - 1) as u8) as char
    } else {
        (b'a' + (gen - 4) as u8) as char
    }
}

fn parse_single_letter(text: &str) -> Result<Vec<Letter>> {
    let mut letters = Vec::new();
    for (at, ch) in text.char_indices() {
        if ch.is_whitespace() {
            continue;
        }
        match ch {
            'a'..='z' => letters.push(Letter::new(letter_index(ch), true)),
            'A'..='Z' => letters.push(Letter::new(
                letter_index(ch.to_ascii_lowercase()),
                false,
            )),
            _ => return Err(Error::UnknownToken { ch, at }),
        }
    }
    Ok(letters)
}

fn parse_numbered(text: &str) -> Result<Vec<Letter>> {
    let mut letters = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (at, ch) = chars[i];
        if ch.is_whitespace() {
            i += 1;
            continue;
        }
        let positive = match ch {
            'x' => true,
            'X' => false,
            'a'..='z' | 'A'..='Z' => return Err(Error::MixedSyntax),
            _ => return Err(Error::UnknownToken { ch, at }),
        };
        i += 1;
        let start = i;
        while i < chars.len() && chars[i].1.is_ascii_digit() {
            i += 1;
        }
        if start == i {
            return Err(Error::MalformedNumbered {
                at,
                why: "generator letter not followed by an index".into(),
            });
        }
        let digits: String = chars[start..i].iter().map(|&(_, c)| c).collect();
        let index: u32 = digits.parse().map_err(|_| Error::MalformedNumbered {
            at,
            why: format!("index {digits:?} out of range"),
        })?;
        if index == 0 {
            return Err(Error::MalformedNumbered {
                at,
                why: "generator indices start at 1".into(),
            });
        }
        letters.push(Letter::new(index, positive));
    }
    Ok(letters)
}
