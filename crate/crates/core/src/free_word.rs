//! Words in the free group F(n) and the Artin action of braid generators.
//!
//! Braid words act left to right: the first letter of a braid word is the
//! first substitution applied to `x_i`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::braid::BraidWord;
use crate::error::{Error, Result};
use crate::Sign;

/// A generator `x_gen` or its inverse. Generators are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter {
    pub gen: usize,
    pub sign: Sign,
}

impl Letter {
    pub fn new(gen: usize, sign: Sign) -> Self {
        Letter { gen, sign }
    }

    pub fn pos(gen: usize) -> Self {
        Letter::new(gen, Sign::Pos)
    }

    pub fn neg(gen: usize) -> Self {
        Letter::new(gen, Sign::Neg)
    }

    pub fn inverse(self) -> Self {
        Letter::new(self.gen, self.sign.flip())
    }
}

/// A freely reduced word in F(rank).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FreeWord {
    rank: usize,
    letters: Vec<Letter>,
}

/// Appends `l` to a reduced stack, cancelling against the top letter.
fn push_reduced(stack: &mut Vec<Letter>, l: Letter) {
    if stack.last() == Some(&l.inverse()) {
        stack.pop();
    } else {
        stack.push(l);
    }
}

impl FreeWord {
    pub fn identity(rank: usize) -> Self {
        FreeWord {
            rank,
            letters: Vec::new(),
        }
    }

    /// The generator `x_i`.
    pub fn generator(rank: usize, i: usize) -> Result<Self> {
        Self::reduce([Letter::pos(i)], rank)
    }

    /// Freely reduces a raw letter sequence.
    pub fn reduce<I>(letters: I, rank: usize) -> Result<Self>
    where
        I: IntoIterator<Item = Letter>,
    {
        let mut stack = Vec::new();
        for l in letters {
            if l.gen == 0 || l.gen > rank {
                return Err(Error::MalformedWord { index: l.gen, rank });
            }
            push_reduced(&mut stack, l);
        }
        Ok(FreeWord {
            rank,
            letters: stack,
        })
    }

    /// Builds a word from signed generator indices, e.g. `[1, 2, -1, -2]`.
    pub fn from_signed(rank: usize, signed: &[i64]) -> Result<Self> {
        Self::reduce(
            signed.iter().map(|&s| {
                let gen = s.unsigned_abs() as usize;
                Letter::new(gen, if s < 0 { Sign::Neg } else { Sign::Pos })
            }),
            rank,
        )
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    fn check_rank(&self, other: &FreeWord) -> Result<()> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch {
                left: self.rank,
                right: other.rank,
            });
        }
        Ok(())
    }

    pub fn multiply(&self, other: &FreeWord) -> Result<FreeWord> {
        self.check_rank(other)?;
        let mut stack = self.letters.clone();
        for &l in &other.letters {
            push_reduced(&mut stack, l);
        }
        Ok(FreeWord {
            rank: self.rank,
            letters: stack,
        })
    }

    pub fn invert(&self) -> FreeWord {
        FreeWord {
            rank: self.rank,
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// Exponent sum of `x_gen`.
    pub fn exponent_sum(&self, gen: usize) -> i64 {
        self.letters
            .iter()
            .filter(|l| l.gen == gen)
            .map(|l| l.sign.value())
            .sum()
    }

    /// Applies the automorphism induced by `σ_k^sign`:
    /// `σ_k: x_k ↦ x_k x_{k+1} x_k⁻¹, x_{k+1} ↦ x_k`, and the inverse
    /// substitution `x_k ↦ x_{k+1}, x_{k+1} ↦ x_{k+1}⁻¹ x_k x_{k+1}` for `σ_k⁻¹`.
    pub fn artin_apply(&self, k: usize, sign: Sign) -> Result<FreeWord> {
        if k == 0 || k >= self.rank {
            return Err(Error::IndexOutOfRange {
                index: k,
                max: self.rank.saturating_sub(1),
            });
        }
        let image = |gen: usize| -> Vec<Letter> {
            match (sign, gen) {
                (Sign::Pos, g) if g == k => {
                    vec![Letter::pos(k), Letter::pos(k + 1), Letter::neg(k)]
                }
                (Sign::Pos, g) if g == k + 1 => vec![Letter::pos(k)],
                (Sign::Neg, g) if g == k => vec![Letter::pos(k + 1)],
                (Sign::Neg, g) if g == k + 1 => {
                    vec![Letter::neg(k + 1), Letter::pos(k), Letter::pos(k + 1)]
                }
                (_, g) => vec![Letter::pos(g)],
            }
        };
        let mut stack = Vec::with_capacity(self.letters.len() + 2);
        for l in &self.letters {
            let img = image(l.gen);
            match l.sign {
                Sign::Pos => img.into_iter().for_each(|x| push_reduced(&mut stack, x)),
                Sign::Neg => img
                    .into_iter()
                    .rev()
                    .for_each(|x| push_reduced(&mut stack, x.inverse())),
            }
        }
        Ok(FreeWord {
            rank: self.rank,
            letters: stack,
        })
    }

    /// Returns `λ` with `self = λ x_i λ⁻¹` letter for letter.
    pub fn extract_conjugator(&self, i: usize) -> Result<FreeWord> {
        let len = self.letters.len();
        let err = Error::NotConjugate { index: i };
        if len.is_multiple_of(2) || self.letters[len / 2] != Letter::pos(i) {
            return Err(err);
        }
        let half = len / 2;
        let prefix = &self.letters[..half];
        let suffix = &self.letters[half + 1..];
        let mirrors = prefix
            .iter()
            .zip(suffix.iter().rev())
            .all(|(p, s)| *s == p.inverse());
        if !mirrors {
            return Err(err);
        }
        Ok(FreeWord {
            rank: self.rank,
            letters: prefix.to_vec(),
        })
    }
}

/// `β(x_i)` for the braid word `b`, reading `b` left to right.
pub fn artin_image(b: &BraidWord, i: usize) -> Result<FreeWord> {
    let n = b.strands();
    if i == 0 || i > n {
        return Err(Error::IndexOutOfRange { index: i, max: n });
    }
    b.letters()
        .iter()
        .try_fold(FreeWord::generator(n, i)?, |w, l| {
            w.artin_apply(l.pos, l.sign)
        })
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        for (k, l) in self.letters.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            match l.sign {
                Sign::Pos => write!(f, "x{}", l.gen)?,
                Sign::Neg => write!(f, "x{}^-1", l.gen)?,
            }
        }
        Ok(())
    }
}
