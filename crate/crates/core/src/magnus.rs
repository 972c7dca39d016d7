//! The reduced Magnus algebra: integer polynomials in non-commuting
//! variables `X_1..X_n` in which every monomial with a repeated variable is
//! zero. The expansion `x_i ↦ 1 + X_i` sends F(n) into its units; since
//! `X_i² = 0`, `x_i⁻¹ ↦ 1 − X_i` exactly.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::braid::BraidWord;
use crate::error::{Error, Result};
use crate::free_word::FreeWord;
use crate::Sign;

/// A monomial `X_{i_1} … X_{i_k}` with distinct indices.
///
/// Ordered by degree first, then lexicographically, which is the order used
/// in reports and witnesses.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Monomial(Vec<usize>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    /// Fails if an index repeats or is zero.
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        let mut seen = 0u128;
        for &i in &indices {
            if i == 0 || i > 127 || seen & (1 << i) != 0 {
                return Err(Error::InvalidMultiIndex { indices });
            }
            seen |= 1 << i;
        }
        Ok(Monomial(indices))
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.contains(&i)
    }

    /// Concatenation, or `None` when the product has a repeated variable.
    fn concat(&self, other: &Monomial) -> Option<Monomial> {
        if self.0.iter().any(|i| other.0.contains(i)) {
            return None;
        }
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Some(Monomial(v))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for i in &self.0 {
            write!(f, "X{i}")?;
        }
        Ok(())
    }
}

/// Element of the reduced Magnus algebra on `rank` variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReducedPolynomial {
    rank: usize,
    terms: BTreeMap<Monomial, BigInt>,
}

impl ReducedPolynomial {
    pub fn zero(rank: usize) -> Self {
        ReducedPolynomial {
            rank,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(rank: usize) -> Self {
        let mut p = Self::zero(rank);
        p.terms.insert(Monomial::one(), BigInt::one());
        p
    }

    /// `1 + s·X_i`, the image of `x_i^s`.
    pub fn unit_for(rank: usize, i: usize, sign: Sign) -> Result<Self> {
        if i == 0 || i > rank {
            return Err(Error::IndexOutOfRange {
                index: i,
                max: rank,
            });
        }
        let mut p = Self::one(rank);
        p.terms
            .insert(Monomial(vec![i]), BigInt::from(sign.value()));
        Ok(p)
    }

    /// Builds a polynomial from `(indices, coefficient)` pairs, summing
    /// duplicates and dropping zeros.
    pub fn from_terms<I>(rank: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, BigInt)>,
    {
        let mut p = Self::zero(rank);
        for (idx, c) in terms {
            if let Some(&bad) = idx.iter().find(|&&i| i > rank) {
                return Err(Error::IndexOutOfRange {
                    index: bad,
                    max: rank,
                });
            }
            p.add_term(Monomial::new(idx)?, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Nonzero terms in (degree, lexicographic) order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&Monomial::one()).is_some_and(|c| c.is_one())
    }

    pub fn coefficient(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// Largest degree of a nonzero term; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn poly_mul(&self, other: &ReducedPolynomial) -> Result<ReducedPolynomial> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch {
                left: self.rank,
                right: other.rank,
            });
        }
        let mut out = Self::zero(self.rank);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some(m) = ma.concat(mb) {
                    out.add_term(m, ca * cb);
                }
            }
        }
        Ok(out)
    }

    /// Right multiplication by `1 + s·X_i`.
    fn mul_unit(&mut self, i: usize, sign: Sign) {
        let extra: Vec<(Monomial, BigInt)> = self
            .terms
            .iter()
            .filter(|(m, _)| !m.contains(i))
            .map(|(m, c)| {
                let mut idx = m.0.clone();
                idx.push(i);
                let c = match sign {
                    Sign::Pos => c.clone(),
                    Sign::Neg => -c,
                };
                (Monomial(idx), c)
            })
            .collect();
        for (m, c) in extra {
            self.add_term(m, c);
        }
    }

    /// The reduced Magnus expansion of a free word.
    pub fn expand(w: &FreeWord) -> ReducedPolynomial {
        let mut p = Self::one(w.rank());
        for l in w.letters() {
            p.mul_unit(l.gen, l.sign);
        }
        p
    }

    /// The part of `self` made of monomials ending in `X_i`, with that last
    /// factor removed.
    pub fn strip_trailing(&self, i: usize) -> ReducedPolynomial {
        let mut out = Self::zero(self.rank);
        for (m, c) in &self.terms {
            if m.0.last() == Some(&i) {
                out.add_term(Monomial(m.0[..m.0.len() - 1].to_vec()), c.clone());
            }
        }
        out
    }

    /// Drops every monomial that contains `X_i`.
    pub fn kill_index(&self, i: usize) -> ReducedPolynomial {
        ReducedPolynomial {
            rank: self.rank,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| !m.contains(i))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Coefficient of `X_{idx_1} … X_{idx_k}`.
    pub fn mu_coefficient(&self, idx: &[usize]) -> Result<BigInt> {
        let m = Monomial::new(idx.to_vec())?;
        Ok(self.coefficient(&m))
    }
}

impl fmt::Display for ReducedPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c < &BigInt::zero();
            let abs = if neg { -c } else { c.clone() };
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if m.degree() == 0 {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}{m}")?;
            }
        }
        Ok(())
    }
}

/// Reduced expansions `E(φ(x_j))` of every generator image under the Artin
/// action of `b`, without building the image words.
///
/// Letters are folded in from the last one: if `ψ` is the action of a suffix,
/// prepending a letter `ℓ` replaces `E(ψ(x_j))` by the expansion of
/// `φ_ℓ(x_j)` with `x_g^±` read as `E(ψ(x_g^±))`. Both signs are carried so
/// no series inversion is needed.
pub fn artin_expansions(b: &BraidWord) -> Vec<ReducedPolynomial> {
    let n = b.strands();
    let unit = |j: usize, sign: Sign| {
        let mut p = ReducedPolynomial::one(n);
        p.mul_unit(j, sign);
        p
    };
    let mut pos: Vec<ReducedPolynomial> = (1..=n).map(|j| unit(j, Sign::Pos)).collect();
    let mut neg: Vec<ReducedPolynomial> = (1..=n).map(|j| unit(j, Sign::Neg)).collect();
    for l in b.letters().iter().rev() {
        let eval = |w: &FreeWord| {
            w.letters()
                .iter()
                .map(|g| match g.sign {
                    Sign::Pos => &pos[g.gen - 1],
                    Sign::Neg => &neg[g.gen - 1],
                })
                .fold(ReducedPolynomial::one(n), |acc, f| {
                    acc.poly_mul(f).expect("same rank")
                })
        };
        let mut updates = Vec::with_capacity(2);
        for j in [l.pos, l.pos + 1] {
            let image = FreeWord::generator(n, j)
                .and_then(|g| g.artin_apply(l.pos, l.sign))
                .expect("letters of a braid word are in range");
            updates.push((j, eval(&image), eval(&image.invert())));
        }
        for (j, p, q) in updates {
            pos[j - 1] = p;
            neg[j - 1] = q;
        }
    }
    pos
}
