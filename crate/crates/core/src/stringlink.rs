//! Homotopy string links and their complete invariant.
//!
//! A string link is carried by a pure braid. Its invariant vector holds, for
//! each strand `i`, the reduced Magnus expansion of the longitude `λ_i`
//! (read off `β(x_i) = λ_i x_i λ_i⁻¹`) with every monomial containing `X_i`
//! removed. The coefficients are the Milnor invariants with distinct indices,
//! the longitude strand being the last index; two string links are
//! link-homotopic exactly when the vectors agree.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::braid::BraidWord;
use crate::error::{Error, Result};
use crate::free_word::{artin_image, FreeWord};
use crate::magnus::{artin_expansions, Monomial, ReducedPolynomial};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StringLink {
    rep: BraidWord,
}

/// Per-strand reduced longitude expansions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InvariantVector {
    n: usize,
    entries: Vec<ReducedPolynomial>,
}

/// First coefficient at which two invariant vectors differ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    /// Full Milnor multi-index; the last entry is the longitude strand.
    pub indices: Vec<usize>,
    pub left: BigInt,
    pub right: BigInt,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx: Vec<String> = self.indices.iter().map(|i| i.to_string()).collect();
        write!(f, "mu({}): {} != {}", idx.join(","), self.left, self.right)
    }
}

impl InvariantVector {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Entry for strand `i` (1-based).
    pub fn entry(&self, i: usize) -> &ReducedPolynomial {
        &self.entries[i - 1]
    }

    pub fn entries(&self) -> &[ReducedPolynomial] {
        &self.entries
    }

    pub fn is_trivial(&self) -> bool {
        self.entries.iter().all(ReducedPolynomial::is_one)
    }

    /// Every `(multi-index, coefficient)` with nonzero coefficient of positive
    /// degree, sorted by degree and then lexicographically on the full index.
    pub fn mu_table(&self) -> Vec<(Vec<usize>, BigInt)> {
        let mut out: Vec<(Vec<usize>, BigInt)> = self
            .entries
            .iter()
            .enumerate()
            .flat_map(|(k, p)| {
                p.terms()
                    .filter(|(m, _)| m.degree() > 0)
                    .map(move |(m, c)| {
                        let mut idx = m.indices().to_vec();
                        idx.push(k + 1);
                        (idx, c.clone())
                    })
            })
            .collect();
        out.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
        out
    }

    /// First difference in (degree, lexicographic) order of the full index.
    pub fn first_difference(&self, other: &InvariantVector) -> Option<Witness> {
        if self.n != other.n {
            return None;
        }
        let mut keys: Vec<Vec<usize>> = self
            .mu_table()
            .into_iter()
            .chain(other.mu_table())
            .map(|(k, _)| k)
            .collect();
        keys.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        keys.dedup();
        keys.into_iter().find_map(|idx| {
            let (last, head) = idx.split_last().unwrap();
            let m = Monomial::new(head.to_vec()).ok()?;
            let left = self.entry(*last).coefficient(&m);
            let right = other.entry(*last).coefficient(&m);
            (left != right).then(|| Witness {
                indices: idx.clone(),
                left,
                right,
            })
        })
    }
}

impl StringLink {
    pub fn new(rep: BraidWord) -> Result<Self> {
        rep.require_pure()?;
        Ok(StringLink { rep })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(BraidWord::identity(n)?)
    }

    /// The band generator `A_{ij}` as a string link.
    pub fn a_ij(n: usize, i: usize, j: usize) -> Result<Self> {
        Self::new(BraidWord::a_ij(n, i, j)?)
    }

    pub fn n(&self) -> usize {
        self.rep.strands()
    }

    pub fn rep(&self) -> &BraidWord {
        &self.rep
    }

    fn check_n(&self, other: &StringLink) -> Result<()> {
        if self.n() != other.n() {
            return Err(Error::StrandMismatch {
                left: self.n(),
                right: other.n(),
            });
        }
        Ok(())
    }

    /// The longitude `λ_i` of strand `i`.
    pub fn longitude(&self, i: usize) -> Result<FreeWord> {
        artin_image(&self.rep, i)?.extract_conjugator(i)
    }

    /// Entry `i` is `E(λ_i)` with every monomial containing `X_i` dropped.
    ///
    /// Computed from `E(λ_i x_i λ_i⁻¹) = E(λ_i) X_i E(λ_i)⁻¹`, whose terms
    /// ending in `X_i` are exactly the `X_i`-free part of `E(λ_i)` times
    /// `X_i`; this avoids the exponentially long longitude words.
    pub fn invariants(&self) -> Result<InvariantVector> {
        let entries = artin_expansions(&self.rep)
            .iter()
            .enumerate()
            .map(|(k, e)| e.strip_trailing(k + 1))
            .collect();
        Ok(InvariantVector {
            n: self.n(),
            entries,
        })
    }

    /// Invariants computed directly from the longitude words.
    pub fn invariants_from_longitudes(&self) -> Result<InvariantVector> {
        let entries = (1..=self.n())
            .map(|i| {
                let lambda = self.longitude(i)?;
                Ok(ReducedPolynomial::expand(&lambda).kill_index(i))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(InvariantVector {
            n: self.n(),
            entries,
        })
    }

    pub fn link_homotopy_equal(&self, other: &StringLink) -> Result<bool> {
        self.check_n(other)?;
        Ok(self.invariants()? == other.invariants()?)
    }

    pub fn stack(&self, other: &StringLink) -> Result<StringLink> {
        Ok(StringLink {
            rep: self.rep.compose(&other.rep)?,
        })
    }

    pub fn inverse(&self) -> StringLink {
        StringLink {
            rep: self.rep.invert(),
        }
    }

    pub fn power(&self, k: i64) -> StringLink {
        StringLink {
            rep: self.rep.power(k),
        }
    }

    /// `σ τ σ⁻¹ τ⁻¹`.
    pub fn commutator(&self, other: &StringLink) -> Result<StringLink> {
        self.stack(other)?
            .stack(&self.inverse())?
            .stack(&other.inverse())
    }

    /// Deletes strand `i`.
    pub fn delta_i(&self, i: usize) -> Result<StringLink> {
        Ok(StringLink {
            rep: self.rep.delete_strand(i)?,
        })
    }

    /// All `n` strand deletions.
    pub fn delta(&self) -> Result<Vec<StringLink>> {
        (1..=self.n()).map(|i| self.delta_i(i)).collect()
    }

    /// Trivial after deleting any one strand.
    pub fn is_borromean(&self) -> Result<bool> {
        if self.n() < 2 {
            return Ok(true);
        }
        for d in self.delta()? {
            if !d.invariants()?.is_trivial() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Coordinates on the Borromean kernel: the coefficients
    /// `μ(w_1 … w_{n−2}, n−1, n)` for `w` running over the permutations of
    /// `1..n−2` in lexicographic order, `(n−2)!` integers in all.
    pub fn borromean_coordinates(&self) -> Result<Vec<BigInt>> {
        if self.n() < 2 || !self.is_borromean()? {
            return Err(Error::NotBorromean);
        }
        let inv = self.invariants()?;
        Ok(borromean_basis(self.n())
            .into_iter()
            .map(|m| inv.entry(self.n()).coefficient(&m))
            .collect())
    }

    /// Milnor invariant `μ(i_1 … i_k, i)`: the coefficient of
    /// `X_{i_1} … X_{i_k}` in the reduced longitude expansion of strand `i`.
    pub fn mu(&self, idx: &[usize]) -> Result<BigInt> {
        let n = self.n();
        let invalid = || Error::InvalidMultiIndex {
            indices: idx.to_vec(),
        };
        let (&last, head) = idx.split_last().ok_or_else(invalid)?;
        if idx.iter().any(|&i| i == 0 || i > n) {
            return Err(invalid());
        }
        Monomial::new(idx.to_vec()).map_err(|_| invalid())?;
        self.invariants()?.entry(last).mu_coefficient(head)
    }

    /// Decides link-homotopy by induction on the number of strands: linking
    /// number for two strands; otherwise all strand deletions must agree and
    /// `σ τ⁻¹`, which is then Borromean, must have zero coordinates.
    pub fn link_homotopy_equal_inductive(&self, other: &StringLink) -> Result<bool> {
        self.check_n(other)?;
        match self.n() {
            1 => Ok(true),
            2 => Ok(self.rep.crossing_linking(1, 2)? == other.rep.crossing_linking(1, 2)?),
            n => {
                for i in 1..=n {
                    if !self
                        .delta_i(i)?
                        .link_homotopy_equal_inductive(&other.delta_i(i)?)?
                    {
                        return Ok(false);
                    }
                }
                let quotient = self.stack(&other.inverse())?;
                Ok(quotient
                    .borromean_coordinates()?
                    .iter()
                    .all(BigInt::is_zero))
            }
        }
    }
}

/// Monomials `X_{w_1} … X_{w_{n−2}} X_{n−1}` for all permutations `w` of `1..n−2`.
pub fn borromean_basis(n: usize) -> Vec<Monomial> {
    if n < 2 {
        return Vec::new();
    }
    permutations(n - 2)
        .into_iter()
        .map(|mut w| {
            w.push(n - 1);
            Monomial::new(w).expect("distinct indices")
        })
        .collect()
}

/// All permutations of `1..=k` in lexicographic order.
fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for idx in 0..rest.len() {
            let v = rest.remove(idx);
            prefix.push(v);
            rec(prefix, rest, out);
            prefix.pop();
            rest.insert(idx, v);
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut (1..=k).collect(), &mut out);
    out
}

impl FromStr for StringLink {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StringLink::new(s.parse()?)
    }
}

impl fmt::Display for StringLink {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.rep.fmt(f)
    }
}
