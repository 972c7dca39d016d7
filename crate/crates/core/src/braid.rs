//! Braid words in the Artin generators.
//!
//! Text grammar: a header `n=<int>:` followed by whitespace-separated
//! letters `s<k>` / `s<k>^-1`, or band tokens `A<i>,<j>` / `A<i>,<j>^-1`
//! that expand to the pure-braid generator `A_{ij}` at parse time. A `#`
//! starts a comment that runs to the end of the line.
//!
//! Strand labels refer to positions at the bottom (`t = 0`). Words are read
//! left to right, the first letter being the lowest crossing.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Sign;

/// `σ_pos^sign`, exchanging the strands at positions `pos` and `pos + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BraidLetter {
    pub pos: usize,
    pub sign: Sign,
}

impl BraidLetter {
    pub fn new(pos: usize, sign: Sign) -> Self {
        BraidLetter { pos, sign }
    }

    pub fn inverse(self) -> Self {
        BraidLetter::new(self.pos, self.sign.flip())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BraidWord {
    strands: usize,
    letters: Vec<BraidLetter>,
}

/// A permutation of strand positions, stored 0-based: `image[p]` is the top
/// position of the strand that starts at bottom position `p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    /// 1-based image of the 1-based position `p`.
    pub fn apply(&self, p: usize) -> usize {
        self.0[p - 1] + 1
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn after(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&j| self.0[j]).collect())
    }
}

impl fmt::Display for Permutation {
    /// One-line notation, 1-based: `[2 1 3]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}", v + 1)?;
        }
        f.write_str("]")
    }
}

impl BraidWord {
    pub fn new(strands: usize, letters: Vec<BraidLetter>) -> Result<Self> {
        if strands == 0 {
            return Err(Error::InvalidGeometry(
                "a braid needs at least one strand".into(),
            ));
        }
        if let Some(l) = letters.iter().find(|l| l.pos == 0 || l.pos >= strands) {
            return Err(Error::IndexOutOfRange {
                index: l.pos,
                max: strands - 1,
            });
        }
        Ok(BraidWord { strands, letters })
    }

    pub fn identity(strands: usize) -> Result<Self> {
        Self::new(strands, Vec::new())
    }

    /// Builds a word from signed positions, e.g. `[1, -2, 1]` for `σ1 σ2⁻¹ σ1`.
    pub fn from_signed(strands: usize, signed: &[i64]) -> Result<Self> {
        let letters = signed
            .iter()
            .map(|&s| {
                BraidLetter::new(
                    s.unsigned_abs() as usize,
                    if s < 0 { Sign::Neg } else { Sign::Pos },
                )
            })
            .collect();
        Self::new(strands, letters)
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn letters(&self) -> &[BraidLetter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// The pure-braid generator `A_{ij} = (σ_{j−1}…σ_{i+1}) σ_i² (σ_{i+1}⁻¹…σ_{j−1}⁻¹)`.
    pub fn a_ij(n: usize, i: usize, j: usize) -> Result<Self> {
        if i == 0 || i >= j || j > n {
            return Err(Error::InvalidMultiIndex {
                indices: vec![i, j],
            });
        }
        let mut letters: Vec<BraidLetter> = (i + 1..j)
            .rev()
            .map(|k| BraidLetter::new(k, Sign::Pos))
            .collect();
        letters.push(BraidLetter::new(i, Sign::Pos));
        letters.push(BraidLetter::new(i, Sign::Pos));
        letters.extend((i + 1..j).map(|k| BraidLetter::new(k, Sign::Neg)));
        Self::new(n, letters)
    }

    fn check_strands(&self, other: &BraidWord) -> Result<()> {
        if self.strands != other.strands {
            return Err(Error::StrandMismatch {
                left: self.strands,
                right: other.strands,
            });
        }
        Ok(())
    }

    /// Concatenation: `self` below, `other` on top.
    pub fn compose(&self, other: &BraidWord) -> Result<BraidWord> {
        self.check_strands(other)?;
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Ok(BraidWord {
            strands: self.strands,
            letters,
        })
    }

    pub fn invert(&self) -> BraidWord {
        BraidWord {
            strands: self.strands,
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    pub fn power(&self, k: i64) -> BraidWord {
        let base = if k < 0 { self.invert() } else { self.clone() };
        let letters = std::iter::repeat_n(base.letters.iter().copied(), k.unsigned_abs() as usize)
            .flatten()
            .collect();
        BraidWord {
            strands: self.strands,
            letters,
        }
    }

    /// `a b a⁻¹ b⁻¹`.
    pub fn commutator(a: &BraidWord, b: &BraidWord) -> Result<BraidWord> {
        a.compose(b)?.compose(&a.invert())?.compose(&b.invert())
    }

    pub fn underlying_permutation(&self) -> Permutation {
        let mut at: Vec<usize> = (0..self.strands).collect();
        for l in &self.letters {
            at.swap(l.pos - 1, l.pos);
        }
        // at[top position] = bottom position; invert it.
        let mut image = vec![0; self.strands];
        for (top, &bottom) in at.iter().enumerate() {
            image[bottom] = top;
        }
        Permutation(image)
    }

    pub fn is_pure(&self) -> bool {
        self.underlying_permutation().is_identity()
    }

    pub fn require_pure(&self) -> Result<()> {
        let p = self.underlying_permutation();
        if p.is_identity() {
            Ok(())
        } else {
            Err(Error::NotPureBraid {
                permutation: p.to_string(),
            })
        }
    }

    /// Removes strand `i`, renumbering the others.
    pub fn delete_strand(&self, i: usize) -> Result<BraidWord> {
        self.require_pure()?;
        if i == 0 || i > self.strands {
            return Err(Error::IndexOutOfRange {
                index: i,
                max: self.strands,
            });
        }
        let mut at = i;
        let mut letters = Vec::with_capacity(self.letters.len());
        for l in &self.letters {
            if l.pos == at || l.pos + 1 == at {
                at = if l.pos == at { at + 1 } else { at - 1 };
            } else if l.pos + 1 < at {
                letters.push(*l);
            } else {
                letters.push(BraidLetter::new(l.pos - 1, l.sign));
            }
        }
        Ok(BraidWord {
            strands: self.strands - 1,
            letters,
        })
    }

    /// Half the signed number of crossings between strands `i` and `j`.
    pub fn crossing_linking(&self, i: usize, j: usize) -> Result<i64> {
        self.require_pure()?;
        let n = self.strands;
        for idx in [i, j] {
            if idx == 0 || idx > n {
                return Err(Error::IndexOutOfRange { index: idx, max: n });
            }
        }
        if i == j {
            return Err(Error::InvalidMultiIndex {
                indices: vec![i, j],
            });
        }
        let mut label: Vec<usize> = (1..=n).collect();
        let mut total = 0i64;
        for l in &self.letters {
            let (a, b) = (label[l.pos - 1], label[l.pos]);
            if (a == i && b == j) || (a == j && b == i) {
                total += l.sign.value();
            }
            label.swap(l.pos - 1, l.pos);
        }
        debug_assert!(total % 2 == 0);
        Ok(total / 2)
    }
}

fn syntax(position: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        position,
        message: message.into(),
    }
}

/// Parses a decimal integer starting at `pos`, returning the value and the
/// position after it.
fn parse_int(s: &str, pos: usize, base: usize) -> Result<(usize, usize)> {
    let digits = s[pos..].bytes().take_while(u8::is_ascii_digit).count();
    if digits == 0 {
        return Err(syntax(base + pos, "expected an integer"));
    }
    let v = s[pos..pos + digits]
        .parse()
        .map_err(|_| syntax(base + pos, "integer too large"))?;
    Ok((v, pos + digits))
}

/// Parses an optional `^-1` suffix.
fn parse_exponent(tok: &str, pos: usize, base: usize) -> Result<Sign> {
    match &tok[pos..] {
        "" => Ok(Sign::Pos),
        "^-1" => Ok(Sign::Neg),
        _ => Err(syntax(
            base + pos,
            format!("unexpected suffix {:?}", &tok[pos..]),
        )),
    }
}

fn parse_token(tok: &str, offset: usize, n: usize, out: &mut Vec<BraidLetter>) -> Result<()> {
    let out_of_range =
        |index: usize| syntax(offset, format!("position {index} out of range for n={n}"));
    match tok.as_bytes()[0] {
        b's' => {
            let (k, end) = parse_int(tok, 1, offset)?;
            let sign = parse_exponent(tok, end, offset)?;
            if k == 0 || k >= n {
                return Err(out_of_range(k));
            }
            out.push(BraidLetter::new(k, sign));
        }
        b'A' => {
            let (i, end) = parse_int(tok, 1, offset)?;
            if tok.as_bytes().get(end) != Some(&b',') {
                return Err(syntax(offset + end, "expected ','"));
            }
            let (j, end) = parse_int(tok, end + 1, offset)?;
            let sign = parse_exponent(tok, end, offset)?;
            if i == 0 || i >= j || j > n {
                return Err(out_of_range(if i == 0 { i } else { j }));
            }
            let band = BraidWord::a_ij(n, i, j)?;
            match sign {
                Sign::Pos => out.extend_from_slice(&band.letters),
                Sign::Neg => out.extend_from_slice(&band.invert().letters),
            }
        }
        _ => return Err(syntax(offset, format!("unexpected token {tok:?}"))),
    }
    Ok(())
}

impl FromStr for BraidWord {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        // Blank out comments while keeping byte offsets intact.
        let mut clean = String::with_capacity(text.len());
        let mut in_comment = false;
        for c in text.chars() {
            match c {
                '#' => in_comment = true,
                '\n' => in_comment = false,
                _ => {}
            }
            if in_comment {
                clean.extend(std::iter::repeat_n(' ', c.len_utf8()));
            } else {
                clean.push(c);
            }
        }
        let start = clean.len() - clean.trim_start().len();
        let rest = &clean[start..];
        if !rest.starts_with("n=") {
            return Err(syntax(start, "expected header 'n=<int>:'"));
        }
        let (n, end) = parse_int(rest, 2, start)?;
        if rest.as_bytes().get(end) != Some(&b':') {
            return Err(syntax(start + end, "expected ':' after strand count"));
        }
        if n == 0 {
            return Err(syntax(start + 2, "strand count must be positive"));
        }
        let body_start = start + end + 1;
        let body = &clean[body_start..];
        let mut letters = Vec::new();
        let mut cursor = 0;
        for tok in body.split_whitespace() {
            let rel = body[cursor..].find(tok).unwrap() + cursor;
            cursor = rel + tok.len();
            parse_token(tok, body_start + rel, n, &mut letters)?;
        }
        BraidWord::new(n, letters)
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={}:", self.strands)?;
        for l in &self.letters {
            match l.sign {
                Sign::Pos => write!(f, " s{}", l.pos)?,
                Sign::Neg => write!(f, " s{}^-1", l.pos)?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(text: &str) -> BraidWord {
        text.parse().unwrap()
    }

    /// Strand-tracking oracle: follow every strand through the word with a
    /// label array, keep only crossings between surviving strands, and
    /// renumber by rank among survivors.
    fn delete_oracle(w: &BraidWord, i: usize) -> BraidWord {
        let n = w.strands();
        let mut label: Vec<usize> = (1..=n).collect();
        let mut out = Vec::new();
        for l in w.letters() {
            let (a, c) = (label[l.pos - 1], label[l.pos]);
            if a != i && c != i {
                let left = label[..l.pos - 1].iter().filter(|&&x| x != i).count() + 1;
                out.push(BraidLetter::new(left, l.sign));
            }
            label.swap(l.pos - 1, l.pos);
        }
        BraidWord::new(n - 1, out).unwrap()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(
            b("n=3: s1 s2^-1 s1"),
            BraidWord::from_signed(3, &[1, -2, 1]).unwrap()
        );
        assert_eq!(b("n=2:"), BraidWord::identity(2).unwrap());
        assert!(matches!(
            "n=2: s5".parse::<BraidWord>(),
            Err(Error::Syntax { position: 5, .. })
        ));
    }

    #[test]
    fn parse_bands_and_comments() {
        assert_eq!(
            b("n=3: A1,3 # band\n"),
            BraidWord::from_signed(3, &[2, 1, 1, -2]).unwrap()
        );
        assert_eq!(
            b("n=3: A1,3^-1"),
            BraidWord::a_ij(3, 1, 3).unwrap().invert()
        );
        assert_eq!(b("# leading\nn=2: s1\ns1"), b("n=2: s1 s1"));
    }

    #[test]
    fn parse_errors_carry_positions() {
        let cases = [
            ("n=2 s1", 3),
            ("x=2:", 0),
            ("n=2: t1", 5),
            ("n=2: s1^2", 7),
            ("n=3: A2,1", 5),
            ("n=3: A1;2", 7),
            ("n=0:", 2),
        ];
        for (text, pos) in cases {
            match text.parse::<BraidWord>() {
                Err(Error::Syntax { position, .. }) => assert_eq!(position, pos, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn format_round_trip() {
        let w = b("n=4: A1,4 s3^-1 s2 s3");
        assert_eq!(w.to_string().parse::<BraidWord>().unwrap(), w);
        assert_eq!(BraidWord::identity(2).unwrap().to_string(), "n=2:");
    }

    #[test]
    fn permutations() {
        let s1 = b("n=2: s1");
        assert_eq!(s1.underlying_permutation().to_string(), "[2 1]");
        assert!(!s1.is_pure());
        assert!(b("n=2: s1 s1").is_pure());
        assert!(BraidWord::a_ij(3, 1, 3).unwrap().is_pure());
        // σ1 σ2: strand 1 ends at 3, strand 2 at 1, strand 3 at 2.
        let p = b("n=3: s1 s2").underlying_permutation();
        assert_eq!((p.apply(1), p.apply(2), p.apply(3)), (3, 1, 2));
    }

    #[test]
    fn band_generators() {
        assert_eq!(BraidWord::a_ij(2, 1, 2).unwrap(), b("n=2: s1 s1"));
        assert_eq!(BraidWord::a_ij(3, 1, 3).unwrap(), b("n=3: s2 s1 s1 s2^-1"));
        // Compose the transpositions of the band word by hand.
        let w = BraidWord::a_ij(4, 2, 4).unwrap();
        let mut perm = vec![1, 2, 3, 4];
        for l in w.letters() {
            perm.swap(l.pos - 1, l.pos);
        }
        assert_eq!(perm, vec![1, 2, 3, 4]);
        assert!(w.is_pure());
        assert!(BraidWord::a_ij(3, 2, 2).is_err());
        assert!(BraidWord::a_ij(3, 1, 4).is_err());
    }

    #[test]
    fn compose_and_invert() {
        let w = b("n=3: s1 s2");
        assert_eq!(w.compose(&BraidWord::identity(3).unwrap()).unwrap(), w);
        assert_eq!(w.invert(), b("n=3: s2^-1 s1^-1"));
        assert!(w.compose(&BraidWord::identity(2).unwrap()).is_err());
        let a = b("n=3: s1 s2");
        let c = b("n=3: s2");
        let ab = a.compose(&c).unwrap().underlying_permutation();
        assert_eq!(
            ab,
            c.underlying_permutation()
                .after(&a.underlying_permutation())
        );
    }

    #[test]
    fn delete_strand_examples() {
        let a12 = BraidWord::a_ij(3, 1, 2).unwrap();
        assert_eq!(delete_oracle(&a12, 3), b("n=2: s1 s1"));
        assert_eq!(a12.delete_strand(3).unwrap(), b("n=2: s1 s1"));
        assert_eq!(delete_oracle(&a12, 2), b("n=2:"));
        assert_eq!(a12.delete_strand(2).unwrap(), b("n=2:"));
        for i in 1..=4 {
            assert_eq!(
                BraidWord::identity(4).unwrap().delete_strand(i).unwrap(),
                BraidWord::identity(3).unwrap()
            );
        }
        assert!(matches!(
            b("n=2: s1").delete_strand(1),
            Err(Error::NotPureBraid { .. })
        ));
        assert!(a12.delete_strand(4).is_err());
    }

    #[test]
    fn delete_strand_matches_oracle_on_bands() {
        for n in 2..=5 {
            for i in 1..n {
                for j in i + 1..=n {
                    let w = BraidWord::a_ij(n, i, j)
                        .unwrap()
                        .compose(&b(&format!("n={n}: s1 s1")))
                        .unwrap();
                    for k in 1..=n {
                        assert_eq!(w.delete_strand(k).unwrap(), delete_oracle(&w, k));
                    }
                }
            }
        }
    }

    #[test]
    fn crossing_linking_examples() {
        let a12 = BraidWord::a_ij(2, 1, 2).unwrap();
        assert_eq!(a12.crossing_linking(1, 2).unwrap(), 1);
        assert_eq!(
            BraidWord::identity(3)
                .unwrap()
                .crossing_linking(1, 3)
                .unwrap(),
            0
        );
        assert_eq!(a12.invert().crossing_linking(1, 2).unwrap(), -1);
        assert!(a12.crossing_linking(1, 1).is_err());
        assert!(b("n=2: s1").crossing_linking(1, 2).is_err());
    }
}
