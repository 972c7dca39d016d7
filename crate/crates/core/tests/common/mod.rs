#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use slink::braid::BraidWord;
use slink::stringlink::StringLink;

/// Signed positions of a braid word, e.g. `[1, -2]` for `σ1 σ2⁻¹`.
pub fn signed(w: &BraidWord) -> Vec<i64> {
    w.letters()
        .iter()
        .map(|l| l.pos as i64 * l.sign.value())
        .collect()
}

pub fn word(n: usize, s: &[i64]) -> BraidWord {
    BraidWord::from_signed(n, s).unwrap()
}

pub fn link(n: usize, s: &[i64]) -> StringLink {
    StringLink::new(word(n, s)).unwrap()
}

/// A random pure braid on `n` strands with at most `max_len` letters.
///
/// Half the time a uniformly random word is drawn until it is pure, so full
/// twists and other non-generator shapes appear; otherwise a product of
/// random `A_ij^±` is built up to the length budget.
pub fn random_pure<R: Rng>(rng: &mut R, n: usize, max_len: usize) -> StringLink {
    if n < 2 {
        return StringLink::identity(n).unwrap();
    }
    if rng.gen_bool(0.5) {
        loop {
            let len = rng.gen_range(0..=max_len);
            let s: Vec<i64> = (0..len).map(|_| random_letter(rng, n)).collect();
            let w = word(n, &s);
            if w.is_pure() {
                return StringLink::new(w).unwrap();
            }
        }
    }
    let mut s: Vec<i64> = Vec::new();
    for _ in 0..8 {
        let i = rng.gen_range(1..n);
        let j = rng.gen_range(i + 1..=n);
        let mut g = BraidWord::a_ij(n, i, j).unwrap();
        if rng.gen_bool(0.5) {
            g = g.invert();
        }
        if s.len() + g.len() > max_len {
            break;
        }
        s.extend(signed(&g));
    }
    link(n, &s)
}

pub fn random_letter<R: Rng>(rng: &mut R, n: usize) -> i64 {
    let k = rng.gen_range(1..n) as i64;
    if rng.gen_bool(0.5) {
        k
    } else {
        -k
    }
}

/// Applies one randomized move that preserves the braid: inserting or
/// removing a canceling pair, a braid relation `σi σi+1 σi ↔ σi+1 σi σi+1`
/// (either sign), or commuting far-apart letters.
pub fn random_rewrite<R: Rng>(rng: &mut R, n: usize, w: &mut Vec<i64>) {
    let mut moves = vec![0u8, 1, 2, 3];
    moves.shuffle(rng);
    for m in moves {
        match m {
            0 if w.len() < 40 && n >= 2 => {
                let at = rng.gen_range(0..=w.len());
                let g = random_letter(rng, n);
                w.splice(at..at, [g, -g]);
                return;
            }
            1 => {
                let sites: Vec<usize> = (0..w.len().saturating_sub(1))
                    .filter(|&k| w[k] == -w[k + 1])
                    .collect();
                if let Some(&k) = sites.choose(rng) {
                    w.drain(k..k + 2);
                    return;
                }
            }
            2 => {
                let sites: Vec<usize> = (0..w.len().saturating_sub(2))
                    .filter(|&k| {
                        let (a, b, c) = (w[k], w[k + 1], w[k + 2]);
                        a == c && a.signum() == b.signum() && (a.abs() - b.abs()).abs() == 1
                    })
                    .collect();
                if let Some(&k) = sites.choose(rng) {
                    let (a, b) = (w[k], w[k + 1]);
                    w[k..k + 3].copy_from_slice(&[b, a, b]);
                    return;
                }
            }
            3 => {
                let sites: Vec<usize> = (0..w.len().saturating_sub(1))
                    .filter(|&k| (w[k].abs() - w[k + 1].abs()).abs() >= 2)
                    .collect();
                if let Some(&k) = sites.choose(rng) {
                    w.swap(k, k + 1);
                    return;
                }
            }
            _ => {}
        }
    }
}

/// `[a, b] = a b a⁻¹ b⁻¹` as string links.
pub fn commutator(a: &StringLink, b: &StringLink) -> StringLink {
    a.commutator(b).unwrap()
}
