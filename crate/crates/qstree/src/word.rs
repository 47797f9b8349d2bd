//! A bi-infinite word read as a coloring of the 2-regular tree.
//!
//! `L_1` is empty and `L_{k+1} = L_k a L_k` for odd `k`, `L_k b L_k` for even `k`.
//! `X_k = a L a L b L a` for odd `k` and `b L a L b L b` for even `k`.
//! Radius-`n` balls are length-`(2n+1)` factors up to reversal.

use std::collections::BTreeSet;

use crate::census::BallCensus;
use crate::error::{Error, Result};
use crate::quotient::{ExpandedGraph, GraphBuilder, Origin};
use crate::recurrence::{default_cap, recurrence_rpp};

pub fn l_word(k: usize) -> String {
    assert!(k >= 1);
    let mut l = String::new();
    for j in 1..k {
        let mid = if j % 2 == 1 { 'a' } else { 'b' };
        l = format!("{l}{mid}{l}");
    }
    l
}

pub fn x_word(k: usize) -> String {
    let l = l_word(k);
    if k % 2 == 1 {
        format!("a{l}a{l}b{l}a")
    } else {
        format!("b{l}a{l}b{l}b")
    }
}

pub fn x_len(k: usize) -> usize {
    3 * (1 << (k - 1)) + 1
}

pub fn n_k(k: usize) -> usize {
    (1 << k) - 1
}

/// Distinct factors of length `len`.
pub fn factors(w: &str, len: usize) -> BTreeSet<&str> {
    if len > w.len() {
        return BTreeSet::new();
    }
    (0..=w.len() - len).map(|i| &w[i..i + len]).collect()
}

/// Factors up to reversal, each represented by the smaller of the two readings.
pub fn factors_mod_reversal(w: &str, len: usize) -> BTreeSet<String> {
    factors(w, len)
        .into_iter()
        .map(|f| {
            let r: String = f.chars().rev().collect();
            if r.as_str() < f { r } else { f.to_string() }
        })
        .collect()
}

/// Requires `F_len(X_k) = F_len(X_{k+1}) = F_len(X_{k+2})`.
pub fn check_stable(k: usize, len: usize) -> Result<()> {
    let (a, b, c) = (x_word(k), x_word(k + 1), x_word(k + 2));
    let fa = factors(&a, len);
    if fa.is_empty() || fa != factors(&b, len) || fa != factors(&c, len) {
        return Err(Error::Horizon(format!(
            "length-{len} factors of X_{k} have not stabilized; increase k_max"
        )));
    }
    Ok(())
}

/// The path carrying `w`; both ends are frontier vertices.
pub fn path_graph(w: &str) -> ExpandedGraph {
    let mut b = GraphBuilder::new(2, vec!["a".into(), "b".into()]);
    for (i, ch) in w.chars().enumerate() {
        b.add_vertex(u32::from(ch == 'b'), Origin::Word { position: i });
    }
    for i in 1..w.len() as u32 {
        b.add_edge(i - 1, i, 1, 1);
    }
    if !w.is_empty() {
        b.mark_incomplete(0);
        b.mark_incomplete(w.len() as u32 - 1);
    }
    b.finish()
}

/// Ball census of `X_{k_max}`, accepted only where factor sets have stabilized.
#[derive(Debug, Clone)]
pub struct WordFixture {
    pub k_max: usize,
    pub word: String,
    pub census: BallCensus,
}

pub fn word_fixture(k_max: usize, max_n: usize) -> Result<WordFixture> {
    if k_max < 3 {
        return Err(Error::Precondition("word fixture needs k_max >= 3".into()));
    }
    check_stable(k_max, 2 * max_n + 3)?;
    let word = x_word(k_max);
    let census = BallCensus::on_graph(path_graph(&word), max_n, word.len(), Vec::new(), true)?;
    Ok(WordFixture { k_max, word, census })
}

impl WordFixture {
    /// `R''(n)` by exhaustive search over windows, with the windows' factor set checked for stability.
    pub fn rpp(&self, n: usize) -> Result<usize> {
        let r = recurrence_rpp(&self.census, n, default_cap(&self.census, n))?;
        check_stable(self.k_max, 2 * r.value + 1)?;
        Ok(r.value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordLevel {
    pub k: usize,
    pub n_k: usize,
    pub x_len: usize,
    /// `b(n_k)`, factors of length `2 n_k + 1` up to reversal.
    pub b: usize,
    /// Factors of length `2 n_k + 1` without identifying reversals.
    pub raw: usize,
}

impl WordLevel {
    pub fn identity_holds(&self) -> bool {
        self.b == self.x_len
    }
}

/// `b(n_k)` against `|X_k|` for `1 <= k <= k_hi`.
pub fn word_levels(fx: &WordFixture, k_hi: usize) -> Result<Vec<WordLevel>> {
    (1..=k_hi)
        .map(|k| {
            let n = n_k(k);
            if n > fx.census.max_n {
                return Err(Error::Horizon(format!("word census stops before n_{k} = {n}")));
            }
            Ok(WordLevel {
                k,
                n_k: n,
                x_len: x_len(k),
                b: fx.census.b(n),
                raw: factors(&fx.word, 2 * n + 1).len(),
            })
        })
        .collect()
}

/// The block index `k` with `n_{k-1} < n <= n_k`.
pub fn block_of(n: usize) -> usize {
    (1..).find(|&k| n_k(k) >= n).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_words() {
        assert_eq!(x_word(1), "aaba");
        assert_eq!(x_word(2), "baaabab");
        assert_eq!(x_word(3).len(), 13);
        for k in 1..=6 {
            assert_eq!(l_word(k).len(), (1 << (k - 1)) - 1);
            assert_eq!(x_word(k).len(), x_len(k));
        }
    }

    #[test]
    fn three_letter_factors() {
        let x4 = x_word(4);
        let f: Vec<&str> = factors(&x4, 3).into_iter().collect();
        assert_eq!(f, ["aaa", "aab", "aba", "baa", "bab"]);
        assert_eq!(factors_mod_reversal(&x_word(4), 3).len(), 4);
    }

    #[test]
    fn census_counts_factors_up_to_reversal() {
        let fx = word_fixture(8, 6).unwrap();
        for n in 0..=6 {
            assert_eq!(fx.census.b(n), factors_mod_reversal(&fx.word, 2 * n + 1).len());
        }
    }

    #[test]
    fn blocks() {
        assert_eq!(block_of(1), 1);
        assert_eq!(block_of(2), 2);
        assert_eq!(block_of(3), 2);
        assert_eq!(block_of(4), 3);
    }
}
