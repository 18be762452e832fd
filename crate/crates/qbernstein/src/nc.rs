//! Non-crossing set partitions: enumeration, refinement order, Möbius function.
//!
//! Partitions of `{0, .., n-1}` are stored as one block label per element,
//! with labels assigned in order of first occurrence. That form is canonical,
//! so structural equality of [`SetPartition`] values is equality of partitions.

use crate::coeff::{rat_int, Rat};
use num::Zero;
use once_cell::sync::Lazy;
use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

/// Largest ground-set size accepted by [`enumerate_nc`].
pub const ENUMERATE_LIMIT: usize = 14;
/// Largest ground-set size accepted by [`mobius_to_top`].
pub const MOBIUS_LIMIT: usize = 10;

/// Errors from partition construction and lattice operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NcError {
    #[error("partitions live on different ground sets ({0} vs {1})")]
    SizeMismatch(usize, usize),
    #[error("invalid blocks: {0}")]
    InvalidBlocks(String),
    #[error("ground-set size {n} exceeds the supported limit {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("partition {0} is crossing")]
    Crossing(String),
}

/// A set partition of `{0, .., n-1}` in canonical label form.
///
/// ```
/// use qbernstein::nc::SetPartition;
///
/// let p = SetPartition::from_blocks(4, &[vec![0, 3], vec![1, 2]]).unwrap();
/// assert_eq!(p.num_blocks(), 2);
/// assert!(p.is_noncrossing());
/// assert_eq!(p.to_string(), "{1,4}{2,3}");
/// ```
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SetPartition {
    labels: Vec<u8>,
}

impl SetPartition {
    /// The partition of `{0, .., n-1}` into singletons.
    pub fn discrete(n: usize) -> SetPartition {
        SetPartition {
            labels: (0..n).map(|i| i as u8).collect(),
        }
    }

    /// The partition of `{0, .., n-1}` with a single block.
    pub fn full(n: usize) -> SetPartition {
        SetPartition {
            labels: vec![0; n],
        }
    }

    /// Builds a partition from its blocks, which must cover `0..n` exactly.
    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<SetPartition, NcError> {
        let mut raw = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(NcError::InvalidBlocks("empty block".into()));
            }
            for &i in block {
                if i >= n {
                    return Err(NcError::InvalidBlocks(format!(
                        "element {i} outside 0..{n}"
                    )));
                }
                if raw[i] != usize::MAX {
                    return Err(NcError::InvalidBlocks(format!("element {i} repeated")));
                }
                raw[i] = b;
            }
        }
        if raw.iter().any(|&b| b == usize::MAX) {
            return Err(NcError::InvalidBlocks("blocks do not cover 0..n".into()));
        }
        Ok(SetPartition::from_raw_labels(&raw))
    }

    /// Builds a partition from an arbitrary label vector, canonicalizing it.
    pub fn from_raw_labels<T: Copy + Eq>(raw: &[T]) -> SetPartition {
        let mut labels = Vec::with_capacity(raw.len());
        let mut seen: Vec<T> = Vec::new();
        for &r in raw {
            let l = match seen.iter().position(|&s| s == r) {
                Some(k) => k,
                None => {
                    seen.push(r);
                    seen.len() - 1
                }
            };
            labels.push(l as u8);
        }
        SetPartition { labels }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.labels.iter().map(|&l| l as usize + 1).max().unwrap_or(0)
    }

    /// Block label of element `i`; labels are `0..num_blocks()` in order of
    /// first occurrence.
    pub fn label(&self, i: usize) -> usize {
        self.labels[i] as usize
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    /// Blocks in increasing order of their least element, each sorted.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.num_blocks()];
        for (i, &l) in self.labels.iter().enumerate() {
            blocks[l as usize].push(i);
        }
        blocks
    }

    /// Whether no two blocks interleave as `a < b < c < d` with `a, c` in one
    /// block and `b, d` in another.
    pub fn is_noncrossing(&self) -> bool {
        let n = self.n();
        let mut last = vec![0usize; self.num_blocks()];
        for (i, &l) in self.labels.iter().enumerate() {
            last[l as usize] = i;
        }
        let mut open: Vec<u8> = Vec::new();
        let mut seen = vec![false; self.num_blocks()];
        for i in 0..n {
            let l = self.labels[i];
            if !seen[l as usize] {
                seen[l as usize] = true;
                open.push(l);
            } else if open.last() != Some(&l) {
                return false;
            }
            if last[l as usize] == i {
                open.pop();
            }
        }
        true
    }

    /// Whether `self` refines `coarser`, i.e. every block of `self` is
    /// contained in a block of `coarser`. Errors if the ground sets differ.
    pub fn refines(&self, coarser: &SetPartition) -> Result<bool, NcError> {
        if self.n() != coarser.n() {
            return Err(NcError::SizeMismatch(self.n(), coarser.n()));
        }
        let mut image: Vec<Option<u8>> = vec![None; self.num_blocks()];
        for i in 0..self.n() {
            let slot = &mut image[self.labels[i] as usize];
            match *slot {
                None => *slot = Some(coarser.labels[i]),
                Some(l) if l == coarser.labels[i] => {}
                Some(_) => return Ok(false),
            }
        }
        Ok(true)
    }
}

impl fmt::Display for SetPartition {
    /// One-based blocks, e.g. `{1,4}{2,3}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for block in self.blocks() {
            f.write_str("{")?;
            for (k, i) in block.iter().enumerate() {
                if k > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", i + 1)?;
            }
            f.write_str("}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SetPartition({})", self)
    }
}

/// The partition grouping equal letters of `word` together.
///
/// ```
/// use qbernstein::nc::{kernel_partition, SetPartition};
///
/// let ker = kernel_partition(&[7, 2, 7, 5]);
/// assert_eq!(ker, SetPartition::from_blocks(4, &[vec![0, 2], vec![1], vec![3]]).unwrap());
/// ```
pub fn kernel_partition<T: PartialEq>(word: &[T]) -> SetPartition {
    let mut labels: Vec<u8> = Vec::with_capacity(word.len());
    for i in 0..word.len() {
        let l = match (0..i).find(|&j| word[j] == word[i]) {
            Some(j) => labels[j],
            None => labels.iter().copied().max().map_or(0, |m| m + 1),
        };
        labels.push(l);
    }
    SetPartition { labels }
}

/// All non-crossing partitions of `{0, .., n-1}`, in lexicographic label
/// order. Sizes above [`ENUMERATE_LIMIT`] are rejected.
///
/// ```
/// use qbernstein::nc::enumerate_nc;
///
/// assert_eq!(enumerate_nc(4).unwrap().len(), 14);
/// ```
pub fn enumerate_nc(n: usize) -> Result<Vec<SetPartition>, NcError> {
    if n > ENUMERATE_LIMIT {
        return Err(NcError::TooLarge {
            n,
            limit: ENUMERATE_LIMIT,
        });
    }
    // An element either continues some open block, closing every block nested
    // inside it, or opens a new one. Open blocks form a stack, so exploring
    // stack entries bottom-up and the fresh label last yields lexicographic
    // order on label vectors.
    fn rec(
        n: usize,
        labels: &mut Vec<u8>,
        open: &mut Vec<u8>,
        next: u8,
        out: &mut Vec<SetPartition>,
    ) {
        if labels.len() == n {
            out.push(SetPartition {
                labels: labels.clone(),
            });
            return;
        }
        for k in 0..open.len() {
            let saved = open.split_off(k + 1);
            labels.push(open[k]);
            rec(n, labels, open, next, out);
            labels.pop();
            open.extend(saved);
        }
        open.push(next);
        labels.push(next);
        rec(n, labels, open, next + 1, out);
        labels.pop();
        open.pop();
    }
    let mut out = Vec::new();
    rec(n, &mut Vec::with_capacity(n), &mut Vec::new(), 0, &mut out);
    Ok(out)
}

/// All set partitions of `{0, .., n-1}` (crossing ones included), via
/// restricted growth strings.
pub fn enumerate_all_partitions(n: usize) -> Vec<SetPartition> {
    let mut out = Vec::new();
    let mut labels: Vec<u8> = Vec::with_capacity(n);
    fn rec(n: usize, labels: &mut Vec<u8>, out: &mut Vec<SetPartition>) {
        if labels.len() == n {
            out.push(SetPartition {
                labels: labels.clone(),
            });
            return;
        }
        let bound = labels.iter().copied().max().map_or(0, |m| m + 1);
        for l in 0..=bound {
            labels.push(l);
            rec(n, labels, out);
            labels.pop();
        }
    }
    rec(n, &mut labels, &mut out);
    out
}

/// The non-crossing partitions strictly coarser than `p`.
fn proper_noncrossing_coarsenings(p: &SetPartition) -> Vec<SetPartition> {
    let k = p.num_blocks();
    let mut out = Vec::new();
    for grouping in enumerate_all_partitions(k) {
        if grouping.num_blocks() == k {
            continue;
        }
        let raw: Vec<u8> = p.labels.iter().map(|&l| grouping.labels[l as usize]).collect();
        let sigma = SetPartition::from_raw_labels(&raw);
        if sigma.is_noncrossing() {
            out.push(sigma);
        }
    }
    out
}

/// Möbius function `mu(p, top)` of the non-crossing partition lattice,
/// computed from its defining relation: the sum of `mu(sigma, top)` over all
/// non-crossing `sigma >= p` is 1 when `p` is the one-block partition and 0
/// otherwise. Values are memoized process-wide.
///
/// ```
/// use qbernstein::nc::{mobius_to_top, SetPartition};
/// use qbernstein::coeff::rat_int;
///
/// let bottom = SetPartition::discrete(4);
/// assert_eq!(mobius_to_top(&bottom).unwrap(), rat_int(-5));
/// ```
pub fn mobius_to_top(p: &SetPartition) -> Result<Rat, NcError> {
    if p.n() > MOBIUS_LIMIT {
        return Err(NcError::TooLarge {
            n: p.n(),
            limit: MOBIUS_LIMIT,
        });
    }
    if !p.is_noncrossing() {
        return Err(NcError::Crossing(p.to_string()));
    }
    static CACHE: Lazy<Mutex<HashMap<Vec<u8>, Rat>>> = Lazy::new(|| Mutex::new(HashMap::new()));
    fn go(p: &SetPartition, cache: &mut HashMap<Vec<u8>, Rat>) -> Rat {
        if let Some(v) = cache.get(p.labels()) {
            return v.clone();
        }
        let mut value = if p.num_blocks() <= 1 {
            rat_int(1)
        } else {
            Rat::zero()
        };
        for sigma in proper_noncrossing_coarsenings(p) {
            value -= go(&sigma, cache);
        }
        cache.insert(p.labels.clone(), value.clone());
        value
    }
    let mut cache = CACHE.lock().expect("mobius cache poisoned");
    Ok(go(p, &mut cache))
}

/// Catalan numbers `1, 1, 2, 5, 14, ..` by the convolution recurrence.
pub fn catalan(n: usize) -> u64 {
    assert!(n <= 33, "catalan(n) exceeds u64 range");
    let mut c = vec![0u64; n + 1];
    c[0] = 1;
    for m in 1..=n {
        c[m] = (0..m).map(|i| c[i] * c[m - 1 - i]).sum();
    }
    c[n]
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::One;
    use std::collections::BTreeSet;

    /// Quadruple-scan crossing test, independent of the stack scan.
    fn is_noncrossing_brute(p: &SetPartition) -> bool {
        let n = p.n();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    for d in c + 1..n {
                        if p.label(a) == p.label(c)
                            && p.label(b) == p.label(d)
                            && p.label(a) != p.label(b)
                        {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    #[test]
    fn catalan_known_values() {
        let expected = [1u64, 1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796];
        for (n, &c) in expected.iter().enumerate() {
            assert_eq!(catalan(n), c);
        }
        assert_eq!(catalan(14), 2_674_440);
    }

    #[test]
    fn enumerate_counts_match_catalan() {
        for n in 0..=10 {
            assert_eq!(enumerate_nc(n).unwrap().len() as u64, catalan(n), "n = {n}");
        }
        assert!(matches!(enumerate_nc(15), Err(NcError::TooLarge { .. })));
    }

    #[test]
    fn enumerate_is_sorted_distinct_and_canonical() {
        for n in 0..=8 {
            let all = enumerate_nc(n).unwrap();
            let set: BTreeSet<_> = all.iter().cloned().collect();
            assert_eq!(set.len(), all.len());
            assert!(all.windows(2).all(|w| w[0] < w[1]));
            for p in &all {
                assert!(p.is_noncrossing());
                assert_eq!(&SetPartition::from_raw_labels(p.labels()), p);
            }
        }
    }

    #[test]
    fn enumerate_agrees_with_filtered_full_enumeration() {
        for n in 0..=8 {
            let filtered: BTreeSet<_> = enumerate_all_partitions(n)
                .into_iter()
                .filter(|p| is_noncrossing_brute(p))
                .collect();
            let direct: BTreeSet<_> = enumerate_nc(n).unwrap().into_iter().collect();
            assert_eq!(direct, filtered, "n = {n}");
        }
    }

    #[test]
    fn stack_scan_matches_brute_crossing_test() {
        for n in 0..=8 {
            for p in enumerate_all_partitions(n) {
                assert_eq!(p.is_noncrossing(), is_noncrossing_brute(&p), "{p}");
            }
        }
    }

    #[test]
    fn from_blocks_round_trip_and_validation() {
        let p = SetPartition::from_blocks(5, &[vec![1, 3], vec![0, 4], vec![2]]).unwrap();
        assert_eq!(p.blocks(), vec![vec![0, 4], vec![1, 3], vec![2]]);
        assert_eq!(p.to_string(), "{1,5}{2,4}{3}");
        assert!(SetPartition::from_blocks(3, &[vec![0, 1]]).is_err());
        assert!(SetPartition::from_blocks(3, &[vec![0, 1], vec![1, 2]]).is_err());
        assert!(SetPartition::from_blocks(3, &[vec![0, 1, 2], vec![]]).is_err());
        assert!(SetPartition::from_blocks(3, &[vec![0, 1, 3]]).is_err());
    }

    #[test]
    fn refinement_is_a_partial_order() {
        let all = enumerate_nc(5).unwrap();
        let bottom = SetPartition::discrete(5);
        let top = SetPartition::full(5);
        for p in &all {
            assert!(p.refines(p).unwrap());
            assert!(bottom.refines(p).unwrap());
            assert!(p.refines(&top).unwrap());
            for q in &all {
                let pq = p.refines(q).unwrap();
                let qp = q.refines(p).unwrap();
                if pq && qp {
                    assert_eq!(p, q);
                }
                if pq {
                    for r in &all {
                        if q.refines(r).unwrap() {
                            assert!(p.refines(r).unwrap());
                        }
                    }
                }
            }
        }
        assert!(matches!(
            bottom.refines(&SetPartition::full(4)),
            Err(NcError::SizeMismatch(5, 4))
        ));
    }

    #[test]
    fn kernel_partition_groups_equal_letters() {
        let ker = kernel_partition(&["x", "y", "x", "z", "y"]);
        assert_eq!(
            ker.blocks(),
            vec![vec![0, 2], vec![1, 4], vec![3]]
        );
        assert_eq!(kernel_partition::<u8>(&[]).n(), 0);
        assert_eq!(kernel_partition(&[1, 1, 1]), SetPartition::full(3));
    }

    #[test]
    fn mobius_of_bottom_is_signed_catalan() {
        for n in 1..=8 {
            let expected = rat_int(if n % 2 == 0 { -1 } else { 1 }) * rat_int(catalan(n - 1) as i64);
            assert_eq!(mobius_to_top(&SetPartition::discrete(n)).unwrap(), expected, "n = {n}");
        }
    }

    #[test]
    fn mobius_satisfies_defining_relation() {
        // Independent check: the coarsening sum is re-listed by scanning the
        // full enumeration with `refines`, not by grouping blocks.
        for n in 1..=6 {
            let all = enumerate_nc(n).unwrap();
            for p in &all {
                let mut total = Rat::zero();
                for sigma in &all {
                    if p.refines(sigma).unwrap() {
                        total += mobius_to_top(sigma).unwrap();
                    }
                }
                let expected = if p.num_blocks() == 1 {
                    Rat::one()
                } else {
                    Rat::zero()
                };
                assert_eq!(total, expected, "n = {n}, p = {p}");
            }
        }
    }

    #[test]
    fn mobius_rejects_crossing_and_oversize_input() {
        let crossing = SetPartition::from_blocks(4, &[vec![0, 2], vec![1, 3]]).unwrap();
        assert!(matches!(mobius_to_top(&crossing), Err(NcError::Crossing(_))));
        assert!(matches!(
            mobius_to_top(&SetPartition::discrete(11)),
            Err(NcError::TooLarge { .. })
        ));
    }
}
