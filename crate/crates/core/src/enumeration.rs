//! Counting and exhaustive generation of phylogenetic trees.
//!
//! The counting side works with rooted trees: `a(n, o)` counts rooted trees
//! with `n` labeled leaves and `o` inner vertices via
//! `a(n,o) = o·a(n-1,o) + (o+n-2)·a(n-1,o-1)`, `a(n,1) = 1`. Totals follow
//! the convolution recursion as a cross-check and feed the exponential
//! generating function identities. Unrooted trees with n leaves are
//! generated exhaustively by leaf insertion; their number matches the rooted
//! total one index down, which the generator itself certifies.

use num::BigInt;

use crate::error::{Error, Result};
use crate::field::{Field, Rat};
use crate::phylo::{LabelSet, PhyloTree};

/// Table of rooted tree counts `a(n, o)`, `1 <= o <= n-1`.
pub struct RootedCountTable {
    rows: Vec<Vec<BigInt>>, // rows[n][o]
}

impl RootedCountTable {
    pub fn up_to(n_max: usize) -> Self {
        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            let mut row = vec![BigInt::from(0); n.max(1)];
            if n >= 2 {
                row[1] = BigInt::from(1);
                for o in 2..n {
                    let prev = &rows[n - 1];
                    let same = prev.get(o).cloned().unwrap_or_else(|| BigInt::from(0));
                    let less = prev.get(o - 1).cloned().unwrap_or_else(|| BigInt::from(0));
                    row[o] = BigInt::from(o) * same + BigInt::from(o + n - 2) * less;
                }
            }
            rows.push(row);
        }
        RootedCountTable { rows }
    }

    /// Rooted trees with `n` leaves and `o` inner vertices.
    pub fn count(&self, n: usize, o: usize) -> BigInt {
        self.rows
            .get(n)
            .and_then(|r| r.get(o))
            .cloned()
            .unwrap_or_else(|| BigInt::from(0))
    }

    /// Rooted trees with `n` leaves; the single leaf counts as one tree.
    pub fn total(&self, n: usize) -> BigInt {
        match n {
            0 => BigInt::from(0),
            1 => BigInt::from(1),
            _ => self.rows[n].iter().fold(BigInt::from(0), |a, b| a + b),
        }
    }
}

/// `a(n, o)` without keeping the table.
pub fn count_rooted(n: usize, o: usize) -> BigInt {
    RootedCountTable::up_to(n).count(n, o)
}

/// Total number of rooted trees with `n` leaves, from the table recursion.
pub fn count_total(n: usize) -> BigInt {
    RootedCountTable::up_to(n).total(n)
}

/// The same totals from the convolution recursion
/// `a(n) = -(n-1) a(n-1) + sum_k a(k) a(n-k) C(n,k)`.
pub fn count_total_convolution(n: usize) -> BigInt {
    let mut a = vec![BigInt::from(0); n.max(1) + 1];
    if n >= 1 {
        a[1] = BigInt::from(1);
    }
    for m in 2..=n {
        let mut s = -BigInt::from(m - 1) * &a[m - 1];
        for k in 1..m {
            s += &a[k] * &a[m - k] * binomial(m, k);
        }
        a[m] = s;
    }
    a[n].clone()
}

fn binomial(n: usize, k: usize) -> BigInt {
    let mut b = BigInt::from(1);
    for i in 0..k {
        b = b * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    b
}

/// Truncated power series over the rationals, coefficients of x^0..x^deg.
struct Series {
    c: Vec<Rat>,
}

impl Series {
    fn zero(deg: usize) -> Self {
        Series {
            c: vec![Rat::zero(); deg + 1],
        }
    }

    fn deg(&self) -> usize {
        self.c.len() - 1
    }

    fn add(&self, rhs: &Self) -> Self {
        let mut out = Series::zero(self.deg().min(rhs.deg()));
        for i in 0..out.c.len() {
            out.c[i] = self.c[i].add(&rhs.c[i]);
        }
        out
    }

    fn sub(&self, rhs: &Self) -> Self {
        let mut out = Series::zero(self.deg().min(rhs.deg()));
        for i in 0..out.c.len() {
            out.c[i] = self.c[i].sub(&rhs.c[i]);
        }
        out
    }

    fn mul(&self, rhs: &Self) -> Self {
        let deg = self.deg().min(rhs.deg());
        let mut out = Series::zero(deg);
        for i in 0..=deg {
            for j in 0..=deg - i {
                out.c[i + j] = out.c[i + j].add(&self.c[i].mul(&rhs.c[j]));
            }
        }
        out
    }

    fn scale(&self, r: &Rat) -> Self {
        Series {
            c: self.c.iter().map(|x| x.mul(r)).collect(),
        }
    }

    /// exp of a series with zero constant term.
    fn exp(&self) -> Self {
        assert!(self.c[0].is_zero());
        let mut acc = Series::zero(self.deg());
        acc.c[0] = Rat::one();
        let mut pow = acc.clone_series();
        let mut fact = Rat::one();
        for j in 1..=self.deg() {
            pow = pow.mul(self);
            fact = fact.mul(&Rat::from(BigInt::from(j)));
            acc = acc.add(&pow.scale(&fact.inv()));
        }
        acc
    }

    fn derivative(&self) -> Self {
        let mut out = Series::zero(self.deg().saturating_sub(1));
        for i in 1..=self.deg() {
            out.c[i - 1] = self.c[i].mul(&Rat::from(BigInt::from(i)));
        }
        out
    }

    fn truncate(&self, deg: usize) -> Self {
        Series {
            c: self.c[..=deg.min(self.deg())].to_vec(),
        }
    }

    fn clone_series(&self) -> Self {
        Series { c: self.c.clone() }
    }

    fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }
}

/// Checks, with exact rational coefficients through the given degree, that
/// the exponential generating function of the rooted totals satisfies both
/// `exp A(x) = 2A(x) - x + 1` and `(1 + x - 2A)·A' = 1`.
pub fn series_identity_check(depth: usize) -> bool {
    assert!(depth >= 2);
    let table = RootedCountTable::up_to(depth);
    let mut a = Series::zero(depth);
    let mut fact = Rat::one();
    for n in 1..=depth {
        fact = fact.mul(&Rat::from(BigInt::from(n)));
        a.c[n] = Rat::from(table.total(n)).div(&fact);
    }
    let mut x = Series::zero(depth);
    x.c[1] = Rat::one();
    let mut one = Series::zero(depth);
    one.c[0] = Rat::one();

    let lhs1 = a.exp();
    let rhs1 = a.scale(&Rat::from_i64(2)).sub(&x).add(&one);
    if !lhs1.sub(&rhs1).is_zero() {
        return false;
    }

    let da = a.derivative();
    let factor = one.add(&x).sub(&a.scale(&Rat::from_i64(2))).truncate(depth - 1);
    let lhs2 = factor.mul(&da);
    let rhs2 = one.truncate(depth - 1);
    lhs2.sub(&rhs2).is_zero()
}

/// Default cap on exhaustive tree generation.
pub const ENUMERATION_CAP: usize = 8;

/// All phylogenetic trees with leaves 1..n, without duplicates, in canonical
/// split-set order. Built by inserting leaf m+1 into every tree on m leaves,
/// at every edge and at every inner vertex.
pub fn enumerate_trees(n: usize) -> Result<Vec<PhyloTree>> {
    enumerate_trees_capped(n, ENUMERATION_CAP)
}

pub fn enumerate_trees_capped(n: usize, cap: usize) -> Result<Vec<PhyloTree>> {
    if n < 3 {
        return Err(Error::InvalidInput("trees need at least 3 leaves".into()));
    }
    if n > cap {
        return Err(Error::EnumerationCap { n, cap });
    }
    let mut current = vec![PhyloTree::star(LabelSet::full(3)).unwrap()];
    for m in 3..n {
        let new_leaf = m + 1;
        let mut next = std::collections::BTreeSet::new();
        for t in &current {
            for t2 in insertions(t, new_leaf) {
                next.insert(t2);
            }
        }
        current = next.into_iter().collect();
    }
    Ok(current)
}

/// All ways of attaching a new leaf to a tree: on every inner edge, on every
/// leaf edge, and at every inner vertex.
fn insertions(t: &PhyloTree, new_leaf: usize) -> Vec<PhyloTree> {
    let labels = t.labels().with(new_leaf);
    let n2 = labels.len();
    let old_splits: Vec<LabelSet> = t.splits().iter().copied().collect();
    let mut out = Vec::new();
    let keep = |s: LabelSet| s.len() >= 2 && s.len() <= n2 - 2;

    // at an inner vertex v: the new leaf joins the near side of every split
    // whose far side misses v's subtree
    let adj = t.adjacency();
    for cluster in &adj.clusters {
        let splits = old_splits
            .iter()
            .map(|s| if cluster.is_subset(*s) { s.with(new_leaf) } else { *s });
        out.push(PhyloTree::new(labels, splits.filter(|s| keep(*s))).unwrap());
    }
    // on an inner edge with canonical side s0: both halves become edges
    for s0 in &old_splits {
        let mut splits: Vec<LabelSet> = old_splits
            .iter()
            .map(|s| if s0.is_subset(*s) { s.with(new_leaf) } else { *s })
            .collect();
        splits.push(*s0);
        out.push(PhyloTree::new(labels, splits.into_iter().filter(|s| keep(*s))).unwrap());
    }
    // on the leaf edge of l: creates the cherry {l, new_leaf}
    for l in t.labels().iter() {
        let mut splits: Vec<LabelSet> = old_splits
            .iter()
            .map(|s| if s.contains(l) { s.with(new_leaf) } else { *s })
            .collect();
        splits.push(LabelSet::singleton(l).with(new_leaf));
        out.push(PhyloTree::new(labels, splits.into_iter().filter(|s| keep(*s))).unwrap());
    }
    out
}

/// The extremal trees (all inner degrees three) among all trees with n
/// leaves.
pub fn enumerate_extremal(n: usize) -> Result<Vec<PhyloTree>> {
    Ok(enumerate_trees(n)?
        .into_iter()
        .filter(|t| t.is_extremal())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rooted_table_small_values() {
        let t = RootedCountTable::up_to(4);
        assert_eq!(t.count(3, 1), BigInt::from(1));
        assert_eq!(t.count(3, 2), BigInt::from(3));
        assert_eq!(t.count(4, 1), BigInt::from(1));
        assert_eq!(t.count(4, 2), BigInt::from(10));
        assert_eq!(t.count(4, 3), BigInt::from(15));
        assert_eq!(t.total(4), BigInt::from(26));
        // a(n,1) = 1 for all n
        let big = RootedCountTable::up_to(12);
        for n in 2..=12 {
            assert_eq!(big.count(n, 1), BigInt::from(1));
        }
    }

    #[test]
    fn totals_sequence() {
        let expect: [u64; 12] = [
            0, 1, 1, 4, 26, 236, 2752, 39208, 660032, 12818912, 282137824, 6939897856,
        ];
        for (n, e) in expect.iter().enumerate() {
            assert_eq!(count_total(n), BigInt::from(*e), "n = {n}");
        }
    }

    #[test]
    fn both_recursions_agree() {
        for n in 0..=14 {
            assert_eq!(count_total(n), count_total_convolution(n), "n = {n}");
        }
    }

    #[test]
    fn series_identities() {
        assert!(series_identity_check(2));
        assert!(series_identity_check(6));
        assert!(series_identity_check(10));
    }

    #[test]
    fn enumerate_small() {
        assert_eq!(enumerate_trees(3).unwrap().len(), 1);
        let t4 = enumerate_trees(4).unwrap();
        assert_eq!(t4.len(), 4);
        assert_eq!(t4.iter().filter(|t| t.is_star()).count(), 1);
        let t5 = enumerate_trees(5).unwrap();
        assert_eq!(t5.len(), 26);
        assert_eq!(enumerate_extremal(5).unwrap().len(), 15);
        assert_eq!(enumerate_trees(6).unwrap().len(), 236);
        assert!(matches!(
            enumerate_trees_capped(9, 8),
            Err(Error::EnumerationCap { n: 9, cap: 8 })
        ));
    }

    #[test]
    fn enumeration_matches_rooted_totals_one_down() {
        for n in 4..=6 {
            assert_eq!(
                BigInt::from(enumerate_trees(n).unwrap().len()),
                count_total(n - 1),
                "n = {n}"
            );
        }
    }

    #[test]
    fn generation_is_deterministic_and_duplicate_free() {
        let a = enumerate_trees(5).unwrap();
        let b = enumerate_trees(5).unwrap();
        assert_eq!(a, b);
        let set: std::collections::BTreeSet<_> = a.iter().collect();
        assert_eq!(set.len(), a.len());
    }

    #[test]
    fn every_generated_tree_passes_invariants() {
        for t in enumerate_trees(6).unwrap() {
            // reconstructing from the covering round-trips
            let cov = t.covering();
            assert_eq!(crate::phylo::tree_of_covering(&cov).unwrap(), t);
        }
    }
}
