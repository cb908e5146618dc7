//! n-gons, incidence partitions, PGL₂ equivalence, the symmetrization of an
//! n-gon into a string of n-gons, and the membership tests for the
//! normalized and equal-cross-ratio string varieties.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Field, Rat, RatFunc};
use crate::p1::{cross_ratio_points, limit, CrossRatioValue, Moebius, P1};

/// An unordered triple of labels, stored increasingly.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct Triple(pub [usize; 3]);

impl Triple {
    pub fn new(i: usize, j: usize, k: usize) -> Result<Self> {
        let mut v = [i, j, k];
        v.sort_unstable();
        if v[0] == v[1] || v[1] == v[2] {
            return Err(Error::RepeatedLabel(if v[0] == v[1] { v[0] } else { v[1] }));
        }
        Ok(Triple(v))
    }

    pub fn contains(&self, label: usize) -> bool {
        self.0.contains(&label)
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.0[0], self.0[1], self.0[2])
    }
}

/// An ordered quadruple of pairwise distinct labels.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct Quad(pub [usize; 4]);

impl Quad {
    pub fn new(q: [usize; 4]) -> Result<Self> {
        for i in 0..4 {
            for j in i + 1..4 {
                if q[i] == q[j] {
                    return Err(Error::RepeatedLabel(q[i]));
                }
            }
        }
        Ok(Quad(q))
    }

    pub fn labels_sorted(&self) -> [usize; 4] {
        let mut v = self.0;
        v.sort_unstable();
        v
    }

    pub fn contains(&self, label: usize) -> bool {
        self.0.contains(&label)
    }
}

impl fmt::Display for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.0[0], self.0[1], self.0[2], self.0[3])
    }
}

/// All size-`k` subsets of `items`, in lexicographic order.
pub(crate) fn subsets_k(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            rec(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(items, k, 0, &mut cur, &mut out);
    out
}

/// An ordered tuple of points on P¹. Positions are 1-based in the public
/// operations, matching the label conventions.
#[derive(Clone, PartialEq, Debug)]
pub struct NGon<K: Field> {
    entries: Vec<P1<K>>,
}

impl<K: Field> NGon<K> {
    pub fn new(entries: Vec<P1<K>>) -> Result<Self> {
        if entries.len() < 3 {
            return Err(Error::TooFewEntries(entries.len()));
        }
        Ok(NGon { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn entries(&self) -> &[P1<K>] {
        &self.entries
    }

    /// 1-based position access.
    pub fn entry(&self, pos: usize) -> &P1<K> {
        &self.entries[pos - 1]
    }

    pub fn apply(&self, m: &Moebius<K>) -> Self {
        NGon {
            entries: self.entries.iter().map(|p| m.apply(p)).collect(),
        }
    }

    /// Number of pairwise distinct entries.
    pub fn distinct_count(&self) -> usize {
        let mut reps: Vec<&P1<K>> = Vec::new();
        for e in &self.entries {
            if !reps.iter().any(|r| *r == e) {
                reps.push(e);
            }
        }
        reps.len()
    }

    pub fn has_pairwise_distinct_entries(&self) -> bool {
        self.distinct_count() == self.len()
    }
}

impl<K: Field> fmt::Display for NGon<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// The partition of positions (or labels) of an n-gon by equality of
/// entries. Blocks are sorted internally and ordered by their minima.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IncidencePartition {
    blocks: Vec<Vec<usize>>,
}

impl IncidencePartition {
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn singletons(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks.iter().filter(|b| b.len() == 1).map(|b| b[0])
    }

    /// The block containing `label`, if any.
    pub fn block_of(&self, label: usize) -> Option<&[usize]> {
        self.blocks
            .iter()
            .find(|b| b.contains(&label))
            .map(|b| b.as_slice())
    }
}

impl fmt::Display for IncidencePartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, "|")?;
            }
            write!(f, "{{")?;
            for (j, x) in b.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "}}")?;
        }
        Ok(())
    }
}

/// Incidence partition of an n-gon, blocks carrying the given labels
/// (one label per position, in order).
pub fn incidence_partition_labeled<K: Field>(x: &NGon<K>, labels: &[usize]) -> IncidencePartition {
    assert_eq!(labels.len(), x.len());
    let mut reps: Vec<(&P1<K>, Vec<usize>)> = Vec::new();
    for (pos, e) in x.entries().iter().enumerate() {
        match reps.iter_mut().find(|(r, _)| *r == e) {
            Some((_, block)) => block.push(labels[pos]),
            None => reps.push((e, vec![labels[pos]])),
        }
    }
    let mut blocks: Vec<Vec<usize>> = reps.into_iter().map(|(_, b)| b).collect();
    for b in &mut blocks {
        b.sort_unstable();
    }
    blocks.sort();
    IncidencePartition { blocks }
}

/// Incidence partition with positions 1..n as labels.
pub fn incidence_partition<K: Field>(x: &NGon<K>) -> IncidencePartition {
    let labels: Vec<usize> = (1..=x.len()).collect();
    incidence_partition_labeled(x, &labels)
}

/// Cross-ratio of the entries of `x` selected by the ordered quadruple of
/// 1-based positions.
pub fn cross_ratio<K: Field>(q: &Quad, x: &NGon<K>) -> Result<CrossRatioValue<K>> {
    for &p in &q.0 {
        if p == 0 || p > x.len() {
            return Err(Error::LabelOutOfRange(p));
        }
    }
    Ok(cross_ratio_points(
        x.entry(q.0[0]),
        x.entry(q.0[1]),
        x.entry(q.0[2]),
        x.entry(q.0[3]),
    ))
}

/// The unique PGL₂-image of `x` taking values 0, 1, ∞ at the three 1-based
/// positions, in the order given.
pub fn distinguished_representative_ordered<K: Field>(
    x: &NGon<K>,
    positions: [usize; 3],
) -> Result<NGon<K>> {
    for &p in &positions {
        if p == 0 || p > x.len() {
            return Err(Error::LabelOutOfRange(p));
        }
    }
    let m = Moebius::from_triple(
        x.entry(positions[0]),
        x.entry(positions[1]),
        x.entry(positions[2]),
    )?;
    Ok(x.apply(&m))
}

/// The distinguished representative for a sorted position triple `(i<j<k)`:
/// 0 at `i`, 1 at `j`, ∞ at `k`.
pub fn distinguished_representative<K: Field>(x: &NGon<K>, t: &Triple) -> Result<NGon<K>> {
    distinguished_representative_ordered(x, t.0)
}

/// The lexicographically first sorted position triple at which `x` has
/// pairwise distinct entries.
fn first_distinct_triple<K: Field>(x: &NGon<K>) -> Option<[usize; 3]> {
    let n = x.len();
    for i in 1..=n {
        for j in i + 1..=n {
            if x.entry(i) == x.entry(j) {
                continue;
            }
            for k in j + 1..=n {
                if x.entry(k) != x.entry(i) && x.entry(k) != x.entry(j) {
                    return Some([i, j, k]);
                }
            }
        }
    }
    None
}

/// Whether two n-gons of the same length lie in one PGL₂ orbit. Both must
/// have at least three distinct entries.
pub fn equivalent<K: Field>(x: &NGon<K>, y: &NGon<K>) -> Result<bool> {
    if x.len() != y.len() {
        return Err(Error::InvalidInput("length mismatch".into()));
    }
    let t = first_distinct_triple(x).ok_or(Error::TooFewDistinctEntries)?;
    first_distinct_triple(y).ok_or(Error::TooFewDistinctEntries)?;
    // Möbius maps preserve coincidence patterns, so distinctness must match.
    if y.entry(t[0]) == y.entry(t[1]) || y.entry(t[0]) == y.entry(t[2]) || y.entry(t[1]) == y.entry(t[2])
    {
        return Ok(false);
    }
    let dx = distinguished_representative_ordered(x, t)?;
    let dy = distinguished_representative_ordered(y, t)?;
    Ok(dx == dy)
}

/// Verdict of [`GonString::validate`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum StringVerdict {
    /// Some component violates the 0,1,∞ normalization.
    NotInT,
    /// Normalized, but the cross-ratio equations fail.
    InT,
    /// Normalized with equal cross-ratios.
    InY,
}

impl fmt::Display for StringVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StringVerdict::NotInT => write!(f, "not-in-T"),
            StringVerdict::InT => write!(f, "in-T"),
            StringVerdict::InY => write!(f, "in-Y"),
        }
    }
}

/// A family of n-gons indexed by the increasing triples of an ordered label
/// set, each component normalized to 0, 1, ∞ at its triple.
#[derive(Clone, PartialEq, Debug)]
pub struct GonString<K: Field> {
    labels: Vec<usize>,
    gons: BTreeMap<Triple, NGon<K>>,
}

impl<K: Field> GonString<K> {
    /// Builds a string from its components. Requires sorted distinct labels,
    /// one component of the right length per increasing triple.
    pub fn new(labels: Vec<usize>, gons: BTreeMap<Triple, NGon<K>>) -> Result<Self> {
        if labels.len() < 3 {
            return Err(Error::TooFewEntries(labels.len()));
        }
        if labels.windows(2).any(|w| w[0] >= w[1]) || labels[0] == 0 {
            return Err(Error::InvalidInput("labels must be sorted, distinct, positive".into()));
        }
        let expected = subsets_k(&labels, 3);
        if gons.len() != expected.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} components, got {}",
                expected.len(),
                gons.len()
            )));
        }
        for t in &expected {
            let t = Triple([t[0], t[1], t[2]]);
            match gons.get(&t) {
                None => return Err(Error::InvalidInput(format!("missing component {t}"))),
                Some(g) if g.len() != labels.len() => {
                    return Err(Error::InvalidInput(format!("component {t} has wrong length")))
                }
                _ => {}
            }
        }
        Ok(GonString { labels, gons })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// 0-based position of a label.
    pub fn pos(&self, label: usize) -> Result<usize> {
        self.labels
            .binary_search(&label)
            .map_err(|_| Error::LabelOutOfRange(label))
    }

    pub fn triples(&self) -> impl Iterator<Item = &Triple> {
        self.gons.keys()
    }

    pub fn components(&self) -> impl Iterator<Item = (&Triple, &NGon<K>)> {
        self.gons.iter()
    }

    pub fn component(&self, t: &Triple) -> Result<&NGon<K>> {
        self.gons
            .get(t)
            .ok_or_else(|| Error::InvalidInput(format!("no component {t}")))
    }

    /// Entry of the component at `t` in the slot of `label`.
    pub fn entry(&self, t: &Triple, label: usize) -> Result<&P1<K>> {
        let pos = self.pos(label)?;
        Ok(&self.component(t)?.entries()[pos])
    }

    /// The symmetrization of an n-gon with pairwise distinct entries: for
    /// every increasing triple, the distinguished representative normalized
    /// there. Labels are 1..n.
    pub fn symmetrize(x: &NGon<K>) -> Result<Self> {
        let labels: Vec<usize> = (1..=x.len()).collect();
        Self::symmetrize_on_labels(&labels, x)
    }

    /// Symmetrization with an explicit label set; entry positions of `x`
    /// correspond to sorted labels.
    pub fn symmetrize_on_labels(labels: &[usize], x: &NGon<K>) -> Result<Self> {
        if !x.has_pairwise_distinct_entries() {
            return Err(Error::CoincidentPoints);
        }
        let mut gons = BTreeMap::new();
        for t in subsets_k(labels, 3) {
            let positions = [
                labels.binary_search(&t[0]).unwrap() + 1,
                labels.binary_search(&t[1]).unwrap() + 1,
                labels.binary_search(&t[2]).unwrap() + 1,
            ];
            let gon = distinguished_representative_ordered(x, positions)?;
            gons.insert(Triple([t[0], t[1], t[2]]), gon);
        }
        GonString::new(labels.to_vec(), gons)
    }

    /// Checks the normalization of every component and then the cleared
    /// cross-ratio equations between all components.
    ///
    /// Per increasing quadruple it suffices to compare the homogeneous pairs
    /// (numerator, denominator) of one pairing across all components: the
    /// equations for permuted quadruples reduce to the same condition through
    /// the Plücker relation, and components where both products vanish
    /// impose the trivial equation 0 = 0.
    pub fn validate(&self) -> StringVerdict {
        for (t, gon) in &self.gons {
            let i = self.pos(t.0[0]).unwrap();
            let j = self.pos(t.0[1]).unwrap();
            let k = self.pos(t.0[2]).unwrap();
            let e = gon.entries();
            if !e[i].is_zero() || !e[j].is_one() || !e[k].is_inf() {
                return StringVerdict::NotInT;
            }
        }
        for q in subsets_k(&self.labels, 4) {
            let mut witness: Option<(K, K)> = None;
            for gon in self.gons.values() {
                let pick = |l: usize| &gon.entries()[self.pos(l).unwrap()];
                let (pi, pj, pk, pl) = (pick(q[0]), pick(q[1]), pick(q[2]), pick(q[3]));
                let num = P1::det(pi, pk).mul(&P1::det(pj, pl));
                let den = P1::det(pi, pl).mul(&P1::det(pj, pk));
                if num.is_zero() && den.is_zero() {
                    continue;
                }
                match &witness {
                    None => witness = Some((num, den)),
                    Some((n0, d0)) => {
                        if n0.mul(&den) != d0.mul(&num) {
                            return StringVerdict::InT;
                        }
                    }
                }
            }
        }
        StringVerdict::InY
    }

    /// The common cross-ratio value of the string at an ordered quadruple of
    /// labels. Reads the component indexed by the three smallest labels of
    /// the quadruple, where the value is always defined. The string is
    /// assumed to satisfy the equal-cross-ratio equations.
    pub fn cross_ratio(&self, q: &Quad) -> Result<P1<K>> {
        let s = q.labels_sorted();
        let t = Triple([s[0], s[1], s[2]]);
        let gon = self.component(&t)?;
        let pick = |l: usize| -> Result<&P1<K>> { Ok(&gon.entries()[self.pos(l)?]) };
        let v = cross_ratio_points(pick(q.0[0])?, pick(q.0[1])?, pick(q.0[2])?, pick(q.0[3])?);
        match v {
            CrossRatioValue::Value(p) => Ok(p),
            CrossRatioValue::Undefined => unreachable!("component at {t} is normalized"),
        }
    }
}

/// Entrywise limit of a string over the rational-function field as the
/// parameter approaches `t0`.
pub fn limit_string(xx: &GonString<RatFunc<Rat>>, t0: &P1<Rat>) -> GonString<Rat> {
    let lim_entry = |p: &P1<RatFunc<Rat>>| -> P1<Rat> {
        match p {
            P1::Finite(f) => limit(f, t0),
            P1::Inf => P1::Inf,
        }
    };
    let gons = xx
        .components()
        .map(|(t, g)| {
            let entries = g.entries().iter().map(lim_entry).collect();
            (*t, NGon::new(entries).unwrap())
        })
        .collect();
    GonString::new(xx.labels().to_vec(), gons).unwrap()
}
