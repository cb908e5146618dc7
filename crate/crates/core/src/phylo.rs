//! Labelled phylogenetic trees: leaves carry distinct labels, inner vertices
//! have degree at least three. A tree is stored canonically by its set of
//! nontrivial splits (one bipartition of the label set per inner edge), so
//! equality of trees is equality of split sets. Adjacency structure is
//! derived on demand.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// A set of labels (1-based, below 64), packed in a word.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash, Default)]
pub struct LabelSet(pub u64);

impl LabelSet {
    pub fn empty() -> Self {
        LabelSet(0)
    }

    pub fn full(n: usize) -> Self {
        let mut s = LabelSet(0);
        for i in 1..=n {
            s = s.with(i);
        }
        s
    }

    pub fn singleton(label: usize) -> Self {
        LabelSet(0).with(label)
    }

    pub fn with(self, label: usize) -> Self {
        assert!(label >= 1 && label < 64, "label out of range");
        LabelSet(self.0 | (1 << label))
    }

    pub fn without(self, label: usize) -> Self {
        LabelSet(self.0 & !(1 << label))
    }

    pub fn contains(self, label: usize) -> bool {
        label >= 1 && label < 64 && self.0 & (1 << label) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: Self) -> Self {
        LabelSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        LabelSet(self.0 & other.0)
    }

    pub fn minus(self, other: Self) -> Self {
        LabelSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn min(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() as usize)
        }
    }

    pub fn max(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(63 - self.0.leading_zeros() as usize)
        }
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (1..64).filter(move |&i| self.contains(i))
    }

    pub fn from_labels(labels: &[usize]) -> Self {
        labels.iter().fold(LabelSet::empty(), |s, &l| s.with(l))
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Display for LabelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, l) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, "}}")
    }
}

/// The destination partition of an inner vertex: one block of reachable
/// leaves per emanating edge.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct DestinationPartition {
    pub blocks: Vec<LabelSet>,
}

impl DestinationPartition {
    pub fn new(mut blocks: Vec<LabelSet>) -> Self {
        blocks.sort();
        DestinationPartition { blocks }
    }

    pub fn degree(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_containing(&self, label: usize) -> Option<LabelSet> {
        self.blocks.iter().copied().find(|b| b.contains(label))
    }

    pub fn fingerprint(&self) -> String {
        self.blocks
            .iter()
            .map(|b| b.to_string())
            .collect::<Vec<_>>()
            .join("|")
    }
}

/// A family of partitions of the label set, one per abstract vertex; the
/// same data as a phylogenetic tree.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ArboralCovering {
    pub labels: LabelSet,
    pub partitions: Vec<DestinationPartition>,
}

/// A phylogenetic tree on a finite label set, canonically represented by its
/// set of nontrivial splits. Each split is stored as the side not containing
/// the smallest label.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct PhyloTree {
    labels: LabelSet,
    splits: BTreeSet<LabelSet>,
}

impl PhyloTree {
    /// The tree with a single inner vertex.
    pub fn star(labels: LabelSet) -> Result<Self> {
        Self::new(labels, [])
    }

    /// Builds a tree from splits given as either side of their bipartition.
    pub fn new(labels: LabelSet, splits: impl IntoIterator<Item = LabelSet>) -> Result<Self> {
        let n = labels.len();
        if n < 3 {
            return Err(Error::InvalidTree(format!("needs >= 3 leaves, got {n}")));
        }
        let root = labels.min().unwrap();
        let mut canon = BTreeSet::new();
        for s in splits {
            if !s.is_subset(labels) {
                return Err(Error::InvalidTree(format!("split {s} uses foreign labels")));
            }
            let side = if s.contains(root) { labels.minus(s) } else { s };
            if side.len() < 2 || side.len() > n - 2 {
                return Err(Error::InvalidTree(format!("trivial split {side}")));
            }
            canon.insert(side);
        }
        // canonical sides all avoid the root label, so compatibility means
        // nested or disjoint
        let v: Vec<LabelSet> = canon.iter().copied().collect();
        for (i, a) in v.iter().enumerate() {
            for b in &v[i + 1..] {
                let meet = a.intersection(*b);
                if !meet.is_empty() && meet != *a && meet != *b {
                    return Err(Error::InvalidTree(format!("incompatible splits {a} and {b}")));
                }
            }
        }
        Ok(PhyloTree {
            labels,
            splits: canon,
        })
    }

    pub fn labels(&self) -> LabelSet {
        self.labels
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Canonical split sides (each avoiding the smallest label), one per
    /// inner edge.
    pub fn splits(&self) -> &BTreeSet<LabelSet> {
        &self.splits
    }

    pub fn inner_edge_count(&self) -> usize {
        self.splits.len()
    }

    pub fn is_star(&self) -> bool {
        self.splits.is_empty()
    }

    /// All inner vertices have degree three; equivalently the tree has the
    /// maximal number n-3 of inner edges.
    pub fn is_extremal(&self) -> bool {
        self.adjacency()
            .partitions
            .iter()
            .all(|p| p.degree() == 3)
    }

    pub fn edge_count(&self) -> usize {
        self.n() + self.splits.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.n() + self.inner_vertex_count()
    }

    pub fn inner_vertex_count(&self) -> usize {
        self.adjacency().clusters.len()
    }

    /// Derived adjacency view. Vertices are indexed in a canonical order.
    pub fn adjacency(&self) -> Adjacency {
        let root = self.labels.min().unwrap();
        let top = self.labels.without(root);
        // clusters: set of leaves strictly below each inner vertex, rooted at
        // the smallest label
        let mut clusters: Vec<LabelSet> = self.splits.iter().copied().collect();
        clusters.push(top);
        clusters.sort();
        clusters.dedup();
        let parent_of = |c: LabelSet| -> Option<usize> {
            clusters
                .iter()
                .enumerate()
                .filter(|(_, d)| c != **d && c.is_subset(**d))
                .min_by_key(|(_, d)| d.len())
                .map(|(i, _)| i)
        };
        let idx_of = |c: LabelSet| clusters.iter().position(|d| *d == c).unwrap();
        let mut neighbors = vec![Vec::new(); clusters.len()];
        for (i, c) in clusters.iter().enumerate() {
            if *c == top {
                continue;
            }
            let p = parent_of(*c).expect("top cluster contains all others");
            neighbors[i].push(p);
            neighbors[p].push(i);
        }
        let mut leaf_vertex = Vec::new();
        for l in self.labels.iter() {
            let v = if l == root {
                idx_of(top)
            } else {
                clusters
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| c.contains(l))
                    .min_by_key(|(_, c)| c.len())
                    .map(|(i, _)| i)
                    .expect("every non-root label lies in the top cluster")
            };
            leaf_vertex.push((l, v));
        }
        let mut partitions = Vec::with_capacity(clusters.len());
        for (i, c) in clusters.iter().enumerate() {
            let mut blocks = Vec::new();
            if *c != top {
                blocks.push(self.labels.minus(*c));
            } else {
                blocks.push(LabelSet::singleton(root));
            }
            for (j, d) in clusters.iter().enumerate() {
                if neighbors[i].contains(&j) && d.is_subset(*c) {
                    blocks.push(*d);
                }
            }
            for (l, v) in &leaf_vertex {
                if *v == i && *l != root {
                    blocks.push(LabelSet::singleton(*l));
                }
            }
            debug_assert!(blocks.len() >= 3, "inner vertex of degree < 3");
            debug_assert_eq!(
                blocks.iter().fold(LabelSet::empty(), |a, b| a.union(*b)),
                self.labels
            );
            partitions.push(DestinationPartition::new(blocks));
        }
        Adjacency {
            labels: self.labels,
            clusters,
            neighbors,
            leaf_vertex,
            partitions,
        }
    }

    /// The unique vertex separating three leaves into three components,
    /// found by walking toward the shared direction.
    pub fn meeting_point(&self, i: usize, j: usize, k: usize) -> Result<usize> {
        if i == j || j == k || i == k {
            return Err(Error::RepeatedLabel(if i == j { i } else { k }));
        }
        for l in [i, j, k] {
            if !self.labels.contains(l) {
                return Err(Error::LabelOutOfRange(l));
            }
        }
        let adj = self.adjacency();
        let mut v = 0;
        loop {
            let p = &adj.partitions[v];
            let bi = p.block_containing(i).unwrap();
            let bj = p.block_containing(j).unwrap();
            let bk = p.block_containing(k).unwrap();
            if bi != bj && bj != bk && bi != bk {
                return Ok(v);
            }
            // two of the leaves share a block: step along that edge
            let shared = if bi == bj { bi } else if bj == bk { bj } else { bi };
            v = adj.neighbor_toward(v, shared);
        }
    }

    /// Destination partition of an inner vertex (by canonical index).
    pub fn destination_partition(&self, v: usize) -> Result<DestinationPartition> {
        let adj = self.adjacency();
        adj.partitions
            .get(v)
            .cloned()
            .ok_or(Error::InvalidInput(format!("no inner vertex {v}")))
    }

    /// All destination partitions; satisfies the arboral covering axioms.
    pub fn covering(&self) -> ArboralCovering {
        let mut partitions = self.adjacency().partitions;
        partitions.sort();
        ArboralCovering {
            labels: self.labels,
            partitions,
        }
    }

    /// Removes a leaf and its edge, suppressing a resulting degree-2 vertex.
    /// In split form: drop the label everywhere, then drop trivial splits
    /// and duplicates.
    pub fn clip_leaf(&self, label: usize) -> Result<PhyloTree> {
        if !self.labels.contains(label) {
            return Err(Error::LabelOutOfRange(label));
        }
        let labels = self.labels.without(label);
        if labels.len() < 3 {
            return Err(Error::InvalidTree("clipping below 3 leaves".into()));
        }
        let splits = self.splits.iter().map(|s| s.without(label));
        PhyloTree::new(labels, splits.filter(|s| s.len() >= 2 && s.len() <= labels.len() - 2))
    }

    /// Contracts the inner edge given by one of its split sides.
    pub fn contract_edge(&self, side: LabelSet) -> Result<PhyloTree> {
        let canon = self.canonical_side(side)?;
        let mut splits = self.splits.clone();
        if !splits.remove(&canon) {
            return Err(Error::InvalidEdit(format!("no inner edge with split {side}")));
        }
        Ok(PhyloTree {
            labels: self.labels,
            splits,
        })
    }

    fn canonical_side(&self, side: LabelSet) -> Result<LabelSet> {
        if !side.is_subset(self.labels) {
            return Err(Error::InvalidEdit(format!("labels {side} not in tree")));
        }
        let root = self.labels.min().unwrap();
        Ok(if side.contains(root) {
            self.labels.minus(side)
        } else {
            side
        })
    }

    /// Splits the vertex whose destination blocks are partitioned by `side`:
    /// inserts a new inner edge separating the blocks inside `side` from the
    /// rest. Both sides must keep at least two blocks.
    pub fn split_vertex(&self, side: LabelSet) -> Result<PhyloTree> {
        let canon = self.canonical_side(side)?;
        if self.splits.contains(&canon) {
            return Err(Error::InvalidEdit(format!("edge with split {canon} already present")));
        }
        let adj = self.adjacency();
        for p in &adj.partitions {
            let inside = p.blocks.iter().filter(|b| b.is_subset(canon)).count();
            let covered: LabelSet = p
                .blocks
                .iter()
                .filter(|b| b.is_subset(canon))
                .fold(LabelSet::empty(), |a, b| a.union(*b));
            if covered == canon {
                if inside < 2 || p.degree() - inside < 2 {
                    return Err(Error::InvalidEdit(
                        "both sides of a vertex split need at least two edges".into(),
                    ));
                }
                let mut splits = self.splits.clone();
                splits.insert(canon);
                return Ok(PhyloTree {
                    labels: self.labels,
                    splits,
                });
            }
        }
        Err(Error::InvalidEdit(format!(
            "{side} is not a union of destination blocks of a vertex"
        )))
    }

    /// Leaf sets of the connected components after deleting an inner edge;
    /// with `keep_endpoints` the two sides of the split, otherwise one
    /// component per remaining edge of the two endpoints.
    pub fn delete_edge_components(&self, side: LabelSet, keep_endpoints: bool) -> Result<Vec<LabelSet>> {
        let canon = self.canonical_side(side)?;
        if !self.splits.contains(&canon) {
            return Err(Error::InvalidEdit(format!("no inner edge with split {side}")));
        }
        if keep_endpoints {
            return Ok(vec![canon, self.labels.minus(canon)]);
        }
        let adj = self.adjacency();
        let child = adj.clusters.iter().position(|c| *c == canon).unwrap();
        let parent = adj.neighbor_toward(child, self.labels.minus(canon));
        let mut comps = Vec::new();
        for p in adj.partitions[child].blocks.iter() {
            if *p != self.labels.minus(canon) {
                comps.push(*p);
            }
        }
        for p in adj.partitions[parent].blocks.iter() {
            if *p != canon {
                comps.push(*p);
            }
        }
        comps.sort();
        Ok(comps)
    }

    /// The unlabeled tree on the inner vertices: vertex count plus edges
    /// between canonical vertex indices.
    pub fn skeleton(&self) -> Skeleton {
        let adj = self.adjacency();
        let mut edges = BTreeSet::new();
        for (i, ns) in adj.neighbors.iter().enumerate() {
            for &j in ns {
                edges.insert((i.min(j), i.max(j)));
            }
        }
        Skeleton {
            vertices: adj.clusters.len(),
            edges,
        }
    }

    /// DOT rendering: leaves as labeled boxes, inner vertices as dots.
    pub fn to_dot(&self) -> String {
        let adj = self.adjacency();
        let mut out = String::from("graph {\n  node [shape=point];\n");
        for i in 0..adj.clusters.len() {
            out.push_str(&format!("  v{i};\n"));
        }
        out.push_str("  node [shape=box];\n");
        for (l, _) in &adj.leaf_vertex {
            out.push_str(&format!("  l{l} [label=\"{l}\"];\n"));
        }
        for (i, ns) in adj.neighbors.iter().enumerate() {
            for &j in ns {
                if i < j {
                    out.push_str(&format!("  v{i} -- v{j};\n"));
                }
            }
        }
        for (l, v) in &adj.leaf_vertex {
            out.push_str(&format!("  v{v} -- l{l};\n"));
        }
        out.push_str("}\n");
        out
    }
}

impl fmt::Display for PhyloTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tree on {}", self.labels)?;
        for s in &self.splits {
            write!(f, " {s}")?;
        }
        Ok(())
    }
}

/// Derived adjacency structure of a tree. Inner vertices are indexed by the
/// canonical order of their below-the-root clusters; the destination
/// partition of a vertex is its stable fingerprint across runs.
pub struct Adjacency {
    pub labels: LabelSet,
    /// Leaves strictly below each inner vertex when rooted at the smallest
    /// label; unique per vertex.
    pub clusters: Vec<LabelSet>,
    pub neighbors: Vec<Vec<usize>>,
    pub leaf_vertex: Vec<(usize, usize)>,
    pub partitions: Vec<DestinationPartition>,
}

impl Adjacency {
    /// The vertex attached to leaf `label`.
    pub fn vertex_of_leaf(&self, label: usize) -> Option<usize> {
        self.leaf_vertex
            .iter()
            .find(|(l, _)| *l == label)
            .map(|(_, v)| *v)
    }

    /// Steps from `v` along the edge whose destination block is `block`.
    /// Panics if the block belongs to a leaf edge.
    pub fn neighbor_toward(&self, v: usize, block: LabelSet) -> usize {
        for &w in &self.neighbors[v] {
            let toward = if self.clusters[w].is_subset(self.clusters[v]) && self.clusters[w] != self.clusters[v]
            {
                self.clusters[w]
            } else {
                self.labels.minus(self.clusters[v])
            };
            if toward == block {
                return w;
            }
        }
        panic!("no inner edge at v{v} toward {block}");
    }
}

/// Inner-vertex graph of a tree.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Skeleton {
    pub vertices: usize,
    pub edges: BTreeSet<(usize, usize)>,
}

/// Reconstructs the tree from a family of partitions: vertices with
/// complementary blocks get connected, singleton owners receive the leaf.
/// Errors name the violated covering axiom.
pub fn tree_of_covering(cov: &ArboralCovering) -> Result<PhyloTree> {
    let labels = cov.labels;
    for p in &cov.partitions {
        let mut seen = LabelSet::empty();
        for b in &p.blocks {
            if b.is_empty() || !b.intersection(seen).is_empty() {
                return Err(Error::NotArboral("blocks must partition the label set".into()));
            }
            seen = seen.union(*b);
        }
        if seen != labels {
            return Err(Error::NotArboral("blocks must partition the label set".into()));
        }
        if p.degree() < 3 {
            return Err(Error::NotArboral(format!(
                "(i): partition {} has fewer than 3 blocks",
                p.fingerprint()
            )));
        }
    }
    // (ii): every block of size >= 2 has exactly one complementary partner
    let mut splits = BTreeSet::new();
    for (vi, p) in cov.partitions.iter().enumerate() {
        for b in p.blocks.iter().filter(|b| b.len() >= 2) {
            let comp = labels.minus(*b);
            let partners = cov
                .partitions
                .iter()
                .enumerate()
                .filter(|(wi, q)| *wi != vi && q.blocks.contains(&comp))
                .count();
            if comp.len() >= 2 && partners != 1 {
                return Err(Error::NotArboral(format!(
                    "(ii): block {b} has {partners} complementary partners"
                )));
            }
            if comp.len() >= 2 {
                let root = labels.min().unwrap();
                splits.insert(if b.contains(root) { comp } else { *b });
            }
        }
    }
    // (iii): every label is a singleton of exactly one partition
    for l in labels.iter() {
        let owners = cov
            .partitions
            .iter()
            .filter(|p| p.blocks.contains(&LabelSet::singleton(l)))
            .count();
        if owners != 1 {
            return Err(Error::NotArboral(format!(
                "(iii): label {l} has {owners} singleton owners"
            )));
        }
    }
    let tree = PhyloTree::new(labels, splits)
        .map_err(|e| Error::NotArboral(format!("inconsistent covering: {e}")))?;
    let mut back = tree.covering();
    back.partitions.sort();
    let mut given = cov.partitions.clone();
    given.sort();
    if back.partitions != given {
        return Err(Error::NotArboral("partitions do not assemble into a tree".into()));
    }
    Ok(tree)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ls(v: &[usize]) -> LabelSet {
        LabelSet::from_labels(v)
    }

    /// The caterpillar with leaves {1,2} - {3} - {4,5}.
    fn caterpillar5() -> PhyloTree {
        PhyloTree::new(LabelSet::full(5), [ls(&[3, 4, 5]), ls(&[4, 5])]).unwrap()
    }

    #[test]
    fn split_canonicalization_and_equality() {
        let t1 = PhyloTree::new(LabelSet::full(5), [ls(&[1, 2])]).unwrap();
        let t2 = PhyloTree::new(LabelSet::full(5), [ls(&[3, 4, 5])]).unwrap();
        assert_eq!(t1, t2);
        assert!(PhyloTree::new(LabelSet::full(5), [ls(&[1])]).is_err());
        assert!(PhyloTree::new(LabelSet::full(5), [ls(&[2, 3]), ls(&[3, 4])]).is_err());
    }

    #[test]
    fn meeting_points_on_the_caterpillar() {
        let t = caterpillar5();
        let adj = t.adjacency();
        let u = adj.vertex_of_leaf(1).unwrap();
        let v = adj.vertex_of_leaf(3).unwrap();
        let w = adj.vertex_of_leaf(4).unwrap();
        assert_eq!(t.meeting_point(1, 2, 3).unwrap(), u);
        assert_eq!(t.meeting_point(1, 4, 5).unwrap(), w);
        assert_eq!(t.meeting_point(1, 3, 4).unwrap(), v);
        assert_eq!(t.meeting_point(2, 3, 5).unwrap(), v);
        // exhaustive: the meeting point separates the three leaves
        for c in crate::strings::subsets_k(&[1, 2, 3, 4, 5], 3) {
            let m = t.meeting_point(c[0], c[1], c[2]).unwrap();
            let p = t.destination_partition(m).unwrap();
            let blocks: Vec<_> = c
                .iter()
                .map(|&l| p.block_containing(l).unwrap())
                .collect();
            assert!(blocks[0] != blocks[1] && blocks[1] != blocks[2] && blocks[0] != blocks[2]);
        }
        assert!(t.meeting_point(1, 1, 2).is_err());
    }

    #[test]
    fn star_destination_partition_is_singletons() {
        let t = PhyloTree::star(LabelSet::full(5)).unwrap();
        let p = t.destination_partition(0).unwrap();
        assert_eq!(p.degree(), 5);
        assert!(p.blocks.iter().all(|b| b.len() == 1));
        assert_eq!(t.meeting_point(2, 3, 5).unwrap(), 0);
    }

    #[test]
    fn two_vertex_tree_destination_partitions() {
        // u:{1,2}, v:{3,4,5}: at v the blocks are the singletons 3,4,5 and
        // the complementary block {1,2}
        let t = PhyloTree::new(LabelSet::full(5), [ls(&[1, 2])]).unwrap();
        let adj = t.adjacency();
        let v = adj.vertex_of_leaf(3).unwrap();
        let p = t.destination_partition(v).unwrap();
        assert_eq!(
            p.blocks,
            vec![ls(&[1, 2]), ls(&[3]), ls(&[4]), ls(&[5])]
        );
    }

    #[test]
    fn covering_round_trip() {
        for t in [caterpillar5(), PhyloTree::star(LabelSet::full(4)).unwrap()] {
            let cov = t.covering();
            assert_eq!(tree_of_covering(&cov).unwrap(), t);
        }
        // Fig-13-left style: u:{1,2}; v:{3,4,5}
        let t = PhyloTree::new(LabelSet::full(5), [ls(&[1, 2])]).unwrap();
        let cov = t.covering();
        let fingerprints: Vec<String> = cov.partitions.iter().map(|p| p.fingerprint()).collect();
        assert!(fingerprints.contains(&"{1}|{2}|{3,4,5}".to_string()));
        assert!(fingerprints.contains(&"{1,2}|{3}|{4}|{5}".to_string()));
        assert_eq!(tree_of_covering(&cov).unwrap(), t);
    }

    #[test]
    fn covering_axiom_errors_are_identified() {
        let t = caterpillar5();
        let mut cov = t.covering();
        cov.partitions.pop();
        let err = tree_of_covering(&cov).unwrap_err();
        assert!(matches!(err, Error::NotArboral(_)), "{err}");
        let msg = err.to_string();
        assert!(msg.contains("(ii)") || msg.contains("(iii)"), "{msg}");
    }

    #[test]
    fn clip_contract_split_examples() {
        // contract the inner edge of the one-split tree -> star
        let t = PhyloTree::new(LabelSet::full(5), [ls(&[1, 2])]).unwrap();
        let star = t.contract_edge(ls(&[1, 2])).unwrap();
        assert!(star.is_star());
        // split the star center back apart
        let again = star.split_vertex(ls(&[1, 2])).unwrap();
        assert_eq!(again, t);
        // splitting a degree-3 vertex is rejected
        let t4 = PhyloTree::new(LabelSet::full(4), [ls(&[3, 4])]).unwrap();
        assert!(t4.split_vertex(ls(&[1, 2])).is_err());
        // clipping with sibling promotion: remove 5 from the caterpillar,
        // the {4,5} cherry collapses
        let c = caterpillar5();
        let clipped = c.clip_leaf(5).unwrap();
        assert_eq!(
            clipped,
            PhyloTree::new(ls(&[1, 2, 3, 4]), [ls(&[3, 4])]).unwrap()
        );
        // clip a leaf from the star: still a star
        let s = PhyloTree::star(LabelSet::full(5)).unwrap();
        assert_eq!(s.clip_leaf(3).unwrap(), PhyloTree::star(ls(&[1, 2, 4, 5])).unwrap());
    }

    #[test]
    fn split_then_contract_is_identity() {
        let t = PhyloTree::star(LabelSet::full(6)).unwrap();
        for side in [ls(&[1, 2]), ls(&[2, 4, 6]), ls(&[3, 5])] {
            let split = t.split_vertex(side).unwrap();
            assert_eq!(split.contract_edge(side).unwrap(), t);
        }
    }

    #[test]
    fn extremal_euler_counts() {
        let t = caterpillar5();
        assert!(t.is_extremal());
        let n = t.n();
        assert_eq!(t.edge_count(), 2 * n - 3);
        assert_eq!(t.vertex_count(), 2 * n - 2);
        assert!(!PhyloTree::star(LabelSet::full(5)).unwrap().is_extremal());
    }

    #[test]
    fn delete_edge_components_of_extremal_edge() {
        let t = caterpillar5();
        // removing the {4,5} edge with endpoints: components {4}, {5}, {3}, {1,2}
        let comps = t.delete_edge_components(ls(&[4, 5]), false).unwrap();
        assert_eq!(comps, vec![ls(&[1, 2]), ls(&[3]), ls(&[4]), ls(&[5])]);
        let sides = t.delete_edge_components(ls(&[4, 5]), true).unwrap();
        assert_eq!(sides, vec![ls(&[4, 5]), ls(&[1, 2, 3])]);
    }

    #[test]
    fn skeleton_of_caterpillar_is_a_path() {
        let sk = caterpillar5().skeleton();
        assert_eq!(sk.vertices, 3);
        assert_eq!(sk.edges.len(), 2);
    }

    #[test]
    fn splits_recomputed_from_adjacency_match() {
        // split-set congruence: rebuild each edited tree from its covering
        let t = caterpillar5();
        for edit in [
            t.clip_leaf(2).unwrap(),
            t.contract_edge(ls(&[4, 5])).unwrap(),
            t.split_vertex(ls(&[1, 2])).err().map(|_| t.clone()).unwrap_or(t.clone()),
        ] {
            assert_eq!(tree_of_covering(&edit.covering()).unwrap(), edit);
        }
    }

    #[test]
    fn dot_output_is_deterministic() {
        let t = caterpillar5();
        assert_eq!(t.to_dot(), t.to_dot());
        assert!(t.to_dot().contains("shape=box"));
    }
}
