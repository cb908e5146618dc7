//! Charts at extremal strings: the open neighborhood of an extremal string,
//! its edge quadruples, the chart map into `(K*)^{n-3}` and its inverse.
//!
//! The inverse rests on evaluating arbitrary cross-ratios from the edge
//! cross-ratio values alone. Two recursions drive this: quadruples whose
//! minimal subtree has a long bridge are decomposed edge by edge through the
//! triple product formula, and quadruples with non-minimal labels are pushed
//! down to a clipped tree whose edge values are computed first. Numerators
//! and denominators are checked along the way; an indeterminate form means
//! the values lie outside the chart image.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::rc::Rc;

use crate::bridge::{ordered_quads, tree_of_string};
use crate::error::{Error, Result};
use crate::field::{rat, Field, Rat};
use crate::p1::{cross_ratio_points, CrossRatioValue, P1};
use crate::phylo::{Adjacency, LabelSet, PhyloTree};
use crate::strings::{GonString, Quad, StringVerdict, Triple};

/// Whether a string is extremal. The four characterizations (tree degrees,
/// edge/vertex counts, three distinct entries per component, all cross-ratios
/// special) are evaluated together and must agree.
pub fn is_extremal<K: Field>(xx: &GonString<K>) -> Result<bool> {
    let tree = tree_of_string(xx)?;
    let n = xx.n();
    let by_degrees = tree.is_extremal();
    let by_counts = tree.edge_count() == 2 * n - 3 && tree.vertex_count() == 2 * n - 2;
    let by_entries = xx.components().all(|(_, g)| g.distinct_count() == 3);
    let by_values = ordered_quads(xx.labels())
        .iter()
        .all(|q| xx.cross_ratio(q).unwrap().is_special());
    assert!(
        by_degrees == by_counts && by_counts == by_entries && by_entries == by_values,
        "extremality criteria disagree"
    );
    Ok(by_degrees)
}

/// Whether `yy` lies in the chart neighborhood of the extremal string `xx`:
/// every cross-ratio of `yy` is non-special or agrees with the one of `xx`.
pub fn in_neighborhood<K: Field>(xx: &GonString<K>, yy: &GonString<K>) -> Result<bool> {
    if !is_extremal(xx)? {
        return Err(Error::NotExtremal);
    }
    if yy.validate() != StringVerdict::InY {
        return Err(Error::NotInY);
    }
    if xx.labels() != yy.labels() {
        return Err(Error::InvalidInput("label sets differ".into()));
    }
    for q in ordered_quads(xx.labels()) {
        let cy = yy.cross_ratio(&q)?;
        if cy.is_special() && cy != xx.cross_ratio(&q)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One chart coordinate: an inner edge, the recorded quadruple of the four
/// component-minimal labels, ordered so that the extremal string's value is 1
/// (lexicographically smallest such ordering).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeQuad {
    pub split: LabelSet,
    pub quad: Quad,
}

/// The ordered list of edge quadruples of an extremal string, one per inner
/// edge in canonical split order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeQuadruples {
    pub edges: Vec<EdgeQuad>,
}

impl EdgeQuadruples {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// The four component-minimal labels across an inner edge, ordered with the
/// overall smallest label first, its same-side partner second, then the far
/// side ascending; the split separates the first pair from the second.
fn edge_quad_for(tree: &PhyloTree, split: LabelSet) -> Quad {
    let comps = tree
        .delete_edge_components(split, false)
        .expect("split is an inner edge");
    assert_eq!(comps.len(), 4, "extremal edge has four components");
    let mut near: Vec<usize> = Vec::new();
    let mut far: Vec<usize> = Vec::new();
    for c in comps {
        let m = c.min().unwrap();
        if c.is_subset(split) {
            near.push(m);
        } else {
            far.push(m);
        }
    }
    near.sort_unstable();
    far.sort_unstable();
    if far[0] < near[0] {
        std::mem::swap(&mut near, &mut far);
    }
    Quad([near[0], near[1], far[0], far[1]])
}

/// Edge quadruples of an extremal string.
pub fn edge_quadruples<K: Field>(xx: &GonString<K>) -> Result<EdgeQuadruples> {
    if !is_extremal(xx)? {
        return Err(Error::NotExtremal);
    }
    let tree = tree_of_string(xx)?;
    let mut edges = Vec::new();
    for split in tree.splits() {
        let quad = edge_quad_for(&tree, *split);
        debug_assert!(xx.cross_ratio(&quad)?.is_one());
        edges.push(EdgeQuad { split: *split, quad });
    }
    Ok(EdgeQuadruples { edges })
}

/// A point of the chart: one value per inner edge, in the order of
/// [`EdgeQuadruples`]. Values live in `K*`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartImage<K: Field> {
    pub values: Vec<K>,
}

/// The six functions through which a cross-ratio transforms under
/// permutations of its quadruple: c, 1/c, 1-c, 1/(1-c), (c-1)/c, c/(c-1).
/// All are total on P¹.
fn six_apply<K: Field>(idx: usize, v: &P1<K>) -> P1<K> {
    match idx {
        0 => v.clone(),
        1 => v.recip(),
        2 => v.one_minus(),
        3 => v.one_minus().recip(),
        4 => v.recip().one_minus(),
        5 => v.recip().one_minus().recip(),
        _ => unreachable!(),
    }
}

/// Transports the value of the cross-ratio at one ordering of four labels to
/// another ordering of the same labels, by identifying the six-group element
/// on a generic test configuration.
fn transport<K: Field>(from: &Quad, value: &P1<K>, to: &Quad) -> P1<K> {
    debug_assert_eq!(from.labels_sorted(), to.labels_sorted());
    if from == to {
        return value.clone();
    }
    let sorted = from.labels_sorted();
    // generic test points: the cross-ratio orbit of (0,1,4,9) has six
    // distinct values
    let test = |l: usize| -> P1<Rat> {
        let vals = [0i64, 1, 4, 9];
        let i = sorted.iter().position(|x| *x == l).unwrap();
        P1::Finite(rat(vals[i], 1))
    };
    let cr = |q: &Quad| -> P1<Rat> {
        match cross_ratio_points(&test(q.0[0]), &test(q.0[1]), &test(q.0[2]), &test(q.0[3])) {
            CrossRatioValue::Value(v) => v,
            CrossRatioValue::Undefined => unreachable!("test points are distinct"),
        }
    };
    let base = cr(from);
    let target = cr(to);
    for idx in 0..6 {
        if six_apply(idx, &base) == target {
            return six_apply(idx, value);
        }
    }
    unreachable!("the six-group acts transitively on orderings");
}

/// Evaluation context for cross-ratios on a chart: a tree with one recorded
/// quadruple and value per inner edge. Clipped sub-contexts are cached.
pub struct ChartContext<K: Field> {
    tree: PhyloTree,
    adj: Adjacency,
    edges: Vec<(LabelSet, Quad, P1<K>)>,
    memo: RefCell<BTreeMap<Quad, P1<K>>>,
    active: RefCell<BTreeSet<Quad>>,
    clipped: RefCell<BTreeMap<usize, Rc<ChartContext<K>>>>,
}

impl<K: Field> ChartContext<K> {
    /// Context over an extremal tree with the given chart values, indexed by
    /// canonical split order.
    pub fn new(tree: &PhyloTree, values: &[K]) -> Result<Self> {
        if !tree.is_extremal() {
            return Err(Error::NotExtremal);
        }
        if values.len() != tree.inner_edge_count() {
            return Err(Error::ChartArity {
                expected: tree.inner_edge_count(),
                got: values.len(),
            });
        }
        let mut edges = Vec::new();
        for (split, v) in tree.splits().iter().zip(values) {
            if v.is_zero() {
                return Err(Error::ChartValueSpecial(v.to_string()));
            }
            edges.push((*split, edge_quad_for(tree, *split), P1::Finite(v.clone())));
        }
        Ok(Self::from_edges(tree.clone(), edges))
    }

    fn from_edges(tree: PhyloTree, edges: Vec<(LabelSet, Quad, P1<K>)>) -> Self {
        let adj = tree.adjacency();
        ChartContext {
            tree,
            adj,
            edges,
            memo: RefCell::new(BTreeMap::new()),
            active: RefCell::new(BTreeSet::new()),
            clipped: RefCell::new(BTreeMap::new()),
        }
    }

    /// The value of the cross-ratio at `q` on the string encoded by the
    /// chart values.
    pub fn eval(&self, q: &Quad) -> Result<P1<K>> {
        for l in q.0 {
            if !self.tree.labels().contains(l) {
                return Err(Error::LabelOutOfRange(l));
            }
        }
        if let Some(v) = self.memo.borrow().get(q) {
            return Ok(v.clone());
        }
        assert!(
            self.active.borrow_mut().insert(*q),
            "cyclic cross-ratio dependency at {q}"
        );
        let out = self.compute(q);
        self.active.borrow_mut().remove(q);
        if let Ok(v) = &out {
            self.memo.borrow_mut().insert(*q, v.clone());
        }
        out
    }

    fn compute(&self, q: &Quad) -> Result<P1<K>> {
        // edge quadruple label sets resolve by pure six-group transport
        for (_, eq, val) in &self.edges {
            if eq.labels_sorted() == q.labels_sorted() {
                return Ok(transport(eq, val, q));
            }
        }
        // normalize to the separated pairing with ascending sides, smallest
        // side first
        let rep = self.separated_rep(q);
        if rep != *q {
            let v = self.eval(&rep)?;
            return Ok(transport(&rep, &v, q));
        }
        let v = self.compute_separated(q)?;
        // on the chart image every separated value lies in K*; 0 or inf here
        // is the vanishing of a numerator or denominator polynomial
        if v.is_zero() || v.is_inf() {
            return Err(Error::ChartDomain(format!(
                "separated cross-ratio {q} evaluates to {v}"
            )));
        }
        Ok(v)
    }

    /// The canonical ordering of the labels of `q` whose first two entries
    /// are separated from the last two by an inner edge.
    fn separated_rep(&self, q: &Quad) -> Quad {
        let s = q.labels_sorted();
        let pairings = [
            [s[0], s[1], s[2], s[3]],
            [s[0], s[2], s[1], s[3]],
            [s[0], s[3], s[1], s[2]],
        ];
        for p in pairings {
            if crate::bridge::separates(&self.tree, &Quad(p)) {
                return Quad(p);
            }
        }
        unreachable!("one pairing of any quadruple is separated in an extremal tree")
    }

    fn compute_separated(&self, q: &Quad) -> Result<P1<K>> {
        let [a, b, c, d] = q.0;
        let v = self.tree.meeting_point(a, b, c).unwrap();
        let w = self.tree.meeting_point(c, d, a).unwrap();
        let bridge = self.path(v, w);
        let part_v = &self.adj.partitions[v];
        let part_w = &self.adj.partitions[w];
        let comps = [
            part_v.block_containing(a).unwrap(),
            part_v.block_containing(b).unwrap(),
            part_w.block_containing(c).unwrap(),
            part_w.block_containing(d).unwrap(),
        ];
        let mins = [
            comps[0].min().unwrap(),
            comps[1].min().unwrap(),
            comps[2].min().unwrap(),
            comps[3].min().unwrap(),
        ];
        let minimal = mins == q.0;
        let b_len = bridge.len() - 1;
        debug_assert!(b_len >= 1);

        if !minimal {
            if b_len == 1 {
                return self.shift_step(q, &mins);
            }
            return self.eval_on_clipped(q);
        }
        // minimal with a long bridge: contract the hanging parts to their
        // minimal labels, then peel the bridge via the triple product
        if self.is_quad_caterpillar(&bridge, &comps) {
            self.peel(q, &bridge)
        } else {
            self.contract_and_eval(q, &bridge)
        }
    }

    /// Inner-vertex path from `v` to `w`.
    fn path(&self, v: usize, w: usize) -> Vec<usize> {
        let mut prev = vec![usize::MAX; self.adj.neighbors.len()];
        let mut queue = std::collections::VecDeque::from([v]);
        prev[v] = v;
        while let Some(x) = queue.pop_front() {
            if x == w {
                break;
            }
            for &y in &self.adj.neighbors[x] {
                if prev[y] == usize::MAX {
                    prev[y] = x;
                    queue.push_back(y);
                }
            }
        }
        let mut path = vec![w];
        let mut cur = w;
        while cur != v {
            cur = prev[cur];
            path.push(cur);
        }
        path.reverse();
        path
    }

    /// The hanging block of a degree-3 bridge vertex `u` with bridge
    /// neighbors `before` and `after`.
    fn third_block(&self, u: usize, before: usize, after: usize) -> LabelSet {
        let part = &self.adj.partitions[u];
        let toward = |other: usize| -> LabelSet {
            let cu = self.adj.clusters[u];
            let co = self.adj.clusters[other];
            if co.is_subset(cu) && co != cu {
                co
            } else {
                self.tree.labels().minus(cu)
            }
        };
        let b1 = toward(before);
        let b2 = toward(after);
        *part
            .blocks
            .iter()
            .find(|b| **b != b1 && **b != b2)
            .expect("degree-3 bridge vertex has one hanging block")
    }

    fn is_quad_caterpillar(&self, bridge: &[usize], comps: &[LabelSet; 4]) -> bool {
        comps.iter().all(|c| c.len() == 1)
            && bridge
                .windows(3)
                .all(|t| self.third_block(t[1], t[0], t[2]).len() == 1)
    }

    /// Triple product peel: with k the minimal label hanging at the bridge
    /// vertex next to the far junction, 1 - [a b c d] factors as
    /// (1 - [a b c k])(1 - [a k c d]).
    fn peel(&self, q: &Quad, bridge: &[usize]) -> Result<P1<K>> {
        let [a, b, c, d] = q.0;
        let u = bridge[bridge.len() - 2];
        let k = self
            .third_block(u, bridge[bridge.len() - 3], bridge[bridge.len() - 1])
            .min()
            .unwrap();
        let x1 = self.eval(&Quad([a, b, c, k]))?;
        let x2 = self.eval(&Quad([a, k, c, d]))?;
        let prod = x1
            .one_minus()
            .mul(&x2.one_minus())
            .ok_or_else(|| Error::ChartDomain(format!("indeterminate product at {q}")))?;
        Ok(prod.one_minus())
    }

    /// Replaces the four hanging components and the hanging parts at the
    /// bridge vertices by their minimal labels. The bridge edges keep their
    /// recorded quadruples and values: component minima are unchanged.
    fn contract_and_eval(&self, q: &Quad, bridge: &[usize]) -> Result<P1<K>> {
        let [a, b, c, d] = q.0;
        let mut labels = LabelSet::from_labels(&[a, b, c, d]);
        let mut ks = Vec::new();
        for t in bridge.windows(3) {
            let k = self.third_block(t[1], t[0], t[2]).min().unwrap();
            ks.push(k);
            labels = labels.with(k);
        }
        // splits of the caterpillar: the far part of each bridge edge
        let mut splits = Vec::new();
        let mut sub_edges = Vec::new();
        for (r, pair) in bridge.windows(2).enumerate() {
            let mut far = LabelSet::from_labels(&[c, d]);
            for k in &ks[r..] {
                far = far.with(*k);
            }
            splits.push(far);
            let orig_split = self.edge_split(pair[0], pair[1]);
            let (_, eq, val) = self
                .edges
                .iter()
                .find(|(s, _, _)| *s == orig_split)
                .expect("bridge edges carry chart values");
            assert!(
                LabelSet::from_labels(&eq.0).is_subset(labels),
                "edge quadruple labels survive the contraction"
            );
            sub_edges.push((far, *eq, val.clone()));
        }
        let tree = PhyloTree::new(labels, splits).expect("caterpillar is a valid tree");
        // re-key by the sub-tree's canonical split sides
        let mut by_split: BTreeMap<LabelSet, (Quad, P1<K>)> = BTreeMap::new();
        for (s, eq, val) in sub_edges {
            let canon = if s.contains(labels.min().unwrap()) {
                labels.minus(s)
            } else {
                s
            };
            by_split.insert(canon, (eq, val));
        }
        let edges = tree
            .splits()
            .iter()
            .map(|s| {
                let (eq, val) = by_split[s].clone();
                (*s, eq, val)
            })
            .collect();
        let sub = ChartContext::from_edges(tree, edges);
        sub.eval(q)
    }

    /// Canonical split side of the edge between adjacent inner vertices.
    fn edge_split(&self, x: usize, y: usize) -> LabelSet {
        let cx = self.adj.clusters[x];
        let cy = self.adj.clusters[y];
        if cx.is_subset(cy) {
            cx
        } else {
            cy
        }
    }

    /// One label of a single-edge quadruple is not the minimum of its
    /// component: rewrite [p q r x] = [p q r m]·[p q m x] with m that
    /// minimum, after moving the shifted slot last among the four
    /// value-preserving orderings.
    fn shift_step(&self, q: &Quad, mins: &[usize; 4]) -> Result<P1<K>> {
        let [a, b, c, d] = q.0;
        let same_value = [
            ([a, b, c, d], 3usize),
            ([b, a, d, c], 2),
            ([c, d, a, b], 1),
            ([d, c, b, a], 0),
        ];
        let (ord, slot) = same_value
            .iter()
            .find(|(_, slot)| q.0[*slot] != mins[*slot])
            .map(|(o, s)| (*o, *s))
            .expect("some slot is shifted");
        let m = mins[slot];
        let [p1, p2, p3, x] = ord;
        let term1 = self.eval(&Quad([p1, p2, p3, m]))?;
        let term2 = self.eval_on_clipped(&Quad([p1, p2, m, x]))?;
        term1
            .mul(&term2)
            .ok_or_else(|| Error::ChartDomain(format!("indeterminate product at {q}")))
    }

    /// Evaluates on the tree with the largest label outside `q` clipped off;
    /// the clipped tree's edge values are computed in the current context
    /// first.
    fn eval_on_clipped(&self, q: &Quad) -> Result<P1<K>> {
        let a = self
            .tree
            .labels()
            .minus(LabelSet::from_labels(&q.0))
            .max()
            .expect("a non-edge quadruple leaves at least one label free");
        let cached = self.clipped.borrow().get(&a).cloned();
        let sub = match cached {
            Some(s) => s,
            None => {
                let tree = self.tree.clip_leaf(a).expect("extremal trees stay clippable");
                let mut edges = Vec::new();
                for split in tree.splits() {
                    let eq = edge_quad_for(&tree, *split);
                    let val = self.eval(&eq)?;
                    edges.push((*split, eq, val));
                }
                let ctx = Rc::new(ChartContext::from_edges(tree, edges));
                self.clipped.borrow_mut().insert(a, ctx.clone());
                ctx
            }
        };
        sub.eval(q)
    }
}

/// Evaluates the cross-ratio at `q` of the string with chart coordinates
/// `values` on the extremal tree, via the bridge and projection recursions.
pub fn cc_from_edge_values<K: Field>(tree: &PhyloTree, q: &Quad, values: &[K]) -> Result<P1<K>> {
    ChartContext::new(tree, values)?.eval(q)
}

/// The chart map at an extremal string: the vector of cross-ratio values of
/// `yy` at the recorded edge quadruples.
pub fn chart_forward<K: Field>(xx: &GonString<K>, yy: &GonString<K>) -> Result<ChartImage<K>> {
    if !in_neighborhood(xx, yy)? {
        return Err(Error::OutsideNeighborhood);
    }
    let eq = edge_quadruples(xx)?;
    let mut values = Vec::with_capacity(eq.edges.len());
    for e in &eq.edges {
        match yy.cross_ratio(&e.quad)? {
            P1::Finite(v) if !v.is_zero() => values.push(v),
            other => unreachable!("neighborhood values lie in K*, got {other}"),
        }
    }
    Ok(ChartImage { values })
}

/// The inverse chart map: reconstructs the string whose edge cross-ratios
/// are the given values, entry by entry through the cross-ratio identity
/// `x^t_l = cc_(i,k,l,j)`. Values outside the chart image raise a domain
/// error.
pub fn chart_inverse<K: Field>(xx: &GonString<K>, image: &ChartImage<K>) -> Result<GonString<K>> {
    if !is_extremal(xx)? {
        return Err(Error::NotExtremal);
    }
    let tree = tree_of_string(xx)?;
    let ctx = ChartContext::new(&tree, &image.values)?;
    let labels: Vec<usize> = xx.labels().to_vec();
    let mut gons = BTreeMap::new();
    for t in crate::strings::subsets_k(&labels, 3) {
        let [i, j, k] = [t[0], t[1], t[2]];
        let mut entries = vec![P1::zero(); labels.len()];
        for (pos, &l) in labels.iter().enumerate() {
            entries[pos] = if l == i {
                P1::zero()
            } else if l == j {
                P1::one()
            } else if l == k {
                P1::Inf
            } else {
                ctx.eval(&Quad([i, k, l, j]))?
            };
        }
        gons.insert(
            Triple([i, j, k]),
            crate::strings::NGon::new(entries).unwrap(),
        );
    }
    let yy = GonString::new(labels, gons).unwrap();
    debug_assert_eq!(yy.validate(), StringVerdict::InY);
    Ok(yy)
}
