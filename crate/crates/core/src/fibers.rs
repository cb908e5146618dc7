//! Fibers of the forgetful projection as stable curves.
//!
//! Dropping all data involving one label projects strings with n+1 labels to
//! strings with n labels. Over a base string the fiber is a union of lines
//! indexed by the inner vertices of its tree, one coordinate per vertex
//! after choosing a defining triple for each; the n sections place marked
//! points on these lines, and the marked fiber is a stable curve whose
//! augmented dual graph is the tree of the base string. The reverse
//! direction reads a string off a stable curve through median components.

use std::collections::{BTreeMap, BTreeSet};

use crate::bridge::tree_of_string;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::p1::{cross_ratio_points, CrossRatioValue, Moebius, P1};
use crate::phylo::{
    tree_of_covering, Adjacency, ArboralCovering, DestinationPartition, LabelSet, PhyloTree,
};
use crate::strings::{
    distinguished_representative_ordered, subsets_k, GonString, NGon, StringVerdict, Triple,
};

/// Forgets the label `a`: drops the components whose triple involves `a` and
/// the `a`-entry of the remaining ones.
pub fn project<K: Field>(yy: &GonString<K>, a: usize) -> Result<GonString<K>> {
    let pos = yy.pos(a)?;
    if yy.n() < 4 {
        return Err(Error::TooFewEntries(yy.n() - 1));
    }
    if yy.validate() != StringVerdict::InY {
        return Err(Error::NotInY);
    }
    let labels: Vec<usize> = yy.labels().iter().copied().filter(|l| *l != a).collect();
    let mut gons = BTreeMap::new();
    for (t, gon) in yy.components() {
        if t.contains(a) {
            continue;
        }
        let mut entries = gon.entries().to_vec();
        entries.remove(pos);
        gons.insert(*t, NGon::new(entries).unwrap());
    }
    let xx = GonString::new(labels, gons).unwrap();
    debug_assert_eq!(xx.validate(), StringVerdict::InY);
    Ok(xx)
}

/// The lexicographically smallest triple defining each inner vertex, in
/// canonical vertex order.
fn default_triples(tree: &PhyloTree, adj: &Adjacency) -> Vec<[usize; 3]> {
    let labels: Vec<usize> = tree.labels().to_vec();
    let mut out = vec![[0usize; 3]; adj.clusters.len()];
    let mut remaining = adj.clusters.len();
    for t in subsets_k(&labels, 3) {
        let v = tree.meeting_point(t[0], t[1], t[2]).unwrap();
        if out[v] == [0, 0, 0] {
            out[v] = [t[0], t[1], t[2]];
            remaining -= 1;
            if remaining == 0 {
                break;
            }
        }
    }
    debug_assert_eq!(remaining, 0);
    out
}

/// A point of the ambient product of lines, one coordinate per inner vertex.
pub type FiberPoint<K> = Vec<P1<K>>;

/// One defining equation of the fiber, attached to an inner edge: the
/// product form (y^v - delta)(y^w - epsilon) = 0 in the chosen coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberEquation<K: Field> {
    pub edge: (usize, usize),
    pub delta: P1<K>,
    pub epsilon: P1<K>,
}

/// A component of the fiber: the line where the `vertex` coordinate ranges
/// over P¹ and every other coordinate is frozen.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberComponent<K: Field> {
    pub vertex: usize,
    pub pins: BTreeMap<usize, P1<K>>,
}

impl<K: Field> FiberComponent<K> {
    /// Whether a point lies on the component.
    pub fn contains(&self, point: &FiberPoint<K>) -> bool {
        self.pins.iter().all(|(w, v)| &point[*w] == v)
    }
}

/// The fiber of the projection over a string, realized as lines in the
/// product of one P¹ per inner vertex of the tree, together with the
/// defining equations, the intersection points and the dual graph.
pub struct FiberCurve<K: Field> {
    pub base: GonString<K>,
    pub new_label: usize,
    pub tree: PhyloTree,
    /// Ordered defining triple per vertex: the representative takes the
    /// values 0, 1, ∞ at these labels in this order.
    pub triples: Vec<[usize; 3]>,
    /// The representative n-gon of each vertex in its chosen normalization.
    pub reps: Vec<NGon<K>>,
    pub equations: Vec<FiberEquation<K>>,
    pub components: Vec<FiberComponent<K>>,
    pub nodes: BTreeMap<(usize, usize), FiberPoint<K>>,
}

impl<K: Field> FiberCurve<K> {
    pub fn dimension(&self) -> usize {
        self.components.len()
    }

    /// Dual graph of the components, as edges between vertex indices.
    pub fn dual_edges(&self) -> BTreeSet<(usize, usize)> {
        self.nodes.keys().copied().collect()
    }

    /// The marked point of the section for label `p`: coordinates
    /// `z^v_p = x^{t_v}_p`, carried by the component of the vertex owning
    /// the leaf `p`.
    pub fn section_point(&self, p: usize) -> Result<SectionPoint<K>> {
        let pos = self.base.pos(p)?;
        let adj = self.tree.adjacency();
        let vertex = adj.vertex_of_leaf(p).ok_or(Error::LabelOutOfRange(p))?;
        let coords: FiberPoint<K> = self.reps.iter().map(|g| g.entries()[pos].clone()).collect();
        assert!(
            self.components[vertex].contains(&coords),
            "section {p} lies on the component of its leaf vertex"
        );
        for node in self.nodes.values() {
            assert!(&coords != node, "section {p} avoids the nodes");
        }
        Ok(SectionPoint {
            label: p,
            vertex,
            coords,
        })
    }
}

/// A section value: the marked point for one label.
#[derive(Clone, Debug, PartialEq)]
pub struct SectionPoint<K: Field> {
    pub label: usize,
    pub vertex: usize,
    pub coords: FiberPoint<K>,
}

/// The section point of `xx` at label `p`, with the default triple choices.
pub fn section_point<K: Field>(xx: &GonString<K>, p: usize) -> Result<SectionPoint<K>> {
    let a = xx.labels().iter().max().unwrap() + 1;
    fiber(xx, a)?.section_point(p)
}

/// The fiber over `xx` with the label `a` added, using the lexicographically
/// smallest defining triples.
pub fn fiber<K: Field>(xx: &GonString<K>, a: usize) -> Result<FiberCurve<K>> {
    fiber_with_triples(xx, a, &BTreeMap::new())
}

/// The fiber with explicit ordered defining triples for some vertices
/// (by canonical vertex index); unspecified vertices get the
/// lexicographically smallest triple.
pub fn fiber_with_triples<K: Field>(
    xx: &GonString<K>,
    a: usize,
    choices: &BTreeMap<usize, [usize; 3]>,
) -> Result<FiberCurve<K>> {
    if xx.labels().contains(&a) {
        return Err(Error::InvalidInput(format!("label {a} already present")));
    }
    let tree = tree_of_string(xx)?;
    let adj = tree.adjacency();
    let mut triples = default_triples(&tree, &adj);
    for (v, t) in choices {
        if *v >= triples.len() {
            return Err(Error::InvalidInput(format!("no vertex {v}")));
        }
        let m = tree.meeting_point(t[0], t[1], t[2])?;
        if m != *v {
            return Err(Error::InvalidInput(format!(
                "triple {},{},{} does not define vertex {v}",
                t[0], t[1], t[2]
            )));
        }
        triples[*v] = *t;
    }

    // representative per vertex, normalized at its ordered triple
    let mut reps: Vec<NGon<K>> = Vec::with_capacity(triples.len());
    for t in &triples {
        let mut sorted = *t;
        sorted.sort_unstable();
        let comp = xx.component(&Triple(sorted))?;
        let positions = [
            xx.pos(t[0]).unwrap() + 1,
            xx.pos(t[1]).unwrap() + 1,
            xx.pos(t[2]).unwrap() + 1,
        ];
        reps.push(distinguished_representative_ordered(comp, positions)?);
    }

    // frozen coordinate of vertex w on the component of vertex v: the value
    // of the new entry when the extra leaf hangs in w's block toward v
    let pin = |w: usize, v: usize| -> P1<K> {
        let block = block_toward(&tree, &adj, w, v);
        let m = block.min().unwrap();
        reps[w].entries()[xx.pos(m).unwrap()].clone()
    };

    // equations per inner edge, in the chosen coordinates
    let mut equations = Vec::new();
    for (v, ns) in adj.neighbors.iter().enumerate() {
        for &w in ns {
            if v < w {
                let (delta, epsilon) = pair_equation(xx, &tree, &adj, &reps, &triples, v, w)?;
                // the Möbius route and the incidence value agree
                debug_assert_eq!(delta, pin(v, w));
                debug_assert_eq!(epsilon, pin(w, v));
                equations.push(FiberEquation {
                    edge: (v, w),
                    delta,
                    epsilon,
                });
            }
        }
    }

    let d = triples.len();
    let mut components = Vec::with_capacity(d);
    for v in 0..d {
        let pins: BTreeMap<usize, P1<K>> =
            (0..d).filter(|w| *w != v).map(|w| (w, pin(w, v))).collect();
        components.push(FiberComponent { vertex: v, pins });
    }
    // every component satisfies every edge equation
    for eq in &equations {
        for c in &components {
            let on_v = c.pins.get(&eq.edge.0).map(|p| *p == eq.delta).unwrap_or(true);
            let on_w = c.pins.get(&eq.edge.1).map(|p| *p == eq.epsilon).unwrap_or(true);
            assert!(on_v || on_w, "component satisfies the edge equations");
        }
    }

    // intersections: adjacent components meet in one point, others not
    let mut nodes = BTreeMap::new();
    for v in 0..d {
        for w in v + 1..d {
            let adjacent = adj.neighbors[v].contains(&w);
            let mut point: FiberPoint<K> = Vec::with_capacity(d);
            let mut consistent = true;
            for u in 0..d {
                let from_v = if u == v {
                    components[w].pins[&v].clone()
                } else {
                    components[v].pins[&u].clone()
                };
                let from_w = if u == w {
                    components[v].pins[&w].clone()
                } else {
                    components[w].pins[&u].clone()
                };
                if from_v != from_w {
                    consistent = false;
                    break;
                }
                point.push(from_v);
            }
            assert_eq!(adjacent, consistent, "dual graph equals the skeleton");
            if consistent {
                nodes.insert((v, w), point);
            }
        }
    }
    let skeleton = tree.skeleton();
    let dual: BTreeSet<(usize, usize)> = nodes.keys().copied().collect();
    assert_eq!(dual, skeleton.edges);
    assert_eq!(nodes.len() + 1, d);

    Ok(FiberCurve {
        base: xx.clone(),
        new_label: a,
        tree,
        triples,
        reps,
        equations,
        components,
        nodes,
    })
}

/// Destination block of vertex `w` in the direction of vertex `v`.
fn block_toward(tree: &PhyloTree, adj: &Adjacency, w: usize, v: usize) -> LabelSet {
    assert_ne!(w, v);
    // first step of the path from w to v
    let mut prev = vec![usize::MAX; adj.neighbors.len()];
    let mut queue = std::collections::VecDeque::from([v]);
    prev[v] = v;
    while let Some(x) = queue.pop_front() {
        for &y in &adj.neighbors[x] {
            if prev[y] == usize::MAX {
                prev[y] = x;
                queue.push_back(y);
            }
        }
    }
    let step = prev[w];
    let cw = adj.clusters[w];
    let cs = adj.clusters[step];
    if cs.is_subset(cw) && cs != cw {
        cs
    } else {
        tree.labels().minus(cw)
    }
}

/// The equation constants for a pair of vertices: the two preferred triples
/// of the normal form (first entries opposite across the path), then the
/// birational change to the chosen triples carried out by transition Möbius
/// maps. Works for non-adjacent pairs as well, yielding the induced
/// (redundant) equation.
fn pair_equation<K: Field>(
    xx: &GonString<K>,
    tree: &PhyloTree,
    adj: &Adjacency,
    reps: &[NGon<K>],
    triples: &[[usize; 3]],
    v: usize,
    w: usize,
) -> Result<(P1<K>, P1<K>)> {
    // i, l beyond w seen from v; j, k beyond v seen from w
    let toward_w = block_toward(tree, adj, v, w);
    let toward_v = block_toward(tree, adj, w, v);
    let w_blocks: Vec<LabelSet> = adj.partitions[w]
        .blocks
        .iter()
        .copied()
        .filter(|b| *b != toward_v)
        .collect();
    let v_blocks: Vec<LabelSet> = adj.partitions[v]
        .blocks
        .iter()
        .copied()
        .filter(|b| *b != toward_w)
        .collect();
    let i = w_blocks[0].min().unwrap();
    let l = w_blocks[1].min().unwrap();
    let j = v_blocks[0].min().unwrap();
    let k = v_blocks[1].min().unwrap();

    // preferred representatives: s = (i,j,k) at v, t = (j,i,l) at w; in both
    // the new entry vanishes on the far side, giving y^s_a y^t_a = 0
    let rep_pref = |vertex: usize, ordered: [usize; 3]| -> Result<NGon<K>> {
        let mut sorted = ordered;
        sorted.sort_unstable();
        let comp = xx.component(&Triple(sorted))?;
        debug_assert_eq!(tree.meeting_point(ordered[0], ordered[1], ordered[2])?, vertex);
        distinguished_representative_ordered(
            comp,
            [
                xx.pos(ordered[0])? + 1,
                xx.pos(ordered[1])? + 1,
                xx.pos(ordered[2])? + 1,
            ],
        )
    };
    let s_gon = rep_pref(v, [i, j, k])?;
    let t_gon = rep_pref(w, [j, i, l])?;

    // the transition Möbius taking the preferred representative to the
    // chosen one maps the preferred zero to the equation constant
    let transition_zero = |gon: &NGon<K>, vertex: usize| -> Result<P1<K>> {
        let chosen = triples[vertex];
        let m = Moebius::from_triple(
            gon.entry(xx.pos(chosen[0])? + 1),
            gon.entry(xx.pos(chosen[1])? + 1),
            gon.entry(xx.pos(chosen[2])? + 1),
        )?;
        debug_assert_eq!(gon.apply(&m), reps[vertex]);
        Ok(m.apply(&P1::zero()))
    };
    let delta = transition_zero(&s_gon, v)?;
    let epsilon = transition_zero(&t_gon, w)?;
    Ok((delta, epsilon))
}

/// The lifted string of the section for label `p`: all components gain the
/// entry `x^t_p` at the new label, and the components whose triple involves
/// the new label are recovered entrywise from the cross-ratio identity.
pub fn section_lift<K: Field>(xx: &GonString<K>, p: usize, a: usize) -> Result<GonString<K>> {
    xx.pos(p)?;
    if xx.labels().contains(&a) {
        return Err(Error::InvalidInput(format!("label {a} already present")));
    }
    if xx.validate() != StringVerdict::InY {
        return Err(Error::NotInY);
    }
    let mut labels: Vec<usize> = xx.labels().to_vec();
    labels.push(a);
    labels.sort_unstable();
    let apos = labels.binary_search(&a).unwrap();

    let mut gons = BTreeMap::new();
    // triples without the new label: append the entry of p
    for (t, gon) in xx.components() {
        let mut entries = gon.entries().to_vec();
        let val = gon.entries()[xx.pos(p).unwrap()].clone();
        entries.insert(apos, val);
        gons.insert(*t, NGon::new(entries).unwrap());
    }
    // triples (i, j, a): entries from the common cross-ratio c = cc_(i,j,k,a)
    // solved as z = c/(c-1)
    for pair in subsets_k(xx.labels(), 2) {
        let (i, j) = (pair[0], pair[1]);
        let t = Triple::new(i, j, a).unwrap();
        let mut entries = vec![P1::zero(); labels.len()];
        for (pos, &lab) in labels.iter().enumerate() {
            entries[pos] = if lab == i {
                P1::zero()
            } else if lab == j {
                P1::one()
            } else if lab == a {
                P1::Inf
            } else {
                let k = lab;
                let mut skt = [i, j, k];
                skt.sort_unstable();
                let donor = gons.get(&Triple(skt)).unwrap();
                let pick = |l: usize| &donor.entries()[labels.binary_search(&l).unwrap()];
                let c = match cross_ratio_points(pick(i), pick(j), pick(k), pick(a)) {
                    CrossRatioValue::Value(v) => v,
                    CrossRatioValue::Undefined => unreachable!("i, j, a entries are 0, 1, inf"),
                };
                c.recip().one_minus().recip()
            };
        }
        gons.insert(t, NGon::new(entries).unwrap());
    }
    let yy = GonString::new(labels, gons).unwrap();
    debug_assert_eq!(yy.validate(), StringVerdict::InY);
    Ok(yy)
}

/// A stable curve of genus zero: components carrying a P¹ coordinate each,
/// transversal nodes between them, and marked points away from the nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct StableCurve<K: Field> {
    pub component_count: usize,
    /// (component, component, coordinate on first, coordinate on second)
    pub nodes: Vec<(usize, usize, P1<K>, P1<K>)>,
    /// label -> (component, coordinate)
    pub marks: BTreeMap<usize, (usize, P1<K>)>,
}

impl<K: Field> StableCurve<K> {
    /// Checks the stability axioms, naming the violated one.
    pub fn validate(&self) -> Result<()> {
        let m = self.component_count;
        if m == 0 {
            return Err(Error::InvalidCurve("no components".into()));
        }
        // dual graph is a tree
        if self.nodes.len() + 1 != m {
            return Err(Error::InvalidCurve(format!(
                "dual graph: {} components need {} nodes, got {}",
                m,
                m - 1,
                self.nodes.len()
            )));
        }
        let mut reach = vec![false; m];
        let mut stack = vec![0usize];
        reach[0] = true;
        while let Some(c) = stack.pop() {
            for (x, y, _, _) in &self.nodes {
                let o = if *x == c {
                    *y
                } else if *y == c {
                    *x
                } else {
                    continue;
                };
                if !reach[o] {
                    reach[o] = true;
                    stack.push(o);
                }
            }
        }
        if !reach.iter().all(|r| *r) {
            return Err(Error::InvalidCurve("dual graph is not connected".into()));
        }
        // special points per component: pairwise distinct, at least three
        for c in 0..m {
            let mut special: Vec<&P1<K>> = Vec::new();
            for (x, y, px, py) in &self.nodes {
                if *x == c {
                    special.push(px);
                }
                if *y == c {
                    special.push(py);
                }
            }
            let node_count = special.len();
            for (mc, p) in self.marks.values() {
                if *mc == c {
                    special.push(p);
                }
            }
            for i in 0..special.len() {
                for j in i + 1..special.len() {
                    if special[i] == special[j] {
                        return Err(Error::InvalidCurve(format!(
                            "special points on component {c} collide{}",
                            if i < node_count && j >= node_count {
                                " (mark on a node)"
                            } else {
                                ""
                            }
                        )));
                    }
                }
            }
            if special.len() < 3 {
                return Err(Error::InvalidCurve(format!(
                    "component {c} has {} special points, needs 3",
                    special.len()
                )));
            }
        }
        if self.marks.len() < 3 {
            return Err(Error::InvalidCurve("needs at least 3 marked points".into()));
        }
        Ok(())
    }

    /// The augmented dual graph as a phylogenetic tree, plus the map from
    /// tree vertex indices to components.
    pub fn augmented_dual_tree(&self) -> Result<(PhyloTree, Vec<usize>)> {
        self.validate()?;
        let labels = LabelSet::from_labels(&self.marks.keys().copied().collect::<Vec<_>>());
        // destination partition per component: reachable marks per node
        // direction plus own marks as singletons
        let mut partitions = Vec::new();
        for c in 0..self.component_count {
            let mut blocks: Vec<LabelSet> = Vec::new();
            for (x, y, _, _) in &self.nodes {
                let o = if *x == c {
                    *y
                } else if *y == c {
                    *x
                } else {
                    continue;
                };
                blocks.push(self.marks_beyond(c, o));
            }
            for (l, (mc, _)) in &self.marks {
                if *mc == c {
                    blocks.push(LabelSet::singleton(*l));
                }
            }
            partitions.push(DestinationPartition::new(blocks));
        }
        let cov = ArboralCovering {
            labels,
            partitions: partitions.clone(),
        };
        let tree = tree_of_covering(&cov).map_err(|e| Error::InvalidCurve(e.to_string()))?;
        let adj = tree.adjacency();
        let mut vertex_to_comp = vec![usize::MAX; self.component_count];
        for (v, part) in adj.partitions.iter().enumerate() {
            let c = partitions
                .iter()
                .position(|p| p == part)
                .expect("partitions are in bijection with components");
            vertex_to_comp[v] = c;
        }
        Ok((tree, vertex_to_comp))
    }

    /// Marks reachable from component `c` through the neighbor `o`,
    /// including those on `o`.
    fn marks_beyond(&self, c: usize, o: usize) -> LabelSet {
        let mut reach = vec![false; self.component_count];
        reach[c] = true;
        reach[o] = true;
        let mut stack = vec![o];
        while let Some(x) = stack.pop() {
            for (a, b, _, _) in &self.nodes {
                if (*a == x && *b == c) || (*b == x && *a == c) {
                    continue;
                }
                let y = if *a == x {
                    *b
                } else if *b == x {
                    *a
                } else {
                    continue;
                };
                if !reach[y] {
                    reach[y] = true;
                    stack.push(y);
                }
            }
        }
        let mut out = LabelSet::empty();
        for (l, (mc, _)) in &self.marks {
            if *mc != c && reach[*mc] {
                out = out.with(*l);
            }
        }
        out
    }

    /// The node coordinate on `c` toward the adjacent component `o`.
    fn node_coord(&self, c: usize, o: usize) -> Option<&P1<K>> {
        for (x, y, px, py) in &self.nodes {
            if *x == c && *y == o {
                return Some(px);
            }
            if *y == c && *x == o {
                return Some(py);
            }
        }
        None
    }
}

/// The stable curve attached to a string: its fiber with all section points
/// as marks.
pub fn curve_of_string<K: Field>(xx: &GonString<K>) -> Result<StableCurve<K>> {
    let a = xx.labels().iter().max().unwrap() + 1;
    let fib = fiber(xx, a)?;
    curve_of_fiber(&fib)
}

/// Packages a fiber and its sections into a stable curve.
pub fn curve_of_fiber<K: Field>(fib: &FiberCurve<K>) -> Result<StableCurve<K>> {
    let mut nodes = Vec::new();
    for ((v, w), point) in &fib.nodes {
        nodes.push((*v, *w, point[*v].clone(), point[*w].clone()));
    }
    let mut marks = BTreeMap::new();
    for &p in fib.base.labels() {
        let s = fib.section_point(p)?;
        marks.insert(p, (s.vertex, s.coords[s.vertex].clone()));
    }
    let curve = StableCurve {
        component_count: fib.dimension(),
        nodes,
        marks,
    };
    curve.validate().expect("fibers with sections are stable");
    // the augmented dual graph is the tree of the base string
    let (tree, _) = curve.augmented_dual_tree()?;
    assert_eq!(&tree, &fib.tree);
    Ok(curve)
}

/// Reads the string of a stable curve: for every triple of marks, project
/// all marks to the median component and normalize it by the triple.
pub fn string_of_curve<K: Field>(curve: &StableCurve<K>) -> Result<GonString<K>> {
    let (tree, vertex_to_comp) = curve.augmented_dual_tree()?;
    let adj = tree.adjacency();
    let labels: Vec<usize> = tree.labels().to_vec();
    let mut gons = BTreeMap::new();
    for t in subsets_k(&labels, 3) {
        let med = tree.meeting_point(t[0], t[1], t[2]).unwrap();
        let c = vertex_to_comp[med];
        // projection of each mark onto the median component
        let proj = |l: usize| -> P1<K> {
            let (mc, coord) = &curve.marks[&l];
            if *mc == c {
                coord.clone()
            } else {
                let lv = adj.vertex_of_leaf(l).unwrap();
                let block = block_toward(&tree, &adj, med, lv);
                let step = adj.neighbor_toward(med, block);
                curve
                    .node_coord(c, vertex_to_comp[step])
                    .expect("adjacent components share a node")
                    .clone()
            }
        };
        let p0 = proj(t[0]);
        let p1 = proj(t[1]);
        let p2 = proj(t[2]);
        let m = Moebius::from_triple(&p0, &p1, &p2)
            .map_err(|_| Error::InvalidCurve("median projections collide".into()))?;
        let entries: Vec<P1<K>> = labels.iter().map(|&l| m.apply(&proj(l))).collect();
        gons.insert(Triple([t[0], t[1], t[2]]), NGon::new(entries).unwrap());
    }
    let xx = GonString::new(labels, gons).unwrap();
    debug_assert_eq!(xx.validate(), StringVerdict::InY);
    Ok(xx)
}

/// Whether two stable curves are isomorphic: their augmented dual trees
/// agree, and on each pair of matched components a Möbius map carries nodes
/// to nodes and marks to marks.
pub fn curves_isomorphic<K: Field>(a: &StableCurve<K>, b: &StableCurve<K>) -> Result<bool> {
    let (ta, map_a) = a.augmented_dual_tree()?;
    let (tb, map_b) = b.augmented_dual_tree()?;
    if ta != tb {
        return Ok(false);
    }
    let adj = ta.adjacency();
    for v in 0..adj.clusters.len() {
        let ca = map_a[v];
        let cb = map_b[v];
        // corresponding special points, in block order of the partition
        let mut pa: Vec<P1<K>> = Vec::new();
        let mut pb: Vec<P1<K>> = Vec::new();
        for block in &adj.partitions[v].blocks {
            if block.len() == 1 {
                let l = (*block).min().unwrap();
                let (mca, qa) = &a.marks[&l];
                let (mcb, qb) = &b.marks[&l];
                if *mca == ca && *mcb == cb {
                    pa.push(qa.clone());
                    pb.push(qb.clone());
                    continue;
                }
            }
            let step = adj.neighbor_toward(v, *block);
            pa.push(a.node_coord(ca, map_a[step]).unwrap().clone());
            pb.push(b.node_coord(cb, map_b[step]).unwrap().clone());
        }
        let m = match Moebius::mapping((&pa[0], &pa[1], &pa[2]), (&pb[0], &pb[1], &pb[2])) {
            Ok(m) => m,
            Err(_) => return Ok(false),
        };
        for (x, y) in pa.iter().zip(&pb) {
            if &m.apply(x) != y {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// An ordering of all subjacent k-sets of a partitioned label set (one
/// element from each of k different blocks), starting at a given set, in
/// which consecutive sets share exactly k-1 elements.
pub fn subjacent_counting(
    blocks: &[Vec<usize>],
    k: usize,
    start: &BTreeSet<usize>,
) -> Result<Vec<BTreeSet<usize>>> {
    if start.len() != k {
        return Err(Error::InvalidInput(format!("start set must have {k} elements")));
    }
    let block_of = |x: usize| blocks.iter().position(|b| b.contains(&x));
    let mut used = BTreeSet::new();
    for &x in start {
        let b = block_of(x).ok_or(Error::LabelOutOfRange(x))?;
        if !used.insert(b) {
            return Err(Error::InvalidInput("start set is not subjacent".into()));
        }
    }
    Ok(counting_rec(blocks.to_vec(), k, start.clone()))
}

fn counting_rec(blocks: Vec<Vec<usize>>, k: usize, start: BTreeSet<usize>) -> Vec<BTreeSet<usize>> {
    if k == 0 {
        return vec![BTreeSet::new()];
    }
    // b: the element of the start set in the highest-indexed block
    let block_of = |x: usize| blocks.iter().position(|bl| bl.contains(&x)).unwrap();
    let b = *start.iter().max_by_key(|x| block_of(**x)).unwrap();
    let bi = block_of(b);
    let mut smaller = blocks.clone();
    smaller.remove(bi);
    let mut c = start.clone();
    c.remove(&b);
    let with_b = counting_rec(smaller, k - 1, c);
    let mut out: Vec<BTreeSet<usize>> = with_b
        .iter()
        .map(|s| {
            let mut s = s.clone();
            s.insert(b);
            s
        })
        .collect();
    // continue with the k-sets avoiding b, if any exist
    let mut rest = blocks.clone();
    rest[bi].retain(|x| *x != b);
    if rest[bi].is_empty() {
        rest.remove(bi);
    }
    if rest.len() >= k {
        let last = with_b.last().unwrap().clone();
        let used: BTreeSet<usize> = last
            .iter()
            .map(|x| rest.iter().position(|bl| bl.contains(x)).unwrap())
            .collect();
        let next_elt = rest
            .iter()
            .enumerate()
            .filter(|(i, _)| !used.contains(i))
            .flat_map(|(_, bl)| bl.iter().copied())
            .min()
            .expect("a free block exists when rest has >= k blocks");
        let mut next = last;
        next.insert(next_elt);
        out.extend(counting_rec(rest, k, next));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bridge::string_of_tree;
    use crate::enumeration::enumerate_trees;
    use crate::field::Rat;
    use crate::p1::parse_p1_rat;

    fn ls(v: &[usize]) -> LabelSet {
        LabelSet::from_labels(v)
    }

    fn gon(vals: &[&str]) -> NGon<Rat> {
        NGon::new(vals.iter().map(|s| parse_p1_rat(s).unwrap()).collect()).unwrap()
    }

    #[test]
    fn projection_commutes_with_symmetrization() {
        let x5 = gon(&["0", "1", "inf", "7", "-3"]);
        let x4 = gon(&["0", "1", "inf", "7"]);
        let s5 = GonString::symmetrize(&x5).unwrap();
        let s4 = GonString::symmetrize(&x4).unwrap();
        assert_eq!(project(&s5, 5).unwrap(), s4);
    }

    #[test]
    fn projection_clips_the_tree() {
        let t = PhyloTree::new(LabelSet::full(5), [ls(&[3, 4, 5])]).unwrap();
        let s = string_of_tree(&t);
        let p = project(&s, 5).unwrap();
        assert_eq!(tree_of_string(&p).unwrap(), t.clip_leaf(5).unwrap());
        assert_eq!(
            tree_of_string(&p).unwrap(),
            PhyloTree::new(ls(&[1, 2, 3, 4]), [ls(&[3, 4])]).unwrap()
        );
    }

    #[test]
    fn section_lift_projects_back() {
        for tree in enumerate_trees(5).unwrap().into_iter().step_by(6) {
            let xx = string_of_tree(&tree);
            for p in [1usize, 3, 5] {
                let yy = section_lift(&xx, p, 6).unwrap();
                assert_eq!(yy.validate(), StringVerdict::InY);
                assert_eq!(project(&yy, 6).unwrap(), xx, "{tree} p={p}");
                // the lifted tree clips back to the base tree
                let lifted_tree = tree_of_string(&yy).unwrap();
                assert_eq!(lifted_tree.clip_leaf(6).unwrap(), tree);
            }
        }
    }

    #[test]
    fn generic_fiber_is_a_single_line() {
        let xx = GonString::symmetrize(&gon(&["0", "1", "inf", "5", "-2/3"])).unwrap();
        let fib = fiber(&xx, 6).unwrap();
        assert_eq!(fib.dimension(), 1);
        assert!(fib.equations.is_empty());
        assert!(fib.nodes.is_empty());
        // the n section points are the n distinct entries of the component
        let pts: Vec<_> = (1..=5)
            .map(|p| fib.section_point(p).unwrap().coords[0].clone())
            .collect();
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                assert_ne!(pts[i], pts[j]);
            }
        }
    }

    /// Four vertices, six leaves: a bare center adjacent to w {1,4},
    /// w' {2,5}, w'' {3,6}.
    fn ribisl_tree() -> PhyloTree {
        PhyloTree::new(LabelSet::full(6), [ls(&[1, 4]), ls(&[2, 5]), ls(&[3, 6])]).unwrap()
    }

    #[test]
    fn ribisl_fiber_table() {
        let tree = ribisl_tree();
        let xx = string_of_tree(&tree);
        let adj = tree.adjacency();
        let w = adj.vertex_of_leaf(1).unwrap();
        let wp = adj.vertex_of_leaf(2).unwrap();
        let wpp = adj.vertex_of_leaf(3).unwrap();
        let v = tree.meeting_point(1, 2, 3).unwrap();
        assert!(v != w && v != wp && v != wpp);
        let choices = BTreeMap::from([
            (v, [1, 2, 3]),
            (w, [2, 1, 4]),
            (wp, [1, 2, 5]),
            (wpp, [1, 6, 3]),
        ]);
        let fib = fiber_with_triples(&xx, 7, &choices).unwrap();
        assert_eq!(fib.dimension(), 4);
        let zero = P1::<Rat>::zero();
        let one = P1::<Rat>::one();
        let inf = P1::<Rat>::inf();
        // components: C_v = P1 x 0 x 0 x 0, C_w = 0 x P1 x 0 x 0,
        // C_w' = 1 x 0 x P1 x 0, C_w'' = inf x 0 x 0 x P1
        // (coordinates listed in the order v, w, w', w'')
        let pin = |c: usize, at: usize| fib.components[c].pins[&at].clone();
        for u in [w, wp, wpp] {
            assert_eq!(pin(v, u), zero);
        }
        assert_eq!(pin(w, v), zero);
        assert_eq!(pin(wp, v), one);
        assert_eq!(pin(wpp, v), inf);
        for (x, y) in [(w, wp), (w, wpp), (wp, wpp)] {
            assert_eq!(pin(x, y), zero);
            assert_eq!(pin(y, x), zero);
        }
        // intersections: C_v meets each outer component, nothing else
        let node = |a: usize, b: usize| fib.nodes.get(&(a.min(b), a.max(b)));
        let expect_point = |vv: P1<Rat>| {
            let mut pt = vec![zero.clone(); 4];
            pt[v] = vv;
            pt
        };
        assert_eq!(node(v, w).unwrap(), &expect_point(zero.clone()));
        assert_eq!(node(v, wp).unwrap(), &expect_point(one.clone()));
        assert_eq!(node(v, wpp).unwrap(), &expect_point(inf.clone()));
        assert!(node(w, wp).is_none() && node(w, wpp).is_none() && node(wp, wpp).is_none());
    }

    /// Five vertices, nine leaves: the center carries leaf 9 and touches
    /// w {1,4}, w' {2,5}, w'' {3,6}, u {7,8}.
    fn viertel_vor_neun_tree() -> PhyloTree {
        PhyloTree::new(
            LabelSet::full(9),
            [ls(&[1, 4]), ls(&[2, 5]), ls(&[3, 6]), ls(&[7, 8])],
        )
        .unwrap()
    }

    #[test]
    fn viertel_vor_neun_sections() {
        let tree = viertel_vor_neun_tree();
        let xx = string_of_tree(&tree);
        let adj = tree.adjacency();
        let w = adj.vertex_of_leaf(1).unwrap();
        let wp = adj.vertex_of_leaf(2).unwrap();
        let wpp = adj.vertex_of_leaf(3).unwrap();
        let u = adj.vertex_of_leaf(7).unwrap();
        let v = adj.vertex_of_leaf(9).unwrap();
        let choices = BTreeMap::from([
            (v, [1, 2, 3]),
            (w, [2, 1, 4]),
            (wp, [1, 2, 5]),
            (wpp, [1, 6, 3]),
            (u, [1, 7, 8]),
        ]);
        let fib = fiber_with_triples(&xx, 10, &choices).unwrap();
        assert_eq!(fib.dimension(), 5);
        let zero = P1::<Rat>::zero();
        let one = P1::<Rat>::one();
        let inf = P1::<Rat>::inf();
        // x^s_m: the entry of the u-block in the central representative
        let mu = fib.reps[v].entries()[xx.pos(7).unwrap()].clone();
        assert!(!mu.is_special());
        // C_u meets C_v at first coordinate x^s_m
        let node_vu = fib.nodes.get(&(v.min(u), v.max(u))).unwrap();
        assert_eq!(node_vu[v], mu);
        // sections, coordinates listed in the order (v, w, w', w'', u)
        let sect = |p: usize| {
            let s = fib.section_point(p).unwrap();
            [
                s.coords[v].clone(),
                s.coords[w].clone(),
                s.coords[wp].clone(),
                s.coords[wpp].clone(),
                s.coords[u].clone(),
            ]
        };
        let z = || zero.clone();
        assert_eq!(sect(1), [z(), one.clone(), z(), z(), z()]);
        assert_eq!(sect(4), [z(), inf.clone(), z(), z(), z()]);
        assert_eq!(sect(2), [one.clone(), z(), one.clone(), z(), z()]);
        assert_eq!(sect(5), [one.clone(), z(), inf.clone(), z(), z()]);
        assert_eq!(sect(3), [inf.clone(), z(), z(), inf.clone(), z()]);
        assert_eq!(sect(6), [inf.clone(), z(), z(), one.clone(), z()]);
        assert_eq!(sect(7), [mu.clone(), z(), z(), z(), one.clone()]);
        assert_eq!(sect(8), [mu.clone(), z(), z(), z(), inf.clone()]);
        // the ninth mark sits on the central component away from the others
        let s9 = sect(9);
        assert!(!s9[0].is_special() && s9[0] != mu);
        assert_eq!(&s9[1..], &[z(), z(), z(), z()]);
    }

    #[test]
    fn long_path_equations_are_redundant() {
        let tree = PhyloTree::new(LabelSet::full(6), [ls(&[5, 6]), ls(&[4, 5, 6])]).unwrap();
        let xx = string_of_tree(&tree);
        let fib = fiber(&xx, 7).unwrap();
        let adj = fib.tree.adjacency();
        for a in 0..fib.dimension() {
            for b in a + 1..fib.dimension() {
                if adj.neighbors[a].contains(&b) {
                    continue;
                }
                let (delta, epsilon) =
                    pair_equation(&xx, &fib.tree, &adj, &fib.reps, &fib.triples, a, b).unwrap();
                for c in &fib.components {
                    let on_a = c.pins.get(&a).map(|p| *p == delta).unwrap_or(true);
                    let on_b = c.pins.get(&b).map(|p| *p == epsilon).unwrap_or(true);
                    assert!(on_a || on_b, "induced equation holds on component {}", c.vertex);
                }
            }
        }
    }

    #[test]
    fn fiber_invariants_across_enumerated_trees() {
        for tree in enumerate_trees(5).unwrap() {
            let xx = string_of_tree(&tree);
            let fib = fiber(&xx, 6).unwrap();
            // construction asserts: dual graph = skeleton, nodes = d-1,
            // sections on their components and off the nodes
            let mut seen = Vec::new();
            for p in 1..=5 {
                let s = fib.section_point(p).unwrap();
                assert!(!seen.contains(&s.coords));
                seen.push(s.coords);
            }
            for p in [1usize, 4] {
                let lift = section_lift(&xx, p, 6).unwrap();
                assert_eq!(project(&lift, 6).unwrap(), xx);
            }
        }
    }

    #[test]
    fn curve_round_trip_from_strings() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for tree in enumerate_trees(5).unwrap() {
            let mut used = vec![0i64, 1];
            let mut free = |_: usize| {
                let mut v = rng.gen_range(2..1000i64);
                while used.contains(&v) {
                    v = rng.gen_range(2..1000i64);
                }
                used.push(v);
                Rat::from_i64(v)
            };
            let xx = crate::bridge::string_of_tree_with(&tree, &mut free);
            let curve = curve_of_string(&xx).unwrap();
            let back = string_of_curve(&curve).unwrap();
            assert_eq!(back, xx, "{tree}");
        }
    }

    #[test]
    fn single_component_curve_round_trip() {
        let mut marks = BTreeMap::new();
        for (l, v) in [(1, "0"), (2, "1"), (3, "inf"), (4, "5")] {
            marks.insert(l, (0usize, parse_p1_rat(v).unwrap()));
        }
        let curve = StableCurve {
            component_count: 1,
            nodes: vec![],
            marks,
        };
        let xx = string_of_curve(&curve).unwrap();
        assert_eq!(xx, GonString::symmetrize(&gon(&["0", "1", "inf", "5"])).unwrap());
        let again = curve_of_string(&xx).unwrap();
        assert!(curves_isomorphic(&curve, &again).unwrap());
    }

    #[test]
    fn synthetic_curve_round_trip() {
        // two components: marks 1,2,5 on the first at 0,1,7; marks 3,4 on
        // the second at 2,3; node at inf / 0
        let mut marks = BTreeMap::new();
        marks.insert(1, (0usize, parse_p1_rat("0").unwrap()));
        marks.insert(2, (0usize, parse_p1_rat("1").unwrap()));
        marks.insert(5, (0usize, parse_p1_rat("7").unwrap()));
        marks.insert(3, (1usize, parse_p1_rat("2").unwrap()));
        marks.insert(4, (1usize, parse_p1_rat("3").unwrap()));
        let curve = StableCurve {
            component_count: 2,
            nodes: vec![(0, 1, P1::Inf, P1::zero())],
            marks,
        };
        curve.validate().unwrap();
        let xx = string_of_curve(&curve).unwrap();
        assert_eq!(
            tree_of_string(&xx).unwrap(),
            PhyloTree::new(LabelSet::full(5), [ls(&[3, 4])]).unwrap()
        );
        let again = curve_of_string(&xx).unwrap();
        assert!(curves_isomorphic(&curve, &again).unwrap());
        // a different curve with the same tree is told apart
        let mut other = curve.clone();
        other.marks.insert(5, (0, parse_p1_rat("8").unwrap()));
        assert!(!curves_isomorphic(&curve, &other).unwrap());
    }

    #[test]
    fn invalid_curves_are_named() {
        // a mark on a node
        let mut marks = BTreeMap::new();
        marks.insert(1, (0usize, parse_p1_rat("inf").unwrap()));
        marks.insert(2, (0usize, parse_p1_rat("1").unwrap()));
        marks.insert(3, (1usize, parse_p1_rat("2").unwrap()));
        marks.insert(4, (1usize, parse_p1_rat("3").unwrap()));
        let curve = StableCurve {
            component_count: 2,
            nodes: vec![(0, 1, P1::Inf, P1::zero())],
            marks,
        };
        let err = curve.validate().unwrap_err();
        assert!(err.to_string().contains("mark on a node"), "{err}");
        // too few special points
        let mut marks = BTreeMap::new();
        marks.insert(1, (0usize, parse_p1_rat("0").unwrap()));
        marks.insert(2, (0usize, parse_p1_rat("1").unwrap()));
        marks.insert(3, (0usize, parse_p1_rat("2").unwrap()));
        marks.insert(4, (1usize, parse_p1_rat("3").unwrap()));
        let curve = StableCurve {
            component_count: 2,
            nodes: vec![(0, 1, P1::Inf, P1::zero())],
            marks,
        };
        let err = curve.validate().unwrap_err();
        assert!(err.to_string().contains("special points"), "{err}");
    }

    #[test]
    fn counting_of_subjacent_sets() {
        let blocks = vec![vec![1, 2], vec![3], vec![4, 5]];
        let start: BTreeSet<usize> = [1, 3].into_iter().collect();
        let seq = subjacent_counting(&blocks, 2, &start).unwrap();
        // all 2-sets across distinct blocks: 2*1 + 2*2 + 1*2 = 8
        assert_eq!(seq.len(), 8);
        assert_eq!(seq[0], start);
        let all: BTreeSet<_> = seq.iter().cloned().collect();
        assert_eq!(all.len(), seq.len());
        for pair in seq.windows(2) {
            assert_eq!(pair[0].intersection(&pair[1]).count(), 1);
        }
    }

    #[test]
    fn counting_exhaustive_small() {
        for blocks in [
            vec![vec![1], vec![2], vec![3], vec![4]],
            vec![vec![1, 2, 3], vec![4, 5], vec![6]],
            vec![vec![1, 4], vec![2, 6], vec![3, 5, 7]],
        ] {
            let p = blocks.len();
            for k in 1..=p.min(4) {
                let mut expect = 0usize;
                let idx: Vec<usize> = (0..p).collect();
                for choice in subsets_k(&idx, k) {
                    expect += choice.iter().map(|i| blocks[*i].len()).product::<usize>();
                }
                let start: BTreeSet<usize> = (0..k).map(|i| blocks[i][0]).collect();
                let seq = subjacent_counting(&blocks, k, &start).unwrap();
                assert_eq!(seq.len(), expect, "k={k} blocks={blocks:?}");
                let uniq: BTreeSet<_> = seq.iter().cloned().collect();
                assert_eq!(uniq.len(), expect);
                for pair in seq.windows(2) {
                    assert_eq!(pair[0].intersection(&pair[1]).count(), k - 1);
                }
            }
        }
    }
}
