//! The two directions between strings and trees: the incidence tree of a
//! string, the inductive construction of a string with a prescribed tree,
//! the cross-ratio characterization of trees, stratification order and
//! boundary components.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::{Field, Rat};
use crate::phylo::{tree_of_covering, ArboralCovering, DestinationPartition, LabelSet, PhyloTree};
use crate::strings::{
    distinguished_representative_ordered, incidence_partition_labeled, GonString, NGon, Quad,
    StringVerdict, Triple,
};
use crate::p1::P1;

/// The incidence tree of a string: vertices are the PGL₂ classes of its
/// components, edges come from complementary incidence sets, leaves from
/// singletons. Requires the equal-cross-ratio equations to hold.
pub fn tree_of_string<K: Field>(xx: &GonString<K>) -> Result<PhyloTree> {
    if xx.validate() != StringVerdict::InY {
        return Err(Error::NotInY);
    }
    let labels = xx.labels();
    let mut class_reps: Vec<&NGon<K>> = Vec::new();
    let mut partitions: Vec<DestinationPartition> = Vec::new();
    for (_, gon) in xx.components() {
        let ip = incidence_partition_labeled(gon, labels);
        let blocks: Vec<LabelSet> = ip.blocks().iter().map(|b| LabelSet::from_labels(b)).collect();
        let part = DestinationPartition::new(blocks);
        match class_reps
            .iter()
            .position(|r| crate::strings::equivalent(r, gon).unwrap())
        {
            Some(i) => {
                // components of one class share their incidence partition
                debug_assert_eq!(partitions[i], part);
            }
            None => {
                class_reps.push(gon);
                partitions.push(part);
            }
        }
    }
    let cov = ArboralCovering {
        labels: LabelSet::from_labels(labels),
        partitions,
    };
    tree_of_covering(&cov)
}

/// Free-value source for [`string_of_tree_with`]: called with 0, 1, 2, …
/// within each constructed n-gon, it must return values that are pairwise
/// distinct and different from 0 and 1.
pub type FreeValues<'a, K> = &'a mut dyn FnMut(usize) -> K;

/// A string whose incidence tree is the given tree, with default free values
/// 2, 3, 4, … in leaf-label order.
pub fn string_of_tree(tree: &PhyloTree) -> GonString<Rat> {
    string_of_tree_with(tree, &mut |i| Rat::from_i64(2 + i as i64))
}

/// The inductive construction: clip a leaf at an outermost inner vertex,
/// build a string for the smaller tree, extend every orbit representative by
/// the clipped label, and renormalize per triple.
pub fn string_of_tree_with<K: Field>(tree: &PhyloTree, free: FreeValues<K>) -> GonString<K> {
    let labels: Vec<usize> = tree.labels().to_vec();
    let n = labels.len();
    if n == 3 || tree.is_star() {
        let mut entries = vec![P1::zero(); n];
        entries[1] = P1::one();
        entries[2] = P1::Inf;
        for (ord, e) in entries.iter_mut().skip(3).enumerate() {
            *e = P1::Finite(free(ord));
        }
        let gon = NGon::new(entries).unwrap();
        let xx = GonString::symmetrize_on_labels(&labels, &gon).unwrap();
        debug_assert_eq!(xx.validate(), StringVerdict::InY);
        return xx;
    }

    let adj = tree.adjacency();
    // leaves attached to inner vertices that touch exactly one other inner
    // vertex; clip the largest of them
    let clip = adj
        .leaf_vertex
        .iter()
        .filter(|(_, v)| adj.neighbors[*v].len() == 1)
        .map(|(l, _)| *l)
        .max()
        .expect("a non-star tree has an outermost inner vertex with leaves");
    let v = adj.vertex_of_leaf(clip).unwrap();
    let at_v = LabelSet::from_labels(
        &adj.leaf_vertex
            .iter()
            .filter(|(_, w)| *w == v)
            .map(|(l, _)| *l)
            .collect::<Vec<_>>(),
    );
    let sibling = at_v.without(clip).min().unwrap();
    let outside = tree.labels().minus(at_v);

    let clipped = tree.clip_leaf(clip).unwrap();
    let smaller = string_of_tree_with(&clipped, free);

    // one representative n-gon per inner vertex of the full tree
    let mut reps: BTreeMap<usize, NGon<K>> = BTreeMap::new();
    for (w, part) in adj.partitions.iter().enumerate() {
        let gon = if w == v {
            let mut entries = vec![P1::zero(); n];
            let pos = |l: usize| labels.binary_search(&l).unwrap();
            for l in outside.iter() {
                entries[pos(l)] = P1::zero();
            }
            entries[pos(sibling)] = P1::one();
            entries[pos(clip)] = P1::Inf;
            for (ord, k) in at_v.without(clip).without(sibling).iter().enumerate() {
                entries[pos(k)] = P1::Finite(free(ord));
            }
            NGon::new(entries).unwrap()
        } else {
            // a triple defining w that avoids the clipped label
            let mut picks: Vec<usize> = part
                .blocks
                .iter()
                .map(|b| b.without(clip).min().expect("only the owner has {clip} as a block"))
                .collect();
            picks.sort_unstable();
            let s = Triple([picks[0], picks[1], picks[2]]);
            let small_gon = smaller.component(&s).unwrap();
            let sib_val = small_gon.entries()[smaller.pos(sibling).unwrap()].clone();
            let mut entries = small_gon.entries().to_vec();
            let cpos = labels.binary_search(&clip).unwrap();
            entries.insert(cpos, sib_val);
            NGon::new(entries).unwrap()
        };
        reps.insert(w, gon);
    }

    let mut gons = BTreeMap::new();
    for t in crate::strings::subsets_k(&labels, 3) {
        let w = tree.meeting_point(t[0], t[1], t[2]).unwrap();
        let positions = [
            labels.binary_search(&t[0]).unwrap() + 1,
            labels.binary_search(&t[1]).unwrap() + 1,
            labels.binary_search(&t[2]).unwrap() + 1,
        ];
        let gon = distinguished_representative_ordered(&reps[&w], positions).unwrap();
        gons.insert(Triple([t[0], t[1], t[2]]), gon);
    }
    let xx = GonString::new(labels, gons).unwrap();
    debug_assert_eq!(xx.validate(), StringVerdict::InY);
    xx
}

/// Whether some inner edge of the tree separates the first two labels of the
/// quadruple from the last two.
pub fn separates(tree: &PhyloTree, q: &Quad) -> bool {
    let first = LabelSet::from_labels(&q.0[..2]);
    let last = LabelSet::from_labels(&q.0[2..]);
    tree.splits().iter().any(|s| {
        let other = tree.labels().minus(*s);
        (first.is_subset(*s) && last.is_subset(other))
            || (first.is_subset(other) && last.is_subset(*s))
    })
}

/// The set of ordered quadruples whose pairs are separated by an inner edge;
/// on strings with this tree these are exactly the cross-ratios equal to 1.
pub fn q_one_set(tree: &PhyloTree) -> Vec<Quad> {
    let labels: Vec<usize> = tree.labels().to_vec();
    let mut out = Vec::new();
    for q in ordered_quads(&labels) {
        if separates(tree, &q) {
            out.push(q);
        }
    }
    out
}

pub fn ordered_quads(labels: &[usize]) -> Vec<Quad> {
    let mut out = Vec::new();
    for a in labels {
        for b in labels {
            for c in labels {
                for d in labels {
                    if let Ok(q) = Quad::new([*a, *b, *c, *d]) {
                        out.push(q);
                    }
                }
            }
        }
    }
    out
}

/// Whether the string's cross-ratios take the value 1 exactly on the
/// separated quadruples of the tree; equivalent to the incidence tree being
/// equal to the tree.
pub fn matches_tree<K: Field>(xx: &GonString<K>, tree: &PhyloTree) -> Result<bool> {
    if LabelSet::from_labels(xx.labels()) != tree.labels() {
        return Err(Error::InvalidInput("label sets differ".into()));
    }
    for q in ordered_quads(xx.labels()) {
        let is_one = xx.cross_ratio(&q)?.is_one();
        if is_one != separates(tree, &q) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether `target` can be obtained from `from` by contracting inner edges;
/// in split form: the splits of `target` are among those of `from`.
pub fn stratum_closure_related(target: &PhyloTree, from: &PhyloTree) -> Result<bool> {
    if target.labels() != from.labels() {
        return Err(Error::InvalidInput("label sets differ".into()));
    }
    Ok(target.splits().is_subset(from.splits()))
}

/// The boundary components containing the string: one pair of complementary
/// label sets per inner edge of its tree, the side with the smallest label
/// first.
pub fn boundary_components<K: Field>(xx: &GonString<K>) -> Result<Vec<(LabelSet, LabelSet)>> {
    let tree = tree_of_string(xx)?;
    Ok(tree
        .splits()
        .iter()
        .map(|s| (tree.labels().minus(*s), *s))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::enumerate_trees;
    use crate::p1::parse_p1_rat;

    fn ls(v: &[usize]) -> LabelSet {
        LabelSet::from_labels(v)
    }

    fn gon(vals: &[&str]) -> NGon<Rat> {
        NGon::new(vals.iter().map(|s| parse_p1_rat(s).unwrap()).collect()).unwrap()
    }

    /// The ten 5-gons of the boundary string whose first component is
    /// (0,1,inf,inf,inf), for a parameter c.
    pub(crate) fn boundary_string_5(c: &str) -> GonString<Rat> {
        let c_val = parse_p1_rat(c).unwrap();
        let one_minus = |p: &P1<Rat>| p.one_minus();
        let inv_one_minus = |p: &P1<Rat>| p.one_minus().recip();
        let inv = |p: &P1<Rat>| p.recip();
        let c1 = one_minus(&c_val);
        let c2 = inv_one_minus(&c_val);
        let c3 = inv(&c_val);
        let s = |p: &P1<Rat>| p.to_string();
        let mut gons = BTreeMap::new();
        let mut put = |t: [usize; 3], vals: [&str; 5]| {
            gons.insert(Triple(t), gon(&vals));
        };
        put([1, 2, 3], ["0", "1", "inf", "inf", "inf"]);
        put([1, 2, 4], ["0", "1", "inf", "inf", "inf"]);
        put([1, 2, 5], ["0", "1", "inf", "inf", "inf"]);
        put([1, 3, 4], ["0", "0", "1", "inf", c]);
        put([1, 3, 5], ["0", "0", "1", &s(&c1), "inf"]);
        put([1, 4, 5], ["0", "0", &s(&c2), "1", "inf"]);
        put([2, 3, 4], ["0", "0", "1", "inf", c]);
        put([2, 3, 5], ["0", "0", "1", &s(&c1), "inf"]);
        put([2, 4, 5], ["0", "0", &s(&c2), "1", "inf"]);
        put([3, 4, 5], [&s(&c3), &s(&c3), "0", "1", "inf"]);
        GonString::new(vec![1, 2, 3, 4, 5], gons).unwrap()
    }

    #[test]
    fn boundary_string_is_in_y() {
        for c in ["5", "0", "1", "inf", "-7/3"] {
            assert_eq!(boundary_string_5(c).validate(), StringVerdict::InY, "c = {c}");
        }
    }

    #[test]
    fn tree_of_generic_string_is_the_star() {
        let x = gon(&["0", "1", "inf", "5", "-2/3"]);
        let s = GonString::symmetrize(&x).unwrap();
        assert_eq!(
            tree_of_string(&s).unwrap(),
            PhyloTree::star(LabelSet::full(5)).unwrap()
        );
    }

    #[test]
    fn tree_of_boundary_string_generic_c() {
        // two inner vertices, leaves {1,2} and {3,4,5}
        let t = tree_of_string(&boundary_string_5("5")).unwrap();
        assert_eq!(t, PhyloTree::new(LabelSet::full(5), [ls(&[3, 4, 5])]).unwrap());
    }

    #[test]
    fn tree_of_boundary_string_special_c() {
        // c = 0, 1, inf give the three bamboos with two cherries
        let cases = [
            ("0", ls(&[3, 4])),
            ("1", ls(&[3, 5])),
            ("inf", ls(&[4, 5])),
        ];
        for (c, cherry) in cases {
            let t = tree_of_string(&boundary_string_5(c)).unwrap();
            let expect =
                PhyloTree::new(LabelSet::full(5), [ls(&[3, 4, 5]), cherry]).unwrap();
            assert_eq!(t, expect, "c = {c}");
        }
    }

    #[test]
    fn tree_of_string_requires_in_y() {
        let x = gon(&["0", "1", "inf", "2"]);
        let s = GonString::symmetrize(&x).unwrap();
        let mut gons: BTreeMap<_, _> = s.components().map(|(t, g)| (*t, g.clone())).collect();
        gons.insert(Triple([1, 2, 4]), gon(&["0", "1", "3", "inf"]));
        let bad = GonString::new(vec![1, 2, 3, 4], gons).unwrap();
        assert!(matches!(tree_of_string(&bad), Err(Error::NotInY)));
    }

    #[test]
    fn string_of_tree_star_and_one_split() {
        let star = PhyloTree::star(LabelSet::full(5)).unwrap();
        let s = string_of_tree(&star);
        assert_eq!(tree_of_string(&s).unwrap(), star);

        // u:{1,2}, v:{3,4,5}: the component at (1,2,3) has incidence
        // {1},{2},{3,4,5}
        let t = PhyloTree::new(LabelSet::full(5), [ls(&[1, 2])]).unwrap();
        let s = string_of_tree(&t);
        let g = s.component(&Triple([1, 2, 3])).unwrap();
        let ip = incidence_partition_labeled(g, s.labels());
        assert_eq!(
            ip.blocks(),
            &[vec![1], vec![2], vec![3, 4, 5]]
        );
        assert!(crate::strings::equivalent(g, &gon(&["0", "1", "inf", "inf", "inf"])).unwrap());
        assert_eq!(tree_of_string(&s).unwrap(), t);
    }

    #[test]
    fn round_trip_all_trees_up_to_5() {
        for n in 3..=5 {
            for t in enumerate_trees(n).unwrap() {
                let s = string_of_tree(&t);
                assert_eq!(s.validate(), StringVerdict::InY, "{t}");
                assert_eq!(tree_of_string(&s).unwrap(), t, "{t}");
            }
        }
    }

    #[test]
    fn round_trip_with_random_values() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for t in enumerate_trees(6).unwrap().into_iter().step_by(17) {
            let mut used = vec![0i64, 1];
            let mut free = |_: usize| {
                let mut v = rng.gen_range(2..10_000i64);
                while used.contains(&v) {
                    v = rng.gen_range(2..10_000i64);
                }
                used.push(v);
                Rat::from_i64(v)
            };
            let s = string_of_tree_with(&t, &mut free);
            assert_eq!(tree_of_string(&s).unwrap(), t, "{t}");
        }
    }

    #[test]
    fn q_one_and_matches_tree() {
        let star = PhyloTree::star(LabelSet::full(5)).unwrap();
        assert!(q_one_set(&star).is_empty());
        let generic = GonString::symmetrize(&gon(&["0", "1", "inf", "5", "-2/3"])).unwrap();
        assert!(matches_tree(&generic, &star).unwrap());

        let yy = boundary_string_5("5");
        let left = PhyloTree::new(LabelSet::full(5), [ls(&[3, 4, 5])]).unwrap();
        assert!(matches_tree(&yy, &left).unwrap());
        assert!(!matches_tree(&yy, &star).unwrap());
        // cc_(1,2,3,4)(yy) = 1 while the star separates nothing
        assert!(yy.cross_ratio(&Quad([1, 2, 3, 4])).unwrap().is_one());

        // consistency on a handful of strings
        for t in enumerate_trees(5).unwrap().into_iter().step_by(5) {
            let s = string_of_tree(&t);
            assert!(matches_tree(&s, &tree_of_string(&s).unwrap()).unwrap());
        }
    }

    #[test]
    fn closure_relation_is_split_containment() {
        let star = PhyloTree::star(LabelSet::full(5)).unwrap();
        let left = PhyloTree::new(LabelSet::full(5), [ls(&[3, 4, 5])]).unwrap();
        let bamboo = PhyloTree::new(LabelSet::full(5), [ls(&[3, 4, 5]), ls(&[3, 4])]).unwrap();
        assert!(stratum_closure_related(&star, &bamboo).unwrap());
        assert!(stratum_closure_related(&left, &bamboo).unwrap());
        assert!(!stratum_closure_related(&bamboo, &left).unwrap());
        let other = PhyloTree::new(LabelSet::full(5), [ls(&[2, 3])]).unwrap();
        assert!(!stratum_closure_related(&other, &bamboo).unwrap());
    }

    #[test]
    fn boundary_components_of_the_extremal_string() {
        // caterpillar {1,2} - {3} - {4,5}
        let t = PhyloTree::new(LabelSet::full(5), [ls(&[3, 4, 5]), ls(&[4, 5])]).unwrap();
        let s = string_of_tree(&t);
        let comps = boundary_components(&s).unwrap();
        assert_eq!(
            comps,
            vec![
                (ls(&[1, 2, 3]), ls(&[4, 5])),
                (ls(&[1, 2]), ls(&[3, 4, 5])),
            ]
        );
    }

    #[test]
    fn generic_iff_star() {
        for t in enumerate_trees(5).unwrap() {
            let s = string_of_tree(&t);
            let all_distinct = s
                .components()
                .all(|(_, g)| g.has_pairwise_distinct_entries());
            assert_eq!(all_distinct, t.is_star(), "{t}");
        }
    }

    #[test]
    fn specialization_trees_contract_to_the_limit_trees() {
        use crate::field::RatFunc;
        use crate::strings::limit_string;
        type F = RatFunc<Rat>;
        let t = F::var();
        // (0,1,inf,t,b(t)) with b chosen per target parameter c
        let make = |b: F| {
            let x = NGon::new(vec![
                P1::zero(),
                P1::one(),
                P1::Inf,
                P1::Finite(t.clone()),
                P1::Finite(b),
            ])
            .unwrap();
            GonString::symmetrize(&x).unwrap()
        };
        // b = (5/4) t: both parameters reach infinity with ratio 4/5, the
        // two-orbit limit with parameter c = 5
        let lim = limit_string(
            &make(t.mul(&F::constant(crate::field::rat(5, 4)))),
            &P1::Inf,
        );
        assert_eq!(lim, boundary_string_5("5"));
        let tree = tree_of_string(&lim).unwrap();
        assert_eq!(tree, PhyloTree::new(LabelSet::full(5), [ls(&[3, 4, 5])]).unwrap());
        // b = t + 1: ratio 1, the three-orbit bamboo with c = inf
        let lim_inf = limit_string(&make(t.add(&F::one())), &P1::Inf);
        assert_eq!(lim_inf, boundary_string_5("inf"));
        // b = t^2: the c = 1 bamboo
        let lim2 = limit_string(&make(t.mul(&t)), &P1::Inf);
        assert_eq!(lim2, boundary_string_5("1"));
        let tree2 = tree_of_string(&lim2).unwrap();
        assert_eq!(
            tree2,
            PhyloTree::new(LabelSet::full(5), [ls(&[3, 4, 5]), ls(&[3, 5])]).unwrap()
        );
        // the entries 4, 5 coalescing at a finite spot: cherry {4,5}
        let two = F::from_i64(2);
        let x45 = NGon::new(vec![
            P1::zero(),
            P1::one(),
            P1::Inf,
            P1::Finite(two.add(&t)),
            P1::Finite(two.add(&t).add(&t)),
        ])
        .unwrap();
        let lim3 = limit_string(&GonString::symmetrize(&x45).unwrap(), &P1::zero());
        let tree3 = tree_of_string(&lim3).unwrap();
        assert_eq!(tree3, PhyloTree::new(LabelSet::full(5), [ls(&[4, 5])]).unwrap());
        // specialization only contracts trees: every limit tree contracts to
        // the generic star, and the c = 1 bamboo contracts to the c-generic
        // two-vertex tree
        let star = PhyloTree::star(LabelSet::full(5)).unwrap();
        for t in [&tree, &tree2, &tree3] {
            assert!(stratum_closure_related(&star, t).unwrap());
        }
        assert!(stratum_closure_related(&tree, &tree2).unwrap());
        assert!(!stratum_closure_related(&tree2, &tree).unwrap());
    }
}
