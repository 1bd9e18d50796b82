//! Property tests: structural laws on randomly generated strata structures
//! and on the seeded blow-up corpus.

use std::collections::BTreeSet;

use proptest::prelude::*;

use strata_core::blowup::{apply_blowup, compute_center_data, BlowupCenter};
use strata_core::corpus::{instance, CorpusSpec};
use strata_core::nodal::{separating_blocks, uninterrupted_set, validate_nodal_data};
use strata_core::parity::{components_by_search, crossing_count};
use strata_core::residue::{classify_stratum, derive_nodal_data, Residue, StratumClass};
use strata_core::structure::{
    closure, is_k_path, is_one_connected_family, k_connected_components, truncate,
    validate_structure,
};
use strata_core::{IndexId, KPath, StrataStructure, Stratum};

/// Downward closure of arbitrary generator sets always yields a valid
/// structure; this is the generic structure strategy.
fn arb_structure(max_indices: u32, dimension: usize) -> impl Strategy<Value = StrataStructure> {
    (1..=max_indices, proptest::collection::vec(proptest::collection::btree_set(0u32..max_indices, 0..=dimension), 0..6))
        .prop_map(move |(n, generators)| {
            let mut strata: BTreeSet<Stratum> = BTreeSet::new();
            strata.insert(Stratum::empty());
            for i in 0..n {
                strata.insert(Stratum::from_ids([i]));
            }
            for g in generators {
                let members: Vec<u32> = g.into_iter().filter(|i| *i < n).collect();
                let stratum = Stratum::from_ids(members.iter().copied());
                for sub in stratum.subsets() {
                    if sub.len() <= dimension {
                        strata.insert(sub);
                    }
                }
            }
            StrataStructure::new(dimension, (0..n).map(IndexId), strata)
        })
}

proptest! {
    #[test]
    fn generated_structures_are_valid(s in arb_structure(5, 3)) {
        prop_assert!(validate_structure(&s).is_valid());
    }

    #[test]
    fn closure_is_extensive_monotone_idempotent(s in arb_structure(5, 3), seed_bits in any::<u64>()) {
        // Pick a pseudo-random subset of the strata as the seed.
        let seed: BTreeSet<Stratum> = s
            .strata()
            .enumerate()
            .filter(|(t, _)| seed_bits >> (t % 64) & 1 == 1)
            .map(|(_, j)| j.clone())
            .collect();
        let once = closure(&s, &seed).unwrap();
        prop_assert!(seed.is_subset(&once));
        let twice = closure(&s, &once).unwrap();
        prop_assert_eq!(&once, &twice);
        let smaller: BTreeSet<Stratum> = seed.iter().take(seed.len() / 2).cloned().collect();
        let small_closure = closure(&s, &smaller).unwrap();
        prop_assert!(small_closure.is_subset(&once));
    }

    #[test]
    fn truncation_is_valid_and_idempotent(s in arb_structure(6, 4), k in 1usize..=4) {
        let t = truncate(&s, k);
        prop_assert!(validate_structure(&t).is_valid());
        prop_assert_eq!(&truncate(&t, k), &t);
        prop_assert!(t.strata().all(|j| j.len() <= k));
    }

    #[test]
    fn component_blocks_partition_and_join(s in arb_structure(5, 3), k in 1usize..=2) {
        let a: BTreeSet<Stratum> = s.level(k).take(8).cloned().collect();
        let blocks = k_connected_components(&s, &a, k).unwrap();
        // Partition: disjoint and covering.
        let mut seen = BTreeSet::new();
        for block in &blocks {
            for j in block {
                prop_assert!(seen.insert(j.clone()));
            }
        }
        prop_assert_eq!(seen, a.clone());
        // Exhaustive joinability within a block, none across blocks.
        for (b, block) in blocks.iter().enumerate() {
            for j in block {
                for j2 in block {
                    prop_assert!(joinable(&s, &a, j, j2, k));
                }
                for (b2, other) in blocks.iter().enumerate() {
                    if b2 != b {
                        for j2 in other {
                            prop_assert!(!joinable(&s, &a, j, j2, k));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn first_homology_of_a_graph_is_its_cycle_rank(s in arb_structure(5, 3)) {
        use strata_core::parity::components_by_search as comps;
        use strata_core::pi1::h1_invariants;
        use num_traits::Zero;
        let graph = truncate(&s, 2);
        prop_assume!(comps(&graph).len() == 1 && !graph.indices().is_empty());
        let vertices = graph.indices().len();
        let edges = graph.level(2).count();
        let factors = h1_invariants(&graph).unwrap();
        // A connected graph has free homology of rank E - V + 1.
        prop_assert_eq!(factors.len(), edges + 1 - vertices);
        prop_assert!(factors.iter().all(num_bigint::BigInt::is_zero));
        // Filling triangles only ever shrinks the factor list.
        if comps(&s).len() == 1 {
            prop_assert!(h1_invariants(&s).unwrap().len() <= factors.len());
        }
    }

    #[test]
    fn composition_and_reversal_preserve_paths(s in arb_structure(5, 3), seed in any::<u64>()) {
        if let Some(path) = random_walk(&s, seed, 6) {
            prop_assert!(path.is_valid_in(&s));
            prop_assert!(path.reverse().is_valid_in(&s));
            let double = path.compose(&path.reverse()).unwrap();
            prop_assert!(double.is_valid_in(&s));
            prop_assert!(is_k_path(&s, double.entries(), 1));
        }
    }
}

/// Exhaustive reachability by k-paths with support in `a`, written as a
/// plain recursive search so it does not share code with the partition.
fn joinable(s: &StrataStructure, a: &BTreeSet<Stratum>, from: &Stratum, to: &Stratum, k: usize) -> bool {
    fn go(
        s: &StrataStructure,
        a: &BTreeSet<Stratum>,
        here: &Stratum,
        to: &Stratum,
        k: usize,
        visited: &mut BTreeSet<Stratum>,
    ) -> bool {
        if here == to {
            return true;
        }
        for next in a {
            if visited.contains(next) {
                continue;
            }
            let u = here.union(next);
            if u.len() == k + 1 && s.contains(&u) {
                visited.insert(next.clone());
                if go(s, a, next, to, k, visited) {
                    return true;
                }
            }
        }
        false
    }
    go(s, a, from, to, k, &mut BTreeSet::from([from.clone()]))
}

/// Deterministic pseudo-random walk on the dual graph, if any vertex exists.
fn random_walk(s: &StrataStructure, seed: u64, max_len: usize) -> Option<KPath> {
    let indices = s.indices();
    if indices.is_empty() {
        return None;
    }
    let mut state = seed | 1;
    let mut step = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 33) as usize
    };
    let mut here = indices[step() % indices.len()];
    let mut vertices = vec![here];
    for _ in 0..max_len {
        let neighbors = s.neighbors(here);
        if neighbors.is_empty() {
            break;
        }
        here = neighbors[step() % neighbors.len()];
        vertices.push(here);
    }
    Some(KPath::one_path(vertices).expect("nonempty"))
}

#[test]
fn blowups_preserve_validity_and_signatures() {
    let spec = CorpusSpec::new(&[2, 3, 4], 8, 41);
    for i in 0..60 {
        let inst = instance(&spec, i);
        let mut previous = StrataStructure::bare_germ(inst.trace.dimension());
        for (center, outcome) in inst.trace.steps() {
            let s = &outcome.new_structure;
            assert!(validate_structure(s).is_valid());
            assert_eq!(s.indices().len(), previous.indices().len() + 1);
            // Pre-existing singletons survive; the fresh one is present.
            for &i in previous.indices() {
                assert!(s.contains(&Stratum::singleton(i)));
            }
            assert!(s.contains(&Stratum::singleton(outcome.fresh_index)));
            // The contact set of the center is 1-connected.
            let data = compute_center_data(&previous, center).unwrap();
            assert!(is_one_connected_family(&data.a_set));
            previous = s.clone();
        }
    }
}

#[test]
fn edge_blowup_without_triples_subdivides() {
    // Build a chain of three components, then blow up a middle edge: the
    // dual graph must be its subdivision.
    let trace = strata_core::blowup::blowup_sequence(
        2,
        &[
            BlowupCenter::free_point([]),
            BlowupCenter::free_point([0]),
            BlowupCenter::free_point([1]),
        ],
    )
    .unwrap();
    let s = trace.final_structure();
    let edges: Vec<Stratum> = s.level(2).cloned().collect();
    assert_eq!(edges, vec![Stratum::from_ids([0, 1]), Stratum::from_ids([1, 2])]);
    let out = apply_blowup(&s, &BlowupCenter::stratum([0, 1])).unwrap();
    let new_edges: Vec<Stratum> = out.new_structure.level(2).cloned().collect();
    assert_eq!(
        new_edges,
        vec![
            Stratum::from_ids([0, 3]),
            Stratum::from_ids([1, 2]),
            Stratum::from_ids([1, 3]),
        ]
    );
}

#[test]
fn residue_derived_data_is_valid_and_scale_invariant() {
    let spec = CorpusSpec::new(&[2, 3, 4], 6, 43);
    for i in 0..60 {
        let inst = instance(&spec, i);
        let s = inst.trace.final_structure();
        let n = derive_nodal_data(&s, &inst.model).unwrap();
        assert!(validate_nodal_data(&s, &n).is_valid());

        // Multiplying every scale by a common positive rational changes
        // nothing.
        let mut scaled = strata_core::residue::ResidueModel::new(inst.model.table().clone());
        for (idx, r) in inst.model.assignments() {
            let factor = num_rational::BigRational::new(7.into(), 3.into());
            scaled.assign(idx, Residue::new(r.symbol(), r.scale() * factor).unwrap());
        }
        assert_eq!(derive_nodal_data(&s, &scaled).unwrap(), n);

        // Subset coherence: any subset of a nodal corner with both signs
        // inhabited is a nodal corner with the restricted partition.
        for j in n.strata() {
            let partition = n.partition(j).unwrap();
            for sub in j.subsets() {
                if let Some(restricted) = partition.restrict(&sub) {
                    match classify_stratum(&inst.model, &sub).unwrap() {
                        StratumClass::NodalCorner(p) => assert!(p.same_split(&restricted)),
                        other => panic!("expected a nodal corner, got {:?}", other),
                    }
                }
            }
        }
    }
}

#[test]
fn distinct_blocks_have_disjoint_closures() {
    let spec = CorpusSpec::new(&[3, 4], 8, 47);
    for i in 0..80 {
        let inst = instance(&spec, i);
        let s = inst.trace.final_structure();
        let n = derive_nodal_data(&s, &inst.model).unwrap();
        let report = separating_blocks(&s, &n).unwrap();
        let closures: Vec<BTreeSet<Stratum>> = report
            .blocks
            .iter()
            .map(|b| closure(&s, &b.strata).unwrap())
            .collect();
        for (a, ca) in closures.iter().enumerate() {
            for cb in closures.iter().skip(a + 1) {
                assert!(ca.is_disjoint(cb));
            }
        }
        // The separator set is the level-2 part of its own closure.
        let sep_closure = closure(&s, &report.separator_set).unwrap();
        let level2: BTreeSet<Stratum> =
            sep_closure.into_iter().filter(|j| j.len() == 2).collect();
        assert_eq!(level2, report.separator_set);
        // Uninterrupted set: closed, inside N, and maximal among closed sets.
        let u = uninterrupted_set(&s, &n);
        assert_eq!(closure(&s, &u).unwrap(), u);
        for j in &u {
            assert!(n.contains(j));
        }
        for j in n.strata() {
            let cl = closure(&s, &BTreeSet::from([j.clone()])).unwrap();
            if cl.iter().all(|h| n.contains(h)) {
                assert!(u.contains(j));
            }
        }
    }
}

#[test]
fn crossing_counts_add_and_reverse() {
    let spec = CorpusSpec::new(&[2, 3, 4], 8, 53);
    let mut checked = 0;
    for i in 0..40 {
        let inst = instance(&spec, i);
        let s = inst.trace.final_structure();
        let n = derive_nodal_data(&s, &inst.model).unwrap();
        let report = separating_blocks(&s, &n).unwrap();
        for (b, block) in report.blocks.iter().enumerate() {
            for round in 0..4 {
                let seed = (i as u64) << 16 | (b as u64) << 8 | round;
                let Some(first) = walk(&s, seed, 5) else { continue };
                let Some(second) = walk_from(&s, seed ^ 0xABCD, 5, first.end().clone()) else {
                    continue;
                };
                let composed = first.compose(&second).unwrap();
                let k1 = crossing_count(&s, &block.strata, &first).unwrap();
                let k2 = crossing_count(&s, &block.strata, &second).unwrap();
                let k12 = crossing_count(&s, &block.strata, &composed).unwrap();
                assert_eq!(k12, k1 + k2);
                assert_eq!(
                    crossing_count(&s, &block.strata, &composed.reverse()).unwrap(),
                    k12
                );
                checked += 1;
            }
        }
    }
    assert!(checked > 50, "corpus produced too few path pairs: {checked}");
}

fn walk(s: &StrataStructure, seed: u64, len: usize) -> Option<KPath> {
    let start = *s.indices().first()?;
    walk_from(s, seed, len, Stratum::singleton(start))
}

fn walk_from(s: &StrataStructure, seed: u64, len: usize, from: Stratum) -> Option<KPath> {
    let mut state = seed | 1;
    let mut step = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 33) as usize
    };
    let mut here = *from.members().first()?;
    let mut vertices = vec![here];
    for _ in 0..len {
        let neighbors = s.neighbors(here);
        if neighbors.is_empty() {
            break;
        }
        here = neighbors[step() % neighbors.len()];
        vertices.push(here);
    }
    Some(KPath::one_path(vertices).expect("nonempty"))
}

#[test]
fn search_components_match_parity_on_the_corpus_sample() {
    use strata_core::parity::{components_by_parity, Provenance};
    let spec = CorpusSpec::new(&[2, 3, 4], 8, 59);
    for i in 0..40 {
        let inst = instance(&spec, i);
        let s = inst.trace.final_structure();
        let n = derive_nodal_data(&s, &inst.model).unwrap();
        let parity = components_by_parity(&s, &n, Provenance::BlowupConstruction).unwrap();
        assert_eq!(
            parity.components,
            components_by_search(&parity.separator.residual)
        );
    }
}
