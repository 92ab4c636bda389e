mod common;

use std::collections::BTreeSet;
use std::sync::OnceLock;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use acurves::aut::{self, WeightAssignment};
use acurves::binforms::{self, MultiplicityProfile, ProfilePoset};
use acurves::deformation::{self, RepresentationModel, Sign, SummandKind};
use acurves::{canon, degeneration, enumerate, patterns, Curve};

/// Stable types with g <= 3, n <= 2, at most 4 components, with their genus.
fn pool() -> &'static [(u32, Curve)] {
    static POOL: OnceLock<Vec<(u32, Curve)>> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut out = Vec::new();
        for g in 0..=3 {
            for n in (0..=2).filter(|&n| 2 * g + n > 2) {
                for c in common::census(g, n, 4).iter() {
                    out.push((g, c.clone()));
                }
            }
        }
        out
    })
}

fn pooled() -> impl Strategy<Value = (u32, Curve)> {
    (0..pool().len()).prop_map(|i| pool()[i].clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn relabelling_preserves_invariants((g, c) in pooled(), seed in any::<u64>()) {
        let r = 2 * g + 1;
        let mut rng = StdRng::seed_from_u64(seed);
        let d = common::relabel(&c, &mut rng);
        prop_assert!(d.is_valid());
        prop_assert_eq!(canon::canonical_form(&c).unwrap(), canon::canonical_form(&d).unwrap());
        prop_assert_eq!(d.arithmetic_genus().unwrap(), g);
        let (a, b) = (aut::aut_identity_component(&c, r).unwrap(), aut::aut_identity_component(&d, r).unwrap());
        prop_assert_eq!((a.torus_rank, a.unipotent), (b.torus_rank, b.unipotent));
        prop_assert_eq!(degeneration::is_special(&c, r).unwrap(), degeneration::is_special(&d, r).unwrap());
        prop_assert_eq!(
            degeneration::one_step_specializations(&c, r).unwrap().len(),
            degeneration::one_step_specializations(&d, r).unwrap().len()
        );
        prop_assert_eq!(
            deformation::feasible_deformation_sets(&c, r).unwrap().len(),
            deformation::feasible_deformation_sets(&d, r).unwrap().len()
        );
        prop_assert_eq!(
            patterns::pattern_census(&patterns::all_patterns(&c).unwrap()),
            patterns::pattern_census(&patterns::all_patterns(&d).unwrap())
        );
    }

    #[test]
    fn json_round_trip((_, c) in pooled()) {
        prop_assert_eq!(Curve::from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn stability_is_monotone_in_r((g, c) in pooled()) {
        for r in c.max_k().max(1)..=2 * g + 2 {
            prop_assert!(c.is_stable(r).unwrap());
        }
        if c.max_k() > 1 {
            prop_assert!(c.is_stable(c.max_k() - 1).is_err());
        }
    }

    #[test]
    fn opposition_and_alternation((g, c) in pooled()) {
        let r = 2 * g + 1;
        let desc = aut::aut_identity_component(&c, r).unwrap();
        for b in &desc.basis {
            for w in [b.clone(), WeightAssignment::combine(std::slice::from_ref(b), &[-1])] {
                let summands = deformation::tangent_decomposition(&c, r, &w).unwrap();
                let sign_of = |kind: &SummandKind| summands.iter().find(|s| &s.kind == kind).map(|s| (s.sign, s.dim));
                for s in c.singularities.iter().filter(|s| s.k.k() >= 2) {
                    let tangent = w.weight(&s.branches[0].component, &s.branches[0].point);
                    let (deform, _) = sign_of(&SummandKind::SingDeform(s.id.clone())).unwrap();
                    prop_assert_eq!(deform, Sign::of(-tangent));
                    if let Some((crimp, dim)) = sign_of(&SummandKind::Crimp(s.id.clone())) {
                        if dim > 0 && tangent != 0 {
                            prop_assert_eq!(crimp, deform.flip());
                        }
                    }
                }
                // consecutive worse singularities on a rational component with two special points
                for comp in c.components.iter().filter(|k| k.genus == 0) {
                    let special: Vec<&acurves::Singularity> = c
                        .singularities
                        .iter()
                        .filter(|s| s.branches.iter().any(|b| b.component == comp.id))
                        .collect();
                    let points = special.iter().map(|s| s.branches.iter().filter(|b| b.component == comp.id).count()).sum::<usize>()
                        + c.markings.iter().filter(|m| m.component == comp.id).count();
                    if points != 2 || special.len() != 2 || special.iter().any(|s| s.k.k() < 2) {
                        continue;
                    }
                    let a = sign_of(&SummandKind::SingDeform(special[0].id.clone())).unwrap().0;
                    let b = sign_of(&SummandKind::SingDeform(special[1].id.clone())).unwrap().0;
                    prop_assert_eq!(a, b.flip());
                }
            }
        }
    }

    #[test]
    fn feasible_sets_are_downward_closed((g, c) in pooled()) {
        let sets: BTreeSet<BTreeSet<String>> =
            deformation::feasible_deformation_sets(&c, 2 * g + 1).unwrap().into_iter().collect();
        for set in &sets {
            prop_assert!(!set.is_empty());
            for q in set {
                let mut smaller = set.clone();
                smaller.remove(q);
                prop_assert!(smaller.is_empty() || sets.contains(&smaller));
            }
        }
    }

    #[test]
    fn feasibility_is_monotone_in_the_closed_set(
        weights in prop::collection::vec(-3i64..=3, 1..=6),
        closed in prop::collection::vec(prop::collection::vec(0usize..6, 0..=6), 0..=3),
        extra in prop::collection::vec(0usize..6, 0..=6),
    ) {
        let n = weights.len();
        let clip = |z: &Vec<usize>| -> Vec<usize> { z.iter().copied().filter(|&i| i < n).collect() };
        let closed: Vec<Vec<usize>> = closed.iter().map(clip).collect();
        let small = RepresentationModel::new(weights.clone(), closed.clone()).unwrap();
        let mut bigger = closed;
        bigger.push(clip(&extra));
        let big = RepresentationModel::new(weights, bigger).unwrap();
        prop_assert!(!deformation::theta_feasible(&big).unwrap() || deformation::theta_feasible(&small).unwrap());
        prop_assert!(!deformation::s_feasible(&big).unwrap() || deformation::s_feasible(&small).unwrap());
    }

    #[test]
    fn profile_invariants(g in 1u32..=6) {
        let poset = ProfilePoset::new(g);
        let d = 2 * g + 2;
        prop_assert_eq!(poset.profiles.len(), common::partitions(d).len());
        let min = poset.profiles.iter().position(|p| p.parts() == [d]).unwrap();
        let max = poset.profiles.iter().position(|p| p.parts().iter().all(|&m| m == 1)).unwrap();
        for i in 0..poset.profiles.len() {
            prop_assert!(poset.leq(min, i));
            prop_assert!(poset.leq(i, max));
        }
        for h in 1..=g + 1 {
            let (a, b) = binforms::fh_weight_split(g, h).unwrap();
            prop_assert_eq!(a + b, 2 * g);
        }
        for p in &poset.profiles {
            if p.max_part() < d {
                let sings = binforms::singularity_profile(p).unwrap();
                prop_assert_eq!(sings.len(), p.parts().iter().filter(|&&m| m >= 2).count());
            }
        }
    }
}

#[test]
fn canonical_form_survives_many_relabellings() {
    let mut rng = StdRng::seed_from_u64(11);
    for c in common::census(2, 1, 4).iter().step_by(7) {
        let key = canon::canonical_form(c).unwrap();
        for _ in 0..100 {
            assert_eq!(
                canon::canonical_form(&common::relabel(c, &mut rng)).unwrap(),
                key
            );
        }
    }
}

#[test]
fn enumeration_is_monotone_in_r() {
    for g in 1..=3 {
        for n in (0..=2).filter(|&n| 2 * g + n > 2) {
            let mut previous = BTreeSet::new();
            for r in 1..=2 * g + 1 {
                let keys: BTreeSet<_> = enumerate::enumerate_keyed(g, n, r, 4)
                    .unwrap()
                    .into_keys()
                    .collect();
                assert!(previous.is_subset(&keys), "g={g} n={n} r={r}");
                let filtered = common::up_to(&common::census(g, n, 4), r).len();
                assert_eq!(keys.len(), filtered, "g={g} n={n} r={r}");
                previous = keys;
            }
        }
    }
}

#[test]
fn enumeration_is_deterministic() {
    let a = enumerate::enumerate_types(2, 1, 5, 4).unwrap();
    let b = enumerate::enumerate_types(2, 1, 5, 4).unwrap();
    assert_eq!(a, b);
}

#[test]
fn upward_closure_matches_splitting() {
    let poset = ProfilePoset::new(2);
    for max in 1..=6 {
        let set: BTreeSet<MultiplicityProfile> = poset.bounded(max);
        assert!(binforms::is_upward_closed(&set));
    }
    let mut holed = poset.bounded(3);
    holed.remove(&MultiplicityProfile::new(2, vec![2, 2, 1, 1]).unwrap());
    assert!(!binforms::is_upward_closed(&holed));
}
