mod common;

use std::collections::BTreeMap;

use common::*;
use proptest::prelude::*;
use strandc_core::compiler::{
    allocate_toeholds, check_fanin_bound, final_reactant_groups, universal_toehold,
};
use strandc_core::crn::Crn;

/// Smallest label count admitting an assignment with distinct labels in
/// every final-reactant group, by exhaustive search.
fn brute_force_labels(crn: &Crn) -> usize {
    let n = crn.len();
    if n == 0 {
        return 0;
    }
    let finals: Vec<_> = crn
        .reactions()
        .iter()
        .map(|r| r.reactants.last().unwrap().clone())
        .collect();
    for k in 1..=n {
        let total = k.pow(n as u32);
        for code in 0..total {
            let labels: Vec<usize> = (0..n).map(|i| code / k.pow(i as u32) % k).collect();
            let ok = (0..n)
                .all(|i| (i + 1..n).all(|j| finals[i] != finals[j] || labels[i] != labels[j]));
            if ok {
                return k;
            }
        }
    }
    unreachable!()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn allocation_is_valid_and_minimal(shapes in reaction_shapes(5, 4)) {
        let crn = build(&shapes);
        let asg = allocate_toeholds(&crn);
        prop_assert!(asg.faults(&crn).is_empty());
        prop_assert_eq!(asg.label_count(), brute_force_labels(&crn));
        for r in crn.reactions() {
            prop_assert_ne!(asg.linker(r.id).unwrap(), &universal_toehold());
        }
    }

    #[test]
    fn allocation_is_first_fit_by_id(shapes in reaction_shapes(6, 3)) {
        let crn = build(&shapes);
        let asg = allocate_toeholds(&crn);
        for ids in final_reactant_groups(&crn).values() {
            for (k, id) in ids.iter().enumerate() {
                prop_assert_eq!(asg.linker(*id).unwrap().label.clone(), format!("t{}", k + 1));
            }
        }
    }
}

#[test]
fn fanin_bound_reports_oversized_groups() {
    let crn = build(&[
        (vec![0, 3], vec![]),
        (vec![1, 3], vec![]),
        (vec![2, 3], vec![]),
        (vec![4, 3], vec![]),
        (vec![0, 1], vec![]),
    ]);
    let over = check_fanin_bound(&crn);
    assert_eq!(over.len(), 1);
    assert_eq!((over[0].0.as_str(), over[0].1), ("D", 4));
    let sizes: BTreeMap<_, _> = final_reactant_groups(&crn)
        .into_iter()
        .map(|(s, v)| (s, v.len()))
        .collect();
    assert_eq!(
        allocate_toeholds(&crn).label_count(),
        *sizes.values().max().unwrap()
    );
}
