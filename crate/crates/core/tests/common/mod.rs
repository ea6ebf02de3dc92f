#![allow(dead_code)]

use proptest::prelude::*;
use strandc_core::crn::{Crn, Species};

pub const POOL: [&str; 6] = ["A", "B", "C", "D", "E", "F"];

pub fn sp(s: &str) -> Species {
    Species::new(s).unwrap()
}

pub fn names(v: &[Species]) -> Vec<&str> {
    v.iter().map(Species::as_str).collect()
}

/// Raw reaction shapes over the first `species` pool entries.
pub fn reaction_shapes(
    max_reactions: usize,
    species: usize,
) -> impl Strategy<Value = Vec<(Vec<usize>, Vec<usize>)>> {
    let one = (
        prop::collection::vec(0..species, 2..=3),
        prop::collection::vec(0..species, 0..=2),
    );
    prop::collection::vec(one, 0..=max_reactions)
}

pub fn build(shapes: &[(Vec<usize>, Vec<usize>)]) -> Crn {
    Crn::from_reactions(shapes.iter().map(|(r, p)| {
        (
            r.iter().map(|&i| sp(POOL[i])).collect(),
            p.iter().map(|&i| sp(POOL[i])).collect(),
        )
    }))
    .unwrap()
}

/// Every choice of first/second swaps over termolecular reactions, in
/// swap-vector order. Independent of the solver.
pub fn all_swaps(crn: &Crn) -> Vec<(Vec<bool>, Crn)> {
    let ter: Vec<usize> = crn
        .reactions()
        .iter()
        .filter(|r| r.reactants.len() == 3)
        .map(|r| r.id)
        .collect();
    (0u32..1 << ter.len())
        .map(|mask| {
            let bits: Vec<bool> = (0..ter.len())
                .map(|i| mask >> (ter.len() - 1 - i) & 1 == 1)
                .collect();
            let swapped = Crn::from_reactions(crn.reactions().iter().map(|r| {
                let mut rs = r.reactants.clone();
                if let Some(k) = ter.iter().position(|&id| id == r.id) {
                    if bits[k] {
                        rs.swap(0, 1);
                    }
                }
                (rs, r.products.clone())
            }))
            .unwrap();
            (bits, swapped)
        })
        .collect()
}

/// Ordering check written out directly from the rule.
pub fn ordering_ok(crn: &Crn) -> bool {
    let firsts: Vec<&Species> = crn.reactions().iter().map(|r| &r.reactants[0]).collect();
    crn.reactions()
        .iter()
        .filter(|r| r.reactants.len() == 3)
        .all(|r| !firsts.contains(&&r.reactants[1]))
}
