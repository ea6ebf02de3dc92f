//! Reactant-ordering constraint and its repair.
//!
//! A buffer1 strand `[x_S, t]` is released when `S` binds as the first
//! reactant of a gadget; a buffer2 strand with the same shape is released
//! when `S` binds as the second reactant of a termolecular gadget. Only
//! buffer2 strands are garbage-collected, so the two identity sets must stay
//! disjoint: no species may be a first reactant in one reaction and the
//! second reactant of a termolecular reaction.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::crn::{Crn, Reaction, ReactionId, Species};

/// Which reactions use each species in the two buffer-releasing positions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RoleTable {
    /// Species → reactions (bi- or termolecular) where it is reactant 1.
    pub first_of: BTreeMap<Species, BTreeSet<ReactionId>>,
    /// Species → termolecular reactions where it is reactant 2.
    pub second_ter_of: BTreeMap<Species, BTreeSet<ReactionId>>,
}

impl RoleTable {
    pub fn from_crn(crn: &Crn) -> Self {
        let mut table = RoleTable::default();
        for r in crn.reactions() {
            if r.arity() < 2 {
                continue;
            }
            table
                .first_of
                .entry(r.reactants[0].clone())
                .or_default()
                .insert(r.id);
            if r.is_termolecular() {
                table
                    .second_ter_of
                    .entry(r.reactants[1].clone())
                    .or_default()
                    .insert(r.id);
            }
        }
        table
    }
}

/// `species` is reactant 1 of `first_in` and reactant 2 of the termolecular
/// reaction `second_in`. The two ids may coincide (`X + X + Z`).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct OrderingViolation {
    pub species: Species,
    pub first_in: ReactionId,
    pub second_in: ReactionId,
}

impl fmt::Display for OrderingViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} is the first reactant of r{} and the second reactant of termolecular r{}",
            self.species, self.first_in, self.second_in
        )
    }
}

/// All ordering violations, sorted by species name then reaction ids.
pub fn validate_ordering(crn: &Crn) -> Vec<OrderingViolation> {
    let table = RoleTable::from_crn(crn);
    let mut out = Vec::new();
    for (species, firsts) in &table.first_of {
        let Some(seconds) = table.second_ter_of.get(species) else {
            continue;
        };
        for &first_in in firsts {
            for &second_in in seconds {
                out.push(OrderingViolation {
                    species: species.clone(),
                    first_in,
                    second_in,
                });
            }
        }
    }
    out
}

/// No assignment of first/second swaps satisfies the constraint. `witness`
/// is an irreducible conflicting subset: dropping any one of its reactions
/// makes the rest repairable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Infeasible {
    pub witness: Vec<ReactionId>,
}

impl fmt::Display for Infeasible {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(
            "no reactant ordering satisfies the buffer constraint; conflicting reactions:",
        )?;
        for id in &self.witness {
            write!(f, " r{id}")?;
        }
        Ok(())
    }
}

impl core::error::Error for Infeasible {}

/// Repairs ordering violations by swapping reactants 1 and 2 of
/// termolecular reactions. The final reactant, products and the reaction
/// list are never changed; bimolecular reactions are fixed.
///
/// Among valid repairs the one with the fewest swaps wins, ties broken by
/// the lexicographically smallest swap vector over termolecular reactions
/// in id order (`false < true`).
pub fn solve_ordering(crn: &Crn) -> Result<Crn, Infeasible> {
    let all: Vec<&Reaction> = crn.reactions().iter().filter(|r| r.arity() >= 2).collect();
    let mut search = Search::new(&all);
    if !search.feasible() {
        return Err(Infeasible {
            witness: minimal_witness(&all),
        });
    }
    let swaps = (0..=search.vars.len())
        .find_map(|k| search.lex_smallest_with(k))
        .expect("feasible instance has an assignment");

    let mut out = crn.clone();
    for (r, swapped) in search.vars.iter().zip(swaps) {
        if swapped {
            let mut reactants = r.reactants.clone();
            reactants.swap(0, 1);
            out = out.with_reactant_permutation(r.id, reactants);
        }
    }
    debug_assert!(validate_ordering(&out).is_empty());
    Ok(out)
}

/// Backtracking over one boolean per termolecular reaction. Species are
/// interned to indices so the inner loop only touches counters.
struct Search<'a> {
    vars: Vec<&'a Reaction>,
    /// Interned (reactant 1, reactant 2) of each variable.
    pairs: Vec<(usize, usize)>,
    first: Vec<u32>,
    second: Vec<u32>,
}

impl<'a> Search<'a> {
    fn new(reactions: &[&'a Reaction]) -> Self {
        let mut ids: BTreeMap<&Species, usize> = BTreeMap::new();
        let mut intern = |s: &'a Species| {
            let n = ids.len();
            *ids.entry(s).or_insert(n)
        };
        let mut vars = Vec::new();
        let mut pairs = Vec::new();
        let mut fixed = Vec::new();
        for r in reactions {
            if r.is_termolecular() {
                vars.push(*r);
                pairs.push((intern(&r.reactants[0]), intern(&r.reactants[1])));
            } else {
                fixed.push(intern(&r.reactants[0]));
            }
        }
        let n = ids.len();
        let mut first = vec![0; n];
        for f in fixed {
            first[f] += 1;
        }
        Search {
            vars,
            pairs,
            first,
            second: vec![0; n],
        }
    }

    fn roles(&self, i: usize, swapped: bool) -> (usize, usize) {
        let (a, b) = self.pairs[i];
        if swapped {
            (b, a)
        } else {
            (a, b)
        }
    }

    fn fits(&self, first: usize, second: usize) -> bool {
        first != second && self.second[first] == 0 && self.first[second] == 0
    }

    fn feasible(&mut self) -> bool {
        self.dfs(0, None, &mut Vec::new())
    }

    fn lex_smallest_with(&mut self, swaps: usize) -> Option<Vec<bool>> {
        let mut chosen = Vec::with_capacity(self.vars.len());
        self.dfs(0, Some(swaps), &mut chosen).then_some(chosen)
    }

    /// `budget = Some(k)` demands exactly `k` swaps among the remaining
    /// variables; `None` accepts any count.
    fn dfs(&mut self, i: usize, budget: Option<usize>, chosen: &mut Vec<bool>) -> bool {
        if i == self.vars.len() {
            return budget.is_none_or(|k| k == 0);
        }
        if let Some(k) = budget {
            if k > self.vars.len() - i {
                return false;
            }
        }
        for swapped in [false, true] {
            let rest = match (budget, swapped) {
                (Some(0), true) => continue,
                (Some(k), true) => Some(k - 1),
                (b, _) => b,
            };
            let (first, second) = self.roles(i, swapped);
            if !self.fits(first, second) {
                continue;
            }
            self.first[first] += 1;
            self.second[second] += 1;
            chosen.push(swapped);
            let found = self.dfs(i + 1, rest, chosen);
            self.first[first] -= 1;
            self.second[second] -= 1;
            if found {
                return true;
            }
            chosen.pop();
        }
        false
    }
}

fn subset_feasible(reactions: &[&Reaction]) -> bool {
    Search::new(reactions).feasible()
}

/// Deletion filter: drop each reaction in turn if the rest stays infeasible.
fn minimal_witness(reactions: &[&Reaction]) -> Vec<ReactionId> {
    let mut keep: Vec<&Reaction> = reactions.to_vec();
    let mut i = 0;
    while i < keep.len() {
        let mut trial = keep.clone();
        trial.remove(i);
        if subset_feasible(&trial) {
            i += 1;
        } else {
            keep = trial;
        }
    }
    keep.iter().map(|r| r.id).collect()
}
