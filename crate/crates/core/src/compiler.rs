//! Toehold allocation and gadget construction.
//!
//! One gadget per reaction. For a termolecular reaction `A + B + C -> P`
//! the input gate `g1` has backbone
//!
//! ```text
//!   t*  x_A*  t*  x_B*  t*  x_C*  t_r*
//!   0   1     2   3     4   5     6
//! ```
//!
//! with `buffer1 = [x_A, t]` on 1-2, `buffer2 = [x_B, t]` on 3-4 and
//! `cover = [x_C, t_r]` on 5-6, leaving only the leftmost `t*` exposed.
//! Each reactant `[t, x_S]` binds the exposed `t*`, branch-migrates through
//! `x_S*` and releases the strand to its right, which uncovers the next
//! `t*`. Once the final reactant is in place `t_r*` is exposed; the linker
//! `[x_C, t_r, j_r]` binds it and displaces the final reactant leftwards.
//! The linker tail `j_r` then triggers the output gate `g2`
//! (`j_r*` followed by one `t* x_P*` slot per product, each holding a
//! product strand) to release the products. Bimolecular gadgets drop the
//! `x_B* t*`/buffer2 segment.
//!
//! Species strands and buffers share the universal toehold `t`. Linkers get
//! their own toeholds: never `t`, and pairwise distinct among reactions
//! with the same final reactant. Reactions with different final reactants
//! may reuse a linker toehold because the recognition domain in front of it
//! differs.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::crn::{ArityError, Crn, Reaction, ReactionId, Species};
use crate::dsd::{Complex, Domain, Site, Strand, StrandIdentity, StrandRole};
use crate::ordering::{solve_ordering, validate_ordering, Infeasible, OrderingViolation};

/// Label of the toehold shared by species strands and buffers.
pub const UNIVERSAL_TOEHOLD: &str = "t";

/// Largest final-reactant group expected from well-designed gate networks.
pub const FANIN_BOUND: usize = 3;

pub fn universal_toehold() -> Domain {
    Domain::toehold(UNIVERSAL_TOEHOLD)
}

/// The `i`-th linker toehold label, `t1`, `t2`, ...
pub fn linker_toehold(i: usize) -> Domain {
    Domain::toehold(format!("t{i}"))
}

pub fn species_domain(s: &Species) -> Domain {
    Domain::recognition(format!("x_{s}"))
}

/// `[t, x_S]`.
pub fn species_strand(s: &Species) -> Strand {
    Strand::new(
        s.as_str(),
        StrandRole::Species,
        vec![universal_toehold(), species_domain(s)],
    )
}

pub fn species_identity(s: &Species) -> StrandIdentity {
    species_strand(s).identity()
}

fn tail_domain(r: ReactionId) -> Domain {
    Domain::recognition(format!("j{r}"))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToeholdAssignment {
    pub universal: Domain,
    pub linker_of: BTreeMap<ReactionId, Domain>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum AssignmentFault {
    Missing(ReactionId),
    NotAToehold(ReactionId),
    EqualsUniversal(ReactionId),
    /// Two reactions with the same final reactant share a linker toehold.
    SharedInGroup {
        final_reactant: Species,
        first: ReactionId,
        second: ReactionId,
    },
}

impl fmt::Display for AssignmentFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AssignmentFault::Missing(r) => write!(f, "r{r} has no linker toehold"),
            AssignmentFault::NotAToehold(r) => write!(f, "r{r}'s linker domain is not a toehold"),
            AssignmentFault::EqualsUniversal(r) => {
                write!(f, "r{r}'s linker toehold equals the universal toehold")
            }
            AssignmentFault::SharedInGroup {
                final_reactant,
                first,
                second,
            } => write!(
                f,
                "r{first} and r{second} share final reactant {final_reactant} and a linker toehold"
            ),
        }
    }
}

impl ToeholdAssignment {
    pub fn linker(&self, r: ReactionId) -> Option<&Domain> {
        self.linker_of.get(&r)
    }

    /// Number of distinct linker toehold labels in use.
    pub fn label_count(&self) -> usize {
        self.linker_of.values().collect::<BTreeSet<_>>().len()
    }

    /// Checks the two crosstalk rules against `crn`.
    pub fn faults(&self, crn: &Crn) -> Vec<AssignmentFault> {
        let mut out = Vec::new();
        for r in crn.reactions().iter().filter(|r| r.arity() >= 2) {
            match self.linker_of.get(&r.id) {
                None => out.push(AssignmentFault::Missing(r.id)),
                Some(d) if !d.is_toehold() => out.push(AssignmentFault::NotAToehold(r.id)),
                Some(d) if *d == self.universal => out.push(AssignmentFault::EqualsUniversal(r.id)),
                Some(_) => {}
            }
        }
        for (final_reactant, members) in final_reactant_groups(crn) {
            for (i, &a) in members.iter().enumerate() {
                for &b in &members[i + 1..] {
                    if let (Some(x), Some(y)) = (self.linker_of.get(&a), self.linker_of.get(&b)) {
                        if x == y {
                            out.push(AssignmentFault::SharedInGroup {
                                final_reactant: final_reactant.clone(),
                                first: a,
                                second: b,
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

/// Reactions grouped by final reactant; members in id order. Unimolecular
/// reactions have no final reactant and are skipped.
pub fn final_reactant_groups(crn: &Crn) -> BTreeMap<Species, Vec<ReactionId>> {
    let mut groups: BTreeMap<Species, Vec<ReactionId>> = BTreeMap::new();
    for r in crn.reactions() {
        if let Ok(f) = r.final_reactant() {
            groups.entry(f.clone()).or_default().push(r.id);
        }
    }
    groups
}

/// First-fit allocation in reaction-id order: each reaction takes the
/// lowest label not yet used inside its final-reactant group. Uses exactly
/// as many labels as the largest group has members.
pub fn allocate_toeholds(crn: &Crn) -> ToeholdAssignment {
    let mut used: BTreeMap<&Species, BTreeSet<usize>> = BTreeMap::new();
    let mut linker_of = BTreeMap::new();
    for r in crn.reactions() {
        let Ok(f) = r.final_reactant() else { continue };
        let taken = used.entry(f).or_default();
        let label = (1..).find(|i| !taken.contains(i)).expect("unbounded");
        taken.insert(label);
        linker_of.insert(r.id, linker_toehold(label));
    }
    ToeholdAssignment {
        universal: universal_toehold(),
        linker_of,
    }
}

/// Final reactants shared by more than [`FANIN_BOUND`] reactions, with
/// their group sizes. Diagnostic only; allocation handles any size.
pub fn check_fanin_bound(crn: &Crn) -> Vec<(Species, usize)> {
    final_reactant_groups(crn)
        .into_iter()
        .filter(|(_, m)| m.len() > FANIN_BOUND)
        .map(|(s, m)| (s, m.len()))
        .collect()
}

/// Where an input gate is along its pathway.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Fresh,
    R1Bound,
    /// Termolecular only.
    R2Bound,
    FinalBound,
    LinkerBound,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Fresh => "Fresh",
            Stage::R1Bound => "R1Bound",
            Stage::R2Bound => "R2Bound",
            Stage::FinalBound => "FinalBound",
            Stage::LinkerBound => "LinkerBound",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

const BI_STAGES: [Stage; 4] = [
    Stage::Fresh,
    Stage::R1Bound,
    Stage::FinalBound,
    Stage::LinkerBound,
];
const TER_STAGES: [Stage; 5] = [
    Stage::Fresh,
    Stage::R1Bound,
    Stage::R2Bound,
    Stage::FinalBound,
    Stage::LinkerBound,
];

/// One forward step of a gadget's intended pathway.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PathwayStep {
    /// `invader` binds the exposed toehold at `site` of the input gate in
    /// stage `from` and displaces `displaced`. `sink` marks a displaced
    /// strand that is consumed rather than returned to solution.
    Displace {
        from: Stage,
        to: Stage,
        invader: Strand,
        site: Site,
        displaced: Strand,
        sink: bool,
    },
    /// The linker tail of a `LinkerBound` gate opens the output gate.
    Release { products: Vec<Strand> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gadget {
    pub reaction: ReactionId,
    pub reactants: Vec<Species>,
    pub products: Vec<Species>,
    pub linker_toehold: Domain,
    /// `g1` as compiled (stage `Fresh`).
    pub input_gate: Complex,
    /// `g2`, holding one product strand per product.
    pub output_gate: Complex,
    pub linker: Strand,
    pub cover: Strand,
    /// Initially bound buffers in binding order: buffer1, then buffer2 for
    /// termolecular gadgets.
    pub buffers: Vec<Strand>,
}

impl Gadget {
    pub fn arity(&self) -> usize {
        self.reactants.len()
    }

    pub fn final_reactant(&self) -> &Species {
        self.reactants
            .last()
            .expect("gadgets have 2 or 3 reactants")
    }

    pub fn stages(&self) -> &'static [Stage] {
        if self.arity() == 3 {
            &TER_STAGES
        } else {
            &BI_STAGES
        }
    }

    /// Position of `stage` along this gadget's pathway, which is also the
    /// number of reactant binding steps already taken.
    pub fn stage_index(&self, stage: Stage) -> Option<usize> {
        self.stages().iter().position(|&s| s == stage)
    }

    /// Fuels consumed per firing: the linker.
    pub fn fuels(&self) -> Vec<&Strand> {
        vec![&self.linker]
    }

    pub fn backbone(&self) -> &Strand {
        &self.input_gate.strands[0]
    }

    /// Reactants held by a gate in `stage` that are not yet accounted for
    /// as consumed products. At `LinkerBound` the final reactant has been
    /// displaced into the sink but the reaction has not completed, so all
    /// reactants count.
    pub fn bound_reactants(&self, stage: Stage) -> &[Species] {
        let k = self.arity();
        let idx = self.stage_index(stage).expect("stage of this gadget");
        &self.reactants[..idx.min(k)]
    }

    /// `g1` materialised at `stage`. Strand 0 is the backbone; top strands
    /// follow in left-to-right order of the backbone positions they cover.
    pub fn input_gate_at(&self, stage: Stage) -> Complex {
        let k = self.arity();
        let s = self.stage_index(stage).expect("stage of this gadget");
        // (leftmost backbone position, strand, (own domain, backbone position) bonds)
        type Top = (usize, Strand, Vec<(usize, usize)>);
        let mut tops: Vec<Top> = Vec::new();
        for (i, species) in self.reactants.iter().enumerate() {
            let displaced_final = stage == Stage::LinkerBound && i == k - 1;
            if i < s && !displaced_final {
                tops.push((
                    2 * i,
                    species_strand(species),
                    vec![(0, 2 * i), (1, 2 * i + 1)],
                ));
            }
        }
        for (i, buffer) in self.buffers.iter().enumerate() {
            if i >= s {
                tops.push((
                    2 * i + 1,
                    buffer.clone(),
                    vec![(0, 2 * i + 1), (1, 2 * i + 2)],
                ));
            }
        }
        if s < k {
            tops.push((
                2 * k - 1,
                self.cover.clone(),
                vec![(0, 2 * k - 1), (1, 2 * k)],
            ));
        }
        if stage == Stage::LinkerBound {
            tops.push((
                2 * k - 1,
                self.linker.clone(),
                vec![(0, 2 * k - 1), (1, 2 * k)],
            ));
        }
        tops.sort_by_key(|t| t.0);

        let mut c = Complex::single(self.backbone().clone());
        for (_, strand, pairs) in tops {
            let idx = c.strands.len();
            c.strands.push(strand);
            for (own, backbone) in pairs {
                c.bond(Site::new(idx, own), Site::new(0, backbone));
            }
        }
        c
    }

    /// The intended forward pathway, ending with product release.
    pub fn pathway(&self) -> Vec<PathwayStep> {
        let k = self.arity();
        let stages = self.stages();
        let mut steps = Vec::with_capacity(k + 2);
        for s in 0..k {
            let displaced = if s < k - 1 {
                self.buffers[s].clone()
            } else {
                self.cover.clone()
            };
            steps.push(PathwayStep::Displace {
                from: stages[s],
                to: stages[s + 1],
                invader: species_strand(&self.reactants[s]),
                site: Site::new(0, 2 * s),
                displaced,
                sink: false,
            });
        }
        steps.push(PathwayStep::Displace {
            from: Stage::FinalBound,
            to: Stage::LinkerBound,
            invader: self.linker.clone(),
            site: Site::new(0, 2 * k),
            displaced: species_strand(self.final_reactant()),
            sink: true,
        });
        steps.push(PathwayStep::Release {
            products: self.products.iter().map(species_strand).collect(),
        });
        steps
    }

    /// The displacement step that leaves stage `from`, if any.
    pub fn step_from(&self, from: Stage) -> Option<PathwayStep> {
        self.pathway().into_iter().find(|s| match s {
            PathwayStep::Displace { from: f, .. } => *f == from,
            PathwayStep::Release { .. } => false,
        })
    }
}

/// Builds the gadget for one bi- or termolecular reaction.
pub fn compile_reaction(r: &Reaction, asg: &ToeholdAssignment) -> Result<Gadget, CompileError> {
    let k = r.arity();
    if !(2..=3).contains(&k) {
        return Err(CompileError::Arity(ArityError {
            reaction: r.id,
            arity: k,
        }));
    }
    let tr = asg
        .linker(r.id)
        .cloned()
        .ok_or(CompileError::MissingToehold(r.id))?;
    let t = asg.universal.clone();
    let fin = r.final_reactant().expect("arity checked");

    let mut backbone = Vec::with_capacity(2 * k + 1);
    for s in &r.reactants {
        backbone.push(t.complement());
        backbone.push(species_domain(s).complement());
    }
    backbone.push(tr.complement());

    let buffers = r.reactants[..k - 1]
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let role = if i == 0 {
                StrandRole::Buffer1
            } else {
                StrandRole::Buffer2
            };
            Strand::new(
                format!("{}_r{}", role.name(), r.id),
                role,
                vec![species_domain(s), t.clone()],
            )
        })
        .collect();
    let cover = Strand::new(
        format!("cover_r{}", r.id),
        StrandRole::Cover,
        vec![species_domain(fin), tr.clone()],
    );
    let linker = Strand::new(
        format!("L_r{}", r.id),
        StrandRole::Linker,
        vec![species_domain(fin), tr.clone(), tail_domain(r.id)],
    );

    let mut out_backbone = vec![tail_domain(r.id).complement()];
    for p in &r.products {
        out_backbone.push(t.complement());
        out_backbone.push(species_domain(p).complement());
    }
    let mut output_gate = Complex::single(Strand::new(
        format!("g2_r{}", r.id),
        StrandRole::Backbone,
        out_backbone,
    ));
    for (i, p) in r.products.iter().enumerate() {
        let idx = output_gate.strands.len();
        output_gate.strands.push(species_strand(p));
        output_gate.bond(Site::new(idx, 0), Site::new(0, 1 + 2 * i));
        output_gate.bond(Site::new(idx, 1), Site::new(0, 2 + 2 * i));
    }

    let mut gadget = Gadget {
        reaction: r.id,
        reactants: r.reactants.clone(),
        products: r.products.clone(),
        linker_toehold: tr,
        input_gate: Complex::single(Strand::new(
            format!("g1_r{}", r.id),
            StrandRole::Backbone,
            backbone,
        )),
        output_gate,
        linker,
        cover,
        buffers,
    };
    gadget.input_gate = gadget.input_gate_at(Stage::Fresh);
    Ok(gadget)
}

/// Something a simulation state or initial count can refer to.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Entity {
    /// A free strand in solution.
    Strand(StrandIdentity),
    /// An input gate at a pathway stage.
    Gate {
        reaction: ReactionId,
        stage: Stage,
    },
    OutputGate(ReactionId),
    /// Waste left by a completed pathway (spent `g1` + `g2`).
    Spent(ReactionId),
    /// Input gate pushed off its pathway by a spurious displacement.
    Stuck {
        reaction: ReactionId,
        stage: Stage,
        event: usize,
    },
}

impl Entity {
    pub fn reaction(&self) -> Option<ReactionId> {
        match *self {
            Entity::Strand(_) => None,
            Entity::Gate { reaction, .. }
            | Entity::OutputGate(reaction)
            | Entity::Spent(reaction)
            | Entity::Stuck { reaction, .. } => Some(reaction),
        }
    }
}

impl fmt::Display for Entity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Entity::Strand(id) => write!(f, "{id}"),
            Entity::Gate { reaction, stage } => write!(f, "g1_r{reaction}@{stage}"),
            Entity::OutputGate(r) => write!(f, "g2_r{r}"),
            Entity::Spent(r) => write!(f, "spent_r{r}"),
            Entity::Stuck {
                reaction,
                stage,
                event,
            } => write!(f, "stuck_r{reaction}@{stage}#{event}"),
        }
    }
}

/// Deliberate rule violations, used to reproduce crosstalk failures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sabotage {
    /// Give two reactions with the same final reactant the same linker
    /// toehold.
    ShareLinkerToehold,
    /// Set one reaction's linker toehold to the universal toehold.
    LinkerEqualsT,
    /// Swap reactants 1 and 2 of one termolecular reaction so that the
    /// buffer1 and buffer2 identity sets overlap.
    SwapOrder,
}

impl Sabotage {
    pub fn name(self) -> &'static str {
        match self {
            Sabotage::ShareLinkerToehold => "share-linker-toehold",
            Sabotage::LinkerEqualsT => "linker-equals-t",
            Sabotage::SwapOrder => "swap-order",
        }
    }
}

/// What a sabotage actually changed. `reactions` is empty when the network
/// offered nothing to break.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SabotageNote {
    pub kind: Sabotage,
    pub reactions: Vec<ReactionId>,
    pub description: String,
}

/// Makes `linker_of(b) = linker_of(a)` for the first two members of the
/// first final-reactant group (by smallest member id) with two or more
/// members.
pub fn sabotage_share_linker(crn: &Crn, asg: &mut ToeholdAssignment) -> SabotageNote {
    let mut groups: Vec<(Species, Vec<ReactionId>)> = final_reactant_groups(crn)
        .into_iter()
        .filter(|(_, m)| m.len() >= 2)
        .collect();
    groups.sort_by_key(|(_, m)| m[0]);
    let Some((species, members)) = groups.into_iter().next() else {
        return SabotageNote {
            kind: Sabotage::ShareLinkerToehold,
            reactions: Vec::new(),
            description: "no two reactions share a final reactant; nothing changed".into(),
        };
    };
    let (a, b) = (members[0], members[1]);
    let shared = asg.linker_of[&a].clone();
    asg.linker_of.insert(b, shared.clone());
    SabotageNote {
        kind: Sabotage::ShareLinkerToehold,
        reactions: vec![a, b],
        description: format!(
            "r{a} and r{b} (final reactant {species}) now share linker toehold {shared}"
        ),
    }
}

/// Sets the linker toehold of one reaction to `t`. Picks the first reaction
/// whose final reactant also occurs in a non-final position somewhere, so
/// that its linker has a non-final reactant to displace; falls back to the
/// first reaction.
pub fn sabotage_linker_equals_t(crn: &Crn, asg: &mut ToeholdAssignment) -> SabotageNote {
    let non_final: BTreeSet<&Species> = crn
        .reactions()
        .iter()
        .filter(|r| r.arity() >= 2)
        .flat_map(|r| &r.reactants[..r.arity() - 1])
        .collect();
    let candidates: Vec<&Reaction> = crn.reactions().iter().filter(|r| r.arity() >= 2).collect();
    let pick = candidates
        .iter()
        .find(|r| non_final.contains(r.final_reactant().expect("arity >= 2")))
        .or(candidates.first());
    let Some(r) = pick else {
        return SabotageNote {
            kind: Sabotage::LinkerEqualsT,
            reactions: Vec::new(),
            description: "no reactions; nothing changed".into(),
        };
    };
    asg.linker_of.insert(r.id, asg.universal.clone());
    SabotageNote {
        kind: Sabotage::LinkerEqualsT,
        reactions: vec![r.id],
        description: format!("r{}'s linker toehold set to {}", r.id, asg.universal),
    }
}

/// Swaps reactants 1 and 2 of the first termolecular reaction whose swap
/// introduces an ordering violation (else the first termolecular one).
pub fn sabotage_swap_order(crn: &Crn) -> (Crn, SabotageNote) {
    let swapped = |r: &Reaction| {
        let mut reactants = r.reactants.clone();
        reactants.swap(0, 1);
        crn.with_reactant_permutation(r.id, reactants)
    };
    let ters: Vec<&Reaction> = crn
        .reactions()
        .iter()
        .filter(|r| r.is_termolecular())
        .collect();
    let pick = ters
        .iter()
        .find(|r| !validate_ordering(&swapped(r)).is_empty())
        .or(ters.first());
    match pick {
        Some(r) => (
            swapped(r),
            SabotageNote {
                kind: Sabotage::SwapOrder,
                reactions: vec![r.id],
                description: format!("swapped reactants 1 and 2 of r{}", r.id),
            },
        ),
        None => (
            crn.clone(),
            SabotageNote {
                kind: Sabotage::SwapOrder,
                reactions: Vec::new(),
                description: "no termolecular reactions; nothing changed".into(),
            },
        ),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompileOptions {
    /// Repair ordering violations instead of failing.
    pub fix_order: bool,
    /// Skip ordering validation entirely.
    pub force: bool,
    /// Initial copies of every input gate, output gate and linker.
    pub fuel_count: u64,
    /// Initial species strand counts.
    pub initial: BTreeMap<Species, u64>,
    pub sabotage: Option<Sabotage>,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions {
            fix_order: false,
            force: false,
            fuel_count: 100,
            initial: BTreeMap::new(),
            sabotage: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CompileError {
    Arity(ArityError),
    Ordering(Vec<OrderingViolation>),
    Infeasible(Infeasible),
    MissingToehold(ReactionId),
}

impl fmt::Display for CompileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CompileError::Arity(e) => write!(f, "{e}"),
            CompileError::Ordering(v) => {
                write!(f, "{} reactant-ordering violation(s)", v.len())?;
                for x in v {
                    write!(f, "\n  {x}")?;
                }
                Ok(())
            }
            CompileError::Infeasible(e) => write!(f, "{e}"),
            CompileError::MissingToehold(r) => write!(f, "no linker toehold assigned to r{r}"),
        }
    }
}

impl core::error::Error for CompileError {}

impl From<ArityError> for CompileError {
    fn from(e: ArityError) -> Self {
        CompileError::Arity(e)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DsdSystem {
    /// The network actually compiled (after any reordering).
    pub crn: Crn,
    pub assignment: ToeholdAssignment,
    pub gadgets: Vec<Gadget>,
    pub initial_counts: BTreeMap<Entity, u64>,
    /// Strand identities removed by garbage collection: the buffer2 set.
    pub gc_sinks: BTreeSet<StrandIdentity>,
    pub sabotage: Option<SabotageNote>,
}

impl DsdSystem {
    /// Builds gadgets for an already-allocated network without any
    /// ordering checks.
    pub fn assemble(
        crn: Crn,
        assignment: ToeholdAssignment,
        fuel_count: u64,
        initial: &BTreeMap<Species, u64>,
    ) -> Result<Self, CompileError> {
        let gadgets = crn
            .reactions()
            .iter()
            .map(|r| compile_reaction(r, &assignment))
            .collect::<Result<Vec<_>, _>>()?;

        let mut initial_counts = BTreeMap::new();
        for s in crn.species() {
            let n = initial.get(s).copied().unwrap_or(0);
            initial_counts.insert(Entity::Strand(species_identity(s)), n);
        }
        for (s, &n) in initial {
            // species named only on the command line still get a strand
            initial_counts.insert(Entity::Strand(species_identity(s)), n);
        }
        for g in &gadgets {
            initial_counts.insert(
                Entity::Gate {
                    reaction: g.reaction,
                    stage: Stage::Fresh,
                },
                fuel_count,
            );
            initial_counts.insert(Entity::OutputGate(g.reaction), fuel_count);
            initial_counts.insert(Entity::Strand(g.linker.identity()), fuel_count);
        }

        let gc_sinks = gadgets
            .iter()
            .flat_map(|g| &g.buffers)
            .filter(|b| b.role == StrandRole::Buffer2)
            .map(Strand::identity)
            .collect();

        Ok(DsdSystem {
            crn,
            assignment,
            gadgets,
            initial_counts,
            gc_sinks,
            sabotage: None,
        })
    }

    pub fn gadget(&self, r: ReactionId) -> Option<&Gadget> {
        self.gadgets.iter().find(|g| g.reaction == r)
    }
}

/// Validate (or repair) ordering, allocate toeholds, build every gadget.
pub fn compile_crn(crn: &Crn, opts: &CompileOptions) -> Result<DsdSystem, CompileError> {
    if let Some(r) = crn.reactions().iter().find(|r| r.arity() < 2) {
        return Err(CompileError::Arity(ArityError {
            reaction: r.id,
            arity: r.arity(),
        }));
    }

    let mut note = None;
    let mut crn = crn.clone();
    let mut force = opts.force;
    if opts.sabotage == Some(Sabotage::SwapOrder) {
        let (swapped, n) = sabotage_swap_order(&crn);
        crn = swapped;
        note = Some(n);
        force = true;
    }

    if !force {
        let violations = validate_ordering(&crn);
        if !violations.is_empty() {
            if !opts.fix_order {
                return Err(CompileError::Ordering(violations));
            }
            crn = solve_ordering(&crn).map_err(CompileError::Infeasible)?;
        }
    }

    let mut assignment = allocate_toeholds(&crn);
    match opts.sabotage {
        Some(Sabotage::ShareLinkerToehold) => {
            note = Some(sabotage_share_linker(&crn, &mut assignment));
        }
        Some(Sabotage::LinkerEqualsT) => {
            note = Some(sabotage_linker_equals_t(&crn, &mut assignment));
        }
        _ => {}
    }

    let mut sys = DsdSystem::assemble(crn, assignment, opts.fuel_count, &opts.initial)?;
    sys.sabotage = note;
    Ok(sys)
}

/// Identity sets of all buffer1 and all buffer2 strands.
pub fn buffer_sets(sys: &DsdSystem) -> (BTreeSet<StrandIdentity>, BTreeSet<StrandIdentity>) {
    let mut b1 = BTreeSet::new();
    let mut b2 = BTreeSet::new();
    for b in sys.gadgets.iter().flat_map(|g| &g.buffers) {
        match b.role {
            StrandRole::Buffer1 => b1.insert(b.identity()),
            StrandRole::Buffer2 => b2.insert(b.identity()),
            _ => false,
        };
    }
    (b1, b2)
}
