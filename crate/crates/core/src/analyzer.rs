//! Static crosstalk analysis.
//!
//! Every free strand that can exist at some point of some intended pathway
//! is paired with every input gate at every pathway stage. An invader
//! *attaches* when it carries the complement of an exposed toehold; it
//! *displaces* when the domain next to that toehold on the invader matches
//! the recognition domain hybridised next to the toehold on the gate, and
//! branch migration strips the incumbent down to toehold-only contacts.
//! Attachment without displacement is transient and not reported.
//!
//! Each displacement is classified against the gadget's intended pathway:
//! a forward step is `Intended`, the exact undo of an earlier step by the
//! strand that step released is `IntendedReverse` (benign, reversible),
//! anything else is `Spurious`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Write as _;

use crate::compiler::{species_strand, DsdSystem, Gadget, PathwayStep, Stage};
use crate::crn::{ReactionId, Species};
use crate::dsd::{exposed_sites, Complex, Domain, DomainKind, Site, StrandIdentity, StrandRole};

/// Whether released buffer2 strands are removed from solution at once.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GcMode {
    #[default]
    Assumed,
    Off,
}

impl GcMode {
    pub fn name(self) -> &'static str {
        match self {
            GcMode::Assumed => "assumed",
            GcMode::Off => "off",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AnalyzerOptions {
    pub gc: GcMode,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GateState {
    pub gadget: ReactionId,
    pub stage: Stage,
}

impl fmt::Display for GateState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g1_r{}@{}", self.gadget, self.stage)
    }
}

/// Every input gate at every stage of its pathway, in gadget then stage
/// order. Gates evolve independently, so no cross-gadget product is formed.
pub fn reachable_states(sys: &DsdSystem) -> Vec<(GateState, Complex)> {
    sys.gadgets
        .iter()
        .flat_map(|g| {
            g.stages().iter().map(move |&stage| {
                (
                    GateState {
                        gadget: g.reaction,
                        stage,
                    },
                    g.input_gate_at(stage),
                )
            })
        })
        .collect()
}

/// Where a free strand comes from.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Source {
    Species(Species),
    Linker(ReactionId),
    Cover(ReactionId),
    Buffer1(ReactionId),
    Buffer2(ReactionId),
}

impl Source {
    pub fn role(&self) -> StrandRole {
        match self {
            Source::Species(_) => StrandRole::Species,
            Source::Linker(_) => StrandRole::Linker,
            Source::Cover(_) => StrandRole::Cover,
            Source::Buffer1(_) => StrandRole::Buffer1,
            Source::Buffer2(_) => StrandRole::Buffer2,
        }
    }

    pub fn reaction(&self) -> Option<ReactionId> {
        match *self {
            Source::Species(_) => None,
            Source::Linker(r) | Source::Cover(r) | Source::Buffer1(r) | Source::Buffer2(r) => {
                Some(r)
            }
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Species(s) => write!(f, "{s}"),
            Source::Linker(r) => write!(f, "L_r{r}"),
            Source::Cover(r) => write!(f, "cover_r{r}"),
            Source::Buffer1(r) => write!(f, "buffer1_r{r}"),
            Source::Buffer2(r) => write!(f, "buffer2_r{r}"),
        }
    }
}

pub type StrandPool = BTreeMap<StrandIdentity, BTreeSet<Source>>;

fn pool_name(sources: &BTreeSet<Source>) -> String {
    let mut out = String::new();
    for (i, s) in sources.iter().enumerate() {
        if i > 0 {
            out.push('/');
        }
        let _ = write!(out, "{s}");
    }
    out
}

/// Every strand free at some point of some intended pathway: species
/// strands (inputs, products and linker-displaced final reactants are all
/// species strands), linkers, covers and buffers. With [`GcMode::Assumed`]
/// strands released as buffer2 never enter solution; an identity stays in
/// the pool if something other than a buffer2 release also produces it.
pub fn free_strand_pool(sys: &DsdSystem, gc: GcMode) -> StrandPool {
    let mut pool = StrandPool::new();
    let mut add = |id: StrandIdentity, src: Source| {
        pool.entry(id).or_default().insert(src);
    };
    for s in sys.crn.species() {
        add(species_strand(s).identity(), Source::Species(s.clone()));
    }
    for g in &sys.gadgets {
        add(g.linker.identity(), Source::Linker(g.reaction));
        add(g.cover.identity(), Source::Cover(g.reaction));
        for b in &g.buffers {
            match b.role {
                StrandRole::Buffer1 => add(b.identity(), Source::Buffer1(g.reaction)),
                StrandRole::Buffer2 if gc == GcMode::Off => {
                    add(b.identity(), Source::Buffer2(g.reaction))
                }
                _ => {}
            }
        }
    }
    pool
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Classification {
    Intended,
    /// Undo of an earlier intended step by the strand it released.
    IntendedReverse,
    Spurious,
}

impl Classification {
    pub fn name(self) -> &'static str {
        match self {
            Classification::Intended => "intended",
            Classification::IntendedReverse => "reverse",
            Classification::Spurious => "spurious",
        }
    }
}

/// The allocation rule whose violation explains a spurious event.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    /// Two reactions with the same final reactant share a linker toehold.
    SharedLinkerToehold,
    /// A linker toehold equals the universal toehold.
    LinkerEqualsUniversal,
    /// A buffer1 and a buffer2 strand have the same identity.
    BufferIdentityCollision,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::SharedLinkerToehold => "shared-linker-toehold",
            Rule::LinkerEqualsUniversal => "linker-equals-t",
            Rule::BufferIdentityCollision => "buffer-identity-collision",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventKind {
    Displacement,
    /// Abstract trigger of the output gate by the linker tail.
    ProductRelease,
}

/// Branch migration direction along the gate backbone.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InteractionEvent {
    pub kind: EventKind,
    pub invader: StrandIdentity,
    pub invader_name: String,
    pub target: GateState,
    /// Exposed domain instance the invader attaches to.
    pub site: Site,
    pub site_domain: Domain,
    pub direction: Option<Direction>,
    pub displaced: Option<StrandIdentity>,
    pub displaced_name: Option<String>,
    pub classification: Classification,
    pub rule: Option<Rule>,
    pub narrative: String,
}

impl InteractionEvent {
    fn sort_key(
        &self,
    ) -> (
        GateState,
        EventKind,
        Site,
        &StrandIdentity,
        Option<Direction>,
    ) {
        (
            self.target,
            self.kind,
            self.site,
            &self.invader,
            self.direction,
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CrosstalkReport {
    pub gc: GcMode,
    pub events: Vec<InteractionEvent>,
    pub spurious_count: usize,
    /// Spurious events per violated rule.
    pub rule_counts: BTreeMap<Rule, usize>,
    /// Spurious events no rule explains.
    pub unattributed: usize,
}

impl CrosstalkReport {
    pub fn spurious(&self) -> impl Iterator<Item = &InteractionEvent> {
        self.events
            .iter()
            .filter(|e| e.classification == Classification::Spurious)
    }

    pub fn count(&self, c: Classification) -> usize {
        self.events.iter().filter(|e| e.classification == c).count()
    }
}

/// Identities released from gates under more than one role. Such a strand
/// cannot be told apart from its namesake, so undoing a step with it is not
/// benign.
fn ambiguous_releases(sys: &DsdSystem) -> BTreeMap<StrandIdentity, BTreeSet<StrandRole>> {
    let mut roles: BTreeMap<StrandIdentity, BTreeSet<StrandRole>> = BTreeMap::new();
    for g in &sys.gadgets {
        roles
            .entry(g.cover.identity())
            .or_default()
            .insert(StrandRole::Cover);
        for b in &g.buffers {
            roles.entry(b.identity()).or_default().insert(b.role);
        }
    }
    roles.retain(|_, r| r.len() > 1);
    roles
}

fn ambiguity_rule(roles: &BTreeSet<StrandRole>) -> Rule {
    if roles.contains(&StrandRole::Buffer1) && roles.contains(&StrandRole::Buffer2) {
        Rule::BufferIdentityCollision
    } else {
        Rule::LinkerEqualsUniversal
    }
}

struct Displacement {
    site: Site,
    direction: Direction,
    incumbent: usize,
}

/// Displacements `invader` can perform on `complex`.
fn displacements(invader: &[Domain], complex: &Complex) -> Vec<Displacement> {
    let mut out = Vec::new();
    let exposure = exposed_sites(complex);
    for site in exposure.toeholds(complex) {
        let target = &complex.strands[site.strand].domains;
        let toehold = &target[site.domain];
        for (i, d) in invader.iter().enumerate() {
            if !d.is_complement_of(toehold) {
                continue;
            }
            for direction in [Direction::Left, Direction::Right] {
                let step = |m: usize| -> Option<(usize, usize)> {
                    match direction {
                        Direction::Left => Some((i.checked_sub(m)?, site.domain.checked_sub(m)?)),
                        Direction::Right => Some((i + m, site.domain + m)),
                    }
                };
                let mut incumbent = None;
                let mut taken = BTreeSet::new();
                let mut m = 1;
                while let Some((fi, bi)) = step(m) {
                    let (Some(fd), Some(bd)) = (invader.get(fi), target.get(bi)) else {
                        break;
                    };
                    if !fd.is_complement_of(bd) {
                        break;
                    }
                    if m == 1 && fd.kind != DomainKind::Recognition {
                        break;
                    }
                    let Some(partner) = complex.partner(Site::new(site.strand, bi)) else {
                        break;
                    };
                    if partner.strand == site.strand
                        || incumbent.is_some_and(|s| s != partner.strand)
                    {
                        break;
                    }
                    incumbent = Some(partner.strand);
                    taken.insert(partner);
                    m += 1;
                }
                let Some(incumbent) = incumbent else { continue };
                let holds_on = complex.bonds.iter().any(|b| {
                    [b.a, b.b].iter().any(|s| {
                        s.strand == incumbent
                            && !taken.contains(s)
                            && complex.domain(*s).is_some_and(|d| !d.is_toehold())
                    })
                });
                if !holds_on {
                    out.push(Displacement {
                        site,
                        direction,
                        incumbent,
                    });
                }
            }
        }
    }
    out
}

struct Classifier<'a> {
    sys: &'a DsdSystem,
    ambiguous: BTreeMap<StrandIdentity, BTreeSet<StrandRole>>,
}

impl Classifier<'_> {
    fn classify(
        &self,
        g: &Gadget,
        stage: Stage,
        invader: &StrandIdentity,
        sources: &BTreeSet<Source>,
        complex: &Complex,
        d: &Displacement,
    ) -> (Classification, Option<Rule>) {
        let incumbent = &complex.strands[d.incumbent];
        let incumbent_id = incumbent.identity();

        if let Some(PathwayStep::Displace {
            invader: inv,
            site,
            displaced,
            ..
        }) = g.step_from(stage)
        {
            if inv.identity() == *invader && site == d.site && displaced.identity() == incumbent_id
            {
                return (Classification::Intended, None);
            }
        }

        // Which step put the incumbent here, and what did it release?
        let held: BTreeSet<usize> = complex
            .bonds
            .iter()
            .filter_map(|b| match (b.a.strand, b.b.strand) {
                (0, s) if s == d.incumbent => Some(b.a.domain),
                (s, 0) if s == d.incumbent => Some(b.b.domain),
                _ => None,
            })
            .collect();
        let placed_by = g.pathway().into_iter().find_map(|s| match s {
            PathwayStep::Displace {
                invader: inv,
                site,
                displaced,
                ..
            } if inv.identity() == incumbent_id
                && site.strand == 0
                && held.contains(&site.domain) =>
            {
                Some(displaced.identity())
            }
            _ => None,
        });
        if placed_by.as_ref() == Some(invader) {
            return match self.ambiguous.get(invader) {
                Some(roles) => (Classification::Spurious, Some(ambiguity_rule(roles))),
                None => (Classification::IntendedReverse, None),
            };
        }

        (
            Classification::Spurious,
            self.attribute(g, invader, sources, complex, d),
        )
    }

    fn attribute(
        &self,
        g: &Gadget,
        invader: &StrandIdentity,
        sources: &BTreeSet<Source>,
        complex: &Complex,
        d: &Displacement,
    ) -> Option<Rule> {
        let asg = &self.sys.assignment;
        let toehold = complex.domain(d.site).expect("exposed site").complement();
        let linker_slot = d.site.strand == 0 && d.site.domain == 2 * g.arity();
        let linker_like = |s: &Source| matches!(s, Source::Linker(_) | Source::Cover(_));

        if toehold == asg.universal {
            if linker_slot && g.linker_toehold == asg.universal {
                return Some(Rule::LinkerEqualsUniversal);
            }
            let from_t_linker = sources.iter().any(|s| {
                linker_like(s)
                    && s.reaction()
                        .and_then(|r| asg.linker(r))
                        .is_some_and(|d| *d == asg.universal)
            });
            if from_t_linker {
                return Some(Rule::LinkerEqualsUniversal);
            }
        }
        if linker_slot {
            let shares = sources.iter().any(|s| {
                let Some(r) = s.reaction() else { return false };
                let Some(other) = self.sys.gadget(r) else {
                    return false;
                };
                linker_like(s)
                    && r != g.reaction
                    && other.final_reactant() == g.final_reactant()
                    && other.linker_toehold == g.linker_toehold
            });
            if shares {
                return Some(Rule::SharedLinkerToehold);
            }
        }
        self.ambiguous.get(invader).map(ambiguity_rule)
    }
}

/// Enumerates every displacement between a free strand and a reachable
/// gate state, plus one product-release event per gadget.
pub fn enumerate_interactions(sys: &DsdSystem, opts: &AnalyzerOptions) -> CrosstalkReport {
    let pool = free_strand_pool(sys, opts.gc);
    let states = reachable_states(sys);
    let classifier = Classifier {
        sys,
        ambiguous: ambiguous_releases(sys),
    };
    let mut events = Vec::new();

    for (state, complex) in &states {
        let g = sys
            .gadget(state.gadget)
            .expect("state of a compiled gadget");
        for (identity, sources) in &pool {
            for d in displacements(&identity.0, complex) {
                let (classification, rule) =
                    classifier.classify(g, state.stage, identity, sources, complex, &d);
                let incumbent = &complex.strands[d.incumbent];
                let invader_name = pool_name(sources);
                let site_domain = complex.domain(d.site).expect("site").clone();
                let narrative = format!(
                    "{invader_name} {identity} binds {site_domain} at {state} and displaces {} {} migrating {}",
                    incumbent.name,
                    incumbent.identity(),
                    match d.direction {
                        Direction::Left => "left",
                        Direction::Right => "right",
                    }
                );
                events.push(InteractionEvent {
                    kind: EventKind::Displacement,
                    invader: identity.clone(),
                    invader_name,
                    target: *state,
                    site: d.site,
                    site_domain,
                    direction: Some(d.direction),
                    displaced: Some(incumbent.identity()),
                    displaced_name: Some(incumbent.name.clone()),
                    classification,
                    rule,
                    narrative,
                });
            }
        }
    }

    for g in &sys.gadgets {
        let bound = g.input_gate_at(Stage::LinkerBound);
        let linker_idx = bound
            .strands
            .iter()
            .position(|s| s.role == StrandRole::Linker)
            .expect("linker bound at LinkerBound");
        let tail = Site::new(linker_idx, g.linker.domains.len() - 1);
        let mut products = String::new();
        for (i, p) in g.products.iter().enumerate() {
            if i > 0 {
                products.push_str(" + ");
            }
            let _ = write!(products, "{p}");
        }
        if products.is_empty() {
            products.push('0');
        }
        events.push(InteractionEvent {
            kind: EventKind::ProductRelease,
            invader: g.linker.identity(),
            invader_name: g.linker.name.clone(),
            target: GateState {
                gadget: g.reaction,
                stage: Stage::LinkerBound,
            },
            site: tail,
            site_domain: bound.domain(tail).expect("tail").clone(),
            direction: None,
            displaced: None,
            displaced_name: None,
            classification: Classification::Intended,
            rule: None,
            narrative: format!(
                "{} tail {} opens g2_r{} releasing {products}",
                g.linker.name,
                g.linker.domains.last().expect("tail"),
                g.reaction
            ),
        });
    }

    events.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    let mut report = CrosstalkReport {
        gc: opts.gc,
        ..Default::default()
    };
    for e in &events {
        if e.classification == Classification::Spurious {
            report.spurious_count += 1;
            match e.rule {
                Some(rule) => *report.rule_counts.entry(rule).or_default() += 1,
                None => report.unattributed += 1,
            }
        }
    }
    report.events = events;
    report
}

/// One line per event, then a summary. An empty report renders as "".
pub fn explain(report: &CrosstalkReport) -> String {
    let mut out = String::new();
    if report.events.is_empty() {
        return out;
    }
    for e in &report.events {
        let _ = write!(
            out,
            "{:<9} {:<26} {} {} -> {} site {}@{}",
            e.classification.name(),
            e.rule.map_or("-", Rule::name),
            e.invader_name,
            e.invader,
            e.target,
            e.site_domain,
            e.site
        );
        match (&e.displaced_name, &e.displaced) {
            (Some(name), Some(id)) => {
                let _ = writeln!(out, " displaces {name} {id}");
            }
            _ => {
                let _ = writeln!(out, " ({})", e.narrative);
            }
        }
    }
    let _ = writeln!(
        out,
        "summary (gc {}): {} events, {} intended, {} reverse, {} spurious",
        report.gc.name(),
        report.events.len(),
        report.count(Classification::Intended),
        report.count(Classification::IntendedReverse),
        report.spurious_count
    );
    for (rule, n) in &report.rule_counts {
        let _ = writeln!(out, "  {}: {n}", rule.name());
    }
    if report.unattributed > 0 {
        let _ = writeln!(out, "  unattributed: {}", report.unattributed);
    }
    out
}
