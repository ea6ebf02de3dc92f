//! Gillespie simulation of a compiled system and the map back to CRN
//! species counts.
//!
//! The low-level network has one reaction per forward pathway step (and
//! optionally per spurious displacement), plus a sink per garbage-collected
//! buffer2 identity. Rates default to 1: the point is to exercise the
//! pathway logic, not to predict kinetics.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::analyzer::{enumerate_interactions, AnalyzerOptions, Classification, EventKind, GcMode};
use crate::compiler::{species_identity, DsdSystem, Entity, PathwayStep, Stage};
use crate::crn::{ReactionId, Species};
use crate::dsd::StrandIdentity;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SsaOptions {
    pub gc: GcMode,
    pub include_spurious: bool,
    /// Rate per reaction label; unlisted reactions run at rate 1.
    pub rate_overrides: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Channel {
    /// Forward pathway step leaving `from`.
    Step {
        gadget: ReactionId,
        from: Stage,
    },
    Release {
        gadget: ReactionId,
    },
    /// Spurious displacement; `event` indexes the analyzer report.
    Spurious {
        gadget: ReactionId,
        stage: Stage,
        event: usize,
    },
    GcSink(StrandIdentity),
}

#[derive(Clone, Debug, PartialEq)]
pub struct LowReaction {
    pub label: String,
    pub channel: Channel,
    /// With multiplicity.
    pub reactants: Vec<Entity>,
    pub products: Vec<Entity>,
    pub rate: f64,
}

impl LowReaction {
    /// Net change per firing, sorted by entity.
    pub fn delta(&self) -> Vec<(Entity, i64)> {
        let mut d: BTreeMap<&Entity, i64> = BTreeMap::new();
        for e in &self.reactants {
            *d.entry(e).or_default() -= 1;
        }
        for e in &self.products {
            *d.entry(e).or_default() += 1;
        }
        d.into_iter()
            .filter(|&(_, v)| v != 0)
            .map(|(e, v)| (e.clone(), v))
            .collect()
    }
}

/// One low-level reaction per intended (and optionally spurious) event of
/// the crosstalk report, plus buffer2 sinks when garbage collection is on.
/// Reverse events are left out: they only undo forward steps.
pub fn build_ssa_network(sys: &DsdSystem, opts: &SsaOptions) -> Vec<LowReaction> {
    let report = enumerate_interactions(sys, &AnalyzerOptions { gc: opts.gc });
    let mut out = Vec::new();
    for (idx, e) in report.events.iter().enumerate() {
        let g = sys
            .gadget(e.target.gadget)
            .expect("event on a compiled gadget");
        let gate = Entity::Gate {
            reaction: g.reaction,
            stage: e.target.stage,
        };
        let (label, channel, reactants, products) = match (e.classification, e.kind) {
            (Classification::Intended, EventKind::Displacement) => {
                let Some(PathwayStep::Displace {
                    to,
                    displaced,
                    sink,
                    ..
                }) = g.step_from(e.target.stage)
                else {
                    unreachable!("intended displacement has a pathway step")
                };
                let mut products = vec![Entity::Gate {
                    reaction: g.reaction,
                    stage: to,
                }];
                if !sink {
                    products.push(Entity::Strand(displaced.identity()));
                }
                (
                    format!("r{}:{}", g.reaction, e.target.stage),
                    Channel::Step {
                        gadget: g.reaction,
                        from: e.target.stage,
                    },
                    vec![Entity::Strand(e.invader.clone()), gate],
                    products,
                )
            }
            (Classification::Intended, EventKind::ProductRelease) => {
                let mut products = vec![Entity::Spent(g.reaction)];
                products.extend(
                    g.products
                        .iter()
                        .map(|p| Entity::Strand(species_identity(p))),
                );
                (
                    format!("r{}:release", g.reaction),
                    Channel::Release { gadget: g.reaction },
                    vec![gate, Entity::OutputGate(g.reaction)],
                    products,
                )
            }
            (Classification::Spurious, _) if opts.include_spurious => {
                let mut products = vec![Entity::Stuck {
                    reaction: g.reaction,
                    stage: e.target.stage,
                    event: idx,
                }];
                products.extend(e.displaced.clone().map(Entity::Strand));
                (
                    format!("spurious{idx}:r{}:{}", g.reaction, e.target.stage),
                    Channel::Spurious {
                        gadget: g.reaction,
                        stage: e.target.stage,
                        event: idx,
                    },
                    vec![Entity::Strand(e.invader.clone()), gate],
                    products,
                )
            }
            _ => continue,
        };
        out.push(LowReaction {
            rate: opts.rate_overrides.get(&label).copied().unwrap_or(1.0),
            label,
            channel,
            reactants,
            products,
        });
    }
    if opts.gc == GcMode::Assumed {
        for id in &sys.gc_sinks {
            let label = format!("gc:{id}");
            out.push(LowReaction {
                rate: opts.rate_overrides.get(&label).copied().unwrap_or(1.0),
                label,
                channel: Channel::GcSink(id.clone()),
                reactants: vec![Entity::Strand(id.clone())],
                products: Vec::new(),
            });
        }
    }
    out
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SystemState {
    pub counts: BTreeMap<Entity, u64>,
    pub time: f64,
}

impl SystemState {
    pub fn initial(sys: &DsdSystem) -> Self {
        SystemState {
            counts: sys.initial_counts.clone(),
            time: 0.0,
        }
    }

    pub fn count(&self, e: &Entity) -> u64 {
        self.counts.get(e).copied().unwrap_or(0)
    }

    /// Applies a delta; fails if any count would go negative.
    pub fn apply(&mut self, delta: &[(Entity, i64)]) -> Result<(), SimError> {
        for (e, d) in delta {
            let now = self.count(e) as i64 + d;
            if now < 0 {
                return Err(SimError::NegativeCount(e.clone()));
            }
            self.counts.insert(e.clone(), now as u64);
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Stop {
    MaxSteps(u64),
    MaxTime(f64),
    /// Run until no reaction can fire. Always applies in addition to the
    /// other conditions.
    Quiescence,
}

impl Stop {
    pub fn validate(self) -> Result<Self, SimError> {
        match self {
            Stop::MaxSteps(0) => Err(SimError::UnreachableStop(self)),
            Stop::MaxTime(t) if t <= 0.0 || !t.is_finite() => Err(SimError::UnreachableStop(self)),
            _ => Ok(self),
        }
    }
}

impl fmt::Display for Stop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stop::MaxSteps(n) => write!(f, "max-steps {n}"),
            Stop::MaxTime(t) => write!(f, "max-time {t}"),
            Stop::Quiescence => f.write_str("quiescence"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    Quiescent,
    MaxSteps,
    MaxTime,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryStep {
    pub time: f64,
    /// Index into the network.
    pub reaction: usize,
    pub delta: Vec<(Entity, i64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub seed: u64,
    pub steps: Vec<TrajectoryStep>,
    pub final_state: SystemState,
    pub reason: StopReason,
}

impl Trajectory {
    /// Every state along the trajectory, starting with `initial`.
    pub fn replay(&self, initial: &SystemState) -> Result<Vec<SystemState>, SimError> {
        let mut states = vec![initial.clone()];
        let mut s = initial.clone();
        for step in &self.steps {
            s.apply(&step.delta)?;
            s.time = step.time;
            states.push(s.clone());
        }
        Ok(states)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SimError {
    UnreachableStop(Stop),
    NegativeCount(Entity),
    UnknownEntity(Entity),
    Audit(String),
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::UnreachableStop(s) => write!(f, "stop condition {s} can never be met"),
            SimError::NegativeCount(e) => write!(f, "count of {e} would go negative"),
            SimError::UnknownEntity(e) => write!(f, "{e} is not part of the compiled system"),
            SimError::Audit(m) => write!(f, "trajectory audit failed: {m}"),
        }
    }
}

impl core::error::Error for SimError {}

/// Uniform in the open interval (0, 1).
fn open_unit(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Exact stochastic simulation (direct method). Propensity is the rate
/// times, for each distinct reactant, `C(count, multiplicity)`.
pub fn simulate(
    network: &[LowReaction],
    initial: &SystemState,
    seed: u64,
    stop: Stop,
) -> Result<Trajectory, SimError> {
    let stop = stop.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut index: BTreeMap<Entity, usize> = BTreeMap::new();
    for e in initial.counts.keys() {
        let n = index.len();
        index.entry(e.clone()).or_insert(n);
    }
    for r in network {
        for e in r.reactants.iter().chain(&r.products) {
            let n = index.len();
            index.entry(e.clone()).or_insert(n);
        }
    }
    let mut counts = vec![0u64; index.len()];
    for (e, &n) in &initial.counts {
        counts[index[e]] = n;
    }
    let needs: Vec<Vec<(usize, u64)>> = network
        .iter()
        .map(|r| {
            let mut m: BTreeMap<usize, u64> = BTreeMap::new();
            for e in &r.reactants {
                *m.entry(index[e]).or_default() += 1;
            }
            m.into_iter().collect()
        })
        .collect();
    let deltas: Vec<Vec<(Entity, i64)>> = network.iter().map(LowReaction::delta).collect();
    let idx_deltas: Vec<Vec<(usize, i64)>> = deltas
        .iter()
        .map(|d| d.iter().map(|(e, v)| (index[e], *v)).collect())
        .collect();

    let mut time = 0.0;
    let mut steps = Vec::new();
    let mut props = vec![0.0; network.len()];
    let reason = loop {
        if let Stop::MaxSteps(n) = stop {
            if steps.len() as u64 >= n {
                break StopReason::MaxSteps;
            }
        }
        let mut total = 0.0;
        for (i, r) in network.iter().enumerate() {
            let a = needs[i]
                .iter()
                .fold(r.rate, |acc, &(e, k)| acc * binomial(counts[e], k));
            props[i] = a;
            total += a;
        }
        if total <= 0.0 || total.is_nan() {
            break StopReason::Quiescent;
        }
        let dt = -libm::log(open_unit(&mut rng)) / total;
        if let Stop::MaxTime(t) = stop {
            if time + dt > t {
                break StopReason::MaxTime;
            }
        }
        let target = open_unit(&mut rng) * total;
        let mut acc = 0.0;
        let mut chosen = None;
        for (i, &a) in props.iter().enumerate() {
            if a > 0.0 {
                acc += a;
                chosen = Some(i);
                if target < acc {
                    break;
                }
            }
        }
        let chosen = chosen.expect("positive total propensity");
        time += dt;
        for &(e, v) in &idx_deltas[chosen] {
            counts[e] = (counts[e] as i64 + v) as u64;
        }
        steps.push(TrajectoryStep {
            time,
            reaction: chosen,
            delta: deltas[chosen].clone(),
        });
    };

    let final_counts = index
        .into_iter()
        .filter(|(e, i)| counts[*i] > 0 || initial.counts.contains_key(e))
        .map(|(e, i)| (e, counts[i]))
        .collect();
    Ok(Trajectory {
        seed,
        steps,
        final_state: SystemState {
            counts: final_counts,
            time,
        },
        reason,
    })
}

/// Species view of a low-level state.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MappedState {
    /// Free species strands, one entry per CRN species.
    pub species: BTreeMap<Species, u64>,
    /// Reactants held by gates part-way through their pathway.
    pub in_flight: BTreeMap<Species, u64>,
}

impl MappedState {
    /// `species + in_flight` per species.
    pub fn total(&self) -> BTreeMap<Species, i64> {
        let mut t: BTreeMap<Species, i64> = BTreeMap::new();
        for (s, &n) in self.species.iter().chain(&self.in_flight) {
            *t.entry(s.clone()).or_default() += n as i64;
        }
        t
    }
}

/// Maps a low-level state to CRN species counts. Fuels, buffers, covers
/// and linkers never appear; gates part-way through their pathway report
/// their bound reactants as in flight.
pub fn map_state(sys: &DsdSystem, s: &SystemState) -> Result<MappedState, SimError> {
    let known = crate::analyzer::free_strand_pool(sys, GcMode::Off);
    let mut out = MappedState::default();
    let mut by_identity: BTreeMap<StrandIdentity, &Species> = BTreeMap::new();
    for sp in sys.crn.species() {
        out.species.insert(sp.clone(), 0);
        by_identity.insert(species_identity(sp), sp);
    }
    for (e, &n) in &s.counts {
        match e {
            Entity::Strand(id) => {
                if let Some(sp) = by_identity.get(id) {
                    *out.species.get_mut(*sp).expect("inserted") += n;
                } else if !known.contains_key(id) {
                    return Err(SimError::UnknownEntity(e.clone()));
                }
            }
            Entity::Gate { reaction, stage }
            | Entity::Stuck {
                reaction, stage, ..
            } => {
                let g = sys
                    .gadget(*reaction)
                    .filter(|g| g.stage_index(*stage).is_some())
                    .ok_or_else(|| SimError::UnknownEntity(e.clone()))?;
                if n > 0 {
                    for sp in g.bound_reactants(*stage) {
                        *out.in_flight.entry(sp.clone()).or_default() += n;
                    }
                }
            }
            Entity::OutputGate(r) | Entity::Spent(r) => {
                if sys.gadget(*r).is_none() {
                    return Err(SimError::UnknownEntity(e.clone()));
                }
            }
        }
    }
    Ok(out)
}

fn gate_total(s: &SystemState, r: ReactionId) -> u64 {
    s.counts
        .iter()
        .filter(|(e, _)| {
            matches!(e, Entity::Gate { reaction, .. } | Entity::Stuck { reaction, .. } | Entity::Spent(reaction) if *reaction == r)
        })
        .map(|(_, &n)| n)
        .sum()
}

/// Completed pathways per reaction, as counted by an audit.
pub type Completions = BTreeMap<ReactionId, u64>;

/// Replays `traj` and checks, at every step, that
/// - forward steps and sinks leave `species + in_flight` unchanged,
/// - each product release changes it by exactly `products - reactants` of
///   its reaction,
/// - per reaction, gates at all stages plus completed pathways stay
///   constant.
///
/// Spurious channels fail the audit: it is meant for clean systems.
pub fn audit_trajectory(
    sys: &DsdSystem,
    network: &[LowReaction],
    initial: &SystemState,
    traj: &Trajectory,
) -> Result<Completions, SimError> {
    let fail = |m: String| Err(SimError::Audit(m));
    let conserved: BTreeMap<ReactionId, u64> = sys
        .gadgets
        .iter()
        .map(|g| (g.reaction, gate_total(initial, g.reaction)))
        .collect();
    let mut completions = Completions::new();
    let mut state = initial.clone();
    let mut before = map_state(sys, &state)?.total();
    for (i, step) in traj.steps.iter().enumerate() {
        state.apply(&step.delta)?;
        let after = map_state(sys, &state)?.total();
        let mut expected: BTreeMap<Species, i64> = BTreeMap::new();
        match &network[step.reaction].channel {
            Channel::Step { .. } | Channel::GcSink(_) => {}
            Channel::Release { gadget } => {
                let g = sys.gadget(*gadget).expect("gadget");
                for s in &g.reactants {
                    *expected.entry(s.clone()).or_default() -= 1;
                }
                for s in &g.products {
                    *expected.entry(s.clone()).or_default() += 1;
                }
                *completions.entry(*gadget).or_default() += 1;
            }
            Channel::Spurious { .. } => {
                return fail(format!(
                    "step {i} fires spurious channel {}",
                    network[step.reaction].label
                ))
            }
        }
        for s in sys.crn.species() {
            let got = after.get(s).copied().unwrap_or(0) - before.get(s).copied().unwrap_or(0);
            let want = expected.get(s).copied().unwrap_or(0);
            if got != want {
                return fail(format!(
                    "step {i} ({}): {s} changed by {got}, expected {want}",
                    network[step.reaction].label
                ));
            }
        }
        for (&r, &n) in &conserved {
            let now = gate_total(&state, r);
            if now != n {
                return fail(format!("step {i}: gates of r{r} total {now}, expected {n}"));
            }
        }
        before = after;
    }
    if state
        .counts
        .iter()
        .any(|(e, &n)| traj.final_state.count(e) != n)
    {
        return fail("replay does not reproduce the final state".into());
    }
    Ok(completions)
}
