//! Structured JSON documents. Field names are fixed and every collection
//! is emitted in a defined order, so identical inputs give identical bytes.

use std::collections::BTreeMap;

use serde::Serialize;
use strandc_core::analyzer::{Classification, CrosstalkReport, Direction, EventKind};
use strandc_core::compiler::{species_strand, DsdSystem, SabotageNote};
use strandc_core::dsd::{Complex, DomainKind, Strand};

pub const SYSTEM_FORMAT: &str = "strandc-system/1";
pub const REPORT_FORMAT: &str = "strandc-crosstalk/1";

#[derive(Debug, Serialize)]
pub struct SystemExport {
    pub format: &'static str,
    /// The compiled network, one reaction per entry, after any reordering.
    pub crn: Vec<String>,
    pub domains: Vec<DomainEntry>,
    pub strands: Vec<StrandEntry>,
    pub complexes: Vec<ComplexEntry>,
    pub assignment: AssignmentEntry,
    pub counts: Vec<CountEntry>,
    pub gc_sinks: Vec<String>,
    pub sabotage: Option<SabotageEntry>,
}

#[derive(Debug, Serialize)]
pub struct DomainEntry {
    pub name: String,
    pub kind: &'static str,
}

#[derive(Debug, Serialize)]
pub struct StrandEntry {
    pub name: String,
    pub role: &'static str,
    pub domains: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct ComplexEntry {
    pub name: String,
    pub reaction: usize,
    /// Strand names by index; bonds refer to these indices.
    pub strands: Vec<String>,
    /// `[[strand, domain], [strand, domain]]` pairs.
    pub bonds: Vec<[[usize; 2]; 2]>,
}

#[derive(Debug, Serialize)]
pub struct AssignmentEntry {
    pub universal: String,
    pub label_count: usize,
    pub linkers: Vec<LinkerEntry>,
}

#[derive(Debug, Serialize)]
pub struct LinkerEntry {
    pub reaction: usize,
    pub final_reactant: String,
    pub toehold: String,
}

#[derive(Debug, Serialize)]
pub struct CountEntry {
    pub entity: String,
    pub count: u64,
}

#[derive(Debug, Serialize)]
pub struct SabotageEntry {
    pub kind: &'static str,
    pub reactions: Vec<usize>,
    pub description: String,
}

impl From<&SabotageNote> for SabotageEntry {
    fn from(n: &SabotageNote) -> Self {
        SabotageEntry {
            kind: n.kind.name(),
            reactions: n.reactions.clone(),
            description: n.description.clone(),
        }
    }
}

fn strand_entry(s: &Strand) -> StrandEntry {
    StrandEntry {
        name: s.name.clone(),
        role: s.role.name(),
        domains: s.domains.iter().map(ToString::to_string).collect(),
    }
}

fn complex_entry(name: String, reaction: usize, c: &Complex) -> ComplexEntry {
    ComplexEntry {
        name,
        reaction,
        strands: c.strands.iter().map(|s| s.name.clone()).collect(),
        bonds: c
            .bonds
            .iter()
            .map(|b| [[b.a.strand, b.a.domain], [b.b.strand, b.b.domain]])
            .collect(),
    }
}

pub fn system_export(sys: &DsdSystem) -> SystemExport {
    let mut all: BTreeMap<String, Strand> = BTreeMap::new();
    let mut complexes = Vec::new();
    for sp in sys.crn.species() {
        let s = species_strand(sp);
        all.insert(s.name.clone(), s);
    }
    for g in &sys.gadgets {
        for s in g
            .input_gate
            .strands
            .iter()
            .chain(&g.output_gate.strands)
            .chain([&g.linker])
        {
            all.entry(s.name.clone()).or_insert_with(|| s.clone());
        }
        complexes.push(complex_entry(
            format!("g1_r{}", g.reaction),
            g.reaction,
            &g.input_gate,
        ));
        complexes.push(complex_entry(
            format!("g2_r{}", g.reaction),
            g.reaction,
            &g.output_gate,
        ));
    }
    let domains: BTreeMap<&str, &'static str> = all
        .values()
        .flat_map(|s| &s.domains)
        .map(|d| {
            let kind = match d.kind {
                DomainKind::Toehold => "toehold",
                DomainKind::Recognition => "recognition",
            };
            (d.label.as_str(), kind)
        })
        .collect();

    let linkers = sys
        .gadgets
        .iter()
        .map(|g| LinkerEntry {
            reaction: g.reaction,
            final_reactant: g.final_reactant().to_string(),
            toehold: g.linker_toehold.to_string(),
        })
        .collect();

    SystemExport {
        format: SYSTEM_FORMAT,
        crn: sys
            .crn
            .reactions()
            .iter()
            .map(ToString::to_string)
            .collect(),
        domains: domains
            .into_iter()
            .map(|(name, kind)| DomainEntry {
                name: name.to_owned(),
                kind,
            })
            .collect(),
        strands: all.values().map(strand_entry).collect(),
        complexes,
        assignment: AssignmentEntry {
            universal: sys.assignment.universal.to_string(),
            label_count: sys.assignment.label_count(),
            linkers,
        },
        counts: sys
            .initial_counts
            .iter()
            .map(|(e, &count)| CountEntry {
                entity: e.to_string(),
                count,
            })
            .collect(),
        gc_sinks: sys.gc_sinks.iter().map(ToString::to_string).collect(),
        sabotage: sys.sabotage.as_ref().map(SabotageEntry::from),
    }
}

#[derive(Debug, Serialize)]
pub struct ReportExport {
    pub format: &'static str,
    pub gc: &'static str,
    pub events: Vec<EventEntry>,
    pub intended: usize,
    pub intended_reverse: usize,
    pub spurious_count: usize,
    pub rule_counts: BTreeMap<&'static str, usize>,
    pub unattributed: usize,
    pub sabotage: Option<SabotageEntry>,
}

#[derive(Debug, Serialize)]
pub struct EventEntry {
    pub kind: &'static str,
    pub classification: &'static str,
    pub rule: Option<&'static str>,
    pub reaction: usize,
    pub stage: &'static str,
    pub invader: String,
    pub invader_name: String,
    pub site: [usize; 2],
    pub site_domain: String,
    pub direction: Option<&'static str>,
    pub displaced: Option<String>,
    pub displaced_name: Option<String>,
    pub narrative: String,
}

pub fn report_export(report: &CrosstalkReport, sys: &DsdSystem) -> ReportExport {
    ReportExport {
        format: REPORT_FORMAT,
        gc: report.gc.name(),
        events: report
            .events
            .iter()
            .map(|e| EventEntry {
                kind: match e.kind {
                    EventKind::Displacement => "displacement",
                    EventKind::ProductRelease => "product-release",
                },
                classification: e.classification.name(),
                rule: e.rule.map(|r| r.name()),
                reaction: e.target.gadget,
                stage: e.target.stage.name(),
                invader: e.invader.to_string(),
                invader_name: e.invader_name.clone(),
                site: [e.site.strand, e.site.domain],
                site_domain: e.site_domain.to_string(),
                direction: e.direction.map(|d| match d {
                    Direction::Left => "left",
                    Direction::Right => "right",
                }),
                displaced: e.displaced.as_ref().map(ToString::to_string),
                displaced_name: e.displaced_name.clone(),
                narrative: e.narrative.clone(),
            })
            .collect(),
        intended: report.count(Classification::Intended),
        intended_reverse: report.count(Classification::IntendedReverse),
        spurious_count: report.spurious_count,
        rule_counts: report
            .rule_counts
            .iter()
            .map(|(r, &n)| (r.name(), n))
            .collect(),
        unattributed: report.unattributed,
        sabotage: sys.sabotage.as_ref().map(SabotageEntry::from),
    }
}
