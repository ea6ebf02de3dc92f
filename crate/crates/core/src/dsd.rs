//! Domain-level strand displacement structures.
//!
//! Domains are nominal: a toehold or recognition label plus a complement
//! flag. Strands are linear domain lists read left to right; strands bound
//! to a backbone are written in the same left-to-right frame as the
//! backbone they pair with, so domain `i` of a top strand sits over the
//! backbone domain it is bonded to.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DomainKind {
    Toehold,
    Recognition,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Domain {
    pub kind: DomainKind,
    pub label: String,
    pub complemented: bool,
}

impl Domain {
    pub fn toehold(label: impl Into<String>) -> Self {
        Domain {
            kind: DomainKind::Toehold,
            label: label.into(),
            complemented: false,
        }
    }

    pub fn recognition(label: impl Into<String>) -> Self {
        Domain {
            kind: DomainKind::Recognition,
            label: label.into(),
            complemented: false,
        }
    }

    pub fn complement(&self) -> Self {
        Domain {
            complemented: !self.complemented,
            ..self.clone()
        }
    }

    pub fn is_complement_of(&self, other: &Domain) -> bool {
        self.kind == other.kind
            && self.label == other.label
            && self.complemented != other.complemented
    }

    pub fn is_toehold(&self) -> bool {
        self.kind == DomainKind::Toehold
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)?;
        if self.complemented {
            f.write_str("*")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StrandRole {
    /// `[t, x_S]`, a high-level species (also how products are released).
    Species,
    /// `[x_F, t_r, j_r]`, fuel completing a reaction's input side.
    Linker,
    /// `[x_S, t]`, released when a first reactant binds.
    Buffer1,
    /// `[x_S, t]`, released when the second reactant of a termolecular
    /// reaction binds; garbage-collected.
    Buffer2,
    /// `[x_F, t_r]`, covers the final reactant's site and the linker
    /// toehold until the final reactant binds.
    Cover,
    /// Bottom strand of a gate complex.
    Backbone,
}

impl StrandRole {
    pub fn name(self) -> &'static str {
        match self {
            StrandRole::Species => "species",
            StrandRole::Linker => "linker",
            StrandRole::Buffer1 => "buffer1",
            StrandRole::Buffer2 => "buffer2",
            StrandRole::Cover => "cover",
            StrandRole::Backbone => "backbone",
        }
    }
}

/// What a strand *is* in solution: its domain list. Two strands with the
/// same domains are indistinguishable regardless of role or origin.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StrandIdentity(pub Vec<Domain>);

impl fmt::Display for StrandIdentity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{d}")?;
        }
        f.write_str("]")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Strand {
    pub name: String,
    pub domains: Vec<Domain>,
    pub role: StrandRole,
}

impl Strand {
    pub fn new(name: impl Into<String>, role: StrandRole, domains: Vec<Domain>) -> Self {
        Strand {
            name: name.into(),
            domains,
            role,
        }
    }

    pub fn identity(&self) -> StrandIdentity {
        StrandIdentity(self.domains.clone())
    }
}

/// A domain instance inside a complex: strand index, domain index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Site {
    pub strand: usize,
    pub domain: usize,
}

impl Site {
    pub const fn new(strand: usize, domain: usize) -> Self {
        Site { strand, domain }
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.strand, self.domain)
    }
}

/// Unordered pair of bonded domain instances, stored with `a < b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bond {
    pub a: Site,
    pub b: Site,
}

impl Bond {
    pub fn new(x: Site, y: Site) -> Self {
        if x <= y {
            Bond { a: x, b: y }
        } else {
            Bond { a: y, b: x }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Complex {
    pub strands: Vec<Strand>,
    pub bonds: BTreeSet<Bond>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Fault {
    /// A bond names a strand or domain that does not exist.
    DanglingBond(Bond),
    /// A bond pairs two domains that are not exact complements.
    NonComplementary(Bond),
    /// A bond pairs a domain instance with itself.
    SelfBond(Bond),
    /// A domain instance appears in more than one bond.
    MultiplyBonded(Site),
    /// The strand-bond graph has more than one component.
    Disconnected { components: usize },
}

impl fmt::Display for Fault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fault::DanglingBond(b) => write!(f, "dangling bond {}-{}", b.a, b.b),
            Fault::NonComplementary(b) => write!(f, "non-complementary bond {}-{}", b.a, b.b),
            Fault::SelfBond(b) => write!(f, "domain {} bonded to itself", b.a),
            Fault::MultiplyBonded(s) => write!(f, "domain {s} is in more than one bond"),
            Fault::Disconnected { components } => {
                write!(f, "complex is disconnected ({components} components)")
            }
        }
    }
}

impl Complex {
    pub fn single(strand: Strand) -> Self {
        Complex {
            strands: vec![strand],
            bonds: BTreeSet::new(),
        }
    }

    pub fn domain(&self, site: Site) -> Option<&Domain> {
        self.strands.get(site.strand)?.domains.get(site.domain)
    }

    pub fn bond(&mut self, x: Site, y: Site) {
        self.bonds.insert(Bond::new(x, y));
    }

    /// The domain instance bonded to `site`, if any.
    pub fn partner(&self, site: Site) -> Option<Site> {
        self.bonds.iter().find_map(|b| {
            if b.a == site {
                Some(b.b)
            } else if b.b == site {
                Some(b.a)
            } else {
                None
            }
        })
    }

    pub fn bonded_sites(&self) -> BTreeSet<Site> {
        self.bonds.iter().flat_map(|b| [b.a, b.b]).collect()
    }

    pub fn all_sites(&self) -> impl Iterator<Item = Site> + '_ {
        self.strands
            .iter()
            .enumerate()
            .flat_map(|(s, strand)| (0..strand.domains.len()).map(move |d| Site::new(s, d)))
    }

    /// Removes strand `index` and every bond touching it, renumbering the
    /// remaining strands.
    pub fn remove_strand(&mut self, index: usize) -> Strand {
        let strand = self.strands.remove(index);
        let shift = |s: Site| Site {
            strand: if s.strand > index {
                s.strand - 1
            } else {
                s.strand
            },
            domain: s.domain,
        };
        self.bonds = self
            .bonds
            .iter()
            .filter(|b| b.a.strand != index && b.b.strand != index)
            .map(|b| Bond::new(shift(b.a), shift(b.b)))
            .collect();
        strand
    }
}

/// Structural faults of `c`; empty means well-formed.
pub fn check_complex(c: &Complex) -> Vec<Fault> {
    let mut faults = Vec::new();
    let mut uses: BTreeMap<Site, usize> = BTreeMap::new();
    for bond in &c.bonds {
        let (Some(x), Some(y)) = (c.domain(bond.a), c.domain(bond.b)) else {
            faults.push(Fault::DanglingBond(*bond));
            continue;
        };
        if bond.a == bond.b {
            faults.push(Fault::SelfBond(*bond));
            continue;
        }
        if !x.is_complement_of(y) {
            faults.push(Fault::NonComplementary(*bond));
        }
        *uses.entry(bond.a).or_default() += 1;
        *uses.entry(bond.b).or_default() += 1;
    }
    faults.extend(
        uses.into_iter()
            .filter(|&(_, n)| n > 1)
            .map(|(site, _)| Fault::MultiplyBonded(site)),
    );

    let components = count_components(c);
    if components > 1 {
        faults.push(Fault::Disconnected { components });
    }
    faults
}

fn count_components(c: &Complex) -> usize {
    let n = c.strands.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for b in &c.bonds {
        if b.a.strand < n && b.b.strand < n {
            let (ra, rb) = (find(&mut parent, b.a.strand), find(&mut parent, b.b.strand));
            parent[ra] = rb;
        }
    }
    (0..n).filter(|&i| find(&mut parent, i) == i).count()
}

/// Unbonded domain instances of a complex, in strand then domain order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Exposure {
    pub sites: Vec<Site>,
}

impl Exposure {
    pub fn toeholds<'a>(&'a self, c: &'a Complex) -> impl Iterator<Item = Site> + 'a {
        self.sites
            .iter()
            .copied()
            .filter(move |&s| c.domain(s).is_some_and(Domain::is_toehold))
    }
}

pub fn exposed_sites(c: &Complex) -> Exposure {
    let bonded = c.bonded_sites();
    Exposure {
        sites: c.all_sites().filter(|s| !bonded.contains(s)).collect(),
    }
}
