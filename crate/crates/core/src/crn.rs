//! High-level chemical reaction networks with order-significant reactants.
//!
//! Reactant lists keep their source order through every transformation:
//! the last reactant of a reaction (its *final reactant*) decides which
//! linker a gadget uses, and the first/second positions decide which buffer
//! identities are released. Products are an unordered multiset.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// Largest reactant list the compiler understands (termolecular).
pub const MAX_ARITY: usize = 3;

/// Name of a high-level species.
///
/// Nonempty, ASCII alphanumeric or `_`, case-sensitive. The bare token `0`
/// is reserved for the empty product side.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Species(String);

impl Species {
    pub fn new(name: impl Into<String>) -> Result<Self, InvalidSpecies> {
        let name = name.into();
        if Self::is_valid(&name) {
            Ok(Species(name))
        } else {
            Err(InvalidSpecies(name))
        }
    }

    pub fn is_valid(name: &str) -> bool {
        !name.is_empty()
            && name != "0"
            && name.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Species {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvalidSpecies(pub String);

impl fmt::Display for InvalidSpecies {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid species name {:?}", self.0)
    }
}

impl core::error::Error for InvalidSpecies {}

/// 1-based line/column of a reaction in its source text.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SourceLoc {
    pub line: usize,
    pub column: usize,
}

/// Stable ordinal of a reaction: its index in listing order.
pub type ReactionId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Reaction {
    pub id: ReactionId,
    /// Ordered; position is meaningful.
    pub reactants: Vec<Species>,
    /// Multiset, stored sorted.
    pub products: Vec<Species>,
    /// Where the reaction was parsed from, if it came from text.
    pub origin: Option<SourceLoc>,
}

impl Reaction {
    pub fn arity(&self) -> usize {
        self.reactants.len()
    }

    pub fn is_termolecular(&self) -> bool {
        self.reactants.len() == 3
    }

    /// Last reactant in significant order: 2nd of a bimolecular reaction,
    /// 3rd of a termolecular one.
    pub fn final_reactant(&self) -> Result<&Species, ArityError> {
        if self.reactants.len() < 2 {
            return Err(ArityError {
                reaction: self.id,
                arity: self.reactants.len(),
            });
        }
        Ok(self.reactants.last().expect("nonempty"))
    }

    /// Reactants and products, ignoring id and source location.
    pub fn same_structure(&self, other: &Reaction) -> bool {
        self.reactants == other.reactants && self.products == other.products
    }
}

impl fmt::Display for Reaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_side(f, &self.reactants)?;
        f.write_str(" -> ")?;
        write_side(f, &self.products)
    }
}

fn write_side(f: &mut fmt::Formatter<'_>, side: &[Species]) -> fmt::Result {
    if side.is_empty() {
        return f.write_str("0");
    }
    for (i, s) in side.iter().enumerate() {
        if i > 0 {
            f.write_str(" + ")?;
        }
        f.write_str(s.as_str())?;
    }
    Ok(())
}

/// A reaction whose reactant count is outside what an operation supports.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ArityError {
    pub reaction: ReactionId,
    pub arity: usize,
}

impl fmt::Display for ArityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "reaction r{} has {} reactant(s); only bimolecular and termolecular reactions are supported",
            self.reaction, self.arity
        )
    }
}

impl core::error::Error for ArityError {}

/// A reaction network. Reaction ids are `0..n` in listing order and the
/// species table is the union over all reactions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Crn {
    reactions: Vec<Reaction>,
    species: BTreeSet<Species>,
}

impl Crn {
    /// Builds a network from `(reactants, products)` pairs. Reactant lists
    /// must have 1 to 3 entries.
    pub fn from_reactions<I>(reactions: I) -> Result<Self, ArityError>
    where
        I: IntoIterator<Item = (Vec<Species>, Vec<Species>)>,
    {
        let mut crn = Crn::default();
        for (reactants, products) in reactions {
            crn.push(reactants, products, None)?;
        }
        Ok(crn)
    }

    fn push(
        &mut self,
        reactants: Vec<Species>,
        mut products: Vec<Species>,
        origin: Option<SourceLoc>,
    ) -> Result<ReactionId, ArityError> {
        let id = self.reactions.len();
        if reactants.is_empty() || reactants.len() > MAX_ARITY {
            return Err(ArityError {
                reaction: id,
                arity: reactants.len(),
            });
        }
        products.sort();
        self.species.extend(reactants.iter().cloned());
        self.species.extend(products.iter().cloned());
        self.reactions.push(Reaction {
            id,
            reactants,
            products,
            origin,
        });
        Ok(id)
    }

    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }

    pub fn reaction(&self, id: ReactionId) -> Option<&Reaction> {
        self.reactions.get(id)
    }

    pub fn species(&self) -> &BTreeSet<Species> {
        &self.species
    }

    pub fn len(&self) -> usize {
        self.reactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reactions.is_empty()
    }

    /// Same reactions (including reactant order) and products, ignoring
    /// source locations.
    pub fn structurally_eq(&self, other: &Crn) -> bool {
        self.reactions.len() == other.reactions.len()
            && self
                .reactions
                .iter()
                .zip(&other.reactions)
                .all(|(a, b)| a.same_structure(b))
    }

    /// Replaces the reactant list of one reaction, keeping everything else.
    /// Used by the ordering repair, which only permutes positions.
    pub(crate) fn with_reactant_permutation(&self, id: ReactionId, reactants: Vec<Species>) -> Crn {
        let mut out = self.clone();
        out.reactions[id].reactants = reactants;
        out
    }
}

impl fmt::Display for Crn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.reactions {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    MissingArrow,
    MultipleArrows,
    EmptyTerm,
    InvalidIdentifier(String),
    /// `0` or nothing on the reactant side.
    EmptyReactants,
    /// More than three reactants.
    Arity(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub loc: SourceLoc,
    pub kind: ParseErrorKind,
}

impl ParseError {
    /// Short stable code for diagnostics.
    pub fn code(&self) -> &'static str {
        match self.kind {
            ParseErrorKind::MissingArrow => "missing-arrow",
            ParseErrorKind::MultipleArrows => "multiple-arrows",
            ParseErrorKind::EmptyTerm => "empty-term",
            ParseErrorKind::InvalidIdentifier(_) => "invalid-identifier",
            ParseErrorKind::EmptyReactants => "empty-reactants",
            ParseErrorKind::Arity(_) => "arity",
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: [{}] ",
            self.loc.line,
            self.loc.column,
            self.code()
        )?;
        match &self.kind {
            ParseErrorKind::MissingArrow => f.write_str("expected `->`"),
            ParseErrorKind::MultipleArrows => f.write_str("more than one `->` on a line"),
            ParseErrorKind::EmptyTerm => f.write_str("empty term"),
            ParseErrorKind::InvalidIdentifier(s) => write!(f, "invalid species name {s:?}"),
            ParseErrorKind::EmptyReactants => f.write_str("a reaction needs at least one reactant"),
            ParseErrorKind::Arity(n) => {
                write!(f, "{n} reactants; at most {MAX_ARITY} are supported")
            }
        }
    }
}

impl core::error::Error for ParseError {}

/// Parses CRN text: one `reactants -> products` per line, `#` comments,
/// `0` for an empty product side.
pub fn parse_crn(text: &str) -> Result<Crn, ParseError> {
    let mut crn = Crn::default();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let body = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        if body.trim().is_empty() {
            continue;
        }
        let err = |column: usize, kind| ParseError {
            loc: SourceLoc {
                line: line_no,
                column,
            },
            kind,
        };
        let lead = body.len() - body.trim_start().len();
        let arrow = body
            .find("->")
            .ok_or_else(|| err(lead + 1, ParseErrorKind::MissingArrow))?;
        if let Some(second) = body[arrow + 2..].find("->") {
            return Err(err(arrow + 2 + second + 1, ParseErrorKind::MultipleArrows));
        }
        let reactants = parse_side(&body[..arrow], 0, false, line_no)?;
        let products = parse_side(&body[arrow + 2..], arrow + 2, true, line_no)?;
        if reactants.len() > MAX_ARITY {
            return Err(err(lead + 1, ParseErrorKind::Arity(reactants.len())));
        }
        crn.push(
            reactants,
            products,
            Some(SourceLoc {
                line: line_no,
                column: lead + 1,
            }),
        )
        .expect("arity checked above");
    }
    Ok(crn)
}

fn parse_side(
    side: &str,
    offset: usize,
    allow_empty: bool,
    line: usize,
) -> Result<Vec<Species>, ParseError> {
    let at = |pos: usize, kind| ParseError {
        loc: SourceLoc {
            line,
            column: offset + pos + 1,
        },
        kind,
    };
    let trimmed = side.trim();
    let lead = side.len() - side.trim_start().len();
    if trimmed.is_empty() || trimmed == "0" {
        return if allow_empty {
            Ok(Vec::new())
        } else {
            Err(at(lead, ParseErrorKind::EmptyReactants))
        };
    }
    let mut out = Vec::new();
    let mut start = 0;
    for term in side.split('+') {
        let term_lead = term.len() - term.trim_start().len();
        let name = term.trim();
        if name.is_empty() {
            return Err(at(start, ParseErrorKind::EmptyTerm));
        }
        match Species::new(name) {
            Ok(s) => out.push(s),
            Err(_) => {
                return Err(at(
                    start + term_lead,
                    ParseErrorKind::InvalidIdentifier(name.to_string()),
                ))
            }
        }
        start += term.len() + 1;
    }
    Ok(out)
}

/// Canonical text form; `parse_crn` of the result is structurally equal to
/// the input.
pub fn serialize_crn(crn: &Crn) -> String {
    crn.to_string()
}

/// Last reactant of `r`. Errors on unimolecular reactions.
pub fn final_reactant(r: &Reaction) -> Result<&Species, ArityError> {
    r.final_reactant()
}
