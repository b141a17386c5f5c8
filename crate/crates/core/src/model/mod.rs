//! In-memory ontology for the supported fragment and the structural closures
//! (instantiation, subclass, disjointness, sub-property) every analysis reads.
//!
//! An [`Ontology`] is immutable once built. Operations that "change" it, such
//! as [`Ontology::with_axiom`], return a new value and leave the input alone.

mod expression;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use chrono::Weekday;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use self::expression::ClassExpression;
use crate::aboutness::{AboutnessAssertion, Relation};
use crate::span::SourceSpan;
use crate::temporal::IndexicalMode;

/// Name of the generic aboutness relation all four specific relations close to.
pub const IS_ABOUT: &str = "is_about";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntityKind {
    Class,
    Property,
    Individual,
    Ice,
}

impl EntityKind {
    pub fn describe(self) -> &'static str {
        match self {
            EntityKind::Class => "class",
            EntityKind::Property => "object property",
            EntityKind::Individual => "individual",
            EntityKind::Ice => "information content entity",
        }
    }
}

impl fmt::Display for EntityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.describe())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    SubClassOf {
        sub: String,
        sup: String,
    },
    EquivalentTo {
        class: String,
        definition: ClassExpression,
    },
    DisjointWith {
        first: String,
        second: String,
    },
    SubPropertyOf {
        sub: String,
        sup: String,
    },
    Domain {
        property: String,
        class: String,
    },
    Range {
        property: String,
        class: String,
    },
    /// Explicates a property by what its subjects and objects must be.
    PropertyDefinition {
        property: String,
        domain: ClassExpression,
        range: ClassExpression,
    },
    /// Subject may be an individual or an information content entity.
    ClassAssertion {
        individual: String,
        class: String,
    },
    Fact {
        subject: String,
        property: String,
        object: String,
    },
    Aboutness(AboutnessAssertion),
    /// A realized blueprint represents the individual created from it.
    RepresentsFact {
        ice: String,
        individual: String,
    },
}

impl Axiom {
    /// The declared name whose frame this axiom is written in.
    pub fn owner(&self) -> &str {
        match self {
            Axiom::SubClassOf { sub, .. } => sub,
            Axiom::EquivalentTo { class, .. } => class,
            Axiom::DisjointWith { first, .. } => first,
            Axiom::SubPropertyOf { sub, .. } => sub,
            Axiom::Domain { property, .. }
            | Axiom::Range { property, .. }
            | Axiom::PropertyDefinition { property, .. } => property,
            Axiom::ClassAssertion { individual, .. } => individual,
            Axiom::Fact { subject, .. } => subject,
            Axiom::Aboutness(a) => &a.ice,
            Axiom::RepresentsFact { ice, .. } => ice,
        }
    }

    /// Names referenced by the axiom together with the category each must have.
    /// Subjects that may be either an individual or an ICE are reported with
    /// `EntityKind::Individual`; [`Ontology`] validation accepts both there.
    pub fn references(&self) -> Vec<(EntityKind, &str)> {
        use EntityKind::*;
        match self {
            Axiom::SubClassOf { sub, sup } => vec![(Class, sub), (Class, sup)],
            Axiom::EquivalentTo { class, definition } => {
                let mut v = vec![(Class, class.as_str())];
                v.extend(definition.references());
                v
            }
            Axiom::DisjointWith { first, second } => vec![(Class, first), (Class, second)],
            Axiom::SubPropertyOf { sub, sup } => vec![(Property, sub), (Property, sup)],
            Axiom::Domain { property, class } | Axiom::Range { property, class } => {
                vec![(Property, property), (Class, class)]
            }
            Axiom::PropertyDefinition {
                property,
                domain,
                range,
            } => {
                let mut v = vec![(Property, property.as_str())];
                v.extend(domain.references());
                v.extend(range.references());
                v
            }
            Axiom::ClassAssertion { individual, class } => {
                vec![(Individual, individual), (Class, class)]
            }
            Axiom::Fact {
                subject,
                property,
                object,
            } => vec![(Individual, subject), (Property, property), (Individual, object)],
            Axiom::Aboutness(a) => {
                let mut v = vec![(Ice, a.ice.as_str())];
                v.extend(a.target.references());
                v
            }
            Axiom::RepresentsFact { ice, individual } => vec![(Ice, ice), (Individual, individual)],
        }
    }

    fn expressions(&self) -> Vec<&ClassExpression> {
        match self {
            Axiom::EquivalentTo { definition, .. } => vec![definition],
            Axiom::PropertyDefinition { domain, range, .. } => vec![domain, range],
            Axiom::Aboutness(a) => vec![&a.target],
            _ => Vec::new(),
        }
    }
}

/// Where a declaration or axiom came from. Prelude material is never written
/// back out by the serializer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Origin {
    Prelude,
    Document,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Declaration {
    pub kind: EntityKind,
    /// First document frame declaring the name.
    pub span: Option<SourceSpan>,
    pub in_prelude: bool,
    pub in_document: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomRecord {
    pub axiom: Axiom,
    pub span: Option<SourceSpan>,
    pub origin: Origin,
}

/// `Mode:` and `Cycle:` keys of a temporal expression frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TemporalFrame {
    pub mode: Option<IndexicalMode>,
    pub cycle: Option<Weekday>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("unknown {expected} '{name}'")]
    UnknownName { name: String, expected: EntityKind },
    #[error("'{name}' is declared as both {first} and {second}")]
    DuplicateDeclaration {
        name: String,
        first: EntityKind,
        second: EntityKind,
    },
    #[error("object property '{0}' has more than one definition")]
    DuplicatePropertyDefinition(String),
    #[error("malformed class expression `{0}`: intersections and unions need two operands")]
    MalformedExpression(String),
}

/// One aboutness assertion as seen through the property hierarchy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AboutnessView {
    pub assertion: AboutnessAssertion,
    /// The relation and every property it closes to, always including `is_about`.
    pub tags: BTreeSet<String>,
}

#[derive(Debug, Clone, Default)]
struct Index {
    class_parents: BTreeMap<String, BTreeSet<String>>,
    class_children: BTreeMap<String, BTreeSet<String>>,
    property_parents: BTreeMap<String, BTreeSet<String>>,
    property_children: BTreeMap<String, BTreeSet<String>>,
    direct_members: BTreeMap<String, BTreeSet<String>>,
    types_of: BTreeMap<String, BTreeSet<String>>,
    equivalents: BTreeMap<String, Vec<ClassExpression>>,
    disjoint: BTreeSet<(String, String)>,
    domains: BTreeMap<String, BTreeSet<String>>,
    ranges: BTreeMap<String, BTreeSet<String>>,
    definitions: BTreeMap<String, (ClassExpression, ClassExpression)>,
    facts: BTreeMap<String, Vec<(String, String)>>,
    used_properties: BTreeSet<String>,
    aboutness: BTreeMap<String, Vec<AboutnessAssertion>>,
    represented: BTreeMap<String, BTreeSet<String>>,
}

impl Index {
    fn build(records: &[AxiomRecord]) -> Self {
        let mut ix = Index::default();
        for record in records {
            match &record.axiom {
                Axiom::SubClassOf { sub, sup } => {
                    ix.class_parents.entry(sub.clone()).or_default().insert(sup.clone());
                    ix.class_children.entry(sup.clone()).or_default().insert(sub.clone());
                }
                Axiom::EquivalentTo { class, definition } => {
                    let defs = ix.equivalents.entry(class.clone()).or_default();
                    if !defs.contains(definition) {
                        defs.push(definition.clone());
                    }
                }
                Axiom::DisjointWith { first, second } => {
                    ix.disjoint.insert((first.clone(), second.clone()));
                    ix.disjoint.insert((second.clone(), first.clone()));
                }
                Axiom::SubPropertyOf { sub, sup } => {
                    ix.property_parents.entry(sub.clone()).or_default().insert(sup.clone());
                    ix.property_children.entry(sup.clone()).or_default().insert(sub.clone());
                }
                Axiom::Domain { property, class } => {
                    ix.domains.entry(property.clone()).or_default().insert(class.clone());
                }
                Axiom::Range { property, class } => {
                    ix.ranges.entry(property.clone()).or_default().insert(class.clone());
                }
                Axiom::PropertyDefinition {
                    property,
                    domain,
                    range,
                } => {
                    ix.definitions.insert(property.clone(), (domain.clone(), range.clone()));
                }
                Axiom::ClassAssertion { individual, class } => {
                    ix.direct_members
                        .entry(class.clone())
                        .or_default()
                        .insert(individual.clone());
                    ix.types_of.entry(individual.clone()).or_default().insert(class.clone());
                }
                Axiom::Fact {
                    subject,
                    property,
                    object,
                } => {
                    let facts = ix.facts.entry(subject.clone()).or_default();
                    let pair = (property.clone(), object.clone());
                    if !facts.contains(&pair) {
                        facts.push(pair);
                    }
                    ix.used_properties.insert(property.clone());
                }
                Axiom::Aboutness(a) => {
                    let list = ix.aboutness.entry(a.ice.clone()).or_default();
                    if !list.contains(a) {
                        list.push(a.clone());
                    }
                }
                Axiom::RepresentsFact { ice, individual } => {
                    ix.represented
                        .entry(ice.clone())
                        .or_default()
                        .insert(individual.clone());
                }
            }
        }
        ix
    }
}

/// Reflexive-transitive closure over an adjacency map, tolerant of cycles.
fn reach(start: &str, edges: &BTreeMap<String, BTreeSet<String>>) -> BTreeSet<String> {
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([start.to_owned()]);
    while let Some(node) = queue.pop_front() {
        if !seen.insert(node.clone()) {
            continue;
        }
        if let Some(next) = edges.get(&node) {
            queue.extend(next.iter().filter(|n| !seen.contains(*n)).cloned());
        }
    }
    seen
}

#[derive(Debug, Clone, Default)]
pub struct Ontology {
    declarations: BTreeMap<String, Declaration>,
    records: Vec<AxiomRecord>,
    temporal: BTreeMap<String, TemporalFrame>,
    index: Index,
}

/// Equality is set semantics over the signature, axioms and temporal keys.
/// Spans, origins and axiom order are ignored.
impl PartialEq for Ontology {
    fn eq(&self, other: &Self) -> bool {
        let kinds = |o: &Ontology| -> BTreeMap<String, EntityKind> {
            o.declarations.iter().map(|(n, d)| (n.clone(), d.kind)).collect()
        };
        kinds(self) == kinds(other) && self.axiom_set() == other.axiom_set() && self.temporal == other.temporal
    }
}

impl Eq for Ontology {}

impl Ontology {
    pub fn empty() -> Self {
        Ontology::default()
    }

    pub fn builder() -> OntologyBuilder {
        OntologyBuilder::default()
    }

    /// Assembles an ontology from already validated parts.
    pub(crate) fn from_parts(
        declarations: BTreeMap<String, Declaration>,
        records: Vec<AxiomRecord>,
        temporal: BTreeMap<String, TemporalFrame>,
    ) -> Self {
        let index = Index::build(&records);
        Ontology {
            declarations,
            records,
            temporal,
            index,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.declarations.is_empty() && self.records.is_empty()
    }

    pub fn declaration(&self, name: &str) -> Option<&Declaration> {
        self.declarations.get(name)
    }

    pub fn declarations(&self) -> impl Iterator<Item = (&str, &Declaration)> {
        self.declarations.iter().map(|(n, d)| (n.as_str(), d))
    }

    pub fn kind_of(&self, name: &str) -> Option<EntityKind> {
        self.declarations.get(name).map(|d| d.kind)
    }

    fn names_of(&self, kind: EntityKind) -> impl Iterator<Item = &str> {
        self.declarations
            .iter()
            .filter(move |(_, d)| d.kind == kind)
            .map(|(n, _)| n.as_str())
    }

    pub fn classes(&self) -> impl Iterator<Item = &str> {
        self.names_of(EntityKind::Class)
    }

    pub fn properties(&self) -> impl Iterator<Item = &str> {
        self.names_of(EntityKind::Property)
    }

    pub fn individuals(&self) -> impl Iterator<Item = &str> {
        self.names_of(EntityKind::Individual)
    }

    pub fn ices(&self) -> impl Iterator<Item = &str> {
        self.names_of(EntityKind::Ice)
    }

    pub fn records(&self) -> &[AxiomRecord] {
        &self.records
    }

    pub fn axioms(&self) -> impl Iterator<Item = &Axiom> {
        self.records.iter().map(|r| &r.axiom)
    }

    pub fn axiom_set(&self) -> BTreeSet<&Axiom> {
        self.axioms().collect()
    }

    pub fn temporal_frame(&self, ice: &str) -> Option<&TemporalFrame> {
        self.temporal.get(ice)
    }

    pub(crate) fn temporal_frames(&self) -> &BTreeMap<String, TemporalFrame> {
        &self.temporal
    }

    /// Fails unless `name` is declared with the given category.
    pub fn expect(&self, name: &str, kind: EntityKind) -> Result<(), ModelError> {
        match self.kind_of(name) {
            Some(k) if k == kind => Ok(()),
            _ => Err(ModelError::UnknownName {
                name: name.to_owned(),
                expected: kind,
            }),
        }
    }

    /// Like [`Ontology::expect`] but accepts an individual or an ICE, the two
    /// kinds of thing that can be typed and bear facts.
    pub fn expect_particular(&self, name: &str) -> Result<(), ModelError> {
        match self.kind_of(name) {
            Some(EntityKind::Individual) | Some(EntityKind::Ice) => Ok(()),
            _ => Err(ModelError::UnknownName {
                name: name.to_owned(),
                expected: EntityKind::Individual,
            }),
        }
    }

    /// Fails on the first name in `e` that is missing or of the wrong kind.
    pub fn check_expression(&self, e: &ClassExpression) -> Result<(), ModelError> {
        for (kind, name) in e.references() {
            self.expect(name, kind)?;
        }
        Ok(())
    }

    /// Reflexive-transitive superclasses.
    pub fn class_ancestors(&self, class: &str) -> BTreeSet<String> {
        reach(class, &self.index.class_parents)
    }

    /// Reflexive-transitive subclasses.
    pub fn class_descendants(&self, class: &str) -> BTreeSet<String> {
        reach(class, &self.index.class_children)
    }

    /// Reflexive-transitive super-properties.
    pub fn property_ancestors(&self, property: &str) -> BTreeSet<String> {
        reach(property, &self.index.property_parents)
    }

    /// Reflexive-transitive sub-properties.
    pub fn property_descendants(&self, property: &str) -> BTreeSet<String> {
        reach(property, &self.index.property_children)
    }

    /// Everything asserted to be an instance of `class` or of one of its
    /// subclasses. Equivalence definitions do not contribute.
    pub fn instantiation_closure(&self, class: &str) -> Result<BTreeSet<String>, ModelError> {
        self.expect(class, EntityKind::Class)?;
        Ok(self.members_unchecked(class))
    }

    pub(crate) fn members_unchecked(&self, class: &str) -> BTreeSet<String> {
        self.class_descendants(class)
            .iter()
            .filter_map(|c| self.index.direct_members.get(c))
            .flatten()
            .cloned()
            .collect()
    }

    pub(crate) fn is_actual(&self, class: &str) -> bool {
        self.class_descendants(class)
            .iter()
            .any(|c| self.index.direct_members.get(c).is_some_and(|m| !m.is_empty()))
    }

    /// True when some superclass of `a` and some superclass of `b` (both
    /// reflexive) are declared disjoint, in either orientation.
    pub fn are_disjoint(&self, a: &str, b: &str) -> Result<bool, ModelError> {
        self.expect(a, EntityKind::Class)?;
        self.expect(b, EntityKind::Class)?;
        let left = self.class_ancestors(a);
        let right = self.class_ancestors(b);
        Ok(self.any_disjoint_pair(&left, &right))
    }

    pub(crate) fn any_disjoint_pair(&self, left: &BTreeSet<String>, right: &BTreeSet<String>) -> bool {
        self.index
            .disjoint
            .iter()
            .any(|(x, y)| left.contains(x) && right.contains(y))
    }

    /// Every aboutness assertion, tagged with the relation and everything it
    /// closes to in the property hierarchy (always including `is_about`).
    pub fn is_about_view(&self) -> Vec<AboutnessView> {
        self.index
            .aboutness
            .values()
            .flatten()
            .map(|a| {
                let mut tags = self.property_ancestors(a.relation.property_name());
                tags.insert(IS_ABOUT.to_owned());
                AboutnessView {
                    assertion: a.clone(),
                    tags,
                }
            })
            .collect()
    }

    /// True when `property` is `is_about` or one of its sub-properties.
    pub fn is_aboutness_property(&self, property: &str) -> bool {
        property == IS_ABOUT
            || Relation::ALL.iter().any(|r| r.property_name() == property)
            || self.property_ancestors(property).contains(IS_ABOUT)
    }

    pub fn aboutness_of(&self, ice: &str) -> &[AboutnessAssertion] {
        self.index.aboutness.get(ice).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn represented_by(&self, ice: &str) -> Option<&BTreeSet<String>> {
        self.index.represented.get(ice)
    }

    /// Asserted types of an individual or ICE.
    pub fn types_of(&self, name: &str) -> Option<&BTreeSet<String>> {
        self.index.types_of.get(name)
    }

    /// `(property, object)` pairs asserted for `subject`.
    pub fn facts_of(&self, subject: &str) -> &[(String, String)] {
        self.index.facts.get(subject).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn equivalents(&self, class: &str) -> &[ClassExpression] {
        self.index.equivalents.get(class).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn domains(&self, property: &str) -> Option<&BTreeSet<String>> {
        self.index.domains.get(property)
    }

    pub fn ranges(&self, property: &str) -> Option<&BTreeSet<String>> {
        self.index.ranges.get(property)
    }

    pub fn property_definition(&self, property: &str) -> Option<(&ClassExpression, &ClassExpression)> {
        self.index.definitions.get(property).map(|(d, r)| (d, r))
    }

    /// True when some fact uses `property` or one of its sub-properties.
    pub fn property_has_facts(&self, property: &str) -> bool {
        self.property_descendants(property)
            .iter()
            .any(|p| self.index.used_properties.contains(p))
    }

    /// Copy-on-write: a new ontology with `axiom` added as document content.
    pub fn with_axiom(&self, axiom: Axiom) -> Result<Ontology, ModelError> {
        validate_axiom(&self.declarations, &axiom)?;
        if let Axiom::PropertyDefinition { property, .. } = &axiom {
            if self.index.definitions.contains_key(property) {
                return Err(ModelError::DuplicatePropertyDefinition(property.clone()));
            }
        }
        let mut records = self.records.clone();
        records.push(AxiomRecord {
            axiom,
            span: None,
            origin: Origin::Document,
        });
        Ok(Ontology::from_parts(
            self.declarations.clone(),
            records,
            self.temporal.clone(),
        ))
    }

    /// Copy-on-write: a new ontology with `name` declared as document content.
    /// Re-declaring with the same kind is a no-op.
    pub fn with_declaration(&self, name: &str, kind: EntityKind) -> Result<Ontology, ModelError> {
        let mut declarations = self.declarations.clone();
        declare(&mut declarations, name, kind, Origin::Document, None)?;
        Ok(Ontology::from_parts(
            declarations,
            self.records.clone(),
            self.temporal.clone(),
        ))
    }
}

pub(crate) fn declare(
    declarations: &mut BTreeMap<String, Declaration>,
    name: &str,
    kind: EntityKind,
    origin: Origin,
    span: Option<SourceSpan>,
) -> Result<(), ModelError> {
    match declarations.get_mut(name) {
        Some(existing) if existing.kind != kind => Err(ModelError::DuplicateDeclaration {
            name: name.to_owned(),
            first: existing.kind,
            second: kind,
        }),
        Some(existing) => {
            match origin {
                Origin::Prelude => existing.in_prelude = true,
                Origin::Document => {
                    existing.in_document = true;
                    existing.span = existing.span.or(span);
                }
            }
            Ok(())
        }
        None => {
            declarations.insert(
                name.to_owned(),
                Declaration {
                    kind,
                    span,
                    in_prelude: origin == Origin::Prelude,
                    in_document: origin == Origin::Document,
                },
            );
            Ok(())
        }
    }
}

fn validate_axiom(declarations: &BTreeMap<String, Declaration>, axiom: &Axiom) -> Result<(), ModelError> {
    for (kind, name) in axiom.references() {
        let found = declarations.get(name).map(|d| d.kind);
        let ok = match (kind, found) {
            (EntityKind::Individual, Some(EntityKind::Individual | EntityKind::Ice)) => true,
            (k, Some(f)) => k == f,
            (_, None) => false,
        };
        if !ok {
            return Err(ModelError::UnknownName {
                name: name.to_owned(),
                expected: kind,
            });
        }
    }
    for e in axiom.expressions() {
        if !e.is_well_formed() {
            return Err(ModelError::MalformedExpression(e.to_string()));
        }
    }
    Ok(())
}

/// Programmatic construction with the same checks the parser applies to
/// names and categories.
#[derive(Debug, Default)]
pub struct OntologyBuilder {
    declared: Vec<(String, EntityKind)>,
    axioms: Vec<Axiom>,
    temporal: BTreeMap<String, TemporalFrame>,
}

impl OntologyBuilder {
    pub fn declare(&mut self, name: impl Into<String>, kind: EntityKind) -> &mut Self {
        self.declared.push((name.into(), kind));
        self
    }

    pub fn class(&mut self, name: impl Into<String>) -> &mut Self {
        self.declare(name, EntityKind::Class)
    }

    pub fn property(&mut self, name: impl Into<String>) -> &mut Self {
        self.declare(name, EntityKind::Property)
    }

    pub fn individual(&mut self, name: impl Into<String>) -> &mut Self {
        self.declare(name, EntityKind::Individual)
    }

    pub fn ice(&mut self, name: impl Into<String>) -> &mut Self {
        self.declare(name, EntityKind::Ice)
    }

    pub fn axiom(&mut self, axiom: Axiom) -> &mut Self {
        self.axioms.push(axiom);
        self
    }

    pub fn temporal(&mut self, ice: impl Into<String>, frame: TemporalFrame) -> &mut Self {
        self.temporal.insert(ice.into(), frame);
        self
    }

    pub fn build(&self) -> Result<Ontology, ModelError> {
        let mut declarations = BTreeMap::new();
        for (name, kind) in &self.declared {
            declare(&mut declarations, name, *kind, Origin::Document, None)?;
        }
        let mut defined = BTreeSet::new();
        for axiom in &self.axioms {
            validate_axiom(&declarations, axiom)?;
            if let Axiom::PropertyDefinition { property, .. } = axiom {
                if !defined.insert(property.clone()) {
                    return Err(ModelError::DuplicatePropertyDefinition(property.clone()));
                }
            }
        }
        for ice in self.temporal.keys() {
            if declarations.get(ice).map(|d| d.kind) != Some(EntityKind::Ice) {
                return Err(ModelError::UnknownName {
                    name: ice.clone(),
                    expected: EntityKind::Ice,
                });
            }
        }
        let records = self
            .axioms
            .iter()
            .cloned()
            .map(|axiom| AxiomRecord {
                axiom,
                span: None,
                origin: Origin::Document,
            })
            .collect();
        Ok(Ontology::from_parts(declarations, records, self.temporal.clone()))
    }
}
