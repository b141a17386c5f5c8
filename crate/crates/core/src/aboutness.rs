//! Information content entity taxonomy and the four aboutness relations.
//!
//! Each paradigm case has one expected relation: fictions describe,
//! blueprints prescribe, simulations represent and temporal expressions
//! designate. A blueprint that has been realized also represents what was
//! built from it, so its flags may carry both `directive` and
//! `representational` at once.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{ClassExpression, EntityKind, ModelError, Ontology};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Describes,
    Prescribes,
    Represents,
    Designates,
}

impl Relation {
    pub const ALL: [Relation; 4] = [
        Relation::Describes,
        Relation::Prescribes,
        Relation::Represents,
        Relation::Designates,
    ];

    /// The object property carrying this relation.
    pub fn property_name(self) -> &'static str {
        match self {
            Relation::Describes => "describes",
            Relation::Prescribes => "prescribes",
            Relation::Represents => "represents",
            Relation::Designates => "designates",
        }
    }

    /// Capitalised form used in frame keywords (`Describes-only:`).
    pub fn keyword_stem(self) -> &'static str {
        match self {
            Relation::Describes => "Describes",
            Relation::Prescribes => "Prescribes",
            Relation::Represents => "Represents",
            Relation::Designates => "Designates",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.property_name())
    }
}

/// `Universal` is "about only C". `Existential` ("about some C") is accepted
/// by the reader so the linter can report it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintForm {
    Universal,
    Existential,
}

impl ConstraintForm {
    pub fn keyword_suffix(self) -> &'static str {
        match self {
            ConstraintForm::Universal => "only",
            ConstraintForm::Existential => "some",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AboutnessAssertion {
    pub ice: String,
    pub relation: Relation,
    pub target: ClassExpression,
    pub constraint: ConstraintForm,
}

impl AboutnessAssertion {
    pub fn universal(ice: impl Into<String>, relation: Relation, target: ClassExpression) -> Self {
        AboutnessAssertion {
            ice: ice.into(),
            relation,
            target,
            constraint: ConstraintForm::Universal,
        }
    }

    /// Frame keyword for this assertion, e.g. `Prescribes-only`.
    pub fn keyword(&self) -> String {
        format!("{}-{}", self.relation.keyword_stem(), self.constraint.keyword_suffix())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum IceCategory {
    FictionalEntity,
    Blueprint,
    SimulationRepresentation,
    TemporalExpression,
    #[serde(rename = "OtherICE")]
    OtherIce,
}

impl IceCategory {
    /// Upper-level class marking each recognised category, checked in this order.
    const MARKERS: [(&'static str, IceCategory); 4] = [
        ("FictionalEntity", IceCategory::FictionalEntity),
        ("Blueprint", IceCategory::Blueprint),
        ("SimulationRepresentation", IceCategory::SimulationRepresentation),
        ("TemporalExpression", IceCategory::TemporalExpression),
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct IceFlags {
    /// Carries a prescribes assertion.
    pub directive: bool,
    /// Carries a represents assertion or represents a realized individual.
    pub representational: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IceKind {
    pub category: IceCategory,
    pub flags: IceFlags,
}

impl IceKind {
    pub fn new(category: IceCategory) -> Self {
        IceKind {
            category,
            flags: IceFlags::default(),
        }
    }
}

pub fn classify_ice(ontology: &Ontology, ice: &str) -> Result<IceKind, ModelError> {
    ontology.expect(ice, EntityKind::Ice)?;
    let ancestors: std::collections::BTreeSet<String> = ontology
        .types_of(ice)
        .into_iter()
        .flatten()
        .flat_map(|t| ontology.class_ancestors(t))
        .collect();
    let category = IceCategory::MARKERS
        .iter()
        .find(|(marker, _)| ancestors.contains(*marker))
        .map(|(_, c)| *c)
        .unwrap_or(IceCategory::OtherIce);

    let assertions = ontology.aboutness_of(ice);
    let has = |r: Relation| assertions.iter().any(|a| a.relation == r);
    let realized = ontology.represented_by(ice).is_some_and(|s| !s.is_empty());
    Ok(IceKind {
        category,
        flags: IceFlags {
            directive: has(Relation::Prescribes),
            representational: has(Relation::Represents) || realized,
        },
    })
}

pub fn expected_relation(kind: &IceKind) -> Option<Relation> {
    match kind.category {
        IceCategory::FictionalEntity => Some(Relation::Describes),
        IceCategory::Blueprint => Some(Relation::Prescribes),
        IceCategory::SimulationRepresentation => Some(Relation::Represents),
        IceCategory::TemporalExpression => Some(Relation::Designates),
        IceCategory::OtherIce => None,
    }
}
