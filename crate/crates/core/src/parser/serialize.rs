use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use crate::model::{Axiom, EntityKind, Ontology, Origin};
use crate::temporal::{weekday_name, IndexicalMode};

#[derive(Default)]
struct Frame {
    // Class
    sub_class_of: BTreeSet<String>,
    equivalent_to: BTreeSet<String>,
    disjoint_with: BTreeSet<String>,
    // ObjectProperty
    sub_property_of: BTreeSet<String>,
    domain: BTreeSet<String>,
    range: BTreeSet<String>,
    defined_by: Option<String>,
    // Individual and ICE
    types: BTreeSet<String>,
    facts: BTreeSet<(String, String)>,
    aboutness: BTreeSet<String>,
    represents_fact: BTreeSet<String>,
    mode: Option<IndexicalMode>,
    cycle: Option<chrono::Weekday>,
}

fn frame_keyword(kind: EntityKind) -> &'static str {
    match kind {
        EntityKind::Class => "Class",
        EntityKind::Property => "ObjectProperty",
        EntityKind::Individual => "Individual",
        EntityKind::Ice => "ICE",
    }
}

/// Writes the document-level content of `ontology` in canonical form: frames
/// grouped by kind and sorted by name, clauses in a fixed order. Prelude
/// declarations and axioms are left out, so a document parsed on top of the
/// prelude serializes back to just itself.
pub fn serialize(ontology: &Ontology) -> String {
    let mut frames: BTreeMap<(EntityKind, &str), Frame> = BTreeMap::new();
    for (name, decl) in ontology.declarations() {
        if decl.in_document {
            frames.insert((decl.kind, name), Frame::default());
        }
    }
    for record in ontology.records() {
        if record.origin != Origin::Document {
            continue;
        }
        let owner = record.axiom.owner();
        let Some(kind) = ontology.kind_of(owner) else { continue };
        let frame = frames.entry((kind, owner)).or_default();
        match &record.axiom {
            Axiom::SubClassOf { sup, .. } => {
                frame.sub_class_of.insert(sup.clone());
            }
            Axiom::EquivalentTo { definition, .. } => {
                frame.equivalent_to.insert(definition.to_string());
            }
            Axiom::DisjointWith { second, .. } => {
                frame.disjoint_with.insert(second.clone());
            }
            Axiom::SubPropertyOf { sup, .. } => {
                frame.sub_property_of.insert(sup.clone());
            }
            Axiom::Domain { class, .. } => {
                frame.domain.insert(class.clone());
            }
            Axiom::Range { class, .. } => {
                frame.range.insert(class.clone());
            }
            Axiom::PropertyDefinition { domain, range, .. } => {
                frame.defined_by = Some(format!("{domain}, {range}"));
            }
            Axiom::ClassAssertion { class, .. } => {
                frame.types.insert(class.clone());
            }
            Axiom::Fact { property, object, .. } => {
                frame.facts.insert((property.clone(), object.clone()));
            }
            Axiom::Aboutness(a) => {
                frame.aboutness.insert(format!("{}: {}", a.keyword(), a.target));
            }
            Axiom::RepresentsFact { individual, .. } => {
                frame.represents_fact.insert(individual.clone());
            }
        }
    }
    for (ice, temporal) in ontology.temporal_frames() {
        if let Some(frame) = frames.get_mut(&(EntityKind::Ice, ice.as_str())) {
            frame.mode = temporal.mode;
            frame.cycle = temporal.cycle;
        }
    }

    let mut out = String::new();
    for ((kind, name), frame) in &frames {
        if !out.is_empty() {
            out.push('\n');
        }
        writeln!(out, "{}: {name}", frame_keyword(*kind)).unwrap();
        let mut clause = |keyword: &str, value: &str| {
            writeln!(out, "    {keyword}: {value}").unwrap();
        };
        match kind {
            EntityKind::Class => {
                frame.sub_class_of.iter().for_each(|v| clause("SubClassOf", v));
                frame.equivalent_to.iter().for_each(|v| clause("EquivalentTo", v));
                frame.disjoint_with.iter().for_each(|v| clause("DisjointWith", v));
            }
            EntityKind::Property => {
                frame.sub_property_of.iter().for_each(|v| clause("SubPropertyOf", v));
                frame.domain.iter().for_each(|v| clause("Domain", v));
                frame.range.iter().for_each(|v| clause("Range", v));
                if let Some(v) = &frame.defined_by {
                    clause("DefinedBy", v);
                }
            }
            EntityKind::Individual | EntityKind::Ice => {
                if !frame.types.is_empty() {
                    let types: Vec<&str> = frame.types.iter().map(String::as_str).collect();
                    clause("Types", &types.join(", "));
                }
                if let Some(mode) = frame.mode {
                    clause("Mode", mode.keyword());
                }
                if let Some(day) = frame.cycle {
                    clause("Cycle", weekday_name(day));
                }
                for line in &frame.aboutness {
                    writeln!(out, "    {line}").unwrap();
                }
                for individual in &frame.represents_fact {
                    writeln!(out, "    Represents-fact: {individual}").unwrap();
                }
                if !frame.facts.is_empty() {
                    let pairs: Vec<String> = frame.facts.iter().map(|(p, o)| format!("{p} {o}")).collect();
                    writeln!(out, "    Facts: {}", pairs.join(",\n        ")).unwrap();
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse, parse_with_prelude};

    #[test]
    fn canonical_layout() {
        let text = "Individual: b Types: B, A Facts: p a, p b\n\
                    Class: B\nClass: A SubClassOf: B EquivalentTo: B and (p some B)\n\
                    ObjectProperty: p Domain: A Range: B\nIndividual: a";
        let o = parse(text).unwrap();
        let expected = "\
Class: A
    SubClassOf: B
    EquivalentTo: B and p some B

Class: B

ObjectProperty: p
    Domain: A
    Range: B

Individual: a

Individual: b
    Types: A, B
    Facts: p a,
        p b
";
        assert_eq!(serialize(&o), expected);
        assert_eq!(parse(expected).unwrap(), o);
    }

    #[test]
    fn prelude_is_not_written_back() {
        let o = parse_with_prelude(
            "Class: Person SubClassOf: MaterialEntity\n\
             ICE: D Types: FictionalEntity Describes-only: Person",
        )
        .unwrap();
        let text = serialize(&o);
        assert!(!text.contains("Class: MaterialEntity"));
        assert_eq!(parse_with_prelude(&text).unwrap(), o);
    }

    #[test]
    fn empty_ontology_is_empty_text() {
        assert_eq!(serialize(&Ontology::empty()), "");
    }
}
