//! Generators and independent oracles shared by the integration tests.
//!
//! Nothing here calls into the analyses under test: closures are recomputed
//! from the raw axiom list, satisfaction is evaluated as extension sets, and
//! emptiness is checked by exhaustive model search.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use upo::aboutness::{AboutnessAssertion, ConstraintForm, Relation};
use upo::model::{Axiom, ClassExpression, Ontology, TemporalFrame};
use upo::temporal::IndexicalMode;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn workspace_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn fixture(name: &str) -> PathBuf {
    workspace_root().join("fixtures").join(name)
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Every fixture that is meant to parse.
pub const WELL_FORMED_FIXTURES: [&str; 9] = [
    "superman.upo",
    "honda.upo",
    "redteam.upo",
    "friday.upo",
    "ghost.upo",
    "ghost_parts.upo",
    "dummy_instance.upo",
    "existential.upo",
    "cyclic.upo",
];

// ---------------------------------------------------------------------------
// Random ontologies

#[derive(Debug, Clone, Default)]
pub struct Signature {
    pub classes: Vec<String>,
    pub properties: Vec<String>,
    pub individuals: Vec<String>,
    pub ices: Vec<String>,
}

impl Signature {
    pub fn new(classes: usize, properties: usize, individuals: usize, ices: usize) -> Self {
        let names = |prefix: &str, n: usize| (0..n).map(|i| format!("{prefix}{i}")).collect();
        Signature {
            classes: names("C", classes),
            properties: names("p", properties),
            individuals: names("i", individuals),
            ices: names("X", ices),
        }
    }

    pub fn declare(&self) -> upo::model::OntologyBuilder {
        let mut b = Ontology::builder();
        self.classes.iter().for_each(|n| {
            b.class(n.as_str());
        });
        self.properties.iter().for_each(|n| {
            b.property(n.as_str());
        });
        self.individuals.iter().for_each(|n| {
            b.individual(n.as_str());
        });
        self.ices.iter().for_each(|n| {
            b.ice(n.as_str());
        });
        b
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ExprShape {
    pub max_depth: usize,
    pub value: bool,
    pub via: bool,
}

fn pick<'a>(rng: &mut impl Rng, names: &'a [String]) -> &'a str {
    names.choose(rng).expect("non-empty name list")
}

/// A random expression with `depth() <= shape.max_depth`.
pub fn random_expression(rng: &mut impl Rng, sig: &Signature, shape: ExprShape) -> ClassExpression {
    let named = |rng: &mut _| ClassExpression::named(pick(rng, &sig.classes));
    if shape.max_depth <= 1 || rng.random_bool(0.3) {
        return named(rng);
    }
    let inner = ExprShape {
        max_depth: shape.max_depth - 1,
        ..shape
    };
    let has_props = !sig.properties.is_empty();
    loop {
        match rng.random_range(0..7) {
            0 | 1 => {
                let n = rng.random_range(2..=3);
                let ops: Vec<_> = (0..n).map(|_| random_expression(rng, sig, inner)).collect();
                return if rng.random_bool(0.6) {
                    ClassExpression::and(ops)
                } else {
                    ClassExpression::or(ops)
                };
            }
            2 => return ClassExpression::not(random_expression(rng, sig, inner)),
            3 if has_props => {
                return ClassExpression::some(pick(rng, &sig.properties), random_expression(rng, sig, inner))
            }
            4 if has_props => {
                return ClassExpression::only(pick(rng, &sig.properties), random_expression(rng, sig, inner))
            }
            5 if has_props && shape.value && !sig.individuals.is_empty() => {
                return ClassExpression::value(pick(rng, &sig.properties), pick(rng, &sig.individuals))
            }
            6 if has_props && shape.via && !sig.ices.is_empty() => {
                return ClassExpression::via(pick(rng, &sig.properties), pick(rng, &sig.ices))
            }
            _ => {}
        }
    }
}

fn particulars(sig: &Signature) -> Vec<String> {
    sig.individuals.iter().chain(&sig.ices).cloned().collect()
}

/// Ontology for serializer round trips: up to 8 classes and 12 axioms, every
/// axiom form, expressions of depth at most 3. Each ICE gets exactly one
/// aboutness assertion (counted among the 12) so the text is parseable.
pub fn random_document(rng: &mut impl Rng) -> Ontology {
    let sig = Signature::new(
        rng.random_range(1..=8),
        rng.random_range(0..=3),
        rng.random_range(0..=3),
        rng.random_range(0..=2),
    );
    let shape = ExprShape {
        max_depth: 3,
        value: true,
        via: true,
    };
    let mut b = sig.declare();
    let mut axioms = 0;
    for ice in &sig.ices {
        let relation = *Relation::ALL.choose(rng).unwrap();
        let constraint = if rng.random_bool(0.8) {
            ConstraintForm::Universal
        } else {
            ConstraintForm::Existential
        };
        b.axiom(Axiom::Aboutness(AboutnessAssertion {
            ice: ice.clone(),
            relation,
            target: random_expression(rng, &sig, shape),
            constraint,
        }));
        axioms += 1;
        if rng.random_bool(0.3) {
            b.temporal(
                ice.as_str(),
                TemporalFrame {
                    mode: [None, Some(IndexicalMode::This), Some(IndexicalMode::Next)]
                        .choose(rng)
                        .copied()
                        .flatten(),
                    cycle: Some(chrono::Weekday::try_from(rng.random_range(0..7u8)).unwrap()),
                },
            );
        }
    }
    let mut ice_typed = BTreeSet::new();
    let mut defined = BTreeSet::new();
    let target = rng.random_range(axioms..=12);
    let everyone = particulars(&sig);
    while axioms < target {
        let c = |rng: &mut _| pick(rng, &sig.classes).to_owned();
        let axiom = match rng.random_range(0..10) {
            0 => Axiom::SubClassOf {
                sub: c(rng),
                sup: c(rng),
            },
            1 => Axiom::EquivalentTo {
                class: c(rng),
                definition: random_expression(rng, &sig, shape),
            },
            2 => Axiom::DisjointWith {
                first: c(rng),
                second: c(rng),
            },
            3 if !sig.properties.is_empty() => Axiom::SubPropertyOf {
                sub: pick(rng, &sig.properties).to_owned(),
                sup: pick(rng, &sig.properties).to_owned(),
            },
            4 if !sig.properties.is_empty() => {
                let property = pick(rng, &sig.properties).to_owned();
                if rng.random_bool(0.5) {
                    Axiom::Domain {
                        property,
                        class: c(rng),
                    }
                } else {
                    Axiom::Range {
                        property,
                        class: c(rng),
                    }
                }
            }
            5 if !sig.properties.is_empty() => {
                let property = pick(rng, &sig.properties).to_owned();
                if !defined.insert(property.clone()) {
                    continue;
                }
                Axiom::PropertyDefinition {
                    property,
                    domain: random_expression(rng, &sig, shape),
                    range: random_expression(rng, &sig, shape),
                }
            }
            6 if !everyone.is_empty() => {
                let individual = pick(rng, &everyone).to_owned();
                if sig.ices.contains(&individual) && !ice_typed.insert(individual.clone()) {
                    continue;
                }
                Axiom::ClassAssertion {
                    individual,
                    class: c(rng),
                }
            }
            7 if !everyone.is_empty() && !sig.properties.is_empty() => Axiom::Fact {
                subject: pick(rng, &everyone).to_owned(),
                property: pick(rng, &sig.properties).to_owned(),
                object: pick(rng, &everyone).to_owned(),
            },
            8 if !sig.ices.is_empty() && !sig.individuals.is_empty() => Axiom::RepresentsFact {
                ice: pick(rng, &sig.ices).to_owned(),
                individual: pick(rng, &sig.individuals).to_owned(),
            },
            _ => continue,
        };
        b.axiom(axiom);
        axioms += 1;
    }
    b.build().expect("generated document is well formed")
}

/// Small closed-world ABox for satisfaction checks: up to 5 individuals,
/// typed and related at random, with one ICE whose target can be used in
/// `via` restrictions. Returns the ontology and its signature.
pub fn random_abox(rng: &mut impl Rng) -> (Ontology, Signature) {
    let sig = Signature::new(
        rng.random_range(1..=4),
        rng.random_range(1..=3),
        rng.random_range(1..=5),
        1,
    );
    let mut b = sig.declare();
    let plain = ExprShape {
        max_depth: 3,
        value: true,
        via: false,
    };
    b.axiom(Axiom::Aboutness(AboutnessAssertion::universal(
        sig.ices[0].clone(),
        Relation::Describes,
        random_expression(rng, &sig, plain),
    )));
    for _ in 0..rng.random_range(0..=3) {
        b.axiom(Axiom::SubClassOf {
            sub: pick(rng, &sig.classes).to_owned(),
            sup: pick(rng, &sig.classes).to_owned(),
        });
    }
    for _ in 0..rng.random_range(0..=2) {
        b.axiom(Axiom::SubPropertyOf {
            sub: pick(rng, &sig.properties).to_owned(),
            sup: pick(rng, &sig.properties).to_owned(),
        });
    }
    for i in &sig.individuals {
        for c in &sig.classes {
            if rng.random_bool(0.35) {
                b.axiom(Axiom::ClassAssertion {
                    individual: i.clone(),
                    class: c.clone(),
                });
            }
        }
        for _ in 0..rng.random_range(0..=3) {
            b.axiom(Axiom::Fact {
                subject: i.clone(),
                property: pick(rng, &sig.properties).to_owned(),
                object: pick(rng, &sig.individuals).to_owned(),
            });
        }
    }
    (b.build().unwrap(), sig)
}

pub fn random_abox_expression(rng: &mut impl Rng, sig: &Signature) -> ClassExpression {
    random_expression(
        rng,
        sig,
        ExprShape {
            max_depth: 3,
            value: true,
            via: true,
        },
    )
}

/// Small TBox for emptiness checks: up to 3 classes, one property and one
/// individual. With `acyclic`, definitions and subclass edges only point from
/// higher to lower class indices.
pub fn random_tbox(rng: &mut impl Rng, acyclic: bool) -> (Ontology, Signature) {
    let sig = Signature::new(rng.random_range(1..=3), 1, 1, 0);
    let mut b = sig.declare();
    let n = sig.classes.len();
    let shape = |max_depth| ExprShape {
        max_depth,
        value: true,
        via: false,
    };
    for _ in 0..rng.random_range(0..=3) {
        let (a, c) = (rng.random_range(0..n), rng.random_range(0..n));
        match rng.random_range(0..5) {
            0 | 1 => {
                if !acyclic || a > c {
                    b.axiom(Axiom::SubClassOf {
                        sub: sig.classes[a].clone(),
                        sup: sig.classes[c].clone(),
                    });
                }
            }
            2 => {
                b.axiom(Axiom::DisjointWith {
                    first: sig.classes[a].clone(),
                    second: sig.classes[c].clone(),
                });
            }
            _ => {
                let lower = Signature {
                    classes: sig.classes[..a].to_vec(),
                    ..sig.clone()
                };
                let definition = if !acyclic {
                    random_expression(rng, &sig, shape(2))
                } else if a == 0 {
                    continue;
                } else {
                    random_expression(rng, &lower, shape(2))
                };
                b.axiom(Axiom::EquivalentTo {
                    class: sig.classes[a].clone(),
                    definition,
                });
            }
        }
    }
    if rng.random_bool(0.3) {
        b.axiom(Axiom::ClassAssertion {
            individual: sig.individuals[0].clone(),
            class: pick(rng, &sig.classes).to_owned(),
        });
    }
    if rng.random_bool(0.2) {
        b.axiom(Axiom::Domain {
            property: sig.properties[0].clone(),
            class: pick(rng, &sig.classes).to_owned(),
        });
    }
    (b.build().unwrap(), sig)
}

pub fn random_tbox_expression(rng: &mut impl Rng, sig: &Signature) -> ClassExpression {
    random_expression(
        rng,
        sig,
        ExprShape {
            max_depth: 3,
            value: true,
            via: false,
        },
    )
}

/// Axioms for grounding checks: some classes with instances, some only
/// defined (possibly cyclically), properties with facts, domains or
/// definitions, and one ICE whose target mixes them.
pub fn random_grounding_axioms(rng: &mut impl Rng) -> (Signature, Vec<Axiom>) {
    let sig = Signature::new(rng.random_range(2..=5), rng.random_range(1..=2), 2, 1);
    let shape = ExprShape {
        max_depth: 3,
        value: true,
        via: true,
    };
    let mut axioms = vec![Axiom::Aboutness(AboutnessAssertion::universal(
        sig.ices[0].clone(),
        Relation::Describes,
        random_expression(rng, &sig, shape),
    ))];
    let mut defined = BTreeSet::new();
    for _ in 0..rng.random_range(1..=7) {
        let c = |rng: &mut _| pick(rng, &sig.classes).to_owned();
        let p = |rng: &mut _| pick(rng, &sig.properties).to_owned();
        let i = |rng: &mut _| pick(rng, &sig.individuals).to_owned();
        axioms.push(match rng.random_range(0..7) {
            0 => Axiom::SubClassOf {
                sub: c(rng),
                sup: c(rng),
            },
            1 | 2 => Axiom::EquivalentTo {
                class: c(rng),
                definition: random_expression(rng, &sig, shape),
            },
            3 => Axiom::ClassAssertion {
                individual: i(rng),
                class: c(rng),
            },
            4 => Axiom::Fact {
                subject: i(rng),
                property: p(rng),
                object: i(rng),
            },
            5 => Axiom::Domain {
                property: p(rng),
                class: c(rng),
            },
            _ => {
                let property = p(rng);
                if !defined.insert(property.clone()) {
                    continue;
                }
                Axiom::PropertyDefinition {
                    property,
                    domain: random_expression(rng, &sig, shape),
                    range: random_expression(rng, &sig, shape),
                }
            }
        });
    }
    (sig, axioms)
}

/// An axiom that only adds instances: a class assertion or a fact.
pub fn random_instance_axiom(rng: &mut impl Rng, sig: &Signature) -> Axiom {
    if rng.random_bool(0.6) {
        Axiom::ClassAssertion {
            individual: pick(rng, &sig.individuals).to_owned(),
            class: pick(rng, &sig.classes).to_owned(),
        }
    } else {
        Axiom::Fact {
            subject: pick(rng, &sig.individuals).to_owned(),
            property: pick(rng, &sig.properties).to_owned(),
            object: pick(rng, &sig.individuals).to_owned(),
        }
    }
}

pub fn build(sig: &Signature, axioms: &[Axiom]) -> Ontology {
    let mut b = sig.declare();
    for a in axioms {
        b.axiom(a.clone());
    }
    b.build().expect("generated ontology is well formed")
}

// ---------------------------------------------------------------------------
// Closures recomputed from raw axioms

/// Reflexive-transitive closure by Floyd–Warshall over `names`.
pub fn closure(names: &[String], edges: &[(String, String)]) -> BTreeMap<String, BTreeSet<String>> {
    let n = names.len();
    let index: BTreeMap<&str, usize> = names.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let mut reach = vec![vec![false; n]; n];
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
    }
    for (a, b) in edges {
        if let (Some(&i), Some(&j)) = (index.get(a.as_str()), index.get(b.as_str())) {
            reach[i][j] = true;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if reach[i][k] && reach[k][j] {
                    reach[i][j] = true;
                }
            }
        }
    }
    names
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let ups = names
                .iter()
                .enumerate()
                .filter(|(j, _)| reach[i][*j])
                .map(|(_, b)| b.clone());
            (a.clone(), ups.collect())
        })
        .collect()
}

pub fn class_closure(o: &Ontology) -> BTreeMap<String, BTreeSet<String>> {
    let names: Vec<String> = o.classes().map(str::to_owned).collect();
    let edges: Vec<_> = o
        .axioms()
        .filter_map(|a| match a {
            Axiom::SubClassOf { sub, sup } => Some((sub.clone(), sup.clone())),
            _ => None,
        })
        .collect();
    closure(&names, &edges)
}

pub fn property_closure(o: &Ontology) -> BTreeMap<String, BTreeSet<String>> {
    let names: Vec<String> = o.properties().map(str::to_owned).collect();
    let edges: Vec<_> = o
        .axioms()
        .filter_map(|a| match a {
            Axiom::SubPropertyOf { sub, sup } => Some((sub.clone(), sup.clone())),
            _ => None,
        })
        .collect();
    closure(&names, &edges)
}

// ---------------------------------------------------------------------------
// Satisfaction as extension sets

/// The set of individuals and ICEs satisfying `e` under the closed-world
/// reading: types and facts are exactly what is asserted.
pub fn extension(o: &Ontology, e: &ClassExpression) -> BTreeSet<String> {
    let classes = class_closure(o);
    let props = property_closure(o);
    let universe: BTreeSet<String> = o.individuals().chain(o.ices()).map(str::to_owned).collect();
    let mut types: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    let mut facts: Vec<(&str, &str, &str)> = Vec::new();
    let mut targets: BTreeMap<&str, Vec<&ClassExpression>> = BTreeMap::new();
    for a in o.axioms() {
        match a {
            Axiom::ClassAssertion { individual, class } => {
                types.entry(individual).or_default().insert(class);
            }
            Axiom::Fact {
                subject,
                property,
                object,
            } => facts.push((subject, property, object)),
            Axiom::Aboutness(a) => targets.entry(&a.ice).or_default().push(&a.target),
            _ => {}
        }
    }
    let ext = Extension {
        classes: &classes,
        props: &props,
        universe: &universe,
        types: &types,
        facts: &facts,
        targets: &targets,
    };
    ext.eval(e)
}

struct Extension<'a> {
    classes: &'a BTreeMap<String, BTreeSet<String>>,
    props: &'a BTreeMap<String, BTreeSet<String>>,
    universe: &'a BTreeSet<String>,
    types: &'a BTreeMap<&'a str, BTreeSet<&'a str>>,
    facts: &'a [(&'a str, &'a str, &'a str)],
    targets: &'a BTreeMap<&'a str, Vec<&'a ClassExpression>>,
}

impl Extension<'_> {
    fn successors(&self, x: &str, p: &str) -> Vec<&str> {
        self.facts
            .iter()
            .filter(|(s, q, _)| *s == x && self.props[*q].contains(p))
            .map(|(_, _, o)| *o)
            .collect()
    }

    fn eval(&self, e: &ClassExpression) -> BTreeSet<String> {
        let filter =
            |f: &dyn Fn(&str) -> bool| -> BTreeSet<String> { self.universe.iter().filter(|x| f(x)).cloned().collect() };
        match e {
            ClassExpression::Named(c) => filter(&|x| {
                self.types
                    .get(x)
                    .is_some_and(|ts| ts.iter().any(|t| self.classes[*t].contains(c)))
            }),
            ClassExpression::And(xs) => xs.iter().map(|x| self.eval(x)).reduce(|a, b| &a & &b).unwrap(),
            ClassExpression::Or(xs) => xs.iter().map(|x| self.eval(x)).reduce(|a, b| &a | &b).unwrap(),
            ClassExpression::Not(x) => self.universe - &self.eval(x),
            ClassExpression::Some { property, filler } => {
                let inner = self.eval(filler);
                filter(&|x| self.successors(x, property).iter().any(|o| inner.contains(*o)))
            }
            ClassExpression::Only { property, filler } => {
                let inner = self.eval(filler);
                filter(&|x| self.successors(x, property).iter().all(|o| inner.contains(*o)))
            }
            ClassExpression::Value { property, individual } => {
                filter(&|x| self.successors(x, property).contains(&individual.as_str()))
            }
            ClassExpression::Via { property, ice } => {
                let mut inner = self.universe.clone();
                for t in self.targets.get(ice.as_str()).into_iter().flatten() {
                    inner = &inner & &self.eval(t);
                }
                filter(&|x| self.successors(x, property).iter().all(|o| inner.contains(*o)))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Structural emptiness, restated from the rules

#[derive(Default)]
struct Atoms {
    pos: BTreeSet<String>,
    neg: BTreeSet<String>,
    complex: BTreeSet<ClassExpression>,
    neg_complex: BTreeSet<ClassExpression>,
    bottom: bool,
}

/// The structural criterion over an ontology whose definitions are acyclic:
/// a conjunct set (names closed under superclasses and their definitions)
/// holding a disjoint pair, a name and its complement, a restriction or union
/// and its complement, an existential with empty filler, or a union of empty
/// disjuncts.
pub fn structural_oracle(o: &Ontology, e: &ClassExpression) -> bool {
    let classes = class_closure(o);
    let mut disjoint = BTreeSet::new();
    let mut defs: BTreeMap<&str, Vec<&ClassExpression>> = BTreeMap::new();
    for a in o.axioms() {
        match a {
            Axiom::DisjointWith { first, second } => {
                disjoint.insert((first.as_str(), second.as_str()));
                disjoint.insert((second.as_str(), first.as_str()));
            }
            Axiom::EquivalentTo { class, definition } => defs.entry(class).or_default().push(definition),
            _ => {}
        }
    }
    fn contradictory(
        e: &ClassExpression,
        classes: &BTreeMap<String, BTreeSet<String>>,
        defs: &BTreeMap<&str, Vec<&ClassExpression>>,
        disjoint: &BTreeSet<(&str, &str)>,
    ) -> bool {
        let mut atoms = Atoms::default();
        let mut work = vec![e.clone()];
        while let Some(x) = work.pop() {
            match &x {
                ClassExpression::Named(c) => {
                    for up in &classes[c] {
                        atoms.pos.insert(up.clone());
                        for d in defs.get(up.as_str()).into_iter().flatten() {
                            work.push((*d).clone());
                        }
                    }
                }
                ClassExpression::And(xs) => work.extend(xs.iter().cloned()),
                ClassExpression::Not(inner) => match inner.as_ref() {
                    ClassExpression::Named(c) => {
                        atoms.neg.insert(c.clone());
                    }
                    other => {
                        atoms.neg_complex.insert(other.clone());
                    }
                },
                ClassExpression::Or(xs) => {
                    atoms.bottom |= xs.iter().all(|d| contradictory(d, classes, defs, disjoint));
                    atoms.complex.insert(x.clone());
                }
                ClassExpression::Some { filler, .. } => {
                    atoms.bottom |= contradictory(filler, classes, defs, disjoint);
                    atoms.complex.insert(x.clone());
                }
                _ => {
                    atoms.complex.insert(x.clone());
                }
            }
        }
        atoms.bottom
            || atoms
                .pos
                .iter()
                .any(|a| atoms.pos.iter().any(|b| disjoint.contains(&(a.as_str(), b.as_str()))))
            || atoms.neg.iter().any(|c| atoms.pos.contains(c))
            || atoms.neg_complex.iter().any(|c| atoms.complex.contains(c))
    }
    contradictory(e, &classes, &defs, &disjoint)
}

// ---------------------------------------------------------------------------
// Exhaustive model search

/// Searches for a model with at most `max_domain` elements in which `e` has an
/// instance. Supports the TBox shapes from [`random_tbox`]: named classes,
/// one property, one individual, subclass, disjointness, equivalence, domain
/// and range, class assertions and facts. Sub-properties and ICEs are absent.
pub fn has_model(o: &Ontology, e: &ClassExpression, max_domain: usize) -> bool {
    let classes: Vec<String> = o.classes().map(str::to_owned).collect();
    let props: Vec<String> = o.properties().map(str::to_owned).collect();
    let individuals: Vec<String> = o.individuals().map(str::to_owned).collect();
    assert!(props.len() <= 1 && individuals.len() <= 1 && o.ices().next().is_none());
    assert!(max_domain <= 3);
    let axioms: Vec<Axiom> = o.axioms().cloned().collect();
    (1..=max_domain).any(|n| {
        let relations = if props.is_empty() { 1u32 } else { 1 << (n * n) };
        (0..relations).any(|rel| {
            let mut m = Model {
                n,
                rel,
                class_masks: BTreeMap::new(),
                classes: &classes,
            };
            search_classes(&mut m, 0, &axioms, e)
        })
    })
}

struct Model<'a> {
    n: usize,
    /// Bit `x * n + y` set when (x, y) is in the relation.
    rel: u32,
    class_masks: BTreeMap<&'a str, u8>,
    classes: &'a [String],
}

impl Model<'_> {
    fn full(&self) -> u8 {
        ((1u16 << self.n) - 1) as u8
    }

    fn related(&self, x: usize, y: usize) -> bool {
        self.rel >> (x * self.n + y) & 1 == 1
    }

    /// The individual is interpreted as element 0; any model can be permuted
    /// so that this holds.
    fn eval(&self, e: &ClassExpression) -> u8 {
        let n = self.n;
        let collect = |f: &dyn Fn(usize) -> bool| (0..n).filter(|&x| f(x)).fold(0u8, |m, x| m | 1 << x);
        match e {
            ClassExpression::Named(c) => self.class_masks[c.as_str()],
            ClassExpression::And(xs) => xs.iter().fold(self.full(), |m, x| m & self.eval(x)),
            ClassExpression::Or(xs) => xs.iter().fold(0, |m, x| m | self.eval(x)),
            ClassExpression::Not(x) => !self.eval(x) & self.full(),
            ClassExpression::Some { filler, .. } => {
                let f = self.eval(filler);
                collect(&|x| (0..n).any(|y| self.related(x, y) && f >> y & 1 == 1))
            }
            ClassExpression::Only { filler, .. } => {
                let f = self.eval(filler);
                collect(&|x| (0..n).all(|y| !self.related(x, y) || f >> y & 1 == 1))
            }
            ClassExpression::Value { .. } => collect(&|x| self.related(x, 0)),
            ClassExpression::Via { .. } => unreachable!("model search does not cover via"),
        }
    }

    fn assigned(&self, c: &str) -> Option<u8> {
        self.class_masks.get(c).copied()
    }
}

/// Assigns class extensions one at a time, pruning on the subclass and
/// disjointness axioms whose classes are already assigned.
fn search_classes<'a>(m: &mut Model<'a>, k: usize, axioms: &[Axiom], e: &ClassExpression) -> bool {
    if k == m.classes.len() {
        return satisfies_axioms(m, axioms) && m.eval(e) != 0;
    }
    let name = m.classes[k].as_str();
    for mask in 0..=m.full() {
        m.class_masks.insert(name, mask);
        let consistent = axioms.iter().all(|a| match a {
            Axiom::SubClassOf { sub, sup } => match (m.assigned(sub), m.assigned(sup)) {
                (Some(x), Some(y)) => x & !y == 0,
                _ => true,
            },
            Axiom::DisjointWith { first, second } => match (m.assigned(first), m.assigned(second)) {
                (Some(x), Some(y)) => x & y == 0,
                _ => true,
            },
            Axiom::ClassAssertion { class, .. } => m.assigned(class).is_none_or(|x| x & 1 == 1),
            _ => true,
        });
        if consistent && search_classes(m, k + 1, axioms, e) {
            return true;
        }
    }
    m.class_masks.remove(name);
    false
}

fn satisfies_axioms(m: &Model<'_>, axioms: &[Axiom]) -> bool {
    let n = m.n;
    axioms.iter().all(|a| match a {
        Axiom::EquivalentTo { class, definition } => m.class_masks[class.as_str()] == m.eval(definition),
        Axiom::Domain { class, .. } => {
            let c = m.class_masks[class.as_str()];
            (0..n).all(|x| (0..n).all(|y| !m.related(x, y) || c >> x & 1 == 1))
        }
        Axiom::Range { class, .. } => {
            let c = m.class_masks[class.as_str()];
            (0..n).all(|x| (0..n).all(|y| !m.related(x, y) || c >> y & 1 == 1))
        }
        Axiom::Fact { .. } => m.related(0, 0),
        Axiom::SubClassOf { .. } | Axiom::DisjointWith { .. } | Axiom::ClassAssertion { .. } => true,
        other => panic!("model search does not cover {other:?}"),
    })
}

// ---------------------------------------------------------------------------
// Grounding status by graph reachability

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expected {
    Grounded,
    Cyclic,
    Ungrounded,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Subject {
    Class(String),
    Property(String),
    Ice(String),
}

/// Overall grounding status of `ice` computed as a graph property: build the
/// subject graph (a class without instances points at the subjects named in
/// its definitions, a property at those in its definition or else its domain
/// and range classes, an ICE at those in its target), then report
/// Ungrounded if a reachable subject is a dead end, Cyclic if a reachable
/// subject lies on a cycle, and Grounded otherwise.
pub fn expected_grounding(o: &Ontology, ice: &str) -> Expected {
    let classes = class_closure(o);
    let props = property_closure(o);
    let mut typed = BTreeSet::new();
    let mut used = BTreeSet::new();
    let mut edges: BTreeMap<Subject, Vec<Subject>> = BTreeMap::new();
    let mut dead_ends = BTreeSet::new();
    let mut targets: BTreeMap<&str, Vec<&ClassExpression>> = BTreeMap::new();
    let mut defs: BTreeMap<&str, Vec<&ClassExpression>> = BTreeMap::new();
    let mut prop_defs: BTreeMap<&str, [&ClassExpression; 2]> = BTreeMap::new();
    let mut relata: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for a in o.axioms() {
        match a {
            Axiom::ClassAssertion { class, .. } => {
                typed.extend(classes[class].iter().cloned());
            }
            Axiom::Fact { property, .. } => {
                used.extend(props[property].iter().cloned());
            }
            Axiom::Aboutness(a) => targets.entry(&a.ice).or_default().push(&a.target),
            Axiom::EquivalentTo { class, definition } => defs.entry(class).or_default().push(definition),
            Axiom::PropertyDefinition {
                property,
                domain,
                range,
            } => {
                prop_defs.insert(property, [domain, range]);
            }
            Axiom::Domain { property, class } | Axiom::Range { property, class } => {
                relata.entry(property).or_default().push(class)
            }
            _ => {}
        }
    }
    fn mentions(e: &ClassExpression, out: &mut Vec<Subject>) {
        match e {
            ClassExpression::Named(c) => out.push(Subject::Class(c.clone())),
            ClassExpression::And(xs) | ClassExpression::Or(xs) => xs.iter().for_each(|x| mentions(x, out)),
            ClassExpression::Not(x) => mentions(x, out),
            ClassExpression::Some { property, filler } | ClassExpression::Only { property, filler } => {
                out.push(Subject::Property(property.clone()));
                mentions(filler, out);
            }
            ClassExpression::Value { property, .. } => out.push(Subject::Property(property.clone())),
            ClassExpression::Via { property, ice } => {
                out.push(Subject::Property(property.clone()));
                out.push(Subject::Ice(ice.clone()));
            }
        }
    }
    let root = Subject::Ice(ice.to_owned());
    let mut stack = vec![root.clone()];
    while let Some(s) = stack.pop() {
        if edges.contains_key(&s) {
            continue;
        }
        let mut out = Vec::new();
        match &s {
            Subject::Class(c) if typed.contains(c) => {}
            Subject::Class(c) => match defs.get(c.as_str()) {
                Some(ds) => ds.iter().for_each(|d| mentions(d, &mut out)),
                None => {
                    dead_ends.insert(s.clone());
                }
            },
            Subject::Property(p) => {
                if let Some([d, r]) = prop_defs.get(p.as_str()) {
                    mentions(d, &mut out);
                    mentions(r, &mut out);
                } else if let Some(cs) = relata.get(p.as_str()) {
                    out.extend(cs.iter().map(|c| Subject::Class((*c).to_owned())));
                } else if !used.contains(p) {
                    dead_ends.insert(s.clone());
                }
            }
            Subject::Ice(x) => match targets.get(x.as_str()).map(Vec::as_slice) {
                Some([t]) => mentions(t, &mut out),
                _ => {
                    dead_ends.insert(s.clone());
                }
            },
        }
        stack.extend(out.iter().cloned());
        edges.insert(s, out);
    }
    if !dead_ends.is_empty() {
        return Expected::Ungrounded;
    }
    // A cycle exists iff repeatedly removing subjects with no outgoing edges
    // into the remaining set leaves something behind.
    let mut remaining: BTreeSet<&Subject> = edges.keys().collect();
    loop {
        let sinks: Vec<&Subject> = remaining
            .iter()
            .copied()
            .filter(|s| edges[*s].iter().all(|t| !remaining.contains(t)))
            .collect();
        if sinks.is_empty() {
            break;
        }
        for s in sinks {
            remaining.remove(s);
        }
    }
    if remaining.is_empty() {
        Expected::Grounded
    } else {
        Expected::Cyclic
    }
}

// ---------------------------------------------------------------------------
// Calendar

/// Zeller's congruence. 0 = Saturday, 1 = Sunday, ..., 6 = Friday.
pub fn zeller(year: i32, month: u32, day: u32) -> u32 {
    let (y, m) = if month < 3 {
        (year - 1, month + 12)
    } else {
        (year, month)
    };
    let k = y.rem_euclid(100);
    let j = y.div_euclid(100);
    ((day as i32 + (13 * (m as i32 + 1)) / 5 + k + k / 4 + j / 4 + 5 * j).rem_euclid(7)) as u32
}

/// Zeller's day number for a weekday.
pub fn zeller_index(day: chrono::Weekday) -> u32 {
    (day.num_days_from_sunday() + 1) % 7
}
