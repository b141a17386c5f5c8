//! Decomposition of aboutness targets down to actual classes.
//!
//! Grounding walks an ICE's target expression depth first. A named class with
//! instances is an actual leaf. One without instances is expanded through its
//! `EquivalentTo:` definitions; with none it is ungrounded. Properties are
//! explicated through their definition, or their domain and range classes.
//! `via` links continue into the referenced ICE's own target. Subjects already
//! on the current path become `Cyclic` leaves, so the walk always terminates.
//!
//! Each subject (class, property, individual, ICE) is expanded at most once
//! per report and the resulting node is shared, which keeps the tree linear in
//! the size of the ontology even when definitions are reused.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::aboutness::{classify_ice, ConstraintForm, IceCategory, Relation};
use crate::model::{Axiom, ClassExpression, EntityKind, ModelError, Ontology};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeStatus {
    /// A class with instances, an individual, or a property used in facts.
    Actual,
    /// Expanded into children that carry the grounding.
    Defined,
    Ungrounded,
    /// Back-edge to a subject already being expanded.
    Cyclic,
    /// A composite expression that can have no instances.
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubjectKind {
    Class,
    Property,
    Individual,
    Ice,
    Expression,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OverallStatus {
    Grounded,
    Ungrounded,
    Cyclic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundingNode {
    pub subject: String,
    pub kind: SubjectKind,
    pub status: NodeStatus,
    pub note: Option<String>,
    pub children: Vec<Arc<GroundingNode>>,
    /// Expansion depth of this subtree: 1 for a leaf, one more for each
    /// definition or ICE expanded on the way down.
    pub depth: usize,
}

impl GroundingNode {
    /// Every distinct node reachable from here, each listed once.
    pub fn distinct_nodes(self: &Arc<Self>) -> Vec<Arc<GroundingNode>> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        let mut stack = vec![Arc::clone(self)];
        while let Some(node) = stack.pop() {
            if !seen.insert(Arc::as_ptr(&node)) {
                continue;
            }
            stack.extend(node.children.iter().rev().cloned());
            out.push(node);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundingReport {
    pub ice: String,
    pub root: Arc<GroundingNode>,
    pub overall: OverallStatus,
    pub necessarily_empty: bool,
    pub max_depth: usize,
}

/// Tree form of a grounding node. A composite subtree that appears more than
/// once is written in full the first time and as `see_above` afterwards.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceNode {
    pub subject: String,
    pub kind: SubjectKind,
    pub status: NodeStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub see_above: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<TraceNode>,
}

/// Serialized shape of a [`GroundingReport`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundingSummary {
    pub ice: String,
    pub overall: OverallStatus,
    pub necessarily_empty: bool,
    pub max_depth: usize,
    pub root: TraceNode,
}

impl GroundingReport {
    pub fn trace(&self) -> TraceNode {
        fn build(node: &Arc<GroundingNode>, seen: &mut HashSet<*const GroundingNode>) -> TraceNode {
            let repeat = !node.children.is_empty() && !seen.insert(Arc::as_ptr(node));
            TraceNode {
                subject: node.subject.clone(),
                kind: node.kind,
                status: node.status,
                note: node.note.clone(),
                see_above: repeat,
                children: if repeat {
                    Vec::new()
                } else {
                    node.children.iter().map(|c| build(c, seen)).collect()
                },
            }
        }
        build(&self.root, &mut HashSet::new())
    }

    pub fn summary(&self) -> GroundingSummary {
        GroundingSummary {
            ice: self.ice.clone(),
            overall: self.overall,
            necessarily_empty: self.necessarily_empty,
            max_depth: self.max_depth,
            root: self.trace(),
        }
    }

    pub fn nodes(&self) -> Vec<Arc<GroundingNode>> {
        self.root.distinct_nodes()
    }
}

impl Serialize for GroundingReport {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.summary().serialize(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroundingError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("ICE '{0}' has no aboutness assertion")]
    NoAboutness(String),
    #[error("ICE '{ice}' has {count} aboutness assertions; exactly one is required")]
    MultipleAboutness { ice: String, count: usize },
}

/// The single aboutness target of `ice`.
pub fn aboutness_target<'o>(ontology: &'o Ontology, ice: &str) -> Result<&'o ClassExpression, GroundingError> {
    ontology.expect(ice, EntityKind::Ice)?;
    match ontology.aboutness_of(ice) {
        [] => Err(GroundingError::NoAboutness(ice.to_owned())),
        [one] => Ok(&one.target),
        many => Err(GroundingError::MultipleAboutness {
            ice: ice.to_owned(),
            count: many.len(),
        }),
    }
}

pub fn ground(ontology: &Ontology, ice: &str) -> Result<GroundingReport, GroundingError> {
    let target = aboutness_target(ontology, ice)?;
    let mut grounder = Grounder {
        ontology,
        memo: HashMap::new(),
        cyclic: HashMap::new(),
        path: HashSet::new(),
        created: 0,
    };
    grounder.path.insert((SubjectKind::Ice, ice.to_owned()));
    let root = grounder.expression(target);
    debug_assert!(
        grounder.created <= node_cap(ontology, target),
        "grounding created {} nodes, cap is {}",
        grounder.created,
        node_cap(ontology, target)
    );

    let nodes = root.distinct_nodes();
    let any = |s: NodeStatus| nodes.iter().any(|n| n.status == s);
    let overall = if any(NodeStatus::Ungrounded) {
        OverallStatus::Ungrounded
    } else if any(NodeStatus::Cyclic) {
        OverallStatus::Cyclic
    } else {
        OverallStatus::Grounded
    };
    Ok(GroundingReport {
        ice: ice.to_owned(),
        max_depth: root.depth,
        overall,
        necessarily_empty: empty_unchecked(ontology, target),
        root,
    })
}

/// Upper bound on the number of distinct nodes [`ground`] may create for
/// `target`: two per declared subject (its expansion and one cyclic marker)
/// plus every expression node of every definition and aboutness target that
/// can be expanded, plus the target itself.
pub fn node_cap(ontology: &Ontology, target: &ClassExpression) -> usize {
    let subjects = ontology.declarations().count();
    let expressions: usize = ontology
        .axioms()
        .map(|a| match a {
            Axiom::EquivalentTo { definition, .. } => definition.size(),
            Axiom::PropertyDefinition { domain, range, .. } => domain.size() + range.size(),
            Axiom::Aboutness(a) => a.target.size(),
            _ => 0,
        })
        .sum();
    2 * subjects + expressions + target.size()
}

struct Grounder<'o> {
    ontology: &'o Ontology,
    memo: HashMap<(SubjectKind, String), Arc<GroundingNode>>,
    cyclic: HashMap<(SubjectKind, String), Arc<GroundingNode>>,
    path: HashSet<(SubjectKind, String)>,
    created: usize,
}

fn max_depth(children: &[Arc<GroundingNode>]) -> usize {
    children.iter().map(|c| c.depth).max().unwrap_or(0)
}

impl<'o> Grounder<'o> {
    fn node(
        &mut self,
        subject: String,
        kind: SubjectKind,
        status: NodeStatus,
        note: Option<&str>,
        children: Vec<Arc<GroundingNode>>,
        depth: usize,
    ) -> Arc<GroundingNode> {
        self.created += 1;
        Arc::new(GroundingNode {
            subject,
            kind,
            status,
            note: note.map(str::to_owned),
            children,
            depth,
        })
    }

    fn leaf(&mut self, subject: &str, kind: SubjectKind, status: NodeStatus, note: Option<&str>) -> Arc<GroundingNode> {
        self.node(subject.to_owned(), kind, status, note, Vec::new(), 1)
    }

    /// Memoised expansion of a named subject with cycle detection.
    fn subject(
        &mut self,
        kind: SubjectKind,
        name: &str,
        expand: impl FnOnce(&mut Self) -> Arc<GroundingNode>,
    ) -> Arc<GroundingNode> {
        let key = (kind, name.to_owned());
        if let Some(done) = self.memo.get(&key) {
            return Arc::clone(done);
        }
        if self.path.contains(&key) {
            if let Some(marker) = self.cyclic.get(&key) {
                return Arc::clone(marker);
            }
            let marker = self.leaf(
                name,
                kind,
                NodeStatus::Cyclic,
                Some("already being expanded on this path"),
            );
            self.cyclic.insert(key, Arc::clone(&marker));
            return marker;
        }
        self.path.insert(key.clone());
        let node = expand(self);
        self.path.remove(&key);
        self.memo.insert(key, Arc::clone(&node));
        node
    }

    fn class(&mut self, class: &str) -> Arc<GroundingNode> {
        self.subject(SubjectKind::Class, class, |g| {
            if g.ontology.is_actual(class) {
                return g.leaf(class, SubjectKind::Class, NodeStatus::Actual, None);
            }
            let definitions = g.ontology.equivalents(class);
            if definitions.is_empty() {
                return g.leaf(
                    class,
                    SubjectKind::Class,
                    NodeStatus::Ungrounded,
                    Some("no instances and no definition"),
                );
            }
            let children: Vec<_> = definitions.iter().map(|d| g.expression(d)).collect();
            let depth = 1 + max_depth(&children);
            g.node(
                class.to_owned(),
                SubjectKind::Class,
                NodeStatus::Defined,
                Some("no instances; expanded through its definition"),
                children,
                depth,
            )
        })
    }

    fn property(&mut self, property: &str) -> Arc<GroundingNode> {
        self.subject(SubjectKind::Property, property, |g| {
            let o = g.ontology;
            if let Some((domain, range)) = o.property_definition(property) {
                let children = vec![g.expression(domain), g.expression(range)];
                let depth = 1 + max_depth(&children);
                return g.node(
                    property.to_owned(),
                    SubjectKind::Property,
                    NodeStatus::Defined,
                    Some("explicated through its definition; the relation itself need not have instances"),
                    children,
                    depth,
                );
            }
            let relata: Vec<&String> = o
                .domains(property)
                .into_iter()
                .flatten()
                .chain(o.ranges(property).into_iter().flatten())
                .collect();
            if relata.is_empty() {
                return if o.property_has_facts(property) {
                    g.leaf(property, SubjectKind::Property, NodeStatus::Actual, None)
                } else {
                    g.leaf(
                        property,
                        SubjectKind::Property,
                        NodeStatus::Ungrounded,
                        Some("no facts and no domain, range or definition"),
                    )
                };
            }
            let children: Vec<_> = relata.into_iter().map(|c| g.class(c)).collect();
            let depth = max_depth(&children);
            g.node(
                property.to_owned(),
                SubjectKind::Property,
                NodeStatus::Defined,
                Some("explicated through its domain and range"),
                children,
                depth,
            )
        })
    }

    fn individual(&mut self, individual: &str) -> Arc<GroundingNode> {
        self.subject(SubjectKind::Individual, individual, |g| {
            g.leaf(individual, SubjectKind::Individual, NodeStatus::Actual, None)
        })
    }

    fn ice(&mut self, ice: &str) -> Arc<GroundingNode> {
        self.subject(SubjectKind::Ice, ice, |g| match g.ontology.aboutness_of(ice) {
            [one] => {
                let child = g.expression(&one.target);
                let depth = 1 + child.depth;
                g.node(
                    ice.to_owned(),
                    SubjectKind::Ice,
                    NodeStatus::Defined,
                    Some("grounded through its own aboutness target"),
                    vec![child],
                    depth,
                )
            }
            [] => g.leaf(
                ice,
                SubjectKind::Ice,
                NodeStatus::Ungrounded,
                Some("has no aboutness assertion"),
            ),
            _ => g.leaf(
                ice,
                SubjectKind::Ice,
                NodeStatus::Ungrounded,
                Some("has more than one aboutness assertion"),
            ),
        })
    }

    fn expression(&mut self, e: &ClassExpression) -> Arc<GroundingNode> {
        let children = match e {
            ClassExpression::Named(c) => return self.class(c),
            ClassExpression::And(xs) | ClassExpression::Or(xs) => xs.iter().map(|x| self.expression(x)).collect(),
            ClassExpression::Not(x) => vec![self.expression(x)],
            ClassExpression::Some { property, filler } | ClassExpression::Only { property, filler } => {
                vec![self.property(property), self.expression(filler)]
            }
            ClassExpression::Value { property, individual } => {
                vec![self.property(property), self.individual(individual)]
            }
            ClassExpression::Via { property, ice } => vec![self.property(property), self.ice(ice)],
        };
        let status = if empty_unchecked(self.ontology, e) {
            NodeStatus::Empty
        } else {
            NodeStatus::Defined
        };
        let depth = max_depth(&children);
        self.node(e.to_string(), SubjectKind::Expression, status, None, children, depth)
    }
}

/// Sound structural test for emptiness. See [`empty_unchecked`] for the rules.
pub fn structurally_empty(ontology: &Ontology, e: &ClassExpression) -> Result<bool, ModelError> {
    ontology.check_expression(e)?;
    Ok(empty_unchecked(ontology, e))
}

#[derive(Default)]
struct Literals {
    positive: BTreeSet<String>,
    negative: BTreeSet<String>,
    complex: BTreeSet<ClassExpression>,
    negated_complex: BTreeSet<ClassExpression>,
    bottom: bool,
}

/// An expression is empty when its conjuncts, after adding every ancestor of
/// each named class and inlining the definitions of those classes, contain
/// two disjoint classes, a class next to its own complement, a restriction or
/// union next to its complement, an existential whose filler is empty, or a
/// union all of whose disjuncts are empty.
pub(crate) fn empty_unchecked(ontology: &Ontology, e: &ClassExpression) -> bool {
    empty_inner(ontology, e, &mut Vec::new())
}

fn empty_inner(ontology: &Ontology, e: &ClassExpression, inlining: &mut Vec<String>) -> bool {
    let mut lits = Literals::default();
    collect(ontology, e, &mut lits, inlining);
    lits.bottom
        || ontology.any_disjoint_pair(&lits.positive, &lits.positive)
        || !lits.negative.is_disjoint(&lits.positive)
        || !lits.negated_complex.is_disjoint(&lits.complex)
}

fn collect(ontology: &Ontology, e: &ClassExpression, lits: &mut Literals, inlining: &mut Vec<String>) {
    match e {
        ClassExpression::Named(c) => {
            for ancestor in ontology.class_ancestors(c) {
                if inlining.contains(&ancestor) {
                    lits.positive.insert(ancestor);
                    continue;
                }
                inlining.push(ancestor.clone());
                for definition in ontology.equivalents(&ancestor) {
                    collect(ontology, definition, lits, inlining);
                }
                inlining.pop();
                lits.positive.insert(ancestor);
            }
        }
        ClassExpression::And(xs) => xs.iter().for_each(|x| collect(ontology, x, lits, inlining)),
        ClassExpression::Not(inner) => match inner.as_ref() {
            ClassExpression::Named(c) => {
                lits.negative.insert(c.clone());
            }
            other => {
                lits.negated_complex.insert(other.clone());
            }
        },
        ClassExpression::Or(xs) => {
            lits.complex.insert(e.clone());
            if xs.iter().all(|x| empty_inner(ontology, x, inlining)) {
                lits.bottom = true;
            }
        }
        ClassExpression::Some { filler, .. } => {
            lits.complex.insert(e.clone());
            if empty_inner(ontology, filler, inlining) {
                lits.bottom = true;
            }
        }
        ClassExpression::Only { .. } | ClassExpression::Value { .. } | ClassExpression::Via { .. } => {
            lits.complex.insert(e.clone());
        }
    }
}

/// Closed-world check of `individual` against `e`, using asserted types and
/// facts only. A fact through a sub-property counts for its super-properties.
/// `p via ICE` holds when every `p` successor satisfies the ICE's targets.
pub fn satisfies(ontology: &Ontology, individual: &str, e: &ClassExpression) -> Result<bool, ModelError> {
    ontology.expect_particular(individual)?;
    ontology.check_expression(e)?;
    Ok(Checker::new(ontology).holds(individual, e))
}

struct Checker<'o> {
    ontology: &'o Ontology,
    via_in_progress: HashSet<(String, String)>,
}

impl<'o> Checker<'o> {
    fn new(ontology: &'o Ontology) -> Self {
        Checker {
            ontology,
            via_in_progress: HashSet::new(),
        }
    }

    fn successors<'a>(&self, individual: &'a str, property: &'a str) -> impl Iterator<Item = &'o str> + 'a
    where
        'o: 'a,
    {
        let o = self.ontology;
        o.facts_of(individual)
            .iter()
            .filter(move |(q, _)| q == property || o.property_ancestors(q).contains(property))
            .map(|(_, obj)| obj.as_str())
    }

    fn holds(&mut self, individual: &str, e: &ClassExpression) -> bool {
        match e {
            ClassExpression::Named(c) => self
                .ontology
                .types_of(individual)
                .is_some_and(|ts| ts.iter().any(|t| self.ontology.class_ancestors(t).contains(c))),
            ClassExpression::And(xs) => xs.iter().all(|x| self.holds(individual, x)),
            ClassExpression::Or(xs) => xs.iter().any(|x| self.holds(individual, x)),
            ClassExpression::Not(x) => !self.holds(individual, x),
            ClassExpression::Some { property, filler } => {
                let objects: Vec<_> = self.successors(individual, property).collect();
                objects.into_iter().any(|o| self.holds(o, filler))
            }
            ClassExpression::Only { property, filler } => {
                let objects: Vec<_> = self.successors(individual, property).collect();
                objects.into_iter().all(|o| self.holds(o, filler))
            }
            ClassExpression::Value {
                property,
                individual: wanted,
            } => self.successors(individual, property).any(|o| o == wanted),
            ClassExpression::Via { property, ice } => {
                let targets: Vec<ClassExpression> = self
                    .ontology
                    .aboutness_of(ice)
                    .iter()
                    .map(|a| a.target.clone())
                    .collect();
                let objects: Vec<_> = self.successors(individual, property).collect();
                objects.into_iter().all(|o| {
                    let key = (ice.clone(), o.to_owned());
                    if !self.via_in_progress.insert(key.clone()) {
                        return true;
                    }
                    let ok = targets.iter().all(|t| self.holds(o, t));
                    self.via_in_progress.remove(&key);
                    ok
                })
            }
        }
    }

    /// Descends through conjunctions to the first failing conjunct.
    fn failing_path(&mut self, individual: &str, e: &ClassExpression) -> Vec<ClassExpression> {
        let mut path = vec![e.clone()];
        let mut current = e;
        while let ClassExpression::And(xs) = current {
            match xs.iter().find(|x| !self.holds(individual, x)) {
                Some(x) => {
                    path.push(x.clone());
                    current = x;
                }
                None => break,
            }
        }
        path
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RealizeError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("'{ice}' cannot be realized: {reason}")]
    WrongKind { ice: String, reason: String },
    #[error("'{individual}' does not conform to '{blueprint}': fails `{}`", path.last().map(String::as_str).unwrap_or(""))]
    NotConformant {
        blueprint: String,
        individual: String,
        /// From the full target down to the innermost failing conjunct.
        path: Vec<String>,
    },
}

/// Records that `individual` was built from `blueprint`, after checking it
/// conforms to what the blueprint prescribes. Returns a new ontology; the
/// input is untouched and the prescription is kept.
pub fn realize(ontology: &Ontology, blueprint: &str, individual: &str) -> Result<Ontology, RealizeError> {
    let kind = classify_ice(ontology, blueprint)?;
    ontology.expect(individual, EntityKind::Individual)?;
    if kind.category != IceCategory::Blueprint {
        return Err(RealizeError::WrongKind {
            ice: blueprint.to_owned(),
            reason: "it is not typed as a Blueprint".to_owned(),
        });
    }
    let Some(prescription) = ontology
        .aboutness_of(blueprint)
        .iter()
        .find(|a| a.relation == Relation::Prescribes && a.constraint == ConstraintForm::Universal)
    else {
        return Err(RealizeError::WrongKind {
            ice: blueprint.to_owned(),
            reason: "it has no 'Prescribes-only:' target".to_owned(),
        });
    };
    if ontology
        .represented_by(blueprint)
        .is_some_and(|s| s.contains(individual))
    {
        return Ok(ontology.clone());
    }
    let mut checker = Checker::new(ontology);
    if !checker.holds(individual, &prescription.target) {
        let path = checker.failing_path(individual, &prescription.target);
        return Err(RealizeError::NotConformant {
            blueprint: blueprint.to_owned(),
            individual: individual.to_owned(),
            path: path.iter().map(ToString::to_string).collect(),
        });
    }
    Ok(ontology.with_axiom(Axiom::RepresentsFact {
        ice: blueprint.to_owned(),
        individual: individual.to_owned(),
    })?)
}
