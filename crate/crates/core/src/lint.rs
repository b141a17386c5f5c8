//! Modeling rules for information content entities.
//!
//! | rule | severity | checks |
//! |------|----------|--------|
//! | R1 | error | no is_about-family fact from an ICE to an individual (dummy instances) |
//! | R2 | error | aboutness targets are universal (`-only`), never existential |
//! | R3 | warning | the relation matches the ICE's category |
//! | R4 | error / warning | the target grounds (ungrounded / cyclic) |
//! | R5 | info | the target is not structurally empty |

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::aboutness::{classify_ice, expected_relation, ConstraintForm, IceCategory, Relation};
use crate::grounding::{ground, GroundingError, GroundingReport, NodeStatus, OverallStatus};
use crate::model::{Axiom, Ontology};
use crate::span::SourceSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Rule {
    R1,
    R2,
    R3,
    R4,
    R5,
}

impl Rule {
    pub fn title(self) -> &'static str {
        match self {
            Rule::R1 => "no-dummy-instances",
            Rule::R2 => "universal-constraint",
            Rule::R3 => "case-relation",
            Rule::R4 => "groundedness",
            Rule::R5 => "necessary-emptiness",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Severity {
    Error,
    Warning,
    Info,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
            Severity::Info => "info",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Finding {
    pub rule: Rule,
    pub severity: Severity,
    pub subject: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub span: Option<SourceSpan>,
    /// ICE whose grounding report explains the finding.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<String>,
}

impl Finding {
    fn sort_key(&self) -> (bool, Option<SourceSpan>, Rule, &str, &str) {
        (self.span.is_none(), self.span, self.rule, &self.subject, &self.message)
    }
}

impl Ord for Finding {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key()
            .cmp(&other.sort_key())
            .then_with(|| self.severity.cmp(&other.severity))
            .then_with(|| self.trace.cmp(&other.trace))
    }
}

impl PartialOrd for Finding {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(span) = self.span {
            write!(f, "{span}: ")?;
        }
        write!(
            f,
            "{} {} [{}]: {}",
            self.severity,
            self.rule,
            self.rule.title(),
            self.message
        )
    }
}

pub fn lint(ontology: &Ontology) -> Vec<Finding> {
    lint_and_ground(ontology).0
}

/// Findings plus the grounding report of every ICE that has one.
pub fn lint_and_ground(ontology: &Ontology) -> (Vec<Finding>, Vec<GroundingReport>) {
    let mut findings = Vec::new();
    let mut reports = Vec::new();
    let aboutness_span = |ice: &str| {
        ontology
            .records()
            .iter()
            .find(|r| matches!(&r.axiom, Axiom::Aboutness(a) if a.ice == ice))
            .and_then(|r| r.span)
            .or_else(|| ontology.declaration(ice).and_then(|d| d.span))
    };

    for record in ontology.records() {
        match &record.axiom {
            Axiom::Fact {
                subject,
                property,
                object,
            } if ontology.kind_of(subject) == Some(crate::model::EntityKind::Ice)
                && ontology.is_aboutness_property(property) =>
            {
                let realized = ontology.represented_by(subject).is_some_and(|s| s.contains(object))
                    && ontology
                        .property_ancestors(property)
                        .contains(Relation::Represents.property_name());
                if !realized {
                    findings.push(Finding {
                        rule: Rule::R1,
                        severity: Severity::Error,
                        subject: subject.clone(),
                        message: format!(
                            "'{subject}' asserts `{property} {object}`, pointing at a stand-in instance; \
                             state what it is about as a class with an '-only:' clause instead"
                        ),
                        span: record.span,
                        trace: None,
                    });
                }
            }
            Axiom::Aboutness(a) if a.constraint == ConstraintForm::Existential => {
                findings.push(Finding {
                    rule: Rule::R2,
                    severity: Severity::Error,
                    subject: a.ice.clone(),
                    message: format!(
                        "'{}' uses '{}:', which commits to an instance existing; use '{}-only:'",
                        a.ice,
                        a.keyword(),
                        a.relation.keyword_stem()
                    ),
                    span: record.span,
                    trace: None,
                });
            }
            _ => {}
        }
        if let Axiom::Aboutness(a) = &record.axiom {
            let Ok(kind) = classify_ice(ontology, &a.ice) else {
                continue;
            };
            let Some(expected) = expected_relation(&kind) else {
                continue;
            };
            if a.relation != expected {
                findings.push(Finding {
                    rule: Rule::R3,
                    severity: Severity::Warning,
                    subject: a.ice.clone(),
                    message: format!(
                        "'{}' is a {} and should {} what it is about, but it {}",
                        a.ice,
                        category_name(kind.category),
                        expected.property_name().trim_end_matches('s'),
                        a.relation
                    ),
                    span: record.span,
                    trace: None,
                });
            }
        }
    }

    for ice in ontology.ices() {
        let span = aboutness_span(ice);
        match ground(ontology, ice) {
            Ok(report) => {
                findings.extend(grounding_findings(ontology, &report, span));
                reports.push(report);
            }
            Err(err @ (GroundingError::NoAboutness(_) | GroundingError::MultipleAboutness { .. })) => {
                findings.push(Finding {
                    rule: Rule::R4,
                    severity: Severity::Error,
                    subject: ice.to_owned(),
                    message: err.to_string(),
                    span,
                    trace: None,
                });
            }
            Err(GroundingError::Model(e)) => unreachable!("declared ICE failed to ground: {e}"),
        }
    }

    findings.sort();
    (findings, reports)
}

fn category_name(category: IceCategory) -> &'static str {
    match category {
        IceCategory::FictionalEntity => "FictionalEntity",
        IceCategory::Blueprint => "Blueprint",
        IceCategory::SimulationRepresentation => "SimulationRepresentation",
        IceCategory::TemporalExpression => "TemporalExpression",
        IceCategory::OtherIce => "OtherICE",
    }
}

fn grounding_findings(ontology: &Ontology, report: &GroundingReport, span: Option<SourceSpan>) -> Vec<Finding> {
    let ice = &report.ice;
    let mut out = Vec::new();
    let subjects = |status: NodeStatus| {
        let mut names: Vec<String> = report
            .nodes()
            .iter()
            .filter(|n| n.status == status)
            .map(|n| n.subject.clone())
            .collect();
        names.sort();
        names.dedup();
        names.join(", ")
    };
    match report.overall {
        OverallStatus::Grounded => {}
        OverallStatus::Ungrounded => out.push(Finding {
            rule: Rule::R4,
            severity: Severity::Error,
            subject: ice.clone(),
            message: format!(
                "what '{ice}' is about does not decompose to actual classes; ungrounded: {}",
                subjects(NodeStatus::Ungrounded)
            ),
            span,
            trace: Some(ice.clone()),
        }),
        OverallStatus::Cyclic => out.push(Finding {
            rule: Rule::R4,
            severity: Severity::Warning,
            subject: ice.clone(),
            message: format!(
                "what '{ice}' is about only decomposes through a definition cycle at: {}",
                subjects(NodeStatus::Cyclic)
            ),
            span,
            trace: Some(ice.clone()),
        }),
    }
    if report.necessarily_empty {
        let target = crate::grounding::aboutness_target(ontology, ice)
            .map(ToString::to_string)
            .unwrap_or_default();
        out.push(Finding {
            rule: Rule::R5,
            severity: Severity::Info,
            subject: ice.clone(),
            message: format!("nothing can ever satisfy what '{ice}' is about: `{target}`"),
            span,
            trace: Some(ice.clone()),
        });
    }
    out
}

pub fn has_errors(findings: &[Finding]) -> bool {
    findings.iter().any(|f| f.severity == Severity::Error)
}
