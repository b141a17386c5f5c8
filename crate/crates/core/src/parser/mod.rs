//! Reader and writer for the `.upo` frame language.
//!
//! ```text
//! Class: Person
//!     SubClassOf: MaterialEntity
//!
//! ICE: SupermanDescription
//!     Types: FictionalEntity
//!     Describes-only: Person and bearer_of some SuperStrength
//! ```
//!
//! Expressions bind, loosest first: `or`, `and`, `not`, then the restrictions
//! `p some E`, `p only E`, `p value i` and `p via ICE`. Parentheses override.
//! Declarations may appear in any order; every referenced name must be
//! declared somewhere in the document (or the prelude, when loaded).

mod lexer;
mod serialize;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use self::lexer::{lex, Tok, Token};
pub use self::serialize::serialize;
use crate::aboutness::{AboutnessAssertion, ConstraintForm, Relation};
use crate::model::{
    declare, Axiom, AxiomRecord, ClassExpression, Declaration, EntityKind, ModelError, Ontology, Origin, TemporalFrame,
};
use crate::span::SourceSpan;
use crate::temporal::{parse_weekday, IndexicalMode};

/// Upper-level vocabulary loaded ahead of documents unless disabled.
pub const PRELUDE: &str = include_str!("../prelude.upo");

const RESERVED: [&str; 7] = ["and", "or", "not", "some", "only", "value", "via"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ParseErrorKind {
    Lexical,
    Syntax,
    UnknownName,
    DuplicateDeclaration,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParseErrorKind::Lexical => "lexical error",
            ParseErrorKind::Syntax => "syntax error",
            ParseErrorKind::UnknownName => "unknown name",
            ParseErrorKind::DuplicateDeclaration => "duplicate declaration",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("{span}: {kind}: {message}")]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
    pub kind: ParseErrorKind,
}

impl ParseError {
    fn new(kind: ParseErrorKind, span: SourceSpan, message: impl Into<String>) -> Self {
        ParseError {
            span,
            message: message.into(),
            kind,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ParseOptions {
    /// Load the bundled upper-level prelude ahead of the document.
    pub prelude: bool,
}

/// Parses a standalone document (no prelude).
pub fn parse(text: &str) -> Result<Ontology, Vec<ParseError>> {
    parse_with(text, ParseOptions::default())
}

/// Parses a document on top of the bundled prelude.
pub fn parse_with_prelude(text: &str) -> Result<Ontology, Vec<ParseError>> {
    parse_with(text, ParseOptions { prelude: true })
}

pub fn parse_with(text: &str, options: ParseOptions) -> Result<Ontology, Vec<ParseError>> {
    let mut sink = Collected::default();
    if options.prelude {
        FrameParser::new(&lex(PRELUDE), Origin::Prelude, &mut sink).document();
    }
    FrameParser::new(&lex(text), Origin::Document, &mut sink).document();
    sink.finish()
}

/// Parses a single class expression against the names of `ontology`.
pub fn parse_class_expression(text: &str, ontology: &Ontology) -> Result<ClassExpression, Vec<ParseError>> {
    let tokens = lex(text);
    let mut refs = Vec::new();
    let mut cursor = Cursor {
        tokens: &tokens,
        pos: 0,
    };
    let expr = match cursor.expression(&mut refs) {
        Ok(e) => e,
        Err(e) => return Err(vec![e.error]),
    };
    if !matches!(cursor.peek().tok, Tok::Eof) {
        let t = cursor.peek();
        return Err(vec![ParseError::new(
            ParseErrorKind::Syntax,
            t.span,
            format!("unexpected {} after class expression", t.tok.describe()),
        )]);
    }
    let errors: Vec<ParseError> = refs
        .iter()
        .filter_map(|r| {
            let found = ontology.kind_of(&r.name);
            r.kind
                .check(&r.name, found)
                .err()
                .map(|msg| ParseError::new(ParseErrorKind::UnknownName, r.span, msg))
        })
        .collect();
    if errors.is_empty() {
        Ok(expr)
    } else {
        Err(errors)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RefKind {
    Exact(EntityKind),
    /// An individual or an ICE.
    Particular,
}

impl RefKind {
    fn check(self, name: &str, found: Option<EntityKind>) -> Result<(), String> {
        let ok = match (self, found) {
            (RefKind::Exact(want), Some(got)) => want == got,
            (RefKind::Particular, Some(EntityKind::Individual | EntityKind::Ice)) => true,
            _ => false,
        };
        if ok {
            return Ok(());
        }
        let want = match self {
            RefKind::Exact(k) => k.describe(),
            RefKind::Particular => "individual or information content entity",
        };
        Err(match found {
            None => format!("'{name}' is not declared (expected {want})"),
            Some(got) => format!("'{name}' is declared as {got}, expected {want}"),
        })
    }
}

#[derive(Debug, Clone)]
struct NameRef {
    name: String,
    kind: RefKind,
    span: SourceSpan,
}

#[derive(Debug, Clone)]
struct IceClauses {
    span: Option<SourceSpan>,
    aboutness: Vec<SourceSpan>,
    types: Vec<SourceSpan>,
    modes: Vec<SourceSpan>,
    cycles: Vec<SourceSpan>,
    /// A syntax error cut the frame short, so clause counts are unreliable.
    aborted: bool,
}

#[derive(Default)]
struct Collected {
    declarations: Vec<(String, EntityKind, Origin, Option<SourceSpan>)>,
    records: Vec<AxiomRecord>,
    refs: Vec<NameRef>,
    ices: BTreeMap<String, IceClauses>,
    temporal: BTreeMap<String, TemporalFrame>,
    errors: Vec<ParseError>,
}

impl Collected {
    fn finish(mut self) -> Result<Ontology, Vec<ParseError>> {
        let mut declarations: BTreeMap<String, Declaration> = BTreeMap::new();
        for (name, kind, origin, span) in &self.declarations {
            if let Err(ModelError::DuplicateDeclaration { first, .. }) =
                declare(&mut declarations, name, *kind, *origin, *span)
            {
                self.errors.push(ParseError::new(
                    ParseErrorKind::DuplicateDeclaration,
                    span.unwrap_or(SourceSpan::new(1, 1, 0)),
                    format!("'{name}' is already declared as {first}, cannot redeclare it as {kind}"),
                ));
            }
        }

        for r in &self.refs {
            let found = declarations.get(&r.name).map(|d| d.kind);
            if let Err(msg) = r.kind.check(&r.name, found) {
                self.errors
                    .push(ParseError::new(ParseErrorKind::UnknownName, r.span, msg));
            }
        }

        for (ice, clauses) in self.ices.iter().filter(|(_, c)| !c.aborted) {
            let at = clauses.span.unwrap_or(SourceSpan::new(1, 1, 0));
            match clauses.aboutness.len() {
                1 => {}
                0 => self.errors.push(ParseError::new(
                    ParseErrorKind::Syntax,
                    at,
                    format!("ICE '{ice}' needs exactly one aboutness clause such as 'Describes-only:'"),
                )),
                _ => self.errors.push(ParseError::new(
                    ParseErrorKind::Syntax,
                    clauses.aboutness[1],
                    format!("ICE '{ice}' already has an aboutness clause; use a separate ICE per target"),
                )),
            }
            for (spans, what) in [
                (&clauses.types, "'Types:'"),
                (&clauses.modes, "'Mode:'"),
                (&clauses.cycles, "'Cycle:'"),
            ] {
                if let Some(second) = spans.get(1) {
                    self.errors.push(ParseError::new(
                        ParseErrorKind::Syntax,
                        *second,
                        format!("ICE '{ice}' takes a single {what} clause"),
                    ));
                }
            }
        }

        let mut defined = BTreeSet::new();
        for record in &self.records {
            if let Axiom::PropertyDefinition { property, .. } = &record.axiom {
                if !defined.insert(property.clone()) {
                    self.errors.push(ParseError::new(
                        ParseErrorKind::DuplicateDeclaration,
                        record.span.unwrap_or(SourceSpan::new(1, 1, 0)),
                        format!("object property '{property}' already has a 'DefinedBy:' clause"),
                    ));
                }
            }
        }

        if self.errors.is_empty() {
            Ok(Ontology::from_parts(declarations, self.records, self.temporal))
        } else {
            self.errors
                .sort_by(|a, b| (a.span, a.kind, &a.message).cmp(&(b.span, b.kind, &b.message)));
            self.errors.dedup();
            Err(self.errors)
        }
    }
}

/// Internal error carrying whether it was raised at the end of an expression
/// (a clause keyword or end of input), which turns an inner failure into an
/// unclosed-parenthesis report.
struct Failure {
    error: ParseError,
    at_boundary: bool,
}

type PResult<T> = Result<T, Failure>;

fn syntax(span: SourceSpan, message: impl Into<String>) -> Failure {
    Failure {
        error: ParseError::new(ParseErrorKind::Syntax, span, message),
        at_boundary: false,
    }
}

fn unexpected(token: &Token, expected: &str) -> Failure {
    let (kind, message) = match &token.tok {
        Tok::Invalid(c) => (ParseErrorKind::Lexical, format!("unexpected character {c:?}")),
        other => (
            ParseErrorKind::Syntax,
            format!("expected {expected}, found {}", other.describe()),
        ),
    };
    Failure {
        error: ParseError::new(kind, token.span, message),
        at_boundary: matches!(token.tok, Tok::Eof | Tok::Keyword(_)),
    }
}

struct Cursor<'t> {
    tokens: &'t [Token],
    pos: usize,
}

impl<'t> Cursor<'t> {
    fn peek(&self) -> &'t Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn peek_at(&self, offset: usize) -> &'t Token {
        &self.tokens[(self.pos + offset).min(self.tokens.len() - 1)]
    }

    fn bump(&mut self) -> &'t Token {
        let t = self.peek();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn peek_word(&self) -> Option<&'t str> {
        match &self.peek().tok {
            Tok::Name(n) => Some(n),
            _ => None,
        }
    }

    fn name(&mut self, what: &str) -> PResult<(String, SourceSpan)> {
        let t = self.peek();
        match &t.tok {
            Tok::Name(n) if RESERVED.contains(&n.as_str()) => {
                Err(syntax(t.span, format!("expected {what}, found reserved word '{n}'")))
            }
            Tok::Name(n) => {
                self.bump();
                Ok((n.clone(), t.span))
            }
            _ => Err(unexpected(t, what)),
        }
    }

    fn expression(&mut self, refs: &mut Vec<NameRef>) -> PResult<ClassExpression> {
        self.binary(1, refs)
    }

    fn binary(&mut self, min_precedence: u8, refs: &mut Vec<NameRef>) -> PResult<ClassExpression> {
        let mut lhs = self.unary(refs)?;
        loop {
            let precedence = match self.peek_word() {
                Some("or") => 1,
                Some("and") => 2,
                _ => break,
            };
            if precedence < min_precedence {
                break;
            }
            self.bump();
            let rhs = self.binary(precedence + 1, refs)?;
            lhs = if precedence == 2 {
                ClassExpression::and([lhs, rhs])
            } else {
                ClassExpression::or([lhs, rhs])
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self, refs: &mut Vec<NameRef>) -> PResult<ClassExpression> {
        if self.peek_word() == Some("not") {
            self.bump();
            return Ok(ClassExpression::not(self.unary(refs)?));
        }
        self.restriction(refs)
    }

    fn restriction(&mut self, refs: &mut Vec<NameRef>) -> PResult<ClassExpression> {
        let head = self.peek();
        let operator = match (&head.tok, &self.peek_at(1).tok) {
            (Tok::Name(n), Tok::Name(op))
                if !RESERVED.contains(&n.as_str()) && matches!(op.as_str(), "some" | "only" | "value" | "via") =>
            {
                op.as_str()
            }
            _ => return self.atom(refs),
        };
        let (property, span) = self.name("an object property")?;
        refs.push(NameRef {
            name: property.clone(),
            kind: RefKind::Exact(EntityKind::Property),
            span,
        });
        self.bump();
        Ok(match operator {
            "some" => ClassExpression::some(property, self.restriction(refs)?),
            "only" => ClassExpression::only(property, self.restriction(refs)?),
            "value" => {
                let (individual, span) = self.name("an individual")?;
                refs.push(NameRef {
                    name: individual.clone(),
                    kind: RefKind::Exact(EntityKind::Individual),
                    span,
                });
                ClassExpression::value(property, individual)
            }
            _ => {
                let (ice, span) = self.name("an information content entity")?;
                refs.push(NameRef {
                    name: ice.clone(),
                    kind: RefKind::Exact(EntityKind::Ice),
                    span,
                });
                ClassExpression::via(property, ice)
            }
        })
    }

    fn atom(&mut self, refs: &mut Vec<NameRef>) -> PResult<ClassExpression> {
        let t = self.peek();
        match &t.tok {
            Tok::LParen => {
                self.bump();
                let unclosed = || syntax(t.span, "unclosed parenthesis: expected ')' to match this '('");
                let inner = match self.expression(refs) {
                    Ok(e) => e,
                    Err(f) if f.at_boundary => return Err(unclosed()),
                    Err(f) => return Err(f),
                };
                let close = self.peek();
                match close.tok {
                    Tok::RParen => {
                        self.bump();
                        Ok(inner)
                    }
                    Tok::Eof | Tok::Keyword(_) => Err(unclosed()),
                    _ => Err(unexpected(close, "')', 'and' or 'or'")),
                }
            }
            Tok::Name(_) => {
                let (name, span) = self.name("a class expression")?;
                refs.push(NameRef {
                    name: name.clone(),
                    kind: RefKind::Exact(EntityKind::Class),
                    span,
                });
                Ok(ClassExpression::Named(name))
            }
            _ => Err(unexpected(t, "a class expression")),
        }
    }
}

const FRAME_KEYWORDS: [&str; 4] = ["Class", "ObjectProperty", "Individual", "ICE"];

fn aboutness_keyword(keyword: &str) -> Option<(Relation, ConstraintForm)> {
    let (stem, suffix) = keyword.split_once('-')?;
    let relation = Relation::ALL.into_iter().find(|r| r.keyword_stem() == stem)?;
    let constraint = match suffix {
        "only" => ConstraintForm::Universal,
        "some" => ConstraintForm::Existential,
        _ => return None,
    };
    Some((relation, constraint))
}

struct FrameParser<'t, 's> {
    cursor: Cursor<'t>,
    origin: Origin,
    sink: &'s mut Collected,
    current_ice: Option<String>,
}

impl<'t, 's> FrameParser<'t, 's> {
    fn new(tokens: &'t [Token], origin: Origin, sink: &'s mut Collected) -> Self {
        FrameParser {
            cursor: Cursor { tokens, pos: 0 },
            origin,
            sink,
            current_ice: None,
        }
    }

    fn span(&self, span: SourceSpan) -> Option<SourceSpan> {
        match self.origin {
            Origin::Document => Some(span),
            Origin::Prelude => None,
        }
    }

    fn document(&mut self) {
        loop {
            let t = self.cursor.peek();
            match &t.tok {
                Tok::Eof => break,
                Tok::Keyword(k) if FRAME_KEYWORDS.contains(&k.as_str()) => {
                    self.current_ice = None;
                    if let Err(f) = self.frame() {
                        if let Some(ice) = self.current_ice.take() {
                            self.ice(&ice).aborted = true;
                        }
                        self.sink.errors.push(f.error);
                        self.recover();
                    }
                }
                _ => {
                    self.sink
                        .errors
                        .push(unexpected(t, "a frame ('Class:', 'ObjectProperty:', 'Individual:' or 'ICE:')").error);
                    self.recover();
                }
            }
        }
    }

    /// Skips to the next frame keyword.
    fn recover(&mut self) {
        self.cursor.bump();
        while !matches!(&self.cursor.peek().tok, Tok::Eof)
            && !matches!(&self.cursor.peek().tok, Tok::Keyword(k) if FRAME_KEYWORDS.contains(&k.as_str()))
        {
            self.cursor.bump();
        }
    }

    fn reference(&mut self, name: &str, kind: RefKind, span: SourceSpan) {
        self.sink.refs.push(NameRef {
            name: name.to_owned(),
            kind,
            span,
        });
    }

    fn named(&mut self, kind: RefKind, what: &str) -> PResult<(String, SourceSpan)> {
        let (name, span) = self.cursor.name(what)?;
        self.reference(&name, kind, span);
        Ok((name, span))
    }

    fn push(&mut self, axiom: Axiom, span: SourceSpan) {
        let span = self.span(span);
        self.sink.records.push(AxiomRecord {
            axiom,
            span,
            origin: self.origin,
        });
    }

    fn expression(&mut self) -> PResult<ClassExpression> {
        let mut refs = Vec::new();
        let e = self.cursor.expression(&mut refs)?;
        self.sink.refs.extend(refs);
        Ok(e)
    }

    /// After a clause value: the next token must start a new clause or frame.
    fn end_of_clause(&mut self) -> PResult<()> {
        let t = self.cursor.peek();
        match t.tok {
            Tok::Eof | Tok::Keyword(_) => Ok(()),
            _ => Err(unexpected(t, "'and', 'or', ',' or a new clause")),
        }
    }

    fn frame(&mut self) -> PResult<()> {
        let header = self.cursor.bump();
        let Tok::Keyword(frame) = &header.tok else {
            unreachable!("frame() is only entered on a frame keyword")
        };
        let kind = match frame.as_str() {
            "Class" => EntityKind::Class,
            "ObjectProperty" => EntityKind::Property,
            "Individual" => EntityKind::Individual,
            _ => EntityKind::Ice,
        };
        let (name, name_span) = self.cursor.name("a name")?;
        let decl_span = self.span(name_span);
        self.sink
            .declarations
            .push((name.clone(), kind, self.origin, decl_span));
        if kind == EntityKind::Ice {
            self.sink.ices.entry(name.clone()).or_insert_with(|| IceClauses {
                span: decl_span,
                aboutness: Vec::new(),
                types: Vec::new(),
                modes: Vec::new(),
                cycles: Vec::new(),
                aborted: false,
            });
            self.current_ice = Some(name.clone());
        }

        loop {
            let t = self.cursor.peek();
            let keyword = match &t.tok {
                Tok::Eof => return Ok(()),
                Tok::Keyword(k) if FRAME_KEYWORDS.contains(&k.as_str()) => return Ok(()),
                Tok::Keyword(k) => k.clone(),
                _ => return Err(unexpected(t, "a clause keyword")),
            };
            let at = t.span;
            self.cursor.bump();
            match (kind, keyword.as_str()) {
                (EntityKind::Class, "SubClassOf") => {
                    let (sup, _) = self.named(RefKind::Exact(EntityKind::Class), "a class name")?;
                    self.push(Axiom::SubClassOf { sub: name.clone(), sup }, at);
                }
                (EntityKind::Class, "EquivalentTo") => {
                    let definition = self.expression()?;
                    self.push(
                        Axiom::EquivalentTo {
                            class: name.clone(),
                            definition,
                        },
                        at,
                    );
                }
                (EntityKind::Class, "DisjointWith") => {
                    let (other, _) = self.named(RefKind::Exact(EntityKind::Class), "a class name")?;
                    self.push(
                        Axiom::DisjointWith {
                            first: name.clone(),
                            second: other,
                        },
                        at,
                    );
                }
                (EntityKind::Property, "SubPropertyOf") => {
                    let (sup, _) = self.named(RefKind::Exact(EntityKind::Property), "an object property")?;
                    self.push(Axiom::SubPropertyOf { sub: name.clone(), sup }, at);
                }
                (EntityKind::Property, "Domain") => {
                    let (class, _) = self.named(RefKind::Exact(EntityKind::Class), "a class name")?;
                    self.push(
                        Axiom::Domain {
                            property: name.clone(),
                            class,
                        },
                        at,
                    );
                }
                (EntityKind::Property, "Range") => {
                    let (class, _) = self.named(RefKind::Exact(EntityKind::Class), "a class name")?;
                    self.push(
                        Axiom::Range {
                            property: name.clone(),
                            class,
                        },
                        at,
                    );
                }
                (EntityKind::Property, "DefinedBy") => {
                    let domain = self.expression()?;
                    let comma = self.cursor.peek();
                    if comma.tok != Tok::Comma {
                        return Err(unexpected(comma, "',' between the domain and range expressions"));
                    }
                    self.cursor.bump();
                    let range = self.expression()?;
                    self.push(
                        Axiom::PropertyDefinition {
                            property: name.clone(),
                            domain,
                            range,
                        },
                        at,
                    );
                }
                (EntityKind::Individual | EntityKind::Ice, "Types") => loop {
                    let (class, _) = self.named(RefKind::Exact(EntityKind::Class), "a class name")?;
                    self.push(
                        Axiom::ClassAssertion {
                            individual: name.clone(),
                            class,
                        },
                        at,
                    );
                    if kind == EntityKind::Ice {
                        self.ice(&name).types.push(at);
                    }
                    if self.cursor.peek().tok != Tok::Comma {
                        break;
                    }
                    let comma = self.cursor.bump();
                    if kind == EntityKind::Ice {
                        return Err(syntax(comma.span, "an ICE has exactly one type"));
                    }
                },
                (EntityKind::Individual | EntityKind::Ice, "Facts") => loop {
                    let (property, span) = self.named(RefKind::Exact(EntityKind::Property), "an object property")?;
                    let (object, _) = self.named(RefKind::Particular, "an individual")?;
                    self.push(
                        Axiom::Fact {
                            subject: name.clone(),
                            property,
                            object,
                        },
                        span,
                    );
                    if self.cursor.peek().tok != Tok::Comma {
                        break;
                    }
                    self.cursor.bump();
                },
                (EntityKind::Ice, "Represents-fact") => loop {
                    let (individual, _) = self.named(RefKind::Exact(EntityKind::Individual), "an individual")?;
                    self.push(
                        Axiom::RepresentsFact {
                            ice: name.clone(),
                            individual,
                        },
                        at,
                    );
                    if self.cursor.peek().tok != Tok::Comma {
                        break;
                    }
                    self.cursor.bump();
                },
                (EntityKind::Ice, "Mode") => {
                    let (word, span) = self.cursor.name("'this' or 'next'")?;
                    let mode = IndexicalMode::from_keyword(&word)
                        .ok_or_else(|| syntax(span, format!("expected 'this' or 'next', found '{word}'")))?;
                    self.ice(&name).modes.push(at);
                    self.sink.temporal.entry(name.clone()).or_default().mode = Some(mode);
                }
                (EntityKind::Ice, "Cycle") => {
                    let (word, span) = self.cursor.name("a weekday name")?;
                    let day = parse_weekday(&word)
                        .ok_or_else(|| syntax(span, format!("expected a weekday such as 'Friday', found '{word}'")))?;
                    self.ice(&name).cycles.push(at);
                    self.sink.temporal.entry(name.clone()).or_default().cycle = Some(day);
                }
                (EntityKind::Ice, other) if aboutness_keyword(other).is_some() => {
                    let (relation, constraint) = aboutness_keyword(other).unwrap();
                    let target = self.expression()?;
                    self.ice(&name).aboutness.push(at);
                    self.push(
                        Axiom::Aboutness(AboutnessAssertion {
                            ice: name.clone(),
                            relation,
                            target,
                            constraint,
                        }),
                        at,
                    );
                }
                _ => return Err(syntax(at, format!("'{keyword}:' is not a clause of {} frames", frame))),
            }
            self.end_of_clause()?;
        }
    }

    fn ice(&mut self, name: &str) -> &mut IceClauses {
        self.sink.ices.get_mut(name).expect("ICE registered at frame start")
    }
}
