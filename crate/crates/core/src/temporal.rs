//! Resolution of indexical temporal designations such as "this Friday" and
//! "next Friday".
//!
//! All arithmetic is on the proleptic Gregorian calendar in UTC. A weekly
//! cycle picks out whole calendar days: `[00:00:00, next 00:00:00)`.

use std::fmt;

use chrono::{Datelike, Days, NaiveDate, NaiveDateTime, NaiveTime, Weekday};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Axiom, ClassExpression, EntityKind, ModelError, Ontology};

pub const TIME_INTERVAL: &str = "TimeInterval";
pub const TEMPORAL_INSTANT: &str = "TemporalInstant";
pub const EXPRESSED_ON: &str = "expressed_on";
pub const PRECEDED_BY: &str = "preceded_by";
pub const HAS_FIRST_INSTANT: &str = "has_first_instant";

const TIMESTAMP_FORMAT: &str = "%Y-%m-%dT%H:%M:%S";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexicalMode {
    This,
    Next,
}

impl IndexicalMode {
    pub fn keyword(self) -> &'static str {
        match self {
            IndexicalMode::This => "this",
            IndexicalMode::Next => "next",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        match s {
            "this" => Some(IndexicalMode::This),
            "next" => Some(IndexicalMode::Next),
            _ => None,
        }
    }
}

impl fmt::Display for IndexicalMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// A weekly cycle of one-day intervals falling on `day`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CycleSpec {
    pub day: Weekday,
}

impl CycleSpec {
    pub const PERIOD_DAYS: u64 = 7;
    pub const INTERVAL_DAYS: u64 = 1;

    pub fn weekly(day: Weekday) -> Self {
        CycleSpec { day }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TemporalContext {
    pub utterance: NaiveDateTime,
    pub cycle: CycleSpec,
}

impl TemporalContext {
    pub fn new(utterance: NaiveDateTime, day: Weekday) -> Self {
        TemporalContext {
            utterance,
            cycle: CycleSpec::weekly(day),
        }
    }

    pub fn parse(utterance: &str, day: Weekday) -> Result<Self, TemporalError> {
        Ok(TemporalContext::new(parse_timestamp(utterance)?, day))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolvedInterval {
    #[serde(with = "timestamp_serde")]
    pub first_instant: NaiveDateTime,
    /// Exclusive end: the first instant of the following day.
    #[serde(with = "timestamp_serde")]
    pub last_instant: NaiveDateTime,
    pub designated_class: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TemporalError {
    #[error("invalid timestamp '{0}': expected YYYY-MM-DDThh:mm:ss (UTC)")]
    InvalidTimestamp(String),
    #[error("resolved date falls outside the supported calendar range")]
    OutOfRange,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("class '{0}' must be declared a subclass of {TIME_INTERVAL}")]
    NotATimeInterval(String),
}

/// Parses `YYYY-MM-DDThh:mm:ss`, optionally suffixed with `Z`.
pub fn parse_timestamp(s: &str) -> Result<NaiveDateTime, TemporalError> {
    let trimmed = s.strip_suffix('Z').unwrap_or(s);
    NaiveDateTime::parse_from_str(trimmed, TIMESTAMP_FORMAT).map_err(|_| TemporalError::InvalidTimestamp(s.to_owned()))
}

pub fn format_timestamp(t: &NaiveDateTime) -> String {
    t.format(TIMESTAMP_FORMAT).to_string()
}

pub fn weekday_name(day: Weekday) -> &'static str {
    match day {
        Weekday::Mon => "Monday",
        Weekday::Tue => "Tuesday",
        Weekday::Wed => "Wednesday",
        Weekday::Thu => "Thursday",
        Weekday::Fri => "Friday",
        Weekday::Sat => "Saturday",
        Weekday::Sun => "Sunday",
    }
}

pub fn parse_weekday(name: &str) -> Option<Weekday> {
    [
        Weekday::Mon,
        Weekday::Tue,
        Weekday::Wed,
        Weekday::Thu,
        Weekday::Fri,
        Weekday::Sat,
        Weekday::Sun,
    ]
    .into_iter()
    .find(|d| weekday_name(*d) == name)
}

/// Individual name used for a temporal instant: `t_2025-06-13` at midnight,
/// `t_2025-06-06T12-30-00` otherwise.
pub fn instant_individual_name(t: &NaiveDateTime) -> String {
    if t.time() == NaiveTime::MIN {
        format!("t_{}", t.format("%Y-%m-%d"))
    } else {
        format!("t_{}", t.format("%Y-%m-%dT%H-%M-%S"))
    }
}

fn midnight(date: NaiveDate) -> NaiveDateTime {
    date.and_time(NaiveTime::MIN)
}

/// "This" is the first cycle day on or after the utterance's calendar day;
/// "next" is one period later.
pub fn resolve_indexical(mode: IndexicalMode, ctx: &TemporalContext) -> Result<ResolvedInterval, TemporalError> {
    let start = ctx.utterance.date();
    let ahead = (7 + ctx.cycle.day.num_days_from_monday() - start.weekday().num_days_from_monday()) % 7;
    let offset = u64::from(ahead)
        + match mode {
            IndexicalMode::This => 0,
            IndexicalMode::Next => CycleSpec::PERIOD_DAYS,
        };
    let day = start
        .checked_add_days(Days::new(offset))
        .ok_or(TemporalError::OutOfRange)?;
    let end = day
        .checked_add_days(Days::new(CycleSpec::INTERVAL_DAYS))
        .ok_or(TemporalError::OutOfRange)?;
    Ok(ResolvedInterval {
        first_instant: midnight(day),
        last_instant: midnight(end),
        designated_class: weekday_name(ctx.cycle.day).to_owned(),
    })
}

/// `a` wholly precedes `b`.
pub fn check_precedence(a: &ResolvedInterval, b: &ResolvedInterval) -> bool {
    a.last_instant <= b.first_instant
}

/// Builds the designation target for an indexical uttered in `ctx`:
///
/// `Day and expressed_on value t_utt [and preceded_by value t_utt] and has_first_instant value t_first`
///
/// The `preceded_by` conjunct is present only when the designated interval
/// starts after the utterance. Instant individuals are referenced by
/// [`instant_individual_name`]; [`declare_instants`] adds any that are missing.
pub fn emit_designation_expression(
    mode: IndexicalMode,
    ctx: &TemporalContext,
    ontology: &Ontology,
) -> Result<ClassExpression, TemporalError> {
    let day_class = weekday_name(ctx.cycle.day);
    for class in [TIME_INTERVAL, TEMPORAL_INSTANT, day_class] {
        ontology.expect(class, EntityKind::Class)?;
    }
    for property in [EXPRESSED_ON, PRECEDED_BY, HAS_FIRST_INSTANT] {
        ontology.expect(property, EntityKind::Property)?;
    }
    if !ontology.class_ancestors(day_class).contains(TIME_INTERVAL) {
        return Err(TemporalError::NotATimeInterval(day_class.to_owned()));
    }

    let interval = resolve_indexical(mode, ctx)?;
    let uttered = instant_individual_name(&ctx.utterance);
    let mut conjuncts = vec![
        ClassExpression::named(day_class),
        ClassExpression::value(EXPRESSED_ON, uttered.clone()),
    ];
    if ctx.utterance < interval.first_instant {
        conjuncts.push(ClassExpression::value(PRECEDED_BY, uttered));
    }
    conjuncts.push(ClassExpression::value(
        HAS_FIRST_INSTANT,
        instant_individual_name(&interval.first_instant),
    ));
    Ok(ClassExpression::and(conjuncts))
}

/// Copy-on-write: declares each instant as a `TemporalInstant` individual
/// unless it already exists.
pub fn declare_instants(ontology: &Ontology, instants: &[NaiveDateTime]) -> Result<Ontology, TemporalError> {
    let mut out = ontology.clone();
    for t in instants {
        let name = instant_individual_name(t);
        if out.kind_of(&name).is_some() {
            out.expect(&name, EntityKind::Individual)?;
            continue;
        }
        out = out
            .with_declaration(&name, EntityKind::Individual)?
            .with_axiom(Axiom::ClassAssertion {
                individual: name,
                class: TEMPORAL_INSTANT.to_owned(),
            })?;
    }
    Ok(out)
}

mod timestamp_serde {
    use chrono::NaiveDateTime;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(t: &NaiveDateTime, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format_timestamp(t))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<NaiveDateTime, D::Error> {
        let raw = String::deserialize(d)?;
        super::parse_timestamp(&raw).map_err(serde::de::Error::custom)
    }
}
