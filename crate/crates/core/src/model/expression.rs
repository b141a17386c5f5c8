use std::collections::BTreeSet;
use std::fmt;

use super::EntityKind;

/// A class expression over the supported fragment.
///
/// `And` and `Or` always hold at least two operands and never directly nest
/// an operand of the same connective; use [`ClassExpression::and`] and
/// [`ClassExpression::or`] to keep that shape.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClassExpression {
    Named(String),
    And(Vec<ClassExpression>),
    Or(Vec<ClassExpression>),
    Not(Box<ClassExpression>),
    Some {
        property: String,
        filler: Box<ClassExpression>,
    },
    Only {
        property: String,
        filler: Box<ClassExpression>,
    },
    Value {
        property: String,
        individual: String,
    },
    /// Universal restriction whose filler is the aboutness target of an
    /// information content entity.
    Via {
        property: String,
        ice: String,
    },
}

impl ClassExpression {
    pub fn named(name: impl Into<String>) -> Self {
        ClassExpression::Named(name.into())
    }

    /// Builds a flattened intersection. A single operand is returned as is.
    ///
    /// # Panics
    /// Panics when `operands` is empty.
    pub fn and(operands: impl IntoIterator<Item = ClassExpression>) -> Self {
        Self::connective(operands, true)
    }

    /// Builds a flattened union. A single operand is returned as is.
    ///
    /// # Panics
    /// Panics when `operands` is empty.
    pub fn or(operands: impl IntoIterator<Item = ClassExpression>) -> Self {
        Self::connective(operands, false)
    }

    fn connective(operands: impl IntoIterator<Item = ClassExpression>, conjunction: bool) -> Self {
        let mut flat = Vec::new();
        for operand in operands {
            match operand {
                ClassExpression::And(inner) if conjunction => flat.extend(inner),
                ClassExpression::Or(inner) if !conjunction => flat.extend(inner),
                other => flat.push(other),
            }
        }
        assert!(!flat.is_empty(), "connective needs at least one operand");
        if flat.len() == 1 {
            flat.pop().unwrap()
        } else if conjunction {
            ClassExpression::And(flat)
        } else {
            ClassExpression::Or(flat)
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(operand: ClassExpression) -> Self {
        ClassExpression::Not(Box::new(operand))
    }

    pub fn some(property: impl Into<String>, filler: ClassExpression) -> Self {
        ClassExpression::Some {
            property: property.into(),
            filler: Box::new(filler),
        }
    }

    pub fn only(property: impl Into<String>, filler: ClassExpression) -> Self {
        ClassExpression::Only {
            property: property.into(),
            filler: Box::new(filler),
        }
    }

    pub fn value(property: impl Into<String>, individual: impl Into<String>) -> Self {
        ClassExpression::Value {
            property: property.into(),
            individual: individual.into(),
        }
    }

    pub fn via(property: impl Into<String>, ice: impl Into<String>) -> Self {
        ClassExpression::Via {
            property: property.into(),
            ice: ice.into(),
        }
    }

    /// Binding strength used by the printer: `or` < `and` < `not` < restriction.
    pub fn precedence(&self) -> u8 {
        match self {
            ClassExpression::Or(_) => 1,
            ClassExpression::And(_) => 2,
            ClassExpression::Not(_) => 3,
            _ => 4,
        }
    }

    /// Number of nodes in the expression tree.
    pub fn size(&self) -> usize {
        match self {
            ClassExpression::And(ops) | ClassExpression::Or(ops) => {
                1 + ops.iter().map(ClassExpression::size).sum::<usize>()
            }
            ClassExpression::Not(inner) => 1 + inner.size(),
            ClassExpression::Some { filler, .. } | ClassExpression::Only { filler, .. } => 1 + filler.size(),
            _ => 1,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            ClassExpression::And(ops) | ClassExpression::Or(ops) => {
                1 + ops.iter().map(ClassExpression::depth).max().unwrap_or(0)
            }
            ClassExpression::Not(inner) => 1 + inner.depth(),
            ClassExpression::Some { filler, .. } | ClassExpression::Only { filler, .. } => 1 + filler.depth(),
            _ => 1,
        }
    }

    /// Every name the expression mentions, with the category it must have.
    pub fn references(&self) -> BTreeSet<(EntityKind, &str)> {
        let mut out = BTreeSet::new();
        self.collect_references(&mut out);
        out
    }

    fn collect_references<'a>(&'a self, out: &mut BTreeSet<(EntityKind, &'a str)>) {
        match self {
            ClassExpression::Named(c) => {
                out.insert((EntityKind::Class, c));
            }
            ClassExpression::And(ops) | ClassExpression::Or(ops) => {
                for op in ops {
                    op.collect_references(out);
                }
            }
            ClassExpression::Not(inner) => inner.collect_references(out),
            ClassExpression::Some { property, filler } | ClassExpression::Only { property, filler } => {
                out.insert((EntityKind::Property, property));
                filler.collect_references(out);
            }
            ClassExpression::Value { property, individual } => {
                out.insert((EntityKind::Property, property));
                out.insert((EntityKind::Individual, individual));
            }
            ClassExpression::Via { property, ice } => {
                out.insert((EntityKind::Property, property));
                out.insert((EntityKind::Ice, ice));
            }
        }
    }

    /// True when every `And`/`Or` node has at least two operands.
    pub fn is_well_formed(&self) -> bool {
        match self {
            ClassExpression::And(ops) | ClassExpression::Or(ops) => {
                ops.len() >= 2 && ops.iter().all(ClassExpression::is_well_formed)
            }
            ClassExpression::Not(inner) => inner.is_well_formed(),
            ClassExpression::Some { filler, .. } | ClassExpression::Only { filler, .. } => filler.is_well_formed(),
            _ => true,
        }
    }

    fn write_operand(&self, f: &mut fmt::Formatter<'_>, operand: &ClassExpression, min_precedence: u8) -> fmt::Result {
        if operand.precedence() < min_precedence {
            write!(f, "({operand})")
        } else {
            write!(f, "{operand}")
        }
    }
}

/// Canonical surface form with the fewest parentheses the precedence table
/// allows.
impl fmt::Display for ClassExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassExpression::Named(name) => f.write_str(name),
            ClassExpression::And(ops) | ClassExpression::Or(ops) => {
                let (word, min) = if matches!(self, ClassExpression::And(_)) {
                    (" and ", 2)
                } else {
                    (" or ", 1)
                };
                for (i, op) in ops.iter().enumerate() {
                    if i > 0 {
                        f.write_str(word)?;
                    }
                    self.write_operand(f, op, min)?;
                }
                Ok(())
            }
            ClassExpression::Not(inner) => {
                f.write_str("not ")?;
                self.write_operand(f, inner, 3)
            }
            ClassExpression::Some { property, filler } => {
                write!(f, "{property} some ")?;
                self.write_operand(f, filler, 4)
            }
            ClassExpression::Only { property, filler } => {
                write!(f, "{property} only ")?;
                self.write_operand(f, filler, 4)
            }
            ClassExpression::Value { property, individual } => write!(f, "{property} value {individual}"),
            ClassExpression::Via { property, ice } => write!(f, "{property} via {ice}"),
        }
    }
}
