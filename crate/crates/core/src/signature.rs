//! Variable inventories: exogenous/endogenous names with finite value ranges.

use std::collections::BTreeMap;

use crate::assign::Assignment;
use crate::error::{Error, Result};

/// The variable inventory of a model: disjoint ordered lists of exogenous
/// and endogenous variable names, each with a nonempty ordered range of
/// distinct value labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    exogenous: Vec<String>,
    endogenous: Vec<String>,
    ranges: BTreeMap<String, Vec<String>>,
}

impl Signature {
    /// Validates and builds a signature. Variables keep the given order.
    pub fn new(
        exogenous: Vec<(String, Vec<String>)>,
        endogenous: Vec<(String, Vec<String>)>,
    ) -> Result<Self> {
        let mut ranges = BTreeMap::new();
        let mut exo_names = Vec::new();
        let mut endo_names = Vec::new();
        for (names, items) in [(&mut exo_names, exogenous), (&mut endo_names, endogenous)] {
            for (name, range) in items {
                if ranges.contains_key(&name) {
                    return Err(Error::InvalidSignature(format!(
                        "duplicate variable `{}`",
                        name
                    )));
                }
                if range.is_empty() {
                    return Err(Error::InvalidSignature(format!(
                        "variable `{}` has an empty range",
                        name
                    )));
                }
                let mut seen = std::collections::BTreeSet::new();
                for v in &range {
                    if !seen.insert(v) {
                        return Err(Error::InvalidSignature(format!(
                            "variable `{}` repeats the value `{}`",
                            name, v
                        )));
                    }
                }
                names.push(name.clone());
                ranges.insert(name, range);
            }
        }
        Ok(Signature {
            exogenous: exo_names,
            endogenous: endo_names,
            ranges,
        })
    }

    pub fn exogenous(&self) -> &[String] {
        &self.exogenous
    }

    pub fn endogenous(&self) -> &[String] {
        &self.endogenous
    }

    /// All variables, exogenous first, in declaration order.
    pub fn all_vars(&self) -> impl Iterator<Item = &str> {
        self.exogenous
            .iter()
            .chain(self.endogenous.iter())
            .map(String::as_str)
    }

    pub fn is_exogenous(&self, var: &str) -> bool {
        self.exogenous.iter().any(|v| v == var)
    }

    pub fn is_endogenous(&self, var: &str) -> bool {
        self.endogenous.iter().any(|v| v == var)
    }

    pub fn contains(&self, var: &str) -> bool {
        self.ranges.contains_key(var)
    }

    pub fn range(&self, var: &str) -> Result<&[String]> {
        self.ranges
            .get(var)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnknownVariable(var.to_string()))
    }

    /// Index of a value label within its variable's range.
    pub fn value_index(&self, var: &str, value: &str) -> Result<usize> {
        self.range(var)?
            .iter()
            .position(|v| v == value)
            .ok_or_else(|| Error::OutOfRange {
                variable: var.to_string(),
                value: value.to_string(),
            })
    }

    /// Checks that every pair in `assignment` names a known variable and an
    /// in-range value.
    pub fn check_assignment(&self, assignment: &Assignment) -> Result<()> {
        for (var, val) in assignment.iter() {
            self.value_index(var, val)?;
        }
        Ok(())
    }

    /// Checks `check_assignment` and that only endogenous variables appear.
    pub fn check_endogenous_assignment(&self, assignment: &Assignment) -> Result<()> {
        self.check_assignment(assignment)?;
        for (var, _) in assignment.iter() {
            if !self.is_endogenous(var) {
                return Err(Error::InvalidModel(format!(
                    "`{}` is not an endogenous variable",
                    var
                )));
            }
        }
        Ok(())
    }
}

/// Convenience constructor used pervasively in tests and fixtures.
pub fn binary_range() -> Vec<String> {
    vec!["0".to_string(), "1".to_string()]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::new(
            vec![("U".into(), binary_range())],
            vec![
                ("X".into(), binary_range()),
                ("Y".into(), vec!["a".into(), "b".into(), "c".into()]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn rejects_duplicates_and_empty_ranges() {
        assert!(Signature::new(
            vec![("U".into(), binary_range())],
            vec![("U".into(), binary_range())]
        )
        .is_err());
        assert!(Signature::new(vec![("U".into(), vec![])], vec![]).is_err());
        assert!(Signature::new(vec![("U".into(), vec!["0".into(), "0".into()])], vec![]).is_err());
    }

    #[test]
    fn lookups() {
        let s = sig();
        assert!(s.is_exogenous("U"));
        assert!(s.is_endogenous("Y"));
        assert_eq!(s.value_index("Y", "c").unwrap(), 2);
        assert!(s.value_index("Y", "d").is_err());
        assert!(s.range("Z").is_err());
    }
}
