//! Finite assignment spaces with mixed-radix indexing.

use std::collections::BTreeMap;

use crate::assign::Assignment;
use crate::error::{Error, Result};

/// An ordered list of variables with their ranges, defining a finite space
/// of full assignments. Assignments are stored as value indices and mapped
/// to a dense linear index (first variable is the most significant digit).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Space {
    vars: Vec<String>,
    ranges: Vec<Vec<String>>,
    positions: BTreeMap<String, usize>,
    size: usize,
}

impl Space {
    pub fn new(vars: Vec<(String, Vec<String>)>, max_states: u128) -> Result<Self> {
        let mut names = Vec::with_capacity(vars.len());
        let mut ranges = Vec::with_capacity(vars.len());
        let mut positions = BTreeMap::new();
        let mut size: u128 = 1;
        for (name, range) in vars {
            if range.is_empty() {
                return Err(Error::InvalidSignature(format!(
                    "variable `{}` has an empty range",
                    name
                )));
            }
            if positions.insert(name.clone(), names.len()).is_some() {
                return Err(Error::InvalidSignature(format!(
                    "duplicate variable `{}`",
                    name
                )));
            }
            size = size.saturating_mul(range.len() as u128);
            if size > max_states {
                return Err(Error::ModelTooLarge {
                    states: size,
                    cap: max_states,
                });
            }
            names.push(name);
            ranges.push(range);
        }
        Ok(Space {
            vars: names,
            ranges,
            positions,
            size: size as usize,
        })
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    /// Number of full assignments. The empty space has exactly one (the
    /// empty assignment).
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn position(&self, var: &str) -> Result<usize> {
        self.positions
            .get(var)
            .copied()
            .ok_or_else(|| Error::UnknownVariable(var.to_string()))
    }

    pub fn contains(&self, var: &str) -> bool {
        self.positions.contains_key(var)
    }

    pub fn range_at(&self, pos: usize) -> &[String] {
        &self.ranges[pos]
    }

    pub fn range(&self, var: &str) -> Result<&[String]> {
        Ok(self.range_at(self.position(var)?))
    }

    pub fn value_index(&self, var: &str, value: &str) -> Result<usize> {
        self.range(var)?
            .iter()
            .position(|v| v == value)
            .ok_or_else(|| Error::OutOfRange {
                variable: var.to_string(),
                value: value.to_string(),
            })
    }

    /// Linear index of a full assignment given as value indices.
    pub fn index_of(&self, indices: &[usize]) -> usize {
        debug_assert_eq!(indices.len(), self.vars.len());
        let mut idx = 0;
        for (pos, &v) in indices.iter().enumerate() {
            debug_assert!(v < self.ranges[pos].len());
            idx = idx * self.ranges[pos].len() + v;
        }
        idx
    }

    /// Value indices of the assignment at a linear index.
    pub fn indices_at(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.vars.len()];
        for pos in (0..self.vars.len()).rev() {
            let card = self.ranges[pos].len();
            out[pos] = idx % card;
            idx /= card;
        }
        out
    }

    /// Converts a full assignment (by name) into value indices.
    pub fn encode(&self, assignment: &Assignment) -> Result<Vec<usize>> {
        if assignment.len() != self.vars.len() {
            return Err(Error::InvalidModel(format!(
                "expected a full assignment over {} variables, got {}",
                self.vars.len(),
                assignment.len()
            )));
        }
        let mut out = vec![0; self.vars.len()];
        for (var, val) in assignment.iter() {
            let pos = self.position(var)?;
            out[pos] = self.value_index(var, val)?;
        }
        Ok(out)
    }

    /// Converts value indices back into a named assignment.
    pub fn decode(&self, indices: &[usize]) -> Assignment {
        let mut a = Assignment::new();
        for (pos, &v) in indices.iter().enumerate() {
            a.set(&self.vars[pos], &self.ranges[pos][v]);
        }
        a
    }

    /// Encodes a partial assignment as (position, value-index) pairs.
    pub fn encode_partial(&self, assignment: &Assignment) -> Result<Vec<(usize, usize)>> {
        let mut out = Vec::with_capacity(assignment.len());
        for (var, val) in assignment.iter() {
            let pos = self.position(var)?;
            out.push((pos, self.value_index(var, val)?));
        }
        Ok(out)
    }

    /// Iterates over all full assignments as value-index vectors, in linear
    /// index order.
    pub fn iter_indices(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.size).map(|i| self.indices_at(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space() -> Space {
        Space::new(
            vec![
                ("A".into(), vec!["0".into(), "1".into()]),
                ("B".into(), vec!["x".into(), "y".into(), "z".into()]),
            ],
            1 << 20,
        )
        .unwrap()
    }

    #[test]
    fn index_round_trip() {
        let s = space();
        assert_eq!(s.size(), 6);
        for i in 0..s.size() {
            assert_eq!(s.index_of(&s.indices_at(i)), i);
        }
    }

    #[test]
    fn empty_space_has_one_assignment() {
        let s = Space::new(vec![], 10).unwrap();
        assert_eq!(s.size(), 1);
        assert_eq!(s.indices_at(0), Vec::<usize>::new());
    }

    #[test]
    fn cap_is_enforced() {
        let vars = vec![
            ("A".into(), vec!["0".into(), "1".into()]),
            ("B".into(), vec!["0".into(), "1".into()]),
        ];
        assert!(matches!(
            Space::new(vars, 3),
            Err(Error::ModelTooLarge { states: 4, cap: 3 })
        ));
    }

    #[test]
    fn encode_decode() {
        let s = space();
        let a = Assignment::of(&[("A", "1"), ("B", "z")]);
        let idx = s.encode(&a).unwrap();
        assert_eq!(s.decode(&idx), a);
        assert!(s.encode(&Assignment::of(&[("A", "1")])).is_err());
    }
}
