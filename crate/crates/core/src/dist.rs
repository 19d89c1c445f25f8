//! Exact discrete distributions over finite assignment spaces.

use std::fmt;

use crate::assign::Assignment;
use crate::error::{Error, Result};
use crate::prob::ExactProb;
use crate::space::Space;

/// A probability distribution over the full assignments of a [`Space`],
/// stored densely. Masses always sum to exactly one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distribution {
    space: Space,
    mass: Vec<ExactProb>,
}

impl Distribution {
    /// Builds a distribution, checking the normalization invariant.
    pub fn new(space: Space, mass: Vec<ExactProb>) -> Result<Self> {
        if mass.len() != space.size() {
            return Err(Error::InvalidProbability(format!(
                "expected {} masses, got {}",
                space.size(),
                mass.len()
            )));
        }
        let total: ExactProb = mass.iter().cloned().sum();
        if !total.is_one() {
            return Err(Error::InvalidProbability(format!(
                "masses sum to {}, not 1",
                total
            )));
        }
        Ok(Distribution { space, mass })
    }

    /// A point mass on one full assignment of the space.
    pub fn point(space: Space, at: &Assignment) -> Result<Self> {
        let idx = space.encode(at)?;
        let mut mass = vec![ExactProb::zero(); space.size()];
        mass[space.index_of(&idx)] = ExactProb::one();
        Ok(Distribution { space, mass })
    }

    /// A single-variable distribution from (value label, mass) pairs.
    pub fn over_variable(var: &str, pairs: &[(&str, ExactProb)]) -> Result<Self> {
        let range: Vec<String> = pairs.iter().map(|(v, _)| v.to_string()).collect();
        let space = Space::new(vec![(var.to_string(), range)], u128::MAX)?;
        Distribution::new(space, pairs.iter().map(|(_, p)| p.clone()).collect())
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn masses(&self) -> &[ExactProb] {
        &self.mass
    }

    /// Mass of one full assignment.
    pub fn mass_of(&self, assignment: &Assignment) -> Result<ExactProb> {
        let idx = self.space.encode(assignment)?;
        Ok(self.mass[self.space.index_of(&idx)].clone())
    }

    /// Probability of a partial-assignment event.
    pub fn prob(&self, event: &Assignment) -> Result<ExactProb> {
        let pins = self.space.encode_partial(event)?;
        let mut total = ExactProb::zero();
        for (i, m) in self.mass.iter().enumerate() {
            if m.is_zero() {
                continue;
            }
            let idx = self.space.indices_at(i);
            if pins.iter().all(|&(pos, val)| idx[pos] == val) {
                total += m;
            }
        }
        Ok(total)
    }

    /// Exact Bayesian conditioning on a partial-assignment event.
    /// Zero-probability evidence is an error.
    pub fn condition(&self, evidence: &Assignment) -> Result<Distribution> {
        let pins = self.space.encode_partial(evidence)?;
        let total = self.prob(evidence)?;
        if total.is_zero() {
            return Err(Error::UndefinedConditional);
        }
        let mut mass = vec![ExactProb::zero(); self.mass.len()];
        for (i, m) in self.mass.iter().enumerate() {
            if m.is_zero() {
                continue;
            }
            let idx = self.space.indices_at(i);
            if pins.iter().all(|&(pos, val)| idx[pos] == val) {
                mass[i] = m.checked_div(&total).unwrap();
            }
        }
        Ok(Distribution {
            space: self.space.clone(),
            mass,
        })
    }

    /// Exact marginal onto a sublist of the space's variables (in the
    /// given order). Marginalizing onto no variables yields the unit mass
    /// on the empty assignment.
    pub fn marginal(&self, vars: &[&str]) -> Result<Distribution> {
        let mut kept = Vec::with_capacity(vars.len());
        for var in vars {
            let pos = self.space.position(var)?;
            kept.push((var.to_string(), self.space.range_at(pos).to_vec()));
        }
        let sub = Space::new(kept, u128::MAX)?;
        let positions: Vec<usize> = vars
            .iter()
            .map(|v| self.space.position(v).unwrap())
            .collect();
        let mut mass = vec![ExactProb::zero(); sub.size()];
        let mut scratch = vec![0usize; positions.len()];
        for (i, m) in self.mass.iter().enumerate() {
            if m.is_zero() {
                continue;
            }
            let idx = self.space.indices_at(i);
            for (k, &pos) in positions.iter().enumerate() {
                scratch[k] = idx[pos];
            }
            mass[sub.index_of(&scratch)] += m;
        }
        Ok(Distribution { space: sub, mass })
    }

    /// The support as (assignment, mass) pairs in linear index order,
    /// omitting zero masses.
    pub fn support(&self) -> impl Iterator<Item = (Assignment, &ExactProb)> + '_ {
        self.mass
            .iter()
            .enumerate()
            .filter(|(_, m)| !m.is_zero())
            .map(move |(i, m)| (self.space.decode(&self.space.indices_at(i)), m))
    }

    /// Whether every mass is 0 or 1 (a point distribution, since masses
    /// sum to one).
    pub fn is_degenerate(&self) -> bool {
        self.mass.iter().all(|m| m.is_extremal())
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (a, m) in self.support() {
            if !first {
                writeln!(f)?;
            }
            write!(f, "P({}) = {}", a, m)?;
            first = false;
        }
        Ok(())
    }
}
