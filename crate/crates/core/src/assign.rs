//! Partial assignments, counterfactual atoms, and worlds.

use std::collections::BTreeMap;
use std::fmt;

/// A partial assignment of value labels to variables. Kept sorted by
/// variable name so that iteration and display are deterministic.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Assignment(BTreeMap<String, String>);

impl Assignment {
    pub fn new() -> Self {
        Assignment(BTreeMap::new())
    }

    pub fn of(pairs: &[(&str, &str)]) -> Self {
        let mut a = Assignment::new();
        for (var, val) in pairs {
            a.set(var, val);
        }
        a
    }

    pub fn set(&mut self, var: &str, val: &str) -> &mut Self {
        self.0.insert(var.to_string(), val.to_string());
        self
    }

    pub fn with(mut self, var: &str, val: &str) -> Self {
        self.set(var, val);
        self
    }

    pub fn get(&self, var: &str) -> Option<&str> {
        self.0.get(var).map(String::as_str)
    }

    pub fn contains(&self, var: &str) -> bool {
        self.0.contains_key(var)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    /// Union of two assignments; `None` if they disagree on a shared variable.
    pub fn merged(&self, other: &Assignment) -> Option<Assignment> {
        let mut out = self.clone();
        for (var, val) in other.iter() {
            match out.get(var) {
                Some(existing) if existing != val => return None,
                _ => {
                    out.set(var, val);
                }
            }
        }
        Some(out)
    }

    /// Whether `other` agrees with `self` on every variable `self` assigns.
    pub fn satisfied_by(&self, other: &Assignment) -> bool {
        self.iter().all(|(var, val)| other.get(var) == Some(val))
    }

    /// The restriction of `self` to the named variables.
    pub fn restrict<'a>(&self, vars: impl IntoIterator<Item = &'a str>) -> Assignment {
        let mut out = Assignment::new();
        for var in vars {
            if let Some(val) = self.get(var) {
                out.set(var, val);
            }
        }
        out
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (var, val) in self.iter() {
            if !first {
                write!(f, ", ")?;
            }
            write!(f, "{}={}", var, val)?;
            first = false;
        }
        Ok(())
    }
}

impl FromIterator<(String, String)> for Assignment {
    fn from_iter<T: IntoIterator<Item = (String, String)>>(iter: T) -> Self {
        Assignment(iter.into_iter().collect())
    }
}

/// One counterfactual atom `(Y = y)_{X <- x}`: a target event under an
/// intervention. An empty intervention makes the atom observational.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Atom {
    pub target: Assignment,
    pub intervention: Assignment,
}

impl Atom {
    pub fn observational(target: Assignment) -> Self {
        Atom {
            target,
            intervention: Assignment::new(),
        }
    }

    pub fn counterfactual(target: Assignment, intervention: Assignment) -> Self {
        Atom {
            target,
            intervention,
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervention.is_empty() {
            write!(f, "{}", self.target)
        } else {
            write!(f, "({})[{}]", self.target, self.intervention)
        }
    }
}

/// An actual world: a full exogenous assignment `u` paired with a full
/// endogenous assignment `v`. Validity (positive probability, or being a
/// solution of an equation system) is checked by whoever consumes it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct World {
    pub u: Assignment,
    pub v: Assignment,
}

impl World {
    pub fn new(u: Assignment, v: Assignment) -> Self {
        World { u, v }
    }

    /// The combined assignment over exogenous and endogenous variables.
    pub fn full(&self) -> Assignment {
        self.u
            .merged(&self.v)
            .expect("u and v are over disjoint variables")
    }
}

impl fmt::Display for World {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}; {})", self.u, self.v)
    }
}
