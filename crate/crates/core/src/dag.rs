//! Directed acyclic graphs over a signature.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::signature::Signature;

/// A DAG over named variables. Edges run parent -> child.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    nodes: Vec<String>,
    parents: BTreeMap<String, Vec<String>>,
    children: BTreeMap<String, Vec<String>>,
}

impl Dag {
    /// Builds a DAG and verifies acyclicity. Parent lists keep the node
    /// declaration order, so downstream enumeration is deterministic.
    pub fn new(nodes: Vec<String>, edges: &[(String, String)]) -> Result<Self> {
        let node_set: BTreeSet<&String> = nodes.iter().collect();
        if node_set.len() != nodes.len() {
            return Err(Error::InvalidDag("duplicate node".into()));
        }
        let mut parents: BTreeMap<String, Vec<String>> =
            nodes.iter().map(|n| (n.clone(), Vec::new())).collect();
        let mut children: BTreeMap<String, Vec<String>> =
            nodes.iter().map(|n| (n.clone(), Vec::new())).collect();
        for (from, to) in edges {
            if !node_set.contains(from) {
                return Err(Error::UnknownVariable(from.clone()));
            }
            if !node_set.contains(to) {
                return Err(Error::UnknownVariable(to.clone()));
            }
            if from == to {
                return Err(Error::InvalidDag(format!("self-loop on `{}`", from)));
            }
            let ps = parents.get_mut(to).unwrap();
            if ps.contains(from) {
                return Err(Error::InvalidDag(format!(
                    "duplicate edge {} -> {}",
                    from, to
                )));
            }
            ps.push(from.clone());
            children.get_mut(from).unwrap().push(to.clone());
        }
        // Normalize parent/child order to the node declaration order.
        let order: BTreeMap<&String, usize> =
            nodes.iter().enumerate().map(|(i, n)| (n, i)).collect();
        for list in parents.values_mut().chain(children.values_mut()) {
            list.sort_by_key(|n| order[n]);
        }
        let dag = Dag {
            nodes,
            parents,
            children,
        };
        dag.topological_order()?;
        Ok(dag)
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn parents(&self, node: &str) -> Result<&[String]> {
        self.parents
            .get(node)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnknownVariable(node.to_string()))
    }

    pub fn children(&self, node: &str) -> Result<&[String]> {
        self.children
            .get(node)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnknownVariable(node.to_string()))
    }

    /// A topological order of the nodes; errors on a cycle. Deterministic:
    /// among ready nodes, declaration order wins.
    pub fn topological_order(&self) -> Result<Vec<String>> {
        let mut remaining: BTreeMap<&String, usize> = self
            .nodes
            .iter()
            .map(|n| (n, self.parents[n].len()))
            .collect();
        let mut order = Vec::with_capacity(self.nodes.len());
        let mut done: BTreeSet<&String> = BTreeSet::new();
        while order.len() < self.nodes.len() {
            let next = self
                .nodes
                .iter()
                .find(|n| !done.contains(n) && remaining[n] == 0)
                .ok_or_else(|| Error::InvalidDag("cycle detected".into()))?;
            done.insert(next);
            order.push(next.clone());
            for child in &self.children[next] {
                *remaining.get_mut(child).unwrap() -= 1;
            }
        }
        Ok(order)
    }

    /// Strict descendants of `node`.
    pub fn descendants(&self, node: &str) -> Result<BTreeSet<String>> {
        if !self.parents.contains_key(node) {
            return Err(Error::UnknownVariable(node.to_string()));
        }
        let mut out = BTreeSet::new();
        let mut stack: Vec<&String> = self.children[node].iter().collect();
        while let Some(n) = stack.pop() {
            if out.insert(n.clone()) {
                stack.extend(self.children[n].iter());
            }
        }
        Ok(out)
    }

    /// Checks compatibility with a signature: same node set, every
    /// exogenous variable a root, every endogenous variable a non-root.
    pub fn check_compatible(&self, signature: &Signature) -> Result<()> {
        let sig_vars: BTreeSet<&str> = signature.all_vars().collect();
        let dag_vars: BTreeSet<&str> = self.nodes.iter().map(String::as_str).collect();
        if sig_vars != dag_vars {
            return Err(Error::InvalidDag(
                "dag nodes do not match the signature's variables".into(),
            ));
        }
        for u in signature.exogenous() {
            if !self.parents[u].is_empty() {
                return Err(Error::InvalidDag(format!(
                    "exogenous variable `{}` must be a root",
                    u
                )));
            }
        }
        for x in signature.endogenous() {
            if self.parents[x].is_empty() {
                return Err(Error::InvalidDag(format!(
                    "endogenous variable `{}` must have at least one parent",
                    x
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::binary_range;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn rejects_cycles() {
        let e = vec![("A".into(), "B".into()), ("B".into(), "A".into())];
        assert!(Dag::new(names(&["A", "B"]), &e).is_err());
    }

    #[test]
    fn topological_order_respects_edges() {
        let e = vec![("U".into(), "X".into()), ("X".into(), "Y".into())];
        let d = Dag::new(names(&["Y", "X", "U"]), &e).unwrap();
        assert_eq!(d.topological_order().unwrap(), names(&["U", "X", "Y"]));
        assert_eq!(d.descendants("U").unwrap().len(), 2);
    }

    #[test]
    fn compatibility_requires_roots_and_nonroots() {
        let sig = Signature::new(
            vec![("U".into(), binary_range())],
            vec![("X".into(), binary_range())],
        )
        .unwrap();
        let good = Dag::new(names(&["U", "X"]), &[("U".into(), "X".into())]).unwrap();
        assert!(good.check_compatible(&sig).is_ok());
        let orphan = Dag::new(names(&["U", "X"]), &[]).unwrap();
        assert!(orphan.check_compatible(&sig).is_err());
        let into_exo = Dag::new(names(&["U", "X"]), &[("X".into(), "U".into())]).unwrap();
        assert!(into_exo.check_compatible(&sig).is_err());
    }
}
