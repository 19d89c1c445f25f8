//! Model and structural-model files.
//!
//! Both formats are TOML documents. A model file has sections `exogenous`
//! and `endogenous` (variable name -> value list), a top-level `edges`
//! array of `[parent, child]` pairs, `priors` (exogenous variable -> value
//! -> rational string) and `cpds` (endogenous variable -> parent-assignment
//! key -> value -> rational string). A structural-model file replaces
//! `cpds` with `equations` (endogenous variable -> parent-assignment key ->
//! value).
//!
//! Rational strings are `"a"` or `"a/b"` with a positive denominator, never
//! floats. Parent-assignment keys look like `"X=1"` or `"U=0,X=1"`; the
//! order of the pairs inside a key does not matter. Values omitted from a
//! cpd row get mass zero.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::assign::Assignment;
use crate::builder::{ModelBuilder, ScmBuilder};
use crate::error::{Error, Result};
use crate::model::CausalModel;
use crate::prob::ExactProb;
use crate::scm::Scm;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    exogenous: BTreeMap<String, Vec<String>>,
    endogenous: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    edges: Vec<(String, String)>,
    #[serde(default)]
    priors: BTreeMap<String, BTreeMap<String, String>>,
    #[serde(default)]
    cpds: BTreeMap<String, BTreeMap<String, BTreeMap<String, String>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScmDoc {
    exogenous: BTreeMap<String, Vec<String>>,
    endogenous: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    edges: Vec<(String, String)>,
    #[serde(default)]
    priors: BTreeMap<String, BTreeMap<String, String>>,
    #[serde(default)]
    equations: BTreeMap<String, BTreeMap<String, String>>,
}

fn toml_error(e: toml::de::Error) -> Error {
    Error::Syntax {
        position: e.span().map(|s| s.start).unwrap_or(0),
        message: e.message().to_string(),
    }
}

/// Parses a parent-assignment key like `"U=0,X=1"`.
fn parse_pa_key(key: &str) -> Result<Assignment> {
    let mut out = Assignment::new();
    if key.trim().is_empty() {
        return Err(Error::Syntax {
            position: 0,
            message: "empty parent-assignment key".into(),
        });
    }
    for pair in key.split(',') {
        let (var, val) = pair.split_once('=').ok_or_else(|| Error::Syntax {
            position: 0,
            message: format!("bad parent assignment `{}`", pair),
        })?;
        let (var, val) = (var.trim(), val.trim());
        if out.contains(var) {
            return Err(Error::Syntax {
                position: 0,
                message: format!("`{}` appears twice in `{}`", var, key),
            });
        }
        out.set(var, val);
    }
    Ok(out)
}

fn parse_masses(masses: &BTreeMap<String, String>) -> Result<Vec<(String, ExactProb)>> {
    masses
        .iter()
        .map(|(value, text)| Ok((value.clone(), text.parse::<ExactProb>()?)))
        .collect()
}

/// Parses a model file from text.
pub fn parse_model_str(text: &str) -> Result<CausalModel> {
    let doc: ModelDoc = toml::from_str(text).map_err(toml_error)?;
    let mut b = ModelBuilder::new();
    for (name, range) in &doc.exogenous {
        let refs: Vec<&str> = range.iter().map(String::as_str).collect();
        b = b.exogenous(name, &refs);
    }
    for (name, range) in &doc.endogenous {
        let refs: Vec<&str> = range.iter().map(String::as_str).collect();
        b = b.endogenous(name, &refs);
    }
    for (from, to) in &doc.edges {
        b = b.edge(from, to);
    }
    for (var, masses) in &doc.priors {
        let masses = parse_masses(masses)?;
        let refs: Vec<(&str, ExactProb)> = masses
            .iter()
            .map(|(v, p)| (v.as_str(), p.clone()))
            .collect();
        b = b.prior_exact(var, &refs);
    }
    for (var, rows) in &doc.cpds {
        for (key, masses) in rows {
            let pa = parse_pa_key(key)?;
            let pa_pairs: Vec<(&str, &str)> = pa.iter().collect();
            let masses = parse_masses(masses)?;
            let refs: Vec<(&str, ExactProb)> = masses
                .iter()
                .map(|(v, p)| (v.as_str(), p.clone()))
                .collect();
            b = b.cpd_row_exact(var, &pa_pairs, &refs);
        }
    }
    b.build()
}

/// Parses a structural-model file from text.
pub fn parse_scm_str(text: &str) -> Result<Scm> {
    let doc: ScmDoc = toml::from_str(text).map_err(toml_error)?;
    let mut b = ScmBuilder::new();
    for (name, range) in &doc.exogenous {
        let refs: Vec<&str> = range.iter().map(String::as_str).collect();
        b = b.exogenous(name, &refs);
    }
    for (name, range) in &doc.endogenous {
        let refs: Vec<&str> = range.iter().map(String::as_str).collect();
        b = b.endogenous(name, &refs);
    }
    for (from, to) in &doc.edges {
        b = b.edge(from, to);
    }
    for (var, masses) in &doc.priors {
        for (value, text) in masses {
            let p: ExactProb = text.parse()?;
            // ScmBuilder::prior takes small ratios; feed exact values via a
            // one-entry list each to keep the builder simple.
            b = b.prior_value(var, value, p);
        }
    }
    for (var, rows) in &doc.equations {
        for (key, value) in rows {
            let pa = parse_pa_key(key)?;
            let pa_pairs: Vec<(&str, &str)> = pa.iter().collect();
            b = b.equation(var, &pa_pairs, value);
        }
    }
    b.build()
}

/// Loads a model file from disk.
pub fn load_model(path: &Path) -> Result<CausalModel> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidModel(format!("cannot read `{}`: {}", path.display(), e)))?;
    parse_model_str(&text)
}

/// Loads a structural-model file from disk.
pub fn load_scm(path: &Path) -> Result<Scm> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidModel(format!("cannot read `{}`: {}", path.display(), e)))?;
    parse_scm_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Caps;
    use crate::query::{evaluate, parse_query, EvalResult, QueryTarget, SemanticsTag};

    const MODEL: &str = r#"
        edges = [["U_X", "X"], ["X", "Y"]]

        [exogenous]
        U_X = ["0", "1"]

        [endogenous]
        X = ["0", "1"]
        Y = ["0", "1"]

        [priors.U_X]
        "0" = "1/2"
        "1" = "1/2"

        [cpds.X."U_X=0"]
        "0" = "1"

        [cpds.X."U_X=1"]
        "1" = "1"

        [cpds.Y."X=1"]
        "0" = "2/3"
        "1" = "1/3"

        [cpds.Y."X=0"]
        "0" = "1/3"
        "1" = "2/3"
    "#;

    const SCM: &str = r#"
        edges = [["U", "Y"]]

        [exogenous]
        U = ["0", "1"]

        [endogenous]
        Y = ["0", "1"]

        [priors.U]
        "0" = "1/4"
        "1" = "3/4"

        [equations.Y]
        "U=0" = "1"
        "U=1" = "0"
    "#;

    #[test]
    fn model_files_round_through_evaluation() {
        let model = parse_model_str(MODEL).unwrap();
        let q = parse_query("P((Y=0)[X=0] | X=1, Y=1)").unwrap();
        let out = evaluate(
            QueryTarget::Model(&model),
            &q,
            SemanticsTag::N,
            &Caps::default(),
        )
        .unwrap();
        assert_eq!(out, EvalResult::Point(ExactProb::new(1, 3).unwrap()));
    }

    #[test]
    fn scm_files_parse_and_solve() {
        let scm = parse_scm_str(SCM).unwrap();
        let v = scm.solve(&Assignment::of(&[("U", "0")])).unwrap();
        assert_eq!(v.get("Y"), Some("1"));
    }

    #[test]
    fn bad_rationals_are_rejected() {
        let bad = MODEL.replace("\"1/2\"", "\"0.5\"");
        assert!(parse_model_str(&bad).is_err());
        let negative = MODEL.replace("\"1/2\"", "\"1/-2\"");
        assert!(parse_model_str(&negative).is_err());
    }

    #[test]
    fn unnormalized_rows_are_rejected() {
        let bad = MODEL.replace("\"1\" = \"1/3\"", "\"1\" = \"1/4\"");
        assert!(parse_model_str(&bad).is_err());
    }

    #[test]
    fn pa_keys_accept_any_order() {
        assert_eq!(
            parse_pa_key("A=1,B=0").unwrap(),
            parse_pa_key("B=0, A=1").unwrap()
        );
        assert!(parse_pa_key("A=1,A=0").is_err());
        assert!(parse_pa_key("A").is_err());
    }

    #[test]
    fn syntax_errors_surface_toml_positions() {
        assert!(matches!(
            parse_model_str("exogenous = 5"),
            Err(Error::Syntax { .. })
        ));
    }
}
