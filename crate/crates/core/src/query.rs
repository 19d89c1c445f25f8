//! The counterfactual query language and the evaluation dispatcher.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! query    := "P(" event ( "|" event )? ")"
//! event    := term ( "," term )*
//! term     := assign | cfatom
//! cfatom   := "(" assign ( "," assign )* ")" "[" assign ( "," assign )* "]"
//! assign   := IDENT "=" VALUE
//! ```
//!
//! Inside the intervention brackets `<-` is accepted as an alias for `=`,
//! so `(Y=0)[X<-0]` and `(Y=0)[X=0]` parse identically. Plain assignments
//! in the main event are observational atoms; the conditioning event after
//! `|` must consist of plain assignments only.

use std::fmt;

use crate::assign::{Assignment, Atom};
use crate::bsem::{b_complex_with, b_conditional_with};
use crate::canonical::{bound_query, independent_canonical};
use crate::error::{Caps, Error, Result};
use crate::model::CausalModel;
use crate::po::{build_gh_scm, po_complex_with, po_conditional_with};
use crate::prob::ExactProb;
use crate::scm::Scm;
use crate::signature::Signature;

/// A parsed query: a nonempty conjunction of counterfactual atoms and an
/// optional conditioning event.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterfactualQuery {
    pub atoms: Vec<Atom>,
    pub given: Option<Assignment>,
}

impl CounterfactualQuery {
    /// Checks every variable and value against a signature: targets and
    /// interventions must be endogenous, evidence may mention exogenous
    /// variables too.
    pub fn validate(&self, signature: &Signature) -> Result<()> {
        for atom in &self.atoms {
            signature.check_endogenous_assignment(&atom.target)?;
            signature.check_endogenous_assignment(&atom.intervention)?;
        }
        if let Some(given) = &self.given {
            signature.check_assignment(given)?;
        }
        Ok(())
    }

    /// Whether the conditioning event pins every variable of the signature.
    pub fn given_is_full_world(&self, signature: &Signature) -> bool {
        match &self.given {
            Some(given) => signature.all_vars().all(|v| given.contains(v)),
            None => false,
        }
    }

    /// Whether every atom is observational.
    pub fn is_observational(&self) -> bool {
        self.atoms.iter().all(|a| a.intervention.is_empty())
    }
}

impl fmt::Display for CounterfactualQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P(")?;
        for (i, atom) in self.atoms.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", atom)?;
        }
        if let Some(given) = &self.given {
            write!(f, " | {}", given)?;
        }
        write!(f, ")")
    }
}

/// Parses the query grammar. Errors carry the byte position of the failure.
pub fn parse_query(text: &str) -> Result<CounterfactualQuery> {
    let mut p = Parser {
        text: text.as_bytes(),
        pos: 0,
    };
    p.skip_ws();
    p.expect_keyword("P")?;
    p.expect(b'(')?;
    let atoms = p.event()?;
    let given = if p.peek() == Some(b'|') {
        p.pos += 1;
        let terms = p.event()?;
        let mut given = Assignment::new();
        for term in terms {
            if !term.intervention.is_empty() {
                return Err(p.err("the conditioning event must be a plain assignment"));
            }
            given = given
                .merged(&term.target)
                .ok_or_else(|| p.err("the conditioning event assigns a variable twice"))?;
        }
        Some(given)
    } else {
        None
    };
    p.expect(b')')?;
    p.skip_ws();
    if p.pos != p.text.len() {
        return Err(p.err("trailing input after the query"));
    }
    Ok(CounterfactualQuery { atoms, given })
}

struct Parser<'a> {
    text: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, message: &str) -> Error {
        Error::Syntax {
            position: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.text.get(self.pos).copied()
    }

    fn expect(&mut self, ch: u8) -> Result<()> {
        if self.peek() == Some(ch) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", ch as char)))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<()> {
        self.skip_ws();
        if self.text[self.pos..].starts_with(kw.as_bytes()) {
            self.pos += kw.len();
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", kw)))
        }
    }

    fn token(&mut self, kind: &str) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.text.len() {
            let c = self.text[self.pos];
            if c.is_ascii_alphanumeric()
                || matches!(c, b'_' | b'\'' | b'.' | b'+')
                || (c == b'-' && self.pos > start)
            {
                self.pos += 1;
            } else {
                break;
            }
        }
        if self.pos == start {
            return Err(self.err(&format!("expected {}", kind)));
        }
        Ok(String::from_utf8_lossy(&self.text[start..self.pos]).into_owned())
    }

    /// assign := IDENT ("=" | "<-") VALUE; the arrow only inside brackets.
    fn assign(&mut self, allow_arrow: bool) -> Result<(String, String)> {
        let var = self.token("a variable name")?;
        self.skip_ws();
        if self.text[self.pos..].starts_with(b"<-") {
            if !allow_arrow {
                return Err(self.err("`<-` is only allowed inside intervention brackets"));
            }
            self.pos += 2;
        } else if self.peek() == Some(b'=') {
            self.pos += 1;
        } else {
            return Err(self.err("expected `=`"));
        }
        let value = self.token("a value")?;
        Ok((var, value))
    }

    fn assign_list(&mut self, allow_arrow: bool, terminator: u8) -> Result<Assignment> {
        let mut out = Assignment::new();
        loop {
            let (var, value) = self.assign(allow_arrow)?;
            if out.contains(&var) && out.get(&var) != Some(value.as_str()) {
                return Err(self.err(&format!("`{}` is assigned twice", var)));
            }
            out.set(&var, &value);
            match self.peek() {
                Some(b',') => {
                    self.pos += 1;
                }
                Some(c) if c == terminator => return Ok(out),
                _ => return Err(self.err(&format!("expected `,` or `{}`", terminator as char))),
            }
        }
    }

    fn event(&mut self) -> Result<Vec<Atom>> {
        let mut atoms = Vec::new();
        loop {
            match self.peek() {
                Some(b'(') => {
                    self.pos += 1;
                    let target = self.assign_list(false, b')')?;
                    self.expect(b')')?;
                    self.expect(b'[')?;
                    let intervention = self.assign_list(true, b']')?;
                    self.expect(b']')?;
                    atoms.push(Atom::counterfactual(target, intervention));
                }
                Some(_) => {
                    let (var, value) = self.assign(false)?;
                    let mut target = Assignment::new();
                    target.set(&var, &value);
                    atoms.push(Atom::observational(target));
                }
                None => return Err(self.err("unexpected end of input")),
            }
            match self.peek() {
                Some(b',') => {
                    self.pos += 1;
                }
                _ => break,
            }
        }
        if atoms.is_empty() {
            return Err(self.err("the event is empty"));
        }
        Ok(atoms)
    }
}

/// The semantics a query is evaluated under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SemanticsTag {
    /// Actualized-refinement semantics.
    B,
    /// Potential-outcome semantics.
    N,
    /// Product-form canonical SCM.
    Gh,
    /// Independent canonical SCM.
    Ic,
    /// Direct evaluation of a supplied structural model.
    ScmDirect,
    /// Min/max over all canonical SCMs.
    Bounds,
}

impl SemanticsTag {
    pub const POINT_TAGS: [SemanticsTag; 4] = [
        SemanticsTag::B,
        SemanticsTag::N,
        SemanticsTag::Gh,
        SemanticsTag::Ic,
    ];
}

impl fmt::Display for SemanticsTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SemanticsTag::B => "B",
            SemanticsTag::N => "N",
            SemanticsTag::Gh => "GH",
            SemanticsTag::Ic => "IC",
            SemanticsTag::ScmDirect => "SCM",
            SemanticsTag::Bounds => "BOUNDS",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for SemanticsTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "B" => Ok(SemanticsTag::B),
            "N" => Ok(SemanticsTag::N),
            "GH" => Ok(SemanticsTag::Gh),
            "IC" => Ok(SemanticsTag::Ic),
            "SCM" => Ok(SemanticsTag::ScmDirect),
            "BOUNDS" => Ok(SemanticsTag::Bounds),
            other => Err(Error::Unsupported(format!("unknown semantics `{}`", other))),
        }
    }
}

/// A point value or an interval of values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalResult {
    Point(ExactProb),
    Interval(ExactProb, ExactProb),
}

impl EvalResult {
    pub fn point(&self) -> Option<&ExactProb> {
        match self {
            EvalResult::Point(p) => Some(p),
            EvalResult::Interval(_, _) => None,
        }
    }
}

impl fmt::Display for EvalResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalResult::Point(p) => write!(f, "{} (≈ {:.6})", p, p.to_f64()),
            EvalResult::Interval(lo, hi) => {
                write!(
                    f,
                    "[{}, {}] (≈ [{:.6}, {:.6}])",
                    lo,
                    hi,
                    lo.to_f64(),
                    hi.to_f64()
                )
            }
        }
    }
}

/// What a query is evaluated against.
#[derive(Debug, Clone, Copy)]
pub enum QueryTarget<'a> {
    Model(&'a CausalModel),
    Scm(&'a Scm),
}

impl<'a> QueryTarget<'a> {
    pub fn signature(&self) -> &Signature {
        match self {
            QueryTarget::Model(m) => m.signature(),
            QueryTarget::Scm(s) => s.signature(),
        }
    }

    fn as_model(&self) -> Result<CausalModel> {
        match self {
            QueryTarget::Model(m) => Ok((*m).clone()),
            QueryTarget::Scm(s) => s.induced_model(),
        }
    }
}

/// Evaluates a query under one semantics. Structural-model targets are
/// reduced to the causal model they induce for every semantics except the
/// direct one.
pub fn evaluate(
    target: QueryTarget<'_>,
    query: &CounterfactualQuery,
    semantics: SemanticsTag,
    caps: &Caps,
) -> Result<EvalResult> {
    query.validate(target.signature())?;
    let atoms = &query.atoms;
    let given = query.given.as_ref();
    match semantics {
        SemanticsTag::ScmDirect => {
            let QueryTarget::Scm(scm) = target else {
                return Err(Error::Unsupported(
                    "direct evaluation requires a structural model input".into(),
                ));
            };
            let value = match given {
                None => scm.complex_cf_with(atoms, caps)?,
                Some(given) => scm.conditional_cf_with(atoms, given, caps)?,
            };
            Ok(EvalResult::Point(value))
        }
        SemanticsTag::B => {
            let model = target.as_model()?;
            let value = match given {
                None => b_complex_with(&model, atoms, caps)?,
                Some(given) => b_conditional_with(&model, atoms, given, caps)?,
            };
            Ok(EvalResult::Point(value))
        }
        SemanticsTag::N => {
            let model = target.as_model()?;
            let value = match given {
                None => po_complex_with(&model, atoms, caps)?,
                Some(given) => po_conditional_with(&model, atoms, given, caps)?,
            };
            Ok(EvalResult::Point(value))
        }
        SemanticsTag::Gh | SemanticsTag::Ic => {
            let model = target.as_model()?;
            let scm = match semantics {
                SemanticsTag::Gh => build_gh_scm(&model, caps)?,
                _ => independent_canonical(&model, caps)?,
            };
            let value = match given {
                None => scm.complex_cf_with(atoms, caps)?,
                Some(given) => scm.conditional_cf_with(atoms, given, caps)?,
            };
            Ok(EvalResult::Point(value))
        }
        SemanticsTag::Bounds => {
            let model = target.as_model()?;
            if query.given_is_full_world(model.signature()) {
                return Err(Error::Unsupported(
                    "bounds are defined over canonical families, not pinned worlds".into(),
                ));
            }
            let (lo, hi) = bound_query(&model, atoms, given, caps)?;
            Ok(EvalResult::Interval(lo, hi))
        }
    }
}

/// The standard probabilities of causation for binary cause and effect.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CausationKind {
    Necessity,
    Sufficiency,
    NecessityAndSufficiency,
}

impl std::str::FromStr for CausationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "PN" => Ok(CausationKind::Necessity),
            "PS" => Ok(CausationKind::Sufficiency),
            "PNS" => Ok(CausationKind::NecessityAndSufficiency),
            other => Err(Error::Unsupported(format!(
                "unknown probability of causation `{}`",
                other
            ))),
        }
    }
}

/// Builds the query for a probability of causation. The second value of
/// each binary range is read as the positive value.
pub fn causation_query(
    model: &CausalModel,
    x_var: &str,
    y_var: &str,
    kind: CausationKind,
) -> Result<CounterfactualQuery> {
    let sig = model.signature();
    for var in [x_var, y_var] {
        if !sig.is_endogenous(var) {
            return Err(Error::Unsupported(format!(
                "`{}` is not an endogenous variable",
                var
            )));
        }
        if sig.range(var)?.len() != 2 {
            return Err(Error::Unsupported(format!(
                "probabilities of causation require binary variables, `{}` is not",
                var
            )));
        }
    }
    let (x0, x1) = (&sig.range(x_var)?[0], &sig.range(x_var)?[1]);
    let (y0, y1) = (&sig.range(y_var)?[0], &sig.range(y_var)?[1]);
    let atom = |tv: &str, iv: &str| {
        Atom::counterfactual(
            Assignment::new().with(y_var, tv),
            Assignment::new().with(x_var, iv),
        )
    };
    let query = match kind {
        CausationKind::Necessity => CounterfactualQuery {
            atoms: vec![atom(y0, x0)],
            given: Some(Assignment::new().with(x_var, x1).with(y_var, y1)),
        },
        CausationKind::Sufficiency => CounterfactualQuery {
            atoms: vec![atom(y1, x1)],
            given: Some(Assignment::new().with(x_var, x0).with(y_var, y0)),
        },
        CausationKind::NecessityAndSufficiency => CounterfactualQuery {
            atoms: vec![atom(y1, x1), atom(y0, x0)],
            given: None,
        },
    };
    Ok(query)
}

/// Evaluates a probability of causation under a point-valued semantics.
pub fn prob_of_causation(
    model: &CausalModel,
    x_var: &str,
    y_var: &str,
    kind: CausationKind,
    semantics: SemanticsTag,
    caps: &Caps,
) -> Result<ExactProb> {
    let query = causation_query(model, x_var, y_var, kind)?;
    match evaluate(QueryTarget::Model(model), &query, semantics, caps)? {
        EvalResult::Point(p) => Ok(p),
        EvalResult::Interval(_, _) => Err(Error::Unsupported(
            "probabilities of causation need a point-valued semantics".into(),
        )),
    }
}

/// The agreement class of a query: which semantics are expected to
/// coincide on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryClass {
    /// No interventions anywhere: every semantics returns the model value.
    Observational,
    /// One atom conditioned on a full world.
    BasicWithWorld,
    /// One atom, optionally conditioned on a partial event.
    SingleAtom,
    /// A general conjunction: the refinement semantics may differ.
    GeneralComplex,
}

impl QueryClass {
    pub fn classify(query: &CounterfactualQuery, signature: &Signature) -> QueryClass {
        if query.is_observational() {
            QueryClass::Observational
        } else if query.atoms.len() == 1 && query.given_is_full_world(signature) {
            QueryClass::BasicWithWorld
        } else if query.atoms.len() == 1 {
            QueryClass::SingleAtom
        } else {
            QueryClass::GeneralComplex
        }
    }

    /// Whether the refinement semantics is expected to agree with the
    /// potential-outcome family on this class.
    pub fn refinement_expected_to_agree(&self) -> bool {
        !matches!(self, QueryClass::GeneralComplex)
    }
}

/// One evaluated cell of a comparison table; errors are carried inline.
pub type ComparisonCell = (SemanticsTag, std::result::Result<EvalResult, String>);

/// The outcome of evaluating a query under every applicable semantics.
#[derive(Debug, Clone)]
pub struct SemanticsComparison {
    pub class: QueryClass,
    pub cells: Vec<ComparisonCell>,
    /// N, GH and IC returned the same point value.
    pub family_agrees: bool,
    /// B returned that same value.
    pub refinement_agrees: bool,
}

/// Evaluates the query under B, N, GH and IC (plus the direct semantics for
/// structural-model targets and bounds where admissible) and reports which
/// of them coincide. Per-cell failures never abort the table.
pub fn compare_semantics(
    target: QueryTarget<'_>,
    query: &CounterfactualQuery,
    caps: &Caps,
) -> Result<SemanticsComparison> {
    query.validate(target.signature())?;
    let base_sig = match target {
        QueryTarget::Model(m) => m.signature().clone(),
        QueryTarget::Scm(s) => s.induced_model()?.signature().clone(),
    };
    let class = QueryClass::classify(query, &base_sig);
    let mut tags = vec![
        SemanticsTag::B,
        SemanticsTag::N,
        SemanticsTag::Gh,
        SemanticsTag::Ic,
    ];
    if matches!(target, QueryTarget::Scm(_)) {
        tags.push(SemanticsTag::ScmDirect);
    }
    let bounds_applicable = match &query.given {
        Some(given) => given.vars().all(|v| base_sig.is_endogenous(v)),
        None => true,
    };
    if bounds_applicable {
        tags.push(SemanticsTag::Bounds);
    }
    let cells: Vec<ComparisonCell> = tags
        .into_iter()
        .map(|tag| {
            let outcome = evaluate(target, query, tag, caps).map_err(|e| e.to_string());
            (tag, outcome)
        })
        .collect();
    let value_of = |tag: SemanticsTag| -> Option<ExactProb> {
        cells
            .iter()
            .find(|(t, _)| *t == tag)
            .and_then(|(_, r)| match r {
                Ok(EvalResult::Point(p)) => Some(p.clone()),
                _ => None,
            })
    };
    let family_agrees = match (
        value_of(SemanticsTag::N),
        value_of(SemanticsTag::Gh),
        value_of(SemanticsTag::Ic),
    ) {
        (Some(n), Some(gh), Some(ic)) => n == gh && gh == ic,
        _ => false,
    };
    let refinement_agrees = match (value_of(SemanticsTag::B), value_of(SemanticsTag::N)) {
        (Some(b), Some(n)) => b == n,
        _ => false,
    };
    Ok(SemanticsComparison {
        class,
        cells,
        family_agrees,
        refinement_agrees,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::ModelBuilder;

    fn pr(n: i64, d: i64) -> ExactProb {
        ExactProb::new(n, d).unwrap()
    }

    fn xy_model(p: (i64, i64), q: (i64, i64)) -> CausalModel {
        ModelBuilder::new()
            .exogenous("U_X", &["0", "1"])
            .endogenous("X", &["0", "1"])
            .endogenous("Y", &["0", "1"])
            .edge("U_X", "X")
            .edge("X", "Y")
            .uniform_prior("U_X")
            .cpd_row("X", &[("U_X", "0")], &[("0", (1, 1)), ("1", (0, 1))])
            .cpd_row("X", &[("U_X", "1")], &[("0", (0, 1)), ("1", (1, 1))])
            .cpd_row("Y", &[("X", "1")], &[("0", (p.1 - p.0, p.1)), ("1", p)])
            .cpd_row("Y", &[("X", "0")], &[("0", (q.1 - q.0, q.1)), ("1", q)])
            .build()
            .unwrap()
    }

    #[test]
    fn parses_single_atom_with_evidence() {
        let q = parse_query("P( (Y=0)[X<-0] | X=1, Y=1 )").unwrap();
        assert_eq!(q.atoms.len(), 1);
        assert_eq!(q.atoms[0].target, Assignment::of(&[("Y", "0")]));
        assert_eq!(q.atoms[0].intervention, Assignment::of(&[("X", "0")]));
        assert_eq!(q.given, Some(Assignment::of(&[("X", "1"), ("Y", "1")])));
        // The arrow and `=` forms are the same query.
        assert_eq!(q, parse_query("P((Y=0)[X=0]|X=1,Y=1)").unwrap());
    }

    #[test]
    fn parses_two_atom_conjunction() {
        let q = parse_query("P( (Y=1)[X<-1], (Y=0)[X<-1] | X=0, Y=0 )").unwrap();
        assert_eq!(q.atoms.len(), 2);
        assert_eq!(q.atoms[1].target, Assignment::of(&[("Y", "0")]));
        assert_eq!(q.atoms[1].intervention, Assignment::of(&[("X", "1")]));
    }

    #[test]
    fn parses_observational_query() {
        let q = parse_query("P( Y=1 )").unwrap();
        assert_eq!(q.atoms.len(), 1);
        assert!(q.atoms[0].intervention.is_empty());
        assert!(q.given.is_none());
        assert!(q.is_observational());
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_query("P( (Y=0)[X<-0 | X=1 )").unwrap_err();
        assert!(matches!(err, Error::Syntax { .. }));
        let err = parse_query("P(Y=1) trailing").unwrap_err();
        match err {
            Error::Syntax { position, .. } => assert!(position >= 7),
            other => panic!("unexpected {:?}", other),
        }
        // The arrow is rejected outside brackets.
        assert!(parse_query("P(Y<-1)").is_err());
    }

    #[test]
    fn printer_round_trips() {
        for text in [
            "P( (Y=0)[X<-0] | X=1, Y=1 )",
            "P( (Y=1)[X=1], (Y=0)[X=1] | X=0, Y=0 )",
            "P(Y=1)",
            "P((X=1,Y=0)[X=1])",
            "P(Y=0 | U_X=1)",
        ] {
            let q = parse_query(text).unwrap();
            assert_eq!(parse_query(&q.to_string()).unwrap(), q, "{}", text);
        }
    }

    #[test]
    fn validation_names_the_offender() {
        let m = xy_model((1, 3), (2, 3));
        let q = parse_query("P(W=1)").unwrap();
        assert_eq!(
            q.validate(m.signature()),
            Err(Error::UnknownVariable("W".into()))
        );
        let q = parse_query("P(Y=7)").unwrap();
        assert!(matches!(
            q.validate(m.signature()),
            Err(Error::OutOfRange { .. })
        ));
        // Targets must be endogenous.
        let q = parse_query("P((U_X=1)[X=0])").unwrap();
        assert!(q.validate(m.signature()).is_err());
    }

    #[test]
    fn evaluation_matches_the_worked_values() {
        let m = xy_model((1, 3), (2, 3));
        let caps = Caps::default();
        let q = parse_query("P( (Y=0)[X=0] | X=1, Y=1 )").unwrap();
        for tag in SemanticsTag::POINT_TAGS {
            assert_eq!(
                evaluate(QueryTarget::Model(&m), &q, tag, &caps).unwrap(),
                EvalResult::Point(pr(1, 3)),
                "{}",
                tag
            );
        }
        assert_eq!(
            evaluate(QueryTarget::Model(&m), &q, SemanticsTag::Bounds, &caps).unwrap(),
            EvalResult::Interval(ExactProb::zero(), ExactProb::one())
        );

        let diverging = parse_query("P( (Y=1)[X=1], (Y=0)[X=1] | X=0, Y=0 )").unwrap();
        assert_eq!(
            evaluate(QueryTarget::Model(&m), &diverging, SemanticsTag::B, &caps).unwrap(),
            EvalResult::Point(pr(2, 9))
        );
        for tag in [SemanticsTag::N, SemanticsTag::Gh, SemanticsTag::Ic] {
            assert_eq!(
                evaluate(QueryTarget::Model(&m), &diverging, tag, &caps).unwrap(),
                EvalResult::Point(ExactProb::zero()),
                "{}",
                tag
            );
        }
    }

    #[test]
    fn bounds_reject_full_world_evidence() {
        let m = xy_model((1, 3), (2, 3));
        let q = parse_query("P((Y=0)[X=0] | U_X=1, X=1, Y=1)").unwrap();
        assert!(matches!(
            evaluate(
                QueryTarget::Model(&m),
                &q,
                SemanticsTag::Bounds,
                &Caps::default()
            ),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn probabilities_of_causation() {
        let m = xy_model((1, 3), (2, 3));
        let caps = Caps::default();
        // PN = 1 - q, PNS = p(1 - q) under the potential-outcome semantics.
        assert_eq!(
            prob_of_causation(
                &m,
                "X",
                "Y",
                CausationKind::Necessity,
                SemanticsTag::N,
                &caps
            )
            .unwrap(),
            pr(1, 3)
        );
        assert_eq!(
            prob_of_causation(
                &m,
                "X",
                "Y",
                CausationKind::NecessityAndSufficiency,
                SemanticsTag::N,
                &caps
            )
            .unwrap(),
            pr(1, 9)
        );
        // Agreement across the four point semantics.
        for kind in [
            CausationKind::Necessity,
            CausationKind::Sufficiency,
            CausationKind::NecessityAndSufficiency,
        ] {
            let reference = prob_of_causation(&m, "X", "Y", kind, SemanticsTag::N, &caps).unwrap();
            for tag in SemanticsTag::POINT_TAGS {
                assert_eq!(
                    prob_of_causation(&m, "X", "Y", kind, tag, &caps).unwrap(),
                    reference
                );
            }
        }
        // Non-binary variables are rejected.
        let bad = ModelBuilder::new()
            .exogenous("U", &["0", "1", "2"])
            .endogenous("Y", &["0", "1", "2"])
            .edge("U", "Y")
            .uniform_prior("U")
            .cpd_row(
                "Y",
                &[("U", "0")],
                &[("0", (1, 1)), ("1", (0, 1)), ("2", (0, 1))],
            )
            .cpd_row(
                "Y",
                &[("U", "1")],
                &[("0", (0, 1)), ("1", (1, 1)), ("2", (0, 1))],
            )
            .cpd_row(
                "Y",
                &[("U", "2")],
                &[("0", (0, 1)), ("1", (0, 1)), ("2", (1, 1))],
            )
            .build()
            .unwrap();
        assert!(prob_of_causation(
            &bad,
            "Y",
            "Y",
            CausationKind::Necessity,
            SemanticsTag::N,
            &caps
        )
        .is_err());
    }

    #[test]
    fn comparison_table_flags_the_divergence() {
        let m = xy_model((1, 3), (2, 3));
        let caps = Caps::default();
        let q = parse_query("P( (Y=1)[X=1], (Y=0)[X=1] | X=0, Y=0 )").unwrap();
        let cmp = compare_semantics(QueryTarget::Model(&m), &q, &caps).unwrap();
        assert_eq!(cmp.class, QueryClass::GeneralComplex);
        assert!(cmp.family_agrees);
        assert!(!cmp.refinement_agrees);
        assert!(!cmp.class.refinement_expected_to_agree());

        let single = parse_query("P((Y=0)[X=0] | X=1, Y=1)").unwrap();
        let cmp = compare_semantics(QueryTarget::Model(&m), &single, &caps).unwrap();
        assert_eq!(cmp.class, QueryClass::SingleAtom);
        assert!(cmp.family_agrees);
        assert!(cmp.refinement_agrees);

        let observational = parse_query("P(Y=1)").unwrap();
        let cmp = compare_semantics(QueryTarget::Model(&m), &observational, &caps).unwrap();
        assert_eq!(cmp.class, QueryClass::Observational);
        assert!(cmp.family_agrees && cmp.refinement_agrees);
        // Bounds collapse to a point on observational queries.
        let bounds = cmp
            .cells
            .iter()
            .find(|(t, _)| *t == SemanticsTag::Bounds)
            .and_then(|(_, r)| r.as_ref().ok())
            .unwrap();
        match bounds {
            EvalResult::Interval(lo, hi) => assert_eq!(lo, hi),
            other => panic!("unexpected {:?}", other),
        }
    }

    #[test]
    fn full_world_class_and_direct_scm_target() {
        let m = xy_model((1, 3), (2, 3));
        let caps = Caps::default();
        let q = parse_query("P((Y=0)[X=0] | U_X=1, X=1, Y=1)").unwrap();
        assert_eq!(
            QueryClass::classify(&q, m.signature()),
            QueryClass::BasicWithWorld
        );
        let cmp = compare_semantics(QueryTarget::Model(&m), &q, &caps).unwrap();
        assert!(cmp.family_agrees && cmp.refinement_agrees);
        // Bounds are not in the table when evidence mentions exogenous
        // variables.
        assert!(cmp.cells.iter().all(|(t, _)| *t != SemanticsTag::Bounds));

        // A deterministic SCM evaluated directly.
        let scm = crate::builder::ScmBuilder::new()
            .exogenous("U", &["0", "1"])
            .endogenous("Y", &["0", "1"])
            .edge("U", "Y")
            .prior("U", &[("0", (1, 4)), ("1", (3, 4))])
            .equation_fn("Y", |pa| pa.get("U").unwrap().to_string())
            .build()
            .unwrap();
        let q = parse_query("P((Y=1)[Y=1])").unwrap();
        assert_eq!(
            evaluate(QueryTarget::Scm(&scm), &q, SemanticsTag::ScmDirect, &caps).unwrap(),
            EvalResult::Point(ExactProb::one())
        );
        // Direct semantics requires a structural target.
        assert!(matches!(
            evaluate(QueryTarget::Model(&m), &q, SemanticsTag::ScmDirect, &caps),
            Err(Error::Unsupported(_))
        ));
    }
}
