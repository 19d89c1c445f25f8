//! Property tests for the query language.

use counterfact::assign::{Assignment, Atom};
use counterfact::query::{parse_query, CounterfactualQuery};
use proptest::prelude::*;

fn ident() -> impl Strategy<Value = String> {
    "[A-Za-z_][A-Za-z0-9_]{0,6}"
}

fn value() -> impl Strategy<Value = String> {
    "[A-Za-z0-9_][A-Za-z0-9_]{0,4}"
}

fn assignment(max_vars: usize) -> impl Strategy<Value = Assignment> {
    prop::collection::btree_map(ident(), value(), 1..=max_vars)
        .prop_map(|m| m.into_iter().collect())
}

/// Atoms as the grammar can express them: a plain term carries one
/// assignment, a bracketed term any nonempty target and intervention.
fn atom() -> impl Strategy<Value = Atom> {
    prop_oneof![
        (ident(), value())
            .prop_map(|(var, val)| { Atom::observational(Assignment::new().with(&var, &val)) }),
        (assignment(3), assignment(2))
            .prop_map(|(target, intervention)| Atom::counterfactual(target, intervention)),
    ]
}

fn query() -> impl Strategy<Value = CounterfactualQuery> {
    (
        prop::collection::vec(atom(), 1..=4),
        prop::option::of(assignment(3)),
    )
        .prop_map(|(atoms, given)| CounterfactualQuery { atoms, given })
}

proptest! {
    /// Printing and re-parsing reproduces the query exactly.
    #[test]
    fn printer_parser_round_trip(q in query()) {
        let printed = q.to_string();
        let reparsed = parse_query(&printed).unwrap();
        prop_assert_eq!(reparsed, q);
    }

    /// Whitespace never changes the parse.
    #[test]
    fn whitespace_insensitivity(q in query()) {
        let printed = q.to_string();
        let spaced: String = printed
            .chars()
            .flat_map(|c| if ",|([=".contains(c) { vec![' ', c, ' '] } else { vec![c] })
            .collect();
        prop_assert_eq!(parse_query(&spaced).unwrap(), q);
    }
}
