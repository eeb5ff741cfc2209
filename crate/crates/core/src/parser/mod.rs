//! Surface syntax: lexer, recursive-descent parser, semantic validation and
//! the canonical pretty-printer.
//!
//! ```text
//! document   := { "policy" name "=" policy ";" }
//! policy     := ruleblock | casestmt | name | decisionlit
//! ruleblock  := rule { ";" rule }
//! rule       := ("grant" | "deny") "if" cond
//! casestmt   := "case" "{" arm { arm } "}"
//! arm        := "[" guard ":" policy "]"
//! guard      := "true" | test { "&&" test }
//! test       := policy "eval" decisionlit
//! cond       := conj { "||" conj }
//! conj       := unary { "&&" unary }
//! unary      := "!" unary | "(" cond ")" | operand cmp operand
//! ```

mod grammar;
mod lexer;
mod pretty;
mod validate;

use std::fmt;

use crate::ast::{Condition, PolicyDocument, Span};

pub use grammar::RESERVED_IDENTIFIERS;
pub use lexer::{tokenize, Keyword, Op, Token, TokenKind};
pub use pretty::{pretty_print, print_condition, print_policy};
pub use validate::{validate_document, SemanticError, SemanticErrorKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub span: Span,
    pub message: String,
    /// What would have been accepted at `span`.
    pub expected: Vec<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.message)
    }
}

impl std::error::Error for ParseError {}

/// Parses a token stream into a document. No semantic checks.
pub fn parse_document(tokens: &[Token]) -> Result<PolicyDocument, ParseError> {
    grammar::Parser::new(tokens).document()
}

/// Tokenizes and parses `source`.
pub fn parse(source: &str) -> Result<PolicyDocument, ParseError> {
    parse_document(&tokenize(source)?)
}

/// Parses a standalone condition, e.g. a canonical atom string.
pub fn parse_condition(source: &str) -> Result<Condition, ParseError> {
    let tokens = tokenize(source)?;
    let mut p = grammar::Parser::new(&tokens);
    let c = p.condition()?;
    if !p.at_end() {
        let t = &tokens[tokens.len() - 1];
        return Err(ParseError {
            span: t.span,
            message: "trailing input after condition".into(),
            expected: vec!["end of input".into()],
        });
    }
    Ok(c)
}

/// Errors from [`load`]: either syntax or semantic problems.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FrontendError {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("{} semantic error(s); first: {}", .0.len(), .0[0])]
    Semantic(Vec<SemanticError>),
}

/// Parses and validates a `.frost` source.
pub fn load(source: &str) -> Result<PolicyDocument, FrontendError> {
    let doc = parse(source)?;
    validate_document(&doc).map_err(FrontendError::Semantic)?;
    Ok(doc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{Guard, Policy};
    use crate::decision::Decision;

    use crate::samples::DAUGHTER_DRIVE;

    const PRIORITY_SRC: &str = "policy P = grant if a == 1;\npolicy Q = deny if b == 1;\n\
        policy PQ = case { [P eval conflict : deny] [P eval undef : Q] [true : P] };";

    #[test]
    fn daughter_drive_parses_to_one_rule_with_six_atoms() {
        let doc = load(DAUGHTER_DRIVE).unwrap();
        let Policy::RuleBlock(rules) = doc.get("daughter_drive").unwrap() else {
            panic!("expected rule block");
        };
        assert_eq!(rules.len(), 1);
        let mut atoms = Vec::new();
        rules[0].condition.for_each_atom(&mut |a| atoms.push(a.canonical()));
        assert_eq!(atoms.len(), 6);
        assert_eq!(atoms[4], "localTime >= 0900");
        assert_eq!(atoms[5], "localTime <= 2000");
        assert_eq!(atoms[1], "subject == vehicle.owner.daughter");
    }

    #[test]
    fn priority_parses_to_three_arms() {
        let doc = load(PRIORITY_SRC).unwrap();
        let Policy::Case(arms) = doc.get("PQ").unwrap() else {
            panic!("expected case");
        };
        assert_eq!(arms.len(), 3);
        assert_eq!(
            arms[0].guard,
            Guard::Conj(vec![(Policy::reference("P"), Decision::Conflict)])
        );
        assert_eq!(arms[0].body, Policy::literal(Decision::Deny));
        assert_eq!(arms[1].body, Policy::reference("Q"));
        assert_eq!(arms[2].guard, Guard::True);
    }

    #[test]
    fn empty_case_is_rejected() {
        let err = parse("policy X = case { };").unwrap_err();
        assert!(err.expected.contains(&"`[`".to_string()));
        assert!(err.message.contains("at least one arm"));
    }

    #[test]
    fn multi_rule_blocks_and_statement_terminators() {
        let doc = parse("policy X = grant if a == 1; deny if b == 2; policy Y = grant;").unwrap();
        assert!(matches!(doc.get("X"), Some(Policy::RuleBlock(r)) if r.len() == 2));
        assert_eq!(doc.get("Y").unwrap().as_literal(), Some(Decision::Grant));
    }

    #[test]
    fn reserved_identifiers_are_not_writable() {
        assert!(parse("policy X = grant if TAUT == true;").is_err());
        assert!(parse("policy CONTRA = grant;").is_err());
    }

    #[test]
    fn literal_on_both_sides_is_rejected() {
        assert!(parse("policy X = grant if 1 == 2;").is_err());
    }

    #[test]
    fn validation_examples() {
        assert!(load("policy P = grant if a == 1; policy Q = case { [P eval undef : P] };").is_ok());

        let errs = validate_document(&parse("policy A = B;").unwrap()).unwrap_err();
        assert!(matches!(
            &errs[0].kind,
            SemanticErrorKind::UnresolvedRef { target, .. } if target == "B"
        ));

        let errs = validate_document(&parse("policy A = B; policy B = A;").unwrap()).unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(
            errs[0].kind,
            SemanticErrorKind::Cycle(vec!["A".to_string(), "B".to_string()])
        );
    }

    #[test]
    fn validation_reports_all_problems() {
        let doc = parse(
            "policy A = grant if name < \"bob\"; policy A = deny; policy C = case { [Z eval grant : C] };",
        )
        .unwrap();
        let errs = validate_document(&doc).unwrap_err();
        let kinds: Vec<_> = errs.iter().map(|e| &e.kind).collect();
        assert!(kinds.iter().any(|k| matches!(k, SemanticErrorKind::DuplicateName(_))));
        assert!(kinds
            .iter()
            .any(|k| matches!(k, SemanticErrorKind::OrderingOnUnorderable { kind: "string", .. })));
        assert!(kinds.iter().any(|k| matches!(k, SemanticErrorKind::UnresolvedRef { .. })));
        assert!(kinds.iter().any(|k| matches!(k, SemanticErrorKind::Cycle(_))));
        for e in &errs {
            assert!(e.span.line >= 1);
        }
    }

    #[test]
    fn pretty_print_round_trips_samples() {
        for src in [DAUGHTER_DRIVE, PRIORITY_SRC] {
            let doc = load(src).unwrap();
            let text = pretty_print(&doc);
            assert_eq!(parse(&text).unwrap(), doc, "{text}");
            assert_eq!(pretty_print(&parse(&text).unwrap()), text);
        }
    }

    #[test]
    fn literals_print_in_canonical_form() {
        let doc = parse("policy A = conflict; policy B = case { [A eval conflict : undef] };").unwrap();
        let text = pretty_print(&doc);
        assert_eq!(
            text,
            "policy A =\n    conflict;\npolicy B = case {\n    [A eval conflict : undef]\n};\n"
        );
    }

    #[test]
    fn condition_grouping_survives_printing() {
        for src in [
            "a == 1 || b == 2 && c == 3",
            "(a == 1 || b == 2) && c == 3",
            "a == 1 && (b == 2 && c == 3)",
            "!(a == 1 || b == 2)",
            "!!a == 1",
        ] {
            let c = parse_condition(src).unwrap();
            assert_eq!(parse_condition(&print_condition(&c)).unwrap(), c, "{src}");
        }
    }

    #[test]
    fn parse_error_spans_stay_inside_input() {
        for src in ["policy", "policy X = ", "policy X = grant if", "policy X = case { [", "x"] {
            let err = parse(src).unwrap_err();
            assert!(err.span.offset + err.span.len <= src.len(), "{src}: {err:?}");
        }
    }
}
