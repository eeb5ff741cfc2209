use crate::ast::{
    AttrPath, Atom, CaseArm, CmpOp, Condition, Definition, Guard, Operand, Policy, PolicyDocument,
    Rule, Span, Value,
};
use crate::decision::Decision;

use super::lexer::{Keyword, Op, Token, TokenKind};
use super::ParseError;

/// Identifiers reserved for the built-in constant atoms.
pub const RESERVED_IDENTIFIERS: [&str; 2] = ["TAUT", "CONTRA"];

pub(super) struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
    eof: Span,
}

impl<'t> Parser<'t> {
    pub(super) fn new(tokens: &'t [Token]) -> Self {
        let eof = tokens
            .last()
            .map(|t| Span {
                line: t.span.line,
                column: t.span.column + t.lexeme.chars().count(),
                offset: t.span.offset + t.span.len,
                len: 0,
            })
            .unwrap_or(Span {
                line: 1,
                column: 1,
                offset: 0,
                len: 0,
            });
        Parser {
            tokens,
            pos: 0,
            eof,
        }
    }

    fn peek(&self) -> Option<&'t TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn peek_at(&self, n: usize) -> Option<&'t TokenKind> {
        self.tokens.get(self.pos + n).map(|t| &t.kind)
    }

    fn span(&self) -> Span {
        self.tokens.get(self.pos).map(|t| t.span).unwrap_or(self.eof)
    }

    fn advance(&mut self) -> Option<&'t Token> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        let found = match self.peek() {
            Some(k) => k.to_string(),
            None => "end of input".to_string(),
        };
        ParseError {
            span: self.span(),
            message: format!("unexpected {found}, expected {}", expected.join(" or ")),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn at_keyword(&self, k: Keyword) -> bool {
        self.peek() == Some(&TokenKind::Keyword(k))
    }

    fn at_punct(&self, c: char) -> bool {
        self.peek() == Some(&TokenKind::Punct(c))
    }

    fn at_op(&self, op: Op) -> bool {
        self.peek() == Some(&TokenKind::Op(op))
    }

    fn expect_keyword(&mut self, k: Keyword) -> Result<(), ParseError> {
        if self.at_keyword(k) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(&[&format!("`{}`", k.as_str())]))
        }
    }

    fn expect_punct(&mut self, c: char) -> Result<(), ParseError> {
        if self.at_punct(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(&[&format!("`{c}`")]))
        }
    }

    pub(super) fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn identifier(&mut self) -> Result<(String, Span), ParseError> {
        match self.peek() {
            Some(TokenKind::Ident(name)) => {
                if RESERVED_IDENTIFIERS.contains(&name.as_str()) {
                    return Err(ParseError {
                        span: self.span(),
                        message: format!("`{name}` is reserved"),
                        expected: vec!["identifier".into()],
                    });
                }
                let span = self.span();
                self.pos += 1;
                Ok((name.clone(), span))
            }
            _ => Err(self.unexpected(&["identifier"])),
        }
    }

    pub(super) fn document(&mut self) -> Result<PolicyDocument, ParseError> {
        let mut doc = PolicyDocument::new();
        while !self.at_end() {
            self.expect_keyword(Keyword::Policy)?;
            let (name, span) = self.identifier()?;
            self.expect_punct('=')?;
            let policy = self.policy()?;
            self.expect_punct(';')?;
            doc.definitions.push(Definition { name, policy, span });
        }
        Ok(doc)
    }

    fn decision_literal(&mut self) -> Result<Decision, ParseError> {
        let d = match self.peek() {
            Some(TokenKind::Keyword(Keyword::Grant)) => Decision::Grant,
            Some(TokenKind::Keyword(Keyword::Deny)) => Decision::Deny,
            Some(TokenKind::Keyword(Keyword::Conflict)) => Decision::Conflict,
            Some(TokenKind::Keyword(Keyword::Undef)) => Decision::Undef,
            _ => return Err(self.unexpected(&["`grant`", "`deny`", "`conflict`", "`undef`"])),
        };
        self.pos += 1;
        Ok(d)
    }

    fn rule_starts_here(&self, offset: usize) -> bool {
        matches!(
            self.peek_at(offset),
            Some(TokenKind::Keyword(Keyword::Grant | Keyword::Deny))
        ) && self.peek_at(offset + 1) == Some(&TokenKind::Keyword(Keyword::If))
    }

    pub(super) fn policy(&mut self) -> Result<Policy, ParseError> {
        match self.peek() {
            Some(TokenKind::Keyword(Keyword::Case)) => self.case_statement(),
            Some(TokenKind::Keyword(Keyword::Grant | Keyword::Deny)) if self.rule_starts_here(0) => {
                self.rule_block()
            }
            Some(TokenKind::Keyword(
                Keyword::Grant | Keyword::Deny | Keyword::Conflict | Keyword::Undef,
            )) => Ok(Policy::literal(self.decision_literal()?)),
            Some(TokenKind::Ident(_)) => Ok(Policy::Ref(self.identifier()?.0)),
            _ => Err(self.unexpected(&[
                "`grant`",
                "`deny`",
                "`conflict`",
                "`undef`",
                "`case`",
                "policy name",
            ])),
        }
    }

    fn rule_block(&mut self) -> Result<Policy, ParseError> {
        let mut rules = vec![self.rule()?];
        while self.at_punct(';') && self.rule_starts_here(1) {
            self.pos += 1;
            rules.push(self.rule()?);
        }
        Ok(Policy::RuleBlock(rules))
    }

    fn rule(&mut self) -> Result<Rule, ParseError> {
        let effect = if self.at_keyword(Keyword::Grant) {
            crate::ast::Effect::Grant
        } else if self.at_keyword(Keyword::Deny) {
            crate::ast::Effect::Deny
        } else {
            return Err(self.unexpected(&["`grant`", "`deny`"]));
        };
        self.pos += 1;
        self.expect_keyword(Keyword::If)?;
        let condition = self.condition()?;
        Ok(Rule { effect, condition })
    }

    fn case_statement(&mut self) -> Result<Policy, ParseError> {
        self.expect_keyword(Keyword::Case)?;
        self.expect_punct('{')?;
        let mut arms = Vec::new();
        while self.at_punct('[') {
            self.pos += 1;
            let guard = self.guard()?;
            self.expect_punct(':')?;
            let body = self.policy()?;
            self.expect_punct(']')?;
            arms.push(CaseArm { guard, body });
        }
        if arms.is_empty() {
            let mut err = self.unexpected(&["`[`"]);
            err.message = format!("case statement needs at least one arm; {}", err.message);
            return Err(err);
        }
        self.expect_punct('}')?;
        Ok(Policy::Case(arms))
    }

    fn guard(&mut self) -> Result<Guard, ParseError> {
        if self.at_keyword(Keyword::True) {
            self.pos += 1;
            return Ok(Guard::True);
        }
        let mut conj = vec![self.guard_test()?];
        while self.at_op(Op::AndAnd) {
            self.pos += 1;
            conj.push(self.guard_test()?);
        }
        Ok(Guard::Conj(conj))
    }

    fn guard_test(&mut self) -> Result<(Policy, Decision), ParseError> {
        let policy = self.policy()?;
        self.expect_keyword(Keyword::Eval)?;
        Ok((policy, self.decision_literal()?))
    }

    pub(super) fn condition(&mut self) -> Result<Condition, ParseError> {
        let mut lhs = self.conjunction()?;
        while self.at_op(Op::OrOr) {
            self.pos += 1;
            lhs = Condition::or(lhs, self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Condition, ParseError> {
        let mut lhs = self.unary()?;
        while self.at_op(Op::AndAnd) {
            self.pos += 1;
            lhs = Condition::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Condition, ParseError> {
        if self.at_op(Op::Bang) {
            self.pos += 1;
            return Ok(Condition::negate(self.unary()?));
        }
        if self.at_punct('(') {
            self.pos += 1;
            let inner = self.condition()?;
            self.expect_punct(')')?;
            return Ok(inner);
        }
        self.atom().map(Condition::Atom)
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        let start = self.span();
        let lhs = self.operand()?;
        let op = match self.peek() {
            Some(TokenKind::Op(Op::EqEq)) => CmpOp::Eq,
            Some(TokenKind::Op(Op::NotEq)) => CmpOp::Ne,
            Some(TokenKind::Op(Op::Lt)) => CmpOp::Lt,
            Some(TokenKind::Op(Op::Le)) => CmpOp::Le,
            Some(TokenKind::Op(Op::Gt)) => CmpOp::Gt,
            Some(TokenKind::Op(Op::Ge)) => CmpOp::Ge,
            _ => return Err(self.unexpected(&["`==`", "`!=`", "`<`", "`<=`", "`>`", "`>=`"])),
        };
        self.pos += 1;
        let rhs = self.operand()?;
        match (lhs, rhs) {
            (Operand::Path(lhs), rhs) => Ok(Atom { lhs, op, rhs }),
            // `0900 <= localTime` is stored as `localTime >= 0900`.
            (lit @ Operand::Literal(_), Operand::Path(rhs)) => Ok(Atom {
                lhs: rhs,
                op: op.flipped(),
                rhs: lit,
            }),
            (Operand::Literal(_), Operand::Literal(_)) => Err(ParseError {
                span: start,
                message: "comparison needs an attribute path on at least one side".into(),
                expected: vec!["attribute path".into()],
            }),
        }
    }

    fn operand(&mut self) -> Result<Operand, ParseError> {
        let lit = match self.peek() {
            Some(TokenKind::Ident(_)) => return self.path().map(Operand::Path),
            Some(TokenKind::Int(v)) => Value::Int(*v),
            Some(TokenKind::Decimal(v)) => Value::Decimal(*v),
            Some(TokenKind::Str(s)) => Value::Str(s.clone()),
            Some(TokenKind::Time(t)) => Value::Time(*t),
            Some(TokenKind::Keyword(Keyword::True)) => Value::Bool(true),
            Some(TokenKind::Keyword(Keyword::False)) => Value::Bool(false),
            _ => return Err(self.unexpected(&["attribute path", "literal"])),
        };
        self.advance();
        Ok(Operand::Literal(lit))
    }

    fn path(&mut self) -> Result<AttrPath, ParseError> {
        let mut segments = vec![self.identifier()?.0];
        while self.at_punct('.') {
            self.pos += 1;
            segments.push(self.identifier()?.0);
        }
        Ok(AttrPath::new(segments).expect("lexer only produces identifier segments"))
    }
}
