use std::fmt;

use crate::ast::{Decimal, Span, TimeOfDay};

use super::ParseError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Keyword {
    Grant,
    Deny,
    Conflict,
    Undef,
    If,
    Case,
    Eval,
    True,
    False,
    Policy,
}

impl Keyword {
    fn lookup(s: &str) -> Option<Keyword> {
        Some(match s {
            "grant" => Keyword::Grant,
            "deny" => Keyword::Deny,
            "conflict" => Keyword::Conflict,
            "undef" => Keyword::Undef,
            "if" => Keyword::If,
            "case" => Keyword::Case,
            "eval" => Keyword::Eval,
            "true" => Keyword::True,
            "false" => Keyword::False,
            "policy" => Keyword::Policy,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::Grant => "grant",
            Keyword::Deny => "deny",
            Keyword::Conflict => "conflict",
            Keyword::Undef => "undef",
            Keyword::If => "if",
            Keyword::Case => "case",
            Keyword::Eval => "eval",
            Keyword::True => "true",
            Keyword::False => "false",
            Keyword::Policy => "policy",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Op {
    EqEq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    AndAnd,
    OrOr,
    Bang,
}

impl Op {
    pub fn as_str(self) -> &'static str {
        match self {
            Op::EqEq => "==",
            Op::NotEq => "!=",
            Op::Lt => "<",
            Op::Le => "<=",
            Op::Gt => ">",
            Op::Ge => ">=",
            Op::AndAnd => "&&",
            Op::OrOr => "||",
            Op::Bang => "!",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Keyword(Keyword),
    Ident(String),
    Int(i64),
    Decimal(Decimal),
    Str(String),
    Time(TimeOfDay),
    Op(Op),
    /// One of `{ } [ ] ( ) : = ; .`
    Punct(char),
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Keyword(k) => write!(f, "`{}`", k.as_str()),
            TokenKind::Ident(s) => write!(f, "identifier `{s}`"),
            TokenKind::Int(v) => write!(f, "integer {v}"),
            TokenKind::Decimal(v) => write!(f, "decimal {v}"),
            TokenKind::Str(_) => f.write_str("string literal"),
            TokenKind::Time(t) => write!(f, "time {t}"),
            TokenKind::Op(o) => write!(f, "`{}`", o.as_str()),
            TokenKind::Punct(c) => write!(f, "`{c}`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    pub span: Span,
}

struct Lexer<'s> {
    src: &'s str,
    pos: usize,
    line: usize,
    col: usize,
}

/// Splits `source` into tokens. Whitespace and `//` line comments are
/// skipped; everything else must form a token.
pub fn tokenize(source: &str) -> Result<Vec<Token>, ParseError> {
    let mut lx = Lexer {
        src: source,
        pos: 0,
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();
    while let Some(tok) = lx.next_token()? {
        out.push(tok);
    }
    Ok(out)
}

impl Lexer<'_> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.src[self.pos..].chars().nth(n)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn here(&self) -> Span {
        Span {
            line: self.line,
            column: self.col,
            offset: self.pos,
            len: 0,
        }
    }

    fn error(&self, start: Span, message: impl Into<String>) -> ParseError {
        let len = self.pos.saturating_sub(start.offset).max(1);
        let len = len.min(self.src.len().saturating_sub(start.offset));
        ParseError {
            span: Span { len, ..start },
            message: message.into(),
            expected: Vec::new(),
        }
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('/') if self.peek_at(1) == Some('/') => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => return,
            }
        }
    }

    fn next_token(&mut self) -> Result<Option<Token>, ParseError> {
        self.skip_trivia();
        let start = self.here();
        let Some(c) = self.peek() else {
            return Ok(None);
        };
        let kind = match c {
            c if c.is_ascii_alphabetic() || c == '_' => {
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
                    self.bump();
                }
                let word = &self.src[start.offset..self.pos];
                match Keyword::lookup(word) {
                    Some(k) => TokenKind::Keyword(k),
                    None => TokenKind::Ident(word.to_string()),
                }
            }
            '0'..='9' => self.number(start, false)?,
            '+' | '-' if matches!(self.peek_at(1), Some('0'..='9')) => {
                self.bump();
                self.number(start, true)?
            }
            '"' => self.string(start)?,
            '=' if self.peek_at(1) == Some('=') => self.op2(Op::EqEq),
            '!' if self.peek_at(1) == Some('=') => self.op2(Op::NotEq),
            '<' if self.peek_at(1) == Some('=') => self.op2(Op::Le),
            '>' if self.peek_at(1) == Some('=') => self.op2(Op::Ge),
            '&' if self.peek_at(1) == Some('&') => self.op2(Op::AndAnd),
            '|' if self.peek_at(1) == Some('|') => self.op2(Op::OrOr),
            '<' => self.op1(Op::Lt),
            '>' => self.op1(Op::Gt),
            '!' => self.op1(Op::Bang),
            '{' | '}' | '[' | ']' | '(' | ')' | ':' | '=' | ';' | '.' => {
                self.bump();
                TokenKind::Punct(c)
            }
            other => {
                self.bump();
                return Err(self.error(start, format!("illegal character `{other}`")));
            }
        };
        let lexeme = self.src[start.offset..self.pos].to_string();
        Ok(Some(Token {
            kind,
            span: Span {
                len: lexeme.len(),
                ..start
            },
            lexeme,
        }))
    }

    fn op1(&mut self, op: Op) -> TokenKind {
        self.bump();
        TokenKind::Op(op)
    }

    fn op2(&mut self, op: Op) -> TokenKind {
        self.bump();
        self.bump();
        TokenKind::Op(op)
    }

    /// Unsigned four-digit numbers are `HHMM` times; a sign forces a number.
    fn number(&mut self, start: Span, signed: bool) -> Result<TokenKind, ParseError> {
        let digits_start = self.pos;
        while matches!(self.peek(), Some('0'..='9')) {
            self.bump();
        }
        let int_digits = self.pos - digits_start;
        let is_decimal = self.peek() == Some('.') && matches!(self.peek_at(1), Some('0'..='9'));
        if is_decimal {
            self.bump();
            while matches!(self.peek(), Some('0'..='9')) {
                self.bump();
            }
        }
        if matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
            self.bump();
            return Err(self.error(start, "malformed numeric literal"));
        }
        let text = &self.src[start.offset..self.pos];
        if is_decimal {
            return text
                .parse::<f64>()
                .ok()
                .and_then(Decimal::new)
                .map(TokenKind::Decimal)
                .ok_or_else(|| self.error(start, "malformed decimal literal"));
        }
        if !signed && int_digits == 4 {
            return TimeOfDay::parse_hhmm(text)
                .map(TokenKind::Time)
                .ok_or_else(|| {
                    self.error(start, format!("malformed time literal `{text}` (expected HHMM)"))
                });
        }
        text.parse::<i64>()
            .map(TokenKind::Int)
            .map_err(|_| self.error(start, format!("integer literal `{text}` out of range")))
    }

    fn string(&mut self, start: Span) -> Result<TokenKind, ParseError> {
        self.bump();
        let mut value = String::new();
        loop {
            match self.bump() {
                None | Some('\n') => return Err(self.error(start, "unterminated string literal")),
                Some('"') => break,
                Some('\\') => match self.bump() {
                    Some('"') => value.push('"'),
                    Some('\\') => value.push('\\'),
                    Some('n') => value.push('\n'),
                    Some('t') => value.push('\t'),
                    Some('r') => value.push('\r'),
                    _ => return Err(self.error(start, "invalid escape in string literal")),
                },
                Some(c) => value.push(c),
            }
        }
        Ok(TokenKind::Str(value))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        tokenize(src).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn time_window_tokens() {
        assert_eq!(
            kinds("0900 <= localTime"),
            vec![
                TokenKind::Time(TimeOfDay::from_hm(9, 0).unwrap()),
                TokenKind::Op(Op::Le),
                TokenKind::Ident("localTime".into()),
            ]
        );
    }

    #[test]
    fn empty_and_comment_only_sources() {
        assert!(tokenize("").unwrap().is_empty());
        assert!(tokenize("  // nothing here\n\t").unwrap().is_empty());
    }

    #[test]
    fn illegal_character_is_reported_on_line_one() {
        let err = tokenize("@@").unwrap_err();
        assert_eq!(err.span.line, 1);
        assert_eq!(err.span.column, 1);
        assert!(!err.message.is_empty());
    }

    #[test]
    fn maximal_munch() {
        assert_eq!(kinds("<="), vec![TokenKind::Op(Op::Le)]);
        assert_eq!(kinds("< ="), vec![TokenKind::Op(Op::Lt), TokenKind::Punct('=')]);
        assert_eq!(kinds("a==b"), vec![
            TokenKind::Ident("a".into()),
            TokenKind::Op(Op::EqEq),
            TokenKind::Ident("b".into()),
        ]);
    }

    #[test]
    fn numeric_literals() {
        assert_eq!(kinds("42"), vec![TokenKind::Int(42)]);
        assert_eq!(kinds("-7"), vec![TokenKind::Int(-7)]);
        assert_eq!(kinds("+2000"), vec![TokenKind::Int(2000)]);
        assert_eq!(kinds("2.5"), vec![TokenKind::Decimal(Decimal::new(2.5).unwrap())]);
        assert_eq!(kinds("12345"), vec![TokenKind::Int(12345)]);
        assert!(tokenize("2575").is_err());
        assert!(tokenize("12ab").is_err());
        assert!(tokenize("99999999999999999999").is_err());
    }

    #[test]
    fn strings_and_escapes() {
        assert_eq!(kinds(r#""a\"b""#), vec![TokenKind::Str("a\"b".into())]);
        assert!(tokenize("\"open").is_err());
    }

    #[test]
    fn lexemes_and_trivia_reconstruct_the_source() {
        let src = "policy P = // c\n  grant if (a.b <= 0900) && !c == \"x y\";\n";
        let toks = tokenize(src).unwrap();
        let mut rebuilt = String::new();
        let mut cursor = 0;
        for t in &toks {
            rebuilt.push_str(&src[cursor..t.span.offset]);
            assert_eq!(&src[t.span.offset..t.span.offset + t.span.len], t.lexeme);
            rebuilt.push_str(&t.lexeme);
            cursor = t.span.offset + t.span.len;
        }
        rebuilt.push_str(&src[cursor..]);
        assert_eq!(rebuilt, src);
        assert!(src[..toks[0].span.offset].trim().is_empty());
    }
}
