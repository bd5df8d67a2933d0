//! Recursive-descent parser for formulas and sequents.
//!
//! ```text
//! sequent  := formulas? "|-" formulas?
//! formulas := formula ("," formula)*
//! formula  := disj
//! disj     := conj ("|" conj)*
//! conj     := unary ("&" unary)*
//! unary    := ("~" | "!" | "[]" | "<>") unary | atom | "(" formula ")"
//! atom     := [a-z][a-z0-9_]*
//! ```

use thiserror::Error;

use super::{Formula, FormulaSet, Sequent};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unknown token {found:?} at position {pos}")]
    UnknownToken { pos: usize, found: char },
    #[error("syntax error at position {pos}: expected {expected}, found {found}")]
    Syntax {
        pos: usize,
        expected: &'static str,
        found: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    Not,
    Box,
    Diamond,
    And,
    Or,
    Turnstile,
    Comma,
    LParen,
    RParen,
    End,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Ident(name) => format!("atom `{name}`"),
            Token::Not => "`~`".into(),
            Token::Box => "`[]`".into(),
            Token::Diamond => "`<>`".into(),
            Token::And => "`&`".into(),
            Token::Or => "`|`".into(),
            Token::Turnstile => "`|-`".into(),
            Token::Comma => "`,`".into(),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
            Token::End => "end of input".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        let c = bytes[pos];
        if c.is_ascii_whitespace() {
            pos += 1;
            continue;
        }
        let next = bytes.get(pos + 1).copied();
        let (token, width) = match c {
            b'~' | b'!' => (Token::Not, 1),
            b'&' => (Token::And, 1),
            b',' => (Token::Comma, 1),
            b'(' => (Token::LParen, 1),
            b')' => (Token::RParen, 1),
            b'|' if next == Some(b'-') => (Token::Turnstile, 2),
            b'|' => (Token::Or, 1),
            b'[' if next == Some(b']') => (Token::Box, 2),
            b'<' if next == Some(b'>') => (Token::Diamond, 2),
            b'a'..=b'z' => {
                let end = bytes[pos..]
                    .iter()
                    .position(|b| !(b.is_ascii_lowercase() || b.is_ascii_digit() || *b == b'_'))
                    .map_or(bytes.len(), |off| pos + off);
                (Token::Ident(text[pos..end].to_string()), end - pos)
            }
            _ => {
                let found = text[pos..].chars().next().unwrap_or('?');
                return Err(ParseError::UnknownToken { pos, found });
            }
        };
        tokens.push((pos, token));
        pos += width;
    }
    tokens.push((text.len(), Token::End));
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    cursor: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self, ParseError> {
        Ok(Parser {
            tokens: tokenize(text)?,
            cursor: 0,
        })
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.cursor].1
    }

    fn pos(&self) -> usize {
        self.tokens[self.cursor].0
    }

    fn bump(&mut self) -> Token {
        let token = self.tokens[self.cursor].1.clone();
        if self.cursor + 1 < self.tokens.len() {
            self.cursor += 1;
        }
        token
    }

    fn error(&self, expected: &'static str) -> ParseError {
        ParseError::Syntax {
            pos: self.pos(),
            expected,
            found: self.peek().describe(),
        }
    }

    fn expect(&mut self, token: Token, expected: &'static str) -> Result<(), ParseError> {
        if *self.peek() == token {
            self.bump();
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.conj()?;
        while *self.peek() == Token::Or {
            self.bump();
            let right = self.conj()?;
            left = Formula::or(left, right);
        }
        Ok(left)
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.unary()?;
        while *self.peek() == Token::And {
            self.bump();
            let right = self.unary()?;
            left = Formula::and(left, right);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Token::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Token::Box => {
                self.bump();
                Ok(Formula::boxed(self.unary()?))
            }
            Token::Diamond => {
                self.bump();
                Ok(Formula::diamond(self.unary()?))
            }
            Token::Ident(name) => {
                self.bump();
                Ok(Formula::atom(&name))
            }
            Token::LParen => {
                self.bump();
                let inner = self.formula()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(inner)
            }
            _ => Err(self.error("a formula")),
        }
    }

    fn formulas_until(&mut self, stop: &Token) -> Result<FormulaSet, ParseError> {
        let mut out = FormulaSet::new();
        if self.peek() == stop {
            return Ok(out);
        }
        out.insert(self.formula()?);
        while *self.peek() == Token::Comma {
            self.bump();
            out.insert(self.formula()?);
        }
        Ok(out)
    }

    fn finish(&self) -> Result<(), ParseError> {
        if *self.peek() == Token::End {
            Ok(())
        } else {
            Err(self.error("end of input"))
        }
    }
}

/// Parses a single formula, desugaring `|` and `<>`.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let mut parser = Parser::new(text)?;
    let f = parser.formula()?;
    parser.finish()?;
    Ok(f)
}

/// Parses `G1, ..., Gn |- D1, ..., Dm`; either side may be empty.
pub fn parse_sequent(text: &str) -> Result<Sequent, ParseError> {
    let mut parser = Parser::new(text)?;
    let antecedent = parser.formulas_until(&Token::Turnstile)?;
    parser.expect(Token::Turnstile, "`|-`")?;
    let succedent = parser.formulas_until(&Token::End)?;
    parser.finish()?;
    Ok(Sequent::new(antecedent, succedent))
}
