//! Infix expression parser producing [`Tree`]s over declared symbols.
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' exponent)?
//! exponent:= '-'? INT | '(' '-'? INT ')'
//! atom    := NUMBER | NAME | NAME '(' sum ')' | '(' sum ')'
//! ```

use std::collections::BTreeSet;

use num_bigint::BigInt;
use varseq_core::expr::{KernelKind, Tree, PI_NAME};
use varseq_core::{JetVar, MultiIndex, Rational};

/// Failure inside one expression, located by byte offset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyntaxError {
    pub offset: usize,
    pub message: String,
    /// Semantic errors (undeclared names, bad suffixes) as opposed to grammar errors.
    pub semantic: bool,
}

impl SyntaxError {
    fn grammar(offset: usize, message: impl Into<String>) -> Self {
        SyntaxError { offset, message: message.into(), semantic: false }
    }

    fn semantic(offset: usize, message: impl Into<String>) -> Self {
        SyntaxError { offset, message: message.into(), semantic: true }
    }
}

/// Names visible to expressions.
#[derive(Clone, Debug)]
pub struct Scope {
    pub base: Vec<String>,
    pub fields: Vec<String>,
    pub params: BTreeSet<String>,
}

impl Scope {
    fn resolve(&self, name: &str, offset: usize) -> Result<JetVar, SyntaxError> {
        if let Some(mu) = self.base.iter().position(|b| b == name) {
            return Ok(JetVar::Base(mu as u8));
        }
        if self.params.contains(name) || name == PI_NAME {
            return Ok(JetVar::param(name));
        }
        if let Some(a) = self.fields.iter().position(|f| f == name) {
            return Ok(JetVar::field(a as u8, &[]));
        }
        if let Some((head, suffix)) = name.split_once('_') {
            if let Some(a) = self.fields.iter().position(|f| f == head) {
                let index = self.derivative_suffix(suffix).ok_or_else(|| {
                    SyntaxError::semantic(offset, format!("`{suffix}` is not a sequence of base coordinates in `{name}`"))
                })?;
                return Ok(JetVar::Field(a as u8, MultiIndex::new(&index)));
            }
        }
        Err(SyntaxError::semantic(offset, format!("undeclared symbol `{name}`")))
    }

    /// Splits `suffix` into base coordinate names, preferring longer names.
    fn derivative_suffix(&self, suffix: &str) -> Option<Vec<u8>> {
        if suffix.is_empty() {
            return Some(Vec::new());
        }
        let mut order: Vec<(usize, &String)> = self.base.iter().enumerate().collect();
        order.sort_by_key(|(_, b)| std::cmp::Reverse(b.len()));
        for (mu, b) in order {
            if let Some(rest) = suffix.strip_prefix(b.as_str()) {
                if let Some(mut tail) = self.derivative_suffix(rest) {
                    tail.insert(0, mu as u8);
                    return Some(tail);
                }
            }
        }
        None
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Name(String),
    Op(char),
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl Lexer<'_> {
    fn next(&mut self) -> Result<(usize, Tok), SyntaxError> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(&c) = bytes.get(self.pos) else {
            return Ok((start, Tok::End));
        };
        if c.is_ascii_digit() || c == b'.' {
            while self.pos < bytes.len() && (bytes[self.pos].is_ascii_digit() || bytes[self.pos] == b'.') {
                self.pos += 1;
            }
            let text = &self.src[start..self.pos];
            return decimal(text).map(|r| (start, Tok::Num(r))).ok_or_else(|| {
                SyntaxError::grammar(start, format!("malformed number `{text}`"))
            });
        }
        if c.is_ascii_alphabetic() {
            while self.pos < bytes.len() && (bytes[self.pos].is_ascii_alphanumeric() || bytes[self.pos] == b'_') {
                self.pos += 1;
            }
            return Ok((start, Tok::Name(self.src[start..self.pos].to_string())));
        }
        if "+-*/^()".contains(c as char) {
            self.pos += 1;
            return Ok((start, Tok::Op(c as char)));
        }
        let ch = self.src[start..].chars().next().unwrap_or('?');
        Err(SyntaxError::grammar(start, format!("unexpected character `{ch}`")))
    }
}

/// Exact value of a decimal literal such as `12`, `0.25` or `3.`.
fn decimal(text: &str) -> Option<Rational> {
    let (int, frac) = text.split_once('.').unwrap_or((text, ""));
    if int.is_empty() && frac.is_empty() || frac.contains('.') {
        return None;
    }
    let digits = format!("{int}{frac}");
    let numer: BigInt = digits.parse().ok()?;
    let denom = num_traits::pow(BigInt::from(10), frac.len());
    Some(Rational::new(numer, denom))
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    peeked: (usize, Tok),
    scope: &'a Scope,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, scope: &'a Scope) -> Result<Self, SyntaxError> {
        let mut lexer = Lexer { src, pos: 0 };
        let peeked = lexer.next()?;
        Ok(Parser { lexer, peeked, scope })
    }

    fn bump(&mut self) -> Result<(usize, Tok), SyntaxError> {
        let next = self.lexer.next()?;
        Ok(std::mem::replace(&mut self.peeked, next))
    }

    fn eat(&mut self, op: char) -> Result<bool, SyntaxError> {
        if self.peeked.1 == Tok::Op(op) {
            self.bump()?;
            return Ok(true);
        }
        Ok(false)
    }

    fn expect(&mut self, op: char) -> Result<(), SyntaxError> {
        if self.eat(op)? {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{op}`")))
        }
    }

    fn unexpected(&self, wanted: &str) -> SyntaxError {
        let found = match &self.peeked.1 {
            Tok::Num(r) => format!("number `{r}`"),
            Tok::Name(n) => format!("`{n}`"),
            Tok::Op(c) => format!("`{c}`"),
            Tok::End => "end of expression".to_string(),
        };
        SyntaxError::grammar(self.peeked.0, format!("expected {wanted}, found {found}"))
    }

    fn sum(&mut self) -> Result<Tree, SyntaxError> {
        let mut terms = vec![self.product()?];
        loop {
            if self.eat('+')? {
                terms.push(self.product()?);
            } else if self.eat('-')? {
                terms.push(Tree::Neg(Box::new(self.product()?)));
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { Tree::Add(terms) })
    }

    fn product(&mut self) -> Result<Tree, SyntaxError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*')? {
                let rhs = self.unary()?;
                acc = match acc {
                    Tree::Mul(mut fs) => {
                        fs.push(rhs);
                        Tree::Mul(fs)
                    }
                    other => Tree::Mul(vec![other, rhs]),
                };
            } else if self.eat('/')? {
                acc = Tree::Div(Box::new(acc), Box::new(self.unary()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Tree, SyntaxError> {
        if self.eat('-')? {
            return Ok(Tree::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Tree, SyntaxError> {
        let base = self.atom()?;
        if !self.eat('^')? {
            return Ok(base);
        }
        let paren = self.eat('(')?;
        let negative = self.eat('-')?;
        let at = self.peeked.0;
        let k = match self.bump()?.1 {
            Tok::Num(r) if r.is_integer() => r.to_integer(),
            _ => return Err(SyntaxError::grammar(at, "exponent must be an integer literal")),
        };
        let k: i32 = i32::try_from(k).map_err(|_| SyntaxError::grammar(at, "exponent out of range"))?;
        if paren {
            self.expect(')')?;
        }
        Ok(Tree::Pow(Box::new(base), if negative { -k } else { k }))
    }

    fn atom(&mut self) -> Result<Tree, SyntaxError> {
        let (at, tok) = self.peeked.clone();
        match tok {
            Tok::Num(r) => {
                self.bump()?;
                Ok(Tree::Num(r))
            }
            Tok::Op('(') => {
                self.bump()?;
                let inner = self.sum()?;
                self.expect(')')?;
                Ok(inner)
            }
            Tok::Name(name) => {
                self.bump()?;
                let kind = match name.as_str() {
                    "sin" => Some(KernelKind::Sin),
                    "cos" => Some(KernelKind::Cos),
                    "exp" => Some(KernelKind::Exp),
                    _ => None,
                };
                match kind {
                    Some(kind) => {
                        self.expect('(')?;
                        let arg = self.sum()?;
                        self.expect(')')?;
                        Ok(Tree::Call(kind, Box::new(arg)))
                    }
                    None => Ok(Tree::Var(self.scope.resolve(&name, at)?)),
                }
            }
            _ => Err(self.unexpected("a number, name or `(`")),
        }
    }
}

/// Parses one expression into a syntax tree.
pub fn parse_tree(src: &str, scope: &Scope) -> Result<Tree, SyntaxError> {
    let mut p = Parser::new(src, scope)?;
    let tree = p.sum()?;
    if p.peeked.1 != Tok::End {
        return Err(p.unexpected("an operator or end of expression"));
    }
    Ok(tree)
}
