//! Arithmetic expressions in parameter ids, e.g. `4/3` or `(n-δ)/p'`.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Named values available to an expression.
#[derive(Debug, Clone, Default)]
pub struct Bindings {
    vars: HashMap<String, f64>,
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.set(name, value);
        self
    }

    pub fn set(&mut self, name: &str, value: f64) {
        let key = canonical(name);
        self.vars.insert(key, value);
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.vars.get(&canonical(name)).copied()
    }

    /// Binds `p`, `q` together with their conjugates `p'`, `q'`.
    pub fn with_exponents(mut self, p: f64, q: f64) -> Self {
        self.set("p", p);
        self.set("q", q);
        self.set("p'", conjugate(p));
        self.set("q'", conjugate(q));
        self
    }
}

fn canonical(name: &str) -> String {
    match name {
        "δ" => "delta".into(),
        "α" => "alpha".into(),
        other => other.to_string(),
    }
}

/// Hölder conjugate `p/(p-1)`, with `1' = ∞`.
pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else {
        p / (p - 1.0)
    }
}

/// Evaluates `src` with the given bindings.
pub fn eval(src: &str, vars: &Bindings) -> Result<f64> {
    let tokens = lex(src)?;
    let mut parser = Parser {
        tokens: &tokens,
        pos: 0,
        vars,
        src,
    };
    let v = parser.sum()?;
    if parser.pos != tokens.len() {
        return Err(Error::Parse(format!("trailing input in `{src}`")));
    }
    Ok(v)
}

/// Evaluates an expression with no free variables.
pub fn eval_const(src: &str) -> Result<f64> {
    eval(src, &Bindings::new())
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn lex(src: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = text
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number `{text}` in `{src}`")))?;
            out.push(Tok::Num(v));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            if i < chars.len() && chars[i] == '\'' {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected `{c}` in `{src}`")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: &'a [Tok],
    pos: usize,
    vars: &'a Bindings,
    src: &'a str,
}

impl Parser<'_> {
    fn peek_op(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some(Tok::Op(c)) => Some(*c),
            _ => None,
        }
    }

    fn sum(&mut self) -> Result<f64> {
        let mut acc = self.product()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.product()?;
            acc = if op == '+' { acc + rhs } else { acc - rhs };
        }
        Ok(acc)
    }

    fn product(&mut self) -> Result<f64> {
        let mut acc = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if op == '*' { acc * rhs } else { acc / rhs };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<f64> {
        match self.peek_op() {
            Some('-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<f64> {
        let base = self.atom()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(base.powf(exp));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<f64> {
        let tok = self
            .tokens
            .get(self.pos)
            .cloned()
            .ok_or_else(|| Error::Parse(format!("unexpected end of `{}`", self.src)))?;
        self.pos += 1;
        match tok {
            Tok::Num(v) => Ok(v),
            Tok::Ident(name) => self
                .vars
                .get(&name)
                .ok_or_else(|| Error::Parse(format!("unbound name `{name}` in `{}`", self.src))),
            Tok::Op('(') => {
                let v = self.sum()?;
                if self.peek_op() != Some(')') {
                    return Err(Error::Parse(format!("missing `)` in `{}`", self.src)));
                }
                self.pos += 1;
                Ok(v)
            }
            Tok::Op(c) => Err(Error::Parse(format!("unexpected `{c}` in `{}`", self.src))),
        }
    }
}
