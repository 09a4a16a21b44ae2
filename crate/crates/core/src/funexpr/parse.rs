//! Text syntax for expressions. Two forms are accepted:
//! prefix, e.g. `(pow q (neg 2))`, and infix, e.g. `0.2/x^2` or `log(x)/x^3`.
//! The variable may be written `x` or `q`.

use std::sync::Arc;

use num_traits::ToPrimitive;

use super::expr::{build::*, FuncExpr, Node};
use super::f_nc;
use crate::error::{Error, Result};
use crate::heights::{alpha_d, gamma_d};
use crate::real::{parse_rational, rational_to_f64};

type E = Arc<Node>;

const PREFIX_OPS: &[&str] =
    &["add", "sub", "mul", "div", "pow", "neg", "exp", "log", "ln", "sqrt", "ilog", "fNC", "gamma_d", "alpha_d"];

pub fn parse_expr(text: &str) -> Result<FuncExpr> {
    let tokens = tokenize(text)?;
    if tokens.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let prefix = matches!(
        (tokens.first(), tokens.get(1)),
        (Some(Tok::LParen), Some(Tok::Ident(op))) if PREFIX_OPS.contains(&op.as_str())
    );
    let run = |prefix: bool| -> Result<E> {
        let mut p = Parser { toks: tokens.clone(), pos: 0 };
        let node = if prefix { p.prefix()? } else { p.expr()? };
        if p.pos != p.toks.len() {
            return Err(Error::Parse(format!("trailing input in '{text}'")));
        }
        Ok(node)
    };
    // `(log(x))^2` starts like prefix syntax, so fall back to infix.
    let node = if prefix { run(true).or_else(|e| run(false).map_err(|_| e))? } else { run(false)? };
    Ok(FuncExpr::new(node))
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    LParen,
    RParen,
    Comma,
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let cs: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && cs.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let st = i;
            while i < cs.len() && (cs[i].is_ascii_digit() || cs[i] == '.') {
                i += 1;
            }
            if i < cs.len() && (cs[i] == 'e' || cs[i] == 'E') {
                let mut j = i + 1;
                if j < cs.len() && (cs[j] == '+' || cs[j] == '-') {
                    j += 1;
                }
                if j < cs.len() && cs[j].is_ascii_digit() {
                    i = j;
                    while i < cs.len() && cs[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            out.push(Tok::Num(cs[st..i].iter().collect()));
        } else if c.is_alphabetic() || c == '_' {
            let st = i;
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(cs[st..i].iter().collect()));
        } else {
            out.push(match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
                _ => return Err(Error::Parse(format!("unexpected character '{c}'"))),
            });
            i += 1;
        }
    }
    Ok(out)
}

fn number(s: &str) -> Result<E> {
    let r = parse_rational(s)?;
    match (r.numer().to_i64(), r.denom().to_i64()) {
        (Some(n), Some(d)) => Ok(Arc::new(Node::Rat(n, d))),
        _ => Ok(c(rational_to_f64(&r))),
    }
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Result<Tok> {
        let t = self.toks.get(self.pos).cloned().ok_or_else(|| Error::Parse("unexpected end of input".into()))?;
        self.pos += 1;
        Ok(t)
    }

    fn expect(&mut self, t: Tok) -> Result<()> {
        let got = self.next()?;
        if got == t {
            Ok(())
        } else {
            Err(Error::Parse(format!("expected {t:?}, found {got:?}")))
        }
    }

    fn int_arg(&self, e: &E, what: &str) -> Result<i64> {
        match &**e {
            Node::Rat(n, 1) => Ok(*n),
            Node::Neg(inner) => match &**inner {
                Node::Rat(n, 1) => Ok(-n),
                _ => Err(Error::Parse(format!("{what} expects an integer argument"))),
            },
            _ => Err(Error::Parse(format!("{what} expects an integer argument"))),
        }
    }

    fn const_arg(&self, e: &E, what: &str) -> Result<f64> {
        FuncExpr::new(e.clone())
            .is_constant()
            .ok_or_else(|| Error::Parse(format!("{what} expects a constant argument")))
    }

    fn apply(&self, name: &str, args: Vec<E>) -> Result<E> {
        let arity = |n: usize| -> Result<()> {
            if args.len() == n {
                Ok(())
            } else {
                Err(Error::Parse(format!("{name} takes {n} argument(s), got {}", args.len())))
            }
        };
        Ok(match name {
            "add" | "sub" | "mul" | "div" => {
                if args.len() < 2 {
                    return Err(Error::Parse(format!("{name} takes at least 2 arguments")));
                }
                let mut it = args.into_iter();
                let first = it.next().unwrap();
                it.fold(first, |acc, b| match name {
                    "add" => add(acc, b),
                    "sub" => sub(acc, b),
                    "mul" => mul(acc, b),
                    _ => div(acc, b),
                })
            }
            "pow" => {
                arity(2)?;
                pow(args[0].clone(), args[1].clone())
            }
            "neg" => {
                arity(1)?;
                neg(args[0].clone())
            }
            "exp" => {
                arity(1)?;
                exp(args[0].clone())
            }
            "log" | "ln" => {
                arity(1)?;
                log(args[0].clone())
            }
            "sqrt" => {
                arity(1)?;
                pow(args[0].clone(), r(1, 2))
            }
            "ilog" => {
                arity(2)?;
                let k = self.int_arg(&args[0], name)?;
                if k < 0 {
                    return Err(Error::Parse("ilog order must be nonnegative".into()));
                }
                logk(k as u32, args[1].clone())
            }
            "fNC" => {
                arity(2)?;
                let n = self.int_arg(&args[0], name)?;
                let cc = self.const_arg(&args[1], name)?;
                if n < -1 || cc < 0.0 {
                    return Err(Error::Parse("fNC needs N >= -1 and C >= 0".into()));
                }
                f_nc(n as i32, cc).root().clone()
            }
            "gamma_d" | "alpha_d" => {
                arity(1)?;
                let d = self.int_arg(&args[0], name)?;
                if d < 2 {
                    return Err(Error::Parse(format!("{name} needs d >= 2")));
                }
                c(if name == "gamma_d" { gamma_d(d as usize) } else { alpha_d(d as usize) })
            }
            other => return Err(Error::Parse(format!("unknown function '{other}'"))),
        })
    }

    fn ident(&self, name: &str) -> Result<E> {
        match name {
            "x" | "q" => Ok(var()),
            "pi" => Ok(c(std::f64::consts::PI)),
            "e" => Ok(c(std::f64::consts::E)),
            other => Err(Error::Parse(format!("unknown identifier '{other}'"))),
        }
    }

    fn prefix(&mut self) -> Result<E> {
        match self.next()? {
            Tok::Num(s) => number(&s),
            Tok::Op('-') => match self.next()? {
                Tok::Num(s) => Ok(neg(number(&s)?)),
                t => Err(Error::Parse(format!("unexpected {t:?} after '-'"))),
            },
            Tok::Ident(s) => self.ident(&s),
            Tok::LParen => {
                let op = match self.next()? {
                    Tok::Ident(op) => op,
                    t => return Err(Error::Parse(format!("expected operator, found {t:?}"))),
                };
                let mut args = Vec::new();
                while self.peek() != Some(&Tok::RParen) {
                    if self.peek().is_none() {
                        return Err(Error::Parse("unbalanced parentheses".into()));
                    }
                    args.push(self.prefix()?);
                }
                self.expect(Tok::RParen)?;
                self.apply(&op, args)
            }
            t => Err(Error::Parse(format!("unexpected {t:?}"))),
        }
    }

    fn expr(&mut self) -> Result<E> {
        let mut acc = self.term()?;
        while let Some(Tok::Op(o @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if o == '+' { add(acc, rhs) } else { sub(acc, rhs) };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<E> {
        let mut acc = self.unary()?;
        while let Some(Tok::Op(o @ ('*' | '/'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if o == '*' { mul(acc, rhs) } else { div(acc, rhs) };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<E> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(neg(self.unary()?))
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<E> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Op('^')) {
            self.pos += 1;
            let e = self.unary()?;
            return Ok(pow(base, e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<E> {
        match self.next()? {
            Tok::Num(s) => number(&s),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if self.peek() == Some(&Tok::LParen) {
                    self.pos += 1;
                    let mut args = Vec::new();
                    if self.peek() != Some(&Tok::RParen) {
                        loop {
                            args.push(self.expr()?);
                            match self.next()? {
                                Tok::Comma => continue,
                                Tok::RParen => break,
                                t => return Err(Error::Parse(format!("expected ',' or ')', found {t:?}"))),
                            }
                        }
                    } else {
                        self.pos += 1;
                    }
                    self.apply(&name, args)
                } else {
                    self.ident(&name)
                }
            }
            t => Err(Error::Parse(format!("unexpected {t:?}"))),
        }
    }
}
