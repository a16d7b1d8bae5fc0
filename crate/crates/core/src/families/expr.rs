//! The small formula language of the registry: integer expressions in the
//! family parameters, conditions over them, and first-match piecewise
//! definitions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_integer::Integer;

use crate::error::{Error, Result};

pub type Env = BTreeMap<String, i64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Node {
    Num(i64),
    Var(String),
    Neg(Box<Node>),
    Bin(Op, Box<Node>, Box<Node>),
    Min(Vec<Node>),
    Max(Vec<Node>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Rel {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl Rel {
    fn holds(self, a: i64, b: i64) -> bool {
        match self {
            Rel::Eq => a == b,
            Rel::Ne => a != b,
            Rel::Lt => a < b,
            Rel::Le => a <= b,
            Rel::Gt => a > b,
            Rel::Ge => a >= b,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum CondNode {
    Chain(Vec<Node>, Vec<Rel>),
    All(Vec<CondNode>),
    Any(Vec<CondNode>),
}

fn unbound(name: &str) -> Error {
    Error::Registry(format!("unbound parameter {name}"))
}

impl Node {
    fn eval(&self, env: &Env) -> Result<i64> {
        let overflow = || Error::Registry("arithmetic overflow".into());
        Ok(match self {
            Node::Num(n) => *n,
            Node::Var(v) => *env.get(v).ok_or_else(|| unbound(v))?,
            Node::Neg(a) => a.eval(env)?.checked_neg().ok_or_else(overflow)?,
            Node::Bin(op, a, b) => {
                let (a, b) = (a.eval(env)?, b.eval(env)?);
                match op {
                    Op::Add => a.checked_add(b),
                    Op::Sub => a.checked_sub(b),
                    Op::Mul => a.checked_mul(b),
                    Op::Div if b == 0 => return Err(Error::Registry("division by zero".into())),
                    Op::Div => Some(Integer::div_floor(&a, &b)),
                }
                .ok_or_else(overflow)?
            }
            Node::Min(xs) => fold(xs, env, i64::min)?,
            Node::Max(xs) => fold(xs, env, i64::max)?,
        })
    }

    fn vars(&self, out: &mut Vec<String>) {
        match self {
            Node::Num(_) => {}
            Node::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Node::Neg(a) => a.vars(out),
            Node::Bin(_, a, b) => {
                a.vars(out);
                b.vars(out);
            }
            Node::Min(xs) | Node::Max(xs) => xs.iter().for_each(|x| x.vars(out)),
        }
    }
}

fn fold(xs: &[Node], env: &Env, f: fn(i64, i64) -> i64) -> Result<i64> {
    let mut it = xs.iter();
    let first = it
        .next()
        .expect("parser rejects empty argument lists")
        .eval(env)?;
    it.try_fold(first, |acc, x| Ok(f(acc, x.eval(env)?)))
}

impl CondNode {
    fn eval(&self, env: &Env) -> Result<bool> {
        match self {
            CondNode::Chain(xs, rels) => {
                let vals = xs.iter().map(|x| x.eval(env)).collect::<Result<Vec<_>>>()?;
                Ok(rels
                    .iter()
                    .zip(vals.windows(2))
                    .all(|(r, w)| r.holds(w[0], w[1])))
            }
            CondNode::All(cs) => {
                for c in cs {
                    if !c.eval(env)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            CondNode::Any(cs) => {
                for c in cs {
                    if c.eval(env)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        }
    }

    fn vars(&self, out: &mut Vec<String>) {
        match self {
            CondNode::Chain(xs, _) => xs.iter().for_each(|x| x.vars(out)),
            CondNode::All(cs) | CondNode::Any(cs) => cs.iter().for_each(|c| c.vars(out)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Num(i64),
    Word(String),
    Sym(&'static str),
}

const SYMBOLS: [&str; 15] = [
    "<=", ">=", "!=", "==", "+", "-", "*", "/", "(", ")", ",", "<", ">", "=", "^",
];
const KEYWORDS: [&str; 3] = ["if", "and", "or"];

fn tokenize(src: &str) -> Result<Vec<Tok>> {
    let bad = |msg: String| Error::Registry(format!("{msg} in {src:?}"));
    let mut out = Vec::new();
    let mut rest = src;
    while let Some(c) = rest.chars().next() {
        if c.is_whitespace() {
            rest = &rest[c.len_utf8()..];
        } else if c.is_ascii_digit() {
            let end = rest
                .find(|c: char| !c.is_ascii_digit())
                .unwrap_or(rest.len());
            let n = rest[..end]
                .parse()
                .map_err(|_| bad(format!("number {}", &rest[..end])))?;
            out.push(Tok::Num(n));
            rest = &rest[end..];
        } else if c.is_ascii_alphabetic() {
            let end = rest
                .find(|c: char| !c.is_ascii_alphabetic())
                .unwrap_or(rest.len());
            out.push(Tok::Word(rest[..end].to_string()));
            rest = &rest[end..];
        } else if let Some(s) = SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            out.push(Tok::Sym(s));
            rest = &rest[s.len()..];
        } else {
            return Err(bad(format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<Tok>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self> {
        Ok(Parser {
            src,
            toks: tokenize(src)?,
            pos: 0,
        })
    }

    fn err(&self, what: &str) -> Error {
        Error::Registry(format!(
            "{what} at token {} of {:?}",
            self.pos + 1,
            self.src
        ))
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Sym(t)) if *t == s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Word(t)) if t == w) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> Result<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.err(&format!("expected {s:?}")))
        }
    }

    fn done(&self) -> bool {
        self.pos == self.toks.len()
    }

    fn expr(&mut self) -> Result<Node> {
        let mut acc = self.term()?;
        loop {
            let op = if self.eat_sym("+") {
                Op::Add
            } else if self.eat_sym("-") {
                Op::Sub
            } else {
                return Ok(acc);
            };
            acc = Node::Bin(op, Box::new(acc), Box::new(self.term()?));
        }
    }

    fn starts_factor(&self) -> bool {
        match self.peek() {
            Some(Tok::Num(_)) => true,
            Some(Tok::Word(w)) => !KEYWORDS.contains(&w.as_str()),
            Some(Tok::Sym(s)) => *s == "(",
            None => false,
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut acc = self.unary()?;
        loop {
            let op = if self.eat_sym("*") {
                Op::Mul
            } else if self.eat_sym("/") {
                Op::Div
            } else if self.starts_factor() {
                Op::Mul
            } else {
                return Ok(acc);
            };
            acc = Node::Bin(op, Box::new(acc), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Node> {
        if self.eat_sym("-") {
            Ok(Node::Neg(Box::new(self.unary()?)))
        } else {
            self.primary()
        }
    }

    fn primary(&mut self) -> Result<Node> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Node::Num(n))
            }
            Some(Tok::Word(w)) if KEYWORDS.contains(&w.as_str()) => {
                Err(self.err("expected a value"))
            }
            Some(Tok::Word(w)) => {
                self.pos += 1;
                if (w == "min" || w == "max") && self.eat_sym("(") {
                    let mut args = vec![self.expr()?];
                    while self.eat_sym(",") {
                        args.push(self.expr()?);
                    }
                    self.expect_sym(")")?;
                    Ok(if w == "min" {
                        Node::Min(args)
                    } else {
                        Node::Max(args)
                    })
                } else {
                    Ok(Node::Var(w))
                }
            }
            Some(Tok::Sym("(")) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            _ => Err(self.err("expected a value")),
        }
    }

    fn rel(&mut self) -> Option<Rel> {
        let r = match self.peek()? {
            Tok::Sym("=") | Tok::Sym("==") => Rel::Eq,
            Tok::Sym("!=") => Rel::Ne,
            Tok::Sym("<") => Rel::Lt,
            Tok::Sym("<=") => Rel::Le,
            Tok::Sym(">") => Rel::Gt,
            Tok::Sym(">=") => Rel::Ge,
            _ => return None,
        };
        self.pos += 1;
        Some(r)
    }

    fn cond(&mut self) -> Result<CondNode> {
        let mut any = vec![self.conjunction()?];
        while self.eat_word("or") {
            any.push(self.conjunction()?);
        }
        Ok(if any.len() == 1 {
            any.pop().unwrap()
        } else {
            CondNode::Any(any)
        })
    }

    fn conjunction(&mut self) -> Result<CondNode> {
        let mut all = vec![self.cond_atom()?];
        while self.eat_word("and") {
            all.push(self.cond_atom()?);
        }
        Ok(if all.len() == 1 {
            all.pop().unwrap()
        } else {
            CondNode::All(all)
        })
    }

    fn cond_atom(&mut self) -> Result<CondNode> {
        // A parenthesis opens either a grouped condition or an expression.
        if matches!(self.peek(), Some(Tok::Sym("("))) {
            let save = self.pos;
            self.pos += 1;
            if let Ok(c) = self.cond() {
                if self.eat_sym(")") && self.rel().is_none() {
                    return Ok(c);
                }
            }
            self.pos = save;
        }
        let mut xs = vec![self.expr()?];
        let mut rels = Vec::new();
        while let Some(r) = self.rel() {
            rels.push(r);
            xs.push(self.expr()?);
        }
        if rels.is_empty() {
            return Err(self.err("expected a comparison"));
        }
        Ok(CondNode::Chain(xs, rels))
    }
}

/// An integer expression such as `2k+1` or `min(m, k) - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expr {
    node: Node,
    text: String,
}

impl Expr {
    pub fn parse(src: &str) -> Result<Self> {
        let mut p = Parser::new(src)?;
        let node = p.expr()?;
        if !p.done() {
            return Err(p.err("trailing input"));
        }
        Ok(Expr {
            node,
            text: src.trim().to_string(),
        })
    }

    pub fn eval(&self, env: &Env) -> Result<i64> {
        self.node.eval(env)
    }

    /// Parameters in order of first appearance.
    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.node.vars(&mut out);
        out
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// A condition such as `1 <= l <= k` or `k = l or l >= 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cond {
    node: CondNode,
    text: String,
}

impl Cond {
    pub fn parse(src: &str) -> Result<Self> {
        let mut p = Parser::new(src)?;
        let node = p.cond()?;
        if !p.done() {
            return Err(p.err("trailing input"));
        }
        Ok(Cond {
            node,
            text: src.trim().to_string(),
        })
    }

    pub fn holds(&self, env: &Env) -> Result<bool> {
        self.node.eval(env)
    }

    /// Parameters in order of first appearance.
    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.node.vars(&mut out);
        out
    }
}

impl fmt::Display for Cond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// `expr if cond; expr if cond; ...`, where the first branch whose condition
/// holds applies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piecewise {
    branches: Vec<(Expr, Option<Cond>)>,
    text: String,
}

impl Piecewise {
    pub fn parse(src: &str) -> Result<Self> {
        let branches = src
            .split(';')
            .map(|part| match part.find(" if ") {
                Some(i) => Ok((Expr::parse(&part[..i])?, Some(Cond::parse(&part[i + 4..])?))),
                None => Ok((Expr::parse(part)?, None)),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Piecewise {
            branches,
            text: src.trim().to_string(),
        })
    }

    /// `None` when no branch applies.
    pub fn eval(&self, env: &Env) -> Result<Option<i64>> {
        for (e, c) in &self.branches {
            if c.as_ref().map_or(Ok(true), |c| c.holds(env))? {
                return e.eval(env).map(Some);
            }
        }
        Ok(None)
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for (e, c) in &self.branches {
            out.extend(e.vars());
            out.extend(c.iter().flat_map(Cond::vars));
        }
        out
    }
}

impl fmt::Display for Piecewise {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env(pairs: &[(&str, i64)]) -> Env {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn arithmetic() {
        let e = env(&[("k", 3), ("m", 5), ("n", 2)]);
        let ev = |s: &str| Expr::parse(s).unwrap().eval(&e).unwrap();
        assert_eq!(ev("2k+1"), 7);
        assert_eq!(ev("4(k+1)"), 16);
        assert_eq!(ev("(2k)"), 6);
        assert_eq!(ev("-2k-1"), -7);
        assert_eq!(ev("n + min(k, m-1)"), 5);
        assert_eq!(ev("max(k, m, n) - min(k, m, n)"), 3);
        assert_eq!(ev("n*k"), 6);
        assert_eq!(ev("m/2"), 2);
        assert_eq!(ev("-m/2"), -3);
        assert_eq!(ev("m/(0-2)"), -3);
        assert_eq!(ev("2 k m"), 30);
    }

    #[test]
    fn conditions() {
        let e = env(&[("k", 3), ("l", 2), ("m", 2)]);
        let holds = |s: &str| Cond::parse(s).unwrap().holds(&e).unwrap();
        assert!(holds("1 <= l <= k"));
        assert!(!holds("1 <= k <= l"));
        assert!(holds("k = l or l >= 2"));
        assert!(!holds("k = l and l >= 2"));
        assert!(holds("(l <= k and m <= k) or (k < l and m < l)"));
        assert!(holds("(k+1) > m"));
        assert!(holds("l+1 < k+1"));
        assert!(holds("l != k"));
        assert!(holds("k == 3"));
    }

    #[test]
    fn piecewise_first_match() {
        let p = Piecewise::parse("3 if k = 1; k+1 if k >= 2").unwrap();
        let at = |k| p.eval(&env(&[("k", k)])).unwrap();
        assert_eq!(at(1), Some(3));
        assert_eq!(at(4), Some(5));
        assert_eq!(at(0), None);
        let q = Piecewise::parse("0 if k = 0; k").unwrap();
        assert_eq!(q.eval(&env(&[("k", 7)])).unwrap(), Some(7));
        assert_eq!(
            p.vars().into_iter().collect::<Vec<_>>(),
            vec!["k".to_string()]
        );
    }

    #[test]
    fn errors() {
        for bad in ["", "2k+", "min()", "k $ 2", "(k", "k k if"] {
            assert!(Expr::parse(bad).is_err(), "{bad:?}");
        }
        for bad in ["k", "k <", "k = 1 and", "(k = 1"] {
            assert!(Cond::parse(bad).is_err(), "{bad:?}");
        }
        assert!(Piecewise::parse("1 if").is_err());
        let unbound = Expr::parse("q").unwrap().eval(&Env::new());
        assert!(matches!(unbound, Err(Error::Registry(_))));
        assert!(Expr::parse("k/0").unwrap().eval(&env(&[("k", 1)])).is_err());
    }
}
