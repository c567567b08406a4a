//! posLFP formulas and their s-expression syntax.
//!
//! ```text
//! F ::= (R t ...)                 input atom
//!     | (not (R t ...)) | (not (= t t))
//!     | (= t t)
//!     | (and F F ...) | (or F F ...)
//!     | (exists x F) | (exists (x y ...) F)
//!     | (forall x F) | (forall (x y ...) F)
//!     | (lfp R (x ...) F t ...)   least fixed point of R, applied to t ...
//! t ::= variable | constant name | element number
//! ```
//!
//! Inside the body of `(lfp R ...)` the name `R` denotes the fixpoint
//! relation. Each fixpoint name is bound once, fixpoint atoms occur only
//! positively, and the free variables of an lfp body must be among its
//! parameters.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::{self, Write};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Const(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    /// Input atom, possibly negated.
    Rel { name: String, args: Vec<Term>, negated: bool },
    Eq { left: Term, right: Term, negated: bool },
    /// Atom over a fixpoint relation bound by an enclosing `lfp`.
    Fix { name: String, args: Vec<Term> },
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
    Lfp { name: String, params: Vec<String>, body: Box<Formula>, args: Vec<Term> },
}

/// A checked posLFP sentence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LfpFormula {
    root: Formula,
    bodies: BTreeMap<String, (Vec<String>, Formula)>,
}

pub(crate) type Env = HashMap<String, u32>;

impl Term {
    pub(crate) fn value(&self, env: &Env) -> u32 {
        match self {
            Term::Const(c) => *c,
            Term::Var(v) => env[v],
        }
    }

    fn write_inst(&self, env: &Env, out: &mut String) {
        match self {
            Term::Const(c) => write!(out, "{c}").unwrap(),
            Term::Var(v) => match env.get(v) {
                Some(a) => write!(out, "{a}").unwrap(),
                None => out.push_str(v),
            },
        }
    }
}

impl Formula {
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let mut term = |t: &Term, bound: &Vec<String>| {
            if let Term::Var(v) = t {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
        };
        match self {
            Formula::Rel { args, .. } | Formula::Fix { args, .. } => args.iter().for_each(|t| term(t, bound)),
            Formula::Eq { left, right, .. } => {
                term(left, bound);
                term(right, bound);
            }
            Formula::Lfp { params, body, args, .. } => {
                args.iter().for_each(|t| term(t, bound));
                let depth = bound.len();
                bound.extend(params.iter().cloned());
                body.collect_free(bound, out);
                bound.truncate(depth);
            }
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(x, f) | Formula::Forall(x, f) => {
                bound.push(x.clone());
                f.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// The formula printed with its free variables replaced by `env`.
    pub(crate) fn instantiated(&self, env: &Env) -> String {
        let mut s = String::new();
        self.write_inst(env, &mut s);
        s
    }

    fn write_inst(&self, env: &Env, out: &mut String) {
        let terms = |args: &[Term], out: &mut String| {
            for t in args {
                out.push(' ');
                t.write_inst(env, out);
            }
        };
        match self {
            Formula::Rel { name, args, negated } => {
                if *negated {
                    out.push_str("(not ");
                }
                write!(out, "({name}").unwrap();
                terms(args, out);
                out.push(')');
                if *negated {
                    out.push(')');
                }
            }
            Formula::Fix { name, args } => {
                write!(out, "({name}").unwrap();
                terms(args, out);
                out.push(')');
            }
            Formula::Eq { left, right, negated } => {
                out.push_str(if *negated { "(not (=" } else { "(=" });
                terms(&[left.clone(), right.clone()], out);
                out.push_str(if *negated { "))" } else { ")" });
            }
            Formula::And(a, b) | Formula::Or(a, b) => {
                out.push_str(if matches!(self, Formula::And(..)) { "(and " } else { "(or " });
                a.write_inst(env, out);
                out.push(' ');
                b.write_inst(env, out);
                out.push(')');
            }
            Formula::Exists(x, f) | Formula::Forall(x, f) => {
                let q = if matches!(self, Formula::Exists(..)) { "exists" } else { "forall" };
                write!(out, "({q} {x} ").unwrap();
                let mut inner = env.clone();
                inner.remove(x);
                f.write_inst(&inner, out);
                out.push(')');
            }
            Formula::Lfp { name, params, body, args } => {
                write!(out, "(lfp {name} ({}) ", params.join(" ")).unwrap();
                let mut inner = env.clone();
                for p in params {
                    inner.remove(p);
                }
                body.write_inst(&inner, out);
                terms(args, out);
                out.push(')');
            }
        }
    }

    fn has_forall(&self) -> bool {
        match self {
            Formula::Forall(..) => true,
            Formula::And(a, b) | Formula::Or(a, b) => a.has_forall() || b.has_forall(),
            Formula::Exists(_, f) => f.has_forall(),
            Formula::Lfp { body, .. } => body.has_forall(),
            _ => false,
        }
    }

    fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        f(self);
        match self {
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Formula::Exists(_, g) | Formula::Forall(_, g) => g.visit(f),
            Formula::Lfp { body, .. } => body.visit(f),
            _ => {}
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.instantiated(&Env::new()))
    }
}

impl fmt::Display for LfpFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.fmt(f)
    }
}

impl LfpFormula {
    /// Parses a sentence; symbols that are not bound variables are looked up
    /// in `constants`, then read as element numbers.
    pub fn parse(text: &str, constants: &BTreeMap<String, u32>) -> Result<Self> {
        let sexp = Sexp::parse(text)?;
        let mut p = Parser { constants, bound: Vec::new(), fix: Vec::new() };
        let root = p.formula(&sexp)?;
        Self::new(root)
    }

    /// Checks the posLFP discipline on `root`.
    pub fn new(root: Formula) -> Result<Self> {
        let free = root.free_vars();
        if !free.is_empty() {
            return Err(Error::InvalidInput(format!("formula has free variables {free:?}")));
        }
        let mut bodies = BTreeMap::new();
        let mut err = None;
        root.visit(&mut |f| {
            if let Formula::Lfp { name, params, body, args } = f {
                if params.len() != args.len() {
                    err.get_or_insert(format!("lfp {name} has {} parameters but {} arguments", params.len(), args.len()));
                }
                let extra: Vec<String> = body.free_vars().into_iter().filter(|v| !params.contains(v)).collect();
                if !extra.is_empty() {
                    err.get_or_insert(format!("body of lfp {name} uses non-parameter variables {extra:?}"));
                }
                if bodies.insert(name.clone(), (params.clone(), (**body).clone())).is_some() {
                    err.get_or_insert(format!("fixpoint relation {name} is bound twice"));
                }
            }
        });
        root.visit(&mut |f| match f {
            Formula::Fix { name, args } => match bodies.get(name) {
                Some((params, _)) if params.len() == args.len() => {}
                Some(_) => {
                    err.get_or_insert(format!("fixpoint atom {name} has the wrong arity"));
                }
                None => {
                    err.get_or_insert(format!("fixpoint relation {name} is not bound"));
                }
            },
            Formula::Rel { name, .. } if bodies.contains_key(name) => {
                err.get_or_insert(format!("{name} is used both as input and fixpoint relation"));
            }
            _ => {}
        });
        match err {
            Some(e) => Err(Error::InvalidInput(e)),
            None => Ok(LfpFormula { root, bodies }),
        }
    }

    pub fn root(&self) -> &Formula {
        &self.root
    }

    /// Parameters and body of the lfp binder for `name`.
    pub fn binder(&self, name: &str) -> Option<(&[String], &Formula)> {
        self.bodies.get(name).map(|(p, b)| (p.as_slice(), b))
    }

    /// Existential fragment: no universal quantifiers.
    pub fn is_efp0(&self) -> bool {
        !self.root.has_forall()
    }

    /// Input relations with the arity they are used at.
    pub fn input_relations(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        self.root.visit(&mut |f| {
            if let Formula::Rel { name, args, .. } = f {
                out.insert(name.clone(), args.len());
            }
        });
        out
    }

    pub(crate) fn constants(&self) -> Vec<u32> {
        let mut out = Vec::new();
        let mut term = |t: &Term| {
            if let Term::Const(c) = t {
                out.push(*c);
            }
        };
        self.root.visit(&mut |f| match f {
            Formula::Rel { args, .. } | Formula::Fix { args, .. } | Formula::Lfp { args, .. } => {
                args.iter().for_each(&mut term)
            }
            Formula::Eq { left, right, .. } => {
                term(left);
                term(right);
            }
            _ => {}
        });
        out
    }
}

#[derive(Debug)]
enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

impl Sexp {
    fn parse(text: &str) -> Result<Sexp> {
        let spaced = text.replace('(', " ( ").replace(')', " ) ");
        let mut toks = spaced.split_whitespace().peekable();
        let e = Self::read(&mut toks)?;
        if let Some(t) = toks.next() {
            return Err(Error::Parse(format!("trailing input at {t:?}")));
        }
        Ok(e)
    }

    fn read<'a>(toks: &mut std::iter::Peekable<impl Iterator<Item = &'a str>>) -> Result<Sexp> {
        match toks.next() {
            None => Err(Error::Parse("unexpected end of formula".into())),
            Some(")") => Err(Error::Parse("unexpected ')'".into())),
            Some("(") => {
                let mut items = Vec::new();
                loop {
                    match toks.peek() {
                        None => return Err(Error::Parse("missing ')'".into())),
                        Some(&")") => {
                            toks.next();
                            return Ok(Sexp::List(items));
                        }
                        _ => items.push(Self::read(toks)?),
                    }
                }
            }
            Some(a) => Ok(Sexp::Atom(a.to_string())),
        }
    }
}

struct Parser<'a> {
    constants: &'a BTreeMap<String, u32>,
    bound: Vec<String>,
    fix: Vec<String>,
}

impl Parser<'_> {
    fn term(&self, e: &Sexp) -> Result<Term> {
        let Sexp::Atom(s) = e else { return Err(Error::Parse("expected a term".into())) };
        if self.bound.contains(s) {
            return Ok(Term::Var(s.clone()));
        }
        if let Some(&c) = self.constants.get(s) {
            return Ok(Term::Const(c));
        }
        if let Ok(c) = s.parse::<u32>() {
            return Ok(Term::Const(c));
        }
        Err(Error::InvalidInput(format!("free variable or unknown constant {s:?}")))
    }

    fn terms(&self, es: &[Sexp]) -> Result<Vec<Term>> {
        es.iter().map(|e| self.term(e)).collect()
    }

    fn names(e: &Sexp) -> Result<Vec<String>> {
        match e {
            Sexp::Atom(s) => Ok(vec![s.clone()]),
            Sexp::List(xs) => xs
                .iter()
                .map(|x| match x {
                    Sexp::Atom(s) => Ok(s.clone()),
                    _ => Err(Error::Parse("expected a variable name".into())),
                })
                .collect(),
        }
    }

    fn formula(&mut self, e: &Sexp) -> Result<Formula> {
        let Sexp::List(items) = e else {
            return Err(Error::Parse(format!("expected a formula, found {e:?}")));
        };
        let Some(Sexp::Atom(head)) = items.first() else {
            return Err(Error::Parse("formula must start with an operator or relation name".into()));
        };
        let rest = &items[1..];
        match head.as_str() {
            "and" | "or" => {
                if rest.is_empty() {
                    return Err(Error::Parse(format!("empty ({head})")));
                }
                let mut parts = rest.iter().map(|x| self.formula(x)).collect::<Result<Vec<_>>>()?;
                let mut acc = parts.pop().unwrap();
                while let Some(f) = parts.pop() {
                    acc = if head == "and" { Formula::And(Box::new(f), Box::new(acc)) } else { Formula::Or(Box::new(f), Box::new(acc)) };
                }
                Ok(acc)
            }
            "exists" | "forall" => {
                let [vars, body] = rest else { return Err(Error::Parse(format!("({head} VARS BODY) expected"))) };
                let vars = Self::names(vars)?;
                let depth = self.bound.len();
                self.bound.extend(vars.iter().cloned());
                let body = self.formula(body);
                self.bound.truncate(depth);
                let mut f = body?;
                for v in vars.into_iter().rev() {
                    f = if head == "exists" { Formula::Exists(v, Box::new(f)) } else { Formula::Forall(v, Box::new(f)) };
                }
                Ok(f)
            }
            "not" => {
                let [inner] = rest else { return Err(Error::Parse("(not ATOM) expected".into())) };
                match self.formula(inner)? {
                    Formula::Rel { name, args, negated: false } => Ok(Formula::Rel { name, args, negated: true }),
                    Formula::Eq { left, right, negated: false } => Ok(Formula::Eq { left, right, negated: true }),
                    _ => Err(Error::InvalidInput("negation applies only to input atoms and equalities".into())),
                }
            }
            "=" => {
                let [a, b] = rest else { return Err(Error::Parse("(= t t) expected".into())) };
                Ok(Formula::Eq { left: self.term(a)?, right: self.term(b)?, negated: false })
            }
            "lfp" => {
                if rest.len() < 3 {
                    return Err(Error::Parse("(lfp R (x ...) BODY t ...) expected".into()));
                }
                let Sexp::Atom(name) = &rest[0] else { return Err(Error::Parse("lfp needs a relation name".into())) };
                let params = Self::names(&rest[1])?;
                let args = self.terms(&rest[3..])?;
                let depth = self.bound.len();
                self.bound.extend(params.iter().cloned());
                self.fix.push(name.clone());
                let body = self.formula(&rest[2]);
                self.fix.pop();
                self.bound.truncate(depth);
                Ok(Formula::Lfp { name: name.clone(), params, body: Box::new(body?), args })
            }
            name => {
                let args = self.terms(rest)?;
                if self.fix.iter().any(|f| f == name) {
                    Ok(Formula::Fix { name: name.to_string(), args })
                } else {
                    Ok(Formula::Rel { name: name.to_string(), args, negated: false })
                }
            }
        }
    }
}
