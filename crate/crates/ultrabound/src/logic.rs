//! Formula AST for first-order logic extended with countable conjunctions,
//! plus the parser, printer, template instantiation, and prenex classifier.
//!
//! The surface syntax admits `exists`, `\/{..}`, `->`, and binary `/\` as
//! sugar; the AST after parsing contains only atomic formulas, negation,
//! first-order universal quantification, binary conjunction, and countable
//! conjunction given by a single-metavariable template.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolDecl {
    pub name: String,
    pub arity: usize,
    pub indexed: bool,
}

/// Symbol table: predicate, function, and constant families. Indexed families
/// stand for countably many symbols (one per natural-number index).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Signature {
    pub preds: Vec<SymbolDecl>,
    pub funcs: Vec<SymbolDecl>,
    pub consts: Vec<SymbolDecl>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SigError {
    #[error("duplicate symbol name `{0}`")]
    Duplicate(String),
    #[error("constant family `{0}` declared with nonzero arity")]
    ConstArity(String),
}

impl Signature {
    pub fn new(
        preds: Vec<SymbolDecl>,
        funcs: Vec<SymbolDecl>,
        consts: Vec<SymbolDecl>,
    ) -> Result<Self, SigError> {
        let mut seen = BTreeSet::new();
        for d in preds.iter().chain(&funcs).chain(&consts) {
            if !seen.insert(d.name.clone()) {
                return Err(SigError::Duplicate(d.name.clone()));
            }
        }
        for c in &consts {
            if c.arity != 0 {
                return Err(SigError::ConstArity(c.name.clone()));
            }
        }
        Ok(Signature { preds, funcs, consts })
    }

    /// Symbols used by the built-in examples: an indexed binary threshold
    /// predicate `D`, an indexed constant family `c`, indexed unary cell
    /// predicates `U`, a successor function `S`, an iterable map `T`, and a
    /// few plain predicates for scratch formulas.
    pub fn default_sig() -> Self {
        let p = |name: &str, arity, indexed| SymbolDecl { name: name.into(), arity, indexed };
        Signature::new(
            vec![
                p("D", 2, true),
                p("U", 1, true),
                p("P", 1, false),
                p("Q", 1, false),
                p("R", 1, true),
                p("E", 2, false),
            ],
            vec![p("S", 1, false), p("T", 1, false)],
            vec![p("c", 0, true), p("a", 0, false), p("b", 0, false)],
        )
        .expect("built-in signature is well-formed")
    }

    pub fn pred(&self, name: &str) -> Option<&SymbolDecl> {
        self.preds.iter().find(|d| d.name == name)
    }
    pub fn func(&self, name: &str) -> Option<&SymbolDecl> {
        self.funcs.iter().find(|d| d.name == name)
    }
    pub fn constant(&self, name: &str) -> Option<&SymbolDecl> {
        self.consts.iter().find(|d| d.name == name)
    }
}

/// Arithmetic over natural-number index metavariables: literals, variables,
/// `+`, `*`, and binary `max`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IndexExpr {
    Lit(u64),
    Var(String),
    Add(Box<IndexExpr>, Box<IndexExpr>),
    Mul(Box<IndexExpr>, Box<IndexExpr>),
    Max(Box<IndexExpr>, Box<IndexExpr>),
}

impl IndexExpr {
    pub fn eval(&self, env: &BTreeMap<String, u64>) -> Option<u64> {
        match self {
            IndexExpr::Lit(n) => Some(*n),
            IndexExpr::Var(v) => env.get(v).copied(),
            IndexExpr::Add(a, b) => Some(a.eval(env)?.checked_add(b.eval(env)?)?),
            IndexExpr::Mul(a, b) => Some(a.eval(env)?.checked_mul(b.eval(env)?)?),
            IndexExpr::Max(a, b) => Some(a.eval(env)?.max(b.eval(env)?)),
        }
    }

    pub fn as_closed(&self) -> Option<u64> {
        self.eval(&BTreeMap::new())
    }

    pub fn subst(&self, var: &str, value: u64) -> IndexExpr {
        let e = match self {
            IndexExpr::Lit(n) => IndexExpr::Lit(*n),
            IndexExpr::Var(v) => {
                if v == var {
                    IndexExpr::Lit(value)
                } else {
                    IndexExpr::Var(v.clone())
                }
            }
            IndexExpr::Add(a, b) => {
                IndexExpr::Add(Box::new(a.subst(var, value)), Box::new(b.subst(var, value)))
            }
            IndexExpr::Mul(a, b) => {
                IndexExpr::Mul(Box::new(a.subst(var, value)), Box::new(b.subst(var, value)))
            }
            IndexExpr::Max(a, b) => {
                IndexExpr::Max(Box::new(a.subst(var, value)), Box::new(b.subst(var, value)))
            }
        };
        match e.as_closed() {
            Some(n) => IndexExpr::Lit(n),
            None => e,
        }
    }

    fn vars_into(&self, out: &mut BTreeSet<String>) {
        match self {
            IndexExpr::Lit(_) => {}
            IndexExpr::Var(v) => {
                out.insert(v.clone());
            }
            IndexExpr::Add(a, b) | IndexExpr::Mul(a, b) | IndexExpr::Max(a, b) => {
                a.vars_into(out);
                b.vars_into(out);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    /// A constant family member, e.g. `c_3` or `c_{m+1}`; plain constants
    /// carry no index.
    Const { family: String, index: Option<IndexExpr> },
    /// Function application; `iter` is the iteration count of a unary
    /// function, so `T^3(x)` is T applied three times.
    App {
        family: String,
        index: Option<IndexExpr>,
        iter: Option<IndexExpr>,
        args: Vec<Term>,
    },
}

impl Term {
    fn subst_index(&self, var: &str, value: u64) -> Term {
        match self {
            Term::Var(v) => Term::Var(v.clone()),
            Term::Const { family, index } => Term::Const {
                family: family.clone(),
                index: index.as_ref().map(|e| e.subst(var, value)),
            },
            Term::App { family, index, iter, args } => Term::App {
                family: family.clone(),
                index: index.as_ref().map(|e| e.subst(var, value)),
                iter: iter.as_ref().map(|e| e.subst(var, value)),
                args: args.iter().map(|t| t.subst_index(var, value)).collect(),
            },
        }
    }

    fn object_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Const { .. } => {}
            Term::App { args, .. } => {
                for a in args {
                    a.object_vars(out);
                }
            }
        }
    }

    fn index_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(_) => {}
            Term::Const { index, .. } => {
                if let Some(e) = index {
                    e.vars_into(out);
                }
            }
            Term::App { index, iter, args, .. } => {
                if let Some(e) = index {
                    e.vars_into(out);
                }
                if let Some(e) = iter {
                    e.vars_into(out);
                }
                for a in args {
                    a.index_vars(out);
                }
            }
        }
    }
}

/// Desugared formula. `And` is the conjunction over the two-element index
/// set; `BigAnd` is the conjunction over the naturals, given as a template
/// body with one index metavariable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atomic { pred: String, index: Option<IndexExpr>, args: Vec<Term> },
    Not(Box<Formula>),
    Forall(String, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    BigAnd { var: String, body: Box<Formula> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PrenexClass {
    FO,
    PiN(u32),
    SigmaN(u32),
    General,
}

impl fmt::Display for PrenexClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrenexClass::FO => write!(f, "FO"),
            PrenexClass::PiN(n) => write!(f, "Pi{n}"),
            PrenexClass::SigmaN(n) => write!(f, "Sigma{n}"),
            PrenexClass::General => write!(f, "General"),
        }
    }
}

impl Formula {
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }
    pub fn forall(v: impl Into<String>, f: Formula) -> Formula {
        Formula::Forall(v.into(), Box::new(f))
    }
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }
    pub fn big_and(v: impl Into<String>, body: Formula) -> Formula {
        Formula::BigAnd { var: v.into(), body: Box::new(body) }
    }
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
    }

    /// Least (Π-level, Σ-level) pair; a formula of Π-level p is also Π_q and
    /// Σ_{q+1} for every q ≥ p, and symmetrically.
    pub fn levels(&self) -> (u32, u32) {
        match self {
            Formula::Atomic { .. } => (0, 0),
            Formula::Not(p) => {
                let (pi, sig) = p.levels();
                (sig, pi)
            }
            Formula::Forall(_, p) => p.levels(),
            Formula::And(a, b) => {
                let (pa, sa) = a.levels();
                let (pb, sb) = b.levels();
                (pa.max(pb), sa.max(sb))
            }
            Formula::BigAnd { body, .. } => {
                let (pb, sb) = body.levels();
                let pi = if pb == 0 { 1 } else { pb.min(sb + 1) };
                (pi, pi + 1)
            }
        }
    }

    pub fn classify(&self) -> PrenexClass {
        let (p, s) = self.levels();
        if p == 0 && s == 0 {
            PrenexClass::FO
        } else if p <= s {
            if p <= 3 {
                PrenexClass::PiN(p)
            } else {
                PrenexClass::General
            }
        } else if s <= 3 {
            PrenexClass::SigmaN(s)
        } else {
            PrenexClass::General
        }
    }

    pub fn is_fo(&self) -> bool {
        self.classify() == PrenexClass::FO
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.free_vars_into(&mut out, &mut Vec::new());
        out
    }

    fn free_vars_into(&self, out: &mut BTreeSet<String>, bound: &mut Vec<String>) {
        match self {
            Formula::Atomic { args, .. } => {
                let mut vs = BTreeSet::new();
                for t in args {
                    t.object_vars(&mut vs);
                }
                for v in vs {
                    if !bound.contains(&v) {
                        out.insert(v);
                    }
                }
            }
            Formula::Not(p) => p.free_vars_into(out, bound),
            Formula::Forall(v, p) => {
                bound.push(v.clone());
                p.free_vars_into(out, bound);
                bound.pop();
            }
            Formula::And(a, b) => {
                a.free_vars_into(out, bound);
                b.free_vars_into(out, bound);
            }
            Formula::BigAnd { body, .. } => body.free_vars_into(out, bound),
        }
    }

    /// Index metavariables occurring free (not bound by an enclosing BigAnd).
    pub fn free_index_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.free_ivars_into(&mut out, &mut Vec::new());
        out
    }

    fn free_ivars_into(&self, out: &mut BTreeSet<String>, bound: &mut Vec<String>) {
        match self {
            Formula::Atomic { index, args, .. } => {
                let mut vs = BTreeSet::new();
                if let Some(e) = index {
                    e.vars_into(&mut vs);
                }
                for t in args {
                    t.index_vars(&mut vs);
                }
                for v in vs {
                    if !bound.contains(&v) {
                        out.insert(v);
                    }
                }
            }
            Formula::Not(p) => p.free_ivars_into(out, bound),
            Formula::Forall(_, p) => p.free_ivars_into(out, bound),
            Formula::And(a, b) => {
                a.free_ivars_into(out, bound);
                b.free_ivars_into(out, bound);
            }
            Formula::BigAnd { var, body } => {
                bound.push(var.clone());
                body.free_ivars_into(out, bound);
                bound.pop();
            }
        }
    }
}

/// Substitute `value` for the index metavariable `var`, evaluating index
/// arithmetic wherever it becomes closed. Inner BigAnds rebinding the same
/// name shadow it.
pub fn instantiate(body: &Formula, var: &str, value: u64) -> Formula {
    match body {
        Formula::Atomic { pred, index, args } => Formula::Atomic {
            pred: pred.clone(),
            index: index.as_ref().map(|e| e.subst(var, value)),
            args: args.iter().map(|t| t.subst_index(var, value)).collect(),
        },
        Formula::Not(p) => Formula::not(instantiate(p, var, value)),
        Formula::Forall(v, p) => Formula::forall(v.clone(), instantiate(p, var, value)),
        Formula::And(a, b) => {
            Formula::and(instantiate(a, var, value), instantiate(b, var, value))
        }
        Formula::BigAnd { var: w, body: p } => {
            if w == var {
                Formula::BigAnd { var: w.clone(), body: p.clone() }
            } else {
                Formula::big_and(w.clone(), instantiate(p, var, value))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Printing (canonical form; parse ∘ print is the identity on ASTs)
// ---------------------------------------------------------------------------

fn print_iexpr(e: &IndexExpr, out: &mut String) {
    match e {
        IndexExpr::Lit(n) => out.push_str(&n.to_string()),
        IndexExpr::Var(v) => out.push_str(v),
        IndexExpr::Add(a, b) => {
            print_iexpr(a, out);
            out.push('+');
            print_iexpr_factor(b, out);
        }
        IndexExpr::Mul(a, b) => {
            print_iexpr_factor(a, out);
            out.push('*');
            print_iexpr_atom(b, out);
        }
        IndexExpr::Max(a, b) => {
            out.push_str("max(");
            print_iexpr(a, out);
            out.push(',');
            print_iexpr(b, out);
            out.push(')');
        }
    }
}

fn print_iexpr_factor(e: &IndexExpr, out: &mut String) {
    match e {
        IndexExpr::Add(..) => {
            out.push('(');
            print_iexpr(e, out);
            out.push(')');
        }
        _ => print_iexpr(e, out),
    }
}

fn print_iexpr_atom(e: &IndexExpr, out: &mut String) {
    match e {
        IndexExpr::Add(..) | IndexExpr::Mul(..) => {
            out.push('(');
            print_iexpr(e, out);
            out.push(')');
        }
        _ => print_iexpr(e, out),
    }
}

fn print_index_suffix(e: &IndexExpr, out: &mut String) {
    match e {
        IndexExpr::Lit(_) | IndexExpr::Var(_) => {
            out.push('_');
            print_iexpr(e, out);
        }
        _ => {
            out.push_str("_{");
            print_iexpr(e, out);
            out.push('}');
        }
    }
}

fn print_term(t: &Term, out: &mut String) {
    match t {
        Term::Var(v) => out.push_str(v),
        Term::Const { family, index } => {
            out.push_str(family);
            if let Some(e) = index {
                print_index_suffix(e, out);
            }
        }
        Term::App { family, index, iter, args } => {
            out.push_str(family);
            if let Some(e) = index {
                print_index_suffix(e, out);
            }
            if let Some(e) = iter {
                match e {
                    IndexExpr::Lit(_) | IndexExpr::Var(_) => {
                        out.push('^');
                        print_iexpr(e, out);
                    }
                    _ => {
                        out.push_str("^{");
                        print_iexpr(e, out);
                        out.push('}');
                    }
                }
            }
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                print_term(a, out);
            }
            out.push(')');
        }
    }
}

fn print_formula(f: &Formula, out: &mut String) {
    match f {
        Formula::Atomic { pred, index, args } => {
            out.push_str(pred);
            if let Some(e) = index {
                print_index_suffix(e, out);
            }
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                print_term(a, out);
            }
            out.push(')');
        }
        Formula::Not(p) => {
            out.push_str("~ ");
            match **p {
                Formula::Atomic { .. } | Formula::Not(_) => print_formula(p, out),
                _ => {
                    out.push('(');
                    print_formula(p, out);
                    out.push(')');
                }
            }
        }
        Formula::Forall(v, p) => {
            out.push_str("forall ");
            out.push_str(v);
            out.push_str(". ");
            print_formula(p, out);
        }
        Formula::And(a, b) => {
            out.push('(');
            print_formula(a, out);
            out.push_str(" /\\ ");
            print_formula(b, out);
            out.push(')');
        }
        Formula::BigAnd { var, body } => {
            out.push_str("/\\{");
            out.push_str(var);
            out.push_str(" in N} ");
            print_formula(body, out);
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        print_formula(self, &mut s);
        write!(f, "{s}")
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("undeclared symbol `{0}` used as a predicate")]
    UndeclaredPred(String),
    #[error("arity mismatch: `{name}` expects {expected} arguments, got {got}")]
    Arity { name: String, expected: usize, got: usize },
    #[error("symbol family `{0}` is not indexed but an index was given")]
    NotIndexed(String),
    #[error("iteration count on non-unary function `{0}`")]
    IterArity(String),
    #[error("free index metavariable `{0}` in a sentence")]
    FreeIndexVar(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Nat(u64),
    Sym(&'static str),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_alphabetic() {
            let mut j = i + 1;
            while j < bytes.len()
                && ((bytes[j] as char).is_ascii_alphanumeric() || bytes[j] == b'\'')
            {
                j += 1;
            }
            toks.push((start, Tok::Ident(text[i..j].to_string())));
            i = j;
        } else if c.is_ascii_digit() {
            let mut j = i + 1;
            while j < bytes.len() && (bytes[j] as char).is_ascii_digit() {
                j += 1;
            }
            let n: u64 = text[i..j].parse().map_err(|_| ParseError::Syntax {
                pos: start,
                msg: "number too large".into(),
            })?;
            toks.push((start, Tok::Nat(n)));
            i = j;
        } else {
            let two = if i + 1 < bytes.len() { &text[i..i + 2] } else { "" };
            let sym: &'static str = match two {
                "/\\" => "/\\",
                "\\/" => "\\/",
                "->" => "->",
                _ => match c {
                    '~' => "~",
                    '(' => "(",
                    ')' => ")",
                    '{' => "{",
                    '}' => "}",
                    ',' => ",",
                    '.' => ".",
                    '_' => "_",
                    '^' => "^",
                    '+' => "+",
                    '*' => "*",
                    _ => {
                        return Err(ParseError::Syntax {
                            pos: start,
                            msg: format!("unexpected character `{c}`"),
                        })
                    }
                },
            };
            i += sym.len();
            toks.push((start, Tok::Sym(sym)));
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    sig: &'a Signature,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { pos: self.here(), msg: msg.into() })
    }

    fn eat_sym(&mut self, s: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Sym(t)) if *t == s => {
                self.pos += 1;
                Ok(())
            }
            _ => self.err(format!("expected `{s}`")),
        }
    }

    fn at_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(t)) if *t == s)
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.bump() {
            Some(Tok::Ident(s)) => Ok(s),
            _ => {
                self.pos = self.pos.saturating_sub(1);
                self.err("expected identifier")
            }
        }
    }

    // formula := conj ( "->" formula )?
    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.conj()?;
        if self.at_sym("->") {
            self.pos += 1;
            let rhs = self.formula()?;
            // φ -> ψ desugars to ¬(φ ∧ ¬ψ)
            return Ok(Formula::not(Formula::and(lhs, Formula::not(rhs))));
        }
        Ok(lhs)
    }

    // conj := unary ( "/\" unary )*  (binary conjunction, left-associated;
    // "/\{" starts a countable conjunction instead and is handled in unary)
    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.unary()?;
        while self.at_sym("/\\") {
            // lookahead: `/\{` is a quantifier prefix, not the binary operator
            if matches!(self.toks.get(self.pos + 1), Some((_, Tok::Sym("{")))) {
                break;
            }
            self.pos += 1;
            let rhs = self.unary()?;
            acc = Formula::and(acc, rhs);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Sym("~")) => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::Sym("(")) => {
                self.pos += 1;
                let f = self.formula()?;
                self.eat_sym(")")?;
                Ok(f)
            }
            Some(Tok::Sym("/\\")) | Some(Tok::Sym("\\/")) => {
                let is_or = self.at_sym("\\/");
                self.pos += 1;
                self.eat_sym("{")?;
                let var = self.ident()?;
                let kw = self.ident()?;
                if kw != "in" {
                    return self.err("expected `in`");
                }
                let set = match self.bump() {
                    Some(Tok::Ident(s)) if s == "N" => "N",
                    Some(Tok::Nat(2)) => "2",
                    _ => return self.err("expected index set `N` or `2`"),
                };
                self.eat_sym("}")?;
                let body = self.formula()?;
                let conj = if set == "N" {
                    Formula::big_and(var, if is_or { Formula::not(body) } else { body })
                } else {
                    // pair index set: instantiate the template at 0 and 1
                    let b = if is_or { Formula::not(body) } else { body };
                    Formula::and(instantiate(&b, &var, 0), instantiate(&b, &var, 1))
                };
                Ok(if is_or { Formula::not(conj) } else { conj })
            }
            Some(Tok::Ident(w)) if w == "forall" || w == "exists" => {
                let is_exists = w == "exists";
                self.pos += 1;
                let var = self.ident()?;
                self.eat_sym(".")?;
                let body = self.formula()?;
                Ok(if is_exists {
                    Formula::not(Formula::forall(var, Formula::not(body)))
                } else {
                    Formula::forall(var, body)
                })
            }
            Some(Tok::Ident(_)) => self.atom(),
            _ => self.err("expected formula"),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let name = self.ident()?;
        let decl = self
            .sig
            .pred(&name)
            .ok_or_else(|| ParseError::UndeclaredPred(name.clone()))?
            .clone();
        let index = self.opt_index_suffix()?;
        if index.is_some() && !decl.indexed {
            return Err(ParseError::NotIndexed(name));
        }
        self.eat_sym("(")?;
        let mut args = Vec::new();
        if !self.at_sym(")") {
            loop {
                args.push(self.term()?);
                if self.at_sym(",") {
                    self.pos += 1;
                } else {
                    break;
                }
            }
        }
        self.eat_sym(")")?;
        if args.len() != decl.arity {
            return Err(ParseError::Arity {
                name,
                expected: decl.arity,
                got: args.len(),
            });
        }
        Ok(Formula::Atomic { pred: name, index, args })
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let name = self.ident()?;
        if let Some(decl) = self.sig.constant(&name).cloned() {
            let index = self.opt_index_suffix()?;
            if index.is_some() && !decl.indexed {
                return Err(ParseError::NotIndexed(name));
            }
            return Ok(Term::Const { family: name, index });
        }
        if let Some(decl) = self.sig.func(&name).cloned() {
            let index = self.opt_index_suffix()?;
            if index.is_some() && !decl.indexed {
                return Err(ParseError::NotIndexed(name));
            }
            let iter = if self.at_sym("^") {
                self.pos += 1;
                if decl.arity != 1 {
                    return Err(ParseError::IterArity(name));
                }
                Some(self.iexpr_suffix()?)
            } else {
                None
            };
            self.eat_sym("(")?;
            let mut args = Vec::new();
            if !self.at_sym(")") {
                loop {
                    args.push(self.term()?);
                    if self.at_sym(",") {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
            }
            self.eat_sym(")")?;
            if args.len() != decl.arity {
                return Err(ParseError::Arity {
                    name,
                    expected: decl.arity,
                    got: args.len(),
                });
            }
            return Ok(Term::App { family: name, index, iter, args });
        }
        Ok(Term::Var(name))
    }

    fn opt_index_suffix(&mut self) -> Result<Option<IndexExpr>, ParseError> {
        if self.at_sym("_") {
            self.pos += 1;
            Ok(Some(self.iexpr_suffix()?))
        } else {
            Ok(None)
        }
    }

    // after `_` or `^`: either a braced full expression or a single atom
    fn iexpr_suffix(&mut self) -> Result<IndexExpr, ParseError> {
        if self.at_sym("{") {
            self.pos += 1;
            let e = self.iexpr()?;
            self.eat_sym("}")?;
            Ok(e)
        } else {
            self.iexpr_atom()
        }
    }

    fn iexpr(&mut self) -> Result<IndexExpr, ParseError> {
        let mut acc = self.iterm()?;
        while self.at_sym("+") {
            self.pos += 1;
            let rhs = self.iterm()?;
            acc = IndexExpr::Add(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn iterm(&mut self) -> Result<IndexExpr, ParseError> {
        let mut acc = self.iexpr_atom()?;
        while self.at_sym("*") {
            self.pos += 1;
            let rhs = self.iexpr_atom()?;
            acc = IndexExpr::Mul(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn iexpr_atom(&mut self) -> Result<IndexExpr, ParseError> {
        match self.bump() {
            Some(Tok::Nat(n)) => Ok(IndexExpr::Lit(n)),
            Some(Tok::Ident(s)) if s == "max" => {
                self.eat_sym("(")?;
                let a = self.iexpr()?;
                self.eat_sym(",")?;
                let b = self.iexpr()?;
                self.eat_sym(")")?;
                Ok(IndexExpr::Max(Box::new(a), Box::new(b)))
            }
            Some(Tok::Ident(s)) => Ok(IndexExpr::Var(s)),
            Some(Tok::Sym("(")) => {
                let e = self.iexpr()?;
                self.eat_sym(")")?;
                Ok(e)
            }
            _ => {
                self.pos = self.pos.saturating_sub(1);
                self.err("expected index expression")
            }
        }
    }
}

/// Parse and desugar. Sentences (no free object variables) must not contain
/// free index metavariables.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0, sig, end: text.len() };
    let f = p.formula()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    if f.free_vars().is_empty() {
        if let Some(v) = f.free_index_vars().into_iter().next() {
            return Err(ParseError::FreeIndexVar(v));
        }
    }
    Ok(f)
}
