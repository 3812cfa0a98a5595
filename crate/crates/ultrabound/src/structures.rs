//! Finite first-order structures with indexed symbol families, a Tarskian
//! evaluator, family-file ingestion, and generators for the built-in example
//! families (threshold metric sequence spaces and colored cycles).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_rational::Rational64;
use num_traits::Zero;
use thiserror::Error;

use crate::logic::{Formula, IndexExpr, Term};

/// Variable assignment: object variable name to universe element.
pub type Env = BTreeMap<String, u64>;

/// Tail behavior of a sequence rule past its explicit prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tail {
    /// Repeat the last `p` prefix values forever.
    Periodic(u64),
    Const(u64),
}

/// Total interpretation for an indexed constant family: explicit prefix, then
/// a periodic or constant tail, so every index has a value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeqRule {
    pub prefix: Vec<u64>,
    pub tail: Tail,
}

impl SeqRule {
    pub fn value(&self, k: u64) -> u64 {
        let l = self.prefix.len() as u64;
        if k < l {
            self.prefix[k as usize]
        } else {
            match self.tail {
                Tail::Const(v) => v,
                Tail::Periodic(p) => self.prefix[(l - p + (k - l) % p) as usize],
            }
        }
    }
}

/// Finite structure. Elements are `0..size`. Interpretations are finite
/// tables keyed by (family, optional index), plus two rule forms that make
/// indexed families total: a rational distance matrix interpreting the
/// threshold predicates `D_n(x,y) <=> d(x,y) < 1/n`, and sequence rules
/// interpreting indexed constant families at every index.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Structure {
    pub label: String,
    pub size: u64,
    pub preds: BTreeMap<(String, Option<u64>), BTreeSet<Vec<u64>>>,
    pub funcs: BTreeMap<String, Vec<u64>>,
    pub consts: BTreeMap<(String, Option<u64>), u64>,
    pub dist: Option<Vec<Vec<Rational64>>>,
    pub seq: BTreeMap<String, SeqRule>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("formula is not first-order")]
    NotFirstOrder,
    #[error("unbound variable `{0}`")]
    UnboundVar(String),
    #[error("index expression is not closed")]
    OpenIndex,
    #[error("no interpretation for `{0}`{1}")]
    NoInterpretation(String, String),
    #[error("term evaluates outside the universe")]
    OutOfUniverse,
}

fn idx_suffix(index: Option<u64>) -> String {
    match index {
        Some(k) => format!("_{k}"),
        None => String::new(),
    }
}

impl Structure {
    /// Distance-threshold truth: D_n(x,y) holds iff d(x,y) < 1/n, with the
    /// index-0 threshold read as infinity (always true).
    pub fn dist_below(&self, n: u64, x: u64, y: u64) -> Option<bool> {
        let m = self.dist.as_ref()?;
        let d = m[x as usize][y as usize];
        Some(n == 0 || d < Rational64::new(1, n as i64))
    }

    fn pred_holds(&self, family: &str, index: Option<u64>, tuple: &[u64]) -> Result<bool, EvalError> {
        if let Some(table) = self.preds.get(&(family.to_string(), index)) {
            return Ok(table.contains(tuple));
        }
        if family == "D" && tuple.len() == 2 {
            if let Some(n) = index {
                if let Some(v) = self.dist_below(n, tuple[0], tuple[1]) {
                    return Ok(v);
                }
            }
        }
        if index.is_none() {
            // plain predicates default to the empty relation
            return Ok(false);
        }
        Err(EvalError::NoInterpretation(family.to_string(), idx_suffix(index)))
    }

    fn const_value(&self, family: &str, index: Option<u64>) -> Result<u64, EvalError> {
        if let Some(v) = self.consts.get(&(family.to_string(), index)) {
            return Ok(*v);
        }
        if let (Some(k), Some(rule)) = (index, self.seq.get(family)) {
            return Ok(rule.value(k));
        }
        Err(EvalError::NoInterpretation(family.to_string(), idx_suffix(index)))
    }

    fn func_apply(&self, family: &str, arg: u64) -> Result<u64, EvalError> {
        let table = self
            .funcs
            .get(family)
            .ok_or_else(|| EvalError::NoInterpretation(family.to_string(), String::new()))?;
        table.get(arg as usize).copied().ok_or(EvalError::OutOfUniverse)
    }

    fn eval_term(&self, t: &Term, env: &Env) -> Result<u64, EvalError> {
        match t {
            Term::Var(v) => env.get(v).copied().ok_or_else(|| EvalError::UnboundVar(v.clone())),
            Term::Const { family, index } => {
                let idx = close(index)?;
                let v = self.const_value(family, idx)?;
                if v >= self.size {
                    return Err(EvalError::OutOfUniverse);
                }
                Ok(v)
            }
            Term::App { family, index, iter, args } => {
                if close(index)?.is_some() {
                    return Err(EvalError::NoInterpretation(family.clone(), "_?".into()));
                }
                let count = match iter {
                    Some(e) => e.as_closed().ok_or(EvalError::OpenIndex)?,
                    None => 1,
                };
                if args.len() == 1 {
                    let mut v = self.eval_term(&args[0], env)?;
                    for _ in 0..count {
                        v = self.func_apply(family, v)?;
                    }
                    Ok(v)
                } else {
                    // no multi-argument function tables in the built-ins yet
                    Err(EvalError::NoInterpretation(family.clone(), String::new()))
                }
            }
        }
    }

    fn check(&self) -> Result<(), String> {
        if self.size == 0 {
            return Err("empty universe".into());
        }
        for ((fam, idx), table) in &self.preds {
            for tuple in table {
                if tuple.iter().any(|&x| x >= self.size) {
                    return Err(format!(
                        "pred {fam}{} row ({}) references an element outside 0..{}",
                        idx_suffix(*idx),
                        tuple.iter().map(u64::to_string).collect::<Vec<_>>().join(","),
                        self.size
                    ));
                }
            }
        }
        for (fam, table) in &self.funcs {
            if table.len() as u64 != self.size || table.iter().any(|&v| v >= self.size) {
                return Err(format!("function {fam} is not a total map on the universe"));
            }
        }
        for ((fam, idx), v) in &self.consts {
            if *v >= self.size {
                return Err(format!("constant {fam}{} outside universe", idx_suffix(*idx)));
            }
        }
        if let Some(m) = &self.dist {
            if m.len() as u64 != self.size || m.iter().any(|row| row.len() != m.len()) {
                return Err("distance matrix shape does not match the universe".into());
            }
            let one = Rational64::new(1, 1);
            for x in 0..m.len() {
                if !m[x][x].is_zero() {
                    return Err("distance matrix has nonzero diagonal".into());
                }
                for y in 0..m.len() {
                    if m[x][y] != m[y][x] {
                        return Err("distance matrix not symmetric".into());
                    }
                    if m[x][y] < Rational64::zero() || m[x][y] > one {
                        return Err("distance matrix diameter exceeds 1".into());
                    }
                }
            }
            // explicit D-tables must agree with the rule where both exist
            for ((fam, idx), table) in &self.preds {
                if fam != "D" {
                    continue;
                }
                let n = match idx {
                    Some(n) => *n,
                    None => continue,
                };
                for x in 0..self.size {
                    for y in 0..self.size {
                        let by_rule = self.dist_below(n, x, y).unwrap();
                        if by_rule != table.contains(&vec![x, y]) {
                            return Err(format!(
                                "table for D_{n} disagrees with the distance rule at ({x},{y})"
                            ));
                        }
                    }
                }
            }
        }
        for (fam, rule) in &self.seq {
            if let Tail::Periodic(p) = rule.tail {
                if p == 0 || p as usize > rule.prefix.len() {
                    return Err(format!("seq rule for {fam}: bad period {p}"));
                }
            }
            let probe = rule.prefix.len() as u64 + 4;
            for k in 0..probe {
                if rule.value(k) >= self.size {
                    return Err(format!("seq rule for {fam} leaves the universe at index {k}"));
                }
            }
        }
        Ok(())
    }
}

fn close(index: &Option<IndexExpr>) -> Result<Option<u64>, EvalError> {
    match index {
        None => Ok(None),
        Some(e) => e.as_closed().map(Some).ok_or(EvalError::OpenIndex),
    }
}

/// Standard Tarskian satisfaction over the finite universe. The formula must
/// be first-order (no conjunctions over the naturals).
pub fn eval_fo(m: &Structure, f: &Formula, env: &Env) -> Result<bool, EvalError> {
    match f {
        Formula::Atomic { pred, index, args } => {
            let idx = close(index)?;
            let tuple = args
                .iter()
                .map(|t| m.eval_term(t, env))
                .collect::<Result<Vec<_>, _>>()?;
            m.pred_holds(pred, idx, &tuple)
        }
        Formula::Not(p) => Ok(!eval_fo(m, p, env)?),
        Formula::And(a, b) => Ok(eval_fo(m, a, env)? && eval_fo(m, b, env)?),
        Formula::Forall(x, body) => {
            let mut env = env.clone();
            for u in 0..m.size {
                env.insert(x.clone(), u);
                if !eval_fo(m, body, &env)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::BigAnd { .. } => Err(EvalError::NotFirstOrder),
    }
}

/// A finite prefix of a structure sequence. Indices at or past `tail_start`
/// stand in for "all but finitely many".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilySpec {
    pub structures: Vec<Structure>,
    pub tail_start: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FamilyError {
    #[error("line {0}: {1}")]
    Parse(usize, String),
    #[error("structure `{0}`: {1}")]
    Invalid(String, String),
    #[error("family is empty")]
    Empty,
    #[error("tail-start {0} is not below the family length {1}")]
    TailStart(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeqKind {
    /// Two-point space with c_k = 1 iff k < i or k is even: every structure's
    /// sequence diverges, but the limits along even indices agree.
    EvenTail,
    /// Two-point space with c_k = k mod 2 for every i: uniformly divergent.
    Parity,
}

/// Cyclic structure: successor S(x) = x+1 mod n with cell predicates U_i
/// read from a partition of the universe.
pub fn gen_cycle(n: u64, parts: &[BTreeSet<u64>]) -> Result<Structure, FamilyError> {
    let mut seen = BTreeSet::new();
    for p in parts {
        for &x in p {
            if x >= n || !seen.insert(x) {
                return Err(FamilyError::Invalid(
                    format!("cycle{n}"),
                    "cells do not partition the universe".into(),
                ));
            }
        }
    }
    if seen.len() as u64 != n {
        return Err(FamilyError::Invalid(
            format!("cycle{n}"),
            "cells do not partition the universe".into(),
        ));
    }
    let mut m = Structure {
        label: format!("cycle{n}"),
        size: n,
        ..Structure::default()
    };
    m.funcs.insert("S".into(), (0..n).map(|x| (x + 1) % n).collect());
    for (i, p) in parts.iter().enumerate() {
        m.preds.insert(
            ("U".into(), Some(i as u64)),
            p.iter().map(|&x| vec![x]).collect(),
        );
    }
    Ok(m)
}

/// Two-point threshold sequence space: d(0,1) = 1, constants c_k given by the
/// chosen sequence rule at stage i.
pub fn gen_sequence_space(i: u64, kind: SeqKind) -> Structure {
    let one = Rational64::new(1, 1);
    let zero = Rational64::zero();
    let rule = match kind {
        SeqKind::EvenTail => SeqRule {
            prefix: (0..i + 2).map(|k| u64::from(k < i || k % 2 == 0)).collect(),
            tail: Tail::Periodic(2),
        },
        SeqKind::Parity => SeqRule { prefix: vec![0, 1], tail: Tail::Periodic(2) },
    };
    let mut m = Structure {
        label: format!(
            "{}{}",
            match kind {
                SeqKind::EvenTail => "seq",
                SeqKind::Parity => "parity",
            },
            i
        ),
        size: 2,
        dist: Some(vec![vec![zero, one], vec![one, zero]]),
        ..Structure::default()
    };
    m.seq.insert("c".into(), rule);
    debug_assert!(m.check().is_ok());
    m
}

/// Sequence space over an explicit point set: rational distance matrix and a
/// sequence rule for the constants c_k.
pub fn gen_custom_space(
    label: &str,
    dist: Vec<Vec<Rational64>>,
    rule: SeqRule,
) -> Result<Structure, FamilyError> {
    let mut m = Structure {
        label: label.to_string(),
        size: dist.len() as u64,
        dist: Some(dist),
        ..Structure::default()
    };
    m.seq.insert("c".into(), rule);
    m.check().map_err(|e| FamilyError::Invalid(label.to_string(), e))?;
    Ok(m)
}

fn parse_rational(s: &str, ln: usize) -> Result<Rational64, FamilyError> {
    let bad = || FamilyError::Parse(ln, format!("bad rational `{s}`"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            Ok(Rational64::new(p, q))
        }
        None => {
            let p: i64 = s.trim().parse().map_err(|_| bad())?;
            Ok(Rational64::new(p, 1))
        }
    }
}

fn parse_range(s: &str, ln: usize) -> Result<(u64, u64), FamilyError> {
    let bad = || FamilyError::Parse(ln, format!("bad range `{s}`"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let a: u64 = a.trim().parse().map_err(|_| bad())?;
    let b: u64 = b.trim().parse().map_err(|_| bad())?;
    if b < a {
        return Err(bad());
    }
    Ok((a, b))
}

// `D_3` -> ("D", Some(3)); `E` -> ("E", None)
fn parse_sym(s: &str, ln: usize) -> Result<(String, Option<u64>), FamilyError> {
    match s.split_once('_') {
        Some((fam, idx)) => {
            let k: u64 = idx
                .parse()
                .map_err(|_| FamilyError::Parse(ln, format!("bad index in `{s}`")))?;
            Ok((fam.to_string(), Some(k)))
        }
        None => Ok((s.to_string(), None)),
    }
}

/// Parse a family file. Stanzas:
///   tail-start <i>
///   structure <label> / universe <n> / pred F[_k] { (a,b); (c,d) } /
///     rule dist (followed by n rows of n rationals) /
///     rule seq <family> prefix [v0 v1 ...] tail (periodic <p> | const <v>)
///   seqspace (eventail|parity) <a>..<b>
///   cycle <a>..<b> [coloring mod<k>]
pub fn parse_family(text: &str) -> Result<FamilySpec, FamilyError> {
    let lines: Vec<&str> = text.lines().collect();
    let mut structures: Vec<Structure> = Vec::new();
    let mut tail_start: usize = 0;
    let mut current: Option<Structure> = None;
    let mut i = 0;

    let finish = |cur: &mut Option<Structure>, out: &mut Vec<Structure>| -> Result<(), FamilyError> {
        if let Some(m) = cur.take() {
            m.check().map_err(|e| FamilyError::Invalid(m.label.clone(), e))?;
            out.push(m);
        }
        Ok(())
    };

    while i < lines.len() {
        let ln = i + 1;
        let line = lines[i].trim();
        i += 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        match words[0] {
            "tail-start" => {
                tail_start = words
                    .get(1)
                    .and_then(|w| w.parse().ok())
                    .ok_or_else(|| FamilyError::Parse(ln, "bad tail-start".into()))?;
            }
            "structure" => {
                finish(&mut current, &mut structures)?;
                let label = words.get(1).unwrap_or(&"unnamed").to_string();
                current = Some(Structure { label, ..Structure::default() });
            }
            "universe" => {
                let m = current
                    .as_mut()
                    .ok_or_else(|| FamilyError::Parse(ln, "universe outside a structure".into()))?;
                m.size = words
                    .get(1)
                    .and_then(|w| w.parse().ok())
                    .ok_or_else(|| FamilyError::Parse(ln, "bad universe size".into()))?;
            }
            "pred" => {
                let m = current
                    .as_mut()
                    .ok_or_else(|| FamilyError::Parse(ln, "pred outside a structure".into()))?;
                let sym = words
                    .get(1)
                    .ok_or_else(|| FamilyError::Parse(ln, "pred needs a symbol".into()))?;
                let key = parse_sym(sym, ln)?;
                let open = line
                    .find('{')
                    .ok_or_else(|| FamilyError::Parse(ln, "pred needs `{ ... }`".into()))?;
                let close = line
                    .rfind('}')
                    .ok_or_else(|| FamilyError::Parse(ln, "pred needs `{ ... }`".into()))?;
                let body = &line[open + 1..close];
                let mut table = BTreeSet::new();
                for group in body.split(';') {
                    let row: Vec<u64> = group
                        .split(|c: char| c == '(' || c == ')' || c == ',' || c.is_whitespace())
                        .filter(|w| !w.is_empty())
                        .map(|w| {
                            w.parse::<u64>()
                                .map_err(|_| FamilyError::Parse(ln, format!("bad tuple `{group}`")))
                        })
                        .collect::<Result<_, _>>()?;
                    if !row.is_empty() {
                        table.insert(row);
                    }
                }
                m.preds.insert(key, table);
            }
            "rule" => {
                let m = current
                    .as_mut()
                    .ok_or_else(|| FamilyError::Parse(ln, "rule outside a structure".into()))?;
                match words.get(1) {
                    Some(&"dist") => {
                        let n = m.size as usize;
                        let mut matrix = Vec::with_capacity(n);
                        for r in 0..n {
                            let row_ln = i + 1;
                            let row_line = lines
                                .get(i)
                                .ok_or_else(|| FamilyError::Parse(row_ln, "missing matrix row".into()))?;
                            i += 1;
                            let row: Vec<Rational64> = row_line
                                .split_whitespace()
                                .map(|w| parse_rational(w, row_ln))
                                .collect::<Result<_, _>>()?;
                            if row.len() != n {
                                return Err(FamilyError::Parse(
                                    row_ln,
                                    format!("matrix row {r} has {} entries, want {n}", row.len()),
                                ));
                            }
                            matrix.push(row);
                        }
                        m.dist = Some(matrix);
                    }
                    Some(&"seq") => {
                        let fam = words
                            .get(2)
                            .ok_or_else(|| FamilyError::Parse(ln, "rule seq needs a family".into()))?
                            .to_string();
                        let rest = line.splitn(4, char::is_whitespace).nth(3).unwrap_or("");
                        let open = rest
                            .find('[')
                            .ok_or_else(|| FamilyError::Parse(ln, "seq needs `prefix [ ... ]`".into()))?;
                        let close = rest
                            .find(']')
                            .ok_or_else(|| FamilyError::Parse(ln, "seq needs `prefix [ ... ]`".into()))?;
                        let prefix: Vec<u64> = rest[open + 1..close]
                            .split_whitespace()
                            .map(|w| {
                                w.parse::<u64>()
                                    .map_err(|_| FamilyError::Parse(ln, format!("bad prefix value `{w}`")))
                            })
                            .collect::<Result<_, _>>()?;
                        let tail_words: Vec<&str> =
                            rest[close + 1..].split_whitespace().collect();
                        let tail = match tail_words.as_slice() {
                            ["tail", "periodic", p] => Tail::Periodic(p.parse().map_err(|_| {
                                FamilyError::Parse(ln, format!("bad period `{p}`"))
                            })?),
                            ["tail", "const", v] => Tail::Const(v.parse().map_err(|_| {
                                FamilyError::Parse(ln, format!("bad tail value `{v}`"))
                            })?),
                            _ => {
                                return Err(FamilyError::Parse(
                                    ln,
                                    "seq needs `tail periodic <p>` or `tail const <v>`".into(),
                                ))
                            }
                        };
                        m.seq.insert(fam, SeqRule { prefix, tail });
                    }
                    _ => return Err(FamilyError::Parse(ln, "unknown rule".into())),
                }
            }
            "seqspace" => {
                finish(&mut current, &mut structures)?;
                let kind = match words.get(1) {
                    Some(&"eventail") => SeqKind::EvenTail,
                    Some(&"parity") => SeqKind::Parity,
                    _ => return Err(FamilyError::Parse(ln, "seqspace kind must be eventail or parity".into())),
                };
                let (a, b) = parse_range(
                    words.get(2).ok_or_else(|| FamilyError::Parse(ln, "seqspace needs a range".into()))?,
                    ln,
                )?;
                for j in a..=b {
                    structures.push(gen_sequence_space(j, kind));
                }
            }
            "cycle" => {
                finish(&mut current, &mut structures)?;
                let (a, b) = parse_range(
                    words.get(1).ok_or_else(|| FamilyError::Parse(ln, "cycle needs a range".into()))?,
                    ln,
                )?;
                let k: u64 = match words.get(2) {
                    Some(&"coloring") => {
                        let spec = words
                            .get(3)
                            .ok_or_else(|| FamilyError::Parse(ln, "coloring needs a spec".into()))?;
                        spec.strip_prefix("mod")
                            .and_then(|w| w.parse().ok())
                            .filter(|&k| k > 0)
                            .ok_or_else(|| FamilyError::Parse(ln, format!("bad coloring `{spec}`")))?
                    }
                    None => 2,
                    Some(w) => return Err(FamilyError::Parse(ln, format!("unexpected `{w}`"))),
                };
                for n in a..=b {
                    let cells = k.min(n);
                    let parts: Vec<BTreeSet<u64>> = (0..cells)
                        .map(|c| (0..n).filter(|x| x % cells == c).collect())
                        .collect();
                    structures.push(gen_cycle(n, &parts)?);
                }
            }
            w => return Err(FamilyError::Parse(ln, format!("unknown directive `{w}`"))),
        }
    }
    finish(&mut current, &mut structures)?;

    if structures.is_empty() {
        return Err(FamilyError::Empty);
    }
    if tail_start >= structures.len() {
        return Err(FamilyError::TailStart(tail_start, structures.len()));
    }
    Ok(FamilySpec { structures, tail_start })
}

pub fn load_family(path: &std::path::Path) -> Result<FamilySpec, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_family(&text).map_err(|e| e.to_string())
}

/// Render a structure summary for the CLI.
pub fn describe(m: &Structure) -> String {
    let mut s = String::new();
    let _ = write!(s, "structure {} (universe {})", m.label, m.size);
    if m.dist.is_some() {
        let _ = write!(s, ", metric");
    }
    for fam in m.seq.keys() {
        let _ = write!(s, ", seq {fam}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_formula, Signature};

    fn sig() -> Signature {
        Signature::default_sig()
    }

    fn ev(m: &Structure, text: &str) -> bool {
        let f = parse_formula(text, &sig()).unwrap();
        eval_fo(m, &f, &Env::new()).unwrap()
    }

    #[test]
    fn cycle_with_empty_relation() {
        let parts: Vec<BTreeSet<u64>> = vec![(0..5).collect()];
        let m = gen_cycle(5, &parts).unwrap();
        assert!(ev(&m, "forall x. ~E(x, S(x))"));
    }

    #[test]
    fn constant_sequence_is_cauchy_at_every_threshold() {
        let m = gen_custom_space(
            "const1",
            vec![
                vec![Rational64::new(0, 1), Rational64::new(1, 1)],
                vec![Rational64::new(1, 1), Rational64::new(0, 1)],
            ],
            SeqRule { prefix: vec![], tail: Tail::Const(1) },
        )
        .unwrap();
        assert!(ev(&m, "D_2(c_0, c_7)"));
    }

    #[test]
    fn two_point_space_separates_at_threshold_one() {
        let m = gen_custom_space(
            "sep",
            vec![
                vec![Rational64::new(0, 1), Rational64::new(1, 1)],
                vec![Rational64::new(1, 1), Rational64::new(0, 1)],
            ],
            SeqRule { prefix: vec![0, 1], tail: Tail::Const(1) },
        )
        .unwrap();
        assert!(!ev(&m, "D_1(c_0, c_1)"));
        assert!(ev(&m, "D_0(c_0, c_1)"));
    }

    #[test]
    fn eventail_sequence_values() {
        // c_k = 1 iff k < i or k even, checked well past the stored prefix
        for i in 0..12u64 {
            let m = gen_sequence_space(i, SeqKind::EvenTail);
            let rule = &m.seq["c"];
            for k in 0..60u64 {
                let want = u64::from(k < i || k % 2 == 0);
                assert_eq!(rule.value(k), want, "i={i} k={k}");
            }
        }
    }

    #[test]
    fn parity_sequence_values() {
        let m = gen_sequence_space(9, SeqKind::Parity);
        let rule = &m.seq["c"];
        for k in 0..40u64 {
            assert_eq!(rule.value(k), k % 2);
        }
    }

    #[test]
    fn cycle_fixed_point() {
        let parts: Vec<BTreeSet<u64>> = vec![[0u64].into_iter().collect()];
        let m = gen_cycle(1, &parts).unwrap();
        assert_eq!(m.funcs["S"], vec![0]);
    }

    #[test]
    fn cycle_two_cells() {
        let parts: Vec<BTreeSet<u64>> =
            vec![[0u64].into_iter().collect(), [1u64].into_iter().collect()];
        let m = gen_cycle(2, &parts).unwrap();
        assert_eq!(m.funcs["S"], vec![1, 0]);
        assert!(m.preds[&("U".into(), Some(0))].contains(&vec![0]));
        assert!(m.preds[&("U".into(), Some(1))].contains(&vec![1]));
    }

    #[test]
    fn rejects_non_partition() {
        let parts: Vec<BTreeSet<u64>> = vec![[0u64, 1].into_iter().collect(), [1u64].into_iter().collect()];
        assert!(gen_cycle(2, &parts).is_err());
    }

    #[test]
    fn forall_instantiation_sound() {
        let parts: Vec<BTreeSet<u64>> = vec![(0..4).collect()];
        let m = gen_cycle(4, &parts).unwrap();
        let f = parse_formula("forall x. U_0(x)", &sig()).unwrap();
        assert!(eval_fo(&m, &f, &Env::new()).unwrap());
        let body = parse_formula("U_0(y)", &sig()).unwrap();
        for u in 0..4 {
            let mut env = Env::new();
            env.insert("y".into(), u);
            assert!(eval_fo(&m, &body, &env).unwrap());
        }
    }

    #[test]
    fn iterated_successor() {
        let parts: Vec<BTreeSet<u64>> = vec![(0..5).filter(|x| x % 2 == 0).collect(), (0..5).filter(|x| x % 2 == 1).collect()];
        let m = gen_cycle(5, &parts).unwrap();
        // S^3(0) = 3, which is odd
        let f = parse_formula("U_1(T^0(S^3(b)))", &sig()).unwrap();
        let mut m2 = m.clone();
        m2.consts.insert(("b".into(), None), 0);
        m2.funcs.insert("T".into(), (0..5).collect());
        assert!(eval_fo(&m2, &f, &Env::new()).unwrap());
    }

    #[test]
    fn every_two_coloring_of_nine_has_a_progression() {
        // van der Waerden at n = 9: any 2-coloring of 0..9 contains a
        // monochromatic 3-term arithmetic progression, visible to the
        // evaluator through iterated successor steps
        let mut clauses = Vec::new();
        for cell in 0..2u64 {
            for d in 1..=4u64 {
                clauses.push(format!(
                    "~(exists x. U_{cell}(x) /\\ U_{cell}(S^{d}(x)) /\\ U_{cell}(S^{}(x)))",
                    2 * d
                ));
            }
        }
        // disjunction of the clauses, spelled as a negated conjunction
        let f = parse_formula(&format!("~({})", clauses.join(" /\\ ")), &sig()).unwrap();
        for mask in 0..512u64 {
            let parts: Vec<BTreeSet<u64>> = (0..2)
                .map(|c| (0..9).filter(|&x| (mask >> x) & 1 == c).collect())
                .collect();
            let m = gen_cycle(9, &parts).unwrap();
            assert!(eval_fo(&m, &f, &Env::new()).unwrap(), "mask {mask}");
        }
    }

    #[test]
    fn family_file_round_trip() {
        let text = "\
# demo family
tail-start 1

structure one
universe 2
pred E { (0,1); (1,0) }
rule dist
0 1/2
1/2 0
rule seq c prefix [0 1] tail const 1

seqspace eventail 0..2
";
        let fam = parse_family(text).unwrap();
        assert_eq!(fam.structures.len(), 4);
        assert_eq!(fam.tail_start, 1);
        let one = &fam.structures[0];
        assert_eq!(one.label, "one");
        assert!(one.preds[&("E".into(), None)].contains(&vec![0, 1]));
        assert!(ev(one, "D_1(c_0, c_1)")); // d = 1/2 < 1
        assert!(!ev(one, "D_2(c_0, c_1)")); // d = 1/2, not < 1/2
    }

    #[test]
    fn family_file_generator_count() {
        let fam = parse_family("cycle 3..12\n").unwrap();
        assert_eq!(fam.structures.len(), 10);
    }

    #[test]
    fn family_file_rejects_bad_row() {
        let text = "structure bad\nuniverse 2\npred E { (0,5) }\n";
        let err = parse_family(text).unwrap_err();
        assert!(matches!(err, FamilyError::Invalid(ref l, _) if l == "bad"));
    }

    #[test]
    fn dist_table_agreement_checked() {
        let text = "\
structure d
universe 2
pred D_1 { (0,1) }
rule dist
0 1
1 0
";
        assert!(parse_family(text).is_err());
    }

    #[test]
    fn per_structure_nonconvergence_of_eventail_family() {
        // at full threshold (distance 1) the sequence keeps oscillating
        for i in 0..10u64 {
            let m = gen_sequence_space(i, SeqKind::EvenTail);
            let rule = &m.seq["c"];
            let mut found = false;
            for mlo in 0..=2 * i + 4 {
                for mhi in mlo + 1..=2 * i + 4 {
                    if rule.value(mlo) != rule.value(mhi) {
                        found = true;
                    }
                }
            }
            assert!(found, "sequence {i} converged");
        }
    }
}
