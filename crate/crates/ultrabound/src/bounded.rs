//! Decisive pairs, bounded satisfaction, and compilation of bounded
//! satisfaction into plain first-order formulas.

use thiserror::Error;

use crate::fragments::{
    enumerate_below, in_f, is_coherent, space_of, subseteq, Fragment, Role, Space,
};
use crate::logic::{instantiate, Formula};
use crate::structures::{eval_fo, Env, EvalError, Structure};

/// A (forall-fragment, exists-fragment) pair that carries enough data for
/// bounded evaluation to terminate at every branch of the formula.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DecisivePair {
    pub a: Fragment,
    pub e: Fragment,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BoundedError {
    #[error("pair is not decisive for the formula")]
    NotDecisive,
    #[error("formula is not first-order")]
    NotFirstOrder,
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("compiled disjunction has {size} branches, above the cap {cap}")]
    BoundTooLarge { size: usize, cap: usize },
}

/// The component formula at index `i` of a conjunction node.
pub fn component(f: &Formula, i: u64) -> Formula {
    match f {
        Formula::And(a, b) => {
            if i == 0 {
                (**a).clone()
            } else {
                (**b).clone()
            }
        }
        Formula::BigAnd { var, body } => instantiate(body, var, i),
        _ => unreachable!("component of a non-conjunction"),
    }
}

/// The decisiveness predicate: at every negation the forall side must answer
/// every refinement of the exists side through some committed key.
pub fn is_decisive(a: &Fragment, e: &Fragment, f: &Formula) -> bool {
    match f {
        Formula::Atomic { .. } => {
            matches!((a, e), (Fragment::Star, Fragment::Star))
        }
        Formula::Forall(_, body) => is_decisive(a, e, body),
        Formula::Not(body) => {
            let e_space = space_of(Role::Forall, body);
            let Fragment::FnMap(_) = a else { return false };
            enumerate_below(&e_space, e)
                .iter()
                .all(|e2| canonical_answer(a, &e_space, e2, body).is_some())
        }
        Formula::And(..) | Formula::BigAnd { .. } => {
            let (Fragment::IndexMap(ae), Fragment::ComponentSet(_)) = (a, e) else {
                return false;
            };
            ae.iter().all(|(i, ai)| match idx_component(e, *i) {
                Some(r) => is_decisive(ai, r, &component(f, *i)),
                None => false,
            })
        }
    }
}

fn idx_component(e: &Fragment, i: u64) -> Option<&Fragment> {
    match e {
        Fragment::ComponentSet(entries) => {
            entries.iter().find_map(|(j, c)| (*j == i).then_some(c))
        }
        _ => None,
    }
}

// the canonical committed key answering e2: among the keys of `a` contained
// in e2 whose values make a decisive sub-pair with e2, take a
// containment-maximal one, ties broken by the structural order
fn canonical_answer<'a>(
    a: &'a Fragment,
    key_space: &Space,
    e2: &Fragment,
    body: &Formula,
) -> Option<(&'a Fragment, &'a Fragment)> {
    let Fragment::FnMap(entries) = a else { return None };
    let cands: Vec<(&Fragment, &Fragment)> = entries
        .iter()
        .filter(|(k, v)| subseteq(key_space, k, e2) && is_decisive(e2, v, body))
        .map(|(k, v)| (k, v))
        .collect();
    cands
        .iter()
        .filter(|(k, _)| {
            !cands
                .iter()
                .any(|(k2, _)| *k2 != *k && subseteq(key_space, k, k2))
        })
        .max_by_key(|(k, _)| *k)
        .copied()
}

/// Canonical total decisive pair for a first-order formula: at negations the
/// forall side commits to every refinement of the body's forall fragment,
/// answering with the body's exists fragment everywhere.
pub fn fo_decisive_pair(f: &Formula) -> Result<DecisivePair, BoundedError> {
    if !f.is_fo() {
        return Err(BoundedError::NotFirstOrder);
    }
    Ok(canonical_pair(f))
}

fn canonical_pair(f: &Formula) -> DecisivePair {
    match f {
        Formula::Atomic { .. } => DecisivePair { a: Fragment::Star, e: Fragment::Star },
        Formula::Forall(_, body) => canonical_pair(body),
        Formula::Not(body) => {
            let p = canonical_pair(body);
            let key_space = space_of(Role::Forall, body);
            let entries = enumerate_below(&key_space, &p.a)
                .into_iter()
                .map(|k| (k, p.e.clone()))
                .collect();
            DecisivePair { a: Fragment::fn_map(entries), e: p.a }
        }
        Formula::And(a, b) => {
            let p0 = canonical_pair(a);
            let p1 = canonical_pair(b);
            DecisivePair {
                a: Fragment::index_map(vec![(0, p0.a), (1, p1.a)]),
                e: Fragment::component_set(vec![(0, p0.e), (1, p1.e)]),
            }
        }
        Formula::BigAnd { .. } => unreachable!("checked first-order above"),
    }
}

/// Decisive pair for a conjunction over the naturals cut down to an explicit
/// index list, with a pair supplied per index.
pub fn pair_for_indices(pairs: Vec<(u64, DecisivePair)>) -> DecisivePair {
    DecisivePair {
        a: Fragment::index_map(pairs.iter().map(|(i, p)| (*i, p.a.clone())).collect()),
        e: Fragment::component_set(pairs.into_iter().map(|(i, p)| (i, p.e)).collect()),
    }
}

/// Bounded satisfaction: truth with every countable conjunction cut down by
/// the decisive pair.
pub fn eval_bounded(
    m: &Structure,
    p: &DecisivePair,
    f: &Formula,
    env: &Env,
) -> Result<bool, BoundedError> {
    if !is_decisive(&p.a, &p.e, f) {
        return Err(BoundedError::NotDecisive);
    }
    eval_b(m, &p.a, &p.e, f, env)
}

fn eval_b(m: &Structure, a: &Fragment, e: &Fragment, f: &Formula, env: &Env) -> Result<bool, BoundedError> {
    match f {
        Formula::Atomic { .. } => Ok(eval_fo(m, f, env)?),
        Formula::Forall(x, body) => {
            let mut env = env.clone();
            for u in 0..m.size {
                env.insert(x.clone(), u);
                if !eval_b(m, a, e, body, &env)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::Not(body) => {
            let e_space = space_of(Role::Forall, body);
            let Fragment::FnMap(entries) = a else { return Err(BoundedError::NotDecisive) };
            for e2 in enumerate_below(&e_space, e) {
                for (k, v) in entries {
                    if subseteq(&e_space, k, &e2)
                        && is_decisive(&e2, v, body)
                        && !eval_b(m, &e2, v, body, env)?
                    {
                        return Ok(true);
                    }
                }
            }
            Ok(false)
        }
        Formula::And(..) | Formula::BigAnd { .. } => {
            let Fragment::IndexMap(ae) = a else { return Err(BoundedError::NotDecisive) };
            for (i, ai) in ae {
                let r = idx_component(e, *i).ok_or(BoundedError::NotDecisive)?;
                if !eval_b(m, ai, r, &component(f, *i), env)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// Compile bounded satisfaction into a first-order formula: negations become
/// finite disjunctions over the refinements of the exists fragment,
/// conjunctions become finite conjunctions over the forall domain.
pub fn compile_fo(p: &DecisivePair, f: &Formula, cap: usize) -> Result<Formula, BoundedError> {
    if !is_decisive(&p.a, &p.e, f) {
        return Err(BoundedError::NotDecisive);
    }
    compile(&p.a, &p.e, f, f, cap)
}

fn compile(
    a: &Fragment,
    e: &Fragment,
    f: &Formula,
    root: &Formula,
    cap: usize,
) -> Result<Formula, BoundedError> {
    match f {
        Formula::Atomic { .. } => Ok(f.clone()),
        Formula::Forall(x, body) => {
            Ok(Formula::forall(x.clone(), compile(a, e, body, root, cap)?))
        }
        Formula::Not(body) => {
            let e_space = space_of(Role::Forall, body);
            let branches = enumerate_below(&e_space, e);
            if branches.len() > cap {
                return Err(BoundedError::BoundTooLarge { size: branches.len(), cap });
            }
            let mut out: Option<Formula> = None;
            for e2 in branches {
                let (_, v) =
                    canonical_answer(a, &e_space, &e2, body).ok_or(BoundedError::NotDecisive)?;
                let inner = Formula::not(compile(&e2, v, body, root, cap)?);
                out = Some(match out {
                    None => inner,
                    Some(acc) => Formula::or(acc, inner),
                });
            }
            out.ok_or(BoundedError::NotDecisive)
        }
        Formula::And(..) | Formula::BigAnd { .. } => {
            let Fragment::IndexMap(ae) = a else { return Err(BoundedError::NotDecisive) };
            let mut out: Option<Formula> = None;
            for (i, ai) in ae {
                let r = idx_component(e, *i).ok_or(BoundedError::NotDecisive)?;
                let part = compile(ai, r, &component(f, *i), root, cap)?;
                out = Some(match out {
                    None => part,
                    Some(acc) => Formula::and(acc, part),
                });
            }
            Ok(out.unwrap_or_else(|| tautology(root)))
        }
    }
}

// an always-true closed formula built from the leftmost atom of the root
fn tautology(root: &Formula) -> Formula {
    let mut theta = leftmost_atomic(root).clone();
    for v in theta.free_index_vars() {
        theta = instantiate(&theta, &v, 0);
    }
    let mut out = Formula::not(Formula::and(theta.clone(), Formula::not(theta.clone())));
    for v in theta.free_vars() {
        out = Formula::forall(v, out);
    }
    out
}

fn leftmost_atomic(f: &Formula) -> &Formula {
    match f {
        Formula::Atomic { .. } => f,
        Formula::Not(p) | Formula::Forall(_, p) => leftmost_atomic(p),
        Formula::And(a, _) => leftmost_atomic(a),
        Formula::BigAnd { body, .. } => leftmost_atomic(body),
    }
}

/// Both fragments are self-consistent members of their spaces and the pair
/// is decisive: the invariant of a well-formed pair.
pub fn pair_well_formed(p: &DecisivePair, f: &Formula) -> bool {
    let sa = space_of(Role::Forall, f);
    let se = space_of(Role::Exists, f);
    in_f(&sa, &p.a)
        && in_f(&se, &p.e)
        && is_coherent(&sa, std::slice::from_ref(&p.a)).is_coherent()
        && is_decisive(&p.a, &p.e, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_formula, Signature};
    use crate::structures::{gen_sequence_space, SeqKind};

    fn parse(s: &str) -> Formula {
        parse_formula(s, &Signature::default_sig()).unwrap()
    }

    #[test]
    fn atomic_pair_is_decisive() {
        let f = parse("P(a)");
        assert!(is_decisive(&Fragment::Star, &Fragment::Star, &f));
    }

    #[test]
    fn negation_needs_a_committed_key() {
        let f = parse("~P(a)");
        let empty = Fragment::fn_map(vec![]);
        assert!(!is_decisive(&empty, &Fragment::Star, &f));
        let total = Fragment::fn_map(vec![(Fragment::Star, Fragment::Star)]);
        assert!(is_decisive(&total, &Fragment::Star, &f));
    }

    #[test]
    fn canonical_pairs_small() {
        let p = fo_decisive_pair(&parse("P(a)")).unwrap();
        assert_eq!(p, DecisivePair { a: Fragment::Star, e: Fragment::Star });
        let p = fo_decisive_pair(&parse("~P(a)")).unwrap();
        assert_eq!(p.a, Fragment::fn_map(vec![(Fragment::Star, Fragment::Star)]));
        assert_eq!(p.e, Fragment::Star);
        assert!(is_decisive(&p.a, &p.e, &parse("~P(a)")));
    }

    #[test]
    fn canonical_pair_binary_conjunction() {
        let f = parse("P(a) /\\ Q(b)");
        let p = fo_decisive_pair(&f).unwrap();
        assert_eq!(
            p.a,
            Fragment::index_map(vec![(0, Fragment::Star), (1, Fragment::Star)])
        );
        assert_eq!(
            p.e,
            Fragment::component_set(vec![(0, Fragment::Star), (1, Fragment::Star)])
        );
        assert!(is_decisive(&p.a, &p.e, &f));
    }

    #[test]
    fn canonical_pair_decisive_for_nested_negations() {
        for text in ["~~P(a)", "~(P(a) /\\ ~Q(b))", "exists x. P(x)", "forall x. ~~E(x, S(x))"] {
            let f = parse(text);
            let p = fo_decisive_pair(&f).unwrap();
            assert!(is_decisive(&p.a, &p.e, &f), "{text}");
            assert!(pair_well_formed(&p, &f), "{text}");
        }
    }

    #[test]
    fn bounded_eval_matches_fo_on_atomic() {
        let m = gen_sequence_space(3, SeqKind::EvenTail);
        let f = parse("D_1(c_0, c_0)");
        let p = fo_decisive_pair(&f).unwrap();
        assert_eq!(eval_bounded(&m, &p, &f, &Env::new()), Ok(true));
    }

    #[test]
    fn bounded_eval_pi1_truncation() {
        // conjunction over the naturals cut to indices {0,1}: both components
        // must hold, later ones are not consulted
        let f = parse("/\\{n in N} D_{n+1}(c_0, c_2)");
        let pairs = vec![
            (0, DecisivePair { a: Fragment::Star, e: Fragment::Star }),
            (1, DecisivePair { a: Fragment::Star, e: Fragment::Star }),
        ];
        let p = pair_for_indices(pairs);
        assert!(is_decisive(&p.a, &p.e, &f));
        let m = gen_sequence_space(5, SeqKind::EvenTail); // c_0 = c_2 = 1
        assert_eq!(eval_bounded(&m, &p, &f, &Env::new()), Ok(true));
        let m2 = gen_sequence_space(0, SeqKind::Parity); // c_0 = 0, c_2 = 0
        assert_eq!(eval_bounded(&m2, &p, &f, &Env::new()), Ok(true));
        let f_apart = parse("/\\{n in N} D_{n+1}(c_0, c_1)");
        assert_eq!(eval_bounded(&m2, &p, &f_apart, &Env::new()), Ok(false));
    }

    #[test]
    fn compile_atomic_is_identity() {
        let f = parse("D_1(c_0, c_0)");
        let p = fo_decisive_pair(&f).unwrap();
        assert_eq!(compile_fo(&p, &f, 1000), Ok(f));
    }

    #[test]
    fn compile_output_is_first_order() {
        let f = parse("/\\{n in N} D_{n+1}(c_0, c_2)");
        let p = pair_for_indices(vec![
            (0, DecisivePair { a: Fragment::Star, e: Fragment::Star }),
            (2, DecisivePair { a: Fragment::Star, e: Fragment::Star }),
        ]);
        let out = compile_fo(&p, &f, 1000).unwrap();
        assert!(out.is_fo());
        // and it evaluates like the bounded relation
        for i in [0u64, 3, 8] {
            let m = gen_sequence_space(i, SeqKind::EvenTail);
            assert_eq!(
                eval_fo(&m, &out, &Env::new()).unwrap(),
                eval_bounded(&m, &p, &f, &Env::new()).unwrap(),
                "i={i}"
            );
        }
    }

    #[test]
    fn compile_empty_domain_is_tautology() {
        let f = parse("/\\{n in N} D_{n+1}(c_0, c_1)");
        let p = pair_for_indices(vec![]);
        assert!(is_decisive(&p.a, &p.e, &f));
        let out = compile_fo(&p, &f, 1000).unwrap();
        assert!(out.is_fo());
        for i in [0u64, 4] {
            let m = gen_sequence_space(i, SeqKind::Parity);
            assert!(eval_fo(&m, &out, &Env::new()).unwrap());
            assert!(eval_bounded(&m, &p, &f, &Env::new()).unwrap());
        }
    }

    #[test]
    fn compile_respects_the_cap() {
        let f = parse("~ /\\{n in N} ~ D_1(c_n, c_n)");
        let inner = DecisivePair { a: Fragment::fn_map(vec![(Fragment::Star, Fragment::Star)]), e: Fragment::Star };
        let conj = pair_for_indices(vec![(0, inner.clone()), (1, inner.clone()), (2, inner)]);
        let neg = DecisivePair {
            a: Fragment::fn_map(
                enumerate_below(&space_of(Role::Forall, &parse("/\\{n in N} ~ D_1(c_n, c_n)")), &conj.a)
                    .into_iter()
                    .map(|k| (k, conj.e.clone()))
                    .collect(),
            ),
            e: conj.a.clone(),
        };
        assert!(is_decisive(&neg.a, &neg.e, &f));
        let err = compile_fo(&neg, &f, 2).unwrap_err();
        assert!(matches!(err, BoundedError::BoundTooLarge { .. }));
        assert!(compile_fo(&neg, &f, 100000).is_ok());
    }

    #[test]
    fn sigma1_compiles_to_a_disjunction() {
        // not-forall-not over indices {0,1,2}: equivalent to a three-way
        // disjunction of the components
        let f = parse("\\/{k in N} D_1(c_k, c_0)");
        let inner = DecisivePair { a: Fragment::fn_map(vec![(Fragment::Star, Fragment::Star)]), e: Fragment::Star };
        let conj = pair_for_indices(vec![(0, inner.clone()), (1, inner.clone()), (2, inner)]);
        let Formula::Not(body) = &f else { panic!() };
        let neg = DecisivePair {
            a: Fragment::fn_map(
                enumerate_below(&space_of(Role::Forall, body), &conj.a)
                    .into_iter()
                    .map(|k| (k, conj.e.clone()))
                    .collect(),
            ),
            e: conj.a.clone(),
        };
        assert!(is_decisive(&neg.a, &neg.e, &f));
        let out = compile_fo(&neg, &f, 100000).unwrap();
        assert!(out.is_fo());
        // on the parity family, some c_k with k <= 2 equals c_0
        for i in [0u64, 1, 5] {
            let m = gen_sequence_space(i, SeqKind::Parity);
            assert!(eval_fo(&m, &out, &Env::new()).unwrap());
            assert!(eval_bounded(&m, &neg, &f, &Env::new()).unwrap());
        }
    }
}
