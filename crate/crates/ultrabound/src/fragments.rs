//! The fragment calculus: finite bound pieces attached to quantifier roles of
//! formula nodes, with their two orderings, meet, restriction, coherence,
//! union, completion, and the coherent-extension construction.

use std::fmt::Write as _;

use thiserror::Error;

use crate::logic::Formula;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Forall,
    Exists,
}

/// Shape of the fragment space attached to one (role, formula node) pair.
/// Component spaces of a conjunction over the naturals are uniform: index
/// instantiation changes only the indices inside atoms, never the shape.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Space {
    Star,
    /// Partial maps from forall-fragments of the negated body to its
    /// exists-fragments.
    FnMap { key: Box<Space>, val: Box<Space> },
    /// Finite maps index -> component forall-fragment.
    IndexMap(CompSpaces),
    /// Finite sets of tagged component exists-fragments, at most one per
    /// index.
    ComponentSet(CompSpaces),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CompSpaces {
    Uniform(Box<Space>),
    Pair(Box<Space>, Box<Space>),
}

impl CompSpaces {
    pub fn at(&self, i: u64) -> Option<&Space> {
        match self {
            CompSpaces::Uniform(s) => Some(s),
            CompSpaces::Pair(a, b) => match i {
                0 => Some(a),
                1 => Some(b),
                _ => None,
            },
        }
    }
}

/// Resolve the fragment space of a formula node under a quantifier role.
pub fn space_of(role: Role, f: &Formula) -> Space {
    match f {
        Formula::Atomic { .. } => Space::Star,
        Formula::Forall(_, body) => space_of(role, body),
        Formula::Not(body) => match role {
            Role::Exists => space_of(Role::Forall, body),
            Role::Forall => Space::FnMap {
                key: Box::new(space_of(Role::Forall, body)),
                val: Box::new(space_of(Role::Exists, body)),
            },
        },
        Formula::And(a, b) => {
            let cs = CompSpaces::Pair(
                Box::new(space_of(role, a)),
                Box::new(space_of(role, b)),
            );
            match role {
                Role::Forall => Space::IndexMap(cs),
                Role::Exists => Space::ComponentSet(cs),
            }
        }
        Formula::BigAnd { body, .. } => {
            let cs = CompSpaces::Uniform(Box::new(space_of(role, body)));
            match role {
                Role::Forall => Space::IndexMap(cs),
                Role::Exists => Space::ComponentSet(cs),
            }
        }
    }
}

/// A fragment value. Entry lists are kept sorted and duplicate-free, so the
/// derived ordering is a canonical total order and equality is syntactic.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Fragment {
    Star,
    FnMap(Vec<(Fragment, Fragment)>),
    IndexMap(Vec<(u64, Fragment)>),
    ComponentSet(Vec<(u64, Fragment)>),
}

impl Fragment {
    pub fn fn_map(mut entries: Vec<(Fragment, Fragment)>) -> Fragment {
        entries.sort();
        entries.dedup_by(|a, b| a.0 == b.0);
        Fragment::FnMap(entries)
    }

    pub fn index_map(mut entries: Vec<(u64, Fragment)>) -> Fragment {
        entries.sort();
        entries.dedup_by(|a, b| a.0 == b.0);
        Fragment::IndexMap(entries)
    }

    pub fn component_set(mut entries: Vec<(u64, Fragment)>) -> Fragment {
        entries.sort();
        entries.dedup_by(|a, b| a.0 == b.0);
        Fragment::ComponentSet(entries)
    }

    fn fn_entries(&self) -> Option<&[(Fragment, Fragment)]> {
        match self {
            Fragment::FnMap(e) => Some(e),
            _ => None,
        }
    }

    fn idx_entries(&self) -> Option<&[(u64, Fragment)]> {
        match self {
            Fragment::IndexMap(e) | Fragment::ComponentSet(e) => Some(e),
            _ => None,
        }
    }

    fn idx_get(&self, i: u64) -> Option<&Fragment> {
        self.idx_entries()?
            .iter()
            .find_map(|(j, f)| (*j == i).then_some(f))
    }

    fn fn_get(&self, key: &Fragment) -> Option<&Fragment> {
        self.fn_entries()?
            .iter()
            .find_map(|(k, v)| (k == key).then_some(v))
    }

    /// Structural depth: leaves are 0, each map layer adds one.
    pub fn depth(&self) -> usize {
        match self {
            Fragment::Star => 0,
            Fragment::FnMap(e) => {
                1 + e
                    .iter()
                    .map(|(k, v)| k.depth().max(v.depth()))
                    .max()
                    .unwrap_or(0)
            }
            Fragment::IndexMap(e) | Fragment::ComponentSet(e) => {
                1 + e.iter().map(|(_, f)| f.depth()).max().unwrap_or(0)
            }
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FragError {
    #[error("fragment shape does not match the space")]
    Shape,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("collection is not coherent")]
    Incoherent,
    #[error("bad fragment encoding: {0}")]
    Encoding(String),
}

fn shape_matches(sp: &Space, f: &Fragment) -> bool {
    match (sp, f) {
        (Space::Star, Fragment::Star) => true,
        (Space::FnMap { key, val }, Fragment::FnMap(e)) => e
            .iter()
            .all(|(k, v)| shape_matches(key, k) && shape_matches(val, v)),
        (Space::IndexMap(cs), Fragment::IndexMap(e)) => e
            .iter()
            .all(|(i, f)| cs.at(*i).is_some_and(|s| shape_matches(s, f))),
        (Space::ComponentSet(cs), Fragment::ComponentSet(e)) => e
            .iter()
            .all(|(i, f)| cs.at(*i).is_some_and(|s| shape_matches(s, f))),
        _ => false,
    }
}

/// Membership in the raw fragment space: shape plus the partial-function
/// conditions on negation-layer maps (domain monotone in the containment
/// order, domain downward closed in the refinement order with compatible
/// values).
pub fn is_valid(sp: &Space, f: &Fragment) -> Result<bool, FragError> {
    if !shape_matches(sp, f) {
        return Err(FragError::Shape);
    }
    Ok(valid_unchecked(sp, f))
}

fn valid_unchecked(sp: &Space, f: &Fragment) -> bool {
    match (sp, f) {
        (Space::Star, Fragment::Star) => true,
        (Space::FnMap { key, val }, Fragment::FnMap(entries)) => {
            for (k, v) in entries {
                if !valid_unchecked(key, k) || !valid_unchecked(val, v) {
                    return false;
                }
            }
            // containment-monotone on the domain
            for (a1, b1) in entries {
                for (a2, b2) in entries {
                    if subseteq(key, a1, a2) && !subseteq(val, b1, b2) {
                        return false;
                    }
                }
            }
            // refinement-downward-closed domain with compatible values
            for (a, b) in entries {
                for a2 in enumerate_below(key, a) {
                    let Some(b2) = f.fn_get(&a2) else {
                        return false;
                    };
                    // some value under b2 refines into b
                    if !enumerate_subfrags(val, b2)
                        .iter()
                        .any(|c| leq(val, c, b))
                    {
                        return false;
                    }
                }
            }
            true
        }
        (Space::IndexMap(cs), Fragment::IndexMap(entries))
        | (Space::ComponentSet(cs), Fragment::ComponentSet(entries)) => entries
            .iter()
            .all(|(i, f)| valid_unchecked(cs.at(*i).unwrap(), f)),
        _ => false,
    }
}

/// The containment order: more information, on more inputs.
pub fn subseteq(sp: &Space, f: &Fragment, g: &Fragment) -> bool {
    match (sp, f, g) {
        (Space::Star, Fragment::Star, Fragment::Star) => true,
        (Space::FnMap { key: _, val }, Fragment::FnMap(fe), Fragment::FnMap(_)) => {
            fe.iter().all(|(a, b)| match g.fn_get(a) {
                Some(b2) => subseteq(val, b, b2),
                None => false,
            })
        }
        (Space::IndexMap(cs), Fragment::IndexMap(fe), Fragment::IndexMap(ge)) => {
            // equal index domains, componentwise containment
            fe.len() == ge.len()
                && fe.iter().all(|(i, c)| match g.idx_get(*i) {
                    Some(c2) => subseteq(cs.at(*i).unwrap(), c, c2),
                    None => false,
                })
        }
        (Space::ComponentSet(cs), Fragment::ComponentSet(fe), Fragment::ComponentSet(_)) => {
            // every tagged component is contained in one of g's (same tag)
            fe.iter().all(|(i, c)| match g.idx_get(*i) {
                Some(c2) => subseteq(cs.at(*i).unwrap(), c, c2),
                None => false,
            })
        }
        _ => false,
    }
}

/// The refinement order: same shape of commitment, pointwise refined.
pub fn leq(sp: &Space, f: &Fragment, g: &Fragment) -> bool {
    match (sp, f, g) {
        (Space::Star, Fragment::Star, Fragment::Star) => true,
        (Space::FnMap { key: _, val }, Fragment::FnMap(fe), Fragment::FnMap(ge)) => {
            // equal domains, pointwise refinement on values
            fe.len() == ge.len()
                && fe.iter().all(|(a, b)| match g.fn_get(a) {
                    Some(b2) => leq(val, b, b2),
                    None => false,
                })
        }
        (Space::IndexMap(cs), Fragment::IndexMap(fe), Fragment::IndexMap(_)) => {
            // domain may grow, componentwise refinement
            fe.iter().all(|(i, c)| match g.idx_get(*i) {
                Some(c2) => leq(cs.at(*i).unwrap(), c, c2),
                None => false,
            })
        }
        (Space::ComponentSet(cs), Fragment::ComponentSet(fe), Fragment::ComponentSet(ge)) => {
            // two-sided matching; tags make cross-index matches impossible,
            // so this is equal tag sets with pointwise refinement
            fe.len() == ge.len()
                && fe.iter().all(|(i, c)| match g.idx_get(*i) {
                    Some(c2) => leq(cs.at(*i).unwrap(), c, c2),
                    None => false,
                })
        }
        _ => false,
    }
}

/// All valid fragments refinement-below `f`. Finite for every valid input.
pub fn enumerate_below(sp: &Space, f: &Fragment) -> Vec<Fragment> {
    match (sp, f) {
        (Space::Star, Fragment::Star) => vec![Fragment::Star],
        (Space::FnMap { key: _, val }, Fragment::FnMap(entries)) => {
            // equal domain, values chosen below f's values, filtered by the
            // fn-map validity conditions
            let keys: Vec<&Fragment> = entries.iter().map(|(k, _)| k).collect();
            let choices: Vec<Vec<Fragment>> = entries
                .iter()
                .map(|(_, v)| enumerate_below(val, v))
                .collect();
            let mut out = Vec::new();
            let mut stack: Vec<Vec<(Fragment, Fragment)>> = vec![Vec::new()];
            for (ki, k) in keys.iter().enumerate() {
                let mut next = Vec::new();
                for partial in &stack {
                    for v in &choices[ki] {
                        let mut p = partial.clone();
                        p.push(((*k).clone(), v.clone()));
                        next.push(p);
                    }
                }
                stack = next;
            }
            for entries in stack {
                let cand = Fragment::fn_map(entries);
                if valid_unchecked(sp, &cand) {
                    out.push(cand);
                }
            }
            out.sort();
            out.dedup();
            out
        }
        (Space::IndexMap(cs), Fragment::IndexMap(entries)) => {
            // any subdomain, componentwise below
            let mut out: Vec<Vec<(u64, Fragment)>> = vec![Vec::new()];
            for (i, c) in entries {
                let below = enumerate_below(cs.at(*i).unwrap(), c);
                let mut next = Vec::new();
                for partial in &out {
                    next.push(partial.clone()); // skip index i
                    for b in &below {
                        let mut p = partial.clone();
                        p.push((*i, b.clone()));
                        next.push(p);
                    }
                }
                out = next;
            }
            out.into_iter().map(Fragment::index_map).collect()
        }
        (Space::ComponentSet(cs), Fragment::ComponentSet(entries)) => {
            // equal tag set, componentwise below
            let mut out: Vec<Vec<(u64, Fragment)>> = vec![Vec::new()];
            for (i, c) in entries {
                let below = enumerate_below(cs.at(*i).unwrap(), c);
                let mut next = Vec::new();
                for partial in &out {
                    for b in &below {
                        let mut p = partial.clone();
                        p.push((*i, b.clone()));
                        next.push(p);
                    }
                }
                out = next;
            }
            out.into_iter().map(Fragment::component_set).collect()
        }
        _ => Vec::new(),
    }
}

/// All valid fragments containment-below `f`.
pub fn enumerate_subfrags(sp: &Space, f: &Fragment) -> Vec<Fragment> {
    match (sp, f) {
        (Space::Star, Fragment::Star) => vec![Fragment::Star],
        (Space::FnMap { key: _, val }, Fragment::FnMap(entries)) => {
            // sub-partial-functions: any subdomain, values contained in f's
            let mut stack: Vec<Vec<(Fragment, Fragment)>> = vec![Vec::new()];
            for (k, v) in entries {
                let subs = enumerate_subfrags(val, v);
                let mut next = Vec::new();
                for partial in &stack {
                    next.push(partial.clone());
                    for s in &subs {
                        let mut p = partial.clone();
                        p.push((k.clone(), s.clone()));
                        next.push(p);
                    }
                }
                stack = next;
            }
            let mut out: Vec<Fragment> = stack
                .into_iter()
                .map(Fragment::fn_map)
                .filter(|c| valid_unchecked(sp, c))
                .collect();
            out.sort();
            out.dedup();
            out
        }
        (Space::IndexMap(cs), Fragment::IndexMap(entries)) => {
            // equal index domain, componentwise containment
            let mut out: Vec<Vec<(u64, Fragment)>> = vec![Vec::new()];
            for (i, c) in entries {
                let subs = enumerate_subfrags(cs.at(*i).unwrap(), c);
                let mut next = Vec::new();
                for partial in &out {
                    for s in &subs {
                        let mut p = partial.clone();
                        p.push((*i, s.clone()));
                        next.push(p);
                    }
                }
                out = next;
            }
            out.into_iter().map(Fragment::index_map).collect()
        }
        (Space::ComponentSet(cs), Fragment::ComponentSet(entries)) => {
            // any tag subset, componentwise containment
            let mut out: Vec<Vec<(u64, Fragment)>> = vec![Vec::new()];
            for (i, c) in entries {
                let subs = enumerate_subfrags(cs.at(*i).unwrap(), c);
                let mut next = Vec::new();
                for partial in &out {
                    next.push(partial.clone());
                    for s in &subs {
                        let mut p = partial.clone();
                        p.push((*i, s.clone()));
                        next.push(p);
                    }
                }
                out = next;
            }
            out.into_iter().map(Fragment::component_set).collect()
        }
        _ => Vec::new(),
    }
}

/// Greatest lower bound of two refinements of a common ambient fragment.
pub fn min3(sp: &Space, f: &Fragment, g0: &Fragment, g1: &Fragment) -> Result<Fragment, FragError> {
    if !leq(sp, g0, f) || !leq(sp, g1, f) {
        return Err(FragError::Precondition("min3 needs g0, g1 below f".into()));
    }
    Ok(min3_unchecked(sp, f, g0, g1))
}

fn min3_unchecked(sp: &Space, f: &Fragment, g0: &Fragment, g1: &Fragment) -> Fragment {
    match (sp, f, g0, g1) {
        (Space::Star, ..) => Fragment::Star,
        (Space::FnMap { key: _, val }, Fragment::FnMap(fe), Fragment::FnMap(_), Fragment::FnMap(_)) => {
            // equal domains throughout; meet the values pointwise
            Fragment::fn_map(
                fe.iter()
                    .map(|(a, b)| {
                        let b0 = g0.fn_get(a).unwrap();
                        let b1 = g1.fn_get(a).unwrap();
                        (a.clone(), min3_unchecked(val, b, b0, b1))
                    })
                    .collect(),
            )
        }
        (Space::IndexMap(cs), Fragment::IndexMap(_), Fragment::IndexMap(g0e), Fragment::IndexMap(_)) => {
            // shared indices only, componentwise meet under f's component
            Fragment::index_map(
                g0e.iter()
                    .filter_map(|(i, c0)| {
                        let c1 = g1.idx_get(*i)?;
                        let fc = f.idx_get(*i).expect("leq keeps indices inside f");
                        Some((*i, min3_unchecked(cs.at(*i).unwrap(), fc, c0, c1)))
                    })
                    .collect(),
            )
        }
        (Space::ComponentSet(cs), Fragment::ComponentSet(fe), Fragment::ComponentSet(_), Fragment::ComponentSet(_)) => {
            // tag sets all agree; meet under the matching f component
            Fragment::component_set(
                fe.iter()
                    .map(|(i, fc)| {
                        let c0 = g0.idx_get(*i).unwrap();
                        let c1 = g1.idx_get(*i).unwrap();
                        (*i, min3_unchecked(cs.at(*i).unwrap(), fc, c0, c1))
                    })
                    .collect(),
            )
        }
        _ => unreachable!("min3 on mismatched shapes"),
    }
}

/// Restriction `f2 |> fstar` inside the ambient `f`: the unique fragment
/// refinement-below `fstar` and containment-below `f2`.
pub fn restrict(sp: &Space, f: &Fragment, f2: &Fragment, fstar: &Fragment) -> Result<Fragment, FragError> {
    if !leq(sp, f2, f) || !subseteq(sp, fstar, f) {
        return Err(FragError::Precondition("restrict needs f2 <= f and fstar sub f".into()));
    }
    Ok(restrict_unchecked(sp, f, f2, fstar))
}

fn restrict_unchecked(sp: &Space, f: &Fragment, f2: &Fragment, fstar: &Fragment) -> Fragment {
    match (sp, fstar) {
        (Space::Star, _) => Fragment::Star,
        (Space::FnMap { key: _, val }, Fragment::FnMap(se)) => {
            // keys cut down to fstar's domain, values restricted recursively
            Fragment::fn_map(
                se.iter()
                    .map(|(a, bstar)| {
                        let b = f.fn_get(a).unwrap();
                        let b2 = f2.fn_get(a).unwrap();
                        (a.clone(), restrict_unchecked(val, b, b2, bstar))
                    })
                    .collect(),
            )
        }
        (Space::IndexMap(cs), Fragment::IndexMap(_)) => {
            // keeps f2's index domain; fstar covers every index of f
            let f2e = f2.idx_entries().unwrap();
            Fragment::index_map(
                f2e.iter()
                    .map(|(i, c2)| {
                        let fc = f.idx_get(*i).unwrap();
                        let cstar = fstar.idx_get(*i).unwrap();
                        (*i, restrict_unchecked(cs.at(*i).unwrap(), fc, c2, cstar))
                    })
                    .collect(),
            )
        }
        (Space::ComponentSet(cs), Fragment::ComponentSet(se)) => {
            // cut down to fstar's tags
            Fragment::component_set(
                se.iter()
                    .map(|(i, cstar)| {
                        let fc = f.idx_get(*i).unwrap();
                        let c2 = f2.idx_get(*i).unwrap();
                        (*i, restrict_unchecked(cs.at(*i).unwrap(), fc, c2, cstar))
                    })
                    .collect(),
            )
        }
        _ => unreachable!("restrict on mismatched shapes"),
    }
}

/// Result of a coherence check: either coherent, or an inclusion-minimal
/// incoherent sub-collection for diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoherenceWitness {
    Coherent,
    Incoherent(Vec<Fragment>),
}

impl CoherenceWitness {
    pub fn is_coherent(&self) -> bool {
        matches!(self, CoherenceWitness::Coherent)
    }
}

/// Recursive coherence of a finite collection of same-space fragments.
pub fn is_coherent(sp: &Space, set: &[Fragment]) -> CoherenceWitness {
    if coherent_bool(sp, set) {
        return CoherenceWitness::Coherent;
    }
    // shrink greedily to an inclusion-minimal offender
    let mut bad: Vec<Fragment> = set.to_vec();
    bad.sort();
    bad.dedup();
    loop {
        let mut shrunk = false;
        for i in 0..bad.len() {
            let mut cand = bad.clone();
            cand.remove(i);
            if !coherent_bool(sp, &cand) {
                bad = cand;
                shrunk = true;
                break;
            }
        }
        if !shrunk {
            return CoherenceWitness::Incoherent(bad);
        }
    }
}

fn coherent_bool(sp: &Space, set: &[Fragment]) -> bool {
    match sp {
        Space::Star => true,
        Space::FnMap { key, val } => {
            let mut keys: Vec<&Fragment> = set
                .iter()
                .flat_map(|f| f.fn_entries().unwrap().iter().map(|(k, _)| k))
                .collect();
            keys.sort();
            keys.dedup();
            // each key alone must be coherent
            for k in &keys {
                if !coherent_bool(key, std::slice::from_ref(*k)) {
                    return false;
                }
            }
            // coherent key sets map to coherent image sets
            for mask in 0u64..(1 << keys.len()) {
                let chosen: Vec<Fragment> = keys
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| (mask >> i) & 1 == 1)
                    .map(|(_, k)| (*k).clone())
                    .collect();
                if chosen.is_empty() || !coherent_bool(key, &chosen) {
                    continue;
                }
                let mut image: Vec<Fragment> = Vec::new();
                for f in set {
                    for a in &chosen {
                        if let Some(b) = f.fn_get(a) {
                            image.push(b.clone());
                        }
                    }
                }
                image.sort();
                image.dedup();
                if !coherent_bool(val, &image) {
                    return false;
                }
            }
            true
        }
        Space::IndexMap(cs) => {
            // equal index domains, componentwise coherent
            let doms: Vec<Vec<u64>> = set
                .iter()
                .map(|f| f.idx_entries().unwrap().iter().map(|(i, _)| *i).collect())
                .collect();
            if doms.windows(2).any(|w| w[0] != w[1]) {
                return false;
            }
            if let Some(dom) = doms.first() {
                for i in dom {
                    let comps: Vec<Fragment> = set
                        .iter()
                        .map(|f| f.idx_get(*i).unwrap().clone())
                        .collect();
                    if !coherent_bool(cs.at(*i).unwrap(), &comps) {
                        return false;
                    }
                }
            }
            true
        }
        Space::ComponentSet(cs) => {
            let mut tags: Vec<u64> = set
                .iter()
                .flat_map(|f| f.idx_entries().unwrap().iter().map(|(i, _)| *i))
                .collect();
            tags.sort();
            tags.dedup();
            for i in tags {
                let comps: Vec<Fragment> = set
                    .iter()
                    .filter_map(|f| f.idx_get(i).cloned())
                    .collect();
                let mut comps = comps;
                comps.sort();
                comps.dedup();
                if !coherent_bool(cs.at(i).unwrap(), &comps) {
                    return false;
                }
            }
            true
        }
    }
}

/// Membership in the self-consistent subspace: the singleton is coherent.
pub fn in_f(sp: &Space, f: &Fragment) -> bool {
    valid_unchecked(sp, f) && coherent_bool(sp, std::slice::from_ref(f))
}

/// Union of a non-empty coherent collection.
pub fn union_coherent(sp: &Space, set: &[Fragment]) -> Result<Fragment, FragError> {
    if set.is_empty() {
        return Err(FragError::Precondition("union of an empty collection".into()));
    }
    if !coherent_bool(sp, set) {
        return Err(FragError::Incoherent);
    }
    Ok(union_unchecked(sp, set))
}

fn union_unchecked(sp: &Space, set: &[Fragment]) -> Fragment {
    match sp {
        Space::Star => Fragment::Star,
        Space::FnMap { key, val } => {
            let mut keys: Vec<Fragment> = set
                .iter()
                .flat_map(|f| f.fn_entries().unwrap().iter().map(|(k, _)| k.clone()))
                .collect();
            keys.sort();
            keys.dedup();
            let entries = keys
                .iter()
                .map(|a| {
                    // value at a joins everything committed at keys inside a
                    let mut vals: Vec<Fragment> = Vec::new();
                    for f in set {
                        for (b, v) in f.fn_entries().unwrap() {
                            if subseteq(key, b, a) {
                                vals.push(v.clone());
                            }
                        }
                    }
                    vals.sort();
                    vals.dedup();
                    (a.clone(), union_unchecked(val, &vals))
                })
                .collect();
            Fragment::fn_map(entries)
        }
        Space::IndexMap(cs) => {
            let dom: Vec<u64> = set[0]
                .idx_entries()
                .unwrap()
                .iter()
                .map(|(i, _)| *i)
                .collect();
            Fragment::index_map(
                dom.into_iter()
                    .map(|i| {
                        let comps: Vec<Fragment> = set
                            .iter()
                            .map(|f| f.idx_get(i).unwrap().clone())
                            .collect();
                        (i, union_unchecked(cs.at(i).unwrap(), &comps))
                    })
                    .collect(),
            )
        }
        Space::ComponentSet(cs) => {
            let mut tags: Vec<u64> = set
                .iter()
                .flat_map(|f| f.idx_entries().unwrap().iter().map(|(i, _)| *i))
                .collect();
            tags.sort();
            tags.dedup();
            Fragment::component_set(
                tags.into_iter()
                    .map(|i| {
                        let mut comps: Vec<Fragment> = set
                            .iter()
                            .filter_map(|f| f.idx_get(i).cloned())
                            .collect();
                        comps.sort();
                        comps.dedup();
                        (i, union_unchecked(cs.at(i).unwrap(), &comps))
                    })
                    .collect(),
            )
        }
    }
}

/// Completion of a self-consistent negation-layer map: the domain is closed
/// under coherent unions, with values joined from all committed sub-keys.
pub fn tilde(sp: &Space, f: &Fragment) -> Result<Fragment, FragError> {
    let Space::FnMap { key, val } = sp else {
        return Err(FragError::Precondition("tilde applies to negation-layer maps".into()));
    };
    if !in_f(sp, f) {
        return Err(FragError::Precondition("tilde needs a self-consistent input".into()));
    }
    let entries = f.fn_entries().unwrap();
    let keys: Vec<&Fragment> = entries.iter().map(|(k, _)| k).collect();
    let mut new_entries: Vec<(Fragment, Fragment)> = Vec::new();
    for mask in 1u64..(1 << keys.len()) {
        let chosen: Vec<Fragment> = keys
            .iter()
            .enumerate()
            .filter(|(i, _)| (mask >> i) & 1 == 1)
            .map(|(_, k)| (*k).clone())
            .collect();
        if !coherent_bool(key, &chosen) {
            continue;
        }
        let a = union_unchecked(key, &chosen);
        let mut vals: Vec<Fragment> = entries
            .iter()
            .filter(|(b, _)| subseteq(key, b, &a))
            .map(|(_, v)| v.clone())
            .collect();
        vals.sort();
        vals.dedup();
        new_entries.push((a, union_unchecked(val, &vals)));
    }
    Ok(Fragment::fn_map(new_entries))
}

/// Constructive form of the coherent-extension property: given g2 <= g sub f
/// (all self-consistent) and finitely many k <= f with k|>g <= g2, produce
/// f' <= f with g2 sub f' and every k <= f'.
pub fn coherent_extension(
    sp: &Space,
    f: &Fragment,
    g: &Fragment,
    g2: &Fragment,
    ks: &[Fragment],
) -> Result<Fragment, FragError> {
    if !subseteq(sp, g, f) || !leq(sp, g2, g) {
        return Err(FragError::Precondition("need g2 <= g sub f".into()));
    }
    if !(in_f(sp, f) && in_f(sp, g) && in_f(sp, g2)) {
        return Err(FragError::Precondition("inputs must be self-consistent".into()));
    }
    for k in ks {
        if !leq(sp, k, f) {
            return Err(FragError::Precondition("every k must refine f".into()));
        }
        let kr = restrict_unchecked(sp, f, k, g);
        if !leq(sp, &kr, g2) {
            return Err(FragError::Precondition("every k|>g must refine g2".into()));
        }
    }
    extend_unchecked(sp, f, g, g2, ks).ok_or(FragError::Incoherent)
}

fn extend_unchecked(
    sp: &Space,
    f: &Fragment,
    g: &Fragment,
    g2: &Fragment,
    ks: &[Fragment],
) -> Option<Fragment> {
    match sp {
        Space::Star => Some(Fragment::Star),
        Space::FnMap { key, val: _ } => {
            // choose a value below f(a) at every key, key by key, with keys
            // ordered so that containment- and refinement-smaller ones come
            // first; backtrack over the finite choice space
            let entries = f.fn_entries().unwrap();
            let mut keys: Vec<Fragment> = entries.iter().map(|(k, _)| k.clone()).collect();
            keys.sort_by(|a, b| {
                let asub = subseteq(key, a, b) || leq(key, a, b);
                let bsub = subseteq(key, b, a) || leq(key, b, a);
                match (asub, bsub) {
                    (true, false) => std::cmp::Ordering::Less,
                    (false, true) => std::cmp::Ordering::Greater,
                    _ => a.cmp(b),
                }
            });
            let choices: Vec<Vec<Fragment>> = keys
                .iter()
                .map(|a| {
                    let Space::FnMap { val, .. } = sp else { unreachable!() };
                    enumerate_below(val, f.fn_get(a).unwrap())
                })
                .collect();
            fn search(
                sp: &Space,
                keys: &[Fragment],
                choices: &[Vec<Fragment>],
                picked: &mut Vec<(Fragment, Fragment)>,
                g2: &Fragment,
                ks: &[Fragment],
            ) -> Option<Fragment> {
                if picked.len() == keys.len() {
                    let cand = Fragment::fn_map(picked.clone());
                    if valid_unchecked(sp, &cand) && in_f(sp, &cand) {
                        return Some(cand);
                    }
                    return None;
                }
                let i = picked.len();
                let a = &keys[i];
                let Space::FnMap { val, .. } = sp else { unreachable!() };
                'next: for v in &choices[i] {
                    // containment constraint from g2 and refinement
                    // constraints from the k's at this key
                    if let Some(w) = g2.fn_get(a) {
                        if !subseteq(val, w, v) {
                            continue;
                        }
                    }
                    for k in ks {
                        if let Some(w) = k.fn_get(a) {
                            if !leq(val, w, v) {
                                continue 'next;
                            }
                        }
                    }
                    picked.push((a.clone(), v.clone()));
                    if let Some(hit) = search(sp, keys, choices, picked, g2, ks) {
                        return Some(hit);
                    }
                    picked.pop();
                }
                None
            }
            search(sp, &keys, &choices, &mut Vec::new(), g2, ks)
        }
        Space::IndexMap(cs) => {
            // the result lives on g2's index domain
            let g2e = g2.idx_entries().unwrap();
            let mut entries = Vec::new();
            for (i, c2) in g2e {
                let fc = f.idx_get(*i).unwrap();
                let gc = g.idx_get(*i).unwrap();
                let kis: Vec<Fragment> = ks.iter().filter_map(|k| k.idx_get(*i).cloned()).collect();
                entries.push((*i, extend_unchecked(cs.at(*i).unwrap(), fc, gc, c2, &kis)?));
            }
            Some(Fragment::index_map(entries))
        }
        Space::ComponentSet(cs) => {
            // full tag set of f; recurse where g2 commits, keep f elsewhere
            let fe = f.idx_entries().unwrap();
            let mut entries = Vec::new();
            for (i, fc) in fe {
                let kis: Vec<Fragment> = ks.iter().filter_map(|k| k.idx_get(*i).cloned()).collect();
                let chosen = match (g2.idx_get(*i), g.idx_get(*i)) {
                    (Some(c2), Some(gc)) => extend_unchecked(cs.at(*i).unwrap(), fc, gc, c2, &kis)?,
                    _ => fc.clone(),
                };
                entries.push((*i, chosen));
            }
            Some(Fragment::component_set(entries))
        }
    }
}

/// All valid fragments of a space up to a structural depth, with indices of
/// conjunctions over the naturals drawn from `0..index_cap`.
pub fn enumerate_space(sp: &Space, depth: usize, index_cap: u64) -> Vec<Fragment> {
    match sp {
        Space::Star => vec![Fragment::Star],
        _ if depth == 0 => Vec::new(),
        Space::FnMap { key, val } => {
            let keys = enumerate_space(key, depth - 1, index_cap);
            let vals = enumerate_space(val, depth - 1, index_cap);
            let mut stack: Vec<Vec<(Fragment, Fragment)>> = vec![Vec::new()];
            for k in &keys {
                let mut next = Vec::new();
                for partial in &stack {
                    next.push(partial.clone());
                    for v in &vals {
                        let mut p = partial.clone();
                        p.push((k.clone(), v.clone()));
                        next.push(p);
                    }
                }
                stack = next;
            }
            let mut out: Vec<Fragment> = stack
                .into_iter()
                .map(Fragment::fn_map)
                .filter(|c| valid_unchecked(sp, c))
                .collect();
            out.sort();
            out.dedup();
            out
        }
        Space::IndexMap(cs) | Space::ComponentSet(cs) => {
            let indices: Vec<u64> = match cs {
                CompSpaces::Uniform(_) => (0..index_cap).collect(),
                CompSpaces::Pair(..) => vec![0, 1],
            };
            let mut stack: Vec<Vec<(u64, Fragment)>> = vec![Vec::new()];
            for i in indices {
                let comps = enumerate_space(cs.at(i).unwrap(), depth - 1, index_cap);
                let mut next = Vec::new();
                for partial in &stack {
                    next.push(partial.clone());
                    for c in &comps {
                        let mut p = partial.clone();
                        p.push((i, c.clone()));
                        next.push(p);
                    }
                }
                stack = next;
            }
            let build: fn(Vec<(u64, Fragment)>) -> Fragment = match sp {
                Space::IndexMap(_) => Fragment::index_map,
                _ => Fragment::component_set,
            };
            stack.into_iter().map(build).collect()
        }
    }
}

// ---------------------------------------------------------------------------
// Canonical textual encoding
// ---------------------------------------------------------------------------

impl Fragment {
    pub fn encode(&self) -> String {
        let mut s = String::new();
        self.encode_into(&mut s);
        s
    }

    fn encode_into(&self, s: &mut String) {
        match self {
            Fragment::Star => s.push('*'),
            Fragment::FnMap(e) => {
                s.push_str("(fn");
                for (k, v) in e {
                    s.push_str(" (");
                    k.encode_into(s);
                    s.push(' ');
                    v.encode_into(s);
                    s.push(')');
                }
                s.push(')');
            }
            Fragment::IndexMap(e) => {
                s.push_str("(imap");
                for (i, f) in e {
                    let _ = write!(s, " ({i} ");
                    f.encode_into(s);
                    s.push(')');
                }
                s.push(')');
            }
            Fragment::ComponentSet(e) => {
                s.push_str("(cset");
                for (i, f) in e {
                    let _ = write!(s, " ({i} ");
                    f.encode_into(s);
                    s.push(')');
                }
                s.push(')');
            }
        }
    }

    pub fn decode(text: &str) -> Result<Fragment, FragError> {
        let toks = sexpr_tokens(text)?;
        let mut pos = 0;
        let f = parse_frag(&toks, &mut pos)?;
        if pos != toks.len() {
            return Err(FragError::Encoding("trailing input".into()));
        }
        Ok(f)
    }
}

#[derive(Debug, PartialEq, Eq)]
enum STok {
    Open,
    Close,
    Star,
    Word(String),
}

fn sexpr_tokens(text: &str) -> Result<Vec<STok>, FragError> {
    let mut toks = Vec::new();
    let mut word = String::new();
    for c in text.chars() {
        match c {
            '(' | ')' | '*' | ' ' | '\t' | '\n' => {
                if !word.is_empty() {
                    toks.push(STok::Word(std::mem::take(&mut word)));
                }
                match c {
                    '(' => toks.push(STok::Open),
                    ')' => toks.push(STok::Close),
                    '*' => toks.push(STok::Star),
                    _ => {}
                }
            }
            _ => word.push(c),
        }
    }
    if !word.is_empty() {
        toks.push(STok::Word(word));
    }
    Ok(toks)
}

fn parse_frag(toks: &[STok], pos: &mut usize) -> Result<Fragment, FragError> {
    match toks.get(*pos) {
        Some(STok::Star) => {
            *pos += 1;
            Ok(Fragment::Star)
        }
        Some(STok::Open) => {
            *pos += 1;
            let head = match toks.get(*pos) {
                Some(STok::Word(w)) => w.clone(),
                _ => return Err(FragError::Encoding("expected fn/imap/cset".into())),
            };
            *pos += 1;
            let mut fn_entries = Vec::new();
            let mut idx_entries = Vec::new();
            while toks.get(*pos) == Some(&STok::Open) {
                *pos += 1;
                if head == "fn" {
                    let k = parse_frag(toks, pos)?;
                    let v = parse_frag(toks, pos)?;
                    fn_entries.push((k, v));
                } else {
                    let i = match toks.get(*pos) {
                        Some(STok::Word(w)) => w
                            .parse::<u64>()
                            .map_err(|_| FragError::Encoding(format!("bad index `{w}`")))?,
                        _ => return Err(FragError::Encoding("expected an index".into())),
                    };
                    *pos += 1;
                    let f = parse_frag(toks, pos)?;
                    idx_entries.push((i, f));
                }
                if toks.get(*pos) != Some(&STok::Close) {
                    return Err(FragError::Encoding("expected `)`".into()));
                }
                *pos += 1;
            }
            if toks.get(*pos) != Some(&STok::Close) {
                return Err(FragError::Encoding("expected `)`".into()));
            }
            *pos += 1;
            match head.as_str() {
                "fn" => Ok(Fragment::fn_map(fn_entries)),
                "imap" => Ok(Fragment::index_map(idx_entries)),
                "cset" => Ok(Fragment::component_set(idx_entries)),
                w => Err(FragError::Encoding(format!("unknown head `{w}`"))),
            }
        }
        _ => Err(FragError::Encoding("expected a fragment".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_formula, Signature};

    fn sp_of(role: Role, text: &str) -> Space {
        let f = parse_formula(text, &Signature::default_sig()).unwrap();
        space_of(role, &f)
    }

    fn star_imap() -> Space {
        Space::IndexMap(CompSpaces::Uniform(Box::new(Space::Star)))
    }

    fn star_cset() -> Space {
        Space::ComponentSet(CompSpaces::Uniform(Box::new(Space::Star)))
    }

    fn im(indices: &[u64]) -> Fragment {
        Fragment::index_map(indices.iter().map(|&i| (i, Fragment::Star)).collect())
    }

    fn cs(indices: &[u64]) -> Fragment {
        Fragment::component_set(indices.iter().map(|&i| (i, Fragment::Star)).collect())
    }

    #[test]
    fn spaces_from_formulas() {
        assert_eq!(sp_of(Role::Forall, "P(a)"), Space::Star);
        assert_eq!(sp_of(Role::Exists, "P(a)"), Space::Star);
        assert_eq!(sp_of(Role::Forall, "forall x. P(x)"), Space::Star);
        assert_eq!(
            sp_of(Role::Forall, "~P(a)"),
            Space::FnMap { key: Box::new(Space::Star), val: Box::new(Space::Star) }
        );
        assert_eq!(sp_of(Role::Exists, "~P(a)"), Space::Star);
        assert_eq!(sp_of(Role::Forall, "/\\{n in N} R_n(a)"), star_imap());
        assert_eq!(sp_of(Role::Exists, "/\\{n in N} R_n(a)"), star_cset());
    }

    #[test]
    fn star_is_valid() {
        assert_eq!(is_valid(&Space::Star, &Fragment::Star), Ok(true));
    }

    #[test]
    fn empty_fn_map_is_valid() {
        let sp = sp_of(Role::Forall, "~P(a)");
        assert_eq!(is_valid(&sp, &Fragment::fn_map(vec![])), Ok(true));
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        assert_eq!(is_valid(&Space::Star, &im(&[0])), Err(FragError::Shape));
    }

    #[test]
    fn fn_map_domain_must_be_refinement_closed() {
        // negation over a conjunction: keys are index maps, values tag sets
        let sp = sp_of(Role::Forall, "~ /\\{n in N} R_n(a)");
        let f = Fragment::fn_map(vec![(im(&[0, 1]), cs(&[]))]);
        // {0,1} is present but its refinements {0}, {1}, {} are missing
        assert_eq!(is_valid(&sp, &f), Ok(false));
        let g = Fragment::fn_map(vec![
            (im(&[]), cs(&[])),
            (im(&[0]), cs(&[])),
            (im(&[1]), cs(&[])),
            (im(&[0, 1]), cs(&[])),
        ]);
        assert_eq!(is_valid(&sp, &g), Ok(true));
    }

    #[test]
    fn subseteq_examples() {
        let sp = sp_of(Role::Forall, "~P(a)");
        let empty = Fragment::fn_map(vec![]);
        let single = Fragment::fn_map(vec![(Fragment::Star, Fragment::Star)]);
        assert!(subseteq(&sp, &empty, &single));
        assert!(!subseteq(&sp, &single, &empty));
        assert!(subseteq(&sp, &single, &single));
        // conjunction forall-side: equal index domains required
        assert!(!subseteq(&star_imap(), &im(&[0]), &im(&[0, 1])));
        assert!(subseteq(&star_imap(), &im(&[0, 1]), &im(&[0, 1])));
    }

    #[test]
    fn leq_examples() {
        // conjunction forall-side: domain may grow
        assert!(leq(&star_imap(), &im(&[0]), &im(&[0, 1])));
        assert!(!leq(&star_imap(), &im(&[0, 1]), &im(&[0])));
        // tagged components never match across indices
        assert!(!leq(&star_cset(), &cs(&[0]), &cs(&[1])));
        assert!(!leq(&star_cset(), &cs(&[1]), &cs(&[0])));
    }

    #[test]
    fn enumerate_below_star_and_index_map() {
        assert_eq!(enumerate_below(&Space::Star, &Fragment::Star), vec![Fragment::Star]);
        let below = enumerate_below(&star_imap(), &im(&[0, 1, 2]));
        assert_eq!(below.len(), 8);
        for g in &below {
            assert!(leq(&star_imap(), g, &im(&[0, 1, 2])));
            assert!(is_valid(&star_imap(), g).unwrap());
        }
    }

    #[test]
    fn enumerate_below_fn_map_matches_leq_filter() {
        let sp = sp_of(Role::Forall, "~P(a)");
        let f = Fragment::fn_map(vec![(Fragment::Star, Fragment::Star)]);
        let below = enumerate_below(&sp, &f);
        assert_eq!(below, vec![f.clone()]);
        // cross-check against the exhaustive pool
        let pool = enumerate_space(&sp, 2, 2);
        let brute: Vec<&Fragment> = pool.iter().filter(|g| leq(&sp, g, &f)).collect();
        assert_eq!(brute.len(), below.len());
    }

    #[test]
    fn min3_idempotent_and_intersecting() {
        let sp = star_imap();
        let f = im(&[0, 1, 2]);
        let g = im(&[0, 1]);
        assert_eq!(min3(&sp, &f, &g, &g), Ok(g.clone()));
        let h = im(&[1, 2]);
        assert_eq!(min3(&sp, &f, &g, &h), Ok(im(&[1])));
    }

    #[test]
    fn min3_rejects_bad_inputs() {
        let sp = star_imap();
        assert!(min3(&sp, &im(&[0]), &im(&[1]), &im(&[0])).is_err());
    }

    #[test]
    fn restrict_full_and_composed() {
        let sp = sp_of(Role::Forall, "~ /\\{n in N} R_n(a)");
        let f = Fragment::fn_map(vec![
            (im(&[]), cs(&[])),
            (im(&[0]), cs(&[])),
            (im(&[1]), cs(&[])),
            (im(&[0, 1]), cs(&[])),
        ]);
        let f2 = f.clone();
        assert_eq!(restrict(&sp, &f, &f2, &f), Ok(f2.clone()));
        let h = Fragment::fn_map(vec![(im(&[]), cs(&[])), (im(&[0]), cs(&[]))]);
        let g = Fragment::fn_map(vec![
            (im(&[]), cs(&[])),
            (im(&[0]), cs(&[])),
            (im(&[1]), cs(&[])),
        ]);
        assert!(subseteq(&sp, &h, &g) && subseteq(&sp, &g, &f));
        // restricting through an intermediate equals restricting directly
        let via_g = restrict(&sp, &g, &restrict(&sp, &f, &f2, &g).unwrap(), &h);
        assert_eq!(via_g, restrict(&sp, &f, &f2, &h));
    }

    #[test]
    fn coherence_basics() {
        let sp = star_imap();
        assert!(is_coherent(&sp, &[im(&[0, 1])]).is_coherent());
        // unequal index domains are incoherent for the forall side
        let w = is_coherent(&sp, &[im(&[0]), im(&[0, 1])]);
        assert!(!w.is_coherent());
        if let CoherenceWitness::Incoherent(bad) = w {
            assert!(!is_coherent(&sp, &bad).is_coherent());
            assert_eq!(bad.len(), 2);
        }
    }

    #[test]
    fn union_of_singleton_is_identity() {
        let sp = sp_of(Role::Forall, "~ /\\{n in N} R_n(a)");
        let f = Fragment::fn_map(vec![(im(&[]), cs(&[0])), (im(&[0]), cs(&[0]))]);
        assert!(in_f(&sp, &f));
        assert_eq!(union_coherent(&sp, &[f.clone()]), Ok(f));
    }

    #[test]
    fn union_merges_component_sets() {
        let sp = star_cset();
        let u = union_coherent(&sp, &[cs(&[0]), cs(&[2])]).unwrap();
        assert_eq!(u, cs(&[0, 2]));
        assert!(subseteq(&sp, &cs(&[0]), &u));
        assert!(subseteq(&sp, &cs(&[2]), &u));
    }

    #[test]
    fn union_rejects_empty_and_incoherent() {
        assert!(union_coherent(&star_imap(), &[]).is_err());
        assert_eq!(
            union_coherent(&star_imap(), &[im(&[0]), im(&[1])]),
            Err(FragError::Incoherent)
        );
    }

    #[test]
    fn tilde_singleton_domain_is_fixed() {
        let sp = sp_of(Role::Forall, "~P(a)");
        let f = Fragment::fn_map(vec![(Fragment::Star, Fragment::Star)]);
        assert_eq!(tilde(&sp, &f), Ok(f));
    }

    #[test]
    fn tilde_adds_coherent_unions_and_is_idempotent() {
        let sp = sp_of(Role::Forall, "~ /\\{n in N} R_n(a)");
        let f = Fragment::fn_map(vec![
            (im(&[]), cs(&[0])),
            (im(&[0]), cs(&[0])),
        ]);
        // distinct index-map keys are pairwise incoherent here, so the
        // domain is already closed under coherent unions
        let t = tilde(&sp, &f).unwrap();
        assert!(subseteq(&sp, &f, &t));
        assert_eq!(t, f);
        assert_eq!(tilde(&sp, &t), Ok(t.clone()));
    }

    #[test]
    fn coherent_extension_trivial_case() {
        let sp = sp_of(Role::Forall, "~ /\\{n in N} R_n(a)");
        let f = Fragment::fn_map(vec![(im(&[]), cs(&[0])), (im(&[0]), cs(&[0]))]);
        assert_eq!(coherent_extension(&sp, &f, &f, &f, &[]), Ok(f.clone()));
    }

    #[test]
    fn coherent_extension_postconditions() {
        let sp = sp_of(Role::Forall, "~ /\\{n in N} R_n(a)");
        let f = Fragment::fn_map(vec![
            (im(&[]), cs(&[0])),
            (im(&[0]), cs(&[0])),
            (im(&[1]), cs(&[0])),
            (im(&[0, 1]), cs(&[0])),
        ]);
        assert!(in_f(&sp, &f));
        let g = Fragment::fn_map(vec![(im(&[]), cs(&[0])), (im(&[0]), cs(&[0]))]);
        assert!(subseteq(&sp, &g, &f) && in_f(&sp, &g));
        let g2 = g.clone();
        // f itself qualifies as a constraint: f restricted to g is exactly g
        let got = coherent_extension(&sp, &f, &g, &g2, &[f.clone()]).unwrap();
        assert!(leq(&sp, &got, &f));
        assert!(subseteq(&sp, &g2, &got));
        assert!(leq(&sp, &f, &got));
    }

    #[test]
    fn encode_decode_round_trip() {
        let cases = vec![
            Fragment::Star,
            Fragment::fn_map(vec![(Fragment::Star, Fragment::Star)]),
            Fragment::index_map(vec![(0, Fragment::Star), (3, cs(&[1]))]),
            Fragment::component_set(vec![(2, Fragment::fn_map(vec![]))]),
        ];
        for f in cases {
            let text = f.encode();
            assert_eq!(Fragment::decode(&text), Ok(f), "{text}");
        }
    }

    #[test]
    fn encoding_examples() {
        assert_eq!(Fragment::Star.encode(), "*");
        assert_eq!(im(&[0]).encode(), "(imap (0 *))");
        assert_eq!(
            Fragment::fn_map(vec![(Fragment::Star, Fragment::Star)]).encode(),
            "(fn (* *))"
        );
        assert_eq!(cs(&[1]).encode(), "(cset (1 *))");
    }

    #[test]
    fn enumerate_space_depth_one() {
        // index maps over stars with indices below 2: {}, {0}, {1}, {0,1}
        assert_eq!(enumerate_space(&star_imap(), 1, 2).len(), 4);
        assert_eq!(enumerate_space(&Space::Star, 0, 2), vec![Fragment::Star]);
    }
}
