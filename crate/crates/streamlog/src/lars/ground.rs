//! Grounding for the modal language.
//!
//! A variable whose occurrences all sit under one negation is scoped to that
//! negation: the grounder leaves it in place and wraps that negation's body
//! in an existential marker, giving the not-exists reading. Every other
//! variable is enumerated rule-wide: data variables over the constant
//! universe, time variables over the stream's time points, narrowed through
//! required equality conjuncts where possible.

use super::eval::compare;
use super::{classify_rule_vars, ArgExpr, CmpOp, LarsFormula, LarsProgram, LarsRule, VarKind};
use crate::atoms::{Const, GroundAtom, Term};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroundHead {
    /// Fires at the evaluation time point.
    Now(GroundAtom),
    /// Fires at a fixed time point.
    AtTime(usize, GroundAtom),
    /// A box implication: at every time point where the premise holds, the
    /// conclusion must hold there.
    BoxRule { premise: LarsFormula, cons: GroundAtom },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundLarsRule {
    pub head: GroundHead,
    pub body: Vec<LarsFormula>,
    pub source_idx: usize,
}

pub fn ground_lars(
    program: &LarsProgram,
    universe: &BTreeSet<Const>,
    n: usize,
) -> Vec<GroundLarsRule> {
    let mut out = Vec::new();
    for (idx, rule) in program.rules.iter().enumerate() {
        Grounder {
            rule,
            idx,
            kinds: classify_rule_vars(rule).expect("program was validated"),
            data_domain: universe.iter().cloned().collect(),
            n,
        }
        .run(&mut out);
    }
    out
}

struct Grounder<'a> {
    rule: &'a LarsRule,
    idx: usize,
    kinds: BTreeMap<String, VarKind>,
    data_domain: Vec<Const>,
    n: usize,
}

impl<'a> Grounder<'a> {
    fn run(&self, out: &mut Vec<GroundLarsRule>) {
        let scopes = negation_scopes(self.rule);
        let mut pending: Vec<String> = Vec::new();
        let mut by_not: BTreeMap<u32, Vec<(String, VarKind)>> = BTreeMap::new();
        for v in self.kinds.keys() {
            match scopes.get(v).copied().flatten() {
                Some(id) => by_not.entry(id).or_default().push((v.clone(), self.kinds[v])),
                None => pending.push(v.clone()),
            }
        }

        let mut required: Vec<&LarsFormula> = Vec::new();
        for b in &self.rule.body {
            required.extend(b.conjuncts());
        }
        if let LarsFormula::Box(g) = &self.rule.head {
            if let LarsFormula::Implies(prem, _) = g.as_ref() {
                required.extend(prem.conjuncts());
            }
        }

        let mut subst = BTreeMap::new();
        self.enumerate(&required, &by_not, &mut pending, &mut subst, out);
    }

    fn enumerate(
        &self,
        required: &[&LarsFormula],
        by_not: &BTreeMap<u32, Vec<(String, VarKind)>>,
        pending: &mut Vec<String>,
        subst: &mut BTreeMap<String, Const>,
        out: &mut Vec<GroundLarsRule>,
    ) {
        if pending.is_empty() {
            self.instantiate(by_not, subst, out);
            return;
        }
        let (pos, values) = self.pick_next(required, subst, pending);
        let var = pending.remove(pos);
        for c in values {
            subst.insert(var.clone(), c);
            self.enumerate(required, by_not, pending, subst, out);
        }
        subst.remove(&var);
        pending.push(var);
    }

    /// Chooses the next variable to assign and its candidate values: prefer
    /// one pinned down by equalities, then an unpinned data variable (whose
    /// value can feed later narrowing), then the time variable the conjuncts
    /// mention most, which is usually the reference point the others hang
    /// off.
    fn pick_next(
        &self,
        required: &[&LarsFormula],
        subst: &BTreeMap<String, Const>,
        pending: &[String],
    ) -> (usize, Vec<Const>) {
        for (i, v) in pending.iter().enumerate() {
            if let Some(values) = self.narrowed_candidates(v, required, subst) {
                return (i, values);
            }
        }
        let i = pending.iter().position(|v| self.kinds[v] == VarKind::Data).unwrap_or_else(|| {
            let count = |v: &str| required.iter().filter(|c| mentions(c, v)).count();
            let mut best = 0;
            for j in 1..pending.len() {
                if count(&pending[j]) > count(&pending[best]) {
                    best = j;
                }
            }
            best
        });
        let values = match self.kinds[&pending[i]] {
            VarKind::Data => self.data_domain.clone(),
            VarKind::Time => (0..=self.n as u64).map(Const::Nat).collect(),
        };
        (i, values)
    }

    /// Candidate values for a variable from a required conjunct that pins it
    /// down under the current partial assignment. `None` when no conjunct
    /// does.
    fn narrowed_candidates(
        &self,
        v: &str,
        required: &[&LarsFormula],
        subst: &BTreeMap<String, Const>,
    ) -> Option<Vec<Const>> {
        for (i, conj) in required.iter().enumerate() {
            let Some(pin) = self.pin_values(v, conj, subst) else { continue };
            if pin.representative {
                // A branch that never mentions the variable is satisfied by
                // any value, so one stand-in is enough, but only if nothing
                // outside this conjunct constrains the variable.
                let elsewhere = self.head_mentions(v)
                    || required.iter().enumerate().any(|(j, c)| j != i && mentions(c, v));
                if elsewhere {
                    continue;
                }
            }
            return Some(pin.values.into_iter().collect());
        }
        None
    }

    /// Whether the head reads the variable outside the conjuncts already in
    /// `required`: a box head's premise is enumerated there, so only its
    /// conclusion counts.
    fn head_mentions(&self, v: &str) -> bool {
        match &self.rule.head {
            LarsFormula::Box(g) => match g.as_ref() {
                LarsFormula::Implies(_, cons) => mentions(cons, v),
                _ => mentions(&self.rule.head, v),
            },
            h => mentions(h, v),
        }
    }

    /// The values under which the formula can still hold, when that set can
    /// be read off its and/or structure: an equality on the variable pins it,
    /// a conjunction is pinned by any pinned conjunct, a disjunction by the
    /// union over its branches. An empty set means the formula rules out
    /// every in-range value, so the instance can never fire.
    fn pin_values(
        &self,
        v: &str,
        f: &LarsFormula,
        subst: &BTreeMap<String, Const>,
    ) -> Option<Pin> {
        let branches = f.disjuncts();
        if branches.len() > 1 {
            let mut pin = Pin { values: BTreeSet::new(), representative: false };
            for b in branches {
                if !mentions(b, v) {
                    pin.values.insert(self.stand_in(self.kinds[v])?);
                    pin.representative = true;
                    continue;
                }
                let sub = self.pin_values(v, b, subst)?;
                pin.values.extend(sub.values);
                pin.representative |= sub.representative;
            }
            return Some(pin);
        }
        let conjs = f.conjuncts();
        if conjs.len() > 1 {
            for (i, c) in conjs.iter().enumerate() {
                let Some(pin) = self.pin_values(v, c, subst) else { continue };
                // A stand-in value only covers the branch it came from, so a
                // sibling that also reads the variable rules it out.
                if pin.representative
                    && conjs.iter().enumerate().any(|(j, s)| j != i && mentions(s, v))
                {
                    return None;
                }
                return Some(pin);
            }
            return None;
        }
        let LarsFormula::Cmp(CmpOp::Eq, l, r) = f else { return None };
        let (mine, other) = if expr_is_var(l, v) && !expr_is_var(r, v) {
            (l, r)
        } else if expr_is_var(r, v) && !expr_is_var(l, v) {
            (r, l)
        } else {
            return None;
        };
        let mut values = BTreeSet::new();
        match resolve_static(other, subst) {
            None => return None,
            // Ill-formed on the other side: the equality never holds.
            Some(StaticVal::Ill) => {}
            Some(StaticVal::Sym(s)) => {
                let c = Const::Sym(s);
                if mine.offset == 0
                    && self.kinds[v] == VarKind::Data
                    && self.data_domain.contains(&c)
                {
                    values.insert(c);
                }
            }
            Some(StaticVal::Num(val)) => {
                let k = val - mine.offset;
                if k >= 0 {
                    let c = Const::Nat(k as u64);
                    let in_domain = match self.kinds[v] {
                        VarKind::Time => k <= self.n as i64,
                        VarKind::Data => self.data_domain.contains(&c),
                    };
                    if in_domain {
                        values.insert(c);
                    }
                }
            }
        }
        Some(Pin { values, representative: false })
    }

    /// A value witnessing a disjunct that ignores the variable. `None` only
    /// when the variable's domain is empty, so no value exists at all.
    fn stand_in(&self, kind: VarKind) -> Option<Const> {
        match kind {
            VarKind::Time => Some(Const::Nat(0)),
            VarKind::Data => self.data_domain.first().cloned(),
        }
    }

    fn instantiate(
        &self,
        by_not: &BTreeMap<u32, Vec<(String, VarKind)>>,
        subst: &BTreeMap<String, Const>,
        out: &mut Vec<GroundLarsRule>,
    ) {
        // Negation ids are re-assigned in the same traversal order as the
        // scope analysis, so each existential lands on the right negation.
        let mut counter = 0u32;
        let closed_head = close_scoped(&self.rule.head.apply(subst), &mut counter, by_not);
        let head = match &closed_head {
            LarsFormula::Atom(a) => {
                GroundHead::Now(a.to_ground().expect("head variables are rule-level"))
            }
            LarsFormula::At(e, f) => {
                let LarsFormula::Atom(a) = f.as_ref() else { unreachable!("validated head") };
                let point = match resolve_static(e, subst) {
                    Some(StaticVal::Num(p)) if p >= 0 && p <= self.n as i64 => p as usize,
                    // The head names a time point outside the stream; no
                    // instance can satisfy it, so it is dropped here.
                    _ => return,
                };
                GroundHead::AtTime(point, a.to_ground().expect("ground head"))
            }
            LarsFormula::Box(g) => {
                let LarsFormula::Implies(prem, cons) = g.as_ref() else {
                    unreachable!("validated head")
                };
                let LarsFormula::Atom(a) = cons.as_ref() else { unreachable!("validated head") };
                let premise = self.simplify(prem.as_ref().clone());
                if is_false(&premise) {
                    return;
                }
                GroundHead::BoxRule { premise, cons: a.to_ground().expect("ground head") }
            }
            _ => unreachable!("validated head"),
        };
        let mut body = Vec::new();
        for f in &self.rule.body {
            let g = self.simplify(close_scoped(&f.apply(subst), &mut counter, by_not));
            if is_false(&g) {
                return;
            }
            if !is_true(&g) {
                body.push(g);
            }
        }
        out.push(GroundLarsRule { head, body, source_idx: self.idx });
    }

    /// Folds subformulas that substitution has already decided: ground
    /// comparisons become truth constants and collapse the connectives above
    /// them, so instances keep only the parts that still read the stream.
    /// `not true` stands for falsehood. An `at` kept in place may still be
    /// view-dependent, so it only folds when its point lies outside the
    /// timeline entirely or its body is already false.
    fn simplify(&self, f: LarsFormula) -> LarsFormula {
        use LarsFormula as F;
        match f {
            F::Cmp(op, l, r) => {
                if matches!(l.base, Term::Var(_)) || matches!(r.base, Term::Var(_)) {
                    return F::Cmp(op, l, r);
                }
                if compare(op, &l, &r, &BTreeMap::new()) {
                    F::True
                } else {
                    ff()
                }
            }
            F::And(a, b) => {
                let a = self.simplify(*a);
                let b = self.simplify(*b);
                if is_false(&a) || is_false(&b) {
                    ff()
                } else if is_true(&a) {
                    b
                } else if is_true(&b) {
                    a
                } else {
                    F::And(Box::new(a), Box::new(b))
                }
            }
            F::Or(a, b) => {
                let a = self.simplify(*a);
                let b = self.simplify(*b);
                if is_true(&a) || is_true(&b) {
                    F::True
                } else if is_false(&a) {
                    b
                } else if is_false(&b) {
                    a
                } else {
                    F::Or(Box::new(a), Box::new(b))
                }
            }
            F::Implies(a, b) => {
                let a = self.simplify(*a);
                let b = self.simplify(*b);
                if is_false(&a) || is_true(&b) {
                    F::True
                } else if is_true(&a) {
                    b
                } else {
                    F::implies(a, b)
                }
            }
            F::Not(g) => {
                let g = self.simplify(*g);
                if is_true(&g) {
                    ff()
                } else if is_false(&g) {
                    F::True
                } else {
                    F::Not(Box::new(g))
                }
            }
            F::At(e, g) => {
                let g = self.simplify(*g);
                if is_false(&g) {
                    return ff();
                }
                if !matches!(e.base, Term::Var(_)) {
                    match resolve_static(&e, &BTreeMap::new()) {
                        Some(StaticVal::Num(p)) if p >= 0 && p <= self.n as i64 => {}
                        _ => return ff(),
                    }
                }
                F::at(e, g)
            }
            F::Window(w, g) => {
                let g = self.simplify(*g);
                if is_true(&g) {
                    F::True
                } else if is_false(&g) {
                    ff()
                } else {
                    F::window(w, g)
                }
            }
            F::Reset(g) => {
                let g = self.simplify(*g);
                if is_true(&g) {
                    F::True
                } else if is_false(&g) {
                    ff()
                } else {
                    F::Reset(Box::new(g))
                }
            }
            // Views are never empty, so box and diamond agree on constants.
            F::Diamond(g) => {
                let g = self.simplify(*g);
                if is_true(&g) {
                    F::True
                } else if is_false(&g) {
                    ff()
                } else {
                    F::diamond(g)
                }
            }
            F::Box(g) => {
                let g = self.simplify(*g);
                if is_true(&g) {
                    F::True
                } else if is_false(&g) {
                    ff()
                } else {
                    F::always(g)
                }
            }
            F::Exists(vs, g) => {
                let g = self.simplify(*g);
                if is_false(&g) {
                    ff()
                } else if is_true(&g)
                    && vs
                        .iter()
                        .all(|(_, k)| *k == VarKind::Time || !self.data_domain.is_empty())
                {
                    F::True
                } else {
                    F::Exists(vs, Box::new(g))
                }
            }
            leaf => leaf,
        }
    }
}

struct Pin {
    values: BTreeSet<Const>,
    representative: bool,
}

fn ff() -> LarsFormula {
    LarsFormula::Not(Box::new(LarsFormula::True))
}

fn is_true(f: &LarsFormula) -> bool {
    matches!(f, LarsFormula::True)
}

fn is_false(f: &LarsFormula) -> bool {
    matches!(f, LarsFormula::Not(g) if matches!(g.as_ref(), LarsFormula::True))
}

fn expr_is_var(e: &ArgExpr, v: &str) -> bool {
    matches!(&e.base, Term::Var(name) if name == v)
}

fn mentions(f: &LarsFormula, v: &str) -> bool {
    let mut found = false;
    f.walk(&mut |g| match g {
        LarsFormula::Atom(a) => found |= a.vars().contains(&v),
        LarsFormula::Cmp(_, l, r) => found |= expr_is_var(l, v) || expr_is_var(r, v),
        LarsFormula::At(e, _) => found |= expr_is_var(e, v),
        _ => {}
    });
    found
}

enum StaticVal {
    Num(i64),
    Sym(String),
    Ill,
}

/// The expression's value under the partial assignment, mirroring how the
/// evaluator reads it. `None` when it reads a variable not yet assigned.
fn resolve_static(e: &ArgExpr, subst: &BTreeMap<String, Const>) -> Option<StaticVal> {
    let c = match &e.base {
        Term::Const(c) => c.clone(),
        Term::Var(u) => subst.get(u)?.clone(),
    };
    Some(match c {
        Const::Nat(k) => StaticVal::Num(k as i64 + e.offset),
        Const::Sym(s) if e.offset == 0 => StaticVal::Sym(s),
        Const::Sym(_) => StaticVal::Ill,
    })
}

/// Where each variable lives: `None` for rule level, `Some(id)` for the
/// negation whose traversal id is `id`. A variable is scoped to a negation
/// exactly when that negation encloses all of its occurrences and no
/// shallower enclosing negation is shared by them all.
fn negation_scopes(rule: &LarsRule) -> BTreeMap<String, Option<u32>> {
    let mut occurrences: BTreeMap<String, Vec<Vec<u32>>> = BTreeMap::new();
    let mut counter = 0u32;
    let mut roots: Vec<&LarsFormula> = vec![&rule.head];
    roots.extend(rule.body.iter());
    for (i, f) in roots.iter().enumerate() {
        // The root marker keeps occurrences in different body formulas from
        // sharing a prefix.
        let mut path = vec![i as u32];
        collect_occurrences(f, &mut path, &mut counter, &mut occurrences);
    }
    occurrences
        .into_iter()
        .map(|(v, paths)| {
            let lcp = longest_common_prefix(&paths);
            let scope = if lcp.len() >= 2 { Some(lcp[lcp.len() - 1]) } else { None };
            (v, scope)
        })
        .collect()
}

fn collect_occurrences(
    f: &LarsFormula,
    path: &mut Vec<u32>,
    counter: &mut u32,
    occ: &mut BTreeMap<String, Vec<Vec<u32>>>,
) {
    let record = |v: &str, path: &[u32], occ: &mut BTreeMap<String, Vec<Vec<u32>>>| {
        occ.entry(v.to_string()).or_default().push(path.to_vec());
    };
    match f {
        LarsFormula::True => {}
        LarsFormula::Atom(a) => {
            for v in a.vars() {
                record(v, path, occ);
            }
        }
        LarsFormula::Cmp(_, l, r) => {
            for e in [l, r] {
                if let Term::Var(v) = &e.base {
                    record(v, path, occ);
                }
            }
        }
        LarsFormula::At(e, g) => {
            if let Term::Var(v) = &e.base {
                record(v, path, occ);
            }
            collect_occurrences(g, path, counter, occ);
        }
        LarsFormula::Not(g) => {
            *counter += 1;
            path.push(*counter);
            collect_occurrences(g, path, counter, occ);
            path.pop();
        }
        LarsFormula::And(a, b) | LarsFormula::Or(a, b) | LarsFormula::Implies(a, b) => {
            collect_occurrences(a, path, counter, occ);
            collect_occurrences(b, path, counter, occ);
        }
        LarsFormula::Diamond(g)
        | LarsFormula::Box(g)
        | LarsFormula::Window(_, g)
        | LarsFormula::Reset(g)
        | LarsFormula::Exists(_, g) => collect_occurrences(g, path, counter, occ),
    }
}

fn longest_common_prefix(paths: &[Vec<u32>]) -> Vec<u32> {
    let first = &paths[0];
    let mut len = first.len();
    for p in &paths[1..] {
        let mut k = 0;
        while k < len && k < p.len() && p[k] == first[k] {
            k += 1;
        }
        len = k;
    }
    first[..len].to_vec()
}

/// Re-walks a formula with the same negation numbering as the scope analysis
/// and wraps each negation that owns variables in an existential over them.
fn close_scoped(
    f: &LarsFormula,
    counter: &mut u32,
    by_not: &BTreeMap<u32, Vec<(String, VarKind)>>,
) -> LarsFormula {
    match f {
        LarsFormula::Not(g) => {
            *counter += 1;
            let id = *counter;
            let inner = close_scoped(g, counter, by_not);
            match by_not.get(&id) {
                Some(vars) => {
                    LarsFormula::not(LarsFormula::Exists(vars.clone(), Box::new(inner)))
                }
                None => LarsFormula::not(inner),
            }
        }
        LarsFormula::And(a, b) => LarsFormula::And(
            Box::new(close_scoped(a, counter, by_not)),
            Box::new(close_scoped(b, counter, by_not)),
        ),
        LarsFormula::Or(a, b) => LarsFormula::Or(
            Box::new(close_scoped(a, counter, by_not)),
            Box::new(close_scoped(b, counter, by_not)),
        ),
        LarsFormula::Implies(a, b) => {
            LarsFormula::implies(close_scoped(a, counter, by_not), close_scoped(b, counter, by_not))
        }
        LarsFormula::Diamond(g) => LarsFormula::diamond(close_scoped(g, counter, by_not)),
        LarsFormula::Box(g) => LarsFormula::always(close_scoped(g, counter, by_not)),
        LarsFormula::At(e, g) => LarsFormula::at(e.clone(), close_scoped(g, counter, by_not)),
        LarsFormula::Window(w, g) => LarsFormula::window(*w, close_scoped(g, counter, by_not)),
        LarsFormula::Reset(g) => LarsFormula::Reset(Box::new(close_scoped(g, counter, by_not))),
        LarsFormula::Exists(vs, g) => {
            LarsFormula::Exists(vs.clone(), Box::new(close_scoped(g, counter, by_not)))
        }
        leaf => leaf.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lars::parse_lars;

    fn ground(text: &str, consts: &[Const], n: usize) -> Vec<GroundLarsRule> {
        let p = parse_lars(text).unwrap();
        ground_lars(&p, &consts.iter().cloned().collect(), n)
    }

    #[test]
    fn narrowing_keeps_only_reachable_time_points() {
        // T is free over 0..=3; T1 is pinned to T-1, which rules out T = 0.
        let rules = ground("a <- wplus[0] at[T] true and at[T1] p and T1 = T - 1.", &[], 3);
        assert_eq!(rules.len(), 3);
    }

    #[test]
    fn disjunctive_equalities_narrow_to_the_union() {
        let rules = ground("a <- at[T1] p and (T1 = 0 or T1 = 2).", &[], 3);
        assert_eq!(rules.len(), 2);
    }

    #[test]
    fn at_heads_outside_the_stream_are_pruned() {
        let rules = ground("at[T-1] a <- at[T] c.", &[], 2);
        // T ranges over 0..=2, but T = 0 puts the head at -1.
        assert_eq!(rules.len(), 2);
        assert!(matches!(rules[0].head, GroundHead::AtTime(0, _)));
        assert!(matches!(rules[1].head, GroundHead::AtTime(1, _)));
    }

    #[test]
    fn negation_scoped_variables_become_existentials() {
        let rules = ground("a <- p and not (at[T1] q and T1 = 0).", &[], 1);
        assert_eq!(rules.len(), 1);
        let LarsFormula::And(_, r) = &rules[0].body[0] else { panic!("and") };
        let LarsFormula::Not(inner) = r.as_ref() else { panic!("not") };
        let LarsFormula::Exists(vars, _) = inner.as_ref() else {
            panic!("expected existential, got {inner}")
        };
        assert_eq!(vars, &[("T1".to_string(), VarKind::Time)]);
    }

    #[test]
    fn spanning_nested_negations_binds_at_the_outer_one() {
        let rules = ground("a <- not (at[T1] q and not at[T1] p).", &[], 1);
        assert_eq!(rules.len(), 1);
        let LarsFormula::Not(outer) = &rules[0].body[0] else { panic!("not") };
        let LarsFormula::Exists(vars, inner) = outer.as_ref() else {
            panic!("expected existential at the outer negation")
        };
        assert_eq!(vars, &[("T1".to_string(), VarKind::Time)]);
        let LarsFormula::And(_, r) = inner.as_ref() else { panic!("and") };
        assert!(
            matches!(r.as_ref(), LarsFormula::Not(g) if !matches!(g.as_ref(), LarsFormula::Exists(..))),
            "inner negation must not re-bind T1"
        );
    }

    #[test]
    fn variables_shared_with_positive_context_stay_rule_level() {
        let rules = ground("a(X) <- q(X) and not r(X).", &[Const::sym("c1"), Const::sym("c2")], 0);
        assert_eq!(rules.len(), 2);
        for rule in &rules {
            let LarsFormula::And(_, r) = &rule.body[0] else { panic!("and") };
            let LarsFormula::Not(g) = r.as_ref() else { panic!("not") };
            assert!(matches!(g.as_ref(), LarsFormula::Atom(a) if a.to_ground().is_some()));
        }
    }

    #[test]
    fn data_variables_enumerate_the_universe() {
        let rules = ground("box(p(X) <- q(X)).", &[Const::Nat(1), Const::Nat(2)], 0);
        assert_eq!(rules.len(), 2);
        assert!(rules
            .iter()
            .all(|r| matches!(&r.head, GroundHead::BoxRule { premise, .. } if matches!(premise, LarsFormula::Atom(a) if a.to_ground().is_some()))));
    }
}
