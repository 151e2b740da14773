//! Model-based evaluation for the modal language.
//!
//! A formula is checked against a structure (stream plus background facts)
//! at a time point, inside a view. The view tracks the interval a window has
//! selected and which of those slots are actually visible after nested
//! windows; temporal operators quantify over the interval, atoms only see
//! visible slots. Answer streams come from a stratified fixpoint over the
//! ground rules.

use super::{
    check_lars_stratified, ground_lars, ArgExpr, CmpOp, GroundHead, GroundLarsRule, LarsFormula,
    LarsProgram, VarKind,
};
use crate::atoms::{Const, GroundAtom, PredKind, Term};
use crate::error::{Error, Result};
use crate::stream::{Slot, Stream};
use std::collections::{BTreeMap, BTreeSet};

pub struct LarsStructure<'a> {
    pub stream: &'a Stream,
    pub background: &'a Slot,
    /// Data constants an existential search ranges over.
    pub universe: &'a [Const],
}

/// The slice of the timeline a formula is being read against: `iv` is the
/// interval the innermost window selected, `visible` its intersection with
/// every enclosing window. Temporal quantifiers range over `iv`; an atom at
/// a point outside `visible` is not in the stream's view.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct View {
    pub iv: (usize, usize),
    pub visible: Option<(usize, usize)>,
}

impl View {
    pub fn full(n: usize) -> View {
        View { iv: (0, n), visible: Some((0, n)) }
    }

    fn narrowed(self, lo: usize, hi: usize) -> View {
        let visible = self.visible.and_then(|(a, b)| {
            let lo = lo.max(a);
            let hi = hi.min(b);
            (lo <= hi).then_some((lo, hi))
        });
        View { iv: (lo, hi), visible }
    }

    fn sees(&self, t: usize) -> bool {
        matches!(self.visible, Some((a, b)) if a <= t && t <= b)
    }
}

/// Checks a closed formula at `t` against the full stream.
pub fn eval_formula(st: &LarsStructure, f: &LarsFormula, t: usize) -> Result<bool> {
    let mut free = BTreeSet::new();
    free_vars(f, &mut BTreeSet::new(), &mut free);
    if let Some(v) = free.iter().next() {
        return Err(Error::Eval(format!("formula has a free variable {v}")));
    }
    if t > st.stream.n() {
        return Err(Error::Eval(format!(
            "time point {t} is outside the stream, which ends at {}",
            st.stream.n()
        )));
    }
    let mut env = BTreeMap::new();
    Ok(holds(st, View::full(st.stream.n()), t, f, &mut env))
}

fn free_vars(f: &LarsFormula, bound: &mut BTreeSet<String>, out: &mut BTreeSet<String>) {
    let term = |e: &Term, bound: &BTreeSet<String>, out: &mut BTreeSet<String>| {
        if let Term::Var(v) = e {
            if !bound.contains(v) {
                out.insert(v.clone());
            }
        }
    };
    match f {
        LarsFormula::True => {}
        LarsFormula::Atom(a) => {
            for t in &a.args {
                term(t, bound, out);
            }
        }
        LarsFormula::Cmp(_, l, r) => {
            term(&l.base, bound, out);
            term(&r.base, bound, out);
        }
        LarsFormula::At(e, g) => {
            term(&e.base, bound, out);
            free_vars(g, bound, out);
        }
        LarsFormula::Exists(vs, g) => {
            let fresh: Vec<&String> =
                vs.iter().map(|(v, _)| v).filter(|v| bound.insert((*v).clone())).collect();
            free_vars(g, bound, out);
            for v in fresh {
                bound.remove(v);
            }
        }
        LarsFormula::And(a, b) | LarsFormula::Or(a, b) | LarsFormula::Implies(a, b) => {
            free_vars(a, bound, out);
            free_vars(b, bound, out);
        }
        LarsFormula::Not(g)
        | LarsFormula::Diamond(g)
        | LarsFormula::Box(g)
        | LarsFormula::Window(_, g)
        | LarsFormula::Reset(g) => free_vars(g, bound, out),
    }
}

fn holds(
    st: &LarsStructure,
    view: View,
    t: usize,
    f: &LarsFormula,
    env: &mut BTreeMap<String, Const>,
) -> bool {
    match f {
        LarsFormula::True => true,
        LarsFormula::Atom(a) => {
            let Some(g) = a.apply(env).to_ground() else { return false };
            (view.sees(t) && st.stream.slot(t).contains(&g)) || st.background.contains(&g)
        }
        LarsFormula::Cmp(op, l, r) => compare(*op, l, r, env),
        LarsFormula::Not(g) => !holds(st, view, t, g, env),
        LarsFormula::And(a, b) => holds(st, view, t, a, env) && holds(st, view, t, b, env),
        LarsFormula::Or(a, b) => holds(st, view, t, a, env) || holds(st, view, t, b, env),
        LarsFormula::Implies(a, b) => !holds(st, view, t, a, env) || holds(st, view, t, b, env),
        LarsFormula::Diamond(g) => {
            (view.iv.0..=view.iv.1).any(|u| holds(st, view, u, g, env))
        }
        LarsFormula::Box(g) => (view.iv.0..=view.iv.1).all(|u| holds(st, view, u, g, env)),
        LarsFormula::At(e, g) => match resolve(e, env) {
            Value::Num(p) if p >= view.iv.0 as i64 && p <= view.iv.1 as i64 => {
                holds(st, view, p as usize, g, env)
            }
            _ => false,
        },
        LarsFormula::Window(w, g) => {
            let lo = t.saturating_sub(*w as usize);
            holds(st, view.narrowed(lo, t), t, g, env)
        }
        LarsFormula::Reset(g) => holds(st, View::full(st.stream.n()), t, g, env),
        LarsFormula::Exists(vars, g) => search(st, view, t, vars, g, env),
    }
}

fn search(
    st: &LarsStructure,
    view: View,
    t: usize,
    vars: &[(String, VarKind)],
    g: &LarsFormula,
    env: &mut BTreeMap<String, Const>,
) -> bool {
    let Some((v, kind)) = vars.first() else { return holds(st, view, t, g, env) };
    let candidates: Vec<Const> = match kind {
        // Time points are searched over the whole stream, not the view: the
        // view only limits what formulas inside see.
        VarKind::Time => (0..=st.stream.n() as u64).map(Const::Nat).collect(),
        VarKind::Data => st.universe.to_vec(),
    };
    let found = candidates.into_iter().any(|c| {
        env.insert(v.clone(), c);
        search(st, view, t, &vars[1..], g, env)
    });
    env.remove(v);
    found
}

enum Value {
    Num(i64),
    Sym(String),
    Ill,
}

fn resolve(e: &ArgExpr, env: &BTreeMap<String, Const>) -> Value {
    let base = match &e.base {
        Term::Const(c) => c.clone(),
        Term::Var(v) => match env.get(v) {
            Some(c) => c.clone(),
            None => return Value::Ill,
        },
    };
    match base {
        Const::Nat(k) => Value::Num(k as i64 + e.offset),
        Const::Sym(s) if e.offset == 0 => Value::Sym(s),
        Const::Sym(_) => Value::Ill,
    }
}

pub(super) fn compare(op: CmpOp, l: &ArgExpr, r: &ArgExpr, env: &BTreeMap<String, Const>) -> bool {
    let eq = match (resolve(l, env), resolve(r, env)) {
        (Value::Ill, _) | (_, Value::Ill) => return false,
        (Value::Num(a), Value::Num(b)) => a == b,
        (Value::Sym(a), Value::Sym(b)) => a == b,
        _ => false,
    };
    match op {
        CmpOp::Eq => eq,
        CmpOp::Neq => !eq,
    }
}

/// Computes the answer stream of `program` for `input` at query time `t`:
/// the unique minimal model of the reduct, which for a stratified program is
/// the stratum-by-stratum fixpoint. Plain rule heads land at `t`, `at[..]`
/// heads at their named point, box implications at every point where their
/// premise holds.
pub fn eval_answer_stream_lars(
    program: &LarsProgram,
    input: &Stream,
    background: &Slot,
    t: usize,
) -> Result<Stream> {
    eval_answer_stream_lars_in(program, input, background, t, &[])
}

/// Like `eval_answer_stream_lars`, but grounds over the given constants on
/// top of those mentioned by the program and inputs. Differential comparisons
/// pass the other side's constants so both programs read the same constant
/// set.
pub fn eval_answer_stream_lars_in(
    program: &LarsProgram,
    input: &Stream,
    background: &Slot,
    t: usize,
    extra: &[Const],
) -> Result<Stream> {
    if t > input.n() {
        return Err(Error::Eval(format!(
            "query time {t} is outside the stream, which ends at {}",
            input.n()
        )));
    }
    let strata = check_lars_stratified(program)?;
    check_inputs(program, input, background)?;

    let mut universe: BTreeSet<Const> = program.constants();
    universe.extend(input.constants());
    for a in background {
        universe.extend(a.args.iter().cloned());
    }
    universe.extend(extra.iter().cloned());
    let n = input.n();
    let ground = ground_lars(program, &universe, n);
    let universe: Vec<Const> = universe.into_iter().collect();

    let mut buckets: Vec<Vec<&GroundLarsRule>> = vec![Vec::new(); strata.num_levels.max(1)];
    for r in &ground {
        let pred = match &r.head {
            GroundHead::Now(h) | GroundHead::AtTime(_, h) => &h.pred,
            GroundHead::BoxRule { cons, .. } => &cons.pred,
        };
        let level = strata.level.get(pred).copied().unwrap_or(0);
        buckets[level].push(r);
    }

    let mut model = Stream::new(input.slots().to_vec());
    for bucket in &buckets {
        loop {
            let mut fired: Vec<(usize, GroundAtom)> = Vec::new();
            {
                let st = LarsStructure { stream: &model, background, universe: &universe };
                let mut env = BTreeMap::new();
                for rule in bucket {
                    if !rule
                        .body
                        .iter()
                        .all(|f| holds(&st, View::full(n), t, f, &mut env))
                    {
                        continue;
                    }
                    match &rule.head {
                        GroundHead::Now(h) => fired.push((t, h.clone())),
                        GroundHead::AtTime(p, h) => fired.push((*p, h.clone())),
                        GroundHead::BoxRule { premise, cons } => {
                            for u in 0..=n {
                                if holds(&st, View::full(n), u, premise, &mut env) {
                                    fired.push((u, cons.clone()));
                                }
                            }
                        }
                    }
                }
            }
            let mut changed = false;
            for (slot, atom) in fired {
                if model.slot(slot).contains(&atom) {
                    continue;
                }
                if program.sig.is_extensional(&atom.pred) {
                    return Err(Error::Eval(format!(
                        "no answer stream: the rules derive {atom} at {slot}, but {} is an \
                         input predicate and the input does not contain it there",
                        atom.pred
                    )));
                }
                model.slot_mut(slot).insert(atom);
                changed = true;
            }
            if !changed {
                break;
            }
        }
    }
    Ok(model)
}

fn check_inputs(program: &LarsProgram, input: &Stream, background: &Slot) -> Result<()> {
    for a in input.atoms() {
        match program.sig.kind_of(&a.pred) {
            Some(PredKind::Stream) | None => {}
            Some(kind) => {
                return Err(Error::Eval(format!(
                    "input stream contains {a}, but {} is {kind}",
                    a.pred
                )));
            }
        }
        if let Some(arity) = program.sig.arity_of(&a.pred) {
            if arity != a.args.len() {
                return Err(Error::Eval(format!(
                    "input atom {a} has arity {}, declared {arity}",
                    a.args.len()
                )));
            }
        }
    }
    for a in background {
        match program.sig.kind_of(&a.pred) {
            Some(PredKind::Background) | None => {}
            Some(kind) => {
                return Err(Error::Eval(format!(
                    "background contains {a}, but {} is {kind}",
                    a.pred
                )));
            }
        }
        if let Some(arity) = program.sig.arity_of(&a.pred) {
            if arity != a.args.len() {
                return Err(Error::Eval(format!(
                    "background atom {a} has arity {}, declared {arity}",
                    a.args.len()
                )));
            }
        }
    }
    Ok(())
}
