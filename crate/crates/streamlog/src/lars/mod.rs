//! The modal rule language: formulas built from atoms with negation,
//! conjunction, disjunction, implication, the temporal operators `diamond`,
//! `box` and `at[..]`, tuple-based windows `wplus[w]` and the window reset
//! `reset`, plus equality tests over time points and data.

mod eval;
mod ground;
pub mod oracle;
mod parse;

pub use eval::{
    eval_answer_stream_lars, eval_answer_stream_lars_in, eval_formula, LarsStructure, View,
};
pub use ground::{ground_lars, GroundHead, GroundLarsRule};
pub use parse::parse_lars;

use crate::atoms::{Atom, Const, PredKind, Signature, Term};
use crate::depgraph::{stratify, DepEdge, StratTable};
use crate::error::{Error, Result, StratificationError};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// A time or data expression: a base term plus an integer offset, as in
/// `T - 1` or `C + 1`. Offsets on symbolic constants have no value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArgExpr {
    pub base: Term,
    pub offset: i64,
}

impl ArgExpr {
    pub fn var(name: &str) -> ArgExpr {
        ArgExpr { base: Term::var(name), offset: 0 }
    }

    pub fn var_minus(name: &str, k: i64) -> ArgExpr {
        ArgExpr { base: Term::var(name), offset: -k }
    }

    pub fn point(p: u64) -> ArgExpr {
        ArgExpr { base: Term::nat(p), offset: 0 }
    }
}

impl fmt::Display for ArgExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.base, self.offset) {
            (b, 0) => write!(f, "{b}"),
            (Term::Const(Const::Nat(n)), k) => {
                // Fold constant arithmetic when it stays a natural.
                let v = n.checked_add_signed(k);
                match v {
                    Some(v) => write!(f, "{v}"),
                    None => write!(f, "{n}-{}", -k),
                }
            }
            (b, k) if k > 0 => write!(f, "{b}+{k}"),
            (b, k) => write!(f, "{b}-{}", -k),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CmpOp {
    Eq,
    Neq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarKind {
    Time,
    Data,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LarsFormula {
    True,
    Atom(Atom),
    Cmp(CmpOp, ArgExpr, ArgExpr),
    Not(Box<LarsFormula>),
    And(Box<LarsFormula>, Box<LarsFormula>),
    Or(Box<LarsFormula>, Box<LarsFormula>),
    Implies(Box<LarsFormula>, Box<LarsFormula>),
    Diamond(Box<LarsFormula>),
    Box(Box<LarsFormula>),
    At(ArgExpr, Box<LarsFormula>),
    Window(u64, Box<LarsFormula>),
    Reset(Box<LarsFormula>),
    /// Internal: introduced by grounding for variables whose occurrences all
    /// sit under one negation; they are searched, not enumerated rule-wide.
    Exists(Vec<(String, VarKind)>, Box<LarsFormula>),
}

impl LarsFormula {
    pub fn atom(a: Atom) -> LarsFormula {
        LarsFormula::Atom(a)
    }

    pub fn not(f: LarsFormula) -> LarsFormula {
        LarsFormula::Not(Box::new(f))
    }

    pub fn falsum() -> LarsFormula {
        LarsFormula::not(LarsFormula::True)
    }

    pub fn is_falsum(&self) -> bool {
        matches!(self, LarsFormula::Not(inner) if **inner == LarsFormula::True)
    }

    pub fn diamond(f: LarsFormula) -> LarsFormula {
        LarsFormula::Diamond(Box::new(f))
    }

    pub fn always(f: LarsFormula) -> LarsFormula {
        LarsFormula::Box(Box::new(f))
    }

    pub fn at(e: ArgExpr, f: LarsFormula) -> LarsFormula {
        LarsFormula::At(e, Box::new(f))
    }

    pub fn window(w: u64, f: LarsFormula) -> LarsFormula {
        LarsFormula::Window(w, Box::new(f))
    }

    pub fn implies(a: LarsFormula, b: LarsFormula) -> LarsFormula {
        LarsFormula::Implies(Box::new(a), Box::new(b))
    }

    pub fn eq(l: ArgExpr, r: ArgExpr) -> LarsFormula {
        LarsFormula::Cmp(CmpOp::Eq, l, r)
    }

    pub fn neq(l: ArgExpr, r: ArgExpr) -> LarsFormula {
        LarsFormula::Cmp(CmpOp::Neq, l, r)
    }

    /// Conjunction of a list, dropping `true` and flattening the identity.
    pub fn and_of(parts: Vec<LarsFormula>) -> LarsFormula {
        let mut parts: Vec<LarsFormula> =
            parts.into_iter().filter(|p| !matches!(p, LarsFormula::True)).collect();
        match parts.len() {
            0 => LarsFormula::True,
            1 => parts.pop().unwrap(),
            _ => {
                let mut it = parts.into_iter();
                let first = it.next().unwrap();
                it.fold(first, |acc, p| LarsFormula::And(Box::new(acc), Box::new(p)))
            }
        }
    }

    /// Disjunction of a list, dropping unsatisfiable parts; empty lists give
    /// the unsatisfiable formula.
    pub fn or_of(parts: Vec<LarsFormula>) -> LarsFormula {
        let mut parts: Vec<LarsFormula> = parts.into_iter().filter(|p| !p.is_falsum()).collect();
        match parts.len() {
            0 => LarsFormula::falsum(),
            1 => parts.pop().unwrap(),
            _ => {
                let mut it = parts.into_iter();
                let first = it.next().unwrap();
                it.fold(first, |acc, p| LarsFormula::Or(Box::new(acc), Box::new(p)))
            }
        }
    }

    /// Flattens nested conjunctions into a list.
    pub fn conjuncts(&self) -> Vec<&LarsFormula> {
        match self {
            LarsFormula::And(a, b) => {
                let mut out = a.conjuncts();
                out.extend(b.conjuncts());
                out
            }
            other => vec![other],
        }
    }

    pub fn disjuncts(&self) -> Vec<&LarsFormula> {
        match self {
            LarsFormula::Or(a, b) => {
                let mut out = a.disjuncts();
                out.extend(b.disjuncts());
                out
            }
            other => vec![other],
        }
    }

    /// Every atom in the formula, negated or not.
    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        self.walk(&mut |f| {
            if let LarsFormula::Atom(a) = f {
                out.push(a);
            }
        });
        out
    }

    pub fn walk<'a>(&'a self, visit: &mut dyn FnMut(&'a LarsFormula)) {
        visit(self);
        match self {
            LarsFormula::True | LarsFormula::Atom(_) | LarsFormula::Cmp(..) => {}
            LarsFormula::Not(f)
            | LarsFormula::Diamond(f)
            | LarsFormula::Box(f)
            | LarsFormula::At(_, f)
            | LarsFormula::Window(_, f)
            | LarsFormula::Reset(f)
            | LarsFormula::Exists(_, f) => f.walk(visit),
            LarsFormula::And(a, b) | LarsFormula::Or(a, b) | LarsFormula::Implies(a, b) => {
                a.walk(visit);
                b.walk(visit);
            }
        }
    }

    pub fn window_widths(&self, out: &mut BTreeSet<u64>) {
        self.walk(&mut |f| {
            if let LarsFormula::Window(w, _) = f {
                out.insert(*w);
            }
        });
    }

    pub fn apply(&self, subst: &BTreeMap<String, Const>) -> LarsFormula {
        let sub_expr = |e: &ArgExpr| -> ArgExpr {
            match &e.base {
                Term::Var(v) => match subst.get(v) {
                    Some(c) => ArgExpr { base: Term::Const(c.clone()), offset: e.offset },
                    None => e.clone(),
                },
                Term::Const(_) => e.clone(),
            }
        };
        match self {
            LarsFormula::True => LarsFormula::True,
            LarsFormula::Atom(a) => LarsFormula::Atom(a.apply(subst)),
            LarsFormula::Cmp(op, l, r) => LarsFormula::Cmp(*op, sub_expr(l), sub_expr(r)),
            LarsFormula::Not(f) => LarsFormula::not(f.apply(subst)),
            LarsFormula::And(a, b) => {
                LarsFormula::And(Box::new(a.apply(subst)), Box::new(b.apply(subst)))
            }
            LarsFormula::Or(a, b) => {
                LarsFormula::Or(Box::new(a.apply(subst)), Box::new(b.apply(subst)))
            }
            LarsFormula::Implies(a, b) => {
                LarsFormula::Implies(Box::new(a.apply(subst)), Box::new(b.apply(subst)))
            }
            LarsFormula::Diamond(f) => LarsFormula::diamond(f.apply(subst)),
            LarsFormula::Box(f) => LarsFormula::always(f.apply(subst)),
            LarsFormula::At(e, f) => LarsFormula::at(sub_expr(e), f.apply(subst)),
            LarsFormula::Window(w, f) => LarsFormula::window(*w, f.apply(subst)),
            LarsFormula::Reset(f) => LarsFormula::Reset(Box::new(f.apply(subst))),
            LarsFormula::Exists(vs, f) => {
                LarsFormula::Exists(vs.clone(), Box::new(f.apply(subst)))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LarsRule {
    pub head: LarsFormula,
    pub body: Vec<LarsFormula>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LarsProgram {
    pub rules: Vec<LarsRule>,
    pub sig: Signature,
    /// Window widths occurring anywhere in the program.
    pub windows: BTreeSet<u64>,
}

/// The predicate a rule derives.
pub fn head_pred(rule: &LarsRule) -> Option<&Atom> {
    match &rule.head {
        LarsFormula::Atom(a) => Some(a),
        LarsFormula::At(_, f) => match f.as_ref() {
            LarsFormula::Atom(a) => Some(a),
            _ => None,
        },
        LarsFormula::Box(f) => match f.as_ref() {
            LarsFormula::Implies(_, c) => match c.as_ref() {
                LarsFormula::Atom(a) => Some(a),
                _ => None,
            },
            _ => None,
        },
        _ => None,
    }
}

impl LarsProgram {
    /// Validates head shapes (an atom, `at[..]` over an atom, or a `box`
    /// implication concluding an atom), classifies every variable as a time
    /// point or data, and builds the signature with the usual defaulting.
    pub fn new(rules: Vec<LarsRule>, declared: Vec<(String, usize, PredKind)>) -> Result<LarsProgram> {
        let mut sig = Signature::new();
        for (name, arity, kind) in &declared {
            sig.declare(name, *arity, *kind).map_err(Error::Validation)?;
        }
        for (idx, r) in rules.iter().enumerate() {
            let head = head_pred(r).ok_or_else(|| {
                Error::Validation(format!(
                    "rule {}: head must be an atom, `at[..]` atom, or box implication onto an atom",
                    idx + 1
                ))
            })?;
            sig.observe(&head.pred, head.args.len(), PredKind::Intensional)
                .map_err(Error::Validation)?;
        }
        for r in &rules {
            for f in r.body.iter().chain(std::iter::once(&r.head)) {
                for a in f.atoms() {
                    sig.observe(&a.pred, a.args.len(), PredKind::Stream)
                        .map_err(Error::Validation)?;
                }
            }
        }
        for (idx, r) in rules.iter().enumerate() {
            classify_rule_vars(r).map_err(|msg| {
                Error::Validation(format!("rule {}: {msg}", idx + 1))
            })?;
        }
        let mut windows = BTreeSet::new();
        for r in &rules {
            r.head.window_widths(&mut windows);
            for f in &r.body {
                f.window_widths(&mut windows);
            }
        }
        Ok(LarsProgram { rules, sig, windows })
    }

    pub fn constants(&self) -> BTreeSet<Const> {
        let mut out = BTreeSet::new();
        let mut visit = |f: &LarsFormula| {
            f.walk(&mut |g| match g {
                LarsFormula::Atom(a) => {
                    for t in &a.args {
                        if let Term::Const(c) = t {
                            out.insert(c.clone());
                        }
                    }
                }
                LarsFormula::Cmp(_, l, r) => {
                    for e in [l, r] {
                        if let Term::Const(c) = &e.base {
                            out.insert(c.clone());
                        }
                    }
                }
                LarsFormula::At(e, _) => {
                    if let Term::Const(c) = &e.base {
                        out.insert(c.clone());
                    }
                }
                _ => {}
            });
        };
        for r in &self.rules {
            visit(&r.head);
            for f in &r.body {
                visit(f);
            }
        }
        out
    }
}

impl fmt::Display for LarsProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in self.sig.decls() {
            match d.kind {
                PredKind::Stream => writeln!(f, "#stream {}/{}.", d.name, d.arity)?,
                PredKind::Background => writeln!(f, "#background {}/{}.", d.name, d.arity)?,
                PredKind::Intensional => {}
            }
        }
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

impl fmt::Display for LarsRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if !self.body.is_empty() {
            write!(f, " <- ")?;
            for (i, b) in self.body.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{b}")?;
            }
        }
        write!(f, ".")
    }
}

// Precedence for printing: or < and < prefix operators < primaries.
fn fmt_prec(f: &LarsFormula, level: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    let mine = match f {
        LarsFormula::Or(..) => 0,
        LarsFormula::And(..) => 1,
        LarsFormula::Not(_)
        | LarsFormula::Diamond(_)
        | LarsFormula::At(..)
        | LarsFormula::Window(..)
        | LarsFormula::Reset(_) => 2,
        _ => 3,
    };
    if mine < level {
        write!(out, "(")?;
        fmt_prec(f, 0, out)?;
        return write!(out, ")");
    }
    match f {
        LarsFormula::True => write!(out, "true"),
        LarsFormula::Atom(a) => write!(out, "{a}"),
        LarsFormula::Cmp(op, l, r) => {
            let op = match op {
                CmpOp::Eq => "=",
                CmpOp::Neq => "!=",
            };
            write!(out, "{l} {op} {r}")
        }
        LarsFormula::Not(g) => {
            write!(out, "not ")?;
            fmt_prec(g, 2, out)
        }
        LarsFormula::And(a, b) => {
            fmt_prec(a, 1, out)?;
            write!(out, " and ")?;
            fmt_prec(b, 2, out)
        }
        LarsFormula::Or(a, b) => {
            fmt_prec(a, 0, out)?;
            write!(out, " or ")?;
            fmt_prec(b, 1, out)
        }
        LarsFormula::Implies(a, b) => {
            // Only printed inside box(..) heads; elsewhere parenthesize.
            write!(out, "(")?;
            fmt_prec(b, 0, out)?;
            write!(out, " <- ")?;
            fmt_prec(a, 0, out)?;
            write!(out, ")")
        }
        LarsFormula::Diamond(g) => {
            write!(out, "diamond ")?;
            fmt_prec(g, 2, out)
        }
        LarsFormula::Box(g) => match g.as_ref() {
            LarsFormula::Implies(prem, cons) => {
                write!(out, "box(")?;
                fmt_prec(cons, 0, out)?;
                write!(out, " <- ")?;
                let parts = prem.conjuncts();
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(out, ", ")?;
                    }
                    fmt_prec(p, 2, out)?;
                }
                write!(out, ")")
            }
            other => {
                write!(out, "box(")?;
                fmt_prec(other, 0, out)?;
                write!(out, ")")
            }
        },
        LarsFormula::At(e, g) => {
            write!(out, "at[{e}] ")?;
            fmt_prec(g, 2, out)
        }
        LarsFormula::Window(w, g) => {
            write!(out, "wplus[{w}] ")?;
            fmt_prec(g, 2, out)
        }
        LarsFormula::Reset(g) => {
            write!(out, "reset ")?;
            fmt_prec(g, 2, out)
        }
        LarsFormula::Exists(vs, g) => {
            write!(out, "exists[")?;
            for (i, (v, k)) in vs.iter().enumerate() {
                if i > 0 {
                    write!(out, ",")?;
                }
                let k = match k {
                    VarKind::Time => "time",
                    VarKind::Data => "data",
                };
                write!(out, "{v}:{k}")?;
            }
            write!(out, "](")?;
            fmt_prec(g, 0, out)?;
            write!(out, ")")
        }
    }
}

impl fmt::Display for LarsFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_prec(self, 0, f)
    }
}

/// Classifies each rule variable as a time point (it appears in an `at[..]`
/// position, or is linked by comparison to one) or data. A variable used both
/// ways is an error.
pub fn classify_rule_vars(rule: &LarsRule) -> std::result::Result<BTreeMap<String, VarKind>, String> {
    let mut kinds: BTreeMap<String, VarKind> = BTreeMap::new();
    let mut links: Vec<(String, String)> = Vec::new();
    let seed = |v: &str, k: VarKind, kinds: &mut BTreeMap<String, VarKind>| {
        match kinds.get(v) {
            Some(prev) if *prev != k => Err(format!(
                "variable {v} is used both as a time point and as data"
            )),
            _ => {
                kinds.insert(v.to_string(), k);
                Ok(())
            }
        }
    };
    let mut err: Option<String> = None;
    let mut visit = |f: &LarsFormula, kinds: &mut BTreeMap<String, VarKind>, links: &mut Vec<(String, String)>| {
        f.walk(&mut |g| {
            if err.is_some() {
                return;
            }
            match g {
                LarsFormula::Atom(a) => {
                    for v in a.vars() {
                        if let Err(e) = seed(v, VarKind::Data, kinds) {
                            err = Some(e);
                        }
                    }
                }
                LarsFormula::At(e, _) => {
                    if let Term::Var(v) = &e.base {
                        if let Err(e) = seed(v, VarKind::Time, kinds) {
                            err = Some(e);
                        }
                    }
                }
                LarsFormula::Cmp(_, l, r) => {
                    if let (Term::Var(a), Term::Var(b)) = (&l.base, &r.base) {
                        links.push((a.clone(), b.clone()));
                    }
                }
                _ => {}
            }
        });
    };
    visit(&rule.head, &mut kinds, &mut links);
    for f in &rule.body {
        visit(f, &mut kinds, &mut links);
    }
    if let Some(e) = err {
        return Err(e);
    }

    // Propagate kinds along comparison links until stable.
    loop {
        let mut changed = false;
        for (a, b) in &links {
            match (kinds.get(a).copied(), kinds.get(b).copied()) {
                (Some(ka), Some(kb)) if ka != kb => {
                    return Err(format!(
                        "variables {a} and {b} are compared but one is a time point and one is data"
                    ));
                }
                (Some(k), None) => {
                    kinds.insert(b.clone(), k);
                    changed = true;
                }
                (None, Some(k)) => {
                    kinds.insert(a.clone(), k);
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            break;
        }
    }

    // Variables only ever compared with constants default to data.
    let mut all_vars: BTreeSet<String> = BTreeSet::new();
    let mut collect = |f: &LarsFormula| {
        f.walk(&mut |g| match g {
            LarsFormula::Atom(a) => {
                all_vars.extend(a.vars().into_iter().map(|s| s.to_string()));
            }
            LarsFormula::Cmp(_, l, r) => {
                for e in [l, r] {
                    if let Term::Var(v) = &e.base {
                        all_vars.insert(v.clone());
                    }
                }
            }
            LarsFormula::At(e, _) => {
                if let Term::Var(v) = &e.base {
                    all_vars.insert(v.clone());
                }
            }
            _ => {}
        });
    };
    collect(&rule.head);
    for f in &rule.body {
        collect(f);
    }
    for v in all_vars {
        kinds.entry(v).or_insert(VarKind::Data);
    }
    Ok(kinds)
}

/// Negation-stratification: a cycle through an odd-negation dependency is
/// rejected. The premise of a box-implication head counts as body.
pub fn check_lars_stratified(program: &LarsProgram) -> Result<StratTable> {
    let nodes: BTreeSet<String> = program.sig.preds().iter().map(|s| s.to_string()).collect();
    let mut edges = Vec::new();
    for r in &program.rules {
        let head = head_pred(r).expect("validated head shape");
        let mut deps: Vec<(String, bool)> = Vec::new();
        for b in &r.body {
            collect_polarity(b, false, &mut deps);
        }
        if let LarsFormula::Box(g) = &r.head {
            if let LarsFormula::Implies(prem, _) = g.as_ref() {
                collect_polarity(prem, false, &mut deps);
            }
        }
        for (pred, negated) in deps {
            edges.push(DepEdge { from: pred, to: head.pred.clone(), strict: negated });
        }
    }
    stratify(&nodes, &edges).map_err(|witness| Error::Stratification(StratificationError { witness }))
}

fn collect_polarity(f: &LarsFormula, neg: bool, out: &mut Vec<(String, bool)>) {
    match f {
        LarsFormula::True | LarsFormula::Cmp(..) => {}
        LarsFormula::Atom(a) => out.push((a.pred.clone(), neg)),
        LarsFormula::Not(g) => collect_polarity(g, !neg, out),
        LarsFormula::Implies(a, b) => {
            collect_polarity(a, !neg, out);
            collect_polarity(b, neg, out);
        }
        LarsFormula::And(a, b) | LarsFormula::Or(a, b) => {
            collect_polarity(a, neg, out);
            collect_polarity(b, neg, out);
        }
        LarsFormula::Diamond(g)
        | LarsFormula::Box(g)
        | LarsFormula::At(_, g)
        | LarsFormula::Window(_, g)
        | LarsFormula::Reset(g)
        | LarsFormula::Exists(_, g) => collect_polarity(g, neg, out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printing_uses_minimal_parentheses() {
        let f = LarsFormula::and_of(vec![
            LarsFormula::window(0, LarsFormula::at(ArgExpr::var("T"), LarsFormula::True)),
            LarsFormula::or_of(vec![
                LarsFormula::eq(ArgExpr::var("T2"), ArgExpr::var_minus("T", 1)),
                LarsFormula::eq(ArgExpr::var("T2"), ArgExpr::var_minus("T", 2)),
            ]),
        ]);
        assert_eq!(f.to_string(), "wplus[0] at[T] true and (T2 = T-1 or T2 = T-2)");
    }

    #[test]
    fn box_implications_print_rule_style() {
        let r = parse_lars("box( inNetwork(V) <- onLane(V,X,Y) ).").unwrap();
        assert_eq!(r.rules[0].to_string(), "box(inNetwork(V) <- onLane(V,X,Y)).");
    }

    #[test]
    fn head_shapes_are_validated() {
        assert!(parse_lars("diamond p <- q.").is_err());
        assert!(parse_lars("not p <- q.").is_err());
        assert!(parse_lars("at[T] p <- at[T] q.").is_ok());
        assert!(parse_lars("box(p <- q).").is_ok());
        assert!(parse_lars("box(diamond p <- q).").is_err());
    }

    #[test]
    fn variable_kind_conflicts_are_rejected() {
        assert!(parse_lars("p <- at[X] q(X).").is_err());
        assert!(parse_lars("p(Y) <- at[T] q(Y), T = Y.").is_err());
        assert!(parse_lars("p(Y) <- q(Y), at[T] r, T1 = T - 1, at[T1] s.").is_ok());
    }

    #[test]
    fn stratification_flags_negative_cycles() {
        let p = parse_lars("p <- not q. q <- diamond p.").unwrap();
        assert!(check_lars_stratified(&p).is_err());
        let p2 = parse_lars("p <- not q. q <- diamond r.").unwrap();
        assert!(check_lars_stratified(&p2).is_ok());
    }

    #[test]
    fn box_premises_count_as_body_dependencies() {
        let p = parse_lars("box(p <- not q). q <- p.").unwrap();
        assert!(check_lars_stratified(&p).is_err());
    }

    #[test]
    fn intensional_defaulting_matches_head_use() {
        let p = parse_lars("a <- b, not c.").unwrap();
        assert!(p.sig.is_intensional("a"));
        assert_eq!(p.sig.kind_of("b"), Some(PredKind::Stream));
        assert_eq!(p.sig.kind_of("c"), Some(PredKind::Stream));
    }
}
