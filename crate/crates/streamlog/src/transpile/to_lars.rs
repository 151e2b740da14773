//! ρ4–ρ7: offset literals become witness formulas against a reference time
//! point, `#temp` conclusions get companion predicates or inline expansion,
//! and counting variables get auxiliary presence/count rules.

use super::to_ldsr::refuse_outside;
use super::{AuxKey, FreshVars, Provenance, Translation, AUX_PREFIX, TEMP_SUFFIX};
use crate::atoms::{Atom, PredKind, Term};
use crate::error::{Error, Result};
use crate::fragments::{classify_ldsr_fragments, Fragment};
use crate::lars::{ArgExpr, LarsFormula, LarsProgram, LarsRule};
use crate::ldsr::{CountTerm, LdsrProgram, LdsrRule, Literal, Offsets, StreamingAtom, StreamingKind};
use std::collections::{BTreeMap, BTreeSet};

fn binder(t: &str) -> LarsFormula {
    LarsFormula::window(0, LarsFormula::at(ArgExpr::var(t), LarsFormula::True))
}

fn member(v: &str, t_ref: &str, ds: &BTreeSet<u64>) -> LarsFormula {
    LarsFormula::or_of(
        ds.iter().map(|d| LarsFormula::eq(ArgExpr::var(v), ArgExpr::var_minus(t_ref, *d as i64))).collect(),
    )
}

fn aux_present_name(arity: usize, m: usize) -> String {
    format!("{AUX_PREFIX}present_{arity}_{m}")
}

fn aux_count_name(arity: usize, m: usize) -> String {
    format!("{AUX_PREFIX}count_{arity}_{m}")
}

fn aux_atom(name: String, base_pred: &str, args: &[Term], ds: &BTreeSet<u64>, count: Term) -> Atom {
    let mut all = vec![Term::sym(base_pred)];
    all.extend(args.iter().cloned());
    all.extend(ds.iter().map(|d| Term::nat(*d)));
    all.push(count);
    Atom { pred: name, args: all }
}

fn with_kind(atom: &Atom, kind: StreamingKind, ds: &BTreeSet<u64>) -> StreamingAtom {
    StreamingAtom { atom: atom.clone(), kind, offsets: Offsets(ds.clone()) }
}

/// One offset literal as a formula about the reference point `t_ref`: a
/// distinct witness point per required occurrence, a per-offset guard for
/// `always`, and for an exact count additionally no further witness.
pub fn sigma(satom: &StreamingAtom, t_ref: &str, fresh: &mut FreshVars) -> LarsFormula {
    let ds = &satom.offsets.0;
    if ds.is_empty() {
        return match &satom.kind {
            StreamingKind::Always | StreamingKind::Count(CountTerm::Value(0)) => LarsFormula::True,
            _ => LarsFormula::falsum(),
        };
    }
    match &satom.kind {
        StreamingKind::AtLeast(c) => {
            let (_, parts) = witness_parts(&satom.atom, *c, ds, t_ref, fresh);
            LarsFormula::and_of(parts)
        }
        StreamingKind::Always => {
            let guards = ds
                .iter()
                .map(|d| {
                    let v = fresh.time();
                    LarsFormula::not(LarsFormula::and_of(vec![
                        LarsFormula::eq(ArgExpr::var(&v), ArgExpr::var_minus(t_ref, *d as i64)),
                        LarsFormula::not(LarsFormula::at(ArgExpr::var(&v), LarsFormula::atom(satom.atom.clone()))),
                    ]))
                })
                .collect();
            LarsFormula::and_of(guards)
        }
        StreamingKind::Count(CountTerm::Value(c)) => {
            let (witnesses, mut parts) = witness_parts(&satom.atom, *c, ds, t_ref, fresh);
            let w = fresh.time();
            let mut inner = vec![LarsFormula::at(ArgExpr::var(&w), LarsFormula::atom(satom.atom.clone()))];
            inner.extend(witnesses.iter().map(|v| LarsFormula::neq(ArgExpr::var(&w), ArgExpr::var(v))));
            inner.push(member(&w, t_ref, ds));
            parts.push(LarsFormula::not(LarsFormula::and_of(inner)));
            LarsFormula::and_of(parts)
        }
        StreamingKind::Count(CountTerm::Var(v)) => {
            let name = aux_count_name(satom.atom.args.len(), ds.len());
            LarsFormula::atom(aux_atom(name, &satom.atom.pred, &satom.atom.args, ds, Term::var(v)))
        }
    }
}

fn witness_parts(
    atom: &Atom,
    c: u64,
    ds: &BTreeSet<u64>,
    t_ref: &str,
    fresh: &mut FreshVars,
) -> (Vec<String>, Vec<LarsFormula>) {
    let witnesses: Vec<String> = (0..c).map(|_| fresh.time()).collect();
    let mut parts: Vec<LarsFormula> = witnesses
        .iter()
        .map(|v| {
            LarsFormula::and_of(vec![
                LarsFormula::at(ArgExpr::var(v), LarsFormula::atom(atom.clone())),
                member(v, t_ref, ds),
            ])
        })
        .collect();
    for j in 1..witnesses.len() {
        for i in 0..j {
            parts.push(LarsFormula::neq(ArgExpr::var(&witnesses[j]), ArgExpr::var(&witnesses[i])));
        }
    }
    (witnesses, parts)
}

/// The zero-offset case split shared by `g` and `g''`: `z_at` renders "the
/// atom holds at the reference point itself", everything else defers to the
/// stripped-slot witness formulas over the offsets without zero.
fn g_core(
    satom: &StreamingAtom,
    t_ref: &str,
    fresh: &mut FreshVars,
    aux: &mut BTreeSet<AuxKey>,
    z_at: &mut dyn FnMut(&Atom, &mut FreshVars) -> LarsFormula,
) -> LarsFormula {
    if satom.is_bare() {
        return z_at(&satom.atom, fresh);
    }
    let a = &satom.atom;
    if !satom.offsets.contains_zero() {
        if matches!(&satom.kind, StreamingKind::Count(CountTerm::Var(_))) {
            aux.insert((a.pred.clone(), a.args.len(), satom.offsets.0.clone()));
        }
        return sigma(satom, t_ref, fresh);
    }
    let rest = satom.offsets.without_zero();
    match &satom.kind {
        StreamingKind::AtLeast(1) => LarsFormula::or_of(vec![
            z_at(a, fresh),
            sigma(&with_kind(a, StreamingKind::AtLeast(1), &rest), t_ref, fresh),
        ]),
        StreamingKind::AtLeast(c) => {
            let near = sigma(&with_kind(a, StreamingKind::AtLeast(c - 1), &rest), t_ref, fresh);
            let with_z = if near.is_falsum() {
                LarsFormula::falsum()
            } else {
                LarsFormula::and_of(vec![z_at(a, fresh), near])
            };
            let without_z = sigma(&with_kind(a, StreamingKind::AtLeast(*c), &rest), t_ref, fresh);
            LarsFormula::or_of(vec![with_z, without_z])
        }
        StreamingKind::Always => LarsFormula::and_of(vec![
            z_at(a, fresh),
            sigma(&with_kind(a, StreamingKind::Always, &rest), t_ref, fresh),
        ]),
        StreamingKind::Count(CountTerm::Value(c)) => {
            let near = sigma(&with_kind(a, StreamingKind::Count(CountTerm::Value(c - 1)), &rest), t_ref, fresh);
            let with_z = if near.is_falsum() {
                LarsFormula::falsum()
            } else {
                LarsFormula::and_of(vec![z_at(a, fresh), near])
            };
            let exact = sigma(&with_kind(a, StreamingKind::Count(CountTerm::Value(*c)), &rest), t_ref, fresh);
            let without_z = if exact.is_falsum() {
                LarsFormula::falsum()
            } else {
                LarsFormula::and_of(vec![LarsFormula::not(z_at(a, fresh)), exact])
            };
            LarsFormula::or_of(vec![with_z, without_z])
        }
        StreamingKind::Count(CountTerm::Var(v)) => {
            if rest.is_empty() {
                return LarsFormula::and_of(vec![
                    z_at(a, fresh),
                    LarsFormula::eq(ArgExpr::var(v), ArgExpr::point(1)),
                ]);
            }
            aux.insert((a.pred.clone(), a.args.len(), rest.clone()));
            let m = rest.len();
            let present_one =
                aux_atom(aux_present_name(a.args.len(), m), &a.pred, &a.args, &rest, Term::nat(1));
            let mut branches = vec![LarsFormula::and_of(vec![
                z_at(a, fresh),
                LarsFormula::not(LarsFormula::atom(present_one)),
                LarsFormula::eq(ArgExpr::var(v), ArgExpr::point(1)),
            ])];
            for k in 1..=m as u64 {
                let count_k =
                    aux_atom(aux_count_name(a.args.len(), m), &a.pred, &a.args, &rest, Term::nat(k));
                branches.push(LarsFormula::and_of(vec![
                    z_at(a, fresh),
                    LarsFormula::atom(count_k),
                    LarsFormula::eq(ArgExpr::var(v), ArgExpr::point(k + 1)),
                ]));
            }
            let count_v =
                aux_atom(aux_count_name(a.args.len(), m), &a.pred, &a.args, &rest, Term::var(v));
            branches.push(LarsFormula::and_of(vec![
                LarsFormula::not(z_at(a, fresh)),
                LarsFormula::atom(count_v),
            ]));
            LarsFormula::or_of(branches)
        }
    }
}

fn z_disjunct(a: &Atom, form2_heads: &BTreeSet<String>) -> LarsFormula {
    if form2_heads.contains(&a.pred) {
        LarsFormula::or_of(vec![
            LarsFormula::atom(a.clone()),
            LarsFormula::atom(Atom { pred: format!("{}{TEMP_SUFFIX}", a.pred), args: a.args.clone() }),
        ])
    } else {
        LarsFormula::atom(a.clone())
    }
}

/// Body literal translation where a temporary conclusion at the reference
/// point is visible through its companion predicate.
pub fn g_translate(
    lit: &Literal,
    t_ref: &str,
    form2_heads: &BTreeSet<String>,
    fresh: &mut FreshVars,
    aux: &mut BTreeSet<AuxKey>,
) -> LarsFormula {
    let mut z = |a: &Atom, _: &mut FreshVars| z_disjunct(a, form2_heads);
    let f = g_core(&lit.satom, t_ref, fresh, aux, &mut z);
    if lit.positive {
        f
    } else {
        LarsFormula::not(f)
    }
}

/// Body literal translation for programs whose conclusions are all visible at
/// the evaluation point itself: plain witness formulas, no case split.
pub fn gprime_translate(
    lit: &Literal,
    t_ref: &str,
    fresh: &mut FreshVars,
    aux: &mut BTreeSet<AuxKey>,
) -> LarsFormula {
    let satom = &lit.satom;
    let f = if satom.is_bare() {
        LarsFormula::atom(satom.atom.clone())
    } else {
        if matches!(&satom.kind, StreamingKind::Count(CountTerm::Var(_))) {
            aux.insert((satom.atom.pred.clone(), satom.atom.args.len(), satom.offsets.0.clone()));
        }
        sigma(satom, t_ref, fresh)
    };
    if lit.positive {
        f
    } else {
        LarsFormula::not(f)
    }
}

/// Derivability of one atom occurrence at the reference point: the atom holds
/// there, or the body of some `#temp` rule for its predicate holds there with
/// the head arguments matching. Rule variables are renamed apart on every use.
pub fn d_p(occurrence: &Atom, program: &LdsrProgram, t_ref: &str, fresh: &mut FreshVars) -> LarsFormula {
    let mut parts = vec![sigma(&StreamingAtom::bare(occurrence.clone()), t_ref, fresh)];
    for r in program.rules.iter().filter(|r| r.temp && r.head.pred == occurrence.pred) {
        let mut names: BTreeSet<String> = r.head.vars().iter().map(|v| v.to_string()).collect();
        for l in &r.body {
            names.extend(l.satom.vars().iter().map(|v| v.to_string()));
        }
        let renames: BTreeMap<String, String> = names.into_iter().map(|v| (v, fresh.data())).collect();
        let mut conj: Vec<LarsFormula> = Vec::new();
        for l in &r.body {
            let inner = sigma(&rename_satom(&l.satom, &renames), t_ref, fresh);
            conj.push(if l.positive { inner } else { LarsFormula::not(inner) });
        }
        for (given, pattern) in occurrence.args.iter().zip(&r.head.args) {
            conj.push(LarsFormula::eq(as_arg_expr(given), as_arg_expr(&rename_term(pattern, &renames))));
        }
        parts.push(LarsFormula::and_of(conj));
    }
    LarsFormula::or_of(parts)
}

fn rename_term(t: &Term, renames: &BTreeMap<String, String>) -> Term {
    match t {
        Term::Var(v) => Term::var(renames.get(v).map(|s| s.as_str()).unwrap_or(v)),
        other => other.clone(),
    }
}

fn rename_satom(s: &StreamingAtom, renames: &BTreeMap<String, String>) -> StreamingAtom {
    let atom = Atom {
        pred: s.atom.pred.clone(),
        args: s.atom.args.iter().map(|t| rename_term(t, renames)).collect(),
    };
    let kind = match &s.kind {
        StreamingKind::Count(CountTerm::Var(v)) => StreamingKind::Count(CountTerm::Var(
            renames.get(v).cloned().unwrap_or_else(|| v.clone()),
        )),
        other => other.clone(),
    };
    StreamingAtom { atom, kind, offsets: s.offsets.clone() }
}

fn as_arg_expr(t: &Term) -> ArgExpr {
    ArgExpr { base: t.clone(), offset: 0 }
}

/// Like `g_translate`, but a temporary conclusion at the reference point is
/// expanded inline into the bodies that could derive it.
pub fn gdoubleprime_translate(
    lit: &Literal,
    program: &LdsrProgram,
    t_ref: &str,
    fresh: &mut FreshVars,
    aux: &mut BTreeSet<AuxKey>,
) -> LarsFormula {
    let mut z = |a: &Atom, fr: &mut FreshVars| d_p(a, program, t_ref, fr);
    let f = g_core(&lit.satom, t_ref, fresh, aux, &mut z);
    if lit.positive {
        f
    } else {
        LarsFormula::not(f)
    }
}

/// The auxiliary rules for counting a predicate over an offset set: one
/// presence rule per possible tally and one rule closing the tally off from
/// above. The first argument names the counted predicate, then its arguments,
/// the offsets, and the tally.
pub fn c_alpha_rules(pred: &str, arity: usize, ds: &BTreeSet<u64>) -> Vec<LarsRule> {
    let m = ds.len();
    let args: Vec<Term> = (1..=arity).map(|i| Term::var(&format!("X{i}"))).collect();
    let base = Atom { pred: pred.to_string(), args: args.clone() };
    let mut rules = Vec::new();
    for c in 1..=m as u64 {
        let mut fresh = FreshVars::avoiding(base.vars().iter().map(|v| v.to_string()));
        let t = fresh.time();
        let satom = with_kind(&base, StreamingKind::AtLeast(c), ds);
        let part = sigma(&satom, &t, &mut fresh);
        let head = aux_atom(aux_present_name(arity, m), pred, &args, ds, Term::nat(c));
        rules.push(box_rule(head, &t, vec![part]));
    }
    let present_c = aux_atom(aux_present_name(arity, m), pred, &args, ds, Term::var("C"));
    let present_next = aux_atom(aux_present_name(arity, m), pred, &args, ds, Term::var("C1"));
    let prem = LarsFormula::and_of(vec![
        LarsFormula::atom(present_c),
        LarsFormula::not(LarsFormula::and_of(vec![
            LarsFormula::atom(present_next),
            LarsFormula::eq(ArgExpr::var("C1"), ArgExpr::var_minus("C", -1)),
        ])),
    ]);
    let head = aux_atom(aux_count_name(arity, m), pred, &args, ds, Term::var("C"));
    rules.push(LarsRule {
        head: LarsFormula::always(LarsFormula::implies(prem, LarsFormula::atom(head))),
        body: Vec::new(),
    });
    rules
}

fn rule_fresh(r: &LdsrRule) -> FreshVars {
    let mut used: BTreeSet<String> = r.head.vars().iter().map(|v| v.to_string()).collect();
    for l in &r.body {
        used.extend(l.satom.vars().iter().map(|v| v.to_string()));
    }
    FreshVars::avoiding(used)
}

fn type2_rule(head: Atom, t: &str, parts: Vec<LarsFormula>) -> LarsRule {
    let mut body = vec![binder(t)];
    body.extend(parts);
    LarsRule { head: LarsFormula::atom(head), body }
}

fn box_rule(head: Atom, t: &str, parts: Vec<LarsFormula>) -> LarsRule {
    let mut all = vec![binder(t)];
    all.extend(parts);
    let folded = LarsFormula::and_of(all);
    let prem = LarsFormula::and_of(folded.conjuncts().into_iter().cloned().collect());
    LarsRule {
        head: LarsFormula::always(LarsFormula::implies(prem, LarsFormula::atom(head))),
        body: Vec::new(),
    }
}

fn source_decls(program: &LdsrProgram) -> Vec<(String, usize, PredKind)> {
    program.sig.decls().map(|d| (d.name.clone(), d.arity, d.kind)).collect()
}

fn check_aux_collisions(program: &LdsrProgram, aux: &BTreeSet<AuxKey>) -> Result<BTreeSet<String>> {
    let mut names = BTreeSet::new();
    for (_, arity, ds) in aux {
        names.insert(aux_present_name(*arity, ds.len()));
        names.insert(aux_count_name(*arity, ds.len()));
    }
    for name in &names {
        if program.sig.contains(name) {
            return Err(Error::Translate(format!(
                "generated predicate {name} collides with a predicate of the source program"
            )));
        }
    }
    Ok(names)
}

fn append_c_alpha(
    rules: &mut Vec<LarsRule>,
    provenance: &mut Vec<Provenance>,
    aux: &BTreeSet<AuxKey>,
) {
    for (pred, arity, ds) in aux {
        for rule in c_alpha_rules(pred, *arity, ds) {
            provenance.push(Provenance {
                output_rule: rules.len(),
                source_rule: None,
                helper: "c_alpha".to_string(),
            });
            rules.push(rule);
        }
    }
}

/// Permanent rules become box implications, temporary rules become plain
/// rules plus a box companion deriving the `__temp` twin at every point.
pub fn rho4(program: &LdsrProgram) -> Result<Translation<LarsProgram>> {
    let verdict = classify_ldsr_fragments(program);
    if !verdict.is_member(Fragment::F4) {
        return Err(refuse_outside(&verdict, Fragment::F4, &[Fragment::F4]));
    }
    let form2_heads = program.form2_head_preds();
    for p in &form2_heads {
        let twin = format!("{p}{TEMP_SUFFIX}");
        if program.sig.contains(&twin) {
            return Err(Error::Translate(format!(
                "generated predicate {twin} collides with a predicate of the source program"
            )));
        }
    }

    let mut rules = Vec::new();
    let mut provenance = Vec::new();
    let mut aux: BTreeSet<AuxKey> = BTreeSet::new();
    for (idx, r) in program.rules.iter().enumerate() {
        let mut fresh = rule_fresh(r);
        let t = fresh.time();
        let parts: Vec<LarsFormula> =
            r.body.iter().map(|l| g_translate(l, &t, &form2_heads, &mut fresh, &mut aux)).collect();
        if r.temp {
            provenance.push(Provenance { output_rule: rules.len(), source_rule: Some(idx), helper: "g".to_string() });
            rules.push(type2_rule(r.head.clone(), &t, parts));

            let mut fresh = rule_fresh(r);
            let t = fresh.time();
            let parts: Vec<LarsFormula> =
                r.body.iter().map(|l| g_translate(l, &t, &form2_heads, &mut fresh, &mut aux)).collect();
            let twin = Atom { pred: format!("{}{TEMP_SUFFIX}", r.head.pred), args: r.head.args.clone() };
            provenance.push(Provenance {
                output_rule: rules.len(),
                source_rule: Some(idx),
                helper: "g companion".to_string(),
            });
            rules.push(box_rule(twin, &t, parts));
        } else {
            provenance.push(Provenance { output_rule: rules.len(), source_rule: Some(idx), helper: "g".to_string() });
            rules.push(box_rule(r.head.clone(), &t, parts));
        }
    }

    let mut aux_predicates = check_aux_collisions(program, &aux)?;
    aux_predicates.extend(form2_heads.iter().map(|p| format!("{p}{TEMP_SUFFIX}")));
    append_c_alpha(&mut rules, &mut provenance, &aux);
    let program = LarsProgram::new(rules, source_decls(program))?;
    Ok(Translation { program, aux_predicates, provenance })
}

fn rho_plain(program: &LdsrProgram, target: Fragment, chain: &[Fragment]) -> Result<Translation<LarsProgram>> {
    let verdict = classify_ldsr_fragments(program);
    if !verdict.is_member(target) {
        return Err(refuse_outside(&verdict, target, chain));
    }
    let mut rules = Vec::new();
    let mut provenance = Vec::new();
    let mut aux: BTreeSet<AuxKey> = BTreeSet::new();
    for (idx, r) in program.rules.iter().enumerate() {
        let mut fresh = rule_fresh(r);
        let t = fresh.time();
        let parts: Vec<LarsFormula> =
            r.body.iter().map(|l| gprime_translate(l, &t, &mut fresh, &mut aux)).collect();
        provenance.push(Provenance { output_rule: rules.len(), source_rule: Some(idx), helper: "g'".to_string() });
        rules.push(type2_rule(r.head.clone(), &t, parts));
    }
    let aux_predicates = check_aux_collisions(program, &aux)?;
    append_c_alpha(&mut rules, &mut provenance, &aux);
    let program = LarsProgram::new(rules, source_decls(program))?;
    Ok(Translation { program, aux_predicates, provenance })
}

/// Temporary rules only; every conclusion is visible at the evaluation point,
/// so the case split of ρ4 is unnecessary.
pub fn rho5(program: &LdsrProgram) -> Result<Translation<LarsProgram>> {
    rho_plain(program, Fragment::F5, &[Fragment::F4, Fragment::F5])
}

/// ρ5 restricted to programs without counting variables: no auxiliary
/// predicates appear, the image speaks the source vocabulary only.
pub fn rho6(program: &LdsrProgram) -> Result<Translation<LarsProgram>> {
    rho_plain(program, Fragment::F6, &[Fragment::F4, Fragment::F5, Fragment::F6])
}

/// Temporary-rule bodies never mention temporary conclusions, so permanent
/// rules can expand them inline and no companion predicates are needed.
pub fn rho7(program: &LdsrProgram) -> Result<Translation<LarsProgram>> {
    let verdict = classify_ldsr_fragments(program);
    if !verdict.is_member(Fragment::F7) {
        return Err(refuse_outside(&verdict, Fragment::F7, &[Fragment::F4, Fragment::F7]));
    }
    let mut rules = Vec::new();
    let mut provenance = Vec::new();
    let mut aux: BTreeSet<AuxKey> = BTreeSet::new();
    for (idx, r) in program.rules.iter().enumerate() {
        let mut fresh = rule_fresh(r);
        let t = fresh.time();
        if r.temp {
            let parts: Vec<LarsFormula> =
                r.body.iter().map(|l| gprime_translate(l, &t, &mut fresh, &mut aux)).collect();
            provenance.push(Provenance { output_rule: rules.len(), source_rule: Some(idx), helper: "g'".to_string() });
            rules.push(type2_rule(r.head.clone(), &t, parts));
        } else {
            let parts: Vec<LarsFormula> = r
                .body
                .iter()
                .map(|l| gdoubleprime_translate(l, program, &t, &mut fresh, &mut aux))
                .collect();
            provenance.push(Provenance { output_rule: rules.len(), source_rule: Some(idx), helper: "g''".to_string() });
            rules.push(box_rule(r.head.clone(), &t, parts));
        }
    }
    debug_assert!(aux.is_empty(), "counting variables cannot occur inside F7");
    let program = LarsProgram::new(rules, source_decls(program))?;
    Ok(Translation { program, aux_predicates: BTreeSet::new(), provenance })
}
