//! Syntactic fragment classifiers for both languages: rule-shape templates,
//! marked predicates, the signed dependency graph, and the F1..F7 verdicts.

use crate::atoms::Atom;
use crate::depgraph::{stratify, CycleWitness, DepEdge};
use crate::lars::{LarsFormula, LarsProgram, LarsRule};
use crate::ldsr::LdsrProgram;
use std::collections::BTreeSet;
use std::fmt;

/// One template body element: a windowed diamond or box, a plain atom, or a
/// past reference `wplus[0] at[T] true and at[T-K] p`, possibly negated.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct BetaAtom {
    pub negated: bool,
    pub form: BetaForm,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum BetaForm {
    Diamond { window: u64, atom: Atom },
    Always { window: u64, atom: Atom },
    Plain { atom: Atom },
    AtPast { k: u64, atom: Atom },
}

impl BetaForm {
    pub fn atom(&self) -> &Atom {
        match self {
            BetaForm::Diamond { atom, .. }
            | BetaForm::Always { atom, .. }
            | BetaForm::Plain { atom }
            | BetaForm::AtPast { atom, .. } => atom,
        }
    }
}

/// Where a rule falls relative to the two templates: a box-wrapped
/// implication firing at every time point, a plain rule firing at the
/// evaluation point, or anything else.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuleShape {
    TypeI { cons: Atom, prem: Vec<BetaAtom> },
    TypeII { head: Atom, body: Vec<BetaAtom> },
    Other { reason: String },
}

impl RuleShape {
    pub fn is_other(&self) -> bool {
        matches!(self, RuleShape::Other { .. })
    }

    pub fn head_atom(&self) -> Option<&Atom> {
        match self {
            RuleShape::TypeI { cons, .. } => Some(cons),
            RuleShape::TypeII { head, .. } => Some(head),
            RuleShape::Other { .. } => None,
        }
    }

    pub fn betas(&self) -> &[BetaAtom] {
        match self {
            RuleShape::TypeI { prem, .. } => prem,
            RuleShape::TypeII { body, .. } => body,
            RuleShape::Other { .. } => &[],
        }
    }
}

pub fn classify_rule_shape(rule: &LarsRule) -> RuleShape {
    match &rule.head {
        LarsFormula::Box(inner) => {
            if !rule.body.is_empty() {
                return other("a box-implication rule cannot have extra body elements");
            }
            let LarsFormula::Implies(prem, cons) = inner.as_ref() else {
                return other("box head must wrap an implication");
            };
            let LarsFormula::Atom(cons) = cons.as_ref() else {
                return other("box implication must conclude a predicate atom");
            };
            match match_betas(&prem.conjuncts()) {
                Ok(prem) => RuleShape::TypeI { cons: cons.clone(), prem },
                Err(reason) => other(&reason),
            }
        }
        LarsFormula::Atom(head) => {
            let pool: Vec<&LarsFormula> = rule.body.iter().flat_map(|f| f.conjuncts()).collect();
            match match_betas(&pool) {
                Ok(body) => RuleShape::TypeII { head: head.clone(), body },
                Err(reason) => other(&reason),
            }
        }
        _ => other("head is neither an atom nor a box implication"),
    }
}

fn other(reason: &str) -> RuleShape {
    RuleShape::Other { reason: reason.to_string() }
}

/// Matches a conjunct pool against the template set, pairing each bare
/// `at[T-k] p` with a `wplus[0] at[T] true` binder over the same variable.
/// Pairing is order-insensitive and one binder may serve several references.
fn match_betas(pool: &[&LarsFormula]) -> Result<Vec<BetaAtom>, String> {
    let mut binders: BTreeSet<String> = BTreeSet::new();
    for f in pool {
        if let Ok(Positive::Binder(v)) = match_positive(f) {
            binders.insert(v);
        }
    }

    let mut out = Vec::new();
    let mut used: BTreeSet<String> = BTreeSet::new();
    for f in pool {
        match f {
            LarsFormula::Not(inner) => {
                let form = match_negated_beta(inner)?;
                out.push(BetaAtom { negated: true, form });
            }
            _ => match match_positive(f)? {
                Positive::Beta(form) => out.push(BetaAtom { negated: false, form }),
                Positive::Binder(_) => {}
                Positive::AtRef(v, k, atom) => {
                    if !binders.contains(&v) {
                        return Err(format!(
                            "`at[{v}-{k}]` lacks a `wplus[0] at[{v}] true` binder"
                        ));
                    }
                    used.insert(v);
                    out.push(BetaAtom { negated: false, form: BetaForm::AtPast { k, atom } });
                }
            },
        }
    }

    if let Some(v) = binders.iter().find(|v| !used.contains(*v)) {
        return Err(format!("`wplus[0] at[{v}] true` pairs with no `at[{v}-k]` atom"));
    }
    for b in &out {
        if b.form.atom().args.iter().any(|t| t.as_var().map_or(false, |v| binders.contains(v))) {
            return Err("a reference-point variable cannot appear as an atom argument".into());
        }
    }
    Ok(out)
}

enum Positive {
    Beta(BetaForm),
    Binder(String),
    AtRef(String, u64, Atom),
}

fn match_positive(f: &LarsFormula) -> Result<Positive, String> {
    match f {
        LarsFormula::Atom(a) => Ok(Positive::Beta(BetaForm::Plain { atom: a.clone() })),
        LarsFormula::Window(w, inner) => match inner.as_ref() {
            LarsFormula::Diamond(g) => match g.as_ref() {
                LarsFormula::Atom(a) => {
                    Ok(Positive::Beta(BetaForm::Diamond { window: *w, atom: a.clone() }))
                }
                _ => Err("windowed diamond must cover a predicate atom".into()),
            },
            LarsFormula::Box(g) => match g.as_ref() {
                LarsFormula::Atom(a) => {
                    Ok(Positive::Beta(BetaForm::Always { window: *w, atom: a.clone() }))
                }
                _ => Err("windowed box must cover a predicate atom".into()),
            },
            LarsFormula::At(e, g) if *w == 0 && g.as_ref() == &LarsFormula::True => {
                match (e.base.as_var(), e.offset) {
                    (Some(v), 0) => Ok(Positive::Binder(v.to_string())),
                    _ => Err("the reference-point binder must name a plain variable".into()),
                }
            }
            _ => Err(format!("`{f}` is not a template body element")),
        },
        LarsFormula::At(e, g) => {
            let LarsFormula::Atom(a) = g.as_ref() else {
                return Err("`at` must cover a predicate atom here".into());
            };
            match (e.base.as_var(), e.offset) {
                (Some(v), k) if k <= 0 => Ok(Positive::AtRef(v.to_string(), -k as u64, a.clone())),
                _ => Err(format!("`{f}` is not a past reference to a bound variable")),
            }
        }
        _ => Err(format!("`{f}` is not a template body element")),
    }
}

/// A negated element carries its own binder: `not (wplus[0] at[T] true and
/// at[T-k] p)`, or the negation of one of the other three forms.
fn match_negated_beta(inner: &LarsFormula) -> Result<BetaForm, String> {
    if let Ok(Positive::Beta(form)) = match_positive(inner) {
        return Ok(form);
    }
    let parts = inner.conjuncts();
    if parts.len() == 2 {
        for (i, j) in [(0, 1), (1, 0)] {
            if let (Ok(Positive::Binder(v)), Ok(Positive::AtRef(w, k, atom))) =
                (match_positive(parts[i]), match_positive(parts[j]))
            {
                if v == w {
                    if atom.args.iter().any(|t| t.as_var() == Some(v.as_str())) {
                        return Err(
                            "a reference-point variable cannot appear as an atom argument".into()
                        );
                    }
                    return Ok(BetaForm::AtPast { k, atom });
                }
            }
        }
    }
    Err(format!("`not ({inner})` negates no template body element"))
}

/// Consequent predicates of box rules whose premise mentions the head
/// predicate of some plain rule.
pub fn marked_predicates(program: &LarsProgram) -> BTreeSet<String> {
    let shapes: Vec<RuleShape> = program.rules.iter().map(classify_rule_shape).collect();
    marked_from_shapes(&shapes)
}

fn marked_from_shapes(shapes: &[RuleShape]) -> BTreeSet<String> {
    let type2_heads: BTreeSet<&str> = shapes
        .iter()
        .filter_map(|s| match s {
            RuleShape::TypeII { head, .. } => Some(head.pred.as_str()),
            _ => None,
        })
        .collect();
    shapes
        .iter()
        .filter_map(|s| match s {
            RuleShape::TypeI { cons, prem } => prem
                .iter()
                .any(|b| type2_heads.contains(b.form.atom().pred.as_str()))
                .then(|| cons.pred.clone()),
            _ => None,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct DepArc {
    pub from: String,
    pub to: String,
    pub negative: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DepGraph {
    pub nodes: BTreeSet<String>,
    pub arcs: BTreeSet<DepArc>,
}

/// Signed dependency graph over head predicates: an arc (q, p, sign) for
/// each occurrence of q in the premise or body of a rule deriving p.
pub fn build_dep_graph(program: &LarsProgram) -> DepGraph {
    let mut g = DepGraph::default();
    for rule in &program.rules {
        let shape = classify_rule_shape(rule);
        let Some(head) = shape.head_atom() else { continue };
        g.nodes.insert(head.pred.clone());
        for b in shape.betas() {
            g.arcs.insert(DepArc {
                from: b.form.atom().pred.clone(),
                to: head.pred.clone(),
                negative: b.negated,
            });
        }
    }
    g
}

fn negative_cycle(g: &DepGraph) -> Option<CycleWitness> {
    let mut nodes: BTreeSet<String> = g.nodes.clone();
    for a in &g.arcs {
        nodes.insert(a.from.clone());
        nodes.insert(a.to.clone());
    }
    let edges: Vec<DepEdge> = g
        .arcs
        .iter()
        .map(|a| DepEdge { from: a.from.clone(), to: a.to.clone(), strict: a.negative })
        .collect();
    stratify(&nodes, &edges).err()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Fragment {
    F1,
    F2,
    F3,
    F4,
    F5,
    F6,
    F7,
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F{}", *self as u8 + 1)
    }
}

/// Machine-readable violation evidence: the offending rule, predicate,
/// and/or dependency cycle.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Witness {
    pub rule: Option<usize>,
    pub predicate: Option<String>,
    pub cycle: Option<Vec<String>>,
}

impl Witness {
    fn rule(idx: usize) -> Witness {
        Witness { rule: Some(idx), ..Witness::default() }
    }

    fn pred(p: &str) -> Witness {
        Witness { predicate: Some(p.to_string()), ..Witness::default() }
    }

    fn rule_pred(idx: usize, p: &str) -> Witness {
        Witness { rule: Some(idx), predicate: Some(p.to_string()), cycle: None }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(r) = self.rule {
            parts.push(format!("rule {}", r + 1));
        }
        if let Some(p) = &self.predicate {
            parts.push(format!("predicate {p}"));
        }
        if let Some(c) = &self.cycle {
            parts.push(format!("cycle {}", c.join(" -> ")));
        }
        write!(f, "{}", parts.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub fragment: Fragment,
    pub condition: String,
    pub witness: Witness,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} ({})", self.fragment, self.condition, self.witness)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FragmentVerdict {
    /// The fragments this verdict assessed, in inclusion order.
    pub assessed: Vec<Fragment>,
    pub memberships: BTreeSet<Fragment>,
    pub violations: Vec<Violation>,
}

impl FragmentVerdict {
    pub fn is_member(&self, f: Fragment) -> bool {
        self.memberships.contains(&f)
    }
}

impl fmt::Display for FragmentVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &frag in &self.assessed {
            if self.is_member(frag) {
                writeln!(f, "{frag}: member")?;
            } else {
                let why: Vec<String> = self
                    .violations
                    .iter()
                    .filter(|v| v.fragment == frag)
                    .map(|v| format!("{} ({})", v.condition, v.witness))
                    .collect();
                if why.is_empty() {
                    writeln!(f, "{frag}: violation (a required smaller fragment fails)")?;
                } else {
                    writeln!(f, "{frag}: violation {}", why.join("; "))?;
                }
            }
        }
        Ok(())
    }
}

/// F1: template rules only, marked predicates in no premise or body, and no
/// negative dependency cycle. F2 adds plain-rule heads disjoint from box-rule
/// premises; F3 keeps plain rules only.
pub fn classify_lars_fragments(program: &LarsProgram) -> FragmentVerdict {
    let shapes: Vec<RuleShape> = program.rules.iter().map(classify_rule_shape).collect();
    let mut violations = Vec::new();

    for (idx, shape) in shapes.iter().enumerate() {
        if let RuleShape::Other { reason } = shape {
            violations.push(Violation {
                fragment: Fragment::F1,
                condition: format!("condition (i): {reason}"),
                witness: Witness::rule(idx),
            });
        } else if let Some(h) = shape.head_atom() {
            if !program.sig.is_intensional(&h.pred) {
                violations.push(Violation {
                    fragment: Fragment::F1,
                    condition: "condition (i): head predicate is extensional".into(),
                    witness: Witness::rule_pred(idx, &h.pred),
                });
            }
        }
    }

    let marked = marked_from_shapes(&shapes);
    for (idx, shape) in shapes.iter().enumerate() {
        let (cond, betas) = match shape {
            RuleShape::TypeI { prem, .. } => ("condition (ii): marked predicate in a box-rule premise", prem),
            RuleShape::TypeII { body, .. } => ("condition (iii): marked predicate in a plain-rule body", body),
            RuleShape::Other { .. } => continue,
        };
        for b in betas {
            let p = &b.form.atom().pred;
            if marked.contains(p) {
                violations.push(Violation {
                    fragment: Fragment::F1,
                    condition: cond.into(),
                    witness: Witness::rule_pred(idx, p),
                });
            }
        }
    }

    if let Some(w) = negative_cycle(&build_dep_graph(program)) {
        violations.push(Violation {
            fragment: Fragment::F1,
            condition: "condition (iv): dependency cycle through a negated occurrence".into(),
            witness: Witness { rule: None, predicate: None, cycle: Some(w.cycle) },
        });
    }

    let type1_prem_preds: BTreeSet<&str> = shapes
        .iter()
        .filter_map(|s| match s {
            RuleShape::TypeI { prem, .. } => Some(prem.iter().map(|b| b.form.atom().pred.as_str())),
            _ => None,
        })
        .flatten()
        .collect();
    for (idx, shape) in shapes.iter().enumerate() {
        if let RuleShape::TypeII { head, .. } = shape {
            if type1_prem_preds.contains(head.pred.as_str()) {
                violations.push(Violation {
                    fragment: Fragment::F2,
                    condition: "plain-rule head predicate occurs in a box-rule premise".into(),
                    witness: Witness::rule_pred(idx, &head.pred),
                });
            }
        }
        if let RuleShape::TypeI { .. } = shape {
            violations.push(Violation {
                fragment: Fragment::F3,
                condition: "box rule present".into(),
                witness: Witness::rule(idx),
            });
        }
    }

    verdict_from(violations, &[Fragment::F1, Fragment::F2, Fragment::F3], &[(Fragment::F2, Fragment::F1), (Fragment::F3, Fragment::F2)])
}

/// F4: intensional heads only. F5 adds #temp rules only; F6 removes
/// count-variable atoms; F7 instead keeps #temp head and body predicates
/// disjoint and also bans count variables.
pub fn classify_ldsr_fragments(program: &LdsrProgram) -> FragmentVerdict {
    let mut violations = Vec::new();

    for (idx, r) in program.rules.iter().enumerate() {
        if !program.sig.is_intensional(&r.head.pred) {
            violations.push(Violation {
                fragment: Fragment::F4,
                condition: "head predicate is extensional".into(),
                witness: Witness::rule_pred(idx, &r.head.pred),
            });
        }
        if !r.temp {
            violations.push(Violation {
                fragment: Fragment::F5,
                condition: "permanent rule present".into(),
                witness: Witness::rule(idx),
            });
        }
        for l in &r.body {
            if l.has_count_var() {
                let w = Witness::rule_pred(idx, &l.satom.atom.pred);
                violations.push(Violation {
                    fragment: Fragment::F6,
                    condition: "count with a variable bound".into(),
                    witness: w.clone(),
                });
                violations.push(Violation {
                    fragment: Fragment::F7,
                    condition: "condition (ii): count with a variable bound".into(),
                    witness: w,
                });
            }
        }
    }

    let f2_heads = program.form2_head_preds();
    let f2_body_preds: BTreeSet<&str> = program
        .rules
        .iter()
        .filter(|r| r.temp)
        .flat_map(|r| r.body.iter().map(|l| l.satom.atom.pred.as_str()))
        .collect();
    for p in &f2_heads {
        if f2_body_preds.contains(p.as_str()) {
            violations.push(Violation {
                fragment: Fragment::F7,
                condition: "condition (i): #temp head predicate occurs in a #temp body".into(),
                witness: Witness::pred(p),
            });
        }
    }

    verdict_from(
        violations,
        &[Fragment::F4, Fragment::F5, Fragment::F6, Fragment::F7],
        &[(Fragment::F5, Fragment::F4), (Fragment::F6, Fragment::F5), (Fragment::F7, Fragment::F4)],
    )
}

fn verdict_from(
    violations: Vec<Violation>,
    order: &[Fragment],
    requires: &[(Fragment, Fragment)],
) -> FragmentVerdict {
    let mut memberships = BTreeSet::new();
    for &frag in order {
        let own = violations.iter().any(|v| v.fragment == frag);
        let parent_ok = requires
            .iter()
            .filter(|(child, _)| *child == frag)
            .all(|(_, parent)| memberships.contains(parent));
        if !own && parent_ok {
            memberships.insert(frag);
        }
    }
    FragmentVerdict { assessed: order.to_vec(), memberships, violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lars::head_pred;
    use crate::lars::parse_lars;
    use crate::ldsr::parse_ldsr;

    const TRAFFIC: &str = "\
#stream onLane/3.
box(inNetwork(V) <- onLane(V,X,Y)).
appears(V) <- onLane(V,X,Y), not (wplus[0] at[T] true and at[T-1] inNetwork(V)).
disappears(V) <- wplus[0] at[T] true and at[T-1] inNetwork(V), not inNetwork(V).
";

    fn lars(src: &str) -> LarsProgram {
        parse_lars(src).unwrap()
    }

    fn ldsr(src: &str) -> LdsrProgram {
        parse_ldsr(src).unwrap()
    }

    #[test]
    fn traffic_rules_take_both_shapes() {
        let p = lars(TRAFFIC);
        let s0 = classify_rule_shape(&p.rules[0]);
        match &s0 {
            RuleShape::TypeI { cons, prem } => {
                assert_eq!(cons.pred, "inNetwork");
                assert_eq!(prem.len(), 1);
                assert_eq!(prem[0].form.atom().pred, "onLane");
                assert!(!prem[0].negated);
            }
            _ => panic!("expected a box rule, got {s0:?}"),
        }
        let s1 = classify_rule_shape(&p.rules[1]);
        match &s1 {
            RuleShape::TypeII { head, body } => {
                assert_eq!(head.pred, "appears");
                assert_eq!(body.len(), 2);
                assert!(body[1].negated);
                assert_eq!(body[1].form, BetaForm::AtPast { k: 1, atom: Atom::new("inNetwork", vec![crate::atoms::Term::var("V")]) });
            }
            _ => panic!("expected a plain rule, got {s1:?}"),
        }
        let s2 = classify_rule_shape(&p.rules[2]);
        match &s2 {
            RuleShape::TypeII { body, .. } => {
                assert_eq!(body.len(), 2);
                assert!(matches!(body[0].form, BetaForm::AtPast { k: 1, .. }));
                assert!(body[1].negated && matches!(body[1].form, BetaForm::Plain { .. }));
            }
            _ => panic!("expected a plain rule, got {s2:?}"),
        }
    }

    #[test]
    fn off_template_rules_are_other() {
        for src in [
            "a <- diamond p.",
            "at[3] a <- p.",
            "a <- at[T-1] p.",
            "a <- wplus[0] at[T] true.",
            "a <- wplus[2] diamond (p and q).",
            "box(a <- p) <- q.",
        ] {
            let p = lars(src);
            assert!(
                classify_rule_shape(&p.rules[0]).is_other(),
                "{src} should fall outside the templates"
            );
        }
    }

    #[test]
    fn marked_predicates_need_both_rule_kinds() {
        assert!(marked_predicates(&lars(TRAFFIC)).is_empty());
        let p = lars("box(p <- q). q <- s.");
        assert_eq!(marked_predicates(&p), ["p".to_string()].into());
        let only_plain = lars("p <- q. q <- s.");
        assert!(marked_predicates(&only_plain).is_empty());
    }

    #[test]
    fn dep_graph_reads_signed_occurrences() {
        let g = build_dep_graph(&lars(TRAFFIC));
        let has = |from: &str, to: &str, negative: bool| {
            g.arcs.contains(&DepArc { from: from.into(), to: to.into(), negative })
        };
        assert!(has("onLane", "inNetwork", false));
        assert!(has("inNetwork", "appears", true));
        assert!(has("inNetwork", "disappears", true));
        assert!(has("inNetwork", "disappears", false));
        assert!(build_dep_graph(&lars("")).arcs.is_empty());
        let neg = build_dep_graph(&lars("box(p <- not q)."));
        assert_eq!(neg.arcs, [DepArc { from: "q".into(), to: "p".into(), negative: true }].into());
    }

    // A second reading of the arc definition: walk every rule, flip sign
    // under negation, one arc per occurrence.
    fn naive_arcs(program: &LarsProgram) -> BTreeSet<DepArc> {
        fn collect(f: &LarsFormula, neg: bool, to: &str, out: &mut BTreeSet<DepArc>) {
            match f {
                LarsFormula::Atom(a) => {
                    out.insert(DepArc { from: a.pred.clone(), to: to.to_string(), negative: neg });
                }
                LarsFormula::Not(g) => collect(g, !neg, to, out),
                LarsFormula::And(a, b) | LarsFormula::Or(a, b) => {
                    collect(a, neg, to, out);
                    collect(b, neg, to, out);
                }
                LarsFormula::Diamond(g)
                | LarsFormula::Box(g)
                | LarsFormula::Window(_, g)
                | LarsFormula::At(_, g)
                | LarsFormula::Reset(g)
                | LarsFormula::Exists(_, g) => collect(g, neg, to, out),
                LarsFormula::Implies(a, b) => {
                    collect(a, !neg, to, out);
                    collect(b, neg, to, out);
                }
                LarsFormula::True | LarsFormula::Cmp(..) => {}
            }
        }
        let mut out = BTreeSet::new();
        for rule in &program.rules {
            let Some(h) = head_pred(rule) else { continue };
            let pred = h.pred.clone();
            match &rule.head {
                LarsFormula::Box(inner) => {
                    if let LarsFormula::Implies(prem, _) = inner.as_ref() {
                        collect(prem, false, &pred, &mut out);
                    }
                }
                _ => {
                    for f in &rule.body {
                        collect(f, false, &pred, &mut out);
                    }
                }
            }
        }
        // The negated past-reference pattern carries `at[T] true` with it;
        // `true` contributes nothing, and the flip at `not` matches the
        // template reading because the pattern nests no second negation.
        out
    }

    #[test]
    fn dep_graph_matches_a_literal_rescan() {
        for src in [
            TRAFFIC,
            "box(p <- not q). p <- r, not (wplus[0] at[T] true and at[T-2] s).",
            "a <- wplus[2] diamond b, not wplus[1] box(c). box(b <- a).",
            "",
        ] {
            let p = lars(src);
            assert_eq!(build_dep_graph(&p).arcs, naive_arcs(&p), "on {src:?}");
        }
    }

    #[test]
    fn traffic_sits_in_f2_but_not_f3() {
        let v = classify_lars_fragments(&lars(TRAFFIC));
        assert!(v.is_member(Fragment::F1), "{v}");
        assert!(v.is_member(Fragment::F2));
        assert!(!v.is_member(Fragment::F3));
        assert!(v.violations.iter().any(|x| x.fragment == Fragment::F3));
    }

    #[test]
    fn negative_self_loop_fails_condition_iv() {
        let v = classify_lars_fragments(&lars("box(p <- not p)."));
        assert!(!v.is_member(Fragment::F1));
        let viol = v.violations.iter().find(|x| x.fragment == Fragment::F1).unwrap();
        assert!(viol.condition.contains("(iv)"));
        assert_eq!(viol.witness.cycle.as_deref(), Some(&["p".to_string(), "p".to_string()][..]));
    }

    #[test]
    fn marked_predicate_uses_are_reported() {
        // q's head feeds the box rule, so p is marked; p in a body breaks (iii).
        let v = classify_lars_fragments(&lars("box(p <- q). q <- s. r <- p."));
        assert!(!v.is_member(Fragment::F1));
        let viol = v.violations.iter().find(|x| x.fragment == Fragment::F1).unwrap();
        assert!(viol.condition.contains("(iii)"), "{viol}");
        assert_eq!(viol.witness.predicate.as_deref(), Some("p"));

        let v2 = classify_lars_fragments(&lars("box(p <- q). q <- s. box(r <- p)."));
        let viol2 = v2.violations.iter().find(|x| x.fragment == Fragment::F1).unwrap();
        assert!(viol2.condition.contains("(ii)"), "{viol2}");
    }

    #[test]
    fn plain_only_programs_reach_f3() {
        let v = classify_lars_fragments(&lars("p <- q. q <- r."));
        assert_eq!(v.memberships, [Fragment::F1, Fragment::F2, Fragment::F3].into());

        // A plain-rule head inside a box premise stops at F1.
        let v2 = classify_lars_fragments(&lars("q <- r. box(p <- s and q)."));
        assert!(!v2.is_member(Fragment::F2), "{v2}");
        assert!(v2.is_member(Fragment::F1));
    }

    #[test]
    fn extensional_heads_fail_f1_and_f4() {
        let v = classify_lars_fragments(&lars("#stream a/1.\na(X) <- b(X)."));
        assert!(!v.is_member(Fragment::F1));

        let p2 = ldsr("#stream a/1.\n#stream b/2.\na(Y) :- a(X), b(X,Y).");
        let v2 = classify_ldsr_fragments(&p2);
        assert!(v2.memberships.is_empty(), "{v2}");
        assert_eq!(
            v2.violations.iter().find(|x| x.fragment == Fragment::F4).unwrap().witness.predicate.as_deref(),
            Some("a")
        );
    }

    #[test]
    fn train_program_reaches_f4_and_f7() {
        let p = ldsr("#stream train_pass/0.\nirregular :- train_pass, train_pass at least 1 in {1,2}.");
        let v = classify_ldsr_fragments(&p);
        assert!(v.is_member(Fragment::F4));
        assert!(v.is_member(Fragment::F7));
        assert!(!v.is_member(Fragment::F5));
        assert!(!v.is_member(Fragment::F6));
    }

    #[test]
    fn count_variables_stop_f6_and_f7() {
        let p = ldsr("#temp h :- b count N in {0,1}.");
        let v = classify_ldsr_fragments(&p);
        assert_eq!(v.memberships, [Fragment::F4, Fragment::F5].into());
        assert!(v.violations.iter().any(|x| x.fragment == Fragment::F6));
        assert!(v.violations.iter().any(|x| x.fragment == Fragment::F7 && x.condition.contains("(ii)")));
    }

    #[test]
    fn temp_chains_fail_f7_condition_i() {
        let p = ldsr("#temp a :- b.\n#temp c :- a in [2].");
        let v = classify_ldsr_fragments(&p);
        assert_eq!(v.memberships, [Fragment::F4, Fragment::F5, Fragment::F6].into());
        let viol = v.violations.iter().find(|x| x.fragment == Fragment::F7).unwrap();
        assert_eq!(viol.witness.predicate.as_deref(), Some("a"));
    }

    #[test]
    fn verdicts_respect_the_inclusion_order() {
        let lars_srcs = [
            TRAFFIC,
            "p <- q. q <- r.",
            "box(p <- not p).",
            "box(p <- q). q <- s. r <- p.",
            "a <- diamond p.",
        ];
        for src in lars_srcs {
            let v = classify_lars_fragments(&lars(src));
            assert!(!v.is_member(Fragment::F3) || v.is_member(Fragment::F2), "{src}");
            assert!(!v.is_member(Fragment::F2) || v.is_member(Fragment::F1), "{src}");
        }
        let ldsr_srcs = [
            "#stream train_pass/0.\nirregular :- train_pass, train_pass at least 1 in {1,2}.",
            "#temp h :- b count N in {0,1}.",
            "#temp a :- b.\n#temp c :- a in [2].",
            "#stream a/1.\n#stream b/2.\na(Y) :- a(X), b(X,Y).",
            "h :- b always in [1]. #temp k :- h in {3}.",
        ];
        for src in ldsr_srcs {
            let v = classify_ldsr_fragments(&ldsr(src));
            assert!(!v.is_member(Fragment::F6) || v.is_member(Fragment::F5), "{src}");
            assert!(!v.is_member(Fragment::F5) || v.is_member(Fragment::F4), "{src}");
            assert!(!v.is_member(Fragment::F7) || v.is_member(Fragment::F4), "{src}");
        }
    }

    #[test]
    fn classification_is_renaming_invariant() {
        let rename = |s: &str| -> String {
            let mut out = s.to_string();
            for (a, b) in [
                ("inNetwork", "seen"),
                ("onLane", "reading"),
                ("appears", "fresh"),
                ("disappears", "gone"),
                ("V", "Zq"),
                ("X", "U1"),
                ("Y", "U2"),
                ("T", "W0"),
            ] {
                out = out.replace(a, b);
            }
            out
        };
        let v1 = classify_lars_fragments(&lars(TRAFFIC));
        let v2 = classify_lars_fragments(&lars(&rename(TRAFFIC)));
        assert_eq!(v1.memberships, v2.memberships);
        assert_eq!(v1.violations.len(), v2.violations.len());

        let train = "#stream train_pass/0.\nirregular :- train_pass, train_pass at least 1 in {1,2}.";
        let renamed = train.replace("train_pass", "tick").replace("irregular", "odd");
        assert_eq!(
            classify_ldsr_fragments(&ldsr(train)).memberships,
            classify_ldsr_fragments(&ldsr(&renamed)).memberships
        );
    }
}
