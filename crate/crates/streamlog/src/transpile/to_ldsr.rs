//! ρ1, ρ2, ρ3: box-implication rules become permanent rules, plain rules
//! become `#temp` rules, and each premise element maps to one body literal.

use super::{Provenance, Translation};
use crate::atoms::PredKind;
use crate::error::{Error, Result};
use crate::fragments::{classify_lars_fragments, classify_rule_shape, BetaAtom, BetaForm, Fragment, FragmentVerdict, RuleShape};
use crate::lars::LarsProgram;
use crate::ldsr::{LdsrProgram, LdsrRule, Literal, Offsets, StreamingAtom, StreamingKind};

/// One premise element as one body literal.
pub fn f_translate(beta: &BetaAtom) -> Literal {
    let satom = match &beta.form {
        BetaForm::Diamond { window, atom } => StreamingAtom {
            atom: atom.clone(),
            kind: StreamingKind::AtLeast(1),
            offsets: Offsets::window(*window),
        },
        BetaForm::Always { window, atom } => StreamingAtom {
            atom: atom.clone(),
            kind: StreamingKind::Always,
            offsets: Offsets::window(*window),
        },
        BetaForm::Plain { atom } => StreamingAtom::bare(atom.clone()),
        BetaForm::AtPast { k, atom } => StreamingAtom {
            atom: atom.clone(),
            kind: StreamingKind::AtLeast(1),
            offsets: Offsets::set(&[*k]),
        },
    };
    if beta.negated {
        Literal::neg(satom)
    } else {
        Literal::pos(satom)
    }
}

pub(crate) fn refuse_outside(verdict: &FragmentVerdict, target: Fragment, chain: &[Fragment]) -> Error {
    let why: Vec<String> = verdict
        .violations
        .iter()
        .filter(|v| chain.contains(&v.fragment))
        .map(|v| v.to_string())
        .collect();
    let why = if why.is_empty() { "no witness recorded".to_string() } else { why.join("; ") };
    Error::Translate(format!("program is outside {target}: {why}"))
}

fn rho_to_ldsr(program: &LarsProgram, target: Fragment, chain: &[Fragment], helper: &str) -> Result<Translation<LdsrProgram>> {
    let verdict = classify_lars_fragments(program);
    if !verdict.is_member(target) {
        return Err(refuse_outside(&verdict, target, chain));
    }

    let mut rules = Vec::new();
    let mut provenance = Vec::new();
    for (idx, rule) in program.rules.iter().enumerate() {
        let shape = classify_rule_shape(rule);
        let (temp, head, betas) = match &shape {
            RuleShape::TypeI { cons, prem } => (false, cons.clone(), prem),
            RuleShape::TypeII { head, body } => (true, head.clone(), body),
            RuleShape::Other { reason } => {
                return Err(Error::Translate(format!("rule {} has no template shape: {reason}", idx + 1)))
            }
        };
        let body: Vec<Literal> = betas.iter().map(f_translate).collect();
        provenance.push(Provenance { output_rule: rules.len(), source_rule: Some(idx), helper: helper.to_string() });
        rules.push(LdsrRule { temp, head, body });
    }

    let declared: Vec<(String, usize, PredKind)> =
        program.sig.decls().map(|d| (d.name.clone(), d.arity, d.kind)).collect();
    let program = LdsrProgram::new(rules, declared)?;
    Ok(Translation { program, aux_predicates: Default::default(), provenance })
}

pub fn rho1(program: &LarsProgram) -> Result<Translation<LdsrProgram>> {
    rho_to_ldsr(program, Fragment::F1, &[Fragment::F1], "f")
}

pub fn rho2(program: &LarsProgram) -> Result<Translation<LdsrProgram>> {
    rho_to_ldsr(program, Fragment::F2, &[Fragment::F1, Fragment::F2], "f")
}

pub fn rho3(program: &LarsProgram) -> Result<Translation<LdsrProgram>> {
    rho_to_ldsr(program, Fragment::F3, &[Fragment::F1, Fragment::F2, Fragment::F3], "f")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lars::parse_lars;
    use crate::ldsr::{check_stratified, parse_ldsr};

    const TRAFFIC: &str = "\
#stream onLane/3.
box(inNetwork(V) <- onLane(V,X,Y)).
appears(V) <- onLane(V,X,Y), not (wplus[0] at[T] true and at[T-1] inNetwork(V)).
disappears(V) <- wplus[0] at[T] true and at[T-1] onLane(V,X,Y), not inNetwork(V).
";

    #[test]
    fn window_premises_map_to_offset_literals() {
        let p = parse_lars(
            "h(X) <- wplus[2] diamond q(X), wplus[1] box(r), s(X), not wplus[3] diamond q(X).",
        )
        .unwrap();
        let shape = classify_rule_shape(&p.rules[0]);
        let lits: Vec<Literal> = shape.betas().iter().map(f_translate).collect();
        let q = parse_ldsr("h(X) :- q(X) in [2], r always in [1], s(X), not q(X) in [3].").unwrap();
        assert_eq!(lits, q.rules[0].body);
    }

    #[test]
    fn at_patterns_map_to_singleton_offsets() {
        let p = parse_lars("h <- wplus[0] at[T] true and at[T-2] q, p.").unwrap();
        let shape = classify_rule_shape(&p.rules[0]);
        let lits: Vec<Literal> = shape.betas().iter().map(f_translate).collect();
        let q = parse_ldsr("h :- q in {2}, p.").unwrap();
        assert_eq!(lits, q.rules[0].body);
    }

    #[test]
    fn traffic_program_translates_to_the_three_rule_image() {
        let p = parse_lars(TRAFFIC).unwrap();
        let out = rho2(&p).unwrap();
        let expected = parse_ldsr(
            "#stream onLane/3.
inNetwork(V) :- onLane(V,X,Y).
#temp appears(V) :- onLane(V,X,Y), not inNetwork(V) in {1}.
#temp disappears(V) :- onLane(V,X,Y) in {1}, not inNetwork(V).",
        )
        .unwrap();
        assert_eq!(out.program.rules, expected.rules);
        assert_eq!(out.program.sig, expected.sig);
        assert!(out.aux_predicates.is_empty());
        assert_eq!(out.provenance.len(), 3);
        assert_eq!(out.provenance[2].source_rule, Some(2));
        check_stratified(&out.program).unwrap();
    }

    #[test]
    fn rho3_requires_plain_rules_only() {
        let p = parse_lars(TRAFFIC).unwrap();
        let err = rho3(&p).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("outside F3"), "{msg}");
        assert!(msg.contains("rule 1"), "{msg}");
        assert!(rho2(&p).is_ok());
    }

    #[test]
    fn marked_premises_refuse_with_the_predicate_named() {
        let p = parse_lars(
            "a <- b.
box(c <- a).
d <- wplus[1] diamond c.",
        )
        .unwrap();
        let err = rho1(&p).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("outside F1"), "{msg}");
        assert!(msg.contains("predicate c"), "{msg}");
    }

    #[test]
    fn unsafe_images_are_refused() {
        let p = parse_lars("h(X) <- not q(X).").unwrap();
        let err = rho3(&p).unwrap_err();
        assert!(matches!(err, Error::Validation(_)), "{err}");
    }

    #[test]
    fn images_of_f1_programs_are_stratified() {
        let p = parse_lars(
            "box(a(X) <- b(X)).
c(X) <- wplus[1] diamond b(X), not wplus[2] box(a(X)).",
        )
        .unwrap();
        let out = rho1(&p).unwrap();
        check_stratified(&out.program).unwrap();
    }
}
