//! Brute-force checking for answer streams.
//!
//! `verify_answer_stream` judges a candidate directly against the
//! definition: it must extend the input without touching input predicates,
//! satisfy every ground rule at the query time, and be minimal among models
//! of the rules whose bodies it satisfies. `find_answer_streams` enumerates
//! all candidates on small instances. Neither runs the stratified fixpoint,
//! so they can sit on the other side of a differential test from the
//! evaluator.

use super::{eval_formula, ground_lars, GroundHead, GroundLarsRule, LarsProgram, LarsStructure};
use crate::atoms::{Const, GroundAtom};
use crate::error::{Error, Result};
use crate::stream::{Slot, Stream};
use std::collections::BTreeSet;

const MAX_CANDIDATES: usize = 16;

/// Returns `None` when `candidate` is an answer stream of `program` for
/// `input` at `t`, otherwise the reason it is not.
pub fn verify_answer_stream(
    program: &LarsProgram,
    input: &Stream,
    background: &Slot,
    t: usize,
    candidate: &Stream,
) -> Result<Option<String>> {
    if candidate.n() != input.n() {
        return Ok(Some(format!(
            "candidate runs to {}, input to {}",
            candidate.n(),
            input.n()
        )));
    }
    if !input.contained_in(candidate) {
        return Ok(Some("candidate does not contain the input".into()));
    }
    let mut derived: Vec<(usize, GroundAtom)> = Vec::new();
    for i in 0..=input.n() {
        for a in candidate.slot(i) {
            if !input.slot(i).contains(a) {
                if program.sig.is_extensional(&a.pred) {
                    return Ok(Some(format!(
                        "candidate adds {a} at {i}, but {} is an input predicate",
                        a.pred
                    )));
                }
                derived.push((i, a.clone()));
            }
        }
    }
    if derived.len() > MAX_CANDIDATES {
        return Err(Error::Eval(format!(
            "instance too large to verify by brute force: {} derived atoms",
            derived.len()
        )));
    }

    let universe = shared_universe(program, input, background);
    let ground = ground_lars(program, &universe, input.n());
    let universe: Vec<Const> = universe.into_iter().collect();

    if let Some(broken) = violated_rule(&ground, candidate, background, &universe, t)? {
        return Ok(Some(format!("candidate violates a ground instance of rule {broken}")));
    }

    // Minimality against the rules whose bodies the candidate satisfies.
    let mut reduct: Vec<&GroundLarsRule> = Vec::new();
    {
        let st = LarsStructure { stream: candidate, background, universe: &universe };
        for r in &ground {
            if body_holds(&st, r, t)? {
                reduct.push(r);
            }
        }
    }
    for mask in 0..(1u32 << derived.len()) - 1 {
        let mut smaller = input.clone();
        for (bit, (slot, atom)) in derived.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                smaller.slot_mut(*slot).insert(atom.clone());
            }
        }
        let st = LarsStructure { stream: &smaller, background, universe: &universe };
        let mut ok = true;
        for r in &reduct {
            if body_holds(&st, r, t)? && !head_holds(&st, r, t)? {
                ok = false;
                break;
            }
        }
        if ok {
            let missing: Vec<String> = derived
                .iter()
                .enumerate()
                .filter(|(bit, _)| mask & (1 << bit) == 0)
                .map(|(_, (slot, atom))| format!("{atom} at {slot}"))
                .collect();
            return Ok(Some(format!(
                "candidate is not minimal: it also holds without {}",
                missing.join(", ")
            )));
        }
    }
    Ok(None)
}

/// Every answer stream of `program` for `input` at `t`, by enumeration over
/// the atoms any ground head can produce.
pub fn find_answer_streams(
    program: &LarsProgram,
    input: &Stream,
    background: &Slot,
    t: usize,
) -> Result<Vec<Stream>> {
    let universe = shared_universe(program, input, background);
    let ground = ground_lars(program, &universe, input.n());
    let universe: Vec<Const> = universe.into_iter().collect();

    let mut candidates: BTreeSet<(usize, GroundAtom)> = BTreeSet::new();
    for r in &ground {
        match &r.head {
            GroundHead::Now(h) => {
                candidates.insert((t, h.clone()));
            }
            GroundHead::AtTime(p, h) => {
                candidates.insert((*p, h.clone()));
            }
            GroundHead::BoxRule { cons, .. } => {
                for u in 0..=input.n() {
                    candidates.insert((u, cons.clone()));
                }
            }
        }
    }
    candidates.retain(|(slot, a)| {
        !input.slot(*slot).contains(a) && !program.sig.is_extensional(&a.pred)
    });
    let candidates: Vec<(usize, GroundAtom)> = candidates.into_iter().collect();
    if candidates.len() > MAX_CANDIDATES {
        return Err(Error::Eval(format!(
            "instance too large to enumerate: {} candidate atoms",
            candidates.len()
        )));
    }

    let mut found = Vec::new();
    'masks: for mask in 0..(1u32 << candidates.len()) {
        let mut m = input.clone();
        for (bit, (slot, atom)) in candidates.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                m.slot_mut(*slot).insert(atom.clone());
            }
        }
        {
            let st = LarsStructure { stream: &m, background, universe: &universe };
            for r in &ground {
                if body_holds(&st, r, t)? && !head_holds(&st, r, t)? {
                    continue 'masks;
                }
            }
        }
        if verify_answer_stream(program, input, background, t, &m)?.is_none() {
            found.push(m);
        }
    }
    Ok(found)
}

fn shared_universe(program: &LarsProgram, input: &Stream, background: &Slot) -> BTreeSet<Const> {
    let mut universe = program.constants();
    universe.extend(input.constants());
    for a in background {
        universe.extend(a.args.iter().cloned());
    }
    universe
}

fn violated_rule(
    ground: &[GroundLarsRule],
    m: &Stream,
    background: &Slot,
    universe: &[Const],
    t: usize,
) -> Result<Option<usize>> {
    let st = LarsStructure { stream: m, background, universe };
    for r in ground {
        if body_holds(&st, r, t)? && !head_holds(&st, r, t)? {
            return Ok(Some(r.source_idx + 1));
        }
    }
    Ok(None)
}

fn body_holds(st: &LarsStructure, r: &GroundLarsRule, t: usize) -> Result<bool> {
    for f in &r.body {
        if !eval_formula(st, f, t)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn head_holds(st: &LarsStructure, r: &GroundLarsRule, t: usize) -> Result<bool> {
    match &r.head {
        GroundHead::Now(h) => eval_formula(st, &super::LarsFormula::atom(h.to_atom()), t),
        GroundHead::AtTime(p, h) => {
            eval_formula(st, &super::LarsFormula::atom(h.to_atom()), *p)
        }
        GroundHead::BoxRule { premise, cons } => {
            for u in 0..=st.stream.n() {
                if eval_formula(st, premise, u)?
                    && !eval_formula(st, &super::LarsFormula::atom(cons.to_atom()), u)?
                {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lars::{eval_answer_stream_lars, parse_lars};
    use crate::stream::parse_stream_text;

    fn agree(program: &str, stream: &str, t: usize) {
        let p = parse_lars(program).unwrap();
        let s = parse_stream_text(stream).unwrap();
        let bg = Slot::new();
        let evaluated = eval_answer_stream_lars(&p, &s, &bg, t).unwrap();
        assert_eq!(
            verify_answer_stream(&p, &s, &bg, t, &evaluated).unwrap(),
            None,
            "evaluator output failed verification for {program}"
        );
        let all = find_answer_streams(&p, &s, &bg, t).unwrap();
        assert_eq!(all, vec![evaluated], "enumeration disagrees for {program}");
    }

    #[test]
    fn enumeration_agrees_with_the_evaluator() {
        agree("b <- diamond a.", "0: a\n1: \n", 1);
        agree("b <- wplus[0] diamond a.", "0: a\n1: \n", 1);
        agree("box(seen <- on).", "0: on\n1: \n2: on\n", 2);
        agree("q <- not diamond p.\nr <- q.", "0: \n1: \n", 1);
        agree(
            "box(inNetwork(V) <- onLane(V,X,Y)).\n\
             appears(V) <- wplus[0] at[T] true and at[T] onLane(V,X,Y), not inNetwork(V).",
            "0: onLane(7,1,2)\n1: \n",
            1,
        );
        agree("at[T-1] early <- at[T] c.", "0: \n1: c\n", 1);
    }

    #[test]
    fn unfounded_atoms_are_rejected_as_non_minimal() {
        let p = parse_lars("b <- diamond a.").unwrap();
        let s = parse_stream_text("0: \n1: \n").unwrap();
        let mut padded = s.clone();
        padded.slot_mut(1).insert(crate::stream::parse_ground_atom("b").unwrap());
        let verdict = verify_answer_stream(&p, &s, &Slot::new(), 1, &padded).unwrap();
        assert!(verdict.unwrap().contains("not minimal"));
    }

    #[test]
    fn rule_violations_are_reported() {
        let p = parse_lars("b <- diamond a.").unwrap();
        let s = parse_stream_text("0: a\n1: \n").unwrap();
        let verdict = verify_answer_stream(&p, &s, &Slot::new(), 1, &s).unwrap();
        assert!(verdict.unwrap().contains("violates"));
    }

    #[test]
    fn input_predicates_may_not_grow() {
        let p = parse_lars("#stream a/0.\nb <- a.").unwrap();
        let s = parse_stream_text("0: \n").unwrap();
        let mut padded = s.clone();
        padded.slot_mut(0).insert(crate::stream::parse_ground_atom("a").unwrap());
        let verdict = verify_answer_stream(&p, &s, &Slot::new(), 0, &padded).unwrap();
        assert!(verdict.unwrap().contains("input predicate"));
    }

    #[test]
    fn oversized_instances_are_refused() {
        let p = parse_lars("box(c(X,Y) <- e(X,Y)).").unwrap();
        let s = parse_stream_text("0: e(1,2) e(2,3) e(3,4) e(4,5)\n1: \n2: \n").unwrap();
        assert!(find_answer_streams(&p, &s, &Slot::new(), 2).is_err());
    }
}
