//! Brute-force reference evaluation for small instances: per time point,
//! enumerate every candidate model of the ground program, keep the minimal
//! models of its reduct, and demand exactly one. No stratification, no
//! fixpoint; this is the chained-model definition taken literally.

use super::eval::{entails, AnswerStream};
use super::ground::GroundLdsrRule;
use super::{ground_program, LdsrProgram};
use crate::atoms::GroundAtom;
use crate::error::{Error, Result};
use crate::stream::{Slot, Stream};
use std::collections::BTreeSet;

const MAX_CANDIDATES: usize = 16;

pub fn brute_force_answer_stream(
    program: &LdsrProgram,
    input: &Stream,
    background: &Slot,
) -> Result<AnswerStream> {
    let mut universe = program.constants();
    universe.extend(input.constants());
    universe.extend(background.iter().flat_map(|a| a.args.iter().cloned()));

    let mut ground = ground_program(program, &universe);
    for b in background {
        ground.push(GroundLdsrRule { temp: false, head: b.clone(), body: Vec::new() });
    }

    let mut out_slots: Vec<Slot> = Vec::new();
    let mut temp_trace: Vec<Slot> = Vec::new();
    let n = input.n();
    for i in 0..=n {
        let base = input.slot(i).clone();
        let model = unique_minimal_model(&ground, &out_slots, &base)?;
        if i < n {
            let (kept, dropped) = strip(&ground, &out_slots, &model, &base);
            out_slots.push(kept);
            temp_trace.push(dropped);
        } else {
            out_slots.push(model);
            temp_trace.push(Slot::new());
        }
    }
    Ok(AnswerStream { stream: Stream::new(out_slots), temp_trace })
}

/// All candidate models extend the input slot by ground rule heads. Returns
/// the single minimal model of the reduct, erroring on zero or several.
fn unique_minimal_model(ground: &[GroundLdsrRule], prefix: &[Slot], base: &Slot) -> Result<Slot> {
    let candidates: Vec<GroundAtom> = ground
        .iter()
        .map(|r| r.head.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .filter(|a| !base.contains(a))
        .collect();
    if candidates.len() > MAX_CANDIDATES {
        return Err(Error::Eval(format!(
            "instance too large for brute force: {} candidate conclusions",
            candidates.len()
        )));
    }

    let mut minimal: Vec<Slot> = Vec::new();
    for mask in 0u32..(1u32 << candidates.len()) {
        let mut model = base.clone();
        for (j, a) in candidates.iter().enumerate() {
            if mask & (1 << j) != 0 {
                model.insert(a.clone());
            }
        }
        if is_model(ground, prefix, &model) && is_minimal(ground, prefix, &model, base) {
            minimal.push(model);
        }
    }
    match minimal.len() {
        1 => Ok(minimal.pop().unwrap()),
        0 => Err(Error::Eval("no minimal model at some time point".to_string())),
        k => Err(Error::Eval(format!("{k} minimal models at some time point"))),
    }
}

fn is_model(ground: &[GroundLdsrRule], prefix: &[Slot], model: &Slot) -> bool {
    let view: Vec<&Slot> = prefix.iter().chain(std::iter::once(model)).collect();
    ground
        .iter()
        .all(|r| !r.body.iter().all(|l| entails(&view, l)) || model.contains(&r.head))
}

/// Minimality with respect to the reduct: no proper submodel (still extending
/// the input slot) satisfies every rule whose body the candidate entails.
fn is_minimal(ground: &[GroundLdsrRule], prefix: &[Slot], model: &Slot, base: &Slot) -> bool {
    let view: Vec<&Slot> = prefix.iter().chain(std::iter::once(model)).collect();
    let reduct: Vec<&GroundLdsrRule> = ground
        .iter()
        .filter(|r| r.body.iter().all(|l| entails(&view, l)))
        .collect();
    let derived: Vec<&GroundAtom> = model.iter().filter(|a| !base.contains(*a)).collect();
    // Every proper subset of the derived part must violate some reduct rule.
    for mask in 0u32..(1u32 << derived.len()) {
        if mask == (1 << derived.len()) - 1 {
            continue;
        }
        let mut smaller = base.clone();
        for (j, a) in derived.iter().enumerate() {
            if mask & (1 << j) != 0 {
                smaller.insert((*a).clone());
            }
        }
        let sub_view: Vec<&Slot> = prefix.iter().chain(std::iter::once(&smaller)).collect();
        let satisfied = reduct
            .iter()
            .all(|r| !r.body.iter().all(|l| entails(&sub_view, l)) || smaller.contains(&r.head));
        if satisfied {
            return false;
        }
    }
    true
}

fn strip(
    ground: &[GroundLdsrRule],
    prefix: &[Slot],
    model: &Slot,
    base: &Slot,
) -> (Slot, Slot) {
    let view: Vec<&Slot> = prefix.iter().chain(std::iter::once(model)).collect();
    let mut kept = Slot::new();
    let mut dropped = Slot::new();
    for a in model {
        let permanent = base.contains(a)
            || ground
                .iter()
                .any(|r| !r.temp && &r.head == a && r.body.iter().all(|l| entails(&view, l)));
        if permanent {
            kept.insert(a.clone());
        } else {
            dropped.insert(a.clone());
        }
    }
    (kept, dropped)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ldsr::{eval_answer_stream, parse_ldsr};
    use crate::stream::parse_stream_text;

    fn agree(program: &str, stream: &str) {
        let p = parse_ldsr(program).unwrap();
        let s = parse_stream_text(stream).unwrap();
        let fast = eval_answer_stream(&p, &s, &Slot::new()).unwrap();
        let slow = brute_force_answer_stream(&p, &s, &Slot::new()).unwrap();
        assert_eq!(fast, slow, "program:\n{program}\nstream:\n{stream}");
    }

    #[test]
    fn agrees_on_hand_picked_programs() {
        agree("p :- q.", "0: q\n2:\n");
        agree("#temp p :- q. r :- p.", "0: q\n1: q\n");
        agree("p :- b. q :- not p.", "0: b\n1:\n");
        agree("alarm :- breach count 2 in [2].", "0: breach\n1:\n2: breach\n");
        agree("seen(N) :- breach count N in [1].", "0: breach\n1: breach\n");
        agree(
            "#temp p :- q in [1]. r :- p in {1}, not q.",
            "0: q\n1:\n2:\n",
        );
    }

    #[test]
    fn rejects_oversized_instances() {
        let p = parse_ldsr("p(X,Y) :- q(X), q(Y).").unwrap();
        let s = parse_stream_text("0: q(1) q(2) q(3) q(4) q(5)\n").unwrap();
        assert!(brute_force_answer_stream(&p, &s, &Slot::new()).is_err());
    }
}
