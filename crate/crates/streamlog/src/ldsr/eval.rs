//! Incremental evaluation: one stratified fixpoint per time point over the
//! stream read so far, then removal of temporary conclusions before the next
//! time point arrives.

use super::ground::{GroundKind, GroundLdsrRule, GroundLiteral};
use super::{check_stratified, ground_program, LdsrProgram};
use crate::atoms::{Const, GroundAtom, PredKind};
use crate::error::{Error, Result};
use crate::stream::{observe_slots, Slot, Stream};

/// The evaluation result: the answer stream (whose last slot is the streaming
/// model) and, per time point, the temporary conclusions that were removed
/// when that time point stopped being the newest one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnswerStream {
    pub stream: Stream,
    pub temp_trace: Vec<Slot>,
}

/// The model at the newest time point, temporary conclusions included.
pub fn streaming_model(answer: &AnswerStream) -> &Slot {
    answer.stream.slot(answer.stream.n())
}

/// Does the stream seen so far entail the literal? The newest slot is the
/// last element of `slots`.
pub fn entails(slots: &[&Slot], lit: &GroundLiteral) -> bool {
    let obs = observe_slots(slots, &lit.satom.offsets.0);
    let holds = match lit.satom.kind {
        GroundKind::AtLeast(c) => obs.count_of(&lit.satom.atom) >= c as usize,
        GroundKind::Always => obs.all_contain(&lit.satom.atom),
        GroundKind::Count(c) => obs.count_of(&lit.satom.atom) == c as usize,
    };
    holds == lit.positive
}

pub fn eval_answer_stream(
    program: &LdsrProgram,
    input: &Stream,
    background: &Slot,
) -> Result<AnswerStream> {
    eval_answer_stream_in(program, input, background, &[])
}

/// Like `eval_answer_stream`, but grounds over the given constants on top of
/// those mentioned by the program and inputs. Differential comparisons pass
/// the other side's constants so both programs read the same constant set.
pub fn eval_answer_stream_in(
    program: &LdsrProgram,
    input: &Stream,
    background: &Slot,
    extra: &[Const],
) -> Result<AnswerStream> {
    let strata = check_stratified(program)?;
    check_inputs(program, input, background)?;

    let mut universe = program.constants();
    universe.extend(input.constants());
    universe.extend(background.iter().flat_map(|a| a.args.iter().cloned()));
    universe.extend(extra.iter().cloned());

    let mut ground = ground_program(program, &universe);
    for b in background {
        ground.push(GroundLdsrRule { temp: false, head: b.clone(), body: Vec::new() });
    }

    // Bucket rules by the stratum of their head predicate. Predicates that
    // only occur in the input have no rules and need no bucket.
    let mut buckets: Vec<Vec<&GroundLdsrRule>> = vec![Vec::new(); strata.num_levels.max(1)];
    for r in &ground {
        let level = strata.level.get(&r.head.pred).copied().unwrap_or(0);
        buckets[level].push(r);
    }

    let mut out_slots: Vec<Slot> = Vec::new();
    let mut temp_trace: Vec<Slot> = Vec::new();
    let n = input.n();
    for i in 0..=n {
        let mut model: Slot = input.slot(i).clone();
        for bucket in &buckets {
            loop {
                let view: Vec<&Slot> = out_slots.iter().chain(std::iter::once(&model)).collect();
                let additions: Vec<GroundAtom> = bucket
                    .iter()
                    .filter(|r| !model.contains(&r.head))
                    .filter(|r| r.body.iter().all(|l| entails(&view, l)))
                    .map(|r| r.head.clone())
                    .collect();
                if additions.is_empty() {
                    break;
                }
                model.extend(additions);
            }
        }
        if i < n {
            let (kept, dropped) = strip_temporaries(&ground, &out_slots, &model, input.slot(i));
            out_slots.push(kept);
            temp_trace.push(dropped);
        } else {
            out_slots.push(model);
            temp_trace.push(Slot::new());
        }
    }

    Ok(AnswerStream { stream: Stream::new(out_slots), temp_trace })
}

/// An atom at the newest time point is permanent if it arrived on the input
/// or some non-`#temp` rule concludes it with a body the full model entails.
fn strip_temporaries(
    ground: &[GroundLdsrRule],
    prefix: &[Slot],
    model: &Slot,
    input_slot: &Slot,
) -> (Slot, Slot) {
    let view: Vec<&Slot> = prefix.iter().chain(std::iter::once(model)).collect();
    let mut kept = Slot::new();
    let mut dropped = Slot::new();
    for a in model {
        let permanent = input_slot.contains(a)
            || ground.iter().any(|r| {
                !r.temp && &r.head == a && r.body.iter().all(|l| entails(&view, l))
            });
        if permanent {
            kept.insert(a.clone());
        } else {
            dropped.insert(a.clone());
        }
    }
    (kept, dropped)
}

fn check_inputs(program: &LdsrProgram, input: &Stream, background: &Slot) -> Result<()> {
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
