//! Output profiles for both languages, expressibility verdicts, the
//! bound-prefix stability property, and seeded fragment-constrained program
//! generation driving the differential campaigns.

use crate::atoms::{Atom, Const, GroundAtom, PredKind, Signature, Term};
use crate::error::{Error, Result};
use crate::fragments::{classify_lars_fragments, classify_ldsr_fragments, Fragment};
use crate::lars::{
    check_lars_stratified, eval_answer_stream_lars_in, ArgExpr, LarsFormula, LarsProgram, LarsRule,
};
use crate::ldsr::{
    check_stratified, eval_answer_stream_in, CountTerm, LdsrProgram, LdsrRule, Literal, Offsets,
    StreamingAtom, StreamingKind,
};
use crate::stream::{Slot, Stream};
use crate::transpile::{rho1, rho2, rho3, rho4, rho5, rho6, rho7};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};
use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    Ldsr,
    Lars,
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Language::Ldsr => write!(f, "ldsr"),
            Language::Lars => write!(f, "lars"),
        }
    }
}

impl std::str::FromStr for Language {
    type Err = Error;

    fn from_str(s: &str) -> Result<Language> {
        match s {
            "ldsr" => Ok(Language::Ldsr),
            "lars" => Ok(Language::Lars),
            _ => Err(Error::Config(format!("unknown language {s}, expected ldsr or lars"))),
        }
    }
}

/// Which slots of the output stream are populated relative to the evaluation
/// point: only slot t, every slot up to t, or the whole timeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Atomic,
    Bound,
    Full,
}

impl Profile {
    fn rank(self) -> u8 {
        match self {
            Profile::Atomic => 0,
            Profile::Bound => 1,
            Profile::Full => 2,
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Atomic => write!(f, "atomic"),
            Profile::Bound => write!(f, "bound"),
            Profile::Full => write!(f, "full"),
        }
    }
}

impl std::str::FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Profile> {
        match s {
            "atomic" => Ok(Profile::Atomic),
            "bound" => Ok(Profile::Bound),
            "full" => Ok(Profile::Full),
            _ => Err(Error::Config(format!(
                "unknown profile {s}, expected atomic, bound, or full"
            ))),
        }
    }
}

/// A program tied to the input stream and background set it is read against.
/// Construction checks the extensional kinds: input atoms must use
/// stream-extensional predicates, background atoms background-extensional
/// ones, both at the declared arity.
#[derive(Debug, Clone)]
pub enum LTuple {
    Ldsr { program: LdsrProgram, input: Stream, background: Slot },
    Lars { program: LarsProgram, input: Stream, background: Slot },
}

impl LTuple {
    pub fn ldsr(program: LdsrProgram, input: Stream, background: Slot) -> Result<LTuple> {
        check_extensional_kinds(&program.sig, &input, &background)?;
        Ok(LTuple::Ldsr { program, input, background })
    }

    pub fn lars(program: LarsProgram, input: Stream, background: Slot) -> Result<LTuple> {
        check_extensional_kinds(&program.sig, &input, &background)?;
        Ok(LTuple::Lars { program, input, background })
    }

    pub fn language(&self) -> Language {
        match self {
            LTuple::Ldsr { .. } => Language::Ldsr,
            LTuple::Lars { .. } => Language::Lars,
        }
    }

    pub fn input(&self) -> &Stream {
        match self {
            LTuple::Ldsr { input, .. } | LTuple::Lars { input, .. } => input,
        }
    }

    pub fn background(&self) -> &Slot {
        match self {
            LTuple::Ldsr { background, .. } | LTuple::Lars { background, .. } => background,
        }
    }

    pub fn sig(&self) -> &Signature {
        match self {
            LTuple::Ldsr { program, .. } => &program.sig,
            LTuple::Lars { program, .. } => &program.sig,
        }
    }

    /// Predicates of the program, the input stream, and the background set.
    pub fn pred_universe(&self) -> BTreeSet<String> {
        let mut out: BTreeSet<String> = self.sig().preds().iter().map(|p| p.to_string()).collect();
        out.extend(self.input().preds());
        out.extend(self.background().iter().map(|a| a.pred.clone()));
        out
    }

    /// Constants of the program, the input stream, and the background set.
    pub fn constants(&self) -> BTreeSet<Const> {
        let mut out = match self {
            LTuple::Ldsr { program, .. } => program.constants(),
            LTuple::Lars { program, .. } => program.constants(),
        };
        out.extend(self.input().constants());
        out.extend(self.background().iter().flat_map(|a| a.args.iter().cloned()));
        out
    }
}

fn check_extensional_kinds(sig: &Signature, input: &Stream, background: &Slot) -> Result<()> {
    for a in input.atoms() {
        match sig.kind_of(&a.pred) {
            Some(PredKind::Stream) | None => {}
            Some(kind) => {
                return Err(Error::Validation(format!(
                    "input stream contains {a}, but {} is {kind}",
                    a.pred
                )));
            }
        }
        check_arity(sig, a, "input atom")?;
    }
    for a in background {
        match sig.kind_of(&a.pred) {
            Some(PredKind::Background) | None => {}
            Some(kind) => {
                return Err(Error::Validation(format!(
                    "background contains {a}, but {} is {kind}",
                    a.pred
                )));
            }
        }
        check_arity(sig, a, "background atom")?;
    }
    Ok(())
}

fn check_arity(sig: &Signature, a: &GroundAtom, place: &str) -> Result<()> {
    if let Some(arity) = sig.arity_of(&a.pred) {
        if arity != a.args.len() {
            return Err(Error::Validation(format!(
                "{place} {a} has arity {}, declared {arity}",
                a.args.len()
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileOutput {
    pub profile: Profile,
    pub t: usize,
    pub stream: Stream,
}

/// The three profiles of one evaluation. They overlap, so computing them
/// together lets every call check the coherence conditions.
struct ProfileFamily {
    t: usize,
    atomic: Stream,
    bound: Stream,
    full: Stream,
}

impl ProfileFamily {
    fn pick(self, phi: Profile) -> ProfileOutput {
        let stream = match phi {
            Profile::Atomic => self.atomic,
            Profile::Bound => self.bound,
            Profile::Full => self.full,
        };
        ProfileOutput { profile: phi, t: self.t, stream }
    }
}

fn profile_family(tuple: &LTuple, t: usize, extra: &[Const]) -> Result<ProfileFamily> {
    let n = tuple.input().n();
    if t > n {
        return Err(Error::Eval(format!(
            "evaluation point {t} is outside the stream, which ends at {n}"
        )));
    }
    let (atomic, bound, full) = match tuple {
        LTuple::Ldsr { program, input, background } => {
            let answer =
                eval_answer_stream_in(program, &input.restrict_to_time(t), background, extra)?;
            let mut atomic = Stream::empty(n);
            *atomic.slot_mut(t) = answer.stream.slot(t).clone();
            let mut bound = Stream::empty(n);
            for i in 0..=t {
                *bound.slot_mut(i) = answer.stream.slot(i).clone();
            }
            let mut full = bound.clone();
            for i in t + 1..=n {
                let mut s = input.slot(i).clone();
                s.extend(background.iter().cloned());
                *full.slot_mut(i) = s;
            }
            (atomic, bound, full)
        }
        LTuple::Lars { program, input, background } => {
            let answer = eval_answer_stream_lars_in(program, input, background, t, extra)?;
            let with_b = |i: usize| {
                let mut s = answer.slot(i).clone();
                s.extend(background.iter().cloned());
                s
            };
            let mut atomic = Stream::empty(n);
            *atomic.slot_mut(t) = with_b(t);
            let mut bound = Stream::empty(n);
            for i in 0..=t {
                *bound.slot_mut(i) = with_b(i);
            }
            let mut full = Stream::empty(n);
            for i in 0..=n {
                *full.slot_mut(i) = with_b(i);
            }
            (atomic, bound, full)
        }
    };
    assert_eq!(bound.slot(t), atomic.slot(t), "bound profile must match the atomic slot at {t}");
    for i in 0..=t {
        assert_eq!(full.slot(i), bound.slot(i), "full profile must match the bound slot at {i}");
    }
    Ok(ProfileFamily { t, atomic, bound, full })
}

pub fn profile_output(tuple: &LTuple, t: usize, phi: Profile) -> Result<ProfileOutput> {
    Ok(profile_family(tuple, t, &[])?.pick(phi))
}

fn atoms_as_text<S: Serializer>(
    set: &BTreeSet<GroundAtom>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(set.iter().map(|a| a.to_string()))
}

/// The earliest slot where two output streams disagree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diff {
    pub time: usize,
    #[serde(serialize_with = "atoms_as_text")]
    pub only_left: BTreeSet<GroundAtom>,
    #[serde(serialize_with = "atoms_as_text")]
    pub only_right: BTreeSet<GroundAtom>,
}

fn fmt_atom_set(set: &BTreeSet<GroundAtom>) -> String {
    let parts: Vec<String> = set.iter().map(|a| a.to_string()).collect();
    format!("{{{}}}", parts.join(", "))
}

impl fmt::Display for Diff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "time {}: only left {}, only right {}",
            self.time,
            fmt_atom_set(&self.only_left),
            fmt_atom_set(&self.only_right)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub equal: bool,
    pub first_diff: Option<Diff>,
    /// Whether the comparison was restricted to the source predicates first.
    pub filtered: bool,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let scope = if self.filtered { " after restriction to source predicates" } else { "" };
        match &self.first_diff {
            None => write!(f, "equal{scope}"),
            Some(d) => write!(f, "differ{scope} at {d}"),
        }
    }
}

/// Slot-by-slot comparison, reporting the earliest disagreement. Streams of
/// different lengths are compared as if padded with empty slots.
pub fn first_diff(left: &Stream, right: &Stream) -> Option<Diff> {
    let empty = Slot::new();
    for i in 0..=left.n().max(right.n()) {
        let l = if i <= left.n() { left.slot(i) } else { &empty };
        let r = if i <= right.n() { right.slot(i) } else { &empty };
        let only_left: BTreeSet<GroundAtom> = l.difference(r).cloned().collect();
        let only_right: BTreeSet<GroundAtom> = r.difference(l).cloned().collect();
        if !only_left.is_empty() || !only_right.is_empty() {
            return Some(Diff { time: i, only_left, only_right });
        }
    }
    None
}

/// Compares the two tuples' profile outputs at `t`. Both tuples must share
/// the input stream and background set. Both sides are grounded over the
/// union of the two tuples' constants, so auxiliary constants one program
/// mentions do not skew the other. With `strict` unset, both outputs are
/// restricted to the source tuple's predicates first.
pub fn check_expressibility(
    source: &LTuple,
    target: &LTuple,
    t: usize,
    phi: Profile,
    strict: bool,
) -> Result<Verdict> {
    if source.input() != target.input() || source.background() != target.background() {
        return Err(Error::Validation(
            "expressibility check needs both tuples to share the input stream and background"
                .into(),
        ));
    }
    let mut shared = source.constants();
    shared.extend(target.constants());
    let shared: Vec<Const> = shared.into_iter().collect();
    let mut left = profile_family(source, t, &shared)?.pick(phi).stream;
    let mut right = profile_family(target, t, &shared)?.pick(phi).stream;
    if !strict {
        let keep = source.pred_universe();
        let keep_fn = |p: &str| keep.contains(p);
        left = left.restrict_to_preds(&keep_fn);
        right = right.restrict_to_preds(&keep_fn);
    }
    let diff = first_diff(&left, &right);
    Ok(Verdict { equal: diff.is_none(), first_diff: diff, filtered: !strict })
}

/// Edits of slots after `t` cannot change the bound profile at `t`: applies
/// the mutation, checks it stayed in bounds, and compares the two bound
/// outputs strictly.
pub fn lemma1_property(
    program: &LdsrProgram,
    input: &Stream,
    background: &Slot,
    t: usize,
    mutate: impl FnOnce(&mut Stream),
) -> Result<Verdict> {
    let mut mutated = input.clone();
    mutate(&mut mutated);
    if mutated.n() != input.n() {
        return Err(Error::Validation(format!(
            "mutator changed the stream length from {} to {}",
            input.n() + 1,
            mutated.n() + 1
        )));
    }
    for i in 0..=t.min(input.n()) {
        if mutated.slot(i) != input.slot(i) {
            return Err(Error::Validation(format!(
                "mutator changed slot {i}, but only slots after {t} may change"
            )));
        }
    }
    let left = LTuple::ldsr(program.clone(), input.clone(), background.clone())?;
    let right = LTuple::ldsr(program.clone(), mutated, background.clone())?;
    let l = profile_output(&left, t, Profile::Bound)?.stream;
    let r = profile_output(&right, t, Profile::Bound)?.stream;
    let diff = first_diff(&l, &r);
    Ok(Verdict { equal: diff.is_none(), first_diff: diff, filtered: false })
}

/// Size limits for generated instances. `Default` is the desk scale used by
/// the campaigns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GenBounds {
    pub max_n: usize,
    pub max_constants: usize,
    pub max_predicates: usize,
    pub max_rules: usize,
    pub max_window: u64,
}

impl Default for GenBounds {
    fn default() -> GenBounds {
        GenBounds { max_n: 8, max_constants: 4, max_predicates: 5, max_rules: 6, max_window: 3 }
    }
}

impl GenBounds {
    fn check(&self) -> Result<()> {
        if self.max_n == 0
            || self.max_constants == 0
            || self.max_predicates == 0
            || self.max_rules == 0
            || self.max_window == 0
        {
            return Err(Error::Config("generator bounds must all be positive".into()));
        }
        Ok(())
    }
}

const GEN_BUDGET: usize = 2_000;
const MAX_ARITY: usize = 2;
const MAX_COUNT: u64 = 2;
const DATA_VARS: [&str; 3] = ["X", "Y", "Z"];
const PRED_NAMES: [&str; 10] = ["p", "q", "r", "s", "u", "m", "k", "j", "l", "o"];
const SYM_CONSTS: [&str; 4] = ["x", "y", "z", "w"];

fn pool_item(i: usize) -> Const {
    if i % 2 == 0 {
        Const::Nat((i / 2 + 1) as u64)
    } else {
        Const::sym(SYM_CONSTS[(i / 2) % SYM_CONSTS.len()])
    }
}

#[derive(Debug, Clone)]
pub enum GenProgram {
    Ldsr(LdsrProgram),
    Lars(LarsProgram),
}

impl GenProgram {
    pub fn language(&self) -> Language {
        match self {
            GenProgram::Ldsr(_) => Language::Ldsr,
            GenProgram::Lars(_) => Language::Lars,
        }
    }

    pub fn sig(&self) -> &Signature {
        match self {
            GenProgram::Ldsr(p) => &p.sig,
            GenProgram::Lars(p) => &p.sig,
        }
    }
}

impl fmt::Display for GenProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenProgram::Ldsr(p) => write!(f, "{p}"),
            GenProgram::Lars(p) => write!(f, "{p}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GenInstance {
    pub fragment: Fragment,
    pub seed: u64,
    pub program: GenProgram,
    pub input: Stream,
    pub background: Slot,
}

/// Deterministic per seed: draws a signature, then template-shaped rules for
/// the fragment, and keeps the first candidate the classifier accepts that
/// the evaluator can also run. The input stream and background set are drawn
/// over the accepted signature.
pub fn gen_fragment_instance(
    fragment: Fragment,
    seed: u64,
    bounds: &GenBounds,
) -> Result<GenInstance> {
    bounds.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut program = None;
    for _ in 0..GEN_BUDGET {
        if let Some(p) = try_gen_program(fragment, &mut rng, bounds) {
            program = Some(p);
            break;
        }
    }
    let Some(program) = program else {
        return Err(Error::Config(format!(
            "fragment {fragment} generator accepted 0 of {GEN_BUDGET} candidates for seed {seed}"
        )));
    };
    let (input, background) = gen_inputs(program.sig(), &mut rng, bounds);
    Ok(GenInstance { fragment, seed, program, input, background })
}

fn try_gen_program(
    fragment: Fragment,
    rng: &mut ChaCha8Rng,
    bounds: &GenBounds,
) -> Option<GenProgram> {
    match fragment {
        Fragment::F1 | Fragment::F2 | Fragment::F3 => {
            try_gen_lars(fragment, rng, bounds).map(GenProgram::Lars)
        }
        _ => try_gen_ldsr(fragment, rng, bounds).map(GenProgram::Ldsr),
    }
}

struct SigPlan {
    decls: Vec<(String, usize, PredKind)>,
    consts: Vec<Const>,
}

impl SigPlan {
    fn heads(&self) -> Vec<(String, usize)> {
        self.decls
            .iter()
            .filter(|(_, _, k)| *k == PredKind::Intensional)
            .map(|(n, a, _)| (n.clone(), *a))
            .collect()
    }

    fn pick_body_pred(&self, rng: &mut ChaCha8Rng) -> (String, usize) {
        let ext: Vec<&(String, usize, PredKind)> =
            self.decls.iter().filter(|(_, _, k)| *k != PredKind::Intensional).collect();
        if !ext.is_empty() && rng.gen_bool(0.6) {
            let (n, a, _) = ext[rng.gen_range(0..ext.len())];
            (n.clone(), *a)
        } else {
            let (n, a, _) = &self.decls[rng.gen_range(0..self.decls.len())];
            (n.clone(), *a)
        }
    }
}

fn gen_sig(rng: &mut ChaCha8Rng, bounds: &GenBounds) -> SigPlan {
    let n_preds = rng.gen_range(2..=bounds.max_predicates.max(2));
    let mut decls = Vec::new();
    for i in 0..n_preds {
        let arity = rng.gen_range(0..=MAX_ARITY);
        let kind = match i {
            0 => PredKind::Stream,
            1 => PredKind::Intensional,
            _ => match rng.gen_range(0..10u8) {
                0..=4 => PredKind::Stream,
                5..=7 => PredKind::Intensional,
                _ => PredKind::Background,
            },
        };
        decls.push((PRED_NAMES[i].to_string(), arity, kind));
    }
    let n_consts = rng.gen_range(1..=bounds.max_constants);
    let consts = (0..n_consts).map(pool_item).collect();
    SigPlan { decls, consts }
}

fn gen_args(rng: &mut ChaCha8Rng, arity: usize, vars: &[&str], consts: &[Const]) -> Vec<Term> {
    (0..arity)
        .map(|_| {
            if !vars.is_empty() && rng.gen_bool(0.7) {
                Term::var(vars[rng.gen_range(0..vars.len())])
            } else {
                Term::Const(consts[rng.gen_range(0..consts.len())].clone())
            }
        })
        .collect()
}

fn gen_offsets(rng: &mut ChaCha8Rng, bounds: &GenBounds) -> Offsets {
    let size = rng.gen_range(1..=(bounds.max_window as usize + 1).min(3));
    let mut ds = BTreeSet::new();
    while ds.len() < size {
        ds.insert(rng.gen_range(0..=bounds.max_window));
    }
    Offsets(ds)
}

fn gen_satom(
    rng: &mut ChaCha8Rng,
    atom: Atom,
    allow_count_var: bool,
    count_seq: &mut usize,
    bounds: &GenBounds,
) -> StreamingAtom {
    match rng.gen_range(0..10u8) {
        0..=3 => StreamingAtom::bare(atom),
        4..=5 => StreamingAtom {
            atom,
            kind: StreamingKind::AtLeast(rng.gen_range(1..=MAX_COUNT)),
            offsets: gen_offsets(rng, bounds),
        },
        6..=7 => {
            StreamingAtom { atom, kind: StreamingKind::Always, offsets: gen_offsets(rng, bounds) }
        }
        8 => StreamingAtom {
            atom,
            kind: StreamingKind::Count(CountTerm::Value(rng.gen_range(1..=MAX_COUNT))),
            offsets: gen_offsets(rng, bounds),
        },
        _ if allow_count_var => {
            *count_seq += 1;
            StreamingAtom {
                atom,
                kind: StreamingKind::Count(CountTerm::Var(format!("N{count_seq}"))),
                offsets: gen_offsets(rng, bounds),
            }
        }
        _ => StreamingAtom::bare(atom),
    }
}

fn try_gen_ldsr(
    fragment: Fragment,
    rng: &mut ChaCha8Rng,
    bounds: &GenBounds,
) -> Option<LdsrProgram> {
    let plan = gen_sig(rng, bounds);
    let heads = plan.heads();
    let allow_count_var = matches!(fragment, Fragment::F4 | Fragment::F5);
    let n_rules = rng.gen_range(1..=bounds.max_rules);
    let mut rules = Vec::new();
    let mut count_seq = 0usize;
    for _ in 0..n_rules {
        let temp = match fragment {
            Fragment::F5 | Fragment::F6 => true,
            _ => rng.gen_bool(0.5),
        };
        let mut body = Vec::new();
        let mut positively_bound: Vec<String> = Vec::new();
        for _ in 0..rng.gen_range(0..=2) {
            let (pred, arity) = plan.pick_body_pred(rng);
            let atom = Atom::new(&pred, gen_args(rng, arity, &DATA_VARS, &plan.consts));
            let satom = gen_satom(rng, atom, allow_count_var, &mut count_seq, bounds);
            positively_bound.extend(satom.vars().iter().map(|v| v.to_string()));
            body.push(Literal::pos(satom));
        }
        let bound_refs: Vec<&str> = positively_bound.iter().map(String::as_str).collect();
        for _ in 0..rng.gen_range(0..=1) {
            let (pred, arity) = plan.pick_body_pred(rng);
            let atom = Atom::new(&pred, gen_args(rng, arity, &bound_refs, &plan.consts));
            let satom = gen_satom(rng, atom, false, &mut count_seq, bounds);
            body.push(Literal::neg(satom));
        }
        let (hpred, harity) = &heads[rng.gen_range(0..heads.len())];
        let head = Atom::new(hpred, gen_args(rng, *harity, &bound_refs, &plan.consts));
        rules.push(LdsrRule { temp, head, body });
    }
    let program = LdsrProgram::new(rules, plan.decls.clone()).ok()?;
    if !classify_ldsr_fragments(&program).is_member(fragment) {
        return None;
    }
    check_stratified(&program).ok()?;
    Some(program)
}

fn ref_binder(tv: &str) -> LarsFormula {
    LarsFormula::window(0, LarsFormula::at(ArgExpr::var(tv), LarsFormula::True))
}

fn try_gen_lars(
    fragment: Fragment,
    rng: &mut ChaCha8Rng,
    bounds: &GenBounds,
) -> Option<LarsProgram> {
    let plan = gen_sig(rng, bounds);
    let heads = plan.heads();
    let n_rules = rng.gen_range(1..=bounds.max_rules);
    let mut rules = Vec::new();
    let mut neg_seq = 0usize;
    for _ in 0..n_rules {
        let box_rule = fragment != Fragment::F3 && rng.gen_bool(0.5);
        let n_pos = if box_rule { rng.gen_range(1..=3) } else { rng.gen_range(0..=2) };
        let mut parts = Vec::new();
        let mut uses_ref = false;
        let mut positively_bound: Vec<String> = Vec::new();
        for _ in 0..n_pos {
            let (pred, arity) = plan.pick_body_pred(rng);
            let atom = Atom::new(&pred, gen_args(rng, arity, &DATA_VARS, &plan.consts));
            positively_bound.extend(atom.vars().iter().map(|v| v.to_string()));
            let f = match rng.gen_range(0..4u8) {
                0 => LarsFormula::Atom(atom),
                1 => LarsFormula::window(
                    rng.gen_range(0..=bounds.max_window),
                    LarsFormula::diamond(LarsFormula::Atom(atom)),
                ),
                2 => LarsFormula::window(
                    rng.gen_range(0..=bounds.max_window),
                    LarsFormula::always(LarsFormula::Atom(atom)),
                ),
                _ => {
                    uses_ref = true;
                    let k = rng.gen_range(0..=bounds.max_window) as i64;
                    LarsFormula::at(ArgExpr::var_minus("TP", k), LarsFormula::Atom(atom))
                }
            };
            parts.push(f);
        }
        let bound_refs: Vec<&str> = positively_bound.iter().map(String::as_str).collect();
        for _ in 0..rng.gen_range(0..=1) {
            let (pred, arity) = plan.pick_body_pred(rng);
            let atom = Atom::new(&pred, gen_args(rng, arity, &bound_refs, &plan.consts));
            let f = match rng.gen_range(0..4u8) {
                0 => LarsFormula::Atom(atom),
                1 => LarsFormula::window(
                    rng.gen_range(0..=bounds.max_window),
                    LarsFormula::diamond(LarsFormula::Atom(atom)),
                ),
                2 => LarsFormula::window(
                    rng.gen_range(0..=bounds.max_window),
                    LarsFormula::always(LarsFormula::Atom(atom)),
                ),
                _ => {
                    neg_seq += 1;
                    let k = rng.gen_range(0..=bounds.max_window) as i64;
                    let tv = format!("TN{neg_seq}");
                    LarsFormula::and_of(vec![
                        ref_binder(&tv),
                        LarsFormula::at(ArgExpr::var_minus(&tv, k), LarsFormula::Atom(atom)),
                    ])
                }
            };
            parts.push(LarsFormula::not(f));
        }
        if uses_ref {
            parts.insert(0, ref_binder("TP"));
        }
        let (hpred, harity) = &heads[rng.gen_range(0..heads.len())];
        let head = Atom::new(hpred, gen_args(rng, *harity, &bound_refs, &plan.consts));
        if box_rule {
            let prem = LarsFormula::and_of(parts);
            rules.push(LarsRule {
                head: LarsFormula::always(LarsFormula::implies(prem, LarsFormula::Atom(head))),
                body: Vec::new(),
            });
        } else {
            rules.push(LarsRule { head: LarsFormula::Atom(head), body: parts });
        }
    }
    let program = LarsProgram::new(rules, plan.decls.clone()).ok()?;
    if !classify_lars_fragments(&program).is_member(fragment) {
        return None;
    }
    check_lars_stratified(&program).ok()?;
    Some(program)
}

fn sample_count(rng: &mut ChaCha8Rng) -> usize {
    match rng.gen_range(0..10u8) {
        0..=4 => 0,
        5..=7 => 1,
        _ => 2,
    }
}

fn gen_const_args(rng: &mut ChaCha8Rng, arity: usize, pool: &[Const]) -> Vec<Const> {
    (0..arity).map(|_| pool[rng.gen_range(0..pool.len())].clone()).collect()
}

fn gen_inputs(sig: &Signature, rng: &mut ChaCha8Rng, bounds: &GenBounds) -> (Stream, Slot) {
    let pool: Vec<Const> = (0..bounds.max_constants).map(pool_item).collect();
    let n = rng.gen_range(1..=bounds.max_n);
    let stream_preds: Vec<(String, usize)> = sig
        .decls()
        .filter(|d| d.kind == PredKind::Stream)
        .map(|d| (d.name.clone(), d.arity))
        .collect();
    let mut slots = Vec::new();
    for _ in 0..=n {
        let mut slot = Slot::new();
        for (pred, arity) in &stream_preds {
            for _ in 0..sample_count(rng) {
                slot.insert(GroundAtom::new(pred, gen_const_args(rng, *arity, &pool)));
            }
        }
        slots.push(slot);
    }
    let mut background = Slot::new();
    for d in sig.decls().filter(|d| d.kind == PredKind::Background) {
        for _ in 0..sample_count(rng) {
            background.insert(GroundAtom::new(&d.name, gen_const_args(rng, d.arity, &pool)));
        }
    }
    (Stream::new(slots), background)
}

/// A deterministic edit of the slots after `t`: some are cleared, some gain
/// stream-predicate atoms, the rest stay untouched.
pub fn seeded_mutator(
    seed: u64,
    sig: &Signature,
    bounds: &GenBounds,
    t: usize,
) -> impl Fn(&mut Stream) {
    let preds: Vec<(String, usize)> = sig
        .decls()
        .filter(|d| d.kind == PredKind::Stream)
        .map(|d| (d.name.clone(), d.arity))
        .collect();
    let pool: Vec<Const> = (0..bounds.max_constants.max(1)).map(pool_item).collect();
    move |stream: &mut Stream| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in t + 1..=stream.n() {
            match rng.gen_range(0..3u8) {
                0 => stream.slot_mut(i).clear(),
                1 => {
                    for (pred, arity) in &preds {
                        if rng.gen_bool(0.5) {
                            let args = gen_const_args(&mut rng, *arity, &pool);
                            stream.slot_mut(i).insert(GroundAtom::new(pred, args));
                        }
                    }
                }
                _ => {}
            }
        }
    }
}

/// The supported (source fragment, translation, profile, strictness) rows. A
/// campaign request must stay inside one of them: its fragment included in
/// the row's, its profile no richer, and strict only where the row grants it.
const CAMPAIGN_ROWS: &[(Fragment, u8, Profile, bool)] = &[
    (Fragment::F1, 1, Profile::Atomic, true),
    (Fragment::F2, 2, Profile::Bound, true),
    (Fragment::F3, 3, Profile::Full, true),
    (Fragment::F4, 4, Profile::Bound, false),
    (Fragment::F5, 5, Profile::Full, false),
    (Fragment::F6, 6, Profile::Full, true),
    (Fragment::F7, 7, Profile::Bound, true),
];

pub fn fragment_within(sub: Fragment, sup: Fragment) -> bool {
    use Fragment::*;
    sub == sup
        || matches!(
            (sub, sup),
            (F2, F1) | (F3, F2) | (F3, F1) | (F5, F4) | (F6, F5) | (F6, F4) | (F7, F4)
        )
}

pub fn check_campaign_config(
    fragment: Fragment,
    rho: u8,
    phi: Profile,
    strict: bool,
) -> Result<()> {
    let ok = CAMPAIGN_ROWS.iter().any(|&(row_frag, row_rho, row_phi, row_strict)| {
        row_rho == rho
            && fragment_within(fragment, row_frag)
            && phi.rank() <= row_phi.rank()
            && (row_strict || !strict)
    });
    if ok {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "campaign ({fragment}, rho {rho}, {phi}, {}) is outside the supported rows",
            if strict { "strict" } else { "filtered" }
        )))
    }
}

fn translate_instance(rho: u8, program: &GenProgram) -> Result<GenProgram> {
    match (rho, program) {
        (1, GenProgram::Lars(p)) => rho1(p).map(|t| GenProgram::Ldsr(t.program)),
        (2, GenProgram::Lars(p)) => rho2(p).map(|t| GenProgram::Ldsr(t.program)),
        (3, GenProgram::Lars(p)) => rho3(p).map(|t| GenProgram::Ldsr(t.program)),
        (4, GenProgram::Ldsr(p)) => rho4(p).map(|t| GenProgram::Lars(t.program)),
        (5, GenProgram::Ldsr(p)) => rho5(p).map(|t| GenProgram::Lars(t.program)),
        (6, GenProgram::Ldsr(p)) => rho6(p).map(|t| GenProgram::Lars(t.program)),
        (7, GenProgram::Ldsr(p)) => rho7(p).map(|t| GenProgram::Lars(t.program)),
        (1..=7, _) => Err(Error::Config(format!(
            "rho {rho} does not apply to a {} program",
            program.language()
        ))),
        _ => Err(Error::Config(format!("unknown translation rho {rho}"))),
    }
}

fn tuple_for(program: &GenProgram, input: &Stream, background: &Slot) -> Result<LTuple> {
    match program {
        GenProgram::Ldsr(p) => LTuple::ldsr(p.clone(), input.clone(), background.clone()),
        GenProgram::Lars(p) => LTuple::lars(p.clone(), input.clone(), background.clone()),
    }
}

fn fragment_as_text<S: Serializer>(
    fragment: &Fragment,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(fragment)
}

/// One campaign trial, replayable from the seed alone.
#[derive(Debug, Clone, Serialize)]
pub struct TrialRecord {
    pub seed: u64,
    #[serde(serialize_with = "fragment_as_text")]
    pub fragment: Fragment,
    pub rho: u8,
    pub profile: Profile,
    pub strict: bool,
    pub t_range: (usize, usize),
    pub equal: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failed_at: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diff: Option<Diff>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl fmt::Display for TrialRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.equal {
            return write!(f, "seed {}: pass (t in {}..={})", self.seed, self.t_range.0, self.t_range.1);
        }
        match (&self.error, &self.diff) {
            (Some(e), _) => write!(f, "seed {}: error: {e}", self.seed),
            (None, Some(d)) => write!(
                f,
                "seed {}: diff at t={}: {d}",
                self.seed,
                self.failed_at.unwrap_or(d.time)
            ),
            (None, None) => write!(f, "seed {}: failed", self.seed),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CampaignReport {
    #[serde(serialize_with = "fragment_as_text")]
    pub fragment: Fragment,
    pub rho: u8,
    pub profile: Profile,
    pub strict: bool,
    pub trials: usize,
    pub passed: usize,
    pub records: Vec<TrialRecord>,
}

impl CampaignReport {
    pub fn all_passed(&self) -> bool {
        self.passed == self.trials
    }

    pub fn failures(&self) -> impl Iterator<Item = &TrialRecord> {
        self.records.iter().filter(|r| !r.equal)
    }
}

impl fmt::Display for CampaignReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} via rho {}, {}, {}: {}/{} passed",
            self.fragment,
            self.rho,
            self.profile,
            if self.strict { "strict" } else { "filtered" },
            self.passed,
            self.trials
        )?;
        for r in self.failures() {
            writeln!(f, "  {r}")?;
        }
        Ok(())
    }
}

fn run_trial(
    fragment: Fragment,
    rho: u8,
    phi: Profile,
    strict: bool,
    seed: u64,
    bounds: &GenBounds,
) -> TrialRecord {
    let mut record = TrialRecord {
        seed,
        fragment,
        rho,
        profile: phi,
        strict,
        t_range: (0, 0),
        equal: false,
        failed_at: None,
        diff: None,
        error: None,
    };
    let inst = match gen_fragment_instance(fragment, seed, bounds) {
        Ok(i) => i,
        Err(e) => {
            record.error = Some(e.to_string());
            return record;
        }
    };
    record.t_range = (0, inst.input.n());
    let pair = translate_instance(rho, &inst.program).and_then(|image| {
        let source = tuple_for(&inst.program, &inst.input, &inst.background)?;
        let target = tuple_for(&image, &inst.input, &inst.background)?;
        Ok((source, target))
    });
    let (source, target) = match pair {
        Ok(p) => p,
        Err(e) => {
            record.error = Some(e.to_string());
            return record;
        }
    };
    for t in 0..=inst.input.n() {
        match check_expressibility(&source, &target, t, phi, strict) {
            Ok(v) if v.equal => {}
            Ok(v) => {
                record.failed_at = Some(t);
                record.diff = v.first_diff;
                return record;
            }
            Err(e) => {
                record.failed_at = Some(t);
                record.error = Some(e.to_string());
                return record;
            }
        }
    }
    record.equal = true;
    record
}

fn run_trials(
    fragment: Fragment,
    rho: u8,
    phi: Profile,
    strict: bool,
    trials: usize,
    base_seed: u64,
    bounds: &GenBounds,
) -> Vec<TrialRecord> {
    let threads = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(trials.max(1));
    if threads <= 1 || trials <= 1 {
        return (0..trials)
            .map(|i| run_trial(fragment, rho, phi, strict, base_seed + i as u64, bounds))
            .collect();
    }
    let chunk = (trials + threads - 1) / threads;
    let mut records = Vec::with_capacity(trials);
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for c in 0..threads {
            let lo = c * chunk;
            let hi = trials.min(lo + chunk);
            if lo >= hi {
                break;
            }
            handles.push(scope.spawn(move || {
                (lo..hi)
                    .map(|i| run_trial(fragment, rho, phi, strict, base_seed + i as u64, bounds))
                    .collect::<Vec<TrialRecord>>()
            }));
        }
        for h in handles {
            records.extend(h.join().expect("a trial thread panicked"));
        }
    });
    records
}

/// Runs seeded instances of the fragment through its translation and checks
/// profile equality at every time point. Trials run in parallel; the report
/// lists one record per trial in seed order.
pub fn differential_campaign(
    fragment: Fragment,
    rho: u8,
    phi: Profile,
    strict: bool,
    trials: usize,
    base_seed: u64,
    bounds: &GenBounds,
) -> Result<CampaignReport> {
    check_campaign_config(fragment, rho, phi, strict)?;
    bounds.check()?;
    let records = run_trials(fragment, rho, phi, strict, trials, base_seed, bounds);
    let passed = records.iter().filter(|r| r.equal).count();
    Ok(CampaignReport { fragment, rho, profile: phi, strict, trials, passed, records })
}

pub fn parse_fragment_name(s: &str) -> Result<Fragment> {
    match s.trim().trim_start_matches(['F', 'f']) {
        "1" => Ok(Fragment::F1),
        "2" => Ok(Fragment::F2),
        "3" => Ok(Fragment::F3),
        "4" => Ok(Fragment::F4),
        "5" => Ok(Fragment::F5),
        "6" => Ok(Fragment::F6),
        "7" => Ok(Fragment::F7),
        _ => Err(Error::Config(format!("unknown fragment {s}, expected F1..F7"))),
    }
}
