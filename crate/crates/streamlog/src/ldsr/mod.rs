//! The incremental Datalog dialect: rules over streaming literals
//! (`at least c in D`, `always in D`, `count t in D`), evaluated one time
//! point at a time with temporary-conclusion stripping.

mod eval;
mod ground;
pub mod oracle;
mod parse;

pub use eval::{entails, eval_answer_stream, eval_answer_stream_in, streaming_model, AnswerStream};
pub use ground::{ground_program, GroundKind, GroundLdsrRule, GroundLiteral, GroundStreamingAtom};
pub use parse::parse_ldsr;

use crate::atoms::{Atom, Const, PredKind, Signature, Term};
use crate::depgraph::{stratify, DepEdge, StratTable};
use crate::error::{Error, Result, StratificationError};
use std::collections::BTreeSet;
use std::fmt;

/// Backward offsets `D`: a finite nonempty set of naturals.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Offsets(pub BTreeSet<u64>);

impl Offsets {
    pub fn window(w: u64) -> Offsets {
        Offsets((0..=w).collect())
    }

    pub fn set(ds: &[u64]) -> Offsets {
        Offsets(ds.iter().copied().collect())
    }

    pub fn contains_zero(&self) -> bool {
        self.0.contains(&0)
    }

    pub fn without_zero(&self) -> BTreeSet<u64> {
        self.0.iter().copied().filter(|&d| d != 0).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn is_prefix_range(&self) -> bool {
        let max = *self.0.iter().next_back().unwrap_or(&0);
        self.0.len() as u64 == max + 1
    }
}

impl fmt::Display for Offsets {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() >= 2 && self.is_prefix_range() {
            return write!(f, "[{}]", self.0.iter().next_back().unwrap());
        }
        write!(f, "{{")?;
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, "}}")
    }
}

/// The counting term of `count t in D`: a positive natural or a variable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CountTerm {
    Value(u64),
    Var(String),
}

impl fmt::Display for CountTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CountTerm::Value(c) => write!(f, "{c}"),
            CountTerm::Var(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StreamingKind {
    /// Entailed when the atom holds in at least `c` observed slots.
    AtLeast(u64),
    /// Entailed when the atom holds in every observed slot.
    Always,
    /// Entailed when the atom holds in exactly the given number of slots.
    Count(CountTerm),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StreamingAtom {
    pub atom: Atom,
    pub kind: StreamingKind,
    pub offsets: Offsets,
}

impl StreamingAtom {
    /// The plain-atom reading: holds now.
    pub fn bare(atom: Atom) -> StreamingAtom {
        StreamingAtom { atom, kind: StreamingKind::AtLeast(1), offsets: Offsets::set(&[0]) }
    }

    pub fn is_bare(&self) -> bool {
        self.kind == StreamingKind::AtLeast(1) && self.offsets.0.len() == 1 && self.offsets.contains_zero()
    }

    /// Variables, counting-term variable included.
    pub fn vars(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self.atom.vars();
        if let StreamingKind::Count(CountTerm::Var(v)) = &self.kind {
            if !out.contains(&v.as_str()) {
                out.push(v);
            }
        }
        out
    }
}

impl fmt::Display for StreamingAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_bare() {
            return write!(f, "{}", self.atom);
        }
        match &self.kind {
            StreamingKind::AtLeast(1) => write!(f, "{} in {}", self.atom, self.offsets),
            StreamingKind::AtLeast(c) => write!(f, "{} at least {c} in {}", self.atom, self.offsets),
            StreamingKind::Always => write!(f, "{} always in {}", self.atom, self.offsets),
            StreamingKind::Count(t) => write!(f, "{} count {t} in {}", self.atom, self.offsets),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub positive: bool,
    pub satom: StreamingAtom,
}

impl Literal {
    pub fn pos(satom: StreamingAtom) -> Literal {
        Literal { positive: true, satom }
    }

    pub fn neg(satom: StreamingAtom) -> Literal {
        Literal { positive: false, satom }
    }

    /// Harmless literals may sit in the same stratum as the head they feed;
    /// everything else must be fully derived first.
    pub fn harmless(&self) -> bool {
        self.positive && matches!(self.satom.kind, StreamingKind::AtLeast(_) | StreamingKind::Always)
    }

    pub fn has_count_var(&self) -> bool {
        matches!(self.satom.kind, StreamingKind::Count(CountTerm::Var(_)))
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            write!(f, "not ")?;
        }
        write!(f, "{}", self.satom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LdsrRule {
    /// A `#temp` rule's conclusion holds only at the time point where it
    /// fires; otherwise the conclusion persists into later evaluations.
    pub temp: bool,
    pub head: Atom,
    pub body: Vec<Literal>,
}

impl LdsrRule {
    pub fn is_form2(&self) -> bool {
        self.temp
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty()
    }
}

impl fmt::Display for LdsrRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.temp {
            write!(f, "#temp ")?;
        }
        write!(f, "{}", self.head)?;
        if !self.body.is_empty() {
            write!(f, " :- ")?;
            for (i, l) in self.body.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{l}")?;
            }
        }
        write!(f, ".")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LdsrProgram {
    pub rules: Vec<LdsrRule>,
    pub sig: Signature,
}

impl LdsrProgram {
    /// Validates rules against the declarations: arity agreement, safety,
    /// counting terms at least 1, no rules deriving background predicates.
    /// Undeclared head predicates default to intensional, undeclared body
    /// predicates to stream-extensional.
    pub fn new(rules: Vec<LdsrRule>, declared: Vec<(String, usize, PredKind)>) -> Result<LdsrProgram> {
        let mut sig = Signature::new();
        for (name, arity, kind) in &declared {
            sig.declare(name, *arity, *kind).map_err(Error::Validation)?;
        }
        for r in &rules {
            sig.observe(&r.head.pred, r.head.args.len(), PredKind::Intensional)
                .map_err(Error::Validation)?;
        }
        for r in &rules {
            for l in &r.body {
                sig.observe(&l.satom.atom.pred, l.satom.atom.args.len(), PredKind::Stream)
                    .map_err(Error::Validation)?;
            }
        }

        for (idx, r) in rules.iter().enumerate() {
            if sig.kind_of(&r.head.pred) == Some(PredKind::Background) {
                return Err(Error::Validation(format!(
                    "rule {}: head predicate {} is background-extensional",
                    idx + 1,
                    r.head.pred
                )));
            }
            for l in &r.body {
                if let StreamingKind::AtLeast(c) | StreamingKind::Count(CountTerm::Value(c)) =
                    &l.satom.kind
                {
                    if *c == 0 {
                        return Err(Error::Validation(format!(
                            "rule {}: bound in `{}` must be at least 1",
                            idx + 1,
                            l.satom
                        )));
                    }
                }
                if l.satom.offsets.is_empty() {
                    return Err(Error::Validation(format!(
                        "rule {}: empty offset set in `{}`",
                        idx + 1,
                        l.satom
                    )));
                }
            }
            check_safety(idx, r)?;
        }

        Ok(LdsrProgram { rules, sig })
    }

    pub fn constants(&self) -> BTreeSet<Const> {
        let mut out = BTreeSet::new();
        for r in &self.rules {
            for t in r.head.args.iter().chain(r.body.iter().flat_map(|l| l.satom.atom.args.iter())) {
                if let Term::Const(c) = t {
                    out.insert(c.clone());
                }
            }
        }
        out
    }

    pub fn form2_head_preds(&self) -> BTreeSet<String> {
        self.rules.iter().filter(|r| r.temp).map(|r| r.head.pred.clone()).collect()
    }

    pub fn form1_head_preds(&self) -> BTreeSet<String> {
        self.rules.iter().filter(|r| !r.temp).map(|r| r.head.pred.clone()).collect()
    }
}

impl fmt::Display for LdsrProgram {
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

/// Safety: every variable in the head or in a negative literal must occur in
/// a positive body literal, where a counting-term variable counts as an
/// occurrence in its literal.
fn check_safety(idx: usize, r: &LdsrRule) -> Result<()> {
    let mut bound: BTreeSet<&str> = BTreeSet::new();
    for l in &r.body {
        if l.positive {
            bound.extend(l.satom.vars());
        }
    }
    let mut need: Vec<(&str, String)> = Vec::new();
    for v in r.head.vars() {
        need.push((v, "the head".to_string()));
    }
    for l in &r.body {
        if !l.positive {
            for v in l.satom.vars() {
                need.push((v, format!("`not {}`", l.satom)));
            }
        }
    }
    for (v, place) in need {
        if !bound.contains(v) {
            return Err(Error::Validation(format!(
                "rule {}: unsafe variable {} in {} (no positive occurrence)",
                idx + 1,
                v,
                place
            )));
        }
    }
    Ok(())
}

/// Builds the predicate dependency relation and checks that conclusions can
/// be computed bottom-up: a harmless body literal may share its head's
/// stratum, any other literal's predicate must live strictly below.
pub fn check_stratified(program: &LdsrProgram) -> Result<StratTable> {
    let nodes: BTreeSet<String> = program.sig.preds().iter().map(|s| s.to_string()).collect();
    let mut edges = Vec::new();
    for r in &program.rules {
        for l in &r.body {
            edges.push(DepEdge {
                from: l.satom.atom.pred.clone(),
                to: r.head.pred.clone(),
                strict: !l.harmless(),
            });
        }
    }
    stratify(&nodes, &edges).map_err(|witness| Error::Stratification(StratificationError { witness }))
}
