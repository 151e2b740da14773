//! Ground and non-ground atoms shared by both language frontends.
//!
//! Constants are either natural numbers or lowercase symbols. Variables start
//! with an uppercase letter. The canonical printed form of an atom contains no
//! whitespace: `pred(arg1,arg2)`.

use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

/// A constant: a natural number or a symbolic name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Const {
    Nat(u64),
    Sym(String),
}

impl Const {
    pub fn sym(s: &str) -> Const {
        Const::Sym(s.to_string())
    }
}

impl fmt::Display for Const {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Const::Nat(n) => write!(f, "{n}"),
            Const::Sym(s) => write!(f, "{s}"),
        }
    }
}

/// A term: a constant or a variable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Term {
    Const(Const),
    Var(String),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn sym(name: &str) -> Term {
        Term::Const(Const::sym(name))
    }

    pub fn nat(n: u64) -> Term {
        Term::Const(Const::Nat(n))
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(c) => write!(f, "{c}"),
            Term::Var(v) => write!(f, "{v}"),
        }
    }
}

/// A possibly non-ground atom.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Atom {
    pub pred: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: &str, args: Vec<Term>) -> Atom {
        Atom { pred: pred.to_string(), args }
    }

    pub fn prop(pred: &str) -> Atom {
        Atom::new(pred, vec![])
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(|t| matches!(t, Term::Const(_)))
    }

    pub fn to_ground(&self) -> Option<GroundAtom> {
        let mut args = Vec::with_capacity(self.args.len());
        for t in &self.args {
            match t {
                Term::Const(c) => args.push(c.clone()),
                Term::Var(_) => return None,
            }
        }
        Some(GroundAtom { pred: self.pred.clone(), args })
    }

    /// Variables in argument positions, in order of first occurrence.
    pub fn vars(&self) -> Vec<&str> {
        let mut out = Vec::new();
        for t in &self.args {
            if let Term::Var(v) = t {
                if !out.contains(&v.as_str()) {
                    out.push(v.as_str());
                }
            }
        }
        out
    }

    pub fn apply(&self, subst: &BTreeMap<String, Const>) -> Atom {
        Atom {
            pred: self.pred.clone(),
            args: self
                .args
                .iter()
                .map(|t| match t {
                    Term::Var(v) => match subst.get(v) {
                        Some(c) => Term::Const(c.clone()),
                        None => t.clone(),
                    },
                    Term::Const(_) => t.clone(),
                })
                .collect(),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pred)?;
        if !self.args.is_empty() {
            write!(f, "(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{a}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// A fully ground atom. Ordering is lexicographic on (pred, args), which fixes
/// the canonical printing order everywhere.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct GroundAtom {
    pub pred: String,
    pub args: Vec<Const>,
}

impl GroundAtom {
    pub fn new(pred: &str, args: Vec<Const>) -> GroundAtom {
        GroundAtom { pred: pred.to_string(), args }
    }

    pub fn prop(pred: &str) -> GroundAtom {
        GroundAtom::new(pred, vec![])
    }

    pub fn to_atom(&self) -> Atom {
        Atom {
            pred: self.pred.clone(),
            args: self.args.iter().map(|c| Term::Const(c.clone())).collect(),
        }
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_atom())
    }
}

/// How a predicate receives its atoms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum PredKind {
    /// Extensional, supplied by the input stream.
    Stream,
    /// Extensional, supplied by the static background.
    Background,
    /// Derived by rules.
    Intensional,
}

impl fmt::Display for PredKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PredKind::Stream => write!(f, "stream"),
            PredKind::Background => write!(f, "background"),
            PredKind::Intensional => write!(f, "intensional"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PredicateDecl {
    pub name: String,
    pub arity: usize,
    pub kind: PredKind,
}

/// Predicate declarations for a program, after defaulting: every head
/// predicate not declared otherwise is intensional, every other predicate is
/// stream-extensional.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Signature {
    decls: BTreeMap<String, PredicateDecl>,
}

impl Signature {
    pub fn new() -> Signature {
        Signature::default()
    }

    /// Registers a declaration; declaring the same predicate twice with a
    /// different kind or arity is an error.
    pub fn declare(&mut self, name: &str, arity: usize, kind: PredKind) -> Result<(), String> {
        if let Some(prev) = self.decls.get(name) {
            if prev.arity != arity {
                return Err(format!(
                    "predicate {name} declared with arity {} and {}",
                    prev.arity, arity
                ));
            }
            if prev.kind != kind {
                return Err(format!(
                    "predicate {name} declared both {} and {}",
                    prev.kind, kind
                ));
            }
            return Ok(());
        }
        self.decls.insert(
            name.to_string(),
            PredicateDecl { name: name.to_string(), arity, kind },
        );
        Ok(())
    }

    /// Records a use site, fixing the arity on first sight and checking it on
    /// later ones. `default_kind` applies only if the predicate is new.
    pub fn observe(&mut self, name: &str, arity: usize, default_kind: PredKind) -> Result<(), String> {
        match self.decls.get(name) {
            Some(prev) if prev.arity != arity => Err(format!(
                "predicate {name} used with arity {} but has arity {}",
                arity, prev.arity
            )),
            Some(_) => Ok(()),
            None => self.declare(name, arity, default_kind),
        }
    }

    pub fn kind_of(&self, name: &str) -> Option<PredKind> {
        self.decls.get(name).map(|d| d.kind)
    }

    pub fn arity_of(&self, name: &str) -> Option<usize> {
        self.decls.get(name).map(|d| d.arity)
    }

    pub fn is_intensional(&self, name: &str) -> bool {
        self.kind_of(name) == Some(PredKind::Intensional)
    }

    pub fn is_extensional(&self, name: &str) -> bool {
        matches!(self.kind_of(name), Some(PredKind::Stream) | Some(PredKind::Background))
    }

    pub fn decls(&self) -> impl Iterator<Item = &PredicateDecl> {
        self.decls.values()
    }

    pub fn intensional_preds(&self) -> Vec<&str> {
        self.decls
            .values()
            .filter(|d| d.kind == PredKind::Intensional)
            .map(|d| d.name.as_str())
            .collect()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.decls.contains_key(name)
    }

    pub fn preds(&self) -> Vec<&str> {
        self.decls.keys().map(|s| s.as_str()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atom_printing_has_no_spaces() {
        let a = GroundAtom::new("onLane", vec![Const::sym("veh"), Const::Nat(3)]);
        assert_eq!(a.to_string(), "onLane(veh,3)");
        assert_eq!(GroundAtom::prop("alarm").to_string(), "alarm");
    }

    #[test]
    fn signature_conflicts_are_errors() {
        let mut sig = Signature::new();
        sig.declare("p", 1, PredKind::Stream).unwrap();
        assert!(sig.declare("p", 2, PredKind::Stream).is_err());
        assert!(sig.declare("p", 1, PredKind::Background).is_err());
        sig.declare("p", 1, PredKind::Stream).unwrap();
    }

    #[test]
    fn ground_atom_ordering_is_stable() {
        let a = GroundAtom::new("a", vec![Const::Nat(2)]);
        let b = GroundAtom::new("a", vec![Const::sym("x")]);
        assert!(a < b, "naturals order before symbols");
    }
}
