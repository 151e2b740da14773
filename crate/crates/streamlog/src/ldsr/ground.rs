//! Grounding: data variables range over the constants of program, input and
//! background; counting variables range over 1..=|D|, the only counts a
//! `count` literal over `D` can ever report.

use super::{CountTerm, LdsrProgram, LdsrRule, Literal, Offsets, StreamingKind};
use crate::atoms::{Const, GroundAtom};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroundKind {
    AtLeast(u64),
    Always,
    Count(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundStreamingAtom {
    pub atom: GroundAtom,
    pub kind: GroundKind,
    pub offsets: Offsets,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundLiteral {
    pub positive: bool,
    pub satom: GroundStreamingAtom,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundLdsrRule {
    pub temp: bool,
    pub head: GroundAtom,
    pub body: Vec<GroundLiteral>,
}

pub fn ground_program(program: &LdsrProgram, universe: &BTreeSet<Const>) -> Vec<GroundLdsrRule> {
    let mut out = Vec::new();
    let data_domain: Vec<Const> = universe.iter().cloned().collect();
    for rule in &program.rules {
        ground_rule(rule, &data_domain, &mut out);
    }
    out
}

fn ground_rule(rule: &LdsrRule, data_domain: &[Const], out: &mut Vec<GroundLdsrRule>) {
    // Counting variables get the narrower 1..=|D| domain (intersected when a
    // variable counts in several literals); everything else is data.
    let mut domains: BTreeMap<String, Vec<Const>> = BTreeMap::new();
    let mut count_bound: BTreeMap<&str, u64> = BTreeMap::new();
    for l in &rule.body {
        if let StreamingKind::Count(CountTerm::Var(v)) = &l.satom.kind {
            let bound = l.satom.offsets.len() as u64;
            count_bound
                .entry(v.as_str())
                .and_modify(|b| *b = (*b).min(bound))
                .or_insert(bound);
        }
    }
    let mut all_vars: Vec<String> = Vec::new();
    for v in rule.head.vars() {
        if !all_vars.iter().any(|x| x == v) {
            all_vars.push(v.to_string());
        }
    }
    for l in &rule.body {
        for v in l.satom.vars() {
            if !all_vars.iter().any(|x| x == v) {
                all_vars.push(v.to_string());
            }
        }
    }
    for v in &all_vars {
        let dom = match count_bound.get(v.as_str()) {
            Some(&b) => (1..=b).map(Const::Nat).collect(),
            None => data_domain.to_vec(),
        };
        domains.insert(v.clone(), dom);
    }

    let vars: Vec<&String> = domains.keys().collect();
    let mut subst: BTreeMap<String, Const> = BTreeMap::new();
    enumerate(rule, &vars, 0, &domains, &mut subst, out);
}

fn enumerate(
    rule: &LdsrRule,
    vars: &[&String],
    i: usize,
    domains: &BTreeMap<String, Vec<Const>>,
    subst: &mut BTreeMap<String, Const>,
    out: &mut Vec<GroundLdsrRule>,
) {
    if i == vars.len() {
        out.push(instantiate(rule, subst));
        return;
    }
    let v = vars[i];
    for c in &domains[v] {
        subst.insert(v.clone(), c.clone());
        enumerate(rule, vars, i + 1, domains, subst, out);
    }
    subst.remove(v);
}

fn instantiate(rule: &LdsrRule, subst: &BTreeMap<String, Const>) -> GroundLdsrRule {
    let head = rule.head.apply(subst).to_ground().expect("head variables all bound");
    let body = rule
        .body
        .iter()
        .map(|l| instantiate_literal(l, subst))
        .collect();
    GroundLdsrRule { temp: rule.temp, head, body }
}

fn instantiate_literal(l: &Literal, subst: &BTreeMap<String, Const>) -> GroundLiteral {
    let atom = l.satom.atom.apply(subst).to_ground().expect("body variables all bound");
    let kind = match &l.satom.kind {
        StreamingKind::AtLeast(c) => GroundKind::AtLeast(*c),
        StreamingKind::Always => GroundKind::Always,
        StreamingKind::Count(CountTerm::Value(c)) => GroundKind::Count(*c),
        StreamingKind::Count(CountTerm::Var(v)) => match &subst[v] {
            Const::Nat(c) => GroundKind::Count(*c),
            Const::Sym(_) => unreachable!("counting variables range over naturals"),
        },
    };
    GroundLiteral {
        positive: l.positive,
        satom: GroundStreamingAtom { atom, kind, offsets: Offsets(l.satom.offsets.0.clone()) },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ldsr::parse_ldsr;

    #[test]
    fn counting_variables_range_over_one_to_set_size() {
        let p = parse_ldsr("alarm(N) :- breach count N in {0,2}.").unwrap();
        let ground = ground_program(&p, &BTreeSet::new());
        assert_eq!(ground.len(), 2);
        let counts: Vec<GroundKind> =
            ground.iter().map(|r| r.body[0].satom.kind.clone()).collect();
        assert_eq!(counts, vec![GroundKind::Count(1), GroundKind::Count(2)]);
    }

    #[test]
    fn data_variables_range_over_the_universe() {
        let p = parse_ldsr("p(X) :- q(X).").unwrap();
        let universe: BTreeSet<Const> = [Const::sym("a"), Const::Nat(1)].into_iter().collect();
        let ground = ground_program(&p, &universe);
        assert_eq!(ground.len(), 2);
        let empty = ground_program(&p, &BTreeSet::new());
        assert!(empty.is_empty());
    }

    #[test]
    fn shared_counting_variable_takes_the_tighter_bound() {
        let p = parse_ldsr("p :- q count N in {0,1,2}, r count N in {0,4}.").unwrap();
        let ground = ground_program(&p, &BTreeSet::new());
        assert_eq!(ground.len(), 2);
    }
}
