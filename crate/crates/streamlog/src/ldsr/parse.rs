//! Parser for the incremental dialect.
//!
//! ```text
//! #stream onLane/3.
//! inNetwork(V) :- onLane(V,X,Y).
//! #temp appears(V) :- onLane(V,X,Y), not inNetwork(V) in {1}.
//! alarm :- breach always in [2], crossing count N in {0,2}, not quiet.
//! ```
//!
//! `not`, `at`, `least`, `always`, `in` and `count` are reserved words.

use super::{CountTerm, LdsrProgram, LdsrRule, Literal, Offsets, StreamingAtom, StreamingKind};
use crate::atoms::{Atom, Const, PredKind, Term};
use crate::error::Result;
use crate::lex::{lex, Cursor, Tok};
use std::collections::BTreeSet;

const RESERVED: &[&str] = &["not", "at", "least", "always", "in", "count"];

pub fn parse_ldsr(text: &str) -> Result<LdsrProgram> {
    let mut cur = Cursor::new(lex(text)?);
    let mut rules = Vec::new();
    let mut decls = Vec::new();
    while !cur.at_eof() {
        match cur.peek() {
            Tok::Hash(word) if word == "stream" || word == "background" => {
                let kind = if word == "stream" { PredKind::Stream } else { PredKind::Background };
                cur.bump();
                let name = pred_name(&mut cur)?;
                cur.expect(&Tok::Slash)?;
                let arity = cur.expect_nat()?;
                cur.expect(&Tok::Dot)?;
                decls.push((name, arity as usize, kind));
            }
            _ => rules.push(parse_rule(&mut cur)?),
        }
    }
    LdsrProgram::new(rules, decls)
}

fn parse_rule(cur: &mut Cursor) -> Result<LdsrRule> {
    let temp = match cur.peek() {
        Tok::Hash(word) if word == "temp" => {
            cur.bump();
            true
        }
        Tok::Hash(word) => return cur.err(format!("unknown directive `#{word}`")),
        _ => false,
    };
    let head = parse_atom(cur)?;
    let mut body = Vec::new();
    if matches!(cur.peek(), Tok::ColonDash) {
        cur.bump();
        loop {
            body.push(parse_literal(cur)?);
            if matches!(cur.peek(), Tok::Comma) {
                cur.bump();
            } else {
                break;
            }
        }
    }
    cur.expect(&Tok::Dot)?;
    Ok(LdsrRule { temp, head, body })
}

fn parse_literal(cur: &mut Cursor) -> Result<Literal> {
    let positive = !cur.eat_word("not");
    let satom = parse_streaming_atom(cur)?;
    Ok(Literal { positive, satom })
}

fn parse_streaming_atom(cur: &mut Cursor) -> Result<StreamingAtom> {
    let atom = parse_atom(cur)?;
    let kind;
    match cur.peek() {
        Tok::Ident(w) if w == "at" => {
            cur.bump();
            cur.expect_word("least")?;
            let c = cur.expect_nat()?;
            kind = StreamingKind::AtLeast(c);
        }
        Tok::Ident(w) if w == "always" => {
            cur.bump();
            kind = StreamingKind::Always;
        }
        Tok::Ident(w) if w == "count" => {
            cur.bump();
            let term = match cur.peek() {
                Tok::Nat(n) => {
                    let n = *n;
                    cur.bump();
                    CountTerm::Value(n)
                }
                Tok::Var(v) => {
                    let v = v.clone();
                    cur.bump();
                    CountTerm::Var(v)
                }
                other => return cur.err(format!("expected a count bound, found {other}")),
            };
            kind = StreamingKind::Count(term);
        }
        Tok::Ident(w) if w == "in" => {
            cur.bump();
            let offsets = parse_offsets(cur)?;
            return Ok(StreamingAtom { atom, kind: StreamingKind::AtLeast(1), offsets });
        }
        _ => return Ok(StreamingAtom::bare(atom)),
    }
    cur.expect_word("in")?;
    let offsets = parse_offsets(cur)?;
    Ok(StreamingAtom { atom, kind, offsets })
}

fn parse_offsets(cur: &mut Cursor) -> Result<Offsets> {
    match cur.peek() {
        Tok::LBracket => {
            cur.bump();
            let w = cur.expect_nat()?;
            cur.expect(&Tok::RBracket)?;
            Ok(Offsets::window(w))
        }
        Tok::LBrace => {
            cur.bump();
            let mut set = BTreeSet::new();
            loop {
                set.insert(cur.expect_nat()?);
                if matches!(cur.peek(), Tok::Comma) {
                    cur.bump();
                } else {
                    break;
                }
            }
            cur.expect(&Tok::RBrace)?;
            Ok(Offsets(set))
        }
        other => cur.err(format!("expected an offset set `{{...}}` or window `[w]`, found {other}")),
    }
}

fn pred_name(cur: &mut Cursor) -> Result<String> {
    let (line, col) = cur.here();
    let name = cur.expect_ident()?;
    if RESERVED.contains(&name.as_str()) {
        return Err(crate::error::Error::Parse {
            line,
            col,
            msg: format!("`{name}` is a reserved word"),
        });
    }
    Ok(name)
}

fn parse_atom(cur: &mut Cursor) -> Result<Atom> {
    let pred = pred_name(cur)?;
    let mut args = Vec::new();
    if matches!(cur.peek(), Tok::LParen) {
        cur.bump();
        loop {
            args.push(parse_term(cur)?);
            if matches!(cur.peek(), Tok::Comma) {
                cur.bump();
            } else {
                break;
            }
        }
        cur.expect(&Tok::RParen)?;
    }
    Ok(Atom { pred, args })
}

fn parse_term(cur: &mut Cursor) -> Result<Term> {
    match cur.peek() {
        Tok::Var(v) => {
            let v = v.clone();
            cur.bump();
            Ok(Term::Var(v))
        }
        Tok::Nat(n) => {
            let n = *n;
            cur.bump();
            Ok(Term::Const(Const::Nat(n)))
        }
        Tok::Ident(_) => Ok(Term::Const(Const::Sym(pred_name(cur)?))),
        other => cur.err(format!("expected a term, found {other}")),
    }
}
