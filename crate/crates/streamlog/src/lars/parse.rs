//! Parser for the modal language.
//!
//! ```text
//! #stream onLane/3.
//! box(inNetwork(V) <- onLane(V,X,Y)).
//! appears(V) <- wplus[0] at[T] true and at[T] onLane(V,X,Y), not inNetwork(V).
//! irregular <- at[T1] pass and (T1 = T - 1 or T1 = T - 2).
//! ```
//!
//! Binding order, loosest first: `or`, `and`, then the prefix operators
//! `not`, `diamond`, `at[..]`, `wplus[..]`, `reset`. `box` always takes
//! parentheses and may carry an inner rule arrow. Rule bodies are
//! comma-separated formulas.

use super::{ArgExpr, CmpOp, LarsFormula, LarsProgram, LarsRule};
use crate::atoms::{Atom, Const, PredKind, Term};
use crate::error::Result;
use crate::lex::{lex, Cursor, Tok};

const RESERVED: &[&str] =
    &["not", "and", "or", "box", "diamond", "at", "wplus", "reset", "true", "exists"];

pub fn parse_lars(text: &str) -> Result<LarsProgram> {
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
            Tok::Hash(word) => {
                let word = word.clone();
                return cur.err(format!("unknown directive `#{word}`"));
            }
            _ => rules.push(parse_rule(&mut cur)?),
        }
    }
    LarsProgram::new(rules, decls)
}

fn parse_rule(cur: &mut Cursor) -> Result<LarsRule> {
    let head = parse_formula(cur)?;
    let mut body = Vec::new();
    if matches!(cur.peek(), Tok::Arrow) {
        cur.bump();
        loop {
            body.push(parse_formula(cur)?);
            if matches!(cur.peek(), Tok::Comma) {
                cur.bump();
            } else {
                break;
            }
        }
    }
    cur.expect(&Tok::Dot)?;
    Ok(LarsRule { head, body })
}

fn parse_formula(cur: &mut Cursor) -> Result<LarsFormula> {
    let mut f = parse_conjunction(cur)?;
    while cur.eat_word("or") {
        let r = parse_conjunction(cur)?;
        f = LarsFormula::Or(Box::new(f), Box::new(r));
    }
    Ok(f)
}

fn parse_conjunction(cur: &mut Cursor) -> Result<LarsFormula> {
    let mut f = parse_prefixed(cur)?;
    while cur.eat_word("and") {
        let r = parse_prefixed(cur)?;
        f = LarsFormula::And(Box::new(f), Box::new(r));
    }
    Ok(f)
}

fn parse_prefixed(cur: &mut Cursor) -> Result<LarsFormula> {
    match cur.peek() {
        Tok::Ident(w) if w == "not" => {
            cur.bump();
            Ok(LarsFormula::not(parse_prefixed(cur)?))
        }
        Tok::Ident(w) if w == "diamond" => {
            cur.bump();
            Ok(LarsFormula::diamond(parse_prefixed(cur)?))
        }
        Tok::Ident(w) if w == "reset" => {
            cur.bump();
            Ok(LarsFormula::Reset(Box::new(parse_prefixed(cur)?)))
        }
        Tok::Ident(w) if w == "at" => {
            cur.bump();
            cur.expect(&Tok::LBracket)?;
            let e = parse_arg_expr(cur)?;
            cur.expect(&Tok::RBracket)?;
            Ok(LarsFormula::at(e, parse_prefixed(cur)?))
        }
        Tok::Ident(w) if w == "wplus" => {
            cur.bump();
            cur.expect(&Tok::LBracket)?;
            let w = cur.expect_nat()?;
            cur.expect(&Tok::RBracket)?;
            Ok(LarsFormula::window(w, parse_prefixed(cur)?))
        }
        Tok::Ident(w) if w == "box" => {
            cur.bump();
            cur.expect(&Tok::LParen)?;
            let first = parse_formula(cur)?;
            let f = if matches!(cur.peek(), Tok::Arrow) {
                cur.bump();
                let mut premises = Vec::new();
                loop {
                    let part = parse_formula(cur)?;
                    // Commas and `and` are the same conjunction here; flatten
                    // so the printed comma form parses back to this tree.
                    premises.extend(part.conjuncts().into_iter().cloned());
                    if matches!(cur.peek(), Tok::Comma) {
                        cur.bump();
                    } else {
                        break;
                    }
                }
                LarsFormula::implies(LarsFormula::and_of(premises), first)
            } else {
                first
            };
            cur.expect(&Tok::RParen)?;
            Ok(LarsFormula::always(f))
        }
        _ => parse_primary(cur),
    }
}

fn parse_primary(cur: &mut Cursor) -> Result<LarsFormula> {
    match cur.peek() {
        Tok::LParen => {
            cur.bump();
            let f = parse_formula(cur)?;
            cur.expect(&Tok::RParen)?;
            Ok(f)
        }
        Tok::Ident(w) if w == "true" => {
            cur.bump();
            Ok(LarsFormula::True)
        }
        Tok::Var(_) | Tok::Nat(_) => {
            let l = parse_arg_expr(cur)?;
            parse_cmp_tail(cur, l)
        }
        Tok::Ident(_) => {
            if matches!(cur.peek2(), Tok::LParen) {
                return Ok(LarsFormula::atom(parse_atom(cur)?));
            }
            let name = pred_name(cur)?;
            match cur.peek() {
                Tok::Eq | Tok::Neq | Tok::Plus | Tok::Minus => {
                    let base = Term::Const(Const::Sym(name));
                    let offset = parse_offset(cur)?;
                    parse_cmp_tail(cur, ArgExpr { base, offset })
                }
                _ => Ok(LarsFormula::atom(Atom { pred: name, args: Vec::new() })),
            }
        }
        other => cur.err(format!("expected a formula, found {other}")),
    }
}

fn parse_cmp_tail(cur: &mut Cursor, l: ArgExpr) -> Result<LarsFormula> {
    let op = match cur.peek() {
        Tok::Eq => CmpOp::Eq,
        Tok::Neq => CmpOp::Neq,
        other => return cur.err(format!("expected `=` or `!=`, found {other}")),
    };
    cur.bump();
    let r = parse_arg_expr(cur)?;
    Ok(LarsFormula::Cmp(op, l, r))
}

fn parse_arg_expr(cur: &mut Cursor) -> Result<ArgExpr> {
    let base = match cur.peek() {
        Tok::Var(v) => {
            let v = v.clone();
            cur.bump();
            Term::Var(v)
        }
        Tok::Nat(n) => {
            let n = *n;
            cur.bump();
            Term::Const(Const::Nat(n))
        }
        Tok::Ident(_) => Term::Const(Const::Sym(pred_name(cur)?)),
        other => return cur.err(format!("expected a time or data expression, found {other}")),
    };
    let offset = parse_offset(cur)?;
    Ok(ArgExpr { base, offset })
}

fn parse_offset(cur: &mut Cursor) -> Result<i64> {
    match cur.peek() {
        Tok::Plus => {
            cur.bump();
            Ok(cur.expect_nat()? as i64)
        }
        Tok::Minus => {
            cur.bump();
            Ok(-(cur.expect_nat()? as i64))
        }
        _ => Ok(0),
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

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rules_heads_and_operators() {
        let p = parse_lars(
            "#stream onLane/3.\n\
             % vehicles seen anywhere in the window are in the network\n\
             box(inNetwork(V) <- onLane(V,X,Y)).\n\
             appears(V) <- wplus[0] at[T] true and at[T] onLane(V,X,Y), not inNetwork(V).\n\
             at[T-1] early <- at[T] late.\n",
        )
        .unwrap();
        assert_eq!(p.rules.len(), 3);
        assert!(matches!(&p.rules[0].head, LarsFormula::Box(_)));
        assert!(p.rules[0].body.is_empty());
        assert_eq!(p.rules[1].body.len(), 2);
        assert!(matches!(&p.rules[2].head, LarsFormula::At(..)));
    }

    #[test]
    fn or_binds_looser_than_and() {
        let p = parse_lars("h <- a or b and c.").unwrap();
        let LarsFormula::Or(l, r) = &p.rules[0].body[0] else { panic!("or") };
        assert!(matches!(l.as_ref(), LarsFormula::Atom(_)));
        assert!(matches!(r.as_ref(), LarsFormula::And(..)));
        let q = parse_lars("h <- (a or b) and c.").unwrap();
        assert!(matches!(&q.rules[0].body[0], LarsFormula::And(..)));
    }

    #[test]
    fn parses_comparisons_on_both_sides() {
        let p = parse_lars("h <- T1 = T - 1, X != y, 3 = N + 1.").unwrap();
        let LarsFormula::Cmp(CmpOp::Eq, l, r) = &p.rules[0].body[0] else { panic!("cmp") };
        assert_eq!((l.to_string(), r.to_string()), ("T1".into(), "T-1".into()));
        assert!(matches!(&p.rules[0].body[1], LarsFormula::Cmp(CmpOp::Neq, ..)));
        let LarsFormula::Cmp(_, l, r) = &p.rules[0].body[2] else { panic!("cmp") };
        assert_eq!((l.to_string(), r.to_string()), ("3".into(), "N+1".into()));
    }

    #[test]
    fn round_trips_through_printing() {
        let text = "#stream pass/0.\n\
                    box(irregular <- wplus[0] at[T] true, at[T1] pass and (T1 = T-1 or T1 = T-2)).\n\
                    quiet <- not (diamond pass or reset diamond pass).\n";
        let p = parse_lars(text).unwrap();
        let printed = p.to_string();
        let p2 = parse_lars(&printed).unwrap();
        assert_eq!(p, p2, "printed form was: {printed}");
    }

    #[test]
    fn rejects_reserved_words_as_names() {
        assert!(parse_lars("box <- q.").is_err());
        assert!(parse_lars("p(true) <- q.").is_err());
        assert!(parse_lars("h <- at[wplus] p.").is_err());
    }

    #[test]
    fn reports_positions() {
        let err = parse_lars("p <- q\nr.").unwrap_err();
        assert_eq!(err.to_string(), "parse error at line 2, column 1: expected `.`, found `r`");
    }
}
