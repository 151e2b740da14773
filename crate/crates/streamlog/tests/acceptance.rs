//! The acceptance gate: one test per criterion, each printing a pass line
//! and enforcing its runtime budget. Run with `--nocapture` to see timings.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::time::{Duration, Instant};
use streamlog::atoms::{Atom, Const, GroundAtom, Term};
use streamlog::fragments::Fragment;
use streamlog::harness::{
    differential_campaign, gen_fragment_instance, lemma1_property, profile_output, seeded_mutator,
    GenBounds, GenProgram, LTuple, Profile,
};
use streamlog::lars::{
    eval_answer_stream_lars, eval_formula, ground_lars, oracle::verify_answer_stream, parse_lars,
    ArgExpr, GroundHead, LarsFormula, LarsProgram, LarsRule, LarsStructure,
};
use streamlog::ldsr::{
    entails, eval_answer_stream, oracle::brute_force_answer_stream, parse_ldsr, streaming_model,
    CountTerm, GroundKind, GroundLiteral, GroundStreamingAtom, Offsets, StreamingAtom,
    StreamingKind,
};
use streamlog::stream::{Slot, Stream};
use streamlog::transpile::{rho2, rho7, sigma, FreshVars};
use streamlog::Error;

fn fixture(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name);
    std::fs::read_to_string(path).expect("fixture reads")
}

fn within(budget: Duration, start: Instant, what: &str) {
    let took = start.elapsed();
    assert!(took <= budget, "{what} took {took:?}, budget {budget:?}");
    println!("{what}: PASS in {took:?}");
}

/// Renames uppercase-initial identifiers to V1, V2, ... in first-occurrence
/// order, so two printed programs compare equal exactly when their rules
/// differ only in variable names.
fn canon_vars(text: &str) -> String {
    let mut names: BTreeMap<String, String> = BTreeMap::new();
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            if c.is_ascii_uppercase() {
                let next = format!("V{}", names.len() + 1);
                out.push_str(names.entry(word).or_insert(next));
            } else {
                out.push_str(&word);
            }
        } else {
            out.push(c);
            i += 1;
        }
    }
    out
}

#[test]
fn criterion_1_worked_example_goldens() {
    let start = Instant::now();

    let traffic = parse_lars(&fixture("traffic.lars")).unwrap();
    let image = rho2(&traffic).unwrap();
    let golden = parse_ldsr(&fixture("traffic_rho2.ldsr")).unwrap();
    assert_eq!(image.program.rules.len(), 3);
    assert_eq!(canon_vars(&image.program.to_string()), canon_vars(&golden.to_string()));
    assert!(image.aux_predicates.is_empty());

    let train = parse_ldsr(&fixture("train.ldsr")).unwrap();
    let image = rho7(&train).unwrap();
    let golden = parse_lars(&fixture("train_rho7.lars")).unwrap();
    assert_eq!(canon_vars(&image.program.to_string()), canon_vars(&golden.to_string()));
    assert!(image.aux_predicates.is_empty());

    within(Duration::from_secs(1), start, "criterion 1 (worked-example goldens)");
}

#[test]
fn criterion_2_streaming_model_and_extensional_rejection() {
    let start = Instant::now();

    let program = parse_ldsr(&fixture("p2.ldsr")).unwrap();
    let a1 = GroundAtom::new("a", vec![Const::Nat(1)]);
    let a2 = GroundAtom::new("a", vec![Const::Nat(2)]);
    let b12 = GroundAtom::new("b", vec![Const::Nat(1), Const::Nat(2)]);
    let mut input = Stream::empty(4);
    for i in 0..=4 {
        input.slot_mut(i).extend([a1.clone(), b12.clone()]);
    }
    let expected: Slot = [a1, a2.clone(), b12].into_iter().collect();
    for tau in 0..=4 {
        let answer =
            eval_answer_stream(&program, &input.restrict_to_time(tau), &Slot::new()).unwrap();
        assert_eq!(streaming_model(&answer), &expected, "streaming model at {tau}");
    }

    let lars_side = parse_lars("#stream a/1.\n#stream b/2.\n").unwrap();
    for tau in 0..=4 {
        let mut candidate = input.clone();
        candidate.slot_mut(tau).insert(a2.clone());
        let rejection =
            verify_answer_stream(&lars_side, &input, &Slot::new(), tau, &candidate).unwrap();
        assert!(rejection.is_some(), "a(2) must be rejected as a novel extensional atom");
    }

    within(Duration::from_secs(1), start, "criterion 2 (streaming model and rejection)");
}

#[test]
fn criterion_3_backward_reference_pair_and_bound_stability() {
    let start = Instant::now();

    let p1 = parse_lars(&fixture("p1.lars")).unwrap();
    let a = GroundAtom::new("a", vec![]);
    let c = GroundAtom::new("c", vec![]);
    for tau in 1..=3usize {
        let mut with_c = Stream::empty(4);
        with_c.slot_mut(tau + 1).insert(c.clone());
        let without_c = Stream::empty(4);

        let tuple = LTuple::lars(p1.clone(), with_c, Slot::new()).unwrap();
        let got = profile_output(&tuple, tau, Profile::Atomic).unwrap();
        assert_eq!(got.stream.slot(tau), &[a.clone()].into_iter().collect());

        let tuple = LTuple::lars(p1.clone(), without_c, Slot::new()).unwrap();
        let got = profile_output(&tuple, tau, Profile::Atomic).unwrap();
        assert!(got.stream.slot(tau).is_empty());
    }

    let bounds = GenBounds::default();
    let fragments = [Fragment::F4, Fragment::F5, Fragment::F6, Fragment::F7];
    let mut checked = 0;
    let mut seed = 0u64;
    while checked < 100 {
        let inst = gen_fragment_instance(fragments[seed as usize % 4], seed, &bounds).unwrap();
        seed += 1;
        let n = inst.input.n();
        if n < 2 {
            continue;
        }
        let tau = 1 + (seed as usize) % 3.min(n - 1);
        let GenProgram::Ldsr(program) = &inst.program else { unreachable!() };
        let verdict = lemma1_property(program, &inst.input, &inst.background, tau, |s| {
            s.slot_mut(tau + 1).clear();
        })
        .unwrap();
        assert!(verdict.equal, "seed {}: emptying slot {} changed the bound output", seed - 1, tau + 1);
        checked += 1;
    }

    within(Duration::from_secs(30), start, "criterion 3 (backward reference and bound stability)");
}

/// All streaming shapes the entailment sweep covers: every nonempty offset
/// set within reach, `at least` up to 3, `always`, and exact counts up to 3.
fn sweep_satoms() -> Vec<(GroundKind, BTreeSet<u64>)> {
    let mut out = Vec::new();
    for bits in 1u32..32 {
        let ds: BTreeSet<u64> = (0..5).filter(|d| bits & (1 << d) != 0).collect();
        for c in 1..=3 {
            out.push((GroundKind::AtLeast(c), ds.clone()));
        }
        out.push((GroundKind::Always, ds.clone()));
        for c in 0..=3 {
            out.push((GroundKind::Count(c), ds.clone()));
        }
    }
    out
}

/// The backward-observation table read off directly: indices n-d for d in D
/// that stay on the timeline, then the kind's condition over how many of
/// those slots contain the atom.
fn table_oracle(slots: &[&Slot], atom: &GroundAtom, kind: &GroundKind, ds: &BTreeSet<u64>) -> bool {
    let n = slots.len() - 1;
    let obs: Vec<usize> = ds.iter().filter(|&&d| d as usize <= n).map(|&d| n - d as usize).collect();
    let hits = obs.iter().filter(|&&i| slots[i].contains(atom)).count();
    match kind {
        GroundKind::AtLeast(c) => hits >= *c as usize,
        GroundKind::Always => hits == obs.len(),
        GroundKind::Count(c) => hits == *c as usize,
    }
}

#[test]
fn criterion_4_entailment_oracle_exhaustive() {
    let start = Instant::now();
    let satoms = sweep_satoms();

    // One probe rule per streaming shape: probeK <- wplus[0] at[T] true,
    // sigma(shape at T). The reference binder pins T to the evaluation point.
    let mut rules = Vec::new();
    for (kind, ds) in &satoms {
        let satom = StreamingAtom {
            atom: Atom::new("p", vec![Term::nat(1)]),
            kind: match kind {
                GroundKind::AtLeast(c) => StreamingKind::AtLeast(*c),
                GroundKind::Always => StreamingKind::Always,
                GroundKind::Count(c) => StreamingKind::Count(CountTerm::Value(*c)),
            },
            offsets: Offsets(ds.clone()),
        };
        let mut fresh = FreshVars::avoiding(["T".to_string()]);
        let binder = LarsFormula::window(0, LarsFormula::at(ArgExpr::var("T"), LarsFormula::True));
        rules.push(LarsRule {
            head: LarsFormula::Atom(Atom::new(&format!("probe{}", rules.len()), vec![])),
            body: vec![binder, sigma(&satom, "T", &mut fresh)],
        });
    }
    let probes = LarsProgram::new(rules, vec![("p".into(), 1, streamlog::atoms::PredKind::Stream)])
        .unwrap();
    let universe: BTreeSet<Const> = [Const::Nat(1), Const::Nat(2)].into();
    let consts: Vec<Const> = universe.iter().cloned().collect();

    let p1 = GroundAtom::new("p", vec![Const::Nat(1)]);
    let p2 = GroundAtom::new("p", vec![Const::Nat(2)]);

    // sigma truth per (n, set of time points carrying the atom), computed by
    // evaluating each probe's ground instances at t = n.
    let mut sigma_memo: BTreeMap<(usize, u32), Vec<bool>> = BTreeMap::new();
    for n in 0..=4usize {
        let ground = ground_lars(&probes, &universe, n);
        for mask in 0u32..(1 << (n + 1)) {
            let mut s = Stream::empty(n);
            for i in 0..=n {
                if mask & (1 << i) != 0 {
                    s.slot_mut(i).insert(p1.clone());
                }
            }
            let empty = Slot::new();
            let st = LarsStructure { stream: &s, background: &empty, universe: &consts };
            let mut truth = vec![false; satoms.len()];
            for rule in &ground {
                let GroundHead::Now(head) = &rule.head else { unreachable!("plain probes") };
                let k: usize = head.pred.strip_prefix("probe").unwrap().parse().unwrap();
                if truth[k] {
                    continue;
                }
                truth[k] = rule.body.iter().all(|f| eval_formula(&st, f, n).unwrap());
            }
            sigma_memo.insert((n, mask), truth);
        }
    }

    // Exhaustive sweep: every stream with n <= 4 and slots over {p(1),p(2)},
    // every shape, both ground atoms. The entailment routine, the table read
    // directly, and the sigma評 evaluation must agree everywhere.
    let mut combos = 0u64;
    for n in 0..=4usize {
        let slots_choices = 4u64.pow(n as u32 + 1);
        for code in 0..slots_choices {
            let mut s = Stream::empty(n);
            let (mut mask1, mut mask2) = (0u32, 0u32);
            let mut c = code;
            for i in 0..=n {
                if c & 1 != 0 {
                    s.slot_mut(i).insert(p1.clone());
                    mask1 |= 1 << i;
                }
                if c & 2 != 0 {
                    s.slot_mut(i).insert(p2.clone());
                    mask2 |= 1 << i;
                }
                c >>= 2;
            }
            let slots: Vec<&Slot> = s.slots().iter().collect();
            let sigmas1 = &sigma_memo[&(n, mask1)];
            let sigmas2 = &sigma_memo[&(n, mask2)];
            for (k, (kind, ds)) in satoms.iter().enumerate() {
                for (atom, sigmas) in [(&p1, sigmas1), (&p2, sigmas2)] {
                    let lit = GroundLiteral {
                        positive: true,
                        satom: GroundStreamingAtom {
                            atom: atom.clone(),
                            kind: kind.clone(),
                            offsets: Offsets(ds.clone()),
                        },
                    };
                    let fast = entails(&slots, &lit);
                    let table = table_oracle(&slots, atom, kind, ds);
                    assert_eq!(fast, table, "entails vs table: {kind:?} in {ds:?} on {code:b}, n {n}");
                    assert_eq!(
                        fast, sigmas[k],
                        "entails vs sigma at T=n: {kind:?} in {ds:?} on {code:b}, n {n}"
                    );
                    combos += 1;
                }
            }
        }
    }
    assert_eq!(combos, 1364 * 248 * 2);

    within(Duration::from_secs(120), start, "criterion 4 (entailment oracle, exhaustive)");
}

#[test]
fn criterion_5_definition_oracle_equivalence() {
    let start = Instant::now();
    let bounds = GenBounds {
        max_n: 3,
        max_constants: 2,
        max_predicates: 3,
        max_rules: 3,
        max_window: 2,
    };

    let ldsr_frags = [Fragment::F4, Fragment::F5, Fragment::F6, Fragment::F7];
    let mut agreed = 0;
    let mut seed = 0u64;
    while agreed < 500 {
        let inst = gen_fragment_instance(ldsr_frags[seed as usize % 4], seed, &bounds).unwrap();
        seed += 1;
        let GenProgram::Ldsr(program) = &inst.program else { unreachable!() };
        let brute = match brute_force_answer_stream(program, &inst.input, &inst.background) {
            Ok(b) => b,
            Err(Error::Eval(msg)) if msg.contains("too large") => continue,
            Err(e) => panic!("brute force failed: {e}"),
        };
        let fast = eval_answer_stream(program, &inst.input, &inst.background).unwrap();
        assert_eq!(fast.stream, brute.stream, "seed {}", seed - 1);
        assert_eq!(fast.temp_trace, brute.temp_trace, "seed {}", seed - 1);
        agreed += 1;
    }

    let lars_frags = [Fragment::F1, Fragment::F2, Fragment::F3];
    let mut verified = 0;
    let mut seed = 0u64;
    while verified < 500 {
        let inst = gen_fragment_instance(lars_frags[seed as usize % 3], seed, &bounds).unwrap();
        seed += 1;
        let GenProgram::Lars(program) = &inst.program else { unreachable!() };
        let t = (seed as usize) % (inst.input.n() + 1);
        let answer = eval_answer_stream_lars(program, &inst.input, &inst.background, t).unwrap();
        let rejection =
            verify_answer_stream(program, &inst.input, &inst.background, t, &answer).unwrap();
        assert_eq!(rejection, None, "seed {} t {t}", seed - 1);
        verified += 1;
    }

    within(Duration::from_secs(300), start, "criterion 5 (definition oracles, 500 + 500)");
}

#[test]
fn criterion_6_differential_campaigns() {
    let start = Instant::now();
    let rows = [
        (Fragment::F1, 1u8, Profile::Atomic, true),
        (Fragment::F2, 2, Profile::Bound, true),
        (Fragment::F3, 3, Profile::Full, true),
        (Fragment::F4, 4, Profile::Bound, false),
        (Fragment::F5, 5, Profile::Full, false),
        (Fragment::F6, 6, Profile::Full, true),
        (Fragment::F7, 7, Profile::Bound, true),
    ];
    for (i, &(fragment, rho, profile, strict)) in rows.iter().enumerate() {
        let report = differential_campaign(
            fragment,
            rho,
            profile,
            strict,
            200,
            1000 + i as u64,
            &GenBounds::default(),
        )
        .unwrap();
        assert!(
            report.all_passed(),
            "campaign row {fragment} via rho {rho}: {} of {} failed:\n{report}",
            report.trials - report.passed,
            report.trials
        );
        println!("  {report}");
    }
    within(Duration::from_secs(600), start, "criterion 6 (seven campaigns, 200 trials each)");
}

#[test]
fn criterion_7_fragment_inclusions() {
    let start = Instant::now();
    let bounds = GenBounds::default();

    let mut lars_count = 0;
    let mut seed = 0u64;
    let lars_frags = [Fragment::F1, Fragment::F2, Fragment::F3];
    while lars_count < 1000 {
        let inst = gen_fragment_instance(lars_frags[seed as usize % 3], seed, &bounds).unwrap();
        seed += 1;
        let GenProgram::Lars(p) = &inst.program else { unreachable!() };
        let v = streamlog::fragments::classify_lars_fragments(p);
        assert!(!v.is_member(Fragment::F3) || v.is_member(Fragment::F2));
        assert!(!v.is_member(Fragment::F2) || v.is_member(Fragment::F1));
        lars_count += 1;
    }

    let mut ldsr_count = 0;
    let mut seed = 0u64;
    let ldsr_frags = [Fragment::F4, Fragment::F5, Fragment::F6, Fragment::F7];
    while ldsr_count < 1000 {
        let inst = gen_fragment_instance(ldsr_frags[seed as usize % 4], seed, &bounds).unwrap();
        seed += 1;
        let GenProgram::Ldsr(p) = &inst.program else { unreachable!() };
        let v = streamlog::fragments::classify_ldsr_fragments(p);
        assert!(!v.is_member(Fragment::F6) || v.is_member(Fragment::F5));
        assert!(!v.is_member(Fragment::F5) || v.is_member(Fragment::F4));
        assert!(!v.is_member(Fragment::F7) || v.is_member(Fragment::F4));
        ldsr_count += 1;
    }

    within(Duration::from_secs(60), start, "criterion 7 (fragment inclusions, 1000 + 1000)");
}

#[test]
fn criterion_8_lemma_1_suite() {
    let start = Instant::now();
    let bounds = GenBounds::default();
    let fragments = [Fragment::F4, Fragment::F5, Fragment::F6, Fragment::F7];
    for seed in 0..500u64 {
        let inst = gen_fragment_instance(fragments[seed as usize % 4], seed, &bounds).unwrap();
        let GenProgram::Ldsr(program) = &inst.program else { unreachable!() };
        let t = (seed as usize) % (inst.input.n() + 1);
        let mutate = seeded_mutator(seed.wrapping_mul(0x9e3779b9), inst.program.sig(), &bounds, t);
        let verdict =
            lemma1_property(program, &inst.input, &inst.background, t, mutate).unwrap();
        assert!(verdict.equal, "seed {seed} t {t}: {verdict}");
    }
    within(Duration::from_secs(120), start, "criterion 8 (lemma-1 suite, 500 cases)");
}
