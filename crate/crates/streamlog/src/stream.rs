//! Streams: finite sequences of sets of ground atoms indexed by time points
//! 0..=n, plus the restriction, observation and window operations both
//! language semantics are built on.

use crate::atoms::{Const, GroundAtom};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

pub type Slot = BTreeSet<GroundAtom>;

/// A stream with time points 0..=n. Always has at least one slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stream {
    slots: Vec<Slot>,
}

impl Stream {
    /// Builds a stream from its slots; an empty vector becomes the single
    /// empty slot at time point 0.
    pub fn new(mut slots: Vec<Slot>) -> Stream {
        if slots.is_empty() {
            slots.push(Slot::new());
        }
        Stream { slots }
    }

    pub fn empty(n: usize) -> Stream {
        Stream { slots: vec![Slot::new(); n + 1] }
    }

    /// The last time point.
    pub fn n(&self) -> usize {
        self.slots.len() - 1
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.iter().all(|s| s.is_empty())
    }

    pub fn slot(&self, i: usize) -> &Slot {
        &self.slots[i]
    }

    pub fn slot_mut(&mut self, i: usize) -> &mut Slot {
        &mut self.slots[i]
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn push_slot(&mut self, slot: Slot) {
        self.slots.push(slot);
    }

    pub fn atoms(&self) -> impl Iterator<Item = &GroundAtom> {
        self.slots.iter().flat_map(|s| s.iter())
    }

    pub fn constants(&self) -> BTreeSet<Const> {
        self.atoms().flat_map(|a| a.args.iter().cloned()).collect()
    }

    pub fn preds(&self) -> BTreeSet<String> {
        self.atoms().map(|a| a.pred.clone()).collect()
    }

    /// Slotwise subset comparison; requires equal length.
    pub fn contained_in(&self, other: &Stream) -> bool {
        self.len() == other.len()
            && self.slots.iter().zip(&other.slots).all(|(a, b)| a.is_subset(b))
    }

    /// The prefix with time points 0..=m. `m` must not exceed `n`.
    pub fn restrict_to_time(&self, m: usize) -> Stream {
        assert!(m <= self.n(), "restriction point {m} beyond last time point {}", self.n());
        Stream { slots: self.slots[..=m].to_vec() }
    }

    /// Keeps only atoms whose predicate satisfies the filter.
    pub fn restrict_to_preds(&self, keep: &dyn Fn(&str) -> bool) -> Stream {
        Stream {
            slots: self
                .slots
                .iter()
                .map(|s| s.iter().filter(|a| keep(&a.pred)).cloned().collect())
                .collect(),
        }
    }

    /// Looks back from the last time point by each offset in `offsets`,
    /// dropping offsets that reach before time point 0. Members keep their
    /// absolute index so repeated slot contents stay distinguishable.
    pub fn backward_observation(&self, offsets: &BTreeSet<u64>) -> ObservationSet<'_> {
        let refs: Vec<&Slot> = self.slots.iter().collect();
        observe_slots(&refs, offsets)
    }

    /// The window of width `w`: observation through offsets 0..=w.
    pub fn window(&self, w: u64) -> ObservationSet<'_> {
        self.backward_observation(&(0..=w).collect())
    }

    /// The substream holding the last `w + 1` slots before `t` (clamped at
    /// time point 0), empty elsewhere.
    pub fn time_window(&self, t: usize, w: u64) -> SubStream {
        assert!(t <= self.n(), "window reference point {t} beyond last time point {}", self.n());
        let lo = t.saturating_sub(w as usize);
        let slots = self
            .slots
            .iter()
            .enumerate()
            .map(|(i, s)| if lo <= i && i <= t { s.clone() } else { Slot::new() })
            .collect();
        SubStream { interval: Some((lo, t)), slots }
    }

    pub fn as_substream(&self) -> SubStream {
        SubStream { interval: Some((0, self.n())), slots: self.slots.clone() }
    }
}

/// A backward observation: the selected slots with their absolute indices,
/// ascending.
#[derive(Debug, Clone)]
pub struct ObservationSet<'a> {
    pub members: Vec<(usize, &'a Slot)>,
}

impl<'a> ObservationSet<'a> {
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// How many selected slots contain the atom.
    pub fn count_of(&self, atom: &GroundAtom) -> usize {
        self.members.iter().filter(|(_, s)| s.contains(atom)).count()
    }

    /// Whether every selected slot contains the atom (vacuously true when no
    /// slot was selected).
    pub fn all_contain(&self, atom: &GroundAtom) -> bool {
        self.members.iter().all(|(_, s)| s.contains(atom))
    }
}

/// Observation over borrowed slots ending at the last element of `slots`.
pub fn observe_slots<'a>(slots: &[&'a Slot], offsets: &BTreeSet<u64>) -> ObservationSet<'a> {
    let n = slots.len() - 1;
    let mut members = Vec::new();
    for &d in offsets.iter().rev() {
        if (d as usize) <= n {
            let i = n - d as usize;
            members.push((i, slots[i]));
        }
    }
    ObservationSet { members }
}

/// A stream that is defined on a consecutive interval (or nowhere) and empty
/// outside it. Carries full-length slots aligned with its parent stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubStream {
    pub interval: Option<(usize, usize)>,
    pub slots: Vec<Slot>,
}

impl SubStream {
    pub fn slot(&self, i: usize) -> &Slot {
        &self.slots[i]
    }

    /// Checks the substream conditions against a parent: equal length, slots
    /// empty outside the interval and slotwise contained inside it.
    pub fn is_substream_of(&self, parent: &Stream) -> bool {
        if self.slots.len() != parent.len() {
            return false;
        }
        for (i, s) in self.slots.iter().enumerate() {
            let inside = self.interval.map_or(false, |(lo, hi)| lo <= i && i <= hi);
            if inside {
                if !s.is_subset(parent.slot(i)) {
                    return false;
                }
            } else if !s.is_empty() {
                return false;
            }
        }
        true
    }
}

// --- Textual formats -------------------------------------------------------
//
// Text form, one slot per line, indices may be sparse and unordered:
//
//     0: onLane(c1,l3,lane) speed(c1,30)
//     2: onLane(c1,l3,lane)
//
// The stream length is fixed by the largest index mentioned; an index with no
// atoms pins the length without adding atoms. Lines starting with `#` and
// blank lines are ignored.

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct FormatError(pub String);

fn err<T>(msg: String) -> Result<T, FormatError> {
    Err(FormatError(msg))
}

/// Parses one ground atom in canonical form: `pred`, `pred(c1,...,ck)`.
pub fn parse_ground_atom(s: &str) -> Result<GroundAtom, FormatError> {
    let s = s.trim();
    let (name, rest) = match s.find('(') {
        None => (s, ""),
        Some(i) => {
            if !s.ends_with(')') {
                return err(format!("atom `{s}`: missing closing parenthesis"));
            }
            (&s[..i], &s[i + 1..s.len() - 1])
        }
    };
    if name.is_empty()
        || !name.chars().next().unwrap().is_ascii_lowercase()
        || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
    {
        return err(format!("atom `{s}`: bad predicate name `{name}`"));
    }
    let mut args = Vec::new();
    if !rest.is_empty() {
        for part in rest.split(',') {
            args.push(parse_const(part.trim())?);
        }
    }
    Ok(GroundAtom::new(name, args))
}

pub fn parse_const(s: &str) -> Result<Const, FormatError> {
    if s.is_empty() {
        return err("empty constant".to_string());
    }
    let first = s.chars().next().unwrap();
    if first.is_ascii_digit() {
        match s.parse::<u64>() {
            Ok(n) => Ok(Const::Nat(n)),
            Err(_) => err(format!("bad numeric constant `{s}`")),
        }
    } else if first.is_ascii_lowercase()
        && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
    {
        Ok(Const::sym(s))
    } else {
        err(format!("bad constant `{s}` (naturals and lowercase symbols only)"))
    }
}

/// Parses the text stream format. Empty input denotes the one-slot empty
/// stream.
pub fn parse_stream_text(text: &str) -> Result<Stream, FormatError> {
    let mut entries: Vec<(usize, Vec<GroundAtom>)> = Vec::new();
    let mut max_idx = 0usize;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((idx_part, atoms_part)) = line.split_once(':') else {
            return err(format!("line {}: expected `<index>: atoms...`", lineno + 1));
        };
        let idx: usize = idx_part
            .trim()
            .parse()
            .map_err(|_| FormatError(format!("line {}: bad time point `{}`", lineno + 1, idx_part.trim())))?;
        let mut atoms = Vec::new();
        for tok in atoms_part.split_whitespace() {
            atoms.push(parse_ground_atom(tok).map_err(|e| FormatError(format!("line {}: {}", lineno + 1, e)))?);
        }
        max_idx = max_idx.max(idx);
        entries.push((idx, atoms));
    }
    let mut slots = vec![Slot::new(); max_idx + 1];
    for (idx, atoms) in entries {
        slots[idx].extend(atoms);
    }
    Ok(Stream::new(slots))
}

pub fn print_stream_text(stream: &Stream) -> String {
    let mut out = String::new();
    for (i, slot) in stream.slots().iter().enumerate() {
        out.push_str(&i.to_string());
        out.push(':');
        for a in slot {
            out.push(' ');
            out.push_str(&a.to_string());
        }
        out.push('\n');
    }
    out
}

#[derive(Serialize, Deserialize)]
struct StreamJson {
    n: usize,
    slots: Vec<Vec<String>>,
}

/// Parses the structured (JSON) stream format: `{"n": 2, "slots": [[...],...]}`
/// with canonical atom strings. The slot list length must be `n + 1`.
pub fn parse_stream_json(text: &str) -> Result<Stream, FormatError> {
    let raw: StreamJson =
        serde_json::from_str(text).map_err(|e| FormatError(format!("bad stream object: {e}")))?;
    if raw.slots.len() != raw.n + 1 {
        return err(format!(
            "stream object: n = {} but {} slots listed",
            raw.n,
            raw.slots.len()
        ));
    }
    let mut slots = Vec::with_capacity(raw.slots.len());
    for atoms in &raw.slots {
        let mut slot = Slot::new();
        for s in atoms {
            slot.insert(parse_ground_atom(s)?);
        }
        slots.push(slot);
    }
    Ok(Stream::new(slots))
}

pub fn print_stream_json(stream: &Stream) -> String {
    let raw = StreamJson {
        n: stream.n(),
        slots: stream
            .slots()
            .iter()
            .map(|s| s.iter().map(|a| a.to_string()).collect())
            .collect(),
    };
    serde_json::to_string(&raw).expect("stream serialization cannot fail")
}

/// Parses a background file: ground atoms separated by whitespace, `#`
/// comment lines allowed.
pub fn parse_background(text: &str) -> Result<Slot, FormatError> {
    let mut out = Slot::new();
    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        for tok in line.split_whitespace() {
            out.insert(parse_ground_atom(tok)?);
        }
    }
    Ok(out)
}

pub fn print_background(background: &Slot) -> String {
    let mut out = String::new();
    for a in background {
        out.push_str(&a.to_string());
        out.push('\n');
    }
    out
}

impl fmt::Display for Stream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", print_stream_text(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ga(s: &str) -> GroundAtom {
        parse_ground_atom(s).unwrap()
    }

    fn stream(slots: &[&[&str]]) -> Stream {
        Stream::new(
            slots
                .iter()
                .map(|atoms| atoms.iter().map(|a| ga(a)).collect())
                .collect(),
        )
    }

    #[test]
    fn backward_observation_drops_out_of_range_offsets() {
        let s = stream(&[&["a"], &["b"], &["a", "b"]]);
        let obs = s.backward_observation(&[0, 1, 5].into_iter().collect());
        let idxs: Vec<usize> = obs.members.iter().map(|(i, _)| *i).collect();
        assert_eq!(idxs, vec![1, 2]);
        assert_eq!(obs.count_of(&ga("b")), 2);
        assert_eq!(obs.count_of(&ga("a")), 1);
    }

    #[test]
    fn observation_counts_indices_not_contents() {
        // Two distinct slots with identical contents still count twice.
        let s = stream(&[&["a"], &["a"]]);
        let obs = s.window(1);
        assert_eq!(obs.count_of(&ga("a")), 2);
    }

    #[test]
    fn window_clamps_at_zero() {
        let s = stream(&[&["a"], &[]]);
        let obs = s.window(7);
        assert_eq!(obs.members.len(), 2);
        assert!(obs.all_contain(&ga("a")) == false);
    }

    #[test]
    fn empty_observation_is_vacuous_for_always() {
        let s = stream(&[&["a"]]);
        let obs = s.backward_observation(&[4].into_iter().collect());
        assert!(obs.is_empty());
        assert!(obs.all_contain(&ga("a")));
        assert_eq!(obs.count_of(&ga("a")), 0);
    }

    #[test]
    fn time_window_interval() {
        let s = stream(&[&["a"], &["b"], &["c"], &["d"]]);
        let w = s.time_window(2, 1);
        assert_eq!(w.interval, Some((1, 2)));
        assert!(w.slot(0).is_empty());
        assert!(w.slot(3).is_empty());
        assert!(w.slot(1).contains(&ga("b")));
        assert!(w.is_substream_of(&s));
    }

    #[test]
    fn time_window_clamps_at_zero() {
        let s = stream(&[&["a"], &["b"], &["c"]]);
        let w = s.time_window(1, 5);
        assert_eq!(w.interval, Some((0, 1)));
    }

    #[test]
    fn restrictions() {
        let s = stream(&[&["a", "q(1)"], &["b"], &["c"]]);
        let pre = s.restrict_to_time(1);
        assert_eq!(pre.n(), 1);
        assert!(pre.slot(0).contains(&ga("a")));
        let only_q = s.restrict_to_preds(&|p| p == "q");
        assert_eq!(only_q.n(), 2);
        assert_eq!(only_q.slot(0).len(), 1);
        assert!(only_q.slot(1).is_empty());
    }

    #[test]
    fn text_format_round_trip() {
        let text = "# comment\n0: onLane(c1,l3) speed(c1,30)\n3:\n1: b\n";
        let s = parse_stream_text(text).unwrap();
        assert_eq!(s.n(), 3);
        assert_eq!(s.slot(0).len(), 2);
        assert!(s.slot(2).is_empty());
        let printed = print_stream_text(&s);
        assert_eq!(parse_stream_text(&printed).unwrap(), s);
    }

    #[test]
    fn empty_text_is_single_empty_slot() {
        let s = parse_stream_text("").unwrap();
        assert_eq!(s.n(), 0);
        assert!(s.is_empty());
    }

    #[test]
    fn json_format_round_trip() {
        let s = parse_stream_text("0: a b(1)\n2: c\n").unwrap();
        let j = print_stream_json(&s);
        assert_eq!(parse_stream_json(&j).unwrap(), s);
        assert!(parse_stream_json("{\"n\": 2, \"slots\": [[]]}").is_err());
    }

    #[test]
    fn atom_parse_rejects_garbage() {
        assert!(parse_ground_atom("Pred(a)").is_err());
        assert!(parse_ground_atom("p(").is_err());
        assert!(parse_ground_atom("p(X)").is_err());
        assert!(parse_ground_atom("p(1,)").is_err());
        assert!(parse_ground_atom("p(00x)").is_err());
    }
}
