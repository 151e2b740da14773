//! Source-to-source translations between the two languages: ρ1–ρ3 map
//! box/plain LARS rules onto permanent/#temp rules, ρ4–ρ7 map back using
//! reference-time binders, witness formulas, and auxiliary predicates.

mod to_lars;
mod to_ldsr;

pub use to_lars::{c_alpha_rules, d_p, g_translate, gdoubleprime_translate, gprime_translate, rho4, rho5, rho6, rho7, sigma};
pub use to_ldsr::{f_translate, rho1, rho2, rho3};

use std::collections::BTreeSet;
use std::fmt;

pub const TEMP_SUFFIX: &str = "__temp";
pub const AUX_PREFIX: &str = "aux__";

/// A translated program with the generated predicate names and a per-rule
/// record of which source rule and helper produced each output rule.
#[derive(Debug, Clone)]
pub struct Translation<P> {
    pub program: P,
    pub aux_predicates: BTreeSet<String>,
    pub provenance: Vec<Provenance>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub output_rule: usize,
    pub source_rule: Option<usize>,
    pub helper: String,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rule {} <- ", self.output_rule + 1)?;
        match self.source_rule {
            Some(s) => write!(f, "source rule {}", s + 1)?,
            None => write!(f, "no single source rule")?,
        }
        write!(f, " via {}", self.helper)
    }
}

/// One auxiliary counting family: base predicate, its arity, and the offset
/// set being counted over.
pub type AuxKey = (String, usize, std::collections::BTreeSet<u64>);

/// Hands out variable names unused by the source rule: T, T1, T2, … for
/// time points and C1, C2, … for everything else.
pub struct FreshVars {
    taken: BTreeSet<String>,
    t: usize,
    c: usize,
}

impl FreshVars {
    pub fn avoiding<I: IntoIterator<Item = String>>(used: I) -> FreshVars {
        FreshVars { taken: used.into_iter().collect(), t: 0, c: 0 }
    }

    pub fn time(&mut self) -> String {
        loop {
            let name = if self.t == 0 { "T".to_string() } else { format!("T{}", self.t) };
            self.t += 1;
            if self.taken.insert(name.clone()) {
                return name;
            }
        }
    }

    pub fn data(&mut self) -> String {
        loop {
            self.c += 1;
            let name = format!("C{}", self.c);
            if self.taken.insert(name.clone()) {
                return name;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_names_skip_what_the_rule_already_uses() {
        let mut fresh = FreshVars::avoiding(["T".to_string(), "T2".to_string(), "C1".to_string()]);
        assert_eq!(fresh.time(), "T1");
        assert_eq!(fresh.time(), "T3");
        assert_eq!(fresh.data(), "C2");
    }
}
