//! Recursion traces: for every computed key, the linear combination of
//! products of smaller invariants it was assembled from.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::key::InvariantKey;
use crate::rat::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    /// Genus-one absolute invariant of the ambient space via fictitious markings.
    Step1,
    /// Genus-one absolute invariant of the hyperplane via fictitious markings.
    Step2a,
    /// Genus-one degree-1 vanishing.
    Step2b,
    /// One degeneration-of-tangency step at an interior marking.
    Step3,
    /// Genus-one rubber with a bare relative marking: pushforward with alpha^2.
    Step4a,
    /// Genus-zero rubber equals the genus-zero theory of the hyperplane.
    Step4b,
    /// Degree-0 base cases.
    BaseD0,
    TypeI,
    TypeII,
    TypeIII,
    TypeDagger,
    /// Genus-zero boundary term of the tangency recursion.
    Rational,
    ProjectionVanish,
    /// Genus-zero absolute invariants (WDVV, string, divisor, TRR).
    Wdvv,
    /// Insertion degree differs from the virtual dimension.
    Dimension,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Step1 => "Step1",
            Rule::Step2a => "Step2a",
            Rule::Step2b => "Step2b",
            Rule::Step3 => "Step3",
            Rule::Step4a => "Step4a",
            Rule::Step4b => "Step4b",
            Rule::BaseD0 => "BaseD0",
            Rule::TypeI => "TypeI",
            Rule::TypeII => "TypeII",
            Rule::TypeIII => "TypeIII",
            Rule::TypeDagger => "TypeDagger",
            Rule::Rational => "Rational",
            Rule::ProjectionVanish => "ProjectionVanish",
            Rule::Wdvv => "Wdvv",
            Rule::Dimension => "Dimension",
        }
    }
}

/// `coef * prod value(factors)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceTerm {
    pub rule: Rule,
    pub label: String,
    pub coef: Rat,
    pub factors: Vec<InvariantKey>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub rule: Rule,
    /// Present when the value is not a sum of terms (closed forms, WDVV).
    pub leaf_value: Option<Rat>,
    pub terms: Vec<TraceTerm>,
}

impl Derivation {
    pub fn leaf(rule: Rule, value: Rat) -> Derivation {
        Derivation { rule, leaf_value: Some(value), terms: Vec::new() }
    }

    pub fn sum(rule: Rule, terms: Vec<TraceTerm>) -> Derivation {
        Derivation { rule, leaf_value: None, terms }
    }

    pub fn children(&self) -> impl Iterator<Item = &InvariantKey> {
        self.terms.iter().flat_map(|t| t.factors.iter())
    }
}

#[derive(Clone, Debug)]
pub struct TraceNode {
    pub value: Rat,
    /// `None` for values taken from the store without recomputation.
    pub derivation: Option<Derivation>,
}

/// The part of the derivation graph reachable from one root.
#[derive(Clone, Debug)]
pub struct RecursionTrace {
    pub root: InvariantKey,
    pub nodes: BTreeMap<InvariantKey, TraceNode>,
}

impl RecursionTrace {
    pub fn value(&self) -> &Rat {
        &self.nodes[&self.root].value
    }

    /// True when the root came from the store as is.
    pub fn is_empty(&self) -> bool {
        self.nodes.get(&self.root).map_or(true, |n| n.derivation.is_none())
    }

    /// Checks `value = sum coef * prod child values` at every node.
    pub fn replay(&self) -> Result<()> {
        for (key, node) in &self.nodes {
            let Some(der) = &node.derivation else { continue };
            let got = match &der.leaf_value {
                Some(v) => v.clone(),
                None => {
                    let mut s = Rat::zero();
                    for t in &der.terms {
                        let mut p = t.coef.clone();
                        for f in &t.factors {
                            let child = self
                                .nodes
                                .get(f)
                                .ok_or_else(|| Error::Internal(format!("trace misses child {f}")))?;
                            p *= &child.value;
                        }
                        s += p;
                    }
                    s
                }
            };
            if got != node.value {
                return Err(Error::Internal(format!("trace replay at {key}: stored {}, replayed {got}", node.value)));
            }
        }
        Ok(())
    }

    /// Rules used anywhere in the trace, node rules and term rules alike.
    pub fn rules(&self) -> BTreeSet<Rule> {
        let mut out = BTreeSet::new();
        for n in self.nodes.values() {
            if let Some(d) = &n.derivation {
                out.insert(d.rule);
                out.extend(d.terms.iter().map(|t| t.rule));
            }
        }
        out
    }

    /// Indented text; shared subtrees are printed once and referenced after.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut seen = BTreeSet::new();
        self.render_node(&self.root, 0, None, &mut seen, &mut out);
        out
    }

    fn render_node(
        &self,
        key: &InvariantKey,
        depth: usize,
        via: Option<&TraceTerm>,
        seen: &mut BTreeSet<InvariantKey>,
        out: &mut String,
    ) {
        let pad = "  ".repeat(depth);
        let node = &self.nodes[key];
        let _ = write!(out, "{pad}{key} = {}", node.value);
        if let Some(t) = via {
            let _ = write!(out, "  [{} {} coef {}]", t.rule.name(), t.label, t.coef);
        }
        let Some(der) = &node.derivation else {
            out.push_str("  (stored)\n");
            return;
        };
        if !seen.insert(key.clone()) {
            out.push_str("  (see above)\n");
            return;
        }
        let _ = writeln!(out, "  <{}>", der.rule.name());
        for t in &der.terms {
            if t.factors.is_empty() {
                let _ = writeln!(out, "{pad}  {} {} coef {}", t.rule.name(), t.label, t.coef);
            }
            for f in &t.factors {
                self.render_node(f, depth + 1, Some(t), seen, out);
            }
        }
    }
}
