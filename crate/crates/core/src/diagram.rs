//! Planar link diagrams in PD style: oriented arcs between crossing
//! passages, crossings recording which arcs run over and under.
//!
//! The JSON form of [`PDiagram`] is the interchange format used by the CLI.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One crossing. Arc ids index [`PDiagram::arcs`]; `sign` is `+1` for a
/// right-handed crossing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Crossing {
    pub over_in: usize,
    pub over_out: usize,
    pub under_in: usize,
    pub under_out: usize,
    pub sign: i8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arc {
    /// Position of the owning component in [`PDiagram::components`].
    pub component: usize,
}

/// A component with its arcs listed in orientation order. Arc `k` of the
/// list leaves the `k`-th passage of the component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub label: usize,
    pub arcs: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PDiagram {
    pub crossings: Vec<Crossing>,
    pub arcs: Vec<Arc>,
    pub components: Vec<Component>,
}

/// A component passing through a crossing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Passage {
    pub crossing: usize,
    pub over: bool,
}

impl PDiagram {
    pub fn empty() -> Self {
        PDiagram { crossings: Vec::new(), arcs: Vec::new(), components: Vec::new() }
    }

    /// Assembles a diagram from per-component passage sequences. Every
    /// crossing id in `0..signs.len()` must be passed exactly once over and
    /// once under.
    pub fn from_traces(labels: &[usize], traces: &[Vec<Passage>], signs: &[i8]) -> Result<Self> {
        if labels.len() != traces.len() {
            return Err(Error::MalformedDiagram("label count differs from component count".into()));
        }
        let mut over: Vec<Option<(usize, usize)>> = vec![None; signs.len()];
        let mut under: Vec<Option<(usize, usize)>> = vec![None; signs.len()];
        let mut arcs = Vec::new();
        let mut components = Vec::with_capacity(traces.len());
        for (ci, (trace, &label)) in traces.iter().zip(labels).enumerate() {
            let base = arcs.len();
            let count = trace.len().max(1);
            arcs.extend(std::iter::repeat_n(Arc { component: ci }, count));
            for (j, p) in trace.iter().enumerate() {
                let slot = if p.over { &mut over } else { &mut under };
                let entry = slot.get_mut(p.crossing).ok_or_else(|| {
                    Error::MalformedDiagram(format!("crossing {} out of range", p.crossing))
                })?;
                if entry.is_some() {
                    return Err(Error::MalformedDiagram(format!(
                        "crossing {} passed twice on the same level",
                        p.crossing
                    )));
                }
                let arc_in = base + (j + count - 1) % count;
                let arc_out = base + j;
                *entry = Some((arc_in, arc_out));
            }
            components.push(Component { label, arcs: (base..base + count).collect() });
        }
        let mut crossings = Vec::with_capacity(signs.len());
        for (x, &sign) in signs.iter().enumerate() {
            let (Some((over_in, over_out)), Some((under_in, under_out))) = (over[x], under[x]) else {
                return Err(Error::MalformedDiagram(format!("crossing {x} is not passed twice")));
            };
            if sign != 1 && sign != -1 {
                return Err(Error::MalformedDiagram(format!("crossing {x} has sign {sign}")));
            }
            crossings.push(Crossing { over_in, over_out, under_in, under_out, sign });
        }
        let d = PDiagram { crossings, arcs, components };
        d.validate()?;
        Ok(d)
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn labels(&self) -> Vec<usize> {
        self.components.iter().map(|c| c.label).collect()
    }

    /// Position of the component carrying `label`.
    pub fn component_index(&self, label: usize) -> Result<usize> {
        self.components
            .iter()
            .position(|c| c.label == label)
            .ok_or(Error::UnknownComponent(label))
    }

    /// Checks the arc/crossing incidence invariants.
    pub fn validate(&self) -> Result<()> {
        let na = self.arcs.len();
        let mut outs = vec![0u8; na];
        let mut ins = vec![0u8; na];
        for (x, c) in self.crossings.iter().enumerate() {
            for a in [c.over_in, c.over_out, c.under_in, c.under_out] {
                if a >= na {
                    return Err(Error::MalformedDiagram(format!("crossing {x} references arc {a}")));
                }
            }
            if c.sign != 1 && c.sign != -1 {
                return Err(Error::MalformedDiagram(format!("crossing {x} has sign {}", c.sign)));
            }
            ins[c.over_in] += 1;
            ins[c.under_in] += 1;
            outs[c.over_out] += 1;
            outs[c.under_out] += 1;
        }
        let mut seen = vec![false; na];
        for (ci, comp) in self.components.iter().enumerate() {
            if comp.arcs.is_empty() {
                return Err(Error::MalformedDiagram(format!("component {ci} has no arcs")));
            }
            for &a in &comp.arcs {
                if a >= na || seen[a] || self.arcs[a].component != ci {
                    return Err(Error::MalformedDiagram(format!("arc {a} misassigned")));
                }
                seen[a] = true;
            }
            let free = comp.arcs.len() == 1 && outs[comp.arcs[0]] == 0 && ins[comp.arcs[0]] == 0;
            if !free {
                for &a in &comp.arcs {
                    if outs[a] != 1 || ins[a] != 1 {
                        return Err(Error::MalformedDiagram(format!(
                            "arc {a} is bounded by {} outgoing and {} incoming passages",
                            outs[a], ins[a]
                        )));
                    }
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::MalformedDiagram("arc without component".into()));
        }
        let mut labels = self.labels();
        labels.sort_unstable();
        labels.dedup();
        if labels.len() != self.components.len() {
            return Err(Error::MalformedDiagram("duplicate component labels".into()));
        }
        // Consecutive arcs of a component must be joined through one passage.
        let traces = self.traces_unchecked();
        for (ci, trace) in traces.iter().enumerate() {
            let arcs = &self.components[ci].arcs;
            if trace.len() != arcs.len() && !(trace.is_empty() && arcs.len() == 1) {
                return Err(Error::MalformedDiagram(format!("component {ci} arcs are not cyclic")));
            }
            for (j, p) in trace.iter().enumerate() {
                let c = &self.crossings[p.crossing];
                let expect_in = arcs[(j + arcs.len() - 1) % arcs.len()];
                let got_in = if p.over { c.over_in } else { c.under_in };
                if got_in != expect_in {
                    return Err(Error::MalformedDiagram(format!(
                        "component {ci} is broken at crossing {}",
                        p.crossing
                    )));
                }
            }
        }
        Ok(())
    }

    fn traces_unchecked(&self) -> Vec<Vec<Passage>> {
        let mut leaving: Vec<Option<Passage>> = vec![None; self.arcs.len()];
        for (x, c) in self.crossings.iter().enumerate() {
            leaving[c.over_out] = Some(Passage { crossing: x, over: true });
            leaving[c.under_out] = Some(Passage { crossing: x, over: false });
        }
        self.components
            .iter()
            .map(|comp| comp.arcs.iter().filter_map(|&a| leaving[a]).collect())
            .collect()
    }

    /// Passage sequence of every component, in orientation order. Passage `k`
    /// is the one the component's `k`-th arc leaves from.
    pub fn traces(&self) -> Vec<Vec<Passage>> {
        self.traces_unchecked()
    }

    pub fn signs(&self) -> Vec<i8> {
        self.crossings.iter().map(|c| c.sign).collect()
    }

    /// Component positions meeting at crossing `x`, as `(over, under)`.
    pub fn crossing_components(&self, x: usize) -> (usize, usize) {
        let c = &self.crossings[x];
        (self.arcs[c.over_in].component, self.arcs[c.under_in].component)
    }

    /// Keeps the listed component positions in the given order, dropping
    /// every crossing that involves a removed component.
    pub fn sublink(&self, keep: &[usize]) -> Result<Self> {
        let mut new_pos = vec![None; self.components.len()];
        for (k, &ci) in keep.iter().enumerate() {
            if ci >= self.components.len() || new_pos[ci].is_some() {
                return Err(Error::UnknownComponent(ci));
            }
            new_pos[ci] = Some(k);
        }
        let mut crossing_map = vec![None; self.crossings.len()];
        let mut signs = Vec::new();
        for (x, slot) in crossing_map.iter_mut().enumerate() {
            let (a, b) = self.crossing_components(x);
            if new_pos[a].is_some() && new_pos[b].is_some() {
                *slot = Some(signs.len());
                signs.push(self.crossings[x].sign);
            }
        }
        let traces = self.traces_unchecked();
        let mut new_traces = Vec::with_capacity(keep.len());
        let mut labels = Vec::with_capacity(keep.len());
        for &ci in keep {
            labels.push(self.components[ci].label);
            new_traces.push(
                traces[ci]
                    .iter()
                    .filter_map(|p| crossing_map[p.crossing].map(|c| Passage { crossing: c, over: p.over }))
                    .collect(),
            );
        }
        PDiagram::from_traces(&labels, &new_traces, &signs)
    }

    /// Same diagram with components relabelled `1..=k` in their current order.
    pub fn relabelled(&self) -> Self {
        let mut d = self.clone();
        for (i, c) in d.components.iter_mut().enumerate() {
            c.label = i + 1;
        }
        d
    }

    /// Reflection through the projection plane.
    pub fn mirror(&self) -> Self {
        let mut d = self.clone();
        for c in &mut d.crossings {
            *c = Crossing {
                over_in: c.under_in,
                over_out: c.under_out,
                under_in: c.over_in,
                under_out: c.over_out,
                sign: -c.sign,
            };
        }
        d
    }

    /// Half the signed count of crossings between components at positions `a`, `b`.
    pub fn linking_number(&self, a: usize, b: usize) -> i64 {
        let mut total = 0i64;
        for (x, c) in self.crossings.iter().enumerate() {
            let (o, u) = self.crossing_components(x);
            if (o == a && u == b) || (o == b && u == a) {
                total += c.sign as i64;
            }
        }
        total / 2
    }

    /// Signed self-crossing count of the component at position `a`.
    pub fn writhe(&self, a: usize) -> i64 {
        (0..self.crossings.len())
            .filter(|&x| self.crossing_components(x) == (a, a))
            .map(|x| self.crossings[x].sign as i64)
            .sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("diagram serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let d: PDiagram =
            serde_json::from_str(s).map_err(|e| Error::MalformedDiagram(e.to_string()))?;
        d.validate()?;
        Ok(d)
    }
}
