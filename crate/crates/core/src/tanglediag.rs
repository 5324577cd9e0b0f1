//! Morse-position tangle words in the solid torus and their annular closures.
//!
//! A word acts on `m` strands from top to bottom. `Cross` swaps strands
//! `pos, pos+1`; `Cup` (`U`) joins strands `pos, pos+1` in a local minimum;
//! `Cap` (`A`) opens two new strands at `pos, pos+1` in a local maximum.
//! Closing up joins bottom position `j` to top position `j` along nested
//! return strands on the right-hand side. The axis is a round circle around
//! those return strands; its spanning disk meets the closure exactly at the
//! cut positions.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::diagram::{PDiagram, Passage};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MorseEvent {
    /// `X<pos>+` / `X<pos>-`. Positive means the strand entering at the top
    /// right runs over; with both strands pointing down that is a
    /// right-handed crossing.
    Cross { pos: usize, positive: bool },
    /// `U<pos>`
    Cup { pos: usize },
    /// `A<pos>`
    Cap { pos: usize },
}

impl MorseEvent {
    fn width_after(self, w: usize) -> Option<usize> {
        match self {
            MorseEvent::Cross { pos, .. } => (pos >= 1 && pos < w).then_some(w),
            MorseEvent::Cup { pos } => (pos >= 1 && pos < w).then(|| w - 2),
            MorseEvent::Cap { pos } => (pos >= 1 && pos <= w + 1).then_some(w + 2),
        }
    }

    pub fn mirror(self) -> Self {
        match self {
            MorseEvent::Cross { pos, positive } => MorseEvent::Cross { pos, positive: !positive },
            e => e,
        }
    }
}

impl fmt::Display for MorseEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            MorseEvent::Cross { pos, positive } => write!(f, "X{pos}{}", if positive { '+' } else { '-' }),
            MorseEvent::Cup { pos } => write!(f, "U{pos}"),
            MorseEvent::Cap { pos } => write!(f, "A{pos}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dir {
    Down,
    Up,
}

/// A strand piece between two consecutive events: `(layer, slot)`, both
/// 0-based. Layer `k` sits just above event `k`.
pub type Segment = (usize, usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceStep {
    /// Passing the crossing of event `event`. `tl_br` tells which of the two
    /// strands this is (the one joining top-left to bottom-right or not).
    Cross { event: usize, tl_br: bool, down: bool },
    /// Passing through the cut at `slot`; `down` means leaving the bottom and
    /// re-entering at the top.
    Transit { slot: usize, down: bool },
}

#[derive(Debug, Clone)]
pub struct TracedComponent {
    pub start: Segment,
    pub start_dir: Dir,
    pub steps: Vec<TraceStep>,
}

impl TracedComponent {
    /// Signed number of passes through the cut.
    pub fn transit_sum(&self) -> i64 {
        self.steps
            .iter()
            .map(|s| match s {
                TraceStep::Transit { down: true, .. } => 1,
                TraceStep::Transit { down: false, .. } => -1,
                _ => 0,
            })
            .sum()
    }
}

/// Decomposition of a word's closure into closed components.
#[derive(Debug, Clone)]
pub struct Tracing {
    pub components: Vec<TracedComponent>,
    owner: Vec<Vec<(usize, Dir)>>,
}

impl Tracing {
    /// Component id and traversal direction of a segment.
    pub fn at(&self, seg: Segment) -> Option<(usize, Dir)> {
        self.owner.get(seg.0).and_then(|l| l.get(seg.1)).copied()
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TangleWord {
    width: usize,
    events: Vec<MorseEvent>,
    /// `labels[t]` is the link label of closure component `t` (trace order).
    labels: Vec<usize>,
    /// `reversed[t]`: component `t` is oriented against its trace.
    reversed: Vec<bool>,
    name: Option<String>,
}

/// Where a segment of the old word lands in the rewritten one.
type SegmentMap = Box<dyn Fn(Segment) -> Option<Segment>>;

/// Local isotopy moves on words.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rewrite {
    /// Moves the first event to the end (slides the cut through it).
    Rotate,
    /// Inserts `X<pos>± X<pos>∓` before event `at`.
    InsertR2 { at: usize, pos: usize, positive_first: bool },
    /// Removes a cancelling crossing pair at events `at`, `at + 1`.
    RemoveR2 { at: usize },
}

impl TangleWord {
    /// Validates widths and labels. `labels = None` labels closure components
    /// `1..=n` in trace order.
    pub fn new(
        width: usize,
        events: Vec<MorseEvent>,
        labels: Option<Vec<usize>>,
        name: Option<String>,
    ) -> Result<Self> {
        let mut w = width;
        for (i, e) in events.iter().enumerate() {
            w = e.width_after(w).ok_or_else(|| Error::Parse {
                line: 0,
                event: i + 1,
                msg: format!("{e} does not fit a strand width of {w}"),
            })?;
        }
        if w != width {
            return Err(Error::Parse {
                line: 0,
                event: events.len(),
                msg: format!("final width {w} differs from declared width {width}"),
            });
        }
        let mut t = TangleWord { width, events, labels: Vec::new(), reversed: Vec::new(), name };
        let count = t.trace()?.len();
        let labels = labels.unwrap_or_else(|| (1..=count).collect());
        check_labels(&labels, count)?;
        t.labels = labels;
        t.reversed = vec![false; count];
        Ok(t)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn events(&self) -> &[MorseEvent] {
        &self.events
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn reversed(&self) -> &[bool] {
        &self.reversed
    }

    /// Sets which traced components run against their trace direction.
    pub fn with_reversed(mut self, reversed: Vec<bool>) -> Result<Self> {
        if reversed.len() != self.labels.len() {
            return Err(Error::ParameterMismatch(format!(
                "{} orientation flags for {} components",
                reversed.len(),
                self.labels.len()
            )));
        }
        self.reversed = reversed;
        Ok(self)
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    /// Number of link components of the closure.
    pub fn component_count(&self) -> usize {
        self.labels.len()
    }

    pub fn crossing_count(&self) -> usize {
        self.events.iter().filter(|e| matches!(e, MorseEvent::Cross { .. })).count()
    }

    pub fn layer_widths(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.events.len() + 1);
        let mut w = self.width;
        out.push(w);
        for e in &self.events {
            w = e.width_after(w).expect("validated word");
            out.push(w);
        }
        out
    }

    /// Trace id of the component carrying link label `label`.
    pub fn trace_id(&self, label: usize) -> Result<usize> {
        self.labels.iter().position(|&l| l == label).ok_or(Error::UnknownComponent(label))
    }

    fn step(&self, seg: Segment, dir: Dir) -> (Segment, Dir, Option<TraceStep>) {
        let (layer, s) = seg;
        let last = self.events.len();
        match dir {
            Dir::Down => {
                if layer == last {
                    return ((0, s), Dir::Down, Some(TraceStep::Transit { slot: s, down: true }));
                }
                match self.events[layer] {
                    MorseEvent::Cross { pos, .. } => {
                        let i = pos - 1;
                        if s == i {
                            ((layer + 1, i + 1), dir, Some(TraceStep::Cross { event: layer, tl_br: true, down: true }))
                        } else if s == i + 1 {
                            ((layer + 1, i), dir, Some(TraceStep::Cross { event: layer, tl_br: false, down: true }))
                        } else {
                            ((layer + 1, s), dir, None)
                        }
                    }
                    MorseEvent::Cup { pos } => {
                        let i = pos - 1;
                        if s == i {
                            ((layer, i + 1), Dir::Up, None)
                        } else if s == i + 1 {
                            ((layer, i), Dir::Up, None)
                        } else if s > i + 1 {
                            ((layer + 1, s - 2), dir, None)
                        } else {
                            ((layer + 1, s), dir, None)
                        }
                    }
                    MorseEvent::Cap { pos } => {
                        let i = pos - 1;
                        if s >= i {
                            ((layer + 1, s + 2), dir, None)
                        } else {
                            ((layer + 1, s), dir, None)
                        }
                    }
                }
            }
            Dir::Up => {
                if layer == 0 {
                    return ((last, s), Dir::Up, Some(TraceStep::Transit { slot: s, down: false }));
                }
                let ev = layer - 1;
                match self.events[ev] {
                    MorseEvent::Cross { pos, .. } => {
                        let i = pos - 1;
                        if s == i {
                            ((ev, i + 1), dir, Some(TraceStep::Cross { event: ev, tl_br: false, down: false }))
                        } else if s == i + 1 {
                            ((ev, i), dir, Some(TraceStep::Cross { event: ev, tl_br: true, down: false }))
                        } else {
                            ((ev, s), dir, None)
                        }
                    }
                    MorseEvent::Cup { pos } => {
                        let i = pos - 1;
                        if s >= i {
                            ((ev, s + 2), dir, None)
                        } else {
                            ((ev, s), dir, None)
                        }
                    }
                    MorseEvent::Cap { pos } => {
                        let i = pos - 1;
                        if s == i {
                            ((layer, i + 1), Dir::Down, None)
                        } else if s == i + 1 {
                            ((layer, i), Dir::Down, None)
                        } else if s > i + 1 {
                            ((ev, s - 2), dir, None)
                        } else {
                            ((ev, s), dir, None)
                        }
                    }
                }
            }
        }
    }

    fn trace_one(
        &self,
        start: Segment,
        dir: Dir,
        id: usize,
        owner: &mut [Vec<Option<(usize, Dir)>>],
    ) -> Result<TracedComponent> {
        let mut steps = Vec::new();
        let (mut seg, mut d) = (start, dir);
        let limit = 4 * (owner.iter().map(|l| l.len()).sum::<usize>() + 1);
        for _ in 0..limit {
            let cell = &mut owner[seg.0][seg.1];
            if let Some((other, _)) = *cell {
                if other != id || seg != start {
                    return Err(Error::Internal(format!("segment {seg:?} traced twice")));
                }
            }
            *cell = Some((id, d));
            let (next, nd, step) = self.step(seg, d);
            if let Some(st) = step {
                steps.push(st);
            }
            // Turning at a cup or cap stays in the same layer; those segments
            // are recorded by the next iteration.
            if next == start && nd == dir {
                return Ok(TracedComponent { start, start_dir: dir, steps });
            }
            seg = next;
            d = nd;
        }
        Err(Error::Internal("component trace did not close".into()))
    }

    fn empty_owner(&self) -> Vec<Vec<Option<(usize, Dir)>>> {
        self.layer_widths().into_iter().map(|w| vec![None; w]).collect()
    }

    fn finish(owner: Vec<Vec<Option<(usize, Dir)>>>, components: Vec<TracedComponent>) -> Result<Tracing> {
        let owner = owner
            .into_iter()
            .map(|l| l.into_iter().collect::<Option<Vec<_>>>())
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Internal("strand segment outside every component".into()))?;
        Ok(Tracing { components, owner })
    }

    /// Traces closure components. Components through the cut come first,
    /// ordered by their lowest cut position and oriented downward there; the
    /// rest follow by their first cap, oriented downward along its left strand.
    pub fn trace(&self) -> Result<Tracing> {
        let mut owner = self.empty_owner();
        let mut comps = Vec::new();
        for s in 0..self.width {
            if owner[0][s].is_none() {
                let id = comps.len();
                comps.push(self.trace_one((0, s), Dir::Down, id, &mut owner)?);
            }
        }
        for (k, e) in self.events.iter().enumerate() {
            if let MorseEvent::Cap { pos } = *e {
                let seg = (k + 1, pos - 1);
                if owner[seg.0][seg.1].is_none() {
                    let id = comps.len();
                    comps.push(self.trace_one(seg, Dir::Down, id, &mut owner)?);
                }
            }
        }
        Self::finish(owner, comps)
    }

    /// Traces from prescribed starting segments and directions (one per
    /// component); fails if they miss part of the closure.
    pub fn trace_from(&self, starts: &[(Segment, Dir)]) -> Result<Tracing> {
        let mut owner = self.empty_owner();
        let mut comps = Vec::with_capacity(starts.len());
        for (id, &(seg, dir)) in starts.iter().enumerate() {
            if owner.get(seg.0).and_then(|l| l.get(seg.1)).is_none() {
                return Err(Error::Internal(format!("start segment {seg:?} out of range")));
            }
            comps.push(self.trace_one(seg, dir, id, &mut owner)?);
        }
        Self::finish(owner, comps)
    }

    /// Signed number of passes of component `label` through the cut disk.
    pub fn axis_linking(&self, label: usize) -> Result<i64> {
        let t = self.trace_id(label)?;
        let s = self.trace()?.components[t].transit_sum();
        Ok(if self.reversed[t] { -s } else { s })
    }

    /// Annular closure in the solid torus.
    pub fn annular_closure(&self) -> Result<PDiagram> {
        let tracing = self.trace()?;
        self.closure_diagram(&tracing, &self.labels, &self.reversed, false)
    }

    /// Closure plus the axis as the last component.
    pub fn insert_axis(&self) -> Result<MarkedLink> {
        let tracing = self.trace()?;
        let diagram = self.closure_diagram(&tracing, &self.labels, &self.reversed, true)?;
        let n = self.labels.len();
        let mut axis_linking = vec![0i64; n];
        for (t, c) in tracing.components.iter().enumerate() {
            let s = c.transit_sum();
            axis_linking[self.labels[t] - 1] = if self.reversed[t] { -s } else { s };
        }
        Ok(MarkedLink { diagram, axis: n, axis_linking })
    }

    /// Builds the planar diagram of the closure for a given tracing.
    /// Components appear sorted by `labels`; with `axis` the axis is appended
    /// with label `max + 1`. Components flagged in `reversed` run backwards.
    pub fn closure_diagram(
        &self,
        tracing: &Tracing,
        labels: &[usize],
        reversed: &[bool],
        axis: bool,
    ) -> Result<PDiagram> {
        if labels.len() != tracing.len() || reversed.len() != tracing.len() {
            return Err(Error::Internal("label count differs from traced components".into()));
        }
        let mut cross_id = vec![usize::MAX; self.events.len()];
        let mut ncross = 0;
        for (k, e) in self.events.iter().enumerate() {
            if matches!(e, MorseEvent::Cross { .. }) {
                cross_id[k] = ncross;
                ncross += 1;
            }
        }
        let m = self.width;
        // Axis crossings in the axis's own order: bottom edge (axis over)
        // crossing slots m-1..0, then top edge (axis under) crossing 0..m-1.
        let bottom_id = |s: usize| ncross + (m - 1 - s);
        let top_id = |s: usize| ncross + m + s;
        let total = if axis { ncross + 2 * m } else { ncross };
        let mut signs = vec![0i8; total];
        // Direction of the tl_br and tr_bl strand at each crossing.
        let mut strand_dirs: Vec<[Option<bool>; 2]> = vec![[None, None]; self.events.len()];

        let mut traces: Vec<Vec<Passage>> = Vec::with_capacity(tracing.len());
        for (cid, comp) in tracing.components.iter().enumerate() {
            let rev = reversed[cid];
            let mut tr = Vec::new();
            for step in &comp.steps {
                match *step {
                    TraceStep::Cross { event, tl_br, down } => {
                        let down = down != rev;
                        let MorseEvent::Cross { positive, .. } = self.events[event] else {
                            unreachable!("crossing step at non-crossing event")
                        };
                        strand_dirs[event][usize::from(!tl_br)] = Some(down);
                        let over = if positive { !tl_br } else { tl_br };
                        tr.push(Passage { crossing: cross_id[event], over });
                    }
                    TraceStep::Transit { slot, down } => {
                        let down = down != rev;
                        if axis {
                            signs[bottom_id(slot)] = if down { 1 } else { -1 };
                            signs[top_id(slot)] = if down { 1 } else { -1 };
                            let b = Passage { crossing: bottom_id(slot), over: false };
                            let t = Passage { crossing: top_id(slot), over: true };
                            if down != rev {
                                tr.extend([b, t]);
                            } else {
                                tr.extend([t, b]);
                            }
                        }
                    }
                }
            }
            if rev {
                tr.reverse();
            }
            traces.push(tr);
        }
        for (k, e) in self.events.iter().enumerate() {
            if let MorseEvent::Cross { positive, .. } = *e {
                let [Some(a_down), Some(b_down)] = strand_dirs[k] else {
                    return Err(Error::Internal(format!("crossing at event {k} not fully traced")));
                };
                // Direction vectors (x right, y up).
                let tl_br = if a_down { (1, -1) } else { (-1, 1) };
                let tr_bl = if b_down { (-1, -1) } else { (1, 1) };
                let (o, u) = if positive { (tr_bl, tl_br) } else { (tl_br, tr_bl) };
                let cross = o.0 * u.1 - o.1 * u.0;
                signs[cross_id[k]] = if cross > 0 { 1 } else { -1 };
            }
        }

        let mut order: Vec<usize> = (0..tracing.len()).collect();
        order.sort_by_key(|&t| labels[t]);
        let mut out_labels: Vec<usize> = order.iter().map(|&t| labels[t]).collect();
        let mut out_traces: Vec<Vec<Passage>> = order.iter().map(|&t| traces[t].clone()).collect();
        if axis {
            let mut tr = Vec::with_capacity(2 * m);
            for s in (0..m).rev() {
                tr.push(Passage { crossing: bottom_id(s), over: true });
            }
            for s in 0..m {
                tr.push(Passage { crossing: top_id(s), over: false });
            }
            out_traces.push(tr);
            out_labels.push(out_labels.iter().copied().max().unwrap_or(0) + 1);
        }
        PDiagram::from_traces(&out_labels, &out_traces, &signs)
    }

    /// Crossing signs flipped. With [`insert_axis`](Self::insert_axis) this is
    /// the mirror image of the marked link with the axis reversed, since the
    /// axis keeps its over/under convention.
    pub fn mirror(&self) -> Self {
        TangleWord {
            width: self.width,
            events: self.events.iter().map(|e| e.mirror()).collect(),
            labels: self.labels.clone(),
            reversed: self.reversed.clone(),
            name: self.name.clone(),
        }
    }

    /// Applies an isotopy move, carrying component labels along.
    pub fn rewrite(&self, mv: Rewrite) -> Result<Self> {
        let old = self.trace()?;
        let widths = self.layer_widths();
        let last = self.events.len();
        let (width, events, map): (usize, Vec<MorseEvent>, SegmentMap) = match mv {
            Rewrite::Rotate => {
                if self.events.is_empty() {
                    return Err(Error::Rewrite("cannot rotate an empty word".into()));
                }
                let mut ev = self.events.clone();
                ev.rotate_left(1);
                (widths[1], ev, Box::new(|(l, s)| (l >= 1).then(|| (l - 1, s))))
            }
            Rewrite::InsertR2 { at, pos, positive_first } => {
                if at > last || pos == 0 || pos >= widths[at] {
                    return Err(Error::Rewrite(format!("no strands {pos}, {} before event {at}", pos + 1)));
                }
                let mut ev = self.events.clone();
                ev.splice(
                    at..at,
                    [
                        MorseEvent::Cross { pos, positive: positive_first },
                        MorseEvent::Cross { pos, positive: !positive_first },
                    ],
                );
                (self.width, ev, Box::new(move |(l, s)| Some(if l <= at { (l, s) } else { (l + 2, s) })))
            }
            Rewrite::RemoveR2 { at } => {
                let pair = self.events.get(at).zip(self.events.get(at + 1));
                match pair {
                    Some((
                        MorseEvent::Cross { pos: p1, positive: s1 },
                        MorseEvent::Cross { pos: p2, positive: s2 },
                    )) if p1 == p2 && s1 != s2 => {}
                    _ => return Err(Error::Rewrite(format!("events {at}, {} are not a cancelling pair", at + 1))),
                }
                let mut ev = self.events.clone();
                ev.drain(at..at + 2);
                (
                    self.width,
                    ev,
                    Box::new(move |(l, s)| {
                        if l <= at {
                            Some((l, s))
                        } else if l >= at + 2 {
                            Some((l - 2, s))
                        } else {
                            None
                        }
                    }),
                )
            }
        };
        let mut fresh = TangleWord::new(width, events, None, self.name.clone())?;
        let new_trace = fresh.trace()?;
        let mut labels = vec![0usize; new_trace.len()];
        let mut reversed = vec![None; new_trace.len()];
        for (layer, w) in widths.iter().enumerate() {
            for s in 0..*w {
                let Some(target) = map((layer, s)) else { continue };
                let (old_id, old_dir) = old.at((layer, s)).expect("full tracing");
                let (new_id, new_dir) = new_trace
                    .at(target)
                    .ok_or_else(|| Error::Internal("rewrite segment map out of range".into()))?;
                let flip = (old_dir != new_dir) != self.reversed[old_id];
                if labels[new_id] == 0 {
                    labels[new_id] = self.labels[old_id];
                    reversed[new_id] = Some(flip);
                } else if labels[new_id] != self.labels[old_id] || reversed[new_id] != Some(flip) {
                    return Err(Error::Internal("rewrite merged two components".into()));
                }
            }
        }
        check_labels(&labels, new_trace.len())?;
        fresh.labels = labels;
        fresh.reversed = reversed.into_iter().map(|r| r.unwrap_or(false)).collect();
        Ok(fresh)
    }

    /// Canonical text form, accepted by [`parse_tangle`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(n) = &self.name {
            out.push_str(&format!("name {n}\n"));
        }
        out.push_str(&format!("m={}\n", self.width));
        for chunk in self.events.chunks(16) {
            let line: Vec<String> = chunk.iter().map(|e| e.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        for (t, l) in self.labels.iter().enumerate() {
            out.push_str(&format!("label {} {}\n", t + 1, l));
        }
        for (t, _) in self.reversed.iter().enumerate().filter(|(_, r)| **r) {
            out.push_str(&format!("reverse {}\n", t + 1));
        }
        out
    }
}

fn check_labels(labels: &[usize], count: usize) -> Result<()> {
    if labels.len() != count {
        return Err(Error::Parse {
            line: 0,
            event: 0,
            msg: format!("{} labels for {count} closure components", labels.len()),
        });
    }
    let mut seen = vec![false; count];
    for &l in labels {
        if l == 0 || l > count || seen[l - 1] {
            return Err(Error::Parse {
                line: 0,
                event: 0,
                msg: format!("labels must be a permutation of 1..={count}"),
            });
        }
        seen[l - 1] = true;
    }
    Ok(())
}

/// Closure of a word together with the axis component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkedLink {
    pub diagram: PDiagram,
    /// Position of the axis in `diagram.components` (always the last).
    pub axis: usize,
    /// `axis_linking[i - 1]` is the linking number of the axis with component `i`.
    pub axis_linking: Vec<i64>,
}

/// Parses the tangle-word text format: `m=<int>` header, events `X<i>+`,
/// `X<i>-`, `U<i>`, `A<i>`, optional `label <trace-id> <link-label>`,
/// `reverse <trace-id>` and `name <string>` declarations; `;` and newlines separate statements and
/// `#` starts a comment.
pub fn parse_tangle(text: &str) -> Result<TangleWord> {
    let mut width: Option<usize> = None;
    let mut name = None;
    let mut events = Vec::new();
    let mut event_lines = Vec::new();
    let mut labels: Vec<(usize, usize, usize)> = Vec::new();
    let mut flips: Vec<(usize, usize)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("");
        for stmt in content.split(';') {
            let mut toks = stmt.split_whitespace();
            while let Some(tok) = toks.next() {
                let err = |msg: String| Error::Parse { line, event: events.len(), msg };
                if let Some(v) = tok.strip_prefix("m=") {
                    if width.is_some() {
                        return Err(err("width declared twice".into()));
                    }
                    width = Some(v.parse().map_err(|_| err(format!("bad width {v:?}")))?);
                } else if tok == "label" {
                    let t = toks.next().and_then(|s| s.parse::<usize>().ok());
                    let l = toks.next().and_then(|s| s.parse::<usize>().ok());
                    match (t, l) {
                        (Some(t), Some(l)) => labels.push((t, l, line)),
                        _ => return Err(err("expected `label <trace-id> <label>`".into())),
                    }
                } else if tok == "reverse" {
                    match toks.next().and_then(|s| s.parse::<usize>().ok()) {
                        Some(t) => flips.push((t, line)),
                        None => return Err(err("expected `reverse <trace-id>`".into())),
                    }
                } else if tok == "name" {
                    name = Some(toks.next().ok_or_else(|| err("missing name".into()))?.to_string());
                } else {
                    if width.is_none() {
                        return Err(err(format!("event {tok:?} before the m= header")));
                    }
                    events.push(parse_event(tok).ok_or_else(|| err(format!("unknown token {tok:?}")))?);
                    event_lines.push(line);
                }
            }
        }
    }
    let width = width.ok_or(Error::Parse { line: 0, event: 0, msg: "missing m= header".into() })?;
    let mut w = width;
    for (i, e) in events.iter().enumerate() {
        w = e.width_after(w).ok_or_else(|| Error::Parse {
            line: event_lines[i],
            event: i + 1,
            msg: format!("{e} does not fit a strand width of {w}"),
        })?;
    }
    if w != width {
        return Err(Error::Parse {
            line: event_lines.last().copied().unwrap_or(0),
            event: events.len(),
            msg: format!("final width {w} differs from declared width {width}"),
        });
    }
    let mut word = TangleWord::new(width, events, None, name)?;
    for (t, line) in flips {
        if t == 0 || t > word.reversed.len() {
            return Err(Error::Parse {
                line,
                event: word.events.len(),
                msg: format!("bad trace id {t} in reverse"),
            });
        }
        word.reversed[t - 1] = true;
    }
    if labels.is_empty() {
        return Ok(word);
    }
    let count = word.component_count();
    let mut assigned = vec![0usize; count];
    for (t, l, line) in labels {
        if t == 0 || t > count || assigned[t - 1] != 0 {
            return Err(Error::Parse {
                line,
                event: word.events.len(),
                msg: format!("bad or repeated trace id {t} (closure has {count} components)"),
            });
        }
        assigned[t - 1] = l;
    }
    if assigned.contains(&0) {
        return Err(Error::Parse {
            line: 0,
            event: word.events.len(),
            msg: format!("every one of the {count} closure components needs a label"),
        });
    }
    check_labels(&assigned, count)?;
    Ok(TangleWord { labels: assigned, ..word })
}

fn parse_event(tok: &str) -> Option<MorseEvent> {
    let (head, rest) = tok.split_at(1);
    match head {
        "X" => {
            let positive = match rest.chars().last()? {
                '+' => true,
                '-' => false,
                _ => return None,
            };
            let pos = rest[..rest.len() - 1].parse().ok()?;
            Some(MorseEvent::Cross { pos, positive })
        }
        "U" => Some(MorseEvent::Cup { pos: rest.parse().ok()? }),
        "A" => Some(MorseEvent::Cap { pos: rest.parse().ok()? }),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(text: &str) -> TangleWord {
        parse_tangle(text).unwrap()
    }

    #[test]
    fn parses_minimal_inputs() {
        let w = word("m=2; X1+ X1+");
        assert_eq!(w.component_count(), 2);
        assert_eq!(w.crossing_count(), 2);
        let e = word("m=0;");
        assert_eq!(e.component_count(), 0);
        let r2 = word("m=2; X1+ X1-");
        assert_eq!(r2.component_count(), 2);
    }

    #[test]
    fn parse_errors_carry_positions() {
        match parse_tangle("m=2\nX1+ X2+") {
            Err(Error::Parse { line, event, .. }) => assert_eq!((line, event), (2, 2)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_tangle("m=2; U1"), Err(Error::Parse { .. })));
        assert!(matches!(parse_tangle("m=2; X1+; label 1 2"), Err(Error::Parse { .. })));
        assert!(matches!(parse_tangle("X1+"), Err(Error::Parse { .. })));
        assert!(matches!(parse_tangle("m=2; Q7"), Err(Error::Parse { .. })));
        assert!(matches!(parse_tangle("m=2; label 1 1; label 2 1"), Err(Error::Parse { .. })));
    }

    #[test]
    fn labels_and_names_are_read() {
        let w = word("name hopf\nm=2\nX1+ X1+\nlabel 1 2\nlabel 2 1");
        assert_eq!(w.name(), Some("hopf"));
        assert_eq!(w.labels(), &[2, 1]);
        assert_eq!(parse_tangle(&w.to_text()).unwrap(), w);
    }

    #[test]
    fn hopf_closure() {
        let d = word("m=2; X1+ X1+").annular_closure().unwrap();
        assert_eq!(d.component_count(), 2);
        assert_eq!(d.crossing_count(), 2);
        assert_eq!(d.linking_number(0, 1), 1);
    }

    #[test]
    fn empty_word_closure() {
        let d = word("m=0;").annular_closure().unwrap();
        assert_eq!(d, PDiagram::empty());
    }

    #[test]
    fn axis_on_empty_word_is_split() {
        let ml = word("m=0;").insert_axis().unwrap();
        assert_eq!(ml.diagram.component_count(), 1);
        assert_eq!(ml.diagram.crossing_count(), 0);
    }

    #[test]
    fn one_strand_links_axis_once() {
        let w = word("m=1;");
        assert_eq!(w.axis_linking(1).unwrap(), 1);
        let ml = w.insert_axis().unwrap();
        assert_eq!(ml.axis_linking, vec![1]);
        assert_eq!(ml.diagram.linking_number(0, 1), 1);
        assert_eq!(ml.diagram.writhe(1), 0);
    }

    #[test]
    fn turnback_has_zero_axis_linking() {
        // Down through the cut at position 1, back up at position 2.
        let w = word("m=2; U1 A1");
        assert_eq!(w.component_count(), 1);
        assert_eq!(w.axis_linking(1).unwrap(), 0);
        assert!(matches!(w.axis_linking(2), Err(Error::UnknownComponent(2))));
    }

    #[test]
    fn internal_loop_is_traced_from_its_cap() {
        let w = word("m=1; A2 X1+ X1+ U2");
        assert_eq!(w.component_count(), 2);
        let t = w.trace().unwrap();
        assert_eq!(t.components[1].start, (1, 1));
    }

    #[test]
    fn rotation_example() {
        let w = word("m=3; X1+ X2-");
        let r = w.rewrite(Rewrite::Rotate).unwrap();
        assert_eq!(r.events(), word("m=3; X2- X1+").events());
    }

    #[test]
    fn r2_insert_then_remove_is_identity() {
        let w = word("m=2; X1+ X1+");
        let ins = w.rewrite(Rewrite::InsertR2 { at: 1, pos: 1, positive_first: false }).unwrap();
        assert_eq!(ins.events().len(), 4);
        let back = ins.rewrite(Rewrite::RemoveR2 { at: 1 }).unwrap();
        assert_eq!(back, w);
        assert!(matches!(w.rewrite(Rewrite::RemoveR2 { at: 0 }), Err(Error::Rewrite(_))));
        assert!(matches!(
            w.rewrite(Rewrite::InsertR2 { at: 0, pos: 2, positive_first: true }),
            Err(Error::Rewrite(_))
        ));
    }

    #[test]
    fn axis_is_a_round_circle() {
        let w = word("m=4; U1 A1 X2+ X2+");
        let ml = w.insert_axis().unwrap();
        assert_eq!(ml.diagram.writhe(ml.axis), 0);
        for (i, lk) in ml.axis_linking.iter().enumerate() {
            assert_eq!(*lk, ml.diagram.linking_number(i, ml.axis));
        }
    }

    #[test]
    fn reversal_flips_linking_and_round_trips() {
        let w = word("m=2; X1+ X1+ U1 A1 X1- reverse 1");
        assert_eq!(w.reversed(), &[true]);
        assert_eq!(parse_tangle(&w.to_text()).unwrap(), w);
        let h = word("m=0; A1 A3 X2+ X2+ U1 U1");
        let flipped = h.clone().with_reversed(vec![true, false]).unwrap();
        let lk = |t: &TangleWord| t.annular_closure().unwrap().linking_number(0, 1);
        assert_eq!(lk(&h), -lk(&flipped));
    }

    #[test]
    fn rotation_keeps_orientation() {
        let w = word("m=1; A1 A4 X2- U4 U1");
        assert_ne!(w.axis_linking(1).unwrap(), 0);
        let base = w.insert_axis().unwrap();
        let mut r = w.clone();
        let mut flipped = false;
        for _ in 0..w.events().len() {
            r = r.rewrite(Rewrite::Rotate).unwrap();
            flipped |= r.reversed().iter().any(|&b| b);
            let ml = r.insert_axis().unwrap();
            assert_eq!(ml.axis_linking, base.axis_linking);
            assert_eq!(ml.diagram.linking_number(0, 1), base.diagram.linking_number(0, 1));
            assert_eq!(ml.diagram.writhe(0), base.diagram.writhe(0));
        }
        assert!(flipped);
        assert_eq!(r.reversed(), w.reversed());
    }
}
