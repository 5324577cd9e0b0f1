//! Milnor links, their band sums, and the built-in corpus.
//!
//! Words here are in port form: a block `A1 A3 ... A(2n-1)` opening one thin
//! loop per component `1..=n`, a body, and the closing block
//! `U(2n-1) ... U1`. Strands to the right of the loops pass through the cut
//! (they are the only part of the link meeting the axis disk). Component
//! `n + 1` is the axis.

use crate::error::{Error, Result};
use crate::freealg::GroupWord;
use crate::tanglediag::{parse_tangle, Dir, MorseEvent, TangleWord};

/// An o-index and a sign.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MilnorLinkSpec {
    pub index: Vec<usize>,
    pub sign: i8,
}

impl MilnorLinkSpec {
    pub fn new(index: Vec<usize>, sign: i8) -> Result<Self> {
        let k = index.len();
        if !(3..=6).contains(&k) {
            return Err(Error::UnsupportedSize(format!("o-index of length {k}; supported 3..=6")));
        }
        let mut seen = vec![false; k];
        for &i in &index {
            if i == 0 || i > k || seen[i - 1] {
                return Err(Error::InvalidIndex(format!("{index:?} is not a permutation of 1..={k}")));
            }
            seen[i - 1] = true;
        }
        if sign != 1 && sign != -1 {
            return Err(Error::InvalidIndex(format!("sign {sign} is not +1 or -1")));
        }
        Ok(MilnorLinkSpec { index, sign })
    }

    /// Number of components besides the axis.
    pub fn n(&self) -> usize {
        self.index.len() - 1
    }

    /// The component drawn as the iterated commutator, and that commutator
    /// in the meridians of the other components (`x_{n+1}` = axis).
    pub fn commutator(&self) -> (usize, GroupWord) {
        let axis = self.index.len();
        let mut idx = self.index.clone();
        if idx[idx.len() - 1] == axis {
            idx.reverse();
        }
        let c = idx.pop().expect("nonempty");
        let mut w = GroupWord::gen(idx[0]);
        for &g in &idx[1..] {
            w = GroupWord::commutator(&w, &GroupWord::gen(g));
        }
        if self.sign < 0 {
            w = w.inverse();
        }
        (c, w.free_reduce())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Strand {
    Left(usize),
    Right(usize),
    Column(usize),
}

struct Builder {
    strands: Vec<Strand>,
    events: Vec<MorseEvent>,
    /// Direction of each loop's left strand is down, right strand up;
    /// a column is down when its letter is positive.
    column_down: Vec<bool>,
}

impl Builder {
    fn pos(&self, s: Strand) -> usize {
        self.strands.iter().position(|&t| t == s).expect("strand present")
    }

    fn down(&self, s: Strand) -> bool {
        match s {
            Strand::Left(_) => true,
            Strand::Right(_) => false,
            Strand::Column(k) => self.column_down[k],
        }
    }

    /// Swaps positions `a, a+1`, the strand at `a` passing over iff `left_over`.
    fn swap(&mut self, a: usize, left_over: bool) {
        self.events.push(MorseEvent::Cross { pos: a + 1, positive: !left_over });
        self.strands.swap(a, a + 1);
    }

    /// Moves strand `s` to position `to`, over everything it passes.
    fn move_over(&mut self, s: Strand, to: usize) {
        let mut at = self.pos(s);
        while at > to {
            self.swap(at - 1, false);
            at -= 1;
        }
        while at < to {
            self.swap(at, true);
            at += 1;
        }
    }

    /// `p` winds once around the loop of component `j`, linking it `e` times.
    fn obstacle_letter(&mut self, c: usize, j: usize, e: i8) {
        let p = Strand::Left(c);
        let home = self.pos(p);
        let (target, beside) = if self.pos(Strand::Left(j)) < home {
            let r = Strand::Right(j);
            (r, self.pos(r) + 1)
        } else {
            let l = Strand::Left(j);
            (l, self.pos(l) - 1)
        };
        self.move_over(p, beside);
        let same = self.down(target);
        let a = self.pos(p).min(self.pos(target));
        let positive = (e > 0) == same;
        for _ in 0..2 {
            self.events.push(MorseEvent::Cross { pos: a + 1, positive });
        }
        self.move_over(p, home);
    }

    /// `p` goes once around the axis through column `k`.
    fn axis_letter(&mut self, c: usize, k: usize, e: i8) {
        let col = Strand::Column(k);
        let home = self.pos(col);
        let p = self.pos(Strand::Left(c));
        self.move_over(col, p + 1);
        if e > 0 {
            self.events.push(MorseEvent::Cross { pos: p + 1, positive: true });
        } else {
            self.events.push(MorseEvent::Cup { pos: p + 1 });
            self.events.push(MorseEvent::Cap { pos: p + 1 });
        }
        self.move_over(col, home);
    }
}

fn open_block(n: usize) -> Vec<MorseEvent> {
    (0..n).map(|i| MorseEvent::Cap { pos: 2 * i + 1 }).collect()
}

fn close_block(n: usize) -> Vec<MorseEvent> {
    (0..n).rev().map(|i| MorseEvent::Cup { pos: 2 * i + 1 }).collect()
}

/// Labels loop `i` (left strand at slot `2(i-1)` below the opening block)
/// as component `i`, checking orientations.
fn port_word(width: usize, n: usize, events: Vec<MorseEvent>, name: Option<String>) -> Result<TangleWord> {
    let raw = TangleWord::new(width, events.clone(), None, None)?;
    let tracing = raw.trace()?;
    if tracing.len() != n {
        return Err(Error::Internal(format!("{} closure components, expected {n}", tracing.len())));
    }
    let mut labels = vec![0usize; n];
    for i in 1..=n {
        let (t, dir) = tracing.at((n, 2 * (i - 1))).expect("loop strand");
        if dir != Dir::Down || labels[t] != 0 {
            return Err(Error::Internal(format!("loop {i} is not a separate downward component")));
        }
        labels[t] = i;
    }
    TangleWord::new(width, events, Some(labels), name)
}

/// Realizes `w` (letters in `1..=n+1`, no `x_c`) as component `c` of an
/// `n`-loop port word, read downward along the left strand of loop `c`.
pub fn word_link(n: usize, c: usize, w: &GroupWord) -> Result<TangleWord> {
    let axis = n + 1;
    if c == 0 || c > n {
        return Err(Error::UnknownComponent(c));
    }
    if w.letters.iter().any(|l| l.gen == c || l.gen == 0 || l.gen > axis) {
        return Err(Error::InvalidIndex(format!("word {w} must avoid x_{c} and stay within 1..={axis}")));
    }
    if w.exponent_sum(axis) % 2 != 0 {
        return Err(Error::OddLinking { component: c, linking: w.exponent_sum(axis) });
    }
    // Start at the first positive axis letter so the lowest cut strand runs down.
    let mut w = w.clone();
    if let Some(k) = w.letters.iter().position(|l| l.gen == axis && !l.inverse) {
        w = w.rotate(k);
    }
    let column_down: Vec<bool> = w.letters.iter().filter(|l| l.gen == axis).map(|l| !l.inverse).collect();
    let cols = column_down.len();
    let mut strands = Vec::new();
    for i in 1..=n {
        strands.push(Strand::Left(i));
        strands.push(Strand::Right(i));
    }
    strands.extend((0..cols).map(Strand::Column));
    let mut b = Builder { strands, events: open_block(n), column_down };
    let mut col = 0;
    for l in &w.letters {
        let e = l.exponent();
        if l.gen == axis {
            b.axis_letter(c, col, e);
            col += 1;
        } else {
            b.obstacle_letter(c, l.gen, e);
        }
    }
    b.events.extend(close_block(n));
    port_word(cols, n, b.events, None)
}

pub fn milnor_link(spec: &MilnorLinkSpec) -> Result<TangleWord> {
    let (c, w) = spec.commutator();
    let idx: Vec<String> = spec.index.iter().map(|i| i.to_string()).collect();
    let name = format!("milnor_{}{}", idx.join(""), if spec.sign < 0 { "-" } else { "" });
    Ok(word_link(spec.n(), c, &w)?.with_name(name))
}

/// `n` unlinked loops beside the axis (`trivial_<n+1>` in the corpus).
pub fn trivial(n: usize) -> Result<TangleWord> {
    let mut ev = open_block(n);
    ev.extend(close_block(n));
    port_word(0, n, ev, Some(format!("trivial_{}", n + 1)))
}

/// Number of loops of a port-form word, checking the shape.
fn port_loops(t: &TangleWord) -> Result<usize> {
    let n = t.component_count();
    let ev = t.events();
    if ev.len() < 2 * n || ev[..n] != open_block(n)[..] || ev[ev.len() - n..] != close_block(n)[..] {
        return Err(Error::Composition(format!(
            "{} is not in port form",
            t.name().unwrap_or("word")
        )));
    }
    let tracing = t.trace()?;
    for i in 1..=n {
        let (tid, dir) = tracing.at((n, 2 * (i - 1))).expect("loop strand");
        if t.labels()[tid] != i || (dir == Dir::Down) == t.reversed()[tid] {
            return Err(Error::Composition(format!("loop {i} does not carry component {i} downward")));
        }
    }
    Ok(n)
}

/// Band sum joining loop `i` of `a` to loop `i` of `b` for every `i`; the
/// bodies are stacked, with `a`'s cut strands passing under `b`'s.
pub fn band_sum(a: &TangleWord, b: &TangleWord) -> Result<TangleWord> {
    let n = port_loops(a)?;
    let nb = port_loops(b)?;
    if n != nb {
        return Err(Error::Composition(format!("{n} components vs {nb}")));
    }
    let (ca, cb) = (a.width(), b.width());
    let body_a = &a.events()[n..a.events().len() - n];
    let body_b = &b.events()[n..b.events().len() - n];
    let mut ev = open_block(n);
    ev.extend_from_slice(body_a);
    // a's columns slide under b's to the far right and back.
    for k in (0..ca).rev() {
        for s in 0..cb {
            ev.push(MorseEvent::Cross { pos: 2 * n + k + s + 1, positive: true });
        }
    }
    ev.extend_from_slice(body_b);
    for k in 0..ca {
        for s in (0..cb).rev() {
            ev.push(MorseEvent::Cross { pos: 2 * n + k + s + 1, positive: false });
        }
    }
    ev.extend(close_block(n));
    let name = format!("{}&{}", a.name().unwrap_or("a"), b.name().unwrap_or("b"));
    port_word(ca + cb, n, ev, Some(name))
}

/// `k`-fold band sum of a word with itself.
pub fn band_power(t: &TangleWord, k: usize) -> Result<TangleWord> {
    let mut acc = trivial(port_loops(t)?)?;
    for _ in 0..k {
        acc = band_sum(&acc, t)?;
    }
    Ok(acc)
}

const BORROMEAN_AXIS3: &str = include_str!("../data/borromean_axis3.tw");
const LPRIME: &str = include_str!("../data/Lprime.tw");

/// Published values attached to a corpus entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expected {
    /// `mubar(I) = value` up to one global sign.
    MuBar { index: &'static str, value: i64 },
    /// `M(I)_0` as a multiset up to one global sign.
    MSet { index: &'static str, values: &'static [i64] },
}

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: String,
    pub word: TangleWord,
    pub expected: Vec<Expected>,
}

pub const CORPUS_NAMES: [&str; 2] = ["borromean_axis3", "Lprime"];

/// Built-in words. `trivial_<k>` (`k` components counting the axis) is
/// generated on request.
pub fn corpus() -> Result<Vec<CorpusEntry>> {
    Ok(vec![
        CorpusEntry {
            name: "borromean_axis3".into(),
            word: parse_tangle(BORROMEAN_AXIS3)?,
            expected: vec![
                Expected::MuBar { index: "132", value: -1 },
                Expected::MSet { index: "12", values: &[1, -1] },
            ],
        },
        CorpusEntry {
            name: "Lprime".into(),
            word: parse_tangle(LPRIME)?,
            expected: vec![
                Expected::MuBar { index: "132", value: -1 },
                Expected::MSet { index: "12", values: &[3, -3] },
            ],
        },
    ])
}

pub fn corpus_word(name: &str) -> Result<TangleWord> {
    if let Some(k) = name.strip_prefix("trivial_") {
        return match k.parse::<usize>() {
            Ok(k) if k >= 1 => trivial(k - 1),
            _ => Err(Error::UnknownCorpus(name.into())),
        };
    }
    corpus()?
        .into_iter()
        .find(|e| e.name == name)
        .map(|e| e.word)
        .ok_or_else(|| Error::UnknownCorpus(name.into()))
}
