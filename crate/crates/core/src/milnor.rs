//! Milnor invariants of a diagram: Wirtinger presentation, iterated arc
//! series, longitude expansion, and the indeterminacy `Δ`.
//!
//! Component labels of the diagram are the index entries; variable `X_i` of
//! the algebra belongs to the component at position `i - 1`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::diagram::PDiagram;
use crate::error::{Error, Result};
use crate::freealg::{AlgebraCtx, Modulus, Monomial, TruncatedSeries, VarCaps};
use crate::par::{self, Exec};

/// A sequence `i_1 ... i_k` of component labels; the last entry names the
/// longitude.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Index {
    seq: Vec<usize>,
}

impl Index {
    pub fn new(seq: Vec<usize>) -> Result<Self> {
        if seq.len() < 2 {
            return Err(Error::InvalidIndex(format!("{seq:?} is shorter than 2")));
        }
        if seq.contains(&0) {
            return Err(Error::InvalidIndex("component labels start at 1".into()));
        }
        Ok(Index { seq })
    }

    /// `"132"` (single digits) or `"1,3,12"`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidIndex(format!("cannot read index {s:?}"));
        let seq: Vec<usize> = if s.contains(',') || s.contains(' ') {
            s.split([',', ' '])
                .filter(|t| !t.is_empty())
                .map(|t| t.parse().map_err(|_| bad()))
                .collect::<Result<_>>()?
        } else {
            s.chars().map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad)).collect::<Result<_>>()?
        };
        Index::new(seq)
    }

    pub fn seq(&self) -> &[usize] {
        &self.seq
    }

    pub fn len(&self) -> usize {
        self.seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seq.is_empty()
    }

    pub fn non_repeated(&self) -> bool {
        let set: BTreeSet<_> = self.seq.iter().collect();
        set.len() == self.seq.len()
    }

    pub fn rotate(&self, k: usize) -> Index {
        let mut seq = self.seq.clone();
        let len = seq.len();
        seq.rotate_left(k % len);
        Index { seq }
    }

    /// Cyclic permutations of proper subsequences, of length at least 2.
    pub fn lower_indices(&self) -> BTreeSet<Index> {
        let k = self.seq.len();
        let mut out = BTreeSet::new();
        for mask in 1u64..(1u64 << k) - 1 {
            if mask.count_ones() < 2 {
                continue;
            }
            let sub: Vec<usize> = (0..k).filter(|b| mask >> b & 1 == 1).map(|b| self.seq[b]).collect();
            for r in 0..sub.len() {
                let mut j = sub.clone();
                j.rotate_left(r);
                out.insert(Index { seq: j });
            }
        }
        out
    }

    /// Every index of length `len` over labels `1..=n`.
    pub fn all(n: usize, len: usize, non_repeated: bool) -> Vec<Index> {
        let mut out = Vec::new();
        let mut cur = vec![1usize; len];
        if n == 0 || len < 2 {
            return out;
        }
        loop {
            let idx = Index { seq: cur.clone() };
            if !non_repeated || idx.non_repeated() {
                out.push(idx);
            }
            let mut pos = len;
            loop {
                if pos == 0 {
                    return out;
                }
                pos -= 1;
                if cur[pos] < n {
                    cur[pos] += 1;
                    break;
                }
                cur[pos] = 1;
            }
        }
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.seq.iter().all(|&i| i < 10) {
            for i in &self.seq {
                write!(f, "{i}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.seq.iter().map(|i| i.to_string()).collect();
            write!(f, "{}", parts.join(","))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MuResult {
    pub mu: BigInt,
    /// Generator of the indeterminacy ideal; `0` is the zero ideal.
    pub delta: BigInt,
    /// `mu` reduced into `[0, delta)`, or `mu` itself when `delta = 0`.
    pub mubar: BigInt,
}

impl MuResult {
    pub fn from_parts(mu: BigInt, delta: BigInt) -> Self {
        let mubar = if delta.is_zero() { mu.clone() } else { mu.mod_floor(&delta) };
        MuResult { mu, delta, mubar }
    }
}

/// One Wirtinger relation `output = over^{-sign} · input · over^{sign}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Relation {
    pub crossing: usize,
    pub over: usize,
    pub input: usize,
    pub output: usize,
    pub sign: i8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WirtingerPresentation {
    /// Generator of every diagram arc.
    pub arc_generator: Vec<usize>,
    /// Component position of every generator.
    pub generator_component: Vec<usize>,
    /// One relation per crossing, in crossing order.
    pub relations: Vec<Relation>,
    /// Base meridian of each component: the generator of its first arc.
    pub base: Vec<usize>,
    /// Relations met along each component from its first arc, in order.
    pub traversal: Vec<Vec<usize>>,
}

impl WirtingerPresentation {
    pub fn generator_count(&self) -> usize {
        self.generator_component.len()
    }
}

pub fn wirtinger(d: &PDiagram) -> Result<WirtingerPresentation> {
    d.validate()?;
    let narcs = d.arcs.len();
    let mut parent: Vec<usize> = (0..narcs).collect();
    fn find(parent: &mut [usize], mut a: usize) -> usize {
        while parent[a] != a {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        a
    }
    for c in &d.crossings {
        let (a, b) = (find(&mut parent, c.over_in), find(&mut parent, c.over_out));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut root_gen: HashMap<usize, usize> = HashMap::new();
    let mut arc_generator = vec![usize::MAX; narcs];
    let mut generator_component = Vec::new();
    for (ci, comp) in d.components.iter().enumerate() {
        for &a in &comp.arcs {
            let r = find(&mut parent, a);
            let g = *root_gen.entry(r).or_insert_with(|| {
                generator_component.push(ci);
                generator_component.len() - 1
            });
            arc_generator[a] = g;
        }
    }
    let relations: Vec<Relation> = d
        .crossings
        .iter()
        .enumerate()
        .map(|(x, c)| Relation {
            crossing: x,
            over: arc_generator[c.over_in],
            input: arc_generator[c.under_in],
            output: arc_generator[c.under_out],
            sign: c.sign,
        })
        .collect();
    let mut under_from = vec![None; narcs];
    for (x, c) in d.crossings.iter().enumerate() {
        under_from[c.under_in] = Some(x);
    }
    let base: Vec<usize> = d.components.iter().map(|c| arc_generator[c.arcs[0]]).collect();
    let traversal = d
        .components
        .iter()
        .map(|c| c.arcs.iter().filter_map(|&a| under_from[a]).collect())
        .collect();
    Ok(WirtingerPresentation { arc_generator, generator_component, relations, base, traversal })
}

fn relation_value(r: &Relation, vals: &[TruncatedSeries], inverses: &[TruncatedSeries]) -> Result<TruncatedSeries> {
    let (over, over_inv) = (&vals[r.over], &inverses[r.over]);
    let (left, right) = if r.sign > 0 { (over_inv, over) } else { (over, over_inv) };
    left.mul(&vals[r.input])?.mul(right)
}

/// Series of every Wirtinger generator: the fixed point of the relations
/// with base meridians pinned to `1 + X_i`. `q` sweeps along each component,
/// then one confirming sweep.
pub fn arc_series(p: &WirtingerPresentation, ctx: AlgebraCtx) -> Result<Vec<TruncatedSeries>> {
    let mut vals: Vec<TruncatedSeries> =
        p.generator_component.iter().map(|&c| ctx.generator(c + 1)).collect();
    let mut inverses: Vec<TruncatedSeries> = vals.iter().map(|v| v.inverse()).collect::<Result<_>>()?;
    let sweep = |vals: &mut Vec<TruncatedSeries>, inverses: &mut Vec<TruncatedSeries>| -> Result<bool> {
        let mut changed = false;
        for (ci, rels) in p.traversal.iter().enumerate() {
            for &ri in rels {
                let r = &p.relations[ri];
                if r.output == p.base[ci] {
                    continue;
                }
                let v = relation_value(r, vals, inverses)?;
                if v != vals[r.output] {
                    inverses[r.output] = v.inverse()?;
                    vals[r.output] = v;
                    changed = true;
                }
            }
        }
        Ok(changed)
    };
    for _ in 0..ctx.q {
        if !sweep(&mut vals, &mut inverses)? {
            break;
        }
    }
    if sweep(&mut vals, &mut inverses)? {
        return Err(Error::Internal("arc series did not stabilise".into()));
    }
    Ok(vals)
}

/// Expansion of the zero-framed longitude of the component at position `comp`.
pub fn longitude_series(
    d: &PDiagram,
    p: &WirtingerPresentation,
    arcs: &[TruncatedSeries],
    comp: usize,
    ctx: AlgebraCtx,
) -> Result<TruncatedSeries> {
    let mut acc = ctx.one();
    for &ri in &p.traversal[comp] {
        let r = &p.relations[ri];
        acc = acc.mul(&arcs[r.over].pow(r.sign as i64)?)?;
    }
    acc.mul(&ctx.generator(comp + 1).pow(-d.writhe(comp))?)
}

/// Caches longitudes per retained quotient, so many indices over one diagram
/// share the arc iteration.
pub struct MilnorEngine {
    diagram: PDiagram,
    wirt: WirtingerPresentation,
    p: Modulus,
    q: usize,
    cache: Mutex<HashMap<Option<VarCaps>, Arc<Vec<TruncatedSeries>>>>,
}

impl MilnorEngine {
    pub fn new(diagram: &PDiagram, p: Modulus, q: usize) -> Result<Self> {
        AlgebraCtx::new(diagram.component_count(), q, p)?;
        let wirt = wirtinger(diagram)?;
        Ok(MilnorEngine { diagram: diagram.clone(), wirt, p, q, cache: Mutex::new(HashMap::new()) })
    }

    pub fn diagram(&self) -> &PDiagram {
        &self.diagram
    }

    pub fn presentation(&self) -> &WirtingerPresentation {
        &self.wirt
    }

    pub fn modulus(&self) -> Modulus {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    fn longitudes(&self, ctx: AlgebraCtx) -> Result<Arc<Vec<TruncatedSeries>>> {
        if let Some(hit) = self.cache.lock().expect("cache lock").get(&ctx.caps()) {
            return Ok(hit.clone());
        }
        let arcs = arc_series(&self.wirt, ctx)?;
        let longs = (0..self.diagram.component_count())
            .map(|c| longitude_series(&self.diagram, &self.wirt, &arcs, c, ctx))
            .collect::<Result<Vec<_>>>()?;
        let longs = Arc::new(longs);
        self.cache.lock().expect("cache lock").insert(ctx.caps(), longs.clone());
        Ok(longs)
    }

    /// Full longitude series of the component labelled `label`, without any
    /// quotient beyond degree `q`.
    pub fn longitude(&self, label: usize) -> Result<TruncatedSeries> {
        let pos = self.diagram.component_index(label)?;
        let ctx = AlgebraCtx::new(self.diagram.component_count(), self.q, self.p)?;
        Ok(self.longitudes(ctx)?[pos].clone())
    }

    pub fn mu(&self, idx: &Index) -> Result<BigInt> {
        if idx.len() > self.q {
            return Err(Error::TruncationExceeded { len: idx.len(), q: self.q });
        }
        let n = self.diagram.component_count();
        let pos: Vec<usize> =
            idx.seq().iter().map(|&l| self.diagram.component_index(l)).collect::<Result<_>>()?;
        let (&j, prefix) = pos.split_last().expect("index length >= 2");
        let mut ctx = AlgebraCtx::new(n, self.q, self.p)?;
        if n <= VarCaps::MAX_VARS {
            let mut caps = vec![0usize; n];
            for &v in prefix {
                caps[v] += 1;
            }
            ctx = ctx.with_caps(&caps)?;
        }
        let mono = Monomial::new(&prefix.iter().map(|v| v + 1).collect::<Vec<_>>());
        self.longitudes(ctx)?[j].coefficient(&mono)
    }

    pub fn delta(&self, idx: &Index) -> Result<BigInt> {
        let mut g = BigInt::zero();
        for j in idx.lower_indices() {
            let m = self.mu(&j)?;
            if self.p.is_integral() {
                g = g.gcd(&m);
            } else if !m.is_zero() {
                return Ok(BigInt::one());
            }
        }
        Ok(g.abs())
    }

    pub fn mu_bar(&self, idx: &Index) -> Result<MuResult> {
        Ok(MuResult::from_parts(self.mu(idx)?, self.delta(idx)?))
    }

    pub fn mu_bar_many(&self, exec: Exec, indices: &[Index]) -> Vec<Result<MuResult>> {
        par::map(exec, indices, |i| self.mu_bar(i))
    }
}

pub fn mu(d: &PDiagram, idx: &Index, p: Modulus, q: usize) -> Result<BigInt> {
    MilnorEngine::new(d, p, q)?.mu(idx)
}

pub fn delta(d: &PDiagram, idx: &Index, p: Modulus, q: usize) -> Result<BigInt> {
    MilnorEngine::new(d, p, q)?.delta(idx)
}

pub fn mu_bar(d: &PDiagram, idx: &Index, p: Modulus, q: usize) -> Result<MuResult> {
    MilnorEngine::new(d, p, q)?.mu_bar(idx)
}
