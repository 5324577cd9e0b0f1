//! Covering links in the double cover of `S^3` branched over the axis.
//!
//! Cutting along the disk bounded by the axis and stacking two copies of the
//! tangle gives the word `W W`; its annular closure is the preimage of the
//! link, again in the solid torus of `S^3`. Under even axis linking every
//! component has two lifts, swapped by shifting one copy of `W`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::diagram::PDiagram;
use crate::error::{Error, Result};
use crate::freealg::Modulus;
use crate::milnor::{Index, MilnorEngine, MuResult};
use crate::par::{self, Exec};
use crate::tanglediag::{Dir, TangleWord, Tracing};

/// True when every component links the axis an even number of times.
pub fn check_even(t: &TangleWord) -> bool {
    ensure_even(t).is_ok()
}

pub fn ensure_even(t: &TangleWord) -> Result<()> {
    let tracing = t.trace()?;
    for (tid, c) in tracing.components.iter().enumerate() {
        let lk = c.transit_sum();
        if lk % 2 != 0 {
            return Err(Error::OddLinking { component: t.labels()[tid], linking: lk });
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct CoverModel {
    original: TangleWord,
    doubled: TangleWord,
    tracing: Tracing,
    /// `lifts[i - 1][eps]` is the trace id in `tracing` of lift `eps` of component `i`.
    lifts: Vec<[usize; 2]>,
    full: PDiagram,
}

pub fn double_cover(t: &TangleWord) -> Result<CoverModel> {
    ensure_even(t)?;
    let n = t.component_count();
    let e = t.events().len();
    let mut events = t.events().to_vec();
    events.extend_from_slice(t.events());
    let doubled = TangleWord::new(t.width(), events, None, t.name().map(|s| format!("{s}~2")))?;
    let orig = t.trace()?;
    let mut starts = Vec::with_capacity(2 * n);
    let mut lifts = vec![[0usize; 2]; n];
    for (tid, c) in orig.components.iter().enumerate() {
        if c.start_dir != Dir::Down {
            return Err(Error::Internal("trace start is not downward".into()));
        }
        let (layer, slot) = c.start;
        let label = t.labels()[tid];
        lifts[label - 1] = [starts.len(), starts.len() + 1];
        starts.push(((layer, slot), Dir::Down));
        starts.push(((layer + e, slot), Dir::Down));
    }
    let tracing = doubled.trace_from(&starts).map_err(|err| match err {
        Error::Internal(msg) => Error::Internal(format!("lifts are not two per component: {msg}")),
        other => other,
    })?;
    let mut labels = vec![0usize; 2 * n];
    let mut reversed = vec![false; 2 * n];
    for (i, pair) in lifts.iter().enumerate() {
        labels[pair[0]] = i + 1;
        labels[pair[1]] = i + 1 + n;
    }
    for (tid, &label) in t.labels().iter().enumerate() {
        let [a, b] = lifts[label - 1];
        reversed[a] = t.reversed()[tid];
        reversed[b] = t.reversed()[tid];
    }
    let full = doubled.closure_diagram(&tracing, &labels, &reversed, false)?;
    Ok(CoverModel { original: t.clone(), doubled, tracing, lifts, full })
}

impl CoverModel {
    pub fn original(&self) -> &TangleWord {
        &self.original
    }

    pub fn doubled(&self) -> &TangleWord {
        &self.doubled
    }

    pub fn tracing(&self) -> &Tracing {
        &self.tracing
    }

    pub fn n(&self) -> usize {
        self.lifts.len()
    }

    /// Trace id of lift `eps` of component `label`.
    pub fn lift(&self, label: usize, eps: u8) -> Result<usize> {
        self.lifts
            .get(label.wrapping_sub(1))
            .map(|p| p[usize::from(eps & 1)])
            .ok_or(Error::UnknownComponent(label))
    }

    /// Closure of the doubled word with all `2n` lifts; lift `eps` of
    /// component `i` carries label `i + n * eps`.
    pub fn full_preimage(&self) -> &PDiagram {
        &self.full
    }

    /// `L(eps_1 ... eps_n)`, components in order `1..=n`.
    pub fn covering_link(&self, eps: &[u8]) -> Result<PDiagram> {
        let n = self.n();
        if eps.len() != n || eps.iter().any(|&e| e > 1) {
            return Err(Error::ParameterMismatch(format!("lift selection {eps:?} for {n} components")));
        }
        let keep: Vec<usize> = eps.iter().enumerate().map(|(i, &e)| i + n * e as usize).collect();
        Ok(self.full.sublink(&keep)?.relabelled())
    }

    /// All `2^n` covering links, in lexicographic order of `eps`.
    pub fn covering_link_all(&self) -> Result<Vec<(Vec<u8>, PDiagram)>> {
        all_selections(self.n(), false)
            .into_iter()
            .map(|eps| self.covering_link(&eps).map(|d| (eps, d)))
            .collect()
    }
}

/// `{0,1}^n` in lexicographic order, optionally only those with `eps_1 = 0`.
pub fn all_selections(n: usize, first_zero: bool) -> Vec<Vec<u8>> {
    let total = 1usize << n;
    (0..total)
        .map(|bits| (0..n).map(|i| ((bits >> (n - 1 - i)) & 1) as u8).collect::<Vec<u8>>())
        .filter(|eps| !first_zero || eps.first().is_none_or(|&e| e == 0))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MSetEntry {
    pub eps: Vec<u8>,
    pub result: MuResult,
}

/// Covering invariant multiset over selections with `eps_1 = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MSet {
    pub name: Option<String>,
    pub index: Index,
    pub p: Modulus,
    pub q: usize,
    pub entries: Vec<MSetEntry>,
}

impl MSet {
    /// Sorted `mubar` values.
    pub fn values(&self) -> Vec<BigInt> {
        let mut v: Vec<BigInt> = self.entries.iter().map(|e| e.result.mubar.clone()).collect();
        v.sort();
        v
    }

    /// Same multiset with every value negated (and re-reduced).
    pub fn negated_values(&self) -> Vec<BigInt> {
        let mut v: Vec<BigInt> = self
            .entries
            .iter()
            .map(|e| {
                let r = &e.result;
                if r.delta.is_zero() {
                    -r.mubar.clone()
                } else {
                    (-r.mubar.clone()).mod_floor(&r.delta)
                }
            })
            .collect();
        v.sort();
        v
    }

    /// Equal as multisets after one global sign choice.
    pub fn matches_up_to_sign(&self, expected: &[i64]) -> bool {
        let mut e: Vec<BigInt> = expected.iter().map(|&x| BigInt::from(x)).collect();
        e.sort();
        self.values() == e || self.negated_values() == e
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "I": self.index.to_string(),
            "p": self.p.value(),
            "q": self.q,
            "entries": self.entries.iter().map(|e| json!({
                "eps": e.eps.iter().map(|b| b.to_string()).collect::<String>(),
                "mu": bigint_json(&e.result.mu),
                "delta": bigint_json(&e.result.delta),
                "mubar": bigint_json(&e.result.mubar),
            })).collect::<Vec<_>>(),
        })
    }
}

/// JSON number when it fits, decimal string otherwise.
pub fn bigint_json(x: &BigInt) -> Value {
    x.to_i64().map_or_else(|| Value::String(x.to_string()), Value::from)
}

fn check_index(idx: &Index, n: usize) -> Result<()> {
    if let Some(&bad) = idx.seq().iter().find(|&&i| i > n) {
        return Err(Error::InvalidIndex(format!("entry {bad} of {idx} exceeds {n} components")));
    }
    Ok(())
}

/// `mubar` of `idx` on the covering links for each selection.
pub fn mu_bar_over(
    model: &CoverModel,
    selections: &[Vec<u8>],
    idx: &Index,
    p: Modulus,
    q: usize,
    exec: Exec,
) -> Result<Vec<MSetEntry>> {
    check_index(idx, model.n())?;
    par::map(exec, selections, |eps| {
        let d = model.covering_link(eps)?;
        let result = MilnorEngine::new(&d, p, q)?.mu_bar(idx)?;
        Ok(MSetEntry { eps: eps.clone(), result })
    })
    .into_iter()
    .collect()
}

pub fn m_set(t: &TangleWord, idx: &Index, p: Modulus, q: usize, exec: Exec) -> Result<MSet> {
    let model = double_cover(t)?;
    m_set_of(&model, idx, p, q, exec)
}

pub fn m_set_of(model: &CoverModel, idx: &Index, p: Modulus, q: usize, exec: Exec) -> Result<MSet> {
    let sel = all_selections(model.n(), true);
    let entries = mu_bar_over(model, &sel, idx, p, q, exec)?;
    Ok(MSet { name: model.original.name().map(String::from), index: idx.clone(), p, q, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tanglediag::parse_tangle;

    fn word(s: &str) -> TangleWord {
        parse_tangle(s).unwrap()
    }

    #[test]
    fn evenness() {
        assert!(!check_even(&word("m=1;")));
        assert!(check_even(&word("m=2; U1 A1")));
        assert!(check_even(&word("m=2; X1+")));
        assert!(matches!(
            double_cover(&word("m=1;")),
            Err(Error::OddLinking { component: 1, linking: 1 })
        ));
    }

    #[test]
    fn empty_cover() {
        let m = double_cover(&word("m=0;")).unwrap();
        assert_eq!(m.n(), 0);
        assert_eq!(m.full_preimage().component_count(), 0);
    }

    #[test]
    fn turnback_lifts_are_split() {
        let m = double_cover(&word("m=2; U1 A1")).unwrap();
        assert_eq!(m.full_preimage().component_count(), 2);
        let d = m.covering_link(&[0]).unwrap();
        assert_eq!(d.component_count(), 1);
        assert_eq!(d.crossing_count(), 0);
    }

    #[test]
    fn selections() {
        assert_eq!(all_selections(2, false).len(), 4);
        assert_eq!(all_selections(3, true).len(), 4);
        assert_eq!(all_selections(2, true), vec![vec![0, 0], vec![0, 1]]);
        assert_eq!(all_selections(0, true), vec![Vec::<u8>::new()]);
    }

    #[test]
    fn double_transit_cover_is_consistent() {
        // One component running through the cut twice, linked with the axis twice.
        let t = word("m=2; X1+");
        let m = double_cover(&t).unwrap();
        assert_eq!(m.full_preimage().component_count(), 2);
        assert!(m.covering_link(&[2]).is_err());
        assert_eq!(m.covering_link_all().unwrap().len(), 2);
    }
}
