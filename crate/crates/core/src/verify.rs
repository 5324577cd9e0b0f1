//! The mod-2 congruence between a Milnor invariant of a Brunnian link with a
//! trivial axis and the covering invariants, plus the homotopy
//! discriminator between `borromean_axis3` and `Lprime`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::brunnian::{band_sum, corpus_word, milnor_link, MilnorLinkSpec};
use crate::cover::{self, bigint_json, double_cover, MSet, MSetEntry};
use crate::diagram::PDiagram;
use crate::error::{Error, Result};
use crate::freealg::Modulus;
use crate::milnor::{Index, MilnorEngine, MuResult};
use crate::par::{self, Exec};
use crate::tanglediag::TangleWord;

/// Selections with `eps` pinned to 0 at the two neighbours of the axis in `idx`.
pub fn eps_set(idx: &Index, n: usize) -> Result<Vec<Vec<u8>>> {
    let k = axis_position(idx, n)?;
    let s = idx.seq();
    let (a, b) = (s[k - 1], s[k + 1]);
    Ok(cover::all_selections(n, false)
        .into_iter()
        .filter(|e| e[a - 1] == 0 && e[b - 1] == 0)
        .collect())
}

/// 0-based position of `n + 1` in `idx`, which must be interior.
fn axis_position(idx: &Index, n: usize) -> Result<usize> {
    let s = idx.seq();
    if s.len() != n + 1 || !idx.non_repeated() || s.iter().any(|&i| i > n + 1) {
        return Err(Error::InvalidIndex(format!("{idx} is not a non-repeated sequence over 1..={}", n + 1)));
    }
    match s.iter().position(|&i| i == n + 1) {
        Some(k) if k >= 1 && k + 1 < s.len() => Ok(k),
        _ => Err(Error::InvalidIndex(format!("{} must sit strictly inside {idx}", n + 1))),
    }
}

/// Admissible indices for an `(n+1)`-component link, in lexicographic order.
pub fn admissible_indices(n: usize) -> Vec<Index> {
    Index::all(n + 1, n + 1, true).into_iter().filter(|i| axis_position(i, n).is_ok()).collect()
}

/// Residue mod 2 of `mubar`, when `delta` makes it well defined.
pub fn mod2(r: &MuResult) -> Option<u8> {
    if r.delta.is_zero() || r.delta.is_even() {
        Some(if r.mubar.is_odd() { 1 } else { 0 })
    } else {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Indeterminate,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Indeterminate => "indeterminate",
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub name: Option<String>,
    pub index: Index,
    /// 1-based position of the axis in `index`.
    pub k: usize,
    pub lhs: MuResult,
    pub per_eps: Vec<MSetEntry>,
    /// Integer sum of the per-selection `mubar` values.
    pub rhs_sum: BigInt,
    pub lhs_mod2: Option<u8>,
    pub rhs_mod2: Option<u8>,
    pub verdict: Verdict,
}

impl VerifyReport {
    /// Both sides agree mod 2 but differ as integers.
    pub fn strict(&self) -> bool {
        self.verdict == Verdict::Pass && self.lhs.mubar != self.rhs_sum
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "I": self.index.to_string(),
            "k": self.k,
            "E": self.per_eps.iter().map(|e| eps_string(&e.eps)).collect::<Vec<_>>(),
            "lhs": {
                "mu": bigint_json(&self.lhs.mu),
                "delta": bigint_json(&self.lhs.delta),
                "mubar": bigint_json(&self.lhs.mubar),
                "mod2": self.lhs_mod2,
            },
            "per_eps": self.per_eps.iter().map(|e| json!({
                "eps": eps_string(&e.eps),
                "mu": bigint_json(&e.result.mu),
                "delta": bigint_json(&e.result.delta),
                "mubar": bigint_json(&e.result.mubar),
            })).collect::<Vec<_>>(),
            "rhs": {"sum": bigint_json(&self.rhs_sum), "mod2": self.rhs_mod2},
            "verdict": self.verdict.as_str(),
        })
    }
}

pub fn eps_string(eps: &[u8]) -> String {
    eps.iter().map(|b| b.to_string()).collect()
}

/// All sequences of length `len` over `labels`.
fn sequences(labels: &[usize], len: usize) -> Vec<Index> {
    Index::all(labels.len(), len, false)
        .into_iter()
        .filter_map(|i| Index::new(i.seq().iter().map(|&p| labels[p - 1]).collect()).ok())
        .collect()
}

/// Checks that every invariant of length `<= n` vanishes on each sublink
/// missing one component of the `(n+1)`-component diagram `d`.
pub fn check_brunnian(d: &PDiagram, q: usize) -> Result<()> {
    let total = d.component_count();
    if total < 2 {
        return Ok(());
    }
    let n = total - 1;
    if q < n {
        return Err(Error::TruncationExceeded { len: n, q });
    }
    for drop in 0..total {
        let keep: Vec<usize> = (0..total).filter(|&c| c != drop).collect();
        let sub = d.sublink(&keep)?;
        let labels = sub.labels();
        let e = MilnorEngine::new(&sub, Modulus::INTEGERS, q)?;
        for len in 2..=n {
            for idx in sequences(&labels, len) {
                let m = e.mu(&idx)?;
                if !m.is_zero() {
                    return Err(Error::Hypothesis(format!(
                        "without component {}, mu({idx}) = {m}",
                        d.components[drop].label
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Computes both sides of the congruence for `idx` on the word `t` with its axis.
pub fn verify_mod2(t: &TangleWord, idx: &Index, q: usize, exec: Exec) -> Result<VerifyReport> {
    let n = t.component_count();
    let k = axis_position(idx, n)?;
    let eps = eps_set(idx, n)?;
    let marked = t.insert_axis()?;
    check_brunnian(&marked.diagram, q)?;
    let lhs = MilnorEngine::new(&marked.diagram, Modulus::INTEGERS, q)?.mu_bar(idx)?;
    let reduced = Index::new(idx.seq().iter().copied().filter(|&i| i != n + 1).collect())?;
    let model = double_cover(t)?;
    let per_eps = cover::mu_bar_over(&model, &eps, &reduced, Modulus::INTEGERS, q, exec)?;
    let rhs_sum: BigInt = per_eps.iter().map(|e| e.result.mubar.clone()).sum();
    let lhs_mod2 = mod2(&lhs);
    let rhs_mod2 = per_eps
        .iter()
        .map(|e| mod2(&e.result))
        .try_fold(0u8, |acc, r| r.map(|r| acc ^ r));
    let verdict = match (lhs_mod2, rhs_mod2) {
        (Some(a), Some(b)) if a == b => Verdict::Pass,
        (Some(_), Some(_)) => Verdict::Fail,
        _ => Verdict::Indeterminate,
    };
    Ok(VerifyReport {
        name: t.name().map(String::from),
        index: idx.clone(),
        k: k + 1,
        lhs,
        per_eps,
        rhs_sum,
        lhs_mod2,
        rhs_mod2,
        verdict,
    })
}

/// Every admissible index of `t`.
pub fn verify_all(t: &TangleWord, q: usize, exec: Exec) -> Result<Vec<VerifyReport>> {
    admissible_indices(t.component_count()).iter().map(|i| verify_mod2(t, i, q, exec)).collect()
}

/// Band sum of `1..=max_terms` random Milnor links on `n + 1` components.
pub fn random_band_sum(n: usize, max_terms: usize, rng: &mut impl Rng) -> Result<TangleWord> {
    let terms = rng.gen_range(1..=max_terms.max(1));
    let mut acc: Option<TangleWord> = None;
    let mut parts = Vec::new();
    for _ in 0..terms {
        let mut idx: Vec<usize> = (1..=n + 1).collect();
        idx.shuffle(rng);
        let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
        let m = milnor_link(&MilnorLinkSpec::new(idx, sign)?)?;
        parts.push(m.name().unwrap_or("m").to_string());
        acc = Some(match acc {
            None => m,
            Some(a) => band_sum(&a, &m)?,
        });
    }
    Ok(acc.expect("at least one term").with_name(parts.join("&")))
}

/// Seeded sweep over random band sums; one report list per sample.
pub fn sweep(n: usize, samples: usize, max_terms: usize, seed: u64, q: usize, exec: Exec) -> Result<Vec<Vec<VerifyReport>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words = (0..samples).map(|_| random_band_sum(n, max_terms, &mut rng)).collect::<Result<Vec<_>>>()?;
    par::map(exec, &words, |w| verify_all(w, q, Exec::Sequential)).into_iter().collect()
}

#[derive(Debug, Clone)]
pub struct DiscriminatorReport {
    /// `(I, mubar on L, mubar on L')` for every `I` with `2 <= |I| <= max_len`.
    pub ordinary: Vec<(Index, MuResult, MuResult)>,
    pub m_l: MSet,
    pub m_lprime: MSet,
}

impl DiscriminatorReport {
    pub fn ordinary_agree(&self) -> bool {
        self.ordinary.iter().all(|(_, a, b)| a.mubar == b.mubar)
    }

    pub fn distinguished(&self) -> bool {
        self.m_l.values() != self.m_lprime.values() && self.m_l.negated_values() != self.m_lprime.values()
    }

    pub fn pass(&self) -> bool {
        self.ordinary_agree() && self.distinguished()
    }
}

/// Compares `borromean_axis3` and `Lprime`: ordinary invariants up to length
/// `max_len` agree, covering sets for `12` differ.
pub fn homotopy_discriminator(max_len: usize, q: usize, exec: Exec) -> Result<DiscriminatorReport> {
    let l = corpus_word("borromean_axis3")?;
    let lp = corpus_word("Lprime")?;
    let el = MilnorEngine::new(&l.insert_axis()?.diagram, Modulus::INTEGERS, q)?;
    let elp = MilnorEngine::new(&lp.insert_axis()?.diagram, Modulus::INTEGERS, q)?;
    let indices: Vec<Index> = (2..=max_len).flat_map(|len| Index::all(3, len, false)).collect();
    let ordinary = par::map(exec, &indices, |i| -> Result<_> { Ok((i.clone(), el.mu_bar(i)?, elp.mu_bar(i)?)) })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let i12 = Index::parse("12")?;
    Ok(DiscriminatorReport {
        ordinary,
        m_l: cover::m_set(&l, &i12, Modulus::INTEGERS, q, exec)?,
        m_lprime: cover::m_set(&lp, &i12, Modulus::INTEGERS, q, exec)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(s: &str) -> Index {
        Index::parse(s).unwrap()
    }

    #[test]
    fn eps_sets() {
        assert_eq!(eps_set(&idx("132"), 2).unwrap(), vec![vec![0, 0]]);
        assert_eq!(eps_set(&idx("1423"), 3).unwrap(), vec![vec![0, 0, 0], vec![0, 0, 1]]);
        assert!(matches!(eps_set(&idx("312"), 2), Err(Error::InvalidIndex(_))));
        assert!(matches!(eps_set(&idx("12"), 2), Err(Error::InvalidIndex(_))));
        assert_eq!(eps_set(&idx("21534"), 4).unwrap().len(), 4);
    }

    #[test]
    fn admissible_counts() {
        assert_eq!(admissible_indices(2).len(), 2);
        assert_eq!(admissible_indices(3).len(), 12);
    }

    #[test]
    fn mod2_needs_even_delta() {
        let r = |mu: i64, d: i64| MuResult::from_parts(mu.into(), d.into());
        assert_eq!(mod2(&r(-1, 0)), Some(1));
        assert_eq!(mod2(&r(3, 4)), Some(1));
        assert_eq!(mod2(&r(3, 3)), None);
    }

    #[test]
    fn trivial_link_passes() {
        let t = corpus_word("trivial_3").unwrap();
        let r = verify_mod2(&t, &idx("132"), 4, Exec::Sequential).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.rhs_sum.is_zero());
    }

    #[test]
    fn non_brunnian_input_is_rejected() {
        let t = crate::tanglediag::parse_tangle("m=0; A1 A3 X2+ X2+ U3 U1").unwrap();
        assert!(matches!(verify_mod2(&t, &idx("132"), 4, Exec::Sequential), Err(Error::Hypothesis(_))));
    }
}
