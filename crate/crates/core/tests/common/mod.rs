//! Shared helpers for integration tests: random words and independent oracles.
#![allow(dead_code)]

use milnor_cover::tanglediag::{MorseEvent, TangleWord};
use rand::Rng;

/// Random valid word of width `m` with about `len` events.
pub fn random_word<R: Rng>(rng: &mut R, m: usize, len: usize) -> TangleWord {
    let mut events = Vec::new();
    let mut w = m;
    for _ in 0..len {
        let choice = rng.gen_range(0..4);
        if choice < 2 && w >= 2 {
            events.push(MorseEvent::Cross { pos: rng.gen_range(1..w), positive: rng.gen() });
        } else if choice == 2 && w >= 2 {
            events.push(MorseEvent::Cup { pos: rng.gen_range(1..w) });
            w -= 2;
        } else {
            events.push(MorseEvent::Cap { pos: rng.gen_range(1..=w + 1) });
            w += 2;
        }
    }
    while w > m {
        events.push(MorseEvent::Cup { pos: rng.gen_range(1..w) });
        w -= 2;
    }
    while w < m {
        events.push(MorseEvent::Cap { pos: rng.gen_range(1..=w + 1) });
        w += 2;
    }
    TangleWord::new(m, events, None, None).expect("generated word is valid")
}

/// Linking data of a word computed by walking its strands directly.
pub struct LinkingOracle {
    /// `lk[a][b]` for link labels `a, b` (1-based; index 0 unused).
    pub lk: Vec<Vec<i64>>,
    /// Signed passes through the cut per label.
    pub axis: Vec<i64>,
}

/// Walks the closure of `w`, orients each component to agree with the
/// library's orientation at one segment, and sums crossing signs.
pub fn linking_oracle(w: &TangleWord) -> LinkingOracle {
    let ev = w.events();
    let e = ev.len();
    let mut widths = vec![w.width()];
    for x in ev {
        let last = *widths.last().unwrap();
        widths.push(match x {
            MorseEvent::Cross { .. } => last,
            MorseEvent::Cup { .. } => last - 2,
            MorseEvent::Cap { .. } => last + 2,
        });
    }
    // End points: (layer, slot, bottom?). Layer e is identified with layer 0.
    let norm = |l: usize| if l == e { 0 } else { l };
    let partner = |l: usize, s: usize, bottom: bool| -> (usize, usize, bool) {
        if bottom {
            match ev.get(l) {
                None => (0, s, false),
                Some(MorseEvent::Cross { pos, .. }) => {
                    let i = pos - 1;
                    let t = if s == i { i + 1 } else if s == i + 1 { i } else { s };
                    (norm(l + 1), t, false)
                }
                Some(MorseEvent::Cup { pos }) => {
                    let i = pos - 1;
                    if s == i {
                        (l, i + 1, true)
                    } else if s == i + 1 {
                        (l, i, true)
                    } else {
                        (norm(l + 1), if s < i { s } else { s - 2 }, false)
                    }
                }
                Some(MorseEvent::Cap { pos }) => {
                    let i = pos - 1;
                    (norm(l + 1), if s < i { s } else { s + 2 }, false)
                }
            }
        } else {
            let (pl, prev) = if l == 0 { (e, ev.last()) } else { (l, ev.get(l - 1)) };
            let above = pl.wrapping_sub(1);
            match prev {
                None => (0, s, true),
                Some(MorseEvent::Cross { pos, .. }) => {
                    let i = pos - 1;
                    let t = if s == i { i + 1 } else if s == i + 1 { i } else { s };
                    (above, t, true)
                }
                Some(MorseEvent::Cap { pos }) => {
                    let i = pos - 1;
                    if s == i {
                        (l, i + 1, false)
                    } else if s == i + 1 {
                        (l, i, false)
                    } else {
                        (above, if s < i { s } else { s - 2 }, true)
                    }
                }
                Some(MorseEvent::Cup { pos }) => {
                    let i = pos - 1;
                    (above, if s < i { s } else { s + 2 }, true)
                }
            }
        }
    };
    // owner[l][s] = (oracle component, traversed downward)
    let mut owner: Vec<Vec<Option<(usize, bool)>>> = widths[..e.max(1)].iter().map(|&k| vec![None; k]).collect();
    if e == 0 {
        owner = vec![vec![None; w.width()]];
    }
    let mut ncomp = 0;
    for l in 0..owner.len() {
        for s0 in 0..owner[l].len() {
            if owner[l][s0].is_some() {
                continue;
            }
            let (mut cl, mut cs, mut down) = (l, s0, true);
            while owner[cl][cs].is_none() {
                owner[cl][cs] = Some((ncomp, down));
                let (nl, ns, nb) = partner(cl, cs, down);
                // Arriving at a top end means we now move down, and vice versa.
                cl = nl;
                cs = ns;
                down = !nb;
            }
            ncomp += 1;
        }
    }
    let tracing = w.trace().unwrap();
    let mut label = vec![0usize; ncomp];
    let mut flip = vec![1i64; ncomp];
    for (l, row) in owner.iter().enumerate() {
        for (s, o) in row.iter().enumerate() {
            let (c, down) = o.unwrap();
            if label[c] == 0 {
                let (tid, dir) = tracing.at((l, s)).unwrap();
                label[c] = w.labels()[tid];
                let lib_down = (dir == milnor_cover::tanglediag::Dir::Down) != w.reversed()[tid];
                flip[c] = if lib_down == down { 1 } else { -1 };
            }
        }
    }
    assert_eq!(ncomp, w.component_count(), "oracle component count");
    let n = ncomp;
    let mut lk = vec![vec![0i64; n + 1]; n + 1];
    for (l, x) in ev.iter().enumerate() {
        if let MorseEvent::Cross { pos, positive } = *x {
            let i = pos - 1;
            let (ca, da) = owner[l][i].unwrap();
            let (cb, db) = owner[l][i + 1].unwrap();
            if ca == cb {
                continue;
            }
            let mut sign = if positive { 1 } else { -1 };
            if da != db {
                sign = -sign;
            }
            sign *= flip[ca] * flip[cb];
            lk[label[ca]][label[cb]] += sign;
            lk[label[cb]][label[ca]] += sign;
        }
    }
    for row in lk.iter_mut() {
        for v in row.iter_mut() {
            assert!(*v % 2 == 0, "odd crossing count between components");
            *v /= 2;
        }
    }
    let mut axis = vec![0i64; n + 1];
    for (s, o) in owner[0].iter().enumerate() {
        let _ = s;
        let (c, down) = o.unwrap();
        axis[label[c]] += if down { flip[c] } else { -flip[c] };
    }
    LinkingOracle { lk, axis }
}
