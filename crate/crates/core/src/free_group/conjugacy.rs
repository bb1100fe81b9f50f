use std::cmp::Ordering;
use std::collections::{BTreeSet, VecDeque};

use super::Word;
use crate::error::{Error, Result};

/// Finds `w` with `t1[k] = w * t2[k] * w^-1` for every `k`.
pub fn tuples_conjugate(t1: &[Word], t2: &[Word]) -> Result<Option<Word>> {
    if t1.len() != t2.len() {
        return Err(Error::LengthMismatch(t1.len(), t2.len()));
    }
    let rank = match t1.first().or(t2.first()) {
        Some(w) => w.rank(),
        None => return Ok(Some(Word::identity(0))),
    };
    for w in t1.iter().chain(t2) {
        if w.rank() != rank {
            return Err(Error::RankMismatch { expected: rank, found: w.rank() });
        }
    }
    let Some(k0) = (0..t1.len()).find(|&k| !t1[k].is_identity() || !t2[k].is_identity()) else {
        return Ok(Some(Word::identity(rank)));
    };
    let (u, v) = (&t1[k0], &t2[k0]);
    let Some(w0) = conjugator(u, v) else {
        return Ok(None);
    };
    // every solution of u = w v w^-1 lies in w0 <r> with r the root of v
    let r = root(v);
    let bound = 2 * w0.len()
        + t1.iter().map(Word::len).max().unwrap_or(0)
        + t2.iter().map(Word::len).max().unwrap_or(0)
        + 2 * r.len()
        + 2;
    let solves = |w: &Word| t1.iter().zip(t2).all(|(a, b)| b.conjugate_by(w) == *a);
    let mut step_up = w0.clone();
    let mut step_down = w0.clone();
    if solves(&w0) {
        return Ok(Some(w0));
    }
    let r_inv = r.inverse();
    for _ in 0..bound {
        step_up = step_up.mul(&r);
        if solves(&step_up) {
            return Ok(Some(step_up));
        }
        step_down = step_down.mul(&r_inv);
        if solves(&step_down) {
            return Ok(Some(step_down));
        }
    }
    Ok(None)
}

/// Some `w` with `u = w v w^-1`, if the two are conjugate.
fn conjugator(u: &Word, v: &Word) -> Option<Word> {
    let (a, cu) = u.cyclic_decomposition();
    let (b, cv) = v.cyclic_decomposition();
    if cu.len() != cv.len() {
        return None;
    }
    let n = cu.len();
    if n == 0 {
        return Some(a.mul(&b.inverse()));
    }
    // cu = p q and cv = q p give cu = p cv p^-1
    for s in 0..n {
        let rotated: Vec<i32> = cu.letters()[s..].iter().chain(&cu.letters()[..s]).copied().collect();
        if rotated == cv.letters() {
            let p = Word::reduce(u.rank(), &cu.letters()[..s]).expect("letters in range");
            return Some(a.mul(&p).mul(&b.inverse()));
        }
    }
    None
}

/// The generator of the centralizer of a nontrivial `v`: its maximal root.
fn root(v: &Word) -> Word {
    let (c, core) = v.cyclic_decomposition();
    let n = core.len();
    let period = (1..=n).find(|&d| n % d == 0 && (0..n).all(|k| core.letters()[k] == core.letters()[k % d])).unwrap_or(n);
    let base = Word::reduce(v.rank(), &core.letters()[..period]).expect("letters in range");
    base.conjugate_by(&c)
}

/// Canonical representative of a tuple under simultaneous conjugation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm {
    pub words: Vec<Word>,
    /// `words[k] = conjugator * input[k] * conjugator^-1`.
    pub conjugator: Word,
}

/// Among all conjugates of minimal total length, the one whose word list is
/// least in shortlex order. Total length is convex along geodesics of the
/// Cayley tree, so single-letter conjugations reach the minimum and the
/// minimizing tuples form one connected plateau.
pub fn conjugacy_normal_form(t: &[Word]) -> NormalForm {
    let rank = t.first().map_or(0, Word::rank);
    let total = |u: &[Word]| u.iter().map(Word::len).sum::<usize>();
    let letters: Vec<Word> = (1..=rank as i32)
        .flat_map(|k| [k, -k])
        .map(|l| Word::reduce(rank, &[l]).expect("letter in range"))
        .collect();
    let conj = |u: &[Word], c: &Word| u.iter().map(|w| w.conjugate_by(c)).collect::<Vec<_>>();

    let mut cur = t.to_vec();
    let mut acc = Word::identity(rank);
    loop {
        let len = total(&cur);
        let better = letters.iter().find_map(|c| {
            let u = conj(&cur, c);
            (total(&u) < len).then_some((u, c.clone()))
        });
        match better {
            Some((u, c)) => {
                cur = u;
                acc = c.mul(&acc);
            }
            None => break,
        }
    }

    let len = total(&cur);
    let mut seen: BTreeSet<Vec<Vec<i32>>> = BTreeSet::new();
    seen.insert(cur.iter().map(|w| w.letters().to_vec()).collect());
    let mut queue = VecDeque::from([(cur.clone(), acc.clone())]);
    let mut best = (cur, acc);
    while let Some((u, c)) = queue.pop_front() {
        if tuple_cmp(&u, &best.0) == Ordering::Less {
            best = (u.clone(), c.clone());
        }
        for l in &letters {
            let next = conj(&u, l);
            if total(&next) == len && seen.insert(next.iter().map(|w| w.letters().to_vec()).collect()) {
                queue.push_back((next, l.mul(&c)));
            }
        }
    }
    NormalForm { words: best.0, conjugator: best.1 }
}

fn tuple_cmp(a: &[Word], b: &[Word]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.shortlex_cmp(y) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(l: &[i32]) -> Word {
        Word::reduce(2, l).unwrap()
    }

    #[test]
    fn hand_example() {
        let t1 = [w(&[1]), w(&[2])];
        let t2 = [w(&[2, 1, -2]), w(&[2])];
        let c = tuples_conjugate(&t1, &t2).unwrap().unwrap();
        assert_eq!(c, w(&[-2]));
    }

    #[test]
    fn non_conjugate_generators() {
        assert_eq!(tuples_conjugate(&[w(&[1])], &[w(&[2])]).unwrap(), None);
        assert!(tuples_conjugate(&[w(&[1])], &[]).is_err());
    }

    #[test]
    fn commuting_tuple_uses_root() {
        let r = w(&[1, 2]);
        let t2 = [r.pow(2), r.pow(-1)];
        let c = w(&[2, 2, 1]);
        let t1: Vec<Word> = t2.iter().map(|x| x.conjugate_by(&c)).collect();
        let found = tuples_conjugate(&t1, &t2).unwrap().unwrap();
        assert!(t2.iter().zip(&t1).all(|(b, a)| b.conjugate_by(&found) == *a));
    }

    #[test]
    fn basis_versus_transvected_basis() {
        assert_eq!(tuples_conjugate(&[w(&[1]), w(&[2])], &[w(&[1, 2]), w(&[2])]).unwrap(), None);
    }

    #[test]
    fn normal_form_is_conjugation_invariant() {
        let t = [w(&[1, 2, 2]), w(&[-1, 2])];
        let base = conjugacy_normal_form(&t);
        for c in [w(&[1]), w(&[2, -1, -1]), w(&[-2, 1, 2, 1])] {
            let u: Vec<Word> = t.iter().map(|x| x.conjugate_by(&c)).collect();
            let nf = conjugacy_normal_form(&u);
            assert_eq!(nf.words, base.words);
            let back: Vec<Word> = u.iter().map(|x| x.conjugate_by(&nf.conjugator)).collect();
            assert_eq!(back, nf.words);
        }
    }

    #[test]
    fn normal_form_of_a_single_power() {
        let nf = conjugacy_normal_form(&[w(&[-2, 1, 2, 1, 2, -1, 2])]);
        assert_eq!(nf.words[0].len(), 3);
    }
}
