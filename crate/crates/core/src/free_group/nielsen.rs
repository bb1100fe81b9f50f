use std::collections::{HashMap, VecDeque};

use rand::Rng;

use super::{GroupMap, Word};
use crate::error::{Error, Result};

/// Cap on the number of tuples visited while searching a length plateau.
const PLATEAU_LIMIT: usize = 200_000;

/// `u_i <- u_i * u_j^e` (`right`) or `u_i <- u_j^e * u_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Move {
    i: usize,
    j: usize,
    right: bool,
    inverse: bool,
}

impl Move {
    fn apply(&self, t: &mut [Word]) {
        let f = if self.inverse { t[self.j].inverse() } else { t[self.j].clone() };
        t[self.i] = if self.right { t[self.i].mul(&f) } else { f.mul(&t[self.i]) };
    }

    /// All moves in the fixed search order.
    fn all(n: usize) -> impl Iterator<Item = Move> {
        (0..n).flat_map(move |i| {
            (0..n).filter(move |&j| j != i).flat_map(move |j| {
                [(true, false), (true, true), (false, false), (false, true)]
                    .into_iter()
                    .map(move |(right, inverse)| Move { i, j, right, inverse })
            })
        })
    }

    fn new_length(&self, t: &[Word]) -> usize {
        let mut u = t.to_vec();
        self.apply(&mut u);
        u[self.i].len()
    }
}

/// Result of reducing a tuple by elementary Nielsen moves, together with the
/// record needed to express the reduced tuple in terms of the original one.
#[derive(Clone, Debug)]
pub struct NielsenReduction {
    rank: usize,
    reduced: Vec<Word>,
    /// `track[k]` is `reduced[k]` written in letters standing for the
    /// original entries.
    track: Vec<Word>,
}

impl NielsenReduction {
    pub fn run(tuple: &[Word]) -> Result<NielsenReduction> {
        let rank = tuple.first().map_or(0, |w| w.rank());
        let n = tuple.len();
        let mut cur = tuple.to_vec();
        let mut track: Vec<Word> = (1..=n).map(|k| Word::generator(n, k)).collect();
        loop {
            if cur.iter().any(|w| w.is_identity()) {
                break;
            }
            let reducing = Move::all(n).find(|m| m.new_length(&cur) < cur[m.i].len());
            let path = match reducing {
                Some(m) => vec![m],
                None => match plateau_escape(&cur)? {
                    Some(path) => path,
                    None => break,
                },
            };
            for m in path {
                m.apply(&mut cur);
                m.apply(&mut track);
            }
        }
        Ok(NielsenReduction { rank, reduced: cur, track })
    }

    pub fn reduced(&self) -> &[Word] {
        &self.reduced
    }

    /// Whether the reduced tuple is a signed permutation of the generators.
    pub fn is_basis(&self) -> bool {
        self.reduced.len() == self.rank && self.signed_permutation().is_some()
    }

    fn signed_permutation(&self) -> Option<Vec<(usize, bool)>> {
        let mut seen = vec![false; self.rank];
        let mut out = Vec::new();
        for w in &self.reduced {
            if w.len() != 1 {
                return None;
            }
            let l = w.letters()[0];
            let k = l.unsigned_abs() as usize - 1;
            if std::mem::replace(&mut seen[k], true) {
                return None;
            }
            out.push((k, l < 0));
        }
        Some(out)
    }

    /// If the original tuple `m` is a basis, the inverse of `x_k -> m[k]`.
    pub fn inverse(&self) -> Option<GroupMap> {
        if !self.is_basis() {
            return None;
        }
        let perm = self.signed_permutation()?;
        let mut images = vec![Word::identity(self.rank); self.rank];
        // m(track[k]) = x_{perm k}^{sign}, so m^-1(x_{perm k}) = track[k]^{sign}
        for (k, &(target, negated)) in perm.iter().enumerate() {
            images[target] = if negated { self.track[k].inverse() } else { self.track[k].clone() };
        }
        GroupMap::from_images(self.rank, images).ok()
    }
}

/// Breadth-first search over tuples of equal total length for one admitting a
/// length-reducing move. Returns the move sequence ending with that move.
fn plateau_escape(start: &[Word]) -> Result<Option<Vec<Move>>> {
    let n = start.len();
    let mut parent: HashMap<Vec<Word>, Option<(Vec<Word>, Move)>> = HashMap::new();
    parent.insert(start.to_vec(), None);
    let mut queue = VecDeque::from([start.to_vec()]);
    while let Some(t) = queue.pop_front() {
        for m in Move::all(n) {
            let new_len = m.new_length(&t);
            let old_len = t[m.i].len();
            if new_len < old_len {
                let mut path = vec![m];
                let mut at = t.clone();
                while let Some(Some((prev, pm))) = parent.get(&at) {
                    path.push(*pm);
                    at = prev.clone();
                }
                path.reverse();
                return Ok(Some(path));
            }
            if new_len == old_len {
                let mut u = t.clone();
                m.apply(&mut u);
                if !parent.contains_key(&u) {
                    if parent.len() >= PLATEAU_LIMIT {
                        return Err(Error::SearchLimit);
                    }
                    parent.insert(u.clone(), Some((t.clone(), m)));
                    queue.push_back(u);
                }
            }
        }
    }
    Ok(None)
}

/// Transpositions, inversions and the one-sided multiplications
/// `x_i -> x_i x_j^±1`, `x_i -> x_j^±1 x_i`.
pub fn nielsen_generators(rank: usize) -> Vec<GroupMap> {
    let gens: Vec<Word> = (1..=rank).map(|k| Word::generator(rank, k)).collect();
    let mut out = Vec::new();
    for i in 0..rank {
        for j in i + 1..rank {
            let mut t = gens.clone();
            t.swap(i, j);
            out.push(t);
        }
    }
    for i in 0..rank {
        let mut t = gens.clone();
        t[i] = t[i].inverse();
        out.push(t);
    }
    for i in 0..rank {
        for j in 0..rank {
            if i == j {
                continue;
            }
            for f in [gens[j].clone(), gens[j].inverse()] {
                let mut t = gens.clone();
                t[i] = gens[i].mul(&f);
                out.push(t.clone());
                t[i] = f.mul(&gens[i]);
                out.push(t);
            }
        }
    }
    out.into_iter().map(|t| GroupMap::from_images(rank, t).expect("rank matches")).collect()
}

/// A product of between 1 and `max_len` Nielsen generators.
pub fn random_automorphism<R: Rng + ?Sized>(rank: usize, max_len: usize, rng: &mut R) -> GroupMap {
    let gens = nielsen_generators(rank);
    let mut a = GroupMap::identity(rank);
    if gens.is_empty() {
        return a;
    }
    let len = rng.gen_range(1..=max_len.max(1));
    for _ in 0..len {
        let g = &gens[rng.gen_range(0..gens.len())];
        a = g.compose(&a).expect("same rank");
    }
    a
}
