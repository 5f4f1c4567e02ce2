use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num::BigInt;

use super::sym::Sym;

/// Multiset of differentiation directions, stored sorted so that u_xy and u_yx
/// are the same coordinate.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MultiIndex(Vec<Sym>);

impl MultiIndex {
    pub fn empty() -> Self {
        MultiIndex(Vec::new())
    }

    pub fn new(mut parts: Vec<Sym>) -> Self {
        parts.sort();
        MultiIndex(parts)
    }

    pub fn single(i: Sym) -> Self {
        MultiIndex(vec![i])
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn parts(&self) -> &[Sym] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = &Sym> {
        self.0.iter()
    }

    /// The multiset J ⊎ {i}.
    pub fn push(&self, i: &Sym) -> Self {
        let pos = self.0.partition_point(|s| s <= i);
        let mut parts = self.0.clone();
        parts.insert(pos, i.clone());
        MultiIndex(parts)
    }

    /// The multiset union J ⊎ K.
    pub fn join(&self, other: &Self) -> Self {
        let mut parts = Vec::with_capacity(self.0.len() + other.0.len());
        parts.extend_from_slice(&self.0);
        parts.extend_from_slice(&other.0);
        MultiIndex::new(parts)
    }

    pub fn count_of(&self, i: &Sym) -> usize {
        self.0.iter().filter(|s| *s == i).count()
    }

    /// Distinct directions with their counts, in direction order.
    pub fn counts(&self) -> Vec<(Sym, usize)> {
        let mut out: Vec<(Sym, usize)> = Vec::new();
        for s in &self.0 {
            match out.last_mut() {
                Some((t, c)) if t == s => *c += 1,
                _ => out.push((s.clone(), 1)),
            }
        }
        out
    }

    /// Number of ordered differentiation sequences collapsing to this multiset:
    /// |J|! / prod(count!).
    pub fn multiplicity(&self) -> BigInt {
        let mut m = factorial(self.0.len());
        for (_, c) in self.counts() {
            m /= factorial(c);
        }
        m
    }

    pub fn remove_one(&self, i: &Sym) -> Option<Self> {
        let pos = self.0.iter().position(|s| s == i)?;
        let mut parts = self.0.clone();
        parts.remove(pos);
        Some(MultiIndex(parts))
    }

    /// True when every entry equals `i` (vacuously true for the empty index).
    pub fn is_pure(&self, i: &Sym) -> bool {
        self.0.iter().all(|s| s == i)
    }

    /// Multiset difference self ∖ other, if other ⊆ self.
    pub fn try_minus(&self, other: &Self) -> Option<Self> {
        if other.0.len() > self.0.len() {
            return None;
        }
        let mut out = Vec::with_capacity(self.0.len() - other.0.len());
        let mut j = 0;
        for s in &self.0 {
            if j < other.0.len() {
                match s.cmp(&other.0[j]) {
                    std::cmp::Ordering::Equal => {
                        j += 1;
                        continue;
                    }
                    // `other` holds something smaller than anything left here.
                    std::cmp::Ordering::Greater => return None,
                    std::cmp::Ordering::Less => {}
                }
            }
            out.push(s.clone());
        }
        if j == other.0.len() {
            Some(MultiIndex(out))
        } else {
            None
        }
    }

    /// All ways of writing J = A ⊎ B as multisets.
    pub fn splits(&self) -> Vec<(MultiIndex, MultiIndex)> {
        let counts = self.counts();
        let mut out = vec![(Vec::new(), Vec::new())];
        for (sym, c) in &counts {
            let mut next = Vec::with_capacity(out.len() * (c + 1));
            for (a, b) in &out {
                for k in 0..=*c {
                    let mut a2 = a.clone();
                    let mut b2 = b.clone();
                    a2.extend(std::iter::repeat_with(|| sym.clone()).take(k));
                    b2.extend(std::iter::repeat_with(|| sym.clone()).take(c - k));
                    next.push((a2, b2));
                }
            }
            out = next;
        }
        out.into_iter()
            .map(|(a, b)| (MultiIndex(a), MultiIndex(b)))
            .collect()
    }
}

fn factorial(n: usize) -> BigInt {
    let mut f = BigInt::from(1);
    for k in 2..=n {
        f *= BigInt::from(k);
    }
    f
}

/// Graded order: by total order first, then lexicographic on the sorted parts.
impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

/// Leaf symbol of the expression kernel.
///
/// `Jet { dep, index: [] }` is the dependent variable itself; `Func` carries an
/// arbitrary-function symbol together with the multiset of directions it has
/// been differentiated in (all of which must be among its declared arguments).
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Atom {
    Indep(Sym),
    Jet { dep: Sym, index: MultiIndex },
    Func { name: Sym, args: Arc<Vec<Sym>>, index: MultiIndex },
}

impl Atom {
    pub fn indep(s: impl Into<Sym>) -> Self {
        Atom::Indep(s.into())
    }

    pub fn jet(dep: impl Into<Sym>, index: MultiIndex) -> Self {
        Atom::Jet { dep: dep.into(), index }
    }

    pub fn dep(dep: impl Into<Sym>) -> Self {
        Atom::Jet { dep: dep.into(), index: MultiIndex::empty() }
    }

    pub fn func(name: impl Into<Sym>, args: Vec<Sym>, index: MultiIndex) -> Self {
        Atom::Func { name: name.into(), args: Arc::new(args), index }
    }

    /// Differentiation order carried by the atom (0 for independents).
    pub fn order(&self) -> usize {
        match self {
            Atom::Indep(_) => 0,
            Atom::Jet { index, .. } | Atom::Func { index, .. } => index.order(),
        }
    }

    pub fn index(&self) -> Option<&MultiIndex> {
        match self {
            Atom::Indep(_) => None,
            Atom::Jet { index, .. } | Atom::Func { index, .. } => Some(index),
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Atom::Indep(_) => 0,
            Atom::Jet { .. } => 1,
            Atom::Func { .. } => 2,
        }
    }
}

impl Ord for Atom {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank().cmp(&other.rank()).then_with(|| match (self, other) {
            (Atom::Indep(a), Atom::Indep(b)) => a.cmp(b),
            (Atom::Jet { dep: d1, index: i1 }, Atom::Jet { dep: d2, index: i2 }) => {
                d1.cmp(d2).then_with(|| i1.cmp(i2))
            }
            (
                Atom::Func { name: n1, args: a1, index: i1 },
                Atom::Func { name: n2, args: a2, index: i2 },
            ) => n1.cmp(n2).then_with(|| a1.cmp(a2)).then_with(|| i1.cmp(i2)),
            _ => unreachable!("rank already distinguished the variants"),
        })
    }
}

impl PartialOrd for Atom {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
