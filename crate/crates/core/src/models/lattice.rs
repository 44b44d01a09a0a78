//! Finite bounded lattices given by their order.

use super::ModelError;

pub type Elem = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lattice {
    n: usize,
    leq: Vec<bool>,
    meet: Vec<Elem>,
    join: Vec<Elem>,
    bot: Elem,
    top: Elem,
}

impl Lattice {
    /// Builds a lattice from a full order relation, checking the partial-order
    /// and lattice axioms.
    pub fn from_order(n: usize, leq: Vec<bool>) -> Result<Lattice, ModelError> {
        if n == 0 {
            return Err(ModelError::NotALattice("empty carrier".into()));
        }
        assert_eq!(leq.len(), n * n);
        let le = |a: usize, b: usize| leq[a * n + b];
        for a in 0..n {
            if !le(a, a) {
                return Err(ModelError::NotALattice(format!("not reflexive at {}", a)));
            }
            for b in 0..n {
                if a != b && le(a, b) && le(b, a) {
                    return Err(ModelError::NotALattice(format!("not antisymmetric at ({}, {})", a, b)));
                }
                for c in 0..n {
                    if le(a, b) && le(b, c) && !le(a, c) {
                        return Err(ModelError::NotALattice(format!("not transitive at ({}, {}, {})", a, b, c)));
                    }
                }
            }
        }
        let mut meet = vec![0; n * n];
        let mut join = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                let lower: Vec<usize> = (0..n).filter(|&x| le(x, a) && le(x, b)).collect();
                let glb = lower.iter().copied().find(|&x| lower.iter().all(|&y| le(y, x)));
                let upper: Vec<usize> = (0..n).filter(|&x| le(a, x) && le(b, x)).collect();
                let lub = upper.iter().copied().find(|&x| upper.iter().all(|&y| le(x, y)));
                match (glb, lub) {
                    (Some(g), Some(l)) => {
                        meet[a * n + b] = g;
                        join[a * n + b] = l;
                    }
                    (None, _) => return Err(ModelError::NotALattice(format!("no meet of {} and {}", a, b))),
                    (_, None) => return Err(ModelError::NotALattice(format!("no join of {} and {}", a, b))),
                }
            }
        }
        let bot = (0..n).find(|&x| (0..n).all(|y| le(x, y)));
        let top = (0..n).find(|&x| (0..n).all(|y| le(y, x)));
        match (bot, top) {
            (Some(bot), Some(top)) => Ok(Lattice { n, leq, meet, join, bot, top }),
            _ => Err(ModelError::NotALattice("missing bounds".into())),
        }
    }

    /// Builds a lattice from generating pairs, taking the reflexive-transitive closure.
    pub fn from_pairs(n: usize, pairs: &[(Elem, Elem)]) -> Result<Lattice, ModelError> {
        let mut leq = vec![false; n * n];
        for a in 0..n {
            leq[a * n + a] = true;
        }
        for &(a, b) in pairs {
            if a >= n || b >= n {
                return Err(ModelError::NotALattice(format!("element out of range in ({}, {})", a, b)));
            }
            leq[a * n + b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if leq[i * n + k] {
                    for j in 0..n {
                        if leq[k * n + j] {
                            leq[i * n + j] = true;
                        }
                    }
                }
            }
        }
        Lattice::from_order(n, leq)
    }

    pub fn chain(n: usize) -> Lattice {
        let pairs: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Lattice::from_pairs(n, &pairs).expect("chains are lattices")
    }

    /// The four-element lattice 2x2: 0 < 1, 2 < 3.
    pub fn diamond() -> Lattice {
        Lattice::from_pairs(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]).expect("2x2 is a lattice")
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.n
    }

    pub fn leq(&self, a: Elem, b: Elem) -> bool {
        self.leq[a * self.n + b]
    }

    pub fn meet(&self, a: Elem, b: Elem) -> Elem {
        self.meet[a * self.n + b]
    }

    pub fn join(&self, a: Elem, b: Elem) -> Elem {
        self.join[a * self.n + b]
    }

    pub fn bot(&self) -> Elem {
        self.bot
    }

    pub fn top(&self) -> Elem {
        self.top
    }

    pub fn join_all(&self, items: impl IntoIterator<Item = Elem>) -> Elem {
        items.into_iter().fold(self.bot, |a, b| self.join(a, b))
    }

    pub fn meet_all(&self, items: impl IntoIterator<Item = Elem>) -> Elem {
        items.into_iter().fold(self.top, |a, b| self.meet(a, b))
    }

    /// The order dual on the same carrier.
    pub fn dual(&self) -> Lattice {
        let n = self.n;
        let mut leq = vec![false; n * n];
        for a in 0..n {
            for b in 0..n {
                leq[a * n + b] = self.leq(b, a);
            }
        }
        Lattice { n, leq, meet: self.join.clone(), join: self.meet.clone(), bot: self.top, top: self.bot }
    }

    pub fn is_distributive(&self) -> bool {
        self.elements().all(|a| {
            self.elements().all(|b| {
                self.elements().all(|c| self.meet(a, self.join(b, c)) == self.join(self.meet(a, b), self.meet(a, c)))
            })
        })
    }

    /// Pairs `(a, b)` with `a < b` and nothing strictly between.
    pub fn covers(&self) -> Vec<(Elem, Elem)> {
        let mut out = Vec::new();
        for a in self.elements() {
            for b in self.elements() {
                if a != b
                    && self.leq(a, b)
                    && !self.elements().any(|c| c != a && c != b && self.leq(a, c) && self.leq(c, b))
                {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_ops() {
        let c = Lattice::chain(3);
        assert_eq!(c.meet(1, 2), 1);
        assert_eq!(c.join(0, 2), 2);
        assert_eq!((c.bot(), c.top()), (0, 2));
    }

    #[test]
    fn diamond_ops() {
        let d = Lattice::diamond();
        assert_eq!(d.meet(1, 2), 0);
        assert_eq!(d.join(1, 2), 3);
        assert!(d.is_distributive());
        assert_eq!(d.covers().len(), 4);
    }

    #[test]
    fn rejects_non_lattice() {
        // Two incomparable maximal elements.
        let err = Lattice::from_pairs(3, &[(0, 1), (0, 2)]).unwrap_err();
        assert!(matches!(err, ModelError::NotALattice(_)));
    }

    #[test]
    fn dual_swaps_bounds() {
        let c = Lattice::chain(3);
        let d = c.dual();
        assert_eq!(d.bot(), 2);
        assert_eq!(d.join(0, 1), 0);
        assert_eq!(d.dual(), c);
    }

    #[test]
    fn m3_not_distributive() {
        let m3 = Lattice::from_pairs(5, &[(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)]).unwrap();
        assert!(!m3.is_distributive());
    }
}
