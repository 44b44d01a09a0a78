//! Enumeration of small lattices and random generation of law-abiding
//! operation tables.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::lattice::{Elem, Lattice};
use super::model::{interpret_expanded, table_satisfies_laws, tuples, validate_model, FiniteLE, OpTable};
use super::ModelError;
use crate::syntax::{Connective, Family, OrderType, Origin, Polarity, Signature};

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// All bounded lattices with `n` elements up to isomorphism, with `0` the
/// bottom and `n - 1` the top. Supported for `n <= 6`.
pub fn enumerate_lattices(n: usize) -> Vec<Lattice> {
    assert!(n <= 6, "lattice enumeration is limited to six elements");
    match n {
        0 => return Vec::new(),
        1 => return vec![Lattice::from_order(1, vec![true]).expect("trivial lattice")],
        _ => {}
    }
    let m = n - 2;
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|a| (0..m).filter(move |&b| b != a).map(move |b| (a, b))).collect();
    let perms = permutations(&(0..m).collect::<Vec<_>>());
    let mut seen = BTreeSet::new();
    for mask in 0u32..(1 << pairs.len()) {
        let mut rel = vec![false; m * m];
        for (k, &(a, b)) in pairs.iter().enumerate() {
            if mask & (1 << k) != 0 {
                rel[a * m + b] = true;
            }
        }
        let partial_order = (0..m).all(|a| {
            (0..m).all(|b| {
                !(rel[a * m + b] && rel[b * m + a]) && (0..m).all(|c| !(rel[a * m + b] && rel[b * m + c]) || rel[a * m + c])
            })
        });
        if !partial_order {
            continue;
        }
        // Keep only the lexicographically least relabelling of each order.
        let relabel = |p: &[usize]| -> Vec<bool> {
            let mut r = vec![false; m * m];
            for a in 0..m {
                for b in 0..m {
                    r[p[a] * m + p[b]] = rel[a * m + b];
                }
            }
            r
        };
        let canon = perms.iter().map(|p| relabel(p)).min().expect("at least one permutation");
        if canon != rel {
            continue;
        }
        let mut leq = vec![false; n * n];
        for a in 0..n {
            leq[a] = true;
            leq[a * n + n - 1] = true;
            leq[a * n + a] = true;
        }
        for a in 0..m {
            for b in 0..m {
                leq[(a + 1) * n + b + 1] |= rel[a * m + b];
            }
        }
        if let Ok(l) = Lattice::from_order(n, leq) {
            seen.insert(canon);
            let _ = l;
        }
    }
    seen.into_iter()
        .map(|rel| {
            let mut pairs = Vec::new();
            for a in 0..n.saturating_sub(1) {
                pairs.push((0, a + 1));
                pairs.push((a, n - 1));
            }
            for a in 0..m {
                for b in 0..m {
                    if rel[a * m + b] {
                        pairs.push((a + 1, b + 1));
                    }
                }
            }
            Lattice::from_pairs(n, &pairs).expect("checked above")
        })
        .collect()
}

/// All lattices with between 1 and `max` elements.
pub fn lattices_up_to(max: usize) -> Vec<Lattice> {
    (1..=max).flat_map(enumerate_lattices).collect()
}

fn dummy(family: Family, ot: OrderType) -> Connective {
    Connective { name: "_".into(), family, order_type: ot, origin: Origin::Base }
}

/// Every unary map on `lat` satisfying the laws of a connective of the given
/// family and polarity.
pub fn unary_maps(lat: &Lattice, family: Family, polarity: Polarity) -> Vec<OpTable> {
    let n = lat.size();
    let c = dummy(family, OrderType::new(vec![polarity]));
    tuples(n, n)
        .map(|values| OpTable::new(1, n, values))
        .filter(|t| table_satisfies_laws(lat, &c, t))
        .collect()
}

/// Random table generation with per-lattice caches of unary pools.
struct TableGen<'a> {
    rng: &'a mut ChaCha8Rng,
    pools: HashMap<(Lattice, bool, Polarity), Vec<OpTable>>,
}

impl TableGen<'_> {
    /// Pool of F-type unary maps on `lat` (G-type maps are F-type maps on the dual).
    fn pool(&mut self, lat: &Lattice, regular: bool, p: Polarity) -> &Vec<OpTable> {
        self.pools.entry((lat.clone(), regular, p)).or_insert_with(|| {
            unary_maps(lat, if regular { Family::FRegular } else { Family::FNormal }, p)
        })
    }

    fn pick_unary(&mut self, lat: &Lattice, regular: bool, p: Polarity) -> OpTable {
        let len = self.pool(lat, regular, p).len();
        let i = self.rng.gen_range(0..len);
        self.pools[&(lat.clone(), regular, p)][i].clone()
    }

    /// An F-normal table on `lat` as a join of rank-one constants and unit maps
    /// gated by indicators on the remaining coordinates.
    fn normal_f(&mut self, lat: &Lattice, ot: &OrderType) -> OpTable {
        let k = ot.len();
        let n = lat.size();
        if k == 1 {
            return self.pick_unary(lat, false, ot.get(0));
        }
        let zero: Vec<Elem> = ot.entries().iter().map(|p| if *p == Polarity::One { lat.bot() } else { lat.top() }).collect();
        let gens = self.rng.gen_range(0..=3);
        let mut values = vec![lat.bot(); n.pow(k as u32)];
        for _ in 0..gens {
            let unit = if self.rng.gen_bool(0.5) {
                let i = self.rng.gen_range(0..k);
                Some((i, self.pick_unary(lat, false, ot.get(i))))
            } else {
                None
            };
            let v = self.rng.gen_range(0..n);
            for (idx, args) in tuples(n, k).enumerate() {
                let skip = unit.as_ref().map(|(i, _)| *i);
                if (0..k).any(|j| Some(j) != skip && args[j] == zero[j]) {
                    continue;
                }
                let g = match &unit {
                    Some((i, u)) => u.get(&[args[*i]]),
                    None => v,
                };
                values[idx] = lat.join(values[idx], g);
            }
        }
        OpTable::new(k, n, values)
    }

    fn table(&mut self, lat: &Lattice, c: &Connective) -> OpTable {
        let l = if c.family.is_f() { lat.clone() } else { lat.dual() };
        if c.family.is_regular() {
            self.pick_unary(&l, true, c.order_type.get(0))
        } else {
            self.normal_f(&l, &c.order_type)
        }
    }
}

/// A deterministic collection of expanded models for one signature.
#[derive(Clone, Debug)]
pub struct ModelPool {
    pub models: Vec<FiniteLE>,
}

impl ModelPool {
    /// Draws up to `target` distinct models on lattices of size at most
    /// `max_size`, cycling through the lattices so every shape is represented.
    pub fn generate(sig: &Signature, max_size: usize, target: usize, seed: u64) -> Result<ModelPool, ModelError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lattices = lattices_up_to(max_size.min(6));
        let base: Vec<_> = sig.base_connectives().cloned().collect();
        let mut gen = TableGen { rng: &mut rng, pools: HashMap::new() };
        let mut seen = BTreeSet::new();
        let mut models = Vec::new();
        let attempts = target.saturating_mul(20).max(lattices.len());
        for k in 0..attempts {
            if models.len() >= target {
                break;
            }
            let lat = &lattices[k % lattices.len()];
            let ops: BTreeMap<String, OpTable> = base.iter().map(|c| (c.name.clone(), gen.table(lat, c))).collect();
            let key: Vec<(usize, Vec<Elem>)> = std::iter::once((k % lattices.len(), Vec::new()))
                .chain(ops.values().map(|t| (0, t.values().to_vec())))
                .collect();
            if !seen.insert(key) {
                continue;
            }
            let m = validate_model(lat.clone(), sig, ops)?;
            models.push(interpret_expanded(&m)?);
        }
        Ok(ModelPool { models })
    }

    /// Shuffles the order of the models deterministically.
    pub fn shuffled(mut self, seed: u64) -> Self {
        self.models.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::laws::{adjunction_biconditionals, quasi_perfect_laws};
    use crate::syntax::ConnectiveDecl;

    #[test]
    fn lattice_counts() {
        let counts: Vec<usize> = (1..=6).map(|n| enumerate_lattices(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 1, 2, 5, 15]);
    }

    #[test]
    fn unary_pool_sizes_on_two_chain() {
        let c = Lattice::chain(2);
        // Join-preserving normal maps on 2: identity and constant bottom.
        assert_eq!(unary_maps(&c, Family::FNormal, Polarity::One).len(), 2);
        // Regular ones also include constant top.
        assert_eq!(unary_maps(&c, Family::FRegular, Polarity::One).len(), 3);
    }

    #[test]
    fn generated_models_are_lawful() {
        let sig = Signature::new(vec![
            ConnectiveDecl::new("f", Family::FNormal, "1d"),
            ConnectiveDecl::new("g", Family::GNormal, "d1"),
            ConnectiveDecl::new("r", Family::GRegular, "d"),
        ])
        .unwrap();
        let pool = ModelPool::generate(&sig, 4, 30, 7).unwrap();
        assert_eq!(pool.models.len(), 30);
        for m in &pool.models {
            quasi_perfect_laws(m).unwrap();
            adjunction_biconditionals(m).unwrap();
        }
    }
}
