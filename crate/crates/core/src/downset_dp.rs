//! Counting and uniformly sampling downsets of a DAG along a nice path
//! decomposition.
//!
//! The table after step `i` maps each subset `A` of the current bag to the
//! number of downsets of the graph induced by the vertices seen so far whose
//! intersection with the bag is exactly `A`. Subsets are bitmasks over bag
//! slots; a slot is handed out when its vertex enters and recycled when it
//! leaves.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::pathwidth::{validate_decomposition, PathDecomposition};
use crate::poset::Dag;

pub const DEFAULT_WIDTH_CAP: usize = 30;

/// Snapshot of the table after one step, for inspection.
#[derive(Clone, Debug)]
pub struct DpTable {
    pub step: usize,
    pub slots: Vec<Option<usize>>,
    pub counts: Vec<BigUint>,
}

impl DpTable {
    pub fn bag(&self) -> Vec<usize> {
        let mut b: Vec<usize> = self.slots.iter().flatten().copied().collect();
        b.sort_unstable();
        b
    }

    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }

    /// Count for the subset `a` of the bag.
    pub fn get(&self, a: &[usize]) -> BigUint {
        let mut mask = 0usize;
        for &v in a {
            match self.slots.iter().position(|&s| s == Some(v)) {
                Some(i) => mask |= 1 << i,
                None => return BigUint::zero(),
            }
        }
        self.counts[mask].clone()
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Seen {
    Unseen,
    InBag(usize),
    Gone,
}

fn check_input(g: &Dag, x: &PathDecomposition, cap: usize) -> Result<()> {
    if !x.is_nice() {
        return Err(Error::Decomposition("decomposition is not nice".into()));
    }
    if !validate_decomposition(g, x) {
        return Err(Error::Decomposition("not a path decomposition of the graph".into()));
    }
    if x.width() > cap {
        return Err(Error::CapExceeded(format!("bag width {} exceeds the cap of {cap}", x.width())));
    }
    Ok(())
}

/// Runs the table over `x`, ignoring inactive vertices. `x` must be nice and
/// valid for `g`; restricting it to the active vertices is then a nice
/// decomposition of the induced subgraph.
fn run(
    g: &Dag,
    x: &PathDecomposition,
    active: &[bool],
    mut on_step: Option<&mut dyn FnMut(&DpTable)>,
) -> Result<BigUint> {
    let n = g.len();
    let slots_needed = x.bags().iter().map(|b| b.iter().filter(|&&v| active[v]).count()).max().unwrap_or(0);
    let mut slot_vertex: Vec<Option<usize>> = vec![None; slots_needed];
    let mut free: Vec<usize> = (0..slots_needed).rev().collect();
    let mut seen = vec![Seen::Unseen; n];
    let mut table = vec![BigUint::zero(); 1 << slots_needed];
    table[0] = BigUint::one();
    let empty = Vec::new();
    let mut prev: &Vec<usize> = &empty;

    for (step, bag) in x.bags().iter().enumerate() {
        let inserted = bag.len() > prev.len();
        let v = if inserted {
            *bag.iter().find(|v| prev.binary_search(v).is_err()).expect("nice step")
        } else {
            *prev.iter().find(|v| bag.binary_search(v).is_err()).expect("nice step")
        };
        prev = bag;
        if !active[v] {
            continue;
        }
        if inserted {
            let slot = free.pop().expect("slot count covers every bag");
            let mask_of = |ns: &[usize]| -> Result<usize> {
                let mut m = 0;
                for &u in ns.iter().filter(|&&u| active[u]) {
                    match seen[u] {
                        Seen::Unseen => {}
                        Seen::InBag(s) => m |= 1 << s,
                        Seen::Gone => {
                            return Err(Error::Decomposition(format!(
                                "neighbour {} of {} left the bag before {} arrived",
                                u + 1,
                                v + 1,
                                v + 1
                            )))
                        }
                    }
                }
                Ok(m)
            };
            let up = mask_of(g.pred(v))?;
            let down = mask_of(g.succ(v))?;
            let bit = 1 << slot;
            for a in 0..table.len() {
                if a & bit != 0 {
                    continue;
                }
                table[a | bit] = if a & up == up { table[a].clone() } else { BigUint::zero() };
                if a & down != 0 {
                    table[a] = BigUint::zero();
                }
            }
            slot_vertex[slot] = Some(v);
            seen[v] = Seen::InBag(slot);
        } else {
            let Seen::InBag(slot) = seen[v] else {
                return Err(Error::Decomposition(format!("vertex {} removed before insertion", v + 1)));
            };
            let bit = 1 << slot;
            for a in 0..table.len() {
                if a & bit == 0 {
                    let moved = std::mem::take(&mut table[a | bit]);
                    table[a] += moved;
                }
            }
            slot_vertex[slot] = None;
            free.push(slot);
            seen[v] = Seen::Gone;
        }
        if let Some(f) = on_step.as_deref_mut() {
            f(&DpTable { step: step + 1, slots: slot_vertex.clone(), counts: table.clone() });
        }
    }
    Ok(std::mem::take(&mut table[0]))
}

/// Number of downsets of `g`.
pub fn count_downsets(g: &Dag, x: &PathDecomposition) -> Result<BigUint> {
    count_downsets_with_cap(g, x, DEFAULT_WIDTH_CAP)
}

pub fn count_downsets_with_cap(g: &Dag, x: &PathDecomposition, cap: usize) -> Result<BigUint> {
    check_input(g, x, cap)?;
    run(g, x, &vec![true; g.len()], None)
}

/// As [`count_downsets`], calling `on_step` with the table after every step.
pub fn count_downsets_traced(g: &Dag, x: &PathDecomposition, mut on_step: impl FnMut(&DpTable)) -> Result<BigUint> {
    check_input(g, x, DEFAULT_WIDTH_CAP)?;
    run(g, x, &vec![true; g.len()], Some(&mut on_step))
}

/// Downsets of the subgraph induced by `active`; `x` is a checked
/// decomposition of the whole graph.
pub(crate) fn count_induced(g: &Dag, x: &PathDecomposition, active: &[bool]) -> Result<BigUint> {
    run(g, x, active, None)
}

/// `v` and everything reachable from it, sorted.
pub fn descendants(g: &Dag, v: usize) -> Vec<usize> {
    let d = g.descendants(v);
    (0..g.len()).filter(|&u| d[u]).collect()
}

/// Uniform integer in `0..n` by rejection on the bit length of `n`.
pub fn uniform_below<R: Rng + ?Sized>(n: &BigUint, rng: &mut R) -> BigUint {
    assert!(!n.is_zero(), "empty range");
    let bits = n.bits();
    let words = bits.div_ceil(32) as usize;
    let top_bits = bits - 32 * (words as u64 - 1);
    let top_mask = if top_bits == 32 { u32::MAX } else { (1u32 << top_bits) - 1 };
    loop {
        let mut digits: Vec<u32> = (0..words).map(|_| rng.random()).collect();
        digits[words - 1] &= top_mask;
        let candidate = BigUint::new(digits);
        if &candidate < n {
            return candidate;
        }
    }
}

/// Prepared state for drawing many uniform downsets of one graph.
#[derive(Clone, Debug)]
pub struct DownsetSampler {
    graph: Dag,
    decomposition: PathDecomposition,
    order: Vec<usize>,
    descendants: Vec<Vec<bool>>,
    total: BigUint,
}

impl DownsetSampler {
    pub fn new(g: &Dag, x: &PathDecomposition) -> Result<Self> {
        check_input(g, x, DEFAULT_WIDTH_CAP)?;
        let total = run(g, x, &vec![true; g.len()], None)?;
        Ok(DownsetSampler {
            graph: g.clone(),
            decomposition: x.clone(),
            order: g.topological_order(),
            descendants: (0..g.len()).map(|v| g.descendants(v)).collect(),
            total,
        })
    }

    pub fn total(&self) -> &BigUint {
        &self.total
    }

    /// Walks a topological order; each remaining vertex is kept with
    /// probability proportional to the downsets that contain it.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<usize>> {
        let n = self.graph.len();
        let mut active = vec![true; n];
        let mut remaining = self.total.clone();
        let mut chosen = Vec::new();
        for &v in &self.order {
            if !active[v] {
                continue;
            }
            active[v] = false;
            let with_v = count_induced(&self.graph, &self.decomposition, &active)?;
            let without_v = &remaining - &with_v;
            let r = uniform_below(&remaining, rng);
            if r < with_v {
                chosen.push(v);
                remaining = with_v;
            } else {
                for (slot, &below) in active.iter_mut().zip(&self.descendants[v]) {
                    if below {
                        *slot = false;
                    }
                }
                remaining = without_v;
            }
        }
        chosen.sort_unstable();
        Ok(chosen)
    }
}

/// One uniformly random downset of `g`.
pub fn sample_downset<R: Rng + ?Sized>(g: &Dag, x: &PathDecomposition, rng: &mut R) -> Result<Vec<usize>> {
    DownsetSampler::new(g, x)?.sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pathwidth::{pathwidth_exact_tiny, to_nice};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn chain(n: usize) -> Dag {
        Dag::new(n, &(1..n).map(|i| (i - 1, i)).collect::<Vec<_>>()).unwrap()
    }

    fn nice_for(g: &Dag) -> PathDecomposition {
        pathwidth_exact_tiny(g).unwrap().1
    }

    #[test]
    fn three_chain_has_four() {
        let g = chain(3);
        assert_eq!(count_downsets(&g, &nice_for(&g)).unwrap(), BigUint::from(4u32));
    }

    #[test]
    fn antichain_of_ten() {
        let g = Dag::new(10, &[]).unwrap();
        assert_eq!(count_downsets(&g, &nice_for(&g)).unwrap(), BigUint::from(1024u32));
    }

    #[test]
    fn empty_graph_counts_one() {
        let g = Dag::new(0, &[]).unwrap();
        assert_eq!(count_downsets(&g, &PathDecomposition::default()).unwrap(), BigUint::one());
    }

    #[test]
    fn rejects_bad_decompositions() {
        let g = chain(3);
        let not_nice = PathDecomposition::new(vec![vec![0, 1], vec![1, 2]]);
        assert!(matches!(count_downsets(&g, &not_nice), Err(Error::Decomposition(_))));
        let missing_edge = PathDecomposition::new(vec![vec![0], vec![0, 1], vec![1], vec![], vec![2], vec![]]);
        assert!(count_downsets(&g, &missing_edge).is_err());
    }

    #[test]
    fn width_cap() {
        let g = Dag::new(4, &[]).unwrap();
        let wide = to_nice(&g, &PathDecomposition::new(vec![vec![0, 1, 2, 3]])).unwrap();
        assert!(matches!(count_downsets_with_cap(&g, &wide, 2), Err(Error::CapExceeded(_))));
        assert_eq!(count_downsets_with_cap(&g, &wide, 3).unwrap(), BigUint::from(16u32));
    }

    #[test]
    fn descendants_include_the_vertex() {
        let g = chain(3);
        assert_eq!(descendants(&g, 0), [0, 1, 2]);
        assert_eq!(descendants(&g, 2), [2]);
    }

    #[test]
    fn traced_totals_match_prefix_graphs() {
        let g = Dag::new(5, &[(0, 2), (1, 2), (2, 3), (1, 4)]).unwrap();
        let x = nice_for(&g);
        let mut seen = vec![false; 5];
        let mut prev: Vec<usize> = Vec::new();
        count_downsets_traced(&g, &x, |t| {
            let bag = t.bag();
            for v in bag.iter().filter(|v| !prev.contains(v)) {
                seen[*v] = true;
            }
            prev = bag;
            let (h, _) = g.induced(&seen);
            let brute = h.enumerate_downsets_bruteforce(20).unwrap().len();
            assert_eq!(t.total(), BigUint::from(brute));
        })
        .unwrap();
    }

    #[test]
    fn uniform_below_small_modulus() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = BigUint::from(5u32);
        let mut hist = [0usize; 5];
        let draws = 50_000;
        for _ in 0..draws {
            let r = uniform_below(&n, &mut rng);
            hist[usize::try_from(&r).unwrap()] += 1;
        }
        let p = 0.2;
        let sd = (draws as f64 * p * (1.0 - p)).sqrt();
        for h in hist {
            assert!((h as f64 - draws as f64 * p).abs() < 4.0 * sd, "{hist:?}");
        }
    }

    #[test]
    fn uniform_below_handles_word_boundaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in [1u64, 2, u32::MAX as u64, u32::MAX as u64 + 1, u64::MAX] {
            let n = BigUint::from(n);
            for _ in 0..50 {
                assert!(uniform_below(&n, &mut rng) < n);
            }
        }
    }

    #[test]
    fn single_vertex_sampling() {
        let g = Dag::new(1, &[]).unwrap();
        let x = nice_for(&g);
        let s = DownsetSampler::new(&g, &x).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let hits = (0..4000).filter(|_| !s.sample(&mut rng).unwrap().is_empty()).count();
        assert!((hits as f64 - 2000.0).abs() < 4.0 * 1000f64.sqrt());
    }

    #[test]
    fn chain_sampling_is_uniform() {
        let g = chain(3);
        let x = nice_for(&g);
        let s = DownsetSampler::new(&g, &x).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut hist = [0usize; 4];
        let draws = 40_000;
        for _ in 0..draws {
            let d = s.sample(&mut rng).unwrap();
            assert!(g.is_downset(&d));
            hist[d.len()] += 1;
        }
        let sd = (draws as f64 * 0.25 * 0.75).sqrt();
        let tv: f64 = hist.iter().map(|&h| (h as f64 / draws as f64 - 0.25).abs()).sum::<f64>() / 2.0;
        assert!(hist.iter().all(|&h| (h as f64 - 10_000.0).abs() < 4.0 * sd), "{hist:?}");
        assert!(tv < 0.02);
    }

    #[test]
    fn empty_graph_samples_empty_set() {
        let g = Dag::new(0, &[]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(sample_downset(&g, &PathDecomposition::default(), &mut rng).unwrap().is_empty());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_dag(max: usize) -> impl Strategy<Value = Dag> {
            (1usize..=max).prop_flat_map(|n| {
                proptest::collection::vec(proptest::bool::weighted(0.25), n * (n - 1) / 2).prop_map(move |bits| {
                    let pairs = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
                    let edges: Vec<_> = pairs.zip(bits).filter(|(_, b)| *b).map(|(e, _)| e).collect();
                    Dag::new(n, &edges).unwrap()
                })
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn dp_matches_enumeration(g in arb_dag(12)) {
                let x = nice_for(&g);
                let brute = g.enumerate_downsets_bruteforce(20).unwrap().len();
                prop_assert_eq!(count_downsets(&g, &x).unwrap(), BigUint::from(brute));
            }

            #[test]
            fn induced_counts_match(g in arb_dag(10), mask in 0u32..1024) {
                let keep: Vec<bool> = (0..g.len()).map(|v| mask >> v & 1 == 1).collect();
                let x = nice_for(&g);
                let (h, _) = g.induced(&keep);
                let brute = h.enumerate_downsets_bruteforce(20).unwrap().len();
                prop_assert_eq!(count_induced(&g, &x, &keep).unwrap(), BigUint::from(brute));
            }

            #[test]
            fn samples_are_downsets(g in arb_dag(9), seed in any::<u64>()) {
                let x = nice_for(&g);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let d = sample_downset(&g, &x, &mut rng).unwrap();
                prop_assert!(g.is_downset(&d));
            }
        }
    }
}
