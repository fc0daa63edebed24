//! Counting, sampling, medians, and fairness optimization over the stable
//! matchings of a complete instance.

use std::ops::ControlFlow;

use num_bigint::BigUint;
use rand::Rng;

use crate::downset_dp::{count_downsets, count_induced, DownsetSampler};
use crate::error::{Error, Result};
use crate::instance::{Instance, Matching};
use crate::pathwidth::{construct_path_decomposition, PathDecomposition};
use crate::poset::Dag;
use crate::rotation::{matching_from_downset, RotationDigraph, DEFAULT_MATCHING_CAP};

/// Rank sums of a matching and the two objectives built from them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FairnessScores {
    pub s_men: usize,
    pub s_women: usize,
    pub delta: usize,
    pub beta: usize,
}

impl FairnessScores {
    fn from_sums(s_men: usize, s_women: usize) -> Self {
        FairnessScores { s_men, s_women, delta: s_men.abs_diff(s_women), beta: s_men.max(s_women) }
    }

    /// Scores of `mu`, using 1-based ranks. Unmatched agents contribute nothing.
    pub fn of(inst: &Instance, mu: &Matching) -> Self {
        let s_men = (0..inst.n_men()).filter_map(|m| mu.wife(m).and_then(|w| inst.man_rank(m, w))).sum();
        let s_women = (0..inst.n_women()).filter_map(|w| mu.husband(w).and_then(|m| inst.woman_rank(w, m))).sum();
        Self::from_sums(s_men, s_women)
    }
}

/// Rotation digraph of a complete instance, its poset and a nice
/// decomposition of that poset.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub digraph: RotationDigraph,
    pub poset: Dag,
    pub decomposition: PathDecomposition,
}

impl Prepared {
    pub fn new(inst: &Instance) -> Result<Self> {
        let (digraph, decomposition) = construct_path_decomposition(inst)?;
        let poset = digraph.dag();
        Ok(Prepared { digraph, poset, decomposition })
    }
}

pub fn count_stable_matchings(inst: &Instance) -> Result<BigUint> {
    let p = Prepared::new(inst)?;
    count_downsets(&p.poset, &p.decomposition)
}

/// Draws stable matchings of one instance uniformly at random.
#[derive(Clone, Debug)]
pub struct StableMatchingSampler {
    instance: Instance,
    digraph: RotationDigraph,
    downsets: DownsetSampler,
}

impl StableMatchingSampler {
    pub fn new(inst: &Instance) -> Result<Self> {
        let p = Prepared::new(inst)?;
        let downsets = DownsetSampler::new(&p.poset, &p.decomposition)?;
        Ok(StableMatchingSampler { instance: inst.clone(), digraph: p.digraph, downsets })
    }

    pub fn total(&self) -> &BigUint {
        self.downsets.total()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Matching> {
        let z = self.downsets.sample(rng)?;
        matching_from_downset(&self.instance, &self.digraph, &z)
    }
}

pub fn sample_stable_matching<R: Rng + ?Sized>(inst: &Instance, rng: &mut R) -> Result<Matching> {
    StableMatchingSampler::new(inst)?.sample(rng)
}

/// Which median to return when the number of stable matchings is even.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MedianChoice {
    #[default]
    Lower,
    Upper,
}

#[derive(Clone, Debug)]
pub struct MedianReport {
    pub matching: Matching,
    pub downset: Vec<usize>,
    pub total: BigUint,
    /// For each rotation, the number of stable matchings whose downset
    /// contains it.
    pub containing: Vec<BigUint>,
}

/// Number of downsets containing each rotation: the downsets of the poset
/// with that rotation and its ancestors removed, which are in bijection.
pub fn containing_counts(p: &Prepared) -> Result<Vec<BigUint>> {
    (0..p.poset.len())
        .map(|r| {
            let anc = p.poset.ancestors(r);
            let keep: Vec<bool> = anc.iter().map(|&a| !a).collect();
            count_induced(&p.poset, &p.decomposition, &keep)
        })
        .collect()
}

pub fn median_report(inst: &Instance, choice: MedianChoice) -> Result<MedianReport> {
    let p = Prepared::new(inst)?;
    let total = count_downsets(&p.poset, &p.decomposition)?;
    let containing = containing_counts(&p)?;
    let two = BigUint::from(2u32);
    let downset: Vec<usize> = (0..containing.len())
        .filter(|&r| {
            let twice = &containing[r] * &two;
            match choice {
                MedianChoice::Lower => twice > total,
                MedianChoice::Upper => twice >= total,
            }
        })
        .collect();
    let matching = matching_from_downset(inst, &p.digraph, &downset)?;
    Ok(MedianReport { matching, downset, total, containing })
}

/// The lower median stable matching.
pub fn median_stable_matching(inst: &Instance) -> Result<Matching> {
    Ok(median_report(inst, MedianChoice::Lower)?.matching)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    SexEqual,
    Balanced,
}

impl Objective {
    fn value(self, s: &FairnessScores) -> usize {
        match self {
            Objective::SexEqual => s.delta,
            Objective::Balanced => s.beta,
        }
    }
}

/// Optimum of `objective` over all stable matchings, enumerating downsets of
/// the rotation poset. Ties go to the lexicographically least downset.
pub fn optimize_bruteforce(inst: &Instance, objective: Objective, cap: usize) -> Result<(Matching, FairnessScores)> {
    let p = Prepared::new(inst)?;
    let dg = &p.digraph;
    let base = FairnessScores::of(inst, dg.man_optimal());
    let rank = |r: Option<usize>| r.expect("rotation pairs are acceptable") as i64;
    let deltas: Vec<(i64, i64)> = dg
        .rotations
        .iter()
        .map(|rho| {
            let k = rho.pairs.len();
            let mut dm = 0;
            let mut dw = 0;
            for i in 0..k {
                let (m, w) = rho.pairs[i];
                let (m_next, w_next) = rho.pairs[(i + 1) % k];
                dm += rank(inst.man_rank(m, w_next)) - rank(inst.man_rank(m, w));
                dw += rank(inst.woman_rank(w_next, m)) - rank(inst.woman_rank(w_next, m_next));
            }
            (dm, dw)
        })
        .collect();

    let mut seen = 0usize;
    let mut best: Option<(usize, Vec<usize>, FairnessScores)> = None;
    let overflow = p.poset.for_each_downset(|z| {
        seen += 1;
        if seen > cap {
            return ControlFlow::Break(());
        }
        let (dm, dw) = z.iter().fold((0, 0), |(a, b), &r| (a + deltas[r].0, b + deltas[r].1));
        let s = FairnessScores::from_sums((base.s_men as i64 + dm) as usize, (base.s_women as i64 + dw) as usize);
        let v = objective.value(&s);
        let better = match &best {
            None => true,
            Some((bv, bz, _)) => v < *bv || (v == *bv && z < bz.as_slice()),
        };
        if better {
            best = Some((v, z.to_vec(), s));
        }
        ControlFlow::Continue(())
    });
    if overflow.is_some() {
        return Err(Error::CapExceeded(format!("more than {cap} stable matchings")));
    }
    let (_, z, s) = best.expect("the empty downset is always visited");
    Ok((matching_from_downset(inst, dg, &z)?, s))
}

pub fn sex_equal_bruteforce(inst: &Instance) -> Result<(Matching, FairnessScores)> {
    optimize_bruteforce(inst, Objective::SexEqual, DEFAULT_MATCHING_CAP)
}

pub fn balanced_bruteforce(inst: &Instance) -> Result<(Matching, FairnessScores)> {
    optimize_bruteforce(inst, Objective::Balanced, DEFAULT_MATCHING_CAP)
}
