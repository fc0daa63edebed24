//! Complete instances of small range built from a nice path decomposition.
//!
//! A vertex present in bags `a..=b` gets colors `a..=b+1`, so agents are
//! grouped into blocks by bag index. Lists are first widened to every agent
//! within two blocks, then completed with all earlier blocks in front and all
//! later blocks behind.

use std::collections::{BTreeMap, BTreeSet};

use super::{ColorAssignment, ColorOrdering, Layout};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::pathwidth::{validate_decomposition, PathDecomposition};
use crate::poset::Dag;

/// A cyclic order of `a..=b` in which neighbours, including the last and
/// first, differ by at most two: up by twos, then down through the rest.
pub fn bitonic_sequence(a: usize, b: usize) -> Vec<usize> {
    assert!(a <= b, "empty interval");
    let up: Vec<usize> = (a..=b).step_by(2).collect();
    let down = (a..=b).rev().filter(|x| (x - a) % 2 == 1);
    up.into_iter().chain(down).collect()
}

/// Colors and orders of the first stage.
pub fn range_coloring(h: &Dag, x: &PathDecomposition) -> Result<(ColorAssignment, ColorOrdering)> {
    let p = h.len();
    if !validate_decomposition(h, x) {
        return Err(Error::Decomposition("not a path decomposition of the graph".into()));
    }
    if !x.is_nice() || x.len() != 2 * p {
        return Err(Error::Decomposition(format!("expected a nice decomposition with {} bags", 2 * p)));
    }
    let mut first = vec![usize::MAX; p];
    let mut last = vec![0; p];
    for (i, bag) in x.bags().iter().enumerate() {
        for &v in bag {
            first[v] = first[v].min(i + 1);
            last[v] = i + 1;
        }
    }
    let coloring: BTreeMap<(usize, usize), usize> = h
        .edges()
        .iter()
        .map(|&(u, v)| {
            let c = x.bags().iter().position(|b| b.contains(&u) && b.contains(&v)).expect("edge is covered") + 1;
            ((u, v), c)
        })
        .collect();
    let sets: Vec<BTreeSet<usize>> = (0..p).map(|v| (first[v]..=last[v] + 1).collect()).collect();
    let colors = ColorAssignment::with_sets(h, coloring, sets)?;
    let cycles = (0..p).map(|v| bitonic_sequence(first[v], last[v] + 1)).collect();
    let order = ColorOrdering::new(&colors, cycles)?;
    Ok((colors, order))
}

/// The short-list first stage and the final complete instance, agents
/// ordered by `(block, vertex)`.
pub fn range_stages(h: &Dag, x: &PathDecomposition) -> Result<(Instance, Instance)> {
    let (colors, order) = range_coloring(h, x)?;
    let identity: Vec<usize> = (0..h.len()).collect();
    let built = Layout::build(h, &colors, &order, &identity);
    let mut by_key: Vec<usize> = (0..built.keys.len()).collect();
    by_key.sort_by_key(|&i| built.keys[i]);
    let first = built.permuted(&by_key);
    let n = first.keys.len();
    let block: Vec<usize> = first.keys.iter().map(|&(c, _)| c).collect();

    let widen = |lists: &[Vec<usize>]| -> Vec<Vec<usize>> {
        lists
            .iter()
            .enumerate()
            .map(|(a, l)| {
                let i = block[a];
                let mut present = vec![false; n];
                l.iter().for_each(|&x| present[x] = true);
                let before = (0..n).filter(|&x| block[x] + 3 <= i);
                let near = (0..n).filter(|&x| !present[x] && block[x].abs_diff(i) <= 2);
                let after = (0..n).filter(|&x| block[x] >= i + 3);
                before.chain(l.iter().copied()).chain(near).chain(after).collect()
            })
            .collect()
    };
    let mut full = first.clone();
    full.men = widen(&first.men);
    full.women = widen(&first.women);
    Ok((first.into_instance()?, full.into_instance()?))
}

/// Complete instance realizing the closure of `h`, whose range is at most
/// `9 * (width + 2)` for a nice decomposition `x` of `h` of that width.
pub fn realize_range(h: &Dag, x: &PathDecomposition) -> Result<Instance> {
    Ok(range_stages(h, x)?.1)
}
