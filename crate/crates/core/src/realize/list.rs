//! Instances in which every agent of one side uses one of only two complete
//! preference lists, while the other side is unrestricted.

use std::collections::{BTreeMap, BinaryHeap};

use super::{ColorAssignment, ColorOrdering, Layout};
use crate::error::Result;
use crate::instance::Instance;
use crate::poset::Dag;

/// Which side shares the two complete lists.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MasterSide {
    #[default]
    Men,
    Women,
}

#[derive(Clone, Debug)]
pub struct ListRealization {
    /// The instance itself.
    pub instance: Instance,
    /// The short-list instance it was derived from, same agents and names.
    pub base: Instance,
    pub side: MasterSide,
    /// Both shared lists, as indices into the other side.
    pub first_list: Vec<usize>,
    pub second_list: Vec<usize>,
    /// 1 or 2 for every agent of the sharing side.
    pub groups: Vec<u8>,
}

/// Position of each vertex in a topological order read backwards, so that
/// every edge `(u, v)` has `rank[u] > rank[v]`. Ranks are 1-based and equal
/// the vertex numbers whenever those already have this property.
fn reverse_topological_rank(h: &Dag) -> Vec<usize> {
    let p = h.len();
    let mut indegree: Vec<usize> = (0..p).map(|v| h.pred(v).len()).collect();
    let mut ready: BinaryHeap<usize> = (0..p).filter(|&v| indegree[v] == 0).collect();
    let mut rank = vec![0; p];
    let mut next = p;
    while let Some(v) = ready.pop() {
        rank[v] = next;
        next -= 1;
        for &x in h.succ(v) {
            indegree[x] -= 1;
            if indegree[x] == 0 {
                ready.push(x);
            }
        }
    }
    rank
}

pub fn realize_list2inf(h: &Dag) -> Result<ListRealization> {
    realize_list2inf_with(h, MasterSide::Men)
}

/// Each edge `(u, v)` is colored by the rank of `u`, every vertex also gets
/// the extra color `p + 1`, and color orders are ascending. Agents are
/// listed by `(color, rank)`. On the sharing side, agents whose color is the
/// extra one (men) or the least of their vertex (women) form group 2 and put
/// the extra-color block of the other side first; everyone else uses the
/// plain order. The other side completes its lists in plain order.
pub fn realize_list2inf_with(h: &Dag, side: MasterSide) -> Result<ListRealization> {
    let h = h.transitive_reduction();
    let p = h.len();
    let rank = reverse_topological_rank(&h);
    let coloring: BTreeMap<(usize, usize), usize> = h.edges().iter().map(|&(u, v)| ((u, v), rank[u])).collect();
    let mut colors = ColorAssignment::padded(&h, coloring)?;
    for v in 0..p {
        colors.add_color(v, p + 1);
    }
    let order = ColorOrdering::ascending(&colors);
    let built = Layout::build(&h, &colors, &order, &rank);
    let mut by_key: Vec<usize> = (0..built.keys.len()).collect();
    by_key.sort_by_key(|&i| {
        let (c, v) = built.keys[i];
        (c, rank[v])
    });
    let layout = built.permuted(&by_key);
    let n = layout.keys.len();
    let extra = p + 1;

    let first_list: Vec<usize> = (0..n).collect();
    let second_list: Vec<usize> =
        (0..n).filter(|&i| layout.keys[i].0 == extra).chain((0..n).filter(|&i| layout.keys[i].0 != extra)).collect();
    let groups: Vec<u8> = layout
        .keys
        .iter()
        .map(|&(c, v)| {
            let second = match side {
                MasterSide::Men => c == extra,
                MasterSide::Women => Some(&c) == colors.colors(v).iter().next(),
            };
            if second {
                2
            } else {
                1
            }
        })
        .collect();

    let complete = |lists: &[Vec<usize>]| -> Vec<Vec<usize>> {
        lists
            .iter()
            .map(|l| {
                let mut present = vec![false; n];
                l.iter().for_each(|&x| present[x] = true);
                l.iter().copied().chain((0..n).filter(|&x| !present[x])).collect()
            })
            .collect()
    };
    let shared: Vec<Vec<usize>> =
        groups.iter().map(|&g| if g == 1 { first_list.clone() } else { second_list.clone() }).collect();
    let mut full = layout.clone();
    match side {
        MasterSide::Men => {
            full.men = shared;
            full.women = complete(&layout.women);
        }
        MasterSide::Women => {
            full.women = shared;
            full.men = complete(&layout.men);
        }
    }
    Ok(ListRealization {
        instance: full.into_instance()?,
        base: layout.into_instance()?,
        side,
        first_list,
        second_list,
        groups,
    })
}
