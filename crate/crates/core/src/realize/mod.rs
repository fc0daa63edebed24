//! Constructions that turn a DAG into a stable matching instance whose
//! rotation poset is the transitive closure of that DAG.
//!
//! Every vertex `v` owns one man `m[c,v]` and one woman `w[c,v]` per color
//! `c` of its color set. The agents of `v` form a single rotation, and an
//! edge `(u,v)` of color `c` lets `m[c,v]` rank `w[c,u]` between his two
//! stable partners, which forces the rotation of `u` to be eliminated first.
//! Vertex numbers inside labels are 1-based.

mod attr;
mod list;
mod range;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::instance::{complete_preferences, label, parse_label, Instance, Side};
use crate::poset::Dag;
use crate::rotation::rotation_digraph;

pub use attr::{evaluate_profiles, realize_attr6, AttributeProfile, AttributeProfiles};
pub use list::{realize_list2inf, realize_list2inf_with, ListRealization, MasterSide};
pub use range::{bitonic_sequence, range_coloring, range_stages, realize_range};

/// Edge colors together with the color set of every vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorAssignment {
    edge_color: BTreeMap<(usize, usize), usize>,
    sets: Vec<BTreeSet<usize>>,
}

impl ColorAssignment {
    /// Color sets are the incident edge colors, topped up from `{1, 2}`
    /// until each has at least two members.
    pub fn padded(h: &Dag, edge_color: BTreeMap<(usize, usize), usize>) -> Result<Self> {
        check_edges(h, &edge_color)?;
        let mut sets = vec![BTreeSet::new(); h.len()];
        for (&(u, v), &c) in &edge_color {
            sets[u].insert(c);
            sets[v].insert(c);
        }
        for set in &mut sets {
            for pad in [1, 2] {
                if set.len() < 2 {
                    set.insert(pad);
                }
            }
        }
        Ok(ColorAssignment { edge_color, sets })
    }

    /// Explicit color sets, which must contain every incident edge color.
    pub fn with_sets(h: &Dag, edge_color: BTreeMap<(usize, usize), usize>, sets: Vec<BTreeSet<usize>>) -> Result<Self> {
        check_edges(h, &edge_color)?;
        if sets.len() != h.len() {
            return Err(Error::Coloring("one color set per vertex is required".into()));
        }
        for (&(u, v), &c) in &edge_color {
            if !sets[u].contains(&c) || !sets[v].contains(&c) {
                return Err(Error::Coloring(format!(
                    "color {c} of edge ({},{}) missing from a color set",
                    u + 1,
                    v + 1
                )));
            }
        }
        if let Some(v) = sets.iter().position(|s| s.len() < 2) {
            return Err(Error::Coloring(format!("vertex {} has fewer than two colors", v + 1)));
        }
        Ok(ColorAssignment { edge_color, sets })
    }

    pub fn color(&self, u: usize, v: usize) -> Option<usize> {
        self.edge_color.get(&(u, v)).copied()
    }

    pub fn colors(&self, v: usize) -> &BTreeSet<usize> {
        &self.sets[v]
    }

    pub fn add_color(&mut self, v: usize, c: usize) {
        self.sets[v].insert(c);
    }
}

fn check_edges(h: &Dag, edge_color: &BTreeMap<(usize, usize), usize>) -> Result<()> {
    for &(u, v) in h.edges() {
        match edge_color.get(&(u, v)) {
            Some(0) => return Err(Error::Coloring(format!("edge ({},{}) has color 0", u + 1, v + 1))),
            Some(_) => {}
            None => return Err(Error::Coloring(format!("edge ({},{}) is uncolored", u + 1, v + 1))),
        }
    }
    if edge_color.len() != h.edges().len() {
        return Err(Error::Coloring("colors given for edges not in the graph".into()));
    }
    Ok(())
}

/// A cyclic order of each vertex's color set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorOrdering {
    cycles: Vec<Vec<usize>>,
}

impl ColorOrdering {
    pub fn new(colors: &ColorAssignment, cycles: Vec<Vec<usize>>) -> Result<Self> {
        if cycles.len() != colors.sets.len() {
            return Err(Error::Coloring("one ordering per vertex is required".into()));
        }
        for (v, cycle) in cycles.iter().enumerate() {
            let as_set: BTreeSet<usize> = cycle.iter().copied().collect();
            if as_set.len() != cycle.len() || as_set != colors.sets[v] {
                return Err(Error::Coloring(format!(
                    "ordering of vertex {} is not a permutation of its colors",
                    v + 1
                )));
            }
        }
        Ok(ColorOrdering { cycles })
    }

    pub fn ascending(colors: &ColorAssignment) -> Self {
        ColorOrdering { cycles: colors.sets.iter().map(|s| s.iter().copied().collect()).collect() }
    }

    pub fn cycle(&self, v: usize) -> &[usize] {
        &self.cycles[v]
    }

    fn step(&self, v: usize, c: usize, forward: bool) -> usize {
        let cycle = &self.cycles[v];
        let i = cycle.iter().position(|&x| x == c).expect("color belongs to the vertex");
        let b = cycle.len();
        cycle[if forward { (i + 1) % b } else { (i + b - 1) % b }]
    }

    /// The color after `c` in the order of `v`.
    pub fn next(&self, v: usize, c: usize) -> usize {
        self.step(v, c, true)
    }

    pub fn prev(&self, v: usize, c: usize) -> usize {
        self.step(v, c, false)
    }
}

/// Agents indexed by `(color, vertex)` keys, identical for both sides, with
/// lists over those indices.
#[derive(Clone, Debug)]
pub(crate) struct Layout {
    pub keys: Vec<(usize, usize)>,
    pub men: Vec<Vec<usize>>,
    pub women: Vec<Vec<usize>>,
}

impl Layout {
    /// Runs the construction. Agents come out ordered by vertex, then color;
    /// entries between the two stable partners are sorted by `vertex_key`.
    pub fn build(h: &Dag, colors: &ColorAssignment, order: &ColorOrdering, vertex_key: &[usize]) -> Layout {
        let keys: Vec<(usize, usize)> =
            (0..h.len()).flat_map(|v| colors.sets[v].iter().map(move |&c| (c, v))).collect();
        let index: HashMap<_, _> = keys.iter().enumerate().map(|(i, &k)| (k, i)).collect();
        let mut men = Vec::with_capacity(keys.len());
        let mut women = Vec::with_capacity(keys.len());
        for &(c, v) in &keys {
            let mut incoming: Vec<usize> =
                h.pred(v).iter().copied().filter(|&u| colors.color(u, v) == Some(c)).collect();
            incoming.sort_by_key(|&u| vertex_key[u]);
            let mut list = vec![index[&(c, v)]];
            list.extend(incoming.iter().map(|&u| index[&(c, u)]));
            list.push(index[&(order.next(v, c), v)]);
            men.push(list);

            let mut outgoing: Vec<usize> =
                h.succ(v).iter().copied().filter(|&x| colors.color(v, x) == Some(c)).collect();
            outgoing.sort_by_key(|&x| vertex_key[x]);
            let mut list = vec![index[&(order.prev(v, c), v)]];
            list.extend(outgoing.iter().map(|&x| index[&(c, x)]));
            list.push(index[&(c, v)]);
            women.push(list);
        }
        Layout { keys, men, women }
    }

    /// Reorders agents so that new agent `i` is old agent `order[i]`.
    pub fn permuted(&self, order: &[usize]) -> Layout {
        let mut inverse = vec![0; order.len()];
        for (new, &old) in order.iter().enumerate() {
            inverse[old] = new;
        }
        let remap = |lists: &[Vec<usize>]| -> Vec<Vec<usize>> {
            order.iter().map(|&old| lists[old].iter().map(|&x| inverse[x]).collect()).collect()
        };
        let keys: Vec<_> = order.iter().map(|&old| self.keys[old]).collect();
        Layout { keys, men: remap(&self.men), women: remap(&self.women) }
    }

    pub fn into_instance(self) -> Result<Instance> {
        let names = |side| self.keys.iter().map(|&(c, v)| label(side, c, v + 1)).collect();
        Instance::with_names(self.men, self.women, names(Side::Man), names(Side::Woman))
    }
}

/// Builds the instance for an explicit coloring and cyclic color orders.
/// Agents appear grouped by vertex, colors ascending within a vertex.
pub fn construct_instance(h: &Dag, colors: &ColorAssignment, order: &ColorOrdering) -> Result<Instance> {
    ColorOrdering::new(colors, order.cycles.clone())?;
    if colors.sets.len() != h.len() {
        return Err(Error::Coloring("coloring is for a different graph".into()));
    }
    check_edges(h, &colors.edge_color)?;
    let identity: Vec<usize> = (0..h.len()).collect();
    Layout::build(h, colors, order, &identity).into_instance()
}

fn uniform_coloring(h: &Dag) -> BTreeMap<(usize, usize), usize> {
    h.edges().iter().map(|&e| (e, 1)).collect()
}

/// Every edge gets color 1 and every list is completed, giving a complete
/// instance with `2p` men and `2p` women.
pub fn realize_complete(h: &Dag) -> Result<Instance> {
    let h = h.transitive_reduction();
    let colors = ColorAssignment::padded(&h, uniform_coloring(&h))?;
    let inst = construct_instance(&h, &colors, &ColorOrdering::ascending(&colors))?;
    complete_preferences(&inst)
}

/// Distinct colors for all edges, in lexicographic edge order. Every list
/// has at most three entries.
pub fn realize_bounded3(h: &Dag) -> Result<Instance> {
    let h = h.transitive_reduction();
    let coloring = h.edges().iter().enumerate().map(|(i, &e)| (e, i + 1)).collect();
    let colors = ColorAssignment::padded(&h, coloring)?;
    construct_instance(&h, &colors, &ColorOrdering::ascending(&colors))
}

/// Whether the rotation poset of `inst` is `p`'s closure under the map
/// sending each rotation to the vertex named in its agents' labels.
pub fn check_realization(p: &Dag, inst: &Instance) -> Result<bool> {
    let dg = rotation_digraph(inst);
    let mut vertex_of = Vec::with_capacity(dg.len());
    for rho in &dg.rotations {
        let mut found = BTreeSet::new();
        for &(m, w) in &rho.pairs {
            for name in [inst.man_name(m), inst.woman_name(w)] {
                match parse_label(name) {
                    Some((_, _, v)) => found.insert(v),
                    None => return Err(Error::Labels(format!("agent {name} carries no vertex label"))),
                };
            }
        }
        if found.len() != 1 {
            return Err(Error::Labels(format!("rotation {} mixes vertices {found:?}", rho.id + 1)));
        }
        let v = found.into_iter().next().expect("one vertex");
        if v == 0 || v > p.len() {
            return Err(Error::Labels(format!("vertex {v} is out of range")));
        }
        vertex_of.push(v - 1);
    }
    let distinct: BTreeSet<usize> = vertex_of.iter().copied().collect();
    if vertex_of.len() != p.len() || distinct.len() != p.len() {
        return Ok(false);
    }
    let ours: BTreeSet<(usize, usize)> = p.transitive_closure().edges().iter().copied().collect();
    let theirs: BTreeSet<(usize, usize)> =
        dg.dag().transitive_closure().edges().iter().map(|&(a, b)| (vertex_of[a], vertex_of[b])).collect();
    Ok(ours == theirs)
}
