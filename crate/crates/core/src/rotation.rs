//! Rotations, their elimination, and the rotation digraph whose downsets
//! are in bijection with the stable matchings.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::instance::{blocking_pairs, gale_shapley, Instance, Matching, Orientation};
use crate::poset::Dag;

/// A cyclic sequence of stable pairs `(m_i, w_i)`; eliminating it rematches
/// each `m_i` with `w_{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rotation {
    pub id: usize,
    pub pairs: Vec<(usize, usize)>,
    pub label: Option<String>,
}

impl Rotation {
    /// Rotates the cycle so that the smallest man comes first.
    pub fn canonical(id: usize, mut pairs: Vec<(usize, usize)>) -> Rotation {
        let start = (0..pairs.len()).min_by_key(|&i| pairs[i].0).unwrap_or(0);
        pairs.rotate_left(start);
        Rotation { id, pairs, label: None }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// `(m_i, w_{i+1})` for each position.
    pub fn successors(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let l = self.pairs.len();
        (0..l).map(move |i| (self.pairs[i].0, self.pairs[(i + 1) % l].1))
    }

    pub fn format(&self, inst: &Instance) -> String {
        self.pairs
            .iter()
            .map(|&(m, w)| format!("({},{})", inst.man_name(m), inst.woman_name(w)))
            .collect::<Vec<_>>()
            .join(",")
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct RuleTags {
    pub rule1: bool,
    pub rule2: bool,
}

impl RuleTags {
    pub fn code(self) -> &'static str {
        match (self.rule1, self.rule2) {
            (true, true) => "12",
            (true, false) => "1",
            (false, true) => "2",
            (false, false) => "",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RotationDigraph {
    pub rotations: Vec<Rotation>,
    edges: BTreeMap<(usize, usize), RuleTags>,
    move_down: HashMap<(usize, usize), usize>,
    move_up: HashMap<(usize, usize), usize>,
    man_optimal: Matching,
}

impl RotationDigraph {
    pub fn len(&self) -> usize {
        self.rotations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rotations.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, RuleTags)> + '_ {
        self.edges.iter().map(|(&(a, b), &t)| (a, b, t))
    }

    /// Rotation that moves man `m` to or below woman `w`.
    pub fn move_down(&self, m: usize, w: usize) -> Option<usize> {
        self.move_down.get(&(m, w)).copied()
    }

    /// Rotation that moves woman `w` up to or above man `m`.
    pub fn move_up(&self, w: usize, m: usize) -> Option<usize> {
        self.move_up.get(&(w, m)).copied()
    }

    pub fn man_optimal(&self) -> &Matching {
        &self.man_optimal
    }

    pub fn dag(&self) -> Dag {
        let e: Vec<(usize, usize)> = self.edges.keys().copied().collect();
        Dag::new(self.rotations.len(), &e).expect("rotation digraph is acyclic")
    }

    pub fn to_dot(&self, inst: &Instance) -> String {
        let mut out = String::from("digraph rotations {\n");
        for r in &self.rotations {
            writeln!(out, "  r{} [label=\"{}\"];", r.id + 1, r.format(inst)).unwrap();
        }
        for (a, b, t) in self.edges() {
            writeln!(out, "  r{} -> r{} [label=\"rule={}\"];", a + 1, b + 1, t.code()).unwrap();
        }
        out.push_str("}\n");
        out
    }
}

fn ensure_stable(inst: &Instance, mu: &Matching) -> Result<()> {
    let bp = blocking_pairs(inst, mu)?;
    match bp.first() {
        None => Ok(()),
        Some(&(m, w)) => Err(Error::Unstable(format!("({}, {}) blocks", inst.man_name(m), inst.woman_name(w)))),
    }
}

/// First woman after `mu(m)` on `m`'s list who prefers `m` to her partner.
fn next_woman(inst: &Instance, mu: &Matching, m: usize) -> Option<usize> {
    let w0 = mu.wife(m)?;
    let list = inst.man_list(m);
    list[inst.man_pos(m, w0) as usize + 1..].iter().copied().find(|&w| match mu.husband(w) {
        Some(h) => inst.woman_pos(w, m) < inst.woman_pos(w, h),
        None => false,
    })
}

/// Cycles of the partial map `man -> next man`, in canonical form, sorted.
fn cycles(next_man: &[Option<usize>], mu: &Matching) -> Vec<Rotation> {
    let n = next_man.len();
    let mut state = vec![0u8; n];
    let mut found = Vec::new();
    for s in 0..n {
        if state[s] != 0 {
            continue;
        }
        let mut path = Vec::new();
        let mut cur = Some(s);
        while let Some(x) = cur {
            if state[x] != 0 {
                if state[x] == 1 {
                    let at = path.iter().position(|&y| y == x).unwrap();
                    let pairs = path[at..].iter().map(|&m| (m, mu.wife(m).unwrap())).collect();
                    found.push(Rotation::canonical(0, pairs));
                }
                break;
            }
            state[x] = 1;
            path.push(x);
            cur = next_man[x];
        }
        for &x in &path {
            state[x] = 2;
        }
    }
    found.sort_by_key(|r| r.pairs[0].0);
    for (i, r) in found.iter_mut().enumerate() {
        r.id = i;
    }
    found
}

/// All rotations exposed in the stable matching `mu`.
pub fn exposed_rotations(inst: &Instance, mu: &Matching) -> Result<Vec<Rotation>> {
    ensure_stable(inst, mu)?;
    let next_man: Vec<Option<usize>> =
        (0..inst.n_men()).map(|m| next_woman(inst, mu, m).and_then(|w| mu.husband(w))).collect();
    Ok(cycles(&next_man, mu))
}

fn apply(mu: &mut Matching, rho: &Rotation) {
    for (m, w) in rho.successors().collect::<Vec<_>>() {
        mu.set(m, w);
    }
}

/// Eliminates `rho` from `mu`, after checking that it is exposed there.
pub fn eliminate(inst: &Instance, mu: &Matching, rho: &Rotation) -> Result<Matching> {
    if rho.len() < 2 {
        return Err(Error::NotExposed("a rotation has at least two pairs".into()));
    }
    for (i, (m, w_next)) in rho.successors().enumerate() {
        let (_, w) = rho.pairs[i];
        if mu.wife(m) != Some(w) || next_woman(inst, mu, m) != Some(w_next) {
            return Err(Error::NotExposed(format!("{} is not exposed in the given matching", rho.format(inst))));
        }
    }
    let mut out = mu.clone();
    apply(&mut out, rho);
    Ok(out)
}

/// Enumerates every rotation by repeatedly eliminating the leftmost exposed
/// rotation from the man-optimal matching, and links them by the two
/// precedence rules.
pub fn rotation_digraph(inst: &Instance) -> RotationDigraph {
    let man_optimal = gale_shapley(inst, Orientation::ManOptimal);
    let mut mu = man_optimal.clone();
    let n = inst.n_men();
    // scan[m]: position in m's list where the search for next(m) resumes.
    // Women only improve, so a woman skipped once never qualifies again.
    let mut scan: Vec<usize> =
        (0..n).map(|m| mu.wife(m).map_or(usize::MAX, |w| inst.man_pos(m, w) as usize + 1)).collect();
    let mut rotations: Vec<Rotation> = Vec::new();
    let mut edges: BTreeMap<(usize, usize), RuleTags> = BTreeMap::new();
    let mut move_down = HashMap::new();
    let mut move_up = HashMap::new();

    loop {
        let mut next_man = vec![None; n];
        for m in 0..n {
            if mu.wife(m).is_none() {
                continue;
            }
            let list = inst.man_list(m);
            while scan[m] < list.len() {
                let w = list[scan[m]];
                match mu.husband(w) {
                    Some(h) if inst.woman_pos(w, m) < inst.woman_pos(w, h) => break,
                    _ => scan[m] += 1,
                }
            }
            if scan[m] < list.len() {
                next_man[m] = mu.husband(list[scan[m]]);
            }
        }
        let Some(mut rho) = cycles(&next_man, &mu).into_iter().next() else {
            break;
        };
        let id = rotations.len();
        rho.id = id;
        for &(m, w) in &rho.pairs {
            if let Some(&prev) = move_down.get(&(m, w)) {
                edges.entry((prev, id)).or_default().rule1 = true;
            }
        }
        let l = rho.len();
        for i in 0..l {
            let (m, w) = rho.pairs[i];
            let (m_next, w_next) = rho.pairs[(i + 1) % l];
            let (from, to) = (inst.man_pos(m, w) as usize, inst.man_pos(m, w_next) as usize);
            for &x in &inst.man_list(m)[from + 1..=to] {
                move_down.insert((m, x), id);
            }
            let (hi, lo) = (inst.woman_pos(w_next, m) as usize, inst.woman_pos(w_next, m_next) as usize);
            for &y in &inst.woman_list(w_next)[hi..lo] {
                move_up.insert((w_next, y), id);
            }
        }
        apply(&mut mu, &rho);
        for &(m, _) in &rho.pairs {
            scan[m] += 1;
        }
        rotations.push(rho);
    }

    for (&(m, w), &down) in &move_down {
        if let Some(&up) = move_up.get(&(w, m)) {
            if up != down {
                edges.entry((up, down)).or_default().rule2 = true;
            }
        }
    }
    RotationDigraph { rotations, edges, move_down, move_up, man_optimal }
}

/// The stable matching obtained by eliminating the downset `z`.
pub fn matching_from_downset(inst: &Instance, dg: &RotationDigraph, z: &[usize]) -> Result<Matching> {
    let dag = dg.dag();
    if !dag.is_downset(z) {
        return Err(Error::NotDownset(format!("{:?} is not closed under predecessors", ids(z))));
    }
    if dg.man_optimal.n_men() != inst.n_men() {
        return Err(Error::InvalidMatching("digraph belongs to another instance".into()));
    }
    let mut inside = vec![false; dg.len()];
    z.iter().for_each(|&r| inside[r] = true);
    let mut mu = dg.man_optimal.clone();
    for r in dag.topological_order() {
        if inside[r] {
            apply(&mut mu, &dg.rotations[r]);
        }
    }
    Ok(mu)
}

fn ids(z: &[usize]) -> Vec<usize> {
    z.iter().map(|r| r + 1).collect()
}

/// The downset of rotations eliminated on the way to `mu`.
pub fn downset_from_matching(inst: &Instance, dg: &RotationDigraph, mu: &Matching) -> Result<Vec<usize>> {
    ensure_stable(inst, mu)?;
    let mut out = Vec::new();
    for r in &dg.rotations {
        let (m, w_next) = r.successors().next().expect("rotation is nonempty");
        let w = mu.wife(m).ok_or_else(|| Error::InvalidMatching("rotation member unmatched".into()))?;
        if inst.man_pos(m, w) >= inst.man_pos(m, w_next) {
            out.push(r.id);
        }
    }
    Ok(out)
}

pub const DEFAULT_MATCHING_CAP: usize = 1_000_000;

/// Every stable matching, found by search over exposed rotations.
pub fn all_stable_matchings_bruteforce(inst: &Instance) -> Result<Vec<Matching>> {
    all_stable_matchings_with_cap(inst, DEFAULT_MATCHING_CAP)
}

pub fn all_stable_matchings_with_cap(inst: &Instance, cap: usize) -> Result<Vec<Matching>> {
    let start = gale_shapley(inst, Orientation::ManOptimal);
    let mut seen: HashSet<Matching> = HashSet::new();
    let mut out = Vec::new();
    let mut stack = vec![start.clone()];
    seen.insert(start);
    while let Some(mu) = stack.pop() {
        for rho in exposed_rotations(inst, &mu)? {
            let mut next = mu.clone();
            apply(&mut next, &rho);
            if seen.insert(next.clone()) {
                if seen.len() > cap {
                    return Err(Error::CapExceeded(format!("more than {cap} stable matchings")));
                }
                stack.push(next);
            }
        }
        out.push(mu);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::tests::example;

    fn mm(pairs: &[(usize, usize)]) -> Matching {
        let zero: Vec<(usize, usize)> = pairs.iter().map(|&(a, b)| (a - 1, b - 1)).collect();
        Matching::from_pairs(4, 4, &zero).unwrap()
    }

    fn mu0() -> Matching {
        mm(&[(1, 1), (2, 2), (3, 3), (4, 4)])
    }
    fn mu1() -> Matching {
        mm(&[(1, 2), (2, 1), (3, 3), (4, 4)])
    }
    fn mu2() -> Matching {
        mm(&[(1, 2), (2, 1), (3, 4), (4, 3)])
    }
    fn mu3() -> Matching {
        mm(&[(1, 4), (2, 1), (3, 2), (4, 3)])
    }

    fn pairs1(r: &Rotation) -> Vec<(usize, usize)> {
        r.pairs.iter().map(|&(m, w)| (m + 1, w + 1)).collect()
    }

    #[test]
    fn exposed_in_example() {
        let inst = example();
        // (m4, w2) keeps the second cycle closed until the first is gone.
        let r = exposed_rotations(&inst, &mu0()).unwrap();
        assert_eq!(r.iter().map(pairs1).collect::<Vec<_>>(), [vec![(1, 1), (2, 2)]]);
        let r = exposed_rotations(&inst, &mu1()).unwrap();
        assert_eq!(r.iter().map(pairs1).collect::<Vec<_>>(), [vec![(3, 3), (4, 4)]]);
        assert!(exposed_rotations(&inst, &mu3()).unwrap().is_empty());
        let r = exposed_rotations(&inst, &mu2()).unwrap();
        assert_eq!(r.iter().map(pairs1).collect::<Vec<_>>(), [vec![(1, 2), (3, 4)]]);
    }

    #[test]
    fn exposed_requires_stability() {
        let bad = mm(&[(1, 2), (2, 1), (3, 3), (4, 4)]);
        let inst = example();
        assert!(exposed_rotations(&inst, &bad).is_ok());
        let worse = mm(&[(1, 4), (2, 3), (3, 2), (4, 1)]);
        assert!(matches!(exposed_rotations(&inst, &worse), Err(Error::Unstable(_))));
    }

    #[test]
    fn elimination_steps() {
        let inst = example();
        let rho1 = exposed_rotations(&inst, &mu0()).unwrap()[0].clone();
        let step = eliminate(&inst, &mu0(), &rho1).unwrap();
        assert_eq!(step, mu1());
        assert!(matches!(eliminate(&inst, &step, &rho1), Err(Error::NotExposed(_))));
        let rho3 = exposed_rotations(&inst, &mu2()).unwrap()[0].clone();
        assert_eq!(eliminate(&inst, &mu2(), &rho3).unwrap(), mu3());
    }

    #[test]
    fn digraph_of_example() {
        let inst = example();
        let dg = rotation_digraph(&inst);
        let rs: Vec<_> = dg.rotations.iter().map(pairs1).collect();
        assert_eq!(rs, [vec![(1, 1), (2, 2)], vec![(3, 3), (4, 4)], vec![(1, 2), (3, 4)]]);
        let e: Vec<(usize, usize, &str)> = dg.edges().map(|(a, b, t)| (a, b, t.code())).collect();
        assert_eq!(e, [(0, 1, "2"), (0, 2, "1"), (1, 2, "12")]);
        assert_eq!(dg.move_down(0, 1), Some(0));
        assert_eq!(dg.move_up(1, 3), Some(0));
        let dot = dg.to_dot(&inst);
        assert!(dot.contains("r2 -> r3 [label=\"rule=12\"]"));
    }

    #[test]
    fn downset_bijection_on_example() {
        let inst = example();
        let dg = rotation_digraph(&inst);
        assert_eq!(matching_from_downset(&inst, &dg, &[]).unwrap(), mu0());
        assert_eq!(matching_from_downset(&inst, &dg, &[0]).unwrap(), mu1());
        assert_eq!(matching_from_downset(&inst, &dg, &[0, 1]).unwrap(), mu2());
        assert_eq!(matching_from_downset(&inst, &dg, &[0, 1, 2]).unwrap(), mu3());
        assert!(matches!(matching_from_downset(&inst, &dg, &[1]), Err(Error::NotDownset(_))));
        assert_eq!(downset_from_matching(&inst, &dg, &mu2()).unwrap(), [0, 1]);
        assert!(downset_from_matching(&inst, &dg, &mu0()).unwrap().is_empty());
        assert!(dg.dag().is_downset(&[0, 1]));
    }

    #[test]
    fn all_matchings_of_example() {
        let all: HashSet<Matching> = all_stable_matchings_bruteforce(&example()).unwrap().into_iter().collect();
        let expect: HashSet<Matching> = [mu0(), mu1(), mu2(), mu3()].into_iter().collect();
        assert_eq!(all, expect);
    }

    #[test]
    fn master_lists_have_no_rotations() {
        let lists = vec![vec![0, 1, 2]; 3];
        let inst = Instance::new(lists.clone(), lists).unwrap();
        assert!(rotation_digraph(&inst).is_empty());
        assert_eq!(all_stable_matchings_bruteforce(&inst).unwrap().len(), 1);
    }

    #[test]
    fn opposed_two_by_two() {
        let inst = Instance::parse("SM 2 2\nm1: w1 w2\nm2: w2 w1\nw1: m2 m1\nw2: m1 m2\n").unwrap();
        let all = all_stable_matchings_bruteforce(&inst).unwrap();
        assert_eq!(all.len(), 2);
        assert!(all.iter().all(|mu| blocking_pairs(&inst, mu).unwrap().is_empty()));
        assert_eq!(rotation_digraph(&inst).len(), 1);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(all_stable_matchings_with_cap(&example(), 2), Err(Error::CapExceeded(_))));
    }
}
