#![allow(dead_code)]

use std::fs;
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rotaposet::instance::{Instance, Matching};
use rotaposet::pathwidth::parse_decomposition;
use rotaposet::poset::{parse_dag, Dag};
use rotaposet::realize::{
    construct_instance, range_coloring, realize_bounded3, realize_list2inf_with, ColorAssignment, ColorOrdering,
    MasterSide,
};
use rotaposet::rotation::RotationDigraph;

pub fn fixture(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name].iter().collect();
    fs::read_to_string(path).unwrap()
}

pub fn dag(name: &str) -> Dag {
    parse_dag(&fixture(name)).unwrap()
}

pub fn row(inst: &Instance, name: &str) -> String {
    let entries: Vec<&str> = if let Some(m) = inst.men_names().iter().position(|n| n == name) {
        inst.man_list(m).iter().map(|&w| inst.woman_name(w)).collect()
    } else {
        let w = inst.women_names().iter().position(|n| n == name).expect("known agent");
        inst.woman_list(w).iter().map(|&m| inst.man_name(m)).collect()
    };
    format!("{name}: {}\n", entries.join(" "))
}

/// Every man then every woman, in the instance's own order.
pub fn table(inst: &Instance) -> String {
    inst.men_names().iter().chain(inst.women_names()).map(|n| row(inst, n)).collect()
}

pub fn render_generic() -> String {
    let h = dag("diamond.dag");
    let colors = ColorAssignment::padded(&h, h.edges().iter().map(|&e| (e, 1)).collect()).unwrap();
    table(&construct_instance(&h, &colors, &ColorOrdering::ascending(&colors)).unwrap())
}

pub fn render_bounded3() -> String {
    table(&realize_bounded3(&dag("diamond.dag")).unwrap())
}

/// Base rows in the order of the stored table, then both pairs of shared lists.
pub fn render_list2inf() -> String {
    let h = dag("list_poset.dag");
    let men = realize_list2inf_with(&h, MasterSide::Men).unwrap();
    let women = realize_list2inf_with(&h, MasterSide::Women).unwrap();
    let mut out = String::new();
    for line in fixture("list2inf_table.txt").lines().filter(|l| l.starts_with('m') || l.starts_with('w')) {
        out.push_str(&row(&men.base, line.split(':').next().unwrap()));
    }
    let women_named = |l: &[usize]| l.iter().map(|&w| men.instance.woman_name(w)).collect::<Vec<_>>().join(" ");
    let men_named = |l: &[usize]| l.iter().map(|&m| women.instance.man_name(m)).collect::<Vec<_>>().join(" ");
    out.push_str(&format!("LM1: {}\n", women_named(&men.first_list)));
    out.push_str(&format!("LM2: {}\n", women_named(&men.second_list)));
    out.push_str(&format!("LW1: {}\n", men_named(&women.first_list)));
    out.push_str(&format!("LW2: {}\n", men_named(&women.second_list)));
    out
}

pub fn render_range_orders() -> String {
    let h = dag("diamond.dag");
    let x = parse_decomposition(&fixture("range_diamond.pd")).unwrap();
    let (colors, order) = range_coloring(&h, &x).unwrap();
    let mut out = String::new();
    for v in (0..h.len()).rev() {
        let c = colors.colors(v);
        out.push_str(&format!("C{}: [{},{}]\n", v + 1, c.first().unwrap(), c.last().unwrap()));
    }
    for v in (0..h.len()).rev() {
        let cycle: Vec<String> = order.cycle(v).iter().map(|c| c.to_string()).collect();
        out.push_str(&format!("pi{} = ({})\n", v + 1, cycle.join(", ")));
    }
    out
}

/// Each forward pair of a hidden random order becomes an edge with
/// probability `density`.
pub fn random_dag(p: usize, density: f64, rng: &mut ChaCha8Rng) -> Dag {
    let mut order: Vec<usize> = (0..p).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    for i in 0..p {
        for j in i + 1..p {
            if rng.random_bool(density) {
                edges.push((order[i], order[j]));
            }
        }
    }
    Dag::new(p, &edges).unwrap()
}

pub fn random_instance(n: usize, rng: &mut ChaCha8Rng) -> Instance {
    let mut lists = |_| {
        let mut l: Vec<usize> = (0..n).collect();
        l.shuffle(rng);
        l
    };
    let men = (0..n).map(&mut lists).collect();
    let women = (0..n).map(&mut lists).collect();
    Instance::new(men, women).unwrap()
}

/// Every agent ranks the other side by index plus a uniform jitter in
/// `[0, spread)`, so each agent sees only a narrow band of ranks.
pub fn banded_instance(n: usize, spread: usize, rng: &mut ChaCha8Rng) -> Instance {
    let mut lists = |_| {
        let keys: Vec<usize> = (0..n).map(|x| x + rng.random_range(0..spread.max(1))).collect();
        let mut l: Vec<usize> = (0..n).collect();
        l.sort_by_key(|&x| (keys[x], x));
        l
    };
    let men = (0..n).map(&mut lists).collect();
    let women = (0..n).map(&mut lists).collect();
    Instance::new(men, women).unwrap()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Wives of every stable matching of a complete square instance, found by
/// testing all `n!` perfect matchings.
pub fn stable_by_permutation(inst: &Instance) -> Vec<Vec<usize>> {
    let n = inst.n_men();
    permutations(n)
        .into_iter()
        .filter(|wives| {
            let mut husband = vec![0; n];
            for (m, &w) in wives.iter().enumerate() {
                husband[w] = m;
            }
            (0..n).all(|m| {
                let mine = inst.man_rank(m, wives[m]).unwrap();
                inst.man_list(m)[..mine - 1]
                    .iter()
                    .all(|&w| inst.woman_rank(w, husband[w]).unwrap() < inst.woman_rank(w, m).unwrap())
            })
        })
        .collect()
}

/// A rotation has been eliminated in a stable matching exactly when its
/// first man is matched no better than his successor woman in the rotation.
pub fn eliminated(inst: &Instance, dg: &RotationDigraph, wives: &[usize]) -> Vec<usize> {
    dg.rotations
        .iter()
        .filter(|r| {
            let (m, _) = r.pairs[0];
            let next = r.pairs[1 % r.pairs.len()].1;
            inst.man_rank(m, wives[m]).unwrap() >= inst.man_rank(m, next).unwrap()
        })
        .map(|r| r.id)
        .collect()
}

pub fn as_matching(wives: &[usize]) -> Matching {
    let w: Vec<Option<usize>> = wives.iter().map(|&x| Some(x)).collect();
    Matching::from_wives(&w, wives.len()).unwrap()
}
