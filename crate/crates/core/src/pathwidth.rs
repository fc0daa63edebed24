//! Path decompositions: validation, conversion to nice form, restriction to
//! vertex subsets, the extent-based decomposition of a rotation digraph, and
//! an exact solver for very small graphs.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::instance::{compute_range, Instance, RangeProfile};
use crate::poset::Dag;
use crate::rotation::{rotation_digraph, Rotation, RotationDigraph};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PathDecomposition {
    bags: Vec<Vec<usize>>,
}

impl PathDecomposition {
    pub fn new(bags: Vec<Vec<usize>>) -> Self {
        let bags = bags
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b.dedup();
                b
            })
            .collect();
        PathDecomposition { bags }
    }

    pub fn bags(&self) -> &[Vec<usize>] {
        &self.bags
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }

    /// Largest bag size minus one (zero for an empty decomposition).
    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0).saturating_sub(1)
    }

    /// One vertex enters or leaves per step, starting from a singleton and
    /// ending with an empty bag.
    pub fn is_nice(&self) -> bool {
        if self.bags.is_empty() {
            return true;
        }
        self.bags[0].len() == 1
            && self.bags.last().is_some_and(Vec::is_empty)
            && self.bags.windows(2).all(|w| sym_diff(&w[0], &w[1]).len() == 1)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("PD {}\n", self.bags.len());
        for bag in &self.bags {
            let line: Vec<String> = bag.iter().map(|v| (v + 1).to_string()).collect();
            writeln!(out, "{}", line.join(" ")).unwrap();
        }
        out
    }
}

fn sym_diff(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = a.iter().filter(|x| b.binary_search(x).is_err()).copied().collect();
    out.extend(b.iter().filter(|x| a.binary_search(x).is_err()));
    out
}

/// Parses `PD <bags>` followed by one bag per line (an empty line is an empty bag).
pub fn parse_decomposition(text: &str) -> Result<PathDecomposition> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim_start().starts_with('#'));
    let count = loop {
        match lines.next() {
            None => return Err(Error::parse(1, "missing header `PD <bags>`")),
            Some((_, l)) if l.trim().is_empty() => continue,
            Some((i, l)) => {
                let toks: Vec<&str> = l.split_whitespace().collect();
                if toks.len() != 2 || toks[0] != "PD" {
                    return Err(Error::parse(i + 1, "expected header `PD <bags>`"));
                }
                break toks[1].parse::<usize>().map_err(|_| Error::parse(i + 1, "bad bag count"))?;
            }
        }
    };
    let mut bags = Vec::with_capacity(count);
    for (i, l) in lines {
        if bags.len() == count {
            if l.trim().is_empty() {
                continue;
            }
            return Err(Error::parse(i + 1, format!("more than {count} bags")));
        }
        let bag = l
            .split_whitespace()
            .map(|t| match t.parse::<usize>() {
                Ok(v) if v >= 1 => Ok(v - 1),
                _ => Err(Error::parse(i + 1, format!("bad vertex `{t}`"))),
            })
            .collect::<Result<Vec<usize>>>()?;
        bags.push(bag);
    }
    bags.resize(count, Vec::new());
    Ok(PathDecomposition::new(bags))
}

/// Vertex coverage, edge coverage (ignoring direction) and convexity.
pub fn validate_decomposition(g: &Dag, x: &PathDecomposition) -> bool {
    let n = g.len();
    let mut first = vec![usize::MAX; n];
    let mut last = vec![0; n];
    let mut count = vec![0usize; n];
    for (i, bag) in x.bags.iter().enumerate() {
        for &v in bag {
            if v >= n {
                return false;
            }
            first[v] = first[v].min(i);
            last[v] = i;
            count[v] += 1;
        }
    }
    if (0..n).any(|v| count[v] == 0 || count[v] != last[v] - first[v] + 1) {
        return false;
    }
    g.edges().iter().all(|&(u, v)| first[u].max(first[v]) <= last[u].min(last[v]))
}

/// Splits every transition into single removals, then single insertions,
/// and empties the last bag. Assumes each vertex occupies a contiguous run.
fn nicify(x: &PathDecomposition) -> PathDecomposition {
    let mut bags = Vec::new();
    let mut cur: Vec<usize> = Vec::new();
    let empty = Vec::new();
    for bag in x.bags.iter().chain(std::iter::once(&empty)) {
        for v in cur.clone() {
            if bag.binary_search(&v).is_err() {
                cur.retain(|&y| y != v);
                bags.push(cur.clone());
            }
        }
        for &v in bag {
            if cur.binary_search(&v).is_err() {
                let at = cur.partition_point(|&y| y < v);
                cur.insert(at, v);
                bags.push(cur.clone());
            }
        }
    }
    PathDecomposition { bags }
}

pub fn to_nice(g: &Dag, x: &PathDecomposition) -> Result<PathDecomposition> {
    if !validate_decomposition(g, x) {
        return Err(Error::Decomposition("not a path decomposition of the graph".into()));
    }
    Ok(nicify(x))
}

/// Restricts every bag to the kept vertices, renumbered in ascending order
/// as by [`Dag::induced`], and makes the result nice again.
pub fn induced_decomposition(x: &PathDecomposition, keep: &[bool]) -> PathDecomposition {
    let mut new_of = vec![usize::MAX; keep.len()];
    let mut next = 0;
    for (v, &k) in keep.iter().enumerate() {
        if k {
            new_of[v] = next;
            next += 1;
        }
    }
    let bags =
        x.bags.iter().map(|b| b.iter().filter(|&&v| v < keep.len() && keep[v]).map(|&v| new_of[v]).collect()).collect();
    nicify(&PathDecomposition::new(bags))
}

/// Interval of minranks a rotation can interact with.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Extent {
    pub lo: i64,
    pub hi: i64,
}

impl Extent {
    pub fn contains(&self, i: i64) -> bool {
        self.lo <= i && i <= self.hi
    }
}

pub fn extent_of(rho: &Rotation, profile: &RangeProfile) -> Extent {
    let ranks = rho.pairs.iter().flat_map(|&(m, w)| [profile.man_min[m], profile.woman_min[w]]).map(|r| r as i64);
    let lo = ranks.clone().min().unwrap_or(0);
    let hi = ranks.max().unwrap_or(0);
    let k = profile.k as i64;
    Extent { lo: lo - 2 * k + 1, hi: hi + 2 * k - 1 }
}

/// Bags `{rho : i in extent(rho)}` for `i` in `1..=n`, made nice.
pub fn construct_path_decomposition(inst: &Instance) -> Result<(RotationDigraph, PathDecomposition)> {
    let profile = compute_range(inst)?;
    let dg = rotation_digraph(inst);
    let n = inst.n_men() as i64;
    let extents: Vec<Extent> = dg.rotations.iter().map(|r| extent_of(r, &profile)).collect();
    let bags: Vec<Vec<usize>> =
        (1..=n).map(|i| (0..extents.len()).filter(|&r| extents[r].contains(i)).collect()).collect();
    let raw = PathDecomposition::new(bags);
    let x = to_nice(&dg.dag(), &raw)?;
    Ok((dg, x))
}

pub const TINY_PATHWIDTH_LIMIT: usize = 16;

/// Exact pathwidth via the vertex separation number, by dynamic programming
/// over prefixes of a vertex layout. Returns the width and a nice decomposition.
pub fn pathwidth_exact_tiny(g: &Dag) -> Result<(usize, PathDecomposition)> {
    let n = g.len();
    if n > TINY_PATHWIDTH_LIMIT {
        return Err(Error::CapExceeded(format!(
            "exact pathwidth is limited to {TINY_PATHWIDTH_LIMIT} vertices, graph has {n}"
        )));
    }
    if n == 0 {
        return Ok((0, PathDecomposition::default()));
    }
    let mut adj = vec![0u32; n];
    for &(u, v) in g.edges() {
        adj[u] |= 1 << v;
        adj[v] |= 1 << u;
    }
    let full = (1u32 << n) - 1;
    let boundary = |s: u32| (0..n).filter(|&u| s >> u & 1 == 1 && adj[u] & !s != 0).count();
    let mut best = vec![usize::MAX; 1 << n];
    let mut last = vec![0u8; 1 << n];
    best[0] = 0;
    for s in 1..=full {
        let b = boundary(s);
        for v in 0..n {
            if s >> v & 1 == 1 {
                let c = best[(s & !(1 << v)) as usize].max(b);
                if c < best[s as usize] {
                    best[s as usize] = c;
                    last[s as usize] = v as u8;
                }
            }
        }
    }
    let mut layout = Vec::with_capacity(n);
    let mut s = full;
    while s != 0 {
        let v = last[s as usize] as usize;
        layout.push(v);
        s &= !(1 << v);
    }
    layout.reverse();
    let mut bags = Vec::with_capacity(n);
    let mut prefix = 0u32;
    for &v in &layout {
        let mut bag: Vec<usize> = (0..n).filter(|&u| prefix >> u & 1 == 1 && adj[u] & !prefix != 0).collect();
        bag.push(v);
        bags.push(bag);
        prefix |= 1 << v;
    }
    let x = to_nice(g, &PathDecomposition::new(bags))?;
    Ok((best[full as usize], x))
}
