//! Directed acyclic graphs read as finite posets (the order is the
//! reachability relation), with downset enumeration and small-poset helpers.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};
use std::fmt::Write as _;
use std::ops::ControlFlow;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dag {
    n: usize,
    edges: Vec<(usize, usize)>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
    colors: BTreeMap<(usize, usize), usize>,
}

impl Dag {
    /// Builds the graph on vertices `0..n`; rejects loops, repeated edges and cycles.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut sorted = edges.to_vec();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(Error::Graph(format!("repeated edge {} -> {}", w[0].0 + 1, w[0].1 + 1)));
            }
        }
        let mut succ = vec![Vec::new(); n];
        let mut pred = vec![Vec::new(); n];
        for &(u, v) in &sorted {
            if u >= n || v >= n {
                return Err(Error::Graph(format!("edge {} -> {} leaves the vertex range", u + 1, v + 1)));
            }
            if u == v {
                return Err(Error::Graph(format!("self-loop at {}", u + 1)));
            }
            succ[u].push(v);
            pred[v].push(u);
        }
        let dag = Dag { n, edges: sorted, succ, pred, colors: BTreeMap::new() };
        if dag.topo_kahn().len() != n {
            return Err(Error::Graph("the graph has a directed cycle".into()));
        }
        Ok(dag)
    }

    pub fn with_colors(n: usize, edges: &[(usize, usize, usize)]) -> Result<Self> {
        let plain: Vec<(usize, usize)> = edges.iter().map(|&(u, v, _)| (u, v)).collect();
        let mut dag = Dag::new(n, &plain)?;
        dag.colors = edges.iter().map(|&(u, v, c)| ((u, v), c)).collect();
        Ok(dag)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn succ(&self, v: usize) -> &[usize] {
        &self.succ[v]
    }

    pub fn pred(&self, v: usize) -> &[usize] {
        &self.pred[v]
    }

    pub fn color(&self, u: usize, v: usize) -> Option<usize> {
        self.colors.get(&(u, v)).copied()
    }

    pub fn has_colors(&self) -> bool {
        !self.colors.is_empty()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.binary_search(&(u, v)).is_ok()
    }

    fn topo_kahn(&self) -> Vec<usize> {
        let mut indeg: Vec<usize> = self.pred.iter().map(Vec::len).collect();
        let mut heap: BinaryHeap<Reverse<usize>> = (0..self.n).filter(|&v| indeg[v] == 0).map(Reverse).collect();
        let mut order = Vec::with_capacity(self.n);
        while let Some(Reverse(v)) = heap.pop() {
            order.push(v);
            for &s in &self.succ[v] {
                indeg[s] -= 1;
                if indeg[s] == 0 {
                    heap.push(Reverse(s));
                }
            }
        }
        order
    }

    /// Smallest-index-first topological order.
    pub fn topological_order(&self) -> Vec<usize> {
        self.topo_kahn()
    }

    /// `v` together with everything reachable from it.
    pub fn descendants(&self, v: usize) -> Vec<bool> {
        reach(v, &self.succ)
    }

    /// `v` together with everything that reaches it.
    pub fn ancestors(&self, v: usize) -> Vec<bool> {
        reach(v, &self.pred)
    }

    /// `closure[u][v]` is true iff there is a nonempty path from `u` to `v`.
    pub fn reachability(&self) -> Vec<Vec<bool>> {
        let mut closure = vec![vec![false; self.n]; self.n];
        for &v in self.topo_kahn().iter().rev() {
            for &s in &self.succ[v] {
                closure[v][s] = true;
                let (lo, hi) = closure.split_at_mut(v.max(s));
                let (row_v, row_s) = if v < s { (&mut lo[v], &hi[0]) } else { (&mut hi[0], &lo[s]) };
                for (a, &b) in row_v.iter_mut().zip(row_s.iter()) {
                    *a |= b;
                }
            }
        }
        closure
    }

    /// The graph with an edge for every comparable pair.
    pub fn transitive_closure(&self) -> Dag {
        Dag::from_relation(&self.reachability()).expect("closure of a DAG is acyclic")
    }

    /// Edges of the Hasse diagram of the order.
    pub fn transitive_reduction(&self) -> Dag {
        let closure = self.reachability();
        let keep: Vec<(usize, usize, Option<usize>)> = self
            .edges
            .iter()
            .filter(|&&(u, v)| !self.succ[u].iter().any(|&x| x != v && closure[x][v]))
            .map(|&(u, v)| (u, v, self.color(u, v)))
            .collect();
        let mut dag =
            Dag::new(self.n, &keep.iter().map(|&(u, v, _)| (u, v)).collect::<Vec<_>>()).expect("subgraph of a DAG");
        dag.colors = keep.iter().filter_map(|&(u, v, c)| c.map(|c| ((u, v), c))).collect();
        dag
    }

    /// Builds the order relation on `0..n` from a closure matrix.
    pub fn from_relation(rel: &[Vec<bool>]) -> Result<Dag> {
        let n = rel.len();
        let edges: Vec<(usize, usize)> =
            (0..n).flat_map(|u| (0..n).filter(move |&v| rel[u][v]).map(move |v| (u, v))).collect();
        Dag::new(n, &edges)
    }

    /// True iff `set` is closed under predecessors.
    pub fn is_downset(&self, set: &[usize]) -> bool {
        let mut inside = vec![false; self.n];
        for &v in set {
            if v >= self.n {
                return false;
            }
            inside[v] = true;
        }
        set.iter().all(|&v| self.pred[v].iter().all(|&u| inside[u]))
    }

    /// Subgraph on the kept vertices, renumbered in ascending order.
    /// Also returns the original id of each new vertex.
    pub fn induced(&self, keep: &[bool]) -> (Dag, Vec<usize>) {
        let old: Vec<usize> = (0..self.n).filter(|&v| keep[v]).collect();
        let mut new_of = vec![usize::MAX; self.n];
        for (i, &v) in old.iter().enumerate() {
            new_of[v] = i;
        }
        let edges: Vec<(usize, usize, Option<usize>)> = self
            .edges
            .iter()
            .filter(|&&(u, v)| keep[u] && keep[v])
            .map(|&(u, v)| (new_of[u], new_of[v], self.color(u, v)))
            .collect();
        let mut dag =
            Dag::new(old.len(), &edges.iter().map(|&(u, v, _)| (u, v)).collect::<Vec<_>>()).expect("subgraph of a DAG");
        dag.colors = edges.iter().filter_map(|&(u, v, c)| c.map(|c| ((u, v), c))).collect();
        (dag, old)
    }

    /// Visits every downset exactly once, as a sorted vertex list.
    ///
    /// Vertices are decided in topological order; a vertex may be taken only
    /// when all its predecessors were, so every branch ends in a downset.
    pub fn for_each_downset<B>(&self, mut visit: impl FnMut(&[usize]) -> ControlFlow<B>) -> Option<B> {
        let order = self.topo_kahn();
        let mut inside = vec![false; self.n];
        let mut current = Vec::new();
        match self.downset_rec(&order, 0, &mut inside, &mut current, &mut visit) {
            ControlFlow::Break(b) => Some(b),
            ControlFlow::Continue(()) => None,
        }
    }

    fn downset_rec<B>(
        &self,
        order: &[usize],
        i: usize,
        inside: &mut Vec<bool>,
        current: &mut Vec<usize>,
        visit: &mut impl FnMut(&[usize]) -> ControlFlow<B>,
    ) -> ControlFlow<B> {
        if i == order.len() {
            let mut sorted = current.clone();
            sorted.sort_unstable();
            return visit(&sorted);
        }
        let v = order[i];
        self.downset_rec(order, i + 1, inside, current, visit)?;
        if self.pred[v].iter().all(|&u| inside[u]) {
            inside[v] = true;
            current.push(v);
            let r = self.downset_rec(order, i + 1, inside, current, visit);
            current.pop();
            inside[v] = false;
            r?;
        }
        ControlFlow::Continue(())
    }

    /// All downsets; refuses graphs with more than `max_vertices` vertices.
    pub fn enumerate_downsets_bruteforce(&self, max_vertices: usize) -> Result<Vec<Vec<usize>>> {
        if self.n > max_vertices {
            return Err(Error::CapExceeded(format!(
                "downset enumeration limited to {max_vertices} vertices, graph has {}",
                self.n
            )));
        }
        let mut out = Vec::new();
        self.for_each_downset::<()>(|d| {
            out.push(d.to_vec());
            ControlFlow::Continue(())
        });
        Ok(out)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("DAG {} {}\n", self.n, self.edges.len());
        for &(u, v) in &self.edges {
            match self.color(u, v) {
                Some(c) => writeln!(out, "{} {} {}", u + 1, v + 1, c).unwrap(),
                None => writeln!(out, "{} {}", u + 1, v + 1).unwrap(),
            }
        }
        out
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph G {\n");
        for v in 0..self.n {
            writeln!(out, "  {};", v + 1).unwrap();
        }
        for &(u, v) in &self.edges {
            match self.color(u, v) {
                Some(c) => writeln!(out, "  {} -> {} [color={}];", u + 1, v + 1, c).unwrap(),
                None => writeln!(out, "  {} -> {};", u + 1, v + 1).unwrap(),
            }
        }
        out.push_str("}\n");
        out
    }
}

fn reach(v: usize, adj: &[Vec<usize>]) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![v];
    seen[v] = true;
    while let Some(x) = stack.pop() {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen
}

/// Parses `DAG <p> <q>` followed by `u v [color]` lines (1-based vertices).
pub fn parse_dag(text: &str) -> Result<Dag> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    let mut colored = 0;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let Some((p, _)) = header else {
            if toks.len() != 3 || toks[0] != "DAG" {
                return Err(Error::parse(lineno, "expected header `DAG <p> <q>`"));
            }
            let p = toks[1].parse().map_err(|_| Error::parse(lineno, "bad vertex count"))?;
            let q = toks[2].parse().map_err(|_| Error::parse(lineno, "bad edge count"))?;
            header = Some((p, q));
            continue;
        };
        if toks.len() != 2 && toks.len() != 3 {
            return Err(Error::parse(lineno, "expected `u v [color]`"));
        }
        let num = |s: &str| s.parse::<usize>().map_err(|_| Error::parse(lineno, format!("bad number `{s}`")));
        let (u, v) = (num(toks[0])?, num(toks[1])?);
        if u == 0 || v == 0 || u > p || v > p {
            return Err(Error::parse(lineno, format!("vertex out of range 1..{p}")));
        }
        let c = if toks.len() == 3 {
            colored += 1;
            Some(num(toks[2])?)
        } else {
            None
        };
        edges.push((u - 1, v - 1, c));
    }
    let (p, q) = header.ok_or_else(|| Error::parse(1, "missing header"))?;
    if edges.len() != q {
        return Err(Error::parse(0, format!("header says {q} edges, found {}", edges.len())));
    }
    if colored != 0 && colored != q {
        return Err(Error::parse(0, "either every edge or no edge carries a color"));
    }
    if colored > 0 {
        Dag::with_colors(p, &edges.iter().map(|&(u, v, c)| (u, v, c.unwrap())).collect::<Vec<_>>())
    } else {
        Dag::new(p, &edges.iter().map(|&(u, v, _)| (u, v)).collect::<Vec<_>>())
    }
}

/// Order isomorphism by backtracking over closures; at most 10 vertices.
pub fn poset_isomorphic_small(a: &Dag, b: &Dag) -> Result<bool> {
    if a.len() > 10 || b.len() > 10 {
        return Err(Error::CapExceeded("isomorphism test limited to 10 vertices".into()));
    }
    if a.len() != b.len() {
        return Ok(false);
    }
    let (ca, cb) = (a.reachability(), b.reachability());
    let sig = |c: &[Vec<bool>], v: usize| {
        let up = c.iter().filter(|row| row[v]).count();
        let down = c[v].iter().filter(|&&x| x).count();
        (up, down)
    };
    let n = a.len();
    let sa: Vec<_> = (0..n).map(|v| sig(&ca, v)).collect();
    let sb: Vec<_> = (0..n).map(|v| sig(&cb, v)).collect();
    let (mut x, mut y) = (sa.clone(), sb.clone());
    x.sort_unstable();
    y.sort_unstable();
    if x != y {
        return Ok(false);
    }
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn go(
        i: usize,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        ca: &[Vec<bool>],
        cb: &[Vec<bool>],
        sa: &[(usize, usize)],
        sb: &[(usize, usize)],
    ) -> bool {
        let n = map.len();
        if i == n {
            return true;
        }
        for j in 0..n {
            if used[j] || sa[i] != sb[j] {
                continue;
            }
            if (0..i).any(|k| ca[k][i] != cb[map[k]][j] || ca[i][k] != cb[j][map[k]]) {
                continue;
            }
            map[i] = j;
            used[j] = true;
            if go(i + 1, map, used, ca, cb, sa, sb) {
                return true;
            }
            used[j] = false;
        }
        false
    }
    Ok(go(0, &mut map, &mut used, &ca, &cb, &sa, &sb))
}

/// One Hasse diagram per isomorphism class of posets on `n` elements, each
/// naturally labelled (every edge goes from a smaller to a larger index).
pub fn posets_up_to_isomorphism(n: usize) -> Vec<Dag> {
    assert!(n <= 6, "poset enumeration is meant for tiny orders");
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let mut classes: Vec<Dag> = Vec::new();
    for mask in 0u64..(1u64 << pairs.len()) {
        let mut rel = vec![vec![false; n]; n];
        for (i, &(u, v)) in pairs.iter().enumerate() {
            if mask >> i & 1 == 1 {
                rel[u][v] = true;
            }
        }
        let transitive = (0..n).all(|a| (0..n).all(|b| !rel[a][b] || (0..n).all(|c| !rel[b][c] || rel[a][c])));
        if !transitive {
            continue;
        }
        let hasse = Dag::from_relation(&rel).expect("relation follows index order").transitive_reduction();
        if !classes.iter().any(|c| poset_isomorphic_small(c, &hasse).unwrap()) {
            classes.push(hasse);
        }
    }
    classes
}
