//! Two-sided preference instances and the basic algorithms on them.
//!
//! Agents are indexed from 0 on each side. Every agent also carries a name
//! (`m1`, `w3`, or a construction label such as `m[2,5]`) used by the text
//! format and by realization checks.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const UNRANKED: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Man,
    Woman,
}

impl Side {
    pub fn prefix(self) -> char {
        match self {
            Side::Man => 'm',
            Side::Woman => 'w',
        }
    }

    pub fn other(self) -> Side {
        match self {
            Side::Man => Side::Woman,
            Side::Woman => Side::Man,
        }
    }
}

/// Builds the construction label `m[c,v]` / `w[c,v]`.
pub fn label(side: Side, color: usize, vertex: usize) -> String {
    format!("{}[{},{}]", side.prefix(), color, vertex)
}

/// Splits a construction label into `(side, color, vertex)`.
pub fn parse_label(name: &str) -> Option<(Side, usize, usize)> {
    let side = match name.chars().next()? {
        'm' => Side::Man,
        'w' => Side::Woman,
        _ => return None,
    };
    let inner = name[1..].strip_prefix('[')?.strip_suffix(']')?;
    let (c, v) = inner.split_once(',')?;
    Some((side, c.trim().parse().ok()?, v.trim().parse().ok()?))
}

fn parse_plain(name: &str, side: Side) -> Option<usize> {
    let digits = name.strip_prefix(side.prefix())?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse::<usize>().ok().filter(|&i| i >= 1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    men: Vec<Vec<usize>>,
    women: Vec<Vec<usize>>,
    men_names: Vec<String>,
    women_names: Vec<String>,
    man_rank: Vec<u32>,
    woman_rank: Vec<u32>,
}

impl Instance {
    /// Validates the lists and assigns the default names `m1..`, `w1..`.
    pub fn new(men: Vec<Vec<usize>>, women: Vec<Vec<usize>>) -> Result<Self> {
        let men_names = (1..=men.len()).map(|i| format!("m{i}")).collect();
        let women_names = (1..=women.len()).map(|i| format!("w{i}")).collect();
        Self::with_names(men, women, men_names, women_names)
    }

    pub fn with_names(
        men: Vec<Vec<usize>>,
        women: Vec<Vec<usize>>,
        men_names: Vec<String>,
        women_names: Vec<String>,
    ) -> Result<Self> {
        let (nm, nw) = (men.len(), women.len());
        if men_names.len() != nm || women_names.len() != nw {
            return Err(Error::Inconsistent("name count does not match agent count".into()));
        }
        for names in [&men_names, &women_names] {
            let mut seen = std::collections::HashSet::new();
            for n in names {
                if !seen.insert(n.as_str()) {
                    return Err(Error::Inconsistent(format!("duplicate agent name {n}")));
                }
            }
        }
        let man_rank = rank_table(&men, nw, &men_names, &women_names)?;
        let woman_rank = rank_table(&women, nm, &women_names, &men_names)?;
        for m in 0..nm {
            for &w in &men[m] {
                if woman_rank[w * nm + m] == UNRANKED {
                    return Err(Error::Inconsistent(format!(
                        "{} lists {} but not vice versa",
                        men_names[m], women_names[w]
                    )));
                }
            }
        }
        for w in 0..nw {
            for &m in &women[w] {
                if man_rank[m * nw + w] == UNRANKED {
                    return Err(Error::Inconsistent(format!(
                        "{} lists {} but not vice versa",
                        women_names[w], men_names[m]
                    )));
                }
            }
        }
        Ok(Instance { men, women, men_names, women_names, man_rank, woman_rank })
    }

    pub fn n_men(&self) -> usize {
        self.men.len()
    }

    pub fn n_women(&self) -> usize {
        self.women.len()
    }

    pub fn man_list(&self, m: usize) -> &[usize] {
        &self.men[m]
    }

    pub fn woman_list(&self, w: usize) -> &[usize] {
        &self.women[w]
    }

    pub fn men_lists(&self) -> &[Vec<usize>] {
        &self.men
    }

    pub fn women_lists(&self) -> &[Vec<usize>] {
        &self.women
    }

    pub fn man_name(&self, m: usize) -> &str {
        &self.men_names[m]
    }

    pub fn woman_name(&self, w: usize) -> &str {
        &self.women_names[w]
    }

    pub fn men_names(&self) -> &[String] {
        &self.men_names
    }

    pub fn women_names(&self) -> &[String] {
        &self.women_names
    }

    pub fn name(&self, side: Side, i: usize) -> &str {
        match side {
            Side::Man => &self.men_names[i],
            Side::Woman => &self.women_names[i],
        }
    }

    /// 1-based position of `w` in `m`'s list.
    pub fn man_rank(&self, m: usize, w: usize) -> Option<usize> {
        let r = self.man_rank[m * self.n_women() + w];
        (r != UNRANKED).then_some(r as usize + 1)
    }

    /// 1-based position of `m` in `w`'s list.
    pub fn woman_rank(&self, w: usize, m: usize) -> Option<usize> {
        let r = self.woman_rank[w * self.n_men() + m];
        (r != UNRANKED).then_some(r as usize + 1)
    }

    pub(crate) fn man_pos(&self, m: usize, w: usize) -> u32 {
        self.man_rank[m * self.n_women() + w]
    }

    pub(crate) fn woman_pos(&self, w: usize, m: usize) -> u32 {
        self.woman_rank[w * self.n_men() + m]
    }

    pub fn is_acceptable(&self, m: usize, w: usize) -> bool {
        self.man_pos(m, w) != UNRANKED
    }

    pub fn is_complete(&self) -> bool {
        self.men.iter().all(|l| l.len() == self.n_women()) && self.women.iter().all(|l| l.len() == self.n_men())
    }

    /// Same lists, new names.
    pub fn renamed(&self, men_names: Vec<String>, women_names: Vec<String>) -> Result<Self> {
        Self::with_names(self.men.clone(), self.women.clone(), men_names, women_names)
    }

    pub fn parse(text: &str) -> Result<Self> {
        parse_instance(text)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("SM {} {}\n", self.n_men(), self.n_women());
        for (m, list) in self.men.iter().enumerate() {
            out.push_str(&self.men_names[m]);
            out.push(':');
            for &w in list {
                out.push(' ');
                out.push_str(&self.women_names[w]);
            }
            out.push('\n');
        }
        for (w, list) in self.women.iter().enumerate() {
            out.push_str(&self.women_names[w]);
            out.push(':');
            for &m in list {
                out.push(' ');
                out.push_str(&self.men_names[m]);
            }
            out.push('\n');
        }
        out
    }

    /// One `man woman` line per pair, in man order.
    pub fn format_matching(&self, mu: &Matching) -> String {
        let mut out = String::new();
        for (m, w) in mu.pairs() {
            out.push_str(&format!("{} {}\n", self.men_names[m], self.women_names[w]));
        }
        out
    }
}

fn rank_table(lists: &[Vec<usize>], other: usize, names: &[String], other_names: &[String]) -> Result<Vec<u32>> {
    let mut table = vec![UNRANKED; lists.len() * other];
    for (a, list) in lists.iter().enumerate() {
        for (pos, &b) in list.iter().enumerate() {
            if b >= other {
                return Err(Error::Inconsistent(format!("{} lists unknown agent #{b}", names[a])));
            }
            let slot = &mut table[a * other + b];
            if *slot != UNRANKED {
                return Err(Error::Inconsistent(format!("{} lists {} twice", names[a], other_names[b])));
            }
            *slot = pos as u32;
        }
    }
    Ok(table)
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for Instance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_instance(s)
    }
}

struct AgentLine<'a> {
    line: usize,
    name: &'a str,
    entries: Vec<&'a str>,
}

/// Parses the `SM <men> <women>` text format.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut header = None;
    let mut men_lines = Vec::new();
    let mut women_lines = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if header.is_none() {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 3 || toks[0] != "SM" {
                return Err(Error::parse(lineno, "expected header `SM <men> <women>`"));
            }
            let nm = toks[1].parse::<usize>().map_err(|_| Error::parse(lineno, "bad men count"))?;
            let nw = toks[2].parse::<usize>().map_err(|_| Error::parse(lineno, "bad women count"))?;
            header = Some((nm, nw));
            continue;
        }
        let (name, rest) = line.split_once(':').ok_or_else(|| Error::parse(lineno, "expected `<name>: <list>`"))?;
        let name = name.trim();
        let entry = AgentLine { line: lineno, name, entries: rest.split_whitespace().collect() };
        match name.chars().next() {
            Some('m') => men_lines.push(entry),
            Some('w') => women_lines.push(entry),
            _ => return Err(Error::parse(lineno, format!("unknown agent `{name}`"))),
        }
    }
    let (nm, nw) = header.ok_or_else(|| Error::parse(1, "missing header"))?;
    if men_lines.len() != nm {
        return Err(Error::parse(0, format!("header says {nm} men, found {}", men_lines.len())));
    }
    if women_lines.len() != nw {
        return Err(Error::parse(0, format!("header says {nw} women, found {}", women_lines.len())));
    }
    let men_order = index_agents(&men_lines, Side::Man)?;
    let women_order = index_agents(&women_lines, Side::Woman)?;
    let men_idx: HashMap<&str, usize> = men_order.iter().enumerate().map(|(i, &l)| (men_lines[l].name, i)).collect();
    let women_idx: HashMap<&str, usize> =
        women_order.iter().enumerate().map(|(i, &l)| (women_lines[l].name, i)).collect();

    let resolve = |lines: &[AgentLine], order: &[usize], idx: &HashMap<&str, usize>| {
        order
            .iter()
            .map(|&l| {
                let al = &lines[l];
                let mut seen = std::collections::HashSet::new();
                al.entries
                    .iter()
                    .map(|e| {
                        let i = *idx.get(e).ok_or_else(|| Error::parse(al.line, format!("unknown agent `{e}`")))?;
                        if !seen.insert(i) {
                            return Err(Error::parse(al.line, format!("duplicate entry `{e}`")));
                        }
                        Ok(i)
                    })
                    .collect::<Result<Vec<usize>>>()
            })
            .collect::<Result<Vec<Vec<usize>>>>()
    };
    let men = resolve(&men_lines, &men_order, &women_idx)?;
    let women = resolve(&women_lines, &women_order, &men_idx)?;
    let names = |lines: &[AgentLine], order: &[usize]| -> Vec<String> {
        order.iter().map(|&l| lines[l].name.to_string()).collect()
    };
    Instance::with_names(men, women, names(&men_lines, &men_order), names(&women_lines, &women_order))
}

/// Returns, for each internal index, the line that defines that agent.
/// Plain names `m<i>` fix the index to `i-1`; otherwise file order is used.
fn index_agents(lines: &[AgentLine], side: Side) -> Result<Vec<usize>> {
    let mut seen = HashMap::new();
    for (i, l) in lines.iter().enumerate() {
        if seen.insert(l.name, i).is_some() {
            return Err(Error::parse(l.line, format!("agent `{}` defined twice", l.name)));
        }
    }
    let plain: Option<Vec<usize>> = lines.iter().map(|l| parse_plain(l.name, side)).collect();
    match plain {
        Some(nums) => {
            let mut order = vec![usize::MAX; lines.len()];
            for (l, &k) in nums.iter().enumerate() {
                if k > lines.len() {
                    return Err(Error::parse(lines[l].line, format!("index out of range in `{}`", lines[l].name)));
                }
                order[k - 1] = l;
            }
            Ok(order)
        }
        None => Ok((0..lines.len()).collect()),
    }
}

/// A (partial) matching stored from both sides.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matching {
    wife: Vec<Option<usize>>,
    husband: Vec<Option<usize>>,
}

impl Matching {
    pub fn empty(n_men: usize, n_women: usize) -> Self {
        Matching { wife: vec![None; n_men], husband: vec![None; n_women] }
    }

    pub fn from_pairs(n_men: usize, n_women: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut mu = Matching::empty(n_men, n_women);
        for &(m, w) in pairs {
            if m >= n_men || w >= n_women {
                return Err(Error::InvalidMatching(format!("pair ({m},{w}) out of range")));
            }
            if mu.wife[m].is_some() || mu.husband[w].is_some() {
                return Err(Error::InvalidMatching(format!("agent repeated in pair ({m},{w})")));
            }
            mu.wife[m] = Some(w);
            mu.husband[w] = Some(m);
        }
        Ok(mu)
    }

    pub fn from_wives(wives: &[Option<usize>], n_women: usize) -> Result<Self> {
        let pairs: Vec<(usize, usize)> = wives.iter().enumerate().filter_map(|(m, w)| w.map(|w| (m, w))).collect();
        Self::from_pairs(wives.len(), n_women, &pairs)
    }

    pub fn wife(&self, m: usize) -> Option<usize> {
        self.wife[m]
    }

    pub fn husband(&self, w: usize) -> Option<usize> {
        self.husband[w]
    }

    pub fn wives(&self) -> &[Option<usize>] {
        &self.wife
    }

    pub fn n_men(&self) -> usize {
        self.wife.len()
    }

    pub fn n_women(&self) -> usize {
        self.husband.len()
    }

    pub fn len(&self) -> usize {
        self.wife.iter().filter(|w| w.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Pairs sorted by man.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.wife.iter().enumerate().filter_map(|(m, w)| w.map(|w| (m, w))).collect()
    }

    pub(crate) fn set(&mut self, m: usize, w: usize) {
        self.wife[m] = Some(w);
        self.husband[w] = Some(m);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    ManOptimal,
    WomanOptimal,
}

/// Deferred acceptance. `ManOptimal` lets the men propose.
pub fn gale_shapley(inst: &Instance, orientation: Orientation) -> Matching {
    match orientation {
        Orientation::ManOptimal => {
            let order: Vec<usize> = (0..inst.n_men()).collect();
            let wives = propose(&inst.men, inst.n_women(), |w, m| inst.woman_pos(w, m), &order);
            Matching::from_wives(&wives, inst.n_women()).expect("deferred acceptance yields a matching")
        }
        Orientation::WomanOptimal => {
            let order: Vec<usize> = (0..inst.n_women()).collect();
            let husbands = propose(&inst.women, inst.n_men(), |m, w| inst.man_pos(m, w), &order);
            let pairs: Vec<(usize, usize)> =
                husbands.iter().enumerate().filter_map(|(w, m)| m.map(|m| (m, w))).collect();
            Matching::from_pairs(inst.n_men(), inst.n_women(), &pairs).expect("deferred acceptance yields a matching")
        }
    }
}

/// Proposers walk down their lists; receivers keep the best offer so far.
/// `initial` is the starting queue of free proposers.
pub(crate) fn propose(
    lists: &[Vec<usize>],
    n_receivers: usize,
    receiver_pos: impl Fn(usize, usize) -> u32,
    initial: &[usize],
) -> Vec<Option<usize>> {
    let mut next = vec![0usize; lists.len()];
    let mut held: Vec<Option<usize>> = vec![None; n_receivers];
    let mut queue: VecDeque<usize> = initial.iter().copied().collect();
    while let Some(a) = queue.pop_front() {
        while next[a] < lists[a].len() {
            let b = lists[a][next[a]];
            next[a] += 1;
            match held[b] {
                None => {
                    held[b] = Some(a);
                    break;
                }
                Some(cur) if receiver_pos(b, a) < receiver_pos(b, cur) => {
                    held[b] = Some(a);
                    queue.push_back(cur);
                    break;
                }
                Some(_) => {}
            }
        }
    }
    let mut partner = vec![None; lists.len()];
    for (b, a) in held.iter().enumerate() {
        if let Some(a) = a {
            partner[*a] = Some(b);
        }
    }
    partner
}

fn check_matching(inst: &Instance, mu: &Matching) -> Result<()> {
    if mu.n_men() != inst.n_men() || mu.n_women() != inst.n_women() {
        return Err(Error::InvalidMatching("matching size differs from instance".into()));
    }
    for (m, w) in mu.pairs() {
        if !inst.is_acceptable(m, w) {
            return Err(Error::InvalidMatching(format!(
                "{} and {} are not mutually acceptable",
                inst.man_name(m),
                inst.woman_name(w)
            )));
        }
    }
    Ok(())
}

/// All blocking pairs of `mu`; an unmatched agent prefers any acceptable partner.
pub fn blocking_pairs(inst: &Instance, mu: &Matching) -> Result<Vec<(usize, usize)>> {
    check_matching(inst, mu)?;
    let mut out = Vec::new();
    for m in 0..inst.n_men() {
        let limit = mu.wife(m).map_or(u32::MAX, |w| inst.man_pos(m, w));
        for &w in &inst.men[m][..inst.men[m].len().min(limit as usize)] {
            let better = match mu.husband(w) {
                None => true,
                Some(h) => inst.woman_pos(w, m) < inst.woman_pos(w, h),
            };
            if better {
                out.push((m, w));
            }
        }
    }
    Ok(out)
}

pub fn is_stable(inst: &Instance, mu: &Matching) -> Result<bool> {
    Ok(blocking_pairs(inst, mu)?.is_empty())
}

/// Best and worst rank each agent receives from the other side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RangeProfile {
    pub k: usize,
    pub man_min: Vec<usize>,
    pub man_max: Vec<usize>,
    pub woman_min: Vec<usize>,
    pub woman_max: Vec<usize>,
}

impl RangeProfile {
    pub fn orank(&self, side: Side, i: usize) -> usize {
        match side {
            Side::Man => self.man_min[i],
            Side::Woman => self.woman_min[i],
        }
    }
}

pub fn compute_range(inst: &Instance) -> Result<RangeProfile> {
    if inst.n_men() != inst.n_women() || !inst.is_complete() {
        return Err(Error::NotComplete("range is defined for complete instances".into()));
    }
    let n = inst.n_men();
    let mut man_min = vec![usize::MAX; n];
    let mut man_max = vec![0; n];
    let mut woman_min = vec![usize::MAX; n];
    let mut woman_max = vec![0; n];
    for a in 0..n {
        for (pos, &b) in inst.men[a].iter().enumerate() {
            woman_min[b] = woman_min[b].min(pos + 1);
            woman_max[b] = woman_max[b].max(pos + 1);
        }
        for (pos, &b) in inst.women[a].iter().enumerate() {
            man_min[b] = man_min[b].min(pos + 1);
            man_max[b] = man_max[b].max(pos + 1);
        }
    }
    let k = (0..n).map(|i| (man_max[i] + 1 - man_min[i]).max(woman_max[i] + 1 - woman_min[i])).max().unwrap_or(1);
    Ok(RangeProfile { k, man_min, man_max, woman_min, woman_max })
}

/// Trims every list to the segment between the agent's two extreme stable
/// partners, keeping only mutually retained entries.
pub fn symmetric_shortlists(inst: &Instance) -> Instance {
    let best = gale_shapley(inst, Orientation::ManOptimal);
    let worst = gale_shapley(inst, Orientation::WomanOptimal);
    let segment =
        |list: &[usize], first: Option<usize>, last: Option<usize>, pos: &dyn Fn(usize) -> u32| match (first, last) {
            (Some(a), Some(b)) => list[pos(a) as usize..=pos(b) as usize].to_vec(),
            _ => Vec::new(),
        };
    let men_seg: Vec<Vec<usize>> = (0..inst.n_men())
        .map(|m| segment(&inst.men[m], best.wife(m), worst.wife(m), &|w| inst.man_pos(m, w)))
        .collect();
    let women_seg: Vec<Vec<usize>> = (0..inst.n_women())
        .map(|w| segment(&inst.women[w], worst.husband(w), best.husband(w), &|m| inst.woman_pos(w, m)))
        .collect();
    let men: Vec<Vec<usize>> = men_seg
        .iter()
        .enumerate()
        .map(|(m, l)| l.iter().copied().filter(|&w| women_seg[w].contains(&m)).collect())
        .collect();
    let women: Vec<Vec<usize>> = women_seg
        .iter()
        .enumerate()
        .map(|(w, l)| l.iter().copied().filter(|&m| men_seg[m].contains(&w)).collect())
        .collect();
    Instance::with_names(men, women, inst.men_names.clone(), inst.women_names.clone())
        .expect("mutual filter keeps lists consistent")
}

/// Appends every missing agent, in ascending index order, to each list.
pub fn complete_preferences(inst: &Instance) -> Result<Instance> {
    if inst.n_men() != inst.n_women() {
        return Err(Error::NotComplete("completion needs equally many men and women".into()));
    }
    let extend = |lists: &[Vec<usize>], n: usize| -> Vec<Vec<usize>> {
        lists
            .iter()
            .map(|l| {
                let mut present = vec![false; n];
                l.iter().for_each(|&b| present[b] = true);
                let mut out = l.clone();
                out.extend((0..n).filter(|&b| !present[b]));
                out
            })
            .collect()
    };
    Instance::with_names(
        extend(&inst.men, inst.n_women()),
        extend(&inst.women, inst.n_men()),
        inst.men_names.clone(),
        inst.women_names.clone(),
    )
}
