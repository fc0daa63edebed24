//! Attribute profiles: every agent is a point, and ranks the other side by a
//! linear functional of their points. Points sit on the moment curve
//! `(i, i^2, ..., i^6)`, where any three points can be made the top three of
//! some functional in any prescribed order.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::realize_bounded3;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::poset::Dag;

const DIMENSION: usize = 6;

/// A point and weights as read so far.
type Partial = (Option<Vec<BigRational>>, Option<Vec<BigRational>>);

/// A point and a functional `x -> weights[0] + sum weights[j] * x[j-1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttributeProfile {
    pub point: Vec<BigRational>,
    pub weights: Vec<BigRational>,
}

impl AttributeProfile {
    pub fn value_at(&self, x: &[BigRational]) -> BigRational {
        debug_assert_eq!(self.weights.len(), x.len() + 1);
        let mut total = self.weights[0].clone();
        for (w, xi) in self.weights[1..].iter().zip(x) {
            total += w * xi;
        }
        total
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AttributeProfiles {
    pub men: Vec<AttributeProfile>,
    pub women: Vec<AttributeProfile>,
}

fn fmt_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n.parse().ok()?, d))
}

impl AttributeProfiles {
    /// `point <name>: ...` and `weights <name>: ...` lines, each value as
    /// `num/den`, the constant term first among the weights.
    pub fn to_text(&self, inst: &Instance) -> String {
        let mut out = String::new();
        let sides = [(&self.men, inst.men_names()), (&self.women, inst.women_names())];
        for (profiles, names) in sides {
            for (p, name) in profiles.iter().zip(names) {
                let point: Vec<String> = p.point.iter().map(fmt_rational).collect();
                let weights: Vec<String> = p.weights.iter().map(fmt_rational).collect();
                out.push_str(&format!("point {name}: {}\n", point.join(" ")));
                out.push_str(&format!("weights {name}: {}\n", weights.join(" ")));
            }
        }
        out
    }

    /// Reads profiles written by [`AttributeProfiles::to_text`] for the agents
    /// of `inst`.
    pub fn parse(text: &str, inst: &Instance) -> Result<Self> {
        let mut men: Vec<Partial> = vec![(None, None); inst.n_men()];
        let mut women = vec![(None, None); inst.n_women()];
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |m: &str| Error::parse(i + 1, m);
            let (head, values) = line.split_once(':').ok_or_else(|| bad("missing ':'"))?;
            let (kind, name) = head.trim().split_once(' ').ok_or_else(|| bad("expected '<kind> <name>'"))?;
            let values = values
                .split_whitespace()
                .map(|v| parse_rational(v).ok_or_else(|| bad("bad rational")))
                .collect::<Result<Vec<_>>>()?;
            let name = name.trim();
            let slot = if let Some(m) = inst.men_names().iter().position(|n| n == name) {
                &mut men[m]
            } else if let Some(w) = inst.women_names().iter().position(|n| n == name) {
                &mut women[w]
            } else {
                return Err(bad(&format!("unknown agent {name}")));
            };
            match kind {
                "point" => slot.0 = Some(values),
                "weights" => slot.1 = Some(values),
                _ => return Err(bad("expected 'point' or 'weights'")),
            }
        }
        let finish = |side: Vec<Partial>| {
            side.into_iter()
                .map(|(p, w)| match (p, w) {
                    (Some(point), Some(weights)) => Ok(AttributeProfile { point, weights }),
                    _ => Err(Error::parse(0, "an agent lacks a point or weights")),
                })
                .collect::<Result<Vec<_>>>()
        };
        Ok(AttributeProfiles { men: finish(men)?, women: finish(women)? })
    }
}

fn rank_side(raters: &[AttributeProfile], targets: &[AttributeProfile], side: &str) -> Result<Vec<Vec<usize>>> {
    let dim = targets.first().map_or(0, |t| t.point.len());
    raters
        .iter()
        .enumerate()
        .map(|(a, rater)| {
            if rater.weights.len() != dim + 1 || targets.iter().any(|t| t.point.len() != dim) {
                return Err(Error::Inconsistent("profile dimensions disagree".into()));
            }
            let mut scored: Vec<(BigRational, usize)> =
                targets.iter().enumerate().map(|(b, t)| (rater.value_at(&t.point), b)).collect();
            scored.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));
            if let Some(pair) = scored.windows(2).find(|p| p[0].0 == p[1].0) {
                return Err(Error::Tie(format!(
                    "{side} {} values agents {} and {} equally",
                    a + 1,
                    pair[0].1 + 1,
                    pair[1].1 + 1
                )));
            }
            Ok(scored.into_iter().map(|(_, b)| b).collect())
        })
        .collect()
}

/// Complete instance in which each agent ranks the other side by descending
/// value of its functional.
pub fn evaluate_profiles(profiles: &AttributeProfiles) -> Result<Instance> {
    if profiles.men.len() != profiles.women.len() {
        return Err(Error::Inconsistent("profiles need equally many men and women".into()));
    }
    let men = rank_side(&profiles.men, &profiles.women, "man")?;
    let women = rank_side(&profiles.women, &profiles.men, "woman")?;
    Instance::new(men, women)
}

fn moment_point(i: usize) -> Vec<BigRational> {
    let base = BigInt::from(i);
    (1..=DIMENSION as u32).map(|e| BigRational::from_integer(base.pow(e))).collect()
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Weights whose functional is `-q(t)` on the moment curve, with
/// `q(t) = (t - i1)^2 (t - i2 + d2)^2 (t - i3 + d3)^2`, so the three given
/// indices come out on top in order.
fn top_three_weights(top: [usize; 3], n: usize) -> Vec<BigRational> {
    let n = BigInt::from(n);
    let d2 = BigRational::new(BigInt::one(), BigInt::from(4) * n.pow(4));
    let d3 = BigRational::new(BigInt::one(), BigInt::from(2) * n.pow(2));
    let roots = [
        BigRational::from_integer(BigInt::from(top[0])),
        BigRational::from_integer(BigInt::from(top[1])) - d2,
        BigRational::from_integer(BigInt::from(top[2])) - d3,
    ];
    let mut q = vec![BigRational::one()];
    for r in roots {
        let factor = [-r, BigRational::one()];
        q = poly_mul(&q, &factor);
        q = poly_mul(&q, &factor);
    }
    q.into_iter().map(|c| -c).collect()
}

/// Padded top three (1-based) of a list of 0-based indices; the smallest
/// absent indices fill any gap, possibly beyond the real agents.
fn top_three(list: &[usize]) -> [usize; 3] {
    let mut top: Vec<usize> = list.iter().take(3).map(|&x| x + 1).collect();
    let mut candidate = 1;
    while top.len() < 3 {
        if !top.contains(&candidate) {
            top.push(candidate);
        }
        candidate += 1;
    }
    [top[0], top[1], top[2]]
}

/// The three-bounded construction re-expressed with six attributes: the
/// three listed partners of each agent come first, in the same order, and
/// all others follow.
pub fn realize_attr6(h: &Dag) -> Result<(Instance, AttributeProfiles)> {
    let base = realize_bounded3(h)?;
    let n = base.n_men();
    let scale = n.max(3);
    let side = |lists: &[Vec<usize>]| -> Vec<AttributeProfile> {
        lists
            .iter()
            .enumerate()
            .map(|(i, l)| AttributeProfile {
                point: moment_point(i + 1),
                weights: top_three_weights(top_three(l), scale),
            })
            .collect()
    };
    let profiles = AttributeProfiles { men: side(base.men_lists()), women: side(base.women_lists()) };
    let inst = evaluate_profiles(&profiles)?.renamed(base.men_names().to_vec(), base.women_names().to_vec())?;
    Ok((inst, profiles))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::posets_up_to_isomorphism;
    use crate::realize::check_realization;

    fn int(x: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(x))
    }

    #[test]
    fn two_attribute_example() {
        let men: Vec<AttributeProfile> = [(2, 3), (3, 1), (1, 1), (4, 2)]
            .iter()
            .map(|&(x, y)| AttributeProfile { point: vec![int(x), int(y)], weights: vec![int(0), int(1), int(1)] })
            .collect();
        let profiles = AttributeProfiles { men: men.clone(), women: men };
        let inst = evaluate_profiles(&profiles).unwrap();
        assert_eq!(inst.woman_list(0), [3, 0, 1, 2]);
    }

    #[test]
    fn equal_weights_give_equal_lists() {
        let men: Vec<AttributeProfile> = (1..=3)
            .map(|i| AttributeProfile { point: vec![int(i), int(i * i)], weights: vec![int(0), int(2), int(-1)] })
            .collect();
        let inst = evaluate_profiles(&AttributeProfiles { men: men.clone(), women: men }).unwrap();
        assert_eq!(inst.man_list(0), inst.man_list(1));
        assert_eq!(inst.man_list(1), inst.man_list(2));
    }

    #[test]
    fn ties_are_rejected() {
        let flat: Vec<AttributeProfile> =
            (1..=2).map(|i| AttributeProfile { point: vec![int(i)], weights: vec![int(0), int(0)] }).collect();
        let err = evaluate_profiles(&AttributeProfiles { men: flat.clone(), women: flat }).unwrap_err();
        assert!(matches!(err, Error::Tie(_)));
    }

    #[test]
    fn weights_pick_the_top_three() {
        for n in 3..=12 {
            for top in [[1, 2, 3], [n, 1, 2], [n - 1, n, 1]] {
                let w = top_three_weights(top, n);
                let p = AttributeProfile { point: vec![], weights: w };
                let mut order: Vec<usize> = (1..=n).collect();
                order.sort_by_key(|&a| std::cmp::Reverse(p.value_at(&moment_point(a))));
                assert_eq!(&order[..3], &top);
            }
        }
    }

    #[test]
    fn top_three_padding() {
        assert_eq!(top_three(&[1, 0]), [2, 1, 3]);
        assert_eq!(top_three(&[2, 3]), [3, 4, 1]);
        assert_eq!(top_three(&[4, 0, 2]), [5, 1, 3]);
    }

    #[test]
    fn profiles_reproduce_short_lists() {
        for n in 0..=4 {
            for h in posets_up_to_isomorphism(n) {
                let base = realize_bounded3(&h).unwrap();
                let (inst, profiles) = realize_attr6(&h).unwrap();
                assert!(inst.is_complete());
                for m in 0..inst.n_men() {
                    let l = base.man_list(m);
                    assert_eq!(&inst.man_list(m)[..l.len()], l);
                }
                for w in 0..inst.n_women() {
                    let l = base.woman_list(w);
                    assert_eq!(&inst.woman_list(w)[..l.len()], l);
                }
                assert!(check_realization(&h, &inst).unwrap());
                let again = evaluate_profiles(&profiles).unwrap();
                assert_eq!(again.men_lists(), inst.men_lists());
                let text = profiles.to_text(&inst);
                assert_eq!(AttributeProfiles::parse(&text, &inst).unwrap(), profiles);
            }
        }
    }

    #[test]
    fn tiny_instances_rank_strictly() {
        let (inst, _) = realize_attr6(&Dag::new(1, &[]).unwrap()).unwrap();
        assert_eq!(inst.n_men(), 2);
        assert!(inst.is_complete());
    }
}
