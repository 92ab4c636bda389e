//! GIT of binary forms of degree `2g+2` through their root multiplicities.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::curve::SingularityType;
use crate::error::{Error, Result};

/// Root multiplicities of a binary form of degree `2g+2`, largest first.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawProfile", into = "RawProfile")]
pub struct MultiplicityProfile {
    g: u32,
    parts: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProfile {
    g: u32,
    parts: Vec<u32>,
}

impl TryFrom<RawProfile> for MultiplicityProfile {
    type Error = Error;

    fn try_from(raw: RawProfile) -> Result<Self> {
        MultiplicityProfile::new(raw.g, raw.parts)
    }
}

impl From<MultiplicityProfile> for RawProfile {
    fn from(p: MultiplicityProfile) -> Self {
        RawProfile {
            g: p.g,
            parts: p.parts,
        }
    }
}

impl MultiplicityProfile {
    pub fn new(g: u32, mut parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(Error::Profile("parts must be positive and nonempty".into()));
        }
        let sum: u32 = parts.iter().sum();
        if sum != 2 * g + 2 {
            return Err(Error::Profile(format!(
                "parts sum to {sum}, expected {}",
                2 * g + 2
            )));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(MultiplicityProfile { g, parts })
    }

    pub fn g(&self) -> u32 {
        self.g
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn max_part(&self) -> u32 {
        self.parts[0]
    }

    pub fn is_semistable(&self) -> bool {
        self.max_part() <= self.g + 1
    }

    pub fn is_stable(&self) -> bool {
        self.max_part() <= self.g
    }

    /// Profiles obtained by splitting one part into two.
    pub fn splits(&self) -> Vec<MultiplicityProfile> {
        let mut out = BTreeSet::new();
        for (i, &m) in self.parts.iter().enumerate() {
            for a in 1..=m / 2 {
                let mut parts = self.parts.clone();
                parts.remove(i);
                parts.push(a);
                parts.push(m - a);
                out.insert(MultiplicityProfile::new(self.g, parts).expect("same sum"));
            }
        }
        out.into_iter().collect()
    }

    /// Whether `self` is obtained from `other` by merging parts, so that
    /// `self` lies in the closure of `other`'s stratum.
    pub fn coarsens(&self, other: &MultiplicityProfile) -> bool {
        if self.g != other.g {
            return false;
        }
        // assign the parts of `other` to the bins given by `self`
        fn fill(bins: &mut [u32], items: &[u32]) -> bool {
            let Some((&first, rest)) = items.split_first() else {
                return bins.iter().all(|&b| b == 0);
            };
            let mut tried = BTreeSet::new();
            for i in 0..bins.len() {
                if bins[i] >= first && tried.insert(bins[i]) {
                    bins[i] -= first;
                    let ok = fill(bins, rest);
                    bins[i] += first;
                    if ok {
                        return true;
                    }
                }
            }
            false
        }
        let mut bins = self.parts.clone();
        fill(&mut bins, &other.parts)
    }
}

impl fmt::Display for MultiplicityProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(u32::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// All partitions of `2g+2`, largest parts first, in decreasing lexicographic order.
pub fn all_profiles(g: u32) -> Vec<MultiplicityProfile> {
    fn rec(left: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for p in (1..=max.min(left)).rev() {
            cur.push(p);
            rec(left - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(2 * g + 2, 2 * g + 2, &mut Vec::new(), &mut out);
    out.into_iter()
        .map(|parts| MultiplicityProfile { g, parts })
        .collect()
}

/// The profiles of fixed genus under the coarsening order.
#[derive(Clone, Debug)]
pub struct ProfilePoset {
    pub g: u32,
    pub profiles: Vec<MultiplicityProfile>,
}

impl ProfilePoset {
    pub fn new(g: u32) -> Self {
        ProfilePoset {
            g,
            profiles: all_profiles(g),
        }
    }

    /// `profiles[i] <= profiles[j]`: `i` is a specialization of `j`.
    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.profiles[i].coarsens(&self.profiles[j])
    }

    /// Profiles with every root multiplicity at most `max_mult`.
    pub fn bounded(&self, max_mult: u32) -> BTreeSet<MultiplicityProfile> {
        self.profiles
            .iter()
            .filter(|p| p.max_part() <= max_mult)
            .cloned()
            .collect()
    }
}

pub fn is_upward_closed(set: &BTreeSet<MultiplicityProfile>) -> bool {
    set.iter()
        .all(|p| p.splits().iter().all(|q| set.contains(q)))
}

/// Singularities of the double cover branched along a form with this
/// profile: a root of multiplicity `m >= 2` gives `A_{m-1}`.
pub fn singularity_profile(profile: &MultiplicityProfile) -> Result<Vec<SingularityType>> {
    if profile.max_part() == 2 * profile.g + 2 {
        return Err(Error::Profile(
            "non-reduced form: the cover is not reduced".into(),
        ));
    }
    profile
        .parts
        .iter()
        .filter(|&&m| m >= 2)
        .map(|&m| SingularityType::new(m - 1))
        .collect()
}

/// Whether the open set of forms with the given profiles admits a good
/// moduli space.
pub fn admits_gms(open: &BTreeSet<MultiplicityProfile>, g: u32) -> Result<bool> {
    if let Some(p) = open.iter().find(|p| p.g != g) {
        return Err(Error::Profile(format!(
            "profile {p} has genus {} not {g}",
            p.g
        )));
    }
    if open.iter().any(|p| p.max_part() == 2 * g + 2) {
        return Err(Error::Profile(
            "the non-reduced profile cannot lie in an open set".into(),
        ));
    }
    if !is_upward_closed(open) {
        return Err(Error::Profile("profile set is not upward-closed".into()));
    }
    let max = open
        .iter()
        .map(MultiplicityProfile::max_part)
        .max()
        .unwrap_or(0);
    if max <= g {
        return Ok(true);
    }
    if max > g + 1 {
        return Ok(false);
    }
    Ok(all_profiles(g)
        .iter()
        .filter(|p| p.max_part() == g + 1)
        .all(|p| open.contains(p)))
}

/// Sizes of the two opposite-sign weight blocks of the deformation space at
/// the form with two roots of multiplicities `h` and `2g+2-h`.
pub fn fh_weight_split(g: u32, h: u32) -> Result<(u32, u32)> {
    if h == 0 || h > g + 1 {
        return Err(Error::InvalidArgument(format!(
            "h = {h} outside 1..={}",
            g + 1
        )));
    }
    Ok((h - 1, 2 * g + 1 - h))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HyperellipticKind {
    Weierstrass,
    G12,
}

/// Dimension of the affine space whose torus quotient describes pointed
/// hyperelliptic curves of genus `g` of the given kind.
pub fn hyperelliptic_stack_dims(g: u32, kind: HyperellipticKind) -> Result<u32> {
    if g == 0 {
        return Err(Error::InvalidArgument("genus must be positive".into()));
    }
    Ok(match kind {
        HyperellipticKind::Weierstrass => 2 * g - 1,
        HyperellipticKind::G12 => 2 * g + 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(g: u32, parts: &[u32]) -> MultiplicityProfile {
        MultiplicityProfile::new(g, parts.to_vec()).unwrap()
    }

    #[test]
    fn stability_examples() {
        assert!(p(2, &[1; 6]).is_stable());
        assert!(p(2, &[3, 3]).is_semistable() && !p(2, &[3, 3]).is_stable());
        assert!(!p(2, &[4, 2]).is_semistable());
        assert!(MultiplicityProfile::new(2, vec![4, 1]).is_err());
    }

    #[test]
    fn singularity_examples() {
        let ks = |pr: &MultiplicityProfile| -> Vec<u32> {
            singularity_profile(pr)
                .unwrap()
                .iter()
                .map(|t| t.k())
                .collect()
        };
        assert_eq!(ks(&p(2, &[5, 1])), vec![4]);
        assert_eq!(ks(&p(2, &[3, 3])), vec![2, 2]);
        assert!(ks(&p(2, &[1; 6])).is_empty());
        assert!(singularity_profile(&p(2, &[6])).is_err());
    }

    #[test]
    fn gms_examples() {
        let poset = ProfilePoset::new(2);
        assert_eq!(poset.profiles.len(), 11);
        assert!(!admits_gms(&poset.bounded(4), 2).unwrap());
        assert!(admits_gms(&poset.bounded(3), 2).unwrap());
        let mut u = poset.bounded(3);
        u.remove(&p(2, &[3, 3]));
        assert!(!admits_gms(&u, 2).unwrap());
        let mut bad = poset.bounded(2);
        bad.remove(&p(2, &[1; 6]));
        assert!(admits_gms(&bad, 2).is_err());
    }

    #[test]
    fn order_extremes() {
        let poset = ProfilePoset::new(2);
        let top = poset
            .profiles
            .iter()
            .position(|x| x.parts() == [1; 6])
            .unwrap();
        let bottom = poset
            .profiles
            .iter()
            .position(|x| x.parts() == [6])
            .unwrap();
        for i in 0..poset.profiles.len() {
            assert!(poset.leq(bottom, i));
            assert!(poset.leq(i, top));
        }
        assert!(!poset.leq(top, bottom));
    }

    #[test]
    fn weight_split() {
        assert_eq!(fh_weight_split(2, 3).unwrap(), (2, 2));
        assert_eq!(fh_weight_split(2, 2).unwrap(), (1, 3));
        assert_eq!(fh_weight_split(4, 1).unwrap(), (0, 8));
        assert!(fh_weight_split(2, 4).is_err());
        assert_eq!(
            hyperelliptic_stack_dims(2, HyperellipticKind::G12).unwrap(),
            5
        );
    }
}
