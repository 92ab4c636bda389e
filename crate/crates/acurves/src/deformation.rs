//! Weight decomposition of the deformation space at a curve and the
//! combinatorics of which singularities a one-parameter subgroup can smooth.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::aut::{self, WeightAssignment};
use crate::curve::Curve;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "singularity", rename_all = "snake_case")]
pub enum SummandKind {
    SingDeform(String),
    Crimp(String),
    NormalizationPart,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(x: i64) -> Sign {
        match x.signum() {
            -1 => Sign::Negative,
            0 => Sign::Zero,
            _ => Sign::Positive,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeformationSummand {
    #[serde(flatten)]
    pub kind: SummandKind,
    pub dim: u32,
    pub sign: Sign,
}

/// Splits the deformation space of a stable curve into one summand per node,
/// a deformation and a crimping summand per worse singularity, and the
/// deformations of the pointed normalization. Crimping dimensions are net of
/// the automorphisms of the unstable rational components next to the
/// singularity, so the dimensions add up to `3g - 3 + n + dim Aut`.
pub fn tangent_decomposition(
    curve: &Curve,
    r: u32,
    assignment: &WeightAssignment,
) -> Result<Vec<DeformationSummand>> {
    let layout = aut::stable_layout(curve, r)?;
    let sol = aut::solve(curve, &layout);
    check_assignment(curve, &layout, &sol, assignment)?;
    let unipotent = aut::has_unipotent(curve, &layout, r);
    let weight = |s: usize, b: usize| {
        let bp = &curve.singularities[s].branches[b];
        assignment.weight(&bp.component, &bp.point)
    };
    let mut out = Vec::new();
    let mut used: i64 = 0;
    for (s, sing) in curve.singularities.iter().enumerate() {
        let k = sing.k;
        let tangent = if k.is_node() {
            weight(s, 0) + weight(s, 1)
        } else {
            weight(s, 0)
        };
        let sign = Sign::of(tangent);
        out.push(DeformationSummand {
            kind: SummandKind::SingDeform(sing.id.clone()),
            dim: k.k(),
            sign: sign.flip(),
        });
        used += i64::from(k.k());
        if k.is_node() {
            continue;
        }
        let raw = if k.is_even() {
            k.severity() - 1
        } else {
            k.severity()
        };
        let lonely_ends = layout.branch_comp[s]
            .iter()
            .filter(|&&c| curve.components[c].genus == 0 && layout.points[c].len() == 1)
            .count() as u32;
        let kept = u32::from(unipotent && k.k() == 2 * curve.genus_unchecked() + 1);
        let absorbed = lonely_ends + sol.losses[s] - kept.min(lonely_ends + sol.losses[s]);
        let dim = raw.checked_sub(absorbed).ok_or_else(|| {
            Error::BadAssignment(format!(
                "crimping space at `{}` is smaller than the automorphisms it must absorb",
                sing.id
            ))
        })?;
        out.push(DeformationSummand {
            kind: SummandKind::Crimp(sing.id.clone()),
            dim,
            sign,
        });
        used += i64::from(dim);
    }
    let g = i64::from(curve.genus_unchecked());
    let n = curve.markings.len() as i64;
    let aut_dim = sol.classes as i64 + i64::from(unipotent);
    let rest = 3 * g - 3 + n + aut_dim - used;
    if rest < 0 {
        return Err(Error::BadAssignment("negative residual".into()));
    }
    out.push(DeformationSummand {
        kind: SummandKind::NormalizationPart,
        dim: rest as u32,
        sign: Sign::Zero,
    });
    Ok(out)
}

/// Rejects assignments that are not in the weight lattice of the torus.
fn check_assignment(
    curve: &Curve,
    layout: &crate::curve::Layout,
    sol: &aut::Solution,
    assignment: &WeightAssignment,
) -> Result<()> {
    let mut class_value: Vec<Option<i64>> = vec![None; sol.classes];
    for w in &assignment.weights {
        let c = *layout
            .comp_of
            .get(&w.component)
            .ok_or_else(|| Error::BadAssignment(format!("unknown component `{}`", w.component)))?;
        let p = layout.points[c]
            .iter()
            .position(|p| p.id == w.point)
            .ok_or_else(|| Error::BadAssignment(format!("unknown point `{}`", w.point)))?;
        if w.weight == 0 {
            continue;
        }
        match sol.slot_class[c][p] {
            None => {
                return Err(Error::BadAssignment(format!(
                    "slot `{}`/`{}` is fixed by every automorphism",
                    w.component, w.point
                )))
            }
            Some((k, s)) => {
                let v = s * w.weight;
                if class_value[k].is_some_and(|old| old != v) {
                    return Err(Error::BadAssignment("inconsistent weights".into()));
                }
                class_value[k] = Some(v);
            }
        }
    }
    // every slot of a class must carry the class value
    for (c, row) in sol.slot_class.iter().enumerate() {
        for (p, entry) in row.iter().enumerate() {
            if let Some((k, s)) = *entry {
                let bp = &layout.points[c][p];
                let got = assignment.weight(&curve.components[c].id, &bp.id);
                if got != s * class_value[k].unwrap_or(0) {
                    return Err(Error::BadAssignment("inconsistent weights".into()));
                }
            }
        }
    }
    Ok(())
}

/// Nonempty sets of worse-than-node singularities that some one-parameter
/// subgroup deforms with positive weight while fixing every other
/// singularity's deformation direction as non-positive. Sorted.
pub fn feasible_deformation_sets(curve: &Curve, r: u32) -> Result<Vec<BTreeSet<String>>> {
    const LIMIT: usize = 1 << 16;
    let layout = aut::stable_layout(curve, r)?;
    let sol = aut::solve(curve, &layout);
    // per class: singularities whose deformation weight is positive for a
    // positive (resp. negative) class coefficient
    let mut plus: Vec<Vec<String>> = vec![Vec::new(); sol.classes];
    let mut minus: Vec<Vec<String>> = vec![Vec::new(); sol.classes];
    for (s, sing) in curve.singularities.iter().enumerate() {
        if sing.k.k() < 2 {
            continue;
        }
        if let Some((k, sign)) = aut::tangent_class(&layout, &sol, s) {
            // deformation weight is minus the tangent weight
            if sign < 0 {
                plus[k].push(sing.id.clone());
            } else {
                minus[k].push(sing.id.clone());
            }
        }
    }
    let mut per_class: Vec<Vec<Vec<String>>> = Vec::new();
    for k in 0..sol.classes {
        let mut options = subsets(&plus[k]);
        for set in subsets(&minus[k]) {
            if !set.is_empty() {
                options.push(set);
            }
        }
        per_class.push(options);
    }
    let total: usize = per_class
        .iter()
        .map(Vec::len)
        .try_fold(1usize, |a, b| a.checked_mul(b))
        .unwrap_or(usize::MAX);
    if total > LIMIT {
        return Err(Error::ResourceBound(format!("{total} deformation sets")));
    }
    let mut out: Vec<BTreeSet<String>> = vec![BTreeSet::new()];
    for options in per_class {
        let mut next = Vec::with_capacity(out.len() * options.len());
        for base in &out {
            for opt in &options {
                let mut s = base.clone();
                s.extend(opt.iter().cloned());
                next.push(s);
            }
        }
        out = next;
    }
    out.retain(|s| !s.is_empty());
    out.sort();
    out.dedup();
    Ok(out)
}

fn subsets(items: &[String]) -> Vec<Vec<String>> {
    (0..1usize << items.len())
        .map(|mask| {
            items
                .iter()
                .enumerate()
                .filter(|&(i, _)| mask >> i & 1 == 1)
                .map(|(_, s)| s.clone())
                .collect()
        })
        .collect()
}

/// A finite model of a torus representation: the weight of each basis
/// vector and the coordinate subsets spanning closed orbits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepresentationModel {
    pub weights: Vec<i64>,
    /// Each entry lists coordinate indices (0-based) spanning a subspace whose
    /// nonzero points have closed orbits.
    pub closed: Vec<Vec<usize>>,
}

impl RepresentationModel {
    pub fn new(weights: Vec<i64>, closed: Vec<Vec<usize>>) -> Result<Self> {
        let model = RepresentationModel { weights, closed };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.weights.len();
        for z in &self.closed {
            if let Some(&bad) = z.iter().find(|&&i| i >= n) {
                return Err(Error::InvalidArgument(format!(
                    "index {bad} out of range for {n} weights"
                )));
            }
        }
        Ok(())
    }

    /// Whether the span of `coords` lies in the closed set; the origin always does.
    fn contains_span(&self, coords: &[usize]) -> bool {
        coords.is_empty()
            || self
                .closed
                .iter()
                .any(|z| coords.iter().all(|i| z.contains(i)))
    }

    fn coords_with(&self, sign: Sign) -> Vec<usize> {
        (0..self.weights.len())
            .filter(|&i| self.weight_sign(i) == sign)
            .collect()
    }

    pub fn weight_sign(&self, i: usize) -> Sign {
        Sign::of(self.weights[i])
    }
}

/// The closed set contains neither the positive-weight nor the zero-weight subspace.
pub fn theta_feasible(model: &RepresentationModel) -> Result<bool> {
    model.validate()?;
    Ok(!model.contains_span(&model.coords_with(Sign::Positive))
        && !model.contains_span(&model.coords_with(Sign::Zero)))
}

/// The closed set contains neither the positive- nor the negative-weight subspace.
pub fn s_feasible(model: &RepresentationModel) -> Result<bool> {
    model.validate()?;
    Ok(!model.contains_span(&model.coords_with(Sign::Positive))
        && !model.contains_span(&model.coords_with(Sign::Negative)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn dims(curve: &Curve, r: u32, a: &WeightAssignment) -> Vec<(SummandKind, u32, Sign)> {
        tangent_decomposition(curve, r, a)
            .unwrap()
            .into_iter()
            .map(|d| (d.kind, d.dim, d.sign))
            .collect()
    }

    #[test]
    fn smooth_curve_has_one_summand() {
        let c = catalog::smooth(3, 1, false);
        let d = dims(&c, 2, &WeightAssignment::default());
        assert_eq!(d, vec![(SummandKind::NormalizationPart, 7, Sign::Zero)]);
    }

    #[test]
    fn atoms_balance() {
        for h in 1..5 {
            for (c, r) in [
                (catalog::even_atom(h, false), 2 * h),
                (catalog::even_atom(h, true), 2 * h),
                (catalog::odd_atom(h, 0), 2 * h + 1),
                (catalog::odd_atom(h, 1), 2 * h + 1),
                (catalog::odd_atom(h, 2), 2 * h + 1),
            ] {
                if !c.is_stable(r).unwrap() {
                    continue;
                }
                let a = aut::aut_identity_component(&c, r).unwrap();
                let d = tangent_decomposition(&c, r, &a.basis[0]).unwrap();
                let total: u32 = d.iter().map(|x| x.dim).sum();
                let g = curve_genus(&c);
                assert_eq!(
                    total as i64,
                    3 * g - 3 + c.markings.len() as i64 + a.dimension() as i64
                );
                assert_eq!(d.last().unwrap().dim, 0);
            }
        }
    }

    fn curve_genus(c: &Curve) -> i64 {
        c.arithmetic_genus().unwrap() as i64
    }

    #[test]
    fn rosary_sets() {
        let r = catalog::rosary(&[1, 1]);
        let sets = feasible_deformation_sets(&r, 3).unwrap();
        assert_eq!(sets.len(), 2);
        assert!(sets.iter().all(|s| s.len() == 1));
        let atom = catalog::odd_atom(2, 0);
        assert_eq!(feasible_deformation_sets(&atom, 5).unwrap().len(), 1);
    }

    #[test]
    fn rejects_off_lattice_assignments() {
        let c = catalog::even_atom(1, true);
        let bad = WeightAssignment {
            weights: vec![aut::SlotWeight {
                component: "c0".into(),
                point: "p0".into(),
                weight: 1,
            }],
        };
        // p0 is the cusp, p1 the marking: both must move together
        assert!(tangent_decomposition(&c, 2, &bad).is_err());
    }

    #[test]
    fn theta_and_s() {
        let m = RepresentationModel::new(vec![1, -1, 0], vec![vec![0, 1]]).unwrap();
        assert!(!theta_feasible(&m).unwrap());
        assert!(!s_feasible(&m).unwrap());
        let m = RepresentationModel::new(vec![1, -1, 0], vec![vec![1]]).unwrap();
        assert!(theta_feasible(&m).unwrap());
        assert!(!s_feasible(&m).unwrap());
        assert!(RepresentationModel::new(vec![1], vec![vec![3]]).is_err());
    }
}
