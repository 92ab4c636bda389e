//! Identity components of automorphism groups: torus rank, unipotent part
//! and a basis of one-parameter weight assignments.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::curve::{Curve, Layout, PointKind};
use crate::error::{Error, Result};
use crate::patterns::{self, PatternHit, PatternKind};

/// Weight of a one-parameter subgroup on the tangent line at a special
/// point of the normalization. On a rational component with two special
/// points the weights are opposite: the point listed first (by point id)
/// gets `+w`, the other `-w`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlotWeight {
    pub component: String,
    pub point: String,
    pub weight: i64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightAssignment {
    /// Sorted by component then point; slots not listed have weight 0.
    pub weights: Vec<SlotWeight>,
}

impl WeightAssignment {
    pub fn weight(&self, component: &str, point: &str) -> i64 {
        self.weights
            .binary_search_by(|w| (w.component.as_str(), w.point.as_str()).cmp(&(component, point)))
            .map(|i| self.weights[i].weight)
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.weights.iter().all(|w| w.weight == 0)
    }

    /// Integer combination of basis elements.
    pub fn combine(basis: &[WeightAssignment], coeffs: &[i64]) -> WeightAssignment {
        let mut acc: std::collections::BTreeMap<(String, String), i64> = Default::default();
        for (a, &c) in basis.iter().zip(coeffs) {
            for w in &a.weights {
                *acc.entry((w.component.clone(), w.point.clone()))
                    .or_default() += c * w.weight;
            }
        }
        WeightAssignment {
            weights: acc
                .into_iter()
                .filter(|&(_, w)| w != 0)
                .map(|((component, point), weight)| SlotWeight {
                    component,
                    point,
                    weight,
                })
                .collect(),
        }
    }

    fn push(&mut self, component: &str, point: &str, weight: i64) {
        self.weights.push(SlotWeight {
            component: component.to_string(),
            point: point.to_string(),
            weight,
        });
    }

    fn sort(&mut self) {
        self.weights.sort();
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutDescriptor {
    pub torus_rank: u32,
    pub unipotent: bool,
    pub basis: Vec<WeightAssignment>,
}

impl AutDescriptor {
    pub fn dimension(&self) -> u32 {
        self.torus_rank + u32::from(self.unipotent)
    }

    pub fn is_trivial(&self) -> bool {
        self.dimension() == 0
    }
}

impl fmt::Display for AutDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.torus_rank, self.unipotent) {
            (0, false) => f.write_str("trivial"),
            (0, true) => f.write_str("Ga"),
            (1, false) => f.write_str("Gm"),
            (1, true) => f.write_str("Gm x| Ga"),
            (t, false) => write!(f, "Gm^{t}"),
            (t, true) => write!(f, "Gm^{t} x| Ga"),
        }
    }
}

/// Signed union-find: `value(x) = sign(x) * value(root(x))`, and a root may
/// be forced to zero.
struct SignedDsu {
    parent: Vec<usize>,
    sign: Vec<i64>,
    zero: Vec<bool>,
}

impl SignedDsu {
    fn new(n: usize) -> Self {
        SignedDsu {
            parent: (0..n).collect(),
            sign: vec![1; n],
            zero: vec![false; n],
        }
    }

    fn find(&mut self, x: usize) -> (usize, i64) {
        if self.parent[x] == x {
            return (x, 1);
        }
        let (root, s) = self.find(self.parent[x]);
        self.parent[x] = root;
        self.sign[x] *= s;
        (root, self.sign[x])
    }

    fn free_classes(&mut self) -> usize {
        (0..self.parent.len())
            .filter(|&x| self.find(x).0 == x && !self.zero[x])
            .count()
    }

    fn kill(&mut self, x: usize) {
        let (r, _) = self.find(x);
        self.zero[r] = true;
    }

    /// Imposes `value(a) = rel * value(b)`.
    fn relate(&mut self, a: usize, b: usize, rel: i64) {
        let (ra, sa) = self.find(a);
        let (rb, sb) = self.find(b);
        if ra == rb {
            if sa != rel * sb {
                self.zero[ra] = true;
            }
            return;
        }
        let (keep, drop) = (ra.min(rb), ra.max(rb));
        // value(drop) in terms of value(keep)
        let s = if drop == ra {
            sa * rel * sb
        } else {
            sb * rel * sa
        };
        self.parent[drop] = keep;
        self.sign[drop] = s;
        self.zero[keep] |= self.zero[drop];
    }
}

/// Output of the weight solver shared with the deformation module.
pub(crate) struct Solution {
    /// Per component, per point (in layout order): surviving class and sign.
    pub slot_class: Vec<Vec<Option<(usize, i64)>>>,
    pub classes: usize,
    /// Torus factors lost to each singularity's constraint.
    pub losses: Vec<u32>,
}

pub(crate) fn solve(curve: &Curve, layout: &Layout) -> Solution {
    let mut var_of = vec![None; layout.n_components()];
    let mut nvars = 0;
    for (c, comp) in curve.components.iter().enumerate() {
        if comp.genus == 0 && (1..=2).contains(&layout.points[c].len()) {
            var_of[c] = Some(nvars);
            nvars += 1;
        }
    }
    let slot = |c: usize, point: &str| -> Option<(usize, i64)> {
        let v = var_of[c]?;
        let first = layout.points[c][0].id == point;
        Some((v, if first { 1 } else { -1 }))
    };
    let mut dsu = SignedDsu::new(nvars);
    let mut losses = vec![0u32; curve.singularities.len()];
    for (s, sing) in curve.singularities.iter().enumerate() {
        if sing.k.is_node() {
            continue;
        }
        let before = dsu.free_classes();
        let slots: Vec<Option<(usize, i64)>> = sing
            .branches
            .iter()
            .zip(&layout.branch_comp[s])
            .map(|(bp, &c)| slot(c, &bp.point))
            .collect();
        if sing.equivariant && !sing.k.is_even() {
            match (slots[0], slots[1]) {
                (Some((a, sa)), Some((b, sb))) => dsu.relate(a, b, sa * sb),
                (Some((a, _)), None) | (None, Some((a, _))) => dsu.kill(a),
                (None, None) => {}
            }
        } else if !sing.equivariant {
            for (v, _) in slots.into_iter().flatten() {
                dsu.kill(v);
            }
        }
        losses[s] = (before - dsu.free_classes()) as u32;
    }
    let mut class_of_root = std::collections::BTreeMap::new();
    for v in 0..nvars {
        let (r, _) = dsu.find(v);
        if !dsu.zero[r] && !class_of_root.contains_key(&r) {
            let next = class_of_root.len();
            class_of_root.insert(r, next);
        }
    }
    let mut slot_class = Vec::with_capacity(layout.n_components());
    for c in 0..layout.n_components() {
        let row = layout.points[c]
            .iter()
            .map(|p| {
                let (v, s0) = slot(c, &p.id)?;
                let (r, s1) = dsu.find(v);
                class_of_root.get(&r).map(|&k| (k, s0 * s1))
            })
            .collect();
        slot_class.push(row);
    }
    Solution {
        slot_class,
        classes: class_of_root.len(),
        losses,
    }
}

pub(crate) fn basis_of(curve: &Curve, layout: &Layout, sol: &Solution) -> Vec<WeightAssignment> {
    let mut basis = vec![WeightAssignment::default(); sol.classes];
    for (c, row) in sol.slot_class.iter().enumerate() {
        for (p, entry) in row.iter().enumerate() {
            if let Some((k, s)) = *entry {
                basis[k].push(&curve.components[c].id, &layout.points[c][p].id, s);
            }
        }
    }
    for b in &mut basis {
        b.sort();
    }
    basis
}

/// Whether the unipotent radical is nontrivial: the unpointed curve made of
/// two rational components glued along one separating `A_{2g+1}`.
pub(crate) fn has_unipotent(curve: &Curve, layout: &Layout, r: u32) -> bool {
    let g = curve.genus_unchecked();
    if !curve.markings.is_empty() || r < 2 * g + 1 {
        return false;
    }
    curve.singularities.iter().enumerate().any(|(s, sing)| {
        sing.k.k() == 2 * g + 1
            && patterns::classify(curve, layout, s).is_separating()
            && layout.branch_comp[s]
                .iter()
                .all(|&c| curve.components[c].genus == 0)
    })
}

pub(crate) fn stable_layout(curve: &Curve, r: u32) -> Result<Layout> {
    let layout = curve.checked()?;
    if !curve.is_prestable(r)? {
        return Err(Error::NotPrestable(r));
    }
    if !curve.all_degrees_positive(&layout) {
        return Err(Error::NotStable(r));
    }
    Ok(layout)
}

pub fn aut_identity_component(curve: &Curve, r: u32) -> Result<AutDescriptor> {
    let layout = stable_layout(curve, r)?;
    let sol = solve(curve, &layout);
    Ok(AutDescriptor {
        torus_rank: sol.classes as u32,
        unipotent: has_unipotent(curve, &layout, r),
        basis: basis_of(curve, &layout, &sol),
    })
}

/// Singularities of type `A_{k}`, `k >= 2`, whose tangent weight is nonzero
/// for some element of the torus.
pub fn hyperelliptic_singularities(curve: &Curve, r: u32) -> Result<BTreeSet<String>> {
    let layout = stable_layout(curve, r)?;
    let sol = solve(curve, &layout);
    Ok(moving_singularities(curve, &layout, &sol))
}

pub(crate) fn moving_singularities(
    curve: &Curve,
    layout: &Layout,
    sol: &Solution,
) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for (s, sing) in curve.singularities.iter().enumerate() {
        if sing.k.k() >= 2 && tangent_class(layout, sol, s).is_some() {
            out.insert(sing.id.clone());
        }
    }
    out
}

/// Class and sign governing the tangent weight of a non-node singularity.
pub(crate) fn tangent_class(layout: &Layout, sol: &Solution, s: usize) -> Option<(usize, i64)> {
    let c = layout.branch_comp[s][0];
    let idx = layout.points[c]
        .iter()
        .position(|p| p.kind == PointKind::Branch { sing: s, branch: 0 })
        .expect("branch recorded in layout");
    sol.slot_class[c][idx]
}

/// Rosaries on which some torus element acts with nonzero weights.
pub fn gm_rosaries(curve: &Curve, r: u32) -> Result<Vec<PatternHit>> {
    let layout = stable_layout(curve, r)?;
    let sol = solve(curve, &layout);
    let mut out = Vec::new();
    for hit in patterns::rosaries(curve, &layout) {
        let links = match &hit.kind {
            PatternKind::Rosary { singularities, .. }
            | PatternKind::ClosedRosary { singularities, .. } => singularities,
            _ => continue,
        };
        let moving = links.iter().all(|id| {
            let s = curve.sing_index(id).expect("hit refers to the curve");
            tangent_class(&layout, &sol, s).is_some()
        });
        if moving && !links.is_empty() {
            out.push(hit);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn atoms_and_rosaries() {
        for h in 2..5 {
            let a = aut_identity_component(&catalog::even_atom(h, false), 2 * h).unwrap();
            assert_eq!((a.torus_rank, a.unipotent), (1, false));
            let a = aut_identity_component(&catalog::odd_atom(h, 0), 2 * h + 1).unwrap();
            assert_eq!((a.torus_rank, a.unipotent), (1, true));
            let a = aut_identity_component(&catalog::odd_atom(h, 0), 2 * h + 2).unwrap();
            assert_eq!(a.to_string(), "Gm x| Ga");
            let a = aut_identity_component(&catalog::odd_atom(h, 2), 2 * h + 1).unwrap();
            assert_eq!((a.torus_rank, a.unipotent), (1, false));
        }
        let r = catalog::rosary(&[1, 1]);
        let a = aut_identity_component(&r, 3).unwrap();
        assert_eq!(a.torus_rank, 1);
        assert_eq!(hyperelliptic_singularities(&r, 3).unwrap().len(), 2);
        assert_eq!(gm_rosaries(&r, 3).unwrap().len(), 1);
    }

    #[test]
    fn smooth_and_broken() {
        let a = aut_identity_component(&catalog::smooth(2, 0, false), 2).unwrap();
        assert!(a.is_trivial());
        let mut atom = catalog::odd_atom(2, 0);
        atom.singularities[0].equivariant = false;
        let a = aut_identity_component(&atom, 5).unwrap();
        assert_eq!(a.to_string(), "Ga");
        assert_eq!(
            aut_identity_component(&catalog::smooth(1, 0, false), 2),
            Err(Error::NotStable(2))
        );
        assert_eq!(
            aut_identity_component(&catalog::even_atom(2, false), 3),
            Err(Error::NotPrestable(3))
        );
    }

    #[test]
    fn basis_signs_on_a_rosary() {
        let r = catalog::rosary(&[1, 2, 1]);
        let desc = aut_identity_component(&r, 5).unwrap();
        assert_eq!(desc.torus_rank, 1);
        let w = &desc.basis[0];
        for s in &r.singularities {
            let a = w.weight(&s.branches[0].component, &s.branches[0].point);
            let b = w.weight(&s.branches[1].component, &s.branches[1].point);
            assert_eq!(a, b);
            assert_ne!(a, 0);
        }
    }
}
