//! Recognizers for atoms, rosaries, hyperelliptic tails, bridges and chains.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::curve::{Curve, Layout, PointKind, Role};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SingClass {
    Inner,
    Outer,
    Lonely,
    Separating,
}

impl SingClass {
    pub fn is_outer(self) -> bool {
        self != SingClass::Inner
    }

    pub fn is_lonely(self) -> bool {
        matches!(self, SingClass::Lonely | SingClass::Separating)
    }

    pub fn is_separating(self) -> bool {
        self == SingClass::Separating
    }
}

impl fmt::Display for SingClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SingClass::Inner => "inner",
            SingClass::Outer => "outer",
            SingClass::Lonely => "lonely",
            SingClass::Separating => "separating",
        };
        f.write_str(s)
    }
}

/// Strongest of inner, outer, lonely, separating that applies.
pub fn classify_singularity(curve: &Curve, id: &str) -> Result<SingClass> {
    let layout = curve.checked()?;
    let s = curve.sing_index(id)?;
    Ok(classify(curve, &layout, s))
}

pub(crate) fn classify(curve: &Curve, layout: &Layout, s: usize) -> SingClass {
    let comps = &layout.branch_comp[s];
    if comps.len() != 2 || comps[0] == comps[1] {
        return SingClass::Inner;
    }
    let (a, b) = (comps[0].min(comps[1]), comps[0].max(comps[1]));
    let parallel = layout
        .branch_comp
        .iter()
        .enumerate()
        .any(|(t, c)| t != s && c.len() == 2 && c[0].min(c[1]) == a && c[0].max(c[1]) == b);
    if parallel {
        return SingClass::Outer;
    }
    if layout.pieces(curve, |t| t != s).len() > 1 {
        SingClass::Separating
    } else {
        SingClass::Lonely
    }
}

/// A connected set of components with its attaching singularities and
/// markings. Components are listed in pattern order (chain order for
/// rosaries and chains).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subcurve {
    pub components: Vec<String>,
    /// Singularities joining the subcurve to its complement.
    pub boundary: Vec<String>,
    pub markings: Vec<u32>,
}

/// How an end of a pattern meets the rest of the curve.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Attachment {
    Marking { index: u32 },
    Singularity { id: String, k: u32 },
}

impl Attachment {
    /// `d` for an `A_d` attachment; markings count as `A_0`.
    pub fn degree(&self) -> u32 {
        match self {
            Attachment::Marking { .. } => 0,
            Attachment::Singularity { k, .. } => *k,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PatternKind {
    EvenAtom {
        singularity: String,
    },
    OddAtom {
        singularity: String,
    },
    Rosary {
        length: usize,
        singularities: Vec<String>,
    },
    ClosedRosary {
        length: usize,
        singularities: Vec<String>,
    },
    HyperellipticTail,
    HyperellipticBridge,
    DanglingBridge,
    HyperellipticChain {
        length: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternHit {
    #[serde(flatten)]
    pub kind: PatternKind,
    pub subcurve: Subcurve,
    pub attachment: Vec<Attachment>,
    /// Set when the hyperelliptic subcurve is a single component.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub honest: bool,
}

impl PatternHit {
    /// All attachments are markings or nodes.
    pub fn nodally_attached(&self) -> bool {
        self.attachment.iter().all(|a| a.degree() <= 1)
    }

    /// Geometric genus of a single-component hit.
    pub fn genus(&self, curve: &Curve) -> u32 {
        self.subcurve
            .components
            .iter()
            .filter_map(|c| curve.component(c))
            .map(|c| c.genus)
            .sum()
    }
}

fn attachment_of(curve: &Curve, kind: PointKind) -> Attachment {
    match kind {
        PointKind::Marking(m) => Attachment::Marking {
            index: curve.markings[m].index,
        },
        PointKind::Branch { sing, .. } => Attachment::Singularity {
            id: curve.singularities[sing].id.clone(),
            k: curve.singularities[sing].k.k(),
        },
    }
}

fn subcurve(curve: &Curve, layout: &Layout, comps: &[usize]) -> Subcurve {
    let inside = |c: usize| comps.contains(&c);
    let mut boundary = Vec::new();
    let mut markings = Vec::new();
    for &c in comps {
        for p in &layout.points[c] {
            match p.kind {
                PointKind::Marking(m) => markings.push(curve.markings[m].index),
                PointKind::Branch { sing, .. } => {
                    let leaves = layout.branch_comp[sing].iter().any(|&d| !inside(d));
                    let id = &curve.singularities[sing].id;
                    if leaves && !boundary.contains(id) {
                        boundary.push(id.clone());
                    }
                }
            }
        }
    }
    markings.sort_unstable();
    Subcurve {
        components: comps
            .iter()
            .map(|&c| curve.components[c].id.clone())
            .collect(),
        boundary,
        markings,
    }
}

/// Rational components with one or two special points. A loop is allowed
/// only as a link, which makes a closed rosary of length one.
pub(crate) fn is_bead(curve: &Curve, layout: &Layout, c: usize) -> bool {
    let pts = &layout.points[c];
    curve.components[c].genus == 0
        && (1..=2).contains(&pts.len())
        && pts.iter().all(|p| match p.kind {
            PointKind::Branch { sing, .. } => !layout.is_loop(sing) || is_link(curve, sing),
            PointKind::Marking(_) => true,
        })
}

fn is_link(curve: &Curve, s: usize) -> bool {
    let k = curve.singularities[s].k;
    !k.is_even() && k.k() >= 3
}

pub fn find_atoms(curve: &Curve) -> Result<Vec<PatternHit>> {
    let layout = curve.checked()?;
    Ok(atoms(curve, &layout))
}

pub(crate) fn atoms(curve: &Curve, layout: &Layout) -> Vec<PatternHit> {
    let mut hits = Vec::new();
    for (c, comp) in curve.components.iter().enumerate() {
        let pts = &layout.points[c];
        if comp.genus != 0 || pts.len() > 2 {
            continue;
        }
        for (i, p) in pts.iter().enumerate() {
            if let PointKind::Branch { sing, .. } = p.kind {
                let s = &curve.singularities[sing];
                if s.k.is_even() && s.equivariant {
                    let attachment = pts
                        .iter()
                        .enumerate()
                        .filter(|&(j, _)| j != i)
                        .map(|(_, q)| attachment_of(curve, q.kind))
                        .collect();
                    hits.push(PatternHit {
                        kind: PatternKind::EvenAtom {
                            singularity: s.id.clone(),
                        },
                        subcurve: subcurve(curve, layout, &[c]),
                        attachment,
                        honest: true,
                    });
                }
            }
        }
    }
    for (s, sing) in curve.singularities.iter().enumerate() {
        if sing.k.is_even() || sing.k.k() < 3 || !sing.equivariant || layout.is_loop(s) {
            continue;
        }
        let comps = &layout.branch_comp[s];
        let ok = comps
            .iter()
            .all(|&c| curve.components[c].genus == 0 && layout.points[c].len() <= 2);
        if !ok {
            continue;
        }
        let mut attachment = Vec::new();
        for (b, &c) in comps.iter().enumerate() {
            for p in &layout.points[c] {
                if p.kind != (PointKind::Branch { sing: s, branch: b }) {
                    attachment.push(attachment_of(curve, p.kind));
                }
            }
        }
        hits.push(PatternHit {
            kind: PatternKind::OddAtom {
                singularity: sing.id.clone(),
            },
            subcurve: subcurve(curve, layout, comps),
            attachment,
            honest: true,
        });
    }
    hits
}

pub fn find_rosaries(curve: &Curve) -> Result<Vec<PatternHit>> {
    let layout = curve.checked()?;
    Ok(rosaries(curve, &layout))
}

pub(crate) fn rosaries(curve: &Curve, layout: &Layout) -> Vec<PatternHit> {
    let n = layout.n_components();
    let bead: Vec<bool> = (0..n).map(|c| is_bead(curve, layout, c)).collect();
    // links incident to each bead: (singularity, neighbour)
    let mut links: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (s, comps) in layout.branch_comp.iter().enumerate() {
        if comps.len() == 2 && is_link(curve, s) && bead[comps[0]] && bead[comps[1]] {
            links[comps[0]].push((s, comps[1]));
            if comps[0] != comps[1] {
                links[comps[1]].push((s, comps[0]));
            } else {
                links[comps[0]].push((s, comps[0]));
            }
        }
    }
    let mut seen = vec![false; n];
    let mut hits = Vec::new();
    for start in 0..n {
        if !bead[start] || seen[start] {
            continue;
        }
        // collect the bead-graph component
        let mut stack = vec![start];
        let mut members = Vec::new();
        seen[start] = true;
        while let Some(c) = stack.pop() {
            members.push(c);
            for &(_, d) in &links[c] {
                if !seen[d] {
                    seen[d] = true;
                    stack.push(d);
                }
            }
        }
        let closed = members.iter().all(|&c| links[c].len() == 2);
        let first = if closed {
            *members.iter().min().expect("nonempty")
        } else {
            *members
                .iter()
                .filter(|&&c| links[c].len() < 2)
                .min()
                .expect("path has an end")
        };
        // walk the path or cycle
        let mut order = vec![first];
        let mut sings: Vec<usize> = Vec::new();
        let mut cur = first;
        loop {
            let next = links[cur]
                .iter()
                .find(|&&(s, _)| !sings.contains(&s))
                .copied();
            match next {
                Some((s, d)) => {
                    sings.push(s);
                    if d == first && closed {
                        break;
                    }
                    order.push(d);
                    cur = d;
                }
                None => break,
            }
        }
        let length = order.len();
        let sing_ids: Vec<String> = sings
            .iter()
            .map(|&s| curve.singularities[s].id.clone())
            .collect();
        let sub = subcurve(curve, layout, &order);
        if closed {
            hits.push(PatternHit {
                kind: PatternKind::ClosedRosary {
                    length,
                    singularities: sing_ids,
                },
                subcurve: sub,
                attachment: Vec::new(),
                honest: false,
            });
            continue;
        }
        let mut attachment = Vec::new();
        let ends: Vec<usize> = if length == 1 {
            vec![first]
        } else {
            vec![order[0], order[length - 1]]
        };
        for c in ends {
            for p in &layout.points[c] {
                let is_chain_link =
                    matches!(p.kind, PointKind::Branch { sing, .. } if sings.contains(&sing));
                if !is_chain_link {
                    attachment.push(attachment_of(curve, p.kind));
                }
            }
        }
        hits.push(PatternHit {
            kind: PatternKind::Rosary {
                length,
                singularities: sing_ids,
            },
            subcurve: sub,
            attachment,
            honest: false,
        });
    }
    hits
}

/// What a positive-genus smooth component looks like to the tail and bridge
/// recognizers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Shape {
    Tail(Attachment),
    Dangling(Attachment),
    Bridge(Attachment, Attachment),
}

/// Classifies component `c` as a tail, dangling bridge or bridge, if it is
/// a smooth hyperelliptic component of positive genus with one or two
/// attaching points.
pub(crate) fn component_shape(curve: &Curve, layout: &Layout, c: usize) -> Result<Option<Shape>> {
    let comp = &curve.components[c];
    let pts = &layout.points[c];
    if comp.genus == 0 || pts.is_empty() || pts.len() > 2 {
        return Ok(None);
    }
    for p in pts {
        if let PointKind::Branch { sing, .. } = p.kind {
            if curve.singularities[sing].k.is_even() || layout.is_loop(sing) {
                return Ok(None);
            }
        }
    }
    let role = |p: usize| -> Result<Option<Role>> {
        if comp.genus == 1 {
            return Ok(None);
        }
        match &comp.roles {
            None if comp.genus >= 3 => Ok(None),
            None => Err(Error::MissingRole {
                component: comp.id.clone(),
                point: pts[p].id.clone(),
            }),
            Some(map) => map
                .get(&pts[p].id)
                .cloned()
                .map(Some)
                .ok_or_else(|| Error::MissingRole {
                    component: comp.id.clone(),
                    point: pts[p].id.clone(),
                }),
        }
    };
    let hyperelliptic = comp.genus <= 2 || comp.roles.is_some();
    if !hyperelliptic {
        return Ok(None);
    }
    let att = |p: usize| attachment_of(curve, pts[p].kind);
    if pts.len() == 1 {
        return Ok(match role(0)? {
            None | Some(Role::Weierstrass) => Some(Shape::Tail(att(0))),
            Some(Role::Free) => Some(Shape::Dangling(att(0))),
            Some(Role::Conjugate(_)) => None,
        });
    }
    let conjugate = if comp.genus == 1 {
        true
    } else {
        matches!((role(0)?, role(1)?), (Some(Role::Conjugate(a)), Some(Role::Conjugate(b))) if a == b)
    };
    Ok(conjugate.then(|| Shape::Bridge(att(0), att(1))))
}

pub fn find_hyperelliptic_tails_and_bridges(curve: &Curve) -> Result<Vec<PatternHit>> {
    let layout = curve.checked()?;
    tails_and_bridges(curve, &layout)
}

pub(crate) fn tails_and_bridges(curve: &Curve, layout: &Layout) -> Result<Vec<PatternHit>> {
    let mut hits = Vec::new();
    for c in 0..layout.n_components() {
        let (kind, attachment) = match component_shape(curve, layout, c)? {
            None => continue,
            Some(Shape::Tail(a)) => (PatternKind::HyperellipticTail, vec![a]),
            Some(Shape::Dangling(a)) => (PatternKind::DanglingBridge, vec![a]),
            Some(Shape::Bridge(a, b)) => (PatternKind::HyperellipticBridge, vec![a, b]),
        };
        hits.push(PatternHit {
            kind,
            subcurve: subcurve(curve, layout, &[c]),
            attachment,
            honest: true,
        });
    }
    Ok(hits)
}

pub fn find_hyperelliptic_chains(curve: &Curve) -> Result<Vec<PatternHit>> {
    let layout = curve.checked()?;
    chains(curve, &layout)
}

pub(crate) fn chains(curve: &Curve, layout: &Layout) -> Result<Vec<PatternHit>> {
    let n = layout.n_components();
    let mut bridge = vec![false; n];
    for (c, flag) in bridge.iter_mut().enumerate() {
        *flag = matches!(component_shape(curve, layout, c)?, Some(Shape::Bridge(..)));
    }
    let mut links: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (s, comps) in layout.branch_comp.iter().enumerate() {
        if comps.len() == 2
            && comps[0] != comps[1]
            && is_link(curve, s)
            && bridge[comps[0]]
            && bridge[comps[1]]
        {
            links[comps[0]].push((s, comps[1]));
            links[comps[1]].push((s, comps[0]));
        }
    }
    let mut hits = Vec::new();
    let mut seen = vec![false; n];
    for start in 0..n {
        if !bridge[start] || seen[start] || links[start].len() == 2 {
            continue;
        }
        let mut order = vec![start];
        let mut sings = Vec::new();
        seen[start] = true;
        let mut cur = start;
        while let Some(&(s, d)) = links[cur].iter().find(|&&(s, _)| !sings.contains(&s)) {
            sings.push(s);
            seen[d] = true;
            order.push(d);
            cur = d;
        }
        let mut attachment = Vec::new();
        for (i, &c) in order.iter().enumerate() {
            if i != 0 && i != order.len() - 1 {
                continue;
            }
            for p in &layout.points[c] {
                let internal =
                    matches!(p.kind, PointKind::Branch { sing, .. } if sings.contains(&sing));
                if !internal {
                    attachment.push(attachment_of(curve, p.kind));
                }
            }
        }
        hits.push(PatternHit {
            kind: PatternKind::HyperellipticChain {
                length: order.len(),
            },
            subcurve: subcurve(curve, layout, &order),
            attachment,
            honest: true,
        });
    }
    for hit in rosaries(curve, layout) {
        if let PatternKind::Rosary {
            length,
            singularities,
        } = &hit.kind
        {
            let equivariant = singularities
                .iter()
                .all(|id| curve.singularity(id).is_some_and(|s| s.equivariant));
            if length % 2 == 0 && hit.attachment.len() == 2 && equivariant {
                hits.push(PatternHit {
                    kind: PatternKind::HyperellipticChain { length: length / 2 },
                    honest: false,
                    ..hit
                });
            }
        }
    }
    Ok(hits)
}

/// Every pattern hit of every recognizer, for reports.
pub fn all_patterns(curve: &Curve) -> Result<Vec<PatternHit>> {
    let layout = curve.checked()?;
    let mut hits = atoms(curve, &layout);
    hits.extend(rosaries(curve, &layout));
    hits.extend(tails_and_bridges(curve, &layout)?);
    hits.extend(chains(curve, &layout)?);
    Ok(hits)
}

/// Count of hits per kind name, handy for summaries.
pub fn pattern_census(hits: &[PatternHit]) -> BTreeMap<&'static str, usize> {
    let mut out = BTreeMap::new();
    for h in hits {
        let name = match h.kind {
            PatternKind::EvenAtom { .. } => "even_atom",
            PatternKind::OddAtom { .. } => "odd_atom",
            PatternKind::Rosary { .. } => "rosary",
            PatternKind::ClosedRosary { .. } => "closed_rosary",
            PatternKind::HyperellipticTail => "hyperelliptic_tail",
            PatternKind::HyperellipticBridge => "hyperelliptic_bridge",
            PatternKind::DanglingBridge => "dangling_bridge",
            PatternKind::HyperellipticChain { .. } => "hyperelliptic_chain",
        };
        *out.entry(name).or_default() += 1;
    }
    out
}
