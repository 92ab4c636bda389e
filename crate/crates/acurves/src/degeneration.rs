//! Isotrivial degeneration moves, the special-curve predicate, closed points
//! and the degeneration digraph.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::aut;
use crate::canon::{self, CanonicalForm};
use crate::curve::{BranchPoint, Builder, Curve, Layout, PointKind, Pointed, Role};
use crate::enumerate;
use crate::error::{Error, Result};
use crate::patterns::{self, PatternHit, PatternKind, Shape};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MoveKind {
    EvenAtomDrop {
        singularity: String,
    },
    OddAtomDrop {
        singularity: String,
    },
    TailToEvenAtom {
        component: String,
    },
    DanglingBridgeToOddAtom {
        component: String,
    },
    TailViaOddPinch {
        component: String,
        singularity: String,
    },
    BridgeToOddAtom {
        component: String,
    },
    WholeCurveToAtom,
}

impl MoveKind {
    pub fn letter(&self) -> char {
        match self {
            MoveKind::EvenAtomDrop { .. } => 'a',
            MoveKind::OddAtomDrop { .. } => 'b',
            MoveKind::TailToEvenAtom { .. } => 'c',
            MoveKind::DanglingBridgeToOddAtom { .. } => 'd',
            MoveKind::TailViaOddPinch { .. } => 'e',
            MoveKind::BridgeToOddAtom { .. } => 'f',
            MoveKind::WholeCurveToAtom => 'g',
        }
    }
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MoveKind::EvenAtomDrop { singularity } => write!(f, "(a) even atom at {singularity}"),
            MoveKind::OddAtomDrop { singularity } => write!(f, "(b) odd atom at {singularity}"),
            MoveKind::TailToEvenAtom { component } => {
                write!(f, "(c) tail {component} to even atom")
            }
            MoveKind::DanglingBridgeToOddAtom { component } => {
                write!(f, "(d) dangling bridge {component} to odd atom")
            }
            MoveKind::TailViaOddPinch {
                component,
                singularity,
            } => write!(
                f,
                "(e) tail {component} across {singularity} to pinched odd atom"
            ),
            MoveKind::BridgeToOddAtom { component } => {
                write!(f, "(f) bridge {component} to odd atom")
            }
            MoveKind::WholeCurveToAtom => write!(f, "(g) whole curve to atom"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Move {
    #[serde(flatten)]
    pub kind: MoveKind,
    pub source: Curve,
    pub target: Curve,
    /// Singularities of the target smoothed again by the reverse family.
    pub deformed: Vec<String>,
}

/// Facts about a stable curve that the special predicate and the moves share.
struct Analysis {
    layout: Layout,
    /// Singularities with k >= 2 not lying on a nodally attached atom.
    non_atomic: Vec<usize>,
    /// Tails and bridges of bounded genus, by component.
    bounded: Vec<(usize, Shape)>,
    whole_curve_fails: bool,
}

fn analyse(curve: &Curve, r: u32) -> Result<Analysis> {
    let layout = aut::stable_layout(curve, r)?;
    let atoms = patterns::atoms(curve, &layout);
    let atomic: BTreeSet<&str> = atoms
        .iter()
        .filter(|h| h.nodally_attached())
        .map(|h| match &h.kind {
            PatternKind::EvenAtom { singularity } | PatternKind::OddAtom { singularity } => {
                singularity.as_str()
            }
            _ => unreachable!("atoms only"),
        })
        .collect();
    let non_atomic = curve
        .singularities
        .iter()
        .enumerate()
        .filter(|(_, s)| s.k.k() >= 2 && !atomic.contains(s.id.as_str()))
        .map(|(i, _)| i)
        .collect();
    let mut bounded = Vec::new();
    for c in 0..layout.n_components() {
        let genus = curve.components[c].genus;
        if let Some(shape) = patterns::component_shape(curve, &layout, c)? {
            let fits = match shape {
                Shape::Tail(_) => 2 * genus <= r,
                Shape::Dangling(_) | Shape::Bridge(..) => 2 * genus < r,
            };
            if fits {
                bounded.push((c, shape));
            }
        }
    }
    let whole_curve_fails = whole_curve_fails(curve, &layout, r);
    Ok(Analysis {
        layout,
        non_atomic,
        bounded,
        whole_curve_fails,
    })
}

/// Single-component hyperelliptic curve without markings that is not the
/// atom its genus and `r` call for.
fn whole_curve_fails(curve: &Curve, layout: &Layout, r: u32) -> bool {
    let g = curve.genus_unchecked();
    if !curve.markings.is_empty() || r < 2 * g || curve.components.len() != 1 {
        return false;
    }
    let comp = &curve.components[0];
    let smooth_hyp = curve.singularities.is_empty() && (comp.genus <= 2 || comp.roles.is_some());
    let even_atom = comp.genus == 0
        && curve.singularities.len() == 1
        && curve.singularities[0].k.is_even()
        && curve.singularities[0].equivariant
        && layout.points[0].len() == 1;
    if !(smooth_hyp || even_atom) {
        return false;
    }
    !(even_atom && r == 2 * g)
}

pub fn is_special(curve: &Curve, r: u32) -> Result<bool> {
    let a = analyse(curve, r)?;
    Ok(a.non_atomic.is_empty() && a.bounded.is_empty() && !a.whole_curve_fails)
}

/// Termination certificate, compared lexicographically: strictly decreases
/// along every move. Obstructions and the whole-curve term vanish exactly on
/// special curves.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct DegenerationRank {
    /// Non-atomic `A_{>=2}` singularities plus non-atomic tails and bridges of bounded genus.
    pub obstructions: u32,
    /// Components of positive genus plus `A_{>=2}` singularities touching one.
    pub positive_genus: u32,
    /// Whether the whole curve still has to become an atom.
    pub whole_curve: u32,
}

impl DegenerationRank {
    pub fn is_terminal(&self) -> bool {
        self.obstructions == 0 && self.whole_curve == 0
    }
}

pub fn degeneration_rank(curve: &Curve, r: u32) -> Result<DegenerationRank> {
    let a = analyse(curve, r)?;
    let positive: Vec<bool> = curve.components.iter().map(|c| c.genus > 0).collect();
    let touching = a
        .layout
        .branch_comp
        .iter()
        .zip(&curve.singularities)
        .filter(|(comps, s)| s.k.k() >= 2 && comps.iter().any(|&c| positive[c]))
        .count();
    Ok(DegenerationRank {
        obstructions: (a.non_atomic.len() + a.bounded.len()) as u32,
        positive_genus: (positive.iter().filter(|&&p| p).count() + touching) as u32,
        whole_curve: u32::from(a.whole_curve_fails),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedStatus {
    Closed,
    NotClosed,
    SpecialButConverseUnproven,
}

impl fmt::Display for ClosedStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClosedStatus::Closed => "closed",
            ClosedStatus::NotClosed => "not closed",
            ClosedStatus::SpecialButConverseUnproven => "special (closedness unproven)",
        })
    }
}

pub fn closed_point_status(curve: &Curve, r: u32) -> Result<ClosedStatus> {
    if !is_special(curve, r)? {
        return Ok(ClosedStatus::NotClosed);
    }
    let g = curve.genus_unchecked();
    Ok(if !curve.markings.is_empty() || r <= 2 * g {
        ClosedStatus::Closed
    } else {
        ClosedStatus::SpecialButConverseUnproven
    })
}

/// New rational components forming an atom, to be glued in by the caller.
struct AtomParts {
    /// Points that take over the old attachments, in order.
    ends: Vec<BranchPoint>,
    sing: String,
}

fn add_even_atom(b: &mut Builder, h: u32) -> AtomParts {
    let x = b.component(0);
    let cusp = b.point(&x);
    let sing = b.singularity_at(2 * h, vec![cusp], true);
    AtomParts {
        ends: vec![b.point(&x)],
        sing,
    }
}

fn add_odd_atom(b: &mut Builder, h: u32) -> AtomParts {
    let x = b.component(0);
    let y = b.component(0);
    let px = b.point(&x);
    let py = b.point(&y);
    let sing = b.singularity_at(2 * h + 1, vec![px, py], true);
    let ends = vec![b.point(&x), b.point(&y)];
    AtomParts { ends, sing }
}

fn stabilized(curve: Curve) -> Result<Curve> {
    Ok(Pointed::new(curve).stabilize()?.curve)
}

/// Removes singularity `s` and glues an atom by nodes at its former branches.
fn drop_atom(curve: &Curve, s: usize) -> Result<(Curve, String)> {
    let sing = curve.singularities[s].clone();
    let mut base = curve.clone();
    base.singularities.remove(s);
    let mut b = Builder::extend(base);
    let h = sing.k.severity();
    let parts = if sing.k.is_even() {
        add_even_atom(&mut b, h)
    } else {
        add_odd_atom(&mut b, h)
    };
    for (old, new) in sing.branches.iter().zip(&parts.ends) {
        b.singularity_at(1, vec![old.clone(), new.clone()], true);
    }
    Ok((stabilized(b.build())?, parts.sing))
}

/// Replaces component `c` by new components; its special points are handed
/// to `ends` in layout order.
fn replace_component(
    curve: &Curve,
    layout: &Layout,
    c: usize,
    build: impl FnOnce(&mut Builder) -> AtomParts,
) -> Result<(Curve, String)> {
    let mut b = Builder::extend(curve.clone());
    let parts = build(&mut b);
    let mut out = b.build();
    let comp_id = curve.components[c].id.clone();
    for (p, new) in layout.points[c].iter().zip(&parts.ends) {
        match p.kind {
            PointKind::Branch { sing, branch } => {
                out.singularities[sing].branches[branch] = new.clone();
            }
            PointKind::Marking(m) => {
                out.markings[m].component = new.component.clone();
                out.markings[m].point = new.point.clone();
            }
        }
    }
    out.components.retain(|x| x.id != comp_id);
    Ok((stabilized(out)?, parts.sing))
}

fn pinched_tail(curve: &Curve, layout: &Layout, c: usize, s: usize) -> Result<(Curve, String)> {
    let genus = curve.components[c].genus;
    let sing = &curve.singularities[s];
    let k = sing.k.severity();
    let far = sing
        .branches
        .iter()
        .zip(&layout.branch_comp[s])
        .find(|&(_, &d)| d != c)
        .map(|(bp, _)| bp.clone())
        .expect("tail singularity is not a loop");
    let comp_id = curve.components[c].id.clone();
    let mut base = curve.clone();
    base.singularities.remove(s);
    base.components.retain(|x| x.id != comp_id);
    let mut b = Builder::extend(base);
    let x1 = b.component(0);
    let x2 = b.component(0);
    let a = b.point(&x1);
    let z = b.point(&x2);
    b.singularity_at(2 * k + 1, vec![a, z], true);
    let cusp = b.point(&x2);
    let new = b.singularity_at(2 * genus, vec![cusp], true);
    let glue = b.point(&x1);
    b.singularity_at(1, vec![far, glue], true);
    Ok((stabilized(b.build())?, new))
}

/// A move can turn a point without a recorded role into an attachment whose
/// role patterns inspect; the target is then expanded over the possible roles.
fn role_completions(curve: Curve) -> Vec<Curve> {
    let layout = Layout::new(&curve);
    let mut out = vec![curve.clone()];
    for c in 0..curve.components.len() {
        let comp = &curve.components[c];
        if !enumerate::roles_inspected(&curve, &layout, c)
            || (comp.roles.is_none() && comp.genus != 2)
        {
            continue;
        }
        let known = comp.roles.clone().unwrap_or_default();
        let missing: Vec<&str> = layout.points[c]
            .iter()
            .map(|p| p.id.as_str())
            .filter(|p| !known.contains_key(*p))
            .collect();
        if missing.is_empty() {
            continue;
        }
        let variants: Vec<BTreeMap<String, Role>> = if known.is_empty() {
            enumerate::role_variants(&curve, &layout, c)
                .into_iter()
                .flatten()
                .collect()
        } else {
            // one known, one missing point
            let mut options = vec![Role::Weierstrass, Role::Free];
            let unpaired = known.values().find_map(|r| match r {
                Role::Conjugate(tag) if known.values().filter(|x| *x == r).count() == 1 => {
                    Some(tag.clone())
                }
                _ => None,
            });
            options.extend(unpaired.map(Role::Conjugate));
            options
                .into_iter()
                .map(|role| {
                    let mut m = known.clone();
                    m.insert(missing[0].to_string(), role);
                    m
                })
                .collect()
        };
        out = out
            .into_iter()
            .flat_map(|base| {
                variants.iter().map(move |v| {
                    let mut x = base.clone();
                    x.components[c].roles = Some(v.clone());
                    x
                })
            })
            .collect();
    }
    out
}

pub fn one_step_specializations(curve: &Curve, r: u32) -> Result<Vec<Move>> {
    let a = analyse(curve, r)?;
    let mut candidates: Vec<(MoveKind, Curve, String)> = Vec::new();
    for &s in &a.non_atomic {
        let sing = &curve.singularities[s];
        let (target, new) = drop_atom(curve, s)?;
        let kind = if sing.k.is_even() {
            MoveKind::EvenAtomDrop {
                singularity: sing.id.clone(),
            }
        } else {
            MoveKind::OddAtomDrop {
                singularity: sing.id.clone(),
            }
        };
        candidates.push((kind, target, new));
    }
    for (c, shape) in &a.bounded {
        let c = *c;
        let comp = curve.components[c].id.clone();
        let genus = curve.components[c].genus;
        match shape {
            Shape::Tail(att) if att.degree() <= 1 => {
                let (t, new) = replace_component(curve, &a.layout, c, |b| add_even_atom(b, genus))?;
                candidates.push((MoveKind::TailToEvenAtom { component: comp }, t, new));
            }
            Shape::Tail(att) => {
                if r.is_multiple_of(2) && 2 * genus == r {
                    let s = match &a.layout.points[c][0].kind {
                        PointKind::Branch { sing, .. } => *sing,
                        PointKind::Marking(_) => unreachable!("degree above one"),
                    };
                    debug_assert_eq!(att.degree(), curve.singularities[s].k.k());
                    let (t, new) = pinched_tail(curve, &a.layout, c, s)?;
                    candidates.push((
                        MoveKind::TailViaOddPinch {
                            component: comp,
                            singularity: curve.singularities[s].id.clone(),
                        },
                        t,
                        new,
                    ));
                }
            }
            Shape::Dangling(att) if att.degree() <= 1 && genus >= 2 => {
                let (t, new) = replace_component(curve, &a.layout, c, |b| add_odd_atom(b, genus))?;
                candidates.push((
                    MoveKind::DanglingBridgeToOddAtom { component: comp },
                    t,
                    new,
                ));
            }
            Shape::Bridge(x, y) if x.degree() <= 1 && y.degree() <= 1 => {
                let (t, new) = replace_component(curve, &a.layout, c, |b| add_odd_atom(b, genus))?;
                candidates.push((MoveKind::BridgeToOddAtom { component: comp }, t, new));
            }
            _ => {}
        }
    }
    if a.whole_curve_fails {
        let g = curve.genus_unchecked();
        let mut b = Builder::new();
        let parts = if r == 2 * g {
            add_even_atom(&mut b, g)
        } else {
            add_odd_atom(&mut b, g)
        };
        let target = b.build();
        candidates.push((MoveKind::WholeCurveToAtom, target, parts.sing));
    }
    let source_key = canon::canonical_form(curve)?;
    let mut moves = Vec::new();
    for (kind, target, new) in candidates {
        let mut seen = BTreeSet::new();
        for target in role_completions(target) {
            let key = canon::canonical_form(&target)?;
            if key == source_key || !seen.insert(key) {
                continue;
            }
            let deformed = if target.singularity(&new).is_some() {
                vec![new.clone()]
            } else {
                Vec::new()
            };
            moves.push(Move {
                kind: kind.clone(),
                source: curve.clone(),
                target,
                deformed,
            });
        }
    }
    Ok(moves)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigraphNode {
    pub key: String,
    pub curve: Curve,
    pub special: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigraphEdge {
    pub from: usize,
    pub to: usize,
    /// Move letters (a) through (g) realizing the edge.
    pub moves: String,
}

/// Sufficient moves between canonical types, closed under taking targets.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Digraph {
    pub nodes: Vec<DigraphNode>,
    pub edges: Vec<DigraphEdge>,
}

impl Digraph {
    pub fn sinks(&self) -> Vec<usize> {
        let mut has_out = vec![false; self.nodes.len()];
        for e in &self.edges {
            has_out[e.from] = true;
        }
        (0..self.nodes.len()).filter(|&i| !has_out[i]).collect()
    }

    pub fn to_dot(&self) -> String {
        let sinks: BTreeSet<usize> = self.sinks().into_iter().collect();
        let mut out = String::from("digraph degenerations {\n  rankdir=LR;\n");
        for (i, node) in self.nodes.iter().enumerate() {
            let style = if sinks.contains(&i) {
                ", style=filled, fillcolor=gold, peripheries=2"
            } else {
                ""
            };
            let _ = writeln!(out, "  n{i} [label=\"{}\"{style}];", describe(&node.curve));
        }
        for e in &self.edges {
            let _ = writeln!(out, "  n{} -> n{} [label=\"{}\"];", e.from, e.to, e.moves);
        }
        out.push_str("}\n");
        out
    }
}

/// Short human label: component genera and singularity types.
pub fn describe(curve: &Curve) -> String {
    let genera: Vec<String> = curve
        .components
        .iter()
        .map(|c| c.genus.to_string())
        .collect();
    let sings: Vec<String> = curve
        .singularities
        .iter()
        .map(|s| {
            if s.equivariant || s.k.is_node() {
                s.k.to_string()
            } else {
                format!("{}*", s.k)
            }
        })
        .collect();
    let mut label = format!("g[{}]", genera.join(","));
    if !sings.is_empty() {
        label.push_str(&format!(" {}", sings.join(",")));
    }
    if !curve.markings.is_empty() {
        label.push_str(&format!(" n={}", curve.markings.len()));
    }
    let hyp = curve
        .components
        .iter()
        .filter(|c| c.genus >= 2 && c.roles.is_some())
        .count();
    if hyp > 0 {
        label.push_str(&format!(" hyp={hyp}"));
    }
    label
}

pub fn degeneration_digraph(curves: &[Curve], r: u32) -> Result<Digraph> {
    const LIMIT: usize = 200_000;
    let mut index: BTreeMap<CanonicalForm, usize> = BTreeMap::new();
    let mut graph = Digraph::default();
    let mut queue = VecDeque::new();
    let mut intern =
        |curve: &Curve, graph: &mut Digraph, queue: &mut VecDeque<usize>| -> Result<usize> {
            let (key, canon) = canon::canonicalize(curve)?;
            if let Some(&i) = index.get(&key) {
                return Ok(i);
            }
            let i = graph.nodes.len();
            graph.nodes.push(DigraphNode {
                key: key.to_string(),
                special: is_special(&canon, r)?,
                curve: canon,
            });
            index.insert(key, i);
            queue.push_back(i);
            Ok(i)
        };
    for c in curves {
        intern(c, &mut graph, &mut queue)?;
    }
    let mut edges: BTreeMap<(usize, usize), BTreeSet<char>> = BTreeMap::new();
    while let Some(i) = queue.pop_front() {
        if graph.nodes.len() > LIMIT {
            return Err(Error::ResourceBound(format!(
                "more than {LIMIT} digraph nodes"
            )));
        }
        let curve = graph.nodes[i].curve.clone();
        for m in one_step_specializations(&curve, r)? {
            let j = intern(&m.target, &mut graph, &mut queue)?;
            edges.entry((i, j)).or_default().insert(m.kind.letter());
        }
    }
    graph.edges = edges
        .into_iter()
        .map(|((from, to), letters)| DigraphEdge {
            from,
            to,
            moves: letters.into_iter().collect(),
        })
        .collect();
    Ok(graph)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FiberCase {
    /// Even length, alternate links from the first: a 2-pointed chain.
    PointedChain,
    /// Even length, alternate links from the second: a chain with rational
    /// 1-pointed ends.
    RationalEnds,
    /// Odd length: a chain joined by an odd singularity to a rational end.
    RationalEnd,
    ClosedChain,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberShape {
    pub case: FiberCase,
    /// Rosary links smoothed in the generic fiber.
    pub deformed: Vec<String>,
    /// Combinatorial template; each hyperelliptic component has the genus
    /// forced by the links it absorbs.
    pub template: Curve,
}

/// Shapes of generic fibers of isotrivial families whose special fiber
/// contains the rosary `hit`.
pub fn generic_fibers_over_rosary(
    curve: &Curve,
    hit: &PatternHit,
    r: u32,
) -> Result<Vec<FiberShape>> {
    let (links, closed) = match &hit.kind {
        PatternKind::Rosary { singularities, .. } => (singularities, false),
        PatternKind::ClosedRosary { singularities, .. } => (singularities, true),
        _ => return Err(Error::InvalidArgument("not a rosary".into())),
    };
    let moving = aut::gm_rosaries(curve, r)?;
    if !moving
        .iter()
        .any(|h| h.subcurve.components == hit.subcurve.components)
    {
        return Err(Error::NoTorus);
    }
    let severity: Vec<u32> = links
        .iter()
        .map(|id| {
            curve
                .singularity(id)
                .map(|s| s.k.severity())
                .ok_or_else(|| Error::UnknownSingularity(id.clone()))
        })
        .collect::<Result<_>>()?;
    let l = links.len();
    let mut out = Vec::new();
    let pick = |offset: usize| -> Vec<usize> { (offset..l).step_by(2).collect() };
    if closed {
        if l % 2 == 0 {
            for offset in [0, 1] {
                let chosen = pick(offset);
                out.push(FiberShape {
                    case: FiberCase::ClosedChain,
                    deformed: chosen.iter().map(|&i| links[i].clone()).collect(),
                    template: closed_chain(&severity, &chosen),
                });
            }
        }
        return Ok(out);
    }
    // an open rosary of length l has l - 1 links
    let beads = l + 1;
    if beads % 2 == 0 {
        out.push(FiberShape {
            case: FiberCase::PointedChain,
            deformed: pick(0).iter().map(|&i| links[i].clone()).collect(),
            template: open_chain(&severity, &pick(0), false, false),
        });
        if l >= 3 {
            out.push(FiberShape {
                case: FiberCase::RationalEnds,
                deformed: pick(1).iter().map(|&i| links[i].clone()).collect(),
                template: open_chain(&severity, &pick(1), true, true),
            });
        }
    } else if l >= 2 {
        for (offset, left, right) in [(0, false, true), (1, true, false)] {
            out.push(FiberShape {
                case: FiberCase::RationalEnd,
                deformed: pick(offset).iter().map(|&i| links[i].clone()).collect(),
                template: open_chain(&severity, &pick(offset), left, right),
            });
        }
    }
    Ok(out)
}

/// Chain obtained from a rosary with links of the given severities by
/// smoothing the chosen links: each smoothed link fuses its two beads into a
/// hyperelliptic component of that genus. Unfused end beads stay rational.
fn open_chain(
    severity: &[u32],
    chosen: &[usize],
    left_rational: bool,
    right_rational: bool,
) -> Curve {
    let mut b = Builder::new();
    let mut comps: Vec<(String, u32)> = Vec::new();
    if left_rational {
        comps.push((b.component(0), 0));
    }
    for &i in chosen {
        comps.push((b.component(severity[i]), severity[i]));
    }
    if right_rational {
        comps.push((b.component(0), 0));
    }
    let kept: Vec<usize> = (0..severity.len())
        .filter(|i| !chosen.contains(i))
        .collect();
    let mut left_points: Vec<Option<BranchPoint>> = vec![None; comps.len()];
    let first = b.marking(&comps[0].0);
    left_points[0] = Some(first);
    let mut rights: Vec<Option<BranchPoint>> = vec![None; comps.len()];
    for (j, &i) in kept.iter().enumerate() {
        let a = b.point(&comps[j].0);
        let z = b.point(&comps[j + 1].0);
        rights[j] = Some(a.clone());
        left_points[j + 1] = Some(z.clone());
        b.singularity_at(2 * severity[i] + 1, vec![a, z], true);
    }
    let last = comps.len() - 1;
    rights[last] = Some(b.marking(&comps[last].0));
    for (j, (_, genus)) in comps.iter().enumerate() {
        if *genus > 0 {
            let tag = format!("h{j}");
            if let (Some(x), Some(y)) = (&left_points[j], &rights[j]) {
                b.set_role(x, Role::Conjugate(tag.clone()));
                b.set_role(y, Role::Conjugate(tag));
            }
        }
    }
    b.build()
}

fn closed_chain(severity: &[u32], chosen: &[usize]) -> Curve {
    let mut b = Builder::new();
    let comps: Vec<String> = chosen.iter().map(|&i| b.component(severity[i])).collect();
    let kept: Vec<usize> = (0..severity.len())
        .filter(|i| !chosen.contains(i))
        .collect();
    let m = comps.len();
    let mut ends: Vec<Vec<BranchPoint>> = vec![Vec::new(); m];
    for (j, &i) in kept.iter().enumerate() {
        let a = b.point(&comps[j]);
        let z = b.point(&comps[(j + 1) % m]);
        ends[j].push(a.clone());
        ends[(j + 1) % m].push(z.clone());
        b.singularity_at(2 * severity[i] + 1, vec![a, z], true);
    }
    for (j, pts) in ends.iter().enumerate() {
        for p in pts {
            b.set_role(p, Role::Conjugate(format!("h{j}")));
        }
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn genus1_with_a4() -> Curve {
        let mut b = Builder::new();
        let c = b.component(1);
        b.singularity(4, &[&c]);
        b.build()
    }

    #[test]
    fn inner_cusp_drops_an_even_atom() {
        let c = genus1_with_a4();
        let moves = one_step_specializations(&c, 4).unwrap();
        assert_eq!(moves.len(), 1);
        let t = &moves[0].target;
        assert_eq!(t.components.len(), 2);
        assert_eq!(t.arithmetic_genus().unwrap(), 3);
        // the elliptic tail left behind still degenerates to a cusp
        assert!(!is_special(t, 4).unwrap());
        let next = one_step_specializations(t, 4).unwrap();
        assert_eq!(next.len(), 1);
        assert!(is_special(&next[0].target, 4).unwrap());
    }

    #[test]
    fn whole_curve_moves() {
        let c = catalog::smooth(2, 0, false);
        let moves = one_step_specializations(&c, 4).unwrap();
        assert_eq!(moves.len(), 1);
        assert!(canon::isomorphic(&moves[0].target, &catalog::even_atom(2, false)).unwrap());
        assert!(one_step_specializations(&catalog::even_atom(2, false), 4)
            .unwrap()
            .is_empty());
        assert_eq!(closed_point_status(&c, 4).unwrap(), ClosedStatus::NotClosed);
        assert_eq!(
            closed_point_status(&catalog::smooth(3, 0, false), 6).unwrap(),
            ClosedStatus::Closed
        );
        assert_eq!(
            closed_point_status(&catalog::odd_atom(2, 0), 5).unwrap(),
            ClosedStatus::SpecialButConverseUnproven
        );
    }

    #[test]
    fn tail_with_atom_is_special() {
        let mut b = Builder::new();
        let e = b.component(3);
        let x = b.component(0);
        b.singularity(1, &[&e, &x]);
        b.singularity(4, &[&x]);
        let c = b.build();
        assert!(is_special(&c, 4).unwrap());
        assert_eq!(closed_point_status(&c, 4).unwrap(), ClosedStatus::Closed);
        // a genus-1 tail is within the bound r/2 and must become an atom
        let mut b = Builder::new();
        let e = b.component(1);
        let x = b.component(0);
        b.singularity(1, &[&e, &x]);
        b.singularity(4, &[&x]);
        assert!(!is_special(&b.build(), 4).unwrap());
    }

    #[test]
    fn rosary_fibers() {
        let atom = catalog::odd_atom(1, 2);
        let hit = &patterns::find_rosaries(&atom).unwrap()[0];
        let shapes = generic_fibers_over_rosary(&atom, hit, 3).unwrap();
        assert_eq!(shapes.len(), 1);
        assert_eq!(shapes[0].case, FiberCase::PointedChain);
        let r = catalog::rosary(&[1, 1]);
        let hit = &patterns::find_rosaries(&r).unwrap()[0];
        let shapes = generic_fibers_over_rosary(&r, hit, 3).unwrap();
        assert!(shapes.iter().all(|s| s.case == FiberCase::RationalEnd));
        let c = catalog::closed_rosary(&[1, 1]);
        let hit = &patterns::find_rosaries(&c).unwrap()[0];
        let shapes = generic_fibers_over_rosary(&c, hit, 3).unwrap();
        assert!(shapes.iter().all(|s| s.case == FiberCase::ClosedChain));
        for s in &shapes {
            assert_eq!(s.template.arithmetic_genus().unwrap(), 3);
        }
    }
}
