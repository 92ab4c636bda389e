//! Decorated dual graphs of pointed curves with A-type singularities.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An `A_k` singularity with `k >= 1`; local model `y^2 = x^(k+1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct SingularityType(u32);

impl SingularityType {
    pub fn new(k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument(
                "an A_0 point is smooth, k must be at least 1".into(),
            ));
        }
        Ok(SingularityType(k))
    }

    pub fn k(self) -> u32 {
        self.0
    }

    pub fn is_even(self) -> bool {
        self.0.is_multiple_of(2)
    }

    pub fn is_node(self) -> bool {
        self.0 == 1
    }

    pub fn branch_count(self) -> usize {
        if self.is_even() {
            1
        } else {
            2
        }
    }

    /// `h` with `k = 2h` or `k = 2h + 1`.
    pub fn severity(self) -> u32 {
        self.0 / 2
    }

    /// Contribution of one branch to the degree of the log-dualizing sheaf
    /// on its component.
    pub fn branch_weight(self) -> i64 {
        let h = i64::from(self.severity());
        if self.is_even() {
            2 * h
        } else {
            h + 1
        }
    }
}

impl TryFrom<u32> for SingularityType {
    type Error = String;

    fn try_from(k: u32) -> std::result::Result<Self, String> {
        SingularityType::new(k).map_err(|e| e.to_string())
    }
}

impl From<SingularityType> for u32 {
    fn from(t: SingularityType) -> u32 {
        t.0
    }
}

impl fmt::Display for SingularityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A{}", self.0)
    }
}

/// Position of a special point relative to the hyperelliptic involution.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Weierstrass,
    Free,
    Conjugate(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Component {
    pub id: String,
    pub genus: u32,
    /// Present iff the component is known to be hyperelliptic.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roles: Option<BTreeMap<String, Role>>,
}

impl Component {
    pub fn new(id: impl Into<String>, genus: u32) -> Self {
        Component {
            id: id.into(),
            genus,
            roles: None,
        }
    }

    pub fn role(&self, point: &str) -> Option<&Role> {
        self.roles.as_ref().and_then(|r| r.get(point))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchPoint {
    pub component: String,
    pub point: String,
}

impl BranchPoint {
    pub fn new(component: impl Into<String>, point: impl Into<String>) -> Self {
        BranchPoint {
            component: component.into(),
            point: point.into(),
        }
    }
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Singularity {
    pub id: String,
    pub k: SingularityType,
    pub branches: Vec<BranchPoint>,
    /// Whether the crimping datum is torus-equivariant. Ignored for nodes.
    #[serde(default = "yes")]
    pub equivariant: bool,
}

impl Singularity {
    /// Equivariance that actually constrains weights (always true on nodes).
    pub fn effective_equivariant(&self) -> bool {
        self.equivariant || self.k.is_node()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Marking {
    pub index: u32,
    pub component: String,
    pub point: String,
}

impl Marking {
    pub fn slot(&self) -> BranchPoint {
        BranchPoint::new(self.component.clone(), self.point.clone())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Curve {
    pub components: Vec<Component>,
    pub singularities: Vec<Singularity>,
    #[serde(default)]
    pub markings: Vec<Marking>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    NoComponents,
    DuplicateComponent {
        component: String,
    },
    DuplicateSingularity {
        singularity: String,
    },
    UnknownComponent {
        component: String,
    },
    BadBranchCount {
        singularity: String,
        expected: usize,
        found: usize,
    },
    DuplicateSlot {
        component: String,
        point: String,
    },
    BadMarkingIndices,
    BadConjugatePair {
        component: String,
        pair: String,
    },
    EmptyRationalComponent {
        component: String,
    },
    Disconnected,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoComponents => write!(f, "no components"),
            Violation::DuplicateComponent { component } => {
                write!(f, "duplicate component id `{component}`")
            }
            Violation::DuplicateSingularity { singularity } => {
                write!(f, "duplicate singularity id `{singularity}`")
            }
            Violation::UnknownComponent { component } => {
                write!(f, "reference to unknown component `{component}`")
            }
            Violation::BadBranchCount {
                singularity,
                expected,
                found,
            } => write!(
                f,
                "singularity `{singularity}` needs {expected} branch(es), has {found}"
            ),
            Violation::DuplicateSlot { component, point } => {
                write!(f, "point `{point}` on `{component}` is used twice")
            }
            Violation::BadMarkingIndices => write!(f, "marking indices are not exactly 1..n"),
            Violation::BadConjugatePair { component, pair } => {
                write!(
                    f,
                    "conjugate pair `{pair}` on `{component}` does not have two points"
                )
            }
            Violation::EmptyRationalComponent { component } => {
                write!(f, "rational component `{component}` has no special points")
            }
            Violation::Disconnected => write!(f, "incidence graph is disconnected"),
        }
    }
}

/// What sits at a special point of the normalization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum PointKind {
    Branch { sing: usize, branch: usize },
    Marking(usize),
}

#[derive(Clone, Debug)]
pub(crate) struct Point {
    pub id: String,
    pub kind: PointKind,
}

/// Index tables over a curve. Built only for curves whose references resolve.
#[derive(Clone, Debug)]
pub(crate) struct Layout {
    pub comp_of: HashMap<String, usize>,
    /// Special points per component, sorted by point id.
    pub points: Vec<Vec<Point>>,
    /// Component index of every branch of every singularity.
    pub branch_comp: Vec<Vec<usize>>,
    pub marking_comp: Vec<usize>,
}

impl Layout {
    pub fn new(curve: &Curve) -> Layout {
        let comp_of: HashMap<String, usize> = curve
            .components
            .iter()
            .enumerate()
            .map(|(i, c)| (c.id.clone(), i))
            .collect();
        let mut points: Vec<Vec<Point>> = vec![Vec::new(); curve.components.len()];
        let mut branch_comp = Vec::with_capacity(curve.singularities.len());
        for (s, sing) in curve.singularities.iter().enumerate() {
            let mut comps = Vec::with_capacity(sing.branches.len());
            for (b, bp) in sing.branches.iter().enumerate() {
                let c = comp_of[&bp.component];
                comps.push(c);
                points[c].push(Point {
                    id: bp.point.clone(),
                    kind: PointKind::Branch { sing: s, branch: b },
                });
            }
            branch_comp.push(comps);
        }
        let marking_comp = curve
            .markings
            .iter()
            .enumerate()
            .map(|(m, mk)| {
                let c = comp_of[&mk.component];
                points[c].push(Point {
                    id: mk.point.clone(),
                    kind: PointKind::Marking(m),
                });
                c
            })
            .collect();
        for list in &mut points {
            list.sort_by(|a, b| a.id.cmp(&b.id));
        }
        Layout {
            comp_of,
            points,
            branch_comp,
            marking_comp,
        }
    }

    pub fn n_components(&self) -> usize {
        self.points.len()
    }

    pub fn is_loop(&self, sing: usize) -> bool {
        let b = &self.branch_comp[sing];
        b.len() == 2 && b[0] == b[1]
    }

    /// Connected pieces of the incidence graph using only the odd
    /// singularities accepted by `keep`.
    pub fn pieces(&self, curve: &Curve, keep: impl Fn(usize) -> bool) -> Vec<Vec<usize>> {
        let mut dsu = Dsu::new(self.n_components());
        for (s, comps) in self.branch_comp.iter().enumerate() {
            if comps.len() == 2 && keep(s) && !curve.singularities[s].k.is_even() {
                dsu.union(comps[0], comps[1]);
            }
        }
        dsu.groups()
    }
}

/// Plain union-find used for connectivity.
#[derive(Clone, Debug)]
pub(crate) struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    pub fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }

    /// Groups ordered by their smallest member.
    pub fn groups(&mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for x in 0..n {
            let r = self.find(x);
            by_root.entry(r).or_default().push(x);
        }
        let mut groups: Vec<Vec<usize>> = by_root.into_values().collect();
        groups.sort_by_key(|g| g[0]);
        groups
    }
}

/// A piece of a partial normalization: a curve plus points lying over the
/// removed singularities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pointed {
    pub curve: Curve,
    pub distinguished: Vec<DistinguishedPoint>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistinguishedPoint {
    pub point: BranchPoint,
    /// The singularity this point used to be a branch of, and which branch.
    pub singularity: String,
    pub branch: usize,
}

impl Curve {
    pub fn from_json(text: &str) -> Result<Curve> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("curve serializes")
    }

    pub fn n_markings(&self) -> usize {
        self.markings.len()
    }

    pub fn component(&self, id: &str) -> Option<&Component> {
        self.components.iter().find(|c| c.id == id)
    }

    pub fn singularity(&self, id: &str) -> Option<&Singularity> {
        self.singularities.iter().find(|s| s.id == id)
    }

    pub(crate) fn sing_index(&self, id: &str) -> Result<usize> {
        self.singularities
            .iter()
            .position(|s| s.id == id)
            .ok_or_else(|| Error::UnknownSingularity(id.to_string()))
    }

    /// Every violated structural invariant; empty means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.components.is_empty() {
            out.push(Violation::NoComponents);
        }
        let mut ids = HashSet::new();
        for c in &self.components {
            if !ids.insert(c.id.as_str()) {
                out.push(Violation::DuplicateComponent {
                    component: c.id.clone(),
                });
            }
        }
        let mut sids = HashSet::new();
        for s in &self.singularities {
            if !sids.insert(s.id.as_str()) {
                out.push(Violation::DuplicateSingularity {
                    singularity: s.id.clone(),
                });
            }
        }
        let mut slots: HashSet<(&str, &str)> = HashSet::new();
        let mut dup = Vec::new();
        let mut unknown = Vec::new();
        let mut all_slots: Vec<(String, String)> = Vec::new();
        for s in &self.singularities {
            let expected = s.k.branch_count();
            if s.branches.len() != expected {
                out.push(Violation::BadBranchCount {
                    singularity: s.id.clone(),
                    expected,
                    found: s.branches.len(),
                });
            }
            for b in &s.branches {
                all_slots.push((b.component.clone(), b.point.clone()));
            }
        }
        for m in &self.markings {
            all_slots.push((m.component.clone(), m.point.clone()));
        }
        for (c, p) in &all_slots {
            if !ids.contains(c.as_str()) {
                if !unknown.contains(c) {
                    unknown.push(c.clone());
                }
            } else if !slots.insert((c.as_str(), p.as_str())) {
                dup.push((c.clone(), p.clone()));
            }
        }
        for component in unknown {
            out.push(Violation::UnknownComponent { component });
        }
        dup.sort();
        dup.dedup();
        for (component, point) in dup {
            out.push(Violation::DuplicateSlot { component, point });
        }
        let mut indices: Vec<u32> = self.markings.iter().map(|m| m.index).collect();
        indices.sort_unstable();
        if indices
            .iter()
            .enumerate()
            .any(|(i, &x)| x as usize != i + 1)
        {
            out.push(Violation::BadMarkingIndices);
        }
        for c in &self.components {
            if let Some(roles) = &c.roles {
                let mut pairs: BTreeMap<&str, usize> = BTreeMap::new();
                for role in roles.values() {
                    if let Role::Conjugate(p) = role {
                        *pairs.entry(p.as_str()).or_default() += 1;
                    }
                }
                for (pair, count) in pairs {
                    if count != 2 {
                        out.push(Violation::BadConjugatePair {
                            component: c.id.clone(),
                            pair: pair.to_string(),
                        });
                    }
                }
            }
        }
        let referenced: HashSet<&str> = all_slots.iter().map(|(c, _)| c.as_str()).collect();
        for c in &self.components {
            if c.genus == 0 && !referenced.contains(c.id.as_str()) {
                out.push(Violation::EmptyRationalComponent {
                    component: c.id.clone(),
                });
            }
        }
        let structural_ok = out.iter().all(|v| {
            !matches!(
                v,
                Violation::UnknownComponent { .. }
                    | Violation::DuplicateComponent { .. }
                    | Violation::NoComponents
            )
        });
        if structural_ok {
            let mut dsu = Dsu::new(self.components.len());
            let index: HashMap<&str, usize> = self
                .components
                .iter()
                .enumerate()
                .map(|(i, c)| (c.id.as_str(), i))
                .collect();
            for s in &self.singularities {
                if s.branches.len() == 2 {
                    dsu.union(
                        index[s.branches[0].component.as_str()],
                        index[s.branches[1].component.as_str()],
                    );
                }
            }
            if dsu.groups().len() > 1 {
                out.push(Violation::Disconnected);
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    pub(crate) fn checked(&self) -> Result<Layout> {
        let v = self.validate();
        if v.is_empty() {
            Ok(Layout::new(self))
        } else {
            Err(Error::Invalid(v))
        }
    }

    /// First Betti number of the incidence multigraph.
    pub(crate) fn betti(&self) -> i64 {
        let odd = self.singularities.iter().filter(|s| !s.k.is_even()).count() as i64;
        odd - self.components.len() as i64 + 1
    }

    pub fn arithmetic_genus(&self) -> Result<u32> {
        self.checked()?;
        Ok(self.genus_unchecked())
    }

    pub(crate) fn genus_unchecked(&self) -> u32 {
        let geometric: i64 = self.components.iter().map(|c| i64::from(c.genus)).sum();
        let severity: i64 = self
            .singularities
            .iter()
            .map(|s| i64::from(s.k.severity()))
            .sum();
        (geometric + severity + self.betti()) as u32
    }

    pub fn max_k(&self) -> u32 {
        self.singularities
            .iter()
            .map(|s| s.k.k())
            .max()
            .unwrap_or(0)
    }

    pub fn is_prestable(&self, r: u32) -> Result<bool> {
        self.checked()?;
        Ok(self.max_k() <= r)
    }

    pub fn is_stable(&self, r: u32) -> Result<bool> {
        let layout = self.checked()?;
        if self.max_k() > r {
            return Err(Error::NotPrestable(r));
        }
        Ok(self.all_degrees_positive(&layout))
    }

    /// Degree of the log-dualizing sheaf on every component.
    pub(crate) fn degrees(&self, layout: &Layout) -> Vec<i64> {
        self.components
            .iter()
            .enumerate()
            .map(|(c, comp)| {
                let weight: i64 = layout.points[c]
                    .iter()
                    .map(|p| match p.kind {
                        PointKind::Branch { sing, .. } => {
                            self.singularities[sing].k.branch_weight()
                        }
                        PointKind::Marking(_) => 1,
                    })
                    .sum();
                2 * i64::from(comp.genus) - 2 + weight
            })
            .collect()
    }

    pub(crate) fn all_degrees_positive(&self, layout: &Layout) -> bool {
        self.degrees(layout).iter().all(|&d| d > 0)
    }

    /// Normalizes the named singularities and splits the result into
    /// connected pieces, ordered by their first component.
    pub fn partial_normalization(&self, sings: &[&str]) -> Result<Vec<Pointed>> {
        let layout = self.checked()?;
        let mut removed = vec![false; self.singularities.len()];
        for id in sings {
            removed[self.sing_index(id)?] = true;
        }
        Ok(self.normalize_indices(&layout, &removed))
    }

    pub(crate) fn normalize_indices(&self, layout: &Layout, removed: &[bool]) -> Vec<Pointed> {
        let groups = layout.pieces(self, |s| !removed[s]);
        let mut piece_of = vec![0usize; self.components.len()];
        for (p, g) in groups.iter().enumerate() {
            for &c in g {
                piece_of[c] = p;
            }
        }
        let mut pieces: Vec<Pointed> = groups
            .iter()
            .map(|g| Pointed {
                curve: Curve {
                    components: g.iter().map(|&c| self.components[c].clone()).collect(),
                    singularities: Vec::new(),
                    markings: Vec::new(),
                },
                distinguished: Vec::new(),
            })
            .collect();
        for (s, sing) in self.singularities.iter().enumerate() {
            let first = piece_of[layout.branch_comp[s][0]];
            if removed[s] {
                for (b, bp) in sing.branches.iter().enumerate() {
                    let p = piece_of[layout.branch_comp[s][b]];
                    pieces[p].distinguished.push(DistinguishedPoint {
                        point: bp.clone(),
                        singularity: sing.id.clone(),
                        branch: b,
                    });
                }
            } else {
                pieces[first].curve.singularities.push(sing.clone());
            }
        }
        for (m, mk) in self.markings.iter().enumerate() {
            pieces[piece_of[layout.marking_comp[m]]]
                .curve
                .markings
                .push(mk.clone());
        }
        pieces
    }

    /// Renumbers markings to 1..n keeping their relative order.
    pub fn renumbered(&self) -> Curve {
        let mut out = self.clone();
        out.markings.sort_by_key(|m| m.index);
        for (i, m) in out.markings.iter_mut().enumerate() {
            m.index = i as u32 + 1;
        }
        out
    }
}

impl Pointed {
    pub fn new(curve: Curve) -> Self {
        Pointed {
            curve,
            distinguished: Vec::new(),
        }
    }

    /// Contracts rational components of non-positive degree whose special
    /// points are all nodes, markings or distinguished points, until none is
    /// left. A lone rational component is never contracted.
    pub fn stabilize(&self) -> Result<Pointed> {
        let mut cur = self.clone();
        for d in &cur.distinguished {
            if cur.curve.component(&d.point.component).is_none() {
                return Err(Error::Invalid(vec![Violation::UnknownComponent {
                    component: d.point.component.clone(),
                }]));
            }
        }
        while cur.contract_once() {}
        Ok(cur)
    }

    fn contract_once(&mut self) -> bool {
        #[derive(Clone, Copy)]
        enum Spot {
            Node(usize, usize),
            Mark(usize),
            Dist(usize),
        }
        for comp in &self.curve.components {
            if comp.genus != 0 {
                continue;
            }
            let id = comp.id.as_str();
            let mut spots = Vec::new();
            let mut blocked = false;
            for (s, sing) in self.curve.singularities.iter().enumerate() {
                for (b, bp) in sing.branches.iter().enumerate() {
                    if bp.component == id {
                        if !sing.k.is_node() {
                            blocked = true;
                        }
                        spots.push(Spot::Node(s, b));
                    }
                }
            }
            for (m, mk) in self.curve.markings.iter().enumerate() {
                if mk.component == id {
                    spots.push(Spot::Mark(m));
                }
            }
            for (d, dp) in self.distinguished.iter().enumerate() {
                if dp.point.component == id {
                    spots.push(Spot::Dist(d));
                }
            }
            if blocked || spots.len() > 2 {
                continue;
            }
            let nodes: Vec<(usize, usize)> = spots
                .iter()
                .filter_map(|s| match *s {
                    Spot::Node(s, b) => Some((s, b)),
                    _ => None,
                })
                .collect();
            if nodes.is_empty() || (nodes.len() == 2 && nodes[0].0 == nodes[1].0) {
                continue;
            }
            let id = id.to_string();
            let far = |sing: &Singularity, b: usize| sing.branches[1 - b].clone();
            match spots.as_slice() {
                [Spot::Node(s, b)] => {
                    let (s, _b) = (*s, *b);
                    self.curve.singularities.remove(s);
                }
                [Spot::Node(s1, b1), Spot::Node(s2, b2)] => {
                    let x = far(&self.curve.singularities[*s1], *b1);
                    let y = far(&self.curve.singularities[*s2], *b2);
                    self.curve.singularities[*s1].branches = vec![x, y];
                    self.curve.singularities.remove(*s2);
                }
                [Spot::Node(s, b), other] | [other, Spot::Node(s, b)] => {
                    let x = far(&self.curve.singularities[*s], *b);
                    match *other {
                        Spot::Mark(m) => {
                            self.curve.markings[m].component = x.component.clone();
                            self.curve.markings[m].point = x.point.clone();
                        }
                        Spot::Dist(d) => self.distinguished[d].point = x,
                        Spot::Node(..) => unreachable!(),
                    }
                    self.curve.singularities.remove(*s);
                }
                _ => continue,
            }
            self.curve.components.retain(|c| c.id != id);
            return true;
        }
        false
    }
}

/// Returns `prefix` followed by the first counter value not in `used`.
pub(crate) fn fresh_id(prefix: &str, used: &HashSet<String>) -> String {
    (0..)
        .map(|i| format!("{prefix}{i}"))
        .find(|c| !used.contains(c))
        .expect("unbounded counter")
}

/// Incremental construction of curves with generated identifiers.
#[derive(Clone, Debug, Default)]
pub struct Builder {
    curve: Curve,
    used_points: HashMap<String, HashSet<String>>,
    used_comps: HashSet<String>,
    used_sings: HashSet<String>,
}

impl Builder {
    pub fn new() -> Self {
        Builder::default()
    }

    /// Continues building on top of an existing curve.
    pub fn extend(curve: Curve) -> Self {
        let mut b = Builder {
            used_comps: curve.components.iter().map(|c| c.id.clone()).collect(),
            used_sings: curve.singularities.iter().map(|s| s.id.clone()).collect(),
            ..Builder::default()
        };
        for s in &curve.singularities {
            for bp in &s.branches {
                b.mark_used(bp);
            }
        }
        for m in &curve.markings {
            b.mark_used(&m.slot());
        }
        for c in &curve.components {
            if let Some(roles) = &c.roles {
                for p in roles.keys() {
                    b.mark_used(&BranchPoint::new(c.id.clone(), p.clone()));
                }
            }
        }
        b.curve = curve;
        b
    }

    fn mark_used(&mut self, bp: &BranchPoint) {
        self.used_points
            .entry(bp.component.clone())
            .or_default()
            .insert(bp.point.clone());
    }

    pub fn component(&mut self, genus: u32) -> String {
        let id = fresh_id("c", &self.used_comps);
        self.used_comps.insert(id.clone());
        self.curve
            .components
            .push(Component::new(id.clone(), genus));
        id
    }

    /// A fresh point id on `comp`.
    pub fn point(&mut self, comp: &str) -> BranchPoint {
        let used = self.used_points.entry(comp.to_string()).or_default();
        let id = fresh_id("p", used);
        used.insert(id.clone());
        BranchPoint::new(comp, id)
    }

    /// Adds `A_k` with one fresh branch on each listed component.
    pub fn singularity(&mut self, k: u32, comps: &[&str]) -> String {
        let branches = comps.iter().map(|c| self.point(c)).collect();
        self.singularity_at(k, branches, true)
    }

    pub fn singularity_at(
        &mut self,
        k: u32,
        branches: Vec<BranchPoint>,
        equivariant: bool,
    ) -> String {
        for bp in &branches {
            self.mark_used(bp);
        }
        let id = fresh_id("s", &self.used_sings);
        self.used_sings.insert(id.clone());
        self.curve.singularities.push(Singularity {
            id: id.clone(),
            k: SingularityType::new(k).expect("k >= 1"),
            branches,
            equivariant,
        });
        id
    }

    pub fn marking(&mut self, comp: &str) -> BranchPoint {
        let bp = self.point(comp);
        self.marking_at(bp.clone());
        bp
    }

    pub fn marking_at(&mut self, bp: BranchPoint) -> u32 {
        self.mark_used(&bp);
        let index = self
            .curve
            .markings
            .iter()
            .map(|m| m.index)
            .max()
            .unwrap_or(0)
            + 1;
        self.curve.markings.push(Marking {
            index,
            component: bp.component,
            point: bp.point,
        });
        index
    }

    pub fn marking_with_index(&mut self, bp: BranchPoint, index: u32) {
        self.mark_used(&bp);
        self.curve.markings.push(Marking {
            index,
            component: bp.component,
            point: bp.point,
        });
    }

    pub fn set_role(&mut self, bp: &BranchPoint, role: Role) {
        if let Some(c) = self
            .curve
            .components
            .iter_mut()
            .find(|c| c.id == bp.component)
        {
            c.roles
                .get_or_insert_with(BTreeMap::new)
                .insert(bp.point.clone(), role);
        }
    }

    pub fn set_hyperelliptic(&mut self, comp: &str) {
        if let Some(c) = self.curve.components.iter_mut().find(|c| c.id == comp) {
            c.roles.get_or_insert_with(BTreeMap::new);
        }
    }

    pub fn set_equivariant_all(&mut self, value: bool) {
        for s in &mut self.curve.singularities {
            s.equivariant = value;
        }
    }

    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    pub fn build(self) -> Curve {
        self.curve
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn even_atom(h: u32) -> Curve {
        let mut b = Builder::new();
        let c = b.component(0);
        b.singularity(2 * h, &[&c]);
        b.build()
    }

    fn odd_atom(h: u32) -> Curve {
        let mut b = Builder::new();
        let x = b.component(0);
        let y = b.component(0);
        b.singularity(2 * h + 1, &[&x, &y]);
        b.build()
    }

    fn banana() -> Curve {
        let mut b = Builder::new();
        let x = b.component(0);
        let y = b.component(0);
        b.singularity(1, &[&x, &y]);
        b.singularity(1, &[&x, &y]);
        b.build()
    }

    #[test]
    fn severity_and_branches() {
        let t = SingularityType::new(4).unwrap();
        assert_eq!(
            (t.branch_count(), t.severity(), t.branch_weight()),
            (1, 2, 4)
        );
        let t = SingularityType::new(5).unwrap();
        assert_eq!(
            (t.branch_count(), t.severity(), t.branch_weight()),
            (2, 2, 3)
        );
        assert_eq!(SingularityType::new(1).unwrap().branch_weight(), 1);
        assert!(SingularityType::new(0).is_err());
    }

    #[test]
    fn validate_examples() {
        assert!(even_atom(2).is_valid());

        let mut b = Builder::new();
        let x = b.component(0);
        let y = b.component(0);
        let z = b.component(1);
        b.singularity(3, &[&x, &y]);
        b.marking(&z);
        assert!(b.build().validate().contains(&Violation::Disconnected));

        let mut c = even_atom(2);
        c.singularities[0]
            .branches
            .push(BranchPoint::new("c0", "q"));
        assert!(matches!(
            c.validate()[0],
            Violation::BadBranchCount {
                expected: 1,
                found: 2,
                ..
            }
        ));
    }

    #[test]
    fn validate_slots_and_pairs() {
        let mut c = odd_atom(1);
        c.markings.push(Marking {
            index: 1,
            component: "c0".into(),
            point: "p0".into(),
        });
        assert!(c
            .validate()
            .iter()
            .any(|v| matches!(v, Violation::DuplicateSlot { .. })));

        let mut c = odd_atom(1);
        let mut roles = BTreeMap::new();
        roles.insert("p0".to_string(), Role::Conjugate("a".into()));
        c.components[0].roles = Some(roles);
        assert!(c
            .validate()
            .iter()
            .any(|v| matches!(v, Violation::BadConjugatePair { .. })));

        let c = Curve {
            components: vec![Component::new("x", 0)],
            ..Curve::default()
        };
        assert!(c.validate().contains(&Violation::EmptyRationalComponent {
            component: "x".into()
        }));
    }

    #[test]
    fn genus_examples() {
        for h in 1..5 {
            assert_eq!(even_atom(h).arithmetic_genus().unwrap(), h);
            assert_eq!(odd_atom(h).arithmetic_genus().unwrap(), h);
        }
        assert_eq!(banana().arithmetic_genus().unwrap(), 1);
        let mut b = Builder::new();
        let x = b.component(0);
        let y = b.component(0);
        b.singularity(3, &[&x, &y]);
        b.singularity(3, &[&x, &y]);
        assert_eq!(b.build().arithmetic_genus().unwrap(), 3);
    }

    #[test]
    fn prestable_examples() {
        let c = even_atom(2);
        assert!(c.is_prestable(4).unwrap());
        assert!(!c.is_prestable(3).unwrap());
        assert!(banana().is_prestable(1).unwrap());
    }

    #[test]
    fn stability_of_atoms() {
        for h in 1..5 {
            assert_eq!(even_atom(h).is_stable(2 * h).unwrap(), h >= 2);
            assert_eq!(odd_atom(h).is_stable(2 * h + 1).unwrap(), h >= 2);
            let mut c = odd_atom(h);
            c.markings = vec![
                Marking {
                    index: 1,
                    component: "c0".into(),
                    point: "m".into(),
                },
                Marking {
                    index: 2,
                    component: "c1".into(),
                    point: "m".into(),
                },
            ];
            assert!(c.is_stable(2 * h + 1).unwrap());
        }
        let mut b = Builder::new();
        let c = b.component(0);
        for _ in 0..3 {
            b.marking(&c);
        }
        assert!(b.build().is_stable(1).unwrap());
        assert!(matches!(
            even_atom(2).is_stable(3),
            Err(Error::NotPrestable(3))
        ));
    }

    #[test]
    fn normalization_examples() {
        let pieces = odd_atom(2).partial_normalization(&["s0"]).unwrap();
        assert_eq!(pieces.len(), 2);
        assert!(pieces.iter().all(|p| p.distinguished.len() == 1));

        let pieces = banana().partial_normalization(&["s0"]).unwrap();
        assert_eq!(pieces.len(), 1);
        assert_eq!(pieces[0].distinguished.len(), 2);
        assert_eq!(pieces[0].curve.arithmetic_genus().unwrap(), 0);

        let pieces = even_atom(3).partial_normalization(&["s0"]).unwrap();
        assert_eq!(pieces.len(), 1);
        assert_eq!(pieces[0].curve.components[0].genus, 0);
        assert!(pieces[0].curve.singularities.is_empty());
        assert!(matches!(
            banana().partial_normalization(&["nope"]),
            Err(Error::UnknownSingularity(_))
        ));
    }

    #[test]
    fn stabilize_relocates_and_contracts() {
        // genus-1 component with a rational sprout carrying a distinguished point
        let mut b = Builder::new();
        let e = b.component(1);
        let r1 = b.component(0);
        let r2 = b.component(0);
        b.singularity(1, &[&e, &r1]);
        b.singularity(1, &[&r1, &r2]);
        let q = b.point(&r2);
        let curve = b.build();
        let pointed = Pointed {
            curve,
            distinguished: vec![DistinguishedPoint {
                point: q,
                singularity: "x".into(),
                branch: 0,
            }],
        };
        let st = pointed.stabilize().unwrap();
        assert_eq!(st.curve.components.len(), 1);
        assert_eq!(st.distinguished[0].point.component, e);
        assert_eq!(st.stabilize().unwrap(), st);

        let stable = Pointed::new(even_atom(3));
        assert_eq!(stable.stabilize().unwrap(), stable);
    }

    #[test]
    fn json_roundtrip_and_strictness() {
        let text = r#"{"components":[{"id":"a","genus":2,"roles":{"x":"weierstrass","y":{"conjugate":"p"},"z":{"conjugate":"p"}}}],
            "singularities":[],"markings":[{"index":1,"component":"a","point":"x"}]}"#;
        let c = Curve::from_json(text).unwrap();
        assert_eq!(
            c.component("a").unwrap().role("y"),
            Some(&Role::Conjugate("p".into()))
        );
        assert_eq!(Curve::from_json(&c.to_json()).unwrap(), c);
        let bad = r#"{"components":[{"id":"a","genus":0,"colour":1}],"singularities":[]}"#;
        assert!(Curve::from_json(bad).is_err());
        let bad_k = r#"{"components":[{"id":"a","genus":0}],"singularities":[{"id":"s","k":0,"branches":[]}]}"#;
        assert!(Curve::from_json(bad_k).is_err());
        let default_flag = r#"{"components":[{"id":"a","genus":0}],"singularities":[{"id":"s","k":4,"branches":[{"component":"a","point":"q"}]}]}"#;
        assert!(Curve::from_json(default_flag).unwrap().singularities[0].equivariant);
    }
}
