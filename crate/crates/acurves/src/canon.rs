//! Canonical forms of decorated curves up to isomorphism, by
//! individualization and refinement on a vertex-colored incidence graph.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::curve::{BranchPoint, Component, Curve, Dsu, Marking, Role, Singularity};
use crate::error::Result;

/// Byte string equal for two curves exactly when they are isomorphic as
/// decorated curves (markings labelled, everything else unlabelled).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CanonicalForm(pub Vec<u8>);

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Vertex {
    Comp(usize),
    Point(usize, usize),
    Sing(usize),
    Mark(usize),
}

struct Graph {
    vertices: Vec<Vertex>,
    base: Vec<Vec<u32>>,
    adj: Vec<Vec<usize>>,
    /// Point ids per component, including points known only from roles.
    point_ids: Vec<Vec<String>>,
}

fn role_code(role: Option<&Role>) -> u32 {
    match role {
        None => 0,
        Some(Role::Weierstrass) => 1,
        Some(Role::Free) => 2,
        Some(Role::Conjugate(_)) => 3,
    }
}

fn build(curve: &Curve) -> Graph {
    let comp_index: HashMap<&str, usize> = curve
        .components
        .iter()
        .enumerate()
        .map(|(i, c)| (c.id.as_str(), i))
        .collect();
    let mut point_ids: Vec<Vec<String>> = vec![Vec::new(); curve.components.len()];
    let add_point = |bp: &BranchPoint, ids: &mut Vec<Vec<String>>| {
        let c = comp_index[bp.component.as_str()];
        if !ids[c].contains(&bp.point) {
            ids[c].push(bp.point.clone());
        }
    };
    for s in &curve.singularities {
        for bp in &s.branches {
            add_point(bp, &mut point_ids);
        }
    }
    for m in &curve.markings {
        add_point(&m.slot(), &mut point_ids);
    }
    for c in &curve.components {
        if let Some(roles) = &c.roles {
            for p in roles.keys() {
                add_point(&BranchPoint::new(c.id.clone(), p.clone()), &mut point_ids);
            }
        }
    }
    for ids in &mut point_ids {
        ids.sort();
    }

    let mut vertices = Vec::new();
    let mut base = Vec::new();
    let mut index: HashMap<(usize, &str), usize> = HashMap::new();
    for (c, comp) in curve.components.iter().enumerate() {
        vertices.push(Vertex::Comp(c));
        // genus 2 is hyperelliptic whether or not roles are given
        base.push(vec![
            0,
            comp.genus,
            u32::from(comp.roles.is_some() || comp.genus == 2),
        ]);
    }
    for (c, comp) in curve.components.iter().enumerate() {
        for (p, id) in point_ids[c].iter().enumerate() {
            index.insert((c, id.as_str()), vertices.len());
            vertices.push(Vertex::Point(c, p));
            base.push(vec![1, role_code(comp.role(id))]);
        }
    }
    for (s, sing) in curve.singularities.iter().enumerate() {
        vertices.push(Vertex::Sing(s));
        base.push(vec![2, sing.k.k(), u32::from(sing.effective_equivariant())]);
    }
    for (m, mk) in curve.markings.iter().enumerate() {
        vertices.push(Vertex::Mark(m));
        base.push(vec![3, mk.index]);
    }
    let mut adj = vec![Vec::new(); vertices.len()];
    let link = |a: usize, b: usize, adj: &mut Vec<Vec<usize>>| {
        adj[a].push(b);
        adj[b].push(a);
    };
    let point_vertex =
        |bp: &BranchPoint| index[&(comp_index[bp.component.as_str()], bp.point.as_str())];
    for (v, vx) in vertices.iter().enumerate() {
        match *vx {
            Vertex::Point(c, _) => link(c, v, &mut adj),
            Vertex::Sing(s) => {
                for bp in &curve.singularities[s].branches {
                    link(v, point_vertex(bp), &mut adj);
                }
            }
            Vertex::Mark(m) => link(v, point_vertex(&curve.markings[m].slot()), &mut adj),
            Vertex::Comp(_) => {}
        }
    }
    for (c, comp) in curve.components.iter().enumerate() {
        let mut pairs: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        if let Some(roles) = &comp.roles {
            for (p, role) in roles {
                if let Role::Conjugate(tag) = role {
                    pairs
                        .entry(tag.as_str())
                        .or_default()
                        .push(index[&(c, p.as_str())]);
                }
            }
        }
        for members in pairs.values() {
            for i in 0..members.len() {
                for j in i + 1..members.len() {
                    link(members[i], members[j], &mut adj);
                }
            }
        }
    }
    Graph {
        vertices,
        base,
        adj,
        point_ids,
    }
}

/// Equitable refinement: colors are replaced by the rank of
/// (color, sorted neighbour colors) until the partition stabilizes.
fn refine(adj: &[Vec<usize>], colors: &mut [u32]) {
    let n = colors.len();
    let mut classes = count_classes(colors);
    let mut flat: Vec<u32> = Vec::new();
    let mut span = vec![(0usize, 0usize); n];
    let mut order: Vec<usize> = (0..n).collect();
    let mut next = vec![0u32; n];
    loop {
        flat.clear();
        for v in 0..n {
            let start = flat.len();
            flat.push(colors[v]);
            flat.extend(adj[v].iter().map(|&u| colors[u]));
            flat[start + 1..].sort_unstable();
            span[v] = (start, flat.len());
        }
        let sig = |v: usize| &flat[span[v].0..span[v].1];
        order.sort_unstable_by(|&a, &b| sig(a).cmp(sig(b)));
        let mut rank = 0;
        for (i, &v) in order.iter().enumerate() {
            if i > 0 && sig(order[i - 1]) != sig(v) {
                rank += 1;
            }
            next[v] = rank;
        }
        colors.copy_from_slice(&next);
        let now = rank as usize + 1;
        if now == classes {
            return;
        }
        classes = now;
    }
}

fn count_classes(colors: &[u32]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

fn certificate(g: &Graph, labels: &[u32]) -> Vec<u32> {
    let n = labels.len();
    let mut order = vec![0usize; n];
    for (v, &l) in labels.iter().enumerate() {
        order[l as usize] = v;
    }
    let mut cert = Vec::new();
    for &v in &order {
        cert.extend(&g.base[v]);
        cert.push(u32::MAX);
        let mut nb: Vec<u32> = g.adj[v].iter().map(|&u| labels[u]).collect();
        nb.sort_unstable();
        cert.extend(nb);
        cert.push(u32::MAX - 1);
    }
    cert
}

struct Search<'a> {
    g: &'a Graph,
    best: Option<(Vec<u32>, Vec<u32>)>,
    /// Automorphisms found from leaves with equal certificates.
    autos: Vec<Vec<usize>>,
    path: Vec<usize>,
}

impl Search<'_> {
    fn leaf(&mut self, colors: Vec<u32>) {
        let cert = certificate(self.g, &colors);
        match &self.best {
            Some((b, labels)) if cert == *b => {
                let mut of_label = vec![0usize; labels.len()];
                for (v, &l) in labels.iter().enumerate() {
                    of_label[l as usize] = v;
                }
                let auto: Vec<usize> = colors.iter().map(|&l| of_label[l as usize]).collect();
                self.autos.push(auto);
            }
            Some((b, _)) if cert > *b => {}
            _ => self.best = Some((cert, colors)),
        }
    }

    /// Orbits of the automorphisms found so far that fix the current path.
    fn orbits(&self, n: usize) -> Dsu {
        let mut dsu = Dsu::new(n);
        for auto in &self.autos {
            if self.path.iter().all(|&v| auto[v] == v) {
                for (v, &w) in auto.iter().enumerate() {
                    dsu.union(v, w);
                }
            }
        }
        dsu
    }

    fn run(&mut self, mut colors: Vec<u32>) {
        refine(&self.g.adj, &mut colors);
        let n = colors.len();
        let mut size = vec![0usize; n];
        for &c in &colors {
            size[c as usize] += 1;
        }
        let Some(target) = (0..n).find(|&c| size[c] > 1) else {
            self.leaf(colors);
            return;
        };
        let target = target as u32;
        let mut explored: Vec<usize> = Vec::new();
        for v in 0..n {
            if colors[v] != target {
                continue;
            }
            if !explored.is_empty() {
                let mut orbits = self.orbits(n);
                if explored.iter().any(|&u| orbits.find(u) == orbits.find(v)) {
                    continue;
                }
            }
            explored.push(v);
            let next: Vec<u32> = colors
                .iter()
                .enumerate()
                .map(|(u, &c)| {
                    if c > target || (c == target && u != v) {
                        c + 1
                    } else {
                        c
                    }
                })
                .collect();
            self.path.push(v);
            self.run(next);
            self.path.pop();
        }
    }
}

fn initial_colors(g: &Graph) -> Vec<u32> {
    let mut sorted: Vec<&Vec<u32>> = g.base.iter().collect();
    sorted.sort();
    sorted.dedup();
    g.base
        .iter()
        .map(|b| sorted.binary_search(&b).expect("present") as u32)
        .collect()
}

fn labelling(curve: &Curve) -> (Graph, Vec<u32>, Vec<u32>) {
    let g = build(curve);
    let colors = initial_colors(&g);
    let mut search = Search {
        g: &g,
        best: None,
        autos: Vec::new(),
        path: Vec::new(),
    };
    search.run(colors);
    let (cert, labels) = search.best.expect("search reaches a leaf");
    (g, cert, labels)
}

fn to_bytes(cert: &[u32]) -> CanonicalForm {
    CanonicalForm(cert.iter().flat_map(|x| x.to_be_bytes()).collect())
}

pub fn canonical_form(curve: &Curve) -> Result<CanonicalForm> {
    curve.checked()?;
    let (_, cert, _) = labelling(curve);
    Ok(to_bytes(&cert))
}

/// Canonical form together with the canonically relabelled curve: components
/// `c0, c1, ...`, singularities `s0, ...`, points `p0, ...` per component and
/// conjugate pairs `h0, ...`.
pub fn canonicalize(curve: &Curve) -> Result<(CanonicalForm, Curve)> {
    curve.checked()?;
    let (g, cert, labels) = labelling(curve);
    let mut comps: Vec<(u32, usize)> = Vec::new();
    let mut sings: Vec<(u32, usize)> = Vec::new();
    let mut points: Vec<Vec<(u32, usize)>> = vec![Vec::new(); curve.components.len()];
    let mut marks: Vec<usize> = Vec::new();
    for (v, vx) in g.vertices.iter().enumerate() {
        match *vx {
            Vertex::Comp(c) => comps.push((labels[v], c)),
            Vertex::Sing(s) => sings.push((labels[v], s)),
            Vertex::Point(c, p) => points[c].push((labels[v], p)),
            Vertex::Mark(m) => marks.push(m),
        }
    }
    comps.sort_unstable();
    sings.sort_unstable();
    let mut comp_name = vec![String::new(); curve.components.len()];
    for (i, &(_, c)) in comps.iter().enumerate() {
        comp_name[c] = format!("c{i}");
    }
    let mut point_name: Vec<HashMap<&str, String>> = vec![HashMap::new(); curve.components.len()];
    let mut point_label: HashMap<(usize, &str), u32> = HashMap::new();
    for (c, list) in points.iter_mut().enumerate() {
        list.sort_unstable();
        for (i, &(l, p)) in list.iter().enumerate() {
            let id = g.point_ids[c][p].as_str();
            point_name[c].insert(id, format!("p{i}"));
            point_label.insert((c, id), l);
        }
    }
    let comp_index: HashMap<&str, usize> = curve
        .components
        .iter()
        .enumerate()
        .map(|(i, c)| (c.id.as_str(), i))
        .collect();
    let rename = |bp: &BranchPoint| {
        let c = comp_index[bp.component.as_str()];
        BranchPoint::new(
            comp_name[c].clone(),
            point_name[c][bp.point.as_str()].clone(),
        )
    };
    let label_of = |bp: &BranchPoint| {
        let c = comp_index[bp.component.as_str()];
        point_label[&(c, bp.point.as_str())]
    };

    // conjugate pair tags, numbered by the smallest point label in the pair
    let mut tags: Vec<(u32, usize, String)> = Vec::new();
    for (c, comp) in curve.components.iter().enumerate() {
        if let Some(roles) = &comp.roles {
            let mut firsts: BTreeMap<&str, u32> = BTreeMap::new();
            for (p, role) in roles {
                if let Role::Conjugate(tag) = role {
                    let l = point_label[&(c, p.as_str())];
                    let e = firsts.entry(tag.as_str()).or_insert(l);
                    *e = (*e).min(l);
                }
            }
            for (tag, l) in firsts {
                tags.push((l, c, tag.to_string()));
            }
        }
    }
    tags.sort();
    let tag_name: HashMap<(usize, String), String> = tags
        .into_iter()
        .enumerate()
        .map(|(i, (_, c, t))| ((c, t), format!("h{i}")))
        .collect();

    let mut out = Curve::default();
    for &(_, c) in &comps {
        let comp = &curve.components[c];
        let roles = comp.roles.as_ref().map(|roles| {
            roles
                .iter()
                .map(|(p, role)| {
                    let role = match role {
                        Role::Conjugate(t) => Role::Conjugate(tag_name[&(c, t.clone())].clone()),
                        other => other.clone(),
                    };
                    (point_name[c][p.as_str()].clone(), role)
                })
                .collect()
        });
        out.components.push(Component {
            id: comp_name[c].clone(),
            genus: comp.genus,
            roles,
        });
    }
    for (i, &(_, s)) in sings.iter().enumerate() {
        let sing = &curve.singularities[s];
        let mut branches: Vec<&BranchPoint> = sing.branches.iter().collect();
        branches.sort_by_key(|bp| label_of(bp));
        out.singularities.push(Singularity {
            id: format!("s{i}"),
            k: sing.k,
            branches: branches.into_iter().map(rename).collect(),
            equivariant: sing.effective_equivariant(),
        });
    }
    marks.sort_by_key(|&m| curve.markings[m].index);
    for m in marks {
        let mk = &curve.markings[m];
        let bp = rename(&mk.slot());
        out.markings.push(Marking {
            index: mk.index,
            component: bp.component,
            point: bp.point,
        });
    }
    Ok((to_bytes(&cert), out))
}

pub fn isomorphic(a: &Curve, b: &Curve) -> Result<bool> {
    Ok(canonical_form(a)? == canonical_form(b)?)
}
