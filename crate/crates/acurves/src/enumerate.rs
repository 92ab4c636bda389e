//! Exhaustive enumeration of stable combinatorial types at small genus.

use std::collections::BTreeMap;

use crate::canon::{self, CanonicalForm};
use crate::curve::{Builder, Curve, Layout, PointKind, Role};
use crate::error::{Error, Result};

pub const MAX_GENUS: u32 = 6;
pub const MAX_MARKINGS: u32 = 6;
pub const MAX_COMPONENTS: u32 = 8;
const MAX_CANDIDATES: usize = 20_000_000;

#[derive(Clone, Copy, Debug)]
enum Item {
    /// `A_{2h}` on one component.
    Even { u: usize, h: u32 },
    /// `A_{2h+1}` between two components (equal for a loop).
    Odd { u: usize, v: usize, h: u32 },
}

impl Item {
    fn cost(self) -> u32 {
        match self {
            Item::Even { h, .. } => h,
            Item::Odd { h, .. } => h + 1,
        }
    }

    fn first(self) -> usize {
        match self {
            Item::Even { u, .. } | Item::Odd { u, .. } => u,
        }
    }

    fn add_weights(self, deg: &mut [i64], sign: i64) {
        match self {
            Item::Even { u, h } => deg[u] += sign * 2 * i64::from(h),
            Item::Odd { u, v, h } => {
                deg[u] += sign * (i64::from(h) + 1);
                deg[v] += sign * (i64::from(h) + 1);
            }
        }
    }
}

struct Search<'a> {
    items: &'a [Item],
    counts: Vec<u32>,
    deg: Vec<i64>,
    out: Vec<Vec<u32>>,
    visited: usize,
    /// Chosen joins between distinct components.
    joins: Vec<(usize, usize)>,
}

impl Search<'_> {
    fn deficit(&self, from: usize) -> i64 {
        self.deg[from..].iter().map(|&d| (1 - d).max(0)).sum()
    }

    /// Components before `closed_upto` receive no further items, so a piece
    /// made only of them must already be everything; other pieces each
    /// need a join costing at least one.
    fn can_connect(&self, closed_upto: usize, budget: u32) -> bool {
        let c = self.deg.len();
        let mut root = [0usize; MAX_COMPONENTS as usize];
        for (i, r) in root.iter_mut().enumerate().take(c) {
            *r = i;
        }
        fn find(root: &mut [usize], mut x: usize) -> usize {
            while root[x] != x {
                x = root[x];
            }
            x
        }
        for &(u, v) in &self.joins {
            let (a, b) = (find(&mut root, u), find(&mut root, v));
            root[a.max(b)] = a.min(b);
        }
        // a root's piece is closed when its largest member is closed
        let mut largest = [0usize; MAX_COMPONENTS as usize];
        let mut pieces = 0u32;
        for x in 0..c {
            let r = find(&mut root, x);
            if r == x {
                pieces += 1;
            }
            largest[r] = largest[r].max(x);
        }
        if pieces == 1 {
            return true;
        }
        if (0..c).any(|x| find(&mut root, x) == x && largest[x] < closed_upto) {
            return false;
        }
        pieces - 1 <= budget
    }

    fn run(&mut self, idx: usize, budget: u32) -> Result<()> {
        self.visited += 1;
        if self.visited > MAX_CANDIDATES {
            return Err(Error::ResourceBound(format!(
                "more than {MAX_CANDIDATES} search states"
            )));
        }
        let closed_upto = self.items.get(idx).map_or(self.deg.len(), |it| it.first());
        if self.deg[..closed_upto].iter().any(|&d| d < 1) {
            return Ok(());
        }
        if self.deficit(closed_upto) > 2 * i64::from(budget) {
            return Ok(());
        }
        if !self.can_connect(closed_upto, budget) {
            return Ok(());
        }
        if idx == self.items.len() {
            if budget == 0 {
                self.out.push(self.counts.clone());
            }
            return Ok(());
        }
        let item = self.items[idx];
        let cost = item.cost();
        let join = match item {
            Item::Odd { u, v, .. } if u != v => Some((u, v)),
            _ => None,
        };
        let mut mult = 0;
        loop {
            self.run(idx + 1, budget - mult * cost)?;
            if (mult + 1) * cost > budget {
                break;
            }
            mult += 1;
            item.add_weights(&mut self.deg, 1);
            self.counts[idx] = mult;
            if let Some(j) = join {
                self.joins.push(j);
            }
        }
        for _ in 0..mult {
            item.add_weights(&mut self.deg, -1);
            if join.is_some() {
                self.joins.pop();
            }
        }
        self.counts[idx] = 0;
        Ok(())
    }
}

fn genus_vectors(c: usize, total: u32, max: u32) -> Vec<Vec<u32>> {
    if c == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in (0..=max.min(total)).rev() {
        for mut rest in genus_vectors(c - 1, total - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn items_for(c: usize, r: u32) -> Vec<Item> {
    let mut items = Vec::new();
    for u in 0..c {
        for h in 1..=r / 2 {
            items.push(Item::Even { u, h });
        }
        for v in u..c {
            for h in 0..=(r - 1) / 2 {
                items.push(Item::Odd { u, v, h });
            }
        }
    }
    items
}

fn marking_assignments(c: usize, n: u32) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|a: Vec<usize>| {
                (0..c).map(move |u| {
                    let mut b = a.clone();
                    b.push(u);
                    b
                })
            })
            .collect();
    }
    out
}

/// Swaps of adjacent unmarked components of equal genus whose item
/// permutations are checked against the lex-leader condition.
fn swaps(genera: &[u32], marks: &[usize], items: &[Item]) -> Vec<Vec<usize>> {
    let index: BTreeMap<(u8, usize, usize, u32), usize> = items
        .iter()
        .enumerate()
        .map(|(i, it)| (item_key(*it), i))
        .collect();
    let marked = |u: usize| marks.contains(&u);
    let mut out = Vec::new();
    for i in 1..genera.len() {
        if genera[i] != genera[i - 1] || marked(i) || marked(i - 1) {
            continue;
        }
        let swap = |u: usize| {
            if u == i {
                i - 1
            } else if u == i - 1 {
                i
            } else {
                u
            }
        };
        let perm = items
            .iter()
            .map(|&it| {
                let image = match it {
                    Item::Even { u, h } => Item::Even { u: swap(u), h },
                    Item::Odd { u, v, h } => {
                        let (a, b) = (swap(u), swap(v));
                        Item::Odd {
                            u: a.min(b),
                            v: a.max(b),
                            h,
                        }
                    }
                };
                index[&item_key(image)]
            })
            .collect();
        out.push(perm);
    }
    out
}

fn item_key(it: Item) -> (u8, usize, usize, u32) {
    match it {
        Item::Even { u, h } => (0, u, u, h),
        Item::Odd { u, v, h } => (1, u, v, h),
    }
}

/// Whether `counts` is lexicographically at least its image under `perm`.
fn is_leader(counts: &[u32], perm: &[usize]) -> bool {
    let mut image = vec![0; counts.len()];
    for (i, &j) in perm.iter().enumerate() {
        image[j] = counts[i];
    }
    counts >= image.as_slice()
}

/// Components of equal genus are interchangeable, so only assignments whose
/// smallest marking per component increases along each block are kept
/// (unmarked components last).
fn sorted_within_blocks(genera: &[u32], marks: &[usize]) -> bool {
    let mut first = vec![usize::MAX; genera.len()];
    for (m, &u) in marks.iter().enumerate() {
        first[u] = first[u].min(m);
    }
    (1..genera.len()).all(|i| genera[i] != genera[i - 1] || first[i - 1] <= first[i])
}

fn build_curve(genera: &[u32], marks: &[usize], items: &[Item], counts: &[u32]) -> Curve {
    let mut b = Builder::new();
    let comps: Vec<String> = genera.iter().map(|&g| b.component(g)).collect();
    for (item, &m) in items.iter().zip(counts) {
        for _ in 0..m {
            match *item {
                Item::Even { u, h } => {
                    b.singularity(2 * h, &[&comps[u]]);
                }
                Item::Odd { u, v, h } => {
                    b.singularity(2 * h + 1, &[&comps[u], &comps[v]]);
                }
            }
        }
    }
    for &u in marks {
        b.marking(&comps[u]);
    }
    b.build()
}

/// Whether patterns inspect the roles of this component: genus at least two
/// and at most two points, all markings or non-loop odd branches.
pub(crate) fn roles_inspected(curve: &Curve, layout: &Layout, c: usize) -> bool {
    let pts = &layout.points[c];
    curve.components[c].genus >= 2
        && pts.len() <= 2
        && pts.iter().all(|p| match p.kind {
            PointKind::Marking(_) => true,
            PointKind::Branch { sing, .. } => {
                !curve.singularities[sing].k.is_even() && !layout.is_loop(sing)
            }
        })
}

/// Role decorations worth distinguishing on one component.
pub(crate) fn role_variants(
    curve: &Curve,
    layout: &Layout,
    c: usize,
) -> Vec<Option<BTreeMap<String, Role>>> {
    let comp = &curve.components[c];
    if comp.genus < 2 {
        return vec![None];
    }
    let pts = &layout.points[c];
    let mut out = Vec::new();
    let roles = |list: &[(&str, Role)]| -> Option<BTreeMap<String, Role>> {
        Some(
            list.iter()
                .map(|(p, r)| (p.to_string(), r.clone()))
                .collect(),
        )
    };
    if roles_inspected(curve, layout, c) {
        match pts.as_slice() {
            [] => out.push(roles(&[])),
            [p] => {
                out.push(roles(&[(&p.id, Role::Weierstrass)]));
                out.push(roles(&[(&p.id, Role::Free)]));
            }
            [p, q] => {
                let pair = Role::Conjugate("h0".into());
                out.push(roles(&[(&p.id, pair.clone()), (&q.id, pair)]));
                out.push(roles(&[(&p.id, Role::Free), (&q.id, Role::Free)]));
            }
            _ => unreachable!(),
        }
        if comp.genus >= 3 {
            out.push(None);
        }
    } else if comp.genus == 2 {
        out.push(roles(&[]));
    } else {
        out.push(None);
    }
    out
}

fn decorations(curve: &Curve) -> Vec<Curve> {
    let layout = Layout::new(curve);
    let mut out = vec![curve.clone()];
    for c in 0..curve.components.len() {
        let variants = role_variants(curve, &layout, c);
        out = out
            .into_iter()
            .flat_map(|base| {
                variants.iter().map(move |v| {
                    let mut x = base.clone();
                    x.components[c].roles = v.clone();
                    x
                })
            })
            .collect();
    }
    if curve.singularities.iter().any(|s| s.k.k() >= 2) {
        let flipped: Vec<Curve> = out
            .iter()
            .map(|x| {
                let mut y = x.clone();
                for s in &mut y.singularities {
                    if s.k.k() >= 2 {
                        s.equivariant = false;
                    }
                }
                y
            })
            .collect();
        out.extend(flipped);
    }
    out
}

/// All stable decorated types of genus `g` with `n` markings and
/// singularities up to `A_r`, with at most `max_components` components,
/// canonically labelled and sorted by canonical form.
pub fn enumerate_types(g: u32, n: u32, r: u32, max_components: u32) -> Result<Vec<Curve>> {
    Ok(enumerate_keyed(g, n, r, max_components)?
        .into_values()
        .collect())
}

pub fn enumerate_keyed(
    g: u32,
    n: u32,
    r: u32,
    max_components: u32,
) -> Result<BTreeMap<CanonicalForm, Curve>> {
    if g > MAX_GENUS || n > MAX_MARKINGS || max_components > MAX_COMPONENTS {
        return Err(Error::ResourceBound(format!(
            "enumeration is capped at g <= {MAX_GENUS}, n <= {MAX_MARKINGS}, {MAX_COMPONENTS} components"
        )));
    }
    if r == 0 {
        return Err(Error::InvalidArgument("r must be positive".into()));
    }
    let mut types = BTreeMap::new();
    let total_degree = 2 * i64::from(g) - 2 + i64::from(n);
    if total_degree <= 0 {
        return Ok(types);
    }
    let max_c = (max_components as i64).min(total_degree) as usize;
    for c in 1..=max_c {
        let items = items_for(c, r);
        for genera in genus_vectors(c, g, g) {
            let budget = g as i64 + c as i64 - 1 - genera.iter().map(|&x| x as i64).sum::<i64>();
            if budget < 0 {
                continue;
            }
            let budget = budget as u32;
            for marks in marking_assignments(c, n) {
                if !sorted_within_blocks(&genera, &marks) {
                    continue;
                }
                let mut deg: Vec<i64> = genera.iter().map(|&x| 2 * i64::from(x) - 2).collect();
                for &u in &marks {
                    deg[u] += 1;
                }
                let mut search = Search {
                    items: &items,
                    counts: vec![0; items.len()],
                    deg,
                    out: Vec::new(),
                    visited: 0,
                    joins: Vec::new(),
                };
                search.run(0, budget)?;
                let swaps = swaps(&genera, &marks, &items);
                for counts in search.out {
                    if !swaps.iter().all(|p| is_leader(&counts, p)) {
                        continue;
                    }
                    let base = build_curve(&genera, &marks, &items, &counts);
                    if !base.is_valid() || !base.is_stable(r)? {
                        continue;
                    }
                    for curve in decorations(&base) {
                        let (key, canon) = canon::canonicalize(&curve)?;
                        types.entry(key).or_insert(canon);
                    }
                }
            }
        }
    }
    Ok(types)
}
