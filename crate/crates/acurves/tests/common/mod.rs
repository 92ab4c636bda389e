//! Test-side oracles, written independently of the library internals.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use rand::seq::SliceRandom;
use rand::Rng;

use acurves::{enumerate, Curve, Role};

/// Stable types of genus `g` with `n` markings, singularities up to
/// `A_{2g+1}` and at most `max_components` components. Cached per process.
pub fn census(g: u32, n: u32, max_components: u32) -> Arc<Vec<Curve>> {
    type Cache = Mutex<HashMap<(u32, u32, u32), Arc<Vec<Curve>>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().unwrap().get(&(g, n, max_components)) {
        return hit.clone();
    }
    let types =
        Arc::new(enumerate::enumerate_types(g, n, 2 * g + 1, max_components).expect("enumeration"));
    cache
        .lock()
        .unwrap()
        .insert((g, n, max_components), types.clone());
    types
}

/// Types of the census that are prestable for `r`.
pub fn up_to(types: &[Curve], r: u32) -> Vec<&Curve> {
    types.iter().filter(|c| c.max_k() <= r).collect()
}

/// Arithmetic genus by peeling singularities one at a time with the three
/// case rules, over every order: a subset DP over the kept singularities
/// where every peel from a subset must give the same value. Returns `None`
/// if two orders disagree.
pub fn peeling_genus(curve: &Curve) -> Option<u32> {
    let comp: HashMap<&str, usize> = curve
        .components
        .iter()
        .enumerate()
        .map(|(i, c)| (c.id.as_str(), i))
        .collect();
    let sings: Vec<(u32, Vec<usize>)> = curve
        .singularities
        .iter()
        .map(|s| {
            (
                s.k.k(),
                s.branches
                    .iter()
                    .map(|b| comp[b.component.as_str()])
                    .collect(),
            )
        })
        .collect();
    let m = sings.len();
    assert!(m < 24, "too many singularities for the oracle");
    let pieces = |mask: usize| -> usize {
        let mut parent: Vec<usize> = (0..curve.components.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                x = p[x];
            }
            x
        }
        let mut count = parent.len();
        for (i, (_, b)) in sings.iter().enumerate() {
            if mask >> i & 1 == 1 && b.len() == 2 {
                let (x, y) = (find(&mut parent, b[0]), find(&mut parent, b[1]));
                if x != y {
                    parent[x] = y;
                    count -= 1;
                }
            }
        }
        count
    };
    let pieces: Vec<usize> = (0..1usize << m).map(pieces).collect();
    // genus of the curve keeping `mask`, summed over its connected pieces
    let mut total: Vec<Option<u32>> = vec![None; 1 << m];
    total[0] = Some(curve.components.iter().map(|c| c.genus).sum());
    for mask in 1..1usize << m {
        let mut value = None;
        for (q, (k, _)) in sings.iter().enumerate() {
            if mask >> q & 1 == 0 {
                continue;
            }
            let rest = mask & !(1 << q);
            let below = total[rest]?;
            let h = k / 2;
            let here = if k % 2 == 0 || pieces[rest] != pieces[mask] {
                // even, or odd and separating
                below + h
            } else {
                below + h + 1
            };
            if value.is_some_and(|v| v != here) {
                return None;
            }
            value = Some(here);
        }
        total[mask] = value;
    }
    total[(1 << m) - 1]
}

/// Random relabelling: new ids for components, points, singularities and
/// conjugate tags, shuffled orders, and swapped branches of odd singularities.
pub fn relabel(curve: &Curve, rng: &mut impl Rng) -> Curve {
    let mut comp_ids: Vec<usize> = (0..curve.components.len()).collect();
    comp_ids.shuffle(rng);
    let comp_name: HashMap<&str, String> = curve
        .components
        .iter()
        .zip(&comp_ids)
        .map(|(c, &i)| (c.id.as_str(), format!("K{i}")))
        .collect();
    let mut point_name: HashMap<(String, String), String> = HashMap::new();
    let mut next = 0usize;
    let mut rename_point = |c: &str, p: &str, rng: &mut dyn rand::RngCore| -> String {
        point_name
            .entry((c.to_string(), p.to_string()))
            .or_insert_with(|| {
                next += 1;
                format!("q{}x{}", next, rng.gen_range(0..1000))
            })
            .clone()
    };
    let mut out = curve.clone();
    let mut tag_name: HashMap<String, String> = HashMap::new();
    for comp in &mut out.components {
        let old = comp.id.clone();
        if let Some(roles) = &comp.roles {
            let mut new_roles = BTreeMap::new();
            for (p, role) in roles {
                let role = match role {
                    Role::Conjugate(t) => {
                        let n = tag_name.len();
                        Role::Conjugate(
                            tag_name
                                .entry(t.clone())
                                .or_insert_with(|| format!("t{n}"))
                                .clone(),
                        )
                    }
                    r => r.clone(),
                };
                new_roles.insert(rename_point(&old, p, rng), role);
            }
            comp.roles = Some(new_roles);
        }
        comp.id = comp_name[old.as_str()].clone();
    }
    for s in &mut out.singularities {
        for b in &mut s.branches {
            b.point = rename_point(&b.component, &b.point, rng);
            b.component = comp_name[b.component.as_str()].clone();
        }
        if s.branches.len() == 2 && rng.gen_bool(0.5) {
            s.branches.swap(0, 1);
        }
    }
    for m in &mut out.markings {
        m.point = rename_point(&m.component, &m.point, rng);
        m.component = comp_name[m.component.as_str()].clone();
    }
    let mut sing_ids: Vec<usize> = (0..out.singularities.len()).collect();
    sing_ids.shuffle(rng);
    for (s, i) in out.singularities.iter_mut().zip(sing_ids) {
        s.id = format!("S{i}");
    }
    out.components.shuffle(rng);
    out.singularities.shuffle(rng);
    out.markings.shuffle(rng);
    out
}

/// Feasible deformation sets of a curve made of rational components with
/// at most two special points each, by brute force over weights in
/// {-1, 0, 1} per component.
pub fn brute_feasible_sets(curve: &Curve) -> BTreeSet<BTreeSet<String>> {
    let comps: Vec<&str> = curve.components.iter().map(|c| c.id.as_str()).collect();
    // the points of each component in a fixed order: the first gets +a, the second -a
    let mut points: HashMap<&str, Vec<&str>> = HashMap::new();
    for s in &curve.singularities {
        for b in &s.branches {
            points
                .entry(b.component.as_str())
                .or_default()
                .push(b.point.as_str());
        }
    }
    for m in &curve.markings {
        points
            .entry(m.component.as_str())
            .or_default()
            .push(m.point.as_str());
    }
    for (c, ps) in &points {
        let genus = curve.component(c).unwrap().genus;
        assert!(
            genus == 0 && ps.len() <= 2,
            "oracle covers rational beads only"
        );
    }
    let weight = |a: &[i64], c: &str, p: &str| -> i64 {
        let i = comps.iter().position(|x| *x == c).unwrap();
        let ps = &points[c];
        if ps.len() == 1 || ps[0] == p {
            a[i]
        } else {
            -a[i]
        }
    };
    let moving: Vec<&acurves::Singularity> = curve
        .singularities
        .iter()
        .filter(|s| s.k.k() >= 2)
        .collect();
    let mut out = BTreeSet::new();
    let total = 3usize.pow(comps.len() as u32);
    for code in 0..total {
        let mut a = vec![0i64; comps.len()];
        let mut x = code;
        for v in a.iter_mut() {
            *v = (x % 3) as i64 - 1;
            x /= 3;
        }
        if a.iter().all(|&v| v == 0) {
            continue;
        }
        let mut ok = true;
        let mut positive = Vec::new();
        for s in &curve.singularities {
            let w: Vec<i64> = s
                .branches
                .iter()
                .map(|b| weight(&a, &b.component, &b.point))
                .collect();
            let equivariant = s.k.k() < 2 || s.equivariant;
            if s.k.k() >= 2 && s.k.k() % 2 == 1 && w[0] != w[1] {
                ok = false;
            }
            if !equivariant && w.iter().any(|&v| v != 0) {
                ok = false;
            }
        }
        if !ok {
            continue;
        }
        for s in &moving {
            let b = &s.branches[0];
            if weight(&a, &b.component, &b.point) < 0 {
                positive.push(s.id.clone());
            }
        }
        let n = positive.len();
        for bits in 1u32..(1 << n) {
            let subset = (0..n)
                .filter(|i| bits & (1 << i) != 0)
                .map(|i| positive[i].clone())
                .collect();
            out.insert(subset);
        }
    }
    out
}

/// All partitions of `d` as non-increasing vectors, by merging compositions.
pub fn partitions(d: u32) -> BTreeSet<Vec<u32>> {
    let mut out = BTreeSet::new();
    // every composition of d corresponds to a subset of the d-1 cut points
    for cuts in 0u64..(1 << (d - 1)) {
        let mut parts = Vec::new();
        let mut run = 1;
        for i in 0..d - 1 {
            if cuts & (1 << i) != 0 {
                parts.push(run);
                run = 1;
            } else {
                run += 1;
            }
        }
        parts.push(run);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        out.insert(parts);
    }
    out
}

/// Hilbert-Mumford numerical function of a binary form of degree `d` with
/// the given root multiplicities, against the diagonal one-parameter
/// subgroups centred at each root: the form is semistable iff every value
/// is nonnegative and stable iff every value is positive.
pub fn hilbert_mumford(parts: &[u32]) -> Vec<i64> {
    let d: u32 = parts.iter().sum();
    parts
        .iter()
        .map(|&m| {
            // with the root at x = 0 only x^i y^(d-i) with i >= m survive; under
            // diag(t^-1, t) the monomial has weight d - 2i, and the limit is
            // governed by the largest surviving weight
            (m..=d)
                .map(|i| i64::from(d) - 2 * i64::from(i))
                .max()
                .unwrap()
        })
        .collect()
}

/// Weight blocks of the deformation space at `x^h y^(2g+2-h)`: monomials of
/// degree 2g+2 minus the line of the form and the two root-moving
/// derivations, split by sign of the weight relative to the form.
pub fn fh_monomial_split(g: u32, h: u32) -> (u32, u32) {
    let d = 2 * g + 2;
    let mut neg = 0;
    let mut pos = 0;
    for i in 0..=d {
        let w = i64::from(i) - i64::from(h);
        match w.signum() {
            -1 => neg += 1,
            1 => pos += 1,
            _ => {}
        }
    }
    // y d/dx lowers the x-degree, x d/dy raises it; each hits a nonzero monomial
    if h >= 1 {
        neg -= 1;
    }
    if d - h >= 1 {
        pos -= 1;
    }
    (neg, pos)
}
