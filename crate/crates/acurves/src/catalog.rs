//! Constructors for the standard building blocks: smooth curves, atoms,
//! rosaries and hyperelliptic chains.

use crate::curve::{BranchPoint, Builder, Curve, Role};

/// Smooth curve of genus `g` with `n` markings. With `hyperelliptic` set,
/// the component carries (empty) role data.
pub fn smooth(g: u32, n: u32, hyperelliptic: bool) -> Curve {
    let mut b = Builder::new();
    let c = b.component(g);
    for _ in 0..n {
        b.marking(&c);
    }
    if hyperelliptic {
        b.set_hyperelliptic(&c);
    }
    b.build()
}

/// Rational component with one `A_{2h}` and up to one marking.
pub fn even_atom(h: u32, pointed: bool) -> Curve {
    let mut b = Builder::new();
    let c = b.component(0);
    b.singularity(2 * h, &[&c]);
    if pointed {
        b.marking(&c);
    }
    b.build()
}

/// Two rational components joined by `A_{2h+1}`, with markings on the
/// first `markings` of them (0, 1 or 2).
pub fn odd_atom(h: u32, markings: usize) -> Curve {
    let mut b = Builder::new();
    let x = b.component(0);
    let y = b.component(0);
    b.singularity(2 * h + 1, &[&x, &y]);
    for c in [&x, &y].into_iter().take(markings) {
        b.marking(c);
    }
    b.build()
}

/// Open rosary with links `A_{2k+1}` for each `k` in `links`, and a
/// marking on each end rational component.
pub fn rosary(links: &[u32]) -> Curve {
    let mut b = Builder::new();
    let comps: Vec<String> = (0..=links.len()).map(|_| b.component(0)).collect();
    for (i, &k) in links.iter().enumerate() {
        b.singularity(2 * k + 1, &[&comps[i], &comps[i + 1]]);
    }
    b.marking(&comps[0]);
    b.marking(&comps[links.len()]);
    b.build()
}

/// Rosary closed up into a cycle, one rational component per link.
pub fn closed_rosary(links: &[u32]) -> Curve {
    let mut b = Builder::new();
    let comps: Vec<String> = links.iter().map(|_| b.component(0)).collect();
    let n = comps.len();
    for (i, &k) in links.iter().enumerate() {
        b.singularity(2 * k + 1, &[&comps[i], &comps[(i + 1) % n]]);
    }
    b.build()
}

/// Chain of positive-genus components attached at conjugate points, with
/// links `A_{2k+1}` between consecutive members and a marking at each end.
pub fn hyperelliptic_chain(genera: &[u32], links: &[u32]) -> Curve {
    assert_eq!(genera.len(), links.len() + 1);
    let mut b = Builder::new();
    let comps: Vec<String> = genera.iter().map(|&g| b.component(g)).collect();
    let mut ends: Vec<(BranchPoint, BranchPoint)> = Vec::new();
    let mut left = b.marking(&comps[0]);
    for (i, &k) in links.iter().enumerate() {
        let right = b.point(&comps[i]);
        let next = b.point(&comps[i + 1]);
        b.singularity_at(2 * k + 1, vec![right.clone(), next.clone()], true);
        ends.push((left, right));
        left = next;
    }
    let last = b.marking(&comps[genera.len() - 1]);
    ends.push((left, last));
    for (i, (a, z)) in ends.iter().enumerate() {
        let pair = format!("h{i}");
        b.set_role(a, Role::Conjugate(pair.clone()));
        b.set_role(z, Role::Conjugate(pair));
    }
    b.build()
}
