//! Operations on truncations: permutations of the `d^n` leaves of the
//! depth-`n` tree, indexed lexicographically.

use crate::perm::Permutation;
use crate::wreath::Vertex;

fn block(d: usize, n: usize) -> usize {
    d.pow(n as u32 - 1)
}

/// The permutation of the first level.
pub fn root_perm(p: &Permutation, d: usize, n: usize) -> Permutation {
    if n == 0 {
        return Permutation::identity(d);
    }
    let b = block(d, n);
    let images = (0..d).map(|x| (p.image(x * b) / b) as u32).collect();
    Permutation::from_images_unchecked(images)
}

/// The section at child `x` (0-based), a permutation of level `n - 1`.
pub fn restrict(p: &Permutation, d: usize, n: usize, x: usize) -> Permutation {
    let b = block(d, n);
    let target = p.image(x * b) / b * b;
    let images = (0..b).map(|y| (p.image(x * b + y) - target) as u32).collect();
    Permutation::from_images_unchecked(images)
}

/// The section at an arbitrary vertex above level `n`.
pub fn restrict_at(p: &Permutation, d: usize, n: usize, v: &Vertex) -> Permutation {
    let mut cur = p.clone();
    for (k, &x) in v.path().iter().enumerate() {
        cur = restrict(&cur, d, n - k, x - 1);
    }
    cur
}

/// `(s_1, …, s_d)σ` at level `n`, from sections at level `n - 1`.
pub fn combine(sections: &[Permutation], root: &Permutation, d: usize, n: usize) -> Permutation {
    let b = block(d, n);
    let mut images = vec![0u32; b * d];
    for (x, s) in sections.iter().enumerate() {
        let target = root.image(x) * b;
        for y in 0..b {
            images[x * b + y] = (target + s.image(y)) as u32;
        }
    }
    Permutation::from_images_unchecked(images)
}

/// The permutation acting as `h` on the subtree at `v` and trivially
/// elsewhere, at level `n`; `h` acts on level `n - |v|`.
pub fn embed(h: &Permutation, v: &Vertex, d: usize, n: usize) -> Permutation {
    let b = d.pow((n - v.level()) as u32);
    let start = v.index(d) * b;
    let mut images: Vec<u32> = (0..d.pow(n as u32) as u32).collect();
    for y in 0..b {
        images[start + y] = (start + h.image(y)) as u32;
    }
    Permutation::from_images_unchecked(images)
}

/// The action on level `n` of a level-`m` permutation, `n <= m`.
pub fn project(p: &Permutation, d: usize, m: usize, n: usize) -> Permutation {
    let b = d.pow((m - n) as u32);
    let images = (0..d.pow(n as u32))
        .map(|i| (p.image(i * b) / b) as u32)
        .collect();
    Permutation::from_images_unchecked(images)
}

/// Whether `p` acts trivially on level `n`.
pub fn fixes_level(p: &Permutation, d: usize, m: usize, n: usize) -> bool {
    let b = d.pow((m - n) as u32);
    (0..d.pow(n as u32)).all(|i| p.image(i * b) / b == i)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combine_and_restrict_are_inverse() {
        let s1 = Permutation::parse_cycles(2, "(1 2)").unwrap();
        let s2 = Permutation::identity(2);
        let root = Permutation::parse_cycles(2, "(1 2)").unwrap();
        let p = combine(&[s1.clone(), s2.clone()], &root, 2, 2);
        assert_eq!(p.to_string(), "(1 4 2 3)");
        assert_eq!(restrict(&p, 2, 2, 0), s1);
        assert_eq!(restrict(&p, 2, 2, 1), s2);
        assert_eq!(root_perm(&p, 2, 2), root);
        assert_eq!(project(&p, 2, 2, 1), root);
    }

    #[test]
    fn embedding() {
        let h = Permutation::parse_cycles(3, "(1 2 3)").unwrap();
        let e = embed(&h, &Vertex::new(vec![2]), 3, 2);
        assert_eq!(e.to_string(), "(4 5 6)");
        assert!(fixes_level(&e, 3, 2, 1));
        assert!(!fixes_level(&e, 3, 2, 2));
        assert_eq!(restrict_at(&e, 3, 2, &Vertex::new(vec![2])), h);
    }
}
