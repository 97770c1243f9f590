//! Seeded generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ultrachain::multimap::MultiMap;
use ultrachain::tower::{NodeSpec, Tower, TowerSpec};
use ultrachain::{DistanceMatrix, Rational, UltraSpace};

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n)
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(n, d).unwrap()
}

pub fn labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// A power of two, or (unless `dyadic`) with even odds an arbitrary fraction.
pub fn random_distance(rng: &mut TestRng, dyadic: bool) -> Rational {
    if dyadic || rng.gen_bool(0.5) {
        Rational::pow2(rng.gen_range(-3..=5))
    } else {
        frac(rng.gen_range(1..=60), rng.gen_range(1..=9))
    }
}

/// Random dendrogram: clusters merge two or three at a time at strictly
/// increasing heights.
pub fn random_ultrametric(rng: &mut TestRng, n: usize, dyadic: bool) -> UltraSpace {
    let mut heights: Vec<Rational> = (0..n).map(|_| random_distance(rng, dyadic)).collect();
    heights.sort();
    heights.dedup();
    let mut heights = heights.into_iter();
    let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut d = vec![vec![Rational::zero(); n]; n];
    let mut last = Rational::one();
    while clusters.len() > 1 {
        let h = heights.next().unwrap_or_else(|| &last * &int(2));
        clusters.shuffle(rng);
        let k = rng.gen_range(2..=clusters.len().min(3));
        let merged: Vec<Vec<usize>> = clusters.drain(..k).collect();
        for a in 0..k {
            for b in 0..k {
                if a != b {
                    for &x in &merged[a] {
                        for &y in &merged[b] {
                            d[x][y] = h.clone();
                        }
                    }
                }
            }
        }
        clusters.push(merged.concat());
        last = h;
    }
    UltraSpace::new(labels("p", n), d).unwrap()
}

/// `random_ultrametric` on between 1 and `max` points.
pub fn space_up_to(rng: &mut TestRng, max: usize, dyadic: bool) -> UltraSpace {
    let n = rng.gen_range(1..=max);
    random_ultrametric(rng, n, dyadic)
}

pub fn scaled(s: &UltraSpace, factor: &Rational) -> UltraSpace {
    UltraSpace::from_fn(s.labels().to_vec(), |i, j| s.dist(i, j) * factor).unwrap()
}

/// Rescaled by a power of two so that the diameter is at most 1/2.
pub fn shrunk(s: &UltraSpace) -> UltraSpace {
    match s.diameter().ceil_log2() {
        Some(k) => scaled(s, &Rational::pow2(-k - 1)),
        None => s.clone(),
    }
}

/// Copy of `s` with new labels and shuffled point order. Returns the copy and
/// `perm` with old point `i` at new index `perm[i]`.
pub fn permuted_copy(rng: &mut TestRng, s: &UltraSpace, prefix: &str) -> (UltraSpace, Vec<usize>) {
    let n = s.len();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut inv = vec![0; n];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    let copy = UltraSpace::from_fn(labels(prefix, n), |a, b| s.dist(inv[a], inv[b]).clone()).unwrap();
    (copy, perm)
}

/// Exhaustive search for a distance-preserving bijection `u -> v`.
pub fn find_isometry(u: &UltraSpace, v: &UltraSpace) -> Option<Vec<usize>> {
    fn go(u: &UltraSpace, v: &UltraSpace, f: &mut Vec<usize>, used: &mut [bool]) -> bool {
        let i = f.len();
        if i == u.len() {
            return true;
        }
        for y in 0..v.len() {
            if used[y] || (0..i).any(|j| u.dist(i, j) != v.dist(y, f[j])) {
                continue;
            }
            used[y] = true;
            f.push(y);
            if go(u, v, f, used) {
                return true;
            }
            f.pop();
            used[y] = false;
        }
        false
    }
    if u.len() != v.len() {
        return None;
    }
    let mut f = Vec::new();
    go(u, v, &mut f, &mut vec![false; v.len()]).then_some(f)
}

/// Total relation: every source point gets one or two random images.
pub fn random_relation(rng: &mut TestRng, src: &Arc<UltraSpace>, tgt: &Arc<UltraSpace>) -> MultiMap {
    let mut pairs = std::collections::BTreeSet::new();
    for x in 0..src.len() {
        for _ in 0..rng.gen_range(1..=2) {
            pairs.insert((x, rng.gen_range(0..tgt.len())));
        }
    }
    MultiMap::new(src.clone(), tgt.clone(), pairs).unwrap()
}

/// Total and surjective relation, so that its inverse is total as well.
pub fn random_correspondence(rng: &mut TestRng, src: &Arc<UltraSpace>, tgt: &Arc<UltraSpace>) -> MultiMap {
    let mut pairs = random_relation(rng, src, tgt).pairs;
    for y in 0..tgt.len() {
        if !pairs.iter().any(|p| p.1 == y) {
            pairs.insert((rng.gen_range(0..src.len()), y));
        }
    }
    MultiMap::new(src.clone(), tgt.clone(), pairs).unwrap()
}

/// Random tower of height at most `max_levels` with at most `max_nodes`
/// nodes, every branch reaching level 1.
pub fn random_tower(rng: &mut TestRng, max_levels: u32, max_nodes: usize) -> Tower {
    let h = rng.gen_range(1..=max_levels);
    let mut nodes = vec![NodeSpec { id: "t".into(), level: h, succ: None }];
    let mut frontier = vec![0usize];
    for lvl in (1..h).rev() {
        let mut next = Vec::new();
        for (i, &parent) in frontier.iter().enumerate() {
            let rest = frontier.len() - i - 1;
            // nodes used if this parent gets c children and every later node one
            let least = |c: usize, next: &Vec<usize>, used: usize| {
                used + c + rest + (lvl as usize - 1) * (next.len() + c + rest)
            };
            let mut c = rng.gen_range(1..=3);
            while c > 1 && least(c, &next, nodes.len()) > max_nodes {
                c -= 1;
            }
            for _ in 0..c {
                let id = format!("{}{}", (b'a' + (lvl as u8 - 1)) as char, nodes.len());
                nodes.push(NodeSpec { id, level: lvl, succ: Some(nodes[parent].id.clone()) });
                next.push(nodes.len() - 1);
            }
        }
        frontier = next;
    }
    Tower::from_spec(&TowerSpec { nodes }).unwrap()
}

/// Random metric on `n` points with integer distances that is not an
/// ultrametric.
pub fn random_non_ultrametric(rng: &mut TestRng, n: usize) -> DistanceMatrix {
    loop {
        let mut d = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let v = rng.gen_range(1..=9);
                d[i][j] = v;
                d[j][i] = v;
            }
        }
        let rows: Vec<Vec<Rational>> = d.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect();
        if triangle_violation(&rows).is_none() && strong_triangle_violation(&rows).is_some() {
            return DistanceMatrix::new(labels("m", n), rows).unwrap();
        }
    }
}

/// First `(x, y, z)` with `d(x,y) > d(x,z) + d(z,y)`.
pub fn triangle_violation(d: &[Vec<Rational>]) -> Option<(usize, usize, usize)> {
    let n = d.len();
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if d[x][y] > &d[x][z] + &d[z][y] {
                    return Some((x, y, z));
                }
            }
        }
    }
    None
}

/// First `(x, y, z)` with `d(x,y) > max(d(x,z), d(z,y))`.
pub fn strong_triangle_violation(d: &[Vec<Rational>]) -> Option<(usize, usize, usize)> {
    let n = d.len();
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if d[x][y] > d[x][z] && d[x][y] > d[z][y] {
                    return Some((x, y, z));
                }
            }
        }
    }
    None
}

pub fn rows_of(s: &UltraSpace) -> Vec<Vec<Rational>> {
    (0..s.len()).map(|i| (0..s.len()).map(|j| s.dist(i, j).clone()).collect()).collect()
}
