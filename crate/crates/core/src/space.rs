//! Finite ultrametric spaces and their ball partitions.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use crate::error::{malformed, Error, Result};
use crate::rational::Rational;

/// A labelled square matrix that is symmetric, has zero diagonal and
/// nonnegative entries. Nothing more is assumed; in particular it need not
/// satisfy any triangle inequality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceMatrix {
    labels: Vec<String>,
    rows: Vec<Vec<Rational>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    /// `d(x,y) > max(d(x,z), d(z,y))`
    StrongTriangle,
    /// The two largest sides of the triangle differ.
    Isosceles,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UltrametricVerdict {
    Valid,
    /// `triple = (x, y, z)` with the offending side being `d(x,y)`.
    Violation {
        triple: (usize, usize, usize),
        kind: ViolationKind,
    },
}

impl UltrametricVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, UltrametricVerdict::Valid)
    }
}

impl DistanceMatrix {
    pub fn new(labels: Vec<String>, rows: Vec<Vec<Rational>>) -> Result<Self> {
        let n = labels.len();
        if rows.len() != n {
            return malformed(format!("{} labels but {} rows", n, rows.len()));
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return malformed(format!("duplicate point label {l:?}"));
            }
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return malformed(format!("row {} has {} entries, expected {}", i, row.len(), n));
            }
        }
        for i in 0..n {
            if !rows[i][i].is_zero() {
                return malformed(format!("nonzero diagonal at {:?}", labels[i]));
            }
            for j in 0..n {
                if rows[i][j].is_negative() {
                    return malformed(format!(
                        "negative distance between {:?} and {:?}",
                        labels[i], labels[j]
                    ));
                }
                if rows[i][j] != rows[j][i] {
                    return malformed(format!(
                        "asymmetric entries between {:?} and {:?}",
                        labels[i], labels[j]
                    ));
                }
                if i != j && rows[i][j].is_zero() {
                    return malformed(format!(
                        "distinct points {:?} and {:?} at distance 0",
                        labels[i], labels[j]
                    ));
                }
            }
        }
        Ok(DistanceMatrix { labels, rows })
    }

    pub fn from_fn(labels: Vec<String>, f: impl Fn(usize, usize) -> Rational) -> Result<Self> {
        let n = labels.len();
        let rows = (0..n).map(|i| (0..n).map(|j| f(i, j)).collect()).collect();
        DistanceMatrix::new(labels, rows)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dist(&self, i: usize, j: usize) -> &Rational {
        &self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    /// First triple violating the ordinary triangle inequality
    /// `d(x,y) <= d(x,z) + d(z,y)`.
    pub fn metric_violation(&self) -> Option<(usize, usize, usize)> {
        let n = self.len();
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if self.rows[x][y] > &self.rows[x][z] + &self.rows[z][y] {
                        return Some((x, y, z));
                    }
                }
            }
        }
        None
    }

    pub fn verify_ultrametric(&self) -> UltrametricVerdict {
        let n = self.len();
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let m = if self.rows[x][z] > self.rows[z][y] {
                        &self.rows[x][z]
                    } else {
                        &self.rows[z][y]
                    };
                    if &self.rows[x][y] > m {
                        return UltrametricVerdict::Violation {
                            triple: (x, y, z),
                            kind: ViolationKind::StrongTriangle,
                        };
                    }
                }
            }
        }
        for x in 0..n {
            for y in x + 1..n {
                for z in y + 1..n {
                    let mut s = [&self.rows[x][y], &self.rows[y][z], &self.rows[x][z]];
                    s.sort();
                    if s[1] != s[2] {
                        return UltrametricVerdict::Violation {
                            triple: (x, y, z),
                            kind: ViolationKind::Isosceles,
                        };
                    }
                }
            }
        }
        UltrametricVerdict::Valid
    }
}

/// A finite ultrametric space. Construction validates the strong triangle
/// inequality, so every value of this type is a genuine ultrametric.
#[derive(Clone, PartialEq, Eq)]
pub struct UltraSpace {
    m: DistanceMatrix,
}

impl fmt::Debug for UltraSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UltraSpace")
            .field("points", &self.m.labels)
            .field("dist", &self.m.rows)
            .finish()
    }
}

impl UltraSpace {
    pub fn from_matrix(m: DistanceMatrix) -> Result<Self> {
        match m.verify_ultrametric() {
            UltrametricVerdict::Valid => Ok(UltraSpace { m }),
            UltrametricVerdict::Violation { triple: (x, y, z), .. } => malformed(format!(
                "not an ultrametric: d({0},{1}) > max(d({0},{2}), d({2},{1}))",
                m.labels[x], m.labels[y], m.labels[z]
            )),
        }
    }

    pub fn new(labels: Vec<String>, rows: Vec<Vec<Rational>>) -> Result<Self> {
        UltraSpace::from_matrix(DistanceMatrix::new(labels, rows)?)
    }

    pub fn from_fn(labels: Vec<String>, f: impl Fn(usize, usize) -> Rational) -> Result<Self> {
        UltraSpace::from_matrix(DistanceMatrix::from_fn(labels, f)?)
    }

    pub fn singleton(label: impl Into<String>) -> Self {
        UltraSpace {
            m: DistanceMatrix { labels: vec![label.into()], rows: vec![vec![Rational::zero()]] },
        }
    }

    pub fn matrix(&self) -> &DistanceMatrix {
        &self.m
    }

    pub fn len(&self) -> usize {
        self.m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.m.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.m.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.m.labels.iter().position(|l| l == label)
    }

    pub fn dist(&self, i: usize, j: usize) -> &Rational {
        &self.m.rows[i][j]
    }

    /// Sorted distinct distance values, including 0 when the space is nonempty.
    pub fn distance_values(&self) -> Vec<Rational> {
        let mut s = BTreeSet::new();
        for row in &self.m.rows {
            for v in row {
                s.insert(v.clone());
            }
        }
        s.into_iter().collect()
    }

    pub fn diameter(&self) -> Rational {
        self.diameter_of(0..self.len())
    }

    pub fn diameter_of(&self, pts: impl IntoIterator<Item = usize> + Clone) -> Rational {
        let mut best = Rational::zero();
        for i in pts.clone() {
            for j in pts.clone() {
                if self.m.rows[i][j] > best {
                    best = self.m.rows[i][j].clone();
                }
            }
        }
        best
    }

    pub fn min_positive_distance(&self) -> Option<Rational> {
        self.distance_values().into_iter().find(|v| v.is_positive())
    }

    pub fn closed_ball(&self, center: usize, radius: &Rational) -> Vec<usize> {
        (0..self.len()).filter(|&j| self.dist(center, j) <= radius).collect()
    }

    pub fn ball_partition(&self, radius: &Rational) -> Result<BallPartition> {
        if radius.is_negative() {
            return malformed(format!("negative radius {radius}"));
        }
        let n = self.len();
        let mut block_of = vec![usize::MAX; n];
        let mut blocks = Vec::new();
        for i in 0..n {
            if block_of[i] != usize::MAX {
                continue;
            }
            let b = self.closed_ball(i, radius);
            for &j in &b {
                block_of[j] = blocks.len();
            }
            blocks.push(b);
        }
        Ok(BallPartition { radius: radius.clone(), blocks, block_of })
    }

    /// Same metric, new labels.
    pub fn relabeled(&self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::Malformed("relabeling changes the number of points".into()));
        }
        UltraSpace::new(labels, self.m.rows.clone())
    }
}

/// Partition of a space into closed balls of a common radius. Blocks are
/// listed in order of their smallest member, members in increasing order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallPartition {
    pub radius: Rational,
    pub blocks: Vec<Vec<usize>>,
    pub block_of: Vec<usize>,
}

impl BallPartition {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Every block of `self` sits inside a block of `coarser`.
    pub fn refines(&self, coarser: &BallPartition) -> bool {
        self.blocks.iter().all(|b| b.iter().all(|&p| coarser.block_of[p] == coarser.block_of[b[0]]))
    }

    pub fn is_discrete(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 1)
    }
}

/// `{a,b,c}` style label for a block.
pub fn block_label(space: &UltraSpace, block: &[usize]) -> String {
    let names: Vec<&str> = block.iter().map(|&i| space.label(i)).collect();
    format!("{{{}}}", names.join(","))
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use proptest::prelude::*;

    fn names(s: &UltraSpace, p: &BallPartition) -> Vec<Vec<String>> {
        p.blocks.iter().map(|b| b.iter().map(|&i| s.label(i).to_string()).collect()).collect()
    }

    #[test]
    fn u4_is_valid() {
        assert!(u4().matrix().verify_ultrametric().is_valid());
    }

    #[test]
    fn short_pair_long_side_is_caught() {
        let m = DistanceMatrix::new(
            labels(&["x", "y", "z"]),
            vec![vec![r("0"), r("1"), r("2")], vec![r("1"), r("0"), r("1")], vec![r("2"), r("1"), r("0")]],
        )
        .unwrap();
        match m.verify_ultrametric() {
            UltrametricVerdict::Violation { triple, kind } => {
                assert_eq!(kind, ViolationKind::StrongTriangle);
                assert_eq!(*m.dist(triple.0, triple.1), r("2"));
            }
            v => panic!("{v:?}"),
        }
        assert!(UltraSpace::from_matrix(m).is_err());
    }

    #[test]
    fn one_point_is_valid() {
        assert!(UltraSpace::singleton("p").matrix().verify_ultrametric().is_valid());
    }

    #[test]
    fn structural_problems_are_malformed() {
        let l = labels(&["x", "y"]);
        assert!(DistanceMatrix::new(l.clone(), vec![vec![r("0"), r("1")], vec![r("2"), r("0")]]).is_err());
        assert!(DistanceMatrix::new(l.clone(), vec![vec![r("1"), r("1")], vec![r("1"), r("0")]]).is_err());
        assert!(DistanceMatrix::new(l.clone(), vec![vec![r("0"), r("-1")], vec![r("-1"), r("0")]]).is_err());
        assert!(DistanceMatrix::new(l.clone(), vec![vec![r("0"), r("1")]]).is_err());
        assert!(DistanceMatrix::new(labels(&["x", "x"]), vec![vec![r("0"), r("1")], vec![r("1"), r("0")]]).is_err());
    }

    #[test]
    fn u4_partitions() {
        let s = u4();
        let p = s.ball_partition(&r("1")).unwrap();
        assert_eq!(names(&s, &p), vec![vec!["a", "b"], vec!["c"], vec!["d"]]);
        assert_eq!(s.ball_partition(&r("8")).unwrap().len(), 1);
        assert!(s.ball_partition(&r("1/2")).unwrap().is_discrete());
        assert!(s.ball_partition(&r("-1")).is_err());
    }

    proptest! {
        #[test]
        fn partitions_refine_and_are_balls(s in arb_space(9), a in 0i64..40, b in 0i64..40) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let r1 = Rational::new(lo, 4).unwrap();
            let r2 = Rational::new(hi, 4).unwrap();
            let p1 = s.ball_partition(&r1).unwrap();
            let p2 = s.ball_partition(&r2).unwrap();
            prop_assert!(p1.refines(&p2));
            for b in &p1.blocks {
                prop_assert!(s.diameter_of(b.iter().copied()) <= r1);
                for &c in b {
                    prop_assert_eq!(&s.closed_ball(c, &r1), b);
                }
            }
        }

        #[test]
        fn triangles_are_isosceles(s in arb_space(8)) {
            let n = s.len();
            for x in 0..n { for y in 0..n { for z in 0..n {
                let mut t = [s.dist(x, y), s.dist(y, z), s.dist(x, z)];
                t.sort();
                prop_assert_eq!(t[1], t[2]);
            }}}
        }
    }
}
