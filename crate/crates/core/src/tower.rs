//! Finite towers: leveled posets stored successor-up.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::chain::{Chain, Flavor, Ground};
use crate::distortion::{check_distortion, DistortionConstants, DistortionKind, DistortionReport};
use crate::error::{malformed, Error, Result};
use crate::rational::Rational;
use crate::space::UltraSpace;
use crate::zigzag::{verify_zigzag, ZigZag, ZigZagVerdict};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeSpec {
    pub id: String,
    pub level: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub succ: Option<String>,
}

/// Tower as read from a file, not yet validated.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerSpec {
    pub nodes: Vec<NodeSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionVerdict {
    pub condition: u8,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl ConditionVerdict {
    fn new(condition: u8, failure: Option<String>) -> Self {
        ConditionVerdict { condition, pass: failure.is_none(), detail: failure }
    }
}

pub fn all_pass(v: &[ConditionVerdict]) -> bool {
    v.iter().all(|c| c.pass)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tower {
    ids: Vec<String>,
    level: Vec<u32>,
    succ: Vec<Option<usize>>,
    index: HashMap<String, usize>,
}

struct Raw {
    ids: Vec<String>,
    level: Vec<u32>,
    succ: Vec<Option<usize>>,
}

fn resolve(spec: &TowerSpec) -> Result<Raw> {
    if spec.nodes.is_empty() {
        return malformed("tower with no nodes");
    }
    let mut index = HashMap::new();
    for (i, n) in spec.nodes.iter().enumerate() {
        if index.insert(n.id.as_str(), i).is_some() {
            return malformed(format!("duplicate node {:?}", n.id));
        }
        if n.level == 0 {
            return malformed(format!("node {:?} has level 0; levels start at 1", n.id));
        }
    }
    let mut succ = Vec::new();
    for n in &spec.nodes {
        let s = match &n.succ {
            None => None,
            Some(s) => {
                let j = *index.get(s.as_str()).ok_or_else(|| {
                    Error::Malformed(format!("node {:?} has unknown successor {s:?}", n.id))
                })?;
                let l = spec.nodes[j].level;
                if l != n.level + 1 {
                    return malformed(format!(
                        "successor of {:?} (level {}) is {s:?} at level {l}; it must sit one level up",
                        n.id, n.level
                    ));
                }
                Some(j)
            }
        };
        succ.push(s);
    }
    Ok(Raw {
        ids: spec.nodes.iter().map(|n| n.id.clone()).collect(),
        level: spec.nodes.iter().map(|n| n.level).collect(),
        succ,
    })
}

/// The four tower conditions, each evaluated on its own. Successor links
/// that do not raise the level by exactly one are a structural error.
pub fn validate_tower(spec: &TowerSpec) -> Result<Vec<ConditionVerdict>> {
    let raw = resolve(spec)?;
    let n = raw.ids.len();
    let up = |start: usize| -> Vec<usize> {
        let mut path = vec![start];
        let mut x = start;
        while let Some(s) = raw.succ[x] {
            if path.len() > n {
                break;
            }
            path.push(s);
            x = s;
        }
        path
    };

    // (1) no infinite descending (here: cyclic) chains
    let cyc = (0..n).find(|&x| up(x).len() > n);
    let c1 = cyc.map(|x| format!("node {:?} lies on a cycle", raw.ids[x]));

    // (2) pairwise sups; finitely, a single top reached from everywhere
    let tops: Vec<usize> = (0..n).filter(|&x| raw.succ[x].is_none()).collect();
    let c2 = if tops.len() != 1 {
        let names: Vec<&str> = tops.iter().map(|&t| raw.ids[t].as_str()).collect();
        Some(format!("{} maximal nodes ({}), so some pairs have no upper bound", tops.len(), names.join(", ")))
    } else {
        None
    };

    // (3) upper cones are chains: the walk up strictly climbs
    let c3 = (0..n).find_map(|x| {
        let p = up(x);
        p.windows(2)
            .find(|w| raw.level[w[1]] <= raw.level[w[0]])
            .map(|w| format!("upper cone of {:?} is not linearly ordered at {:?}", raw.ids[x], raw.ids[w[1]]))
    });

    // (4) |[x, a]| = lev(a) for every minimal x below a
    let mut has_pred = vec![false; n];
    for s in raw.succ.iter().flatten() {
        has_pred[*s] = true;
    }
    let c4 = (0..n).filter(|&x| !has_pred[x]).find_map(|x| {
        up(x).iter().enumerate().find(|&(i, &a)| i as u32 + 1 != raw.level[a]).map(|(i, &a)| {
            format!(
                "node {:?} has level {} but [{}, {}] has {} elements",
                raw.ids[a],
                raw.level[a],
                raw.ids[x],
                raw.ids[a],
                i + 1
            )
        })
    });
    Ok(vec![
        ConditionVerdict::new(1, c1),
        ConditionVerdict::new(2, c2),
        ConditionVerdict::new(3, c3),
        ConditionVerdict::new(4, c4),
    ])
}

impl Tower {
    pub fn from_spec(spec: &TowerSpec) -> Result<Tower> {
        let verdicts = validate_tower(spec)?;
        if let Some(bad) = verdicts.iter().find(|v| !v.pass) {
            return malformed(format!(
                "not a tower: condition ({}) fails: {}",
                bad.condition,
                bad.detail.as_deref().unwrap_or("")
            ));
        }
        let raw = resolve(spec)?;
        let index = raw.ids.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Ok(Tower { ids: raw.ids, level: raw.level, succ: raw.succ, index })
    }

    pub fn to_spec(&self) -> TowerSpec {
        TowerSpec {
            nodes: (0..self.len())
                .map(|i| NodeSpec {
                    id: self.ids[i].clone(),
                    level: self.level[i],
                    succ: self.succ[i].map(|s| self.ids[s].clone()),
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, x: usize) -> &str {
        &self.ids[x]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn level(&self, x: usize) -> u32 {
        self.level[x]
    }

    pub fn succ(&self, x: usize) -> Option<usize> {
        self.succ[x]
    }

    pub fn top(&self) -> usize {
        (0..self.len()).find(|&x| self.succ[x].is_none()).unwrap()
    }

    pub fn height(&self) -> u32 {
        self.level[self.top()]
    }

    /// Nodes of level `n` in file order.
    pub fn level_nodes(&self, n: u32) -> Vec<usize> {
        (0..self.len()).filter(|&x| self.level[x] == n).collect()
    }

    /// The base `[T]`.
    pub fn base(&self) -> Vec<usize> {
        self.level_nodes(1)
    }

    /// `pred(x)`: the nodes one level below `x` whose successor is `x`.
    pub fn preds(&self, x: usize) -> Vec<usize> {
        (0..self.len()).filter(|&y| self.succ[y] == Some(x)).collect()
    }

    /// Ancestor of `x` at level `n >= lev(x)`.
    pub fn ancestor(&self, x: usize, n: u32) -> usize {
        let mut a = x;
        while self.level[a] < n {
            a = self.succ[a].expect("level below the top");
        }
        a
    }

    pub fn le(&self, x: usize, y: usize) -> bool {
        self.level[x] <= self.level[y] && self.ancestor(x, self.level[y]) == y
    }

    pub fn sup(&self, x: usize, y: usize) -> usize {
        let mut n = self.level[x].max(self.level[y]);
        loop {
            let (a, b) = (self.ancestor(x, n), self.ancestor(y, n));
            if a == b {
                return a;
            }
            n += 1;
        }
    }

    /// Is `a` closed downward?
    pub fn is_lower_set(&self, a: &[bool]) -> bool {
        (0..self.len()).all(|y| !a[y] || self.preds(y).iter().all(|&p| a[p]))
    }
}

/// `2 lev(sup(x, y)) - lev(x) - lev(y)`.
pub fn path_metric(t: &Tower, x: usize, y: usize) -> u32 {
    2 * t.level(t.sup(x, y)) - t.level(x) - t.level(y)
}

/// The base with the path metric.
pub fn base_space(t: &Tower) -> Result<UltraSpace> {
    let base = t.base();
    let labels = base.iter().map(|&x| t.id(x).to_string()).collect();
    let rows = base
        .iter()
        .map(|&x| base.iter().map(|&y| Rational::from_integer(path_metric(t, x, y) as i64)).collect())
        .collect();
    UltraSpace::new(labels, rows)
}

/// The D+ chain of levels `L_1, L_2, ...` bonded by successor.
pub fn chain_of_tower(t: &Tower) -> Result<Chain> {
    let h = t.height();
    let nodes: Vec<Vec<usize>> = (1..=h).map(|n| t.level_nodes(n)).collect();
    let pos = position_in_level(t, &nodes);
    let levels = nodes.iter().map(|l| l.iter().map(|&x| t.id(x).to_string()).collect()).collect();
    let bonds = nodes[..nodes.len() - 1].iter().map(|l| l.iter().map(|&x| pos[t.succ(x).unwrap()]).collect()).collect();
    let mut c = Chain::new(Flavor::DPlus, 1, levels, bonds, true, true)?;
    c.ground = Some(Ground {
        labels: nodes[0].iter().map(|&x| t.id(x).to_string()).collect(),
        element: (0..nodes[0].len()).collect(),
    });
    Ok(c)
}

fn position_in_level(t: &Tower, nodes: &[Vec<usize>]) -> Vec<usize> {
    let mut pos = vec![0; t.len()];
    for l in nodes {
        for (i, &x) in l.iter().enumerate() {
            pos[x] = i;
        }
    }
    pos
}

/// `T(α)`: levels `α(1) < α(2) < ...` relabeled `1, 2, ...`, successor
/// composed across the skipped levels. Indices past the top repeat the top
/// as a node `top#k`. The last level must be a single node.
pub fn subtower(t: &Tower, alpha: &[i64]) -> Result<Tower> {
    if alpha.is_empty() || alpha[0] < 1 || alpha.windows(2).any(|w| w[0] >= w[1]) {
        return malformed("subtower levels must be a nonempty increasing sequence of positive integers");
    }
    let h = t.height() as i64;
    let top = t.top();
    let mut nodes = Vec::new();
    let mut prev: Vec<(String, usize)> = Vec::new();
    for (n, &a) in alpha.iter().enumerate() {
        let here: Vec<(String, usize)> = if a <= h {
            t.level_nodes(a as u32).into_iter().map(|x| (t.id(x).to_string(), x)).collect()
        } else {
            vec![(format!("{}#{a}", t.id(top)), top)]
        };
        let ids: HashMap<usize, &str> = here.iter().map(|(s, x)| (*x, s.as_str())).collect();
        // `prev` holds level `n` of the subtower (1-based)
        for (id, x) in &prev {
            let up = t.ancestor(*x, a.min(h) as u32);
            nodes.push(NodeSpec { id: id.clone(), level: n as u32, succ: Some(ids[&up].to_string()) });
        }
        prev = here;
    }
    if prev.len() != 1 {
        return Err(Error::Precondition(format!("level {} of the tower is not a single node", alpha.last().unwrap())));
    }
    nodes.push(NodeSpec { id: prev[0].0.clone(), level: alpha.len() as u32, succ: None });
    Tower::from_spec(&TowerSpec { nodes })
}

/// A node map `φ : A -> T_2` on a lower set `A` of `T_1`, with the verdict on
/// each admissibility condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerMorphismCheck {
    /// `phi[a]` for `a ∈ A`, `None` outside `A`.
    pub phi: Vec<Option<usize>>,
    pub verdicts: Vec<ConditionVerdict>,
}

impl TowerMorphismCheck {
    pub fn is_admissible(&self) -> bool {
        all_pass(&self.verdicts)
    }
}

/// Evaluates the five admissibility conditions of `φ` independently.
pub fn verify_admissible(phi: &[Option<usize>], t1: &Tower, t2: &Tower) -> Result<Vec<ConditionVerdict>> {
    if phi.len() != t1.len() {
        return malformed(format!("node map covers {} of {} nodes", phi.len(), t1.len()));
    }
    if phi.iter().flatten().any(|&y| y >= t2.len()) {
        return malformed("node map leaves the target tower");
    }
    let in_a: Vec<bool> = phi.iter().map(|p| p.is_some()).collect();
    if !t1.is_lower_set(&in_a) {
        return malformed("domain of the morphism is not a lower set");
    }
    let dom: Vec<usize> = (0..t1.len()).filter(|&a| in_a[a]).collect();
    let f = |a: usize| phi[a].unwrap();

    let c1 = dom.iter().find(|&&a| t2.level(f(a)) != t1.level(a)).map(|&a| {
        format!("{} at level {} goes to {} at level {}", t1.id(a), t1.level(a), t2.id(f(a)), t2.level(f(a)))
    });

    let mut c2 = None;
    'c2: for &a in &dom {
        let mut b = a;
        while let Some(s) = t1.succ(b) {
            if in_a[s] && !t2.le(f(a), f(s)) {
                c2 = Some(format!("{} <= {} but {} is not below {}", t1.id(a), t1.id(s), t2.id(f(a)), t2.id(f(s))));
                break 'c2;
            }
            b = s;
        }
    }

    let mut c3 = None;
    'c3: for (i, &a) in dom.iter().enumerate() {
        for &b in &dom[i + 1..] {
            if f(a) == f(b) {
                let siblings = t1.level(a) == t1.level(b) && t1.succ(a).is_some() && t1.succ(a) == t1.succ(b);
                if !siblings {
                    c3 = Some(format!("{} and {} share the image {} without a common parent", t1.id(a), t1.id(b), t2.id(f(a))));
                    break 'c3;
                }
            }
        }
    }

    let mut image = vec![false; t2.len()];
    for &a in &dom {
        image[f(a)] = true;
    }
    let c4 = (0..t2.len())
        .find(|&y| image[y] && t2.preds(y).iter().any(|&p| !image[p]))
        .map(|y| format!("image is not a lower set below {}", t2.id(y)));

    let maximal: Vec<usize> = dom.iter().copied().filter(|&a| t1.succ(a).is_none_or(|s| !in_a[s])).collect();
    let mut max_img: Vec<usize> = maximal.iter().map(|&a| f(a)).collect();
    max_img.sort_unstable();
    max_img.dedup();
    let c5 = (max_img.len() > 1).then(|| format!("maximal elements of the domain have {} images", max_img.len()));

    Ok(vec![
        ConditionVerdict::new(1, c1),
        ConditionVerdict::new(2, c2),
        ConditionVerdict::new(3, c3),
        ConditionVerdict::new(4, c4),
        ConditionVerdict::new(5, c5),
    ])
}

/// The result of assembling `f_Z` on subtowers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssembledMorphism {
    pub source: Tower,
    pub target: Tower,
    pub check: TowerMorphismCheck,
}

impl AssembledMorphism {
    /// `f_Z` on the bases, as indices into the bases of the two subtowers.
    pub fn base_map(&self) -> Vec<usize> {
        let tb = self.target.base();
        self.source
            .base()
            .iter()
            .map(|&x| tb.iter().position(|&y| Some(y) == self.check.phi[x]).unwrap())
            .collect()
    }
}

/// `f_Z : T_1(α) -> T_2(β)` given on level `n` by `V_{2n-1}`, over all of
/// `T_1(α)`.
pub fn zigzag_to_admissible(z: &ZigZag, t1: &Tower, t2: &Tower) -> Result<AssembledMorphism> {
    let il = &z.interleaving;
    if il.flavor != Flavor::DPlus {
        return malformed("tower zig-zags are D+ zig-zags");
    }
    let x = chain_of_tower(t1)?;
    let y = chain_of_tower(t2)?;
    match verify_zigzag(z, &x, &y)? {
        ZigZagVerdict::Pass { .. } => {}
        ZigZagVerdict::Fail { p, reason } => {
            return Err(Error::Precondition(format!("zig-zag fails at V_{p}: {reason}")))
        }
    }
    let m = il.beta.len();
    let s1 = subtower(t1, &il.alpha[..m])?;
    let s2 = subtower(t2, &il.beta)?;
    let l1: Vec<Vec<usize>> = (1..=m as u32).map(|n| s1.level_nodes(n)).collect();
    let l2: Vec<Vec<usize>> = (1..=m as u32).map(|n| s2.level_nodes(n)).collect();
    let mut phi = vec![None; s1.len()];
    for n in 0..m {
        let v = &z.maps[2 * n];
        if v.len() != l1[n].len() {
            return Err(Error::ContractViolation(format!("V_{} does not match level {} of the subtower", 2 * n + 1, n + 1)));
        }
        for (i, &a) in l1[n].iter().enumerate() {
            phi[a] = Some(l2[n][v[i]]);
        }
    }
    let verdicts = verify_admissible(&phi, &s1, &s2)?;
    Ok(AssembledMorphism { source: s1, target: s2, check: TowerMorphismCheck { phi, verdicts } })
}

/// `d(f x, f y) <= d(x, y) <= d(f x, f y) + 2` on base pairs; `f` indexes
/// the bases of the two towers.
pub fn check_base_rough_isometry(f: &[usize], t1: &Tower, t2: &Tower) -> Result<DistortionReport> {
    let b1 = base_space(t1)?;
    let b2 = base_space(t2)?;
    let c = DistortionConstants { c: Some(Rational::from_integer(2)), ..Default::default() };
    check_distortion(f, &b1, &b2, DistortionKind::Additive, &c)
}
