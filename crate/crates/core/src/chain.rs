//! Chains of partitions, their end spaces, subchains and morphisms.
//!
//! A chain lives on a finite window of indices. For `D` and `D+` chains the
//! bonds point toward increasing index (coarser partitions); for `D-` chains
//! the index is `n` with radius `2^-n`, so larger `n` is finer and the bonds
//! point toward decreasing index. Bond `k` always joins levels `k` and `k+1`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{malformed, Error, Result};
use crate::multimap::{ExpansionProfile, GammaFlavor, GammaMap, Lookup, MultiMap};
use crate::rational::Rational;
use crate::space::{block_label, UltraSpace};
use crate::transform::ScaleMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Flavor {
    D,
    DPlus,
    DMinus,
}

impl Flavor {
    pub fn gamma_flavor(self) -> GammaFlavor {
        match self {
            Flavor::D => GammaFlavor::AllScale,
            Flavor::DPlus => GammaFlavor::Coarse,
            Flavor::DMinus => GammaFlavor::Uniform,
        }
    }

    /// Radius of level `k`.
    pub fn radius(self, k: i64) -> Rational {
        match self {
            Flavor::DMinus => Rational::pow2(-k),
            _ => Rational::pow2(k),
        }
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::D => "D",
            Flavor::DPlus => "D+",
            Flavor::DMinus => "D-",
        })
    }
}

impl FromStr for Flavor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "D" => Ok(Flavor::D),
            "D+" | "Dplus" => Ok(Flavor::DPlus),
            "D-" | "Dminus" => Ok(Flavor::DMinus),
            _ => malformed(format!("unknown chain flavor {s:?}; expected D, D+ or D-")),
        }
    }
}

impl Serialize for Flavor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Flavor {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// A chain on the window `[lo, lo + levels.len() - 1]`.
///
/// `bonds[i]` is bond `lo + i`: for `D`/`D+` it maps level `lo+i` into level
/// `lo+i+1`, for `D-` it maps level `lo+i+1` into level `lo+i`.
/// `stabilized_fine` / `stabilized_coarse` say whether the chain may be
/// continued past the finest / coarsest level by repeating it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    pub flavor: Flavor,
    pub lo: i64,
    pub levels: Vec<Vec<String>>,
    pub bonds: Vec<Vec<usize>>,
    pub stabilized_fine: bool,
    pub stabilized_coarse: bool,
    /// The points behind the chain, when built from a space.
    pub ground: Option<Ground>,
}

/// Points of an underlying space and the finest-level element holding each.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ground {
    pub labels: Vec<String>,
    pub element: Vec<usize>,
}

impl Chain {
    pub fn new(
        flavor: Flavor,
        lo: i64,
        levels: Vec<Vec<String>>,
        bonds: Vec<Vec<usize>>,
        stabilized_fine: bool,
        stabilized_coarse: bool,
    ) -> Result<Self> {
        if levels.is_empty() {
            return malformed("chain with no levels");
        }
        if flavor != Flavor::D && lo < 1 {
            return malformed(format!("{flavor} chains are indexed from 1"));
        }
        if bonds.len() + 1 != levels.len() {
            return malformed(format!("{} levels need {} bonds, got {}", levels.len(), levels.len() - 1, bonds.len()));
        }
        for (i, lvl) in levels.iter().enumerate() {
            if lvl.is_empty() {
                return malformed(format!("level {} is empty", lo + i as i64));
            }
            let mut seen = std::collections::HashSet::new();
            for l in lvl {
                if !seen.insert(l) {
                    return malformed(format!("duplicate label {l:?} in level {}", lo + i as i64));
                }
            }
        }
        for (i, b) in bonds.iter().enumerate() {
            let k = lo + i as i64;
            let (dom, cod) = match flavor {
                Flavor::DMinus => (&levels[i + 1], &levels[i]),
                _ => (&levels[i], &levels[i + 1]),
            };
            if b.len() != dom.len() {
                return malformed(format!("bond {k} defined on {} of {} elements", b.len(), dom.len()));
            }
            let mut hit = vec![false; cod.len()];
            for &y in b {
                if y >= cod.len() {
                    return malformed(format!("bond {k} leaves its codomain"));
                }
                hit[y] = true;
            }
            if let Some(miss) = hit.iter().position(|h| !h) {
                return malformed(format!("bond {k} is not surjective: nothing maps to {:?}", cod[miss]));
            }
        }
        let c = Chain { flavor, lo, levels, bonds, stabilized_fine, stabilized_coarse, ground: None };
        if flavor != Flavor::DMinus && stabilized_coarse && c.level(c.hi()).len() != 1 {
            return malformed("a chain stabilized at the top needs a single top element");
        }
        Ok(c)
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.levels.len() as i64 - 1
    }

    pub fn contains(&self, k: i64) -> bool {
        k >= self.lo && k <= self.hi()
    }

    pub fn level(&self, k: i64) -> &[String] {
        &self.levels[(k - self.lo) as usize]
    }

    pub fn finest(&self) -> i64 {
        match self.flavor {
            Flavor::DMinus => self.hi(),
            _ => self.lo,
        }
    }

    pub fn coarsest(&self) -> i64 {
        match self.flavor {
            Flavor::DMinus => self.lo,
            _ => self.hi(),
        }
    }

    /// `a` is at least as coarse as `b`.
    pub fn coarser_or_eq(&self, a: i64, b: i64) -> bool {
        match self.flavor {
            Flavor::DMinus => a <= b,
            _ => a >= b,
        }
    }

    pub fn index_of(&self, k: i64, label: &str) -> Option<usize> {
        self.level(k).iter().position(|l| l == label)
    }

    /// Image of `x ∈ X_a` in the coarser level `b` under composite bonds.
    pub fn coarsen(&self, a: i64, x: usize, b: i64) -> usize {
        debug_assert!(self.coarser_or_eq(b, a));
        let mut x = x;
        match self.flavor {
            Flavor::DMinus => {
                for k in (b..a).rev() {
                    x = self.bonds[(k - self.lo) as usize][x];
                }
            }
            _ => {
                for k in a..b {
                    x = self.bonds[(k - self.lo) as usize][x];
                }
            }
        }
        x
    }

    /// Coordinates of every thread, one row per element of the finest level,
    /// columns indexed by `k - lo`.
    pub fn threads(&self) -> Vec<Vec<usize>> {
        let f = self.finest();
        (0..self.level(f).len())
            .map(|t| (self.lo..=self.hi()).map(|k| self.coarsen(f, t, k)).collect())
            .collect()
    }

    /// Threads through `x ∈ X_k`.
    pub fn members(&self, k: i64, x: usize) -> Vec<usize> {
        let f = self.finest();
        (0..self.level(f).len()).filter(|&t| self.coarsen(f, t, k) == x).collect()
    }

    /// Thread labels: the point labels when points and threads correspond
    /// one to one, the finest-level labels otherwise.
    pub fn thread_labels(&self) -> Vec<String> {
        match &self.ground {
            Some(g) if g.element.iter().enumerate().all(|(i, &e)| i == e) => g.labels.clone(),
            _ => self.level(self.finest()).to_vec(),
        }
    }

    /// Number of points behind the chain (threads when there is no ground).
    pub fn ground_len(&self) -> usize {
        match &self.ground {
            Some(g) => g.labels.len(),
            None => self.level(self.finest()).len(),
        }
    }

    /// Element of level `k` holding point `p`.
    pub fn ground_element(&self, p: usize, k: i64) -> usize {
        let e = match &self.ground {
            Some(g) => g.element[p],
            None => p,
        };
        self.coarsen(self.finest(), e, k)
    }

    /// Points inside `x ∈ X_k`.
    pub fn ground_members(&self, k: i64, x: usize) -> Vec<usize> {
        (0..self.ground_len()).filter(|&p| self.ground_element(p, k) == x).collect()
    }

    /// Same chain on a window grown to cover `[lo, hi]`, repeating the end
    /// levels with identity bonds. Refused where the chain is not stabilized.
    pub fn extended(&self, lo: i64, hi: i64) -> Result<Chain> {
        let (new_lo, new_hi) = (lo.min(self.lo), hi.max(self.hi()));
        if self.flavor != Flavor::D && new_lo < 1 {
            return Err(Error::OutOfWindow(format!("{} chains have no index {new_lo}", self.flavor)));
        }
        let (below_ok, above_ok) = match self.flavor {
            Flavor::DMinus => (self.stabilized_coarse, self.stabilized_fine),
            _ => (self.stabilized_fine, self.stabilized_coarse),
        };
        if new_lo < self.lo && !below_ok {
            return Err(Error::OutOfWindow(format!("chain cannot be continued below index {}", self.lo)));
        }
        if new_hi > self.hi() && !above_ok {
            return Err(Error::OutOfWindow(format!("chain cannot be continued above index {}", self.hi())));
        }
        let mut levels = Vec::new();
        let mut bonds = Vec::new();
        for k in new_lo..=new_hi {
            let src = k.clamp(self.lo, self.hi());
            levels.push(self.level(src).to_vec());
            if k < new_hi {
                if k >= self.lo && k < self.hi() {
                    bonds.push(self.bonds[(k - self.lo) as usize].clone());
                } else {
                    bonds.push((0..self.level(src).len()).collect());
                }
            }
        }
        Ok(Chain {
            flavor: self.flavor,
            lo: new_lo,
            levels,
            bonds,
            stabilized_fine: self.stabilized_fine,
            stabilized_coarse: self.stabilized_coarse,
            ground: self.ground.clone(),
        })
    }
}

/// The chain of closed-ball partitions of a space. The window runs from the
/// first discrete level (where it exists in the flavor's index set) to the
/// first level with a single block.
pub fn chain_of_space(space: &UltraSpace, flavor: Flavor) -> Result<Chain> {
    let diam = space.diameter();
    let (lo, hi, fine, coarse) = match (flavor, space.min_positive_distance()) {
        (Flavor::D, None) => (0, 0, true, true),
        (Flavor::DPlus | Flavor::DMinus, None) => (1, 1, true, true),
        (Flavor::D, Some(m)) => {
            let lo = m.ceil_log2().unwrap() - 1;
            (lo, diam.ceil_log2().unwrap().max(lo), true, true)
        }
        (Flavor::DPlus, Some(m)) => {
            let fine = m.ceil_log2().unwrap() - 1 >= 1;
            (1, diam.ceil_log2().unwrap().max(1), fine, true)
        }
        (Flavor::DMinus, Some(m)) => {
            if diam > Rational::pow2(-1) {
                return Err(Error::Domain(format!(
                    "D- chains need diameter <= 1/2, got {diam}; rescale the space first"
                )));
            }
            // smallest n with 2^-n < m
            let n = 1 - m.ceil_log2().unwrap();
            (1, n.max(1), true, true)
        }
    };
    let mut levels = Vec::new();
    let mut parts = Vec::new();
    for k in lo..=hi {
        let p = space.ball_partition(&flavor.radius(k))?;
        levels.push(p.blocks.iter().map(|b| block_label(space, b)).collect());
        parts.push(p);
    }
    let mut bonds = Vec::new();
    for i in 0..parts.len().saturating_sub(1) {
        let (fine_p, coarse_p) = match flavor {
            Flavor::DMinus => (&parts[i + 1], &parts[i]),
            _ => (&parts[i], &parts[i + 1]),
        };
        bonds.push(fine_p.blocks.iter().map(|b| coarse_p.block_of[b[0]]).collect());
    }
    let finest = if flavor == Flavor::DMinus { parts.last() } else { parts.first() };
    let element = finest.unwrap().block_of.clone();
    let mut c = Chain::new(flavor, lo, levels, bonds, fine, coarse)?;
    c.ground = Some(Ground { labels: space.labels().to_vec(), element });
    Ok(c)
}

/// Levels `α(k)` with composite bonds. Stabilization carries over on a side
/// only when `α` reaches that end of the window.
pub fn subchain(chain: &Chain, alpha: &ScaleMap) -> Result<Chain> {
    if !alpha.is_strictly_increasing() {
        return malformed("subchain index map must be strictly increasing");
    }
    if let Some(&v) = alpha.values.iter().find(|&&v| !chain.contains(v)) {
        return malformed(format!("subchain index {v} outside window [{}, {}]", chain.lo, chain.hi()));
    }
    if chain.flavor != Flavor::D && alpha.lo < 1 {
        return malformed(format!("{} subchains are indexed from 1", chain.flavor));
    }
    let levels: Vec<Vec<String>> = alpha.values.iter().map(|&a| chain.level(a).to_vec()).collect();
    let mut bonds = Vec::new();
    for w in alpha.values.windows(2) {
        let (a, b) = (w[0], w[1]);
        let bond: Vec<usize> = match chain.flavor {
            Flavor::DMinus => (0..chain.level(b).len()).map(|x| chain.coarsen(b, x, a)).collect(),
            _ => (0..chain.level(a).len()).map(|x| chain.coarsen(a, x, b)).collect(),
        };
        bonds.push(bond);
    }
    let first = alpha.values[0];
    let last = alpha.values[alpha.values.len() - 1];
    let (fine_end, coarse_end) = match chain.flavor {
        Flavor::DMinus => (last, first),
        _ => (first, last),
    };
    let keeps_fine = fine_end == chain.finest();
    let mut c = Chain::new(
        chain.flavor,
        alpha.lo,
        levels,
        bonds,
        chain.stabilized_fine && keeps_fine,
        chain.stabilized_coarse && coarse_end == chain.coarsest(),
    )?;
    if keeps_fine {
        c.ground = chain.ground.clone();
    }
    Ok(c)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndSpace {
    pub threads: Vec<Vec<usize>>,
    pub space: UltraSpace,
}

/// Distance between two threads under the flavor's end metric, `None` when
/// two distinct D/D+ threads never meet inside the window.
pub fn thread_distance(flavor: Flavor, lo: i64, a: &[usize], b: &[usize]) -> Option<Rational> {
    if a == b {
        return Some(Rational::zero());
    }
    match flavor {
        Flavor::DMinus => {
            let n0 = (0..a.len()).rev().find(|&i| a[i] == b[i]);
            Some(match n0 {
                Some(i) => Rational::pow2(-(lo + i as i64)),
                None => Rational::one(),
            })
        }
        _ => (0..a.len()).find(|&i| a[i] == b[i]).map(|i| Rational::pow2(lo + i as i64)),
    }
}

pub fn end_space(chain: &Chain) -> Result<EndSpace> {
    let threads = chain.threads();
    let n = threads.len();
    let mut rows = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            rows[i][j] = thread_distance(chain.flavor, chain.lo, &threads[i], &threads[j]).ok_or_else(|| {
                Error::Domain(format!(
                    "threads {} and {} never meet in the window; the top level is not a single point",
                    chain.level(chain.finest())[i],
                    chain.level(chain.finest())[j]
                ))
            })?;
        }
    }
    let space = UltraSpace::new(chain.thread_labels(), rows)?;
    Ok(EndSpace { threads, space })
}

/// `f_k : X_k -> Y_σ(k)` for `k` in `[lo, lo + sigma.len() - 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMorphism {
    pub lo: i64,
    pub sigma: Vec<i64>,
    pub maps: Vec<Vec<usize>>,
}

impl ChainMorphism {
    pub fn hi(&self) -> i64 {
        self.lo + self.sigma.len() as i64 - 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MorphismVerdict {
    Pass,
    /// The rectangle between `k` and `k+1` fails at element `element` of the
    /// finer of the two source levels.
    Fail { k: i64, element: String },
}

pub fn verify_morphism(m: &ChainMorphism, from: &Chain, to: &Chain) -> Result<MorphismVerdict> {
    if from.flavor != to.flavor {
        return malformed("morphism between chains of different flavors");
    }
    if m.sigma.is_empty() || m.sigma.len() != m.maps.len() {
        return malformed("morphism needs one map per scale");
    }
    if !from.contains(m.lo) || !from.contains(m.hi()) {
        return malformed(format!("morphism window [{}, {}] leaves the source chain", m.lo, m.hi()));
    }
    if m.sigma.windows(2).any(|w| w[0] > w[1]) {
        return malformed("sigma must be nondecreasing");
    }
    for (i, (&s, f)) in m.sigma.iter().zip(&m.maps).enumerate() {
        let k = m.lo + i as i64;
        if !to.contains(s) {
            return malformed(format!("sigma({k}) = {s} outside the target window [{}, {}]", to.lo, to.hi()));
        }
        if f.len() != from.level(k).len() || f.iter().any(|&y| y >= to.level(s).len()) {
            return malformed(format!("f_{k} does not map X_{k} into Y_{s}"));
        }
    }
    for i in 0..m.sigma.len().saturating_sub(1) {
        let k = m.lo + i as i64;
        let (s0, s1) = (m.sigma[i], m.sigma[i + 1]);
        let (f0, f1) = (&m.maps[i], &m.maps[i + 1]);
        match from.flavor {
            Flavor::DMinus => {
                for x in 0..from.level(k + 1).len() {
                    let down = from.coarsen(k + 1, x, k);
                    if to.coarsen(s1, f1[x], s0) != f0[down] {
                        return Ok(MorphismVerdict::Fail { k, element: from.level(k + 1)[x].clone() });
                    }
                }
            }
            _ => {
                for x in 0..from.level(k).len() {
                    let up = from.coarsen(k, x, k + 1);
                    if to.coarsen(s0, f0[x], s1) != f1[up] {
                        return Ok(MorphismVerdict::Fail { k, element: from.level(k)[x].clone() });
                    }
                }
            }
        }
    }
    Ok(MorphismVerdict::Pass)
}

/// Target index for scale `k`: `γ(k)`, moved into the target window. Moving
/// toward the coarse end is always safe; moving past the coarse end needs
/// the target to be stabilized there.
pub(crate) fn clamp_sigma(gamma: &GammaMap, k: i64, to: &Chain) -> Result<i64> {
    let g = gamma.get(k).ok_or_else(|| Error::OutOfWindow(format!("gamma undefined at {k}")))?;
    let fine = to.finest();
    let coarse = to.coarsest();
    let s = match g {
        None => fine,
        Some(g) => g,
    };
    if to.contains(s) {
        return Ok(s);
    }
    if to.coarser_or_eq(fine, s) {
        return Ok(fine);
    }
    if to.stabilized_coarse {
        return Ok(coarse);
    }
    Err(Error::OutOfWindow(format!(
        "gamma({k}) = {s} lies beyond the coarse end {coarse} of an unstabilized chain"
    )))
}

/// The level map sending the ball behind `x` to the target ball holding its
/// image, for one pair of levels.
pub(crate) fn induced_level_map(phi: &MultiMap, from: &Chain, k: i64, to: &Chain, s: i64) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(from.level(k).len());
    for x in 0..from.level(k).len() {
        let ball = from.ground_members(k, x);
        let img = phi.image(&ball);
        let mut target = None;
        for t in img {
            let y = to.ground_element(t, s);
            match target {
                None => target = Some(y),
                Some(y0) if y0 != y => {
                    return Err(Error::ContractViolation(format!(
                        "image of ball {} (level {k}) is not inside one ball of level {s}",
                        from.level(k)[x]
                    )))
                }
                _ => {}
            }
        }
        let y = target.ok_or_else(|| {
            Error::Precondition(format!("ball {} (level {k}) has empty image", from.level(k)[x]))
        })?;
        out.push(y);
    }
    Ok(out)
}

/// The morphism induced by a total relation between the points of two
/// chains, using `σ = γ` on `γ`'s window (intersected with the source window).
pub fn induce_morphism(phi: &MultiMap, from: &Chain, to: &Chain, gamma: &GammaMap) -> Result<ChainMorphism> {
    if phi.source.len() != from.ground_len() || phi.target.len() != to.ground_len() {
        return malformed("relation does not live on the points of the two chains");
    }
    if !phi.is_total() {
        return malformed("inducing a morphism needs a total relation");
    }
    let lo = gamma.lo.max(from.lo);
    let hi = gamma.hi().min(from.hi());
    if lo > hi {
        return Err(Error::OutOfWindow("gamma window misses the source chain".into()));
    }
    let mut sigma = Vec::new();
    let mut maps = Vec::new();
    for k in lo..=hi {
        let s = clamp_sigma(gamma, k, to)?;
        sigma.push(s);
        maps.push(induced_level_map(phi, from, k, to, s)?);
    }
    Ok(ChainMorphism { lo, sigma, maps })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TelescopeProfile {
    /// `Λ` on the chain indices where it is defined.
    pub lambda: Vec<(i64, i64)>,
    pub gamma: ExpansionProfile,
    /// Every pair of threads satisfies `D' = Γ(D)` exactly.
    pub exact: bool,
}

/// `Λ` and `Γ` relating the end metric of `chain` to that of its
/// `α`-subchain, with an exact pointwise check on all thread pairs.
pub fn telescope_profile(chain: &Chain, alpha: &ScaleMap) -> Result<TelescopeProfile> {
    subchain(chain, alpha)?;
    let mut lambda = Vec::new();
    let mut bps = Vec::new();
    match chain.flavor {
        Flavor::D | Flavor::DPlus => {
            if chain.flavor == Flavor::D {
                bps.push((Rational::zero(), Rational::zero()));
            }
            for z in chain.lo..=chain.hi() {
                if let Some((k, _)) = alpha.indices().find(|&(_, a)| a >= z) {
                    lambda.push((z, k));
                    bps.push((Rational::pow2(z), Rational::pow2(k)));
                }
            }
        }
        Flavor::DMinus => {
            bps.push((Rational::zero(), Rational::zero()));
            for n in (chain.lo..=chain.hi()).rev() {
                let v = match alpha.indices().filter(|&(_, a)| a <= n).last() {
                    Some((k, _)) => {
                        lambda.push((n, k));
                        Rational::pow2(-k)
                    }
                    None => Rational::one(),
                };
                bps.push((Rational::pow2(-n), v));
            }
            lambda.reverse();
            if chain.lo > 0 {
                bps.push((Rational::one(), Rational::one()));
            }
        }
    }
    let gamma = ExpansionProfile { breakpoints: bps, lookup: Lookup::AtOrAbove, cap: None };
    let threads = chain.threads();
    let sub: Vec<Vec<usize>> =
        threads.iter().map(|t| alpha.values.iter().map(|&a| t[(a - chain.lo) as usize]).collect()).collect();
    let mut exact = true;
    'outer: for i in 0..threads.len() {
        for j in i + 1..threads.len() {
            let d = thread_distance(chain.flavor, chain.lo, &threads[i], &threads[j]);
            let d2 = if sub[i] == sub[j] {
                Some(Rational::zero())
            } else {
                thread_distance(chain.flavor, alpha.lo, &sub[i], &sub[j])
            };
            let ok = match (d, d2) {
                (Some(d), Some(d2)) => gamma.eval(&d) == Some(d2),
                _ => false,
            };
            if !ok {
                exact = false;
                break 'outer;
            }
        }
    }
    Ok(TelescopeProfile { lambda, gamma, exact })
}

/// A map from the threads of one chain to the threads of another.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThreadMap {
    pub map: Vec<usize>,
}

/// Reads off a thread map from a morphism: the image of thread `t` is the
/// unique target thread whose coordinate at `σ(k)` is `f_k(t_k)` for every
/// `k`. `None` if some thread has no such image.
pub fn morphism_thread_map(m: &ChainMorphism, from: &Chain, to: &Chain) -> Option<ThreadMap> {
    let tf = from.threads();
    let tt = to.threads();
    let mut map = Vec::new();
    for t in &tf {
        let hit = (0..tt.len()).filter(|&u| {
            m.sigma.iter().enumerate().all(|(i, &s)| {
                let k = m.lo + i as i64;
                m.maps[i][t[(k - from.lo) as usize]] == tt[u][(s - to.lo) as usize]
            })
        });
        let v: Vec<usize> = hit.collect();
        map.push(*v.first()?);
    }
    Some(ThreadMap { map })
}

pub(crate) fn label_index(chain: &Chain, k: i64) -> HashMap<&str, usize> {
    chain.level(k).iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect()
}
