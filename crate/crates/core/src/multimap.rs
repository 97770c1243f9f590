//! Relations between spaces, their expansion profiles and scale maps.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{malformed, Error, Result};
use crate::rational::Rational;
use crate::space::UltraSpace;

/// A relation `Φ ⊂ X × Y`, stored as index pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiMap {
    pub source: Arc<UltraSpace>,
    pub target: Arc<UltraSpace>,
    pub pairs: BTreeSet<(usize, usize)>,
}

fn same_space(a: &Arc<UltraSpace>, b: &Arc<UltraSpace>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl MultiMap {
    pub fn new(source: Arc<UltraSpace>, target: Arc<UltraSpace>, pairs: BTreeSet<(usize, usize)>) -> Result<Self> {
        if let Some(&(x, y)) = pairs.iter().find(|&&(x, y)| x >= source.len() || y >= target.len()) {
            return malformed(format!("pair ({x}, {y}) outside the spaces"));
        }
        Ok(MultiMap { source, target, pairs })
    }

    pub fn from_labels(source: Arc<UltraSpace>, target: Arc<UltraSpace>, pairs: &[(String, String)]) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (a, b) in pairs {
            let x = source.index_of(a).ok_or_else(|| Error::Malformed(format!("unknown source point {a:?}")))?;
            let y = target.index_of(b).ok_or_else(|| Error::Malformed(format!("unknown target point {b:?}")))?;
            set.insert((x, y));
        }
        MultiMap::new(source, target, set)
    }

    pub fn from_fn(source: Arc<UltraSpace>, target: Arc<UltraSpace>, f: &[usize]) -> Result<Self> {
        if f.len() != source.len() {
            return malformed("point map does not cover the source");
        }
        MultiMap::new(source, target, f.iter().enumerate().map(|(x, &y)| (x, y)).collect())
    }

    pub fn identity(space: Arc<UltraSpace>) -> Self {
        let pairs = (0..space.len()).map(|i| (i, i)).collect();
        MultiMap { source: space.clone(), target: space, pairs }
    }

    pub fn image(&self, a: &[usize]) -> BTreeSet<usize> {
        let a: BTreeSet<usize> = a.iter().copied().collect();
        self.pairs.iter().filter(|(x, _)| a.contains(x)).map(|&(_, y)| y).collect()
    }

    pub fn image_of(&self, x: usize) -> Vec<usize> {
        self.pairs.range((x, 0)..=(x, usize::MAX)).map(|&(_, y)| y).collect()
    }

    pub fn inverse(&self) -> MultiMap {
        MultiMap {
            source: self.target.clone(),
            target: self.source.clone(),
            pairs: self.pairs.iter().map(|&(x, y)| (y, x)).collect(),
        }
    }

    /// `psi ∘ self`.
    pub fn then(&self, psi: &MultiMap) -> Result<MultiMap> {
        if !same_space(&self.target, &psi.source) {
            return malformed("composition: target of the first map is not the source of the second");
        }
        let mut pairs = BTreeSet::new();
        for &(x, y) in &self.pairs {
            for z in psi.image_of(y) {
                pairs.insert((x, z));
            }
        }
        Ok(MultiMap { source: self.source.clone(), target: psi.target.clone(), pairs })
    }

    pub fn is_total(&self) -> bool {
        let dom: BTreeSet<usize> = self.pairs.iter().map(|p| p.0).collect();
        dom.len() == self.source.len()
    }

    pub fn is_surjective(&self) -> bool {
        let im: BTreeSet<usize> = self.pairs.iter().map(|p| p.1).collect();
        im.len() == self.target.len()
    }

    pub fn is_single_valued(&self) -> bool {
        let dom: BTreeSet<usize> = self.pairs.iter().map(|p| p.0).collect();
        dom.len() == self.pairs.len()
    }

    pub fn is_bijective(&self) -> bool {
        self.is_total() && self.is_single_valued() && self.inverse().is_single_valued() && self.is_surjective()
    }

    /// The underlying function when the relation is total and single valued.
    pub fn as_function(&self) -> Option<Vec<usize>> {
        if !(self.is_total() && self.is_single_valued()) {
            return None;
        }
        Some(self.pairs.iter().map(|p| p.1).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Lookup {
    /// value of the largest breakpoint `<= t`
    AtOrBelow,
    /// value of the smallest breakpoint `>= t`
    AtOrAbove,
}

/// A nondecreasing step function given by its breakpoints, defined on
/// `[0, cap]` (or `[0, ∞)` without a cap).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpansionProfile {
    pub breakpoints: Vec<(Rational, Rational)>,
    pub lookup: Lookup,
    pub cap: Option<Rational>,
}

impl ExpansionProfile {
    pub fn eval(&self, t: &Rational) -> Option<Rational> {
        if t.is_negative() {
            return None;
        }
        if let Some(s) = &self.cap {
            if t > s {
                return None;
            }
        }
        match self.lookup {
            Lookup::AtOrBelow => self.breakpoints.iter().rev().find(|(b, _)| b <= t).map(|(_, v)| v.clone()),
            Lookup::AtOrAbove => self.breakpoints.iter().find(|(b, _)| b >= t).map(|(_, v)| v.clone()),
        }
    }

    /// Picks the cap `S` of the uniform case: the largest scale on which the
    /// profile stays within `1/2`. `None` when even `ρ(0) > 1/2`.
    pub fn with_uniform_cap(mut self) -> Self {
        let half = Rational::pow2(-1);
        self.cap = None;
        if self.eval(&half).is_some_and(|v| v <= half) {
            self.cap = Some(half);
            return self;
        }
        let last_ok = self.breakpoints.iter().rev().find(|(_, v)| *v <= half).map(|(b, _)| b.clone());
        self.cap = match last_ok {
            None => None,
            Some(b) if b.is_positive() => Some(b),
            Some(_) => {
                let first = self.breakpoints.iter().map(|(b, _)| b).find(|b| b.is_positive());
                match first {
                    Some(d) => {
                        let mut k = d.ceil_log2().unwrap() - 1;
                        if Rational::pow2(k) >= *d {
                            k -= 1;
                        }
                        Some(Rational::pow2(k.min(-1)))
                    }
                    None => Some(half),
                }
            }
        };
        self
    }
}

/// `ρ(t) = max { diam Φ(B) : B a closed ball of radius t }`, sampled at 0 and
/// every distance of the source; constant between breakpoints.
pub fn expansion_profile(phi: &MultiMap) -> Result<ExpansionProfile> {
    if !phi.is_total() {
        return malformed("expansion profile needs a total relation");
    }
    let src = &phi.source;
    let mut breakpoints = Vec::new();
    for t in src.distance_values() {
        let mut best = Rational::zero();
        for x in 0..src.len() {
            let ball = src.closed_ball(x, &t);
            let img: Vec<usize> = phi.image(&ball).into_iter().collect();
            let d = phi.target.diameter_of(img.iter().copied());
            if d > best {
                best = d;
            }
        }
        breakpoints.push((t, best));
    }
    Ok(ExpansionProfile { breakpoints, lookup: Lookup::AtOrBelow, cap: None })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaFlavor {
    AllScale,
    Coarse,
    Uniform,
}

/// Integer scale map. `None` marks a scale at which the profile vanishes:
/// `-∞` for the all-scale and coarse flavors, `+∞` for the uniform one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaMap {
    pub flavor: GammaFlavor,
    pub lo: i64,
    pub values: Vec<Option<i64>>,
}

impl GammaMap {
    pub fn hi(&self) -> i64 {
        self.lo + self.values.len() as i64 - 1
    }

    /// `None` outside the window, `Some(None)` for the collapse value.
    pub fn get(&self, k: i64) -> Option<Option<i64>> {
        if k < self.lo {
            return None;
        }
        self.values.get((k - self.lo) as usize).copied()
    }

    /// Radius `2^γ(k)` (or `2^-γ(n)`), zero for a collapse.
    pub fn radius(&self, k: i64) -> Option<Rational> {
        Some(match (self.get(k)?, self.flavor) {
            (None, _) => Rational::zero(),
            (Some(g), GammaFlavor::Uniform) => Rational::pow2(-g),
            (Some(g), _) => Rational::pow2(g),
        })
    }

    pub fn is_nondecreasing(&self) -> bool {
        let key = |v: &Option<i64>| match (v, self.flavor) {
            (None, GammaFlavor::Uniform) => i64::MAX,
            (None, _) => i64::MIN,
            (Some(g), _) => *g,
        };
        self.values.windows(2).all(|w| key(&w[0]) <= key(&w[1]))
    }
}

/// The scale map of a profile on the window `[lo, hi]`. For the uniform
/// flavor the window start is raised to `n_0`, the first `n` with
/// `2^-n <= S`.
pub fn gamma_of(rho: &ExpansionProfile, flavor: GammaFlavor, lo: i64, hi: i64) -> Result<GammaMap> {
    if lo > hi {
        return malformed(format!("empty window [{lo}, {hi}]"));
    }
    let half = Rational::pow2(-1);
    let lo = match flavor {
        GammaFlavor::AllScale => lo,
        GammaFlavor::Coarse => {
            if lo < 1 {
                return malformed("coarse scale maps live on indices >= 1");
            }
            lo
        }
        GammaFlavor::Uniform => {
            if lo < 1 {
                return malformed("uniform scale maps live on indices >= 1");
            }
            let s = rho.cap.as_ref().ok_or_else(|| {
                Error::Domain("no scale S with rho <= 1/2 on [0, S]; the map is not uniformly bounded".into())
            })?;
            match rho.eval(s) {
                Some(v) if v <= half => {}
                _ => return Err(Error::Domain(format!("rho({s}) exceeds 1/2"))),
            }
            let n0 = if *s >= half { 1 } else { -s.floor_log2().unwrap() };
            lo.max(n0)
        }
    };
    if lo > hi {
        return Err(Error::Domain(format!("window ends before the start index {lo}")));
    }
    let mut values = Vec::new();
    for k in lo..=hi {
        let t = match flavor {
            GammaFlavor::Uniform => Rational::pow2(-k),
            _ => Rational::pow2(k),
        };
        let v = rho.eval(&t).ok_or_else(|| Error::Domain(format!("profile undefined at {t}")))?;
        let g = if v.is_zero() {
            None
        } else {
            match flavor {
                GammaFlavor::AllScale => Some(v.floor_log2().unwrap() + 1),
                GammaFlavor::Coarse => Some((v.floor_log2().unwrap() + 1).max(1)),
                GammaFlavor::Uniform => {
                    if v > half {
                        return Err(Error::Domain(format!("rho({t}) = {v} exceeds 1/2")));
                    }
                    Some(-v.ceil_log2().unwrap())
                }
            }
        };
        // the defining bound: ρ at this scale fits in radius 2^±γ
        let bound = match (g, flavor) {
            (None, _) => Rational::zero(),
            (Some(g), GammaFlavor::Uniform) => Rational::pow2(-g),
            (Some(g), _) => Rational::pow2(g),
        };
        if v > bound {
            return Err(Error::ContractViolation(format!("gamma at {k} does not bound rho = {v}")));
        }
        values.push(g);
    }
    Ok(GammaMap { flavor, lo, values })
}

/// First `(x, x', k)` with `d(x,x') <= r_k` but some images farther apart
/// than the radius the scale map promises.
pub fn check_gamma_contract(phi: &MultiMap, gamma: &GammaMap) -> Option<(usize, usize, i64)> {
    let src = &phi.source;
    for k in gamma.lo..=gamma.hi() {
        let r = match gamma.flavor {
            GammaFlavor::Uniform => Rational::pow2(-k),
            _ => Rational::pow2(k),
        };
        let bound = gamma.radius(k).unwrap();
        for x in 0..src.len() {
            for x2 in 0..src.len() {
                if *src.dist(x, x2) > r {
                    continue;
                }
                for y in phi.image_of(x) {
                    for y2 in phi.image_of(x2) {
                        if *phi.target.dist(y, y2) > bound {
                            return Some((x, x2, k));
                        }
                    }
                }
            }
        }
    }
    None
}
