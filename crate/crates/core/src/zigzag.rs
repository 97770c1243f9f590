//! Interleavings of two chains and the zig-zag diagrams built on them.

use std::sync::Arc;

use serde::Serialize;

use crate::chain::{chain_of_space, end_space, induced_level_map, subchain, Chain, Flavor, ThreadMap};
use crate::distortion::{DistortionConstants, DistortionKind, DistortionReport, Witness};
use crate::error::{malformed, Error, Result};
use crate::multimap::{expansion_profile, gamma_of, GammaMap, MultiMap};
use crate::rational::Rational;
use crate::transform::ScaleMap;

/// Index sequences `α`, `β` on `[start, ..]`. `alpha` holds as many entries
/// as `beta` or one more.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Interleaving {
    pub flavor: Flavor,
    pub start: i64,
    pub alpha: Vec<i64>,
    pub beta: Vec<i64>,
    /// The recursion stopped early because a scale map ran out of window.
    pub truncated: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    X,
    Y,
}

impl Interleaving {
    pub fn alpha_at(&self, i: i64) -> Option<i64> {
        usize::try_from(i - self.start).ok().and_then(|j| self.alpha.get(j).copied())
    }

    pub fn beta_at(&self, i: i64) -> Option<i64> {
        usize::try_from(i - self.start).ok().and_then(|j| self.beta.get(j).copied())
    }

    /// Position of the first entry of `Z`: `Z_{2i-1} = X_α(i)`, `Z_{2i} = Y_β(i)`.
    pub fn z_start(&self) -> i64 {
        2 * self.start - 1
    }

    /// The levels of `Z` in order of position.
    pub fn z_levels(&self) -> Vec<(Side, i64)> {
        let mut out = Vec::new();
        for (j, &a) in self.alpha.iter().enumerate() {
            out.push((Side::X, a));
            if let Some(&b) = self.beta.get(j) {
                out.push((Side::Y, b));
            }
        }
        out
    }

    fn shape_error(&self) -> Option<String> {
        if self.alpha.is_empty() {
            return Some("empty interleaving".into());
        }
        if self.alpha.len() != self.beta.len() && self.alpha.len() != self.beta.len() + 1 {
            return Some(format!("alpha has {} entries and beta {}", self.alpha.len(), self.beta.len()));
        }
        if self.flavor != Flavor::D && self.start != 1 {
            return Some(format!("{} interleavings start at index 1", self.flavor));
        }
        if self.alpha.windows(2).any(|w| w[0] >= w[1]) {
            return Some("alpha is not strictly increasing".into());
        }
        if self.beta.windows(2).any(|w| w[0] >= w[1]) {
            return Some("beta is not strictly increasing".into());
        }
        None
    }
}

// γ as a lower bound (D, D+): a collapse is -∞.
fn low(g: &GammaMap, k: i64) -> Option<i64> {
    g.get(k).map(|v| v.unwrap_or(i64::MIN))
}

// γ as an upper bound (D-): a collapse is +∞.
fn high(g: &GammaMap, k: i64) -> Option<i64> {
    g.get(k).map(|v| v.unwrap_or(i64::MAX))
}

// largest k in the window with γ(k) <= a
fn last_below(g: &GammaMap, a: i64) -> Option<i64> {
    (g.lo..=g.hi()).rev().find(|&k| low(g, k).unwrap() <= a)
}

// smallest n in the window with γ(n) >= a
fn first_above(g: &GammaMap, a: i64) -> Option<i64> {
    (g.lo..=g.hi()).find(|&n| high(g, n).unwrap() >= a)
}

/// First violated interleaving inequality, if any.
///
/// D, D+: `γΦ(α(i)) <= β(i)` and `γΦ⁻¹(β(i)) <= α(i+1)`.
/// D-: `γΦ⁻¹(β(i)) >= α(i)` and `γΦ(α(i+1)) >= β(i)`.
pub fn check_interleaving(il: &Interleaving, fwd: &GammaMap, bwd: &GammaMap) -> Option<String> {
    if let Some(e) = il.shape_error() {
        return Some(e);
    }
    let undefined = |name: &str, k: i64| Some(format!("{name} undefined at {k}"));
    for (j, &b) in il.beta.iter().enumerate() {
        let i = il.start + j as i64;
        let a = il.alpha[j];
        let next = il.alpha.get(j + 1).copied();
        if il.flavor == Flavor::DMinus {
            match high(bwd, b) {
                None => return undefined("gamma of the inverse", b),
                Some(g) if g < a => return Some(format!("gamma_inv(beta({i})) = {g} < alpha({i}) = {a}")),
                _ => {}
            }
            if let Some(a2) = next {
                match high(fwd, a2) {
                    None => return undefined("gamma", a2),
                    Some(g) if g < b => {
                        return Some(format!("gamma(alpha({})) = {g} < beta({i}) = {b}", i + 1))
                    }
                    _ => {}
                }
            }
        } else {
            match low(fwd, a) {
                None => return undefined("gamma", a),
                Some(g) if g > b => return Some(format!("gamma(alpha({i})) = {g} > beta({i}) = {b}")),
                _ => {}
            }
            if let Some(a2) = next {
                match low(bwd, b) {
                    None => return undefined("gamma of the inverse", b),
                    Some(g) if g > a2 => {
                        return Some(format!("gamma_inv(beta({i})) = {g} > alpha({}) = {a2}", i + 1))
                    }
                    _ => {}
                }
            }
        }
    }
    None
}

/// The interleaving recursion driven by the scale maps of `Φ` (`fwd`) and
/// `Φ⁻¹` (`bwd`). D runs over `-(length-1)..=length-1` from `α(0) = 0`;
/// D+ and D- run over `1..=length` from `α(1) = 1`, D- with one trailing
/// `α(length+1)`. The run stops early, flagged `truncated`, where a scale
/// map is needed outside its window.
pub fn interleave(fwd: &GammaMap, bwd: &GammaMap, flavor: Flavor, length: usize) -> Result<Interleaving> {
    if length == 0 {
        return malformed("interleaving length must be positive");
    }
    let gf = flavor.gamma_flavor();
    if fwd.flavor != gf || bwd.flavor != gf {
        return malformed(format!("{flavor} interleavings need {gf:?} scale maps"));
    }
    let n = length as i64;
    let mut truncated = false;
    match flavor {
        Flavor::D | Flavor::DPlus => {
            let (a0, b0) = if flavor == Flavor::D {
                let g = low(fwd, 0).ok_or_else(|| Error::OutOfWindow("gamma undefined at 0".into()))?;
                (0, if g == i64::MIN { 0 } else { g })
            } else {
                let g = low(fwd, 1).ok_or_else(|| Error::OutOfWindow("gamma undefined at 1".into()))?;
                (1, g.max(1))
            };
            let mut alpha = vec![a0];
            let mut beta = vec![b0];
            for _ in 1..n {
                let (pa, pb) = (*alpha.last().unwrap(), *beta.last().unwrap());
                let Some(g) = low(bwd, pb) else {
                    truncated = true;
                    break;
                };
                let a = (pa + 1).max(g);
                alpha.push(a);
                let Some(g) = low(fwd, a) else {
                    truncated = true;
                    break;
                };
                beta.push((pb + 1).max(g));
            }
            let mut start = if flavor == Flavor::D { 0 } else { 1 };
            if flavor == Flavor::D {
                for _ in 1..n {
                    let Some(kb) = last_below(bwd, alpha[0]) else {
                        truncated = true;
                        break;
                    };
                    let b = (beta[0] - 1).min(kb);
                    let Some(ka) = last_below(fwd, b) else {
                        truncated = true;
                        break;
                    };
                    let a = (alpha[0] - 1).min(ka);
                    if b < bwd.lo || a < fwd.lo {
                        truncated = true;
                        break;
                    }
                    alpha.insert(0, a);
                    beta.insert(0, b);
                    start -= 1;
                }
            }
            Ok(Interleaving { flavor, start, alpha, beta, truncated })
        }
        Flavor::DMinus => {
            let mut alpha = vec![1];
            let mut beta = Vec::new();
            for _ in 0..n {
                let a = *alpha.last().unwrap();
                let Some(nb) = first_above(bwd, a) else {
                    truncated = true;
                    break;
                };
                let b = match beta.last() {
                    Some(&pb) => nb.max(pb + 1),
                    None => nb,
                };
                if bwd.get(b).is_none() {
                    truncated = true;
                    break;
                }
                beta.push(b);
                let Some(na) = first_above(fwd, b) else {
                    truncated = true;
                    break;
                };
                let a2 = na.max(a + 1);
                if fwd.get(a2).is_none() {
                    truncated = true;
                    break;
                }
                alpha.push(a2);
            }
            Ok(Interleaving { flavor, start: 1, alpha, beta, truncated })
        }
    }
}

/// An interleaving with its level maps: `maps[j]` is `V_p` for
/// `p = z_start + j`. D, D+: `V_p : Z_p -> Z_{p+1}`; D-: `V_p : Z_{p+1} -> Z_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZigZag {
    pub interleaving: Interleaving,
    pub maps: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ZigZagVerdict {
    /// `degenerate` when `Z` has a single level and nothing to check.
    Pass { degenerate: bool },
    /// The map `V_p` (or the triangle starting at it) is broken.
    Fail { p: i64, reason: String },
}

impl ZigZag {
    pub fn flavor(&self) -> Flavor {
        self.interleaving.flavor
    }

    /// The zig-zag of `Φ⁻¹`: the same diagram without its first level.
    pub fn swapped(&self) -> Result<ZigZag> {
        let il = &self.interleaving;
        if il.beta.is_empty() {
            return malformed("zig-zag too short to swap");
        }
        let interleaving = Interleaving {
            flavor: il.flavor,
            start: il.start,
            alpha: il.beta.clone(),
            beta: il.alpha[1..].to_vec(),
            truncated: il.truncated,
        };
        Ok(ZigZag { interleaving, maps: self.maps[1..].to_vec() })
    }
}

/// Both chains grown to cover the interleaving.
pub fn covering_chains(il: &Interleaving, x: &Chain, y: &Chain) -> Result<(Chain, Chain)> {
    if x.flavor != il.flavor || y.flavor != il.flavor {
        return malformed("chains and interleaving have different flavors");
    }
    let span = |v: &[i64], c: &Chain| match (v.first(), v.last()) {
        (Some(&a), Some(&b)) => c.extended(a, b),
        _ => Ok(c.clone()),
    };
    Ok((span(&il.alpha, x)?, span(&il.beta, y)?))
}

fn level_of<'a>(side: Side, x: &'a Chain, y: &'a Chain) -> &'a Chain {
    match side {
        Side::X => x,
        Side::Y => y,
    }
}

/// Induces every `V_p` of the interleaving from `Φ` and `Φ⁻¹`.
pub fn zigzag_on(phi: &MultiMap, x: &Chain, y: &Chain, il: &Interleaving) -> Result<ZigZag> {
    if let Some(e) = il.shape_error() {
        return malformed(e);
    }
    let (x, y) = covering_chains(il, x, y)?;
    let inv = phi.inverse();
    let z = il.z_levels();
    let mut maps = Vec::new();
    for j in 0..z.len().saturating_sub(1) {
        let (dom, cod) = if il.flavor == Flavor::DMinus { (z[j + 1], z[j]) } else { (z[j], z[j + 1]) };
        let rel = if dom.0 == Side::X { phi } else { &inv };
        maps.push(induced_level_map(
            rel,
            level_of(dom.0, &x, &y),
            dom.1,
            level_of(cod.0, &x, &y),
            cod.1,
        )?);
    }
    Ok(ZigZag { interleaving: il.clone(), maps })
}

/// Checks that every `V_p` is a map between the right levels and that each
/// two-step composite equals the bond composite of `X` or `Y`.
pub fn verify_zigzag(z: &ZigZag, x: &Chain, y: &Chain) -> Result<ZigZagVerdict> {
    let il = &z.interleaving;
    if let Some(e) = il.shape_error() {
        return malformed(e);
    }
    let levels = il.z_levels();
    if z.maps.len() + 1 != levels.len() {
        return malformed(format!("{} levels need {} maps, got {}", levels.len(), levels.len() - 1, z.maps.len()));
    }
    let (x, y) = match covering_chains(il, x, y) {
        Ok(c) => c,
        Err(e) => return Ok(ZigZagVerdict::Fail { p: il.z_start(), reason: e.to_string() }),
    };
    if z.maps.is_empty() {
        return Ok(ZigZagVerdict::Pass { degenerate: true });
    }
    let p0 = il.z_start();
    let size = |(s, k): (Side, i64)| level_of(s, &x, &y).level(k).len();
    let minus = il.flavor == Flavor::DMinus;
    for (j, v) in z.maps.iter().enumerate() {
        let (dom, cod) = if minus { (levels[j + 1], levels[j]) } else { (levels[j], levels[j + 1]) };
        let p = p0 + j as i64;
        if v.len() != size(dom) || v.iter().any(|&t| t >= size(cod)) {
            return Ok(ZigZagVerdict::Fail { p, reason: "map does not fit its levels".into() });
        }
    }
    for j in 0..levels.len().saturating_sub(2) {
        let p = p0 + j as i64;
        let (side, a) = levels[j];
        let b = levels[j + 2].1;
        let c = level_of(side, &x, &y);
        if minus {
            for t in 0..c.level(b).len() {
                if z.maps[j][z.maps[j + 1][t]] != c.coarsen(b, t, a) {
                    let reason = format!("V_{p} V_{} differs from the bond at {}", p + 1, c.level(b)[t]);
                    return Ok(ZigZagVerdict::Fail { p, reason });
                }
            }
        } else {
            for t in 0..c.level(a).len() {
                if z.maps[j + 1][z.maps[j][t]] != c.coarsen(a, t, b) {
                    let reason = format!("V_{} V_{p} differs from the bond at {}", p + 1, c.level(a)[t]);
                    return Ok(ZigZagVerdict::Fail { p, reason });
                }
            }
        }
    }
    Ok(ZigZagVerdict::Pass { degenerate: false })
}

/// `Z` as a chain indexed by position, with the `V_p` as bonds.
pub fn zigzag_chain(z: &ZigZag, x: &Chain, y: &Chain) -> Result<Chain> {
    let il = &z.interleaving;
    let (x, y) = covering_chains(il, x, y)?;
    let levels: Vec<Vec<String>> =
        il.z_levels().into_iter().map(|(s, k)| level_of(s, &x, &y).level(k).to_vec()).collect();
    let top_single = match il.flavor {
        Flavor::DMinus => levels[0].len() == 1,
        _ => levels.last().unwrap().len() == 1,
    };
    Chain::new(il.flavor, il.z_start(), levels, z.maps.clone(), false, top_single && il.flavor != Flavor::DMinus)
}

const MAX_LENGTH: usize = 1 << 12;

/// Builds the zig-zag of a relation between two spaces from their ball
/// chains, returning it with the two chains.
pub fn build_zigzag(phi: &MultiMap, flavor: Flavor) -> Result<(ZigZag, Chain, Chain)> {
    let x = chain_of_space(&phi.source, flavor)?;
    let y = chain_of_space(&phi.target, flavor)?;
    let z = build_zigzag_on(phi, &x, &y)?;
    Ok((z, x, y))
}

/// Builds the shortest zig-zag reaching the fine end of both chains (D), up
/// to the coarse end of both, and for D- one level past it on `X`.
pub fn build_zigzag_on(phi: &MultiMap, x: &Chain, y: &Chain) -> Result<ZigZag> {
    let flavor = x.flavor;
    if y.flavor != flavor {
        return malformed("chains of different flavors");
    }
    if !phi.is_total() || !phi.is_surjective() {
        return Err(Error::Precondition("the relation and its inverse must both be total".into()));
    }
    if flavor != Flavor::DPlus && !phi.is_bijective() {
        return Err(Error::Precondition(format!("{flavor} zig-zags need a bijection")));
    }
    let on_threads = thread_relation(phi, x, y)?;
    let mut rho_f = expansion_profile(&on_threads)?;
    let mut rho_b = expansion_profile(&on_threads.inverse())?;
    if flavor == Flavor::DMinus {
        rho_f = rho_f.with_uniform_cap();
        rho_b = rho_b.with_uniform_cap();
    }
    let (xf, yf, xc, yc) = (x.finest(), y.finest(), x.coarsest(), y.coarsest());
    let gf = flavor.gamma_flavor();
    let mut length = 4;
    loop {
        let pad = 2 * length as i64;
        let (lo, hi) = match flavor {
            Flavor::D => (x.lo.min(y.lo) - pad, x.hi().max(y.hi()) + pad),
            _ => (1, x.hi().max(y.hi()) + pad),
        };
        let fwd = gamma_of(&rho_f, gf, lo, hi)?;
        let bwd = gamma_of(&rho_b, gf, lo, hi)?;
        let il = interleave(&fwd, &bwd, flavor, length)?;
        if let Some(t) = trim(&il, flavor, (xf, yf), (xc, yc)) {
            return zigzag_on(phi, x, y, &t);
        }
        if length >= MAX_LENGTH {
            return Err(Error::OutOfWindow(format!("no interleaving of length {MAX_LENGTH} covers both chains")));
        }
        length *= 2;
    }
}

/// `Φ` carried to the end spaces of the two chains.
pub fn thread_relation(phi: &MultiMap, x: &Chain, y: &Chain) -> Result<MultiMap> {
    if phi.source.len() != x.ground_len() || phi.target.len() != y.ground_len() {
        return malformed("relation does not live on the points of the two chains");
    }
    let ex = end_space(x)?;
    let ey = end_space(y)?;
    let (fx, fy) = (x.finest(), y.finest());
    let pairs = phi.pairs.iter().map(|&(p, q)| (x.ground_element(p, fx), y.ground_element(q, fy))).collect();
    MultiMap::new(Arc::new(ex.space), Arc::new(ey.space), pairs)
}

// The part of `il` between the fine and coarse ends, if it reaches both.
fn trim(il: &Interleaving, flavor: Flavor, fine: (i64, i64), coarse: (i64, i64)) -> Option<Interleaving> {
    let m = il.beta.len();
    let (a, b) = (&il.alpha, &il.beta);
    match flavor {
        Flavor::D => {
            let first = (0..m).rev().find(|&j| a[j] <= fine.0 && b[j] <= fine.1)?;
            let last = (first..m).find(|&j| a[j] >= coarse.0 && b[j] >= coarse.1)?;
            Some(Interleaving {
                flavor,
                start: il.start + first as i64,
                alpha: a[first..=last].to_vec(),
                beta: b[first..=last].to_vec(),
                truncated: false,
            })
        }
        Flavor::DPlus => {
            let last = (0..m).find(|&j| a[j] >= coarse.0 && b[j] >= coarse.1)?;
            Some(Interleaving { flavor, start: 1, alpha: a[..=last].to_vec(), beta: b[..=last].to_vec(), truncated: false })
        }
        Flavor::DMinus => {
            // on D- chains the fine end is the top index
            let last = (0..m).find(|&j| a[j] >= fine.0 && b[j] >= fine.1 && j + 1 < a.len())?;
            Some(Interleaving {
                flavor,
                start: 1,
                alpha: a[..=last + 1].to_vec(),
                beta: b[..=last].to_vec(),
                truncated: false,
            })
        }
    }
}

/// The `α`- and `β`-subchains of the covering chains, indexed from the
/// interleaving start.
pub fn side_subchains(z: &ZigZag, x: &Chain, y: &Chain) -> Result<(Chain, Chain)> {
    let il = &z.interleaving;
    let (x, y) = covering_chains(il, x, y)?;
    let xa = subchain(&x, &ScaleMap::new(il.start, il.alpha.clone()))?;
    if il.beta.is_empty() {
        return malformed("zig-zag has no Y level");
    }
    let yb = subchain(&y, &ScaleMap::new(il.start, il.beta.clone()))?;
    Ok((xa, yb))
}

/// Thread map `f_Z` from the `α`-subchain to the `β`-subchain, read off at
/// the finest `β` level: D, D+ through `V_{2s-1}` at the first index, D-
/// through `V_{2m}` at the last. With `strict`, every coordinate must agree.
fn fz(z: &ZigZag, xa: &Chain, yb: &Chain, strict: bool) -> Result<ThreadMap> {
    let il = &z.interleaving;
    let src = xa.threads();
    let tgt = yb.threads();
    let minus = il.flavor == Flavor::DMinus;
    let coord = |t: &[usize], i: i64| -> usize {
        let j = (i - il.start) as usize;
        if minus {
            z.maps[2 * j + 1][t[j + 1]]
        } else {
            z.maps[2 * j][t[j]]
        }
    };
    let last = il.start + il.beta.len() as i64 - 1;
    let key = if minus { last } else { il.start };
    let mut map = Vec::with_capacity(src.len());
    for t in &src {
        let y = coord(t, key);
        let u = tgt
            .iter()
            .position(|u| u[(yb.finest() - yb.lo) as usize] == y)
            .ok_or_else(|| Error::ContractViolation("f_Z leaves the target threads".into()))?;
        if strict {
            for i in il.start..=last {
                if coord(t, i) != tgt[u][(i - il.start) as usize] {
                    return Err(Error::ContractViolation(format!(
                        "coordinates of f_Z at index {i} do not form a thread"
                    )));
                }
            }
        }
        map.push(u);
    }
    Ok(ThreadMap { map })
}

/// `f_Z` on the threads of the `α`-subchain, checked to be a thread at
/// every coordinate.
pub fn induced_fz(z: &ZigZag, x: &Chain, y: &Chain) -> Result<ThreadMap> {
    let (xa, yb) = side_subchains(z, x, y)?;
    fz(z, &xa, &yb, true)
}

/// Compares the end metrics of the two subchains along `f_Z`.
///
/// * D: `Dβ(f x, f y) <= Dα(x, y) <= 2 Dβ(f x, f y)` on all pairs
/// * D+: `Dβ <= Dα` always, `Dα <= 2 Dβ` when `Dα > 2`
/// * D-: `Dα <= Dβ <= 2 Dα` when `Dα <= 1/4`
///
/// The witness indexes threads of the `α`-subchain.
pub fn check_fz_distortion(z: &ZigZag, x: &Chain, y: &Chain) -> Result<DistortionReport> {
    let (xa, yb) = side_subchains(z, x, y)?;
    let f = fz(z, &xa, &yb, false)?;
    let ea = end_space(&xa)?;
    let eb = end_space(&yb)?;
    let two = Rational::from_integer(2);
    let (kind, constants) = match z.flavor() {
        Flavor::D => (DistortionKind::Bilipschitz, DistortionConstants { k: Some(two.clone()), ..Default::default() }),
        Flavor::DPlus => (
            DistortionKind::LargeScale,
            DistortionConstants { k: Some(two.clone()), c: Some(two.clone()), ..Default::default() },
        ),
        Flavor::DMinus => (
            DistortionKind::SmallScaleBilipschitz,
            DistortionConstants { k: Some(two.clone()), eps: Some(Rational::pow2(-2)), ..Default::default() },
        ),
    };
    let n = ea.space.len();
    let mut checked = 0;
    let mut witness = None;
    'outer: for i in 0..n {
        for j in i + 1..n {
            let da = ea.space.dist(i, j);
            let db = eb.space.dist(f.map[i], f.map[j]);
            let ok = match z.flavor() {
                Flavor::D => db <= da && *da <= &two * db,
                Flavor::DPlus => db <= da && (*da <= two || *da <= &two * db),
                Flavor::DMinus => {
                    if *da > Rational::pow2(-2) {
                        continue;
                    }
                    da <= db && *db <= &two * da
                }
            };
            checked += 1;
            if !ok {
                witness = Some(Witness { pair: (i, j), source_distance: da.clone(), target_distance: db.clone() });
                break 'outer;
            }
        }
    }
    Ok(DistortionReport { kind, constants, witness, pairs_checked: checked })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multimap::GammaFlavor;
    use crate::space::fixtures::*;
    use crate::space::UltraSpace;
    use crate::transform::rescale_by_gamma;
    use proptest::prelude::*;

    fn gm(flavor: GammaFlavor, lo: i64, v: &[i64]) -> GammaMap {
        GammaMap { flavor, lo, values: v.iter().map(|&g| Some(g)).collect() }
    }

    #[test]
    fn shift_by_one_coarse() {
        let g = gm(GammaFlavor::Coarse, 1, &[2, 3, 4, 5, 6, 7, 8, 9, 10, 11]);
        let il = interleave(&g, &g, Flavor::DPlus, 3).unwrap();
        assert_eq!(il.alpha, vec![1, 3, 5]);
        assert_eq!(il.beta, vec![2, 4, 6]);
        assert!(!il.truncated);
        assert!(check_interleaving(&il, &g, &g).is_none());
    }

    #[test]
    fn identity_gammas_interleave_diagonally() {
        let g = gm(GammaFlavor::Coarse, 1, &[1, 2, 3, 4]);
        let il = interleave(&g, &g, Flavor::DPlus, 3).unwrap();
        assert_eq!((il.alpha.clone(), il.beta.clone()), (vec![1, 2, 3], vec![1, 2, 3]));
        let g = gm(GammaFlavor::AllScale, -5, &(-5..=5).collect::<Vec<_>>());
        let il = interleave(&g, &g, Flavor::D, 3).unwrap();
        assert_eq!(il.start, -2);
        assert_eq!(il.alpha, vec![-2, -1, 0, 1, 2]);
        assert_eq!(il.beta, il.alpha);
        assert!(check_interleaving(&il, &g, &g).is_none());
    }

    #[test]
    fn uniform_interleaving() {
        let g = gm(GammaFlavor::Uniform, 1, &[2, 3, 4, 5, 6, 7, 8]);
        let il = interleave(&g, &g, Flavor::DMinus, 2).unwrap();
        assert_eq!(il.alpha, vec![1, 2, 3]);
        assert_eq!(il.beta, vec![1, 2]);
        assert!(check_interleaving(&il, &g, &g).is_none());
    }

    #[test]
    fn short_window_truncates() {
        let g = gm(GammaFlavor::Coarse, 1, &[2, 3, 4]);
        let il = interleave(&g, &g, Flavor::DPlus, 5).unwrap();
        assert!(il.truncated);
        assert!(check_interleaving(&il, &g, &g).is_none());
    }

    #[test]
    fn broken_interleaving_is_reported() {
        let g = gm(GammaFlavor::Coarse, 1, &[2, 3, 4, 5, 6]);
        let il = Interleaving { flavor: Flavor::DPlus, start: 1, alpha: vec![1, 2], beta: vec![2, 3], truncated: false };
        assert!(check_interleaving(&il, &g, &g).unwrap().contains("alpha(2)"));
    }

    fn ident(s: UltraSpace) -> MultiMap {
        MultiMap::identity(Arc::new(s))
    }

    #[test]
    fn identity_zigzag_d() {
        let phi = ident(u4());
        let (z, x, y) = build_zigzag(&phi, Flavor::D).unwrap();
        assert_eq!(verify_zigzag(&z, &x, &y).unwrap(), ZigZagVerdict::Pass { degenerate: false });
        let il = &z.interleaving;
        assert!(il.alpha[0] <= x.lo && il.beta[0] <= y.lo);
        assert!(*il.alpha.last().unwrap() >= x.hi());
        let f = induced_fz(&z, &x, &y).unwrap();
        let mut seen = f.map.clone();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 4);
        assert!(check_fz_distortion(&z, &x, &y).unwrap().is_clean());
        zigzag_chain(&z, &x, &y).unwrap();
    }

    #[test]
    fn doubling_zigzag_d() {
        let s = u4();
        let t = rescale_by_gamma(&s, &ScaleMap::new(-1, vec![-2, 0, 2, 4])).unwrap();
        let phi = MultiMap::from_fn(Arc::new(s), Arc::new(t), &[0, 1, 2, 3]).unwrap();
        let (z, x, y) = build_zigzag(&phi, Flavor::D).unwrap();
        assert!(matches!(verify_zigzag(&z, &x, &y).unwrap(), ZigZagVerdict::Pass { .. }));
        assert!(check_fz_distortion(&z, &x, &y).unwrap().is_clean());
    }

    #[test]
    fn swapped_is_the_inverse_zigzag() {
        let s = u4();
        let t = rescale_by_gamma(&s, &ScaleMap::new(-1, vec![-2, 0, 2, 4])).unwrap();
        let phi = MultiMap::from_fn(Arc::new(s), Arc::new(t), &[0, 1, 2, 3]).unwrap();
        let (z, x, y) = build_zigzag(&phi, Flavor::D).unwrap();
        let w = z.swapped().unwrap();
        assert!(matches!(verify_zigzag(&w, &y, &x).unwrap(), ZigZagVerdict::Pass { .. }));
    }

    #[test]
    fn corrupted_map_fails_verification() {
        let phi = ident(u4());
        let (mut z, x, y) = build_zigzag(&phi, Flavor::D).unwrap();
        z.maps[0].swap(0, 3);
        assert!(matches!(verify_zigzag(&z, &x, &y).unwrap(), ZigZagVerdict::Fail { .. }));
        // the distortion check then sees the rerouted threads
        let rep = check_fz_distortion(&z, &x, &y).unwrap();
        assert!(!rep.is_clean());
    }

    #[test]
    fn one_point_zigzag() {
        for f in [Flavor::D, Flavor::DPlus, Flavor::DMinus] {
            let phi = ident(UltraSpace::singleton("p"));
            let (z, x, y) = build_zigzag(&phi, f).unwrap();
            assert!(matches!(verify_zigzag(&z, &x, &y).unwrap(), ZigZagVerdict::Pass { .. }));
            assert!(check_fz_distortion(&z, &x, &y).unwrap().is_clean());
        }
    }

    #[test]
    fn dminus_identity() {
        let s = space(&["a", "b", "c"], &[&["0", "1/8", "1/2"], &["1/8", "0", "1/2"], &["1/2", "1/2", "0"]]);
        let phi = ident(s);
        let (z, x, y) = build_zigzag(&phi, Flavor::DMinus).unwrap();
        assert!(matches!(verify_zigzag(&z, &x, &y).unwrap(), ZigZagVerdict::Pass { .. }));
        assert_eq!(z.interleaving.alpha.len(), z.interleaving.beta.len() + 1);
        induced_fz(&z, &x, &y).unwrap();
        assert!(check_fz_distortion(&z, &x, &y).unwrap().is_clean());
    }

    #[test]
    fn dplus_asymorphism() {
        // collapse a and b, which sit at distance 1
        let s = u4();
        let t = space(&["ab", "c", "d"], &[&["0", "2", "8"], &["2", "0", "8"], &["8", "8", "0"]]);
        let phi = MultiMap::from_fn(Arc::new(s), Arc::new(t), &[0, 0, 1, 2]).unwrap();
        let (z, x, y) = build_zigzag(&phi, Flavor::DPlus).unwrap();
        assert!(matches!(verify_zigzag(&z, &x, &y).unwrap(), ZigZagVerdict::Pass { .. }));
        induced_fz(&z, &x, &y).unwrap();
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn identity_zigzags_verify(s in arb_space(6)) {
            let phi = ident(s);
            for f in [Flavor::D, Flavor::DPlus] {
                let (z, x, y) = build_zigzag(&phi, f).unwrap();
                let ok = matches!(verify_zigzag(&z, &x, &y).unwrap(), ZigZagVerdict::Pass { .. });
                prop_assert!(ok);
                prop_assert!(check_interleaving_of(&thread_relation(&phi, &x, &y).unwrap(), &z));
            }
        }
    }

    fn check_interleaving_of(phi: &MultiMap, z: &ZigZag) -> bool {
        let il = &z.interleaving;
        let gf = il.flavor.gamma_flavor();
        let lo = if il.flavor == Flavor::D { il.alpha[0].min(il.beta[0]) - 2 } else { 1 };
        let hi = il.alpha.iter().chain(&il.beta).max().unwrap() + 2;
        let fwd = gamma_of(&expansion_profile(phi).unwrap(), gf, lo, hi).unwrap();
        let bwd = gamma_of(&expansion_profile(&phi.inverse()).unwrap(), gf, lo, hi).unwrap();
        check_interleaving(il, &fwd, &bwd).is_none()
    }
}
