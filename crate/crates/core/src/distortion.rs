//! Pairwise distortion checks for maps between finite spaces.

use serde::Serialize;

use crate::error::{malformed, Result};
use crate::rational::Rational;
use crate::space::UltraSpace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DistortionKind {
    Bilipschitz,
    SmallScaleBilipschitz,
    LargeScale,
    Additive,
}

impl std::str::FromStr for DistortionKind {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "bilipschitz" => DistortionKind::Bilipschitz,
            "small_scale_bilipschitz" | "small-scale-bilipschitz" => DistortionKind::SmallScaleBilipschitz,
            "large_scale" | "large-scale" => DistortionKind::LargeScale,
            "additive" => DistortionKind::Additive,
            _ => return malformed(format!("unknown distortion kind {s:?}")),
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DistortionConstants {
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub k: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<Rational>,
    #[serde(rename = "C", skip_serializing_if = "Option::is_none")]
    pub c: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub pair: (usize, usize),
    pub source_distance: Rational,
    pub target_distance: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistortionReport {
    pub kind: DistortionKind,
    pub constants: DistortionConstants,
    pub witness: Option<Witness>,
    pub pairs_checked: usize,
}

impl DistortionReport {
    pub fn is_clean(&self) -> bool {
        self.witness.is_none()
    }
}

fn need(c: &Option<Rational>, name: &str, kind: DistortionKind) -> Result<Rational> {
    match c {
        Some(v) if !v.is_negative() => Ok(v.clone()),
        Some(v) => malformed(format!("constant {name} = {v} must be nonnegative")),
        None => malformed(format!("{kind:?} needs the constant {name}")),
    }
}

/// Checks `map` (source index to target index) against the inequality of
/// `kind` on every unordered pair of source points.
///
/// * bilipschitz: `dX/K <= dY <= K dX`
/// * small scale: the same, for pairs with `dX < eps`
/// * large scale: `dY <= K dX` always and `dX <= K dY` when `dX > C`
/// * additive: `dY <= dX <= dY + C`
pub fn check_distortion(
    map: &[usize],
    src: &UltraSpace,
    tgt: &UltraSpace,
    kind: DistortionKind,
    consts: &DistortionConstants,
) -> Result<DistortionReport> {
    if map.len() != src.len() {
        return malformed(format!("map covers {} of {} source points", map.len(), src.len()));
    }
    if let Some(&bad) = map.iter().find(|&&y| y >= tgt.len()) {
        return malformed(format!("map points outside the target (index {bad})"));
    }
    let (k, eps, c) = match kind {
        DistortionKind::Bilipschitz => {
            let mut seen = vec![false; tgt.len()];
            for &y in map {
                if std::mem::replace(&mut seen[y], true) {
                    return malformed(format!("bi-Lipschitz check needs an injective map; {} is hit twice", tgt.label(y)));
                }
            }
            (Some(need(&consts.k, "K", kind)?), None, None)
        }
        DistortionKind::SmallScaleBilipschitz => {
            (Some(need(&consts.k, "K", kind)?), Some(need(&consts.eps, "eps", kind)?), None)
        }
        DistortionKind::LargeScale => (Some(need(&consts.k, "K", kind)?), None, Some(need(&consts.c, "C", kind)?)),
        DistortionKind::Additive => (None, None, Some(need(&consts.c, "C", kind)?)),
    };
    let mut checked = 0;
    let mut witness = None;
    'outer: for i in 0..src.len() {
        for j in i + 1..src.len() {
            let dx = src.dist(i, j);
            let dy = tgt.dist(map[i], map[j]);
            let ok = match kind {
                DistortionKind::Bilipschitz => {
                    let k = k.as_ref().unwrap();
                    *dx <= k * dy && *dy <= k * dx
                }
                DistortionKind::SmallScaleBilipschitz => {
                    if dx >= eps.as_ref().unwrap() {
                        continue;
                    }
                    let k = k.as_ref().unwrap();
                    *dx <= k * dy && *dy <= k * dx
                }
                DistortionKind::LargeScale => {
                    let k = k.as_ref().unwrap();
                    let upper = *dy <= k * dx;
                    let lower = dx <= c.as_ref().unwrap() || *dx <= k * dy;
                    upper && lower
                }
                DistortionKind::Additive => dy <= dx && *dx <= dy + c.as_ref().unwrap(),
            };
            checked += 1;
            if !ok {
                witness = Some(Witness { pair: (i, j), source_distance: dx.clone(), target_distance: dy.clone() });
                break 'outer;
            }
        }
    }
    Ok(DistortionReport { kind, constants: DistortionConstants { k, eps, c }, witness, pairs_checked: checked })
}
