//! JSON file formats.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::chain::{label_index, Chain, Flavor};
use crate::error::{malformed, Error, Result};
use crate::multimap::MultiMap;
use crate::rational::Rational;
use crate::space::{DistanceMatrix, UltraSpace};
use crate::tower::{base_space, Tower, TowerSpec};
use crate::zigzag::{covering_chains, Interleaving, ZigZag};

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    serde_json::from_str(&text).map_err(|source| Error::Json { path: path.display().to_string(), source })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceFile {
    pub points: Vec<String>,
    pub dist: Vec<Vec<String>>,
}

impl SpaceFile {
    pub fn matrix(&self) -> Result<DistanceMatrix> {
        let rows = self
            .dist
            .iter()
            .map(|r| r.iter().map(|v| v.parse::<Rational>()).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        DistanceMatrix::new(self.points.clone(), rows)
    }

    pub fn space(&self) -> Result<UltraSpace> {
        UltraSpace::from_matrix(self.matrix()?)
    }

    pub fn of(space: &UltraSpace) -> SpaceFile {
        SpaceFile {
            points: space.labels().to_vec(),
            dist: (0..space.len()).map(|i| (0..space.len()).map(|j| space.dist(i, j).to_string()).collect()).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFile {
    pub source: SpaceFile,
    pub target: SpaceFile,
    pub pairs: Vec<(String, String)>,
}

impl MapFile {
    pub fn multimap(&self) -> Result<MultiMap> {
        let s = Arc::new(self.source.space()?);
        let t = Arc::new(self.target.space()?);
        MultiMap::from_labels(s, t, &self.pairs)
    }

    pub fn of(phi: &MultiMap) -> MapFile {
        MapFile {
            source: SpaceFile::of(&phi.source),
            target: SpaceFile::of(&phi.target),
            pairs: phi
                .pairs
                .iter()
                .map(|&(a, b)| (phi.source.label(a).to_string(), phi.target.label(b).to_string()))
                .collect(),
        }
    }
}

/// A point map given by labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionFile {
    pub map: BTreeMap<String, String>,
}

impl FunctionFile {
    /// Indices into `target` for each label of `source`, which must all be
    /// mapped.
    pub fn resolve(&self, source: &[String], target: &[String]) -> Result<Vec<usize>> {
        let index: BTreeMap<&str, usize> = target.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        if let Some(k) = self.map.keys().find(|k| !source.contains(k)) {
            return malformed(format!("map mentions unknown source label {k:?}"));
        }
        source
            .iter()
            .map(|l| {
                let y = self.map.get(l).ok_or_else(|| Error::Malformed(format!("map has no image for {l:?}")))?;
                index.get(y.as_str()).copied().ok_or_else(|| Error::Malformed(format!("unknown target label {y:?}")))
            })
            .collect()
    }
}

/// A file holding either a space or a tower (read as its base).
pub fn read_space_like(path: &Path) -> Result<UltraSpace> {
    let v: serde_json::Value = read_json(path)?;
    if v.get("nodes").is_some() {
        let spec: TowerSpec =
            serde_json::from_value(v).map_err(|source| Error::Json { path: path.display().to_string(), source })?;
        base_space(&Tower::from_spec(&spec)?)
    } else {
        let f: SpaceFile =
            serde_json::from_value(v).map_err(|source| Error::Json { path: path.display().to_string(), source })?;
        f.space()
    }
}

/// `bonds[k]` maps level `k` to level `k+1` (D, D+) or level `k+1` to level
/// `k` (D-). The flags refer to the low and high ends of the index window.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainFile {
    pub flavor: Flavor,
    pub window: (i64, i64),
    pub levels: BTreeMap<i64, Vec<String>>,
    pub bonds: BTreeMap<i64, BTreeMap<String, String>>,
    #[serde(default)]
    pub stabilized_below: bool,
    #[serde(default)]
    pub stabilized_above: bool,
}

impl ChainFile {
    pub fn chain(&self) -> Result<Chain> {
        let (lo, hi) = self.window;
        if lo > hi {
            return malformed(format!("empty window [{lo}, {hi}]"));
        }
        if let Some(k) = self.levels.keys().find(|&&k| k < lo || k > hi) {
            return malformed(format!("level {k} outside the window [{lo}, {hi}]"));
        }
        let mut levels = Vec::new();
        for k in lo..=hi {
            levels.push(self.levels.get(&k).cloned().ok_or_else(|| Error::Malformed(format!("level {k} missing")))?);
        }
        if let Some(k) = self.bonds.keys().find(|&&k| k < lo || k >= hi) {
            return malformed(format!("bond {k} outside the window"));
        }
        let minus = self.flavor == Flavor::DMinus;
        let mut bonds = Vec::new();
        for k in lo..hi {
            let i = (k - lo) as usize;
            let (dom, cod) = if minus { (&levels[i + 1], &levels[i]) } else { (&levels[i], &levels[i + 1]) };
            let b = self.bonds.get(&k).ok_or_else(|| Error::Malformed(format!("bond {k} missing")))?;
            bonds.push(resolve_map(b, dom, cod, &format!("bond {k}"))?);
        }
        let (fine, coarse) = if minus {
            (self.stabilized_above, self.stabilized_below)
        } else {
            (self.stabilized_below, self.stabilized_above)
        };
        Chain::new(self.flavor, lo, levels, bonds, fine, coarse)
    }

    pub fn of(c: &Chain) -> ChainFile {
        let minus = c.flavor == Flavor::DMinus;
        let levels = (c.lo..=c.hi()).map(|k| (k, c.level(k).to_vec())).collect();
        let bonds = (c.lo..c.hi())
            .map(|k| {
                let (d, t) = if minus { (k + 1, k) } else { (k, k + 1) };
                let b = &c.bonds[(k - c.lo) as usize];
                (k, b.iter().enumerate().map(|(x, &y)| (c.level(d)[x].clone(), c.level(t)[y].clone())).collect())
            })
            .collect();
        let (below, above) = if minus {
            (c.stabilized_coarse, c.stabilized_fine)
        } else {
            (c.stabilized_fine, c.stabilized_coarse)
        };
        ChainFile { flavor: c.flavor, window: (c.lo, c.hi()), levels, bonds, stabilized_below: below, stabilized_above: above }
    }
}

fn resolve_map(m: &BTreeMap<String, String>, dom: &[String], cod: &[String], what: &str) -> Result<Vec<usize>> {
    if m.len() != dom.len() {
        return malformed(format!("{what} lists {} of {} elements", m.len(), dom.len()));
    }
    dom.iter()
        .map(|x| {
            let y = m.get(x).ok_or_else(|| Error::Malformed(format!("{what} has no image for {x:?}")))?;
            cod.iter().position(|c| c == y).ok_or_else(|| Error::Malformed(format!("{what} sends {x:?} to unknown {y:?}")))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VFile {
    pub from_level: i64,
    pub map: BTreeMap<String, String>,
}

/// `from_level` is the subscript `p` of `V_p`. Without `start` the
/// interleaving begins at index 1 (D+, D-) or 0 (D).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZigZagFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flavor: Option<Flavor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<i64>,
    pub alpha: Vec<i64>,
    pub beta: Vec<i64>,
    #[serde(rename = "V")]
    pub v: Vec<VFile>,
}

impl ZigZagFile {
    /// Resolves the labels against the two chains.
    pub fn zigzag(&self, x: &Chain, y: &Chain) -> Result<ZigZag> {
        let flavor = self.flavor.unwrap_or(x.flavor);
        if flavor != x.flavor || flavor != y.flavor {
            return malformed("zig-zag and chains have different flavors");
        }
        let start = self.start.unwrap_or(if flavor == Flavor::D { 0 } else { 1 });
        let il = Interleaving { flavor, start, alpha: self.alpha.clone(), beta: self.beta.clone(), truncated: false };
        let (x, y) = covering_chains(&il, x, y)?;
        let z = il.z_levels();
        if self.v.len() + 1 != z.len() {
            return malformed(format!("{} levels need {} V maps, got {}", z.len(), z.len() - 1, self.v.len()));
        }
        let chain = |s| if s == crate::zigzag::Side::X { &x } else { &y };
        let mut maps = Vec::new();
        for (j, v) in self.v.iter().enumerate() {
            let p = il.z_start() + j as i64;
            if v.from_level != p {
                return malformed(format!("V maps out of order: expected V_{p}, found V_{}", v.from_level));
            }
            let (d, c) = if flavor == Flavor::DMinus { (z[j + 1], z[j]) } else { (z[j], z[j + 1]) };
            let dom = label_index(chain(d.0), d.1);
            let cod = label_index(chain(c.0), c.1);
            if v.map.len() != dom.len() {
                return malformed(format!("V_{p} lists {} of {} elements", v.map.len(), dom.len()));
            }
            let mut m = vec![0; dom.len()];
            for (a, b) in &v.map {
                let i = *dom.get(a.as_str()).ok_or_else(|| Error::Malformed(format!("V_{p}: unknown element {a:?}")))?;
                m[i] = *cod.get(b.as_str()).ok_or_else(|| Error::Malformed(format!("V_{p}: unknown element {b:?}")))?;
            }
            maps.push(m);
        }
        Ok(ZigZag { interleaving: il, maps })
    }

    pub fn of(z: &ZigZag, x: &Chain, y: &Chain) -> Result<ZigZagFile> {
        let il = &z.interleaving;
        let (x, y) = covering_chains(il, x, y)?;
        let lv = il.z_levels();
        let chain = |s| if s == crate::zigzag::Side::X { &x } else { &y };
        let v = z
            .maps
            .iter()
            .enumerate()
            .map(|(j, m)| {
                let (d, c) = if il.flavor == Flavor::DMinus { (lv[j + 1], lv[j]) } else { (lv[j], lv[j + 1]) };
                let (dl, cl) = (chain(d.0).level(d.1), chain(c.0).level(c.1));
                VFile {
                    from_level: il.z_start() + j as i64,
                    map: m.iter().enumerate().map(|(a, &b)| (dl[a].clone(), cl[b].clone())).collect(),
                }
            })
            .collect();
        Ok(ZigZagFile { flavor: Some(il.flavor), start: Some(il.start), alpha: il.alpha.clone(), beta: il.beta.clone(), v })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::chain_of_space;
    use crate::space::fixtures::*;
    use crate::zigzag::{build_zigzag, verify_zigzag, ZigZagVerdict};

    #[test]
    fn space_round_trip() {
        let s = u4();
        let f = SpaceFile::of(&s);
        let text = serde_json::to_string(&f).unwrap();
        let back: SpaceFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.space().unwrap().labels(), s.labels());
        assert_eq!(back.dist[0][3], "8");
    }

    #[test]
    fn bad_rational_is_malformed() {
        let f = SpaceFile { points: vec!["a".into(), "b".into()], dist: vec![vec!["0".into(), "x".into()], vec!["x".into(), "0".into()]] };
        assert!(matches!(f.matrix(), Err(Error::Malformed(_))));
    }

    #[test]
    fn chain_round_trip() {
        for fl in [Flavor::D, Flavor::DPlus] {
            let c = chain_of_space(&u4(), fl).unwrap();
            let f = ChainFile::of(&c);
            let text = serde_json::to_string(&f).unwrap();
            let back: ChainFile = serde_json::from_str(&text).unwrap();
            let d = back.chain().unwrap();
            assert_eq!((d.lo, &d.levels, &d.bonds), (c.lo, &c.levels, &c.bonds));
            assert_eq!((d.stabilized_fine, d.stabilized_coarse), (c.stabilized_fine, c.stabilized_coarse));
        }
    }

    #[test]
    fn chain_file_missing_bond() {
        let c = chain_of_space(&u4(), Flavor::D).unwrap();
        let mut f = ChainFile::of(&c);
        f.bonds.remove(&0);
        assert!(f.chain().is_err());
    }

    #[test]
    fn zigzag_round_trip() {
        let phi = MultiMap::identity(Arc::new(u4()));
        let (z, x, y) = build_zigzag(&phi, Flavor::D).unwrap();
        let f = ZigZagFile::of(&z, &x, &y).unwrap();
        let text = serde_json::to_string(&f).unwrap();
        assert!(text.contains("\"V\""));
        let back: ZigZagFile = serde_json::from_str(&text).unwrap();
        let w = back.zigzag(&x, &y).unwrap();
        assert_eq!(w, z);
        assert!(matches!(verify_zigzag(&w, &x, &y).unwrap(), ZigZagVerdict::Pass { .. }));
    }

    #[test]
    fn function_file_needs_every_point() {
        let f = FunctionFile { map: [("a".to_string(), "x".to_string())].into_iter().collect() };
        let src = vec!["a".to_string(), "b".to_string()];
        let tgt = vec!["x".to_string()];
        assert!(f.resolve(&src, &tgt).is_err());
    }
}
