//! Command-line front end. Every verb prints one JSON report (or a file
//! body: chain, space, zig-zag, DOT) and sets the exit status: 0 for a
//! valid or clean verdict, 1 for a violation, 2 for input that cannot be
//! processed.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::chain::{chain_of_space, end_space, Flavor};
use crate::distortion::{check_distortion, DistortionConstants, DistortionKind, DistortionReport};
use crate::dot::{chain_dot, tower_dot, zigzag_dot};
use crate::error::{malformed, Error, Result};
use crate::io::{read_json, read_space_like, ChainFile, FunctionFile, MapFile, SpaceFile, ZigZagFile};
use crate::multimap::{check_gamma_contract, expansion_profile, gamma_of, GammaMap, MultiMap};
use crate::rational::Rational;
use crate::space::{UltraSpace, UltrametricVerdict, ViolationKind};
use crate::tower::{
    all_pass, base_space, path_metric, validate_tower, verify_admissible, zigzag_to_admissible, ConditionVerdict,
    Tower, TowerSpec,
};
use crate::transform::{rescale_by_gamma, rescale_by_sequence, ScaleMap};
use crate::zigzag::{check_fz_distortion, check_interleaving, interleave, verify_zigzag, ZigZagVerdict};

#[derive(Debug, Parser)]
#[command(name = "ultrachain", version, about = "Finite ultrametric spaces, their chains, zig-zags and towers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the output to this file instead of standard output
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the strong triangle inequality
    Check { space: PathBuf },
    /// Closed-ball partition at a radius
    Partition {
        space: PathBuf,
        #[arg(long)]
        radius: Rational,
    },
    /// Chain of ball partitions of a space
    Chain {
        space: PathBuf,
        #[arg(long, default_value = "D")]
        flavor: Flavor,
    },
    /// End space of a chain
    Endspace { chain: PathBuf },
    /// Expansion profile of a relation
    Expansion { map: PathBuf },
    /// Scale map of a relation, checked against its contract
    Gamma {
        map: PathBuf,
        #[arg(long)]
        flavor: Flavor,
        #[arg(long, allow_hyphen_values = true)]
        lo: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        hi: Option<i64>,
    },
    /// Interleaving sequences of a relation and its inverse
    Interleave {
        map: PathBuf,
        #[arg(long)]
        flavor: Flavor,
        #[arg(long, default_value_t = 8)]
        length: usize,
    },
    /// Common zig-zag chain of a relation between two spaces
    ZigzagBuild {
        map: PathBuf,
        #[arg(long, default_value = "D")]
        flavor: Flavor,
    },
    /// Check a zig-zag against two chains
    ZigzagVerify {
        zigzag: PathBuf,
        x: PathBuf,
        y: PathBuf,
        /// Also compare the end metrics along the induced thread map
        #[arg(long)]
        distortion: bool,
    },
    /// Check the tower conditions
    TowerValidate { tower: PathBuf },
    /// Path metric between two nodes, or on the whole base
    TowerMetric { tower: PathBuf, x: Option<String>, y: Option<String> },
    /// Admissibility of a node map, or of the map assembled from a zig-zag
    Admissible {
        t1: PathBuf,
        t2: PathBuf,
        #[arg(long, required_unless_present = "zigzag")]
        map: Option<PathBuf>,
        #[arg(long, conflicts_with = "map")]
        zigzag: Option<PathBuf>,
    },
    /// Rescale distances by a scale map or a sequence of levels
    Rescale {
        space: PathBuf,
        /// `lo:g1,g2,...`; distances in (2^g(k-1), 2^g(k)] become 2^k
        #[arg(long, allow_hyphen_values = true, required_unless_present = "sequence")]
        gamma: Option<ScaleMap>,
        /// `n1,n2,...` increasing
        #[arg(long, conflicts_with = "gamma")]
        sequence: Option<String>,
    },
    /// Distortion of a point map between two spaces (or tower bases)
    Distortion {
        #[arg(long)]
        kind: DistortionKind,
        #[arg(long = "K")]
        k: Option<Rational>,
        #[arg(long)]
        eps: Option<Rational>,
        #[arg(long = "C")]
        c: Option<i64>,
        map: PathBuf,
        source: PathBuf,
        target: PathBuf,
    },
    /// Graphviz rendering of a chain, a tower, or a zig-zag (with its two chains)
    Dot { file: PathBuf, chains: Vec<PathBuf> },
}

/// Exit status and what goes to standard output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
}

enum Body {
    Json(Value),
    Text(String),
}

fn report(code: i32, v: Value) -> Result<(i32, Body)> {
    Ok((code, Body::Json(v)))
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializable")
}

pub fn run(cli: &Cli) -> Outcome {
    let (code, body) = match dispatch(&cli.command) {
        Ok(r) => r,
        Err(e) => (2, Body::Json(json!({ "error": error_kind(&e), "message": e.to_string() }))),
    };
    let text = match body {
        Body::Json(v) => serde_json::to_string_pretty(&v).unwrap() + "\n",
        Body::Text(s) => s,
    };
    match (&cli.out, code) {
        (Some(path), 0 | 1) => match std::fs::write(path, &text) {
            Ok(()) => Outcome { code, stdout: String::new() },
            Err(e) => Outcome {
                code: 2,
                stdout: serde_json::to_string_pretty(&json!({ "error": "io", "message": format!("{}: {e}", path.display()) }))
                    .unwrap()
                    + "\n",
            },
        },
        _ => Outcome { code, stdout: text },
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Malformed(_) => "malformed",
        Error::OutOfWindow(_) => "out_of_window",
        Error::Domain(_) => "domain",
        Error::ContractViolation(_) => "contract_violation",
        Error::Precondition(_) => "precondition",
        Error::Io { .. } => "io",
        Error::Json { .. } => "json",
    }
}

fn map_file(p: &Path) -> Result<MultiMap> {
    read_json::<MapFile>(p)?.multimap()
}

fn chain_file(p: &Path) -> Result<crate::chain::Chain> {
    read_json::<ChainFile>(p)?.chain()
}

fn tower_file(p: &Path) -> Result<Tower> {
    Tower::from_spec(&read_json::<TowerSpec>(p)?)
}

fn verdicts(v: &[ConditionVerdict]) -> Value {
    to_value(&v)
}

fn distortion_value(rep: &DistortionReport, labels: (&[String], &[String]), map: Option<&[usize]>) -> Value {
    let mut v = json!({
        "kind": to_value(&rep.kind),
        "constants": to_value(&rep.constants),
        "clean": rep.is_clean(),
        "pairs_checked": rep.pairs_checked,
    });
    if let Some(w) = &rep.witness {
        let (a, b) = w.pair;
        let mut wv = json!({
            "pair": [labels.0[a], labels.0[b]],
            "source_distance": w.source_distance.to_string(),
            "target_distance": w.target_distance.to_string(),
        });
        if let Some(m) = map {
            wv["images"] = json!([labels.1[m[a]], labels.1[m[b]]]);
        }
        v["witness"] = wv;
    }
    v
}

fn gamma_value(g: &GammaMap) -> Value {
    json!({ "flavor": to_value(&g.flavor), "lo": g.lo, "values": g.values })
}

fn scale_window(phi: &MultiMap, flavor: Flavor, pad: i64) -> Result<(i64, i64)> {
    let x = chain_of_space(&phi.source, flavor)?;
    let y = chain_of_space(&phi.target, flavor)?;
    Ok(match flavor {
        Flavor::D => (x.lo.min(y.lo) - pad, x.hi().max(y.hi()) + pad),
        _ => (1, x.hi().max(y.hi()) + pad),
    })
}

fn gammas(phi: &MultiMap, flavor: Flavor, lo: i64, hi: i64) -> Result<(GammaMap, GammaMap)> {
    let mut rf = expansion_profile(phi)?;
    let mut rb = expansion_profile(&phi.inverse())?;
    if flavor == Flavor::DMinus {
        rf = rf.with_uniform_cap();
        rb = rb.with_uniform_cap();
    }
    let gf = flavor.gamma_flavor();
    Ok((gamma_of(&rf, gf, lo, hi)?, gamma_of(&rb, gf, lo, hi)?))
}

fn dispatch(cmd: &Command) -> Result<(i32, Body)> {
    match cmd {
        Command::Check { space } => {
            let m = read_json::<SpaceFile>(space)?.matrix()?;
            match m.verify_ultrametric() {
                UltrametricVerdict::Valid => report(0, json!({ "ultrametric": "valid" })),
                UltrametricVerdict::Violation { triple: (x, y, z), kind } => {
                    let l = m.labels();
                    let kind = match kind {
                        ViolationKind::StrongTriangle => "strong_triangle",
                        ViolationKind::Isosceles => "isosceles",
                    };
                    report(1, json!({ "ultrametric": "violation", "kind": kind, "triple": [l[x], l[y], l[z]] }))
                }
            }
        }
        Command::Partition { space, radius } => {
            let s = read_json::<SpaceFile>(space)?.space()?;
            let p = s.ball_partition(radius)?;
            let blocks: Vec<Vec<&str>> = p.blocks.iter().map(|b| b.iter().map(|&i| s.label(i)).collect()).collect();
            report(0, json!({ "radius": radius.to_string(), "blocks": blocks }))
        }
        Command::Chain { space, flavor } => {
            let s = read_json::<SpaceFile>(space)?.space()?;
            report(0, to_value(&ChainFile::of(&chain_of_space(&s, *flavor)?)))
        }
        Command::Endspace { chain } => {
            let e = end_space(&chain_file(chain)?)?;
            report(0, to_value(&SpaceFile::of(&e.space)))
        }
        Command::Expansion { map } => {
            let rho = expansion_profile(&map_file(map)?)?;
            let bp: Vec<[String; 2]> = rho.breakpoints.iter().map(|(t, v)| [t.to_string(), v.to_string()]).collect();
            report(0, json!({ "breakpoints": bp, "lookup": to_value(&rho.lookup) }))
        }
        Command::Gamma { map, flavor, lo, hi } => {
            let phi = map_file(map)?;
            let (dlo, dhi) = scale_window(&phi, *flavor, 0)?;
            let (lo, hi) = (lo.unwrap_or(dlo), hi.unwrap_or(dhi));
            let (g, _) = gammas(&phi, *flavor, lo, hi)?;
            let mut v = gamma_value(&g);
            match check_gamma_contract(&phi, &g) {
                None => {
                    v["contract"] = json!("holds");
                    report(0, v)
                }
                Some((a, b, k)) => {
                    v["contract"] = json!({ "violation": { "x": phi.source.label(a), "x2": phi.source.label(b), "k": k } });
                    report(1, v)
                }
            }
        }
        Command::Interleave { map, flavor, length } => {
            let phi = map_file(map)?;
            let (lo, hi) = scale_window(&phi, *flavor, 2 * *length as i64)?;
            let (f, b) = gammas(&phi, *flavor, lo, hi)?;
            let il = interleave(&f, &b, *flavor, *length)?;
            let mut v = to_value(&il);
            match check_interleaving(&il, &f, &b) {
                None => report(0, v),
                Some(msg) => {
                    v["violation"] = json!(msg);
                    report(1, v)
                }
            }
        }
        Command::ZigzagBuild { map, flavor } => {
            let phi = map_file(map)?;
            let (z, x, y) = crate::zigzag::build_zigzag(&phi, *flavor)?;
            report(0, to_value(&ZigZagFile::of(&z, &x, &y)?))
        }
        Command::ZigzagVerify { zigzag, x, y, distortion } => {
            let (x, y) = (chain_file(x)?, chain_file(y)?);
            let z = read_json::<ZigZagFile>(zigzag)?.zigzag(&x, &y)?;
            match verify_zigzag(&z, &x, &y)? {
                ZigZagVerdict::Fail { p, reason } => report(1, json!({ "verdict": "fail", "index": p, "reason": reason })),
                ZigZagVerdict::Pass { degenerate } => {
                    let mut v = json!({ "verdict": "pass", "degenerate": degenerate });
                    let mut code = 0;
                    if *distortion {
                        let rep = check_fz_distortion(&z, &x, &y)?;
                        let (xa, yb) = crate::zigzag::side_subchains(&z, &x, &y)?;
                        let la = xa.thread_labels();
                        let lb = yb.thread_labels();
                        v["fz_distortion"] = distortion_value(&rep, (&la, &lb), None);
                        if !rep.is_clean() {
                            code = 1;
                        }
                    }
                    report(code, v)
                }
            }
        }
        Command::TowerValidate { tower } => {
            let v = validate_tower(&read_json::<TowerSpec>(tower)?)?;
            let ok = all_pass(&v);
            report(if ok { 0 } else { 1 }, json!({ "valid": ok, "conditions": verdicts(&v) }))
        }
        Command::TowerMetric { tower, x, y } => {
            let t = tower_file(tower)?;
            match (x, y) {
                (Some(a), Some(b)) => {
                    let find = |s: &str| t.index_of(s).ok_or_else(|| Error::Malformed(format!("unknown node {s:?}")));
                    let d = path_metric(&t, find(a)?, find(b)?);
                    report(0, json!({ "x": a, "y": b, "d": d }))
                }
                (None, None) => {
                    let b = base_space(&t)?;
                    report(0, json!({ "base": to_value(&SpaceFile::of(&b)), "ultrametric": "valid" }))
                }
                _ => malformed("give two nodes or none"),
            }
        }
        Command::Admissible { t1, t2, map, zigzag } => {
            let (a, b) = (tower_file(t1)?, tower_file(t2)?);
            if let Some(zp) = zigzag {
                let x = crate::tower::chain_of_tower(&a)?;
                let y = crate::tower::chain_of_tower(&b)?;
                let z = read_json::<ZigZagFile>(zp)?.zigzag(&x, &y)?;
                let m = zigzag_to_admissible(&z, &a, &b)?;
                let ok = m.check.is_admissible();
                let morphism: std::collections::BTreeMap<&str, &str> = (0..m.source.len())
                    .filter_map(|i| m.check.phi[i].map(|j| (m.source.id(i), m.target.id(j))))
                    .collect();
                return report(
                    if ok { 0 } else { 1 },
                    json!({ "admissible": ok, "conditions": verdicts(&m.check.verdicts), "morphism": morphism }),
                );
            }
            let f: FunctionFile = read_json(map.as_ref().unwrap())?;
            let mut phi = vec![None; a.len()];
            for (s, t) in &f.map {
                let i = a.index_of(s).ok_or_else(|| Error::Malformed(format!("unknown node {s:?} in T1")))?;
                let j = b.index_of(t).ok_or_else(|| Error::Malformed(format!("unknown node {t:?} in T2")))?;
                phi[i] = Some(j);
            }
            let v = verify_admissible(&phi, &a, &b)?;
            let ok = all_pass(&v);
            report(if ok { 0 } else { 1 }, json!({ "admissible": ok, "conditions": verdicts(&v) }))
        }
        Command::Rescale { space, gamma, sequence } => {
            let s = read_json::<SpaceFile>(space)?.space()?;
            let out: UltraSpace = match (gamma, sequence) {
                (Some(g), _) => rescale_by_gamma(&s, g)?,
                (None, Some(q)) => {
                    let seq = q
                        .split(',')
                        .map(|t| t.trim().parse::<i64>().map_err(|e| Error::Malformed(format!("bad level {t:?}: {e}"))))
                        .collect::<Result<Vec<_>>>()?;
                    rescale_by_sequence(&s, &seq)?
                }
                (None, None) => return malformed("give --gamma or --sequence"),
            };
            report(0, to_value(&SpaceFile::of(&out)))
        }
        Command::Distortion { kind, k, eps, c, map, source, target } => {
            let f: FunctionFile = read_json(map)?;
            let (s, t) = (read_space_like(source)?, read_space_like(target)?);
            let m = f.resolve(s.labels(), t.labels())?;
            let consts =
                DistortionConstants { k: k.clone(), eps: eps.clone(), c: c.map(Rational::from_integer) };
            let rep = check_distortion(&m, &s, &t, *kind, &consts)?;
            let v = distortion_value(&rep, (s.labels(), t.labels()), Some(&m));
            report(if rep.is_clean() { 0 } else { 1 }, v)
        }
        Command::Dot { file, chains } => {
            let v: Value = read_json(file)?;
            let as_err = |source| Error::Json { path: file.display().to_string(), source };
            let text = if v.get("nodes").is_some() {
                tower_dot(&Tower::from_spec(&serde_json::from_value(v).map_err(as_err)?)?)
            } else if v.get("V").is_some() {
                let [xp, yp] = chains.as_slice() else {
                    return malformed("a zig-zag needs its two chain files");
                };
                let (x, y) = (chain_file(xp)?, chain_file(yp)?);
                let z = serde_json::from_value::<ZigZagFile>(v).map_err(as_err)?.zigzag(&x, &y)?;
                zigzag_dot(&z, &x, &y)?
            } else {
                chain_dot(&serde_json::from_value::<ChainFile>(v).map_err(as_err)?.chain()?)
            };
            Ok((0, Body::Text(text)))
        }
    }
}
