//! Graphviz output: one rank per level, edges for bonds.

use std::fmt::Write;

use crate::chain::{Chain, Flavor};
use crate::error::Result;
use crate::tower::Tower;
use crate::zigzag::{covering_chains, Side, ZigZag};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

struct Layers {
    name: &'static str,
    ranks: Vec<(String, Vec<String>)>,
    edges: Vec<((usize, usize), (usize, usize))>,
}

impl Layers {
    fn render(&self) -> String {
        let mut out = String::new();
        writeln!(out, "digraph {} {{", self.name).unwrap();
        writeln!(out, "  rankdir=BT;").unwrap();
        writeln!(out, "  node [shape=box];").unwrap();
        for (r, (title, nodes)) in self.ranks.iter().enumerate() {
            writeln!(out, "  subgraph rank{r} {{").unwrap();
            writeln!(out, "    rank=same;").unwrap();
            writeln!(out, "    r{r} [shape=plaintext, label={}];", quote(title)).unwrap();
            for (i, l) in nodes.iter().enumerate() {
                writeln!(out, "    n{r}_{i} [label={}];", quote(l)).unwrap();
            }
            writeln!(out, "  }}").unwrap();
        }
        for r in 1..self.ranks.len() {
            writeln!(out, "  r{} -> r{r} [style=invis];", r - 1).unwrap();
        }
        for &((r0, i0), (r1, i1)) in &self.edges {
            writeln!(out, "  n{r0}_{i0} -> n{r1}_{i1};").unwrap();
        }
        out.push_str("}\n");
        out
    }
}

/// Ranks run from the finest level up.
pub fn chain_dot(c: &Chain) -> String {
    let ks: Vec<i64> = match c.flavor {
        Flavor::DMinus => (c.lo..=c.hi()).rev().collect(),
        _ => (c.lo..=c.hi()).collect(),
    };
    let ranks = ks.iter().map(|&k| (format!("{k}"), c.level(k).to_vec())).collect();
    let mut edges = Vec::new();
    for r in 0..ks.len().saturating_sub(1) {
        for x in 0..c.level(ks[r]).len() {
            edges.push(((r, x), (r + 1, c.coarsen(ks[r], x, ks[r + 1]))));
        }
    }
    Layers { name: "chain", ranks, edges }.render()
}

pub fn tower_dot(t: &Tower) -> String {
    let levels: Vec<Vec<usize>> = (1..=t.height()).map(|n| t.level_nodes(n)).collect();
    let ranks = levels
        .iter()
        .enumerate()
        .map(|(i, l)| (format!("{}", i + 1), l.iter().map(|&x| t.id(x).to_string()).collect()))
        .collect();
    let mut edges = Vec::new();
    for (r, l) in levels.iter().enumerate() {
        for (i, &x) in l.iter().enumerate() {
            if let Some(s) = t.succ(x) {
                let j = levels[r + 1].iter().position(|&y| y == s).unwrap();
                edges.push(((r, i), (r + 1, j)));
            }
        }
    }
    Layers { name: "tower", ranks, edges }.render()
}

/// Alternating `X_α(i)`, `Y_β(i)` ranks in position order, with the `V` maps.
pub fn zigzag_dot(z: &ZigZag, x: &Chain, y: &Chain) -> Result<String> {
    let il = &z.interleaving;
    let (x, y) = covering_chains(il, x, y)?;
    let levels = il.z_levels();
    let ranks = levels
        .iter()
        .enumerate()
        .map(|(j, &(s, k))| {
            let p = il.z_start() + j as i64;
            match s {
                Side::X => (format!("Z{p} = X{k}"), x.level(k).to_vec()),
                Side::Y => (format!("Z{p} = Y{k}"), y.level(k).to_vec()),
            }
        })
        .collect();
    let mut edges = Vec::new();
    for (j, v) in z.maps.iter().enumerate() {
        for (a, &b) in v.iter().enumerate() {
            edges.push(if il.flavor == Flavor::DMinus { ((j + 1, a), (j, b)) } else { ((j, a), (j + 1, b)) });
        }
    }
    Ok(Layers { name: "zigzag", ranks, edges }.render())
}
