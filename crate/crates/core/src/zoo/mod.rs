//! Deterministic generators for benchmark and gadget games.
//!
//! Preset names follow the `nKr`, `nLbrs`, `nDd` convention (players,
//! bets, ranks, suits, die faces); a bracketed list names the MIN team,
//! e.g. `3K3[1,3]` is three-player Kuhn with players 1 and 3 against 2.

mod dice;
mod gadgets;
mod poker;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::Game;

pub use dice::liars_dice;
pub use gadgets::{inflation_counterexample_fig9, public_counterexample_fig8, signaling_fig2, worst_case};
pub use poker::{kuhn, leduc};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Kuhn,
    Leduc,
    LiarsDice,
    SignalingFig2,
    WorstCase,
    PublicCounterexampleFig8,
    InflationCounterexampleFig9,
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.replace('-', "_").as_str() {
            "kuhn" => Family::Kuhn,
            "leduc" => Family::Leduc,
            "liars_dice" | "dice" => Family::LiarsDice,
            "signaling_fig2" | "fig2" => Family::SignalingFig2,
            "worst_case" => Family::WorstCase,
            "public_counterexample_fig8" | "fig8" => Family::PublicCounterexampleFig8,
            "inflation_counterexample_fig9" | "fig9" => Family::InflationCounterexampleFig9,
            other => return Err(Error::Params(format!("unknown family {other:?}"))),
        })
    }
}

/// Team assignment by 1-based player index.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Teams {
    pub max: Vec<u32>,
    pub min: Vec<u32>,
}

impl Teams {
    /// Completes a partial assignment for `n` players: missing side gets the
    /// complement; with nothing given, player 1 plays against the rest.
    pub fn resolve(n: u32, max: &[u32], min: &[u32]) -> Result<Teams> {
        let all: Vec<u32> = (1..=n).collect();
        let (max, min) = match (max.is_empty(), min.is_empty()) {
            (true, true) => (vec![1], all[1..].to_vec()),
            (false, true) => (max.to_vec(), all.iter().copied().filter(|p| !max.contains(p)).collect()),
            (true, false) => (all.iter().copied().filter(|p| !min.contains(p)).collect(), min.to_vec()),
            (false, false) => (max.to_vec(), min.to_vec()),
        };
        let mut both: Vec<u32> = max.iter().chain(min.iter()).copied().collect();
        both.sort_unstable();
        if both != all || max.is_empty() || min.is_empty() {
            return Err(Error::Params(format!("teams {max:?} vs {min:?} must partition players 1..={n}")));
        }
        Ok(Teams { max, min })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZooSpec {
    pub family: Family,
    #[serde(default)]
    pub players: u32,
    #[serde(default)]
    pub ranks: u32,
    #[serde(default)]
    pub bets: u32,
    #[serde(default)]
    pub suits: u32,
    #[serde(default)]
    pub faces: u32,
    #[serde(default)]
    pub k: u32,
    #[serde(default)]
    pub branching: u32,
    #[serde(default)]
    pub depth: u32,
    #[serde(default)]
    pub c: u32,
    #[serde(default)]
    pub teams: Teams,
}

impl ZooSpec {
    pub fn new(family: Family) -> Self {
        ZooSpec {
            family,
            players: 0,
            ranks: 0,
            bets: 0,
            suits: 0,
            faces: 0,
            k: 0,
            branching: 0,
            depth: 0,
            c: 0,
            teams: Teams::default(),
        }
    }

    pub fn kuhn(n: u32, r: u32, min: &[u32]) -> Self {
        ZooSpec { players: n, ranks: r, teams: Teams { max: vec![], min: min.to_vec() }, ..Self::new(Family::Kuhn) }
    }

    pub fn leduc(n: u32, b: u32, r: u32, s: u32, min: &[u32]) -> Self {
        ZooSpec {
            players: n,
            bets: b,
            ranks: r,
            suits: s,
            teams: Teams { max: vec![], min: min.to_vec() },
            ..Self::new(Family::Leduc)
        }
    }

    pub fn dice(n: u32, d: u32, min: &[u32]) -> Self {
        ZooSpec { players: n, faces: d, teams: Teams { max: vec![], min: min.to_vec() }, ..Self::new(Family::LiarsDice) }
    }

    pub fn worst_case(k: u32, b: u32, d: u32) -> Self {
        ZooSpec { k, branching: b, depth: d, ..Self::new(Family::WorstCase) }
    }

    pub fn fig9(c: u32) -> Self {
        ZooSpec { c, ..Self::new(Family::InflationCounterexampleFig9) }
    }
}

pub(crate) fn player_names(n: u32) -> Vec<String> {
    std::iter::once("chance".to_string()).chain((1..=n).map(|p| format!("P{p}"))).collect()
}

/// MAX utility from per-player chip deltas (index 0 = player 1).
pub(crate) fn team_utility(net: &[f64], teams: &Teams) -> Result<f64> {
    let total: f64 = net.iter().sum();
    if total.abs() > 1e-9 {
        return Err(Error::invalid(format!("chip deltas {net:?} do not sum to zero")));
    }
    Ok(teams.max.iter().map(|&p| net[p as usize - 1]).sum())
}

pub fn generate(spec: &ZooSpec) -> Result<Game> {
    let teams = |n: u32| Teams::resolve(n, &spec.teams.max, &spec.teams.min);
    match spec.family {
        Family::Kuhn => kuhn(spec.players, spec.ranks, &teams(spec.players)?),
        Family::Leduc => leduc(spec.players, spec.bets, spec.ranks, spec.suits, &teams(spec.players)?),
        Family::LiarsDice => liars_dice(spec.players, spec.faces, &teams(spec.players)?),
        Family::SignalingFig2 => signaling_fig2(),
        Family::WorstCase => worst_case(spec.k, spec.branching, spec.depth),
        Family::PublicCounterexampleFig8 => public_counterexample_fig8(),
        Family::InflationCounterexampleFig9 => inflation_counterexample_fig9(spec.c),
    }
}

/// Parses a preset name such as `3K3[1,3]`, `3L133`, `3D2[2,3]`, `2K3`,
/// `fig2`, `fig8`, `fig9-C16` or `wc-k2-b2-d6`.
pub fn preset(name: &str) -> Result<ZooSpec> {
    let bad = || Error::Params(format!("unknown preset {name:?}"));
    match name {
        "fig2" => return Ok(ZooSpec::new(Family::SignalingFig2)),
        "fig8" => return Ok(ZooSpec::new(Family::PublicCounterexampleFig8)),
        _ => {}
    }
    if let Some(c) = name.strip_prefix("fig9-C") {
        return Ok(ZooSpec::fig9(c.parse().map_err(|_| bad())?));
    }
    if let Some(rest) = name.strip_prefix("wc-") {
        let mut vals = [0u32; 3];
        let parts: Vec<&str> = rest.split('-').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        for (slot, (part, prefix)) in vals.iter_mut().zip(parts.iter().zip(["k", "b", "d"])) {
            *slot = part.strip_prefix(prefix).and_then(|v| v.parse().ok()).ok_or_else(bad)?;
        }
        return Ok(ZooSpec::worst_case(vals[0], vals[1], vals[2]));
    }
    let (body, min) = match name.split_once('[') {
        Some((body, list)) => {
            let list = list.strip_suffix(']').ok_or_else(bad)?;
            let min: Vec<u32> = list.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?;
            (body, min)
        }
        None => (name, Vec::new()),
    };
    let pos = body.find(|c: char| c.is_ascii_alphabetic()).ok_or_else(bad)?;
    let n: u32 = body[..pos].parse().map_err(|_| bad())?;
    let letter = &body[pos..pos + 1];
    let digits: Vec<u32> = body[pos + 1..].chars().map(|c| c.to_digit(10).ok_or_else(bad)).collect::<Result<_>>()?;
    match (letter, digits.as_slice()) {
        ("K", _) => {
            let r = body[pos + 1..].parse().map_err(|_| bad())?;
            Ok(ZooSpec::kuhn(n, r, &min))
        }
        ("L", [b, r, s]) => Ok(ZooSpec::leduc(n, *b, *r, *s, &min)),
        ("D", _) => {
            let d = body[pos + 1..].parse().map_err(|_| bad())?;
            Ok(ZooSpec::dice(n, d, &min))
        }
        _ => Err(bad()),
    }
}

/// Named catalog of desk-scale instances.
pub fn list_presets() -> Vec<(String, ZooSpec)> {
    let mut names: Vec<String> = vec!["2K3".into(), "2K4".into(), "2L133".into(), "2D2".into()];
    for base in ["3K3", "3K4", "3L133", "3D2"] {
        for team in ["[1,2]", "[1,3]", "[2,3]"] {
            names.push(format!("{base}{team}"));
        }
    }
    names.extend(
        ["fig2", "fig8", "fig9-C6", "fig9-C8", "fig9-C16", "wc-k1-b2-d5", "wc-k2-b2-d6", "wc-k1-b3-d6"]
            .iter()
            .map(|s| s.to_string()),
    );
    names.into_iter().map(|n| {
        let spec = preset(&n).expect("catalog names parse");
        (n, spec)
    }).collect()
}
