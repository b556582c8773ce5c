//! Liar's Dice with one `d`-sided die per player.
//!
//! Bids are (count, face) pairs with count in 1..=n and face in 1..=d,
//! ordered lexicographically by (count, face). Player 1 opens with a bid;
//! each later player either raises to a strictly higher bid or calls
//! "liar". On a call the bid holds if at least `count` dice show `face`;
//! the loser of the challenge pays 1 to the winner.

use crate::error::{Error, Result};
use crate::game::{Game, GameBuilder};

use super::{player_names, team_utility, Teams};

struct Dice<'a> {
    n: usize,
    d: u32,
    teams: &'a Teams,
}

impl Dice<'_> {
    fn bid(&self, k: usize) -> (u32, u32) {
        ((k as u32) / self.d + 1, (k as u32) % self.d + 1)
    }

    fn node(&self, b: &mut GameBuilder, dice: &[u32], hist: &mut Vec<usize>) -> Result<usize> {
        let p = hist.len() % self.n;
        let num_bids = self.n * self.d as usize;
        let first = hist.last().map_or(0, |&k| k + 1);
        let mut actions = Vec::new();
        for k in first..num_bids {
            let (q, f) = self.bid(k);
            hist.push(k);
            let child = self.node(b, dice, hist)?;
            hist.pop();
            actions.push((format!("{q}x{f}"), child));
        }
        if let Some(&last) = hist.last() {
            let (q, f) = self.bid(last);
            let bidder = (hist.len() - 1) % self.n;
            let count = dice.iter().filter(|&&x| x == f).count() as u32;
            let mut net = vec![0.0; self.n];
            let (winner, loser) = if count >= q { (bidder, p) } else { (p, bidder) };
            net[winner] = 1.0;
            net[loser] = -1.0;
            let t = b.terminal(team_utility(&net, self.teams)?);
            actions.push(("liar".to_string(), t));
        }
        let key = format!(
            "D{p}:{}:{}",
            dice[p],
            hist.iter().map(usize::to_string).collect::<Vec<_>>().join(".")
        );
        Ok(b.player(p as u32 + 1, &key, actions))
    }
}

pub fn liars_dice(n: u32, d: u32, teams: &Teams) -> Result<Game> {
    if n < 2 || d < 1 {
        return Err(Error::Params("liar's dice needs n >= 2 and d >= 1".into()));
    }
    let names = player_names(n);
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut b = GameBuilder::new(&names, &teams.max, &teams.min);
    let ctx = Dice { n: n as usize, d, teams };
    let total = (d as usize).pow(n);
    let prob = 1.0 / total as f64;
    let mut outcomes = Vec::with_capacity(total);
    for idx in 0..total {
        let mut dice = Vec::with_capacity(n as usize);
        let mut rest = idx;
        for _ in 0..n {
            dice.push((rest % d as usize) as u32 + 1);
            rest /= d as usize;
        }
        dice.reverse();
        let child = ctx.node(&mut b, &dice, &mut Vec::new())?;
        let label = dice.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
        outcomes.push((label, prob, child));
    }
    let root = b.chance(outcomes);
    b.build(root)
}
