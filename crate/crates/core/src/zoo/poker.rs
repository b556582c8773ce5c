//! n-player Kuhn and Leduc poker.

use crate::error::{Error, Result};
use crate::game::{Game, GameBuilder};

use super::{player_names, team_utility, Teams};

/// All ordered tuples of `n` distinct items from `0..m`, lexicographic.
pub(crate) fn ordered_deals(m: u32, n: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(m: u32, n: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == n as usize {
            out.push(cur.clone());
            return;
        }
        for c in 0..m {
            if !cur.contains(&c) {
                cur.push(c);
                rec(m, n, cur, out);
                cur.pop();
            }
        }
    }
    rec(m, n, &mut cur, &mut out);
    out
}

fn showdown(ranks: &[u32], contrib: &[f64], in_play: &[bool], strength: impl Fn(usize) -> u32) -> Vec<f64> {
    let pot: f64 = contrib.iter().sum();
    let best = (0..ranks.len()).filter(|&p| in_play[p]).map(&strength).max().unwrap();
    let winners: Vec<usize> = (0..ranks.len()).filter(|&p| in_play[p] && strength(p) == best).collect();
    let share = pot / winners.len() as f64;
    (0..ranks.len())
        .map(|p| if winners.contains(&p) { share } else { 0.0 } - contrib[p])
        .collect()
}

/// Kuhn poker: one private card from `r` ranks per player, ante 1, one
/// betting round where a single bet of 1 may be made; after a bet every
/// other player calls or folds in turn.
pub fn kuhn(n: u32, r: u32, teams: &Teams) -> Result<Game> {
    if n < 2 {
        return Err(Error::Params("kuhn needs at least 2 players".into()));
    }
    if r < n {
        return Err(Error::Params(format!("kuhn needs at least as many ranks as players (r={r}, n={n})")));
    }
    let names = player_names(n);
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut b = GameBuilder::new(&names, &teams.max, &teams.min);
    let deals = ordered_deals(r, n);
    let prob = 1.0 / deals.len() as f64;
    let mut outcomes = Vec::with_capacity(deals.len());
    for cards in &deals {
        let child = kuhn_betting(&mut b, cards, &mut String::new(), None, teams)?;
        let label = cards.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
        outcomes.push((label, prob, child));
    }
    let root = b.chance(outcomes);
    b.build(root)
}

fn kuhn_betting(b: &mut GameBuilder, cards: &[u32], hist: &mut String, bettor: Option<usize>, teams: &Teams) -> Result<usize> {
    let n = cards.len();
    match bettor {
        None => {
            let p = hist.len();
            if p == n {
                let contrib = vec![1.0; n];
                let net = showdown(cards, &contrib, &vec![true; n], |q| cards[q]);
                return Ok(b.terminal(team_utility(&net, teams)?));
            }
            let key = format!("K{p}:{}:{hist}", cards[p]);
            hist.push('k');
            let check = kuhn_betting(b, cards, hist, None, teams)?;
            hist.pop();
            hist.push('b');
            let bet = kuhn_betting(b, cards, hist, Some(p), teams)?;
            hist.pop();
            Ok(b.player(p as u32 + 1, &key, vec![("check", check), ("bet", bet)]))
        }
        Some(j) => {
            let responses = hist.len() - j - 1;
            if responses == n - 1 {
                let tail: Vec<char> = hist[j + 1..].chars().collect();
                let mut in_play = vec![false; n];
                let mut contrib = vec![1.0; n];
                in_play[j] = true;
                contrib[j] = 2.0;
                for (idx, ch) in tail.iter().enumerate() {
                    let q = (j + 1 + idx) % n;
                    if *ch == 'c' {
                        in_play[q] = true;
                        contrib[q] = 2.0;
                    }
                }
                let net = showdown(cards, &contrib, &in_play, |q| cards[q]);
                return Ok(b.terminal(team_utility(&net, teams)?));
            }
            let p = (j + 1 + responses) % n;
            let key = format!("K{p}:{}:{hist}", cards[p]);
            hist.push('c');
            let call = kuhn_betting(b, cards, hist, Some(j), teams)?;
            hist.pop();
            hist.push('f');
            let fold = kuhn_betting(b, cards, hist, Some(j), teams)?;
            hist.pop();
            Ok(b.player(p as u32 + 1, &key, vec![("call", call), ("fold", fold)]))
        }
    }
}

#[derive(Clone)]
struct LeducState {
    contrib: Vec<f64>,
    folded: Vec<bool>,
    pending: Vec<usize>,
    raises: u32,
    round: u8,
    public: Option<u32>,
    hist: String,
}

struct Leduc<'a> {
    n: usize,
    max_raises: u32,
    suits: u32,
    deck: u32,
    teams: &'a Teams,
}

impl Leduc<'_> {
    fn rank(&self, card: u32) -> u32 {
        card / self.suits
    }

    fn node(&self, b: &mut GameBuilder, cards: &[u32], st: LeducState) -> Result<usize> {
        let active: Vec<usize> = (0..self.n).filter(|&p| !st.folded[p]).collect();
        if active.len() == 1 {
            let in_play: Vec<bool> = st.folded.iter().map(|f| !f).collect();
            let net = showdown(cards, &st.contrib, &in_play, |_| 0);
            return Ok(b.terminal(team_utility(&net, self.teams)?));
        }
        let Some(&p) = st.pending.first() else {
            if st.round == 0 {
                let remaining: Vec<u32> = (0..self.deck).filter(|c| !cards.contains(c)).collect();
                let prob = 1.0 / remaining.len() as f64;
                let mut outcomes = Vec::new();
                for &c in &remaining {
                    let mut next = st.clone();
                    next.round = 1;
                    next.public = Some(c);
                    next.raises = 0;
                    next.pending = active.clone();
                    next.hist.push('/');
                    outcomes.push((format!("r{}s{}", self.rank(c), c % self.suits), prob, self.node(b, cards, next)?));
                }
                return Ok(b.chance(outcomes));
            }
            let public = self.rank(st.public.unwrap());
            let in_play: Vec<bool> = st.folded.iter().map(|f| !f).collect();
            let net = showdown(cards, &st.contrib, &in_play, |q| {
                let r = self.rank(cards[q]);
                if r == public {
                    1000 + r
                } else {
                    r
                }
            });
            return Ok(b.terminal(team_utility(&net, self.teams)?));
        };
        let size = if st.round == 0 { 2.0 } else { 4.0 };
        let top = st.contrib.iter().cloned().fold(0.0, f64::max);
        let facing = st.contrib[p] < top;
        let key = format!(
            "L{p}:{}:{}:{}",
            self.rank(cards[p]),
            st.public.map_or("-".to_string(), |c| self.rank(c).to_string()),
            st.hist
        );
        let others_after = |st: &LeducState| -> Vec<usize> {
            (1..self.n).map(|d| (p + d) % self.n).filter(|&q| !st.folded[q]).collect()
        };
        let mut actions = Vec::new();
        // check / call
        {
            let mut next = st.clone();
            next.contrib[p] = top;
            next.pending.remove(0);
            next.hist.push(if facing { 'c' } else { 'k' });
            actions.push((if facing { "call" } else { "check" }, self.node(b, cards, next)?));
        }
        // bet / raise
        if st.raises < self.max_raises {
            let mut next = st.clone();
            next.contrib[p] = top + size;
            next.raises += 1;
            next.pending = others_after(&next);
            next.hist.push(if facing { 'r' } else { 'b' });
            actions.push((if facing { "raise" } else { "bet" }, self.node(b, cards, next)?));
        }
        if facing {
            let mut next = st.clone();
            next.folded[p] = true;
            next.pending.remove(0);
            next.hist.push('f');
            actions.push(("fold", self.node(b, cards, next)?));
        }
        Ok(b.player(p as u32 + 1, &key, actions))
    }
}

/// Leduc poker: `r` ranks times `s` suits, ante 1, two betting rounds with
/// raise sizes 2 and 4 and at most `bets` raises per round; a public card
/// is dealt between the rounds and pairing it wins.
pub fn leduc(n: u32, bets: u32, r: u32, s: u32, teams: &Teams) -> Result<Game> {
    if n < 2 || bets < 1 || r < 1 || s < 1 {
        return Err(Error::Params("leduc needs n >= 2 and b, r, s >= 1".into()));
    }
    if r * s < n + 1 {
        return Err(Error::Params(format!("leduc deck of {} cards is too small for {n} players", r * s)));
    }
    let names = player_names(n);
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut b = GameBuilder::new(&names, &teams.max, &teams.min);
    let ctx = Leduc { n: n as usize, max_raises: bets, suits: s, deck: r * s, teams };
    let deals = ordered_deals(r * s, n);
    let prob = 1.0 / deals.len() as f64;
    let mut outcomes = Vec::with_capacity(deals.len());
    for cards in &deals {
        let st = LeducState {
            contrib: vec![1.0; n as usize],
            folded: vec![false; n as usize],
            pending: (0..n as usize).collect(),
            raises: 0,
            round: 0,
            public: None,
            hist: String::new(),
        };
        let child = ctx.node(&mut b, cards, st)?;
        let label = cards.iter().map(|&c| format!("r{}s{}", c / s, c % s)).collect::<Vec<_>>().join(",");
        outcomes.push((label, prob, child));
    }
    let root = b.chance(outcomes);
    b.build(root)
}
