//! Test-only oracles that share no code with the library's DP path.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Q = BigRational;

pub fn q(p: i64, d: i64) -> Q {
    Q::new(BigInt::from(p), BigInt::from(d))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ball {
    Green,
    Red,
}

/// Exact distribution of (rounds played, green won) obtained by drawing one
/// ball at a time from every reachable urn, with probability `count / total`
/// per draw.
///
/// `returning` puts the round-ending ball back. The game stops when at most
/// one colour remains; the winner is the colour of the last ball that would
/// be drawn from the urn.
pub fn game_tree(green: u32, red: u32, returning: bool) -> BTreeMap<(u32, bool), Q> {
    let mut out = BTreeMap::new();
    explore(green, red, None, 0, None, returning, Q::one(), &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn explore(
    green: u32,
    red: u32,
    run: Option<Ball>,
    rounds: u32,
    last: Option<Ball>,
    returning: bool,
    prob: Q,
    out: &mut BTreeMap<(u32, bool), Q>,
) {
    if run.is_none() && (green == 0 || red == 0) {
        let green_won = match (green, red) {
            (0, 0) => last == Some(Ball::Green),
            (_, 0) => true,
            _ => false,
        };
        *out.entry((rounds, green_won)).or_insert_with(Q::zero) += prob;
        return;
    }
    let total = green + red;
    for (ball, count) in [(Ball::Green, green), (Ball::Red, red)] {
        if count == 0 {
            continue;
        }
        let p = &prob * q(count.into(), total.into());
        let (g, r) = match ball {
            Ball::Green => (green - 1, red),
            Ball::Red => (green, red - 1),
        };
        match run {
            None => explore(g, r, Some(ball), rounds, Some(ball), returning, p, out),
            Some(c) if c == ball => explore(g, r, run, rounds, Some(ball), returning, p, out),
            Some(_) => {
                // the opposite colour ends the round
                let (g, r) = if returning { (green, red) } else { (g, r) };
                explore(g, r, None, rounds + 1, Some(ball), returning, p, out)
            }
        }
    }
}

pub struct TreeSummary {
    pub green_win: Q,
    pub expected: Q,
    pub second_moment: Q,
    pub min_rounds: u32,
    pub max_rounds: u32,
}

pub fn summarize(green: u32, red: u32, returning: bool) -> TreeSummary {
    let dist = game_tree(green, red, returning);
    let mut s = TreeSummary {
        green_win: Q::zero(),
        expected: Q::zero(),
        second_moment: Q::zero(),
        min_rounds: u32::MAX,
        max_rounds: 0,
    };
    for (&(rounds, green_won), p) in &dist {
        if green_won {
            s.green_win += p;
        }
        let r = q(rounds.into(), 1);
        s.expected += p * &r;
        s.second_moment += p * &r * &r;
        s.min_rounds = s.min_rounds.min(rounds);
        s.max_rounds = s.max_rounds.max(rounds);
    }
    s
}
