//! Seeded simulation of urn solitaire.
//!
//! Trial `i` of a run with master seed `s` draws from ChaCha8 seeded with `s`
//! on stream `i`, so a run's statistics do not depend on how trials are
//! scheduled across threads.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_traits::ToPrimitive;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;
use thiserror::Error;

use crate::urnproc::{transitions, Color, Transition, UrnState, Variant};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("state {0} must hold both colours")]
    NotMixed(UrnState),
    #[error("at least one trial is required")]
    NoTrials,
}

/// How a round is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sampler {
    /// Uniform draws without replacement, one ball at a time.
    #[default]
    BallByBall,
    /// One draw of `(run colour, run length)` from the exact round distribution.
    Distributional,
}

impl fmt::Display for Sampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sampler::BallByBall => "ball",
            Sampler::Distributional => "run",
        })
    }
}

impl FromStr for Sampler {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ball" => Ok(Sampler::BallByBall),
            "run" => Ok(Sampler::Distributional),
            other => Err(format!("unknown sampler `{other}` (expected ball or run)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    pub start: UrnState,
    pub variant: Variant,
    pub trials: u64,
    pub seed: u64,
    pub sampler: Sampler,
}

impl SimConfig {
    pub fn new(start: UrnState, variant: Variant, trials: u64, seed: u64) -> Self {
        Self {
            start,
            variant,
            trials,
            seed,
            sampler: Sampler::default(),
        }
    }

    pub fn with_sampler(mut self, sampler: Sampler) -> Self {
        self.sampler = sampler;
        self
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.trials == 0 {
            return Err(SimError::NoTrials);
        }
        if !self.start.is_mixed() {
            return Err(SimError::NotMixed(self.start));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundOutcome {
    pub next: UrnState,
    /// Balls drawn in the round, including the one that ended it.
    pub draws: u32,
    pub run_color: Color,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GameOutcome {
    pub rounds: u32,
    pub winner: Color,
}

/// The generator used for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn draw<R: Rng + ?Sized>(green: u32, red: u32, rng: &mut R) -> Color {
    if rng.random_range(0..green + red) < green {
        Color::Green
    } else {
        Color::Red
    }
}

/// One round, drawing balls uniformly without replacement.
pub fn play_round<R: Rng + ?Sized>(
    state: UrnState,
    variant: Variant,
    rng: &mut R,
) -> Result<RoundOutcome, SimError> {
    if !state.is_mixed() {
        return Err(SimError::NotMixed(state));
    }
    let mut urn = state;
    let run_color = draw(urn.green, urn.red, rng);
    urn = urn.remove(run_color, 1);
    let mut draws = 1;
    loop {
        let ball = draw(urn.green, urn.red, rng);
        draws += 1;
        if ball != run_color {
            if variant == Variant::Simple {
                urn = urn.remove(ball, 1);
            }
            break;
        }
        urn = urn.remove(ball, 1);
    }
    Ok(RoundOutcome {
        next: urn,
        draws,
        run_color,
    })
}

/// Round sampler that draws `(colour, run length)` directly from the exact
/// round distribution, caching one table per visited state.
#[derive(Default)]
pub struct RunSampler {
    cache: HashMap<(UrnState, Variant), (WeightedIndex<f64>, Vec<Transition>)>,
}

impl RunSampler {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn play_round<R: Rng + ?Sized>(
        &mut self,
        state: UrnState,
        variant: Variant,
        rng: &mut R,
    ) -> Result<RoundOutcome, SimError> {
        if !state.is_mixed() {
            return Err(SimError::NotMixed(state));
        }
        let (dist, ts) = self.cache.entry((state, variant)).or_insert_with(|| {
            let ts = transitions(state, variant);
            let weights: Vec<f64> = ts.iter().map(|t| t.weight.to_f64().unwrap()).collect();
            (
                WeightedIndex::new(weights).expect("round weights are positive"),
                ts,
            )
        });
        let t = &ts[dist.sample(rng)];
        Ok(RoundOutcome {
            next: t.next,
            draws: t.run_length + 1,
            run_color: t.run_color,
        })
    }
}

/// Plays rounds until at most one colour is left.
///
/// The winner is the colour of the last ball that would be drawn: the
/// surviving colour, or, when the simple variant empties the urn, the colour
/// of the ball that ended the final round.
pub fn play_game<R: Rng + ?Sized>(
    start: UrnState,
    variant: Variant,
    rng: &mut R,
) -> Result<GameOutcome, SimError> {
    play_game_with(start, variant, rng, |s, v, r| play_round(s, v, r))
}

fn play_game_with<R, F>(
    start: UrnState,
    variant: Variant,
    rng: &mut R,
    mut round: F,
) -> Result<GameOutcome, SimError>
where
    R: Rng + ?Sized,
    F: FnMut(UrnState, Variant, &mut R) -> Result<RoundOutcome, SimError>,
{
    if !start.is_mixed() {
        return Err(SimError::NotMixed(start));
    }
    let mut state = start;
    let mut rounds = 0;
    loop {
        let out = round(state, variant, rng)?;
        rounds += 1;
        state = out.next;
        if !state.is_mixed() {
            let winner = match (state.green, state.red) {
                (0, 0) => out.run_color.opposite(),
                (_, 0) => Color::Green,
                _ => Color::Red,
            };
            return Ok(GameOutcome { rounds, winner });
        }
    }
}

/// Counts accumulated over trials; merging is associative and commutative.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct Tally {
    green_wins: u64,
    histogram: BTreeMap<u32, u64>,
}

impl Tally {
    fn record(&mut self, g: GameOutcome) {
        if g.winner == Color::Green {
            self.green_wins += 1;
        }
        *self.histogram.entry(g.rounds).or_default() += 1;
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.green_wins += other.green_wins;
        for (r, c) in other.histogram {
            *self.histogram.entry(r).or_default() += c;
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimStats {
    pub start: UrnState,
    pub variant: Variant,
    pub trials: u64,
    pub green_wins: u64,
    pub rounds_histogram: BTreeMap<u32, u64>,
    pub mean_rounds: f64,
    /// Unbiased sample variance.
    pub variance_rounds: f64,
    pub std_error_mean: f64,
    pub seed: u64,
}

impl SimStats {
    fn from_tally(config: &SimConfig, tally: Tally) -> Self {
        let n = config.trials as u128;
        let (s1, s2) = tally
            .histogram
            .iter()
            .fold((0u128, 0u128), |(a, b), (&r, &c)| {
                let (r, c) = (u128::from(r), u128::from(c));
                (a + r * c, b + r * r * c)
            });
        let mean = s1 as f64 / n as f64;
        let variance = if n > 1 {
            (n * s2 - s1 * s1) as f64 / (n * (n - 1)) as f64
        } else {
            0.0
        };
        Self {
            start: config.start,
            variant: config.variant,
            trials: config.trials,
            green_wins: tally.green_wins,
            rounds_histogram: tally.histogram,
            mean_rounds: mean,
            variance_rounds: variance,
            std_error_mean: (variance / n as f64).sqrt(),
            seed: config.seed,
        }
    }

    pub fn win_frequency(&self) -> f64 {
        self.green_wins as f64 / self.trials as f64
    }

    /// Normal-approximation standard error of [`Self::win_frequency`] around
    /// a hypothesised win probability `p`.
    pub fn win_std_error(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    /// Standard error of the sample variance, `sqrt((mu4 - s^4) / N)`, with
    /// the fourth central moment taken from the histogram.
    pub fn variance_std_error(&self) -> f64 {
        let n = self.trials as f64;
        let mu4 = self
            .rounds_histogram
            .iter()
            .map(|(&r, &c)| (f64::from(r) - self.mean_rounds).powi(4) * c as f64)
            .sum::<f64>()
            / n;
        ((mu4 - self.variance_rounds.powi(2)).max(0.0) / n).sqrt()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let histogram: Vec<[u64; 2]> = self
            .rounds_histogram
            .iter()
            .map(|(&r, &c)| [u64::from(r), c])
            .collect();
        json!({
            "m": self.start.green,
            "n": self.start.red,
            "variant": self.variant,
            "trials": self.trials,
            "green_wins": self.green_wins,
            "rounds_histogram": histogram,
            "mean_rounds": significant(self.mean_rounds),
            "variance_rounds": significant(self.variance_rounds),
            "std_error_mean": significant(self.std_error_mean),
            "seed": self.seed,
        })
    }
}

/// `x` rounded to 12 significant digits.
pub fn significant(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap()
}

/// Runs `config.trials` independent games in parallel.
pub fn simulate(config: &SimConfig) -> Result<SimStats, SimError> {
    config.validate()?;
    let SimConfig {
        start,
        variant,
        seed,
        sampler,
        ..
    } = *config;
    let tally = (0..config.trials)
        .into_par_iter()
        .fold(
            || (Tally::default(), RunSampler::new()),
            |(mut tally, mut runs), i| {
                let mut rng = trial_rng(seed, i);
                let game = match sampler {
                    Sampler::BallByBall => play_game(start, variant, &mut rng),
                    Sampler::Distributional => {
                        play_game_with(start, variant, &mut rng, |s, v, r| runs.play_round(s, v, r))
                    }
                }
                .expect("validated start state");
                tally.record(game);
                (tally, runs)
            },
        )
        .map(|(tally, _)| tally)
        .reduce(Tally::default, Tally::merge);
    Ok(SimStats::from_tally(config, tally))
}
