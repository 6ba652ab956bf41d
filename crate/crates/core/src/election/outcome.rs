use super::rules::{
    borda_loser, bucklin_result, irv_winner_with_rng, most_last_place, pairwise_and_condorcet,
    pick_random, plurality, BordaVariant, BucklinResult, IrvResult, PairwiseResult,
    PluralityResult,
};
use super::{Candidate, ElectionError, Pick, Profile3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Single-winner rules compared against the weak-candidate measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rule {
    Irv,
    Plurality,
    Minimax,
}

impl Rule {
    pub const ALL: [Rule; 3] = [Rule::Irv, Rule::Plurality, Rule::Minimax];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Irv => "irv",
            Rule::Plurality => "plurality",
            Rule::Minimax => "minimax",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Rule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "irv" => Ok(Rule::Irv),
            "plurality" => Ok(Rule::Plurality),
            "minimax" | "condorcet" => Ok(Rule::Minimax),
            other => Err(format!("unknown rule `{other}`")),
        }
    }
}

/// Profile-level notions of "weakest candidate".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum WeakMeasure {
    /// Borda loser on complete ballots.
    Borda,
    BordaAvg,
    BordaOm,
    BordaPm,
    Bucklin,
    MostLastPlace,
}

impl WeakMeasure {
    pub fn name(self) -> &'static str {
        match self {
            WeakMeasure::Borda => "borda",
            WeakMeasure::BordaAvg => "borda_avg",
            WeakMeasure::BordaOm => "borda_om",
            WeakMeasure::BordaPm => "borda_pm",
            WeakMeasure::Bucklin => "bucklin",
            WeakMeasure::MostLastPlace => "most_last_place",
        }
    }

    /// Measures reported for complete-ballot and partial-ballot elections.
    pub fn for_ballots(complete: bool) -> &'static [WeakMeasure] {
        if complete {
            &[WeakMeasure::Borda, WeakMeasure::Bucklin, WeakMeasure::MostLastPlace]
        } else {
            &[WeakMeasure::BordaAvg, WeakMeasure::BordaOm, WeakMeasure::BordaPm, WeakMeasure::Bucklin]
        }
    }
}

impl fmt::Display for WeakMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A stage that needed a random tie-break.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TieEvent {
    IrvElimination,
    IrvFinal,
    PluralityWinner,
    MinimaxWinner,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ElectionOutcome {
    pub irv: IrvResult,
    pub irv_winner: Candidate,
    pub plurality: PluralityResult,
    pub plurality_winner: Candidate,
    pub pairwise: PairwiseResult,
    pub condorcet_winner: Option<Candidate>,
    pub condorcet_loser: Option<Candidate>,
    pub minimax_winner: Candidate,
    /// Present only for complete-ballot profiles.
    pub borda_complete: Option<Pick>,
    pub borda_avg: Pick,
    pub borda_om: Pick,
    pub borda_pm: Pick,
    pub bucklin: BucklinResult,
    /// Present only for complete-ballot profiles.
    pub most_last_place: Option<Pick>,
    pub tie_events: Vec<TieEvent>,
}

impl ElectionOutcome {
    pub fn winner(&self, rule: Rule) -> Candidate {
        match rule {
            Rule::Irv => self.irv_winner,
            Rule::Plurality => self.plurality_winner,
            Rule::Minimax => self.minimax_winner,
        }
    }

    /// The weakest candidate under `measure`, if the measure applies.
    pub fn weakest(&self, measure: WeakMeasure) -> Option<Pick> {
        match measure {
            WeakMeasure::Borda => self.borda_complete,
            WeakMeasure::BordaAvg => Some(self.borda_avg),
            WeakMeasure::BordaOm => Some(self.borda_om),
            WeakMeasure::BordaPm => Some(self.borda_pm),
            WeakMeasure::Bucklin => Some(self.bucklin.loser),
            WeakMeasure::MostLastPlace => self.most_last_place,
        }
    }

    /// True when `rule` elects the strictly unique weakest candidate.
    pub fn elects_weakest(&self, rule: Rule, measure: WeakMeasure) -> bool {
        self.weakest(measure).is_some_and(|p| p.is(self.winner(rule)))
    }
}

pub fn analyze(profile: &Profile3, rng_seed: u64) -> Result<ElectionOutcome, ElectionError> {
    analyze_with_rng(profile, &mut ChaCha8Rng::seed_from_u64(rng_seed))
}

/// Runs every rule and weakness detector on `profile`. Randomness is used
/// only for tie-breaks, in the order IRV, plurality, minimax.
pub fn analyze_with_rng<R: Rng + ?Sized>(
    profile: &Profile3,
    rng: &mut R,
) -> Result<ElectionOutcome, ElectionError> {
    let irv = irv_winner_with_rng(profile, rng)?;
    let mut tie_events = Vec::new();
    if irv.elimination_tie {
        tie_events.push(TieEvent::IrvElimination);
    }
    if irv.final_tie {
        tie_events.push(TieEvent::IrvFinal);
    }

    let plur = plurality(profile)?;
    if matches!(plur.winner, Pick::Tie(_)) {
        tie_events.push(TieEvent::PluralityWinner);
    }
    let plurality_winner = pick_random(plur.winner.members(), rng);

    let pairwise = pairwise_and_condorcet(profile)?;
    if matches!(pairwise.minimax, Pick::Tie(_)) {
        tie_events.push(TieEvent::MinimaxWinner);
    }
    let minimax_winner = pick_random(pairwise.minimax.members(), rng);

    let complete = profile.is_complete();
    Ok(ElectionOutcome {
        irv_winner: irv.winner,
        irv,
        plurality: plur,
        plurality_winner,
        condorcet_winner: pairwise.condorcet_winner,
        condorcet_loser: pairwise.condorcet_loser,
        pairwise,
        minimax_winner,
        borda_complete: if complete { Some(borda_loser(profile, BordaVariant::Complete)?) } else { None },
        borda_avg: borda_loser(profile, BordaVariant::Avg)?,
        borda_om: borda_loser(profile, BordaVariant::Om)?,
        borda_pm: borda_loser(profile, BordaVariant::Pm)?,
        bucklin: bucklin_result(profile)?,
        most_last_place: if complete { Some(most_last_place(profile)?) } else { None },
        tie_events,
    })
}
