use super::{EmpiricalError, RawElection};
use crate::election::{Ballot, Candidate, Profile3};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EliminationRound {
    /// Name of the eliminated candidate.
    pub eliminated: String,
    /// First-choice tallies of the continuing candidates, by name.
    pub tallies: Vec<(String, u64)>,
    /// Ballots moved to each next choice.
    pub transfers: Vec<(String, u64)>,
    /// Ballots of the eliminated candidate with no continuing choice left.
    pub exhausted: u64,
    /// The lowest tally was shared and broken at random.
    pub tie: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Default)]
pub struct ReductionLog {
    pub rounds: Vec<EliminationRound>,
    /// Ballots with no choice among the final three, blank ballots included.
    pub exhausted: u64,
}

impl ReductionLog {
    pub fn ties(&self) -> usize {
        self.rounds.iter().filter(|r| r.tie).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReducedElection {
    /// Names of A, B, C, ordered by descending first-place count (ties by
    /// name).
    pub names: [String; 3],
    pub profile: Profile3,
    pub log: ReductionLog,
}

pub fn reduce_to_three(raw: &RawElection, rng_seed: u64) -> Result<ReducedElection, EmpiricalError> {
    reduce_to_three_with_rng(raw, &mut ChaCha8Rng::seed_from_u64(rng_seed))
}

/// Eliminates the lowest first-choice candidate until three remain, then
/// restricts every ballot to those three.
pub fn reduce_to_three_with_rng<R: Rng + ?Sized>(
    raw: &RawElection,
    rng: &mut R,
) -> Result<ReducedElection, EmpiricalError> {
    let m = raw.candidates.len();
    if m < 3 {
        return Err(EmpiricalError::TooFewCandidates(m));
    }
    if raw.total_ballots() == 0 {
        return Err(EmpiricalError::EmptyElection);
    }
    let mut alive = vec![true; m];
    let mut log = ReductionLog::default();
    let top = |r: &[usize], alive: &[bool]| r.iter().copied().find(|&c| alive[c]);

    for _ in 3..m {
        let mut tally = vec![0u64; m];
        for (n, r) in &raw.ballots {
            if let Some(c) = top(r, &alive) {
                tally[c] += n;
            }
        }
        let continuing: Vec<usize> = (0..m).filter(|&c| alive[c]).collect();
        let low = continuing.iter().map(|&c| tally[c]).min().unwrap();
        let lowest: Vec<usize> = continuing.iter().copied().filter(|&c| tally[c] == low).collect();
        let out = *lowest.choose(rng).unwrap();
        alive[out] = false;

        let mut moved = vec![0u64; m];
        let mut exhausted = 0;
        for (n, r) in &raw.ballots {
            let mut live = r.iter().copied().filter(|&c| alive[c] || c == out);
            if live.next() == Some(out) {
                match live.next() {
                    Some(next) => moved[next] += n,
                    None => exhausted += n,
                }
            }
        }
        let name = |c: usize| raw.candidates[c].clone();
        log.rounds.push(EliminationRound {
            eliminated: name(out),
            tallies: continuing.iter().map(|&c| (name(c), tally[c])).collect(),
            transfers: (0..m).filter(|&c| alive[c]).map(|c| (name(c), moved[c])).collect(),
            exhausted,
            tie: lowest.len() > 1,
        });
    }

    let three: Vec<usize> = (0..m).filter(|&c| alive[c]).collect();
    let mut groups: Vec<(u64, Vec<usize>)> = Vec::new();
    let mut first = [0u64; 3];
    for (n, r) in &raw.ballots {
        let kept: Vec<usize> = r.iter().filter_map(|c| three.iter().position(|t| t == c)).collect();
        match kept.first() {
            None => log.exhausted += n,
            Some(&f) => {
                first[f] += n;
                groups.push((*n, kept));
            }
        }
    }
    if groups.is_empty() {
        return Err(EmpiricalError::EmptyElection);
    }

    let mut order = [0usize, 1, 2];
    order.sort_by(|&x, &y| first[y].cmp(&first[x]).then_with(|| raw.candidates[three[x]].cmp(&raw.candidates[three[y]])));
    let mut label = [0usize; 3];
    for (new, &old) in order.iter().enumerate() {
        label[old] = new;
    }
    let mut profile = Profile3::default();
    for (n, kept) in groups {
        let ranking: Vec<Candidate> = kept.iter().map(|&k| Candidate::new(label[k]).unwrap()).collect();
        let ballot = Ballot::from_ranking(&ranking).expect("distinct candidates");
        profile.add(ballot, n);
    }
    Ok(ReducedElection { names: order.map(|k| raw.candidates[three[k]].clone()), profile, log })
}
