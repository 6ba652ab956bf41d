use super::{Candidate, CandidateSet, ElectionError, Pick, Profile3, FULL_ORDERS};
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub(crate) fn pick_random<R: Rng + ?Sized>(set: CandidateSet, rng: &mut R) -> Candidate {
    let n = set.len();
    debug_assert!(n > 0);
    if n == 1 {
        return set.iter().next().unwrap();
    }
    set.iter().nth(rng.random_range(0..n)).unwrap()
}

fn check_nonempty(p: &Profile3) -> Result<(), ElectionError> {
    if p.voters() == 0 {
        Err(ElectionError::EmptyProfile)
    } else {
        Ok(())
    }
}

/// First-place tallies of one IRV round; eliminated candidates are `None`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IrvRound {
    pub tallies: [Option<u64>; 3],
    /// Ballots still counting for a continuing candidate.
    pub active: u64,
    pub eliminated: Option<Candidate>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IrvResult {
    pub winner: Candidate,
    pub rounds: Vec<IrvRound>,
    /// The round-1 elimination needed a random tie-break.
    pub elimination_tie: bool,
    /// The final two-way count was tied and broken at random.
    pub final_tie: bool,
}

pub fn irv_winner(profile: &Profile3, rng_seed: u64) -> Result<IrvResult, ElectionError> {
    irv_winner_with_rng(profile, &mut ChaCha8Rng::seed_from_u64(rng_seed))
}

/// Instant runoff on three candidates. Bullet ballots of the eliminated
/// candidate are exhausted; the majority test counts active ballots only.
pub fn irv_winner_with_rng<R: Rng + ?Sized>(
    profile: &Profile3,
    rng: &mut R,
) -> Result<IrvResult, ElectionError> {
    check_nonempty(profile)?;
    let v = profile.voters();
    let first = Candidate::ALL.map(|c| profile.first_place(c));

    if let Some(w) = Candidate::ALL.into_iter().find(|c| 2 * first[c.index()] > v) {
        return Ok(IrvResult {
            winner: w,
            rounds: vec![IrvRound { tallies: first.map(Some), active: v, eliminated: None }],
            elimination_tie: false,
            final_tie: false,
        });
    }

    let losers = Pick::argmin(|c| first[c.index()]);
    let elimination_tie = matches!(losers, Pick::Tie(_));
    let out = pick_random(losers.members(), rng);
    let round1 = IrvRound { tallies: first.map(Some), active: v, eliminated: Some(out) };

    let [x, y] = out.others();
    let tally = |me: Candidate, other: Candidate| first[me.index()] + profile.count([out, me, other]);
    let tx = tally(x, y);
    let ty = tally(y, x);
    let mut tallies = [None; 3];
    tallies[x.index()] = Some(tx);
    tallies[y.index()] = Some(ty);
    let round2 = IrvRound { tallies, active: tx + ty, eliminated: None };

    let (winner, final_tie) = if tx > ty {
        (x, false)
    } else if ty > tx {
        (y, false)
    } else {
        (pick_random([x, y].into_iter().collect(), rng), true)
    };
    Ok(IrvResult { winner, rounds: vec![round1, round2], elimination_tie, final_tie })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PluralityResult {
    pub winner: Pick,
    pub loser: Pick,
}

pub fn plurality(profile: &Profile3) -> Result<PluralityResult, ElectionError> {
    check_nonempty(profile)?;
    let f = |c: Candidate| profile.first_place(c);
    Ok(PluralityResult { winner: Pick::argmax(f), loser: Pick::argmin(f) })
}

/// How unranked candidates on a bullet vote are scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BordaVariant {
    /// Complete ballots only.
    Complete,
    /// Unranked candidates get 1/2.
    Avg,
    /// Unranked candidates get 1 (optimistic).
    Om,
    /// Unranked candidates get 0 (pessimistic).
    Pm,
}

/// Borda scores (2/1/0 points) as exact rationals.
pub fn borda_scores(
    profile: &Profile3,
    variant: BordaVariant,
) -> Result<[Ratio<i64>; 3], ElectionError> {
    if variant == BordaVariant::Complete && !profile.is_complete() {
        return Err(ElectionError::BulletsInCompleteBorda(profile.bullet_total()));
    }
    // half-points
    let unranked_half: i64 = match variant {
        BordaVariant::Complete | BordaVariant::Pm => 0,
        BordaVariant::Avg => 1,
        BordaVariant::Om => 2,
    };
    let mut half = [0i64; 3];
    for (order, &n) in FULL_ORDERS.iter().zip(&profile.full) {
        half[order[0].index()] += 4 * n as i64;
        half[order[1].index()] += 2 * n as i64;
    }
    for c in Candidate::ALL {
        let n = profile.bullets[c.index()] as i64;
        half[c.index()] += 4 * n;
        for o in c.others() {
            half[o.index()] += unranked_half * n;
        }
    }
    Ok(half.map(|h| Ratio::new(h, 2)))
}

pub fn borda_loser(profile: &Profile3, variant: BordaVariant) -> Result<Pick, ElectionError> {
    let s = borda_scores(profile, variant)?;
    Ok(Pick::argmin(|c| s[c.index()]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BucklinResult {
    pub winner: Pick,
    pub loser: Pick,
    /// 1, 2 or 3.
    pub declared_round: u8,
    /// Cumulative sums at the declared round.
    pub sums: [u64; 3],
}

/// Bucklin: accumulate 1st, then 2nd, then 3rd place tallies until some sum
/// reaches floor(V/2)+1. If none ever does, round 3 decides by largest sum.
pub fn bucklin_result(profile: &Profile3) -> Result<BucklinResult, ElectionError> {
    check_nonempty(profile)?;
    let threshold = profile.voters() / 2 + 1;
    let mut sums = [0u64; 3];
    for round in 1..=3u8 {
        for c in Candidate::ALL {
            sums[c.index()] += match round {
                1 => profile.first_place(c),
                2 => profile.second_place(c),
                _ => profile.third_place(c),
            };
        }
        if round == 3 || sums.iter().any(|&s| s >= threshold) {
            return Ok(BucklinResult {
                winner: Pick::argmax(|c| sums[c.index()]),
                loser: Pick::argmin(|c| sums[c.index()]),
                declared_round: round,
                sums,
            });
        }
    }
    unreachable!()
}

pub fn most_last_place(profile: &Profile3) -> Result<Pick, ElectionError> {
    if !profile.is_complete() {
        return Err(ElectionError::BulletsInMostLastPlace(profile.bullet_total()));
    }
    check_nonempty(profile)?;
    Ok(Pick::argmax(|c| profile.third_place(c)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PairwiseResult {
    /// margin[x][y] = voters preferring x to y minus voters preferring y to x.
    pub margin: [[i64; 3]; 3],
    pub condorcet_winner: Option<Candidate>,
    pub condorcet_loser: Option<Candidate>,
    /// The Condorcet winner if any, else the candidates whose largest
    /// pairwise defeat is smallest.
    pub minimax: Pick,
}

pub fn pairwise_and_condorcet(profile: &Profile3) -> Result<PairwiseResult, ElectionError> {
    check_nonempty(profile)?;
    let mut margin = [[0i64; 3]; 3];
    let mut prefer = |x: Candidate, y: Candidate, n: u64| {
        margin[x.index()][y.index()] += n as i64;
        margin[y.index()][x.index()] -= n as i64;
    };
    for (order, &n) in FULL_ORDERS.iter().zip(&profile.full) {
        prefer(order[0], order[1], n);
        prefer(order[0], order[2], n);
        prefer(order[1], order[2], n);
    }
    for c in Candidate::ALL {
        for o in c.others() {
            prefer(c, o, profile.bullets[c.index()]);
        }
    }
    let beats_all = |x: Candidate| x.others().iter().all(|y| margin[x.index()][y.index()] > 0);
    let loses_all = |x: Candidate| x.others().iter().all(|y| margin[x.index()][y.index()] < 0);
    let condorcet_winner = Candidate::ALL.into_iter().find(|&x| beats_all(x));
    let condorcet_loser = Candidate::ALL.into_iter().find(|&x| loses_all(x));
    let minimax = match condorcet_winner {
        Some(w) => Pick::Unique(w),
        None => Pick::argmin(|x| {
            x.others().iter().map(|y| margin[y.index()][x.index()]).max().unwrap()
        }),
    };
    Ok(PairwiseResult { margin, condorcet_winner, condorcet_loser, minimax })
}
