//! Three-candidate ballots, preference profiles and the tabulation rules
//! used to decide who wins and who is "weakest".

mod outcome;
mod rules;

pub use outcome::{analyze, analyze_with_rng, ElectionOutcome, Rule, TieEvent, WeakMeasure};
pub use rules::{
    borda_scores, bucklin_result, irv_winner, irv_winner_with_rng, most_last_place,
    pairwise_and_condorcet, plurality, BordaVariant, BucklinResult, IrvResult, IrvRound,
    PairwiseResult, PluralityResult,
};

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ElectionError {
    #[error("profile has no voters")]
    EmptyProfile,
    #[error("complete-ballot Borda count requested on a profile with {0} bullet votes")]
    BulletsInCompleteBorda(u64),
    #[error("most-last-place is only defined for complete ballots ({0} bullet votes present)")]
    BulletsInMostLastPlace(u64),
    #[error("invalid ballot: {0}")]
    InvalidBallot(String),
}

/// One of the three candidates, labelled A, B, C.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Candidate(u8);

impl Candidate {
    pub const A: Candidate = Candidate(0);
    pub const B: Candidate = Candidate(1);
    pub const C: Candidate = Candidate(2);
    pub const ALL: [Candidate; 3] = [Candidate::A, Candidate::B, Candidate::C];

    pub fn new(index: usize) -> Option<Candidate> {
        (index < 3).then_some(Candidate(index as u8))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn label(self) -> char {
        (b'A' + self.0) as char
    }

    /// The two other candidates, in label order.
    pub fn others(self) -> [Candidate; 2] {
        match self.0 {
            0 => [Candidate::B, Candidate::C],
            1 => [Candidate::A, Candidate::C],
            _ => [Candidate::A, Candidate::B],
        }
    }
}

impl fmt::Display for Candidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// A subset of the three candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct CandidateSet(u8);

impl CandidateSet {
    pub fn empty() -> Self {
        CandidateSet(0)
    }

    pub fn insert(&mut self, c: Candidate) {
        self.0 |= 1 << c.0;
    }

    pub fn contains(self, c: Candidate) -> bool {
        self.0 & (1 << c.0) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Candidate> {
        Candidate::ALL.into_iter().filter(move |c| self.contains(*c))
    }
}

impl FromIterator<Candidate> for CandidateSet {
    fn from_iter<I: IntoIterator<Item = Candidate>>(iter: I) -> Self {
        let mut s = CandidateSet::empty();
        for c in iter {
            s.insert(c);
        }
        s
    }
}

/// Result of an arg-max / arg-min: either a single candidate or a tie set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pick {
    Unique(Candidate),
    Tie(CandidateSet),
}

impl Pick {
    pub fn unique(self) -> Option<Candidate> {
        match self {
            Pick::Unique(c) => Some(c),
            Pick::Tie(_) => None,
        }
    }

    pub fn is(self, c: Candidate) -> bool {
        self.unique() == Some(c)
    }

    pub fn members(self) -> CandidateSet {
        match self {
            Pick::Unique(c) => [c].into_iter().collect(),
            Pick::Tie(s) => s,
        }
    }

    fn from_set(set: CandidateSet) -> Pick {
        if set.len() == 1 {
            Pick::Unique(set.iter().next().unwrap())
        } else {
            Pick::Tie(set)
        }
    }

    /// Candidates attaining the maximum of `key`.
    pub fn argmax<T: PartialOrd + Copy>(key: impl Fn(Candidate) -> T) -> Pick {
        let best = Candidate::ALL
            .into_iter()
            .map(&key)
            .reduce(|a, b| if b > a { b } else { a })
            .unwrap();
        Pick::from_set(Candidate::ALL.into_iter().filter(|c| key(*c) == best).collect())
    }

    /// Candidates attaining the minimum of `key`.
    pub fn argmin<T: PartialOrd + Copy>(key: impl Fn(Candidate) -> T) -> Pick {
        let best = Candidate::ALL
            .into_iter()
            .map(&key)
            .reduce(|a, b| if b < a { b } else { a })
            .unwrap();
        Pick::from_set(Candidate::ALL.into_iter().filter(|c| key(*c) == best).collect())
    }
}

impl fmt::Display for Pick {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pick::Unique(c) => write!(f, "{c}"),
            Pick::Tie(s) => {
                let labels: Vec<String> = s.iter().map(|c| c.to_string()).collect();
                write!(f, "tie({})", labels.join("="))
            }
        }
    }
}

/// The six complete rankings, in the column order a1, a2, b1, b2, c1, c2.
pub const FULL_ORDERS: [[Candidate; 3]; 6] = [
    [Candidate::A, Candidate::B, Candidate::C],
    [Candidate::A, Candidate::C, Candidate::B],
    [Candidate::B, Candidate::A, Candidate::C],
    [Candidate::B, Candidate::C, Candidate::A],
    [Candidate::C, Candidate::A, Candidate::B],
    [Candidate::C, Candidate::B, Candidate::A],
];

/// Column index of a complete ranking in [`FULL_ORDERS`].
pub fn full_order_index(order: [Candidate; 3]) -> usize {
    let first = order[0].index();
    let second_is_lower = order[1].index() < order[2].index();
    2 * first + usize::from(!second_is_lower)
}

/// A ranked ballot over the three candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ballot {
    Bullet(Candidate),
    Full([Candidate; 3]),
}

impl Ballot {
    /// Builds a ballot from a ranking prefix. Two-candidate rankings are
    /// completed with the remaining candidate in third place.
    pub fn from_ranking(ranking: &[Candidate]) -> Result<Ballot, ElectionError> {
        let mut seen = CandidateSet::empty();
        for &c in ranking {
            if seen.contains(c) {
                return Err(ElectionError::InvalidBallot(format!("{c} ranked twice")));
            }
            seen.insert(c);
        }
        match *ranking {
            [c] => Ok(Ballot::Bullet(c)),
            [x, y] => {
                let z = Candidate::ALL.into_iter().find(|c| !seen.contains(*c)).unwrap();
                Ok(Ballot::Full([x, y, z]))
            }
            [x, y, z] => Ok(Ballot::Full([x, y, z])),
            _ => Err(ElectionError::InvalidBallot(format!(
                "ranking length {} not in 1..=3",
                ranking.len()
            ))),
        }
    }

    pub fn first(self) -> Candidate {
        match self {
            Ballot::Bullet(c) => c,
            Ballot::Full(o) => o[0],
        }
    }
}

/// Counts of the six complete rankings plus the three bullet votes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Profile3 {
    /// a1, a2, b1, b2, c1, c2 as in [`FULL_ORDERS`].
    pub full: [u64; 6],
    /// Bullet votes for A, B, C.
    pub bullets: [u64; 3],
}

impl Profile3 {
    pub fn complete(full: [u64; 6]) -> Self {
        Profile3 { full, bullets: [0; 3] }
    }

    pub fn new(full: [u64; 6], bullets: [u64; 3]) -> Self {
        Profile3 { full, bullets }
    }

    pub fn from_ballots<'a>(ballots: impl IntoIterator<Item = &'a (u64, Ballot)>) -> Self {
        let mut p = Profile3::default();
        for &(n, b) in ballots {
            p.add(b, n);
        }
        p
    }

    pub fn add(&mut self, ballot: Ballot, count: u64) {
        match ballot {
            Ballot::Bullet(c) => self.bullets[c.index()] += count,
            Ballot::Full(o) => self.full[full_order_index(o)] += count,
        }
    }

    pub fn voters(&self) -> u64 {
        self.full.iter().sum::<u64>() + self.bullet_total()
    }

    pub fn bullet_total(&self) -> u64 {
        self.bullets.iter().sum()
    }

    pub fn is_complete(&self) -> bool {
        self.bullet_total() == 0
    }

    /// Number of complete ballots with `order`.
    pub fn count(&self, order: [Candidate; 3]) -> u64 {
        self.full[full_order_index(order)]
    }

    /// First-place votes (bullets included).
    pub fn first_place(&self, c: Candidate) -> u64 {
        let i = c.index();
        self.full[2 * i] + self.full[2 * i + 1] + self.bullets[i]
    }

    pub fn second_place(&self, c: Candidate) -> u64 {
        FULL_ORDERS
            .iter()
            .zip(self.full)
            .filter(|(o, _)| o[1] == c)
            .map(|(_, n)| n)
            .sum()
    }

    pub fn third_place(&self, c: Candidate) -> u64 {
        FULL_ORDERS
            .iter()
            .zip(self.full)
            .filter(|(o, _)| o[2] == c)
            .map(|(_, n)| n)
            .sum()
    }

    /// Relabels candidates: candidate `c` becomes `perm[c]`.
    pub fn relabeled(&self, perm: [Candidate; 3]) -> Profile3 {
        let mut out = Profile3::default();
        for (order, &n) in FULL_ORDERS.iter().zip(&self.full) {
            let mapped = [perm[order[0].index()], perm[order[1].index()], perm[order[2].index()]];
            out.full[full_order_index(mapped)] += n;
        }
        for c in Candidate::ALL {
            out.bullets[perm[c.index()].index()] += self.bullets[c.index()];
        }
        out
    }

    /// Iterator over (count, ballot) groups with non-zero count.
    pub fn ballots(&self) -> impl Iterator<Item = (u64, Ballot)> + '_ {
        let full = FULL_ORDERS
            .iter()
            .zip(self.full)
            .map(|(o, n)| (n, Ballot::Full(*o)));
        let bullets = Candidate::ALL
            .into_iter()
            .map(move |c| (self.bullets[c.index()], Ballot::Bullet(c)));
        full.chain(bullets).filter(|(n, _)| *n > 0)
    }
}

/// The six relabelings of {A, B, C}.
pub const PERMUTATIONS: [[Candidate; 3]; 6] = FULL_ORDERS;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_index_matches_table() {
        for (i, o) in FULL_ORDERS.iter().enumerate() {
            assert_eq!(full_order_index(*o), i);
        }
    }

    #[test]
    fn two_candidate_ranking_is_completed() {
        let b = Ballot::from_ranking(&[Candidate::B, Candidate::C]).unwrap();
        assert_eq!(b, Ballot::Full([Candidate::B, Candidate::C, Candidate::A]));
    }

    #[test]
    fn rejects_duplicates_and_empty() {
        assert!(Ballot::from_ranking(&[Candidate::A, Candidate::A]).is_err());
        assert!(Ballot::from_ranking(&[]).is_err());
    }

    #[test]
    fn nineteen_voter_place_counts() {
        let p = Profile3::complete([6, 0, 0, 8, 4, 1]);
        assert_eq!(p.voters(), 19);
        assert_eq!(
            [p.first_place(Candidate::A), p.first_place(Candidate::B), p.first_place(Candidate::C)],
            [6, 8, 5]
        );
        assert_eq!(p.third_place(Candidate::A), 9);
    }

    #[test]
    fn relabel_swaps_columns() {
        let p = Profile3::new([1, 2, 3, 4, 5, 6], [7, 8, 9]);
        // swap A and B
        let q = p.relabeled([Candidate::B, Candidate::A, Candidate::C]);
        assert_eq!(q.count([Candidate::B, Candidate::A, Candidate::C]), 1);
        assert_eq!(q.count([Candidate::C, Candidate::A, Candidate::B]), 6);
        assert_eq!(q.bullets, [8, 7, 9]);
        assert_eq!(q.voters(), p.voters());
    }

    #[test]
    fn pick_reports_ties() {
        let vals = [3, 1, 3];
        assert_eq!(
            Pick::argmax(|c| vals[c.index()]).members().len(),
            2
        );
        assert_eq!(Pick::argmin(|c| vals[c.index()]), Pick::Unique(Candidate::B));
    }
}
