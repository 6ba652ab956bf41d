//! Strict linear inequality systems over the six ranking counts
//! (a1, a2, b1, b2, c1, c2), and events built from unions of them.

use super::AnalyticError;
use crate::election::{full_order_index, FULL_ORDERS, PERMUTATIONS};

/// How a constraint relates to the electorate size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintKind {
    /// Compares two groups of counts; coefficients sum to zero.
    Difference,
    /// Compares one group against all remaining voters, so every coordinate
    /// has coefficient +1 or -1 and the sum is non-zero.
    Majority,
}

/// `coeffs . x > 0`. Coefficients are stored as integers; half-point
/// Borda constraints are multiplied through by two.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: [i64; 6],
    pub kind: ConstraintKind,
}

impl Constraint {
    pub fn difference(coeffs: [i64; 6]) -> Result<Self, AnalyticError> {
        if coeffs.iter().sum::<i64>() != 0 {
            return Err(AnalyticError::InvalidSystem(format!("{coeffs:?} does not sum to zero")));
        }
        if coeffs.iter().all(|&c| c == 0) {
            return Err(AnalyticError::InvalidSystem("zero constraint".into()));
        }
        Ok(Constraint { coeffs, kind: ConstraintKind::Difference })
    }

    pub fn majority(coeffs: [i64; 6]) -> Result<Self, AnalyticError> {
        if coeffs.iter().any(|c| c.abs() != 1) || coeffs.iter().sum::<i64>() == 0 {
            return Err(AnalyticError::InvalidSystem(format!("{coeffs:?} is not a majority constraint")));
        }
        Ok(Constraint { coeffs, kind: ConstraintKind::Majority })
    }

    pub fn coefficient_sum(&self) -> i64 {
        self.coeffs.iter().sum()
    }

    #[inline]
    pub fn eval(&self, x: &[f64; 6]) -> f64 {
        self.coeffs.iter().zip(x).map(|(&c, &v)| c as f64 * v).sum()
    }

    #[inline]
    pub fn eval_int(&self, x: &[i64; 6]) -> i64 {
        self.coeffs.iter().zip(x).map(|(&c, &v)| c * v).sum()
    }

    /// Whether the constraint holds in the impartial-culture limit for the
    /// centred fluctuation `z`. A majority constraint is decided by the sign
    /// of its coefficient sum, since its mean grows linearly in V.
    #[inline]
    pub fn holds_ic(&self, z: &[f64; 6]) -> bool {
        match self.kind {
            ConstraintKind::Difference => self.eval(z) > 0.0,
            ConstraintKind::Majority => self.coefficient_sum() > 0,
        }
    }
}

fn diff(c: [i64; 6]) -> Constraint {
    Constraint::difference(c).expect("built-in constraint is balanced")
}

fn maj(c: [i64; 6]) -> Constraint {
    Constraint::majority(c).expect("built-in majority constraint")
}

/// a1 + a2 > b1 + b2.
pub fn a_over_b_first() -> Constraint {
    diff([1, 1, -1, -1, 0, 0])
}

/// b1 + b2 > c1 + c2.
pub fn b_over_c_first() -> Constraint {
    diff([0, 0, 1, 1, -1, -1])
}

/// B beats A once C is eliminated: b1 + b2 + c2 > a1 + a2 + c1.
pub fn b_beats_a_after_c() -> Constraint {
    diff([-1, -1, 1, 1, -1, 1])
}

/// Twice the Borda-score difference `x - y` between candidates.
pub fn borda_difference(x: usize, y: usize) -> Constraint {
    let mut coeffs = [0i64; 6];
    for (k, order) in FULL_ORDERS.iter().enumerate() {
        let pos = |c: usize| order.iter().position(|o| o.index() == c).unwrap() as i64;
        coeffs[k] = pos(y) - pos(x);
    }
    diff(coeffs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SystemLabel {
    /// A is the IRV winner without a majority and the Borda loser.
    AWinsBorda,
    /// B is the IRV winner and the Borda loser.
    BWinsBorda,
    /// A has a first-place majority and the most last-place votes.
    AMajorityMostLast,
    /// A wins in the second round and has the most last-place votes.
    ARound2MostLast,
    /// B wins and has the most last-place votes.
    BRound2MostLast,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InequalitySystem {
    pub label: SystemLabel,
    pub constraints: Vec<Constraint>,
}

impl InequalitySystem {
    pub fn new(label: SystemLabel, constraints: Vec<Constraint>) -> Self {
        InequalitySystem { label, constraints }
    }

    /// The plurality order a1+a2 > b1+b2 > c1+c2 followed by `rest`.
    pub fn with_plurality_order(label: SystemLabel, rest: Vec<Constraint>) -> Self {
        let mut constraints = vec![a_over_b_first(), b_over_c_first()];
        constraints.extend(rest);
        InequalitySystem { label, constraints }
    }

    pub fn a_wins_borda() -> Self {
        Self::with_plurality_order(
            SystemLabel::AWinsBorda,
            vec![b_beats_a_after_c().negated(), borda_difference(1, 0), borda_difference(2, 0)],
        )
    }

    pub fn b_wins_borda() -> Self {
        Self::with_plurality_order(
            SystemLabel::BWinsBorda,
            vec![b_beats_a_after_c(), borda_difference(0, 1), borda_difference(2, 1)],
        )
    }

    pub fn a_majority_most_last() -> Self {
        Self::with_plurality_order(
            SystemLabel::AMajorityMostLast,
            vec![maj([1, 1, -1, -1, -1, -1]), diff([0, -1, 0, 1, -1, 1]), diff([-1, 0, -1, 1, 0, 1])],
        )
    }

    pub fn a_round2_most_last() -> Self {
        Self::with_plurality_order(
            SystemLabel::ARound2MostLast,
            vec![
                maj([-1, -1, 1, 1, 1, 1]),
                b_beats_a_after_c().negated(),
                diff([0, -1, 0, 1, -1, 1]),
                diff([-1, 0, -1, 1, 0, 1]),
            ],
        )
    }

    pub fn b_round2_most_last() -> Self {
        Self::with_plurality_order(
            SystemLabel::BRound2MostLast,
            vec![b_beats_a_after_c(), diff([-1, 1, -1, 0, 1, 0]), diff([0, 1, 0, -1, 1, -1])],
        )
    }

    #[inline]
    pub fn holds(&self, x: &[f64; 6]) -> bool {
        self.constraints.iter().all(|c| c.eval(x) > 0.0)
    }

    #[inline]
    pub fn holds_int(&self, x: &[i64; 6]) -> bool {
        self.constraints.iter().all(|c| c.eval_int(x) > 0)
    }

    #[inline]
    pub fn holds_ic(&self, z: &[f64; 6]) -> bool {
        self.constraints.iter().all(|c| c.holds_ic(z))
    }

    /// The constraints that still bind in the impartial-culture limit, or
    /// `None` if some majority constraint can never hold there.
    pub fn ic_constraints(&self) -> Option<Vec<&Constraint>> {
        let mut out = Vec::new();
        for c in &self.constraints {
            match c.kind {
                ConstraintKind::Difference => out.push(c),
                ConstraintKind::Majority if c.coefficient_sum() > 0 => {}
                ConstraintKind::Majority => return None,
            }
        }
        Some(out)
    }
}

impl Constraint {
    pub fn negated(&self) -> Constraint {
        Constraint { coeffs: self.coeffs.map(|c| -c), kind: self.kind }
    }
}

/// Maps of the six candidate relabelings on count vectors: the relabeled
/// vector is `y[j] = x[map[j]]`.
pub fn relabel_maps() -> [[usize; 6]; 6] {
    let mut maps = [[0usize; 6]; 6];
    for (p, perm) in PERMUTATIONS.iter().enumerate() {
        for (j, order) in FULL_ORDERS.iter().enumerate() {
            maps[p][j] = full_order_index(order.map(|c| perm[c.index()]));
        }
    }
    maps
}

/// A union of disjoint inequality systems. When `symmetrize` is set the
/// probability is summed over all six relabelings of the candidates, which
/// turns a system written for the plurality order A, B, C into the
/// corresponding statement about arbitrary candidates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub name: String,
    pub systems: Vec<InequalitySystem>,
    pub symmetrize: bool,
}

impl Event {
    pub fn new(name: &str, systems: Vec<InequalitySystem>, symmetrize: bool) -> Self {
        Event { name: name.to_string(), systems, symmetrize }
    }

    /// Every profile.
    pub fn whole() -> Self {
        Event::new("whole", vec![InequalitySystem::new(SystemLabel::Custom, Vec::new())], false)
    }

    pub fn half_space(c: Constraint) -> Self {
        Event::new("half_space", vec![InequalitySystem::new(SystemLabel::Custom, vec![c])], false)
    }

    pub fn borda_loser() -> Self {
        Event::new(
            "borda_loser",
            vec![InequalitySystem::a_wins_borda(), InequalitySystem::b_wins_borda()],
            true,
        )
    }

    pub fn bucklin_loser() -> Self {
        Event::new(
            "bucklin_loser",
            vec![InequalitySystem::a_round2_most_last(), InequalitySystem::b_round2_most_last()],
            true,
        )
    }

    pub fn most_last_place() -> Self {
        Event::new(
            "most_last_place",
            vec![
                InequalitySystem::a_majority_most_last(),
                InequalitySystem::a_round2_most_last(),
                InequalitySystem::b_round2_most_last(),
            ],
            true,
        )
    }

    /// The majority-winner part of the most-last-place event.
    pub fn majority_most_last() -> Self {
        Event::new("majority_most_last", vec![InequalitySystem::a_majority_most_last()], true)
    }

    /// a1 + a2 > b2 + c2 together with A being the Borda loser. Empty,
    /// because A's Borda score exceeds the mean score V exactly when
    /// a1 + a2 > b2 + c2.
    pub fn majority_never_borda_loser() -> Self {
        Event::new(
            "majority_never_borda_loser",
            vec![InequalitySystem::new(
                SystemLabel::Custom,
                vec![diff([1, 1, 0, -1, 0, -1]), borda_difference(1, 0), borda_difference(2, 0)],
            )],
            false,
        )
    }

    pub fn multiplicity(&self) -> u64 {
        if self.symmetrize {
            6
        } else {
            1
        }
    }

    /// Number of (relabeling, system) pairs satisfied by `x`.
    #[inline]
    pub fn hits(&self, x: &[f64; 6], maps: &[[usize; 6]; 6]) -> u32 {
        self.count_with(x, maps, |s, y| s.holds(y))
    }

    /// As [`Event::hits`] under impartial-culture limiting semantics.
    #[inline]
    pub fn hits_ic(&self, z: &[f64; 6], maps: &[[usize; 6]; 6]) -> u32 {
        self.count_with(z, maps, |s, y| s.holds_ic(y))
    }

    fn count_with(
        &self,
        x: &[f64; 6],
        maps: &[[usize; 6]; 6],
        holds: impl Fn(&InequalitySystem, &[f64; 6]) -> bool,
    ) -> u32 {
        let perms = if self.symmetrize { &maps[..] } else { &maps[..1] };
        let mut n = 0;
        for map in perms {
            let y = map.map(|i| x[i]);
            n += self.systems.iter().filter(|s| holds(s, &y)).count() as u32;
        }
        n
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn borda_difference_matches_half_point_form() {
        // B - A = b1 + b2 + (a1 + c2)/2 - a1 - a2 - (b1 + c1)/2, doubled
        assert_eq!(borda_difference(1, 0).coeffs, [-1, -2, 1, 2, -1, 1]);
        // C - A
        assert_eq!(borda_difference(2, 0).coeffs, [-2, -1, -1, 1, 1, 2]);
        // C - B
        assert_eq!(borda_difference(2, 1).coeffs, [-1, 1, -2, -1, 2, 1]);
    }

    #[test]
    fn constructors_check_balance() {
        assert!(Constraint::difference([1, 0, 0, 0, 0, 0]).is_err());
        assert!(Constraint::majority([1, 1, -1, -1, 0, 0]).is_err());
        assert!(Constraint::difference([0; 6]).is_err());
        for e in [Event::borda_loser(), Event::most_last_place(), Event::majority_never_borda_loser()] {
            for s in &e.systems {
                for c in &s.constraints {
                    match c.kind {
                        ConstraintKind::Difference => assert_eq!(c.coefficient_sum(), 0),
                        ConstraintKind::Majority => assert_ne!(c.coefficient_sum(), 0),
                    }
                }
            }
        }
    }

    #[test]
    fn relabel_identity_first() {
        assert_eq!(relabel_maps()[0], [0, 1, 2, 3, 4, 5]);
        let maps = relabel_maps();
        for m in maps {
            let mut sorted = m;
            sorted.sort();
            assert_eq!(sorted, [0, 1, 2, 3, 4, 5]);
        }
    }

    #[test]
    fn nineteen_voters_lie_in_a_wins_borda() {
        let x = [6.0, 0.0, 0.0, 8.0, 4.0, 1.0];
        // plurality order is B, A, C: relabel so B becomes A
        let maps = relabel_maps();
        assert_eq!(Event::borda_loser().hits(&x, &maps), 1);
        assert_eq!(Event::most_last_place().hits(&x, &maps), 1);
    }

    #[test]
    fn ic_constraints_drop_or_kill_majority() {
        assert!(InequalitySystem::a_majority_most_last().ic_constraints().is_none());
        assert_eq!(InequalitySystem::a_round2_most_last().ic_constraints().unwrap().len(), 5);
    }
}
