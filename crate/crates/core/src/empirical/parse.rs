use super::EmpiricalError;
use crate::election::{Ballot, Candidate, Profile3};
use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

/// An election over named candidates. Rankings index into `candidates`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawElection {
    pub candidates: Vec<String>,
    /// (count, ranking); an empty ranking is a blank ballot.
    pub ballots: Vec<(u64, Vec<usize>)>,
}

impl RawElection {
    pub fn total_ballots(&self) -> u64 {
        self.ballots.iter().map(|(n, _)| n).sum()
    }

    pub fn blank_ballots(&self) -> u64 {
        self.ballots.iter().filter(|(_, r)| r.is_empty()).map(|(n, _)| n).sum()
    }

    /// The profile in header order (first name is A). Blank ballots are
    /// left out.
    pub fn to_profile3(&self) -> Result<Profile3, EmpiricalError> {
        if self.candidates.len() != 3 {
            return Err(EmpiricalError::NotThreeCandidates(self.candidates.len()));
        }
        let mut p = Profile3::default();
        for (n, r) in &self.ballots {
            if r.is_empty() {
                continue;
            }
            let ranking: Vec<Candidate> = r.iter().map(|&i| Candidate::new(i).unwrap()).collect();
            let ballot = Ballot::from_ranking(&ranking).map_err(|e| EmpiricalError::Parse {
                line: 0,
                message: e.to_string(),
            })?;
            p.add(ballot, *n);
        }
        if p.voters() == 0 {
            return Err(EmpiricalError::EmptyElection);
        }
        Ok(p)
    }
}

pub fn parse_ballots(path: &Path) -> Result<RawElection, EmpiricalError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| EmpiricalError::Io { path: path.display().to_string(), message: e.to_string() })?;
    parse_ballots_str(&text)
}

/// Parses `candidates:n1;n2;...` followed by `count,choice1,choice2,...`
/// rows. Trailing empty choices mark truncation. A ranking that omits
/// exactly one candidate is completed with it.
pub fn parse_ballots_str(text: &str) -> Result<RawElection, EmpiricalError> {
    let err = |line: usize, message: String| EmpiricalError::Parse { line, message };
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));

    let (hline, header) = lines
        .by_ref()
        .find(|(_, l)| !l.trim().is_empty())
        .ok_or(EmpiricalError::EmptyElection)?;
    let names = header
        .trim()
        .strip_prefix("candidates:")
        .ok_or_else(|| err(hline, "header must start with `candidates:`".into()))?;
    let candidates: Vec<String> = names.split(';').map(|s| s.trim().to_string()).collect();
    let mut index = HashMap::new();
    for (i, name) in candidates.iter().enumerate() {
        if name.is_empty() {
            return Err(err(hline, "empty candidate name".into()));
        }
        if index.insert(name.as_str(), i).is_some() {
            return Err(err(hline, format!("candidate `{name}` listed twice")));
        }
    }
    let m = candidates.len();

    let mut ballots = Vec::new();
    for (line, row) in lines {
        if row.trim().is_empty() {
            continue;
        }
        let mut fields = row.split(',');
        let count_field = fields.next().unwrap_or("").trim();
        let count: u64 = count_field
            .parse()
            .map_err(|_| err(line, format!("bad ballot count `{count_field}`")))?;
        if count == 0 {
            return Err(err(line, "ballot count must be positive".into()));
        }
        let mut ranking = Vec::new();
        let mut ended = false;
        for f in fields {
            let f = f.trim();
            if f.is_empty() {
                ended = true;
                continue;
            }
            if ended {
                return Err(err(line, "choice after an empty field".into()));
            }
            let &c = index.get(f).ok_or_else(|| err(line, format!("unknown candidate `{f}`")))?;
            if ranking.contains(&c) {
                return Err(err(line, format!("candidate `{f}` ranked twice")));
            }
            ranking.push(c);
        }
        if m >= 2 && ranking.len() == m - 1 {
            let missing = (0..m).find(|c| !ranking.contains(c)).unwrap();
            ranking.push(missing);
        }
        ballots.push((count, ranking));
    }
    if ballots.is_empty() {
        return Err(EmpiricalError::EmptyElection);
    }
    Ok(RawElection { candidates, ballots })
}

/// Serializes a three-candidate profile in the ballot format, one row per
/// non-empty group.
pub fn write_ballots(names: &[String; 3], profile: &Profile3) -> String {
    let mut out = format!("candidates:{}\n", names.join(";"));
    for (n, ballot) in profile.ballots() {
        match ballot {
            Ballot::Full(o) => {
                let _ = writeln!(out, "{n},{},{},{}", names[o[0].index()], names[o[1].index()], names[o[2].index()]);
            }
            Ballot::Bullet(c) => {
                let _ = writeln!(out, "{n},{},,", names[c.index()]);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const NINETEEN: &str = "candidates:A;B;C\n6,A,B,C\n8,B,C,A\n4,C,A,B\n1,C,B,A\n";

    #[test]
    fn nineteen_voter_file() {
        let raw = parse_ballots_str(NINETEEN).unwrap();
        assert_eq!(raw.to_profile3().unwrap(), Profile3::complete([6, 0, 0, 8, 4, 1]));
    }

    #[test]
    fn truncated_rows_are_bullets() {
        let text = "candidates:Arab;Gordon;Worlobah\n1572,Arab,,\n822,Gordon,,\n492,Worlobah,,\n";
        let p = parse_ballots_str(text).unwrap().to_profile3().unwrap();
        assert_eq!(p.bullets, [1572, 822, 492]);
    }

    #[test]
    fn two_of_three_is_completed() {
        let p = parse_ballots_str("candidates:A;B;C\n3,B,A\n").unwrap();
        assert_eq!(p.ballots, vec![(3, vec![1, 0, 2])]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("candidates:A;B;C\n", EmpiricalError::EmptyElection),
            ("candidates:A;B;C\n1,A,D\n", EmpiricalError::Parse { line: 2, message: "unknown candidate `D`".into() }),
            ("candidates:A;B;C\n\n2,A,A\n", EmpiricalError::Parse { line: 3, message: "candidate `A` ranked twice".into() }),
            ("candidates:A;B;C\nx,A\n", EmpiricalError::Parse { line: 2, message: "bad ballot count `x`".into() }),
            ("A;B;C\n1,A\n", EmpiricalError::Parse { line: 1, message: "header must start with `candidates:`".into() }),
            ("candidates:A;B;C\n1,A,,B\n", EmpiricalError::Parse { line: 2, message: "choice after an empty field".into() }),
        ];
        for (text, expected) in cases {
            assert_eq!(parse_ballots_str(text).unwrap_err(), expected, "{text:?}");
        }
    }

    #[test]
    fn write_then_parse_roundtrip() {
        let names = ["X".to_string(), "Y".to_string(), "Z".to_string()];
        let p = Profile3::new([1, 2, 0, 4, 5, 6], [7, 0, 9]);
        let raw = parse_ballots_str(&write_ballots(&names, &p)).unwrap();
        assert_eq!(raw.to_profile3().unwrap(), p);
    }
}
