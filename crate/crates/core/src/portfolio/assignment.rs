use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::PortfolioError;

/// Worker counts per roster algorithm, written `a/b/c/d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PortfolioAssignment {
    counts: Vec<usize>,
}

impl PortfolioAssignment {
    pub fn new(counts: Vec<usize>) -> Result<Self, PortfolioError> {
        if counts.is_empty() {
            return Err(PortfolioError::EmptyRoster);
        }
        if counts.iter().sum::<usize>() == 0 {
            return Err(PortfolioError::NoWorkers);
        }
        Ok(PortfolioAssignment { counts })
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn roster_size(&self) -> usize {
        self.counts.len()
    }

    pub fn processors(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Roster index of every worker slot, in roster order.
    pub fn worker_slots(&self) -> Vec<usize> {
        self.counts
            .iter()
            .enumerate()
            .flat_map(|(alg, &n)| std::iter::repeat_n(alg, n))
            .collect()
    }

    /// File-system friendly label, `a-b-c-d`.
    pub fn slug(&self) -> String {
        self.join("-")
    }

    fn join(&self, sep: &str) -> String {
        self.counts
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(sep)
    }
}

impl fmt::Display for PortfolioAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.join("/"))
    }
}

impl FromStr for PortfolioAssignment {
    type Err = PortfolioError;

    /// Accepts `a/b/c` or `a-b-c`, optionally wrapped in brackets.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().trim_start_matches('[').trim_end_matches(']');
        let counts = t
            .split(['/', '-'])
            .map(|p| p.trim().parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| PortfolioError::BadAssignment(s.to_string()))?;
        PortfolioAssignment::new(counts)
    }
}

impl Serialize for PortfolioAssignment {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PortfolioAssignment {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// The sixteen four-algorithm, four-processor cases of the reduced
/// experiment design, in their published order.
pub const TABLE4: [[usize; 4]; 16] = [
    [4, 0, 0, 0],
    [3, 1, 0, 0],
    [3, 0, 1, 0],
    [3, 0, 0, 1],
    [2, 1, 1, 0],
    [2, 1, 0, 1],
    [1, 0, 1, 2],
    [0, 2, 1, 1],
    [0, 3, 1, 0],
    [0, 4, 0, 0],
    [1, 0, 3, 0],
    [1, 2, 0, 1],
    [0, 0, 4, 0],
    [1, 1, 0, 2],
    [0, 1, 0, 3],
    [0, 0, 0, 4],
];

pub fn table4_assignments() -> Vec<PortfolioAssignment> {
    TABLE4
        .iter()
        .map(|c| PortfolioAssignment { counts: c.to_vec() })
        .collect()
}

/// Number of ways to spread `processors` workers over `roster_size`
/// algorithms, `C(P + r - 1, r - 1)`.
pub fn assignment_count(roster_size: usize, processors: usize) -> u128 {
    let n = (processors + roster_size - 1) as u128;
    let k = (roster_size - 1) as u128;
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Every composition of `processors` into `roster_size` parts, first count
/// descending (`2/0, 1/1, 0/2`), or the `restrict` list as given after
/// validation.
pub fn enumerate_assignments(
    roster_size: usize,
    processors: usize,
    restrict: Option<&[PortfolioAssignment]>,
) -> Result<Vec<PortfolioAssignment>, PortfolioError> {
    if roster_size == 0 {
        return Err(PortfolioError::EmptyRoster);
    }
    if processors == 0 {
        return Err(PortfolioError::NoWorkers);
    }
    if let Some(list) = restrict {
        for a in list {
            if a.roster_size() != roster_size || a.processors() != processors {
                return Err(PortfolioError::AssignmentMismatch {
                    assignment: a.to_string(),
                    roster_size,
                    processors,
                });
            }
        }
        return Ok(list.to_vec());
    }
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(roster_size);
    compositions(roster_size, processors, &mut current, &mut out);
    Ok(out)
}

fn compositions(
    parts: usize,
    remaining: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<PortfolioAssignment>,
) {
    if current.len() + 1 == parts {
        current.push(remaining);
        out.push(PortfolioAssignment {
            counts: current.clone(),
        });
        current.pop();
        return;
    }
    for k in (0..=remaining).rev() {
        current.push(k);
        compositions(parts, remaining - k, current, out);
        current.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_binomial() {
        assert_eq!(enumerate_assignments(2, 2, None).unwrap().len(), 3);
        assert_eq!(enumerate_assignments(2, 4, None).unwrap().len(), 5);
        assert_eq!(enumerate_assignments(4, 4, None).unwrap().len(), 35);
        assert_eq!(assignment_count(4, 4), 35);
    }

    #[test]
    fn canonical_order() {
        let labels: Vec<String> = enumerate_assignments(2, 2, None)
            .unwrap()
            .iter()
            .map(ToString::to_string)
            .collect();
        assert_eq!(labels, vec!["2/0", "1/1", "0/2"]);
    }

    #[test]
    fn table4_is_valid_subset() {
        let t = table4_assignments();
        assert_eq!(t.len(), 16);
        let all = enumerate_assignments(4, 4, None).unwrap();
        assert!(t.iter().all(|a| all.contains(a)));
        assert_eq!(enumerate_assignments(4, 4, Some(&t)).unwrap(), t);
        let bad = vec!["3/0/0/0".parse().unwrap()];
        assert!(enumerate_assignments(4, 4, Some(&bad)).is_err());
    }

    #[test]
    fn parse_and_slots() {
        let a: PortfolioAssignment = "[2/1/0/1]".parse().unwrap();
        assert_eq!(a.worker_slots(), vec![0, 0, 1, 3]);
        assert_eq!(a.slug(), "2-1-0-1");
        assert_eq!("2-1-0-1".parse::<PortfolioAssignment>().unwrap(), a);
        assert!("0/0".parse::<PortfolioAssignment>().is_err());
        assert!("a/b".parse::<PortfolioAssignment>().is_err());
    }
}
