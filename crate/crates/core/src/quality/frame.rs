use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::weights::{weight_vectors, WeightVectorSet};
use super::QualityError;
use crate::project::{Money, ObjectivePoint, ProjectNetwork};

/// Default size bound of the weight-vector sample.
pub const DEFAULT_MIN_WEIGHTS: usize = 50;

/// A (duration, cost) pair in exact units.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectiveVector {
    pub duration: u64,
    #[serde(rename = "cost_cents")]
    pub cost: Money,
}

impl ObjectiveVector {
    pub fn new(duration: u64, cost: Money) -> Self {
        ObjectiveVector { duration, cost }
    }

    pub fn of(p: &ObjectivePoint) -> Self {
        ObjectiveVector::new(p.duration, p.total_cost)
    }
}

/// The augmentation coefficient of the achievement function, an exact
/// decimal in `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rho {
    num: i64,
    den: i64,
}

impl Rho {
    pub const DEFAULT: Rho = Rho { num: 1, den: 100 };

    /// `num / den`; `den` must be a positive power of ten.
    pub fn new(num: i64, den: i64) -> Result<Self, QualityError> {
        let mut d = den;
        while d > 1 && d % 10 == 0 {
            d /= 10;
        }
        if den <= 0 || d != 1 || num < 0 || num >= den {
            return Err(QualityError::InvalidRho(format!("{num}/{den}")));
        }
        Ok(Rho { num, den })
    }

    pub fn num(self) -> i64 {
        self.num
    }

    pub fn den(self) -> i64 {
        self.den
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl Default for Rho {
    fn default() -> Self {
        Rho::DEFAULT
    }
}

impl fmt::Display for Rho {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = self.den.ilog10() as usize;
        if digits == 0 {
            return write!(f, "{}", self.num);
        }
        write!(f, "0.{:0digits$}", self.num)
    }
}

impl FromStr for Rho {
    type Err = QualityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || QualityError::InvalidRho(s.to_string());
        let t = s.trim();
        let (int, frac) = t.split_once('.').unwrap_or((t, ""));
        if int.is_empty() && frac.is_empty()
            || frac.len() > 12
            || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())
        {
            return Err(bad());
        }
        let den = 10i64.pow(frac.len() as u32);
        let int: i64 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let frac: i64 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| bad())?
        };
        let num = int
            .checked_mul(den)
            .and_then(|v| v.checked_add(frac))
            .ok_or_else(bad)?;
        Rho::new(num, den).map_err(|_| bad())
    }
}

impl Serialize for Rho {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rho {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Number(f64),
        }
        let text = match Raw::deserialize(d)? {
            Raw::Text(t) => t,
            Raw::Number(x) => format!("{x}"),
        };
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Range equalization factors `1 / R_j`. A zero range gets factor 1.
pub fn equalization_factors(ranges: &[f64]) -> Vec<f64> {
    ranges
        .iter()
        .map(|&r| {
            if r > 0.0 {
                1.0 / r
            } else {
                log::warn!("zero objective range, using equalization factor 1");
                1.0
            }
        })
        .collect()
}

/// Reference point, objective ranges, weight lattice size and `rho` used to
/// compute average quality on one instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceFrame {
    pub reference_point: ObjectiveVector,
    pub ranges: ObjectiveVector,
    pub l: u32,
    pub rho: Rho,
}

impl ReferenceFrame {
    pub fn new(reference_point: ObjectiveVector, ranges: ObjectiveVector, rho: Rho) -> Self {
        ReferenceFrame {
            reference_point,
            ranges,
            l: weight_vectors(2, DEFAULT_MIN_WEIGHTS).l(),
            rho,
        }
    }

    /// Frame built from [`ideal_point_estimate`].
    pub fn estimate(network: &ProjectNetwork, rho: Rho) -> Self {
        let (reference_point, ranges) = ideal_point_estimate(network);
        ReferenceFrame::new(reference_point, ranges, rho)
    }

    pub fn weights(&self) -> WeightVectorSet {
        WeightVectorSet::lattice(2, self.l)
    }

    /// Ranges in base units (days, cents) with a zero range replaced by one
    /// day or one currency unit.
    pub(crate) fn effective_ranges(&self) -> [i128; 2] {
        let d = self.ranges.duration as i128;
        let c = self.ranges.cost.cents() as i128;
        [if d > 0 { d } else { 1 }, if c > 0 { c } else { 100 }]
    }

    /// Equalization factors per day and per currency unit.
    pub fn equalization_factors(&self) -> [f64; 2] {
        let f = equalization_factors(&[self.ranges.duration as f64, self.ranges.cost.to_f64()]);
        [f[0], f[1]]
    }

    pub fn to_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("frame serializes");
        v["equalization_factors"] = serde_json::json!(self.equalization_factors());
        serde_json::to_string_pretty(&v).expect("frame serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        let mut v: serde_json::Value = serde_json::from_str(text)?;
        if let Some(obj) = v.as_object_mut() {
            obj.remove("equalization_factors");
        }
        serde_json::from_value(v)
    }
}

/// Approximates the ideal point by optimizing each objective separately.
///
/// Duration: the all-fastest assignment is exactly optimal. Cost: best-improvement
/// single-mode swaps from the all-cheapest-direct-cost assignment until no
/// swap lowers total cost. Ranges are the spread of every accepted point of
/// both searches.
pub fn ideal_point_estimate(network: &ProjectNetwork) -> (ObjectiveVector, ObjectiveVector) {
    let fastest = network.evaluate_unchecked(network.assignment_by(|m| m.duration).modes());
    let mut seen = vec![fastest];

    let mut modes = network.assignment_by(|m| m.direct_cost).into_inner();
    let mut current = network.evaluate_unchecked(&modes);
    seen.push(current);
    let counts: Vec<usize> = network.mode_counts().collect();
    loop {
        let mut best: Option<(Money, usize, usize, ObjectivePoint)> = None;
        for (i, &n) in counts.iter().enumerate() {
            let keep = modes[i];
            for m in (0..n).filter(|&m| m != keep) {
                modes[i] = m;
                let p = network.evaluate_unchecked(&modes);
                if p.total_cost < current.total_cost
                    && best.as_ref().is_none_or(|b| p.total_cost < b.0)
                {
                    best = Some((p.total_cost, i, m, p));
                }
            }
            modes[i] = keep;
        }
        match best {
            Some((_, i, m, p)) => {
                modes[i] = m;
                current = p;
                seen.push(p);
            }
            None => break,
        }
    }

    let d_min = seen.iter().map(|p| p.duration).min().unwrap_or(0);
    let d_max = seen.iter().map(|p| p.duration).max().unwrap_or(0);
    let c_min = seen
        .iter()
        .map(|p| p.total_cost)
        .min()
        .unwrap_or(Money::ZERO);
    let c_max = seen
        .iter()
        .map(|p| p.total_cost)
        .max()
        .unwrap_or(Money::ZERO);
    let ideal = ObjectiveVector::new(fastest.duration, c_min);
    (
        ideal,
        ObjectiveVector::new(
            d_max - d_min,
            Money::from_cents(c_max.cents() - c_min.cents()),
        ),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rho_parsing_and_display() {
        let r: Rho = "0.01".parse().unwrap();
        assert_eq!((r.num(), r.den()), (1, 100));
        assert_eq!(r.to_string(), "0.01");
        assert_eq!("0".parse::<Rho>().unwrap().to_string(), "0");
        assert!("1".parse::<Rho>().is_err());
        assert!("-0.1".parse::<Rho>().is_err());
        assert!("abc".parse::<Rho>().is_err());
    }

    #[test]
    fn rho_from_json_number_or_string() {
        let a: Rho = serde_json::from_str("0.05").unwrap();
        let b: Rho = serde_json::from_str("\"0.05\"").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn factors() {
        assert_eq!(equalization_factors(&[10.0, 100.0]), vec![0.1, 0.01]);
        assert_eq!(equalization_factors(&[1.0, 1.0]), vec![1.0, 1.0]);
        assert_eq!(equalization_factors(&[0.0, 4.0]), vec![1.0, 0.25]);
    }

    #[test]
    fn frame_json_round_trip() {
        let f = ReferenceFrame::new(
            ObjectiveVector::new(12, Money::from_cents(123456)),
            ObjectiveVector::new(30, Money::from_units(4000)),
            Rho::DEFAULT,
        );
        let text = f.to_json();
        assert!(text.contains("equalization_factors"));
        assert_eq!(ReferenceFrame::from_json(&text).unwrap(), f);
    }
}
