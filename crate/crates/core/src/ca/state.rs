use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// The string `s_1 s_2 ... s_N` of cell states.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CAState(Vec<bool>);

impl CAState {
    pub fn new(bits: Vec<bool>) -> Self {
        CAState(bits)
    }

    pub fn zeros(n: usize) -> Self {
        CAState(vec![false; n])
    }

    /// All zeros except cell `i` (0-based).
    pub fn single(n: usize, i: usize) -> Self {
        let mut s = Self::zeros(n);
        s.0[i] = true;
        s
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, v: bool) {
        self.0[i] = v;
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    /// Binary value with `s_1` as the most significant bit.
    pub fn to_index(&self) -> u64 {
        self.0.iter().fold(0, |acc, &b| acc << 1 | b as u64)
    }

    pub fn from_index(index: u64, n: usize) -> Self {
        CAState((0..n).map(|i| index >> (n - 1 - i) & 1 == 1).collect())
    }
}

impl fmt::Display for CAState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for CAState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .chars()
            .enumerate()
            .map(|(pos, c)| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!(
                    "CA state may only contain 0 and 1, found {other:?} at position {}",
                    pos + 1
                ))),
            })
            .collect::<Result<Vec<bool>>>()
            .and_then(|bits| {
                if bits.is_empty() {
                    Err(Error::Parse("empty CA state".into()))
                } else {
                    Ok(CAState(bits))
                }
            })
    }
}

impl Serialize for CAState {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for CAState {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn string_round_trip() {
        let s: CAState = "0000100000".parse().unwrap();
        assert_eq!(s, CAState::single(10, 4));
        assert_eq!(s.to_string(), "0000100000");
        assert!("0102".parse::<CAState>().is_err());
        assert!("".parse::<CAState>().is_err());
    }

    #[test]
    fn index_reads_first_cell_as_high_bit() {
        let s: CAState = "1001".parse().unwrap();
        assert_eq!(s.to_index(), 9);
        assert_eq!(CAState::from_index(9, 4), s);
        for idx in 0..64 {
            assert_eq!(CAState::from_index(idx, 6).to_index(), idx);
        }
    }
}
