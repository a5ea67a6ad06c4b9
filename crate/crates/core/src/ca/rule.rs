use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::network::NetworkSpec;

/// A Boolean CA rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CARule {
    /// Wolfram-numbered elementary rule on `(left, self, right)`.
    EcaTable(u8),
    /// Sum of predecessor states mod 2, any neighbourhood.
    Parity,
}

/// Evaluate `rule` on neighbourhood states in input order.
pub fn apply_rule(rule: CARule, nbhd: &[bool]) -> Result<bool> {
    match rule {
        CARule::EcaTable(number) => {
            let [l, c, r] = nbhd else {
                return Err(Error::Arity(format!(
                    "ECA rule {number} takes 3 inputs, got {}",
                    nbhd.len()
                )));
            };
            let bit = 4 * (*l as u8) + 2 * (*c as u8) + *r as u8;
            Ok(number >> bit & 1 == 1)
        }
        CARule::Parity => Ok(nbhd.iter().filter(|&&b| b).count() % 2 == 1),
    }
}

/// Rule inputs of every cell: `(i-1, i, i+1)` for table rules, the
/// predecessor list otherwise. Fails when a table rule meets a non-ECA lattice.
pub fn rule_inputs(rule: CARule, spec: &NetworkSpec) -> Result<Vec<Vec<usize>>> {
    let n = spec.size();
    match rule {
        CARule::EcaTable(number) => {
            if !spec.is_eca_lattice() {
                return Err(Error::Arity(format!(
                    "ECA rule {number} needs every cell to listen to exactly its left \
                     neighbour, itself and its right neighbour; use the parity rule for \
                     other networks"
                )));
            }
            Ok((0..n)
                .map(|i| vec![(i + n - 1) % n, i, (i + 1) % n])
                .collect())
        }
        CARule::Parity => Ok((0..n).map(|i| spec.predecessors(i).to_vec()).collect()),
    }
}

impl fmt::Display for CARule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CARule::EcaTable(n) => write!(f, "{n}"),
            CARule::Parity => f.write_str("parity"),
        }
    }
}

impl FromStr for CARule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        if t == "parity" {
            return Ok(CARule::Parity);
        }
        let digits = t
            .strip_prefix("rule")
            .or_else(|| t.strip_prefix("eca"))
            .unwrap_or(&t)
            .trim_start_matches(['-', '_', ' ']);
        digits
            .parse::<u8>()
            .map(CARule::EcaTable)
            .map_err(|_| Error::Parse(format!("unknown rule {s:?}; expected 0-255 or \"parity\"")))
    }
}

impl Serialize for CARule {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for CARule {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u8),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(n) => Ok(CARule::EcaTable(n)),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}
