//! Binary vectors over Bernoulli components.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

macro_rules! indicator_vector {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(Vec<bool>);

        impl $name {
            pub fn new(bits: Vec<bool>) -> Self {
                Self(bits)
            }

            pub fn zeros(len: usize) -> Self {
                Self(vec![false; len])
            }

            pub fn ones(len: usize) -> Self {
                Self(vec![true; len])
            }

            /// Entry `i` is bit `i` of `mask`.
            pub fn from_mask(len: usize, mask: u64) -> Self {
                debug_assert!(len <= 64);
                Self((0..len).map(|i| mask >> i & 1 == 1).collect())
            }

            /// Parses 0/1 integers.
            pub fn from_bits(bits: &[u8]) -> Result<Self> {
                bits.iter()
                    .map(|&b| match b {
                        0 => Ok(false),
                        1 => Ok(true),
                        other => Err(Error::InvalidIndicator(other.to_string())),
                    })
                    .collect::<Result<Vec<_>>>()
                    .map(Self)
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

            pub fn as_slice(&self) -> &[bool] {
                &self.0
            }

            /// Number of ones.
            pub fn count(&self) -> usize {
                self.0.iter().filter(|&&b| b).count()
            }

            /// Indices of the ones, ascending.
            pub fn ones_indices(&self) -> impl Iterator<Item = usize> + '_ {
                self.0.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
            }

            /// Copy with entry `i` replaced.
            pub fn with(&self, i: usize, value: bool) -> Self {
                let mut bits = self.0.clone();
                bits[i] = value;
                Self(bits)
            }
        }

        /// Serialised as an array of 0/1 integers.
        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
                serializer.collect_seq(self.0.iter().map(|&b| u8::from(b)))
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
                let bits = Vec::<u8>::deserialize(deserializer)?;
                Self::from_bits(&bits).map_err(serde::de::Error::custom)
            }
        }

        impl From<Vec<bool>> for $name {
            fn from(bits: Vec<bool>) -> Self {
                Self(bits)
            }
        }

        /// Comma-separated 0/1 entries, e.g. `1,0,1`.
        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                for (i, &b) in self.0.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    f.write_str(if b { "1" } else { "0" })?;
                }
                Ok(())
            }
        }

        impl FromStr for $name {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                let s = s.trim();
                if s.is_empty() {
                    return Ok(Self(Vec::new()));
                }
                s.split(',')
                    .map(|tok| match tok.trim() {
                        "0" => Ok(false),
                        "1" => Ok(true),
                        other => Err(Error::InvalidIndicator(other.to_owned())),
                    })
                    .collect::<Result<Vec<_>>>()
                    .map(Self)
            }
        }
    };
}

indicator_vector!(
    /// Which Bernoulli components have an existing target in one realisation.
    ExistenceEvent
);

indicator_vector!(
    /// Which Bernoulli components an estimate reports.
    DetectionVector
);

impl From<&ExistenceEvent> for DetectionVector {
    fn from(e: &ExistenceEvent) -> Self {
        Self(e.0.clone())
    }
}
