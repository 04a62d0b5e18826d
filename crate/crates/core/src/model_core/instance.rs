//! Points of the Boolean feature cube and partial assignments over it.
//!
//! Indices are 0-based internally. Everything that crosses the I/O boundary
//! (JSON, CLI, bit-strings) uses 1-based feature indices, most-significant
//! (first) feature leftmost.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{usage, Error, Result};

/// A point of `{0,1}^d`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Instance(Vec<bool>);

impl Instance {
    pub fn new(bits: Vec<bool>) -> Self {
        Instance(bits)
    }

    pub fn zeros(d: usize) -> Self {
        Instance(vec![false; d])
    }

    pub fn ones(d: usize) -> Self {
        Instance(vec![true; d])
    }

    pub fn constant(d: usize, bit: bool) -> Self {
        Instance(vec![bit; d])
    }

    /// The instance whose bit-string, read as a binary number, equals `code`.
    pub fn from_code(code: u64, d: usize) -> Self {
        debug_assert!(d <= 64);
        Instance((0..d).map(|i| (code >> (d - 1 - i)) & 1 == 1).collect())
    }

    /// Inverse of [`Instance::from_code`].
    pub fn code(&self) -> u64 {
        debug_assert!(self.0.len() <= 64);
        self.0.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
    }

    /// The indicator vector of `features` in dimension `d`.
    pub fn indicator(d: usize, features: &[usize]) -> Self {
        let mut bits = vec![false; d];
        for &i in features {
            bits[i] = true;
        }
        Instance(bits)
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

    pub fn set(&mut self, i: usize, b: bool) {
        self.0[i] = b;
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i] = !self.0[i];
    }

    pub fn flipped(&self, i: usize) -> Self {
        let mut y = self.clone();
        y.flip(i);
        y
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    /// Coordinatewise `self <= other`.
    pub fn le(&self, other: &Instance) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(&a, &b)| a <= b)
    }

    /// Hamming distance; lengths must agree.
    pub fn distance(&self, other: &Instance) -> usize {
        debug_assert_eq!(self.len(), other.len());
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Instance({self})")
    }
}

impl FromStr for Instance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(usage("instance must be a non-empty bit-string"));
        }
        s.chars()
            .enumerate()
            .map(|(pos, c)| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(usage(format!(
                    "instance character {} is {other:?}, expected '0' or '1'",
                    pos + 1
                ))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Instance)
    }
}

impl Serialize for Instance {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Instance {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A partial assignment `[d] -> {0,1}`, stored densely as `{0,1,*}^d`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Restriction(Vec<Option<bool>>);

impl Restriction {
    /// The all-`*` restriction.
    pub fn empty(d: usize) -> Self {
        Restriction(vec![None; d])
    }

    pub fn new(cells: Vec<Option<bool>>) -> Self {
        Restriction(cells)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        self.0[i]
    }

    pub fn is_fixed(&self, i: usize) -> bool {
        self.0[i].is_some()
    }

    pub fn cells(&self) -> &[Option<bool>] {
        &self.0
    }

    /// `Dom(ρ)` in ascending order.
    pub fn domain(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.map(|_| i))
            .collect()
    }

    /// Features not in `Dom(ρ)`, ascending.
    pub fn free(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.is_none().then_some(i))
            .collect()
    }

    pub fn domain_size(&self) -> usize {
        self.0.iter().filter(|c| c.is_some()).count()
    }

    pub fn set(&mut self, i: usize, b: bool) {
        self.0[i] = Some(b);
    }

    /// `ρ_{i←b}`.
    pub fn with(&self, i: usize, b: bool) -> Self {
        let mut r = self.clone();
        r.0[i] = Some(b);
        r
    }

    /// `x` overwritten by this restriction. Lengths must agree.
    pub fn apply(&self, x: &Instance) -> Instance {
        debug_assert_eq!(self.len(), x.len());
        Instance(
            self.0
                .iter()
                .zip(x.bits())
                .map(|(c, &b)| c.unwrap_or(b))
                .collect(),
        )
    }

    /// Whether `x` agrees with every fixed cell.
    pub fn is_consistent(&self, x: &Instance) -> bool {
        self.len() == x.len()
            && self
                .0
                .iter()
                .zip(x.bits())
                .all(|(c, &b)| c.is_none_or(|v| v == b))
    }

    /// The restriction fixing exactly `features` to their values in `x`.
    pub fn from_instance(x: &Instance, features: &[usize]) -> Self {
        let mut r = Restriction::empty(x.len());
        for &i in features {
            r.0[i] = Some(x.get(i));
        }
        r
    }
}

impl fmt::Display for Restriction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.0 {
            f.write_str(match c {
                None => "*",
                Some(false) => "0",
                Some(true) => "1",
            })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Restriction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Restriction({self})")
    }
}

impl FromStr for Restriction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .chars()
            .enumerate()
            .map(|(pos, c)| match c {
                '0' => Ok(Some(false)),
                '1' => Ok(Some(true)),
                '*' => Ok(None),
                other => Err(usage(format!(
                    "restriction character {} is {other:?}, expected '0', '1' or '*'",
                    pos + 1
                ))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Restriction)
    }
}

impl Serialize for Restriction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// The set of features on which `x` and `y` differ (0-based, ascending).
pub fn delta(x: &Instance, y: &Instance) -> Result<Vec<usize>> {
    if x.len() != y.len() {
        return Err(usage(format!(
            "length mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    Ok(x.bits()
        .iter()
        .zip(y.bits())
        .enumerate()
        .filter_map(|(i, (a, b))| (a != b).then_some(i))
        .collect())
}

/// `x` overwritten by `rho`.
pub fn overwrite(x: &Instance, rho: &Restriction) -> Result<Instance> {
    if x.len() != rho.len() {
        return Err(usage(format!(
            "length mismatch: instance {} vs restriction {}",
            x.len(),
            rho.len()
        )));
    }
    Ok(rho.apply(x))
}

/// Shift 0-based indices to the 1-based form used in reports.
pub fn one_based(features: &[usize]) -> Vec<usize> {
    features.iter().map(|i| i + 1).collect()
}
