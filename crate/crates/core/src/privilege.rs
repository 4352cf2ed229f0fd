//! Privileges on data and processes, status points and transform modes.
//!
//! The two flag sets ([`PrivilegeSet`], [`StatusPoints`]) are small bit sets
//! whose iteration order is the canonical keyword order used by the text
//! format.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown {kind} `{word}`")]
pub struct UnknownKeyword {
    pub kind: &'static str,
    pub word: String,
}

/// A privilege a role holds on a class.
///
/// Plain privileges apply to instances the role created itself; the `Plus`
/// variants apply to instances created by other roles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Privilege {
    Creation,
    Modification,
    Reference,
    Suppression,
    ModificationPlus,
    ReferencePlus,
    SuppressionPlus,
}

impl Privilege {
    pub const ALL: [Privilege; 7] = [
        Privilege::Creation,
        Privilege::Modification,
        Privilege::Reference,
        Privilege::Suppression,
        Privilege::ModificationPlus,
        Privilege::ReferencePlus,
        Privilege::SuppressionPlus,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            Privilege::Creation => "creation",
            Privilege::Modification => "modification",
            Privilege::Reference => "reference",
            Privilege::Suppression => "suppression",
            Privilege::ModificationPlus => "modification+",
            Privilege::ReferencePlus => "reference+",
            Privilege::SuppressionPlus => "suppression+",
        }
    }

    pub fn is_plus(self) -> bool {
        matches!(
            self,
            Privilege::ModificationPlus | Privilege::ReferencePlus | Privilege::SuppressionPlus
        )
    }

    fn bit(self) -> u8 {
        1 << (self as u8)
    }
}

impl fmt::Display for Privilege {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

impl FromStr for Privilege {
    type Err = UnknownKeyword;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Privilege::ALL
            .into_iter()
            .find(|p| p.keyword() == s)
            .ok_or_else(|| UnknownKeyword {
                kind: "privilege",
                word: s.to_owned(),
            })
    }
}

/// Duplicate-free, unordered set of [`Privilege`]s.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PrivilegeSet(u8);

impl PrivilegeSet {
    pub const EMPTY: PrivilegeSet = PrivilegeSet(0);

    pub fn all() -> Self {
        Privilege::ALL.into_iter().collect()
    }

    pub fn contains(self, p: Privilege) -> bool {
        self.0 & p.bit() != 0
    }

    pub fn insert(&mut self, p: Privilege) -> bool {
        let fresh = !self.contains(p);
        self.0 |= p.bit();
        fresh
    }

    pub fn remove(&mut self, p: Privilege) -> bool {
        let present = self.contains(p);
        self.0 &= !p.bit();
        present
    }

    pub fn with(mut self, p: Privilege) -> Self {
        self.insert(p);
        self
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn intersects(self, other: PrivilegeSet) -> bool {
        self.0 & other.0 != 0
    }

    pub fn has_plus(self) -> bool {
        self.iter().any(Privilege::is_plus)
    }

    /// Members in canonical order.
    pub fn iter(self) -> impl Iterator<Item = Privilege> {
        Privilege::ALL.into_iter().filter(move |p| self.contains(*p))
    }
}

impl FromIterator<Privilege> for PrivilegeSet {
    fn from_iter<I: IntoIterator<Item = Privilege>>(iter: I) -> Self {
        let mut set = PrivilegeSet::EMPTY;
        for p in iter {
            set.insert(p);
        }
        set
    }
}

impl<const N: usize> From<[Privilege; N]> for PrivilegeSet {
    fn from(ps: [Privilege; N]) -> Self {
        ps.into_iter().collect()
    }
}

impl fmt::Debug for PrivilegeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for PrivilegeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(p.keyword())?;
        }
        Ok(())
    }
}

/// Annotation on a class marking a significant point in service production.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StatusPoint {
    /// A partner is waiting for this information.
    Waiting,
    /// The service can stall here and needs a fallback.
    Fail,
    /// A choice between alternative next processes.
    Decision,
}

impl StatusPoint {
    pub const ALL: [StatusPoint; 3] = [StatusPoint::Waiting, StatusPoint::Fail, StatusPoint::Decision];

    pub fn keyword(self) -> &'static str {
        match self {
            StatusPoint::Waiting => "waiting",
            StatusPoint::Fail => "fail",
            StatusPoint::Decision => "decision",
        }
    }

    /// One-letter diagram annotation.
    pub fn letter(self) -> char {
        match self {
            StatusPoint::Waiting => 'W',
            StatusPoint::Fail => 'F',
            StatusPoint::Decision => 'D',
        }
    }

    fn bit(self) -> u8 {
        1 << (self as u8)
    }
}

impl fmt::Display for StatusPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

impl FromStr for StatusPoint {
    type Err = UnknownKeyword;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StatusPoint::ALL
            .into_iter()
            .find(|p| p.keyword() == s)
            .ok_or_else(|| UnknownKeyword {
                kind: "status point",
                word: s.to_owned(),
            })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct StatusPoints(u8);

impl StatusPoints {
    pub const NONE: StatusPoints = StatusPoints(0);

    pub fn contains(self, p: StatusPoint) -> bool {
        self.0 & p.bit() != 0
    }

    pub fn insert(&mut self, p: StatusPoint) -> bool {
        let fresh = !self.contains(p);
        self.0 |= p.bit();
        fresh
    }

    pub fn remove(&mut self, p: StatusPoint) -> bool {
        let present = self.contains(p);
        self.0 &= !p.bit();
        present
    }

    pub fn with(mut self, p: StatusPoint) -> Self {
        self.insert(p);
        self
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = StatusPoint> {
        StatusPoint::ALL.into_iter().filter(move |p| self.contains(*p))
    }
}

impl FromIterator<StatusPoint> for StatusPoints {
    fn from_iter<I: IntoIterator<Item = StatusPoint>>(iter: I) -> Self {
        let mut set = StatusPoints::NONE;
        for p in iter {
            set.insert(p);
        }
        set
    }
}

impl<const N: usize> From<[StatusPoint; N]> for StatusPoints {
    fn from(ps: [StatusPoint; N]) -> Self {
        ps.into_iter().collect()
    }
}

impl fmt::Debug for StatusPoints {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A role's standing on a process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProcessPrivilege {
    Owner,
    /// Executes the process on behalf of its owner(s).
    Responsibility,
}

impl fmt::Display for ProcessPrivilege {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProcessPrivilege::Owner => "owner",
            ProcessPrivilege::Responsibility => "responsible",
        })
    }
}

/// What happens to the source state when a process transforms it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TransformMode {
    /// The object stays in the source state and also enters the target.
    Remaining,
    /// The object moves out of the source state into the target.
    Leaving,
}

impl TransformMode {
    pub fn keyword(self) -> &'static str {
        match self {
            TransformMode::Remaining => "remaining",
            TransformMode::Leaving => "leaving",
        }
    }
}

impl fmt::Display for TransformMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

impl FromStr for TransformMode {
    type Err = UnknownKeyword;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "remaining" => Ok(TransformMode::Remaining),
            "leaving" => Ok(TransformMode::Leaving),
            _ => Err(UnknownKeyword {
                kind: "transform mode",
                word: s.to_owned(),
            }),
        }
    }
}

macro_rules! keyword_serde {
    ($($ty:ty),*) => {$(
        impl Serialize for $ty {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(self.keyword())
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let word = String::deserialize(d)?;
                word.parse().map_err(serde::de::Error::custom)
            }
        }
    )*};
}

keyword_serde!(Privilege, StatusPoint, TransformMode);

impl Serialize for PrivilegeSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl Serialize for StatusPoints {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}
