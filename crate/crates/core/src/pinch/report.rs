use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::scalar::Scalar;
use crate::sums::ParameterTuple;

/// Which identity a report decomposes.
///
/// The derived order is the row order of grid reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Identity {
    Theorem0,
    Lemma1,
    Lemma2,
    Remark4,
    Theorem1,
    Theorem2,
    Corollary1,
    Corollary2,
    Theorem3a,
    Theorem3b,
}

impl Identity {
    pub const ALL: [Identity; 10] = [
        Identity::Theorem0,
        Identity::Lemma1,
        Identity::Lemma2,
        Identity::Remark4,
        Identity::Theorem1,
        Identity::Theorem2,
        Identity::Corollary1,
        Identity::Corollary2,
        Identity::Theorem3a,
        Identity::Theorem3b,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Identity::Theorem0 => "theorem0",
            Identity::Lemma1 => "lemma1",
            Identity::Lemma2 => "lemma2",
            Identity::Remark4 => "remark4",
            Identity::Theorem1 => "theorem1",
            Identity::Theorem2 => "theorem2",
            Identity::Corollary1 => "corollary1",
            Identity::Corollary2 => "corollary2",
            Identity::Theorem3a => "theorem3a",
            Identity::Theorem3b => "theorem3b",
        }
    }

    /// Long-correlation identities are indexed by `N` and normalized by
    /// their own error envelope instead of `x^ε h²`.
    pub fn is_long(self) -> bool {
        matches!(self, Identity::Theorem3a | Identity::Theorem3b)
    }

    /// Whether the identity involves a sieve range `Q`.
    pub fn uses_range(self) -> bool {
        !matches!(self, Identity::Lemma1 | Identity::Corollary1 | Identity::Corollary2)
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Identity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Identity::ALL
            .into_iter()
            .find(|i| i.tag() == s)
            .ok_or_else(|| Error::Parse(format!("unknown identity {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub name: String,
    pub value: Scalar,
}

/// `lhs = main + remainder` for one identity at one tuple, with the main
/// term split into named pieces that add up to it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub identity: Identity,
    pub tuple: ParameterTuple,
    pub lhs: Scalar,
    pub main: Scalar,
    pub remainder: Scalar,
    pub breakdown: Vec<Term>,
    /// Set when a hypothesis was waived for a constant `g`.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub degenerate: bool,
    /// Error envelope of the long-correlation identities.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub envelope: Option<f64>,
}

impl DecompositionReport {
    /// Main term is the sum of `breakdown`; the remainder is `lhs − main`.
    pub(crate) fn from_terms(
        identity: Identity,
        tuple: ParameterTuple,
        lhs: Scalar,
        breakdown: Vec<(&str, Scalar)>,
    ) -> Self {
        let main: Scalar = breakdown.iter().map(|(_, v)| v).sum();
        Self::with_main(identity, tuple, lhs, main, breakdown)
    }

    /// For identities whose main term is evaluated independently of its
    /// breakdown; the two must still agree.
    pub(crate) fn with_main(
        identity: Identity,
        tuple: ParameterTuple,
        lhs: Scalar,
        main: Scalar,
        breakdown: Vec<(&str, Scalar)>,
    ) -> Self {
        let breakdown: Vec<Term> = breakdown
            .into_iter()
            .map(|(name, value)| Term { name: name.to_string(), value })
            .collect();
        let remainder = &lhs - &main;
        let report = Self {
            identity,
            tuple,
            lhs,
            main,
            remainder,
            breakdown,
            degenerate: false,
            envelope: None,
        };
        assert!(report.breakdown_consistent(), "{identity}: breakdown does not sum to main");
        report
    }

    pub fn term(&self, name: &str) -> Option<&Scalar> {
        self.breakdown.iter().find(|t| t.name == name).map(|t| &t.value)
    }

    pub fn is_exact(&self) -> bool {
        self.lhs == &self.main + &self.remainder
    }

    pub fn breakdown_consistent(&self) -> bool {
        self.breakdown.iter().map(|t| &t.value).sum::<Scalar>() == self.main
    }

    /// `|main| / |remainder|`; infinite for an exact main term.
    pub fn main_to_remainder(&self) -> f64 {
        let r = self.remainder.abs_f64();
        if r == 0.0 {
            f64::INFINITY
        } else {
            self.main.abs_f64() / r
        }
    }
}
