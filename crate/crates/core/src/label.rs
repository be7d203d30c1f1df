use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Pathology class. The declaration order is the class index order used by
/// every model and report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "MNG")]
    Mng,
    #[serde(rename = "TH")]
    Th,
    #[serde(rename = "DG")]
    Dg,
}

impl Label {
    pub const ALL: [Label; 3] = [Label::Mng, Label::Th, Label::Dg];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Label> {
        Self::ALL.get(i).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Mng => "MNG",
            Label::Th => "TH",
            Label::Dg => "DG",
        }
    }

    pub fn names() -> Vec<String> {
        Self::ALL.iter().map(|l| l.as_str().to_string()).collect()
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "MNG" => Ok(Label::Mng),
            "TH" => Ok(Label::Th),
            "DG" => Ok(Label::Dg),
            other => Err(Error::UnknownLabel(other.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        for l in Label::ALL {
            assert_eq!(l.as_str().parse::<Label>().unwrap(), l);
            assert_eq!(Label::from_index(l.index()), Some(l));
        }
        assert!("GD".parse::<Label>().is_err());
        assert_eq!(serde_json::to_string(&Label::Th).unwrap(), "\"TH\"");
    }
}
