//! Canonical feature names. Families appear in a fixed order and names are
//! sorted byte-wise within each family.

use std::sync::LazyLock;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    FirstOrder,
    Glcm,
    Gldm,
    Glrlm,
    Glszm,
    Ngtdm,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::FirstOrder,
        Family::Glcm,
        Family::Gldm,
        Family::Glrlm,
        Family::Glszm,
        Family::Ngtdm,
    ];

    pub fn prefix(self) -> &'static str {
        match self {
            Family::FirstOrder => "FO",
            Family::Glcm => "GLCM",
            Family::Gldm => "GLDM",
            Family::Glrlm => "GLRLM",
            Family::Glszm => "GLSZM",
            Family::Ngtdm => "NGTDM",
        }
    }

    pub fn names(self) -> &'static [&'static str] {
        match self {
            Family::FirstOrder => &FIRST_ORDER,
            Family::Glcm => &GLCM,
            Family::Gldm => &GLDM,
            Family::Glrlm => &GLRLM,
            Family::Glszm => &GLSZM,
            Family::Ngtdm => &NGTDM,
        }
    }
}

pub const FIRST_ORDER: [&str; 18] = [
    "10Percentile",
    "90Percentile",
    "Energy",
    "Entropy",
    "InterquartileRange",
    "Kurtosis",
    "Maximum",
    "Mean",
    "MeanAbsoluteDeviation",
    "Median",
    "Minimum",
    "Range",
    "RobustMeanAbsoluteDeviation",
    "RootMeanSquared",
    "Skewness",
    "TotalEnergy",
    "Uniformity",
    "Variance",
];

pub const GLCM: [&str; 24] = [
    "Autocorrelation",
    "ClusterProminence",
    "ClusterShade",
    "ClusterTendency",
    "Contrast",
    "Correlation",
    "DifferenceAverage",
    "DifferenceEntropy",
    "DifferenceVariance",
    "Id",
    "Idm",
    "Idmn",
    "Idn",
    "Imc1",
    "Imc2",
    "InverseVariance",
    "JointAverage",
    "JointEnergy",
    "JointEntropy",
    "MCC",
    "MaximumProbability",
    "SumAverage",
    "SumEntropy",
    "SumSquares",
];

pub const GLDM: [&str; 14] = [
    "DependenceEntropy",
    "DependenceNonUniformity",
    "DependenceNonUniformityNormalized",
    "DependenceVariance",
    "GrayLevelNonUniformity",
    "GrayLevelVariance",
    "HighGrayLevelEmphasis",
    "LargeDependenceEmphasis",
    "LargeDependenceHighGrayLevelEmphasis",
    "LargeDependenceLowGrayLevelEmphasis",
    "LowGrayLevelEmphasis",
    "SmallDependenceEmphasis",
    "SmallDependenceHighGrayLevelEmphasis",
    "SmallDependenceLowGrayLevelEmphasis",
];

pub const GLRLM: [&str; 16] = [
    "GrayLevelNonUniformity",
    "GrayLevelNonUniformityNormalized",
    "GrayLevelVariance",
    "HighGrayLevelRunEmphasis",
    "LongRunEmphasis",
    "LongRunHighGrayLevelEmphasis",
    "LongRunLowGrayLevelEmphasis",
    "LowGrayLevelRunEmphasis",
    "RunEntropy",
    "RunLengthNonUniformity",
    "RunLengthNonUniformityNormalized",
    "RunPercentage",
    "RunVariance",
    "ShortRunEmphasis",
    "ShortRunHighGrayLevelEmphasis",
    "ShortRunLowGrayLevelEmphasis",
];

pub const GLSZM: [&str; 16] = [
    "GrayLevelNonUniformity",
    "GrayLevelNonUniformityNormalized",
    "GrayLevelVariance",
    "HighGrayLevelZoneEmphasis",
    "LargeAreaEmphasis",
    "LargeAreaHighGrayLevelEmphasis",
    "LargeAreaLowGrayLevelEmphasis",
    "LowGrayLevelZoneEmphasis",
    "SizeZoneNonUniformity",
    "SizeZoneNonUniformityNormalized",
    "SmallAreaEmphasis",
    "SmallAreaHighGrayLevelEmphasis",
    "SmallAreaLowGrayLevelEmphasis",
    "ZoneEntropy",
    "ZonePercentage",
    "ZoneVariance",
];

pub const NGTDM: [&str; 5] = ["Busyness", "Coarseness", "Complexity", "Contrast", "Strength"];

pub const FEATURE_COUNT: usize = 93;

static CANONICAL: LazyLock<Vec<String>> = LazyLock::new(|| {
    Family::ALL
        .iter()
        .flat_map(|f| f.names().iter().map(move |n| format!("{}_{n}", f.prefix())))
        .collect()
});

/// All 93 `<FAMILY>_<FeatureName>` identifiers in canonical order.
pub fn canonical_names() -> &'static [String] {
    &CANONICAL
}

/// Index into `canonical_names` for a family-local name.
pub fn index_of(family: Family, name: &str) -> Option<usize> {
    let mut offset = 0;
    for f in Family::ALL {
        if f == family {
            return f.names().iter().position(|n| *n == name).map(|i| offset + i);
        }
        offset += f.names().len();
    }
    None
}
