use alloc::string::String;
use alloc::vec::Vec;
use core::str::FromStr;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MediumKind {
    Tv,
    Radio,
    Print,
    DigitalNative,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown medium kind: {0}")]
pub struct ParseKindError(pub String);

impl FromStr for MediumKind {
    type Err = ParseKindError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s
            .trim()
            .to_ascii_lowercase()
            .replace(['-', ' '], "_")
            .as_str()
        {
            "tv" | "television" => Ok(MediumKind::Tv),
            "radio" => Ok(MediumKind::Radio),
            "print" | "press" | "newspaper" => Ok(MediumKind::Print),
            "digital_native" | "digital" | "online" => Ok(MediumKind::DigitalNative),
            _ => Err(ParseKindError(String::from(s))),
        }
    }
}

/// Potential-audience band. Ordered `Low < Medium < High`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AudienceClass {
    Low,
    Medium,
    High,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AudienceThresholds {
    pub high_above: u64,
    pub medium_above: u64,
    /// Count a follower total equal to a bound as above it.
    pub inclusive: bool,
}

impl Default for AudienceThresholds {
    fn default() -> Self {
        AudienceThresholds {
            high_above: 2_000_000,
            medium_above: 500_000,
            inclusive: false,
        }
    }
}

impl AudienceThresholds {
    pub fn classify(&self, followers: u64) -> AudienceClass {
        let above = |bound: u64| {
            if self.inclusive {
                followers >= bound
            } else {
                followers > bound
            }
        };
        if above(self.high_above) {
            AudienceClass::High
        } else if above(self.medium_above) {
            AudienceClass::Medium
        } else {
            AudienceClass::Low
        }
    }
}

/// High above 2,000,000 followers, medium above 500,000, low otherwise.
pub fn audience_class(followers: u64) -> AudienceClass {
    AudienceThresholds::default().classify(followers)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MediumProfile {
    pub handle: String,
    pub display_name: String,
    pub follower_count: u64,
    pub medium_kind: MediumKind,
    pub audience_class: AudienceClass,
}

impl MediumProfile {
    pub fn new(
        handle: &str,
        display_name: &str,
        follower_count: u64,
        medium_kind: MediumKind,
        thresholds: &AudienceThresholds,
    ) -> Self {
        MediumProfile {
            handle: String::from(handle),
            display_name: String::from(display_name),
            follower_count,
            medium_kind,
            audience_class: thresholds.classify(follower_count),
        }
    }
}

/// Share of all emissions produced by the `k` most prolific media. Ties at
/// equal counts are ordered by handle. Absent when every count is zero.
pub fn top_k_share(counts: &[(String, u64)], k: usize) -> Option<f64> {
    let total: u64 = counts.iter().map(|(_, c)| c).sum();
    if total == 0 {
        return None;
    }
    let mut sorted: Vec<&(String, u64)> = counts.iter().collect();
    sorted.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let top: u64 = sorted.iter().take(k).map(|(_, c)| c).sum();
    Some(top as f64 / total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn classes() {
        assert_eq!(audience_class(2_500_000), AudienceClass::High);
        assert_eq!(audience_class(2_000_000), AudienceClass::Medium);
        assert_eq!(audience_class(500_001), AudienceClass::Medium);
        assert_eq!(audience_class(500_000), AudienceClass::Low);
        assert_eq!(audience_class(0), AudienceClass::Low);
        let inclusive = AudienceThresholds {
            inclusive: true,
            ..Default::default()
        };
        assert_eq!(inclusive.classify(500_000), AudienceClass::Medium);
    }

    #[test]
    fn concentration() {
        let c = |xs: &[u64]| {
            xs.iter()
                .enumerate()
                .map(|(i, n)| (i.to_string(), *n))
                .collect::<Vec<_>>()
        };
        assert_eq!(top_k_share(&c(&[5, 3, 2]), 1), Some(0.5));
        assert_eq!(top_k_share(&c(&[5, 3, 2]), 7), Some(1.0));
        assert_eq!(top_k_share(&c(&[0, 0]), 1), None);
        assert_eq!(top_k_share(&[], 1), None);
        assert_eq!(
            top_k_share(&[("b".to_string(), 1), ("a".to_string(), 1)], 1),
            Some(0.5)
        );
    }

    #[test]
    fn kinds_parse() {
        assert_eq!("TV".parse::<MediumKind>().unwrap(), MediumKind::Tv);
        assert_eq!(
            "digital-native".parse::<MediumKind>().unwrap(),
            MediumKind::DigitalNative
        );
        assert!("blog".parse::<MediumKind>().is_err());
    }
}
