use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::classify::TopicLabel;

/// Group name used for corpus-wide shares.
pub const ALL_GROUP: &str = "ALL";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupBy {
    Medium,
    All,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicShares {
    /// Medium handle, or [`ALL_GROUP`].
    pub group: String,
    /// Every label, including zero shares.
    pub shares: BTreeMap<TopicLabel, f64>,
    pub counts: BTreeMap<TopicLabel, u64>,
    pub doc_count: u64,
}

impl TopicShares {
    fn from_counts(group: String, counts: [u64; TopicLabel::COUNT]) -> TopicShares {
        let doc_count: u64 = counts.iter().sum();
        let shares = TopicLabel::ALL
            .iter()
            .map(|l| (*l, counts[l.ordinal()] as f64 / doc_count as f64))
            .collect();
        let counts = TopicLabel::ALL
            .iter()
            .map(|l| (*l, counts[l.ordinal()]))
            .collect();
        TopicShares {
            group,
            shares,
            counts,
            doc_count,
        }
    }

    pub fn share(&self, label: TopicLabel) -> f64 {
        self.shares.get(&label).copied().unwrap_or(0.0)
    }
}

/// Topic distribution per medium (sorted by handle) or over everything.
/// Groups without documents are omitted.
pub fn topic_shares<'a>(
    docs: impl IntoIterator<Item = (&'a str, TopicLabel)>,
    group_by: GroupBy,
) -> Vec<TopicShares> {
    let mut groups: BTreeMap<&str, [u64; TopicLabel::COUNT]> = BTreeMap::new();
    for (medium, label) in docs {
        let key = match group_by {
            GroupBy::Medium => medium,
            GroupBy::All => ALL_GROUP,
        };
        groups.entry(key).or_insert([0; TopicLabel::COUNT])[label.ordinal()] += 1;
    }
    groups
        .into_iter()
        .map(|(g, counts)| TopicShares::from_counts(String::from(g), counts))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TendencyFlags {
    pub sports_entertainment: bool,
    pub economy_politics: bool,
    pub judicial: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TendencyThresholds {
    pub sports_entertainment: f64,
    pub economy_politics: f64,
    pub judicial: f64,
    /// Flag shares equal to a threshold too.
    pub inclusive: bool,
}

impl Default for TendencyThresholds {
    fn default() -> Self {
        TendencyThresholds {
            sports_entertainment: 0.50,
            economy_politics: 0.25,
            judicial: 0.10,
            inclusive: false,
        }
    }
}

/// Editorial tendencies: sports + entertainment above 50%, economy +
/// politics above 25%, judicial above 10% (strict by default).
pub fn tendency_flags(shares: &TopicShares, thresholds: &TendencyThresholds) -> TendencyFlags {
    use TopicLabel::*;
    let above = |x: f64, t: f64| if thresholds.inclusive { x >= t } else { x > t };
    TendencyFlags {
        sports_entertainment: above(
            shares.share(Deportes) + shares.share(Entretenimiento),
            thresholds.sports_entertainment,
        ),
        economy_politics: above(
            shares.share(Economia) + shares.share(Politica),
            thresholds.economy_politics,
        ),
        judicial: above(shares.share(Judicial), thresholds.judicial),
    }
}
