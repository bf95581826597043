use core::fmt;
use core::str::FromStr;
use serde::{Deserialize, Serialize};

use crate::text::accent_fold;

/// The ten news topics. Declaration order is the tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TopicLabel {
    #[serde(rename = "accidentes")]
    Accidentes,
    #[serde(rename = "deportes")]
    Deportes,
    #[serde(rename = "ecología")]
    Ecologia,
    #[serde(rename = "economía")]
    Economia,
    #[serde(rename = "entretenimiento")]
    Entretenimiento,
    #[serde(rename = "judicial")]
    Judicial,
    #[serde(rename = "política")]
    Politica,
    #[serde(rename = "salud")]
    Salud,
    #[serde(rename = "sociedad")]
    Sociedad,
    #[serde(rename = "tecnología")]
    Tecnologia,
}

impl TopicLabel {
    pub const COUNT: usize = 10;

    pub const ALL: [TopicLabel; 10] = [
        TopicLabel::Accidentes,
        TopicLabel::Deportes,
        TopicLabel::Ecologia,
        TopicLabel::Economia,
        TopicLabel::Entretenimiento,
        TopicLabel::Judicial,
        TopicLabel::Politica,
        TopicLabel::Salud,
        TopicLabel::Sociedad,
        TopicLabel::Tecnologia,
    ];

    pub fn ordinal(self) -> usize {
        self as usize
    }

    pub fn from_ordinal(i: usize) -> Option<TopicLabel> {
        Self::ALL.get(i).copied()
    }

    /// Lowercase wire name, with accents.
    pub fn as_str(self) -> &'static str {
        match self {
            TopicLabel::Accidentes => "accidentes",
            TopicLabel::Deportes => "deportes",
            TopicLabel::Ecologia => "ecología",
            TopicLabel::Economia => "economía",
            TopicLabel::Entretenimiento => "entretenimiento",
            TopicLabel::Judicial => "judicial",
            TopicLabel::Politica => "política",
            TopicLabel::Salud => "salud",
            TopicLabel::Sociedad => "sociedad",
            TopicLabel::Tecnologia => "tecnología",
        }
    }

    /// Capitalized name used in report tables.
    pub fn display_name(self) -> &'static str {
        match self {
            TopicLabel::Accidentes => "Accidentes",
            TopicLabel::Deportes => "Deportes",
            TopicLabel::Ecologia => "Ecología",
            TopicLabel::Economia => "Economía",
            TopicLabel::Entretenimiento => "Entretenimiento",
            TopicLabel::Judicial => "Judicial",
            TopicLabel::Politica => "Política",
            TopicLabel::Salud => "Salud",
            TopicLabel::Sociedad => "Sociedad",
            TopicLabel::Tecnologia => "Tecnología",
        }
    }
}

impl fmt::Display for TopicLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown topic label: {0}")]
pub struct ParseTopicError(pub alloc::string::String);

impl FromStr for TopicLabel {
    type Err = ParseTopicError;

    /// Case- and accent-insensitive.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = accent_fold(s.trim());
        TopicLabel::ALL
            .into_iter()
            .find(|l| accent_fold(l.as_str()) == key)
            .ok_or_else(|| ParseTopicError(alloc::string::String::from(s)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_order() {
        assert_eq!(
            "Política".parse::<TopicLabel>().unwrap(),
            TopicLabel::Politica
        );
        assert_eq!(
            "tecnologia".parse::<TopicLabel>().unwrap(),
            TopicLabel::Tecnologia
        );
        assert!("farándula".parse::<TopicLabel>().is_err());
        assert!(TopicLabel::Accidentes < TopicLabel::Tecnologia);
        for (i, l) in TopicLabel::ALL.iter().enumerate() {
            assert_eq!(l.ordinal(), i);
            assert_eq!(l.as_str().parse::<TopicLabel>().unwrap(), *l);
        }
    }
}
