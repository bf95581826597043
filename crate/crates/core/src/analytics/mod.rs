//! Editorial and audience indicators: emission volumes, audience classes,
//! topic shares, tendency flags and production concentration.
//!
//! Volume and concentration count emissions (tweets); topic and geography
//! figures count unique news items.

mod media;
mod shares;
mod volume;

pub use media::{
    audience_class, top_k_share, AudienceClass, AudienceThresholds, MediumKind, MediumProfile,
    ParseKindError,
};
pub use shares::{
    tendency_flags, topic_shares, GroupBy, TendencyFlags, TendencyThresholds, TopicShares,
    ALL_GROUP,
};
pub use volume::{check_reported_totals, volume_series, Granularity, VolumeBucket, VolumeSeries};
