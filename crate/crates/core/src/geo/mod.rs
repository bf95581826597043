//! Gazetteer lookup, toponym spotting and in-country disambiguation.

mod gazetteer;
mod matcher;

pub use gazetteer::{GazetteerEntry, GazetteerError, GazetteerIndex, GazetteerStats};
pub use matcher::{
    aggregate_geo, disambiguate, match_toponyms, GeoAggregate, GeoMention, MentionScope, PlaceRef,
    RejectTags, ToponymCandidate, DEFAULT_MAX_NGRAM,
};
