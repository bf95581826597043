use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use chrono::{DateTime, Datelike, Days, Months, NaiveDate, Utc};
use chrono_tz::Tz;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Granularity {
    Day,
    Month,
}

impl Granularity {
    fn bucket_of(self, date: NaiveDate) -> NaiveDate {
        match self {
            Granularity::Day => date,
            Granularity::Month => date.with_day(1).unwrap_or(date),
        }
    }

    fn next(self, date: NaiveDate) -> NaiveDate {
        match self {
            Granularity::Day => date + Days::new(1),
            Granularity::Month => date + Months::new(1),
        }
    }
}

impl core::str::FromStr for Granularity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "day" => Ok(Granularity::Day),
            "month" => Ok(Granularity::Month),
            other => Err(format!(
                "unknown granularity {other:?}; expected day or month"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VolumeBucket {
    /// First local day of the bucket.
    pub start: NaiveDate,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeSeries {
    pub granularity: Granularity,
    pub timezone: String,
    /// Contiguous and zero-filled between the first and last non-empty bucket.
    pub buckets: Vec<VolumeBucket>,
}

impl VolumeSeries {
    pub fn total(&self) -> u64 {
        self.buckets.iter().map(|b| b.count).sum()
    }

    pub fn mean(&self) -> Option<f64> {
        if self.buckets.is_empty() {
            None
        } else {
            Some(self.total() as f64 / self.buckets.len() as f64)
        }
    }
}

/// Counts timestamps per local day or month in `tz`.
pub fn volume_series(
    timestamps: impl IntoIterator<Item = DateTime<Utc>>,
    granularity: Granularity,
    tz: Tz,
) -> VolumeSeries {
    let mut counts: BTreeMap<NaiveDate, u64> = BTreeMap::new();
    for ts in timestamps {
        let local = ts.with_timezone(&tz).date_naive();
        *counts.entry(granularity.bucket_of(local)).or_default() += 1;
    }
    let mut buckets = Vec::new();
    if let (Some((&first, _)), Some((&last, _))) =
        (counts.first_key_value(), counts.last_key_value())
    {
        let mut day = first;
        while day <= last {
            buckets.push(VolumeBucket {
                start: day,
                count: counts.get(&day).copied().unwrap_or(0),
            });
            day = granularity.next(day);
        }
    }
    VolumeSeries {
        granularity,
        timezone: String::from(tz.name()),
        buckets,
    }
}

/// Compares externally reported figures with the series and describes
/// every mismatch (mean compared at one decimal).
pub fn check_reported_totals(
    series: &VolumeSeries,
    reported_total: Option<u64>,
    reported_mean: Option<f64>,
) -> Vec<String> {
    let mut issues = Vec::new();
    let total = series.total();
    if let Some(reported) = reported_total {
        if reported != total {
            issues.push(format!(
                "reported total {reported} differs from the bucket sum {total} (difference {})",
                reported as i64 - total as i64
            ));
        }
    }
    if let (Some(reported), Some(mean)) = (reported_mean, series.mean()) {
        if libm::round(reported * 10.0) != libm::round(mean * 10.0) {
            issues.push(format!(
                "reported mean {reported} differs from the recomputed mean {mean:.2}"
            ));
        }
    }
    issues
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use chrono::TimeZone;

    #[test]
    fn empty() {
        let s = volume_series(vec![], Granularity::Day, chrono_tz::America::Santiago);
        assert!(s.buckets.is_empty());
        assert_eq!(s.mean(), None);
    }

    #[test]
    fn local_day_not_utc_day() {
        // 23:30 in Santiago (UTC-3 in October 2015) is 02:30 UTC next day.
        let ts = Utc.with_ymd_and_hms(2015, 10, 16, 2, 30, 0).unwrap();
        let s = volume_series(vec![ts], Granularity::Day, chrono_tz::America::Santiago);
        assert_eq!(
            s.buckets[0].start,
            NaiveDate::from_ymd_opt(2015, 10, 15).unwrap()
        );
    }

    #[test]
    fn zero_filled() {
        let a = Utc.with_ymd_and_hms(2015, 6, 10, 15, 0, 0).unwrap();
        let b = Utc.with_ymd_and_hms(2015, 9, 10, 15, 0, 0).unwrap();
        let s = volume_series(
            vec![a, b, b],
            Granularity::Month,
            chrono_tz::America::Santiago,
        );
        let counts: Vec<u64> = s.buckets.iter().map(|b| b.count).collect();
        assert_eq!(counts, [1, 0, 0, 2]);
        assert_eq!(s.timezone, "America/Santiago");
    }

    #[test]
    fn discrepancies_reported() {
        let ts = Utc.with_ymd_and_hms(2015, 6, 10, 15, 0, 0).unwrap();
        let s = volume_series(
            vec![ts; 4],
            Granularity::Month,
            chrono_tz::America::Santiago,
        );
        assert!(check_reported_totals(&s, Some(4), Some(4.0)).is_empty());
        assert_eq!(check_reported_totals(&s, Some(5), Some(3.9)).len(), 2);
    }
}
