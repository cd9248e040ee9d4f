//! UTC timestamps at second precision, the only clock format the logs
//! use.

use chrono::{DateTime, SecondsFormat, Timelike, Utc};

/// Current time truncated to whole seconds.
pub fn now() -> DateTime<Utc> {
    Utc::now().with_nanosecond(0).expect("zero nanoseconds is valid")
}

pub fn format(dt: &DateTime<Utc>) -> String {
    dt.to_rfc3339_opts(SecondsFormat::Secs, true)
}

/// Serde adapter: RFC 3339 with seconds precision and a `Z` suffix.
pub mod ts {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(dt: &DateTime<Utc>, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&format(dt))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<DateTime<Utc>, D::Error> {
        let raw = String::deserialize(de)?;
        DateTime::parse_from_rfc3339(&raw)
            .map(|dt| dt.with_timezone(&Utc))
            .map_err(de::Error::custom)
    }
}
