use std::collections::BTreeMap;

use crate::ast::{AttrPath, Decimal, TimeOfDay, Value};

/// One access request. Attribute maps are keyed by dotted paths relative
/// to their root, so `subject.license.class` is `subject["license.class"]`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AccessRequest {
    pub subject: BTreeMap<String, Value>,
    pub object: BTreeMap<String, Value>,
    pub action: String,
    pub environment: BTreeMap<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RequestError {
    #[error("request action must be nonempty")]
    EmptyAction,
    #[error("invalid attribute key `{0}`")]
    BadKey(String),
    #[error("unsupported value for `{key}`: {message}")]
    BadValue { key: String, message: String },
    #[error("malformed request: {0}")]
    Json(String),
}

fn checked_key(key: &str) -> Result<String, RequestError> {
    AttrPath::parse(key)
        .map(|p| p.to_string())
        .map_err(|_| RequestError::BadKey(key.to_string()))
}

impl AccessRequest {
    pub fn new(action: impl Into<String>) -> Result<Self, RequestError> {
        let action = action.into();
        if action.is_empty() {
            return Err(RequestError::EmptyAction);
        }
        Ok(AccessRequest {
            action,
            ..Default::default()
        })
    }

    /// Builder helpers; panic on an invalid key.
    pub fn subject(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.subject.insert(checked_key(key).unwrap(), value.into());
        self
    }

    pub fn object(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.object.insert(checked_key(key).unwrap(), value.into());
        self
    }

    pub fn env(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.environment.insert(checked_key(key).unwrap(), value.into());
        self
    }

    /// Parses `{"subject": {..}, "object": {..}, "action": "..",
    /// "environment": {..}}`. Nested objects flatten into dotted keys;
    /// four-digit strings such as `"0930"` become times of day.
    pub fn from_json(text: &str) -> Result<Self, RequestError> {
        #[derive(serde::Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            #[serde(default)]
            subject: serde_json::Map<String, serde_json::Value>,
            #[serde(default)]
            object: serde_json::Map<String, serde_json::Value>,
            action: String,
            #[serde(default)]
            environment: serde_json::Map<String, serde_json::Value>,
        }
        let raw: Raw = serde_json::from_str(text).map_err(|e| RequestError::Json(e.to_string()))?;
        let mut req = AccessRequest::new(raw.action)?;
        flatten("", &raw.subject, &mut req.subject)?;
        flatten("", &raw.object, &mut req.object)?;
        flatten("", &raw.environment, &mut req.environment)?;
        Ok(req)
    }
}

fn flatten(
    prefix: &str,
    map: &serde_json::Map<String, serde_json::Value>,
    out: &mut BTreeMap<String, Value>,
) -> Result<(), RequestError> {
    for (k, v) in map {
        let key = if prefix.is_empty() {
            k.clone()
        } else {
            format!("{prefix}.{k}")
        };
        let key = checked_key(&key)?;
        if let serde_json::Value::Object(inner) = v {
            flatten(&key, inner, out)?;
        } else {
            out.insert(key.clone(), json_value(&key, v)?);
        }
    }
    Ok(())
}

fn json_value(key: &str, v: &serde_json::Value) -> Result<Value, RequestError> {
    let bad = |message: &str| RequestError::BadValue {
        key: key.to_string(),
        message: message.to_string(),
    };
    Ok(match v {
        serde_json::Value::Bool(b) => Value::Bool(*b),
        serde_json::Value::String(s) => match TimeOfDay::parse_hhmm(s) {
            Some(t) if s.len() == 4 => Value::Time(t),
            _ => Value::Str(s.clone()),
        },
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Value::Int(i)
            } else {
                let f = n.as_f64().ok_or_else(|| bad("number out of range"))?;
                Value::Decimal(Decimal::new(f).ok_or_else(|| bad("non-finite decimal"))?)
            }
        }
        serde_json::Value::Null => return Err(bad("null is not a value")),
        serde_json::Value::Array(_) => return Err(bad("arrays are not supported")),
        serde_json::Value::Object(_) => unreachable!("objects are flattened"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_nested_maps_and_times() {
        let req = AccessRequest::from_json(
            r#"{"subject": {"id": "alice", "license": {"class": "B"}},
                "object": {"id": "vehicle"},
                "action": "driveVehicle",
                "environment": {"localTime": "0930", "speed": 42, "ratio": 0.5, "night": false}}"#,
        )
        .unwrap();
        assert_eq!(req.subject["license.class"], Value::Str("B".into()));
        assert_eq!(req.environment["localTime"], Value::Time(TimeOfDay::from_hm(9, 30).unwrap()));
        assert_eq!(req.environment["speed"], Value::Int(42));
        assert_eq!(req.environment["night"], Value::Bool(false));
        assert!(matches!(req.environment["ratio"], Value::Decimal(_)));
    }

    #[test]
    fn rejects_bad_requests() {
        assert_eq!(AccessRequest::from_json(r#"{"action": ""}"#), Err(RequestError::EmptyAction));
        assert!(matches!(
            AccessRequest::from_json(r#"{"action": "a", "subject": {"bad key": 1}}"#),
            Err(RequestError::BadKey(_))
        ));
        assert!(matches!(
            AccessRequest::from_json(r#"{"action": "a", "environment": {"x": null}}"#),
            Err(RequestError::BadValue { .. })
        ));
        assert!(matches!(
            AccessRequest::from_json(r#"{"action": "a", "extra": 1}"#),
            Err(RequestError::Json(_))
        ));
        assert!(AccessRequest::from_json("{}").is_err());
    }

    #[test]
    fn non_time_strings_stay_strings() {
        let req = AccessRequest::from_json(r#"{"action": "a", "environment": {"a": "2500", "b": "930"}}"#).unwrap();
        assert_eq!(req.environment["a"], Value::Str("2500".into()));
        assert_eq!(req.environment["b"], Value::Str("930".into()));
    }
}
