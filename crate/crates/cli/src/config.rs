//! TOML job files layered over built-in defaults.
//!
//! A job file only lists what differs from the defaults. Tables merge key by
//! key, except tables carrying a `mode` or `kind` key: those select an enum
//! variant and replace the default table whole. Arrays are replaced.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use toml::{Table, Value};

use crate::error::{CliError, Result};

/// Keys that mark a table as a tagged variant.
const TAG_KEYS: [&str; 2] = ["mode", "kind"];

pub fn read_table(path: &Path) -> Result<Table> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_table(&text)
}

pub fn parse_table(text: &str) -> Result<Table> {
    text.parse::<Table>().map_err(|e| {
        let key = e.span().map(|s| format!("byte {}", s.start)).unwrap_or_else(|| "file".into());
        CliError::config(key, e.message().to_string())
    })
}

/// Removes and returns a string key such as `preset`.
pub fn take_string(table: &mut Table, key: &str) -> Result<Option<String>> {
    match table.remove(key) {
        None => Ok(None),
        Some(Value::String(s)) => Ok(Some(s)),
        Some(other) => Err(CliError::config(key, format!("expected a string, found {}", other.type_str()))),
    }
}

pub fn merge(base: &mut Table, overlay: Table) {
    for (key, value) in overlay {
        match (base.get_mut(&key), value) {
            (Some(Value::Table(b)), Value::Table(o)) if !TAG_KEYS.iter().any(|k| o.contains_key(*k)) => merge(b, o),
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}

/// `defaults` with `overlay` merged on top, checked against `T`.
pub fn layered<T: Serialize + DeserializeOwned>(defaults: &T, overlay: Table) -> Result<T> {
    let mut base = match Value::try_from(defaults) {
        Ok(Value::Table(t)) => t,
        Ok(_) => return Err(CliError::config("defaults", "not a table")),
        Err(e) => return Err(CliError::config("defaults", e.to_string())),
    };
    merge(&mut base, overlay);
    serde_path_to_error::deserialize(Value::Table(base)).map_err(|e| {
        let path = e.path().to_string();
        let message = e.into_inner().to_string();
        CliError::config(path, message.lines().next().unwrap_or_default().trim().to_string())
    })
}

pub fn to_toml<T: Serialize>(value: &T) -> Result<String> {
    toml::to_string(value).map_err(|e| CliError::config("resolved config", e.to_string()))
}
