//! Layering of settings: built-in defaults, then the `--config` file, then
//! flags given on the command line.

use std::path::Path;

use clap::parser::ValueSource;
use clap::ArgMatches;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, CliResult};

/// Overrides fields of `parsed` with values from a TOML file, except for
/// fields that were set explicitly on the command line. Keys may be written
/// with dashes or underscores; keys that name no setting are rejected.
pub fn merge_config<T>(parsed: T, matches: &ArgMatches, config: Option<&Path>) -> CliResult<T>
where
    T: Serialize + DeserializeOwned,
{
    let Some(path) = config else {
        return Ok(parsed);
    };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::data(path, e))?;
    let table: toml::Table = text.parse().map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    let mut value = serde_json::to_value(&parsed).expect("argument structs serialize");
    let fields = value.as_object_mut().expect("argument structs are objects");
    for (key, v) in table {
        let field = key.replace('-', "_");
        if !fields.contains_key(&field) {
            return Err(CliError::usage(format!("{}: unknown setting {key:?}", path.display())));
        }
        if matches!(matches.value_source(&field), Some(ValueSource::CommandLine)) {
            continue;
        }
        let v: Value = serde_json::to_value(v).map_err(|e| CliError::usage(format!("{}: {key}: {e}", path.display())))?;
        fields.insert(field, v);
    }
    serde_json::from_value(value).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

/// Writes `{"command": .., "settings": ..}` next to an output file.
pub fn write_resolved<T: Serialize>(out: &Path, command: &str, settings: &T) -> CliResult<()> {
    let mut name = out.as_os_str().to_owned();
    name.push(".config.json");
    let path = std::path::PathBuf::from(name);
    let doc = serde_json::json!({ "command": command, "settings": settings });
    let text = serde_json::to_string_pretty(&doc).expect("settings serialize");
    std::fs::write(&path, text + "\n").map_err(|e| CliError::data(&path, e))
}
