use std::fmt;
use std::io::Read;

use serde::de::DeserializeOwned;

/// Problems with the command line or its input document; exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Reads `--input`: `-` for stdin, inline JSON when it starts with `{` or `[`,
/// otherwise a file path.
pub fn read_source(spec: &str) -> Result<String, UsageError> {
    let trimmed = spec.trim_start();
    if spec == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| UsageError(format!("cannot read stdin: {e}")))?;
        Ok(s)
    } else if trimmed.starts_with('{') || trimmed.starts_with('[') {
        Ok(spec.to_string())
    } else {
        std::fs::read_to_string(spec).map_err(|e| UsageError(format!("cannot read `{spec}`: {e}")))
    }
}

/// Parses `text`, reporting the failing field path with line and column.
pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T, UsageError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        // serde_json's message already ends with the line and column
        UsageError(format!("malformed input at `{}`: {}", e.path(), e.inner()))
    })
}

/// Parses `--input` if given, else the type's default.
pub fn load_or_default<T: DeserializeOwned + Default>(spec: Option<&str>) -> Result<T, UsageError> {
    match spec {
        Some(s) => parse(&read_source(s)?),
        None => Ok(T::default()),
    }
}

pub fn load<T: DeserializeOwned>(spec: Option<&str>, command: &str) -> Result<T, UsageError> {
    match spec {
        Some(s) => parse(&read_source(s)?),
        None => Err(UsageError(format!("`{command}` needs --input"))),
    }
}
