//! Report writers. Every float is printed with 17 significant digits so
//! that reports round-trip exactly and are byte-stable.

use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use super::config::{RunConfig, SCHEMA_VERSION};
use crate::error::Result;

pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

struct SeventeenDigits<'a>(PrettyFormatter<'a>);

impl Formatter for SeventeenDigits<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SeventeenDigits(PrettyFormatter::new()));
    value
        .serialize(&mut ser)
        .map_err(|e| crate::error::Error::Config(format!("serialization failed: {e}")))?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("JSON output is UTF-8"))
}

/// Report envelope shared by the JSON outputs.
#[derive(Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub schema_version: u32,
    pub command: &'a str,
    pub config: &'a RunConfig,
    #[serde(flatten)]
    pub body: T,
}

pub fn envelope<'a, T: Serialize>(command: &'a str, config: &'a RunConfig, body: T) -> Envelope<'a, T> {
    Envelope {
        schema_version: SCHEMA_VERSION,
        command,
        config,
        body,
    }
}

/// CSV text with a comment header holding the schema version and the
/// resolved config as one line of JSON.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(command: &str, config: &RunConfig, columns: &[&str]) -> Result<Self> {
        let cfg = serde_json::to_string(config).map_err(|e| crate::error::Error::Config(e.to_string()))?;
        let text = format!(
            "# schema_version = {SCHEMA_VERSION}\n# command = {command}\n# config = {cfg}\n{}\n",
            columns.join(",")
        );
        Ok(Self { text })
    }

    pub fn row(&mut self, fields: &[Field]) {
        let parts: Vec<String> = fields
            .iter()
            .map(|f| match f {
                Field::F(v) => fmt_f64(*v),
                Field::I(v) => v.to_string(),
                Field::S(s) => s.clone(),
            })
            .collect();
        self.text.push_str(&parts.join(","));
        self.text.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

pub enum Field {
    F(f64),
    I(usize),
    S(String),
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<std::path::PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, contents)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_seventeen_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(-0.25), "-2.5000000000000000e-1");
        let json = to_json(&serde_json::json!({"a": [1.5, -0.25], "b": 3})).unwrap();
        assert!(json.contains("1.5000000000000000e0"));
        let back: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(back["a"][1].as_f64(), Some(-0.25));
        assert_eq!(back["b"].as_u64(), Some(3));
    }
}
