//! JSON envelope shared by every subcommand.
//!
//! Floats are written with 17 significant digits in exponent form so the
//! output round-trips and is byte-stable across runs and platforms.

use std::io::{self, Write};

use serde::ser::{Serialize, SerializeMap, Serializer};
use serde_json::ser::Formatter;

pub const TOOL: &str = "helixwave";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

struct ExactFloats;

impl Formatter for ExactFloats {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

#[derive(serde::Serialize)]
struct Envelope<'a, C, R> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: &'a C,
    result: &'a R,
}

/// Serializes `{tool, version, command, config, result}` followed by a newline.
pub fn to_bytes<C: Serialize, R: Serialize>(command: &str, config: &C, result: &R) -> serde_json::Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, ExactFloats);
    Envelope {
        tool: TOOL,
        version: VERSION,
        command,
        config,
        result,
    }
    .serialize(&mut ser)?;
    out.push(b'\n');
    Ok(out)
}

/// A list of `(key, value)` pairs serialized as a JSON object in list order.
pub struct OrderedMap<'a, V>(pub &'a [(String, V)]);

impl<V: Serialize> Serialize for OrderedMap<'_, V> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0 {
            m.serialize_entry(k, v)?;
        }
        m.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_17_significant_digits() {
        let bytes = to_bytes("x", &0.1f64, &[1.0f64, -2.5e-300, f64::NAN]).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        assert!(text.contains("\"config\":1.0000000000000001e-1"), "{text}");
        assert!(text.contains("[1.0000000000000000e0,-2.5000000000000000e-300,null]"), "{text}");
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["config"].as_f64(), Some(0.1));
    }

    #[test]
    fn ordered_map_keeps_order() {
        let pairs = vec![("b".to_string(), 1u8), ("a".to_string(), 2u8)];
        let s = serde_json::to_string(&OrderedMap(&pairs)).unwrap();
        assert_eq!(s, r#"{"b":1,"a":2}"#);
    }
}
