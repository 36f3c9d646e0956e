//! Factual semantic features: the observation format exchanged between the
//! environment and the kernel.
//!
//! One feature is a single line of the form
//!
//! ```text
//! (fire#14, fieriness, 1, inDangerNeighbours, 3, burningNeighbours, 2, localisation, 20|25, time, 7)
//! ```
//!
//! i.e. a selector (`typeName#id`) followed by qualifier/value pairs. Values
//! are integers, `x|y` coordinates or bare symbols. Every feature carries
//! exactly one `time` and one `localisation` qualifier; both are extracted
//! into dedicated fields at construction. A single space after each comma is
//! optional on input and canonical on output.
//!
//! Logs hold one feature per line, either in the textual form above or as a
//! JSON object (`{"selector":{"type":..,"id":..},"pairs":[..],"time":..,
//! "location":{"x":..,"y":..}}`). Readers accept both; writers emit the
//! textual form by default.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const TIME_QUALIFIER: &str = "time";
pub const LOCATION_QUALIFIER: &str = "localisation";

/// Kinds of perceived objects the ontology covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum SelectorType {
    Fire,
    FireBrigade,
    Building,
    Road,
}

impl SelectorType {
    pub const ALL: [SelectorType; 4] = [
        SelectorType::Fire,
        SelectorType::FireBrigade,
        SelectorType::Building,
        SelectorType::Road,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SelectorType::Fire => "fire",
            SelectorType::FireBrigade => "fireBrigade",
            SelectorType::Building => "building",
            SelectorType::Road => "road",
        }
    }

    pub(crate) fn index(self) -> usize {
        match self {
            SelectorType::Fire => 0,
            SelectorType::FireBrigade => 1,
            SelectorType::Building => 2,
            SelectorType::Road => 3,
        }
    }
}

impl fmt::Display for SelectorType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SelectorType {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        match s {
            "fire" => Ok(SelectorType::Fire),
            "fireBrigade" => Ok(SelectorType::FireBrigade),
            "building" => Ok(SelectorType::Building),
            "road" => Ok(SelectorType::Road),
            other => Err(ParseError::UnknownSelectorType(other.to_string())),
        }
    }
}

/// Typed, numbered identity of a perceived object, e.g. `fire#14`.
/// One selector keys exactly one fact stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Selector {
    #[serde(rename = "type")]
    pub selector_type: SelectorType,
    pub id: u64,
}

impl Selector {
    pub fn new(selector_type: SelectorType, id: u64) -> Self {
        Self { selector_type, id }
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.selector_type, self.id)
    }
}

/// Grid coordinate, written `x|y` in the textual form.
#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct Coord {
    pub x: i32,
    pub y: i32,
}

impl Coord {
    pub fn new(x: i32, y: i32) -> Self {
        Self { x, y }
    }

    /// Chessboard distance: max of the absolute axis differences.
    pub fn chebyshev(self, other: Coord) -> u32 {
        let dx = (self.x as i64 - other.x as i64).unsigned_abs();
        let dy = (self.y as i64 - other.y as i64).unsigned_abs();
        dx.max(dy) as u32
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.x, self.y)
    }
}

/// A qualifier's value: integer, coordinate or bare symbol.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Integer(i64),
    Coordinate(Coord),
    Symbol(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Integer(i) => write!(f, "{i}"),
            Value::Coordinate(c) => write!(f, "{c}"),
            Value::Symbol(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QualifierValue {
    pub qualifier: String,
    pub value: Value,
}

impl QualifierValue {
    pub fn new(qualifier: impl Into<String>, value: Value) -> Self {
        Self {
            qualifier: qualifier.into(),
            value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("malformed syntax: {0}")]
    MalformedSyntax(String),
    #[error("unknown selector type `{0}`")]
    UnknownSelectorType(String),
    #[error("missing required qualifier `{0}`")]
    MissingRequiredQualifier(&'static str),
    #[error("duplicate qualifier `{0}`")]
    DuplicateQualifier(String),
}

fn malformed(msg: impl Into<String>) -> ParseError {
    ParseError::MalformedSyntax(msg.into())
}

/// One factual semantic feature.
///
/// `pairs` keeps every qualifier/value pair in input order (including `time`
/// and `localisation`); the two required qualifiers are additionally exposed
/// as the `time` and `location` fields. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fsf {
    selector: Selector,
    pairs: Vec<QualifierValue>,
    time: u64,
    location: Coord,
}

impl Fsf {
    /// Build a feature from a selector and its pairs, validating that
    /// qualifier names are unique and that `time` (nonnegative integer) and
    /// `localisation` (coordinate) are both present.
    pub fn new(selector: Selector, pairs: Vec<QualifierValue>) -> Result<Self, ParseError> {
        let mut time = None;
        let mut location = None;
        for (i, pair) in pairs.iter().enumerate() {
            if pairs[..i].iter().any(|p| p.qualifier == pair.qualifier) {
                return Err(ParseError::DuplicateQualifier(pair.qualifier.clone()));
            }
            match (pair.qualifier.as_str(), &pair.value) {
                (TIME_QUALIFIER, Value::Integer(t)) if *t >= 0 => time = Some(*t as u64),
                (TIME_QUALIFIER, _) => {
                    return Err(malformed("`time` must be a nonnegative integer"))
                }
                (LOCATION_QUALIFIER, Value::Coordinate(c)) => location = Some(*c),
                (LOCATION_QUALIFIER, _) => {
                    return Err(malformed("`localisation` must be a coordinate"))
                }
                _ => {}
            }
        }
        let time = time.ok_or(ParseError::MissingRequiredQualifier(TIME_QUALIFIER))?;
        let location =
            location.ok_or(ParseError::MissingRequiredQualifier(LOCATION_QUALIFIER))?;
        Ok(Self {
            selector,
            pairs,
            time,
            location,
        })
    }

    /// Parse the one-line textual form.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let line = text.trim();
        let inner = line
            .strip_prefix('(')
            .and_then(|rest| rest.strip_suffix(')'))
            .ok_or_else(|| malformed("expected `(` ... `)`"))?;
        if inner.contains('(') || inner.contains(')') {
            return Err(malformed("unbalanced or nested parentheses"));
        }

        let mut tokens = Vec::new();
        for (i, raw) in inner.split(',').enumerate() {
            // A single space after each comma is the only whitespace allowed.
            let token = if i == 0 {
                raw
            } else {
                raw.strip_prefix(' ').unwrap_or(raw)
            };
            if token.is_empty() {
                return Err(malformed("empty token"));
            }
            if token.trim() != token {
                return Err(malformed(format!("stray whitespace around `{}`", token.trim())));
            }
            tokens.push(token);
        }

        let selector = parse_selector(tokens[0])?;
        let rest = &tokens[1..];
        if rest.is_empty() {
            return Err(malformed("at least one qualifier/value pair is required"));
        }
        if rest.len() % 2 != 0 {
            return Err(malformed("odd qualifier/value token count"));
        }

        let mut pairs = Vec::with_capacity(rest.len() / 2);
        for chunk in rest.chunks(2) {
            let qualifier = chunk[0];
            if !is_identifier(qualifier) {
                return Err(malformed(format!("invalid qualifier name `{qualifier}`")));
            }
            pairs.push(QualifierValue::new(qualifier, parse_value(chunk[1])?));
        }
        Fsf::new(selector, pairs)
    }

    /// Canonical one-line textual form: single space after each comma,
    /// pairs in original order. `parse(f.to_line()) == f` for every valid `f`.
    pub fn to_line(&self) -> String {
        let mut out = format!("({}", self.selector);
        for pair in &self.pairs {
            out.push_str(&format!(", {}, {}", pair.qualifier, pair.value));
        }
        out.push(')');
        out
    }

    /// Parse the JSON Lines form. The redundant `time` and `location`
    /// fields must agree with the pairs.
    pub fn from_json_line(line: &str) -> Result<Self, ParseError> {
        let raw: JsonFsf =
            serde_json::from_str(line).map_err(|e| malformed(format!("invalid JSON: {e}")))?;
        let fsf = Fsf::new(raw.selector, raw.pairs)?;
        if fsf.time != raw.time || fsf.location != raw.location {
            return Err(malformed(
                "JSON `time`/`location` fields disagree with the pairs",
            ));
        }
        Ok(fsf)
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(&JsonFsf {
            selector: self.selector,
            pairs: self.pairs.clone(),
            time: self.time,
            location: self.location,
        })
        .expect("FSF serialization cannot fail")
    }

    pub fn selector(&self) -> Selector {
        self.selector
    }

    pub fn pairs(&self) -> &[QualifierValue] {
        &self.pairs
    }

    pub fn time(&self) -> u64 {
        self.time
    }

    pub fn location(&self) -> Coord {
        self.location
    }

    pub fn value(&self, qualifier: &str) -> Option<&Value> {
        self.pairs
            .iter()
            .find(|p| p.qualifier == qualifier)
            .map(|p| &p.value)
    }

    /// Integer value of a qualifier, if present and integer-typed.
    pub fn int_value(&self, qualifier: &str) -> Option<i64> {
        match self.value(qualifier) {
            Some(Value::Integer(i)) => Some(*i),
            _ => None,
        }
    }
}

impl fmt::Display for Fsf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_line())
    }
}

#[derive(Serialize, Deserialize)]
struct JsonFsf {
    selector: Selector,
    pairs: Vec<QualifierValue>,
    time: u64,
    location: Coord,
}

fn parse_selector(token: &str) -> Result<Selector, ParseError> {
    let (name, id) = token
        .split_once('#')
        .ok_or_else(|| malformed(format!("selector `{token}` lacks `#`")))?;
    let selector_type = name.parse::<SelectorType>()?;
    if id.is_empty() || !id.bytes().all(|b| b.is_ascii_digit()) {
        return Err(malformed(format!("selector id `{id}` is not a number")));
    }
    let id = id
        .parse::<u64>()
        .map_err(|_| malformed(format!("selector id `{id}` out of range")))?;
    Ok(Selector::new(selector_type, id))
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn is_integer(s: &str) -> bool {
    let digits = s.strip_prefix('-').unwrap_or(s);
    !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
}

fn parse_value(token: &str) -> Result<Value, ParseError> {
    if let Some((xs, ys)) = token.split_once('|') {
        if !is_integer(xs) || !is_integer(ys) {
            return Err(malformed(format!("invalid coordinate `{token}`")));
        }
        let x = xs
            .parse::<i32>()
            .map_err(|_| malformed(format!("coordinate `{token}` out of range")))?;
        let y = ys
            .parse::<i32>()
            .map_err(|_| malformed(format!("coordinate `{token}` out of range")))?;
        return Ok(Value::Coordinate(Coord::new(x, y)));
    }
    if is_integer(token) {
        return token
            .parse::<i64>()
            .map(Value::Integer)
            .map_err(|_| malformed(format!("integer `{token}` out of range")));
    }
    if is_identifier(token) {
        return Ok(Value::Symbol(token.to_string()));
    }
    Err(malformed(format!("unparseable value `{token}`")))
}
