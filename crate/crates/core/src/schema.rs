//! JSON interchange formats and hardened parsers.
//!
//! Wire forms (all top-level objects carry an optional versioned
//! `"schema": 1` field):
//!
//! * series: `{ "valuation": int, "coeffs": [[re, im], ...] }`: exponents
//!   implicit from the valuation and position;
//! * hypersurface: `{ "m": int, "sign": "+"|"-", "phi": { "22": series,
//!   "23": series, "32": series, "33": series } }`: keys other than the
//!   four listed are a schema error, missing keys mean the zero series;
//! * equation: `{ "m": int, "A": series, ..., "F": series }`;
//! * reduced equation: `{ "l": int, "P": [series; 2], "Q": [series; 4] }`
//!   by ascending z-degree;
//! * path: `{ "kind": "circle", "radius": r, "turns": n, "base_angle": a }`
//!   or `{ "kind": "segment", "start": [re, im], "end": [re, im] }` or
//!   `{ "kind": "polyline", "points": [[re, im], ...] }`;
//! * matrix: `[[[re, im]; 3]; 3]`.
//!
//! Parsers reject non-finite numbers and unreasonable sizes, and never
//! panic on malformed input. Emission fixes every float to 17 significant
//! digits so identical inputs produce byte-identical reports.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use serde::Deserialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::hypersurface::{P0Hypersurface, Sign};
use crate::linalg3::Mat3;
use crate::numint::{GraphSample, PathKind};
use crate::ode::{NonminimalOde, ReducedOde};
use crate::series::{fnv, TruncatedSeries};

/// Hard limits on parsed data.
pub const MAX_ABS_VALUATION: i64 = 1_000_000;
pub const MAX_COEFFS: usize = 100_000;
pub const MAX_M: u64 = 256;
pub const MAX_TURNS: i64 = 64;
pub const MAX_POLYLINE_POINTS: usize = 10_000;

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("schema violation: {0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> SchemaError {
    SchemaError::Invalid(msg.into())
}

fn check_version(schema: Option<u64>) -> Result<(), SchemaError> {
    match schema {
        None | Some(1) => Ok(()),
        Some(v) => Err(invalid(format!("unsupported schema version {v}"))),
    }
}

fn complex_from(pair: [f64; 2], what: &str) -> Result<C64, SchemaError> {
    if !pair[0].is_finite() || !pair[1].is_finite() {
        return Err(invalid(format!("{what}: non-finite component")));
    }
    Ok(C64::new(pair[0], pair[1]))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SeriesJson {
    valuation: i64,
    coeffs: Vec<[f64; 2]>,
}

fn series_from_json(raw: SeriesJson, what: &str) -> Result<TruncatedSeries, SchemaError> {
    if raw.valuation.abs() > MAX_ABS_VALUATION {
        return Err(invalid(format!("{what}: |valuation| exceeds {MAX_ABS_VALUATION}")));
    }
    if raw.coeffs.len() > MAX_COEFFS {
        return Err(invalid(format!("{what}: more than {MAX_COEFFS} coefficients")));
    }
    let coeffs = raw
        .coeffs
        .iter()
        .map(|&p| complex_from(p, what))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TruncatedSeries::new(raw.valuation, coeffs))
}

pub fn parse_series(input: &str) -> Result<TruncatedSeries, SchemaError> {
    let raw: SeriesJson = serde_json::from_str(input)?;
    series_from_json(raw, "series")
}

pub fn series_to_value(s: &TruncatedSeries) -> Value {
    json!({
        "valuation": s.valuation(),
        "coeffs": s.coeffs().iter().map(|c| json!([vnum(c.re), vnum(c.im)])).collect::<Vec<_>>(),
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HypersurfaceJson {
    schema: Option<u64>,
    m: u64,
    sign: String,
    phi: BTreeMap<String, SeriesJson>,
}

pub fn parse_hypersurface(input: &str) -> Result<P0Hypersurface, SchemaError> {
    let raw: HypersurfaceJson = serde_json::from_str(input)?;
    check_version(raw.schema)?;
    if raw.m == 0 || raw.m > MAX_M {
        return Err(invalid(format!("m must be in 1..={MAX_M}, got {}", raw.m)));
    }
    let sign = match raw.sign.as_str() {
        "+" => Sign::Positive,
        "-" => Sign::Negative,
        other => return Err(invalid(format!("sign must be \"+\" or \"-\", got {other:?}"))),
    };
    for key in raw.phi.keys() {
        if !matches!(key.as_str(), "22" | "23" | "32" | "33") {
            return Err(invalid(format!(
                "phi key {key:?} is not one of \"22\", \"23\", \"32\", \"33\"; no other coefficient influences the associated equation"
            )));
        }
    }
    let mut phi = raw.phi;
    let mut take = |key: &str| -> Result<TruncatedSeries, SchemaError> {
        match phi.remove(key) {
            Some(s) => series_from_json(s, &format!("phi_{key}")),
            None => Ok(TruncatedSeries::zero(1)),
        }
    };
    Ok(P0Hypersurface::new(raw.m as u32, sign, take("22")?, take("23")?, take("32")?, take("33")?))
}

pub fn hypersurface_to_value(h: &P0Hypersurface) -> Value {
    json!({
        "schema": 1,
        "m": h.m,
        "sign": h.sign.to_string(),
        "phi": {
            "22": series_to_value(&h.phi22),
            "23": series_to_value(&h.phi23),
            "32": series_to_value(&h.phi32),
            "33": series_to_value(&h.phi33),
        },
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OdeJson {
    schema: Option<u64>,
    m: u64,
    #[serde(rename = "A")]
    a: SeriesJson,
    #[serde(rename = "B")]
    b: SeriesJson,
    #[serde(rename = "C")]
    c: SeriesJson,
    #[serde(rename = "D")]
    d: SeriesJson,
    #[serde(rename = "E")]
    e: SeriesJson,
    #[serde(rename = "F")]
    f: SeriesJson,
}

fn ode_from_json(raw: OdeJson) -> Result<NonminimalOde, SchemaError> {
    check_version(raw.schema)?;
    if raw.m == 0 || raw.m > MAX_M {
        return Err(invalid(format!("m must be in 1..={MAX_M}, got {}", raw.m)));
    }
    NonminimalOde::new(
        raw.m as u32,
        series_from_json(raw.a, "A")?,
        series_from_json(raw.b, "B")?,
        series_from_json(raw.c, "C")?,
        series_from_json(raw.d, "D")?,
        series_from_json(raw.e, "E")?,
        series_from_json(raw.f, "F")?,
    )
    .map_err(|e| invalid(e.to_string()))
}

pub fn parse_ode(input: &str) -> Result<NonminimalOde, SchemaError> {
    ode_from_json(serde_json::from_str(input)?)
}

pub fn ode_to_value(ode: &NonminimalOde) -> Value {
    json!({
        "schema": 1,
        "m": ode.m,
        "A": series_to_value(&ode.a),
        "B": series_to_value(&ode.b),
        "C": series_to_value(&ode.c),
        "D": series_to_value(&ode.d),
        "E": series_to_value(&ode.e),
        "F": series_to_value(&ode.f),
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ReducedJson {
    schema: Option<u64>,
    l: u64,
    #[serde(rename = "P")]
    p: Vec<SeriesJson>,
    #[serde(rename = "Q")]
    q: Vec<SeriesJson>,
}

pub fn parse_reduced(input: &str) -> Result<ReducedOde, SchemaError> {
    let raw: ReducedJson = serde_json::from_str(input)?;
    check_version(raw.schema)?;
    if raw.l > 1024 {
        return Err(invalid(format!("l must be at most 1024, got {}", raw.l)));
    }
    if raw.p.len() != 2 {
        return Err(invalid(format!("P must list exactly 2 series (z-degrees 0 and 1), got {}", raw.p.len())));
    }
    if raw.q.len() != 4 {
        return Err(invalid(format!("Q must list exactly 4 series (z-degrees 0..3), got {}", raw.q.len())));
    }
    let mut p = raw.p.into_iter();
    let mut q = raw.q.into_iter();
    let next = |it: &mut dyn Iterator<Item = SeriesJson>, what: String| {
        series_from_json(it.next().expect("length checked"), &what)
    };
    let p0 = next(&mut p, "P[0]".into())?;
    let p1 = next(&mut p, "P[1]".into())?;
    let q0 = next(&mut q, "Q[0]".into())?;
    let q1 = next(&mut q, "Q[1]".into())?;
    let q2 = next(&mut q, "Q[2]".into())?;
    let q3 = next(&mut q, "Q[3]".into())?;
    // standalone reduced input: the source tag is its own fingerprint
    let mut h = 0x9e37_79b9_7f4a_7c15u64;
    fnv(&mut h, raw.l);
    for s in [&p0, &p1, &q0, &q1, &q2, &q3] {
        s.fingerprint_into(&mut h);
    }
    Ok(ReducedOde { p: [p0, p1], q: [q0, q1, q2, q3], l: raw.l as u32, source: h })
}

pub fn reduced_to_value(red: &ReducedOde) -> Value {
    json!({
        "schema": 1,
        "l": red.l,
        "P": red.p.iter().map(series_to_value).collect::<Vec<_>>(),
        "Q": red.q.iter().map(series_to_value).collect::<Vec<_>>(),
    })
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum PathJson {
    Circle {
        schema: Option<u64>,
        radius: f64,
        #[serde(default = "default_turns")]
        turns: i64,
        #[serde(default)]
        base_angle: f64,
    },
    Segment {
        schema: Option<u64>,
        start: [f64; 2],
        end: [f64; 2],
    },
    Polyline {
        schema: Option<u64>,
        points: Vec<[f64; 2]>,
    },
}

fn default_turns() -> i64 {
    1
}

pub fn parse_path_spec(input: &str) -> Result<PathKind, SchemaError> {
    let raw: PathJson = serde_json::from_str(input)?;
    match raw {
        PathJson::Circle { schema, radius, turns, base_angle } => {
            check_version(schema)?;
            if !radius.is_finite() || radius <= 0.0 {
                return Err(invalid("circle radius must be finite and positive"));
            }
            if turns == 0 || turns.abs() > MAX_TURNS {
                return Err(invalid(format!("turns must be nonzero with |turns| <= {MAX_TURNS}")));
            }
            if !base_angle.is_finite() {
                return Err(invalid("base_angle must be finite"));
            }
            Ok(PathKind::Circle { radius, base_angle, turns: turns as i32 })
        }
        PathJson::Segment { schema, start, end } => {
            check_version(schema)?;
            Ok(PathKind::Segment {
                start: complex_from(start, "segment start")?,
                end: complex_from(end, "segment end")?,
            })
        }
        PathJson::Polyline { schema, points } => {
            check_version(schema)?;
            if points.len() < 2 || points.len() > MAX_POLYLINE_POINTS {
                return Err(invalid(format!("polyline needs 2..={MAX_POLYLINE_POINTS} points")));
            }
            let pts = points
                .iter()
                .map(|&p| complex_from(p, "polyline point"))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(PathKind::Polyline(pts))
        }
    }
}

pub fn parse_matrix3(input: &str) -> Result<Mat3, SchemaError> {
    let raw: Vec<Vec<[f64; 2]>> = serde_json::from_str(input)?;
    if raw.len() != 3 || raw.iter().any(|r| r.len() != 3) {
        return Err(invalid("matrix must be 3x3 with [re, im] entries"));
    }
    let mut m = [[C64::new(0.0, 0.0); 3]; 3];
    for (i, row) in raw.iter().enumerate() {
        for (j, &entry) in row.iter().enumerate() {
            m[i][j] = complex_from(entry, "matrix entry")?;
        }
    }
    Ok(m)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SampleJson {
    w: [f64; 2],
    z: [f64; 2],
    dz: [f64; 2],
    d2z: [f64; 2],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SegreCheckJson {
    schema: Option<u64>,
    ode: OdeJson,
    samples: Vec<SampleJson>,
}

pub fn parse_segre_check(input: &str) -> Result<(NonminimalOde, Vec<GraphSample>), SchemaError> {
    let raw: SegreCheckJson = serde_json::from_str(input)?;
    check_version(raw.schema)?;
    if raw.samples.is_empty() || raw.samples.len() > MAX_COEFFS {
        return Err(invalid("samples must be nonempty and of reasonable size"));
    }
    let ode = ode_from_json(raw.ode)?;
    let samples = raw
        .samples
        .iter()
        .map(|s| {
            Ok(GraphSample {
                w: complex_from(s.w, "sample w")?,
                z: complex_from(s.z, "sample z")?,
                dz: complex_from(s.dz, "sample dz")?,
                d2z: complex_from(s.d2z, "sample d2z")?,
            })
        })
        .collect::<Result<Vec<_>, SchemaError>>()?;
    Ok((ode, samples))
}

/// JSON number from a float; non-finite values degrade to strings instead
/// of panicking (reports should never contain them).
pub fn vnum(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or_else(|| Value::String(format!("{x}")))
}

pub fn vcomplex(c: C64) -> Value {
    json!([vnum(c.re), vnum(c.im)])
}

/// Serializes with every float printed to 17 significant digits, so that
/// identical values produce byte-identical documents.
pub fn write_json_17(value: &Value) -> String {
    struct F17;
    impl serde_json::ser::Formatter for F17 {
        fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
        where
            W: ?Sized + std::io::Write,
        {
            write!(writer, "{value:.16e}")
        }
    }
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, F17);
    serde::Serialize::serialize(value, &mut ser).expect("serializing a Value cannot fail");
    String::from_utf8(out).expect("serializer emits UTF-8")
}
