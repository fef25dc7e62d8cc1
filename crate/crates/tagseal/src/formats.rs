//! On-disk formats.
//!
//! Integers are lowercase big-endian hex. Group elements and keys use the
//! minimal encoding; codes and ciphers are zero-padded to `ceil(B/8)` bytes so
//! the width survives a round trip.

use std::io::{BufRead, Write};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use tagseal_core::group::{Message, Party, Step, Transcript};
use tagseal_core::lab::{CorrelationReport, GaussianDemoResult, ReportRow, Scheme};
use tagseal_core::{BitString, GroupParams, Nonce, ScrambledCode, SharedKey, TagRecord};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn malformed(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Malformed {
        line,
        message: message.into(),
    }
}

pub fn to_hex(value: &BigUint) -> String {
    format!("{value:x}")
}

pub fn parse_hex(s: &str) -> Option<BigUint> {
    let s = s.trim();
    if s.is_empty() || !s.bytes().all(|c| c.is_ascii_hexdigit()) {
        return None;
    }
    BigUint::parse_bytes(s.as_bytes(), 16)
}

/// `value` as exactly `ceil(bits/8)` bytes of hex. `value` must fit.
pub fn to_padded_hex(value: &BigUint, bits: usize) -> String {
    let bytes = value.to_bytes_be();
    let width = bits.div_ceil(8);
    let mut padded = vec![0u8; width.saturating_sub(bytes.len())];
    if *value != BigUint::default() {
        padded.extend_from_slice(&bytes);
    } else {
        padded.resize(width, 0);
    }
    hex::encode(padded)
}

fn parse_padded_hex(s: &str, bits: usize) -> Option<BigUint> {
    if s.len() != 2 * bits.div_ceil(8) {
        return None;
    }
    let bytes = hex::decode(s).ok()?;
    let value = BigUint::from_bytes_be(&bytes);
    (value.bits() <= bits as u64).then_some(value)
}

pub fn code_to_hex(code: &ScrambledCode) -> String {
    to_padded_hex(code.value(), code.bit_budget() as usize)
}

pub fn code_from_hex(s: &str, budget: u32) -> Option<ScrambledCode> {
    ScrambledCode::new(parse_padded_hex(s.trim(), budget as usize)?, budget).ok()
}

#[derive(Serialize, Deserialize)]
struct ParamsJson {
    p: String,
    q: String,
    alpha: String,
}

pub fn write_params<W: Write>(mut out: W, params: &GroupParams) -> Result<(), FormatError> {
    let json = ParamsJson {
        p: to_hex(params.p()),
        q: to_hex(params.q()),
        alpha: to_hex(params.alpha()),
    };
    serde_json::to_writer_pretty(&mut out, &json)?;
    writeln!(out)?;
    Ok(())
}

/// Parse and structurally validate a parameter file. Primality is left to
/// [`GroupParams::verify_primes`].
pub fn read_params(text: &str) -> Result<GroupParams, FormatError> {
    let json: ParamsJson = serde_json::from_str(text)?;
    let field = |name: &str, s: &str| {
        parse_hex(s).ok_or_else(|| malformed(1, format!("{name} is not hex")))
    };
    let p = field("p", &json.p)?;
    let q = field("q", &json.q)?;
    let alpha = field("alpha", &json.alpha)?;
    GroupParams::new(p, q, alpha).map_err(|e| malformed(1, e.to_string()))
}

#[derive(Serialize, Deserialize)]
struct MessageJson {
    step: String,
    from: String,
    to: String,
    payload: String,
}

pub fn write_transcript<W: Write>(mut out: W, transcript: &Transcript) -> Result<(), FormatError> {
    for m in transcript.messages() {
        let json = MessageJson {
            step: m.step.to_string(),
            from: m.from.to_string(),
            to: m.to.to_string(),
            payload: to_hex(&m.payload),
        };
        serde_json::to_writer(&mut out, &json)?;
        writeln!(out)?;
    }
    Ok(())
}

pub fn read_transcript<R: BufRead>(input: R) -> Result<Transcript, FormatError> {
    let mut transcript = Transcript::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let n = i + 1;
        let json: MessageJson =
            serde_json::from_str(&line).map_err(|e| malformed(n, e.to_string()))?;
        let step: Step = json.step.parse().map_err(|_| malformed(n, "bad step"))?;
        let from: Party = json.from.parse().map_err(|_| malformed(n, "bad sender"))?;
        let to: Party = json.to.parse().map_err(|_| malformed(n, "bad recipient"))?;
        let payload = parse_hex(&json.payload).ok_or_else(|| malformed(n, "payload is not hex"))?;
        transcript.push(Message {
            step,
            from,
            to,
            payload,
        });
    }
    Ok(transcript)
}

pub fn write_key<W: Write>(mut out: W, key: &SharedKey) -> Result<(), FormatError> {
    writeln!(out, "{}", to_hex(key.value()))?;
    Ok(())
}

pub fn read_key(text: &str) -> Result<SharedKey, FormatError> {
    parse_hex(text)
        .map(SharedKey::new)
        .ok_or_else(|| malformed(1, "key is not hex"))
}

#[derive(Serialize, Deserialize)]
struct RecordJson {
    manifest_id: String,
    nonce: String,
    b_budget: usize,
    cipher: String,
}

pub fn record_to_line(record: &TagRecord) -> Result<String, FormatError> {
    let json = RecordJson {
        manifest_id: record.manifest_id.clone(),
        nonce: hex::encode(record.nonce.as_bytes()),
        b_budget: record.bit_budget(),
        cipher: to_padded_hex(&record.cipher.to_biguint(), record.bit_budget()),
    };
    Ok(serde_json::to_string(&json)?)
}

pub fn record_from_line(line: &str, line_number: usize) -> Result<TagRecord, FormatError> {
    let bad = |m: &str| malformed(line_number, m);
    let json: RecordJson =
        serde_json::from_str(line).map_err(|e| malformed(line_number, e.to_string()))?;
    if json.b_budget == 0 {
        return Err(bad("b_budget must be positive"));
    }
    let nonce: [u8; 16] = hex::decode(&json.nonce)
        .ok()
        .and_then(|b| b.try_into().ok())
        .ok_or_else(|| bad("nonce must be 32 hex characters"))?;
    let cipher = parse_padded_hex(&json.cipher, json.b_budget)
        .ok_or_else(|| bad("cipher does not match b_budget"))?;
    let cipher =
        BitString::from_biguint(&cipher, json.b_budget).map_err(|e| bad(&e.to_string()))?;
    Ok(TagRecord {
        manifest_id: json.manifest_id,
        nonce: Nonce(nonce),
        cipher,
    })
}

pub fn read_records<R: BufRead>(input: R) -> Result<Vec<TagRecord>, FormatError> {
    let mut records = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if !line.trim().is_empty() {
            records.push(record_from_line(&line, i + 1)?);
        }
    }
    Ok(records)
}

#[derive(Serialize, Deserialize)]
struct ReportCsv {
    scheme: String,
    encrypted: bool,
    b: u32,
    #[serde(rename = "B")]
    budget: u32,
    #[serde(rename = "T")]
    samples: usize,
    seed: u64,
    rho: f64,
}

pub fn write_report<W: Write>(out: W, report: &CorrelationReport) -> Result<(), FormatError> {
    let mut writer = csv::Writer::from_writer(out);
    for row in &report.rows {
        writer.serialize(ReportCsv {
            scheme: row.scheme.to_string(),
            encrypted: row.encrypted,
            b: row.bit_width,
            budget: row.budget,
            samples: row.samples,
            seed: row.seed,
            rho: row.rho,
        })?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_report<R: std::io::Read>(input: R) -> Result<CorrelationReport, FormatError> {
    let mut rows = Vec::new();
    for (i, record) in csv::Reader::from_reader(input)
        .deserialize::<ReportCsv>()
        .enumerate()
    {
        let r = record?;
        let scheme: Scheme = r
            .scheme
            .parse()
            .map_err(|_| malformed(i + 2, "unknown scheme"))?;
        rows.push(ReportRow {
            scheme,
            encrypted: r.encrypted,
            bit_width: r.b,
            budget: r.budget,
            samples: r.samples,
            seed: r.seed,
            rho: r.rho,
        });
    }
    Ok(CorrelationReport { rows })
}

#[derive(Serialize)]
struct GaussianJson {
    rho: f64,
    sigma_m: f64,
    sigma_h: f64,
    beta: f64,
    trials: u64,
    var_ratio: f64,
    std_error: f64,
    threshold: f64,
    uses_side_channel: bool,
    closed_form: f64,
}

pub fn write_gaussian<W: Write>(
    mut out: W,
    result: &GaussianDemoResult,
) -> Result<(), FormatError> {
    let json = GaussianJson {
        rho: result.rho,
        sigma_m: result.sigma_m,
        sigma_h: result.sigma_h,
        beta: result.beta,
        trials: result.trials,
        var_ratio: result.var_ratio,
        std_error: result.std_error,
        threshold: result.threshold,
        uses_side_channel: result.uses_side_channel,
        closed_form: tagseal_core::lab::gaussian::closed_form_var_ratio(
            result.rho,
            result.sigma_m,
            result.sigma_h,
            result.beta,
        ),
    };
    serde_json::to_writer_pretty(&mut out, &json)?;
    writeln!(out)?;
    Ok(())
}
