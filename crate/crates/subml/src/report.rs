//! Run manifests, CSV emission, and the flat key = value config format.
//!
//! The manifest is serialized verbatim into a `#`-prefixed header at the
//! top of every CSV so a result file is self-describing and can be
//! re-run bit-identically.

use std::fmt::Write as _;
use std::time::{SystemTime, UNIX_EPOCH};

use crate::channel::ChannelMode;
use crate::constellation::Scheme;
use crate::error::{Error, Result};
use crate::harness::{LinkConfig, SweepPoint, TargetRule};
use crate::solver::Branch;

/// The noise convention every result file records.
pub const NOISE_CONVENTION: &str =
    "complex noise total variance N0 per receive dimension (N0/2 per real axis); \
     unit average symbol energy; snr_db = Es/N0 in dB";

/// Everything needed to reproduce a run, serialized into file headers.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub config: LinkConfig,
    pub tool_version: String,
    /// Unix seconds; honors `SOURCE_DATE_EPOCH` for reproducible output.
    pub timestamp: u64,
    pub noise_convention: String,
}

impl RunManifest {
    pub fn new(config: LinkConfig) -> Self {
        let timestamp = std::env::var("SOURCE_DATE_EPOCH")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or_else(|| {
                SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0)
            });
        RunManifest {
            config,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp,
            noise_convention: NOISE_CONVENTION.to_string(),
        }
    }

    pub fn header_lines(&self) -> Vec<String> {
        let c = &self.config;
        vec![
            format!("# subml {}", self.tool_version),
            format!("# timestamp_unix = {}", self.timestamp),
            format!("# modulation = {}", modulation_name(c.scheme, c.m)),
            format!("# mimo = {}x{}", c.nt, c.nr),
            format!("# channel = {}", channel_name(c.channel_mode)),
            format!("# snr_db = {}", join_floats(&c.snr_grid_db)),
            format!("# target = {}", target_name(c.target)),
            format!("# trials = {}", c.trials),
            format!("# seed = {}", c.master_seed),
            format!("# branch = {}", c.config_branch_name()),
            format!("# noise_convention = {}", self.noise_convention),
        ]
    }
}

impl LinkConfig {
    fn config_branch_name(&self) -> &'static str {
        self.branch.name()
    }
}

pub fn modulation_name(scheme: Scheme, m: usize) -> String {
    match scheme {
        Scheme::Bpsk => "bpsk".to_string(),
        Scheme::Pam => format!("pam{m}"),
        Scheme::Qam => format!("qam{m}"),
    }
}

fn channel_name(mode: ChannelMode) -> &'static str {
    match mode {
        ChannelMode::Identity => "identity",
        ChannelMode::Rayleigh => "rayleigh",
    }
}

fn target_name(t: TargetRule) -> String {
    match t {
        TargetRule::FactorOfPmin(c) => format!("pmin-factor:{c}"),
        TargetRule::Absolute(p) => format!("abs:{p}"),
    }
}

fn join_floats(v: &[f64]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Fixed CSV column order.
pub const CSV_COLUMNS: &str = "snr_db,beta,target_p,ser,ser_ci_lo,ser_ci_hi,\
                               ber,ber_ci_lo,ber_ci_hi,norm_complexity,hit_rate,paper_hit_prob,trials";

/// Serialize a sweep to CSV text with the manifest header.
/// Floats use the shortest round-trip decimal form with a `.` separator,
/// so output is locale-free and byte-reproducible.
pub fn to_csv(manifest: &RunManifest, points: &[SweepPoint]) -> String {
    let mut out = String::new();
    for line in manifest.header_lines() {
        out.push_str(&line);
        out.push('\n');
    }
    out.push_str(&CSV_COLUMNS.replace(' ', ""));
    out.push('\n');
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            p.snr_db,
            p.beta,
            p.target_p,
            p.ser,
            p.ser_ci.0,
            p.ser_ci.1,
            p.ber,
            p.ber_ci.0,
            p.ber_ci.1,
            p.norm_complexity,
            p.hit_rate,
            p.paper_hit_prob,
            p.trials
        );
    }
    out
}

/// Parse `start:stop:step` into a grid (inclusive of `stop` within a
/// half-step tolerance).
pub fn parse_snr_range(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = |msg: &str| Error::ConfigParse {
        line: 0,
        message: format!("snr range '{s}': {msg}"),
    };
    if parts.len() != 3 {
        return Err(bad("expected start:stop:step"));
    }
    let start: f64 = parts[0].parse().map_err(|_| bad("bad start"))?;
    let stop: f64 = parts[1].parse().map_err(|_| bad("bad stop"))?;
    let step: f64 = parts[2].parse().map_err(|_| bad("bad step"))?;
    if step <= 0.0 || stop < start {
        return Err(bad("need stop >= start and step > 0"));
    }
    let mut grid = Vec::new();
    let mut i = 0;
    loop {
        let v = start + i as f64 * step;
        if v > stop + step / 2.0 {
            break;
        }
        grid.push(v);
        i += 1;
    }
    Ok(grid)
}

/// Parse `pmin-factor:<c>` or `abs:<p>`.
pub fn parse_target(s: &str) -> Result<TargetRule> {
    let bad = |msg: String| Error::ConfigParse { line: 0, message: msg };
    if let Some(v) = s.strip_prefix("pmin-factor:") {
        let c: f64 = v
            .parse()
            .map_err(|_| bad(format!("bad pmin factor '{v}'")))?;
        Ok(TargetRule::FactorOfPmin(c))
    } else if let Some(v) = s.strip_prefix("abs:") {
        let p: f64 = v
            .parse()
            .map_err(|_| bad(format!("bad absolute target '{v}'")))?;
        Ok(TargetRule::Absolute(p))
    } else {
        Err(bad(format!(
            "target '{s}': expected pmin-factor:<c> or abs:<p>"
        )))
    }
}

/// Parse `NtxNr`, e.g. `2x2`.
pub fn parse_mimo(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::ConfigParse {
        line: 0,
        message: format!("mimo '{s}': expected NtxNr, e.g. 2x2"),
    };
    let (a, b) = s.split_once('x').ok_or_else(bad)?;
    let nt = a.parse().map_err(|_| bad())?;
    let nr = b.parse().map_err(|_| bad())?;
    if nt == 0 || nr == 0 {
        return Err(bad());
    }
    Ok((nt, nr))
}

/// Parse a modulation name: `bpsk`, `pam4`, `qam<M>`.
pub fn parse_modulation(s: &str) -> Result<(Scheme, usize)> {
    let bad = |msg: String| Error::ConfigParse { line: 0, message: msg };
    match s {
        "bpsk" => Ok((Scheme::Bpsk, 2)),
        "pam4" => Ok((Scheme::Pam, 4)),
        _ => {
            if let Some(m) = s.strip_prefix("qam") {
                let m: usize = m
                    .parse()
                    .map_err(|_| bad(format!("bad QAM order in '{s}'")))?;
                Ok((Scheme::Qam, m))
            } else {
                Err(bad(format!(
                    "modulation '{s}': expected bpsk, pam4, or qam<M>"
                )))
            }
        }
    }
}

/// Parse the flat `key = value` config format. Lines starting with `#`
/// and blank lines are ignored. Unknown keys and malformed values are
/// reported with their line number.
pub fn parse_config(text: &str) -> Result<LinkConfig> {
    let mut modulation = None;
    let mut mimo = (1usize, 1usize);
    let mut channel = ChannelMode::Identity;
    let mut snr = None;
    let mut target = None;
    let mut trials = 100_000usize;
    let mut seed = 0u64;
    let mut branch = Branch::Lower;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let at = |mut e: Error| {
            if let Error::ConfigParse { line, .. } = &mut e {
                *line = lineno;
            }
            e
        };
        let bad = |msg: String| Error::ConfigParse {
            line: lineno,
            message: msg,
        };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| bad("expected key = value".to_string()))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "modulation" => modulation = Some(parse_modulation(value).map_err(at)?),
            "mimo" => mimo = parse_mimo(value).map_err(at)?,
            "channel" => {
                channel = match value {
                    "identity" => ChannelMode::Identity,
                    "rayleigh" => ChannelMode::Rayleigh,
                    _ => return Err(bad(format!("unknown channel mode '{value}'"))),
                }
            }
            "snr-db-range" => snr = Some(parse_snr_range(value).map_err(at)?),
            "target" => target = Some(parse_target(value).map_err(at)?),
            "trials" => {
                trials = value
                    .parse()
                    .map_err(|_| bad(format!("bad trial count '{value}'")))?
            }
            "seed" => {
                seed = value
                    .parse()
                    .map_err(|_| bad(format!("bad seed '{value}'")))?
            }
            "branch" => {
                branch = match value {
                    "lower" => Branch::Lower,
                    "upper" => Branch::Upper,
                    _ => return Err(bad(format!("unknown branch '{value}'"))),
                }
            }
            _ => return Err(bad(format!("unknown key '{key}'"))),
        }
    }

    let (scheme, m) = modulation.ok_or(Error::ConfigParse {
        line: 0,
        message: "missing required key 'modulation'".to_string(),
    })?;
    let snr_grid_db = snr.ok_or(Error::ConfigParse {
        line: 0,
        message: "missing required key 'snr-db-range'".to_string(),
    })?;
    let target = target.ok_or(Error::ConfigParse {
        line: 0,
        message: "missing required key 'target'".to_string(),
    })?;
    Ok(LinkConfig {
        scheme,
        m,
        nt: mimo.0,
        nr: mimo.1,
        channel_mode: channel,
        snr_grid_db,
        target,
        trials,
        master_seed: seed,
        branch,
    })
}
