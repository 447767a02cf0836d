//! Line-oriented instance files and their `.manifest` sidecars.
//!
//! ```text
//! # comment
//! N 3
//! IC 10.00
//! TMAX INF
//! CMAX 5000.00
//! ACT 1 SUCC 2,3 MODES (5,100.00);(3,200.00)
//! ACT 2 SUCC - MODES (4,80.00)
//! ACT 3 SUCC - MODES (2,50.00,30.00,10.00)
//! ```
//!
//! A mode is `(duration,cost)` or `(duration,cost,material,daily_rate)`; the
//! four-field form is checked for `cost = material + duration * daily_rate`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigUint;

use super::money::Money;
use super::network::{Activity, CostDecomposition, ExecutionMode, NetworkError, ProjectNetwork};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}: syntax error: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: missing `{key}` header")]
    MissingHeader { line: usize, key: &'static str },
    #[error("line {line}: duplicate `{key}` header")]
    DuplicateHeader { line: usize, key: String },
    #[error("line {line}: activity {id} defined twice")]
    DuplicateActivity { line: usize, id: usize },
    #[error("line {line}: expected {expected} activities, found {found}")]
    ActivityCount {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: activity {id} is out of range 1..={n}")]
    ActivityOutOfRange { line: usize, id: usize, n: usize },
    #[error("line {line}: negative duration in activity {activity}")]
    NegativeDuration { line: usize, activity: usize },
    #[error("line {line}: negative cost in activity {activity}")]
    NegativeCost { line: usize, activity: usize },
    #[error("line {line}: dangling successor {successor} in activity {activity}")]
    DanglingSuccessor {
        line: usize,
        activity: usize,
        successor: usize,
    },
    #[error("line {line}: precedence cycle through activity {activity}")]
    Cycle { line: usize, activity: usize },
    #[error("line {line}: activity {activity}: {source}")]
    Invalid {
        line: usize,
        activity: usize,
        source: NetworkError,
    },
    #[error("line {line}: {source}")]
    Network { line: usize, source: NetworkError },
}

impl FormatError {
    /// 1-based line the diagnostic refers to, if any.
    pub fn line(&self) -> Option<usize> {
        match self {
            FormatError::Io { .. } => None,
            FormatError::Syntax { line, .. }
            | FormatError::MissingHeader { line, .. }
            | FormatError::DuplicateHeader { line, .. }
            | FormatError::DuplicateActivity { line, .. }
            | FormatError::ActivityCount { line, .. }
            | FormatError::ActivityOutOfRange { line, .. }
            | FormatError::NegativeDuration { line, .. }
            | FormatError::NegativeCost { line, .. }
            | FormatError::DanglingSuccessor { line, .. }
            | FormatError::Cycle { line, .. }
            | FormatError::Invalid { line, .. }
            | FormatError::Network { line, .. } => Some(*line),
        }
    }
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<ProjectNetwork, FormatError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_instance(&text)
}

pub fn save_instance(network: &ProjectNetwork, path: impl AsRef<Path>) -> Result<(), FormatError> {
    let path = path.as_ref();
    fs::write(path, format_instance(network)).map_err(|source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Canonical text form of a network.
pub fn format_instance(network: &ProjectNetwork) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "N {}", network.activity_count());
    let _ = writeln!(out, "IC {}", network.indirect_rate());
    match network.t_max() {
        Some(t) => {
            let _ = writeln!(out, "TMAX {t}");
        }
        None => out.push_str("TMAX INF\n"),
    }
    match network.c_max() {
        Some(c) => {
            let _ = writeln!(out, "CMAX {c}");
        }
        None => out.push_str("CMAX INF\n"),
    }
    for act in network.activities() {
        let succ = if act.successors.is_empty() {
            "-".to_string()
        } else {
            act.successors
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        let modes = act
            .modes
            .iter()
            .map(|m| match m.decomposition {
                Some(d) => format!(
                    "({},{},{},{})",
                    m.duration, m.direct_cost, d.material_cost, d.daily_rate
                ),
                None => format!("({},{})", m.duration, m.direct_cost),
            })
            .collect::<Vec<_>>()
            .join(";");
        let _ = writeln!(out, "ACT {} SUCC {} MODES {}", act.id, succ, modes);
    }
    out
}

pub fn parse_instance(text: &str) -> Result<ProjectNetwork, FormatError> {
    let mut n: Option<(usize, usize)> = None;
    let mut ic: Option<Money> = None;
    let mut t_max: Option<Option<u64>> = None;
    let mut c_max: Option<Option<Money>> = None;
    // (line, activity)
    let mut acts: Vec<(usize, Activity)> = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, rest) = content
            .split_once(char::is_whitespace)
            .map(|(k, r)| (k, r.trim()))
            .unwrap_or((content, ""));
        let dup = |key: &str| FormatError::DuplicateHeader {
            line,
            key: key.to_string(),
        };
        match key {
            "N" => {
                if n.is_some() {
                    return Err(dup(key));
                }
                let v: usize = rest
                    .parse()
                    .map_err(|_| syntax(line, format!("bad activity count `{rest}`")))?;
                n = Some((v, line));
            }
            "IC" => {
                if ic.is_some() {
                    return Err(dup(key));
                }
                let v = parse_money(rest, line)?;
                if v.is_negative() {
                    return Err(FormatError::Network {
                        line,
                        source: NetworkError::NegativeIndirectRate,
                    });
                }
                ic = Some(v);
            }
            "TMAX" => {
                if t_max.is_some() {
                    return Err(dup(key));
                }
                t_max = Some(if rest == "INF" {
                    None
                } else {
                    Some(
                        rest.parse()
                            .map_err(|_| syntax(line, format!("bad TMAX `{rest}`")))?,
                    )
                });
            }
            "CMAX" => {
                if c_max.is_some() {
                    return Err(dup(key));
                }
                c_max = Some(if rest == "INF" {
                    None
                } else {
                    Some(parse_money(rest, line)?)
                });
            }
            "ACT" => acts.push((line, parse_activity(rest, line)?)),
            other => return Err(syntax(line, format!("unknown record `{other}`"))),
        }
    }

    let (n, n_line) = n.ok_or(FormatError::MissingHeader {
        line: last_line.max(1),
        key: "N",
    })?;
    let ic = ic.ok_or(FormatError::MissingHeader {
        line: last_line.max(1),
        key: "IC",
    })?;

    let mut slots: Vec<Option<(usize, Activity)>> = vec![None; n];
    for (line, act) in acts.iter().cloned() {
        if act.id == 0 || act.id > n {
            return Err(FormatError::ActivityOutOfRange {
                line,
                id: act.id,
                n,
            });
        }
        if slots[act.id - 1].is_some() {
            return Err(FormatError::DuplicateActivity { line, id: act.id });
        }
        let slot = act.id - 1;
        slots[slot] = Some((line, act));
    }
    if acts.len() != n {
        return Err(FormatError::ActivityCount {
            line: n_line,
            expected: n,
            found: acts.len(),
        });
    }
    let line_of: HashMap<usize, usize> = acts.iter().map(|(l, a)| (a.id, *l)).collect();
    let activities: Vec<Activity> = slots.into_iter().map(|s| s.unwrap().1).collect();

    ProjectNetwork::new(activities, ic, t_max.flatten(), c_max.flatten()).map_err(|e| {
        let at = |a: usize| line_of.get(&a).copied().unwrap_or(n_line);
        match e {
            NetworkError::DanglingSuccessor {
                activity,
                successor,
            } => FormatError::DanglingSuccessor {
                line: at(activity),
                activity,
                successor,
            },
            NetworkError::Cycle { activity } => FormatError::Cycle {
                line: at(activity),
                activity,
            },
            NetworkError::NegativeCost { activity, .. } => FormatError::NegativeCost {
                line: at(activity),
                activity,
            },
            NetworkError::SelfLoop { activity }
            | NetworkError::NoModes { activity }
            | NetworkError::DecompositionMismatch { activity, .. } => FormatError::Invalid {
                line: at(activity),
                activity,
                source: e,
            },
            other => FormatError::Network {
                line: n_line,
                source: other,
            },
        }
    })
}

fn parse_money(s: &str, line: usize) -> Result<Money, FormatError> {
    s.parse::<Money>()
        .map_err(|e| syntax(line, format!("bad amount: {e}")))
}

fn parse_activity(rest: &str, line: usize) -> Result<Activity, FormatError> {
    let mut tokens = rest.split_whitespace();
    let id: usize = tokens
        .next()
        .ok_or_else(|| syntax(line, "missing activity id"))?
        .parse()
        .map_err(|_| syntax(line, "bad activity id"))?;
    if tokens.next() != Some("SUCC") {
        return Err(syntax(line, "expected `SUCC`"));
    }
    let succ_tok = tokens
        .next()
        .ok_or_else(|| syntax(line, "missing successor list"))?;
    let successors = if succ_tok == "-" {
        Vec::new()
    } else {
        succ_tok
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| syntax(line, format!("bad successor id `{s}`")))
            })
            .collect::<Result<Vec<_>, _>>()?
    };
    if tokens.next() != Some("MODES") {
        return Err(syntax(line, "expected `MODES`"));
    }
    let mode_text: String = tokens.collect::<Vec<_>>().concat();
    if mode_text.is_empty() {
        return Err(syntax(line, "missing modes"));
    }
    let modes = mode_text
        .split(';')
        .map(|m| parse_mode(m, id, line))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Activity {
        id,
        modes,
        successors,
    })
}

fn parse_mode(text: &str, activity: usize, line: usize) -> Result<ExecutionMode, FormatError> {
    let inner = text
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| syntax(line, format!("mode `{text}` is not parenthesized")))?;
    let fields: Vec<&str> = inner.split(',').collect();
    if fields.len() != 2 && fields.len() != 4 {
        return Err(syntax(line, format!("mode `{text}` needs 2 or 4 fields")));
    }
    let dur: i64 = fields[0]
        .parse()
        .map_err(|_| syntax(line, format!("bad duration `{}`", fields[0])))?;
    if dur < 0 {
        return Err(FormatError::NegativeDuration { line, activity });
    }
    let duration =
        u32::try_from(dur).map_err(|_| syntax(line, format!("duration {dur} too large")))?;
    let money = |s: &str| -> Result<Money, FormatError> {
        let m = parse_money(s, line)?;
        if m.is_negative() {
            return Err(FormatError::NegativeCost { line, activity });
        }
        Ok(m)
    };
    let direct_cost = money(fields[1])?;
    let decomposition = if fields.len() == 4 {
        Some(CostDecomposition {
            material_cost: money(fields[2])?,
            daily_rate: money(fields[3])?,
        })
    } else {
        None
    };
    Ok(ExecutionMode {
        duration,
        direct_cost,
        decomposition,
    })
}

/// Declared characteristics of a bundled instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Manifest {
    pub schedules: BigUint,
    pub paths: BigUint,
}

impl Manifest {
    pub fn of(network: &ProjectNetwork) -> Self {
        Manifest {
            schedules: network.count_schedules(),
            paths: network.count_paths(),
        }
    }
}

/// Sidecar path: same stem, `.manifest` extension.
pub fn manifest_path(instance: impl AsRef<Path>) -> PathBuf {
    instance.as_ref().with_extension("manifest")
}

pub fn format_manifest(m: &Manifest) -> String {
    format!("SCHEDULES {}\nPATHS {}\n", m.schedules, m.paths)
}

pub fn parse_manifest(text: &str) -> Result<Manifest, FormatError> {
    let mut schedules = None;
    let mut paths = None;
    let mut last = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once(char::is_whitespace)
            .ok_or_else(|| syntax(line, "expected `KEY value`"))?;
        let value: BigUint = value
            .trim()
            .parse()
            .map_err(|_| syntax(line, format!("bad integer `{}`", value.trim())))?;
        match key {
            "SCHEDULES" => schedules = Some(value),
            "PATHS" => paths = Some(value),
            other => return Err(syntax(line, format!("unknown record `{other}`"))),
        }
    }
    Ok(Manifest {
        schedules: schedules.ok_or(FormatError::MissingHeader {
            line: last.max(1),
            key: "SCHEDULES",
        })?,
        paths: paths.ok_or(FormatError::MissingHeader {
            line: last.max(1),
            key: "PATHS",
        })?,
    })
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<Manifest, FormatError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_manifest(&text)
}

pub fn save_manifest(m: &Manifest, path: impl AsRef<Path>) -> Result<(), FormatError> {
    let path = path.as_ref();
    fs::write(path, format_manifest(m)).map_err(|source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    })
}
