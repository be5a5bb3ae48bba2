//! Single-chart almost Norden manifolds and their configuration files.
//!
//! Configuration format (one statement per line, `#` starts a comment):
//!
//! ```text
//! name = "conformal-norden-4"
//! dim = 4
//! g[1][1] = "exp(2*x1)"        # metric component g_ij, 1-based
//! J[3][1] = "1"                # structure component J^i_j (row i, column j)
//! samples = [[0,0,0,0], [0.1,0.2,-0.3,0.4]]
//! ```
//!
//! Missing `g` and `J` entries are zero. A metric entry given only once is
//! mirrored to its transpose; giving both with different expressions is an error.

use std::collections::BTreeMap;
use std::path::Path;

use crate::expr::{parse, Expr};
use crate::{Error, Result};

/// Metric and structure components of a chart, as expressions in `x1..x{dim}`.
#[derive(Debug, Clone)]
pub struct ChartManifold {
    name: String,
    dim: usize,
    metric: Vec<Vec<Expr>>,
    structure: Vec<Vec<Expr>>,
    samples: Vec<Vec<f64>>,
}

const BUILTINS: &[(&str, &str)] = &[
    ("flat-norden-4", include_str!("../../../../manifolds/flat-norden-4.conf")),
    ("flat-norden-8", include_str!("../../../../manifolds/flat-norden-8.conf")),
    ("conformal-norden-4", include_str!("../../../../manifolds/conformal-norden-4.conf")),
    ("twisted-norden-4", include_str!("../../../../manifolds/twisted-norden-4.conf")),
    ("bad-hermitian-4", include_str!("../../../../manifolds/bad-hermitian-4.conf")),
];

impl ChartManifold {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        metric: Vec<Vec<Expr>>,
        structure: Vec<Vec<Expr>>,
    ) -> Result<Self> {
        if dim < 4 || !dim.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "chart dimension must be even and at least 4, got {dim}"
            )));
        }
        Self::new_any_dim(name, dim, metric, structure)
    }

    /// Same as [`ChartManifold::new`] without the even-dimension requirement;
    /// used for metric-only test charts.
    pub(crate) fn new_any_dim(
        name: impl Into<String>,
        dim: usize,
        metric: Vec<Vec<Expr>>,
        structure: Vec<Vec<Expr>>,
    ) -> Result<Self> {
        let square = |m: &Vec<Vec<Expr>>| m.len() == dim && m.iter().all(|r| r.len() == dim);
        if !square(&metric) || !square(&structure) {
            return Err(Error::Structural(format!(
                "component matrices must be {dim}x{dim}"
            )));
        }
        for e in metric.iter().chain(&structure).flatten() {
            if let Some(v) = e.max_var() {
                if v >= dim {
                    return Err(Error::Structural(format!(
                        "expression {e} references x{} beyond dimension {dim}",
                        v + 1
                    )));
                }
            }
        }
        Ok(ChartManifold {
            name: name.into(),
            dim,
            metric,
            structure,
            samples: Vec::new(),
        })
    }

    pub fn with_samples(mut self, samples: Vec<Vec<f64>>) -> Result<Self> {
        if let Some(bad) = samples.iter().find(|s| s.len() != self.dim) {
            return Err(Error::InvalidParameter(format!(
                "sample {bad:?} does not have {} coordinates",
                self.dim
            )));
        }
        self.samples = samples;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Half the dimension.
    pub fn n(&self) -> usize {
        self.dim / 2
    }

    pub fn metric(&self) -> &[Vec<Expr>] {
        &self.metric
    }

    pub fn structure(&self) -> &[Vec<Expr>] {
        &self.structure
    }

    pub fn samples(&self) -> &[Vec<f64>] {
        &self.samples
    }

    pub fn builtin_names() -> impl Iterator<Item = &'static str> {
        BUILTINS.iter().map(|(n, _)| *n)
    }

    pub fn builtin(name: &str) -> Option<Result<Self>> {
        BUILTINS
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, text)| Self::from_config_str(text))
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_config_str(&text)
    }

    pub fn from_config_str(text: &str) -> Result<Self> {
        let mut name = None;
        let mut dim = None;
        let mut samples = None;
        let mut g_raw: BTreeMap<(usize, usize), (usize, String)> = BTreeMap::new();
        let mut j_raw: BTreeMap<(usize, usize), (usize, String)> = BTreeMap::new();

        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = strip_comment(raw_line).trim();
            if line.is_empty() {
                continue;
            }
            let cfg_err = |message: String| Error::Config {
                line: line_no,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| cfg_err("expected `key = value`".into()))?;
            let key = key.trim();
            let value = value.trim();
            match key {
                "name" => {
                    if name.is_some() {
                        return Err(cfg_err("duplicate `name`".into()));
                    }
                    name = Some(unquote(value).map_err(cfg_err)?);
                }
                "dim" => {
                    if dim.is_some() {
                        return Err(cfg_err("duplicate `dim`".into()));
                    }
                    dim = Some(
                        value
                            .parse::<usize>()
                            .map_err(|_| cfg_err(format!("invalid dim {value:?}")))?,
                    );
                }
                "samples" => {
                    let parsed: Vec<Vec<f64>> = serde_json::from_str(value)
                        .map_err(|e| cfg_err(format!("invalid samples: {e}")))?;
                    samples = Some(parsed);
                }
                _ => {
                    let (table, i, j) = parse_indexed_key(key).map_err(cfg_err)?;
                    let target = match table {
                        'g' => &mut g_raw,
                        _ => &mut j_raw,
                    };
                    let expr = unquote(value).map_err(cfg_err)?;
                    if target.insert((i, j), (line_no, expr)).is_some() {
                        return Err(cfg_err(format!("duplicate entry {key}")));
                    }
                }
            }
        }

        let dim = dim.ok_or(Error::Config {
            line: 0,
            message: "missing `dim`".into(),
        })?;
        let name = name.unwrap_or_else(|| "unnamed".into());
        let build = |raw: &BTreeMap<(usize, usize), (usize, String)>,
                     symmetric: bool|
         -> Result<Vec<Vec<Expr>>> {
            let mut m = vec![vec![Expr::zero(); dim]; dim];
            let mut set = vec![vec![false; dim]; dim];
            for (&(i, j), (line, text)) in raw {
                if i == 0 || j == 0 || i > dim || j > dim {
                    return Err(Error::Config {
                        line: *line,
                        message: format!("index [{i}][{j}] outside 1..={dim}"),
                    });
                }
                let e = parse(text, dim).map_err(|e| Error::Config {
                    line: *line,
                    message: e.to_string(),
                })?;
                m[i - 1][j - 1] = e;
                set[i - 1][j - 1] = true;
            }
            if symmetric {
                for i in 0..dim {
                    for j in 0..dim {
                        if set[i][j] && !set[j][i] {
                            m[j][i] = m[i][j].clone();
                        } else if set[i][j] && set[j][i] && i < j && m[i][j] != m[j][i] {
                            return Err(Error::Config {
                                line: raw[&(i + 1, j + 1)].0,
                                message: format!(
                                    "g[{}][{}] and g[{}][{}] differ",
                                    i + 1,
                                    j + 1,
                                    j + 1,
                                    i + 1
                                ),
                            });
                        }
                    }
                }
            }
            Ok(m)
        };
        let metric = build(&g_raw, true)?;
        let structure = build(&j_raw, false)?;
        let chart = ChartManifold::new(name, dim, metric, structure)?;
        match samples {
            Some(s) => chart.with_samples(s),
            None => Ok(chart),
        }
    }

    /// Renders the chart back to the configuration format.
    pub fn to_config_string(&self) -> String {
        let mut out = format!("name = \"{}\"\ndim = {}\n", self.name, self.dim);
        for i in 0..self.dim {
            for j in i..self.dim {
                if !self.metric[i][j].is_zero() {
                    out.push_str(&format!("g[{}][{}] = \"{}\"\n", i + 1, j + 1, self.metric[i][j]));
                }
            }
        }
        for i in 0..self.dim {
            for j in 0..self.dim {
                if !self.structure[i][j].is_zero() {
                    out.push_str(&format!("J[{}][{}] = \"{}\"\n", i + 1, j + 1, self.structure[i][j]));
                }
            }
        }
        if !self.samples.is_empty() {
            out.push_str(&format!(
                "samples = {}\n",
                serde_json::to_string(&self.samples).expect("finite samples")
            ));
        }
        out
    }
}

fn strip_comment(line: &str) -> &str {
    let mut in_string = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => in_string = !in_string,
            '#' if !in_string => return &line[..i],
            _ => {}
        }
    }
    line
}

fn unquote(value: &str) -> std::result::Result<String, String> {
    value
        .strip_prefix('"')
        .and_then(|v| v.strip_suffix('"'))
        .filter(|v| !v.contains('"'))
        .map(str::to_string)
        .ok_or_else(|| format!("expected a double-quoted string, got {value}"))
}

fn parse_indexed_key(key: &str) -> std::result::Result<(char, usize, usize), String> {
    let table = match key.chars().next() {
        Some(c @ ('g' | 'J')) => c,
        _ => return Err(format!("unknown key {key:?}")),
    };
    let rest = &key[1..];
    let parts: Vec<&str> = rest
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .map(|r| r.split("][").collect())
        .unwrap_or_default();
    if parts.len() != 2 {
        return Err(format!("expected {table}[i][j], got {key:?}"));
    }
    let idx = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| format!("invalid index {s:?} in {key:?}"))
    };
    Ok((table, idx(parts[0])?, idx(parts[1])?))
}
