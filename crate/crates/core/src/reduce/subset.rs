//! SUBSET-SUM to Hour-Glass, its decoder, and an independent DP oracle.

use thiserror::Error;

use crate::hourglass::{verify_path, HourglassInstance, HourglassPath, MAX_VALUE};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SubsetSumError {
    #[error("values must be positive")]
    NonPositive,
    #[error("value {0} exceeds the cap of 2^40")]
    TooLarge(u64),
    #[error("oracle guard exceeded: n * t = {0}")]
    Guard(u128),
    #[error("path does not verify against the reduced instance")]
    PathRejected,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Largest `t` the oracle tables, and largest `n * t` it will scan.
pub const ORACLE_MAX_TARGET: u64 = 1 << 28;
pub const ORACLE_MAX_WORK: u128 = 1 << 34;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetSumInstance {
    pub values: Vec<u64>,
    pub target: u64,
}

impl SubsetSumInstance {
    pub fn new(values: Vec<u64>, target: u64) -> Result<Self, SubsetSumError> {
        if values.contains(&0) {
            return Err(SubsetSumError::NonPositive);
        }
        if let Some(&v) = values.iter().find(|&&v| v > MAX_VALUE) {
            return Err(SubsetSumError::TooLarge(v));
        }
        Ok(Self { values, target })
    }

    /// First line holds the target, the rest the values, whitespace separated.
    pub fn parse(text: &str) -> Result<Self, SubsetSumError> {
        let mut nums = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("");
            for tok in line.split_whitespace() {
                nums.push(tok.parse::<u64>().map_err(|_| SubsetSumError::Parse {
                    line: i + 1,
                    message: format!("malformed number {tok:?}"),
                })?);
            }
        }
        let (&target, values) = nums.split_first().ok_or(SubsetSumError::Parse {
            line: 1,
            message: "missing target".into(),
        })?;
        Self::new(values.to_vec(), target)
    }

    pub fn render(&self) -> String {
        let vals: Vec<String> = self.values.iter().map(u64::to_string).collect();
        format!("{}\n{}\n", self.target, vals.join(" "))
    }

    pub fn sum_of(&self, subset: &[usize]) -> u64 {
        subset.iter().map(|&i| self.values[i - 1]).sum()
    }
}

/// Where each value went: value `i` (1-based) sits at `cells[i - 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetSumCertificate {
    pub original_len: usize,
    pub padded: bool,
    pub half_width: usize,
    pub target: u64,
    /// Source values, padding excluded.
    pub values: Vec<u64>,
    /// `(row, absolute column)` of each value, padding included.
    pub cells: Vec<(usize, usize)>,
}

impl SubsetSumCertificate {
    pub fn render(&self) -> String {
        let mut out = format!(
            "subsetsum\noriginal {}\npadded {}\nhalf_width {}\ntarget {}\n",
            self.original_len, self.padded, self.half_width, self.target
        );
        for (i, (r, a)) in self.cells.iter().enumerate() {
            let x = self.values.get(i).copied().unwrap_or(0);
            out.push_str(&format!("value {} row {r} acol {a} x {x}\n", i + 1));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, SubsetSumError> {
        let bad = |line: usize, m: &str| SubsetSumError::Parse {
            line,
            message: m.to_string(),
        };
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, l)) if l.trim() == "subsetsum" => {}
            _ => return Err(bad(1, "not a subset-sum manifest")),
        }
        let mut field = |key: &str| -> Result<String, SubsetSumError> {
            let (i, l) = lines.next().ok_or_else(|| bad(0, "truncated manifest"))?;
            l.trim()
                .strip_prefix(key)
                .map(|v| v.trim().to_string())
                .ok_or_else(|| bad(i + 1, &format!("expected {key}")))
        };
        let num = |s: String| s.parse::<usize>().map_err(|_| bad(0, "malformed number"));
        let original_len = num(field("original")?)?;
        let padded = field("padded")? == "true";
        let half_width = num(field("half_width")?)?;
        let target = field("target")?
            .parse::<u64>()
            .map_err(|_| bad(0, "malformed target"))?;
        let mut cells = Vec::new();
        let mut values = Vec::new();
        for (i, l) in lines {
            let t: Vec<&str> = l.split_whitespace().collect();
            match t[..] {
                ["value", _, "row", r, "acol", a, "x", x] => {
                    cells.push((
                        r.parse().map_err(|_| bad(i + 1, "malformed row"))?,
                        a.parse().map_err(|_| bad(i + 1, "malformed column"))?,
                    ));
                    values.push(x.parse().map_err(|_| bad(i + 1, "malformed value"))?);
                }
                _ => return Err(bad(i + 1, "expected value line")),
            }
        }
        values.truncate(original_len);
        if cells.len() != original_len + padded as usize {
            return Err(bad(0, "value count mismatch"));
        }
        Ok(Self {
            original_len,
            padded,
            half_width,
            target,
            values,
            cells,
        })
    }

    pub fn source(&self) -> Result<SubsetSumInstance, SubsetSumError> {
        SubsetSumInstance::new(self.values.clone(), self.target)
    }

    /// The reduced instance the certificate was issued for.
    pub fn instance(&self) -> Result<HourglassInstance, SubsetSumError> {
        Ok(subsetsum_to_hourglass(&self.source()?).0)
    }
}

/// Value `i` goes to absolute column `n - 1` of row `2i - 1`; every other
/// cell is 0. Odd `n` is padded with a 0 first.
pub fn subsetsum_to_hourglass(s: &SubsetSumInstance) -> (HourglassInstance, SubsetSumCertificate) {
    let mut values = s.values.clone();
    let padded = values.len() % 2 == 1;
    if padded {
        values.push(0);
    }
    let n = values.len().max(2);
    if values.is_empty() {
        values = vec![0, 0];
    }
    let mut inst = HourglassInstance::zeros(n, s.target);
    let mut rows: Vec<Vec<u64>> = inst.rows().to_vec();
    let mut cells = Vec::new();
    for (i, &x) in values.iter().enumerate() {
        let row = 2 * i + 1;
        let (_, j) = inst
            .at_acol(row, n - 1)
            .expect("column n-1 exists in odd rows");
        rows[row - 1][j - 1] = x;
        cells.push((row, n - 1));
    }
    cells.truncate(s.values.len() + padded as usize);
    inst = HourglassInstance::new(n, rows, s.target).expect("values within caps");
    let cert = SubsetSumCertificate {
        original_len: s.values.len(),
        padded,
        half_width: n,
        target: s.target,
        values: s.values.clone(),
        cells,
    };
    (inst, cert)
}

/// The path that takes value `i` exactly when `i` is in `subset`.
pub fn construct_path(cert: &SubsetSumCertificate, subset: &[usize]) -> HourglassPath {
    let n = cert.half_width;
    let shape = HourglassInstance::zeros(n, 0);
    let mut positions = Vec::new();
    for row in 1..2 * n {
        let acol = if row % 2 == 0 {
            n
        } else if subset.contains(&row.div_ceil(2)) {
            n - 1
        } else {
            n + 1
        };
        positions.push(shape.at_acol(row, acol).expect("cell exists").1);
    }
    HourglassPath::from_positions(&positions)
}

/// Indices whose value cell the path visits, padding dropped.
pub fn decode_hourglass_path(
    cert: &SubsetSumCertificate,
    inst: &HourglassInstance,
    path: &HourglassPath,
) -> Result<Vec<usize>, SubsetSumError> {
    if !verify_path(inst, path) {
        return Err(SubsetSumError::PathRejected);
    }
    Ok(cert
        .cells
        .iter()
        .enumerate()
        .filter(|&(i, &(row, acol))| {
            i < cert.original_len && inst.acol(path.cells[row - 1]) == acol
        })
        .map(|(i, _)| i + 1)
        .collect())
}

/// Reachable-sum table with the item that first reached each sum.
pub fn subset_sum_oracle(s: &SubsetSumInstance) -> Result<Option<Vec<usize>>, SubsetSumError> {
    let t = s.target;
    let work = s.values.len() as u128 * t as u128;
    if t > ORACLE_MAX_TARGET || work > ORACLE_MAX_WORK {
        return Err(SubsetSumError::Guard(work));
    }
    let t = t as usize;
    const NONE: u32 = u32::MAX;
    let mut by = vec![NONE; t + 1];
    let mut reach = vec![false; t + 1];
    reach[0] = true;
    for (i, &x) in s.values.iter().enumerate() {
        let x = x as usize;
        if x > t {
            continue;
        }
        for sum in (x..=t).rev() {
            if !reach[sum] && reach[sum - x] {
                reach[sum] = true;
                by[sum] = i as u32;
            }
        }
    }
    if !reach[t] {
        return Ok(None);
    }
    let mut subset = Vec::new();
    let mut sum = t;
    while sum > 0 {
        let i = by[sum] as usize;
        subset.push(i + 1);
        sum -= s.values[i] as usize;
    }
    subset.sort_unstable();
    Ok(Some(subset))
}
