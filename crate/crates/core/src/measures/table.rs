//! Distributions given as tables: a CDF described by breakpoints, linearly
//! interpolated between them. Repeated x-values with increasing F encode
//! atoms; repeated F-values across distinct x encode gaps in the support.
//! All interpolation is exact rational arithmetic; rounding happens once, at
//! the requested output precision.

use super::{check_unit_interior, MeasureError, SemiInverseCdf};
use crate::dyadic::rational::{dyadic_to_rational, parse_rational, rational_to_enclosure};
use crate::dyadic::DyadicInterval;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::path::Path;

#[derive(Debug)]
pub struct TableCdf {
    id: String,
    xs: Vec<BigRational>,
    fs: Vec<BigRational>,
}

impl TableCdf {
    pub fn new(points: Vec<(BigRational, BigRational)>) -> Result<Self, MeasureError> {
        Self::with_id("table".to_string(), points)
    }

    pub fn with_id(
        id: String,
        points: Vec<(BigRational, BigRational)>,
    ) -> Result<Self, MeasureError> {
        let bad = |msg: String| Err(MeasureError::InvalidTable(msg));
        if points.len() < 2 {
            return bad(format!("need at least 2 breakpoints, got {}", points.len()));
        }
        if !points[0].1.is_zero() {
            return bad(format!("F must start at 0, got {} at breakpoint 0", points[0].1));
        }
        if !points[points.len() - 1].1.is_one() {
            return bad(format!(
                "F must end at 1, got {} at breakpoint {}",
                points[points.len() - 1].1,
                points.len() - 1
            ));
        }
        for (i, pair) in points.windows(2).enumerate() {
            let (x0, f0) = &pair[0];
            let (x1, f1) = &pair[1];
            if x1 < x0 {
                return bad(format!("x decreases at breakpoint {}: {} after {}", i + 1, x1, x0));
            }
            if f1 < f0 {
                return bad(format!("F decreases at breakpoint {}: {} after {}", i + 1, f1, f0));
            }
            if x0 == x1 && f0 == f1 {
                return bad(format!("breakpoint {} duplicates breakpoint {}", i + 1, i));
            }
        }
        let (xs, fs) = points.into_iter().unzip();
        Ok(TableCdf { id, xs, fs })
    }

    pub fn breakpoints(&self) -> impl Iterator<Item = (&BigRational, &BigRational)> {
        self.xs.iter().zip(self.fs.iter())
    }

    /// `inf { x : F(x) >= t }`, exactly, for rational t in (0,1).
    pub fn lower_rational(&self, t: &BigRational) -> BigRational {
        let i = self.fs.partition_point(|f| f < t);
        // fs[i] >= t > fs[i-1], and i >= 1 because F starts at 0 < t
        if self.fs[i] == *t {
            return self.xs[i].clone();
        }
        self.interpolate(i, t)
    }

    /// `inf { x : F(x) > t }`, exactly, for rational t in (0,1).
    pub fn upper_rational(&self, t: &BigRational) -> BigRational {
        let i = self.fs.partition_point(|f| f <= t);
        // fs[i] > t >= fs[i-1]
        if self.fs[i - 1] == *t {
            return self.xs[i - 1].clone();
        }
        self.interpolate(i, t)
    }

    /// Solve the segment (i-1, i) for the x where F crosses t; an atom
    /// (zero-width segment) yields its x directly.
    fn interpolate(&self, i: usize, t: &BigRational) -> BigRational {
        let dx = &self.xs[i] - &self.xs[i - 1];
        if dx.is_zero() {
            return self.xs[i].clone();
        }
        let df = &self.fs[i] - &self.fs[i - 1];
        &self.xs[i - 1] + (t - &self.fs[i - 1]) * dx / df
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self, MeasureError> {
        let text = std::fs::read_to_string(&path)?;
        let id = path
            .as_ref()
            .file_stem()
            .map(|s| format!("table:{}", s.to_string_lossy()))
            .unwrap_or_else(|| "table".to_string());
        Self::from_csv_str_with_id(id, &text)
    }

    pub fn from_csv_str(text: &str) -> Result<Self, MeasureError> {
        Self::from_csv_str_with_id("table".to_string(), text)
    }

    /// Parse the CSV form: optional `# key=value` metadata lines, a `x,F`
    /// header, then one `x,F` pair per line. Values may be decimals,
    /// fractions `p/q`, or dyadics `m*2^e`.
    pub fn from_csv_str_with_id(id: String, text: &str) -> Result<Self, MeasureError> {
        let mut points = Vec::new();
        let mut saw_header = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !saw_header {
                if line != "x,F" {
                    return Err(MeasureError::InvalidTable(format!(
                        "line {}: expected header \"x,F\", got {:?}",
                        lineno + 1,
                        line
                    )));
                }
                saw_header = true;
                continue;
            }
            let (xs, fs) = line.split_once(',').ok_or_else(|| {
                MeasureError::InvalidTable(format!("line {}: expected \"x,F\" pair", lineno + 1))
            })?;
            let parse = |s: &str| {
                parse_rational(s.trim()).map_err(|e| {
                    MeasureError::InvalidTable(format!("line {}: {}", lineno + 1, e))
                })
            };
            points.push((parse(xs)?, parse(fs)?));
        }
        if !saw_header {
            return Err(MeasureError::InvalidTable("missing \"x,F\" header".to_string()));
        }
        Self::with_id(id, points)
    }

    /// Render back to CSV; metadata pairs become leading `# key=value`
    /// lines. Values are written as exact fractions, so a round trip is
    /// lossless.
    pub fn to_csv_string(&self, metadata: &[(&str, String)]) -> String {
        let mut out = String::new();
        for (k, v) in metadata {
            out.push_str(&format!("# {k}={v}\n"));
        }
        out.push_str("x,F\n");
        for (x, f) in self.breakpoints() {
            out.push_str(&format!("{x},{f}\n"));
        }
        out
    }
}

impl SemiInverseCdf for TableCdf {
    fn id(&self) -> &str {
        &self.id
    }

    fn eval_lower(&self, t: &DyadicInterval, n: u32) -> Result<DyadicInterval, MeasureError> {
        check_unit_interior(t)?;
        let lo = self.lower_rational(&dyadic_to_rational(t.lo()));
        let hi = self.lower_rational(&dyadic_to_rational(t.hi()));
        Ok(rational_to_enclosure(&lo, n + 1).hull(&rational_to_enclosure(&hi, n + 1)))
    }

    fn eval_upper(&self, t: &DyadicInterval, n: u32) -> Result<DyadicInterval, MeasureError> {
        check_unit_interior(t)?;
        let lo = self.upper_rational(&dyadic_to_rational(t.lo()));
        let hi = self.upper_rational(&dyadic_to_rational(t.hi()));
        Ok(rational_to_enclosure(&lo, n + 1).hull(&rational_to_enclosure(&hi, n + 1)))
    }

    fn support_hint(&self) -> Option<DyadicInterval> {
        let lo = rational_to_enclosure(&self.xs[0], 64);
        let hi = rational_to_enclosure(&self.xs[self.xs.len() - 1], 64);
        Some(lo.hull(&hi))
    }
}
