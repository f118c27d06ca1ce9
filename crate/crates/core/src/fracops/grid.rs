//! Functions sampled on the lattice `x/n`, constant outside their window.

use std::io::{Read, Write};

use super::FracOpsError;
use crate::Scalar;

/// Values at `u = x/n` for `x ∈ [lo, lo + len)`; equal to `exterior.0` left of the window and
/// `exterior.1` right of it.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction<T> {
    n: u64,
    lo: i64,
    values: Vec<T>,
    exterior: (T, T),
    label: String,
}

impl<T: Scalar> GridFunction<T> {
    pub fn new(n: u64, lo: i64, values: Vec<T>, exterior: (T, T)) -> Result<Self, FracOpsError> {
        if n == 0 || values.is_empty() {
            return Err(FracOpsError::Domain("grid needs n ≥ 1 and at least one value".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(FracOpsError::Domain(format!("non-finite value at site {}", lo + i as i64)));
        }
        if !exterior.0.is_finite() || !exterior.1.is_finite() {
            return Err(FracOpsError::Domain("non-finite exterior value".into()));
        }
        Ok(Self { n, lo, values, exterior, label: String::new() })
    }

    /// Samples `f` on sites `lo..hi`.
    pub fn sample(n: u64, lo: i64, hi: i64, f: impl Fn(T) -> T, exterior: (T, T)) -> Result<Self, FracOpsError> {
        let nn = T::of(n as f64);
        Self::new(n, lo, (lo..hi).map(|x| f(T::of(x as f64) / nn)).collect(), exterior)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn h(&self) -> T {
        T::one() / T::of(self.n as f64)
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// One past the last site.
    pub fn hi(&self) -> i64 {
        self.lo + self.values.len() as i64
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn exterior(&self) -> (T, T) {
        self.exterior
    }

    /// Value at site `x`, extended by the exterior constants.
    pub fn at(&self, x: i64) -> T {
        if x < self.lo {
            self.exterior.0
        } else if x >= self.hi() {
            self.exterior.1
        } else {
            self.values[(x - self.lo) as usize]
        }
    }

    pub fn coordinate(&self, x: i64) -> T {
        T::of(x as f64) / T::of(self.n as f64)
    }

    /// Pointwise map, exterior included.
    pub fn map(&self, f: impl Fn(T) -> T) -> Result<Self, FracOpsError> {
        Ok(Self::new(self.n, self.lo, self.values.iter().map(|v| f(*v)).collect(), (f(self.exterior.0), f(self.exterior.1)))?
            .with_label(self.label.clone()))
    }

    /// `(coordinate, value)` CSV; a leading `#` line carries `n`, the exterior values and the label.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), FracOpsError> {
        let mut out = out;
        writeln!(
            out,
            "# n={} exterior_left={} exterior_right={} label={}",
            self.n, self.exterior.0, self.exterior.1, self.label
        )
        .map_err(io)?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["u", "value"]).map_err(csv_err)?;
        for (i, v) in self.values.iter().enumerate() {
            w.write_record([self.coordinate(self.lo + i as i64).to_string(), v.to_string()]).map_err(csv_err)?;
        }
        w.flush().map_err(io)
    }

    /// Reads what [`write_csv`](Self::write_csv) writes. Without a header line, `n` is inferred from the spacing.
    pub fn read_csv<R: Read>(input: R) -> Result<Self, FracOpsError> {
        let mut text = String::new();
        let mut input = input;
        input.read_to_string(&mut text).map_err(io)?;
        let mut meta = (None, T::zero(), T::zero(), String::new());
        if let Some(line) = text.lines().next().and_then(|l| l.strip_prefix('#')) {
            let (head, label) = line.split_once("label=").unwrap_or((line, ""));
            meta.3 = label.trim().to_string();
            for kv in head.split_whitespace() {
                let parse = |v: &str| v.parse::<f64>().map_err(|e| FracOpsError::Domain(format!("{kv}: {e}")));
                match kv.split_once('=') {
                    Some(("n", v)) => meta.0 = Some(parse(v)? as u64),
                    Some(("exterior_left", v)) => meta.1 = T::of(parse(v)?),
                    Some(("exterior_right", v)) => meta.2 = T::of(parse(v)?),
                    _ => {}
                }
            }
        }
        let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let mut rows: Vec<(f64, f64)> = Vec::new();
        for rec in reader.deserialize() {
            rows.push(rec.map_err(csv_err)?);
        }
        if rows.is_empty() {
            return Err(FracOpsError::Domain("empty grid file".into()));
        }
        let n = match meta.0 {
            Some(n) => n,
            None if rows.len() >= 2 => (1.0 / (rows[1].0 - rows[0].0)).round() as u64,
            None => return Err(FracOpsError::Domain("cannot infer n from a single row".into())),
        };
        let lo = (rows[0].0 * n as f64).round() as i64;
        for (i, (u, _)) in rows.iter().enumerate() {
            if ((u * n as f64) - (lo + i as i64) as f64).abs() > 1e-6 {
                return Err(FracOpsError::Domain(format!("row {i}: coordinate {u} is off the 1/{n} lattice")));
            }
        }
        Ok(Self::new(n, lo, rows.iter().map(|r| T::of(r.1)).collect(), (meta.1, meta.2))?.with_label(meta.3))
    }
}

fn io(e: std::io::Error) -> FracOpsError {
    FracOpsError::Domain(format!("i/o: {e}"))
}

fn csv_err(e: csv::Error) -> FracOpsError {
    FracOpsError::Domain(format!("csv: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_roundtrip() {
        let g = GridFunction::<f64>::sample(8, -5, 7, |u| u * u - 0.125, (0.25, -1.5)).unwrap().with_label("q");
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        assert_eq!(GridFunction::<f64>::read_csv(buf.as_slice()).unwrap(), g);
        let bare = "u,value\n-0.5,1\n-0.25,2\n0,3\n";
        let h = GridFunction::<f64>::read_csv(bare.as_bytes()).unwrap();
        assert_eq!((h.n(), h.lo(), h.hi(), h.at(-1)), (4, -2, 1, 2.0));
        assert!(GridFunction::<f64>::read_csv("u,value\n0,1\n0.3,1\n0.5,1\n".as_bytes()).is_err());
    }

    #[test]
    fn rejects_non_finite() {
        assert!(GridFunction::new(4, 0, vec![1.0, f64::NAN], (0.0, 0.0)).is_err());
        let g = GridFunction::new(4, 0, vec![1.0f32, 2.0], (0.5, 3.0)).unwrap();
        assert_eq!((g.at(-1), g.at(0), g.at(2)), (0.5, 1.0, 3.0));
    }
}
