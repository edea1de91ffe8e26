//! Jayant adaptive midrise quantizer.
//!
//! After every sample the step is multiplied by a factor chosen by the
//! magnitude of the code just emitted, then clamped to `[step_min, step_max]`.
//! Encoder and decoder apply the same rule to the same codes, so their step
//! trajectories stay identical.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub const MIN_BITS: u8 = 2;
pub const MAX_BITS: u8 = 5;

pub const DEFAULT_STEP_MIN: f64 = 1e-3;
pub const DEFAULT_STEP_MAX: f64 = 32_768.0;
pub const DEFAULT_INITIAL_STEP: f64 = 16.0;

const DEFAULT_MULTIPLIERS: [&[f64]; 4] = [
    &[0.8, 1.6],
    &[0.9, 0.9, 1.25, 1.75],
    &[0.9, 0.9, 0.9, 0.9, 1.2, 1.6, 2.0, 2.4],
    &[
        0.9, 0.9, 0.9, 0.9, 0.9, 0.9, 0.9, 0.9, 1.2, 1.4, 1.6, 1.8, 2.0, 2.2, 2.4, 2.6,
    ],
];

pub fn check_bits(nq: u8) -> Result<()> {
    if (MIN_BITS..=MAX_BITS).contains(&nq) {
        Ok(())
    } else {
        Err(Error::BitDepth(nq))
    }
}

/// `2^(nq-1)`: number of positive (and of negative) reconstruction levels.
pub fn half_levels(nq: u8) -> i32 {
    1 << (nq - 1)
}

/// Index into the multiplier table; the two innermost codes share index 0.
pub fn magnitude_index(code: i32) -> usize {
    if code >= 0 {
        code as usize
    } else {
        (-(code + 1)) as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantizerSpec<T> {
    nq: u8,
    multipliers: Vec<T>,
    step_min: T,
    step_max: T,
}

impl<T: Real> QuantizerSpec<T> {
    pub fn new(nq: u8, multipliers: Vec<T>, step_min: T, step_max: T) -> Result<Self> {
        check_bits(nq)?;
        let expected = half_levels(nq) as usize;
        if multipliers.len() != expected {
            return Err(Error::QuantizerTable(format!(
                "{nq}-bit table needs {expected} multipliers, got {}",
                multipliers.len()
            )));
        }
        if multipliers.iter().any(|m| !(*m > T::zero()) || !m.is_finite()) {
            return Err(Error::QuantizerTable(format!(
                "{nq}-bit table has a non-positive multiplier"
            )));
        }
        if !(step_min > T::zero() && step_min < step_max) || !step_max.is_finite() {
            return Err(Error::QuantizerTable(
                "step bounds must satisfy 0 < step_min < step_max".into(),
            ));
        }
        Ok(Self {
            nq,
            multipliers,
            step_min,
            step_max,
        })
    }

    /// Shipped multiplier table for `nq` with the default step bounds.
    pub fn default_for(nq: u8) -> Result<Self> {
        QuantizerTables::default().spec(nq)
    }

    pub fn nq(&self) -> u8 {
        self.nq
    }

    pub fn multipliers(&self) -> &[T] {
        &self.multipliers
    }

    pub fn step_min(&self) -> T {
        self.step_min
    }

    pub fn step_max(&self) -> T {
        self.step_max
    }

    pub fn code_range(&self) -> (i32, i32) {
        let half = half_levels(self.nq);
        (-half, half - 1)
    }

    pub fn check_code(&self, code: i32) -> Result<()> {
        let (lo, hi) = self.code_range();
        if (lo..=hi).contains(&code) {
            Ok(())
        } else {
            Err(Error::CodeRange { code, nq: self.nq })
        }
    }

    fn next_step(&self, step: T, code: i32) -> T {
        let m = self.multipliers[magnitude_index(code)];
        (step * m).max(self.step_min).min(self.step_max)
    }
}

/// Quantizer step state. Cheap to clone; the spec is shared.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizerState<T> {
    spec: Arc<QuantizerSpec<T>>,
    step: T,
}

impl<T: Real> QuantizerState<T> {
    /// Starts at `initial_step`, clamped into the spec's bounds.
    pub fn new(spec: Arc<QuantizerSpec<T>>, initial_step: T) -> Self {
        let step = initial_step.max(spec.step_min).min(spec.step_max);
        Self { spec, step }
    }

    pub fn with_default_step(spec: Arc<QuantizerSpec<T>>) -> Self {
        Self::new(spec, T::lit(DEFAULT_INITIAL_STEP))
    }

    pub fn spec(&self) -> &QuantizerSpec<T> {
        &self.spec
    }

    pub fn step(&self) -> T {
        self.step
    }

    /// Midrise reconstruction `(code + 1/2)·Δ` at the current step.
    pub fn reconstruct(&self, code: i32) -> T {
        (T::lit(f64::from(code)) + T::lit(0.5)) * self.step
    }

    /// Code for `d` at the current step (saturating).
    pub fn classify(&self, d: T) -> i32 {
        let (lo, hi) = self.spec.code_range();
        let q = (d / self.step).floor();
        if q.is_nan() {
            return 0;
        }
        let q = q.max(T::lit(f64::from(lo))).min(T::lit(f64::from(hi)));
        q.to_i32().expect("clamped code fits i32")
    }

    /// Quantizes `d`, returning `(code, d_hat, next_state)`.
    pub fn quantize(&self, d: T) -> (i32, T, Self) {
        let mut next = self.clone();
        let (code, value) = next.encode(d);
        (code, value, next)
    }

    /// Decoder side of [`quantize`](Self::quantize); rejects out-of-range codes.
    pub fn dequantize(&self, code: i32) -> Result<(T, Self)> {
        let mut next = self.clone();
        let value = next.decode(code)?;
        Ok((value, next))
    }

    /// In-place form of [`quantize`](Self::quantize).
    pub fn encode(&mut self, d: T) -> (i32, T) {
        let code = self.classify(d);
        let value = self.reconstruct(code);
        self.step = self.spec.next_step(self.step, code);
        (code, value)
    }

    /// In-place form of [`dequantize`](Self::dequantize).
    pub fn decode(&mut self, code: i32) -> Result<T> {
        self.spec.check_code(code)?;
        let value = self.reconstruct(code);
        self.step = self.spec.next_step(self.step, code);
        Ok(value)
    }
}

/// Multiplier tables for every bit depth, plus shared step bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizerTables<T> {
    tables: [Vec<T>; 4],
    pub step_min: T,
    pub step_max: T,
    pub initial_step: T,
}

impl<T: Real> Default for QuantizerTables<T> {
    fn default() -> Self {
        let conv = |t: &[f64]| t.iter().map(|&v| T::lit(v)).collect::<Vec<T>>();
        Self {
            tables: [
                conv(DEFAULT_MULTIPLIERS[0]),
                conv(DEFAULT_MULTIPLIERS[1]),
                conv(DEFAULT_MULTIPLIERS[2]),
                conv(DEFAULT_MULTIPLIERS[3]),
            ],
            step_min: T::lit(DEFAULT_STEP_MIN),
            step_max: T::lit(DEFAULT_STEP_MAX),
            initial_step: T::lit(DEFAULT_INITIAL_STEP),
        }
    }
}

impl<T: Real> QuantizerTables<T> {
    pub fn multipliers(&self, nq: u8) -> Result<&[T]> {
        check_bits(nq)?;
        Ok(&self.tables[usize::from(nq - MIN_BITS)])
    }

    pub fn spec(&self, nq: u8) -> Result<QuantizerSpec<T>> {
        QuantizerSpec::new(
            nq,
            self.multipliers(nq)?.to_vec(),
            self.step_min,
            self.step_max,
        )
    }

    pub fn set_table(&mut self, nq: u8, multipliers: Vec<T>) -> Result<()> {
        QuantizerSpec::new(nq, multipliers.clone(), self.step_min, self.step_max)?;
        self.tables[usize::from(nq - MIN_BITS)] = multipliers;
        Ok(())
    }

    /// Parses the plain-text table format.
    ///
    /// ```text
    /// # comment
    /// 2: 0.8 1.6
    /// 3: 0.9 0.9 1.25 1.75
    /// step_min: 0.001
    /// step_max: 32768
    /// initial_step: 16
    /// ```
    ///
    /// Bit depths that are not listed keep their default table.
    pub fn parse(text: &str) -> Result<Self> {
        let mut out = Self::default();
        let mut pending = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, rest) = line.split_once(':').ok_or_else(|| {
                Error::QuantizerTable(format!("line {}: expected `key: values`", lineno + 1))
            })?;
            let values = rest
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<f64>().map_err(|e| {
                        Error::QuantizerTable(format!("line {}: {s:?}: {e}", lineno + 1))
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            let scalar = |values: &[f64]| -> Result<T> {
                match values {
                    [v] => Ok(T::lit(*v)),
                    _ => Err(Error::QuantizerTable(format!(
                        "line {}: expected one value",
                        lineno + 1
                    ))),
                }
            };
            match key.trim() {
                "step_min" => out.step_min = scalar(&values)?,
                "step_max" => out.step_max = scalar(&values)?,
                "initial_step" => out.initial_step = scalar(&values)?,
                k => {
                    let nq: u8 = k.parse().map_err(|_| {
                        Error::QuantizerTable(format!("line {}: unknown key {k:?}", lineno + 1))
                    })?;
                    check_bits(nq)?;
                    pending.push((nq, values.into_iter().map(T::lit).collect()));
                }
            }
        }
        for (nq, table) in pending {
            out.set_table(nq, table)?;
        }
        for nq in MIN_BITS..=MAX_BITS {
            out.spec(nq)?;
        }
        Ok(out)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for nq in MIN_BITS..=MAX_BITS {
            let vals: Vec<String> = self.tables[usize::from(nq - MIN_BITS)]
                .iter()
                .map(|v| format!("{}", v.to_f64_lossy()))
                .collect();
            s.push_str(&format!("{nq}: {}\n", vals.join(" ")));
        }
        s.push_str(&format!("step_min: {}\n", self.step_min.to_f64_lossy()));
        s.push_str(&format!("step_max: {}\n", self.step_max.to_f64_lossy()));
        s.push_str(&format!(
            "initial_step: {}\n",
            self.initial_step.to_f64_lossy()
        ));
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(nq: u8, step: f64) -> QuantizerState<f64> {
        QuantizerState::new(Arc::new(QuantizerSpec::default_for(nq).unwrap()), step)
    }

    #[test]
    fn midrise_examples() {
        let q = state(2, 1.0);
        let (c, v, _) = q.quantize(0.3);
        assert_eq!((c, v), (0, 0.5));
        let (c, v, _) = q.quantize(-0.3);
        assert_eq!((c, v), (-1, -0.5));
        let (c, v, _) = q.quantize(100.0);
        assert_eq!((c, v), (1, 1.5));
        let (c, v, _) = q.quantize(-100.0);
        assert_eq!((c, v), (-2, -1.5));
    }

    #[test]
    fn dequantize_step_update() {
        let q = state(3, 2.0);
        let (v, next) = q.dequantize(0).unwrap();
        assert_eq!(v, 1.0);
        assert_eq!(next.step(), 2.0 * 0.9);
        let (v, next) = q.dequantize(-4).unwrap();
        assert_eq!(v, -7.0);
        assert_eq!(next.step(), 2.0 * 1.75);
    }

    #[test]
    fn inner_codes_share_index() {
        assert_eq!(magnitude_index(0), 0);
        assert_eq!(magnitude_index(-1), 0);
        assert_eq!(magnitude_index(3), 3);
        assert_eq!(magnitude_index(-4), 3);
        assert_eq!(magnitude_index(-16), 15);
    }

    #[test]
    fn out_of_range_code_rejected() {
        let q = state(3, 1.0);
        assert_eq!(
            q.dequantize(4).unwrap_err(),
            Error::CodeRange { code: 4, nq: 3 }
        );
        assert!(q.dequantize(-5).is_err());
    }

    #[test]
    fn step_clamped_at_bounds() {
        let mut q = state(2, 1.0);
        for _ in 0..1000 {
            q.encode(1e9);
        }
        assert_eq!(q.step(), DEFAULT_STEP_MAX);
        for _ in 0..100_000 {
            q.encode(0.0);
        }
        assert_eq!(q.step(), DEFAULT_STEP_MIN);
    }

    #[test]
    fn shipped_tables_shrink_inside_grow_outside() {
        let t = QuantizerTables::<f64>::default();
        for nq in MIN_BITS..=MAX_BITS {
            let m = t.multipliers(nq).unwrap();
            assert_eq!(m.len(), half_levels(nq) as usize);
            assert!(m[0] < 1.0);
            assert!(*m.last().unwrap() > 1.0);
        }
    }

    #[test]
    fn spec_validation() {
        assert_eq!(
            QuantizerSpec::<f64>::default_for(6).unwrap_err(),
            Error::BitDepth(6)
        );
        assert!(QuantizerSpec::new(2, vec![0.8], 1e-3, 1.0).is_err());
        assert!(QuantizerSpec::new(2, vec![0.8, -1.0], 1e-3, 1.0).is_err());
        assert!(QuantizerSpec::new(2, vec![0.8, 1.6], 1.0, 1.0).is_err());
    }

    #[test]
    fn text_tables_round_trip_and_override() {
        let t = QuantizerTables::<f64>::default();
        assert_eq!(QuantizerTables::<f64>::parse(&t.to_text()).unwrap(), t);
        let custom = QuantizerTables::<f64>::parse("# custom\n2: 0.7, 1.8\nstep_min: 0.01\n").unwrap();
        assert_eq!(custom.multipliers(2).unwrap(), &[0.7, 1.8]);
        assert_eq!(custom.step_min, 0.01);
        assert_eq!(custom.multipliers(3).unwrap(), t.multipliers(3).unwrap());
        assert!(QuantizerTables::<f64>::parse("2: 0.7\n").is_err());
        assert!(QuantizerTables::<f64>::parse("7: 1 2\n").is_err());
        assert!(QuantizerTables::<f64>::parse("garbage\n").is_err());
    }
}
