//! Evaluation rows shared by `eval` and `sweep`.
//!
//! CSV schema: `predictor,nq_low,nq_high,band,metric,m,sigma`. `metric` is
//! `Gp` (prediction gain), `SEG` (segmental SNR) or `BPS` (equivalent
//! bits/sample, emitted by sweeps with predictor `-`).

use rayon::prelude::*;

use crate::adpcm::{CodecConfig, PredictorKind};
use crate::error::{Error, Result};
use crate::metrics::{prediction_gain, segsnr, SegmentalReport};
use crate::qmf::{analyze, QmfBank};
use crate::quantizer::{MAX_BITS, MIN_BITS};
use crate::scalar::Real;
use crate::signal::AudioBuffer;
use crate::subband::{bit_rate, encode_detailed};

pub const CSV_HEADER: &str = "predictor,nq_low,nq_high,band,metric,m,sigma";

#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub predictor: String,
    pub nq_low: u8,
    pub nq_high: u8,
    /// `L`, `H` or `F`.
    pub band: String,
    pub metric: String,
    pub mean: f64,
    pub std: f64,
}

impl MetricRow {
    fn new(cfg_kind: &str, nq: (u8, u8), band: &str, metric: &str, report: Result<SegmentalReport>) -> Result<Self> {
        let (mean, std) = match report {
            Ok(r) => (r.mean, r.std),
            Err(Error::NoFrames) => (f64::NAN, f64::NAN),
            Err(e) => return Err(e),
        };
        Ok(Self {
            predictor: cfg_kind.to_string(),
            nq_low: nq.0,
            nq_high: nq.1,
            band: band.to_string(),
            metric: metric.to_string(),
            mean,
            std,
        })
    }

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{:.4},{:.4}",
            self.predictor, self.nq_low, self.nq_high, self.band, self.metric, self.mean, self.std
        )
    }

    pub fn parse_csv(text: &str) -> Result<Vec<Self>> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        match lines.next() {
            Some(h) if h.trim() == CSV_HEADER => {}
            _ => return Err(Error::Config("missing CSV header".into())),
        }
        lines
            .map(|line| {
                let f: Vec<&str> = line.split(',').map(str::trim).collect();
                if f.len() != 7 {
                    return Err(Error::Config(format!("bad CSV row {line:?}")));
                }
                let num = |s: &str| -> Result<f64> {
                    s.parse().map_err(|_| Error::Config(format!("bad number {s:?}")))
                };
                let bits = |s: &str| -> Result<u8> {
                    s.parse().map_err(|_| Error::Config(format!("bad bit depth {s:?}")))
                };
                Ok(Self {
                    predictor: f[0].to_string(),
                    nq_low: bits(f[1])?,
                    nq_high: bits(f[2])?,
                    band: f[3].to_string(),
                    metric: f[4].to_string(),
                    mean: num(f[5])?,
                    std: num(f[6])?,
                })
            })
            .collect()
    }
}

pub fn to_csv(rows: &[MetricRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r.to_csv());
        s.push('\n');
    }
    s
}

/// Full-band frames cover the same time span as band frames.
pub fn full_band_frame<T: Real>(cfg: &CodecConfig<T>) -> usize {
    2 * cfg.frame_length
}

/// Runs the encoder and reports G_p (L, H) and SEGSNR (L, H, F).
///
/// Band metrics use the analysis outputs as reference and the encoder's local
/// reconstruction as test signal; the full band compares the delay-compensated
/// synthesized output with the input.
pub fn evaluate_internal<T: Real>(
    x: &AudioBuffer<T>,
    cfg: &CodecConfig<T>,
    bank: &QmfBank<T>,
) -> Result<Vec<MetricRow>> {
    let enc = encode_detailed(x, cfg, bank)?;
    let name = cfg.predictor.name();
    let nq = (cfg.nq_low, cfg.nq_high);
    let fl = cfg.frame_length;
    Ok(vec![
        MetricRow::new(name, nq, "L", "Gp", prediction_gain(&enc.low_reference.samples, &enc.low.residual, fl))?,
        MetricRow::new(name, nq, "H", "Gp", prediction_gain(&enc.high_reference.samples, &enc.high.residual, fl))?,
        MetricRow::new(name, nq, "L", "SEG", segsnr(&enc.low_reference.samples, &enc.low.reconstruction, fl))?,
        MetricRow::new(name, nq, "H", "SEG", segsnr(&enc.high_reference.samples, &enc.high.reconstruction, fl))?,
        MetricRow::new(name, nq, "F", "SEG", segsnr(&x.samples, &enc.output.samples, full_band_frame(cfg)))?,
    ])
}

/// SEGSNR rows for an original and an already delay-compensated decoding.
///
/// Band rows compare the analysis outputs of both signals.
pub fn evaluate_pair<T: Real>(
    original: &AudioBuffer<T>,
    decoded: &AudioBuffer<T>,
    cfg: &CodecConfig<T>,
    bank: &QmfBank<T>,
) -> Result<Vec<MetricRow>> {
    if original.len() != decoded.len() {
        return Err(Error::LengthMismatch {
            left: original.len(),
            right: decoded.len(),
        });
    }
    let (ol, oh) = analyze(original, bank)?;
    let (dl, dh) = analyze(decoded, bank)?;
    let name = cfg.predictor.name();
    let nq = (cfg.nq_low, cfg.nq_high);
    let fl = cfg.frame_length;
    Ok(vec![
        MetricRow::new(name, nq, "L", "SEG", segsnr(&ol.samples, &dl.samples, fl))?,
        MetricRow::new(name, nq, "H", "SEG", segsnr(&oh.samples, &dh.samples, fl))?,
        MetricRow::new(name, nq, "F", "SEG", segsnr(&original.samples, &decoded.samples, full_band_frame(cfg)))?,
    ])
}

/// Every `(nq_low, nq_high)` cell for every requested predictor, plus the
/// bit-rate grid. Rows are sorted by predictor, nq_low, nq_high.
pub fn sweep<T: Real>(
    x: &AudioBuffer<T>,
    predictors: &[PredictorKind],
    base: &CodecConfig<T>,
    bank: &QmfBank<T>,
) -> Result<Vec<MetricRow>> {
    let cells: Vec<(PredictorKind, u8, u8)> = predictors
        .iter()
        .flat_map(|&p| {
            (MIN_BITS..=MAX_BITS).flat_map(move |l| (MIN_BITS..=MAX_BITS).map(move |h| (p, l, h)))
        })
        .collect();
    let results: Vec<Result<Vec<MetricRow>>> = cells
        .par_iter()
        .map(|&(predictor, nq_low, nq_high)| {
            let cfg = CodecConfig {
                predictor,
                nq_low,
                nq_high,
                ..base.clone()
            };
            evaluate_internal(x, &cfg, bank)
        })
        .collect();
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    rows.extend(bit_rate_rows());
    Ok(rows)
}

pub fn bit_rate_rows() -> Vec<MetricRow> {
    let mut rows = Vec::new();
    for l in MIN_BITS..=MAX_BITS {
        for h in MIN_BITS..=MAX_BITS {
            let rate = bit_rate(l, h).expect("grid bit depths are valid");
            rows.push(MetricRow {
                predictor: "-".into(),
                nq_low: l,
                nq_high: h,
                band: "F".into(),
                metric: "BPS".into(),
                mean: rate.bits_per_sample,
                std: 0.0,
            });
        }
    }
    rows
}

/// 4×4 grid `[nq_low - 2][nq_high - 2]` of one metric; NaN where absent.
pub fn grid(rows: &[MetricRow], predictor: &str, band: &str, metric: &str) -> [[f64; 4]; 4] {
    let mut g = [[f64::NAN; 4]; 4];
    for r in rows {
        if r.predictor == predictor && r.band == band && r.metric == metric {
            g[usize::from(r.nq_low - MIN_BITS)][usize::from(r.nq_high - MIN_BITS)] = r.mean;
        }
    }
    g
}
