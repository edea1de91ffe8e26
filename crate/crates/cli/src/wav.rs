use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};
use sbadpcm::signal::AudioBuffer;

use crate::error::{CliError, CliResult};

fn open_error(path: &Path, e: hound::Error) -> CliError {
    match e {
        hound::Error::IoError(io) => CliError::io(path, io),
        other => CliError::format(path, other.to_string()),
    }
}

/// Reads a 16-bit PCM mono WAV, optionally insisting on a sample rate.
pub fn read(path: &Path, rates: &[u32]) -> CliResult<AudioBuffer<f64>> {
    let reader = WavReader::open(path).map_err(|e| open_error(path, e))?;
    let spec = reader.spec();
    if spec.channels != 1 {
        return Err(CliError::format(path, format!("expected mono, got {} channels", spec.channels)));
    }
    if spec.sample_format != SampleFormat::Int || spec.bits_per_sample != 16 {
        return Err(CliError::format(
            path,
            format!("expected 16-bit integer PCM, got {} bits {:?}", spec.bits_per_sample, spec.sample_format),
        ));
    }
    if !rates.contains(&spec.sample_rate) {
        return Err(CliError::format(
            path,
            format!("expected sample rate {rates:?} Hz, got {} Hz", spec.sample_rate),
        ));
    }
    let pcm = reader
        .into_samples::<i16>()
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| open_error(path, e))?;
    if pcm.is_empty() {
        return Err(CliError::format(path, "no samples"));
    }
    Ok(AudioBuffer::from_i16(&pcm, spec.sample_rate))
}

pub fn write(path: &Path, audio: &AudioBuffer<f64>) -> CliResult<()> {
    let spec = WavSpec {
        channels: 1,
        sample_rate: audio.sample_rate,
        bits_per_sample: 16,
        sample_format: SampleFormat::Int,
    };
    let mut w = WavWriter::create(path, spec).map_err(|e| open_error(path, e))?;
    for s in audio.to_i16() {
        w.write_sample(s).map_err(|e| open_error(path, e))?;
    }
    w.finalize().map_err(|e| open_error(path, e))
}
