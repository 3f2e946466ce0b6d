//! Mono WAV input and output.

use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};

use crate::error::{Error, Result};

fn wav_err(path: &Path) -> impl FnOnce(hound::Error) -> Error + '_ {
    move |source| Error::Wav {
        path: path.to_path_buf(),
        source,
    }
}

/// Read a mono file as samples in `[-1, 1]` and its sample rate.
///
/// Integer PCM is scaled by its full-scale value; float files are passed through.
pub fn read_wav(path: &Path) -> Result<(Vec<f64>, f64)> {
    let mut reader = WavReader::open(path).map_err(wav_err(path))?;
    let spec = reader.spec();
    if spec.channels != 1 {
        return Err(Error::Config(format!(
            "{}: expected a mono file, found {} channels",
            path.display(),
            spec.channels
        )));
    }
    let samples = match spec.sample_format {
        SampleFormat::Float => reader
            .samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<std::result::Result<Vec<_>, _>>(),
        SampleFormat::Int => {
            let full = (1i64 << (spec.bits_per_sample - 1)) as f64;
            reader
                .samples::<i32>()
                .map(|s| s.map(|v| v as f64 / full))
                .collect()
        }
    }
    .map_err(wav_err(path))?;
    Ok((samples, spec.sample_rate as f64))
}

/// Write mono 32-bit float samples.
pub fn write_wav(path: &Path, samples: &[f64], sample_rate: f64) -> Result<()> {
    let spec = WavSpec {
        channels: 1,
        sample_rate: sample_rate.round() as u32,
        bits_per_sample: 32,
        sample_format: SampleFormat::Float,
    };
    let mut writer = WavWriter::create(path, spec).map_err(wav_err(path))?;
    for &s in samples {
        writer.write_sample(s as f32).map_err(wav_err(path))?;
    }
    writer.finalize().map_err(wav_err(path))
}
