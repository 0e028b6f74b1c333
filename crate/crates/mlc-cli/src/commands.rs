//! Implementations behind the CLI subcommands.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use mlc_core::solver::ModelSpec;
use mlc_core::{
    compression_ratio, decode_container, encode_container_with_stats, itu_downmix_5to2, measure,
    read_wav, write_wav, ChannelLayout, MeasureParams, MixConfig, MixPair, ModelKind, SampleBlock,
};
use rayon::prelude::*;

use crate::corpus::{generate_corpus, CorpusParams};
use crate::report::BenchReport;

/// Command failures split by exit code: usage errors exit 2, data errors 1.
#[derive(Debug)]
pub enum CmdError {
    Usage(String),
    Data(String),
}

impl fmt::Display for CmdError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CmdError::Usage(msg) => write!(f, "usage error: {msg}"),
            CmdError::Data(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<mlc_core::Error> for CmdError {
    fn from(e: mlc_core::Error) -> CmdError {
        CmdError::Data(e.to_string())
    }
}

impl CmdError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CmdError::Usage(_) => 2,
            CmdError::Data(_) => 1,
        }
    }
}

pub type CmdResult = Result<(), CmdError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DownmixSource {
    Itu,
    File,
}

#[derive(Debug, Clone, Copy)]
pub struct EncodeOptions {
    pub model: ModelKind,
    pub svd: bool,
    pub order: usize,
    pub delta: f64,
    pub frame: usize,
    pub hierarchical: Option<DownmixSource>,
}

fn build_model(kind: ModelKind, order: usize, delta: f64, d: usize) -> Result<ModelSpec, CmdError> {
    let spec = match kind {
        ModelKind::Sep => ModelSpec::new(ModelKind::Sep, order, 0, 0.0),
        ModelKind::Joint => ModelSpec::new(ModelKind::Joint, order, 0, delta),
        ModelKind::SepDmx => ModelSpec::new(ModelKind::SepDmx, order, d, delta),
        ModelKind::JointDmx => ModelSpec::new(ModelKind::JointDmx, order, d, delta),
    };
    spec.map_err(|e| CmdError::Usage(e.to_string()))
}

pub fn cmd_encode(inputs: &[PathBuf], output: &Path, opts: &EncodeOptions) -> CmdResult {
    if opts.model.uses_downmix() && opts.hierarchical.is_none() {
        return Err(CmdError::Usage(
            "downmix-predicted models need --hierarchical".into(),
        ));
    }
    let want_inputs = match opts.hierarchical {
        Some(DownmixSource::File) => 2,
        _ => 1,
    };
    if inputs.len() != want_inputs {
        return Err(CmdError::Usage(format!(
            "expected {want_inputs} input file(s), got {}",
            inputs.len()
        )));
    }

    let mixes: Vec<SampleBlock> = match opts.hierarchical {
        None => {
            let (_, block) = read_wav(&inputs[0])?;
            vec![block]
        }
        Some(DownmixSource::Itu) => {
            let (_, upmix) = read_wav(&inputs[0])?;
            if upmix.layout() != Some(ChannelLayout::Surround5_0) {
                return Err(CmdError::Data(format!(
                    "--hierarchical itu needs 5.0/5.1 input, {} has {} channels",
                    inputs[0].display(),
                    upmix.channels()
                )));
            }
            let downmix = itu_downmix_5to2(&upmix)?;
            vec![downmix, upmix]
        }
        Some(DownmixSource::File) => {
            let (_, downmix) = read_wav(&inputs[0])?;
            let (_, upmix) = read_wav(&inputs[1])?;
            vec![downmix, upmix]
        }
    };

    let configs: Vec<MixConfig> = if mixes.len() == 2 {
        let d = mixes[0].channels();
        let upmix_model = build_model(opts.model, opts.order, opts.delta, if opts.model.uses_downmix() { d } else { 0 })?;
        vec![
            MixConfig::new(ModelSpec::sep(opts.order), false),
            MixConfig::new(upmix_model, opts.svd),
        ]
    } else {
        let model = build_model(opts.model, opts.order, opts.delta, 0)?;
        vec![MixConfig::new(model, opts.svd)]
    };

    let refs: Vec<&SampleBlock> = mixes.iter().collect();
    let (bytes, stats) = encode_container_with_stats(&refs, &configs, opts.frame)?;
    fs::write(output, &bytes).map_err(|e| CmdError::Data(e.to_string()))?;

    for (i, mix) in mixes.iter().enumerate() {
        if mix.is_empty() {
            continue;
        }
        let ratio = compression_ratio(stats.mix_bits[i], mix)?;
        println!("mix {i} ({} ch): ratio {ratio:.4}", mix.channels());
    }
    let raw: u64 = mixes.iter().map(|m| m.raw_bits()).sum();
    if raw > 0 {
        println!(
            "total: {} bytes, ratio {:.4}",
            bytes.len(),
            stats.total_bits() as f64 / raw as f64
        );
    } else {
        println!("total: {} bytes (empty input)", bytes.len());
    }
    Ok(())
}

pub fn cmd_decode(stream: &Path, outputs: &[PathBuf]) -> CmdResult {
    let bytes = fs::read(stream).map_err(|e| CmdError::Data(e.to_string()))?;
    let (header, mixes) = decode_container(&bytes)?;
    if outputs.len() != mixes.len() {
        return Err(CmdError::Usage(format!(
            "stream holds {} mix(es), got {} output path(s)",
            mixes.len(),
            outputs.len()
        )));
    }
    for (path, mix) in outputs.iter().zip(&mixes) {
        write_wav(path, mix)?;
        println!(
            "wrote {} ({} ch, {} samples @ {} Hz)",
            path.display(),
            mix.channels(),
            mix.len(),
            header.sample_rate
        );
    }
    Ok(())
}

pub fn cmd_verify(originals: &[PathBuf], stream: &Path) -> CmdResult {
    let bytes = fs::read(stream).map_err(|e| CmdError::Data(e.to_string()))?;
    let (_, mixes) = decode_container(&bytes)?;
    if originals.len() != mixes.len() {
        return Err(CmdError::Usage(format!(
            "stream holds {} mix(es), got {} original(s)",
            mixes.len(),
            originals.len()
        )));
    }
    for (i, (path, decoded)) in originals.iter().zip(&mixes).enumerate() {
        let (_, original) = read_wav(path)?;
        if original.channels() != decoded.channels() || original.len() != decoded.len() {
            return Err(CmdError::Data(format!(
                "mix {i}: {} is {}x{}, stream has {}x{}",
                path.display(),
                original.channels(),
                original.len(),
                decoded.channels(),
                decoded.len()
            )));
        }
        for c in 0..original.channels() {
            for t in 0..original.len() {
                if original.sample(c, t) != decoded.sample(c, t) {
                    return Err(CmdError::Data(format!(
                        "mix {i} differs first at channel {c}, sample {t}: {} != {}",
                        original.sample(c, t),
                        decoded.sample(c, t)
                    )));
                }
            }
        }
    }
    println!("ok: {} mix(es) identical", mixes.len());
    Ok(())
}

fn corpus_wavs(dir: &Path) -> Result<Vec<PathBuf>, CmdError> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| CmdError::Data(format!("{}: {e}", dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .is_some_and(|ext| ext.eq_ignore_ascii_case("wav"))
        })
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(CmdError::Data(format!(
            "no .wav files in {}",
            dir.display()
        )));
    }
    Ok(paths)
}

/// Runs the model comparison over every 5.0/5.1 file in `dir` and returns
/// the averaged report. Files are processed in parallel.
pub fn run_bench(dir: &Path, params: &MeasureParams) -> Result<BenchReport, CmdError> {
    let paths = corpus_wavs(dir)?;
    let results: Result<Vec<_>, CmdError> = paths
        .par_iter()
        .map(|path| {
            let (_, upmix) = read_wav(path)?;
            if upmix.layout() != Some(ChannelLayout::Surround5_0) {
                return Err(CmdError::Data(format!(
                    "{}: bench needs 5.0/5.1 files, got {} channels",
                    path.display(),
                    upmix.channels()
                )));
            }
            let samples = upmix.len() as u64;
            let pair = MixPair::new(itu_downmix_5to2(&upmix)?, upmix)?;
            let report = measure(&pair, params)?;
            Ok((report, samples))
        })
        .collect();
    let results = results?;
    let total_samples = results.iter().map(|(_, s)| s).sum();
    let per_file: Vec<_> = results.into_iter().map(|(r, _)| r).collect();
    Ok(BenchReport::from_measurements(&per_file, total_samples)?)
}

pub fn cmd_bench(dir: &Path, params: &MeasureParams) -> CmdResult {
    let report = run_bench(dir, params)?;
    print!("{}", report.table());
    println!();
    print!("{}", report.machine_lines());
    Ok(())
}

pub fn cmd_gen_corpus(dir: &Path, params: &CorpusParams) -> CmdResult {
    let paths = generate_corpus(dir, params)?;
    println!(
        "wrote {} file(s) to {} (seed {}, {:.1} s @ {} Hz)",
        paths.len(),
        dir.display(),
        params.seed,
        params.seconds,
        params.sample_rate
    );
    Ok(())
}
