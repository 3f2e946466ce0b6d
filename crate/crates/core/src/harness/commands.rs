//! Implementations behind the `micutil` subcommands. Each returns a JSON
//! summary that the binary prints.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::config::{config_hash, RunConfig};
use super::csv::{write_summary_csv, write_trial_csv};
use super::study;
use super::summary::batch_summary;
use super::trial::{
    estimate_utilities, extract_all, frame_times, from_wire, ground_truth, rho_track,
    select_features, simulate, to_wire, TrialResult,
};
use crate::error::{Error, Result};
use crate::features::FeatureSet;
use crate::lasso::{lambda_sweep, write_weights_csv, LassoProblem, SolverSettings};
use crate::msc::msc_track;
use crate::sim::rir::calibrated_reflection;
use crate::sim::{rir_image_source, schroeder_t60, MicSpec, RirSettings, RoomSpec};
use crate::wav::{read_wav, write_wav};
use crate::wire::{read_csff, write_csff};

fn pick_room<'a>(cfg: &'a RunConfig, name: Option<&str>) -> Result<&'a RoomSpec> {
    match name {
        None => Ok(&cfg.scene.rooms[0]),
        Some(n) => cfg
            .scene
            .rooms
            .iter()
            .find(|r| r.name == n)
            .ok_or_else(|| Error::Config(format!("no room named {n:?} in the configuration"))),
    }
}

/// Seeds `seed..seed+trials` if `trials` is given, else those of the configuration.
pub fn seed_list(cfg: &RunConfig, seed: Option<u64>, trials: Option<usize>) -> Vec<u64> {
    match trials {
        Some(k) => (0..k as u64).map(|i| seed.unwrap_or(0) + i).collect(),
        None => match seed {
            Some(s) => vec![s],
            None => cfg.seeds.clone(),
        },
    }
}

fn mic_path(dir: &Path, ch: usize) -> PathBuf {
    dir.join(format!("mic_{:02}.wav", ch + 1))
}

/// Load `mic_01.wav, mic_02.wav, ...` from `dir`.
pub fn read_mic_dir(dir: &Path) -> Result<(Vec<Vec<f64>>, f64)> {
    let mut mics = Vec::new();
    let mut rate = None;
    while mic_path(dir, mics.len()).exists() {
        let (x, fs) = read_wav(&mic_path(dir, mics.len()))?;
        if rate.is_some_and(|r| r != fs) {
            return Err(Error::Config(
                "microphone files differ in sample rate".into(),
            ));
        }
        rate = Some(fs);
        mics.push(x);
    }
    match rate {
        Some(fs) => Ok((mics, fs)),
        None => Err(Error::InsufficientInput(format!(
            "no mic_01.wav in {}",
            dir.display()
        ))),
    }
}

pub fn simulate_cmd(cfg: &RunConfig, seed: u64, room: Option<&str>, out: &Path) -> Result<Value> {
    let room = pick_room(cfg, room)?;
    let (scene, rendered) = simulate(cfg, room, seed)?;
    fs::create_dir_all(out)?;
    let fs_ = scene.sample_rate;
    write_wav(&out.join("dry.wav"), &rendered.dry, fs_)?;
    for (ch, x) in rendered.mics.iter().enumerate() {
        write_wav(&mic_path(out, ch), x, fs_)?;
    }
    let meta = json!({
        "room": room,
        "seed": seed,
        "snr_db": scene.snr_db,
        "mics": scene.mics,
        "trajectory": scene.trajectory,
        "reference_channel": rendered.reference_channel,
        "noise_std": rendered.noise_std,
        "config_hash": config_hash(cfg),
    });
    fs::write(out.join("scene.json"), serde_json::to_string_pretty(&meta)?)?;
    Ok(json!({
        "command": "simulate",
        "room": room.name,
        "seed": seed,
        "channels": rendered.mics.len(),
        "samples": rendered.dry.len(),
        "out": out,
    }))
}

pub fn extract_cmd(cfg: &RunConfig, input: &Path, out: &Path) -> Result<Value> {
    let (mics, fs_) = read_mic_dir(input)?;
    if fs_ != cfg.framing.sample_rate {
        return Err(Error::Config(format!(
            "recordings are at {fs_} Hz, configuration expects {} Hz",
            cfg.framing.sample_rate
        )));
    }
    let features = select_features(&extract_all(&mics, &cfg.framing)?, &cfg.features);
    let frames = to_wire(&features);
    write_csff(out, &frames)?;
    Ok(json!({
        "command": "extract",
        "channels": features.len(),
        "frames": features.first().map_or(0, Vec::len),
        "features": cfg.features,
        "wire_frames": frames.len(),
        "out": out,
    }))
}

pub fn estimate_cmd(
    cfg: &RunConfig,
    input: &Path,
    reference: Option<&Path>,
    out: &Path,
) -> Result<Value> {
    let decoded = read_csff(input)?;
    let features = from_wire(&decoded.frames)?;
    let utility = estimate_utilities(&features, cfg.kf, |_, _, _| {})?;
    let msc = match reference {
        Some(dir) => {
            let (mics, _) = read_mic_dir(dir)?;
            let (dry, _) = read_wav(&dir.join("dry.wav"))?;
            msc_track(
                &dry,
                &mics,
                cfg.framing.block_len,
                cfg.framing.shift,
                cfg.psd_smoothing,
            )?
        }
        None => Vec::new(),
    };
    let rho = if msc.is_empty() {
        vec![None; utility.len()]
    } else {
        rho_track(&utility, &msc)
    };
    let result = TrialResult {
        room: String::new(),
        seed: 0,
        frame_times: frame_times(&cfg.framing, utility.len()),
        rho,
        utility,
        msc,
        config_hash: config_hash(cfg),
    };
    write_trial_csv(BufWriter::new(File::create(out)?), &result)?;
    Ok(json!({
        "command": "estimate",
        "frames": result.utility.len(),
        "skipped_wire_frames": decoded.skipped,
        "median_rho": median_defined(&result.rho),
        "out": out,
    }))
}

fn median_defined(rho: &[Option<f64>]) -> Option<f64> {
    crate::stats::median(&rho.iter().flatten().copied().collect::<Vec<_>>())
}

/// Median of `rho` over the final `seconds` of the run.
pub fn tail_median(rho: &[Option<f64>], times: &[f64], seconds: f64) -> Option<f64> {
    let end = times.last().copied()?;
    let v: Vec<f64> = rho
        .iter()
        .zip(times)
        .filter(|(_, &t)| t >= end - seconds)
        .filter_map(|(r, _)| *r)
        .collect();
    crate::stats::median(&v)
}

pub fn evaluate_cmd(cfg: &RunConfig, seeds: &[u64], out: &Path) -> Result<Value> {
    fs::create_dir_all(out)?;
    let mut rooms = Vec::new();
    let mut all = Vec::new();
    let mut failures = Vec::new();
    let mut times = Vec::new();
    for room in &cfg.scene.rooms {
        let mut tails = Vec::new();
        for &seed in seeds {
            match super::trial::run_trial(cfg, room, seed) {
                Ok(r) => {
                    let path = out.join(format!("trial_{}_{seed}.csv", room.name));
                    write_trial_csv(BufWriter::new(File::create(path)?), &r)?;
                    tails.push(tail_median(&r.rho, &r.frame_times, 5.0));
                    times = r.frame_times.clone();
                    all.push(r.rho);
                }
                Err(e) => failures.push(json!({"room": room.name, "seed": seed, "error": e.code(), "message": e.to_string()})),
            }
        }
        rooms.push(json!({"room": room.name, "final_5s_median_rho": tails}));
    }
    let summary = batch_summary(&all)?;
    write_summary_csv(
        BufWriter::new(File::create(out.join("summary.csv"))?),
        &summary,
        &times,
    )?;
    let tail = tail_median(&summary.median, &times, 5.0);
    Ok(json!({
        "command": "evaluate",
        "trials": all.len(),
        "failures": failures,
        "rooms": rooms,
        "final_5s_median_rho": tail,
        "config_hash": config_hash(cfg),
        "out": out,
    }))
}

pub fn lasso_cmd(cfg: &RunConfig, seeds: &[u64], out: &Path) -> Result<Value> {
    let set = FeatureSet::all();
    let mut problem = LassoProblem::new(set.len(), cfg.lasso.weighting);
    for room in &cfg.scene.rooms {
        for &seed in seeds {
            let (_, rendered) = simulate(cfg, room, seed)?;
            let features = extract_all(&rendered.mics, &cfg.framing)?;
            let msc = ground_truth(&rendered, cfg)?;
            study::add_trial(&mut problem, &features, &msc, cfg.kf)?;
        }
    }
    let settings = SolverSettings {
        tol: cfg.lasso.tol,
        max_sweeps: cfg.lasso.max_sweeps,
    };
    let results = lambda_sweep(&problem, &cfg.lasso.lambdas, settings)?;
    write_weights_csv(BufWriter::new(File::create(out)?), set.ids(), &results)?;
    let sweep: Vec<Value> = results
        .iter()
        .map(|r| {
            json!({
                "lambda": r.lambda,
                "support": r.support().iter().map(|&i| set.ids()[i].name()).collect::<Vec<_>>(),
                "converged": r.converged,
                "kkt_residual": problem.kkt_residual(&r.w, r.lambda),
            })
        })
        .collect();
    Ok(json!({
        "command": "lasso",
        "trials": problem.trials(),
        "lambda_max": problem.lambda_max(),
        "sweep": sweep,
        "out": out,
    }))
}

/// Fitted T60 for each room at `pairs` random source/microphone placements.
pub fn rir_check_cmd(cfg: &RunConfig, seed: u64, pairs: usize, out: &Path) -> Result<Value> {
    let fs_ = cfg.framing.sample_rate;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut wtr = csv::Writer::from_writer(BufWriter::new(File::create(out)?));
    wtr.write_record([
        "room",
        "t60_target",
        "eyring_reflection",
        "reflection",
        "pair",
        "t60_fit",
        "rel_error",
    ])?;
    let mut rooms = Vec::new();
    for room in &cfg.scene.rooms {
        let settings = RirSettings::for_room(room, fs_)?;
        let mut fits = Vec::new();
        for pair in 0..pairs {
            let mut point = || [0, 1, 2].map(|k| rng.random_range(0.5..room.dims[k] - 0.5));
            let src = point();
            let mic = MicSpec::new(point(), rng.random_range(0.0..std::f64::consts::TAU));
            let h = rir_image_source(room, &src, &mic, &settings)?;
            let fit = schroeder_t60(&h, fs_);
            let err = fit.map(|t| (t - room.t60) / room.t60);
            wtr.write_record([
                room.name.clone(),
                room.t60.to_string(),
                room.reflection_from_t60()?.to_string(),
                settings.reflection.to_string(),
                pair.to_string(),
                fit.map_or(".".into(), |t| t.to_string()),
                err.map_or(".".into(), |e| e.to_string()),
            ])?;
            fits.push(fit);
        }
        rooms.push(json!({
            "room": room.name,
            "t60": room.t60,
            "eyring_reflection": room.reflection_from_t60()?,
            "reflection": calibrated_reflection(room, fs_)?,
            "t60_fit": fits,
        }));
    }
    wtr.flush()?;
    Ok(json!({"command": "rir-check", "rooms": rooms, "out": out}))
}
