//! End-to-end orchestration: burst spiking -> pulse-angle schedule ->
//! open-system evolution -> transfer tensors and backflow level ->
//! entanglement, coherence, mixing -> classification and packet emission.
//!
//! Every stage persists its artifacts through a single tracked writer, and
//! a manifest records the file list, config hash, timings, and the failed
//! stage if any. Identical configs produce byte-identical artifacts; only
//! manifest timings vary between runs.

use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::artifacts::{read_csv, ArtifactWriter};
use crate::config::{RunConfig, SpikeToThetaMap, ThetaMode};
use crate::decision::{AwarenessClass, PacketContext, PacketWriter};
use crate::error::{Error, Result};
use crate::network::{
    concurrence, g1_correlation, mix_density_matrices, reduce_to_first, reduce_to_second,
    TwoQubitSystem,
};
use crate::nonmarkov::{
    blp_measure, compute_transfer_tensors, default_pair_set, learn_maps, trace_distance,
    NonMarkovianityReport,
};
use crate::quantum::{
    bloch_vector, evolve, partial_trace_to_qubit, DensityMatrix, QuantumTrajectory, ThetaEntry,
    ThetaSchedule,
};
use crate::spiking::{count_spikes, phase_portrait, simulate, Spike, SpikeTrain};

/// Map a sorted spike list onto a pulse-angle schedule: one entry per
/// spike, active from its peak to the next peak (the last entry is
/// open-ended).
pub fn spike_to_theta(spikes: &[Spike], map: &SpikeToThetaMap) -> ThetaSchedule {
    if spikes.is_empty() {
        return ThetaSchedule::empty();
    }
    let v_max = spikes.iter().map(|s| s.v_peak).fold(f64::MIN, f64::max);
    let n = spikes.len();
    let entries = spikes
        .iter()
        .enumerate()
        .map(|(k, spike)| {
            let theta = match map.mode {
                ThetaMode::Amplitude => {
                    if v_max > 0.0 {
                        map.theta_max * (spike.v_peak / v_max)
                    } else {
                        map.theta_max
                    }
                }
                ThetaMode::Index => map.theta_max * (k as f64 + 1.0) / n as f64,
                ThetaMode::Constant => map.theta_max,
            };
            ThetaEntry {
                t_start: spike.t_peak,
                t_end: spikes.get(k + 1).map(|next| next.t_peak),
                theta,
            }
        })
        .collect();
    ThetaSchedule { entries }
}

#[derive(Debug, Clone, Serialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub scenario: Option<String>,
    pub config_sha256: String,
    pub files: Vec<String>,
    pub failed_stage: Option<String>,
    pub q: Option<u32>,
    pub level: Option<f64>,
    pub correlation: Option<f64>,
    pub packet_classes: Vec<String>,
    pub timings: Vec<StageTiming>,
}

struct StageClock {
    timings: Vec<StageTiming>,
}

impl StageClock {
    fn new() -> Self {
        Self { timings: Vec::new() }
    }

    fn run<T>(
        &mut self,
        stage: &'static str,
        f: impl FnOnce() -> Result<T>,
    ) -> Result<T> {
        let start = Instant::now();
        let result = f().map_err(|e| e.in_stage(stage));
        self.timings.push(StageTiming {
            stage: stage.to_string(),
            seconds: start.elapsed().as_secs_f64(),
        });
        result
    }
}

pub struct SpikeStage {
    pub train1: SpikeTrain,
    pub train2: SpikeTrain,
    pub q: u32,
    pub spikes: Vec<Spike>,
}

/// Simulate the circuit, count spikes, export trains, spike lists, and
/// phase portraits.
pub fn run_spike_stage(cfg: &RunConfig, writer: &mut ArtifactWriter) -> Result<SpikeStage> {
    let params = cfg.circuit.params();
    let initial = cfg.circuit.initial_state();
    let (mut train1, mut train2) = simulate(&params, &initial, cfg.circuit.dt, cfg.circuit.t_end)?;
    let (q1, spikes1) = count_spikes(&train1, cfg.circuit.spike_threshold)?;
    let (_, spikes2) = count_spikes(&train2, cfg.circuit.spike_threshold)?;
    train1.spikes = spikes1.clone();
    train2.spikes = spikes2.clone();

    writer.write_csv(
        "spike_train.csv",
        "t,v1,v2",
        train1
            .samples
            .iter()
            .zip(&train2.samples)
            .map(|(&(t, v1), &(_, v2))| vec![t, v1, v2]),
    )?;
    writer.write_csv(
        "spikes.csv",
        "t_peak,v_peak,neuron_id",
        train1
            .spikes
            .iter()
            .map(|s| (s, 1.0))
            .chain(train2.spikes.iter().map(|s| (s, 2.0)))
            .map(|(s, id)| vec![s.t_peak, s.v_peak, id]),
    )?;
    for (name, train) in [("phase_portrait_n1.csv", &train1), ("phase_portrait_n2.csv", &train2)] {
        let portrait = phase_portrait(train)?;
        writer.write_csv(name, "dv,d2v", portrait.iter().map(|&(d1, d2)| vec![d1, d2]))?;
    }

    Ok(SpikeStage {
        q: q1 as u32,
        spikes: spikes1,
        train1,
        train2,
    })
}

/// Evolve the qubit-cavity system from the excited qubit and cavity vacuum
/// under the spike-derived schedule; export the flattened upper-triangle
/// trajectory and the Bloch track.
pub fn run_evolve_stage(
    cfg: &RunConfig,
    writer: &mut ArtifactWriter,
    schedule: ThetaSchedule,
) -> Result<QuantumTrajectory> {
    let fock = cfg.quantum.fock()?;
    let p = cfg.quantum.hamiltonian_params(schedule);
    let channels = cfg.quantum.collapse_channels()?;
    let rho0 = DensityMatrix::basis_state(fock.dim(), fock.index(true, 0));
    let traj = evolve(
        &rho0,
        &p,
        &channels,
        &fock,
        cfg.quantum.dt,
        cfg.quantum.t_end,
        cfg.io.record_stride,
    )?;

    let dim = fock.dim();
    let mut header = String::from("t");
    for i in 0..dim {
        for j in i..dim {
            header.push_str(&format!(",re_rho_{i}_{j},im_rho_{i}_{j}"));
        }
    }
    writer.write_csv(
        "trajectory.csv",
        &header,
        traj.times.iter().zip(&traj.states).map(|(&t, state)| {
            let m = state.matrix();
            let mut row = Vec::with_capacity(1 + dim * (dim + 1));
            row.push(t);
            for i in 0..dim {
                for j in i..dim {
                    row.push(m[(i, j)].re);
                    row.push(m[(i, j)].im);
                }
            }
            row
        }),
    )?;

    let bloch_rows: Vec<Vec<f64>> = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(&t, state)| {
            let q = partial_trace_to_qubit(state, &fock)?;
            let (x, y, z) = bloch_vector(&q)?;
            Ok(vec![t, x, y, z])
        })
        .collect::<Result<_>>()?;
    writer.write_csv(
        "bloch.csv",
        "t,bloch_x,bloch_y,bloch_z",
        bloch_rows.into_iter(),
    )?;
    Ok(traj)
}

#[derive(Debug, Clone, Serialize)]
pub struct TtmReport {
    pub dim: usize,
    pub dt_map: f64,
    pub memory_depth: usize,
    /// Max trace distance between the kernel extension and direct
    /// integration over the second learning window.
    pub extension_max_trace_distance: f64,
    pub extension_points: usize,
}

/// Learn dynamical maps, compress them to transfer tensors, persist both,
/// and report how well the kernel extends beyond the learning window.
pub fn run_ttm_stage(
    cfg: &RunConfig,
    writer: &mut ArtifactWriter,
    schedule: ThetaSchedule,
) -> Result<TtmReport> {
    let fock = cfg.quantum.fock()?;
    let p = cfg.quantum.hamiltonian_params(schedule);
    let channels = cfg.quantum.collapse_channels()?;
    let k = cfg.ttm.memory_depth;
    let maps = learn_maps(&p, &channels, &fock, cfg.quantum.dt, cfg.ttm.dt_map, k)?;
    let tensors = compute_transfer_tensors(&maps)?;

    writer.write_matrices_bin("ttm_maps.bin", &maps.maps)?;
    writer.write_json(
        "ttm_maps.json",
        &serde_json::json!({
            "dim": maps.dim,
            "dt_map": maps.dt_map,
            "count": maps.maps.len(),
        }),
    )?;
    writer.write_matrices_bin("ttm_tensors.bin", &tensors.tensors)?;
    writer.write_json(
        "ttm_tensors.json",
        &serde_json::json!({
            "dim": tensors.dim,
            "dt_map": tensors.dt_map,
            "memory_depth": tensors.depth(),
        }),
    )?;

    // diagnostic: extend one window past the learned region and compare
    let rho0 = DensityMatrix::basis_state(fock.dim(), fock.index(true, 0));
    let stride = (cfg.ttm.dt_map / cfg.quantum.dt).round() as usize;
    let direct = crate::quantum::evolve(
        &rho0,
        &p,
        &channels,
        &fock,
        cfg.quantum.dt,
        2.0 * k as f64 * cfg.ttm.dt_map,
        stride,
    )?;
    let history: Vec<DensityMatrix> = direct.states[..=k].to_vec();
    let extended = crate::nonmarkov::ttm_propagate(&tensors, &history, k)?;
    let mut max_distance: f64 = 0.0;
    for n in (k + 1)..extended.states.len() {
        max_distance = max_distance.max(trace_distance(&extended.states[n], &direct.states[n])?);
    }
    let report = TtmReport {
        dim: maps.dim,
        dt_map: maps.dt_map,
        memory_depth: k,
        extension_max_trace_distance: max_distance,
        extension_points: k,
    };
    writer.write_json("ttm_report.json", &report)?;
    Ok(report)
}

/// Trace-distance backflow scan over the default pair set.
pub fn run_blp_stage(
    cfg: &RunConfig,
    writer: &mut ArtifactWriter,
    schedule: ThetaSchedule,
) -> Result<NonMarkovianityReport> {
    let fock = cfg.quantum.fock()?;
    let p = cfg.quantum.hamiltonian_params(schedule);
    let channels = cfg.quantum.collapse_channels()?;
    let pairs = default_pair_set(&fock);
    let report = blp_measure(&p, &channels, &fock, &pairs, cfg.blp.dt, cfg.blp.t_end)?;
    writer.write_json("blp_report.json", &report)?;
    Ok(report)
}

pub struct NetworkStage {
    pub final_state: DensityMatrix,
    pub peak_concurrence: f64,
}

/// Exchange-coupled qubit pair: concurrence series plus the final state
/// whose reduced qubits feed the mixing stage.
pub fn run_network_stage(cfg: &RunConfig, writer: &mut ArtifactWriter) -> Result<NetworkStage> {
    let sys = TwoQubitSystem::bare();
    let rho0 = DensityMatrix::basis_state(4, 2); // |e, g>
    let channels = cfg.network.collapse_channels()?;
    let traj = sys.evolve(
        &rho0,
        &cfg.network.schedule(),
        &channels,
        cfg.network.dt,
        cfg.network.t_end,
        cfg.io.record_stride,
    )?;
    let series: Vec<(f64, f64)> = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(&t, state)| Ok((t, concurrence(state)?)))
        .collect::<Result<_>>()?;
    writer.write_csv(
        "concurrence.csv",
        "t,value",
        series.iter().map(|&(t, c)| vec![t, c]),
    )?;
    Ok(NetworkStage {
        final_state: traj.final_state().clone(),
        peak_concurrence: series.iter().map(|p| p.1).fold(0.0, f64::max),
    })
}

/// Strict-parse and validate, then echo the effective config.
fn echo_config(cfg: &RunConfig, writer: &mut ArtifactWriter) -> Result<String> {
    writer.write_json("effective_config.json", cfg)?;
    let canonical = serde_json::to_string(cfg)?;
    let digest = Sha256::digest(canonical.as_bytes());
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

fn next_theta_max(current: f64, class: AwarenessClass, fb: &crate::config::FeedbackConfig) -> f64 {
    match class {
        AwarenessClass::Regular | AwarenessClass::Unclassified => current,
        AwarenessClass::EnhancedAwareness => {
            (current * fb.enhanced_scale).min(std::f64::consts::TAU - 1e-9)
        }
        AwarenessClass::Elevated => fb.elevated_reset,
    }
}

#[derive(Debug, Clone, Serialize)]
struct FeedbackRound {
    round: usize,
    theta_max: f64,
    class: String,
}

/// Run the full pipeline for one effective config into `out_dir`.
pub fn run_pipeline(
    base: &RunConfig,
    out_dir: &Path,
    scenario: Option<&str>,
) -> Result<RunManifest> {
    let cfg = match scenario {
        Some(id) => base.for_scenario(id)?,
        None => base.clone(),
    };
    let mut writer = ArtifactWriter::new(out_dir)?;
    let mut clock = StageClock::new();
    let mut manifest = RunManifest {
        scenario: scenario.map(str::to_string),
        config_sha256: String::new(),
        files: Vec::new(),
        failed_stage: None,
        q: None,
        level: None,
        correlation: None,
        packet_classes: Vec::new(),
        timings: Vec::new(),
    };

    let result = run_stages(&cfg, &mut writer, &mut clock, &mut manifest);
    if let Err(err) = &result {
        if let Error::Stage { stage, .. } = err {
            manifest.failed_stage = Some((*stage).to_string());
        } else {
            manifest.failed_stage = Some("setup".to_string());
        }
    }
    manifest.files = writer.files().to_vec();
    manifest.timings = clock.timings.clone();
    manifest.files.push("manifest.json".to_string());
    writer.write_json("manifest.json", &manifest)?;
    result.map(|_| manifest)
}

fn run_stages(
    cfg: &RunConfig,
    writer: &mut ArtifactWriter,
    clock: &mut StageClock,
    manifest: &mut RunManifest,
) -> Result<()> {
    manifest.config_sha256 = echo_config(cfg, writer)?;

    let spike = clock.run("spike", || run_spike_stage(cfg, writer))?;
    manifest.q = Some(spike.q);

    let fock = cfg.quantum.fock()?;
    let packet_file = writer.create_tracked("packets.ndjson")?;
    let mut packets = PacketWriter::new(packet_file);
    let mut feedback_log: Vec<FeedbackRound> = Vec::new();

    let rounds = if cfg.feedback.enabled { cfg.feedback.windows } else { 1 };
    let mut mapping = cfg.mapping;

    for round in 0..rounds {
        let schedule = clock.run("theta", || {
            let schedule = spike_to_theta(&spike.spikes, &mapping);
            schedule.validate("mapping")?;
            writer.write_json("theta_schedule.json", &schedule)?;
            Ok(schedule)
        })?;

        let traj = clock.run("evolve", || run_evolve_stage(cfg, writer, schedule.clone()))?;
        clock.run("ttm", || run_ttm_stage(cfg, writer, schedule.clone()))?;
        let blp = clock.run("blp", || run_blp_stage(cfg, writer, schedule.clone()))?;
        let network = clock.run("network", || run_network_stage(cfg, writer))?;

        let correlation = clock.run("g1", || {
            let p = cfg.quantum.hamiltonian_params(schedule.clone());
            let channels = cfg.quantum.collapse_channels()?;
            let series = g1_correlation(
                &p,
                &channels,
                &fock,
                traj.final_state(),
                cfg.quantum.t_end,
                cfg.g1.dt,
                cfg.g1.tau_end,
                cfg.g1.record_stride,
            )?;
            writer.write_csv(
                "g1.csv",
                "t,value",
                series.tau.iter().zip(&series.normalized).map(|(&t, &v)| vec![t, v]),
            )?;
            Ok(series.report_value())
        })?;

        let bloch = clock.run("mix", || {
            let weights = cfg.network.mixture_weights()?;
            let blocks = [
                partial_trace_to_qubit(traj.final_state(), &fock)?,
                reduce_to_first(&network.final_state)?,
                reduce_to_second(&network.final_state)?,
            ];
            let mixed = mix_density_matrices(&blocks, &weights)?;
            let bloch = bloch_vector(&mixed)?;
            let m = mixed.matrix();
            writer.write_json(
                "mixture.json",
                &serde_json::json!({
                    "weights": weights.w,
                    "bloch": [bloch.0, bloch.1, bloch.2],
                    "rho": [
                        [m[(0, 0)].re, m[(0, 0)].im],
                        [m[(0, 1)].re, m[(0, 1)].im],
                        [m[(1, 0)].re, m[(1, 0)].im],
                        [m[(1, 1)].re, m[(1, 1)].im],
                    ],
                    "peak_concurrence": network.peak_concurrence,
                }),
            )?;
            Ok(bloch)
        })?;

        manifest.level = Some(blp.level);
        manifest.correlation = Some(correlation);

        let class = clock.run("classify", || {
            let ctx = PacketContext {
                t_emit: (round as f64 + 1.0) * cfg.quantum.t_end,
                q: spike.q,
                level: blp.level,
                correlation,
                bloch,
                theta: schedule.thetas(),
            };
            let emitted = packets.generate_packet(&ctx, &cfg.thresholds)?;
            Ok(match emitted {
                Some(packet) => {
                    manifest.packet_classes.push(packet.class.to_string());
                    packet.class
                }
                None => AwarenessClass::Unclassified,
            })
        })?;

        if cfg.feedback.enabled {
            feedback_log.push(FeedbackRound {
                round,
                theta_max: mapping.theta_max,
                class: class.to_string(),
            });
            mapping.theta_max = next_theta_max(mapping.theta_max, class, &cfg.feedback);
        }
    }

    let mut sink = packets.into_inner();
    std::io::Write::flush(&mut sink).map_err(|e| Error::Io {
        path: "packets.ndjson".to_string(),
        source: e,
    })?;
    if cfg.feedback.enabled {
        writer.write_json("feedback_log.json", &feedback_log)?;
    }
    Ok(())
}

/// Recompute analysis artifacts from the persisted waveforms in `out_dir`.
pub fn run_analyze_stage(cfg: &RunConfig, writer: &mut ArtifactWriter) -> Result<()> {
    let bloch_path = writer.path_of("bloch.csv");
    let (_, bloch_rows) = read_csv(&bloch_path)?;
    let train_path = writer.path_of("spike_train.csv");
    let (_, train_rows) = read_csv(&train_path)?;

    // excited-state population from the Bloch z component
    let p_e: Vec<(f64, f64)> = bloch_rows
        .iter()
        .map(|row| (row[0], (1.0 - row[3]) / 2.0))
        .collect();
    let fit = crate::analysis::t1_fit(&p_e, cfg.analysis.floor)?;
    writer.write_csv(
        "t1_fit.csv",
        "t1,intercept,r_squared",
        std::iter::once(vec![fit.t1, fit.intercept, fit.r_squared]),
    )?;

    // the coherence (y) and population (z) tracks; x vanishes identically
    // for the real-valued Hamiltonian family driving the pipeline
    let y: Vec<(f64, f64)> = bloch_rows.iter().map(|r| (r[0], r[2])).collect();
    let z: Vec<(f64, f64)> = bloch_rows.iter().map(|r| (r[0], r[3])).collect();
    let dt_bloch = y.get(1).map(|p| p.0 - y[0].0).unwrap_or(1.0);
    let (delay, peak_corr) = crate::analysis::estimate_delay(&y, &z, dt_bloch)?;
    writer.write_csv(
        "delay.csv",
        "delay_s,peak_corr",
        std::iter::once(vec![delay, peak_corr]),
    )?;

    let v1: Vec<(f64, f64)> = train_rows.iter().map(|r| (r[0], r[1])).collect();
    let spec = crate::analysis::spectrum_with(&v1, cfg.analysis.window)?;
    writer.write_csv(
        "spectrum.csv",
        "freq_hz,magnitude",
        spec.iter().map(|&(f, m)| vec![f, m]),
    )?;
    Ok(())
}

/// Spike-count staircase over the documented coupling sweep.
pub fn coupling_staircase(cfg: &RunConfig) -> Result<Vec<(f64, usize)>> {
    let sweep = cfg.circuit.coupling_sweep;
    let mut out = Vec::with_capacity(sweep.steps);
    for i in 0..sweep.steps {
        let k = sweep.from + (sweep.to - sweep.from) * i as f64 / (sweep.steps - 1) as f64;
        let mut params = cfg.circuit.params();
        params.k1_coupled = k;
        params.k2_coupled = k;
        let (train1, _) = simulate(&params, &cfg.circuit.initial_state(), cfg.circuit.dt, cfg.circuit.t_end)?;
        let (count, _) = count_spikes(&train1, cfg.circuit.spike_threshold)?;
        out.push((k, count));
    }
    Ok(out)
}
