//! Run configuration: strict JSON parsing, scenario overlays, validation.
//!
//! Parsing is strict: unknown keys are rejected with the offending path and
//! the nearest valid key. Scenario sections are partial configs merged over
//! the base document before validation. Defaults reproduce the calibrated
//! reference setup shipped in `configs/reference.json`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::decision::ClassificationThresholds;
use crate::error::{Error, Result};
use crate::network::{CouplingEntry, MixtureWeights, TwoQubitCouplingSchedule};
use crate::quantum::{
    CollapseChannel, FockConfig, HamiltonianParams, ThetaEntry, ThetaSchedule,
};
use crate::spiking::{MemristanceLaw, NeuronCircuitParams, NeuronNetworkState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub circuit: CircuitConfig,
    pub quantum: QuantumConfig,
    pub ttm: TtmConfig,
    pub blp: BlpConfig,
    pub g1: G1Config,
    pub network: NetworkConfig,
    pub analysis: AnalysisConfig,
    pub thresholds: ClassificationThresholds,
    pub mapping: SpikeToThetaMap,
    pub io: IoConfig,
    pub feedback: FeedbackConfig,
    /// Reserved; every pipeline stage is deterministic.
    pub seed: u64,
    /// Partial configs merged over the base, one per scenario id.
    pub scenarios: BTreeMap<String, Value>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            circuit: CircuitConfig::default(),
            quantum: QuantumConfig::default(),
            ttm: TtmConfig::default(),
            blp: BlpConfig::default(),
            g1: G1Config::default(),
            network: NetworkConfig::default(),
            analysis: AnalysisConfig::default(),
            thresholds: ClassificationThresholds::default(),
            mapping: SpikeToThetaMap::default(),
            io: IoConfig::default(),
            feedback: FeedbackConfig::default(),
            seed: 0,
            scenarios: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CircuitConfig {
    pub c1: f64,
    pub c2: f64,
    pub c5: f64,
    pub c6: f64,
    pub r3: f64,
    pub r4: f64,
    pub r5: f64,
    pub r6: f64,
    pub k1_coupled: f64,
    pub k2_coupled: f64,
    pub mem_laws: [MemristanceLaw; 4],
    pub initial: InitialStateConfig,
    /// Integration step; halving the shipped value changes v1(t_end) by
    /// less than 1e-4 relative (regression-tested).
    pub dt: f64,
    pub t_end: f64,
    pub spike_threshold: f64,
    /// Documented coupling range over which the spike count is a monotone
    /// staircase.
    pub coupling_sweep: CouplingSweep,
}

fn reference_law() -> MemristanceLaw {
    MemristanceLaw {
        r_on: 0.5,
        r_off: 2.0,
        v_set: 0.3,
        v_reset: -0.3,
        tau_switch: 5e-3,
    }
}

impl Default for CircuitConfig {
    fn default() -> Self {
        Self {
            c1: 1e-4,
            c2: 1e-2,
            c5: 1e-4,
            c6: 1e-2,
            r3: 100.0,
            r4: 1e4,
            r5: 100.0,
            r6: 1e4,
            k1_coupled: 4e6,
            k2_coupled: 4e6,
            mem_laws: [reference_law(); 4],
            initial: InitialStateConfig::default(),
            dt: 2.5e-7,
            t_end: 0.04,
            spike_threshold: 0.25,
            coupling_sweep: CouplingSweep::default(),
        }
    }
}

impl CircuitConfig {
    pub fn params(&self) -> NeuronCircuitParams {
        NeuronCircuitParams {
            c1: self.c1,
            c2: self.c2,
            c5: self.c5,
            c6: self.c6,
            r3: self.r3,
            r4: self.r4,
            r5: self.r5,
            r6: self.r6,
            k1_coupled: self.k1_coupled,
            k2_coupled: self.k2_coupled,
            mem_laws: self.mem_laws,
        }
    }

    pub fn initial_state(&self) -> NeuronNetworkState {
        NeuronNetworkState {
            t: 0.0,
            v1: self.initial.v1,
            v2: self.initial.v2,
            dv1: self.initial.dv1,
            dv2: self.initial.dv2,
            r_mem: self.initial.r_mem,
        }
    }

    fn validate(&self) -> Result<()> {
        self.params().validate("circuit")?;
        self.initial_state().validate(&self.params(), "circuit.initial")?;
        ensure_positive(self.dt, "circuit.dt")?;
        ensure_positive(self.t_end, "circuit.t_end")?;
        if !self.spike_threshold.is_finite() {
            return Err(config_err("circuit.spike_threshold", "must be finite"));
        }
        if self.coupling_sweep.steps < 2 {
            return Err(config_err("circuit.coupling_sweep.steps", "must be >= 2"));
        }
        if !(self.coupling_sweep.to > self.coupling_sweep.from) {
            return Err(config_err("circuit.coupling_sweep", "requires to > from"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialStateConfig {
    pub v1: f64,
    pub v2: f64,
    pub dv1: f64,
    pub dv2: f64,
    pub r_mem: [f64; 4],
}

impl Default for InitialStateConfig {
    fn default() -> Self {
        Self {
            v1: 1.0,
            v2: 1.0,
            dv1: 0.0,
            dv2: 0.0,
            r_mem: [1.0; 4],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CouplingSweep {
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

impl Default for CouplingSweep {
    fn default() -> Self {
        Self {
            from: 1e6,
            to: 1.6e7,
            steps: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuantumConfig {
    pub g: f64,
    pub drive_amp: f64,
    pub tau_e: f64,
    pub n_max: usize,
    pub channels: Vec<ChannelConfig>,
    pub dt: f64,
    pub t_end: f64,
    /// Explicit schedule for standalone evolution; the pipeline always
    /// derives the schedule from spikes instead.
    pub theta_override: Option<Vec<ThetaEntry>>,
}

impl Default for QuantumConfig {
    fn default() -> Self {
        Self {
            g: 2000.0,
            drive_amp: 400.0,
            tau_e: 4e-3,
            n_max: 3,
            channels: vec![ChannelConfig {
                kind: ChannelKind::QubitDecay,
                // 1/T1 with T1 = 7.4 ms
                rate: 1.0 / 7.4e-3,
            }],
            dt: 5e-7,
            t_end: 16e-3,
            theta_override: None,
        }
    }
}

impl QuantumConfig {
    pub fn fock(&self) -> Result<FockConfig> {
        FockConfig::new(self.n_max)
    }

    pub fn hamiltonian_params(&self, schedule: ThetaSchedule) -> HamiltonianParams {
        HamiltonianParams {
            g: self.g,
            drive_amp: self.drive_amp,
            tau_e: self.tau_e,
            theta_schedule: schedule,
        }
    }

    pub fn collapse_channels(&self) -> Result<Vec<CollapseChannel>> {
        let cfg = self.fock()?;
        self.channels
            .iter()
            .map(|ch| match ch.kind {
                ChannelKind::QubitDecay => CollapseChannel::qubit_decay(&cfg, ch.rate),
                ChannelKind::CavityDecay => CollapseChannel::cavity_decay(&cfg, ch.rate),
                ChannelKind::QubitDephasing => CollapseChannel::qubit_dephasing(&cfg, ch.rate),
            })
            .collect()
    }

    fn validate(&self) -> Result<()> {
        let schedule = match &self.theta_override {
            Some(entries) => ThetaSchedule {
                entries: entries.clone(),
            },
            None => ThetaSchedule::empty(),
        };
        self.hamiltonian_params(schedule).validate("quantum")?;
        self.fock()?;
        for (i, ch) in self.channels.iter().enumerate() {
            if ch.rate < 0.0 || !ch.rate.is_finite() {
                return Err(config_err(
                    &format!("quantum.channels[{i}].rate"),
                    "must be >= 0",
                ));
            }
        }
        ensure_positive(self.dt, "quantum.dt")?;
        ensure_positive(self.t_end, "quantum.t_end")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    pub kind: ChannelKind,
    pub rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    QubitDecay,
    CavityDecay,
    QubitDephasing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TtmConfig {
    pub dt_map: f64,
    pub memory_depth: usize,
}

impl Default for TtmConfig {
    fn default() -> Self {
        Self {
            dt_map: 2e-4,
            memory_depth: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BlpConfig {
    /// Pair-set id; "axes6" is the six antipodal Bloch pairs.
    pub pair_set: String,
    pub dt: f64,
    pub t_end: f64,
}

impl Default for BlpConfig {
    fn default() -> Self {
        Self {
            pair_set: "axes6".to_string(),
            dt: 1e-6,
            t_end: 8e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct G1Config {
    pub dt: f64,
    pub tau_end: f64,
    pub record_stride: usize,
}

impl Default for G1Config {
    fn default() -> Self {
        Self {
            dt: 5e-7,
            tau_end: 3e-4,
            record_stride: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkConfig {
    pub tau_e: f64,
    pub entries: Vec<CouplingEntry>,
    pub channels: Vec<NetworkChannelConfig>,
    pub dt: f64,
    pub t_end: f64,
    pub weights: [f64; 3],
}

impl Default for NetworkConfig {
    fn default() -> Self {
        Self {
            tau_e: 4e-3,
            entries: vec![CouplingEntry {
                t_start: 0.0,
                t_end: None,
                j_exchange: 1000.0,
                drive_pair: (0.0, 0.0),
                theta_pair: (0.0, 0.0),
            }],
            channels: vec![
                NetworkChannelConfig {
                    kind: NetworkChannelKind::Qubit1Decay,
                    rate: 1.0 / 7.4e-3,
                },
                NetworkChannelConfig {
                    kind: NetworkChannelKind::Qubit2Decay,
                    rate: 1.0 / 7.4e-3,
                },
            ],
            dt: 5e-7,
            // stop at the quarter exchange period: concurrence peaks there
            t_end: std::f64::consts::PI / 4.0 / 1000.0,
            weights: MixtureWeights::default().w,
        }
    }
}

impl NetworkConfig {
    pub fn schedule(&self) -> TwoQubitCouplingSchedule {
        TwoQubitCouplingSchedule {
            tau_e: self.tau_e,
            entries: self.entries.clone(),
        }
    }

    pub fn mixture_weights(&self) -> Result<MixtureWeights> {
        MixtureWeights::new(self.weights)
    }

    pub fn collapse_channels(&self) -> Result<Vec<CollapseChannel>> {
        let sigma = {
            let mut m = crate::linalg::CMatrix::zeros(2, 2);
            m[(0, 1)] = num_complex::Complex64::new(1.0, 0.0);
            m
        };
        let id = crate::linalg::CMatrix::identity(2, 2);
        let z = crate::quantum::pauli_z();
        self.channels
            .iter()
            .map(|ch| {
                let op = match ch.kind {
                    NetworkChannelKind::Qubit1Decay => sigma.kronecker(&id),
                    NetworkChannelKind::Qubit2Decay => id.kronecker(&sigma),
                    NetworkChannelKind::Qubit1Dephasing => z.kronecker(&id),
                    NetworkChannelKind::Qubit2Dephasing => id.kronecker(&z),
                };
                CollapseChannel::new(op, ch.rate)
            })
            .collect()
    }

    fn validate(&self) -> Result<()> {
        self.schedule().validate("network")?;
        self.mixture_weights()?;
        for (i, ch) in self.channels.iter().enumerate() {
            if ch.rate < 0.0 || !ch.rate.is_finite() {
                return Err(config_err(
                    &format!("network.channels[{i}].rate"),
                    "must be >= 0",
                ));
            }
        }
        ensure_positive(self.dt, "network.dt")?;
        ensure_positive(self.t_end, "network.t_end")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkChannelConfig {
    pub kind: NetworkChannelKind,
    pub rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NetworkChannelKind {
    Qubit1Decay,
    Qubit2Decay,
    Qubit1Dephasing,
    Qubit2Dephasing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Envelope floor for the log-decay fit.
    pub floor: f64,
    pub window: crate::analysis::WindowKind,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            floor: 1e-3,
            window: crate::analysis::WindowKind::None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaMode {
    Amplitude,
    Index,
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpikeToThetaMap {
    pub mode: ThetaMode,
    pub theta_max: f64,
}

impl Default for SpikeToThetaMap {
    fn default() -> Self {
        Self {
            mode: ThetaMode::Amplitude,
            theta_max: std::f64::consts::PI,
        }
    }
}

impl SpikeToThetaMap {
    fn validate(&self) -> Result<()> {
        if !(self.theta_max > 0.0 && self.theta_max < std::f64::consts::TAU) {
            return Err(config_err("mapping.theta_max", "must lie in (0, 2*pi)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IoConfig {
    pub out_dir: String,
    pub record_stride: usize,
}

impl Default for IoConfig {
    fn default() -> Self {
        Self {
            out_dir: "runs".to_string(),
            record_stride: 40,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeedbackConfig {
    pub enabled: bool,
    /// Number of classification rounds when enabled.
    pub windows: usize,
    /// theta_max multiplier after an EnhancedAwareness packet.
    pub enhanced_scale: f64,
    /// theta_max value after an Elevated packet.
    pub elevated_reset: f64,
}

impl Default for FeedbackConfig {
    fn default() -> Self {
        Self {
            enabled: false,
            windows: 1,
            enhanced_scale: 1.25,
            elevated_reset: std::f64::consts::PI,
        }
    }
}

fn ensure_positive(value: f64, path: &str) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(config_err(path, "must be > 0"))
    }
}

fn config_err(path: &str, message: &str) -> Error {
    Error::Config {
        path: path.to_string(),
        message: message.to_string(),
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.circuit.validate()?;
        self.quantum.validate()?;
        ensure_positive(self.ttm.dt_map, "ttm.dt_map")?;
        if self.ttm.memory_depth < 1 {
            return Err(config_err("ttm.memory_depth", "must be >= 1"));
        }
        if self.blp.pair_set != "axes6" {
            return Err(config_err("blp.pair_set", "unknown pair set id"));
        }
        ensure_positive(self.blp.dt, "blp.dt")?;
        ensure_positive(self.blp.t_end, "blp.t_end")?;
        ensure_positive(self.g1.dt, "g1.dt")?;
        ensure_positive(self.g1.tau_end, "g1.tau_end")?;
        if self.g1.record_stride == 0 {
            return Err(config_err("g1.record_stride", "must be >= 1"));
        }
        self.network.validate()?;
        ensure_positive(self.analysis.floor, "analysis.floor")?;
        self.thresholds.validate("thresholds")?;
        self.mapping.validate()?;
        if self.io.record_stride == 0 {
            return Err(config_err("io.record_stride", "must be >= 1"));
        }
        if self.feedback.windows == 0 {
            return Err(config_err("feedback.windows", "must be >= 1"));
        }
        if self.feedback.enabled {
            ensure_positive(self.feedback.enhanced_scale, "feedback.enhanced_scale")?;
            if !(self.feedback.elevated_reset > 0.0
                && self.feedback.elevated_reset < std::f64::consts::TAU)
            {
                return Err(config_err("feedback.elevated_reset", "must lie in (0, 2*pi)"));
            }
        }
        for id in self.scenarios.keys() {
            if id.is_empty() || !id.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(config_err("scenarios", "ids must be alphanumeric"));
            }
        }
        Ok(())
    }

    /// Parse a config file with strict key checking and validation.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(Error::io(path.display().to_string()))?;
        Self::from_json_str(&text)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)?;
        check_keys(&value, &schema(), "")?;
        let cfg: RunConfig = serde_json::from_value(value)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Apply a scenario's partial config over this one.
    pub fn for_scenario(&self, id: &str) -> Result<Self> {
        let patch = self.scenarios.get(id).ok_or_else(|| {
            config_err("scenarios", &format!("no scenario named `{id}`"))
        })?;
        let mut base = serde_json::to_value(self)?;
        if let Value::Object(map) = &mut base {
            map.remove("scenarios");
        }
        merge(&mut base, patch);
        check_keys(&base, &schema(), "")?;
        let cfg: RunConfig = serde_json::from_value(base)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn scenario_ids(&self) -> Vec<String> {
        self.scenarios.keys().cloned().collect()
    }
}

/// JSON merge: objects merge recursively, everything else replaces.
fn merge(base: &mut Value, patch: &Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (key, pv) in p {
                match b.get_mut(key) {
                    Some(bv) => merge(bv, pv),
                    None => {
                        b.insert(key.clone(), pv.clone());
                    }
                }
            }
        }
        (slot, other) => *slot = other.clone(),
    }
}

enum Schema {
    Object(Vec<(&'static str, Schema)>),
    Array(Box<Schema>),
    /// Scenario overlays: partial root objects, checked against the root
    /// schema after merging.
    Overlays,
    Leaf,
}

fn schema() -> Schema {
    use Schema::*;
    let law = || {
        Object(vec![
            ("r_on", Leaf),
            ("r_off", Leaf),
            ("v_set", Leaf),
            ("v_reset", Leaf),
            ("tau_switch", Leaf),
        ])
    };
    let channel = || Object(vec![("kind", Leaf), ("rate", Leaf)]);
    let theta_entry = || Object(vec![("t_start", Leaf), ("t_end", Leaf), ("theta", Leaf)]);
    Object(vec![
        (
            "circuit",
            Object(vec![
                ("c1", Leaf),
                ("c2", Leaf),
                ("c5", Leaf),
                ("c6", Leaf),
                ("r3", Leaf),
                ("r4", Leaf),
                ("r5", Leaf),
                ("r6", Leaf),
                ("k1_coupled", Leaf),
                ("k2_coupled", Leaf),
                ("mem_laws", Array(Box::new(law()))),
                (
                    "initial",
                    Object(vec![
                        ("v1", Leaf),
                        ("v2", Leaf),
                        ("dv1", Leaf),
                        ("dv2", Leaf),
                        ("r_mem", Array(Box::new(Leaf))),
                    ]),
                ),
                ("dt", Leaf),
                ("t_end", Leaf),
                ("spike_threshold", Leaf),
                (
                    "coupling_sweep",
                    Object(vec![("from", Leaf), ("to", Leaf), ("steps", Leaf)]),
                ),
            ]),
        ),
        (
            "quantum",
            Object(vec![
                ("g", Leaf),
                ("drive_amp", Leaf),
                ("tau_e", Leaf),
                ("n_max", Leaf),
                ("channels", Array(Box::new(channel()))),
                ("dt", Leaf),
                ("t_end", Leaf),
                ("theta_override", Array(Box::new(theta_entry()))),
            ]),
        ),
        (
            "ttm",
            Object(vec![("dt_map", Leaf), ("memory_depth", Leaf)]),
        ),
        (
            "blp",
            Object(vec![("pair_set", Leaf), ("dt", Leaf), ("t_end", Leaf)]),
        ),
        (
            "g1",
            Object(vec![("dt", Leaf), ("tau_end", Leaf), ("record_stride", Leaf)]),
        ),
        (
            "network",
            Object(vec![
                ("tau_e", Leaf),
                (
                    "entries",
                    Array(Box::new(Object(vec![
                        ("t_start", Leaf),
                        ("t_end", Leaf),
                        ("j_exchange", Leaf),
                        ("drive_pair", Array(Box::new(Leaf))),
                        ("theta_pair", Array(Box::new(Leaf))),
                    ]))),
                ),
                ("channels", Array(Box::new(channel()))),
                ("dt", Leaf),
                ("t_end", Leaf),
                ("weights", Array(Box::new(Leaf))),
            ]),
        ),
        (
            "analysis",
            Object(vec![("floor", Leaf), ("window", Leaf)]),
        ),
        (
            "thresholds",
            Object(vec![(
                "bands",
                Array(Box::new(Object(vec![
                    ("q_lo", Leaf),
                    ("q_hi", Leaf),
                    ("level_min", Leaf),
                    ("corr_min", Leaf),
                    ("class", Leaf),
                    ("directive", Leaf),
                ]))),
            )]),
        ),
        ("mapping", Object(vec![("mode", Leaf), ("theta_max", Leaf)])),
        ("io", Object(vec![("out_dir", Leaf), ("record_stride", Leaf)])),
        (
            "feedback",
            Object(vec![
                ("enabled", Leaf),
                ("windows", Leaf),
                ("enhanced_scale", Leaf),
                ("elevated_reset", Leaf),
            ]),
        ),
        ("seed", Leaf),
        ("scenarios", Overlays),
    ])
}

fn check_keys(value: &Value, schema: &Schema, path: &str) -> Result<()> {
    match schema {
        Schema::Leaf => Ok(()),
        Schema::Overlays => {
            if let Value::Object(map) = value {
                let root = crate::config::schema();
                for (id, overlay) in map {
                    if let Schema::Object(fields) = &root {
                        check_overlay(overlay, fields, &join(path, id))?;
                    }
                }
            }
            Ok(())
        }
        Schema::Array(element) => {
            if let Value::Array(items) = value {
                for (i, item) in items.iter().enumerate() {
                    check_keys(item, element, &format!("{path}[{i}]"))?;
                }
            }
            Ok(())
        }
        Schema::Object(fields) => {
            if let Value::Object(map) = value {
                for (key, sub_value) in map {
                    match fields.iter().find(|(name, _)| name == key) {
                        Some((_, sub_schema)) => {
                            check_keys(sub_value, sub_schema, &join(path, key))?
                        }
                        None => {
                            return Err(Error::UnknownKey {
                                path: if path.is_empty() { "<root>".to_string() } else { path.to_string() },
                                key: key.clone(),
                                suggestion: nearest_key(key, fields.iter().map(|(n, _)| *n)),
                            })
                        }
                    }
                }
            }
            Ok(())
        }
    }
}

fn check_overlay(value: &Value, root_fields: &[(&'static str, Schema)], path: &str) -> Result<()> {
    if let Value::Object(map) = value {
        for (key, sub_value) in map {
            if key == "scenarios" {
                return Err(Error::UnknownKey {
                    path: path.to_string(),
                    key: key.clone(),
                    suggestion: None,
                });
            }
            match root_fields.iter().find(|(name, _)| name == key) {
                Some((_, sub_schema)) => check_keys(sub_value, sub_schema, &join(path, key))?,
                None => {
                    return Err(Error::UnknownKey {
                        path: path.to_string(),
                        key: key.clone(),
                        suggestion: nearest_key(key, root_fields.iter().map(|(n, _)| *n)),
                    })
                }
            }
        }
    }
    Ok(())
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn nearest_key<'a>(key: &str, candidates: impl Iterator<Item = &'a str>) -> Option<String> {
    candidates
        .map(|c| (levenshtein(key, c), c))
        .min_by_key(|(d, _)| *d)
        .map(|(_, c)| c.to_string())
}

fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.iter().enumerate() {
        let mut prev = row[0];
        row[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let cost = if ca == cb { prev } else { prev + 1 };
            prev = row[j + 1];
            row[j + 1] = cost.min(prev + 1).min(row[j] + 1);
        }
    }
    row[b.len()]
}
