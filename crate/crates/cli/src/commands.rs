use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::anyhow;
use serde::{Deserialize, Serialize};

use locnoise::io::{self, PredictionFrame};
use locnoise::labelgen::{
    default_perception_range, distort_scenes, DEFAULT_X_RANGE, DEFAULT_Y_RANGE,
};
use locnoise::metric::{average_precision, evaluate_rings, ApReport, EvalFrame, RingFrame};
use locnoise::{
    build_scene, Execution, LabelFrame, NoiseConfig, Rect, RingReport, RingSpec, SceneTemplate,
};

use crate::args::{DistortArgs, EvalApArgs, EvalRingsArgs, NoiseFlags, PerceptionArgs, SynthArgs};
use crate::output::{read_config, read_input, CliError, CliResult, OutDir, ResultExt};

pub const RUN_CONFIG: &str = "run_config.json";

/// Resolved parameters of one invocation, written next to its outputs.
/// Output files are listed by name relative to the output directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub version: String,
    pub inputs: BTreeMap<String, PathBuf>,
    pub outputs: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub template: Option<SceneTemplate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perception: Option<Rect>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rings: Option<RingSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<Vec<f64>>,
}

impl RunConfig {
    fn new(command: &str) -> Self {
        Self {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            inputs: BTreeMap::new(),
            outputs: Vec::new(),
            seed: None,
            template: None,
            noise: None,
            perception: None,
            rings: None,
            thresholds: None,
        }
    }

    fn input(&mut self, name: &str, path: &Path) {
        self.inputs.insert(name.into(), path.to_path_buf());
    }
}

fn config_error(msg: impl Into<String>) -> CliError {
    CliError::Config(anyhow!(msg.into()))
}

fn parse_structured<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = read_config(path)?;
    let parsed = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(anyhow::Error::from)
    } else {
        toml::from_str(&text).map_err(anyhow::Error::from)
    };
    parsed.map_err(|e| CliError::Config(e.context(format!("parsing {}", path.display()))))
}

pub fn synth(args: &SynthArgs) -> CliResult<()> {
    let mut tpl: SceneTemplate = match &args.template {
        Some(p) => parse_structured(p)?,
        None => SceneTemplate::default(),
    };
    if let Some(k) = args.kind {
        tpl.kind = k.into();
    }
    if let Some(v) = args.lane_width {
        tpl.lane_width = v;
    }
    if let Some(v) = args.length {
        tpl.length = v;
    }
    if let Some(v) = args.num_lanes {
        tpl.num_lanes = v;
    }
    if let Some(v) = args.curvature {
        tpl.curvature = v;
    }
    tpl.seed = args.seed;
    let (map, traj) = build_scene(&tpl)?;

    let out = OutDir::create(&args.out_dir)?;
    out.write("map.json", io::map_to_json(&map)?.as_bytes())?;
    out.write("traj.json", io::trajectories_to_json(&[traj])?.as_bytes())?;
    let mut rc = RunConfig::new("synth");
    if let Some(p) = &args.template {
        rc.input("template", p);
    }
    rc.outputs = vec!["map.json".into(), "traj.json".into()];
    rc.seed = Some(tpl.seed);
    rc.template = Some(tpl);
    out.write_json(RUN_CONFIG, &rc)
}

fn apply_noise_flags(cfg: &mut NoiseConfig, f: &NoiseFlags) {
    if let Some(k) = f.kind {
        cfg.kind = k.into();
    }
    let fields = [
        (f.eps_l, &mut cfg.eps_l),
        (f.eps_r, &mut cfg.eps_r),
        (f.sigma_l, &mut cfg.sigma_l),
        (f.sigma_r, &mut cfg.sigma_r),
        (f.gamma, &mut cfg.gamma),
        (f.noise_ratio, &mut cfg.noise_ratio),
    ];
    for (flag, field) in fields {
        if let Some(v) = flag {
            *field = v;
        }
    }
    if let Some(v) = f.octave {
        cfg.octave = v;
    }
    if let Some(m) = f.ratio_mode {
        cfg.ratio_mode = m.into();
    }
    if let Some(v) = f.heading_correction {
        cfg.heading_correction = v;
    }
}

pub fn resolve_noise(args: &DistortArgs) -> CliResult<NoiseConfig> {
    let mut cfg = match (&args.config, &args.preset) {
        (Some(p), _) => parse_structured(p)?,
        (None, Some(name)) => NoiseConfig::preset(name)
            .ok_or_else(|| config_error(format!("unknown preset {name:?}")))?,
        (None, None) => NoiseConfig::default(),
    };
    apply_noise_flags(&mut cfg, &args.noise);
    cfg.seed = args.seed;
    cfg.validate().ctx("noise configuration")?;
    Ok(cfg)
}

fn perception_rect(p: &PerceptionArgs) -> CliResult<Rect> {
    if p.x_range.is_none() && p.y_range.is_none() {
        return Ok(default_perception_range());
    }
    let pair = |v: &Option<Vec<f64>>, default: [f64; 2]| match v.as_deref() {
        Some(&[a, b]) => [a, b],
        _ => default,
    };
    Rect::new(
        pair(&p.x_range, DEFAULT_X_RANGE),
        pair(&p.y_range, DEFAULT_Y_RANGE),
    )
    .ctx("perception range")
}

#[derive(Serialize)]
struct SceneSummary<'a> {
    scene_id: &'a str,
    frames: usize,
    altered: bool,
}

pub fn distort(args: &DistortArgs, exec: Execution) -> CliResult<()> {
    let cfg = resolve_noise(args)?;
    let rect = perception_rect(&args.perception)?;
    let map = io::parse_map(&read_input(&args.map)?).ctx(args.map.display())?;
    let trajs = io::parse_trajectories(&read_input(&args.traj)?).ctx(args.traj.display())?;

    let results = distort_scenes(&map, &trajs, &cfg, &rect, exec)?;
    let noisy_trajs: Vec<_> = results.iter().map(|r| r.noisy_trajectory.clone()).collect();
    let clean: Vec<LabelFrame> = results.iter().flat_map(|r| r.clean().cloned()).collect();
    let noisy: Vec<LabelFrame> = results.iter().flat_map(|r| r.noisy().cloned()).collect();
    let summary: Vec<SceneSummary> = results
        .iter()
        .map(|r| SceneSummary {
            scene_id: r.noisy_trajectory.scene_id(),
            frames: r.pairs.len(),
            altered: r.altered,
        })
        .collect();

    let out = OutDir::create(&args.out_dir)?;
    out.write(
        "noisy_traj.json",
        io::trajectories_to_json(&noisy_trajs)?.as_bytes(),
    )?;
    out.write("clean_labels.jsonl", io::frames_to_jsonl(&clean).as_bytes())?;
    out.write("noisy_labels.jsonl", io::frames_to_jsonl(&noisy).as_bytes())?;
    out.write_json("scenes.json", &summary)?;

    let mut rc = RunConfig::new("distort");
    rc.input("map", &args.map);
    rc.input("traj", &args.traj);
    if let Some(p) = &args.config {
        rc.input("config", p);
    }
    rc.outputs = [
        "noisy_traj.json",
        "clean_labels.jsonl",
        "noisy_labels.jsonl",
        "scenes.json",
    ]
    .map(String::from)
    .to_vec();
    rc.seed = Some(cfg.seed);
    rc.noise = Some(cfg);
    rc.perception = Some(rect);
    out.write_json(RUN_CONFIG, &rc)
}

fn read_frames(path: &Path) -> CliResult<Vec<LabelFrame>> {
    io::parse_jsonl(&read_input(path)?).ctx(path.display())
}

fn read_predictions(path: &Path) -> CliResult<Vec<PredictionFrame>> {
    io::parse_jsonl(&read_input(path)?).ctx(path.display())
}

#[derive(Serialize)]
struct ApOutput<'a> {
    summary: BTreeMap<String, Option<f64>>,
    report: &'a ApReport,
}

pub fn eval_ap(args: &EvalApArgs, exec: Execution) -> CliResult<()> {
    if args.thresholds.is_empty() || args.thresholds.iter().any(|t| *t <= 0.0 || !t.is_finite()) {
        return Err(config_error("thresholds must be positive"));
    }
    let gt = read_frames(&args.gt)?;
    let pred = read_predictions(&args.pred)?;
    let frames: Vec<EvalFrame> = io::align_frames(&gt, &pred)?
        .into_iter()
        .map(|(g, p)| EvalFrame {
            gts: g.elements.clone(),
            preds: p.elements.clone(),
        })
        .collect();
    let report = average_precision(&frames, &args.thresholds, exec);
    let output = ApOutput {
        summary: report.summary(),
        report: &report,
    };

    let out = OutDir::create(&args.out_dir)?;
    out.write_json("ap.json", &output)?;
    let mut rc = RunConfig::new("eval-ap");
    rc.input("gt", &args.gt);
    rc.input("pred", &args.pred);
    rc.outputs = vec!["ap.json".into()];
    rc.thresholds = Some(args.thresholds.clone());
    out.write_json(RUN_CONFIG, &rc)?;
    println!(
        "{}",
        serde_json::to_string(&output.summary).expect("serializable")
    );
    Ok(())
}

pub const SERIES_GT_DISTORTION: &str = "gt_distortion";
pub const SERIES_PREDICTION: &str = "prediction";

pub fn eval_rings(args: &EvalRingsArgs, exec: Execution) -> CliResult<()> {
    let spec = RingSpec::new(args.ring_width, args.num_rings).ctx("ring specification")?;
    let gt = read_frames(&args.gt)?;
    let mut reports: BTreeMap<&str, RingReport> = BTreeMap::new();
    if let Some(path) = &args.distorted {
        let other = read_frames(path)?;
        let frames: Vec<RingFrame> = io::align_frames(&gt, &other)?
            .into_iter()
            .map(|(g, o)| RingFrame {
                gts: g.elements.clone(),
                others: o.elements.clone(),
            })
            .collect();
        reports.insert(SERIES_GT_DISTORTION, evaluate_rings(&frames, &spec, exec)?);
    }
    if let Some(path) = &args.pred {
        let other = read_predictions(path)?;
        let frames: Vec<RingFrame> = io::align_frames(&gt, &other)?
            .into_iter()
            .map(|(g, o)| RingFrame {
                gts: g.elements.clone(),
                others: o.elements.iter().map(|p| p.element.clone()).collect(),
            })
            .collect();
        reports.insert(SERIES_PREDICTION, evaluate_rings(&frames, &spec, exec)?);
    }

    let mut csv_out = csv::Writer::from_writer(Vec::new());
    for name in [SERIES_GT_DISTORTION, SERIES_PREDICTION] {
        if let Some(r) = reports.get(name) {
            for row in r.rows(name) {
                csv_out.serialize(row).expect("in-memory csv");
            }
        }
    }
    let csv_bytes = csv_out.into_inner().expect("in-memory csv");

    let out = OutDir::create(&args.out_dir)?;
    out.write_json("rings.json", &reports)?;
    out.write("rings.csv", &csv_bytes)?;
    let mut rc = RunConfig::new("eval-rings");
    rc.input("gt", &args.gt);
    if let Some(p) = &args.distorted {
        rc.input("distorted", p);
    }
    if let Some(p) = &args.pred {
        rc.input("pred", p);
    }
    rc.outputs = vec!["rings.json".into(), "rings.csv".into()];
    rc.rings = Some(spec);
    out.write_json(RUN_CONFIG, &rc)?;

    for (name, r) in &reports {
        let medians: Vec<String> = r
            .medians()
            .into_iter()
            .map(|m| m.map_or("-".into(), |v| format!("{v:.4}")))
            .collect();
        println!("{name}: median per ring [{}]", medians.join(", "));
    }
    Ok(())
}
