use std::path::{Path, PathBuf};

use anyhow::Context;
use intesn_core::data::results::write_atomic;
use intesn_core::data::synthetic;
use intesn_core::data::{
    bundled_patches, encode_ppm, load_manifest, load_model, load_ppm, load_split_files, save_model, write_results,
    DelimitedSchema, ImagePatch, ModelFile, TimeSeriesDataset,
};
use intesn_core::reservoir::EngineKind;
use intesn_core::tasks::{
    bench_steps, run_classify, run_generator, run_patches, run_recall, BenchConfig, ClassifyConfig, GeneratorConfig,
    Outcome, PatchConfig, Protocol, RecallConfig,
};
use intesn_core::Engine;
use serde_json::Value;

use crate::config::{config_error, layered, read_config_file, Flags};
use crate::{BenchArgs, ClassifyArgs, Common, EngineChoice, GeneratorArgs, PatchArgs, RecallArgs};

fn seeds(common: &Common, default_count: u64) -> anyhow::Result<Vec<u64>> {
    let Some(spec) = &common.seeds else {
        return Ok((common.seed..common.seed + default_count).collect());
    };
    let bad = |e: std::num::ParseIntError| config_error(format!("seeds: {spec:?}: {e}"));
    let seeds: Vec<u64> = if spec.contains(',') {
        spec.split(',').map(|s| s.trim().parse().map_err(bad)).collect::<anyhow::Result<_>>()?
    } else {
        let count: u64 = spec.trim().parse().map_err(bad)?;
        (common.seed..common.seed + count).collect()
    };
    if seeds.is_empty() {
        return Err(config_error("seeds: at least one seed is required"));
    }
    Ok(seeds)
}

fn setup_jobs(jobs: Option<usize>) -> anyhow::Result<()> {
    if let Some(k) = jobs {
        if k == 0 {
            return Err(config_error("jobs: must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(k).build_global().context("configuring the worker pool")?;
    }
    Ok(())
}

fn protocol(common: &Common, default_engine: EngineChoice, default_seeds: u64) -> anyhow::Result<Protocol> {
    setup_jobs(common.jobs)?;
    let mut p = Protocol::new(common.engine.unwrap_or(default_engine).kinds(), seeds(common, default_seeds)?);
    p.keep_models = common.save_model.is_some();
    Ok(p)
}

fn config_file(common: &Common) -> anyhow::Result<Option<Value>> {
    common.config.as_deref().map(read_config_file).transpose()
}

fn warn_ignored_kappa(flags: &Flags, p: &Protocol) {
    if flags.contains("kappa") && p.engines.iter().all(|e| !e.is_integer()) {
        eprintln!("warning: --kappa has no effect on the esn engine; ignored");
    }
}

/// `dir/stem-tag.ext`.
fn suffixed(path: &Path, tag: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}-{tag}.{}", ext.to_string_lossy()),
        None => format!("{stem}-{tag}"),
    };
    path.with_file_name(name)
}

fn finish(experiment: &str, outcome: Outcome, common: &Common, out: Option<PathBuf>) -> anyhow::Result<()> {
    let out = out.unwrap_or_else(|| PathBuf::from(format!("{experiment}.json")));
    write_results(&outcome.result, &out, common.format(&out))?;
    if let Some(path) = &common.save_model {
        let many = outcome.models.len() > 1;
        for m in outcome.models {
            let target = if many { suffixed(path, m.kind.label()) } else { path.clone() };
            save_model(&ModelFile::from_trained(m, outcome.result.config.clone()), &target)?;
            eprintln!("saved model {}", target.display());
        }
    }
    println!("{}", outcome.result.summary_line());
    eprintln!("wrote {}", out.display());
    Ok(())
}

pub fn recall(a: RecallArgs) -> anyhow::Result<()> {
    let p = protocol(&a.common, EngineChoice::Both, 10)?;
    let mut flags = Flags::default();
    flags
        .set("n", a.n)
        .set("kappa", a.kappa)
        .set("rho", a.rho)
        .set("beta", a.beta)
        .set("lambda", a.lambda)
        .set("alphabet", a.alphabet)
        .set("max_delay", a.max_delay)
        .set("train_len", a.train_len)
        .set("large_train_len", a.large_train_len)
        .set("washout", a.washout)
        .set("test_len", a.test_len)
        .flag("shuffle_targets", a.shuffle_targets);
    warn_ignored_kappa(&flags, &p);
    let cfg: RecallConfig = layered(&RecallConfig::default(), config_file(&a.common)?.as_ref(), flags.0)?;
    let outcome = run_recall(&cfg, &p)?;
    finish("recall", outcome, &a.common, a.common.out.clone())
}

pub fn patches(a: PatchArgs) -> anyhow::Result<()> {
    let p = protocol(&a.common, EngineChoice::Intesn, 10)?;
    let images: Vec<ImagePatch> = if a.images.is_empty() {
        bundled_patches()
    } else {
        a.images.iter().map(|path| load_ppm(path)).collect::<Result<_, _>>()?
    };
    let mut flags = Flags::default();
    let reservoirs: Option<Vec<Value>> = (!a.reservoirs.is_empty())
        .then(|| a.reservoirs.iter().map(|&(n, kappa)| serde_json::json!({"n": n, "kappa": kappa})).collect());
    flags.set("reservoirs", reservoirs).set("max_pixels", a.max_pixels);
    let cfg: PatchConfig = layered(&PatchConfig::default(), config_file(&a.common)?.as_ref(), flags.0)?;
    let outcome = run_patches(&images, &cfg, &p)?;
    if let Some(dir) = &a.images_out {
        write_reconstructions(dir, &outcome, &images, &cfg)?;
    }
    finish("patches", outcome, &a.common, a.common.out.clone())
}

fn write_reconstructions(
    dir: &Path,
    outcome: &Outcome,
    images: &[ImagePatch],
    cfg: &PatchConfig,
) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let run = &outcome.result.runs[0];
    for r in &cfg.reservoirs {
        for (i, im) in images.iter().enumerate() {
            for d in 0..images.len() {
                let key = format!("reconstruction.n{}.image{i}.d{d}", r.n);
                let values = run.metric(&key).with_context(|| format!("missing {key}"))?.to_vec();
                let rec = ImagePatch::new(im.width(), im.height(), im.channels(), values)?;
                let ext = if im.channels() == 1 { "pgm" } else { "ppm" };
                let path = dir.join(format!("n{}_image{i}_d{d}.{ext}", r.n));
                write_atomic(&path, &encode_ppm(&rec))?;
            }
        }
    }
    Ok(())
}

fn datasets(a: &ClassifyArgs) -> anyhow::Result<Vec<TimeSeriesDataset>> {
    let schema = DelimitedSchema { delimiter: a.delimiter, remap_labels: a.remap_labels, ..Default::default() };
    if let Some(m) = &a.manifest {
        return Ok(vec![load_manifest(m)?]);
    }
    if let (Some(train), Some(test)) = (&a.train, &a.test) {
        return Ok(vec![load_split_files(train, test, &schema)?]);
    }
    match a.synthetic.as_deref().unwrap_or("suite") {
        "suite" => Ok(synthetic::suite(a.data_seed)?),
        "two-level" => Ok(vec![synthetic::two_level(20, 10, 50)?]),
        name => {
            let shapes = synthetic::suite_shapes();
            let shape = shapes.iter().find(|s| s.name == name).ok_or_else(|| {
                let names: Vec<&str> = shapes.iter().map(|s| s.name.as_str()).collect();
                config_error(format!(
                    "synthetic: unknown dataset {name:?} (one of suite, two-level, {})",
                    names.join(", ")
                ))
            })?;
            Ok(vec![synthetic::generate(shape, a.data_seed)?])
        }
    }
}

pub fn classify(a: ClassifyArgs) -> anyhow::Result<()> {
    let p = protocol(&a.common, EngineChoice::Both, 10)?;
    let mut flags = Flags::default();
    flags
        .set("n", a.n)
        .set("kappa", a.kappa)
        .set("rho", a.rho)
        .set("beta", a.beta)
        .set("lambda", a.lambda)
        .set("level_step", a.level_step)
        .set("large_size", a.large_size)
        .flag("shuffle_labels", a.shuffle_labels);
    warn_ignored_kappa(&flags, &p);
    let cfg: ClassifyConfig = layered(&ClassifyConfig::default(), config_file(&a.common)?.as_ref(), flags.0)?;
    let sets = datasets(&a)?;
    let out = a.common.out.clone().unwrap_or_else(|| PathBuf::from("classify.json"));
    let many = sets.len() > 1;
    for d in &sets {
        let outcome = run_classify(d, &cfg, &p).with_context(|| format!("dataset {}", d.name))?;
        let target = if many { suffixed(&out, &d.name) } else { out.clone() };
        print!("{}: ", d.name);
        if many && a.common.save_model.is_some() {
            let common = Common {
                save_model: a.common.save_model.as_deref().map(|m| suffixed(m, &d.name)),
                ..clone_common(&a.common)
            };
            finish("classify", outcome, &common, Some(target))?;
        } else {
            finish("classify", outcome, &a.common, Some(target))?;
        }
    }
    Ok(())
}

fn clone_common(c: &Common) -> Common {
    Common {
        engine: c.engine,
        config: c.config.clone(),
        seed: c.seed,
        seeds: c.seeds.clone(),
        jobs: c.jobs,
        out: c.out.clone(),
        format: c.format,
        save_model: c.save_model.clone(),
    }
}

pub fn generator(experiment: &str, a: GeneratorArgs) -> anyhow::Result<()> {
    let p = protocol(&a.common, EngineChoice::Both, 100)?;
    let preset = if experiment == "sine" { GeneratorConfig::sine() } else { GeneratorConfig::mackey() };
    let mut flags = Flags::default();
    flags
        .set("n", a.n)
        .set("kappa", a.kappa)
        .set("rho", a.rho)
        .set("beta", a.beta)
        .set("bias", a.bias)
        .set("lambda", a.lambda)
        .set("train_len", a.train_len)
        .set("washout", a.washout)
        .set("horizon", a.horizon)
        .set("score_steps", a.score_steps)
        .set("esn_quantization", a.esn_quantization.clone())
        .set("teacher_noise", a.teacher_noise);
    warn_ignored_kappa(&flags, &p);
    let file = config_file(&a.common)?;
    let explicit_score = flags.contains("score_steps") || file.as_ref().is_some_and(|f| f.get("score_steps").is_some());
    let mut cfg: GeneratorConfig = layered(&preset, file.as_ref(), flags.0)?;
    if !explicit_score && cfg.score_steps > cfg.horizon {
        cfg.score_steps = cfg.horizon;
    }
    let outcome = run_generator(experiment, &cfg, &p)?;
    finish(experiment, outcome, &a.common, a.common.out.clone())
}

pub fn bench(a: BenchArgs) -> anyhow::Result<()> {
    let mut flags = Flags::default();
    flags
        .set("n", a.n)
        .set("kappa", a.kappa)
        .set("steps", a.steps)
        .set("repetitions", a.repetitions)
        .set("seed", a.seed);
    let file = a.config.as_deref().map(read_config_file).transpose()?;
    let cfg: BenchConfig = layered(&BenchConfig::default(), file.as_ref(), flags.0)?;
    let report = bench_steps(&cfg)?;
    if let Some(out) = &a.out {
        let mut text = serde_json::to_string_pretty(&serde_json::to_value(&report)?)?;
        text.push('\n');
        write_atomic(out, text.as_bytes())?;
        eprintln!("wrote {}", out.display());
    }
    println!("{}", report.summary_line());
    Ok(())
}

pub fn inspect_model(path: &Path) -> anyhow::Result<()> {
    let m = load_model(path)?;
    println!("engine: {}", m.kind);
    println!("seed: {}", m.seed);
    match &m.engine {
        Engine::Esn(e) => {
            let c = e.config();
            println!(
                "reservoir: tanh, N={} inputs={} feedback={} rho={} beta={}",
                c.size, c.inputs, c.feedback, c.rho, c.beta
            );
        }
        Engine::Int(e) => {
            let c = e.config();
            let packed = e.packed_state()?;
            println!(
                "reservoir: integer, N={} kappa={} shift={} ({} bits/neuron, {} state bytes)",
                c.size(),
                c.kappa(),
                c.shift(),
                packed.bits_per_element(),
                packed.as_bytes().len()
            );
        }
    }
    println!("steps: {}", m.engine.steps());
    for (name, r) in &m.readouts {
        println!("readout {name}: {}x{} lambda={}", r.outputs(), r.inputs(), r.lambda());
    }
    println!("config: {}", serde_json::to_string(&m.config)?);
    if m.kind == EngineKind::Esn && !matches!(m.engine, Engine::Esn(_)) {
        return Err(config_error("model engine kind does not match its reservoir"));
    }
    Ok(())
}
