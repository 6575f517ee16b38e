use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use xscale_core::{
    bicubic_baseline, bicubic_resample, build_graph, load_image, same_scale_knn, save_image,
    super_resolve, synthetic, AggregationConfig, Image, QualityReport, Weighting,
};

use crate::args::{AblateArgs, EvalArgs, GenArgs, PipelineArgs, SrArgs};
use crate::error::CliError;
use crate::manifest::{sidecar, write_jsonl, RunManifest};

fn load(path: &Path) -> Result<Image, CliError> {
    Ok(load_image(path)?)
}

/// Checks flags and returns the per-pass config with its pass count.
fn resolve(p: &PipelineArgs) -> Result<(AggregationConfig, u32), CliError> {
    let cfg = p.config();
    cfg.validate()?;
    let passes = p.passes().ok_or_else(|| {
        CliError::Usage(format!(
            "scale {} is not a power of search scale {}",
            p.scale,
            p.pass_scale()
        ))
    })?;
    Ok((cfg, passes))
}

/// Chains `passes` runs of the cross-scale pipeline.
fn run_pipeline(lr: &Image, cfg: &AggregationConfig, passes: u32) -> Result<Image, CliError> {
    let mut img = super_resolve(lr, cfg)?;
    for _ in 1..passes {
        img = super_resolve(&img, cfg)?;
    }
    Ok(img)
}

pub fn sr(a: SrArgs) -> Result<(), CliError> {
    let (cfg, passes) = resolve(&a.pipeline)?;
    let start = Instant::now();
    let lr = load(&a.input)?;
    if let Some(dump) = &a.dump_graph {
        let down = bicubic_resample(&lr, 1.0 / cfg.scale as f64, cfg.boundary)?;
        let graph = build_graph(&lr, &down, &cfg)?;
        fs::write(dump, graph.to_text())
            .map_err(|e| CliError::Io(format!("{}: {e}", dump.display())))?;
    }
    let out = run_pipeline(&lr, &cfg, passes)?;
    save_image(&out, &a.output)?;
    let mut outputs = vec![a.output.clone()];
    outputs.extend(a.dump_graph.clone());
    RunManifest {
        command: "sr".into(),
        config: Some(cfg),
        passes: Some(passes),
        inputs: vec![a.input.clone()],
        outputs,
        seed: a.pipeline.seed,
        wall_time_s: start.elapsed().as_secs_f64(),
        label: None,
    }
    .write_json(&sidecar(&a.output, "manifest.json"))
}

pub fn eval(a: EvalArgs) -> Result<(), CliError> {
    let sr = load(&a.sr)?;
    let gt = load(&a.gt)?;
    let report = QualityReport::evaluate(&sr, &gt, a.crop)?;
    println!("{}", report.to_json());
    Ok(())
}

/// One ablation configuration: a table label plus how to produce the estimate.
enum Variant {
    CrossScale(AggregationConfig),
    Bicubic,
    SameScaleKnn(AggregationConfig),
}

fn ablation_variants(
    a: &AblateArgs,
    base: &AggregationConfig,
    lr: &Image,
) -> Result<Vec<(String, Variant)>, CliError> {
    let with = |f: &dyn Fn(&mut AggregationConfig)| {
        let mut c = base.clone();
        f(&mut c);
        c
    };
    let bad = |v: &str| CliError::Usage(format!("invalid value `{v}` for axis `{}`", a.axis));
    let need_values = || {
        if a.values.is_empty() {
            Err(CliError::Usage(format!("axis `{}` needs --values", a.axis)))
        } else {
            Ok(())
        }
    };
    let mut rows = Vec::new();
    match a.axis.as_str() {
        "k" => {
            need_values()?;
            for v in &a.values {
                let k: usize = v.parse().map_err(|_| bad(v))?;
                rows.push((v.clone(), Variant::CrossScale(with(&|c| c.k = k))));
            }
        }
        "d" => {
            need_values()?;
            for v in &a.values {
                let d = if v == "whole" {
                    2 * lr.width().max(lr.height())
                } else {
                    v.parse().map_err(|_| bad(v))?
                };
                rows.push((v.clone(), Variant::CrossScale(with(&|c| c.window = d))));
            }
        }
        "weighting" => {
            need_values()?;
            for v in &a.values {
                let w = match v.as_str() {
                    "average" => Weighting::Average,
                    "gaussian" => Weighting::Gaussian,
                    _ => return Err(bad(v)),
                };
                rows.push((v.clone(), Variant::CrossScale(with(&|c| c.weighting = w))));
            }
        }
        "adapn" => {
            need_values()?;
            for v in &a.values {
                let on = match v.as_str() {
                    "on" => true,
                    "off" => false,
                    _ => return Err(bad(v)),
                };
                rows.push((v.clone(), Variant::CrossScale(with(&|c| c.adapn = on))));
            }
        }
        "baseline" => {
            rows.push(("bicubic".into(), Variant::Bicubic));
            rows.push(("same-scale-knn".into(), Variant::SameScaleKnn(base.clone())));
            rows.push(("cross-scale".into(), Variant::CrossScale(base.clone())));
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown axis `{other}` (expected k, d, weighting, adapn or baseline)"
            )))
        }
    }
    for (_, v) in &rows {
        if let Variant::CrossScale(c) | Variant::SameScaleKnn(c) = v {
            c.validate()?;
        }
    }
    Ok(rows)
}

pub fn ablate(a: AblateArgs) -> Result<(), CliError> {
    let (base, passes) = resolve(&a.pipeline)?;
    let total = a.pipeline.scale;
    let crop = a.crop.unwrap_or(total);
    let lr = load(&a.input)?;
    let gt = load(&a.gt)?;
    let variants = ablation_variants(&a, &base, &lr)?;

    let mut table = String::from("axis\tvalue\tpsnr_db\tssim\tcrop_border\n");
    let mut manifests = Vec::new();
    for (label, variant) in variants {
        let start = Instant::now();
        let (estimate, config) = match variant {
            Variant::Bicubic => (bicubic_baseline(&lr, total, base.boundary)?, None),
            Variant::SameScaleKnn(c) => {
                let denoised = same_scale_knn(&lr, &c)?;
                (bicubic_baseline(&denoised, total, c.boundary)?, Some(c))
            }
            Variant::CrossScale(c) => (run_pipeline(&lr, &c, passes)?, Some(c)),
        };
        let report = QualityReport::evaluate(&estimate, &gt, crop)?;
        let psnr = if report.psnr_db.is_infinite() {
            "inf".to_string()
        } else {
            format!("{:.4}", report.psnr_db)
        };
        table.push_str(&format!(
            "{}\t{label}\t{psnr}\t{:.6}\t{crop}\n",
            a.axis, report.ssim
        ));
        manifests.push(RunManifest {
            command: format!("ablate {}={label}", a.axis),
            config,
            passes: Some(passes),
            inputs: vec![a.input.clone(), a.gt.clone()],
            outputs: a.out.iter().cloned().collect(),
            seed: a.pipeline.seed,
            wall_time_s: start.elapsed().as_secs_f64(),
            label: Some(label),
        });
    }

    match &a.out {
        Some(out) => {
            fs::write(out, &table).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
            write_jsonl(&manifests, &sidecar(out, "manifest.jsonl"))
        }
        None => {
            print!("{table}");
            Ok(())
        }
    }
}

pub fn gen_synthetic(a: GenArgs) -> Result<(), CliError> {
    if a.scale < 1 || a.size == 0 || !a.size.is_multiple_of(2 * a.scale) {
        return Err(CliError::Usage(format!(
            "size {} must be a positive multiple of 2 x scale {}",
            a.size, a.scale
        )));
    }
    let start = Instant::now();
    let pair = synthetic::generate(a.seed, a.size, a.scale, a.scheme)?;
    save_image(&pair.hr, &a.hr)?;
    save_image(&pair.lr, &a.lr)?;
    let outputs: Vec<PathBuf> = vec![a.hr.clone(), a.lr.clone()];
    RunManifest {
        command: format!(
            "gen-synthetic {} size={} scale={}",
            a.scheme, a.size, a.scale
        ),
        config: None,
        passes: None,
        inputs: Vec::new(),
        outputs,
        seed: a.seed,
        wall_time_s: start.elapsed().as_secs_f64(),
        label: None,
    }
    .write_json(&sidecar(&a.hr, "manifest.json"))
}
