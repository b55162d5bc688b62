//! JSON experiment configuration with fail-closed validation.
//!
//! Unknown keys anywhere are rejected, and every schema violation names the
//! offending JSON-pointer path (e.g. `/selection/gamma/2`).

use super::results::OutputFormat;
use crate::domain::kernel::{DeterministicMap, KernelKind, LabelKernel};
use crate::domain::loss::{LossFunction, LossKind, TestKind};
use crate::error::{Error, Result};
use crate::sim::config::{
    AlphaSpec, ExperimentConfig, RidgeConfig, SelectionConfig, SurrogateMode,
};
use serde_json::{Map, Value};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone)]
pub struct OutputSpec {
    pub path: PathBuf,
    pub format: OutputFormat,
}

#[derive(Debug, Clone)]
pub struct ConfigFile {
    pub experiment: ExperimentConfig,
    pub output: Option<OutputSpec>,
}

pub fn read_config(path: &Path) -> Result<ConfigFile> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<ConfigFile> {
    let root: Value = serde_json::from_str(text)?;
    let obj = as_object(&root, "")?;
    check_keys(
        obj,
        "",
        &[
            "spec_version",
            "experiment",
            "kernel",
            "loss",
            "selection",
            "surrogate",
            "ridge",
            "output",
            "theory",
        ],
    )?;
    let version = req_u64(obj, "", "spec_version")?;
    if version != 1 {
        return Err(cfg_err("/spec_version", format!("unsupported version {version}")));
    }

    // experiment
    let exp = req_obj(obj, "", "experiment")?;
    check_keys(exp, "/experiment", &["N", "p", "seed", "replicates", "holdout"])?;
    let n = req_u64(exp, "/experiment", "N")? as usize;
    let p = req_u64(exp, "/experiment", "p")? as usize;
    let seed = req_u64(exp, "/experiment", "seed")?;
    let replicates = req_u64(exp, "/experiment", "replicates")? as usize;
    let holdout = opt_u64(exp, "/experiment", "holdout")?.unwrap_or(100_000) as usize;

    // kernel
    let ker = req_obj(obj, "", "kernel")?;
    check_keys(ker, "/kernel", &["kind", "params", "theta0_norm"])?;
    let kind_str = req_str(ker, "/kernel", "kind")?;
    let theta0_norm = req_f64(ker, "/kernel", "theta0_norm")?;
    let empty = Map::new();
    let params = opt_obj(ker, "/kernel", "params")?;
    let get_param = |name: &str| -> Result<f64> {
        let p = params.ok_or_else(|| cfg_err("/kernel/params", "missing params object"))?;
        req_f64(p, "/kernel/params", name)
    };
    let kind = match kind_str.as_str() {
        "glm-logistic" => {
            if let Some(p) = params {
                check_keys(p, "/kernel/params", &[])?;
            }
            KernelKind::GlmLogistic
        }
        "sign-flip" => {
            check_keys(params.unwrap_or(&empty), "/kernel/params", &["eta"])?;
            KernelKind::SignFlip {
                eta: get_param("eta")?,
            }
        }
        "staircase" => {
            check_keys(params.unwrap_or(&empty), "/kernel/params", &["eta", "zeta"])?;
            KernelKind::Staircase {
                eta: get_param("eta")?,
                zeta: get_param("zeta")?,
            }
        }
        "gaussian-noise" => {
            check_keys(params.unwrap_or(&empty), "/kernel/params", &["tau"])?;
            KernelKind::GaussianNoise {
                tau: get_param("tau")?,
            }
        }
        "deterministic-identity" => {
            if let Some(p) = params {
                check_keys(p, "/kernel/params", &[])?;
            }
            KernelKind::Deterministic(DeterministicMap::Identity)
        }
        "deterministic-cubic" => {
            check_keys(params.unwrap_or(&empty), "/kernel/params", &["c"])?;
            KernelKind::Deterministic(DeterministicMap::HermiteCubic { c: get_param("c")? })
        }
        other => {
            return Err(cfg_err("/kernel/kind", format!("unknown kernel kind {other:?}")));
        }
    };
    let kernel = LabelKernel::new(kind, theta0_norm)
        .map_err(|e| cfg_err("/kernel", e.to_string()))?;

    // loss
    let loss_obj = req_obj(obj, "", "loss")?;
    check_keys(loss_obj, "/loss", &["train", "test"])?;
    let train = match req_str(loss_obj, "/loss", "train")?.as_str() {
        "square" => LossKind::Square,
        "logistic" => LossKind::Logistic,
        other => return Err(cfg_err("/loss/train", format!("unknown loss {other:?}"))),
    };
    let test = match req_str(loss_obj, "/loss", "test")?.as_str() {
        "same-as-train" => TestKind::SameAsTrain,
        "misclassification" => TestKind::Misclassification,
        other => return Err(cfg_err("/loss/test", format!("unknown test loss {other:?}"))),
    };
    let loss = LossFunction {
        kind: train,
        test_kind: test,
    };

    // selection
    let sel = req_obj(obj, "", "selection")?;
    check_keys(sel, "/selection", &["kind", "gamma", "alpha", "reweight"])?;
    let sel_kind = req_str(sel, "/selection", "kind")?;
    let gammas = req_f64_array(sel, "/selection", "gamma")?;
    for (i, g) in gammas.iter().enumerate() {
        if !(*g > 0.0 && *g <= 1.0) {
            return Err(cfg_err(
                format!("/selection/gamma/{i}"),
                format!("gamma must be in (0,1], got {g}"),
            ));
        }
    }
    let alphas = match sel_kind.as_str() {
        "alpha-family" => parse_alphas(sel)?,
        "random" => vec![AlphaSpec::Finite(0.0)],
        "topk-hard" => vec![AlphaSpec::PlusInf],
        "topk-easy" => vec![AlphaSpec::MinusInf],
        other => {
            return Err(cfg_err(
                "/selection/kind",
                format!("unknown selection kind {other:?}"),
            ))
        }
    };
    let reweight = req_bool(sel, "/selection", "reweight")?;

    // surrogate
    let sur = req_obj(obj, "", "surrogate")?;
    check_keys(sur, "/surrogate", &["mode", "N_su", "lambda"])?;
    let surrogate = match req_str(sur, "/surrogate", "mode")?.as_str() {
        "perfect" => SurrogateMode::Perfect,
        "fitted" => SurrogateMode::Fitted {
            n_su: req_u64(sur, "/surrogate", "N_su")? as usize,
            lambda: req_f64(sur, "/surrogate", "lambda")?,
        },
        other => {
            return Err(cfg_err(
                "/surrogate/mode",
                format!("unknown surrogate mode {other:?}"),
            ))
        }
    };

    // ridge
    let ridge_obj = req_obj(obj, "", "ridge")?;
    check_keys(ridge_obj, "/ridge", &["lambda", "grid"])?;
    let ridge = match (
        opt_f64(ridge_obj, "/ridge", "lambda")?,
        ridge_obj.get("grid"),
    ) {
        (Some(l), None) => RidgeConfig::Fixed(l),
        (None, Some(_)) => RidgeConfig::Grid(req_f64_array(ridge_obj, "/ridge", "grid")?),
        (Some(_), Some(_)) => {
            return Err(cfg_err("/ridge", "give either lambda or grid, not both"))
        }
        (None, None) => return Err(cfg_err("/ridge", "missing lambda or grid")),
    };

    // output (optional: stdout-only runs)
    let output = match obj.get("output") {
        None => None,
        Some(v) => {
            let out = as_object(v, "/output")?;
            check_keys(out, "/output", &["path", "format"])?;
            let path = PathBuf::from(req_str(out, "/output", "path")?);
            let format: OutputFormat = req_str(out, "/output", "format")?.parse()?;
            Some(OutputSpec { path, format })
        }
    };
    let theory = match obj.get("theory") {
        None => true,
        Some(Value::Bool(b)) => *b,
        Some(_) => return Err(cfg_err("/theory", "must be a boolean")),
    };

    let experiment = ExperimentConfig {
        n,
        p,
        seed,
        replicates,
        holdout,
        kernel,
        loss,
        selection: SelectionConfig {
            gammas,
            alphas,
            reweight,
        },
        surrogate,
        ridge,
        theory,
    };
    experiment.validate()?;
    Ok(ConfigFile { experiment, output })
}

fn parse_alphas(sel: &Map<String, Value>) -> Result<Vec<AlphaSpec>> {
    let arr = sel
        .get("alpha")
        .ok_or_else(|| cfg_err("/selection/alpha", "missing"))?
        .as_array()
        .ok_or_else(|| cfg_err("/selection/alpha", "must be an array"))?;
    if arr.is_empty() {
        return Err(cfg_err("/selection/alpha", "must be nonempty"));
    }
    arr.iter()
        .enumerate()
        .map(|(i, v)| match v {
            Value::Number(n) => Ok(AlphaSpec::Finite(n.as_f64().unwrap())),
            Value::String(s) if s == "inf" || s == "+inf" => Ok(AlphaSpec::PlusInf),
            Value::String(s) if s == "-inf" => Ok(AlphaSpec::MinusInf),
            _ => Err(cfg_err(
                format!("/selection/alpha/{i}"),
                "must be a number or \"inf\"/\"-inf\"",
            )),
        })
        .collect()
}

fn cfg_err(pointer: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Config {
        pointer: pointer.into(),
        message: message.into(),
    }
}

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| cfg_err(path.to_string(), "must be an object"))
}

fn check_keys(obj: &Map<String, Value>, path: &str, allowed: &[&str]) -> Result<()> {
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(cfg_err(
                format!("{path}/{key}"),
                format!("unknown key (allowed: {allowed:?})"),
            ));
        }
    }
    Ok(())
}

fn req<'a>(obj: &'a Map<String, Value>, path: &str, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| cfg_err(format!("{path}/{key}"), "missing required key"))
}

fn req_u64(obj: &Map<String, Value>, path: &str, key: &str) -> Result<u64> {
    req(obj, path, key)?
        .as_u64()
        .ok_or_else(|| cfg_err(format!("{path}/{key}"), "must be a non-negative integer"))
}

fn opt_u64(obj: &Map<String, Value>, path: &str, key: &str) -> Result<Option<u64>> {
    match obj.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_u64()
            .map(Some)
            .ok_or_else(|| cfg_err(format!("{path}/{key}"), "must be a non-negative integer")),
    }
}

fn req_f64(obj: &Map<String, Value>, path: &str, key: &str) -> Result<f64> {
    req(obj, path, key)?
        .as_f64()
        .ok_or_else(|| cfg_err(format!("{path}/{key}"), "must be a number"))
}

fn opt_f64(obj: &Map<String, Value>, path: &str, key: &str) -> Result<Option<f64>> {
    match obj.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_f64()
            .map(Some)
            .ok_or_else(|| cfg_err(format!("{path}/{key}"), "must be a number")),
    }
}

fn req_str(obj: &Map<String, Value>, path: &str, key: &str) -> Result<String> {
    req(obj, path, key)?
        .as_str()
        .map(|s| s.to_string())
        .ok_or_else(|| cfg_err(format!("{path}/{key}"), "must be a string"))
}

fn req_bool(obj: &Map<String, Value>, path: &str, key: &str) -> Result<bool> {
    req(obj, path, key)?
        .as_bool()
        .ok_or_else(|| cfg_err(format!("{path}/{key}"), "must be a boolean"))
}

fn req_f64_array(obj: &Map<String, Value>, path: &str, key: &str) -> Result<Vec<f64>> {
    let arr = req(obj, path, key)?
        .as_array()
        .ok_or_else(|| cfg_err(format!("{path}/{key}"), "must be an array"))?;
    arr.iter()
        .enumerate()
        .map(|(i, v)| {
            v.as_f64()
                .ok_or_else(|| cfg_err(format!("{path}/{key}/{i}"), "must be a number"))
        })
        .collect()
}

fn req_obj<'a>(
    obj: &'a Map<String, Value>,
    path: &str,
    key: &str,
) -> Result<&'a Map<String, Value>> {
    as_object(req(obj, path, key)?, &format!("{path}/{key}"))
}

fn opt_obj<'a>(
    obj: &'a Map<String, Value>,
    path: &str,
    key: &str,
) -> Result<Option<&'a Map<String, Value>>> {
    match obj.get(key) {
        None => Ok(None),
        Some(v) => as_object(v, &format!("{path}/{key}")).map(Some),
    }
}
