//! JSON model and channel files.
//!
//! Rationals are written as `"p/q"` strings (integers may also appear as
//! bare JSON numbers). A model file may carry named states; a channel file
//! names its model by relative path, as `"builtin:<name>"`, or inline.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gpt::{validate_model, ClassicalToGPTChannel, ConeModel, State, ValidationOptions};
use crate::rational::{format_rational, parse_rational, serde_rational, Rational, Vector};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RationalText(#[serde(with = "serde_rational")] pub Rational);

fn to_vector(v: &[RationalText]) -> Vector {
    v.iter().map(|r| r.0.clone()).collect()
}

fn from_vector(v: &Vector) -> Vec<RationalText> {
    v.iter().map(|r| RationalText(r.clone())).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub name: String,
    pub dim: usize,
    pub primal_rays: Vec<Vec<RationalText>>,
    pub dual_rays: Vec<Vec<RationalText>>,
    pub unit: Vec<RationalText>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub states: BTreeMap<String, Vec<RationalText>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelRef {
    /// A path relative to the channel file, or `builtin:<name>`.
    Reference(String),
    Inline(ModelFile),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OutputEntry {
    /// A state named in the model file.
    Named(String),
    Coords(Vec<RationalText>),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub name: String,
    pub model: ModelRef,
    /// Defaults to `"0"`, `"1"`, ...
    #[serde(default)]
    pub alphabet: Option<Vec<String>>,
    pub outputs: Vec<OutputEntry>,
}

/// A validated model with its named states.
#[derive(Clone, Debug)]
pub struct LoadedModel {
    pub model: Arc<ConeModel>,
    pub states: BTreeMap<String, State>,
}

impl LoadedModel {
    pub fn state(&self, name: &str) -> Result<&State> {
        self.states
            .get(name)
            .ok_or_else(|| Error::InvalidArgument(format!("model {} has no state named {name:?}", self.model.name())))
    }
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str, source: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let message = strip_position(&inner.to_string());
        Error::Parse {
            location: format!("{source}: {path} (line {}, column {})", inner.line(), inner.column()),
            message,
        }
    })
}

/// serde_json appends " at line L column C"; the location carries it already.
fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

fn model_from_file(file: &ModelFile, opts: &ValidationOptions) -> Result<LoadedModel> {
    let model = ConeModel::new(
        file.name.clone(),
        file.dim,
        file.primal_rays.iter().map(|r| to_vector(r)).collect(),
        file.dual_rays.iter().map(|r| to_vector(r)).collect(),
        to_vector(&file.unit),
    )?;
    validate_model(&model, opts)?;
    let model = model.into_shared();
    let states = file
        .states
        .iter()
        .map(|(name, v)| {
            State::new(&model, to_vector(v))
                .map(|s| (name.clone(), s))
                .map_err(|e| Error::InvalidModel(format!("state {name:?}: {e}")))
        })
        .collect::<Result<_>>()?;
    Ok(LoadedModel { model, states })
}

/// Parses and validates a model file's text.
pub fn parse_model_json(text: &str, opts: &ValidationOptions) -> Result<LoadedModel> {
    model_from_file(&parse_json(text, "model")?, opts)
}

/// Parses model-file text without validating the cone invariants.
pub fn parse_model_file(text: &str) -> Result<ModelFile> {
    parse_json(text, "model")
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn load_model(path: &Path) -> Result<LoadedModel> {
    load_model_with(path, &ValidationOptions::default())
}

pub fn load_model_with(path: &Path, opts: &ValidationOptions) -> Result<LoadedModel> {
    let text = read(path)?;
    let file: ModelFile = parse_json(&text, &path.display().to_string())?;
    model_from_file(&file, opts)
}

/// Resolves `builtin:<name>` or a model-file path.
pub fn resolve_model(spec: &str, base_dir: &Path, opts: &ValidationOptions) -> Result<LoadedModel> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        let model = ConeModel::builtin(name)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown builtin model {name:?}")))?;
        return Ok(LoadedModel {
            model: model.into_shared(),
            states: BTreeMap::new(),
        });
    }
    let path: PathBuf = base_dir.join(spec);
    load_model_with(&path, opts)
}

/// Parses channel-file text; `base_dir` anchors relative model paths.
pub fn parse_channel_json(text: &str, base_dir: &Path, opts: &ValidationOptions) -> Result<ClassicalToGPTChannel> {
    let file: ChannelFile = parse_json(text, "channel")?;
    channel_from_file(&file, base_dir, opts)
}

fn channel_from_file(file: &ChannelFile, base_dir: &Path, opts: &ValidationOptions) -> Result<ClassicalToGPTChannel> {
    let loaded = match &file.model {
        ModelRef::Reference(spec) => resolve_model(spec, base_dir, opts)?,
        ModelRef::Inline(m) => model_from_file(m, opts)?,
    };
    let outputs = file
        .outputs
        .iter()
        .map(|o| match o {
            OutputEntry::Named(name) => Ok(loaded.state(name)?.coords().clone()),
            OutputEntry::Coords(v) => Ok(to_vector(v)),
        })
        .collect::<Result<Vec<_>>>()?;
    let alphabet = file
        .alphabet
        .clone()
        .unwrap_or_else(|| (0..outputs.len()).map(|x| x.to_string()).collect());
    ClassicalToGPTChannel::new(file.name.clone(), alphabet, &loaded.model, outputs)
}

pub fn load_channel(path: &Path) -> Result<ClassicalToGPTChannel> {
    load_channel_with(path, &ValidationOptions::default())
}

pub fn load_channel_with(path: &Path, opts: &ValidationOptions) -> Result<ClassicalToGPTChannel> {
    let text = read(path)?;
    let file: ChannelFile = parse_json(&text, &path.display().to_string())?;
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    channel_from_file(&file, dir, opts)
}

pub fn model_file(model: &ConeModel, states: &BTreeMap<String, State>) -> ModelFile {
    ModelFile {
        name: model.name().to_string(),
        dim: model.dim(),
        primal_rays: model.primal_rays().iter().map(from_vector).collect(),
        dual_rays: model.dual_rays().iter().map(from_vector).collect(),
        unit: from_vector(model.unit()),
        states: states.iter().map(|(k, s)| (k.clone(), from_vector(s.coords()))).collect(),
    }
}

/// Pretty JSON for a model; [`parse_model_json`] reads it back exactly.
pub fn emit_model(model: &ConeModel, states: &BTreeMap<String, State>) -> String {
    serde_json::to_string_pretty(&model_file(model, states)).expect("model files always serialize")
}

/// Parses a comma-separated vector such as `"1, 1/2, -3"`.
pub fn parse_vector_arg(text: &str) -> Result<Vector> {
    if text.trim().is_empty() {
        return Err(Error::Parse {
            location: "vector".into(),
            message: "empty vector".into(),
        });
    }
    text.split(',')
        .enumerate()
        .map(|(i, part)| {
            parse_rational(part).map_err(|e| match e {
                Error::Parse { message, .. } => Error::Parse {
                    location: format!("vector entry {i}"),
                    message,
                },
                other => other,
            })
        })
        .collect()
}

/// Parses a comma-separated list of rationals (e.g. an epsilon grid).
pub fn parse_rational_list(text: &str) -> Result<Vec<Rational>> {
    Ok(parse_vector_arg(text)?.0)
}

pub fn format_vector(v: &[Rational]) -> String {
    v.iter().map(format_rational).collect::<Vec<_>>().join(" ")
}
