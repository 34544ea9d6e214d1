// SPDX-License-Identifier: MIT

//! JSON files for networks, kernel instances and grid models.
//!
//! Net schema: `{"dims": [l0, ..., lL], "layers": [{"W": [[row], ...], "B": [...]}]}`
//! with each `W` stored row by row.

use std::fs;
use std::path::{Path, PathBuf};

use qnet::bellman::{MdpModel, RewardNet};
use qnet::fixed_point::DiscreteKernelInstance;
use qnet::mlfp::NoiseLaw;
use qnet::{Ann, Csr, Error, Layer, Result};
use serde::{Deserialize, Serialize};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayerFile {
    #[serde(rename = "W")]
    w: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    b: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetFile {
    dims: Vec<usize>,
    layers: Vec<LayerFile>,
}

fn parse_err(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse { location: location.into(), message: message.into() }
}

fn json_err(path: &str, e: serde_json::Error) -> Error {
    parse_err(format!("{path}: line {} column {}", e.line(), e.column()), e.to_string())
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    parse_err(path.display().to_string(), e.to_string())
}

/// Canonical JSON text of a net (compact, newline-terminated).
pub fn net_to_json(net: &Ann) -> Result<String> {
    let mut layers = Vec::with_capacity(net.depth());
    for (k, l) in net.layers().iter().enumerate() {
        if l.b.iter().any(|v| !v.is_finite()) || l.w.to_dense().iter().any(|v| !v.is_finite()) {
            return Err(parse_err(format!("layers[{k}]"), "non-finite entry cannot be written"));
        }
        layers.push(LayerFile { w: l.w.to_rows(), b: l.b.clone() });
    }
    let file = NetFile { dims: net.describe().dims, layers };
    let mut s = serde_json::to_string(&file).map_err(|e| json_err("net", e))?;
    s.push('\n');
    Ok(s)
}

pub fn net_from_json(text: &str) -> Result<Ann> {
    let file: NetFile = serde_json::from_str(text).map_err(|e| json_err("net", e))?;
    if file.layers.is_empty() {
        return Err(parse_err("layers", "a net needs at least one layer"));
    }
    if file.dims.len() != file.layers.len() + 1 {
        return Err(parse_err("dims", format!("{} dims for {} layers", file.dims.len(), file.layers.len())));
    }
    let mut layers = Vec::with_capacity(file.layers.len());
    for (k, lf) in file.layers.iter().enumerate() {
        let (rows, cols) = (file.dims[k + 1], file.dims[k]);
        if lf.w.len() != rows {
            return Err(parse_err(format!("layers[{k}].W"), format!("{} rows, dims say {rows}", lf.w.len())));
        }
        if let Some(r) = lf.w.iter().position(|r| r.len() != cols) {
            return Err(parse_err(
                format!("layers[{k}].W[{r}]"),
                format!("{} columns, dims say {cols}", lf.w[r].len()),
            ));
        }
        if lf.b.len() != rows {
            return Err(parse_err(format!("layers[{k}].B"), format!("length {}, dims say {rows}", lf.b.len())));
        }
        let layer = Layer::new(Csr::from_rows(&lf.w), lf.b.clone())
            .map_err(|e| parse_err(format!("layers[{k}]"), e.to_string()))?;
        layers.push(layer);
    }
    Ann::new(layers).map_err(|e| parse_err("layers", e.to_string()))
}

pub fn export_net(net: &Ann, path: &Path) -> Result<()> {
    fs::write(path, net_to_json(net)?).map_err(|e| io_err(path, e))
}

pub fn import_net(path: &Path) -> Result<Ann> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    net_from_json(&text).map_err(|e| match e {
        Error::Parse { location, message } => parse_err(format!("{}: {location}", path.display()), message),
        other => other,
    })
}

/// Kernel instance: `transition[a][x][y]` over `states`, with weights.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelFile {
    pub states: Vec<Vec<f64>>,
    pub transition: Vec<Vec<Vec<f64>>>,
    pub weight: Vec<f64>,
}

pub fn kernel_to_json(inst: &DiscreteKernelInstance) -> Result<String> {
    let file = KernelFile {
        states: inst.states().to_vec(),
        transition: inst.transition().to_vec(),
        weight: inst.weight().to_vec(),
    };
    let mut s = serde_json::to_string(&file).map_err(|e| json_err("instance", e))?;
    s.push('\n');
    Ok(s)
}

pub fn kernel_from_json(text: &str) -> Result<DiscreteKernelInstance> {
    let f: KernelFile = serde_json::from_str(text).map_err(|e| json_err("instance", e))?;
    DiscreteKernelInstance::new(f.states, f.transition, f.weight)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseFile {
    pub points: Vec<Vec<f64>>,
    pub probs: Vec<f64>,
}

/// Grid model: tables drive the oracle, nets drive the Q-network.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub states: Vec<Vec<f64>>,
    pub n_actions: usize,
    pub discount: f64,
    pub beta: f64,
    pub noise: NoiseFile,
    /// `reward[x][a]` on the grid.
    pub reward: Vec<Vec<f64>>,
    /// `next_state[a][x][k]`: grid index reached from `x` under action `a` and noise atom `k`.
    pub next_state: Vec<Vec<Vec<usize>>>,
    /// Paths relative to the model file.
    pub reward_net: PathBuf,
    pub transition_nets: Vec<PathBuf>,
}

/// Writes `model.json` plus its nets into `dir`.
pub fn export_model(model: &MdpModel, g: &RewardNet, dir: &Path) -> Result<PathBuf> {
    let NoiseLaw::Atoms { points, probs } = &model.noise else {
        return Err(Error::OracleDomain("model files need finitely many noise atoms".into()));
    };
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut next_state = Vec::with_capacity(model.n_actions);
    for a in 0..model.n_actions {
        let mut rows = Vec::with_capacity(model.states.len());
        for x in &model.states {
            rows.push(points.iter().map(|xi| model.locate(&model.transition(a, x, xi))).collect::<Result<Vec<_>>>()?);
        }
        next_state.push(rows);
    }
    export_net(&g.net, &dir.join("reward.json"))?;
    let mut transition_nets = Vec::new();
    for (a, t) in model.transition_nets.iter().enumerate() {
        let name = PathBuf::from(format!("transition{a}.json"));
        export_net(t, &dir.join(&name))?;
        transition_nets.push(name);
    }
    let file = ModelFile {
        states: model.states.clone(),
        n_actions: model.n_actions,
        discount: model.discount,
        beta: model.beta,
        noise: NoiseFile { points: points.clone(), probs: probs.clone() },
        reward: model.states.iter().map(|x| model.reward(x)).collect(),
        next_state,
        reward_net: "reward.json".into(),
        transition_nets,
    };
    let path = dir.join("model.json");
    let text = serde_json::to_string_pretty(&file).map_err(|e| json_err("model", e))? + "\n";
    fs::write(&path, text).map_err(|e| io_err(&path, e))?;
    Ok(path)
}

pub fn import_model(path: &Path) -> Result<(MdpModel, RewardNet)> {
    let loc = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let f: ModelFile = serde_json::from_str(&text).map_err(|e| json_err(&loc, e))?;
    let (ns, na) = (f.states.len(), f.n_actions);
    let d = f.states.first().map_or(0, Vec::len);
    if f.reward.len() != ns || f.reward.iter().any(|r| r.len() != na) {
        return Err(parse_err(format!("{loc}: reward"), format!("expected {ns} rows of {na} entries")));
    }
    let atoms = f.noise.points.len();
    let shape_ok = f.next_state.len() == na
        && f.next_state
            .iter()
            .all(|p| p.len() == ns && p.iter().all(|r| r.len() == atoms && r.iter().all(|&y| y < ns)));
    if !shape_ok {
        return Err(parse_err(format!("{loc}: next_state"), format!("expected {na}×{ns}×{atoms} grid indices")));
    }
    let base = path.parent().unwrap_or(Path::new("."));
    let g = import_net(&base.join(&f.reward_net))?;
    let nets = f.transition_nets.iter().map(|p| import_net(&base.join(p))).collect::<Result<Vec<_>>>()?;
    let noise = NoiseLaw::atoms(f.noise.points.clone(), f.noise.probs)?;
    let (states, reward, next) = (f.states.clone(), f.reward, f.next_state);
    let points = f.noise.points;
    let find = move |grid: &[Vec<f64>], x: &[f64]| {
        grid.iter().position(|s| s.iter().zip(x).all(|(a, b)| (a - b).abs() <= 1e-9))
    };
    let (s1, s2) = (states.clone(), states.clone());
    let model = MdpModel::new(
        d,
        na,
        f.discount,
        f.beta,
        f.states,
        noise,
        nets,
        move |x: &[f64]| find(&s1, x).map_or_else(|| vec![f64::NAN; na], |i| reward[i].clone()),
        move |a: usize, x: &[f64], xi: &[f64]| {
            // Off-grid inputs map to NaN, which the oracle reports as a domain error.
            match (find(&s2, x), find(&points, xi)) {
                (Some(i), Some(k)) => s2[next[a][i][k]].clone(),
                _ => vec![f64::NAN; x.len()],
            }
        },
    )?;
    Ok((model, RewardNet { net: g, eps: 0.0 }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use qnet::maxnet::max_net;

    #[test]
    fn round_trip_is_exact_and_canonical() {
        let net = max_net(8, 0.1).unwrap();
        let text = net_to_json(&net).unwrap();
        assert_eq!(net_from_json(&text).unwrap(), net);
        assert_eq!(text, net_to_json(&net_from_json(&text).unwrap()).unwrap());
    }

    #[test]
    fn mismatched_dims_name_the_layer() {
        let bad = r#"{"dims":[2,3,1],"layers":[{"W":[[1,2],[3,4],[5,6]],"B":[0,0,0]},{"W":[[1,2]],"B":[0]}]}"#;
        match net_from_json(bad) {
            Err(Error::Parse { location, .. }) => assert_eq!(location, "layers[1].W[0]"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(net_from_json("{\"dims\": [1,"), Err(Error::Parse { .. })));
    }
}
