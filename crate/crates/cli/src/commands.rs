use std::fs;
use std::path::{Path, PathBuf};

use qpreserve::entropy_analysis::algebra_form_residual;
use qpreserve::generators::{
    preserving_classical_instance, random_bistochastic_channel, random_bistochastic_matrix,
    random_density, random_probability_vector, random_stochastic_channel, random_unitary,
};
use qpreserve::io::{
    channel_from_json, channel_to_json, classical_batch_from_str, classical_instance_to_json,
    state_from_json, state_to_json, structure_to_json, to_json_string,
};
use qpreserve::{
    corollary_check, decompose_fixed_point_algebra, entropy_preservation_report, fixed_point_space,
    map_entropy, map_entropy_preservation_report, synthesize_pair, verify_block_structure,
    BlockSpec, DensityMatrix, Error, KrausChannel, Result, ToleranceConfig,
};
use serde_json::{json, Value};

use crate::result::CommandResult;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Format(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, value: &Value) -> Result<()> {
    let mut text = to_json_string(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::Format(format!("cannot write {}: {e}", path.display())))
}

fn load_state(path: &Path, tol: &ToleranceConfig) -> Result<DensityMatrix> {
    state_from_json(&read(path)?, tol)
}

fn load_channel(path: &Path, tol: &ToleranceConfig) -> Result<KrausChannel> {
    channel_from_json(&read(path)?, tol)
}

pub fn analyze_state(path: &Path, tol: &ToleranceConfig) -> Result<CommandResult> {
    let rho = load_state(path, tol)?;
    let report = json!({
        "dim": rho.dim(),
        "entropy": rho.entropy(),
        "rank": rho.rank(tol),
        "spectrum": rho.eigenvalues(),
    });
    Ok(CommandResult::ok(report, tol))
}

pub fn analyze_pair(channel: &Path, state: &Path, tol: &ToleranceConfig) -> Result<CommandResult> {
    let phi = load_channel(channel, tol)?;
    let rho = load_state(state, tol)?;
    let class = phi.require_bistochastic(tol)?;
    let r = entropy_preservation_report(&phi, &rho, tol)?;
    let mut report = serde_json::to_value(r).expect("plain report");
    report["classification"] = serde_json::to_value(class).expect("plain report");
    let mut out = CommandResult::verdict(r.preserved(), report, tol);
    if !r.agreement {
        out = out.note(format!(
            "verdicts disagree: |dS| = {:e}, fixed-point residual = {:e}",
            r.entropy_gap.abs(),
            r.residual_fix
        ));
    }
    Ok(out)
}

pub fn decompose(
    channel: &Path,
    state: Option<&Path>,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<CommandResult> {
    let phi = load_channel(channel, tol)?;
    let fixed = fixed_point_space(&phi, tol)?;
    let structure = decompose_fixed_point_algebra(&fixed, seed, tol)?;
    let mut report = json!({
        "dims": structure.dims(),
        "structure": structure_to_json(&structure),
        "fixed_point": fixed,
        "fixed_point_dim": fixed.len(),
        "spectral_gap": fixed.spectral_gap(),
        "algebra_form_residual": algebra_form_residual(&fixed, &structure),
    });
    let Some(state) = state else {
        return Ok(CommandResult::ok(report, tol));
    };
    let rho = load_state(state, tol)?;
    match verify_block_structure(&structure, &phi, &rho, tol) {
        Ok(v) => {
            report["verification"] = serde_json::to_value(v).expect("plain report");
            Ok(CommandResult::ok(report, tol))
        }
        Err(e @ Error::StructureMismatch { .. }) => {
            report["verification"] = json!({ "error": e.to_string() });
            Ok(CommandResult::verdict(false, report, tol).note(e.to_string()))
        }
        Err(e) => Err(e),
    }
}

pub fn map_entropy_cmd(
    first: &Path,
    second: Option<&Path>,
    tol: &ToleranceConfig,
) -> Result<CommandResult> {
    let phi = load_channel(first, tol)?;
    let Some(second) = second else {
        let value = map_entropy(&phi, tol)?;
        return Ok(CommandResult::ok(json!({ "map_entropy": value }), tol));
    };
    let psi = load_channel(second, tol)?;
    let r = map_entropy_preservation_report(&phi, &psi, tol)?;
    let report = serde_json::to_value(r).expect("plain report");
    let mut out = CommandResult::verdict(r.entropy_verdict && r.fixed_verdict, report, tol);
    if !r.agreement {
        out = out.note("map-entropy and fixed-point verdicts disagree");
    }
    Ok(out)
}

pub fn classical_check(path: &Path, tol: &ToleranceConfig) -> Result<CommandResult> {
    let batch = classical_batch_from_str(&read(path)?, tol)?;
    let mut rows = Vec::with_capacity(batch.len());
    let mut preserved = 0usize;
    let mut disagreements = Vec::new();
    for (k, inst) in batch.iter().enumerate() {
        let r = corollary_check(&inst.matrix, &inst.p, tol)
            .map_err(|e| Error::InvalidSpec(format!("instance {k}: {e}")))?;
        if r.entropy_preserved && r.fixed_point {
            preserved += 1;
        }
        if !r.agreement {
            disagreements.push(k);
        }
        rows.push(r);
    }
    let report = json!({
        "instances": rows,
        "summary": {
            "count": batch.len(),
            "preserved": preserved,
            "disagreements": disagreements.len(),
        },
    });
    let mut out = CommandResult::verdict(disagreements.is_empty(), report, tol);
    for k in disagreements {
        out = out.note(format!("instance {k}: verdicts disagree"));
    }
    Ok(out)
}

pub fn synthesize(
    spec: &str,
    weights: Option<&[f64]>,
    seed: u64,
    out_dir: &Path,
    tol: &ToleranceConfig,
) -> Result<CommandResult> {
    let mut block_spec = BlockSpec::parse(spec)?;
    if let Some(w) = weights {
        block_spec.weights = w.to_vec();
    }
    let pair = synthesize_pair(&block_spec, seed)?;
    fs::create_dir_all(out_dir)
        .map_err(|e| Error::Format(format!("cannot create {}: {e}", out_dir.display())))?;
    let files: Vec<PathBuf> = ["channel.json", "state.json", "structure.json"]
        .iter()
        .map(|name| out_dir.join(name))
        .collect();
    write(&files[0], &channel_to_json(&pair.channel))?;
    write(&files[1], &state_to_json(&pair.state))?;
    write(&files[2], &structure_to_json(&pair.structure))?;

    let check = entropy_preservation_report(&pair.channel, &pair.state, tol)?;
    let verification = verify_block_structure(&pair.structure, &pair.channel, &pair.state, tol)?;
    let report = json!({
        "dims": pair.structure.dims(),
        "weights": block_spec.weights,
        "files": files.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        "preservation": check,
        "verification": verification.residuals,
    });
    let mut out = CommandResult::verdict(check.preserved(), report, tol);
    if !check.preserved() {
        out = out.note("self-check failed: synthesized pair is not preserved within tolerance");
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum GenKind {
    State,
    Unitary,
    BistochasticChannel,
    StochasticChannel,
    BistochasticMatrix,
    PreservingClassical,
}

#[derive(Debug, Clone, Copy)]
pub struct GenParams {
    pub dim: usize,
    pub seed: u64,
    pub rank: Option<usize>,
    pub terms: usize,
}

/// The generated object in its file format.
pub fn generate(kind: GenKind, p: GenParams, tol: &ToleranceConfig) -> Result<Value> {
    if p.dim == 0 {
        return Err(Error::InvalidSpec("dimension must be positive".into()));
    }
    if p.terms == 0 {
        return Err(Error::InvalidSpec("--terms must be positive".into()));
    }
    Ok(match kind {
        GenKind::State => state_to_json(&random_density(p.dim, p.rank.unwrap_or(p.dim), p.seed)?),
        GenKind::Unitary => {
            channel_to_json(&KrausChannel::unitary(random_unitary(p.dim, p.seed), tol)?)
        }
        GenKind::BistochasticChannel => {
            channel_to_json(&random_bistochastic_channel(p.dim, p.terms, p.seed))
        }
        GenKind::StochasticChannel => {
            channel_to_json(&random_stochastic_channel(p.dim, p.terms, p.seed))
        }
        GenKind::BistochasticMatrix => {
            let b = random_bistochastic_matrix(p.dim, p.terms, p.seed);
            let q = random_probability_vector(p.dim, p.seed.wrapping_add(1));
            classical_instance_to_json(&b, &q)
        }
        GenKind::PreservingClassical => {
            let (b, q) = preserving_classical_instance(p.dim, p.seed);
            classical_instance_to_json(&b, &q)
        }
    })
}

pub fn gen(kind: GenKind, params: GenParams, out: &Path, tol: &ToleranceConfig) -> Result<CommandResult> {
    let value = generate(kind, params, tol)?;
    write(out, &value)?;
    Ok(CommandResult::ok(json!({ "file": out.display().to_string() }), tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(dim: usize) -> GenParams {
        GenParams {
            dim,
            seed: 3,
            rank: None,
            terms: 2,
        }
    }

    #[test]
    fn generated_objects_parse_back() {
        let tol = ToleranceConfig::default();
        let v = generate(GenKind::StochasticChannel, params(3), &tol).unwrap();
        let phi = channel_from_json(&v.to_string(), &tol).unwrap();
        assert_eq!(phi.dim(), 3);
        let v = generate(GenKind::State, params(2), &tol).unwrap();
        assert_eq!(state_from_json(&v.to_string(), &tol).unwrap().rank(&tol), 2);
        let v = generate(GenKind::BistochasticMatrix, params(4), &tol).unwrap();
        assert_eq!(classical_batch_from_str(&v.to_string(), &tol).unwrap().len(), 1);
    }

    #[test]
    fn generate_rejects_empty_shapes() {
        let tol = ToleranceConfig::default();
        assert!(generate(GenKind::Unitary, params(0), &tol).is_err());
        let mut p = params(2);
        p.terms = 0;
        assert!(generate(GenKind::BistochasticChannel, p, &tol).is_err());
    }
}
