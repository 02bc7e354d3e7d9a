//! The synthesis artifact: everything the online controller needs, plus the
//! config it came from.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use stc_core::contractive::{synth_target, TargetSet};
use stc_core::controller::{synth_periodic, ClosedLoop, PeriodicLaw};
use stc_core::enlargement::{build_family, ScaledFamily};
use stc_core::graph::{build_graph, CompositeGraph, NodeId};
use stc_core::LinearSystem;

use crate::config::{Problem, ProblemConfig};
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Provenance {
    /// SHA-256 of the canonical config JSON.
    pub config_sha256: String,
    pub tool_version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SynthesisArtifact {
    pub provenance: Provenance,
    pub config: ProblemConfig,
    pub target: TargetSet,
    pub family: ScaledFamily,
    pub graph: CompositeGraph,
    pub law: PeriodicLaw,
}

pub fn config_hash(cfg: &ProblemConfig) -> String {
    hex::encode(Sha256::digest(cfg.canonical_json().as_bytes()))
}

impl SynthesisArtifact {
    /// Runs the full offline pipeline.
    pub fn synthesize(cfg: &ProblemConfig) -> CliResult<Self> {
        let prob = cfg.validate()?;
        let Problem {
            system,
            spec,
            j_max,
            a_bar,
            p,
            q,
            options,
            tol,
        } = &prob;
        let target = synth_target(system, spec, tol).map_err(CliError::core("target synthesis"))?;
        let family =
            build_family(system, &target, *j_max, *a_bar, *options, tol).map_err(CliError::core("enlargement"))?;
        let graph = build_graph(&family, *p, *q).map_err(CliError::core("graph construction"))?;
        let law = synth_periodic(system, &target, *j_max, options.strict_intermediate, tol)
            .map_err(CliError::core("periodic law"))?;
        Ok(Self {
            provenance: Provenance {
                config_sha256: config_hash(cfg),
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
            },
            config: cfg.clone(),
            target,
            family,
            graph,
            law,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("artifact serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str, path: &Path) -> CliResult<Self> {
        let art: Self = serde_json::from_str(text).map_err(|e| CliError::Artifact {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        art.check_consistency().map_err(|reason| CliError::Artifact {
            path: path.to_path_buf(),
            reason,
        })?;
        Ok(art)
    }

    pub fn save(&self, path: &Path) -> CliResult<()> {
        std::fs::write(path, self.to_json()).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text, path)
    }

    /// Structural agreement between the stored pieces.
    pub fn check_consistency(&self) -> Result<(), String> {
        if self.family.target != self.target {
            return Err("family was built from a different target set".into());
        }
        let mut want: Vec<NodeId> = self
            .family
            .indices()
            .map(|(j, l)| NodeId::Set { j, l })
            .chain(std::iter::once(NodeId::Terminal))
            .collect();
        let mut actual: Vec<NodeId> = self.graph.nodes().iter().map(|n| n.id).collect();
        actual.sort();
        want.sort();
        if actual != want {
            return Err("graph nodes do not match the family grid".into());
        }
        for n in self.graph.nodes() {
            if let NodeId::Set { j, l } = n.id {
                if n.scale != self.family.scale(j, l) {
                    return Err(format!("node {} carries a scale that differs from the family", n.id));
                }
            }
        }
        Ok(())
    }

    pub fn system(&self) -> CliResult<LinearSystem> {
        Ok(self.config.validate()?.system)
    }

    /// Rebuilds the graph with other edge weights.
    pub fn with_weights(&self, p: f64, q: f64) -> CliResult<CompositeGraph> {
        build_graph(&self.family, p, q).map_err(CliError::core("graph construction"))
    }

    pub fn closed_loop<'a>(&'a self, sys: &'a LinearSystem, graph: &'a CompositeGraph) -> CliResult<ClosedLoop<'a>> {
        ClosedLoop::new(sys, &self.family, graph, &self.law, self.config.tolerances)
            .map_err(CliError::core("controller setup"))
    }

    /// Printable synthesis summary.
    pub fn summary(&self) -> String {
        let chains: Vec<String> = self
            .family
            .scales
            .iter()
            .enumerate()
            .map(|(i, c)| format!("{}:{}", i + 1, c.len() - 1))
            .collect();
        let mut out = String::new();
        out.push_str(&format!(
            "target: {} vertices, {} constraints, {} iterations\n",
            self.target.vertices.len(),
            self.target.polytope.num_constraints(),
            self.target.iterations
        ));
        out.push_str(&format!("chain lengths (j:l_j): {}\n", chains.join(" ")));
        if self.family.j_max == 1 {
            let a: Vec<String> = self.family.scales[0].iter().map(|v| v.to_string()).collect();
            out.push_str(&format!("a[1]: [{}]\n", a.join(", ")));
        }
        out.push_str(&format!("a_max: {}\n", self.family.a_max));
        out.push_str(&format!(
            "graph: {} nodes, {} edges\n",
            self.graph.nodes().len(),
            self.graph.edges().len()
        ));
        out.push_str(&format!(
            "periodic law: j_hat = {}, epsilon* = {}\n",
            self.law.j_hat, self.law.epsilon_star
        ));
        out
    }
}
