//! Scenario files: a TOML document with typed values, validated on load.
//!
//! ```toml
//! name = "cosine"
//! eps = [0.25, 0.125, 0.0625, 0.03125]
//! seed = 7
//!
//! [grid]
//! n1 = 512
//! n2 = 512
//! period_x2 = 1.0
//!
//! [fields.g1]
//! family = "x1-cosine"
//! params = [2.0, 1.0]
//! # fields.g2 and fields.q alike
//!
//! [solver]             # optional
//! rel_tol = 1e-10
//! preconditioner = "effective"
//!
//! [bloch]              # optional
//! k = [0.1, 0.4, 1.2]
//!
//! [schrodinger]        # optional; fields.g1, fields.g2 then play g̃1, g̃2
//! omega = { family = "exp-gibbs", params = [0.5] }
//! path = "discrete"
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::discretize::{check_eps_grid, reciprocal_integer, TorusGrid};
use crate::error::{Error, Result};
use crate::fields::{CoefficientField, Coefficients, Family, HypothesisConstants};
use crate::linsolve::SolveOptions;
use crate::schrodinger::{FactorizationData, PotentialPath, SchrodingerScenario};

/// Sampling density for hypothesis validation.
pub const VALIDATION_DENSITY: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub family: Family,
    #[serde(default)]
    pub params: Vec<f64>,
}

impl FieldSpec {
    pub fn new(family: Family, params: Vec<f64>) -> Self {
        FieldSpec { family, params }
    }

    pub fn build(&self, period_x2: f64) -> Result<CoefficientField> {
        CoefficientField::new(self.family, self.params.clone(), period_x2)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n1: usize,
    pub n2: usize,
    #[serde(default = "one")]
    pub period_x2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldsSpec {
    pub g1: FieldSpec,
    pub g2: FieldSpec,
    #[serde(default = "unit_field")]
    pub q: FieldSpec,
}

/// Settings for fiber diagnostics and the germ-resolvent sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BlochSpec {
    /// slice coordinate for one-dimensional checks
    pub x2: f64,
    /// nodes of the one-dimensional slice fibers
    pub slice_n1: usize,
    /// points of the symmetric quasimomentum grid on `[−t0, t0]`
    pub k_points: usize,
    /// quasimomenta of the germ-resolvent sweep
    pub k: Vec<f64>,
    /// `ε` values of the germ-resolvent sweep
    pub eps: Vec<f64>,
    /// strip fiber resolution
    pub n1: usize,
    pub n2: usize,
    /// super-torus cells and eigenvalues per fiber for the decomposition check
    pub cells: usize,
    pub count: usize,
    pub decomposition_eps: f64,
}

impl Default for BlochSpec {
    fn default() -> Self {
        BlochSpec {
            x2: 0.0,
            slice_n1: 256,
            k_points: 9,
            k: vec![0.1, 0.4, 1.2],
            eps: vec![0.25, 0.125, 0.0625],
            n1: 32,
            n2: 32,
            cells: 4,
            count: 4,
            decomposition_eps: 0.25,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchrodingerSpec {
    pub omega: FieldSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub path: PotentialPath,
}

/// The file as written, with defaults filled in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    pub eps: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
    pub grid: GridSpec,
    pub fields: FieldsSpec,
    #[serde(default)]
    pub solver: SolveOptions,
    #[serde(default)]
    pub bloch: BlochSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schrodinger: Option<SchrodingerSpec>,
}

fn one() -> f64 {
    1.0
}

fn unit_field() -> FieldSpec {
    FieldSpec::new(Family::Constant, vec![1.0])
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// A validated scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemScenario {
    pub file: ScenarioFile,
    pub coefficients: Coefficients,
    pub grid: TorusGrid,
    pub constants: HypothesisConstants,
    /// SHA-256 of the canonical serialization
    pub fingerprint: String,
}

impl ProblemScenario {
    pub fn from_file(file: ScenarioFile) -> Result<Self> {
        let p = file.grid.period_x2;
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::config(format!("period_x2 = {p} must be positive")));
        }
        let grid = TorusGrid::new(file.grid.n1, file.grid.n2, p)?;
        check_eps_list(&file.eps, "eps")?;
        let eps_min = *file.eps.last().expect("non-empty");
        let needed = (16.0 / eps_min).round() as usize;
        if grid.n1 < needed {
            return Err(Error::config(format!(
                "n1 = {} is below 16/min(eps) = {needed}",
                grid.n1
            )));
        }
        for &e in &file.eps {
            check_eps_grid(&grid, e)?;
        }
        file.solver.check()?;
        let b = &file.bloch;
        if !b.eps.is_empty() {
            check_eps_list(&b.eps, "bloch.eps")?;
        }
        reciprocal_integer(b.decomposition_eps)?;
        let f = &file.fields;
        let coefficients = Coefficients::new(f.g1.build(p)?, f.g2.build(p)?, f.q.build(p)?);
        let constants = coefficients.validate(VALIDATION_DENSITY)?;
        let text = file.to_toml()?;
        let fingerprint = hex::encode(Sha256::digest(text.as_bytes()));
        Ok(ProblemScenario {
            file,
            coefficients,
            grid,
            constants,
            fingerprint,
        })
    }

    pub fn name(&self) -> &str {
        &self.file.name
    }

    pub fn eps_list(&self) -> &[f64] {
        &self.file.eps
    }

    pub fn seed(&self) -> u64 {
        self.file.seed
    }

    pub fn solver(&self) -> &SolveOptions {
        &self.file.solver
    }

    /// Re-validates after `edit` changes the underlying file.
    pub fn modified(&self, edit: impl FnOnce(&mut ScenarioFile)) -> Result<Self> {
        let mut file = self.file.clone();
        edit(&mut file);
        ProblemScenario::from_file(file)
    }

    /// The Schrödinger problem on the scenario grid, with `g̃j` taken from
    /// `fields.gj`.
    pub fn schrodinger(&self) -> Result<SchrodingerScenario> {
        let spec = self
            .file
            .schrodinger
            .as_ref()
            .ok_or_else(|| Error::config("scenario has no [schrodinger] section"))?;
        let p = self.grid.period_x2;
        let omega = spec.omega.build(p)?;
        let c = &self.coefficients;
        let data = FactorizationData::new(c.g1.clone(), c.g2.clone(), omega, VALIDATION_DENSITY)?;
        SchrodingerScenario::new(data, spec.path, spec.lambda, self.grid, VALIDATION_DENSITY)
    }
}

fn check_eps_list(eps: &[f64], what: &str) -> Result<()> {
    if eps.is_empty() {
        return Err(Error::config(format!("{what} is empty")));
    }
    for &e in eps {
        reciprocal_integer(e)?;
    }
    if eps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::config(format!("{what} must be strictly decreasing")));
    }
    Ok(())
}

pub fn parse_scenario(text: &str) -> Result<ProblemScenario> {
    ProblemScenario::from_file(ScenarioFile::parse(text)?)
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<ProblemScenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_scenario(&text)
}
