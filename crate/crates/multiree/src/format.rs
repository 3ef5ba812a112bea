//! Versioned JSON file formats and CSV tables.
//!
//! Floats are written in shortest round-trip form, so every file re-reads to
//! bit-identical values. Non-finite values are written as the strings `"inf"`,
//! `"-inf"` and `"nan"`.

use std::fs;
use std::path::Path;

use multiree_core::energy::{GibbsState, Oscillator};
use multiree_core::{
    AuditReport, CMatrix, Complex64, HamiltonianSpec, HermitianOperator, ProductAtom,
    ProductEnsemble, PureState, SolveResult, SubsystemLayout, TruncationTable,
};
use serde::{Deserialize, Serialize};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error("unsupported format version {0}, expected {FORMAT_VERSION}")]
    Version(u32),
    #[error("malformed file: {0}")]
    Shape(String),
    #[error(transparent)]
    Core(#[from] multiree_core::Error),
}

pub type Result<T> = std::result::Result<T, FormatError>;

/// `#[serde(with = "real")]` for floats that may be infinite.
pub mod real {
    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        match *x {
            x if x.is_finite() => s.serialize_f64(x),
            x if x.is_nan() => s.serialize_str("nan"),
            x if x > 0.0 => s.serialize_str("inf"),
            _ => s.serialize_str("-inf"),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(x),
            Raw::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(D::Error::custom(format!("not a number: {other:?}"))),
            },
        }
    }
}

/// Row-major real and imaginary parts of a square matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixData {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixData {
    pub fn from_operator(op: &HermitianOperator) -> Self {
        let m = op.matrix();
        let n = op.dim();
        let rows = |part: &[f64]| part.chunks(n).map(|r| r.to_vec()).collect();
        MatrixData {
            re: rows(m.re()),
            im: rows(m.im()),
        }
    }

    pub fn to_operator(&self) -> Result<HermitianOperator> {
        let n = self.re.len();
        if self.im.len() != n || self.re.iter().chain(&self.im).any(|r| r.len() != n) {
            return Err(FormatError::Shape(format!(
                "expected square re/im arrays of size {n}"
            )));
        }
        let re = self.re.concat();
        let im = self.im.concat();
        Ok(HermitianOperator::new(CMatrix::from_parts(n, n, re, im))?)
    }
}

/// Density matrix or state vector with its layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub version: u32,
    pub dims: Vec<usize>,
    #[serde(flatten)]
    pub data: StateData,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateData {
    Density {
        re: Vec<Vec<f64>>,
        im: Vec<Vec<f64>>,
    },
    Vector {
        re: Vec<f64>,
        im: Vec<f64>,
    },
}

/// A state read from disk.
#[derive(Debug, Clone)]
pub struct LoadedState {
    pub layout: SubsystemLayout,
    pub density: HermitianOperator,
    /// Set when the file holds a state vector.
    pub pure: Option<PureState>,
}

impl StateFile {
    pub fn density(layout: &SubsystemLayout, rho: &HermitianOperator) -> Self {
        let m = MatrixData::from_operator(rho);
        StateFile {
            version: FORMAT_VERSION,
            dims: layout.dims().to_vec(),
            data: StateData::Density { re: m.re, im: m.im },
        }
    }

    pub fn vector(layout: &SubsystemLayout, psi: &PureState) -> Self {
        let a = psi.amplitudes();
        StateFile {
            version: FORMAT_VERSION,
            dims: layout.dims().to_vec(),
            data: StateData::Vector {
                re: a.iter().map(|z| z.re).collect(),
                im: a.iter().map(|z| z.im).collect(),
            },
        }
    }

    pub fn load(&self) -> Result<LoadedState> {
        check_version(self.version)?;
        let layout = SubsystemLayout::new(self.dims.clone())?;
        let (density, pure) = match &self.data {
            StateData::Density { re, im } => {
                let m = MatrixData {
                    re: re.clone(),
                    im: im.clone(),
                };
                (m.to_operator()?, None)
            }
            StateData::Vector { re, im } => {
                if re.len() != im.len() {
                    return Err(FormatError::Shape(
                        "re and im of a state vector differ in length".into(),
                    ));
                }
                let amps = re
                    .iter()
                    .zip(im)
                    .map(|(&a, &b)| Complex64::new(a, b))
                    .collect();
                let psi = PureState::new(amps)?;
                (psi.density(), Some(psi))
            }
        };
        layout.check_dim(density.dim())?;
        density.check_density()?;
        Ok(LoadedState {
            layout,
            density,
            pure,
        })
    }
}

/// Finite product ensemble `sum_i w_i alpha_i^1 (x) ... (x) alpha_i^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleFile {
    pub version: u32,
    pub dims: Vec<usize>,
    pub weights: Vec<f64>,
    pub atoms: Vec<Vec<MatrixData>>,
}

impl EnsembleFile {
    pub fn from_ensemble(e: &ProductEnsemble) -> Self {
        EnsembleFile {
            version: FORMAT_VERSION,
            dims: e.layout().dims().to_vec(),
            weights: e.weights(),
            atoms: e
                .atoms()
                .iter()
                .map(|a| a.parties.iter().map(MatrixData::from_operator).collect())
                .collect(),
        }
    }

    pub fn to_ensemble(&self) -> Result<ProductEnsemble> {
        check_version(self.version)?;
        if self.weights.len() != self.atoms.len() {
            return Err(FormatError::Shape(format!(
                "{} weights for {} atoms",
                self.weights.len(),
                self.atoms.len()
            )));
        }
        let layout = SubsystemLayout::new(self.dims.clone())?;
        let atoms = self
            .weights
            .iter()
            .zip(&self.atoms)
            .map(|(&weight, parts)| {
                let parties = parts
                    .iter()
                    .map(MatrixData::to_operator)
                    .collect::<Result<_>>()?;
                Ok(ProductAtom { weight, parties })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ProductEnsemble::new(layout, atoms)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillatorData {
    /// Number of modes; must equal `omegas.len()`.
    pub l: usize,
    pub omegas: Vec<f64>,
    #[serde(default = "one")]
    pub hbar: f64,
}

fn one() -> f64 {
    1.0
}

fn default_truncation() -> usize {
    60
}

/// `{"eigenvalues": [...]}` or `{"oscillator": {...}, "truncation": N}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HamiltonianFile {
    Spectrum {
        eigenvalues: Vec<f64>,
    },
    Oscillator {
        oscillator: OscillatorData,
        #[serde(default = "default_truncation")]
        truncation: usize,
    },
}

impl HamiltonianFile {
    pub fn to_spec(&self) -> Result<HamiltonianSpec> {
        Ok(match self {
            HamiltonianFile::Spectrum { eigenvalues } => HamiltonianSpec::new(eigenvalues.clone())?,
            HamiltonianFile::Oscillator {
                oscillator,
                truncation,
            } => HamiltonianSpec::oscillator(oscillator.to_oscillator()?, *truncation)?,
        })
    }
}

impl OscillatorData {
    pub fn to_oscillator(&self) -> Result<Oscillator> {
        if self.l != self.omegas.len() {
            return Err(FormatError::Shape(format!(
                "oscillator declares l = {} but lists {} frequencies",
                self.l,
                self.omegas.len()
            )));
        }
        Ok(Oscillator::new(self.omegas.clone(), self.hbar)?)
    }
}

/// Identifies the producing command in every result file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub format: String,
    pub version: u32,
    pub command: String,
    pub seed: u64,
}

impl Header {
    pub fn new(command: &str, seed: u64) -> Self {
        Header {
            format: "multiree".into(),
            version: FORMAT_VERSION,
            command: command.into(),
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResultFile {
    pub header: Header,
    pub value: f64,
    pub gap: f64,
    pub lower: f64,
    pub iterations: usize,
    pub converged: bool,
    pub tol: f64,
    pub restarts: usize,
    pub max_iter: usize,
    /// Energy budget of a constrained solve.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<f64>,
    pub ensemble: EnsembleFile,
}

impl SolveResultFile {
    pub fn new(header: Header, r: &SolveResult, opts: &multiree_core::SolveOptions) -> Self {
        SolveResultFile {
            header,
            value: r.value,
            gap: r.gap,
            lower: r.lower(),
            iterations: r.iterations,
            converged: r.converged,
            tol: opts.tol,
            restarts: opts.restarts,
            max_iter: opts.max_iter,
            energy: None,
            ensemble: EnsembleFile::from_ensemble(&r.ensemble),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditRecordData {
    pub name: String,
    #[serde(with = "real")]
    pub lhs: f64,
    #[serde(with = "real")]
    pub rhs: f64,
    #[serde(with = "real")]
    pub slack: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditFile {
    pub header: Header,
    pub value: f64,
    pub gap: f64,
    pub tolerance: f64,
    pub all_pass: bool,
    pub records: Vec<AuditRecordData>,
}

impl AuditFile {
    pub fn new(header: Header, r: &AuditReport) -> Self {
        AuditFile {
            header,
            value: r.value,
            gap: r.gap,
            tolerance: r.tolerance,
            all_pass: r.all_pass(),
            records: r
                .records
                .iter()
                .map(|x| AuditRecordData {
                    name: x.name.clone(),
                    lhs: x.lhs,
                    rhs: x.rhs,
                    slack: x.slack,
                    pass: x.pass,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationRowData {
    pub r: usize,
    pub c_r: f64,
    pub delta_r: f64,
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
    pub bound: Option<f64>,
    pub valid_regime: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationFile {
    pub header: Header,
    pub functional: String,
    /// 1-based party indices.
    pub subset: Vec<usize>,
    pub reference: f64,
    pub r0: usize,
    pub e_s: f64,
    pub rows: Vec<TruncationRowData>,
}

impl TruncationFile {
    pub fn new(header: Header, functional: &str, t: &TruncationTable) -> Self {
        TruncationFile {
            header,
            functional: functional.into(),
            subset: t.subset.iter().map(|s| s + 1).collect(),
            reference: t.reference,
            r0: t.r0,
            e_s: t.e_s,
            rows: t
                .rows
                .iter()
                .map(|x| TruncationRowData {
                    r: x.r,
                    c_r: x.c_r,
                    delta_r: x.delta_r,
                    value: x.value,
                    gap: x.gap,
                    bound: x.bound,
                    valid_regime: x.valid_regime,
                })
                .collect(),
        }
    }

    /// `r,c_r,delta_r,value,bound,valid_regime`; empty `bound` outside the
    /// valid regime.
    pub fn to_csv(&self) -> String {
        let mut w = csv_writer(&self.header);
        w.write_record(["r", "c_r", "delta_r", "value", "bound", "valid_regime"])
            .expect("in-memory write");
        for row in &self.rows {
            w.write_record([
                row.r.to_string(),
                num(row.c_r),
                num(row.delta_r),
                num(row.value),
                row.bound.map(num).unwrap_or_default(),
                row.valid_regime.to_string(),
            ])
            .expect("in-memory write");
        }
        finish_csv(w)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GibbsFile {
    pub header: Header,
    pub energy: f64,
    pub beta: f64,
    pub clamped: bool,
    pub entropy: f64,
    pub mean_energy: f64,
    pub weights: Vec<f64>,
}

impl GibbsFile {
    pub fn new(header: Header, h: &HamiltonianSpec, energy: f64, g: &GibbsState) -> Self {
        GibbsFile {
            header,
            energy,
            beta: g.beta,
            clamped: g.clamped,
            entropy: g.entropy(),
            mean_energy: g.mean_energy(h),
            weights: g.weights.clone(),
        }
    }
}

/// One evaluation of a continuity bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundPoint {
    pub epsilon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<f64>,
    #[serde(with = "real")]
    pub value: f64,
    pub terms: Vec<(String, f64)>,
    #[serde(with = "real")]
    pub uncertainty: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsFile {
    pub header: Header,
    pub kind: String,
    pub points: Vec<BoundPoint>,
}

impl BoundsFile {
    /// `epsilon,t,E,value,<term names>...`
    pub fn to_csv(&self) -> String {
        let mut w = csv_writer(&self.header);
        let names: Vec<String> = self
            .points
            .first()
            .map(|p| p.terms.iter().map(|t| t.0.clone()).collect())
            .unwrap_or_default();
        let mut head = vec![
            "epsilon".to_string(),
            "t".into(),
            "E".into(),
            "value".into(),
        ];
        head.extend(names);
        w.write_record(&head).expect("in-memory write");
        for p in &self.points {
            let mut rec = vec![
                num(p.epsilon),
                p.t.map(num).unwrap_or_default(),
                p.energy.map(num).unwrap_or_default(),
                num(p.value),
            ];
            rec.extend(p.terms.iter().map(|t| num(t.1)));
            w.write_record(&rec).expect("in-memory write");
        }
        finish_csv(w)
    }
}

/// Shortest round-trip decimal form.
pub fn num(x: f64) -> String {
    match x {
        x if x.is_nan() => "nan".into(),
        x if x.is_infinite() => if x > 0.0 { "inf" } else { "-inf" }.into(),
        x if x == 0.0 => "0".into(),
        x if (1e-4..1e15).contains(&x.abs()) => format!("{x}"),
        x => format!("{x:e}"),
    }
}

fn csv_writer(header: &Header) -> csv::Writer<Vec<u8>> {
    let mut buf = Vec::new();
    buf.extend_from_slice(
        format!(
            "# {} v{} {} seed={}\n",
            header.format, header.version, header.command, header.seed
        )
        .as_bytes(),
    );
    csv::Writer::from_writer(buf)
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

fn check_version(v: u32) -> Result<()> {
    if v != FORMAT_VERSION {
        return Err(FormatError::Version(v));
    }
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| FormatError::Json {
        path: path.display().to_string(),
        source,
    })
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable result");
    s.push('\n');
    s
}

pub fn read_state(path: &Path) -> Result<LoadedState> {
    read_json::<StateFile>(path)?.load()
}

pub fn read_ensemble(path: &Path) -> Result<ProductEnsemble> {
    read_json::<EnsembleFile>(path)?.to_ensemble()
}

pub fn read_hamiltonian(path: &Path) -> Result<HamiltonianSpec> {
    read_json::<HamiltonianFile>(path)?.to_spec()
}
