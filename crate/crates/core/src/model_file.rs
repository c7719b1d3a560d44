//! Model description files.
//!
//! Flat `key = value` lines; `#` starts a comment. Matrix-valued keys take
//! an inline matrix in the interchange format, header on the key's line:
//!
//! ```text
//! dim = 2
//! hamiltonian = complex-matrix 2 2
//! 0 0
//! 0 0
//! 0 0
//! 0 0
//! collapse = complex-matrix 2 2      # repeatable
//! ...
//! control = complex-matrix 2 2       # optional, pulse control Hamiltonian
//! initial = complex-matrix 2 2       # optional, initial density matrix
//! ```
//!
//! or the preset shorthand
//!
//! ```text
//! preset = transmon
//! t1 = 50e-6
//! tphi = inf
//! anharmonicity = -1.2566e9
//! drive_amp = 1.2566e8
//! ```

use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kv;
use crate::linalg::interchange::{format_matrix, parse_header, read_body};
use crate::linalg::MatrixAoS;
use crate::lindblad::{
    transmon_control, transmon_model, LindbladModel, TransmonParams, TRANSMON_DIM,
};

#[derive(Clone, Debug)]
pub struct ModelSpec {
    pub model: LindbladModel,
    /// Control Hamiltonian for pulse chains.
    pub control: Option<MatrixAoS>,
    /// Initial density matrix.
    pub initial: Option<MatrixAoS>,
}

impl ModelSpec {
    /// The bundled transmon preset with default parameters.
    pub fn transmon(params: TransmonParams) -> Result<Self> {
        Ok(Self {
            model: transmon_model(params)?,
            control: Some(transmon_control(params.drive_amp)),
            initial: None,
        })
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        parse_model(&std::fs::read_to_string(path)?)
    }

    /// Explicit initial state, or |1⟩⟨1| (|0⟩⟨0| when d = 1).
    pub fn initial_state(&self) -> MatrixAoS {
        self.initial
            .clone()
            .unwrap_or_else(|| default_initial_state(self.model.dim()))
    }

    /// Explicit control, or the zero matrix.
    pub fn control_or_zero(&self) -> MatrixAoS {
        let d = self.model.dim();
        self.control
            .clone()
            .unwrap_or_else(|| MatrixAoS::zeros(d, d))
    }

    /// Writes the explicit (non-preset) form.
    pub fn to_file_format(&self) -> String {
        let mut out = format!("dim = {}\n", self.model.dim());
        let mut put = |key: &str, m: &MatrixAoS| {
            out.push_str(key);
            out.push_str(" = ");
            out.push_str(&format_matrix(m));
        };
        put("hamiltonian", self.model.hamiltonian());
        for op in self.model.collapse_ops() {
            put("collapse", op);
        }
        if let Some(c) = &self.control {
            put("control", c);
        }
        if let Some(i) = &self.initial {
            put("initial", i);
        }
        out
    }
}

pub fn default_initial_state(d: usize) -> MatrixAoS {
    let mut rho = MatrixAoS::zeros(d, d);
    if d > 0 {
        let k = usize::from(d >= 2);
        rho[(k, k)] = Complex64::new(1.0, 0.0);
    }
    rho
}

pub fn parse_model(text: &str) -> Result<ModelSpec> {
    let mut dim = None;
    let mut preset = None;
    let mut params = TransmonParams::default();
    let mut param_lines = Vec::new();
    let mut hamiltonian = None;
    let mut collapse = Vec::new();
    let mut control = None;
    let mut initial = None;

    let mut lines = kv::lines(text);
    while let Some((line_no, line)) = lines.next() {
        let (key, value) = kv::split(line, line_no)?;
        match key.as_str() {
            "dim" => {
                let d: usize = value
                    .parse()
                    .map_err(|_| Error::parse(line_no, format!("invalid dim `{value}`")))?;
                if d == 0 {
                    return Err(Error::parse(line_no, "dim must be at least 1"));
                }
                set_once(&mut dim, d, "dim", line_no)?;
            }
            "preset" => {
                if !value.eq_ignore_ascii_case("transmon") {
                    return Err(Error::parse(line_no, format!("unknown preset `{value}`")));
                }
                set_once(&mut preset, (), "preset", line_no)?;
            }
            "t1" | "tphi" | "anharmonicity" | "drive_amp" => {
                let v = kv::number(value, &key, line_no)?;
                match key.as_str() {
                    "t1" => params.t1 = v,
                    "tphi" => params.tphi = v,
                    "anharmonicity" => params.anharmonicity = v,
                    _ => params.drive_amp = v,
                }
                param_lines.push(line_no);
            }
            "hamiltonian" | "collapse" | "control" | "initial" => {
                let (rows, cols) = parse_header(value, line_no)?;
                let m = read_body(rows, cols, &mut lines, line_no)?;
                match key.as_str() {
                    "hamiltonian" => set_once(&mut hamiltonian, m, "hamiltonian", line_no)?,
                    "collapse" => collapse.push(m),
                    "control" => set_once(&mut control, m, "control", line_no)?,
                    _ => set_once(&mut initial, m, "initial", line_no)?,
                }
            }
            other => return Err(Error::parse(line_no, format!("unknown key `{other}`"))),
        }
    }

    let model = if preset.is_some() {
        if hamiltonian.is_some() || !collapse.is_empty() {
            return Err(Error::parse(
                0,
                "`preset` cannot be combined with hamiltonian/collapse",
            ));
        }
        if dim.is_some_and(|d| d != TRANSMON_DIM) {
            return Err(Error::parse(0, "the transmon preset has dim = 3"));
        }
        if control.is_none() {
            control = Some(transmon_control(params.drive_amp));
        }
        transmon_model(params)?
    } else {
        if let Some(&line) = param_lines.first() {
            return Err(Error::parse(
                line,
                "transmon parameters require `preset = transmon`",
            ));
        }
        let h = hamiltonian.ok_or_else(|| Error::parse(0, "missing `hamiltonian`"))?;
        let d = dim.ok_or_else(|| Error::parse(0, "missing `dim`"))?;
        if h.rows() != d || h.cols() != d {
            return Err(Error::shape(format!("{d}x{d} hamiltonian"), h.shape_str()));
        }
        LindbladModel::new(h, collapse)?
    };

    let d = model.dim();
    for (name, m) in [("control", &control), ("initial", &initial)] {
        if let Some(m) = m {
            if m.rows() != d || m.cols() != d {
                return Err(Error::shape(format!("{d}x{d} {name}"), m.shape_str()));
            }
        }
    }
    Ok(ModelSpec {
        model,
        control,
        initial,
    })
}

fn set_once<T>(slot: &mut Option<T>, value: T, key: &str, line_no: usize) -> Result<()> {
    if slot.is_some() {
        return Err(Error::parse(line_no, format!("duplicate key `{key}`")));
    }
    *slot = Some(value);
    Ok(())
}
