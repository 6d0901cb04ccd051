//! File formats.
//!
//! Matrices: `{"dim": N, "matrix": [[[re, im], ...], ...]}`, rows outermost.
//! Channels: `{"dim": N, "kraus": [K, ...]}` where each `K` is either a bare
//! nested `[[[re, im], ...], ...]` array or a full matrix object.
//! Block structures: `{"dim": N, "blocks": [{"dl", "dr", "isometry"}, ...]}`
//! with the isometry in the matrix format (`dim` is its row count).
//! Classical batches: CSV records `N`, then `N` rows of `B`, then `p`, repeated;
//! or JSON `{"dim": N, "matrix": [[b, ...], ...], "p": [...]}` or a list of those.

use std::io::Write;

use nalgebra::DMatrix;
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::channels::KrausChannel;
use crate::classical::{ProbabilityVector, StochasticMatrix};
use crate::entropy_analysis::{Block, BlockStructure};
use crate::error::{Error, Result};
use crate::linalg::{c, ComplexMatrix};
use crate::states::DensityMatrix;
use crate::tolerance::ToleranceConfig;

fn format_err(msg: impl std::fmt::Display) -> Error {
    Error::Format(msg.to_string())
}

#[derive(Serialize)]
struct MatrixOut {
    dim: usize,
    matrix: Vec<Vec<[f64; 2]>>,
}

fn nested(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

/// `serialize_with` adapter writing the shared matrix format.
pub fn serialize_matrix<S: Serializer>(m: &ComplexMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    MatrixOut {
        dim: m.nrows(),
        matrix: nested(m),
    }
    .serialize(s)
}

pub fn matrix_to_json(m: &ComplexMatrix) -> Value {
    serde_json::json!({ "dim": m.nrows(), "matrix": nested(m) })
}

fn parse_rows(rows: &Value) -> Result<ComplexMatrix> {
    let rows: Vec<Vec<[f64; 2]>> =
        serde_json::from_value(rows.clone()).map_err(|e| format_err(format!("bad matrix entries: {e}")))?;
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if nrows == 0 || ncols == 0 {
        return Err(format_err("empty matrix"));
    }
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(format_err("ragged matrix rows"));
    }
    let m = ComplexMatrix::from_fn(nrows, ncols, |i, j| c(rows[i][j][0], rows[i][j][1]));
    if !crate::linalg::is_finite(&m) {
        return Err(Error::NonFinite);
    }
    Ok(m)
}

/// Matrix object with `dim` equal to the row count; columns are unconstrained.
pub fn rect_matrix_from_json(v: &Value) -> Result<ComplexMatrix> {
    let dim = v
        .get("dim")
        .and_then(Value::as_u64)
        .ok_or_else(|| format_err("missing integer \"dim\""))? as usize;
    let rows = v.get("matrix").ok_or_else(|| format_err("missing \"matrix\""))?;
    let m = parse_rows(rows)?;
    if m.nrows() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: m.nrows(),
        });
    }
    Ok(m)
}

/// Square matrix in the shared format.
pub fn matrix_from_json(v: &Value) -> Result<ComplexMatrix> {
    let m = rect_matrix_from_json(v)?;
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m)
}

pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| format_err(format!("invalid JSON: {e}")))
}

pub fn state_from_json(text: &str, tol: &ToleranceConfig) -> Result<DensityMatrix> {
    DensityMatrix::new(matrix_from_json(&parse_json(text)?)?, tol)
}

pub fn state_to_json(rho: &DensityMatrix) -> Value {
    matrix_to_json(rho.matrix())
}

pub fn channel_from_json(text: &str, tol: &ToleranceConfig) -> Result<KrausChannel> {
    let v = parse_json(text)?;
    let dim = v
        .get("dim")
        .and_then(Value::as_u64)
        .ok_or_else(|| format_err("missing integer \"dim\""))? as usize;
    let list = v
        .get("kraus")
        .and_then(Value::as_array)
        .ok_or_else(|| format_err("missing \"kraus\" list"))?;
    let mut kraus = Vec::with_capacity(list.len());
    for item in list {
        let m = if item.is_object() {
            matrix_from_json(item)?
        } else {
            parse_rows(item)?
        };
        if m.nrows() != dim || m.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: m.nrows().max(m.ncols()),
            });
        }
        kraus.push(m);
    }
    KrausChannel::new(kraus, tol)
}

pub fn channel_to_json(phi: &KrausChannel) -> Value {
    let kraus: Vec<_> = phi.kraus().iter().map(nested).collect();
    serde_json::json!({ "dim": phi.dim(), "kraus": kraus })
}

pub fn structure_to_json(s: &BlockStructure) -> Value {
    let blocks: Vec<_> = s
        .blocks
        .iter()
        .map(|b| serde_json::json!({ "dl": b.dl, "dr": b.dr, "isometry": matrix_to_json(&b.isometry) }))
        .collect();
    serde_json::json!({ "dim": s.dim, "blocks": blocks })
}

pub fn structure_from_json(text: &str, tol: &ToleranceConfig) -> Result<BlockStructure> {
    #[derive(Deserialize)]
    struct BlockIn {
        dl: usize,
        dr: usize,
        isometry: Value,
    }
    #[derive(Deserialize)]
    struct StructureIn {
        dim: usize,
        blocks: Vec<BlockIn>,
    }
    let raw: StructureIn = serde_json::from_value(parse_json(text)?).map_err(format_err)?;
    let blocks = raw
        .blocks
        .into_iter()
        .map(|b| {
            Ok(Block {
                isometry: rect_matrix_from_json(&b.isometry)?,
                dl: b.dl,
                dr: b.dr,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let s = BlockStructure::new(raw.dim, blocks);
    s.check_invariants(tol)?;
    Ok(s)
}

/// One `(B, p)` instance of a classical batch.
#[derive(Debug, Clone)]
pub struct ClassicalInstance {
    pub matrix: StochasticMatrix,
    pub p: ProbabilityVector,
}

fn classical_instance(b: DMatrix<f64>, p: Vec<f64>, tol: &ToleranceConfig) -> Result<ClassicalInstance> {
    if p.len() != b.nrows() {
        return Err(Error::DimensionMismatch {
            expected: b.nrows(),
            got: p.len(),
        });
    }
    Ok(ClassicalInstance {
        matrix: StochasticMatrix::new(b, tol)?,
        p: ProbabilityVector::new(p, tol)?,
    })
}

pub fn classical_batch_from_csv(text: &str, tol: &ToleranceConfig) -> Result<Vec<ClassicalInstance>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(format_err)?;
        let row = record
            .iter()
            .filter(|f| !f.is_empty())
            .map(|f| f.parse::<f64>().map_err(|_| format_err(format!("not a number: {f:?}"))))
            .collect::<Result<Vec<f64>>>()?;
        if !row.is_empty() {
            rows.push(row);
        }
    }
    let mut out = Vec::new();
    let mut at = 0;
    while at < rows.len() {
        let header = &rows[at];
        if header.len() != 1 || header[0] < 1.0 || header[0].fract() != 0.0 {
            return Err(format_err(format!("record {}: expected a dimension row", out.len())));
        }
        let n = header[0] as usize;
        if at + n + 2 > rows.len() {
            return Err(format_err(format!("record {}: truncated", out.len())));
        }
        let body = &rows[at + 1..at + 1 + n];
        if body.iter().any(|r| r.len() != n) {
            return Err(format_err(format!("record {}: B must be {n}x{n}", out.len())));
        }
        let b = DMatrix::from_fn(n, n, |i, j| body[i][j]);
        out.push(classical_instance(b, rows[at + n + 1].clone(), tol)?);
        at += n + 2;
    }
    if out.is_empty() {
        return Err(format_err("no instances"));
    }
    Ok(out)
}

pub fn classical_batch_from_json(text: &str, tol: &ToleranceConfig) -> Result<Vec<ClassicalInstance>> {
    #[derive(Deserialize)]
    struct InstanceIn {
        dim: usize,
        matrix: Vec<Vec<f64>>,
        p: Vec<f64>,
    }
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum BatchIn {
        One(InstanceIn),
        Many(Vec<InstanceIn>),
    }
    let batch = match serde_json::from_str::<BatchIn>(text).map_err(format_err)? {
        BatchIn::One(i) => vec![i],
        BatchIn::Many(v) => v,
    };
    if batch.is_empty() {
        return Err(format_err("no instances"));
    }
    batch
        .into_iter()
        .map(|i| {
            let n = i.dim;
            if i.matrix.len() != n || i.matrix.iter().any(|r| r.len() != n) {
                return Err(format_err(format!("B must be {n}x{n}")));
            }
            let b = DMatrix::from_fn(n, n, |r, c| i.matrix[r][c]);
            classical_instance(b, i.p, tol)
        })
        .collect()
}

/// JSON when the text starts with `{` or `[`, CSV otherwise.
pub fn classical_batch_from_str(text: &str, tol: &ToleranceConfig) -> Result<Vec<ClassicalInstance>> {
    match text.trim_start().chars().next() {
        Some('{') | Some('[') => classical_batch_from_json(text, tol),
        _ => classical_batch_from_csv(text, tol),
    }
}

pub fn classical_instance_to_json(b: &StochasticMatrix, p: &ProbabilityVector) -> Value {
    let rows: Vec<Vec<f64>> = (0..b.dim()).map(|i| b.matrix().row(i).iter().copied().collect()).collect();
    serde_json::json!({ "dim": b.dim(), "matrix": rows, "p": p.as_slice() })
}

/// JSON formatter printing every float with 17 significant digits.
#[derive(Debug, Clone, Copy, Default)]
pub struct SeventeenDigits;

impl SeventeenDigits {
    fn write<W: ?Sized + Write>(w: &mut W, x: f64) -> std::io::Result<()> {
        if x == 0.0 {
            return w.write_all(if x.is_sign_negative() { b"-0.0" } else { b"0.0" });
        }
        let sci = format!("{x:.16e}");
        let exp: i32 = sci[sci.find('e').map_or(0, |k| k + 1)..].parse().unwrap_or(0);
        if (-5..16).contains(&exp) {
            let decimals = (16 - exp).max(1) as usize;
            write!(w, "{x:.decimals$}")
        } else {
            w.write_all(sci.as_bytes())
        }
    }
}

impl serde_json::ser::Formatter for SeventeenDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        Self::write(writer, value)
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()> {
        Self::write(writer, value as f64)
    }
}

/// Serialize with [`SeventeenDigits`]; non-finite floats become `null`.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SeventeenDigits);
    value.serialize(&mut ser).map_err(format_err)?;
    String::from_utf8(buf).map_err(format_err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frobenius, identity};

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for &x in &[1.0f64, 0.1, -2.5e-12, 1.0 / 3.0, 6.02214076e23, 0.7219280948873623, 123456.789] {
            let s = to_json_string(&x).unwrap();
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{s}");
            let digits = s
                .split(['e', 'E'])
                .next()
                .unwrap()
                .chars()
                .filter(char::is_ascii_digit)
                .collect::<String>();
            assert_eq!(digits.trim_start_matches('0').len(), 17, "{s}");
        }
        assert_eq!(to_json_string(&f64::INFINITY).unwrap(), "null");
        assert_eq!(to_json_string(&0.0).unwrap(), "0.0");
        assert_eq!(to_json_string(&serde_json::json!({"n": 2})).unwrap(), "{\"n\":2}");
    }

    #[test]
    fn state_round_trip() {
        let rho = crate::generators::random_density(3, 2, 5).unwrap();
        let text = to_json_string(&state_to_json(&rho)).unwrap();
        let back = state_from_json(&text, &tol()).unwrap();
        assert_eq!(back.matrix(), rho.matrix());
    }

    #[test]
    fn state_errors() {
        assert!(matches!(state_from_json("{", &tol()), Err(Error::Format(_))));
        let ragged = r#"{"dim": 2, "matrix": [[[1,0],[0,0]], [[0,0]]]}"#;
        assert!(matches!(state_from_json(ragged, &tol()), Err(Error::Format(_))));
        let wrong_dim = r#"{"dim": 3, "matrix": [[[1,0]]]}"#;
        assert!(matches!(state_from_json(wrong_dim, &tol()), Err(Error::DimensionMismatch { .. })));
        let half = r#"{"dim": 1, "matrix": [[[0.5,0]]]}"#;
        assert!(matches!(state_from_json(half, &tol()), Err(Error::TraceNotOne(_))));
    }

    #[test]
    fn channel_formats() {
        let phi = crate::generators::random_stochastic_channel(2, 2, 1);
        let text = to_json_string(&channel_to_json(&phi)).unwrap();
        let back = channel_from_json(&text, &tol()).unwrap();
        assert_eq!(back.kraus(), phi.kraus());

        let objects = r#"{"dim": 2, "kraus": [{"dim": 2, "matrix": [[[1,0],[0,0]],[[0,0],[1,0]]]}]}"#;
        let id = channel_from_json(objects, &tol()).unwrap();
        assert!(frobenius(&(id.kraus()[0].clone() - identity(2))) == 0.0);

        let mismatch = r#"{"dim": 3, "kraus": [[[[1,0],[0,0]],[[0,0],[1,0]]]]}"#;
        assert!(channel_from_json(mismatch, &tol()).is_err());
    }

    #[test]
    fn structure_round_trip() {
        let pair = crate::entropy_analysis::synthesize_pair(
            &crate::entropy_analysis::BlockSpec::uniform(vec![(1, 2), (2, 1)]),
            3,
        )
        .unwrap();
        let text = to_json_string(&structure_to_json(&pair.structure)).unwrap();
        let back = structure_from_json(&text, &tol()).unwrap();
        assert_eq!(back.dims(), pair.structure.dims());
        for (a, b) in back.blocks.iter().zip(&pair.structure.blocks) {
            assert_eq!(a.isometry, b.isometry);
        }
    }

    #[test]
    fn classical_csv_and_json() {
        let csv = "2\n0,1\n1,0\n0.25,0.75\n\n1\n1\n1\n";
        let batch = classical_batch_from_str(csv, &tol()).unwrap();
        assert_eq!(batch.len(), 2);
        assert_eq!(batch[0].p.as_slice(), &[0.25, 0.75]);
        assert!(batch[1].matrix.is_bistochastic());

        let json = r#"[{"dim": 2, "matrix": [[0.5, 0.5], [0.5, 0.5]], "p": [1, 0]}]"#;
        let batch = classical_batch_from_str(json, &tol()).unwrap();
        assert_eq!(batch.len(), 1);
        let back = to_json_string(&classical_instance_to_json(&batch[0].matrix, &batch[0].p)).unwrap();
        assert_eq!(classical_batch_from_str(&back, &tol()).unwrap()[0].p.as_slice(), &[1.0, 0.0]);

        assert!(classical_batch_from_str("2\n1,0\n0,1\n", &tol()).is_err());
        assert!(classical_batch_from_str("2\n1,0\n0,1\n0.5,0.6\n", &tol()).is_err());
        assert!(classical_batch_from_str("x\n", &tol()).is_err());
    }
}
