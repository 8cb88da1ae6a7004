//! File formats: JSON artifacts with fixed-width floating-point text and
//! CSV tables, all written atomically.
//!
//! Every float is printed with 17 significant digits, enough to make the
//! decimal text an exact image of the binary value, so artifacts re-parse
//! to bitwise-equal numbers and identical runs produce identical bytes.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::afunc::AFunction;
use crate::error::{Error, Result};
use crate::grid::GridPotential;
use crate::measure::{IsospectralPath, SpectralMeasure};
use crate::reconstruct::ReconstructionResult;

/// serde_json formatter that spells every float in scientific notation with
/// 17 significant digits.
struct SciFormatter;

impl serde_json::ser::Formatter for SciFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.8e}")
    }
}

/// One float as it appears in the artifacts.
pub fn sci(value: f64) -> String {
    format!("{value:.16e}")
}

/// JSON text of `value` with the fixed float format and a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SciFormatter);
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serde_json emits UTF-8"))
}

/// Writes bytes through a temporary sibling and renames it into place, so a
/// crash never leaves a half-written artifact behind.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    atomic_write(path, to_json_string(value)?.as_bytes())
}

fn read_json<T: DeserializeOwned>(path: &Path, kind: &'static str) -> Result<T> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Malformed {
        kind,
        path: path.to_path_buf(),
        detail: e.to_string(),
    })
}

#[derive(Serialize, Deserialize)]
struct PotentialDto {
    #[serde(rename = "L")]
    length: f64,
    n: usize,
    samples: Vec<f64>,
    label: String,
}

pub fn write_potential(path: &Path, pot: &GridPotential) -> Result<()> {
    let dto = PotentialDto {
        length: pot.length(),
        n: pot.n(),
        samples: pot.samples().to_vec(),
        label: pot.label().to_string(),
    };
    write_json(path, &dto)
}

pub fn read_potential(path: &Path) -> Result<GridPotential> {
    let dto: PotentialDto = read_json(path, "potential")?;
    if dto.samples.len() != dto.n + 1 {
        return Err(Error::Malformed {
            kind: "potential",
            path: path.to_path_buf(),
            detail: format!("n = {} needs {} samples, found {}", dto.n, dto.n + 1, dto.samples.len()),
        });
    }
    GridPotential::new(dto.length, dto.samples, dto.label).map_err(|e| Error::Malformed {
        kind: "potential",
        path: path.to_path_buf(),
        detail: e.to_string(),
    })
}

#[derive(Serialize, Deserialize)]
struct MeasureDto {
    eigenvalues: Vec<f64>,
    weights: Vec<f64>,
    provenance: crate::measure::Provenance,
}

fn measure_dto(measure: &SpectralMeasure) -> MeasureDto {
    MeasureDto {
        eigenvalues: measure.energies().to_vec(),
        weights: measure.weights().to_vec(),
        provenance: measure.provenance.clone(),
    }
}

fn measure_from_dto(dto: MeasureDto, path: &Path) -> Result<SpectralMeasure> {
    SpectralMeasure::new(dto.eigenvalues, dto.weights, dto.provenance).map_err(|e| {
        Error::Malformed { kind: "measure", path: path.to_path_buf(), detail: e.to_string() }
    })
}

pub fn write_measure(path: &Path, measure: &SpectralMeasure) -> Result<()> {
    write_json(path, &measure_dto(measure))
}

pub fn read_measure(path: &Path) -> Result<SpectralMeasure> {
    measure_from_dto(read_json(path, "measure")?, path)
}

#[derive(Serialize, Deserialize)]
struct PathDto {
    base: MeasureDto,
    target: MeasureDto,
    tol: f64,
}

pub fn write_path(path: &Path, value: &IsospectralPath) -> Result<()> {
    let dto = PathDto {
        base: measure_dto(value.base()),
        target: measure_dto(value.target()),
        tol: value.tol(),
    };
    write_json(path, &dto)
}

pub fn read_path(path: &Path) -> Result<IsospectralPath> {
    let dto: PathDto = read_json(path, "path")?;
    let base = measure_from_dto(dto.base, path)?;
    let target = measure_from_dto(dto.target, path)?;
    IsospectralPath::new(base, target, dto.tol).map_err(|e| Error::Malformed {
        kind: "path",
        path: path.to_path_buf(),
        detail: e.to_string(),
    })
}

/// A-function table: "alpha,A,residual", one row per grid point.
pub fn write_afunction_csv(path: &Path, a: &AFunction) -> Result<()> {
    let mut text = String::from("alpha,A,residual\n");
    for ((&alpha, &value), &residual) in a.alphas().iter().zip(a.values()).zip(a.residuals()) {
        text.push_str(&format!("{},{},{}\n", sci(alpha), sci(value), sci(residual)));
    }
    atomic_write(path, text.as_bytes())
}

/// Reconstruction table: "x,V_t,detIplusDP", one row per grid node.
pub fn write_reconstruction_csv(path: &Path, rec: &ReconstructionResult) -> Result<()> {
    let pot = &rec.potential;
    let mut text = String::from("x,V_t,detIplusDP\n");
    for (i, (&v, &det)) in pot.samples().iter().zip(rec.det_track()).enumerate() {
        text.push_str(&format!("{},{},{}\n", sci(pot.node(i)), sci(v), sci(det)));
    }
    atomic_write(path, text.as_bytes())
}

/// Everything about one reconstruction except the table itself: the sidecar
/// JSON next to each reconstruction CSV.
#[derive(Serialize)]
pub struct ReconstructionSidecar<'a> {
    pub t: f64,
    #[serde(rename = "S")]
    pub support: &'a [usize],
    pub min_det: f64,
    pub max_condition: f64,
    pub warnings: &'a [String],
    pub quad_error: f64,
    pub ode_tol: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Provenance;
    use std::collections::BTreeMap;

    fn tmp_dir(tag: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("isospec-io-{tag}-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        dir
    }

    fn awkward_potential() -> GridPotential {
        // Samples with no short decimal image, to exercise the 17-digit
        // round trip.
        GridPotential::from_fn(std::f64::consts::PI, 7, "awkward", |x| {
            (x * 0.1).sin() * 1e-3 + x / 3.0
        })
        .unwrap()
    }

    #[test]
    fn potential_round_trips_bitwise() {
        let dir = tmp_dir("pot");
        let path = dir.join("pot.json");
        let pot = awkward_potential();
        write_potential(&path, &pot).unwrap();
        let back = read_potential(&path).unwrap();
        assert_eq!(back.length().to_bits(), pot.length().to_bits());
        assert_eq!(back.n(), pot.n());
        assert_eq!(back.label(), pot.label());
        for (a, b) in back.samples().iter().zip(pot.samples()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.contains("\"L\":"), "{text}");
        write_potential(&path, &pot).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), text, "rewrite changed bytes");
    }

    #[test]
    fn malformed_files_name_the_problem() {
        let dir = tmp_dir("bad");
        let path = dir.join("bad.json");
        fs::write(&path, b"{\"L\": 1.0, \"n\": 3, \"samples\": [0.0, 1.0], \"label\": \"x\"}")
            .unwrap();
        match read_potential(&path) {
            Err(Error::Malformed { kind: "potential", detail, .. }) => {
                assert!(detail.contains("4 samples"), "{detail}")
            }
            other => panic!("expected Malformed, got {other:?}"),
        }
        fs::write(&path, b"not json").unwrap();
        assert!(matches!(read_potential(&path), Err(Error::Malformed { .. })));
        assert!(matches!(read_potential(&dir.join("absent.json")), Err(Error::Io(_))));
    }

    fn toy_measure() -> SpectralMeasure {
        SpectralMeasure::new(
            vec![1.0, 4.0 + 1e-13],
            vec![2.0 / std::f64::consts::PI, 0.1234567890123456789],
            Provenance {
                source_label: "toy".into(),
                length: std::f64::consts::PI,
                n: 100,
                j_count: 2,
                eigen_tol: 1e-10,
                quad_tol: 1e-11,
            },
        )
        .unwrap()
    }

    #[test]
    fn measure_and_path_round_trip() {
        let dir = tmp_dir("measure");
        let mpath = dir.join("measure.json");
        let measure = toy_measure();
        write_measure(&mpath, &measure).unwrap();
        let back = read_measure(&mpath).unwrap();
        assert_eq!(back, measure);

        let mut deltas = BTreeMap::new();
        deltas.insert(1usize, 0.25);
        let path = IsospectralPath::from_perturbation(measure, &deltas).unwrap();
        let ppath = dir.join("path.json");
        write_path(&ppath, &path).unwrap();
        let back = read_path(&ppath).unwrap();
        assert_eq!(back.base(), path.base());
        assert_eq!(back.target(), path.target());
        assert_eq!(back.tol(), 0.0);
    }

    #[test]
    fn float_format_is_exact_and_fixed_width() {
        for &v in &[0.0, -0.0, 1.0, -1.5e-300, 2.0 / 3.0, f64::MIN_POSITIVE, 1e308] {
            let text = sci(v);
            let back: f64 = text.parse().unwrap();
            assert_eq!(back.to_bits(), v.to_bits(), "{text}");
        }
        assert_eq!(sci(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn json_floats_use_the_sci_format() {
        #[derive(Serialize)]
        struct Row {
            x: f64,
        }
        let text = to_json_string(&Row { x: 2.0 / 3.0 }).unwrap();
        assert_eq!(text, "{\"x\":6.6666666666666663e-1}\n");
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["x"].as_f64().unwrap(), 2.0 / 3.0);
    }

    #[test]
    fn atomic_write_leaves_no_temp_file() {
        let dir = tmp_dir("atomic");
        let path = dir.join("out.txt");
        atomic_write(&path, b"payload").unwrap();
        assert_eq!(fs::read(&path).unwrap(), b"payload");
        let leftovers: Vec<_> = fs::read_dir(&dir)
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .filter(|name| name.ends_with(".tmp"))
            .collect();
        assert!(leftovers.is_empty(), "{leftovers:?}");
    }

    #[test]
    fn afunction_csv_has_header_and_width() {
        let dir = tmp_dir("csv");
        let grid = crate::afunc::AlphaGrid::new(0.0, 1.0, 3).unwrap();
        let a = crate::afunc::delta_a(&toy_measure(), &toy_measure(), &grid).unwrap();
        let path = dir.join("a.csv");
        write_afunction_csv(&path, &a).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "alpha,A,residual");
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[1], "0.0000000000000000e0,0.0000000000000000e0,0.0000000000000000e0");
    }
}
