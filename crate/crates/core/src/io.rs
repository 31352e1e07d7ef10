//! CSV and JSON emission with 17 significant digits, so every double
//! round-trips exactly and identical inputs give identical bytes.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::curve::{ParametricCurve, PiecewiseLinearFunction, SampledFunction};
use crate::error::{Error, Result};
use crate::legendre::TransformReport;

/// `%.17g` with `-0` printed as `0`. Non-finite values print as `nan`,
/// `inf` or `-inf`.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v.is_nan() { "nan" } else if v > 0.0 { "inf" } else { "-inf" }.into();
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let body = if (-5..17).contains(&exp) {
        if exp < 0 {
            let s = format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits);
            trim_fraction(&s)
        } else {
            let point = exp as usize + 1;
            trim_fraction(&format!("{}.{}", &digits[..point], &digits[point..]))
        }
    } else {
        let m = trim_fraction(&format!("{}.{}", &digits[..1], &digits[1..]));
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    };
    format!("{sign}{body}")
}

fn trim_fraction(s: &str) -> String {
    if !s.contains('.') {
        return s.to_string();
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn csv_err(e: csv::Error) -> Error {
    Error::InvalidInput(format!("csv: {e}"))
}

fn io_err(e: std::io::Error) -> Error {
    Error::InvalidInput(format!("io: {e}"))
}

/// Rows of numbers under `header`.
pub fn write_rows<W: Write>(w: W, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header).map_err(csv_err)?;
    for row in rows {
        out.write_record(row.iter().map(|&v| fmt_num(v))).map_err(csv_err)?;
    }
    out.flush().map_err(io_err)
}

/// `x,y` (or any two-column header such as `m,d`).
pub fn write_sampled<W: Write>(w: W, header: [&str; 2], f: &SampledFunction) -> Result<()> {
    write_rows(w, &header, f.points().map(|(x, y)| vec![x, y]))
}

pub fn write_parametric<W: Write>(w: W, c: &ParametricCurve) -> Result<()> {
    write_rows(
        w,
        &["t", "x", "y"],
        c.ts().iter().zip(c.points()).map(|(&t, &(x, y))| vec![t, x, y]),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct RaySidecar {
    pub left_slope: Option<f64>,
    pub right_slope: Option<f64>,
}

/// The sidecar of `dir/name.csv` is `dir/name.json`.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

pub fn write_pl<W: Write, S: Write>(csv_out: W, sidecar: S, f: &PiecewiseLinearFunction) -> Result<()> {
    write_rows(csv_out, &["x", "y"], f.breakpoints().iter().map(|&(x, y)| vec![x, y]))?;
    write_json(
        sidecar,
        &RaySidecar {
            left_slope: f.left_slope(),
            right_slope: f.right_slope(),
        },
    )
}

/// Numeric rows of a headed CSV; every row must have `cols` fields.
pub fn read_rows<R: Read>(r: R, cols: usize) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let header = rdr.headers().map_err(csv_err)?;
    if header.len() != cols {
        return Err(Error::InvalidInput(format!("expected {cols} columns, header has {}", header.len())));
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let row = rec
            .iter()
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::InvalidInput(format!("non-numeric field on data row {}", i + 1)))?;
        rows.push(row);
    }
    Ok(rows)
}

pub fn read_points<R: Read>(r: R) -> Result<Vec<(f64, f64)>> {
    Ok(read_rows(r, 2)?.into_iter().map(|v| (v[0], v[1])).collect())
}

pub fn read_sampled<R: Read>(r: R) -> Result<SampledFunction> {
    let (xs, ys) = read_points(r)?.into_iter().unzip();
    SampledFunction::new(xs, ys)
}

pub fn read_pl<R: Read, S: Read>(csv_in: R, sidecar: Option<S>) -> Result<PiecewiseLinearFunction> {
    let rays = match sidecar {
        Some(s) => serde_json::from_reader(s).map_err(|e| Error::InvalidInput(format!("sidecar: {e}")))?,
        None => RaySidecar {
            left_slope: None,
            right_slope: None,
        },
    };
    PiecewiseLinearFunction::new(read_points(csv_in)?, rays.left_slope, rays.right_slope)
}

/// serde_json formatter printing floats with `fmt_num`; non-finite values
/// become `null`.
struct Fixed17;

impl serde_json::ser::Formatter for Fixed17 {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> std::io::Result<()> {
        if v.is_finite() {
            w.write_all(fmt_num(v).as_bytes())
        } else {
            w.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> std::io::Result<()> {
        self.write_f64(w, v as f64)
    }
}

pub fn to_json<T: Serialize + ?Sized>(v: &T) -> Result<String> {
    let mut buf = Vec::new();
    write_json(&mut buf, v)?;
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

/// One JSON document followed by a newline.
pub fn write_json<W: Write, T: Serialize + ?Sized>(mut w: W, v: &T) -> Result<()> {
    let mut ser = serde_json::Serializer::with_formatter(&mut w, Fixed17);
    v.serialize(&mut ser).map_err(|e| Error::InvalidInput(format!("json: {e}")))?;
    w.write_all(b"\n").map_err(io_err)
}

#[derive(Debug, Serialize)]
pub struct TransformDiagnostics<'a> {
    pub method: String,
    pub nonconvex_input: bool,
    pub skipped_m: &'a [f64],
    pub end_rays: Option<[f64; 2]>,
}

pub fn transform_diagnostics(r: &TransformReport) -> TransformDiagnostics<'_> {
    TransformDiagnostics {
        method: r.method.to_string(),
        nonconvex_input: r.diagnostics.nonconvex_input,
        skipped_m: &r.diagnostics.skipped_m,
        end_rays: r.diagnostics.end_rays.map(|(a, b)| [a, b]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(-2.5), "-2.5");
        assert_eq!(fmt_num(0.1), "0.10000000000000001");
        assert_eq!(fmt_num(1e-7), "9.9999999999999995e-08");
        assert_eq!(fmt_num(1e20), "1e+20");
        assert_eq!(fmt_num(123456.0), "123456");
        assert_eq!(fmt_num(0.00012), "0.00012");
        assert_eq!(fmt_num(f64::INFINITY), "inf");
    }

    #[test]
    fn format_round_trips() {
        for v in [std::f64::consts::PI, -1.0 / 3.0, 6.02214076e23, 5e-324, f64::MAX, 1e16, 1e17] {
            assert_eq!(fmt_num(v).parse::<f64>().unwrap(), v, "{v}");
        }
    }

    #[test]
    fn csv_round_trip() {
        let f = SampledFunction::new(vec![0.0, 0.5, 1.0], vec![-0.0, 1.0 / 3.0, 2.0]).unwrap();
        let mut buf = Vec::new();
        write_sampled(&mut buf, ["x", "y"], &f).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text, "x,y\n0,0\n0.5,0.33333333333333331\n1,2\n");
        let back = read_sampled(&buf[..]).unwrap();
        assert_eq!(back.ys()[1], 1.0 / 3.0);
    }

    #[test]
    fn pl_with_sidecar() {
        let f = PiecewiseLinearFunction::new(vec![(0.0, 0.0)], Some(-1.0), None).unwrap();
        let (mut c, mut s) = (Vec::new(), Vec::new());
        write_pl(&mut c, &mut s, &f).unwrap();
        assert_eq!(String::from_utf8(s.clone()).unwrap(), "{\"left_slope\":-1,\"right_slope\":null}\n");
        assert_eq!(read_pl(&c[..], Some(&s[..])).unwrap(), f);
        assert_eq!(sidecar_path(Path::new("out/dual.csv")), PathBuf::from("out/dual.json"));
    }

    #[test]
    fn json_numbers() {
        assert_eq!(to_json(&[0.1, -0.0, f64::NAN]).unwrap(), "[0.10000000000000001,0,null]\n");
    }

    #[test]
    fn bad_csv() {
        assert!(read_points("x,y\n1,a\n".as_bytes()).is_err());
        assert!(read_points("x,y,z\n1,2,3\n".as_bytes()).is_err());
    }
}
