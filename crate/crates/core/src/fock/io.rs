use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use serde_json::{json, Value};

use super::{FockError, FockResult};
use crate::format::fmt17;
use crate::scalar::Real;

fn pair<T: Real>(z: &Complex<T>) -> Value {
    json!([z.re.to_f64_lossy(), z.im.to_f64_lossy()])
}

/// Nested rows of `[re, im]` pairs.
pub fn matrix_to_json<T: Real>(m: &DMatrix<Complex<T>>) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| pair(&m[(i, j)])).collect()))
            .collect(),
    )
}

pub fn vector_to_json<T: Real>(v: &DVector<Complex<T>>) -> Value {
    Value::Array(v.iter().map(pair).collect())
}

fn parse_pair<T: Real>(v: &Value) -> FockResult<Complex<T>> {
    let arr = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| FockError::Format("expected a [re, im] pair".into()))?;
    let num = |x: &Value| {
        x.as_f64()
            .ok_or_else(|| FockError::Format(format!("non-numeric entry {x}")))
    };
    Ok(Complex::new(T::lit(num(&arr[0])?), T::lit(num(&arr[1])?)))
}

pub fn matrix_from_json<T: Real>(v: &Value) -> FockResult<DMatrix<Complex<T>>> {
    let rows = v
        .as_array()
        .ok_or_else(|| FockError::Format("expected an array of rows".into()))?;
    let ncols = rows.first().and_then(Value::as_array).map_or(0, Vec::len);
    let mut m = DMatrix::zeros(rows.len(), ncols);
    for (i, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| FockError::Format(format!("row {i} is not an array")))?;
        if row.len() != ncols {
            return Err(FockError::Format(format!(
                "row {i} has {} entries, expected {ncols}",
                row.len()
            )));
        }
        for (j, z) in row.iter().enumerate() {
            m[(i, j)] = parse_pair(z)?;
        }
    }
    Ok(m)
}

/// Flattened CSV: a `shape,R,C` line, a column header, then one `row,col,re,im` line per entry.
pub fn matrix_to_csv<T: Real>(m: &DMatrix<Complex<T>>) -> String {
    let mut out = format!("shape,{},{}\nrow,col,re,im\n", m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            out.push_str(&format!(
                "{i},{j},{},{}\n",
                fmt17(z.re.to_f64_lossy()),
                fmt17(z.im.to_f64_lossy())
            ));
        }
    }
    out
}

pub fn matrix_from_csv<T: Real>(text: &str) -> FockResult<DMatrix<Complex<T>>> {
    let bad = |line: usize, msg: &str| FockError::Format(format!("line {line}: {msg}"));
    let mut lines = text.lines().enumerate();
    let (_, shape) = lines.next().ok_or_else(|| bad(1, "missing shape line"))?;
    let dims: Vec<&str> = shape.split(',').collect();
    if dims.len() != 3 || dims[0] != "shape" {
        return Err(bad(1, "expected shape,R,C"));
    }
    let r: usize = dims[1]
        .trim()
        .parse()
        .map_err(|_| bad(1, "bad row count"))?;
    let c: usize = dims[2]
        .trim()
        .parse()
        .map_err(|_| bad(1, "bad column count"))?;
    match lines.next() {
        Some((_, h)) if h.trim() == "row,col,re,im" => {}
        _ => return Err(bad(2, "expected header row,col,re,im")),
    }
    let mut m = DMatrix::zeros(r, c);
    let mut seen = 0usize;
    for (k, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != 4 {
            return Err(bad(k + 1, "expected four fields"));
        }
        let i: usize = f[0].parse().map_err(|_| bad(k + 1, "bad row index"))?;
        let j: usize = f[1].parse().map_err(|_| bad(k + 1, "bad column index"))?;
        if i >= r || j >= c {
            return Err(bad(k + 1, "index out of range"));
        }
        let re: f64 = f[2].parse().map_err(|_| bad(k + 1, "bad real part"))?;
        let im: f64 = f[3].parse().map_err(|_| bad(k + 1, "bad imaginary part"))?;
        m[(i, j)] = Complex::new(T::lit(re), T::lit(im));
        seen += 1;
    }
    if seen != r * c {
        return Err(FockError::Format(format!(
            "expected {} entries, found {seen}",
            r * c
        )));
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> DMatrix<Complex<f64>> {
        DMatrix::from_fn(2, 3, |i, j| Complex::new(i as f64 + 0.1, -(j as f64) / 3.0))
    }

    #[test]
    fn json_round_trip() {
        let m = sample();
        let v = matrix_to_json(&m);
        assert_eq!(v[1][2], json!([1.1, -2.0 / 3.0]));
        assert_eq!(matrix_from_json::<f64>(&v).unwrap(), m);
        assert!(matrix_from_json::<f64>(&json!([[[1.0]]])).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let m = sample();
        let text = matrix_to_csv(&m);
        assert!(text.starts_with("shape,2,3\nrow,col,re,im\n"));
        assert_eq!(matrix_from_csv::<f64>(&text).unwrap(), m);
        assert!(matrix_from_csv::<f64>("shape,2,2\nrow,col,re,im\n0,0,1,0\n").is_err());
    }
}
