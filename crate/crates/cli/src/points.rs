//! Point lists from a file, inline JSON, `a,b;c,d` text, or `axis:K:R`.

use std::path::Path;

use biball::Error;

#[derive(serde::Deserialize)]
#[serde(untagged)]
enum PointsFile {
    Bare(Vec<Vec<f64>>),
    Wrapped {
        points: Vec<Vec<f64>>,
    },
}

fn from_json(text: &str) -> Result<Vec<Vec<f64>>, Error> {
    // Try strict bare-array first so syntax errors report a location.
    match serde_json::from_str::<Vec<Vec<f64>>>(text) {
        Ok(p) => Ok(p),
        Err(first) => match serde_json::from_str::<PointsFile>(text) {
            Ok(PointsFile::Bare(p)) | Ok(PointsFile::Wrapped { points: p }) => Ok(p),
            Err(_) => Err(Error::Schema(format!("points: {first}"))),
        },
    }
}

/// `axis:K:R` gives `K` points `t e₁`, `t` evenly spaced on `[0, R]`.
fn axis_grid(spec: &str, n: usize) -> Result<Vec<Vec<f64>>, Error> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Error::Parameter(format!("grid spec {spec:?} should look like axis:K:R"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let k: usize = parts[1].parse().map_err(|_| bad())?;
    let r: f64 = parts[2].parse().map_err(|_| bad())?;
    if k == 0 {
        return Err(bad());
    }
    Ok((0..k)
        .map(|i| {
            let mut x = vec![0.0; n];
            x[0] = if k == 1 { r } else { r * i as f64 / (k - 1) as f64 };
            x
        })
        .collect())
}

pub fn parse(spec: &str, n: usize) -> Result<Vec<Vec<f64>>, Error> {
    let trimmed = spec.trim();
    let pts = if trimmed.starts_with("axis:") {
        axis_grid(trimmed, n)?
    } else if trimmed.starts_with('[') || trimmed.starts_with('{') {
        from_json(trimmed)?
    } else if Path::new(trimmed).is_file() {
        let text = std::fs::read_to_string(trimmed)
            .map_err(|e| Error::Parameter(format!("cannot read points file {trimmed}: {e}")))?;
        from_json(&text)?
    } else {
        trimmed
            .split(';')
            .filter(|s| !s.trim().is_empty())
            .map(|p| {
                p.split(',')
                    .map(|c| c.trim().parse::<f64>().map_err(|_| Error::Parameter(format!("bad coordinate {c:?}"))))
                    .collect::<Result<Vec<f64>, Error>>()
            })
            .collect::<Result<Vec<_>, Error>>()?
    };
    if pts.is_empty() {
        return Err(Error::Parameter("no points given".into()));
    }
    for p in &pts {
        if p.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: p.len() });
        }
    }
    Ok(pts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats() {
        assert_eq!(parse("0.1,0.2;0,0", 2).unwrap(), vec![vec![0.1, 0.2], vec![0.0, 0.0]]);
        assert_eq!(parse("[[0.5,0]]", 2).unwrap(), vec![vec![0.5, 0.0]]);
        assert_eq!(parse(r#"{"points":[[0,0,0]]}"#, 3).unwrap().len(), 1);
        assert_eq!(parse("axis:3:0.5", 2).unwrap()[2], vec![0.5, 0.0]);
        assert!(matches!(parse("0.1;0.2", 2), Err(Error::DimensionMismatch { .. })));
        assert!(parse("[[0.5,", 2).is_err());
        assert!(parse("a,b", 2).is_err());
    }
}
