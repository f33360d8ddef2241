use std::fmt::Write as _;
use std::path::Path;

use super::PointCloud;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum CloudParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{0}")]
    Io(String),
}

fn syntax(line: usize, message: impl Into<String>) -> CloudParseError {
    CloudParseError::Syntax {
        line,
        message: message.into(),
    }
}

/// Parses ASCII PLY (when the first line is `ply`) or whitespace XYZ[RGB].
pub fn parse_cloud(text: &str) -> Result<PointCloud, CloudParseError> {
    if text.lines().next().map(str::trim) == Some("ply") {
        parse_ply(text)
    } else {
        parse_xyz(text)
    }
}

pub fn read_cloud(path: &Path) -> Result<PointCloud, CloudParseError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CloudParseError::Io(format!("{}: {e}", path.display())))?;
    parse_cloud(&text)
}

struct Element {
    name: String,
    count: usize,
    props: Vec<(String, String)>,
}

fn parse_ply(text: &str) -> Result<PointCloud, CloudParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    lines.next();
    let mut elements: Vec<Element> = Vec::new();
    let mut ascii = false;
    let mut header_done = false;
    for (n, line) in lines.by_ref() {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            [] => {}
            ["comment", ..] | ["obj_info", ..] => {}
            ["format", fmt, _] => {
                if *fmt != "ascii" {
                    return Err(syntax(n, format!("unsupported PLY format {fmt:?}")));
                }
                ascii = true;
            }
            ["element", name, count] => {
                let count = count
                    .parse()
                    .map_err(|_| syntax(n, format!("bad element count {count:?}")))?;
                elements.push(Element {
                    name: name.to_string(),
                    count,
                    props: Vec::new(),
                });
            }
            ["property", "list", ..] => {
                let el = elements
                    .last_mut()
                    .ok_or_else(|| syntax(n, "property before element"))?;
                el.props.push(("list".into(), toks.last().unwrap().to_string()));
            }
            ["property", ty, name] => {
                let el = elements
                    .last_mut()
                    .ok_or_else(|| syntax(n, "property before element"))?;
                el.props.push((ty.to_string(), name.to_string()));
            }
            ["end_header"] => {
                header_done = true;
                break;
            }
            _ => return Err(syntax(n, format!("unexpected header line {line:?}"))),
        }
    }
    if !header_done {
        return Err(syntax(text.lines().count(), "missing end_header"));
    }
    if !ascii {
        return Err(syntax(1, "missing format line"));
    }

    let mut positions = Vec::new();
    let mut colors = Vec::new();
    let mut has_color = false;
    for el in &elements {
        if el.name != "vertex" {
            for _ in 0..el.count {
                lines
                    .next()
                    .ok_or_else(|| syntax(text.lines().count(), "truncated element data"))?;
            }
            continue;
        }
        let find = |name: &str| el.props.iter().position(|(_, p)| p == name);
        let (Some(ix), Some(iy), Some(iz)) = (find("x"), find("y"), find("z")) else {
            return Err(syntax(1, "vertex element lacks x, y, z"));
        };
        let rgb = match (find("red"), find("green"), find("blue")) {
            (Some(r), Some(g), Some(b)) => Some([r, g, b]),
            _ => None,
        };
        has_color = rgb.is_some();
        for _ in 0..el.count {
            let (n, line) = lines
                .next()
                .ok_or_else(|| syntax(text.lines().count(), "truncated vertex data"))?;
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() < el.props.len() {
                return Err(syntax(
                    n,
                    format!("expected {} values, found {}", el.props.len(), toks.len()),
                ));
            }
            let num = |i: usize| -> Result<f64, CloudParseError> {
                let v: f64 = toks[i]
                    .parse()
                    .map_err(|_| syntax(n, format!("bad number {:?}", toks[i])))?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(syntax(n, "non-finite coordinate"))
                }
            };
            positions.push([num(ix)?, num(iy)?, num(iz)?]);
            if let Some(idx) = rgb {
                let mut c = [0u8; 3];
                for (k, &i) in idx.iter().enumerate() {
                    c[k] = toks[i]
                        .parse()
                        .map_err(|_| syntax(n, format!("bad color {:?}", toks[i])))?;
                }
                colors.push(c);
            }
        }
    }
    let cloud = PointCloud::new(positions);
    Ok(if has_color {
        cloud.with_colors(colors).expect("one color per vertex")
    } else {
        cloud
    })
}

fn parse_xyz(text: &str) -> Result<PointCloud, CloudParseError> {
    let mut positions = Vec::new();
    let mut colors = Vec::new();
    let mut width = None;
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 3 && toks.len() != 6 {
            return Err(syntax(n, format!("expected 3 or 6 columns, found {}", toks.len())));
        }
        if *width.get_or_insert(toks.len()) != toks.len() {
            return Err(syntax(n, "column count changed"));
        }
        let mut p = [0.0f64; 3];
        for k in 0..3 {
            p[k] = toks[k]
                .parse()
                .map_err(|_| syntax(n, format!("bad number {:?}", toks[k])))?;
            if !p[k].is_finite() {
                return Err(syntax(n, "non-finite coordinate"));
            }
        }
        positions.push(p);
        if toks.len() == 6 {
            let mut c = [0u8; 3];
            for k in 0..3 {
                c[k] = toks[3 + k]
                    .parse()
                    .map_err(|_| syntax(n, format!("bad color {:?}", toks[3 + k])))?;
            }
            colors.push(c);
        }
    }
    let cloud = PointCloud::new(positions);
    Ok(if width == Some(6) {
        cloud.with_colors(colors).expect("one color per point")
    } else {
        cloud
    })
}

/// ASCII PLY with double-precision coordinates, so values round-trip.
pub fn write_ply(cloud: &PointCloud) -> String {
    let mut s = String::new();
    s.push_str("ply\nformat ascii 1.0\n");
    let _ = writeln!(s, "element vertex {}", cloud.len());
    s.push_str("property double x\nproperty double y\nproperty double z\n");
    if cloud.colors().is_some() {
        s.push_str("property uchar red\nproperty uchar green\nproperty uchar blue\n");
    }
    s.push_str("end_header\n");
    for (i, p) in cloud.positions().iter().enumerate() {
        let _ = write!(s, "{} {} {}", p[0], p[1], p[2]);
        if let Some(c) = cloud.colors() {
            let _ = write!(s, " {} {} {}", c[i][0], c[i][1], c[i][2]);
        }
        s.push('\n');
    }
    s
}
