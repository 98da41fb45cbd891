use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use flatfront::{FrontGrid, SigVec};

use crate::config::{ExportFormat, ProjectionModel};
use crate::error::CliError;

/// Hyperboloid coordinates `(y0, y1, y2, y3)` of a front point.
fn hyperboloid(x: &SigVec) -> [f64; 4] {
    let c = x.project_r31();
    let c = c.coords();
    [c[0], c[1], c[2], c[3]]
}

/// Poincaré-ball coordinates `(y1, y2, y3) / (1 + y0)`.
pub fn poincare(x: &SigVec) -> [f64; 3] {
    let [y0, y1, y2, y3] = hyperboloid(x);
    let d = 1.0 + y0;
    [y1 / d, y2 / d, y3 / d]
}

fn vertex(x: &SigVec, model: ProjectionModel) -> [f64; 3] {
    match model {
        ProjectionModel::Poincare => poincare(x),
        ProjectionModel::Raw => {
            let [_, y1, y2, y3] = hyperboloid(x);
            [y1, y2, y3]
        }
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// OBJ with one vertex per node (row `i` major), quad faces, and the
/// singular vertices listed in a trailing comment block.
pub fn write_obj<W: Write>(out: &mut W, front: &FrontGrid, model: ProjectionModel) -> std::io::Result<()> {
    let d = &front.dom;
    let (nu, nv) = (d.nu, d.nv);
    let model_name = match model {
        ProjectionModel::Poincare => "poincare",
        ProjectionModel::Raw => "raw",
    };
    writeln!(out, "# flat front, lambda = {}", front.lambda)?;
    writeln!(out, "# grid {nu} x {nv} on [{}, {}] x [{}, {}]", d.u_min, d.u_max, d.v_min, d.v_max)?;
    writeln!(out, "# model {model_name}")?;
    for i in 0..nu {
        for j in 0..nv {
            let [x, y, z] = vertex(front.f.get(i, j), model);
            writeln!(out, "v {} {} {}", num(x), num(y), num(z))?;
        }
    }
    let idx = |i: usize, j: usize| i * nv + j + 1;
    for i in 0..nu.saturating_sub(1) {
        for j in 0..nv.saturating_sub(1) {
            writeln!(out, "f {} {} {} {}", idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1))?;
        }
    }
    let singular: Vec<usize> = front.singular.indexed().filter(|(_, s)| **s).map(|((i, j), _)| idx(i, j)).collect();
    writeln!(out, "# singular vertices: {}", singular.len())?;
    for chunk in singular.chunks(16) {
        let line: Vec<String> = chunk.iter().map(|k| k.to_string()).collect();
        writeln!(out, "# singular {}", line.join(" "))?;
    }
    Ok(())
}

pub const CSV_HEADER: &str = "u,v,f0,f1,f2,f3,t0,t1,t2,t3,E,G,kappa1,kappa2,singular";

/// CSV with raw hyperboloid coordinates of `f` and `t`.
pub fn write_csv<W: Write>(out: &mut W, front: &FrontGrid) -> std::io::Result<()> {
    let d = &front.dom;
    writeln!(out, "{CSV_HEADER}")?;
    for i in 0..d.nu {
        for j in 0..d.nv {
            let mut row = vec![num(d.u(i)), num(d.v(j))];
            row.extend(hyperboloid(front.f.get(i, j)).map(num));
            row.extend(hyperboloid(front.t.get(i, j)).map(num));
            row.push(num(*front.metric_e.get(i, j)));
            row.push(num(*front.metric_g.get(i, j)));
            row.push(num(*front.kappa1.get(i, j)));
            row.push(num(*front.kappa2.get(i, j)));
            row.push(u8::from(*front.singular.get(i, j)).to_string());
            writeln!(out, "{}", row.join(","))?;
        }
    }
    Ok(())
}

/// Writes `front` to `dir/stem.<ext>`; `Json` is not a mesh format and is
/// ignored here.
pub fn export_mesh(
    dir: &Path,
    stem: &str,
    front: &FrontGrid,
    format: ExportFormat,
    model: ProjectionModel,
) -> Result<Option<std::path::PathBuf>, CliError> {
    let ext = match format {
        ExportFormat::Obj => "obj",
        ExportFormat::Csv => "csv",
        ExportFormat::Json => return Ok(None),
    };
    let path = dir.join(format!("{stem}.{ext}"));
    let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
    let mut w = BufWriter::new(file);
    match format {
        ExportFormat::Obj => write_obj(&mut w, front, model),
        _ => write_csv(&mut w, front),
    }
    .and_then(|_| w.flush())
    .map_err(|e| CliError::io(&path, e))?;
    Ok(Some(path))
}

/// File stem of the mesh for one deformation parameter.
pub fn lambda_stem(lambda: f64) -> String {
    format!("front_lambda_{lambda}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use flatfront::front::integrate_frame;
    use flatfront::{GridDomain, HarmonicPotential};

    fn front() -> FrontGrid {
        let dom = GridDomain::square(-0.5, 0.5, 9).unwrap();
        flatfront::front::front_from_frame(&integrate_frame(&HarmonicPotential::reference(), &dom, 0.0).unwrap())
    }

    #[test]
    fn base_point_is_the_ball_centre() {
        assert_eq!(poincare(&SigVec::y(0)), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn obj_structure() {
        let f = front();
        let mut buf = Vec::new();
        write_obj(&mut buf, &f, ProjectionModel::Poincare).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let verts: Vec<&str> = text.lines().filter(|l| l.starts_with("v ")).collect();
        assert_eq!(verts.len(), 81);
        assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 64);
        for v in verts {
            let r2: f64 = v[2..].split(' ').map(|x| x.parse::<f64>().unwrap().powi(2)).sum();
            assert!(r2 < 1.0);
        }
        let centre = text.lines().filter(|l| l.starts_with("v ")).nth(4 * 9 + 4).unwrap();
        let c: Vec<f64> = centre[2..].split(' ').map(|x| x.parse().unwrap()).collect();
        assert!(c.iter().all(|x| x.abs() < 1e-15));
    }

    #[test]
    fn csv_rows_round_trip() {
        let f = front();
        let mut buf = Vec::new();
        write_csv(&mut buf, &f).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 1 + 81);
        let row: Vec<&str> = lines[1 + 3 * 9 + 5].split(',').collect();
        assert_eq!(row.len(), 15);
        let f0: f64 = row[2].parse().unwrap();
        assert_eq!(f0, hyperboloid(f.f.get(3, 5))[0]);
        let k: f64 = row[12].parse().unwrap();
        assert_eq!(k.to_bits(), f.kappa1.get(3, 5).to_bits());
    }

    #[test]
    fn stems() {
        assert_eq!(lambda_stem(0.25), "front_lambda_0.25");
        assert_eq!(lambda_stem(-1.0), "front_lambda_-1");
    }
}
