//! Builders for the experiment families (constrained elastic net in
//! split and non-split form, generalized Heron location) and their
//! synthetic data generators, plus CSV ingestion for external design
//! matrices.

use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{GfbpError, Result};
use crate::linalg::{dot, norm2, seeded_rng, Matrix};
use crate::operators::{zero_cocoercive, CocoerciveOp, ResolventOp};
use crate::solver::GfbpProblem;

/// Constrained elastic net:
/// minimize `0.5 ||A x - b||^2 + gamma ||x||_1 + (1 - gamma) ||x||^2`
/// over the minimizers of `0.5 dist^2(., [0, 1]^n)`. In split form the
/// residual term becomes one rank-one block per observation.
#[derive(Debug, Clone)]
pub struct ElasticNetConfig {
    pub design: Matrix,
    pub response: Vec<f64>,
    pub gamma: f64,
    pub split: bool,
}

impl ElasticNetConfig {
    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(GfbpError::Parameter(format!(
                "elastic net parameter gamma must lie in [0, 1], got {}",
                self.gamma
            )));
        }
        if self.design.rows() != self.response.len() {
            return Err(GfbpError::Shape {
                context: "ElasticNetConfig".into(),
                expected: format!("{} responses", self.design.rows()),
                got: format!("{}", self.response.len()),
            });
        }
        Ok(())
    }
}

pub fn build_elastic_net(cfg: &ElasticNetConfig) -> Result<GfbpProblem> {
    cfg.validate()?;
    let n = cfg.design.cols();
    let gamma = cfg.gamma;

    let mut blocks = Vec::new();
    if cfg.split {
        for i in 0..cfg.design.rows() {
            blocks.push(ResolventOp::rank_one_quadratic(
                cfg.design.row(i).to_vec(),
                cfg.response[i],
                format!("row-{i}"),
            ));
        }
    } else {
        blocks.push(ResolventOp::least_squares(
            cfg.design.clone(),
            cfg.response.clone(),
        )?);
    }
    blocks.push(ResolventOp::l1(gamma)?);
    // the strongly convex term sits last so strong convergence applies
    blocks.push(ResolventOp::scaled_sq_norm(1.0 - gamma)?);

    let lo = vec![0.0; n];
    let hi = vec![1.0; n];
    let penalty = CocoerciveOp::box_sqdist_grad(lo.clone(), hi.clone())?;

    let objective: Box<dyn Fn(&[f64]) -> f64 + Send + Sync> = if cfg.split {
        let design = cfg.design.clone();
        let response = cfg.response.clone();
        Box::new(move |x: &[f64]| {
            let mut f = 0.0;
            for i in 0..design.rows() {
                let r = dot(design.row(i), x) - response[i];
                f += 0.5 * r * r;
            }
            f + gamma * x.iter().map(|v| v.abs()).sum::<f64>()
                + (1.0 - gamma) * dot(x, x)
        })
    } else {
        let design = cfg.design.clone();
        let response = cfg.response.clone();
        Box::new(move |x: &[f64]| {
            let r = crate::linalg::sub(&design.matvec(x), &response);
            0.5 * dot(&r, &r)
                + gamma * x.iter().map(|v| v.abs()).sum::<f64>()
                + (1.0 - gamma) * dot(x, x)
        })
    };

    let constraint = move |x: &[f64]| {
        x.iter()
            .zip(lo.iter().zip(&hi))
            .map(|(&v, (&l, &h))| {
                let d = v - v.clamp(l, h);
                0.5 * d * d
            })
            .sum::<f64>()
    };

    Ok(
        GfbpProblem::new(n, blocks, zero_cocoercive(), penalty)?
            .with_objective(move |x| objective(x))
            .with_constraint_value(constraint),
    )
}

/// Generalized Heron location problem:
/// minimize `sum_i dist(x, B(c_i, rho_i)) + ||x||^2` over the minimizers
/// of `0.5 ||A x||^2`.
#[derive(Debug, Clone)]
pub struct HeronConfig {
    pub centers: Vec<Vec<f64>>,
    pub radii: Vec<f64>,
    pub linear: Matrix,
}

impl HeronConfig {
    fn validate(&self) -> Result<()> {
        let n = self.linear.cols();
        if self.linear.rows() != n {
            return Err(GfbpError::Shape {
                context: "HeronConfig".into(),
                expected: "square constraint matrix".into(),
                got: format!("{}x{}", self.linear.rows(), n),
            });
        }
        if self.centers.is_empty() || self.centers.len() != self.radii.len() {
            return Err(GfbpError::Parameter(
                "need one radius per target center".into(),
            ));
        }
        for (i, c) in self.centers.iter().enumerate() {
            if c.len() != n {
                return Err(GfbpError::Shape {
                    context: format!("Heron center {i}"),
                    expected: format!("{n} coordinates"),
                    got: format!("{}", c.len()),
                });
            }
        }
        if self.radii.iter().any(|&r| r <= 0.0) {
            return Err(GfbpError::Parameter("target radii must be positive".into()));
        }
        if self.linear.is_zero() {
            return Err(GfbpError::Parameter(
                "constraint matrix must be nonzero".into(),
            ));
        }
        Ok(())
    }
}

pub fn build_heron(cfg: &HeronConfig) -> Result<GfbpProblem> {
    cfg.validate()?;
    let n = cfg.linear.cols();

    let mut blocks = Vec::new();
    for (i, (c, &rho)) in cfg.centers.iter().zip(&cfg.radii).enumerate() {
        blocks.push(ResolventOp::dist_ball(c.clone(), rho, format!("ball-{i}"))?);
    }
    blocks.push(ResolventOp::scaled_sq_norm(1.0)?);

    let penalty = CocoerciveOp::quadratic_penalty_grad(cfg.linear.clone())?;

    let centers = cfg.centers.clone();
    let radii = cfg.radii.clone();
    let objective = move |x: &[f64]| {
        let dists: f64 = centers
            .iter()
            .zip(&radii)
            .map(|(c, &rho)| (norm2(&crate::linalg::sub(x, c)) - rho).max(0.0))
            .sum();
        dists + dot(x, x)
    };
    let a = cfg.linear.clone();
    let constraint = move |x: &[f64]| {
        let ax = a.matvec(x);
        0.5 * dot(&ax, &ax)
    };

    Ok(
        GfbpProblem::new(n, blocks, zero_cocoercive(), penalty)?
            .with_objective(objective)
            .with_constraint_value(constraint),
    )
}

/// Seeded synthetic regression data. The design matrix has standard
/// normal entries; `x0` has `ceil(nonzero_frac * n)` standard normal
/// entries at random positions; the response is `A x0 + eps` with
/// `eps ~ N(0, ||A x0||^2)` per component.
pub fn gen_regression_data(
    m: usize,
    n: usize,
    seed: u64,
    nonzero_frac: f64,
) -> Result<(Matrix, Vec<f64>, Vec<f64>)> {
    if m == 0 || n == 0 {
        return Err(GfbpError::Parameter("sizes must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&nonzero_frac) {
        return Err(GfbpError::Parameter(format!(
            "nonzero fraction must lie in [0, 1], got {nonzero_frac}"
        )));
    }
    let mut rng = seeded_rng(seed);
    let data: Vec<f64> = (0..m * n).map(|_| rng.sample(StandardNormal)).collect();
    let a = Matrix::new(m, n, data)?;

    let count = (nonzero_frac * n as f64).ceil() as usize;
    let mut x0 = vec![0.0; n];
    let positions = rand::seq::index::sample(&mut rng, n, count);
    for idx in positions.iter() {
        x0[idx] = rng.sample(StandardNormal);
    }

    let ax0 = a.matvec(&x0);
    let sigma = norm2(&ax0);
    let b: Vec<f64> = ax0
        .iter()
        .map(|&v| v + sigma * rng.sample::<f64, _>(StandardNormal))
        .collect();
    Ok((a, b, x0))
}

/// The ill-conditioned deterministic family: `A` is `m x 2^m` with
/// `A[i][j] = 1 / (i + j - 1)` (1-based) and `b_i = -sum_j A[i][j]`.
pub fn gen_hilbert_problem(m: usize) -> Result<(Matrix, Vec<f64>)> {
    if m == 0 {
        return Err(GfbpError::Parameter("m must be at least 1".into()));
    }
    if m > 24 {
        return Err(GfbpError::Parameter(format!(
            "n = 2^{m} is beyond desk scale"
        )));
    }
    let n = 1usize << m;
    let mut data = Vec::with_capacity(m * n);
    for i in 1..=m {
        for j in 1..=n {
            data.push(1.0 / (i + j - 1) as f64);
        }
    }
    let a = Matrix::new(m, n, data)?;
    let b = (0..m).map(|i| -a.row(i).iter().sum::<f64>()).collect();
    Ok((a, b))
}

/// A random Heron instance: `m` unit balls with centers uniform in
/// `(-n^2, n^2)^n` and an `n x n` constraint matrix uniform in
/// `(-10, 10)`.
pub fn gen_heron_instance(n: usize, m: usize, seed: u64) -> Result<HeronConfig> {
    if n == 0 || m == 0 {
        return Err(GfbpError::Parameter("sizes must be at least 1".into()));
    }
    let mut rng = seeded_rng(seed);
    let span = (n * n) as f64;
    let centers: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..n).map(|_| rng.gen_range(-span..span)).collect())
        .collect();
    let linear = Matrix::new(
        n,
        n,
        (0..n * n).map(|_| rng.gen_range(-10.0..10.0)).collect(),
    )?;
    Ok(HeronConfig {
        centers,
        radii: vec![1.0; m],
        linear,
    })
}

/// Read a rectangular numeric CSV as a dense matrix, one observation per
/// row. A non-numeric first row is treated as a header and skipped.
pub fn load_csv_matrix(path: impl AsRef<Path>) -> Result<Matrix> {
    let rows = load_csv_rows(path.as_ref())?;
    Matrix::from_rows(&rows)
}

/// Read a single-column numeric CSV as a vector.
pub fn load_csv_vector(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let p = path.as_ref();
    let rows = load_csv_rows(p)?;
    let mut out = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        if row.len() != 1 {
            return Err(GfbpError::Format {
                path: p.to_path_buf(),
                row: i + 1,
                col: 2,
                msg: format!("expected a single column, found {}", row.len()),
            });
        }
        out.push(row[0]);
    }
    Ok(out)
}

fn load_csv_rows(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| GfbpError::Format {
            path: path.to_path_buf(),
            row: 0,
            col: 0,
            msg: e.to_string(),
        })?;

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width: Option<usize> = None;
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| GfbpError::Format {
            path: path.to_path_buf(),
            row: idx + 1,
            col: 0,
            msg: e.to_string(),
        })?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let mut row = Vec::with_capacity(record.len());
        let mut bad_cell: Option<usize> = None;
        for (j, field) in record.iter().enumerate() {
            match field.parse::<f64>() {
                Ok(v) => row.push(v),
                Err(_) => {
                    bad_cell = Some(j);
                    break;
                }
            }
        }
        if let Some(j) = bad_cell {
            // a non-numeric first row is a header
            if idx == 0 && rows.is_empty() {
                continue;
            }
            return Err(GfbpError::Format {
                path: path.to_path_buf(),
                row: idx + 1,
                col: j + 1,
                msg: format!("cell `{}` is not numeric", &record[j]),
            });
        }
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(GfbpError::Format {
                    path: path.to_path_buf(),
                    row: idx + 1,
                    col: row.len(),
                    msg: format!("ragged row: expected {w} columns, found {}", row.len()),
                });
            }
            _ => {}
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(GfbpError::Format {
            path: path.to_path_buf(),
            row: 0,
            col: 0,
            msg: "no numeric data rows".into(),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use std::io::Write;

    fn toy_config(split: bool) -> ElasticNetConfig {
        let (a, b, _) = gen_regression_data(3, 4, 7, 0.5).unwrap();
        ElasticNetConfig {
            design: a,
            response: b,
            gamma: 0.5,
            split,
        }
    }

    #[test]
    fn elastic_net_block_counts() {
        let p = build_elastic_net(&toy_config(false)).unwrap();
        assert_eq!(p.blocks().len(), 3);
        let p = build_elastic_net(&toy_config(true)).unwrap();
        assert_eq!(p.blocks().len(), 5);
    }

    #[test]
    fn elastic_net_rejects_bad_gamma() {
        let mut cfg = toy_config(false);
        cfg.gamma = 1.5;
        assert!(matches!(
            build_elastic_net(&cfg),
            Err(GfbpError::Parameter(_))
        ));
    }

    #[test]
    fn split_and_nonsplit_agree_on_objective_and_constraint() {
        let split = build_elastic_net(&toy_config(true)).unwrap();
        let plain = build_elastic_net(&toy_config(false)).unwrap();
        let mut rng = seeded_rng(21);
        for _ in 0..100 {
            let x: Vec<f64> = (0..4).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let fs = split.objective_value(&x).unwrap();
            let fp = plain.objective_value(&x).unwrap();
            assert!(
                (fs - fp).abs() <= 1e-10 * fp.abs().max(1.0),
                "objective mismatch {fs} vs {fp}"
            );
            let gs = split.constraint_value(&x).unwrap();
            let gp = plain.constraint_value(&x).unwrap();
            assert!((gs - gp).abs() <= 1e-10 * gp.abs().max(1.0));
        }
    }

    #[test]
    fn heron_builder_shapes_and_degeneracy() {
        let cfg = HeronConfig {
            centers: vec![vec![1.0, 0.0], vec![0.0, 2.0]],
            radii: vec![1.0, 1.0],
            linear: Matrix::identity(2),
        };
        let p = build_heron(&cfg).unwrap();
        assert_eq!(p.blocks().len(), 3);
        // a ball center contributes zero distance
        let f = p.objective_value(&[1.0, 0.0]).unwrap();
        // dist to own ball 0, dist to other ball sqrt(5) - 1, plus ||x||^2
        let expected = (5.0f64.sqrt() - 1.0) + 1.0;
        assert!((f - expected).abs() < 1e-12);

        let bad = HeronConfig {
            centers: vec![vec![0.0, 0.0]],
            radii: vec![1.0],
            linear: Matrix::zeros(2, 2),
        };
        assert!(matches!(build_heron(&bad), Err(GfbpError::Parameter(_))));
    }

    #[test]
    fn regression_data_is_deterministic_and_sparse() {
        let (a1, b1, x1) = gen_regression_data(5, 8, 42, 0.5).unwrap();
        let (a2, b2, x2) = gen_regression_data(5, 8, 42, 0.5).unwrap();
        assert_eq!(a1, a2);
        assert_eq!(b1, b2);
        assert_eq!(x1, x2);
        assert_eq!(x1.iter().filter(|&&v| v != 0.0).count(), 4);

        // different seed, different data
        let (a3, _, _) = gen_regression_data(5, 8, 43, 0.5).unwrap();
        assert_ne!(a1, a3);

        // zero fraction collapses the response to zero
        let (_, b0, x0) = gen_regression_data(5, 8, 42, 0.0).unwrap();
        assert!(x0.iter().all(|&v| v == 0.0));
        assert!(b0.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn hilbert_problem_matches_formula() {
        let (a, b) = gen_hilbert_problem(2).unwrap();
        assert_eq!(a.rows(), 2);
        assert_eq!(a.cols(), 4);
        assert_eq!(a.get(0, 0), 1.0);
        assert_eq!(a.get(1, 2), 0.25);
        let expected_b1 = -(1.0 + 0.5 + 1.0 / 3.0 + 0.25);
        assert!((b[0] - expected_b1).abs() < 1e-15);
        assert!((b[0] + 25.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn heron_instance_ranges() {
        let cfg = gen_heron_instance(2, 5, 11).unwrap();
        assert_eq!(cfg.centers.len(), 5);
        assert!(cfg.radii.iter().all(|&r| r == 1.0));
        for c in &cfg.centers {
            assert!(c.iter().all(|v| v.abs() < 4.0));
        }
        for i in 0..2 {
            for j in 0..2 {
                assert!(cfg.linear.get(i, j).abs() < 10.0);
            }
        }
        let again = gen_heron_instance(2, 5, 11).unwrap();
        assert_eq!(cfg.centers, again.centers);
        assert_eq!(cfg.linear, again.linear);
    }

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn csv_matrix_roundtrip_and_header_detection() {
        let f = write_temp("x,y\n1.0,2.0\n3.5,-4.0\n");
        let m = load_csv_matrix(f.path()).unwrap();
        assert_eq!(m.rows(), 2);
        assert_eq!(m.cols(), 2);
        assert_eq!(m.get(1, 0), 3.5);

        let f = write_temp("1,2\n3,4\n");
        let m = load_csv_matrix(f.path()).unwrap();
        assert_eq!(m.rows(), 2);
    }

    #[test]
    fn csv_errors_carry_location() {
        let f = write_temp("1,2\n3\n");
        match load_csv_matrix(f.path()) {
            Err(GfbpError::Format { row, .. }) => assert_eq!(row, 2),
            other => panic!("expected format error, got {other:?}"),
        }

        let f = write_temp("1,2\n3,oops\n");
        match load_csv_matrix(f.path()) {
            Err(GfbpError::Format { row, col, .. }) => {
                assert_eq!(row, 2);
                assert_eq!(col, 2);
            }
            other => panic!("expected format error, got {other:?}"),
        }

        let f = write_temp("");
        assert!(matches!(
            load_csv_matrix(f.path()),
            Err(GfbpError::Format { .. })
        ));
    }

    #[test]
    fn csv_vector_rejects_extra_columns() {
        let f = write_temp("1.0\n2.0\n");
        assert_eq!(load_csv_vector(f.path()).unwrap(), vec![1.0, 2.0]);
        let f = write_temp("1.0,2.0\n");
        assert!(load_csv_vector(f.path()).is_err());
    }
}
