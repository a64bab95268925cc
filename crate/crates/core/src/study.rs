//! Refinement studies: solve a manufactured problem on a ladder of meshes,
//! measure the six errors, and estimate observed orders.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use crate::assembly::{apply_boundary_conditions, assemble_system, AssemblyOptions};
use crate::error::{Result, WgError};
use crate::manufactured::Problem;
use crate::mesh::Mesh;
use crate::norms::{compute_errors, ErrorReport};
use crate::projection::WgField;
use crate::solver::{solve, SolverConfig};
use crate::space::{QuadratureConfig, WgSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeshFamily {
    Triangles,
    Quads,
}

impl MeshFamily {
    pub fn build(self, n: usize) -> Result<Mesh> {
        match self {
            MeshFamily::Triangles => Mesh::uniform_triangles(n),
            MeshFamily::Quads => Mesh::uniform_quads(n),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MeshFamily::Triangles => "tri",
            MeshFamily::Quads => "quad",
        }
    }
}

impl FromStr for MeshFamily {
    type Err = WgError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tri" => Ok(MeshFamily::Triangles),
            "quad" => Ok(MeshFamily::Quads),
            other => Err(WgError::InvalidStudy(format!("unknown mesh family '{other}' (tri or quad)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableFormat {
    Markdown,
    Csv,
}

impl FromStr for TableFormat {
    type Err = WgError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "markdown" | "md" => Ok(TableFormat::Markdown),
            "csv" => Ok(TableFormat::Csv),
            other => Err(WgError::InvalidStudy(format!("unknown format '{other}' (markdown or csv)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StudyConfig {
    pub problem: String,
    pub k: usize,
    pub mesh: MeshFamily,
    /// Grid parameters n, strictly increasing.
    pub levels: Vec<usize>,
    pub solver: SolverConfig,
    pub quadrature: QuadratureConfig,
    pub format: TableFormat,
    /// Compute element matrices in parallel (results are unchanged).
    pub parallel: bool,
    /// Record wall-clock solve times; when false the column holds zeros so
    /// that identical configurations give identical output bytes.
    pub record_timings: bool,
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig {
            problem: "example1".into(),
            k: 2,
            mesh: MeshFamily::Triangles,
            levels: vec![4, 8, 16, 32],
            solver: SolverConfig::default(),
            quadrature: QuadratureConfig::default(),
            format: TableFormat::Markdown,
            parallel: false,
            record_timings: true,
        }
    }
}

impl StudyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(WgError::InvalidDegree(self.k));
        }
        if self.levels.is_empty() {
            return Err(WgError::InvalidStudy("refinement list is empty".into()));
        }
        if self.levels[0] == 0 {
            return Err(WgError::ZeroRefinement);
        }
        if self.levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(WgError::InvalidStudy(format!(
                "refinement list {:?} is not strictly increasing",
                self.levels
            )));
        }
        self.solver.validate()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    /// max_T h_T
    pub h: f64,
    pub dofs: usize,
    pub errors: ErrorReport,
    /// Observed order of each error against the previous row.
    pub orders: [Option<f64>; 6],
    pub solve_seconds: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceTable {
    pub problem: String,
    pub k: usize,
    pub mesh: MeshFamily,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    /// Order of error `norm` (0..6, table order) between the last two rows.
    pub fn finest_order(&self, norm: usize) -> Option<f64> {
        self.rows.last().and_then(|r| r.orders[norm])
    }
}

/// Solution and error report for one mesh.
pub struct LevelResult {
    pub field: WgField,
    pub errors: ErrorReport,
    pub dofs: usize,
    pub solve_seconds: f64,
}

pub fn solve_problem(
    mesh: &Mesh,
    problem: &Problem,
    k: usize,
    solver: &SolverConfig,
    quadrature: QuadratureConfig,
    parallel: bool,
) -> Result<LevelResult> {
    let space = WgSpace::with_quadrature(mesh, k, quadrature)?;
    let system = assemble_system(&space, problem.source(), &AssemblyOptions { parallel })?;
    let reduced = apply_boundary_conditions(&space, &system, problem.trace(), problem.flux())?;
    let start = Instant::now();
    let outcome = solve(&reduced.matrix, &reduced.rhs, solver)?;
    let solve_seconds = start.elapsed().as_secs_f64();
    let field = reduced.expand(&space, &outcome.solution);
    let errors = compute_errors(&space, &field, problem.solution())?;
    Ok(LevelResult {
        field,
        errors,
        dofs: space.layout().num_dofs(),
        solve_seconds,
    })
}

pub fn run_study(config: &StudyConfig) -> Result<ConvergenceTable> {
    config.validate()?;
    let problem = Problem::from_id(&config.problem)?;
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(config.levels.len());
    for &n in &config.levels {
        let wrap = |e: WgError| WgError::StudyLevel { n, source: Box::new(e) };
        let mesh = config.mesh.build(n).map_err(wrap)?;
        let level = solve_problem(
            &mesh,
            &problem,
            config.k,
            &config.solver,
            config.quadrature,
            config.parallel,
        )
        .map_err(wrap)?;
        let h = mesh.max_diameter();
        let mut orders = [None; 6];
        if let Some(prev) = rows.last() {
            let (a, b) = (prev.errors.as_array(), level.errors.as_array());
            for (i, o) in orders.iter_mut().enumerate() {
                *o = pair_order(a[i], b[i], prev.h, h);
            }
        }
        rows.push(ConvergenceRow {
            n,
            h,
            dofs: level.dofs,
            errors: level.errors,
            orders,
            solve_seconds: if config.record_timings { level.solve_seconds } else { 0.0 },
        });
    }
    Ok(ConvergenceTable {
        problem: problem.id().to_string(),
        k: config.k,
        mesh: config.mesh,
        rows,
    })
}

fn pair_order(e_prev: f64, e_cur: f64, h_prev: f64, h_cur: f64) -> Option<f64> {
    let valid = |v: f64| v.is_finite() && v > 0.0;
    if !(valid(e_prev) && valid(e_cur) && valid(h_prev) && valid(h_cur)) || h_prev == h_cur {
        return None;
    }
    Some((e_prev / e_cur).ln() / (h_prev / h_cur).ln())
}

/// Orders log(e_prev/e_cur)/log(h_prev/h_cur); the first entry is always
/// `None`, as are pairs with non-positive errors.
pub fn observed_order(errors: &[f64], hs: &[f64]) -> Result<Vec<Option<f64>>> {
    if errors.len() != hs.len() || errors.len() < 2 {
        return Err(WgError::InvalidStudy(format!(
            "need equal-length error and h lists of length at least 2 (got {} and {})",
            errors.len(),
            hs.len()
        )));
    }
    let mut out = vec![None];
    for i in 1..errors.len() {
        out.push(pair_order(errors[i - 1], errors[i], hs[i - 1], hs[i]));
    }
    Ok(out)
}

/// Display names of the six measures.
pub const NORM_LABELS: [&str; 6] = [
    "A discrete H² norm |||Q_h u - u_h|||",
    "Element based L² norm ‖Q_0 u - u_0‖",
    "Edge based L² norm for v_b ‖Q_b u - u_b‖",
    "Edge based L² norm for v_n ‖Q_b(∇u·n_e) - u_n‖",
    "Edge based L∞ norm for v_b",
    "Edge based L∞ norm for v_n",
];

pub const CSV_HEADER: &str = "n,h,dofs,err_h2,ord_h2,err_l2,ord_l2,err_eb_l2,ord_eb_l2,err_en_l2,ord_en_l2,err_eb_inf,ord_eb_inf,err_en_inf,ord_en_inf,solve_seconds";

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn order_cell(o: Option<f64>) -> String {
    o.map_or_else(|| "-".to_string(), num)
}

pub fn emit_table(table: &ConvergenceTable, format: TableFormat) -> String {
    match format {
        TableFormat::Csv => emit_csv(table),
        TableFormat::Markdown => emit_markdown(table),
    }
}

fn emit_csv(table: &ConvergenceTable) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in &table.rows {
        let mut cells = vec![r.n.to_string(), num(r.h), r.dofs.to_string()];
        for (e, o) in r.errors.as_array().iter().zip(&r.orders) {
            cells.push(num(*e));
            cells.push(order_cell(*o));
        }
        cells.push(num(r.solve_seconds));
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn emit_markdown(table: &ConvergenceTable) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "Errors and orders for {} with k = {} on {} meshes\n",
        table.problem,
        table.k,
        table.mesh.name()
    );
    for pair in [[0, 1], [2, 3], [4, 5]] {
        let _ = writeln!(
            out,
            "| h | {} | order | {} | order |",
            NORM_LABELS[pair[0]], NORM_LABELS[pair[1]]
        );
        out.push_str("|---|---|---|---|---|\n");
        for r in &table.rows {
            let e = r.errors.as_array();
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} |",
                num(r.h),
                num(e[pair[0]]),
                order_cell(r.orders[pair[0]]),
                num(e[pair[1]]),
                order_cell(r.orders[pair[1]]),
            );
        }
        out.push('\n');
    }
    out.push_str("| n | DOFs | solve seconds |\n|---|---|---|\n");
    for r in &table.rows {
        let _ = writeln!(out, "| {} | {} | {} |", r.n, r.dofs, num(r.solve_seconds));
    }
    out
}

/// Parses CSV produced by [`emit_table`].
pub fn parse_csv(text: &str) -> Result<Vec<ConvergenceRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == CSV_HEADER => {}
        _ => return Err(WgError::TableParse("missing or unexpected CSV header".into())),
    }
    let float = |s: &str| -> Result<f64> {
        s.parse::<f64>()
            .map_err(|e| WgError::TableParse(format!("bad number '{s}': {e}")))
    };
    let order = |s: &str| -> Result<Option<f64>> {
        if s == "-" {
            Ok(None)
        } else {
            float(s).map(Some)
        }
    };
    let int = |s: &str| -> Result<usize> {
        s.parse::<usize>()
            .map_err(|e| WgError::TableParse(format!("bad integer '{s}': {e}")))
    };
    let mut rows = Vec::new();
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != 16 {
            return Err(WgError::TableParse(format!("expected 16 columns, found {}", cells.len())));
        }
        let mut errors = [0.0; 6];
        let mut orders = [None; 6];
        for i in 0..6 {
            errors[i] = float(cells[3 + 2 * i])?;
            orders[i] = order(cells[4 + 2 * i])?;
        }
        rows.push(ConvergenceRow {
            n: int(cells[0])?,
            h: float(cells[1])?,
            dofs: int(cells[2])?,
            errors: ErrorReport::from_array(errors),
            orders,
            solve_seconds: float(cells[15])?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn order_examples() {
        let o = observed_order(&[0.4, 0.1], &[0.2, 0.1]).unwrap();
        assert_eq!(o[0], None);
        assert!((o[1].unwrap() - 2.0).abs() < 1e-14);
        let o = observed_order(&[0.3, 0.3], &[0.5, 0.25]).unwrap();
        assert_eq!(o[1], Some(0.0));
        let eps = 1e-5;
        let o = observed_order(&[8.0 * eps, eps], &[0.2, 0.1]).unwrap();
        assert!((o[1].unwrap() - 3.0).abs() < 1e-13);
        let o = observed_order(&[0.0, 1e-3, -1.0], &[0.4, 0.2, 0.1]).unwrap();
        assert_eq!(o, vec![None, None, None]);
        assert!(observed_order(&[1.0], &[1.0]).is_err());
        assert!(observed_order(&[1.0, 2.0], &[1.0]).is_err());
    }

    #[test]
    fn config_validation() {
        let mut c = StudyConfig::default();
        assert!(c.validate().is_ok());
        c.levels = vec![8, 4];
        assert!(c.validate().is_err());
        c.levels = vec![];
        assert!(c.validate().is_err());
        c.levels = vec![0, 2];
        assert!(c.validate().is_err());
        c.levels = vec![2, 4];
        c.k = 1;
        assert!(c.validate().is_err());
    }

    fn sample_table() -> ConvergenceTable {
        ConvergenceTable {
            problem: "example1".into(),
            k: 2,
            mesh: MeshFamily::Triangles,
            rows: vec![
                ConvergenceRow {
                    n: 4,
                    h: 0.25 * 2f64.sqrt(),
                    dofs: 352,
                    errors: ErrorReport::from_array([0.1, 1.0 / 3.0, 2e-3, 4e-4, 5e-5, 6e-6]),
                    orders: [None; 6],
                    solve_seconds: 0.0123,
                },
                ConvergenceRow {
                    n: 8,
                    h: 0.125 * 2f64.sqrt(),
                    dofs: 1344,
                    errors: ErrorReport::from_array([0.05, 0.1 / 12.0, 5e-4, 1e-4, 1.3e-5, 1.6e-6]),
                    orders: [Some(1.0), Some(2.0), Some(2.0), Some(2.0), Some(1.9), Some(1.9)],
                    solve_seconds: 0.1,
                },
            ],
        }
    }

    #[test]
    fn markdown_layout() {
        let md = emit_table(&sample_table(), TableFormat::Markdown);
        assert!(md.contains("A discrete H² norm"));
        assert!(md.contains("Element based L² norm"));
        assert!(md.contains("Edge based L∞ norm for v_n"));
        let first_row = md.lines().find(|l| l.starts_with("| 3.5355")).unwrap();
        assert!(first_row.contains("| - |"));
    }

    #[test]
    fn csv_round_trip() {
        let t = sample_table();
        let csv = emit_table(&t, TableFormat::Csv);
        assert!(csv.starts_with(CSV_HEADER));
        assert_eq!(parse_csv(&csv).unwrap(), t.rows);
        assert!(parse_csv("n,h\n1,2\n").is_err());
    }

    proptest! {
        #[test]
        fn csv_preserves_every_double(errs in prop::array::uniform6(1e-300f64..1e3), h in 1e-6f64..1.0) {
            let mut t = sample_table();
            t.rows[1].errors = ErrorReport::from_array(errs);
            t.rows[1].h = h;
            let back = parse_csv(&emit_table(&t, TableFormat::Csv)).unwrap();
            prop_assert_eq!(back, t.rows);
        }

        #[test]
        fn order_of_power_law_is_exponent(p in 0.5f64..5.0, c in 1e-3f64..10.0, h in 0.01f64..0.5) {
            let hs = [2.0 * h, h];
            let es = [c * (2.0 * h).powf(p), c * h.powf(p)];
            let o = observed_order(&es, &hs).unwrap()[1].unwrap();
            prop_assert!((o - p).abs() < 1e-10);
        }
    }
}
