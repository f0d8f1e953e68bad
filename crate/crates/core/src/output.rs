//! CSV emission: `#`-prefixed comment header, one header row, values in
//! scientific notation with 17 significant digits.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::bifurcation::{Polyline, RegionGrid};
use crate::curves::{CurveASample, CurveDSample, CurvePoint, CuspPoint};
use crate::fixedpoints::FixedPoint;
use crate::simulate::Trajectory;

/// Lossless decimal form of an `f64`.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Table bound for a CSV file.
pub struct Table {
    pub header: Vec<String>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub trailer: Vec<String>,
}

impl Table {
    pub fn new(header: Vec<String>, columns: Vec<&'static str>) -> Self {
        Self {
            header,
            columns,
            rows: Vec::new(),
            trailer: Vec::new(),
        }
    }

    pub fn write_to(&self, w: &mut impl Write) -> io::Result<()> {
        for line in &self.header {
            writeln!(w, "# {line}")?;
        }
        writeln!(w, "{}", self.columns.join(","))?;
        for row in &self.rows {
            writeln!(w, "{}", row.join(","))?;
        }
        for line in &self.trailer {
            writeln!(w, "# {line}")?;
        }
        Ok(())
    }

    pub fn write_file(&self, path: &Path) -> io::Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        let mut w = BufWriter::new(File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()
    }
}

/// `prefix` + `name`; a prefix ending in `/` names a directory.
pub fn output_path(prefix: &str, name: &str) -> PathBuf {
    PathBuf::from(format!("{prefix}{name}"))
}

pub fn grid_table(header: Vec<String>, grid: &RegionGrid, payload: &'static str) -> Table {
    let mut t = Table::new(header, vec![grid.first.name, grid.second.name, payload]);
    t.rows = grid
        .rows()
        .map(|(a, b, c)| vec![num(a), num(b), c.to_string()])
        .collect();
    t
}

pub fn boundary_table(header: Vec<String>, lines: &[Polyline]) -> Table {
    let mut t = Table::new(
        header,
        vec!["polyline", "n_st_low", "n_st_high", "v_plus", "v_minus"],
    );
    for (k, line) in lines.iter().enumerate() {
        for &(a, b) in &line.points {
            t.rows.push(vec![
                k.to_string(),
                line.levels.0.to_string(),
                line.levels.1.to_string(),
                num(a),
                num(b),
            ]);
        }
    }
    t
}

pub fn curve_a_table(header: Vec<String>, samples: &[CurveASample]) -> Table {
    let mut t = Table::new(
        header,
        vec![
            "x",
            "v_plus",
            "v_minus",
            "gamma_cap",
            "gamma_tilde",
            "gamma",
        ],
    );
    t.rows = samples
        .iter()
        .map(|s| {
            vec![
                num(s.x),
                num(s.point.v_plus),
                num(s.point.v_minus),
                num(s.context.gamma_cap),
                num(s.context.gamma_tilde),
                num(s.context.gamma),
            ]
        })
        .collect();
    t
}

pub fn curve_table(header: Vec<String>, points: &[CurvePoint]) -> Table {
    let mut t = Table::new(header, vec!["v_plus", "v_minus"]);
    t.rows = points
        .iter()
        .map(|p| vec![num(p.v_plus), num(p.v_minus)])
        .collect();
    t
}

pub fn curve_d_table(header: Vec<String>, samples: &[CurveDSample]) -> Table {
    let mut t = Table::new(header, vec!["v_plus", "v_minus", "x_min"]);
    t.rows = samples
        .iter()
        .map(|s| vec![num(s.point.v_plus), num(s.point.v_minus), num(s.x_min)])
        .collect();
    t
}

pub fn cusp_table(header: Vec<String>, c: &CuspPoint) -> Table {
    let mut t = Table::new(header, vec!["x_c", "v_plus_c", "v_minus_c"]);
    t.rows
        .push(vec![num(c.x_c), num(c.v_plus_c), num(c.v_minus_c)]);
    t
}

pub fn fixed_point_table(header: Vec<String>, points: &[FixedPoint]) -> Table {
    let mut t = Table::new(
        header,
        vec!["x", "stability", "bracket_lo", "bracket_hi", "residual_log"],
    );
    t.rows = points
        .iter()
        .map(|f| {
            vec![
                num(f.x),
                f.stability.as_str().to_string(),
                num(f.bracket.0),
                num(f.bracket.1),
                num(f.residual_log),
            ]
        })
        .collect();
    t
}

pub fn trajectory_table(header: Vec<String>, traj: &Trajectory) -> Table {
    let mut t = Table::new(header, vec!["t_seconds", "x"]);
    t.rows = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(&time, &x)| vec![num(time), num(x)])
        .collect();
    t
}

/// A standalone matplotlib script that plots the CSVs of `command`.
pub fn plot_script(command: &str, prefix: &str) -> String {
    let body = match command {
        "sign-map" => {
            "d = load('sign_map.csv')\n\
             plt.tricontourf(d['v_minus'], d['x'], d['sign'], levels=[-1.5, -0.5, 0.5, 1.5], cmap='coolwarm')\n\
             plt.xlabel('V- (V)'); plt.ylabel('x')\n\
             save('sign_map.png')\n"
        }
        "nst-map" => {
            "d = load('nst_map.csv')\n\
             plt.tricontourf(d['v_plus'], d['v_minus'], d['n_st'], levels=[-0.5, 0.5, 1.5, 2.5, 3.5])\n\
             plt.colorbar(label='N_st')\n\
             b = load('nst_boundaries.csv')\n\
             if b.size:\n    for k in np.unique(np.atleast_1d(b['polyline'])):\n        s = np.atleast_1d(b)[np.atleast_1d(b['polyline']) == k]\n        plt.plot(s['v_plus'], s['v_minus'], 'k-', lw=0.8)\n\
             plt.xlabel('V+ (V)'); plt.ylabel('V- (V)')\n\
             save('nst_map.png')\n"
        }
        "curves" => {
            "for name, style in [('curve_a', 'k-'), ('curve_b', 'b-'), ('curve_c', 'g--'), ('curve_d', 'r--')]:\n    \
             d = load(name + '.csv')\n    plt.plot(d['v_plus'], d['v_minus'], style, label=name[-1].upper())\n\
             c = load('cusp.csv')\n\
             plt.plot(c['v_plus_c'], c['v_minus_c'], 'ko')\n\
             plt.xlim(0.3, 0.8); plt.ylim(-1.0, -0.3); plt.legend()\n\
             plt.xlabel('V+ (V)'); plt.ylabel('V- (V)')\n\
             save('curves.png')\n"
        }
        "fixed-points" => {
            "d = np.atleast_1d(load('fixed_points.csv'))\n\
             for row in d:\n    plt.axvline(row['x'], ls='-' if row['stability'] == b'stable' else '--')\n\
             plt.xlim(0, 1); plt.xlabel('x')\n\
             save('fixed_points.png')\n"
        }
        "simulate" => {
            "d = load('trajectory.csv')\n\
             plt.plot(d['t_seconds'], d['x'], lw=0.5)\n\
             for line in open(PREFIX + 'trajectory.csv'):\n    if line.startswith('# fixed_point'):\n        plt.axhline(float(line.split()[4]), ls='--', color='grey')\n\
             plt.xlabel('t (s)'); plt.ylabel('x')\n\
             save('trajectory.png')\n"
        }
        _ => "d = load('validate.csv')\nprint(d)\n",
    };
    format!(
        "# Generated by tao-memristor {version}: plots the output of `{command}`.\n\
         import numpy as np\n\
         import matplotlib\n\
         matplotlib.use('Agg')\n\
         import matplotlib.pyplot as plt\n\n\
         PREFIX = {prefix:?}\n\n\n\
         def load(name):\n    return np.genfromtxt(PREFIX + name, delimiter=',', comments='#', names=True, dtype=None)\n\n\n\
         def save(name):\n    plt.tight_layout()\n    plt.savefig(PREFIX + name, dpi=150)\n    print('wrote', PREFIX + name)\n\n\n\
         {body}",
        version = crate::VERSION,
    )
}
