use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hullkit::fixtures::DEFAULT_SEED;
use hullkit::Point64;

#[derive(Debug, Parser)]
#[command(name = "hullkit", version, about = "Higher hulls of polygonal knots and links")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Knot file (JSON) or flat `x y z` vertex list.
    #[arg(long = "in", value_name = "FILE")]
    pub input: PathBuf,
    /// Output file: the report, or for commands that produce a mesh or a
    /// knot file, that artifact (the report then goes to standard output).
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Relative snapping tolerance.
    #[arg(long, value_name = "REL")]
    pub eps: Option<f64>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Add wall-clock timings to the report (makes it non-reproducible).
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Cells along the longest side, or explicit `nx,ny,nz`.
    #[arg(long, value_name = "DIMS", default_value = "32", value_parser = parse_dims)]
    pub grid: GridDims,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridDims {
    Longest(usize),
    Explicit([usize; 3]),
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a knot file for structural problems.
    Validate {
        #[command(flatten)]
        common: Common,
    },
    /// Cut count of the link by one plane.
    Count {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "NX,NY,NZ,D", value_parser = parse_plane, allow_hyphen_values = true)]
        plane: [f64; 4],
    },
    /// Minimal cut count through a point (exact, or sampled with --samples).
    Depth {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "X,Y,Z", value_parser = parse_point, allow_hyphen_values = true)]
        point: Point64,
        /// Use this many random planes instead of the exact oracle.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Voxelize the n-th hull; `--out` receives the OBJ boundary mesh.
    Hull {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[command(flatten)]
        grid: GridArgs,
        /// Maximum number of exact oracle calls.
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Largest level with a confirmed voxel.
    Hullnum {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Total curvature per component.
    Curvature {
        #[command(flatten)]
        common: Common,
    },
    /// Exact cone angle at a point.
    Cone {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "X,Y,Z", value_parser = parse_point, allow_hyphen_values = true)]
        point: Point64,
    },
    /// Monte Carlo cone angle from great-circle crossings.
    Crofton {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "X,Y,Z", value_parser = parse_point, allow_hyphen_values = true)]
        point: Point64,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Bridge and superbridge numbers with witness directions.
    Bridge {
        #[command(flatten)]
        common: Common,
    },
    /// Enumerate quadrisecants and test their mid-segments.
    Quadrisecants {
        #[command(flatten)]
        common: Common,
        /// Mid-segment sample points per quadrisecant.
        #[arg(long, default_value_t = 9)]
        samples: usize,
    },
    /// Clip every loop to the half-space `n.x <= d`; `--out` receives the
    /// clipped knot file.
    Clip {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "NX,NY,NZ,D", value_parser = parse_plane, allow_hyphen_values = true)]
        plane: [f64; 4],
    },
    /// Replace a subarc by its chord; `--out` receives the new knot file.
    Chord {
        #[command(flatten)]
        common: Common,
        /// `loop,start_edge,start_param,end_edge,end_param`.
        #[arg(long, value_name = "L,E0,T0,E1,T1", value_parser = parse_arc, allow_hyphen_values = true)]
        arc: ArcArg,
    },
    /// Orthogonal projection, optionally with the planar depth of a point.
    Project {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "X,Y,Z", value_parser = parse_point, allow_hyphen_values = true)]
        direction: Point64,
        #[arg(long, value_name = "X,Y,Z", value_parser = parse_point, allow_hyphen_values = true)]
        point: Option<Point64>,
    },
    /// Run a named property suite.
    Check {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Overrides the suite's outer trial count.
        #[arg(long)]
        trials: Option<usize>,
        /// Overrides the suite's inner sample count.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 16)]
        grid: usize,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Summary of the main invariants of a link.
    Report {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Write one of the built-in fixtures as a knot file.
    Fixture {
        #[arg(long, value_enum)]
        name: FixtureName,
        #[arg(long = "vertices", default_value_t = 64)]
        vertices: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Gap between the summands of the composite fixture.
        #[arg(long, default_value_t = 3.0)]
        separation: f64,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FixtureName {
    Circle,
    Trefoil,
    Hopf,
    Unlink,
    Composite,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcArg {
    pub loop_index: usize,
    pub start: (usize, f64),
    pub end: (usize, f64),
}

fn numbers(s: &str, n: usize) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("not a number: {t:?}")))
        .collect::<Result<_, _>>()?;
    if v.len() != n {
        return Err(format!("expected {n} comma-separated numbers, got {}", v.len()));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err("values must be finite".into());
    }
    Ok(v)
}

pub fn parse_point(s: &str) -> Result<Point64, String> {
    let v = numbers(s, 3)?;
    Ok(Point64::new(v[0], v[1], v[2]))
}

pub fn parse_plane(s: &str) -> Result<[f64; 4], String> {
    let v = numbers(s, 4)?;
    Ok([v[0], v[1], v[2], v[3]])
}

fn index(x: f64) -> Result<usize, String> {
    if x >= 0.0 && x.fract() == 0.0 {
        Ok(x as usize)
    } else {
        Err(format!("{x} is not an index"))
    }
}

pub fn parse_arc(s: &str) -> Result<ArcArg, String> {
    let v = numbers(s, 5)?;
    Ok(ArcArg {
        loop_index: index(v[0])?,
        start: (index(v[1])?, v[2]),
        end: (index(v[3])?, v[4]),
    })
}

pub fn parse_dims(s: &str) -> Result<GridDims, String> {
    let parts: Vec<&str> = s.split(',').collect();
    let parse = |t: &str| {
        t.trim()
            .parse::<usize>()
            .ok()
            .filter(|&d| d > 0)
            .ok_or_else(|| format!("bad grid size {t:?}"))
    };
    match parts.as_slice() {
        [r] => Ok(GridDims::Longest(parse(r)?)),
        [a, b, c] => Ok(GridDims::Explicit([parse(a)?, parse(b)?, parse(c)?])),
        _ => Err("grid is R or NX,NY,NZ".into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometry_strings() {
        assert_eq!(parse_point("1, 2,3").unwrap(), Point64::new(1.0, 2.0, 3.0));
        assert!(parse_point("1,2").is_err());
        assert!(parse_point("1,x,2").is_err());
        assert!(parse_plane("0,0,1,nan").is_err());
        assert_eq!(parse_dims("32").unwrap(), GridDims::Longest(32));
        assert_eq!(parse_dims("4,5,6").unwrap(), GridDims::Explicit([4, 5, 6]));
        assert!(parse_dims("0").is_err());
        assert!(parse_arc("0,1.5,0.2,3,0.4").is_err());
    }
}
