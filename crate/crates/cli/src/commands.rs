use std::path::Path;
use std::time::Instant;

use serde_json::{json, Value};

use hullkit::curvature::count_maxima;
use hullkit::fixtures::{self, Fixture};
use hullkit::geometry::validate;
use hullkit::hull::{extract_hull, hull_number, ExtractOptions, GridSpec};
use hullkit::io::{self, KnotMeta};
use hullkit::projection::{min_cut_2d, project};
use hullkit::secants::midsegment_depth_check;
use hullkit::suites::{run_suite, Suite, SuiteOptions};
use hullkit::surgery::{clip_to_halfspace, replace_subarc_in, ArcSpec, LoopPoint};
use hullkit::{
    bridge_superbridge, cone_angle, crofton_estimate, cut_count, link_total_curvature, min_cut_exact,
    min_cut_sampled, quadrisecants, total_curvature, Halfspace, Link64, Plane64, Side, Tolerance64,
};

use crate::args::{Cli, Command, Common, FixtureName, GridDims};
use crate::report::{envelope, render, CliError, Input, Outcome};

/// Runs one invocation and returns the exit code. The report goes to
/// standard output; errors go to standard error as JSON.
pub fn run(cli: Cli) -> i32 {
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            let v = json!({ "error": { "kind": e.kind(), "message": e.to_string(), "exit_code": e.exit_code() } });
            eprintln!("{v}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    if let Command::Fixture {
        name,
        vertices,
        seed,
        separation,
        out,
    } = &cli.command
    {
        return fixture(*name, *vertices, *seed, *separation, out.as_deref());
    }
    let (name, common) = split(&cli.command);
    let (link, meta) = io::load_link(&common.input)?;
    let tol = match common.eps {
        Some(e) => Tolerance64::with_rel(&link, e).map_err(|e| CliError::Usage(e.to_string()))?,
        None => Tolerance64::for_link(&link),
    };
    let input = Input {
        path: &common.input,
        link: &link,
        name: meta.and_then(|m| m.name),
        tol,
    };
    let start = Instant::now();
    let outcome = dispatch(&cli.command, &link, &tol)?;
    let elapsed = start.elapsed().as_secs_f64();
    let report = render(
        &envelope(name, Some(&input), &outcome, common.timings.then_some(elapsed)),
        common.format,
    );
    // For these commands --out names the produced mesh or knot file instead.
    let artifact = matches!(cli.command, Command::Hull { .. } | Command::Clip { .. } | Command::Chord { .. });
    match &common.out {
        Some(p) if !artifact => std::fs::write(p, report).map_err(|e| CliError::Invalid(format!("{}: {e}", p.display())))?,
        _ => print!("{report}"),
    }
    Ok(outcome.exit)
}

fn split(c: &Command) -> (&'static str, &Common) {
    match c {
        Command::Validate { common } => ("validate", common),
        Command::Count { common, .. } => ("count", common),
        Command::Depth { common, .. } => ("depth", common),
        Command::Hull { common, .. } => ("hull", common),
        Command::Hullnum { common, .. } => ("hullnum", common),
        Command::Curvature { common } => ("curvature", common),
        Command::Cone { common, .. } => ("cone", common),
        Command::Crofton { common, .. } => ("crofton", common),
        Command::Bridge { common } => ("bridge", common),
        Command::Quadrisecants { common, .. } => ("quadrisecants", common),
        Command::Clip { common, .. } => ("clip", common),
        Command::Chord { common, .. } => ("chord", common),
        Command::Project { common, .. } => ("project", common),
        Command::Check { common, .. } => ("check", common),
        Command::Report { common, .. } => ("report", common),
        Command::Fixture { .. } => unreachable!("fixture has no input file"),
    }
}

fn to_value<S: serde::Serialize>(s: &S) -> Value {
    serde_json::to_value(s).expect("results serialize")
}

fn plane(p: [f64; 4]) -> Result<Plane64, CliError> {
    Plane64::new(hullkit::Point64::new(p[0], p[1], p[2]), p[3]).map_err(|e| CliError::Usage(e.to_string()))
}

fn grid(link: &Link64, dims: GridDims) -> Result<GridSpec<f64>, CliError> {
    match dims {
        GridDims::Longest(r) => Ok(GridSpec::covering(link, r)?),
        GridDims::Explicit(d) => {
            let (lo, hi) = link.bounding_box().ok_or_else(|| CliError::Invalid("link has no vertices".into()))?;
            let ext = hi - lo;
            let spacing = (0..3).map(|a| ext[a] / d[a] as f64).fold(0.0, f64::max) * (1.0 + 1e-6);
            let mid = (lo + hi) * 0.5;
            let origin = hullkit::Point64::new(
                mid.x - spacing * d[0] as f64 * 0.5,
                mid.y - spacing * d[1] as f64 * 0.5,
                mid.z - spacing * d[2] as f64 * 0.5,
            );
            Ok(GridSpec::new(origin, spacing, d)?)
        }
    }
}

fn grid_value(g: &GridSpec<f64>) -> Value {
    json!({ "dims": g.dims, "spacing": g.spacing, "origin": to_value(&g.origin) })
}

fn save(link: &Link64, out: Option<&Path>) -> Result<Value, CliError> {
    match out {
        Some(p) => {
            io::save_link(link, None, p)?;
            Ok(json!(p.display().to_string()))
        }
        None => Ok(serde_json::from_str(&io::to_json(link, None)).expect("knot files are json")),
    }
}

fn dispatch(c: &Command, link: &Link64, tol: &Tolerance64) -> Result<Outcome, CliError> {
    Ok(match c {
        Command::Validate { .. } => {
            let v = validate(link, tol);
            Outcome::ok(json!({ "valid": v.is_empty(), "violations": to_value(&v) }))
        }
        Command::Count { plane: p, .. } => {
            let pl = plane(*p)?;
            Outcome::ok(json!({ "plane": to_value(&pl), "count": to_value(&cut_count(link, &pl, tol)) }))
        }
        Command::Depth {
            point, samples, seed, ..
        } => match samples {
            Some(n) => {
                let q = min_cut_sampled(*point, link, *n, *seed, tol)?;
                let mut v = to_value(&q);
                v["depth"] = json!(q.depth());
                Outcome::seeded(v, *seed)
            }
            None => {
                let q = min_cut_exact(*point, link, tol)?;
                let mut v = to_value(&q);
                v["depth"] = json!(q.depth());
                Outcome::ok(v)
            }
        },
        Command::Hull {
            common, n, grid: g, budget, ..
        } => {
            let spec = grid(link, g.grid)?;
            let opts = ExtractOptions {
                budget: *budget,
                ..ExtractOptions::default()
            };
            let x = extract_hull(link, *n, spec, opts, tol)?;
            let stats = match &common.out {
                Some(p) => Some(io::export_mesh(&x.mesh, p)?),
                None => None,
            };
            let result = json!({
                "level": x.level,
                "grid": grid_value(&spec),
                "confirmed_cells": x.grid.confirmed(x.level).count(),
                "confirmed_including_subcells": x.confirmed_count(),
                "max_confirmed_depth": x.max_confirmed_depth(),
                "refined_cells": x.refined.len(),
                "quads": x.mesh.faces.len(),
                "mesh": stats.map(|s| json!({ "path": common.out.as_ref().map(|p| p.display().to_string()), "vertices": s.vertices, "faces": s.faces })),
                "exact_calls": x.exact_calls,
                "partial": x.partial,
                "method": "prefilter_then_exact",
            });
            Outcome {
                exit: if x.partial { 4 } else { 0 },
                ..Outcome::ok(result)
            }
        }
        Command::Hullnum { grid: g, .. } => {
            let spec = grid(link, g.grid)?;
            let h = hull_number(link, spec, tol)?;
            let mut v = to_value(&h);
            v["grid"] = grid_value(&spec);
            v["lower_bound"] = json!(true);
            Outcome::ok(v)
        }
        Command::Curvature { .. } => {
            let per: Vec<f64> = link.loops().iter().map(total_curvature).collect();
            Outcome::ok(json!({
                "total": link_total_curvature(link),
                "per_component": per,
                "over_two_pi": per.iter().map(|k| k / std::f64::consts::TAU).collect::<Vec<_>>(),
            }))
        }
        Command::Cone { point, .. } => {
            let a = cone_angle(*point, link, tol)?;
            let mut v = to_value(&a);
            v["over_two_pi"] = json!(a.angle / std::f64::consts::TAU);
            Outcome::ok(v)
        }
        Command::Crofton {
            point, samples, seed, ..
        } => {
            let e = crofton_estimate(*point, link, *samples, *seed, tol)?;
            Outcome::seeded(to_value(&e), *seed)
        }
        Command::Bridge { .. } => {
            let b = bridge_superbridge(link, tol).map_err(|e| CliError::Invalid(e.to_string()))?;
            Outcome::ok(to_value(&b))
        }
        Command::Quadrisecants { samples, .. } => {
            let r = quadrisecants(link, tol);
            let mut items = Vec::new();
            for q in &r.quadrisecants {
                let m = midsegment_depth_check(q, link, *samples, tol)?;
                items.push(json!({
                    "line": to_value(&q.line),
                    "hits": to_value(&q.hits),
                    "pattern": to_value(&q.pattern),
                    "collinearity_residual": q.collinearity_residual(),
                    "midsegment": { "passed": m.passed, "depths": m.samples.iter().map(|s| s.1).collect::<Vec<_>>() },
                }));
            }
            Outcome::ok(json!({
                "count": r.quadrisecants.len(),
                "alternating": r.quadrisecants.iter().filter(|q| q.alternating()).count(),
                "quadrisecants": items,
                "unstable": to_value(&r.unstable),
                "diagnostics": to_value(&r.diagnostics),
            }))
        }
        Command::Clip { common, plane: p } => {
            let h = Halfspace::new(plane(*p)?, Side::Below);
            let loops = link
                .loops()
                .iter()
                .map(|lp| clip_to_halfspace(lp, &h, tol))
                .collect::<Result<Vec<_>, _>>()?;
            let mut clipped = Link64::new(loops);
            if let Some(l) = link.labels() {
                clipped = clipped.with_labels(l.to_vec());
            }
            Outcome::ok(json!({
                "vertices_before": link.vertex_count(),
                "vertices_after": clipped.vertex_count(),
                "output": save(&clipped, common.out.as_deref())?,
            }))
        }
        Command::Chord { common, arc } => {
            let spec = ArcSpec {
                loop_index: arc.loop_index,
                start: LoopPoint {
                    edge: arc.start.0,
                    param: arc.start.1,
                },
                end: LoopPoint {
                    edge: arc.end.0,
                    param: arc.end.1,
                },
            };
            let out = replace_subarc_in(link, &spec, tol)?;
            Outcome::ok(json!({
                "vertices_before": link.vertex_count(),
                "vertices_after": out.vertex_count(),
                "output": save(&out, common.out.as_deref())?,
            }))
        }
        Command::Project { direction, point, .. } => {
            let pr = project(link, *direction, tol)?;
            let mut v = json!({
                "projection": to_value(&pr.projection),
                "flat": pr.flat,
                "link": to_value(&pr.link),
            });
            if let Some(p) = point {
                let q = min_cut_2d(pr.projection.map(*p), &pr.link, tol)?;
                let mut qv = to_value(&q);
                qv["depth"] = json!(q.depth());
                v["query"] = qv;
            }
            Outcome::ok(v)
        }
        Command::Check {
            suite,
            seed,
            trials,
            samples,
            grid,
            n,
            ..
        } => {
            let s: Suite = suite.parse().map_err(|e: hullkit::suites::UnknownSuite| CliError::Usage(e.to_string()))?;
            let opts = SuiteOptions {
                seed: *seed,
                grid_resolution: *grid,
                trials: *trials,
                samples: *samples,
                max_level: *n,
            };
            let r = run_suite(s, link, &opts)?;
            Outcome {
                exit: if r.passed() { 0 } else { 5 },
                ..Outcome::seeded(to_value(&r), *seed)
            }
        }
        Command::Report { grid: g, .. } => Outcome::ok(summary(link, g.grid, tol)?),
        Command::Fixture { .. } => unreachable!("handled before loading"),
    })
}

fn summary(link: &Link64, dims: GridDims, tol: &Tolerance64) -> Result<Value, CliError> {
    let violations = validate(link, tol);
    let bridge = bridge_superbridge(link, tol).map_err(|e| CliError::Invalid(e.to_string()))?;
    let spec = grid(link, dims)?;
    let h = hull_number(link, spec, tol)?;
    let secants = quadrisecants(link, tol);
    let centroid = link.centroid();
    let depth = match min_cut_exact(centroid, link, tol) {
        Ok(q) => json!(q.depth()),
        Err(hullkit::hull::HullError::DegenerateQuery { .. }) => Value::Null,
        Err(e) => return Err(e.into()),
    };
    let z_maxima = count_maxima(link, hullkit::Point64::new(0.0, 0.0, 1.0), tol);
    Ok(json!({
        "valid": violations.is_empty(),
        "components": link.loops().len(),
        "total_curvature": link_total_curvature(link),
        "bridge": bridge.bridge,
        "superbridge": bridge.superbridge,
        "maxima_along_z": z_maxima,
        "hull_number_lower_bound": h.value,
        "hull_number_witness": to_value(&h.witness),
        "grid": grid_value(&spec),
        "quadrisecants": secants.quadrisecants.len(),
        "alternating_quadrisecants": secants.quadrisecants.iter().filter(|q| q.alternating()).count(),
        "centroid": to_value(&centroid),
        "centroid_depth": depth,
    }))
}

fn fixture(name: FixtureName, n: usize, seed: u64, separation: f64, out: Option<&Path>) -> Result<i32, CliError> {
    let f: Fixture<f64> = match name {
        FixtureName::Circle => fixtures::circle_seeded(n, seed),
        FixtureName::Trefoil => fixtures::trefoil_seeded(n, seed),
        FixtureName::Hopf => fixtures::hopf_seeded(n, seed),
        FixtureName::Unlink => fixtures::two_circle_unlink_seeded(n, seed),
        FixtureName::Composite => fixtures::composite_trefoils_seeded(n, separation, seed),
    }
    .map_err(|e| CliError::Usage(e.to_string()))?;
    let meta = KnotMeta::from(&f.meta);
    match out {
        Some(p) => {
            io::save_link(&f.link, Some(meta), p)?;
            let outcome = Outcome::seeded(
                json!({ "fixture": to_value(&f.meta), "path": p.display().to_string(), "vertices": f.link.vertex_count() }),
                seed,
            );
            print!("{}", render(&envelope("fixture", None, &outcome, None), crate::args::Format::Json));
        }
        None => println!("{}", io::to_json(&f.link, Some(meta))),
    }
    Ok(0)
}
