//! Named, seeded property checks run against one link.
//!
//! Every suite is deterministic given the link and [`SuiteOptions`]. Each
//! counts the individual checks it performed, counts the draws it skipped
//! (query points landing on the curve, for instance), and keeps the first
//! few failures as readable strings.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curvature::{self, CurvatureError};
use crate::cut::cut_count;
use crate::geometry::{affine_apply, AffineMap, Plane, Point3, PolyLink, Tolerance};
use crate::hull::{self, extract_hull, ExtractError, ExtractOptions, GridSpec, HullError};
use crate::projection::{self, LemmaOutcome, ProjectionError, SampleSource};
use crate::sampling::{self, derive_seed, SeededRng};
use crate::surgery::{replace_subarc_in, ArcSpec, LoopPoint};

const MAX_EXAMPLES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    /// Chord replacement never raises a plane's cut count.
    LemmaCut,
    /// Chord replacement never raises a point's minimal cut count.
    LemmaDepth,
    /// Confirmed voxel sets nest across levels, and midpoints of pairs in a
    /// component stay inside.
    Nesting,
    /// Points of depth `n` see the link under a cone angle of at least `2πn`.
    ConeAngle,
    /// The Crofton estimate of the cone angle matches the exact value.
    Crofton,
    /// The cone angle never exceeds total curvature.
    GaussBonnet,
    /// The exact oracle never exceeds the random-plane minimum, and its
    /// witness plane realizes the count.
    Oracle,
    /// Hull depth is unchanged by invertible affine maps.
    Affine,
    /// Depth in space is at most the planar depth of the projection.
    Projection,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::LemmaCut,
        Suite::LemmaDepth,
        Suite::Nesting,
        Suite::ConeAngle,
        Suite::Crofton,
        Suite::GaussBonnet,
        Suite::Oracle,
        Suite::Affine,
        Suite::Projection,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::LemmaCut => "lemma-cut",
            Suite::LemmaDepth => "lemma-depth",
            Suite::Nesting => "nesting",
            Suite::ConeAngle => "cone-angle",
            Suite::Crofton => "crofton",
            Suite::GaussBonnet => "gauss-bonnet",
            Suite::Oracle => "oracle",
            Suite::Affine => "affine",
            Suite::Projection => "projection",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown suite {0:?}")]
pub struct UnknownSuite(pub String);

impl FromStr for Suite {
    type Err = UnknownSuite;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| UnknownSuite(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SuiteError {
    #[error("link has no vertices")]
    EmptyLink,
    #[error(transparent)]
    Hull(#[from] HullError),
    #[error(transparent)]
    Extract(#[from] ExtractError),
    #[error(transparent)]
    Curvature(#[from] CurvatureError),
    #[error(transparent)]
    Projection(#[from] ProjectionError),
    #[error("could not draw a valid chord replacement")]
    NoArc,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Cells along the longest side for suites that voxelize.
    pub grid_resolution: usize,
    /// Overrides the suite's main trial count (arcs, points, apexes or maps).
    pub trials: Option<usize>,
    /// Overrides the suite's inner sample count (planes, points, or
    /// Monte Carlo samples).
    pub samples: Option<usize>,
    /// Highest level for level-dependent suites.
    pub max_level: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            seed: crate::fixtures::DEFAULT_SEED,
            grid_resolution: 16,
            trials: None,
            samples: None,
            max_level: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub outcome: LemmaOutcome,
    pub checks: usize,
    pub skipped: usize,
    pub failures: usize,
    pub parameters: BTreeMap<String, u64>,
    pub examples: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.outcome != LemmaOutcome::Fail
    }
}

#[derive(Default)]
struct Tally {
    checks: usize,
    skipped: usize,
    failures: usize,
    examples: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
            if self.examples.len() < MAX_EXAMPLES {
                self.examples.push(what());
            }
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.checks += other.checks;
        self.skipped += other.skipped;
        self.failures += other.failures;
        for e in other.examples {
            if self.examples.len() < MAX_EXAMPLES {
                self.examples.push(e);
            }
        }
        self
    }

    fn finish(self, suite: Suite, seed: u64, parameters: &[(&str, u64)]) -> SuiteReport {
        let outcome = if self.failures > 0 {
            LemmaOutcome::Fail
        } else if self.checks == 0 {
            LemmaOutcome::VacuousPass
        } else {
            LemmaOutcome::Pass
        };
        SuiteReport {
            suite,
            seed,
            outcome,
            checks: self.checks,
            skipped: self.skipped,
            failures: self.failures,
            parameters: parameters.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            examples: self.examples,
        }
    }
}

fn fmt_point(p: Point3<f64>) -> String {
    format!("({:.6}, {:.6}, {:.6})", p.x, p.y, p.z)
}

/// Uniform point in the bounding box grown by 10% on each side.
fn box_sample(link: &PolyLink<f64>, rng: &mut SeededRng) -> Point3<f64> {
    let (lo, hi) = link.bounding_box().expect("nonempty link");
    let pad = (hi - lo) * 0.1;
    sampling::box_point(rng, lo - pad, hi + pad)
}

fn random_plane(link: &PolyLink<f64>, rng: &mut SeededRng) -> Plane<f64> {
    let p = box_sample(link, rng);
    Plane::through(p, sampling::unit_vector(rng)).expect("unit normal")
}

/// A random proper subarc and the link with it replaced by its chord.
fn random_chord(
    link: &PolyLink<f64>,
    rng: &mut SeededRng,
    tol: &Tolerance<f64>,
) -> Result<(ArcSpec<f64>, PolyLink<f64>), SuiteError> {
    for _ in 0..100 {
        let loop_index = rng.random_range(0..link.loops().len());
        let n = link.loops()[loop_index].len();
        let start = rng.random_range(0..n);
        let span = rng.random_range(1..n - 1);
        let arc = ArcSpec {
            loop_index,
            start: LoopPoint {
                edge: start,
                param: rng.random::<f64>(),
            },
            end: LoopPoint {
                edge: (start + span) % n,
                param: rng.random::<f64>(),
            },
        };
        if let Ok(out) = replace_subarc_in(link, &arc, tol) {
            return Ok((arc, out));
        }
    }
    Err(SuiteError::NoArc)
}

fn arc_label(a: &ArcSpec<f64>) -> String {
    format!(
        "loop {} from edge {}@{:.4} to edge {}@{:.4}",
        a.loop_index, a.start.edge, a.start.param, a.end.edge, a.end.param
    )
}

/// Runs one suite.
pub fn run_suite(suite: Suite, link: &PolyLink<f64>, opts: &SuiteOptions) -> Result<SuiteReport, SuiteError> {
    if link.vertex_count() == 0 {
        return Err(SuiteError::EmptyLink);
    }
    let tol = Tolerance::for_link(link);
    match suite {
        Suite::LemmaCut => lemma_cut(link, opts, &tol),
        Suite::LemmaDepth => lemma_depth(link, opts, &tol),
        Suite::Nesting => nesting(link, opts, &tol),
        Suite::ConeAngle => cone_bound(link, opts, &tol),
        Suite::Crofton => crofton(link, opts, &tol),
        Suite::GaussBonnet => gauss_bonnet(link, opts, &tol),
        Suite::Oracle => oracle(link, opts, &tol),
        Suite::Affine => affine(link, opts, &tol),
        Suite::Projection => projection(link, opts, &tol),
    }
}

fn lemma_cut(link: &PolyLink<f64>, opts: &SuiteOptions, tol: &Tolerance<f64>) -> Result<SuiteReport, SuiteError> {
    let arcs = opts.trials.unwrap_or(200);
    let planes = opts.samples.unwrap_or(1000);
    let tally = (0..arcs)
        .into_par_iter()
        .map(|i| -> Result<Tally, SuiteError> {
            let mut rng = sampling::rng(derive_seed(opts.seed, i as u64));
            let (arc, chorded) = random_chord(link, &mut rng, tol)?;
            let mut t = Tally::default();
            for _ in 0..planes {
                let plane = random_plane(link, &mut rng);
                let before = cut_count(link, &plane, tol).total;
                let after = cut_count(&chorded, &plane, tol).total;
                t.check(after <= before, || {
                    format!("{}: plane {:?} cut {before} -> {after}", arc_label(&arc), plane)
                });
            }
            Ok(t)
        })
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;
    Ok(tally.finish(Suite::LemmaCut, opts.seed, &[("arcs", arcs as u64), ("planes", planes as u64)]))
}

fn lemma_depth(link: &PolyLink<f64>, opts: &SuiteOptions, tol: &Tolerance<f64>) -> Result<SuiteReport, SuiteError> {
    let arcs = opts.trials.unwrap_or(10);
    let points = opts.samples.unwrap_or(50);
    let tally = (0..arcs)
        .into_par_iter()
        .map(|i| -> Result<Tally, SuiteError> {
            let mut rng = sampling::rng(derive_seed(opts.seed, i as u64));
            let (arc, chorded) = random_chord(link, &mut rng, tol)?;
            let mut t = Tally::default();
            for _ in 0..points {
                let p = box_sample(link, &mut rng);
                let (before, after) = match (
                    hull::min_cut_exact(p, link, tol),
                    hull::min_cut_exact(p, &chorded, tol),
                ) {
                    (Ok(a), Ok(b)) => (a.min_count, b.min_count),
                    (Err(HullError::DegenerateQuery { .. }), _) | (_, Err(HullError::DegenerateQuery { .. })) => {
                        t.skipped += 1;
                        continue;
                    }
                    (Err(e), _) | (_, Err(e)) => return Err(e.into()),
                };
                t.check(after <= before, || {
                    format!("{}: min cut at {} went {before} -> {after}", arc_label(&arc), fmt_point(p))
                });
            }
            Ok(t)
        })
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;
    Ok(tally.finish(Suite::LemmaDepth, opts.seed, &[("arcs", arcs as u64), ("points", points as u64)]))
}

fn nesting(link: &PolyLink<f64>, opts: &SuiteOptions, tol: &Tolerance<f64>) -> Result<SuiteReport, SuiteError> {
    let pairs = opts.samples.unwrap_or(500);
    let grid = GridSpec::covering(link, opts.grid_resolution).map_err(ExtractError::from)?;
    let eo = ExtractOptions {
        refine: false,
        ..Default::default()
    };
    let levels: Vec<_> = (1..=opts.max_level.max(1))
        .map(|n| extract_hull(link, n, grid, eo, tol))
        .collect::<Result<_, _>>()?;
    let mut t = Tally::default();
    for w in levels.windows(2) {
        let (lower, upper) = (&w[0], &w[1]);
        for i in upper.grid.confirmed(upper.level) {
            t.check(lower.grid.is_selected(i, lower.level), || {
                format!("cell {:?} in level {} but not {}", grid.coords(i), upper.level, lower.level)
            });
        }
    }
    let mut component_count = 0u64;
    for (li, h) in levels.iter().enumerate() {
        let n = h.level;
        for (ci, comp) in h.grid.components(n).into_iter().enumerate() {
            component_count += 1;
            if comp.len() < 2 {
                continue;
            }
            let mut rng = sampling::rng(derive_seed(opts.seed, ((li as u64) << 32) | ci as u64));
            let mids: Vec<Point3<f64>> = (0..pairs)
                .map(|_| {
                    let ia = rng.random_range(0..comp.len());
                    let mut ib = rng.random_range(0..comp.len() - 1);
                    if ib >= ia {
                        ib += 1;
                    }
                    grid.center(grid.coords(comp[ia])).midpoint(grid.center(grid.coords(comp[ib])))
                })
                .collect();
            let results: Vec<Result<usize, HullError>> = mids.par_iter().map(|&m| hull::hull_depth(m, link, tol)).collect();
            for (m, r) in mids.iter().zip(results) {
                match r {
                    Ok(d) => t.check(d >= n, || format!("midpoint {} has depth {d} < {n}", fmt_point(*m))),
                    Err(HullError::DegenerateQuery { .. }) => t.skipped += 1,
                    Err(e) => return Err(e.into()),
                }
            }
        }
    }
    Ok(t.finish(
        Suite::Nesting,
        opts.seed,
        &[
            ("grid", opts.grid_resolution as u64),
            ("levels", levels.len() as u64),
            ("components", component_count),
            ("pairs_per_component", pairs as u64),
        ],
    ))
}

fn cone_bound(link: &PolyLink<f64>, opts: &SuiteOptions, tol: &Tolerance<f64>) -> Result<SuiteReport, SuiteError> {
    let k = opts.trials.unwrap_or(50);
    let n = opts.max_level.max(1);
    let grid = GridSpec::covering(link, opts.grid_resolution).map_err(ExtractError::from)?;
    let h = extract_hull(
        link,
        n,
        grid,
        ExtractOptions {
            refine: false,
            ..Default::default()
        },
        tol,
    )?;
    let mut cells: Vec<usize> = h.grid.confirmed(n).collect();
    if cells.len() > k {
        let mut rng = sampling::rng(opts.seed);
        let mut idx = rand::seq::index::sample(&mut rng, cells.len(), k).into_vec();
        idx.sort_unstable();
        cells = idx.into_iter().map(|i| cells[i]).collect();
    }
    let mut t = Tally::default();
    for i in cells {
        let p = grid.center(grid.coords(i));
        let depth = h.grid.depth[i];
        let a = curvature::cone_angle(p, link, tol)?.angle;
        let bound = TAU * depth as f64;
        t.check(a >= bound - 1e-6, || format!("cone angle {a} at {} below 2π·{depth}", fmt_point(p)));
    }
    Ok(t.finish(
        Suite::ConeAngle,
        opts.seed,
        &[("grid", opts.grid_resolution as u64), ("level", n as u64), ("points", k as u64)],
    ))
}

fn off_curve_points(link: &PolyLink<f64>, k: usize, seed: u64, tol: &Tolerance<f64>) -> (Vec<Point3<f64>>, usize) {
    let mut rng = sampling::rng(seed);
    let mut out = Vec::with_capacity(k);
    let mut skipped = 0;
    let margin = tol.eps_abs() * 1e3;
    while out.len() < k {
        let p = box_sample(link, &mut rng);
        if link.distance_to(p) > margin {
            out.push(p);
        } else {
            skipped += 1;
        }
    }
    (out, skipped)
}

fn crofton(link: &PolyLink<f64>, opts: &SuiteOptions, tol: &Tolerance<f64>) -> Result<SuiteReport, SuiteError> {
    let apexes = opts.trials.unwrap_or(5);
    let samples = opts.samples.unwrap_or(100_000);
    let (pts, skipped) = off_curve_points(link, apexes, opts.seed, tol);
    let mut t = Tally {
        skipped,
        ..Default::default()
    };
    for (i, &p) in pts.iter().enumerate() {
        let exact = curvature::cone_angle(p, link, tol)?.angle;
        let est = curvature::crofton_estimate(p, link, samples, derive_seed(opts.seed, i as u64), tol)?.estimate;
        let rel = (est - exact).abs() / exact.max(f64::MIN_POSITIVE);
        t.check(rel <= 0.02, || {
            format!("apex {}: estimate {est} vs cone angle {exact}", fmt_point(p))
        });
    }
    Ok(t.finish(
        Suite::Crofton,
        opts.seed,
        &[("apexes", apexes as u64), ("samples", samples as u64)],
    ))
}

fn gauss_bonnet(link: &PolyLink<f64>, opts: &SuiteOptions, tol: &Tolerance<f64>) -> Result<SuiteReport, SuiteError> {
    let apexes = opts.trials.unwrap_or(100);
    let total = curvature::link_total_curvature(link);
    let (pts, skipped) = off_curve_points(link, apexes, opts.seed, tol);
    let mut t = Tally {
        skipped,
        ..Default::default()
    };
    for p in pts {
        let a = curvature::cone_angle(p, link, tol)?.angle;
        t.check(total - a >= -1e-9, || {
            format!("cone angle {a} at {} exceeds total curvature {total}", fmt_point(p))
        });
    }
    Ok(t.finish(Suite::GaussBonnet, opts.seed, &[("apexes", apexes as u64)]))
}

fn oracle(link: &PolyLink<f64>, opts: &SuiteOptions, tol: &Tolerance<f64>) -> Result<SuiteReport, SuiteError> {
    let points = opts.trials.unwrap_or(50);
    let samples = opts.samples.unwrap_or(100_000);
    let (pts, skipped) = off_curve_points(link, points, opts.seed, tol);
    let rows = pts
        .par_iter()
        .enumerate()
        .map(|(i, &p)| -> Result<_, HullError> {
            let exact = hull::min_cut_exact(p, link, tol)?;
            let sampled = hull::min_cut_sampled(p, link, samples, derive_seed(opts.seed, i as u64), tol)?;
            let witnessed = cut_count(link, &exact.witness, tol).total;
            Ok((p, exact.min_count, sampled.min_count, witnessed))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut t = Tally {
        skipped,
        ..Default::default()
    };
    let mut equal = 0u64;
    for (p, e, s, w) in rows {
        equal += u64::from(e == s);
        t.check(e <= s, || format!("exact {e} above sampled {s} at {}", fmt_point(p)));
        t.check(w == e, || format!("witness at {} cuts {w} times, reported {e}", fmt_point(p)));
    }
    Ok(t.finish(
        Suite::Oracle,
        opts.seed,
        &[("points", points as u64), ("samples", samples as u64), ("agreements", equal)],
    ))
}

/// A random invertible map with singular values kept away from zero.
pub fn random_affine(rng: &mut SeededRng) -> AffineMap<f64> {
    loop {
        let mut m = [[0.0f64; 3]; 3];
        for row in &mut m {
            for x in row.iter_mut() {
                *x = rng.random_range(-1.0..1.0);
            }
        }
        let t = Point3::new(
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
        );
        let Ok(a) = AffineMap::new(m, t) else { continue };
        // |det| / (largest row norm)^3 bounds conditioning from below
        let big = m
            .iter()
            .map(|r| (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt())
            .fold(0.0, f64::max);
        if a.determinant().abs() >= 0.2 * big.powi(3) {
            return a;
        }
    }
}

fn affine(link: &PolyLink<f64>, opts: &SuiteOptions, tol: &Tolerance<f64>) -> Result<SuiteReport, SuiteError> {
    let maps = opts.trials.unwrap_or(10);
    let points = opts.samples.unwrap_or(20);
    let (pts, skipped) = off_curve_points(link, points, opts.seed, tol);
    let base = pts
        .par_iter()
        .map(|&p| hull::hull_depth(p, link, tol))
        .collect::<Result<Vec<_>, _>>()?;
    let mut rng = sampling::rng(derive_seed(opts.seed, u64::MAX));
    let mut t = Tally {
        skipped,
        ..Default::default()
    };
    for mi in 0..maps {
        let a = random_affine(&mut rng);
        let image = affine_apply(&a, link);
        let itol = Tolerance::for_link(&image);
        let mapped = pts
            .par_iter()
            .map(|&p| hull::hull_depth(a.apply(p), &image, &itol))
            .collect::<Result<Vec<_>, _>>()?;
        for ((p, d0), d1) in pts.iter().zip(&base).zip(mapped) {
            t.check(*d0 == d1, || format!("map {mi}: depth at {} went {d0} -> {d1}", fmt_point(*p)));
        }
    }
    Ok(t.finish(Suite::Affine, opts.seed, &[("maps", maps as u64), ("points", points as u64)]))
}

fn projection(link: &PolyLink<f64>, opts: &SuiteOptions, tol: &Tolerance<f64>) -> Result<SuiteReport, SuiteError> {
    let directions = opts.trials.unwrap_or(5);
    let samples = opts.samples.unwrap_or(50);
    let mut rng = sampling::rng(opts.seed);
    let mut t = Tally::default();
    for di in 0..directions {
        let d: Point3<f64> = sampling::unit_vector(&mut rng);
        for n in 1..=opts.max_level.max(1) {
            let source = SampleSource {
                grid_resolution: opts.grid_resolution,
                seed: derive_seed(opts.seed, (di * 16 + n) as u64),
            };
            let c = projection::projection_lemma_check(link, d, n, samples, source, tol)?;
            t.checks += c.checked;
            t.failures += c.failures.len();
            for p in c.failures.iter().take(MAX_EXAMPLES.saturating_sub(t.examples.len())) {
                t.examples.push(format!(
                    "direction {}: {} in h_{n} projects below planar depth {n}",
                    fmt_point(d),
                    fmt_point(*p)
                ));
            }
        }
    }
    Ok(t.finish(
        Suite::Projection,
        opts.seed,
        &[
            ("directions", directions as u64),
            ("samples", samples as u64),
            ("grid", opts.grid_resolution as u64),
        ],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
            let j = serde_json::to_string(&s).unwrap();
            assert_eq!(j, format!("\"{}\"", s.name()));
        }
        assert!("lemma".parse::<Suite>().is_err());
    }

    #[test]
    fn small_suites_pass_on_trefoil() {
        let k = fixtures::trefoil::<f64>(32).unwrap().link;
        let opts = SuiteOptions {
            trials: Some(5),
            samples: Some(20),
            seed: 7,
            ..Default::default()
        };
        for s in [Suite::LemmaCut, Suite::LemmaDepth, Suite::GaussBonnet, Suite::Oracle, Suite::Affine] {
            let r = run_suite(s, &k, &opts).unwrap();
            assert_eq!(r.outcome, LemmaOutcome::Pass, "{s}: {:?}", r.examples);
            assert!(r.checks > 0);
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let k = fixtures::trefoil::<f64>(32).unwrap().link;
        let opts = SuiteOptions {
            trials: Some(3),
            samples: Some(50),
            ..Default::default()
        };
        let a = run_suite(Suite::LemmaCut, &k, &opts).unwrap();
        let b = run_suite(Suite::LemmaCut, &k, &opts).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn cone_angle_on_circle_is_vacuous_at_level_two() {
        let c = fixtures::circle::<f64>(32).unwrap().link;
        let r = run_suite(Suite::ConeAngle, &c, &SuiteOptions::default()).unwrap();
        assert_eq!(r.outcome, LemmaOutcome::VacuousPass);
    }
}
