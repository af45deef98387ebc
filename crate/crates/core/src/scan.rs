//! Grid scans over the four-qubit DS simplex.
//!
//! Two families of planar cuts: fixed `s = p_0 + p_4` (with `p_0` swept as
//! an outer axis), and fixed `(p_0, p_4)`. Points are evaluated in parallel
//! and returned in grid order.

use std::fmt;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::bell::{
    classify_nonlocal_with, mixed_magnitude_condition, optimize_angles, DeviceAngles, Objective,
    DEFAULT_BELL_TOL,
};
use crate::ds_state::make_ds;
use crate::error::{Error, Result};
use crate::optimize::AngleSearch;
use crate::separability::{
    classify_with, n4_inequalities, pt_spectrum, ClassifyOptions, Convention, Verdict,
};

/// Weights on the boundary of the simplex within this of 1 are accepted.
const SUM_SLACK: f64 = 1e-12;

const BISECTION_STEPS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig {
    pub classify: ClassifyOptions,
    pub bell_tol: f64,
    pub search: AngleSearch,
    /// Thread count; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            classify: ClassifyOptions::default(),
            bell_tol: DEFAULT_BELL_TOL,
            search: AngleSearch::default(),
            workers: None,
        }
    }
}

/// Everything known about one grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRecord {
    pub p: [f64; 5],
    pub verdict: Verdict,
    pub ppt1: bool,
    pub ppt2: bool,
    /// `E1, E2, E3, F2` as printed.
    #[serde(rename = "E")]
    pub e: [f64; 4],
    /// `432 · det M_0(q)`.
    pub det_m0: f64,
    /// Smallest eigenvalue of the partial transpose across `1|3` and `2|2`.
    pub pt_min: [f64; 2],
    pub q_min: f64,
    pub k_ref: usize,
    pub theta: f64,
    pub phi: f64,
    pub nonlocal: bool,
    pub peres: bool,
    pub tri_rank: [usize; 3],
}

#[derive(Serialize)]
struct CsvRow {
    p0: f64,
    p1: f64,
    p2: f64,
    p3: f64,
    p4: f64,
    verdict: Verdict,
    ppt1: bool,
    ppt2: bool,
    #[serde(rename = "E1")]
    e1: f64,
    #[serde(rename = "E2")]
    e2: f64,
    #[serde(rename = "E3")]
    e3: f64,
    #[serde(rename = "F2")]
    f2: f64,
    q_min: f64,
    nonlocal: bool,
    peres: bool,
    r0: usize,
    r1: usize,
    r2: usize,
}

impl From<&ScanRecord> for CsvRow {
    fn from(r: &ScanRecord) -> Self {
        CsvRow {
            p0: r.p[0],
            p1: r.p[1],
            p2: r.p[2],
            p3: r.p[3],
            p4: r.p[4],
            verdict: r.verdict,
            ppt1: r.ppt1,
            ppt2: r.ppt2,
            e1: r.e[0],
            e2: r.e[1],
            e3: r.e[2],
            f2: r.e[3],
            q_min: r.q_min,
            nonlocal: r.nonlocal,
            peres: r.peres,
            r0: r.tri_rank[0],
            r1: r.tri_rank[1],
            r2: r.tri_rank[2],
        }
    }
}

pub fn evaluate_point(p: [f64; 5], cfg: &ScanConfig) -> Result<ScanRecord> {
    let s = make_ds(4, &p)?;
    let report = classify_with(&s, &cfg.classify)?;
    let ineq = n4_inequalities(&s)?;
    let conv = cfg.classify.convention;
    let min_of = |t| -> Result<f64> { Ok(pt_spectrum(&s, t, conv)?[0]) };
    let bell = classify_nonlocal_with(&s, cfg.bell_tol, &cfg.search)?;
    let ppt1 = report.ppt_by_partition[&1];
    let (r0, r1, r2) = report.tri_rank;
    Ok(ScanRecord {
        p: [s.p()[0], s.p()[1], s.p()[2], s.p()[3], s.p()[4]],
        verdict: report.verdict,
        ppt1,
        ppt2: report.ppt_by_partition[&2],
        e: [ineq.e1, ineq.e2, ineq.e3, ineq.f2],
        det_m0: ineq.det_m0,
        pt_min: [min_of(1)?, min_of(2)?],
        q_min: bell.q_value,
        k_ref: bell.params.k_ref,
        theta: bell.angles.theta(),
        phi: bell.angles.phi(),
        nonlocal: bell.violated,
        peres: ppt1 && bell.violated,
        tri_rank: [r0, r1, r2],
    })
}

/// A planar cut of the simplex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    /// `p_0 + p_4 = s`; `p_0 = s·i/res` for `i = 0..=res`, and `(p_1, p_2,
    /// p_3)` on the barycentric lattice of the remaining mass.
    Slice { s: f64, res: usize },
    /// Fixed `p_0, p_4`; barycentric lattice over `(p_1, p_2, p_3)`.
    Simplex { p0: f64, p4: f64, res: usize },
}

fn barycentric(mass: f64, res: usize, mut push: impl FnMut(f64, f64, f64)) {
    let r = res as f64;
    for i in 0..=res {
        for j in 0..=res - i {
            let k = res - i - j;
            push(
                mass * i as f64 / r,
                mass * j as f64 / r,
                mass * k as f64 / r,
            );
        }
    }
}

impl Region {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Region::Slice { s, res } => {
                if !(s > 0.0 && s < 1.0) {
                    return Err(Error::OutOfRange {
                        what: "slice mass",
                        detail: format!("s = {s} must lie in (0, 1)"),
                    });
                }
                if res < 8 {
                    return Err(Error::OutOfRange {
                        what: "resolution",
                        detail: format!("{res} < 8"),
                    });
                }
            }
            Region::Simplex { p0, p4, res } => {
                if !(p0 >= 0.0 && p4 >= 0.0 && p0.is_finite() && p4.is_finite()) {
                    return Err(Error::OutOfRange {
                        what: "fixed weights",
                        detail: format!("p0 = {p0}, p4 = {p4} must be non-negative"),
                    });
                }
                if p0 + p4 > 1.0 + SUM_SLACK {
                    return Err(Error::OutOfRange {
                        what: "fixed weights",
                        detail: format!("p0 + p4 = {} exceeds 1", p0 + p4),
                    });
                }
                if res == 0 {
                    return Err(Error::OutOfRange {
                        what: "resolution",
                        detail: "must be positive".into(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Grid points in output order.
    pub fn points(&self) -> Result<Vec<[f64; 5]>> {
        self.validate()?;
        let mut out = Vec::new();
        match *self {
            Region::Slice { s, res } => {
                for i in 0..=res {
                    let p0 = s * i as f64 / res as f64;
                    let p4 = s - p0;
                    barycentric(1.0 - s, res, |a, b, c| out.push([p0, a, b, c, p4]));
                }
            }
            Region::Simplex { p0, p4, res } => {
                let mass = 1.0 - p0 - p4;
                if mass <= SUM_SLACK {
                    out.push([p0, 0.0, 0.0, 0.0, p4]);
                } else {
                    barycentric(mass, res, |a, b, c| out.push([p0, a, b, c, p4]));
                }
            }
        }
        Ok(out)
    }
}

fn in_pool<T: Send>(workers: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(job()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::InvalidParams(format!("thread pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

pub fn scan(region: &Region, cfg: &ScanConfig) -> Result<Vec<ScanRecord>> {
    let points = region.points()?;
    in_pool(cfg.workers, || {
        points
            .par_iter()
            .map(|&p| evaluate_point(p, cfg))
            .collect::<Result<Vec<_>>>()
    })?
}

pub fn slice_scan(s: f64, res: usize, cfg: &ScanConfig) -> Result<Vec<ScanRecord>> {
    scan(&Region::Slice { s, res }, cfg)
}

pub fn simplex_scan(p0: f64, p4: f64, res: usize, cfg: &ScanConfig) -> Result<Vec<ScanRecord>> {
    scan(&Region::Simplex { p0, p4, res }, cfg)
}

/// Named search targets for [`find_witness`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Target {
    /// PPT across 1|3 and Bell-violating.
    Peres,
    Separable,
    Entangled,
    Nonlocal,
    /// PPT across 1|3 but not across 2|2.
    PptOneCutOnly,
}

impl Target {
    pub fn holds(self, r: &ScanRecord) -> bool {
        match self {
            Target::Peres => r.peres,
            Target::Separable => r.verdict == Verdict::Separable,
            Target::Entangled => r.verdict == Verdict::Entangled,
            Target::Nonlocal => r.nonlocal,
            Target::PptOneCutOnly => r.ppt1 && !r.ppt2,
        }
    }

    /// Positive and growing the more robustly the target holds.
    pub fn margin(self, r: &ScanRecord) -> f64 {
        match self {
            Target::Peres => r.pt_min[0].min(-r.q_min),
            Target::Separable => r.pt_min[1],
            Target::Entangled => -r.pt_min[1],
            Target::Nonlocal => -r.q_min,
            Target::PptOneCutOnly => r.pt_min[0].min(-r.pt_min[1]),
        }
    }
}

/// First grid point satisfying `holds`, then moved by bisection towards the
/// satisfying point of largest `margin` until the margin reaches ten times
/// the working tolerance.
pub fn find_witness(
    region: &Region,
    cfg: &ScanConfig,
    holds: impl Fn(&ScanRecord) -> bool,
    margin: impl Fn(&ScanRecord) -> f64,
) -> Result<ScanRecord> {
    let records = scan(region, cfg)?;
    let first = records.iter().find(|r| holds(r)).ok_or_else(|| {
        Error::NotFound(format!(
            "no grid point of {region:?} satisfies the predicate"
        ))
    })?;
    let goal = 10.0 * cfg.classify.psd_tol.max(cfg.bell_tol);
    if margin(first) >= goal {
        return Ok(first.clone());
    }
    let best = records.iter().filter(|r| holds(r)).fold(first, |acc, r| {
        if margin(r) > margin(acc) {
            r
        } else {
            acc
        }
    });
    if margin(best) < goal {
        return Ok(best.clone());
    }
    let along = |lam: f64| {
        let mut p = [0.0; 5];
        for (i, v) in p.iter_mut().enumerate() {
            *v = (1.0 - lam) * first.p[i] + lam * best.p[i];
        }
        p
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut found = best.clone();
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        let r = evaluate_point(along(mid), cfg)?;
        if holds(&r) && margin(&r) >= goal {
            hi = mid;
            found = r;
        } else {
            lo = mid;
        }
    }
    Ok(found)
}

pub fn find_target(region: &Region, cfg: &ScanConfig, target: Target) -> Result<ScanRecord> {
    find_witness(region, cfg, |r| target.holds(r), |r| target.margin(r))
}

/// Sizes of the overlapping classes drawn in the phase diagrams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct StrataCounts {
    pub total: usize,
    pub trivially_separable: usize,
    pub separable: usize,
    pub ppt1_not_ppt2: usize,
    pub npt_local: usize,
    pub npt_nonlocal: usize,
    pub ppt1_nonlocal: usize,
    /// Must stay zero: a separable state cannot violate a Bell inequality.
    pub separable_nonlocal: usize,
    /// Must stay zero: PPT across the balanced cut implies PPT across 1|3.
    pub ppt2_not_ppt1: usize,
}

impl StrataCounts {
    pub fn of(records: &[ScanRecord]) -> Self {
        let mut c = StrataCounts::default();
        for r in records {
            c.total += 1;
            match r.verdict {
                Verdict::TriviallySeparable => c.trivially_separable += 1,
                Verdict::Separable => c.separable += 1,
                Verdict::Entangled if r.nonlocal => c.npt_nonlocal += 1,
                Verdict::Entangled => c.npt_local += 1,
            }
            c.ppt1_not_ppt2 += usize::from(r.ppt1 && !r.ppt2);
            c.ppt1_nonlocal += usize::from(r.ppt1 && r.nonlocal);
            c.separable_nonlocal += usize::from(r.verdict.is_separable() && r.nonlocal);
            c.ppt2_not_ppt1 += usize::from(r.ppt2 && !r.ppt1);
        }
        c
    }

    pub fn separable_fraction(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            (self.separable + self.trivially_separable) as f64 / self.total as f64
        }
    }
}

/// How well the printed polynomial boundaries reproduce the balanced-cut
/// PPT flag on the full-rank records of a scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct FrontierAgreement {
    pub compared: usize,
    /// `min(E1, E2, E3, F2) >= 0` agrees with `ppt2`.
    pub printed_f2: usize,
    /// Same with `432 · det M_0(q)` in place of `F2`.
    pub hankel_det: usize,
}

impl FrontierAgreement {
    pub fn of(records: &[ScanRecord], tol: f64) -> Self {
        let mut f = FrontierAgreement::default();
        for r in records.iter().filter(|r| r.p.iter().all(|&x| x > 0.0)) {
            let minors = r.e[0].min(r.e[1]).min(r.e[2]);
            f.compared += 1;
            f.printed_f2 += usize::from((minors.min(r.e[3]) >= -tol) == r.ppt2);
            f.hankel_det += usize::from((minors.min(r.det_m0) >= -tol) == r.ppt2);
        }
        f
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Gnuplot,
}

pub fn to_csv(records: &[ScanRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(CsvRow::from(r))
            .map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    if records.is_empty() {
        return Ok(
            "p0,p1,p2,p3,p4,verdict,ppt1,ppt2,E1,E2,E3,F2,q_min,nonlocal,peres,r0,r1,r2\n".into(),
        );
    }
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

pub fn to_json(records: &[ScanRecord]) -> String {
    serde_json::to_string_pretty(records).expect("records serialize")
}

/// Gnuplot script reading `csv_name`. A scan at fixed `(p_0, p_4)` is drawn
/// as a triangle with corners `p_1, p_2, p_3`; anything else as a 3D point
/// cloud of the separable points in `(p_1, p_2, p_3)`, or with
/// `-e "view='slices'"` as four panels of constant `p_0`.
pub fn plot_script(records: &[ScanRecord], csv_name: &str) -> String {
    let fixed_ends = records
        .windows(2)
        .all(|w| w[0].p[0] == w[1].p[0] && w[0].p[4] == w[1].p[4]);
    let head = format!(
        "set datafile separator ','\nset key outside\nset size ratio -1\ndata = '{csv_name}'\n"
    );
    if fixed_ends {
        head + "unset border\nunset tics\n\
                r(a,b,c) = a + b + c\n\
                X(a,b,c) = (0.5*b + c) / r(a,b,c)\n\
                Y(a,b,c) = sqrt(3)/2 * b / r(a,b,c)\n\
                set label 'p1' at -0.05,-0.03\nset label 'p3' at 1.02,-0.03\n\
                set label 'p2' at 0.48,0.9\n\
                plot data every ::1 using (X($2,$3,$4)):(strcol(6) eq 'Separable' ? Y($2,$3,$4) : 1/0) \
                with points pt 7 ps 0.4 lc rgb '#ffffff' title 'separable', \\\n     \
                data every ::1 using (X($2,$3,$4)):(strcol(6) ne 'Separable' && strcol(7) eq 'true' ? Y($2,$3,$4) : 1/0) \
                with points pt 7 ps 0.4 lc rgb '#9ecae1' title 'PPT 1|3 only', \\\n     \
                data every ::1 using (X($2,$3,$4)):(strcol(7) eq 'false' && strcol(14) eq 'false' ? Y($2,$3,$4) : 1/0) \
                with points pt 7 ps 0.4 lc rgb '#fdd0a2' title 'NPT, local', \\\n     \
                data every ::1 using (X($2,$3,$4)):(strcol(14) eq 'true' ? Y($2,$3,$4) : 1/0) \
                with points pt 7 ps 0.4 lc rgb '#636363' title 'nonlocal', \\\n     \
                data every ::1 using (X($2,$3,$4)):(strcol(15) eq 'true' ? Y($2,$3,$4) : 1/0) \
                with points pt 7 ps 0.6 lc rgb '#000000' title 'PPT 1|3 and nonlocal'\n"
    } else {
        let mut p0s: Vec<f64> = records.iter().map(|r| r.p[0]).collect();
        p0s.sort_by(f64::total_cmp);
        p0s.dedup();
        let picks: Vec<f64> = match p0s.len() {
            0 => Vec::new(),
            len => (1..=4).map(|i| p0s[(i * (len - 1)) / 5]).collect(),
        };
        let mut out = head
            + "if (!exists('view')) view = 'cloud'\n\
               if (view eq 'cloud') {\n\
               set xlabel 'p1'\nset ylabel 'p2'\nset zlabel 'p3'\nset view 60,30\n\
               splot data every ::1 using 2:3:(strcol(6) eq 'Separable' ? $4 : 1/0) \
               with points pt 7 ps 0.3 title 'separable'\n\
               } else {\n\
               set multiplot layout 2,2\nset xlabel 'p1'\nset ylabel 'p2'\n";
        for v in picks {
            out += &format!(
                "set title 'p0 = {v}'\n\
                 plot data every ::1 using 2:(abs($1 - {v}) < 1e-12 && strcol(6) eq 'Separable' ? $3 : 1/0) \
                 with points pt 7 ps 0.4 title 'separable', \\\n     \
                 data every ::1 using 2:(abs($1 - {v}) < 1e-12 && strcol(6) ne 'Separable' && strcol(7) eq 'true' ? $3 : 1/0) \
                 with points pt 7 ps 0.4 title 'PPT 1|3 only'\n"
            );
        }
        out + "unset multiplot\n}\n"
    }
}

/// Writes `records` to `path`. The plot script expects the CSV next to it,
/// named after the script with extension `.csv`.
pub fn emit(records: &[ScanRecord], format: Format, path: &Path) -> Result<()> {
    let text = match format {
        Format::Csv => to_csv(records)?,
        Format::Json => to_json(records),
        Format::Gnuplot => {
            let csv_name = path
                .with_extension("csv")
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| "scan.csv".into());
            plot_script(records, &csv_name)
        }
    };
    std::fs::write(path, text)?;
    Ok(())
}

/// Outcome of one witness search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessSearch {
    pub convention: &'static str,
    pub witness: Option<ScanRecord>,
    pub ppt1_points: usize,
    /// Lowest Bell value over points that are PPT across 1|3.
    pub lowest_q_among_ppt1: Option<f64>,
    pub lowest_q_state: Option<[f64; 5]>,
}

/// PPT-1|3 points that satisfy the mixed-magnitude condition at the common
/// Dicke orientation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixedMagnitudeTally {
    pub theta: f64,
    pub phi: f64,
    pub ppt1_points: usize,
    pub satisfying: usize,
    pub example: Option<[f64; 5]>,
}

/// Findings when searching for a state that is PPT across 1|3 yet violates
/// the Bell inequality.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeresReport {
    pub p0: f64,
    pub p4: f64,
    pub res: usize,
    pub searches: Vec<WitnessSearch>,
    /// Smallest Bell value over the whole grid, whatever the PPT status.
    pub lowest_q_overall: f64,
    pub counts: StrataCounts,
    pub mixed_magnitude: MixedMagnitudeTally,
}

impl PeresReport {
    pub fn witness(&self) -> Option<(&'static str, &ScanRecord)> {
        self.searches
            .iter()
            .find_map(|s| s.witness.as_ref().map(|w| (s.convention, w)))
    }
}

impl fmt::Display for PeresReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "PPT-1|3 nonlocality search at p0 = {}, p4 = {}, resolution {}",
            self.p0, self.p4, self.res
        )?;
        writeln!(
            f,
            "grid points: {}; lowest Bell value anywhere: {:.6}",
            self.counts.total, self.lowest_q_overall
        )?;
        for s in &self.searches {
            match &s.witness {
                Some(w) => writeln!(
                    f,
                    "  [{}] witness p = {:?}, Q = {:.6}",
                    s.convention, w.p, w.q_min
                )?,
                None => writeln!(
                    f,
                    "  [{}] no witness; {} PPT-1|3 points, lowest Q among them {}",
                    s.convention,
                    s.ppt1_points,
                    s.lowest_q_among_ppt1
                        .map_or("n/a".into(), |q| format!("{q:.6}"))
                )?,
            }
        }
        let m = &self.mixed_magnitude;
        writeln!(
            f,
            "  mixed-magnitude condition at (θ, φ) = ({:.4}, {:.4}): {} of {} PPT-1|3 points (not a single-operator violation)",
            m.theta, m.phi, m.satisfying, m.ppt1_points
        )
    }
}

fn search_one(region: &Region, cfg: &ScanConfig, records: &[ScanRecord]) -> Result<WitnessSearch> {
    let ppt1: Vec<&ScanRecord> = records.iter().filter(|r| r.ppt1).collect();
    let lowest = ppt1.iter().min_by(|a, b| a.q_min.total_cmp(&b.q_min));
    let witness = match find_target(region, cfg, Target::Peres) {
        Ok(w) => Some(w),
        Err(Error::NotFound(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(WitnessSearch {
        convention: match cfg.classify.convention {
            Convention::Canonical => "canonical",
            Convention::LiteralP => "literal-p",
        },
        witness,
        ppt1_points: ppt1.len(),
        lowest_q_among_ppt1: lowest.map(|r| r.q_min),
        lowest_q_state: lowest.map(|r| r.p),
    })
}

/// Runs the search under the canonical weights and, when that finds
/// nothing, again with the literal-`p` Hankel windows.
pub fn peres_report(p0: f64, p4: f64, res: usize, cfg: &ScanConfig) -> Result<PeresReport> {
    let region = Region::Simplex { p0, p4, res };
    let canonical = ScanConfig {
        classify: ClassifyOptions {
            convention: Convention::Canonical,
            ..cfg.classify
        },
        ..*cfg
    };
    let records = scan(&region, &canonical)?;
    let mut searches = vec![search_one(&region, &canonical, &records)?];
    if searches[0].witness.is_none() {
        let literal = ScanConfig {
            classify: ClassifyOptions {
                convention: Convention::LiteralP,
                ..cfg.classify
            },
            ..*cfg
        };
        let lit_records = scan(&region, &literal)?;
        searches.push(search_one(&region, &literal, &lit_records)?);
    }

    let (angles, _) = optimize_angles(&Objective::CommonDicke { n: 4 }, &cfg.search)?;
    let mut tally = MixedMagnitudeTally {
        theta: angles.theta(),
        phi: angles.phi(),
        ppt1_points: 0,
        satisfying: 0,
        example: None,
    };
    for r in records.iter().filter(|r| r.ppt1) {
        tally.ppt1_points += 1;
        let s = make_ds(4, &r.p)?;
        let m = mixed_magnitude_condition(&s, &DeviceAngles::new(angles.theta(), angles.phi())?)?;
        if m.lhs > m.rhs {
            tally.satisfying += 1;
            tally.example.get_or_insert(r.p);
        }
    }

    Ok(PeresReport {
        p0,
        p4,
        res,
        searches,
        lowest_q_overall: records
            .iter()
            .map(|r| r.q_min)
            .fold(f64::INFINITY, f64::min),
        counts: StrataCounts::of(&records),
        mixed_magnitude: tally,
    })
}
