//! One function per subcommand; each renders its output document.

use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;

use homlab_core::bs::BeamSplitter;
use homlab_core::detector::{herald_posterior, lossy_distribution, spdc_detection_prob, squeezing_db, LossConfig, SqueezedSource};
use homlab_core::dicke::{cnl_sweep, odd_support_state, AngularState, Half};
use homlab_core::joint::{default_grid_max, JointDistribution, JointPlan};
use homlab_core::nodal::{
    bfs_zeros_rows, cnl_scan, finalize, search_parametric_partition, verify_parametric, IntegerZero, ParametricSolution,
    SearchSpec, Verification, KNOWN_FAMILIES,
};
use homlab_core::numerics::BigRational;
use homlab_core::states::{Cutoff, State};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{
    AtomState, Command, DickeArgs, DistArgs, Format, HeraldArgs, LossyArgs, ParametricArgs, VerifyArgs, ZerosArgs,
};
use crate::descriptor::{parse_bs, parse_rational, parse_state};
use crate::error::{CliError, CliResult, Context};
use crate::output::{emit, float17, rational_parts, to_json, BsMeta, Diagnostics, GridDocument, GridMeta, TOOL_VERSION};

/// Diagonal entries below this count as zeros in `cnl_verdict`.
pub const CNL_TOL: f64 = 1e-14;

/// A rendered document and, for `verify`, the reason the run failed.
#[derive(Debug)]
pub struct Rendered {
    pub text: String,
    pub failure: Option<String>,
}

impl Rendered {
    fn ok(text: String) -> Self {
        Rendered { text, failure: None }
    }
}

/// Runs `cmd` and writes its document.
pub fn run(cmd: &Command) -> CliResult<()> {
    let rendered = render(cmd)?;
    let (path, _) = cmd.output();
    emit(path, &rendered.text)?;
    match rendered.failure {
        Some(message) => Err(CliError::Check {
            context: cmd.name().to_string(),
            message,
        }),
        None => Ok(()),
    }
}

pub fn render(cmd: &Command) -> CliResult<Rendered> {
    let (_, format) = cmd.output();
    match cmd {
        Command::Dist(a) => dist(a, format).map(Rendered::ok),
        Command::Lossy(a) => lossy(a, format).map(Rendered::ok),
        Command::Zeros(a) => zeros(a, format).map(Rendered::ok),
        Command::Parametric(a) => parametric(a, format).map(Rendered::ok),
        Command::Herald(a) => herald(a, format).map(Rendered::ok),
        Command::Dicke(a) => dicke(a, format).map(Rendered::ok),
        Command::Verify(a) => verify(a, format),
    }
}

fn required<'a, T>(value: &'a Option<T>, flag: &str) -> CliResult<&'a T> {
    value.as_ref().ok_or_else(|| CliError::usage(format!("{flag} is required")))
}

fn exact_t(spec: &str, flag: &str) -> CliResult<BigRational> {
    let t = parse_rational(spec).ok_or_else(|| CliError::usage(format!("{flag}: expected an exact fraction, got '{spec}'")))?;
    BeamSplitter::exact(t.clone()).context(flag)?;
    Ok(t)
}

/// Rows computed in parallel, reassembled in order.
pub fn compute_parallel(plan: &JointPlan) -> CliResult<JointDistribution> {
    let rows: Vec<Vec<f64>> = (0..=plan.grid_max()).into_par_iter().map(|m_a| plan.row(m_a)).collect();
    plan.assemble(rows).context("grid")
}

fn states(a: &Option<String>, b: &Option<String>) -> CliResult<(String, State, String, State)> {
    let (da, db) = (required(a, "--a")?, required(b, "--b")?);
    Ok((da.clone(), parse_state(da, "--a")?, db.clone(), parse_state(db, "--b")?))
}

fn grid_document(
    command: &str,
    (da, db): (&str, &str),
    dist: &JointDistribution,
    eta: (Option<f64>, Option<f64>),
    format: Format,
) -> CliResult<String> {
    let meta = GridMeta {
        command: command.into(),
        state_a: da.into(),
        state_b: db.into(),
        bs: BsMeta::new(dist.bs())?,
        grid_max: dist.grid_max(),
        eta_a: eta.0,
        eta_b: eta.1,
        tool_version: TOOL_VERSION.into(),
    };
    let diagnostics = Diagnostics {
        tail_deficit: (1.0 - dist.total_mass()).max(0.0),
        cnl_verdict: cnl_scan(dist, CNL_TOL).verdict,
    };
    let doc = GridDocument::new(meta, dist, diagnostics);
    Ok(match format {
        Format::Json => to_json(&doc),
        Format::Csv => doc.to_csv(),
    })
}

fn dist(args: &DistArgs, format: Format) -> CliResult<String> {
    let (da, a, db, b) = states(&args.a, &args.b)?;
    let bs = parse_bs(args.bs.as_deref().unwrap_or("1/2"), "--bs")?;
    let grid = args.grid_max.unwrap_or_else(|| default_grid_max(&a, &b));
    let plan = JointPlan::for_states(&a, &b, &bs, grid).context("--grid-max")?;
    let dist = compute_parallel(&plan)?;
    grid_document("dist", (&da, &db), &dist, (None, None), format)
}

fn clip(dist: &JointDistribution, grid: usize) -> CliResult<JointDistribution> {
    let cells = dist.rows().take(grid + 1).flat_map(|row| row[..=grid].iter().copied()).collect();
    JointDistribution::from_grid(cells, grid, dist.bs().clone(), dist.input_label(), dist.input_mass()).context("--grid-max")
}

fn lossy(args: &LossyArgs, format: Format) -> CliResult<String> {
    let (da, a, db, b) = states(&args.a, &args.b)?;
    let bs = parse_bs(args.bs.as_deref().unwrap_or("1/2"), "--bs")?;
    let eta_a = args.eta_a.or(args.eta).ok_or_else(|| CliError::usage("--eta or --eta-a is required"))?;
    let eta_b = args.eta_b.or(args.eta).ok_or_else(|| CliError::usage("--eta or --eta-b is required"))?;
    let source_max = args.source_max.unwrap_or_else(|| default_grid_max(&a, &b));
    let grid = args.grid_max.unwrap_or(source_max);
    let latent = source_max.max(grid);
    let plan = JointPlan::for_states(&a, &b, &bs, latent).context("--source-max")?;
    let ideal = compute_parallel(&plan)?;
    let loss = LossConfig::new(eta_a, eta_b, latent).context("--eta")?;
    let seen = lossy_distribution(&ideal, &loss).context("--eta")?;
    let seen = if grid < latent { clip(&seen, grid)? } else { seen };
    grid_document("lossy", (&da, &db), &seen, (Some(eta_a), Some(eta_b)), format)
}

#[derive(Serialize)]
struct ZerosMeta {
    command: &'static str,
    n: u32,
    #[serde(rename = "T_num")]
    t_num: i64,
    #[serde(rename = "T_den")]
    t_den: i64,
    m_max: u64,
    physical_only: bool,
    tool_version: &'static str,
}

#[derive(Serialize)]
struct ZerosDocument {
    meta: ZerosMeta,
    count: usize,
    swap_symmetric: bool,
    zeros: Vec<ZeroEntry>,
}

#[derive(Serialize)]
struct ZeroEntry {
    m_a: i64,
    m_b: i64,
    physical: bool,
}

/// Exhaustive scan, parallel over rows, in row-major order.
pub fn scan_zeros(n: u32, t: &BigRational, m_max: u64) -> Vec<IntegerZero> {
    let gp = homlab_core::bs::GPolynomial::new(n, t);
    let mut zeros: Vec<IntegerZero> =
        (0..=m_max).into_par_iter().flat_map_iter(|m_a| bfs_zeros_rows(&gp, m_a..=m_a, m_max)).collect();
    zeros.sort();
    zeros
}

fn zeros(args: &ZerosArgs, format: Format) -> CliResult<String> {
    let n = *required(&args.n, "--n")?;
    let t = exact_t(required(&args.t, "--T")?, "--T")?;
    let m_max = args.max.unwrap_or(100);
    let physical_only = args.physical_only.unwrap_or(false);
    let all = scan_zeros(n, &t, m_max);
    let swap_symmetric = all.iter().all(|z| all.binary_search_by(|y| (y.m_a, y.m_b).cmp(&(z.m_b, z.m_a))).is_ok());
    let kept: Vec<IntegerZero> = all.into_iter().filter(|z| z.physical || !physical_only).collect();
    if format == Format::Csv {
        let mut out = String::from("m_a,m_b,physical\n");
        for z in &kept {
            writeln!(out, "{},{},{}", z.m_a, z.m_b, z.physical).unwrap();
        }
        return Ok(out);
    }
    let (t_num, t_den) = rational_parts(&t, "--T")?;
    Ok(to_json(&ZerosDocument {
        meta: ZerosMeta {
            command: "zeros",
            n,
            t_num,
            t_den,
            m_max,
            physical_only,
            tool_version: TOOL_VERSION,
        },
        count: kept.len(),
        swap_symmetric,
        zeros: kept
            .iter()
            .map(|z| ZeroEntry {
                m_a: z.m_a,
                m_b: z.m_b,
                physical: z.physical,
            })
            .collect(),
    }))
}

#[derive(Serialize)]
struct ParametricMeta {
    command: &'static str,
    n: u32,
    #[serde(rename = "T_num")]
    t_num: i64,
    #[serde(rename = "T_den")]
    t_den: i64,
    degree: usize,
    lo: i64,
    hi: i64,
    tool_version: &'static str,
}

#[derive(Serialize)]
struct Interval {
    lo: Option<i64>,
    hi: Option<i64>,
}

#[derive(Serialize)]
struct FamilyEntry {
    a: Vec<i64>,
    b: Vec<i64>,
    valid_k: Vec<Interval>,
}

#[derive(Serialize)]
struct ParametricDocument {
    meta: ParametricMeta,
    count: usize,
    families: Vec<FamilyEntry>,
}

/// Search with one task per leading coefficient; the merged result does not
/// depend on the number of workers.
pub fn search_parallel(spec: &SearchSpec) -> Vec<ParametricSolution> {
    let found: Vec<ParametricSolution> = spec
        .partitions()
        .into_par_iter()
        .flat_map_iter(|lead| search_parametric_partition(spec, lead))
        .collect();
    finalize(found)
}

fn padded(c: &[i64], len: usize) -> Vec<i64> {
    let mut v = c.to_vec();
    v.resize(len.max(v.len()), 0);
    v
}

fn parametric(args: &ParametricArgs, format: Format) -> CliResult<String> {
    let n = *required(&args.n, "--n")?;
    let t = exact_t(required(&args.t, "--T")?, "--T")?;
    let degree = args.degree.unwrap_or(2);
    let (lo, hi) = (args.lo.unwrap_or(-5), args.hi.unwrap_or(5));
    let spec = SearchSpec::new(n, t.clone(), degree, lo..=hi).context("--degree/--lo/--hi")?;
    let found = search_parallel(&spec);
    if format == Format::Csv {
        let mut out = String::new();
        let names = |p: char| (0..=degree).map(move |i| format!("{p}{i}"));
        writeln!(out, "{}", names('a').chain(names('b')).collect::<Vec<_>>().join(",")).unwrap();
        for s in &found {
            let cells: Vec<String> =
                padded(&s.a, degree + 1).iter().chain(&padded(&s.b, degree + 1)).map(i64::to_string).collect();
            writeln!(out, "{}", cells.join(",")).unwrap();
        }
        return Ok(out);
    }
    let (t_num, t_den) = rational_parts(&t, "--T")?;
    Ok(to_json(&ParametricDocument {
        meta: ParametricMeta {
            command: "parametric",
            n,
            t_num,
            t_den,
            degree,
            lo,
            hi,
            tool_version: TOOL_VERSION,
        },
        count: found.len(),
        families: found
            .iter()
            .map(|s| FamilyEntry {
                a: padded(&s.a, degree + 1),
                b: padded(&s.b, degree + 1),
                valid_k: s.valid_domain().intervals.iter().map(|i| Interval { lo: i.lo, hi: i.hi }).collect(),
            })
            .collect(),
    }))
}

#[derive(Serialize)]
struct HeraldMeta {
    command: &'static str,
    t: usize,
    eta: f64,
    r: f64,
    cutoff: usize,
    squeezing_db: f64,
    tool_version: &'static str,
}

#[derive(Serialize)]
struct PosteriorEntry {
    n_prime: usize,
    p: f64,
}

#[derive(Serialize)]
struct HeraldDocument {
    meta: HeraldMeta,
    /// `P(t|t)`, the chance that the heralded mode holds exactly `t` photons.
    fidelity: f64,
    detection_prob: f64,
    source_tail: f64,
    posterior: Vec<PosteriorEntry>,
}

fn herald(args: &HeraldArgs, format: Format) -> CliResult<String> {
    let t = *required(&args.t, "--t")?;
    let eta = *required(&args.eta, "--eta")?;
    let r = *required(&args.r, "--r")?;
    let cutoff = args.cutoff.map_or(Cutoff::Auto, Cutoff::Fixed);
    let src = SqueezedSource::new(r, cutoff).context("--r/--cutoff")?;
    let n_max = args.n_max.unwrap_or(t + 10).min(src.cutoff());
    let posterior = (t..=n_max)
        .map(|n_prime| Ok(PosteriorEntry { n_prime, p: herald_posterior(n_prime, t, eta, &src)? }))
        .collect::<homlab_core::Result<Vec<_>>>()
        .context("--t/--eta")?;
    if format == Format::Csv {
        let mut out = String::from("n_prime,P\n");
        for e in &posterior {
            writeln!(out, "{},{}", e.n_prime, float17(e.p)).unwrap();
        }
        return Ok(out);
    }
    Ok(to_json(&HeraldDocument {
        meta: HeraldMeta {
            command: "herald",
            t,
            eta,
            r,
            cutoff: src.cutoff(),
            squeezing_db: squeezing_db(r),
            tool_version: TOOL_VERSION,
        },
        fidelity: herald_posterior(t, t, eta, &src).context("--t/--eta")?,
        detection_prob: spdc_detection_prob(t, eta, &src).context("--t/--eta")?,
        source_tail: src.tail(),
        posterior,
    }))
}

#[derive(Serialize)]
struct DickeMeta {
    command: &'static str,
    theta: f64,
    state: AtomState,
    j_min: u32,
    j_max: u32,
    tool_version: &'static str,
}

#[derive(Serialize)]
struct DickeRow {
    #[serde(rename = "J")]
    j: String,
    twice_j: i64,
    p_center: Option<f64>,
}

#[derive(Serialize)]
struct DickeDocument {
    meta: DickeMeta,
    rows: Vec<DickeRow>,
}

fn dicke(args: &DickeArgs, format: Format) -> CliResult<String> {
    let j_min = args.j_min.unwrap_or(1);
    let j_max = args.j_max.unwrap_or(10);
    if j_min > j_max {
        return Err(CliError::usage(format!("--j-min {j_min} exceeds --j-max {j_max}")));
    }
    let theta = args.theta.unwrap_or(FRAC_PI_2);
    let kind = args.state.unwrap_or_default();
    let step = if args.half_integers.unwrap_or(false) { 1 } else { 2 };
    let mut atoms = Vec::new();
    for twice in (2 * i64::from(j_min)..=2 * i64::from(j_max)).step_by(step) {
        let j = Half::from_twice(twice);
        let state = match kind {
            AtomState::Odd => odd_support_state(j),
            AtomState::Single => AngularState::basis(j, Half::from_twice(2 - twice)).ok(),
        };
        atoms.push(state.ok_or_else(|| CliError::usage(format!("--j-min: J = {j} has no {kind:?} state")))?);
    }
    let rows = cnl_sweep(&atoms, theta).context("--theta")?;
    if format == Format::Csv {
        let mut out = String::from("J,P_center\n");
        for r in &rows {
            writeln!(out, "{},{}", r.j, r.p_center.map(float17).unwrap_or_default()).unwrap();
        }
        return Ok(out);
    }
    Ok(to_json(&DickeDocument {
        meta: DickeMeta {
            command: "dicke",
            theta,
            state: kind,
            j_min,
            j_max,
            tool_version: TOOL_VERSION,
        },
        rows: rows
            .iter()
            .map(|r| DickeRow {
                j: r.j.to_string(),
                twice_j: r.j.twice(),
                p_center: r.p_center,
            })
            .collect(),
    }))
}

#[derive(Serialize)]
struct VerifyMeta {
    command: &'static str,
    source: String,
    tool_version: &'static str,
}

#[derive(Serialize)]
struct FirstNonzero {
    power: usize,
    coefficient: String,
}

#[derive(Serialize)]
struct VerifyEntry {
    group: String,
    n: u32,
    #[serde(rename = "T")]
    t: String,
    a: Vec<i64>,
    b: Vec<i64>,
    valid: bool,
    expansion_zero: bool,
    evaluation_zero: bool,
    first_nonzero: Option<FirstNonzero>,
}

#[derive(Serialize)]
struct VerifyDocument {
    meta: VerifyMeta,
    all_valid: bool,
    families: Vec<VerifyEntry>,
}

fn parse_coeffs(s: &str) -> Option<Vec<i64>> {
    s.split(',').map(|c| c.trim().parse().ok()).collect()
}

fn verify(args: &VerifyArgs, format: Format) -> CliResult<Rendered> {
    let (source, rows): (String, Vec<(String, ParametricSolution)>) = match (&args.tables, &args.family) {
        (Some(name), None) => {
            if name != "appendix-c" {
                return Err(CliError::usage(format!("--tables: unknown set '{name}' (appendix-c)")));
            }
            (name.clone(), KNOWN_FAMILIES.iter().map(|r| (r.group.to_string(), r.solution())).collect())
        }
        (None, Some(family)) => {
            let n = *required(&args.n, "--n")?;
            let t = exact_t(required(&args.t, "--T")?, "--T")?;
            let bad = || CliError::usage(format!("--family: expected 'a0,a1,...;b0,b1,...', got '{family}'"));
            let (a, b) = family.split_once(';').ok_or_else(bad)?;
            let (a, b) = (parse_coeffs(a).ok_or_else(bad)?, parse_coeffs(b).ok_or_else(bad)?);
            if a.len() > 4 || b.len() > 4 {
                return Err(CliError::usage("--family: degree is at most 3"));
            }
            ("family".into(), vec![("family".into(), ParametricSolution::new(n, t, a, b))])
        }
        _ => return Err(CliError::usage("give exactly one of --tables or --family")),
    };
    let checked: Vec<(String, ParametricSolution, Verification)> =
        rows.into_iter().map(|(g, s)| { let v = verify_parametric(&s); (g, s, v) }).collect();
    let failed = checked.iter().filter(|(_, _, v)| !v.valid).count();
    let text = if format == Format::Csv {
        let mut out = String::from("group,n,T,a,b,valid\n");
        for (g, s, v) in &checked {
            let join = |c: &[i64]| c.iter().map(i64::to_string).collect::<Vec<_>>().join(" ");
            writeln!(out, "{g},{},{},{},{},{}", s.n, s.t, join(&s.a), join(&s.b), v.valid).unwrap();
        }
        out
    } else {
        to_json(&VerifyDocument {
            meta: VerifyMeta {
                command: "verify",
                source,
                tool_version: TOOL_VERSION,
            },
            all_valid: failed == 0,
            families: checked
                .iter()
                .map(|(g, s, v)| VerifyEntry {
                    group: g.clone(),
                    n: s.n,
                    t: s.t.to_string(),
                    a: s.a.clone(),
                    b: s.b.clone(),
                    valid: v.valid,
                    expansion_zero: v.expansion_zero,
                    evaluation_zero: v.evaluation_zero,
                    first_nonzero: v.first_nonzero.as_ref().map(|(power, c)| FirstNonzero {
                        power: *power,
                        coefficient: c.to_string(),
                    }),
                })
                .collect(),
        })
    };
    Ok(Rendered {
        text,
        failure: (failed > 0).then(|| format!("{failed} of {} families do not vanish identically", checked.len())),
    })
}
