use std::path::Path;

use folia::builder::convergence_bound;
use folia::cfun::{parse, Expr};
use folia::geometry::{Domain, Point};
use folia::io::{self, AnyManifest};
use folia::verify::verify_manifest;
use folia::{build as build_manifest, Dd, Error, FoliationManifest, HolomorphyReport, Real, Thresholds, Verdict};

use crate::config::{self, BuildConfig, Precision, TestConfig};
use crate::{
    BuildArgs, Failure, LeavesArgs, TestArgs, VerifyArgs, EXIT_ERROR, EXIT_INCONCLUSIVE, EXIT_INVARIANT, EXIT_OK,
    EXIT_PARSE, EXIT_USAGE, EXIT_VIOLATED,
};

/// Apply `$body` to the manifest whatever its scalar type.
macro_rules! with_manifest {
    ($any:expr, $m:ident => $body:expr) => {
        match $any {
            AnyManifest::F64($m) => $body,
            AnyManifest::Dd($m) => $body,
        }
    };
}

fn read(path: &Path) -> Result<AnyManifest, Failure> {
    io::read_manifest(path).map_err(|e| Failure::new(EXIT_ERROR, format!("{}: {e}", path.display())))
}

pub fn resolve_build_config(a: &BuildArgs) -> Result<BuildConfig, Failure> {
    let mut c = match &a.config {
        Some(p) => config::load(p).map_err(|e| Failure::new(EXIT_USAGE, e))?,
        None => BuildConfig::default(),
    };
    if let Some(n) = a.n {
        if n != c.domain.n {
            c.domain.n = n;
            c.domain.center = None;
            c.domain.radii = None;
        }
    }
    if let Some(k) = a.domain {
        if k != c.domain.kind {
            c.domain.kind = k;
            c.domain.radii = None;
        }
    }
    if let Some(r) = a.radius {
        let count = match c.domain.kind {
            folia::DomainKind::Box => 2 * c.domain.n,
            folia::DomainKind::Polydisc => c.domain.n,
            folia::DomainKind::Ball => 1,
        };
        c.domain.radii = Some(vec![r; count]);
    }
    c.stages = a.stages.unwrap_or(c.stages);
    c.seed = a.seed.unwrap_or(c.seed);
    c.precision = a.precision.unwrap_or(c.precision);
    c.resolution_target = a.resolution_target.unwrap_or(c.resolution_target);
    c.flow_steps = a.flow_steps.unwrap_or(c.flow_steps);
    if a.k_bend.is_some() {
        c.k_bend = a.k_bend;
    }
    if c.stages == 0 {
        return Err(Failure::new(EXIT_USAGE, "the stage count must be at least 1"));
    }
    if c.flow_steps == 0 {
        return Err(Failure::new(EXIT_USAGE, "the flow step count must be at least 1"));
    }
    if let Some(k) = c.k_bend {
        let max = 0.5 / folia::kernel::profile_lipschitz();
        if !(k > 0.0 && k <= max) {
            return Err(Failure::new(EXIT_USAGE, format!("--k-bend must lie in (0, {max:.4}], got {k}")));
        }
    }
    Ok(c)
}

fn build_failure(e: Error) -> Failure {
    match e {
        Error::Invariant { .. } | Error::NoEpsilon { .. } => Failure::new(EXIT_INVARIANT, e.to_string()),
        other => other.into(),
    }
}

fn stage_table<T: Real>(m: &FoliationManifest<T>) {
    println!("{:>4} {:>2} {:>12} {:>12} {:>12}", "k", "l", "eps_k", "ell_k", "conv_bound");
    for (i, s) in m.stages.iter().enumerate() {
        let eps = s.epsilon.to_f();
        println!(
            "{:>4} {:>2} {:>12.4e} {:>12.4e} {:>12.4e}",
            i + 1,
            s.l,
            eps,
            m.separation_bounds[i + 1],
            2.0 * eps
        );
    }
}

fn build_in<T: Real>(c: &BuildConfig, out: &Path, quiet: bool) -> Result<u8, Failure> {
    let domain: Domain<T> = c.domain.to_domain()?.cast();
    let m = build_manifest(domain, c.seed, c.params()).map_err(build_failure)?;
    io::write_manifest(out, &m)?;
    if !quiet {
        stage_table(&m);
        println!(
            "{} stages ({}), convergence bound {:.4e}, written to {}",
            m.len(),
            T::NAME,
            convergence_bound(&m),
            out.display()
        );
    }
    Ok(EXIT_OK)
}

pub fn build(a: BuildArgs) -> Result<u8, Failure> {
    let c = resolve_build_config(&a)?;
    match c.precision {
        Precision::F64 => build_in::<f64>(&c, &a.out, a.quiet),
        Precision::Dd => build_in::<Dd>(&c, &a.out, a.quiet),
    }
}

/// Rows of real numbers; a first row that does not parse is taken as a header.
pub fn parse_anchors(text: &str, dim: usize) -> Result<Vec<Vec<f64>>, String> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row: Result<Vec<f64>, _> = line.split(',').map(|c| c.trim().parse::<f64>()).collect();
        match row {
            Ok(r) if r.len() == dim => out.push(r),
            Ok(r) => return Err(format!("line {}: {} values, expected {dim}", i + 1, r.len())),
            Err(_) if out.is_empty() && i == 0 => continue,
            Err(e) => return Err(format!("line {}: {e}", i + 1)),
        }
    }
    Ok(out)
}

/// `count` anchors on a cell-centred lattice over the coordinates transverse
/// to the leaves, with `Re z1` at the domain center.
pub fn grid_anchors(d: &Domain<f64>, count: usize) -> Vec<Vec<f64>> {
    if count == 0 {
        return Vec::new();
    }
    let dim = d.dim();
    let bb = d.bounding_box();
    let axes = dim - 1;
    let mut per_axis = ((count as f64).powf(1.0 / axes as f64).ceil() as usize).max(1);
    loop {
        let mut pts = Vec::new();
        let total = per_axis.pow(axes as u32);
        for idx in 0..total {
            let mut x = vec![d.center[0]; dim];
            let mut r = idx;
            for (j, b) in bb.iter().enumerate().skip(1) {
                let i = r % per_axis;
                r /= per_axis;
                x[j] = b.0 + (b.1 - b.0) * (i as f64 + 0.5) / per_axis as f64;
            }
            if d.contains(&x) {
                pts.push(x);
            }
        }
        if pts.len() >= count {
            return (0..count).map(|i| pts[i * pts.len() / count].clone()).collect();
        }
        per_axis += 1;
    }
}

fn export_leaves<T: Real>(m: &FoliationManifest<T>, anchors: &[Vec<f64>], a: &LeavesArgs) -> Result<u8, Failure> {
    std::fs::create_dir_all(&a.out_dir).map_err(|e| Failure::new(EXIT_ERROR, format!("{}: {e}", a.out_dir.display())))?;
    let mut jobs = Vec::new();
    for (i, x) in anchors.iter().enumerate() {
        let p = Point(x.iter().map(|&v| T::of(v)).collect::<Vec<T>>());
        if !m.domain.contains(&p) {
            return Err(Failure::new(EXIT_ERROR, format!("anchor {} {:?} lies outside the domain", i + 1, x)));
        }
        jobs.push((format!("leaf_{:04}.csv", i + 1), m.leaf_through(&p, a.samples)?));
    }
    if a.marked {
        for k in 1..=m.len() {
            jobs.push((format!("marked_{k:04}.csv"), m.marked_leaf(k, a.samples)?));
        }
    }
    for (name, leaf) in &jobs {
        io::write_leaf_csv(&a.out_dir.join(name), leaf)?;
        let corner = leaf.marked_stage.map_or(String::new(), |k| format!(", corner of stage {k}"));
        println!("{name}: {} samples{corner}", leaf.len());
    }
    Ok(EXIT_OK)
}

pub fn leaves(a: LeavesArgs) -> Result<u8, Failure> {
    let any = read(&a.manifest)?;
    let dim = 2 * any.n();
    let domain: Domain<f64> = with_manifest!(&any, m => m.domain.cast());
    let mut anchors = Vec::new();
    if let Some(p) = &a.anchors {
        let text = std::fs::read_to_string(p).map_err(|e| Failure::new(EXIT_ERROR, format!("{}: {e}", p.display())))?;
        anchors = parse_anchors(&text, dim).map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", p.display())))?;
    }
    if let Some(g) = a.grid {
        anchors.extend(grid_anchors(&domain, g));
    }
    with_manifest!(&any, m => export_leaves(m, &anchors, &a))
}

fn test_in<T: Real>(m: &FoliationManifest<T>, f: &Expr, th: &Thresholds, oracle: bool, label: &str) -> folia::Result<HolomorphyReport> {
    folia::test_function(f, m, th, oracle, label)
}

fn summary(r: &HolomorphyReport) {
    println!("function: {}", r.function);
    println!("angular points: {}", r.points.len());
    for (i, v) in r.per_coordinate_max.iter().enumerate() {
        println!("max |df/dzbar_{}|: {:.3e}", i + 1, v);
    }
    let err = r.points.iter().map(|p| p.fd_error_est).fold(0.0, f64::max);
    println!("largest error estimate: {err:.3e}");
    if let Some(gap) = r.points.iter().filter_map(|p| p.oracle_gap).reduce(f64::max) {
        println!("largest gap to autodiff: {gap:.3e}");
    }
    let v = match r.verdict {
        Verdict::Consistent => "consistent",
        Verdict::Violated => "violated",
        Verdict::Inconclusive => "inconclusive",
    };
    println!("verdict: {v}");
}

pub fn test(a: TestArgs) -> Result<u8, Failure> {
    let c: TestConfig = match &a.config {
        Some(p) => config::load(p).map_err(|e| Failure::new(EXIT_USAGE, e))?,
        None => TestConfig::default(),
    };
    let src = a
        .function
        .clone()
        .or(c.function)
        .ok_or_else(|| Failure::new(EXIT_USAGE, "no function given (--function or \"function\" in --config)"))?;
    let f = parse(&src).map_err(|e| Failure::new(EXIT_PARSE, format!("`{src}`: {e}")))?;
    let mut th = c.thresholds.unwrap_or_default();
    th.tau_detect = a.tau_detect.unwrap_or(th.tau_detect);
    th.h0_fraction = a.h0_fraction.unwrap_or(th.h0_fraction);
    let any = read(&a.manifest)?;
    let label = a.manifest.display().to_string();
    let report = with_manifest!(&any, m => test_in(m, &f, &th, a.oracle || c.oracle, &label)).map_err(|e| match e {
        Error::UnboundVariable { .. } => Failure::new(EXIT_PARSE, format!("`{src}`: {e}")),
        other => other.into(),
    })?;
    if let Some(p) = &a.report {
        io::write_json(p, &report)?;
    }
    summary(&report);
    Ok(match report.verdict {
        Verdict::Consistent => EXIT_OK,
        Verdict::Violated => EXIT_VIOLATED,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    })
}

pub fn verify(a: VerifyArgs) -> Result<u8, Failure> {
    let any = read(&a.manifest)?;
    let report = with_manifest!(&any, m => verify_manifest(m, a.level.into(), a.seed));
    for c in &report.checks {
        println!(
            "{} {:<22} {:>11.3e} (limit {:.1e})  {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.measured,
            c.limit,
            c.detail
        );
    }
    if let Some(p) = &a.report {
        io::write_json(p, &report)?;
    }
    if report.passed() {
        println!("all {} checks passed", report.checks.len());
        Ok(EXIT_OK)
    } else {
        let names: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
        Err(Failure::new(EXIT_INVARIANT, format!("failed: {}", names.join(", "))))
    }
}
