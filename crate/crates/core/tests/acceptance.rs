//! Acceptance suite: one verdict line per criterion, nonzero exit on failure.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;
use std::time::{Duration, Instant};
use vem_core::element2d::{kernel_dimension, Element2, Stabilization};
use vem_core::mesh::{generate_square_mesh, SquareFamily};
use vem_core::study::cases::sine;
use vem_core::study::norms::projected_errors;
use vem_core::study::{fit_slope, run_study, ErrorRow, StudyConfig, StudyReport};
use vem_core::system::{discretize_2d, SolveInfo};
use vem_core::Point2;

struct Outcome {
    passed: bool,
    detail: String,
}

/// Solver records of every study run by criteria 1 to 6.
#[derive(Default)]
struct SolveLog(Vec<(String, SolveInfo)>);

impl SolveLog {
    fn record(&mut self, label: &str, report: &StudyReport) {
        for l in &report.levels {
            self.0.push((format!("{label} n={}", l.n), l.solve.clone()));
        }
    }
}

fn study(dim: usize, k: usize, stab: Stabilization, family: &str, levels: &[usize], case: &str) -> StudyReport {
    let config = StudyConfig {
        dim,
        k,
        stab,
        family: family.into(),
        levels: levels.to_vec(),
        case: case.into(),
        ..StudyConfig::default()
    };
    run_study(&config, None).unwrap_or_else(|e| panic!("{dim}D k={k} {stab} {family} {case}: {e}"))
}

fn fmt_slopes(r: &StudyReport) -> String {
    let s: Vec<String> = r
        .slopes
        .values()
        .iter()
        .map(|v| v.map_or("-".into(), |v| format!("{v:.2}")))
        .collect();
    s.join("/")
}

/// Random polygon, star-shaped about the origin, optionally with a tiny edge
/// of relative length `eps`.
fn random_cell(rng: &mut ChaCha8Rng, eps: Option<f64>) -> Vec<Point2> {
    loop {
        let n = rng.random_range(3..=8);
        let mut angles: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..TAU)).collect();
        angles.sort_by(f64::total_cmp);
        let gaps = (0..n).map(|i| {
            let next = if i + 1 < n { angles[i + 1] } else { angles[0] + TAU };
            next - angles[i]
        });
        if gaps.clone().any(|g| !(0.05..=0.9 * std::f64::consts::PI).contains(&g)) {
            continue;
        }
        let scale = 10f64.powf(rng.random_range(-2.0..1.0));
        let shift = [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)];
        let mut pts: Vec<Point2> = angles
            .iter()
            .map(|&t| {
                let r = scale * rng.random_range(0.5..1.0);
                [shift[0] + r * t.cos(), shift[1] + r * t.sin()]
            })
            .collect();
        if let Some(eps) = eps {
            let i = rng.random_range(0..n);
            let (a, b) = (pts[i], pts[(i + 1) % n]);
            let len = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
            let t = eps * scale / len;
            if rng.random_bool(0.5) {
                // split an edge: a collinear hanging node next to a vertex
                pts.insert(i + 1, [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
            } else {
                // a new vertex just off the edge, forming two short sides
                let nrm = [(b[1] - a[1]) / len, -(b[0] - a[0]) / len];
                let off = 0.5 * eps * scale;
                pts.insert(
                    i + 1,
                    [a[0] + t * (b[0] - a[0]) + off * nrm[0], a[1] + t * (b[1] - a[1]) + off * nrm[1]],
                );
            }
        }
        return pts;
    }
}

fn unit(n: usize, i: usize) -> DVector<f64> {
    let mut v = DVector::zeros(n);
    v[i] = 1.0;
    v
}

fn patch_test(log: &mut SolveLog) -> Outcome {
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for k in 1..=4 {
        for family in ["uniform", "smalledge:1e-3", "hanging"] {
            for stab in [Stabilization::S1, Stabilization::S2, Stabilization::S2Tilde] {
                let r = study(2, k, stab, family, &[4], "poly");
                log.record(&format!("patch k={k} {family} {stab}"), &r);
                for l in &r.levels {
                    worst = worst.max(l.errors.values().into_iter().fold(0.0, f64::max));
                }
                if !r.rates.passed {
                    failures.push(format!("k={k} {family} {stab}"));
                }
            }
        }
    }
    Outcome {
        passed: failures.is_empty() && worst <= 1e-8,
        detail: format!("max error {worst:.1e} (bound 1e-8) over k=1..4, 3 families, 3 stabilizations {failures:?}"),
    }
}

fn projector_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst_projection = 0.0f64;
    let mut worst_condition = 0.0f64;
    let mut tiny = 0;
    for c in 0..200 {
        let eps = (c % 3 == 0).then_some(1e-6);
        tiny += eps.is_some() as usize;
        let cell = random_cell(&mut rng, eps);
        let k = 1 + c % 4;
        let el = Element2::new(cell, k).unwrap_or_else(|e| panic!("cell {c}: {e}"));
        let n = el.basis().len();
        // Π∇p = p and Π⁰p = p for every basis monomial
        for beta in 0..n {
            let dofs = el.poly_dofs(&unit(n, beta));
            let e = unit(n, beta);
            worst_projection = worst_projection
                .max((el.pi_nabla_star() * &dofs - &e).amax())
                .max((el.pi_zero_star() * &dofs - &e).amax());
        }
        // Π⁰v − Π∇v ∈ P_{k−2}, and its low moments are the moment dofs
        let v = DVector::from_fn(el.ndof(), |_, _| rng.random_range(-1.0..1.0));
        let z = el.pi_zero_star() * &v;
        let p = el.pi_nabla_star() * &v;
        let n_low = el.layout().n_moments();
        let scale = 1.0 + z.amax();
        for a in n_low..n {
            worst_condition = worst_condition.max((z[a] - p[a]).abs() / scale);
        }
        let area = el.geometry().area;
        let rule = el.rule(2 * k + 2);
        for g in 0..n_low {
            let m: f64 = rule.iter().map(|(x, w)| w * el.basis().evaluate(z.as_slice(), x) * el.basis().values(x)[g]).sum();
            worst_condition = worst_condition.max((m / area - v[el.layout().moment(g)]).abs() / scale);
        }
    }
    Outcome {
        passed: worst_projection <= 1e-10 && worst_condition <= 1e-10,
        detail: format!(
            "200 cells ({tiny} with 1e-6 edges): projection {worst_projection:.1e}, Π⁰−Π∇ condition {worst_condition:.1e} (bound 1e-10)"
        ),
    }
}

fn convergence_2d(family: &str, stab: Stabilization, log: &mut SolveLog) -> (bool, Vec<StudyReport>, String) {
    let mut ok = true;
    let mut reports = Vec::new();
    let mut parts = Vec::new();
    for k in 1..=3 {
        let r = study(2, k, stab, family, &[4, 8, 16, 32], "sine");
        log.record(&format!("{family} k={k} {stab}"), &r);
        ok &= r.rates.asserted && r.rates.passed;
        parts.push(format!("k={k}: {}", fmt_slopes(&r)));
        if !r.rates.passed {
            parts.push(format!("{:?}", r.rates.failures));
        }
        reports.push(r);
    }
    (ok, reports, parts.join("; "))
}

fn robustness_s2(log: &mut SolveLog, uniform: &[StudyReport]) -> Outcome {
    let (ok, reports, detail) = convergence_2d("smalledge:h2", Stabilization::S2, log);
    let mut ratio = 0.0f64;
    for (r, u) in reports.iter().zip(uniform) {
        let (fine, base): (ErrorRow, ErrorRow) = (r.finest().unwrap(), u.finest().unwrap());
        assert!((r.levels.last().unwrap().h - u.levels.last().unwrap().h).abs() < 1e-14);
        for (a, b) in fine.values().iter().zip(base.values()) {
            ratio = ratio.max(a / b);
        }
    }
    Outcome {
        passed: ok && ratio <= 3.0,
        detail: format!("{detail}; finest/uniform error ratio {ratio:.3} (bound 3)"),
    }
}

fn behavior_s1(log: &mut SolveLog) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for k in 1..=3 {
        let r = study(2, k, Stabilization::S1, "smalledge:h2", &[4, 8, 16, 32], "sine");
        log.record(&format!("smalledge:h2 k={k} s1"), &r);
        ok &= r.rates.asserted && r.rates.passed;
        let norm: Vec<String> = r
            .normalized_slopes
            .values()
            .iter()
            .map(|v| v.map_or("-".into(), |v| format!("{v:.2}")))
            .collect();
        parts.push(format!("k={k}: raw {} normalized {}", fmt_slopes(&r), norm.join("/")));
        if !r.rates.passed {
            parts.push(format!("{:?}", r.rates.failures));
        }
    }
    Outcome {
        passed: ok,
        detail: parts.join("; "),
    }
}

fn convergence_3d(log: &mut SolveLog) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for family in ["uniform", "facesplit:0.05"] {
        for k in 1..=2 {
            let levels: &[usize] = if k == 1 { &[2, 4, 8, 16] } else { &[2, 4, 8] };
            let r = study(3, k, Stabilization::S3D, family, levels, "sine");
            log.record(&format!("3D {family} k={k}"), &r);
            ok &= r.rates.asserted && r.rates.passed;
            parts.push(format!("{family} k={k}: {}", fmt_slopes(&r)));
            if !r.rates.passed {
                parts.push(format!("{:?}", r.rates.failures));
            }
        }
    }
    Outcome {
        passed: ok,
        detail: parts.join("; "),
    }
}

fn interpolation_rates() -> Outcome {
    let case = sine::<2>();
    let mut ok = true;
    let mut parts = Vec::new();
    for k in 1..=4 {
        let levels = [4, 8, 16, 32];
        let mut h = Vec::new();
        let (mut l2, mut h1) = (Vec::new(), Vec::new());
        for &n in &levels {
            let mesh = generate_square_mesh(n, SquareFamily::Uniform).unwrap();
            let disc = discretize_2d(&mesh, k).unwrap();
            let ih = disc.interpolate(&*case.u);
            let e = projected_errors(&disc, &ih, &*case.u, &*case.grad);
            h.push(mesh.mesh_size().unwrap());
            l2.push(e.l2_nabla.max(e.l2_zero));
            h1.push(e.h1_nabla);
        }
        let (sl2, sh1) = (fit_slope(&h, &l2).unwrap(), fit_slope(&h, &h1).unwrap());
        let kf = k as f64;
        ok &= sl2 >= kf + 0.8 && sh1 >= kf - 0.15;
        parts.push(format!("k={k}: L2 {sl2:.2} (≥{:.2}) H1 {sh1:.2} (≥{:.2})", kf + 0.8, kf - 0.15));
    }
    Outcome {
        passed: ok,
        detail: parts.join("; "),
    }
}

/// Loose bound guarding against a silently inaccurate factorization.
const RESIDUAL_SANITY: f64 = 1e-8;

fn spd_and_kernels(log: &SolveLog) -> Outcome {
    let not_direct: Vec<&String> = log
        .0
        .iter()
        .filter(|(_, info)| info.solver != "cholesky" || !(info.residual < RESIDUAL_SANITY))
        .map(|(label, _)| label)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut bad = Vec::new();
    for c in 0..50 {
        let eps = (c % 2 == 0).then_some(1e-6);
        let cell = random_cell(&mut rng, eps);
        let k = 1 + c % 4;
        let el = Element2::new(cell, k).unwrap();
        for stab in [Stabilization::S1, Stabilization::S2, Stabilization::S2Tilde] {
            match el.local_stiffness(stab) {
                Ok(km) if kernel_dimension(&km) == 1 => {}
                Ok(km) => bad.push(format!("cell {c} {stab}: kernel {}", kernel_dimension(&km))),
                Err(e) => bad.push(format!("cell {c} {stab}: {e}")),
            }
        }
    }
    // before boundary elimination the global kernel is the constants
    let mesh = generate_square_mesh(3, SquareFamily::SmallEdge(1e-3)).unwrap();
    let disc = discretize_2d(&mesh, 2).unwrap();
    let n = disc.dofmap.n_total();
    let mut a = DMatrix::zeros(n, n);
    for (c, km) in disc.local_matrices(Stabilization::S2).unwrap().iter().enumerate() {
        let dofs = disc.dofmap.cell_dofs(c);
        for (i, &gi) in dofs.iter().enumerate() {
            for (j, &gj) in dofs.iter().enumerate() {
                a[(gi, gj)] += km[(i, j)];
            }
        }
    }
    let global_kernel = kernel_dimension(&a);
    let worst_residual = log.0.iter().map(|(_, info)| info.residual).fold(0.0, f64::max);
    Outcome {
        passed: !log.0.is_empty() && not_direct.is_empty() && bad.is_empty() && global_kernel == 1,
        detail: format!(
            "{} systems factored by Cholesky (worst relative residual {:.1e}), failures {:?}; 150 local kernels on 50 cells, failures {:?}; global unreduced kernel {}",
            log.0.len() - not_direct.len(),
            worst_residual,
            not_direct,
            bad,
            global_kernel
        ),
    }
}

fn oracle_equivalence() -> Outcome {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/unit_square_k1_stiffness.json");
    let fixture: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let vertices: Vec<Point2> = serde_json::from_value(fixture["vertices"].clone()).unwrap();
    let el = Element2::new(vertices, 1).unwrap();
    let mut worst = 0.0f64;
    for (key, stab) in [("s1", Stabilization::S1), ("s2", Stabilization::S2), ("s2tilde", Stabilization::S2Tilde)] {
        let expect: Vec<Vec<f64>> = serde_json::from_value(fixture[key].clone()).unwrap();
        let km = el.local_stiffness(stab).unwrap();
        for (i, row) in expect.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                worst = worst.max((km[(i, j)] - v).abs());
            }
        }
    }
    Outcome {
        passed: worst <= 1e-12,
        detail: format!("max |K − K_oracle| = {worst:.1e} for s1, s2, s2tilde (bound 1e-12)"),
    }
}

fn report(id: usize, name: &str, limit: Duration, start: Instant, outcome: Outcome, all: &mut bool) {
    let elapsed = start.elapsed();
    let passed = outcome.passed && elapsed <= limit;
    *all &= passed;
    println!(
        "criterion {id} {}: {name}: {} [{:.1} s, limit {} s]",
        if passed { "PASS" } else { "FAIL" },
        outcome.detail,
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
}

fn main() {
    // `cargo test -- --list` and filters from other targets must not run the suite
    let args: Vec<String> = std::env::args().collect();
    if args.iter().any(|a| a == "--list") {
        return;
    }
    let mut all = true;
    let mut log = SolveLog::default();
    let secs = Duration::from_secs;

    let t = Instant::now();
    report(1, "polynomial patch test", secs(10), t, patch_test(&mut log), &mut all);

    let t = Instant::now();
    report(2, "projector identities", secs(5), t, projector_identities(), &mut all);

    let t = Instant::now();
    let (ok, uniform, detail) = convergence_2d("uniform", Stabilization::S2, &mut log);
    report(3, "2D convergence, S2, uniform", secs(120), t, Outcome { passed: ok, detail }, &mut all);

    let t = Instant::now();
    report(4, "small-edge robustness, S2", secs(120), t, robustness_s2(&mut log, &uniform), &mut all);

    let t = Instant::now();
    report(5, "small-edge behavior, S1", secs(120), t, behavior_s1(&mut log), &mut all);

    let t = Instant::now();
    report(6, "3D convergence", secs(600), t, convergence_3d(&mut log), &mut all);

    let t = Instant::now();
    report(7, "interpolation rates", secs(30), t, interpolation_rates(), &mut all);

    let t = Instant::now();
    report(8, "SPD systems and kernels", secs(60), t, spd_and_kernels(&log), &mut all);

    let t = Instant::now();
    report(9, "oracle equivalence", secs(5), t, oracle_equivalence(), &mut all);

    if !all {
        std::process::exit(1);
    }
}
