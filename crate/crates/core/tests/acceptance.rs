//! Acceptance checks, one line per criterion. Runs without the libtest
//! harness so the lines always reach the output.
//!
//! Criterion 3 asks for a convexity defect above 0.05 on a witness pair that
//! the normalized rule maps to the same state, so its exact defect is zero
//! and the line stays red. A lifted witness with a nonzero defect is reported
//! on a separate supplementary line.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::process::ExitCode;
use std::time::Instant;

use nosignal_core::channel::{
    apply_deterministic, apply_selective, choi_matrix, complete_to_deterministic, greenberger_t, linearity_test,
    validate_channel,
};
use nosignal_core::linalg::{hermitian_eigenvalues, kron};
use nosignal_core::nosig::{fuzz_no_signaling, marginal_obstruction};
use nosignal_core::optics::{propagate_network, reference_input, reference_network};
use nosignal_core::scenario::{
    epr_factorized, greenberger_final, keys, run_epr_bohm, run_erasure, run_greenberger, run_stern_gerlach,
    z_basis,
};
use nosignal_core::state::{
    greenberger_predetector, singlet, PHOTON1, PHOTON2, SHIFTER, SPIN1, SPIN2,
};
use nosignal_core::{
    ChannelKind, ComplexMatrix, DensityOperator, DimensionSpec, Error, KrausChannel, PureState, TargetTransform, C64,
};

/// Criteria known to be unattainable as written.
const KNOWN_RED: &[u32] = &[3];

struct Line {
    id: u32,
    pass: bool,
    text: String,
}

fn grid(n: usize) -> impl Iterator<Item = f64> + Clone {
    (0..n).map(move |k| 2.0 * PI * k as f64 / n as f64)
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Deviation after aligning `a` to `b` with the phase of their largest
/// common component.
fn phase_aligned_deviation(a: &[C64], b: &[C64]) -> f64 {
    let k = (0..b.len())
        .max_by(|&i, &j| b[i].norm().partial_cmp(&b[j].norm()).unwrap())
        .unwrap();
    if a[k].norm() == 0.0 {
        return f64::INFINITY;
    }
    let ph = (b[k] / a[k]) / (b[k] / a[k]).norm();
    a.iter().zip(b).map(|(x, y)| (x * ph - y).norm()).fold(0.0, f64::max)
}

fn density(v: &[C64]) -> DensityOperator {
    let dims = DimensionSpec::single("shifter", v.len()).unwrap();
    PureState::new(dims, v.to_vec()).unwrap().to_density()
}

/// Normalized image by plain 2x2 arithmetic.
fn normalized_2x2(t: &[[C64; 2]; 2], r: &[[C64; 2]; 2]) -> [[C64; 2]; 2] {
    let mut tr_t = [[c(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    tr_t[i][j] += t[i][k] * r[k][l] * t[j][l].conj();
                }
            }
        }
    }
    let tr = (tr_t[0][0] + tr_t[1][1]).re;
    tr_t.map(|row| row.map(|z| z / tr))
}

fn criterion_1() -> Line {
    let mut worst = 0.0f64;
    let mut worst_report = 0.0f64;
    let (mut points, mut degenerate) = (0, 0);
    for alpha in grid(8) {
        for beta in grid(8) {
            for gamma in grid(8) {
                let z = (alpha + beta - gamma / 2.0).cos().powi(2) + (beta - alpha - gamma / 2.0).cos().powi(2);
                if z < 1e-12 {
                    degenerate += 1;
                    assert!(matches!(run_greenberger(alpha, beta, gamma), Err(Error::Degenerate(_))));
                    continue;
                }
                points += 1;
                // I₄ ⊗ T applied by hand.
                let t = greenberger_t(gamma).matrix;
                let full = kron(&ComplexMatrix::identity(4), &t);
                let image = full.apply(greenberger_predetector(alpha, beta).amplitudes()).unwrap();
                worst = worst.max(phase_aligned_deviation(&image, &greenberger_final(alpha, beta, gamma)));
                let rep = run_greenberger(alpha, beta, gamma).unwrap();
                worst_report = worst_report.max(rep.metrics["final_state_deviation"]);
            }
        }
    }
    let worst = worst.max(worst_report);
    Line {
        id: 1,
        pass: worst <= 1e-10,
        text: format!(
            "T image of the pre-detector state equals the closed-form final state: max dev {worst:.2e} over {points} points ({degenerate} degenerate skipped)"
        ),
    }
}

fn criterion_2() -> Line {
    let plus = run_greenberger(PI / 4.0, 0.0, PI / 2.0).unwrap();
    let minus = run_greenberger(PI / 4.0, 0.0, -PI / 2.0).unwrap();
    let d_plus = (plus.probabilities[keys::P_HD] - 1.0).abs().max(plus.probabilities[keys::P_GC].abs());
    let d_minus = minus.probabilities[keys::P_HD].abs().max((minus.probabilities[keys::P_GC] - 1.0).abs());
    let dev = d_plus.max(d_minus);
    Line {
        id: 2,
        pass: dev <= 1e-10,
        text: format!(
            "gamma=+pi/2 gives (P(h,d'), P(g,c'))=({:.12}, {:.12}); gamma=-pi/2 gives ({:.12}, {:.12}); max dev {dev:.2e}",
            plus.probabilities[keys::P_HD],
            plus.probabilities[keys::P_GC],
            minus.probabilities[keys::P_HD],
            minus.probabilities[keys::P_GC],
        ),
    }
}

fn criterion_3() -> (Line, Line) {
    let mut all_rejected = true;
    let mut spectrum_dev = 0.0f64;
    let mut min_choi = f64::INFINITY;
    for gamma in grid(32) {
        let raw = greenberger_t(gamma).as_raw_channel();
        let r = validate_channel(&raw);
        all_rejected &= !r.trace_preserving;
        spectrum_dev = spectrum_dev
            .max((r.effect_spectrum[0] - 0.0).abs())
            .max((r.effect_spectrum[1] - 2.0).abs());
        // Choi matrix rebuilt independently and diagonalized.
        let t = &raw.operators()[0];
        let mut choi = ComplexMatrix::zeros(4, 4);
        for j in 0..2 {
            for k in 0..2 {
                let mut e = ComplexMatrix::zeros(2, 2);
                e.set(j, k, c(1.0, 0.0));
                choi = &choi + &kron(&e, &(&(t * &e) * &t.adjoint()));
            }
        }
        assert!(choi.max_abs_diff(&choi_matrix(&raw)) < 1e-12);
        min_choi = min_choi.min(hermitian_eigenvalues(&choi).unwrap()[0]).min(r.min_choi_eigenvalue);
    }

    // Literal witness pair on the shifter alone.
    let t0 = greenberger_t(0.0).matrix;
    let u = [c(1.0, 0.0), c(0.0, 0.0)];
    let plus_i = [c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2)];
    let (rho1, rho2) = (density(&u), density(&plus_i));
    let defect = linearity_test(&t0, &rho1, &rho2, 0.5).unwrap();
    // Oracle: both inputs and their mixture normalize to |u><u|.
    let tm = [[c(1.0, 0.0), c(1.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]];
    let r1 = [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]];
    let r2 = [[c(0.5, 0.0), c(0.0, -0.5)], [c(0.0, 0.5), c(0.5, 0.0)]];
    let mix = [[c(0.75, 0.0), c(0.0, -0.25)], [c(0.0, 0.25), c(0.25, 0.0)]];
    let (n1, n2, nm) = (normalized_2x2(&tm, &r1), normalized_2x2(&tm, &r2), normalized_2x2(&tm, &mix));
    let mut oracle = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            oracle = oracle.max((nm[i][j] - (n1[i][j] * 0.5 + n2[i][j] * 0.5)).norm());
        }
    }
    assert!((defect - oracle).abs() < 1e-12, "linearity_test {defect} vs oracle {oracle}");

    let pass = all_rejected && spectrum_dev <= 1e-9 && min_choi >= -1e-9 && defect > 0.05;
    let main = Line {
        id: 3,
        pass,
        text: format!(
            "raw T rejected for 32 gammas: {all_rejected}; effect spectrum dev from {{0,2}} {spectrum_dev:.2e}; min Choi eigenvalue {min_choi:.2e}; witness defect {defect:.3e} (oracle {oracle:.3e}, needs > 0.05)"
        ),
    };

    // Lifted witness: T acts on the second factor of a qubit pair, inputs
    // |0><0| ⊗ |u><u| and |1><1| ⊗ |+><+|. Exact defect 1/6.
    let lifted_t = kron(&ComplexMatrix::identity(2), &t0);
    let dims = DimensionSpec::from_pairs(&[("ancilla", 2), ("shifter", 2)]).unwrap();
    let zero = c(0.0, 0.0);
    let h = c(FRAC_1_SQRT_2, 0.0);
    let a = PureState::new(dims.clone(), vec![c(1.0, 0.0), zero, zero, zero]).unwrap().to_density();
    let b = PureState::new(dims, vec![zero, zero, h, h]).unwrap().to_density();
    let lifted = linearity_test(&lifted_t, &a, &b, 0.5).unwrap();
    let supplementary = Line {
        id: 3,
        pass: lifted > 0.05 && (lifted - 1.0 / 6.0).abs() < 1e-12,
        text: format!("(supplementary) lifted witness defect {lifted:.12} (exact 1/6), needs > 0.05"),
    };
    (main, supplementary)
}

fn criterion_4() -> Line {
    let mut dev = 0.0f64;
    let mut obstructed = true;
    let mut min_distance = f64::INFINITY;
    for gamma in grid(16) {
        let rep = run_epr_bohm(gamma).unwrap();
        dev = dev
            .max((rep.probabilities[keys::P_MINUS_WITH_T] - 1.0).abs())
            .max((rep.probabilities[keys::P_MINUS_WITHOUT_T] - 0.5).abs());
        let report = marginal_obstruction(&TargetTransform::new(singlet(), epr_factorized(gamma)).unwrap()).unwrap();
        obstructed &= !report.achievable_deterministically;
        min_distance = min_distance.min(report.marginal_distance);
    }
    Line {
        id: 4,
        pass: dev <= 1e-10 && obstructed,
        text: format!(
            "P(sigma.d=-1) is 1 with T and 1/2 without over 16 gammas: max dev {dev:.2e}; obstruction reported for all: {obstructed} (min marginal distance {min_distance:.3})"
        ),
    }
}

fn criterion_5() -> Line {
    let half = ComplexMatrix::identity(2).scale_real(0.5);
    let mut marginal = 0.0f64;
    let mut stats = 0.0f64;
    for gamma in grid(16) {
        let rep = run_stern_gerlach(gamma).unwrap();
        marginal = marginal.max(rep.marginals["spin1_after"].matrix().max_abs_diff(&half));
        // The singlet gives 1/2 for every outcome along x, y and z.
        for axis in ["x", "y", "z"] {
            for sign in ["+1", "-1"] {
                stats = stats.max((rep.probabilities[&format!("{axis}:{sign}")] - 0.5).abs());
            }
        }
    }
    Line {
        id: 5,
        pass: marginal <= 1e-10 && stats <= 1e-10,
        text: format!(
            "particle-1 marginal stays I/2 over 16 gammas: max dev {marginal:.2e}; x/y/z statistics match the singlet: max dev {stats:.2e}"
        ),
    }
}

fn criterion_6() -> Line {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for (dx, dy) in [(2, 2), (2, 3), (4, 2)] {
        let dims = DimensionSpec::from_pairs(&[("X", dx), ("Y", dy)]).unwrap();
        let w = fuzz_no_signaling(20240, 1000, &dims).unwrap();
        parts.push(format!("{dx}x{dy}: {w:.2e}"));
        worst = worst.max(w);
    }
    let secs = start.elapsed().as_secs_f64();
    Line {
        id: 6,
        pass: worst <= 1e-9 && secs <= 30.0,
        text: format!("1000 random trials per system, worst marginal distance [{}]; {secs:.2} s", parts.join(", ")),
    }
}

fn criterion_7() -> Line {
    let rep = run_erasure(&z_basis(), None).unwrap();
    // Independent recomputation through the selective branches.
    let rho = singlet().to_density();
    let before = rho.reduced(&[SPIN1]).unwrap();
    let mut mix = ComplexMatrix::zeros(2, 2);
    for p in z_basis() {
        let branch = KrausChannel::from_raw(ChannelKind::Probabilistic, vec![p]).unwrap();
        let (post, prob) = apply_selective(&branch, &rho, SPIN2).unwrap();
        mix = &mix + &post.reduced(&[SPIN1]).unwrap().matrix().scale_real(prob);
    }
    let recon = mix.max_abs_diff(before.matrix()).max(rep.metrics["reconciliation_distance"]);
    let nonsel = rep.metrics["nonselective_shift"];
    Line {
        id: 7,
        pass: recon <= 1e-10 && nonsel <= 1e-10,
        text: format!("z-basis on the singlet: weighted conditionals vs marginal {recon:.2e}; non-selective shift {nonsel:.2e}"),
    }
}

fn criterion_8() -> Line {
    let mut valid = true;
    let mut shift = 0.0f64;
    for gamma in grid(8) {
        let ch = complete_to_deterministic(&greenberger_t(gamma).scaled_kraus()).unwrap();
        valid &= validate_channel(&ch).is_valid_for(ChannelKind::Deterministic);
        for alpha in grid(8) {
            for beta in grid(8) {
                let rho = greenberger_predetector(alpha, beta).to_density();
                let after = apply_deterministic(&ch, &rho, SHIFTER).unwrap();
                let d = rho
                    .reduced(&[PHOTON1, PHOTON2])
                    .unwrap()
                    .distance(&after.reduced(&[PHOTON1, PHOTON2]).unwrap())
                    .unwrap();
                shift = shift.max(d);
            }
        }
    }
    Line {
        id: 8,
        pass: valid && shift <= 1e-9,
        text: format!(
            "completion {{T/sqrt2, B}} valid for 8 gammas: {valid}; photon marginal shift over 8x8 (alpha, beta) {shift:.2e}"
        ),
    }
}

fn criterion_9() -> Line {
    let mut worst = 0.0f64;
    for alpha in grid(8) {
        for beta in grid(8) {
            let out = propagate_network(&reference_network(alpha, beta), &reference_input()).unwrap();
            let target = greenberger_predetector(alpha, beta);
            worst = worst.max(phase_aligned_deviation(out.amplitudes(), target.amplitudes()));
        }
    }
    Line {
        id: 9,
        pass: worst <= 1e-10,
        text: format!("reference network output vs pre-detector state over 8x8 (alpha, beta): max dev {worst:.2e}"),
    }
}

fn main() -> ExitCode {
    let (c3, c3_lifted) = criterion_3();
    let lines = vec![
        criterion_1(),
        criterion_2(),
        c3,
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
    ];
    println!("acceptance:");
    let mut unexpected = Vec::new();
    for l in lines.iter().chain(std::iter::once(&c3_lifted)) {
        let mark = if l.pass { "PASS" } else { "FAIL" };
        let known = if !l.pass && KNOWN_RED.contains(&l.id) { " [known red]" } else { "" };
        println!("  criterion {} {mark}{known}: {}", l.id, l.text);
        if !l.pass && !KNOWN_RED.contains(&l.id) {
            unexpected.push(l.id);
        }
    }
    if !c3_lifted.pass {
        unexpected.push(3);
    }
    let passed = lines.iter().filter(|l| l.pass).count();
    println!("  {passed}/{} criteria pass", lines.len());
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("  unexpected failures: {unexpected:?}");
        ExitCode::FAILURE
    }
}
