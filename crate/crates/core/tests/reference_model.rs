//! Library pipeline against the contraction model in `common`.

mod common;

use aon_teleport::channel::{build_entangled_channel, build_product_channel};
use aon_teleport::oracle::generic_inputs;
use aon_teleport::protocol::{JointRegister, MeasureChoice, Teleportation};
use aon_teleport::{BellOutcome, ChannelKind};
use num_complex::Complex64 as C;

fn max_diff(a: &[C], b: &[C]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

#[test]
fn channels_match_partner_rule() {
    for n in 1..=6 {
        for entangled in [false, true] {
            let s = if entangled && n > 1 { build_entangled_channel::<f64>(n) } else { build_product_channel(n) }.unwrap();
            let amp = (0.5f64).powf(n as f64 / 2.0);
            for (idx, a) in s.amplitudes().iter().enumerate() {
                let (c, r) = (idx >> n, idx & ((1 << n) - 1));
                let want = if common::partner(c, entangled && n > 1) == r { amp } else { 0.0 };
                assert!((a - C::new(want, 0.0)).norm() < 1e-14, "n={n} {idx:b}");
            }
        }
    }
}

#[test]
fn measured_branches_match_contraction() {
    for n in 1..=4 {
        for kind in [ChannelKind::Product, ChannelKind::Entangled] {
            let inputs = generic_inputs::<f64>(n, 40 + n as u64);
            let pairs = common::as_pairs(&inputs);
            let tele = Teleportation::new(&inputs, kind).unwrap();
            let entangled = tele.layout().kind() == ChannelKind::Entangled;
            for k in 0..1usize << (2 * n) {
                let idx = common::tuple(k, n);
                let mut reg: JointRegister<f64> = tele.joint().clone();
                let mut p = 1.0;
                for (i, &o) in idx.iter().enumerate() {
                    let m = reg.sender_measure(i + 1, MeasureChoice::Forced(BellOutcome::ALL[o])).unwrap();
                    p *= m.probability;
                }
                let branch = common::receiver_branch(&pairs, &idx, entangled);
                assert!((p - common::norm_sqr(&branch)).abs() < 1e-14);
                let lib = reg.into_receiver_state().unwrap();
                assert!(max_diff(lib.amplitudes(), &common::normalized(&branch)) < 1e-13, "n={n} k={k}");
            }
        }
    }
}

#[test]
fn corrected_states_match_reference_pipeline() {
    for n in 1..=4 {
        let inputs = generic_inputs::<f64>(n, 60 + n as u64);
        let pairs = common::as_pairs(&inputs);
        let tele = Teleportation::new(&inputs, ChannelKind::Entangled).unwrap();
        for k in 0..1usize << (2 * n) {
            let t = tele.run_forced(&BellOutcome::tuple_from_index(k, n)).unwrap();
            let (p, s) = common::reference_run(&pairs, &common::tuple(k, n), n > 1);
            assert!((t.outcome_probability - p).abs() < 1e-14);
            // same operations in the same order, so even the global phase agrees
            assert!(max_diff(t.final_state.as_ref().unwrap().amplitudes(), &s) < 1e-13);
            assert!((common::fidelity(&s, &common::product(&pairs)) - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn cascade_matches_parity_flip() {
    let inputs = generic_inputs::<f64>(4, 3);
    let pairs = common::as_pairs(&inputs);
    let s = aon_teleport::protocol::target_state(&inputs).unwrap();
    let lib = aon_teleport::protocol::receiver_cnot_cascade(&s).unwrap();
    assert!(max_diff(lib.amplitudes(), &common::cascade(&common::product(&pairs))) < 1e-15);
}

#[test]
fn without_cascade_entangled_branches_are_not_the_target() {
    // skipping the cascade leaves the receiver with the wrong state on some branch
    let inputs = generic_inputs::<f64>(2, 5);
    let pairs = common::as_pairs(&inputs);
    let target = common::product(&pairs);
    let worst = (0..16)
        .map(|k| {
            let idx = common::tuple(k, 2);
            let mut s = common::normalized(&common::receiver_branch(&pairs, &idx, true));
            for (i, &o) in idx.iter().enumerate() {
                s = common::pauli(&s, i + 1, common::correction_letter(o));
            }
            common::fidelity(&s, &target)
        })
        .fold(1.0, f64::min);
    assert!(worst < 0.99, "{worst}");
}
