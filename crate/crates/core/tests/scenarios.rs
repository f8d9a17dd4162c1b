use aon_teleport::harness::{check_voting_rules, run_scenario, tally_votes, ScenarioConfig, Tally};
use aon_teleport::oracle::{generic_inputs, WithheldModel};
use aon_teleport::protocol::{InputQubit, MeasureChoice, Teleportation};
use aon_teleport::{BellOutcome, ChannelKind, Error, OutcomePolicy, RunStatus};

fn bits(s: &str) -> Vec<bool> {
    s.chars().map(|c| c == '1').collect()
}

#[test]
fn seeded_vote_run() {
    let cfg = ScenarioConfig::<f64>::new(3, ChannelKind::Entangled, OutcomePolicy::Seeded(7)).with_votes(bits("011"));
    let r = run_scenario(&cfg).unwrap();
    assert!(r.is_complete());
    assert!((r.joint_fidelity.unwrap() - 1.0).abs() < 1e-10);
    assert_eq!(r.tally, Some(Tally { yes: 2, no: 1 }));
}

#[test]
fn cascade_only_after_every_broadcast() {
    for kind in [ChannelKind::Entangled, ChannelKind::Product] {
        for mask in 1u32..8 {
            for model in WithheldModel::ALL {
                let withheld: Vec<usize> = (1..=3).filter(|i| mask & (1 << (i - 1)) == 0).collect();
                let cfg = ScenarioConfig::<f64>::new(3, kind, OutcomePolicy::Seeded(mask as u64))
                    .withholding(&withheld)
                    .with_withheld_model(model);
                let r = run_scenario(&cfg).unwrap();
                let complete = r.bus.is_complete(3);
                assert_eq!(complete, withheld.is_empty());
                assert_eq!(r.transcript.cascade_applied, complete && kind == ChannelKind::Entangled);
                assert_eq!(r.bus.messages().len(), 3 - withheld.len());
                if !complete {
                    assert_eq!(r.transcript.status, RunStatus::Withheld { senders: withheld.clone() });
                }
            }
        }
    }
}

#[test]
fn entangled_withholding_spoils_every_qubit() {
    let cfg = ScenarioConfig::<f64>::new(3, ChannelKind::Entangled, OutcomePolicy::Seeded(5)).withholding(&[2]);
    let r = run_scenario(&cfg).unwrap();
    assert!(r.joint_fidelity.unwrap() < 0.99);
    let a = r.withheld.unwrap();
    assert!(a.joint_fidelity_uncorrected < 0.99);
    // even participants' own qubits are not recovered
    assert!(a.per_qubit_fidelity_corrected.iter().all(|&f| f < 1.0 - 1e-6), "{:?}", a.per_qubit_fidelity_corrected);
}

#[test]
fn product_baseline_recovers_participants() {
    let cfg = ScenarioConfig::<f64>::new(3, ChannelKind::Product, OutcomePolicy::Seeded(5)).withholding(&[2]);
    let a = run_scenario(&cfg).unwrap().withheld.unwrap();
    let fids = a.participant_fidelities();
    assert_eq!(fids.iter().map(|p| p.0).collect::<Vec<_>>(), [1, 3]);
    assert!(fids.iter().all(|p| (p.1 - 1.0).abs() < 1e-10));
}

#[test]
fn vote_conservation_over_all_tuples() {
    for votes in ["0000", "1111", "0110", "1011"] {
        let v = bits(votes);
        let yes = v.iter().filter(|&&b| b).count();
        for k in 0..256 {
            let cfg = ScenarioConfig::<f64>::new(
                4,
                ChannelKind::Entangled,
                OutcomePolicy::Forced(BellOutcome::tuple_from_index(k, 4)),
            )
            .with_votes(v.clone());
            let tally = run_scenario(&cfg).unwrap().tally.unwrap();
            assert_eq!(tally, Tally { yes, no: 4 - yes }, "votes {votes} tuple {k}");
        }
    }
}

#[test]
fn tally_examples() {
    let inputs: Vec<InputQubit<f64>> = bits("011").into_iter().map(InputQubit::basis).collect();
    let t = Teleportation::new(&inputs, ChannelKind::Entangled).unwrap().run(&OutcomePolicy::Seeded(3)).unwrap();
    assert_eq!(tally_votes(&t).unwrap(), Tally { yes: 2, no: 1 });
    let mut incomplete = t.clone();
    incomplete.final_state = None;
    assert!(matches!(tally_votes(&incomplete), Err(Error::ProtocolIncomplete(_))));
}

#[test]
fn voting_rule_checks() {
    for votes in ["01", "10"] {
        let cfg = ScenarioConfig::<f64>::new(2, ChannelKind::Entangled, OutcomePolicy::Seeded(1)).with_votes(bits(votes));
        let checks = check_voting_rules(&cfg).unwrap();
        assert_eq!(checks.iter().map(|c| c.rule).collect::<Vec<_>>(), [2, 3, 4]);
        assert!(checks.iter().all(|c| c.passed), "{checks:?}");
    }
    let generic = ScenarioConfig::<f64>::new(3, ChannelKind::Entangled, OutcomePolicy::Seeded(1));
    assert!(check_voting_rules(&generic).unwrap().iter().all(|c| c.passed));
}

#[test]
fn measured_pair_factors_out() {
    let inputs = generic_inputs::<f64>(3, 17);
    let tele = Teleportation::new(&inputs, ChannelKind::Entangled).unwrap();
    for i in 1..=3 {
        for o in BellOutcome::ALL {
            let (_, post) = tele.joint().state().bell_project_keep(i, 3 + i, o).unwrap();
            let purity = post.unwrap().reduced_density(&[i, 3 + i]).unwrap().purity();
            assert!((purity - 1.0).abs() < 1e-10);
        }
        let mut reg = tele.joint().clone();
        reg.sender_measure(i, MeasureChoice::Forced(BellOutcome::PsiMinus)).unwrap();
        assert!(matches!(reg.sender_measure(i, MeasureChoice::Forced(BellOutcome::PsiMinus)), Err(Error::State(_))));
    }
}
