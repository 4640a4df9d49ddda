use realstrata::detector::*;
use realstrata::lattices::{
    disc_involutions, polarized_disc, BinaryLattice, DiscAutomorphism, PolarizedForm, RootSpec,
};
use realstrata::nikulin::{
    embeds_into_big_l, genus_tilde_nonempty, EmbeddingObstruction, EmbeddingProfile,
};
use realstrata::oracle::{revalidate_witness, DEFAULT_CUTOFF};
use realstrata::{Error, FiniteQuadraticForm};

fn pf(spec: &str, h2: i64) -> PolarizedForm {
    polarized_disc(&spec.parse().unwrap(), h2).unwrap()
}

fn report(model: Model, spec: &str, threads: Option<usize>) -> DetectionReport {
    let options = DetectOptions {
        threads,
        ..DetectOptions::default()
    };
    detect(model, &spec.parse().unwrap(), &options).unwrap()
}

#[test]
fn candidate_examples() {
    let d7 = pf("D7+A6+A3+A2", 4);
    let two: Vec<_> = kernel_candidates(&d7, 2);
    assert_eq!(two.len(), 1);
    assert_eq!((two[0].n, two[0].kappa.is_zero()), (2, true));

    let sextic = pf("A7+A6+A5", 2);
    assert!(kernel_candidates(&sextic, 8).iter().all(|c| c.n == 2));

    let a_squares = enumerate_a_squares(&d7);
    assert_eq!(a_squares, vec![2, 4, 6, 8, 12, 14, 24, 28, 42, 56, 84, 168]);
    let a7 = pf("A7+A6+A3+A2", 4);
    assert_eq!(*enumerate_a_squares(&a7).last().unwrap(), 336);
}

#[test]
fn candidates_are_closed_under_negation() {
    let a7 = pf("A7+A6+A3+A2", 4);
    for a2 in enumerate_a_squares(&a7) {
        let cands = kernel_candidates(&a7, a2);
        for c in &cands {
            let neg = a7.form.neg(&c.kappa);
            assert!(cands.iter().any(|d| d.n == c.n && d.kappa == neg));
        }
    }
}

#[test]
fn check_candidate_reasons() {
    let d7 = pf("D7+A6+A3+A2", 4);
    let kappa = d7.form.element(&[1, 0, 1, 0, 1]).unwrap();
    let cand = KernelCandidate::new(&d7, 4, 1, kappa).unwrap();
    let minus = DiscAutomorphism::scalar(d7.form.rank(), -1).reduced(&d7.form);
    assert_eq!(
        check_candidate(&d7, &cand, &minus).unwrap(),
        InvolutionCheck::Fails(FailureReason::NoInvolutionCond3)
    );
    let id = DiscAutomorphism::identity(d7.form.rank());
    assert_eq!(
        check_candidate(&d7, &cand, &id).unwrap(),
        InvolutionCheck::Fails(FailureReason::NoInvolutionCond2)
    );
    for phi in disc_involutions(&d7).unwrap() {
        assert_ne!(
            check_candidate(&d7, &cand, &phi).unwrap(),
            InvolutionCheck::Passes
        );
    }
}

#[test]
fn invalid_candidates_rejected() {
    let d7 = pf("D7+A6+A3+A2", 4);
    let wrong_order = d7.form.element(&[2, 0, 0, 0, 0]).unwrap();
    assert!(matches!(
        KernelCandidate::new(&d7, 4, 1, wrong_order),
        Err(Error::BadKappa(_))
    ));
    assert!(KernelCandidate::new(&d7, 3, 1, d7.form.zero()).is_err());
    assert!(KernelCandidate::new(&d7, 4, 3, d7.form.zero()).is_err());
}

#[test]
fn genus_examples() {
    let d7 = pf("D7+A6+A3+A2", 4);
    let c = KernelCandidate::new(&d7, 2, 2, d7.form.zero()).unwrap();
    assert!(!genus_tilde_nonempty(&d7, &c).unwrap());
    for c in kernel_candidates(&d7, 4).into_iter().filter(|c| c.n == 2) {
        assert!(!genus_tilde_nonempty(&d7, &c).unwrap());
    }
    let a1 = pf("A1", 4);
    let c = KernelCandidate::new(&a1, 2, 2, a1.form.zero()).unwrap();
    assert!(genus_tilde_nonempty(&a1, &c).unwrap());
}

#[test]
fn embedding_examples() {
    let node = FiniteQuadraticForm::cyclic(-1, 2)
        .unwrap()
        .direct_sum(&FiniteQuadraticForm::cyclic(1, 4).unwrap());
    assert!(
        embeds_into_big_l(&EmbeddingProfile::new(1, 1, node))
            .unwrap()
            .embeds
    );
    let u = FiniteQuadraticForm::u_block(1).unwrap();
    let long = u.direct_sum(&u);
    let v = embeds_into_big_l(&EmbeddingProfile::new(2, 18, long)).unwrap();
    assert_eq!(v.obstruction, Some(EmbeddingObstruction::Length));
    let three = u.direct_sum(&FiniteQuadraticForm::cyclic(1, 2).unwrap());
    let v = embeds_into_big_l(&EmbeddingProfile::new(2, 18, three)).unwrap();
    assert!(!v.embeds);
    let v =
        embeds_into_big_l(&EmbeddingProfile::new(4, 1, FiniteQuadraticForm::trivial())).unwrap();
    assert_eq!(v.obstruction, Some(EmbeddingObstruction::Signature));
}

#[test]
fn headline_strata_have_no_real_representative() {
    for (model, spec) in [
        (Model::Quartic, "A7+A6+A3+A2"),
        (Model::Quartic, "D7+A6+A3+A2"),
        (Model::Sextic, "A7+A6+A5"),
    ] {
        let r = report(model, spec, None);
        assert_eq!(r.verdict, Verdict::NoneExists, "{spec}");
        assert_eq!(r.conclusiveness_basis, Some(Basis::Corlem2));
        assert!(r.witness.is_none());
    }
}

#[test]
fn small_strata_have_valid_witnesses() {
    for spec in ["A1", "2A1", "A2", "", "D4", "E8"] {
        let r = report(Model::Quartic, spec, None);
        assert_eq!(r.verdict, Verdict::WitnessFound, "{spec}");
        assert_eq!(r.conclusiveness_basis, Some(Basis::Corlem1));
        let witness = r.witness.unwrap();
        assert!(
            revalidate_witness(&pf(spec, 4), &witness, DEFAULT_CUTOFF).unwrap(),
            "{spec}"
        );
        if let Witness::Kernel {
            a_square,
            n,
            kappa,
            phi,
        } = &witness
        {
            // the negated kappa is a witness for the same involution
            let p = pf(spec, 4);
            let neg = KernelCandidate::new(&p, *a_square, *n, p.form.neg(kappa)).unwrap();
            assert_eq!(
                check_candidate(&p, &neg, phi).unwrap(),
                InvolutionCheck::Passes
            );
        }
    }
    let a1 = report(Model::Quartic, "A1", None);
    match a1.witness {
        Some(Witness::Kernel { a_square, n, .. }) => assert_eq!((a_square, n), (2, 1)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn traces_do_not_depend_on_threads() {
    let one = report(Model::Quartic, "A7+A6+A3+A2", Some(1));
    let four = report(Model::Quartic, "A7+A6+A3+A2", Some(4));
    assert_eq!(one.trace, four.trace);
    let again = report(Model::Quartic, "A7+A6+A3+A2", None);
    assert_eq!(one.trace, again.trace);
}

#[test]
fn rank_dispatch() {
    let spec: RootSpec = "E8+E8+A2+A1".parse().unwrap();
    let r = detect(Model::Sextic, &spec, &DetectOptions::default()).unwrap();
    assert_eq!(r.verdict, Verdict::NeedsTGram);
    let options = DetectOptions {
        t_gram: Some("2,0,6".parse::<BinaryLattice>().unwrap()),
        threads: None,
    };
    let r = detect(Model::Sextic, &spec, &options).unwrap();
    assert_eq!(r.verdict, Verdict::WitnessFound);
    assert_eq!(r.conclusiveness_basis, Some(Basis::RankT2));

    let too_big: RootSpec = "E8+E8+A4".parse().unwrap();
    assert!(matches!(
        detect(Model::Quartic, &too_big, &DetectOptions::default()),
        Err(Error::RankTooLarge(20))
    ));
}

#[test]
fn special_strata_are_rejected() {
    // ℓ_2 = 20 exceeds the corank 2 of S_h
    let spec: RootSpec = "19A1".parse().unwrap();
    assert!(matches!(
        detect(Model::Quartic, &spec, &DetectOptions::default()),
        Err(Error::NotNonspecial(_))
    ));
    assert!(check_nonspecial(&pf("A1", 4)).is_ok());
}

#[test]
fn report_serializes() {
    let r = report(Model::Quartic, "A1", None);
    let json = serde_json::to_value(&r).unwrap();
    assert_eq!(json["verdict"], "witness_found");
    assert_eq!(json["conclusiveness_basis"], "corlem1");
    assert_eq!(json["model"], "quartic");
    assert_eq!(json["spec"], "A1");
}

#[test]
fn cross_check_confirms_reports() {
    for (model, spec) in [
        (Model::Sextic, "A7+A6+A5"),
        (Model::Quartic, "A1"),
        (Model::Quartic, "2A1"),
    ] {
        let check = realstrata::oracle::cross_check(&report(model, spec, None)).unwrap();
        assert!(check.agrees(), "{spec}: {check:?}");
        assert_eq!(check.trace_exhaustive, Some(true));
    }
    let spec: RootSpec = "E8+E8+A2+A1".parse().unwrap();
    let options = DetectOptions {
        t_gram: Some("2,0,6".parse().unwrap()),
        threads: None,
    };
    let r = detect(Model::Sextic, &spec, &options).unwrap();
    let check = realstrata::oracle::cross_check(&r).unwrap();
    assert_eq!(
        (check.trace_exhaustive, check.witness_revalidated),
        (None, None)
    );
}
