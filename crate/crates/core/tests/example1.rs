use warpcurv::recurrence::{StructureKind, Verdict};
use warpcurv::symexpr::DEFAULT_SEED;
use warpcurv::theorems::example1::{golden_values, psi_cases, psi_case, run};

#[test]
fn golden_values_are_proved() {
    for g in golden_values() {
        assert_eq!(g.verdict, "ProvedZero", "{g:?}");
    }
}

#[test]
fn psi_family_members_are_sgk() {
    for psi in psi_cases(DEFAULT_SEED) {
        let c = psi_case(&psi, 16, DEFAULT_SEED).unwrap();
        println!("{c:?}");
        assert_ne!(c.symbolic, "NonZero", "{c:?}");
        assert!(c.max_residual < 1e-12, "{c:?}");
        assert!(c.max_form_gap < 1e-12, "{c:?}");
    }
}

#[test]
fn full_suite() {
    let t = std::time::Instant::now();
    let rep = run(16, DEFAULT_SEED).unwrap();
    println!("elapsed {:?}", t.elapsed());
    for d in &rep.discrepancies {
        println!("{d:?}");
    }
    println!("{:?}", rep.base_recurrence);
    assert!(rep.ok());
    assert_eq!(rep.classification.verdict(StructureKind::HGK), Some(Verdict::Fails));
    let q: Vec<&str> = rep.discrepancies.iter().map(|d| d.quantity.as_str()).collect();
    for want in ["S̄_11", "S̄_22", "condition 2(i)", "condition 4(ii)"] {
        assert!(q.contains(&want), "{want} missing from {q:?}");
    }
}
