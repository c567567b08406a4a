mod common;

use std::collections::BTreeMap;

use common::lfp::*;
use prooflab::logic::*;
use prooflab::resolution::{horn_refute, kres_refutes};

fn subformulas<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
    out.push(f);
    match f {
        Formula::And(x, y) | Formula::Or(x, y) => {
            subformulas(x, out);
            subformulas(y, out);
        }
        Formula::Exists(_, x) | Formula::Forall(_, x) => subformulas(x, out),
        Formula::Lfp { body, .. } => subformulas(body, out),
        _ => {}
    }
}

// -------------------------------------------------------------- tests ----

#[test]
fn evaluator_matches_stage_table() {
    let mut truth = [0, 0];
    for (a, phi) in corpus(41, 300, false) {
        let want = oracle(&a, phi.root(), &BTreeMap::new(), &Stages::new());
        assert_eq!(eval_poslfp(&a, &phi).unwrap(), want, "{phi}");
        truth[want as usize] += 1;
    }
    assert!(truth[0] > 30 && truth[1] > 30, "{truth:?}");
}

#[test]
fn horn_encoding_decides_model_checking() {
    for (a, phi) in corpus(42, 300, false) {
        let h = horn_encode(&a, &phi).unwrap();
        assert!(h.cnf.is_horn());
        assert_eq!(horn_refute(&h.cnf).unwrap().refuted, eval_poslfp(&a, &phi).unwrap(), "{phi}");
    }
}

#[test]
fn existential_encodings_have_width_three() {
    for (a, phi) in corpus(43, 200, true) {
        assert!(phi.is_efp0());
        let h = horn_encode(&a, &phi).unwrap();
        assert!(h.cnf.max_width() <= 3, "{phi}");
        let truth = eval_poslfp(&a, &phi).unwrap();
        assert_eq!(kres_refutes(&h.cnf, 3, None).unwrap(), truth, "{phi}");
    }
}

#[test]
fn encoding_size_is_polynomial() {
    for (a, phi) in corpus(44, 200, false) {
        let h = horn_encode(&a, &phi).unwrap();
        let mut subs = Vec::new();
        subformulas(phi.root(), &mut subs);
        // one variable per subformula instance; lfp bodies range over their parameters
        let mut bound = 0usize;
        for f in subs {
            let k = match f {
                Formula::Lfp { params, .. } => f.free_vars().len().max(params.len()),
                _ => f.free_vars().len(),
            };
            bound += (a.n as usize).pow(k as u32 + 1);
        }
        assert!((h.cnf.num_vars as usize) <= bound, "{} > {bound}", h.cnf.num_vars);
        assert_eq!(h.var_map.len() as u32, h.cnf.num_vars);
    }
}

#[test]
fn reachability_examples() {
    let mut a = RelStructure::new(4);
    for (x, y) in [(0, 1), (1, 2), (3, 0)] {
        a.add_tuple("E", &[x, y]).unwrap();
    }
    let reach = "(lfp R (x) (or (= x s) (exists y (and (R y) (E y x)))) t)";
    for (s, t) in [(0u32, 2u32), (0, 3), (3, 2), (2, 0), (1, 1)] {
        let c: BTreeMap<String, u32> = [("s".to_string(), s), ("t".to_string(), t)].into();
        let phi = LfpFormula::parse(reach, &c).unwrap();
        let want = oracle(&a, phi.root(), &BTreeMap::new(), &Stages::new());
        assert_eq!(want, s == t || (s == 3) || (s == 0 && t <= 2) || (s == 1 && t == 2));
        assert_eq!(eval_poslfp(&a, &phi).unwrap(), want);
        assert_eq!(horn_refute(&horn_encode(&a, &phi).unwrap().cnf).unwrap().refuted, want);
    }
}

#[test]
fn rejects_ill_formed_sentences() {
    let none = BTreeMap::new();
    for bad in [
        "(P x)",
        "(lfp R (x) (and (P x) (P y)) 0)",
        "(lfp R (x) (P x) 0 1)",
        "(and (lfp R (x) (P x) 0) (lfp R (x) (P x) 0))",
        "(lfp R (x) (not (R x)) 0)",
        "(and (P 0) (lfp P (x) (P x) 0))",
        "(exists x",
    ] {
        assert!(LfpFormula::parse(bad, &none).is_err(), "{bad}");
    }
}
