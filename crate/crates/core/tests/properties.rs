//! Property tests over seeded random policies. proptest drives the seeds;
//! the shared generators build the policies.

mod common;

use common::*;
use frost::circuit::{compile_policy, deserialize_circuit, eval_circuit, serialize_circuit, RailAssignment};
use frost::decision::{knowledge_join, Decision};
use frost::delegation::join_policy;
use frost::parser::{self, pretty_print};
use proptest::prelude::*;
use rand::Rng;

fn decision() -> impl Strategy<Value = Decision> {
    prop::sample::select(Decision::ALL.to_vec())
}

fn doc_for(seed: u64) -> frost::ast::PolicyDocument {
    let mut rng = rng(seed);
    let n = rng.random_range(1..=4);
    let pool = atom_pool(&mut rng, n);
    random_document(&mut rng, &pool)
}


proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn print_then_parse_is_identity(seed in any::<u64>()) {
        let doc = doc_for(seed);
        let text = pretty_print(&doc);
        let back = parser::load(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(pretty_print(&back), text);
    }

    #[test]
    fn circuit_agrees_with_interpreter(seed in any::<u64>()) {
        let doc = doc_for(seed);
        let top = doc.get("top").unwrap();
        let c = compile_policy(top, &doc).unwrap();
        let atoms = c.table().atoms().to_vec();
        let mut mine = Vec::new();
        atoms_of(top, &doc, &mut mine);
        prop_assert_eq!(atoms.len(), mine.len());
        for v in assignments(atoms.len(), false) {
            let circuit = eval_circuit(&c, &RailAssignment::from_kleene(v.iter().copied())).unwrap();
            prop_assert_eq!(circuit, interp(top, &doc, &atoms, &v), "values {:?}", v);
        }
    }

    #[test]
    fn circuit_text_round_trips(seed in any::<u64>()) {
        let doc = doc_for(seed);
        let c = compile_policy(doc.get("top").unwrap(), &doc).unwrap();
        let text = serialize_circuit(&c);
        let back = deserialize_circuit(&text).unwrap();
        prop_assert_eq!(serialize_circuit(&back), text);
        prop_assert_eq!(&back, &c);
    }

    #[test]
    fn knowledge_join_is_a_semilattice(a in decision(), b in decision(), c in decision()) {
        prop_assert_eq!(knowledge_join(a, b), knowledge_join(b, a));
        prop_assert_eq!(knowledge_join(a, a), a);
        prop_assert_eq!(knowledge_join(knowledge_join(a, b), c), knowledge_join(a, knowledge_join(b, c)));
        prop_assert_eq!(knowledge_join(a, Decision::Undef), a);
        prop_assert_eq!(knowledge_join(a, Decision::Conflict), Decision::Conflict);
    }

    #[test]
    fn join_policy_denotes_knowledge_join(l in decision(), r in decision()) {
        let doc = frost::ast::PolicyDocument::new()
            .with("L", frost::ast::Policy::literal(l))
            .with("R", frost::ast::Policy::literal(r));
        let j = join_policy(frost::ast::Policy::reference("L"), frost::ast::Policy::reference("R"));
        prop_assert_eq!(interp(&j, &doc, &[], &[]), knowledge_join(l, r));
    }
}
