use proptest::prelude::*;

use crate::formula::Formula;

/// Random formulas over variables `0..nvars`, every connective represented.
pub(crate) fn arb_formula(nvars: usize) -> impl Strategy<Value = Formula> {
    let leaf = (0..nvars).prop_map(Formula::Var);
    leaf.prop_recursive(5, 40, 4, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            prop::collection::vec(inner.clone(), 2..4).prop_map(Formula::And),
            prop::collection::vec(inner.clone(), 2..4).prop_map(Formula::Or),
            (inner.clone(), inner.clone()).prop_map(|(h, b)| Formula::implies(h, b)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::iff(l, r)),
            (inner.clone(), inner).prop_map(|(l, r)| Formula::xor(l, r)),
        ]
    })
}
