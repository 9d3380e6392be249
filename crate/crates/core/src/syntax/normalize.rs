use super::Term;

/// Rewrites `g_i(f_i(u)) -> u` bottom-up until no redex remains.
///
/// Since `f_i` is injective and `g_i` is its left inverse this is sound in
/// every model. Normal forms have one of the shapes
/// `v | 0 | f_i(v0) | f_i(0) | g_i(vi) | f_j(g_i(vi))`.
pub fn normalize_term(t: &Term) -> Term {
    match t {
        Term::Zero | Term::Var(_) => t.clone(),
        Term::F(i, arg) => Term::f(*i, normalize_term(arg)),
        Term::G(i, arg) => match normalize_term(arg) {
            Term::F(j, inner) if j == *i => *inner,
            other => Term::g(*i, other),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{Sort, Var};
    use proptest::prelude::*;

    fn x() -> Term {
        Term::var("x", Sort(0))
    }
    fn y() -> Term {
        Term::var("y", Sort(1))
    }

    #[test]
    fn retraction_identities() {
        assert_eq!(normalize_term(&Term::g(1, Term::f(1, x()))), x());
        assert_eq!(
            normalize_term(&Term::g(2, Term::f(2, Term::g(1, y())))),
            Term::g(1, y())
        );
        assert_eq!(
            normalize_term(&Term::f(1, Term::g(1, Term::f(1, Term::Zero)))),
            Term::f(1, Term::Zero)
        );
        // f_i(g_i(v)) is not a redex: v need not lie in the image
        let fg = Term::f(1, Term::g(1, y()));
        assert_eq!(normalize_term(&fg), fg);
    }

    /// Well-sorted random terms of a requested sort for `n = 3`.
    pub(crate) fn arb_term(sort: usize, depth: u32) -> BoxedStrategy<Term> {
        let leaf = if sort == 0 {
            prop_oneof![
                Just(Term::Zero),
                Just(Term::Var(Var::new("x", Sort(0)))),
                Just(Term::Var(Var::new("x0", Sort(0))))
            ]
            .boxed()
        } else {
            Just(Term::Var(Var::new(format!("y{sort}"), Sort(sort)))).boxed()
        };
        if depth == 0 {
            return leaf;
        }
        if sort == 0 {
            prop_oneof![
                leaf,
                (1usize..=3).prop_flat_map(move |i| arb_term(i, depth - 1).prop_map(move |t| Term::g(i, t)))
            ]
            .boxed()
        } else {
            prop_oneof![leaf, arb_term(0, depth - 1).prop_map(move |t| Term::f(sort, t))].boxed()
        }
    }

    fn is_normal_shape(t: &Term) -> bool {
        match t {
            Term::Zero | Term::Var(_) => true,
            Term::F(_, a) => matches!(**a, Term::Zero | Term::Var(_)) || matches!(&**a, Term::G(_, v) if matches!(**v, Term::Var(_))),
            Term::G(_, a) => matches!(**a, Term::Var(_)),
        }
    }

    proptest! {
        #[test]
        fn normalization_is_idempotent_and_sort_preserving(s in 0usize..=3, t in (0usize..=3).prop_flat_map(|s| arb_term(s, 4))) {
            let _ = s;
            let nf = normalize_term(&t);
            prop_assert_eq!(normalize_term(&nf), nf.clone());
            prop_assert_eq!(nf.sort(), t.sort());
            prop_assert!(nf.check(3).is_ok());
            prop_assert!(is_normal_shape(&nf), "not a normal shape: {}", nf);
        }
    }
}
