use super::{Identity, OpId, Signature, Substitution, Term};
use crate::error::{Error, Result};

/// Robinson unification with occurs check. Returns an idempotent mgu.
pub fn syntactic_mgu(sigma: &[Identity]) -> Result<Substitution> {
    let mut stack: Vec<(Term, Term)> = sigma
        .iter()
        .map(|id| (id.lhs.clone(), id.rhs.clone()))
        .collect();
    let mut subst = Substitution::new();
    while let Some((s, t)) = stack.pop() {
        let s = subst.apply(&s);
        let t = subst.apply(&t);
        if s == t {
            continue;
        }
        match (s, t) {
            (Term::Var(v), other) | (other, Term::Var(v)) => {
                if other.occurs(&v) {
                    return Err(Error::NotUnifiable);
                }
                let single = Substitution::from_pairs([(v.clone(), other.clone())]);
                subst = single.compose(&subst);
                subst.insert(v, other);
            }
            (Term::App(f, xs), Term::App(g, ys)) => {
                if f != g || xs.len() != ys.len() {
                    return Err(Error::NotUnifiable);
                }
                stack.extend(xs.into_iter().zip(ys));
            }
        }
    }
    Ok(subst)
}

/// Operation ids of a Boolean signature.
#[derive(Clone, Copy, Debug)]
pub struct BooleanOps {
    pub meet: OpId,
    pub join: OpId,
    pub neg: OpId,
    pub zero: OpId,
    pub one: OpId,
}

impl BooleanOps {
    pub fn find(sig: &Signature) -> Result<Self> {
        let get = |s: &str, arity: usize| {
            sig.lookup(s)
                .filter(|&id| sig.arity(id) == arity)
                .ok_or_else(|| {
                    Error::SignatureMismatch(format!("Boolean signature lacks `{s}`/{arity}"))
                })
        };
        Ok(BooleanOps {
            meet: get("meet", 2)?,
            join: get("join", 2)?,
            neg: get("neg", 1)?,
            zero: get("zero", 0)?,
            one: get("one", 0)?,
        })
    }
}

/// Reproductive unifier of {φ ≈ ⊤} from a ground solution c: x -> ¬φ ∨ x
/// where c(x) = ⊤ and x -> φ ∧ x where c(x) = ⊥. Solutions with more ⊤ are
/// preferred, so when ⊤ solves φ every x maps to ¬φ ∨ x. For unsatisfiable φ
/// that form is returned as well and unifies nothing.
pub fn boolean_mgu(sig: &Signature, phi: &Term, vars: &[String]) -> Result<Substitution> {
    let ops = BooleanOps::find(sig)?;
    check_ops(phi, sig)?;
    for v in phi.vars() {
        if !vars.contains(&v) {
            return Err(Error::InvalidParam(format!(
                "variable `{v}` missing from X"
            )));
        }
    }
    if vars.len() >= 64 {
        return Err(Error::InvalidParam("too many variables".into()));
    }
    let full = (1u64 << vars.len()) - 1;
    // Scan points in decreasing order of the bit pattern, all-⊤ first.
    let solution = (0..=full).rev().find(|&bits| {
        let at = |v: &str| {
            let i = vars.iter().position(|w| w == v).expect("checked above");
            bits >> i & 1 == 1
        };
        eval_bool(&ops, phi, &at)
    });
    let bits = solution.unwrap_or(full);
    let neg_phi = Term::App(ops.neg, vec![phi.clone()]);
    Ok(Substitution::from_pairs(vars.iter().enumerate().map(
        |(i, x)| {
            let image = if bits >> i & 1 == 1 {
                Term::App(ops.join, vec![neg_phi.clone(), Term::var(x)])
            } else {
                Term::App(ops.meet, vec![phi.clone(), Term::var(x)])
            };
            (x.clone(), image)
        },
    )))
}

/// Value of `t` in the two-element Boolean algebra.
fn eval_bool(ops: &BooleanOps, t: &Term, at: &dyn Fn(&str) -> bool) -> bool {
    match t {
        Term::Var(v) => at(v),
        Term::App(op, args) => {
            let arg = |i: usize| eval_bool(ops, &args[i], at);
            match *op {
                o if o == ops.meet => arg(0) && arg(1),
                o if o == ops.join => arg(0) || arg(1),
                o if o == ops.neg => !arg(0),
                o if o == ops.one => true,
                _ => false,
            }
        }
    }
}

fn check_ops(t: &Term, sig: &Signature) -> Result<()> {
    match t {
        Term::Var(_) => Ok(()),
        Term::App(op, args) => {
            if *op >= sig.len() || sig.arity(*op) != args.len() {
                return Err(Error::SignatureMismatch(
                    "term does not fit signature".into(),
                ));
            }
            args.iter().try_for_each(|a| check_ops(a, sig))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{parse_identities, parse_term, OpDecl};

    fn sig() -> Signature {
        Signature::new(vec![
            OpDecl::new("f", 1),
            OpDecl::new("g", 1),
            OpDecl::new("h", 2),
            OpDecl::new("a", 0),
            OpDecl::new("b", 0),
        ])
        .unwrap()
    }

    #[test]
    fn decomposition() {
        let s = sig();
        let ids = parse_identities(&s, "f(x) = f(g(y))").unwrap();
        let mgu = syntactic_mgu(&ids).unwrap();
        assert_eq!(mgu.to_string(&s), "{x -> g(y)}");
    }

    #[test]
    fn occurs_check() {
        let s = sig();
        let ids = parse_identities(&s, "x = f(x)").unwrap();
        assert_eq!(syntactic_mgu(&ids), Err(Error::NotUnifiable));
    }

    #[test]
    fn constants() {
        let s = sig();
        let ids = parse_identities(&s, "h(x, a) = h(b, y)").unwrap();
        let mgu = syntactic_mgu(&ids).unwrap();
        assert_eq!(mgu.to_string(&s), "{x -> b, y -> a}");
        let ids = parse_identities(&s, "a = b").unwrap();
        assert!(syntactic_mgu(&ids).is_err());
    }

    #[test]
    fn idempotent_chain() {
        let s = sig();
        let ids = parse_identities(&s, "x = f(y), y = g(z), h(z, w) = h(a, x)").unwrap();
        let mgu = syntactic_mgu(&ids).unwrap();
        for id in &ids {
            assert_eq!(mgu.apply(&id.lhs), mgu.apply(&id.rhs));
        }
        assert_eq!(mgu.compose(&mgu), mgu);
        assert_eq!(
            mgu.apply(&Term::var("w")),
            parse_term(&s, "f(g(a))").unwrap()
        );
    }

    #[test]
    fn boolean_mgu_needs_boolean_ops() {
        let s = sig();
        let phi = parse_term(&s, "f(x)").unwrap();
        assert!(matches!(
            boolean_mgu(&s, &phi, &["x".into()]),
            Err(Error::SignatureMismatch(_))
        ));
    }

    #[test]
    fn boolean_mgu_uses_a_ground_solution() {
        let s = crate::catalog::boolean_signature();
        let vars: Vec<String> = vec!["x".into(), "y".into()];
        let t = |src: &str| parse_term(&s, src).unwrap();
        let mgu = boolean_mgu(&s, &t("(x /\\ y)"), &vars).unwrap();
        assert_eq!(mgu.image("x"), t("(neg((x /\\ y)) \\/ x)"));
        // ⊤ does not solve ¬x ∧ y; the solution x = ⊥, y = ⊤ is used.
        let phi = t("(neg(x) /\\ y)");
        let mgu = boolean_mgu(&s, &phi, &vars).unwrap();
        assert_eq!(mgu.image("x"), t("((neg(x) /\\ y) /\\ x)"));
        assert_eq!(mgu.image("y"), t("(neg((neg(x) /\\ y)) \\/ y)"));
    }
}
