use std::fmt;

use super::{Formula, Term};

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Zero => f.write_str("0"),
            Term::Var(v) => f.write_str(&v.name),
            Term::F(i, t) => write!(f, "f{i}({t})"),
            Term::G(i, t) => write!(f, "g{i}({t})"),
        }
    }
}

/// Operands of binary connectives are parenthesized unless they are a
/// constant or a negation; this keeps `parse(print(phi)) == phi`.
fn operand(phi: &Formula, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match phi {
        Formula::True | Formula::False | Formula::Not(_) => write!(f, "{phi}"),
        _ => write!(f, "({phi})"),
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Eq(a, b) => write!(f, "{a} = {b}"),
            Formula::Neq(a, b) => write!(f, "{a} != {b}"),
            Formula::Lt(i, a, b) => write!(f, "{a} <{i} {b}"),
            Formula::Not(p) => {
                f.write_str("~")?;
                operand(p, f)
            }
            Formula::And(ps) | Formula::Or(ps) => {
                let sep = if matches!(self, Formula::And(_)) { " & " } else { " | " };
                if ps.is_empty() {
                    // Never produced by the parser; printed as the unit.
                    return f.write_str(if matches!(self, Formula::And(_)) { "true" } else { "false" });
                }
                for (k, p) in ps.iter().enumerate() {
                    if k > 0 {
                        f.write_str(sep)?;
                    }
                    operand(p, f)?;
                }
                Ok(())
            }
            Formula::Implies(a, b) => {
                operand(a, f)?;
                f.write_str(" -> ")?;
                operand(b, f)
            }
            Formula::Exists(x, b) => write!(f, "exists {x}. {b}"),
            Formula::Forall(x, b) => write!(f, "forall {x}. {b}"),
        }
    }
}
