use super::ast::{Family, Formula};

/// Renders a formula in the surface syntax accepted by [`super::parse`].
///
/// Negated conjunctions that match the disjunction, implication,
/// biconditional and diamond encodings are printed with the sugared
/// connective.
pub fn render(f: &Formula) -> String {
    let mut out = String::new();
    write(f, &mut out);
    out
}

fn write(f: &Formula, out: &mut String) {
    match f {
        Formula::Atom(i) => {
            out.push('p');
            out.push_str(&i.to_string());
        }
        Formula::Bottom => out.push_str("false"),
        Formula::Not(a) => match a.as_ref() {
            Formula::Bottom => out.push_str("true"),
            Formula::And(x, y) => match (x.as_ref(), y.as_ref()) {
                (Formula::Not(x), Formula::Not(y)) => infix(x, "|", y, out),
                (x, Formula::Not(y)) => infix(x, "->", y, out),
                _ => {
                    out.push('!');
                    write(a, out);
                }
            },
            Formula::Modal(op, args) if op.family() == Family::Box => match &args[0] {
                Formula::Not(x) => {
                    out.push_str("<>");
                    write(x, out);
                }
                _ => {
                    out.push('!');
                    write(a, out);
                }
            },
            _ => {
                out.push('!');
                write(a, out);
            }
        },
        Formula::And(x, y) => {
            if let Some((a, b)) = as_iff(x, y) {
                infix(a, "<->", b, out);
            } else {
                infix(x, "&", y, out);
            }
        }
        Formula::Modal(op, args) => match op.family() {
            Family::Box => {
                out.push_str("[](");
                write(&args[0], out);
                out.push(')');
            }
            Family::Cond => infix(&args[0], "=>", &args[1], out),
            _ => {
                out.push_str(&op.to_string());
                out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write(a, out);
                }
                out.push(')');
            }
        },
    }
}

fn infix(a: &Formula, sym: &str, b: &Formula, out: &mut String) {
    out.push('(');
    write(a, out);
    out.push(' ');
    out.push_str(sym);
    out.push(' ');
    write(b, out);
    out.push(')');
}

/// Matches `(a -> b) & (b -> a)`.
fn as_iff<'a>(x: &'a Formula, y: &'a Formula) -> Option<(&'a Formula, &'a Formula)> {
    let imp = |f: &'a Formula| match f {
        Formula::Not(inner) => match inner.as_ref() {
            Formula::And(a, nb) => match nb.as_ref() {
                Formula::Not(b) => Some((a.as_ref(), b.as_ref())),
                _ => None,
            },
            _ => None,
        },
        _ => None,
    };
    let (a, b) = imp(x)?;
    let (c, d) = imp(y)?;
    (a == d && b == c).then_some((a, b))
}
