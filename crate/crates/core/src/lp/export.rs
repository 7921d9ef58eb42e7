//! CPLEX-LP text export for cross-checking against external solvers.
//!
//! Layout: objective section (`Maximize`/`Minimize`, row `obj:`), a
//! `Subject To` section with one named row per constraint (`c<i>:`), a
//! `Bounds` section listing every variable as `lo <= x<j> <= hi` (`-inf`/`+inf`
//! for missing bounds, `x<j> free` when both are missing), then `End`.
//! Variables are named `x<j>` by index; coefficients use Rust's shortest
//! round-trip float formatting.

use std::fmt::Write;

use super::model::{LinearProgram, Relation, Sense};
use crate::scalar::Scalar;

pub fn to_lp_format<S: Scalar>(lp: &LinearProgram<S>) -> String {
    let mut out = String::new();
    out.push_str(match lp.sense {
        Sense::Maximize => "Maximize\n",
        Sense::Minimize => "Minimize\n",
    });
    out.push_str(" obj:");
    write_terms(&mut out, &lp.objective);
    out.push_str("\nSubject To\n");
    for (i, c) in lp.constraints.iter().enumerate() {
        let _ = write!(out, " c{i}:");
        write_terms(&mut out, &c.coeffs);
        let rel = match c.relation {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        };
        let _ = writeln!(out, " {rel} {}", c.rhs.to_f64());
    }
    out.push_str("Bounds\n");
    for (j, v) in lp.variables.iter().enumerate() {
        match (&v.lower, &v.upper) {
            (None, None) => {
                let _ = writeln!(out, " x{j} free");
            }
            (l, u) => {
                let lo = l.as_ref().map_or("-inf".to_string(), |l| l.to_f64().to_string());
                let hi = u.as_ref().map_or("+inf".to_string(), |u| u.to_f64().to_string());
                let _ = writeln!(out, " {lo} <= x{j} <= {hi}");
            }
        }
    }
    out.push_str("End\n");
    out
}

fn write_terms<S: Scalar>(out: &mut String, terms: &[(usize, S)]) {
    if terms.is_empty() {
        out.push_str(" 0 x0");
        return;
    }
    for (j, a) in terms {
        let a = a.to_f64();
        if a < 0.0 {
            let _ = write!(out, " - {} x{j}", -a);
        } else {
            let _ = write!(out, " + {a} x{j}");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exports_sections_in_order() {
        let mut lp = LinearProgram::<f64>::new(Sense::Maximize);
        let x = lp.add_nonneg("x");
        let y = lp.add_free("y");
        lp.add_constraint("c", vec![(x, 1.0), (y, -2.5)], Relation::Le, 3.0);
        lp.set_objective(vec![(x, 1.0)]);
        let text = to_lp_format(&lp);
        assert_eq!(
            text,
            "Maximize\n obj: + 1 x0\nSubject To\n c0: + 1 x0 - 2.5 x1 <= 3\nBounds\n 0 <= x0 <= +inf\n x1 free\nEnd\n"
        );
    }
}
