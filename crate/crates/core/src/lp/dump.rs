//! Text dump of an LP in the CPLEX LP file layout, for cross-checking with
//! external solvers. Values are written as decimals; the dump is flagged lossy
//! when some value has no finite decimal expansion.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::lp::model::{LinearProgram, Relation, Sense};
use crate::ring::{Field, Rational};

pub struct LpDump {
    pub text: String,
    pub lossy: bool,
}

/// Exact decimal string when the denominator divides a power of ten.
pub fn exact_decimal(q: &Rational) -> Option<String> {
    let mut d = q.denom().clone();
    let mut scale = 0usize;
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut twos, mut fives) = (0usize, 0usize);
    while d.is_even() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    if !d.is_one() {
        return None;
    }
    scale = scale.max(twos).max(fives);
    let factor = num_traits::pow(BigInt::from(10), scale);
    let scaled = q.numer() * &factor / q.denom();
    if scale == 0 {
        return Some(scaled.to_string());
    }
    let negative = scaled.is_negative();
    let digits = scaled.abs().to_string();
    let padded = format!("{:0>width$}", digits, width = scale + 1);
    let (int, frac) = padded.split_at(padded.len() - scale);
    Some(format!("{}{}.{}", if negative { "-" } else { "" }, int, frac))
}

fn decimal<F: Field>(value: &F, lossy: &mut bool) -> String {
    let surd = value.to_surd();
    if let Some(q) = surd.to_rational() {
        if let Some(s) = exact_decimal(&q) {
            return s;
        }
    }
    *lossy = true;
    format!("{:.12}", surd.to_f64())
}

pub fn dump_lp<F: Field>(lp: &LinearProgram<F>) -> LpDump {
    let mut lossy = false;
    let mut body = String::new();
    let names: Vec<String> = lp.columns.iter().map(|c| c.to_string()).collect();
    let terms = |coeffs: &mut dyn Iterator<Item = (usize, &F)>, lossy: &mut bool| -> String {
        let parts: Vec<String> = coeffs.map(|(j, a)| format!("{} {}", decimal(a, lossy), names[j])).collect();
        if parts.is_empty() {
            "0 ".to_string() + &names.first().cloned().unwrap_or_else(|| "x".into())
        } else {
            parts.join(" + ").replace("+ -", "- ")
        }
    };
    body.push_str(match lp.sense {
        Sense::Minimize => "Minimize\n",
        Sense::Maximize => "Maximize\n",
    });
    let obj = terms(&mut lp.objective.iter().enumerate().filter(|(_, c)| !c.is_zero_value()), &mut lossy);
    writeln!(body, " obj: {obj}").unwrap();
    body.push_str("Subject To\n");
    for row in &lp.rows {
        let lhs = terms(&mut row.coeffs.iter().map(|(j, a)| (*j, a)), &mut lossy);
        let rel = match row.relation {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        };
        writeln!(body, " {}: {lhs} {rel} {}", row.id, decimal(&row.rhs, &mut lossy)).unwrap();
    }
    body.push_str("Bounds\n");
    for n in &names {
        writeln!(body, " {n} >= 0").unwrap();
    }
    body.push_str("End\n");
    let header = format!("\\ exact values rounded to decimals: {}\n", if lossy { "lossy" } else { "exact" });
    LpDump { text: header + &body, lossy }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::model::{ColumnId, RowId};
    use crate::ring::{integer, rational};

    #[test]
    fn decimals() {
        assert_eq!(exact_decimal(&rational(3, 4)).as_deref(), Some("0.75"));
        assert_eq!(exact_decimal(&rational(-1, 8)).as_deref(), Some("-0.125"));
        assert_eq!(exact_decimal(&integer(12)).as_deref(), Some("12"));
        assert_eq!(exact_decimal(&rational(1, 3)), None);
    }

    #[test]
    fn lossy_flag() {
        let mut lp = LinearProgram::<Rational>::new(Sense::Minimize);
        lp.add_column(ColumnId::Variable(0), integer(2));
        lp.add_row(RowId::Constraint(0), vec![(0, rational(1, 2))], Relation::Ge, integer(1));
        let d = dump_lp(&lp);
        assert!(!d.lossy);
        assert!(d.text.contains(" c0: 0.5 x0 >= 1"));
        lp.add_row(RowId::Constraint(1), vec![(0, rational(1, 3))], Relation::Le, integer(5));
        assert!(dump_lp(&lp).lossy);
    }
}
