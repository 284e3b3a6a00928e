//! Integer polynomials written like `3*x1^2 + x1*x2 - x2 + 1`.
//!
//! `x` alone means `x1`. The variable count is the largest index seen,
//! unless the caller asks for more.

use num_bigint::BigInt;
use num_rational::BigRational;
use toric_zeta_core::poly::Poly;

use crate::CliError;

fn err(msg: impl Into<String>) -> CliError {
    CliError::new("PolynomialParse", msg.into())
}

struct Monomial {
    coeff: BigInt,
    powers: Vec<(usize, u32)>,
}

fn parse_factor(f: &str, mono: &mut Monomial) -> Result<(), CliError> {
    let (base, exp) = match f.split_once('^') {
        Some((b, e)) => (b, e.parse::<u32>().map_err(|_| err(format!("bad exponent in `{f}`")))?),
        None => (f, 1),
    };
    if let Some(idx) = base.strip_prefix('x') {
        let i =
            if idx.is_empty() { 1 } else { idx.parse::<usize>().map_err(|_| err(format!("bad variable `{base}`")))? };
        if i == 0 {
            return Err(err("variables are numbered from x1"));
        }
        mono.powers.push((i - 1, exp));
    } else {
        let c: BigInt = base.parse().map_err(|_| err(format!("unexpected factor `{f}`")))?;
        mono.coeff *= num_traits::pow(c, exp as usize);
    }
    Ok(())
}

pub fn parse_polynomial(text: &str, min_vars: usize) -> Result<Poly, CliError> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(err("empty polynomial"));
    }
    let mut monos = Vec::new();
    let mut start = 0;
    let bytes = s.as_bytes();
    for i in 0..=bytes.len() {
        let at_sign = i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') && i > 0 && bytes[i - 1] != b'^';
        if i == bytes.len() || at_sign {
            let chunk = &s[start..i];
            let (neg, body) = match chunk.as_bytes().first() {
                Some(b'-') => (true, &chunk[1..]),
                Some(b'+') => (false, &chunk[1..]),
                _ => (false, chunk),
            };
            if body.is_empty() {
                return Err(err(format!("missing term near position {start}")));
            }
            let mut mono = Monomial { coeff: BigInt::from(if neg { -1 } else { 1 }), powers: Vec::new() };
            for f in body.split('*') {
                if f.is_empty() {
                    return Err(err(format!("empty factor in `{body}`")));
                }
                parse_factor(f, &mut mono)?;
            }
            monos.push(mono);
            start = i;
        }
    }
    let nvars = monos.iter().flat_map(|m| m.powers.iter().map(|&(i, _)| i + 1)).max().unwrap_or(0).max(min_vars).max(1);
    let mut out = Poly::zero(nvars);
    for m in monos {
        let mut e = vec![0u32; nvars];
        for (i, k) in m.powers {
            e[i] += k;
        }
        out.add_term(e, BigRational::from_integer(m.coeff));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sums_and_powers() {
        let p = parse_polynomial("x1*x2 + x2^2 - 3", 0).unwrap();
        assert_eq!(p.nvars(), 2);
        assert_eq!(p.eval_i64(&[2, 5]), BigRational::from_integer(32.into()));
        let q = parse_polynomial("x^2", 0).unwrap();
        assert_eq!(q.eval_i64(&[3]), BigRational::from_integer(9.into()));
        assert_eq!(parse_polynomial("2^3*x1", 2).unwrap().nvars(), 2);
    }

    #[test]
    fn rejects_junk() {
        for bad in ["", "x0", "x1+", "y", "x1**x2", "x1^a"] {
            assert!(parse_polynomial(bad, 0).is_err(), "{bad}");
        }
    }
}
