use super::formula::CnfFormula;
use crate::error::{Error, Result};

fn err<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        line,
        msg: msg.into(),
    })
}

/// Parses DIMACS CNF. The clause count in the header is informational and not enforced.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
    let mut n: Option<usize> = None;
    let mut clauses: Vec<Vec<i64>> = Vec::new();
    let mut current: Vec<i64> = Vec::new();
    let mut last_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if n.is_some() {
                return err(line_no, "duplicate header");
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return err(line_no, "malformed header, expected \"p cnf <vars> <clauses>\"");
            }
            let vars = parts[2]
                .parse::<usize>()
                .or_else(|_| err(line_no, format!("bad variable count {:?}", parts[2])))?;
            parts[3]
                .parse::<usize>()
                .or_else(|_| err(line_no, format!("bad clause count {:?}", parts[3])))?;
            n = Some(vars);
            continue;
        }
        let Some(nv) = n else {
            return err(line_no, "clause before header");
        };
        for tok in line.split_whitespace() {
            let x: i64 = tok
                .parse()
                .or_else(|_| err(line_no, format!("bad literal {tok:?}")))?;
            if x == 0 {
                clauses.push(std::mem::take(&mut current));
            } else {
                if x.unsigned_abs() as usize > nv {
                    return err(
                        line_no,
                        format!("variable {} exceeds n={nv}", x.unsigned_abs()),
                    );
                }
                current.push(x);
            }
        }
    }
    let Some(nv) = n else {
        return err(last_line.max(1), "missing \"p cnf\" header");
    };
    if !current.is_empty() {
        clauses.push(current);
    }
    CnfFormula::new(nv, clauses)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let f = parse_dimacs("p cnf 2 1\n1 2 0").unwrap();
        assert_eq!((f.num_vars(), f.k(), f.clauses().len()), (2, 2, 1));

        let f = parse_dimacs("p cnf 3 2\n1 -1 3 0\n2 0").unwrap();
        assert_eq!((f.num_vars(), f.k(), f.clauses().len()), (3, 1, 1));
        assert_eq!(f.clauses()[0].literals()[0].var, 2);

        match parse_dimacs("p cnf 2 1\n3 0") {
            Err(Error::Parse { line: 2, msg }) => assert!(msg.contains("exceeds")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_malformed_and_empty() {
        assert!(matches!(parse_dimacs(""), Err(Error::Parse { .. })));
        assert!(matches!(parse_dimacs("p dnf 2 1\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_dimacs("1 2 0\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_dimacs("p cnf 2 1\n1 x 0\n"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn comments_multiline_clauses_and_empty_clause() {
        let f = parse_dimacs("c hi\np cnf 3 2\n1\n -2 0 0\n").unwrap();
        assert_eq!(f.clauses().len(), 2);
        assert!(f.has_empty_clause());
        assert_eq!(parse_dimacs(&f.to_dimacs()).unwrap(), f);
    }
}
