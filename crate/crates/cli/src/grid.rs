//! Parameter grids: `"lo:hi:n"` for `n` equally spaced exact values, or a
//! comma-separated list of expressions.

use std::collections::BTreeMap;

use cyclecert::exactalg::Rat;
use cyclecert::sysfile::eval_expr;

pub fn parse_grid(spec: &str) -> Result<Vec<Rat>, String> {
    let none = BTreeMap::new();
    let value = |s: &str| eval_expr(s, &none).map_err(|e| format!("grid value {s:?}: {e}"));
    let parts: Vec<&str> = spec.split(':').collect();
    let grid = match parts.as_slice() {
        [lo, hi, n] => {
            let (lo, hi) = (value(lo)?, value(hi)?);
            let n: usize = n.trim().parse().map_err(|_| format!("bad point count {n:?}"))?;
            match n {
                0 => return Err("grid needs at least one point".into()),
                1 => vec![lo],
                _ => {
                    let step = (&hi - &lo) / Rat::from_integer((n as i64 - 1).into());
                    (0..n).map(|i| &lo + &step * Rat::from_integer((i as i64).into())).collect()
                }
            }
        }
        [list] => {
            list.split(',').filter(|s| !s.trim().is_empty()).map(value).collect::<Result<Vec<_>, _>>()?
        }
        _ => return Err(format!("bad grid {spec:?}; use lo:hi:n or a comma list")),
    };
    if grid.is_empty() {
        return Err("empty grid".into());
    }
    Ok(grid)
}

/// `name=expr` as given to `--set`.
pub fn parse_assignment(s: &str) -> Result<(String, Rat), String> {
    let (name, expr) = s.split_once('=').ok_or_else(|| format!("expected name=value, got {s:?}"))?;
    let v = eval_expr(expr, &BTreeMap::new()).map_err(|e| format!("{name}: {e}"))?;
    Ok((name.trim().to_string(), v))
}
