//! Parsers for numeric command-line values.

use polarflip_core::analysis::linear_grid;

/// `a,b,c` or `start:step:stop` (inclusive).
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("`{t}` is not a number"))
            .and_then(|v| {
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(format!("`{t}` is not finite"))
                }
            })
    };
    let parts: Vec<&str> = s.split(':').collect();
    let grid = match parts.as_slice() {
        [single] => single.split(',').map(num).collect::<Result<Vec<_>, _>>()?,
        [start, step, stop] => {
            let (start, step, stop) = (num(start)?, num(step)?, num(stop)?);
            if step <= 0.0 {
                return Err("range step must be positive".into());
            }
            if stop < start {
                return Err("range stop is below its start".into());
            }
            linear_grid(start, stop, step)
        }
        _ => return Err("expected a list `a,b,c` or a range `start:step:stop`".into()),
    };
    if grid.is_empty() {
        return Err("empty grid".into());
    }
    Ok(grid)
}

/// Non-negative integer, also accepting exponent notation such as `1e7`.
pub fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.trim().parse::<u64>() {
        return Ok(v);
    }
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a count"))?;
    if v < 0.0 || v.fract() != 0.0 || v > u64::MAX as f64 {
        return Err(format!("`{s}` is not a non-negative integer"));
    }
    Ok(v as u64)
}
