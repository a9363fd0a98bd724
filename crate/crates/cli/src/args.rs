//! Value parsers for numeric command-line flags.

/// SINR grid given as `start:stop:step` (inclusive) or a comma-separated list.
#[derive(Debug, Clone, PartialEq)]
pub struct SinrGrid(pub Vec<f64>);

pub fn parse_trials(s: &str) -> Result<usize, String> {
    let x: f64 = s.trim().parse().map_err(|_| format!("not a number: {s}"))?;
    if !(x >= 1.0 && x.fract() == 0.0 && x <= 1e15) {
        return Err(format!("trial count must be a positive integer, got {s}"));
    }
    Ok(x as usize)
}

pub fn parse_grid(s: &str) -> Result<SinrGrid, String> {
    let number = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("not a number: {t}"))
    };
    let values = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, step] = parts[..] else {
            return Err(format!("expected start:stop:step, got {s}"));
        };
        let (start, stop, step) = (number(start)?, number(stop)?, number(step)?);
        if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
            return Err(format!("grid {s} needs a positive step and stop >= start"));
        }
        let n = ((stop - start) / step * (1.0 + 1e-12)).floor() as usize;
        (0..=n).map(|i| start + i as f64 * step).collect()
    } else {
        s.split(',').map(number).collect::<Result<Vec<_>, _>>()?
    };
    if values.is_empty() || values.iter().any(|x| x.is_nan()) {
        return Err(format!("empty or invalid grid: {s}"));
    }
    Ok(SinrGrid(values))
}

/// Gate range `first:last`.
pub fn parse_gate_range(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected first:last, got {s}"))?;
    let a: i64 = a
        .trim()
        .parse()
        .map_err(|_| format!("not an integer: {a}"))?;
    let b: i64 = b
        .trim()
        .parse()
        .map_err(|_| format!("not an integer: {b}"))?;
    if a > b {
        return Err(format!("empty gate range {s}"));
    }
    Ok((a, b))
}
