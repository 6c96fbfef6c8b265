//! Bench grid specs: `N:K[,K...]` cells separated by `;`, where each `K` is
//! either a single sparsity or a range `a-b` with optional `/step`.
//!
//! `64:2,4,8-16/4;128:3` expands to (64,2) (64,4) (64,8) (64,12) (64,16) (128,3).

pub fn parse_grid(spec: &str) -> Result<Vec<(usize, usize)>, String> {
    let mut cells = Vec::new();
    for block in spec.split(';').map(str::trim).filter(|b| !b.is_empty()) {
        let (n, ks) = block
            .split_once(':')
            .ok_or_else(|| format!("grid block {block:?} lacks `N:`"))?;
        let n: usize = n.trim().parse().map_err(|_| format!("bad signal length {n:?}"))?;
        for item in ks.split(',').map(str::trim) {
            for k in expand(item)? {
                if k == 0 || k > n {
                    return Err(format!("sparsity {k} out of range for n={n}"));
                }
                cells.push((n, k));
            }
        }
    }
    if cells.is_empty() {
        return Err("empty grid".into());
    }
    Ok(cells)
}

fn expand(item: &str) -> Result<Vec<usize>, String> {
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| format!("bad sparsity {s:?}"));
    let (range, step) = match item.split_once('/') {
        Some((r, s)) => (r, num(s)?),
        None => (item, 1),
    };
    if step == 0 {
        return Err(format!("zero step in {item:?}"));
    }
    match range.split_once('-') {
        None => Ok(vec![num(range)?]),
        Some((lo, hi)) => {
            let (lo, hi) = (num(lo)?, num(hi)?);
            if lo > hi {
                return Err(format!("empty range {item:?}"));
            }
            Ok((lo..=hi).step_by(step).collect())
        }
    }
}
