use qhorizon::Error;

/// Seventeen significant digits, positional notation where that stays
/// readable. Round-trips every finite double.
pub fn csv_float(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return format!("{:.16}", 0.0);
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..16).contains(&exp) {
        format!("{:.*}", (16 - exp) as usize, v)
    } else {
        format!("{v:.16e}")
    }
}

/// Comma-joined shortest round-trip representations.
pub fn float_list(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Parses `lo:hi` items.
pub fn range_list(items: &[String]) -> Result<Vec<(f64, f64)>, Error> {
    items
        .iter()
        .map(|item| {
            let bad = || Error::InvalidArgument(format!("expected lo:hi, got {item:?}"));
            let (lo, hi) = item.split_once(':').ok_or_else(bad)?;
            let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
            let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
            Ok((lo, hi))
        })
        .collect()
}
