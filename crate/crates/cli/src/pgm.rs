//! Grayscale raster dumps of two-dimensional fields.

use nsh_core::SpectralField;

/// Plain (ASCII) PGM of the grid values, black at the minimum and white at
/// the maximum; `None` unless the field is two-dimensional.
pub fn render(u: &SpectralField) -> Option<String> {
    let shape = u.basis().grid_shape();
    if shape.len() != 2 {
        return None;
    }
    let values = u.to_grid();
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let span = if hi > lo { hi - lo } else { 1.0 };
    let (rows, cols) = (shape[0], shape[1]);
    let mut out = format!("P2\n{cols} {rows}\n255\n");
    for row in values.chunks(cols) {
        let line: Vec<String> = row
            .iter()
            .map(|x| (((x - lo) / span) * 255.0).round().clamp(0.0, 255.0).to_string())
            .collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nsh_core::{Basis, DomainSpec};

    #[test]
    fn header_and_range() {
        let b = Basis::new(DomainSpec::neumann_box(&[3.0, 2.0], 1.0).unwrap(), 2).unwrap();
        let u = SpectralField::from_fn(b, |x| x[0]).unwrap();
        let img = render(&u).unwrap();
        let mut lines = img.lines();
        assert_eq!(lines.next(), Some("P2"));
        assert_eq!(lines.next(), Some("5 5"));
        let px: Vec<u32> = img.lines().skip(3).flat_map(|l| l.split(' ')).map(|t| t.parse().unwrap()).collect();
        assert_eq!(px.len(), 25);
        assert_eq!(px.iter().min(), Some(&0));
        assert_eq!(px.iter().max(), Some(&255));
        let b1 = Basis::new(DomainSpec::neumann_box(&[3.0], 1.0).unwrap(), 2).unwrap();
        assert!(render(&SpectralField::constant(b1, 1.0)).is_none());
    }
}
