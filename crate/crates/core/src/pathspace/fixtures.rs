use super::{Jump, PathError, StepPath};

/// Paths with their probabilities.
pub type WeightedPaths = Vec<(StepPath, f64)>;

/// `M_0` on `[0, 1/2 - 1/n)`, `M_1` on `[1/2 - 1/n, 1/2 + 1/n)`, `M_2` after.
pub fn sko_stopo(n: u32, levels: [&[f64]; 3]) -> Result<StepPath, PathError> {
    if n < 3 {
        return Err(PathError::BadParameter(format!("sko_stopo needs n >= 3, got {n}")));
    }
    let h = 1.0 / f64::from(n);
    StepPath::new(
        levels[0].to_vec(),
        vec![
            Jump {
                t: 0.5 - h,
                value: levels[1].to_vec(),
            },
            Jump {
                t: 0.5 + h,
                value: levels[2].to_vec(),
            },
        ],
    )
}

/// Law of [`sko_stopo`] paths for the two-step binary martingale
/// `M_0 = 1`, `M_1 = 1 +- 1/2`, `M_2 = M_1 +- 1/2`.
pub fn sko_stopo_family(n: u32) -> Result<WeightedPaths, PathError> {
    let mut out = Vec::with_capacity(4);
    for d1 in [-0.5, 0.5] {
        for d2 in [-0.5, 0.5] {
            let m1 = 1.0 + d1;
            let path = sko_stopo(n, [&[1.0], &[m1], &[m1 + d2]])?;
            out.push((path, 0.25));
        }
    }
    Ok(out)
}

/// `Y 1_{[1/n, 1]}` with `Y = -1, +1` equally likely.
pub fn closeness(n: u32) -> Result<WeightedPaths, PathError> {
    if n < 1 {
        return Err(PathError::BadParameter("closeness needs n >= 1".into()));
    }
    let t = 1.0 / f64::from(n);
    [-1.0, 1.0]
        .into_iter()
        .map(|y| Ok((StepPath::from_pairs(vec![0.0], vec![(t, vec![y])])?, 0.5)))
        .collect()
}

pub fn example_fixture(name: &str, n: u32) -> Result<WeightedPaths, PathError> {
    match name {
        "sko_stopo" => sko_stopo_family(n),
        "closeness" => closeness(n),
        other => Err(PathError::UnknownFixture(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sko_stopo_switch_times() {
        let p = sko_stopo(4, [&[1.0], &[2.0], &[3.0]]).unwrap();
        assert_eq!(p.value_at(0.0), &[1.0]);
        assert_eq!(p.value_at(0.2499), &[1.0]);
        assert_eq!(p.value_at(0.25), &[2.0]);
        assert_eq!(p.value_at(0.7499), &[2.0]);
        assert_eq!(p.value_at(0.75), &[3.0]);
        assert!(sko_stopo(2, [&[1.0], &[2.0], &[3.0]]).is_err());
    }

    #[test]
    fn closeness_paths() {
        let fam = closeness(2).unwrap();
        for (p, w) in &fam {
            assert_eq!(*w, 0.5);
            assert_eq!(p.value_at(0.49), &[0.0]);
            assert_eq!(p.value_at(0.5)[0].abs(), 1.0);
        }
        assert!(example_fixture("nope", 3).is_err());
    }
}
