/// Sinusoidal encoding of an assigned index.
///
/// Components `2k` and `2k + 1` share the frequency `10000^(-2k/d)`: the even
/// one is the sine, the odd one the cosine.
pub fn indexing_embedding(index: usize, d: usize) -> Vec<f64> {
    let i = index as f64;
    (0..d)
        .map(|k| {
            let exponent = (2 * (k / 2)) as f64 / d as f64;
            let arg = i / 10000f64.powf(exponent);
            if k % 2 == 0 {
                arg.sin()
            } else {
                arg.cos()
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_zero() {
        assert_eq!(indexing_embedding(0, 4), vec![0.0, 1.0, 0.0, 1.0]);
        let v = indexing_embedding(0, 64);
        assert!(v.chunks(2).all(|p| p == [0.0, 1.0]));
    }

    #[test]
    fn index_one_d4() {
        let v = indexing_embedding(1, 4);
        let expect = [1f64.sin(), 1f64.cos(), 0.01f64.sin(), 0.01f64.cos()];
        for (a, b) in v.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        let rounded: Vec<f64> = v.iter().map(|x| (x * 1e5).round() / 1e5).collect();
        assert_eq!(rounded, vec![0.84147, 0.5403, 0.01, 0.99995]);
    }

    #[test]
    fn pairs_on_unit_circle() {
        for i in [0, 1, 7, 123, 999, 65_000] {
            for d in [4, 6, 64] {
                let v = indexing_embedding(i, d);
                for p in v.chunks(2) {
                    assert!((p[0] * p[0] + p[1] * p[1] - 1.0).abs() < 1e-12);
                }
            }
        }
    }
}
