use leakywire::special::{k0, k1};

fn fixtures() -> Vec<(f64, f64, f64)> {
    let text = include_str!("fixtures/bessel_k.csv");
    text.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|f| f.trim().parse().unwrap()).collect();
            (v[0], v[1], v[2])
        })
        .collect()
}

#[test]
fn matches_high_precision_reference() {
    let rows = fixtures();
    assert_eq!(rows.len(), 60);
    let mut worst = 0.0f64;
    for (x, r0, r1) in rows {
        let e0 = ((k0(x).unwrap() - r0) / r0).abs();
        let e1 = ((k1(x).unwrap() - r1) / r1).abs();
        worst = worst.max(e0).max(e1);
        assert!(e0 <= 1e-12, "K0({x}): rel err {e0:e}");
        assert!(e1 <= 1e-12, "K1({x}): rel err {e1:e}");
    }
    println!("worst relative error {worst:e}");
}

#[test]
fn derivative_of_k0_is_minus_k1() {
    for (x, _, _) in fixtures().into_iter().filter(|r| r.0 >= 1e-3 && r.0 <= 100.0) {
        let h = 1e-5 * x;
        let fd = (k0(x + h).unwrap() - k0(x - h).unwrap()) / (2.0 * h);
        let k = k1(x).unwrap();
        assert!(((fd + k) / k).abs() <= 1e-6, "x = {x}");
    }
}
