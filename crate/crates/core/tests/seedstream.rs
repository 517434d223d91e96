use cftp_core::oracle::{binomial_sigma, chi_square_uniform, ks_uniform};
use cftp_core::seed::{Lane, SeedStream, SubSeedAddress};
use cftp_core::ColorSet;

fn addr(u: u64) -> SubSeedAddress {
    SubSeedAddress::new(1, u)
}

#[test]
fn unit_uniform_ks_and_mean() {
    let s = SeedStream::new(1);
    let mut sub = s.substream(Lane::Update, addr(0));
    let sequential: Vec<f64> = (0..1_000_000).map(|_| sub.unit_uniform()).collect();
    let per_address: Vec<f64> = (0..1_000_000).map(|u| s.unit_uniform_at(addr(u), 0)).collect();
    for mut draws in [sequential, per_address] {
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        assert!((mean - 0.5).abs() < 0.002, "mean {mean}");
        let d = ks_uniform(&mut draws);
        assert!(d < 0.002, "KS statistic {d}");
    }
}

#[test]
fn uniform_in_set_frequencies() {
    let s = SeedStream::new(31);
    let set: ColorSet = [1, 2, 3].into_iter().collect();
    let n = 300_000;
    let mut counts = [0u64; 4];
    for u in 0..n {
        counts[s.update_stream(addr(u)).uniform_in_set(&set).unwrap()] += 1;
    }
    assert_eq!(counts[0], 0);
    let sigma = binomial_sigma(1.0 / 3.0, n as usize);
    for &c in &counts[1..] {
        let f = c as f64 / n as f64;
        assert!((f - 1.0 / 3.0).abs() < 3.0 * sigma, "frequency {f}");
    }
}

#[test]
fn permutations_of_two_and_three() {
    let s = SeedStream::new(77);
    let two: ColorSet = [1, 2].into_iter().collect();
    let n = 100_000;
    let first_is_one = (0..n)
        .filter(|&u| s.update_stream(addr(u)).random_permutation(&two)[0] == 1)
        .count();
    let f = first_is_one as f64 / n as f64;
    assert!((f - 0.5).abs() < 3.0 * binomial_sigma(0.5, n as usize));

    let three: ColorSet = [1, 2, 3].into_iter().collect();
    let orders = [[1, 2, 3], [1, 3, 2], [2, 1, 3], [2, 3, 1], [3, 1, 2], [3, 2, 1]];
    let mut counts = [0u64; 6];
    for u in 0..60_000 {
        let p = s.update_stream(addr(n + u)).random_permutation(&three);
        counts[orders.iter().position(|o| o[..] == p[..]).unwrap()] += 1;
    }
    let r = chi_square_uniform(&counts);
    assert!(r.p_value > 0.001, "{r:?}");
}

#[test]
fn categorical_two_point() {
    let s = SeedStream::new(5);
    let n = 100_000;
    let ones = (0..n)
        .filter(|&u| s.update_stream(addr(u)).categorical(&[0.36, 0.64]).unwrap() == 1)
        .count();
    let f = ones as f64 / n as f64;
    assert!((f - 0.64).abs() < 3.0 * binomial_sigma(0.64, n as usize), "frequency {f}");
}

#[test]
fn replay_from_addresses_is_bit_exact() {
    let s = SeedStream::new(99);
    let set = ColorSet::full(20);
    let run = || {
        (0..500u64)
            .map(|u| {
                let mut sub = s.update_stream(SubSeedAddress::new(u % 7, u));
                (sub.random_permutation(&set), sub.unit_uniform().to_bits())
            })
            .collect::<Vec<_>>()
    };
    assert_eq!(run(), run());
}
