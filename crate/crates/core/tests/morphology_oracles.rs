mod common;

use common::*;
use morphorad::morphology::*;

#[test]
fn opening_axioms_on_random_volumes() {
    let mut r = rng(0x0be7);
    for case in 0..100 {
        if let Err(e) = check_opening_axioms(&mut r) {
            panic!("case {case}: {e}");
        }
    }
}

#[test]
fn covariance_series_matches_two_point_oracle() {
    let mut r = rng(0xc0fa);
    for case in 0..40 {
        if let Err(e) = check_covariance_series(&mut r) {
            panic!("case {case}: {e}");
        }
    }
}

#[test]
fn two_point_erosion_matches_pair_scan() {
    let mut r = rng(3);
    for _ in 0..50 {
        let v = random_int_volume(&mut r, 7);
        let off = [0; 3].map(|_| rand::Rng::random_range(&mut r, -8i64..=8));
        assert_eq!(two_point_erosion(&v, off), oracle_two_point(&v, off), "{off:?}");
    }
}

#[test]
fn opening_sieve() {
    // opening by a larger cube never exceeds opening by a smaller one
    let mut r = rng(8);
    for _ in 0..20 {
        let v = random_int_volume(&mut r, 9);
        let mut prev = v.clone();
        for rad in 1..=4 {
            let o = opening(&v, &chebyshev_ball(rad)).unwrap();
            assert!(o.values.iter().zip(&prev.values).all(|(a, b)| a <= b));
            prev = o;
        }
    }
}

#[test]
fn opening_is_increasing() {
    let mut r = rng(9);
    for _ in 0..20 {
        let v = random_int_volume(&mut r, 7);
        let mut w = v.clone();
        w.values.iter_mut().for_each(|x| *x += f64::from(rand::Rng::random_range(&mut r, 0..3)));
        let se = chebyshev_ball(1);
        let (a, b) = (opening(&v, &se).unwrap(), opening(&w, &se).unwrap());
        assert!(a.values.iter().zip(&b.values).all(|(x, y)| x <= y));
    }
}

#[test]
fn stripes_dip_at_half_period() {
    for period in [2, 4, 5, 6, 8, 10] {
        for axis in 0..3 {
            if let Err(e) = check_stripe_period(period, axis) {
                panic!("{e}");
            }
        }
    }
}

#[test]
fn stripes_monotone_across_axis() {
    use morphorad::features::DirectionSet13;
    use morphorad::phantom::{make_phantom, PhantomSpec, Shape, Texture};
    use morphorad::volume::BinPolicy;
    let (vol, mask) = make_phantom(&PhantomSpec {
        dims: [32; 3],
        shape: Shape::Cube { s: 26 },
        texture: Texture::Stripes { period: 4, axis: 0 },
        ..PhantomSpec::default()
    })
    .unwrap();
    let shift = intensity_shift(&vol, &mask).unwrap();
    let series = covariance_series(&vol, &mask, shift, &DirectionSet13::canonical(), BinPolicy::default()).unwrap();
    // direction 2 is the y axis: bright voxels only lose partners beyond the VOI
    let curve: Vec<f64> = series.entries[20..30].iter().map(|(_, m)| m.volume).collect();
    assert!(curve.windows(2).all(|w| w[1] <= w[0]), "{curve:?}");
}
