use handoff_core::layout::ApDescriptor;
use handoff_core::radio::{
    loss_prob, phy_rate, snr_at, AntennaPattern, Bandwidth, ChannelParams, LossParams, PhyRateTable,
};
use handoff_core::Vec3;
use proptest::prelude::*;

fn quiet() -> ChannelParams {
    ChannelParams {
        shadowing_sigma_db: 0.0,
        ..ChannelParams::default()
    }
}

proptest! {
    #[test]
    fn snr_falls_with_distance_along_a_ray(
        theta in 0.0..1.5f64, phi in 0.0..std::f64::consts::TAU, r1 in 0.1..30.0f64, extra in 0.01..30.0f64,
        omni in any::<bool>(),
    ) {
        let pos = Vec3::new(0.0, 0.0, 3.0);
        let ap = if omni { ApDescriptor::omni(0, pos) } else { ApDescriptor::ceiling(0, pos, 60.0, 9.0) };
        let dir = Vec3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), -theta.cos());
        let pat = AntennaPattern::default();
        let near = snr_at(&ap, &pat, &quiet(), pos + dir * r1).unwrap();
        let far = snr_at(&ap, &pat, &quiet(), pos + dir * (r1 + extra)).unwrap();
        prop_assert!(far < near);
    }

    #[test]
    fn shadowing_is_keyed_by_position(seed in any::<u64>(), x in 0.0..10.0f64, y in 0.0..15.0f64) {
        let ch = ChannelParams { seed, ..ChannelParams::default() };
        let p = Vec3::new(x, y, 1.0);
        prop_assert_eq!(ch.shadowing_db(3, p), ch.shadowing_db(3, p));
    }

    #[test]
    fn phy_rate_is_monotone(a in -20.0..60.0f64, b in -20.0..60.0f64, wide in any::<bool>()) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let t = PhyRateTable::default();
        let bw = if wide { Bandwidth::Mhz40 } else { Bandwidth::Mhz20 };
        prop_assert!(phy_rate(&t, lo, bw) <= phy_rate(&t, hi, bw));
        prop_assert!(phy_rate(&t, hi, Bandwidth::Mhz20) <= phy_rate(&t, hi, Bandwidth::Mhz40));
    }

    #[test]
    fn loss_is_a_probability_and_grows_with_speed(snr in -50.0..80.0f64, v in 0.0..500.0f64, dv in 0.0..10.0f64) {
        let p = LossParams::default();
        let l = loss_prob(&p, snr, v);
        prop_assert!((0.0..=1.0).contains(&l));
        prop_assert!(loss_prob(&p, snr, v + dv) >= l);
        prop_assert!(loss_prob(&p, snr + 5.0, v) <= l);
    }
}

#[test]
fn wide_channel_scales_every_step() {
    let t = PhyRateTable::default();
    for snr in [5.0, 15.0, 25.0, 40.0] {
        let (a, b) = (phy_rate(&t, snr, Bandwidth::Mhz20), phy_rate(&t, snr, Bandwidth::Mhz40));
        assert!((b / a - 1.96).abs() < 1e-12);
    }
    assert_eq!(phy_rate(&t, 0.0, Bandwidth::Mhz20), 0.0);
}
