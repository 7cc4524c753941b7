//! Scratch diagnostics for the reference constants (not part of the test suite).

use sgrip_core::sim::{
    peak_penetration, simulate_episode, DomainShift, EpisodeConfig, GripperConfig, ObjectSpec,
    Shape, EPISODE_CHANNELS,
};

fn main() {
    let gripper = GripperConfig::default();
    let cfg = EpisodeConfig::default();

    println!("== peak tip penetration (mm)");
    for shape in Shape::ALL {
        print!("  {shape:9}");
        for k in [300.0, 575.0, 850.0, 1125.0, 1400.0] {
            let object = ObjectSpec::reference(shape, k);
            match peak_penetration(&gripper, &object, &cfg) {
                Ok(p) => print!("  {:6.2}", p * 1000.0),
                Err(e) => print!("  ERR({e})"),
            }
        }
        println!();
    }

    println!("== shifted-dynamics stability sweep");
    for (jd, cd, jit) in [(1.6, 0.5, 0.1), (0.5, 1.6, 0.1), (1.8, 1.8, 0.2)] {
        for shape in Shape::ALL {
            for k in [300.0, 1400.0] {
                let object = ObjectSpec::reference(shape, k);
                let mut c = cfg.clone();
                c.domain_shift = Some(DomainShift {
                    joint_damping_scale: jd,
                    contact_damping_scale: cd,
                    accel_bias: [0.3, -0.2, 0.4],
                    gyro_bias: [0.02, -0.01, 0.05],
                    torque_profile_jitter: jit,
                });
                c.seed = 9;
                match simulate_episode(&gripper, &object, &c) {
                    Ok(_) => {}
                    Err(e) => println!("  FAIL jd={jd} cd={cd} {shape} k={k}: {e}"),
                }
            }
        }
        println!("  shift jd={jd} cd={cd} jitter={jit}: ok");
    }

    println!("== channel ranges per shape at k=700");
    for shape in Shape::ALL {
        let ep = simulate_episode(&gripper, &ObjectSpec::reference(shape, 700.0), &cfg).unwrap();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut glo = f64::INFINITY;
        let mut ghi = f64::NEG_INFINITY;
        for t in 0..200 {
            for c in 0..EPISODE_CHANNELS {
                let v = ep.at(t, c);
                if c % 6 < 3 {
                    lo = lo.min(v);
                    hi = hi.max(v);
                } else {
                    glo = glo.min(v);
                    ghi = ghi.max(v);
                }
            }
        }
        println!("  {shape:9} accel [{lo:8.2}, {hi:8.2}]  gyro [{glo:7.2}, {ghi:7.2}]");
    }
}
