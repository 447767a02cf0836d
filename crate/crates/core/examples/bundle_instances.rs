//! Regenerates the bundled benchmark instances under `instances/`.
//!
//! Each instance matches a target activity count, schedule count (to four
//! significant digits) and network path count. Mode counts are found by a
//! seeded random search, then edge seeds are tried until the path count fits.
//!
//! Usage: `cargo run -p tct-core --example bundle_instances [out_dir]`

use std::fs;
use std::path::PathBuf;

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tct_core::project::{
    format_instance, format_manifest, generate_with_mode_counts, Manifest, ProjectNetwork,
};

enum Modes {
    /// Draw counts uniformly from the range until the product fits.
    Search { lo: usize, hi: usize },
    /// Use this multiset, shuffled.
    Fixed(&'static [usize]),
}

struct Target {
    name: &'static str,
    activities: usize,
    /// Schedule count as `mantissa * 10^exponent`, mantissa with 4 digits.
    mantissa: u64,
    exponent: u32,
    paths: u64,
    modes: Modes,
}

const TARGETS: [Target; 6] = [
    Target {
        name: "p1",
        activities: 63,
        mantissa: 1373,
        exponent: 42,
        paths: 28,
        modes: Modes::Search { lo: 3, hi: 8 },
    },
    Target {
        name: "p2",
        activities: 29,
        mantissa: 8264,
        exponent: 6,
        paths: 46,
        // No product of small counts over 29 activities lands in the target
        // window without single-mode activities.
        modes: Modes::Fixed(&[
            2, 2, 2, 2, 2, 3, 3, 3, 3, 5, 7, 7, 7, 11, 13, 13, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1,
            1,
        ]),
    },
    Target {
        name: "p3",
        activities: 18,
        mantissa: 1494,
        exponent: 7,
        paths: 11,
        modes: Modes::Fixed(&[7, 7, 7, 7, 5, 5, 6, 6, 6, 3, 3, 2, 2, 2, 2, 2, 2, 2]),
    },
    Target {
        name: "p4",
        activities: 14,
        mantissa: 2831,
        exponent: 4,
        paths: 11,
        modes: Modes::Fixed(&[4, 4, 4, 4, 4, 4, 4, 4, 4, 3, 3, 3, 2, 2]),
    },
    Target {
        name: "p5",
        activities: 9,
        mantissa: 1500,
        exponent: 3,
        paths: 5,
        modes: Modes::Fixed(&[5, 5, 5, 5, 5, 5, 4, 4, 6]),
    },
    // 5569 is prime, so no product of 7 small mode counts equals it; the
    // nearest convenient product 5670 is used instead.
    Target {
        name: "p6",
        activities: 7,
        mantissa: 5670,
        exponent: 0,
        paths: 3,
        modes: Modes::Fixed(&[2, 3, 3, 3, 3, 5, 7]),
    },
];

const DENSITIES: [f64; 8] = [0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.5];

fn product(counts: &[usize]) -> BigUint {
    counts.iter().map(|&c| BigUint::from(c)).product()
}

/// `round(p / 10^exponent) == mantissa`.
fn fits(p: &BigUint, mantissa: u64, exponent: u32) -> bool {
    let scale = BigUint::from(10u32).pow(exponent);
    let rounded = (p + &scale / 2u32) / &scale;
    rounded == BigUint::from(mantissa)
}

fn mode_counts(t: &Target, rng: &mut ChaCha8Rng) -> Vec<usize> {
    match t.modes {
        Modes::Fixed(counts) => {
            let mut c = counts.to_vec();
            c.shuffle(rng);
            c
        }
        Modes::Search { lo, hi } => loop {
            let c: Vec<usize> = (0..t.activities)
                .map(|_| rng.random_range(lo..=hi))
                .collect();
            if fits(&product(&c), t.mantissa, t.exponent) {
                return c;
            }
        },
    }
}

fn build(t: &Target) -> (ProjectNetwork, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7c7 ^ t.activities as u64);
    let counts = mode_counts(t, &mut rng);
    for seed in 0..200_000u64 {
        for &density in &DENSITIES {
            let net = generate_with_mode_counts(&counts, density, seed).expect("valid parameters");
            if net.count_paths() == BigUint::from(t.paths) {
                let note = format!(
                    "# {}: {} activities, {} schedules, {} paths (generated, density {density}, seed {seed})\n",
                    t.name,
                    t.activities,
                    net.count_schedules(),
                    t.paths
                );
                return (net, note);
            }
        }
    }
    panic!("no edge seed gives {} paths for {}", t.paths, t.name);
}

fn main() {
    let out: PathBuf = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../instances"));
    fs::create_dir_all(&out).expect("create output directory");
    for t in &TARGETS {
        let (net, note) = build(t);
        let path = out.join(format!("{}.tct", t.name));
        fs::write(&path, format!("{note}{}", format_instance(&net))).expect("write instance");
        fs::write(
            path.with_extension("manifest"),
            format_manifest(&Manifest::of(&net)),
        )
        .expect("write manifest");
        print!("{note}");
    }
}
