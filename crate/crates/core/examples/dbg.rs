use qlga::*;
use std::f64::consts::PI;
use std::time::Instant;

fn main() {
    let p = RuleParams::new(PI / 3.0, PI / 4.0);

    // --- Fig 12: N=256, well depth pi/24, three smallest positive omegas
    let t0 = Instant::now();
    let lattice = LatticeSpec::new(256).unwrap();
    let rule = LocalRule::new(&p);
    let well = PotentialProfile::square_well(lattice, PI / 24.0);
    let u = assemble_global_u(&rule, &well, lattice).unwrap();
    let spec = eigendecompose_unitary(&u).unwrap();
    let elapsed = t0.elapsed();
    let pos: Vec<f64> = spec
        .omegas
        .iter()
        .copied()
        .filter(|w| *w > 0.0)
        .take(6)
        .collect();
    println!("512x512 eigensolve in {elapsed:?}");
    println!("smallest positive omegas: {pos:?}");
    println!("pi/12 = {}", PI / 12.0);
    println!(
        "max residual {:.3e}",
        spec.residuals.iter().cloned().fold(0.0, f64::max)
    );

    // --- Fig 8: massless packet velocity
    let massless = RuleParams::new(PI / 6.0, PI / 6.0);
    let lat64 = LatticeSpec::new(64).unwrap();
    let spec8 = WavePacketSpec::new(PI / 32.0, 31, 32);
    let packet = wave_packet(&spec8, &massless, lat64).unwrap();
    let rule_m = LocalRule::new(&massless);
    let flat = PotentialProfile::flat(lat64);
    let traj = evolve(&packet, &rule_m, &flat, 49).unwrap();
    let diag = track_packet(&traj, &[]).unwrap();
    println!(
        "fig8 massless: peaks[0]={} peaks[49]={} v={}",
        diag.peak_positions[0], diag.peak_positions[49], diag.measured_group_velocity
    );
    let spectrum = fourier_amplitudes(&packet, &massless);
    let (l, r, s0) = spectrum.directional_probabilities();
    println!("fig8 modal split: left={l:.3e} right={r:.6} still={s0:.3e}");

    // velocity measured over a few different horizons
    for t in [10, 20, 30, 36, 40, 45] {
        let d = track_packet(&traj[..=t], &[]).unwrap();
        println!(
            "  horizon {t}: peak {} v {:.4}",
            d.peak_positions[t], d.measured_group_velocity
        );
    }

    // --- Fig 5 vs Fig 6: terminal peak probabilities
    let spec5 = WavePacketSpec::new(PI / 4.0, 31, 32);
    let spec6 = WavePacketSpec::new(PI / 4.0, 31, 8);
    for (name, sp) in [("fig5 s=32", spec5), ("fig6 s=8", spec6)] {
        let pk = wave_packet(&sp, &p, lat64).unwrap();
        let tr = evolve(&pk, &rule, &flat, 49).unwrap();
        let d0 = pk.probability_density();
        let dt = tr[49].probability_density();
        let p0 = d0.iter().cloned().fold(0.0, f64::max);
        let pt = dt.iter().cloned().fold(0.0, f64::max);
        println!("{name}: initial peak {p0:.4}, terminal peak {pt:.4}, ratio {:.3}", pt / p0);
    }

    // --- Figs 14-16: transmission past x=48 at t=49 for three well depths
    for depth in [PI / 6.0, PI / 4.0, PI / 3.0] {
        let wellp = PotentialProfile::square_well(lat64, depth);
        let pk = wave_packet(&spec5, &p, lat64).unwrap();
        let tr = evolve(&pk, &rule, &wellp, 49).unwrap();
        let d = track_packet(&tr, &[Region::new(48, 16)]).unwrap();
        let past = tr[49]
            .probability_density()
            .iter()
            .enumerate()
            .filter(|(x, _)| (48..64).contains(x))
            .map(|(_, v)| v)
            .sum::<f64>();
        println!(
            "depth {depth:.4}: prob past 48..64 at t=49 = {past:.4}, outside-well region = {:.4}",
            d.region_probabilities[0][49]
        );
    }

    // --- homogeneous N=32 spectrum vs closed form (criterion 4 preview)
    let lat32 = LatticeSpec::new(32).unwrap();
    let u32 = assemble_global_u(&rule, &PotentialProfile::flat(lat32), lat32).unwrap();
    let s32 = eigendecompose_unitary(&u32).unwrap();
    let closed = homogeneous_spectrum(&p, lat32);
    let worst = s32
        .omegas
        .iter()
        .zip(&closed)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("homogeneous N=32 multiset max diff: {worst:.3e}");
}
