use std::time::Instant;
use holoqec::decoder::{Decoder, DEFAULT_FRONTIER_CAP};
use holoqec::lego::{build_code, inflate, seed_library, InflationRule};
use holoqec::noise::{Axis, BiasVector, ChannelSpec};
use holoqec::threshold::logical_error_rate;

fn main() {
    let lib = seed_library();
    for (seed, max_l) in [("happy", 3u32), ("steane", 2), ("613", 2), ("scf", 3)] {
        for layers in 0..=max_l {
            let t0 = Instant::now();
            let tiling = inflate(&lib[seed], layers, &InflationRule::default()).unwrap();
            let hcode = build_code(&tiling, &lib).unwrap();
            let build_ms = t0.elapsed().as_millis();
            let t0 = Instant::now();
            let dec = Decoder::new(&hcode, &lib, DEFAULT_FRONTIER_CAP).unwrap();
            let prep_ms = t0.elapsed().as_millis();
            let spec = ChannelSpec::new(0.18, BiasVector::depolarizing()).unwrap();
            let shots = match layers { 0 | 1 => 2000, 2 => 400, _ => 60 };
            let t0 = Instant::now();
            let est = logical_error_rate(&dec, &spec, shots, 42);
            let per_shot = t0.elapsed().as_secs_f64() * 1e3 / shots as f64;
            println!(
                "{seed} L{layers}: n={:<4} tiles={:<4} mult={:<3} frontier={} build={build_ms}ms prep={prep_ms}ms decode={per_shot:.2}ms/shot rate={:.3}",
                hcode.code.n(), tiling.tiles.len(), hcode.multiplicity_rank,
                dec.plan().max_frontier, est.rate,
            );
        }
    }
    let tiling = inflate(&lib["happy"], 3, &InflationRule::default()).unwrap();
    let hcode = build_code(&tiling, &lib).unwrap();
    let dec = Decoder::new(&hcode, &lib, DEFAULT_FRONTIER_CAP).unwrap();
    let spec = ChannelSpec::new(0.5, BiasVector::pure(Axis::Z)).unwrap();
    let t0 = Instant::now();
    let est = logical_error_rate(&dec, &spec, 60, 42);
    println!("happy L3 pure-Z: decode={:.2}ms/shot rate={:.3}", t0.elapsed().as_secs_f64() * 1e3 / 60.0, est.rate);
}
