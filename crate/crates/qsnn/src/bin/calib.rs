use qsnn::artifacts::ArtifactWriter;
use qsnn::config::RunConfig;
use qsnn::linalg::hermitize;
use qsnn::nonmarkov::default_pair_set;
use qsnn::pipeline::*;
use qsnn::quantum;

fn main() {
    let cfg = RunConfig::default();
    let dir = std::path::Path::new("/tmp/qsnn_stage_probe2");
    std::fs::remove_dir_all(dir).ok();
    let mut writer = ArtifactWriter::new(dir).unwrap();
    let spike = run_spike_stage(&cfg, &mut writer).unwrap();
    let schedule = spike_to_theta(&spike.spikes, &cfg.mapping);
    let fock = cfg.quantum.fock().unwrap();
    let p = cfg.quantum.hamiltonian_params(schedule);
    let channels = cfg.quantum.collapse_channels().unwrap();
    let pairs = default_pair_set(&fock);
    for pair in &pairs {
        println!("pair {}...", pair.label);
        for (tag, state) in [("a", &pair.a), ("b", &pair.b)] {
            let result = std::panic::catch_unwind(|| {
                quantum::evolve(state, &p, &channels, &fock, cfg.blp.dt, cfg.blp.t_end, 1).map(|t| t.states.len())
            });
            match result {
                Ok(Ok(n)) => println!("  {tag}: ok ({n} states)"),
                Ok(Err(e)) => println!("  {tag}: error {e}"),
                Err(_) => {
                    println!("  {tag}: PANIC — scanning for first bad step");
                    // re-run raw integration without validation to find the state
                    let mut rho = state.matrix().clone();
                    let builder_p = p.clone();
                    let mut t = 0.0f64;
                    let dt = cfg.blp.dt;
                    for step in 0..((cfg.blp.t_end / dt) as usize) {
                        let h = quantum::hamiltonian_at(t, &builder_p, &fock);
                        let k1 = quantum::lindblad_rhs(&rho, &h, &channels).unwrap();
                        let h2 = quantum::hamiltonian_at(t + dt / 2.0, &builder_p, &fock);
                        let k2 = quantum::lindblad_rhs(&(&rho + k1.scale(dt / 2.0)), &h2, &channels).unwrap();
                        let k3 = quantum::lindblad_rhs(&(&rho + k2.scale(dt / 2.0)), &h2, &channels).unwrap();
                        let h4 = quantum::hamiltonian_at(t + dt, &builder_p, &fock);
                        let k4 = quantum::lindblad_rhs(&(&rho + k3.scale(dt)), &h4, &channels).unwrap();
                        rho += (k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(dt / 6.0);
                        let tr = rho.diagonal().iter().sum::<num_complex::Complex64>().re;
                        rho = hermitize(&rho).unscale(tr);
                        let eig = hermitize(&rho).symmetric_eigen();
                        if eig.eigenvalues.iter().any(|x| x.is_nan()) {
                            println!("    first NaN eigen at step {step}, t={:.6}", t + dt);
                            println!("    matrix diag: {:?}", rho.diagonal().iter().map(|z| z.re).collect::<Vec<_>>());
                            let off = rho.iter().map(|z| z.norm()).fold(0.0, f64::max);
                            println!("    max |entry| = {off:.3e}");
                            return;
                        }
                        t += dt;
                    }
                    return;
                }
            }
        }
    }
}
