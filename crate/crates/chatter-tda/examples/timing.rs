// scratch timing check
use chatter_tda::embedding::*;
use chatter_tda::persistence::*;
use chatter_tda::turning::*;

fn main() {
    for (name, b, speed) in [
        ("stable", 0.02f64, 1.0f64),
        ("chatter", 0.08, 1.0),
        ("chatter-lowspeed", 0.12, 0.35),
    ] {
        let params = TurningParams { zeta: 0.03, b, rho: 0.01, alpha: 0.75, speed_ratio: speed };
        let cfg = SimConfig::default();
        let t0 = std::time::Instant::now();
        let ts = simulate_deterministic(&params, &cfg).unwrap();
        let t_sim = t0.elapsed();
        let ec = EmbeddingConfig::default();
        let sub = truncate_and_subsample(&ts, &ec).unwrap();
        let acf = autocorrelation(&sub, default_max_lag(sub.len()));
        let (eta, cloud) = match acf {
            Ok(a) => {
                let eta = first_zero_lag(&a);
                (eta, takens_embed(&sub, eta, ec.embed_dim).unwrap())
            }
            Err(e) => { println!("{name}: acf err {e}"); continue; }
        };
        let t1 = std::time::Instant::now();
        let (pd0, pd1) = rips_diagrams(&cloud).unwrap();
        let t_pers = t1.elapsed();
        println!(
            "{name}: sim {:?}, eta {}, pts {}, persistence {:?}, |pd0| {}, |pd1| {}, maxper1 {:.4}",
            t_sim, eta, cloud.n_points(), t_pers, pd0.pairs.len(), pd1.pairs.len(), pd1.max_persistence()
        );
    }
}
