//! Statistical properties of the generated layers.

use cocontagion::graphgen::{
    gen_wsg_counted, mean_shortest_path, GraphKind, GraphSpec, LayerGraph,
};

fn degree_stats(g: &LayerGraph) -> (f64, f64, f64) {
    let d: Vec<f64> = g.degrees().into_iter().map(|x| x as f64).collect();
    let n = d.len() as f64;
    let mean = d.iter().sum::<f64>() / n;
    let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let skew = d.iter().map(|x| (x - mean).powi(3)).sum::<f64>() / n / var.powf(1.5);
    (mean, var, skew)
}

#[test]
fn wsg_rewired_count_is_binomial() {
    let (n, k, beta) = (6400, 4, 0.001);
    let slots = n * k / 2;
    let counts: Vec<f64> = (0..100)
        .map(|seed| {
            let (g, rewired) = gen_wsg_counted(&GraphSpec::wsg(n, k, beta, seed)).unwrap();
            assert_eq!(g.edge_count(), slots);
            rewired as f64
        })
        .collect();
    let mean = counts.iter().sum::<f64>() / counts.len() as f64;
    let expected = beta * slots as f64;
    let sigma = (slots as f64 * beta * (1.0 - beta) / counts.len() as f64).sqrt();
    assert!(
        (mean - expected).abs() <= 3.0 * sigma,
        "mean {mean} expected {expected} ± {}",
        3.0 * sigma
    );
}

#[test]
fn plg_degrees_are_right_skewed() {
    for seed in 0..20 {
        let g = GraphSpec::plg(1600, 2, seed).generate().unwrap();
        let (mean, _, skew) = degree_stats(&g);
        let max = *g.degrees().iter().max().unwrap() as f64;
        assert!(max >= mean);
        assert!(skew > 0.0, "seed {seed}: skewness {skew}");
        assert!(
            (mean - 4.0).abs() <= 0.02 * 4.0,
            "seed {seed}: mean degree {mean}"
        );
    }
}

#[test]
fn degree_variance_orders_rrg_erg_plg() {
    let mut totals = [0.0; 3];
    for seed in 0..20 {
        for (slot, spec) in [
            GraphSpec::rrg(1600, 4, seed),
            GraphSpec::erg(1600, 3200, seed),
            GraphSpec::plg(1600, 2, seed),
        ]
        .iter()
        .enumerate()
        {
            let (mean, var, _) = degree_stats(&spec.generate().unwrap());
            assert!((mean - 4.0).abs() < 0.08, "{:?} mean {mean}", spec.kind);
            totals[slot] += var;
        }
    }
    assert_eq!(totals[0], 0.0);
    assert!(totals[0] < totals[1] && totals[1] < totals[2], "{totals:?}");
}

#[test]
fn rewiring_shortens_paths() {
    let (mut short, mut long) = (0.0, 0.0);
    for seed in 0..20 {
        short += mean_shortest_path(
            &GraphSpec::wsg(1600, 4, 0.2, seed).generate().unwrap(),
            50,
            seed,
        )
        .mean;
        long += mean_shortest_path(
            &GraphSpec::wsg(1600, 4, 0.00125, seed).generate().unwrap(),
            50,
            seed,
        )
        .mean;
    }
    assert!(
        short < long,
        "beta=0.2: {} beta=0.00125: {}",
        short / 20.0,
        long / 20.0
    );
}

#[test]
fn full_rewiring_spreads_degrees() {
    let g = GraphSpec::wsg(6400, 4, 1.0, 3).generate().unwrap();
    let (mean, var, _) = degree_stats(&g);
    assert_eq!(mean, 4.0);
    assert!(var > 1.0, "variance {var}");
}

#[test]
fn generated_layers_round_trip_through_edge_lists() {
    for kind in GraphKind::ALL {
        let g = GraphSpec::new(kind, 400, 9).generate().unwrap();
        let back = LayerGraph::read_edge_list(g.to_edge_list().as_bytes()).unwrap();
        assert_eq!(back, g, "{kind}");
    }
}
