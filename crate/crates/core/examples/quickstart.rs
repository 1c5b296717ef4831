use gospa_core::estimators::{optimal_by_enumeration, optimal_gospa2};
use gospa_core::set_metrics::gospa_alpha2_decomposed;
use gospa_core::{MetricConfig, MetricKind, MseEvaluator, MultiBernoulli, TargetSet};

fn main() -> gospa_core::Result<()> {
    // two components ten units apart
    let mb = MultiBernoulli::evenly_spaced(&[0.4, 0.9], 10.0)?;

    let ospa = optimal_by_enumeration(&mb, MetricKind::Ospa, 1.0, 2.0)?;
    assert_eq!(ospa.e_hat.to_string(), "0,1");
    assert!((ospa.objective_value - 0.28).abs() < 1e-12);

    let gospa = optimal_gospa2(&mb, 1.0)?;
    let mse = MseEvaluator::new(&mb, 1.0)?.msuospa(&gospa.e_hat)?;
    println!("OSPA estimate {} (MSE {:.4})", ospa.e_hat, ospa.objective_value);
    println!("GOSPA estimate {} (UOSPA MSE {mse:.4})", gospa.e_hat);

    let cfg = MetricConfig::euclidean(2.0, 1.0, 2.0)?;
    let x = TargetSet::from_scalars(&[0.3])?;
    let y = TargetSet::from_scalars(&[0.4, 5.0])?;
    let d = gospa_alpha2_decomposed(&x, &y, &cfg)?;
    println!(
        "GOSPA {:.4}: localisation {:.4}, missed {}, false {}",
        d.total, d.localisation_cost, d.missed_cost, d.false_cost
    );
    Ok(())
}
