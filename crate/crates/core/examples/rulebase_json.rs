//! Induce a rule base, save it as JSON and load it back.
//!
//! ```bash
//! cargo run -p tskplus --example rulebase_json
//! ```

use tskplus::prelude::*;

fn main() -> Result<()> {
    let rows = vec![
        (vec![1.0, 10.0], 1),
        (vec![1.5, 11.0], 1),
        (vec![1.2, 10.4], 1),
        (vec![4.0, 30.0], 3),
        (vec![4.4, 29.0], 3),
        (vec![4.1, 31.0], 3),
    ];
    let data = fit_normalization(&Dataset::from_rows(rows)?)?;
    let config = TrainingConfig {
        strategy: ConsequentStrategy::PerClass,
        label_universe: Some(vec![1, 2, 3]),
        ..Default::default()
    };
    let rb = extract_rules(&data, &[0, 1], &config)?;
    for rule in rb.rules() {
        let sets: Vec<[f64; 3]> = rule.antecedents.iter().map(|a| a.params()).collect();
        println!(
            "IF {sets:.3?} THEN {} (support {})",
            rule.consequent, rule.support_count
        );
    }

    let json = rb.to_json();
    println!("\n{json}");
    let loaded = RuleBase::from_json(&json)?;
    assert_eq!(loaded, rb);

    let p = explain(&loaded, &[2.7, 20.0])?;
    println!(
        "midpoint observation: gamma = {:.3}, label = {}, firings = {:.4?}",
        p.gamma,
        p.label,
        p.per_rule_firings.unwrap_or_default()
    );
    Ok(())
}
