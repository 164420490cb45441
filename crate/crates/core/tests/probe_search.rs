use spoof_core::search::{accept_result, expand, seeds, Expansion, SearchConfig, SearchContext};
use std::io::Write;
use std::time::Instant;

#[test]
fn probe_counts() {
    for (k, prune) in [(4usize, true), (5, true)] {
        let t = Instant::now();
        let mut config = SearchConfig::new(k);
        config.use_padic_prune = prune;
        let mut ctx = SearchContext::new();
        let mut stack = seeds(&config);
        let mut results = std::collections::BTreeSet::new();
        let mut nodes = 0u64;
        while let Some(node) = stack.pop() {
            nodes += 1;
            if nodes % 500_000 == 0 {
                println!("  ... {} nodes, stack {}, {:?}", nodes, stack.len(), t.elapsed());
                std::io::stdout().flush().unwrap();
            }
            match expand(&node, &config, &mut ctx) {
                Expansion::Complete(f) => {
                    if accept_result(&f, &config) {
                        results.insert(f);
                    }
                }
                Expansion::Children(children) => stack.extend(children),
            }
        }
        println!("k={} prune={} -> {} results, {} nodes, {:?}", k, prune, results.len(), nodes, t.elapsed());
        for f in &results {
            println!("    {}", f);
        }
        std::io::stdout().flush().unwrap();
    }
}
