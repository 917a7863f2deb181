// Each example doubles as a smoke test in its quick configuration.

macro_rules! example {
    ($name:ident) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", stringify!($name), ".rs"));
        }

        #[test]
        fn $name() {
            $name::run_example().unwrap();
        }
    };
}

example!(fit_predict);
example!(confidence_intervals);
example!(paired_chi2);
example!(effect_grid);
example!(interaction_test);
example!(tree_swap);
example!(importance_catalog);
example!(tree_variants);
example!(snr_sweep);
example!(augmented_bagging);
example!(migration_demo);
example!(bias_replications);
