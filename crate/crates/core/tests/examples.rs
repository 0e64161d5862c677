macro_rules! example {
    ($name:ident) => {
        mod $name {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", stringify!($name), ".rs"));
        }

        #[test]
        fn $name() {
            $name::run_example().unwrap();
        }
    };
}

example!(scattering);
example!(minimal_form_factor);
example!(form_factors);
example!(custom_model);
example!(kernel_expansion);
example!(two_point_series);
example!(zn_scan);
example!(energy_functional);
example!(equilibrium_measure);
example!(asymptotics);
