// SPDX-License-Identifier: Apache-2.0
#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(h) = rte::expr::parse_rte_unchecked(s) {
            let again = rte::expr::parse_rte_unchecked(&h.to_string()).expect("printed expression reparses");
            assert_eq!(again, h);
        }
    }
});
