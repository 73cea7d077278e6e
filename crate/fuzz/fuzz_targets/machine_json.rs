// SPDX-License-Identifier: Apache-2.0
#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(m) = rte::machines::Machine::from_json(s) {
            let _ = m.to_dot("fuzz");
        }
    }
});
