// SPDX-License-Identifier: Apache-2.0
#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(x) = rte::machines::parse_word(s) {
            let text = rte::machines::render_word(&x);
            assert_eq!(rte::machines::parse_word(&text).as_ref(), Ok(&x));
        }
    }
});
