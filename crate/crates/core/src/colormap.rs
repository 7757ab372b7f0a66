//! Fixed 256-entry color ramps used by the threshold visualization.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::imaging::Rgb;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ColormapName {
    #[default]
    Viridis,
    Magma,
}

impl ColormapName {
    pub fn parse(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "viridis" => Some(ColormapName::Viridis),
            "magma" => Some(ColormapName::Magma),
            _ => None,
        }
    }

    pub fn table(self) -> &'static [Rgb; 256] {
        static VIRIDIS: OnceLock<[Rgb; 256]> = OnceLock::new();
        static MAGMA: OnceLock<[Rgb; 256]> = OnceLock::new();
        match self {
            ColormapName::Viridis => {
                VIRIDIS.get_or_init(|| parse_table(include_str!("../data/colormaps/viridis.txt")))
            }
            ColormapName::Magma => {
                MAGMA.get_or_init(|| parse_table(include_str!("../data/colormaps/magma.txt")))
            }
        }
    }

    pub fn lookup(self, luma: u8) -> Rgb {
        self.table()[luma as usize]
    }
}

fn parse_table(text: &str) -> [Rgb; 256] {
    let mut table = [[0u8; 3]; 256];
    let mut rows = 0;
    for (slot, line) in table.iter_mut().zip(text.lines()) {
        let mut it = line.split_whitespace().map(|v| v.parse::<u8>().expect("colormap entry"));
        *slot = [
            it.next().expect("red"),
            it.next().expect("green"),
            it.next().expect("blue"),
        ];
        rows += 1;
    }
    assert_eq!(rows, 256, "colormap must have 256 rows");
    table
}
