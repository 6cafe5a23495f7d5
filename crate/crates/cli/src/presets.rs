//! Column maps for the public benchmark datasets. The files themselves are
//! not vendored; point `--data` at your local copy and pick the preset.

/// Column configuration of a known dataset layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetPreset {
    pub name: &'static str,
    pub label_column: &'static str,
    /// Raw label value that is the desirable outcome for the individual.
    pub positive_label: &'static str,
    pub group_column: &'static str,
    pub categorical_columns: &'static [&'static str],
    pub notes: &'static str,
}

pub const PRESETS: &[DatasetPreset] = &[
    DatasetPreset {
        name: "adult",
        label_column: "income",
        positive_label: ">50K",
        group_column: "sex",
        categorical_columns: &[
            "workclass",
            "education",
            "marital-status",
            "occupation",
            "relationship",
            "race",
            "native-country",
        ],
        notes: "UCI adult census income; positive = earning at least 50K",
    },
    DatasetPreset {
        name: "compas",
        label_column: "two_year_recid",
        // re-arrest within two years is the undesirable outcome, so the
        // desirable label is the raw value 0
        positive_label: "0",
        group_column: "race",
        categorical_columns: &["sex", "c_charge_degree", "age_cat"],
        notes: "ProPublica COMPAS recidivism, filtered to two race groups; \
                positive = no re-arrest within two years",
    },
    DatasetPreset {
        name: "law",
        label_column: "pass_bar",
        positive_label: "1",
        group_column: "gender",
        categorical_columns: &["race"],
        notes: "law school admissions; positive = passed the bar exam",
    },
    DatasetPreset {
        name: "dutch",
        label_column: "occupation",
        positive_label: "1",
        group_column: "sex",
        categorical_columns: &[
            "household_position",
            "household_size",
            "citizenship",
            "country_birth",
            "economic_status",
            "cur_eco_activity",
            "marital_status",
        ],
        notes: "Dutch census; positive = prestigious occupation; sweeps \
                conventionally use offsets {9, 9.5, 10} instead of {8, 9, 10}",
    },
];

pub fn preset(name: &str) -> Option<&'static DatasetPreset> {
    PRESETS.iter().find(|p| p.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_presets_resolve() {
        for name in ["adult", "compas", "law", "dutch"] {
            assert!(preset(name).is_some());
        }
        assert!(preset("unknown").is_none());
    }
}
