//! Intervention-intensity indices from daily per-outlet article counts and
//! from sanctioned-entity list flows.

mod measures;
mod panel;

pub use measures::{
    build_indices, grid_search_weight, monthly_mean_count, net_index, normalize_unit_max, sdn_index,
    standardized_monthly_count, standardized_monthly_count_within, weight_grid, write_indices, CountVariant,
    GridPoint, IndexBundle, IndexKind, IndexSettings, IntensityIndex, MonthlyCounts, WeightChoice, WeightSearch,
};
pub use panel::{ArticleCountPanel, EntityFlowSeries};
