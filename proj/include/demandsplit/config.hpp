#pragma once

#include <cstdint>
#include <string>

#include "demandsplit/cluster.hpp"

namespace demandsplit {

/// Tunables shared by the pipeline and the command line. The defaults are
/// the values the whole test suite is calibrated against.
struct RunConfig {
    int bins = 20;                    // histogram classes (>= 2; the 3-way cut needs >= 3)
    double z_threshold = 3.1;         // z-score outlier cutoff
    double bo_threshold = 0.003;      // back-order fraction above which weeks are removed
    double red_cov_threshold = 2.0;   // CoV beyond which a product is flagged red
    double shift_tolerance = 1.0;     // mean-shift multiple of pooled std for a major break
    Linkage linkage_for_classes = Linkage::upgma;
    Linkage linkage_for_innovation = Linkage::wpgma;
    std::uint64_t seed = 1;           // synthetic generation only
    std::string output_dir = "demandsplit_out";
};

void validate_config(const RunConfig& cfg);

} // namespace demandsplit
