// Command line front end: CSV in, split reports and plot data out.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "demandsplit/io.hpp"
#include "demandsplit/splitter.hpp"
#include "demandsplit/synth.hpp"

namespace ds = demandsplit;

namespace {

struct CommonOpts {
    ds::RunConfig cfg;
    std::string input;
};

void add_config_flags(CLI::App* sub, ds::RunConfig& cfg) {
    sub->add_option("--bins", cfg.bins, "histogram classes (default 20)");
    sub->add_option("--z-threshold", cfg.z_threshold, "one-sided z-score cutoff (default 3.1)");
    sub->add_option("--bo-threshold", cfg.bo_threshold,
                    "back-order fraction above which negative weeks are removed (default 0.003)");
    sub->add_option("--red-cov", cfg.red_cov_threshold,
                    "CoV above which a product is RED (default 2.0; portfolios of 5+ products "
                    "derive their own)");
    sub->add_option("--shift-tolerance", cfg.shift_tolerance,
                    "mean-shift / pooled-std ratio above which a break is major (default 1.0)");
    sub->add_option("--seed", cfg.seed, "random seed (default 1)");
    sub->add_option("--out", cfg.output_dir, "output directory (default demandsplit_out)");
}

void add_input_arg(CLI::App* sub, CommonOpts& o) {
    sub->add_option("input", o.input, "CSV with columns product_id,week,demand")
        ->required();
}

// DEMANDSPLIT_OUT wins over --out so wrappers can redirect without touching
// the argument list.
void apply_env(ds::RunConfig& cfg) {
    if (const char* env = std::getenv("DEMANDSPLIT_OUT"); env && *env)
        cfg.output_dir = env;
}

std::ofstream open_out(const std::filesystem::path& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / name, std::ios::binary);
    if (!out)
        throw ds::InputError("cannot write " + (dir / name).string());
    return out;
}

int cmd_analyze(const CommonOpts& o) {
    const auto products = ds::load_series_file(o.input);
    const auto all = ds::analyze_portfolio(products, o.cfg);
    ds::write_portfolio_outputs(o.cfg.output_dir, all);
    for (const auto& a : all) {
        const auto& r = a.report;
        std::cout << r.product_id << ' ' << ds::to_string(r.traffic_light) << ' '
                  << ds::to_string(r.outcome);
        if (r.savings_pct) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.2f", *r.savings_pct);
            std::cout << " savings " << buf << '%';
        }
        std::cout << '\n';
    }
    std::cout << "wrote " << o.cfg.output_dir << '\n';
    return 0;
}

int cmd_split(const CommonOpts& o) {
    const auto products = ds::load_series_file(o.input);
    const auto all = ds::analyze_portfolio(products, o.cfg);
    int written = 0;
    for (const auto& a : all) {
        if (!a.split) {
            std::cerr << a.report.product_id << ": no split ("
                      << ds::to_string(a.report.outcome) << ")\n";
            continue;
        }
        auto out = open_out(o.cfg.output_dir, a.report.product_id + "_split.csv");
        ds::write_split_csv(out, a);
        ++written;
    }
    std::cout << "wrote " << written << " split file(s) to " << o.cfg.output_dir << '\n';
    return 0;
}

int cmd_innovation(const CommonOpts& o) {
    const auto products = ds::load_series_file(o.input);
    std::vector<std::pair<std::string, ds::Breakpoint>> rows;
    for (const auto& y : products) {
        ds::validate_series(y);
        const auto filtered = ds::filter_backorders(y, o.cfg.bo_threshold);
        ds::Breakpoint bp;
        try {
            bp = ds::innovation_candidate(filtered.series, o.cfg.linkage_for_innovation);
        } catch (const ds::InsufficientDataError&) {
            bp.earlier_mean = bp.later_mean =
                filtered.series.size() > 0 ? ds::mean(filtered.series.demand) : 0.0;
        }
        rows.emplace_back(y.product_id, bp);
    }
    auto out = open_out(o.cfg.output_dir, "innovation.csv");
    ds::write_innovation_csv(out, rows, o.cfg.shift_tolerance);
    std::cout << "wrote " << (std::filesystem::path(o.cfg.output_dir) / "innovation.csv").string()
              << '\n';
    return 0;
}

int cmd_practitioner(const CommonOpts& o) {
    const auto products = ds::load_series_file(o.input);

    std::vector<double> covs;
    for (const auto& y : products) {
        ds::validate_series(y);
        const auto filtered = ds::filter_backorders(y, o.cfg.bo_threshold);
        const auto det = ds::remove_linear_trend(filtered.series);
        covs.push_back(ds::coefficient_of_variation(det.values));
    }
    const double red = products.size() >= 5 ? ds::portfolio_red_threshold(covs)
                                            : o.cfg.red_cov_threshold;

    auto out = open_out(o.cfg.output_dir, "practitioner.csv");
    out << "product_id,traffic_light,mts_upper,mto_lower\n";
    for (std::size_t i = 0; i < products.size(); ++i) {
        const auto filtered = ds::filter_backorders(products[i], o.cfg.bo_threshold);
        bool broke = false;
        if (covs[i] <= red && filtered.series.size() >= 4)
            broke = ds::detect_innovation(filtered.series, o.cfg.shift_tolerance).has_value();
        const auto tl = ds::classify_traffic_light(covs[i], broke, red);
        out << products[i].product_id << ',' << ds::to_string(tl) << ',';
        if (tl == ds::TrafficLight::green) {
            try {
                const auto h = ds::build_histogram(filtered.series.demand, o.cfg.bins);
                const auto t = ds::practitioner_thresholds(h);
                char buf[64];
                std::snprintf(buf, sizeof buf, "%.4f,%.4f", t.mts_upper, t.mto_lower);
                out << buf;
            } catch (const ds::DegenerateDataError&) {
                out << ','; // no spread, thresholds undefined
            }
        } else {
            out << ',';
        }
        out << '\n';
    }
    std::cout << "wrote "
              << (std::filesystem::path(o.cfg.output_dir) / "practitioner.csv").string() << '\n';
    return 0;
}

struct SynthOpts {
    ds::SynthSpec spec;
    int products = 1;
    std::string id_prefix = "SYN";
    int break_week = 0;
    double break_mean = 0.0;
    std::string output_dir = "demandsplit_out";
};

int cmd_synth(SynthOpts& o) {
    if (o.products < 1)
        throw ds::ParameterError("--products must be at least 1");
    if (o.break_week > 0)
        o.spec.breakpoint = {o.break_week, o.break_mean};

    std::vector<ds::TimeSeries> series;
    std::vector<ds::SynthResult> results;
    for (int i = 0; i < o.products; ++i) {
        ds::SynthSpec spec = o.spec;
        char suffix[16];
        std::snprintf(suffix, sizeof suffix, "%02d", i + 1);
        spec.product_id = o.id_prefix + suffix;
        spec.seed = o.spec.seed + static_cast<std::uint64_t>(i);
        auto r = ds::generate_hybrid(spec);
        series.push_back(r.series);
        results.push_back(std::move(r));
    }

    {
        auto out = open_out(o.output_dir, "synthetic.csv");
        ds::write_series_csv(out, series);
    }
    for (const auto& r : results) {
        auto out = open_out(o.output_dir, r.series.product_id + "_truth.csv");
        ds::write_ground_truth_csv(out, r);
    }
    std::cout << "wrote " << o.products << " product(s) to " << o.output_dir
              << "/synthetic.csv\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Split hybrid make-to-stock / make-to-order weekly demand series"};
    app.require_subcommand(1);

    CommonOpts analyze_o, split_o, innovation_o, practitioner_o;
    auto* analyze = app.add_subcommand(
        "analyze", "full portfolio analysis: summary, volumes, per-product reports");
    add_input_arg(analyze, analyze_o);
    add_config_flags(analyze, analyze_o.cfg);

    auto* split = app.add_subcommand("split", "emit only the per-product week,y,y_s,y_o tables");
    add_input_arg(split, split_o);
    add_config_flags(split, split_o.cfg);

    auto* innovation =
        app.add_subcommand("innovation", "structural-break candidates per product");
    add_input_arg(innovation, innovation_o);
    add_config_flags(innovation, innovation_o.cfg);

    auto* practitioner = app.add_subcommand(
        "practitioner", "frequency-drop threshold shortcut on the raw histogram");
    add_input_arg(practitioner, practitioner_o);
    add_config_flags(practitioner, practitioner_o.cfg);

    SynthOpts synth_o;
    auto* synth = app.add_subcommand("synth", "generate labeled synthetic demand series");
    synth->add_option("--weeks", synth_o.spec.n_weeks, "series length (default 104)");
    synth->add_option("--spikes", synth_o.spec.spike_count,
                      "number of make-to-order spike weeks (default 0)");
    synth->add_option("--mean", synth_o.spec.base_mean, "base level mean (default 1000)");
    synth->add_option("--cov", synth_o.spec.base_cov,
                      "base coefficient of variation (default 0.5)");
    synth->add_option("--trend", synth_o.spec.trend_slope, "linear trend per week (default 0)");
    synth->add_option("--multiplier", synth_o.spec.spike_multiplier,
                      "spike size vs base level (default 8)");
    auto* bw = synth->add_option("--break-week", synth_o.break_week,
                                 "week where the level shifts to --break-mean");
    synth->add_option("--break-mean", synth_o.break_mean, "level mean from --break-week on")
        ->needs(bw);
    synth->add_option("--products", synth_o.products, "number of products (default 1)");
    synth->add_option("--id", synth_o.id_prefix, "product id prefix (default SYN)");
    synth->add_option("--seed", synth_o.spec.seed, "random seed (default 1)");
    synth->add_option("--out", synth_o.output_dir, "output directory (default demandsplit_out)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*synth) {
            if (const char* env = std::getenv("DEMANDSPLIT_OUT"); env && *env)
                synth_o.output_dir = env;
            return cmd_synth(synth_o);
        }
        CommonOpts* o = *analyze        ? &analyze_o
                        : *split        ? &split_o
                        : *innovation   ? &innovation_o
                                        : &practitioner_o;
        apply_env(o->cfg);
        ds::validate_config(o->cfg);
        if (*analyze)
            return cmd_analyze(*o);
        if (*split)
            return cmd_split(*o);
        if (*innovation)
            return cmd_innovation(*o);
        return cmd_practitioner(*o);
    } catch (const ds::InternalError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const ds::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
