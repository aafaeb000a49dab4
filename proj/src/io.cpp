#include "demandsplit/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace demandsplit {

namespace {

std::string fixed(double v, int prec) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    return buf;
}

std::string opt_fixed(const std::optional<double>& v, int prec, const char* suffix = "") {
    return v ? fixed(*v, prec) + suffix : std::string();
}

std::string trim(std::string s) {
    const auto is_space = [](unsigned char c) { return c == ' ' || c == '\t' || c == '\r'; };
    while (!s.empty() && is_space(s.back()))
        s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && is_space(s[i]))
        ++i;
    return s.substr(i);
}

long long parse_int(const std::string& field, std::size_t row, const char* what) {
    const std::string t = trim(field);
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size())
        throw InputError("row " + std::to_string(row) + ": " + what + " is not an integer: '"
                         + field + "'");
    return value;
}

std::string safe_filename(const std::string& id) {
    std::string out;
    for (char c : id)
        out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_'
                          ? c
                          : '_');
    return out.empty() ? std::string("product") : out;
}

} // namespace

std::vector<TimeSeries> load_series(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw InputError("empty input");
    if (trim(line) != "product_id,week,demand")
        throw InputError("expected header 'product_id,week,demand', got '" + trim(line) + "'");

    std::vector<std::string> order;
    std::map<std::string, std::map<int, double>> rows;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty())
            continue;
        std::stringstream ss(line);
        std::string id, week_s, demand_s, extra;
        if (!std::getline(ss, id, ',') || !std::getline(ss, week_s, ',')
            || !std::getline(ss, demand_s, ','))
            throw InputError("row " + std::to_string(row) + ": expected 3 fields");
        if (std::getline(ss, extra, ','))
            throw InputError("row " + std::to_string(row) + ": too many fields");
        id = trim(id);
        if (id.empty())
            throw InputError("row " + std::to_string(row) + ": empty product id");
        const long long week = parse_int(week_s, row, "week");
        const long long demand = parse_int(demand_s, row, "demand");
        if (week < 1)
            throw InputError("row " + std::to_string(row) + ": week must be 1-based");
        auto it = rows.find(id);
        if (it == rows.end()) {
            order.push_back(id);
            it = rows.emplace(id, std::map<int, double>{}).first;
        }
        if (!it->second.emplace(static_cast<int>(week), static_cast<double>(demand)).second)
            throw InputError("product " + id + ": duplicate week " + std::to_string(week));
    }
    if (order.empty())
        throw InputError("no data rows");

    std::vector<TimeSeries> out;
    out.reserve(order.size());
    for (const auto& id : order) {
        const auto& weeks = rows[id];
        TimeSeries s;
        s.product_id = id;
        s.demand = Vector(static_cast<Eigen::Index>(weeks.size()));
        int expected = 1;
        Eigen::Index i = 0;
        for (const auto& [week, demand] : weeks) {
            if (week != expected)
                throw InputError("product " + id + ": missing week " + std::to_string(expected));
            s.weeks.push_back(week);
            s.demand[i++] = demand;
            ++expected;
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<TimeSeries> load_series_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open " + path.string());
    return load_series(in);
}

void write_series_csv(std::ostream& out, const std::vector<TimeSeries>& products) {
    out << "product_id,week,demand\n";
    for (const auto& s : products)
        for (std::size_t i = 0; i < s.weeks.size(); ++i)
            out << s.product_id << ',' << s.weeks[i] << ','
                << fixed(s.demand[static_cast<Eigen::Index>(i)], 0) << '\n';
}

void write_split_csv(std::ostream& out, const ProductAnalysis& a) {
    if (!a.split)
        throw ParameterError("write_split_csv: product has no split");
    out << "week,y,y_s,y_o\n";
    const auto& y = a.analyzed;
    for (std::size_t i = 0; i < y.weeks.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        out << y.weeks[i] << ',' << fixed(y.demand[k], 0) << ','
            << fixed(a.split->mts_series[k], 4) << ',' << fixed(a.split->mto_series[k], 4)
            << '\n';
    }
}

void write_hist_csv(std::ostream& out, const ProductAnalysis& a) {
    if (!a.histogram || !a.thresholds)
        throw ParameterError("write_hist_csv: product has no histogram");
    out << "center,frequency,category\n";
    const Histogram& h = *a.histogram;
    for (int k = 0; k < h.classes(); ++k)
        out << fixed(h.centers[k], 4) << ',' << h.frequencies[k] << ','
            << to_string(a.thresholds->class_category[static_cast<std::size_t>(k)]) << '\n';
}

void write_plotdata_csv(std::ostream& out, const ProductAnalysis& a) {
    out << "week,demand,trend,moving_average\n";
    const auto& y = a.analyzed;
    const int window = 4;
    Vector ma;
    if (y.demand.size() >= window)
        ma = moving_average(y.demand, window);
    for (std::size_t i = 0; i < y.weeks.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        out << y.weeks[i] << ',' << fixed(y.demand[k], 0) << ',';
        if (a.detrended)
            out << fixed(a.detrended->intercept + a.detrended->slope * y.weeks[i], 4);
        out << ',';
        if (ma.size() > 0 && k + 1 >= window)
            out << fixed(ma[k + 1 - window], 4);
        out << '\n';
    }
}

std::string report_json(const ProductAnalysis& a) {
    using nlohmann::json;
    const ProductReport& r = a.report;
    json j;
    j["schema_version"] = 1;
    j["product_id"] = r.product_id;
    j["traffic_light"] = to_string(r.traffic_light);
    j["outcome"] = to_string(r.outcome);
    j["weeks_total"] = r.weeks_total;
    j["weeks_analyzed"] = r.weeks_analyzed;
    j["breakpoint_week"] = r.breakpoint_week ? json(*r.breakpoint_week) : json(nullptr);

    j["backorders"]["fraction_pct"] = 100.0 * r.bo_fraction;
    j["backorders"]["removed_weeks"] = r.removed_bo_weeks;

    json stats;
    stats["mean"] = r.stats.mean;
    stats["sample_std"] = r.stats.sample_std;
    stats["cov"] = r.stats.cov;
    stats["jb_statistic"] = r.stats.jb_statistic ? json(*r.stats.jb_statistic) : json(nullptr);
    stats["jb_normal_5pct"] =
        r.stats.jb_statistic ? json(*r.stats.jb_statistic < 5.99) : json(nullptr);
    stats["zscore_outlier_weeks"] = r.stats.zscore_outlier_weeks;
    stats["z_count"] = r.z_count;
    j["stats"] = stats;

    if (r.mts_upper) {
        j["thresholds"]["mts_upper"] = *r.mts_upper;
        j["thresholds"]["mto_lower"] = *r.mto_lower;
    } else {
        j["thresholds"] = nullptr;
    }

    if (r.volumes) {
        const CategoryVolumes& v = *r.volumes;
        json c;
        c["volume"] = {{"mts", v.mts}, {"grey", v.grey}, {"mto", v.mto}};
        c["volume_pct"] = {{"mts", v.mts_pct}, {"grey", v.grey_pct}, {"mto", v.mto_pct}};
        c["weeks"] = {{"mts", v.mts_weeks}, {"grey", v.grey_weeks}, {"mto", v.mto_weeks}};
        const double n = std::max(1, r.weeks_analyzed);
        c["week_pct"] = {{"mts", 100.0 * v.mts_weeks / n},
                         {"grey", 100.0 * v.grey_weeks / n},
                         {"mto", 100.0 * v.mto_weeks / n}};
        j["categories"] = c;
    } else {
        j["categories"] = nullptr;
    }

    json fin;
    if (a.split) {
        fin["mto_weeks"] = a.split->final_mto_weeks;
        fin["added_grey_weeks"] = a.split->candidates_added;
        fin["mts_mean_demand"] = a.split->mts_mean_demand;
    } else {
        fin["mto_weeks"] = json::array();
        fin["added_grey_weeks"] = json::array();
        fin["mts_mean_demand"] = nullptr;
    }
    fin["fmts"] = r.fmts ? json(*r.fmts) : json(nullptr);
    fin["fmto"] = r.fmto ? json(*r.fmto) : json(nullptr);
    fin["fmts_pct"] = r.fmts_pct ? json(*r.fmts_pct) : json(nullptr);
    fin["fmto_pct"] = r.fmto_pct ? json(*r.fmto_pct) : json(nullptr);
    fin["m_mts"] = r.m_mts ? json(*r.m_mts) : json(nullptr);
    j["final"] = fin;

    j["savings_pct"] = r.savings_pct ? json(*r.savings_pct) : json(nullptr);
    j["cov_s"] = r.cov_s ? json(*r.cov_s) : json(nullptr);
    j["cov_o"] = r.cov_o ? json(*r.cov_o) : json(nullptr);
    j["cov_reduction_violated"] = r.cov_reduction_violated;
    return j.dump(2) + "\n";
}

namespace {

// Column averages are over the populated cells of each column only.
class Averager {
public:
    void add(const std::optional<double>& v) {
        if (v) {
            sum_ += *v;
            ++count_;
        }
    }
    std::optional<double> value() const {
        if (count_ == 0)
            return std::nullopt;
        return sum_ / count_;
    }

private:
    double sum_ = 0.0;
    int count_ = 0;
};

} // namespace

void write_summary_csv(std::ostream& out, const std::vector<ProductAnalysis>& all) {
    out << "Product,TL,Savings,#weeks,CoV,CoV-S,CoV-O,BO,z\n";
    Averager savings, weeks, cov, cov_s, cov_o, bo, z;
    for (const auto& a : all) {
        const ProductReport& r = a.report;
        out << r.product_id << ',' << to_string(r.traffic_light) << ','
            << opt_fixed(r.savings_pct, 2, "%") << ',' << r.weeks_analyzed << ','
            << fixed(r.cov, 2) << ',' << opt_fixed(r.cov_s, 2) << ',' << opt_fixed(r.cov_o, 2)
            << ',' << fixed(100.0 * r.bo_fraction, 2) << "%," << r.z_count << '\n';
        savings.add(r.savings_pct);
        weeks.add(double(r.weeks_analyzed));
        cov.add(r.cov);
        cov_s.add(r.cov_s);
        cov_o.add(r.cov_o);
        bo.add(100.0 * r.bo_fraction);
        z.add(double(r.z_count));
    }
    out << "Average,," << opt_fixed(savings.value(), 2, "%") << ','
        << opt_fixed(weeks.value(), 1) << ',' << opt_fixed(cov.value(), 2) << ','
        << opt_fixed(cov_s.value(), 2) << ',' << opt_fixed(cov_o.value(), 2) << ','
        << opt_fixed(bo.value(), 2, "%") << ',' << opt_fixed(z.value(), 1) << '\n';
}

void write_volumes_csv(std::ostream& out, const std::vector<ProductAnalysis>& all) {
    out << "Product,TL,MTS,MT-S/O,MTO,MTS%,MT-S/O%,MTO%,fMTS,fMTO,fMTS%,fMTO%,mMTS\n";
    Averager mts, grey, mto, mts_pct, grey_pct, mto_pct, fmts, fmto, fmts_pct, fmto_pct, m_mts;
    for (const auto& a : all) {
        const ProductReport& r = a.report;
        out << r.product_id << ',' << to_string(r.traffic_light) << ',';
        if (r.volumes) {
            const CategoryVolumes& v = *r.volumes;
            out << fixed(v.mts, 0) << ',' << fixed(v.grey, 0) << ',' << fixed(v.mto, 0) << ','
                << fixed(v.mts_pct, 1) << "%," << fixed(v.grey_pct, 1) << "%,"
                << fixed(v.mto_pct, 1) << "%,";
            mts.add(v.mts);
            grey.add(v.grey);
            mto.add(v.mto);
            mts_pct.add(v.mts_pct);
            grey_pct.add(v.grey_pct);
            mto_pct.add(v.mto_pct);
        } else {
            out << ",,,,,,";
        }
        out << opt_fixed(r.fmts, 0) << ',' << opt_fixed(r.fmto, 0) << ','
            << opt_fixed(r.fmts_pct, 1, "%") << ',' << opt_fixed(r.fmto_pct, 1, "%") << ','
            << opt_fixed(r.m_mts, 0) << '\n';
        fmts.add(r.fmts);
        fmto.add(r.fmto);
        fmts_pct.add(r.fmts_pct);
        fmto_pct.add(r.fmto_pct);
        m_mts.add(r.m_mts);
    }
    out << "Average,," << opt_fixed(mts.value(), 0) << ',' << opt_fixed(grey.value(), 0) << ','
        << opt_fixed(mto.value(), 0) << ',' << opt_fixed(mts_pct.value(), 1, "%") << ','
        << opt_fixed(grey_pct.value(), 1, "%") << ',' << opt_fixed(mto_pct.value(), 1, "%")
        << ',' << opt_fixed(fmts.value(), 0) << ',' << opt_fixed(fmto.value(), 0) << ','
        << opt_fixed(fmts_pct.value(), 1, "%") << ',' << opt_fixed(fmto_pct.value(), 1, "%")
        << ',' << opt_fixed(m_mts.value(), 0) << '\n';
}

void write_innovation_csv(std::ostream& out,
                          const std::vector<std::pair<std::string, Breakpoint>>& candidates,
                          double shift_tolerance) {
    out << "product_id,breakpoint_week,earlier_mean,later_mean,shift_ratio,major\n";
    for (const auto& [id, bp] : candidates) {
        const bool major = bp.shift_ratio > shift_tolerance;
        out << id << ',' << (major ? std::to_string(bp.week) : std::string("none")) << ','
            << fixed(bp.earlier_mean, 4) << ',' << fixed(bp.later_mean, 4) << ','
            << fixed(bp.shift_ratio, 4) << ',' << (major ? "yes" : "no") << '\n';
    }
}

void write_ground_truth_csv(std::ostream& out, const SynthResult& r) {
    out << "week,is_mto\n";
    for (int w : r.series.weeks)
        out << w << ',' << (r.mto_weeks.count(w) ? 1 : 0) << '\n';
}

void write_portfolio_outputs(const std::filesystem::path& dir,
                             const std::vector<ProductAnalysis>& all) {
    std::filesystem::create_directories(dir);
    const auto open = [&](const std::filesystem::path& name) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out)
            throw InputError("cannot write " + (dir / name).string());
        return out;
    };

    {
        auto out = open("summary.csv");
        write_summary_csv(out, all);
    }
    {
        auto out = open("volumes.csv");
        write_volumes_csv(out, all);
    }
    for (const auto& a : all) {
        const std::string base = safe_filename(a.report.product_id);
        {
            auto out = open(base + "_report.json");
            out << report_json(a);
        }
        {
            auto out = open(base + "_series.csv");
            write_plotdata_csv(out, a);
        }
        if (a.split) {
            auto out = open(base + "_split.csv");
            write_split_csv(out, a);
        }
        if (a.histogram && a.thresholds) {
            auto out = open(base + "_hist.csv");
            write_hist_csv(out, a);
        }
        if (a.tree) {
            {
                auto out = open(base + "_dendro.csv");
                write_dendrogram_csv(out, *a.tree);
            }
            auto out = open(base + "_dendro.newick");
            std::vector<std::string> labels;
            for (int k = 0; k < a.tree->n_leaves; ++k)
                labels.push_back("c" + std::to_string(k + 1));
            out << to_newick(*a.tree, labels) << '\n';
        }
    }
}

} // namespace demandsplit
