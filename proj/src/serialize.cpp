#include "pushsim/serialize.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace pushsim {

namespace {

constexpr const char* kFormatVersion = "1";

void write_header(std::ostream& os, const char* kind, const ConfigEcho& config) {
    os << "# pushsim " << kind << " format-version " << kFormatVersion << "\n";
    for (const auto& [k, v] : config) os << "# " << k << " " << v << "\n";
}

} // namespace

std::string fmt_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_correction_table(std::ostream& os, const CorrectionTable& table,
                            const ConfigEcho& config) {
    write_header(os, "correction-table", config);
    for (const auto& r : table.rows)
        os << fmt_real(r.x) << " " << fmt_real(r.value) << " "
           << fmt_real(r.value_minus_c0) << "\n";
}

void write_correction_table_offset(std::ostream& os, const CorrectionTable& table,
                                   const ConfigEcho& config) {
    write_header(os, "correction-table-offset", config);
    for (const auto& r : table.rows)
        os << fmt_real(r.x) << " " << fmt_real(r.value_minus_c0) << "\n";
}

void write_surface(std::ostream& os, const SurfaceTable& table, double z_offset,
                   const ConfigEcho& config) {
    write_header(os, "surface-mesh", config);
    os << "# z-offset " << fmt_real(z_offset) << "\n";
    const std::uint32_t res = table.resolution;
    for (std::uint32_t i = 0; i < res; ++i) {
        for (std::uint32_t j = 0; j < res; ++j) {
            os << fmt_real(table.xs[i]) << " " << fmt_real(table.ys[j]) << " "
               << fmt_real(table.z[static_cast<std::size_t>(i) * res + j] - z_offset)
               << "\n";
        }
        if (i + 1 < res) os << "\n";
    }
}

void write_ensemble_summary(std::ostream& os, const EmpiricalDistribution& dist,
                            Sampler sampler, std::uint64_t master_seed,
                            const ConfigEcho& config) {
    os << "format ensemble-summary " << kFormatVersion << "\n";
    for (const auto& [k, v] : config) os << "config " << k << " " << v << "\n";
    os << "n " << dist.n << "\n";
    os << "trials " << dist.trials << "\n";
    os << "sampler " << sampler_name(sampler) << "\n";
    os << "master-seed " << master_seed << "\n";
    os << "mean " << fmt_real(dist.mean()) << "\n";
    os << "variance " << fmt_real(dist.variance()) << "\n";
    for (const auto& [k, c] : dist.counts) os << "bin " << k << " " << c << "\n";
}

EnsembleSummary read_ensemble_summary(std::istream& is) {
    EnsembleSummary out;
    std::string line;
    bool have_version = false;
    std::uint64_t declared_trials = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "format") {
            std::string kind, ver;
            ls >> kind >> ver;
            if (kind != "ensemble-summary" || ver != kFormatVersion)
                throw std::runtime_error("read_ensemble_summary: unexpected format " +
                                         kind + " " + ver);
            have_version = true;
        } else if (key == "n") {
            ls >> out.dist.n;
        } else if (key == "trials") {
            ls >> declared_trials;
        } else if (key == "sampler") {
            std::string name;
            ls >> name;
            out.sampler = sampler_from_name(name);
        } else if (key == "master-seed") {
            ls >> out.master_seed;
        } else if (key == "bin") {
            std::int64_t k;
            std::uint64_t c;
            if (!(ls >> k >> c))
                throw std::runtime_error("read_ensemble_summary: malformed bin line");
            out.dist.counts[k] += c;
            out.dist.trials += c;
        }
        // config/mean/variance lines are provenance; recomputed from bins
    }
    if (!have_version)
        throw std::runtime_error("read_ensemble_summary: missing format line");
    if (declared_trials != out.dist.trials)
        throw std::runtime_error("read_ensemble_summary: bin counts do not sum to trials");
    return out;
}

void write_trajectories(std::ostream& os, const std::vector<RunRecord>& runs,
                        const ConfigEcho& config) {
    os << "format trajectory-store " << kFormatVersion << "\n";
    for (const auto& [k, v] : config) os << "config " << k << " " << v << "\n";
    for (const auto& rec : runs) {
        os << "run " << rec.trial << " " << rec.runtime;
        for (auto v : rec.trajectory) os << " " << v;
        os << "\n";
    }
}

void write_report(std::ostream& os, const ComparisonReport& r,
                  const ConfigEcho& config) {
    os << "format comparison-report " << kFormatVersion << "\n";
    for (const auto& [k, v] : config) os << "config " << k << " " << v << "\n";
    os << "n " << r.n << "\n";
    os << "trials " << r.trials << "\n";
    os << "sampler " << sampler_name(r.sampler) << "\n";
    os << "master-seed " << r.master_seed << "\n";
    os << "frac-log2 " << fmt_real(r.x) << "\n";
    os << "frac-ln " << fmt_real(r.y) << "\n";
    os << "c-value " << fmt_real(r.c_value) << "\n";
    os << "shift " << fmt_real(r.shift) << "\n";
    os << "sup-cdf-distance " << fmt_real(r.sup_distance) << "\n";
    os << "sup-budget " << fmt_real(r.sup_budget) << "\n";
    os << "mean " << fmt_real(r.mean) << "\n";
    os << "mean-se " << fmt_real(r.mean_se) << "\n";
    os << "variance " << fmt_real(r.variance) << "\n";
    os << "variance-se " << fmt_real(r.variance_se) << "\n";
    os << "moment-delta-1 " << fmt_real(r.moment_delta_1) << "\n";
    os << "moment-delta-2 " << fmt_real(r.moment_delta_2) << "\n";
    for (const auto& c : r.checks) {
        os << "check " << c.name << " " << (c.pass ? "pass" : "fail") << " value "
           << fmt_real(c.value) << " lo " << fmt_real(c.lo) << " hi "
           << fmt_real(c.hi) << " margin " << fmt_real(c.margin) << "\n";
    }
    os << "result " << (r.passed() ? "pass" : "fail") << "\n";
}

} // namespace pushsim
