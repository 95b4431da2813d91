#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "pushsim/correction.hpp"
#include "pushsim/gumbel.hpp"
#include "pushsim/simulator.hpp"
#include "pushsim/validation.hpp"

namespace pushsim {

/// Resolved configuration echoed into every artifact for provenance.
using ConfigEcho = std::vector<std::pair<std::string, std::string>>;

/// 17 significant digits; round-trips any double exactly.
std::string fmt_real(double v);

/// Three-column rows "x value value_minus_c0", one per grid point,
/// space-separated, LF endings. Leading '#' lines carry the format version
/// and the configuration.
void write_correction_table(std::ostream& os, const CorrectionTable& table,
                            const ConfigEcho& config);

/// Two-column variant "x value_minus_c0" (figure-ready data file).
void write_correction_table_offset(std::ostream& os, const CorrectionTable& table,
                                   const ConfigEcho& config);

/// Mesh rows "x y z" grouped by x with blank-line separators between rows
/// (plot-ready). z_offset is subtracted from every z and recorded in the
/// header.
void write_surface(std::ostream& os, const SurfaceTable& table, double z_offset,
                   const ConfigEcho& config);

/// Line-delimited "key value" summary: format-version, config echo, n,
/// trials, sampler, master-seed, mean, variance and one "bin k count" line
/// per histogram bin.
void write_ensemble_summary(std::ostream& os, const EmpiricalDistribution& dist,
                            Sampler sampler, std::uint64_t master_seed,
                            const ConfigEcho& config);

struct EnsembleSummary {
    EmpiricalDistribution dist;
    Sampler sampler = Sampler::Batch;
    std::uint64_t master_seed = 0;
};

/// Parses a file produced by write_ensemble_summary. Throws
/// std::runtime_error on malformed input or version mismatch.
EnsembleSummary read_ensemble_summary(std::istream& is);

/// Columnar text dump of retained trajectories: a version header, then one
/// "run <trial> <runtime> <|I_0|> <|I_1|> ..." line per run.
void write_trajectories(std::ostream& os, const std::vector<RunRecord>& runs,
                        const ConfigEcho& config);

/// Versioned key-value report plus one "check <name> <pass|fail> value <v>
/// lo <lo> hi <hi> margin <m>" line per bracket check.
void write_report(std::ostream& os, const ComparisonReport& report,
                  const ConfigEcho& config);

} // namespace pushsim
