#ifndef PAGELAB_SWEEP_HPP
#define PAGELAB_SWEEP_HPP

#include "pagelab/runtime.hpp"
#include "pagelab/workload.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pagelab
{

struct NamedWorkload
{
    std::string name;
    WorkloadSpec spec;
};

/*
 * A grid of simulations: every workload x policy x local-memory ratio, and
 * for the tape policy additionally every microset size.
 */
struct SweepSpec
{
    std::vector<NamedWorkload> workloads;
    std::vector<std::string> policies{"threepo", "readahead", "none"};
    std::vector<double> ratios{1.0, 0.5, 0.2};
    std::vector<std::uint32_t> microset_sizes{1024};
    SimConfig config;
    std::string output_dir = ".";

    void validate() const;
};

struct SweepRow
{
    std::string workload;
    std::string policy;
    double ratio = 0;
    std::optional<std::uint32_t> microset_size;
    std::uint64_t footprint_pages = 0;
    std::uint64_t local_pages = 0;
    SimReport report;

    friend bool operator==(SweepRow const &, SweepRow const &) = default;
};

/// floor(ratio * footprint), at least one page.
std::uint64_t local_pages_for_ratio(double ratio, std::uint64_t footprint);

/// Builds a policy by CLI name; the tape is required for "threepo".
PrefetchPolicy make_policy(std::string const & name, SimConfig const & config,
                           Tape const * tape = nullptr);

bool policy_uses_tape(std::string const & name);

/// Reference implementation: one cell after another.
std::vector<SweepRow> run_sweep_serial(SweepSpec const & spec);

/// Same rows, same order; traces, tapes and cells are computed with OpenMP.
std::vector<SweepRow> run_sweep_parallel(SweepSpec const & spec);

void write_sweep_csv(std::ostream & out, std::vector<SweepRow> const & rows);

/*
 * Workloads may be given as spec file paths (resolved against `base_dir`)
 * or inline spec objects with an optional "name". "config" overrides
 * SimConfig fields.
 */
SweepSpec sweep_spec_from_json(nlohmann::json const & j, std::string const & base_dir = ".");
SweepSpec load_sweep_spec(std::string const & path);

} // namespace pagelab

#endif // PAGELAB_SWEEP_HPP
