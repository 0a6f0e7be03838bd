#ifndef PAGELAB_CLI_HPP
#define PAGELAB_CLI_HPP

#include "pagelab/runtime.hpp"
#include "pagelab/sweep.hpp"
#include "pagelab/workload.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pagelab
{

// Environment variable that redirects every relative output path.
inline constexpr char const * kOutputDirEnv = "PAGELAB_OUTPUT_DIR";

/// Fetch latency in microseconds: a preset name (25gb, 10gb0, 10gb4, 56gb) or a number.
double parse_latency(std::string_view text);

/// `path` under $PAGELAB_OUTPUT_DIR when that is set and `path` is relative.
std::string output_path(std::string const & path);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);

struct GenResult
{
    std::size_t threads = 0;
    std::uint64_t accesses = 0;
    std::uint64_t footprint_pages = 0;
    std::vector<Region> regions;
};

/// Generates the stream; when `out` is non-empty also writes one line of page ids per thread.
GenResult cmd_gen(WorkloadSpec const & spec, std::string const & out);

struct TraceResult
{
    std::uint64_t fault_count = 0;
    std::uint64_t file_bytes = 0;
    std::size_t microsets = 0;
};

TraceResult cmd_trace(WorkloadSpec const & spec, std::uint32_t microset_size,
                      std::uint64_t interleaving_quantum, std::string const & out);

struct PostprocessResult
{
    std::uint64_t target_pages = 0;
    std::uint64_t trace_pages = 0; // distinct pages in the trace
    std::uint64_t per_thread_capacity = 0;
    std::vector<std::uint64_t> tape_lengths;
};

/*
 * Exactly one of `ratio` (of the trace's distinct pages) and `pages` must be
 * given. The trace is streamed; the distinct-page count needs one extra pass.
 */
PostprocessResult cmd_postprocess(std::string const & trace_path, std::optional<double> ratio,
                                  std::optional<std::uint64_t> pages, std::string const & out);

struct SimulateOptions
{
    WorkloadSpec spec;
    std::string policy = "none";
    SimConfig config;
    // Overrides config.local_pages when set.
    std::optional<double> local_ratio;
    std::optional<std::string> tape_path;
    // Trace and post-process on demand, cached under cache_dir by spec hash.
    bool auto_tape = false;
    std::uint32_t microset_size = 1024;
    std::string cache_dir = ".pagelab-cache";
};

SimReport cmd_simulate(SimulateOptions const & options);

struct SweepResult
{
    std::vector<SweepRow> rows;
    std::string csv_path;
};

SweepResult cmd_sweep(SweepSpec const & spec, bool serial = false);

struct Comparison
{
    double speedup = 0;                    // B.total / A.total
    std::optional<double> major_ratio;     // A.majors / B.majors, absent when B has none
    std::int64_t major_difference = 0;     // B.majors - A.majors
};

Comparison compare_reports(SimReport const & a, SimReport const & b);
void print_comparison(std::ostream & out, SimReport const & a, SimReport const & b, Comparison const & c);

SimReport load_report(std::string const & path);
void save_report(std::string const & path, SimReport const & report);

struct AuditResult
{
    bool passed = false;
    std::vector<std::string> problems;
};

/// Simulates twice with the per-event audit on and checks conservation and determinism.
AuditResult cmd_audit(SimulateOptions const & options);

} // namespace pagelab

#endif // PAGELAB_CLI_HPP
