#include "pagelab/sweep.hpp"

#include "pagelab/tape.hpp"
#include "pagelab/tracer.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

namespace pagelab
{

namespace
{

struct Cell
{
    std::size_t workload;
    std::string policy;
    double ratio;
    std::optional<std::size_t> microset; // index into spec.microset_sizes
};

// Row order shared by both runners: workload, policy, ratio, microset size.
std::vector<Cell> enumerate_cells(SweepSpec const & spec)
{
    std::vector<Cell> cells;
    for (std::size_t w = 0; w < spec.workloads.size(); ++w) {
        for (auto const & policy : spec.policies) {
            for (auto ratio : spec.ratios) {
                if (!policy_uses_tape(policy)) {
                    cells.push_back({w, policy, ratio, std::nullopt});
                    continue;
                }
                for (std::size_t m = 0; m < spec.microset_sizes.size(); ++m)
                    cells.push_back({w, policy, ratio, m});
            }
        }
    }
    return cells;
}

SweepRow simulate_cell(SweepSpec const & spec, Cell const & cell, AccessStream const & stream,
                       std::uint64_t footprint, Trace const * trace)
{
    SweepRow row;
    row.workload = spec.workloads[cell.workload].name;
    row.policy = cell.policy;
    row.ratio = cell.ratio;
    row.footprint_pages = footprint;
    row.local_pages = local_pages_for_ratio(cell.ratio, footprint);

    auto config = spec.config;
    config.local_pages = row.local_pages;
    if (cell.microset) {
        row.microset_size = spec.microset_sizes[*cell.microset];
        auto tape = make_tapes_multithread(*trace, row.local_pages,
                                           static_cast<std::uint32_t>(stream.thread_count()));
        row.report = run_sim(stream, make_policy(cell.policy, config, &tape), config);
    } else {
        row.report = run_sim(stream, make_policy(cell.policy, config), config);
    }
    return row;
}

bool any_tape_policy(SweepSpec const & spec)
{
    for (auto const & p : spec.policies) {
        if (policy_uses_tape(p))
            return true;
    }
    return false;
}

std::string format_double(double v, char const * fmt)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

} // namespace

void SweepSpec::validate() const
{
    if (workloads.empty())
        throw InvalidParameter("sweep needs at least one workload");
    if (policies.empty())
        throw InvalidParameter("sweep needs at least one policy");
    if (ratios.empty())
        throw InvalidParameter("sweep needs at least one memory ratio");
    for (auto r : ratios) {
        if (!(r > 0.0 && r <= 1.0))
            throw InvalidParameter("memory ratios must lie in (0, 1]");
    }
    for (auto m : microset_sizes) {
        if (m == 0)
            throw InvalidParameter("microset sizes must be positive");
    }
    if (any_tape_policy(*this) && microset_sizes.empty())
        throw InvalidParameter("the tape policy needs at least one microset size");
    Tape const empty;
    for (auto const & p : policies)
        make_policy(p, config, &empty);
    config.validate();
}

std::uint64_t local_pages_for_ratio(double ratio, std::uint64_t footprint)
{
    auto pages = static_cast<std::uint64_t>(std::floor(ratio * static_cast<double>(footprint) + 1e-9));
    return std::max<std::uint64_t>(1, pages);
}

bool policy_uses_tape(std::string const & name)
{
    return name == "threepo";
}

PrefetchPolicy make_policy(std::string const & name, SimConfig const & config, Tape const * tape)
{
    if (name == "none")
        return NoPrefetch{};
    if (name == "readahead")
        return ReadaheadPolicy{config.readahead_window};
    if (name == "stride")
        return StridePolicy{config.stride_history, config.readahead_window};
    if (name == "threepo") {
        if (!tape)
            throw InvalidParameter("the threepo policy needs a tape");
        return ThreePoPolicy{*tape};
    }
    throw InvalidParameter("unknown policy '" + name + "'");
}

std::vector<SweepRow> run_sweep_serial(SweepSpec const & spec)
{
    spec.validate();
    std::vector<SweepRow> rows;
    for (std::size_t w = 0; w < spec.workloads.size(); ++w) {
        auto stream = gen_stream(spec.workloads[w].spec);
        auto footprint = footprint_pages(stream);
        for (auto const & policy : spec.policies) {
            for (auto ratio : spec.ratios) {
                if (!policy_uses_tape(policy)) {
                    rows.push_back(simulate_cell(spec, {w, policy, ratio, std::nullopt}, stream,
                                                 footprint, nullptr));
                    continue;
                }
                for (std::size_t m = 0; m < spec.microset_sizes.size(); ++m) {
                    auto trace = trace_multithread(stream, spec.microset_sizes[m],
                                                   spec.config.interleaving_quantum);
                    rows.push_back(simulate_cell(spec, {w, policy, ratio, m}, stream, footprint, &trace));
                }
            }
        }
    }
    return rows;
}

std::vector<SweepRow> run_sweep_parallel(SweepSpec const & spec)
{
    spec.validate();
    auto const n_work = spec.workloads.size();
    auto const n_ms = spec.microset_sizes.size();

    std::vector<AccessStream> streams(n_work);
    std::vector<std::uint64_t> footprints(n_work);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t w = 0; w < static_cast<std::int64_t>(n_work); ++w) {
        auto i = static_cast<std::size_t>(w);
        streams[i] = gen_stream(spec.workloads[i].spec);
        footprints[i] = footprint_pages(streams[i]);
    }

    // one trace per (workload, microset size), shared by every ratio
    std::vector<Trace> traces(any_tape_policy(spec) ? n_work * n_ms : 0);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t job = 0; job < static_cast<std::int64_t>(traces.size()); ++job) {
        auto i = static_cast<std::size_t>(job);
        traces[i] = trace_multithread(streams[i / n_ms], spec.microset_sizes[i % n_ms],
                                      spec.config.interleaving_quantum);
    }

    auto cells = enumerate_cells(spec);
    std::vector<SweepRow> rows(cells.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(cells.size()); ++c) {
        auto const & cell = cells[static_cast<std::size_t>(c)];
        Trace const * trace = cell.microset ? &traces[cell.workload * n_ms + *cell.microset] : nullptr;
        rows[static_cast<std::size_t>(c)] =
            simulate_cell(spec, cell, streams[cell.workload], footprints[cell.workload], trace);
    }
    return rows;
}

void write_sweep_csv(std::ostream & out, std::vector<SweepRow> const & rows)
{
    out << "workload,policy,ratio,microset_size,footprint_pages,local_pages,accesses,"
           "total_us,majors,minors,delayed_hits,hits,cpu_us,handler_us,stall_io_us,"
           "evict_stall_us,prefetches\n";
    for (auto const & row : rows) {
        auto const & r = row.report;
        out << row.workload << ',' << row.policy << ',' << format_double(row.ratio, "%.4g") << ','
            << (row.microset_size ? std::to_string(*row.microset_size) : "") << ','
            << row.footprint_pages << ',' << row.local_pages << ',' << r.accesses << ','
            << format_double(r.total_us, "%.3f") << ',' << r.majors << ',' << r.minors << ','
            << r.delayed_hits << ',' << r.hits << ',' << format_double(r.cpu_us, "%.3f") << ','
            << format_double(r.handler_us, "%.3f") << ',' << format_double(r.stall_io_us, "%.3f")
            << ',' << format_double(r.evict_stall_us, "%.3f") << ',' << r.prefetches << '\n';
    }
}

SweepSpec sweep_spec_from_json(nlohmann::json const & j, std::string const & base_dir)
{
    SweepSpec spec;
    for (auto const & w : j.at("workloads")) {
        NamedWorkload named;
        if (w.is_string()) {
            std::filesystem::path path = w.get<std::string>();
            if (path.is_relative())
                path = std::filesystem::path(base_dir) / path;
            named.spec = load_workload_spec(path.string());
            named.name = path.stem().string();
        } else {
            named.spec = w.get<WorkloadSpec>();
            named.name = w.value("name", std::string(to_string(named.spec.kind)));
        }
        spec.workloads.push_back(std::move(named));
    }
    if (j.contains("policies"))
        j.at("policies").get_to(spec.policies);
    if (j.contains("ratios"))
        j.at("ratios").get_to(spec.ratios);
    if (j.contains("microset_sizes"))
        j.at("microset_sizes").get_to(spec.microset_sizes);
    if (j.contains("config"))
        from_json(j.at("config"), spec.config);
    if (j.contains("output_dir"))
        j.at("output_dir").get_to(spec.output_dir);
    return spec;
}

SweepSpec load_sweep_spec(std::string const & path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open sweep spec '" + path + "'");
    try {
        auto j = nlohmann::json::parse(in);
        return sweep_spec_from_json(j, std::filesystem::path(path).parent_path().string());
    } catch (nlohmann::json::exception const & e) {
        throw InvalidParameter("invalid sweep spec '" + path + "': " + e.what());
    }
}

} // namespace pagelab
